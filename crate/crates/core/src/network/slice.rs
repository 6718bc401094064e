//! Triangular slice geometry, boundary wiring and term enumeration.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fock::LocalOp;

/// Site `(k, l)` of the triangle: row `k`, column `l`, `k + l <= n`.
pub type Site = (u32, u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Flow {
    WestToEast,
    EastToWest,
}

/// Boundary stub of the slice. Column stubs sit at the two ends of a column
/// (`ColumnIn` on the hypotenuse, `ColumnOut` below row 1); row stubs at the
/// two ends of a row, named after the horizontal flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stub {
    ColumnIn(u32),
    ColumnOut(u32),
    RowIn(u32),
    RowOut(u32),
}

impl Stub {
    pub fn is_input(self) -> bool {
        matches!(self, Stub::ColumnIn(_) | Stub::RowIn(_))
    }
}

/// Edge slots of a site, in tensor index order `(i, j, a, b)`.
pub const IN_H: usize = 0;
pub const IN_V: usize = 1;
pub const OUT_H: usize = 2;
pub const OUT_V: usize = 3;

/// One triangular slice `D_n`. Vertical lines run from the hypotenuse down
/// to row 1 (a site's vertical input comes from the site above it);
/// horizontal lines run along rows in the direction given by `flow`.
#[derive(Clone, Debug)]
pub struct SliceNetwork {
    pub n: u32,
    pub flow: Flow,
    sites: Vec<Site>,
    incidence: Vec<[usize; 4]>,
    edge_count: usize,
    stubs: BTreeMap<Stub, usize>,
}

impl SliceNetwork {
    pub fn new(n: u32, flow: Flow) -> Self {
        assert!(n >= 2, "a slice needs n >= 2");
        let sites: Vec<Site> = (1..n).flat_map(|k| (1..=n - k).map(move |l| (k, l))).collect();
        let mut next = 0usize;
        let mut alloc = || {
            next += 1;
            next - 1
        };
        // vert[(k, l)]: edge between rows k and k+1 of column l, k = 0..=n-l.
        let mut vert = BTreeMap::new();
        for l in 1..n {
            for k in 0..=n - l {
                vert.insert((k, l), alloc());
            }
        }
        // hor[(k, l)]: edge on the west side of position l in row k, l = 1..=n-k+1.
        let mut hor = BTreeMap::new();
        for k in 1..n {
            for l in 1..=n - k + 1 {
                hor.insert((k, l), alloc());
            }
        }
        let incidence = sites
            .iter()
            .map(|&(k, l)| {
                let (west, east) = (hor[&(k, l)], hor[&(k, l + 1)]);
                let (i, a) = match flow {
                    Flow::WestToEast => (west, east),
                    Flow::EastToWest => (east, west),
                };
                [i, vert[&(k, l)], a, vert[&(k - 1, l)]]
            })
            .collect();
        let mut stubs = BTreeMap::new();
        for l in 1..n {
            stubs.insert(Stub::ColumnIn(l), vert[&(n - l, l)]);
            stubs.insert(Stub::ColumnOut(l), vert[&(0, l)]);
        }
        for k in 1..n {
            let (west, east) = (hor[&(k, 1)], hor[&(k, n - k + 1)]);
            let (input, output) = match flow {
                Flow::WestToEast => (west, east),
                Flow::EastToWest => (east, west),
            };
            stubs.insert(Stub::RowIn(k), input);
            stubs.insert(Stub::RowOut(k), output);
        }
        SliceNetwork { n, flow, sites, incidence, edge_count: next, stubs }
    }

    /// Sites in canonical (lexicographic) order.
    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site_index(&self, s: Site) -> Option<usize> {
        self.sites.binary_search(&s).ok()
    }

    /// Edges `(i, j, a, b)` of the site at canonical position `idx`.
    pub fn incidence(&self, idx: usize) -> [usize; 4] {
        self.incidence[idx]
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn stub(&self, s: Stub) -> usize {
        self.stubs[&s]
    }

    pub fn stubs(&self) -> impl Iterator<Item = (Stub, usize)> + '_ {
        self.stubs.iter().map(|(s, e)| (*s, *e))
    }

    /// The row stub lying on the hypotenuse for row `k`.
    pub fn hypotenuse_row_stub(&self, k: u32) -> Stub {
        match self.flow {
            Flow::WestToEast => Stub::RowOut(k),
            Flow::EastToWest => Stub::RowIn(k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FixedReading {
    /// Column inputs `1..n-1`, then the input stub of row 1.
    ColumnsThenRow,
    /// The hypotenuse read from column 1 to row 1, with each row end grouped
    /// with the column top it touches.
    Staircase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResidualInputs {
    Summed,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightedOutputs {
    Columns,
    ColumnsAndRow,
    All,
}

/// Wiring of the layer operators on the slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Convention {
    pub flow: Flow,
    pub fixed: FixedReading,
    pub residual: ResidualInputs,
    pub weighted: WeightedOutputs,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{:?}/{:?}/{:?}", self.flow, self.fixed, self.residual, self.weighted)
    }
}

impl Convention {
    pub fn candidates() -> Vec<Convention> {
        let mut out = Vec::with_capacity(24);
        for flow in [Flow::WestToEast, Flow::EastToWest] {
            for fixed in [FixedReading::ColumnsThenRow, FixedReading::Staircase] {
                for residual in [ResidualInputs::Summed, ResidualInputs::Zero] {
                    for weighted in [WeightedOutputs::Columns, WeightedOutputs::ColumnsAndRow, WeightedOutputs::All] {
                        out.push(Convention { flow, fixed, residual, weighted });
                    }
                }
            }
        }
        out
    }

    /// The `n` fixed boundary segments in reading order. `X_i` colors the
    /// first `i` segments red and the rest blue.
    pub fn fixed_segments(&self, net: &SliceNetwork) -> Vec<Vec<Stub>> {
        let n = net.n;
        match self.fixed {
            FixedReading::ColumnsThenRow => {
                let mut segs: Vec<Vec<Stub>> = (1..n).map(|l| vec![Stub::ColumnIn(l)]).collect();
                segs.push(vec![Stub::RowIn(1)]);
                segs
            }
            FixedReading::Staircase => {
                let mut segs = vec![vec![Stub::ColumnIn(1)]];
                for l in 1..n - 1 {
                    segs.push(vec![net.hypotenuse_row_stub(n - l), Stub::ColumnIn(l + 1)]);
                }
                segs.push(vec![net.hypotenuse_row_stub(1)]);
                segs
            }
        }
    }

    pub fn weighted_stubs(&self, n: u32) -> Vec<Stub> {
        let mut out: Vec<Stub> = (1..n).map(Stub::ColumnOut).collect();
        match self.weighted {
            WeightedOutputs::Columns => {}
            WeightedOutputs::ColumnsAndRow => out.push(Stub::RowOut(1)),
            WeightedOutputs::All => out.extend((1..n).map(Stub::RowOut)),
        }
        out
    }
}

/// One summand of a layer operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerTerm {
    /// Number of red stubs on the weighted boundary.
    pub alpha: u32,
    /// Operator at each site, canonical order.
    pub ops: Vec<LocalOp>,
}

/// Nonzero entries of the q=0 vertex weight for inputs `(i, j)`.
pub(crate) fn q0_outputs(i: u8, j: u8) -> &'static [(u8, u8, LocalOp)] {
    match (i, j) {
        (0, 0) => &[(0, 0, LocalOp::IdB)],
        (1, 1) => &[(1, 1, LocalOp::IdR)],
        (1, 0) => &[(0, 1, LocalOp::BPlus)],
        _ => &[(1, 0, LocalOp::BMinus), (0, 1, LocalOp::TProj)],
    }
}

struct Search<'a> {
    net: &'a SliceNetwork,
    order: Vec<usize>,
    colors: Vec<i8>,
    ops: Vec<LocalOp>,
    weighted: Vec<usize>,
    out: Vec<LayerTerm>,
}

impl Search<'_> {
    fn run(&mut self, pos: usize) {
        if pos == self.order.len() {
            let alpha = self.weighted.iter().filter(|&&e| self.colors[e] == 1).count() as u32;
            self.out.push(LayerTerm { alpha, ops: self.ops.clone() });
            return;
        }
        let s = self.order[pos];
        let inc = self.net.incidence(s);
        let choices = |c: i8| -> &'static [u8] {
            match c {
                0 => &[0],
                1 => &[1],
                _ => &[0, 1],
            }
        };
        let (ci, cj) = (self.colors[inc[IN_H]], self.colors[inc[IN_V]]);
        for &i in choices(ci) {
            for &j in choices(cj) {
                self.colors[inc[IN_H]] = i as i8;
                self.colors[inc[IN_V]] = j as i8;
                for &(a, b, op) in q0_outputs(i, j) {
                    let (pa, pb) = (self.colors[inc[OUT_H]], self.colors[inc[OUT_V]]);
                    if (pa >= 0 && pa != a as i8) || (pb >= 0 && pb != b as i8) {
                        continue;
                    }
                    self.colors[inc[OUT_H]] = a as i8;
                    self.colors[inc[OUT_V]] = b as i8;
                    self.ops[s] = op;
                    self.run(pos + 1);
                    self.colors[inc[OUT_H]] = pa;
                    self.colors[inc[OUT_V]] = pb;
                }
            }
        }
        self.colors[inc[IN_H]] = ci;
        self.colors[inc[IN_V]] = cj;
    }
}

/// All nonzero summands of `X_i` on `net` (whose flow must match the convention).
pub fn enumerate_layer_terms(net: &SliceNetwork, i: u32, conv: &Convention) -> Vec<LayerTerm> {
    assert_eq!(net.flow, conv.flow, "network built with a different flow");
    assert!(i <= net.n, "label {i} exceeds n = {}", net.n);
    let mut colors = vec![-1i8; net.edge_count()];
    for (idx, seg) in conv.fixed_segments(net).iter().enumerate() {
        for &stub in seg {
            colors[net.stub(stub)] = (idx < i as usize) as i8;
        }
    }
    if conv.residual == ResidualInputs::Zero {
        for (stub, e) in net.stubs() {
            if stub.is_input() && colors[e] < 0 {
                colors[e] = 0;
            }
        }
    }
    // Upstream sites first: high rows before low rows, and along the row flow.
    let mut order: Vec<usize> = (0..net.sites().len()).collect();
    order.sort_by_key(|&s| {
        let (k, l) = net.sites()[s];
        let l = match net.flow {
            Flow::WestToEast => l as i64,
            Flow::EastToWest => -(l as i64),
        };
        (std::cmp::Reverse(k), l)
    });
    let weighted = conv.weighted_stubs(net.n).into_iter().map(|s| net.stub(s)).collect();
    let mut search = Search { net, order, colors, ops: vec![LocalOp::Zero; net.sites().len()], weighted, out: Vec::new() };
    search.run(0);
    search.out
}
