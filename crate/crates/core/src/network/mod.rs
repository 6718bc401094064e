//! Layer operators on the triangular slice and their vacuum expectation values.

mod column;
mod slice;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

pub use column::{
    bra_times, build_t, build_y, strip_amplitude, strip_amplitude_restricted, ColumnOp, ColumnTerm, StripKet,
    TFamily, TIndex,
};
pub use slice::{
    enumerate_layer_terms, Convention, FixedReading, Flow, LayerTerm, ResidualInputs, Site, SliceNetwork, Stub,
    WeightedOutputs,
};

use crate::error::{FockError, NetworkError};
use crate::fock::LocalOp;
use crate::poly::{Coeff, LaurentPoly, Monomial, Var};

/// Occupancies of all sites, canonical site order.
pub type SiteState = Vec<u32>;

/// Finite linear combination of site states; never stores zero coefficients.
pub type KetCombo<C> = BTreeMap<SiteState, LaurentPoly<C>>;

pub fn vacuum<C: Coeff>(sites: usize) -> KetCombo<C> {
    BTreeMap::from([(vec![0; sites], LaurentPoly::one())])
}

/// How the spectral variable of a layer enters its weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LayerBinding {
    /// `z^alpha` per term.
    Scalar(Var),
    /// One variable per site: `b+` at site `s` carries `z_s`, `b-` carries `z_s^-1`.
    Inhomogeneous(BTreeMap<Site, Var>),
}

impl LayerBinding {
    /// Site variables `z{t}_k{k}l{l}` for every site of `D_n`.
    pub fn sites_of_layer(n: u32, layer: u32) -> Self {
        let map = (1..n).flat_map(|k| (1..=n - k).map(move |l| ((k, l), Var::site(layer, k, l)))).collect();
        LayerBinding::Inhomogeneous(map)
    }

    pub fn vars(&self) -> Vec<Var> {
        match self {
            LayerBinding::Scalar(v) => vec![*v],
            LayerBinding::Inhomogeneous(m) => m.values().copied().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    pub label: u32,
    pub binding: LayerBinding,
    pub deriv: u32,
}

/// `<Ω| X_{i_1}(..) ... X_{i_m}(..) |Ω>` with layers listed left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    pub n: u32,
    pub layers: Vec<LayerSpec>,
}

impl PartitionSpec {
    /// Scalar layers with variables `z1, z2, ...`.
    pub fn scalar(n: u32, labels: &[u32]) -> Self {
        let layers = labels
            .iter()
            .enumerate()
            .map(|(t, &label)| LayerSpec { label, binding: LayerBinding::Scalar(Var::Z(t as u32 + 1)), deriv: 0 })
            .collect();
        PartitionSpec { n, layers }
    }

    /// Inhomogeneous layers with site variables `z{t}_k{k}l{l}`.
    pub fn inhomogeneous(n: u32, labels: &[u32]) -> Self {
        let layers = labels
            .iter()
            .enumerate()
            .map(|(t, &label)| LayerSpec { label, binding: LayerBinding::sites_of_layer(n, t as u32 + 1), deriv: 0 })
            .collect();
        PartitionSpec { n, layers }
    }

    /// Scalar layers where label `labels[k]` is repeated `blocks[k]` times.
    pub fn blocked(n: u32, labels: &[u32], blocks: &[usize]) -> Self {
        let expanded: Vec<u32> = labels.iter().zip(blocks).flat_map(|(&l, &b)| std::iter::repeat(l).take(b)).collect();
        Self::scalar(n, &expanded)
    }

    pub fn with_derivatives(mut self, orders: &[u32]) -> Self {
        for (layer, &d) in self.layers.iter_mut().zip(orders) {
            layer.deriv = d;
        }
        self
    }

    pub fn labels(&self) -> Vec<u32> {
        self.layers.iter().map(|l| l.label).collect()
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.n < 2 {
            return Err(NetworkError::SizeTooSmall { n: self.n, min: 2 });
        }
        let mut seen: BTreeMap<Var, usize> = BTreeMap::new();
        for (pos, layer) in self.layers.iter().enumerate() {
            if layer.label > self.n {
                return Err(NetworkError::InvalidLabel { label: layer.label, pos, n: self.n });
            }
            for v in layer.binding.vars() {
                if let Some(prev) = seen.insert(v, pos) {
                    if prev != pos && (layer.deriv > 0 || self.layers[prev].deriv > 0) {
                        return Err(NetworkError::InvalidSpec(format!(
                            "differentiated variable {v} is shared by layers {} and {}",
                            prev + 1,
                            pos + 1
                        )));
                    }
                }
            }
            if layer.deriv > 0 && !matches!(layer.binding, LayerBinding::Scalar(_)) {
                return Err(NetworkError::InvalidSpec("derivatives need a scalar variable".into()));
            }
            if let LayerBinding::Inhomogeneous(map) = &layer.binding {
                for k in 1..self.n {
                    for l in 1..=self.n - k {
                        if !map.contains_key(&(k, l)) {
                            return Err(NetworkError::UnboundSite(k, l));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A term reduced to the sites where it changes something.
struct Compiled {
    weight: Monomial,
    moves: Vec<(usize, LocalOp)>,
}

fn term_weight(term: &LayerTerm, sites: &[Site], binding: &LayerBinding) -> Result<Monomial, NetworkError> {
    match binding {
        LayerBinding::Scalar(v) => Ok(Monomial::var_pow(*v, term.alpha as i32)),
        LayerBinding::Inhomogeneous(map) => {
            let mut pairs = Vec::new();
            for (s, op) in term.ops.iter().enumerate() {
                let e = match op {
                    LocalOp::BPlus => 1,
                    LocalOp::BMinus => -1,
                    _ => continue,
                };
                let v = map.get(&sites[s]).ok_or(NetworkError::UnboundSite(sites[s].0, sites[s].1))?;
                pairs.push((*v, e));
            }
            Ok(Monomial::from_pairs(pairs))
        }
    }
}

fn compile(terms: &[LayerTerm], sites: &[Site], binding: &LayerBinding) -> Result<Vec<Compiled>, NetworkError> {
    terms
        .iter()
        .map(|t| {
            let moves = t
                .ops
                .iter()
                .enumerate()
                .filter(|(_, op)| !matches!(op, LocalOp::IdB | LocalOp::IdR))
                .map(|(s, op)| (s, *op))
                .collect();
            Ok(Compiled { weight: term_weight(t, sites, binding)?, moves })
        })
        .collect()
}

/// Image of a basis state under one term, `None` if the term annihilates it.
fn step(moves: &[(usize, LocalOp)], state: &[u32], cutoff: u32) -> Result<Option<SiteState>, FockError> {
    for &(s, op) in moves {
        match op {
            LocalOp::BMinus if state[s] == 0 => return Ok(None),
            LocalOp::TProj if state[s] != 0 => return Ok(None),
            LocalOp::BPlus if state[s] >= cutoff => {
                return Err(FockError::CutoffOverflow { op, m: state[s], cutoff });
            }
            _ => {}
        }
    }
    let mut next = state.to_vec();
    for &(s, op) in moves {
        match op {
            LocalOp::BPlus => next[s] += 1,
            LocalOp::BMinus => next[s] -= 1,
            _ => {}
        }
    }
    Ok(Some(next))
}

fn merge<C: Coeff>(mut a: KetCombo<C>, b: KetCombo<C>) -> KetCombo<C> {
    if a.len() < b.len() {
        return merge(b, a);
    }
    for (s, c) in b {
        let e = a.entry(s).or_default();
        *e += &c;
    }
    a.retain(|_, c| !c.is_zero());
    a
}

const PAR_THRESHOLD: usize = 64;

fn apply_compiled<C: Coeff>(terms: &[Compiled], ket: &KetCombo<C>, cutoff: u32) -> Result<KetCombo<C>, NetworkError> {
    let one_state = |state: &SiteState, coeff: &LaurentPoly<C>, acc: &mut KetCombo<C>| -> Result<(), NetworkError> {
        for t in terms {
            if let Some(next) = step(&t.moves, state, cutoff)? {
                acc.entry(next).or_default().add_shifted(coeff, &t.weight);
            }
        }
        Ok(())
    };
    let mut out = if ket.len() < PAR_THRESHOLD {
        let mut acc = BTreeMap::new();
        for (s, c) in ket {
            one_state(s, c, &mut acc)?;
        }
        acc
    } else {
        ket.par_iter()
            .try_fold(BTreeMap::new, |mut acc, (s, c)| one_state(s, c, &mut acc).map(|_| acc))
            .try_reduce(BTreeMap::new, |a, b| Ok(merge(a, b)))?
    };
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// `Σ_terms weight · (⊗ ops) · ket`, then `deriv`-fold differentiation by the
/// scalar layer variable.
pub fn apply_layer<C: Coeff>(
    terms: &[LayerTerm],
    sites: &[Site],
    binding: &LayerBinding,
    deriv: u32,
    ket: &KetCombo<C>,
    cutoff: u32,
) -> Result<KetCombo<C>, NetworkError> {
    let compiled = compile(terms, sites, binding)?;
    let mut out = apply_compiled(&compiled, ket, cutoff)?;
    if deriv > 0 {
        let LayerBinding::Scalar(v) = binding else {
            return Err(NetworkError::InvalidSpec("derivatives need a scalar variable".into()));
        };
        for c in out.values_mut() {
            *c = c.nth_derivative(*v, deriv);
        }
        out.retain(|_, c| !c.is_zero());
    }
    Ok(out)
}

/// One contributing global configuration of a partition function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Configuration {
    /// Index of the chosen term in each layer's term list, left to right.
    pub terms: Vec<usize>,
    /// z-exponent of each layer, left to right.
    pub alphas: Vec<u32>,
    pub weight: Monomial,
}

/// Evaluates layer products under a fixed convention, caching the term lists.
pub struct LayerEngine {
    convention: Convention,
    terms: RwLock<HashMap<(u32, u32), Arc<Vec<LayerTerm>>>>,
    nets: RwLock<HashMap<u32, Arc<SliceNetwork>>>,
}

impl LayerEngine {
    pub fn new(convention: Convention) -> Self {
        LayerEngine { convention, terms: RwLock::default(), nets: RwLock::default() }
    }

    /// Engine for the convention picked by [`resolve_convention`].
    pub fn resolved() -> Result<Self, NetworkError> {
        Ok(Self::new(resolve_convention(4)?))
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn network(&self, n: u32) -> Arc<SliceNetwork> {
        if let Some(net) = self.nets.read().unwrap().get(&n) {
            return net.clone();
        }
        let net = Arc::new(SliceNetwork::new(n, self.convention.flow));
        self.nets.write().unwrap().entry(n).or_insert(net).clone()
    }

    pub fn terms(&self, n: u32, i: u32) -> Arc<Vec<LayerTerm>> {
        if let Some(t) = self.terms.read().unwrap().get(&(n, i)) {
            return t.clone();
        }
        let terms = Arc::new(enumerate_layer_terms(&self.network(n), i, &self.convention));
        self.terms.write().unwrap().entry((n, i)).or_insert(terms).clone()
    }

    /// Applies `X_i` with the given binding to `ket`.
    pub fn apply<C: Coeff>(
        &self,
        n: u32,
        i: u32,
        binding: &LayerBinding,
        deriv: u32,
        ket: &KetCombo<C>,
        cutoff: u32,
    ) -> Result<KetCombo<C>, NetworkError> {
        if i > n {
            return Err(NetworkError::InvalidLabel { label: i, pos: 0, n });
        }
        let net = self.network(n);
        apply_layer(&self.terms(n, i), net.sites(), binding, deriv, ket, cutoff)
    }

    /// Vacuum expectation value with the default cutoff (number of layers).
    pub fn vev<C: Coeff>(&self, spec: &PartitionSpec) -> Result<LaurentPoly<C>, NetworkError> {
        self.vev_with_cutoff(spec, spec.layers.len() as u32)
    }

    pub fn vev_with_cutoff<C: Coeff>(&self, spec: &PartitionSpec, cutoff: u32) -> Result<LaurentPoly<C>, NetworkError> {
        spec.validate()?;
        let sites = self.network(spec.n).sites().len();
        let mut ket = vacuum::<C>(sites);
        for (t, layer) in spec.layers.iter().enumerate().rev() {
            ket = self.apply(spec.n, layer.label, &layer.binding, layer.deriv, &ket, cutoff)?;
            // Each remaining layer lowers an occupancy by at most one.
            ket.retain(|s, _| s.iter().all(|&m| m as usize <= t));
        }
        Ok(ket.remove(&vec![0; sites]).unwrap_or_default())
    }

    /// The vev with every variable set to 1 (derivative orders ignored).
    pub fn count_configurations(&self, spec: &PartitionSpec) -> Result<BigInt, NetworkError> {
        let plain = spec.clone().with_derivatives(&vec![0; spec.layers.len()]);
        Ok(self.vev::<BigInt>(&plain)?.eval_at_one())
    }

    /// Every global configuration with nonzero vacuum pairing.
    pub fn configurations(&self, spec: &PartitionSpec) -> Result<Vec<Configuration>, NetworkError> {
        spec.validate()?;
        let net = self.network(spec.n);
        let cutoff = spec.layers.len() as u32;
        let layers: Vec<(Arc<Vec<LayerTerm>>, Vec<Compiled>)> = spec
            .layers
            .iter()
            .map(|l| {
                let terms = self.terms(spec.n, l.label);
                let compiled = compile(&terms, net.sites(), &l.binding)?;
                Ok((terms, compiled))
            })
            .collect::<Result<_, NetworkError>>()?;
        let mut out = Vec::new();
        let mut chosen = vec![0usize; layers.len()];
        let start = vec![0u32; net.sites().len()];
        walk(&layers, layers.len(), &start, cutoff, &mut chosen, &mut out)?;
        out.sort_by(|a, b| b.weight.cmp(&a.weight).then(a.terms.cmp(&b.terms)));
        Ok(out)
    }
}

fn walk(
    layers: &[(Arc<Vec<LayerTerm>>, Vec<Compiled>)],
    t: usize,
    state: &[u32],
    cutoff: u32,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Configuration>,
) -> Result<(), NetworkError> {
    if t == 0 {
        if state.iter().all(|&m| m == 0) {
            let alphas = chosen.iter().enumerate().map(|(l, &c)| layers[l].0[c].alpha).collect();
            let weight = chosen.iter().enumerate().fold(Monomial::one(), |w, (l, &c)| w.mul(&layers[l].1[c].weight));
            out.push(Configuration { terms: chosen.clone(), alphas, weight });
        }
        return Ok(());
    }
    let layer = t - 1;
    for (idx, c) in layers[layer].1.iter().enumerate() {
        if let Some(next) = step(&c.moves, state, cutoff)? {
            if next.iter().all(|&m| m as usize <= layer) {
                chosen[layer] = idx;
                walk(layers, layer, &next, cutoff, chosen, out)?;
            }
        }
    }
    Ok(())
}

fn anchor_battery(n_probe: u32) -> Vec<(PartitionSpec, LaurentPoly<BigInt>, Option<usize>)> {
    let p = |s: &str| s.parse::<LaurentPoly<BigInt>>().expect("anchor literal");
    let mut out = vec![
        (PartitionSpec::scalar(4, &[1, 2, 3, 3, 4]), p("z1 z2^2 z3^3 z4^3 z5^4"), Some(1)),
        (PartitionSpec::scalar(4, &[3, 3, 1]), p("z1^3 z2^2 z3^2 + z1^3 z2^3 z3 + z1^2 z2^3 z3^2"), Some(3)),
        (PartitionSpec::scalar(3, &[2, 2]), p("z1^2 z2^2"), Some(1)),
    ];
    for a in 0..=n_probe {
        for b in a..=n_probe {
            let m = Monomial::from_pairs([(Var::Z(1), a as i32), (Var::Z(2), b as i32)]);
            out.push((PartitionSpec::scalar(n_probe, &[a, b]), LaurentPoly::monomial(m), Some(1)));
        }
    }
    out
}

fn matches_anchors(conv: Convention, n_probe: u32) -> bool {
    let engine = LayerEngine::new(conv);
    anchor_battery(n_probe).iter().all(|(spec, want, count)| {
        engine.vev::<BigInt>(spec).ok().as_ref() == Some(want)
            && count.map_or(true, |c| engine.configurations(spec).map(|v| v.len()) == Ok(c))
    })
}

/// Picks the unique candidate wiring that reproduces the worked examples
/// (two five- and three-layer products at n = 4, `X_2 X_2` at n = 3) and
/// all two-layer weakly increasing products at `n_probe`.
pub fn resolve_convention(n_probe: u32) -> Result<Convention, NetworkError> {
    if n_probe < 4 {
        return Err(NetworkError::SizeTooSmall { n: n_probe, min: 4 });
    }
    let hits: Vec<Convention> =
        Convention::candidates().into_par_iter().filter(|&c| matches_anchors(c, n_probe)).collect();
    match hits.len() {
        0 => Err(NetworkError::NoConventionFound),
        1 => Ok(hits[0]),
        k => Err(NetworkError::AmbiguousConvention(k)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const RESOLVED: Convention = Convention {
        flow: Flow::WestToEast,
        fixed: FixedReading::Staircase,
        residual: ResidualInputs::Summed,
        weighted: WeightedOutputs::ColumnsAndRow,
    };

    type P = LaurentPoly<BigInt>;

    fn p(s: &str) -> P {
        s.parse().unwrap()
    }

    #[test]
    fn resolves_uniquely() {
        assert_eq!(resolve_convention(4), Ok(RESOLVED));
        assert!(matches!(resolve_convention(3), Err(NetworkError::SizeTooSmall { .. })));
    }

    #[test]
    fn worked_examples() {
        let e = LayerEngine::new(RESOLVED);
        let s1 = PartitionSpec::scalar(4, &[1, 2, 3, 3, 4]);
        assert_eq!(e.vev::<BigInt>(&s1).unwrap(), p("z1 z2^2 z3^3 z4^3 z5^4"));
        assert_eq!(e.configurations(&s1).unwrap().len(), 1);
        let s2 = PartitionSpec::scalar(4, &[3, 3, 1]);
        assert_eq!(e.vev::<BigInt>(&s2).unwrap(), p("z1^3 z2^2 z3^2 + z1^3 z2^3 z3 + z1^2 z2^3 z3^2"));
        let confs = e.configurations(&s2).unwrap();
        assert_eq!(confs.len(), 3);
        let weights: Vec<String> = confs.iter().map(|c| c.weight.to_string()).collect();
        assert_eq!(weights, ["z1^3 z2^3 z3", "z1^3 z2^2 z3^2", "z1^2 z2^3 z3^2"]);
        assert_eq!(e.count_configurations(&s2).unwrap(), BigInt::from(3));
        assert_eq!(e.count_configurations(&PartitionSpec::scalar(4, &[4, 2, 1])).unwrap(), BigInt::from(3));
    }

    #[test]
    fn single_site_layers() {
        let e = LayerEngine::new(RESOLVED);
        let omega = vacuum::<BigInt>(1);
        let x0 = e.apply(2, 0, &LayerBinding::Scalar(Var::Z(1)), 0, &omega, 1).unwrap();
        // the row input is summed, so the lone site may still emit b+
        assert_eq!(x0, KetCombo::from([(vec![0], P::one()), (vec![1], p("z1"))]));
        assert_eq!(e.vev::<BigInt>(&PartitionSpec::scalar(2, &[1])).unwrap(), p("z1"));
        assert_eq!(e.vev::<BigInt>(&PartitionSpec::scalar(3, &[0])).unwrap(), P::one());
    }

    #[test]
    fn derivative_layer() {
        let e = LayerEngine::new(RESOLVED);
        let plain = e.vev::<BigInt>(&PartitionSpec::scalar(3, &[2, 1])).unwrap();
        let hat = e.vev::<BigInt>(&PartitionSpec::scalar(3, &[2, 1]).with_derivatives(&[1, 0])).unwrap();
        assert_eq!(hat, plain.derivative(Var::Z(1)));
        // z1 s_(1,1)(z1, z2) = z1^2 z2
        assert_eq!(plain, p("z1^2 z2"));
    }

    #[test]
    fn occupancy_bound() {
        let e = LayerEngine::new(RESOLVED);
        let mut ket = vacuum::<BigInt>(6);
        for (t, i) in [2u32, 0, 4, 1, 3].into_iter().enumerate() {
            ket = e.apply(4, i, &LayerBinding::Scalar(Var::Z(t as u32 + 1)), 0, &ket, 5).unwrap();
            assert!(ket.keys().flatten().all(|&m| m as usize <= t + 1));
        }
    }

    #[test]
    fn homogeneous_degree() {
        let e = LayerEngine::new(RESOLVED);
        for labels in [vec![3u32, 1], vec![4, 2, 1], vec![2, 2, 0, 1]] {
            let v = e.vev::<BigInt>(&PartitionSpec::scalar(4, &labels)).unwrap();
            let d: i64 = labels.iter().map(|&x| x as i64).sum();
            assert!(v.terms().all(|(m, _)| m.degree() == d), "{labels:?}");
        }
    }

    #[test]
    fn spec_validation() {
        let e = LayerEngine::new(RESOLVED);
        let bad = PartitionSpec::scalar(3, &[4]);
        assert_eq!(e.vev::<BigInt>(&bad), Err(NetworkError::InvalidLabel { label: 4, pos: 0, n: 3 }));
        let mut shared = PartitionSpec::scalar(3, &[1, 1]).with_derivatives(&[1, 0]);
        shared.layers[1].binding = LayerBinding::Scalar(Var::Z(1));
        assert!(matches!(e.vev::<BigInt>(&shared), Err(NetworkError::InvalidSpec(_))));
        let mut missing = PartitionSpec::inhomogeneous(3, &[1]);
        if let LayerBinding::Inhomogeneous(m) = &mut missing.layers[0].binding {
            m.remove(&(2, 1));
        }
        assert_eq!(e.vev::<BigInt>(&missing), Err(NetworkError::UnboundSite(2, 1)));
    }

    #[test]
    fn cutoff_overflow_surfaces() {
        let e = LayerEngine::new(RESOLVED);
        let spec = PartitionSpec::scalar(3, &[0, 0, 3, 3]);
        // X_0 creates on the vacuum, which cutoff 0 cannot hold
        let r = e.vev_with_cutoff::<BigInt>(&spec, 0);
        assert!(matches!(r, Err(NetworkError::Fock(FockError::CutoffOverflow { .. }))));
    }
}
