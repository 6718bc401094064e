//! One-column operators `T` and `Y` acting on the first-column strip.

use std::collections::BTreeMap;

use crate::error::{FockError, NetworkError};
use crate::fock::LocalOp;
use crate::lattice::{local_tensor, TensorKind};
use crate::poly::{Coeff, LaurentPoly, Var};

/// Combination of strip states (row 1 first).
pub type StripKet<C> = BTreeMap<Vec<u32>, LaurentPoly<C>>;

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnTerm<C> {
    pub coeff: LaurentPoly<C>,
    /// One operator per row.
    pub ops: Vec<LocalOp>,
}

/// Sum of tensor products of local operators on a strip of rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnOp<C> {
    pub rows: usize,
    pub terms: Vec<ColumnTerm<C>>,
}

impl<C: Coeff> ColumnOp<C> {
    pub fn zero(rows: usize) -> Self {
        ColumnOp { rows, terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn extend(&mut self, other: &ColumnOp<C>) {
        assert_eq!(self.rows, other.rows);
        self.terms.extend(other.terms.iter().cloned());
    }

    pub fn apply(&self, ket: &StripKet<C>, cutoff: u32) -> Result<StripKet<C>, NetworkError> {
        let mut out: StripKet<C> = BTreeMap::new();
        for (state, c) in ket {
            'terms: for t in &self.terms {
                let mut next = state.clone();
                for (r, &op) in t.ops.iter().enumerate() {
                    if op == LocalOp::BPlus && state[r] >= cutoff {
                        return Err(FockError::CutoffOverflow { op, m: state[r], cutoff }.into());
                    }
                    match op.step_q0(state[r]) {
                        Some(m) => next[r] = m,
                        None => continue 'terms,
                    }
                }
                *out.entry(next).or_default() += &(c * &t.coeff);
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }
}

/// Boundary indices of `T`: horizontal inputs `i`, column input `j`,
/// horizontal outputs `a`, column output `b`. Rows are listed bottom first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TIndex {
    pub i: Vec<u8>,
    pub j: u8,
    pub a: Vec<u8>,
    pub b: u8,
}

#[derive(Clone, Debug)]
pub struct TFamily<C> {
    pub rows: usize,
    entries: BTreeMap<TIndex, ColumnOp<C>>,
}

impl<C: Coeff> TFamily<C> {
    pub fn get(&self, idx: &TIndex) -> ColumnOp<C> {
        self.entries.get(idx).cloned().unwrap_or_else(|| ColumnOp::zero(self.rows))
    }

    /// Nonzero components.
    pub fn entries(&self) -> impl Iterator<Item = (&TIndex, &ColumnOp<C>)> {
        self.entries.iter()
    }
}

/// The chained column of `L(z)` tensors, one per row with variables `row_vars`
/// (bottom row first). The vertical output of row `r + 1` feeds row `r`.
pub fn build_t<C: Coeff>(row_vars: &[Var]) -> TFamily<C> {
    assert!(!row_vars.is_empty());
    let m = row_vars.len();
    let tensors: Vec<_> =
        row_vars.iter().map(|&v| local_tensor::<C>(TensorKind::Lz, Some(v)).expect("variable given")).collect();
    let mut entries: BTreeMap<TIndex, ColumnOp<C>> = BTreeMap::new();
    // Walk upward: `k` is the vertical index below the current row.
    fn go<C: Coeff>(
        tensors: &[crate::lattice::LocalTensor<C>],
        r: usize,
        k: u8,
        b: u8,
        i: &mut Vec<u8>,
        a: &mut Vec<u8>,
        ops: &mut Vec<LocalOp>,
        coeff: LaurentPoly<C>,
        entries: &mut BTreeMap<TIndex, ColumnOp<C>>,
    ) {
        if r == tensors.len() {
            let idx = TIndex { i: i.clone(), j: k, a: a.clone(), b };
            entries
                .entry(idx)
                .or_insert_with(|| ColumnOp::zero(tensors.len()))
                .terms
                .push(ColumnTerm { coeff, ops: ops.clone() });
            return;
        }
        for (&(ii, jj, aa, bb), e) in tensors[r].entries() {
            if bb != k {
                continue;
            }
            i.push(ii);
            a.push(aa);
            ops.push(e.op);
            go(tensors, r + 1, jj, b, i, a, ops, &coeff * &e.prefactor, entries);
            i.pop();
            a.pop();
            ops.pop();
        }
    }
    for b in 0..2u8 {
        go(&tensors, 0, b, b, &mut Vec::new(), &mut Vec::new(), &mut Vec::new(), LaurentPoly::one(), &mut entries);
    }
    TFamily { rows: m, entries }
}

/// Boundary sums of `T`. For `ell < m`: outputs `(0^ell, 1^(m-ell))`, inputs
/// `1` above row `ell + 1`, column input 1, summed over the rest. For
/// `ell = m`: outputs `0^m`, column input 0, summed over the rest.
pub fn build_y<C: Coeff>(ell: usize, row_vars: &[Var]) -> ColumnOp<C> {
    let m = row_vars.len();
    assert!(ell <= m, "ell = {ell} exceeds {m} rows");
    let t = build_t::<C>(row_vars);
    let mut out = ColumnOp::zero(m);
    for (idx, op) in t.entries() {
        let keep = if ell < m {
            idx.j == 1 && (0..m).all(|r| idx.a[r] == (r >= ell) as u8) && idx.i[ell + 1..].iter().all(|&x| x == 1)
        } else {
            idx.j == 0 && idx.a.iter().all(|&x| x == 0)
        };
        if keep {
            out.extend(op);
        }
    }
    out
}

/// `<bra| ops[0] ops[1] ... |ket>`.
pub fn strip_amplitude<C: Coeff>(
    bra: &[u32],
    ops: &[ColumnOp<C>],
    ket: &[u32],
    cutoff: u32,
) -> Result<LaurentPoly<C>, NetworkError> {
    strip_amplitude_restricted(bra, ops, ket, cutoff, |_, _| true)
}

/// Like [`strip_amplitude`], keeping at cut `p` (between `ops[p-1]` and
/// `ops[p]`) only states with `allowed(p, state)`.
pub fn strip_amplitude_restricted<C: Coeff>(
    bra: &[u32],
    ops: &[ColumnOp<C>],
    ket: &[u32],
    cutoff: u32,
    allowed: impl Fn(usize, &[u32]) -> bool,
) -> Result<LaurentPoly<C>, NetworkError> {
    let mut v: StripKet<C> = BTreeMap::from([(ket.to_vec(), LaurentPoly::one())]);
    for p in (0..ops.len()).rev() {
        v = ops[p].apply(&v, cutoff)?;
        if p > 0 {
            v.retain(|s, _| allowed(p, s));
        }
    }
    Ok(v.remove(bra).unwrap_or_default())
}

/// The functional `<bra| op` restricted to row-1 occupancy `row1`, as a
/// combination of bras on the remaining rows (occupancies up to `bound`).
pub fn bra_times<C: Coeff>(
    bra: &[u32],
    op: &ColumnOp<C>,
    row1: u32,
    bound: u32,
    cutoff: u32,
) -> Result<StripKet<C>, NetworkError> {
    let rest = op.rows - 1;
    let mut out = BTreeMap::new();
    let mut tail = vec![0u32; rest];
    loop {
        let mut ket = vec![row1];
        ket.extend(&tail);
        let img = op.apply(&BTreeMap::from([(ket, LaurentPoly::one())]), cutoff)?;
        if let Some(c) = img.get(bra) {
            out.insert(tail.clone(), c.clone());
        }
        // next tail in lexicographic order
        let mut r = rest;
        loop {
            if r == 0 {
                return Ok(out);
            }
            r -= 1;
            if tail[r] < bound {
                tail[r] += 1;
                break;
            }
            tail[r] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type P = LaurentPoly<BigInt>;

    fn zs(m: usize) -> Vec<Var> {
        (1..=m as u32).map(|r| Var::site(1, r, 1)).collect()
    }

    fn idx(i: &[u8], j: u8, a: &[u8], b: u8) -> TIndex {
        TIndex { i: i.to_vec(), j, a: a.to_vec(), b }
    }

    #[test]
    fn single_row_is_one_entry() {
        let t = build_t::<BigInt>(&zs(1));
        let l = local_tensor::<BigInt>(TensorKind::Lz, Some(Var::site(1, 1, 1))).unwrap();
        let mut n = 0;
        for (&(i, j, a, b), e) in l.entries() {
            let op = t.get(&idx(&[i], j, &[a], b));
            assert_eq!(op.terms, vec![ColumnTerm { coeff: e.prefactor.clone(), ops: vec![e.op] }]);
            n += 1;
        }
        assert_eq!(t.entries().count(), n);
    }

    #[test]
    fn two_row_chain() {
        let t = build_t::<BigInt>(&zs(2));
        let id = t.get(&idx(&[0, 0], 0, &[0, 0], 0));
        assert_eq!(id.terms, vec![ColumnTerm { coeff: P::one(), ops: vec![LocalOp::IdB, LocalOp::IdB] }]);
        // bottom row must be b+ (k1 = 0, b = 1), top row b- (j = 1)
        assert!(t.get(&idx(&[1, 0], 0, &[0, 1], 0)).is_zero());
        let op = t.get(&idx(&[1, 0], 1, &[0, 1], 1));
        assert_eq!(op.terms.len(), 1);
        assert_eq!(op.terms[0].ops, vec![LocalOp::BPlus, LocalOp::BMinus]);
        assert_eq!(op.terms[0].coeff, "z1_k1l1 z1_k2l1^-1".parse().unwrap());
    }

    #[test]
    fn top_y_on_vacuum() {
        for m in 1..4 {
            let y = build_y::<BigInt>(m, &zs(m));
            let amp = strip_amplitude(&vec![0; m], &[y], &vec![0; m], 2).unwrap();
            assert_eq!(amp, P::one());
        }
    }

    #[test]
    fn y0_reduced_bras() {
        for k in 2..5 {
            let y = build_y::<BigInt>(0, &zs(k));
            let zero = bra_times(&vec![0; k], &y, 0, 2, 3).unwrap();
            assert_eq!(zero, BTreeMap::from([(vec![0; k - 1], P::one())]));
            let one = bra_times(&vec![0; k], &y, 1, 2, 3).unwrap();
            assert_eq!(one, BTreeMap::from([(vec![0; k - 1], "z1_k1l1^-1".parse().unwrap())]));
        }
    }
}
