//! Operator-valued vertex weights and the tetrahedron equation.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::LatticeError;
use crate::fock::{apply_local_q, FockCutoff, LocalOp};
use crate::poly::{Coeff, LaurentPoly, Monomial, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TensorKind {
    R0,
    Lz,
    LqZ,
    MqZ,
}

impl TensorKind {
    fn name(self) -> &'static str {
        match self {
            TensorKind::R0 => "R0",
            TensorKind::Lz => "Lz",
            TensorKind::LqZ => "LqZ",
            TensorKind::MqZ => "MqZ",
        }
    }
}

/// Index tuple `(i, j, a, b)`: inputs `i, j`, outputs `a, b`.
pub type Idx = (u8, u8, u8, u8);

#[derive(Clone, Debug, PartialEq)]
pub struct Entry<C> {
    pub prefactor: LaurentPoly<C>,
    pub op: LocalOp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalTensor<C> {
    pub kind: TensorKind,
    pub spectral: Option<Monomial>,
    entries: BTreeMap<Idx, Entry<C>>,
}

/// Table for `kind` with spectral parameter `z`.
pub fn local_tensor<C: Coeff>(kind: TensorKind, z: Option<Var>) -> Result<LocalTensor<C>, LatticeError> {
    match (kind, z) {
        (TensorKind::R0, _) => Ok(LocalTensor::with_spectral(kind, Monomial::one())),
        (_, Some(v)) => Ok(LocalTensor::with_spectral(kind, Monomial::var(v))),
        (_, None) => Err(LatticeError::MissingVariable(kind.name())),
    }
}

impl<C: Coeff> LocalTensor<C> {
    /// Table with a monomial spectral parameter such as `z1/z2`.
    pub fn with_spectral(kind: TensorKind, z: Monomial) -> Self {
        use LocalOp::*;
        let zp = LaurentPoly::monomial(z.clone());
        let zm = LaurentPoly::monomial(z.inv());
        let one = LaurentPoly::one();
        let mut entries = BTreeMap::new();
        let mut put = |idx: Idx, prefactor: LaurentPoly<C>, op| {
            entries.insert(idx, Entry { prefactor, op });
        };
        put((0, 0, 0, 0), one.clone(), IdB);
        put((1, 1, 1, 1), one.clone(), IdR);
        match kind {
            TensorKind::R0 | TensorKind::Lz => {
                let (zp, zm) = if kind == TensorKind::R0 { (one.clone(), one.clone()) } else { (zp, zm) };
                put((1, 0, 0, 1), zp, BPlus);
                put((0, 1, 1, 0), zm, BMinus);
                put((0, 1, 0, 1), one, TProj);
            }
            TensorKind::LqZ | TensorKind::MqZ => {
                put((1, 0, 0, 1), zp, APlus);
                put((0, 1, 1, 0), zm, AMinus);
                put((0, 1, 0, 1), one, K);
                let q = LaurentPoly::var(Var::Q);
                put((1, 0, 1, 0), if kind == TensorKind::LqZ { -q } else { q }, K);
            }
        }
        let spectral = (kind != TensorKind::R0).then_some(z);
        LocalTensor { kind, spectral, entries }
    }

    pub fn entry(&self, i: u8, j: u8, a: u8, b: u8) -> Option<&Entry<C>> {
        self.entries.get(&(i, j, a, b))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Idx, &Entry<C>)> {
        self.entries.iter()
    }

    /// Whether the Fock operators act with `q` replaced by `-q`.
    pub fn q_negated(&self) -> bool {
        self.kind == TensorKind::MqZ
    }

    /// `[T]_{ij}^{ab} |m>` including the prefactor.
    pub fn act(&self, idx: Idx, m: u32, cutoff: FockCutoff) -> Result<Vec<(u32, LaurentPoly<C>)>, LatticeError> {
        let Some(e) = self.entries.get(&idx) else {
            return Ok(vec![]);
        };
        let out = apply_local_q::<C>(e.op, m, cutoff, self.q_negated())?;
        Ok(out.into_iter().map(|(k, c)| (k, &c * &e.prefactor)).collect())
    }
}

/// Basis state of `V^{⊗4} ⊗ F ⊗ F`: four spin bits then two occupancies.
pub type TetraState = [u32; 6];

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "C: Coeff")]
pub struct TetraMismatch<C> {
    pub input: TetraState,
    pub output: TetraState,
    pub lhs: LaurentPoly<C>,
    pub rhs: LaurentPoly<C>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "C: Coeff")]
pub struct TetraReport<C> {
    pub cutoff: u32,
    pub checked: usize,
    pub mismatches: Vec<TetraMismatch<C>>,
    pub runtime_ms: u128,
}

impl<C> TetraReport<C> {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

type TetraVec<C> = BTreeMap<TetraState, LaurentPoly<C>>;

/// One factor `X_{s1 s2 f}`: tensor acting on spins `s1, s2` and Fock slot `f`.
struct Factor<'a, C> {
    tensor: &'a LocalTensor<C>,
    s1: usize,
    s2: usize,
    f: usize,
}

fn apply_factor<C: Coeff>(x: &Factor<C>, v: &TetraVec<C>, cutoff: FockCutoff) -> Result<TetraVec<C>, LatticeError> {
    let mut out: TetraVec<C> = BTreeMap::new();
    for (st, c) in v {
        let (i, j) = (st[x.s1] as u8, st[x.s2] as u8);
        for a in 0..2u8 {
            for b in 0..2u8 {
                for (m, w) in x.tensor.act((i, j, a, b), st[x.f], cutoff)? {
                    let mut ns = *st;
                    ns[x.s1] = a as u32;
                    ns[x.s2] = b as u32;
                    ns[x.f] = m;
                    *out.entry(ns).or_default() += &(c * &w);
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn apply_product<C: Coeff>(factors: &[Factor<C>], st: TetraState, cutoff: FockCutoff) -> Result<TetraVec<C>, LatticeError> {
    let mut v: TetraVec<C> = BTreeMap::from([(st, LaurentPoly::one())]);
    for x in factors.iter().rev() {
        v = apply_factor(x, &v, cutoff)?;
    }
    Ok(v)
}

/// Checks `M126(z12) M346(z34) L135(z13) L245(z24) = L245(z24) L135(z13) M346(z34) M126(z12)`
/// on every input state whose occupancies are at most `cutoff - 2`.
pub fn tetrahedron_check<C: Coeff>(cutoff: u32, zvars: [Var; 4]) -> Result<TetraReport<C>, LatticeError> {
    if cutoff < 3 {
        return Err(LatticeError::CutoffTooSmall(cutoff));
    }
    let start = Instant::now();
    let ratio = |i: usize, j: usize| Monomial::from_pairs([(zvars[i], 1), (zvars[j], -1)]);
    let m126 = LocalTensor::<C>::with_spectral(TensorKind::MqZ, ratio(0, 1));
    let m346 = LocalTensor::<C>::with_spectral(TensorKind::MqZ, ratio(2, 3));
    let l135 = LocalTensor::<C>::with_spectral(TensorKind::LqZ, ratio(0, 2));
    let l245 = LocalTensor::<C>::with_spectral(TensorKind::LqZ, ratio(1, 3));
    // Spin slots 0..4 are V1..V4, slot 4 is F5, slot 5 is F6.
    let f = |tensor, s1, s2, f| Factor { tensor, s1, s2, f };
    let lhs = [f(&m126, 0, 1, 5), f(&m346, 2, 3, 5), f(&l135, 0, 2, 4), f(&l245, 1, 3, 4)];
    let rhs = [f(&l245, 1, 3, 4), f(&l135, 0, 2, 4), f(&m346, 2, 3, 5), f(&m126, 0, 1, 5)];
    let top = cutoff - 2;
    let fc = FockCutoff(cutoff);
    let mut inputs = Vec::new();
    for bits in 0..16u32 {
        for m5 in 0..=top {
            for m6 in 0..=top {
                inputs.push([bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1, m5, m6]);
            }
        }
    }
    let per_state: Result<Vec<Vec<TetraMismatch<C>>>, LatticeError> = inputs
        .par_iter()
        .map(|&st| {
            let a = apply_product(&lhs, st, fc)?;
            let b = apply_product(&rhs, st, fc)?;
            let mut keys: Vec<&TetraState> = a.keys().chain(b.keys()).collect();
            keys.sort();
            keys.dedup();
            let zero = LaurentPoly::zero();
            Ok(keys
                .into_iter()
                .filter_map(|k| {
                    let (x, y) = (a.get(k).unwrap_or(&zero), b.get(k).unwrap_or(&zero));
                    (x != y).then(|| TetraMismatch { input: st, output: *k, lhs: x.clone(), rhs: y.clone() })
                })
                .collect())
        })
        .collect();
    let mismatches = per_state?.into_iter().flatten().collect();
    Ok(TetraReport { cutoff, checked: inputs.len(), mismatches, runtime_ms: start.elapsed().as_millis() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::q_to_zero;
    use crate::poly::Binding;
    use num_bigint::BigInt;

    type P = LaurentPoly<BigInt>;

    fn all_idx() -> Vec<Idx> {
        let mut v = Vec::new();
        for n in 0..16u8 {
            v.push((n & 1, (n >> 1) & 1, (n >> 2) & 1, (n >> 3) & 1));
        }
        v
    }

    #[test]
    fn r0_table() {
        let r = local_tensor::<BigInt>(TensorKind::R0, None).unwrap();
        let e = r.entry(1, 0, 0, 1).unwrap();
        assert_eq!((e.op, &e.prefactor), (LocalOp::BPlus, &P::one()));
        let expected = [
            ((0, 0, 0, 0), LocalOp::IdB),
            ((1, 1, 1, 1), LocalOp::IdR),
            ((1, 0, 0, 1), LocalOp::BPlus),
            ((0, 1, 1, 0), LocalOp::BMinus),
            ((0, 1, 0, 1), LocalOp::TProj),
        ];
        let got: Vec<(Idx, LocalOp)> = r.entries().map(|(k, e)| (*k, e.op)).collect();
        let mut want = expected.to_vec();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn lz_prefactors() {
        let l = local_tensor::<BigInt>(TensorKind::Lz, Some(Var::Z(1))).unwrap();
        let e = l.entry(0, 1, 1, 0).unwrap();
        assert_eq!(e.op, LocalOp::BMinus);
        assert_eq!(e.prefactor, "z1^-1".parse().unwrap());
        assert_eq!(l.entry(1, 0, 0, 1).unwrap().prefactor, "z1".parse().unwrap());
        assert_eq!(
            local_tensor::<BigInt>(TensorKind::Lz, None),
            Err(LatticeError::MissingVariable("Lz"))
        );
    }

    #[test]
    fn lz_at_one_is_r0() {
        let l = local_tensor::<BigInt>(TensorKind::Lz, Some(Var::Z(1))).unwrap();
        let r = local_tensor::<BigInt>(TensorKind::R0, None).unwrap();
        let one = std::collections::BTreeMap::from([(Var::Z(1), Binding::Value(BigInt::from(1)))]);
        for idx in all_idx() {
            let a = l.entry(idx.0, idx.1, idx.2, idx.3).map(|e| (e.op, e.prefactor.substitute(&one).unwrap()));
            let b = r.entry(idx.0, idx.1, idx.2, idx.3).map(|e| (e.op, e.prefactor.clone()));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn color_conservation() {
        for kind in [TensorKind::R0, TensorKind::Lz, TensorKind::LqZ, TensorKind::MqZ] {
            let t = local_tensor::<BigInt>(kind, Some(Var::Z(1))).unwrap();
            for ((i, j, a, b), _) in t.entries() {
                assert_eq!(i + j, a + b, "{kind:?}");
            }
        }
    }

    #[test]
    fn q_limit_of_l_is_lz() {
        let lq = local_tensor::<BigInt>(TensorKind::LqZ, Some(Var::Z(1))).unwrap();
        let lz = local_tensor::<BigInt>(TensorKind::Lz, Some(Var::Z(1))).unwrap();
        let q0 = std::collections::BTreeMap::from([(Var::Q, Binding::Value(BigInt::from(0)))]);
        for idx in all_idx() {
            let lim = lq.entry(idx.0, idx.1, idx.2, idx.3).and_then(|e| {
                let p = e.prefactor.substitute(&q0).unwrap();
                (!p.is_zero()).then(|| (q_to_zero(e.op).unwrap(), p))
            });
            let want = lz.entry(idx.0, idx.1, idx.2, idx.3).map(|e| (e.op, e.prefactor.clone()));
            // identities keep their blue/red labels in both tables
            assert_eq!(lim, want, "{idx:?}");
        }
    }

    #[test]
    fn m_is_l_with_negated_q() {
        let m = local_tensor::<BigInt>(TensorKind::MqZ, Some(Var::Z(1))).unwrap();
        assert_eq!(m.entry(1, 0, 1, 0).unwrap().prefactor, "q".parse().unwrap());
        let w: Vec<(u32, P)> = m.act((0, 1, 0, 1), 3, FockCutoff(4)).unwrap();
        assert_eq!(w, vec![(3, "-q^3".parse().unwrap())]);
    }

    #[test]
    fn cutoff_too_small() {
        let z = [Var::Z(1), Var::Z(2), Var::Z(3), Var::Z(4)];
        assert!(matches!(tetrahedron_check::<BigInt>(2, z), Err(LatticeError::CutoffTooSmall(2))));
    }

    #[test]
    fn vacuum_sector_fixed() {
        let z = [Var::Z(1), Var::Z(2), Var::Z(3), Var::Z(4)];
        let ratio = |i: usize, j: usize| Monomial::from_pairs([(z[i], 1), (z[j], -1)]);
        let m126 = LocalTensor::<BigInt>::with_spectral(TensorKind::MqZ, ratio(0, 1));
        let m346 = LocalTensor::<BigInt>::with_spectral(TensorKind::MqZ, ratio(2, 3));
        let l135 = LocalTensor::<BigInt>::with_spectral(TensorKind::LqZ, ratio(0, 2));
        let l245 = LocalTensor::<BigInt>::with_spectral(TensorKind::LqZ, ratio(1, 3));
        let f = |tensor, s1, s2, f| Factor { tensor, s1, s2, f };
        let lhs = [f(&m126, 0, 1, 5), f(&m346, 2, 3, 5), f(&l135, 0, 2, 4), f(&l245, 1, 3, 4)];
        let v = apply_product(&lhs, [0; 6], FockCutoff(3)).unwrap();
        assert_eq!(v, BTreeMap::from([([0; 6], P::one())]));
    }

    #[test]
    fn holds_for_small_cutoffs() {
        let z = [Var::Z(1), Var::Z(2), Var::Z(3), Var::Z(4)];
        for c in 3..=5 {
            let r = tetrahedron_check::<BigInt>(c, z).unwrap();
            assert_eq!(r.checked, 16 * ((c - 1) * (c - 1)) as usize);
            assert!(r.pass(), "cutoff {c}: {:?}", r.mismatches.first());
        }
    }
}
