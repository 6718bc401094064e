//! Truncated Fock spaces and the local oscillator operators acting on them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::FockError;
use crate::poly::{Coeff, LaurentPoly, Monomial, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LocalOp {
    /// Identity coming from two blue lines.
    IdB,
    /// Identity coming from two red lines.
    IdR,
    BPlus,
    BMinus,
    /// Projector onto `|0>`.
    TProj,
    APlus,
    AMinus,
    K,
    KInv,
    Zero,
}

impl LocalOp {
    pub const Q0_FAMILY: [LocalOp; 5] = [LocalOp::IdB, LocalOp::IdR, LocalOp::BPlus, LocalOp::BMinus, LocalOp::TProj];
    pub const Q_FAMILY: [LocalOp; 4] = [LocalOp::APlus, LocalOp::AMinus, LocalOp::K, LocalOp::KInv];

    pub fn symbol(self) -> &'static str {
        match self {
            LocalOp::IdB => "1_b",
            LocalOp::IdR => "1_r",
            LocalOp::BPlus => "b+",
            LocalOp::BMinus => "b-",
            LocalOp::TProj => "t",
            LocalOp::APlus => "a+",
            LocalOp::AMinus => "a-",
            LocalOp::K => "k",
            LocalOp::KInv => "k^-1",
            LocalOp::Zero => "0",
        }
    }

    /// Occupancy reached from `m` by a q=0 operator, if the result is nonzero.
    /// Coefficients of the q=0 family are always 1.
    #[inline]
    pub fn step_q0(self, m: u32) -> Option<u32> {
        match self {
            LocalOp::IdB | LocalOp::IdR => Some(m),
            LocalOp::BPlus => Some(m + 1),
            LocalOp::BMinus => m.checked_sub(1),
            LocalOp::TProj => (m == 0).then_some(m),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FockCutoff(pub u32);

fn q_pow<C: Coeff>(e: i32, negate_q: bool) -> LaurentPoly<C> {
    let c = if negate_q && e % 2 != 0 { -C::one() } else { C::one() };
    LaurentPoly::term(Monomial::var_pow(Var::Q, e), c)
}

/// Action of `op` on `|m>`. Every operator maps a basis vector to at most one
/// basis vector, so the result has zero or one entries.
pub fn apply_local<C: Coeff>(op: LocalOp, m: u32, cutoff: FockCutoff) -> Result<Vec<(u32, LaurentPoly<C>)>, FockError> {
    apply_local_q(op, m, cutoff, false)
}

/// [`apply_local`] with `q` replaced by `-q` when `negate_q` is set.
pub fn apply_local_q<C: Coeff>(
    op: LocalOp,
    m: u32,
    cutoff: FockCutoff,
    negate_q: bool,
) -> Result<Vec<(u32, LaurentPoly<C>)>, FockError> {
    let c = cutoff.0;
    if m > c {
        return Err(FockError::OccupancyOutOfRange { m, cutoff: c });
    }
    let out = match op {
        LocalOp::IdB | LocalOp::IdR => vec![(m, LaurentPoly::one())],
        LocalOp::BPlus | LocalOp::APlus => {
            if m == c {
                return Err(FockError::CutoffOverflow { op, m, cutoff: c });
            }
            vec![(m + 1, LaurentPoly::one())]
        }
        LocalOp::BMinus => match m {
            0 => vec![],
            _ => vec![(m - 1, LaurentPoly::one())],
        },
        LocalOp::AMinus => match m {
            0 => vec![],
            _ => vec![(m - 1, &LaurentPoly::one() - &q_pow(2 * m as i32, negate_q))],
        },
        LocalOp::TProj => match m {
            0 => vec![(0, LaurentPoly::one())],
            _ => vec![],
        },
        LocalOp::K => vec![(m, q_pow(m as i32, negate_q))],
        LocalOp::KInv => vec![(m, q_pow(-(m as i32), negate_q))],
        LocalOp::Zero => vec![],
    };
    Ok(out)
}

/// Limit `q -> 0` of a q-oscillator operator.
pub fn q_to_zero(op: LocalOp) -> Result<LocalOp, FockError> {
    match op {
        LocalOp::APlus => Ok(LocalOp::BPlus),
        LocalOp::AMinus => Ok(LocalOp::BMinus),
        LocalOp::K => Ok(LocalOp::TProj),
        LocalOp::KInv => Err(FockError::NoLimit(op)),
        LocalOp::IdB | LocalOp::IdR | LocalOp::Zero => Ok(op),
        LocalOp::BPlus | LocalOp::BMinus | LocalOp::TProj => Err(FockError::NotQFamily(op)),
    }
}

/// A vector in one truncated Fock space.
pub type FockVec<C> = BTreeMap<u32, LaurentPoly<C>>;

/// Applies the word `ops` (rightmost factor first) to `|m>`.
pub fn apply_word<C: Coeff>(ops: &[LocalOp], m: u32, cutoff: FockCutoff) -> Result<FockVec<C>, FockError> {
    let mut v: FockVec<C> = BTreeMap::from([(m, LaurentPoly::one())]);
    for &op in ops.iter().rev() {
        let mut next: FockVec<C> = BTreeMap::new();
        for (k, c) in &v {
            for (k2, c2) in apply_local::<C>(op, *k, cutoff)? {
                let e = next.entry(k2).or_default();
                *e += &(c * &c2);
            }
        }
        next.retain(|_, c| !c.is_zero());
        v = next;
    }
    Ok(v)
}

/// A linear combination of operator words.
pub type OpExpr<C> = Vec<(LaurentPoly<C>, Vec<LocalOp>)>;

fn apply_expr<C: Coeff>(expr: &OpExpr<C>, m: u32, cutoff: FockCutoff) -> Result<FockVec<C>, FockError> {
    let mut out: FockVec<C> = BTreeMap::new();
    for (c, word) in expr {
        for (k, v) in apply_word::<C>(word, m, cutoff)? {
            let e = out.entry(k).or_default();
            *e += &(c * &v);
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub cutoff: u32,
    pub relations: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.relations.iter().all(|r| r.pass)
    }
}

fn check_relations<C: Coeff>(cutoff: u32, top: u32, rels: Vec<(&str, OpExpr<C>, OpExpr<C>)>) -> RelationReport {
    let fc = FockCutoff(cutoff);
    let relations = rels
        .into_iter()
        .map(|(name, lhs, rhs)| {
            let pass = (0..=top).all(|m| match (apply_expr(&lhs, m, fc), apply_expr(&rhs, m, fc)) {
                (Ok(a), Ok(b)) => a == b,
                _ => false,
            });
            RelationCheck { relation: name.to_string(), pass }
        })
        .collect();
    RelationReport { cutoff, relations }
}

fn word<C: Coeff>(ops: &[LocalOp]) -> OpExpr<C> {
    vec![(LaurentPoly::one(), ops.to_vec())]
}

/// Checks `t b+ = 0`, `b- t = 0`, `b+ b- = 1 - t`, `b- b+ = 1` on `|0>..|cutoff-1>`.
pub fn check_q0_relations<C: Coeff>(cutoff: u32) -> RelationReport {
    use LocalOp::*;
    let one = || LaurentPoly::<C>::one();
    check_relations::<C>(
        cutoff,
        cutoff.saturating_sub(1),
        vec![
            ("t b+ = 0", word(&[TProj, BPlus]), vec![]),
            ("b- t = 0", word(&[BMinus, TProj]), vec![]),
            ("b+ b- = 1 - t", word(&[BPlus, BMinus]), vec![(one(), vec![IdB]), (-one(), vec![TProj])]),
            ("b- b+ = 1", word(&[BMinus, BPlus]), word(&[IdB])),
        ],
    )
}

/// Checks the q-oscillator relations on `|0>..|cutoff-1>`.
pub fn check_qosc_relations<C: Coeff>(cutoff: u32) -> RelationReport {
    use LocalOp::*;
    let one = || LaurentPoly::<C>::one();
    let q = |e: i32| LaurentPoly::<C>::monomial(Monomial::var_pow(Var::Q, e));
    check_relations::<C>(
        cutoff,
        cutoff.saturating_sub(1),
        vec![
            ("k a+ = q a+ k", word(&[K, APlus]), vec![(q(1), vec![APlus, K])]),
            ("k a- = q^-1 a- k", word(&[K, AMinus]), vec![(q(-1), vec![AMinus, K])]),
            ("a- a+ = 1 - q^2 k^2", word(&[AMinus, APlus]), vec![(one(), vec![IdB]), (-q(2), vec![K, K])]),
            ("a+ a- = 1 - k^2", word(&[APlus, AMinus]), vec![(one(), vec![IdB]), (-one(), vec![K, K])]),
            ("k k^-1 = 1", word(&[K, KInv]), word(&[IdB])),
            ("k^-1 k = 1", word(&[KInv, K]), word(&[IdB])),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type P = LaurentPoly<BigInt>;

    fn act(op: LocalOp, m: u32) -> Vec<(u32, P)> {
        apply_local(op, m, FockCutoff(5)).unwrap()
    }

    #[test]
    fn basic_actions() {
        assert_eq!(act(LocalOp::BPlus, 2), vec![(3, P::one())]);
        assert!(act(LocalOp::TProj, 1).is_empty());
        assert_eq!(act(LocalOp::TProj, 0), vec![(0, P::one())]);
        assert!(act(LocalOp::BMinus, 0).is_empty());
        assert_eq!(act(LocalOp::AMinus, 1), vec![(0, "1 - q^2".parse().unwrap())]);
        assert_eq!(act(LocalOp::K, 3), vec![(3, "q^3".parse().unwrap())]);
        assert_eq!(act(LocalOp::KInv, 2), vec![(2, "q^-2".parse().unwrap())]);
        assert!(act(LocalOp::Zero, 2).is_empty());
        assert_eq!(act(LocalOp::IdB, 4), act(LocalOp::IdR, 4));
    }

    #[test]
    fn negated_q() {
        let k: Vec<(u32, P)> = apply_local_q(LocalOp::K, 3, FockCutoff(4), true).unwrap();
        assert_eq!(k, vec![(3, "-q^3".parse().unwrap())]);
        let a: Vec<(u32, P)> = apply_local_q(LocalOp::AMinus, 1, FockCutoff(4), true).unwrap();
        assert_eq!(a, vec![(0, "1 - q^2".parse().unwrap())]);
    }

    #[test]
    fn cutoff_errors() {
        let r = apply_local::<BigInt>(LocalOp::BPlus, 3, FockCutoff(3));
        assert_eq!(r, Err(FockError::CutoffOverflow { op: LocalOp::BPlus, m: 3, cutoff: 3 }));
        let r = apply_local::<BigInt>(LocalOp::IdB, 4, FockCutoff(3));
        assert!(matches!(r, Err(FockError::OccupancyOutOfRange { .. })));
    }

    #[test]
    fn relations_hold() {
        for c in 2..6 {
            let r = check_q0_relations::<BigInt>(c);
            assert_eq!(r.relations.len(), 4);
            assert!(r.all_pass(), "{r:?}");
            assert!(check_qosc_relations::<BigInt>(c).all_pass());
        }
        let v: FockVec<BigInt> = apply_word(&[LocalOp::AMinus, LocalOp::APlus], 0, FockCutoff(3)).unwrap();
        assert_eq!(v, BTreeMap::from([(0, "1 - q^2".parse().unwrap())]));
        let v: FockVec<BigInt> = apply_word(&[LocalOp::K, LocalOp::KInv], 2, FockCutoff(3)).unwrap();
        assert_eq!(v, BTreeMap::from([(2, P::one())]));
    }

    #[test]
    fn limits() {
        assert_eq!(q_to_zero(LocalOp::APlus), Ok(LocalOp::BPlus));
        assert_eq!(q_to_zero(LocalOp::AMinus), Ok(LocalOp::BMinus));
        assert_eq!(q_to_zero(LocalOp::K), Ok(LocalOp::TProj));
        assert_eq!(q_to_zero(LocalOp::KInv), Err(FockError::NoLimit(LocalOp::KInv)));
        assert!(q_to_zero(LocalOp::BPlus).is_err());
    }

    #[test]
    fn q_zero_matrices_match() {
        // Setting q = 0 in the matrix of each q-oscillator (where defined) gives the q=0 operator.
        let zero_q = BTreeMap::from([(Var::Q, crate::poly::Binding::Value(BigInt::from(0)))]);
        for op in [LocalOp::APlus, LocalOp::AMinus, LocalOp::K] {
            let lim = q_to_zero(op).unwrap();
            for m in 0..4 {
                let a: Vec<(u32, P)> = act(op, m)
                    .into_iter()
                    .map(|(k, c)| (k, c.substitute(&zero_q).unwrap()))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                assert_eq!(a, act(lim, m), "{op:?} on |{m}>");
            }
        }
    }

    #[test]
    fn bandwidth_at_most_one() {
        for op in LocalOp::Q0_FAMILY.iter().chain(LocalOp::Q_FAMILY.iter()) {
            for m in 0..5 {
                for (k, _) in act(*op, m) {
                    assert!(k.abs_diff(m) <= 1);
                }
            }
        }
    }

    #[test]
    fn q0_step_agrees_with_apply() {
        for op in LocalOp::Q0_FAMILY {
            for m in 0..4 {
                let a = act(op, m);
                assert_eq!(op.step_q0(m), a.first().map(|(k, _)| *k));
                assert!(a.iter().all(|(_, c)| c == &P::one()));
            }
        }
    }
}
