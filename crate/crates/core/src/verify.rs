//! Identity checks tying layer-operator computations to the symmetric-function
//! oracles. Every comparison is exact.

use std::collections::BTreeMap;
use std::error::Error;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::fock::FockCutoff;
use crate::lattice::{local_tensor, tetrahedron_check, TensorKind};
use crate::network::{
    build_y, strip_amplitude, strip_amplitude_restricted, ColumnOp, KetCombo, LayerBinding, LayerEngine, PartitionSpec,
};
use crate::poly::{to_rational, Binding, Monomial, Var};
use crate::symfunc::{
    counting_product, is_symmetric, later_counts, loop_elementary, loop_elementary_general, redistribution_cofactors,
    schur_at_one, schur_bialternant, schur_derivative_at_one, schur_derivative_oracle, schur_jacobi_trudi, schur_pragacz, BlockSpec,
};
use crate::{Poly, RatPoly};

type Res<T> = Result<T, Box<dyn Error + Send + Sync>>;

/// Outcome of one check. `left`/`right` are filled only on mismatch.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<RatPoly>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<RatPoly>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub runtime_ms: u64,
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} [{}]", if self.pass { "PASS" } else { "FAIL" }, self.name, self.params)?;
        if let Some(d) = &self.detail {
            write!(f, " {d}")?;
        }
        if let (Some(l), Some(r)) = (&self.left, &self.right) {
            write!(f, " left: {l} right: {r}")?;
        }
        Ok(())
    }
}

struct Verdict {
    left: RatPoly,
    right: RatPoly,
    detail: Option<String>,
}

impl Verdict {
    fn ok() -> Self {
        Verdict { left: RatPoly::zero(), right: RatPoly::zero(), detail: None }
    }

    fn eq(left: &Poly, right: &Poly) -> Self {
        Verdict { left: to_rational(left), right: to_rational(right), detail: None }
    }

    fn eq_rat(left: RatPoly, right: RatPoly) -> Self {
        Verdict { left, right, detail: None }
    }

    fn with(mut self, detail: impl Into<String>) -> Self {
        if self.left != self.right {
            self.detail = Some(detail.into());
        }
        self
    }

    /// First state where the two combinations differ.
    fn kets(left: &KetCombo<BigInt>, right: &KetCombo<BigInt>) -> Self {
        for state in left.keys().chain(right.keys()) {
            let l = left.get(state).cloned().unwrap_or_default();
            let r = right.get(state).cloned().unwrap_or_default();
            if l != r {
                return Verdict::eq(&l, &r).with(format!("state {state:?}"));
            }
        }
        Verdict::ok()
    }

    fn pass(&self) -> bool {
        self.left == self.right
    }

    /// Keeps the first failure.
    fn and(self, other: impl FnOnce() -> Res<Verdict>) -> Res<Verdict> {
        if self.pass() {
            other()
        } else {
            Ok(self)
        }
    }
}

fn run(name: &str, params: String, f: impl FnOnce() -> Res<Verdict>) -> CheckReport {
    let start = Instant::now();
    let outcome = f();
    let runtime_ms = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(v) if v.pass() => {
            CheckReport { name: name.into(), params, pass: true, left: None, right: None, detail: None, runtime_ms }
        }
        Ok(v) => CheckReport {
            name: name.into(),
            params,
            pass: false,
            left: Some(v.left),
            right: Some(v.right),
            detail: v.detail,
            runtime_ms,
        },
        Err(e) => CheckReport {
            name: name.into(),
            params,
            pass: false,
            left: None,
            right: None,
            detail: Some(format!("error: {e}")),
            runtime_ms,
        },
    }
}

fn precondition(ok: bool, what: &str) -> Res<()> {
    if ok {
        Ok(())
    } else {
        Err(format!("precondition violated: {what}").into())
    }
}

fn list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn zmono(pairs: impl IntoIterator<Item = (u32, i32)>) -> Monomial {
    Monomial::from_pairs(pairs.into_iter().map(|(t, e)| (Var::Z(t), e)))
}

/// Every occupancy vector on `sites` sites with entries `<= max`.
pub fn basis_states(sites: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..sites {
        out = out.into_iter().flat_map(|s| (0..=max).map(move |m| [s.clone(), vec![m]].concat())).collect();
    }
    out
}

/// All basis states at once, state `k` tagged by the marker `w{k}`. Linear
/// maps agree on every state iff they agree on this combination.
fn tagged_basis(sites: usize, max: u32) -> KetCombo<BigInt> {
    basis_states(sites, max).into_iter().enumerate().map(|(k, s)| (s, Poly::var(Var::W(k as u32)))).collect()
}

/// `X_{l_1}(v_1) ... X_{l_r}(v_r) ket`, scalar variables.
fn apply_word(engine: &LayerEngine, n: u32, word: &[(u32, Var)], ket: &KetCombo<BigInt>, cutoff: u32) -> Res<KetCombo<BigInt>> {
    let mut k = ket.clone();
    for &(label, v) in word.iter().rev() {
        k = engine.apply(n, label, &LayerBinding::Scalar(v), 0, &k, cutoff)?;
    }
    Ok(k)
}

fn ket_axpy(acc: &mut KetCombo<BigInt>, x: &KetCombo<BigInt>, a: &Poly) {
    for (s, c) in x {
        *acc.entry(s.clone()).or_default() += &(c * a);
    }
    acc.retain(|_, c| !c.is_zero());
}

fn ket_scale(x: &KetCombo<BigInt>, a: &Poly) -> KetCombo<BigInt> {
    let mut out = KetCombo::new();
    ket_axpy(&mut out, x, a);
    out
}

/// Exchange relation of `X_i(x) X_j(y)` on every ket with occupancies at most
/// `cutoff - 2`.
pub fn check_zf(engine: &LayerEngine, n: u32, (i, j): (u32, u32), cutoff: u32, (x, y): (Var, Var)) -> CheckReport {
    run("zf", format!("n={n} i={i} j={j} cutoff={cutoff}"), || {
        precondition(i <= n && j <= n && cutoff >= 2 && x != y, "0 <= i,j <= n, cutoff >= 2, distinct variables")?;
        let sites = engine.network(n).sites().len();
        let basis = tagged_basis(sites, cutoff - 2);
        let lhs = apply_word(engine, n, &[(i, x), (j, y)], &basis, cutoff)?;
        let rhs = if i < j {
            let mut r = apply_word(engine, n, &[(i, y), (j, x)], &basis, cutoff)?;
            let swapped = apply_word(engine, n, &[(j, y), (i, x)], &basis, cutoff)?;
            let c = &Poly::one() - &Poly::monomial(Monomial::from_pairs([(x, 1), (y, -1)]));
            ket_axpy(&mut r, &swapped, &c);
            r
        } else if i == j {
            apply_word(engine, n, &[(i, y), (i, x)], &basis, cutoff)?
        } else {
            let r = apply_word(engine, n, &[(i, y), (j, x)], &basis, cutoff)?;
            ket_scale(&r, &Poly::monomial(Monomial::from_pairs([(x, 1), (y, -1)])))
        };
        Ok(Verdict::kets(&lhs, &rhs))
    })
}

/// Weakly increasing labels give the single monomial `z_1^{i_1} ... z_m^{i_m}`.
pub fn check_increasing_monomial(engine: &LayerEngine, n: u32, labels: &[u32]) -> CheckReport {
    run("increasing_monomial", format!("n={n} labels={}", list(labels)), || {
        precondition(labels.windows(2).all(|w| w[0] <= w[1]), "labels weakly increase")?;
        let spec = PartitionSpec::scalar(n, labels);
        let vev: Poly = engine.vev(&spec)?;
        let want = Poly::monomial(zmono(labels.iter().enumerate().map(|(k, &i)| (k as u32 + 1, i as i32))));
        let confs = engine.configurations(&spec)?.len();
        Verdict::eq(&vev, &want).and(|| {
            Ok(Verdict::eq(&Poly::from_i64(confs as i64), &Poly::one()).with("configuration count"))
        })
    })
}

/// Scalar variables `z1..zN` split into consecutive blocks of `mults`.
fn block_vars(mults: &[usize]) -> Vec<Vec<Var>> {
    let mut t = 0u32;
    mults
        .iter()
        .map(|&c| {
            (0..c)
                .map(|_| {
                    t += 1;
                    Var::Z(t)
                })
                .collect()
        })
        .collect()
}

/// `prod_k bold(z)_k^{m-k}`.
fn block_prefactor(blocks: &[Vec<Var>]) -> Monomial {
    let m = blocks.len();
    Monomial::from_pairs(blocks.iter().enumerate().flat_map(|(k, b)| b.iter().map(move |&v| (v, (m - 1 - k) as i32))))
}

fn strictly_decreasing(labels: &[u32]) -> bool {
    labels.windows(2).all(|w| w[0] > w[1])
}

/// `vev = prod_k bold(z)_k^{m-k} s_lambda(z)`, and the quotient is symmetric.
pub fn check_schur_correspondence(engine: &LayerEngine, n: u32, labels: &[u32], mults: &[usize]) -> CheckReport {
    run("schur_correspondence", format!("n={n} labels={} blocks={}", list(labels), list(mults)), || {
        precondition(
            strictly_decreasing(labels) && labels.len() == mults.len() && mults.iter().all(|&c| c >= 1),
            "strictly decreasing labels, one positive multiplicity each",
        )?;
        let vev: Poly = engine.vev(&PartitionSpec::blocked(n, labels, mults))?;
        let blocks = block_vars(mults);
        let pre = block_prefactor(&blocks);
        let flat: Vec<Var> = blocks.concat();
        let lambda = BlockSpec::from_labels(labels, mults)?.partition();
        let want = schur_jacobi_trudi::<BigInt>(&lambda, &flat).mul_monomial(&pre);
        Verdict::eq(&vev, &want).and(|| {
            let quotient = vev.mul_monomial(&pre.inv());
            let sym = is_symmetric(&quotient, &flat);
            Ok(Verdict::eq(&Poly::from_i64(sym as i64), &Poly::one()).with("quotient not symmetric"))
        })
    })
}

/// The reordering identity for products of blocked layers, on every ket with
/// occupancies at most `occ`.
pub fn check_multiple_commutation(engine: &LayerEngine, n: u32, labels: &[u32], mults: &[usize], occ: u32) -> CheckReport {
    run("multiple_commutation", format!("n={n} labels={} blocks={} occ={occ}", list(labels), list(mults)), || {
        precondition(strictly_decreasing(labels) && labels.len() == mults.len(), "strictly decreasing labels")?;
        let blocks = block_vars(mults);
        let flat: Vec<Var> = blocks.concat();
        let cutoff = occ + flat.len() as u32;
        let sites = engine.network(n).sites().len();
        let basis = tagged_basis(sites, occ);
        let word: Vec<(u32, Var)> =
            labels.iter().zip(&blocks).flat_map(|(&l, b)| b.iter().map(move |&v| (l, v))).collect();
        // Both sides times prod_{p<q}(x_p - x_q).
        let lhs_ket = apply_word(engine, n, &word, &basis, cutoff)?;
        let scale = crate::symfunc::vandermonde::<BigInt>(&flat).mul_monomial(&block_prefactor(&blocks).inv());
        let lhs = ket_scale(&lhs_ket, &scale);
        let mut rhs = KetCombo::new();
        let later = later_counts(mults);
        let m = mults.len();
        for (w, cof) in redistribution_cofactors::<BigInt>(mults, &flat) {
            // 1 / (prod_k w_k^{m-k} prod_{j<k}(1 - w_k/w_j)) over the common denominator
            let shift = Monomial::from_pairs(w.iter().enumerate().flat_map(|(j, b)| {
                let e = (later[j] - (m - 1 - j)) as i32;
                let flat = &flat;
                b.iter().map(move |&p| (flat[p], e))
            }));
            let cof = cof.mul_monomial(&shift);
            let word: Vec<(u32, Var)> = w
                .iter()
                .enumerate()
                .rev()
                .flat_map(|(j, b)| {
                    let flat = &flat;
                    b.iter().map(move |&p| (labels[j], flat[p]))
                })
                .collect();
            let k = apply_word(engine, n, &word, &basis, cutoff)?;
            ket_axpy(&mut rhs, &k, &cof);
        }
        Ok(Verdict::kets(&lhs, &rhs))
    })
}

/// `prod_k z_k^{m-k} s_lambda(z_1..z_m)` for strictly decreasing labels.
pub fn closed_form(labels: &[u32]) -> Res<Poly> {
    let m = labels.len();
    let lambda = BlockSpec::from_labels(labels, &vec![1; m])?.partition();
    let vars: Vec<Var> = (1..=m as u32).map(Var::Z).collect();
    Ok(schur_jacobi_trudi::<BigInt>(&lambda, &vars).mul_monomial(&zmono((1..=m as u32).map(|k| (k, (m as u32 - k) as i32)))))
}

/// Differentiated layers against the differentiated closed form; with a
/// single first derivative on layer 1, also against the determinant formula.
pub fn check_hat(engine: &LayerEngine, n: u32, labels: &[u32], orders: &[u32]) -> CheckReport {
    run("hat", format!("n={n} labels={} orders={}", list(labels), list(orders)), || {
        precondition(strictly_decreasing(labels) && labels.len() == orders.len(), "strictly decreasing labels")?;
        let vev: Poly = engine.vev(&PartitionSpec::scalar(n, labels).with_derivatives(orders))?;
        let mut want = closed_form(labels)?;
        for (k, &d) in orders.iter().enumerate() {
            want = want.nth_derivative(Var::Z(k as u32 + 1), d);
        }
        Verdict::eq(&vev, &want).and(|| {
            let first_only = orders.first() == Some(&1) && orders[1..].iter().all(|&d| d == 0);
            if !first_only {
                return Ok(Verdict::ok());
            }
            let m = labels.len();
            let lambda = BlockSpec::from_labels(labels, &vec![1; m])?.partition();
            let oracle = schur_derivative_oracle::<BigInt>(&lambda, m, 1)?;
            Ok(Verdict::eq(&vev, &oracle).with("determinant formula"))
        })
    })
}

/// At all-ones the vev counts configurations: compared with the product
/// formula (single layers per label) or the Schur specialization (blocks).
pub fn check_counting(engine: &LayerEngine, n: u32, labels: &[u32], mults: &[usize]) -> CheckReport {
    run("counting", format!("n={n} labels={} blocks={}", list(labels), list(mults)), || {
        precondition(strictly_decreasing(labels) && labels.len() == mults.len(), "strictly decreasing labels")?;
        let spec = PartitionSpec::blocked(n, labels, mults);
        let at_one = engine.count_configurations(&spec)?;
        let enumerated = BigInt::from(engine.configurations(&spec)?.len());
        let formula = if mults.iter().all(|&c| c == 1) {
            counting_product(labels)
        } else {
            let lambda = BlockSpec::from_labels(labels, mults)?.partition();
            BigRational::from_integer(schur_at_one(&lambda, mults.iter().sum())?)
        };
        let c = |x: BigRational| RatPoly::constant(x);
        Verdict::eq_rat(c(BigRational::from_integer(at_one)), c(formula.clone()))
            .with("vev at one")
            .and(|| Ok(Verdict::eq_rat(c(BigRational::from_integer(enumerated)), c(formula)).with("enumeration")))
    })
}

/// Labels `(n, ..., n-l+1, n-l-1, ..., 0)`.
pub fn average_number_labels(n: u32, l: u32) -> Vec<u32> {
    (0..=n).rev().filter(|&i| i != n - l).collect()
}

/// Ratio of the first-layer hat vev to the vev at all-ones is `n - 1 + 1/l`.
pub fn check_average_number(engine: &LayerEngine, n: u32, l: u32) -> CheckReport {
    run("average_number", format!("n={n} l={l}"), || {
        precondition((1..=n).contains(&l), "1 <= l <= n")?;
        let labels = average_number_labels(n, l);
        let mut orders = vec![0; labels.len()];
        orders[0] = 1;
        let spec = PartitionSpec::scalar(n, &labels);
        let hat: Poly = engine.vev(&spec.clone().with_derivatives(&orders))?;
        let plain: Poly = engine.vev(&spec)?;
        let ratio = BigRational::new(hat.eval_at_one(), plain.eval_at_one());
        let want = BigRational::from_integer(BigInt::from(n - 1)) + BigRational::new(1.into(), l.into());
        Verdict::eq_rat(RatPoly::constant(ratio), RatPoly::constant(want)).and(|| {
            Ok(Verdict::eq(&hat, &crate::symfunc::hat_elementary::<BigInt>(n as usize, l as usize)).with("closed form"))
        })
    })
}

/// Ratio of the first-layer hat vev to the vev at all-ones against
/// `m - 1 + (sum of column-replaced binomial determinants) / s_lambda(1^m)`.
pub fn check_hat_ratio(engine: &LayerEngine, n: u32, labels: &[u32]) -> CheckReport {
    run("hat_ratio", format!("n={n} labels={}", list(labels)), || {
        precondition(strictly_decreasing(labels) && !labels.is_empty(), "strictly decreasing labels")?;
        let m = labels.len();
        let mut orders = vec![0; m];
        orders[0] = 1;
        let spec = PartitionSpec::scalar(n, labels);
        let hat: Poly = engine.vev(&spec.clone().with_derivatives(&orders))?;
        let plain: Poly = engine.vev(&spec)?;
        let ratio = BigRational::new(hat.eval_at_one(), plain.eval_at_one());
        let lambda = BlockSpec::from_labels(labels, &vec![1; m])?.partition();
        let want = BigRational::from_integer(BigInt::from(m as i64 - 1))
            + BigRational::new(schur_derivative_at_one(&lambda, m), schur_at_one(&lambda, m)?);
        Ok(Verdict::eq_rat(RatPoly::constant(ratio), RatPoly::constant(want)))
    })
}

fn site(t: usize, k: usize) -> Var {
    Var::site(t as u32, k as u32, 1)
}

fn site_poly(t: usize, k: usize) -> Poly {
    Poly::var(site(t, k))
}

/// Labels of the inhomogeneous product for block sizes `m_1..m_n`.
pub fn inhomogeneous_labels(n: u32, mults: &[usize]) -> Vec<u32> {
    mults
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| {
            let label = if i + 1 < n as usize { n - i as u32 } else { 0 };
            std::iter::repeat(label).take(c)
        })
        .collect()
}

/// `<Ω| Xbar_n(bold z_1) ... Xbar_2(bold z_{n-1}) Xbar_0(bold z_n) |Ω>` against
/// the loop elementary form; the result may involve column-1 variables only.
pub fn check_inhomogeneous(engine: &LayerEngine, n: u32, mults: &[usize]) -> CheckReport {
    run("inhomogeneous", format!("n={n} blocks={}", list(mults)), || {
        precondition(n >= 2 && mults.len() == n as usize && mults.iter().all(|&c| c >= 1), "n blocks, each nonempty")?;
        let labels = inhomogeneous_labels(n, mults);
        let vev: Poly = engine.vev(&PartitionSpec::inhomogeneous(n, &labels))?;
        let inner = &mults[..n as usize - 1];
        let w: usize = mults.iter().sum();
        let mut pre = Monomial::one();
        let mut t = 0;
        for (i, &c) in inner.iter().enumerate() {
            for _ in 0..c {
                t += 1;
                pre = pre.mul(&Monomial::var(site(t, i + 1)));
            }
        }
        let want = loop_elementary_general(inner, w, site_poly).mul_monomial(&pre.inv());
        Verdict::eq(&vev, &want).and(|| {
            let stray: Vec<Var> =
                vev.vars().into_iter().filter(|v| !matches!(v, Var::ZSite { col: 1, .. })).collect();
            Ok(Verdict::eq(&Poly::from_i64(stray.len() as i64), &Poly::zero())
                .with(format!("depends on {}", list(&stray))))
        })
    })
}

/// Identifying every site variable of layer `t` with `z_t` turns `Xbar_i` into
/// `z^{-i} X_i`.
pub fn check_inhomogeneous_collapse(engine: &LayerEngine, n: u32, labels: &[u32]) -> CheckReport {
    run("inhomogeneous_collapse", format!("n={n} labels={}", list(labels)), || {
        let bar: Poly = engine.vev(&PartitionSpec::inhomogeneous(n, labels))?;
        let mut bind = BTreeMap::new();
        for v in bar.vars() {
            if let Var::ZSite { layer, .. } = v {
                bind.insert(v, Binding::Poly(Poly::var(Var::Z(layer))));
            }
        }
        let collapsed = bar.substitute(&bind)?;
        let plain: Poly = engine.vev(&PartitionSpec::scalar(n, labels))?;
        let shift = zmono(labels.iter().enumerate().map(|(t, &i)| (t as u32 + 1, -(i as i32))));
        Ok(Verdict::eq(&collapsed, &plain.mul_monomial(&shift)))
    })
}

/// `Y_ell` on `rows` rows for spectral position `p`.
fn y_at(ell: usize, rows: usize, p: usize) -> ColumnOp<BigInt> {
    let vars: Vec<Var> = (1..=rows).map(|r| site(p, r)).collect();
    build_y(ell, &vars)
}

/// Full inhomogeneous vev with `k` extra `Xbar_0` layers against the
/// first-column strip product.
pub fn check_reduction(engine: &LayerEngine, n: u32, k: usize) -> CheckReport {
    run("reduction", format!("n={n} k={k}"), || {
        precondition(n >= 2, "n >= 2")?;
        let n_us = n as usize;
        let mut labels: Vec<u32> = (2..=n).rev().collect();
        labels.extend(std::iter::repeat(0).take(k + 1));
        let vev: Poly = engine.vev(&PartitionSpec::inhomogeneous(n, &labels))?;
        let rows = n_us - 1;
        let ops: Vec<_> = (1..=labels.len()).map(|p| y_at((p - 1).min(rows), rows, p)).collect();
        let zero = vec![0; rows];
        let strip = strip_amplitude(&zero, &ops, &zero, ops.len() as u32)?;
        Ok(Verdict::eq(&vev, &strip))
    })
}

/// `<1^k 0^l| Y_k(z_1) ... Y_{k+l}(z_n) |0^{k+l}>` against the loop form.
pub fn check_column_auxiliary(k: usize, l: usize, n: usize) -> CheckReport {
    run("column_auxiliary", format!("k={k} l={l} n={n}"), || {
        precondition(k >= 1 && n >= l.max(1), "k >= 1, n >= max(l, 1)")?;
        let rows = k + l;
        let ops: Vec<_> = (1..=n).map(|p| y_at((k + p - 1).min(rows), rows, p)).collect();
        let bra: Vec<u32> = (0..rows).map(|r| (r < k) as u32).collect();
        let lhs = strip_amplitude(&bra, &ops, &vec![0; rows], n as u32 + 1)?;
        let pre = Monomial::from_pairs((1..=l).map(|r| (site(r, k + r), -1)));
        let rhs = loop_elementary(rows, site_poly, n).mul_monomial(&pre);
        Ok(Verdict::eq(&lhs, &rhs))
    })
}

fn column_fundamental_ops(k: usize, n: usize) -> Vec<ColumnOp<BigInt>> {
    (1..=n).map(|p| y_at((p - 1).min(k), k, p)).collect()
}

/// `<0^k| Y_0(z_1) ... Y_{k-1}(z_k) Y_k(z_{k+1}) ... Y_k(z_n) |0^k>` against
/// the loop form.
pub fn check_column_fundamental(k: usize, n: usize) -> CheckReport {
    run("column_fundamental", format!("k={k} n={n}"), || {
        precondition(k >= 1 && n >= k, "1 <= k <= n")?;
        let zero = vec![0; k];
        let lhs = strip_amplitude(&zero, &column_fundamental_ops(k, n), &zero, n as u32 + 1)?;
        let pre = Monomial::from_pairs((1..=k).map(|r| (site(r, r), -1)));
        let rhs = loop_elementary(k, site_poly, n).mul_monomial(&pre);
        Ok(Verdict::eq(&lhs, &rhs))
    })
}

/// Splits the strip product by the row-1 occupancy between consecutive
/// factors: zero after the first factor, or one until a first return to zero
/// after factor `i` (`2 <= i < k`, then `k <= i <= n`). The pieces must add up
/// to the whole, and inserting `|m><m|` on row 1 with `m = 2, 3` anywhere
/// must give zero.
pub fn check_column_decomposition(k: usize, n: usize) -> CheckReport {
    run("column_decomposition", format!("k={k} n={n}"), || {
        precondition(k >= 1 && n >= 2, "k >= 1, n >= 2")?;
        let ops = column_fundamental_ops(k, n);
        let zero = vec![0; k];
        let cutoff = n as u32 + 1;
        let total = strip_amplitude(&zero, &ops, &zero, cutoff)?;
        let a = strip_amplitude_restricted(&zero, &ops, &zero, cutoff, |p, s| p != 1 || s[0] == 0)?;
        // cut p sits between factor p and factor p + 1
        let first_return = |i: usize| {
            strip_amplitude_restricted(&zero, &ops, &zero, cutoff, move |p, s| {
                if p < i {
                    s[0] == 1
                } else if p == i {
                    s[0] == 0
                } else {
                    true
                }
            })
        };
        let mut b = Poly::zero();
        for i in 2..k.max(2) {
            b += &first_return(i)?;
        }
        let mut c = Poly::zero();
        for i in k.max(2)..=n {
            c += &first_return(i)?;
        }
        let sum = &(&a + &b) + &c;
        Verdict::eq(&sum, &total).with("pieces").and(|| {
            for m in [2u32, 3] {
                for cut in 1..n {
                    let ins = strip_amplitude_restricted(&zero, &ops, &zero, cutoff, move |p, s| p != cut || s[0] == m)?;
                    if !ins.is_zero() {
                        return Ok(Verdict::eq(&ins, &Poly::zero()).with(format!("|{m}><{m}| at cut {cut}")));
                    }
                }
            }
            Ok(Verdict::ok())
        })
    })
}

/// Tetrahedron equation over all sectors with occupancies `<= cutoff - 2`.
pub fn check_tetrahedron(cutoff: u32) -> CheckReport {
    run("tetrahedron", format!("cutoff={cutoff}"), || {
        let z = [Var::Z(1), Var::Z(2), Var::Z(3), Var::Z(4)];
        let rep = tetrahedron_check::<BigInt>(cutoff, z)?;
        Ok(match rep.mismatches.first() {
            None => Verdict::ok(),
            Some(mm) => Verdict::eq(&mm.lhs, &mm.rhs).with(format!(
                "{} mismatches, first {:?} -> {:?}",
                rep.mismatches.len(),
                mm.input,
                mm.output
            )),
        })
    })
}

/// The q-oscillator tables at `q = 0` act on Fock states exactly like the
/// q=0 table.
pub fn check_q_limit(cutoff: u32) -> CheckReport {
    run("q_limit", format!("cutoff={cutoff}"), || {
        let z = Some(Var::Z(1));
        let lz = local_tensor::<BigInt>(TensorKind::Lz, z)?;
        let q0 = BTreeMap::from([(Var::Q, Binding::Value(BigInt::zero()))]);
        for kind in [TensorKind::LqZ, TensorKind::MqZ] {
            let lq = local_tensor::<BigInt>(kind, z)?;
            for idx in all_indices() {
                for m in 0..cutoff {
                    let limit: Vec<(u32, Poly)> = lq
                        .act(idx, m, FockCutoff(cutoff))?
                        .into_iter()
                        .map(|(s, c)| Ok((s, c.substitute(&q0)?)))
                        .collect::<Res<Vec<_>>>()?
                        .into_iter()
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                    let want = lz.act(idx, m, FockCutoff(cutoff))?;
                    if limit != want {
                        let l = limit.first().map(|x| x.1.clone()).unwrap_or_default();
                        let r = want.first().map(|x| x.1.clone()).unwrap_or_default();
                        let v = Verdict::eq(&l, &r);
                        let v = if v.pass() { Verdict::eq(&Poly::one(), &Poly::zero()) } else { v };
                        return Ok(v.with(format!("{kind:?} {idx:?} on |{m}>")));
                    }
                }
            }
        }
        Ok(Verdict::ok())
    })
}

fn all_indices() -> Vec<(u8, u8, u8, u8)> {
    (0..16u8).map(|b| (b >> 3 & 1, b >> 2 & 1, b >> 1 & 1, b & 1)).collect()
}

/// Bialternant, Jacobi-Trudi and the redistribution sum agree.
pub fn check_schur_routes(blocks: &BlockSpec) -> CheckReport {
    let desc: Vec<String> = blocks.blocks().iter().map(|(v, c)| format!("{v}^{c}")).collect();
    run("schur_routes", format!("blocks={}", desc.join(",")), || {
        let grouped = block_vars(&blocks.sizes());
        let flat: Vec<Var> = grouped.concat();
        let lambda = blocks.partition();
        let jt = schur_jacobi_trudi::<BigInt>(&lambda, &flat);
        let bi = schur_bialternant::<BigInt>(&lambda, &flat)?;
        let pr = schur_pragacz::<BigInt>(blocks, &grouped)?;
        Verdict::eq(&bi, &jt).with("bialternant").and(|| Ok(Verdict::eq(&pr, &jt).with("redistribution sum")))
    })
}

/// Instance grids shared by the battery and its callers.
pub mod grids {
    use crate::symfunc::combinations;

    /// Strictly decreasing labels from `0..=n` of length `1..=max_m`, with
    /// multiplicities in `1..=max_mult` and at most `max_vars` layers.
    pub fn schur(n: u32, max_m: usize, max_mult: usize, max_vars: usize) -> Vec<(Vec<u32>, Vec<usize>)> {
        let mut out = Vec::new();
        for m in 1..=max_m.min(n as usize + 1) {
            for pick in combinations(n as usize + 1, m) {
                let labels: Vec<u32> = pick.iter().rev().map(|&x| x as u32).collect();
                let mut mults = vec![1usize; m];
                loop {
                    if mults.iter().sum::<usize>() <= max_vars {
                        out.push((labels.clone(), mults.clone()));
                    }
                    let mut r = m;
                    loop {
                        if r == 0 {
                            break;
                        }
                        r -= 1;
                        if mults[r] < max_mult {
                            mults[r] += 1;
                            break;
                        }
                        mults[r] = 1;
                    }
                    if mults.iter().all(|&c| c == 1) {
                        break;
                    }
                }
            }
        }
        out
    }

    /// Weakly increasing sequences from `0..=n` of length `1..=max_m`.
    pub fn weakly_increasing(n: u32, max_m: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut frontier: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..max_m {
            frontier = frontier
                .into_iter()
                .flat_map(|s| {
                    let lo = s.last().copied().unwrap_or(0);
                    (lo..=n).map(move |x| [s.clone(), vec![x]].concat())
                })
                .collect();
            out.extend(frontier.iter().cloned());
        }
        out
    }
}

/// Which part of the battery to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Tetrahedron,
    Zf,
    Schur,
    Hat,
    Inhomogeneous,
    Columns,
    All,
}

#[derive(Clone, Debug)]
pub struct BatteryConfig {
    /// Largest slice size; every `2..=n_max` is covered.
    pub n_max: u32,
    /// Largest number of layers in a single product.
    pub max_layers: usize,
    pub cutoff: u32,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig { n_max: 4, max_layers: 5, cutoff: 4 }
    }
}

type Job<'a> = Box<dyn Fn() -> CheckReport + Send + Sync + 'a>;

/// Runs the selected checks in parallel; reports come back in job order.
pub fn battery(engine: &LayerEngine, suite: Suite, cfg: &BatteryConfig) -> Vec<CheckReport> {
    let mut jobs: Vec<Job> = Vec::new();
    let want = |s: Suite| suite == s || suite == Suite::All;
    let ns = 2..=cfg.n_max;
    if want(Suite::Tetrahedron) {
        let c = cfg.cutoff;
        jobs.push(Box::new(move || check_tetrahedron(c)));
        jobs.push(Box::new(move || check_q_limit(c)));
    }
    if want(Suite::Zf) {
        for n in ns.clone() {
            for i in 0..=n {
                for j in 0..=n {
                    let c = cfg.cutoff;
                    jobs.push(Box::new(move || check_zf(engine, n, (i, j), c, (Var::Z(1), Var::Z(2)))));
                }
            }
        }
    }
    if want(Suite::Schur) {
        for n in ns.clone() {
            for (labels, mults) in grids::schur(n, 4, 2, cfg.max_layers) {
                let (l2, m2) = (labels.clone(), mults.clone());
                jobs.push(Box::new(move || check_schur_correspondence(engine, n, &labels, &mults)));
                jobs.push(Box::new(move || check_counting(engine, n, &l2, &m2)));
            }
            for labels in grids::weakly_increasing(n, cfg.max_layers) {
                jobs.push(Box::new(move || check_increasing_monomial(engine, n, &labels)));
            }
        }
        jobs.push(Box::new(move || check_multiple_commutation(engine, 4.min(cfg.n_max), &[3, 1], &[2, 1], 1)));
        jobs.push(Box::new(move || check_multiple_commutation(engine, 3.min(cfg.n_max), &[2, 0], &[1, 1], 2)));
    }
    if want(Suite::Hat) {
        for n in ns.clone() {
            for (labels, mults) in grids::schur(n, n as usize, 1, cfg.max_layers) {
                if mults.len() == n as usize {
                    let mut orders = vec![0; labels.len()];
                    orders[0] = 1;
                    let l2 = labels.clone();
                    jobs.push(Box::new(move || check_hat(engine, n, &labels, &orders)));
                    jobs.push(Box::new(move || check_hat_ratio(engine, n, &l2)));
                }
            }
            for l in 1..n {
                jobs.push(Box::new(move || check_average_number(engine, n, l)));
            }
        }
    }
    if want(Suite::Inhomogeneous) {
        for n in (3..=cfg.n_max).filter(|&n| n <= 4) {
            for last in 1..=3 {
                let mut mults = vec![1; n as usize - 1];
                mults.push(last);
                jobs.push(Box::new(move || check_inhomogeneous(engine, n, &mults)));
            }
        }
        for mults in [[2usize, 1, 1], [1, 2, 2]] {
            jobs.push(Box::new(move || check_inhomogeneous(engine, 3, &mults)));
        }
        jobs.push(Box::new(move || check_inhomogeneous_collapse(engine, 3, &[3, 2, 0])));
    }
    if want(Suite::Columns) {
        for n in (3..=cfg.n_max).filter(|&n| n <= 4) {
            for k in 0..2 {
                jobs.push(Box::new(move || check_reduction(engine, n, k)));
            }
        }
        for k in 1..=4usize {
            for l in 0..=4 - k {
                for n in (k + l).max(1)..=5 {
                    jobs.push(Box::new(move || check_column_auxiliary(k, l, n)));
                }
            }
        }
        for k in 1..=3usize {
            for n in k..=5 {
                jobs.push(Box::new(move || check_column_fundamental(k, n)));
            }
            for n in 2..=5 {
                jobs.push(Box::new(move || check_column_decomposition(k, n)));
            }
        }
    }
    jobs.par_iter().map(|j| j()).collect()
}

/// Random-free fixed set of block specs for the three Schur routes.
pub fn schur_route_grid(max_weight: u32, max_vars: usize) -> Vec<BlockSpec> {
    let mut out = Vec::new();
    for v in 1..=max_vars {
        for parts in partitions_fitting(max_weight, v) {
            let mut blocks: Vec<(u32, usize)> = Vec::new();
            for &p in &parts {
                match blocks.last_mut() {
                    Some((q, c)) if *q == p => *c += 1,
                    _ => blocks.push((p, 1)),
                }
            }
            out.push(BlockSpec::new(&blocks).expect("decreasing"));
        }
    }
    out
}

/// Weakly decreasing vectors of length `len` with entries summing to at most `w`.
fn partitions_fitting(w: u32, len: usize) -> Vec<Vec<u32>> {
    fn go(w: u32, cap: u32, len: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for p in 0..=cap.min(w) {
            cur.push(p);
            go(w - p, p, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(w, w, len, &mut Vec::new(), &mut out);
    out
}
