//! Symmetric-function oracles: Schur polynomials by three routes, elementary
//! and loop elementary symmetric functions, specializations at one.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::SymError;
use crate::poly::{Coeff, LaurentPoly, Monomial, Var};

/// Weakly decreasing non-negative parts, trailing zeros dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: &[i64]) -> Result<Self, SymError> {
        let bad = || SymError::NotAPartition(parts.to_vec());
        if parts.iter().any(|&p| p < 0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(bad());
        }
        let mut v: Vec<u32> = parts.iter().map(|&p| u32::try_from(p).map_err(|_| bad())).collect::<Result<_, _>>()?;
        while v.last() == Some(&0) {
            v.pop();
        }
        Ok(Partition { parts: v })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Nonzero parts.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Part `i` (0-based), zero past the end.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.part(0);
        let parts = (1..=first).map(|c| self.parts.iter().filter(|&&p| p >= c).count() as u32).collect();
        Partition { parts }
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// `(value, multiplicity)` pairs describing `(v_1^{m_1}, ..., v_k^{m_k})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    blocks: Vec<(u32, usize)>,
}

impl BlockSpec {
    pub fn new(blocks: &[(u32, usize)]) -> Result<Self, SymError> {
        if blocks.windows(2).any(|w| w[0].0 < w[1].0) {
            return Err(SymError::BlocksNotDecreasing);
        }
        Ok(BlockSpec { blocks: blocks.to_vec() })
    }

    /// Blocks for strictly decreasing layer labels: part `i_k - (m - k)`.
    pub fn from_labels(labels: &[u32], mults: &[usize]) -> Result<Self, SymError> {
        assert_eq!(labels.len(), mults.len());
        let m = labels.len();
        let mut blocks = Vec::with_capacity(m);
        for (k, (&i, &c)) in labels.iter().zip(mults).enumerate() {
            let part = i as i64 - (m - 1 - k) as i64;
            if part < 0 {
                return Err(SymError::NotAPartition(labels.iter().map(|&x| x as i64).collect()));
            }
            blocks.push((part as u32, c));
        }
        BlockSpec::new(&blocks)
    }

    pub fn blocks(&self) -> &[(u32, usize)] {
        &self.blocks
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.1).collect()
    }

    pub fn total_vars(&self) -> usize {
        self.blocks.iter().map(|b| b.1).sum()
    }

    pub fn partition(&self) -> Partition {
        let parts: Vec<i64> =
            self.blocks.iter().flat_map(|&(v, c)| std::iter::repeat(v as i64).take(c)).collect();
        Partition::new(&parts).expect("blocks decrease")
    }
}

/// Determinant by expansion over column subsets.
pub fn determinant<C: Coeff>(m: &[Vec<LaurentPoly<C>>]) -> LaurentPoly<C> {
    let n = m.len();
    if n == 0 {
        return LaurentPoly::one();
    }
    assert!(n <= 20 && m.iter().all(|r| r.len() == n));
    let mut layer: BTreeMap<u32, LaurentPoly<C>> = BTreeMap::from([(0, LaurentPoly::one())]);
    for row in m {
        let mut next: BTreeMap<u32, LaurentPoly<C>> = BTreeMap::new();
        for (&mask, acc) in &layer {
            for (c, entry) in row.iter().enumerate() {
                if mask & (1 << c) != 0 || entry.is_zero() {
                    continue;
                }
                let above = (mask >> (c + 1)).count_ones();
                let mut t = acc * entry;
                if above % 2 == 1 {
                    t = -t;
                }
                *next.entry(mask | (1 << c)).or_default() += &t;
            }
        }
        next.retain(|_, v| !v.is_zero());
        layer = next;
    }
    layer.remove(&((1u32 << n) - 1)).unwrap_or_default()
}

/// `e_r(vars)`; zero outside `0..=|vars|`.
pub fn elementary<C: Coeff>(r: i64, vars: &[Var]) -> LaurentPoly<C> {
    if r < 0 || r as usize > vars.len() {
        return LaurentPoly::zero();
    }
    let mut out = LaurentPoly::zero();
    for s in combinations(vars.len(), r as usize) {
        out.add_term(Monomial::from_pairs(s.iter().map(|&i| (vars[i], 1))), &C::one());
    }
    out
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Assignments of `0..sum(sizes)` to ordered blocks of the given sizes, each
/// block listed increasingly. Each unordered family appears once.
pub fn block_redistributions(sizes: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn go(rest: &[usize], sizes: &[usize], cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        let Some((&s, tail)) = sizes.split_first() else {
            out.push(cur.clone());
            return;
        };
        for pick in combinations(rest.len(), s) {
            let block: Vec<usize> = pick.iter().map(|&i| rest[i]).collect();
            let left: Vec<usize> = rest.iter().copied().filter(|x| !block.contains(x)).collect();
            cur.push(block);
            go(&left, tail, cur, out);
            cur.pop();
        }
    }
    let all: Vec<usize> = (0..sizes.iter().sum()).collect();
    let mut out = Vec::new();
    go(&all, sizes, &mut Vec::new(), &mut out);
    out
}

fn check_length(lambda: &Partition, vars: &[Var]) -> Result<(), SymError> {
    if lambda.len() > vars.len() {
        return Err(SymError::TooFewVariables { len: lambda.len(), vars: vars.len() });
    }
    Ok(())
}

/// `prod_{i<j} (vars_i - vars_j)`.
pub fn vandermonde<C: Coeff>(vars: &[Var]) -> LaurentPoly<C> {
    let mut d = LaurentPoly::one();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            d = &d * &(LaurentPoly::var(vars[i]) - LaurentPoly::var(vars[j]));
        }
    }
    d
}

/// `det(z_i^{lambda_j + n - j}) / prod_{i<j}(z_i - z_j)`.
pub fn schur_bialternant<C: Coeff>(lambda: &Partition, vars: &[Var]) -> Result<LaurentPoly<C>, SymError> {
    check_length(lambda, vars)?;
    let n = vars.len();
    let m: Vec<Vec<LaurentPoly<C>>> = vars
        .iter()
        .map(|&z| {
            (0..n).map(|j| LaurentPoly::monomial(Monomial::var_pow(z, (lambda.part(j) as usize + n - 1 - j) as i32))).collect()
        })
        .collect();
    Ok(determinant(&m).exact_divide(&vandermonde(vars))?)
}

fn jt_matrix<C: Coeff>(conj: &Partition, vars: &[Var]) -> Vec<Vec<LaurentPoly<C>>> {
    let l = conj.len();
    let e: Vec<LaurentPoly<C>> = (0..=vars.len() as i64).map(|r| elementary(r, vars)).collect();
    let pick = |r: i64| if r < 0 || r as usize >= e.len() { LaurentPoly::zero() } else { e[r as usize].clone() };
    (0..l).map(|i| (0..l).map(|j| pick(conj.part(i) as i64 - i as i64 + j as i64)).collect()).collect()
}

/// `det(e_{lambda'_i - i + j})`. Zero when `lambda` is longer than `vars`.
pub fn schur_jacobi_trudi<C: Coeff>(lambda: &Partition, vars: &[Var]) -> LaurentPoly<C> {
    determinant(&jt_matrix(&lambda.conjugate(), vars))
}

/// Default Schur route.
pub fn schur<C: Coeff>(lambda: &Partition, vars: &[Var]) -> LaurentPoly<C> {
    schur_jacobi_trudi(lambda, vars)
}

/// For every redistribution `w` of `flat` into blocks of `sizes`, the
/// cofactor `prod_{p<q}(x_p - x_q) / prod_{j<k}(w_j - w_k)`, a polynomial.
pub fn redistribution_cofactors<C: Coeff>(sizes: &[usize], flat: &[Var]) -> Vec<(Vec<Vec<usize>>, LaurentPoly<C>)> {
    assert_eq!(sizes.iter().sum::<usize>(), flat.len());
    block_redistributions(sizes)
        .into_iter()
        .map(|w| {
            let mut block_of = vec![0usize; flat.len()];
            for (j, b) in w.iter().enumerate() {
                for &p in b {
                    block_of[p] = j;
                }
            }
            let mut inversions = 0usize;
            let mut same = LaurentPoly::<C>::one();
            for p in 0..flat.len() {
                for q in p + 1..flat.len() {
                    if block_of[p] == block_of[q] {
                        same = &same * &(LaurentPoly::var(flat[p]) - LaurentPoly::var(flat[q]));
                    } else if block_of[p] > block_of[q] {
                        inversions += 1;
                    }
                }
            }
            if inversions % 2 == 1 {
                same = -same;
            }
            (w, same)
        })
        .collect()
}

/// Number of variables in the blocks after each block.
pub fn later_counts(sizes: &[usize]) -> Vec<usize> {
    (0..sizes.len()).map(|j| sizes[j + 1..].iter().sum()).collect()
}

/// `sum_w prod_j w_j^{lambda_j + N_j} / prod_{j<k}(w_j - w_k)` with `N_j` the
/// number of variables in later blocks, put over the common denominator
/// `prod_{p<q}(x_p - x_q)` and divided out exactly. `N_j = m - j` when every
/// block after the first holds one variable.
pub fn schur_pragacz<C: Coeff>(blocks: &BlockSpec, vars: &[Vec<Var>]) -> Result<LaurentPoly<C>, SymError> {
    let sizes = blocks.sizes();
    if vars.len() != sizes.len() || vars.iter().zip(&sizes).any(|(v, &s)| v.len() != s) {
        return Err(SymError::TooFewVariables { len: blocks.total_vars(), vars: vars.iter().map(Vec::len).sum() });
    }
    let later = later_counts(&sizes);
    let flat: Vec<Var> = vars.iter().flatten().copied().collect();
    let mut numer = LaurentPoly::<C>::zero();
    for (w, cof) in redistribution_cofactors::<C>(&sizes, &flat) {
        let mono = Monomial::from_pairs(w.iter().enumerate().flat_map(|(j, b)| {
            let e = (blocks.blocks[j].0 as usize + later[j]) as i32;
            let flat = &flat;
            b.iter().map(move |&p| (flat[p], e))
        }));
        numer += &cof.mul_monomial(&mono);
    }
    numer.exact_divide(&vandermonde(&flat)).map_err(|_| SymError::NonPolynomialResult)
}

/// `s_lambda(1^n)` by the hook-content style product.
pub fn schur_at_one(lambda: &Partition, n: usize) -> Result<BigInt, SymError> {
    if lambda.len() > n {
        return Err(SymError::TooFewVariables { len: lambda.len(), vars: n });
    }
    let mut acc = BigRational::one();
    for k in 0..n {
        for l in k + 1..n {
            let num = lambda.part(k) as i64 - lambda.part(l) as i64 + (l - k) as i64;
            acc *= BigRational::new(num.into(), ((l - k) as i64).into());
        }
    }
    if !acc.is_integer() {
        return Err(SymError::NonIntegral);
    }
    Ok(acc.to_integer())
}

/// `prod_{k<l} (i_k - i_l) / (l - k)`.
pub fn counting_product(labels: &[u32]) -> BigRational {
    let mut acc = BigRational::one();
    for k in 0..labels.len() {
        for l in k + 1..labels.len() {
            let num = labels[k] as i64 - labels[l] as i64;
            acc *= BigRational::new(num.into(), ((l - k) as i64).into());
        }
    }
    acc
}

/// `sum_{k_1<...<k_V <= w} prod_p table(k_p, row(p))` where rows come in
/// blocks of `sizes`: positions `M_{i-1}+1..M_i` carry row `i`. Indices are
/// 1-based.
pub fn loop_elementary_general<C: Coeff>(
    sizes: &[usize],
    w: usize,
    table: impl Fn(usize, usize) -> LaurentPoly<C>,
) -> LaurentPoly<C> {
    let rows: Vec<usize> = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat(i + 1).take(s)).collect();
    let mut out = LaurentPoly::zero();
    for ks in combinations(w, rows.len()) {
        let mut t = LaurentPoly::one();
        for (p, &k) in ks.iter().enumerate() {
            t = &t * &table(k + 1, rows[p]);
        }
        out += &t;
    }
    out
}

/// `sum_{k_1<...<k_r <= n} z_{k_1}^{(1)} ... z_{k_r}^{(r)}` with
/// `table(j, i) = z_j^{(i)}`.
pub fn loop_elementary<C: Coeff>(
    k_rows: usize,
    table: impl Fn(usize, usize) -> LaurentPoly<C>,
    n_cols: usize,
) -> LaurentPoly<C> {
    loop_elementary_general(&vec![1; k_rows], n_cols, table)
}

/// `Z(1..=m)`.
pub fn z_vars(m: usize) -> Vec<Var> {
    (1..=m as u32).map(Var::Z).collect()
}

/// `prod_k z_k^{m-k}` over `z_1..z_m`.
pub fn staircase_prefactor<C: Coeff>(m: usize) -> LaurentPoly<C> {
    LaurentPoly::monomial(Monomial::from_pairs((1..=m).map(|k| (Var::Z(k as u32), (m - k) as i32))))
}

/// `d/dz_k s_lambda(z_1..z_m)` as a sum of Jacobi-Trudi determinants with one
/// column replaced by elementary functions of the remaining variables.
pub fn schur_derivative_jt<C: Coeff>(lambda: &Partition, m: usize, k: usize) -> LaurentPoly<C> {
    assert!((1..=m).contains(&k));
    let vars = z_vars(m);
    let conj = lambda.conjugate();
    let base = jt_matrix::<C>(&conj, &vars);
    let others: Vec<Var> = vars.iter().copied().filter(|&v| v != Var::Z(k as u32)).collect();
    let mut out = LaurentPoly::zero();
    for col in 0..conj.len() {
        let mut mat = base.clone();
        for (i, row) in mat.iter_mut().enumerate() {
            row[col] = elementary(conj.part(i) as i64 - i as i64 + col as i64 - 1, &others);
        }
        out += &determinant(&mat);
    }
    out
}

/// `d/dz_1 s_lambda` at `z = 1^m`: the column-replaced Jacobi-Trudi
/// determinants with `e_r(1^m) = C(m, r)` and `e_{r-1}(1^{m-1}) = C(m-1, r-1)`.
pub fn schur_derivative_at_one(lambda: &Partition, m: usize) -> BigInt {
    let conj = lambda.conjugate();
    let binom = |top: usize, r: i64| -> LaurentPoly<BigInt> {
        if r < 0 || r as usize > top {
            LaurentPoly::zero()
        } else {
            LaurentPoly::constant(num_integer::binomial(BigInt::from(top), BigInt::from(r)))
        }
    };
    let l = conj.len();
    let mut total = BigInt::from(0);
    for col in 0..l {
        let mat: Vec<Vec<LaurentPoly<BigInt>>> = (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| {
                        let r = conj.part(i) as i64 - i as i64 + j as i64;
                        if j == col {
                            binom(m - 1, r - 1)
                        } else {
                            binom(m, r)
                        }
                    })
                    .collect()
            })
            .collect();
        total += determinant(&mat).as_constant().unwrap_or_default();
    }
    total
}

/// Closed form of `d/dz_k (prod_i z_i^{m-i} s_lambda(z_1..z_m))`.
pub fn schur_derivative_oracle<C: Coeff>(lambda: &Partition, m: usize, k: usize) -> Result<LaurentPoly<C>, SymError> {
    check_length(lambda, &z_vars(m))?;
    let s = schur_jacobi_trudi::<C>(lambda, &z_vars(m));
    let pre = staircase_prefactor::<C>(m);
    let e = (m - k) as i32;
    let mut out = &pre * &schur_derivative_jt(lambda, m, k);
    if e > 0 {
        let dpre = pre
            .mul_monomial(&Monomial::var_pow(Var::Z(k as u32), -1))
            .scale(&C::from_i64(e as i64));
        out += &(&dpre * &s);
    }
    Ok(out)
}

/// `(n-1) z_1^{n-2} prod_{k>=2} z_k^{n-k} e_l(z_1..z_n) + prod_k z_k^{n-k} e_{l-1}(z_2..z_n)`.
pub fn hat_elementary<C: Coeff>(n: usize, l: usize) -> LaurentPoly<C> {
    let vars = z_vars(n);
    let pre = staircase_prefactor::<C>(n);
    let first = pre
        .mul_monomial(&Monomial::var_pow(Var::Z(1), -1))
        .scale(&C::from_i64(n as i64 - 1));
    &(&first * &elementary(l as i64, &vars)) + &(&pre * &elementary(l as i64 - 1, &vars[1..]))
}

/// Every transposition of `vars` fixes `p`.
pub fn is_symmetric<C: Coeff>(p: &LaurentPoly<C>, vars: &[Var]) -> bool {
    vars.windows(2).all(|w| swap_vars(p, w[0], w[1]) == *p)
        && (vars.len() < 3 || swap_vars(p, vars[0], vars[vars.len() - 1]) == *p)
}

pub fn swap_vars<C: Coeff>(p: &LaurentPoly<C>, a: Var, b: Var) -> LaurentPoly<C> {
    let mut out = LaurentPoly::zero();
    for (m, c) in p.terms() {
        let sw = Monomial::from_pairs(m.iter().map(|&(v, e)| (if v == a { b } else if v == b { a } else { v }, e)));
        out.add_term(sw, c);
    }
    out
}

impl Default for Partition {
    fn default() -> Self {
        Partition::empty()
    }
}
