//! Sparse multivariate Laurent polynomials with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::PolyError;

/// Variable identifiers. The derived order is the canonical one:
/// `Q < Z(1) < Z(2) < ... < ZSite(..) < W(..)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Q,
    Z(u32),
    ZSite { layer: u32, row: u32, col: u32 },
    W(u32),
}

impl Var {
    pub fn site(layer: u32, row: u32, col: u32) -> Var {
        Var::ZSite { layer, row, col }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Q => write!(f, "q"),
            Var::Z(t) => write!(f, "z{t}"),
            Var::ZSite { layer, row, col } => write!(f, "z{layer}_k{row}l{col}"),
            Var::W(i) => write!(f, "w{i}"),
        }
    }
}

impl FromStr for Var {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PolyError::Parse(format!("unknown variable `{s}`"));
        let num = |t: &str| -> Result<u32, PolyError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse().map_err(|_| bad())
        };
        if s == "q" {
            return Ok(Var::Q);
        }
        if let Some(rest) = s.strip_prefix('w') {
            return Ok(Var::W(num(rest)?));
        }
        let rest = s.strip_prefix('z').ok_or_else(bad)?;
        match rest.split_once("_k") {
            None => Ok(Var::Z(num(rest)?)),
            Some((layer, tail)) => {
                let (row, col) = tail.split_once('l').ok_or_else(bad)?;
                Ok(Var::site(num(layer)?, num(row)?, num(col)?))
            }
        }
    }
}

/// Coefficient ring for [`LaurentPoly`].
pub trait Coeff:
    Clone
    + fmt::Debug
    + fmt::Display
    + FromStr
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;
    fn add_ref(&mut self, rhs: &Self);
    fn mul_ref(&self, rhs: &Self) -> Self;
    /// `self / rhs` if the quotient exists in the ring.
    fn div_exact(&self, rhs: &Self) -> Option<Self>;
}

impl Coeff for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn add_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(rhs);
        r.is_zero().then_some(q)
    }
}

impl Coeff for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        (!rhs.is_zero()).then(|| self / rhs)
    }
}

impl Coeff for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn add_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        (*rhs != 0 && self % rhs == 0).then(|| self / rhs)
    }
}

/// A Laurent monomial: variables in canonical order, nonzero exponents only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn var_pow(v: Var, e: i32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    /// Builds a monomial from arbitrary pairs, merging repeats.
    pub fn from_pairs<I: IntoIterator<Item = (Var, i32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<Var, i32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Var, i32)> {
        self.0.iter()
    }

    pub fn exponent(&self, v: Var) -> i32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&(_, e)| e as i64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.combine(other, 1)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.combine(other, -1)
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(v, e)| (v, -e)).collect())
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    /// Splits off the variables selected by `pred`.
    pub fn split(&self, pred: impl Fn(Var) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|(v, _)| pred(*v));
        (Monomial(a), Monomial(b))
    }

    fn combine(&self, other: &Monomial, sign: i32) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i]);
                i += 1;
            } else if take_b {
                out.push((b[j].0, sign * b[j].1));
                j += 1;
            } else {
                let e = a[i].1 + sign * b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Monomial(out)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent of the
    /// smallest variable where the two differ.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            let (va, ea) = match a.get(i) {
                Some(&(v, e)) => (Some(v), e),
                None => (None, 0),
            };
            let (vb, eb) = match b.get(j) {
                Some(&(v, e)) => (Some(v), e),
                None => (None, 0),
            };
            let (x, y) = match (va, vb) {
                (None, None) => return Ordering::Equal,
                (Some(u), Some(w)) if u == w => {
                    i += 1;
                    j += 1;
                    (ea, eb)
                }
                (Some(u), Some(w)) if u < w => {
                    i += 1;
                    (ea, 0)
                }
                (Some(_), None) => {
                    i += 1;
                    (ea, 0)
                }
                _ => {
                    j += 1;
                    (0, eb)
                }
            };
            if x != y {
                return x.cmp(&y);
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, " ")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (v, e) in &self.0 {
            map.serialize_entry(&v.to_string(), e)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<String, i32> = BTreeMap::deserialize(d)?;
        let mut pairs = Vec::with_capacity(raw.len());
        for (name, e) in raw {
            pairs.push((name.parse::<Var>().map_err(de::Error::custom)?, e));
        }
        Ok(Monomial::from_pairs(pairs))
    }
}

/// Value bound to a variable by [`LaurentPoly::substitute`].
#[derive(Clone, Debug, PartialEq)]
pub enum Binding<C> {
    Poly(LaurentPoly<C>),
    Value(C),
}

/// Finite sum of monomials with nonzero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for LaurentPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> LaurentPoly<C> {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(C::from_i64(c))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), C::one())
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(m, C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// The constant value if the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// Every variable occurring with a nonzero exponent.
    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.iter().map(|&(v, _)| v)).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_ref(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, scale: &C) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &c.mul_ref(scale));
        }
    }

    /// `self += other · m`
    pub fn add_shifted(&mut self, other: &Self, m: &Monomial) {
        for (k, c) in &other.terms {
            self.add_term(k.mul(m), c);
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        if m.is_one() {
            return self.clone();
        }
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(k, v)| (k.clone(), v.mul_ref(c))).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        LaurentPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Formal partial derivative, valid for negative exponents too.
    pub fn derivative(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let dm = m.div(&Monomial::var(v));
            out.add_term(dm, &c.mul_ref(&C::from_i64(e as i64)));
        }
        out
    }

    pub fn nth_derivative(&self, v: Var, k: u32) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative(v))
    }

    /// Replaces each bound variable by its binding.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Binding<C>>) -> Result<Self, PolyError> {
        let mut cache: BTreeMap<(Var, i32), LaurentPoly<C>> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (bound, free) = m.split(|v| bindings.contains_key(&v));
            let mut acc = Self::term(free, c.clone());
            for &(v, e) in bound.iter() {
                if !cache.contains_key(&(v, e)) {
                    let p = power_of_binding(v, &bindings[&v], e)?;
                    cache.insert((v, e), p);
                }
                acc = &acc * &cache[&(v, e)];
                if acc.is_zero() {
                    break;
                }
            }
            out += &acc;
        }
        Ok(out)
    }

    /// Substitutes every listed variable by the same value.
    pub fn substitute_all(&self, vars: &[Var], value: &C) -> Result<Self, PolyError> {
        let b = vars.iter().map(|&v| (v, Binding::Value(value.clone()))).collect();
        self.substitute(&b)
    }

    /// Value with every variable set to 1.
    pub fn eval_at_one(&self) -> C {
        let mut s = C::zero();
        for c in self.terms.values() {
            s.add_ref(c);
        }
        s
    }

    /// Quotient `self / b` when it exists in the Laurent ring.
    pub fn exact_divide(&self, b: &Self) -> Result<Self, PolyError> {
        let (lm_b, lc_b) = b.leading_term().ok_or(PolyError::ZeroDivisor)?;
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let mut vars = self.vars();
        vars.extend(b.vars());
        vars.sort();
        vars.dedup();
        // Per-variable exponent box any quotient must live in.
        let bounds: Vec<(Var, i32, i32)> = vars
            .iter()
            .map(|&v| {
                let (alo, ahi) = exponent_range(self, v);
                let (blo, bhi) = exponent_range(b, v);
                (v, alo - blo, ahi - bhi)
            })
            .collect();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((lm, lc)) = rem.leading_term() {
            let m = lm.div(lm_b);
            let c = lc.div_exact(lc_b).ok_or(PolyError::InexactDivision)?;
            if bounds.iter().any(|&(v, lo, hi)| {
                let e = m.exponent(v);
                e < lo || e > hi
            }) {
                return Err(PolyError::InexactDivision);
            }
            let t = Self::term(m.clone(), c.clone());
            rem -= &(&t * b);
            quot.add_term(m, &c);
        }
        Ok(quot)
    }
}

fn exponent_range<C: Coeff>(p: &LaurentPoly<C>, v: Var) -> (i32, i32) {
    let mut lo = i32::MAX;
    let mut hi = i32::MIN;
    for m in p.terms.keys() {
        let e = m.exponent(v);
        lo = lo.min(e);
        hi = hi.max(e);
    }
    (lo, hi)
}

fn power_of_binding<C: Coeff>(v: Var, b: &Binding<C>, e: i32) -> Result<LaurentPoly<C>, PolyError> {
    let k = e.unsigned_abs();
    match b {
        Binding::Value(x) => {
            let base = if e >= 0 {
                x.clone()
            } else if x.is_zero() {
                return Err(PolyError::DivisionByZero(v));
            } else {
                C::one().div_exact(x).ok_or(PolyError::NotInvertible(v))?
            };
            Ok(LaurentPoly::constant(base).pow(k))
        }
        Binding::Poly(p) => {
            if e >= 0 {
                return Ok(p.pow(k));
            }
            let (m, c) = match p.terms.len() {
                1 => p.terms.iter().next().unwrap(),
                _ => return Err(PolyError::NegativeExponentSubstitution(v)),
            };
            let ci = C::one().div_exact(c).ok_or(PolyError::NotInvertible(v))?;
            Ok(LaurentPoly::term(m.inv(), ci).pow(k))
        }
    }
}

impl<'a, C: Coeff> AddAssign<&'a LaurentPoly<C>> for LaurentPoly<C> {
    fn add_assign(&mut self, rhs: &'a LaurentPoly<C>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }
}

impl<'a, C: Coeff> SubAssign<&'a LaurentPoly<C>> for LaurentPoly<C> {
    fn sub_assign(&mut self, rhs: &'a LaurentPoly<C>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), &-c.clone());
        }
    }
}

impl<'a, 'b, C: Coeff> Add<&'b LaurentPoly<C>> for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, rhs: &'b LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a, 'b, C: Coeff> Sub<&'b LaurentPoly<C>> for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, rhs: &'b LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a, 'b, C: Coeff> Mul<&'b LaurentPoly<C>> for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, rhs: &'b LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = LaurentPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &ca.mul_ref(cb));
            }
        }
        out
    }
}

impl<'a, C: Coeff> Neg for &'a LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        LaurentPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl<C: Coeff> $tr<LaurentPoly<C>> for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $f(self, rhs: LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$f(&rhs)
            }
        }
        impl<'a, C: Coeff> $tr<&'a LaurentPoly<C>> for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $f(self, rhs: &'a LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$f(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<C: Coeff> Neg for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        -&self
    }
}

impl<C: Coeff> From<Var> for LaurentPoly<C> {
    fn from(v: Var) -> Self {
        LaurentPoly::var(v)
    }
}

impl<C: Coeff> From<Monomial> for LaurentPoly<C> {
    fn from(m: Monomial) -> Self {
        LaurentPoly::monomial(m)
    }
}

/// Terms are printed leading term first.
impl<C: Coeff> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut body = if m.is_one() {
                c.to_string()
            } else if c.is_one() {
                m.to_string()
            } else if (-c.clone()).is_one() {
                format!("-{m}")
            } else {
                format!("{c} {m}")
            };
            if idx > 0 {
                if let Some(rest) = body.strip_prefix('-') {
                    body = format!(" - {rest}");
                } else {
                    body = format!(" + {body}");
                }
            }
            f.write_str(&body)?;
        }
        Ok(())
    }
}

impl<C: Coeff> FromStr for LaurentPoly<C> {
    type Err = PolyError;

    /// Parses the [`Display`](fmt::Display) format, e.g. `2 z1^3 z2 - q^-1 + 1/2 w1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Self::zero();
        let mut sign = 1i64;
        let mut coeff: Option<C> = None;
        let mut factors: Vec<(Var, i32)> = Vec::new();
        let mut open = false;
        let flush = |out: &mut Self, sign: i64, coeff: &mut Option<C>, factors: &mut Vec<(Var, i32)>| {
            let c = coeff.take().unwrap_or_else(C::one) * C::from_i64(sign);
            out.add_term(Monomial::from_pairs(factors.drain(..)), &c);
        };
        let spaced = s.replace('+', " + ").replace('-', " - ").replace("^ - ", "^-");
        for tok in spaced.split_whitespace() {
            match tok {
                "+" | "-" => {
                    if open {
                        flush(&mut out, sign, &mut coeff, &mut factors);
                        open = false;
                        sign = 1;
                    }
                    if tok == "-" {
                        sign = -sign;
                    }
                }
                _ if tok.starts_with(|ch: char| ch.is_ascii_digit()) => {
                    if coeff.is_some() || !factors.is_empty() {
                        return Err(PolyError::Parse(format!("misplaced coefficient `{tok}`")));
                    }
                    let c = tok.parse::<C>().map_err(|_| PolyError::Parse(format!("bad coefficient `{tok}`")))?;
                    coeff = Some(c);
                    open = true;
                }
                _ => {
                    let (name, exp) = match tok.split_once('^') {
                        Some((n, e)) => {
                            (n, e.parse::<i32>().map_err(|_| PolyError::Parse(format!("bad exponent in `{tok}`")))?)
                        }
                        None => (tok, 1),
                    };
                    factors.push((name.parse()?, exp));
                    open = true;
                }
            }
        }
        if open {
            flush(&mut out, sign, &mut coeff, &mut factors);
        } else if !s.trim().is_empty() {
            return Err(PolyError::Parse(format!("dangling sign in `{s}`")));
        }
        if s.trim().is_empty() {
            return Err(PolyError::Parse("empty polynomial".into()));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: String,
    monomial: Monomial,
}

/// JSON form: a list of `{"coeff": "<decimal>", "monomial": {"z1": 2, ...}}`,
/// leading term first.
impl<C: Coeff> Serialize for LaurentPoly<C> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<TermRepr> =
            self.terms.iter().rev().map(|(m, c)| TermRepr { coeff: c.to_string(), monomial: m.clone() }).collect();
        reprs.serialize(s)
    }
}

impl<'de, C: Coeff> Deserialize<'de> for LaurentPoly<C> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let reprs: Vec<TermRepr> = Vec::deserialize(d)?;
        let mut out = Self::zero();
        for r in reprs {
            let c = r.coeff.parse::<C>().map_err(|_| de::Error::custom(format!("bad coefficient `{}`", r.coeff)))?;
            out.add_term(r.monomial, &c);
        }
        Ok(out)
    }
}

/// Converts integer coefficients to rationals.
pub fn to_rational(p: &LaurentPoly<BigInt>) -> LaurentPoly<BigRational> {
    p.map_coeffs(|c| BigRational::from_integer(c.clone()))
}

/// Converts back to integer coefficients if every coefficient is integral.
pub fn to_integer(p: &LaurentPoly<BigRational>) -> Option<LaurentPoly<BigInt>> {
    let mut out = LaurentPoly::zero();
    for (m, c) in p.terms() {
        if !c.is_integer() {
            return None;
        }
        out.add_term(m.clone(), &c.to_integer());
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = LaurentPoly<BigInt>;

    fn z(t: u32) -> P {
        P::var(Var::Z(t))
    }

    fn p(s: &str) -> P {
        s.parse().unwrap()
    }

    #[test]
    fn var_order_is_canonical() {
        let mut vs = vec![Var::W(1), Var::site(1, 1, 1), Var::Z(2), Var::Q, Var::Z(1)];
        vs.sort();
        assert_eq!(vs, vec![Var::Q, Var::Z(1), Var::Z(2), Var::site(1, 1, 1), Var::W(1)]);
    }

    #[test]
    fn var_names_round_trip() {
        for v in [Var::Q, Var::Z(12), Var::site(3, 2, 1), Var::W(4)] {
            assert_eq!(v.to_string().parse::<Var>().unwrap(), v);
        }
        assert_eq!(Var::site(2, 1, 3).to_string(), "z2_k1l3");
        assert!("x1".parse::<Var>().is_err());
    }

    #[test]
    fn additive_inverse_and_merge() {
        assert!((z(1) + (-z(1))).is_zero());
        let q = P::var(Var::Q);
        assert_eq!(&(&z(1) + &q) + &z(1), p("2 z1 + q"));
        let x_over_y = P::monomial(Monomial::from_pairs([(Var::Z(1), 1), (Var::Z(2), -1)]));
        assert_eq!(&(&P::one() - &x_over_y) + &x_over_y, P::one());
    }

    #[test]
    fn products() {
        let a = P::monomial(Monomial::from_pairs([(Var::Z(1), 1), (Var::Z(2), -1)]));
        assert_eq!(&a * &z(2), z(1));
        assert_eq!(&(&z(1) + &z(2)) * &(&z(1) - &z(2)), p("z1^2 - z2^2"));
        let e2 = p("z1 z2 + z1 z3 + z2 z3");
        let e3 = p("z1 z2 z3");
        assert_eq!(&e2 * &e3, p("z1^2 z2^2 z3 + z1^2 z2 z3^2 + z1 z2^2 z3^2"));
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("z1^2 z2").derivative(Var::Z(1)), p("2 z1 z2"));
        assert!(p("z2^3").derivative(Var::Z(1)).is_zero());
        assert_eq!(p("z1^-1").derivative(Var::Z(1)), p("-z1^-2"));
        assert_eq!(p("z1 z2 + z1 z3 + z2 z3").derivative(Var::Z(1)), p("z2 + z3"));
    }

    #[test]
    fn substitution() {
        let ones = |vs: &[u32]| -> BTreeMap<Var, Binding<BigInt>> {
            vs.iter().map(|&t| (Var::Z(t), Binding::Value(BigInt::from(1)))).collect()
        };
        assert_eq!(p("z1 z2^2").substitute(&ones(&[1, 2])).unwrap(), P::one());
        assert_eq!(p("z1^2 z2 + z1 z2^2").substitute(&ones(&[1, 2])).unwrap(), P::from_i64(2));
        let mut b = BTreeMap::new();
        b.insert(Var::Z(1), Binding::Poly(z(2)));
        assert!(p("1 - z1 z2^-1").substitute(&b).unwrap().is_zero());
    }

    #[test]
    fn substitution_errors() {
        let mut b = BTreeMap::new();
        b.insert(Var::Z(1), Binding::Poly(p("z2 + z3")));
        assert_eq!(p("z1^-1").substitute(&b), Err(PolyError::NegativeExponentSubstitution(Var::Z(1))));
        let mut b = BTreeMap::new();
        b.insert(Var::Z(1), Binding::Value(BigInt::from(0)));
        assert_eq!(p("z1^-2 + 1").substitute(&b), Err(PolyError::DivisionByZero(Var::Z(1))));
        let mut b = BTreeMap::new();
        b.insert(Var::Z(1), Binding::Value(BigInt::from(2)));
        assert_eq!(p("z1^-1").substitute(&b), Err(PolyError::NotInvertible(Var::Z(1))));
        let r: LaurentPoly<BigRational> = "z1^-1".parse().unwrap();
        let mut b = BTreeMap::new();
        b.insert(Var::Z(1), Binding::Value(BigRational::new(2.into(), 1.into())));
        assert_eq!(r.substitute(&b).unwrap().to_string(), "1/2");
    }

    #[test]
    fn division() {
        assert_eq!(p("z1^2 - z2^2").exact_divide(&p("z1 - z2")).unwrap(), p("z1 + z2"));
        assert_eq!(p("z1 z2").exact_divide(&z(2)).unwrap(), z(1));
        assert_eq!(p("z1^2 + z2").exact_divide(&p("z1 - z2")), Err(PolyError::InexactDivision));
        assert_eq!(p("3 z1").exact_divide(&p("2")), Err(PolyError::InexactDivision));
        assert_eq!(p("z1").exact_divide(&P::zero()), Err(PolyError::ZeroDivisor));
        assert_eq!(p("z1^-1 - z2^-1").exact_divide(&p("z2 - z1")).unwrap(), p("z1^-1 z2^-1"));
    }

    #[test]
    fn display_and_parse() {
        let a = p("z1^3 z2^2 z3^2 + z1^3 z2^3 z3 + z1^2 z2^3 z3^2");
        assert_eq!(a.to_string(), "z1^3 z2^3 z3 + z1^3 z2^2 z3^2 + z1^2 z2^3 z3^2");
        assert_eq!(p("1 - q^2").to_string(), "-q^2 + 1");
        assert_eq!(P::zero().to_string(), "0");
        assert_eq!(p("-3 z1^-1 z2_k1l2").to_string(), "-3 z1^-1 z2_k1l2");
        assert!("z1 +".parse::<P>().is_err());
        assert!("".parse::<P>().is_err());
    }

    #[test]
    fn grlex_order() {
        let m = |s: &str| p(s).leading_term().unwrap().0.clone();
        assert!(m("z1^2") > m("z1 z2"));
        assert!(m("z1 z2") > m("z2^2"));
        assert!(m("z2^3") > m("z1^2"));
        assert!(m("q") > m("z5"));
        assert!(m("z1^-1") < m("1"));
    }

    #[test]
    fn json_round_trip() {
        let a = p("2 z1^3 z2^-1 - q + 5");
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"[{"coeff":"2","monomial":{"z1":3,"z2":-1}},{"coeff":"-1","monomial":{"q":1}},{"coeff":"5","monomial":{}}]"#
        );
        let back: P = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn pow_and_constants() {
        assert_eq!(p("z1 + 1").pow(2), p("z1^2 + 2 z1 + 1"));
        assert_eq!(p("z1").pow(0), P::one());
        assert_eq!(p("7").as_constant(), Some(BigInt::from(7)));
        assert_eq!(p("z1 + 2").as_constant(), None);
        assert_eq!(p("z1 + 2 z2^-3").eval_at_one(), BigInt::from(3));
    }
}
