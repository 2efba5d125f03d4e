//! Truncated graded polynomial algebras.
//!
//! Polynomials are sparse maps from exponent vectors to coefficients. The same
//! representation carries Laurent monomials (negative exponents) for the region
//! modules of the localization code; products are truncated at the degree bound
//! of the grading and the truncation is recorded in a sticky flag.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Fp, LocalRing, PLocalScalar};

/// Coefficient ring of a polynomial: Q, Z_(p) or F_p.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn from_i64(n: i64, p: u64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn is_one(&self) -> bool;
}

impl Coeff for BigRational {
    fn from_i64(n: i64, _p: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
}

impl Coeff for PLocalScalar {
    fn from_i64(n: i64, p: u64) -> Self {
        PLocalScalar::from_int(n, p)
    }
    fn is_zero(&self) -> bool {
        LocalRing::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        LocalRing::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        LocalRing::mul(self, o)
    }
    fn neg(&self) -> Self {
        LocalRing::neg(self)
    }
    fn inverse(&self) -> Option<Self> {
        PLocalScalar::inverse(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self.value())
    }
}

impl Coeff for Fp {
    fn from_i64(n: i64, p: u64) -> Self {
        Fp::from_signed(n, p)
    }
    fn is_zero(&self) -> bool {
        self.value() == 0
    }
    fn add(&self, o: &Self) -> Self {
        LocalRing::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        LocalRing::mul(self, o)
    }
    fn neg(&self) -> Self {
        LocalRing::neg(self)
    }
    fn inverse(&self) -> Option<Self> {
        if self.value() == 0 {
            None
        } else {
            Some(Fp::inverse(*self))
        }
    }
    fn is_one(&self) -> bool {
        self.value() == 1
    }
}

/// Exponent vector. Ordered lexicographically with the first variable most
/// significant.
pub type Exponents = Vec<i32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub degree: i64,
}

/// Variables with their degrees, the prime, and the truncation parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grading {
    pub prime: u64,
    pub variables: Vec<Variable>,
    pub degree_bound: i64,
    pub exponent_floor: i64,
}

/// Degree of the standard generators v_i and t_i: 2(p^i - 1).
pub fn bp_degree(p: u64, i: usize) -> i64 {
    2 * (p.pow(i as u32) as i64 - 1)
}

impl Grading {
    pub fn new(prime: u64, variables: Vec<Variable>, degree_bound: i64) -> Self {
        Grading { prime, variables, degree_bound, exponent_floor: 0 }
    }

    /// `Z_(p)[v_1..v_n]` followed by `blocks` copies of `t_1..t_n`; block `b`
    /// names its generators `t{i}` for b = 1 and `t{i}_{b}` otherwise.
    pub fn bp(prime: u64, n: usize, blocks: usize, degree_bound: i64) -> Self {
        let mut variables: Vec<Variable> =
            (1..=n).map(|i| Variable { name: format!("v{i}"), degree: bp_degree(prime, i) }).collect();
        for b in 1..=blocks {
            for i in 1..=n {
                let name = if b == 1 { format!("t{i}") } else { format!("t{i}_{b}") };
                variables.push(Variable { name, degree: bp_degree(prime, i) });
            }
        }
        Grading::new(prime, variables, degree_bound)
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.variables.iter().map(|v| v.degree).collect()
    }

    pub fn degree_of(&self, e: &[i32]) -> i64 {
        e.iter().zip(&self.variables).map(|(&x, v)| x as i64 * v.degree).sum()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn max_variable_degree(&self) -> i64 {
        self.variables.iter().map(|v| v.degree).max().unwrap_or(0)
    }

    pub fn with_bound(&self, degree_bound: i64) -> Self {
        Grading { degree_bound, ..self.clone() }
    }
}

/// Index of `v_i` (1-based) in a [`Grading::bp`] layout.
pub fn v_index(i: usize) -> usize {
    i - 1
}

/// Index of `t_i` in tensor block `block` (1-based) of a [`Grading::bp`]
/// layout with `n` generators per family.
pub fn t_index(n: usize, block: usize, i: usize) -> usize {
    n * block + i - 1
}

/// Sparse polynomial without grading information.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    pub terms: BTreeMap<Exponents, C>,
}

impl<C: Coeff> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}*{e:?}")).collect();
        write!(f, "Poly[{}]", parts.join(" + "))
    }
}

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: C, nvars: usize) -> Self {
        Poly::monomial(vec![0; nvars], c)
    }

    pub fn monomial(e: Exponents, c: C) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn variable(i: usize, nvars: usize, p: u64) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(e, C::from_i64(1, p))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, e: Exponents, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(x) => {
                let s = x.add(&c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add_assign(&mut self, o: &Poly<C>) {
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn add(&self, o: &Poly<C>) -> Poly<C> {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn neg(&self) -> Poly<C> {
        Poly { terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Poly<C>) -> Poly<C> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &C) -> Poly<C> {
        let mut r = Poly::zero();
        for (e, x) in &self.terms {
            r.add_term(e.clone(), x.mul(c));
        }
        r
    }

    /// Product with terms of degree above `bound` discarded; returns
    /// `(product, truncated)`.
    pub fn mul_truncated(&self, o: &Poly<C>, degrees: &[i64], bound: i64) -> (Poly<C>, bool) {
        let mut r = Poly::zero();
        let mut dropped = false;
        for (e1, c1) in &self.terms {
            let d1 = degree(e1, degrees);
            for (e2, c2) in &o.terms {
                if d1 + degree(e2, degrees) > bound {
                    dropped = true;
                    continue;
                }
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1.mul(c2));
            }
        }
        (r, dropped)
    }

    /// Untruncated product.
    pub fn mul(&self, o: &Poly<C>) -> Poly<C> {
        let mut r = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1.mul(c2));
            }
        }
        r
    }

    pub fn mul_monomial(&self, m: &[i32], c: &C) -> Poly<C> {
        let mut r = Poly::zero();
        for (e, x) in &self.terms {
            let e: Exponents = e.iter().zip(m).map(|(a, b)| a + b).collect();
            r.add_term(e, x.mul(c));
        }
        r
    }

    pub fn pow_truncated(&self, n: u32, nvars: usize, p: u64, degrees: &[i64], bound: i64) -> (Poly<C>, bool) {
        let mut result = Poly::constant(C::from_i64(1, p), nvars);
        let mut flag = false;
        for _ in 0..n {
            let (r, f) = result.mul_truncated(self, degrees, bound);
            result = r;
            flag |= f;
        }
        (result, flag)
    }

    pub fn homogeneous(&self, d: i64, degrees: &[i64]) -> Poly<C> {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| degree(e, degrees) == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut r = Poly::zero();
        for (e, c) in &self.terms {
            r.add_term(e.clone(), f(c));
        }
        r
    }

    pub fn try_map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> Result<D>) -> Result<Poly<D>> {
        let mut r = Poly::zero();
        for (e, c) in &self.terms {
            r.add_term(e.clone(), f(c)?);
        }
        Ok(r)
    }

    /// Re-index variables: variable `i` of this polynomial becomes variable
    /// `map[i]` of a ring with `nvars` variables.
    pub fn embed(&self, map: &[usize], nvars: usize) -> Poly<C> {
        let mut r = Poly::zero();
        for (e, c) in &self.terms {
            let mut f = vec![0; nvars];
            for (i, &x) in e.iter().enumerate() {
                f[map[i]] += x;
            }
            r.add_term(f, c.clone());
        }
        r
    }

    /// Coefficient of a monomial.
    pub fn coeff(&self, e: &[i32]) -> Option<&C> {
        self.terms.get(e)
    }

    pub fn max_degree(&self, degrees: &[i64]) -> Option<i64> {
        self.terms.keys().map(|e| degree(e, degrees)).max()
    }
}

pub fn degree(e: &[i32], degrees: &[i64]) -> i64 {
    e.iter().zip(degrees).map(|(&x, &d)| x as i64 * d).sum()
}

/// Ring homomorphism out of a polynomial ring, given by the images of the
/// variables. Powers of images are cached. Negative exponents are allowed only
/// for variables whose image is a monomial with invertible coefficient.
pub struct Substitution<'a, C: Coeff> {
    pub images: &'a [Poly<C>],
    pub target_nvars: usize,
    pub target_degrees: &'a [i64],
    pub bound: i64,
    pub p: u64,
    powers: Vec<Vec<Poly<C>>>,
    pub truncated: bool,
}

impl<'a, C: Coeff> Substitution<'a, C> {
    pub fn new(images: &'a [Poly<C>], target_degrees: &'a [i64], bound: i64, p: u64) -> Self {
        Substitution {
            images,
            target_nvars: target_degrees.len(),
            target_degrees,
            bound,
            p,
            powers: vec![Vec::new(); images.len()],
            truncated: false,
        }
    }

    fn power(&mut self, i: usize, n: i32) -> Result<Poly<C>> {
        if n < 0 {
            let img = &self.images[i];
            if img.len() != 1 {
                return Err(Error::Unsupported(format!("inverting a non-monomial image of variable {i}")));
            }
            let (e, c) = img.terms.iter().next().unwrap();
            let inv = c.inverse().ok_or_else(|| Error::Unsupported("inverting a non-unit".into()))?;
            let mut ce = inv.clone();
            for _ in 1..(-n) {
                ce = ce.mul(&inv);
            }
            let ee: Exponents = e.iter().map(|x| x * n).collect();
            return Ok(Poly::monomial(ee, ce));
        }
        let n = n as usize;
        let cache = &mut self.powers[i];
        if cache.is_empty() {
            cache.push(Poly::constant(C::from_i64(1, self.p), self.target_nvars));
        }
        while cache.len() <= n {
            let (next, f) = cache.last().unwrap().mul_truncated(&self.images[i], self.target_degrees, self.bound);
            self.truncated |= f;
            cache.push(next);
        }
        Ok(cache[n].clone())
    }

    pub fn apply_monomial(&mut self, e: &[i32]) -> Result<Poly<C>> {
        let mut acc = Poly::constant(C::from_i64(1, self.p), self.target_nvars);
        for (i, &x) in e.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let pw = self.power(i, x)?;
            let (r, f) = acc.mul_truncated(&pw, self.target_degrees, self.bound);
            self.truncated |= f;
            acc = r;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    pub fn apply(&mut self, poly: &Poly<C>) -> Result<Poly<C>> {
        let mut out = Poly::zero();
        for (e, c) in &poly.terms {
            let m = self.apply_monomial(e)?;
            out.add_assign(&m.scale(c));
        }
        Ok(out)
    }
}

/// Element of a truncated graded polynomial algebra.
#[derive(Clone, PartialEq)]
pub struct GradedPolynomial<C> {
    pub grading: Arc<Grading>,
    pub poly: Poly<C>,
    /// Set when some operation producing this value discarded terms above the
    /// degree bound; identities involving it hold only below that bound.
    pub truncated: bool,
}

impl<C: Coeff> fmt::Debug for GradedPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<C: Coeff> GradedPolynomial<C> {
    /// Builds a polynomial, dropping terms above the degree bound (and setting
    /// the flag if any were dropped).
    pub fn new(grading: Arc<Grading>, poly: Poly<C>) -> Self {
        let bound = grading.degree_bound;
        let degs = grading.degrees();
        let before = poly.len();
        let terms: BTreeMap<_, _> = poly.terms.into_iter().filter(|(e, _)| degree(e, &degs) <= bound).collect();
        let truncated = terms.len() != before;
        GradedPolynomial { grading, poly: Poly { terms }, truncated }
    }

    pub fn zero(grading: Arc<Grading>) -> Self {
        GradedPolynomial { grading, poly: Poly::zero(), truncated: false }
    }

    pub fn one(grading: Arc<Grading>) -> Self {
        let n = grading.nvars();
        let p = grading.prime;
        GradedPolynomial { grading, poly: Poly::constant(C::from_i64(1, p), n), truncated: false }
    }

    pub fn variable(grading: Arc<Grading>, name: &str) -> Result<Self> {
        let i = grading.index_of(name).ok_or_else(|| Error::GradingMismatch(format!("no variable named {name}")))?;
        let n = grading.nvars();
        let p = grading.prime;
        Ok(GradedPolynomial::new(grading, Poly::variable(i, n, p)))
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.grading != o.grading {
            return Err(Error::GradingMismatch("operands live in different gradings".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(GradedPolynomial {
            grading: self.grading.clone(),
            poly: self.poly.add(&o.poly),
            truncated: self.truncated || o.truncated,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(GradedPolynomial {
            grading: self.grading.clone(),
            poly: self.poly.sub(&o.poly),
            truncated: self.truncated || o.truncated,
        })
    }

    pub fn multiply(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let degs = self.grading.degrees();
        let (poly, dropped) = self.poly.mul_truncated(&o.poly, &degs, self.grading.degree_bound);
        Ok(GradedPolynomial {
            grading: self.grading.clone(),
            poly,
            truncated: self.truncated || o.truncated || dropped,
        })
    }

    pub fn scale(&self, c: &C) -> Self {
        GradedPolynomial { grading: self.grading.clone(), poly: self.poly.scale(c), truncated: self.truncated }
    }

    pub fn homogeneous_component(&self, d: i64) -> Self {
        GradedPolynomial {
            grading: self.grading.clone(),
            poly: self.poly.homogeneous(d, &self.grading.degrees()),
            truncated: self.truncated,
        }
    }

    /// Whether every stored term has degree exactly `d`.
    pub fn is_homogeneous_of(&self, d: i64) -> bool {
        let degs = self.grading.degrees();
        self.poly.terms.keys().all(|e| degree(e, &degs) == d)
    }
}

impl<C: Coeff> fmt::Display for GradedPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(&self.poly, &self.grading))
    }
}

/// All exponent vectors of total degree `d` over the grading's variables,
/// in descending lexicographic order (`v1^3` before `v2`).
pub fn monomial_basis(grading: &Grading, d: i64) -> Result<Vec<Exponents>> {
    if d > grading.degree_bound {
        return Err(Error::DegreeBoundExceeded { requested: d, bound: grading.degree_bound });
    }
    Ok(monomials_of_degree(&grading.degrees(), d))
}

/// Non-negative exponent vectors of degree exactly `d` for positive degrees.
pub fn monomials_of_degree(degrees: &[i64], d: i64) -> Vec<Exponents> {
    let mut out = Vec::new();
    if d < 0 {
        return out;
    }
    let mut cur = vec![0i32; degrees.len()];
    fn rec(i: usize, rem: i64, degrees: &[i64], cur: &mut Vec<i32>, out: &mut Vec<Exponents>) {
        if i == degrees.len() {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let deg = degrees[i];
        if deg <= 0 {
            // Zero-degree variables are not enumerable; they stay at zero.
            rec(i + 1, rem, degrees, cur, out);
            return;
        }
        let max = rem / deg;
        for x in (0..=max).rev() {
            cur[i] = x as i32;
            rec(i + 1, rem - x * deg, degrees, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, degrees, &mut cur, &mut out);
    out
}

pub fn render_monomial(e: &[i32], grading: &Grading) -> String {
    let parts: Vec<String> = e
        .iter()
        .zip(&grading.variables)
        .filter(|(&x, _)| x != 0)
        .map(|(&x, v)| if x == 1 { v.name.clone() } else { format!("{}^{}", v.name, x) })
        .collect();
    parts.join(" ")
}

/// Text rendering `c * v1^a v2^b t1^c + ...`, monomials in descending
/// lexicographic order, unit coefficients omitted.
pub fn render<C: Coeff>(poly: &Poly<C>, grading: &Grading) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (e, c)) in poly.terms.iter().rev().enumerate() {
        let m = render_monomial(e, grading);
        let mut cs = c.to_string();
        let negative = cs.starts_with('-');
        if negative {
            cs = cs[1..].to_string();
        }
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if m.is_empty() {
            out.push_str(&cs);
        } else if cs == "1" {
            out.push_str(&m);
        } else {
            out.push_str(&cs);
            out.push_str(" * ");
            out.push_str(&m);
        }
    }
    out
}

/// Parses the rendering produced by [`render`] (and slightly more: `*` between
/// factors, rational coefficients `a/b`). Unknown variable names are errors.
pub fn parse_poly(text: &str, grading: &Grading) -> Result<Poly<BigRational>> {
    let err = |m: String| Error::Parse { line: 0, message: m };
    let n = grading.nvars();
    let mut out = Poly::zero();
    let normalized = text.replace('-', " - ").replace('+', " + ");
    let mut sign = 1i64;
    let mut current: Option<(BigRational, Exponents)> = None;
    let flush = |cur: &mut Option<(BigRational, Exponents)>, out: &mut Poly<BigRational>| {
        if let Some((c, e)) = cur.take() {
            out.add_term(e, c);
        }
    };
    for tok in normalized.split_whitespace() {
        match tok {
            "+" | "-" => {
                flush(&mut current, &mut out);
                sign = if tok == "-" { -sign.abs() } else { 1 };
                continue;
            }
            "*" => continue,
            _ => {}
        }
        for factor in tok.split('*').filter(|s| !s.is_empty()) {
            let entry = current.get_or_insert_with(|| (BigRational::from_integer(BigInt::from(sign)), vec![0; n]));
            sign = 1;
            if factor.chars().next().unwrap().is_ascii_digit() {
                let q: BigRational = match factor.split_once('/') {
                    Some((a, b)) => BigRational::new(
                        a.parse::<BigInt>().map_err(|e| err(e.to_string()))?,
                        b.parse::<BigInt>().map_err(|e| err(e.to_string()))?,
                    ),
                    None => BigRational::from_integer(factor.parse::<BigInt>().map_err(|e| err(e.to_string()))?),
                };
                entry.0 = &entry.0 * &q;
            } else {
                let (name, exp) = match factor.split_once('^') {
                    Some((a, b)) => (a, b.parse::<i32>().map_err(|e| err(e.to_string()))?),
                    None => (factor, 1),
                };
                let i = grading.index_of(name).ok_or_else(|| err(format!("unknown variable {name}")))?;
                entry.1[i] += exp;
            }
        }
    }
    flush(&mut current, &mut out);
    Ok(out)
}

/// Signed rational to display; used by JSON output.
pub fn rational_string(q: &BigRational) -> String {
    if q.is_negative() {
        format!("-{}", q.abs())
    } else {
        q.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v12(p: u64, d: i64) -> Arc<Grading> {
        Arc::new(Grading::bp(p, 2, 0, d))
    }

    #[test]
    fn unit_and_truncation() {
        let g = v12(2, 4);
        let v1 = GradedPolynomial::<PLocalScalar>::variable(g.clone(), "v1").unwrap();
        let one = GradedPolynomial::one(g.clone());
        assert_eq!(v1.multiply(&one).unwrap(), v1);
        let sq = v1.multiply(&v1).unwrap();
        assert_eq!(sq.to_string(), "v1^2");
        assert!(!sq.truncated);

        let g2 = v12(2, 2);
        let v1 = GradedPolynomial::<PLocalScalar>::variable(g2, "v1").unwrap();
        let sq = v1.multiply(&v1).unwrap();
        assert!(sq.is_zero());
        assert!(sq.truncated);
    }

    #[test]
    fn grading_mismatch() {
        let a = GradedPolynomial::<Fp>::one(v12(2, 4));
        let b = GradedPolynomial::<Fp>::one(v12(3, 4));
        assert!(matches!(a.multiply(&b), Err(Error::GradingMismatch(_))));
    }

    #[test]
    fn homogeneous_components() {
        let g = v12(2, 10);
        let v1 = GradedPolynomial::<PLocalScalar>::variable(g.clone(), "v1").unwrap();
        let v2 = GradedPolynomial::<PLocalScalar>::variable(g.clone(), "v2").unwrap();
        let s = v1.add(&v2).unwrap();
        assert_eq!(s.homogeneous_component(2), v1);
        assert!(s.homogeneous_component(4).is_zero());
    }

    #[test]
    fn monomial_basis_examples() {
        let g = Grading::bp(2, 1, 0, 10);
        assert_eq!(monomial_basis(&g, 4).unwrap(), vec![vec![2]]);
        let g = Grading::bp(2, 2, 0, 10);
        assert_eq!(monomial_basis(&g, 6).unwrap(), vec![vec![3, 0], vec![0, 1]]);
        assert!(monomial_basis(&g, 1).unwrap().is_empty());
        assert!(matches!(monomial_basis(&g, 12), Err(Error::DegreeBoundExceeded { .. })));
    }

    #[test]
    fn render_and_parse() {
        let g = Grading::bp(3, 2, 1, 100);
        let p = parse_poly("v2 + v1 t1^3 - v1^3 t1 + 3 * t2", &g).unwrap();
        let s = render(&p, &g);
        assert_eq!(s, "-v1^3 t1 + v1 t1^3 + v2 + 3 * t2");
        assert_eq!(parse_poly(&s, &g).unwrap(), p);
        assert_eq!(parse_poly("-2 * v1 + 1/2", &g).unwrap().len(), 2);
        assert!(parse_poly("w1", &g).is_err());
    }

    #[test]
    fn substitution_with_inverse() {
        let degs = vec![2i64, 6];
        let images =
            vec![Poly::<Fp>::monomial(vec![1, 0], Fp::new(1, 3)), Poly::<Fp>::monomial(vec![0, 1], Fp::new(2, 3))];
        let mut s = Substitution::new(&images, &degs, 100, 3);
        let r = s.apply_monomial(&[-2, 1]).unwrap();
        assert_eq!(r, Poly::monomial(vec![-2, 1], Fp::new(2, 3)));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn grading() -> Arc<Grading> {
        Arc::new(Grading::bp(2, 2, 0, 12))
    }

    fn poly() -> impl Strategy<Value = GradedPolynomial<PLocalScalar>> {
        proptest::collection::vec(((0i32..4, 0i32..3), -5i64..5), 0..5).prop_map(|terms| {
            let g = grading();
            let mut p = Poly::zero();
            for ((a, b), c) in terms {
                p.add_term(vec![a, b], PLocalScalar::from_int(c, 2));
            }
            GradedPolynomial::new(g, p)
        })
    }

    /// Coefficient of q^d in prod 1/(1 - q^{deg_i}), by the standard recurrence.
    fn generating_count(degrees: &[i64], d: i64) -> usize {
        let mut coeffs = vec![0usize; d as usize + 1];
        coeffs[0] = 1;
        for &deg in degrees {
            for k in deg as usize..=d as usize {
                coeffs[k] += coeffs[k - deg as usize];
            }
        }
        coeffs[d as usize]
    }

    proptest! {
        #[test]
        fn ring_laws_below_bound(a in poly(), b in poly(), c in poly()) {
            let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c.poly, &a_bc.poly);
            prop_assert_eq!(&a.multiply(&b).unwrap().poly, &b.multiply(&a).unwrap().poly);
            let lhs = a.multiply(&b.add(&c).unwrap()).unwrap();
            let rhs = a.multiply(&b).unwrap().add(&a.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(&lhs.poly, &rhs.poly);
            let degs = a.grading.degrees();
            let overflow = a.poly.terms.keys().any(|e1| b.poly.terms.keys().any(|e2| degree(e1, &degs) + degree(e2, &degs) > 12));
            prop_assert_eq!(a.multiply(&b).unwrap().truncated, overflow || a.truncated || b.truncated);
        }

        #[test]
        fn basis_size_matches_generating_function(p in prop::sample::select(vec![2u64, 3, 5]), n in 1usize..4, d in 0i64..60) {
            let g = Grading::bp(p, n, 1, 60);
            let count = monomial_basis(&g, d).unwrap().len();
            prop_assert_eq!(count, generating_count(&g.degrees(), d));
        }
    }
}
