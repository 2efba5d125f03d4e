//! Structure maps of the truncated Hopf algebroid (BP_*, BP_*BP) generated from
//! the logarithm of the p-typical formal group law with Hazewinkel generators.
//!
//! Everything is computed over Q in the logarithm basis and then converted to
//! Z_(p); the conversion asserts integrality instead of assuming it.
//!
//! Variable layout (see [`Grading::bp`]): `v_1..v_n`, then one block of
//! `t_1..t_n` per tensor factor.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gradedpoly::{bp_degree, render, t_index, v_index, Coeff, Grading, Poly, Substitution};
use crate::scalar::{to_plocal, LocalRing, PLocalScalar};

type QPoly = Poly<BigRational>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Logarithm coefficients `l_n` in `Q[v_1..v_N]`, stored in the layout of
/// `Q[v, t]` (t exponents zero) so they multiply directly against Γ elements.
#[derive(Clone, Debug)]
pub struct LogCoefficients {
    pub p: u64,
    pub vmax: usize,
    pub degree_bound: i64,
    /// `l[0] = 1`, `l[n]` for every n ≤ vmax with 2(p^n − 1) ≤ degree bound.
    pub l: Vec<QPoly>,
}

impl LogCoefficients {
    /// Number of generators `v_n`/`t_n` whose degree fits under the bound.
    pub fn generators(&self) -> usize {
        self.l.len() - 1
    }

    /// `p l_n − Σ_{0≤i<n} l_i v_{n−i}^{p^i}`, which must vanish.
    pub fn residual(&self, n: usize) -> QPoly {
        let nv = self.vmax * 3;
        let mut r = self.l[n].scale(&q(self.p as i64));
        for i in 0..n {
            let mut e = vec![0; nv];
            e[v_index(n - i)] = self.p.pow(i as u32) as i32;
            r = r.sub(&self.l[i].mul_monomial(&e, &q(1)));
        }
        r
    }
}

/// Hazewinkel recursion `p l_n = Σ_{0≤i<n} l_i v_{n−i}^{p^i}`.
///
/// Polynomials use a three-block layout (v, t, t') so the same values serve the
/// right unit and the diagonal.
pub fn compute_log(p: u64, vmax: usize, degree_bound: i64) -> LogCoefficients {
    let nv = vmax * 3;
    let mut l = vec![Poly::constant(q(1), nv)];
    for n in 1..=vmax {
        if bp_degree(p, n) > degree_bound {
            break;
        }
        let mut sum = QPoly::zero();
        for (i, li) in l.iter().enumerate() {
            let mut e = vec![0; nv];
            e[v_index(n - i)] = p.pow(i as u32) as i32;
            sum.add_assign(&li.mul_monomial(&e, &q(1)));
        }
        l.push(sum.scale(&BigRational::new(BigInt::from(1), BigInt::from(p))));
    }
    LogCoefficients { p, vmax, degree_bound, l }
}

/// Tabulated structure maps through the degree bound.
///
/// `right_unit[n-1] = η_R(v_n)` and `conjugation[n-1] = χ(t_n)` live in
/// `Z_(p)[v, t]` (two-block layout); `diagonal[n-1] = Δ(t_n)` lives in
/// `Z_(p)[v, t, t']` (three-block layout). The counit sends t_i to 0 and v_i
/// to v_i.
#[derive(Clone, Debug)]
pub struct StructureMapTable {
    pub p: u64,
    pub vmax: usize,
    pub degree_bound: i64,
    pub right_unit: Vec<Poly<PLocalScalar>>,
    pub diagonal: Vec<Poly<PLocalScalar>>,
    pub conjugation: Vec<Poly<PLocalScalar>>,
}

fn t_power(vmax: usize, nv: usize, block: usize, j: usize, exp: u64) -> QPoly {
    let mut e = vec![0; nv];
    if j > 0 {
        e[t_index(vmax, block, j)] = exp as i32;
    }
    Poly::monomial(e, q(1))
}

fn pow(poly: &QPoly, e: u64, nv: usize, degrees: &[i64], bound: i64) -> QPoly {
    poly.pow_truncated(e as u32, nv, 0, degrees, bound).0
}

fn three_block_degrees(p: u64, vmax: usize) -> Vec<i64> {
    Grading::bp(p, vmax, 2, 0).degrees()
}

/// `η_R(l_n) = Σ_{i+j=n} l_i t_j^{p^i}` over Q, two-block layout padded to
/// three blocks.
fn right_unit_of_log(log: &LogCoefficients, n: usize) -> QPoly {
    let nv = log.vmax * 3;
    let mut out = QPoly::zero();
    for i in 0..=n {
        let t = t_power(log.vmax, nv, 1, n - i, log.p.pow(i as u32));
        out.add_assign(&log.l[i].mul(&t));
    }
    out
}

/// Solves `η_R(l_n) = (1/p) Σ_{i<n} η_R(l_i) η_R(v_{n−i})^{p^i}` for η_R(v_n).
pub fn compute_right_unit(log: &LogCoefficients) -> Result<Vec<Poly<PLocalScalar>>> {
    let (p, vmax, bound) = (log.p, log.vmax, log.degree_bound);
    let nv = vmax * 3;
    let degs = three_block_degrees(p, vmax);
    let mut eta: Vec<QPoly> = Vec::new();
    for n in 1..=log.generators() {
        let mut v = right_unit_of_log(log, n).scale(&q(p as i64));
        for i in 1..n {
            let term = right_unit_of_log(log, i).mul(&pow(&eta[n - i - 1], p.pow(i as u32), nv, &degs, bound));
            v = v.sub(&term);
        }
        eta.push(v);
    }
    eta.iter()
        .enumerate()
        .map(|(i, e)| to_two_blocks(e, vmax).try_map_coeffs(|c| to_plocal(c, p, &format!("eta_R(v{})", i + 1))))
        .collect()
}

fn to_two_blocks<C: Coeff>(poly: &Poly<C>, vmax: usize) -> Poly<C> {
    let mut out = Poly::zero();
    for (e, c) in &poly.terms {
        debug_assert!(e[2 * vmax..].iter().all(|&x| x == 0));
        out.add_term(e[..2 * vmax].to_vec(), c.clone());
    }
    out
}

/// Δ(t_n) from `Σ_{i+j=n} l_i Δ(t_j)^{p^i} = Σ_{i+j+k=n} l_i t_j^{p^i} ⊗ t_k^{p^{i+j}}`
/// and χ(t_n) from `Σ_{i+j+k=n} l_i t_j^{p^i} χ(t_k)^{p^{i+j}} = l_n`.
pub fn compute_diagonal_and_conjugation(
    log: &LogCoefficients,
) -> Result<(Vec<Poly<PLocalScalar>>, Vec<Poly<PLocalScalar>>)> {
    let (p, vmax, bound) = (log.p, log.vmax, log.degree_bound);
    let nv = vmax * 3;
    let degs = three_block_degrees(p, vmax);
    let pp = |i: usize| p.pow(i as u32);
    let one = Poly::constant(q(1), nv);

    let mut delta: Vec<QPoly> = vec![one.clone()];
    let mut chi: Vec<QPoly> = vec![one.clone()];
    for n in 1..=log.generators() {
        let mut d = QPoly::zero();
        for i in 0..=n {
            for j in 0..=(n - i) {
                let k = n - i - j;
                let term = log.l[i].mul(&t_power(vmax, nv, 1, j, pp(i))).mul(&t_power(vmax, nv, 2, k, pp(i + j)));
                d.add_assign(&term);
            }
        }
        for i in 1..=n {
            d = d.sub(&log.l[i].mul(&pow(&delta[n - i], pp(i), nv, &degs, bound)));
        }
        delta.push(d);

        let mut c = log.l[n].clone();
        for i in 0..=n {
            for j in 0..=(n - i) {
                let k = n - i - j;
                if k == n {
                    continue;
                }
                let term =
                    log.l[i].mul(&t_power(vmax, nv, 1, j, pp(i))).mul(&pow(&chi[k], pp(i + j), nv, &degs, bound));
                c = c.sub(&term);
            }
        }
        chi.push(c);
    }
    let delta = delta[1..]
        .iter()
        .enumerate()
        .map(|(i, d)| d.try_map_coeffs(|c| to_plocal(c, p, &format!("Delta(t{})", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let chi = chi[1..]
        .iter()
        .enumerate()
        .map(|(i, d)| to_two_blocks(d, vmax).try_map_coeffs(|c| to_plocal(c, p, &format!("chi(t{})", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok((delta, chi))
}

impl StructureMapTable {
    pub fn generate(p: u64, vmax: usize, degree_bound: i64) -> Result<Self> {
        let log = compute_log(p, vmax, degree_bound);
        let right_unit = compute_right_unit(&log)?;
        let (diagonal, conjugation) = compute_diagonal_and_conjugation(&log)?;
        Ok(StructureMapTable { p, vmax, degree_bound, right_unit, diagonal, conjugation })
    }

    /// Number of tabulated generators (those of degree ≤ bound).
    pub fn generators(&self) -> usize {
        self.right_unit.len()
    }

    pub fn gamma_grading(&self) -> Grading {
        Grading::bp(self.p, self.vmax, 1, self.degree_bound)
    }

    pub fn gamma2_grading(&self) -> Grading {
        Grading::bp(self.p, self.vmax, 2, self.degree_bound)
    }

    /// η_R on all of `v_1..v_vmax`: tabulated values, or the variable itself
    /// when its degree is above the bound (any monomial containing it is
    /// truncated anyway).
    pub fn right_unit_images(&self) -> Vec<Poly<PLocalScalar>> {
        let nv = 2 * self.vmax;
        (1..=self.vmax)
            .map(|i| self.right_unit.get(i - 1).cloned().unwrap_or_else(|| Poly::variable(v_index(i), nv, self.p)))
            .collect()
    }

    /// η_R applied to a polynomial in `Z_(p)[v]` laid out with at least `vmax`
    /// leading variables; the result is in the two-block layout.
    pub fn apply_right_unit(&self, a: &Poly<PLocalScalar>) -> Result<Poly<PLocalScalar>> {
        let images = self.right_unit_images();
        let degs = self.gamma_grading().degrees();
        let mut s = Substitution::new(&images, &degs, self.degree_bound, self.p);
        let trimmed = a.map_coeffs(|c| c.clone());
        let mut out = Poly::zero();
        for (e, c) in &trimmed.terms {
            out.add_assign(&s.apply_monomial(&e[..self.vmax])?.scale(c));
        }
        Ok(out)
    }

    /// Text dump of all tables.
    pub fn render(&self) -> String {
        let g1 = self.gamma_grading();
        let g2 = self.gamma2_grading();
        let mut out = String::new();
        out.push_str(&format!("# structure maps p={} vmax={} degbound={}\n", self.p, self.vmax, self.degree_bound));
        for (i, x) in self.right_unit.iter().enumerate() {
            out.push_str(&format!("eta_R(v{}) = {}\n", i + 1, render(x, &g1)));
        }
        for (i, x) in self.diagonal.iter().enumerate() {
            out.push_str(&format!("Delta(t{}) = {}\n", i + 1, render(x, &g2)));
        }
        for (i, x) in self.conjugation.iter().enumerate() {
            out.push_str(&format!("chi(t{}) = {}\n", i + 1, render(x, &g1)));
        }
        out
    }

    pub fn to_json(&self) -> StructureJson {
        let g1 = self.gamma_grading();
        let g2 = self.gamma2_grading();
        StructureJson {
            schema_version: 1,
            prime: self.p,
            vmax: self.vmax,
            degree_bound: self.degree_bound,
            right_unit: self
                .right_unit
                .iter()
                .enumerate()
                .map(|(i, x)| (format!("v{}", i + 1), render(x, &g1)))
                .collect(),
            diagonal: self.diagonal.iter().enumerate().map(|(i, x)| (format!("t{}", i + 1), render(x, &g2))).collect(),
            conjugation: self
                .conjugation
                .iter()
                .enumerate()
                .map(|(i, x)| (format!("t{}", i + 1), render(x, &g1)))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StructureJson {
    pub schema_version: u32,
    pub prime: u64,
    pub vmax: usize,
    pub degree_bound: i64,
    pub right_unit: Vec<(String, String)>,
    pub diagonal: Vec<(String, String)>,
    pub conjugation: Vec<(String, String)>,
}

/// Whether every term of a Γ element lies in `I_k Γ`, i.e. has coefficient
/// divisible by p (when k ≥ 1) or involves some `v_i` with `i < k`.
pub fn in_ik_gamma(poly: &Poly<PLocalScalar>, k: usize) -> bool {
    poly.terms
        .iter()
        .all(|(e, c)| (k >= 1 && c.valuation().map_or(true, |v| v >= 1)) || (1..k).any(|i| e[v_index(i)] > 0))
}

/// Shared handle used by the rest of the crate.
pub type SharedTable = Arc<StructureMapTable>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradedpoly::parse_poly;

    fn plocal(poly: &Poly<BigRational>, p: u64) -> Poly<PLocalScalar> {
        poly.try_map_coeffs(|c| to_plocal(c, p, "test")).unwrap()
    }

    #[test]
    fn log_examples() {
        for p in [2u64, 3, 5] {
            let log = compute_log(p, 2, bp_degree(p, 2));
            let g = Grading::bp(p, 2, 2, 1000);
            assert_eq!(log.l[0], Poly::constant(q(1), 6));
            let expect1 = parse_poly(&format!("1/{p} * v1"), &g).unwrap();
            assert_eq!(log.l[1], expect1);
            let expect2 = parse_poly(&format!("1/{p} * v2 + 1/{} * v1^{}", p * p, p + 1), &g).unwrap();
            assert_eq!(log.l[2], expect2);
            for n in 0..=2 {
                if n > 0 {
                    assert!(log.residual(n).is_zero());
                }
            }
        }
    }

    #[test]
    fn right_unit_low_degrees() {
        for p in [2u64, 3] {
            let t = StructureMapTable::generate(p, 2, bp_degree(p, 2)).unwrap();
            let g = t.gamma_grading();
            let expect = plocal(&parse_poly(&format!("v1 + {p} * t1"), &g).unwrap(), p);
            assert_eq!(t.right_unit[0], expect);
            // eta_R(v2) mod p = v2 + v1 t1^p - v1^p t1
            let reduced = t.right_unit[1].map_coeffs(|c| c.reduce());
            let expect =
                parse_poly(&format!("v2 + v1 t1^{p} - v1^{p} t1"), &g).unwrap().map_coeffs(|c| plocal_r(c, p).reduce());
            assert_eq!(reduced, expect);
        }
    }

    fn plocal_r(c: &BigRational, p: u64) -> PLocalScalar {
        to_plocal(c, p, "test").unwrap()
    }

    #[test]
    fn counit_of_right_unit() {
        let t = StructureMapTable::generate(3, 3, 60).unwrap();
        let vmax = t.vmax;
        for (i, x) in t.right_unit.iter().enumerate() {
            let eps: Poly<PLocalScalar> = x
                .terms
                .iter()
                .filter(|(e, _)| e[vmax..].iter().all(|&z| z == 0))
                .map(|(e, c)| (e.clone(), c.clone()))
                .fold(Poly::zero(), |mut acc, (e, c)| {
                    acc.add_term(e, c);
                    acc
                });
            assert_eq!(eps, Poly::variable(v_index(i + 1), 2 * vmax, 3));
        }
    }

    #[test]
    fn diagonal_and_conjugation_first_generator() {
        let t = StructureMapTable::generate(2, 2, 6).unwrap();
        let g2 = t.gamma2_grading();
        assert_eq!(render(&t.diagonal[0], &g2), "t1 + t1_2");
        assert_eq!(render(&t.conjugation[0], &t.gamma_grading()), "-t1");
    }

    #[test]
    fn primitive_mod_ik() {
        for p in [2u64, 3] {
            let t = StructureMapTable::generate(p, 3, bp_degree(p, 3)).unwrap();
            for k in 1..=3 {
                let diff = t.right_unit[k - 1].sub(&Poly::variable(v_index(k), 6, p));
                assert!(in_ik_gamma(&diff, k), "eta_R(v{k}) - v{k} not in I_{k} at p={p}");
            }
            // v_2 is not primitive modulo I_1 alone.
            let diff = t.right_unit[1].sub(&Poly::variable(v_index(2), 6, p));
            assert!(!in_ik_gamma(&diff, 1));
        }
    }
}
