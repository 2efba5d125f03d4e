//! Right-normal forms in `Γ^{⊗s} ⊗_A M`.
//!
//! `Γ` is free as a right `A`-module on the t-monomials, so every element of
//! `Γ^{⊗s} ⊗_A M` is uniquely `Σ t^{β_1} ⊗ … ⊗ t^{β_s} ⊗ m_β`. Moving a left
//! coefficient `a ∈ A` across a bar uses `a = Σ t^β η_R(c_β)`, obtained by
//! inverting the triangular substitution `v_i ↦ η_R(v_i)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::gradedpoly::{bp_degree, t_index, v_index, Coeff, Exponents, Poly, Substitution};
use crate::hopf::HopfAlgebroid;
use crate::scalar::{Fp, LocalRing, PLocalScalar};

/// Coefficients usable in comodule coordinates: Z_(p) or F_p.
pub trait Scalar: Coeff + LocalRing {
    /// Canonical representative modulo `p^e`.
    fn mod_ppow(&self, e: u32) -> Self;
    fn to_fp(&self) -> Fp;
    fn to_plocal(&self) -> PLocalScalar;
}

impl Scalar for PLocalScalar {
    fn mod_ppow(&self, e: u32) -> Self {
        let p = LocalRing::prime(self);
        let m = BigInt::from(p).pow(e);
        let inv = self.denominator().extended_gcd(&m).x;
        let r = (self.numerator() * inv).mod_floor(&m);
        PLocalScalar::from_int(r.to_i64().expect("modulus fits in i64"), p)
    }
    fn to_fp(&self) -> Fp {
        self.reduce()
    }
    fn to_plocal(&self) -> PLocalScalar {
        self.clone()
    }
}

impl Scalar for Fp {
    fn mod_ppow(&self, _e: u32) -> Self {
        *self
    }
    fn to_fp(&self) -> Fp {
        *self
    }
    fn to_plocal(&self) -> PLocalScalar {
        PLocalScalar::from_int(self.value() as i64, LocalRing::prime(self))
    }
}

/// `a = Σ c · t^β η_R(v^α)`: entries `(β, α, c)`.
pub type Split<C> = Vec<(Exponents, Exponents, C)>;

/// One right-normal term: t-monomials per slot, then the A-monomial that acts
/// on the module element, then a scalar.
pub type PushTerm<C> = (Vec<Exponents>, Exponents, C);

pub struct CoactionEngine<C: Scalar> {
    pub hopf: Arc<HopfAlgebroid<C>>,
    /// Modules handled by this engine are killed by `I_killed`; coefficients
    /// in that ideal are dropped as soon as they appear.
    pub killed: usize,
    inverse_images: Vec<Option<Poly<C>>>,
    split_cache: Mutex<HashMap<Exponents, Arc<Split<C>>>>,
    delta_cache: Mutex<HashMap<Exponents, Arc<Poly<C>>>>,
}

impl<C: Scalar> std::fmt::Debug for CoactionEngine<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CoactionEngine({}, killed I_{})", self.hopf.name, self.killed)
    }
}

impl<C: Scalar> CoactionEngine<C> {
    pub fn new(hopf: Arc<HopfAlgebroid<C>>, killed: usize) -> Result<Arc<Self>> {
        let mut e = CoactionEngine {
            hopf,
            killed,
            inverse_images: Vec::new(),
            split_cache: Mutex::new(HashMap::new()),
            delta_cache: Mutex::new(HashMap::new()),
        };
        e.inverse_images = e.compute_inverse()?;
        Ok(Arc::new(e))
    }

    pub fn p(&self) -> u64 {
        self.hopf.p
    }

    pub fn n(&self) -> usize {
        self.hopf.n
    }

    pub fn degree_bound(&self) -> i64 {
        self.hopf.degree_bound
    }

    pub fn v_degrees(&self) -> Vec<i64> {
        (1..=self.n()).map(|i| bp_degree(self.p(), i)).collect()
    }

    pub fn t_degrees(&self) -> Vec<i64> {
        (1..=self.hopf.t_count()).map(|i| bp_degree(self.p(), i)).collect()
    }

    pub fn v_degree(&self, alpha: &[i32]) -> i64 {
        alpha.iter().zip(self.v_degrees()).map(|(&a, d)| a as i64 * d).sum()
    }

    pub fn t_degree(&self, beta: &[i32]) -> i64 {
        beta.iter().enumerate().map(|(j, &b)| b as i64 * bp_degree(self.p(), j + 1)).sum()
    }

    /// Drop terms in the killed ideal and reduce coefficients mod p when p is
    /// killed. Applies to every block of variables.
    pub fn reduce(&self, poly: &Poly<C>) -> Poly<C> {
        let poly = self.hopf.reduce(poly);
        if self.killed == 0 {
            return poly;
        }
        let mut out = Poly::zero();
        for (e, c) in &poly.terms {
            if (0..self.killed - 1).any(|j| e[j] != 0) {
                continue;
            }
            let c = c.mod_ppow(1);
            if !Coeff::is_zero(&c) {
                out.add_term(e.clone(), c);
            }
        }
        out
    }

    /// `V_i(w, t)` with `v_i = V_i(η_R(v), t)`, in the one-block layout where
    /// the first n variables stand for `η_R(v)`.
    fn compute_inverse(&self) -> Result<Vec<Option<Poly<C>>>> {
        let n = self.n();
        let p = self.p();
        let d = self.degree_bound();
        let mut out: Vec<Option<Poly<C>>> = Vec::with_capacity(n);
        for i in 1..=n {
            if bp_degree(p, i) > d || i > self.hopf.right_unit.len() {
                out.push(None);
                continue;
            }
            let w = Poly::variable(v_index(i), 2 * n, p);
            let e = self.hopf.right_unit[i - 1].sub(&w);
            let mut images: Vec<Poly<C>> = (0..n)
                .map(|j| match out.get(j) {
                    Some(Some(v)) => v.clone(),
                    _ => Poly::variable(j, 2 * n, p),
                })
                .collect();
            images.extend((1..=n).map(|j| Poly::variable(t_index(n, 1, j), 2 * n, p)));
            let degs: Vec<i64> = self.hopf.grading(1).degrees();
            let mut s = Substitution::new(&images, &degs, i64::MAX / 4, p);
            let v = w.sub(&s.apply(&e)?);
            out.push(Some(self.reduce(&v)));
        }
        Ok(out)
    }

    fn check_v(&self, alpha: &[i32]) -> Result<()> {
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0 && self.inverse_images.get(i).map_or(true, |x| x.is_none()) {
                return Err(Error::DegreeBoundExceeded {
                    requested: bp_degree(self.p(), i + 1),
                    bound: self.degree_bound(),
                });
            }
        }
        Ok(())
    }

    /// Right-normal form of the left coefficient `v^α`.
    pub fn split(&self, alpha: &[i32]) -> Result<Arc<Split<C>>> {
        if let Some(s) = self.split_cache.lock().unwrap().get(alpha) {
            return Ok(s.clone());
        }
        self.check_v(alpha)?;
        let n = self.n();
        let p = self.p();
        let images: Vec<Poly<C>> =
            (0..n).map(|i| self.inverse_images[i].clone().unwrap_or_else(|| Poly::variable(i, 2 * n, p))).collect();
        let degs = self.hopf.grading(1).degrees();
        let mut s = Substitution::new(&images, &degs, i64::MAX / 4, p);
        let poly = self.reduce(&s.apply_monomial(alpha)?);
        let split: Split<C> = poly.terms.iter().map(|(e, c)| (e[n..].to_vec(), e[..n].to_vec(), c.clone())).collect();
        let split = Arc::new(split);
        self.split_cache.lock().unwrap().insert(alpha.to_vec(), split.clone());
        Ok(split)
    }

    /// `Δ(t^β)` in the two-block layout (left form).
    pub fn delta(&self, beta: &[i32]) -> Result<Arc<Poly<C>>> {
        if let Some(s) = self.delta_cache.lock().unwrap().get(beta) {
            return Ok(s.clone());
        }
        for (j, &b) in beta.iter().enumerate() {
            if b != 0 && (j >= self.hopf.t_count() || bp_degree(self.p(), j + 1) > self.degree_bound()) {
                return Err(Error::DegreeBoundExceeded {
                    requested: bp_degree(self.p(), j + 1),
                    bound: self.degree_bound(),
                });
            }
        }
        let n = self.n();
        let mut e = vec![0; n];
        e.extend_from_slice(beta);
        let images = self.hopf.diagonal_map();
        let degs = self.hopf.grading(2).degrees();
        let mut s = Substitution::new(&images, &degs, i64::MAX / 4, self.p());
        let d = Arc::new(self.reduce(&s.apply_monomial(&e)?));
        self.delta_cache.lock().unwrap().insert(beta.to_vec(), d.clone());
        Ok(d)
    }

    /// Right-normalize `v^α · (t^{β_1} ⊗ … ⊗ t^{β_s})`: every resulting term
    /// carries the monomial that finally acts on the module factor.
    pub fn push(&self, alpha: &[i32], slots: &[Exponents]) -> Result<Vec<PushTerm<C>>> {
        let one = <C as Coeff>::from_i64(1, self.p());
        let mut acc: BTreeMap<(Vec<Exponents>, Exponents), C> = BTreeMap::new();
        acc.insert((Vec::new(), alpha.to_vec()), one);
        for slot in slots {
            let mut next: BTreeMap<(Vec<Exponents>, Exponents), C> = BTreeMap::new();
            for ((done, a), c) in acc {
                if a.iter().all(|&x| x == 0) {
                    let mut d = done.clone();
                    d.push(slot.clone());
                    add_into(&mut next, (d, a), c);
                    continue;
                }
                for (beta, rest, c2) in self.split(&a)?.iter() {
                    let mut d = done.clone();
                    d.push(slot.iter().zip(beta).map(|(x, y)| x + y).collect());
                    add_into(&mut next, (d, rest.clone()), Coeff::mul(&c, c2));
                }
            }
            acc = next;
        }
        Ok(acc.into_iter().map(|((s, a), c)| (s, a, c)).collect())
    }

    /// Split a left-form element of `Γ^{⊗s}` (in the s-block layout) into
    /// right-normal terms.
    pub fn normalize(&self, poly: &Poly<C>, blocks: usize) -> Result<Vec<PushTerm<C>>> {
        let n = self.n();
        let mut acc: BTreeMap<(Vec<Exponents>, Exponents), C> = BTreeMap::new();
        for (e, c) in &poly.terms {
            let slots: Vec<Exponents> = (1..=blocks).map(|b| e[n * b..n * (b + 1)].to_vec()).collect();
            for (s, a, c2) in self.push(&e[..n], &slots)? {
                add_into(&mut acc, (s, a), Coeff::mul(c, &c2));
            }
        }
        Ok(acc.into_iter().map(|((s, a), c)| (s, a, c)).collect())
    }
}

fn add_into<K: Ord, C: Scalar>(map: &mut BTreeMap<K, C>, k: K, c: C) {
    if Coeff::is_zero(&c) {
        return;
    }
    match map.entry(k) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = Coeff::add(o.get(), &c);
            if Coeff::is_zero(&s) {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::BpHopf;

    #[test]
    fn inverse_substitution_inverts_right_unit() {
        for p in [2u64, 3] {
            let h = Arc::new(BpHopf::generate(p, 3, if p == 2 { 18 } else { 60 }).unwrap());
            let e = CoactionEngine::new(h.clone(), 0).unwrap();
            let n = 3;
            // Substituting w_i -> η_R(v_i) must give back v_i.
            let mut images = h.right_unit.clone();
            images.extend((1..=n).map(|j| Poly::variable(t_index(n, 1, j), 2 * n, p)));
            let degs = h.grading(1).degrees();
            for i in 1..=n {
                let s = e
                    .split(&{
                        let mut a = vec![0; n];
                        a[i - 1] = 1;
                        a
                    })
                    .unwrap();
                let mut poly = Poly::zero();
                for (beta, alpha, c) in s.iter() {
                    let mut ex = alpha.clone();
                    ex.extend(beta.iter().cloned());
                    poly.add_term(ex, c.clone());
                }
                let mut sub = Substitution::new(&images, &degs, i64::MAX / 4, p);
                assert_eq!(sub.apply(&poly).unwrap(), Poly::variable(v_index(i), 2 * n, p), "p={p} i={i}");
            }
        }
    }

    #[test]
    fn v1_pushes_to_minus_p_t1() {
        let p = 3;
        let h = Arc::new(BpHopf::generate(p, 2, 16).unwrap());
        let e = CoactionEngine::new(h, 0).unwrap();
        let s = e.split(&[1, 0]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.contains(&(vec![0, 0], vec![1, 0], PLocalScalar::from_int(1, p))));
        assert!(s.contains(&(vec![1, 0], vec![0, 0], PLocalScalar::from_int(-3, p))));
    }

    #[test]
    fn mod_p_engine_makes_vk_primitive() {
        let p = 3;
        let h = Arc::new(BpHopf::generate(p, 3, 60).unwrap());
        for k in 1..=3 {
            let e = CoactionEngine::new(h.clone(), k).unwrap();
            let mut a = vec![0; 3];
            a[k - 1] = 1;
            let s = e.split(&a).unwrap();
            assert_eq!(s.as_slice(), &[(vec![0, 0, 0], a.clone(), PLocalScalar::from_int(1, p))]);
        }
    }
}
