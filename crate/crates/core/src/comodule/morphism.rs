//! Maps of finitely presented comodules, given on generators.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gradedpoly::{Coeff, Poly};
use crate::hopf::AxiomReport;
use crate::scalar::{smith_normal_form, LocalRing, Matrix, Order, PLocalScalar};

use super::engine::Scalar;
use super::fp::{ExtendedComodule, FPComodule, FreeElem};
use super::{kernel, zero_vec, Comodule};

type S = PLocalScalar;

/// An A-linear map sending generator `g_j` of the source to `images[j]`.
#[derive(Clone)]
pub struct FPMorphism {
    pub source: Arc<FPComodule>,
    pub target: Arc<FPComodule>,
    pub images: Vec<FreeElem>,
}

impl std::fmt::Debug for FPMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FPMorphism({} -> {})", self.source.name, self.target.name)
    }
}

impl FPMorphism {
    /// Images must be homogeneous of the generator's degree. Generators above
    /// the degree bound may map to zero.
    pub fn new(source: Arc<FPComodule>, target: Arc<FPComodule>, images: Vec<FreeElem>) -> Result<Self> {
        if images.len() != source.gens.len() {
            return Err(Error::GradingMismatch("one image per generator is required".into()));
        }
        for (j, img) in images.iter().enumerate() {
            if img.len() != target.gens.len() {
                return Err(Error::GradingMismatch("image has the wrong shape".into()));
            }
            if let Some(d) = target.free_degree(img)? {
                if d != source.gens[j].1 {
                    return Err(Error::GradingMismatch(format!(
                        "image of {} has degree {d}, expected {}",
                        source.gens[j].0, source.gens[j].1
                    )));
                }
            }
        }
        Ok(FPMorphism { source, target, images })
    }

    pub fn apply_free(&self, x: &FreeElem) -> FreeElem {
        let mut out: FreeElem = vec![Poly::zero(); self.target.gens.len()];
        for (a, img) in x.iter().zip(&self.images) {
            if a.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(img) {
                if !b.is_zero() {
                    o.add_assign(&a.mul(b));
                }
            }
        }
        out
    }

    /// Matrix of the map `M_d → N_d` in piece coordinates.
    pub fn matrix(&self, d: i64) -> Result<Matrix<S>> {
        let p = self.source.engine_ref().p();
        let src = self.source.piece(d)?;
        let dst = self.target.piece(d)?;
        let mut m = Matrix::<S>::zero(dst.dim(), src.dim(), p);
        for i in 0..src.dim() {
            let mut e = zero_vec::<S>(src.dim(), p);
            e[i] = S::from_int(1, p);
            let x = self.source.lift(d, &e)?;
            let y = self.target.reduce_free(d, &self.apply_free(&x))?;
            for (r, c) in y.into_iter().enumerate() {
                if !LocalRing::is_zero(&c) {
                    m.set(r, i, c);
                }
            }
        }
        Ok(m)
    }

    /// Relations go to zero and the map commutes with the coactions, checked
    /// on generators and relations through `through`.
    pub fn check(&self, through: i64) -> Result<AxiomReport> {
        let mut report = AxiomReport::new(through);
        for (idx, r) in self.source.relations.iter().enumerate() {
            let Some(d) = self.source.free_degree(r)? else { continue };
            if d > through {
                continue;
            }
            let y = self.target.reduce_free(d, &self.apply_free(r))?;
            report.push("well-defined", format!("relation {}", idx + 1), d, y.iter().all(LocalRing::is_zero));
        }
        for (j, (name, d)) in self.source.gens.iter().enumerate() {
            if *d > through {
                continue;
            }
            let lhs = self.target.coact_free(*d, &self.images[j])?;
            let mut items = Vec::new();
            for (k, gamma) in self.source.coaction[j].iter().enumerate() {
                if gamma.is_zero() {
                    continue;
                }
                for (l, a) in self.images[k].iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    items.push((l, gamma.mul(&self.target.eta_r(a)?)));
                }
            }
            let rhs = self.target.tensor_from_left(*d, &items)?;
            report.push("comodule map", name.clone(), *d, lhs == rhs);
        }
        Ok(report)
    }

    pub fn is_iso_in_degree(&self, d: i64) -> Result<bool> {
        let m = self.matrix(d)?;
        let src = self.source.piece(d)?;
        let dst = self.target.piece(d)?;
        Ok(is_injective(&m, &src.orders, &dst.orders) && is_surjective(&m, &dst.orders))
    }

    /// Degreewise bijectivity through `through`, one line per degree.
    pub fn iso_report(&self, through: i64) -> Result<AxiomReport> {
        let mut report = AxiomReport::new(through);
        let lo = self.source.bottom_degree().min(self.target.bottom_degree());
        for d in lo..=through {
            report.push("bijective", format!("degree {d}"), d, self.is_iso_in_degree(d)?);
        }
        Ok(report)
    }

    /// `g_j ⊗ h_l ↦ h_l ⊗ g_j`.
    pub fn swap(m: &FPComodule, n: &FPComodule) -> Result<Self> {
        let source = Arc::new(m.smash(n)?);
        let target = Arc::new(n.smash(m)?);
        let (a, b) = (m.gens.len(), n.gens.len());
        let nv = m.engine_ref().n();
        let one = Poly::constant(S::from_int(1, m.engine_ref().p()), nv);
        let mut images = Vec::with_capacity(a * b);
        for j in 0..a {
            for l in 0..b {
                let mut x = vec![Poly::zero(); a * b];
                x[l * a + j] = one.clone();
                images.push(x);
            }
        }
        FPMorphism::new(source, target, images)
    }

    /// `(g ⊗ h) ⊗ k ↦ g ⊗ (h ⊗ k)`.
    pub fn associator(m: &FPComodule, n: &FPComodule, q: &FPComodule) -> Result<Self> {
        let source = Arc::new(m.smash(n)?.smash(q)?);
        let target = Arc::new(m.smash(&n.smash(q)?)?);
        let total = m.gens.len() * n.gens.len() * q.gens.len();
        let nv = m.engine_ref().n();
        let one = Poly::constant(S::from_int(1, m.engine_ref().p()), nv);
        // Both sides index generators lexicographically by (g, h, k).
        let images = (0..total)
            .map(|i| {
                let mut x = vec![Poly::zero(); total];
                x[i] = one.clone();
                x
            })
            .collect();
        FPMorphism::new(source, target, images)
    }

    /// `(Γ ⊗ M) ⊗ N → Γ ⊗ (M ⊗ N)`, `γ ⊗ m ⊗ n ↦ γ n_{(−1)} ⊗ m ⊗ n_{(0)}`.
    pub fn extended_tensor(m: &FPComodule, n: &FPComodule) -> Result<Self> {
        let ext_m = ExtendedComodule::new(m)?;
        let ext_mn = ExtendedComodule::new(&m.smash(n)?)?;
        let source = Arc::new(ext_m.comodule.smash(n)?);
        let target = Arc::new(ext_mn.comodule.clone());
        let engine = m.engine_ref();
        let nv = engine.n();
        let dmax = engine.degree_bound();
        let b = n.gens.len();
        let mut preimage = vec![None; ext_m.comodule.gens.len()];
        for ((beta, j), &g) in &ext_m.index {
            preimage[g] = Some((beta.clone(), *j));
        }
        let mut images = Vec::with_capacity(source.gens.len());
        for e in 0..ext_m.comodule.gens.len() {
            let (beta, j) = preimage[e].clone().expect("index is a bijection");
            for l in 0..b {
                let mut x: FreeElem = vec![Poly::zero(); target.gens.len()];
                if source.gens[e * b + l].1 <= dmax {
                    for (k, gamma) in n.coaction[l].iter().enumerate() {
                        for (ex, c) in &gamma.terms {
                            let shifted: Vec<i32> = ex[nv..].iter().zip(&beta).map(|(u, w)| u + w).collect();
                            let &t = ext_mn.index.get(&(shifted, j * b + k)).ok_or_else(|| {
                                Error::DegreeBoundExceeded { requested: source.gens[e * b + l].1, bound: dmax }
                            })?;
                            x[t].add_term(ex[..nv].to_vec(), c.clone());
                        }
                    }
                }
                images.push(x);
            }
        }
        FPMorphism::new(source, target, images)
    }
}

/// Whether `φ: M → N` (piece coordinates, orders of each basis element) is
/// injective.
pub fn is_injective<C: Scalar>(phi: &Matrix<C>, src: &[Order], dst: &[Order]) -> bool {
    let p = phi.p;
    let a = phi.cols;
    let b = phi.rows;
    let torsion: Vec<(usize, u32)> = dst
        .iter()
        .enumerate()
        .filter_map(|(i, o)| match o {
            Order::PPower(e) => Some((i, *e)),
            Order::Infinite => None,
        })
        .collect();
    let mut m = Matrix::<C>::zero(b, a + torsion.len(), p);
    for r in 0..b {
        for c in 0..a {
            m.set(r, c, phi.get(r, c).clone());
        }
    }
    let pc = <C as Coeff>::from_i64(p as i64, p);
    for (k, (i, e)) in torsion.iter().enumerate() {
        let mut v = <C as Coeff>::from_i64(1, p);
        for _ in 0..*e {
            v = Coeff::mul(&v, &pc);
        }
        m.set(*i, a + k, v);
    }
    for x in kernel(&m) {
        for (c, o) in x[..a].iter().zip(src) {
            let ok = match (c.valuation(), o) {
                (None, _) => true,
                (Some(v), Order::PPower(e)) => v >= *e,
                (Some(_), Order::Infinite) => false,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Whether `φ: M → N` is surjective.
pub fn is_surjective<C: Scalar>(phi: &Matrix<C>, dst: &[Order]) -> bool {
    let p = phi.p;
    let b = phi.rows;
    if b == 0 {
        return true;
    }
    let a = phi.cols;
    let mut m = Matrix::<C>::zero(b, a + b, p);
    let pc = <C as Coeff>::from_i64(p as i64, p);
    for r in 0..b {
        for c in 0..a {
            m.set(r, c, phi.get(r, c).clone());
        }
        if let Order::PPower(e) = dst[r] {
            let mut v = <C as Coeff>::from_i64(1, p);
            for _ in 0..e {
                v = Coeff::mul(&v, &pc);
            }
            m.set(r, a + r, v);
        }
    }
    let snf = smith_normal_form(&m);
    snf.rank() == b && snf.diag[..b].iter().all(|x| x.is_unit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodule::engine::CoactionEngine;
    use crate::comodule::InvariantIdeal;
    use crate::hopf::BpHopf;

    fn engine(p: u64, n: usize, d: i64) -> Arc<crate::comodule::CoactionEngine<S>> {
        CoactionEngine::new(Arc::new(BpHopf::generate(p, n, d).unwrap()), 0).unwrap()
    }

    #[test]
    fn group_maps() {
        let p = 3;
        let m = Matrix::<S>::from_i64(&[vec![3]], p);
        assert!(is_injective(&m, &[Order::Infinite], &[Order::Infinite]));
        assert!(!is_surjective(&m, &[Order::Infinite]));
        assert!(!is_injective(&m, &[Order::Infinite], &[Order::PPower(2)]));
        assert!(is_injective(&m, &[Order::PPower(1)], &[Order::PPower(2)]));
        assert!(!is_surjective(&m, &[Order::PPower(2)]));
        let id = Matrix::<S>::from_i64(&[vec![1]], p);
        assert!(is_injective(&id, &[Order::PPower(1)], &[Order::PPower(1)]));
        assert!(is_surjective(&id, &[Order::PPower(1)]));
        assert!(!is_surjective(&m, &[Order::PPower(1)]));
    }

    #[test]
    fn swap_is_a_comodule_isomorphism() {
        let e = engine(2, 2, 12);
        let a1 = FPComodule::a_mod_i(e.clone(), 1).unwrap();
        let ideal = InvariantIdeal::i_n(2, 2, 2);
        let a2 = FPComodule::quotient_by_invariant_ideal(e, &ideal).unwrap().suspend(2).unwrap();
        let f = FPMorphism::swap(&a1, &a2).unwrap();
        assert!(f.check(12).unwrap().passed());
        assert!(f.iso_report(12).unwrap().passed());
    }

    #[test]
    fn extended_tensor_isomorphism() {
        let e = engine(2, 2, 12);
        let a = FPComodule::unit(e.clone()).unwrap();
        let a1 = FPComodule::a_mod_i(e.clone(), 1).unwrap();
        let f = FPMorphism::extended_tensor(&a, &a1).unwrap();
        let r = f.check(12).unwrap();
        assert!(r.passed(), "{r}");
        assert!(f.iso_report(12).unwrap().passed());
    }

    #[test]
    fn non_comodule_map_is_detected() {
        let e = engine(3, 2, 16);
        let a = FPComodule::unit(e.clone()).unwrap();
        let s = a.suspend(4).unwrap();
        let v1 = Poly::variable(0, 2, 3);
        // 1 ↦ v1 is A-linear but v1 is not primitive in A.
        let f = FPMorphism::new(Arc::new(s), Arc::new(a), vec![vec![v1]]).unwrap();
        assert!(!f.check(16).unwrap().passed());
    }
}
