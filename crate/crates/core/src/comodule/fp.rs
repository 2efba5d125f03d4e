//! Finitely presented comodules over `(BP_*, BP_*BP)`.
//!
//! `M = ⊕ A·g_j / R`. Each graded piece is the cokernel of the relation span
//! inside the free piece, reduced by Smith normal form. The coaction is given
//! on generators as `ψ(g_j) = Σ_k γ_jk ⊗ g_k` with `γ_jk ∈ Γ` in left form.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::gradedpoly::{monomials_of_degree, render, render_monomial, Coeff, Exponents, Poly};
use crate::hopf::{AxiomReport, BpHopf};
use crate::scalar::{smith_normal_form, LocalRing, Matrix, Order, PLocalScalar};

use super::engine::{CoactionEngine, Scalar};
use super::{describe, is_zero_vec, kernel, kernel_fp, zero_vec, Comodule, ModuleKind, Piece};

type S = PLocalScalar;

/// Element of the free module `⊕ A·g_j`: one base polynomial per generator.
pub type FreeElem = Vec<Poly<S>>;

/// Homogeneous ideal of `A = Z_(p)[v_1..v_n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantIdeal {
    pub generators: Vec<Poly<S>>,
    pub names: Vec<String>,
}

impl InvariantIdeal {
    pub fn new(generators: Vec<Poly<S>>, names: Vec<String>) -> Self {
        InvariantIdeal { generators, names }
    }

    /// `I_k = (p, v_1, …, v_{k−1})`.
    pub fn i_n(p: u64, n: usize, k: usize) -> Self {
        let mut gens = Vec::new();
        let mut names = Vec::new();
        if k >= 1 {
            gens.push(Poly::constant(S::from_int(p as i64, p), n));
            names.push("p".to_string());
        }
        for i in 1..k.min(n + 1) {
            gens.push(Poly::variable(i - 1, n, p));
            names.push(format!("v{i}"));
        }
        InvariantIdeal { generators: gens, names }
    }

    /// `η_R(x) ∈ I·Γ` for every generator, or the first failure.
    pub fn check(&self, hopf: &BpHopf) -> Result<()> {
        let degs = hopf.grading(1).degrees();
        let vdeg = hopf.grading(0).degrees();
        for (x, name) in self.generators.iter().zip(&self.names) {
            let Some(d) = x.max_degree(&vdeg) else { continue };
            if d > hopf.degree_bound {
                return Err(Error::DegreeBoundExceeded { requested: d, bound: hopf.degree_bound });
            }
            let eta = hopf.apply_map(x, &hopf.right_unit, 1)?;
            let basis = monomials_of_degree(&degs, d);
            let index: HashMap<&Exponents, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
            let mut cols = Vec::new();
            for g in &self.generators {
                let Some(dg) = g.max_degree(&vdeg) else { continue };
                let g2 = hopf.shift(g, 0, 1, 0);
                for mu in monomials_of_degree(&degs, d - dg) {
                    cols.push(g2.mul_monomial(&mu, &S::from_int(1, hopf.p)));
                }
            }
            let mut g = Matrix::<S>::zero(basis.len(), cols.len(), hopf.p);
            for (c, col) in cols.iter().enumerate() {
                for (e, v) in &col.terms {
                    g.set(index[e], c, v.clone());
                }
            }
            let mut b = zero_vec::<S>(basis.len(), hopf.p);
            for (e, v) in &eta.terms {
                b[index[e]] = v.clone();
            }
            if !super::in_column_span(&g, &b) {
                return Err(Error::NotInvariant { generator: name.clone(), degree: d });
            }
        }
        Ok(())
    }
}

struct FreePiece {
    piece: Arc<Piece>,
    basis: Vec<(usize, Exponents)>,
    index: HashMap<(usize, Exponents), usize>,
    left: Matrix<S>,
    keep: Vec<usize>,
    lifts: Vec<Vec<S>>,
}

pub struct FPComodule {
    engine: Arc<CoactionEngine<S>>,
    pub name: String,
    pub gens: Vec<(String, i64)>,
    pub relations: Vec<FreeElem>,
    pub coaction: Vec<Vec<Poly<S>>>,
    pieces: Mutex<BTreeMap<i64, Arc<FreePiece>>>,
    coactions: Mutex<HashMap<(i64, usize), Arc<Vec<(Exponents, Vec<S>)>>>>,
}

impl std::fmt::Debug for FPComodule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FPComodule({}, {} generators, {} relations)", self.name, self.gens.len(), self.relations.len())
    }
}

impl Clone for FPComodule {
    fn clone(&self) -> Self {
        FPComodule::new(
            self.engine.clone(),
            self.name.clone(),
            self.gens.clone(),
            self.relations.clone(),
            self.coaction.clone(),
        )
        .expect("already validated")
    }
}

impl FPComodule {
    pub fn new(
        engine: Arc<CoactionEngine<S>>,
        name: impl Into<String>,
        gens: Vec<(String, i64)>,
        relations: Vec<FreeElem>,
        coaction: Vec<Vec<Poly<S>>>,
    ) -> Result<Self> {
        if engine.killed != 0 {
            return Err(Error::Unsupported("finitely presented comodules use the integral engine".into()));
        }
        let m = FPComodule {
            engine,
            name: name.into(),
            gens,
            relations,
            coaction,
            pieces: Mutex::new(BTreeMap::new()),
            coactions: Mutex::new(HashMap::new()),
        };
        let n = m.engine.n();
        if m.coaction.len() != m.gens.len() || m.coaction.iter().any(|row| row.len() != m.gens.len()) {
            return Err(Error::GradingMismatch("coaction table does not match generators".into()));
        }
        for r in &m.relations {
            if r.len() != m.gens.len() || r.iter().any(|x| x.terms.keys().any(|e| e.len() != n)) {
                return Err(Error::GradingMismatch("relation has the wrong shape".into()));
            }
            m.free_degree(r)?;
        }
        for (j, row) in m.coaction.iter().enumerate() {
            for (k, g) in row.iter().enumerate() {
                let degs = m.hopf().grading(1).degrees();
                for e in g.terms.keys() {
                    let d = crate::gradedpoly::degree(e, &degs);
                    if d + m.gens[k].1 != m.gens[j].1 {
                        return Err(Error::GradingMismatch(format!("coaction of {} is not homogeneous", m.gens[j].0)));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn hopf(&self) -> &BpHopf {
        &self.engine.hopf
    }

    pub fn engine_ref(&self) -> &Arc<CoactionEngine<S>> {
        &self.engine
    }

    fn p(&self) -> u64 {
        self.engine.p()
    }

    /// Degree of a homogeneous free element (`None` for zero).
    pub fn free_degree(&self, x: &FreeElem) -> Result<Option<i64>> {
        let vdeg = self.engine.v_degrees();
        let mut deg = None;
        for (j, poly) in x.iter().enumerate() {
            for e in poly.terms.keys() {
                let d = crate::gradedpoly::degree(e, &vdeg) + self.gens[j].1;
                match deg {
                    None => deg = Some(d),
                    Some(d0) if d0 != d => {
                        return Err(Error::GradingMismatch("inhomogeneous element".into()));
                    }
                    _ => {}
                }
            }
        }
        Ok(deg)
    }

    /// The unit comodule `A`.
    pub fn unit(engine: Arc<CoactionEngine<S>>) -> Result<Self> {
        let one = Poly::constant(S::from_int(1, engine.p()), 2 * engine.n());
        FPComodule::new(engine, "A", vec![("1".into(), 0)], Vec::new(), vec![vec![one]])
    }

    /// `A/I` with the induced coaction; fails unless `I` is invariant.
    pub fn quotient_by_invariant_ideal(engine: Arc<CoactionEngine<S>>, ideal: &InvariantIdeal) -> Result<Self> {
        ideal.check(&engine.hopf)?;
        let one = Poly::constant(S::from_int(1, engine.p()), 2 * engine.n());
        let name = if ideal.names.is_empty() { "A".to_string() } else { format!("A/({})", ideal.names.join(",")) };
        let rels = ideal.generators.iter().filter(|g| !g.is_zero()).map(|g| vec![g.clone()]).collect();
        FPComodule::new(engine, name, vec![("1".into(), 0)], rels, vec![vec![one]])
    }

    /// `A/I_k`.
    pub fn a_mod_i(engine: Arc<CoactionEngine<S>>, k: usize) -> Result<Self> {
        let ideal = InvariantIdeal::i_n(engine.p(), engine.n(), k);
        let mut m = Self::quotient_by_invariant_ideal(engine, &ideal)?;
        m.name = if k == 0 { "A".into() } else { format!("A/I_{k}") };
        Ok(m)
    }

    pub fn suspend(&self, r: i64) -> Result<Self> {
        let gens = self.gens.iter().map(|(n, d)| (n.clone(), d + r)).collect();
        let name = if r == 0 { self.name.clone() } else { format!("s^{r} {}", self.name) };
        FPComodule::new(self.engine.clone(), name, gens, self.relations.clone(), self.coaction.clone())
    }

    pub fn direct_sum(&self, other: &FPComodule) -> Result<Self> {
        self.same_hopf(other)?;
        let a = self.gens.len();
        let b = other.gens.len();
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        let pad = |x: &FreeElem, before: usize, after: usize| -> FreeElem {
            let mut v = vec![Poly::zero(); before];
            v.extend(x.iter().cloned());
            v.extend(std::iter::repeat(Poly::zero()).take(after));
            v
        };
        let mut rels: Vec<FreeElem> = self.relations.iter().map(|r| pad(r, 0, b)).collect();
        rels.extend(other.relations.iter().map(|r| pad(r, a, 0)));
        let mut coaction: Vec<Vec<Poly<S>>> = self.coaction.iter().map(|r| pad(r, 0, b)).collect();
        coaction.extend(other.coaction.iter().map(|r| pad(r, a, 0)));
        FPComodule::new(self.engine.clone(), format!("{} + {}", self.name, other.name), gens, rels, coaction)
    }

    fn same_hopf(&self, other: &FPComodule) -> Result<()> {
        if !Arc::ptr_eq(&self.engine, &other.engine) {
            return Err(Error::GradingMismatch("comodules over different presentations".into()));
        }
        Ok(())
    }

    /// `M ⊗_A N` with coaction `ψ(g ⊗ h) = Σ γγ' ⊗ (g_k ⊗ h_l)`.
    pub fn smash(&self, other: &FPComodule) -> Result<Self> {
        self.same_hopf(other)?;
        let a = self.gens.len();
        let b = other.gens.len();
        let idx = |j: usize, l: usize| j * b + l;
        let mut gens = Vec::with_capacity(a * b);
        for (gn, gd) in &self.gens {
            for (hn, hd) in &other.gens {
                gens.push((format!("{gn}.{hn}"), gd + hd));
            }
        }
        let mut rels = Vec::new();
        for r in &self.relations {
            for l in 0..b {
                let mut x = vec![Poly::zero(); a * b];
                for j in 0..a {
                    x[idx(j, l)] = r[j].clone();
                }
                rels.push(x);
            }
        }
        for s in &other.relations {
            for j in 0..a {
                let mut x = vec![Poly::zero(); a * b];
                for l in 0..b {
                    x[idx(j, l)] = s[l].clone();
                }
                rels.push(x);
            }
        }
        let mut coaction = vec![vec![Poly::zero(); a * b]; a * b];
        for j in 0..a {
            for l in 0..b {
                for k in 0..a {
                    for m in 0..b {
                        coaction[idx(j, l)][idx(k, m)] = self.coaction[j][k].mul(&other.coaction[l][m]);
                    }
                }
            }
        }
        FPComodule::new(self.engine.clone(), format!("{} (x) {}", self.name, other.name), gens, rels, coaction)
    }

    /// Quotient by the subcomodule generated by the given elements (assumed
    /// to generate a subcomodule, e.g. primitives and their A-multiples).
    pub fn quotient_by_elements(&self, elems: &[FreeElem], name: impl Into<String>) -> Result<Self> {
        let mut rels = self.relations.clone();
        rels.extend(elems.iter().cloned());
        FPComodule::new(self.engine.clone(), name, self.gens.clone(), rels, self.coaction.clone())
    }

    fn free_piece(&self, d: i64) -> Result<Arc<FreePiece>> {
        if let Some(fp) = self.pieces.lock().unwrap().get(&d) {
            return Ok(fp.clone());
        }
        if d > self.engine.degree_bound() {
            return Err(Error::DegreeBoundExceeded { requested: d, bound: self.engine.degree_bound() });
        }
        let p = self.p();
        let vdeg = self.engine.v_degrees();
        let mut basis = Vec::new();
        for (j, (_, gd)) in self.gens.iter().enumerate() {
            for m in monomials_of_degree(&vdeg, d - gd) {
                basis.push((j, m));
            }
        }
        let index: HashMap<(usize, Exponents), usize> =
            basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let mut cols: Vec<Vec<S>> = Vec::new();
        for r in &self.relations {
            let Some(rd) = self.free_degree(r)? else { continue };
            for mu in monomials_of_degree(&vdeg, d - rd) {
                let mut col = zero_vec::<S>(basis.len(), p);
                for (j, poly) in r.iter().enumerate() {
                    for (e, c) in &poly.terms {
                        let m: Exponents = e.iter().zip(&mu).map(|(a, b)| a + b).collect();
                        let i = index[&(j, m)];
                        col[i] = Coeff::add(&col[i], c);
                    }
                }
                if !is_zero_vec(&col) {
                    cols.push(col);
                }
            }
        }
        let rows = basis.len();
        let (left, left_inv, diag) = if cols.is_empty() || rows == 0 {
            (Matrix::identity(rows, p), Matrix::identity(rows, p), Vec::new())
        } else {
            let mut rm = Matrix::<S>::zero(rows, cols.len(), p);
            for (c, col) in cols.iter().enumerate() {
                for (r, v) in col.iter().enumerate() {
                    if !LocalRing::is_zero(v) {
                        rm.set(r, c, v.clone());
                    }
                }
            }
            let snf = smith_normal_form(&rm);
            (snf.left, snf.left_inv, snf.diag)
        };
        let mut keep = Vec::new();
        let mut orders = Vec::new();
        for i in 0..rows {
            let order = match diag.get(i).and_then(|x| x.valuation()) {
                Some(0) => continue,
                Some(e) => Order::PPower(e),
                None => Order::Infinite,
            };
            keep.push(i);
            orders.push(order);
        }
        let lifts: Vec<Vec<S>> = keep.iter().map(|&i| left_inv.column(i)).collect();
        let names = lifts.iter().map(|l| self.render_free_vector(&basis, l)).collect();
        let piece = Arc::new(Piece { degree: d, names, orders });
        let fp = Arc::new(FreePiece { piece, basis, index, left, keep, lifts });
        self.pieces.lock().unwrap().insert(d, fp.clone());
        Ok(fp)
    }

    fn render_free_vector(&self, basis: &[(usize, Exponents)], x: &[S]) -> String {
        let g = self.hopf().grading(0);
        let single = self.gens.len() == 1;
        let mut parts = Vec::new();
        for ((j, m), c) in basis.iter().zip(x) {
            if LocalRing::is_zero(c) {
                continue;
            }
            let mono = render_monomial(m, &g);
            let gen = if single { String::new() } else { self.gens[*j].0.clone() };
            let body = match (mono.is_empty(), gen.is_empty()) {
                (true, true) => "1".to_string(),
                (true, false) => gen,
                (false, true) => mono,
                (false, false) => format!("{mono} {gen}"),
            };
            if Coeff::is_one(c) {
                parts.push(body);
            } else {
                parts.push(format!("{c}*{body}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Coordinates of a (dense, free-basis) vector in the piece basis.
    fn reduce_dense(&self, fp: &FreePiece, x: &[S]) -> Vec<S> {
        let y = fp.left.apply(x);
        let mut out: Vec<S> = fp.keep.iter().map(|&i| y[i].clone()).collect();
        fp.piece.canon(&mut out);
        out
    }

    /// Coordinates of a homogeneous free element of degree `d`.
    pub fn reduce_free(&self, d: i64, x: &FreeElem) -> Result<Vec<S>> {
        let fp = self.free_piece(d)?;
        let mut dense = zero_vec::<S>(fp.basis.len(), self.p());
        for (j, poly) in x.iter().enumerate() {
            for (e, c) in &poly.terms {
                let i = *fp
                    .index
                    .get(&(j, e.clone()))
                    .ok_or_else(|| Error::GradingMismatch(format!("element not of degree {d}")))?;
                dense[i] = Coeff::add(&dense[i], c);
            }
        }
        Ok(self.reduce_dense(&fp, &dense))
    }

    /// A free element representing piece coordinates `x` in degree `d`.
    pub fn lift(&self, d: i64, x: &[S]) -> Result<FreeElem> {
        let fp = self.free_piece(d)?;
        let mut out: FreeElem = vec![Poly::zero(); self.gens.len()];
        for (c, l) in x.iter().zip(&fp.lifts) {
            if LocalRing::is_zero(c) {
                continue;
            }
            for ((j, m), v) in fp.basis.iter().zip(l) {
                if !LocalRing::is_zero(v) {
                    out[*j].add_term(m.clone(), Coeff::mul(c, v));
                }
            }
        }
        Ok(out)
    }

    /// Right-normal form of `ψ(x)` for a free element `x` of degree `d`,
    /// reduced into the pieces.
    pub fn coact_free(&self, d: i64, x: &FreeElem) -> Result<BTreeMap<Exponents, Vec<S>>> {
        let n = self.engine.n();
        let mut items = Vec::new();
        for (j, poly) in x.iter().enumerate() {
            for (m, c) in &poly.terms {
                let mut m2 = m.clone();
                m2.extend(std::iter::repeat(0).take(n));
                for (k, gamma) in self.coaction[j].iter().enumerate() {
                    if !gamma.is_zero() {
                        items.push((k, gamma.mul_monomial(&m2, c)));
                    }
                }
            }
        }
        self.tensor_from_left(d, &items)
    }

    /// `Σ γ_i ⊗ g_{k_i}` (each `γ_i ∈ Γ` in left form) in right-normal form,
    /// reduced into the pieces; `d` is the total degree.
    pub fn tensor_from_left(&self, d: i64, items: &[(usize, Poly<S>)]) -> Result<BTreeMap<Exponents, Vec<S>>> {
        let mut acc: BTreeMap<Exponents, FreeElem> = BTreeMap::new();
        for (k, gamma) in items {
            for (slots, alpha, c2) in self.engine.normalize(gamma, 1)? {
                let entry = acc.entry(slots[0].clone()).or_insert_with(|| vec![Poly::zero(); self.gens.len()]);
                entry[*k].add_term(alpha, c2);
            }
        }
        let mut out = BTreeMap::new();
        for (beta, elem) in acc {
            let dd = d - self.engine.t_degree(&beta);
            let y = self.reduce_free(dd, &elem)?;
            if !is_zero_vec(&y) {
                out.insert(beta, y);
            }
        }
        Ok(out)
    }

    fn gamma_basis(&self, d: i64) -> (Vec<(usize, Exponents)>, HashMap<(usize, Exponents), usize>) {
        let degs = self.hopf().grading(1).degrees();
        let mut basis = Vec::new();
        for (k, (_, gd)) in self.gens.iter().enumerate() {
            for e in monomials_of_degree(&degs, d - gd) {
                basis.push((k, e));
            }
        }
        let index = basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        (basis, index)
    }

    pub fn eta_r(&self, a: &Poly<S>) -> Result<Poly<S>> {
        self.hopf().apply_map(a, &self.hopf().right_unit, 1)
    }

    pub fn to_dyn(self) -> Arc<dyn Comodule<S>> {
        Arc::new(self)
    }
}

impl Comodule<S> for FPComodule {
    fn engine(&self) -> &Arc<CoactionEngine<S>> {
        &self.engine
    }

    fn label(&self) -> String {
        self.name.clone()
    }

    fn bottom_degree(&self) -> i64 {
        self.gens.iter().map(|g| g.1).min().unwrap_or(0)
    }

    fn top_degree(&self) -> i64 {
        self.engine.degree_bound()
    }

    fn piece(&self, d: i64) -> Result<Arc<Piece>> {
        Ok(self.free_piece(d)?.piece.clone())
    }

    fn act(&self, alpha: &[i32], d: i64, x: &[S]) -> Result<Vec<S>> {
        if alpha.iter().any(|&a| a < 0) {
            return Err(Error::Unsupported("negative exponents on a polynomial base".into()));
        }
        let target = d + self.engine.v_degree(alpha);
        let src = self.free_piece(d)?;
        let dst = self.free_piece(target)?;
        let mut dense = zero_vec::<S>(dst.basis.len(), self.p());
        for (c, l) in x.iter().zip(&src.lifts) {
            if LocalRing::is_zero(c) {
                continue;
            }
            for ((j, m), v) in src.basis.iter().zip(l) {
                if LocalRing::is_zero(v) {
                    continue;
                }
                let m2: Exponents = m.iter().zip(alpha).map(|(a, b)| a + b).collect();
                let i = dst.index[&(*j, m2)];
                dense[i] = Coeff::add(&dense[i], &Coeff::mul(c, v));
            }
        }
        Ok(self.reduce_dense(&dst, &dense))
    }

    fn coaction(&self, d: i64, i: usize) -> Result<Arc<Vec<(Exponents, Vec<S>)>>> {
        if let Some(c) = self.coactions.lock().unwrap().get(&(d, i)) {
            return Ok(c.clone());
        }
        let piece = self.piece(d)?;
        let mut unit = zero_vec::<S>(piece.dim(), self.p());
        unit[i] = S::from_int(1, self.p());
        let x = self.lift(d, &unit)?;
        let result = Arc::new(self.coact_free(d, &x)?.into_iter().collect::<Vec<_>>());
        self.coactions.lock().unwrap().insert((d, i), result.clone());
        Ok(result)
    }

    fn primitives_in_degree(&self, d: i64) -> Result<Vec<Vec<S>>> {
        let p = self.p();
        let fp = self.free_piece(d)?;
        let kind = fp.piece.kind();
        match kind {
            ModuleKind::Zero => return Ok(Vec::new()),
            ModuleKind::Mixed => return Err(Error::Unsupported(format!("{}: piece {d} has mixed torsion", self.name))),
            _ => {}
        }
        let (gbasis, gindex) = self.gamma_basis(d);
        let degs = self.hopf().grading(1).degrees();
        let n = self.engine.n();
        // Span of Γ ⊗ R inside Γ ⊗ F, in left form.
        let mut col_gen: Vec<Vec<Poly<S>>> = Vec::new();
        for r in &self.relations {
            let Some(rd) = self.free_degree(r)? else { continue };
            let pushed: Vec<Poly<S>> = r.iter().map(|a| self.eta_r(a)).collect::<Result<_>>()?;
            for mu in monomials_of_degree(&degs, d - rd) {
                let one = S::from_int(1, p);
                col_gen.push(pushed.iter().map(|x| x.mul_monomial(&mu, &one)).collect());
            }
        }
        let mut g = Matrix::<S>::zero(gbasis.len(), col_gen.len(), p);
        for (c, col) in col_gen.iter().enumerate() {
            for (k, poly) in col.iter().enumerate() {
                for (e, v) in &poly.terms {
                    let i = gindex[&(k, e.clone())];
                    g.set(i, c, Coeff::add(g.get(i, c), v));
                }
            }
        }
        // f(y) = ψ(x) − 1 ⊗ x for the lift x of each piece basis vector.
        let mut f = Matrix::<S>::zero(gbasis.len(), fp.piece.dim(), p);
        for (col, l) in fp.lifts.iter().enumerate() {
            for ((j, m), c) in fp.basis.iter().zip(l) {
                if LocalRing::is_zero(c) {
                    continue;
                }
                let mut m2 = m.clone();
                m2.extend(std::iter::repeat(0).take(n));
                for (k, gamma) in self.coaction[*j].iter().enumerate() {
                    for (e, v) in &gamma.mul_monomial(&m2, c).terms {
                        let i = gindex[&(k, e.clone())];
                        f.set(i, col, Coeff::add(f.get(i, col), v));
                    }
                }
                let eta = self.eta_r(&Poly::monomial(m.clone(), c.clone()))?;
                for (e, v) in &eta.terms {
                    let i = gindex[&(*j, e.clone())];
                    f.set(i, col, LocalRing::sub(f.get(i, col), v));
                }
            }
        }
        let (z, diag) = if g.cols == 0 || g.rows == 0 {
            (f, Vec::new())
        } else {
            let snf = smith_normal_form(&g);
            (snf.left.mul(&f), snf.diag)
        };
        let mut cond_rows: Vec<Vec<S>> = Vec::new();
        for i in 0..z.rows {
            match diag.get(i).and_then(|x| x.valuation()) {
                Some(0) => {}
                Some(e) => {
                    if kind == ModuleKind::Free || e > 1 {
                        return Err(Error::Unsupported(format!(
                            "{}: torsion of order p^{e} in Γ ⊗ M at degree {d}",
                            self.name
                        )));
                    }
                    cond_rows.push(z.row(i).to_vec());
                }
                None => {
                    if kind == ModuleKind::Free {
                        cond_rows.push(z.row(i).to_vec());
                    }
                }
            }
        }
        let dim = fp.piece.dim();
        let mut basis = if kind == ModuleKind::Fp {
            let rows = cond_rows.iter().map(|r| r.iter().map(|c| c.to_fp()).collect()).collect();
            kernel_fp(&Matrix::from_rows(rows, dim, p))
                .into_iter()
                .map(|v| v.iter().map(|c| c.to_plocal()).collect())
                .collect()
        } else {
            kernel(&Matrix::from_rows(cond_rows, dim, p))
        };
        for v in basis.iter_mut() {
            fp.piece.canon(v);
        }
        Ok(basis)
    }

    fn extra_checks(&self, through: i64, report: &mut AxiomReport) -> Result<()> {
        for (idx, r) in self.relations.iter().enumerate() {
            let Some(d) = self.free_degree(r)? else { continue };
            if d > through {
                continue;
            }
            let psi = self.coact_free(d, r)?;
            report.push("relations", format!("relation {}", idx + 1), d, psi.is_empty());
        }
        Ok(())
    }
}

/// `Γ ⊗_A M` with coaction `Δ ⊗ 1`, presented on generators `t^β ⊗ g_j`.
pub struct ExtendedComodule {
    pub underlying: FPComodule,
    pub comodule: FPComodule,
    /// Generator index of `t^β ⊗ g_j`.
    pub index: HashMap<(Exponents, usize), usize>,
}

impl ExtendedComodule {
    pub fn new(m: &FPComodule) -> Result<Self> {
        let engine = m.engine.clone();
        let hopf = &engine.hopf;
        let n = engine.n();
        let p = engine.p();
        let dmax = engine.degree_bound();
        let tdeg = engine.t_degrees();
        let gt = hopf.grading(1);
        let mut gens = Vec::new();
        let mut index = HashMap::new();
        for (j, (gname, gd)) in m.gens.iter().enumerate() {
            for total in 0..=(dmax - gd) {
                for beta in monomials_of_degree(&tdeg, total) {
                    let mut e = vec![0; n];
                    e.extend(beta.iter().cloned());
                    let mono = render_monomial(&e, &gt);
                    let label = if mono.is_empty() { gname.clone() } else { format!("{mono}.{gname}") };
                    index.insert((beta, j), gens.len());
                    gens.push((label, gd + total));
                }
            }
        }
        let ng = gens.len();
        let one = S::from_int(1, p);
        // t^β ⊗ a g = (t^β η_R(a)) ⊗ g, written as base coefficients times
        // generators.
        let to_free = |gamma: &Poly<S>, j: usize| -> Option<FreeElem> {
            let mut x: FreeElem = vec![Poly::zero(); ng];
            for (e, c) in &gamma.terms {
                let beta = e[n..].to_vec();
                let &g = index.get(&(beta, j))?;
                x[g].add_term(e[..n].to_vec(), c.clone());
            }
            Some(x)
        };
        let mut rels = Vec::new();
        for r in &m.relations {
            let Some(rd) = m.free_degree(r)? else { continue };
            for ((beta, _), _) in index.iter().filter(|((_, j), _)| *j == 0) {
                if rd + engine.t_degree(beta) > dmax {
                    continue;
                }
                let mut x: FreeElem = vec![Poly::zero(); ng];
                let mut e = vec![0; n];
                e.extend(beta.iter().cloned());
                let tb = Poly::monomial(e, one.clone());
                let mut ok = true;
                for (j, a) in r.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let gamma = tb.mul(&hopf.apply_map(a, &hopf.right_unit, 1)?);
                    match to_free(&gamma, j) {
                        Some(y) => {
                            for (k, poly) in y.into_iter().enumerate() {
                                x[k] = x[k].add(&poly);
                            }
                        }
                        None => ok = false,
                    }
                }
                if ok {
                    rels.push(x);
                }
            }
        }
        rels.sort_by_key(|x| format!("{x:?}"));
        let mut coaction = vec![vec![Poly::zero(); ng]; ng];
        for ((beta, j), &g) in &index {
            let delta = engine.delta(beta)?;
            for (e, c) in &delta.terms {
                let left: Exponents = e[..2 * n].to_vec();
                let right = e[2 * n..].to_vec();
                let &target = index.get(&(right, *j)).expect("degree bounded");
                coaction[g][target].add_term(left, c.clone());
            }
        }
        let name = format!("Gamma (x) {}", m.name);
        let comodule = FPComodule::new(engine.clone(), name, gens, rels, coaction)?;
        Ok(ExtendedComodule { underlying: m.clone(), comodule, index })
    }
}

/// Render a free element, for diagnostics.
pub fn render_free(m: &FPComodule, x: &FreeElem) -> String {
    let g = m.hopf().grading(0);
    let parts: Vec<String> = x
        .iter()
        .enumerate()
        .filter(|(_, poly)| !poly.is_zero())
        .map(|(j, poly)| format!("({}) {}", render(poly, &g), m.gens[j].0))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Render piece coordinates of `m` in degree `d`.
pub fn render_coords(m: &dyn Comodule<S>, d: i64, x: &[S]) -> Result<String> {
    Ok(describe(&*m.piece(d)?, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodule::{check_comodule_axioms, primitives};
    use crate::hopf::BpHopf;

    fn engine(p: u64, n: usize, d: i64) -> Arc<CoactionEngine<S>> {
        CoactionEngine::new(Arc::new(BpHopf::generate(p, n, d).unwrap()), 0).unwrap()
    }

    #[test]
    fn unit_and_quotients_pass_axioms() {
        for p in [2u64, 3] {
            let e = engine(p, 3, if p == 2 { 18 } else { 40 });
            for k in 0..=3 {
                let m = FPComodule::a_mod_i(e.clone(), k).unwrap();
                let r = check_comodule_axioms(&m, 40).unwrap();
                assert!(r.passed(), "p={p} k={k}\n{r}");
            }
        }
    }

    #[test]
    fn invariance() {
        let p = 3;
        let e = engine(p, 2, 24);
        let n = 2;
        let pv = Poly::constant(S::from_int(3, p), n);
        let v1 = Poly::<S>::variable(0, n, p);
        let v1sq = v1.mul(&v1);
        let ok = InvariantIdeal::new(vec![pv, v1sq], vec!["p".into(), "v1^2".into()]);
        let m = FPComodule::quotient_by_invariant_ideal(e.clone(), &ok).unwrap();
        assert!(check_comodule_axioms(&m, 24).unwrap().passed());
        let bad = InvariantIdeal::new(vec![v1], vec!["v1".into()]);
        let err = FPComodule::quotient_by_invariant_ideal(e, &bad).unwrap_err();
        assert_eq!(err, Error::NotInvariant { generator: "v1".into(), degree: 4 });
    }

    #[test]
    fn mutated_coaction_fails() {
        let p = 2;
        let e = engine(p, 2, 12);
        let n = 2;
        let one = Poly::constant(S::from_int(1, p), 2 * n);
        let v1 = Poly::<S>::variable(0, n, p);
        let rel = vec![v1.clone(), Poly::constant(S::from_int(-1, p), n)];
        let gens = vec![("g0".to_string(), 0), ("g1".to_string(), 2)];
        let good = vec![vec![one.clone(), Poly::zero()], vec![Poly::variable(0, 2 * n, p), Poly::zero()]];
        let m = FPComodule::new(e.clone(), "A'", gens.clone(), vec![rel.clone()], good).unwrap();
        assert!(check_comodule_axioms(&m, 12).unwrap().passed());
        let bad = vec![vec![one.clone(), Poly::zero()], vec![Poly::zero(), one]];
        let m = FPComodule::new(e, "A' mutated", gens, vec![rel], bad).unwrap();
        let r = check_comodule_axioms(&m, 12).unwrap();
        assert!(!r.passed());
        assert!(!r.axiom_passed("relations"));
    }

    #[test]
    fn primitives_of_quotients() {
        let p = 3;
        let e = engine(p, 3, 60);
        for m_idx in 1..=2usize {
            let m = FPComodule::a_mod_i(e.clone(), m_idx).unwrap();
            let vm = crate::gradedpoly::bp_degree(p, m_idx);
            let prims = primitives(&m, 0, 3 * vm).unwrap();
            let expected: Vec<i64> = (0..=3).map(|j| j * vm).collect();
            assert_eq!(prims.support(), expected, "m={m_idx}");
            for d in &expected {
                assert_eq!(prims.by_degree[d].len(), 1);
            }
        }
        let a = FPComodule::unit(e).unwrap();
        let prims = primitives(&a, 0, 60).unwrap();
        assert_eq!(prims.support(), vec![0]);
        assert_eq!(prims.names[&0], vec!["1".to_string()]);
    }

    #[test]
    fn suspension_and_sum() {
        let e = engine(2, 2, 12);
        let m = FPComodule::a_mod_i(e.clone(), 1).unwrap();
        let s = m.suspend(3).unwrap().suspend(-1).unwrap();
        assert_eq!(s.gens[0].1, 2);
        assert_eq!(s.piece(4).unwrap().dim(), m.piece(2).unwrap().dim());
        let sum = m.direct_sum(&m).unwrap();
        for d in 0..=12 {
            assert_eq!(sum.piece(d).unwrap().dim(), 2 * m.piece(d).unwrap().dim());
        }
        assert!(check_comodule_axioms(&sum, 12).unwrap().passed());
    }

    #[test]
    fn smash_with_unit_and_extended() {
        let e = engine(2, 2, 12);
        let a = FPComodule::unit(e.clone()).unwrap();
        let m = FPComodule::a_mod_i(e.clone(), 2).unwrap();
        let am = a.smash(&m).unwrap();
        for d in 0..=12 {
            assert_eq!(am.piece(d).unwrap().orders, m.piece(d).unwrap().orders);
        }
        assert!(check_comodule_axioms(&am, 12).unwrap().passed());
        let ext = ExtendedComodule::new(&m).unwrap();
        assert!(check_comodule_axioms(&ext.comodule, 12).unwrap().passed());
    }
}
