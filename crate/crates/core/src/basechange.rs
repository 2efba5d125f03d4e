//! Landweber base change and the localized Hopf algebroids `(C, Σ)`.
//!
//! Everything here lives in the torsion regime: coefficients killed by `I_k`,
//! where `η_R(v_k) = v_k` and inverting `v_k` is exact. Ext with coefficients
//! in `v_k^{-1}A/I_k` is computed as the colimit of the truncations
//! `v_k^{-F}A/I_k`: a class counts when it survives from floor `F` to floor
//! `F + G`, and the answer is certified by moving both `F` and `G` up by one.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cobar::CobarComplex;
use crate::comodule::{zero_vec, CoactionEngine, Comodule, FPComodule, ModuleKind, Region, RegionComodule, Scalar};
use crate::error::{Error, Result};
use crate::gradedpoly::{bp_degree, monomials_of_degree, t_index, v_index, Coeff, Exponents, Poly};
use crate::hopf::{AxiomReport, BaseVar, BpHopf, FpHopf};
use crate::landweber::LandweberAlgebra;
use crate::localization::{localize, LocalizeInput, Localized};
use crate::scalar::{rank_fp, smith_normal_form, FGPGroup, Fp, Matrix, PLocalScalar};

type S = PLocalScalar;

fn reduced_fp(gamma: &BpHopf, base: Vec<BaseVar>, name: String) -> FpHopf {
    let mut h = gamma.reduce_mod_p();
    h.base = base;
    h.name = name;
    let r = |v: &Vec<Poly<Fp>>, h: &FpHopf| v.iter().map(|x| h.reduce(x)).collect::<Vec<_>>();
    h.right_unit = r(&h.right_unit, &h);
    h.diagonal = r(&h.diagonal, &h);
    h.conjugation = r(&h.conjugation, &h);
    h
}

/// `(C, Σ) = (v_k^{-1}A/I_k, v_k^{-1}Γ/I_k)` over F_p.
#[derive(Clone, Debug)]
pub struct LocalizedHopfAlgebroid {
    pub k: usize,
    pub hopf: Arc<FpHopf>,
    pub engine: Arc<CoactionEngine<Fp>>,
}

pub fn build_localized(gamma: &BpHopf, k: usize) -> Result<LocalizedHopfAlgebroid> {
    if k == 0 {
        return Err(Error::Unsupported("the k = 0 localized Hopf algebroid is rational".into()));
    }
    if k > gamma.n {
        return Err(Error::Unsupported(format!("k = {k} exceeds vmax = {}", gamma.n)));
    }
    let base = (1..=gamma.n)
        .map(|i| match i.cmp(&k) {
            std::cmp::Ordering::Less => BaseVar::Killed,
            std::cmp::Ordering::Equal => BaseVar::Inverted,
            std::cmp::Ordering::Greater => BaseVar::Free,
        })
        .collect();
    let hopf = Arc::new(reduced_fp(gamma, base, format!("v{k}^-1 Gamma/I_{k} p={}", gamma.p)));
    let engine = CoactionEngine::new(hopf.clone(), 0)?;
    Ok(LocalizedHopfAlgebroid { k, hopf, engine })
}

impl LocalizedHopfAlgebroid {
    pub fn p(&self) -> u64 {
        self.hopf.p
    }

    /// The hopf axiom suite plus `η_R(v_k) = v_k`, which is what makes the
    /// inversion of `v_k` compatible with both units.
    pub fn check_axioms(&self, through: i64) -> Result<AxiomReport> {
        let mut report = self.hopf.check_axioms(through)?;
        let vk = Poly::variable(v_index(self.k), 2 * self.hopf.n, self.p());
        report.push(
            "eta_R(v_k) = v_k",
            format!("v{}", self.k),
            bp_degree(self.p(), self.k),
            self.hopf.right_unit[self.k - 1] == vk,
        );
        Ok(report)
    }

    /// `C` truncated at `v_k^{-floor}`.
    pub fn coefficients(&self, floor: i32) -> Result<RegionComodule<Fp>> {
        RegionComodule::localized(self.engine.clone(), self.k, floor)
    }
}

fn field_rank<C: Scalar>(m: &Matrix<C>) -> usize {
    let f = Matrix::from_rows((0..m.rows).map(|r| m.row(r).iter().map(|c| c.to_fp()).collect()).collect(), m.cols, m.p);
    rank_fp(&f)
}

fn hcat<C: Scalar>(a: &Matrix<C>, b: &Matrix<C>) -> Matrix<C> {
    let rows = (0..a.rows).map(|r| a.row(r).iter().chain(b.row(r)).cloned().collect()).collect();
    Matrix::from_rows(rows, a.cols + b.cols, a.p)
}

fn columns<C: Scalar>(cols: &[Vec<C>], rows: usize, p: u64) -> Matrix<C> {
    let mut m = Matrix::zero(rows, cols.len(), p);
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            m.set(i, j, x.clone());
        }
    }
    m
}

/// Rank of the map `Ext^{s,t}(M_small) → Ext^{s,t}(M_big)` induced by the
/// inclusion of truncations.
fn image_rank<C: Scalar>(small: &Truncation<C>, big: &Truncation<C>, s: usize, t: i64) -> Result<usize> {
    let engine = small.module.engine().clone();
    let ext = small.cobar.ext(s, t)?;
    let p = engine.p();
    let rows = big.cobar.dim(s, t);
    let mut cols = Vec::new();
    for rep in &ext.representatives {
        let mut v = zero_vec::<C>(rows, p);
        for (c, (keys, i)) in rep.iter().zip(small.cobar.basis(s, t)) {
            if Coeff::is_zero(c) {
                continue;
            }
            let dm = t - keys.iter().map(|b| engine.t_degree(b)).sum::<i64>();
            let e = small.module.point(dm, *i)?;
            let (_, j) =
                big.module.locate(&e)?.ok_or_else(|| Error::Unsupported("truncations are not nested".into()))?;
            let r = big
                .cobar
                .cell_index(s, t, &(keys.clone(), j))
                .ok_or_else(|| Error::Unsupported("cell missing from the larger complex".into()))?;
            v[r] = Coeff::add(&v[r], c);
        }
        cols.push(v);
    }
    let img = columns(&cols, rows, p);
    let bnd = match s {
        0 => Matrix::<C>::zero(rows, 0, p),
        _ => big.cobar.d(s - 1, t).cloned().unwrap_or_else(|| Matrix::zero(rows, 0, p)),
    };
    Ok(field_rank(&hcat(&img, &bnd)) - field_rank(&bnd))
}

struct Truncation<C: Scalar> {
    module: Arc<RegionComodule<C>>,
    cobar: CobarComplex<C>,
}

/// Colimit Ext with coefficients in `v_k^{-1}A/I_k` over `engine`, read off
/// the image from floor `floor` to floor `floor + gap`.
pub struct Telescope<C: Scalar> {
    engine: Arc<CoactionEngine<C>>,
    k: usize,
    smax: usize,
    tmin: i64,
    tmax: i64,
    complexes: BTreeMap<i32, Truncation<C>>,
}

impl<C: Scalar + 'static> Telescope<C> {
    pub fn new(engine: Arc<CoactionEngine<C>>, k: usize, smax: usize, tmin: i64, tmax: i64) -> Self {
        Telescope { engine, k, smax, tmin, tmax, complexes: BTreeMap::new() }
    }

    fn complex(&mut self, floor: i32) -> Result<()> {
        if !self.complexes.contains_key(&floor) {
            let module = Arc::new(RegionComodule::localized(self.engine.clone(), self.k, floor)?);
            let cobar = CobarComplex::build(module.clone(), self.smax, self.tmin, self.tmax)?;
            self.complexes.insert(floor, Truncation { module, cobar });
        }
        Ok(())
    }

    pub fn groups(&mut self, floor: i32, gap: i32) -> Result<BTreeMap<(usize, i64), FGPGroup>> {
        self.complex(floor)?;
        self.complex(floor + gap)?;
        let small = &self.complexes[&floor];
        let big = &self.complexes[&(floor + gap)];
        let p = self.engine.p();
        let mut out = BTreeMap::new();
        for s in 0..=self.smax {
            for t in self.tmin..=self.tmax {
                out.insert((s, t), FGPGroup::elementary(p, image_rank(small, big, s, t)?));
            }
        }
        Ok(out)
    }

    /// Groups at `(floor, gap)`, checked against `(floor + 1, gap)` and
    /// `(floor, gap + 1)`.
    pub fn certified(&mut self, floor: i32, gap: i32) -> Result<BTreeMap<(usize, i64), FGPGroup>> {
        let a = self.groups(floor, gap)?;
        for (f, g) in [(floor + 1, gap), (floor, gap + 1)] {
            let b = self.groups(f, g)?;
            if let Some(((s, t), x)) = a.iter().find(|(key, x)| b.get(*key) != Some(*x)) {
                return Err(Error::PaddingUnstable(format!(
                    "Ext^({s},{t}) is {x} at floor {floor} gap {gap} but {} at floor {f} gap {g}",
                    b[&(*s, *t)]
                )));
            }
        }
        Ok(a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub s: usize,
    pub t: i64,
    pub gamma: FGPGroup,
    pub sigma: FGPGroup,
}

impl ComparisonRow {
    pub fn isomorphic(&self) -> bool {
        self.gamma == self.sigma
    }
}

/// `Ext_Γ(A/I_k, v_k^{-1}A/I_k)` against `Ext_Σ(C, C)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub p: u64,
    pub k: usize,
    pub efloor: i32,
    pub floor: i32,
    pub gap: i32,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn isomorphic(&self) -> bool {
        self.rows.iter().all(ComparisonRow::isomorphic)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "# change of rings p={} k={} efloor={} floor={} gap={}\ns\tt\tgamma\tsigma\tverdict\n",
            self.p, self.k, self.efloor, self.floor, self.gap
        );
        for r in &self.rows {
            let verdict = if r.isomorphic() { "isomorphic" } else { "DIFFERENT" };
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{verdict}", r.s, r.t, r.gamma, r.sigma);
        }
        out
    }
}

/// Compares the two sides for `s ≤ smax`, `t` in `window`. The truncation
/// floor is `efloor` below the bottom of the window, and classes must survive
/// `efloor` further steps.
///
/// Over `Γ` the coefficients are a region comodule for the engine that kills
/// `I_k` with Z_(p) arithmetic; over `Σ` they are `C` itself with the
/// structure maps reduced mod p and `v_k` inverted.
pub fn verify_change_of_rings(
    gamma: Arc<BpHopf>,
    k: usize,
    smax: usize,
    window: (i64, i64),
    efloor: i32,
) -> Result<ComparisonReport> {
    if efloor < 1 {
        return Err(Error::WindowTooSmall(format!("efloor {efloor} leaves no room to certify")));
    }
    let p = gamma.p;
    let (tmin, tmax) = window;
    let q = bp_degree(p, k);
    let floor = efloor + ((-tmin).max(0) + q - 1).div_euclid(q) as i32;
    let gap = efloor;
    let deepest = floor + gap + 1;
    let need = tmax + deepest as i64 * q;
    if need > gamma.degree_bound {
        return Err(Error::WindowTooSmall(format!(
            "window {tmin}..{tmax} at efloor {efloor} needs degree bound {need}, have {}",
            gamma.degree_bound
        )));
    }
    let sigma = build_localized(&gamma, k)?;
    let g_engine = CoactionEngine::<S>::new(gamma, k)?;
    let mut g_side = Telescope::new(g_engine, k, smax, tmin, tmax);
    let mut s_side = Telescope::new(sigma.engine.clone(), k, smax, tmin, tmax);
    let a = g_side.certified(floor, gap)?;
    let b = s_side.certified(floor, gap)?;
    let rows =
        a.iter().map(|(&(s, t), g)| ComparisonRow { s, t, gamma: g.clone(), sigma: b[&(s, t)].clone() }).collect();
    Ok(ComparisonReport { p, k, efloor, floor, gap, rows })
}

/// `(B, Γ_B)` for `B = E(n)_*`, presented modulo `I_n`: base `F_p[v_n^{±1}]`,
/// `Σ_B = F_p[v_n^{±1}][t_1, …]` modulo the relations `η_R(v_j) = 0` for
/// `j > n`.
#[derive(Clone, Debug)]
pub struct InducedHopfAlgebroid {
    pub base: LandweberAlgebra,
    pub n: usize,
    pub hopf: Arc<FpHopf>,
    /// `η_R(v_{n+i})` in the one-block layout, `i = 1, …`.
    pub relations: Vec<Poly<Fp>>,
}

pub fn induced_hopf_algebroid(gamma: &BpHopf, n: usize) -> Result<InducedHopfAlgebroid> {
    let base = LandweberAlgebra::johnson_wilson(gamma.p, gamma.n, n)?;
    let vars = (1..=gamma.n).map(|i| if i == n { BaseVar::Inverted } else { BaseVar::Killed }).collect();
    let hopf = reduced_fp(gamma, vars, format!("{} Gamma_B/I_{n} p={}", base.name, gamma.p));
    let relations = (n + 1..=gamma.n)
        .filter(|&j| bp_degree(gamma.p, j) <= gamma.degree_bound)
        .map(|j| hopf.right_unit[j - 1].clone())
        .collect();
    Ok(InducedHopfAlgebroid { base, n, hopf: Arc::new(hopf), relations })
}

impl InducedHopfAlgebroid {
    fn relation_degree(&self, i: usize) -> i64 {
        bp_degree(self.hopf.p, self.n + i + 1)
    }

    /// Variables that survive in `blocks` blocks: `v_n` and every t.
    fn live_vars(&self, blocks: usize) -> (Vec<usize>, Vec<i64>) {
        let h = &self.hopf;
        let mut idx = vec![v_index(self.n)];
        let mut deg = vec![bp_degree(h.p, self.n)];
        for b in 1..=blocks {
            for j in 1..=h.n {
                idx.push(t_index(h.n, b, j));
                deg.push(bp_degree(h.p, j));
            }
        }
        (idx, deg)
    }

    fn basis(&self, blocks: usize, d: i64) -> Vec<Exponents> {
        let (idx, deg) = self.live_vars(blocks);
        let nv = self.hopf.n * (blocks + 1);
        monomials_of_degree(&deg, d)
            .into_iter()
            .map(|m| {
                let mut e = vec![0; nv];
                for (a, &i) in m.iter().zip(&idx) {
                    e[i] = *a;
                }
                e
            })
            .collect()
    }

    /// The relation ideal in `blocks` blocks: every relation in every block.
    fn ideal_generators(&self, blocks: usize) -> Vec<(Poly<Fp>, i64)> {
        let mut out = Vec::new();
        for b in 0..blocks {
            for (i, r) in self.relations.iter().enumerate() {
                out.push((self.hopf.shift(r, 1, blocks, b), self.relation_degree(i)));
            }
        }
        out
    }

    /// `v_n^j f` lies in the relation ideal for some `j ≤ 2` (the ideal is
    /// tested after inverting `v_n`).
    pub fn in_ideal(&self, f: &Poly<Fp>, blocks: usize, d: i64) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        let p = self.hopf.p;
        let q = bp_degree(p, self.n);
        let nv = self.hopf.n * (blocks + 1);
        let gens = self.ideal_generators(blocks);
        for j in 0..=2i32 {
            let dd = d + j as i64 * q;
            let basis = self.basis(blocks, dd);
            let index: std::collections::HashMap<&Exponents, usize> =
                basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
            let mut cols: Vec<Vec<Fp>> = Vec::new();
            for (g, gd) in &gens {
                for mu in self.basis(blocks, dd - gd) {
                    let prod = g.mul_monomial(&mu, &Fp::new(1, p));
                    let mut col = zero_vec::<Fp>(basis.len(), p);
                    for (e, c) in &prod.terms {
                        let Some(&i) = index.get(e) else {
                            return Err(Error::GradingMismatch("relation leaves the live variables".into()));
                        };
                        col[i] = Coeff::add(&col[i], c);
                    }
                    cols.push(col);
                }
            }
            let mut shift = vec![0; nv];
            shift[v_index(self.n)] = j;
            let g = f.mul_monomial(&shift, &Fp::new(1, p));
            let mut target = zero_vec::<Fp>(basis.len(), p);
            for (e, c) in &g.terms {
                let Some(&i) = index.get(e) else {
                    return Err(Error::GradingMismatch("element leaves the live variables".into()));
                };
                target[i] = Coeff::add(&target[i], c);
            }
            let a = columns(&cols, basis.len(), p);
            let mut with = cols.clone();
            with.push(target);
            let b = columns(&with, basis.len(), p);
            if rank_fp(&a) == rank_fp(&b) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Hopf axioms on the reduced presentation, plus compatibility of `ε`,
    /// `Δ` and `χ` with the relations and `η_R(v_n) = v_n`.
    pub fn check_axioms(&self, through: i64) -> Result<AxiomReport> {
        let h = &self.hopf;
        let mut report =
            h.check_axioms_with(through, |a, b, blocks, d| Ok(a == b || self.in_ideal(&a.sub(b), blocks, d)?))?;
        let vn = Poly::variable(v_index(self.n), 2 * h.n, h.p);
        report.push("eta_R(v_n) = v_n", format!("v{}", self.n), bp_degree(h.p, self.n), h.right_unit[self.n - 1] == vn);
        let mut counit: Vec<Poly<Fp>> = (0..h.n).map(|i| Poly::variable(i, h.n, h.p)).collect();
        counit.extend((0..h.n).map(|_| Poly::zero()));
        for (i, r) in self.relations.iter().enumerate() {
            let d = self.relation_degree(i);
            if d > through {
                continue;
            }
            let name = format!("eta_R(v{})", self.n + i + 1);
            let eps = h.apply_map(r, &counit, 0)?;
            report.push("eps(relation) = 0", name.clone(), d, eps.is_zero());
            let delta = h.apply_map(r, &h.diagonal_map(), 2)?;
            report.push("Delta(relation) in ideal", name.clone(), d, self.in_ideal(&delta, 2, d)?);
            let chi = h.apply_map(r, &h.conjugation_map(), 1)?;
            report.push("chi(relation) in ideal", name.clone(), d, self.in_ideal(&chi, 1, d)?);
        }
        Ok(report)
    }
}

/// Degreewise description of `B ⊗_A M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseChangePieces {
    /// `M` is free on these generators, so `B ⊗_A M` is `B`-free on them.
    Free(Vec<(String, i64)>),
    /// Rank in each degree of the window (over F_p when `p` acts by zero,
    /// otherwise the rank of the free part).
    Degreewise(BTreeMap<i64, usize>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaseChange {
    pub algebra: String,
    pub module: String,
    pub over_field: bool,
    pub pieces: BaseChangePieces,
}

impl BaseChange {
    pub fn is_zero(&self) -> bool {
        match &self.pieces {
            BaseChangePieces::Free(g) => g.is_empty(),
            BaseChangePieces::Degreewise(d) => d.values().all(|&r| r == 0),
        }
    }

    pub fn dims(&self) -> Option<&BTreeMap<i64, usize>> {
        match &self.pieces {
            BaseChangePieces::Degreewise(d) => Some(d),
            BaseChangePieces::Free(_) => None,
        }
    }
}

/// `M_e` modulo the images of the killed generators of `B` (and `p` when `B`
/// kills it): the relation columns in piece coordinates.
fn killed_relations(m: &FPComodule, b: &LandweberAlgebra, e: i64) -> Result<Matrix<S>> {
    let p = m.engine_ref().p();
    let dim = m.piece(e)?.dim();
    let n = b.vmax();
    let mut cols = Vec::new();
    for (j, var) in b.vars.iter().enumerate() {
        if *var != BaseVar::Killed {
            continue;
        }
        let src = e - bp_degree(p, j + 1);
        if src < m.bottom_degree() {
            continue;
        }
        let mut alpha = vec![0; n];
        alpha[j] = 1;
        for i in 0..m.piece(src)?.dim() {
            let mut x = zero_vec::<S>(m.piece(src)?.dim(), p);
            x[i] = S::from_int(1, p);
            cols.push(m.act(&alpha, src, &x)?);
        }
    }
    Ok(columns(&cols, dim, p))
}

fn rank_of(m: &Matrix<S>, field: bool) -> usize {
    if field {
        field_rank(m)
    } else {
        smith_normal_form(m).rank()
    }
}

/// Rank of `v^α : Q_a → Q_{a+|α|}` on the quotients by killed generators.
fn quotient_map_rank(m: &FPComodule, b: &LandweberAlgebra, alpha: &[i32], a: i64, field: bool) -> Result<usize> {
    let p = m.engine_ref().p();
    let target = a + m.engine_ref().v_degree(alpha);
    let rel = killed_relations(m, b, target)?;
    if a < m.bottom_degree() {
        return Ok(0);
    }
    let mut cols = Vec::new();
    let da = m.piece(a)?.dim();
    for i in 0..da {
        let mut x = zero_vec::<S>(da, p);
        x[i] = S::from_int(1, p);
        cols.push(m.act(alpha, a, &x)?);
    }
    let img = columns(&cols, rel.rows, p);
    Ok(rank_of(&hcat(&img, &rel), field) - rank_of(&rel, field))
}

/// `Φ_* M = B ⊗_A M` degreewise on `window`. With `v_m` inverted in `B` the
/// degree-`d` piece is the colimit along `v_m`, read off as the rank of
/// `v_m^pad` out of degree `d + pad·|v_m|` and certified at `pad + 1`.
pub fn phi_star(m: &FPComodule, b: &LandweberAlgebra, window: (i64, i64), pad: i32) -> Result<BaseChange> {
    let p = m.engine_ref().p();
    if b.p != p || b.vmax() != m.engine_ref().n() {
        return Err(Error::GradingMismatch(format!("{} does not match {}", b.name, m.name)));
    }
    let mk = |pieces, over_field| BaseChange { algebra: b.name.clone(), module: m.name.clone(), over_field, pieces };
    if m.relations.is_empty() && !b.p_killed && !b.vars.contains(&BaseVar::Killed) {
        return Ok(mk(BaseChangePieces::Free(m.gens.clone()), false));
    }
    let field = match m.kind()? {
        ModuleKind::Fp | ModuleKind::Zero => true,
        ModuleKind::Free => b.p_killed,
        ModuleKind::Mixed => return Err(Error::Unsupported(format!("{}: mixed torsion", m.name))),
    };
    let inverted: Vec<usize> =
        b.vars.iter().enumerate().filter(|(_, v)| **v == BaseVar::Inverted).map(|(i, _)| i).collect();
    if inverted.len() > 1 {
        return Err(Error::Unsupported(format!("{}: more than one inverted generator", b.name)));
    }
    let n = b.vmax();
    let mut dims = BTreeMap::new();
    for d in window.0..=window.1 {
        let r = match inverted.first() {
            None => {
                if d < m.bottom_degree() {
                    0
                } else {
                    let rel = killed_relations(m, b, d)?;
                    rel.rows - rank_of(&rel, field)
                }
            }
            Some(&j) => {
                let q = bp_degree(p, j + 1);
                let rank_at = |f: i32, g: i32| -> Result<usize> {
                    let mut alpha = vec![0; n];
                    alpha[j] = g;
                    quotient_map_rank(m, b, &alpha, d + f as i64 * q, field)
                };
                let r0 = rank_at(pad, pad)?;
                let r1 = rank_at(pad + 1, pad)?;
                let r2 = rank_at(pad, pad + 1)?;
                if r0 != r1 {
                    return Err(Error::InfiniteGradedPiece(format!(
                        "{} (x) {} in degree {d}: rank grows from {r0} to {r1} with the padding",
                        b.name, m.name
                    )));
                }
                if r0 != r2 {
                    return Err(Error::PaddingUnstable(format!(
                        "{} (x) {} in degree {d}: {r0} vs {r2} after one more v{}",
                        b.name,
                        m.name,
                        j + 1
                    )));
                }
                r0
            }
        };
        dims.insert(d, r);
    }
    Ok(mk(BaseChangePieces::Degreewise(dims), field))
}

/// `B ⊗_A R` for a lattice region: points with every generator killed by `B`
/// at exponent zero.
fn region_base_change(
    region: &Region,
    shift: i64,
    b: &LandweberAlgebra,
    window: (i64, i64),
) -> Result<BTreeMap<i64, usize>> {
    let p = b.p;
    let n = b.vmax();
    let iv = &region.intervals;
    let mut free_vars = Vec::new();
    let mut unbounded = 0;
    for j in 1..=n {
        let allowed = match b.vars[j - 1] {
            BaseVar::Killed => {
                if !iv[j].contains(0) {
                    return Ok((window.0..=window.1).map(|d| (d, 0)).collect());
                }
                continue;
            }
            _ => iv[j],
        };
        if allowed.is_empty() {
            return Ok((window.0..=window.1).map(|d| (d, 0)).collect());
        }
        if allowed.lo.is_none() || allowed.hi.is_none() {
            unbounded += 1;
        }
        free_vars.push((j, allowed));
    }
    if unbounded > 1 {
        return Err(Error::InfiniteGradedPiece(format!("{} (x) {region}", b.name)));
    }
    let mut out = BTreeMap::new();
    for d in window.0..=window.1 {
        let mut count = 0usize;
        // Enumerate the bounded variables; the unbounded one (if any) is then
        // determined by the degree.
        let bounded: Vec<_> = free_vars.iter().filter(|(_, i)| i.lo.is_some() && i.hi.is_some()).collect();
        let open: Vec<_> = free_vars.iter().filter(|(_, i)| i.lo.is_none() || i.hi.is_none()).collect();
        let mut stack = vec![(0usize, d - shift)];
        while let Some((pos, rest)) = stack.pop() {
            if pos == bounded.len() {
                match open.first() {
                    None => count += (rest == 0) as usize,
                    Some((j, i)) => {
                        let q = bp_degree(p, *j);
                        if rest.rem_euclid(q) == 0 && i.contains((rest / q) as i32) {
                            count += 1;
                        }
                    }
                }
                continue;
            }
            let (j, i) = bounded[pos];
            let q = bp_degree(p, *j);
            for e in i.lo.unwrap()..i.hi.unwrap() {
                stack.push((pos + 1, rest - e as i64 * q));
            }
        }
        out.insert(d, count);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub module: String,
    pub n: usize,
    pub localized: String,
    /// Degree, rank of `B ⊗ M`, rank of `B ⊗ L_n M`.
    pub rows: Vec<(i64, usize, usize)>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|(_, a, b)| a == b)
    }
}

/// `B ⊗_A M → B ⊗_A L_n M` for `B = E(n)_*`, compared degreewise by rank.
pub fn verify_equivalence_unit(
    m: &Arc<FPComodule>,
    n: usize,
    window: (i64, i64),
    pad: i32,
    floor: i32,
) -> Result<EquivalenceReport> {
    let b = LandweberAlgebra::johnson_wilson(m.engine_ref().p(), m.engine_ref().n(), n)?;
    let left = phi_star(m, &b, window, pad)?;
    let l = localize(&LocalizeInput::Finite(m.clone()), n, floor)?;
    let localized = l.describe();
    let right: BTreeMap<i64, usize> = match &l {
        Localized::Zero { .. } => (window.0..=window.1).map(|d| (d, 0)).collect(),
        Localized::Unchanged { .. } => match &left.pieces {
            BaseChangePieces::Degreewise(d) => d.clone(),
            BaseChangePieces::Free(_) => BTreeMap::new(),
        },
        Localized::Region { region, shift, .. } => region_base_change(region, *shift, &b, window)?,
    };
    let rows = match &left.pieces {
        BaseChangePieces::Degreewise(d) => {
            d.iter().map(|(&deg, &r)| (deg, r, right.get(&deg).copied().unwrap_or(0))).collect()
        }
        BaseChangePieces::Free(_) => Vec::new(),
    };
    Ok(EquivalenceReport { module: m.name.clone(), n, localized, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodule::FPComodule;

    fn gamma(p: u64, vmax: usize, d: i64) -> Arc<BpHopf> {
        Arc::new(BpHopf::generate(p, vmax, d).unwrap())
    }

    #[test]
    fn localized_axioms() {
        for (p, k) in [(3, 1), (2, 1), (3, 2)] {
            let g = gamma(p, 3, 40);
            let loc = build_localized(&g, k).unwrap();
            let r = loc.check_axioms(40).unwrap();
            assert!(r.passed(), "{:?}", r.failures());
            assert_eq!(loc.hopf.base[k - 1], BaseVar::Inverted);
        }
        assert!(matches!(build_localized(&gamma(2, 2, 8), 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn induced_axioms() {
        for (p, vmax, d) in [(2, 3, 30), (3, 3, 40), (3, 3, 56)] {
            let g = gamma(p, vmax, d);
            for n in [1, 2] {
                let ind = induced_hopf_algebroid(&g, n).unwrap();
                let r = ind.check_axioms(d).unwrap();
                assert!(r.passed(), "p={p} n={n} {:?}", r.failures());
                let fits = (0..ind.relations.len()).any(|i| ind.relation_degree(i) <= d);
                assert_eq!(fits, r.checks.iter().any(|c| c.axiom == "Delta(relation) in ideal"));
            }
        }
        // Without the relations the quotient presentation is not a Hopf
        // algebroid: coassociativity of t3 fails at p = 2, n = 1.
        let mut bare = induced_hopf_algebroid(&gamma(2, 3, 30), 1).unwrap();
        bare.relations.clear();
        assert!(!bare.check_axioms(30).unwrap().passed());
    }

    #[test]
    fn phi_star_examples() {
        let g = gamma(3, 2, 40);
        let e = CoactionEngine::new(g, 0).unwrap();
        let b = LandweberAlgebra::johnson_wilson(3, 2, 1).unwrap();
        let a = FPComodule::unit(e.clone()).unwrap();
        let top = LandweberAlgebra::johnson_wilson(3, 2, 2).unwrap();
        assert_eq!(phi_star(&a, &top, (0, 8), 2).unwrap().pieces, BaseChangePieces::Free(a.gens.clone()));
        let dims = phi_star(&a, &b, (-8, 8), 2).unwrap();
        assert!(!dims.over_field);
        for (d, r) in dims.dims().unwrap() {
            assert_eq!(*r, (d % 4 == 0) as usize, "degree {d}");
        }
        let ai2 = FPComodule::a_mod_i(e.clone(), 2).unwrap();
        assert!(phi_star(&ai2, &b, (-8, 8), 2).unwrap().is_zero());
        let ai1 = FPComodule::a_mod_i(e, 1).unwrap();
        let r = phi_star(&ai1, &b, (-8, 8), 2).unwrap();
        let dims = r.dims().unwrap();
        for d in -8..=8 {
            assert_eq!(dims[&d], (d % 4 == 0) as usize, "degree {d}");
        }
    }

    #[test]
    fn phi_star_detects_infinite_pieces() {
        let g = gamma(2, 3, 30);
        let e = CoactionEngine::new(g, 0).unwrap();
        let b = LandweberAlgebra::johnson_wilson(2, 3, 2).unwrap();
        let ai1 = FPComodule::a_mod_i(e, 1).unwrap();
        assert!(matches!(phi_star(&ai1, &b, (0, 0), 2), Err(Error::InfiniteGradedPiece(_))));
    }

    #[test]
    fn equivalence_unit() {
        let g = gamma(3, 2, 40);
        let e = CoactionEngine::new(g, 0).unwrap();
        for k in [1, 2] {
            let m = Arc::new(FPComodule::a_mod_i(e.clone(), k).unwrap());
            let r = verify_equivalence_unit(&m, 1, (-8, 8), 2, 3).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn change_of_rings_small() {
        let g = gamma(3, 2, 40);
        let r = verify_change_of_rings(g, 1, 1, (-4, 4), 2).unwrap();
        assert!(r.isomorphic(), "{}", r.to_tsv());
        for row in &r.rows {
            let expect = (row.t % 4 == 0) as usize;
            assert_eq!(row.gamma, FGPGroup::elementary(3, expect), "({}, {})", row.s, row.t);
        }
    }
}
