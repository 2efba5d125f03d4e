//! The torsion theories `T_n`, the localization `L_n` and its derived
//! functors.
//!
//! Derived functors are local cohomology with respect to `I_{n+1}`,
//! evaluated one lattice point at a time: for a region module the Čech
//! complex at a fixed exponent vector has a component `F_p` or `0` for each
//! set of inverted variables, so its cohomology is a finite rank
//! computation. `p` is the variable of index 0 (degree 0).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::comodule::fp::{FPComodule, InvariantIdeal};
use crate::comodule::morphism::{is_injective, is_surjective, FPMorphism};
use crate::comodule::{kernel, CoactionEngine, Comodule, Interval, ModuleKind, Region, RegionComodule};
use crate::error::{Error, Result};
use crate::gradedpoly::{bp_degree, Coeff, Exponents};
use crate::hopf::AxiomReport;
use crate::landweber::{is_vn_torsion, landweber_filtration, TorsionCertificate};
use crate::scalar::{homology, rank_fp, Fp, LocalRing, Matrix, Order, PLocalScalar};

type S = PLocalScalar;

/// `α ∈ R` localized at the variables of `set` (a bitmask over `vars`):
/// a variable acting nilpotently kills the localization, any other gets its
/// interval widened to all of Z.
fn in_localized(region: &Region, vars: &[usize], set: u32, alpha: &[i32]) -> bool {
    for (bit, &v) in vars.iter().enumerate() {
        if set & (1 << bit) != 0 && region.intervals[v].hi.is_some() {
            return false;
        }
    }
    alpha.iter().enumerate().all(|(i, &e)| {
        let widened = vars.iter().enumerate().any(|(bit, &v)| v == i && set & (1 << bit) != 0);
        widened || region.intervals[i].contains(e)
    })
}

/// Ranks of a cochain complex on subsets of `0..m` with the given components
/// present; `present[S]` says whether the component at `S` is `F_p`. The map
/// `S → S ∪ {j}` is `±1` with the Koszul sign, restricted to present
/// components. Returns `h^i` for `i = 0..=m`.
fn subset_cohomology(m: usize, present: &dyn Fn(u32) -> bool, p: u64, skip_empty: bool) -> Vec<usize> {
    let subsets_of = |i: usize| -> Vec<u32> {
        (0u32..(1 << m)).filter(|s| s.count_ones() as usize == i && present(*s) && !(skip_empty && *s == 0)).collect()
    };
    let layers: Vec<Vec<u32>> = (0..=m).map(subsets_of).collect();
    let mut ranks = vec![0usize; m + 1];
    for i in 0..m {
        let (src, dst) = (&layers[i], &layers[i + 1]);
        if src.is_empty() || dst.is_empty() {
            continue;
        }
        let mut mat = Matrix::<Fp>::zero(dst.len(), src.len(), p);
        for (c, &s) in src.iter().enumerate() {
            for j in 0..m {
                if s & (1 << j) != 0 {
                    continue;
                }
                let t = s | (1 << j);
                if let Some(r) = dst.iter().position(|&x| x == t) {
                    let below = (s & ((1 << j) - 1)).count_ones();
                    let v = if below % 2 == 0 { Fp::new(1, p) } else { Fp::from_signed(-1, p) };
                    mat.set(r, c, v);
                }
            }
        }
        ranks[i] = rank_fp(&mat);
    }
    (0..=m).map(|i| layers[i].len() - ranks[i] - if i > 0 { ranks[i - 1] } else { 0 }).collect()
}

/// Inputs for a pointwise local cohomology computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCohomologyRequest {
    pub region: Region,
    /// Indices of the ideal generators among the region's variables.
    pub ideal: Vec<usize>,
    /// Inclusive exponent box per variable.
    pub exponent_box: Vec<(i32, i32)>,
    /// Degree of each variable (for graded dimensions).
    pub degrees: Vec<i64>,
    pub prime: u64,
}

impl LocalCohomologyRequest {
    /// BP-style request: variables `p, v_1, …, v_vmax`, ideal `I_{n+1}`, box
    /// `[-e, e]` in every variable.
    pub fn bp(region: Region, prime: u64, n: usize, e: i32) -> Self {
        let vmax = region.nvars() - 1;
        let mut degrees = vec![0];
        degrees.extend((1..=vmax).map(|i| bp_degree(prime, i)));
        LocalCohomologyRequest {
            exponent_box: vec![(-e, e); vmax + 1],
            ideal: (0..=n.min(vmax)).collect(),
            region,
            degrees,
            prime,
        }
    }

    fn check(&self) -> Result<()> {
        if self.exponent_box.len() != self.region.nvars() || self.degrees.len() != self.region.nvars() {
            return Err(Error::GradingMismatch("box and region disagree".into()));
        }
        if self.exponent_box.iter().any(|(a, b)| a > b) {
            return Err(Error::WindowTooSmall("empty exponent box".into()));
        }
        for &v in &self.ideal {
            let iv = self.region.intervals[v];
            // On the ambient ring each generator is zero, a polynomial
            // variable or a unit; all three keep the sequence regular.
            let ok = iv == Interval::killed() || iv == Interval::nonneg() || iv == Interval::all();
            if !ok {
                return Err(Error::Unsupported(format!(
                    "variable {v} has interval {iv} on {}; not a ring",
                    self.region
                )));
            }
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Exponents> {
        let mut out = vec![Vec::new()];
        for &(a, b) in &self.exponent_box {
            let mut next = Vec::new();
            for pt in &out {
                for e in a..=b {
                    let mut q = pt.clone();
                    q.push(e);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    pub fn degree(&self, e: &[i32]) -> i64 {
        e.iter().zip(&self.degrees).map(|(&a, &d)| a as i64 * d).sum()
    }
}

/// `H^j_I(M)` for every `j`, as supports in the box plus fitted regions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCohomology {
    pub request: LocalCohomologyRequest,
    /// `support[j]`: lattice points where `H^j` is nonzero (always rank 1).
    pub support: Vec<Vec<Exponents>>,
}

impl LocalCohomology {
    pub fn fitted(&self, j: usize) -> Result<Option<Region>> {
        fit_region(&self.support[j], &self.request.exponent_box)
    }

    /// `degree → dimension` of `H^j` restricted to the box.
    pub fn graded_dims(&self, j: usize) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for e in &self.support[j] {
            *out.entry(self.request.degree(e)).or_insert(0) += 1;
        }
        out
    }
}

/// Čech cohomology of a region module at every lattice point of the box.
pub fn cech_local_cohomology(req: &LocalCohomologyRequest) -> Result<LocalCohomology> {
    req.check()?;
    cech_with_order(req, &req.ideal)
}

fn cech_with_order(req: &LocalCohomologyRequest, vars: &[usize]) -> Result<LocalCohomology> {
    let m = vars.len();
    let mut support = vec![Vec::new(); m + 1];
    for alpha in req.points() {
        let present = |s: u32| in_localized(&req.region, vars, s, &alpha);
        let h = subset_cohomology(m, &present, req.prime, false);
        for (j, &d) in h.iter().enumerate() {
            if d > 1 {
                return Err(Error::RegionFitFailure(format!("rank {d} at {alpha:?}")));
            }
            if d == 1 {
                support[j].push(alpha.clone());
            }
        }
    }
    Ok(LocalCohomology { request: req.clone(), support })
}

/// The same computation with the ideal generators permuted.
pub fn cech_permuted(req: &LocalCohomologyRequest, perm: &[usize]) -> Result<LocalCohomology> {
    req.check()?;
    let vars: Vec<usize> = perm.iter().map(|&i| req.ideal[i]).collect();
    cech_with_order(req, &vars)
}

/// Sections on the punctured spectrum: `H^0` of the Čech complex without its
/// degree-0 term. Used as a pointwise cross-check of `L_n` on quotients.
pub fn punctured_sections(req: &LocalCohomologyRequest) -> Result<Vec<Exponents>> {
    req.check()?;
    let m = req.ideal.len();
    let mut out = Vec::new();
    for alpha in req.points() {
        let present = |s: u32| in_localized(&req.region, &req.ideal, s, &alpha);
        let h = subset_cohomology(m, &present, req.prime, true);
        // With the empty set removed, the bottom layer is |S| = 1.
        if h.get(1).copied().unwrap_or(0) > 0 {
            out.push(alpha);
        }
    }
    Ok(out)
}

/// Smallest product of intervals agreeing with `points` on the box; touching
/// a face of the box is read as unbounded in that direction.
pub fn fit_region(points: &[Exponents], bx: &[(i32, i32)]) -> Result<Option<Region>> {
    if points.is_empty() {
        return Ok(None);
    }
    let mut intervals = Vec::with_capacity(bx.len());
    for (i, &(a, b)) in bx.iter().enumerate() {
        let lo = points.iter().map(|e| e[i]).min().unwrap();
        let hi = points.iter().map(|e| e[i]).max().unwrap();
        intervals.push(Interval::new(if lo == a { None } else { Some(lo) }, if hi == b { None } else { Some(hi + 1) }));
    }
    let region = Region::new(intervals);
    let set: std::collections::HashSet<&Exponents> = points.iter().collect();
    let mut bad = Vec::new();
    let mut cur = vec![Vec::new()];
    for &(a, b) in bx {
        cur = cur
            .into_iter()
            .flat_map(|pt: Vec<i32>| {
                (a..=b).map(move |e| {
                    let mut q = pt.clone();
                    q.push(e);
                    q
                })
            })
            .collect();
    }
    for pt in cur {
        if region.contains(&pt) != set.contains(&pt) {
            bad.push(pt);
            if bad.len() >= 5 {
                break;
            }
        }
    }
    if !bad.is_empty() {
        return Err(Error::RegionFitFailure(format!("{region} disagrees at {bad:?}")));
    }
    Ok(Some(region))
}

/// `L_n^i(A/I_k)` from the closed form: `A/(p, …, v_{k−1}, v_k^∞, …, v_n^∞)`
/// when `i = n − k > 0`, zero otherwise.
pub fn closed_form_derived(vmax: usize, k: usize, n: usize, i: usize) -> Option<Region> {
    if i == 0 || k > n || n - k != i {
        return None;
    }
    Some(Region::divided(vmax, k, n))
}

/// Closed form of `L_n(A/I_k)`.
pub fn closed_form_localization(vmax: usize, k: usize, n: usize) -> Option<Region> {
    match k.cmp(&n) {
        std::cmp::Ordering::Less => Some(Region::quotient(vmax, k)),
        std::cmp::Ordering::Equal => Some(Region::localized(vmax, k)),
        std::cmp::Ordering::Greater => None,
    }
}

/// Agreement of a computed region with a closed form, point by point.
pub fn agrees_pointwise(points: &[Exponents], expected: Option<&Region>, req: &LocalCohomologyRequest) -> bool {
    let set: std::collections::HashSet<&Exponents> = points.iter().collect();
    req.points().iter().all(|pt| expected.map_or(false, |r| r.contains(pt)) == set.contains(pt))
}

#[derive(Clone, Debug)]
pub struct DerivedLocalization {
    pub k: usize,
    pub n: usize,
    pub i: usize,
    /// `H^{i+1}_{I_{n+1}}(A/I_k)` in the box.
    pub cohomology: LocalCohomology,
    pub region: Option<Region>,
    pub closed_form: Option<Region>,
    pub matches: bool,
}

/// `L_n^i(A/I_k)` for `i > 0`, computed by the Čech method and compared with
/// the closed form on the box `[-e, e]^{vmax+1}`.
pub fn derived_localization(
    prime: u64,
    vmax: usize,
    k: usize,
    n: usize,
    i: usize,
    e: i32,
) -> Result<DerivedLocalization> {
    if i == 0 {
        return Err(Error::Unsupported("derived functors start at i = 1".into()));
    }
    if n > vmax || k > vmax + 1 {
        return Err(Error::Unsupported(format!("need n <= {vmax} and k <= {}", vmax + 1)));
    }
    if e < 1 {
        return Err(Error::WindowTooSmall(format!("exponent floor {e}")));
    }
    let req = LocalCohomologyRequest::bp(Region::quotient(vmax, k), prime, n, e);
    let lc = cech_local_cohomology(&req)?;
    let j = i + 1;
    let points: &[Exponents] = lc.support.get(j).map_or(&[], |v| v.as_slice());
    let region = fit_region(points, &req.exponent_box)?;
    let closed_form = closed_form_derived(vmax, k, n, i);
    let matches = agrees_pointwise(points, closed_form.as_ref(), &req);
    Ok(DerivedLocalization { k, n, i, cohomology: lc, region, closed_form, matches })
}

/// A comodule accepted by [`localize`] and [`is_local`].
#[derive(Clone)]
pub enum LocalizeInput {
    Finite(Arc<FPComodule>),
    Region(Arc<RegionComodule<S>>),
}

impl LocalizeInput {
    pub fn label(&self) -> String {
        match self {
            LocalizeInput::Finite(m) => m.name.clone(),
            LocalizeInput::Region(r) => r.label(),
        }
    }

    fn as_dyn(&self) -> &dyn Comodule<S> {
        match self {
            LocalizeInput::Finite(m) => &**m,
            LocalizeInput::Region(r) => &**r,
        }
    }
}

impl fmt::Debug for LocalizeInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalizeInput({})", self.label())
    }
}

/// Result of `L_n`.
#[derive(Clone, Debug)]
pub enum Localized {
    Zero {
        witness: TorsionCertificate,
    },
    /// The input is already `L_n`-local.
    Unchanged {
        input: LocalizeInput,
        reason: String,
    },
    /// `s^shift R`; the comodule is present when the region calculus supports
    /// a coaction on `R`.
    Region {
        region: Region,
        shift: i64,
        comodule: Option<Arc<RegionComodule<S>>>,
    },
}

impl Localized {
    pub fn describe(&self) -> String {
        match self {
            Localized::Zero { .. } => "0".into(),
            Localized::Unchanged { input, .. } => input.label(),
            Localized::Region { region, shift, .. } => {
                if *shift == 0 {
                    region.describe()
                } else {
                    format!("s^{shift} {}", region.describe())
                }
            }
        }
    }

    /// The region this result represents (for the quotient table).
    pub fn region(&self, vmax: usize) -> Option<Region> {
        match self {
            Localized::Zero { .. } => None,
            Localized::Region { region, .. } => Some(region.clone()),
            Localized::Unchanged { input: LocalizeInput::Region(r), .. } => Some(r.region.clone()),
            Localized::Unchanged { input: LocalizeInput::Finite(m), .. } => {
                // Only quotients A/I_k reach this branch.
                let f = landweber_filtration(m, usize::MAX).ok()?;
                Some(Region::quotient(vmax, f.steps.first()?.k))
            }
        }
    }
}

fn localized_region(engine: &Arc<CoactionEngine<S>>, k: usize, floor: i32, shift: i64) -> Result<Localized> {
    let n = engine.n();
    let region = Region::localized(n, k);
    let comodule = if k >= 1 {
        let e = CoactionEngine::new(engine.hopf.clone(), k)?;
        Some(Arc::new(RegionComodule::new(e, region.clone(), floor, shift)?))
    } else {
        None
    };
    Ok(Localized::Region { region, shift, comodule })
}

/// `L_n M` on the supported classes: quotients `A/I_k` (up to suspension),
/// `v_{n−1}`-torsion comodules with at most one `A/I_n` layer, and regions on
/// which some `v_m` (`m ≤ n`) is invertible.
pub fn localize(m: &LocalizeInput, n: usize, floor: i32) -> Result<Localized> {
    match m {
        LocalizeInput::Region(r) => {
            let inverted = (0..=n.min(r.region.nvars() - 1)).any(|i| r.region.intervals[i] == Interval::all());
            if inverted {
                return Ok(Localized::Unchanged {
                    input: m.clone(),
                    reason: format!("a generator of I_{} acts invertibly", n + 1),
                });
            }
            let vmax = r.region.nvars() - 1;
            for k in 0..=vmax + 1 {
                if r.region == Region::quotient(vmax, k) && r.shift == 0 {
                    return localize_quotient(r.engine(), k, n, floor, 0, m);
                }
            }
            Err(Error::UnsupportedClass(format!("L_{n} of {}", r.label())))
        }
        LocalizeInput::Finite(fm) => {
            let f = landweber_filtration(fm, usize::MAX)?;
            if f.steps.iter().all(|s| s.k > n) {
                let (_, witness) = is_vn_torsion(fm, n)?;
                return Ok(Localized::Zero { witness });
            }
            if f.steps.len() == 1 {
                let s = &f.steps[0];
                return localize_quotient(fm.engine_ref(), s.k, n, floor, s.shift, m);
            }
            let layers: Vec<_> = f.steps.iter().filter(|s| s.k <= n).collect();
            if layers.len() == 1 && layers[0].k == n {
                return localized_region(fm.engine_ref(), n, floor, layers[0].shift);
            }
            Err(Error::UnsupportedClass(format!("L_{n} of {} (filtration {:?})", fm.name, f.quotients())))
        }
    }
}

fn localize_quotient(
    engine: &Arc<CoactionEngine<S>>,
    k: usize,
    n: usize,
    floor: i32,
    shift: i64,
    input: &LocalizeInput,
) -> Result<Localized> {
    match k.cmp(&n) {
        std::cmp::Ordering::Less => {
            Ok(Localized::Unchanged { input: input.clone(), reason: format!("A/I_{k} with {k} < {n} is L_{n}-local") })
        }
        std::cmp::Ordering::Equal => localized_region(engine, n, floor, shift),
        std::cmp::Ordering::Greater => {
            Ok(Localized::Zero { witness: TorsionCertificate::Filtration(vec![(shift, k)]) })
        }
    }
}

/// Degreewise vanishing data behind [`is_local`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityCertificate {
    pub n: usize,
    pub window: (i64, i64),
    /// `Hom_Γ(s^d A/I_{n+1}, M)`: primitives of degree `d` killed by
    /// `I_{n+1}`.
    pub gamma_hom: BTreeMap<i64, usize>,
    /// `Hom_A(s^d A/I_{n+1}, M)` and `Ext^1_A`, from the Koszul complex.
    pub a_hom: BTreeMap<i64, usize>,
    pub a_ext1: BTreeMap<i64, usize>,
    pub local: bool,
    /// Γ-Hom and A-Hom vanish together.
    pub hom_agree: bool,
    pub witness: Option<String>,
}

/// Whether `M` is `L_n`-local, degreewise on the part of `window` where all
/// products by `I_{n+1}` stay inside the truncation.
pub fn is_local(m: &LocalizeInput, n: usize, window: (i64, i64)) -> Result<LocalityCertificate> {
    let dm = m.as_dyn();
    let engine = dm.engine();
    let p = engine.p();
    let vmax = engine.n();
    if n > vmax {
        return Err(Error::Unsupported(format!("n = {n} exceeds vmax = {vmax}")));
    }
    let xdeg: Vec<i64> = (0..=n).map(|j| if j == 0 { 0 } else { bp_degree(p, j) }).collect();
    let reach = xdeg.iter().rev().take(2).sum::<i64>();
    let lo = window.0.max(dm.bottom_degree());
    let hi = window.1.min(dm.top_degree() - reach);
    if lo > hi {
        return Err(Error::WindowTooSmall(format!(
            "window {:?} leaves nothing below {} for {}",
            window,
            dm.top_degree() - reach,
            m.label()
        )));
    }
    let mut cert = LocalityCertificate {
        n,
        window: (lo, hi),
        gamma_hom: BTreeMap::new(),
        a_hom: BTreeMap::new(),
        a_ext1: BTreeMap::new(),
        local: true,
        hom_agree: true,
        witness: None,
    };
    let field = match dm.kind()? {
        ModuleKind::Fp | ModuleKind::Zero => true,
        ModuleKind::Free => false,
        ModuleKind::Mixed => return Err(Error::Unsupported(format!("{}: mixed torsion", m.label()))),
    };
    let xmax = *xdeg.iter().max().unwrap();
    let pointwise = match m {
        LocalizeInput::Region(r) => Some(region_koszul(&r.region, n, r.floor, p, r.shift, (lo - xmax, hi))),
        LocalizeInput::Finite(_) => None,
    };
    for d in lo - xmax..=hi {
        let (h0, h1) = match &pointwise {
            Some(map) => map.get(&d).copied().unwrap_or((0, 0)),
            None => {
                let dim = dm.piece(d)?.dim();
                let all: Vec<Vec<S>> = (0..dim)
                    .map(|i| {
                        let mut v = vec![S::from_int(0, p); dim];
                        v[i] = S::from_int(1, p);
                        v
                    })
                    .collect();
                koszul_low(dm, d, &xdeg, field, &all)?
            }
        };
        if h1 > 0 || d >= lo {
            cert.a_ext1.insert(d, h1);
        }
        if h1 > 0 {
            cert.local = false;
            if cert.witness.is_none() {
                cert.witness = Some(format!("Ext^1_A(A/I_{}, M) nonzero in degree {d}", n + 1));
            }
        }
        if d < lo {
            continue;
        }
        let prims = match m {
            LocalizeInput::Region(r) => {
                let c = r.certified_primitives(d, d)?;
                c.by_degree.get(&d).cloned().unwrap_or_default()
            }
            LocalizeInput::Finite(f) => f.primitives_in_degree(d)?,
        };
        let gh = killed_by_ideal(dm, d, &prims, &xdeg, field)?;
        cert.gamma_hom.insert(d, gh.0);
        cert.a_hom.insert(d, h0);
        if gh.0 > 0 {
            cert.witness = Some(format!("Hom_Γ(s^{d} A/I_{}, M) contains {}", n + 1, gh.1.unwrap_or_default()));
        }
        if gh.0 > 0 || h0 > 0 {
            cert.local = false;
        }
        if (gh.0 == 0) != (h0 == 0) {
            cert.hom_agree = false;
        }
    }
    Ok(cert)
}

/// Koszul `H^0`, `H^1` of a region module at each lattice point of the box
/// `[-floor-1, floor+1]^{vmax+1}`, summed by degree of the base point. Every
/// point is evaluated on the untruncated region.
fn region_koszul(
    region: &Region,
    n: usize,
    floor: i32,
    p: u64,
    shift: i64,
    window: (i64, i64),
) -> BTreeMap<i64, (usize, usize)> {
    let mut req = LocalCohomologyRequest::bp(region.clone(), p, n, floor + 1);
    req.ideal = (0..=n).collect();
    let vars = req.ideal.clone();
    let mut out: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for beta in req.points() {
        let d = shift + req.degree(&beta);
        if d < window.0 || d > window.1 {
            continue;
        }
        let present = |s: u32| {
            let mut pt = beta.clone();
            for (bit, &v) in vars.iter().enumerate() {
                if s & (1 << bit) != 0 {
                    pt[v] += 1;
                }
            }
            region.contains(&pt)
        };
        let h = subset_cohomology(vars.len(), &present, p, false);
        let slot = out.entry(d).or_insert((0, 0));
        slot.0 += h[0];
        slot.1 += h.get(1).copied().unwrap_or(0);
    }
    out
}

fn times_x(m: &dyn Comodule<S>, j: usize, d: i64, v: &[S]) -> Result<Vec<S>> {
    let p = m.engine().p();
    if j == 0 {
        let mut y: Vec<S> = v.iter().map(|c| Coeff::mul(c, &S::from_int(p as i64, p))).collect();
        m.piece(d)?.canon(&mut y);
        return Ok(y);
    }
    let mut e = vec![0; m.engine().n()];
    e[j - 1] = 1;
    m.act(&e, d, v)
}

/// Dimension of the span of `basis` killed by every `x_j`, with a sample.
fn killed_by_ideal(
    m: &dyn Comodule<S>,
    d: i64,
    basis: &[Vec<S>],
    xdeg: &[i64],
    field: bool,
) -> Result<(usize, Option<String>)> {
    if basis.is_empty() {
        return Ok((0, None));
    }
    let p = m.engine().p();
    let mut rows: Vec<Vec<S>> = Vec::new();
    for (j, &dj) in xdeg.iter().enumerate() {
        if j == 0 && field {
            continue;
        }
        let imgs: Vec<Vec<S>> = basis.iter().map(|b| times_x(m, j, d, b)).collect::<Result<_>>()?;
        let len = m.piece(d + dj)?.dim();
        for r in 0..len {
            rows.push(imgs.iter().map(|v| v[r].clone()).collect());
        }
    }
    let mat = Matrix::from_rows(rows, basis.len(), p);
    let ker: Vec<Vec<S>> = if field {
        let fm = Matrix::from_rows(
            (0..mat.rows).map(|r| mat.row(r).iter().map(|c| c.reduce()).collect()).collect(),
            mat.cols,
            p,
        );
        crate::comodule::kernel_fp(&fm)
            .into_iter()
            .map(|v| v.into_iter().map(|c| S::from_int(c.value() as i64, p)).collect())
            .collect()
    } else {
        kernel(&mat)
    };
    let sample = ker.first().map(|k| {
        let mut x = vec![S::from_int(0, p); basis[0].len()];
        for (c, b) in k.iter().zip(basis) {
            crate::comodule::add_scaled(&mut x, b, c);
        }
        m.piece(d).map(|pc| crate::comodule::describe(&pc, &x)).unwrap_or_default()
    });
    Ok((ker.len(), sample))
}

/// `H^0` and `H^1` of the Koszul cochain complex `K(p, v_1, …, v_n; M)` at
/// base degree `d`.
fn koszul_low(m: &dyn Comodule<S>, d: i64, xdeg: &[i64], field: bool, unit: &[Vec<S>]) -> Result<(usize, usize)> {
    let p = m.engine().p();
    let r = xdeg.len();
    let dim0 = unit.len();
    let dims1: Vec<usize> = xdeg.iter().map(|&dj| m.piece(d + dj).map(|x| x.dim())).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let dims2: Vec<usize> =
        pairs.iter().map(|&(i, j)| m.piece(d + xdeg[i] + xdeg[j]).map(|x| x.dim())).collect::<Result<_>>()?;
    let off1: Vec<usize> = dims1
        .iter()
        .scan(0, |a, &x| {
            let o = *a;
            *a += x;
            Some(o)
        })
        .collect();
    let off2: Vec<usize> = dims2
        .iter()
        .scan(0, |a, &x| {
            let o = *a;
            *a += x;
            Some(o)
        })
        .collect();
    let n1: usize = dims1.iter().sum();
    let n2: usize = dims2.iter().sum();
    let mut d0 = Matrix::<S>::zero(n1, dim0, p);
    for (c, u) in unit.iter().enumerate() {
        for j in 0..r {
            for (k, v) in times_x(m, j, d, u)?.into_iter().enumerate() {
                d0.set(off1[j] + k, c, v);
            }
        }
    }
    let mut d1 = Matrix::<S>::zero(n2, n1, p);
    for j in 0..r {
        let dj = d + xdeg[j];
        for b in 0..dims1[j] {
            let mut u = vec![S::from_int(0, p); dims1[j]];
            u[b] = S::from_int(1, p);
            // (x_i m_j − x_j m_i) on the pair (i, j).
            for (pi, &(a, c)) in pairs.iter().enumerate() {
                let (other, sign) = if c == j {
                    (a, 1)
                } else if a == j {
                    (c, -1)
                } else {
                    continue;
                };
                let img = times_x(m, other, dj, &u)?;
                for (k, v) in img.into_iter().enumerate() {
                    let v = if sign == 1 { v } else { Coeff::neg(&v) };
                    d1.set(off2[pi] + k, off1[j] + b, v);
                }
            }
        }
    }
    let zero_in = Matrix::<S>::zero(dim0, 0, p);
    if field {
        let f = |mm: &Matrix<S>| {
            Matrix::from_rows(
                (0..mm.rows).map(|r| mm.row(r).iter().map(|c| c.reduce()).collect()).collect(),
                mm.cols,
                p,
            )
        };
        let r0 = rank_fp(&f(&d0));
        let r1 = rank_fp(&f(&d1));
        Ok((dim0 - r0, n1 - r1 - r0))
    } else {
        let h0 = homology(&zero_in, &d0)?.group.generator_count();
        let h1 = homology(&d0, &d1)?.group.generator_count();
        Ok((h0, h1))
    }
}

/// The hereditary torsion theory of `v_n`-torsion comodules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionTheoryTag {
    pub n: usize,
}

impl fmt::Display for TorsionTheoryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T_{}: all v_{}-torsion comodules", self.n, self.n)
    }
}

impl TorsionTheoryTag {
    pub fn contains(&self, m: &FPComodule) -> Result<bool> {
        Ok(is_vn_torsion(m, self.n)?.0)
    }
}

/// `0 → sub → mid → quot → 0` with explicit maps.
pub struct ShortExact {
    pub incl: FPMorphism,
    pub proj: FPMorphism,
}

impl ShortExact {
    pub fn new(incl: FPMorphism, proj: FPMorphism) -> Self {
        ShortExact { incl, proj }
    }

    pub fn sub(&self) -> &FPComodule {
        &self.incl.source
    }

    pub fn mid(&self) -> &FPComodule {
        &self.incl.target
    }

    pub fn quot(&self) -> &FPComodule {
        &self.proj.target
    }

    /// Comodule maps, injective then surjective, composite zero, and image
    /// equal to kernel (checked as additivity of degreewise sizes).
    pub fn verify(&self) -> Result<AxiomReport> {
        let top = self.mid().engine_ref().degree_bound();
        let mut r = AxiomReport::new(top);
        r.push("comodule map", "incl", 0, self.incl.check(top)?.passed());
        r.push("comodule map", "proj", 0, self.proj.check(top)?.passed());
        let lo = self.sub().bottom_degree().min(self.mid().bottom_degree()).min(self.quot().bottom_degree());
        for d in lo..=top {
            let a = self.incl.matrix(d)?;
            let b = self.proj.matrix(d)?;
            let (ps, pm, pq) = (self.sub().piece(d)?, self.mid().piece(d)?, self.quot().piece(d)?);
            r.push("injective", "incl", d, is_injective(&a, &ps.orders, &pm.orders));
            r.push("surjective", "proj", d, is_surjective(&b, &pq.orders));
            let mut comp_zero = true;
            for c in 0..a.cols {
                let mut y = b.apply(&a.column(c));
                pq.canon(&mut y);
                if y.iter().any(|x| !LocalRing::is_zero(x)) {
                    comp_zero = false;
                }
            }
            r.push("composite zero", "proj.incl", d, comp_zero);
            let size = |o: &[Order]| {
                o.iter()
                    .map(|x| match x {
                        Order::Infinite => (1usize, 0u32),
                        Order::PPower(e) => (0, *e),
                    })
                    .fold((0, 0), |acc, (f, t)| (acc.0 + f, acc.1 + t))
            };
            let (s1, s2, s3) = (size(&ps.orders), size(&pm.orders), size(&pq.orders));
            r.push("exact", "sizes", d, s1.0 + s3.0 == s2.0 && s1.1 + s3.1 == s2.1);
        }
        Ok(r)
    }

    /// Closure of `T` under this sequence: the middle term is in `T` exactly
    /// when both ends are.
    pub fn closure(&self, t: &TorsionTheoryTag) -> Result<(bool, bool, bool, bool)> {
        let (a, b, c) = (t.contains(self.sub())?, t.contains(self.mid())?, t.contains(self.quot())?);
        Ok((a, b, c, b == (a && c)))
    }
}

/// `I` as an invariant ideal, for building the torsion corpus.
pub fn ideal_from(p: u64, gens: &[(&str, Vec<(Exponents, i64)>)]) -> InvariantIdeal {
    let polys = gens
        .iter()
        .map(|(_, terms)| {
            let mut f = crate::gradedpoly::Poly::zero();
            for (e, c) in terms {
                f.add_term(e.clone(), S::from_int(*c, p));
            }
            f
        })
        .collect();
    InvariantIdeal::new(polys, gens.iter().map(|(n, _)| n.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::BpHopf;

    fn one_var(region: Interval) -> LocalCohomologyRequest {
        LocalCohomologyRequest {
            region: Region::new(vec![region]),
            ideal: vec![0],
            exponent_box: vec![(-4, 4)],
            degrees: vec![1],
            prime: 3,
        }
    }

    #[test]
    fn one_variable() {
        let lc = cech_local_cohomology(&one_var(Interval::nonneg())).unwrap();
        assert!(lc.support[0].is_empty());
        assert_eq!(lc.fitted(1).unwrap(), Some(Region::new(vec![Interval::negative()])));
    }

    #[test]
    fn derived_table() {
        for (k, n) in [(0usize, 1usize), (0, 2), (1, 2)] {
            for i in 1..=3 {
                let d = derived_localization(3, 3, k, n, i, 3).unwrap();
                assert!(d.matches, "k={k} n={n} i={i}: {:?}", d.region);
                assert_eq!(d.region, d.closed_form);
            }
        }
        let d = derived_localization(3, 3, 0, 1, 1, 3).unwrap();
        assert_eq!(d.region.unwrap().describe(), "A/(p^inf, v1^inf)");
        let d = derived_localization(3, 3, 1, 2, 1, 3).unwrap();
        assert_eq!(d.region.unwrap().describe(), "A/(p, v1^inf, v2^inf)");
    }

    #[test]
    fn permutation_invariance() {
        let req = LocalCohomologyRequest::bp(Region::quotient(3, 1), 2, 2, 2);
        let a = cech_local_cohomology(&req).unwrap();
        let b = cech_permuted(&req, &[2, 0, 1]).unwrap();
        assert_eq!(a.support, b.support);
    }

    #[test]
    fn punctured_sections_match_table() {
        for n in 0..=2 {
            for k in 0..=3 {
                let req = LocalCohomologyRequest::bp(Region::quotient(3, k), 3, n, 3);
                let pts = punctured_sections(&req).unwrap();
                assert!(agrees_pointwise(&pts, closed_form_localization(3, k, n).as_ref(), &req), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn localize_quotients() {
        let p = 3;
        let e = CoactionEngine::new(Arc::new(BpHopf::generate(p, 3, 40).unwrap()), 0).unwrap();
        for n in 1..=2 {
            for k in 0..=3 {
                let m = LocalizeInput::Finite(Arc::new(FPComodule::a_mod_i(e.clone(), k).unwrap()));
                let l = localize(&m, n, 3).unwrap();
                assert_eq!(l.region(3), closed_form_localization(3, k, n), "k={k} n={n}");
            }
        }
        let m = LocalizeInput::Finite(Arc::new(FPComodule::a_mod_i(e.clone(), 1).unwrap()));
        let Localized::Region { comodule: Some(r), .. } = localize(&m, 1, 3).unwrap() else { panic!() };
        let again = localize(&LocalizeInput::Region(r), 1, 3).unwrap();
        assert!(matches!(again, Localized::Unchanged { .. }));
    }

    #[test]
    fn locality() {
        let p = 3;
        let e = CoactionEngine::new(Arc::new(BpHopf::generate(p, 3, 40).unwrap()), 0).unwrap();
        let a2 = LocalizeInput::Finite(Arc::new(FPComodule::a_mod_i(e.clone(), 2).unwrap()));
        let c = is_local(&a2, 1, (0, 20)).unwrap();
        assert!(!c.local);
        assert!(c.gamma_hom[&0] == 1 && c.hom_agree);
        let a = LocalizeInput::Finite(Arc::new(FPComodule::a_mod_i(e.clone(), 0).unwrap()));
        let c = is_local(&a, 1, (0, 8)).unwrap();
        assert!(c.local, "{c:?}");
        let a1 = LocalizeInput::Finite(Arc::new(FPComodule::a_mod_i(e.clone(), 1).unwrap()));
        assert!(!is_local(&a1, 1, (0, 8)).unwrap().local);
        let k1 = CoactionEngine::new(e.hopf.clone(), 1).unwrap();
        let r = LocalizeInput::Region(Arc::new(RegionComodule::localized(k1, 1, 3).unwrap()));
        let c = is_local(&r, 1, (-8, 8)).unwrap();
        assert!(c.local, "{c:?}");
    }
}
