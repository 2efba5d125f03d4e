//! Invariant prime ideals, heights and Landweber filtrations.
//!
//! A finitely presented comodule is filtered by repeatedly choosing a
//! primitive of the current quotient, pushing it by powers of `p, v_1, …`
//! until its annihilator is some `I_k`, and dividing out the submodule it
//! generates.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::comodule::engine::CoactionEngine;
use crate::comodule::fp::{FPComodule, FreeElem};
use crate::comodule::morphism::{is_injective, FPMorphism};
use crate::comodule::region::{Interval, Region};
use crate::comodule::{in_column_span, rref_in_place, Comodule, ModuleKind, Scalar};
use crate::error::{Error, Result};
use crate::gradedpoly::{bp_degree, monomials_of_degree, Coeff, Exponents, Poly};
use crate::hopf::{AxiomReport, BaseVar};
use crate::scalar::{LocalRing, Matrix, Order, PLocalScalar};

type S = PLocalScalar;

/// An A-algebra presented by the behaviour of each generator: `p` is never
/// inverted, each `v_i` is free, killed or inverted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LandweberAlgebra {
    pub name: String,
    pub p: u64,
    pub p_killed: bool,
    pub vars: Vec<BaseVar>,
    pub declared_height: Option<usize>,
}

/// Height as computed within the truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Height {
    Exact(usize),
    /// `B/I_k B ≠ 0` for every `k ≤ N + 1` that can be formed.
    AtLeast(usize),
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Exact(n) => write!(f, "{n}"),
            Height::AtLeast(n) => write!(f, ">= {n} (cap)"),
        }
    }
}

impl LandweberAlgebra {
    /// `E(n)_* = Z_(p)[v_1, …, v_{n−1}, v_n^{±1}]`.
    pub fn johnson_wilson(p: u64, vmax: usize, n: usize) -> Result<Self> {
        if n == 0 || n > vmax {
            return Err(Error::Unsupported(format!("E({n}) needs 1 <= n <= {vmax}")));
        }
        let vars = (1..=vmax)
            .map(|i| match i.cmp(&n) {
                std::cmp::Ordering::Less => BaseVar::Free,
                std::cmp::Ordering::Equal => BaseVar::Inverted,
                std::cmp::Ordering::Greater => BaseVar::Killed,
            })
            .collect();
        Ok(LandweberAlgebra { name: format!("E({n})_*"), p, p_killed: false, vars, declared_height: Some(n) })
    }

    pub fn bp(p: u64, vmax: usize) -> Self {
        LandweberAlgebra {
            name: "BP_*".into(),
            p,
            p_killed: false,
            vars: vec![BaseVar::Free; vmax],
            declared_height: None,
        }
    }

    /// `v_k^{-1} A/I_k`.
    pub fn localized_quotient(p: u64, vmax: usize, k: usize) -> Result<Self> {
        if k == 0 || k > vmax {
            return Err(Error::Unsupported(format!("v_k^-1 A/I_k needs 1 <= k <= {vmax}")));
        }
        let vars = (1..=vmax)
            .map(|i| {
                if i < k {
                    BaseVar::Killed
                } else if i == k {
                    BaseVar::Inverted
                } else {
                    BaseVar::Free
                }
            })
            .collect();
        Ok(LandweberAlgebra { name: format!("v{k}^-1 A/I_{k}"), p, p_killed: true, vars, declared_height: Some(k) })
    }

    pub fn vmax(&self) -> usize {
        self.vars.len()
    }

    /// The underlying lattice region of `B/I_k B` (empty when `I_k B = B`).
    pub fn quotient_region(&self, k: usize) -> Region {
        let mut iv = Vec::with_capacity(self.vmax() + 1);
        iv.push(if self.p_killed || k >= 1 { Interval::killed() } else { Interval::nonneg() });
        for (i, b) in self.vars.iter().enumerate() {
            let j = i + 1;
            let killed_here = j < k;
            iv.push(match (b, killed_here) {
                (BaseVar::Inverted, true) => Interval::new(Some(0), Some(0)),
                (BaseVar::Killed, _) | (_, true) => Interval::killed(),
                (BaseVar::Inverted, false) => Interval::all(),
                (BaseVar::Free, false) => Interval::nonneg(),
            });
        }
        Region::new(iv)
    }

    /// `B/I_k B ≠ 0`, i.e. the unit survives.
    pub fn quotient_nonzero(&self, k: usize) -> bool {
        let r = self.quotient_region(k);
        r.contains(&vec![0; r.nvars()])
    }

    /// Multiplication by `v_k` is injective on `B/I_k B` in every degree
    /// through `through`, checked on lattice points with inverted exponents
    /// bounded below by `-floor`.
    pub fn regular_through(&self, k: usize, through: i64, floor: i32) -> bool {
        let r = self.quotient_region(k);
        if !r.contains(&vec![0; r.nvars()]) {
            return true;
        }
        if k == 0 {
            // Multiplication by p on a region with free p-exponent.
            return r.intervals[0].hi.is_none();
        }
        if k > self.vmax() {
            return false;
        }
        let degs: Vec<i64> = (1..=self.vmax()).map(|i| bp_degree(self.p, i)).collect();
        for point in region_points(&r, &degs, through, floor) {
            let mut q = point.clone();
            q[k] += 1;
            if !r.contains(&q) {
                return false;
            }
        }
        true
    }

    pub fn height(&self) -> Result<Height> {
        let mut h = None;
        for k in 0..=self.vmax() + 1 {
            if !self.quotient_nonzero(k) {
                h = Some(k - 1);
                break;
            }
        }
        let computed = match h {
            Some(k) => Height::Exact(k),
            None => Height::AtLeast(self.vmax() + 1),
        };
        if let Some(declared) = self.declared_height {
            if computed != Height::Exact(declared) {
                return Err(Error::HeightMismatch { declared, computed: computed.to_string() });
            }
        }
        Ok(computed)
    }

    /// Landweber exactness witness: `v_k` regular on `B/I_k B` for `k` up to
    /// the height.
    pub fn landweber_witness(&self, through: i64, floor: i32) -> Result<Vec<(usize, bool)>> {
        let top = match self.height()? {
            Height::Exact(h) => h,
            Height::AtLeast(h) => h - 1,
        };
        Ok((0..=top.min(self.vmax())).map(|k| (k, self.regular_through(k, through, floor))).collect())
    }
}

/// Lattice points of a region (index 0 is the p-exponent, kept at its lower
/// bound) in degrees `[-floor·max, through]`, with negative exponents at least
/// `-floor`.
fn region_points(r: &Region, degs: &[i64], through: i64, floor: i32) -> Vec<Exponents> {
    let mut out = Vec::new();
    let n = degs.len();
    let ranges: Vec<(i32, i32)> = (1..=n)
        .map(|i| {
            let iv = r.intervals[i];
            let lo = iv.lo.unwrap_or(-floor).max(-floor);
            let cap = (through / degs[i - 1]) as i32 + 1;
            let hi = iv.hi.map_or(cap, |h| h.min(cap));
            (lo, hi)
        })
        .collect();
    fn rec(i: usize, ranges: &[(i32, i32)], cur: &mut Vec<i32>, out: &mut Vec<Exponents>) {
        if i == ranges.len() {
            out.push(cur.clone());
            return;
        }
        for e in ranges[i].0..ranges[i].1 {
            cur.push(e);
            rec(i + 1, ranges, cur, out);
            cur.pop();
        }
    }
    let mut cur = vec![r.intervals[0].lo.unwrap_or(0)];
    rec(0, &ranges, &mut cur, &mut out);
    out.retain(|e| e[1..].iter().zip(degs).map(|(&a, &d)| a as i64 * d).sum::<i64>() <= through);
    out
}

/// Outcome of classifying an invariant radical ideal of `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// `I·B = I_m·B`; `unit` records that this is the unit ideal of `B`.
    Index { m: usize, unit: bool },
    /// The located primitive of `I/I_k` is not a power of `v_k`.
    NotPrime { k: usize, degree: i64 },
}

/// Find `m` with `I·B = I_m·B` for an invariant ideal declared radical.
///
/// Starting from `I_0 = 0`, as long as `I ⊄ I_k B` the lowest primitive of
/// `I/I_k` is a power of `v_k`; radicality then puts `v_k` into `I`.
pub fn classify_invariant_radical_ideal(
    generators: &[Poly<S>],
    b: &LandweberAlgebra,
    degree_bound: i64,
) -> Result<Classification> {
    let p = b.p;
    let n = b.vmax();
    let vdeg: Vec<i64> = (1..=n).map(|i| bp_degree(p, i)).collect();
    for k in 0..=n {
        if !b.quotient_nonzero(k) {
            return Ok(Classification::Index { m: k, unit: true });
        }
        let residual: Vec<Poly<S>> =
            generators.iter().map(|g| reduce_mod_ik(g, b, k)).filter(|g| !g.is_zero()).collect();
        if residual.is_empty() {
            return Ok(Classification::Index { m: k, unit: false });
        }
        let step = if k == 0 { 0 } else { vdeg[k - 1] };
        let lowest = residual.iter().filter_map(|g| g.max_degree(&vdeg)).min().unwrap_or(0);
        let mut found = false;
        let mut j = 1u32;
        loop {
            let d = step * j as i64;
            if (k >= 1 && d > degree_bound) || (k == 0 && j > 64) {
                break;
            }
            if k >= 1 && d < lowest {
                j += 1;
                continue;
            }
            let mut e = vec![0; n];
            let target = if k == 0 {
                Poly::constant(pow_p(p, j), n)
            } else {
                e[k - 1] = j as i32;
                Poly::monomial(e, S::from_int(1, p))
            };
            if in_ideal_mod_ik(&target, &residual, b, k, d) {
                found = true;
                break;
            }
            j += 1;
        }
        if !found {
            return Ok(Classification::NotPrime { k, degree: lowest });
        }
    }
    Ok(Classification::Index { m: n + 1, unit: !b.quotient_nonzero(n + 1) })
}

fn pow_p(p: u64, j: u32) -> S {
    let mut x = S::from_int(1, p);
    for _ in 0..j {
        x = Coeff::mul(&x, &S::from_int(p as i64, p));
    }
    x
}

/// Drop terms lying in `I_k B` or in the kernel of `A → B`.
fn reduce_mod_ik(g: &Poly<S>, b: &LandweberAlgebra, k: usize) -> Poly<S> {
    let mut out = Poly::zero();
    for (e, c) in &g.terms {
        let killed = e.iter().enumerate().any(|(i, &x)| x > 0 && (i + 1 < k || b.vars[i] == BaseVar::Killed));
        if killed {
            continue;
        }
        let c = if k >= 1 || b.p_killed { c.mod_ppow(1) } else { c.clone() };
        if !LocalRing::is_zero(&c) {
            out.add_term(e.clone(), c);
        }
    }
    out
}

/// `x ∈ (gens) + I_k` in `B`, tested in degree `d` of the polynomial part.
/// Inverted variables are allowed to clear denominators up to the degree
/// bound implied by the test degree.
fn in_ideal_mod_ik(x: &Poly<S>, gens: &[Poly<S>], b: &LandweberAlgebra, k: usize, d: i64) -> bool {
    let p = b.p;
    let n = b.vmax();
    let vdeg: Vec<i64> = (1..=n).map(|i| bp_degree(p, i)).collect();
    let allowed =
        |e: &Exponents| e.iter().enumerate().all(|(i, &x)| x == 0 || !(i + 1 < k || b.vars[i] == BaseVar::Killed));
    let basis: Vec<Exponents> = monomials_of_degree(&vdeg, d).into_iter().filter(|e| allowed(e)).collect();
    let index: std::collections::HashMap<&Exponents, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut cols: Vec<Vec<S>> = Vec::new();
    for g in gens {
        let Some(dg) = g.max_degree(&vdeg) else { continue };
        for mu in monomials_of_degree(&vdeg, d - dg) {
            let m = g.mul_monomial(&mu, &S::from_int(1, p));
            let m = reduce_mod_ik(&m, b, k);
            let mut col = vec![S::from_int(0, p); basis.len()];
            for (e, c) in &m.terms {
                if let Some(&i) = index.get(e) {
                    col[i] = Coeff::add(&col[i], c);
                }
            }
            cols.push(col);
        }
    }
    if k >= 1 || b.p_killed {
        for i in 0..basis.len() {
            let mut col = vec![S::from_int(0, p); basis.len()];
            col[i] = S::from_int(p as i64, p);
            cols.push(col);
        }
    }
    let mut target = vec![S::from_int(0, p); basis.len()];
    for (e, c) in &reduce_mod_ik(x, b, k).terms {
        match index.get(e) {
            Some(&i) => target[i] = c.clone(),
            None => return false,
        }
    }
    let mut g = Matrix::<S>::zero(basis.len(), cols.len(), p);
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            if !LocalRing::is_zero(v) {
                g.set(r, c, v.clone());
            }
        }
    }
    in_column_span(&g, &target)
}

/// One step `M_s/M_{s−1} ≅ s^r A/I_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationStep {
    pub shift: i64,
    pub k: usize,
    /// The chosen element of `M/M_{s−1}`, rendered.
    pub witness: String,
    /// A lift of the witness to the free module on the generators of `M`.
    pub lift: FreeElem,
    /// `Ann = I_k` is exact (`k = 0`) or certified through this degree.
    pub certified_through: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct Filtration {
    pub module: String,
    pub degree_bound: i64,
    pub steps: Vec<FiltrationStep>,
}

impl Filtration {
    /// `(shift, k)` per step, in order.
    pub fn quotients(&self) -> Vec<(i64, usize)> {
        self.steps.iter().map(|s| (s.shift, s.k)).collect()
    }

    pub fn render(&self) -> String {
        let mut out = format!("filtration of {} through degree {}\n", self.module, self.degree_bound);
        for (i, s) in self.steps.iter().enumerate() {
            let cert = match s.certified_through {
                None => "exact".to_string(),
                Some(d) => format!("through {d}"),
            };
            out.push_str(&format!("M_{}/M_{}\ts^{} A/I_{}\twitness {}\t{}\n", i + 1, i, s.shift, s.k, s.witness, cert));
        }
        out
    }
}

fn lex_least(mut basis: Vec<Vec<S>>, kind: ModuleKind, p: u64) -> Option<Vec<S>> {
    if basis.is_empty() {
        return None;
    }
    if kind == ModuleKind::Fp {
        let mut rows: Vec<Vec<crate::scalar::Fp>> =
            basis.iter().map(|v| v.iter().map(|c| c.reduce()).collect()).collect();
        rref_in_place(&mut rows, p);
        return rows.last().map(|r| r.iter().map(|c| S::from_int(c.value() as i64, p)).collect());
    }
    basis.sort_by_key(|v| v.iter().map(|c| c.valuation().map_or(u32::MAX, |x| x)).collect::<Vec<_>>());
    basis.pop()
}

/// Landweber filtration of `m`. Quotient indices above `cap` are errors.
pub fn landweber_filtration(m: &FPComodule, cap: usize) -> Result<Filtration> {
    let engine = m.engine_ref().clone();
    let p = engine.p();
    let n = engine.n();
    let dmax = engine.degree_bound();
    let mut steps: Vec<FiltrationStep> = Vec::new();
    let mut lifts: Vec<FreeElem> = Vec::new();
    let budget = total_length(m, dmax)? + 1;
    loop {
        let q = m.quotient_by_elements(&lifts, format!("{}/M_{}", m.name, steps.len()))?;
        if total_length(&q, dmax)? == 0 {
            break;
        }
        if steps.len() >= budget {
            return Err(Error::Unsupported(format!("{}: filtration does not terminate", m.name)));
        }
        let mut chosen = None;
        for d in q.bottom_degree()..=dmax {
            let piece = q.piece(d)?;
            if piece.is_zero() {
                continue;
            }
            let prims = q.primitives_in_degree(d)?;
            if let Some(y) = lex_least(prims, piece.kind(), p) {
                chosen = Some((d, y, piece.kind()));
                break;
            }
        }
        let Some((mut r, mut z, kind)) = chosen else {
            return Err(Error::DegreeBoundExceeded { requested: dmax + 1, bound: dmax });
        };
        let mut k = 0usize;
        let mut certified = None;
        if kind == ModuleKind::Fp {
            k = 1;
            loop {
                if k > n {
                    certified = Some(dmax);
                    break;
                }
                let dk = bp_degree(p, k);
                let mut e = vec![0; n];
                e[k - 1] = 1;
                let (mut w, mut rw) = (z.clone(), r);
                let mut torsion = false;
                while rw + dk <= dmax {
                    let next = q.act(&e, rw, &w)?;
                    if next.iter().all(LocalRing::is_zero) {
                        torsion = true;
                        break;
                    }
                    w = next;
                    rw += dk;
                }
                if !torsion {
                    certified = Some(dmax);
                    break;
                }
                z = w;
                r = rw;
                k += 1;
            }
        }
        if k > cap {
            return Err(Error::HeightMismatch { declared: cap, computed: format!("quotient A/I_{k} in degree {r}") });
        }
        let piece = q.piece(r)?;
        let witness = crate::comodule::describe(&piece, &z);
        let lift = q.lift(r, &z)?;
        steps.push(FiltrationStep { shift: r, k, witness, lift: lift.clone(), certified_through: certified });
        lifts.push(lift);
    }
    Ok(Filtration { module: m.name.clone(), degree_bound: dmax, steps })
}

/// Sum over degrees of the p-adic length of torsion pieces plus free ranks.
fn total_length(m: &FPComodule, through: i64) -> Result<usize> {
    let mut total = 0usize;
    for d in m.bottom_degree()..=through {
        for o in &m.piece(d)?.orders {
            total += match o {
                Order::PPower(e) => *e as usize,
                Order::Infinite => 1,
            };
        }
    }
    Ok(total)
}

/// `(free rank, torsion length)` of a piece.
fn piece_size(orders: &[Order]) -> (usize, usize) {
    let free = orders.iter().filter(|o| **o == Order::Infinite).count();
    let tors = orders
        .iter()
        .map(|o| match o {
            Order::PPower(e) => *e as usize,
            Order::Infinite => 0,
        })
        .sum();
    (free, tors)
}

/// Checks that every step is an injective comodule map from the claimed
/// suspension into the current quotient, and that the sizes of the quotients
/// add up to those of `m` in every degree.
pub fn verify_filtration(m: &FPComodule, f: &Filtration) -> Result<AxiomReport> {
    let engine: Arc<CoactionEngine<S>> = m.engine_ref().clone();
    let dmax = engine.degree_bound();
    let mut report = AxiomReport::new(dmax);
    let mut lifts: Vec<FreeElem> = Vec::new();
    let mut sizes = vec![(0usize, 0usize); (dmax - m.bottom_degree() + 1).max(0) as usize];
    for (i, step) in f.steps.iter().enumerate() {
        let q = Arc::new(m.quotient_by_elements(&lifts, format!("M/M_{i}"))?);
        let quotient = Arc::new(FPComodule::a_mod_i(engine.clone(), step.k)?.suspend(step.shift)?);
        let map = FPMorphism::new(quotient.clone(), q.clone(), vec![step.lift.clone()])?;
        let label = format!("step {}", i + 1);
        let check = map.check(dmax)?;
        report.push("comodule map", label.clone(), step.shift, check.passed());
        let mut inj = true;
        for d in step.shift..=dmax {
            let mat = map.matrix(d)?;
            if !is_injective(&mat, &quotient.piece(d)?.orders, &q.piece(d)?.orders) {
                inj = false;
            }
            if d >= m.bottom_degree() {
                let (a, b) = piece_size(&quotient.piece(d)?.orders);
                let slot = &mut sizes[(d - m.bottom_degree()) as usize];
                slot.0 += a;
                slot.1 += b;
            }
        }
        report.push("injective", label, step.shift, inj);
        lifts.push(step.lift.clone());
    }
    let mut ranks_ok = true;
    for d in m.bottom_degree()..=dmax {
        if piece_size(&m.piece(d)?.orders) != sizes[(d - m.bottom_degree()) as usize] {
            ranks_ok = false;
            report.push("rebuild ranks", format!("degree {d}"), d, false);
        }
    }
    if ranks_ok {
        report.push("rebuild ranks", "all degrees", dmax, true);
    }
    Ok(report)
}

/// Certificate from [`is_vn_torsion`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorsionCertificate {
    /// Each generator with the least `j` such that `v_n^j g = 0`.
    Exponents(Vec<(String, u32)>),
    /// Every Landweber quotient is `A/I_k` with `k > n`.
    Filtration(Vec<(i64, usize)>),
    /// A filtration quotient `A/I_k`, `k ≤ n`, on which `v_n` acts without
    /// torsion; the witness generates it.
    Witness { element: String, degree: i64, k: usize },
}

/// Whether every element of `m` is killed by a power of `v_n` (with
/// `v_0 = p`).
pub fn is_vn_torsion(m: &FPComodule, n: usize) -> Result<(bool, TorsionCertificate)> {
    let engine = m.engine_ref();
    let p = engine.p();
    let nv = engine.n();
    let dmax = engine.degree_bound();
    let mut exps = Vec::new();
    let mut direct = true;
    for (j, (name, d)) in m.gens.iter().enumerate() {
        if *d > dmax {
            continue;
        }
        let mut found = None;
        let mut e = 1u32;
        loop {
            let step = if n == 0 { 0 } else { bp_degree(p, n) };
            let deg = d + step * e as i64;
            if deg > dmax || (n == 0 && e > 64) || n > nv {
                break;
            }
            let mut x: FreeElem = vec![Poly::zero(); m.gens.len()];
            if n == 0 {
                x[j] = Poly::constant(pow_p(p, e), nv);
            } else {
                let mut ex = vec![0; nv];
                ex[n - 1] = e as i32;
                x[j] = Poly::monomial(ex, S::from_int(1, p));
            }
            if m.reduce_free(deg, &x)?.iter().all(LocalRing::is_zero) {
                found = Some(e);
                break;
            }
            e += 1;
        }
        match found {
            Some(e) => exps.push((name.clone(), e)),
            None => {
                direct = false;
                break;
            }
        }
    }
    if direct {
        return Ok((true, TorsionCertificate::Exponents(exps)));
    }
    let f = landweber_filtration(m, usize::MAX).map_err(|e| match e {
        Error::DegreeBoundExceeded { .. } => Error::Inconclusive(format!("{}: {e}", m.name)),
        other => other,
    })?;
    if let Some(s) = f.steps.iter().find(|s| s.k <= n) {
        return Ok((false, TorsionCertificate::Witness { element: s.witness.clone(), degree: s.shift, k: s.k }));
    }
    Ok((true, TorsionCertificate::Filtration(f.quotients())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodule::InvariantIdeal;
    use crate::hopf::BpHopf;

    fn engine(p: u64, n: usize, d: i64) -> Arc<CoactionEngine<S>> {
        CoactionEngine::new(Arc::new(BpHopf::generate(p, n, d).unwrap()), 0).unwrap()
    }

    fn ideal_p_v1sq(p: u64, n: usize) -> InvariantIdeal {
        let v1 = Poly::<S>::variable(0, n, p);
        InvariantIdeal::new(
            vec![Poly::constant(S::from_int(p as i64, p), n), v1.mul(&v1)],
            vec!["p".into(), "v1^2".into()],
        )
    }

    #[test]
    fn quotients_of_a_filter_trivially() {
        let e = engine(2, 3, 18);
        for k in 0..=3 {
            let m = FPComodule::a_mod_i(e.clone(), k).unwrap();
            let f = landweber_filtration(&m, 4).unwrap();
            assert_eq!(f.quotients(), vec![(0, k)]);
            assert!(verify_filtration(&m, &f).unwrap().passed());
        }
    }

    #[test]
    fn p_v1_squared() {
        for p in [2u64, 3] {
            let e = engine(p, 3, if p == 2 { 18 } else { 40 });
            let m = FPComodule::quotient_by_invariant_ideal(e, &ideal_p_v1sq(p, 3)).unwrap();
            let f = landweber_filtration(&m, 4).unwrap();
            assert_eq!(f.quotients(), vec![(bp_degree(p, 1), 2), (0, 2)]);
            assert_eq!(f.steps[0].witness, "v1");
            let r = verify_filtration(&m, &f).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn torsion_tests() {
        let e = engine(3, 3, 40);
        let a = FPComodule::unit(e.clone()).unwrap();
        let (t, cert) = is_vn_torsion(&a, 1).unwrap();
        assert!(!t);
        assert_eq!(cert, TorsionCertificate::Witness { element: "1".into(), degree: 0, k: 0 });
        let a2 = FPComodule::a_mod_i(e.clone(), 2).unwrap();
        assert_eq!(is_vn_torsion(&a2, 1).unwrap(), (true, TorsionCertificate::Exponents(vec![("1".into(), 1)])));
        let m = FPComodule::quotient_by_invariant_ideal(e, &ideal_p_v1sq(3, 3)).unwrap();
        assert_eq!(is_vn_torsion(&m, 1).unwrap(), (true, TorsionCertificate::Exponents(vec![("1".into(), 2)])));
        assert!(!is_vn_torsion(&m, 2).unwrap().0);
    }

    #[test]
    fn heights() {
        for n in 1..=2 {
            let b = LandweberAlgebra::johnson_wilson(3, 3, n).unwrap();
            assert_eq!(b.height().unwrap(), Height::Exact(n));
            assert!(b.landweber_witness(30, 3).unwrap().iter().all(|x| x.1));
        }
        assert_eq!(LandweberAlgebra::bp(2, 3).height().unwrap(), Height::AtLeast(4));
        let l = LandweberAlgebra::localized_quotient(2, 3, 1).unwrap();
        assert_eq!(l.height().unwrap(), Height::Exact(1));
        assert!(!l.regular_through(0, 18, 3));
        let mut wrong = LandweberAlgebra::johnson_wilson(2, 3, 2).unwrap();
        wrong.declared_height = Some(1);
        assert!(matches!(wrong.height(), Err(Error::HeightMismatch { .. })));
    }

    #[test]
    fn classification() {
        let p = 3;
        let n = 3;
        let e1 = LandweberAlgebra::johnson_wilson(p, n, 1).unwrap();
        let pp = Poly::constant(S::from_int(3, p), n);
        let v1 = Poly::<S>::variable(0, n, p);
        assert_eq!(
            classify_invariant_radical_ideal(&[pp.clone()], &e1, 40).unwrap(),
            Classification::Index { m: 1, unit: false }
        );
        assert_eq!(
            classify_invariant_radical_ideal(&[pp.clone(), v1.clone()], &e1, 40).unwrap(),
            Classification::Index { m: 2, unit: true }
        );
        let bp = LandweberAlgebra::bp(p, n);
        assert_eq!(
            classify_invariant_radical_ideal(&[pp.clone()], &bp, 40).unwrap(),
            Classification::Index { m: 1, unit: false }
        );
        let v2 = Poly::<S>::variable(1, n, p);
        assert_eq!(
            classify_invariant_radical_ideal(&[pp.clone(), v1.clone(), v2], &bp, 40).unwrap(),
            Classification::Index { m: 3, unit: false }
        );
        assert!(matches!(
            classify_invariant_radical_ideal(
                &[pp, v1.mul(&v1).add(&Poly::variable(1, n, p).scale(&S::from_int(0, p)))],
                &bp,
                40
            )
            .unwrap(),
            Classification::Index { m: 2, .. }
        ));
    }
}
