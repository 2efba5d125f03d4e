//! Lattice-region ("monomial") comodules.
//!
//! A region is a product of exponent intervals, one per variable, with the
//! prime counted as the degree-zero variable `v_0`. The graded pieces of the
//! region module have the allowed lattice points as basis; a variable maps a
//! point to its neighbour or to zero when the neighbour leaves the region.
//!
//! Coactions are supported on staircase regions: `p, v_1, …, v_{k−1}` killed,
//! `v_k` in an arbitrary interval and the remaining variables nonnegative
//! (plus the integral region of `A` itself). When `v_k` is unbounded below the
//! module is replaced by its subcomodule of points with `v_k`-exponent at
//! least `−floor`; raising the floor by one and comparing certifies results.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gradedpoly::{bp_degree, monomials_of_degree, render_monomial, Coeff, Exponents, Poly, Substitution};
use crate::scalar::{Matrix, Order};

use super::engine::{CoactionEngine, Scalar};
use super::{kernel, zero_vec, Comodule, Piece};

/// Exponents `e` with `lo ≤ e < hi`; `None` means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Option<i32>,
    pub hi: Option<i32>,
}

impl Interval {
    pub const fn new(lo: Option<i32>, hi: Option<i32>) -> Self {
        Interval { lo, hi }
    }

    pub const fn nonneg() -> Self {
        Interval { lo: Some(0), hi: None }
    }

    /// Only the exponent zero: the variable is killed.
    pub const fn killed() -> Self {
        Interval { lo: Some(0), hi: Some(1) }
    }

    /// Strictly negative exponents (`x^∞`-torsion, divided by `x`).
    pub const fn negative() -> Self {
        Interval { lo: None, hi: Some(0) }
    }

    pub const fn all() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn contains(&self, e: i32) -> bool {
        self.lo.map_or(true, |l| e >= l) && self.hi.map_or(true, |h| e < h)
    }

    pub fn is_empty(&self) -> bool {
        matches!((self.lo, self.hi), (Some(l), Some(h)) if l >= h)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.lo, self.hi) {
            (Some(0), Some(1)) => write!(f, "=0"),
            (Some(0), None) => write!(f, ">=0"),
            (None, Some(0)) => write!(f, "<0"),
            (None, None) => write!(f, "any"),
            (lo, hi) => {
                let l = lo.map_or("-inf".to_string(), |x| x.to_string());
                let h = hi.map_or("inf".to_string(), |x| x.to_string());
                write!(f, "[{l},{h})")
            }
        }
    }
}

/// Per-variable intervals; index 0 is the exponent of p.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub intervals: Vec<Interval>,
}

impl Region {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Region { intervals }
    }

    /// All variables `v_0..v_n` nonnegative: the lattice of `A`.
    pub fn polynomial(n: usize) -> Self {
        Region { intervals: vec![Interval::nonneg(); n + 1] }
    }

    /// `A/I_k`.
    pub fn quotient(n: usize, k: usize) -> Self {
        let mut r = Self::polynomial(n);
        for i in 0..k.min(n + 1) {
            r.intervals[i] = Interval::killed();
        }
        r
    }

    /// `v_k^{-1} A/I_k`.
    pub fn localized(n: usize, k: usize) -> Self {
        let mut r = Self::quotient(n, k);
        r.intervals[k] = Interval::all();
        r
    }

    /// `A/(p, …, v_{k−1}, v_k^∞, …, v_m^∞)`; `k = 0` divides by p too.
    pub fn divided(n: usize, k: usize, m: usize) -> Self {
        let mut r = Self::quotient(n, k);
        for i in k..=m.min(n) {
            r.intervals[i] = Interval::negative();
        }
        r
    }

    pub fn nvars(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, point: &[i32]) -> bool {
        point.len() == self.intervals.len() && point.iter().zip(&self.intervals).all(|(e, i)| i.contains(*e))
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.iter().any(Interval::is_empty)
    }

    /// Compact description such as `A/(p, v1^inf, v2^inf)`.
    pub fn describe(&self) -> String {
        if self.is_empty() {
            return "0".into();
        }
        let name = |i: usize| if i == 0 { "p".to_string() } else { format!("v{i}") };
        let mut killed = Vec::new();
        let mut inverted = Vec::new();
        let mut other = Vec::new();
        for (i, iv) in self.intervals.iter().enumerate() {
            match (iv.lo, iv.hi) {
                (Some(0), None) => {}
                (Some(0), Some(1)) => killed.push(name(i)),
                (Some(0), Some(h)) => killed.push(format!("{}^{h}", name(i))),
                (None, Some(0)) => killed.push(format!("{}^inf", name(i))),
                (None, None) => inverted.push(name(i)),
                _ => other.push(format!("{}:{}", name(i), iv)),
            }
        }
        let mut s = String::new();
        for v in &inverted {
            s.push_str(&format!("{v}^-1 "));
        }
        s.push('A');
        if !killed.is_empty() {
            s.push_str(&format!("/({})", killed.join(", ")));
        }
        if !other.is_empty() {
            s.push_str(&format!(" {{{}}}", other.join(", ")));
        }
        s
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

struct RegionPiece {
    piece: Arc<Piece>,
    points: Vec<Exponents>,
    index: HashMap<Exponents, usize>,
}

/// Region module over `v_1..v_n` with a comodule structure.
pub struct RegionComodule<C: Scalar> {
    engine: Arc<CoactionEngine<C>>,
    pub region: Region,
    /// Index of the variable with a general interval (0 for `A`).
    pub k: usize,
    /// Points have `v_k`-exponent at least `bottom`.
    pub bottom: i32,
    /// Exponent bound from above on `v_k`, if any.
    pub cap: Option<i32>,
    pub floor: i32,
    pub shift: i64,
    pieces: Mutex<BTreeMap<i64, Arc<RegionPiece>>>,
    coactions: Mutex<HashMap<(i64, usize), Arc<Vec<(Exponents, Vec<C>)>>>>,
}

impl<C: Scalar> fmt::Debug for RegionComodule<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RegionComodule({}, floor {}, shift {})", self.region, self.floor, self.shift)
    }
}

impl<C: Scalar> RegionComodule<C> {
    /// `floor` is used only when `v_k` is unbounded below.
    pub fn new(engine: Arc<CoactionEngine<C>>, region: Region, floor: i32, shift: i64) -> Result<Self> {
        let n = engine.n();
        if region.nvars() != n + 1 {
            return Err(Error::GradingMismatch(format!("region has {} variables, expected {}", region.nvars(), n + 1)));
        }
        let iv = &region.intervals;
        let p = engine.p();
        let field = super::is_field::<C>(p);
        let k = if iv[0] == Interval::nonneg() && iv[1..].iter().all(|i| *i == Interval::nonneg()) {
            0
        } else {
            if iv[0] != Interval::killed() {
                return Err(Error::Unsupported(format!("coaction on {region}: p must be killed")));
            }
            let k = (1..=n)
                .find(|&i| iv[i] != Interval::killed())
                .ok_or_else(|| Error::Unsupported(format!("coaction on {region}: nothing left after killing")))?;
            if iv[k + 1..].iter().any(|i| *i != Interval::nonneg()) {
                return Err(Error::Unsupported(format!(
                    "coaction on {region}: only one variable may carry a general interval"
                )));
            }
            k
        };
        if k == 0 && field {
            return Err(Error::Unsupported("the integral region needs Z_(p) coefficients".into()));
        }
        if k >= 1 && !field && engine.killed < k {
            return Err(Error::Unsupported(format!(
                "{region} is killed by I_{k} but the engine only kills I_{}",
                engine.killed
            )));
        }
        if k >= 1 {
            // v_k must be primitive for the region to be closed under the coaction.
            let mut e = vec![0; n];
            e[k - 1] = 1;
            let split = engine.split(&e)?;
            if split.len() != 1 || split[0].0.iter().any(|&x| x != 0) {
                return Err(Error::Unsupported(format!("v{k} is not primitive in this engine")));
            }
        }
        let (bottom, cap) = if k == 0 { (0, None) } else { (iv[k].lo.unwrap_or(-floor), iv[k].hi) };
        if iv[k].lo.is_none() && floor < 0 {
            return Err(Error::Unsupported("negative floor".into()));
        }
        Ok(RegionComodule {
            engine,
            region,
            k,
            bottom,
            cap,
            floor,
            shift,
            pieces: Mutex::new(BTreeMap::new()),
            coactions: Mutex::new(HashMap::new()),
        })
    }

    /// `v_k^{-1} A/I_k` truncated at `v_k^{-floor}`.
    pub fn localized(engine: Arc<CoactionEngine<C>>, k: usize, floor: i32) -> Result<Self> {
        let n = engine.n();
        Self::new(engine, Region::localized(n, k), floor, 0)
    }

    pub fn with_floor(&self, floor: i32) -> Result<Self> {
        Self::new(self.engine.clone(), self.region.clone(), floor, self.shift)
    }

    fn vk_degree(&self) -> i64 {
        if self.k == 0 {
            0
        } else {
            bp_degree(self.engine.p(), self.k)
        }
    }

    /// Degree of the bottom class `v_k^{bottom}`.
    fn base_degree(&self) -> i64 {
        self.shift + self.bottom as i64 * self.vk_degree()
    }

    /// Largest degree of `v^α / v_k^{bottom}` needed for the piece `M_d`.
    fn positive_part(&self, d: i64) -> i64 {
        d - self.base_degree()
    }

    fn region_piece(&self, d: i64) -> Result<Arc<RegionPiece>> {
        if let Some(rp) = self.pieces.lock().unwrap().get(&d) {
            return Ok(rp.clone());
        }
        let pos = self.positive_part(d);
        let bound = self.engine.degree_bound();
        if pos > bound {
            return Err(Error::DegreeBoundExceeded { requested: pos, bound });
        }
        let n = self.engine.n();
        let vdeg = self.engine.v_degrees();
        let mut points = Vec::new();
        if pos >= 0 {
            if self.k == 0 {
                points = monomials_of_degree(&vdeg, pos);
            } else {
                let k = self.k;
                let dk = vdeg[k - 1];
                let upper = self.cap.map_or(i32::MAX, |c| c - self.bottom);
                let mut a: i32 = 0;
                while a < upper && a as i64 * dk <= pos {
                    for rest in monomials_of_degree(&vdeg[k..], pos - a as i64 * dk) {
                        let mut e = vec![0; n];
                        e[k - 1] = a + self.bottom;
                        e[k..].copy_from_slice(&rest);
                        points.push(e);
                    }
                    a += 1;
                }
            }
        }
        let g = self.engine.hopf.grading(0);
        let names = points
            .iter()
            .map(|e| {
                let s = render_monomial(e, &g);
                if s.is_empty() {
                    "1".to_string()
                } else {
                    s
                }
            })
            .collect();
        let order = if self.k == 0 { Order::Infinite } else { Order::PPower(1) };
        let orders = vec![order; points.len()];
        let index = points.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let rp = Arc::new(RegionPiece { piece: Arc::new(Piece { degree: d, names, orders }), points, index });
        self.pieces.lock().unwrap().insert(d, rp.clone());
        Ok(rp)
    }

    /// Exponent vector of the `i`-th basis element of `M_d`.
    pub fn point(&self, d: i64, i: usize) -> Result<Exponents> {
        Ok(self.region_piece(d)?.points[i].clone())
    }

    /// Piece coordinates of the point `e`, or `None` outside the module.
    pub fn locate(&self, e: &[i32]) -> Result<Option<(i64, usize)>> {
        if self.k >= 1 {
            if (0..self.k - 1).any(|j| e[j] != 0) || e[self.k..].iter().any(|&x| x < 0) {
                return Ok(None);
            }
            let ek = e[self.k - 1];
            if self.cap.map_or(false, |c| ek >= c) {
                return Ok(None);
            }
            if ek < self.bottom {
                return Err(Error::Unsupported(format!("{}: v{}-exponent {ek} leaves the floor", self.region, self.k)));
            }
        } else if e.iter().any(|&x| x < 0) {
            return Err(Error::Unsupported("negative exponent on the integral region".into()));
        }
        let d = self.shift + self.engine.v_degree(e);
        let rp = self.region_piece(d)?;
        Ok(rp.index.get(e).map(|&i| (d, i)))
    }

    /// Primitives in the window, certified by raising the floor by one.
    pub fn certified_primitives(&self, lo: i64, hi: i64) -> Result<super::Primitives<C>> {
        let a = super::primitives(self, lo, hi)?;
        if self.k >= 1 && self.region.intervals[self.k].lo.is_none() {
            let b = super::primitives(&self.with_floor(self.floor + 1)?, lo, hi)?;
            if a.names != b.names {
                return Err(Error::PaddingUnstable(format!(
                    "primitives of {} change between floor {} and {}",
                    self.region,
                    self.floor,
                    self.floor + 1
                )));
            }
        }
        Ok(a)
    }
}

impl<C: Scalar> Comodule<C> for RegionComodule<C> {
    fn engine(&self) -> &Arc<CoactionEngine<C>> {
        &self.engine
    }

    fn label(&self) -> String {
        let mut s = self.region.describe();
        if self.k >= 1 && self.region.intervals[self.k].lo.is_none() {
            s.push_str(&format!(" (floor v{}^-{})", self.k, self.floor));
        }
        if self.shift != 0 {
            s = format!("s^{} {s}", self.shift);
        }
        s
    }

    fn bottom_degree(&self) -> i64 {
        self.base_degree()
    }

    fn top_degree(&self) -> i64 {
        self.base_degree() + self.engine.degree_bound()
    }

    fn piece(&self, d: i64) -> Result<Arc<Piece>> {
        Ok(self.region_piece(d)?.piece.clone())
    }

    fn act(&self, alpha: &[i32], d: i64, x: &[C]) -> Result<Vec<C>> {
        let p = self.engine.p();
        let src = self.region_piece(d)?;
        let target = d + self.engine.v_degree(alpha);
        let dst = self.region_piece(target)?;
        let mut out = zero_vec::<C>(dst.points.len(), p);
        for (c, e) in x.iter().zip(&src.points) {
            if Coeff::is_zero(c) {
                continue;
            }
            let f: Exponents = e.iter().zip(alpha).map(|(a, b)| a + b).collect();
            if let Some((_, i)) = self.locate(&f)? {
                out[i] = Coeff::add(&out[i], c);
            }
        }
        src.piece.canon(&mut out);
        Ok(out)
    }

    fn coaction(&self, d: i64, i: usize) -> Result<Arc<Vec<(Exponents, Vec<C>)>>> {
        if let Some(c) = self.coactions.lock().unwrap().get(&(d, i)) {
            return Ok(c.clone());
        }
        let p = self.engine.p();
        let rp = self.region_piece(d)?;
        let alpha = rp.points[i].clone();
        let mut acc: BTreeMap<Exponents, Vec<C>> = BTreeMap::new();
        for (beta, a, c) in self.engine.split(&alpha)?.iter() {
            let Some((dd, j)) = self.locate(a)? else { continue };
            let len = self.region_piece(dd)?.points.len();
            let slot = acc.entry(beta.clone()).or_insert_with(|| zero_vec(len, p));
            slot[j] = Coeff::add(&slot[j], c);
        }
        let mut out = Vec::new();
        for (beta, mut y) in acc {
            self.piece(d - self.engine.t_degree(&beta))?.canon(&mut y);
            if !super::is_zero_vec(&y) {
                out.push((beta, y));
            }
        }
        let out = Arc::new(out);
        self.coactions.lock().unwrap().insert((d, i), out.clone());
        Ok(out)
    }

    /// Left-normal route: with `g = v_k^{bottom}` primitive, `v^α = a·g`
    /// is primitive exactly when `η_R(a) = a` in `Γ` modulo the kill ideal
    /// and the cap on `v_k`.
    fn primitives_in_degree(&self, d: i64) -> Result<Vec<Vec<C>>> {
        let rp = self.region_piece(d)?;
        if rp.points.is_empty() {
            return Ok(Vec::new());
        }
        let n = self.engine.n();
        let p = self.engine.p();
        let hopf = &self.engine.hopf;
        let images: Vec<Poly<C>> = hopf.right_unit.iter().map(|x| self.engine.reduce(x)).collect();
        let degs = hopf.grading(1).degrees();
        let mut sub = Substitution::new(&images, &degs, i64::MAX / 4, p);
        let cap = self.cap.map(|c| c - self.bottom);
        let mut rows: BTreeMap<Exponents, Vec<C>> = BTreeMap::new();
        let ncols = rp.points.len();
        for (col, e) in rp.points.iter().enumerate() {
            let mut a = e.clone();
            if self.k >= 1 {
                a[self.k - 1] -= self.bottom;
            }
            let eta = self.engine.reduce(&sub.apply_monomial(&a)?);
            let mut a2 = a.clone();
            a2.extend(std::iter::repeat(0).take(n));
            let diff = eta.sub(&Poly::monomial(a2, <C as Coeff>::from_i64(1, p)));
            for (m, c) in &diff.terms {
                if self.k >= 1 && cap.map_or(false, |c| m[self.k - 1] >= c) {
                    continue;
                }
                let row = rows.entry(m.clone()).or_insert_with(|| zero_vec(ncols, p));
                row[col] = Coeff::add(&row[col], c);
            }
        }
        let rows: Vec<Vec<C>> = rows.into_values().collect();
        let m = Matrix::from_rows(rows, ncols, p);
        let mut basis = kernel(&m);
        for v in basis.iter_mut() {
            rp.piece.canon(v);
        }
        Ok(basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodule::{check_comodule_axioms, primitives};
    use crate::hopf::BpHopf;
    use crate::scalar::PLocalScalar;

    fn engine(p: u64, n: usize, d: i64, killed: usize) -> Arc<CoactionEngine<PLocalScalar>> {
        CoactionEngine::new(Arc::new(BpHopf::generate(p, n, d).unwrap()), killed).unwrap()
    }

    #[test]
    fn membership_and_description() {
        let r = Region::divided(3, 1, 2);
        assert!(r.contains(&[0, -1, -2, 0]));
        assert!(!r.contains(&[0, 0, -2, 0]));
        assert!(!r.contains(&[1, -1, -2, 0]));
        assert_eq!(r.describe(), "A/(p, v1^inf, v2^inf)");
        assert_eq!(Region::localized(3, 2).describe(), "v2^-1 A/(p, v1)");
        assert_eq!(Region::divided(3, 0, 1).describe(), "A/(p^inf, v1^inf)");
    }

    #[test]
    fn localized_pieces_and_axioms() {
        let e = engine(3, 3, 60, 1);
        let m = RegionComodule::localized(e, 1, 3).unwrap();
        assert_eq!(m.bottom_degree(), -12);
        assert_eq!(m.piece(-12).unwrap().names, vec!["v1^-3"]);
        assert_eq!(m.piece(-8).unwrap().names, vec!["v1^-2"]);
        assert_eq!(m.piece(4).unwrap().names, vec!["v1^-3 v2", "v1"]);
        assert!(m.piece(-11).unwrap().is_zero());
        let r = check_comodule_axioms(&m, 24).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn localized_primitives_are_vk_powers() {
        let e = engine(3, 3, 60, 1);
        let m = RegionComodule::localized(e, 1, 3).unwrap();
        let prims = m.certified_primitives(-12, 12).unwrap();
        assert_eq!(prims.support(), vec![-12, -8, -4, 0, 4, 8, 12]);
        assert_eq!(prims.names[&-12], vec!["v1^-3"]);
        assert_eq!(prims.names[&12], vec!["v1^3"]);
    }

    #[test]
    fn integral_region_matches_unit() {
        let e = engine(2, 2, 12, 0);
        let m = RegionComodule::new(e.clone(), Region::polynomial(2), 0, 0).unwrap();
        let a = crate::comodule::FPComodule::unit(e).unwrap();
        for d in 0..=12 {
            assert_eq!(m.piece(d).unwrap().dim(), a.piece(d).unwrap().dim());
        }
        assert!(check_comodule_axioms(&m, 12).unwrap().passed());
        assert_eq!(primitives(&m, 0, 12).unwrap().support(), vec![0]);
    }

    #[test]
    fn capped_localization() {
        let e = engine(2, 3, 18, 2);
        let mut r = Region::quotient(3, 2);
        r.intervals[2] = Interval::new(Some(0), Some(2));
        let m = RegionComodule::new(e, r, 0, 0).unwrap();
        assert!(check_comodule_axioms(&m, 18).unwrap().passed());
        assert_eq!(primitives(&m, 0, 18).unwrap().support(), vec![0, 6]);
    }

    #[test]
    fn unsupported_shapes() {
        let e = engine(3, 3, 60, 1);
        let r = Region::divided(3, 1, 2);
        assert!(matches!(RegionComodule::new(e, r, 3, 0), Err(Error::Unsupported(_))));
    }
}
