//! Graded comodules over a presented Hopf algebroid.
//!
//! Every comodule exposes the same degreewise interface ([`Comodule`]): a basis
//! of each graded piece (with the order of each basis element), the action of
//! base monomials, and the coaction in right-normal form. The cobar complex and
//! the axiom checker only use this interface. Primitives are computed by each
//! implementation in left-normal form, independently of the right-normal
//! engine.

pub mod engine;
pub mod fp;
pub mod morphism;
pub mod parse;
pub mod region;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gradedpoly::{Coeff, Exponents};
use crate::hopf::AxiomReport;
use crate::scalar::{smith_normal_form, Fp, LocalRing, Matrix, Order};

pub use engine::{CoactionEngine, Scalar};
pub use fp::{ExtendedComodule, FPComodule, FreeElem, InvariantIdeal};
pub use morphism::FPMorphism;
pub use region::{Interval, Region, RegionComodule};

/// Degreewise structure of a comodule as a Z_(p)-module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModuleKind {
    /// Every graded piece is free over Z_(p).
    Free,
    /// Killed by p.
    Fp,
    /// Neither; the linear algebra of this crate does not handle it.
    Mixed,
    /// All computed pieces vanish.
    Zero,
}

/// Basis of one graded piece `M_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub degree: i64,
    pub names: Vec<String>,
    pub orders: Vec<Order>,
}

impl Piece {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn is_zero(&self) -> bool {
        self.names.is_empty()
    }

    /// Reduce each coordinate modulo its order.
    pub fn canon<C: Scalar>(&self, x: &mut [C]) {
        for (c, o) in x.iter_mut().zip(&self.orders) {
            if let Order::PPower(e) = o {
                *c = c.mod_ppow(*e);
            }
        }
    }

    pub fn kind(&self) -> ModuleKind {
        if self.orders.is_empty() {
            ModuleKind::Zero
        } else if self.orders.iter().all(|o| *o == Order::Infinite) {
            ModuleKind::Free
        } else if self.orders.iter().all(|o| *o == Order::PPower(1)) {
            ModuleKind::Fp
        } else {
            ModuleKind::Mixed
        }
    }
}

/// Combine the kinds of several pieces.
pub fn combine_kinds(kinds: impl IntoIterator<Item = ModuleKind>) -> ModuleKind {
    let mut acc = ModuleKind::Zero;
    for k in kinds {
        acc = match (acc, k) {
            (a, ModuleKind::Zero) => a,
            (ModuleKind::Zero, b) => b,
            (a, b) if a == b => a,
            _ => ModuleKind::Mixed,
        };
    }
    acc
}

/// Right-normal element of `Γ^{⊗s} ⊗ M`: t-monomials per slot mapped to
/// coordinates of the module factor.
pub type Tensor<C> = BTreeMap<Vec<Exponents>, Vec<C>>;

pub trait Comodule<C: Scalar>: Send + Sync {
    fn engine(&self) -> &Arc<CoactionEngine<C>>;

    fn label(&self) -> String;

    /// Pieces strictly below this degree vanish.
    fn bottom_degree(&self) -> i64;

    /// Highest degree whose piece is computed exactly.
    fn top_degree(&self) -> i64;

    fn piece(&self, d: i64) -> Result<Arc<Piece>>;

    /// `v^α · x` for `x ∈ M_d`; the result lies in `M_{d+|α|}`.
    fn act(&self, alpha: &[i32], d: i64, x: &[C]) -> Result<Vec<C>>;

    /// Right-normal coaction of the `i`-th basis element of `M_d`, including
    /// the `β = 0` term.
    fn coaction(&self, d: i64, i: usize) -> Result<Arc<Vec<(Exponents, Vec<C>)>>>;

    /// Basis (in piece coordinates) of the primitives of `M_d`, computed in
    /// left-normal form.
    fn primitives_in_degree(&self, d: i64) -> Result<Vec<Vec<C>>>;

    /// Checks beyond counit and coassociativity (for example compatibility
    /// with relations).
    fn extra_checks(&self, _through: i64, _report: &mut AxiomReport) -> Result<()> {
        Ok(())
    }

    fn kind(&self) -> Result<ModuleKind> {
        let mut kinds = Vec::new();
        for d in self.bottom_degree()..=self.top_degree() {
            kinds.push(self.piece(d)?.kind());
        }
        Ok(combine_kinds(kinds))
    }
}

pub type DynComodule<C> = Arc<dyn Comodule<C>>;

pub(crate) fn zero_vec<C: Scalar>(n: usize, p: u64) -> Vec<C> {
    vec![<C as Coeff>::from_i64(0, p); n]
}

pub(crate) fn add_scaled<C: Scalar>(acc: &mut [C], x: &[C], c: &C) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a = Coeff::add(a, &Coeff::mul(b, c));
    }
}

pub(crate) fn is_zero_vec<C: Scalar>(x: &[C]) -> bool {
    x.iter().all(Coeff::is_zero)
}

/// Coaction of an arbitrary element of `M_d`.
pub fn coact<C: Scalar>(m: &dyn Comodule<C>, d: i64, x: &[C]) -> Result<BTreeMap<Exponents, Vec<C>>> {
    let p = m.engine().p();
    let mut out: BTreeMap<Exponents, Vec<C>> = BTreeMap::new();
    for (i, c) in x.iter().enumerate() {
        if Coeff::is_zero(c) {
            continue;
        }
        for (beta, y) in m.coaction(d, i)?.iter() {
            let dd = d - m.engine().t_degree(beta);
            let len = m.piece(dd)?.dim();
            let slot = out.entry(beta.clone()).or_insert_with(|| zero_vec(len, p));
            add_scaled(slot, y, c);
        }
    }
    finish_tensor_1(m, d, out)
}

fn finish_tensor_1<C: Scalar>(
    m: &dyn Comodule<C>,
    d: i64,
    map: BTreeMap<Exponents, Vec<C>>,
) -> Result<BTreeMap<Exponents, Vec<C>>> {
    let mut out = BTreeMap::new();
    for (beta, mut y) in map {
        m.piece(d - m.engine().t_degree(&beta))?.canon(&mut y);
        if !is_zero_vec(&y) {
            out.insert(beta, y);
        }
    }
    Ok(out)
}

/// `v^α (t^{γ_1} ⊗ … ⊗ t^{γ_s}) ⊗ x` with `x ∈ M_d`, in right-normal form.
/// Terms are added into `out` with factor `c`.
pub fn push_into<C: Scalar>(
    m: &dyn Comodule<C>,
    alpha: &[i32],
    slots: &[Exponents],
    d: i64,
    x: &[C],
    c: &C,
    out: &mut Tensor<C>,
) -> Result<()> {
    let p = m.engine().p();
    for (s, a, c2) in m.engine().push(alpha, slots)? {
        let y = m.act(&a, d, x)?;
        if is_zero_vec(&y) {
            continue;
        }
        let len = y.len();
        let slot = out.entry(s).or_insert_with(|| zero_vec(len, p));
        add_scaled(slot, &y, &Coeff::mul(c, &c2));
    }
    Ok(())
}

/// Reduce every entry of a tensor and drop zeros; `d` is its total degree.
pub fn canon_tensor<C: Scalar>(m: &dyn Comodule<C>, d: i64, t: Tensor<C>) -> Result<Tensor<C>> {
    let mut out = Tensor::new();
    for (slots, mut y) in t {
        let dd = d - slots.iter().map(|b| m.engine().t_degree(b)).sum::<i64>();
        m.piece(dd)?.canon(&mut y);
        if !is_zero_vec(&y) {
            out.insert(slots, y);
        }
    }
    Ok(out)
}

/// Counit and coassociativity, degreewise through `through`, plus any checks
/// specific to the implementation.
pub fn check_comodule_axioms<C: Scalar>(m: &dyn Comodule<C>, through: i64) -> Result<AxiomReport> {
    let top = through.min(m.top_degree());
    let mut report = AxiomReport::new(top);
    let p = m.engine().p();
    let n = m.engine().n();
    for d in m.bottom_degree()..=top {
        let piece = m.piece(d)?;
        for i in 0..piece.dim() {
            let name = piece.names[i].clone();
            let psi = m.coaction(d, i)?;
            let mut unit = zero_vec::<C>(piece.dim(), p);
            unit[i] = <C as Coeff>::from_i64(1, p);
            let zero = vec![0; n];
            let counit = psi.iter().find(|(b, _)| *b == zero).map(|(_, y)| y.clone());
            report.push("counit", name.clone(), d, counit.as_ref() == Some(&unit));

            let mut lhs: Tensor<C> = Tensor::new();
            let mut rhs: Tensor<C> = Tensor::new();
            let one = <C as Coeff>::from_i64(1, p);
            for (beta, y) in psi.iter() {
                let dd = d - m.engine().t_degree(beta);
                for (gamma, z) in coact(m, dd, y)? {
                    let len = z.len();
                    let slot = lhs.entry(vec![beta.clone(), gamma]).or_insert_with(|| zero_vec(len, p));
                    add_scaled(slot, &z, &one);
                }
                let delta = m.engine().delta(beta)?;
                for (e, c) in &delta.terms {
                    let slots = vec![e[2 * n - n..2 * n].to_vec(), e[2 * n..3 * n].to_vec()];
                    push_into(m, &e[..n], &slots, dd, y, c, &mut rhs)?;
                }
            }
            let lhs = canon_tensor(m, d, lhs)?;
            let rhs = canon_tensor(m, d, rhs)?;
            report.push("coassociativity", name, d, lhs == rhs);
        }
    }
    m.extra_checks(top, &mut report)?;
    Ok(report)
}

/// Primitives per degree, as coordinate vectors of the piece basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Primitives<C> {
    pub by_degree: BTreeMap<i64, Vec<Vec<C>>>,
    pub names: BTreeMap<i64, Vec<String>>,
}

impl<C: Scalar> Primitives<C> {
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.by_degree.iter().map(|(d, v)| (*d, v.len())).collect()
    }

    /// Degrees with a nonzero primitive.
    pub fn support(&self) -> Vec<i64> {
        self.by_degree.iter().filter(|(_, v)| !v.is_empty()).map(|(d, _)| *d).collect()
    }
}

/// Primitives of `m` in the degree window `[lo, hi]`.
pub fn primitives<C: Scalar>(m: &dyn Comodule<C>, lo: i64, hi: i64) -> Result<Primitives<C>> {
    if hi > m.top_degree() {
        return Err(Error::DegreeBoundExceeded { requested: hi, bound: m.top_degree() });
    }
    let mut out = Primitives { by_degree: BTreeMap::new(), names: BTreeMap::new() };
    for d in lo.max(m.bottom_degree())..=hi {
        let basis = m.primitives_in_degree(d)?;
        let piece = m.piece(d)?;
        let names = basis.iter().map(|v| describe(&piece, v)).collect();
        out.names.insert(d, names);
        out.by_degree.insert(d, basis);
    }
    Ok(out)
}

/// Human-readable linear combination of piece basis elements.
pub fn describe<C: Scalar>(piece: &Piece, x: &[C]) -> String {
    let mut parts = Vec::new();
    for (c, name) in x.iter().zip(&piece.names) {
        if Coeff::is_zero(c) {
            continue;
        }
        if Coeff::is_one(c) {
            parts.push(name.clone());
        } else {
            parts.push(format!("{c}*{name}"));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Kernel of a matrix. Over F_p the basis is in reduced row echelon form
/// (pivots normalized to 1, ordered by pivot position); over Z_(p) it is a
/// basis of the saturated kernel lattice.
pub fn kernel<C: Scalar>(m: &Matrix<C>) -> Vec<Vec<C>> {
    let cols = m.cols;
    let p = m.p;
    if is_field::<C>(p) {
        let fm =
            Matrix::from_rows((0..m.rows).map(|r| m.row(r).iter().map(|c| c.to_fp()).collect()).collect(), cols, p);
        return kernel_fp(&fm)
            .into_iter()
            .map(|v| v.into_iter().map(|c| <C as Coeff>::from_i64(c.value() as i64, p)).collect())
            .collect();
    }
    let snf = smith_normal_form(m);
    let r = snf.rank();
    (r..cols).map(|j| snf.right.column(j)).collect()
}

pub(crate) fn is_field<C: Scalar>(p: u64) -> bool {
    // Fp reduces p to zero; Z_(p) keeps it.
    LocalRing::is_zero(&<C as LocalRing>::from_i64(p as i64, p))
}

/// RREF kernel basis over F_p.
pub fn kernel_fp(m: &Matrix<Fp>) -> Vec<Vec<Fp>> {
    let p = m.p;
    let cols = m.cols;
    let mut rows: Vec<Vec<Fp>> = (0..m.rows).map(|r| m.row(r).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c].value() != 0) else { continue };
        rows.swap(r, k);
        let inv = rows[r][c].inverse();
        for x in rows[r].iter_mut() {
            *x = LocalRing::mul(x, &inv);
        }
        for k in 0..rows.len() {
            if k != r && rows[k][c].value() != 0 {
                let f = rows[k][c];
                let pr = rows[r].clone();
                for (x, y) in rows[k].iter_mut().zip(&pr) {
                    *x = LocalRing::sub(x, &LocalRing::mul(&f, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Vec<Vec<Fp>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Fp::new(0, p); cols];
            v[f] = Fp::new(1, p);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = LocalRing::neg(&rows[i][f]);
            }
            v
        })
        .collect();
    // Echelon form of the kernel itself.
    rref_in_place(&mut basis, p);
    basis
}

/// Reduced row echelon form of a list of F_p vectors, zero rows removed.
pub fn rref_in_place(vs: &mut Vec<Vec<Fp>>, p: u64) {
    if vs.is_empty() {
        return;
    }
    let cols = vs[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..vs.len()).find(|&k| vs[k][c].value() != 0) else { continue };
        vs.swap(r, k);
        let inv = vs[r][c].inverse();
        for x in vs[r].iter_mut() {
            *x = LocalRing::mul(x, &inv);
        }
        for k in 0..vs.len() {
            if k != r && vs[k][c].value() != 0 {
                let f = vs[k][c];
                let pr = vs[r].clone();
                for (x, y) in vs[k].iter_mut().zip(&pr) {
                    *x = LocalRing::sub(x, &LocalRing::mul(&f, y));
                }
            }
        }
        r += 1;
    }
    vs.truncate(r);
    let _ = p;
}

/// Whether `b` lies in the Z_(p)-span (or F_p-span) of the columns of `g`.
pub fn in_column_span<C: Scalar>(g: &Matrix<C>, b: &[C]) -> bool {
    if g.cols == 0 {
        return is_zero_vec(b);
    }
    let snf = smith_normal_form(g);
    let y = snf.left.apply(b);
    let r = snf.rank();
    for (i, yi) in y.iter().enumerate() {
        if LocalRing::is_zero(yi) {
            continue;
        }
        if i >= r {
            return false;
        }
        let dv = snf.diag[i].valuation().unwrap_or(u32::MAX);
        match yi.valuation() {
            Some(v) if v >= dv => {}
            _ => return false,
        }
    }
    true
}
