//! Exact arithmetic over the p-local integers and over F_p, plus the Smith
//! normal form and homology computations that every degreewise kernel and
//! cokernel in the crate goes through.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational (may be negative).
pub fn rational_valuation(q: &BigRational, p: u64) -> i64 {
    int_valuation(q.numer(), p) as i64 - int_valuation(q.denom(), p) as i64
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Ring operations needed by the normal-form algorithms.
///
/// Both rings handled here are local: every element is a unit times a power of
/// the maximal ideal generator, so pivoting on minimal valuation is enough for
/// a Smith normal form.
pub trait LocalRing: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn prime(&self) -> u64;
    fn from_i64(n: i64, p: u64) -> Self;
    fn is_zero(&self) -> bool;
    /// `None` for zero.
    fn valuation(&self) -> Option<u32>;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Exact quotient; requires `valuation(other) <= valuation(self)`.
    fn div_exact(&self, other: &Self) -> Self;
    fn zero_like(&self) -> Self {
        Self::from_i64(0, self.prime())
    }
    fn one_like(&self) -> Self {
        Self::from_i64(1, self.prime())
    }
    fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }
}

/// An element of Z_(p): a fraction in lowest terms whose denominator is prime
/// to p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLocalScalar {
    value: BigRational,
    p: u64,
}

impl PLocalScalar {
    pub fn new(value: BigRational, p: u64) -> Result<Self> {
        if int_valuation(value.denom(), p) > 0 {
            return Err(Error::IntegralityFailure {
                context: format!("Z_({p}) scalar"),
                coefficient: value.to_string(),
            });
        }
        Ok(PLocalScalar { value, p })
    }

    pub fn from_int(n: i64, p: u64) -> Self {
        PLocalScalar { value: BigRational::from_integer(BigInt::from(n)), p }
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn numerator(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.value.denom()
    }

    /// Image in F_p.
    pub fn reduce(&self) -> Fp {
        let p = BigInt::from(self.p);
        let n = self.value.numer().mod_floor(&p).to_u64().unwrap();
        let d = self.value.denom().mod_floor(&p).to_u64().unwrap();
        Fp::new(n, self.p).mul(&Fp::new(d, self.p).inverse())
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_unit() {
            Some(PLocalScalar { value: self.value.recip(), p: self.p })
        } else {
            None
        }
    }
}

impl fmt::Debug for PLocalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for PLocalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl LocalRing for PLocalScalar {
    fn prime(&self) -> u64 {
        self.p
    }
    fn from_i64(n: i64, p: u64) -> Self {
        PLocalScalar::from_int(n, p)
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
    fn valuation(&self) -> Option<u32> {
        if self.value.is_zero() {
            None
        } else {
            Some(int_valuation(self.value.numer(), self.p))
        }
    }
    fn add(&self, o: &Self) -> Self {
        PLocalScalar { value: &self.value + &o.value, p: self.p }
    }
    fn sub(&self, o: &Self) -> Self {
        PLocalScalar { value: &self.value - &o.value, p: self.p }
    }
    fn mul(&self, o: &Self) -> Self {
        PLocalScalar { value: &self.value * &o.value, p: self.p }
    }
    fn neg(&self) -> Self {
        PLocalScalar { value: -&self.value, p: self.p }
    }
    fn div_exact(&self, o: &Self) -> Self {
        PLocalScalar { value: &self.value / &o.value, p: self.p }
    }
}

/// An element of the prime field F_p.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    v: u32,
    p: u32,
}

impl Fp {
    pub fn new(v: u64, p: u64) -> Self {
        Fp { v: (v % p) as u32, p: p as u32 }
    }

    pub fn from_signed(v: i64, p: u64) -> Self {
        Fp { v: v.rem_euclid(p as i64) as u32, p: p as u32 }
    }

    pub fn value(self) -> u32 {
        self.v
    }

    pub fn inverse(self) -> Fp {
        assert!(self.v != 0, "inverse of zero in F_{}", self.p);
        // Fermat
        let mut result = 1u64;
        let mut base = self.v as u64;
        let mut e = self.p as u64 - 2;
        let p = self.p as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Fp { v: result as u32, p: self.p }
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl LocalRing for Fp {
    fn prime(&self) -> u64 {
        self.p as u64
    }
    fn from_i64(n: i64, p: u64) -> Self {
        Fp::from_signed(n, p)
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn valuation(&self) -> Option<u32> {
        if self.v == 0 {
            None
        } else {
            Some(0)
        }
    }
    fn add(&self, o: &Self) -> Self {
        Fp { v: ((self.v as u64 + o.v as u64) % self.p as u64) as u32, p: self.p }
    }
    fn sub(&self, o: &Self) -> Self {
        Fp { v: ((self.v as u64 + self.p as u64 - o.v as u64) % self.p as u64) as u32, p: self.p }
    }
    fn mul(&self, o: &Self) -> Self {
        Fp { v: ((self.v as u64 * o.v as u64) % self.p as u64) as u32, p: self.p }
    }
    fn neg(&self) -> Self {
        Fp { v: (self.p - self.v) % self.p, p: self.p }
    }
    fn div_exact(&self, o: &Self) -> Self {
        self.mul(&o.inverse())
    }
}

/// Dense matrix over a local ring, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<R> {
    pub rows: usize,
    pub cols: usize,
    pub p: u64,
    data: Vec<Vec<R>>,
}

impl<R: LocalRing> fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl<R: LocalRing> Matrix<R> {
    pub fn zero(rows: usize, cols: usize, p: u64) -> Self {
        Matrix { rows, cols, p, data: vec![vec![R::from_i64(0, p); cols]; rows] }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        let mut m = Self::zero(n, n, p);
        for i in 0..n {
            m.data[i][i] = R::from_i64(1, p);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>, cols: usize, p: u64) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols));
        Matrix { rows: rows.len(), cols, p, data: rows }
    }

    pub fn from_i64(rows: &[Vec<i64>], p: u64) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().map(|r| r.iter().map(|&x| R::from_i64(x, p)).collect()).collect();
        Matrix { rows: rows.len(), cols, p, data }
    }

    pub fn get(&self, r: usize, c: usize) -> &R {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: R) {
        self.data[r][c] = v;
    }

    pub fn row(&self, r: usize) -> &[R] {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> Vec<R> {
        self.data.iter().map(|row| row[c].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().map(|r| r.iter().filter(|x| !x.is_zero()).count()).sum()
    }

    pub fn mul(&self, o: &Matrix<R>) -> Matrix<R> {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let mut out: Matrix<R> = Matrix::zero(self.rows, o.cols, self.p);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] = out.data[i][j].add(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[R]) -> Vec<R> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                row.iter().zip(v).fold(R::from_i64(0, self.p), |acc, (a, b)| {
                    if a.is_zero() || b.is_zero() {
                        acc
                    } else {
                        acc.add(&a.mul(b))
                    }
                })
            })
            .collect()
    }

    /// Rows `start..` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> Matrix<R> {
        Matrix { rows: end - start, cols: self.cols, p: self.p, data: self.data[start..end].to_vec() }
    }

    pub fn column_range(&self, start: usize, end: usize) -> Matrix<R> {
        let data = self.data.iter().map(|r| r[start..end].to_vec()).collect();
        Matrix { rows: self.rows, cols: end - start, p: self.p, data }
    }

    pub fn transpose(&self) -> Matrix<R> {
        let mut out: Matrix<R> = Matrix::zero(self.cols, self.rows, self.p);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j][i] = self.data[i][j].clone();
            }
        }
        out
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, c: &R) {
        if c.is_zero() {
            return;
        }
        let (t, s) = if target < source {
            let (a, b) = self.data.split_at_mut(source);
            (&mut a[target], &b[0])
        } else {
            let (a, b) = self.data.split_at_mut(target);
            (&mut b[0], &a[source])
        };
        for (x, y) in t.iter_mut().zip(s.iter()) {
            if !y.is_zero() {
                *x = x.add(&c.mul(y));
            }
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, c: &R) {
        if c.is_zero() {
            return;
        }
        for row in self.data.iter_mut() {
            if !row[source].is_zero() {
                let v = row[target].add(&c.mul(&row[source]));
                row[target] = v;
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for row in self.data.iter_mut() {
                row.swap(a, b);
            }
        }
    }
}

/// Sparse matrix over Z_(p) stored as (row, col) -> entry triplets.
#[derive(Clone, Debug, PartialEq)]
pub struct PLocalMatrix {
    pub rows: usize,
    pub cols: usize,
    pub p: u64,
    pub entries: BTreeMap<(usize, usize), PLocalScalar>,
}

impl PLocalMatrix {
    pub fn new(rows: usize, cols: usize, p: u64) -> Self {
        PLocalMatrix { rows, cols, p, entries: BTreeMap::new() }
    }

    pub fn from_i64(rows: &[Vec<i64>], p: u64) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = PLocalMatrix::new(rows.len(), cols, p);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, PLocalScalar::from_int(x, p));
            }
        }
        m
    }

    pub fn set(&mut self, r: usize, c: usize, v: PLocalScalar) {
        assert_eq!(v.p, self.p, "mixed primes in one matrix");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn to_dense(&self) -> Matrix<PLocalScalar> {
        let mut m = Matrix::zero(self.rows, self.cols, self.p);
        for (&(r, c), v) in &self.entries {
            m.set(r, c, v.clone());
        }
        m
    }

    pub fn from_dense(m: &Matrix<PLocalScalar>) -> Self {
        let mut out = PLocalMatrix::new(m.rows, m.cols, m.p);
        for r in 0..m.rows {
            for c in 0..m.cols {
                if !m.get(r, c).is_zero() {
                    out.entries.insert((r, c), m.get(r, c).clone());
                }
            }
        }
        out
    }

    pub fn reduce(&self) -> Matrix<Fp> {
        let mut m = Matrix::zero(self.rows, self.cols, self.p);
        for (&(r, c), v) in &self.entries {
            m.set(r, c, v.reduce());
        }
        m
    }
}

/// Result of a Smith normal form: `left * m * right = diag`.
#[derive(Clone, Debug)]
pub struct SmithForm<R: LocalRing> {
    /// Diagonal entries, length `min(rows, cols)`; nonzero entries come first
    /// and each divides the next.
    pub diag: Vec<R>,
    pub left: Matrix<R>,
    pub left_inv: Matrix<R>,
    pub right: Matrix<R>,
    pub right_inv: Matrix<R>,
}

impl<R: LocalRing> SmithForm<R> {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form over a local PID. Pivots are chosen by minimal valuation,
/// then minimal (row, col) index.
pub fn smith_normal_form<R: LocalRing>(m: &Matrix<R>) -> SmithForm<R> {
    let p = m.p;
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut left = Matrix::identity(rows, p);
    let mut left_inv = Matrix::identity(rows, p);
    let mut right = Matrix::identity(cols, p);
    let mut right_inv = Matrix::identity(cols, p);
    let steps = rows.min(cols);
    let mut diag = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for i in k..rows {
            for j in k..cols {
                if let Some(v) = a.get(i, j).valuation() {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                        if v == 0 {
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else {
            diag.extend((k..steps).map(|_| R::from_i64(0, p)));
            break;
        };
        if pi != k {
            a.data.swap(pi, k);
            left.data.swap(pi, k);
            left_inv.swap_cols(pi, k);
        }
        if pj != k {
            a.swap_cols(pj, k);
            right.swap_cols(pj, k);
            right_inv.data.swap(pj, k);
        }
        let pivot = a.get(k, k).clone();
        for i in (k + 1)..rows {
            if a.get(i, k).is_zero() {
                continue;
            }
            let c = a.get(i, k).div_exact(&pivot);
            a.add_row_multiple(i, k, &c.neg());
            left.add_row_multiple(i, k, &c.neg());
            left_inv.add_col_multiple(k, i, &c);
        }
        for j in (k + 1)..cols {
            if a.get(k, j).is_zero() {
                continue;
            }
            let c = a.get(k, j).div_exact(&pivot);
            a.add_col_multiple(j, k, &c.neg());
            right.add_col_multiple(j, k, &c.neg());
            right_inv.add_row_multiple(k, j, &c);
        }
        diag.push(pivot);
    }
    SmithForm { diag, left, left_inv, right, right_inv }
}

/// Smith normal form of a sparse Z_(p) matrix, returned in the sparse type.
pub fn smith_normal_form_plocal(m: &PLocalMatrix) -> (Vec<PLocalScalar>, PLocalMatrix, PLocalMatrix) {
    let snf = smith_normal_form(&m.to_dense());
    (snf.diag, PLocalMatrix::from_dense(&snf.left), PLocalMatrix::from_dense(&snf.right))
}

/// Rank of a matrix over F_p by row reduction (no transforms).
pub fn rank_fp(m: &Matrix<Fp>) -> usize {
    let mut a = m.clone();
    let mut rank = 0;
    for c in 0..a.cols {
        let Some(piv) = (rank..a.rows).find(|&r| !a.get(r, c).is_zero()) else {
            continue;
        };
        a.data.swap(piv, rank);
        let inv = a.get(rank, c).inverse();
        for r in (rank + 1)..a.rows {
            if !a.get(r, c).is_zero() {
                let f = a.get(r, c).mul(&inv).neg();
                a.add_row_multiple(r, rank, &f);
            }
        }
        rank += 1;
        if rank == a.rows {
            break;
        }
    }
    rank
}

/// A finitely generated Z_(p)-module: free part plus cyclic p-power torsion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub struct FGPGroup {
    pub p: u64,
    pub free_rank: usize,
    /// Exponents e_i of the torsion summands Z/p^{e_i}, sorted ascending.
    pub torsion: Vec<u32>,
}

impl FGPGroup {
    pub fn zero(p: u64) -> Self {
        FGPGroup { p, free_rank: 0, torsion: vec![] }
    }

    pub fn free(p: u64, rank: usize) -> Self {
        FGPGroup { p, free_rank: rank, torsion: vec![] }
    }

    pub fn elementary(p: u64, dim: usize) -> Self {
        FGPGroup { p, free_rank: 0, torsion: vec![1; dim] }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Number of cyclic summands.
    pub fn generator_count(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Length of the torsion part (sum of exponents); together with the free
    /// rank this is additive in short exact sequences.
    pub fn torsion_length(&self) -> u32 {
        self.torsion.iter().sum()
    }

    /// Comma-joined p-powers, e.g. `3,9`.
    pub fn torsion_string(&self) -> String {
        self.torsion.iter().map(|&e| self.p.pow(e).to_string()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for FGPGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            let base = format!("Z_({})", self.p);
            parts.push(if self.free_rank == 1 { base } else { format!("{}^{}", base, self.free_rank) });
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let e = self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|&&x| x == e).count();
            let base = format!("Z/{}", self.p.pow(e));
            parts.push(if run == 1 { base } else { format!("({})^{}", base, run) });
            i += run;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Order of a homology generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Infinite,
    /// p^e
    PPower(u32),
}

/// Homology at one spot of a chain complex, with generator representatives in
/// the original basis of the middle term.
#[derive(Clone, Debug)]
pub struct Homology<R: LocalRing> {
    pub group: FGPGroup,
    pub generators: Vec<(Vec<R>, Order)>,
}

/// Homology `ker(d_out) / im(d_in)` where `d_in: C_{prev} -> C` and
/// `d_out: C -> C_{next}` (column vectors; `d_in` is `dim C x dim C_prev`).
pub fn homology<R: LocalRing>(d_in: &Matrix<R>, d_out: &Matrix<R>) -> Result<Homology<R>> {
    let n = d_out.cols;
    assert_eq!(d_in.rows, n, "middle dimensions disagree");
    let p = d_out.p;
    let comp = d_out.mul(d_in);
    if !comp.is_zero() {
        return Err(Error::CompositionNotZero(comp.nonzero_count()));
    }
    let out_snf = smith_normal_form(d_out);
    let r = out_snf.rank();
    // Kernel basis: columns r.. of `right`; coordinates of x in that basis are
    // rows r.. of right_inv * x.
    let kernel = out_snf.right.column_range(r, n);
    let coords = out_snf.right_inv.row_range(r, n).mul(d_in);
    let k = n - r;
    let in_snf = smith_normal_form(&coords);
    // New kernel basis kernel * left_inv; the image is spanned by diag[i] times
    // the i-th new basis vector.
    let basis = kernel.mul(&in_snf.left_inv);
    let mut group = FGPGroup::zero(p);
    let mut generators = Vec::new();
    for i in 0..k {
        let d = in_snf.diag.get(i);
        let order = match d.and_then(|d| d.valuation()) {
            Some(0) => continue,
            Some(e) => Order::PPower(e),
            None => Order::Infinite,
        };
        match order {
            Order::Infinite => group.free_rank += 1,
            Order::PPower(e) => group.torsion.push(e),
        }
        generators.push((basis.column(i), order));
    }
    // Sort generators to match the canonical (free first, torsion ascending)
    // ordering of the group description.
    generators.sort_by_key(|(_, o)| match o {
        Order::Infinite => 0,
        Order::PPower(e) => 1 + *e as u64,
    });
    group.torsion.sort_unstable();
    Ok(Homology { group, generators })
}

/// `homology` on sparse Z_(p) input; `ambient` is the rank of the middle term
/// (needed when both maps have no entries).
pub fn homology_group(d_in: &PLocalMatrix, d_out: &PLocalMatrix) -> Result<FGPGroup> {
    Ok(homology(&d_in.to_dense(), &d_out.to_dense())?.group)
}

/// Turn a rational into a Z_(p) scalar, failing with context if it has p in
/// the denominator.
pub fn to_plocal(q: &BigRational, p: u64, context: &str) -> Result<PLocalScalar> {
    PLocalScalar::new(q.clone(), p)
        .map_err(|_| Error::IntegralityFailure { context: context.to_string(), coefficient: q.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_valuations<R: LocalRing>(d: &[R]) -> Vec<Option<u32>> {
        d.iter().map(|x| x.valuation()).collect()
    }

    #[test]
    fn one_by_one_p() {
        let m: Matrix<PLocalScalar> = Matrix::from_i64(&[vec![3]], 3);
        let snf = smith_normal_form(&m);
        assert_eq!(diag_valuations(&snf.diag), vec![Some(1)]);
    }

    #[test]
    fn two_by_two_at_two() {
        // Hand reduction over Z_(2): [[2,4],[6,8]] -> rows: r2 - 3 r1 = [0,-4];
        // cols: c2 - 2 c1 -> diag(2, -4), i.e. 2 and 4 up to units.
        let m: Matrix<PLocalScalar> = Matrix::from_i64(&[vec![2, 4], vec![6, 8]], 2);
        let snf = smith_normal_form(&m);
        assert_eq!(diag_valuations(&snf.diag), vec![Some(1), Some(2)]);
        let d = snf.left.mul(&m).mul(&snf.right);
        assert_eq!(d.get(0, 1), &PLocalScalar::from_int(0, 2));
        assert_eq!(d.get(1, 0), &PLocalScalar::from_int(0, 2));
        assert_eq!(d.get(0, 0), &snf.diag[0]);
        assert_eq!(d.get(1, 1), &snf.diag[1]);
    }

    #[test]
    fn zero_matrix() {
        let m: Matrix<PLocalScalar> = Matrix::zero(2, 3, 5);
        let snf = smith_normal_form(&m);
        assert!(snf.diag.iter().all(|d| d.is_zero()));
        assert_eq!(snf.rank(), 0);
    }

    #[test]
    fn homology_examples() {
        let p = 3;
        let z01: Matrix<PLocalScalar> = Matrix::zero(1, 0, p);
        let z10: Matrix<PLocalScalar> = Matrix::zero(0, 1, p);
        let h = homology(&z01, &z10).unwrap();
        assert_eq!(h.group, FGPGroup::free(p, 1));

        let d_in: Matrix<PLocalScalar> = Matrix::from_i64(&[vec![3]], p);
        let h = homology(&d_in, &z10).unwrap();
        assert_eq!(h.group.torsion, vec![1]);
        assert_eq!(h.group.free_rank, 0);
        assert_eq!(h.generators.len(), 1);
    }

    #[test]
    fn composition_checked() {
        let d_in: Matrix<PLocalScalar> = Matrix::from_i64(&[vec![1]], 2);
        let d_out: Matrix<PLocalScalar> = Matrix::from_i64(&[vec![1]], 2);
        assert!(matches!(homology(&d_in, &d_out), Err(Error::CompositionNotZero(1))));
    }

    #[test]
    fn sparse_entry_point() {
        let m = PLocalMatrix::from_i64(&[vec![2, 4], vec![6, 8]], 2);
        let (diag, l, r) = smith_normal_form_plocal(&m);
        assert_eq!(diag_valuations(&diag), vec![Some(1), Some(2)]);
        let d = l.to_dense().mul(&m.to_dense()).mul(&r.to_dense());
        assert_eq!(d.nonzero_count(), 2);
        let hg = homology_group(&PLocalMatrix::from_i64(&[vec![9]], 3), &PLocalMatrix::new(0, 1, 3)).unwrap();
        assert_eq!(hg.torsion, vec![2]);
        assert_eq!(hg.to_string(), "Z/9");
    }

    #[test]
    fn fp_inverse_and_rank() {
        for p in [2u64, 3, 5, 7] {
            for v in 1..p {
                assert_eq!(Fp::new(v, p).mul(&Fp::new(v, p).inverse()), Fp::new(1, p));
            }
        }
        let m: Matrix<Fp> = Matrix::from_i64(&[vec![1, 2], vec![2, 4]], 5);
        assert_eq!(rank_fp(&m), 1);
    }

    #[test]
    fn reduction_mod_p() {
        let q = PLocalScalar::new(BigRational::new(BigInt::from(1), BigInt::from(2)), 3).unwrap();
        assert_eq!(q.reduce(), Fp::new(2, 3));
        assert!(PLocalScalar::new(BigRational::new(BigInt::from(1), BigInt::from(3)), 3).is_err());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..5, 1usize..5)
            .prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-12i64..12, c), r))
    }

    proptest! {
        #[test]
        fn snf_reconstructs_diagonal(rows in small_matrix(), p in prop::sample::select(vec![2u64, 3, 5])) {
            let m: Matrix<PLocalScalar> = Matrix::from_i64(&rows, p);
            let snf = smith_normal_form(&m);
            let d = snf.left.mul(&m).mul(&snf.right);
            for i in 0..d.rows {
                for j in 0..d.cols {
                    if i == j {
                        prop_assert_eq!(d.get(i, j), &snf.diag[i]);
                    } else {
                        prop_assert!(d.get(i, j).is_zero());
                    }
                }
            }
            prop_assert_eq!(snf.left.mul(&snf.left_inv), Matrix::identity(m.rows, p));
            prop_assert_eq!(snf.right.mul(&snf.right_inv), Matrix::identity(m.cols, p));
            let vals: Vec<_> = snf.diag.iter().map(|x| x.valuation()).collect();
            for w in vals.windows(2) {
                match (w[0], w[1]) {
                    (Some(a), Some(b)) => prop_assert!(a <= b),
                    (None, Some(_)) => prop_assert!(false, "zero before nonzero"),
                    _ => {}
                }
            }
        }

        #[test]
        fn homology_matches_fp_rank_count(rows in small_matrix(), p in prop::sample::select(vec![2u64, 3])) {
            // A complex 0 -> Z^c --m--> Z^r -> 0 with the homology at Z^c and Z^r.
            // When the cokernel is p-torsion free the ranks over F_p agree with
            // rank-nullity.
            let m: Matrix<PLocalScalar> = Matrix::from_i64(&rows, p);
            let snf = smith_normal_form(&m);
            prop_assume!(snf.diag.iter().all(|d| d.is_zero() || d.is_unit()));
            let zero_in: Matrix<PLocalScalar> = Matrix::zero(m.cols, 0, p);
            let zero_out: Matrix<PLocalScalar> = Matrix::zero(0, m.rows, p);
            let ker = homology(&zero_in, &m).unwrap().group;
            let coker = homology(&m, &zero_out).unwrap().group;
            let fp: Matrix<Fp> = Matrix::from_i64(&rows, p);
            let rk = rank_fp(&fp);
            prop_assert_eq!(ker.free_rank, m.cols - rk);
            prop_assert_eq!(coker.free_rank, m.rows - rk);
            prop_assert!(ker.torsion.is_empty() && coker.torsion.is_empty());
        }
    }
}
