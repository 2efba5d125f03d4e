//! Reduced cobar complex `Γ̄^{⊗s} ⊗_A M` and `Ext^{s,t}_Γ(A, M)`.
//!
//! Cells are right-normal tuples `[t^{β_1}|…|t^{β_s}] m` with every `β_i ≠ 0`
//! and `m` a basis element of `M`. The differential is `Σ_j (−1)^j d_j` where
//! `d_0` applies the reduced coaction to `m` and `d_j` (`j ≥ 1`) applies the
//! reduced diagonal to slot `s + 1 − j`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::comodule::{canon_tensor, is_zero_vec, zero_vec, DynComodule, Scalar, Tensor};
use crate::error::{Error, Result};
use crate::gradedpoly::{bp_degree, monomials_of_degree, render_monomial, Coeff, Exponents};
use crate::scalar::{homology, FGPGroup, Fp, Matrix, Order};

/// A basis cell: the t-monomials of the bar slots and a piece index of `M`.
pub type Cell = (Vec<Exponents>, usize);

pub struct CobarComplex<C: Scalar> {
    pub module: DynComodule<C>,
    pub smax: usize,
    pub tmin: i64,
    pub tmax: i64,
    /// Homology is taken over F_p (every piece is an F_p-vector space).
    pub over_field: bool,
    bases: BTreeMap<(usize, i64), Vec<Cell>>,
    index: HashMap<(usize, i64), HashMap<Cell, usize>>,
    /// `d: C^{s,t} → C^{s+1,t}`, rows indexed by `C^{s+1,t}`.
    diffs: BTreeMap<(usize, i64), Matrix<C>>,
}

fn is_zero_mono(e: &[i32]) -> bool {
    e.iter().all(|&x| x == 0)
}

impl<C: Scalar> CobarComplex<C> {
    /// Build the complex for `0 ≤ s ≤ smax + 1` and `tmin ≤ t ≤ tmax`, and check
    /// `d∘d = 0` throughout.
    pub fn build(module: DynComodule<C>, smax: usize, tmin: i64, tmax: i64) -> Result<Self> {
        let engine = module.engine().clone();
        let p = engine.p();
        let q = 2 * (p as i64 - 1);
        let tc = engine.hopf.t_count();
        let tdeg: Vec<i64> = (1..=tc).map(|i| bp_degree(p, i)).collect();
        let missing = bp_degree(p, tc + 1);
        let bottom = module.bottom_degree();
        if tmax > module.top_degree() {
            return Err(Error::DegreeBoundExceeded { requested: tmax, bound: module.top_degree() });
        }
        let mut free = false;
        let mut torsion = false;
        for d in bottom..=tmax {
            for o in &module.piece(d)?.orders {
                match o {
                    Order::Infinite => free = true,
                    Order::PPower(1) => torsion = true,
                    Order::PPower(_) => {
                        return Err(Error::Unsupported(format!("cobar over {}: higher torsion", module.label())))
                    }
                }
            }
        }
        let over_field = crate::comodule::is_field::<C>(p) || !free;
        if free && torsion && !crate::comodule::is_field::<C>(p) {
            return Err(Error::Unsupported(format!("cobar over {}: mixed torsion", module.label())));
        }
        let mut monos: BTreeMap<i64, Vec<Exponents>> = BTreeMap::new();
        let mut bases = BTreeMap::new();
        let mut index = HashMap::new();
        for s in 0..=smax + 1 {
            for t in tmin..=tmax {
                let mut cells = Vec::new();
                if s >= 1 && t - bottom - (s as i64 - 1) * q >= missing && t - bottom >= s as i64 * q {
                    return Err(Error::DegreeBoundExceeded {
                        requested: t - bottom - (s as i64 - 1) * q,
                        bound: missing - 1,
                    });
                }
                let mut u = s as i64 * q;
                while t - u >= bottom {
                    let dm = t - u;
                    let dim = module.piece(dm)?.dim();
                    if dim > 0 {
                        for tuple in tuples(s, u, q, &tdeg, &mut monos) {
                            for i in 0..dim {
                                cells.push((tuple.clone(), i));
                            }
                        }
                    }
                    if s == 0 {
                        break;
                    }
                    u += q;
                }
                let idx: HashMap<Cell, usize> = cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
                index.insert((s, t), idx);
                bases.insert((s, t), cells);
            }
        }
        let mut cx = CobarComplex { module, smax, tmin, tmax, over_field, bases, index, diffs: BTreeMap::new() };
        for s in 0..=smax {
            for t in tmin..=tmax {
                let d = cx.differential(s, t)?;
                cx.diffs.insert((s, t), d);
            }
        }
        for s in 0..smax {
            for t in tmin..=tmax {
                let dd = cx.diffs[&(s + 1, t)].mul(&cx.diffs[&(s, t)]);
                let nz = if cx.over_field {
                    (0..dd.rows).flat_map(|r| dd.row(r).iter()).filter(|c| c.to_fp().value() != 0).count()
                } else {
                    dd.nonzero_count()
                };
                if nz != 0 {
                    return Err(Error::CompositionNotZero(nz));
                }
            }
        }
        Ok(cx)
    }

    pub fn basis(&self, s: usize, t: i64) -> &[Cell] {
        self.bases.get(&(s, t)).map_or(&[], |v| v.as_slice())
    }

    pub fn cell_index(&self, s: usize, t: i64, cell: &Cell) -> Option<usize> {
        self.index.get(&(s, t)).and_then(|m| m.get(cell)).copied()
    }

    pub fn dim(&self, s: usize, t: i64) -> usize {
        self.basis(s, t).len()
    }

    pub fn d(&self, s: usize, t: i64) -> Option<&Matrix<C>> {
        self.diffs.get(&(s, t))
    }

    fn differential(&self, s: usize, t: i64) -> Result<Matrix<C>> {
        let m = &*self.module;
        let engine = m.engine();
        let p = engine.p();
        let n = engine.n();
        let src = self.basis(s, t);
        let dst = &self.index[&(s + 1, t)];
        let rows = self.dim(s + 1, t);
        let mut mat = Matrix::<C>::zero(rows, src.len(), p);
        let one = <C as Coeff>::from_i64(1, p);
        let minus = <C as Coeff>::from_i64(-1, p);
        for (col, (keys, i)) in src.iter().enumerate() {
            let used: i64 = keys.iter().map(|b| engine.t_degree(b)).sum();
            let dm = t - used;
            let dim = m.piece(dm)?.dim();
            let mut unit = zero_vec::<C>(dim, p);
            unit[*i] = one.clone();
            let mut out: Tensor<C> = Tensor::new();
            for (beta, y) in m.coaction(dm, *i)?.iter() {
                if is_zero_mono(beta) {
                    continue;
                }
                let mut k = keys.clone();
                k.push(beta.clone());
                add_to(&mut out, k, y, &one, p);
            }
            for j in 1..=s {
                let slot = s - j;
                let sign = if j % 2 == 1 { minus.clone() } else { one.clone() };
                let delta = engine.delta(&keys[slot])?;
                for (e, c) in &delta.terms {
                    let mut slots = vec![e[n..2 * n].to_vec(), e[2 * n..3 * n].to_vec()];
                    slots.extend(keys[slot + 1..].iter().cloned());
                    for (sl, a, c2) in engine.push(&e[..n], &slots)? {
                        if is_zero_mono(&sl[0]) || is_zero_mono(&sl[1]) {
                            continue;
                        }
                        let y = m.act(&a, dm, &unit)?;
                        if is_zero_vec(&y) {
                            continue;
                        }
                        let mut k: Vec<Exponents> = keys[..slot].to_vec();
                        k.extend(sl);
                        let f = Coeff::mul(&sign, &Coeff::mul(c, &c2));
                        add_to(&mut out, k, &y, &f, p);
                    }
                }
            }
            for (k, y) in canon_tensor(m, t, out)? {
                for (idx, c) in y.iter().enumerate() {
                    if Coeff::is_zero(c) {
                        continue;
                    }
                    let cell = (k.clone(), idx);
                    let Some(&r) = dst.get(&cell) else {
                        return Err(Error::Unsupported(format!(
                            "cobar cell {cell:?} outside the basis at ({}, {t})",
                            s + 1
                        )));
                    };
                    let v = Coeff::add(mat.get(r, col), c);
                    mat.set(r, col, v);
                }
            }
        }
        if self.over_field {
            for r in 0..mat.rows {
                for c in 0..mat.cols {
                    let v = mat.get(r, c).mod_ppow(1);
                    mat.set(r, c, v);
                }
            }
        }
        Ok(mat)
    }

    /// `Ext^{s,t}` with representatives in the cell basis of `C^{s,t}`.
    pub fn ext(&self, s: usize, t: i64) -> Result<ExtGroup<C>> {
        if s > self.smax || t < self.tmin || t > self.tmax {
            return Err(Error::DegreeBoundExceeded { requested: t, bound: self.tmax });
        }
        let p = self.module.engine().p();
        let dim = self.dim(s, t);
        let d_in = if s == 0 { Matrix::<C>::zero(dim, 0, p) } else { self.diffs[&(s - 1, t)].clone() };
        let d_out = &self.diffs[&(s, t)];
        let (group, reps) = if self.over_field {
            let f = |m: &Matrix<C>| {
                Matrix::from_rows(
                    (0..m.rows).map(|r| m.row(r).iter().map(|c| c.to_fp()).collect()).collect(),
                    m.cols,
                    p,
                )
            };
            let h = homology::<Fp>(&f(&d_in), &f(d_out))?;
            let reps: Vec<Vec<C>> = h
                .generators
                .iter()
                .map(|(v, _)| v.iter().map(|c| <C as Coeff>::from_i64(c.value() as i64, p)).collect())
                .collect();
            (FGPGroup::elementary(p, reps.len()), reps)
        } else {
            let h = homology(&d_in, d_out)?;
            (h.group, h.generators.into_iter().map(|(v, _)| v).collect())
        };
        let names = reps.iter().map(|v| self.render_chain(s, t, v)).collect::<Result<Vec<_>>>()?;
        Ok(ExtGroup { s, t, group, representatives: reps, names })
    }

    /// `[t1|t2] m` notation for a cochain.
    pub fn render_chain(&self, s: usize, t: i64, v: &[C]) -> Result<String> {
        let m = &*self.module;
        let engine = m.engine();
        let g = engine.hopf.grading(1);
        let n = engine.n();
        let mut parts = Vec::new();
        for ((keys, i), c) in self.basis(s, t).iter().zip(v) {
            if Coeff::is_zero(c) {
                continue;
            }
            let used: i64 = keys.iter().map(|b| engine.t_degree(b)).sum();
            let piece = m.piece(t - used)?;
            let bars: Vec<String> = keys
                .iter()
                .map(|b| {
                    let mut e = vec![0; n];
                    e.extend_from_slice(b);
                    render_monomial(&e, &g)
                })
                .collect();
            let mut term = String::new();
            if !Coeff::is_one(c) {
                write!(term, "{c}*").unwrap();
            }
            if s > 0 {
                write!(term, "[{}]", bars.join("|")).unwrap();
            }
            if s == 0 || piece.names[*i] != "1" {
                if s > 0 {
                    term.push(' ');
                }
                term.push_str(&piece.names[*i]);
            }
            parts.push(term);
        }
        Ok(if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }

    /// SHA-256 of a differential, for chart provenance.
    pub fn matrix_digest(&self, s: usize, t: i64) -> String {
        let mut h = Sha256::new();
        if let Some(m) = self.diffs.get(&(s, t)) {
            h.update(format!("{}x{}", m.rows, m.cols));
            for r in 0..m.rows {
                for c in m.row(r) {
                    h.update(c.to_string());
                    h.update(b",");
                }
            }
        }
        hex::encode(h.finalize())
    }

    pub fn chart(&self, meta: ChartMeta) -> Result<ExtChart> {
        let mut entries = BTreeMap::new();
        for s in 0..=self.smax {
            for t in self.tmin..=self.tmax {
                let e = self.ext(s, t)?;
                let prov = Provenance {
                    d_in: if s == 0 { None } else { Some(self.matrix_digest(s - 1, t)) },
                    d_out: self.matrix_digest(s, t),
                };
                entries.insert((s, t), ChartEntry { group: e.group, generators: e.names, provenance: Some(prov) });
            }
        }
        Ok(ExtChart { meta, entries })
    }
}

fn add_to<C: Scalar>(out: &mut Tensor<C>, k: Vec<Exponents>, y: &[C], f: &C, p: u64) {
    let slot = out.entry(k).or_insert_with(|| zero_vec(y.len(), p));
    crate::comodule::add_scaled(slot, y, f);
}

/// All `s`-tuples of nonzero t-monomials of total degree `u`.
fn tuples(s: usize, u: i64, q: i64, tdeg: &[i64], monos: &mut BTreeMap<i64, Vec<Exponents>>) -> Vec<Vec<Exponents>> {
    if s == 0 {
        return if u == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut first = q;
    while first <= u - (s as i64 - 1) * q {
        let heads = monos.entry(first).or_insert_with(|| monomials_of_degree(tdeg, first)).clone();
        if !heads.is_empty() {
            let tails = tuples(s - 1, u - first, q, tdeg, monos);
            for h in &heads {
                for tl in &tails {
                    let mut v = vec![h.clone()];
                    v.extend(tl.iter().cloned());
                    out.push(v);
                }
            }
        }
        first += q;
    }
    out
}

#[derive(Clone, Debug)]
pub struct ExtGroup<C> {
    pub s: usize,
    pub t: i64,
    pub group: FGPGroup,
    pub representatives: Vec<Vec<C>>,
    pub names: Vec<String>,
}

/// `Ext^{s,t}_Γ(A, M)` from a freshly built complex.
pub fn ext_group<C: Scalar>(module: DynComodule<C>, s: usize, t: i64) -> Result<ExtGroup<C>> {
    CobarComplex::build(module, s, t, t)?.ext(s, t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartMeta {
    pub prime: u64,
    pub vmax: usize,
    pub degree_bound: i64,
    pub hopf: String,
    pub module: String,
    pub smax: usize,
    pub tmin: i64,
    pub tmax: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub d_in: Option<String>,
    pub d_out: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartEntry {
    pub group: FGPGroup,
    pub generators: Vec<String>,
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtChart {
    pub meta: ChartMeta,
    pub entries: BTreeMap<(usize, i64), ChartEntry>,
}

pub const CHART_SCHEMA: &str = "chromalg-chart/1";

impl ExtChart {
    pub fn empty(meta: ChartMeta) -> Self {
        ExtChart { meta, entries: BTreeMap::new() }
    }

    pub fn get(&self, s: usize, t: i64) -> Option<&FGPGroup> {
        self.entries.get(&(s, t)).map(|e| &e.group)
    }

    /// Nonzero entries only, keyed by `(s, t)`.
    pub fn nonzero(&self) -> BTreeMap<(usize, i64), FGPGroup> {
        self.entries.iter().filter(|(_, e)| !e.group.is_zero()).map(|(k, e)| (*k, e.group.clone())).collect()
    }

    pub fn to_tsv(&self) -> String {
        let m = &self.meta;
        let mut out = format!(
            "# {CHART_SCHEMA}\tprime={}\tvmax={}\tD={}\thopf={}\tmodule={}\tsmax={}\tt={}..{}\n",
            m.prime, m.vmax, m.degree_bound, m.hopf, m.module, m.smax, m.tmin, m.tmax
        );
        out.push_str("s\tt\tfreeRank\ttorsion\tgenerators\n");
        for ((s, t), e) in &self.entries {
            writeln!(out, "{s}\t{t}\t{}\t{}\t{}", e.group.free_rank, e.group.torsion_string(), e.generators.join("; "))
                .unwrap();
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let perr = |line: usize, message: String| Error::Parse { line: line + 1, message };
        let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty chart".into()))?;
        let fields: Vec<&str> = header.trim_start_matches("# ").split('\t').collect();
        if fields.first() != Some(&CHART_SCHEMA) {
            return Err(perr(ln, format!("expected schema {CHART_SCHEMA}")));
        }
        let mut kv = HashMap::new();
        for f in &fields[1..] {
            let (k, v) = f.split_once('=').ok_or_else(|| perr(ln, format!("bad field {f}")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| perr(ln, format!("missing {k}")));
        let num = |k: &str| -> Result<i64> { get(k)?.parse().map_err(|_| perr(ln, format!("bad {k}"))) };
        let (tmin, tmax) = get("t")?.split_once("..").ok_or_else(|| perr(ln, "bad t range".into()))?;
        let meta = ChartMeta {
            prime: num("prime")? as u64,
            vmax: num("vmax")? as usize,
            degree_bound: num("D")?,
            hopf: get("hopf")?.to_string(),
            module: get("module")?.to_string(),
            smax: num("smax")? as usize,
            tmin: tmin.parse().map_err(|_| perr(ln, "bad t range".into()))?,
            tmax: tmax.parse().map_err(|_| perr(ln, "bad t range".into()))?,
        };
        let p = meta.prime;
        match lines.next() {
            Some((_, "s\tt\tfreeRank\ttorsion\tgenerators")) => {}
            Some((ln, _)) => return Err(perr(ln, "missing column header".into())),
            None => return Err(perr(1, "missing column header".into())),
        }
        let mut entries = BTreeMap::new();
        for (ln, line) in lines {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(perr(ln, format!("expected 5 columns, found {}", cols.len())));
            }
            let bad = |what: &str| perr(ln, format!("bad {what}"));
            let s: usize = cols[0].parse().map_err(|_| bad("s"))?;
            let t: i64 = cols[1].parse().map_err(|_| bad("t"))?;
            let free_rank: usize = cols[2].parse().map_err(|_| bad("freeRank"))?;
            let mut torsion = Vec::new();
            if !cols[3].is_empty() {
                for x in cols[3].split(',') {
                    let mut v: u64 = x.parse().map_err(|_| bad("torsion"))?;
                    let mut e = 0;
                    while v > 1 && v % p == 0 {
                        v /= p;
                        e += 1;
                    }
                    if v != 1 || e == 0 {
                        return Err(bad("torsion"));
                    }
                    torsion.push(e);
                }
            }
            let generators =
                if cols[4].is_empty() { Vec::new() } else { cols[4].split("; ").map(String::from).collect() };
            entries
                .insert((s, t), ChartEntry { group: FGPGroup { p, free_rank, torsion }, generators, provenance: None });
        }
        Ok(ExtChart { meta, entries })
    }

    /// Dot chart at `(t − s, s)`; each dot is labelled by its group.
    pub fn to_svg(&self) -> String {
        let cell = 48;
        let pts: Vec<(i64, usize, &ChartEntry)> =
            self.entries.iter().filter(|(_, e)| !e.group.is_zero()).map(|((s, t), e)| (t - *s as i64, *s, e)).collect();
        let xmin = (self.meta.tmin - self.meta.smax as i64).min(0);
        let xmax = self.meta.tmax.max(xmin + 1);
        let w = (xmax - xmin + 2) * cell;
        let h = (self.meta.smax as i64 + 2) * cell;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" data-schema=\"{CHART_SCHEMA}\">\n"
        );
        writeln!(out, "<title>Ext {} over {}</title>", xml(&self.meta.module), xml(&self.meta.hopf)).unwrap();
        for x in xmin..=xmax {
            let px = (x - xmin + 1) * cell;
            writeln!(out, "<text x=\"{px}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{x}</text>", h - 4)
                .unwrap();
        }
        for s in 0..=self.meta.smax {
            let py = h - (s as i64 + 1) * cell;
            writeln!(out, "<text x=\"4\" y=\"{py}\" font-size=\"10\">{s}</text>").unwrap();
        }
        for (x, s, e) in pts {
            let px = (x - xmin + 1) * cell;
            let py = h - (s as i64 + 1) * cell;
            writeln!(out, "<circle cx=\"{px}\" cy=\"{py}\" r=\"4\"/>").unwrap();
            writeln!(
                out,
                "<text x=\"{px}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{}</text>",
                py - 8,
                xml(&e.group.to_string())
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodule::{primitives, CoactionEngine, FPComodule, RegionComodule};
    use crate::hopf::BpHopf;
    use crate::scalar::{LocalRing, PLocalScalar};
    use std::sync::Arc;

    fn unit(p: u64, n: usize, d: i64) -> DynComodule<PLocalScalar> {
        let e = CoactionEngine::new(Arc::new(BpHopf::generate(p, n, d).unwrap()), 0).unwrap();
        FPComodule::unit(e).unwrap().to_dyn()
    }

    #[test]
    fn low_cells() {
        let m = unit(3, 2, 20);
        let cx = CobarComplex::build(m, 1, 0, 4).unwrap();
        assert_eq!(cx.dim(0, 0), 1);
        assert_eq!(cx.basis(1, 4), &[(vec![vec![1, 0]], 0)]);
        assert_eq!(cx.dim(1, 2), 0);
    }

    #[test]
    fn alpha_one() {
        for p in [2u64, 3] {
            let q = 2 * (p as i64 - 1);
            let m = unit(p, 2, 4 * q + 4);
            let cx = CobarComplex::build(m, 2, 0, q).unwrap();
            assert_eq!(cx.ext(0, 0).unwrap().group, FGPGroup::free(p, 1));
            let e = cx.ext(1, q).unwrap();
            assert_eq!(e.group, FGPGroup { p, free_rank: 0, torsion: vec![1] });
            let rep = &e.representatives[0];
            assert_eq!(rep.len(), 1);
            assert_eq!(rep[0].valuation(), Some(0));
            for t in 0..q {
                assert!(cx.ext(1, t).unwrap().group.is_zero());
                assert!(cx.ext(2, t).unwrap().group.is_zero());
            }
        }
    }

    #[test]
    fn d_of_t1_vanishes_at_p2() {
        let m = unit(2, 2, 12);
        let cx = CobarComplex::build(m, 1, 2, 2).unwrap();
        let d = cx.d(1, 2).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn ext0_matches_primitives() {
        let p = 3;
        let e = CoactionEngine::new(Arc::new(BpHopf::generate(p, 2, 24).unwrap()), 0).unwrap();
        for k in 0..=2 {
            let m = FPComodule::a_mod_i(e.clone(), k).unwrap().to_dyn();
            let cx = CobarComplex::build(m.clone(), 0, 0, 20).unwrap();
            let prims = primitives(&*m, 0, 20).unwrap();
            for t in 0..=20 {
                let g = cx.ext(0, t).unwrap().group;
                assert_eq!(g.generator_count(), prims.dims()[&t], "k={k} t={t}");
            }
        }
    }

    #[test]
    fn region_coefficients() {
        let p = 3;
        let e = CoactionEngine::new(Arc::new(BpHopf::generate(p, 2, 40).unwrap()), 1).unwrap();
        let r: DynComodule<PLocalScalar> = Arc::new(RegionComodule::localized(e, 1, 3).unwrap());
        let cx = CobarComplex::build(r, 1, -12, 8).unwrap();
        for t in -12..=8 {
            let g = cx.ext(0, t).unwrap().group;
            let expect = if t % 4 == 0 { 1 } else { 0 };
            assert_eq!(g.generator_count(), expect, "t={t}");
        }
    }

    #[test]
    fn tsv_round_trip() {
        let m = unit(3, 2, 24);
        let cx = CobarComplex::build(m, 2, 0, 16).unwrap();
        let meta = ChartMeta {
            prime: 3,
            vmax: 2,
            degree_bound: 24,
            hopf: "BP".into(),
            module: "A".into(),
            smax: 2,
            tmin: 0,
            tmax: 16,
        };
        let chart = cx.chart(meta.clone()).unwrap();
        let nz = chart.nonzero();
        assert_eq!(nz.get(&(0, 0)), Some(&FGPGroup::free(3, 1)));
        assert_eq!(nz.get(&(1, 4)), Some(&FGPGroup { p: 3, free_rank: 0, torsion: vec![1] }));
        let tsv = chart.to_tsv();
        let back = ExtChart::from_tsv(&tsv).unwrap();
        assert_eq!(back.to_tsv(), tsv);
        assert!(chart.to_svg().contains("<circle"));
        assert!(ExtChart::empty(meta).nonzero().is_empty());
    }
}
