//! Comodule presentation files and builtin module names.
//!
//! ```text
//! # A with a redundant generator
//! 2/3/18
//! gen g0 0
//! gen g1 2
//! rel v1*g0 - g1
//! coact g0 = g0
//! coact g1 = v1*g0
//! ```
//!
//! The header is `prime/vmax/degbound`. Relations are A-linear combinations
//! of generators; `p` may appear as a factor. `coact g = …` gives `ψ(g)` as a
//! sum of terms `γ·h` with `γ ∈ Γ` written in `v_i, t_i` (left form). A
//! generator without a `coact` line is primitive.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::gradedpoly::{bp_degree, parse_poly, Exponents, Grading, Poly, Variable};
use crate::scalar::{to_plocal, PLocalScalar};

use super::engine::CoactionEngine;
use super::fp::{FPComodule, FreeElem, InvariantIdeal};

type S = PLocalScalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    pub p: u64,
    pub vmax: usize,
    pub degree_bound: i64,
    pub gens: Vec<(String, i64)>,
    pub relations: Vec<(usize, String)>,
    pub coactions: Vec<(usize, String, String)>,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_presentation(text: &str, name: &str) -> Result<Presentation> {
    let mut header = None;
    let mut pres = Presentation {
        name: name.to_string(),
        p: 0,
        vmax: 0,
        degree_bound: 0,
        gens: Vec::new(),
        relations: Vec::new(),
        coactions: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if header.is_none() {
            let parts: Vec<&str> = line.split('/').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(perr(lineno, "expected header prime/vmax/degbound"));
            }
            let p = parts[0].parse::<u64>().map_err(|e| perr(lineno, e.to_string()))?;
            if !crate::scalar::is_prime(p) {
                return Err(perr(lineno, format!("{p} is not prime")));
            }
            pres.p = p;
            pres.vmax = parts[1].parse().map_err(|e: std::num::ParseIntError| perr(lineno, e.to_string()))?;
            pres.degree_bound = parts[2].parse().map_err(|e: std::num::ParseIntError| perr(lineno, e.to_string()))?;
            if pres.vmax == 0 {
                return Err(perr(lineno, "vmax must be at least 1"));
            }
            header = Some(());
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kw {
            "gen" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(perr(lineno, "expected: gen NAME DEGREE"));
                }
                let name = parts[0];
                if !name.chars().next().map_or(false, |c| c.is_ascii_alphabetic())
                    || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    return Err(perr(lineno, format!("bad generator name {name}")));
                }
                if name == "p" || reserved(name) {
                    return Err(perr(lineno, format!("generator name {name} is reserved")));
                }
                if pres.gens.iter().any(|g| g.0 == name) {
                    return Err(perr(lineno, format!("duplicate generator {name}")));
                }
                let d = parts[1].parse::<i64>().map_err(|e| perr(lineno, e.to_string()))?;
                pres.gens.push((name.to_string(), d));
            }
            "rel" => pres.relations.push((lineno, rest.to_string())),
            "coact" => {
                let (g, rhs) = rest.split_once('=').ok_or_else(|| perr(lineno, "expected: coact GEN = ..."))?;
                pres.coactions.push((lineno, g.trim().to_string(), rhs.trim().to_string()));
            }
            other => return Err(perr(lineno, format!("unknown keyword {other}"))),
        }
    }
    if header.is_none() {
        return Err(perr(0, "missing header"));
    }
    if pres.gens.is_empty() {
        return Err(perr(0, "no generators"));
    }
    Ok(pres)
}

fn reserved(name: &str) -> bool {
    let digits = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || c == '_');
    (name.starts_with('v') || name.starts_with('t')) && digits(&name[1..])
}

/// Grading `p, v_1..v_n, [t_1..t_n,] gens`.
fn parse_grading(p: u64, n: usize, with_t: bool, gens: &[(String, i64)]) -> Grading {
    let mut vars = vec![Variable { name: "p".into(), degree: 0 }];
    vars.extend((1..=n).map(|i| Variable { name: format!("v{i}"), degree: bp_degree(p, i) }));
    if with_t {
        vars.extend((1..=n).map(|i| Variable { name: format!("t{i}"), degree: bp_degree(p, i) }));
    }
    vars.extend(gens.iter().map(|(g, d)| Variable { name: g.clone(), degree: *d }));
    Grading::new(p, vars, i64::MAX)
}

/// Terms linear in exactly one generator: `(generator, coefficient monomial
/// without p, coefficient)`.
fn linear_terms(
    text: &str,
    grading: &Grading,
    coeff_vars: usize,
    ngens: usize,
    p: u64,
    line: usize,
) -> Result<Vec<(usize, Exponents, S)>> {
    let poly = parse_poly(text, grading).map_err(|e| match e {
        Error::Parse { message, .. } => perr(line, message),
        other => other,
    })?;
    let mut out = Vec::new();
    for (e, c) in &poly.terms {
        let gpart = &e[1 + coeff_vars..];
        let gens: Vec<usize> = (0..ngens).filter(|&j| gpart[j] != 0).collect();
        if gens.len() != 1 || gpart[gens[0]] != 1 {
            return Err(perr(line, "each term must contain exactly one generator to the first power"));
        }
        if e[1..1 + coeff_vars].iter().any(|&x| x < 0) || e[0] < 0 {
            return Err(perr(line, "negative exponents are not allowed"));
        }
        let pe = BigInt::from(p).pow(e[0] as u32);
        let q = c * num_rational::BigRational::from_integer(pe);
        let c = to_plocal(&q, p, "presentation coefficient")
            .map_err(|_| perr(line, format!("coefficient {q} is not p-local")))?;
        out.push((gens[0], e[1..1 + coeff_vars].to_vec(), c));
    }
    Ok(out)
}

impl Presentation {
    /// Build the comodule over the integral engine (which must match the
    /// header's prime and have at least `vmax` variables).
    pub fn build(&self, engine: Arc<CoactionEngine<S>>) -> Result<FPComodule> {
        let p = self.p;
        let n = engine.n();
        if engine.p() != p || n < self.vmax {
            return Err(Error::GradingMismatch(format!(
                "presentation needs p={p} with {} variables, engine has p={} with {}",
                self.vmax,
                engine.p(),
                n
            )));
        }
        let ng = self.gens.len();
        let rel_grading = parse_grading(p, n, false, &self.gens);
        let mut relations = Vec::new();
        for (line, text) in &self.relations {
            let mut x: FreeElem = vec![Poly::zero(); ng];
            for (j, e, c) in linear_terms(text, &rel_grading, n, ng, p, *line)? {
                x[j].add_term(e, c);
            }
            relations.push(x);
        }
        let co_grading = parse_grading(p, n, true, &self.gens);
        let one = Poly::constant(S::from_int(1, p), 2 * n);
        let mut coaction: Vec<Vec<Poly<S>>> =
            (0..ng).map(|j| (0..ng).map(|k| if j == k { one.clone() } else { Poly::zero() }).collect()).collect();
        let mut seen = vec![false; ng];
        for (line, g, text) in &self.coactions {
            let j = self
                .gens
                .iter()
                .position(|x| &x.0 == g)
                .ok_or_else(|| perr(*line, format!("unknown generator {g}")))?;
            if seen[j] {
                return Err(perr(*line, format!("second coaction for {g}")));
            }
            seen[j] = true;
            let mut row = vec![Poly::zero(); ng];
            for (k, e, c) in linear_terms(text, &co_grading, 2 * n, ng, p, *line)? {
                row[k].add_term(e, c);
            }
            coaction[j] = row;
        }
        FPComodule::new(engine, self.name.clone(), self.gens.clone(), relations, coaction)
    }
}

/// Builtin module names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// `A`.
    Unit,
    /// `A/I_k`.
    Quotient(usize),
    /// `A/(x_1, …)` for base elements written in `p, v_i`.
    Ideal(Vec<String>),
    /// `v_k^{-1} A/I_k`.
    Localized(usize),
}

impl std::fmt::Display for Builtin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Builtin::Unit => write!(f, "A"),
            Builtin::Quotient(k) => write!(f, "A/I_{k}"),
            Builtin::Ideal(gens) => write!(f, "A/({})", gens.join(",")),
            Builtin::Localized(k) => write!(f, "v{k}^-1 A/I_{k}"),
        }
    }
}

pub fn parse_builtin(text: &str) -> Result<Builtin> {
    let s: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
    let bad = || perr(0, format!("unknown builtin module {text}"));
    let index = |s: &str| s.parse::<usize>().map_err(|_| bad());
    if s == "A" {
        return Ok(Builtin::Unit);
    }
    if let Some(k) = s.strip_prefix("A/I_") {
        return Ok(Builtin::Quotient(index(k)?));
    }
    if let Some(inner) = s.strip_prefix("A/(").and_then(|r| r.strip_suffix(')')) {
        let gens: Vec<String> = inner.split(',').map(|x| x.trim().to_string()).collect();
        if gens.iter().any(String::is_empty) {
            return Err(bad());
        }
        return Ok(Builtin::Ideal(gens));
    }
    if let Some(r) = s.strip_prefix('v') {
        let (k, rest) = r.split_once("^-1").ok_or_else(bad)?;
        let k = index(k)?;
        let rest = rest.trim();
        let j = rest.strip_prefix("A/I_").ok_or_else(bad)?;
        if index(j)? != k || k == 0 {
            return Err(bad());
        }
        return Ok(Builtin::Localized(k));
    }
    Err(bad())
}

impl Builtin {
    /// The ideal generators as base polynomials.
    pub fn ideal(&self, p: u64, n: usize) -> Result<InvariantIdeal> {
        match self {
            Builtin::Unit => Ok(InvariantIdeal::new(Vec::new(), Vec::new())),
            Builtin::Quotient(k) => Ok(InvariantIdeal::i_n(p, n, *k)),
            Builtin::Ideal(gens) => {
                let g = parse_grading(p, n, false, &[]);
                let mut polys = Vec::new();
                for text in gens {
                    let q = parse_poly(text, &g).map_err(|e| match e {
                        Error::Parse { message, .. } => perr(0, message),
                        other => other,
                    })?;
                    let mut out = Poly::zero();
                    for (e, c) in &q.terms {
                        if e.iter().any(|&x| x < 0) {
                            return Err(perr(0, "negative exponent in ideal generator"));
                        }
                        let pe = BigInt::from(p).pow(e[0] as u32);
                        let c = to_plocal(&(c * num_rational::BigRational::from_integer(pe)), p, "ideal")?;
                        out.add_term(e[1..].to_vec(), c);
                    }
                    polys.push(out);
                }
                Ok(InvariantIdeal::new(polys, gens.clone()))
            }
            Builtin::Localized(_) => Err(Error::Unsupported("a localized module is not finitely presented".into())),
        }
    }

    pub fn fp_comodule(&self, engine: Arc<CoactionEngine<S>>) -> Result<FPComodule> {
        let ideal = self.ideal(engine.p(), engine.n())?;
        let mut m = FPComodule::quotient_by_invariant_ideal(engine, &ideal)?;
        m.name = self.to_string();
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodule::{check_comodule_axioms, Comodule};
    use crate::hopf::BpHopf;

    fn engine(p: u64, n: usize, d: i64) -> Arc<CoactionEngine<S>> {
        CoactionEngine::new(Arc::new(BpHopf::generate(p, n, d).unwrap()), 0).unwrap()
    }

    const REDUNDANT: &str =
        "# A with a redundant generator\n2/3/18\ngen g0 0\ngen g1 2\nrel v1*g0 - g1\ncoact g1 = v1*g0\n";

    #[test]
    fn presentation_round_trip() {
        let pres = parse_presentation(REDUNDANT, "A'").unwrap();
        assert_eq!((pres.p, pres.vmax, pres.degree_bound), (2, 3, 18));
        let e = engine(2, 3, 18);
        let m = pres.build(e.clone()).unwrap();
        assert!(check_comodule_axioms(&m, 18).unwrap().passed());
        let a = FPComodule::unit(e).unwrap();
        for d in 0..=18 {
            assert_eq!(m.piece(d).unwrap().orders, a.piece(d).unwrap().orders);
        }
    }

    #[test]
    fn mutated_presentation_fails() {
        let text = REDUNDANT.replace("coact g1 = v1*g0", "coact g1 = g1");
        let m = parse_presentation(&text, "bad").unwrap().build(engine(2, 3, 18)).unwrap();
        assert!(!check_comodule_axioms(&m, 18).unwrap().passed());
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = parse_presentation("2/3/18\ngen g 0\nfoo", "x").unwrap_err();
        assert_eq!(err, Error::Parse { line: 3, message: "unknown keyword foo".into() });
        let err = parse_presentation("2/3/18\ngen v1 0\n", "x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let pres = parse_presentation("2/3/18\ngen g 0\nrel g*g\n", "x").unwrap();
        assert!(matches!(pres.build(engine(2, 3, 18)), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn builtins() {
        assert_eq!(parse_builtin("A").unwrap(), Builtin::Unit);
        assert_eq!(parse_builtin("A/I_2").unwrap(), Builtin::Quotient(2));
        assert_eq!(parse_builtin("A/(p,v1^2)").unwrap(), Builtin::Ideal(vec!["p".into(), "v1^2".into()]));
        assert_eq!(parse_builtin("v1^-1 A/I_1").unwrap(), Builtin::Localized(1));
        assert!(parse_builtin("v1^-1 A/I_2").is_err());
        assert!(parse_builtin("B").is_err());
        let e = engine(3, 2, 24);
        let m = parse_builtin("A/(p,v1^2)").unwrap().fp_comodule(e.clone()).unwrap();
        assert_eq!(m.piece(8).unwrap().dim(), 0);
        assert_eq!(m.piece(4).unwrap().dim(), 1);
        assert!(matches!(parse_builtin("A/(v1)").unwrap().fp_comodule(e), Err(Error::NotInvariant { .. })));
    }
}
