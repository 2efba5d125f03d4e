//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a computation or verification fails, 2
//! on usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::thread;

use clap::{Args, Parser, Subcommand};

use crate::basechange::verify_change_of_rings;
use crate::cache::{Cache, CacheKey, CacheWriter};
use crate::cobar::{ChartMeta, CobarComplex, ExtChart};
use crate::comodule::fp::render_free;
use crate::comodule::parse::{parse_builtin, parse_presentation, Builtin};
use crate::comodule::{primitives, CoactionEngine, Comodule, FPComodule, RegionComodule};
use crate::error::{Error, Result};
use crate::gradedpoly::{bp_degree, render};
use crate::hopf::BpHopf;
use crate::landweber::{landweber_filtration, verify_filtration};
use crate::localization::{derived_localization, localize, LocalizeInput, Localized};
use crate::scalar::is_prime;
use crate::selftest::{criterion, CriterionResult, SelftestConfig};

#[derive(Parser, Debug)]
#[command(name = "chromalg", version, about = "Truncated Brown-Peterson Hopf algebroids and their comodules")]
struct Cli {
    /// Cache directory (overrides CHROMALG_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Session {
    #[arg(long, default_value_t = 3)]
    prime: u64,
    #[arg(long, default_value_t = 3)]
    vmax: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump eta_R, Delta and chi.
    Structure {
        #[command(flatten)]
        session: Session,
        #[arg(long)]
        tmax: i64,
        #[arg(long)]
        json: bool,
    },
    /// Check the Hopf algebroid axioms.
    Axioms {
        #[command(flatten)]
        session: Session,
        #[arg(long)]
        tmax: i64,
    },
    /// Primitives of a comodule in a degree window.
    Primitives {
        #[command(flatten)]
        session: Session,
        /// `FILE` or `builtin:NAME`.
        #[arg(long)]
        module: String,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
        /// Degree bound for builtin modules (defaults to the window top plus padding).
        #[arg(long)]
        tmax: Option<i64>,
        #[arg(long, default_value_t = 3)]
        efloor: i32,
    },
    /// Landweber filtration.
    Filtration {
        #[command(flatten)]
        session: Session,
        #[arg(long)]
        module: String,
        #[arg(long, default_value_t = usize::MAX)]
        cap: usize,
        #[arg(long)]
        tmax: Option<i64>,
    },
    /// `L_n` or its derived functors on `A/I_k`.
    Localize {
        #[command(flatten)]
        session: Session,
        #[arg(long)]
        module: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        derived: Option<usize>,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
        #[arg(long, default_value_t = 3)]
        efloor: i32,
    },
    /// Cobar Ext chart.
    Ext {
        #[command(flatten)]
        session: Session,
        #[arg(long)]
        module: String,
        #[arg(long)]
        smax: usize,
        #[arg(long, default_value_t = 0)]
        tmin: i64,
        #[arg(long)]
        tmax: i64,
        /// Degree bound of the Hopf algebroid (defaults to tmax).
        #[arg(long)]
        degree_bound: Option<i64>,
        /// TSV output path, `-` for stdout.
        #[arg(long)]
        tsv: Option<String>,
        #[arg(long)]
        svg: Option<String>,
        #[arg(long)]
        json: Option<String>,
    },
    /// Render a TSV chart as SVG.
    Chart {
        input: PathBuf,
        #[arg(long, default_value = "-")]
        svg: String,
    },
    /// Change-of-rings comparison in the torsion regime.
    Basechange {
        #[command(flatten)]
        session: Session,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        module: String,
        #[arg(long, default_value_t = 2)]
        smax: usize,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
        #[arg(long, default_value_t = 3)]
        efloor: i32,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long = "prime")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        vmax: usize,
        #[arg(long, default_value_t = 3)]
        efloor: i32,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn parse_window(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s}"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if a > b {
        return Err(format!("empty window {s}"));
    }
    Ok((a, b))
}

enum Failure {
    Usage(String),
    Compute(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => Failure::Usage(e.to_string()),
            e => Failure::Compute(e),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Ctx {
    cache: Option<Cache>,
    writer: Option<CacheWriter>,
}

impl Ctx {
    fn cached<E>(
        &self,
        key: CacheKey,
        f: impl FnOnce() -> std::result::Result<String, E>,
    ) -> std::result::Result<String, E> {
        if let Some(v) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            return Ok(v);
        }
        let v = f()?;
        if let Some(w) = &self.writer {
            let _ = w.sender().send((key, v.clone()));
        }
        Ok(v)
    }
}

fn check_session(s: &Session) -> Outcome {
    if !is_prime(s.prime) {
        return Err(Failure::Usage(format!("{} is not prime", s.prime)));
    }
    if s.vmax == 0 {
        return Err(Failure::Usage("vmax must be at least 1".into()));
    }
    Ok(())
}

fn emit(path: Option<&str>, text: &str, out: &mut String) -> Outcome {
    match path {
        None | Some("-") => out.push_str(text),
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{p}: {e}")))?,
    }
    Ok(())
}

enum ModuleSpec {
    Builtin(Builtin),
    File { text: String, name: String },
}

fn module_spec(arg: &str) -> std::result::Result<ModuleSpec, Failure> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return parse_builtin(name).map(ModuleSpec::Builtin).map_err(|e| Failure::Usage(e.to_string()));
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?;
    let name = std::path::Path::new(arg).file_stem().map_or(arg.to_string(), |s| s.to_string_lossy().into_owned());
    Ok(ModuleSpec::File { text, name })
}

fn engine(p: u64, n: usize, d: i64, killed: usize) -> Result<Arc<CoactionEngine<crate::scalar::PLocalScalar>>> {
    CoactionEngine::new(Arc::new(BpHopf::generate(p, n, d)?), killed)
}

/// A finitely presented module, with `(p, N, D)` taken from the file header
/// or from the session for builtins.
fn finite_module(spec: &ModuleSpec, session: &Session, d: i64) -> std::result::Result<FPComodule, Failure> {
    match spec {
        ModuleSpec::Builtin(Builtin::Localized(_)) => {
            Err(Failure::Usage("a localized builtin is not finitely presented".into()))
        }
        ModuleSpec::Builtin(b) => Ok(b.fp_comodule(engine(session.prime, session.vmax, d, 0)?)?),
        ModuleSpec::File { text, name } => {
            let pres = parse_presentation(text, name)?;
            Ok(pres.build(engine(pres.p, pres.vmax, pres.degree_bound, 0)?)?)
        }
    }
}

fn input_id(arg: &str, spec: &ModuleSpec) -> String {
    match spec {
        ModuleSpec::Builtin(b) => format!("builtin:{b}"),
        ModuleSpec::File { text, .. } => format!("file:{arg}\n{text}"),
    }
}

fn primitives_table(dims: &BTreeMap<i64, Vec<String>>) -> String {
    let mut out = String::from("degree\tdim\tbasis\n");
    for (d, names) in dims {
        writeln!(out, "{d}\t{}\t{}", names.len(), names.join(", ")).unwrap();
    }
    out
}

fn structure(ctx: &Ctx, s: &Session, tmax: i64, json: bool) -> Result<String> {
    let key = CacheKey::new(s.prime, s.vmax, tmax, "structure", if json { "json" } else { "text" });
    ctx.cached(key, || {
        let h = BpHopf::generate(s.prime, s.vmax, tmax)?;
        if !json {
            return Ok(h.render());
        }
        let (g1, g2) = (h.grading(1), h.grading(2));
        let table = |polys: &[crate::gradedpoly::Poly<_>], g, prefix: &str| -> BTreeMap<String, String> {
            polys.iter().enumerate().map(|(i, x)| (format!("{prefix}{}", i + 1), render(x, g))).collect()
        };
        let doc = serde_json::json!({
            "schema": "chromalg-structure/1",
            "prime": s.prime,
            "vmax": s.vmax,
            "degree_bound": tmax,
            "eta_R": table(&h.right_unit, &g1, "v"),
            "Delta": table(&h.diagonal, &g2, "t"),
            "chi": table(&h.conjugation, &g1, "t"),
        });
        Ok(serde_json::to_string_pretty(&doc).expect("json") + "\n")
    })
}

fn run_command(ctx: &Ctx, command: Command, out: &mut String) -> Outcome {
    match command {
        Command::Structure { session, tmax, json } => {
            check_session(&session)?;
            out.push_str(&structure(ctx, &session, tmax, json)?);
        }
        Command::Axioms { session, tmax } => {
            check_session(&session)?;
            let h = BpHopf::generate(session.prime, session.vmax, tmax)?;
            let r = h.check_axioms(tmax)?;
            writeln!(
                out,
                "axioms p={} N={} through degree {}: {} checks",
                session.prime,
                session.vmax,
                tmax,
                r.checks.len()
            )
            .unwrap();
            for f in r.failures() {
                writeln!(out, "FAIL {} {} degree {}", f.axiom, f.generator, f.degree).unwrap();
            }
            if !r.passed() {
                return Err(Failure::Verify(format!("{} axiom checks failed", r.failures().len())));
            }
            out.push_str("all axioms hold\n");
        }
        Command::Primitives { session, module, window, tmax, efloor } => {
            check_session(&session)?;
            let spec = module_spec(&module)?;
            let (lo, hi) = window;
            let text = match &spec {
                ModuleSpec::Builtin(Builtin::Localized(k)) => {
                    let q = bp_degree(session.prime, *k);
                    let reach = lo.abs().max(hi.abs());
                    let floor = efloor.max(((reach + q - 1) / q) as i32);
                    let d = tmax.unwrap_or((2 * floor as i64 + 1) * q);
                    let key = CacheKey::new(
                        session.prime,
                        session.vmax,
                        d,
                        "primitives",
                        &format!("{}|{lo}..{hi}|E{floor}", input_id(&module, &spec)),
                    );
                    ctx.cached(key, || {
                        let r = RegionComodule::localized(engine(session.prime, session.vmax, d, *k)?, *k, floor)?;
                        Ok::<_, Failure>(primitives_table(&r.certified_primitives(lo, hi)?.names))
                    })?
                }
                _ => {
                    let d = tmax.unwrap_or(hi.max(0));
                    let key = CacheKey::new(
                        session.prime,
                        session.vmax,
                        d,
                        "primitives",
                        &format!("{}|{lo}..{hi}", input_id(&module, &spec)),
                    );
                    ctx.cached(key, || {
                        let m = finite_module(&spec, &session, d)?;
                        Ok::<_, Failure>(primitives_table(&primitives(&m, lo, hi)?.names))
                    })?
                }
            };
            out.push_str(&text);
        }
        Command::Filtration { session, module, cap, tmax } => {
            check_session(&session)?;
            let spec = module_spec(&module)?;
            let d = tmax.unwrap_or(bp_degree(session.prime, session.vmax) + 4 * (session.prime as i64 - 1));
            let m = finite_module(&spec, &session, d)?;
            let f = landweber_filtration(&m, cap)?;
            out.push_str(&f.render());
            for (i, s) in f.steps.iter().enumerate() {
                writeln!(out, "lift {}\t{}", i + 1, render_free(&m, &s.lift)).unwrap();
            }
            let r = verify_filtration(&m, &f)?;
            if !r.passed() {
                return Err(Failure::Verify("filtration does not rebuild the module".into()));
            }
        }
        Command::Localize { session, module, n, derived, window, efloor } => {
            check_session(&session)?;
            let spec = module_spec(&module)?;
            let k = match &spec {
                ModuleSpec::Builtin(Builtin::Quotient(k)) => *k,
                ModuleSpec::Builtin(Builtin::Unit) => 0,
                _ => return Err(Failure::Usage("localize takes builtin:A/I_k".into())),
            };
            let (lo, hi) = window;
            match derived {
                Some(i) if i > 0 => {
                    let dl = derived_localization(session.prime, session.vmax, k, n, i, efloor)?;
                    let desc = dl.region.as_ref().map_or("0".into(), |r| r.describe());
                    writeln!(out, "# L_{n}^{i}(A/I_{k}) = {desc}").unwrap();
                    writeln!(out, "# matches closed form: {}", dl.matches).unwrap();
                    writeln!(out, "# dimensions counted on the exponent box [-{efloor}, {efloor}]").unwrap();
                    out.push_str("degree\tdim\n");
                    let dims = dl.cohomology.graded_dims(i + 1);
                    for d in lo..=hi {
                        writeln!(out, "{d}\t{}", dims.get(&d).copied().unwrap_or(0)).unwrap();
                    }
                    if !dl.matches {
                        return Err(Failure::Verify("derived functor disagrees with the closed form".into()));
                    }
                }
                _ => {
                    let q = bp_degree(session.prime, n.max(1));
                    let reach = lo.abs().max(hi.abs());
                    let floor = efloor.max(((reach + q - 1) / q) as i32);
                    let d = ((2 * floor as i64 + 1) * q).max(hi);
                    let m = finite_module(&spec, &session, d)?;
                    let l = localize(&LocalizeInput::Finite(Arc::new(m)), n, floor)?;
                    writeln!(out, "# L_{n}(A/I_{k}) = {}", l.describe()).unwrap();
                    out.push_str("degree\tdim\n");
                    for d in lo..=hi {
                        let dim = match &l {
                            Localized::Zero { .. } => 0,
                            Localized::Unchanged { input, .. } => match input {
                                LocalizeInput::Finite(m) if d >= 0 => m.piece(d)?.dim(),
                                LocalizeInput::Finite(_) => 0,
                                LocalizeInput::Region(r) => r.piece(d)?.dim(),
                            },
                            Localized::Region { comodule: Some(r), .. } => r.piece(d)?.dim(),
                            Localized::Region { comodule: None, .. } => {
                                return Err(Failure::Compute(Error::Unsupported("no comodule for this region".into())))
                            }
                        };
                        writeln!(out, "{d}\t{dim}").unwrap();
                    }
                }
            }
        }
        Command::Ext { session, module, smax, tmin, tmax, degree_bound, tsv, svg, json } => {
            check_session(&session)?;
            let spec = module_spec(&module)?;
            let d = degree_bound.unwrap_or(tmax);
            let key = CacheKey::new(
                session.prime,
                session.vmax,
                d,
                "ext",
                &format!("{}|s{smax}|t{tmin}..{tmax}", input_id(&module, &spec)),
            );
            let tsv_text = ctx.cached(key, || {
                let m = finite_module(&spec, &session, d)?;
                let e = m.engine_ref();
                let meta = ChartMeta {
                    prime: e.p(),
                    vmax: e.n(),
                    degree_bound: e.degree_bound(),
                    hopf: format!("BP p={}", e.p()),
                    module: m.name.clone(),
                    smax,
                    tmin,
                    tmax,
                };
                let cx = CobarComplex::build(m.to_dyn(), smax, tmin, tmax)?;
                Ok::<_, Failure>(cx.chart(meta)?.to_tsv())
            })?;
            let nothing = tsv.is_none() && svg.is_none() && json.is_none();
            if nothing || tsv.is_some() {
                emit(tsv.as_deref(), &tsv_text, out)?;
            }
            if svg.is_some() || json.is_some() {
                let chart = ExtChart::from_tsv(&tsv_text)?;
                if let Some(p) = svg.as_deref() {
                    emit(Some(p), &chart.to_svg(), out)?;
                }
                if let Some(p) = json.as_deref() {
                    let doc = serde_json::json!({ "schema": crate::cobar::CHART_SCHEMA, "meta": chart.meta, "entries":
                        chart.entries.iter().map(|((s, t), e)| serde_json::json!({"s": s, "t": t, "group": e.group.to_string(), "free_rank": e.group.free_rank, "torsion": e.group.torsion, "generators": e.generators})).collect::<Vec<_>>() });
                    emit(Some(p), &(serde_json::to_string_pretty(&doc).expect("json") + "\n"), out)?;
                }
            }
        }
        Command::Chart { input, svg } => {
            let text =
                std::fs::read_to_string(&input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
            let chart = ExtChart::from_tsv(&text)?;
            emit(Some(&svg), &chart.to_svg(), out)?;
        }
        Command::Basechange { session, n, module, smax, window, efloor } => {
            check_session(&session)?;
            match module_spec(&module)? {
                ModuleSpec::Builtin(Builtin::Quotient(k)) if k == n => {}
                _ => return Err(Failure::Usage(format!("basechange takes builtin:A/I_{n}"))),
            }
            let (tmin, tmax) = window;
            let q = bp_degree(session.prime, n);
            let floor = efloor as i64 + ((-tmin).max(0) + q - 1) / q;
            let d = tmax + (floor + efloor as i64 + 1) * q;
            let key = CacheKey::new(
                session.prime,
                session.vmax,
                d,
                "basechange",
                &format!("n{n}|s{smax}|{tmin}..{tmax}|E{efloor}"),
            );
            let report = ctx.cached(key, || {
                let h = Arc::new(BpHopf::generate(session.prime, session.vmax, d)?);
                Ok::<_, Failure>(verify_change_of_rings(h, n, smax, window, efloor)?.to_tsv())
            })?;
            out.push_str(&report);
            if report.contains("DIFFERENT") {
                return Err(Failure::Verify("change of rings comparison found different groups".into()));
            }
        }
        Command::Selftest { primes, vmax, efloor, jobs } => {
            let primes = if primes.is_empty() { vec![2, 3] } else { primes };
            if let Some(p) = primes.iter().find(|p| !is_prime(**p)) {
                return Err(Failure::Usage(format!("{p} is not prime")));
            }
            let cfg = SelftestConfig { primes, vmax, efloor };
            let results =
                run_pool(&cfg, jobs.unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get())));
            for r in &results {
                writeln!(out, "{r}").unwrap();
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(Failure::Verify(format!("{failed} criteria failed")));
            }
        }
    }
    Ok(())
}

/// Runs the criteria on a fixed pool of workers; results come back in
/// criterion order.
fn run_pool(cfg: &SelftestConfig, jobs: usize) -> Vec<CriterionResult> {
    let next = std::sync::atomic::AtomicUsize::new(1);
    let results = std::sync::Mutex::new(Vec::new());
    thread::scope(|s| {
        for _ in 0..jobs.clamp(1, 10) {
            s.spawn(|| loop {
                let id = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if id > 10 {
                    break;
                }
                let r = criterion(id, cfg);
                results.lock().unwrap().push(r);
            });
        }
    });
    let mut v = results.into_inner().unwrap();
    v.sort_by_key(|r| r.id);
    v
}

/// Runs the CLI on `args` (including the program name), writing to the
/// given streams. Returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let dir = cli.cache.or_else(|| std::env::var_os("CHROMALG_CACHE").map(PathBuf::from));
    let cache = dir.map(Cache::new);
    let writer = cache.clone().map(CacheWriter::spawn);
    let ctx = Ctx { cache, writer };
    let mut out = String::new();
    let outcome = run_command(&ctx, cli.command, &mut out);
    if let Some(w) = ctx.writer {
        w.finish();
    }
    let _ = stdout.write_all(out.as_bytes());
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
        Err(Failure::Verify(m)) => {
            let _ = writeln!(stderr, "verification failed: {m}");
            1
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
