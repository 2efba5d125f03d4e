//! Membership in the torsion class T_1 and closure along a short exact sequence.
use std::sync::Arc;

use chromalg::comodule::parse::parse_builtin;
use chromalg::comodule::{CoactionEngine, FPComodule, FPMorphism};
use chromalg::gradedpoly::Poly;
use chromalg::hopf::BpHopf;
use chromalg::localization::{ShortExact, TorsionTheoryTag};
use chromalg::scalar::PLocalScalar;

fn main() -> chromalg::error::Result<()> {
    let p = 3;
    let engine = CoactionEngine::new(Arc::new(BpHopf::generate(p, 2, 24)?), 0)?;
    let t1 = TorsionTheoryTag { n: 1 };
    let a1 = FPComodule::a_mod_i(engine.clone(), 1)?;
    let a2 = FPComodule::a_mod_i(engine.clone(), 2)?;
    println!("A/I_1 in T_1: {}", t1.contains(&a1)?);
    println!("A/I_2 in T_1: {}", t1.contains(&a2)?);

    // 0 -> s^4 A/I_2 -> A/(p, v1^2) -> A/I_2 -> 0
    let mid = Arc::new(parse_builtin("A/(p,v1^2)")?.fp_comodule(engine.clone())?);
    let sub = Arc::new(a2.suspend(4)?);
    let one = PLocalScalar::from_int(1, p);
    let incl = FPMorphism::new(sub, mid.clone(), vec![vec![Poly::monomial(vec![1, 0], one.clone())]])?;
    let proj = FPMorphism::new(mid, Arc::new(a2), vec![vec![Poly::monomial(vec![0, 0], one)]])?;
    let seq = ShortExact::new(incl, proj);
    println!("short exact: {}", seq.verify()?.passed());
    let (a, b, c, closed) = seq.closure(&t1)?;
    println!("membership sub {a}, middle {b}, quotient {c}; consistent with closure: {closed}");
    Ok(())
}
