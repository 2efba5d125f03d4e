//! Landweber filtrations and heights of Landweber exact algebras.
use std::sync::Arc;

use chromalg::comodule::parse::parse_builtin;
use chromalg::comodule::{CoactionEngine, FPComodule};
use chromalg::hopf::BpHopf;
use chromalg::landweber::{is_vn_torsion, landweber_filtration, verify_filtration, LandweberAlgebra};

fn main() -> chromalg::error::Result<()> {
    let engine = CoactionEngine::new(Arc::new(BpHopf::generate(3, 2, 24)?), 0)?;
    let m = parse_builtin("A/(p,v1^2)")?.fp_comodule(engine.clone())?;
    let f = landweber_filtration(&m, usize::MAX)?;
    print!("{}", f.render());
    println!("rebuilds the module: {}", verify_filtration(&m, &f)?.passed());
    println!("v1-torsion: {}", is_vn_torsion(&m, 1)?.0);

    let a1 = FPComodule::a_mod_i(engine, 1)?;
    println!("A/I_1 is v1-torsion: {}", is_vn_torsion(&a1, 1)?.0);

    for n in 1..=2 {
        let e = LandweberAlgebra::johnson_wilson(3, 3, n)?;
        println!("{} has height {}", e.name, e.height()?);
    }
    Ok(())
}
