//! The localization functors L_n on the quotients A/I_k, and their derived functors.
use std::sync::Arc;

use chromalg::comodule::{CoactionEngine, FPComodule};
use chromalg::hopf::BpHopf;
use chromalg::localization::{derived_localization, localize, LocalizeInput};

fn main() -> chromalg::error::Result<()> {
    let engine = CoactionEngine::new(Arc::new(BpHopf::generate(3, 3, 60)?), 0)?;
    for n in 0..=2 {
        for k in 0..=3 {
            let m = LocalizeInput::Finite(Arc::new(FPComodule::a_mod_i(engine.clone(), k)?));
            println!("L_{n}(A/I_{k}) = {}", localize(&m, n, 3)?.describe());
        }
    }
    for (k, n) in [(0, 1), (0, 2), (1, 2)] {
        for i in 1..=2 {
            let d = derived_localization(3, 3, k, n, i, 3)?;
            let desc = d.region.as_ref().map_or("0".to_string(), |r| r.describe());
            println!("L_{n}^{i}(A/I_{k}) = {desc} (closed form agrees: {})", d.matches);
        }
    }
    Ok(())
}
