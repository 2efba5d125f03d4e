//! Primitives of A/I_1 and of the localized quotient v1^-1 A/I_1.
use std::sync::Arc;

use chromalg::comodule::{primitives, CoactionEngine, FPComodule, RegionComodule};
use chromalg::hopf::BpHopf;

fn main() -> chromalg::error::Result<()> {
    let hopf = Arc::new(BpHopf::generate(3, 2, 28)?);
    let engine = CoactionEngine::new(hopf.clone(), 0)?;
    let a1 = FPComodule::a_mod_i(engine, 1)?;
    for (d, names) in primitives(&a1, 0, 24)?.names {
        if !names.is_empty() {
            println!("A/I_1 degree {d}: {}", names.join(", "));
        }
    }

    // The floor E = 3 is padding: the answer is rechecked at E = 4.
    let killed = CoactionEngine::new(hopf, 1)?;
    let local = RegionComodule::localized(killed, 1, 3)?;
    for (d, names) in local.certified_primitives(-12, 12)?.names {
        if !names.is_empty() {
            println!("v1^-1 A/I_1 degree {d}: {}", names.join(", "));
        }
    }
    Ok(())
}
