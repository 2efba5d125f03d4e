//! Compare Ext over BP_*BP with coefficients in v1^-1 A/I_1 against Ext over
//! the localized quotient Hopf algebroid, at p = 3.
use std::sync::Arc;

use chromalg::basechange::verify_change_of_rings;
use chromalg::hopf::BpHopf;

fn main() -> chromalg::error::Result<()> {
    let gamma = Arc::new(BpHopf::generate(3, 2, 40)?);
    let report = verify_change_of_rings(gamma, 1, 1, (-8, 8), 2)?;
    print!("{}", report.to_tsv());
    println!("isomorphic: {}", report.isomorphic());
    Ok(())
}
