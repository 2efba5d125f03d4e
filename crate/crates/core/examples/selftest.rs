//! Run the acceptance suite at a small truncation.
use chromalg::selftest::{run, SelftestConfig};

fn main() {
    let cfg = SelftestConfig { primes: vec![3], vmax: 2, efloor: 3 };
    for r in run(&cfg) {
        println!("{r}");
    }
}
