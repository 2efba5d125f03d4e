//! Čech local cohomology of F_3[x, y] with respect to (x, y), in a box.
use chromalg::comodule::{Interval, Region};
use chromalg::localization::{cech_local_cohomology, LocalCohomologyRequest};

fn main() -> chromalg::error::Result<()> {
    let req = LocalCohomologyRequest {
        region: Region::new(vec![Interval::nonneg(), Interval::nonneg()]),
        ideal: vec![0, 1],
        exponent_box: vec![(-4, 4), (-4, 4)],
        degrees: vec![1, 1],
        prime: 3,
    };
    let lc = cech_local_cohomology(&req)?;
    for j in 0..=2 {
        let dims: Vec<_> = lc.graded_dims(j).into_iter().filter(|(_, n)| *n > 0).collect();
        println!("H^{j}: {dims:?}");
    }
    Ok(())
}
