//! Generate the BP structure maps at p = 3 and check the Hopf algebroid axioms.
use chromalg::hopf::BpHopf;

fn main() -> chromalg::error::Result<()> {
    let h = BpHopf::generate(3, 2, 24)?;
    print!("{}", h.render());
    let report = h.check_axioms(24)?;
    println!("{} axiom checks, all pass: {}", report.checks.len(), report.passed());

    let broken = h.with_conjugation(1, h.conjugation[0].neg());
    println!("with chi(t1) negated, all pass: {}", broken.check_axioms(24)?.passed());
    Ok(())
}
