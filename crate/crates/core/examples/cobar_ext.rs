//! Cobar Ext of A at p = 3, written as a TSV chart and an SVG dot chart.
use std::sync::Arc;

use chromalg::cobar::{ChartMeta, CobarComplex};
use chromalg::comodule::{CoactionEngine, FPComodule};
use chromalg::hopf::BpHopf;

fn main() -> chromalg::error::Result<()> {
    let (p, n, tmax, smax) = (3, 2, 24, 3);
    let engine = CoactionEngine::new(Arc::new(BpHopf::generate(p, n, tmax)?), 0)?;
    let a = FPComodule::unit(engine)?;
    let cx = CobarComplex::build(a.to_dyn(), smax, 0, tmax)?;
    let e = cx.ext(1, 4)?;
    println!("Ext^(1,4) = {} generated by {}", e.group, e.names.join(", "));

    let meta = ChartMeta {
        prime: p,
        vmax: n,
        degree_bound: tmax,
        hopf: "BP p=3".into(),
        module: "A".into(),
        smax,
        tmin: 0,
        tmax,
    };
    let chart = cx.chart(meta)?;
    for ((s, t), g) in chart.nonzero() {
        println!("({s}, {t}): {g}");
    }
    let dir = std::env::temp_dir();
    std::fs::write(dir.join("ext_A_p3.tsv"), chart.to_tsv()).expect("write tsv");
    std::fs::write(dir.join("ext_A_p3.svg"), chart.to_svg()).expect("write svg");
    println!("wrote {}", dir.join("ext_A_p3.{tsv,svg}").display());
    Ok(())
}
