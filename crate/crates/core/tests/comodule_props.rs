use std::sync::{Arc, OnceLock};

use chromalg::comodule::parse::parse_builtin;
use chromalg::comodule::{check_comodule_axioms, CoactionEngine, Comodule, FPComodule, FPMorphism};
use chromalg::hopf::BpHopf;
use proptest::prelude::*;

const D: i64 = 12;

type Engine = Arc<CoactionEngine<chromalg::scalar::PLocalScalar>>;

/// Modules must share one engine to be combined.
fn engine(p: u64) -> Engine {
    static ENGINES: OnceLock<[Engine; 2]> = OnceLock::new();
    let make = |p| CoactionEngine::new(Arc::new(BpHopf::generate(p, 2, D).unwrap()), 0).unwrap();
    ENGINES.get_or_init(|| [make(2), make(3)])[(p == 3) as usize].clone()
}

/// Small comodules: `s^r A/I_k` and `s^r A/(p, v1^j)`.
fn module(p: u64, kind: u8, shift: i64) -> FPComodule {
    let e = engine(p);
    let m = match kind % 4 {
        0 => FPComodule::unit(e),
        1 => FPComodule::a_mod_i(e, 1),
        2 => FPComodule::a_mod_i(e, 2),
        _ => parse_builtin("A/(p,v1^2)").unwrap().fp_comodule(e),
    }
    .unwrap();
    m.suspend(shift).unwrap()
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3])
}

fn shift(p: u64) -> impl Strategy<Value = i64> {
    (0i64..=2).prop_map(move |j| 2 * (p as i64 - 1) * j)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn smash_is_commutative((p, a, b, r) in prime().prop_flat_map(|p| (Just(p), 0u8..4, 0u8..4, shift(p)))) {
        let m = module(p, a, r);
        let n = module(p, b, 0);
        let f = FPMorphism::swap(&m, &n).unwrap();
        prop_assert!(f.check(D).unwrap().passed());
        prop_assert!(f.iso_report(D).unwrap().passed());
    }

    #[test]
    fn smash_is_associative((p, a, b, c) in prime().prop_flat_map(|p| (Just(p), 0u8..4, 0u8..4, 0u8..4))) {
        let (m, n, q) = (module(p, a, 0), module(p, b, 0), module(p, c, 0));
        let f = FPMorphism::associator(&m, &n, &q).unwrap();
        prop_assert!(f.check(D).unwrap().passed());
        prop_assert!(f.iso_report(D).unwrap().passed());
    }

    #[test]
    fn extended_tensor_lemma((p, a, b) in prime().prop_flat_map(|p| (Just(p), 0u8..4, 0u8..4))) {
        let f = FPMorphism::extended_tensor(&module(p, a, 0), &module(p, b, 0)).unwrap();
        prop_assert!(f.check(D).unwrap().passed());
        prop_assert!(f.iso_report(D).unwrap().passed());
    }

    #[test]
    fn smash_and_sums_are_comodules((p, a, b, r) in prime().prop_flat_map(|p| (Just(p), 0u8..4, 0u8..4, shift(p)))) {
        let m = module(p, a, r);
        let n = module(p, b, 0);
        let s = m.smash(&n).unwrap();
        prop_assert!(check_comodule_axioms(&s, D).unwrap().passed());
        let sum = m.direct_sum(&n).unwrap();
        for d in 0..=D {
            prop_assert_eq!(sum.piece(d).unwrap().dim(), m.piece(d).unwrap().dim() + n.piece(d).unwrap().dim());
        }
    }
}
