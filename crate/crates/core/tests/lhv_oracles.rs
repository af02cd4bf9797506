use std::f64::consts::PI;
use std::time::Instant;

use proptest::prelude::*;
use qwl_core::encodings::FourthTerm;
use qwl_core::lhv::{
    hardy_feasibility, lhv_max_slk, lhv_max_tripartite, lhv_max_tripartite_real, LhvAssignment, LhvObjective,
};
use qwl_core::{QuditDim, C64};

fn dim(d: usize) -> QuditDim {
    QuditDim::new(d).unwrap()
}

/// Plain nested loops over (x1,x2,x3,y1,y2,y3) with the four products
/// written out by hand.
fn brute_force(d: usize) -> (f64, f64, f64, usize) {
    let w = |e: usize| C64::from_polar(1.0, 2.0 * PI * (e % d) as f64 / d as f64);
    let (mut modulus, mut real, mut slk, mut sat) = (0f64, f64::MIN, f64::MIN, 0usize);
    for x1 in 0..d {
        for x2 in 0..d {
            for x3 in 0..d {
                for y1 in 0..d {
                    for y2 in 0..d {
                        for y3 in 0..d {
                            let e = [x1 + x2 + x3, 1 + x1 + y2 + y3, 1 + y1 + x2 + y3, 1 + y1 + y2 + x3];
                            let s: C64 = e.iter().map(|&k| w(k)).sum();
                            modulus = modulus.max(s.norm());
                            real = real.max(s.re);
                            let mut t = C64::from(0.0);
                            for n in 1..d {
                                t += e.iter().map(|&k| w(n * k)).sum::<C64>();
                            }
                            slk = slk.max(0.5 * t.re);
                            sat = sat.max(e.iter().filter(|&&k| k % d == 0).count());
                        }
                    }
                }
            }
        }
    }
    (modulus, real, slk, sat)
}

#[test]
fn maxima_match_nested_loops() {
    for d in 2..=5 {
        let (modulus, real, slk, sat) = brute_force(d);
        let f = FourthTerm::Yyx;
        assert!((lhv_max_tripartite(dim(d), f).unwrap().max_value - modulus).abs() < 1e-12);
        assert!((lhv_max_tripartite_real(dim(d), f).unwrap().max_value - real).abs() < 1e-12);
        assert!((lhv_max_slk(dim(d), f).unwrap().max_value - slk).abs() < 1e-10);
        assert_eq!(hardy_feasibility(dim(d), f).unwrap().max_satisfiable, sat);
    }
}

#[test]
fn d2_values() {
    let m = lhv_max_tripartite(dim(2), FourthTerm::Yyx).unwrap();
    let s = lhv_max_slk(dim(2), FourthTerm::Yyx).unwrap();
    println!("d=2 modulus max {} slk max {}", m.max_value, s.max_value);
    assert!((m.max_value - 2.0).abs() < 1e-12);
    assert!((s.max_value - 1.0).abs() < 1e-12);
}

#[test]
fn hardy_parity_pattern_to_twelve() {
    let t = Instant::now();
    for d in 2..=12 {
        let h = hardy_feasibility(dim(d), FourthTerm::Yyx).unwrap();
        if d % 2 == 0 {
            assert!(!h.feasible, "d={d}");
            assert_eq!(h.max_satisfiable, 3, "d={d}");
        } else {
            assert!(h.feasible, "d={d}");
        }
    }
    println!("hardy d=2..12 in {:?}", t.elapsed());
}

#[test]
fn results_are_reproducible() {
    let a = lhv_max_slk(dim(6), FourthTerm::Yyx).unwrap();
    let b = lhv_max_slk(dim(6), FourthTerm::Yyx).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.max_value.to_bits(), b.max_value.to_bits());
}

#[test]
fn yyy_variant_is_enumerable() {
    let m = lhv_max_tripartite(dim(4), FourthTerm::Yyy).unwrap();
    assert!(m.max_value <= 4.0 + 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn mixtures_never_beat_the_deterministic_max(
        picks in prop::collection::vec((0u64..4096, 0.01f64..1.0), 1..8)
    ) {
        let total: f64 = picks.iter().map(|p| p.1).sum();
        let d = 4;
        let mix = |obj: LhvObjective| -> f64 {
            picks.iter().map(|&(i, w)| {
                let a = LhvAssignment::from_index(d, i);
                let s: C64 = a.exponents(FourthTerm::Yyx, 1).iter()
                    .map(|&e| C64::from_polar(1.0, 2.0 * PI * e as f64 / d as f64)).sum();
                let v = match obj {
                    LhvObjective::TripartiteModulus => s,
                    _ => C64::from(obj.score(&a, FourthTerm::Yyx)),
                };
                v * (w / total)
            }).sum::<C64>().norm()
        };
        let best = lhv_max_tripartite(dim(4), FourthTerm::Yyx).unwrap().max_value;
        prop_assert!(mix(LhvObjective::TripartiteModulus) <= best + 1e-12);
        let slk_best = lhv_max_slk(dim(4), FourthTerm::Yyx).unwrap().max_value;
        let slk_mix: f64 = picks.iter()
            .map(|&(i, w)| w / total * LhvObjective::Slk.score(&LhvAssignment::from_index(d, i), FourthTerm::Yyx))
            .sum();
        prop_assert!(slk_mix <= slk_best + 1e-12);
    }
}
