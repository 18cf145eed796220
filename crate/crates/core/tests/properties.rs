use proptest::prelude::*;

use orlicz_core::associated::{counting, omega, phi, recover_log_m};
use orlicz_core::conjugation::legendre_phi_star;
use orlicz_core::dual::{dual, sandwich_check};
use orlicz_core::expr::Expr;
use orlicz_core::growth::{check, mixed_sequence, Condition};
use orlicz_core::n_to_sequence::{associated_data, AbstractNFunction};
use orlicz_core::{SequenceSpec, Verdict, WeightSequence};

/// Log quotients from a start value and non-negative increments.
fn lc_sequence() -> impl Strategy<Value = WeightSequence> {
    (0.0..1.0f64, prop::collection::vec(0.0..0.4f64, 31..96)).prop_map(|(start, incs)| {
        let mut lq = vec![start];
        for d in incs {
            lq.push(lq.last().unwrap() + d);
        }
        // guarantee growth at the end so the sequence counts as divergent
        let last = *lq.last().unwrap();
        lq.push(last + 0.5);
        WeightSequence::explicit(&lq).unwrap()
    })
}

fn brute_omega(m: &WeightSequence, t: f64) -> f64 {
    let mut acc = 0.0;
    let mut best: f64 = 0.0;
    for j in 1..=m.horizon() {
        acc += m.log_quotient(j);
        best = best.max(j as f64 * t.ln() - acc);
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_adds_counting_functions(m in lc_sequence(), l in lc_sequence(), u in 0.0..1.0f64) {
        let h = m.horizon().min(l.horizon());
        let (m, l) = (m.truncate(h).unwrap(), l.truncate(h).unwrap());
        let c = m.convolve(&l).unwrap();
        let t = u * m.t_max().min(l.t_max()).min(c.t_max());
        prop_assert_eq!(counting(&c, t).unwrap(), counting(&m, t).unwrap() + counting(&l, t).unwrap());
    }

    #[test]
    fn omega_is_the_supremum(m in lc_sequence(), u in 0.0..1.0f64) {
        let t = u * m.t_max();
        let w = omega(&m, t).unwrap();
        prop_assert!((w - brute_omega(&m, t)).abs() <= 1e-12 * (1.0 + w));
    }

    #[test]
    fn recovery_and_conjugate_give_log_m(m in lc_sequence()) {
        for j in 0..m.horizon() {
            let want = m.log_m(j);
            let tol = 1e-12 * want.abs().max(1.0);
            prop_assert!((recover_log_m(&m, j).unwrap() - want).abs() <= tol);
            prop_assert!((legendre_phi_star(&m, j as f64).unwrap() - want).abs() <= tol);
        }
    }

    #[test]
    fn fenchel_young_inequality(m in lc_sequence(), u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let x = u * m.log_t_max();
        let s = v * (m.horizon() - 1) as f64;
        let lhs = phi(&m, x).unwrap() + legendre_phi_star(&m, s).unwrap();
        prop_assert!(lhs >= x * s - 1e-12 * (x * s).max(1.0));
    }

    #[test]
    fn dual_counting_sandwich(m in lc_sequence()) {
        let d = dual(&m).unwrap();
        if let Ok(r) = sandwich_check(&d, 500) {
            prop_assert!(r.holds(), "{:?}", r);
        }
    }

    #[test]
    fn maximizers_of_powers(p in 1.3..4.0f64) {
        let src = format!("t^{p}");
        let g = AbstractNFunction::parse(&src).unwrap();
        let (m, trace) = associated_data(&g, 32, &src).unwrap();
        prop_assert!(trace.interleaving_violations.is_empty());
        for j in 1..=32 {
            // sup_s (j s - s^p) at s = (j/p)^{1/(p-1)}
            let s = (j as f64 / p).powf(1.0 / (p - 1.0));
            let want = j as f64 * s - s.powf(p);
            prop_assert!((m.log_m(j) - want).abs() <= 1e-9 * want.abs().max(1.0), "j={}", j);
        }
    }

    #[test]
    fn holds_witnesses_replay(s in 0.0..3.0f64, c in 0.0..2.0f64, alpha in 0.3..1.5f64) {
        prop_assume!(s + c > 0.05);
        let m = mixed_sequence(s, c, alpha, 256).unwrap();
        for cond in Condition::ALL {
            let r = check(&m, cond);
            if r.verdict == Verdict::Holds {
                prop_assert_ne!(r.replay(&m), Some(false), "{} {:?}", cond, r.witnesses);
            }
        }
    }

    #[test]
    fn explicit_spec_round_trip(m in lc_sequence()) {
        let text = m.to_spec().to_json();
        let back = SequenceSpec::from_json(&text).unwrap().build(256).unwrap();
        let a: Vec<u64> = m.log_quotients().iter().map(|x| x.to_bits()).collect();
        let b: Vec<u64> = back.log_quotients().iter().map(|x| x.to_bits()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn expression_display_round_trip(a in 0.1..5.0f64, b in 1.1..3.0f64, t in 0.0..10.0f64) {
        let e = Expr::parse(&format!("{a}*t^{b} + exp(-t) - 1")).unwrap();
        let again = Expr::parse(&e.to_string()).unwrap();
        prop_assert_eq!(e.eval(t).to_bits(), again.eval(t).to_bits());
    }
}

#[test]
fn omega_vanishes_below_one() {
    let m = WeightSequence::gevrey(1.0, 64).unwrap();
    assert_eq!(omega(&m, 1.0).unwrap(), 0.0);
    assert_eq!(omega(&m, 0.5).unwrap(), 0.0);
}
