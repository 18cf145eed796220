//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p orlicz-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orlicz_core::associated::{counting, omega, recover_log_m};
use orlicz_core::conjugation::{
    complementary, conjugate_value, legendre_phi_star, route_gap, ConjugateRoute,
};
use orlicz_core::dual::{dual, sandwich_check};
use orlicz_core::growth::{
    check, check_family, family_rows, implication_audit, mixed_sequence, observed_verdicts, Audit,
    Condition, DELTA_SQUARE_HORIZON,
};
use orlicz_core::n_to_sequence::{associated_sequence, maximizer_points, AbstractNFunction};
use orlicz_core::nfunction::{
    compare_counting, nfunction_of_sequence, relate_nfunctions, NRelation, ProbeConfig,
};
use orlicz_core::weight_sequences::{relate_sequences, SequenceRelation};
use orlicz_core::{Verdict, WeightSequence};

const J: usize = 256;

fn families() -> Vec<(&'static str, WeightSequence)> {
    vec![
        ("G^0.5", WeightSequence::gevrey(0.5, J).unwrap()),
        ("G^1", WeightSequence::gevrey(1.0, J).unwrap()),
        ("G^2", WeightSequence::gevrey(2.0, J).unwrap()),
        (
            "qgevrey{2,2}",
            WeightSequence::qgevrey(2.0, 2.0, J).unwrap(),
        ),
        (
            "qgevrey{3,2}",
            WeightSequence::qgevrey(3.0, 2.0, J).unwrap(),
        ),
    ]
}

/// Distance in units in the last place between two finite doubles.
fn ulps(a: f64, b: f64) -> u64 {
    fn key(x: f64) -> i64 {
        let b = x.to_bits() as i64;
        if b < 0 {
            i64::MIN - b
        } else {
            b
        }
    }
    key(a).abs_diff(key(b))
}

/// `log M_j` summed directly from the quotients.
fn naive_log_m(m: &WeightSequence) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut acc = 0.0;
    for j in 1..=m.horizon() {
        acc += m.log_quotient(j);
        out.push(acc);
    }
    out
}

fn random_lc(rng: &mut ChaCha8Rng) -> WeightSequence {
    let mut lq = Vec::with_capacity(J);
    let mut x: f64 = rng.gen_range(0.0..1.0);
    let scale: f64 = rng.gen_range(0.01..0.3);
    for _ in 0..J {
        lq.push(x);
        // occasional flat runs, otherwise a random increment
        if rng.gen_bool(0.8) {
            x += scale * rng.gen::<f64>();
        }
    }
    WeightSequence::explicit(&lq).unwrap()
}

type Criterion = Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn recovery() -> Outcome {
    let mut worst = 0;
    for (_, m) in families() {
        let naive = naive_log_m(&m);
        for (j, &want) in naive.iter().enumerate().take(J) {
            worst = worst.max(ulps(recover_log_m(&m, j).unwrap(), want));
        }
    }
    outcome(
        worst <= 4,
        format!("max {worst} ulp over 5 families, j < {J}"),
    )
}

fn conjugate_at_integers() -> Outcome {
    let mut worst = 0;
    for (_, m) in families() {
        let naive = naive_log_m(&m);
        for (j, &want) in naive.iter().enumerate().take(J) {
            worst = worst.max(ulps(legendre_phi_star(&m, j as f64).unwrap(), want));
        }
    }
    outcome(worst <= 4, format!("max {worst} ulp"))
}

fn counting_additivity(rng: &mut ChaCha8Rng) -> Outcome {
    let mut mismatches = 0;
    let mut tested = 0;
    for _ in 0..10 {
        let m = random_lc(rng);
        let l = random_lc(rng);
        let c = m.convolve(&l).unwrap();
        let bound = m.t_max().min(l.t_max()).min(c.t_max());
        for _ in 0..500 {
            let t = rng.gen_range(0.0..bound);
            let lhs = counting(&c, t).unwrap();
            let rhs = counting(&m, t).unwrap() + counting(&l, t).unwrap();
            tested += 1;
            if lhs != rhs {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} mismatches in {tested} points"),
    )
}

fn omega_sup(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, m) in families() {
        let naive = naive_log_m(&m);
        for _ in 0..200 {
            let t = rng.gen_range(0.0..m.t_max());
            let w = omega(&m, t).unwrap();
            let brute = if t <= 1.0 {
                0.0
            } else {
                naive
                    .iter()
                    .enumerate()
                    .map(|(j, lm)| j as f64 * t.ln() - lm)
                    .fold(0.0, f64::max)
            };
            worst = worst.max((w - brute).abs() / (1e-12 * (1.0 + w)));
        }
    }
    outcome(
        worst <= 1.0,
        format!("max error {worst:.3} x 1e-12(1+omega)"),
    )
}

fn dual_sandwich() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, m) in families() {
        let d = dual(&m).unwrap();
        let r = sandwich_check(&d, 10_000).unwrap();
        ok &= r.holds();
        if name == "G^1" {
            ok &= r.min_gap == 0.0 && r.max_gap == 0.0;
        }
        detail.push(format!("{name} gap [{:.3}, {:.3}]", r.min_gap, r.max_gap));
    }
    outcome(ok, detail.join("; "))
}

fn complementary_routes() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let routes = [
        ConjugateRoute::RightInverse,
        ConjugateRoute::YoungMax,
        ConjugateRoute::Legendre,
    ];
    let grid: Vec<f64> = (0..=2000)
        .map(|i| i as f64 * (J / 2) as f64 / 2000.0)
        .collect();
    for (_, m) in families() {
        let pair = complementary(&nfunction_of_sequence(&m).unwrap().nfunction).unwrap();
        for a in 0..3 {
            for b in a + 1..3 {
                let g1 = |s: f64| conjugate_value(routes[a], &m, &pair, s);
                let g2 = |s: f64| conjugate_value(routes[b], &m, &pair, s);
                let gap = route_gap(&g1, &g2, &grid).unwrap();
                ok &= gap.stable(1e-9);
                worst = worst.max(gap.max_gap);
            }
        }
    }
    outcome(
        ok,
        format!("largest additive gap {worst:.4}, stable on the last quartile: {ok}"),
    )
}

fn verdict_matrix() -> Outcome {
    let mut bad = Vec::new();
    for row in family_rows() {
        let reports = check_family(&row.family, J).unwrap();
        let obs = observed_verdicts(&reports);
        for (k, v) in &row.expected {
            if obs.get(k) != Some(v) {
                bad.push(format!("{} {k}={:?}", row.family, obs.get(k)));
            }
        }
        let w = |c: Condition, key: &str| {
            reports
                .iter()
                .find(|r| r.condition == c)
                .and_then(|r| r.witnesses.get(key).copied())
        };
        let (want, got) = match row.family {
            orlicz_core::Family::Gevrey { .. } => (2.0, w(Condition::DeltaSquare, "A")),
            _ => (2.0, w(Condition::Delta2, "k")),
        };
        if got != Some(want) {
            bad.push(format!("{} witness {got:?}", row.family));
        }
        if let orlicz_core::Family::QGevrey { .. } = row.family {
            if w(Condition::Nabla2, "l") != Some(2.0) {
                bad.push(format!("{} l={:?}", row.family, w(Condition::Nabla2, "l")));
            }
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            "5 families match".into()
        } else {
            bad.join("; ")
        },
    )
}

fn comparison_coherence() -> Outcome {
    let g1 = WeightSequence::gevrey(1.0, J).unwrap();
    let mut seqs = families();
    seqs.push(("G^1*G^1", g1.convolve(&g1).unwrap()));
    seqs.push(("G^1.G^1", g1.product(&g1).unwrap()));
    let probe = ProbeConfig::default();
    let fs: Vec<_> = seqs
        .iter()
        .map(|(_, m)| nfunction_of_sequence(m).unwrap().nfunction)
        .collect();
    let mut incoherent = Vec::new();
    let mut reverse = 0;
    let mut pairs = 0;
    for a in 0..seqs.len() {
        for b in 0..seqs.len() {
            if a == b {
                continue;
            }
            pairs += 1;
            let c = compare_counting(&seqs[a].1, &seqs[b].1, &probe).unwrap();
            let routes = [c.counting, c.quotient, c.function_level, c.density_level];
            if routes.iter().any(|v| *v != routes[0]) {
                incoherent.push(format!(
                    "{}->{} {}",
                    seqs[a].0,
                    seqs[b].0,
                    routes.iter().map(|v| v.short()).collect::<String>()
                ));
            }
            let le = relate_nfunctions(&fs[a], &fs[b], NRelation::Preceq, &probe).verdict;
            if le == Verdict::Holds {
                let back = relate_nfunctions(&fs[b], &fs[a], NRelation::PreceqC, &probe).verdict;
                if back != Verdict::Holds {
                    reverse += 1;
                }
            }
        }
    }
    outcome(
        incoherent.is_empty() && reverse == 0,
        format!(
            "{pairs} ordered pairs, {} incoherent{}, {reverse} order-reversal violations",
            incoherent.len(),
            if incoherent.is_empty() {
                String::new()
            } else {
                format!(" ({})", incoherent.join(", "))
            }
        ),
    )
}

fn round_trip() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, l) in [
        ("G^1", WeightSequence::gevrey(1.0, 300).unwrap()),
        (
            "qgevrey{2,2}",
            WeightSequence::qgevrey(2.0, 2.0, 300).unwrap(),
        ),
    ] {
        let p = nfunction_of_sequence(&l).unwrap();
        let m = associated_sequence(&p.nfunction, J).unwrap();
        let ev = relate_sequences(&m, &l.truncate(J).unwrap(), SequenceRelation::Approx).unwrap();
        // |F_L - phi_L| <= max(C, D), so log A = max(C, D) bounds the gap
        let log_a = p.c.max(p.d);
        let bound = ev.log_bound.unwrap_or(f64::INFINITY);
        ok &= ev.verdict == Verdict::Holds && bound <= log_a;
        detail.push(format!(
            "{name}: {} log bound {bound:.4} <= {log_a:.4}",
            ev.verdict.short()
        ));
    }
    let g = AbstractNFunction::parse("t^2").unwrap();
    let m = associated_sequence(&g, 64).unwrap();
    let tr = maximizer_points(&g, 64).unwrap();
    let mut e_m: f64 = 0.0;
    let mut e_t: f64 = 0.0;
    for j in 0..=64 {
        e_m = e_m.max((m.log_m(j) - (j * j) as f64 / 4.0).abs());
        let want = (j as f64 / 2.0).exp();
        e_t = e_t.max((tr.t_points[j] - want).abs() / want);
    }
    ok &= e_m <= 1e-9 && e_t <= 1e-9;
    detail.push(format!(
        "t^2: |log M_j - j^2/4| {e_m:.1e}, t_j rel {e_t:.1e}"
    ));
    outcome(ok, detail.join("; "))
}

fn audit(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut total = Audit::default();
    for row in family_rows() {
        let reports = check_family(&row.family, J).unwrap();
        total.merge(implication_audit(&reports).unwrap());
    }
    let mut sequences = 0;
    while sequences < 100 {
        let s = rng.gen_range(0.0..3.0);
        let c = if rng.gen_bool(0.5) {
            rng.gen_range(0.0..2.0)
        } else {
            0.0
        };
        let alpha = rng.gen_range(0.3..1.5);
        let Ok(big) = mixed_sequence(s, c, alpha, DELTA_SQUARE_HORIZON) else {
            continue;
        };
        let m = big.truncate(J).unwrap();
        let reports: Vec<_> = Condition::ALL
            .iter()
            .map(|&c| {
                if c == Condition::DeltaSquare {
                    check(&big, c)
                } else {
                    check(&m, c)
                }
            })
            .collect();
        total.merge(implication_audit(&reports).unwrap());
        sequences += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        total.passes() && secs < 60.0,
        format!(
            "{} implications checked, {} violations, {} inconclusive verdicts excluded, {secs:.2} s",
            total.checked,
            total.violations.len(),
            total.inconclusive.len()
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_531);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("recovery of log M_j", Box::new(|_| recovery())),
        (
            "conjugate at integers",
            Box::new(|_| conjugate_at_integers()),
        ),
        (
            "counting additivity under convolution",
            Box::new(counting_additivity),
        ),
        ("omega finite sum vs brute-force sup", Box::new(omega_sup)),
        (
            "Gamma / dual counting sandwich",
            Box::new(|_| dual_sandwich()),
        ),
        (
            "complementary routes agree",
            Box::new(|_| complementary_routes()),
        ),
        ("condition verdict matrix", Box::new(|_| verdict_matrix())),
        ("comparison coherence", Box::new(|_| comparison_coherence())),
        (
            "N-function to sequence round trip",
            Box::new(|_| round_trip()),
        ),
        ("implication audit", Box::new(audit)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let o = run(&mut rng);
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.2} s",
        10 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
