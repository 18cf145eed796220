//! From an N-function `G` to its associated weight sequence `M^G`, the
//! maximizer points `t_j`, `Σ^G` and `φ^G`.
//!
//! Everything is computed in the log variable: `log M^G_j = sup_{s>=0}
//! (j s - G(s))` and `log t_j` is the smallest maximizer.

use serde::{Deserialize, Serialize};

use crate::associated::{counting_log, phi_structure, phi_unchecked};
use crate::error::{Error, Result};
use crate::evidence::{linspace, HEADROOM};
use crate::expr::Expr;
use crate::nfunction::{
    nfunction_of_sequence, relate_nfunctions, FnGrowth, GrowthFunction, NRelation, ProbeConfig,
    RelationEvidence,
};
use crate::weight_sequences::{tie_slack, Family, WeightSequence};

/// `G(t)` given by an expression in `t`, evaluated at `|t|`, with the
/// derivative taken by forward-mode differentiation.
#[derive(Clone, Debug, PartialEq)]
pub struct AbstractNFunction {
    expr: Expr,
    source: String,
}

impl AbstractNFunction {
    /// Parse and spot-check the N-function axioms.
    pub fn parse(source: &str) -> Result<Self> {
        let g = AbstractNFunction {
            expr: Expr::parse(source)?,
            source: source.trim().to_string(),
        };
        check_axioms(&g)?;
        Ok(g)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl GrowthFunction for AbstractNFunction {
    fn value(&self, t: f64) -> Result<f64> {
        Ok(self.expr.eval(t.abs()))
    }
    fn domain_max(&self) -> f64 {
        f64::INFINITY
    }
    fn density_at(&self, t: f64) -> Option<f64> {
        let d = self.expr.eval_dual(t.abs()).d;
        d.is_finite().then_some(d)
    }
}

/// Spot-check `G(0) = 0`, `G > 0` away from 0, midpoint convexity and that
/// `G(t)/t` increases, on a geometric grid inside the domain.
pub fn check_axioms(g: &dyn GrowthFunction) -> Result<()> {
    let bad = |what: String| Err(Error::NotNFunction(what));
    let g0 = g.value(0.0)?;
    if !g0.is_finite() || g0.abs() > 1e-12 {
        return bad(format!("G(0) = {g0}"));
    }
    let hi = if g.domain_max().is_finite() {
        g.domain_max() * (1.0 - 1e-9)
    } else {
        64.0
    };
    let lo = 1e-6 * hi.min(1.0);
    let n = 200;
    let ts: Vec<f64> = (0..=n)
        .map(|i| lo * (hi / lo).powf(i as f64 / n as f64))
        .collect();
    let mut vals = Vec::with_capacity(ts.len());
    for &t in &ts {
        let v = g.value(t)?;
        if !v.is_finite() || v <= 0.0 {
            return bad(format!("G({t}) = {v}"));
        }
        vals.push(v);
    }
    for i in 1..ts.len() {
        let (a, b) = (ts[i - 1], ts[i]);
        let mid = g.value(0.5 * (a + b))?;
        let chord = 0.5 * (vals[i - 1] + vals[i]);
        if mid > chord + 1e-12 * chord.abs().max(1.0) {
            return bad(format!("midpoint convexity fails on [{a}, {b}]"));
        }
        let (ra, rb) = (vals[i - 1] / a, vals[i] / b);
        if rb < ra * (1.0 - 1e-12) {
            return bad(format!("G(t)/t decreases between {a} and {b}"));
        }
    }
    let (first, last) = (vals[0] / ts[0], vals[n] / ts[n]);
    if last <= first * (1.0 + 1e-6) {
        return bad("G(t)/t does not grow".into());
    }
    Ok(())
}

/// `(s*, j s* - G(s*))` for the smallest maximizer `s*` of `s ↦ j s - G(s)`.
///
/// With a known density the maximizer is the smallest `s` with `g(s) >= j`,
/// found by bisection to full precision. Otherwise golden-section search on
/// the concave objective after doubling a bracket from `s = 1`.
pub fn maximize_conjugate(g: &dyn GrowthFunction, slope: f64) -> Result<(f64, f64)> {
    if slope < 0.0 || slope.is_nan() {
        return Err(Error::InvalidParameter(format!("slope {slope} < 0")));
    }
    let s = if g.density_at(0.0).is_some() {
        density_argmax(g, slope)?
    } else {
        golden_argmax(g, slope)?
    };
    Ok((s, slope * s - g.value(s)?))
}

fn domain_error(g: &dyn GrowthFunction, at: f64) -> Error {
    Error::DomainExceeded {
        arg: at,
        bound: g.domain_max(),
    }
}

fn density_argmax(g: &dyn GrowthFunction, slope: f64) -> Result<f64> {
    let dens = |s: f64| g.density_at(s).ok_or_else(|| domain_error(g, s));
    if dens(0.0)? >= slope {
        return Ok(0.0);
    }
    let dom = g.domain_max();
    let mut hi = 1.0f64;
    loop {
        if hi >= dom {
            hi = dom * (1.0 - 1e-12);
            if dens(hi)? < slope {
                return Err(domain_error(g, hi));
            }
            break;
        }
        if dens(hi)? >= slope {
            break;
        }
        hi *= 2.0;
        if hi > 1e300 {
            return Err(domain_error(g, hi));
        }
    }
    let mut lo = 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(hi);
        }
        if dens(mid)? >= slope {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

fn golden_argmax(g: &dyn GrowthFunction, slope: f64) -> Result<f64> {
    let h = |s: f64| -> Result<f64> { Ok(slope * s - g.value(s)?) };
    let dom = g.domain_max();
    let mut hi = 1.0f64;
    while hi < dom
        && h(2.0 * hi)
            .map(|v| v >= h(hi).unwrap_or(f64::NAN))
            .unwrap_or(false)
    {
        hi *= 2.0;
    }
    if 2.0 * hi >= dom {
        // the objective may still increase at the domain end
        let end = dom * (1.0 - 1e-12);
        let back = end * (1.0 - 1e-6);
        if h(end)? > h(back)? {
            return Err(domain_error(g, end));
        }
        hi = end;
    } else {
        hi *= 2.0;
    }
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, hi);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (h(c)?, h(d)?);
    while b - a > 1e-12 * b.max(1.0) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = h(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = h(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Maximizer points `t_j = e^{s_j}` for `0 <= j <= J` with `t_0 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximizerTrace {
    /// `log t_j`
    pub log_t: Vec<f64>,
    /// `t_j`
    pub t_points: Vec<f64>,
    /// indices `j` where `log t_j <= log μ_{j+1} <= log t_{j+1}` fails
    pub interleaving_violations: Vec<usize>,
}

impl MaximizerTrace {
    pub fn horizon(&self) -> usize {
        self.log_t.len() - 1
    }

    /// Exclusive bound for `log t` in `Σ^G` and `φ^G`.
    pub fn log_bound(&self) -> f64 {
        self.log_t[self.horizon()]
    }

    fn check(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x >= self.log_bound() {
            return Err(Error::DomainExceeded {
                arg: x,
                bound: self.log_bound(),
            });
        }
        Ok(x)
    }
}

fn conjugate_table(g: &dyn GrowthFunction, horizon: usize) -> Result<Vec<(f64, f64)>> {
    if horizon < 8 {
        return Err(Error::InvalidParameter(format!("horizon {horizon} < 8")));
    }
    check_axioms(g)?;
    (0..=horizon)
        .map(|j| {
            if j == 0 {
                Ok((0.0, 0.0))
            } else {
                maximize_conjugate(g, j as f64)
            }
        })
        .collect()
}

fn sequence_from_table(table: &[(f64, f64)], label: &str) -> Result<WeightSequence> {
    let lq: Vec<f64> = table.windows(2).map(|w| w[1].1 - w[0].1).collect();
    // values within rounding of the previous quotient are equal
    let lq: Vec<f64> = lq
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i > 0 && v < lq[i - 1] && lq[i - 1] - v <= 1e-12 * v.abs().max(1.0) {
                lq[i - 1]
            } else if i == 0 && v < 0.0 && v > -1e-12 {
                0.0
            } else {
                v
            }
        })
        .collect();
    WeightSequence::from_log_quotients(
        &lq,
        Family::Derived {
            op: "from_nfunction".into(),
            parents: vec![label.to_string()],
        },
    )
}

fn label_of(g: &dyn GrowthFunction) -> String {
    format!("G(domain {})", g.domain_max())
}

/// `M^G` with `log M^G_j = sup_{s>=0} (j s - G(s))` for `0 <= j <= horizon`.
pub fn associated_sequence(g: &dyn GrowthFunction, horizon: usize) -> Result<WeightSequence> {
    sequence_from_table(&conjugate_table(g, horizon)?, &label_of(g))
}

pub fn associated_sequence_labeled(
    g: &dyn GrowthFunction,
    horizon: usize,
    label: &str,
) -> Result<WeightSequence> {
    sequence_from_table(&conjugate_table(g, horizon)?, label)
}

/// Maximizer points together with the interleaving check against `M^G`.
pub fn maximizer_points(g: &dyn GrowthFunction, horizon: usize) -> Result<MaximizerTrace> {
    let table = conjugate_table(g, horizon)?;
    let m = sequence_from_table(&table, &label_of(g))?;
    Ok(trace_from_table(&table, &m))
}

fn trace_from_table(table: &[(f64, f64)], m: &WeightSequence) -> MaximizerTrace {
    let log_t: Vec<f64> = table.iter().map(|p| p.0).collect();
    let le = |a: f64, b: f64| a <= b + 1e-9 * b.abs().max(1.0);
    let interleaving_violations = (0..log_t.len() - 1)
        .filter(|&j| {
            let mu = m.log_quotient(j + 1);
            !(le(log_t[j], mu) && le(mu, log_t[j + 1]))
        })
        .collect();
    MaximizerTrace {
        t_points: log_t.iter().map(|s| s.exp()).collect(),
        log_t,
        interleaving_violations,
    }
}

/// `M^G` and the maximizer trace from one pass of conjugate evaluations.
pub fn associated_data(
    g: &dyn GrowthFunction,
    horizon: usize,
    label: &str,
) -> Result<(WeightSequence, MaximizerTrace)> {
    let table = conjugate_table(g, horizon)?;
    let m = sequence_from_table(&table, label)?;
    let trace = trace_from_table(&table, &m);
    Ok((m, trace))
}

/// `Σ^G(e^x) = #{j >= 1 : log t_j <= x}`.
pub fn sigma_g_log(trace: &MaximizerTrace, x: f64) -> Result<usize> {
    let x = trace.check(x)?;
    let y = x + tie_slack(x);
    Ok(trace.log_t[1..].partition_point(|&s| s <= y))
}

/// `Σ^G(t)` for `0 <= t < t_J`.
pub fn sigma_g(trace: &MaximizerTrace, t: f64) -> Result<usize> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter(format!("argument {t} < 0")));
    }
    if t == 0.0 {
        return Ok(0);
    }
    sigma_g_log(trace, t.ln())
}

/// `φ^G(x) = ∫_0^{|x|} Σ^G(e^u) du = Σ_{log t_j <= |x|} (|x| - log t_j)`.
pub fn phi_g(trace: &MaximizerTrace, x: f64) -> Result<f64> {
    let a = trace.check(x.abs())?;
    let n = sigma_g_log(trace, a)?;
    Ok(trace.log_t[1..=n].iter().map(|s| (a - s).max(0.0)).sum())
}

/// Counts of points where `Σ_{M^G} <= Σ^G + 1` or `Σ^G <= Σ_{M^G}` fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingSandwich {
    pub points: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
}

impl CountingSandwich {
    pub fn holds(&self) -> bool {
        self.lower_violations == 0 && self.upper_violations == 0
    }
}

/// Compare `Σ_{M^G}(e^x)` and `Σ^G(e^x)` at the given log arguments.
pub fn counting_sandwich(
    m: &WeightSequence,
    trace: &MaximizerTrace,
    xs: &[f64],
) -> Result<CountingSandwich> {
    let mut r = CountingSandwich {
        points: xs.len(),
        lower_violations: 0,
        upper_violations: 0,
    };
    for &x in xs {
        let sm = counting_log(m, x)?;
        let sg = sigma_g_log(trace, x)?;
        if x >= 0.0 && sm > sg + 1 {
            r.lower_violations += 1;
        }
        if sg > sm {
            r.upper_violations += 1;
        }
    }
    Ok(r)
}

/// Fitted constants and re-verification for
/// `F_{M^G} <= G + A <= 2 F_{M^G} + B <= F_{M^G}(2t) + B` and
/// `ω_{M^G} <= ω_G <= 2 ω_{M^G} + C`, in the log variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichSuite {
    pub points: usize,
    /// probe range `[0, x_max]` of `log t`
    pub x_max: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// points where an inequality fails with the fitted constants
    pub violations: usize,
    /// largest `G - 2 φ_{ω_{M^G}}` over the first three quarters and over
    /// the last quarter of the grid
    pub c_head: f64,
    pub c_tail: f64,
}

impl SandwichSuite {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }

    /// The constant `C` is not driven by the end of the grid.
    pub fn stable(&self) -> bool {
        self.c_tail <= self.c_head.max(0.0) + 1e-9 * self.c_head.abs().max(1.0)
    }
}

/// Run both sandwiches on `points` equally spaced `x` in `[0, x_max]`,
/// where `x_max` is half of the common trusted range so that `F_{M^G}(2x)`
/// is available.
pub fn sandwich_suite(
    g: &dyn GrowthFunction,
    m: &WeightSequence,
    points: usize,
) -> Result<SandwichSuite> {
    let fm = nfunction_of_sequence(m)?.nfunction;
    let dom = fm.domain_max().min(g.domain_max());
    let x_max = 0.5 * dom * (1.0 - 1e-9);
    let xs = linspace(0.0, x_max, points);
    let mut rows = Vec::with_capacity(points);
    for &x in &xs {
        rows.push((
            g.value(x)?,
            fm.eval(x)?,
            fm.eval(2.0 * x)?,
            phi_unchecked(m, x),
        ));
    }
    let fit = |r: f64| r.max(0.0) * HEADROOM;
    let a = fit(rows.iter().map(|r| r.1 - r.0).fold(0.0, f64::max));
    let b = fit(rows.iter().map(|r| r.0 + a - 2.0 * r.1).fold(0.0, f64::max));
    let c = fit(rows.iter().map(|r| r.0 - 2.0 * r.3).fold(0.0, f64::max));
    let tol = |v: f64| 1e-9 * v.abs().max(1.0);
    let mut violations = 0;
    let q = points - points / 4;
    let (mut c_head, mut c_tail) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (i, &(gv, f1, f2, ph)) in rows.iter().enumerate() {
        let ok = f1 <= gv + a + tol(gv)
            && gv + a <= 2.0 * f1 + b + tol(gv)
            && 2.0 * f1 <= f2 + tol(f2)
            && ph <= gv + tol(gv)
            && gv <= 2.0 * ph + c + tol(gv);
        if !ok {
            violations += 1;
        }
        let r = gv - 2.0 * ph;
        if i < q {
            c_head = c_head.max(r);
        } else {
            c_tail = c_tail.max(r);
        }
    }
    Ok(SandwichSuite {
        points,
        x_max,
        a,
        b,
        c,
        violations,
        c_head,
        c_tail,
    })
}

/// `G ∼_c F_{M^G}`, `F_{M^G} ∼_c φ_{ω_{M^G}}` and `φ_{ω_{M^G}} ∼_c φ^G`.
pub fn equivalence_suite(
    g: &dyn GrowthFunction,
    m: &WeightSequence,
    trace: &MaximizerTrace,
    probe: &ProbeConfig,
) -> Result<Vec<(String, RelationEvidence)>> {
    let fm = nfunction_of_sequence(m)?.nfunction;
    let phi_m = phi_structure(m);
    let phi_gr = FnGrowth {
        f: |x: f64| phi_g(trace, x),
        domain_max: trace.log_bound(),
    };
    Ok(vec![
        (
            "G ~c F_M".into(),
            relate_nfunctions(g, &fm, NRelation::SimC, probe),
        ),
        (
            "F_M ~c phi_M".into(),
            relate_nfunctions(&fm, &phi_m, NRelation::SimC, probe),
        ),
        (
            "phi_M ~c phi_G".into(),
            relate_nfunctions(&phi_m, &phi_gr, NRelation::SimC, probe),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::Verdict;
    use crate::weight_sequences::{relate_sequences, SequenceRelation};

    fn square() -> AbstractNFunction {
        AbstractNFunction::parse("t^2").unwrap()
    }

    #[test]
    fn axioms() {
        assert!(AbstractNFunction::parse("t^3").is_ok());
        assert!(AbstractNFunction::parse("exp(t) - 1 - t").is_ok());
        assert!(AbstractNFunction::parse("t^2*(1+log(1+t))").is_ok());
        for bad in ["t", "t^2 + 1", "sqrt(t)", "t^2 - t", "log(1+t)"] {
            assert!(
                matches!(AbstractNFunction::parse(bad), Err(Error::NotNFunction(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn square_sequence_and_trace() {
        let g = square();
        let m = associated_sequence(&g, 64).unwrap();
        for j in 0..=64 {
            let want = (j * j) as f64 / 4.0;
            assert!((m.log_m(j) - want).abs() < 1e-9, "j={j}");
        }
        assert_eq!(m.log_m(0), 0.0);
        let tr = maximizer_points(&g, 64).unwrap();
        assert_eq!(tr.t_points[0], 1.0);
        for j in 0..=64 {
            let want = (j as f64 / 2.0).exp();
            assert!((tr.t_points[j] / want - 1.0).abs() < 1e-9);
        }
        assert!(tr.interleaving_violations.is_empty());
    }

    #[test]
    fn golden_section_agrees_with_density_bisection() {
        let g = square();
        let plain = FnGrowth {
            f: |t: f64| Ok(t * t),
            domain_max: f64::INFINITY,
        };
        for j in 1..40 {
            let (s1, v1) = maximize_conjugate(&g, j as f64).unwrap();
            let (s2, v2) = maximize_conjugate(&plain, j as f64).unwrap();
            assert!((v1 - v2).abs() < 1e-10);
            assert!((s1 - s2).abs() < 1e-5);
        }
    }

    #[test]
    fn counting_of_maximizers() {
        let tr = maximizer_points(&square(), 64).unwrap();
        assert_eq!(sigma_g(&tr, 1.2f64.exp()).unwrap(), 2);
        assert_eq!(sigma_g(&tr, 1.5).unwrap(), 0);
        // φ^G(x) = Σ_{j/2 <= x} (x - j/2)
        assert!((phi_g(&tr, 1.2).unwrap() - (0.7 + 0.2)).abs() < 1e-14);
        assert!(sigma_g_log(&tr, 40.0).is_err());
    }

    #[test]
    fn counting_sandwich_for_square() {
        use rand::{Rng, SeedableRng};
        let g = square();
        let (m, tr) = associated_data(&g, 64, "t^2").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..100).map(|_| rng.gen_range(0.0..31.0)).collect();
        assert!(counting_sandwich(&m, &tr, &xs).unwrap().holds());
    }

    #[test]
    fn sequence_of_associated_nfunction_is_equivalent() {
        let l = WeightSequence::gevrey(1.0, 300).unwrap();
        let f = nfunction_of_sequence(&l).unwrap().nfunction;
        let m = associated_sequence(&f, 256).unwrap();
        let l256 = l.truncate(256).unwrap();
        let ev = relate_sequences(&m, &l256, SequenceRelation::Approx).unwrap();
        assert_eq!(ev.verdict, Verdict::Holds);
        let tr = maximizer_points(&f, 256).unwrap();
        assert!(tr.interleaving_violations.is_empty());
    }

    #[test]
    fn sandwich_constants_for_square() {
        let g = square();
        let m = associated_sequence(&g, 64).unwrap();
        let s = sandwich_suite(&g, &m, 2000).unwrap();
        assert!(s.holds() && s.stable(), "{s:?}");
        // the grid reaches log t = J/4 at least
        assert!(s.x_max >= 15.5);
    }

    #[test]
    fn sandwich_constants_for_gevrey_nfunction() {
        let l = WeightSequence::gevrey(1.0, 128).unwrap();
        let f = nfunction_of_sequence(&l).unwrap().nfunction;
        let m = associated_sequence(&f, 100).unwrap();
        let s = sandwich_suite(&f, &m, 2000).unwrap();
        assert!(s.holds() && s.stable(), "{s:?}");
        assert!(s.a < 2.0 && s.c < 2.0, "{s:?}");
    }

    #[test]
    fn equivalences() {
        let probe = ProbeConfig::default();
        for src in ["t^2", "t^3", "t^2*(1+log(1+t))"] {
            let g = AbstractNFunction::parse(src).unwrap();
            let (m, tr) = associated_data(&g, 64, src).unwrap();
            for (name, ev) in equivalence_suite(&g, &m, &tr, &probe).unwrap() {
                assert_eq!(ev.verdict, Verdict::Holds, "{src}: {name}");
            }
        }
        let l = WeightSequence::gevrey(1.0, 128).unwrap();
        let f = nfunction_of_sequence(&l).unwrap().nfunction;
        let (m, tr) = associated_data(&f, 100, "F[G1]").unwrap();
        for (name, ev) in equivalence_suite(&f, &m, &tr, &probe).unwrap() {
            assert_eq!(ev.verdict, Verdict::Holds, "F_G1: {name}");
        }
    }

    #[test]
    fn slopes_beyond_the_domain() {
        let l = WeightSequence::gevrey(1.0, 32).unwrap();
        let f = nfunction_of_sequence(&l).unwrap().nfunction;
        assert!(matches!(
            associated_sequence(&f, 40),
            Err(Error::DomainExceeded { .. })
        ));
    }
}
