//! Complementary functions: right-inverse densities, the Young transform and
//! the Legendre conjugate of `φ_{ω_M}`, plus `Γ_M` and `φ^c_{ω_M}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nfunction::{Density, GrowthFunction, NFunction};
use crate::weight_sequences::WeightSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateRoute {
    RightInverse,
    YoungMax,
    Legendre,
}

impl ConjugateRoute {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "right_inverse" => Ok(ConjugateRoute::RightInverse),
            "young" | "young_max" => Ok(ConjugateRoute::YoungMax),
            "legendre" => Ok(ConjugateRoute::Legendre),
            other => Err(Error::Parse(format!("unknown route '{other}'"))),
        }
    }
}

/// `F` together with `F^c = ∫ f^c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugatePair {
    pub primal: NFunction,
    pub conjugate: NFunction,
    pub route: ConjugateRoute,
}

/// `f^c(s) = sup{t >= 0 : f(t) <= s}`.
pub fn right_inverse_density(f: &Density) -> Result<Density> {
    f.right_inverse()
}

/// `F^c(x) = ∫_0^{|x|} f^c`.
pub fn complementary(f: &NFunction) -> Result<ConjugatePair> {
    let dc = right_inverse_density(&f.density)?;
    Ok(ConjugatePair {
        primal: f.clone(),
        conjugate: NFunction::new(dc, format!("{}^c", f.label)),
        route: ConjugateRoute::RightInverse,
    })
}

/// `max_{t >= 0} (|s| t - F(t))` for a density-based `F`, found by comparing
/// the knots of the density with the interior stationary points of each
/// linear piece. Returns the value and the smallest maximizer.
pub fn young_conjugate(f: &NFunction, s: f64) -> Result<(f64, f64)> {
    let s = s.abs();
    let d = &f.density;
    if s >= d.sup_value() {
        return Err(Error::SlopeExceeded {
            slope: s,
            max: d.sup_value(),
        });
    }
    let (knots, vals, slopes) = (d.knots(), d.values(), d.slopes());
    let mut cands = Vec::with_capacity(2 * knots.len());
    for i in 0..knots.len() {
        let a = knots[i];
        let b = knots.get(i + 1).cloned().unwrap_or(d.domain_max());
        cands.push(a);
        if slopes[i] > 0.0 {
            let t = a + (s - vals[i]) / slopes[i];
            if t > a && t < b {
                cands.push(t);
            }
        }
    }
    let mut best = (f64::NEG_INFINITY, 0.0);
    for t in cands {
        let v = s * t - d.integral(t)?;
        if v > best.0 {
            best = (v, t);
        }
    }
    Ok(best)
}

/// `Γ_M(s) = sup{t >= 0 : Σ_M(e^t) <= s}`: zero on `[0, d)` when
/// `μ_1 = ... = μ_d = 1 < μ_{d+1}`, and `log μ_{j+1}` on `[j, j+1)` otherwise.
pub fn gamma(m: &WeightSequence, s: f64) -> Result<f64> {
    let s = check_cell(m, s)?;
    let d = m.leading_ones();
    if d > 0 && s < d as f64 {
        return Ok(0.0);
    }
    Ok(m.log_quotient(s.floor() as usize + 1))
}

fn check_cell(m: &WeightSequence, s: f64) -> Result<f64> {
    if s.is_nan() {
        return Err(Error::InvalidParameter("NaN argument".into()));
    }
    let a = s.abs();
    let j = a.floor();
    if j + 1.0 > m.horizon() as f64 {
        return Err(Error::IndexExceeded {
            index: j as usize + 1,
            max: m.horizon(),
        });
    }
    Ok(a)
}

/// `φ^c_{ω_M}(x) = ∫_0^{|x|} Γ_M`: the unit cells up to `⌊x⌋` contribute
/// `log M_{⌊x⌋}`, the last cell its fraction of `log μ_{⌊x⌋+1}`.
pub fn phi_c(m: &WeightSequence, x: f64) -> Result<f64> {
    let a = check_cell(m, x)?;
    let n = a.floor() as usize;
    let frac = a - n as f64;
    if frac == 0.0 {
        return Ok(m.log_m(n));
    }
    Ok(m.log_m(n) + frac * m.log_quotient(n + 1))
}

/// `φ*_{ω_M}(s) = sup_{t >= 0} (|s| t - φ_{ω_M}(t))` for `|s| <= J - 1`.
///
/// For `j - 1 < |s| <= j` the slope of `φ` crosses `|s|` at `t = log μ_j`,
/// where `φ(log μ_j) = j log μ_j - log M_j`; so the value is
/// `(|s| - j) log μ_j + log M_j`, which is `log M_j` at `|s| = j`.
pub fn legendre_phi_star(m: &WeightSequence, s: f64) -> Result<f64> {
    let a = s.abs();
    let max = (m.horizon() - 1) as f64;
    if a.is_nan() || a > max {
        return Err(Error::SlopeExceeded { slope: s, max });
    }
    let j = a.ceil() as usize;
    if j == 0 {
        return Ok(0.0);
    }
    Ok((a - j as f64) * m.log_quotient(j) + m.log_m(j))
}

/// Evaluate one of the three complementary constructions of `F_M`.
pub fn conjugate_value(
    route: ConjugateRoute,
    m: &WeightSequence,
    pair: &ConjugatePair,
    s: f64,
) -> Result<f64> {
    match route {
        ConjugateRoute::RightInverse => pair.conjugate.eval(s),
        ConjugateRoute::YoungMax => young_conjugate(&pair.primal, s).map(|v| v.0),
        ConjugateRoute::Legendre => legendre_phi_star(m, s),
    }
}

/// Largest violation of `F(t) + G(s) >= s t` over the grid; non-positive
/// means the Fenchel inequality holds everywhere on it.
pub fn fenchel_violation(
    primal: &dyn GrowthFunction,
    conj: &dyn Fn(f64) -> Result<f64>,
    ts: &[f64],
    ss: &[f64],
) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for &t in ts {
        let ft = primal.value(t)?;
        for &s in ss {
            let gs = conj(s)?;
            let gap = s * t - ft - gs;
            let scale = (s * t).abs().max(1.0);
            worst = worst.max(gap / scale);
        }
    }
    Ok(worst)
}

/// Additive-constant comparison of two functions on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteGap {
    /// `sup |g1 - g2|` over the grid
    pub max_gap: f64,
    /// the same supremum restricted to the last quarter of the grid
    pub tail_gap: f64,
    /// the supremum over the first three quarters
    pub head_gap: f64,
}

impl RouteGap {
    /// The difference stays bounded: the last quarter adds nothing to the
    /// gap seen before it (up to `tol` relative).
    pub fn stable(&self, tol: f64) -> bool {
        self.tail_gap <= self.head_gap * (1.0 + tol) + tol
    }
}

pub fn route_gap(
    g1: &dyn Fn(f64) -> Result<f64>,
    g2: &dyn Fn(f64) -> Result<f64>,
    grid: &[f64],
) -> Result<RouteGap> {
    let q = grid.len() - grid.len() / 4;
    let mut head: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for (i, &s) in grid.iter().enumerate() {
        let d = (g1(s)? - g2(s)?).abs();
        if i < q {
            head = head.max(d);
        } else {
            tail = tail.max(d);
        }
    }
    Ok(RouteGap {
        max_gap: head.max(tail),
        tail_gap: tail,
        head_gap: head,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::associated::{counting_log, phi};
    use crate::nfunction::nfunction_of_sequence;

    fn g1() -> WeightSequence {
        WeightSequence::gevrey(1.0, 64).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let g = g1();
        assert_eq!(gamma(&g, 2.5).unwrap(), 3f64.ln());
        assert_eq!(gamma(&g, 0.5).unwrap(), 0.0);
        let q = WeightSequence::qgevrey(2.0, 2.0, 64).unwrap();
        assert_eq!(gamma(&q, 0.5).unwrap(), 2f64.ln());
        assert!(matches!(gamma(&g, 64.0), Err(Error::IndexExceeded { .. })));
    }

    #[test]
    fn gamma_matches_definition() {
        for m in [g1(), WeightSequence::qgevrey(2.0, 2.0, 32).unwrap()] {
            let step = m.log_quotient(m.horizon()).max(1.0) / 1024.0;
            for k in 0..40 {
                let s = 0.37 * k as f64;
                if s + 2.0 > m.horizon() as f64 {
                    break;
                }
                // sup{t : Σ(e^t) <= s} on a fine grid
                let mut t = 0.0;
                let mut last = 0.0;
                while t < m.log_t_max() {
                    if counting_log(&m, t).unwrap() as f64 <= s {
                        last = t;
                    } else {
                        break;
                    }
                    t += step;
                }
                let g = gamma(&m, s).unwrap();
                assert!(
                    g >= last - 1e-12 && g <= last + step + 1e-12,
                    "s={s} {g} {last}"
                );
            }
        }
    }

    #[test]
    fn phi_c_examples() {
        let g = g1();
        assert!((phi_c(&g, 3.0).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert_eq!(phi_c(&g, 0.0).unwrap(), 0.0);
        let want = 2f64.ln() + 0.5 * 3f64.ln();
        assert!((phi_c(&g, 2.5).unwrap() - want).abs() < 1e-15);
    }

    fn star_oracle(m: &WeightSequence, s: f64) -> f64 {
        // breakpoint enumeration: the sup of a convex piecewise-linear
        // conjugate is attained at a breakpoint
        let mut best: f64 = 0.0;
        for j in 1..m.horizon() {
            let x = m.log_quotient(j);
            if x >= m.log_t_max() {
                break;
            }
            best = best.max(s * x - phi(m, x).unwrap());
        }
        best
    }

    #[test]
    fn legendre_examples() {
        let g = g1();
        assert_eq!(legendre_phi_star(&g, 3.0).unwrap(), 6f64.ln());
        assert_eq!(legendre_phi_star(&g, 0.0).unwrap(), 0.0);
        let v = legendre_phi_star(&g, 2.5).unwrap();
        assert!((v - star_oracle(&g, 2.5)).abs() < 1e-14);
        assert!((v - (6f64.ln() - 0.5 * 3f64.ln())).abs() < 1e-14);
        assert!(matches!(
            legendre_phi_star(&g, 63.5),
            Err(Error::SlopeExceeded { .. })
        ));
        for k in 0..120 {
            let s = 0.41 * k as f64;
            let want = star_oracle(&g, s);
            assert!((legendre_phi_star(&g, s).unwrap() - want).abs() < 1e-12 * (1.0 + want));
        }
    }

    #[test]
    fn square_complement() {
        let f = NFunction::square();
        let p = complementary(&f).unwrap();
        for s in [0.0, 0.5, 1.0, 3.0, 10.0] {
            assert!((p.conjugate.eval(s).unwrap() - s * s / 4.0).abs() < 1e-12);
            let (v, t) = young_conjugate(&f, s).unwrap();
            assert!((v - s * s / 4.0).abs() < 1e-12);
            assert!((t - s / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complementary_routes_agree_for_gevrey() {
        let m = g1();
        let pair = complementary(&nfunction_of_sequence(&m).unwrap().nfunction).unwrap();
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.15).collect();
        for &s in &grid {
            let a = pair.conjugate.eval(s).unwrap();
            let b = young_conjugate(&pair.primal, s).unwrap().0;
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "s={s} {a} {b}");
        }
        let leg = |s: f64| legendre_phi_star(&m, s);
        let ri = |s: f64| pair.conjugate.eval(s);
        let gap = route_gap(&ri, &leg, &grid).unwrap();
        assert!(gap.stable(1e-9), "{gap:?}");
    }

    #[test]
    fn fenchel_inequality_on_grid() {
        let m = g1();
        let pair = complementary(&nfunction_of_sequence(&m).unwrap().nfunction).unwrap();
        let ts: Vec<f64> = (0..50).map(|i| i as f64 * 0.08).collect();
        let ss: Vec<f64> = (0..50).map(|i| i as f64 * 0.6).collect();
        let c = |s: f64| pair.conjugate.eval(s);
        assert!(fenchel_violation(&pair.primal, &c, &ts, &ss).unwrap() <= 1e-12);
        let star = |s: f64| legendre_phi_star(&m, s);
        let phi_fn = crate::associated::phi_structure(&m);
        assert!(fenchel_violation(&phi_fn, &star, &ts, &ss).unwrap() <= 1e-12);
    }

    #[test]
    fn biconjugate_recovers_phi() {
        let m = g1();
        for k in 1..40 {
            let x = 0.1 * k as f64;
            // φ**(x) = sup_s (s x - φ*(s)); the sup over integer slopes is exact
            let mut best = f64::NEG_INFINITY;
            for j in 0..m.horizon() {
                best = best.max(j as f64 * x - legendre_phi_star(&m, j as f64).unwrap());
            }
            assert!((best - phi(&m, x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugation_reverses_order() {
        use crate::nfunction::{relate_nfunctions, NRelation, ProbeConfig};
        let probe = ProbeConfig::default();
        let f = nfunction_of_sequence(&WeightSequence::gevrey(2.0, 256).unwrap())
            .unwrap()
            .nfunction;
        let g = nfunction_of_sequence(&WeightSequence::qgevrey(2.0, 2.0, 256).unwrap())
            .unwrap()
            .nfunction;
        assert_eq!(
            relate_nfunctions(&g, &f, NRelation::PreceqC, &probe).verdict,
            crate::Verdict::Holds
        );
        let fc = complementary(&f).unwrap().conjugate;
        let gc = complementary(&g).unwrap().conjugate;
        assert_eq!(
            relate_nfunctions(&fc, &gc, NRelation::PreceqC, &probe).verdict,
            crate::Verdict::Holds
        );
        assert_eq!(
            relate_nfunctions(&gc, &fc, NRelation::PreceqC, &probe).verdict,
            crate::Verdict::Fails
        );
    }
}
