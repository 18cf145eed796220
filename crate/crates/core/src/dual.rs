//! The dual sequence `D` of `M`, its counting function and the comparison
//! with `Γ_M`.

use serde::{Deserialize, Serialize};

use crate::associated::counting;
use crate::conjugation::gamma;
use crate::error::{Error, Result};
use crate::evidence::linspace;
use crate::weight_sequences::{tie_slack, Family, WeightSequence};

/// `D` with `δ_{j+1} = Σ_M(j)` for integers `j >= μ_1` and `δ_{j+1} = 1`
/// for `-1 <= j < μ_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSequence {
    pub base: WeightSequence,
    pub dual: WeightSequence,
    /// `d` with `μ_d + 1 <= j < μ_{d+1} + 1` for the least integer
    /// `j >= μ_1 + 1`
    pub d_threshold: usize,
}

/// Number of integers `j >= 0` with `j < e^x`, i.e. `⌈e^x⌉`, with values
/// within a few ulps of an integer snapped to it.
fn ceil_exp(x: f64) -> usize {
    let v = x.exp();
    let r = v.round();
    if (v - r).abs() <= 1e-12 * v.max(1.0) {
        r as usize
    } else {
        v.ceil() as usize
    }
}

/// Build the dual sequence. `D` keeps the base horizon unless `Σ_M(j)` is
/// only trusted for fewer integers `j`, in which case it is cut there.
pub fn dual(m: &WeightSequence) -> Result<DualSequence> {
    // largest integer j with Σ_M(j) trusted: j < T_max
    let j_max = ceil_exp(m.log_t_max()).saturating_sub(1);
    let jd = m.horizon().min(j_max + 1);
    let mu1 = m.quotient(1);
    let mut lq = Vec::with_capacity(jd);
    for i in 1..=jd {
        let j = (i - 1) as f64;
        let delta = if j < mu1 && !near(j, mu1) {
            1
        } else {
            counting(m, j)?.max(1)
        };
        lq.push((delta as f64).ln());
    }
    let family = Family::Derived {
        op: "dual".into(),
        parents: vec![m.label()],
    };
    // δ is non-decreasing with δ_1 = 1 by construction, and tends to
    // infinity with Σ_M; the finite divergence heuristic is not applied
    // because slowly growing Σ_M give long flat runs in δ.
    let report = crate::weight_sequences::validate_lc(&lq);
    if !report.normalized || !report.log_convex {
        return Err(Error::NotLogConvex {
            index: report.first_violation_index.unwrap_or(0),
        });
    }
    let d = WeightSequence::from_trusted(&lq, family);
    // least integer j >= μ_1 + 1 is ⌈μ_1⌉ + 1; then d = Σ_M(j - 1)
    let j_min = ceil_exp(m.log_quotient(1)) + 1;
    let d_threshold = m.count_le_log(((j_min - 1) as f64).ln());
    Ok(DualSequence {
        base: m.clone(),
        dual: d,
        d_threshold,
    })
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

impl DualSequence {
    /// Exclusive bound for arguments of `Σ_D`: `t` must stay below
    /// `δ_{J_D-1}` and `μ_{⌊t⌋+1}` must be stored.
    pub fn validity_bound(&self) -> f64 {
        self.dual.t_max().min(self.base.horizon() as f64)
    }

    fn check(&self, t: f64) -> Result<f64> {
        let b = self.validity_bound();
        if t.is_nan() || t < 0.0 || t >= b {
            return Err(Error::DomainExceeded { arg: t, bound: b });
        }
        Ok(t)
    }
}

/// `Σ_D(t)` from the closed form in terms of the quotients of `M`:
/// `0` below 1; for `n <= t < n+1` it is `⌈μ_{n+1}⌉` once `n >= d`, and
/// `⌈μ_1⌉` (the largest integer `j < μ_1 + 1`) for `n < d`.
pub fn sigma_dual(dual: &DualSequence, t: f64) -> Result<usize> {
    let t = dual.check(t)?;
    if t < 1.0 {
        return Ok(0);
    }
    let n = t.floor() as usize;
    let m = &dual.base;
    if dual.d_threshold >= 2 && n < dual.d_threshold {
        return Ok(ceil_exp(m.log_quotient(1)));
    }
    Ok(ceil_exp(m.log_quotient(n + 1)))
}

/// `F_{Γ̃_D}(x) = ∫_0^{|x|} Γ̃_D` with `Γ̃_D = log Σ_D` on `[1, ∞)` and 0 below,
/// accumulated over the unit cells where `Σ_D` is constant.
pub fn f_gamma_tilde(dual: &DualSequence, x: f64) -> Result<f64> {
    let a = dual.check(x.abs())?;
    let mut acc = 0.0;
    let n = a.floor() as usize;
    for k in 1..n {
        acc += (sigma_dual(dual, k as f64)? as f64).ln();
    }
    if n >= 1 {
        acc += (a - n as f64) * (sigma_dual(dual, n as f64)? as f64).ln();
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub points: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// points with `log Σ_D(t) < Γ_M(t)`
    pub lower_violations: usize,
    /// points with `log Σ_D(t) > Γ_M(t) + 1`
    pub upper_violations: usize,
    /// range of `log Σ_D - Γ_M`
    pub min_gap: f64,
    pub max_gap: f64,
    /// largest `(log Σ_D - Γ_M) / log Σ_D` over the first and last quarter
    pub head_relative_gap: f64,
    pub tail_relative_gap: f64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower_violations == 0 && self.upper_violations == 0
    }

    /// `Γ_M / log Σ_D` does not move away from 1 towards the end of the grid.
    pub fn ratio_settles(&self) -> bool {
        self.tail_relative_gap <= self.head_relative_gap + 1e-12
    }
}

/// Check `Γ_M(t) <= log Σ_D(t) <= Γ_M(t) + 1` on `points` equally spaced
/// `t` in `[d, validity bound)`.
pub fn sandwich_check(dual: &DualSequence, points: usize) -> Result<SandwichReport> {
    let lo = dual.d_threshold.max(1) as f64;
    let hi = dual.validity_bound() * (1.0 - 1e-12);
    if hi <= lo {
        return Err(Error::DomainExceeded { arg: lo, bound: hi });
    }
    let grid = linspace(lo, hi, points);
    sandwich_on(dual, &grid)
}

pub fn sandwich_on(dual: &DualSequence, grid: &[f64]) -> Result<SandwichReport> {
    let n = grid.len();
    let q = n / 4;
    let mut r = SandwichReport {
        points: n,
        t_min: grid[0],
        t_max: grid[n - 1],
        lower_violations: 0,
        upper_violations: 0,
        min_gap: f64::INFINITY,
        max_gap: f64::NEG_INFINITY,
        head_relative_gap: 0.0,
        tail_relative_gap: 0.0,
    };
    for (i, &t) in grid.iter().enumerate() {
        let g = gamma(&dual.base, t)?;
        let l = (sigma_dual(dual, t)? as f64).ln();
        // log ⌈μ⌉ and the stored log μ may differ in the last bits when μ
        // is an integer
        let gap = if (l - g).abs() <= tie_slack(g) {
            0.0
        } else {
            l - g
        };
        if gap < 0.0 {
            r.lower_violations += 1;
        }
        if gap > 1.0 {
            r.upper_violations += 1;
        }
        r.min_gap = r.min_gap.min(gap);
        r.max_gap = r.max_gap.max(gap);
        let rel = if l > 0.0 { gap / l } else { 0.0 };
        if i < q {
            r.head_relative_gap = r.head_relative_gap.max(rel);
        }
        if i >= n - q {
            r.tail_relative_gap = r.tail_relative_gap.max(rel);
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugation::phi_c;

    fn g1() -> WeightSequence {
        WeightSequence::gevrey(1.0, 64).unwrap()
    }

    #[test]
    fn dual_of_gevrey_one() {
        let d = dual(&g1()).unwrap();
        let delta: Vec<f64> = (1..=8).map(|j| d.dual.quotient(j)).collect();
        let want = [1.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        for (a, b) in delta.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{delta:?}");
        }
        // D_j = (j-1)!
        assert!((d.dual.log_m(5) - 24f64.ln()).abs() < 1e-13);
        assert_eq!(d.dual.log_m(0), 0.0);
        assert_eq!(d.dual.log_m(1), 0.0);
        assert_eq!(d.d_threshold, 1);
        assert_eq!(d.dual.horizon(), 63);
    }

    #[test]
    fn sigma_dual_examples() {
        let d = dual(&g1()).unwrap();
        assert_eq!(sigma_dual(&d, 2.5).unwrap(), 3);
        assert_eq!(sigma_dual(&d, 0.5).unwrap(), 0);
        let q = dual(&WeightSequence::qgevrey(2.0, 2.0, 64).unwrap()).unwrap();
        assert_eq!(
            sigma_dual(&q, 1.5).unwrap(),
            crate::associated::counting(&q.dual, 1.5).unwrap()
        );
    }

    #[test]
    fn qgevrey_dual_quotients() {
        let m = WeightSequence::qgevrey(2.0, 2.0, 64).unwrap();
        let d = dual(&m).unwrap();
        // δ_{j+1} = ⌊(log2 j + 1)/2⌋ for j >= 2
        for j in 2..d.dual.horizon() {
            let want = (((j as f64).log2() + 1.0) / 2.0).floor().max(1.0);
            assert!((d.dual.quotient(j + 1) - want).abs() < 1e-9, "j={j}");
        }
        let r = crate::weight_sequences::validate_lc(d.dual.log_quotients());
        assert!(r.normalized && r.log_convex);
    }

    #[test]
    fn sandwich_for_gevrey_is_tight() {
        let d = dual(&g1()).unwrap();
        let r = sandwich_check(&d, 2000).unwrap();
        assert!(r.holds());
        assert_eq!(r.min_gap, 0.0);
        assert_eq!(r.max_gap, 0.0);
    }

    #[test]
    fn gamma_tilde_integral() {
        let d = dual(&g1()).unwrap();
        assert_eq!(f_gamma_tilde(&d, 0.7).unwrap(), 0.0);
        assert_eq!(f_gamma_tilde(&d, 1.0).unwrap(), 0.0);
        let v = f_gamma_tilde(&d, 3.0).unwrap();
        assert!((v - 6f64.ln()).abs() < 1e-15);
        assert!((v - phi_c(&d.base, 3.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_counting_in_both_cases() {
        // case II: μ_1 = 1.5, μ_2 = 1.8 < j_min - 1 = 2, so d = 2
        let mut mu = vec![1.5f64, 1.8, 10.0];
        mu.extend((4..40).map(|j| 10.0 + j as f64));
        let lq: Vec<f64> = mu.iter().map(|v| v.ln()).collect();
        let m = WeightSequence::explicit(&lq).unwrap();
        let seqs = [
            m,
            g1(),
            WeightSequence::gevrey(2.0, 64).unwrap(),
            WeightSequence::qgevrey(2.0, 2.0, 64).unwrap(),
            WeightSequence::qgevrey(3.0, 2.0, 64).unwrap(),
        ];
        let ds: Vec<DualSequence> = seqs.iter().map(|m| dual(m).unwrap()).collect();
        assert_eq!(ds[0].d_threshold, 2);
        for d in &ds {
            let b = d.validity_bound();
            for k in 0..400 {
                let t = b * k as f64 / 400.0;
                assert_eq!(
                    sigma_dual(d, t).unwrap(),
                    crate::associated::counting(&d.dual, t).unwrap(),
                    "t={t} {}",
                    d.base.label()
                );
            }
        }
    }
}
