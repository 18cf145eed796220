//! Counting function `Σ_M`, associated weight `ω_M`, `φ_{ω_M}` and `ω̃_M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{classify_profile, Trend, PLATEAU_TOL};
use crate::piecewise::PiecewiseConvex;
use crate::weight_sequences::WeightSequence;

fn check_log(m: &WeightSequence, x: f64) -> Result<()> {
    if x.is_nan() || x >= m.log_t_max() {
        Err(Error::DomainExceeded {
            arg: x,
            bound: m.log_t_max(),
        })
    } else {
        Ok(())
    }
}

/// `Σ_M(e^x) = #{j >= 1 : log μ_j <= x}`.
pub fn counting_log(m: &WeightSequence, x: f64) -> Result<usize> {
    check_log(m, x)?;
    Ok(m.count_le_log(x))
}

/// `Σ_M(t) = #{j >= 1 : μ_j <= t}` for `0 <= t < T_max`.
pub fn counting(m: &WeightSequence, t: f64) -> Result<usize> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "counting argument {t} < 0"
        )));
    }
    if t == 0.0 {
        return Ok(0);
    }
    counting_log(m, t.ln()).map_err(|_| Error::DomainExceeded {
        arg: t,
        bound: m.t_max(),
    })
}

/// `φ_{ω_M}(x) = ω_M(e^{|x|}) = Σ_{μ_j <= e^{|x|}} (|x| - log μ_j)`.
pub fn phi(m: &WeightSequence, x: f64) -> Result<f64> {
    let a = x.abs();
    check_log(m, a)?;
    Ok(phi_unchecked(m, a))
}

pub(crate) fn phi_unchecked(m: &WeightSequence, a: f64) -> f64 {
    let n = m.count_le_log(a);
    n as f64 * a - m.log_m(n)
}

/// `ω_M(t) = sup_j (j log t - log M_j)`; zero for `t <= 1`.
pub fn omega(m: &WeightSequence, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::InvalidParameter(format!("omega argument {t} < 0")));
    }
    if t <= 1.0 {
        return Ok(0.0);
    }
    phi(m, t.ln()).map_err(|_| Error::DomainExceeded {
        arg: t,
        bound: m.t_max(),
    })
}

/// The exact piecewise-linear structure of `φ_{ω_M}` on `[0, log T_max)`:
/// breakpoints at the distinct `log μ_j`, slope `Σ_M(e^x)` on each piece.
pub fn phi_structure(m: &WeightSequence) -> PiecewiseConvex {
    let dom = m.log_t_max();
    let mut breakpoints = vec![0.0];
    for &v in m.log_quotients() {
        if v > *breakpoints.last().unwrap() && v < dom {
            breakpoints.push(v);
        }
    }
    let slopes: Vec<f64> = breakpoints
        .iter()
        .map(|&b| m.count_le_log(b) as f64)
        .collect();
    let values: Vec<f64> = breakpoints.iter().map(|&b| phi_unchecked(m, b)).collect();
    PiecewiseConvex::new(breakpoints, values, slopes, dom).expect("phi is convex by construction")
}

/// `ω̃_M(e^y) = ∫_0^y φ_{ω_M}`, summed piece by piece.
pub fn omega_tilde_log(m: &WeightSequence, y: f64) -> Result<f64> {
    if y <= 0.0 {
        return Ok(0.0);
    }
    check_log(m, y)?;
    let mut acc = 0.0;
    let j_max = m.count_le_log(y);
    for j in 0..=j_max {
        let a = m.log_quotient(j).max(0.0);
        let b = if j == j_max { y } else { m.log_quotient(j + 1) };
        if b <= a {
            continue;
        }
        acc += (b - a) * (j as f64 * 0.5 * (a + b) - m.log_m(j));
    }
    Ok(acc)
}

/// `ω̃_M(s) = ∫_1^s ω_M(u)/u du`.
pub fn omega_tilde(m: &WeightSequence, s: f64) -> Result<f64> {
    if s <= 1.0 {
        return Ok(0.0);
    }
    omega_tilde_log(m, s.ln()).map_err(|_| Error::DomainExceeded {
        arg: s,
        bound: m.t_max(),
    })
}

/// `log M_j = sup_{t>0} (j log t - ω_M(t))`, evaluated at the maximizer
/// `t = μ_j`.
pub fn recover_log_m(m: &WeightSequence, j: usize) -> Result<f64> {
    if j >= m.horizon() {
        return Err(Error::IndexExceeded {
            index: j,
            max: m.horizon() - 1,
        });
    }
    if j == 0 {
        return Ok(0.0);
    }
    let x = m.log_quotient(j);
    Ok(j as f64 * x - phi_unchecked(m, x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum YoungClass {
    /// `φ_{ω_M}(t) = t` near the origin (`μ_1 = 1`).
    StrongYoung,
    /// Young function vanishing near the origin (`μ_1 > 1`).
    YoungOnly,
}

/// `φ_{ω_M}` is never an N-function (it is linear or zero near 0) but always
/// a Young function.
pub fn classify_young(m: &WeightSequence) -> YoungClass {
    if m.log_quotient(1) == 0.0 {
        YoungClass::StrongYoung
    } else {
        YoungClass::YoungOnly
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFunctionReport {
    /// continuous, non-decreasing, zero on `[0, 1]`, tends to infinity
    pub omega0: bool,
    /// `ω(2t) = O(ω(t))`
    pub omega1: bool,
    /// `log t = o(ω(t))`
    pub omega3: bool,
    /// `φ_ω` convex
    pub omega4: bool,
}

/// Check the standard weight-function properties of `ω_M` on a grid inside
/// the horizon.
pub fn weight_function_report(m: &WeightSequence) -> WeightFunctionReport {
    let dom = m.log_t_max();
    let n = 400;
    let xs: Vec<f64> = (0..n).map(|i| dom * i as f64 / n as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| phi_unchecked(m, x)).collect();
    let omega0 =
        vals[0] == 0.0 && vals.windows(2).all(|w| w[1] >= w[0]) && vals[n - 1] > vals[n / 2];
    let half: Vec<f64> = xs
        .iter()
        .cloned()
        .filter(|&x| x + std::f64::consts::LN_2 < dom)
        .collect();
    let ratio: Vec<f64> = half
        .iter()
        .filter(|&&x| phi_unchecked(m, x) > 0.0)
        .map(|&x| phi_unchecked(m, x + std::f64::consts::LN_2) / phi_unchecked(m, x))
        .collect();
    let pos: Vec<f64> = (1..=ratio.len()).map(|i| i as f64).collect();
    let omega1 = matches!(
        classify_profile(&pos, &ratio, PLATEAU_TOL),
        Trend::Bounded { .. }
    );
    // ω(t)/log t must grow: its reciprocal decays.
    let inv: Vec<f64> = xs
        .iter()
        .filter(|&&x| x > 0.0 && phi_unchecked(m, x) > 0.0)
        .map(|&x| x / phi_unchecked(m, x))
        .collect();
    let ipos: Vec<f64> = (1..=inv.len()).map(|i| i as f64).collect();
    let omega3 = crate::evidence::classify_decay(&ipos, &inv) == crate::evidence::Verdict::Holds;
    let s = phi_structure(m);
    let omega4 = s.slopes().windows(2).all(|w| w[1] >= w[0]);
    WeightFunctionReport {
        omega0,
        omega1,
        omega3,
        omega4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> WeightSequence {
        WeightSequence::gevrey(1.0, 256).unwrap()
    }

    #[test]
    fn counting_examples() {
        let g = g1();
        assert_eq!(counting(&g, 3.5).unwrap(), 3);
        assert_eq!(counting(&g, 3.0).unwrap(), 3);
        assert_eq!(counting(&g, 0.5).unwrap(), 0);
        let q = WeightSequence::qgevrey(2.0, 2.0, 256).unwrap();
        assert_eq!(counting(&q, 10.0).unwrap(), 2);
        assert!(matches!(
            counting(&g, 300.0),
            Err(Error::DomainExceeded { .. })
        ));
        let g2 = WeightSequence::gevrey(2.0, 64).unwrap();
        assert_eq!(counting(&g2, 9.0).unwrap(), 3);
    }

    #[test]
    fn omega_examples() {
        let g = g1();
        let e = std::f64::consts::E;
        assert!((omega(&g, e).unwrap() - (2.0 - 2f64.ln())).abs() < 1e-14);
        assert_eq!(omega(&g, 1.0).unwrap(), 0.0);
        assert_eq!(omega(&g, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn omega_tilde_example() {
        let g = g1();
        let l2 = 2f64.ln();
        assert!((omega_tilde(&g, 2.0).unwrap() - l2 * l2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn recover_examples() {
        let g = g1();
        assert!((recover_log_m(&g, 3).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert!(recover_log_m(&g, 256).is_err());
    }

    #[test]
    fn young_classes() {
        assert_eq!(classify_young(&g1()), YoungClass::StrongYoung);
        let q = WeightSequence::qgevrey(2.0, 2.0, 16).unwrap();
        assert_eq!(classify_young(&q), YoungClass::YoungOnly);
    }

    #[test]
    fn structure_matches_pointwise_values() {
        let g = WeightSequence::gevrey(1.0, 64).unwrap();
        let s = phi_structure(&g);
        for (i, &b) in s.breakpoints().iter().enumerate() {
            assert_eq!(s.values()[i], phi(&g, b).unwrap());
        }
        assert_eq!(s.slopes()[0], 1.0);
    }

    #[test]
    fn weight_function_properties() {
        let r = weight_function_report(&g1());
        assert!(r.omega0 && r.omega1 && r.omega3 && r.omega4, "{r:?}");
    }
}
