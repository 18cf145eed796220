//! Convex piecewise-linear functions on `[0, X)`, evaluated exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConvex {
    /// `b_0 = 0 < b_1 < ...`
    breakpoints: Vec<f64>,
    /// `Q(b_i)`
    values: Vec<f64>,
    /// slope on `[b_i, b_{i+1})`
    slopes: Vec<f64>,
    /// evaluations need `|x| < domain_max`
    domain_max: f64,
}

impl PiecewiseConvex {
    pub fn new(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
        domain_max: f64,
    ) -> Result<Self> {
        let n = breakpoints.len();
        if n == 0 || values.len() != n || slopes.len() != n {
            return Err(Error::InvalidParameter(
                "piecewise parts differ in length".into(),
            ));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidParameter("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) || breakpoints[n - 1] >= domain_max {
            return Err(Error::InvalidParameter(
                "breakpoints must increase inside the domain".into(),
            ));
        }
        if slopes.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::NotConvex);
        }
        Ok(PiecewiseConvex {
            breakpoints,
            values,
            slopes,
            domain_max,
        })
    }

    /// Build from breakpoints and slopes with `Q(0) = value0`, accumulating
    /// values segment by segment.
    pub fn from_slopes(
        breakpoints: Vec<f64>,
        slopes: Vec<f64>,
        value0: f64,
        domain_max: f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(breakpoints.len());
        let mut v = value0;
        for i in 0..breakpoints.len() {
            if i > 0 {
                v += slopes[i - 1] * (breakpoints[i] - breakpoints[i - 1]);
            }
            values.push(v);
        }
        Self::new(breakpoints, values, slopes, domain_max)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    fn segment(&self, x: f64) -> usize {
        self.breakpoints
            .partition_point(|&b| b <= x)
            .saturating_sub(1)
    }

    fn check(&self, x: f64) -> Result<f64> {
        let a = x.abs();
        if a.is_nan() || a >= self.domain_max {
            Err(Error::DomainExceeded {
                arg: x,
                bound: self.domain_max,
            })
        } else {
            Ok(a)
        }
    }

    /// `Q(|x|)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let a = self.check(x)?;
        let i = self.segment(a);
        Ok(self.values[i] + self.slopes[i] * (a - self.breakpoints[i]))
    }

    /// Right derivative at `|x|`.
    pub fn slope_at(&self, x: f64) -> Result<f64> {
        let a = self.check(x)?;
        Ok(self.slopes[self.segment(a)])
    }

    /// `∫_0^{|x|} Q`.
    pub fn integral(&self, x: f64) -> Result<f64> {
        let a = self.check(x)?;
        let mut acc = 0.0;
        for i in 0..self.breakpoints.len() {
            let lo = self.breakpoints[i];
            if lo >= a {
                break;
            }
            let hi = self
                .breakpoints
                .get(i + 1)
                .cloned()
                .unwrap_or(self.domain_max)
                .min(a);
            let d = hi - lo;
            acc += self.values[i] * d + 0.5 * self.slopes[i] * d * d;
        }
        Ok(acc)
    }

    /// Largest slope used inside the domain.
    pub fn max_slope(&self) -> f64 {
        *self.slopes.last().unwrap()
    }

    /// `sup_{0 <= x < X} (s x - Q(x))`, attained at the first breakpoint whose
    /// slope reaches `s`. Returns the value and the maximizer.
    pub fn conjugate_at(&self, s: f64) -> Result<(f64, f64)> {
        let i = self.slopes.partition_point(|&q| q < s);
        if i == self.slopes.len() {
            return Err(Error::SlopeExceeded {
                slope: s,
                max: self.max_slope(),
            });
        }
        let b = self.breakpoints[i];
        Ok((s * b - self.values[i], b))
    }

    /// Smallest `x` in the domain with `Q(x) >= y`, if any.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        if y <= self.values[0] {
            return Some(0.0);
        }
        let n = self.breakpoints.len();
        for i in 0..n {
            let hi = self
                .breakpoints
                .get(i + 1)
                .cloned()
                .unwrap_or(self.domain_max);
            let v_hi = self.values[i] + self.slopes[i] * (hi - self.breakpoints[i]);
            if v_hi >= y {
                if self.slopes[i] <= 0.0 {
                    return Some(self.breakpoints[i]);
                }
                let x = self.breakpoints[i] + (y - self.values[i]) / self.slopes[i];
                return if x < self.domain_max { Some(x) } else { None };
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PiecewiseConvex {
        PiecewiseConvex::from_slopes(vec![0.0, 1.0, 3.0], vec![0.0, 1.0, 2.0], 0.0, 10.0).unwrap()
    }

    #[test]
    fn evaluation_and_integral() {
        let q = sample();
        assert_eq!(q.eval(0.5).unwrap(), 0.0);
        assert_eq!(q.eval(2.0).unwrap(), 1.0);
        assert_eq!(q.eval(-4.0).unwrap(), 4.0);
        assert_eq!(q.integral(3.0).unwrap(), 2.0);
        assert!(q.eval(10.0).is_err());
    }

    #[test]
    fn conjugate_and_inverse() {
        let q = sample();
        assert_eq!(q.conjugate_at(1.5).unwrap(), (1.5 * 3.0 - 2.0, 3.0));
        assert!(matches!(
            q.conjugate_at(2.5),
            Err(Error::SlopeExceeded { .. })
        ));
        assert_eq!(q.inverse(1.0), Some(2.0));
        assert_eq!(q.inverse(4.0), Some(4.0));
        assert_eq!(q.inverse(1e9), None);
    }

    #[test]
    fn rejects_concave_data() {
        assert_eq!(
            PiecewiseConvex::from_slopes(vec![0.0, 1.0], vec![2.0, 1.0], 0.0, 5.0),
            Err(Error::NotConvex)
        );
    }
}
