//! Finite-horizon evidence for asymptotic statements.
//!
//! Every asymptotic claim checked by this crate is reduced to a *profile*: the
//! constant that would be needed at each probed position. A claim with a
//! uniform constant shows a profile that flattens out; a failing claim shows a
//! profile that keeps climbing. [`classify_profile`] makes that call.

use serde::{Deserialize, Serialize};

/// Absolute tolerance used by plateau tests.
pub const PLATEAU_TOL: f64 = 1e-6;
/// Multiplicative headroom applied to fitted constants.
pub const HEADROOM: f64 = 1.1;
/// Minimal number of profile points needed for a verdict.
pub const MIN_PROFILE_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn short(self) -> &'static str {
        match self {
            Verdict::Holds => "H",
            Verdict::Fails => "F",
            Verdict::Inconclusive => "I",
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    /// Conjunction where an inconclusive part makes the whole inconclusive
    /// unless another part already fails.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
            (Verdict::Holds, Verdict::Holds) => Verdict::Holds,
            _ => Verdict::Inconclusive,
        }
    }

    /// Two independent routes for the same statement; disagreement is reported
    /// as inconclusive.
    pub fn agree(self, other: Verdict) -> Verdict {
        match (self, other) {
            (a, b) if a == b => a,
            (Verdict::Inconclusive, b) => b,
            (a, Verdict::Inconclusive) => a,
            _ => Verdict::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Trend {
    /// The profile levels off; `sup` is its largest value and `argmax` the
    /// position index where it is attained.
    Bounded {
        sup: f64,
        argmax: usize,
    },
    /// The profile keeps growing; `witness` indexes the largest tail value.
    Unbounded {
        witness: usize,
    },
    Undetermined,
}

impl Trend {
    pub fn verdict(&self) -> Verdict {
        match self {
            Trend::Bounded { .. } => Verdict::Holds,
            Trend::Unbounded { .. } => Verdict::Fails,
            Trend::Undetermined => Verdict::Inconclusive,
        }
    }
}

/// Decide whether `values` (sampled at increasing, positive `positions`) stay
/// bounded as the position grows.
///
/// Bounded when the last quarter of the points adds nothing beyond `tol` to
/// the maximum over the preceding points past `P/4` (earlier points are
/// treated as transient), or when the growth of the running maximum (started
/// at `P/8`) over the window `(P/2, P]` is at most 3/4 of the growth over `(P/4, P/2]`
/// (geometric convergence). Unbounded when the late growth is at least 9/10 of
/// the earlier growth. Anything in between is undetermined. Infinite values
/// count as unbounded as soon as they appear in the second half.
pub fn classify_profile(positions: &[f64], values: &[f64], tol: f64) -> Trend {
    let n = values.len();
    assert_eq!(positions.len(), n);
    if n < MIN_PROFILE_POINTS {
        return Trend::Undetermined;
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        let _ = i;
        return Trend::Undetermined;
    }
    if let Some(i) = (n / 2..n).find(|&i| values[i] == f64::INFINITY) {
        return Trend::Unbounded { witness: i };
    }
    let (argmax, sup) = max_with_index(values);
    let q = n - n / 4;
    let p_end = positions[n - 1];
    let h0 = positions.partition_point(|&x| x <= p_end / 4.0).min(q - 1);
    let head = values[h0..q]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let tail = values[q..]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if tail <= head + tol {
        return Trend::Bounded { sup, argmax };
    }
    let tail_witness = q + max_with_index(&values[q..]).0;

    let envelope = |p: f64| -> Option<f64> {
        let lo = positions.partition_point(|&x| x <= p_end / 8.0);
        let k = positions.partition_point(|&x| x <= p);
        if k <= lo {
            None
        } else {
            Some(
                values[lo..k]
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max),
            )
        }
    };
    let Some(m2) = envelope(p_end / 2.0) else {
        return Trend::Undetermined;
    };
    // with no point left of P/4 the growth is measured from the first point
    let m4 = envelope(p_end / 4.0).unwrap_or_else(|| {
        let lo = positions.partition_point(|&x| x <= p_end / 8.0);
        values[lo]
    });
    let m1 = m2.max(head).max(tail);
    let early = m2 - m4;
    let late = m1 - m2;
    if late <= tol {
        return Trend::Bounded { sup, argmax };
    }
    if late <= 0.75 * early {
        Trend::Bounded { sup, argmax }
    } else if late >= 0.9 * early {
        Trend::Unbounded {
            witness: tail_witness,
        }
    } else {
        Trend::Undetermined
    }
}

/// Decide whether a non-negative profile tends to zero: the maximum over the
/// last half of the window must be at most 3/4 of the maximum over the
/// quarter before it, and strictly below the head. A tail maximum that stays
/// within 10% of the earlier block means the limit is positive.
pub fn classify_decay(positions: &[f64], values: &[f64]) -> Verdict {
    let n = values.len();
    if n < MIN_PROFILE_POINTS {
        return Verdict::Inconclusive;
    }
    let p_end = positions[n - 1];
    let block_max = |lo: f64, hi: f64| -> Option<f64> {
        let v: Vec<f64> = positions
            .iter()
            .zip(values)
            .filter(|(p, _)| **p > lo && **p <= hi)
            .map(|(_, v)| *v)
            .collect();
        if v.is_empty() {
            None
        } else {
            Some(v.into_iter().fold(f64::NEG_INFINITY, f64::max))
        }
    };
    let (Some(early), Some(late)) = (
        block_max(p_end / 4.0, p_end / 2.0),
        block_max(p_end / 2.0, p_end),
    ) else {
        return Verdict::Inconclusive;
    };
    if !late.is_finite() {
        return Verdict::Fails;
    }
    if late <= 0.75 * early {
        Verdict::Holds
    } else if late >= 0.9 * early {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    }
}

pub fn max_with_index(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Treat tiny positive residuals produced by rounding as zero.
pub fn snap_zero(x: f64, scale: f64) -> f64 {
    if x.abs() <= 1e-9 * scale.abs().max(1.0) {
        0.0
    } else {
        x
    }
}

/// Smallest element of `grid` that is at least `x`.
pub fn grid_ceil(grid: &[f64], x: f64) -> Option<f64> {
    grid.iter().cloned().find(|&g| g >= x)
}

/// `n` evenly spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}
