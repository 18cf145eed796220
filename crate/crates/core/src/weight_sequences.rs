//! Log-convex normalized weight sequences stored by their log quotients.
//!
//! A sequence `M = (M_j)` with `M_0 = 1` is kept as `log μ_j = log M_j - log M_{j-1}`
//! for `1 <= j <= J`. Everything downstream works in the log domain so that
//! fast-growing families (`q^{j^2}`) stay representable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{classify_profile, Trend, Verdict, PLATEAU_TOL};

pub const DEFAULT_HORIZON: usize = 256;
pub const MIN_HORIZON: usize = 8;
/// `(log M_J)/J` must exceed this for a sequence to count as divergent.
pub const DIVERGENCE_FLOOR: f64 = 0.0;
/// Default perturbation used by [`WeightSequence::regularize`].
pub const REGULARIZE_EPS: f64 = 1.0 / 1048576.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Gevrey { s: f64 },
    QGevrey { q: f64, n: f64 },
    Explicit,
    Derived { op: String, parents: Vec<String> },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Gevrey { s } => write!(f, "gevrey{{s={s}}}"),
            Family::QGevrey { q, n } => write!(f, "qgevrey{{q={q},n={n}}}"),
            Family::Explicit => write!(f, "explicit"),
            Family::Derived { op, parents } => write!(f, "{op}({})", parents.join(",")),
        }
    }
}

/// Outcome of [`validate_lc`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcReport {
    pub normalized: bool,
    pub log_convex: bool,
    pub divergent: bool,
    /// 1-based index of the first quotient that breaks normalization or
    /// monotonicity.
    pub first_violation_index: Option<usize>,
}

impl LcReport {
    pub fn is_lc(&self) -> bool {
        self.normalized && self.log_convex && self.divergent
    }

    fn into_result(self) -> Result<()> {
        if !self.normalized {
            return Err(Error::NotNormalized { log_mu1: f64::NAN });
        }
        if !self.log_convex {
            return Err(Error::NotLogConvex {
                index: self.first_violation_index.unwrap_or(0),
            });
        }
        if !self.divergent {
            return Err(Error::NotDivergent);
        }
        Ok(())
    }
}

/// Check normalization, monotone quotients and divergence evidence for a list
/// of log quotients `log μ_1, ..., log μ_J`.
pub fn validate_lc(log_quotients: &[f64]) -> LcReport {
    let n = log_quotients.len();
    if n == 0 || log_quotients.iter().any(|x| !x.is_finite()) {
        return LcReport {
            normalized: false,
            log_convex: false,
            divergent: false,
            first_violation_index: Some(1),
        };
    }
    let normalized = log_quotients[0] >= 0.0;
    let mono_break = (1..n).find(|&i| log_quotients[i] < log_quotients[i - 1]);
    let log_convex = mono_break.is_none();
    let mid = n.div_ceil(2);
    let log_m_j: f64 = log_quotients.iter().sum();
    let divergent =
        log_quotients[n - 1] > log_quotients[mid - 1] && log_m_j / n as f64 > DIVERGENCE_FLOOR;
    let first_violation_index = if !normalized {
        Some(1)
    } else {
        mono_break.map(|i| i + 1)
    };
    LcReport {
        normalized,
        log_convex,
        divergent,
        first_violation_index,
    }
}

/// A validated weight sequence on the horizon `1..=J`.
#[derive(Clone, Debug)]
pub struct WeightSequence {
    /// `lq[0] = 0`, `lq[j] = log μ_j`.
    lq: Vec<f64>,
    /// `log_m[j] = log M_j`, prefix sums of `lq`.
    log_m: Vec<f64>,
    family: Family,
    /// Unscaled quotients and accumulated exponent, so that repeated powers
    /// compose exactly.
    power_root: Option<(Arc<Vec<f64>>, f64)>,
}

impl PartialEq for WeightSequence {
    fn eq(&self, other: &Self) -> bool {
        self.lq == other.lq
    }
}

fn prefix_sums(lq: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(lq.len());
    let mut acc = 0.0;
    for &x in lq {
        acc += x;
        out.push(acc);
    }
    out
}

impl WeightSequence {
    /// Build from `log μ_1..log μ_J` after LC validation.
    pub fn from_log_quotients(log_quotients: &[f64], family: Family) -> Result<Self> {
        let report = validate_lc(log_quotients);
        if !report.normalized {
            return Err(Error::NotNormalized {
                log_mu1: log_quotients.first().cloned().unwrap_or(f64::NAN),
            });
        }
        report.into_result()?;
        Ok(Self::from_trusted(log_quotients, family))
    }

    /// Build without validation. Callers guarantee the LC properties.
    pub(crate) fn from_trusted(log_quotients: &[f64], family: Family) -> Self {
        let mut lq = Vec::with_capacity(log_quotients.len() + 1);
        lq.push(0.0);
        lq.extend_from_slice(log_quotients);
        let log_m = prefix_sums(&lq);
        WeightSequence {
            lq,
            log_m,
            family,
            power_root: None,
        }
    }

    pub fn explicit(log_quotients: &[f64]) -> Result<Self> {
        Self::from_log_quotients(log_quotients, Family::Explicit)
    }

    pub fn gevrey(s: f64, horizon: usize) -> Result<Self> {
        make_sequence(&Family::Gevrey { s }, horizon)
    }

    pub fn qgevrey(q: f64, n: f64, horizon: usize) -> Result<Self> {
        make_sequence(&Family::QGevrey { q, n }, horizon)
    }

    pub fn horizon(&self) -> usize {
        self.lq.len() - 1
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn label(&self) -> String {
        self.family.to_string()
    }

    /// `log μ_1, ..., log μ_J`.
    pub fn log_quotients(&self) -> &[f64] {
        &self.lq[1..]
    }

    /// `log μ_j` for `0 <= j <= J` (`log μ_0 = 0`).
    pub fn log_quotient(&self, j: usize) -> f64 {
        self.lq[j]
    }

    pub fn quotient(&self, j: usize) -> f64 {
        self.lq[j].exp()
    }

    /// `log M_j` for `0 <= j <= J`.
    pub fn log_m(&self, j: usize) -> f64 {
        self.log_m[j]
    }

    pub fn log_m_all(&self) -> &[f64] {
        &self.log_m
    }

    /// `log T_max = log μ_{J-1}`; evaluations need `log t` strictly below it.
    pub fn log_t_max(&self) -> f64 {
        self.lq[self.horizon() - 1]
    }

    pub fn t_max(&self) -> f64 {
        self.log_t_max().exp()
    }

    /// Number of leading quotients equal to 1.
    pub fn leading_ones(&self) -> usize {
        self.lq[1..].iter().take_while(|&&x| x == 0.0).count()
    }

    /// 1-based index of the first flat step, if any.
    pub fn first_flat_index(&self) -> Option<usize> {
        (2..=self.horizon()).find(|&j| self.lq[j] <= self.lq[j - 1])
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.first_flat_index().is_none()
    }

    /// `#{1 <= j <= J : log μ_j <= x}` with ties inside a few ulps counted.
    pub fn count_le_log(&self, x: f64) -> usize {
        let y = x + tie_slack(x);
        self.lq[1..].partition_point(|&v| v <= y)
    }

    /// Keep the first `h` quotients.
    pub fn truncate(&self, h: usize) -> Result<Self> {
        if h < 2 || h > self.horizon() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate horizon {} to {h}",
                self.horizon()
            )));
        }
        let mut out = Self::from_trusted(&self.lq[1..=h], self.family.clone());
        if let Some((root, e)) = &self.power_root {
            out.power_root = Some((Arc::new(root[..h].to_vec()), *e));
        }
        Ok(out)
    }

    /// Pointwise product `(M_j L_j)`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        check_horizons(self, other)?;
        let lq: Vec<f64> = self.lq[1..]
            .iter()
            .zip(&other.lq[1..])
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_trusted(
            &lq,
            Family::Derived {
                op: "product".into(),
                parents: vec![self.label(), other.label()],
            },
        ))
    }

    /// Min-plus convolution `(M ⋆ L)_j = min_k M_k L_{j-k}`.
    ///
    /// For log-convex inputs the quotients of the result are the sorted merge of
    /// both quotient lists, which is what is stored; [`Self::convolve_argmin`]
    /// gives the minimizing split.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        check_horizons(self, other)?;
        let j = self.horizon();
        let (a, b) = (&self.lq[1..], &other.lq[1..]);
        let mut merged = Vec::with_capacity(j);
        let (mut i, mut k) = (0, 0);
        while merged.len() < j {
            if k >= b.len() || (i < a.len() && a[i] <= b[k]) {
                merged.push(a[i]);
                i += 1;
            } else {
                merged.push(b[k]);
                k += 1;
            }
        }
        Ok(Self::from_trusted(
            &merged,
            Family::Derived {
                op: "convolve".into(),
                parents: vec![self.label(), other.label()],
            },
        ))
    }

    /// Smallest `k` minimizing `log M_k + log L_{j-k}`, together with the
    /// minimum.
    pub fn convolve_argmin(&self, other: &Self, j: usize) -> Result<(usize, f64)> {
        check_horizons(self, other)?;
        if j > self.horizon() {
            return Err(Error::IndexExceeded {
                index: j,
                max: self.horizon(),
            });
        }
        let mut best = (0, f64::INFINITY);
        for k in 0..=j {
            let v = self.log_m[k] + other.log_m[j - k];
            if v < best.1 {
                best = (k, v);
            }
        }
        Ok(best)
    }

    /// `M^ℓ` for `ℓ > 0`.
    pub fn power(&self, ell: f64) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::InvalidParameter(format!("power exponent {ell}")));
        }
        let (root, e) = match &self.power_root {
            Some((root, e)) => (root.clone(), *e),
            None => (Arc::new(self.lq[1..].to_vec()), 1.0),
        };
        let exponent = e * ell;
        let lq: Vec<f64> = root.iter().map(|x| x * exponent).collect();
        let mut out = Self::from_trusted(
            &lq,
            Family::Derived {
                op: format!("power[{ell}]"),
                parents: vec![self.label()],
            },
        );
        out.power_root = Some((root, exponent));
        Ok(out)
    }

    /// Perturb quotients to `μ_j (1 + ε j / J)`, which makes them strictly
    /// increasing while keeping the sequence `≅`-equivalent to the input.
    ///
    /// The factor is applied at every index: restricting it to flat runs can
    /// push the end of a run above the next quotient.
    pub fn regularize(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("regularization eps {eps}")));
        }
        let jn = self.horizon() as f64;
        let lq: Vec<f64> = (1..=self.horizon())
            .map(|j| self.lq[j] + (eps * j as f64 / jn).ln_1p())
            .collect();
        Ok(Self::from_trusted(
            &lq,
            Family::Derived {
                op: "regularize".into(),
                parents: vec![self.label()],
            },
        ))
    }

    /// Serializable description that rebuilds exactly this sequence.
    pub fn to_spec(&self) -> SequenceSpec {
        SequenceSpec {
            family: "explicit".into(),
            params: BTreeMap::new(),
            horizon: Some(self.horizon()),
            log_quotients: Some(self.lq[1..].to_vec()),
        }
    }
}

/// Slack used when comparing a log argument against stored log quotients.
/// Quotients that equal an integer argument mathematically (for instance
/// `2 log 3` against `log 9`) can differ in the last bits.
pub fn tie_slack(x: f64) -> f64 {
    4.0 * f64::EPSILON * x.abs().max(1.0)
}

fn check_horizons(a: &WeightSequence, b: &WeightSequence) -> Result<()> {
    if a.horizon() != b.horizon() {
        Err(Error::HorizonMismatch {
            left: a.horizon(),
            right: b.horizon(),
        })
    } else {
        Ok(())
    }
}

fn is_integral(x: f64) -> bool {
    x.fract() == 0.0 && x.abs() < 64.0
}

/// Materialize a named family on `1..=horizon`.
pub fn make_sequence(family: &Family, horizon: usize) -> Result<WeightSequence> {
    if horizon < MIN_HORIZON {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is below the minimum {MIN_HORIZON}"
        )));
    }
    let lq: Vec<f64> = match *family {
        Family::Gevrey { s } => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!("gevrey s={s} must be > 0")));
            }
            (1..=horizon).map(|j| s * (j as f64).ln()).collect()
        }
        Family::QGevrey { q, n } => {
            if !(q > 1.0 && q.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "qgevrey q={q} must be > 1"
                )));
            }
            if !(n > 1.0 && n.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "qgevrey n={n} must be > 1"
                )));
            }
            let lnq = q.ln();
            (1..=horizon)
                .map(|j| {
                    let (a, b) = (j as f64, (j - 1) as f64);
                    let diff = if is_integral(n) {
                        a.powi(n as i32) - b.powi(n as i32)
                    } else {
                        a.powf(n) - b.powf(n)
                    };
                    diff * lnq
                })
                .collect()
        }
        Family::Explicit | Family::Derived { .. } => {
            return Err(Error::InvalidParameter(
                "explicit sequences are built from their log quotients".into(),
            ))
        }
    };
    WeightSequence::from_log_quotients(&lq, family.clone())
}

/// File and command-line description of a sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_quotients: Option<Vec<f64>>,
}

impl SequenceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// Parse `family:key=value,...`, e.g. `gevrey:s=1` or
    /// `explicit:log_quotients=[0,0.5,1]`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (family, rest) = match text.split_once(':') {
            Some((f, r)) => (f.trim(), r.trim()),
            None => (text, ""),
        };
        if family.is_empty() {
            return Err(Error::Parse(format!("missing family in '{text}'")));
        }
        let mut spec = SequenceSpec {
            family: family.to_string(),
            params: BTreeMap::new(),
            horizon: None,
            log_quotients: None,
        };
        for item in split_top_level(rest) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{item}'")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "horizon" => {
                    spec.horizon = Some(
                        value
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad horizon '{value}'")))?,
                    )
                }
                "log_quotients" => {
                    let inner = value
                        .strip_prefix('[')
                        .and_then(|v| v.strip_suffix(']'))
                        .ok_or_else(|| Error::Parse("log_quotients must be [..]".into()))?;
                    let vals = inner
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| {
                            s.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::Parse(format!("bad number '{s}'")))
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    spec.log_quotients = Some(vals);
                }
                _ => {
                    let v: f64 = value
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad value for {key}: '{value}'")))?;
                    spec.params.insert(key.to_string(), v);
                }
            }
        }
        Ok(spec)
    }

    /// Build the sequence; `default_horizon` applies when none is given.
    pub fn build(&self, default_horizon: usize) -> Result<WeightSequence> {
        let horizon = self.horizon.unwrap_or(default_horizon);
        let expect = |keys: &[&str]| -> Result<()> {
            for k in self.params.keys() {
                if !keys.contains(&k.as_str()) {
                    return Err(Error::InvalidParameter(format!(
                        "unknown parameter '{k}' for family {}",
                        self.family
                    )));
                }
            }
            if self.log_quotients.is_some() {
                return Err(Error::InvalidParameter(
                    "log_quotients only apply to explicit sequences".into(),
                ));
            }
            Ok(())
        };
        let param = |k: &str| -> Result<f64> {
            self.params
                .get(k)
                .cloned()
                .ok_or_else(|| Error::InvalidParameter(format!("missing parameter '{k}'")))
        };
        match self.family.as_str() {
            "gevrey" => {
                expect(&["s"])?;
                make_sequence(&Family::Gevrey { s: param("s")? }, horizon)
            }
            "qgevrey" => {
                expect(&["q", "n"])?;
                let n = self.params.get("n").cloned().unwrap_or(2.0);
                make_sequence(&Family::QGevrey { q: param("q")?, n }, horizon)
            }
            "explicit" => {
                if let Some(k) = self.params.keys().next() {
                    return Err(Error::InvalidParameter(format!(
                        "unknown parameter '{k}' for family explicit"
                    )));
                }
                let lq = self.log_quotients.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("explicit needs log_quotients".into())
                })?;
                if let Some(h) = self.horizon {
                    if h != lq.len() {
                        return Err(Error::InvalidParameter(format!(
                            "horizon {h} does not match {} log quotients",
                            lq.len()
                        )));
                    }
                }
                WeightSequence::explicit(lq)
            }
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceRelation {
    /// `M ≼ L`: `sup_j (M_j / L_j)^{1/j} < ∞`.
    Preceq,
    /// `M ≈ L`: both directions of `≼`.
    Approx,
    /// `M ≅ L`: quotients comparable up to constant factors.
    Cong,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceRelationEvidence {
    pub relation: SequenceRelation,
    pub verdict: Verdict,
    /// Log of the observed bound (`sup (M_j/L_j)^{1/j}` or `sup |log μ_j/λ_j|`).
    pub log_bound: Option<f64>,
    pub counterexample_index: Option<usize>,
}

/// Compare two sequences on their common horizon.
pub fn relate_sequences(
    m: &WeightSequence,
    l: &WeightSequence,
    relation: SequenceRelation,
) -> Result<SequenceRelationEvidence> {
    check_horizons(m, l)?;
    match relation {
        SequenceRelation::Preceq => Ok(preceq_evidence(m, l)),
        SequenceRelation::Approx => {
            let a = preceq_evidence(m, l);
            let b = preceq_evidence(l, m);
            let verdict = a.verdict.and(b.verdict);
            let log_bound = match (a.log_bound, b.log_bound) {
                (Some(x), Some(y)) => Some(x.max(y)),
                _ => None,
            };
            Ok(SequenceRelationEvidence {
                relation,
                verdict,
                log_bound: if verdict == Verdict::Holds {
                    log_bound
                } else {
                    None
                },
                counterexample_index: a.counterexample_index.or(b.counterexample_index),
            })
        }
        SequenceRelation::Cong => {
            let positions: Vec<f64> = (1..=m.horizon()).map(|j| j as f64).collect();
            let diffs: Vec<f64> = (1..=m.horizon())
                .map(|j| (m.lq[j] - l.lq[j]).abs())
                .collect();
            let trend = classify_profile(&positions, &diffs, PLATEAU_TOL);
            Ok(match trend {
                Trend::Bounded { sup, .. } => SequenceRelationEvidence {
                    relation,
                    verdict: Verdict::Holds,
                    log_bound: Some(sup),
                    counterexample_index: None,
                },
                Trend::Unbounded { witness } => SequenceRelationEvidence {
                    relation,
                    verdict: Verdict::Fails,
                    log_bound: None,
                    counterexample_index: Some(witness + 1),
                },
                Trend::Undetermined => SequenceRelationEvidence {
                    relation,
                    verdict: Verdict::Inconclusive,
                    log_bound: None,
                    counterexample_index: None,
                },
            })
        }
    }
}

fn preceq_evidence(m: &WeightSequence, l: &WeightSequence) -> SequenceRelationEvidence {
    let positions: Vec<f64> = (1..=m.horizon()).map(|j| j as f64).collect();
    let raw: Vec<f64> = (1..=m.horizon())
        .map(|j| (m.log_m[j] - l.log_m[j]) / j as f64)
        .collect();
    // The j = 0 term contributes 1 to the supremum.
    let clamped: Vec<f64> = raw.iter().map(|v| v.max(0.0)).collect();
    match classify_profile(&positions, &clamped, PLATEAU_TOL) {
        Trend::Bounded { .. } => SequenceRelationEvidence {
            relation: SequenceRelation::Preceq,
            verdict: Verdict::Holds,
            log_bound: Some(raw.iter().cloned().fold(0.0, f64::max)),
            counterexample_index: None,
        },
        Trend::Unbounded { witness } => SequenceRelationEvidence {
            relation: SequenceRelation::Preceq,
            verdict: Verdict::Fails,
            log_bound: None,
            counterexample_index: Some(witness + 1),
        },
        Trend::Undetermined => SequenceRelationEvidence {
            relation: SequenceRelation::Preceq,
            verdict: Verdict::Inconclusive,
            log_bound: None,
            counterexample_index: None,
        },
    }
}

/// Evidence for moderate growth `M_{2j} <= B^j M_j^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MgEvidence {
    pub verdict: Verdict,
    pub b: Option<f64>,
    pub counterexample_index: Option<usize>,
    pub tested_up_to: usize,
}

impl MgEvidence {
    /// Re-check the stored constant against the sequence.
    pub fn replay(&self, m: &WeightSequence) -> bool {
        match self.b {
            Some(b) => (1..=self.tested_up_to).all(|j| {
                let lhs = m.log_m[2 * j];
                let rhs = j as f64 * b.ln() + 2.0 * m.log_m[j];
                lhs <= rhs + 1e-9 * lhs.abs().max(1.0)
            }),
            None => false,
        }
    }
}

/// Base grid `2^0 .. 2^16` for the mg constant.
pub fn mg_grid() -> Vec<f64> {
    (0..=16).map(|e| 2f64.powi(e)).collect()
}

/// Moderate growth: the normalized residual `(log M_{2j} - 2 log M_j)/j`
/// must stay bounded; the witness is the smallest grid `B` whose margin
/// `j log B - (log M_{2j} - 2 log M_j)` is non-negative on all tested `j`.
pub fn has_mg(m: &WeightSequence) -> MgEvidence {
    let jmax = m.horizon() / 2;
    let positions: Vec<f64> = (1..=jmax).map(|j| j as f64).collect();
    let residual: Vec<f64> = (1..=jmax)
        .map(|j| (m.log_m[2 * j] - 2.0 * m.log_m[j]) / j as f64)
        .collect();
    match classify_profile(&positions, &residual, PLATEAU_TOL) {
        Trend::Bounded { sup, .. } => {
            let need = sup.max(0.0).exp();
            let b = mg_grid()
                .into_iter()
                .find(|&b| b >= need * (1.0 - 1e-12))
                .filter(|&b| {
                    (1..=jmax).all(|j| {
                        let slack = j as f64 * b.ln() - (m.log_m[2 * j] - 2.0 * m.log_m[j]);
                        slack >= -1e-9 * m.log_m[2 * j].abs().max(1.0)
                    })
                });
            MgEvidence {
                verdict: if b.is_some() {
                    Verdict::Holds
                } else {
                    Verdict::Inconclusive
                },
                b,
                counterexample_index: None,
                tested_up_to: jmax,
            }
        }
        Trend::Unbounded { witness } => MgEvidence {
            verdict: Verdict::Fails,
            b: None,
            counterexample_index: Some(witness + 1),
            tested_up_to: jmax,
        },
        Trend::Undetermined => MgEvidence {
            verdict: Verdict::Inconclusive,
            b: None,
            counterexample_index: None,
            tested_up_to: jmax,
        },
    }
}
