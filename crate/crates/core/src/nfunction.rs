//! N-functions given by right-continuous piecewise-linear densities, their
//! relations, and the sequence-level criteria that mirror those relations.

use serde::{Deserialize, Serialize};

use crate::associated::phi_structure;
use crate::error::{Error, Result};
use crate::evidence::{
    classify_decay, classify_profile, linspace, max_with_index, Trend, Verdict, HEADROOM,
    PLATEAU_TOL,
};
use crate::piecewise::PiecewiseConvex;
use crate::weight_sequences::WeightSequence;

/// Anything that can be probed as an increasing convex function on
/// `[0, domain_max)`.
pub trait GrowthFunction {
    fn value(&self, t: f64) -> Result<f64>;

    /// Exclusive upper end of the trusted range (may be infinite).
    fn domain_max(&self) -> f64;

    /// Right derivative, when known in closed form.
    fn density_at(&self, _t: f64) -> Option<f64> {
        None
    }

    /// Smallest `t` in the domain with `F(t) >= y`.
    fn inverse(&self, y: f64) -> Option<f64> {
        bisect_inverse(self, y)
    }
}

fn bisect_inverse<F: GrowthFunction + ?Sized>(f: &F, y: f64) -> Option<f64> {
    if f.value(0.0).ok()? >= y {
        return Some(0.0);
    }
    let dom = f.domain_max();
    let mut hi = if dom.is_finite() {
        let h = dom * (1.0 - 1e-12);
        if f.value(h).ok()? < y {
            return None;
        }
        h
    } else {
        let mut h = 1.0;
        while f.value(h).ok()? < y {
            h *= 2.0;
            if h > 1e300 {
                return None;
            }
        }
        h
    };
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f.value(mid).ok()? >= y {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

impl GrowthFunction for PiecewiseConvex {
    fn value(&self, t: f64) -> Result<f64> {
        self.eval(t)
    }
    fn domain_max(&self) -> f64 {
        PiecewiseConvex::domain_max(self)
    }
    fn density_at(&self, t: f64) -> Option<f64> {
        self.slope_at(t).ok()
    }
    fn inverse(&self, y: f64) -> Option<f64> {
        PiecewiseConvex::inverse(self, y)
    }
}

/// A closure viewed as a growth function on `[0, domain_max)`.
pub struct FnGrowth<F: Fn(f64) -> Result<f64>> {
    pub f: F,
    pub domain_max: f64,
}

impl<F: Fn(f64) -> Result<f64>> GrowthFunction for FnGrowth<F> {
    fn value(&self, t: f64) -> Result<f64> {
        if t.abs() >= self.domain_max {
            return Err(Error::DomainExceeded {
                arg: t,
                bound: self.domain_max,
            });
        }
        (self.f)(t)
    }
    fn domain_max(&self) -> f64 {
        self.domain_max
    }
}

/// Right-continuous, non-decreasing, piecewise-linear density on
/// `[0, domain_max)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Density {
    knots: Vec<f64>,
    /// `f(knot_i)` (right limit)
    values: Vec<f64>,
    /// slope of `f` on `[knot_i, knot_{i+1})`
    slopes: Vec<f64>,
    domain_max: f64,
    /// `∫_0^{knot_i} f`
    cumulative: Vec<f64>,
}

impl Density {
    pub fn new(
        knots: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
        domain_max: f64,
    ) -> Result<Self> {
        let n = knots.len();
        let bad = |m: &str| Err(Error::InvalidDensity(m.to_string()));
        if n == 0 || values.len() != n || slopes.len() != n {
            return bad("parts differ in length");
        }
        if knots[0] != 0.0 || values[0] != 0.0 {
            return bad("density must start at f(0) = 0");
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) || knots[n - 1] >= domain_max {
            return bad("knots must increase inside the domain");
        }
        if slopes.iter().any(|&s| s < 0.0 || !s.is_finite()) {
            return bad("density must be non-decreasing");
        }
        if slopes[0] == 0.0 {
            return bad("density must be positive right of 0");
        }
        let mut cumulative = vec![0.0];
        for i in 0..n - 1 {
            let d = knots[i + 1] - knots[i];
            let end = values[i] + slopes[i] * d;
            if values[i + 1] < end - 1e-12 * end.abs().max(1.0) {
                return bad("density must be non-decreasing");
            }
            cumulative.push(cumulative[i] + d * (values[i] + 0.5 * slopes[i] * d));
        }
        if domain_max.is_infinite() && slopes[n - 1] == 0.0 {
            return bad("density must tend to infinity");
        }
        Ok(Density {
            knots,
            values,
            slopes,
            domain_max,
            cumulative,
        })
    }

    /// `f(t) = a t` on `[0, ∞)`.
    pub fn linear(a: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![0.0], vec![a], f64::INFINITY)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
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

    fn segment(&self, t: f64) -> usize {
        self.knots.partition_point(|&k| k <= t).saturating_sub(1)
    }

    fn check(&self, t: f64) -> Result<f64> {
        let a = t.abs();
        if a.is_nan() || a >= self.domain_max {
            Err(Error::DomainExceeded {
                arg: t,
                bound: self.domain_max,
            })
        } else {
            Ok(a)
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let a = self.check(t)?;
        let i = self.segment(a);
        Ok(self.values[i] + self.slopes[i] * (a - self.knots[i]))
    }

    /// `∫_0^{|t|} f`.
    pub fn integral(&self, t: f64) -> Result<f64> {
        let a = self.check(t)?;
        let i = self.segment(a);
        let d = a - self.knots[i];
        Ok(self.cumulative[i] + d * (self.values[i] + 0.5 * self.slopes[i] * d))
    }

    /// `sup_{t < domain_max} f(t)`.
    pub fn sup_value(&self) -> f64 {
        let n = self.knots.len();
        if self.domain_max.is_infinite() {
            return f64::INFINITY;
        }
        self.values[n - 1] + self.slopes[n - 1] * (self.domain_max - self.knots[n - 1])
    }

    /// Right-continuous inverse `f^c(s) = sup{t : f(t) <= s}` on
    /// `[0, sup f)`.
    pub fn right_inverse(&self) -> Result<Density> {
        let n = self.knots.len();
        let mut knots: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut slopes: Vec<f64> = Vec::new();
        let mut push = |s: f64, v: f64, d: f64, knots: &mut Vec<f64>| {
            if let Some(&last) = knots.last() {
                if s <= last {
                    // zero-length piece: keep the larger right limit
                    let i = knots.len() - 1;
                    values[i] = v;
                    slopes[i] = d;
                    return;
                }
            }
            knots.push(s);
            values.push(v);
            slopes.push(d);
        };
        for i in 0..n {
            let a = self.knots[i];
            let b = if i + 1 < n {
                self.knots[i + 1]
            } else {
                self.domain_max
            };
            let c = self.values[i];
            let d = self.slopes[i];
            if d > 0.0 {
                // f increases linearly from c on [a, b): f^c(s) = a + (s-c)/d
                push(c, a, 1.0 / d, &mut knots);
            } else {
                // f is flat at c on [a, b): f^c jumps to b at s = c
                push(c, b, 0.0, &mut knots);
            }
            if i + 1 < n {
                let end = c + d * (b - a);
                let next = self.values[i + 1];
                if next > end {
                    // jump in f: f^c sits at b on [end, next)
                    push(end, b, 0.0, &mut knots);
                }
            }
        }
        let dom = self.sup_value();
        while knots.len() > 1 && *knots.last().unwrap() >= dom {
            knots.pop();
            values.pop();
            slopes.pop();
        }
        // f^c(0) = sup{t : f(t) <= 0} = 0 since f > 0 right of 0.
        Density::new(knots, values, slopes, dom)
    }
}

/// An N-function `F(t) = ∫_0^{|t|} f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NFunction {
    pub density: Density,
    pub label: String,
}

impl NFunction {
    pub fn new(density: Density, label: impl Into<String>) -> Self {
        NFunction {
            density,
            label: label.into(),
        }
    }

    /// `F(t) = t^2`.
    pub fn square() -> Self {
        Self::new(Density::linear(2.0).unwrap(), "t^2")
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.density.integral(t)
    }
}

impl GrowthFunction for NFunction {
    fn value(&self, t: f64) -> Result<f64> {
        self.eval(t)
    }
    fn domain_max(&self) -> f64 {
        self.density.domain_max()
    }
    fn density_at(&self, t: f64) -> Option<f64> {
        self.density.eval(t).ok()
    }
}

/// Result of [`principalize`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Principalized {
    pub nfunction: NFunction,
    /// `F = Q` on `[t0, ∞)`.
    pub t0: f64,
    /// `Q - C <= F` everywhere.
    pub c: f64,
    /// `F <= Q + D` everywhere.
    pub d: f64,
}

/// Build an N-function agreeing with the convex piecewise-linear `Q` from
/// `t0` on.
///
/// `t0` is the first breakpoint where the slope of `Q` has reached 1, `Q` is
/// positive and the slope jumps. On `[0, t0)` the density ramps linearly from
/// 0 and then levels at `q(t0)`; the ramp length is chosen so that the
/// integral up to `t0` equals `Q(t0)`, which makes `F = Q` on `[t0, ∞)`.
pub fn principalize(q: &PiecewiseConvex) -> Result<Principalized> {
    if q.values()[0] != 0.0 {
        return Err(Error::InvalidParameter(
            "principal part needs Q(0) = 0".into(),
        ));
    }
    if q.max_slope() < 1.0 {
        return Err(Error::SlopeBounded);
    }
    let (b, v, s) = (q.breakpoints(), q.values(), q.slopes());
    let i0 = (1..b.len())
        .find(|&i| s[i] >= 1.0 && v[i] > 0.0 && v[i] < s[i] * b[i])
        .ok_or(Error::SlopeBounded)?;
    let (t0, q0, big_q) = (b[i0], s[i0], v[i0]);
    let mut knots = vec![0.0];
    let mut values = vec![0.0];
    let mut slopes = Vec::new();
    if big_q >= 0.5 * t0 * q0 {
        let tau = 2.0 * (t0 - big_q / q0);
        slopes.push(q0 / tau);
        if tau < t0 {
            knots.push(tau);
            values.push(q0);
            slopes.push(0.0);
        }
    } else {
        slopes.push(2.0 * big_q / (t0 * t0));
    }
    for i in i0..b.len() {
        knots.push(b[i]);
        values.push(s[i]);
        slopes.push(0.0);
    }
    let density = Density::new(knots, values, slopes, q.domain_max())?;
    Ok(Principalized {
        nfunction: NFunction::new(density, "principal"),
        t0,
        c: big_q,
        d: big_q,
    })
}

/// `F_M`: the N-function with principal part `φ_{ω_M}`.
pub fn nfunction_of_sequence(m: &WeightSequence) -> Result<Principalized> {
    let mut p = principalize(&phi_structure(m))?;
    p.nfunction.label = format!("F[{}]", m.label());
    Ok(p)
}

/// Sampling configuration for function-level probes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub points: usize,
    /// Upper probe end used when both functions have unbounded domains.
    pub default_t_max: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            points: 400,
            default_t_max: 64.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NRelation {
    /// `F1 ≼_c F2`: `F1(t) <= F2(K t)` for large `t`.
    PreceqC,
    SimC,
    /// `F1 ≼ F2`: `F2(t) <= K F1(t)` for large `t`.
    Preceq,
    Sim,
    /// `F1(t) <= F2(K t)` eventually, for every `K > 0`.
    EssStronger,
    /// `F2 = o(F1)`.
    LittleO,
}

impl NRelation {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "preceq_c" => NRelation::PreceqC,
            "sim_c" => NRelation::SimC,
            "preceq" => NRelation::Preceq,
            "sim" => NRelation::Sim,
            "ess" | "ess_stronger" => NRelation::EssStronger,
            "little_o" => NRelation::LittleO,
            other => return Err(Error::Parse(format!("unknown relation '{other}'"))),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RelationWitness {
    /// argument scaling `K`
    pub k: Option<f64>,
    /// multiplicative constant `K1` in `F1 <= K1 F2(K t)`
    pub k1: Option<f64>,
    /// additive constant `C` in `F1 <= F2(K t) + C`
    pub c: Option<f64>,
    /// threshold beyond which the inequality was observed
    pub t0: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationEvidence {
    pub relation: NRelation,
    pub verdict: Verdict,
    pub witness: RelationWitness,
    pub counterexample_t: Option<f64>,
    pub probe_points: usize,
}

fn probe_end(
    f1: &dyn GrowthFunction,
    f2: &dyn GrowthFunction,
    probe: &ProbeConfig,
    own: bool,
) -> f64 {
    let d = if own {
        f1.domain_max()
    } else {
        f1.domain_max().min(f2.domain_max())
    };
    if d.is_finite() {
        d * (1.0 - 1e-9)
    } else if f2.domain_max().is_finite() && own {
        probe.default_t_max.max(f2.domain_max())
    } else {
        probe.default_t_max
    }
}

/// Profile of `K(t) = F2^{-1}(F1(t)) / t`.
fn scaling_profile(
    f1: &dyn GrowthFunction,
    f2: &dyn GrowthFunction,
    probe: &ProbeConfig,
) -> (Vec<f64>, Vec<f64>) {
    let end = probe_end(f1, f2, probe, true);
    let mut pos = Vec::new();
    let mut val = Vec::new();
    for t in linspace(0.0, end, probe.points + 1).into_iter().skip(1) {
        let Ok(y) = f1.value(t) else { break };
        let Some(x) = f2.inverse(y) else { break };
        pos.push(t);
        val.push(x / t);
    }
    (pos, val)
}

/// Profile of `F2(t) / F1(t)` where `F1(t) > 0`.
fn ratio_profile(
    f1: &dyn GrowthFunction,
    f2: &dyn GrowthFunction,
    probe: &ProbeConfig,
) -> (Vec<f64>, Vec<f64>) {
    let end = probe_end(f1, f2, probe, false);
    let mut pos = Vec::new();
    let mut val = Vec::new();
    for t in linspace(0.0, end, probe.points + 1).into_iter().skip(1) {
        let (Ok(a), Ok(b)) = (f1.value(t), f2.value(t)) else {
            break;
        };
        if a <= 0.0 {
            continue;
        }
        pos.push(t);
        val.push(b / a);
    }
    (pos, val)
}

/// Grid of argument scalings `2^-16 .. 2^16`. Scalings below 1 only matter
/// when the right-hand function has the shorter trusted range.
pub fn dilation_grid() -> Vec<f64> {
    (-16..=16).map(|e| 2f64.powi(e)).collect()
}

/// Range of the left function that a probe tries to cover: its own domain,
/// the partner's domain when its own is unbounded, or the default probe
/// range when both are.
fn own_range(dom1: f64, dom2: f64, probe: &ProbeConfig) -> f64 {
    if dom1.is_finite() {
        dom1
    } else if dom2.is_finite() {
        dom2
    } else {
        probe.default_t_max
    }
}

/// Window `(0, P]` on which `g1(t)` and `g2(k t)` are both trusted, or `None`
/// when it covers less than half of the range of `g1`.
fn dilation_window(dom1: f64, dom2: f64, k: f64, probe: &ProbeConfig) -> Option<f64> {
    let own = own_range(dom1, dom2, probe);
    let p = own.min(dom2 / k) * (1.0 - 1e-9);
    if p >= 0.5 * own * (1.0 - 1e-9) {
        Some(p)
    } else {
        None
    }
}

/// Profile of `g1(t) / g2(k, t)` on `(0, end]`.
fn dilated_ratio(
    g1: &dyn Fn(f64) -> Option<f64>,
    g2: &dyn Fn(f64, f64) -> Option<f64>,
    end: f64,
    k: f64,
    points: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut pos = Vec::new();
    let mut val = Vec::new();
    for t in linspace(0.0, end, points + 1).into_iter().skip(1) {
        let (Some(a), Some(b)) = (g1(t), g2(k, t)) else {
            break;
        };
        if b <= 0.0 {
            // an empty right-hand side early on is pre-asymptotic
            if a <= 0.0 || t <= 0.5 * end {
                continue;
            }
            pos.push(t);
            val.push(f64::INFINITY);
            continue;
        }
        pos.push(t);
        val.push(a / b);
    }
    (pos, val)
}

/// Outcome of scanning the dilation grid: the first scaling whose ratio
/// profile stays bounded, or a failure when every testable scaling shows
/// growth.
pub(crate) struct GridScan {
    pub verdict: Verdict,
    pub k: Option<f64>,
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
    pub counterexample: Option<f64>,
}

/// `g2(k, t)` is the dilated right-hand side, trusted while `k t < dom2`.
pub(crate) fn scan_dilations(
    g1: &dyn Fn(f64) -> Option<f64>,
    g2: &dyn Fn(f64, f64) -> Option<f64>,
    dom1: f64,
    dom2: f64,
    probe: &ProbeConfig,
) -> GridScan {
    let mut undetermined = false;
    let mut tested = false;
    let mut counterexample = None;
    let own = own_range(dom1, dom2, probe);
    for k in dilation_grid() {
        // a scaling below 1 only adds information when the doubled scaling
        // could not cover the whole range
        if k < 1.0 && dom2 / (2.0 * k) >= own {
            continue;
        }
        let Some(end) = dilation_window(dom1, dom2, k, probe) else {
            continue;
        };
        let (pos, val) = dilated_ratio(g1, g2, end, k, probe.points);
        if pos.len() < probe.points / 2 {
            continue;
        }
        tested = true;
        match classify_profile(&pos, &val, PLATEAU_TOL) {
            Trend::Bounded { .. } => {
                return GridScan {
                    verdict: Verdict::Holds,
                    k: Some(k),
                    positions: pos,
                    values: val,
                    counterexample: None,
                }
            }
            Trend::Undetermined => undetermined = true,
            Trend::Unbounded { witness } => {
                if counterexample.is_none() {
                    counterexample = Some(pos[witness]);
                }
            }
        }
    }
    let decided = tested && !undetermined;
    GridScan {
        verdict: if decided {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        },
        k: None,
        positions: Vec::new(),
        values: Vec::new(),
        counterexample: if decided { counterexample } else { None },
    }
}

/// `F1 ≼_c F2`: some grid dilation `K` keeps `F1(t) / F2(K t)` bounded.
fn preceq_c(
    f1: &dyn GrowthFunction,
    f2: &dyn GrowthFunction,
    probe: &ProbeConfig,
) -> RelationEvidence {
    let g1 = |t: f64| f1.value(t).ok();
    let g2 = |k: f64, t: f64| f2.value(k * t).ok();
    let scan = scan_dilations(&g1, &g2, f1.domain_max(), f2.domain_max(), probe);
    let mut ev = RelationEvidence {
        relation: NRelation::PreceqC,
        verdict: scan.verdict,
        witness: RelationWitness::default(),
        counterexample_t: scan.counterexample,
        probe_points: scan.positions.len(),
    };
    if let Some(k) = scan.k {
        let (pos, val) = (&scan.positions, &scan.values);
        let t0 = (0..pos.len())
            .rev()
            .find(|&i| val[i] > 1.0)
            .map(|i| pos[(i + 1).min(pos.len() - 1)])
            .unwrap_or(0.0);
        let mut c: f64 = 0.0;
        for &t in pos {
            if let (Ok(a), Ok(b)) = (f1.value(t), f2.value(k * t)) {
                c = c.max(a - b);
            }
        }
        let k1 = val
            .iter()
            .cloned()
            .filter(|v| v.is_finite())
            .fold(1.0, f64::max);
        ev.witness = RelationWitness {
            k: Some(k),
            k1: Some(k1 * HEADROOM),
            c: Some(c.max(0.0) * HEADROOM),
            t0: Some(t0),
        };
    }
    ev
}

fn preceq_big_o(
    f1: &dyn GrowthFunction,
    f2: &dyn GrowthFunction,
    probe: &ProbeConfig,
) -> RelationEvidence {
    let (pos, val) = ratio_profile(f1, f2, probe);
    let trend = classify_profile(&pos, &val, PLATEAU_TOL);
    let mut ev = RelationEvidence {
        relation: NRelation::Preceq,
        verdict: trend.verdict(),
        witness: RelationWitness::default(),
        counterexample_t: None,
        probe_points: pos.len(),
    };
    match trend {
        Trend::Bounded { .. } => {
            let half = pos.len() / 2;
            let tail = val[half..].iter().cloned().fold(0.0, f64::max);
            ev.witness.k = Some(tail * HEADROOM);
            ev.witness.t0 = Some(pos[half]);
        }
        Trend::Unbounded { witness } => ev.counterexample_t = Some(pos[witness]),
        Trend::Undetermined => {}
    }
    ev
}

fn combine(relation: NRelation, a: RelationEvidence, b: RelationEvidence) -> RelationEvidence {
    RelationEvidence {
        relation,
        verdict: a.verdict.and(b.verdict),
        witness: a.witness,
        counterexample_t: a.counterexample_t.or(b.counterexample_t),
        probe_points: a.probe_points.min(b.probe_points),
    }
}

/// Decide a relation between two functions on their trusted ranges.
pub fn relate_nfunctions(
    f1: &dyn GrowthFunction,
    f2: &dyn GrowthFunction,
    relation: NRelation,
    probe: &ProbeConfig,
) -> RelationEvidence {
    match relation {
        NRelation::PreceqC => preceq_c(f1, f2, probe),
        NRelation::SimC => combine(relation, preceq_c(f1, f2, probe), preceq_c(f2, f1, probe)),
        NRelation::Preceq => preceq_big_o(f1, f2, probe),
        NRelation::Sim => combine(
            relation,
            preceq_big_o(f1, f2, probe),
            preceq_big_o(f2, f1, probe),
        ),
        NRelation::EssStronger => {
            let (pos, val) = scaling_profile(f1, f2, probe);
            RelationEvidence {
                relation,
                verdict: classify_decay(&pos, &val),
                witness: RelationWitness::default(),
                counterexample_t: None,
                probe_points: pos.len(),
            }
        }
        NRelation::LittleO => {
            let (pos, val) = ratio_profile(f1, f2, probe);
            RelationEvidence {
                relation,
                verdict: classify_decay(&pos, &val),
                witness: RelationWitness::default(),
                counterexample_t: None,
                probe_points: pos.len(),
            }
        }
    }
}

/// Density-level form of `≼_c`: `f1(t) <= k f2(k t)` for large `t`, with `k`
/// taken from the dilation grid.
pub fn density_relation(
    f1: &dyn GrowthFunction,
    f2: &dyn GrowthFunction,
    probe: &ProbeConfig,
) -> (Verdict, Option<f64>) {
    let g1 = |t: f64| f1.density_at(t);
    let g2 = |k: f64, t: f64| f2.density_at(k * t).map(|d| k.max(1.0) * d);
    let scan = scan_dilations(&g1, &g2, f1.domain_max(), f2.domain_max(), probe);
    (scan.verdict, scan.k.map(|k| k.max(1.0)))
}

/// Per-route verdicts for comparing `F_M` against `F_L` (`F_M ≼_c F_L`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingComparison {
    /// `Σ_M(t) <= A Σ_L(t^k)` for large `t`
    pub counting: Verdict,
    pub counting_a: Option<f64>,
    pub counting_k: Option<f64>,
    /// `λ_{⌈j/B⌉} <= μ_j^k` for large `j`
    pub quotient: Verdict,
    pub quotient_b: Option<f64>,
    pub quotient_k: Option<f64>,
    /// `F_M(t) <= F_L(K t)` for large `t`
    pub function_level: Verdict,
    /// `f_M(t) <= k f_L(k t)` for large `t`
    pub density_level: Verdict,
    pub consensus: Verdict,
}

/// Counting-function route: some grid scaling `k` keeps
/// `Σ_M(e^x) / (max(k, 1) Σ_L(e^{k x}))` bounded.
pub fn counting_criterion(
    m: &WeightSequence,
    l: &WeightSequence,
    probe: &ProbeConfig,
) -> (Verdict, Option<f64>, Option<f64>) {
    let g1 = |x: f64| (x < m.log_t_max()).then(|| m.count_le_log(x) as f64);
    let g2 =
        |k: f64, x: f64| (k * x < l.log_t_max()).then(|| k.max(1.0) * l.count_le_log(k * x) as f64);
    let scan = scan_dilations(&g1, &g2, m.log_t_max(), l.log_t_max(), probe);
    (scan.verdict, scan.k.map(|k| k.max(1.0)), scan.k)
}

/// Quotient route: for some `B` in the grid the required exponent
/// `k_j = log λ_{⌈j/B⌉} / log μ_j` stays bounded. The profile is read against
/// `log j`, the scale on which `log μ_j` moves for Gevrey-like sequences.
pub fn quotient_criterion(
    m: &WeightSequence,
    l: &WeightSequence,
) -> (Verdict, Option<f64>, Option<f64>) {
    let j0 = (m.leading_ones() + 1).max(2);
    let jm = (m.horizon() - 1).min(l.horizon() - 1);
    let mut undetermined = false;
    for b in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let mut pos = Vec::new();
        let mut val = Vec::new();
        for j in j0..=jm {
            let i = (j as f64 / b).ceil() as usize;
            pos.push((j as f64).ln());
            val.push(l.log_quotient(i) / m.log_quotient(j));
        }
        match classify_profile(&pos, &val, PLATEAU_TOL) {
            Trend::Bounded { .. } => {
                let k = val[val.len() / 2..].iter().cloned().fold(1.0, f64::max);
                return (Verdict::Holds, Some(b), Some(k));
            }
            Trend::Undetermined => undetermined = true,
            Trend::Unbounded { .. } => {}
        }
    }
    if undetermined {
        (Verdict::Inconclusive, None, None)
    } else {
        (Verdict::Fails, None, None)
    }
}

/// Run all four equivalent forms of `F_M ≼_c F_L`.
pub fn compare_counting(
    m: &WeightSequence,
    l: &WeightSequence,
    probe: &ProbeConfig,
) -> Result<CountingComparison> {
    let (counting, counting_a, counting_k) = counting_criterion(m, l, probe);
    let (quotient, quotient_b, quotient_k) = quotient_criterion(m, l);
    let fm = nfunction_of_sequence(m)?.nfunction;
    let fl = nfunction_of_sequence(l)?.nfunction;
    let function_level = relate_nfunctions(&fm, &fl, NRelation::PreceqC, probe).verdict;
    let density_level = density_relation(&fm, &fl, probe).0;
    let consensus = counting
        .agree(quotient)
        .agree(function_level)
        .agree(density_level);
    let consensus = if [counting, quotient, function_level, density_level]
        .iter()
        .all(|v| *v == consensus || *v == Verdict::Inconclusive)
    {
        consensus
    } else {
        Verdict::Inconclusive
    };
    Ok(CountingComparison {
        counting,
        counting_a,
        counting_k,
        quotient,
        quotient_b,
        quotient_k,
        function_level,
        density_level,
        consensus,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceCriterion {
    pub verdict: Verdict,
    /// index multiplier `c`
    pub c: Option<f64>,
    /// constant `A`
    pub a: Option<f64>,
    pub counterexample_index: Option<usize>,
}

/// `M_j <= A (L_{cj})^{1/c}`, which is equivalent to `F_M ≼ F_L`.
///
/// For each `j` the smallest real `c` with `log M_j <= log L_{⌈cj⌉} / c`
/// is computed (the right side increases with `c`); the criterion holds when
/// this profile stays bounded on `j <= J/8`.
pub fn seq_criterion_preceq(m: &WeightSequence, l: &WeightSequence) -> Result<SequenceCriterion> {
    if m.horizon() != l.horizon() {
        return Err(Error::HorizonMismatch {
            left: m.horizon(),
            right: l.horizon(),
        });
    }
    let jn = m.horizon();
    let window = jn / 8;
    let mut pos = Vec::new();
    let mut val = Vec::new();
    for j in 1..=window {
        let target = m.log_m(j);
        let k = (j..=jn).find(|&k| j as f64 * l.log_m(k) / k as f64 >= target);
        pos.push(j as f64);
        val.push(k.map(|k| k as f64 / j as f64).unwrap_or(f64::INFINITY));
    }
    let trend = classify_profile(&pos, &val, PLATEAU_TOL);
    Ok(match trend {
        Trend::Bounded { .. } => {
            let tail = val[window / 2..].iter().cloned().fold(1.0, f64::max);
            let c = tail.ceil();
            if c > 16.0 {
                SequenceCriterion {
                    verdict: Verdict::Inconclusive,
                    c: None,
                    a: None,
                    counterexample_index: None,
                }
            } else {
                let ci = c as usize;
                let log_a = (1..=jn / ci)
                    .map(|j| m.log_m(j) - l.log_m(ci * j) / c)
                    .fold(0.0, f64::max);
                SequenceCriterion {
                    verdict: Verdict::Holds,
                    c: Some(c),
                    a: Some((log_a * HEADROOM).exp()),
                    counterexample_index: None,
                }
            }
        }
        Trend::Unbounded { witness } => SequenceCriterion {
            verdict: Verdict::Fails,
            c: None,
            a: None,
            counterexample_index: Some(witness + 1),
        },
        Trend::Undetermined => SequenceCriterion {
            verdict: Verdict::Inconclusive,
            c: None,
            a: None,
            counterexample_index: None,
        },
    })
}

/// `L_j <= A M_{cj}` for some `c` in `1..=16`; equivalent to `F_M ≼_c F_L`
/// when `M` or `L` has moderate growth, and sufficient in general.
pub fn seq_criterion_weak(m: &WeightSequence, l: &WeightSequence) -> Result<SequenceCriterion> {
    if m.horizon() != l.horizon() {
        return Err(Error::HorizonMismatch {
            left: m.horizon(),
            right: l.horizon(),
        });
    }
    let jn = m.horizon();
    let mut undetermined = false;
    let mut witness = None;
    for c in 1..=16usize {
        let window = jn / c;
        let pos: Vec<f64> = (1..=window).map(|j| j as f64).collect();
        let val: Vec<f64> = (1..=window).map(|j| l.log_m(j) - m.log_m(c * j)).collect();
        match classify_profile(&pos, &val, PLATEAU_TOL) {
            Trend::Bounded { sup, .. } => {
                return Ok(SequenceCriterion {
                    verdict: Verdict::Holds,
                    c: Some(c as f64),
                    a: Some((sup.max(0.0) * HEADROOM).exp()),
                    counterexample_index: None,
                })
            }
            Trend::Undetermined => undetermined = true,
            Trend::Unbounded { witness: w } => {
                if witness.is_none() {
                    witness = Some(w + 1)
                }
            }
        }
    }
    Ok(SequenceCriterion {
        verdict: if undetermined {
            Verdict::Inconclusive
        } else {
            Verdict::Fails
        },
        c: None,
        a: None,
        counterexample_index: if undetermined { None } else { witness },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingRatio {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// estimated finite limit of `Σ_M / Σ_L`
    pub limit: Option<f64>,
    pub divergent: bool,
}

/// Statistics of `Σ_M(t) / Σ_L(t)` over the last quartile of the common range.
pub fn counting_ratio(m: &WeightSequence, l: &WeightSequence, points: usize) -> CountingRatio {
    let end = m.log_t_max().min(l.log_t_max()) * (1.0 - 1e-9);
    let mut pos = Vec::new();
    let mut val = Vec::new();
    for x in linspace(0.0, end, points + 1).into_iter().skip(1) {
        let b = l.count_le_log(x);
        if b == 0 {
            continue;
        }
        pos.push(x);
        val.push(m.count_le_log(x) as f64 / b as f64);
    }
    if val.is_empty() {
        return CountingRatio {
            min: f64::NAN,
            max: f64::NAN,
            mean: f64::NAN,
            limit: None,
            divergent: false,
        };
    }
    let q = val.len() - val.len() / 4;
    let tail = &val[q..];
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let divergent = matches!(
        classify_profile(&pos, &val, PLATEAU_TOL),
        Trend::Unbounded { .. }
    );
    let limit = if !divergent && max - min <= 0.15 * mean.abs().max(1e-300) {
        Some(mean)
    } else {
        None
    };
    CountingRatio {
        min,
        max,
        mean,
        limit,
        divergent,
    }
}

/// Smallest `d >= 0` with `λ_{⌈j/c2⌉-d} <= μ_j < λ_{⌈j/c1⌉+d}` for all
/// testable `j`. Both sequences must have strictly increasing quotients.
pub fn interleaving_offset(
    m: &WeightSequence,
    l: &WeightSequence,
    c1: f64,
    c2: f64,
) -> Result<usize> {
    if let Some(i) = m.first_flat_index() {
        return Err(Error::NotStrictlyIncreasing { index: i });
    }
    if let Some(i) = l.first_flat_index() {
        return Err(Error::NotStrictlyIncreasing { index: i });
    }
    let jn = l.horizon();
    let mut d = 0usize;
    for j in 1..=m.horizon() {
        let lo = (j as f64 / c2).ceil() as usize;
        let hi = (j as f64 / c1).ceil() as usize;
        let mu = m.log_quotient(j);
        while lo > d && l.log_quotient(lo - d) > mu {
            d += 1;
        }
        if hi + d > jn {
            break;
        }
        while hi + d <= jn && l.log_quotient(hi + d) <= mu {
            d += 1;
        }
    }
    Ok(d)
}

/// Maximal relative deviation of the sampled sandwich
/// `Q - C <= F <= Q + D`; returns the worst violation (<= 0 means none).
pub fn sandwich_violation(q: &PiecewiseConvex, p: &Principalized, points: usize) -> f64 {
    let dom = q.domain_max() * (1.0 - 1e-9);
    let mut worst = f64::NEG_INFINITY;
    for t in linspace(0.0, dom, points) {
        let (a, b) = (q.eval(t).unwrap(), p.nfunction.eval(t).unwrap());
        worst = worst.max(a - p.c - b).max(b - a - p.d);
    }
    worst
}

/// Largest `|F(t) - Q(t)|` for `t >= t0` on a grid.
pub fn principal_gap(q: &PiecewiseConvex, p: &Principalized, points: usize) -> f64 {
    let dom = q.domain_max() * (1.0 - 1e-9);
    let mut worst: f64 = 0.0;
    for t in linspace(p.t0, dom, points) {
        let (a, b) = (q.eval(t).unwrap(), p.nfunction.eval(t).unwrap());
        worst = worst.max((a - b).abs() / a.abs().max(1.0));
    }
    worst
}

pub fn max_index(values: &[f64]) -> usize {
    max_with_index(values).0
}
