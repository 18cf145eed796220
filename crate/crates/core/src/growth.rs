//! Finite-horizon checkers for the growth conditions Δ₂, ∇₂, Δ², Δ₃ and Δ′
//! of `F_M`.
//!
//! Each checker decides through a sequence-level criterion and records a
//! function-level probe next to it. Constants are fitted as the largest
//! residual plus [`HEADROOM`] and can be replayed with
//! [`ConditionReport::replay`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::associated::{counting_log, omega_tilde_log, phi_structure, phi_unchecked};
use crate::conjugation::complementary;
use crate::error::{Error, Result};
use crate::evidence::{
    classify_decay, classify_profile, linspace, snap_zero, Trend, Verdict, HEADROOM, PLATEAU_TOL,
};
use crate::nfunction::{nfunction_of_sequence, GrowthFunction};
use crate::weight_sequences::{has_mg, make_sequence, Family, WeightSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Mg,
    Delta2,
    Nabla2,
    DeltaSquare,
    Delta3,
    DeltaPrime,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::Mg,
        Condition::Delta2,
        Condition::Nabla2,
        Condition::DeltaSquare,
        Condition::Delta3,
        Condition::DeltaPrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Mg => "mg",
            Condition::Delta2 => "delta2",
            Condition::Nabla2 => "nabla2",
            Condition::DeltaSquare => "deltasq",
            Condition::Delta3 => "delta3",
            Condition::DeltaPrime => "deltaprime",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown condition '{s}'")))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    SequenceCriterion,
    FunctionProbe,
    AnalyticFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    /// index `j` or probe argument
    pub at: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub route: Route,
    /// named constants of the criterion (`k`, `A`, `B`, `l`, `C`, `j0`, ...)
    pub witnesses: BTreeMap<String, f64>,
    pub counterexample: Option<Counterexample>,
    /// verdicts of the secondary routes and sub-probes
    pub checks: BTreeMap<String, Verdict>,
    /// tested range of indices or arguments
    pub probe_range: (f64, f64),
}

impl ConditionReport {
    fn new(condition: Condition, route: Route, probe_range: (f64, f64)) -> Self {
        ConditionReport {
            condition,
            verdict: Verdict::Inconclusive,
            route,
            witnesses: BTreeMap::new(),
            counterexample: None,
            checks: BTreeMap::new(),
            probe_range,
        }
    }

    fn w(&self, key: &str) -> Option<f64> {
        self.witnesses.get(key).copied()
    }

    /// Re-check the stored constants against the criterion on the tested
    /// range. `None` when the report carries no witness.
    pub fn replay(&self, m: &WeightSequence) -> Option<bool> {
        if self.verdict != Verdict::Holds {
            return None;
        }
        let lm = m.log_m_all();
        let le = |a: f64, b: f64| a <= b + 1e-9 * a.abs().max(b.abs()).max(1.0);
        Some(match self.condition {
            Condition::Mg => {
                let b = self.w("B")?.ln();
                (1..=m.horizon() / 2).all(|j| le(lm[2 * j], j as f64 * b + 2.0 * lm[j]))
            }
            Condition::Delta2 => {
                let k = self.w("k")? as usize;
                let (a, b) = (self.w("A")?.ln(), self.w("B")?.ln());
                (1..=m.horizon() / k)
                    .all(|j| le(2.0 * k as f64 * lm[j], a + j as f64 * b + lm[k * j]))
            }
            Condition::Nabla2 => {
                let (l, a) = (self.w("l")?, self.w("A")?.ln());
                (1..=m.horizon() / 2).all(|j| le(lm[2 * j], a + 2.0 * l * lm[j]))
            }
            Condition::DeltaSquare => {
                let (a, j0) = (self.w("A")?, self.w("j0")? as usize);
                (j0.max(1)..=isqrt(m.horizon()))
                    .all(|j| le(m.log_quotient(j * j), a * m.log_quotient(j)))
            }
            Condition::Delta3 => {
                let (k, c, x_max) = (self.w("k")?, self.w("C")?, self.w("x_max")?);
                linspace(0.0, x_max, 401).into_iter().skip(1).all(|x| {
                    let rhs = phi_unchecked(m, k * x);
                    rhs <= 0.0 || le(omega_tilde_log(m, 2.0 * x).unwrap_or(f64::NAN), c * rhs)
                })
            }
            Condition::DeltaPrime => {
                let (k, x0, x_max) = (self.w("k")?, self.w("x0")?, self.w("x_max")?);
                let grid = linspace(x0, x_max, 41);
                grid.iter().all(|&a| {
                    grid.iter().all(|&b| {
                        le(
                            phi_unchecked(m, a * b),
                            k * phi_unchecked(m, a) * phi_unchecked(m, b),
                        )
                    })
                })
            }
        })
    }
}

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    r
}

/// Grid of `k` for Δ₂.
pub const DELTA2_K: std::ops::RangeInclusive<usize> = 2..=16;
/// Grid of `ℓ` for ∇₂.
pub const NABLA2_L: [f64; 5] = [1.25, 1.5, 2.0, 4.0, 8.0];
/// Grid of `A` for Δ².
pub const DELTA_SQUARE_A: [f64; 5] = [2.0, 4.0, 8.0, 16.0, 32.0];
/// Grid of `k` for Δ₃.
pub const DELTA3_K: [f64; 4] = [2.0, 4.0, 8.0, 16.0];
/// Fixed exponents `t` of the (Δ′_f) probe.
pub const DELTA_PRIME_T: [f64; 3] = [2.0, 3.0, 4.0];

const POINTS: usize = 400;

fn index_positions(n: usize) -> Vec<f64> {
    (1..=n).map(|j| j as f64).collect()
}

fn fail_or_inconclusive(tested: bool, undetermined: bool) -> Verdict {
    if tested && !undetermined {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    }
}

/// `g1(x) / g2(kx)` on `(0, dom/k]` for each `k` of the grid: holds at the
/// first bounded profile, fails when every `k` shows growth.
fn dilation_probe(
    g1: &dyn Fn(f64) -> f64,
    g2: &dyn Fn(f64) -> f64,
    dom: f64,
    ks: &[f64],
) -> Verdict {
    let mut tested = false;
    let mut undetermined = false;
    for &k in ks {
        let end = dom / k * (1.0 - 1e-9);
        let mut pos = Vec::new();
        let mut val = Vec::new();
        for x in linspace(0.0, end, POINTS + 1).into_iter().skip(1) {
            let b = g2(k * x);
            if b <= 0.0 {
                continue;
            }
            pos.push(x);
            val.push(g1(x) / b);
        }
        match classify_profile(&pos, &val, PLATEAU_TOL) {
            Trend::Bounded { .. } => return Verdict::Holds,
            Trend::Unbounded { .. } => tested = true,
            Trend::Undetermined => undetermined = true,
        }
    }
    fail_or_inconclusive(tested, undetermined)
}

fn fit_log(x: f64, scale: f64) -> f64 {
    snap_zero(x, scale).max(0.0) * HEADROOM
}

/// `φ(2x) / φ(x)` on `(x_lo, dom/2)` where `φ > 0`.
fn delta2_profile(f: &dyn GrowthFunction, x_lo: f64) -> Trend {
    let end = 0.5 * f.domain_max() * (1.0 - 1e-9);
    if end.is_nan() || end <= x_lo {
        return Trend::Undetermined;
    }
    let mut pos = Vec::new();
    let mut val = Vec::new();
    for x in linspace(x_lo, end, POINTS + 1).into_iter().skip(1) {
        let (Ok(a), Ok(b)) = (f.value(x), f.value(2.0 * x)) else {
            break;
        };
        if a <= 0.0 {
            continue;
        }
        pos.push(x);
        val.push(b / a);
    }
    classify_profile(&pos, &val, PLATEAU_TOL)
}

/// Δ₂ through `(M_j)^{2k} <= A B^j M_{kj}`: for each `k` the residual
/// `(2k log M_j - log M_{kj}) / j` must stay bounded. Cross-checked with the
/// boundedness of `φ_{ω_M}(2x) / φ_{ω_M}(x)`.
pub fn check_delta2(m: &WeightSequence) -> ConditionReport {
    let h = m.horizon();
    let lm = m.log_m_all();
    let mut r = ConditionReport::new(Condition::Delta2, Route::SequenceCriterion, (1.0, h as f64));
    let mut tested = false;
    let mut undetermined = false;
    let mut first_fail = None;
    for k in DELTA2_K {
        let n = h / k;
        let res: Vec<f64> = (1..=n)
            .map(|j| (2.0 * k as f64 * lm[j] - lm[k * j]) / j as f64)
            .collect();
        match classify_profile(&index_positions(n), &res, PLATEAU_TOL) {
            Trend::Bounded { .. } => {
                let scale = lm[k * n].abs();
                let tail = res[n / 2..]
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                let log_b = fit_log(tail, scale);
                let log_a = fit_log(
                    (1..=n)
                        .map(|j| j as f64 * (res[j - 1] - log_b))
                        .fold(0.0, f64::max),
                    scale,
                );
                r.verdict = Verdict::Holds;
                r.witnesses.insert("k".into(), k as f64);
                r.witnesses.insert("A".into(), log_a.exp());
                r.witnesses.insert("B".into(), log_b.exp());
                r.probe_range = (1.0, n as f64);
                break;
            }
            Trend::Unbounded { witness } => {
                tested = true;
                first_fail.get_or_insert(Counterexample {
                    at: (witness + 1) as f64,
                    residual: res[witness],
                });
            }
            Trend::Undetermined => undetermined = true,
        }
    }
    if r.verdict != Verdict::Holds {
        r.verdict = fail_or_inconclusive(tested, undetermined);
        if r.verdict == Verdict::Fails {
            r.counterexample = first_fail;
        }
    }
    let phi = phi_structure(m);
    r.checks.insert(
        "function_probe".into(),
        delta2_profile(&phi, m.log_quotient(1)).verdict(),
    );
    r
}

/// ∇₂ through `M_{2j} <= A M_j^{2ℓ}`: the residual
/// `log M_{2j} - 2ℓ log M_j` must stay bounded above. Cross-checked with a
/// Δ₂ probe on the complementary function of `F_M`.
pub fn check_nabla2(m: &WeightSequence) -> ConditionReport {
    let h = m.horizon();
    let lm = m.log_m_all();
    let n = h / 2;
    let mut r = ConditionReport::new(Condition::Nabla2, Route::SequenceCriterion, (1.0, n as f64));
    let mut tested = false;
    let mut undetermined = false;
    let mut first_fail = None;
    for l in NABLA2_L {
        let res: Vec<f64> = (1..=n).map(|j| lm[2 * j] - 2.0 * l * lm[j]).collect();
        match classify_profile(&index_positions(n), &res, PLATEAU_TOL) {
            Trend::Bounded { sup, .. } => {
                r.verdict = Verdict::Holds;
                r.witnesses.insert("l".into(), l);
                r.witnesses
                    .insert("A".into(), fit_log(sup, lm[2 * n].abs()).exp());
                break;
            }
            Trend::Unbounded { witness } => {
                tested = true;
                first_fail.get_or_insert(Counterexample {
                    at: (witness + 1) as f64,
                    residual: res[witness],
                });
            }
            Trend::Undetermined => undetermined = true,
        }
    }
    if r.verdict != Verdict::Holds {
        r.verdict = fail_or_inconclusive(tested, undetermined);
        if r.verdict == Verdict::Fails {
            r.counterexample = first_fail;
        }
    }
    let probe = nfunction_of_sequence(m)
        .and_then(|p| complementary(&p.nfunction))
        .map(|pair| delta2_profile(&pair.conjugate, 0.0).verdict())
        .unwrap_or(Verdict::Inconclusive);
    r.checks.insert("function_probe".into(), probe);
    r
}

/// Δ² through `μ_{j²} <= μ_j^A` for `j >= j0`: the ratio
/// `log μ_{j²} / log μ_j` must stay bounded; `A` is the smallest grid value
/// covering its tail. Also reports the sufficient route (mg together with
/// `liminf μ_{2^n}^{1/(n+2)} > 1`) and a probe of `F(t)² <= F(kt)`.
pub fn check_delta_square(m: &WeightSequence) -> ConditionReport {
    let jmax = isqrt(m.horizon());
    let mut r = ConditionReport::new(
        Condition::DeltaSquare,
        Route::SequenceCriterion,
        (1.0, jmax as f64),
    );
    let js: Vec<usize> = (1..=jmax).filter(|&j| m.log_quotient(j) > 0.0).collect();
    let pos: Vec<f64> = js.iter().map(|&j| j as f64).collect();
    let ratio: Vec<f64> = js
        .iter()
        .map(|&j| m.log_quotient(j * j) / m.log_quotient(j))
        .collect();
    match classify_profile(&pos, &ratio, PLATEAU_TOL) {
        Trend::Bounded { .. } => {
            let tail = ratio[ratio.len() / 2..]
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            let ok = |a: f64, j: usize| {
                let (lhs, rhs) = (m.log_quotient(j * j), a * m.log_quotient(j));
                lhs <= rhs + 1e-9 * lhs.abs().max(1.0)
            };
            match DELTA_SQUARE_A.iter().find(|&&a| a >= tail * (1.0 - 1e-9)) {
                Some(&a) => {
                    // smallest j0 with the inequality on all tested j >= j0
                    let j0 = (1..=jmax)
                        .rev()
                        .take_while(|&j| ok(a, j))
                        .last()
                        .unwrap_or(jmax);
                    r.verdict = Verdict::Holds;
                    r.witnesses.insert("A".into(), a);
                    r.witnesses.insert("j0".into(), (j0 - 1) as f64);
                }
                None => r.verdict = Verdict::Inconclusive,
            }
        }
        Trend::Unbounded { witness } => {
            r.verdict = Verdict::Fails;
            let a = *DELTA_SQUARE_A.last().unwrap();
            let j = (1..=jmax)
                .find(|&j| {
                    m.log_quotient(j * j) > a * m.log_quotient(j) && j as f64 >= pos[witness] / 2.0
                })
                .unwrap_or(js[witness]);
            r.counterexample = Some(Counterexample {
                at: j as f64,
                residual: m.log_quotient(j * j) - a * m.log_quotient(j),
            });
        }
        Trend::Undetermined => {}
    }
    // sufficient route
    let mg = has_mg(m).verdict;
    let ns: Vec<usize> = (0..)
        .take_while(|&n| (1usize << n) <= m.horizon())
        .collect();
    let v: Vec<f64> = ns
        .iter()
        .map(|&n| m.log_quotient(1 << n) / (n as f64 + 2.0))
        .collect();
    let npos: Vec<f64> = ns.iter().map(|&n| n as f64 + 1.0).collect();
    let tail_min = v[v.len() / 2..]
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let liminf = match classify_decay(&npos, &v) {
        Verdict::Fails if tail_min > 0.0 => Verdict::Holds,
        Verdict::Holds => Verdict::Fails,
        _ => Verdict::Inconclusive,
    };
    r.checks.insert("sufficiency".into(), mg.and(liminf));
    let phi = |x: f64| phi_unchecked(m, x);
    let probe = dilation_probe(&|x| phi(x) * phi(x), &phi, m.log_t_max(), &DELTA3_K);
    r.checks.insert("function_probe".into(), probe);
    r
}

/// Δ₃ through `ω_M(s) <= ω̃_M(s²) <= ω_M(s^k)`, in the log variable
/// `φ(x) <= φ̃(2x) <= φ(kx)`. The upper inequality holds when
/// `φ̃(2x) / φ(kx)` stays bounded for some grid `k` (a bound `C >= 1` turns
/// into the inequality with `Ck` by convexity). The lower inequality is
/// checked outright for `x >= 1`. Quotient-level corroboration and a probe of
/// `t F(t) <= F(kt)` are reported next to it.
pub fn check_delta3(m: &WeightSequence) -> ConditionReport {
    let dom = m.log_t_max() * (1.0 - 1e-9);
    let mut r = ConditionReport::new(Condition::Delta3, Route::SequenceCriterion, (0.0, dom));
    let mut tested = false;
    let mut undetermined = false;
    let mut first_fail = None;
    for k in DELTA3_K {
        let x_max = dom / k;
        let mut pos = Vec::new();
        let mut val = Vec::new();
        for x in linspace(0.0, x_max, POINTS + 1).into_iter().skip(1) {
            let rhs = phi_unchecked(m, k * x);
            if rhs <= 0.0 {
                continue;
            }
            let Ok(mid) = omega_tilde_log(m, 2.0 * x) else {
                break;
            };
            pos.push(x);
            val.push(mid / rhs);
        }
        match classify_profile(&pos, &val, PLATEAU_TOL) {
            Trend::Bounded { .. } => {
                let c = val.iter().cloned().fold(1.0, f64::max);
                r.verdict = Verdict::Holds;
                r.witnesses.insert("k".into(), k);
                r.witnesses.insert("C".into(), c);
                r.witnesses.insert("x_max".into(), x_max);
                let tail = &val[val.len() / 2..];
                r.witnesses.insert(
                    "tail_ratio".into(),
                    tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                );
                r.probe_range = (pos[0], x_max);
                break;
            }
            Trend::Unbounded { witness } => {
                tested = true;
                first_fail.get_or_insert(Counterexample {
                    at: pos[witness],
                    residual: phi_unchecked(m, k * pos[witness])
                        - omega_tilde_log(m, 2.0 * pos[witness]).unwrap_or(f64::NAN),
                });
            }
            Trend::Undetermined => undetermined = true,
        }
    }
    if r.verdict != Verdict::Holds {
        r.verdict = fail_or_inconclusive(tested, undetermined);
        if r.verdict == Verdict::Fails {
            r.counterexample = first_fail;
        }
    }
    // lower inequality on x >= 1
    let lower = if dom / 2.0 > 1.0 {
        let ok = linspace(1.0, dom / 2.0, POINTS).into_iter().all(|x| {
            let (a, b) = (
                phi_unchecked(m, x),
                omega_tilde_log(m, 2.0 * x).unwrap_or(f64::NAN),
            );
            a <= b + 1e-9 * b.abs().max(1.0)
        });
        Verdict::from_bool(ok)
    } else {
        Verdict::Inconclusive
    };
    r.checks.insert("lower_inequality".into(), lower);
    r.checks
        .insert("quotient_necessary".into(), delta3_quotient(m, false));
    r.checks
        .insert("quotient_sufficient".into(), delta3_quotient(m, true));
    let phi = |x: f64| phi_unchecked(m, x);
    let probe = dilation_probe(&|x| x * phi(x), &phi, m.log_t_max(), &DELTA3_K);
    r.checks.insert("function_probe".into(), probe);
    r
}

/// `μ_j^k >= μ_{⌈j log μ_j⌉}` (necessary) or `μ_j^k >= μ_{⌈j log μ_{j+1}⌉}`
/// (sufficient) for large `j`: bounded `log μ_i / log μ_j`.
fn delta3_quotient(m: &WeightSequence, sufficient: bool) -> Verdict {
    let h = m.horizon();
    let mut pos = Vec::new();
    let mut val = Vec::new();
    for j in 1..h {
        let lj = m.log_quotient(j);
        if lj <= 0.0 {
            continue;
        }
        let e = if sufficient {
            m.log_quotient(j + 1)
        } else {
            lj
        };
        let i = (j as f64 * e).ceil().max(1.0);
        if i > h as f64 {
            break;
        }
        pos.push(j as f64);
        val.push(m.log_quotient(i as usize) / lj);
    }
    classify_profile(&pos, &val, PLATEAU_TOL).verdict()
}

/// Δ′ in the log variable, `φ(ab) <= k φ(a) φ(b)` for `a, b` in
/// `[x0, √dom]`: for each `a` the largest ratio over `b` must stay bounded.
/// Also reports the (Δ′_f) probe on `u ↦ Σ_M(u^t) / Σ_M(u)`.
pub fn check_delta_prime(m: &WeightSequence) -> ConditionReport {
    let dom = m.log_t_max() * (1.0 - 1e-9);
    let x0 = 2.0 * m.log_quotient(1).max(0.5);
    let x_max = dom.sqrt();
    let mut r = ConditionReport::new(Condition::DeltaPrime, Route::FunctionProbe, (x0, x_max));
    if x_max > x0 {
        let n = 80;
        let grid = linspace(x0, x_max, n);
        let rows: Vec<f64> = grid
            .iter()
            .map(|&a| {
                grid.iter()
                    .map(|&b| phi_unchecked(m, a * b) / (phi_unchecked(m, a) * phi_unchecked(m, b)))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        match classify_profile(&index_positions(n), &rows, PLATEAU_TOL) {
            Trend::Bounded { sup, .. } => {
                r.verdict = Verdict::Holds;
                r.witnesses.insert("k".into(), sup * HEADROOM);
                r.witnesses.insert("x0".into(), x0);
                r.witnesses.insert("x_max".into(), x_max);
            }
            Trend::Unbounded { witness } => {
                r.verdict = Verdict::Fails;
                r.counterexample = Some(Counterexample {
                    at: grid[witness],
                    residual: rows[witness],
                });
            }
            Trend::Undetermined => {}
        }
    }
    let (vf, first) = delta_prime_f(m);
    r.checks.insert("delta_prime_f".into(), vf);
    if let Some((t, u)) = first {
        r.witnesses.insert("increase_t".into(), t);
        r.witnesses.insert("increase_log_u".into(), u);
    }
    r
}

/// (Δ′_f) for `Σ_M∘exp`: for fixed `t`, `y ↦ Σ_M(e^{ty}) / Σ_M(e^y)` must
/// not increase for large `y`. The ratio can only move where `e^{ty}` hits a
/// quotient, so every such event in the second half of the window is
/// compared with a point just before it. Fails when every tested `t` shows
/// an increase there; the first increase is returned as `(t, log u)`.
pub fn delta_prime_f(m: &WeightSequence) -> (Verdict, Option<(f64, f64)>) {
    let dom = m.log_t_max();
    let y0 = m.log_quotient(1);
    let mut all_increase = true;
    let mut none_increase = true;
    let mut first = None;
    for t in DELTA_PRIME_T {
        let y_max = dom / t;
        if y_max <= y0 {
            return (Verdict::Inconclusive, None);
        }
        let y_mid = y0 + 0.5 * (y_max - y0);
        let h = |y: f64| -> Option<f64> {
            let lo = counting_log(m, y).ok()? as f64;
            let hi = counting_log(m, t * y).ok()? as f64;
            (lo > 0.0).then_some(hi / lo)
        };
        let mut found = None;
        for k in 1..=m.horizon() {
            let y = m.log_quotient(k) / t;
            if y <= y_mid || y >= y_max {
                continue;
            }
            let eps = 1e-9 * y.max(1.0);
            if counting_log(m, y - eps).ok() != counting_log(m, y).ok() {
                continue;
            }
            if let (Some(a), Some(b)) = (h(y - eps), h(y)) {
                if b > a {
                    found = Some(y);
                    break;
                }
            }
        }
        match found {
            Some(y) => {
                none_increase = false;
                first.get_or_insert((t, y));
            }
            None => all_increase = false,
        }
    }
    let v = if all_increase {
        Verdict::Fails
    } else if none_increase {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    (v, first)
}

/// Moderate growth as a report.
pub fn check_mg(m: &WeightSequence) -> ConditionReport {
    let ev = has_mg(m);
    let mut r = ConditionReport::new(
        Condition::Mg,
        Route::SequenceCriterion,
        (1.0, ev.tested_up_to as f64),
    );
    r.verdict = ev.verdict;
    if let Some(b) = ev.b {
        r.witnesses.insert("B".into(), b);
    }
    if let Some(j) = ev.counterexample_index {
        let lm = m.log_m_all();
        r.counterexample = Some(Counterexample {
            at: j as f64,
            residual: (lm[2 * j] - 2.0 * lm[j]) / j as f64,
        });
    }
    r
}

pub fn check(m: &WeightSequence, condition: Condition) -> ConditionReport {
    match condition {
        Condition::Mg => check_mg(m),
        Condition::Delta2 => check_delta2(m),
        Condition::Nabla2 => check_nabla2(m),
        Condition::DeltaSquare => check_delta_square(m),
        Condition::Delta3 => check_delta3(m),
        Condition::DeltaPrime => check_delta_prime(m),
    }
}

/// Horizon used for the index-squared criterion of Δ².
pub const DELTA_SQUARE_HORIZON: usize = 1024;

/// All conditions for a named family: `horizon` for everything except Δ²,
/// which uses [`DELTA_SQUARE_HORIZON`] when that is larger.
pub fn check_family(family: &Family, horizon: usize) -> Result<Vec<ConditionReport>> {
    let m = make_sequence(family, horizon)?;
    let big = make_sequence(family, horizon.max(DELTA_SQUARE_HORIZON))?;
    Ok(Condition::ALL
        .iter()
        .map(|&c| {
            if c == Condition::DeltaSquare {
                check(&big, c)
            } else {
                check(&m, c)
            }
        })
        .collect())
}

/// Implications between the conditions: `(premise, conclusion)`.
pub const IMPLICATIONS: [(Condition, Condition); 3] = [
    (Condition::DeltaSquare, Condition::Delta3),
    (Condition::Delta3, Condition::Nabla2),
    (Condition::DeltaPrime, Condition::Delta2),
];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    /// implications checked with both sides decided
    pub checked: usize,
    /// `premise => conclusion` pairs with premise Holds and conclusion Fails
    pub violations: Vec<String>,
    /// conditions left out because their verdict is inconclusive
    pub inconclusive: Vec<Condition>,
}

impl Audit {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: Audit) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
        self.inconclusive.extend(other.inconclusive);
    }
}

/// Check the implications on the reports of one sequence. The five
/// conditions Δ₂, ∇₂, Δ², Δ₃, Δ′ must all be present.
pub fn implication_audit(reports: &[ConditionReport]) -> Result<Audit> {
    let get = |c: Condition| reports.iter().find(|r| r.condition == c);
    let missing: Vec<&str> = Condition::ALL[1..]
        .iter()
        .filter(|&&c| get(c).is_none())
        .map(|c| c.name())
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteReports(missing.join(", ")));
    }
    let mut audit = Audit::default();
    for &c in &Condition::ALL[1..] {
        if get(c).unwrap().verdict == Verdict::Inconclusive {
            audit.inconclusive.push(c);
        }
    }
    for (p, q) in IMPLICATIONS {
        let (vp, vq) = (get(p).unwrap().verdict, get(q).unwrap().verdict);
        if vp == Verdict::Inconclusive || vq == Verdict::Inconclusive {
            continue;
        }
        audit.checked += 1;
        if vp == Verdict::Holds && vq == Verdict::Fails {
            audit.violations.push(format!("{p} => {q}"));
        }
    }
    Ok(audit)
}

/// Explicit LC sequence with `log μ_j = s log j + c (j-1)^α log 2`.
pub fn mixed_sequence(s: f64, c: f64, alpha: f64, horizon: usize) -> Result<WeightSequence> {
    if !(s >= 0.0 && c >= 0.0 && alpha > 0.0 && s + c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mixed sequence needs s, c >= 0, s + c > 0, alpha > 0 (got {s}, {c}, {alpha})"
        )));
    }
    let lq: Vec<f64> = (1..=horizon)
        .map(|j| s * (j as f64).ln() + c * ((j - 1) as f64).powf(alpha) * std::f64::consts::LN_2)
        .collect();
    WeightSequence::explicit(&lq)
}

/// Built-in families with their expected verdicts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub family: Family,
    /// expected verdicts; `None` where no expectation is recorded
    pub expected: BTreeMap<String, Verdict>,
}

pub fn family_rows() -> Vec<FamilyRow> {
    use Verdict::{Fails as F, Holds as H};
    let mut rows = Vec::new();
    for s in [0.5, 1.0, 2.0] {
        rows.push(FamilyRow {
            family: Family::Gevrey { s },
            expected: [
                ("mg", H),
                ("delta2", F),
                ("nabla2", H),
                ("deltasq", H),
                ("delta3", H),
                ("delta_prime_f", F),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        });
    }
    for q in [2.0, 3.0] {
        rows.push(FamilyRow {
            family: Family::QGevrey { q, n: 2.0 },
            expected: [
                ("mg", F),
                ("delta2", H),
                ("nabla2", H),
                ("deltasq", F),
                ("delta3", F),
                ("deltaprime", H),
                ("delta_prime_f", F),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        });
    }
    rows
}

/// Observed verdicts keyed like [`FamilyRow::expected`].
pub fn observed_verdicts(reports: &[ConditionReport]) -> BTreeMap<String, Verdict> {
    let mut out = BTreeMap::new();
    for r in reports {
        out.insert(r.condition.name().to_string(), r.verdict);
        if let Some(&v) = r.checks.get("delta_prime_f") {
            out.insert("delta_prime_f".into(), v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: f64) -> WeightSequence {
        WeightSequence::gevrey(s, 256).unwrap()
    }

    fn q(q: f64) -> WeightSequence {
        WeightSequence::qgevrey(q, 2.0, 256).unwrap()
    }

    #[test]
    fn delta2_examples() {
        let r = check_delta2(&q(2.0));
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
        assert_eq!(r.witnesses["k"], 2.0);
        assert_eq!(r.witnesses["A"], 1.0);
        assert_eq!(r.witnesses["B"], 1.0);
        assert_eq!(r.replay(&q(2.0)), Some(true));
        let r = check_delta2(&g(1.0));
        assert_eq!(r.verdict, Verdict::Fails, "{r:?}");
        assert!(r.counterexample.is_some());
        let short = WeightSequence::explicit(&[0.0, 0.1, 0.2, 0.4, 0.5, 0.7, 0.9, 1.0]).unwrap();
        assert_eq!(check_delta2(&short).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn nabla2_examples() {
        let r = check_nabla2(&g(1.0));
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.replay(&g(1.0)), Some(true));
        let r = check_nabla2(&q(2.0));
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.witnesses["l"], 2.0);
        assert_eq!(r.witnesses["A"], 1.0);
        let eps = 1e-3;
        let slow: Vec<f64> = (1..=8).map(|j| (1.0 + j as f64 * eps).ln()).collect();
        let slow = WeightSequence::explicit(&slow).unwrap();
        assert_eq!(check_nabla2(&slow).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn delta_square_examples() {
        for s in [0.5, 1.0, 2.0] {
            let m = WeightSequence::gevrey(s, 1024).unwrap();
            let r = check_delta_square(&m);
            assert_eq!(r.verdict, Verdict::Holds);
            assert_eq!(r.witnesses["A"], 2.0);
            assert_eq!(r.replay(&m), Some(true));
        }
        let m = WeightSequence::qgevrey(2.0, 2.0, 1024).unwrap();
        let r = check_delta_square(&m);
        assert_eq!(r.verdict, Verdict::Fails);
        let j = r.counterexample.unwrap().at as usize;
        assert!(m.log_quotient(j * j) > 32.0 * m.log_quotient(j));
        let g1 = WeightSequence::gevrey(1.0, 1024).unwrap();
        let r = check_delta_square(&g1.product(&g1).unwrap());
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn delta3_examples() {
        let r = check_delta3(&g(1.0));
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
        assert_eq!(r.replay(&g(1.0)), Some(true));
        assert_eq!(r.checks["lower_inequality"], Verdict::Holds);
        let r = check_delta3(&q(2.0));
        assert_eq!(r.verdict, Verdict::Fails, "{r:?}");
    }

    #[test]
    fn delta_prime_examples() {
        let r = check_delta_prime(&q(2.0));
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
        assert_eq!(r.checks["delta_prime_f"], Verdict::Fails);
        assert!(r.witnesses.contains_key("increase_t"));
        assert_eq!(r.replay(&q(2.0)), Some(true));
        let r = check_delta_prime(&g(1.0));
        assert_eq!(r.checks["delta_prime_f"], Verdict::Fails);
    }

    #[test]
    fn family_matrix() {
        for row in family_rows() {
            let reports = check_family(&row.family, 256).unwrap();
            let obs = observed_verdicts(&reports);
            for (k, v) in &row.expected {
                assert_eq!(obs[k], *v, "{} {k}: {:?}", row.family, reports);
            }
            for r in &reports {
                if let Some(v) = r.checks.get("function_probe") {
                    if *v != Verdict::Inconclusive && r.verdict != Verdict::Inconclusive {
                        assert_eq!(*v, r.verdict, "{} {}", row.family, r.condition);
                    }
                }
            }
            assert!(implication_audit(&reports).unwrap().passes());
        }
    }

    #[test]
    fn audit_flags_contradictions() {
        let mut reports: Vec<ConditionReport> = Condition::ALL[1..]
            .iter()
            .map(|&c| {
                let mut r = ConditionReport::new(c, Route::AnalyticFamily, (0.0, 0.0));
                r.verdict = Verdict::Holds;
                r
            })
            .collect();
        assert!(implication_audit(&reports).unwrap().passes());
        reports[3].verdict = Verdict::Fails; // Δ₃
        let a = implication_audit(&reports).unwrap();
        assert_eq!(a.violations, vec!["deltasq => delta3".to_string()]);
        reports.pop();
        assert!(matches!(
            implication_audit(&reports),
            Err(Error::IncompleteReports(_))
        ));
    }
}
