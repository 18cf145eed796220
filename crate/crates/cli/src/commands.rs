use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use orlicz_core::associated::{counting, omega, omega_tilde, phi};
use orlicz_core::conjugation::{complementary, conjugate_value, ConjugateRoute};
use orlicz_core::dual::{dual, sandwich_check, sigma_dual};
use orlicz_core::evidence::linspace;
use orlicz_core::growth::{
    check, family_rows, implication_audit, mixed_sequence, observed_verdicts, Audit, Condition,
    ConditionReport, DELTA_SQUARE_HORIZON,
};
use orlicz_core::n_to_sequence::{
    associated_data, counting_sandwich, sandwich_suite, AbstractNFunction,
};
use orlicz_core::nfunction::{
    compare_counting, nfunction_of_sequence, relate_nfunctions, GrowthFunction, NRelation,
    ProbeConfig,
};
use orlicz_core::weight_sequences::make_sequence;
use orlicz_core::{SequenceSpec, WeightSequence};

use crate::output::{csv, json, num, table};
use crate::{Command, DualEmit, EvalFn, Failure, Format, NEmit, SeqArg};

type Out = Result<String, Failure>;

pub fn run(cmd: &Command) -> Out {
    match cmd {
        Command::Eval {
            func,
            seq,
            grid,
            out,
        } => eval(*func, seq, grid, *out),
        Command::Relate {
            lhs,
            rhs,
            horizon,
            relation,
            report,
        } => relate(lhs, rhs, *horizon, relation, *report),
        Command::Conjugate {
            seq,
            route,
            grid,
            out,
        } => conjugate(seq, route, grid, *out),
        Command::Dual {
            seq,
            emit,
            grid,
            points,
            out,
        } => dual_cmd(seq, *emit, grid.as_deref(), *points, *out),
        Command::FromNfunction {
            expr,
            horizon,
            emit,
            points,
        } => from_nfunction(expr, *horizon, *emit, *points),
        Command::Check {
            seq,
            conditions,
            out,
        } => check_cmd(seq, conditions.as_deref(), *out),
        Command::Audit {
            seq,
            random,
            seed,
            horizon,
            out,
        } => audit(seq, *random, *seed, *horizon, *out),
        Command::Families { horizon, out } => families(*horizon, *out),
    }
}

fn spec_of(text: &str) -> Result<SequenceSpec, Failure> {
    match text.strip_prefix('@') {
        Some(path) => {
            let body = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            Ok(SequenceSpec::from_json(&body)?)
        }
        None => Ok(SequenceSpec::parse(text)?),
    }
}

fn load(text: &str, horizon: usize) -> Result<WeightSequence, Failure> {
    Ok(spec_of(text)?.build(horizon)?)
}

/// `start:end:step` with the end included when it lies on the grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Failure::Usage(format!("grid must be start:end:step, got '{text}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (a, b, step) = (v[0], v[1], v[2]);
    if !(a.is_finite() && b.is_finite() && step > 0.0 && b >= a) {
        return Err(bad());
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(Failure::Usage(format!("grid '{text}' has too many points")));
    }
    Ok((0..=n).map(|i| a + i as f64 * step).collect())
}

/// Rows of numbers rendered as CSV, a table or a JSON array of objects.
fn tabular(header: &[&str], rows: &[Vec<f64>], format: Format) -> Out {
    match format {
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut m = Map::new();
                    for (h, x) in header.iter().zip(r) {
                        m.insert(h.to_string(), json!(x));
                    }
                    Value::Object(m)
                })
                .collect();
            Ok(json(&Value::Array(arr)))
        }
        Format::Csv | Format::Table => {
            let text: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.iter().map(|&x| num(x)).collect())
                .collect();
            if format == Format::Csv {
                csv(header, &text)
            } else {
                Ok(table(header, &text))
            }
        }
    }
}

fn eval(func: EvalFn, seq: &SeqArg, grid: &str, out: Format) -> Out {
    let m = load(&seq.seq, seq.horizon)?;
    let mut rows = Vec::new();
    for t in parse_grid(grid)? {
        let v = match func {
            EvalFn::Sigma => counting(&m, t)? as f64,
            EvalFn::Omega => omega(&m, t)?,
            EvalFn::Phi => phi(&m, t)?,
            EvalFn::OmegaTilde => omega_tilde(&m, t)?,
        };
        rows.push(vec![t, v]);
    }
    tabular(&["t", "value"], &rows, out)
}

fn relate(lhs: &str, rhs: &str, horizon: usize, relation: &str, report: Format) -> Out {
    let m = load(lhs, horizon)?;
    let l = load(rhs, horizon)?;
    let relation = NRelation::parse(relation)?;
    let probe = ProbeConfig::default();
    let fm = nfunction_of_sequence(&m)?.nfunction;
    let fl = nfunction_of_sequence(&l)?.nfunction;
    let ev = relate_nfunctions(&fm, &fl, relation, &probe);
    let mut v = json!({
        "lhs": m.label(),
        "rhs": l.label(),
        "relation": ev.relation,
        "verdict": ev.verdict,
        "witness": ev.witness,
        "counterexample_t": ev.counterexample_t,
        "probe": {
            "points": probe.points,
            "points_used": ev.probe_points,
            "lhs_domain": fm.domain_max(),
            "rhs_domain": fl.domain_max(),
        },
    });
    if relation == NRelation::PreceqC {
        v["routes"] = serde_json::to_value(compare_counting(&m, &l, &probe)?).expect("serializes");
    }
    match report {
        Format::Json => Ok(json(&v)),
        _ => Ok(table(
            &["lhs", "rhs", "relation", "verdict"],
            &[vec![
                m.label(),
                l.label(),
                format!("{:?}", ev.relation),
                format!("{:?}", ev.verdict),
            ]],
        )),
    }
}

fn conjugate(seq: &SeqArg, route: &str, grid: &str, out: Format) -> Out {
    let m = load(&seq.seq, seq.horizon)?;
    let route = ConjugateRoute::parse(route)?;
    let pair = complementary(&nfunction_of_sequence(&m)?.nfunction)?;
    let mut rows = Vec::new();
    for s in parse_grid(grid)? {
        rows.push(vec![s, conjugate_value(route, &m, &pair, s)?]);
    }
    tabular(&["s", "value"], &rows, out)
}

fn dual_cmd(seq: &SeqArg, emit: DualEmit, grid: Option<&str>, points: usize, out: Format) -> Out {
    let m = load(&seq.seq, seq.horizon)?;
    let d = dual(&m)?;
    match emit {
        DualEmit::Quotients => {
            if out == Format::Json {
                return Ok(json(
                    &serde_json::to_value(d.dual.to_spec()).expect("serializes"),
                ));
            }
            let rows: Vec<Vec<f64>> = (1..=d.dual.horizon())
                .map(|j| vec![j as f64, d.dual.quotient(j), d.dual.log_quotient(j)])
                .collect();
            tabular(&["j", "delta", "log_delta"], &rows, out)
        }
        DualEmit::Sigma => {
            let grid = grid.ok_or_else(|| Failure::Usage("--emit sigma needs --grid".into()))?;
            let mut rows = Vec::new();
            for t in parse_grid(grid)? {
                rows.push(vec![t, sigma_dual(&d, t)? as f64]);
            }
            tabular(&["t", "sigma_dual"], &rows, out)
        }
        DualEmit::Sandwich => {
            if points < 2 {
                return Err(Failure::Usage("--points must be at least 2".into()));
            }
            let r = sandwich_check(&d, points)?;
            if out == Format::Json {
                let mut v = serde_json::to_value(&r).expect("serializes");
                v["holds"] = json!(r.holds());
                v["d_threshold"] = json!(d.d_threshold);
                return Ok(json(&v));
            }
            Ok(format!(
                "sequence: {}\ndual horizon: {}\nd: {}\npoints: {}\nrange: [{}, {}]\ngap min: {}\ngap max: {}\nGamma <= log Sigma_D everywhere: {}\ngap <= 1 everywhere: {}\n",
                m.label(),
                d.dual.horizon(),
                d.d_threshold,
                r.points,
                num(r.t_min),
                num(r.t_max),
                num(r.min_gap),
                num(r.max_gap),
                r.lower_violations == 0,
                r.upper_violations == 0,
            ))
        }
    }
}

fn from_nfunction(expr: &str, horizon: usize, emit: NEmit, points: usize) -> Out {
    let g = AbstractNFunction::parse(expr)?;
    let (m, trace) = associated_data(&g, horizon, expr)?;
    match emit {
        NEmit::Sequence => Ok(json(
            &serde_json::to_value(m.to_spec()).expect("serializes"),
        )),
        NEmit::Trace => {
            let rows: Vec<Vec<f64>> = (0..=trace.horizon())
                .map(|j| vec![j as f64, m.log_m(j), trace.log_t[j], trace.t_points[j]])
                .collect();
            if !trace.interleaving_violations.is_empty() {
                eprintln!(
                    "warning: interleaving fails at {:?}",
                    trace.interleaving_violations
                );
            }
            tabular(&["j", "log_m", "log_t", "t"], &rows, Format::Csv)
        }
        NEmit::Sandwich => {
            if points < 8 {
                return Err(Failure::Usage("--points must be at least 8".into()));
            }
            let suite = sandwich_suite(&g, &m, points)?;
            let xs = linspace(
                0.0,
                trace.log_bound().min(m.log_t_max()) * (1.0 - 1e-9),
                points,
            );
            let counting = counting_sandwich(&m, &trace, &xs)?;
            let mut v = json!({
                "expr": g.source(),
                "horizon": horizon,
                "functions": serde_json::to_value(&suite).expect("serializes"),
                "counting": serde_json::to_value(&counting).expect("serializes"),
                "interleaving_violations": trace.interleaving_violations,
            });
            v["holds"] = json!(
                suite.holds() && counting.holds() && trace.interleaving_violations.is_empty()
            );
            Ok(json(&v))
        }
    }
}

fn parse_conditions(text: Option<&str>) -> Result<Vec<Condition>, Failure> {
    match text {
        None => Ok(Condition::ALL.to_vec()),
        Some(t) => {
            let mut out = Vec::new();
            for c in t.split(',').filter(|s| !s.trim().is_empty()) {
                let c = Condition::parse(c)?;
                if !out.contains(&c) {
                    out.push(c);
                }
            }
            if out.is_empty() {
                return Err(Failure::Usage("no conditions given".into()));
            }
            Ok(out)
        }
    }
}

/// Reports for `conditions`; Δ² uses the longer horizon when the sequence is a
/// named family without a fixed horizon.
fn reports_for(
    spec: &SequenceSpec,
    horizon: usize,
    conditions: &[Condition],
) -> Result<Vec<ConditionReport>, Failure> {
    let m = spec.build(horizon)?;
    let big =
        if spec.family != "explicit" && spec.horizon.is_none() && horizon < DELTA_SQUARE_HORIZON {
            Some(spec.build(DELTA_SQUARE_HORIZON)?)
        } else {
            None
        };
    Ok(conditions
        .iter()
        .map(|&c| match (&big, c) {
            (Some(b), Condition::DeltaSquare) => check(b, c),
            _ => check(&m, c),
        })
        .collect())
}

fn short_map<T: std::fmt::Display>(m: impl IntoIterator<Item = (String, T)>) -> String {
    m.into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn check_cmd(seq: &SeqArg, conditions: Option<&str>, out: Format) -> Out {
    let spec = spec_of(&seq.seq)?;
    let conditions = parse_conditions(conditions)?;
    let reports = reports_for(&spec, seq.horizon, &conditions)?;
    match out {
        Format::Json => Ok(json(&serde_json::to_value(&reports).expect("serializes"))),
        _ => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.condition.name().to_string(),
                        r.verdict.short().to_string(),
                        format!("{:?}", r.route),
                        short_map(r.witnesses.iter().map(|(k, v)| (k.clone(), num(*v)))),
                        short_map(r.checks.iter().map(|(k, v)| (k.clone(), v.short()))),
                    ]
                })
                .collect();
            let header = ["condition", "verdict", "route", "witnesses", "checks"];
            if out == Format::Csv {
                csv(&header, &rows)
            } else {
                Ok(table(&header, &rows))
            }
        }
    }
}

fn audit(seqs: &[String], random: usize, seed: u64, horizon: usize, out: Format) -> Out {
    let mut entries: Vec<(String, Vec<ConditionReport>)> = Vec::new();
    for row in family_rows() {
        let m = make_sequence(&row.family, horizon)?;
        let big = make_sequence(&row.family, horizon.max(DELTA_SQUARE_HORIZON))?;
        entries.push((m.label(), all_reports(&m, &big)));
    }
    for s in seqs {
        let spec = spec_of(s)?;
        let reports = reports_for(&spec, horizon, &Condition::ALL)?;
        entries.push((spec.build(horizon)?.label(), reports));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut made = 0;
    while made < random {
        let s = rng.gen_range(0.0..3.0);
        let c = if rng.gen_bool(0.5) {
            rng.gen_range(0.0..2.0)
        } else {
            0.0
        };
        let alpha = rng.gen_range(0.3..1.5);
        let Ok(big) = mixed_sequence(s, c, alpha, horizon.max(DELTA_SQUARE_HORIZON)) else {
            continue;
        };
        let m = big.truncate(horizon)?;
        entries.push((
            format!("mixed{{s={s},c={c},alpha={alpha}}}"),
            all_reports(&m, &big),
        ));
        made += 1;
    }
    let mut total = Audit::default();
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for (label, reports) in &entries {
        let a = implication_audit(reports)?;
        let verdicts: String = Condition::ALL[1..]
            .iter()
            .map(|c| {
                reports
                    .iter()
                    .find(|r| r.condition == *c)
                    .map_or("-", |r| r.verdict.short())
            })
            .collect();
        rows.push(vec![
            label.clone(),
            verdicts.clone(),
            a.checked.to_string(),
            a.violations.join(" "),
            a.inconclusive
                .iter()
                .map(|c| c.name())
                .collect::<Vec<_>>()
                .join(" "),
        ]);
        items.push(json!({
            "sequence": label,
            "verdicts": observed_verdicts(reports),
            "audit": a,
        }));
        total.merge(a);
    }
    let passes = total.passes();
    let text = match out {
        Format::Json => json(&json!({ "sequences": items, "total": total, "passes": passes })),
        _ => {
            let header = [
                "sequence",
                "verdicts",
                "checked",
                "violations",
                "inconclusive",
            ];
            let body = if out == Format::Csv {
                csv(&header, &rows)?
            } else {
                table(&header, &rows)
            };
            if out == Format::Csv {
                body
            } else {
                format!(
                    "{body}\nverdict order: delta2 nabla2 deltasq delta3 deltaprime\nsequences: {}\nimplications checked: {}\nviolations: {}\ninconclusive verdicts excluded: {}\n",
                    entries.len(),
                    total.checked,
                    total.violations.len(),
                    total.inconclusive.len()
                )
            }
        }
    };
    if passes {
        Ok(text)
    } else {
        print!("{text}");
        Err(Failure::AuditViolation)
    }
}

fn all_reports(m: &WeightSequence, big: &WeightSequence) -> Vec<ConditionReport> {
    Condition::ALL
        .iter()
        .map(|&c| {
            if c == Condition::DeltaSquare {
                check(big, c)
            } else {
                check(m, c)
            }
        })
        .collect()
}

fn families(horizon: usize, out: Format) -> Out {
    let keys = [
        "mg",
        "delta2",
        "nabla2",
        "deltasq",
        "delta3",
        "deltaprime",
        "delta_prime_f",
    ];
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for row in family_rows() {
        let m = make_sequence(&row.family, horizon)?;
        let big = make_sequence(&row.family, horizon.max(DELTA_SQUARE_HORIZON))?;
        let obs = observed_verdicts(&all_reports(&m, &big));
        let matches = row.expected.iter().all(|(k, v)| obs.get(k) == Some(v));
        let mut cells = vec![row.family.to_string()];
        for k in keys {
            let o = obs.get(k).map_or("-", |v| v.short());
            cells.push(match row.expected.get(k) {
                Some(e) if Some(e) != obs.get(k) => format!("{o}(exp {})", e.short()),
                _ => o.to_string(),
            });
        }
        cells.push(
            row.expected
                .iter()
                .map(|(k, v)| format!("{k}={}", v.short()))
                .collect::<Vec<_>>()
                .join(" "),
        );
        cells.push(matches.to_string());
        rows.push(cells);
        items.push(json!({
            "family": row.family,
            "label": row.family.to_string(),
            "observed": obs,
            "expected": row.expected,
            "matches": matches,
        }));
    }
    let mut header = vec!["family"];
    header.extend(keys);
    header.extend(["expected", "matches"]);
    match out {
        Format::Json => Ok(json(&Value::Array(items))),
        Format::Csv => csv(&header, &rows),
        Format::Table => Ok(table(&header, &rows)),
    }
}
