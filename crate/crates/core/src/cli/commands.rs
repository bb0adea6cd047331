use std::f64::consts::FRAC_PI_6;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::{Cell, CliError, Format, Report, ResultRecord, SweepConfig, Table};
use crate::approx::{
    covariance_distance_from_x, covariant_set, multi_copy_approx, optimal_convex_approx,
    pauli_distance_damping, ApproxResult,
};
use crate::channels::{damping, pauli_maps, unitary_qubit, ChannelSpec};
use crate::diamond::{diamond_sdp, discrimination_probability};

/// Agreement required between the closed-form and SDP covariant distances.
const FIG1_AGREEMENT: f64 = 1e-5;

fn load(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Parse(format!("cannot read {arg}: {e}")))
    }
}

/// A channel spec given inline or as a file path.
pub fn read_spec(arg: &str) -> Result<ChannelSpec, CliError> {
    Ok(ChannelSpec::parse(&load(arg)?)?)
}

/// Channel specs, each argument a single spec or a JSON array of specs.
pub fn read_spec_list(args: &[String]) -> Result<Vec<ChannelSpec>, CliError> {
    let mut out = Vec::new();
    for a in args {
        let text = load(a)?;
        if text.trim_start().starts_with('[') {
            let list: Vec<ChannelSpec> = serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            out.extend(list);
        } else {
            out.push(ChannelSpec::parse(&text)?);
        }
    }
    Ok(out)
}

fn check_gap(gap: f64, tol: f64, what: &str) -> Result<(), CliError> {
    if gap > tol {
        Err(CliError::Solver(format!("{what}: certificate gap {gap:.3e} exceeds tolerance {tol:.1e}")))
    } else {
        Ok(())
    }
}

fn map_points<T, R, F>(items: Vec<T>, parallel: bool, f: F) -> Result<Vec<R>, CliError>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R, CliError> + Sync + Send,
{
    if parallel {
        items.into_par_iter().map(f).collect()
    } else {
        items.into_iter().map(f).collect()
    }
}

fn grid_points(cfg: &SweepConfig) -> Vec<(f64, f64)> {
    let (a, b) = (cfg.axes[0].points(), cfg.axes[1].points());
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

fn approx_record(command: &str, inputs: serde_json::Value, r: &ApproxResult, started: Instant) -> ResultRecord {
    let mut rec = ResultRecord::new(command, inputs, r.distance, r.witness.gap);
    rec.weights = Some(r.weights.as_slice().to_vec());
    rec.bounds.insert("lower_bound_choi".into(), r.lower_bound_choi);
    rec.bounds.insert("upper_bound_single".into(), r.upper_bound_single);
    rec.quantities.insert("optimality_gap".into(), r.optimality_gap);
    rec.quantities.insert("iterations".into(), r.iterations as f64);
    rec.wall_time_s = started.elapsed().as_secs_f64();
    rec
}

pub fn cmd_diamond(a: &ChannelSpec, b: &ChannelSpec, tol: f64) -> Result<Report, CliError> {
    let started = Instant::now();
    let r = diamond_sdp(&a.build()?, &b.build()?, tol)?;
    check_gap(r.gap, tol, "diamond")?;
    let p = discrimination_probability(r.value)?;
    let mut rec = ResultRecord::new("diamond", json!({ "a": a, "b": b, "tol": tol }), r.value, r.gap);
    rec.bounds.insert("primal".into(), r.primal);
    rec.bounds.insert("dual".into(), r.dual);
    rec.quantities.insert("discrimination_probability".into(), p);
    rec.wall_time_s = started.elapsed().as_secs_f64();

    let mut table = Table::new(&["distance", "gap", "primal", "dual", "discrimination_probability"]);
    table.push(vec![r.value.into(), r.gap.into(), r.primal.into(), r.dual.into(), p.into()]);
    Ok(Report { records: vec![rec], table, default_format: Format::Json })
}

pub fn cmd_approx(target: &ChannelSpec, set: &[ChannelSpec], tol: f64) -> Result<Report, CliError> {
    let started = Instant::now();
    let channels = set.iter().map(ChannelSpec::build).collect::<crate::Result<Vec<_>>>()?;
    let r = optimal_convex_approx(&target.build()?, &channels, tol)?;
    check_gap(r.witness.gap, tol, "approx")?;
    if r.lower_bound_choi > r.distance + tol || r.distance > r.upper_bound_single + tol {
        return Err(CliError::Invariant(format!(
            "bounds out of order: {} <= {} <= {}",
            r.lower_bound_choi, r.distance, r.upper_bound_single
        )));
    }
    let rec = approx_record("approx", json!({ "target": target, "set": set, "tol": tol }), &r, started);
    let mut table = Table::new(&["distance", "gap", "lower_bound_choi", "upper_bound_single", "optimality_gap", "weights"]);
    table.push(vec![
        r.distance.into(),
        r.witness.gap.into(),
        r.lower_bound_choi.into(),
        r.upper_bound_single.into(),
        r.optimality_gap.into(),
        Cell::Text(super::join_numbers(r.weights.as_slice())),
    ]);
    Ok(Report { records: vec![rec], table, default_format: Format::Json })
}

/// `x ∈ [0, 2]`: closed-form covariant distance against the optimum over
/// `{I, C₁}` for `U(0, asin(x/2), 0)`, whose identity distance is `x`.
pub fn cmd_fig1(cfg: &SweepConfig) -> Result<Report, CliError> {
    let tol = cfg.tol;
    let set = covariant_set();
    let rows = map_points(cfg.axes[0].points(), cfg.parallel, |x| {
        let started = Instant::now();
        let (analytic, p_opt) = covariance_distance_from_x(x)?;
        let u = unitary_qubit(0.0, (0.5 * x).clamp(-1.0, 1.0).asin(), 0.0)?;
        let r = optimal_convex_approx(&u, &set, tol)?;
        check_gap(r.witness.gap, tol, &format!("fig1 x={x}"))?;
        if (analytic - r.distance).abs() > FIG1_AGREEMENT {
            return Err(CliError::Invariant(format!(
                "fig1 x={x}: closed form {analytic} vs SDP {}",
                r.distance
            )));
        }
        let mut rec = approx_record("fig1", json!({ "x": x, "tol": tol }), &r, started);
        rec.bounds.insert("analytic".into(), analytic);
        rec.quantities.insert("p_opt".into(), p_opt);
        let row = vec![x, analytic, p_opt, r.distance, r.weights[1], r.witness.gap];
        Ok((row, rec))
    })?;
    let header = ["x", "D_C_analytic", "p_opt", "D_C_sdp", "p_sdp", "gap"];
    Ok(assemble(&header, rows, Format::Csv))
}

/// Pauli distance of `U(α, β, δ)` over `α, β ∈ [0, π/2]` at fixed `δ`.
pub fn cmd_fig2(cfg: &SweepConfig, delta: f64) -> Result<Report, CliError> {
    let tol = cfg.tol;
    let set = pauli_maps();
    let rows = map_points(grid_points(cfg), cfg.parallel, |(alpha, beta)| {
        let started = Instant::now();
        let r = optimal_convex_approx(&unitary_qubit(alpha, beta, delta)?, &set, tol)?;
        check_gap(r.witness.gap, tol, &format!("fig2 alpha={alpha} beta={beta}"))?;
        let rec = approx_record("fig2", json!({ "alpha": alpha, "beta": beta, "delta": delta, "tol": tol }), &r, started);
        let w = r.weights.as_slice();
        Ok((vec![alpha, beta, r.distance, r.witness.gap, w[0], w[1], w[2], w[3]], rec))
    })?;
    let header = ["alpha", "beta", "D_P", "gap", "p0", "p1", "p2", "p3"];
    Ok(assemble(&header, rows, Format::Csv))
}

fn bracket_check(what: &str, lower: f64, d: f64, upper: f64, tol: f64) -> Result<(), CliError> {
    if d < lower - 2.0 * tol || d > upper + 2.0 * tol {
        Err(CliError::Invariant(format!("{what}: {d} outside [{lower}, {upper}]")))
    } else {
        Ok(())
    }
}

fn damping_row(q: f64, gamma: f64, tol: f64, command: &str) -> Result<(f64, f64, f64, f64, ResultRecord), CliError> {
    let started = Instant::now();
    let r = pauli_distance_damping(q, gamma, tol)?;
    let what = format!("{command} q={q} gamma={gamma}");
    check_gap(r.approx.witness.gap, tol, &what)?;
    bracket_check(&what, r.lower, r.approx.distance, r.upper, tol)?;
    let mut rec = approx_record(command, json!({ "q": q, "gamma": gamma, "tol": tol }), &r.approx, started);
    rec.bounds.insert("lower".into(), r.lower);
    rec.bounds.insert("upper".into(), r.upper);
    rec.quantities.insert("form_deviation".into(), r.form_deviation);
    Ok((r.approx.distance, r.lower, r.upper, r.approx.witness.gap, rec))
}

/// Pauli distance of `Γ(q, γ)` over `q, γ ∈ [0, 1]`.
pub fn cmd_fig3(cfg: &SweepConfig) -> Result<Report, CliError> {
    let tol = cfg.tol;
    let rows = map_points(grid_points(cfg), cfg.parallel, |(q, gamma)| {
        let (d, lower, upper, gap, rec) = damping_row(q, gamma, tol, "fig3")?;
        Ok((vec![q, gamma, d, lower, upper, gap], rec))
    })?;
    Ok(assemble(&["q", "gamma", "D_P", "lower", "upper", "gap"], rows, Format::Csv))
}

/// Pauli distance of `Γ(q, γ)` and its analytic bracket over `γ ∈ [0, 1]`.
pub fn cmd_fig4(cfg: &SweepConfig, q: f64) -> Result<Report, CliError> {
    let tol = cfg.tol;
    damping(q, 0.0)?;
    let rows = map_points(cfg.axes[0].points(), cfg.parallel, |gamma| {
        let (d, lower, upper, gap, rec) = damping_row(q, gamma, tol, "fig4")?;
        Ok((vec![gamma, d, lower, upper, gap], rec))
    })?;
    Ok(assemble(&["gamma", "D_P", "lower", "upper", "gap"], rows, Format::Csv))
}

fn assemble(header: &[&str], rows: Vec<(Vec<f64>, ResultRecord)>, default_format: Format) -> Report {
    let mut table = Table::new(header);
    let mut records = Vec::with_capacity(rows.len());
    for (row, rec) in rows {
        table.push(row.into_iter().map(Cell::Num).collect());
        records.push(rec);
    }
    Report { records, table, default_format }
}

/// Two copies of `U(0, π/6, 0)` approximated from `{I, Z}`.
pub fn cmd_twocopy(tol: f64) -> Result<Report, CliError> {
    let started = Instant::now();
    let target_spec = ChannelSpec::Unitary { alpha: 0.0, beta: FRAC_PI_6, delta: 0.0 };
    let set_specs = vec![
        ChannelSpec::Pauli { p: vec![1.0, 0.0, 0.0, 0.0] },
        ChannelSpec::Pauli { p: vec![0.0, 0.0, 0.0, 1.0] },
    ];
    let set = set_specs.iter().map(ChannelSpec::build).collect::<crate::Result<Vec<_>>>()?;
    let m = multi_copy_approx(&target_spec.build()?, &set, 2, tol)?;
    let elapsed = started.elapsed().as_secs_f64();
    let inputs = json!({ "target": target_spec, "set": set_specs, "copies": 2, "tol": tol });

    let (a, b, c) = (m.correlated.distance, m.product.distance, m.single_tensored.value);
    if a > b + tol || b > c + tol {
        return Err(CliError::Invariant(format!("two-copy ordering violated: {a} <= {b} <= {c}")));
    }
    let entries: [(&str, f64, f64, Vec<f64>); 3] = [
        ("correlated", a, m.correlated.witness.gap, m.correlated.weights.as_slice().to_vec()),
        (
            "product",
            b,
            m.product.witness.gap,
            [m.product.first.as_slice(), m.product.second.as_slice()].concat(),
        ),
        ("single_tensored", c, m.single_tensored.gap, m.single.weights.as_slice().to_vec()),
    ];
    let mut table = Table::new(&["label", "distance", "gap", "weights"]);
    let mut records = Vec::new();
    for (label, distance, gap, weights) in entries {
        check_gap(gap, tol, label)?;
        table.push(vec![label.into(), distance.into(), gap.into(), Cell::Text(super::join_numbers(&weights))]);
        let mut rec = ResultRecord::new("twocopy", inputs.clone(), distance, gap);
        rec.label = Some(label.to_string());
        rec.weights = Some(weights);
        rec.wall_time_s = elapsed;
        records.push(rec);
    }
    Ok(Report { records, table, default_format: Format::Json })
}

