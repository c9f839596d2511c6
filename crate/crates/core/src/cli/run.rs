//! Command execution: config in, JSON report and CSV table out.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{
    build_map, coefficient_index, ode_parts, parse_config, validate, BuiltMap, Command, Diagnostic, Family, RunConfig,
};
use super::output::{to_json, to_json_line, Table};
use crate::closed_forms::{
    almansi_decompose, classify_conformal_target, conformal_factor_residual, conformal_target_amplitude,
    conformal_target_ode_residual, euclidean_exponents, is_log_branch,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{CustomWarping, WarpingFunction, WarpingKind};
use crate::profiles::{EquivariantMap, LatitudeMap, MapRef, RadialProfile};
use crate::solver::{integrate_ivp, shoot_bvp, DenseProfile, OdeState, Trajectory};
use crate::tension::{
    bitension_residual, bitension_residual_alt, latitude_residuals, residual_report_with, tension_f, uniform_grid,
    Tolerances,
};
use crate::variation::{
    bienergy, hessian_fd_oracle, hessian_form, latitude_hessian, stability_index_with, tau_variation_value,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// `|A|` below this is reported as `A = 0` by `classify`.
const A_SNAP: f64 = 1e-9;
const ORACLE_STEP: f64 = 1e-3;

/// A report and its optional CSV table.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub table: Option<Table>,
}

/// A failed run: exit code plus diagnostics.
#[derive(Debug, Clone)]
pub struct Failure {
    pub exit_code: i32,
    pub diagnostics: Vec<Diagnostic>,
}

impl Failure {
    fn validation(diagnostics: Vec<Diagnostic>) -> Self {
        Failure { exit_code: EXIT_VALIDATION, diagnostics }
    }

    fn numerical(e: &Error) -> Self {
        Failure { exit_code: EXIT_NUMERICAL, diagnostics: vec![Diagnostic::new("run", e.to_string())] }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure {
            exit_code: EXIT_NUMERICAL,
            diagnostics: vec![Diagnostic::new(path.display().to_string(), e.to_string())],
        }
    }

    /// `{"status", "exit_code", "diagnostics"}` for stderr.
    pub fn to_json_line(&self) -> Vec<u8> {
        let status = if self.exit_code == EXIT_VALIDATION { "validation_error" } else { "numerical_error" };
        let v = json!({"status": status, "exit_code": self.exit_code, "diagnostics": self.diagnostics});
        to_json_line(&v).expect("diagnostics serialize")
    }
}

/// Files written by a successful run.
#[derive(Debug, Clone, Serialize)]
pub struct Written {
    pub json: PathBuf,
    pub csv: Option<PathBuf>,
}

/// Reads, validates and runs the config at `config`, writing reports under `out_dir`.
pub fn run_file(config: &Path, out_dir: &Path, exec: Execution) -> std::result::Result<Written, Failure> {
    let text = fs::read_to_string(config).map_err(|e| {
        Failure::validation(vec![Diagnostic::new("--config", format!("cannot read {}: {e}", config.display()))])
    })?;
    let cfg = parse_config(&text).map_err(Failure::validation)?;
    let diags = validate(&cfg);
    if !diags.is_empty() {
        return Err(Failure::validation(diags));
    }
    let outcome = execute(&cfg, exec).map_err(|e| Failure::numerical(&e))?;
    write_outcome(&cfg, &outcome, out_dir)
}

fn write_outcome(cfg: &RunConfig, outcome: &Outcome, out_dir: &Path) -> std::result::Result<Written, Failure> {
    fs::create_dir_all(out_dir).map_err(|e| Failure::io(out_dir, e))?;
    let name = cfg.command.name();
    let json_path = out_dir.join(cfg.output.json.clone().unwrap_or_else(|| format!("{name}.json")));
    let bytes = to_json(&outcome.report).map_err(|e| Failure::io(&json_path, e))?;
    fs::write(&json_path, bytes).map_err(|e| Failure::io(&json_path, e))?;
    let csv = match &outcome.table {
        None => None,
        Some(table) => {
            let path = out_dir.join(cfg.output.csv.clone().unwrap_or_else(|| format!("{name}.csv")));
            let bytes = table.to_csv().map_err(|e| Failure::io(&path, e))?;
            fs::write(&path, bytes).map_err(|e| Failure::io(&path, e))?;
            Some(path)
        }
    };
    Ok(Written { json: json_path, csv })
}

/// Runs a validated config.
pub fn execute(cfg: &RunConfig, exec: Execution) -> Result<Outcome> {
    let tol = cfg.tolerances.tolerances();
    if cfg.command == Command::Solve {
        return solve(cfg);
    }
    let built = build_map(&cfg.map).map_err(|d| Error::InvalidArgument(first_message(&d)))?;
    let (a, b) = cfg.interval.map(|iv| (iv.a, iv.b)).unwrap_or((f64::NAN, f64::NAN));
    let mut outcome = match (&built, cfg.command) {
        (BuiltMap::Latitude(lat), Command::Verify) => verify_latitude(lat, &tol)?,
        (BuiltMap::Latitude(lat), Command::Stability) => stability_latitude(lat, &tol)?,
        (BuiltMap::Latitude(lat), Command::Sweep) => sweep_latitude(lat, cfg, exec)?,
        (BuiltMap::Equivariant { map, .. }, Command::Verify) => verify(map, a, b, cfg.grid_n, &tol, exec)?,
        (BuiltMap::Equivariant { map, .. }, Command::Stability) => stability(map, a, b, cfg, &tol, exec)?,
        (BuiltMap::Equivariant { map, family }, Command::Families) => {
            families(map, family.as_ref(), a, b, cfg.grid_n, &tol, exec)?
        }
        (BuiltMap::Equivariant { map, .. }, Command::Classify) => classify(map, a, b, cfg.grid_n)?,
        (BuiltMap::Equivariant { map, family }, Command::Sweep) => {
            sweep_family(map, family.as_ref(), a, b, cfg, &tol, exec)?
        }
        (_, command) => {
            return Err(Error::NotApplicable(format!("{} is not defined for this map", command.name())));
        }
    };
    if let Value::Object(obj) = &mut outcome.report {
        let mut head = serde_json::Map::new();
        head.insert("command".into(), json!(cfg.command.name()));
        head.insert("map".into(), describe(&built));
        if let Some(iv) = &cfg.interval {
            head.insert("interval".into(), json!({"a": iv.a, "b": iv.b}));
        }
        head.insert("tolerances".into(), json!(tol));
        head.append(obj);
        outcome.report = Value::Object(head);
    }
    Ok(outcome)
}

fn first_message(d: &[Diagnostic]) -> String {
    d.first().map(|d| format!("{}: {}", d.field, d.message)).unwrap_or_default()
}

fn describe_profile(p: &RadialProfile) -> Value {
    match p.terms() {
        Some(terms) => json!({"terms": terms}),
        None if p.is_numeric() => json!("numeric"),
        None => json!("closed_form"),
    }
}

fn describe(built: &BuiltMap) -> Value {
    match built {
        BuiltMap::Equivariant { map, .. } => json!({
            "kind": "equivariant",
            "domain": map.domain.warping().name(),
            "target": map.target.warping().name(),
            "m": map.m(),
            "eigenmap": map.eigenmap,
            "profile": describe_profile(&map.profile),
        }),
        BuiltMap::Latitude(lat) => json!({
            "kind": "latitude",
            "target": lat.target.warping().name(),
            "eigenmap": lat.eigenmap,
            "rho0": lat.rho0,
        }),
    }
}

fn describe_warping(w: &WarpingFunction) -> Value {
    match w.kind() {
        WarpingKind::Custom(CustomWarping::Linear { slope }) => json!({"kind": "linear", "slope": slope}),
        WarpingKind::Custom(CustomWarping::ScaledSinh { amplitude, rate }) => {
            json!({"kind": "scaled_sinh", "amplitude": amplitude, "rate": rate})
        }
        WarpingKind::Custom(CustomWarping::ScaledSin { amplitude, rate }) => {
            json!({"kind": "scaled_sin", "amplitude": amplitude, "rate": rate})
        }
        _ => json!({"kind": w.name()}),
    }
}

fn verify(map: &EquivariantMap, a: f64, b: f64, n: usize, tol: &Tolerances, exec: Execution) -> Result<Outcome> {
    let rep = residual_report_with(map, a, b, n, tol, exec)?;
    let alt = exec
        .map(&rep.grid, |&r| bitension_residual_alt(map, r).map_err(|e| e.at(r)))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let alt_gap = alt.iter().zip(&rep.bitension).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let mut header = vec!["r", "F", "bitension"];
    if rep.conformality.is_some() {
        header.push("conformality");
    }
    let mut table = Table::new(header);
    for i in 0..rep.grid.len() {
        let mut row = vec![rep.grid[i], rep.tension[i], rep.bitension[i]];
        if let Some(c) = &rep.conformality {
            row.push(c[i]);
        }
        table.push_floats(&row);
    }
    let report = json!({
        "grid_n": n,
        "verdict": rep.verdict.as_str(),
        "f_sup": rep.f_sup,
        "f_l2": rep.f_l2,
        "bitension_sup": rep.bitension_sup,
        "bitension_l2": rep.bitension_l2,
        "conformal_sup": rep.conformal_sup,
        "bitension_forms_gap": alt_gap,
    });
    Ok(Outcome { report, table: Some(table) })
}

fn verify_latitude(lat: &LatitudeMap, tol: &Tolerances) -> Result<Outcome> {
    let res = latitude_residuals(lat)?;
    let report = json!({
        "verdict": res.verdict(tol).as_str(),
        "tension": res.tension,
        "tension_norm_sq": res.tension * res.tension,
        "bitension": res.bitension,
        "bienergy": bienergy(MapRef::Latitude(lat), 0.0, 0.0)?,
    });
    Ok(Outcome { report, table: None })
}

fn eigen_table(eigenvalues: &[f64]) -> Table {
    let mut t = Table::new(vec!["k", "eigenvalue"]);
    for (k, l) in eigenvalues.iter().enumerate() {
        t.rows.push(vec![k.to_string(), super::format_float(*l)]);
    }
    t
}

fn stability(
    map: &EquivariantMap,
    a: f64,
    b: f64,
    cfg: &RunConfig,
    tol: &Tolerances,
    exec: Execution,
) -> Result<Outcome> {
    let index = stability_index_with(MapRef::Equivariant(map), a, b, cfg.grid_n, cfg.tolerances.tol_index, tol, exec)?;
    let bump = RadialProfile::bump(a, b, vec![])?;
    let hess = hessian_form(map, &bump, a, b, tol)?;
    let oracle = hessian_fd_oracle(map, &bump, a, b, ORACLE_STEP)?;
    let table = eigen_table(&index.eigenvalues);
    let report = json!({
        "index": index,
        "bump_hessian": hess,
        "bump_oracle": oracle,
        "bump_relative_gap": (hess.value - oracle).abs() / (1.0 + hess.value.abs()),
    });
    Ok(Outcome { report, table: Some(table) })
}

fn stability_latitude(lat: &LatitudeMap, tol: &Tolerances) -> Result<Outcome> {
    let index = stability_index_with(MapRef::Latitude(lat), 0.0, 0.0, 1, tol.tol_index, tol, Execution::Sequential)?;
    let f = latitude_residuals(lat)?.tension;
    let along_tau = latitude_hessian(lat, f, tol)?;
    let tau = tau_variation_value(MapRef::Latitude(lat))?;
    let table = eigen_table(&index.eigenvalues);
    let report = json!({
        "index": index,
        "tau_variation": tau,
        "tau_variation_over_pi_sq": tau / (PI * PI),
        "hessian_along_tau": along_tau,
        "unit_hessian": latitude_hessian(lat, 1.0, tol)?,
    });
    Ok(Outcome { report, table: Some(table) })
}

fn families(
    map: &EquivariantMap,
    family: Option<&Family>,
    a: f64,
    b: f64,
    n: usize,
    tol: &Tolerances,
    exec: Execution,
) -> Result<Outcome> {
    let (m, two_k) = (map.m(), map.energy_density());
    let exponents = euclidean_exponents(m, two_k)?;
    let rep = residual_report_with(map, a, b, n, tol, exec)?;
    let almansi = match family {
        Some(Family::Biharmonic(fc)) => match almansi_decompose(m, two_k, fc) {
            Ok((rho1, rho2)) => {
                let harmonic_sup = |p: RadialProfile| -> Result<f64> {
                    let part = map.with_profile(p);
                    let vals = exec
                        .map(&rep.grid, |&r| tension_f(&part, r).map_err(|e| e.at(r)))
                        .into_iter()
                        .collect::<Result<Vec<f64>>>()?;
                    Ok(vals.iter().fold(0.0f64, |s, v| s.max(v.abs())))
                };
                let mut recompose = 0.0f64;
                for &r in &rep.grid {
                    let sum = r * r * rho1.eval(r, 0)? + rho2.eval(r, 0)?;
                    recompose = recompose.max((sum - map.profile.eval(r, 0)?).abs());
                }
                json!({
                    "rho1": describe_profile(&rho1),
                    "rho2": describe_profile(&rho2),
                    "rho1_f_sup": harmonic_sup(rho1)?,
                    "rho2_f_sup": harmonic_sup(rho2)?,
                    "recomposition_sup": recompose,
                })
            }
            Err(e) => json!({"error": e.to_string()}),
        },
        _ => Value::Null,
    };
    let mut table = Table::new(vec!["r", "rho", "F", "bitension"]);
    for (i, &r) in rep.grid.iter().enumerate() {
        table.push_floats(&[r, map.profile.eval(r, 0)?, rep.tension[i], rep.bitension[i]]);
    }
    let report = json!({
        "family": match family {
            Some(Family::Harmonic(..)) => "harmonic",
            _ => "biharmonic",
        },
        "exponents": exponents,
        "log_branch": is_log_branch(m, two_k),
        "terms": map.profile.terms(),
        "almansi": almansi,
        "grid_n": n,
        "verdict": rep.verdict.as_str(),
        "f_sup": rep.f_sup,
        "bitension_sup": rep.bitension_sup,
    });
    Ok(Outcome { report, table: Some(table) })
}

fn classify(map: &EquivariantMap, a: f64, b: f64, n: usize) -> Result<Outcome> {
    let c = map
        .domain
        .warping()
        .curvature_constant()
        .ok_or_else(|| Error::UnsupportedTarget("classify needs a space-form domain".into()))?;
    let rep = conformal_factor_residual(map, c, a, b, n)?;
    let a_value = if rep.a_mean.abs() <= A_SNAP { 0.0 } else { rep.a_mean };
    let amplitude = if a_value == 0.0 { 1.0 } else { conformal_target_amplitude(a_value, c) };
    let target = classify_conformal_target(a_value, c, amplitude)?;
    let class = match a_value.partial_cmp(&0.0) {
        Some(std::cmp::Ordering::Greater) => "hyperbolic",
        Some(std::cmp::Ordering::Less) => "spherical",
        _ => "flat",
    };
    let range = target.domain();
    let probe_hi = if range.hi.is_finite() { range.hi } else { 2.0 };
    let mut ode_sup = 0.0f64;
    for rho in uniform_grid(0.0, probe_hi, 33) {
        ode_sup = ode_sup.max(conformal_target_ode_residual(&target, a_value, c, rho)?.abs());
    }
    let mut table = Table::new(vec!["r", "A"]);
    for (r, av) in rep.grid.iter().zip(&rep.a_values) {
        table.push_floats(&[*r, *av]);
    }
    let report = json!({
        "grid_n": n,
        "domain_curvature": c,
        "a_mean": rep.a_mean,
        "a_spread": rep.a_spread,
        "a": a_value,
        "residual_sup": rep.residual_sup,
        "conformal_sup": rep.conformal_sup,
        "target_class": class,
        "target_warping": describe_warping(&target),
        "target_ode_residual_sup": ode_sup,
        "matches_map_target": class == map.target.warping().name(),
    });
    Ok(Outcome { report, table: Some(table) })
}

fn sweep_values(cfg: &RunConfig) -> (String, Vec<f64>) {
    let s = cfg.sweep.as_ref().expect("validated sweep block");
    let values = if s.steps == 1 { vec![s.from] } else { uniform_grid(s.from, s.to, s.steps) };
    (s.param.clone(), values)
}

fn nan_row(param: f64, width: usize, e: &Error) -> Vec<String> {
    let mut row = vec![super::format_float(param)];
    row.extend((0..width).map(|_| "NaN".to_string()));
    row.push(e.to_string());
    row
}

fn float_row(param: f64, values: &[f64]) -> Vec<String> {
    let mut row = vec![super::format_float(param)];
    row.extend(values.iter().map(|&v| super::format_float(v)));
    row.push(String::new());
    row
}

fn sweep_report(param: &str, values: &[f64], table: &Table) -> Value {
    let failures = table.rows.iter().filter(|r| !r.last().is_some_and(|e| e.is_empty())).count();
    json!({
        "param": param,
        "from": values.first(),
        "to": values.last(),
        "points": values.len(),
        "failures": failures,
        "columns": table.header,
    })
}

fn sweep_latitude(lat: &LatitudeMap, cfg: &RunConfig, exec: Execution) -> Result<Outcome> {
    let (param, values) = sweep_values(cfg);
    let rows = exec.map(&values, |&rho0| {
        let point = || -> Result<[f64; 4]> {
            let l = LatitudeMap::new(lat.eigenmap.clone(), rho0, lat.target.clone())?;
            let res = latitude_residuals(&l)?;
            let e2 = bienergy(MapRef::Latitude(&l), 0.0, 0.0)?;
            let tau = tau_variation_value(MapRef::Latitude(&l))?;
            Ok([res.tension, res.bitension, e2, tau])
        };
        match point() {
            Ok(v) => float_row(rho0, &v),
            Err(e) => nan_row(rho0, 4, &e),
        }
    });
    let mut table = Table::new(vec!["param", "tension", "bitension", "bienergy", "tau_variation", "error"]);
    table.rows = rows;
    let report = sweep_report(&param, &values, &table);
    Ok(Outcome { report, table: Some(table) })
}

fn sweep_family(
    map: &EquivariantMap,
    family: Option<&Family>,
    a: f64,
    b: f64,
    cfg: &RunConfig,
    tol: &Tolerances,
    exec: Execution,
) -> Result<Outcome> {
    let (param, values) = sweep_values(cfg);
    let family = family.ok_or_else(|| Error::NotApplicable("sweep needs a coefficient family".into()))?;
    let index =
        coefficient_index(&param).ok_or_else(|| Error::InvalidArgument(format!("bad sweep parameter {param}")))?;
    let (m, two_k) = (map.m(), map.energy_density());
    let rows = exec.map(&values, |&value| {
        let point = || -> Result<[f64; 3]> {
            let profile = family.with_coefficient(index, value).profile(m, two_k)?;
            let member = map.with_profile(profile);
            let rep = residual_report_with(&member, a, b, cfg.grid_n, tol, Execution::Sequential)?;
            let e2 = bienergy(MapRef::Equivariant(&member), a, b)?;
            Ok([rep.f_sup, rep.bitension_sup, e2])
        };
        match point() {
            Ok(v) => float_row(value, &v),
            Err(e) => nan_row(value, 3, &e),
        }
    });
    let mut table = Table::new(vec!["param", "f_sup", "bitension_sup", "bienergy", "error"]);
    table.rows = rows;
    let report = sweep_report(&param, &values, &table);
    Ok(Outcome { report, table: Some(table) })
}

fn solve(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.solve.as_ref().expect("validated solve block");
    let (ode, eigenmap) = ode_parts(&cfg.map).map_err(|d| Error::InvalidArgument(first_message(&d)))?;
    let (trajectory, mut report) = match (&spec.left, &spec.right, &spec.initial, spec.r_end) {
        (Some(left), Some(right), _, _) => {
            let sol = shoot_bvp(&ode, &eigenmap, left, right, &spec.solver)?;
            let report = json!({
                "mode": "bvp",
                "left": left,
                "right": right,
                "iterations": sol.iterations,
                "unknowns": sol.unknowns,
                "mismatch": sol.mismatch,
            });
            (sol.trajectory, report)
        }
        (_, _, Some(init), Some(r_end)) => {
            let s0 = OdeState::new(init[0], init[1], init[2], init[3], init[4]);
            let traj = integrate_ivp(&ode, s0, r_end, &spec.solver)?;
            (Arc::new(traj), json!({"mode": "ivp", "initial": s0, "r_end": r_end}))
        }
        _ => return Err(Error::InvalidArgument("solve block needs left/right or initial/r_end".into())),
    };
    let states = match &cfg.interval {
        Some(iv) => uniform_grid(iv.a, iv.b, cfg.grid_n)
            .into_iter()
            .map(|r| trajectory.interpolate(r))
            .collect::<Result<Vec<_>>>()?,
        None => trajectory.states.clone(),
    };
    let bitension_sup = solution_bitension(&ode, &eigenmap, &trajectory, &states)?;
    let mut table = Table::new(vec!["r", "rho", "rho_p", "F", "F_p"]);
    for s in &states {
        table.push_floats(&[s.r, s.rho, s.rho_p, s.f, s.f_p]);
    }
    if let Value::Object(obj) = &mut report {
        let (lo, hi) = trajectory.span();
        obj.insert("accepted_steps".into(), json!(trajectory.len() - 1));
        obj.insert("rejected_steps".into(), json!(trajectory.rejected_steps));
        obj.insert("span".into(), json!([lo, hi]));
        obj.insert("final_state".into(), json!(trajectory.last()));
        obj.insert("solver".into(), json!(spec.solver));
        obj.insert("bitension_sup".into(), json!(bitension_sup));
    }
    let mut head = serde_json::Map::new();
    head.insert("command".into(), json!("solve"));
    head.insert("m".into(), json!(ode.m));
    head.insert("domain".into(), json!(ode.sigma.name()));
    head.insert("target".into(), json!(ode.lambda.name()));
    head.insert("eigenmap".into(), json!(eigenmap));
    if let Value::Object(mut obj) = report {
        head.append(&mut obj);
    }
    Ok(Outcome { report: Value::Object(head), table: Some(table) })
}

/// Bitension of the dense solution at the interior sample radii.
fn solution_bitension(
    ode: &crate::solver::BiharmonicOde,
    eigenmap: &crate::profiles::EigenmapDescriptor,
    trajectory: &Arc<Trajectory>,
    states: &[OdeState],
) -> Result<f64> {
    let (lo, hi) = trajectory.span();
    let profile = DenseProfile::new(ode.clone(), trajectory.clone()).into_profile();
    let domain = crate::geometry::ModelSpace::new(ode.m, ode.sigma.clone())?;
    let target = crate::geometry::ModelSpace::new(eigenmap.target_sphere_dim + 1, ode.lambda.clone())?;
    let map = EquivariantMap::new(domain, target, eigenmap.clone(), profile)?;
    // the finite-difference stencil needs room on both sides
    let margin = 3e-4f64.max(3e-4 * hi.abs());
    let mut sup = 0.0f64;
    for s in states.iter().filter(|s| s.r - lo > margin && hi - s.r > margin) {
        sup = sup.max(bitension_residual(&map, s.r).map_err(|e| e.at(s.r))?.abs());
    }
    Ok(sup)
}
