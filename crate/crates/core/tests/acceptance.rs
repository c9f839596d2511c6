//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use biharmonic::closed_forms::{
    almansi_decompose, biharmonic_family, classification_map, classify_conformal_target, conformal_factor_residual,
    conformal_target_amplitude, conformal_target_ode_residual, harmonic_family, Classification, FamilyCoefficients,
};
use biharmonic::geometry::ModelSpace;
use biharmonic::profiles::{
    perturb_profile, EigenmapDescriptor, EquivariantMap, LatitudeMap, MapRef, RadialProfile, Term,
};
use biharmonic::solver::{
    integrate_ivp, shoot_bvp, BiharmonicOde, LeftCondition, OdeState, RightCondition, SolverConfig,
};
use biharmonic::tension::{
    bitension_residual, bitension_residual_alt, latitude_residuals, residual_report, tension_f, uniform_grid,
    Tolerances, Verdict,
};
use biharmonic::variation::{
    divergence_identity_check, hessian_fd_oracle, hessian_form, latitude_hessian, stability_index, tau_variation_value,
};
use biharmonic::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

fn within_budget(label: &str, elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed <= budget, || format!("{label} took {elapsed:?}, budget {budget:?}"))
}

fn flat_map(m: usize, eigenmap: EigenmapDescriptor, profile: RadialProfile) -> EquivariantMap {
    let n = eigenmap.target_sphere_dim + 1;
    EquivariantMap::new(ModelSpace::euclidean(m).unwrap(), ModelSpace::euclidean(n).unwrap(), eigenmap, profile)
        .unwrap()
}

/// Eigenmaps from the catalog acting on `S^{m−1}`.
fn catalog_for(m: usize) -> Vec<EigenmapDescriptor> {
    let mut out = vec![EigenmapDescriptor::identity(m - 1).unwrap()];
    if m == 2 {
        out.extend((2..=3).map(|d| EigenmapDescriptor::power(d).unwrap()));
    }
    if m == 4 {
        out.push(EigenmapDescriptor::hopf());
    }
    out
}

fn random_member(rng: &mut ChaCha8Rng) -> (usize, EigenmapDescriptor) {
    let m = [2, 3, 4, 5][rng.random_range(0..4)];
    let cat = catalog_for(m);
    let e = cat[rng.random_range(0..cat.len())].clone();
    (m, e)
}

fn criterion_1() -> Check {
    let tol = Tolerances::default();
    let mut worst = (0.0f64, 0.0f64, f64::INFINITY);
    for c in Classification::ALL {
        let t0 = Instant::now();
        let map = classification_map(c);
        let (a, b) = c.benchmark_interval();
        let rep = residual_report(&map, a, b, 64, &tol).map_err(e2s)?;
        let conf = rep.conformal_sup.unwrap_or(f64::INFINITY);
        ensure(rep.bitension_sup <= 1e-6, || format!("{}: bitension_sup {:e}", c.name(), rep.bitension_sup))?;
        ensure(conf <= 1e-10, || format!("{}: conformal_sup {conf:e}", c.name()))?;
        ensure(rep.verdict == Verdict::ProperBiharmonic, || format!("{}: verdict {:?}", c.name(), rep.verdict))?;
        let r2 = RadialProfile::from_terms(vec![Term::power(1.0, 2.0)]).unwrap();
        let bent = map.with_profile(perturb_profile(&map.profile, &r2, 0.01));
        let bent_rep = residual_report(&bent, a, b, 64, &tol).map_err(e2s)?;
        ensure(bent_rep.bitension_sup > 1e-2, || {
            format!("{}: perturbed bitension_sup {:e}", c.name(), bent_rep.bitension_sup)
        })?;
        within_budget(c.name(), t0.elapsed(), Duration::from_secs(1))?;
        worst = (worst.0.max(rep.bitension_sup), worst.1.max(conf), worst.2.min(bent_rep.bitension_sup));
    }
    Ok(format!("bitension_sup <= {:.1e}, conformal_sup <= {:.1e}, perturbed >= {:.1e}", worst.0, worst.1, worst.2))
}

fn criterion_2() -> Check {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = Tolerances::default();
    let (mut f_worst, mut b_worst, mut gap_worst) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let (m, e) = random_member(&mut rng);
        let (c1, c2) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let map = flat_map(m, e.clone(), harmonic_family(m, e.energy_density, c1, c2).map_err(e2s)?);
        let rep = residual_report(&map, 0.5, 2.0, 64, &tol).map_err(e2s)?;
        ensure(rep.f_sup <= 1e-9, || format!("harmonic m={m} {}: F_sup {:e}", e.name, rep.f_sup))?;
        f_worst = f_worst.max(rep.f_sup);
    }
    for _ in 0..100 {
        let (m, e) = random_member(&mut rng);
        let fc = FamilyCoefficients::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let map = flat_map(m, e.clone(), biharmonic_family(m, e.energy_density, &fc).map_err(e2s)?);
        let rep = residual_report(&map, 0.5, 2.0, 64, &tol).map_err(e2s)?;
        ensure(rep.bitension_sup <= 1e-6, || {
            format!("biharmonic m={m} {}: bitension_sup {:e}", e.name, rep.bitension_sup)
        })?;
        b_worst = b_worst.max(rep.bitension_sup);
        for (&r, &bt) in rep.grid.iter().zip(&rep.bitension) {
            let alt = bitension_residual_alt(&map, r).map_err(e2s)?;
            gap_worst = gap_worst.max((alt - bt).abs());
        }
        ensure(gap_worst <= 1e-6, || format!("residual forms disagree by {gap_worst:e}"))?;
    }
    within_budget("families", t0.elapsed(), Duration::from_secs(10))?;
    Ok(format!("F_sup <= {f_worst:.1e}, bitension_sup <= {b_worst:.1e}, form gap <= {gap_worst:.1e}"))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut f_worst, mut rec_worst) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let m = [3, 4, 5][rng.random_range(0..3)];
        let cat = catalog_for(m);
        let e = cat[rng.random_range(0..cat.len())].clone();
        let fc = FamilyCoefficients::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let whole = biharmonic_family(m, e.energy_density, &fc).map_err(e2s)?;
        let (rho1, rho2) = almansi_decompose(m, e.energy_density, &fc).map_err(e2s)?;
        for r in uniform_grid(0.5, 2.0, 50) {
            let sum = r * r * rho1.eval(r, 0).map_err(e2s)? + rho2.eval(r, 0).map_err(e2s)?;
            let exact = whole.eval(r, 0).map_err(e2s)?;
            rec_worst = rec_worst.max((sum - exact).abs() / exact.abs().max(1.0));
        }
        for part in [rho1, rho2] {
            let map = flat_map(m, e.clone(), part);
            for r in uniform_grid(0.5, 2.0, 50) {
                f_worst = f_worst.max(tension_f(&map, r).map_err(e2s)?.abs());
            }
        }
    }
    ensure(f_worst <= 1e-9, || format!("Almansi component F_sup {f_worst:e}"))?;
    ensure(rec_worst <= 1e-12, || format!("recomposition error {rec_worst:e}"))?;
    let log = almansi_decompose(2, 1.0, &FamilyCoefficients::new(0.0, 1.0, 0.0, 0.0));
    ensure(matches!(log, Err(Error::NotApplicable(_))), || format!("m = 2 log branch not rejected: {log:?}"))?;
    Ok(format!("component F_sup <= {f_worst:.1e}, recomposition <= {rec_worst:.1e}, r ln r rejected"))
}

fn criterion_4() -> Check {
    let t0 = Instant::now();
    let ode = BiharmonicOde::new(
        4,
        3.0,
        ModelSpace::euclidean(4).unwrap().warping().clone(),
        ModelSpace::euclidean(4).unwrap().warping().clone(),
    )
    .map_err(e2s)?;
    let cfg = SolverConfig::default();
    let traj = integrate_ivp(&ode, OdeState::new(0.5, 2.0, -4.0, -32.0, 192.0), 2.0, &cfg).map_err(e2s)?;
    let ivp_err = (traj.last().rho - 0.5).abs();
    ensure(ivp_err <= 1e-8, || format!("inversion IVP rho(2) error {ivp_err:e}"))?;

    let id3 = EigenmapDescriptor::identity(3).unwrap();
    let left = LeftCondition::RegularPole { eps: 1e-3, c1_guess: 0.0, c2_guess: 0.0 };
    let right = RightCondition { r: 1.0, rho: 2.0, rho_p: 4.0 };
    let sol = shoot_bvp(&ode, &id3, &left, &right, &cfg).map_err(e2s)?;
    ensure(sol.iterations <= 2, || format!("{} Newton iterations", sol.iterations))?;
    let c_err = (sol.unknowns[0] - 1.0).abs().max((sol.unknowns[1] - 1.0).abs());
    ensure(c_err <= 1e-6, || format!("(C1, C2) = {:?}", sol.unknowns))?;
    let end_err = sol.mismatch[0].abs().max(sol.mismatch[1].abs());
    ensure(end_err <= 1e-6, || format!("endpoint error {end_err:e}"))?;
    let map = flat_map(4, id3, sol.profile.clone());
    let mut bt = 0.0f64;
    for r in uniform_grid(0.05, 0.95, 40) {
        bt = bt.max(bitension_residual(&map, r).map_err(e2s)?.abs());
    }
    ensure(bt <= 1e-5, || format!("solver output bitension {bt:e}"))?;
    within_budget("solver", t0.elapsed(), Duration::from_secs(2))?;
    Ok(format!(
        "IVP error {ivp_err:.1e}; BVP {} iterations, C error {c_err:.1e}, endpoint {end_err:.1e}, bitension {bt:.1e}",
        sol.iterations
    ))
}

fn criterion_5() -> Check {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for c in Classification::ALL {
        let map = classification_map(c);
        let (a, b) = c.benchmark_interval();
        let rep = conformal_factor_residual(&map, 0.0, a, b, 64).map_err(e2s)?;
        let a_err = (rep.a_mean - c.expected_a()).abs();
        ensure(a_err <= 1e-9, || format!("{}: A = {}", c.name(), rep.a_mean))?;
        ensure(rep.a_spread <= 1e-9, || format!("{}: A spread {:e}", c.name(), rep.a_spread))?;
        ensure(rep.residual_sup <= 1e-8, || format!("{}: ODE residual {:e}", c.name(), rep.residual_sup))?;
        worst = (worst.0.max(rep.a_spread), worst.1.max(rep.residual_sup), worst.2);
    }
    for a_val in [0.0, -2.0, 2.0, 0.5, -0.75] {
        for c in [-0.5, 0.0, 1.0] {
            let amp = if a_val == 0.0 { 1.0 } else { conformal_target_amplitude(a_val, c) };
            let w = classify_conformal_target(a_val, c, amp).map_err(e2s)?;
            let hi = if w.domain().hi.is_finite() { w.domain().hi } else { 3.0 };
            for rho in uniform_grid(0.0, hi, 41) {
                let res = conformal_target_ode_residual(&w, a_val, c, rho).map_err(e2s)?.abs();
                ensure(res <= 1e-9, || format!("target ODE residual {res:e} at A={a_val}, c={c}, rho={rho}"))?;
                worst.2 = worst.2.max(res);
            }
        }
    }
    Ok(format!("A spread <= {:.1e}, ODE residual <= {:.1e}, target ODE <= {:.1e}", worst.0, worst.1, worst.2))
}

/// Biharmonic benchmark maps with the interval each is tested on.
fn biharmonic_benchmarks() -> Vec<(&'static str, EquivariantMap, f64, f64)> {
    let mut out: Vec<_> = Classification::ALL
        .into_iter()
        .map(|c| {
            let (a, b) = c.benchmark_interval();
            (c.name(), classification_map(c), a, b)
        })
        .collect();
    let id3 = EigenmapDescriptor::identity(3).unwrap();
    let family = biharmonic_family(4, 3.0, &FamilyCoefficients::new(1.0, -0.5, 0.25, 2.0)).unwrap();
    out.push(("flat family", flat_map(4, id3, family), 0.5, 2.0));
    out
}

fn criterion_6() -> Check {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tol = Tolerances::default();
    let (mut gap_worst, mut book_worst) = (0.0f64, 0.0f64);
    for (name, map, a, b) in biharmonic_benchmarks() {
        for _ in 0..5 {
            let w = b - a;
            let lo = a + rng.random_range(0.0..0.4) * w;
            let hi = b - rng.random_range(0.0..0.4) * w;
            let q: Vec<f64> = (0..rng.random_range(1..4)).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v = RadialProfile::bump(lo, hi, q).map_err(e2s)?;
            let rep = hessian_form(&map, &v, a, b, &tol).map_err(e2s)?;
            let oracle = hessian_fd_oracle(&map, &v, a, b, 1e-3).map_err(e2s)?;
            let gap = (rep.value - oracle).abs() / (1.0 + rep.value.abs());
            ensure(gap <= 1e-3, || format!("{name}: hessian {} vs oracle {oracle}", rep.value))?;
            let t = rep.terms;
            let book =
                (rep.value - (t[0] - rep.curvature * (t[1] + t[2] + t[3] + t[4]))).abs() / (1.0 + rep.value.abs());
            ensure(book <= 1e-12, || format!("{name}: bookkeeping defect {book:e}"))?;
            gap_worst = gap_worst.max(gap);
            book_worst = book_worst.max(book);
        }
    }
    within_budget("hessian", t0.elapsed(), Duration::from_secs(30))?;
    Ok(format!("relative oracle gap <= {gap_worst:.1e}, bookkeeping <= {book_worst:.1e}"))
}

fn criterion_7() -> Check {
    let tol = Tolerances::default();
    let sphere = |n| ModelSpace::sphere(n).unwrap();
    let hopf = LatitudeMap::new(EigenmapDescriptor::hopf(), PI / 4.0, sphere(3)).map_err(e2s)?;
    let res = latitude_residuals(&hopf).map_err(e2s)?;
    ensure(res.verdict(&tol) == Verdict::ProperBiharmonic, || format!("Hopf verdict {:?}", res.verdict(&tol)))?;
    let tau2 = res.tension * res.tension;
    ensure((tau2 - 16.0).abs() <= 1e-12, || format!("|tau|^2 = {tau2}"))?;
    let expected = -2048.0 * PI * PI;
    let tv = tau_variation_value(MapRef::from(&hopf)).map_err(e2s)?;
    let tv_err = ((tv - expected) / expected).abs();
    ensure(tv_err <= 1e-8, || format!("tau_variation {tv} vs {expected}"))?;
    let direct = latitude_hessian(&hopf, res.tension, &tol).map_err(e2s)?.value;
    let direct_err = ((direct - expected) / expected).abs();
    ensure(direct_err <= 1e-6, || format!("reduction along tau {direct} vs {expected}"))?;
    let index = stability_index(MapRef::from(&hopf), 0.0, 0.0, 1, None, &tol).map_err(e2s)?;
    ensure(index.negative_count >= 1, || "Hopf latitude reported stable".into())?;

    let id = LatitudeMap::new(EigenmapDescriptor::identity(3).unwrap(), PI / 4.0, sphere(4)).map_err(e2s)?;
    let expected_id = -40.5 * PI * PI;
    let tv_id = tau_variation_value(MapRef::from(&id)).map_err(e2s)?;
    let id_err = ((tv_id - expected_id) / expected_id).abs();
    ensure(id_err <= 1e-8, || format!("identity latitude tau_variation {tv_id} vs {expected_id}"))?;
    Ok(format!(
        "tau_variation/pi^2 = {:.12}, reduction error {direct_err:.1e}, index {}, identity/pi^2 = {:.12}",
        tv / (PI * PI),
        index.negative_count,
        tv_id / (PI * PI)
    ))
}

fn criterion_8() -> Check {
    let tol = Tolerances::default();
    let id3 = EigenmapDescriptor::identity(3).unwrap();
    let identity = flat_map(4, id3, RadialProfile::from_terms(vec![Term::power(1.0, 1.0)]).unwrap());
    let inversion = classification_map(Classification::Inversion);
    let mut lowest = f64::INFINITY;
    for (name, map, a, b) in [("identity", &identity, 1.0, 2.0), ("inversion", &inversion, 0.5, 2.0)] {
        for n in [32, 64] {
            let rep = stability_index(MapRef::from(map), a, b, n, None, &tol).map_err(e2s)?;
            ensure(rep.negative_count == 0, || format!("{name} n={n}: index {}", rep.negative_count))?;
            ensure(rep.eigenvalues[0] >= -1e-8, || format!("{name} n={n}: eigenvalue {}", rep.eigenvalues[0]))?;
            lowest = lowest.min(rep.eigenvalues[0]);
        }
    }
    Ok(format!("index 0 at n = 32, 64; smallest eigenvalue {lowest:.6e}"))
}

fn criterion_9() -> Check {
    let mut maps: Vec<(&str, EquivariantMap, f64, f64)> = biharmonic_benchmarks();
    let id3 = EigenmapDescriptor::identity(3).unwrap();
    maps.push((
        "identity",
        flat_map(4, id3.clone(), RadialProfile::from_terms(vec![Term::power(1.0, 1.0)]).unwrap()),
        0.5,
        2.0,
    ));
    let stereo = classification_map(Classification::Stereographic);
    let r2 = RadialProfile::from_terms(vec![Term::power(1.0, 2.0)]).unwrap();
    maps.push(("perturbed stereographic", stereo.with_profile(perturb_profile(&stereo.profile, &r2, 0.01)), 0.5, 2.0));
    let hopf_cone =
        flat_map(4, EigenmapDescriptor::hopf(), RadialProfile::from_terms(vec![Term::power(1.0, 1.5)]).unwrap());
    maps.push(("hopf cone", hopf_cone, 0.5, 2.0));
    let mut worst = 0.0f64;
    for (name, map, a, b) in &maps {
        for r in uniform_grid(*a, *b, 64) {
            let d = divergence_identity_check(map, r).map_err(e2s)?.abs();
            ensure(d <= 1e-10, || format!("{name}: identity defect {d:e} at r = {r}"))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("{} maps, defect <= {worst:.1e}", maps.len()))
}

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_biharmonic-lab"))
}

fn run_cli(config: &Path, out: &Path) -> std::process::Output {
    Command::new(bin()).arg("--config").arg(config).arg("--out-dir").arg(out).arg("--quiet").output().expect("spawn")
}

fn criterion_10() -> Check {
    let configs_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut configs: Vec<PathBuf> = std::fs::read_dir(&configs_dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    configs.sort();
    ensure(!configs.is_empty(), || "no example configs".into())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for cfg in &configs {
        let stem = cfg.file_stem().unwrap().to_string_lossy().to_string();
        let (d1, d2) = (tmp.path().join(format!("{stem}-1")), tmp.path().join(format!("{stem}-2")));
        for d in [&d1, &d2] {
            let out = run_cli(cfg, d);
            ensure(out.status.code() == Some(0), || {
                format!("{stem}: exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
            })?;
        }
        let mut names: Vec<_> =
            std::fs::read_dir(&d1).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names {
            let (x, y) = (std::fs::read(d1.join(&name)), std::fs::read(d2.join(&name)));
            ensure(matches!((&x, &y), (Ok(x), Ok(y)) if x == y), || format!("{stem}: {name:?} differs between runs"))?;
            files += 1;
        }
    }
    let invalid = [
        r#"{"command":"verify","map":{"profile":{"classification":"inversion"}},"interval":{"a":1.0,"b":1.0}}"#,
        r#"{"command":"verify","map":{"domain":"flat","target":"flat","m":4,"eigenmap":"veronese","profile":{"terms":[[1,1]]}},"interval":{"a":1,"b":2}}"#,
        r#"{"command":"verify","map":{"profile":{"classification":"hyperbolic"}},"interval":{"a":0.5,"b":1.5}}"#,
        "{\"command\": \"verify\",\n \"map\": }",
    ];
    for (i, text) in invalid.iter().enumerate() {
        let path = tmp.path().join(format!("invalid-{i}.json"));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        let out = run_cli(&path, &tmp.path().join("invalid-out"));
        ensure(out.status.code() == Some(2), || format!("invalid config {i}: exit {:?}", out.status.code()))?;
        let diag: serde_json::Value =
            serde_json::from_slice(&out.stderr).map_err(|e| format!("stderr not JSON: {e}"))?;
        let n = diag["diagnostics"].as_array().map_or(0, |d| d.len());
        ensure(n > 0 && diag["exit_code"] == 2, || format!("invalid config {i}: diagnostics {diag}"))?;
    }
    Ok(format!("{} configs, {files} files byte-identical; {} invalid configs exit 2", configs.len(), invalid.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("classification trio", criterion_1),
        ("closed-family residuals", criterion_2),
        ("Almansi split", criterion_3),
        ("solver accuracy", criterion_4),
        ("conformal factor", criterion_5),
        ("second-variation consistency", criterion_6),
        ("latitude instability", criterion_7),
        ("stability sanity", criterion_8),
        ("divergence identity", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let result = check();
        let ms = t0.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({ms:.0} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({ms:.0} ms)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
