//! JSON run configuration and its validation.

use serde::{Deserialize, Serialize};

use crate::closed_forms::{biharmonic_family, harmonic_family, Classification, FamilyCoefficients};
use crate::geometry::{ModelSpace, WarpingFunction};
use crate::profiles::{eigenmap_catalog, EigenmapDescriptor, EquivariantMap, LatitudeMap, RadialProfile, Term};
use crate::solver::{LeftCondition, RightCondition, SolverConfig};
use crate::tension::Tolerances;
use crate::variation::MIN_INDEX_GRID;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Solve,
    Stability,
    Families,
    Classify,
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Solve => "solve",
            Command::Stability => "stability",
            Command::Families => "families",
            Command::Classify => "classify",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    /// `harmonic`, `biharmonic`, `regular_pole`, `constant` or `latitude`.
    pub family: Option<String>,
    #[serde(default)]
    pub coefficients: Vec<f64>,
    /// `[c, p]` or `[c, p, j]` for `c·r^p·(ln r)^j`.
    pub terms: Option<Vec<Vec<f64>>>,
    pub classification: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub domain: Option<String>,
    pub target: Option<String>,
    pub m: Option<usize>,
    pub eigenmap: Option<String>,
    #[serde(default)]
    pub profile: ProfileSpec,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default = "default_tau_h")]
    pub tau_h: f64,
    #[serde(default = "default_tau_b")]
    pub tau_b: f64,
    pub tol_index: Option<f64>,
}

fn default_tau_h() -> f64 {
    Tolerances::default().tau_h
}

fn default_tau_b() -> f64 {
    Tolerances::default().tau_b
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec { tau_h: default_tau_h(), tau_b: default_tau_b(), tol_index: None }
    }
}

impl ToleranceSpec {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances { tau_h: self.tau_h, tau_b: self.tau_b, tol_index: self.tol_index }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// `rho0` for latitude maps, `c1`…`c4` for a family coefficient.
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub json: Option<String>,
    pub csv: Option<String>,
}

/// Boundary data for `solve`: either `left` + `right` (shooting) or
/// `initial` + `r_end` (a single integration).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSpec {
    pub left: Option<LeftCondition>,
    pub right: Option<RightCondition>,
    /// `[r, ρ, ρ', F, F']`
    pub initial: Option<[f64; 5]>,
    pub r_end: Option<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn default_grid() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub map: MapSpec,
    pub interval: Option<IntervalSpec>,
    #[serde(default = "default_grid")]
    pub grid_n: usize,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    pub sweep: Option<SweepSpec>,
    pub solve: Option<SolveSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl Diagnostic {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { field: field.into(), message: message.into(), line: None, column: None }
    }
}

/// Parses a config, reporting JSON errors with their position.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<Diagnostic>> {
    serde_json::from_str(text).map_err(|e| {
        vec![Diagnostic { field: "$".into(), message: e.to_string(), line: Some(e.line()), column: Some(e.column()) }]
    })
}

/// The map a config describes, with how its profile was produced.
#[derive(Debug, Clone)]
pub enum BuiltMap {
    Equivariant { map: EquivariantMap, family: Option<Family> },
    Latitude(LatitudeMap),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Harmonic(f64, f64),
    Biharmonic(FamilyCoefficients),
    RegularPole(f64, f64),
    Constant(f64),
    Classification(Classification),
}

impl Family {
    /// The profile of this family member for dimension `m` and energy density `2k`.
    pub fn profile(&self, m: usize, energy_density: f64) -> crate::Result<RadialProfile> {
        match *self {
            Family::Harmonic(c1, c2) => harmonic_family(m, energy_density, c1, c2),
            Family::Biharmonic(fc) => biharmonic_family(m, energy_density, &fc),
            Family::RegularPole(c1, c2) => RadialProfile::from_terms(vec![Term::power(c1, 1.0), Term::power(c2, 3.0)]),
            Family::Constant(c) => Ok(RadialProfile::constant(c)),
            Family::Classification(c) => Ok(crate::closed_forms::classification_map(c).profile),
        }
    }

    /// Number of sweepable coefficients `c1, c2, …`.
    pub fn arity(&self) -> usize {
        match self {
            Family::Harmonic(..) | Family::RegularPole(..) => 2,
            Family::Biharmonic(_) => 4,
            Family::Constant(_) => 1,
            Family::Classification(_) => 0,
        }
    }

    /// Same family with coefficient `c{index+1}` replaced.
    pub fn with_coefficient(&self, index: usize, value: f64) -> Family {
        let mut out = self.clone();
        match &mut out {
            Family::Harmonic(a, b) | Family::RegularPole(a, b) => *[a, b][index] = value,
            Family::Biharmonic(fc) => *[&mut fc.c1, &mut fc.c2, &mut fc.c3, &mut fc.c4][index] = value,
            Family::Constant(c) => *c = value,
            Family::Classification(_) => {}
        }
        out
    }
}

/// Index of a `c1`, `c2`, … sweep parameter.
pub fn coefficient_index(param: &str) -> Option<usize> {
    param.strip_prefix('c')?.parse::<usize>().ok()?.checked_sub(1)
}

fn warping(kind: &str) -> Option<WarpingFunction> {
    match kind {
        "flat" | "euclidean" => Some(WarpingFunction::flat()),
        "spherical" | "sphere" => Some(WarpingFunction::spherical()),
        "hyperbolic" => Some(WarpingFunction::hyperbolic()),
        _ => None,
    }
}

fn is_flat(kind: &Option<String>) -> bool {
    matches!(kind.as_deref(), Some("flat" | "euclidean"))
}

fn coefficient_count(family: &str) -> Option<usize> {
    match family {
        "harmonic" | "regular_pole" => Some(2),
        "biharmonic" => Some(4),
        "constant" | "latitude" => Some(1),
        _ => None,
    }
}

/// Builds the map described by `spec`, collecting every problem found.
pub fn build_map(spec: &MapSpec) -> Result<BuiltMap, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let p = &spec.profile;
    let chosen = [p.family.is_some(), p.terms.is_some(), p.classification.is_some()].iter().filter(|&&x| x).count();
    if chosen != 1 {
        diags.push(Diagnostic::new("map.profile", "exactly one of family, terms or classification must be given"));
        return Err(diags);
    }
    if let Some(name) = &p.classification {
        let Some(c) = Classification::from_name(name) else {
            return Err(vec![Diagnostic::new(
                "map.profile.classification",
                format!("catalog miss: unknown classification map {name:?} (inversion, stereographic, hyperbolic)"),
            )]);
        };
        let map = crate::closed_forms::classification_map(c);
        let expected = [
            ("map.domain", spec.domain.as_deref().map(|d| warping(d).map(|w| w.name()) == Some("flat"))),
            ("map.m", spec.m.map(|m| m == 4)),
            ("map.eigenmap", spec.eigenmap.as_deref().map(|e| e.trim() == "identity(3)")),
            (
                "map.target",
                spec.target.as_deref().map(|t| warping(t).map(|w| w.name()) == Some(map.target.warping().name())),
            ),
        ];
        for (field, ok) in expected {
            if ok == Some(false) {
                diags.push(Diagnostic::new(field, format!("conflicts with classification map {name}")));
            }
        }
        return if diags.is_empty() {
            Ok(BuiltMap::Equivariant { map, family: Some(Family::Classification(c)) })
        } else {
            Err(diags)
        };
    }

    let eigenmap = match spec.eigenmap.as_deref() {
        None => {
            diags.push(Diagnostic::new("map.eigenmap", "missing eigenmap"));
            None
        }
        Some(name) => match eigenmap_catalog(name) {
            Ok(e) => Some(e),
            Err(_) => {
                diags.push(Diagnostic::new(
                    "map.eigenmap",
                    format!("catalog miss: unknown eigenmap {name:?} (hopf, identity(d), power(d))"),
                ));
                None
            }
        },
    };
    let target = match spec.target.as_deref() {
        None => {
            diags.push(Diagnostic::new("map.target", "missing target kind"));
            None
        }
        Some(kind) => {
            let w = warping(kind);
            if w.is_none() {
                diags.push(Diagnostic::new("map.target", format!("unknown target kind {kind:?}")));
            }
            w
        }
    };
    if let Some(f) = &p.family {
        match coefficient_count(f) {
            None => diags.push(Diagnostic::new("map.profile.family", format!("catalog miss: unknown family {f:?}"))),
            Some(n) if n != p.coefficients.len() => diags.push(Diagnostic::new(
                "map.profile.coefficients",
                format!("family {f} takes {n} coefficients, got {}", p.coefficients.len()),
            )),
            _ => {}
        }
        if p.coefficients.iter().any(|c| !c.is_finite()) {
            diags.push(Diagnostic::new("map.profile.coefficients", "coefficients must be finite"));
        }
    }
    let (Some(eigenmap), Some(target)) = (eigenmap, target) else {
        return Err(diags);
    };
    let n = eigenmap.target_sphere_dim + 1;
    if p.family.as_deref() == Some("latitude") {
        if !diags.is_empty() {
            return Err(diags);
        }
        let model = ModelSpace::new(n, target).expect("dimension at least 2");
        return LatitudeMap::new(eigenmap, p.coefficients[0], model)
            .map(BuiltMap::Latitude)
            .map_err(|e| vec![Diagnostic::new("map.profile.coefficients", e.to_string())]);
    }

    let m = match spec.m {
        None => {
            diags.push(Diagnostic::new("map.m", "missing domain dimension"));
            return Err(diags);
        }
        Some(m) => m,
    };
    if eigenmap.domain_sphere_dim + 1 != m {
        diags.push(Diagnostic::new(
            "map.m",
            format!("eigenmap {} needs m = {}, got {m}", eigenmap.name, eigenmap.domain_sphere_dim + 1),
        ));
    }
    let domain = match spec.domain.as_deref() {
        None => {
            diags.push(Diagnostic::new("map.domain", "missing domain kind"));
            None
        }
        Some(kind) => {
            let w = warping(kind);
            if w.is_none() {
                diags.push(Diagnostic::new("map.domain", format!("unknown domain kind {kind:?}")));
            }
            w
        }
    };
    let flat_pair = is_flat(&spec.domain) && is_flat(&spec.target);
    let mut family = None;
    let profile = if let Some(terms) = &p.terms {
        let mut out = Vec::new();
        for (i, t) in terms.iter().enumerate() {
            match t.as_slice() {
                [c, e] => out.push(Term::power(*c, *e)),
                [c, e, j] if *j >= 0.0 && j.fract() == 0.0 => {
                    out.push(Term { coefficient: *c, exponent: *e, log_power: *j as u32 })
                }
                _ => diags.push(Diagnostic::new(format!("map.profile.terms[{i}]"), "expected [c, p] or [c, p, j]")),
            }
        }
        RadialProfile::from_terms(out).map_err(|e| diags.push(Diagnostic::new("map.profile.terms", e.to_string()))).ok()
    } else {
        let f = p.family.as_deref().unwrap_or_default();
        let c = &p.coefficients;
        if !diags.is_empty() {
            return Err(diags);
        }
        let fam = match f {
            "harmonic" | "biharmonic" if !flat_pair => {
                diags.push(Diagnostic::new("map.profile.family", format!("family {f} needs flat domain and target")));
                None
            }
            "regular_pole" if m != 4 || !eigenmap.is_identity() => {
                diags.push(Diagnostic::new("map.profile.family", "regular_pole needs m = 4 and identity(3)"));
                None
            }
            "harmonic" => Some(Family::Harmonic(c[0], c[1])),
            "biharmonic" => Some(Family::Biharmonic(FamilyCoefficients::new(c[0], c[1], c[2], c[3]))),
            "regular_pole" => Some(Family::RegularPole(c[0], c[1])),
            _ => Some(Family::Constant(c[0])),
        };
        match fam.map(|fam| (fam.profile(m, eigenmap.energy_density), fam)) {
            Some((Ok(p), fam)) => {
                family = Some(fam);
                Some(p)
            }
            Some((Err(e), _)) => {
                diags.push(Diagnostic::new("map.profile", e.to_string()));
                None
            }
            None => None,
        }
    };
    let (Some(domain), Some(profile)) = (domain, profile) else {
        return Err(diags);
    };
    if !diags.is_empty() {
        return Err(diags);
    }
    let domain = ModelSpace::new(m, domain).map_err(|e| vec![Diagnostic::new("map.m", e.to_string())])?;
    let target = ModelSpace::new(n, target).map_err(|e| vec![Diagnostic::new("map.target", e.to_string())])?;
    EquivariantMap::new(domain, target, eigenmap, profile)
        .map(|map| BuiltMap::Equivariant { map, family })
        .map_err(|e| vec![Diagnostic::new("map", e.to_string())])
}

fn check_interval(map: &EquivariantMap, iv: &IntervalSpec, diags: &mut Vec<Diagnostic>) {
    if !(iv.a.is_finite() && iv.b.is_finite()) || iv.a >= iv.b {
        diags.push(Diagnostic::new("interval", format!("empty interval [{}, {}]", iv.a, iv.b)));
        return;
    }
    let wd = map.domain.warping().domain();
    for (field, x) in [("interval.a", iv.a), ("interval.b", iv.b)] {
        if !wd.contains_interior(x) {
            diags.push(Diagnostic::new(field, format!("interval exceeds domain interior of {wd}")));
        }
    }
    let pd = map.profile.domain();
    if !(pd.contains(iv.a) && pd.contains(iv.b)) {
        diags.push(Diagnostic::new("interval", format!("interval exceeds profile domain {pd}")));
    }
}

fn sweep_param_ok(built: &BuiltMap, param: &str) -> bool {
    match built {
        BuiltMap::Latitude(_) => param == "rho0",
        BuiltMap::Equivariant { family, .. } => match (family, coefficient_index(param)) {
            (Some(f), Some(i)) => i < f.arity(),
            _ => false,
        },
    }
}

/// Every problem that would stop `run` before numerics; empty iff the config is runnable.
pub fn validate(cfg: &RunConfig) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let t = &cfg.tolerances;
    for (field, v) in [
        ("tolerances.tau_h", Some(t.tau_h)),
        ("tolerances.tau_b", Some(t.tau_b)),
        ("tolerances.tol_index", t.tol_index),
    ] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                diags.push(Diagnostic::new(field, format!("must be positive, got {v}")));
            }
        }
    }
    if cfg.command == Command::Sweep {
        match &cfg.sweep {
            None => diags.push(Diagnostic::new("sweep", "sweep command needs a sweep block")),
            Some(s) => {
                if s.steps == 0 {
                    diags.push(Diagnostic::new("sweep.steps", "steps must be at least 1"));
                }
                if !(s.from.is_finite() && s.to.is_finite()) {
                    diags.push(Diagnostic::new("sweep", "sweep range must be finite"));
                }
            }
        }
    } else if cfg.sweep.is_some() {
        diags.push(Diagnostic::new("sweep", format!("sweep block given for command {}", cfg.command.name())));
    }

    if cfg.command == Command::Solve {
        return validate_solve(cfg, diags);
    }

    let built = match build_map(&cfg.map) {
        Ok(b) => b,
        Err(mut d) => {
            diags.append(&mut d);
            return diags;
        }
    };
    if let (Some(s), Command::Sweep) = (&cfg.sweep, cfg.command) {
        if !sweep_param_ok(&built, &s.param) {
            diags.push(Diagnostic::new("sweep.param", format!("parameter {:?} is not defined for this map", s.param)));
        }
    }
    match &built {
        BuiltMap::Latitude(_) => {
            if matches!(cfg.command, Command::Families | Command::Classify) {
                diags.push(Diagnostic::new(
                    "command",
                    format!("{} is not defined for latitude maps", cfg.command.name()),
                ));
            }
        }
        BuiltMap::Equivariant { map, family } => {
            match &cfg.interval {
                None => diags.push(Diagnostic::new("interval", "missing interval")),
                Some(iv) => check_interval(map, iv, &mut diags),
            }
            let min_grid = if cfg.command == Command::Stability { MIN_INDEX_GRID } else { 8 };
            if cfg.grid_n < min_grid {
                diags
                    .push(Diagnostic::new("grid_n", format!("grid_n must be at least {min_grid}, got {}", cfg.grid_n)));
            }
            if cfg.command == Command::Families && !matches!(family, Some(Family::Harmonic(..) | Family::Biharmonic(_)))
            {
                diags.push(Diagnostic::new("map.profile.family", "families needs the harmonic or biharmonic family"));
            }
            if cfg.command == Command::Classify && (map.m() != 4 || !map.is_rotationally_symmetric()) {
                diags.push(Diagnostic::new("map", "classify needs a rotationally symmetric map with m = 4"));
            }
        }
    }
    diags
}

fn validate_solve(cfg: &RunConfig, mut diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    let Some(s) = &cfg.solve else {
        diags.push(Diagnostic::new("solve", "solve command needs a solve block"));
        return diags;
    };
    let bvp = s.left.is_some() || s.right.is_some();
    let ivp = s.initial.is_some() || s.r_end.is_some();
    if bvp == ivp
        || (bvp && (s.left.is_none() || s.right.is_none()))
        || (ivp && (s.initial.is_none() || s.r_end.is_none()))
    {
        diags.push(Diagnostic::new("solve", "give either left and right, or initial and r_end"));
    }
    if let Err(e) = s.solver.validate() {
        diags.push(Diagnostic::new("solve.solver", e.to_string()));
    }
    match ode_parts(&cfg.map) {
        Ok((ode, eigenmap)) => {
            if let Some(LeftCondition::RegularPole { .. }) = s.left {
                if ode.m != 4 || !eigenmap.is_identity() {
                    diags.push(Diagnostic::new("solve.left", "regular-pole starts need m = 4 and identity(3)"));
                }
            }
            let wd = ode.sigma.domain();
            let radii: Vec<(&str, f64)> = [
                s.left.map(|l| match l {
                    LeftCondition::State { r, .. } => ("solve.left.r", r),
                    LeftCondition::RegularPole { eps, .. } => ("solve.left.eps", eps),
                }),
                s.right.map(|r| ("solve.right.r", r.r)),
                s.initial.map(|i| ("solve.initial", i[0])),
                s.r_end.map(|r| ("solve.r_end", r)),
            ]
            .into_iter()
            .flatten()
            .collect();
            for (field, r) in radii {
                if !wd.contains_interior(r) {
                    diags.push(Diagnostic::new(field, format!("radius {r} is outside the domain interior {wd}")));
                }
            }
            if let Some(iv) = &cfg.interval {
                if !(iv.a < iv.b) {
                    diags.push(Diagnostic::new("interval", format!("empty interval [{}, {}]", iv.a, iv.b)));
                }
                if cfg.grid_n < 2 {
                    diags.push(Diagnostic::new("grid_n", "grid_n must be at least 2"));
                }
            }
        }
        Err(mut d) => diags.append(&mut d),
    }
    diags
}

/// The ODE data of a map spec (profile ignored).
pub fn ode_parts(spec: &MapSpec) -> Result<(crate::solver::BiharmonicOde, EigenmapDescriptor), Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let domain = spec.domain.as_deref().and_then(warping);
    let target = spec.target.as_deref().and_then(warping);
    if domain.is_none() {
        diags.push(Diagnostic::new("map.domain", "missing or unknown domain kind"));
    }
    if target.is_none() {
        diags.push(Diagnostic::new("map.target", "missing or unknown target kind"));
    }
    let eigenmap = match spec.eigenmap.as_deref().map(eigenmap_catalog) {
        Some(Ok(e)) => Some(e),
        Some(Err(_)) => {
            diags.push(Diagnostic::new("map.eigenmap", "catalog miss: unknown eigenmap"));
            None
        }
        None => {
            diags.push(Diagnostic::new("map.eigenmap", "missing eigenmap"));
            None
        }
    };
    let (Some(domain), Some(target), Some(eigenmap), true) = (domain, target, eigenmap, diags.is_empty()) else {
        return Err(diags);
    };
    let m = spec.m.unwrap_or(eigenmap.domain_sphere_dim + 1);
    if m != eigenmap.domain_sphere_dim + 1 {
        return Err(vec![Diagnostic::new(
            "map.m",
            format!("eigenmap {} needs m = {}", eigenmap.name, eigenmap.domain_sphere_dim + 1),
        )]);
    }
    crate::solver::BiharmonicOde::new(m, eigenmap.energy_density, domain, target)
        .map(|ode| (ode, eigenmap))
        .map_err(|e| vec![Diagnostic::new("map", e.to_string())])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        parse_config(text).unwrap()
    }

    const INVERSION: &str = r#"{"command":"verify","map":{"profile":{"classification":"inversion"}},
        "interval":{"a":0.5,"b":2.0},"grid_n":64}"#;

    #[test]
    fn valid_inversion_config() {
        assert_eq!(validate(&cfg(INVERSION)), vec![]);
    }

    #[test]
    fn hyperbolic_interval_beyond_profile_domain() {
        let c = cfg(
            r#"{"command":"verify","map":{"profile":{"classification":"hyperbolic"}},"interval":{"a":0.5,"b":1.5}}"#,
        );
        let d = validate(&c);
        assert!(d.iter().any(|d| d.message == "interval exceeds profile domain [0,1)"), "{d:?}");
    }

    #[test]
    fn unknown_eigenmap_is_a_catalog_miss() {
        let c = cfg(r#"{"command":"verify","map":{"domain":"flat","target":"flat","m":4,"eigenmap":"veronese",
            "profile":{"terms":[[1,1]]}},"interval":{"a":1,"b":2}}"#);
        let d = validate(&c);
        assert!(d.iter().any(|d| d.message.contains("catalog miss")), "{d:?}");
    }

    #[test]
    fn empty_interval() {
        let c =
            cfg(r#"{"command":"verify","map":{"profile":{"classification":"inversion"}},"interval":{"a":1,"b":1}}"#);
        assert!(!validate(&c).is_empty());
    }

    #[test]
    fn parse_errors_carry_position() {
        let d = parse_config("{\n  \"command\": \"verify\",\n  \"bogus\": 1\n}").unwrap_err();
        assert_eq!(d[0].line, Some(3));
        assert!(d[0].message.contains("bogus"));
    }

    #[test]
    fn latitude_and_sweep_params() {
        let c = cfg(
            r#"{"command":"sweep","map":{"target":"spherical","eigenmap":"hopf","profile":{"family":"latitude","coefficients":[0.7]}},
            "sweep":{"param":"rho0","from":0.1,"to":1.5,"steps":50}}"#,
        );
        assert_eq!(validate(&c), vec![]);
        let c = cfg(
            r#"{"command":"sweep","map":{"target":"spherical","eigenmap":"hopf","profile":{"family":"latitude","coefficients":[0.7]}},
            "sweep":{"param":"c3","from":0.1,"to":1.5,"steps":50}}"#,
        );
        assert_eq!(validate(&c).len(), 1);
    }

    #[test]
    fn solve_block_shape() {
        let c = cfg(r#"{"command":"solve","map":{"domain":"flat","target":"flat","m":4,"eigenmap":"identity(3)"},
            "solve":{"left":{"mode":"regular_pole","eps":0.001,"c1_guess":0,"c2_guess":0},"right":{"r":1,"rho":2,"rho_p":4}}}"#);
        assert_eq!(validate(&c), vec![]);
        let c = cfg(r#"{"command":"solve","map":{"domain":"flat","target":"flat","m":4,"eigenmap":"identity(3)"},
            "solve":{"left":{"mode":"regular_pole","eps":0.001,"c1_guess":0,"c2_guess":0}}}"#);
        assert!(!validate(&c).is_empty());
    }
}
