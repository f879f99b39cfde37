//! JSON run configuration.
//!
//! Every dimensional key carries its unit as a suffix (`_eV`, `_ueV`, `_nm`,
//! `_eA`). Validation collects all problems in one pass instead of stopping
//! at the first.

use serde_json::{Map, Value};
use std::path::PathBuf;

use crate::amplitude::GridPolicy;
use crate::dynamics::PumpRoute;
use crate::physics::{DefectPairConfig, LevelEnergies};
use crate::sweep::{linspace, SweepParameter};
use crate::units::uev;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub physical: DefectPairConfig,
    pub grid: GridPolicy,
    pub run: RunOptions,
    pub output: OutputOptions,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOptions {
    pub sweep: Option<SweepOptions>,
    pub pump: Option<PumpOptions>,
    pub validate: Option<ValidateOptions>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub parameter: SweepParameter,
    /// Internal units (eV, nm, e·Å).
    pub values: Vec<f64>,
    pub auto_center: bool,
    pub operating_point: Option<OperatingPointOptions>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPointOptions {
    pub eta_min: f64,
    pub f_min: f64,
    pub d_x_range: (f64, f64),
    pub scan_points: usize,
    pub refine_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpOptions {
    /// eV
    pub e_x: f64,
    pub e_y: f64,
    pub delta: f64,
    pub route: PumpRoute,
    /// t_end in units of τ_drive.
    pub t_end_tau: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Markov,
    Unitary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndTime {
    /// t_end = value / γ_xyS.
    DecayTimes(f64),
    /// t_end = value × 2π/Δ, the mode-grid recurrence time.
    RecurrenceFraction(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions {
    pub integrator: Integrator,
    pub t_end: EndTime,
    pub tolerance: f64,
    pub samples: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            integrator: Integrator::Markov,
            t_end: EndTime::DecayTimes(20.0),
            tolerance: 1e-3,
            samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputOptions {
    pub directory: Option<PathBuf>,
    pub csv: bool,
    pub json: bool,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            directory: None,
            csv: true,
            json: true,
        }
    }
}

/// Reads keys from one JSON object, recording every problem.
struct Section<'a> {
    path: String,
    map: Option<&'a Map<String, Value>>,
}

impl<'a> Section<'a> {
    fn new(path: &str, value: Option<&'a Value>, issues: &mut Vec<String>) -> Self {
        let map = match value {
            None => None,
            Some(Value::Object(m)) => Some(m),
            Some(_) => {
                issues.push(format!("{path}: must be an object"));
                None
            }
        };
        Section {
            path: path.to_string(),
            map,
        }
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn get(&self, k: &str) -> Option<&'a Value> {
        self.map.and_then(|m| m.get(k))
    }

    fn has(&self, k: &str) -> bool {
        self.get(k).is_some()
    }

    fn reject_unknown(&self, allowed: &[&str], issues: &mut Vec<String>) {
        let Some(map) = self.map else { return };
        for k in map.keys() {
            if allowed.contains(&k.as_str()) {
                continue;
            }
            let with_unit: Vec<&str> = allowed
                .iter()
                .copied()
                .filter(|a| a.starts_with(k.as_str()) && a[k.len()..].starts_with('_'))
                .collect();
            if with_unit.is_empty() {
                issues.push(format!("{}: unknown key", self.key(k)));
            } else {
                issues.push(format!(
                    "{}: missing unit suffix (expected {})",
                    self.key(k),
                    with_unit.join(" or ")
                ));
            }
        }
    }

    fn number(&self, k: &str, issues: &mut Vec<String>) -> Option<f64> {
        match self.get(k)? {
            Value::Number(n) => n.as_f64(),
            _ => {
                issues.push(format!("{}: must be a number", self.key(k)));
                None
            }
        }
    }

    fn required(&self, k: &str, issues: &mut Vec<String>) -> Option<f64> {
        if !self.has(k) {
            issues.push(format!("{}: missing required key", self.key(k)));
            return None;
        }
        self.number(k, issues)
    }

    fn count(&self, k: &str, issues: &mut Vec<String>) -> Option<usize> {
        match self.get(k)? {
            Value::Number(n) if n.as_u64().is_some() => Some(n.as_u64().unwrap() as usize),
            _ => {
                issues.push(format!("{}: must be a non-negative integer", self.key(k)));
                None
            }
        }
    }

    fn string(&self, k: &str, issues: &mut Vec<String>) -> Option<&'a str> {
        match self.get(k)? {
            Value::String(s) => Some(s),
            _ => {
                issues.push(format!("{}: must be a string", self.key(k)));
                None
            }
        }
    }

    fn boolean(&self, k: &str, issues: &mut Vec<String>) -> Option<bool> {
        match self.get(k)? {
            Value::Bool(b) => Some(*b),
            _ => {
                issues.push(format!("{}: must be true or false", self.key(k)));
                None
            }
        }
    }

    fn numbers(&self, k: &str, issues: &mut Vec<String>) -> Option<Vec<f64>> {
        match self.get(k)? {
            Value::Array(a) => {
                let v: Option<Vec<f64>> = a.iter().map(|x| x.as_f64()).collect();
                if v.is_none() {
                    issues.push(format!("{}: must be an array of numbers", self.key(k)));
                }
                v
            }
            _ => {
                issues.push(format!("{}: must be an array of numbers", self.key(k)));
                None
            }
        }
    }

    /// Range check; `None` bounds are open.
    fn check(&self, k: &str, v: Option<f64>, rule: Rule, issues: &mut Vec<String>) {
        let Some(v) = v else { return };
        let bad = match rule {
            Rule::Positive => !(v > 0.0),
            Rule::NonNegative => !(v >= 0.0),
            Rule::AtLeast(b) => !(v >= b),
            Rule::Finite => false,
        };
        if !v.is_finite() {
            issues.push(format!("{} = {v}: must be finite", self.key(k)));
        } else if bad {
            issues.push(format!("{} = {v}: {}", self.key(k), rule.describe()));
        }
    }
}

#[derive(Clone, Copy)]
enum Rule {
    Positive,
    NonNegative,
    AtLeast(f64),
    Finite,
}

impl Rule {
    fn describe(self) -> String {
        match self {
            Rule::Positive => "must be > 0".into(),
            Rule::NonNegative => "must be >= 0".into(),
            Rule::AtLeast(b) => format!("must be >= {b}"),
            Rule::Finite => "must be finite".into(),
        }
    }
}

const PHYSICAL_KEYS: [&str; 10] = [
    "omega_yS_eV",
    "omega_xS_offset_ueV",
    "omega_x_eV",
    "omega_y_eV",
    "d_x_eA",
    "d_y_eA",
    "separation_nm",
    "epsilon_r",
    "axis",
    "gamma_ref_ueV",
];

fn parse_physical(root: &Section, issues: &mut Vec<String>) -> Option<DefectPairConfig> {
    let s = Section::new("physical", root.get("physical"), issues);
    if !root.has("physical") {
        issues.push("physical: missing required section".into());
    }
    s.reject_unknown(&PHYSICAL_KEYS, issues);

    let dressed = s.has("omega_yS_eV") || s.has("omega_xS_offset_ueV");
    let bare = s.has("omega_x_eV") || s.has("omega_y_eV");
    let levels = if dressed && bare {
        issues.push(
            "physical: give either omega_yS_eV + omega_xS_offset_ueV or omega_x_eV + omega_y_eV, not both"
                .into(),
        );
        None
    } else if bare {
        let wx = s.required("omega_x_eV", issues);
        let wy = s.required("omega_y_eV", issues);
        s.check("omega_x_eV", wx, Rule::Positive, issues);
        s.check("omega_y_eV", wy, Rule::Positive, issues);
        wx.zip(wy)
            .map(|(omega_x, omega_y)| LevelEnergies::Bare { omega_x, omega_y })
    } else {
        let wys = s.required("omega_yS_eV", issues);
        let off = s.required("omega_xS_offset_ueV", issues);
        s.check("omega_yS_eV", wys, Rule::Positive, issues);
        s.check("omega_xS_offset_ueV", off, Rule::Finite, issues);
        wys.zip(off).map(|(omega_ys, off)| LevelEnergies::Dressed {
            omega_ys,
            omega_xs_offset: uev(off),
        })
    };

    let d_x = s.required("d_x_eA", issues);
    let d_y = s.required("d_y_eA", issues);
    let sep = s.required("separation_nm", issues);
    let eps = s.required("epsilon_r", issues);
    let gamma = s.required("gamma_ref_ueV", issues);
    s.check("d_x_eA", d_x, Rule::NonNegative, issues);
    s.check("d_y_eA", d_y, Rule::NonNegative, issues);
    s.check("separation_nm", sep, Rule::Positive, issues);
    s.check("epsilon_r", eps, Rule::AtLeast(1.0), issues);
    s.check("gamma_ref_ueV", gamma, Rule::Positive, issues);

    let axis = match s.numbers("axis", issues) {
        None if s.has("axis") => None,
        None => Some([1.0, 0.0, 0.0]),
        Some(v) if v.len() == 3 => {
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                issues.push(format!("physical.axis: must be a unit vector (|axis| = {norm})"));
            }
            Some([v[0], v[1], v[2]])
        }
        Some(v) => {
            issues.push(format!("physical.axis: needs 3 components (got {})", v.len()));
            None
        }
    };

    Some(DefectPairConfig {
        levels: levels?,
        d_x: d_x?,
        d_y: d_y?,
        separation: sep?,
        epsilon_r: eps?,
        axis: axis?,
        gamma_ref: uev(gamma?),
    })
}

fn parse_grid(root: &Section, issues: &mut Vec<String>) -> GridPolicy {
    let s = Section::new("grid", root.get("grid"), issues);
    s.reject_unknown(
        &[
            "n_points",
            "half_width_ueV",
            "points_per_linewidth",
            "max_points",
            "margin_linewidths",
        ],
        issues,
    );
    let mut g = GridPolicy::default();
    if let Some(n) = s.count("n_points", issues) {
        if n < 3 {
            issues.push(format!("grid.n_points = {n}: must be >= 3"));
        }
        g.n_points = Some(n);
    }
    if let Some(h) = s.number("half_width_ueV", issues) {
        s.check("half_width_ueV", Some(h), Rule::Positive, issues);
        g.half_width = Some(uev(h));
    }
    if let Some(p) = s.number("points_per_linewidth", issues) {
        s.check("points_per_linewidth", Some(p), Rule::Positive, issues);
        g.points_per_linewidth = p;
    }
    if let Some(m) = s.count("max_points", issues) {
        if m < 3 {
            issues.push(format!("grid.max_points = {m}: must be >= 3"));
        }
        g.max_points = m;
    }
    if let Some(m) = s.number("margin_linewidths", issues) {
        s.check("margin_linewidths", Some(m), Rule::AtLeast(20.0), issues);
        g.margin_linewidths = m;
    }
    g
}

fn parse_sweep(s: &Section, issues: &mut Vec<String>) -> Option<SweepOptions> {
    s.reject_unknown(&["parameter", "values", "linspace", "auto_center", "operating_point"], issues);
    let (parameter, scale) = match s.string("parameter", issues) {
        Some("d_x_eA") => (SweepParameter::DX, 1.0),
        Some("omega_xS_offset_ueV") => (SweepParameter::OmegaXsOffset, uev(1.0)),
        Some("separation_nm") => (SweepParameter::Separation, 1.0),
        Some("gamma_ref_ueV") => (SweepParameter::GammaRef, uev(1.0)),
        Some(other) => {
            issues.push(format!(
                "run.sweep.parameter = {other:?}: expected d_x_eA, omega_xS_offset_ueV, separation_nm or gamma_ref_ueV"
            ));
            return None;
        }
        None => {
            issues.push("run.sweep.parameter: missing required key".into());
            return None;
        }
    };
    let values = match (s.has("values"), s.has("linspace")) {
        (true, true) => {
            issues.push("run.sweep: give values or linspace, not both".into());
            None
        }
        (true, false) => s.numbers("values", issues),
        (false, true) => {
            let l = Section::new("run.sweep.linspace", s.get("linspace"), issues);
            l.reject_unknown(&["start", "stop", "points"], issues);
            let a = l.required("start", issues);
            let b = l.required("stop", issues);
            let n = l.count("points", issues);
            if l.map.is_some() && n.is_none() && !l.has("points") {
                issues.push("run.sweep.linspace.points: missing required key".into());
            }
            match (a, b, n) {
                (Some(a), Some(b), Some(n)) if n >= 1 => Some(linspace(a, b, n)),
                (_, _, Some(0)) => {
                    issues.push("run.sweep.linspace.points = 0: must be >= 1".into());
                    None
                }
                _ => None,
            }
        }
        (false, false) => {
            issues.push("run.sweep: needs values or linspace".into());
            None
        }
    };
    let values: Vec<f64> = values?.into_iter().map(|v| v * scale).collect();
    if values.is_empty() {
        issues.push("run.sweep: value list is empty".into());
    }
    if values.iter().any(|v| !v.is_finite()) {
        issues.push("run.sweep: values must be finite".into());
    }
    let auto_center = s.boolean("auto_center", issues).unwrap_or(true);

    let operating_point = if s.has("operating_point") {
        let o = Section::new("run.sweep.operating_point", s.get("operating_point"), issues);
        o.reject_unknown(
            &["eta_min", "f_min", "d_x_min_eA", "d_x_max_eA", "scan_points", "refine_iterations"],
            issues,
        );
        let eta_min = o.required("eta_min", issues);
        let f_min = o.required("f_min", issues);
        let lo = o.required("d_x_min_eA", issues);
        let hi = o.required("d_x_max_eA", issues);
        o.check("d_x_min_eA", lo, Rule::NonNegative, issues);
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if !(hi > lo) {
                issues.push(format!(
                    "run.sweep.operating_point: d_x_max_eA ({hi}) must exceed d_x_min_eA ({lo})"
                ));
            }
        }
        let scan_points = o.count("scan_points", issues).unwrap_or(21);
        let refine_iterations = o.count("refine_iterations", issues).unwrap_or(30);
        Some(OperatingPointOptions {
            eta_min: eta_min?,
            f_min: f_min?,
            d_x_range: (lo?, hi?),
            scan_points,
            refine_iterations,
        })
    } else {
        None
    };

    Some(SweepOptions {
        parameter,
        values,
        auto_center,
        operating_point,
    })
}

fn parse_pump(s: &Section, issues: &mut Vec<String>) -> Option<PumpOptions> {
    s.reject_unknown(
        &["E_x_ueV", "E_y_ueV", "delta_ueV", "route", "t_end_tau_drive", "samples"],
        issues,
    );
    let e_x = s.required("E_x_ueV", issues);
    let e_y = s.required("E_y_ueV", issues);
    let delta = s.required("delta_ueV", issues);
    s.check("E_x_ueV", e_x, Rule::NonNegative, issues);
    s.check("E_y_ueV", e_y, Rule::NonNegative, issues);
    if delta == Some(0.0) {
        issues.push("run.pump.delta_ueV = 0: must be nonzero".into());
    }
    let route = match s.string("route", issues) {
        None | Some("via_xS") => PumpRoute::ViaXs,
        Some("via_yS") => PumpRoute::ViaYs,
        Some(r) => {
            issues.push(format!("run.pump.route = {r:?}: expected via_xS or via_yS"));
            PumpRoute::ViaXs
        }
    };
    let t_end_tau = s.number("t_end_tau_drive", issues).unwrap_or(1.0);
    s.check("t_end_tau_drive", Some(t_end_tau), Rule::Positive, issues);
    let samples = s.count("samples", issues).unwrap_or(400);
    Some(PumpOptions {
        e_x: uev(e_x?),
        e_y: uev(e_y?),
        delta: uev(delta?),
        route,
        t_end_tau,
        samples,
    })
}

fn parse_validate(s: &Section, issues: &mut Vec<String>) -> ValidateOptions {
    s.reject_unknown(
        &[
            "integrator",
            "t_end_decay_times",
            "t_end_recurrence_fraction",
            "tolerance",
            "samples",
        ],
        issues,
    );
    let mut v = ValidateOptions::default();
    match s.string("integrator", issues) {
        None | Some("markov") => {}
        Some("unitary") => {
            v.integrator = Integrator::Unitary;
            v.tolerance = 1e-2;
            v.t_end = EndTime::RecurrenceFraction(0.95);
        }
        Some(o) => issues.push(format!("run.validate.integrator = {o:?}: expected markov or unitary")),
    }
    match (s.number("t_end_decay_times", issues), s.number("t_end_recurrence_fraction", issues)) {
        (Some(_), Some(_)) => issues.push(
            "run.validate: give t_end_decay_times or t_end_recurrence_fraction, not both".into(),
        ),
        (Some(d), None) => {
            s.check("t_end_decay_times", Some(d), Rule::Positive, issues);
            v.t_end = EndTime::DecayTimes(d);
        }
        (None, Some(f)) => {
            s.check("t_end_recurrence_fraction", Some(f), Rule::Positive, issues);
            v.t_end = EndTime::RecurrenceFraction(f);
        }
        (None, None) => {}
    }
    if let Some(t) = s.number("tolerance", issues) {
        s.check("tolerance", Some(t), Rule::Positive, issues);
        v.tolerance = t;
    }
    if let Some(n) = s.count("samples", issues) {
        v.samples = n;
    }
    v
}

fn parse_run(root: &Section, issues: &mut Vec<String>) -> RunOptions {
    let s = Section::new("run", root.get("run"), issues);
    s.reject_unknown(&["sweep", "pump", "validate"], issues);
    let mut out = RunOptions::default();
    if s.has("sweep") {
        let sw = Section::new("run.sweep", s.get("sweep"), issues);
        if sw.map.is_some() {
            out.sweep = parse_sweep(&sw, issues);
        }
    }
    if s.has("pump") {
        let p = Section::new("run.pump", s.get("pump"), issues);
        if p.map.is_some() {
            out.pump = parse_pump(&p, issues);
        }
    }
    if s.has("validate") {
        let v = Section::new("run.validate", s.get("validate"), issues);
        if v.map.is_some() {
            out.validate = Some(parse_validate(&v, issues));
        }
    }
    out
}

fn parse_output(root: &Section, issues: &mut Vec<String>) -> OutputOptions {
    let s = Section::new("output", root.get("output"), issues);
    s.reject_unknown(&["directory", "formats"], issues);
    let mut o = OutputOptions::default();
    if let Some(d) = s.string("directory", issues) {
        o.directory = Some(PathBuf::from(d));
    }
    if let Some(v) = s.get("formats") {
        match v.as_array() {
            Some(list) => {
                o.csv = false;
                o.json = false;
                for f in list {
                    match f.as_str() {
                        Some("csv") => o.csv = true,
                        Some("json") => o.json = true,
                        _ => issues.push(format!("output.formats: unsupported entry {f}")),
                    }
                }
            }
            None => issues.push("output.formats: must be an array of strings".into()),
        }
    }
    o
}

/// Parse and validate a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(vec![format!("not valid JSON: {e}")]))?;
    let mut issues = Vec::new();
    let root = Section::new("", Some(&value), &mut issues);
    if root.map.is_none() {
        return Err(Error::Config(issues));
    }
    root.reject_unknown(&["physical", "grid", "run", "output"], &mut issues);
    let physical = parse_physical(&root, &mut issues);
    let grid = parse_grid(&root, &mut issues);
    let run = parse_run(&root, &mut issues);
    let output = parse_output(&root, &mut issues);
    if let Some(p) = &physical {
        if issues.is_empty() {
            issues.extend(p.violations());
        }
    }
    match physical {
        Some(physical) if issues.is_empty() => Ok(RunConfig {
            physical,
            grid,
            run,
            output,
        }),
        _ => Err(Error::Config(issues)),
    }
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::MICRO_EV;

    const FIG2: &str = r#"{
        "physical": {
            "omega_yS_eV": 2.0, "omega_xS_offset_ueV": 10.0,
            "d_x_eA": 1.0, "d_y_eA": 1.0, "separation_nm": 5.0,
            "epsilon_r": 2.0, "axis": [1, 0, 0], "gamma_ref_ueV": 0.2
        }
    }"#;

    fn issues(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(Error::Config(v)) => v,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn reference_values_parse_exactly() {
        let c = parse_config(FIG2).unwrap();
        assert_eq!(c.physical, DefectPairConfig::reference());
        assert_eq!(c.grid, GridPolicy::default());
        assert!(c.output.csv && c.output.json);
    }

    #[test]
    fn empty_object_lists_required_keys() {
        let v = issues("{}");
        for k in [
            "physical",
            "omega_yS_eV",
            "omega_xS_offset_ueV",
            "d_x_eA",
            "d_y_eA",
            "separation_nm",
            "epsilon_r",
            "gamma_ref_ueV",
        ] {
            assert!(v.iter().any(|i| i.contains(k)), "{k} not in {v:?}");
        }
    }

    #[test]
    fn negative_separation_is_a_single_named_error() {
        let v = issues(&FIG2.replace("\"separation_nm\": 5.0", "\"separation_nm\": -1"));
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].contains("separation_nm") && v[0].contains("> 0"));
    }

    #[test]
    fn missing_unit_suffix_is_named() {
        let v = issues(&FIG2.replace("\"separation_nm\"", "\"separation\""));
        assert!(v.iter().any(|i| i.contains("physical.separation") && i.contains("separation_nm")));
    }

    #[test]
    fn unknown_keys_and_several_problems_reported_together() {
        let text = FIG2
            .replace("\"epsilon_r\": 2.0", "\"epsilon_r\": 0.5, \"colour\": 1")
            .replace("\"d_y_eA\": 1.0", "\"d_y_eA\": -2");
        let v = issues(&text);
        assert_eq!(v.len(), 3, "{v:?}");
    }

    #[test]
    fn run_sections_parse() {
        let text = r#"{
            "physical": {"omega_x_eV": 2.0, "omega_y_eV": 2.0, "d_x_eA": 1, "d_y_eA": 1,
                         "separation_nm": 5, "epsilon_r": 2, "gamma_ref_ueV": 0.2},
            "grid": {"n_points": 301},
            "run": {
                "sweep": {"parameter": "omega_xS_offset_ueV", "linspace": {"start": -20, "stop": 20, "points": 5}},
                "pump": {"E_x_ueV": 0.0003, "E_y_ueV": 0.0005, "delta_ueV": 0.01, "route": "via_yS"},
                "validate": {"integrator": "unitary"}
            },
            "output": {"directory": "out", "formats": ["csv"]}
        }"#;
        let c = parse_config(text).unwrap();
        let sw = c.run.sweep.unwrap();
        assert_eq!(sw.values.len(), 5);
        assert!((sw.values[0] + 20.0 * MICRO_EV).abs() < 1e-18);
        assert_eq!(c.run.pump.unwrap().route, PumpRoute::ViaYs);
        assert_eq!(c.run.validate.unwrap().integrator, Integrator::Unitary);
        assert!(c.output.csv && !c.output.json);
        assert_eq!(c.grid.n_points, Some(301));
    }
}
