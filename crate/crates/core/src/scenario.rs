//! Batch scenarios driven by a JSON configuration.
//!
//! Every scenario writes its files atomically into an output directory and
//! produces byte-identical output for identical input.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bv1d::sweep_relaxed_1d;
use crate::competitor::{
    build_region, bump_level_set, case3_leading_bound, divergence_identity_residual,
    field_constants, level_set_a2_integral, scan_family, search_certificate, taylor_flux_check,
    CaseTag, FamilySpec, GeometryParams,
};
use crate::error::{Error, Result};
use crate::field2d::{BBox, GridData, SampledField2D};
use crate::laws::{build_envelope, LawsConfig};
use crate::parallel::Execution;
use crate::report::{emit_sweep, write_atomic, Cell, Format, Json, Table};

/// Default cell size of the planar quadrature.
pub const DEFAULT_H: f64 = 1.0 / 256.0;
/// Default half-width of the square domain of affine fields.
pub const DEFAULT_HALF_WIDTH: f64 = 2.5;
/// Slopes scanned by `yield-sweep` when none are given.
pub const DEFAULT_LAMBDAS: [f64; 7] = [0.5, 0.9, 0.95, 1.2, 1.5, 2.0, 3.0];
/// Levels checked by `case3-flux` when no grid is given.
pub const DEFAULT_FLUX_SIGMAS: [f64; 3] = [0.02, 0.04, 0.08];
/// Number of strain samples in the envelope table.
const ENVELOPE_SAMPLES: usize = 301;

const SWEEP_COLUMNS: [&str; 6] = [
    "lambda",
    "alpha",
    "sigma",
    "gap",
    "bv_distance",
    "certified",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Envelope,
    Min1d,
    YieldSweep,
    GapAffine,
    Certify,
    Case3Flux,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Envelope => "envelope",
            ScenarioKind::Min1d => "min1d",
            ScenarioKind::YieldSweep => "yield-sweep",
            ScenarioKind::GapAffine => "gap-affine",
            ScenarioKind::Certify => "certify",
            ScenarioKind::Case3Flux => "case3-flux",
        }
    }
}

fn default_r() -> f64 {
    1.0
}

fn default_big_r() -> f64 {
    2.0
}

fn default_eta() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Restricts family-based scenarios to one family.
    #[serde(default)]
    pub family: Option<CaseTag>,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_big_r", rename = "R")]
    pub big_r: f64,
    #[serde(default)]
    pub sigma_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default = "default_eta")]
    pub eta: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            family: None,
            r: default_r(),
            big_r: default_big_r(),
            sigma_grid: None,
            alpha_grid: None,
            eta: default_eta(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldConfig {
    /// `u = lambda x_2` on `[x_min, x_max] x [y_min, y_max]`.
    Affine {
        lambda: f64,
        #[serde(default)]
        domain: Option<[f64; 4]>,
    },
    /// Node values from a JSON file `{origin, spacing, shape, values}`.
    Grid { path: PathBuf },
}

fn default_length() -> f64 {
    1.0
}

fn default_t_max() -> f64 {
    3.0
}

fn default_steps() -> usize {
    30
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneDConfig {
    #[serde(default = "default_length")]
    pub l: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

impl Default for OneDConfig {
    fn default() -> Self {
        OneDConfig {
            l: default_length(),
            t_max: default_t_max(),
            steps: default_steps(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub laws: LawsConfig,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub field: Option<FieldConfig>,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub oned: Option<OneDConfig>,
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
}

impl ScenarioConfig {
    /// Parses a configuration; errors carry the dotted path of the offending key.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let mut path = e.path().to_string();
            let msg = e.into_inner().to_string();
            if let Some(name) = msg
                .strip_prefix("missing field `")
                .and_then(|m| m.split('`').next())
            {
                path = if path == "." {
                    name.to_string()
                } else {
                    format!("{path}.{name}")
                };
            }
            let field = if path == "." {
                "config".to_string()
            } else {
                path
            };
            Error::config(field, msg)
        })
    }

    /// The `scenario` key of a document that may not parse as a whole.
    pub fn peek_scenario(text: &str) -> Option<String> {
        let v: serde_json::Value = serde_json::from_str(text).ok()?;
        v.get("scenario")?.as_str().map(str::to_string)
    }

    /// Reads a configuration; relative grid paths are resolved against the
    /// directory of the file.
    pub fn from_path(path: &Path) -> std::result::Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|e| {
            ScenarioError::named(
                None,
                Error::config("config", format!("{}: {e}", path.display())),
            )
        })?;
        let mut config = Self::from_json(&text)
            .map_err(|e| ScenarioError::named(Self::peek_scenario(&text), e))?;
        if let Some(FieldConfig::Grid { path: grid }) = &mut config.field {
            if grid.is_relative() {
                if let Some(dir) = path.parent() {
                    *grid = dir.join(&*grid);
                }
            }
        }
        Ok(config)
    }

    pub fn resolution(&self) -> f64 {
        self.h.unwrap_or(DEFAULT_H)
    }

    /// Checks values that the schema cannot express.
    pub fn validate(&self) -> Result<()> {
        let h = self.resolution();
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::config("h", format!("must be positive, got {h}")));
        }
        let g = &self.geometry;
        if !(g.r > 0.0 && g.r < g.big_r && g.big_r.is_finite()) {
            return Err(Error::config(
                "geometry.r",
                format!("need 0 < r < R, got r = {}, R = {}", g.r, g.big_r),
            ));
        }
        if !(g.eta >= 0.0) {
            return Err(Error::config("geometry.eta", "must be non-negative"));
        }
        for (name, grid) in [
            ("geometry.sigma_grid", &g.sigma_grid),
            ("geometry.alpha_grid", &g.alpha_grid),
        ] {
            if grid.as_ref().is_some_and(|v| v.is_empty()) {
                return Err(Error::config(name, "grid must not be empty"));
            }
        }
        if self
            .lambdas
            .as_ref()
            .is_some_and(|v| v.is_empty() || v.iter().any(|&l| !(l > 0.0)))
        {
            return Err(Error::config(
                "lambdas",
                "need a nonempty list of positive slopes",
            ));
        }
        if let Some(o) = &self.oned {
            if !(o.l > 0.0 && o.t_max >= 0.0 && o.steps > 0) {
                return Err(Error::config(
                    "oned",
                    "need l > 0, t_max >= 0 and steps > 0",
                ));
            }
        }
        match &self.field {
            Some(FieldConfig::Affine { lambda, domain }) => {
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::config("field.lambda", "must be positive"));
                }
                if let Some([x0, x1, y0, y1]) = domain {
                    if !(x0 < x1 && y0 < y1) {
                        return Err(Error::config(
                            "field.domain",
                            "expected [x_min, x_max, y_min, y_max]",
                        ));
                    }
                }
            }
            Some(FieldConfig::Grid { path }) => {
                if !path.exists() {
                    return Err(Error::config(
                        "field.path",
                        format!("{} does not exist", path.display()),
                    ));
                }
            }
            None => {
                if matches!(
                    self.scenario,
                    ScenarioKind::GapAffine | ScenarioKind::Certify | ScenarioKind::Case3Flux
                ) {
                    return Err(Error::config("field", "this scenario needs a field"));
                }
            }
        }
        Ok(())
    }
}

/// Failure of a scenario, with enough context for the error JSON.
#[derive(Debug)]
pub struct ScenarioError {
    pub scenario: Option<String>,
    pub field: Option<String>,
    pub error: Error,
}

impl ScenarioError {
    pub fn new(scenario: Option<ScenarioKind>, error: Error) -> Self {
        Self::named(scenario.map(|s| s.name().to_string()), error)
    }

    pub fn named(scenario: Option<String>, error: Error) -> Self {
        let field = match &error {
            Error::Config { field, .. } => Some(field.clone()),
            _ => None,
        };
        ScenarioError {
            scenario,
            field,
            error,
        }
    }

    pub fn is_usage(&self) -> bool {
        matches!(self.error, Error::Config { .. })
    }

    /// `{error, scenario, field}`.
    pub fn to_json(&self) -> Json {
        let opt = |s: &Option<String>| s.clone().map_or(Json::Null, Json::Str);
        Json::obj([
            ("error", Json::Str(self.error.to_string())),
            ("scenario", opt(&self.scenario)),
            ("field", opt(&self.field)),
        ])
    }
}

fn build_field(config: &ScenarioConfig, lambda_override: Option<f64>) -> Result<SampledField2D> {
    let affine = |lambda: f64, domain: Option<[f64; 4]>| {
        let b = domain.map_or(BBox::centered(DEFAULT_HALF_WIDTH), |[x0, x1, y0, y1]| {
            BBox::new([x0, y0], [x1, y1])
        });
        SampledField2D::affine(lambda, b)
    };
    match (&config.field, lambda_override) {
        (Some(FieldConfig::Affine { domain, .. }), Some(l)) => Ok(affine(l, *domain)),
        (_, Some(l)) => Ok(affine(l, None)),
        (Some(FieldConfig::Affine { lambda, domain }), None) => Ok(affine(*lambda, *domain)),
        (Some(FieldConfig::Grid { path }), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::config("field.path", format!("{}: {e}", path.display())))?;
            let data: GridData = serde_json::from_str(&text)
                .map_err(|e| Error::config("field.path", format!("bad grid file: {e}")))?;
            SampledField2D::grid(data)
        }
        (None, None) => Err(Error::config("field", "this scenario needs a field")),
    }
}

fn geometry_params(config: &ScenarioConfig) -> GeometryParams {
    GeometryParams {
        r: config.geometry.r,
        big_r: config.geometry.big_r,
        h: config.resolution(),
    }
}

fn family_spec(config: &ScenarioConfig, case: CaseTag) -> FamilySpec {
    FamilySpec {
        case,
        geometry: geometry_params(config),
        sigma_grid: config.geometry.sigma_grid.clone(),
        alpha_grid: config.geometry.alpha_grid.clone(),
        eta: config.geometry.eta,
    }
}

fn families(config: &ScenarioConfig, fallback: &[CaseTag]) -> Vec<CaseTag> {
    config
        .geometry
        .family
        .map_or_else(|| fallback.to_vec(), |f| vec![f])
}

/// Runs the configured scenario and returns the written files in order.
pub fn run_scenario(
    config: &ScenarioConfig,
    out_dir: &Path,
    exec: Execution,
) -> std::result::Result<Vec<PathBuf>, ScenarioError> {
    let wrap = |e: Error| ScenarioError::new(Some(config.scenario), e);
    config.validate().map_err(wrap)?;
    fs::create_dir_all(out_dir).map_err(|e| wrap(e.into()))?;
    run(config, out_dir, exec).map_err(wrap)
}

fn run(config: &ScenarioConfig, out: &Path, exec: Execution) -> Result<Vec<PathBuf>> {
    let (bulk, g) = config.laws.build()?;
    let envelope = build_envelope(&bulk, &g)?;
    let mut written = Vec::new();
    let mut emit = |name: &str, table: &Table| -> Result<()> {
        let path = out.join(name);
        emit_sweep(table, Format::Csv, &path)?;
        written.push(path);
        Ok(())
    };
    match config.scenario {
        ScenarioKind::Envelope => {
            let e_m = envelope.yield_strain();
            let mut t = Table::new(&["xi", "F", "Fbar"]);
            for k in 0..ENVELOPE_SAMPLES {
                let xi = 3.0 * e_m * k as f64 / (ENVELOPE_SAMPLES - 1) as f64;
                t.push(vec![
                    xi.into(),
                    bulk.eval(xi)?.into(),
                    envelope.eval(xi)?.into(),
                ])?;
            }
            emit("envelope.csv", &t)?;
        }
        ScenarioKind::Min1d => {
            let o = config.oned.clone().unwrap_or_default();
            let loads: Vec<f64> = (0..=o.steps)
                .map(|k| o.t_max * k as f64 / o.steps as f64)
                .collect();
            let mut t = Table::new(&["t", "e_star", "s_star", "c_star", "energy", "e_M"]);
            for m in sweep_relaxed_1d(&bulk, &g, o.l, &loads, exec)? {
                t.push(vec![
                    m.load.into(),
                    m.strain.into(),
                    m.jump.into(),
                    m.cantor.into(),
                    m.energy.into(),
                    m.yield_strain.into(),
                ])?;
            }
            emit("min1d.csv", &t)?;
        }
        ScenarioKind::YieldSweep => {
            let lambdas = config
                .lambdas
                .clone()
                .unwrap_or_else(|| DEFAULT_LAMBDAS.to_vec());
            for case in families(config, &CaseTag::ALL) {
                let mut t = Table::new(&SWEEP_COLUMNS);
                for &lambda in &lambdas {
                    let u = build_field(config, Some(lambda))?;
                    push_rows(
                        &mut t,
                        &scan_family(&u, &envelope, &g, &family_spec(config, case), exec)?,
                    )?;
                }
                emit(&format!("yield_sweep_{}.csv", case.name()), &t)?;
            }
        }
        ScenarioKind::GapAffine => {
            let u = build_field(config, None)?;
            let case = config.geometry.family.unwrap_or(CaseTag::Profile2D);
            let mut t = Table::new(&SWEEP_COLUMNS);
            push_rows(
                &mut t,
                &scan_family(&u, &envelope, &g, &family_spec(config, case), exec)?,
            )?;
            emit("gap_affine.csv", &t)?;
        }
        ScenarioKind::Certify => {
            let u = build_field(config, None)?;
            let mut found = None;
            let searched = families(config, &CaseTag::ALL);
            for &case in &searched {
                if let Some(c) =
                    search_certificate(&u, &envelope, &g, &family_spec(config, case), exec)?
                {
                    found = Some(c);
                    break;
                }
            }
            let doc = Json::obj([
                ("certified", Json::Bool(found.is_some())),
                (
                    "families",
                    Json::Arr(
                        searched
                            .iter()
                            .map(|c| Json::Str(c.name().into()))
                            .collect(),
                    ),
                ),
                ("certificate", found.map_or(Json::Null, |c| c.to_json())),
            ]);
            let path = out.join("certificate.json");
            write_atomic(&path, doc.render().as_bytes())?;
            written.push(path);
        }
        ScenarioKind::Case3Flux => {
            let u = build_field(config, None)?;
            let geometry = geometry_params(config);
            let lambda = u.lambda();
            let eps = crate::competitor::default_eps(lambda, envelope.yield_strain());
            let fc = field_constants(&u, eps, geometry.big_r, exec)?;
            let c1 = g.class().constants().map_or(f64::NAN, |(c1, _)| c1);
            let k = 2.0 / ((geometry.big_r - geometry.r).powi(2) * (lambda - eps).powi(2));
            let sigmas = config
                .geometry
                .sigma_grid
                .clone()
                .unwrap_or_else(|| DEFAULT_FLUX_SIGMAS.to_vec());
            let alpha = config
                .geometry
                .alpha_grid
                .as_ref()
                .and_then(|a| a.first().copied())
                .unwrap_or(0.5);
            let mut t = Table::new(&[
                "sigma",
                "vertices",
                "min_factor",
                "cubic_constant",
                "quadratic_error",
                "divergence_residual",
                "a2_integral",
                "leading_bound",
            ]);
            for (idx, &sigma) in sigmas.iter().enumerate() {
                let flux = taylor_flux_check(&u, &fc, geometry, sigma, exec)?;
                let region = build_region(CaseTag::RadialBump, &u, sigma, geometry, fc, exec)?;
                let residual = divergence_identity_residual(&u, &region, exec)?;
                let a2 = level_set_a2_integral(&u, &fc, geometry, sigma, exec);
                t.push(vec![
                    sigma.into(),
                    Cell::Int(flux.vertices as i64),
                    flux.min_factor.into(),
                    flux.cubic_constant.into(),
                    flux.quadratic_error.into(),
                    residual.into(),
                    a2.into(),
                    case3_leading_bound(sigma, alpha, c1, k, a2).into(),
                ])?;
                let curve = bump_level_set(&u, &fc, geometry, sigma, exec).to_csv();
                let path = out.join(format!("level_set_{idx}.csv"));
                write_atomic(&path, curve.as_bytes())?;
                written.push(path);
            }
            let path = out.join("case3_flux.csv");
            emit_sweep(&t, Format::Csv, &path)?;
            written.insert(0, path);
        }
    }
    Ok(written)
}

fn push_rows(t: &mut Table, scan: &crate::competitor::FamilyScan) -> Result<()> {
    for r in &scan.rows {
        t.push(vec![
            r.lambda.into(),
            r.alpha.into(),
            r.sigma.into(),
            r.gap.into(),
            r.bv_distance.into(),
            r.certified.into(),
        ])?;
    }
    Ok(())
}
