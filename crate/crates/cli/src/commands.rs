use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use solitonic::dsl::{DiffeoSpec, FieldSpec, SolitonSpec};
use solitonic::fourier_sobolev::lambda_decay_report;
use solitonic::solitons::{classify, make_soliton, DEFAULT_R_TOL};
use solitonic::u1_current::{hs_norm_sweep_with, weyl_check, OneParticleVector, TruncatedFock, VerdictThresholds};
use solitonic::virasoro::{
    commutator_check_with, kac_row, qei_check, unitarity_classify, Cocycle, ModuleParams, VermaLevelSpace,
};
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inadmissible input; exit code 2.
    Input(String),
    /// A numerical procedure failed; exit code 3.
    Numeric(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<solitonic::Error> for CliError {
    fn from(e: solitonic::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a subcommand produces: a JSON report, a CSV table, or both.
pub enum Output {
    Json(serde_json::Value),
    Csv(String),
    JsonWithCsv(serde_json::Value, String),
}

fn csv_body<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Numeric(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Numeric(e.to_string()))
}

fn to_value<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("reports serialize")
}

pub fn parse<T: DeserializeOwned>(v: &serde_json::Value) -> CliResult<T> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("invalid config: {e}")))
}

fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Input(format!("{name} must be a positive number, got {x}")))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaDecayConfig {
    pub map: DiffeoSpec,
    pub s: f64,
    pub pmax: usize,
}

#[derive(Serialize)]
struct LambdaRow {
    m: i64,
    n: i64,
    value: f64,
}

pub fn lambda_decay(c: LambdaDecayConfig) -> CliResult<Output> {
    let g = c.map.build()?;
    let report = lambda_decay_report(&g, c.s, c.pmax)?;
    let rows: Vec<LambdaRow> =
        report.grid.iter().zip(&report.values).map(|(&(m, n), &value)| LambdaRow { m, n, value }).collect();
    Ok(Output::JsonWithCsv(to_value(&report), csv_body(&rows)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsSweepConfig {
    pub map: DiffeoSpec,
    pub cutoffs: Vec<usize>,
    pub tail: Option<f64>,
    pub growth: Option<f64>,
}

pub fn hs_sweep(c: HsSweepConfig) -> CliResult<Output> {
    let mut th = VerdictThresholds::default();
    if let Some(t) = c.tail {
        th.tail = positive("tail", t)?;
    }
    if let Some(g) = c.growth {
        th.growth = positive("growth", g)?;
    }
    let g = c.map.build()?;
    Ok(Output::Json(to_value(&hs_norm_sweep_with(&g, &c.cutoffs, th)?)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KacConfig {
    pub c: Vec<f64>,
    pub h: Vec<f64>,
    pub max_level: usize,
}

#[derive(Serialize)]
struct KacCsvRow {
    c: f64,
    h: f64,
    level: usize,
    det: f64,
    min_eigenvalue: f64,
    exact: bool,
    unitarity: String,
}

pub fn kac(cfg: KacConfig) -> CliResult<Output> {
    if cfg.max_level == 0 {
        return Err(CliError::Input("max_level must be at least 1".into()));
    }
    let mut rows = vec![];
    for &c in &cfg.c {
        for &h in &cfg.h {
            let p = ModuleParams::new(c, h, cfg.max_level)?;
            let unitarity = unitarity_classify(c, h).to_string();
            for level in 1..=cfg.max_level {
                let r = kac_row(&p, level)?;
                rows.push(KacCsvRow {
                    c,
                    h,
                    level,
                    det: r.det,
                    min_eigenvalue: r.min_eigenvalue,
                    exact: r.exact,
                    unitarity: unitarity.clone(),
                });
            }
        }
    }
    Ok(Output::Csv(csv_body(&rows)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutatorConfig {
    pub c: f64,
    pub h: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub f: FieldSpec,
    pub g: FieldSpec,
    #[serde(default)]
    pub cocycle: Cocycle,
}

fn space(c: f64, h: f64, n: usize) -> CliResult<VermaLevelSpace> {
    Ok(VermaLevelSpace::new(ModuleParams::new(c, h, n)?)?)
}

pub fn commutator(cfg: CommutatorConfig) -> CliResult<Output> {
    let s = space(cfg.c, cfg.h, cfg.n)?;
    let r = commutator_check_with(&s, &cfg.f.series()?, &cfg.g.series()?, cfg.cocycle)?;
    Ok(Output::Json(to_value(&r)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QeiConfig {
    pub c: f64,
    #[serde(default)]
    pub h: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub field: FieldSpec,
    pub trials: usize,
}

pub fn qei(cfg: QeiConfig, seed: u64) -> CliResult<Output> {
    let s = space(cfg.c, cfg.h, cfg.n)?;
    // rejects non-polynomial fields before any work is done
    cfg.field.series()?;
    let r = qei_check(&s, &cfg.field.build()?, cfg.c, cfg.trials, seed)?;
    Ok(Output::Json(to_value(&r)))
}

#[derive(Deserialize)]
pub struct SolitonEntry {
    pub id: String,
    #[serde(flatten)]
    pub spec: SolitonSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub solitons: Vec<SolitonEntry>,
    pub tol: Option<f64>,
}

pub fn soliton_classify(cfg: ClassifyConfig) -> CliResult<Output> {
    let tol = positive("tol", cfg.tol.unwrap_or(DEFAULT_R_TOL))?;
    let items = cfg
        .solitons
        .par_iter()
        .map(|e| Ok((e.id.clone(), make_soliton(e.spec.build()?)?)))
        .collect::<Result<Vec<_>, solitonic::Error>>()?;
    Ok(Output::Csv(csv_body(&classify(&items, tol))?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylConfig {
    pub modes: Vec<usize>,
    pub n_max: usize,
    pub f: FieldSpec,
    pub g: FieldSpec,
}

pub fn weyl(cfg: WeylConfig, seed: u64) -> CliResult<Output> {
    let fock = TruncatedFock::new(cfg.modes, cfg.n_max)?;
    let f = OneParticleVector::from_series(&cfg.f.series()?);
    let g = OneParticleVector::from_series(&cfg.g.series()?);
    Ok(Output::Json(to_value(&weyl_check(&fock, &f, &g, seed)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(CliError::from(solitonic::Error::Parse("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(solitonic::Error::Domain("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(solitonic::Error::Numeric("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(solitonic::Error::Consistency("x".into())).exit_code(), 3);
    }

    #[test]
    fn line_bump_is_rejected_for_stress_checks() {
        let v = serde_json::json!({
            "c": 1.0, "N": 6, "trials": 1,
            "field": {"line_bump": {"center": 0.0, "width": 1.0, "height": 1.0}}
        });
        let e = qei(parse(&v).unwrap(), 0).err().unwrap();
        assert_eq!(e.exit_code(), 2);
    }
}
