//! JSON report shapes for the `verify`, `exit`, and `bounds` subcommands.
//! Field order is fixed by the struct definitions, so identical inputs
//! produce byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use fluidlim::bounds::HydrodynamicBound;
use fluidlim::convergence::{ConvergenceReport, ExitReport};

use crate::CliResult;

#[derive(Serialize)]
#[serde(untagged)]
pub enum ParamsJson {
    Particle {
        w: u32,
        mu: f64,
        sigma2: f64,
        kappa: f64,
    },
    Walk {
        dist: String,
        mu: f64,
        sigma2: f64,
    },
}

#[derive(Serialize)]
pub struct VerifyJson {
    pub model: String,
    pub params: ParamsJson,
    pub u: f64,
    pub delta: f64,
    #[serde(rename = "N_ladder")]
    pub n_ladder: Vec<u64>,
    #[serde(rename = "per_N")]
    pub per_n: Vec<PerNJson>,
    pub slope_median_dev: Option<f64>,
    pub slope_exceedance: Option<f64>,
    pub zeta: Option<f64>,
}

#[derive(Serialize)]
pub struct PerNJson {
    #[serde(rename = "N")]
    pub n: u64,
    pub median_sup_dev: f64,
    pub mean_sup_dev: f64,
    pub exceedance: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub exit_prob: f64,
    pub median_sigma: Option<f64>,
}

pub fn verify_json(model: &str, params: ParamsJson, rep: &ConvergenceReport) -> VerifyJson {
    VerifyJson {
        model: model.to_string(),
        params,
        u: rep.u,
        delta: rep.delta,
        n_ladder: rep.n_ladder.clone(),
        per_n: rep
            .per_scale
            .iter()
            .map(|s| PerNJson {
                n: s.scale,
                median_sup_dev: s.median_sup_dev,
                mean_sup_dev: s.mean_sup_dev,
                exceedance: s.exceedance,
                wilson_lo: s.wilson_lo,
                wilson_hi: s.wilson_hi,
                exit_prob: s.exit_prob,
                median_sigma: s.median_sigma,
            })
            .collect(),
        slope_median_dev: rep.slope_median_dev,
        slope_exceedance: rep.slope_exceedance,
        zeta: rep.zeta,
    }
}

#[derive(Serialize)]
pub struct ExitJson {
    pub model: String,
    pub params: ParamsJson,
    pub x2_max: f64,
    pub u: f64,
    pub delta: f64,
    pub zeta: f64,
    #[serde(rename = "N_ladder")]
    pub n_ladder: Vec<u64>,
    #[serde(rename = "per_N")]
    pub per_n: Vec<ExitPerNJson>,
}

#[derive(Serialize)]
pub struct ExitPerNJson {
    #[serde(rename = "N")]
    pub n: u64,
    pub exceedance: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub exit_prob: f64,
    pub median_sigma: Option<f64>,
}

pub fn exit_json(model: &str, params: ParamsJson, x2_max: f64, rep: &ExitReport) -> ExitJson {
    ExitJson {
        model: model.to_string(),
        params,
        x2_max,
        u: rep.u,
        delta: rep.delta,
        zeta: rep.zeta,
        n_ladder: rep.n_ladder.clone(),
        per_n: rep
            .per_scale
            .iter()
            .map(|s| ExitPerNJson {
                n: s.scale,
                exceedance: s.exceedance,
                wilson_lo: s.wilson_lo,
                wilson_hi: s.wilson_hi,
                exit_prob: s.exit_prob,
                median_sigma: s.median_sigma,
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct BoundsJson {
    #[serde(rename = "N")]
    pub n: u64,
    pub u: f64,
    pub delta: f64,
    pub kappa: f64,
    pub bound: f64,
    pub argmin_n: u64,
    pub chebyshev_term: f64,
    pub moment_term: f64,
}

pub fn bounds_json(n: u64, u: f64, delta: f64, kappa: f64, b: &HydrodynamicBound) -> BoundsJson {
    BoundsJson {
        n,
        u,
        delta,
        kappa,
        bound: b.clamped,
        argmin_n: b.n,
        chebyshev_term: b.jump_count_term,
        moment_term: b.moment_term,
    }
}

pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| crate::CliError {
            code: 3,
            message: e.to_string(),
        })?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, &text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
