//! CSV writers and readers. Times and coordinates are printed with 17
//! significant digits so files round-trip bit-exactly.

use std::io::Write;
use std::path::Path;

use fluidlim::convergence::DeviationSample;
use fluidlim::models::particle::ParticleState;
use fluidlim::ode::FluidSolution;
use fluidlim::simulate::Trajectory;
use fluidlim::StateVector;

use crate::CliResult;

/// 17 significant digits: enough to reconstruct any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Extra per-row columns derived from the state (e.g. particle counts).
pub trait ColumnExtension {
    fn headers(&self) -> Vec<String>;
    fn row(&self, x: &StateVector) -> fluidlim::Result<Vec<String>>;
}

/// Particle-model columns: integer counts `heavy,inert,excited` and their
/// rescaled versions `h,e`.
pub struct ParticleColumns {
    pub w: u32,
    pub scale: u64,
}

impl ColumnExtension for ParticleColumns {
    fn headers(&self) -> Vec<String> {
        ["heavy", "inert", "excited", "h", "e"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn row(&self, x: &StateVector) -> fluidlim::Result<Vec<String>> {
        let n = self.scale as f64;
        let as_count = |v: f64| (v * n).round() as u64;
        let st = ParticleState {
            b_count: as_count(x.get(0)),
            inert_removed: as_count(x.get(1)),
            step: as_count(x.get(2)),
        };
        let (inert, excited) = st.reconstruct_counts(self.w)?;
        let heavy = st.heavy();
        Ok(vec![
            heavy.to_string(),
            inert.to_string(),
            excited.to_string(),
            fmt_f64(heavy as f64 / n),
            fmt_f64(excited as f64 / n),
        ])
    }
}

fn open_writer(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// Header `t,x0,...,x{d-1}` plus extension columns; one row per jump time
/// and a final row at the horizon.
pub fn write_trajectory(
    traj: &Trajectory,
    ext: Option<&dyn ColumnExtension>,
    path: Option<&Path>,
) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(open_writer(path)?);
    let d = traj.dim();
    let mut header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..d).map(|i| format!("x{i}")))
        .collect();
    if let Some(e) = ext {
        header.extend(e.headers());
    }
    w.write_record(&header)?;
    let emit = |w: &mut csv::Writer<Box<dyn Write>>, t: f64, x: &StateVector| -> CliResult<()> {
        let mut row: Vec<String> = std::iter::once(fmt_f64(t))
            .chain(x.coords().iter().map(|&v| fmt_f64(v)))
            .collect();
        if let Some(e) = ext {
            row.extend(e.row(x)?);
        }
        w.write_record(&row)?;
        Ok(())
    };
    for (t, x) in traj.jump_times.iter().zip(&traj.states) {
        emit(&mut w, *t, x)?;
    }
    emit(&mut w, traj.horizon, traj.state_at(traj.horizon))?;
    w.flush()?;
    Ok(())
}

/// Header `t,y0,...,y{d-1}`; one row per ODE grid point.
pub fn write_fluid(sol: &FluidSolution, path: Option<&Path>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(open_writer(path)?);
    let d = sol.states[0].dim();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..d).map(|i| format!("y{i}")))
        .collect();
    w.write_record(&header)?;
    for (t, y) in sol.times.iter().zip(&sol.states) {
        let row: Vec<String> = std::iter::once(fmt_f64(*t))
            .chain(y.coords().iter().map(|&v| fmt_f64(v)))
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-replicate deviation samples: `N,replicate,sup_dev,sigma,exited`.
pub fn write_samples(samples: &[DeviationSample], path: &Path) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["N", "replicate", "sup_dev", "sigma", "exited"])?;
    for s in samples {
        w.write_record([
            s.scale.to_string(),
            s.replicate.to_string(),
            fmt_f64(s.sup_dev),
            s.sigma.map(fmt_f64).unwrap_or_default(),
            s.exited.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parse a trajectory or fluid CSV back into (times, states); used by the
/// round-trip tests.
pub fn read_series(path: &Path) -> CliResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let mut times = Vec::new();
    let mut rows = Vec::new();
    let d = r.headers()?.iter().filter(|h| h.starts_with('x') || h.starts_with('y')).count();
    for rec in r.records() {
        let rec = rec?;
        let parse = |s: &str| -> CliResult<f64> {
            s.parse::<f64>()
                .map_err(|e| crate::usage(format!("bad float {s:?}: {e}")))
        };
        times.push(parse(&rec[0])?);
        let mut row = Vec::with_capacity(d);
        for i in 1..=d {
            row.push(parse(&rec[i])?);
        }
        rows.push(row);
    }
    Ok((times, rows))
}
