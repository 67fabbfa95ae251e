//! Command-line front end: simulate trajectories, integrate fluid limits,
//! run convergence ladders, estimate exit-time convergence, and evaluate
//! probability bounds. CSV for time series, JSON for reports, optional
//! self-contained SVG plots.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fluidlim::bounds::hydrodynamic_bound;
use fluidlim::convergence::{exit_time_convergence, run_ladder, LadderConfig};
use fluidlim::model::{RestrictedModel, ScalingAssumptions};
use fluidlim::models::{
    particle_limit_field, particle_model, random_walk_model, walk_limit_field,
    IncrementDistribution, ParticleSystemParams,
};
use fluidlim::ode::{integrate, VectorField};
use fluidlim::rng::{replicate_stream, RngStream};
use fluidlim::simulate::{simulate, SimConfig};
use fluidlim::StateVector;

use fluidlim_cli::{csvout, report, svg, usage, CliResult};

#[derive(Parser)]
#[command(
    name = "fluidlim",
    version,
    about = "Simulate rescaled pure-jump Markov processes and verify their fluid limits"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one trajectory and write it as CSV (optionally SVG)
    Simulate(SimulateArgs),
    /// Integrate the fluid-limit ODE and write the grid as CSV
    Fluid(FluidArgs),
    /// Run a deviation ladder and emit a convergence report as JSON
    Verify(VerifyArgs),
    /// Estimate exit-time convergence toward the fluid exit time
    Exit(ExitArgs),
    /// Evaluate the maximal-inequality bound under hydrodynamic scaling
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Particle,
    Walk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WalkDist {
    Bernoulli,
    Normal,
    Constant,
}

/// Model selection shared by the subcommands.
#[derive(Args, Clone)]
struct ModelArgs {
    /// Which built-in model to run
    #[arg(long, value_enum)]
    model: ModelName,
    /// Quantization constant w >= 2 (particle model)
    #[arg(long, default_value_t = 2)]
    w: u32,
    /// Mean of B/N (particle) or of one increment (walk)
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Variance of B/sqrt(N) draw (particle) or of one increment (walk)
    #[arg(long, default_value_t = 0.0)]
    sigma2: f64,
    /// Region bound on x0 for the particle model; defaults to 2*mu
    #[arg(long)]
    kappa: Option<f64>,
    /// Increment law for the walk model
    #[arg(long, value_enum, default_value_t = WalkDist::Normal)]
    dist: WalkDist,
}

impl ModelArgs {
    fn kappa(&self) -> f64 {
        self.kappa.unwrap_or(2.0 * self.mu)
    }

    fn particle_params(&self, scale: u64) -> ParticleSystemParams {
        ParticleSystemParams {
            w: self.w,
            mu: self.mu,
            sigma2: self.sigma2,
            kappa: self.kappa(),
            scale,
        }
    }

    fn walk_dist(&self) -> CliResult<IncrementDistribution> {
        let d = match self.dist {
            WalkDist::Bernoulli => IncrementDistribution::Bernoulli { p: self.mu },
            WalkDist::Normal => IncrementDistribution::Normal {
                mean: self.mu,
                std_dev: self.sigma2.sqrt(),
            },
            WalkDist::Constant => IncrementDistribution::Constant { value: self.mu },
        };
        d.validate()?;
        Ok(d)
    }

    fn limit_field(&self, scale: u64) -> CliResult<VectorField> {
        match self.model {
            ModelName::Particle => Ok(particle_limit_field(&self.particle_params(scale))?),
            ModelName::Walk => Ok(walk_limit_field(self.mu)),
        }
    }

    fn limit_start(&self) -> StateVector {
        match self.model {
            ModelName::Particle => {
                StateVector::new(vec![self.mu, 0.0, 0.0]).expect("validated mu")
            }
            ModelName::Walk => StateVector::zeros(1),
        }
    }

    fn params_json(&self) -> report::ParamsJson {
        match self.model {
            ModelName::Particle => report::ParamsJson::Particle {
                w: self.w,
                mu: self.mu,
                sigma2: self.sigma2,
                kappa: self.kappa(),
            },
            ModelName::Walk => report::ParamsJson::Walk {
                dist: format!("{:?}", self.dist).to_lowercase(),
                mu: self.mu,
                sigma2: self.sigma2,
            },
        }
    }

    fn name(&self) -> &'static str {
        match self.model {
            ModelName::Particle => "particle",
            ModelName::Walk => "walk",
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Scale parameter N
    #[arg(long = "N")]
    scale: u64,
    #[arg(long)]
    horizon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trajectory CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot of the trajectory
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Overlay the fluid limit on the SVG plot
    #[arg(long, default_value_t = false)]
    overlay_fluid: bool,
    /// RK4 step for the fluid overlay
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
}

#[derive(Args)]
struct FluidArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    horizon: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Fluid CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Increasing scale ladder, e.g. 100,400,1600
    #[arg(long = "N-ladder", value_delimiter = ',', required = true)]
    n_ladder: Vec<u64>,
    /// Time horizon u
    #[arg(long, default_value_t = 1.0)]
    u: f64,
    /// Deviation threshold delta
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long)]
    replicates: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Report JSON path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-replicate deviation samples as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExitArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Exit study region adds x2 < x2-max to S
    #[arg(long = "x2-max", default_value_t = 0.5)]
    x2_max: f64,
    #[arg(long = "N-ladder", value_delimiter = ',', required = true)]
    n_ladder: Vec<u64>,
    /// Simulation horizon (must exceed the fluid exit time)
    #[arg(long, default_value_t = 2.0)]
    u: f64,
    /// Exit-time discrepancy threshold delta
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long)]
    replicates: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Scale parameter N
    #[arg(long = "N")]
    scale: u64,
    #[arg(long)]
    u: f64,
    #[arg(long)]
    delta: f64,
    /// Rate constant kappa2 (jump rate <= kappa2 N on S)
    #[arg(long, default_value_t = 2.0)]
    kappa2: f64,
    /// Moment constant kappa3 (trace + squared drift <= kappa3 / N^2)
    #[arg(long, default_value_t = 3.0)]
    kappa3: f64,
    /// Jump-count constant, must exceed kappa2; defaults to 2*kappa2
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads().and_then(|_| dispatch(cli)) {
        eprintln!("error: {}", e.message);
        return ExitCode::from(e.code);
    }
    ExitCode::SUCCESS
}

/// FLUIDLIM_THREADS caps the worker pool; 0 or unset means automatic.
fn init_threads() -> CliResult<()> {
    match std::env::var("FLUIDLIM_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| usage(format!("FLUIDLIM_THREADS must be an integer, got {v:?}")))?;
            if n > 0 {
                // ignore AlreadyInitialized: harmless in tests
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Fluid(a) => cmd_fluid(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Exit(a) => cmd_exit(a),
        Cmd::Bounds(a) => cmd_bounds(a),
    }
}

fn sim_config(horizon: f64, seed: u64, kappa2: f64, scale: u64) -> CliResult<SimConfig> {
    Ok(SimConfig::new(horizon, seed)?.with_default_cap(kappa2, scale))
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    if a.scale == 0 {
        return Err(usage("--N must be >= 1"));
    }
    let mut rng = replicate_stream(a.seed, 0);
    let (traj, ext): (_, Option<csvout::ParticleColumns>) = match a.model.model {
        ModelName::Particle => {
            let params = a.model.particle_params(a.scale);
            let (model, x0) = particle_model(&params, &mut rng)?;
            let cfg = sim_config(a.horizon, a.seed, params.kappa, a.scale)?;
            (
                simulate(&model, &x0, &cfg, &mut rng)?,
                Some(csvout::ParticleColumns {
                    w: a.model.w,
                    scale: a.scale,
                }),
            )
        }
        ModelName::Walk => {
            let (model, x0) = random_walk_model(a.model.walk_dist()?, a.scale)?;
            let cfg = sim_config(a.horizon, a.seed, 1.0, a.scale)?;
            (simulate(&model, &x0, &cfg, &mut rng)?, None)
        }
    };
    let ext_ref = ext.as_ref().map(|e| e as &dyn csvout::ColumnExtension);
    csvout::write_trajectory(&traj, ext_ref, a.out.as_deref())?;
    if let Some(svg_path) = &a.svg {
        let overlay = if a.overlay_fluid {
            let field = a.model.limit_field(a.scale)?;
            Some(integrate(&field, &a.model.limit_start(), a.horizon, a.step, |_| true)?)
        } else {
            None
        };
        svg::write_plot(svg_path, &traj, overlay.as_ref())?;
    }
    Ok(())
}

fn cmd_fluid(a: FluidArgs) -> CliResult<()> {
    let field = a.model.limit_field(1)?;
    let sol = integrate(&field, &a.model.limit_start(), a.horizon, a.step, |_| true)?;
    csvout::write_fluid(&sol, a.out.as_deref())?;
    Ok(())
}

struct ParticleFamily {
    base: ParticleSystemParams,
}

impl fluidlim::convergence::ModelFamily for ParticleFamily {
    type Model = fluidlim::models::ParticleModel;
    fn build(
        &self,
        scale: u64,
        rng: &mut RngStream,
    ) -> fluidlim::Result<(Self::Model, StateVector)> {
        let params = ParticleSystemParams { scale, ..self.base };
        particle_model(&params, rng)
    }
}

fn cmd_verify(a: VerifyArgs) -> CliResult<()> {
    if a.replicates == 0 {
        return Err(usage("--replicates must be >= 1"));
    }
    if a.n_ladder.len() < 2 {
        return Err(usage("--N-ladder needs at least 2 values"));
    }
    let cfg = LadderConfig {
        n_ladder: a.n_ladder.clone(),
        u: a.u,
        delta: a.delta,
        replicates: a.replicates,
        master_seed: a.seed,
        ode_step: a.step,
    };
    let field = a.model.limit_field(a.n_ladder[0])?;
    let start = a.model.limit_start();
    let (rep, samples) = match a.model.model {
        ModelName::Particle => {
            let family = ParticleFamily {
                base: a.model.particle_params(1),
            };
            run_ladder(&family, &field, &start, &cfg, None)?
        }
        ModelName::Walk => {
            let dist = a.model.walk_dist()?;
            let family =
                move |scale: u64, _rng: &mut RngStream| random_walk_model(dist, scale);
            run_ladder(&family, &field, &start, &cfg, None)?
        }
    };
    let json = report::verify_json(a.model.name(), a.model.params_json(), &rep);
    report::write_json(&json, a.out.as_deref())?;
    if let Some(csv_path) = &a.csv {
        csvout::write_samples(&samples, csv_path)?;
    }
    Ok(())
}

fn cmd_exit(a: ExitArgs) -> CliResult<()> {
    if a.model.model != ModelName::Particle {
        return Err(usage("exit studies are only defined for --model particle"));
    }
    if a.replicates == 0 {
        return Err(usage("--replicates must be >= 1"));
    }
    let base = a.model.particle_params(1);
    let x2_max = a.x2_max;
    let kappa = base.kappa;
    struct RestrictedFamily {
        base: ParticleSystemParams,
        x2_max: f64,
    }
    impl fluidlim::convergence::ModelFamily for RestrictedFamily {
        type Model =
            RestrictedModel<fluidlim::models::ParticleModel, Box<dyn Fn(&StateVector) -> bool + Send + Sync>>;
        fn build(
            &self,
            scale: u64,
            rng: &mut RngStream,
        ) -> fluidlim::Result<(Self::Model, StateVector)> {
            let params = ParticleSystemParams { scale, ..self.base };
            let (model, x0) = particle_model(&params, rng)?;
            let cap = self.x2_max;
            Ok((
                RestrictedModel::new(model, Box::new(move |x: &StateVector| x.get(2) < cap) as _),
                x0,
            ))
        }
    }
    let family = RestrictedFamily { base, x2_max };
    let field = a.model.limit_field(a.n_ladder.first().copied().unwrap_or(1))?;
    let cfg = LadderConfig {
        n_ladder: a.n_ladder.clone(),
        u: a.u,
        delta: a.delta,
        replicates: a.replicates,
        master_seed: a.seed,
        ode_step: a.step,
    };
    let region = move |x: &StateVector| x.get(0) < kappa && x.get(2) < x2_max;
    let rep = exit_time_convergence(&family, &field, &a.model.limit_start(), &region, &cfg)?;
    let json = report::exit_json(a.model.name(), a.model.params_json(), a.x2_max, &rep);
    report::write_json(&json, a.out.as_deref())?;
    Ok(())
}

fn cmd_bounds(a: BoundsArgs) -> CliResult<()> {
    let kappa = a.kappa.unwrap_or(2.0 * a.kappa2);
    // the limit point is irrelevant to the bound; any valid vector works
    let assumptions = ScalingAssumptions::new(a.kappa2, a.kappa3, StateVector::zeros(1))?;
    let b = hydrodynamic_bound(&assumptions, a.scale, a.u, a.delta, kappa)?;
    let json = report::bounds_json(a.scale, a.u, a.delta, kappa, &b);
    report::write_json(&json, a.out.as_deref())?;
    Ok(())
}
