use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crancov::analytic::{rate_profile, AnalyticMethod, CoverageModel};
use crancov::harness::{
    parse_config, run_preset, scaling_row, write_report, Format, Preset, ProfileRow, ReportBundle, RunOptions,
    ScalingPoint, ScenarioFile,
};
use crancov::model::NetworkConfig;
use crancov::simulator::{simulate, SimulationPlan, MIN_COVERAGE_REALIZATIONS, MIN_RATE_REALIZATIONS};
use crancov::{Error, Result};

#[derive(Parser)]
#[command(name = "crancov", version, about = "Coverage and rate of clustered cloud radio networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage curve of the scenario in a config file.
    Coverage(ScenarioArgs),
    /// Rate percentiles and mean of the scenario in a config file.
    Rate(ScenarioArgs),
    /// Monte Carlo run with a raw SINR sample dump.
    Simulate(ScenarioArgs),
    /// Optimal cluster radius over a grid of tolerances and user depths.
    Scaling(ScalingArgs),
    /// A named experiment grid.
    Preset(PresetArgs),
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for every simulation in the run.
    #[arg(long)]
    seed: Option<u64>,
    /// Output formats.
    #[arg(long, value_delimiter = ',', default_value = "csv,json,svg")]
    format: Vec<String>,
}

#[derive(Args)]
#[group(multiple = false)]
struct MethodFlags {
    /// Monte Carlo only.
    #[arg(long)]
    mc: bool,
    /// Analytic only.
    #[arg(long)]
    analytic: bool,
    /// Analytic and Monte Carlo.
    #[arg(long)]
    both: bool,
}

impl MethodFlags {
    /// `(analytic, monte carlo)`, falling back to `default` without flags.
    fn select(&self, default: (bool, bool)) -> (bool, bool) {
        match (self.mc, self.analytic, self.both) {
            (true, _, _) => (false, true),
            (_, true, _) => (true, false),
            (_, _, true) => (true, true),
            _ => default,
        }
    }
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file with `key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the simulation budget of the file.
    #[arg(long)]
    realizations: Option<u64>,
    #[command(flatten)]
    methods: MethodFlags,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ScalingArgs {
    /// Network for the scaling law; defaults to 200 m spacing.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.02")]
    epsilon: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1")]
    delta: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    threshold_db: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PresetArgs {
    /// fig3, fig4, fig5a, fig5b, table2, table3 or scaling.
    name: String,
    /// Overrides every simulation budget.
    #[arg(long)]
    realizations: Option<u64>,
    /// Store the wall time in the report (breaks byte-identical reruns).
    #[arg(long)]
    record_wall_time: bool,
    #[command(flatten)]
    methods: MethodFlags,
    #[command(flatten)]
    common: Common,
}

fn formats(common: &Common) -> Result<Vec<Format>> {
    common.format.iter().map(|f| f.parse()).collect()
}

fn load(args: &ScenarioArgs) -> Result<(ScenarioFile, SimulationPlan)> {
    let file = parse_config(&args.config)?;
    let mut plan = file.plan.clone();
    if let Some(seed) = args.common.seed {
        plan.seed = seed;
    }
    if let Some(n) = args.realizations {
        plan.realizations = n;
    }
    Ok((file, plan))
}

fn finish(mut bundle: ReportBundle, common: &Common) -> Result<()> {
    let formats = formats(common)?;
    bundle.seal();
    for path in write_report(&bundle, &common.out, &formats)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn budget(plan: &SimulationPlan, minimum: u64) -> Result<()> {
    if plan.realizations < minimum {
        return Err(Error::Config {
            key: "realizations".into(),
            message: format!("this estimate needs at least {minimum} realizations"),
        });
    }
    Ok(())
}

fn coverage(args: &ScenarioArgs) -> Result<()> {
    let (file, plan) = load(args)?;
    let (analytic, mc) = args.methods.select((true, false));
    let mut bundle = ReportBundle::empty("coverage", plan.seed);
    if analytic {
        let method = AnalyticMethod::for_config(&file.config);
        bundle.curves.push(CoverageModel::new(file.config.clone(), method)?.curve(&file.thresholds_db)?);
    }
    if mc {
        budget(&plan, MIN_COVERAGE_REALIZATIONS)?;
        bundle.curves.push(simulate(&plan)?.coverage(&file.thresholds_db)?);
    }
    finish(bundle, &args.common)
}

fn rate(args: &ScenarioArgs) -> Result<()> {
    let (file, plan) = load(args)?;
    let (analytic, mc) = args.methods.select((true, false));
    let mut bundle = ReportBundle::empty("rate", plan.seed);
    let label = crancov::analytic::scenario_label(&file.config);
    if analytic {
        let method = AnalyticMethod::for_config(&file.config);
        let model = CoverageModel::new(file.config.clone(), method)?;
        bundle.profiles.push(ProfileRow {
            scenario: label.clone(),
            method: method.curve_method(),
            profile: rate_profile(&model)?,
            config_digest: file.config.digest(),
        });
    }
    if mc {
        budget(&plan, MIN_RATE_REALIZATIONS)?;
        bundle.profiles.push(ProfileRow {
            scenario: plan.scenario(),
            method: plan.precoder_mode.method(),
            profile: simulate(&plan)?.rate_profile()?,
            config_digest: file.config.digest(),
        });
    }
    finish(bundle, &args.common)
}

fn simulate_cmd(args: &ScenarioArgs) -> Result<()> {
    let (file, plan) = load(args)?;
    budget(&plan, MIN_COVERAGE_REALIZATIONS)?;
    let run = simulate(&plan)?;
    std::fs::create_dir_all(&args.common.out).map_err(|e| io_error(&args.common.out, e))?;
    let dump = args.common.out.join("samples.csv");
    let out = File::create(&dump).map_err(|e| io_error(&dump, e))?;
    run.write_samples(BufWriter::new(out))?;
    println!("{}", dump.display());
    let mut bundle = ReportBundle::empty("simulate", plan.seed);
    bundle.curves.push(run.coverage(&file.thresholds_db)?);
    finish(bundle, &args.common)
}

fn scaling(args: &ScalingArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => parse_config(path)?.config,
        None => NetworkConfig::from_spacing_and_area(200.0, 1.0)?,
    };
    let mut bundle = ReportBundle::empty("scaling", args.common.seed.unwrap_or(0));
    for &epsilon in &args.epsilon {
        for &delta in &args.delta {
            let point = ScalingPoint {
                epsilon,
                delta,
                threshold_db: args.threshold_db,
            };
            bundle.scaling.push(scaling_row(&config, &point)?);
        }
    }
    finish(bundle, &args.common)
}

fn preset(args: &PresetArgs) -> Result<()> {
    let preset: Preset = args.name.parse()?;
    let formats = formats(&args.common)?;
    let (analytic, monte_carlo) = args.methods.select((true, true));
    let options = RunOptions {
        seed: args.common.seed.unwrap_or(crancov::harness::DEFAULT_SEED),
        analytic,
        monte_carlo,
        realizations: args.realizations,
        record_wall_time: args.record_wall_time,
    };
    let bundle = run_preset(preset, &options)?;
    for path in write_report(&bundle, &args.common.out, &formats)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = match &cli.command {
        Command::Coverage(a) => coverage(a),
        Command::Rate(a) => rate(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Scaling(a) => scaling(a),
        Command::Preset(a) => preset(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("crancov: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
