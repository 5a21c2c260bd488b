use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stirap_link::config::{self, ScenarioConfig};
use stirap_link::error::{ConfigError, ScenarioError};
use stirap_link::scenario;

#[derive(Parser)]
#[command(name = "stirap-link", version, about = "Cavity-assisted photon emission and transfer from dissociating molecular fragments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate every case of a scenario and write CSV traces plus summary.json
    Run(Common),
    /// Run a parameter sweep and write sweep.csv
    Sweep(Common),
    /// Tune free pulse parameters within their bounds
    Calibrate(Common),
    /// Evaluate the feasibility conditions without propagating
    Check(Common),
    /// List the built-in presets
    PresetList,
}

#[derive(Args)]
struct Common {
    /// Scenario file (`key = value unit` lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset used as the base of the scenario
    #[arg(long)]
    preset: Option<String>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override a key, e.g. `--param w_p="12 um"`; repeatable
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Worker threads for sweeps and parallel cases
    #[arg(long)]
    jobs: Option<usize>,
    /// Relative integrator tolerance
    #[arg(long)]
    tol: Option<f64>,
}

fn load(common: &Common) -> Result<ScenarioConfig, ScenarioError> {
    let mut overrides = Vec::new();
    for p in &common.params {
        let (k, v) = p.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: 0,
            message: format!("--param expects KEY=VALUE, got `{p}`"),
        })?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(tol) = common.tol {
        overrides.push(("rel_tol".into(), tol.to_string()));
    }
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?,
        None if common.preset.is_some() => String::new(),
        None => {
            return Err(ConfigError::Parse { line: 0, message: "either --config or --preset is required".into() }.into())
        }
    };
    Ok(ScenarioConfig::load_str(&text, common.preset.as_deref(), &overrides)?)
}

fn pool(jobs: Option<usize>) {
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn execute(command: Command) -> Result<(), ScenarioError> {
    match command {
        Command::PresetList => {
            for name in config::PRESET_NAMES {
                println!("{name:<24} {}", config::preset_summary(name).unwrap_or(""));
            }
        }
        Command::Run(common) => {
            let cfg = load(&common)?;
            pool(common.jobs);
            let summary = scenario::run(&cfg, &common.out)?;
            for case in &summary.cases {
                let probs: Vec<String> = case
                    .mode_labels
                    .iter()
                    .zip(&case.emission_probabilities)
                    .map(|(l, p)| format!("P[{l}]={p:.4}"))
                    .collect();
                let fid = case.transfer_fidelity.map(|f| format!(" fidelity={f:.4}")).unwrap_or_default();
                println!("{:<10} {}{fid} budget={:.6}", case.name, probs.join(" "), case.budget.total);
            }
            if let Some(j) = &summary.joint {
                println!("joint fidelity {:.4} (branches {:?})", j.joint, j.branch_products);
            }
            println!("wrote {}", common.out.display());
        }
        Command::Sweep(common) => {
            let cfg = load(&common)?;
            let plan = scenario::sweep_plan(&cfg)?;
            let rows = scenario::sweep_to_dir(&cfg, common.jobs, &common.out)?;
            print!("{}", scenario::sweep_csv(&plan.parameter, &rows));
        }
        Command::Calibrate(common) => {
            let cfg = load(&common)?;
            pool(common.jobs);
            let report = scenario::calibrate_to_dir(&cfg, &common.out)?;
            for p in &report.params {
                println!("{:<12} {:.6} -> {:.6} in [{:.4}, {:.4}]", p.name, p.start, p.value, p.bounds.0, p.bounds.1);
            }
            println!(
                "objective {:.5} -> {:.5} after {} evaluations",
                report.objective_start, report.objective, report.evaluations
            );
        }
        Command::Check(common) => {
            let cfg = load(&common)?;
            let reports = scenario::check(&cfg)?;
            for node in &reports {
                for c in &node.conditions {
                    println!(
                        "{:<9} {:<16} {:<5} ratio {:>10.3} (lhs {:.4e}, rhs {:.4e}, {})",
                        node.node,
                        c.condition,
                        if c.pass { "ok" } else { "FAIL" },
                        c.ratio,
                        c.lhs,
                        c.rhs,
                        c.limiting_term
                    );
                }
                println!(
                    "{:<9} repetition period {:.4} us, max rate {:.1} kHz",
                    node.node, node.repetition.period_us, node.repetition.max_rate_khz
                );
                if let Some(r) = &node.recoil {
                    println!("{:<9} recoil ratio {:.2} for D_x = {} um", node.node, r.ratio, r.region_um);
                }
            }
            std::fs::create_dir_all(&common.out)?;
            std::fs::write(common.out.join("feasibility.json"), serde_json::to_string_pretty(&reports)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
