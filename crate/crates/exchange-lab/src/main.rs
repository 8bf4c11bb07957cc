//! Command-line front end: single experiments, parameter sweeps, exact
//! component-structure tables, and the canned scenario catalog.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use exchange_lab::experiment::output;
use exchange_lab::experiment::preset::{preset, PresetAction, PRESET_NAMES};
use exchange_lab::experiment::{
    component_ensemble, parse_config, run_experiment, sweep, ExperimentOutput, NetworkKind,
    RuleName, SimConfig, SweepOutput, SweepParam,
};
use exchange_lab::gf::GfModel;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "exchange-lab",
    version,
    about = "Conservative pairwise wealth-exchange simulations with exact network component analytics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration across realizations and write its bundle.
    Simulate(SimulateArgs),
    /// Run one experiment per swept parameter value and tabulate.
    Sweep(SweepArgs),
    /// Write exact component-structure tables for one degree bound.
    Tables(TablesArgs),
    /// Expand a canned scenario and run every action in it.
    Preset(PresetArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Additive,
    Multiplicative,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamArg {
    N,
    Dw,
    Nu,
    Kmax,
}

impl From<ParamArg> for SweepParam {
    fn from(p: ParamArg) -> SweepParam {
        match p {
            ParamArg::N => SweepParam::N,
            ParamArg::Dw => SweepParam::Dw,
            ParamArg::Nu => SweepParam::Nu,
            ParamArg::Kmax => SweepParam::KMax,
        }
    }
}

#[derive(Args)]
struct CommonConfig {
    /// Config file of `key = value` lines; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; every realization derives its own stream from it.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
    /// Exclude agents permanently once they fall below the poverty line.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    bankruptcy: Option<bool>,
    /// Random network with degrees uniform on 1..=K, rewired per realization.
    #[arg(long, value_name = "K", conflicts_with = "fully_connected")]
    kmax: Option<u32>,
    /// Force the fully connected topology.
    #[arg(long)]
    fully_connected: bool,
    /// Monte Carlo step budget per realization.
    #[arg(long)]
    mcs: Option<u64>,
    #[arg(long)]
    realizations: Option<u32>,
    /// Agent count.
    #[arg(long)]
    n: Option<u32>,
    /// Initial wealth per agent.
    #[arg(long)]
    mean_w: Option<u64>,
    /// Additive stake per trade.
    #[arg(long)]
    c: Option<u64>,
    /// Multiplicative stake fraction.
    #[arg(long)]
    nu: Option<f64>,
    /// Series recording stride.
    #[arg(long)]
    stride: Option<u64>,
    /// Comma-separated histogram capture times, or `none`.
    #[arg(long)]
    snapshots: Option<String>,
    /// Wire one network and share it across realizations.
    #[arg(long)]
    reuse_network: bool,
    /// Worker-thread cap (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
}

impl CommonConfig {
    fn resolve(&self) -> Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                parse_config(&text)?
            }
            None => SimConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(rule) = self.rule {
            cfg.rule = match rule {
                RuleArg::Additive => RuleName::Additive,
                RuleArg::Multiplicative => RuleName::Multiplicative,
            };
        }
        if let Some(b) = self.bankruptcy {
            cfg.bankruptcy = b;
        }
        if let Some(k) = self.kmax {
            cfg.network = NetworkKind::UniformDegree(k);
        }
        if self.fully_connected {
            cfg.network = NetworkKind::FullyConnected;
        }
        if let Some(mcs) = self.mcs {
            cfg.mcs_budget = mcs;
        }
        if let Some(r) = self.realizations {
            cfg.realizations = r;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(w) = self.mean_w {
            cfg.mean_w = w;
        }
        if let Some(c) = self.c {
            cfg.c = c;
        }
        if let Some(nu) = self.nu {
            cfg.nu = nu;
        }
        if let Some(s) = self.stride {
            cfg.stride = s;
        }
        if let Some(snapshots) = &self.snapshots {
            cfg.snapshot_times = if snapshots == "none" {
                Some(Vec::new())
            } else {
                let times: std::result::Result<Vec<u64>, _> =
                    snapshots.split(',').map(|v| v.trim().parse()).collect();
                Some(times.context("parsing --snapshots")?)
            };
        }
        if self.reuse_network {
            cfg.reuse_network = true;
        }
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonConfig,
    /// Output directory for the bundle.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonConfig,
    #[arg(long, value_enum)]
    param: ParamArg,
    /// Swept values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct TablesArgs {
    /// Degree bound (degrees uniform on 1..=K).
    #[arg(long)]
    kmax: u32,
    /// Truncation order of the component-size law. Component probabilities
    /// decay geometrically, so the default covers everything visible in
    /// double precision; exact coefficients get expensive quickly for
    /// large degree bounds.
    #[arg(long, default_value_t = 60)]
    smax: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct PresetArgs {
    /// Scenario name; `list` prints the catalog.
    name: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn describe(cfg: &SimConfig) -> String {
    let rule = match cfg.rule {
        RuleName::Additive => format!("additive (c = {})", cfg.c),
        RuleName::Multiplicative => format!("multiplicative (nu = {})", cfg.nu),
    };
    let network = match cfg.network {
        NetworkKind::FullyConnected => "fully connected".to_string(),
        NetworkKind::UniformDegree(k) => format!("network k_max = {k}"),
    };
    format!(
        "{rule}, {network}, n = {}, <w> = {}, bankruptcy = {}, {} realizations x {} steps, seed {}",
        cfg.n, cfg.mean_w, cfg.bankruptcy, cfg.realizations, cfg.mcs_budget, cfg.seed
    )
}

fn report_run(out: &ExperimentOutput) {
    if let Some(last) = out.mean_series.last() {
        println!(
            "  final mean entropy {:.6}, mean poverty {:.1}",
            last.entropy, last.poverty
        );
    }
    let reached = out.reached_count();
    if reached > 0 {
        let tcs = out.condensation_times();
        let mean = tcs.iter().map(|&t| t as f64).sum::<f64>() / tcs.len() as f64;
        println!(
            "  condensed {reached}/{} realizations, mean t_c = {mean:.1}",
            out.realizations.len()
        );
    }
    if let Some(deg) = out.mean_realized_degree() {
        println!("  mean realized degree {deg:.4}");
    }
    for f in &out.fits {
        println!(
            "  {} fit on [{}, {}]: p1 = {:.4}, residual {:.3e} over {} bins",
            f.form.label(),
            f.range.0,
            f.range.1,
            f.p1,
            f.residual,
            f.points
        );
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let cfg = args.common.resolve()?;
    println!("simulate: {}", describe(&cfg));
    let out = run_experiment(&cfg)?;
    report_run(&out);
    output::write_bundle(&out, &args.out)
        .with_context(|| format!("writing bundle to {}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn write_sweep_bundle(result: &SweepOutput, base: &SimConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    output::write_sweep_csv(&dir.join("sweep.csv"), result)?;
    if let Some(scaling) = &result.scaling {
        output::write_fits_csv(&dir.join("scaling.csv"), std::slice::from_ref(scaling))?;
    }
    let mut meta = format!("# exchange-lab {}\n", env!("CARGO_PKG_VERSION"));
    meta.push_str(&format!(
        "# sweep param = {}, values = {:?}\n",
        result.param.label(),
        result.rows.iter().map(|r| r.value).collect::<Vec<_>>()
    ));
    meta.push_str(&base.render());
    fs::write(dir.join("meta"), meta)?;
    Ok(())
}

fn report_sweep(result: &SweepOutput) {
    for row in &result.rows {
        let tc = row
            .mean_tc
            .map_or_else(|| "never condensed".to_string(), |m| format!("mean t_c = {m:.1}"));
        let b = row
            .fit_b
            .map_or_else(String::new, |b| format!(", fitted b = {b:.4}"));
        println!(
            "  {} = {}: {tc} ({}/{} reached){b}",
            result.param.label(),
            row.value,
            row.reached,
            row.total
        );
    }
    if let Some(scaling) = &result.scaling {
        println!(
            "  scaling exponent {:.4} (prefactor {:.4}, residual {:.3e})",
            scaling.p1, scaling.p2, scaling.residual
        );
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let base = args.common.resolve()?;
    let param: SweepParam = args.param.into();
    println!(
        "sweep {} over {:?}: base {}",
        param.label(),
        args.values,
        describe(&base)
    );
    let result = sweep(&base, param, &args.values)?;
    report_sweep(&result);
    write_sweep_bundle(&result, &base, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn write_tables(k_values: &[u32], s_max: usize, dir: &Path) -> Result<()> {
    // Build every model before touching the filesystem so a bad degree
    // bound cannot leave a half-written directory behind.
    let mut models = Vec::new();
    for &k in k_values {
        let model = GfModel::new(k, s_max)?;
        println!(
            "  k_max = {k}: z1 = {}, z2 = {}, giant = {}, u = {:.6}, giant fraction = {:.6}, <s> = {:.6}",
            model.z1(),
            model.z2(),
            model.has_giant(),
            model.u(),
            model.giant_fraction(),
            model.mean_finite_component_size()
        );
        models.push(model);
    }
    fs::create_dir_all(dir)?;
    for model in &models {
        let name = format!("component_law_k{}.csv", model.k_max());
        output::write_component_law_csv(&dir.join(name), model)?;
    }
    output::write_moments_csv(&dir.join("moments.csv"), &models)?;
    output::write_fixed_points_csv(&dir.join("fixed_points.csv"), &models)?;
    Ok(())
}

fn cmd_tables(args: &TablesArgs) -> Result<()> {
    println!("tables: k_max = {}, s_max = {}", args.kmax, args.smax);
    write_tables(&[args.kmax], args.smax, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run_components(label: &str, n: u32, k_max: u32, wirings: u32, seed: u64, dir: &Path) -> Result<()> {
    let stats = component_ensemble(n, k_max, wirings, seed)?;
    println!(
        "  {label}: {} wirings of n = {n}, k_max = {k_max}: mean realized degree {:.4}, {} components",
        wirings, stats.mean_realized_degree, stats.total_components
    );
    let model = GfModel::new(k_max, 60)?;
    fs::create_dir_all(dir)?;
    output::write_components_csv(&dir.join("components.csv"), &stats, Some(&model))?;
    Ok(())
}

fn cmd_preset(args: &PresetArgs) -> Result<()> {
    if args.name == "list" {
        for name in PRESET_NAMES {
            println!("{name}");
        }
        return Ok(());
    }
    let seed = args.seed.unwrap_or_else(|| SimConfig::default().seed);
    let actions = preset(&args.name, seed)?;
    println!("preset {}: {} action(s), seed {seed}", args.name, actions.len());
    for action in actions {
        match action {
            PresetAction::Run { label, config } => {
                println!("run {label}: {}", describe(&config));
                let out = run_experiment(&config)?;
                report_run(&out);
                let dir = args.out.join(&label);
                output::write_bundle(&out, &dir)?;
                println!("wrote {}", dir.display());
            }
            PresetAction::Sweep {
                label,
                base,
                param,
                values,
            } => {
                println!("sweep {label}: {} over {values:?}", param.label());
                let result = sweep(&base, param, &values)?;
                report_sweep(&result);
                let dir = args.out.join(&label);
                write_sweep_bundle(&result, &base, &dir)?;
                println!("wrote {}", dir.display());
            }
            PresetAction::Tables { k_values, s_max } => {
                let dir = args.out.join("tables");
                println!("tables: k_max in {k_values:?}, s_max = {s_max}");
                write_tables(&k_values, s_max, &dir)?;
                println!("wrote {}", dir.display());
            }
            PresetAction::Components {
                label,
                n,
                k_max,
                wirings,
            } => {
                let dir = args.out.join(&label);
                run_components(&label, n, k_max, wirings, seed, &dir)?;
                println!("wrote {}", dir.display());
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Tables(args) => cmd_tables(args),
        Command::Preset(args) => cmd_preset(args),
    }
}
