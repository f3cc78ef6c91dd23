//! The `wblab` command line.
//!
//! Every subcommand prints its JSON result on stdout and, given `--out DIR`,
//! writes `result.json`, and where they apply `trace.csv`, `density.txt` and
//! `plot.svg`. Settings come from flags, then from the matching table of a
//! `--config` TOML file, then from defaults.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 infinite energy,
//! 3 infeasible search.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::densities::{from_droplets_padded, DropletConfig, GridDensity, IntervalConfig};
use crate::droplets::{droplet_report, partition_sweep, sweep_csv, PowerLawParams};
use crate::energy::{el_check, interaction_energy, interval_energy, separation_check};
use crate::error::{Error, Result};
use crate::kernels::{load_kernel, Kernel};
use crate::plot::{density_svg, svg_plot, Series, Style};
use crate::search::{anneal_chains, cluster_decompose, AnnealSchedule, DomainBox};
use crate::toy1d::{brute_force_min, toy_minimal_energy, toy_sweep, toy_sweep_csv, BruteMode, Witness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFINITE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wblab", version, about = "Interaction energies of well-barrier kernels under a density cap")]
pub struct Cli {
    /// Worker threads for the parallel sections (count, default 1)
    #[arg(long, env = "WBLAB_WORKERS", default_value_t = 1, global = true)]
    pub workers: usize,
    /// TOML file with one table per subcommand ([energy], [anneal], ...); flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Energy of a grid density or an interval union
    Energy(EnergyArgs),
    /// Optimal droplet partition for a power-law well
    Droplets(DropletArgs),
    /// Toy-kernel minimal energy, witness, and optional grid oracle
    Toy(ToyArgs),
    /// Simulated annealing over {0,1} grid densities
    Anneal(AnnealArgs),
    /// Multiplier and separation diagnostics of a density
    Diagnose(DiagnoseArgs),
    /// Mass sweeps (droplet partitions or toy theory vs grid oracle)
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyArgs {
    /// Kernel description (TOML file)
    #[arg(long, value_name = "PATH")]
    pub kernel: Option<PathBuf>,
    /// Density: grid text file, or JSON list of [a, b] intervals (length units)
    #[arg(long, value_name = "PATH")]
    pub density: Option<PathBuf>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerLawFlags {
    /// Spatial dimension n (1 or 2; default 1)
    #[arg(long)]
    pub n: Option<usize>,
    /// Well exponent p, dimensionless (p > n; default 2)
    #[arg(long)]
    pub p: Option<f64>,
    /// Well depth d (energy per mass², default 1)
    #[arg(long)]
    pub d: Option<f64>,
    /// Well end a (length); balls wider than a are rejected
    #[arg(long)]
    pub well_end: Option<f64>,
}

impl PowerLawFlags {
    fn params(&self) -> Result<PowerLawParams> {
        let p = PowerLawParams::new(self.n.unwrap_or(1), self.p.unwrap_or(2.0), self.d.unwrap_or(1.0))?;
        match self.well_end {
            Some(a) => p.with_well_end(a),
            None => Ok(p),
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DropletArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub power: PowerLawFlags,
    /// Total mass m (length^n)
    #[arg(long)]
    pub m: Option<f64>,
    /// Largest droplet count tried (count; default ceil(m/m*) + 2)
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Sweep: smallest mass (length^n); with --m-max, replaces --m
    #[arg(long)]
    pub m_min: Option<f64>,
    /// Sweep: largest mass (length^n)
    #[arg(long)]
    pub m_max: Option<f64>,
    /// Sweep: number of log-spaced masses (count, default 50)
    #[arg(long)]
    pub count: Option<usize>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeFlag {
    Auto,
    Exhaustive,
    Anneal,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToyArgs {
    /// Total mass m (length^n)
    #[arg(long)]
    pub m: Option<f64>,
    /// Forbidden band width w (length)
    #[arg(long)]
    pub w: Option<f64>,
    /// Spatial dimension (1 or 2; default 1)
    #[arg(long)]
    pub n_dim: Option<usize>,
    /// Also run the grid oracle on [0, length]
    #[arg(long)]
    pub brute: bool,
    /// Oracle domain length (length, default 8)
    #[arg(long)]
    pub length: Option<f64>,
    /// Oracle grid spacing (length, default 0.5)
    #[arg(long)]
    pub h: Option<f64>,
    /// Oracle mode (default auto)
    #[arg(long, value_enum)]
    pub mode: Option<ModeFlag>,
    /// Seed for annealing mode (integer, default 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealArgs {
    /// Kernel description (TOML file)
    #[arg(long, value_name = "PATH")]
    pub kernel: Option<PathBuf>,
    /// Total mass m (length^N); must be a whole number of cells
    #[arg(long)]
    pub m: Option<f64>,
    /// Grid spacing h (length)
    #[arg(long)]
    pub h: Option<f64>,
    /// Spatial dimension N (1 or 2; default 1)
    #[arg(long)]
    pub dim: Option<usize>,
    /// Side of the centered search cube (length; default 4(m/|B_1|)^{1/N} + 2(a+W))
    #[arg(long)]
    pub box_side: Option<f64>,
    /// Initial temperature (energy; default d·m·h^N)
    #[arg(long)]
    pub t0: Option<f64>,
    /// Temperature factor per epoch, in (0, 1) (default 0.95)
    #[arg(long)]
    pub cooling: Option<f64>,
    /// Number of epochs (count, default 200)
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Proposed moves per epoch (count; default 50 per occupied cell)
    #[arg(long)]
    pub moves: Option<usize>,
    /// Random seed (integer, default 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent chains with seeds seed, seed+1, ... (count, default 1)
    #[arg(long)]
    pub chains: Option<usize>,
    /// Cluster adjacency distance (length; default a+W)
    #[arg(long)]
    pub gap: Option<f64>,
    /// Tolerance of the multiplier check (energy per mass, default 1e-9)
    #[arg(long)]
    pub el_tol: Option<f64>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseArgs {
    /// Kernel description (TOML file)
    #[arg(long, value_name = "PATH")]
    pub kernel: Option<PathBuf>,
    /// Grid density file (grid text format)
    #[arg(long, value_name = "PATH")]
    pub density: Option<PathBuf>,
    /// Ball configuration instead of --density: JSON list of {center, radius} (length units)
    #[arg(long, value_name = "PATH")]
    pub balls: Option<PathBuf>,
    /// Grid spacing used to sample --balls (length, default 0.01)
    #[arg(long)]
    pub h: Option<f64>,
    /// Empty cells added around sampled balls (count, default 100)
    #[arg(long)]
    pub pad: Option<usize>,
    /// Tolerance of the multiplier check (energy per mass, default 1e-9)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Potential threshold for separation candidates (energy per mass, default 0)
    #[arg(long)]
    pub sep_tol: Option<f64>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Droplets,
    Toy,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepArgs {
    /// What to sweep (default droplets)
    #[arg(long, value_enum)]
    pub kind: Option<SweepKind>,
    #[command(flatten)]
    #[serde(flatten)]
    pub power: PowerLawFlags,
    /// Smallest mass (length^n, default 0.1)
    #[arg(long)]
    pub m_min: Option<f64>,
    /// Largest mass (length^n, default 100 for droplets, 4 for toy)
    #[arg(long)]
    pub m_max: Option<f64>,
    /// Number of masses (count; droplets log-spaced, default 50; toy uses multiples of h)
    #[arg(long)]
    pub count: Option<usize>,
    /// Toy band width w (length, default 1.5)
    #[arg(long)]
    pub w: Option<f64>,
    /// Toy oracle domain length (length, default 8)
    #[arg(long)]
    pub length: Option<f64>,
    /// Toy oracle grid spacing (length, default 0.5)
    #[arg(long)]
    pub h: Option<f64>,
    /// Toy oracle mode (default auto)
    #[arg(long, value_enum)]
    pub mode: Option<ModeFlag>,
    /// Seed for annealing mode (integer, default 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InfiniteEnergy(_) => EXIT_INFINITE,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        _ => EXIT_USAGE,
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let table = match &cli.config {
        Some(path) => Some(fs::read_to_string(path)?.parse::<toml::Table>()?),
        None => None,
    };
    let section = |name: &str| table.as_ref().and_then(|t| t.get(name)).cloned();
    let workers = cli.workers.max(1);
    match &cli.command {
        Command::Energy(a) => cmd_energy(&merge(a, section("energy"))?),
        Command::Droplets(a) => cmd_droplets(&merge(a, section("droplets"))?),
        Command::Toy(a) => cmd_toy(&merge(a, section("toy"))?, workers),
        Command::Anneal(a) => cmd_anneal(&merge(a, section("anneal"))?, workers),
        Command::Diagnose(a) => cmd_diagnose(&merge(a, section("diagnose"))?),
        Command::Sweep(a) => cmd_sweep(&merge(a, section("sweep"))?, workers),
    }
}

/// Overlays the flags that were given on top of the config-file table.
fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<toml::Value>) -> Result<T> {
    let Some(file) = file else { return Ok(serde_json::from_value(serde_json::to_value(flags)?)?) };
    let mut base = serde_json::to_value(file)?;
    let Value::Object(base_map) = &mut base else {
        return Err(Error::InvalidParameter("config section must be a table".into()));
    };
    if let Value::Object(given) = serde_json::to_value(flags)? {
        for (k, v) in given {
            if !v.is_null() && v != Value::Bool(false) {
                base_map.insert(k, v);
            }
        }
    }
    serde_json::from_value(base).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

struct Outputs<'a> {
    result: &'a Value,
    trace: Option<String>,
    density: Option<&'a GridDensity>,
    plot: Option<String>,
}

fn emit(out: Option<&Path>, o: Outputs<'_>) -> Result<()> {
    let text = serde_json::to_string_pretty(o.result)? + "\n";
    print!("{text}");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("result.json"), &text)?;
        if let Some(t) = o.trace {
            fs::write(dir.join("trace.csv"), t)?;
        }
        if let Some(d) = o.density {
            fs::write(dir.join("density.txt"), d.to_text())?;
        }
        if let Some(p) = o.plot {
            fs::write(dir.join("plot.svg"), p)?;
        }
    }
    Ok(())
}

enum DensityInput {
    Grid(GridDensity),
    Intervals(IntervalConfig),
}

fn read_density(path: &Path) -> Result<DensityInput> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('[') {
        Ok(DensityInput::Intervals(IntervalConfig::from_json(&text)?))
    } else {
        Ok(DensityInput::Grid(GridDensity::from_text(&text)?))
    }
}

fn cmd_energy(a: &EnergyArgs) -> Result<i32> {
    let kernel = load_kernel(&required(&a.kernel, "kernel")?)?;
    let input = read_density(&required(&a.density, "density")?)?;
    let (result, density) = match &input {
        DensityInput::Grid(g) => (interaction_energy(&kernel, g), Some(g)),
        DensityInput::Intervals(c) => (interval_energy(&kernel, c), None),
    };
    let value = serde_json::to_value(&result)?;
    let plot = density.map(|d| density_svg(d, "density"));
    emit(a.out.as_deref(), Outputs { result: &value, trace: None, density, plot })?;
    Ok(if result.value.is_finite() { EXIT_OK } else { EXIT_INFINITE })
}

fn cmd_droplets(a: &DropletArgs) -> Result<i32> {
    let params = a.power.params()?;
    if let (Some(lo), Some(hi)) = (a.m_min, a.m_max) {
        return droplet_sweep(&params, lo, hi, a.count.unwrap_or(50), a.out.as_deref());
    }
    let m = required(&a.m, "m")?;
    let report = droplet_report(&params, m, a.k_max)?;
    if let Some(w) = &report.warning {
        eprintln!("warning: {w}");
    }
    let value = serde_json::to_value(&report)?;
    let pts = report.masses.iter().enumerate().map(|(i, &mi)| (i as f64 + 1.0, mi)).collect();
    let plot = svg_plot("droplet masses", "droplet index", "mass", &[Series::new("m_i", pts, Style::Points)]);
    emit(a.out.as_deref(), Outputs { result: &value, trace: None, density: None, plot: Some(plot) })?;
    Ok(EXIT_OK)
}

fn droplet_sweep(params: &PowerLawParams, lo: f64, hi: f64, count: usize, out: Option<&Path>) -> Result<i32> {
    let rows = partition_sweep(params, lo, hi, count)?;
    let (m_star, lim) = crate::droplets::linear_growth_limit(params);
    let last = rows.last().expect("count >= 1");
    let value = json!({
        "rows": rows.len(),
        "last": last,
        "m_star": m_star,
        "lim_e_over_m": lim,
    });
    let curve = rows.iter().map(|r| (r.m, r.energy_per_mass)).collect();
    let limit = vec![(lo, lim), (hi, lim)];
    let plot = svg_plot(
        "E(m)/m",
        "mass m",
        "energy per mass",
        &[Series::new("E(m)/m", curve, Style::Line), Series::new("min g(m)/m", limit, Style::Line)],
    );
    emit(out, Outputs { result: &value, trace: Some(sweep_csv(&rows)), density: None, plot: Some(plot) })?;
    Ok(EXIT_OK)
}

fn brute_mode(mode: Option<ModeFlag>, seed: Option<u64>) -> BruteMode {
    match mode.unwrap_or(ModeFlag::Auto) {
        ModeFlag::Auto => BruteMode::Auto,
        ModeFlag::Exhaustive => BruteMode::Exhaustive,
        ModeFlag::Anneal => BruteMode::Anneal { seed: seed.unwrap_or(0) },
    }
}

fn cmd_toy(a: &ToyArgs, workers: usize) -> Result<i32> {
    let m = required(&a.m, "m")?;
    let w = required(&a.w, "w")?;
    let t = toy_minimal_energy(m, w, a.n_dim.unwrap_or(1))?;
    let mut value = t.report_json();
    let mut density = None;
    if a.brute {
        let (length, h) = (a.length.unwrap_or(8.0), a.h.unwrap_or(0.5));
        let r = brute_force_min(length, h, m, w, brute_mode(a.mode, a.seed), workers)?;
        value["brute_force"] = json!({
            "length": length,
            "h": h,
            "mode": r.mode,
            "energy": r.energy,
            "gap": r.energy - t.value,
            "evaluated": r.evaluated,
        });
        density = Some(r.density);
    }
    let plot = match (&density, &t.witness) {
        (Some(d), _) => density_svg(d, "grid oracle minimizer"),
        (None, Witness::Intervals(c)) => {
            let mut pts = vec![(c.intervals()[0].0 - 0.5, 0.0)];
            for &(lo, hi) in c.intervals() {
                pts.extend([(lo, 0.0), (lo, 1.0), (hi, 1.0), (hi, 0.0)]);
            }
            pts.push((c.intervals().last().unwrap().1 + 0.5, 0.0));
            svg_plot("witness", "x (length)", "density", &[Series::new("witness", pts, Style::Line)])
        }
        (None, Witness::Balls(b)) => {
            let pts = b.balls().iter().map(|b| (b.center[0], b.center[1])).collect();
            svg_plot("witness ball centers", "x (length)", "y (length)", &[Series::new("centers", pts, Style::Points)])
        }
    };
    emit(a.out.as_deref(), Outputs { result: &value, trace: None, density: density.as_ref(), plot: Some(plot) })?;
    Ok(EXIT_OK)
}

fn cmd_anneal(a: &AnnealArgs, workers: usize) -> Result<i32> {
    let kernel = load_kernel(&required(&a.kernel, "kernel")?)?;
    let m = required(&a.m, "m")?;
    let h = required(&a.h, "h")?;
    let dim = a.dim.unwrap_or(1);
    let domain = match a.box_side {
        Some(s) => DomainBox::cube(dim, s),
        None => DomainBox::default_for(&kernel, m, dim),
    };
    let defaults = AnnealSchedule::default_for(&kernel, m, h, dim, a.seed.unwrap_or(0));
    let schedule = AnnealSchedule::new(
        a.t0.unwrap_or(defaults.t0),
        a.cooling.unwrap_or(defaults.cooling),
        a.epochs.unwrap_or(defaults.epochs),
        a.moves.unwrap_or(defaults.moves_per_epoch),
        defaults.seed,
    )?;
    let r = anneal_chains(&kernel, m, &domain, h, &schedule, a.chains.unwrap_or(1), workers)?;
    let gap = a.gap.unwrap_or_else(|| default_gap(&kernel));
    let clusters = cluster_decompose(&r.density, gap)?;
    let el = el_check(&kernel, &r.density, a.el_tol.unwrap_or(1e-9)).ok();
    let value = json!({
        "m": m,
        "h": h,
        "dim": dim,
        "box": domain,
        "schedule": schedule,
        "seed": r.seed,
        "energy": r.energy,
        "proposed": r.proposed,
        "accepted": r.accepted,
        "clusters": clusters.summary_json(),
        "el": el,
    });
    emit(
        a.out.as_deref(),
        Outputs {
            result: &value,
            trace: Some(r.trace_csv()),
            density: Some(&r.density),
            plot: Some(density_svg(&r.density, "annealed density")),
        },
    )?;
    Ok(EXIT_OK)
}

fn default_gap(kernel: &Kernel) -> f64 {
    let end = kernel.params().barrier_end();
    if end.is_finite() {
        end
    } else {
        kernel.support_radius().unwrap_or(1.0)
    }
}

fn cmd_diagnose(a: &DiagnoseArgs) -> Result<i32> {
    let kernel = load_kernel(&required(&a.kernel, "kernel")?)?;
    let density = match (&a.density, &a.balls) {
        (Some(p), None) => GridDensity::from_text(&fs::read_to_string(p)?)?,
        (None, Some(p)) => {
            let cfg = DropletConfig::from_json(&fs::read_to_string(p)?)?;
            from_droplets_padded(&cfg, a.h.unwrap_or(0.01), a.pad.unwrap_or(100))?
        }
        _ => return Err(Error::InvalidParameter("give exactly one of --density and --balls".into())),
    };
    let energy = interaction_energy(&kernel, &density);
    if energy.value.is_infinite() {
        let value = json!({ "energy": energy });
        emit(a.out.as_deref(), Outputs { result: &value, trace: None, density: Some(&density), plot: None })?;
        return Ok(EXIT_INFINITE);
    }
    let el = el_check(&kernel, &density, a.tol.unwrap_or(1e-9))?;
    let sep = separation_check(&kernel, &density, a.sep_tol.unwrap_or(0.0));
    let value = json!({ "energy": energy, "el": el, "separation": sep });
    emit(
        a.out.as_deref(),
        Outputs { result: &value, trace: None, density: Some(&density), plot: Some(density_svg(&density, "density")) },
    )?;
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &SweepArgs, workers: usize) -> Result<i32> {
    match a.kind.unwrap_or(SweepKind::Droplets) {
        SweepKind::Droplets => {
            let params = a.power.params()?;
            droplet_sweep(&params, a.m_min.unwrap_or(0.1), a.m_max.unwrap_or(100.0), a.count.unwrap_or(50), a.out.as_deref())
        }
        SweepKind::Toy => {
            let w = a.w.unwrap_or(1.5);
            let h = a.h.unwrap_or(0.5);
            let lo = a.m_min.unwrap_or(h);
            let hi = a.m_max.unwrap_or(4.0);
            let first = (lo / h).round() as usize;
            let last = (hi / h).round() as usize;
            let masses: Vec<f64> = (first.max(1)..=last).map(|k| k as f64 * h).collect();
            let rows = toy_sweep(&masses, w, a.length.unwrap_or(8.0), h, brute_mode(a.mode, a.seed), workers)?;
            let value = json!({ "rows": rows });
            let theory = rows.iter().map(|r| (r.m, r.theory)).collect();
            let brute = rows.iter().map(|r| (r.m, r.brute_force)).collect();
            let plot = svg_plot(
                "toy minimal energy",
                "mass m",
                "energy",
                &[Series::new("theory", theory, Style::Line), Series::new("grid oracle", brute, Style::Points)],
            );
            emit(a.out.as_deref(), Outputs { result: &value, trace: Some(toy_sweep_csv(&rows)), density: None, plot: Some(plot) })?;
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_values() {
        let flags = AnnealArgs { m: Some(2.0), ..Default::default() };
        let file: toml::Value = toml::from_str("m = 1.5\nh = 0.1\nseed = 9\n").unwrap();
        let merged = merge(&flags, Some(file)).unwrap();
        assert_eq!((merged.m, merged.h, merged.seed), (Some(2.0), Some(0.1), Some(9)));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let file: toml::Value = toml::from_str("mass = 1.5\n").unwrap();
        assert!(merge(&AnnealArgs::default(), Some(file)).is_err());
    }

    #[test]
    fn nested_power_law_flags_merge() {
        let file: toml::Value = toml::from_str("p = 3.0\nm = 2.0\n").unwrap();
        let flags = DropletArgs { power: PowerLawFlags { d: Some(2.0), ..Default::default() }, ..Default::default() };
        let merged = merge(&flags, Some(file)).unwrap();
        assert_eq!((merged.power.p, merged.power.d, merged.m), (Some(3.0), Some(2.0), Some(2.0)));
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(run_from(["wblab", "droplets", "--m", "0"]), EXIT_USAGE);
        assert_eq!(run_from(["wblab", "nonsense"]), EXIT_USAGE);
        assert_eq!(run_from(["wblab", "--help"]), EXIT_OK);
    }
}
