//! Command-line front end.
//!
//! Subcommands map one-to-one onto the crate's capabilities:
//! `spectrum | orbits | lissajous | ellipticity | g2 | convergence`. Every
//! run is described by a TOML configuration (sections `driver`, `atom`,
//! `numerics`, `task`, `io`), all quantities in atomic units; a handful of
//! flags override the `io`/grid entries. Each emitted CSV is paired with a
//! metadata JSON echoing the fully resolved configuration and content
//! hashes. Data files are written to a temporary name and renamed, so an
//! interrupted run never leaves truncated artifacts.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical fault.

use crate::cache::{sha256_hex, SpectrumCache};
use crate::driver::{
    self, DriverConfig, EllipticityStats, PolarizationState, Quadrature,
};
use crate::orbits::{self, SaddleSystemConfig, SeedGrid};
use crate::sfa::{AtomSpec, NumericsSpec, Window};
use crate::spectrum::{self, GridSpec, SpectrumResult};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "hhg", version, about = "HHG spectra, quantum orbits and driver statistics for squeezed and thermal circular drivers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `io.out_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (overrides `io.workers`; default: logical cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Cache directory for per-realization spectra (overrides
    /// `io.cache_dir`).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// RNG seed for sampling tasks (overrides `io.seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Marginal grid points (overrides `task.grid_points`).
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Marginal grid truncation in standard deviations (overrides
    /// `task.n_sigma`).
    #[arg(long, global = true)]
    pub n_sigma: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Weighted-average HHG spectrum (optionally swept over I_squ).
    Spectrum,
    /// Saddle-point quantum-orbit scan over harmonic orders.
    Orbits,
    /// Statistical Lissajous samples and their 2D histogram.
    Lissajous,
    /// Ellipticity and its fluctuations vs I_squ, with a Monte-Carlo column.
    Ellipticity,
    /// g²(0) per harmonic band.
    G2,
    /// Marginal-grid convergence table.
    Convergence,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical fault: {msg}"),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn config_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

fn num_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Numerical(msg.to_string())
}

/// Raw `[numerics]` block; unset entries fall back to the carrier-frequency
/// defaults.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsBlock {
    pub dt: Option<f64>,
    pub steps_per_cycle: Option<f64>,
    pub n_cycles: Option<u32>,
    pub window: Option<Window>,
    pub epsilon_reg: Option<f64>,
    pub excursion_cap: Option<f64>,
    pub excursion_cap_cycles: Option<f64>,
}

impl NumericsBlock {
    pub fn resolve(&self, omega: f64) -> Result<NumericsSpec> {
        let mut num = NumericsSpec::for_omega(omega);
        let cycle = 2.0 * PI / omega;
        if let Some(spc) = self.steps_per_cycle {
            num.dt = cycle / spc;
        }
        if let Some(dt) = self.dt {
            num.dt = dt;
        }
        if let Some(n) = self.n_cycles {
            num.n_cycles = n;
        }
        if let Some(w) = self.window {
            num.window = w;
        }
        if let Some(e) = self.epsilon_reg {
            num.epsilon_reg = e;
        }
        if let Some(c) = self.excursion_cap_cycles {
            num.excursion_cap = c * cycle;
        }
        if let Some(c) = self.excursion_cap {
            num.excursion_cap = c;
        }
        num.validate().map_err(config_err)?;
        Ok(num)
    }
}

/// Raw `[task]` block; relevant fields per subcommand, the rest ignored.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskBlock {
    // spectrum
    pub i_squ_list: Option<Vec<f64>>,
    pub grid_points: Option<usize>,
    pub n_sigma: Option<f64>,
    pub max_order: Option<f64>,
    pub drop_db: Option<f64>,
    // orbits
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    pub q_step: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub seed_nodes: Option<usize>,
    // lissajous
    pub n_samples: Option<usize>,
    pub n_times: Option<usize>,
    pub display_eps: Option<f64>,
    pub hist_bins: Option<usize>,
    // ellipticity
    pub mc_samples: Option<usize>,
    pub mc_eps0: Option<f64>,
    // g2
    pub bands: Option<Vec<(f64, f64)>>,
    // convergence
    pub n_points_list: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoBlock {
    pub out_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

/// Full run configuration as parsed from TOML.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub driver: DriverConfig,
    pub atom: AtomSpec,
    #[serde(default)]
    pub numerics: NumericsBlock,
    #[serde(default)]
    pub task: TaskBlock,
    #[serde(default)]
    pub io: IoBlock,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        cfg.driver.validate().map_err(config_err)?;
        if !(cfg.atom.ip > 0.0) {
            return Err(config_err("atom.ip must be > 0"));
        }
        Ok(cfg)
    }
}

/// Everything resolved: what actually ran. Echoed into metadata sidecars.
#[derive(Clone, Debug, Serialize)]
pub struct ResolvedRun {
    pub driver: DriverConfig,
    pub atom: AtomSpec,
    pub numerics: NumericsSpec,
    pub grid: GridSpec,
    pub out_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Serialize)]
struct Metadata<'a> {
    config: &'a ResolvedRun,
    task: serde_json::Value,
    n_realizations: Option<usize>,
    weights_sha256: Option<String>,
    data_sha256: String,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, bytes)
        .map_err(|e| num_err(format!("write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| num_err(format!("rename to {}: {e}", path.display())))
}

fn write_with_metadata(
    path: &Path,
    csv: &str,
    resolved: &ResolvedRun,
    task: serde_json::Value,
    n_realizations: Option<usize>,
    weights: Option<&[f64]>,
) -> Result<()> {
    write_atomic(path, csv.as_bytes())?;
    let weights_sha256 = weights.map(|w| {
        let mut buf = Vec::with_capacity(w.len() * 8);
        for v in w {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        sha256_hex(&buf)
    });
    let meta = Metadata {
        config: resolved,
        task,
        n_realizations,
        weights_sha256,
        data_sha256: sha256_hex(csv.as_bytes()),
    };
    let meta_path = path.with_extension("meta.json");
    let json = serde_json::to_vec_pretty(&meta).expect("serializable metadata");
    write_atomic(&meta_path, &json)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn fmt_f(v: f64) -> String {
    format!("{v:e}")
}

/// Entry point used by the `hhg` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match run_with(&cli) {
        Ok(()) => 0,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            2
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical fault: {msg}");
            3
        }
    }
}

pub fn run_with(cli: &Cli) -> Result<()> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| config_err("--config PATH is required"))?;
    let cfg = RunConfig::from_path(config_path)?;

    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.io.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| config_err(format!("cannot create {}: {e}", out_dir.display())))?;
    let cache_dir = cli.cache.clone().or_else(|| cfg.io.cache_dir.clone());
    let seed = cli.seed.or(cfg.io.seed).unwrap_or(0);
    let workers = cli.workers.or(cfg.io.workers).unwrap_or(0);

    let numerics = cfg.numerics.resolve(cfg.driver.omega)?;
    let grid = GridSpec {
        n_points: cli.grid_points.or(cfg.task.grid_points).unwrap_or(241),
        n_sigma: cli.n_sigma.or(cfg.task.n_sigma).unwrap_or(4.0),
        max_order: cfg.task.max_order.unwrap_or(120.0),
    };

    let resolved = ResolvedRun {
        driver: cfg.driver.clone(),
        atom: cfg.atom,
        numerics,
        grid,
        out_dir: out_dir.clone(),
        cache_dir: cache_dir.clone(),
        seed,
        workers,
    };

    let job = || dispatch(cli.command, &cfg, &resolved);
    if workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| config_err(format!("worker pool: {e}")))?;
        pool.install(job)
    } else {
        job()
    }
}

fn dispatch(command: Command, cfg: &RunConfig, resolved: &ResolvedRun) -> Result<()> {
    match command {
        Command::Spectrum => run_spectrum(cfg, resolved),
        Command::Orbits => run_orbits(cfg, resolved),
        Command::Lissajous => run_lissajous(cfg, resolved),
        Command::Ellipticity => run_ellipticity(cfg, resolved),
        Command::G2 => run_g2(cfg, resolved),
        Command::Convergence => run_convergence(cfg, resolved),
    }
}

fn open_cache(resolved: &ResolvedRun) -> Result<Option<SpectrumCache>> {
    match &resolved.cache_dir {
        None => Ok(None),
        Some(dir) => SpectrumCache::open(dir)
            .map(Some)
            .map_err(|e| config_err(format!("cache dir {}: {e}", dir.display()))),
    }
}

fn with_fluctuation(driver: &DriverConfig, value: f64) -> Result<DriverConfig> {
    let perp = match driver.perp.clone() {
        PolarizationState::DisplacedSqueezedVacuum { mean, quadrature, .. } => {
            PolarizationState::DisplacedSqueezedVacuum { mean, i_squ: value, quadrature }
        }
        PolarizationState::DisplacedThermal { mean, .. } => {
            PolarizationState::DisplacedThermal { mean, i_th: value }
        }
        PolarizationState::Coherent { .. } => {
            return Err(config_err(
                "task.i_squ_list requires a squeezed or thermal perpendicular component",
            ))
        }
    };
    Ok(DriverConfig { perp, ..driver.clone() })
}

fn spectrum_csv(result: &SpectrumResult) -> String {
    let normalized = result.normalized();
    let mut csv = String::from("harmonic_order,S_raw,S_norm\n");
    for (k, q) in result.harmonic_orders.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            fmt_f(*q),
            fmt_f(result.s[k]),
            fmt_f(normalized.s[k])
        );
    }
    csv
}

fn run_spectrum(cfg: &RunConfig, resolved: &ResolvedRun) -> Result<()> {
    let cache = open_cache(resolved)?;
    let sweep: Vec<(String, DriverConfig)> = match &cfg.task.i_squ_list {
        None => vec![("base".to_string(), cfg.driver.clone())],
        Some(list) if list.is_empty() => {
            eprintln!("warning: task.i_squ_list is empty; nothing to do");
            return Ok(());
        }
        Some(list) => list
            .iter()
            .map(|&v| Ok((format!("isqu_{}", fmt_f(v)), with_fluctuation(&cfg.driver, v)?)))
            .collect::<Result<Vec<_>>>()?,
    };
    for (label, driver) in sweep {
        let result = spectrum::hhg_spectrum_cached(
            &driver,
            &resolved.atom,
            &resolved.numerics,
            &resolved.grid,
            cache.as_ref(),
        )
        .map_err(num_err)?;
        let cutoffs = spectrum::cutoff_detect(&result, cfg.task.drop_db.unwrap_or(20.0));
        println!("{label}: cutoffs {cutoffs:?}");
        let csv = spectrum_csv(&result);
        let path = resolved.out_dir.join(format!("spectrum_{label}.csv"));
        let run_echo = ResolvedRun { driver: driver.clone(), ..resolved.clone() };
        write_with_metadata(
            &path,
            &csv,
            &run_echo,
            serde_json::json!({"kind": "spectrum", "label": label, "cutoffs": cutoffs}),
            Some(result.n_realizations),
            Some(&result.weights_used),
        )?;
    }
    Ok(())
}

fn saddle_config(cfg: &RunConfig) -> Result<SaddleSystemConfig> {
    let par = cfg.driver.parallel.mean();
    let perp = cfg.driver.perp.mean();
    let (quadrature, sigma) = match &cfg.driver.perp {
        PolarizationState::Coherent { .. } => (Quadrature::X, 0.0),
        PolarizationState::DisplacedSqueezedVacuum { i_squ, quadrature, .. } => {
            (*quadrature, 4.0 * i_squ)
        }
        PolarizationState::DisplacedThermal { .. } => {
            return Err(config_err(
                "quantum orbits are defined for coherent or squeezed perpendicular components",
            ))
        }
    };
    Ok(SaddleSystemConfig {
        eps_par_x: par.re,
        eps_par_y: par.im,
        eps_perp_x: perp.re,
        eps_perp_y: perp.im,
        omega: cfg.driver.omega,
        ip: cfg.atom.ip,
        harmonic_omega: cfg.driver.omega * 31.0,
        squeezed_quadrature: quadrature,
        sigma,
    })
}

fn run_orbits(cfg: &RunConfig, resolved: &ResolvedRun) -> Result<()> {
    let base = saddle_config(cfg)?;
    let q_min = cfg.task.q_min.ok_or_else(|| config_err("task.q_min is required"))?;
    let q_max = cfg.task.q_max.ok_or_else(|| config_err("task.q_max is required"))?;
    let q_step = cfg.task.q_step.unwrap_or(1.0);
    let tol = cfg.task.tol.unwrap_or(1e-10);
    let max_iter = cfg.task.max_iter.unwrap_or(200);
    let mut seeds = SeedGrid::default_for(cfg.driver.omega);
    if let Some(n) = cfg.task.seed_nodes {
        seeds.n_tion = n;
        seeds.n_tre = n;
    }
    let scan = orbits::scan_harmonics(&base, (q_min, q_max), q_step, &seeds, tol, max_iter)
        .map_err(num_err)?;

    let mut csv = String::from(
        "q,Re_t_ion,Im_t_ion,Re_t_re,Im_t_re,Re_p_par,Im_p_par,Re_p_perp,Im_p_perp,Re_eps,Im_eps,residual,family\n",
    );
    let mut n_solutions = 0usize;
    for (q, sols) in &scan {
        for s in sols {
            n_solutions += 1;
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                fmt_f(*q),
                fmt_f(s.t_ion.re),
                fmt_f(s.t_ion.im),
                fmt_f(s.t_re.re),
                fmt_f(s.t_re.im),
                fmt_f(s.p_par.re),
                fmt_f(s.p_par.im),
                fmt_f(s.p_perp.re),
                fmt_f(s.p_perp.im),
                fmt_f(s.eps_fluct.re),
                fmt_f(s.eps_fluct.im),
                fmt_f(s.residual_norm),
                s.family.as_str()
            );
        }
    }
    let max_q = scan.iter().rev().find(|(_, s)| !s.is_empty()).map(|(q, _)| *q);
    println!("orbits: {n_solutions} solutions, highest populated order {max_q:?}");
    let path = resolved.out_dir.join("orbits.csv");
    write_with_metadata(
        &path,
        &csv,
        resolved,
        serde_json::json!({
            "kind": "orbits",
            "q_min": q_min, "q_max": q_max, "q_step": q_step,
            "tol": tol, "max_iter": max_iter,
            "n_solutions": n_solutions,
            "highest_populated_order": max_q,
        }),
        None,
        None,
    )
}

fn run_lissajous(cfg: &RunConfig, resolved: &ResolvedRun) -> Result<()> {
    let n_samples = cfg.task.n_samples.unwrap_or(200);
    let n_times = cfg.task.n_times.unwrap_or(128);
    let display_eps = cfg.task.display_eps.unwrap_or(0.053 / 20.0);
    let hist_bins = cfg.task.hist_bins.unwrap_or(80);
    let period = 2.0 * PI / cfg.driver.omega;
    let times: Vec<f64> =
        (0..n_times).map(|k| period * k as f64 / n_times.max(1) as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(resolved.seed);
    let sample = driver::sample_lissajous(&cfg.driver, n_samples, &times, display_eps, &mut rng)
        .map_err(num_err)?;

    let mut csv = String::from("t,E_par,E_perp\n");
    for (ti, &t) in sample.times.iter().enumerate() {
        for k in 0..n_samples {
            let (ep, eq) = sample.samples[ti * n_samples + k];
            let _ = writeln!(csv, "{},{},{}", fmt_f(t), fmt_f(ep), fmt_f(eq));
        }
    }
    let path = resolved.out_dir.join("lissajous_samples.csv");
    let task_echo = serde_json::json!({
        "kind": "lissajous", "n_samples": n_samples, "n_times": n_times,
        "display_eps": display_eps, "hist_bins": hist_bins,
    });
    write_with_metadata(&path, &csv, resolved, task_echo.clone(), None, None)?;

    // 2D histogram over a symmetric window covering the samples
    let max_abs = sample
        .samples
        .iter()
        .flat_map(|&(a, b)| [a.abs(), b.abs()])
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let half = max_abs * 1.05;
    let bin = 2.0 * half / hist_bins as f64;
    let mut counts = vec![0u64; hist_bins * hist_bins];
    for &(a, b) in &sample.samples {
        let i = (((a + half) / bin) as usize).min(hist_bins - 1);
        let j = (((b + half) / bin) as usize).min(hist_bins - 1);
        counts[i * hist_bins + j] += 1;
    }
    let mut hist_csv = String::from("E_par_center,E_perp_center,count\n");
    for i in 0..hist_bins {
        for j in 0..hist_bins {
            let c = counts[i * hist_bins + j];
            if c > 0 {
                let _ = writeln!(
                    hist_csv,
                    "{},{},{}",
                    fmt_f(-half + (i as f64 + 0.5) * bin),
                    fmt_f(-half + (j as f64 + 0.5) * bin),
                    c
                );
            }
        }
    }
    let hist_path = resolved.out_dir.join("lissajous_hist.csv");
    write_with_metadata(&hist_path, &hist_csv, resolved, task_echo, None, None)
}

fn run_ellipticity(cfg: &RunConfig, resolved: &ResolvedRun) -> Result<()> {
    let default_sweep: Vec<f64> = {
        let mut v = vec![0.0];
        let mut x = 1e-6;
        while x <= 5.0e-4 + 1e-12 {
            v.push(x);
            x *= 2.0;
        }
        v
    };
    let sweep = cfg.task.i_squ_list.clone().unwrap_or(default_sweep);
    let mc_samples = cfg.task.mc_samples.unwrap_or(1_000_000);
    let mut rng = ChaCha8Rng::seed_from_u64(resolved.seed);

    let mut csv = String::from(
        "i_squ,quadrature,E_abs,E_signed,delta_E,E_abs_mc,delta_E_mc\n",
    );
    for &i_squ in &sweep {
        for quad in [Quadrature::X, Quadrature::Y] {
            let mean = cfg.driver.perp.mean();
            let driver_cfg = DriverConfig {
                perp: PolarizationState::squeezed(mean, i_squ, quad),
                ..cfg.driver.clone()
            };
            let closed = driver::ellipticity_stats(&driver_cfg).map_err(num_err)?;
            let eps0 = cfg
                .task
                .mc_eps0
                .unwrap_or_else(|| if i_squ > 0.0 { (i_squ * 1e-3).sqrt() } else { 1e-4 });
            let mc: EllipticityStats =
                driver::monte_carlo_stokes(&driver_cfg, mc_samples, eps0, &mut rng)
                    .map_err(num_err)?;
            let quad_name = match quad {
                Quadrature::X => "x",
                Quadrature::Y => "y",
            };
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                fmt_f(i_squ),
                quad_name,
                fmt_f(closed.mean_ellipticity),
                fmt_f(closed.signed_ellipticity),
                fmt_f(closed.delta_ellipticity),
                fmt_f(mc.mean_ellipticity),
                fmt_f(mc.delta_ellipticity)
            );
        }
    }
    let path = resolved.out_dir.join("ellipticity.csv");
    write_with_metadata(
        &path,
        &csv,
        resolved,
        serde_json::json!({"kind": "ellipticity", "i_squ_sweep": sweep, "mc_samples": mc_samples}),
        None,
        None,
    )
}

fn run_g2(cfg: &RunConfig, resolved: &ResolvedRun) -> Result<()> {
    let cache = open_cache(resolved)?;
    let bands = cfg.task.bands.clone().unwrap_or_else(|| vec![(11.0, 21.0)]);
    let mut csv = String::from("q_lo,q_hi,g2\n");
    for band in &bands {
        let res = spectrum::g2_zero_cached(
            &cfg.driver,
            &resolved.atom,
            &resolved.numerics,
            &resolved.grid,
            *band,
            cache.as_ref(),
        )
        .map_err(num_err)?;
        println!("g2({:.1}..{:.1}) = {:.9}", band.0, band.1, res.g2);
        let _ = writeln!(csv, "{},{},{}", fmt_f(band.0), fmt_f(band.1), fmt_f(res.g2));
    }
    let path = resolved.out_dir.join("g2.csv");
    write_with_metadata(
        &path,
        &csv,
        resolved,
        serde_json::json!({"kind": "g2", "bands": bands}),
        None,
        None,
    )
}

fn run_convergence(cfg: &RunConfig, resolved: &ResolvedRun) -> Result<()> {
    let cache = open_cache(resolved)?;
    let list = cfg.task.n_points_list.clone().unwrap_or_else(|| vec![61, 121, 241]);
    let rows = spectrum::convergence_scan_cached(
        &cfg.driver,
        &resolved.atom,
        &resolved.numerics,
        &list,
        resolved.grid.n_sigma,
        cache.as_ref(),
    )
    .map_err(num_err)?;
    let mut csv = String::from("n_points,deviation\n");
    for row in &rows {
        println!("n_points {:>5}: deviation {:.4}", row.n_points, row.deviation);
        let _ = writeln!(csv, "{},{}", row.n_points, fmt_f(row.deviation));
    }
    let path = resolved.out_dir.join("convergence.csv");
    write_with_metadata(
        &path,
        &csv,
        resolved,
        serde_json::json!({"kind": "convergence", "n_points_list": list}),
        None,
        None,
    )
}
