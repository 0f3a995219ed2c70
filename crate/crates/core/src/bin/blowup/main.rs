//! Command-line front end: constants, spectra, energy and residual sweeps,
//! rate fits, the reduced landscape and the consolidated verification report.
//!
//! Configuration comes from an optional flat `key = value` file with
//! `[section]` headers, overridden by command-line flags. Every sweep lands
//! in a CSV file with a fixed header and 17-significant-digit floats, so
//! identical configuration produces byte-identical output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration
//! error, 3 tolerance failure.

use blowup_core::constants::{reduced_coefficients, sobolev_constant, sobolev_mass};
use blowup_core::energy::{
    functional_value, residual_norm, residual_norm_background, residual_norm_direct, AnsatzSign,
    AnsatzSpec,
};
use blowup_core::manifolds::ModelManifold;
use blowup_core::profiles::{BubbleConfig, CutoffSpec, SmoothstepOrder};
use blowup_core::quadrature::QuadratureSpec;
use blowup_core::reduction::{
    g_functional, phi_field, predict_blowup_point, reduced_expansion, t_star, t_star_search,
    GridPoint, PointwiseData, PredictionOutcome, ReducedRegime,
};
use blowup_core::verify::{default_epsilon_grid, fit_rate, verify_all, FitModel};
use blowup_core::{Error, Result};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Environment variable naming the default output directory.
const OUT_DIR_VAR: &str = "BLOWUP_OUT_DIR";

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Parser)]
#[command(
    name = "blowup",
    version,
    about = "Bubble-ansatz energies, residual rates and blow-up verification on model manifolds"
)]
struct Cli {
    /// Flat key=value configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV files; defaults to $BLOWUP_OUT_DIR or ".".
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Emit JSON instead of text where the subcommand supports it.
    #[arg(long, global = true)]
    json: bool,
    /// Print the fully resolved configuration in config-file format before
    /// running; feeding it back through --config reproduces the run.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Manifold kind: sphere | product.
    #[arg(long)]
    kind: Option<String>,
    /// Dimension n >= 3.
    #[arg(long)]
    n: Option<usize>,
    /// Circle radius of the product manifold.
    #[arg(long)]
    r: Option<f64>,
    /// Constant coupling; omit for the geometric value c_n Scal_g.
    #[arg(long)]
    coupling: Option<f64>,
    /// Comma-separated concentration scales.
    #[arg(long)]
    t_grid: Option<String>,
    /// Comma-separated subcritical shifts; "default" selects the standard
    /// eighth-of-a-decade grid over [1e-4, 1e-2].
    #[arg(long)]
    epsilon_grid: Option<String>,
    /// Reduced regime: generic36 | geometric39 | lcf-all-dim | dim10-weyl |
    /// dim6-positive.
    #[arg(long)]
    regime: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print dimensional constants and the reduced-expansion coefficients.
    Constants(CommonArgs),
    /// List Laplace eigenvalues near the constant-solution shift and the
    /// degeneracy verdict.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Spectrum cutoff; defaults to twice the shift plus ten.
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Evaluate the closed-form reduced expansion on the (epsilon, t) grid.
    Expand(CommonArgs),
    /// Quadrature sweep of the ansatz energy over the (epsilon, t) grid.
    Energy(CommonArgs),
    /// Quadrature sweep of the ansatz residual norm over the (epsilon, t)
    /// grid. The error_estimate column is 0: the norm assembly does not
    /// propagate a bound.
    Residual {
        #[command(flatten)]
        common: CommonArgs,
        /// operator | direct | shim: the linearized-operator route, the
        /// direct zonal Laplacian, or the closed-form background defect.
        #[arg(long, default_value = "operator")]
        route: String,
    },
    /// Fit a decay rate to a sweep CSV produced by energy or residual.
    Rates {
        /// Sweep CSV with an epsilon and a value column.
        #[arg(long)]
        input: PathBuf,
        /// power | power_log.
        #[arg(long, default_value = "power")]
        model: String,
        /// Optional slope target; with --tolerance the fit is gated.
        #[arg(long)]
        target: Option<f64>,
        /// Allowed |slope - target|; violation exits with code 3.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Reduced landscape: optimal scale, G profile and an optional
    /// blow-up-point certificate over candidate centers.
    Reduce {
        #[command(flatten)]
        common: CommonArgs,
        /// Background sample u0; defaults to the manifold's constant value.
        #[arg(long)]
        u0: Option<f64>,
        /// Pointwise squared Weyl norm.
        #[arg(long, default_value_t = 0.0)]
        weyl2: f64,
        /// CSV of candidate centers with header coordinate,u0,h,scal,weyl2.
        #[arg(long)]
        centers: Option<PathBuf>,
    },
    /// Run the verification suites and write the consolidated report.
    VerifyAll {
        #[command(flatten)]
        common: CommonArgs,
        /// Keep one representative case per family instead of the full
        /// sweep lists.
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ToleranceNotMet { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// Manifold selector, one of the two model families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ManifoldKind {
    Sphere,
    Product,
}

impl ManifoldKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(ManifoldKind::Sphere),
            "product" => Ok(ManifoldKind::Product),
            _ => Err(Error::ConfigParse {
                line: 0,
                reason: format!("unknown manifold kind {s:?}; expected sphere or product"),
            }),
        }
    }

    fn kind_name(self) -> &'static str {
        match self {
            ManifoldKind::Sphere => "sphere",
            ManifoldKind::Product => "product",
        }
    }
}

fn parse_regime(s: &str) -> Result<ReducedRegime> {
    ReducedRegime::all()
        .into_iter()
        .find(|r| r.kind_name() == s)
        .ok_or_else(|| Error::ConfigParse {
            line: 0,
            reason: format!("unknown regime {s:?}"),
        })
}

/// Fully resolved run configuration: defaults, then the config file, then
/// command-line flags. Rendering and reparsing reproduces it exactly.
#[derive(Clone, Debug, PartialEq)]
struct RunConfig {
    kind: ManifoldKind,
    n: usize,
    r: f64,
    coupling: Option<f64>,
    t_grid: Vec<f64>,
    epsilon_grid: Vec<f64>,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: u32,
    regime: ReducedRegime,
    out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let quad = QuadratureSpec::default();
        RunConfig {
            kind: ManifoldKind::Sphere,
            n: 3,
            r: 0.7,
            coupling: None,
            t_grid: vec![1.0],
            epsilon_grid: default_epsilon_grid(),
            rel_tol: quad.rel_tol,
            abs_tol: quad.abs_tol,
            max_depth: quad.max_depth,
            regime: ReducedRegime::LcfAllDim,
            out_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    fn manifold(&self) -> Result<ModelManifold> {
        match self.kind {
            ManifoldKind::Sphere => ModelManifold::round_sphere(self.n),
            ManifoldKind::Product => ModelManifold::product_circle_sphere(self.n, self.r),
        }
    }

    fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_depth: self.max_depth,
            ..QuadratureSpec::default()
        }
    }

    /// Writes the configuration back in its own file format.
    fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[manifold]");
        let _ = writeln!(out, "kind = {}", self.kind.kind_name());
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "r = {:.16e}", self.r);
        let _ = writeln!(out, "[ansatz]");
        if let Some(c) = self.coupling {
            let _ = writeln!(out, "coupling = {c:.16e}");
        }
        let _ = writeln!(out, "[grid]");
        let _ = writeln!(out, "t = {}", render_list(&self.t_grid));
        let _ = writeln!(out, "epsilon = {}", render_list(&self.epsilon_grid));
        let _ = writeln!(out, "[quadrature]");
        let _ = writeln!(out, "rel_tol = {:.16e}", self.rel_tol);
        let _ = writeln!(out, "abs_tol = {:.16e}", self.abs_tol);
        let _ = writeln!(out, "max_depth = {}", self.max_depth);
        let _ = writeln!(out, "[reduce]");
        let _ = writeln!(out, "regime = {}", self.regime.kind_name());
        let _ = writeln!(out, "[output]");
        let _ = writeln!(out, "dir = {}", self.out_dir.display());
        out
    }
}

fn render_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    if text == "default" {
        return Ok(default_epsilon_grid());
    }
    text.split(',')
        .map(|piece| {
            piece.trim().parse::<f64>().map_err(|_| Error::ConfigParse {
                line: 0,
                reason: format!("not a number: {piece:?}"),
            })
        })
        .collect()
}

/// Flat `key = value` file with `[section]` headers, flattened to
/// `section.key` entries.
fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let number = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::ConfigParse {
                line: number,
                reason: "unterminated section header".to_string(),
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
            line: number,
            reason: "expected key = value".to_string(),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::ConfigParse {
                line: number,
                reason: "empty key".to_string(),
            });
        }
        let full = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        map.insert(full, value.trim().to_string());
    }
    Ok(map)
}

fn resolve_config(
    file: Option<&BTreeMap<String, String>>,
    common: &CommonArgs,
    out_dir_flag: Option<&PathBuf>,
) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(map) = file {
        let get = |key: &str| map.get(key).map(String::as_str);
        if let Some(v) = get("manifold.kind") {
            cfg.kind = ManifoldKind::parse(v)?;
        }
        if let Some(v) = get("manifold.n") {
            cfg.n = v.parse().map_err(|_| Error::ConfigParse {
                line: 0,
                reason: format!("manifold.n is not an integer: {v:?}"),
            })?;
        }
        if let Some(v) = get("manifold.r") {
            cfg.r = parse_list(v)?.first().copied().unwrap_or(cfg.r);
        }
        if let Some(v) = get("ansatz.coupling") {
            cfg.coupling = Some(parse_list(v)?[0]);
        }
        if let Some(v) = get("grid.t") {
            cfg.t_grid = parse_list(v)?;
        }
        if let Some(v) = get("grid.epsilon") {
            cfg.epsilon_grid = parse_list(v)?;
        }
        if let Some(v) = get("quadrature.rel_tol") {
            cfg.rel_tol = parse_list(v)?[0];
        }
        if let Some(v) = get("quadrature.abs_tol") {
            cfg.abs_tol = parse_list(v)?[0];
        }
        if let Some(v) = get("quadrature.max_depth") {
            cfg.max_depth = v.parse().map_err(|_| Error::ConfigParse {
                line: 0,
                reason: format!("quadrature.max_depth is not an integer: {v:?}"),
            })?;
        }
        if let Some(v) = get("reduce.regime") {
            cfg.regime = parse_regime(v)?;
        }
        if let Some(v) = get("output.dir") {
            cfg.out_dir = PathBuf::from(v);
        }
    }
    if let Some(v) = &common.kind {
        cfg.kind = ManifoldKind::parse(v)?;
    }
    if let Some(v) = common.n {
        cfg.n = v;
    }
    if let Some(v) = common.r {
        cfg.r = v;
    }
    if let Some(v) = common.coupling {
        cfg.coupling = Some(v);
    }
    if let Some(v) = &common.t_grid {
        cfg.t_grid = parse_list(v)?;
    }
    if let Some(v) = &common.epsilon_grid {
        cfg.epsilon_grid = parse_list(v)?;
    }
    if let Some(v) = &common.regime {
        cfg.regime = parse_regime(v)?;
    }
    if let Some(dir) = out_dir_flag {
        cfg.out_dir = dir.clone();
    } else if file.map_or(true, |m| !m.contains_key("output.dir")) {
        if let Ok(dir) = std::env::var(OUT_DIR_VAR) {
            cfg.out_dir = PathBuf::from(dir);
        }
    }
    Ok(cfg)
}

fn load_config(cli_config: Option<&PathBuf>) -> Result<Option<BTreeMap<String, String>>> {
    match cli_config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok(Some(parse_config_file(&text)?))
        }
        None => Ok(None),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let file = load_config(cli.config.as_ref())?;
    let common = match &cli.command {
        Command::Constants(c) | Command::Expand(c) | Command::Energy(c) => c.clone(),
        Command::Spectrum { common, .. }
        | Command::Residual { common, .. }
        | Command::Reduce { common, .. }
        | Command::VerifyAll { common, .. } => common.clone(),
        Command::Rates { .. } => CommonArgs::default(),
    };
    let cfg = resolve_config(file.as_ref(), &common, cli.out_dir.as_ref())?;
    if cli.dump_config {
        print!("{}", cfg.render());
    }
    match cli.command {
        Command::Constants(_) => cmd_constants(&cfg, cli.json),
        Command::Spectrum { cutoff, .. } => cmd_spectrum(&cfg, cutoff, cli.json),
        Command::Expand(_) => cmd_expand(&cfg),
        Command::Energy(_) => cmd_energy(&cfg),
        Command::Residual { route, .. } => cmd_residual(&cfg, &route),
        Command::Rates {
            input,
            model,
            target,
            tolerance,
        } => cmd_rates(&cfg, &input, &model, target, tolerance),
        Command::Reduce {
            u0, weyl2, centers, ..
        } => cmd_reduce(&cfg, u0, weyl2, centers.as_deref(), cli.json),
        Command::VerifyAll { quick, .. } => cmd_verify_all(&cfg, quick),
    }
}

fn write_output(cfg: &RunConfig, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}

fn cmd_constants(cfg: &RunConfig, json: bool) -> Result<ExitCode> {
    let manifold = cfg.manifold()?;
    let coeffs = reduced_coefficients(&manifold, cfg.coupling)?;
    if json {
        println!("{}", to_json(&coeffs)?);
        return Ok(ExitCode::SUCCESS);
    }
    let n = cfg.n;
    println!("manifold = {} (n = {n})", manifold.kind_name());
    println!("coupling = {:.16e}", coeffs.coupling);
    println!("volume = {:.16e}", coeffs.volume);
    println!("background = {:.16e}", coeffs.background);
    println!("sobolev_constant = {:.16e}", sobolev_constant(n));
    println!("sobolev_mass = {:.16e}", sobolev_mass(n));
    println!("beta = {:.16e}", coeffs.beta);
    println!("c1 energy_constant = {:.16e}", coeffs.energy_constant);
    println!("c2 epsilon_coefficient = {:.16e}", coeffs.epsilon_coefficient);
    println!(
        "c3 epsilon_log_coefficient = {:.16e}",
        coeffs.epsilon_log_coefficient
    );
    println!(
        "c4 scale_log_coefficient = {:.16e}",
        coeffs.scale_log_coefficient
    );
    println!(
        "c5 interaction_coefficient = {:.16e}",
        coeffs.interaction_coefficient
    );
    match coeffs.coupling_correction_factor {
        Some(b) => println!("bracket_factor = {b:.16e}"),
        None => println!("bracket_factor undefined in dimension 4"),
    }
    if n == 6 {
        println!("six_factor = {:.16e}", coeffs.coupling_correction_factor.unwrap());
    }
    if coeffs.weyl_coefficient != 0.0 {
        println!("weyl_coefficient = {:.16e}", coeffs.weyl_coefficient);
    }
    if n == 10 {
        println!(
            "weyl_ratio = {:.16e} (= 5/567)",
            coeffs.weyl_coefficient / coeffs.interaction_coefficient
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(cfg: &RunConfig, cutoff: Option<f64>, json: bool) -> Result<ExitCode> {
    let manifold = cfg.manifold()?;
    let target = manifold.scalar_curvature() / (cfg.n as f64 - 1.0);
    let cutoff = cutoff.unwrap_or(2.0 * target + 10.0);
    let spectrum = manifold.spectrum_below(cutoff);
    let verdict = manifold.is_nondegenerate_constant_solution(1e-9);
    if json {
        println!("{}", to_json(&verdict)?);
        return Ok(ExitCode::SUCCESS);
    }
    println!("manifold = {} (n = {})", manifold.kind_name(), cfg.n);
    println!("shift target = {target:.16e}");
    for ev in &spectrum {
        println!("eigenvalue {:.16e} (i={} j={})", ev.value, ev.i, ev.j);
    }
    let label = mode_label(verdict.nearest.i, verdict.nearest.j);
    if verdict.nondegenerate {
        println!(
            "verdict: nondegenerate (distance {:.16e} to {label})",
            verdict.distance
        );
    } else {
        println!("verdict: degenerate ({label})");
    }
    Ok(ExitCode::SUCCESS)
}

fn mode_label(i: u32, j: u32) -> String {
    match (i, j) {
        (0, 0) => "i=0 j=0".to_string(),
        (i, 0) if i > 0 => format!("i={i}"),
        (0, j) => format!("j={j}"),
        (i, j) => format!("i={i} j={j}"),
    }
}

/// Constant pointwise data of the model manifold: the background sample is
/// the critical constant solution, the coupling is the resolved constant.
fn constant_data(cfg: &RunConfig, u0: Option<f64>, weyl2: f64) -> Result<(ModelManifold, PointwiseData)> {
    let manifold = cfg.manifold()?;
    let coeffs = reduced_coefficients(&manifold, cfg.coupling)?;
    let data = PointwiseData::new(
        u0.unwrap_or(coeffs.background),
        coeffs.coupling,
        manifold.scalar_curvature(),
        weyl2,
    );
    Ok((manifold, data))
}

fn sweep_csv(rows: &[(f64, f64, f64, f64)]) -> String {
    let mut out = String::from("epsilon,t,value,error_estimate\n");
    for &(eps, t, value, err) in rows {
        let _ = writeln!(out, "{eps:.16e},{t:.16e},{value:.16e},{err:.16e}");
    }
    out
}

fn cmd_expand(cfg: &RunConfig) -> Result<ExitCode> {
    let (manifold, data) = constant_data(cfg, None, 0.0)?;
    let coeffs = reduced_coefficients(&manifold, cfg.coupling)?;
    let mut rows = Vec::new();
    for &t in &cfg.t_grid {
        for &eps in &cfg.epsilon_grid {
            let value = reduced_expansion(&coeffs, &data, t, eps, cfg.regime)?;
            rows.push((eps, t, value, 0.0));
        }
    }
    let path = write_output(cfg, "expand.csv", &sweep_csv(&rows))?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(ExitCode::SUCCESS)
}

/// Builds the ansatz for one grid point, or `None` when the concentration
/// scale falls outside the cutoff and the point is inadmissible.
fn ansatz_at(
    manifold: &ModelManifold,
    cfg: &RunConfig,
    eps: f64,
    t: f64,
) -> Result<Option<AnsatzSpec>> {
    let cutoff = CutoffSpec::new(manifold.default_cutoff_radius(), SmoothstepOrder::Seventh)?;
    match BubbleConfig::from_subcritical(manifold.dim(), eps, t, cutoff) {
        Ok(config) => Ok(Some(AnsatzSpec::new(
            *manifold,
            config,
            eps,
            AnsatzSign::Minus,
            cfg.coupling,
        )?)),
        Err(Error::InvalidParameter { name: "delta", .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn quadrature_sweep<F>(cfg: &RunConfig, eval: F) -> Result<(Vec<(f64, f64, f64, f64)>, usize)>
where
    F: Fn(&AnsatzSpec) -> Result<(f64, f64)> + Sync,
{
    use rayon::prelude::*;
    let manifold = cfg.manifold()?;
    let mut grid = Vec::new();
    for &t in &cfg.t_grid {
        for &eps in &cfg.epsilon_grid {
            grid.push((eps, t));
        }
    }
    let evaluated: Vec<Option<(f64, f64, f64, f64)>> = grid
        .par_iter()
        .map(|&(eps, t)| -> Result<Option<(f64, f64, f64, f64)>> {
            match ansatz_at(&manifold, cfg, eps, t)? {
                Some(spec) => {
                    let (value, err) = eval(&spec)?;
                    Ok(Some((eps, t, value, err)))
                }
                None => Ok(None),
            }
        })
        .collect::<Result<_>>()?;
    let skipped = evaluated.iter().filter(|r| r.is_none()).count();
    Ok((evaluated.into_iter().flatten().collect(), skipped))
}

fn cmd_energy(cfg: &RunConfig) -> Result<ExitCode> {
    let quad = cfg.quadrature();
    let (rows, skipped) = quadrature_sweep(cfg, |spec| {
        let q = functional_value(spec, &quad)?;
        Ok((q.value, q.error))
    })?;
    let path = write_output(cfg, "energy.csv", &sweep_csv(&rows))?;
    println!("wrote {} ({} rows, {skipped} inadmissible points skipped)", path.display(), rows.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_residual(cfg: &RunConfig, route: &str) -> Result<ExitCode> {
    let quad = cfg.quadrature();
    let (rows, skipped) = match route {
        "operator" => quadrature_sweep(cfg, |spec| Ok((residual_norm(spec, &quad)?, 0.0))),
        "direct" => quadrature_sweep(cfg, |spec| Ok((residual_norm_direct(spec, &quad)?, 0.0))),
        "shim" => quadrature_sweep(cfg, |spec| Ok((residual_norm_background(spec), 0.0))),
        _ => Err(Error::ConfigParse {
            line: 0,
            reason: format!("unknown residual route {route:?}; expected operator | direct | shim"),
        }),
    }?;
    let path = write_output(cfg, "residual.csv", &sweep_csv(&rows))?;
    println!("wrote {} ({} rows, {skipped} inadmissible points skipped)", path.display(), rows.len());
    Ok(ExitCode::SUCCESS)
}

fn parse_sweep_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::ConfigParse {
        line: 1,
        reason: "empty sweep file".to_string(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let eps_col = columns.iter().position(|c| *c == "epsilon");
    let value_col = columns.iter().position(|c| *c == "value");
    let (eps_col, value_col) = match (eps_col, value_col) {
        (Some(e), Some(v)) => (e, v),
        _ => {
            return Err(Error::ConfigParse {
                line: 1,
                reason: "sweep header needs epsilon and value columns".to_string(),
            })
        }
    };
    let mut points = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |col: usize| -> Result<f64> {
            fields
                .get(col)
                .and_then(|f| f.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::ConfigParse {
                    line: idx + 2,
                    reason: format!("bad row: {line:?}"),
                })
        };
        points.push((parse(eps_col)?, parse(value_col)?));
    }
    Ok(points)
}

fn cmd_rates(
    cfg: &RunConfig,
    input: &Path,
    model: &str,
    target: Option<f64>,
    tolerance: Option<f64>,
) -> Result<ExitCode> {
    let model = match model {
        "power" => FitModel::Power,
        "power_log" => FitModel::PowerLog,
        _ => {
            return Err(Error::ConfigParse {
                line: 0,
                reason: format!("unknown model {model:?}; expected power or power_log"),
            })
        }
    };
    let points = parse_sweep_csv(&std::fs::read_to_string(input)?)?;
    let fit = fit_rate(&points, model)?;
    let mut csv = String::from("slope,intercept,model,rss\n");
    let _ = writeln!(
        csv,
        "{:.16e},{:.16e},{},{:.16e}",
        fit.slope,
        fit.intercept,
        fit.model.kind_name(),
        fit.rss
    );
    let path = write_output(cfg, "rates.csv", &csv)?;
    println!(
        "slope = {:.16e} intercept = {:.16e} model = {} rss = {:.16e}",
        fit.slope,
        fit.intercept,
        fit.model.kind_name(),
        fit.rss
    );
    println!("wrote {}", path.display());
    if let (Some(target), Some(tolerance)) = (target, tolerance) {
        let gap = (fit.slope - target).abs();
        if gap > tolerance {
            return Err(Error::ToleranceNotMet {
                estimate: fit.slope,
                error: gap,
                requested: tolerance,
            });
        }
        println!("slope within {tolerance:.3e} of {target:.16e}");
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_centers_csv(text: &str) -> Result<Vec<GridPoint>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::ConfigParse {
        line: 1,
        reason: "empty centers file".to_string(),
    })?;
    if header.split(',').map(str::trim).collect::<Vec<_>>()
        != ["coordinate", "u0", "h", "scal", "weyl2"]
    {
        return Err(Error::ConfigParse {
            line: 1,
            reason: "centers header must be coordinate,u0,h,scal,weyl2".to_string(),
        });
    }
    let mut grid = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::ConfigParse {
                line: idx + 2,
                reason: format!("bad row: {line:?}"),
            })?;
        if fields.len() != 5 {
            return Err(Error::ConfigParse {
                line: idx + 2,
                reason: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        grid.push(GridPoint {
            coordinate: fields[0],
            data: PointwiseData::new(fields[1], fields[2], fields[3], fields[4]),
        });
    }
    Ok(grid)
}

fn cmd_reduce(
    cfg: &RunConfig,
    u0: Option<f64>,
    weyl2: f64,
    centers: Option<&Path>,
    json: bool,
) -> Result<ExitCode> {
    let (manifold, data) = constant_data(cfg, u0, weyl2)?;
    let coeffs = reduced_coefficients(&manifold, cfg.coupling)?;
    let phi = phi_field(cfg.regime, cfg.n, &data)?;
    println!("regime = {} (n = {})", cfg.regime.kind_name(), cfg.n);
    println!("phi = {phi:.16e}");
    match t_star(&coeffs, &data, cfg.regime)? {
        Some(closed) => {
            let found = t_star_search(&coeffs, &data, cfg.regime, closed / 16.0, closed * 16.0)?;
            let g = g_functional(&coeffs, &data, closed, cfg.regime)?;
            println!("t_star closed = {closed:.16e}");
            println!("t_star search = {found:.16e}");
            println!("g at t_star = {g:.16e}");
        }
        None => println!("no interior minimizer: landscape weight is not positive"),
    }
    let mut rows = Vec::new();
    for &t in &cfg.t_grid {
        rows.push((0.0, t, g_functional(&coeffs, &data, t, cfg.regime)?, 0.0));
    }
    let path = write_output(cfg, "reduce.csv", &sweep_csv(&rows))?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    if let Some(path) = centers {
        let grid = parse_centers_csv(&std::fs::read_to_string(path)?)?;
        let prediction = predict_blowup_point(&coeffs, &grid, cfg.regime)?;
        if json {
            println!("{}", to_json(&prediction)?);
        } else {
            match prediction.outcome {
                PredictionOutcome::Certified {
                    index,
                    coordinate,
                    refined_coordinate,
                    t_star,
                    g_value,
                    phi,
                    strict_local_minimum,
                } => {
                    println!("blow-up point: index {index} coordinate {coordinate:.16e}");
                    println!("refined coordinate = {refined_coordinate:.16e}");
                    println!("t_star = {t_star:.16e} g = {g_value:.16e} phi = {phi:.16e}");
                    println!("strict local minimum: {strict_local_minimum}");
                }
                PredictionOutcome::NoCertificate => {
                    println!("no certified blow-up point on the supplied grid")
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_all(cfg: &RunConfig, quick: bool) -> Result<ExitCode> {
    let quad = cfg.quadrature();
    let report = verify_all(!quick, &quad);
    let path = write_output(cfg, "verify-report.csv", &report.render_csv())?;
    print!("{}", report.render_text());
    println!("wrote {}", path.display());
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
