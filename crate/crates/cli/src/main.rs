//! `rfgeom`: kernel moments, Lipschitz-Killing curvatures, expected Euler
//! characteristic curves, excursion thresholds, field simulation and the
//! self-verification suite, all behind one command-line entry point.
//!
//! Config precedence: CLI flags override config-file values override
//! defaults. The effective configuration is echoed into every JSON artifact;
//! wall-clock timestamps go to a `<out>.meta.json` sidecar so the artifacts
//! themselves are byte-identical under a fixed seed.

mod spec;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use rfgeom::domain::DomainGeometry;
use rfgeom::gkf::{eec_curve, expected_ec, threshold_for_level};
use rfgeom::kernel::compute_moments;
use rfgeom::rotation::{lkc_rotation_top_two, RotationParams};
use rfgeom::scale::{lkcs_from_alpha, scale_alpha_lkcs, LkcVector, ScaleFieldParams};
use rfgeom::sim::{monte_carlo_eec, GridSpec};
use rfgeom::verify::run_suite;
use rfgeom::Error;

use spec::{parse_domain, parse_kernel, parse_list, parse_sigma, parse_u_grid, EffectiveConfig};

#[derive(Parser)]
#[command(
    name = "rfgeom",
    about = "Geometry of scale- and rotation-space Gaussian random fields",
    version
)]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Rayon thread count (defaults to the machine).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct CommonOpts {
    /// Kernel name: gaussian | marr.
    #[arg(long)]
    kernel: Option<String>,
    /// Ambient spatial dimension.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Domain spec: rect:1,2 | ball:2,1.0 | custom:path.json.
    #[arg(long)]
    domain: Option<String>,
    /// Scale band "sigma_low,sigma_high".
    #[arg(long)]
    sigma: Option<String>,
    /// Output path (JSON unless the subcommand says otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed (mandatory for stochastic subcommands).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel moment constants as JSON.
    Moments {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Lipschitz-Killing curvatures of a parameter space.
    Lkc {
        #[command(subcommand)]
        which: LkcCommand,
    },
    /// Expected-Euler-characteristic curve over a threshold grid (CSV).
    Eec {
        /// Path to an LkcVector JSON artifact.
        #[arg(long)]
        lkcs: Option<PathBuf>,
        /// Grid "start:end:step".
        #[arg(long = "u-grid")]
        u_grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold u with E chi(A_u) = alpha.
    Threshold {
        #[arg(long)]
        lkcs: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo excursion statistics of the simulated scale-space field.
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        /// Spatial extent(s) of T, e.g. "10" or "2,2".
        #[arg(long = "T")]
        extent: Option<String>,
        /// Threshold list "2,2.5,3".
        #[arg(long)]
        u: Option<String>,
        /// Number of realizations.
        #[arg(long)]
        reps: Option<usize>,
        /// Optional CSV curve export.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the invariant suite and print a pass/fail table.
    Verify {
        /// One of kernel|domain|scale|rotation|gkf|simulate|all.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LkcCommand {
    /// Full scale-space LKC vector with per-stratum breakdown.
    Scale {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Top two rotation-space LKCs and the three F integrals.
    Rotation {
        #[command(flatten)]
        common: CommonOpts,
        /// Haar Monte-Carlo samples for R_{N-1} (used when N >= 3).
        #[arg(long = "r-samples")]
        r_samples: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::json!({
                "error": {
                    "kind": e.kind(),
                    "message": e.to_string(),
                    "exit_code": e.exit_code(),
                }
            });
            eprintln!("{record}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> rfgeom::Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::ConfigInvalid(format!("thread pool: {e}")))?;
    }
    let file_cfg = spec::load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Moments { common } => cmd_moments(common, &file_cfg),
        Command::Lkc { which } => match which {
            LkcCommand::Scale { common } => cmd_lkc_scale(common, &file_cfg),
            LkcCommand::Rotation { common, r_samples } => {
                cmd_lkc_rotation(common, r_samples, &file_cfg)
            }
        },
        Command::Eec { lkcs, u_grid, out } => cmd_eec(lkcs, u_grid, out, &file_cfg),
        Command::Threshold { lkcs, alpha, out } => cmd_threshold(lkcs, alpha, out, &file_cfg),
        Command::Simulate {
            common,
            extent,
            u,
            reps,
            csv,
        } => cmd_simulate(common, extent, u, reps, csv, &file_cfg),
        Command::Verify { suite, seed, out } => cmd_verify(suite, seed, out, &file_cfg),
    }
}

#[derive(Serialize)]
struct MomentsArtifact {
    config: EffectiveConfig,
    #[serde(flatten)]
    moments: rfgeom::kernel::KernelMoments,
}

fn cmd_moments(common: CommonOpts, file_cfg: &spec::FileConfig) -> rfgeom::Result<()> {
    let cfg = EffectiveConfig::merge(&common, file_cfg);
    let kernel = parse_kernel(cfg.require_kernel()?, cfg.require_n()?)?;
    let moments = compute_moments(&kernel)?;
    let artifact = MomentsArtifact {
        config: cfg.clone(),
        moments,
    };
    emit_json(&artifact, cfg.out.as_deref(), &cfg)
}

#[derive(Serialize)]
struct ScaleLkcArtifact {
    config: EffectiveConfig,
    gamma: f64,
    kappa: f64,
    lkcs: LkcVector,
}

fn cmd_lkc_scale(common: CommonOpts, file_cfg: &spec::FileConfig) -> rfgeom::Result<()> {
    let cfg = EffectiveConfig::merge(&common, file_cfg);
    let n = cfg.require_n()?;
    let kernel = parse_kernel(cfg.require_kernel()?, n)?;
    let geom = parse_domain(cfg.require_domain()?)?;
    let range = parse_sigma(cfg.require_sigma()?)?;
    let moments = compute_moments(&kernel)?;
    let params = ScaleFieldParams::from(&moments);
    let alpha = scale_alpha_lkcs(&params, &geom, &range)?;
    let lkcs = lkcs_from_alpha(&alpha, params.kappa);
    let artifact = ScaleLkcArtifact {
        config: cfg.clone(),
        gamma: params.gamma,
        kappa: params.kappa,
        lkcs,
    };
    emit_json(&artifact, cfg.out.as_deref(), &cfg)
}

#[derive(Serialize)]
struct RotationArtifact {
    config: EffectiveConfig,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "D")]
    d: usize,
    #[serde(rename = "L_D")]
    l_top: f64,
    #[serde(rename = "L_Dm1")]
    l_next: f64,
    #[serde(rename = "F_KN")]
    f_kn: f64,
    #[serde(rename = "F_KNm1")]
    f_knm1: f64,
    #[serde(rename = "F_Km1N")]
    f_km1n: f64,
    standard_errors: RotationSe,
    /// LKC vector with only the top two entries populated.
    lkcs: LkcVector,
}

#[derive(Serialize)]
struct RotationSe {
    #[serde(rename = "F_KNm1")]
    f_knm1: f64,
    #[serde(rename = "L_Dm1")]
    l_next: f64,
}

fn cmd_lkc_rotation(
    common: CommonOpts,
    r_samples: Option<usize>,
    file_cfg: &spec::FileConfig,
) -> rfgeom::Result<()> {
    let mut cfg = EffectiveConfig::merge(&common, file_cfg);
    cfg.r_samples = r_samples.or(file_cfg.r_samples);
    let n = cfg.require_n()?;
    let kernel = parse_kernel(cfg.require_kernel()?, n)?;
    let geom = parse_domain(cfg.require_domain()?)?;
    let range = parse_sigma(cfg.require_sigma()?)?;
    let params = RotationParams::new(n, range.sigma_low(), range.sigma_high())?;
    let samples = cfg.r_samples.unwrap_or(200_000);
    if n >= 3 && cfg.seed.is_none() {
        return Err(Error::ConfigInvalid(
            "lkc rotation with N >= 3 is stochastic; --seed is mandatory".into(),
        ));
    }
    let moments = compute_moments(&kernel)?;
    let top = lkc_rotation_top_two(&params, &moments, &geom, samples, cfg.seed.unwrap_or(0))?;
    let d = params.param_dim();
    let mut values = vec![0.0; d + 1];
    values[d] = top.l_top;
    values[d - 1] = top.l_next;
    let lkcs = LkcVector {
        dim: d,
        values,
        breakdown: None,
        truncated: true,
    };
    let artifact = RotationArtifact {
        config: cfg.clone(),
        n,
        k: params.sym_dim(),
        d,
        l_top: top.l_top,
        l_next: top.l_next,
        f_kn: top.f_kn,
        f_knm1: top.f_knm1,
        f_km1n: top.f_km1n,
        standard_errors: RotationSe {
            f_knm1: top.se_f_knm1,
            l_next: top.se_l_next,
        },
        lkcs,
    };
    emit_json(&artifact, cfg.out.as_deref(), &cfg)
}

fn load_lkcs(path: &Path) -> rfgeom::Result<LkcVector> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigInvalid(format!("cannot read {}: {e}", path.display())))?;
    // accept either a bare LkcVector or an artifact with an "lkcs" field
    if let Ok(v) = serde_json::from_str::<LkcVector>(&text) {
        return Ok(v);
    }
    #[derive(serde::Deserialize)]
    struct Wrapper {
        lkcs: LkcVector,
    }
    serde_json::from_str::<Wrapper>(&text)
        .map(|w| w.lkcs)
        .map_err(|e| Error::ConfigInvalid(format!("{} is not an LKC artifact: {e}", path.display())))
}

fn cmd_eec(
    lkcs: Option<PathBuf>,
    u_grid: Option<String>,
    out: Option<PathBuf>,
    file_cfg: &spec::FileConfig,
) -> rfgeom::Result<()> {
    let lkcs_path = lkcs
        .or_else(|| file_cfg.lkcs.clone())
        .ok_or_else(|| Error::ConfigInvalid("--lkcs is required".into()))?;
    let grid_spec = u_grid
        .or_else(|| file_cfg.u_grid.clone())
        .ok_or_else(|| Error::ConfigInvalid("--u-grid is required".into()))?;
    let vector = load_lkcs(&lkcs_path)?;
    let grid = parse_u_grid(&grid_spec)?;
    let curve = eec_curve(&vector, grid, Some(format!("lkcs from {}", lkcs_path.display())));
    let mut csv = String::from("u,eec\n");
    for (u, v) in curve.thresholds.iter().zip(curve.eec_values.iter()) {
        csv.push_str(&format!("{},{}\n", sig12(*u), sig12(*v)));
    }
    match out.or_else(|| file_cfg.out.clone()) {
        Some(path) => {
            std::fs::write(&path, csv)
                .map_err(|e| Error::ConfigInvalid(format!("cannot write {}: {e}", path.display())))?;
            write_sidecar(&path, &EffectiveConfig::default())?;
            if curve.metadata.truncated {
                eprintln!("note: truncated LKC vector; lower-order EEC terms omitted");
            }
        }
        None => print!("{csv}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct ThresholdArtifact {
    alpha: f64,
    u: f64,
    round_trip_eec: f64,
}

fn cmd_threshold(
    lkcs: Option<PathBuf>,
    alpha: Option<f64>,
    out: Option<PathBuf>,
    file_cfg: &spec::FileConfig,
) -> rfgeom::Result<()> {
    let lkcs_path = lkcs
        .or_else(|| file_cfg.lkcs.clone())
        .ok_or_else(|| Error::ConfigInvalid("--lkcs is required".into()))?;
    let alpha = alpha
        .or(file_cfg.alpha)
        .ok_or_else(|| Error::ConfigInvalid("--alpha is required".into()))?;
    let vector = load_lkcs(&lkcs_path)?;
    let u = threshold_for_level(&vector, alpha)?;
    println!("{u:.6}");
    if let Some(path) = out.or_else(|| file_cfg.out.clone()) {
        let artifact = ThresholdArtifact {
            alpha,
            u,
            round_trip_eec: expected_ec(&vector, u),
        };
        let text = serde_json::to_string_pretty(&artifact).expect("serializable") + "\n";
        std::fs::write(&path, text)
            .map_err(|e| Error::ConfigInvalid(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateArtifact {
    config: EffectiveConfig,
    thresholds: Vec<f64>,
    mean_chi: Vec<f64>,
    se_chi: Vec<f64>,
    p_sup: Vec<f64>,
    se_sup: Vec<f64>,
    /// GKF expected Euler characteristic at the same thresholds, from the
    /// scale-space LKC pipeline on the same box.
    formula_eec: Vec<f64>,
    realizations: usize,
    seed: u64,
}

fn cmd_simulate(
    common: CommonOpts,
    extent: Option<String>,
    u: Option<String>,
    reps: Option<usize>,
    csv: Option<PathBuf>,
    file_cfg: &spec::FileConfig,
) -> rfgeom::Result<()> {
    let mut cfg = EffectiveConfig::merge(&common, file_cfg);
    cfg.extent = extent.or_else(|| file_cfg.extent.clone());
    cfg.u = u.or_else(|| file_cfg.u.clone());
    cfg.reps = reps.or(file_cfg.reps);
    let n = cfg.require_n()?;
    let kernel = parse_kernel(cfg.require_kernel()?, n)?;
    let range = parse_sigma(cfg.require_sigma()?)?;
    let extent = parse_list(
        cfg.extent
            .as_deref()
            .ok_or_else(|| Error::ConfigInvalid("--T (extent) is required".into()))?,
    )?;
    if extent.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: extent.len(),
        });
    }
    let thresholds = parse_list(
        cfg.u
            .as_deref()
            .ok_or_else(|| Error::ConfigInvalid("--u threshold list is required".into()))?,
    )?;
    let reps = cfg
        .reps
        .ok_or_else(|| Error::ConfigInvalid("--reps is required".into()))?;
    let seed = cfg
        .seed
        .ok_or_else(|| Error::ConfigInvalid("simulate is stochastic; --seed is mandatory".into()))?;

    let mut grid = GridSpec::standard(extent.clone(), &range);
    if let Some(s) = cfg.spacing {
        grid.spacing = s;
    }
    if let Some(p) = cfg.pad_sigmas {
        grid.pad_sigmas = p;
    }
    if let Some(ppo) = cfg.points_per_octave {
        grid.points_per_octave = ppo;
    }
    let stats = monte_carlo_eec(&kernel, &grid, &range, &thresholds, reps, seed)?;

    // formula side: scale-space LKCs of the same box
    let geom = rfgeom::domain::rectangle_geometry(&extent)?;
    let moments = compute_moments(&kernel)?;
    let params = ScaleFieldParams::from(&moments);
    let alpha = scale_alpha_lkcs(&params, &geom, &range)?;
    let lkcs = lkcs_from_alpha(&alpha, params.kappa);
    let formula_eec: Vec<f64> = thresholds.iter().map(|&u| expected_ec(&lkcs, u)).collect();

    if let Some(csv_path) = csv.or_else(|| file_cfg.csv.clone()) {
        let mut text = String::from("u,mean_chi,se_chi,p_sup,formula_eec\n");
        for j in 0..thresholds.len() {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                sig12(thresholds[j]),
                sig12(stats.mean_chi[j]),
                sig12(stats.se_chi[j]),
                sig12(stats.p_sup[j]),
                sig12(formula_eec[j]),
            ));
        }
        std::fs::write(&csv_path, text)
            .map_err(|e| Error::ConfigInvalid(format!("cannot write {}: {e}", csv_path.display())))?;
    }
    let artifact = SimulateArtifact {
        config: cfg.clone(),
        thresholds: stats.thresholds.clone(),
        mean_chi: stats.mean_chi.clone(),
        se_chi: stats.se_chi.clone(),
        p_sup: stats.p_sup.clone(),
        se_sup: stats.se_sup.clone(),
        formula_eec,
        realizations: stats.realizations,
        seed: stats.seed,
    };
    emit_json(&artifact, cfg.out.as_deref(), &cfg)
}

fn cmd_verify(
    suite: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    file_cfg: &spec::FileConfig,
) -> rfgeom::Result<()> {
    let suite = suite
        .or_else(|| file_cfg.suite.clone())
        .unwrap_or_else(|| "all".into());
    let seed = seed
        .or(file_cfg.seed)
        .ok_or_else(|| Error::ConfigInvalid("verify is stochastic; --seed is mandatory".into()))?;
    let results = run_suite(&suite, seed)?;
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(10);
    println!("{:<10} {:<width$} {:<6} {}", "suite", "check", "status", "detail");
    let mut failures = 0;
    for r in &results {
        if !r.passed {
            failures += 1;
        }
        println!(
            "{:<10} {:<width$} {:<6} {} [{} ms]",
            r.suite,
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail,
            r.millis
        );
    }
    println!(
        "{} checks, {} failed (suite '{suite}', seed {seed})",
        results.len(),
        failures
    );
    if let Some(path) = out.or_else(|| file_cfg.out.clone()) {
        let text = serde_json::to_string_pretty(&results).expect("serializable") + "\n";
        std::fs::write(&path, text)
            .map_err(|e| Error::ConfigInvalid(format!("cannot write {}: {e}", path.display())))?;
    }
    if failures > 0 {
        // distinct exit path: verification failures are not config errors
        std::process::exit(12);
    }
    Ok(())
}

/// 12 significant digits for CSV cells.
fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

fn emit_json<T: Serialize>(
    artifact: &T,
    out: Option<&Path>,
    cfg: &EffectiveConfig,
) -> rfgeom::Result<()> {
    let text = serde_json::to_string_pretty(artifact).expect("serializable") + "\n";
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| Error::ConfigInvalid(format!("cannot write {}: {e}", path.display())))?;
            write_sidecar(path, cfg)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Timestamp + effective config, kept out of the main artifact.
fn write_sidecar(artifact_path: &Path, cfg: &EffectiveConfig) -> rfgeom::Result<()> {
    let meta = serde_json::json!({
        "timestamp_unix": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        "config": cfg,
    });
    let mut sidecar = artifact_path.as_os_str().to_owned();
    sidecar.push(".meta.json");
    std::fs::write(PathBuf::from(&sidecar), meta.to_string() + "\n")
        .map_err(|e| Error::ConfigInvalid(format!("cannot write sidecar: {e}")))?;
    Ok(())
}

/// Re-exported for integration tests.
pub use spec::FileConfig;

// keep DomainGeometry in the public surface of this binary crate for tests
#[allow(dead_code)]
fn _assert_domain_geometry_roundtrips(g: &DomainGeometry) -> String {
    serde_json::to_string(g).expect("serializable")
}
