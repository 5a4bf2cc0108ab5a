use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use iak::boxcount::{box_dimension_fit_with, inhomogeneous_cloud, samples_for};
use iak::geometry::PointCloud;
use iak::hausdorff::{classify, lower_k1_root, orbital_measure_ratio_empirical};
use iak::ifs::{homogeneous_points, Sampling, WordBudget};
use iak::pressure::upper_lipschitz_dimension;
use iak::scene::{load_scene, Scene};
use iak::stopping::delta_stopping;
use iak::verify::{fmt_num, run_verification_suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "iak", version, about = "Inhomogeneous attractor toolkit")]
struct Cli {
    /// Scene file; `verify` accepts several.
    #[arg(long, global = true)]
    scene: Vec<PathBuf>,
    /// Write outputs to this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Maximum number of composite maps per enumeration.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Root-finding tolerance.
    #[arg(long, global = true, default_value_t = iak::pressure::DEFAULT_TOL)]
    tol: f64,
    /// Seed for jittered sampling; regular grids when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension estimates.
    #[command(subcommand)]
    Dim(DimCommand),
    /// δ-stopping words and their audit.
    Stopping {
        #[arg(long)]
        delta: f64,
        /// Exponent for the cardinality bound; defaults to s_1 + 0.1.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Point cloud of F_C (or F_∅) as CSV or a PGM raster.
    Render {
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Raster side in cells.
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        /// Render the homogeneous attractor only.
        #[arg(long)]
        homogeneous: bool,
    },
    /// Hausdorff measure report at C's declared dimension.
    Measure {
        /// Number of series levels.
        #[arg(long = "K", default_value_t = 20)]
        k: usize,
        /// Raster side for the area-ratio check.
        #[arg(long, default_value_t = 1024)]
        resolution: usize,
    },
    /// Run every check on every scene; exit status 0 iff all hold.
    Verify {
        /// Box-dimension slack replacing each scene's own.
        #[arg(long)]
        slack: Option<f64>,
        /// Additional scene files.
        scenes: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DimCommand {
    /// s_k along the doubling chain.
    Pressure,
    /// Box-counting table and least-squares fit on the F_C cloud.
    Box(BoxArgs),
}

#[derive(Args)]
struct BoxArgs {
    #[arg(long)]
    delta_hi: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
    /// Ratio between consecutive rungs.
    #[arg(long)]
    ratio: Option<f64>,
    /// Render δ for the cloud; defaults to a quarter of the finest rung.
    #[arg(long)]
    render_delta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Pgm,
}

fn single_scene(cli: &Cli) -> anyhow::Result<Scene> {
    let [path] = cli.scene.as_slice() else {
        bail!("this subcommand needs exactly one --scene");
    };
    let mut scene = load_scene(path).with_context(|| format!("loading {}", path.display()))?;
    for w in &scene.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(b) = cli.budget {
        scene.ifs = scene.ifs.clone().with_budget(WordBudget(b));
    }
    Ok(scene)
}

fn sampling(cli: &Cli) -> Sampling {
    cli.seed.map_or(Sampling::Grid, Sampling::Jittered)
}

fn emit(cli: &Cli, file_name: &str, bytes: &[u8]) -> anyhow::Result<()> {
    use std::io::Write;
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(file_name);
            std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        }
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn dim_pressure(cli: &Cli, scene: &Scene) -> anyhow::Result<()> {
    let budget = scene.ifs.budget();
    let report = upper_lipschitz_dimension(&scene.ifs, budget, cli.tol);
    let mut out = String::from("k,s_k\n");
    for e in &report.s_k_sequence {
        let _ = writeln!(out, "{},{}", e.k, fmt_num(e.s_k));
    }
    eprintln!(
        "method={} best_upper_bound={} converged={}{}",
        report.method,
        fmt_num(report.best_upper_bound),
        report.converged,
        if report.out_of_regime { " out_of_regime" } else { "" }
    );
    emit(cli, &format!("{}_pressure.csv", scene.name), out.as_bytes())
}

fn dim_box(cli: &Cli, scene: &Scene, args: &BoxArgs) -> anyhow::Result<()> {
    let mut ladder = scene.ladder.clone();
    if let Some(h) = args.delta_hi {
        ladder.delta_hi = h;
    }
    if let Some(l) = args.levels {
        ladder.levels = l;
    }
    if let Some(r) = args.ratio {
        ladder.ratio = r;
    }
    let render = args.render_delta.unwrap_or_else(|| ladder.max_render_delta());
    let cloud = inhomogeneous_cloud(
        &scene.ifs,
        &scene.condensation,
        render,
        samples_for(&scene.condensation, &ladder),
        sampling(cli),
    )?;
    let fit = box_dimension_fit_with(&cloud, ladder.delta_hi, ladder.delta_lo(), ladder.levels, ladder.offsets)?;
    let mut out = String::from("delta,count\n");
    for (d, n) in fit.series.deltas.iter().zip(&fit.series.counts) {
        let _ = writeln!(out, "{},{}", fmt_num(*d), n);
    }
    out.push_str("\nslope,intercept,r_squared,estimate,saturation_warning\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{}",
        fmt_num(fit.slope),
        fmt_num(fit.intercept),
        fmt_num(fit.r_squared),
        fmt_num(fit.estimate),
        fit.saturation_warning || render > ladder.max_render_delta()
    );
    emit(cli, &format!("{}_box.csv", scene.name), out.as_bytes())
}

fn stopping(cli: &Cli, scene: &Scene, delta: f64, t: Option<f64>) -> anyhow::Result<()> {
    let ifs = &scene.ifs;
    let t = match t {
        Some(t) => t,
        None => iak::pressure::solve_s_k(ifs, 1, cli.tol)? + 0.1,
    };
    let stopping = delta_stopping(ifs, delta)?;
    let audit = stopping.audit(ifs, Some(t))?;
    let mut out = String::from("word,lip_plus,lip_minus\n");
    for w in &stopping.words {
        let _ = writeln!(out, "{},{},{}", w.word, fmt_num(w.lip_plus), fmt_num(w.lip_minus));
    }
    out.push_str("\ncheck,holds\n");
    let _ = writeln!(out, "prefix_free,{}", audit.prefix_free);
    let _ = writeln!(out, "complete,{}", audit.complete);
    let _ = writeln!(out, "stopping_rule,{}", audit.stopping_rule);
    let _ = writeln!(out, "sandwich,{}", audit.sandwich);
    if let Some(w) = audit.weighted_sum {
        let _ = writeln!(out, "cardinality_bound,{w}");
    }
    emit(cli, &format!("{}_stopping.csv", scene.name), out.as_bytes())
}

fn pgm(cloud: &PointCloud, scene: &Scene, resolution: usize) -> anyhow::Result<Vec<u8>> {
    let x = &scene.bounding_box;
    if resolution == 0 || x.dim() > 2 {
        bail!("PGM output needs a 1-D or 2-D scene and a positive resolution");
    }
    let w = resolution;
    let h = if x.dim() == 2 { resolution } else { 1 };
    let mut pixels = vec![0u8; w * h];
    let widths = x.widths();
    for p in cloud.iter() {
        let col = (((p[0] - x.min[0]) / widths[0] * w as f64).floor().max(0.0) as usize).min(w - 1);
        let row = if x.dim() == 2 {
            let r = (((p[1] - x.min[1]) / widths[1] * h as f64).floor().max(0.0) as usize).min(h - 1);
            h - 1 - r
        } else {
            0
        };
        pixels[row * w + col] = 255;
    }
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    Ok(out)
}

fn render(cli: &Cli, scene: &Scene, delta: f64, format: Format, resolution: usize, homogeneous: bool) -> anyhow::Result<()> {
    let cloud = if homogeneous {
        homogeneous_points(&scene.ifs, delta)?
    } else {
        let spacing = scene.bounding_box.widths().into_iter().fold(f64::INFINITY, f64::min) / resolution.max(1) as f64;
        let extent = scene.condensation.bounding_box().widths().into_iter().fold(0.0, f64::max);
        let per_axis = ((2.0 * extent / spacing).ceil() as usize).max(1);
        inhomogeneous_cloud(&scene.ifs, &scene.condensation, delta, per_axis, sampling(cli))?
    };
    match format {
        Format::Csv => {
            let mut out = (1..=cloud.dim()).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
            out.push('\n');
            for p in cloud.iter() {
                let row: Vec<String> = p.iter().map(|v| fmt_num(*v)).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
            emit(cli, &format!("{}_render.csv", scene.name), out.as_bytes())
        }
        Format::Pgm => emit(cli, &format!("{}_render.pgm", scene.name), &pgm(&cloud, scene, resolution)?),
    }
}

fn measure(cli: &Cli, scene: &Scene, k: usize, resolution: usize) -> anyhow::Result<()> {
    let ifs = &scene.ifs;
    let c = &scene.condensation;
    let h = c.hausdorff().context("the condensation set declares no Hausdorff value")?;
    let s = upper_lipschitz_dimension(ifs, ifs.budget(), cli.tol).best_upper_bound;
    let report = classify(ifs, h, s, lower_k1_root(ifs), k)?;
    let mut out = String::from("field,value\n");
    let _ = writeln!(out, "d,{}", fmt_num(report.d));
    let _ = writeln!(out, "regime,{}", report.regime);
    let _ = writeln!(out, "lower_bound,{}", fmt_num(report.lower_bound));
    let _ = writeln!(out, "upper_bound,{}", fmt_num(report.upper_bound));
    let _ = writeln!(out, "closed_form,{}", report.closed_form.map_or("none".into(), fmt_num));
    let _ = writeln!(out, "homogeneous_term,{:?}", report.homogeneous_term);
    let _ = writeln!(out, "cosc_asserted,{}", report.cosc_asserted);
    if c.is_full_dimensional() && ifs.flags().cosc && ifs.has_point_action() {
        let r = orbital_measure_ratio_empirical(ifs, c, &scene.bounding_box, resolution)?;
        let _ = writeln!(out, "empirical_ratio,{}", fmt_num(r.ratio));
        let _ = writeln!(out, "closed_ratio,{}", fmt_num(r.closed_ratio));
        let _ = writeln!(out, "low_resolution,{}", r.low_resolution);
    }
    if let Some(series) = &report.series {
        let _ = writeln!(out, "divergence_level,{}", series.divergence_level.map_or("none".into(), |l| l.to_string()));
        out.push_str("\nk,lower_level,upper_level,lower_partial,upper_partial\n");
        for l in &series.levels {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                l.k,
                fmt_num(l.lower_level),
                fmt_num(l.upper_level),
                fmt_num(l.lower_partial),
                fmt_num(l.upper_partial)
            );
        }
    }
    emit(cli, &format!("{}_measure.csv", scene.name), out.as_bytes())
}

fn verify(cli: &Cli, slack: Option<f64>, extra: &[PathBuf]) -> anyhow::Result<ExitCode> {
    let paths: Vec<&Path> = cli.scene.iter().chain(extra).map(PathBuf::as_path).collect();
    let mut scenes = Vec::with_capacity(paths.len());
    for p in paths {
        let mut s = load_scene(p).with_context(|| format!("loading {}", p.display()))?;
        if let Some(b) = cli.budget {
            s.ifs = s.ifs.clone().with_budget(WordBudget(b));
        }
        scenes.push(s);
    }
    let opts = VerifyOptions { slack, seed: cli.seed, tol: cli.tol };
    let report = run_verification_suite(&scenes, &opts);
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    emit(cli, "verify_summary.csv", report.to_csv().as_bytes())?;
    Ok(if report.all_hold() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Dim(DimCommand::Pressure) => dim_pressure(cli, &single_scene(cli)?)?,
        Command::Dim(DimCommand::Box(args)) => dim_box(cli, &single_scene(cli)?, args)?,
        Command::Stopping { delta, t } => stopping(cli, &single_scene(cli)?, *delta, *t)?,
        Command::Render { delta, format, resolution, homogeneous } => {
            render(cli, &single_scene(cli)?, *delta, *format, *resolution, *homogeneous)?
        }
        Command::Measure { k, resolution } => measure(cli, &single_scene(cli)?, *k, *resolution)?,
        Command::Verify { slack, scenes } => return verify(cli, *slack, scenes),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("IAK_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: IAK_THREADS ignored: {e}");
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
