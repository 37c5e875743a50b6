use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tadpole_core::io::{self, CurveSample};
use tadpole_core::phase::{gamma_curve_samples, sample_level_curve, turning_points_for_level};
use tadpole_core::spectrum::{default_k_max, spectrum};
use tadpole_core::states::{boundary_distances, classify, DEFAULT_TOL};
use tadpole_core::variational::{monotone_along_gamma, solve_ground_state, sweep};
use tadpole_core::{GammaSubset, GraphParams, PhasePoint, SolveOptions};

/// Ground states of the cubic NLS on a tadpole graph with a δ-vertex.
#[derive(Parser, Debug)]
#[command(name = "tadpole", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the gradient flow for one loop length.
    Solve(SolveArgs),
    /// Solve over a range of loop lengths (in parallel).
    Sweep(SweepArgs),
    /// Export level curves, the separatrix and the Γ-curve.
    Curves(CurvesArgs),
    /// Spectrum of the linear operator.
    Spectrum(SpectrumArgs),
    /// Classify a state read from CSV.
    Classify(ClassifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct Physics {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    omega: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    gamma: f64,
}

#[derive(Args, Debug, Clone)]
struct Flow {
    /// Grid spacing; must divide 2L.
    #[arg(long)]
    h: Option<f64>,
    /// Half-line truncation; must be a multiple of h.
    #[arg(long = "R")]
    r: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Threshold on the squared relative change between iterates.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

impl Flow {
    fn options(&self) -> Result<SolveOptions> {
        let mut o = SolveOptions::default();
        if let Some(dt) = self.dt {
            o.dt = dt;
        }
        if let Some(t) = self.tol {
            o.tol = t;
        }
        if let Some(m) = self.max_iter {
            o.max_iter = m;
        }
        if !(o.dt > 0.0 && o.tol > 0.0 && o.max_iter > 0) {
            bail!("dt, tol and max-iter must be positive");
        }
        Ok(o)
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long = "L", allow_negative_numbers = true)]
    l: f64,
    #[command(flatten)]
    flow: Flow,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Form of the summary printed on stdout.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long = "L-min", allow_negative_numbers = true)]
    l_min: f64,
    #[arg(long = "L-max", allow_negative_numbers = true)]
    l_max: f64,
    #[arg(long = "L-step", allow_negative_numbers = true)]
    l_step: f64,
    #[command(flatten)]
    flow: Flow,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct CurvesArgs {
    #[command(flatten)]
    physics: Physics,
    /// Levels E of the integral of motion to export.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [-0.3, 0.0, 0.5])]
    levels: Vec<f64>,
    /// Samples per curve piece.
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long = "L", allow_negative_numbers = true)]
    l: f64,
    #[arg(long = "k-max")]
    k_max: Option<usize>,
    /// Also write spectrum.json into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// State CSV as written by `solve`.
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn grid(p: &Physics, l: f64, flow: &Flow) -> Result<GraphParams> {
    Ok(GraphParams::with_grid(p.omega, p.gamma, l, flow.h, flow.r)?)
}

fn cmd_solve(a: &SolveArgs) -> Result<ExitCode> {
    let params = grid(&a.physics, a.l, &a.flow)?;
    let opts = a.flow.options()?;
    let sol = solve_ground_state(&params, &opts)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    io::write_state_csv(create(&a.out, "state.csv")?, &sol.state, &params)?;
    io::write_history_csv(create(&a.out, "history.csv")?, &sol.history)?;
    fs::write(a.out.join("report.json"), io::to_json(&sol.report)? + "\n")?;
    let r = &sol.report;
    match a.format {
        Format::Json => println!("{}", io::to_json(r)?),
        Format::Csv => {
            println!("converged,iterations,action,p,q,gamma_distance,shape");
            println!(
                "{},{},{},{},{},{},{}",
                r.converged,
                r.iterations,
                io::fmt_f64(r.action),
                io::fmt_f64(r.boundary_point.p),
                io::fmt_f64(r.boundary_point.q),
                io::fmt_f64(r.gamma_distance),
                shape_label(r.shape.as_ref())
            );
        }
    }
    Ok(if r.converged { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn shape_label(s: Option<&tadpole_core::ShapeClass>) -> String {
    match s {
        Some(s) => format!(
            "{:?}/{:?}/{:?}/{}/n={}",
            s.boundary_set,
            s.tail_type,
            s.loop_type,
            if s.even { "even" } else { "non-even" },
            s.wrap_count
        ),
        None => "off-curve".into(),
    }
}

fn lengths(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min > 0.0 && max.is_finite() && step > 0.0 && step.is_finite()) {
        bail!("need L-min > 0 and L-step > 0");
    }
    if max < min {
        bail!("empty L range: L-max = {max} < L-min = {min}");
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

fn threads() -> Result<Option<usize>> {
    match std::env::var("NLS_TADPOLE_THREADS") {
        Ok(s) => {
            let n: usize = s.trim().parse().with_context(|| format!("NLS_TADPOLE_THREADS = {s:?}"))?;
            Ok(Some(n.max(1)))
        }
        Err(_) => Ok(None),
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<ExitCode> {
    let ls = lengths(a.l_min, a.l_max, a.l_step)?;
    // check the parameters once before spawning the solves
    grid(&a.physics, ls[0], &a.flow)?;
    let opts = a.flow.options()?;
    let (w, g, flow) = (a.physics.omega, a.physics.gamma, &a.flow);
    let rows = sweep(&ls, |l| GraphParams::with_grid(w, g, l, flow.h, flow.r), &opts, threads()?)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    io::write_sweep_csv(create(&a.out, "sweep.csv")?, &rows)?;
    let monotone = monotone_along_gamma(&rows, a.physics.omega, a.physics.gamma, 1e-3);
    let failed = rows.iter().filter(|r| !r.converged).count();
    let worst = rows.iter().map(|r| r.gamma_distance).fold(0.0, f64::max);
    let max_action = rows.iter().map(|r| r.action).fold(f64::NEG_INFINITY, f64::max);
    match a.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "rows": rows.len(),
                "failed": failed,
                "max_gamma_distance": worst,
                "max_action": max_action,
                "monotone_along_gamma": monotone,
            }))?
        ),
        Format::Csv => {
            println!("rows,failed,max_gamma_distance,max_action,monotone_along_gamma");
            println!("{},{},{},{},{}", rows.len(), failed, io::fmt_f64(worst), io::fmt_f64(max_action), monotone);
        }
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_curves(a: &CurvesArgs) -> Result<ExitCode> {
    let (w, g) = (a.physics.omega, a.physics.gamma);
    if !(w > 0.0 && w.is_finite() && g.is_finite()) {
        bail!("need omega > 0 and finite gamma");
    }
    let mut rows = Vec::new();
    let mut push = |kind: &str, label: String, point: PhasePoint| {
        rows.push(CurveSample { kind: kind.into(), label, point })
    };
    for &e in &a.levels {
        turning_points_for_level(e, w)?;
        for pt in sample_level_curve(e, w, a.samples)? {
            push("level", io::fmt_f64(e), pt);
        }
    }
    for pt in sample_level_curve(0.0, w, a.samples)? {
        push("separatrix", io::fmt_f64(0.0), pt);
    }
    for (subset, pt) in gamma_curve_samples(w, g, a.samples) {
        let tag = match subset {
            GammaSubset::G1 => "G1",
            GammaSubset::G2 => "G2",
            GammaSubset::G3 => "G3",
            GammaSubset::G4 => "G4",
            GammaSubset::None => continue,
        };
        push("gamma", tag.into(), pt);
    }
    let sw = w.sqrt();
    push("fixed_point", "origin".into(), PhasePoint::new(0.0, 0.0));
    push("fixed_point", "center".into(), PhasePoint::new(sw, 0.0));
    push("fixed_point", "center_negative".into(), PhasePoint::new(-sw, 0.0));
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    io::write_curves_csv(create(&a.out, "curves.csv")?, &rows)?;
    println!("{} samples written to {}", rows.len(), a.out.join("curves.csv").display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(a: &SpectrumArgs) -> Result<ExitCode> {
    let w = a.physics.omega;
    if !(w > 0.0 && w.is_finite()) {
        bail!("omega = {w} must be positive");
    }
    let k_max = a.k_max.unwrap_or_else(|| default_k_max(a.l, w));
    let s = spectrum(a.physics.gamma, a.l, k_max)?;
    let text = io::to_json(&s)?;
    println!("{text}");
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        fs::write(dir.join("spectrum.json"), text + "\n")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(a: &ClassifyArgs) -> Result<ExitCode> {
    let f = File::open(&a.input).with_context(|| format!("cannot open {}", a.input.display()))?;
    let (params, v) = io::read_state_csv(f)?;
    let (pt, d) = boundary_distances(&v, &params);
    match classify(&v, &params, a.tol) {
        Ok(shape) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({ "boundary_point": pt, "shape": shape }))?
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => bail!("boundary point {pt} not classified: {e} (distances {d})"),
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Classify(a) => cmd_classify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
