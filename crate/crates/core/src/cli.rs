//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on a usage error, 1 on any runtime failure
//! (with the message on stderr).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::evaluation::{mean_average_precision, project_labeling, recall_curve, segmentation_accuracy};
use crate::format::{
    fmt_num, parse_instance, parse_label_space, parse_labeling, serialize_instance, serialize_labeling,
};
use crate::inference::{brute_force, SolveOptions};
use crate::instance::{Instance, Labeling};
use crate::label_space::LabelSpace;
use crate::models::{segment, video_recognition, ModelKind, RecognitionKind, SegmentOptions, Segmentation, Solver};
use crate::synth::{generate_instance, generate_long_video, LongVideoParams, SynthParams};
use crate::tracks::{parse_tracks, serialize_tracks};

/// Energies within this distance count as equal in `verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "actorseg", version, about = "Actor-action segmentation with layered CRFs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic instance with a planted labeling.
    Gen(GenArgs),
    /// Segment an instance with one of the models.
    Solve(SolveArgs),
    /// Video-level tuple scores from node means.
    Recognize(RecognizeArgs),
    /// Per-class segmentation accuracy against the instance's ground truth.
    EvalSeg(EvalSegArgs),
    /// Temporal track recall curve.
    EvalTracks(EvalTracksArgs),
    /// Per-class average precision and mAP.
    EvalMap(EvalMapArgs),
    /// Exhaustive minimum of a model on a small instance.
    Oracle(OracleArgs),
    /// Compare the solver against the exhaustive minimum.
    Verify(VerifyArgs),
    /// Time repeated solves.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lattice size as WxH.
    #[arg(long, default_value = "8x8", value_parser = parse_lattice)]
    lattice: (usize, usize),
    /// `a2d`, `mini`, or `spec FILE`.
    #[arg(long, num_args = 1..=2, value_names = ["KIND", "FILE"], default_values_t = ["a2d".to_string()])]
    labels: Vec<String>,
    #[arg(long, default_value_t = 0.3)]
    noise: f64,
    #[arg(long)]
    regions: Option<usize>,
    #[arg(long)]
    long: bool,
    #[arg(long, default_value_t = 10)]
    frames: usize,
    #[arg(long, default_value_t = 2)]
    switches: usize,
    #[arg(long)]
    tracks_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct ModelArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_model)]
    model: ModelKind,
    #[arg(long)]
    label_costs: bool,
    #[arg(long, default_value_t = crate::models::DEFAULT_LAMBDA)]
    lambda: f64,
}

#[derive(Debug, Clone, Args)]
struct SolverArgs {
    #[arg(long, default_value = "expansion", value_parser = parse_solver)]
    solver: Solver,
    #[arg(long, default_value_t = 10)]
    max_sweeps: usize,
    /// Shuffle the label visiting order with this seed.
    #[arg(long)]
    order_seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: PathBuf,
    /// Energy trace as CSV.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RecognizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_recognition)]
    model: RecognitionKind,
    #[arg(long, default_value_t = crate::models::DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalSegArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    labeling: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalTracksArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    tracks: PathBuf,
    #[arg(long)]
    labeling: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalMapArgs {
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 3)]
    repeat: usize,
}

fn parse_lattice(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    let dim = |v: &str| v.parse::<usize>().map_err(|_| format!("bad lattice dimension '{v}'"));
    Ok((dim(w)?, dim(h)?))
}

fn parse_model(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_recognition(s: &str) -> std::result::Result<RecognitionKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_solver(s: &str) -> std::result::Result<Solver, String> {
    match s.parse() {
        Ok(Solver::BruteForce) | Err(_) => Err(format!("unknown solver '{s}' (expected expansion or swap)")),
        Ok(v) => Ok(v),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let parsed = Cli::try_parse_from(args).and_then(|cli| {
        check_usage(&cli)?;
        Ok(cli)
    });
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// Flag combinations clap cannot express on its own.
fn check_usage(cli: &Cli) -> std::result::Result<(), clap::Error> {
    use clap::CommandFactory;
    if let Command::Gen(a) = &cli.command {
        let ok = matches!(a.labels.as_slice(), [k] if k == "a2d" || k == "mini")
            || matches!(a.labels.as_slice(), [k, _] if k == "spec");
        if !ok {
            return Err(Cli::command().error(
                clap::error::ErrorKind::InvalidValue,
                format!(
                    "--labels expects a2d, mini or 'spec FILE', got '{}'",
                    a.labels.join(" ")
                ),
            ));
        }
        if a.tracks_out.is_some() && !a.long {
            return Err(Cli::command().error(clap::error::ErrorKind::ArgumentConflict, "--tracks-out requires --long"));
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?)
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Gen(a) => gen(a, out),
        Command::Solve(a) => solve(a, out),
        Command::Recognize(a) => recognize(a),
        Command::EvalSeg(a) => eval_seg(a, out),
        Command::EvalTracks(a) => eval_tracks(a, out),
        Command::EvalMap(a) => eval_map(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Bench(a) => bench(a, out),
    }
}

fn label_space_arg(labels: &[String]) -> Result<LabelSpace> {
    match labels {
        [k] if k == "a2d" => Ok(LabelSpace::a2d()),
        [k] if k == "mini" => Ok(LabelSpace::mini()),
        [k, file] if k == "spec" => parse_label_space(&read(Path::new(file))?),
        _ => Err(Error::InvalidArgument(format!(
            "--labels expects a2d, mini or 'spec FILE', got '{}'",
            labels.join(" ")
        ))),
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<i32> {
    let space = label_space_arg(&a.labels)?;
    let mut params = SynthParams::new(space, a.lattice.0, a.lattice.1, a.noise);
    // The default region count shrinks to fit tiny lattices; an explicit one must fit.
    params.regions = a
        .regions
        .unwrap_or(params.regions.min(a.lattice.0 * a.lattice.1).max(1));
    if a.long {
        let video = generate_long_video(
            &LongVideoParams {
                base: params,
                frames: a.frames,
                switches: a.switches,
            },
            a.seed,
        )?;
        write(&a.out, &serialize_instance(&video.instance))?;
        if let Some(path) = &a.tracks_out {
            write(path, &serialize_tracks(&video.tracks, &video.instance.space))?;
        }
        writeln!(
            out,
            "wrote {} nodes over {} frames and {} tracks",
            video.instance.num_nodes(),
            a.frames,
            video.tracks.tracks.len()
        )?;
    } else {
        let inst = generate_instance(&params, a.seed)?;
        write(&a.out, &serialize_instance(&inst))?;
        writeln!(out, "wrote {} nodes and {} edges", inst.num_nodes(), inst.edges.len())?;
    }
    Ok(0)
}

fn segment_options(m: &ModelArgs, s: Option<&SolverArgs>, solver: Option<Solver>) -> Result<SegmentOptions> {
    let mut o = SegmentOptions::new(m.model);
    o.label_costs = m.label_costs;
    o.lambda = m.lambda;
    if !(0.0..=1.0).contains(&m.lambda) {
        return Err(Error::InvalidArgument(format!("lambda {} outside [0, 1]", m.lambda)));
    }
    if let Some(s) = s {
        if s.max_sweeps == 0 {
            return Err(Error::InvalidArgument("--max-sweeps must be at least 1".into()));
        }
        o.solver = s.solver;
        o.solve = SolveOptions {
            max_sweeps: s.max_sweeps,
            seed: s.order_seed,
        };
    }
    if let Some(solver) = solver {
        o.solver = solver;
    }
    Ok(o)
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let inst = load_instance(&a.model.input)?;
    let opts = segment_options(&a.model, Some(&a.solver), None)?;
    let seg = segment(&inst, &opts)?;
    write(&a.out, &serialize_labeling(&inst.space, &seg.labeling))?;
    if let Some(path) = &a.report {
        let mut csv = String::from("stage,step,energy\n");
        for stage in &seg.stages {
            if let Some(r) = &stage.report {
                for (k, e) in r.trace.iter().enumerate() {
                    let _ = writeln!(csv, "{},{k},{}", stage.name, fmt_num(*e));
                }
            }
        }
        write(path, &csv)?;
    }
    writeln!(out, "energy {}", fmt_num(seg.energy()))?;
    Ok(0)
}

fn recognize(a: RecognizeArgs) -> Result<i32> {
    let inst = load_instance(&a.input)?;
    let scores = video_recognition(&inst, a.model, a.lambda)?;
    let sp = &inst.space;
    let mut csv = String::from("video");
    for t in 0..sp.num_tuples() {
        csv.push(',');
        csv.push_str(&sp.tuple_name(t));
    }
    let video = a
        .input
        .file_stem()
        .map_or("video".into(), |s| s.to_string_lossy().into_owned());
    let _ = write!(csv, "\n{video}");
    for s in scores {
        csv.push(',');
        csv.push_str(&fmt_num(s));
    }
    csv.push('\n');
    write(&a.out, &csv)?;
    Ok(0)
}

fn load_labeling(path: &Path, inst: &Instance) -> Result<Labeling> {
    parse_labeling(&read(path)?, &inst.space, inst.num_nodes())
}

fn eval_seg(a: EvalSegArgs, out: &mut dyn Write) -> Result<i32> {
    let inst = load_instance(&a.input)?;
    let labeling = load_labeling(&a.labeling, &inst)?;
    let acc = segmentation_accuracy(&inst, &labeling)?;
    let mut csv = String::from("class,accuracy\n");
    for (c, v) in &acc.per_class {
        let _ = writeln!(csv, "{},{}", inst.space.tuple_name(*c), fmt_num(*v));
    }
    let _ = writeln!(csv, "mean,{}", fmt_num(acc.mean));
    write(&a.out, &csv)?;
    writeln!(out, "mean per-class accuracy {}", fmt_num(acc.mean))?;
    Ok(0)
}

fn eval_tracks(a: EvalTracksArgs, out: &mut dyn Write) -> Result<i32> {
    let inst = load_instance(&a.input)?;
    let labeling = load_labeling(&a.labeling, &inst)?;
    let tracks = parse_tracks(&read(&a.tracks)?, &inst.space)?;
    let grids = project_labeling(&inst, &labeling)?;
    let curve = recall_curve(&grids, &tracks)?;
    let mut csv = String::from("sigma,recall\n");
    for (k, r) in curve.iter().enumerate() {
        let _ = writeln!(csv, "{:.1},{}", k as f64 / 10.0, fmt_num(*r));
    }
    write(&a.out, &csv)?;
    writeln!(out, "{} tracks", tracks.tracks.len())?;
    Ok(0)
}

/// Column names, then `(video, values)` rows.
type WideCsv = (Vec<String>, Vec<(String, Vec<f64>)>);

/// Wide CSV: header `video,<class>...`, then one row per video.
fn read_wide_csv(path: &Path) -> Result<WideCsv> {
    let text = read(path)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, format!("{}: empty CSV", path.display())))?;
    let classes: Vec<String> = header.split(',').skip(1).map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (i, line) in lines {
        let mut cells = line.split(',').map(str::trim);
        let video = cells.next().unwrap_or_default().to_string();
        let values = cells
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::parse(i + 1, format!("{}: bad number '{c}'", path.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != classes.len() {
            return Err(Error::parse(
                i + 1,
                format!("{}: expected {} values", path.display(), classes.len()),
            ));
        }
        rows.push((video, values));
    }
    Ok((classes, rows))
}

fn eval_map(a: EvalMapArgs, out: &mut dyn Write) -> Result<i32> {
    let (classes, scores) = read_wide_csv(&a.scores)?;
    let (gt_classes, gt) = read_wide_csv(&a.gt)?;
    if classes != gt_classes {
        return Err(Error::Evaluation("score and ground-truth columns differ".into()));
    }
    let truth: std::collections::HashMap<&str, &Vec<f64>> = gt.iter().map(|(v, r)| (v.as_str(), r)).collect();
    let mut s = Vec::with_capacity(scores.len());
    let mut rel = Vec::with_capacity(scores.len());
    for (video, row) in &scores {
        let g = truth
            .get(video.as_str())
            .ok_or_else(|| Error::Evaluation(format!("no ground truth for video '{video}'")))?;
        s.push(row.clone());
        rel.push(g.iter().map(|&v| v > 0.0).collect());
    }
    let m = mean_average_precision(&s, &rel)?;
    let mut csv = String::from("class,ap\n");
    for (c, ap) in classes.iter().zip(&m.per_class) {
        if let Some(ap) = ap {
            let _ = writeln!(csv, "{c},{}", fmt_num(*ap));
        }
    }
    let _ = writeln!(csv, "mAP,{}", fmt_num(m.map));
    write(&a.out, &csv)?;
    writeln!(out, "mAP {}", fmt_num(m.map))?;
    Ok(0)
}

fn print_stages(out: &mut dyn Write, seg: &Segmentation) -> Result<()> {
    for s in &seg.stages {
        writeln!(out, "{} energy {}", s.name, fmt_num(s.energy))?;
    }
    Ok(())
}

fn oracle(a: OracleArgs, out: &mut dyn Write) -> Result<i32> {
    let inst = load_instance(&a.model.input)?;
    let opts = segment_options(&a.model, None, Some(Solver::BruteForce))?;
    let seg = segment(&inst, &opts)?;
    print_stages(out, &seg)?;
    writeln!(out, "energy {}", fmt_num(seg.energy()))?;
    if let Some(path) = &a.out {
        write(path, &serialize_labeling(&inst.space, &seg.labeling))?;
    }
    Ok(0)
}

/// Staged models are checked stage by stage: each stage's oracle runs on the
/// very field the solver saw.
fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let inst = load_instance(&a.model.input)?;
    let opts = segment_options(&a.model, Some(&a.solver), None)?;
    let seg = segment(&inst, &opts)?;
    let mut pass = true;
    for stage in &seg.stages {
        let (_, best) = brute_force(&stage.model)?;
        let ok = (stage.energy - best).abs() <= VERIFY_TOLERANCE;
        pass &= ok;
        writeln!(
            out,
            "{}: solver {} oracle {}",
            stage.name,
            fmt_num(stage.energy),
            fmt_num(best)
        )?;
    }
    writeln!(out, "{}", if pass { "PASS" } else { "FAIL" })?;
    Ok(if pass { 0 } else { 1 })
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Result<i32> {
    if a.repeat == 0 {
        return Err(Error::InvalidArgument("--repeat must be at least 1".into()));
    }
    let inst = load_instance(&a.model.input)?;
    let opts = segment_options(&a.model, Some(&a.solver), None)?;
    writeln!(out, "run,sweeps,moves,final_energy,wall_ms")?;
    for run in 0..a.repeat {
        let start = Instant::now();
        let seg = segment(&inst, &opts)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let reports = seg.stages.iter().filter_map(|s| s.report.as_ref());
        let (sweeps, moves) = reports.fold((0, 0), |(s, m), r| (s + r.sweeps, m + r.moves));
        writeln!(out, "{run},{sweeps},{moves},{},{ms:.3}", fmt_num(seg.energy()))?;
    }
    Ok(0)
}
