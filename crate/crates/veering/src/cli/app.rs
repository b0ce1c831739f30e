use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::format::{parse_json, parse_text, to_json, to_text, Document};
use crate::analysis::{
    enumerate_core_graph, jacobian_full, jacobian_full_numeric, kerckhoff_estimate, normality_check, pooled_durations,
    seeded_trajectory, tail_fit, torus_volume, RENORM_EVERY,
};
use crate::error::Error;
use crate::fixtures;
use crate::flips::{flip, FlipWord};
use crate::flow::{code_by_theta, make_balanced, run_trajectory, BalancedState, StateSampler, Trajectory};
use crate::geometry::{expected_dimension, is_core, width_cone, SurfaceState};
use crate::triangulation::{Colour, ColouredTriangulation, Direction};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Domain(_) | AppError::Io { .. } => 1,
        }
    }
}

type AppResult<T> = std::result::Result<T, AppError>;

fn usage(message: impl Into<String>) -> AppError {
    AppError::Usage(message.into())
}

#[derive(Parser, Debug)]
#[command(name = "veering", version, about = "Veering triangulations and the flow they code")]
struct Cli {
    /// Write results to a .csv or .json file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores. Does not affect results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Input {
    /// Built-in fixture: torus, torus-blue, pillowcase, or with geometry torus-state,
    /// generic-torus, pillowcase-state.
    #[arg(long, conflicts_with = "input")]
    fixture: Option<String>,
    /// Triangulation file in the text format, or the JSON mirror if it ends in .json.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Check the triangulation invariants and report veering, core and stratum data.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Print the stratum datum and the cone dimensions.
    Stratum {
        #[command(flatten)]
        input: Input,
    },
    /// Flip one edge and print the resulting triangulation.
    Flip {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        edge: String,
        #[arg(long)]
        backward: bool,
        /// Colour of the new diagonal (R or B); needed when the input has no geometry.
        #[arg(long)]
        colour: Option<char>,
        /// Print the JSON mirror instead of the text format.
        #[arg(long)]
        json: bool,
    },
    /// Exact integer matrix of a flip word, e.g. `c,b,c,a` or `c:R,b:B`.
    Matrix {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        word: String,
        /// Print the height matrix instead of the width matrix.
        #[arg(long)]
        height: bool,
    },
    /// Flip the input surface into balanced form, sampling one with --seed if it has
    /// no geometry.
    Balance {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Follow the flow for a number of returns.
    Flow {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        returns: usize,
        #[arg(long)]
        seed: u64,
        /// Start from the input geometry instead of a sampled state.
        #[arg(long)]
        from_geometry: bool,
    },
    /// Cut a sampled trajectory into symbols ending with the marker word.
    Code {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        returns: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Analytic and finite-difference Jacobian of the projective action of a word.
    Jacobian {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        word: String,
        /// Comma-separated point of the simplex; defaults to the barycentre.
        #[arg(long)]
        point: Option<String>,
    },
    /// Fraction of widths whose expansion column for an edge grows past each
    /// threshold before the edge flips.
    Kerckhoff {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        edge: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![10.0, 30.0, 100.0])]
        thresholds: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Exponential fit to pooled roofs, or to symbol durations with --theta.
    Tails {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        runs: usize,
        #[arg(long)]
        returns: usize,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        seed: u64,
    },
    /// Trajectory frequency of a word against its weighted Lebesgue frequency.
    Normality {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        word: String,
        #[arg(long)]
        returns: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// The torus volume integrals, with an optional Monte Carlo estimate.
    TorusVolume {
        #[arg(long, default_value_t = 1e-10)]
        quad_tol: f64,
        #[arg(long, default_value_t = 0)]
        mc_samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Core graph of veering triangulations for a small surface.
    Enumerate {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        marked: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Stratum { .. } => "stratum",
            Command::Flip { .. } => "flip",
            Command::Matrix { .. } => "matrix",
            Command::Balance { .. } => "balance",
            Command::Flow { .. } => "flow",
            Command::Code { .. } => "code",
            Command::Jacobian { .. } => "jacobian",
            Command::Kerckhoff { .. } => "kerckhoff",
            Command::Tails { .. } => "tails",
            Command::Normality { .. } => "normality",
            Command::TorusVolume { .. } => "torus-volume",
            Command::Enumerate { .. } => "enumerate",
        }
    }
}

/// What a command produced: human text, a JSON result, and optionally a table.
struct Report {
    text: String,
    result: Value,
    table: Option<Table>,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Report {
    fn text(text: String, result: Value) -> Report {
        Report { text, result, table: None }
    }
}

fn fixture(name: &str) -> Option<Document> {
    match name {
        "torus-state" => Some(Document::from_state(&fixtures::torus_state())),
        "pillowcase-state" => Some(Document::from_state(&fixtures::pillowcase_state())),
        "generic-torus" => Some(Document::from_state(&fixtures::generic_torus_state())),
        other => fixtures::by_name(other).map(Document::combinatorial),
    }
}

fn load(input: &Input) -> AppResult<Document> {
    match (&input.fixture, &input.input) {
        (Some(name), _) => fixture(name).ok_or_else(|| usage(format!("unknown fixture `{name}`"))),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|source| AppError::Io { path: path.clone(), source })?;
            let doc = if path.extension().is_some_and(|e| e == "json") { parse_json(&text) } else { parse_text(&text) };
            Ok(doc?)
        }
        (None, None) => Err(usage("give --fixture or --input")),
    }
}

fn geometry(doc: &Document) -> AppResult<Option<SurfaceState>> {
    Ok(doc.state().transpose()?)
}

fn sampled(t: &ColouredTriangulation, seed: u64) -> AppResult<BalancedState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampler = StateSampler::new(t, &mut rng)?;
    Ok(make_balanced(sampler.sample(&mut rng)?)?.0)
}

fn word(t: &ColouredTriangulation, text: &str) -> AppResult<FlipWord> {
    Ok(FlipWord::parse(t, text)?)
}

fn float_list(text: &str) -> AppResult<Vec<f64>> {
    text.split(',').map(|s| s.trim().parse().map_err(|_| usage(format!("invalid number `{s}`")))).collect()
}

fn render_table(t: &Table) -> String {
    let mut out = t.header.join("\t");
    out.push('\n');
    for r in &t.rows {
        out.push_str(&r.join("\t"));
        out.push('\n');
    }
    out
}

fn trajectory_table(t: &Trajectory) -> Table {
    let names = t.start.triangulation().names();
    let rows = t
        .events
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let flipped: Vec<&str> = e.flipped.iter().map(|l| names[l.0].as_str()).collect();
            vec![i.to_string(), e.roof.to_string(), flipped.join(";"), e.symbol_key.to_string()]
        })
        .collect();
    Table { header: vec!["event_index", "roof", "flipped_labels", "symbol_key"], rows }
}

fn execute(command: &Command, threads: usize) -> AppResult<Report> {
    match command {
        Command::Validate { input } => {
            let doc = load(input)?;
            let t = &doc.triangulation;
            geometry(&doc)?;
            let veering = t.is_veering();
            let core = if veering { Some(is_core(t, expected_dimension(t)?)?) } else { None };
            let text = format!(
                "valid\nlabels {}\ntriangles {}\nveering {veering}\ncore {}\ngeometry {}\n",
                t.num_labels(),
                t.num_triangles(),
                core.map_or("n/a".to_string(), |c| c.to_string()),
                doc.vectors.is_some()
            );
            Ok(Report::text(text, json!({"valid": true, "veering": veering, "core": core})))
        }
        Command::Stratum { input } => {
            let doc = load(input)?;
            let t = &doc.triangulation;
            let datum = t.stratum_datum()?;
            let width = width_cone(t)?.dim;
            let expected = expected_dimension(t)?;
            let text = format!(
                "{datum}\nangles {:?}\nwidth cone dimension {width}\nexpected dimension {expected}\n",
                datum.sorted()
            );
            Ok(Report::text(
                text,
                json!({"stratum": datum.sorted(), "width_cone_dimension": width, "expected_dimension": expected}),
            ))
        }
        Command::Flip { input, edge, backward, colour, json: as_json } => {
            let doc = load(input)?;
            let t = &doc.triangulation;
            let e = t.label_by_name(edge)?;
            let direction = if *backward { Direction::Backward } else { Direction::Forward };
            let next = match (geometry(&doc)?, colour) {
                (Some(s), None) => Document::from_state(&flip(&s, e, direction)?.0),
                (_, Some(c)) => {
                    let c = Colour::from_letter(*c).ok_or_else(|| usage("colour must be R or B"))?;
                    Document::combinatorial(t.flip(e, direction, c)?)
                }
                (None, None) => return Err(usage("input has no geometry; give --colour")),
            };
            let text = if *as_json { to_json(&next)? + "\n" } else { to_text(&next) };
            Ok(Report::text(text, serde_json::from_str(&to_json(&next)?).map_err(Error::from)?))
        }
        Command::Matrix { input, word: w, height } => {
            let doc = load(input)?;
            let w = word(&doc.triangulation, w)?;
            let m = if *height { w.height_matrix()? } else { w.matrix()? };
            let rows: Vec<Vec<String>> = m.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
            Ok(Report::text(format!("{m}\n"), json!({"word": w.render(), "matrix": rows})))
        }
        Command::Balance { input, seed } => {
            let doc = load(input)?;
            let (b, moves) = match (geometry(&doc)?, seed) {
                (Some(s), _) => make_balanced(s)?,
                (None, Some(seed)) => (sampled(&doc.triangulation, *seed)?, Vec::new()),
                (None, None) => return Err(usage("input has no geometry; give --seed to sample a state")),
            };
            let w = FlipWord::new(doc.triangulation.clone(), moves);
            let out = Document::from_state(b.state());
            let text = format!("# flips: {}\n{}", w.render(), to_text(&out));
            Ok(Report::text(text, json!({"flips": w.render(), "state": to_text(&out)})))
        }
        Command::Flow { input, returns, seed, from_geometry } => {
            let doc = load(input)?;
            let start = if *from_geometry {
                let s = geometry(&doc)?.ok_or_else(|| usage("--from-geometry needs an input with geometry"))?;
                make_balanced(s)?.0
            } else {
                sampled(&doc.triangulation, *seed)?
            };
            let traj = run_trajectory(&start, *returns, Some(RENORM_EVERY));
            let table = trajectory_table(&traj);
            let result = json!({
                "returns": traj.events.len(),
                "total_time": traj.total_time(),
                "word": traj.word().render(),
                "abort": traj.abort.as_ref().map(|(i, e)| format!("return {i}: {e}")),
            });
            if let Some((_, e)) = traj.abort {
                return Err(AppError::Domain(e));
            }
            Ok(Report { text: render_table(&table), result, table: Some(table) })
        }
        Command::Code { input, theta, returns, seed } => {
            let doc = load(input)?;
            let theta = word(&doc.triangulation, theta)?;
            let traj = seeded_trajectory(&doc.triangulation, *returns, *seed)?;
            let rec = code_by_theta(&traj, &theta)?;
            let rows: Vec<Vec<String>> = rec
                .symbols
                .iter()
                .zip(&rec.durations)
                .enumerate()
                .map(|(i, (s, d))| vec![i.to_string(), d.to_string(), s.render()])
                .collect();
            let table = Table { header: vec!["symbol_index", "duration", "moves"], rows };
            let result = json!({"theta": theta.render(), "symbols": rec.symbols.len(), "tail": rec.tail.render()});
            Ok(Report { text: render_table(&table), result, table: Some(table) })
        }
        Command::Jacobian { input, word: w, point } => {
            let doc = load(input)?;
            let w = word(&doc.triangulation, w)?;
            let a = w.matrix()?;
            let n = a.size();
            let u = match point {
                Some(p) => float_list(p)?,
                None => vec![1.0 / n as f64; n],
            };
            if u.len() != n {
                return Err(usage(format!("point needs {n} coordinates")));
            }
            let analytic = jacobian_full(&a, &u)?;
            let numeric = jacobian_full_numeric(&a, &u)?;
            let rel_err = (analytic - numeric).abs() / analytic.abs();
            let text = format!("analytic {analytic:e}\nnumeric {numeric:e}\nrel_err {rel_err:e}\n");
            Ok(Report::text(text, json!({"point": u, "analytic": analytic, "numeric": numeric, "rel_err": rel_err})))
        }
        Command::Kerckhoff { input, edge, thresholds, samples, seed } => {
            let doc = load(input)?;
            let t = &doc.triangulation;
            let e = t.label_by_name(edge)?;
            if thresholds.iter().any(|&m| !(m > 1.0)) {
                return Err(usage("thresholds must exceed 1"));
            }
            let r = kerckhoff_estimate(t, e, thresholds, *samples, *seed)?;
            let rows = r
                .rows
                .iter()
                .map(|row| vec![row.threshold.to_string(), edge.clone(), row.fraction.to_string(), r.samples.to_string()])
                .collect();
            let table = Table { header: vec!["M", "r", "fraction", "n"], rows };
            let mut text = render_table(&table);
            text.push_str(&format!("spread {}\nhorizon_exceeded {}\n", r.spread(), r.horizon_exceeded));
            let result = serde_json::to_value(&r).map_err(Error::from)?;
            Ok(Report { text, result, table: Some(table) })
        }
        Command::Tails { input, runs, returns, theta, seed } => {
            let doc = load(input)?;
            let t = &doc.triangulation;
            let theta = theta.as_deref().map(|w| word(t, w)).transpose()?;
            let samples = pooled_durations(t, theta.as_ref(), *runs, *returns, *seed, threads)?;
            let fit = tail_fit(&samples)?;
            let text = format!("h_hat {}\nr2 {}\nn {}\n", fit.rate, fit.r_squared, fit.samples);
            let result = json!({
                "h_hat": fit.rate,
                "r2": fit.r_squared,
                "n": fit.samples,
                "intercept": fit.intercept,
                "points": fit.points,
                "trimmed_fraction": crate::analysis::TAIL_TRIM,
            });
            Ok(Report::text(text, result))
        }
        Command::Normality { input, word: w, returns, samples, seed } => {
            let doc = load(input)?;
            let w = word(&doc.triangulation, w)?;
            let traj = seeded_trajectory(&doc.triangulation, *returns, *seed)?;
            let r = normality_check(&traj, &w, *samples, seed.wrapping_add(1))?;
            let text = format!(
                "word {}\nvisits {}\noccurrences {}\ntrajectory {}\nlebesgue {}\nratio {}\n",
                r.word,
                r.visits,
                r.occurrences,
                r.trajectory_frequency,
                r.lebesgue_frequency,
                r.ratio()
            );
            Ok(Report::text(text, serde_json::to_value(&r).map_err(Error::from)?))
        }
        Command::TorusVolume { quad_tol, mc_samples, seed } => {
            let seed = match (seed, mc_samples) {
                (Some(s), _) => *s,
                (None, 0) => 0,
                (None, _) => return Err(usage("--mc-samples needs --seed")),
            };
            let r = torus_volume(*quad_tol, *mc_samples, seed)?;
            let mut text = format!(
                "I1 {:.12}\nI2 {:.12}\nI1+I2 - pi^2/12 {:e}\nvolume {:.12} (pi^2/6 = {:.12})\nscaled I1 {:.12}\nscaled I2 {:.12}\n",
                r.i1,
                r.i2,
                r.closed_form_error,
                r.volume,
                std::f64::consts::PI.powi(2) / 6.0,
                r.i1_scaled,
                r.i2_scaled,
            );
            if *mc_samples > 0 {
                text.push_str(&format!("monte carlo {:.6} +- {:.6} ({} samples)\n", r.mc_estimate, r.mc_std_error, r.mc_samples));
            }
            Ok(Report::text(text, serde_json::to_value(&r).map_err(Error::from)?))
        }
        Command::Enumerate { genus, marked } => {
            let g = enumerate_core_graph(*genus, *marked)?;
            let rows = g
                .strata
                .iter()
                .map(|s| {
                    let key: Vec<String> = s.stratum.iter().map(|k| k.to_string()).collect();
                    vec![key.join(";"), s.nodes.to_string(), s.arcs.to_string(), s.scc_count.to_string()]
                })
                .collect();
            let table = Table { header: vec!["stratum", "nodes", "arcs", "scc_count"], rows };
            let text = format!(
                "veering classes {}\ncore nodes {}\narcs {}\n{}",
                g.veering_classes,
                g.nodes.len(),
                g.arcs.len(),
                render_table(&table)
            );
            Ok(Report { text, result: serde_json::to_value(&g).map_err(Error::from)?, table: Some(table) })
        }
    }
}

fn write_file(path: &Path, contents: &str) -> AppResult<()> {
    fs::write(path, contents).map_err(|source| AppError::Io { path: path.to_path_buf(), source })
}

fn emit(path: &Path, config: &Value, report: &Report) -> AppResult<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let doc = json!({"config": config, "result": report.result});
            write_file(path, &(serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n"))
        }
        Some("csv") => {
            let table = report.table.as_ref().ok_or_else(|| usage("this command writes .json only"))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).and_then(|_| {
                table.rows.iter().try_for_each(|r| w.write_record(r))
            }).map_err(|e| usage(e.to_string()))?;
            let body = w.into_inner().map_err(|e| usage(e.to_string()))?;
            let mut out = format!("# config: {config}\n").into_bytes();
            out.extend(body);
            fs::write(path, out).map_err(|source| AppError::Io { path: path.to_path_buf(), source })
        }
        _ => Err(usage("--out must end in .csv or .json")),
    }
}

fn run(cli: &Cli, stdout: &mut dyn Write) -> AppResult<()> {
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    if let Some(path) = &cli.out {
        // Reject a bad extension before doing any work.
        if !matches!(path.extension().and_then(|e| e.to_str()), Some("csv" | "json")) {
            return Err(usage("--out must end in .csv or .json"));
        }
    }
    let report = execute(&cli.command, threads)?;
    match &cli.out {
        None => write!(stdout, "{}", report.text).map_err(|source| AppError::Io { path: "<stdout>".into(), source }),
        Some(path) => {
            let config = json!({
                "command": cli.command.name(),
                "version": env!("CARGO_PKG_VERSION"),
                "params": serde_json::to_value(&cli.command).map_err(Error::from)?,
            });
            emit(path, &config, &report)?;
            writeln!(stdout, "wrote {}", path.display()).map_err(|source| AppError::Io { path: "<stdout>".into(), source })
        }
    }
}

/// Runs the command line `argv` (program name first), writing results to `stdout` and
/// diagnostics to `stderr`. Returns 0 on success, 1 on a domain error and 2 on a
/// usage error.
pub fn run_command_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// [`run_command_with`] on the process's standard streams.
pub fn run_command<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_command_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["veering"];
        argv.extend_from_slice(args);
        let code = run_command_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn matrix_of_the_torus_loop() {
        let (code, out, _) = run_args(&["matrix", "--fixture", "torus", "--word", "c,b,c,a"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "[[1,2,0],[2,5,0],[2,6,1]]");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["flow", "--fixture", "torus", "--returns", "3"]).0, 2);
        assert_eq!(run_args(&["matrix", "--fixture", "nowhere", "--word", "a"]).0, 2);
        assert_eq!(run_args(&["matrix", "--fixture", "torus", "--word", "a"]).0, 1);
        assert_eq!(run_args(&["torus-volume", "--mc-samples", "10"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn validate_reports_veering() {
        let (code, out, _) = run_args(&["validate", "--fixture", "pillowcase"]);
        assert_eq!(code, 0);
        assert!(out.contains("veering true"), "{out}");
    }
}
