//! Command-line frontend: the mining pipeline plus benchmark generation.
//!
//! Every pipeline flag has a `key=value` equivalent in an optional
//! `--config` file (command-line flags win). The `ACX_LOG` environment
//! variable controls logging (`error` … `trace`). Exit status is 0 iff
//! every partition mined and every requested artifact was written.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use crate::emit::{
    build_report, build_spec, generate_spice, library_extension, rewrite_netlist, CustomCellSpec,
};
use crate::error::{Error, Result};
use crate::library::{AreaModel, CellLibrary};
use crate::mining::{mine, MiningConfig};
use crate::netlist::{build_graph, parse_blif, write_blif, HierNetlist};
use crate::synth::{generate, SynthSpec};

#[derive(Parser)]
#[command(
    name = "cellmine",
    version,
    about = "Mines recurring gate clusters in mapped netlists and merges them \
             into custom standard-cell candidates"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mine patterns and write every artifact: reports, SPICE subcircuits,
    /// rewritten BLIF, and the library extension
    Mine(PipelineArgs),
    /// Mine, then write only the rewritten BLIF and the library extension
    Rewrite(PipelineArgs),
    /// Mine, then write only the merged-cell SPICE subcircuits
    Spice(PipelineArgs),
    /// Mine, then print the report (written as files only under `--out`)
    Report(PipelineArgs),
    /// Split a hierarchical BLIF into flattened per-partition BLIF files
    Partition(PartitionArgs),
    /// Generate a reproducible synthetic benchmark with planted patterns
    GenSynthetic(GenArgs),
}

#[derive(Args, Debug, Default)]
struct PipelineArgs {
    /// Gate-level BLIF netlist
    #[arg(long)]
    blif: Option<PathBuf>,
    /// Standard-cell library file
    #[arg(long)]
    lib: Option<PathBuf>,
    /// `key=value` defaults file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Patterns per reported combination [default: 5]
    #[arg(long)]
    np: Option<usize>,
    /// Pattern size limit in gates [default: 10]
    #[arg(long)]
    sp: Option<usize>,
    /// Drop groups covering less than this fraction of the graph [default: 0.025]
    #[arg(long)]
    prune_ratio: Option<f64>,
    /// Reward/area constant [default: the library header's K]
    #[arg(long)]
    k: Option<f64>,
    /// Partition the hierarchy at this depth and mine each part [default: 0]
    #[arg(long)]
    depth: Option<usize>,
    /// Worker threads when mining several partitions [default: 1]
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory [default: out]
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Which artifacts a pipeline subcommand writes.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Artifacts {
    All,
    Rewrite,
    Spice,
    Report,
}

#[derive(Debug)]
struct Pipeline {
    blif: PathBuf,
    lib: PathBuf,
    np: usize,
    sp: usize,
    prune_ratio: f64,
    k: Option<f64>,
    depth: usize,
    jobs: usize,
    out: PathBuf,
    /// Whether `out` was given rather than defaulted (decides whether
    /// `report` writes files in addition to printing).
    out_given: bool,
}

impl PipelineArgs {
    fn resolve(self) -> Result<Pipeline> {
        let file = config_map(self.config.as_deref())?;
        let blif = self
            .blif
            .or_else(|| file.get("blif").map(PathBuf::from))
            .ok_or_else(|| Error::Config("missing --blif (or `blif=` in the config)".into()))?;
        let lib = self
            .lib
            .or_else(|| file.get("lib").map(PathBuf::from))
            .ok_or_else(|| Error::Config("missing --lib (or `lib=` in the config)".into()))?;
        let out = self.out.or_else(|| file.get("out").map(PathBuf::from));
        Ok(Pipeline {
            blif,
            lib,
            np: pick(self.np, &file, "np")?.unwrap_or(5),
            sp: pick(self.sp, &file, "sp")?.unwrap_or(10),
            prune_ratio: pick(self.prune_ratio, &file, "prune_ratio")?.unwrap_or(0.025),
            k: pick(self.k, &file, "k")?,
            depth: pick(self.depth, &file, "depth")?.unwrap_or(0),
            jobs: pick(self.jobs, &file, "jobs")?.unwrap_or(1).max(1),
            out_given: out.is_some(),
            out: out.unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}

#[derive(Args, Debug)]
struct PartitionArgs {
    /// Hierarchical BLIF netlist
    #[arg(long)]
    blif: Option<PathBuf>,
    /// `key=value` defaults file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hierarchy depth to cut at (0 flattens the whole design) [default: 0]
    #[arg(long)]
    depth: Option<usize>,
    /// Output directory [default: out]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// RNG seed; all randomness flows from it
    #[arg(long)]
    seed: Option<u64>,
    /// Total gate count [default: 1000]
    #[arg(long)]
    vertices: Option<usize>,
    /// Gates per planted pattern [default: 4]
    #[arg(long)]
    pattern_size: Option<usize>,
    /// Planted occurrences of the pattern [default: 50]
    #[arg(long)]
    occurrences: Option<usize>,
    /// `key=value` defaults file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: out]
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Binary entry point; returns the process exit code.
pub fn run() -> i32 {
    let env = env_logger::Env::new().filter_or("ACX_LOG", "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
    match dispatch(Cli::parse().cmd) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Read a user-named input file, attaching the path to any I/O error.
fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::file(path.display(), e))
}

/// Write an artifact, attaching the path to any I/O error.
fn write_output(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::file(path.display(), e))
}

/// Create an output directory, attaching the path to any I/O error.
fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::file(path.display(), e))
}

/// Write to stdout without panicking when the reader has gone away
/// (`cellmine report | head`): a closed pipe ends the process quietly,
/// matching the SIGPIPE behaviour of ordinary Unix tools.
fn emit(text: std::fmt::Arguments<'_>) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_fmt(text) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(1);
    }
}

fn dispatch(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Mine(a) => pipeline(a, Artifacts::All),
        Cmd::Rewrite(a) => pipeline(a, Artifacts::Rewrite),
        Cmd::Spice(a) => pipeline(a, Artifacts::Spice),
        Cmd::Report(a) => pipeline(a, Artifacts::Report),
        Cmd::Partition(a) => partition_cmd(a),
        Cmd::GenSynthetic(a) => gen_cmd(a),
    }
}

fn pipeline(args: PipelineArgs, artifacts: Artifacts) -> Result<()> {
    let p = args.resolve()?;
    let lib = CellLibrary::parse(&read_input(&p.lib)?, &p.lib.display().to_string())?;
    let nl = parse_blif(&read_input(&p.blif)?, &p.blif.display().to_string())?;
    let cfg = MiningConfig {
        np: p.np,
        sp: p.sp,
        prune_ratio: p.prune_ratio,
        k: p.k.unwrap_or(lib.k),
    };
    cfg.validate()?;

    let parts: Vec<(String, HierNetlist, PathBuf)> = if p.depth == 0 {
        let flat = nl.flatten()?;
        let name = flat.top_model().name.clone();
        vec![(name, flat, p.out.clone())]
    } else {
        let set = nl.partition(p.depth)?;
        for w in &set.warnings {
            log::warn!("{w}");
        }
        set.partitions
            .into_iter()
            .map(|(path, part)| {
                let dir = p.out.join(sanitize(&path));
                (path, part, dir)
            })
            .collect()
    };

    // Bounded worker pool: each worker owns a partition's whole pipeline;
    // only the finished summaries cross back to this thread.
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(String, Result<String>)>> = Mutex::new(Vec::new());
    let workers = p.jobs.min(parts.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((path, part, dir)) = parts.get(i) else { break };
                let res = mine_partition(part, &lib, &cfg, dir, artifacts, p.out_given);
                results.lock().expect("no panics hold the lock").push((path.clone(), res));
            });
        }
    });

    let mut results = results.into_inner().expect("workers finished");
    results.sort_by(|a, b| a.0.cmp(&b.0));
    let mut failures = 0;
    for (path, res) in &results {
        match res {
            // `report` owns stdout for its JSON; the human summary moves
            // to stderr so the output stays machine-parseable.
            Ok(summary) if artifacts == Artifacts::Report => {
                eprintln!("{path}: {summary}");
            }
            Ok(summary) => emit(format_args!("{path}: {summary}\n")),
            Err(e) => {
                failures += 1;
                eprintln!("{path}: error: {e}");
            }
        }
    }
    if failures > 0 {
        return Err(Error::Config(format!(
            "{failures} of {} partitions failed",
            results.len()
        )));
    }
    Ok(())
}

/// Mine one flattened partition and write its artifacts into `dir`.
fn mine_partition(
    nl: &HierNetlist,
    lib: &CellLibrary,
    cfg: &MiningConfig,
    dir: &Path,
    artifacts: Artifacts,
    out_given: bool,
) -> Result<String> {
    let model = nl.top_model();
    let graph = build_graph(model, lib)?;
    let outcome = mine(&graph, cfg)?;
    let specs: Vec<CustomCellSpec> = outcome
        .best
        .groups
        .iter()
        .map(|g| build_spec(g, &graph, model, lib))
        .collect::<Result<_>>()?;
    let area_model = AreaModel::linear(cfg.k)?;

    let write_files = artifacts != Artifacts::Report || out_given;
    if write_files {
        ensure_dir(dir)?;
    }

    let mut spice_paths: HashMap<String, String> = HashMap::new();
    if matches!(artifacts, Artifacts::All | Artifacts::Spice) {
        for spec in &specs {
            let path = dir.join(format!("{}.sp", spec.name));
            write_output(&path, generate_spice(spec, lib)?)?;
            spice_paths.insert(spec.group.code.clone(), path.display().to_string());
        }
    }
    if matches!(artifacts, Artifacts::All | Artifacts::Rewrite) {
        let rewritten = rewrite_netlist(nl, &graph, &specs, lib)?;
        write_output(
            &dir.join(format!("{}.rewritten.blif", sanitize(&model.name))),
            write_blif(&rewritten.netlist),
        )?;
        let ext = library_extension(&specs, lib, &area_model, &spice_paths)?;
        write_output(&dir.join(format!("{}.acx", sanitize(&ext.name))), ext.to_text())?;
    }
    if matches!(artifacts, Artifacts::All | Artifacts::Report) {
        let report = build_report(
            &model.name,
            model,
            &graph,
            lib,
            &outcome.best,
            outcome.iterations,
            outcome.fsm_seconds,
            &area_model,
            &spice_paths,
        )?;
        if write_files {
            write_output(&dir.join("report.json"), report.to_json()?)?;
            write_output(&dir.join("report.csv"), report.to_csv()?)?;
        }
        if artifacts == Artifacts::Report {
            emit(format_args!("{}", report.to_json()?));
        }
    }

    Ok(format!(
        "{} pattern groups (sizes {}), coverage {} of {} vertices, {} iterations",
        outcome.best.groups.len(),
        if outcome.best.groups.is_empty() {
            "-".to_string()
        } else {
            outcome
                .best
                .groups
                .iter()
                .map(|g| g.size().to_string())
                .collect::<Vec<_>>()
                .join("/")
        },
        outcome.best.coverage(),
        graph.n_vertices(),
        outcome.iterations,
    ))
}

fn partition_cmd(args: PartitionArgs) -> Result<()> {
    let file = config_map(args.config.as_deref())?;
    let blif = args
        .blif
        .or_else(|| file.get("blif").map(PathBuf::from))
        .ok_or_else(|| Error::Config("missing --blif (or `blif=` in the config)".into()))?;
    let depth: usize = pick(args.depth, &file, "depth")?.unwrap_or(0);
    let out = args
        .out
        .or_else(|| file.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let nl = parse_blif(&read_input(&blif)?, &blif.display().to_string())?;
    let set = nl.partition(depth)?;
    for w in &set.warnings {
        log::warn!("{w}");
    }
    ensure_dir(&out)?;
    for (path, part) in &set.partitions {
        let target = out.join(format!("{}.blif", sanitize(path)));
        write_output(&target, write_blif(part))?;
        emit(format_args!(
            "{path}: {} gates -> {}\n",
            part.top_model().gates.len(),
            target.display()
        ));
    }
    Ok(())
}

fn gen_cmd(args: GenArgs) -> Result<()> {
    let file = config_map(args.config.as_deref())?;
    let seed = pick(args.seed, &file, "seed")?
        .ok_or_else(|| Error::Config("gen-synthetic needs an explicit --seed".into()))?;
    let spec = SynthSpec::new(
        seed,
        pick(args.vertices, &file, "vertices")?.unwrap_or(1000),
        pick(args.pattern_size, &file, "pattern_size")?.unwrap_or(4),
        pick(args.occurrences, &file, "occurrences")?.unwrap_or(50),
    );
    let out = args
        .out
        .or_else(|| file.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let synth = generate(&spec)?;
    ensure_dir(&out)?;
    write_output(&out.join("design.blif"), &synth.blif)?;
    write_output(&out.join("library.acx"), &synth.library)?;
    write_output(&out.join("ground_truth.json"), synth.ground_truth.to_json()?)?;
    emit(format_args!(
        "seed {seed}: {} gates, planted size-{} pattern x{} ({:.1}% coverage) -> {}\n",
        spec.vertices,
        spec.pattern_size,
        spec.occurrences,
        synth.ground_truth.planted_coverage_pct,
        out.display()
    ));
    Ok(())
}

/// Parse a `key=value` config file; keys are normalized (`-` to `_`).
fn config_map(path: Option<&Path>) -> Result<HashMap<String, String>> {
    let Some(path) = path else {
        return Ok(HashMap::new());
    };
    let text = read_input(path)?;
    let mut map = HashMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(
                path.display().to_string(),
                no + 1,
                format!("expected key=value, got `{line}`"),
            ));
        };
        map.insert(
            key.trim().replace('-', "_"),
            value.trim().to_string(),
        );
    }
    Ok(map)
}

/// Flag value if given, else the config file's, parsed.
fn pick<T: std::str::FromStr>(
    flag: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::Config(format!("config key `{key}`: cannot parse `{v}`"))),
    }
}

/// Make an instance path safe as a file name.
fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}
