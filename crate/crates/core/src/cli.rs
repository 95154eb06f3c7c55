//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification fails (non-member,
//! disconnected fiber, failed acceptance check), 2 on usage, budget and I/O
//! errors. Settings come from flags, then a `key = value` config file, then
//! defaults; the cache directory may also come from `CBLOCKS_CACHE`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::enumerate::{
    cache_dir_from_env, count_level_with, enumerate_level_with, generators_up_to, hilbert,
    EnumOptions, DEFAULT_BUDGET,
};
use crate::error::Error;
use crate::factorize::{factor_full, factor_search, FactorizationFile};
use crate::graph::{
    build_b1, build_b2, build_gamma, build_theta_leaf, split_along_edge, MarkedGraph,
};
use crate::relations::{find_binomial_relations, verify_generation, verify_relation_degree};
use crate::repro;
use crate::subdivision::b2_quadrant_analysis;
use crate::weighting::{
    b2_transform, is_member, membership_violation, multiply, restrict, Side, Weighting,
    WeightingFile,
};

#[derive(Parser, Debug)]
#[command(name = "cblocks", version, about = "Lattice-point semigroups of weighted trivalent graphs")]
pub struct Cli {
    /// `key = value` file with defaults for budget, threads, cache, format.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Search node budget per enumeration or per element.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for cached Hilbert counts.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Allow `--out` to replace an existing file.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build or split graphs.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Weighting membership and arithmetic.
    #[command(subcommand)]
    Wt(WtCmd),
    /// Enumerate the members at one level.
    Enum {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Member counts for levels 0..=lmax.
    Hilbert {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        lmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Factor a member into level-1 and level-2 members.
    Factor {
        #[arg(long)]
        graph: String,
        /// JSON weighting file, or inline `a,b,c@L`.
        #[arg(long)]
        weighting: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: FactorMethod,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generation and relation certificates.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Binomial relations among generators.
    #[command(subcommand)]
    Relations(RelationsCmd),
    /// The regular subdivision of `B2(2)`.
    #[command(subcommand)]
    B2(B2Cmd),
    /// Reproduction driver.
    #[command(subcommand)]
    Repro(ReproCmd),
}

#[derive(Subcommand, Debug)]
pub enum GraphCmd {
    Build {
        /// Genus; with `--n` builds `gamma(g, n)`.
        #[arg(long)]
        g: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Named graph instead: b1, b2, theta.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Split {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        edge: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum WtCmd {
    Check {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        weighting: String,
    },
    Mul {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Restrict {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        weighting: String,
        #[arg(long)]
        edge: usize,
        #[arg(long, value_enum, default_value = "left")]
        side: SideArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    B2map {
        #[arg(long, default_value = "b2")]
        graph: String,
        #[arg(long)]
        weighting: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FactorMethod {
    Auto,
    Search,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    Gen {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        lmax: u32,
        /// Largest generator level.
        #[arg(long, default_value_t = 2)]
        gen_level: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-level summary CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    Rel {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        dmax: u32,
        #[arg(long, default_value_t = 4)]
        move_bound: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum RelationsCmd {
    Find {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
        /// Use every point of levels 1 and 2, not only the minimal ones.
        #[arg(long)]
        all_generators: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum B2Cmd {
    Analyze {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ReproCmd {
    All {
        /// Summary table (CSV).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Settings after merging flags, config file and defaults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub budget: u64,
    pub threads: Option<usize>,
    pub cache: Option<PathBuf>,
    pub format: Format,
    pub force: bool,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self, String> {
        let file = match &cli.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        for k in file.keys() {
            if !["budget", "threads", "cache", "format"].contains(&k.as_str()) {
                return Err(format!("unknown config key `{k}`"));
            }
        }
        let num = |k: &str| -> Result<Option<u64>, String> {
            file.get(k)
                .map(|v| v.parse::<u64>().map_err(|_| format!("config `{k}`: not a number")))
                .transpose()
        };
        let budget = cli.budget.or(num("budget")?).unwrap_or(DEFAULT_BUDGET);
        let threads = cli
            .threads
            .or(num("threads")?.map(|t| t as usize));
        if budget == 0 || threads == Some(0) {
            return Err("budget and threads must be positive".into());
        }
        let cache = cli
            .cache
            .clone()
            .or_else(|| file.get("cache").map(PathBuf::from))
            .or_else(cache_dir_from_env);
        let format = match (cli.format, file.get("format").map(String::as_str)) {
            (Some(f), _) => f,
            (None, Some("csv")) => Format::Csv,
            (None, Some("json")) | (None, None) => Format::Json,
            (None, Some(other)) => return Err(format!("config `format`: unknown value `{other}`")),
        };
        Ok(RunConfig {
            budget,
            threads,
            cache,
            format,
            force: cli.force,
        })
    }
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// A check ran and came out negative.
    Verification(String),
    /// Bad input, budget or I/O.
    Usage(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExhausted { .. } => Failure::Usage(format!("budget: {e}")),
            Error::Io(_) => Failure::Usage(format!("io: {e}")),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// `b1`, `b2`, `theta`, `gamma:G,N`, or a JSON file.
pub fn load_graph(spec: &str) -> Result<MarkedGraph, Failure> {
    match spec {
        "b1" => return Ok(build_b1()),
        "b2" => return Ok(build_b2()),
        "theta" => return Ok(build_theta_leaf()),
        _ => {}
    }
    if let Some(rest) = spec.strip_prefix("gamma:") {
        let (g, n) = rest
            .split_once(',')
            .and_then(|(g, n)| Some((g.trim().parse().ok()?, n.trim().parse().ok()?)))
            .ok_or_else(|| Failure::Usage(format!("bad graph spec `{spec}`; expected gamma:G,N")))?;
        return Ok(build_gamma(g, n)?);
    }
    let text = fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("{spec}: {e}")))?;
    Ok(MarkedGraph::from_json(&text)?)
}

/// A JSON weighting file, or inline `a,b,c@L`.
pub fn load_weighting(graph: &MarkedGraph, spec: &str) -> Result<Weighting, Failure> {
    if Path::new(spec).is_file() {
        let text = fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("{spec}: {e}")))?;
        let file: WeightingFile = serde_json::from_str(&text).map_err(Error::from)?;
        return Ok(file.to_weighting(graph)?);
    }
    let (ws, level) = spec
        .split_once('@')
        .ok_or_else(|| Failure::Usage(format!("`{spec}` is neither a file nor `a,b,..@L`")))?;
    let bad = || Failure::Usage(format!("cannot parse weighting `{spec}`"));
    let ws = ws.trim().trim_start_matches('(').trim_end_matches(')');
    let weights = ws
        .split(',')
        .map(|x| x.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad())?;
    let level = level.trim().parse::<u32>().map_err(|_| bad())?;
    if weights.len() != graph.num_edges() {
        return Err(Failure::Usage(format!(
            "{} weights given, graph has {} edges",
            weights.len(),
            graph.num_edges()
        )));
    }
    Ok(Weighting::new(weights, level))
}

fn emit(out: Option<&Path>, text: &str, cfg: &RunConfig) -> CmdResult {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => {
            if p.exists() && !cfg.force {
                return Err(Failure::Usage(format!(
                    "{} exists; pass --force to replace it",
                    p.display()
                )));
            }
            fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct PointsFile<'a> {
    graph: &'a str,
    level: u32,
    count: usize,
    points: Vec<&'a [u32]>,
}

#[derive(Serialize)]
struct SplitFile<'a> {
    shared_edge: usize,
    left: &'a MarkedGraph,
    right: &'a MarkedGraph,
    left_leaf: usize,
    right_leaf: usize,
    left_edges: &'a [usize],
    right_edges: &'a [usize],
}

#[derive(Serialize)]
struct MovesFile {
    graph: String,
    max_degree: u32,
    generators: usize,
    moves: Vec<MoveEntry>,
}

#[derive(Serialize)]
struct MoveEntry {
    degree: u32,
    lhs: Vec<String>,
    rhs: Vec<String>,
}

fn opts(cfg: &RunConfig) -> EnumOptions {
    EnumOptions {
        budget: cfg.budget,
        parallel: cfg.threads != Some(1),
    }
}

fn run_graph(cmd: GraphCmd, cfg: &RunConfig) -> CmdResult {
    match cmd {
        GraphCmd::Build { g, n, name, out } => {
            let graph = match (name.as_deref(), g, n) {
                (Some(spec), None, None) => load_graph(spec)?,
                (None, Some(g), Some(n)) => build_gamma(g, n)?,
                _ => {
                    return Err(Failure::Usage(
                        "give either --g and --n, or --name".into(),
                    ))
                }
            };
            emit(out.as_deref(), &(graph.to_json() + "\n"), cfg)
        }
        GraphCmd::Split { graph, edge, out } => {
            let g = load_graph(&graph)?;
            let s = split_along_edge(&g, edge)?;
            let file = SplitFile {
                shared_edge: s.shared_edge,
                left: &s.left,
                right: &s.right,
                left_leaf: s.left_leaf,
                right_leaf: s.right_leaf,
                left_edges: &s.left_edges,
                right_edges: &s.right_edges,
            };
            emit(out.as_deref(), &to_json(&file)?, cfg)
        }
    }
}

fn run_wt(cmd: WtCmd, cfg: &RunConfig) -> CmdResult {
    match cmd {
        WtCmd::Check { graph, weighting } => {
            let g = load_graph(&graph)?;
            let w = load_weighting(&g, &weighting)?;
            match membership_violation(&g, &w) {
                None => {
                    println!("member {w}");
                    Ok(())
                }
                Some(why) => Err(Failure::Verification(format!("not a member: {why}"))),
            }
        }
        WtCmd::Mul { graph, a, b, out } => {
            let g = load_graph(&graph)?;
            let (u, v) = (load_weighting(&g, &a)?, load_weighting(&g, &b)?);
            for x in [&u, &v] {
                if !is_member(&g, x)? {
                    return Err(Failure::Verification(format!("{x} is not a member")));
                }
            }
            let p = multiply(&g, &u, &v)?;
            emit(out.as_deref(), &to_json(&WeightingFile::from_weighting(&g, &p))?, cfg)
        }
        WtCmd::Restrict {
            graph,
            weighting,
            edge,
            side,
            out,
        } => {
            let g = load_graph(&graph)?;
            let w = load_weighting(&g, &weighting)?;
            let s = split_along_edge(&g, edge)?;
            let (half, side) = match side {
                SideArg::Left => (&s.left, Side::Left),
                SideArg::Right => (&s.right, Side::Right),
            };
            let r = restrict(&w, &s, side)?;
            emit(out.as_deref(), &to_json(&WeightingFile::from_weighting(half, &r))?, cfg)
        }
        WtCmd::B2map { graph, weighting } => {
            let g = load_graph(&graph)?;
            let w = load_weighting(&g, &weighting)?;
            println!("{}", b2_transform(&g, &w)?);
            Ok(())
        }
    }
}

fn run_verify(cmd: VerifyCmd, cfg: &RunConfig) -> CmdResult {
    match cmd {
        VerifyCmd::Gen {
            graph,
            lmax,
            gen_level,
            out,
            csv,
        } => {
            let g = load_graph(&graph)?;
            let gens = generators_up_to(&g, gen_level)?.all();
            let rep = verify_generation(&g, lmax, &gens, cfg.budget)?;
            write_report(out.as_deref(), csv.as_deref(), &rep, &rep.to_csv(), cfg)?;
            if rep.passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{} of {} members failed",
                    rep.elements.len() - rep.count(crate::relations::Status::Pass),
                    rep.elements.len()
                )))
            }
        }
        VerifyCmd::Rel {
            graph,
            dmax,
            move_bound,
            out,
            csv,
        } => {
            let g = load_graph(&graph)?;
            let gens = generators_up_to(&g, 2)?.minimal();
            let rep = verify_relation_degree(&g, dmax, move_bound, &gens, cfg.budget)?;
            write_report(out.as_deref(), csv.as_deref(), &rep, &rep.to_csv(), cfg)?;
            if rep.passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{} disconnected fibers",
                    rep.disconnected()
                )))
            }
        }
    }
}

fn write_report<T: Serialize>(
    out: Option<&Path>,
    csv_out: Option<&Path>,
    rep: &T,
    csv: &str,
    cfg: &RunConfig,
) -> CmdResult {
    match (cfg.format, out) {
        (Format::Csv, _) => emit(out, csv, cfg)?,
        (Format::Json, _) => emit(out, &to_json(rep)?, cfg)?,
    }
    if let Some(p) = csv_out {
        emit(Some(p), csv, cfg)?;
    } else if out.is_some() && cfg.format == Format::Json {
        eprint!("{csv}");
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    let cfg = RunConfig::resolve(&cli).map_err(Failure::Usage)?;
    if let Some(n) = cfg.threads {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Graph(cmd) => run_graph(cmd, &cfg),
        Command::Wt(cmd) => run_wt(cmd, &cfg),
        Command::Enum {
            graph,
            level,
            count_only,
            out,
        } => {
            let g = load_graph(&graph)?;
            if count_only {
                let n = count_level_with(&g, level, &opts(&cfg))?;
                return emit(out.as_deref(), &format!("{n}\n"), &cfg);
            }
            let pts = enumerate_level_with(&g, level, &opts(&cfg))?;
            let file = PointsFile {
                graph: g.name(),
                level,
                count: pts.len(),
                points: pts.iter().map(Weighting::weights).collect(),
            };
            emit(out.as_deref(), &to_json(&file)?, &cfg)
        }
        Command::Hilbert { graph, lmax, out } => {
            let g = load_graph(&graph)?;
            if let Some(dir) = &cfg.cache {
                fs::create_dir_all(dir).map_err(Error::from)?;
            }
            let t = hilbert(&g, lmax, cfg.cache.as_deref(), &opts(&cfg))?;
            emit(out.as_deref(), &t.to_csv(), &cfg)
        }
        Command::Factor {
            graph,
            weighting,
            method,
            out,
        } => {
            let g = load_graph(&graph)?;
            let w = load_weighting(&g, &weighting)?;
            let f = match method {
                FactorMethod::Auto => factor_full(&g, &w)?,
                FactorMethod::Search => {
                    let gens = generators_up_to(&g, 2)?.all();
                    factor_search(&g, &w, &gens, w.level() as usize, cfg.budget)?.ok_or_else(
                        || Failure::Verification(format!("{w} has no factorization in levels 1 and 2")),
                    )?
                }
            };
            emit(out.as_deref(), &to_json(&FactorizationFile::new(&g, &f))?, &cfg)
        }
        Command::Verify(cmd) => run_verify(cmd, &cfg),
        Command::Relations(RelationsCmd::Find {
            graph,
            max_degree,
            all_generators,
            out,
        }) => {
            let g = load_graph(&graph)?;
            let set = generators_up_to(&g, 2)?;
            let gens = if all_generators { set.all() } else { set.minimal() };
            let moves = find_binomial_relations(&g, &gens, max_degree, cfg.budget)?;
            let file = MovesFile {
                graph: g.name().to_string(),
                max_degree,
                generators: gens.len(),
                moves: moves
                    .iter()
                    .map(|m| MoveEntry {
                        degree: m.degree(),
                        lhs: m.lhs.iter().map(ToString::to_string).collect(),
                        rhs: m.rhs.iter().map(ToString::to_string).collect(),
                    })
                    .collect(),
            };
            emit(out.as_deref(), &to_json(&file)?, &cfg)
        }
        Command::B2(B2Cmd::Analyze { out }) => {
            let rep = b2_quadrant_analysis()?;
            emit(out.as_deref(), &to_json(&rep)?, &cfg)?;
            if rep.pass {
                Ok(())
            } else {
                Err(Failure::Verification("quadrant analysis failed".into()))
            }
        }
        Command::Repro(ReproCmd::All { out }) => {
            let results = repro::run_all();
            for r in &results {
                eprintln!("{}", r.line());
            }
            let table = repro::summary_table(&results);
            match out {
                Some(p) => emit(Some(&p), &table, &cfg)?,
                None => print!("{table}"),
            }
            let failed = results.iter().filter(|r| !r.pass).count();
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Verification(format!("{failed} acceptance checks failed")))
            }
        }
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Verification(m) => eprintln!("verification failed: {m}"),
                Failure::Usage(m) => eprintln!("error: {m}"),
            }
            f.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let c = parse_config("# comment\nbudget = 50\n\nthreads=2 # two\n").unwrap();
        assert_eq!(c["budget"], "50");
        assert_eq!(c["threads"], "2");
        assert!(parse_config("budget 50").is_err());
    }

    #[test]
    fn flags_beat_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "budget = 50\nthreads = 3\nformat = csv\n").unwrap();
        let cli = Cli::try_parse_from([
            "cblocks",
            "--config",
            path.to_str().unwrap(),
            "--budget",
            "7",
            "b2",
            "analyze",
        ])
        .unwrap();
        let cfg = RunConfig::resolve(&cli).unwrap();
        assert_eq!(cfg.budget, 7);
        assert_eq!(cfg.threads, Some(3));
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn graph_specs() {
        assert_eq!(load_graph("b2").unwrap().num_edges(), 4);
        assert_eq!(load_graph("gamma:2,1").unwrap().num_edges(), 5);
        assert!(matches!(load_graph("gamma:x"), Err(Failure::Usage(_))));
    }

    #[test]
    fn inline_weighting() {
        let g = build_b2();
        let w = load_weighting(&g, "(2,2,2,2)@4").unwrap();
        assert_eq!(w, Weighting::new(vec![2, 2, 2, 2], 4));
        assert!(load_weighting(&g, "1,2@3").is_err());
    }
}
