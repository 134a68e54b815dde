//! Command-line pipeline: convert standoff corpora to SBML, annotate,
//! print pathway statistics, compare an extracted pathway against a
//! reference, and run the full pathway-by-strategy grid.
//!
//! Exit codes: 0 success, 1 data errors (unparseable or inconsistent
//! inputs), 2 configuration errors (bad flags, missing files, bad
//! strategy labels). Logs go to stderr, data to stdout or `--out`.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use log::warn;
use rayon::prelude::*;

use pathcmp::annotate::{
    annotate_reactions, annotate_species, annotate_target_reactions, GeneResolver, SboMappingTable,
    StatePrefixTable,
};
use pathcmp::convert::{convert, ConversionLog, ConversionRules};
use pathcmp::matching::{enumerate_strategies, MatchStrategy};
use pathcmp::model::Pathway;
use pathcmp::ontology::{load_obo, OntologyGraph};
use pathcmp::report;
use pathcmp::scoring;

const RESOLVER_ENDPOINT_ENV: &str = "PATHCMP_RESOLVER_ENDPOINT";

#[derive(Parser)]
#[command(
    name = "pathcmp",
    about = "Convert event-extraction output to SBML pathways and score their overlap with curated references",
    version
)]
struct Cli {
    /// Directory holding override data tables (rules.conf,
    /// event-sbo.map, state-prefixes.map, sbo.obo, lexicon.tsv).
    /// Shipped defaults are used for anything not found there.
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,

    /// Log level filter (error, warn, info, debug, trace)
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a standoff corpus directory into one SBML pathway
    Convert(ConvertArgs),
    /// Attach SBO/GO and Entrez annotations to an SBML pathway
    Annotate(AnnotateArgs),
    /// Print pathway statistics
    Stats(StatsArgs),
    /// Score one extracted pathway against a reference
    Compare(CompareArgs),
    /// Score many extracted pathways under many strategies
    Grid(GridArgs),
}

#[derive(Args)]
struct ConvertArgs {
    /// Directory of .txt/.a1/.a2 triples paired by basename
    #[arg(long)]
    input: PathBuf,
    /// Output SBML path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Conversion rules file (default: data dir, then shipped rules)
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Merge Equiv-related mentions into one species
    #[arg(long)]
    merge_equiv: bool,
    /// Worker pool size (default: number of processors)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct AnnotateArgs {
    /// Input SBML file
    #[arg(long)]
    input: PathBuf,
    /// Output SBML path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Event-type mapping table (default: data dir, then shipped map)
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// OBO ontology file (default: data dir, then shipped subset)
    #[arg(long)]
    obo: Option<PathBuf>,
    /// Gene resolver backend
    #[arg(long, value_parser = ["null", "lexicon", "remote"], default_value = "null")]
    resolver: String,
    /// Lexicon file for the lexicon resolver
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Resolution cache file (read and updated for the remote resolver)
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Remote resolver endpoint (or the PATHCMP_RESOLVER_ENDPOINT env var)
    #[arg(long)]
    endpoint: Option<String>,
    /// Deduce reaction terms from state-prefixed species names before
    /// the mapping pass (for curated maps)
    #[arg(long)]
    deduce: bool,
    /// State-prefix table (default: data dir, then shipped table)
    #[arg(long)]
    prefixes: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Input SBML file
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Extracted pathway (SBML)
    #[arg(long)]
    extracted: PathBuf,
    /// Reference pathway (SBML)
    #[arg(long)]
    target: PathBuf,
    /// Strategy label like "nmeq, sboeq", or "all24"
    #[arg(long, default_value = "all24")]
    strategy: String,
    /// OBO ontology file (default: data dir, then shipped subset)
    #[arg(long)]
    obo: Option<PathBuf>,
    /// Similarity threshold for appeq (0..100)
    #[arg(long, default_value_t = 90)]
    threshold: u32,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Extracted pathways (SBML), repeatable
    #[arg(long, required = true, num_args = 1..)]
    extracted: Vec<PathBuf>,
    /// Reference pathway (SBML)
    #[arg(long)]
    target: PathBuf,
    /// Comma-free strategy selector: "all24" or labels joined by ";"
    #[arg(long, default_value = "all24")]
    strategies: String,
    #[arg(long)]
    obo: Option<PathBuf>,
    #[arg(long, default_value_t = 90)]
    threshold: u32,
    /// Worker pool size (default: number of processors)
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Errors are split so main can map them onto the documented exit
/// codes.
enum CliError {
    Config(anyhow::Error),
    Data(anyhow::Error),
}

type CliResult<T> = Result<T, CliError>;

fn config_err<T, E: Into<anyhow::Error>>(e: E) -> CliResult<T> {
    Err(CliError::Config(e.into()))
}

trait DataContext<T> {
    fn data_ctx<C: Display + Send + Sync + 'static>(self, ctx: C) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> DataContext<T> for Result<T, E> {
    fn data_ctx<C: Display + Send + Sync + 'static>(self, ctx: C) -> CliResult<T> {
        self.map_err(|e| CliError::Data(e.into().context(ctx)))
    }
}

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(&cli.log_level))
        .init();
    let status = match run(&cli) {
        Ok(()) => 0,
        Err(CliError::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            2
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(status);
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Convert(args) => cmd_convert(cli, args),
        Command::Annotate(args) => cmd_annotate(cli, args),
        Command::Stats(args) => cmd_stats(args),
        Command::Compare(args) => cmd_compare(cli, args),
        Command::Grid(args) => cmd_grid(cli, args),
    }
}

// -------------------------------------------------------------------------
// shared plumbing

fn require_exists(path: &Path) -> CliResult<()> {
    if path.exists() {
        Ok(())
    } else {
        config_err(anyhow!("path does not exist: {}", path.display()))
    }
}

/// Resolve an optional explicit flag, then the data dir, then `None`
/// (caller falls back to the shipped table).
fn data_file(cli: &Cli, explicit: &Option<PathBuf>, name: &str) -> CliResult<Option<PathBuf>> {
    if let Some(p) = explicit {
        require_exists(p)?;
        return Ok(Some(p.clone()));
    }
    if let Some(dir) = &cli.data_dir {
        require_exists(dir)?;
        let candidate = dir.join(name);
        if candidate.exists() {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

fn load_ontology(cli: &Cli, explicit: &Option<PathBuf>) -> CliResult<OntologyGraph> {
    match data_file(cli, explicit, "sbo.obo")? {
        Some(path) => {
            let body = fs::read_to_string(&path).data_ctx(format!("reading {}", path.display()))?;
            load_obo(&body).data_ctx(format!("parsing {}", path.display()))
        }
        None => Ok(pathcmp::defaults::ontology()),
    }
}

fn load_pathway(path: &Path) -> CliResult<Pathway> {
    require_exists(path)?;
    let bytes = fs::read(path).data_ctx(format!("reading {}", path.display()))?;
    let mut pathway =
        pathcmp::sbml::parse_sbml(&bytes).data_ctx(format!("parsing {}", path.display()))?;
    if pathway.name.is_empty() {
        pathway.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    Ok(pathway)
}

fn write_output(out: &Option<PathBuf>, body: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, body).data_ctx(format!("writing {}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn parse_strategies(selector: &str, threshold: u32) -> CliResult<Vec<MatchStrategy>> {
    let strategies = if selector.trim() == "all24" {
        enumerate_strategies()
    } else {
        let mut out = Vec::new();
        for label in selector.split(';') {
            match MatchStrategy::parse(label.trim()) {
                Ok(s) => out.push(s),
                Err(e) => return config_err(e),
            }
        }
        out
    };
    Ok(strategies
        .into_iter()
        .map(|s| s.with_threshold(threshold))
        .collect())
}

fn thread_pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return config_err(anyhow!("--jobs must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Config(e.into()))
}

// -------------------------------------------------------------------------
// convert

fn cmd_convert(cli: &Cli, args: &ConvertArgs) -> CliResult<()> {
    require_exists(&args.input)?;
    let mut rules = match data_file(cli, &args.rules, "rules.conf")? {
        Some(path) => {
            let body = fs::read_to_string(&path).data_ctx(format!("reading {}", path.display()))?;
            ConversionRules::parse(&body).data_ctx(format!("parsing {}", path.display()))?
        }
        None => pathcmp::defaults::conversion_rules(),
    };
    if args.merge_equiv {
        rules.merge_equiv = true;
    }

    // pair .txt/.a1/.a2 triples by basename
    let mut basenames: Vec<String> = fs::read_dir(&args.input)
        .data_ctx(format!("listing {}", args.input.display()))?
        .filter_map(|entry| {
            let entry = entry.ok()?;
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) == Some("txt") {
                path.file_stem().map(|s| s.to_string_lossy().into_owned())
            } else {
                None
            }
        })
        .collect();
    basenames.sort();
    if basenames.is_empty() {
        return config_err(anyhow!(
            "no .txt documents found in {}",
            args.input.display()
        ));
    }

    let mut docs = Vec::with_capacity(basenames.len());
    for base in &basenames {
        let read_optional = |ext: &str| -> CliResult<String> {
            let path = args.input.join(format!("{base}.{ext}"));
            if !path.exists() {
                warn!("{base}.{ext} missing; treating as an empty annotation set");
                return Ok(String::new());
            }
            fs::read_to_string(&path).data_ctx(format!("reading {}", path.display()))
        };
        let text = fs::read_to_string(args.input.join(format!("{base}.txt")))
            .data_ctx(format!("reading {base}.txt"))?;
        let a1 = read_optional("a1")?;
        let a2 = read_optional("a2")?;
        let doc = pathcmp::standoff::parse_standoff(base, &text, &a1, &a2)
            .data_ctx(format!("parsing document {base}"))?;
        docs.push(doc);
    }

    let pool = thread_pool(args.jobs)?;
    let conversions: Vec<_> = pool.install(|| {
        docs.par_iter()
            .map(|d| (d.id.clone(), convert(d, &rules)))
            .collect()
    });

    let mut pathway = Pathway::new("corpus");
    let mut log = ConversionLog::default();
    for (id, conv) in conversions {
        let conv = conv.data_ctx(format!("converting document {id}"))?;
        log.events_total += conv.log.events_total;
        log.events_converted += conv.log.events_converted;
        log.events_dropped += conv.log.events_dropped;
        log.args_dropped += conv.log.args_dropped;
        pathway
            .absorb(conv.pathway)
            .data_ctx(format!("merging document {id}"))?;
    }
    log::info!(
        "converted {} documents: {} events, {} reactions, {} dropped events, {} dropped args",
        basenames.len(),
        log.events_total,
        log.events_converted,
        log.events_dropped,
        log.args_dropped
    );

    write_output(&args.out, &pathcmp::sbml::write_sbml(&pathway))
}

// -------------------------------------------------------------------------
// annotate

fn cmd_annotate(cli: &Cli, args: &AnnotateArgs) -> CliResult<()> {
    let mut pathway = load_pathway(&args.input)?;

    let prefixes = match data_file(cli, &args.prefixes, "state-prefixes.map")? {
        Some(path) => {
            let body = fs::read_to_string(&path).data_ctx(format!("reading {}", path.display()))?;
            StatePrefixTable::parse(&body).data_ctx(format!("parsing {}", path.display()))?
        }
        None => pathcmp::defaults::state_prefixes(),
    };
    if args.deduce {
        let added = annotate_target_reactions(&mut pathway, &prefixes);
        log::info!("deduced {added} reaction terms from state prefixes");
    }

    let mapping = match data_file(cli, &args.mapping, "event-sbo.map")? {
        Some(path) => {
            let body = fs::read_to_string(&path).data_ctx(format!("reading {}", path.display()))?;
            SboMappingTable::parse(&body).data_ctx(format!("parsing {}", path.display()))?
        }
        None => pathcmp::defaults::mapping_table(),
    };
    let ontology = load_ontology(cli, &args.obo)?;
    mapping
        .validate_against(&ontology)
        .data_ctx("validating the mapping table against the ontology")?;
    annotate_reactions(&mut pathway, &mapping).data_ctx("annotating reactions")?;

    let mut resolver = match args.resolver.as_str() {
        "null" => GeneResolver::null(),
        "lexicon" => {
            let path = match data_file(cli, &args.lexicon, "lexicon.tsv")? {
                Some(p) => p,
                None => {
                    return config_err(anyhow!(
                        "the lexicon resolver needs --lexicon or a lexicon.tsv in --data-dir"
                    ))
                }
            };
            GeneResolver::from_lexicon_file(&path)
                .data_ctx(format!("loading lexicon {}", path.display()))?
        }
        "remote" => {
            let endpoint = args
                .endpoint
                .clone()
                .or_else(|| std::env::var(RESOLVER_ENDPOINT_ENV).ok());
            let Some(endpoint) = endpoint else {
                return config_err(anyhow!(
                    "the remote resolver needs --endpoint or {RESOLVER_ENDPOINT_ENV}"
                ));
            };
            match GeneResolver::remote(endpoint) {
                Ok(r) => r,
                Err(e) => return config_err(e),
            }
        }
        other => return config_err(anyhow!("unknown resolver `{other}`")),
    };
    if let Some(cache) = &args.cache {
        resolver = resolver
            .with_cache_file(cache)
            .data_ctx(format!("loading cache {}", cache.display()))?;
    }
    annotate_species(&mut pathway, &mut resolver);
    resolver
        .save_cache()
        .data_ctx("saving the resolver cache")?;

    write_output(&args.out, &pathcmp::sbml::write_sbml(&pathway))
}

// -------------------------------------------------------------------------
// stats / compare / grid

fn cmd_stats(args: &StatsArgs) -> CliResult<()> {
    let pathway = load_pathway(&args.input)?;
    let stats = scoring::stats(&pathway);
    let body = match args.format.as_str() {
        "json" => report::stats_json(&pathway.name, &stats),
        _ => report::stats_csv(&pathway.name, &stats),
    };
    write_output(&args.out, &body)
}

fn cmd_compare(cli: &Cli, args: &CompareArgs) -> CliResult<()> {
    let strategies = parse_strategies(&args.strategy, args.threshold)?;
    let extracted = load_pathway(&args.extracted)?;
    let target = load_pathway(&args.target)?;
    let ontology = load_ontology(cli, &args.obo)?;

    let mut rows = Vec::with_capacity(strategies.len());
    for strategy in &strategies {
        let report = scoring::overlap(&extracted, &target, strategy, &ontology)
            .data_ctx(format!("scoring strategy {}", strategy.label()))?;
        let score = scoring::score(&report);
        rows.push((report, score));
    }
    let body = match args.format.as_str() {
        "json" => report::compare_json(&rows),
        _ => report::compare_csv(&rows),
    };
    write_output(&args.out, &body)
}

fn cmd_grid(cli: &Cli, args: &GridArgs) -> CliResult<()> {
    let strategies = parse_strategies(&args.strategies, args.threshold)?;
    let target = load_pathway(&args.target)?;
    let ontology = load_ontology(cli, &args.obo)?;
    let mut extracted = Vec::with_capacity(args.extracted.len());
    for path in &args.extracted {
        extracted.push(load_pathway(path)?);
    }

    let pool = thread_pool(args.jobs)?;
    let cell_inputs: Vec<(&Pathway, &MatchStrategy)> = extracted
        .iter()
        .flat_map(|p| strategies.iter().map(move |s| (p, s)))
        .collect();
    let cells: Vec<_> = pool.install(|| {
        cell_inputs
            .par_iter()
            .map(|(p, s)| scoring::grid_cell(p, &target, s, &ontology))
            .collect()
    });
    let cells: Vec<_> = cells
        .into_iter()
        .collect::<Result<_, _>>()
        .data_ctx("scoring the grid")?;
    let grid = scoring::assemble_grid(&target.name, &strategies, cells);

    let body = match args.format.as_str() {
        "json" => report::grid_json(&grid),
        _ => report::grid_csv(&grid),
    };
    write_output(&args.out, &body)
}
