use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use stratlearn::graph::TieBreakRule;
use stratlearn::harness::{
    cmd_construct, cmd_dims, cmd_learn_graph, cmd_matrix, cmd_run, write_outputs, ExperimentConfig,
    FixtureSpec, SourceSpec,
};
use stratlearn::online::LearnerKind;
use stratlearn::pac::NeighborhoodMode;
use stratlearn::protocol::{AdversaryKind, FeedbackSetting};

#[derive(Parser)]
#[command(name = "stratlearn", version, about = "Strategic classification experiments on finite manipulation graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named fixture as graph/class files plus a manifest.
    Construct(ConstructArgs),
    /// Print VC and Littlestone dimensions of a class, induced ones with a graph.
    Dims {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Run one experiment for every seed.
    Run(RunArgs),
    /// Sweep learners and settings and write a CSV table.
    Matrix(RunArgs),
    /// Pick a graph from a click stream.
    LearnGraph {
        #[arg(long)]
        graphs: PathBuf,
        #[arg(long)]
        clicks: PathBuf,
        #[arg(long, default_value = "realizable")]
        mode: String,
        /// Degree bound for the agnostic mode.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

#[derive(Args)]
struct ConstructArgs {
    /// binrep, star, ug-pac-lb, ug-online-lb, chain, random or random-ug.
    name: String,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    i_star: Option<usize>,
    #[arg(long)]
    hypotheses: Option<usize>,
    #[arg(long)]
    graphs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fixture as `name:key=value,...`, e.g. `star:d=1,k=8`.
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    learner: Option<LearnerKind>,
    #[arg(long)]
    setting: Option<FeedbackSetting>,
    #[arg(long)]
    adversary: Option<AdversaryKind>,
    /// Label-noise rate for i.i.d. sources, e.g. `1/10`.
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    rounds: Option<usize>,
    /// Replaces the config's seed list; repeat for several seeds.
    #[arg(long)]
    seed: Vec<u64>,
    /// Agents pick uniformly among tied targets with this seed.
    #[arg(long)]
    tie_seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_fixture(s: &str) -> Result<FixtureSpec> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut obj = serde_json::Map::new();
    obj.insert("name".into(), name.into());
    for pair in rest.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| anyhow!("expected key=value, got `{pair}`"))?;
        let value = match v.parse::<u64>() {
            Ok(n) => n.into(),
            Err(_) => v.into(),
        };
        obj.insert(k.replace('-', "_"), value);
    }
    serde_json::from_value(obj.into()).with_context(|| format!("bad fixture `{s}`"))
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
        None => {
            let fixture = args.fixture.as_deref().ok_or_else(|| anyhow!("give --config or --fixture"))?;
            let learner = args.learner.ok_or_else(|| anyhow!("give --config or --learner"))?;
            if args.seed.is_empty() {
                bail!("seeds are mandatory: give --seed");
            }
            ExperimentConfig {
                fixture: parse_fixture(fixture)?,
                learner,
                learner_options: Default::default(),
                setting: None,
                mode: None,
                source: SourceSpec::default(),
                rounds: 100,
                seeds: Vec::new(),
                tie_break: TieBreakRule::LexMin,
                pac: Default::default(),
                out: None,
                assertions: Default::default(),
                grid: None,
            }
        }
    };
    if let Some(f) = &args.fixture {
        cfg.fixture = parse_fixture(f)?;
    }
    if let Some(l) = args.learner {
        cfg.learner = l;
    }
    if let Some(s) = args.setting {
        cfg.setting = Some(s);
    }
    if let Some(a) = args.adversary {
        cfg.source = SourceSpec::Adversary { name: a };
    }
    if let Some(n) = &args.noise {
        cfg.source = SourceSpec::Iid { noise: Some(n.clone()) };
    }
    if let Some(r) = args.rounds {
        cfg.rounds = r;
    }
    if !args.seed.is_empty() {
        cfg.seeds = args.seed.clone();
    }
    if let Some(s) = args.tie_seed {
        cfg.tie_break = TieBreakRule::UniformRandom { seed: s };
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    Ok(cfg)
}

fn construct(a: &ConstructArgs) -> Result<()> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| anyhow!("`{}` needs --{flag}", a.name));
    let spec = match a.name.as_str() {
        "binrep" => FixtureSpec::Binrep { d: a.d.unwrap_or(1), k: need(a.k, "k")? },
        "star" => FixtureSpec::Star { d: a.d.unwrap_or(1), k: need(a.k, "k")? },
        "ug-pac-lb" => FixtureSpec::UgPacLb { n: need(a.n, "n")?, i_star: a.i_star.unwrap_or(1) },
        "ug-online-lb" => FixtureSpec::UgOnlineLb { n: need(a.n, "n")? },
        "chain" => FixtureSpec::Chain { n: need(a.n, "n")? },
        "random" => FixtureSpec::Random {
            n: need(a.n, "n")?,
            k: need(a.k, "k")?,
            hypotheses: need(a.hypotheses, "hypotheses")?,
            seed: a.seed.ok_or_else(|| anyhow!("`random` needs --seed"))?,
        },
        "random-ug" => FixtureSpec::RandomUg {
            n: need(a.n, "n")?,
            k: need(a.k, "k")?,
            graphs: need(a.graphs, "graphs")?,
            hypotheses: need(a.hypotheses, "hypotheses")?,
            seed: a.seed.ok_or_else(|| anyhow!("`random-ug` needs --seed"))?,
        },
        other => bail!("unknown construction `{other}`"),
    };
    let manifest = cmd_construct(&spec, &a.out)?;
    println!("{}", serde_json::to_string_pretty(&manifest)?);
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(args: &RunArgs) -> Result<bool> {
    let cfg = load_config(args)?;
    let (summary, artifacts) = cmd_run(&cfg)?;
    if let Some(dir) = &cfg.out {
        write_outputs(dir, &summary, &artifacts)?;
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    for f in summary.failures() {
        eprintln!("FAILED {f}");
    }
    Ok(summary.passed)
}

fn matrix(args: &RunArgs) -> Result<bool> {
    let cfg = load_config(args)?;
    let result = cmd_matrix(&cfg)?;
    let csv = result.to_csv()?;
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("matrix.csv"), &csv)?;
            std::fs::write(dir.join("matrix.json"), serde_json::to_string_pretty(&result)? + "\n")?;
        }
        None => print!("{csv}"),
    }
    for s in &result.skipped {
        eprintln!("skipped {s}");
    }
    for r in result.rows.iter().filter(|r| !r.passed) {
        eprintln!("FAILED {}/{} seed {}: {}", r.learner, r.setting, r.seed, r.error.as_deref().unwrap_or(""));
    }
    Ok(result.passed)
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Construct(a) => construct(&a).map(|_| true),
        Command::Dims { class, graph } => {
            let graph = graph.as_deref().map(read).transpose()?;
            let report = cmd_dims(&read(&class)?, graph.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.holds.unwrap_or(true))
        }
        Command::Run(a) => run(&a),
        Command::Matrix(a) => matrix(&a),
        Command::LearnGraph { graphs, clicks, mode, k } => {
            let mode = NeighborhoodMode::parse(&mode, k)?;
            let report = cmd_learn_graph(&read(&graphs)?, &read(&clicks)?, mode)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
