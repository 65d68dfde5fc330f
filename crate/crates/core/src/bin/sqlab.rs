use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sqlab::harness::{self, parse_seeds, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "sqlab", version, about = "Statistical-query learning and evolvability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Projected learner from simulated approximating sets.
    Learn(Flags),
    /// Disjunction evolution under SelNB.
    Evolve(Flags),
    /// SQ-DIM, SQD lower bound and strong-dimension estimate.
    Dim(Flags),
    /// Weak agnostic learner over the class.
    Agnostic(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML experiment file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// parities[:k], conjunctions, disjunctions or file:PATH
    #[arg(long)]
    class: Option<String>,
    /// uniform, random, random:SEED or file:PATH
    #[arg(long)]
    dist: Option<String>,
    /// exact, grid, noisy, empirical:S or biased:OFFSET
    #[arg(long)]
    oracle: Option<String>,
    /// 7, 0,3,9 or 0..100
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn overrides(f: &Flags) -> sqlab::Result<toml::Table> {
    use toml::Value;
    let mut t = toml::Table::new();
    if let Some(n) = f.n {
        t.insert("n".into(), Value::Integer(n.into()));
    }
    if let Some(e) = f.epsilon {
        t.insert("epsilon".into(), Value::Float(e));
    }
    if let Some(x) = f.tau {
        t.insert("tau".into(), Value::Float(x));
    }
    for (k, v) in [("class", &f.class), ("dist", &f.dist), ("oracle", &f.oracle), ("format", &f.format)] {
        if let Some(v) = v {
            t.insert(k.into(), Value::String(v.clone()));
        }
    }
    if let Some(s) = &f.seeds {
        let seeds = parse_seeds(s)?;
        let arr = seeds
            .into_iter()
            .map(|s| i64::try_from(s).map(Value::Integer))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| sqlab::Error::InvalidParameter("seeds must fit in i64".into()))?;
        t.insert("seeds".into(), Value::Array(arr));
    }
    if let Some(o) = &f.out {
        t.insert("out".into(), Value::String(o.to_string_lossy().into_owned()));
    }
    Ok(t)
}

fn run(cmd: Command, f: &Flags) -> sqlab::Result<()> {
    let cfg = ExperimentConfig::merged(cmd, f.config.as_deref(), overrides(f)?)?;
    let m = harness::execute(&cfg, f.workers)?;
    println!("{} runs written to {}", m.runs.len(), cfg.out.display());
    for (k, v) in &m.metrics {
        println!("{k} = {v}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (cmd, flags) = match &cli.command {
        Cmd::Learn(f) => (Command::Learn, f),
        Cmd::Evolve(f) => (Command::Evolve, f),
        Cmd::Dim(f) => (Command::Dim, f),
        Cmd::Agnostic(f) => (Command::Agnostic, f),
    };
    match run(cmd, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sqlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
