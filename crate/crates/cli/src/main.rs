use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use syndromic::code::DecodeMode;
use syndromic::harness::{
    cmd_compare, cmd_evaluate, cmd_sweep, cmd_train, summary_path, CompareSummary, DecoderKind,
    HarnessError, RunConfig, EXIT_CONFIG,
};

/// Train neural syndrome decoders and benchmark them against matching and
/// exact decoders on toric codes.
#[derive(Parser)]
#[command(name = "syndromic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one network per rate and write model files.
    Train(Common),
    /// Evaluate decoders and write a results CSV.
    Evaluate(Common),
    /// Compare joint decoding against squared Z-only decoding.
    Compare(Common),
    /// Sweep one axis (max_iter, hidden_layers or sampler).
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// joint or z_only
    #[arg(long)]
    mode: Option<DecodeMode>,
    /// neural, mwpm, ml or minweight
    #[arg(long)]
    decoder: Option<DecoderKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate every rate with this model file.
    #[arg(long)]
    reuse_model: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, HarnessError> {
        let mut c = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(m) = self.max_iter {
            c.max_iter = m;
        }
        if let Some(mode) = self.mode {
            c.mode = mode;
        }
        if let Some(d) = self.decoder {
            c.decoders = vec![d];
        }
        if let Some(out) = &self.out {
            c.out = out.clone();
        }
        if let Some(path) = &self.reuse_model {
            c.reuse_model = Some(path.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Train(args) => {
            let config = args.load()?;
            println!("seed {}", config.seed);
            for path in cmd_train(&config)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Evaluate(args) => {
            let config = args.load()?;
            println!("seed {}", config.seed);
            let records = cmd_evaluate(&config)?;
            for r in &records {
                println!("{}", r.csv_row());
            }
            println!("wrote {}", config.out.display());
        }
        Command::Compare(args) => {
            let config = args.load()?;
            println!("seed {}", config.seed);
            let (_, summaries) = cmd_compare(&config)?;
            println!("{}", CompareSummary::CSV_HEADER);
            for s in &summaries {
                println!("{}", s.csv_row());
            }
            println!(
                "wrote {} and {}",
                config.out.display(),
                summary_path(&config.out).display()
            );
        }
        Command::Sweep(args) => {
            let config = args.load()?;
            println!("seed {}", config.seed);
            for r in &cmd_sweep(&config)? {
                println!("{}", r.csv_row());
            }
            println!("wrote {}", config.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
