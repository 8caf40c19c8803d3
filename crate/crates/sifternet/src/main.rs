use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sifternet::cli::{self, CliOverrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "sifternet",
    about = "Hopfield-memory trigger purification for binarized images",
    version
)]
struct Args {
    /// TOML configuration file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global PRNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Recall updates per channel during purification.
    #[arg(long, global = true)]
    remove_time: Option<usize>,
    /// Kernel size for local-differentiation binarization.
    #[arg(long, global = true)]
    k_size: Option<usize>,
    /// Binarization mode.
    #[arg(long, global = true, value_parser = ["global", "localdiff"])]
    binarize: Option<String>,
    /// Global binarization threshold.
    #[arg(long, global = true)]
    threshold: Option<u8>,
    /// Clean seed images per class.
    #[arg(long, global = true)]
    seeds_per_class: Option<usize>,
    /// Trigger kind for poisoning.
    #[arg(long, global = true, value_parser = ["patch", "blend"])]
    trigger: Option<String>,
    /// Blend trigger opacity.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Fraction of the test set to poison.
    #[arg(long, global = true)]
    ratio: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for batch purification.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print the fully resolved configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Train a purifier from the seed manifest and write its container.
    Train,
    /// Purify one image file or every image in a directory.
    Purify {
        /// Input image file or directory.
        input: PathBuf,
    },
    /// Poison the test set, purify it, and report Acc/ASR.
    Eval,
    /// Run the storage-capacity experiment grid.
    Capacity,
    /// Run a seeded Glauber trajectory and log energy and magnetization.
    Ising,
}

fn overrides_from(args: &Args) -> CliOverrides {
    CliOverrides {
        seed: args.seed,
        remove_time: args.remove_time,
        k_size: args.k_size,
        binarize: args.binarize.clone(),
        threshold: args.threshold,
        seeds_per_class: args.seeds_per_class,
        trigger: args.trigger.clone(),
        alpha: args.alpha,
        ratio: args.ratio,
        out: args.out.clone(),
        jobs: args.jobs,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match RunConfig::resolve(args.config.as_deref(), &overrides_from(&args)) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if args.print_config {
        print!("{}", config.to_toml());
        return ExitCode::SUCCESS;
    }
    let Some(command) = args.command else {
        eprintln!("a subcommand is required (train, purify, eval, capacity, ising)");
        return ExitCode::from(2);
    };
    let result = match command {
        Command::Train => cli::cmd_train(&config).map(|summary| {
            println!(
                "trained purifier: {} patterns per channel, {} channels -> {}",
                summary.patterns_per_channel,
                summary.channels,
                summary.purifier_path.display()
            );
        }),
        Command::Purify { input } => cli::cmd_purify(&config, &input).map(|summary| {
            println!(
                "purified {} images -> {}",
                summary.purified.len(),
                summary.out_dir.display()
            );
        }),
        Command::Eval => cli::cmd_eval(&config).map(|outputs| {
            println!(
                "acc {:.4} asr {:.4} -> {}",
                outputs.acc,
                outputs.asr,
                outputs.report_json.display()
            );
        }),
        Command::Capacity => cli::cmd_capacity(&config).map(|path| {
            println!("capacity table -> {}", path.display());
        }),
        Command::Ising => cli::cmd_ising(&config).map(|path| {
            println!("trajectory -> {}", path.display());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
