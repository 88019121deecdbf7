use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ddobs::harness::{
    compare, compare_table, run_scenario, sweep, write_compare, write_steps, write_sweep, ScenarioConfig, Variant,
};
use ddobs::{Error, Rounding};

#[derive(Parser)]
#[command(name = "ddobs", version, about = "Divide-and-discard guaranteed state observer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write the per-step CSV.
    Run(Common),
    /// Run the scenario for each M_max value and write one row per value.
    Sweep(Common),
    /// Compare M_max variants with normalized tightness metrics.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file. Defaults to Van der Pol with mu = 5.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated M_max values.
    #[arg(long, value_delimiter = ',')]
    mmax: Vec<usize>,
    /// Truth seed of the first repetition.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (stdout when omitted, except for compare).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use outward-rounded interval arithmetic.
    #[arg(long)]
    rigorous: bool,
    #[arg(long)]
    repeats: Option<usize>,
}

impl Common {
    fn scenario(&self) -> Result<ScenarioConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::load(path)?,
            None => ScenarioConfig::vdp(5.0),
        };
        if let Some(seed) = self.seed {
            cfg.seeds.truth = seed;
        }
        if let Some(r) = self.repeats {
            cfg.repeats = r;
        }
        if self.rigorous {
            cfg.set_rounding(Rounding::Rigorous);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn m_values(&self, cfg: &ScenarioConfig) -> Vec<usize> {
        if self.mmax.is_empty() {
            vec![cfg.observer.m_max]
        } else {
            self.mmax.clone()
        }
    }

    fn output(&self) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn execute(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Run(args) => {
            let mut cfg = args.scenario()?;
            let m = args.m_values(&cfg);
            if m.len() != 1 {
                return Err(Error::InvalidConfig("run takes a single --mmax value".into()));
            }
            cfg.observer.m_max = m[0];
            cfg.validate()?;
            let outcome = run_scenario(&cfg)?;
            write_steps(args.output()?, &outcome.records())?;
            eprintln!(
                "{}: M_max={} v_tilde={:.6e} w_tilde={:.6e} mean_step_ms={:.3} sound={}",
                outcome.scenario,
                outcome.m_max,
                outcome.v_tilde(),
                outcome.w_tilde(),
                outcome.mean_step_ms(),
                outcome.all_sound()
            );
        }
        Command::Sweep(args) => {
            let cfg = args.scenario()?;
            let rows = sweep(&cfg, &args.m_values(&cfg))?;
            write_sweep(args.output()?, &rows)?;
        }
        Command::Compare(args) => {
            let cfg = args.scenario()?;
            let variants: Vec<Variant> = args
                .m_values(&cfg)
                .into_iter()
                .map(|m| Variant::with_m_max(&cfg.observer, m))
                .collect();
            let rows = compare(&cfg, &variants)?;
            print!("{}", compare_table(&rows));
            if args.out.is_some() {
                write_compare(args.output()?, &rows)?;
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::InvalidConfig(_) | Error::NonpositiveScale { .. } | Error::DimensionMismatch { .. } => 2,
        Error::InconsistentMeasurements => 3,
        Error::DomainViolation(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
