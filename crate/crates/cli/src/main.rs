use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ultradyn_cli::{render, run, Command, Format, Overrides, ProblemFile};

/// Non-archimedean linear algebra and local dynamics of polynomial maps.
#[derive(Debug, Parser)]
#[command(name = "ultradyn", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Problem file (JSON); standard input when omitted or `-`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    prime: Option<u64>,
    /// Relative p-adic precision in digits.
    #[arg(long)]
    precision: Option<u32>,
    /// Thresholds as rationals; repeat the flag or separate with commas.
    #[arg(long = "a", value_name = "A", value_delimiter = ',')]
    a: Vec<String>,
    /// Truncation order of graph series.
    #[arg(long)]
    order: Option<u32>,
    /// Number of iterates for `orbit` and `member`.
    #[arg(long)]
    horizon: Option<usize>,
    /// Graph mode: stable, centre-stable, centre or unstable.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn read_input(path: Option<&PathBuf>) -> std::io::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let text = match read_input(args.input.as_ref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read input: {e}");
            return ExitCode::from(1);
        }
    };
    let over = Overrides {
        prime: args.prime,
        precision: args.precision,
        a: args.a,
        order: args.order,
        horizon: args.horizon,
        mode: args.mode,
    };
    let outcome = ProblemFile::from_json(&text).and_then(|file| run(args.command, &file, &over));
    match outcome {
        Ok(report) => {
            print!("{}", render(&report, args.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
