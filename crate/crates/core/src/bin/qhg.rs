use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qhg_core::report::{run, Format, ReportConfig};

#[derive(Parser)]
#[command(name = "qhg", about = "Exact verification of quaternionic Heisenberg algebra geometry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and print a report.
    Verify {
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// `formal` or a positive rational such as `2` or `3/2`.
        #[arg(long, default_value = "formal")]
        lambda: String,
        /// algebra, connection, contact, qc, g2, spinors, cone or all. Repeatable.
        #[arg(long = "suite", default_value = "all")]
        suites: Vec<String>,
        /// json or text.
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let Command::Verify { p, lambda, suites, format } = cli.command;
    let config = match ReportConfig::new(p, &lambda, &suites, &format) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    match config.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    ExitCode::from(report.exit_code() as u8)
}
