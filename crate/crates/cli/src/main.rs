use clap::Parser;
use sector_dra_cli::{run, Cli};
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    // clap prints usage errors itself and exits with status 2
    let cli = Cli::parse();
    if let Err(e) = cli.check_usage() {
        e.exit();
    }
    let result = run(&cli).and_then(|doc| match &cli.output {
        Some(path) => std::fs::write(path, doc).map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display())),
        None => std::io::stdout().write_all(doc.as_bytes()).map_err(Into::into),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
