use clap::Parser;
use stepcover_cli::{emit, run, Cli};

fn main() {
    let cli = Cli::parse();
    let result = run(cli.command).and_then(|out| {
        emit(&out)?;
        Ok(out.failure)
    });
    match result {
        Ok(None) => {}
        Ok(Some(verdict)) => {
            eprintln!("stepcover: {verdict}");
            std::process::exit(verdict.exit_code());
        }
        Err(e) => {
            eprintln!("stepcover: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
