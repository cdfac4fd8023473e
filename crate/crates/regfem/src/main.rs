use std::process::ExitCode;

use regfem::cli::{parse_args, run};
use regfem::output::write_csv;
use regfem::Error;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let inv = match parse_args(std::env::args_os()) {
        Ok(inv) => inv,
        Err(Error::Args(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&inv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(inv: &regfem::cli::Invocation) -> anyhow::Result<bool> {
    let outcome = run(inv)?;
    if inv.config.out_path.is_none() {
        write_csv(&outcome.rows, std::io::stdout().lock())?;
    }
    eprint!("{}", outcome.summary);
    Ok(!inv.check || outcome.check.passed())
}
