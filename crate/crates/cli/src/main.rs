mod args;
mod commands;
mod registry;

use std::path::Path;
use std::process::ExitCode;

use registry::{CliError, CliResult, Report, Status};

fn emit(report: &Report, matches: &clap::ArgMatches) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&report.json).expect("serializable") + "\n";
    match matches.get_one::<String>("out") {
        Some(path) => args::write_file(Path::new(path), &text)?,
        None => print!("{text}"),
    }
    if let Some(dir) = matches.get_one::<String>("emit-dot") {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
        for (name, dot) in &report.dots {
            args::write_file(&Path::new(dir).join(format!("{name}.dot")), dot)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let reg = commands::registry();
    let matches = match reg.clap().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let cmd = reg.get(name).expect("registered");
    let result = cmd.run(sub).and_then(|report| emit(&report, &matches).map(|_| report.status));
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Infeasible) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
