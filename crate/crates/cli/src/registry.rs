use std::path::PathBuf;

use clap::{Arg, ArgMatches};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] tarski_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The computation finished and found an obstruction.
    Infeasible,
}

#[derive(Debug)]
pub struct Report {
    pub json: Value,
    pub status: Status,
    /// `(file stem, DOT source)` pairs written under `--emit-dot`.
    pub dots: Vec<(String, String)>,
}

impl Report {
    pub fn new(json: Value, ok: bool) -> Self {
        Report { json, status: if ok { Status::Ok } else { Status::Infeasible }, dots: Vec::new() }
    }

    pub fn with_dot(mut self, name: impl Into<String>, dot: String) -> Self {
        self.dots.push((name.into(), dot));
        self
    }
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn args(&self) -> Vec<Arg>;
    fn run(&self, m: &ArgMatches) -> CliResult<Report>;
}

pub struct Registry {
    commands: Vec<Box<dyn Command>>,
}

impl Registry {
    pub fn new() -> Self {
        Registry { commands: Vec::new() }
    }

    pub fn register(&mut self, c: Box<dyn Command>) {
        self.commands.push(c);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.commands.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn clap(&self) -> clap::Command {
        let output = [
            Arg::new("out").long("out").value_name("FILE").global(true).help("write the JSON report here instead of stdout"),
            Arg::new("emit-dot").long("emit-dot").value_name("DIR").global(true).help("write DOT artifacts into DIR"),
        ];
        let mut cmd = clap::Command::new("tarski")
            .about("Paradoxical decompositions, Tarski-number bounds and their certificates")
            .subcommand_required(true)
            .arg_required_else_help(true)
            .args(output);
        for c in &self.commands {
            cmd = cmd.subcommand(clap::Command::new(c.name()).about(c.about()).args(c.args()));
        }
        cmd
    }
}
