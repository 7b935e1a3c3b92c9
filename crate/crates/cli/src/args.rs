//! Shared flags and their parsing.

use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Arg, ArgMatches};
use tarski_core::decomp::{double_up, Decomposition, DecompositionJson};
use tarski_core::{Alphabet, Group, GroupRegistry, Word};

use crate::registry::{CliError, CliResult};

pub fn num(name: &'static str, default: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).value_name("N").default_value(default).help(help)
}

pub fn opt(name: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).help(help)
}

pub fn radius(default: &'static str) -> Arg {
    num("radius", default, "ball radius")
}

pub fn seed() -> Arg {
    num("seed", "0", "random seed")
}

pub fn trials(default: &'static str) -> Arg {
    num("trials", default, "number of sampled trials")
}

pub fn group(default: &'static str) -> Arg {
    Arg::new("group").long("group").default_value(default).help("group descriptor: F2, Z2, free:3, abelian:2")
}

pub fn gens() -> Arg {
    opt("gens", "comma-separated generating words (default: the standard generators)")
}

pub fn builtin() -> Arg {
    Arg::new("builtin")
        .long("builtin")
        .value_parser(["pingpong", "pingpong-double", "pingpong-f3"])
        .help("built-in decomposition")
}

pub fn input() -> Arg {
    opt("input", "JSON input file")
}

pub fn get<T: FromStr>(m: &ArgMatches, name: &str) -> CliResult<T> {
    let raw = m.get_one::<String>(name).ok_or_else(|| CliError::Usage(format!("--{name} is required")))?;
    raw.parse().map_err(|_| CliError::Usage(format!("--{name}: cannot parse {raw:?}")))
}

pub fn get_opt<T: FromStr>(m: &ArgMatches, name: &str) -> CliResult<Option<T>> {
    m.get_one::<String>(name).map(|_| get(m, name)).transpose()
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn decomposition(m: &ArgMatches) -> CliResult<Decomposition> {
    if let Some(path) = m.get_one::<String>("input") {
        let json: DecompositionJson = read_json(path)?;
        return Ok(Decomposition::from_json(&json)?);
    }
    let name = m.get_one::<String>("builtin").map(String::as_str).unwrap_or("pingpong");
    Ok(match name {
        "pingpong" => Decomposition::pingpong_f2(),
        "pingpong-double" => {
            let d = Decomposition::pingpong_f2();
            double_up(&d, &d)?
        }
        "pingpong-f3" => Decomposition::pingpong(Alphabet::standard(3), 0, 1)?,
        other => return Err(CliError::Usage(format!("unknown builtin {other:?}"))),
    })
}

pub fn group_of(m: &ArgMatches) -> CliResult<Arc<dyn Group>> {
    let desc: String = get(m, "group")?;
    Ok(GroupRegistry::default().parse(&desc)?)
}

pub fn words(alphabet: &Alphabet, list: &str) -> CliResult<Vec<Word>> {
    list.split(',').map(|s| alphabet.parse(s.trim()).map_err(CliError::from)).collect()
}

pub fn generators(m: &ArgMatches, group: &dyn Group) -> CliResult<Vec<Word>> {
    match m.get_one::<String>("gens") {
        Some(list) => words(group.alphabet(), list),
        None => Ok(group.generators()),
    }
}

/// Index of a generating word given by name, or by position when numeric.
pub fn label(m: &ArgMatches, name: &str, gens: &[Word], alphabet: &Alphabet) -> CliResult<Option<usize>> {
    let Some(raw) = m.get_one::<String>(name) else { return Ok(None) };
    if let Ok(i) = raw.parse::<usize>() {
        return if i < gens.len() { Ok(Some(i)) } else { Err(CliError::Usage(format!("--{name}: no label {i}"))) };
    }
    let w = alphabet.parse(raw)?;
    gens.iter()
        .position(|g| *g == w)
        .map(Some)
        .ok_or_else(|| CliError::Usage(format!("--{name}: {raw:?} is not among the generators")))
}
