use clap::{Arg, ArgMatches};
use serde_json::{json, Value};
use tarski_core::forests::{
    counting_harness, decomposition_from_degree, minimal_spanning_forest, sample_msf, theta_harness, BallGraph, SchemeRegistry,
};
use tarski_core::matching::MatchOutcome;

use crate::args::{self, get};
use crate::registry::{CliResult, Command, Report};

fn ball(m: &ArgMatches) -> CliResult<(BallGraph, std::sync::Arc<dyn tarski_core::Group>)> {
    let group = args::group_of(m)?;
    let gens = args::generators(m, group.as_ref())?;
    Ok((BallGraph::build(group.as_ref(), &gens, get(m, "radius")?)?, group))
}

pub struct ForestSim;

impl Command for ForestSim {
    fn name(&self) -> &'static str {
        "forest-sim"
    }
    fn about(&self) -> &'static str {
        "sample minimal spanning forests and record the degree of the identity"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::group("F2"),
            args::gens(),
            args::radius("4"),
            args::trials("100"),
            args::seed(),
            args::opt("forced", "generator whose edges are always kept"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let (g, group) = ball(m)?;
        let forced = args::label(m, "forced", &g.gens, group.alphabet())?;
        let stats = sample_msf(&g, get(m, "trials")?, get(m, "seed")?, forced)?;
        let mut json = stats.to_json();
        json["group"] = group.descriptor().into();
        json["vertices"] = g.vertex_count().into();
        json["edges"] = g.edges.len().into();
        let first = minimal_spanning_forest(&g, stats.seed, 0, forced);
        Ok(Report::new(json, stats.all_valid).with_dot("forest_0", g.to_dot(Some(&first))))
    }
}

pub struct ForestCheck;

impl Command for ForestCheck {
    fn name(&self) -> &'static str {
        "forest-check"
    }
    fn about(&self) -> &'static str {
        "test the forest counting inequalities on random interior sets"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::group("Z2"),
            args::gens(),
            args::radius("6"),
            args::trials("200"),
            args::seed(),
            args::opt("a", "generator whose edges the forests keep (default: the first)"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let (g, group) = ball(m)?;
        let a = args::label(m, "a", &g.gens, group.alphabet())?.unwrap_or(0);
        let rep = counting_harness(&g, get(m, "trials")?, get(m, "seed")?, a)?;
        let ok = rep.violations.iter().all(|&v| v == 0);
        let mut json = serde_json::to_value(&rep).expect("serializable");
        json["group"] = group.descriptor().into();
        json["inequalities"] = json!(["a", "b", "e", "f"]);
        Ok(Report::new(json, ok))
    }
}

pub struct Theta;

impl Command for Theta {
    fn name(&self) -> &'static str {
        "theta"
    }
    fn about(&self) -> &'static str {
        "apply the θ substitution to sampled forests and check acyclicity"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::group("F2"),
            args::gens(),
            args::radius("5"),
            args::trials("100"),
            args::seed(),
            args::num("n", "2", "length parameter of the substitution"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let (g, group) = ball(m)?;
        let rep = theta_harness(&g, get(m, "trials")?, get(m, "seed")?, 0, 1, get(m, "n")?)?;
        let ok = rep.acyclic == rep.trials;
        let mut json = serde_json::to_value(&rep).expect("serializable");
        json["group"] = group.descriptor().into();
        Ok(Report::new(json, ok))
    }
}

pub struct Tarski56;

impl Command for Tarski56 {
    fn name(&self) -> &'static str {
        "tarski56"
    }
    fn about(&self) -> &'static str {
        "match the degree-driven translating sets on a Cayley ball"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::group("F3"),
            args::gens(),
            args::radius("4"),
            Arg::new("variant").long("variant").value_parser(["c", "d", "g", "h"]).default_value("c"),
            args::opt("a", "generator of infinite order for variants g and h (default: the first)"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let group = args::group_of(m)?;
        let gens = args::generators(m, group.as_ref())?;
        let a = args::label(m, "a", &gens, group.alphabet())?;
        let schemes = SchemeRegistry::default();
        let scheme = schemes.get(&get::<String>(m, "variant")?)?;
        let out = decomposition_from_degree(group.as_ref(), &gens, get(m, "radius")?, scheme, a)?;
        let al = group.alphabet();
        let mut json = json!({
            "group": group.descriptor(),
            "variant": scheme.name(),
            "translating_sets": out.sets.iter().map(|s| al.format_all(s)).collect::<Vec<_>>(),
            "total_size": out.total_size,
            "vertices": out.vertices,
            "demand": out.demand,
            "feasible": out.outcome.is_feasible(),
        });
        if let MatchOutcome::Infeasible(c) = &out.outcome {
            json["certificate"] = json!({ "margin": c.margin, "set_sizes": c.sets.iter().map(Vec::len).collect::<Vec<_>>() });
        }
        if let MatchOutcome::Feasible(s) = &out.outcome {
            json["chosen_edges"] = Value::from(s.edges.len());
        }
        Ok(Report::new(json, out.outcome.is_feasible()))
    }
}
