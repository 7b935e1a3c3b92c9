use clap::{Arg, ArgMatches};
use serde_json::json;
use tarski_core::decomp::{ball_partition, normalize, verify_ball, verify_exact, Decomposition, Piece};
use tarski_core::matching::{find_even_k_subgraph, hall_check, CayleyBall, ColoredDigraph, GraphJson, MatchOutcome};
use tarski_core::FreeGroup;

use crate::args::{self, get};
use crate::registry::{CliResult, Command, Report};

pub struct Verify;

impl Command for Verify {
    fn name(&self) -> &'static str {
        "verify"
    }
    fn about(&self) -> &'static str {
        "verify a paradoxical decomposition exactly or on a Cayley ball"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::builtin(),
            args::input(),
            Arg::new("mode").long("mode").value_parser(["exact", "ball"]).default_value("exact"),
            args::radius("6"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let d = args::decomposition(m)?;
        let report = match get::<String>(m, "mode")?.as_str() {
            "exact" => verify_exact(&d)?,
            _ => verify_ball(&d, &FreeGroup::new(d.alphabet().clone()), get(m, "radius")?)?,
        };
        let json = json!({
            "k": d.k(),
            "tarski_size": d.tarski_size(),
            "translating_sets": d.translating_sets().iter().map(|s| d.alphabet().format_all(s)).collect::<Vec<_>>(),
            "report": report.to_json(d.alphabet()),
        });
        let mut out = Report::new(json, report.all_ok());
        for (i, row) in d.pieces().iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if let Piece::Symbolic(r) = p {
                    out = out.with_dot(format!("piece_{}_{}", i + 1, j + 1), r.to_dot(d.alphabet()));
                }
            }
        }
        Ok(out)
    }
}

pub struct Match;

impl Command for Match {
    fn name(&self) -> &'static str {
        "match"
    }
    fn about(&self) -> &'static str {
        "find a spanning evenly colored k-subgraph or a Hall violator"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            Arg::new("graph").long("graph").required(true).help("colored digraph JSON"),
            Arg::new("demand").long("demand").value_parser(["interior", "all"]).default_value("interior"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let json: GraphJson = args::read_json(&get::<String>(m, "graph")?)?;
        let g = ColoredDigraph::from_json(&json)?;
        let demand = match get::<String>(m, "demand")?.as_str() {
            "all" => g.all_vertices(),
            _ => g.interior(),
        };
        let outcome = find_even_k_subgraph(&g, &demand);
        Ok(match &outcome {
            MatchOutcome::Feasible(sub) => {
                let check = sub.check(&g, &demand);
                let json = json!({
                    "feasible": true,
                    "demand": demand.len(),
                    "edges": sub.edges,
                    "revalidated": check.ok(),
                });
                Report::new(json, true).with_dot("subgraph", g.to_dot(Some(sub)))
            }
            MatchOutcome::Infeasible(cert) => {
                let names = |set: &Vec<usize>| set.iter().map(|&v| g.names()[v].clone()).collect::<Vec<_>>();
                let json = json!({
                    "feasible": false,
                    "demand": demand.len(),
                    "certificate": {
                        "sets": cert.sets.iter().map(names).collect::<Vec<_>>(),
                        "margin": cert.margin,
                        "recomputed_margin": hall_check(&g, &cert.sets),
                    },
                });
                Report::new(json, false).with_dot("graph", g.to_dot(None))
            }
        })
    }
}

pub struct Normalize;

impl Command for Normalize {
    fn name(&self) -> &'static str {
        "normalize"
    }
    fn about(&self) -> &'static str {
        "turn a ball decomposition into one with exactly one outgoing edge per vertex"
    }
    fn args(&self) -> Vec<Arg> {
        vec![args::builtin(), args::input(), args::radius("6")]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let d = args::decomposition(m)?;
        let r: usize = get(m, "radius")?;
        let group = FreeGroup::new(d.alphabet().clone());
        let gens = tarski_core::Group::generators(&group);
        let ball = CayleyBall::build(&group, d.translating_sets(), &gens, r)?;
        let out = normalize(&ball.graph, &d.ball_subgraph(&ball))?;
        let nd = Decomposition::from_subgraph(&ball, &out.chosen, d.translating_sets(), d.alphabet().clone())?;
        let report = verify_ball(&nd, &group, r)?;
        let gap = ball_partition(&nd, &group, ball.interior_radius);
        let idempotent = normalize(&ball.graph, &out.chosen)?.chosen == out.chosen;
        let a = d.alphabet();
        let json = json!({
            "radius": r,
            "interior_radius": ball.interior_radius,
            "paths": out.paths.iter().map(|p| p.iter().map(|&v| a.format(&ball.elements[v])).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "truncated": out.truncated,
            "loops_added": out.loops_added,
            "report": report.to_json(a),
            "interior_partitioned": gap.is_none(),
            "first_unpartitioned": gap.as_ref().map(|w| a.format(w)),
            "idempotent": idempotent,
        });
        let ok = report.all_ok() && gap.is_none() && idempotent;
        Ok(Report::new(json, ok).with_dot("normalized", ball.graph.to_dot(Some(&out.chosen))))
    }
}
