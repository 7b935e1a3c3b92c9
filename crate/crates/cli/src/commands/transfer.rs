use clap::{Arg, ArgMatches};
use serde_json::{json, Value};
use tarski_core::matching::MatchOutcome;
use tarski_core::transfer::{
    certify_transfer, finite_index_bound, transfer_abelian_variety, transfer_finite_index, transfer_quotient, Certification,
};
use tarski_core::{Alphabet, SubgroupGraph};

use crate::args::{self, get, get_opt};
use crate::registry::{CliResult, Command, Report};

fn certification_json(c: &Certification, elements: Option<&[String]>) -> Value {
    let mut v = json!({
        "feasible": c.feasible(),
        "vertices": c.vertices,
        "demand": c.demand,
        "interior_radius": c.interior_radius,
    });
    if let MatchOutcome::Infeasible(cert) = &c.outcome {
        v["certificate"] = json!({
            "margin": cert.margin,
            "sets": cert.sets.iter().map(|s| match elements {
                Some(names) => s.iter().map(|&i| Value::from(names[i].clone())).collect::<Vec<_>>(),
                None => s.iter().map(|&i| Value::from(i)).collect(),
            }).collect::<Vec<_>>(),
        });
    }
    v
}

pub struct Transfer;

impl Command for Transfer {
    fn name(&self) -> &'static str {
        "transfer"
    }
    fn about(&self) -> &'static str {
        "transfer a decomposition to a finite-index subgroup"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::builtin(),
            args::input(),
            args::num("index", "2", "H = kernel of the map onto Z/n sending every generator to 1"),
            args::opt("subgroup", "comma-separated generators of H instead of --index"),
            args::opt("radius", "also certify on the ball of this radius"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let d = args::decomposition(m)?;
        let a = d.alphabet();
        let rank = a.rank();
        let h = match m.get_one::<String>("subgroup") {
            Some(list) => SubgroupGraph::stallings_fold(rank, &args::words(a, list)?),
            None => SubgroupGraph::kernel_to_cyclic(rank, &vec![1; rank], get(m, "index")?)?,
        };
        let result = transfer_finite_index(&d, &h, None)?;
        let index = h.index().expect("transfer checked finite index");
        let sigma = result.s_prime_total();
        let t = d.tarski_size();
        let mut json = result.to_json(a);
        json["index"] = index.into();
        json["inequality"] = format!(
            "Σ|S'_i| − 2 = {} ≤ [G:H](𝒯 − 2) = {}·({} − 2) = {}",
            sigma as i64 - 2,
            index,
            t,
            finite_index_bound(index, t) - 2
        )
        .into();
        json["inequality_holds"] = (sigma <= finite_index_bound(index, t)).into();
        let mut ok = true;
        if let Some(r) = get_opt::<usize>(m, "radius")? {
            let c = certify_transfer(&result, r)?;
            ok = c.feasible();
            json["certification"] = certification_json(&c, None);
        }
        Ok(Report::new(json, ok).with_dot("coset_graph", h.to_dot(a)))
    }
}

pub struct VarietyTransfer;

impl Command for VarietyTransfer {
    fn name(&self) -> &'static str {
        "variety-transfer"
    }
    fn about(&self) -> &'static str {
        "transfer to the kernel of the abelianization through a Følner cube"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::builtin(),
            args::input(),
            args::num("cap", "16", "largest cube side searched"),
            args::opt("radius", "also certify on the ball of this radius"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let d = args::decomposition(m)?;
        let v = transfer_abelian_variety(&d, get(m, "cap")?)?;
        let mut json = v.result.to_json(d.alphabet());
        json["cube_side"] = v.m.into();
        json["U"] = json!(v.u);
        json["FU"] = v.fu.into();
        json["a_priori_bound"] = v.a_priori_bound.into();
        let mut ok = true;
        if let Some(r) = get_opt::<usize>(m, "radius")? {
            let c = certify_transfer(&v.result, r)?;
            ok = c.feasible();
            json["certification"] = certification_json(&c, None);
        }
        Ok(Report::new(json, ok))
    }
}

pub struct QuotientTransfer;

impl Command for QuotientTransfer {
    fn name(&self) -> &'static str {
        "quotient-transfer"
    }
    fn about(&self) -> &'static str {
        "push a decomposition through a homomorphism and match on the image ball"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::builtin(),
            args::input(),
            args::group("F2"),
            Arg::new("gens").long("gens").required(true).help("comma-separated images of the generators"),
            args::radius("4"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let d = args::decomposition(m)?;
        let q = args::group_of(m)?;
        let rho = args::words(q.alphabet(), &get::<String>(m, "gens")?)?;
        let rep = transfer_quotient(&d, &rho, q.as_ref(), get(m, "radius")?)?;
        let qa: &Alphabet = q.alphabet();
        let json = json!({
            "target": q.descriptor(),
            "images": rep.images.iter().map(|s| qa.format_all(s)).collect::<Vec<_>>(),
            "image_size": rep.image_size,
            "source_size": rep.source_size,
            "size_ok": rep.image_size <= rep.source_size,
            "certification": certification_json(&rep.certification, None),
        });
        Ok(Report::new(json, rep.certification.feasible()))
    }
}
