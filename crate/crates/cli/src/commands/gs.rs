use clap::{Arg, ArgMatches};
use serde_json::json;
use tarski_core::gs::{
    burnside_like_presentation, default_trunc, g_pd_presentation, gs_check, gs_optimize, p_deficiency, p_parts, parse_rational,
    ptp_bound, Presentation, PresentationJson, RelatorMode,
};
use tarski_core::wreath::neumann_embed_check;
use tarski_core::{Alphabet, FreeGroup};

use crate::args::{self, get, get_opt};
use crate::registry::{CliError, CliResult, Command, Report};

pub struct GsCheck;

impl Command for GsCheck {
    fn name(&self) -> &'static str {
        "gs-check"
    }
    fn about(&self) -> &'static str {
        "evaluate the Golod–Shafarevich condition for a weighted presentation"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::num("d", "9", "number of generators of G_{p,d}"),
            args::num("p", "67", "prime"),
            args::num("tau", "0.13", "weight parameter, decimal or fraction"),
            args::opt("trunc", "truncation degree (default max(8, p+1))"),
            args::num("grid", "200", "grid size for the τ optimization"),
            args::input(),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let pres = match m.get_one::<String>("input") {
            Some(path) => Presentation::from_json(&args::read_json::<PresentationJson>(path)?)?,
            None => g_pd_presentation(get(m, "d")?, get(m, "p")?)?,
        };
        let trunc = get_opt(m, "trunc")?.unwrap_or(default_trunc(pres.p));
        let tau = parse_rational(&get::<String>(m, "tau")?)?;
        let rep = gs_check(&pres, &tau, trunc)?;
        let (best_tau, best_value) = gs_optimize(pres.alphabet.rank(), &rep.degrees, get(m, "grid")?);
        let mut json = rep.to_json();
        json["generators"] = pres.alphabet.rank().into();
        json["relators"] = pres.relators.len().into();
        json["p"] = pres.p.into();
        json["optimum"] = json!({ "tau": format!("{best_tau:.9}"), "value": format!("{best_value:.9}") });
        Ok(Report::new(json, rep.holds() != Some(false)))
    }
}

pub struct PDef;

impl Command for PDef {
    fn name(&self) -> &'static str {
        "p-def"
    }
    fn about(&self) -> &'static str {
        "p-deficiency of a finite presentation"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            Arg::new("gens").long("gens").default_value("x,y").help("comma-separated generator names"),
            args::opt("relators", "semicolon-separated relators, e.g. \"x^4; y^4; x y x^-1 y^-1 x y x^-1 y^-1\""),
            args::num("p", "2", "prime"),
            args::input(),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let (alphabet, relators, p) = match m.get_one::<String>("input") {
            Some(path) => {
                let pres = Presentation::from_json(&args::read_json::<PresentationJson>(path)?)?;
                let words = (0..pres.relators.len())
                    .map(|i| pres.relator_word(i).ok_or_else(|| CliError::Usage(format!("relator {i} is too long to expand"))))
                    .collect::<CliResult<Vec<_>>>()?;
                (pres.alphabet, words, pres.p)
            }
            None => {
                let alphabet = Alphabet::new(get::<String>(m, "gens")?.split(',').map(|s| s.trim().to_string()))?;
                let raw: String = m.get_one::<String>("relators").cloned().unwrap_or_default();
                let words =
                    raw.split(';').filter(|s| !s.trim().is_empty()).map(|s| alphabet.parse(s)).collect::<Result<Vec<_>, _>>()?;
                (alphabet, words, get(m, "p")?)
            }
        };
        let def = p_deficiency(alphabet.rank(), &relators, p)?;
        let parts = relators
            .iter()
            .map(|r| p_parts(r, p).map(|rd| json!({ "relator": alphabet.format(r), "root": alphabet.format(&rd.s), "e": rd.e })))
            .collect::<Result<Vec<_>, _>>()?;
        let json = json!({ "p": p, "generators": alphabet.rank(), "deficiency": def.to_string(), "relators": parts });
        Ok(Report::new(json, true))
    }
}

pub struct PtpBound;

impl Command for PtpBound {
    fn name(&self) -> &'static str {
        "ptp-bound"
    }
    fn about(&self) -> &'static str {
        "closed-form Betti lower bound |X| − 1 − Σ p^(−n_i)"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::num("d", "3", "number of generators |X|"),
            args::num("p", "2", "prime"),
            args::opt("exponents", "comma-separated n_i"),
            args::num("count", "20", "use n_i = i + 1 for i = 1..count when --exponents is absent"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let exps: Vec<u32> = match m.get_one::<String>("exponents") {
            Some(list) => list
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| CliError::Usage(format!("--exponents: bad entry {s:?}"))))
                .collect::<CliResult<_>>()?,
            None => (1..=get::<u32>(m, "count")?).map(|i| i + 1).collect(),
        };
        let rep = ptp_bound(get(m, "d")?, get(m, "p")?, &exps)?;
        let mut json = rep.to_json();
        json["exponents"] = json!(exps);
        Ok(Report::new(json, true))
    }
}

pub struct GenPresentation;

impl Command for GenPresentation {
    fn name(&self) -> &'static str {
        "gen-presentation"
    }
    fn about(&self) -> &'static str {
        "emit a prefix of the power-relator presentations"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::num("d", "3", "number of generators"),
            args::num("p", "2", "prime"),
            args::num("count", "20", "number of relators"),
            Arg::new("mode").long("mode").value_parser(["full", "derived"]).default_value("full"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let mode = match get::<String>(m, "mode")?.as_str() {
            "derived" => RelatorMode::Derived,
            _ => RelatorMode::Full,
        };
        let pres = burnside_like_presentation(get(m, "d")?, get(m, "p")?, get(m, "count")?, mode)?;
        let json = serde_json::to_value(pres.to_json()).expect("serializable");
        Ok(Report::new(json, true))
    }
}

pub struct WreathCheck;

impl Command for WreathCheck {
    fn name(&self) -> &'static str {
        "wreath-check"
    }
    fn about(&self) -> &'static str {
        "check the commutator identity for the embedding into a wreath product"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            args::num("d", "2", "rank of the free group"),
            args::num("n", "65537", "order of the cyclic top group"),
            args::num("i", "1", "first generator (one-based)"),
            args::num("j", "2", "second generator (one-based)"),
        ]
    }
    fn run(&self, m: &ArgMatches) -> CliResult<Report> {
        let d: usize = get(m, "d")?;
        let n: u64 = get(m, "n")?;
        let group = FreeGroup::of_rank(d);
        let rep = neumann_embed_check(&group, d, get(m, "i")?, get(m, "j")?, n)?;
        let json = json!({ "d": d, "n": n, "holds": rep.holds, "positions": rep.positions, "lhs_support": rep.lhs_support });
        Ok(Report::new(json, rep.holds))
    }
}
