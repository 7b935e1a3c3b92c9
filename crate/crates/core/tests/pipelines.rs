use tarski_core::decomp::{double_up, verify_ball, verify_exact, Decomposition, DecompositionJson};
use tarski_core::forests::{decomposition_from_degree, SchemeRegistry};
use tarski_core::gs::{burnside_like_presentation, gs_check, parse_rational, Presentation, PresentationJson, RelatorMode};
use tarski_core::matching::{find_even_k_subgraph, CayleyBall, ColoredDigraph, GraphJson, MatchOutcome};
use tarski_core::transfer::{certify_sets, transfer_finite_index};
use tarski_core::{FreeGroup, Group, GroupRegistry, SubgroupGraph};

fn through_text<T: serde::Serialize + serde::de::DeserializeOwned>(value: &T) -> T {
    serde_json::from_str(&serde_json::to_string(value).unwrap()).unwrap()
}

#[test]
fn decompositions_survive_json() {
    let p = Decomposition::pingpong_f2();
    for d in [p.clone(), double_up(&p, &p).unwrap()] {
        let back = Decomposition::from_json(&through_text::<DecompositionJson>(&d.to_json())).unwrap();
        assert_eq!(back, d);
        assert!(verify_exact(&back).unwrap().all_ok());
    }
}

#[test]
fn matching_on_a_ball_gives_a_ball_decomposition() {
    let d = Decomposition::pingpong_f2();
    let group = FreeGroup::of_rank(2);
    let r = 5;
    let ball = CayleyBall::build(&group, d.translating_sets(), &group.generators(), r).unwrap();
    let graph = ColoredDigraph::from_json(&through_text::<GraphJson>(&ball.graph.to_json())).unwrap();
    let demand = graph.interior();
    let chosen = match find_even_k_subgraph(&graph, &demand) {
        MatchOutcome::Feasible(s) => s,
        MatchOutcome::Infeasible(c) => panic!("ping-pong ball infeasible: {c:?}"),
    };
    let bd = Decomposition::from_subgraph(&ball, &chosen, d.translating_sets(), d.alphabet().clone()).unwrap();
    let report = verify_ball(&bd, &group, r).unwrap();
    assert!(report.all_ok(), "{report:?}");
}

#[test]
fn transferred_sets_are_certified_by_an_independent_ball() {
    let d = Decomposition::pingpong_f2();
    let h = SubgroupGraph::kernel_to_cyclic(2, &[1, 1], 3).unwrap();
    let t = transfer_finite_index(&d, &h, None).unwrap();
    assert!(t.s_prime.iter().flatten().all(|w| h.contains(w)));
    assert!(certify_sets(&t.s_prime, 2, 6).unwrap().feasible());
}

#[test]
fn registries_drive_the_degree_pipeline() {
    let groups = GroupRegistry::default();
    let schemes = SchemeRegistry::default();
    assert_eq!(schemes.names(), vec!["c", "d", "g", "h"]);
    let f3 = groups.parse("F3").unwrap();
    let gens = f3.generators();
    let feasible: Vec<bool> = ["c", "d"]
        .iter()
        .map(|name| decomposition_from_degree(f3.as_ref(), &gens, 3, schemes.get(name).unwrap(), None).unwrap())
        .map(|out| out.outcome.is_feasible())
        .collect();
    assert_eq!(feasible, vec![true, true]);
    assert!(schemes.get("z").is_err());
    assert!(groups.parse("nonsense").is_err());
}

#[test]
fn presentations_survive_json() {
    let pres = burnside_like_presentation(3, 2, 6, RelatorMode::Full).unwrap();
    let back = Presentation::from_json(&through_text::<PresentationJson>(&pres.to_json())).unwrap();
    assert_eq!(back.to_json(), pres.to_json());
    let tau = parse_rational("1/2").unwrap();
    assert_eq!(gs_check(&back, &tau, 8).unwrap(), gs_check(&pres, &tau, 8).unwrap());
}
