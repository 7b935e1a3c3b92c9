//! Surgery turning an evenly colored 2-subgraph into one where every vertex
//! has exactly one outgoing edge.
//!
//! For each interior vertex without an outgoing edge, the backward path of
//! color-1 edges is removed and every vertex on it receives a color-1 loop.
//! On a finite ball such a path may run into the boundary; it is then cut
//! there and flagged.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::matching::{ColoredDigraph, EvenSubgraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizeOutcome {
    pub chosen: EvenSubgraph,
    /// Backward paths, each starting at a vertex without outgoing edge.
    pub paths: Vec<Vec<usize>>,
    /// Whether the path stopped at a non-interior vertex.
    pub truncated: Vec<bool>,
    pub loops_added: usize,
}

pub fn normalize(g: &ColoredDigraph, chosen: &EvenSubgraph) -> Result<NormalizeOutcome> {
    let n = g.vertex_count();
    let edges = g.edges();
    let mut has_out = vec![false; n];
    let mut in1: Vec<Option<usize>> = vec![None; n];
    for &e in &chosen.edges {
        let edge = &edges[e];
        if has_out[edge.tail] {
            return Err(Error::NotEvenlyColored(format!("vertex {} has two outgoing edges", edge.tail)));
        }
        has_out[edge.tail] = true;
        if edge.color == 1 {
            if in1[edge.head].is_some() {
                return Err(Error::NotEvenlyColored(format!("two backward color-1 edges into vertex {}", edge.head)));
            }
            in1[edge.head] = Some(e);
        }
    }
    let loops: HashMap<usize, usize> =
        edges.iter().enumerate().filter(|(_, e)| e.color == 1 && e.tail == e.head).map(|(i, e)| (e.tail, i)).collect();
    let mut removed = HashSet::new();
    let mut added = Vec::new();
    let mut paths = Vec::new();
    let mut truncated = Vec::new();
    let mut on_path = vec![false; n];
    for start in (0..n).filter(|&v| g.is_interior(v) && !has_out[v]) {
        let mut path = vec![start];
        on_path[start] = true;
        let mut cur = start;
        while let Some(e) = in1[cur] {
            let tail = edges[e].tail;
            if on_path[tail] {
                return Err(Error::NotEvenlyColored(format!("backward color-1 path revisits vertex {tail}")));
            }
            removed.insert(e);
            on_path[tail] = true;
            path.push(tail);
            cur = tail;
        }
        truncated.push(!g.is_interior(cur));
        for &v in &path {
            let l = loops
                .get(&v)
                .ok_or_else(|| Error::InvalidArgument(format!("no color-1 loop at vertex {v}; 1 must lie in S₁")))?;
            added.push(*l);
        }
        paths.push(path);
    }
    let mut edges_out: Vec<usize> = chosen.edges.iter().copied().filter(|e| !removed.contains(e)).collect();
    let loops_added = added.len();
    edges_out.extend(added);
    edges_out.sort_unstable();
    edges_out.dedup();
    Ok(NormalizeOutcome { chosen: EvenSubgraph { edges: edges_out }, paths, truncated, loops_added })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{ball_partition, verify_ball, Decomposition};
    use crate::group::{FreeGroup, Group};
    use crate::matching::{CayleyBall, Edge};
    use crate::word::{Alphabet, Word};

    fn pingpong_ball(r: usize) -> (Decomposition, CayleyBall) {
        let d = Decomposition::pingpong_f2();
        let g = FreeGroup::of_rank(2);
        let ball = CayleyBall::build(&g, d.translating_sets(), &g.generators(), r).unwrap();
        (d, ball)
    }

    fn small_graph() -> ColoredDigraph {
        let edges = vec![
            Edge { tail: 0, head: 0, color: 1, label: Word::identity() },
            Edge { tail: 1, head: 1, color: 1, label: Word::identity() },
            Edge { tail: 1, head: 0, color: 1, label: Word::identity() },
            Edge { tail: 2, head: 0, color: 2, label: Word::identity() },
        ];
        let names = vec!["0".into(), "1".into(), "2".into()];
        ColoredDigraph::new(2, names, vec![true, false, false], edges, Alphabet::standard(1)).unwrap()
    }

    #[test]
    fn already_normal_is_unchanged() {
        let g = small_graph();
        let chosen = EvenSubgraph { edges: vec![0, 3] };
        let out = normalize(&g, &chosen).unwrap();
        assert_eq!(out.chosen, chosen);
        assert!(out.paths.is_empty());
    }

    #[test]
    fn short_path_gets_loops() {
        let g = small_graph();
        let out = normalize(&g, &EvenSubgraph { edges: vec![2, 3] }).unwrap();
        assert_eq!(out.paths, vec![vec![0, 1]]);
        assert_eq!(out.truncated, vec![true]);
        assert_eq!(out.chosen.edges, vec![0, 1, 3]);
        assert_eq!(normalize(&g, &out.chosen).unwrap().chosen, out.chosen);
    }

    #[test]
    fn pingpong_identity_path() {
        let (d, ball) = pingpong_ball(6);
        let lambda = d.ball_subgraph(&ball);
        let out = normalize(&ball.graph, &lambda).unwrap();
        assert_eq!(out.paths.len(), 1);
        let a = Word::gen(0);
        let expected: Vec<usize> = (0..=6).map(|m| ball.vertex_of(&a.pow(m)).unwrap()).collect();
        assert_eq!(out.paths[0], expected);
        assert_eq!(out.truncated, vec![true]);
        for v in expected {
            let l = ball.graph.find_edge(v, v, 1).unwrap();
            assert!(out.chosen.edges.contains(&l));
        }
    }

    #[test]
    fn pingpong_normalized_is_strong() {
        let (d, ball) = pingpong_ball(6);
        let out = normalize(&ball.graph, &d.ball_subgraph(&ball)).unwrap();
        let nd = Decomposition::from_subgraph(&ball, &out.chosen, d.translating_sets(), d.alphabet().clone()).unwrap();
        let g = FreeGroup::of_rank(2);
        let report = verify_ball(&nd, &g, 6).unwrap();
        assert!(report.all_ok(), "{report:?}");
        assert_eq!(ball_partition(&nd, &g, 5), None);
        // the original leaves the identity uncovered
        assert_eq!(ball_partition(&d, &g, 5), Some(Word::identity()));
        assert_eq!(normalize(&ball.graph, &out.chosen).unwrap().chosen, out.chosen);
    }

    #[test]
    fn double_incoming_rejected() {
        let g = ColoredDigraph::unlabeled(2, 3, &[(0, 2, 1), (1, 2, 1)]).unwrap();
        assert!(matches!(normalize(&g, &EvenSubgraph { edges: vec![0, 1] }), Err(Error::NotEvenlyColored(_))));
    }
}
