//! Trees factor into level-1 pieces.
//!
//! At a vertex with weights `(a, b, c)` at level `L` and `s = (a + b + c)/2`,
//! a level-`L` weighting is a sum of `L` local pieces in exactly one way:
//! `s - c` pieces through the first two slots, `s - b` through the first and
//! third, `s - a` through the last two, and `L - s` empty ones. Walking the
//! tree outward from one vertex, the pieces at each new vertex are matched
//! with the pieces already built according to whether they use the edge
//! just crossed.

use std::collections::VecDeque;

use super::{require_member, Factorization, Method};
use crate::error::{Error, Result};
use crate::graph::MarkedGraph;
use crate::weighting::Weighting;

fn local_pieces(slots: [usize; 3], w: &Weighting) -> Result<Vec<Vec<usize>>> {
    let [e0, e1, e2] = slots;
    let (a, b, c) = (w.get(e0), w.get(e1), w.get(e2));
    let s = (a + b + c) / 2;
    if s < a || s < b || s < c || s > w.level() {
        return Err(Error::NotMember(format!("{w} at edges {slots:?}")));
    }
    let mut out = Vec::with_capacity(w.level() as usize);
    out.extend((0..s - c).map(|_| vec![e0, e1]));
    out.extend((0..s - b).map(|_| vec![e0, e2]));
    out.extend((0..s - a).map(|_| vec![e1, e2]));
    out.extend((0..w.level() - s).map(|_| Vec::new()));
    Ok(out)
}

/// Factors a member of a tree's semigroup into level-1 members.
pub fn factor_tree_degree1(graph: &MarkedGraph, w: &Weighting) -> Result<Factorization> {
    if !graph.is_tree() {
        return Err(Error::Unsupported(format!("{} is not a tree", graph.name())));
    }
    require_member(graph, w)?;
    let m = graph.num_edges();
    let level = w.level() as usize;
    let mut parts = vec![vec![0u32; m]; level];
    let root = graph
        .internal_vertices()
        .next()
        .ok_or_else(|| Error::InvalidGraph("no internal vertex".into()))?;
    let mut seen = vec![false; graph.num_vertices()];
    seen[root] = true;
    let mut queue = VecDeque::from([(root, None::<usize>)]);
    while let Some((v, from)) = queue.pop_front() {
        let s = graph.slots(v);
        let slots = [s[0], s[1], s[2]];
        let pieces = local_pieces(slots, w)?;
        match from {
            None => {
                for (part, piece) in parts.iter_mut().zip(&pieces) {
                    for &e in piece {
                        part[e] = 1;
                    }
                }
            }
            Some(pe) => {
                let (mut using, mut idle): (Vec<&Vec<usize>>, Vec<&Vec<usize>>) =
                    pieces.iter().partition(|p| p.contains(&pe));
                for part in parts.iter_mut() {
                    let piece = if part[pe] == 1 { using.pop() } else { idle.pop() };
                    let piece = piece.ok_or_else(|| {
                        Error::Invariant(format!("piece counts disagree across edge {pe}"))
                    })?;
                    for &e in piece {
                        part[e] = 1;
                    }
                }
            }
        }
        for &e in &slots {
            if Some(e) == from {
                continue;
            }
            let u = graph.edge(e).other(v);
            if graph.is_internal(u) && !seen[u] {
                seen[u] = true;
                queue.push_back((u, Some(e)));
            }
        }
    }
    let parts = parts.into_iter().map(|p| Weighting::new(p, 1)).collect();
    Factorization::new(w.clone(), parts, Method::Tree).validated(graph)
}
