//! Factorizations into level-1 and level-2 elements.
//!
//! The constructive procedures follow the structure of the semigroup:
//!
//! * trees decompose vertex by vertex into `{0, 1}` paths;
//! * `B₁` has a unique factorization in closed form;
//! * `B₂` is reduced greedily (skew parallel weights, then unequal leaves,
//!   then the balanced remainder);
//! * odd levels on a loop chain shed one level-1 element made of loop
//!   generators on the saturated gadgets;
//! * even levels on a loop chain split off the last bigon, factor both sides
//!   into level-2 pieces and match them along the cut edge;
//! * a chain glued to a tree is factored on both sides and matched along the
//!   cut, pairing the tree's level-1 pieces where the loop side needs level 2.
//!
//! Every returned [`Factorization`] is validated before it leaves the module.

mod search;
mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use search::GeneratorIndex;
pub use tree::factor_tree_degree1;

use crate::error::{Error, Result};
use crate::graph::{build_b2, glue, split_with_left, Gadget, LoopChain, MarkedGraph, SplitDescriptor};
use crate::weighting::{
    glue_weightings, join, member_unchecked, membership_violation, restrict, Side, Weighting,
    WeightingFile,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Tree,
    B1,
    B2,
    Even,
    Odd,
    Glued,
    Capped,
    Search,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Tree => "tree",
            Method::B1 => "b1",
            Method::B2 => "b2",
            Method::Even => "even",
            Method::Odd => "odd",
            Method::Glued => "glued",
            Method::Capped => "capped",
            Method::Search => "search",
        };
        f.write_str(s)
    }
}

/// A multiset of members summing (edge-wise and in level) to `target`.
/// Parts are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub target: Weighting,
    pub parts: Vec<Weighting>,
    pub method: Method,
}

impl Factorization {
    pub fn new(target: Weighting, mut parts: Vec<Weighting>, method: Method) -> Self {
        parts.sort();
        Factorization {
            target,
            parts,
            method,
        }
    }

    pub fn validate(&self, graph: &MarkedGraph) -> Result<()> {
        if self.parts.is_empty() {
            if self.target.level() == 0 && self.target.is_zero() {
                return Ok(());
            }
            return Err(Error::Invariant(format!("empty factorization of {}", self.target)));
        }
        for p in &self.parts {
            if p.len() != graph.num_edges() {
                return Err(Error::Structural(format!("part {p} does not fit the graph")));
            }
            if p.level() == 0 {
                return Err(Error::Invariant(format!("part {p} has level 0")));
            }
            if let Some(why) = membership_violation(graph, p) {
                return Err(Error::Invariant(format!("part {p} is not a member: {why}")));
            }
        }
        let sum = Weighting::sum(&self.parts)?;
        if sum != self.target {
            return Err(Error::Invariant(format!(
                "parts sum to {sum}, target is {}",
                self.target
            )));
        }
        Ok(())
    }

    pub(crate) fn validated(self, graph: &MarkedGraph) -> Result<Self> {
        self.validate(graph)?;
        Ok(self)
    }

    pub fn max_part_level(&self) -> u32 {
        self.parts.iter().map(Weighting::level).max().unwrap_or(0)
    }
}

/// `{target, parts: [weighting...], method, validated}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationFile {
    pub target: WeightingFile,
    pub parts: Vec<WeightingFile>,
    pub method: Method,
    pub validated: bool,
}

impl FactorizationFile {
    pub fn new(graph: &MarkedGraph, f: &Factorization) -> Self {
        FactorizationFile {
            target: WeightingFile::from_weighting(graph, &f.target),
            parts: f
                .parts
                .iter()
                .map(|p| WeightingFile::from_weighting(graph, p))
                .collect(),
            method: f.method,
            validated: f.validate(graph).is_ok(),
        }
    }
}

pub(crate) fn require_member(graph: &MarkedGraph, w: &Weighting) -> Result<()> {
    if w.len() != graph.num_edges() {
        return Err(Error::Structural(format!(
            "{w} does not fit graph {}",
            graph.name()
        )));
    }
    match membership_violation(graph, w) {
        None => Ok(()),
        Some(why) => Err(Error::NotMember(format!("{w}: {why}"))),
    }
}

/// `rest - part`, which must again be a member.
fn strip(graph: &MarkedGraph, rest: &Weighting, part: &Weighting, step: &str) -> Result<Weighting> {
    let next = rest
        .checked_sub(part)
        .ok_or_else(|| Error::Invariant(format!("{step}: {part} does not fit in {rest}")))?;
    if !member_unchecked(graph, &next) {
        return Err(Error::Invariant(format!(
            "{step}: removing {part} from {rest} leaves non-member {next}"
        )));
    }
    Ok(next)
}

fn weighting_on(num_edges: usize, level: u32, entries: &[(usize, u32)]) -> Weighting {
    let mut w = vec![0; num_edges];
    for &(e, x) in entries {
        w[e] = x;
    }
    Weighting::new(w, level)
}

/// Level-1 generator of one loop gadget in a chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopGenerator {
    pub gadget: Gadget,
    /// Index of the gadget along the chain, from the self-loop end.
    pub position: usize,
}

impl LoopGenerator {
    pub fn weighting(&self, num_edges: usize) -> Weighting {
        let entries: Vec<(usize, u32)> = self.gadget.loop_edges().into_iter().map(|e| (e, 1)).collect();
        weighting_on(num_edges, 1, &entries)
    }
}

fn b1_edges(graph: &MarkedGraph) -> Option<(usize, usize)> {
    let chain = graph.loop_chain()?;
    match chain.gadgets.as_slice() {
        [Gadget::SelfLoop { edge, .. }] => Some((*edge, chain.leaf)),
        _ => None,
    }
}

/// `B₁`: loop `l`, leaf `r` at level `L` is
/// `(r/2)·(1, 2)₂ + (l - r/2)·(1, 0)₁ + (L - l - r/2)·(0, 0)₁`.
pub fn factor_b1(graph: &MarkedGraph, w: &Weighting) -> Result<Factorization> {
    let (loop_edge, leaf) =
        b1_edges(graph).ok_or_else(|| Error::Unsupported(format!("{} is not B1", graph.name())))?;
    require_member(graph, w)?;
    let m = graph.num_edges();
    let (l, r, level) = (w.get(loop_edge), w.get(leaf), w.level());
    let half = r / 2;
    let mut parts = Vec::new();
    parts.extend((0..half).map(|_| weighting_on(m, 2, &[(loop_edge, 1), (leaf, 2)])));
    parts.extend((0..l - half).map(|_| weighting_on(m, 1, &[(loop_edge, 1)])));
    parts.extend((0..level - l - half).map(|_| Weighting::zero_level(m, 1)));
    Factorization::new(w.clone(), parts, Method::B1).validated(graph)
}

/// `B₂` with coordinates `(left, x, y, right)`: strip skew pieces while
/// `x != y`, then level-2 pieces with a single even leaf while the leaves
/// differ, then split the balanced remainder.
pub fn factor_b2(graph: &MarkedGraph, w: &Weighting) -> Result<Factorization> {
    let layout = graph
        .b2_layout()
        .ok_or_else(|| Error::Unsupported(format!("{} is not B2", graph.name())))?;
    require_member(graph, w)?;
    let [le, ue, lo, re] = layout.edges();
    if w.get(le) % 2 == 1 || w.get(re) % 2 == 1 {
        return Err(Error::NotMember(format!("{w}: B2 leaves must be even")));
    }
    let m = graph.num_edges();
    let mut parts = Vec::new();
    let mut rest = w.clone();

    while rest.get(ue) != rest.get(lo) {
        let big = if rest.get(ue) > rest.get(lo) { ue } else { lo };
        let piece = weighting_on(m, 2, &[(le, 2), (big, 2), (re, 2)]);
        rest = strip(graph, &rest, &piece, "B2 skew")?;
        parts.push(piece);
    }
    while rest.get(le) != rest.get(re) {
        let leaf = if rest.get(le) > rest.get(re) { le } else { re };
        let piece = weighting_on(m, 2, &[(leaf, 2), (ue, 1), (lo, 1)]);
        rest = strip(graph, &rest, &piece, "B2 leaf balance")?;
        parts.push(piece);
    }
    // balanced: (2a, p, p, 2a) at level L
    let a = rest.get(le) / 2;
    let p = rest.get(ue);
    let level = rest.level();
    if p < a || level < a + p {
        return Err(Error::Invariant(format!("B2 balanced remainder {rest} out of range")));
    }
    parts.extend((0..a).map(|_| weighting_on(m, 2, &[(le, 2), (ue, 1), (lo, 1), (re, 2)])));
    parts.extend((0..p - a).map(|_| weighting_on(m, 1, &[(ue, 1), (lo, 1)])));
    parts.extend((0..level - a - p).map(|_| Weighting::zero_level(m, 1)));
    Factorization::new(w.clone(), parts, Method::B2).validated(graph)
}

/// Merges the level-1 parts pairwise so that every part has level 2.
fn pair_up_level_one(parts: Vec<Weighting>) -> Result<Vec<Weighting>> {
    let (mut ones, mut out): (Vec<Weighting>, Vec<Weighting>) =
        parts.into_iter().partition(|p| p.level() == 1);
    if ones.len() % 2 == 1 {
        return Err(Error::Invariant("odd number of level-1 parts at even level".into()));
    }
    ones.sort();
    for pair in ones.chunks(2) {
        out.push(pair[0].checked_add(&pair[1])?);
    }
    if out.iter().any(|p| p.level() != 2) {
        return Err(Error::Invariant("part of level above 2".into()));
    }
    Ok(out)
}

/// Output of the odd-level step on a loop chain.
#[derive(Clone, Debug)]
pub struct OddExtraction {
    pub loops: Vec<LoopGenerator>,
    /// Level-1 sum of the extracted loop generators (zero if none).
    pub unit: Weighting,
    /// `w - unit`, a member at level `L - 1`.
    pub rest: Weighting,
}

/// Odd level `2L + 1` on a chain: every gadget with a vertex whose incident
/// weights sum to `2(2L + 1)` gives up its loop generator.
pub fn extract_odd(graph: &MarkedGraph, w: &Weighting) -> Result<OddExtraction> {
    let chain = graph
        .loop_chain()
        .ok_or_else(|| Error::Unsupported(format!("{} is not a loop chain", graph.name())))?;
    extract_odd_on(graph, &chain, w)
}

fn extract_odd_on(graph: &MarkedGraph, chain: &LoopChain, w: &Weighting) -> Result<OddExtraction> {
    require_member(graph, w)?;
    if w.level() % 2 == 0 {
        return Err(Error::Structural(format!("{w} has even level")));
    }
    let m = graph.num_edges();
    let saturated = 2 * w.level();
    let vertex_sum = |v: usize| graph.slots(v).iter().map(|&e| w.get(e)).sum::<u32>();
    let loops: Vec<LoopGenerator> = chain
        .gadgets
        .iter()
        .enumerate()
        .filter(|(_, g)| g.vertices().into_iter().any(|v| vertex_sum(v) == saturated))
        .map(|(position, &gadget)| LoopGenerator { gadget, position })
        .collect();
    let entries: Vec<(usize, u32)> = loops
        .iter()
        .flat_map(|l| l.gadget.loop_edges())
        .map(|e| (e, 1))
        .collect();
    let unit = weighting_on(m, 1, &entries);
    let rest = strip(graph, w, &unit, "odd-level extraction")?;
    Ok(OddExtraction { loops, unit, rest })
}

/// Cuts the chain at its last horizontal edge: left is the shorter chain,
/// right is a `B₂` whose left leaf is the cut.
fn split_last_bigon(graph: &MarkedGraph, chain: &LoopChain) -> Result<SplitDescriptor> {
    let h = *chain
        .horizontals
        .last()
        .ok_or_else(|| Error::Invariant("chain without horizontals".into()))?;
    let Some(Gadget::Bigon { left, .. }) = chain.gadgets.last() else {
        return Err(Error::Invariant("last gadget is not a bigon".into()));
    };
    let outer = graph.edge(h).other(*left);
    split_with_left(graph, h, outer)
}

fn even_parts(graph: &MarkedGraph, chain: &LoopChain, w: &Weighting) -> Result<Vec<Weighting>> {
    if chain.genus() == 1 {
        return pair_up_level_one(factor_b1(graph, w)?.parts);
    }
    let split = split_last_bigon(graph, chain)?;
    let left_chain = split
        .left
        .loop_chain()
        .ok_or_else(|| Error::Invariant("left half of a chain is not a chain".into()))?;
    let alphas = even_parts(&split.left, &left_chain, &restrict(w, &split, Side::Left)?)?;
    let betas = pair_up_level_one(factor_b2(&split.right, &restrict(w, &split, Side::Right)?)?.parts)?;
    match_across(&split, alphas, betas)
}

/// Glues level-2 parts of the two halves whose cut-edge weights agree.
fn match_across(
    split: &SplitDescriptor,
    alphas: Vec<Weighting>,
    betas: Vec<Weighting>,
) -> Result<Vec<Weighting>> {
    let mut by_value: std::collections::BTreeMap<u32, Vec<Weighting>> = Default::default();
    for b in betas {
        by_value.entry(b.get(split.right_leaf)).or_default().push(b);
    }
    for list in by_value.values_mut() {
        list.reverse();
    }
    let mut out = Vec::with_capacity(alphas.len());
    for a in alphas {
        let v = a.get(split.left_leaf);
        let b = by_value
            .get_mut(&v)
            .and_then(Vec::pop)
            .ok_or_else(|| Error::Invariant(format!("no partner with cut weight {v}")))?;
        out.push(join(split, &a, &b)?);
    }
    if by_value.values().any(|l| !l.is_empty()) {
        return Err(Error::Invariant("unmatched parts across the cut".into()));
    }
    Ok(out)
}

/// Even level `2L` on a loop chain: exactly `L` parts of level 2.
pub fn factor_even(graph: &MarkedGraph, w: &Weighting) -> Result<Factorization> {
    let chain = graph
        .loop_chain()
        .ok_or_else(|| Error::Unsupported(format!("{} is not a loop chain", graph.name())))?;
    require_member(graph, w)?;
    if w.level() % 2 == 1 {
        return Err(Error::Structural(format!("{w} has odd level")));
    }
    let parts = even_parts(graph, &chain, w)?;
    Factorization::new(w.clone(), parts, Method::Even).validated(graph)
}

fn factor_chain(graph: &MarkedGraph, chain: &LoopChain, w: &Weighting) -> Result<Factorization> {
    if chain.genus() == 1 {
        return factor_b1(graph, w);
    }
    require_member(graph, w)?;
    if w.level() % 2 == 0 {
        let parts = even_parts(graph, chain, w)?;
        return Factorization::new(w.clone(), parts, Method::Even).validated(graph);
    }
    let odd = extract_odd_on(graph, chain, w)?;
    let mut parts = even_parts(graph, chain, &odd.rest)?;
    parts.push(odd.unit);
    Factorization::new(w.clone(), parts, Method::Odd).validated(graph)
}

/// A bridge with a loop chain on the left and a tree on the right.
fn chain_tree_split(graph: &MarkedGraph) -> Option<(SplitDescriptor, LoopChain)> {
    for e in graph.internal_bridges() {
        let Ok(split) = split_with_left(graph, e, graph.edge(e).ends[0]) else {
            continue;
        };
        let split = if split.left.is_tree() { split.swapped() } else { split };
        if !split.right.is_tree() {
            continue;
        }
        if let Some(chain) = split.left.loop_chain() {
            return Some((split, chain));
        }
    }
    None
}

/// A loop chain glued to a tree: factor both restrictions, pair the tree's
/// level-1 parts carrying weight 1 on the cut, and glue across.
pub fn factor_glued(graph: &MarkedGraph, w: &Weighting) -> Result<Factorization> {
    let (split, chain) = chain_tree_split(graph)
        .ok_or_else(|| Error::Unsupported(format!("{} is not a chain glued to a tree", graph.name())))?;
    require_member(graph, w)?;
    let loop_side = factor_chain(&split.left, &chain, &restrict(w, &split, Side::Left)?)?;
    let tree_side = factor_tree_degree1(&split.right, &restrict(w, &split, Side::Right)?)?;

    let (cut_l, cut_r) = (split.left_leaf, split.right_leaf);
    let mut carrying = Vec::new();
    let mut idle = Vec::new();
    for eta in tree_side.parts {
        match eta.get(cut_r) {
            1 => carrying.push(eta),
            0 => idle.push(eta),
            v => return Err(Error::Invariant(format!("tree part with cut weight {v}"))),
        }
    }
    let mut heavy = Vec::new();
    let mut light = Vec::new();
    for p in loop_side.parts {
        match (p.level(), p.get(cut_l)) {
            (2, 2) => heavy.push(p),
            (_, 0) => light.push(p),
            (l, v) => {
                return Err(Error::Invariant(format!(
                    "loop-side part at level {l} with cut weight {v}"
                )))
            }
        }
    }
    if carrying.len() != 2 * heavy.len() {
        return Err(Error::Invariant(format!(
            "{} tree parts carry the cut but {} loop parts need a pair each",
            carrying.len(),
            heavy.len()
        )));
    }
    let mut parts = Vec::new();
    for (beta, pair) in heavy.iter().zip(carrying.chunks(2)) {
        parts.push(join(&split, beta, &pair[0].checked_add(&pair[1])?)?);
    }
    let mut idle = idle.into_iter();
    for alpha in &light {
        let mut tree_piece = idle
            .next()
            .ok_or_else(|| Error::Invariant("ran out of idle tree parts".into()))?;
        if alpha.level() == 2 {
            let other = idle
                .next()
                .ok_or_else(|| Error::Invariant("ran out of idle tree parts".into()))?;
            tree_piece = tree_piece.checked_add(&other)?;
        }
        parts.push(join(&split, alpha, &tree_piece)?);
    }
    if idle.next().is_some() {
        return Err(Error::Invariant("idle tree parts left over".into()));
    }
    Factorization::new(w.clone(), parts, Method::Glued).validated(graph)
}

/// Loop chain closed off by a second self-loop (`Γ(g, 0)`), with the cut
/// separating the terminal self-loop.
struct Capped {
    split: SplitDescriptor,
    loop_edge: usize,
}

fn capped_chain(graph: &MarkedGraph) -> Option<Capped> {
    if !graph.leaves().is_empty() {
        return None;
    }
    let loops: Vec<usize> = graph
        .edges()
        .iter()
        .rev()
        .filter(|e| e.is_loop())
        .map(|e| e.id)
        .collect();
    for loop_edge in loops {
        let t = graph.edge(loop_edge).ends[0];
        let &h = graph.slots(t).iter().find(|&&e| e != loop_edge)?;
        let outer = graph.edge(h).other(t);
        let Ok(split) = split_with_left(graph, h, outer) else {
            continue;
        };
        if split.left.loop_chain().is_some() && b1_edges(&split.right).is_some() {
            return Some(Capped { split, loop_edge });
        }
    }
    None
}

/// `Γ(g, 0)`: replace the terminal self-loop (weight `l`) by a bigon
/// `(l, l)` with a zero leaf, factor on the resulting chain, and map back.
pub fn factor_capped(graph: &MarkedGraph, w: &Weighting) -> Result<Factorization> {
    let Capped { split, loop_edge } = capped_chain(graph)
        .ok_or_else(|| Error::Unsupported(format!("{} is not a capped chain", graph.name())))?;
    require_member(graph, w)?;
    let b2 = build_b2();
    let layout = b2.b2_layout().expect("B2 layout");
    let opened = glue(&split.left, split.left_leaf, &b2, layout.left_leaf)?;
    let chain = opened
        .graph
        .loop_chain()
        .ok_or_else(|| Error::Invariant("opened capped chain is not a chain".into()))?;

    let l = w.get(loop_edge);
    let h = w.get(split.shared_edge);
    let left_w = restrict(w, &split, Side::Left)?;
    let bigon = weighting_on(4, w.level(), &[(layout.left_leaf, h), (layout.upper, l), (layout.lower, l)]);
    let lifted = glue_weightings(&opened, &left_w, &bigon)?;
    let opened_f = factor_chain(&opened.graph, &chain, &lifted)?;

    let right_loop = split
        .right_edges
        .iter()
        .position(|&e| e == loop_edge)
        .expect("loop edge on the capped side");
    let mut parts = Vec::new();
    for p in &opened_f.parts {
        let x = p.get(opened.right_edges[layout.upper]);
        let y = p.get(opened.right_edges[layout.lower]);
        if x != y || p.get(opened.right_edges[layout.right_leaf]) != 0 {
            return Err(Error::Invariant(format!("part {p} does not close up")));
        }
        let left_part = Weighting::new(
            opened.left_edges.iter().map(|&e| p.get(e)).collect(),
            p.level(),
        );
        let cut = p.get(opened.edge);
        let right_part = weighting_on(
            split.right_edges.len(),
            p.level(),
            &[(right_loop, x), (split.right_leaf, cut)],
        );
        parts.push(join(&split, &left_part, &right_part)?);
    }
    Factorization::new(w.clone(), parts, Method::Capped).validated(graph)
}

/// Which constructive procedure applies to a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Tree,
    B1,
    B2,
    Chain,
    Glued,
    Capped,
    Other,
}

pub fn classify(graph: &MarkedGraph) -> Shape {
    if graph.is_tree() {
        Shape::Tree
    } else if graph.b2_layout().is_some() {
        Shape::B2
    } else if let Some(chain) = graph.loop_chain() {
        if chain.genus() == 1 {
            Shape::B1
        } else {
            Shape::Chain
        }
    } else if capped_chain(graph).is_some() {
        Shape::Capped
    } else if chain_tree_split(graph).is_some() {
        Shape::Glued
    } else {
        Shape::Other
    }
}

/// Dispatches to the constructive procedure for the graph's shape.
pub fn factor_full(graph: &MarkedGraph, w: &Weighting) -> Result<Factorization> {
    match classify(graph) {
        Shape::Tree => factor_tree_degree1(graph, w),
        Shape::B1 => factor_b1(graph, w),
        Shape::B2 => factor_b2(graph, w),
        Shape::Chain => {
            let chain = graph.loop_chain().expect("classified as chain");
            factor_chain(graph, &chain, w)
        }
        Shape::Capped => factor_capped(graph, w),
        Shape::Glued => factor_glued(graph, w),
        Shape::Other => Err(Error::Unsupported(graph.name().to_string())),
    }
}

/// Exhaustive search over `gens`; `Ok(None)` means no factorization with at
/// most `max_parts` parts exists. Budget exhaustion is an error.
pub fn factor_search(
    graph: &MarkedGraph,
    w: &Weighting,
    gens: &[Weighting],
    max_parts: usize,
    budget: u64,
) -> Result<Option<Factorization>> {
    require_member(graph, w)?;
    let idx = GeneratorIndex::new(graph, gens)?;
    factor_search_indexed(graph, &idx, w, max_parts, budget)
}

pub fn factor_search_indexed(
    graph: &MarkedGraph,
    idx: &GeneratorIndex<'_>,
    w: &Weighting,
    max_parts: usize,
    budget: u64,
) -> Result<Option<Factorization>> {
    let Some(picked) = idx.find_one(w, max_parts, budget)? else {
        return Ok(None);
    };
    let parts = picked.iter().map(|&i| idx.gens()[i].clone()).collect();
    Factorization::new(w.clone(), parts, Method::Search)
        .validated(graph)
        .map(Some)
}

#[cfg(test)]
mod tests;
