//! Binomial relations among generators and their connectivity.
//!
//! A Markov move swaps one multiset of generators for another with the same
//! edge-wise sum and level. Relations are generated in degree at most `d`
//! exactly when, for every element, the graph on its factorizations whose
//! edges are moves of degree at most `d` is connected. Two factorizations are
//! one move apart iff what they do not share has degree at most `d`, so the
//! check is a union-find over each fully enumerated fiber.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::enumerate_level;
use crate::error::{Error, Result};
use crate::factorize::{factor_full, factor_search_indexed, GeneratorIndex};
use crate::graph::{build_b2, split_with_left, MarkedGraph};
use crate::weighting::{b2_untransform, join, member_unchecked, restrict, B2Coords, Side, Weighting};

/// Sorted multiset of generators.
pub type Multiset = Vec<Weighting>;

fn degree(m: &[Weighting]) -> u32 {
    m.iter().map(Weighting::level).sum()
}

/// Parts of `a` not matched in `b`, and vice versa (both sorted).
fn difference(a: &[Weighting], b: &[Weighting]) -> (Multiset, Multiset) {
    let (mut i, mut j) = (0, 0);
    let (mut only_a, mut only_b) = (Vec::new(), Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => {
                only_a.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                only_b.push(b[j].clone());
                j += 1;
            }
        }
    }
    only_a.extend_from_slice(&a[i..]);
    only_b.extend_from_slice(&b[j..]);
    (only_a, only_b)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkovMove {
    pub lhs: Multiset,
    pub rhs: Multiset,
}

impl MarkovMove {
    /// Sorts both sides and orders them so that `lhs < rhs`.
    pub fn new(mut lhs: Multiset, mut rhs: Multiset) -> Result<Self> {
        lhs.sort();
        rhs.sort();
        if lhs == rhs {
            return Err(Error::Invariant("move with identical sides".into()));
        }
        if Weighting::sum(&lhs)? != Weighting::sum(&rhs)? {
            return Err(Error::Invariant("move sides have different sums".into()));
        }
        if lhs > rhs {
            std::mem::swap(&mut lhs, &mut rhs);
        }
        Ok(MarkovMove { lhs, rhs })
    }

    pub fn degree(&self) -> u32 {
        degree(&self.lhs)
    }

    pub fn sum(&self) -> Weighting {
        Weighting::sum(&self.lhs).expect("checked at construction")
    }

    /// Replaces one side of the move inside `f` by the other, if `f`
    /// contains either side.
    pub fn apply(&self, f: &[Weighting]) -> Option<Multiset> {
        for (from, to) in [(&self.lhs, &self.rhs), (&self.rhs, &self.lhs)] {
            let (rest, missing) = difference(f, from);
            if missing.is_empty() {
                let mut out = rest;
                out.extend(to.iter().cloned());
                out.sort();
                return Some(out);
            }
        }
        None
    }
}

impl std::fmt::Display for MarkovMove {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let side = |m: &[Weighting]| {
            m.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
        };
        write!(f, "{} <-> {}", side(&self.lhs), side(&self.rhs))
    }
}

fn sorted_gens(gens: &[Weighting]) -> Vec<Weighting> {
    let mut g = gens.to_vec();
    g.sort();
    g.dedup();
    g
}

/// Every multiset of `gens` summing to `w`, each sorted, in lexicographic
/// order of generator indices.
pub fn all_factorizations(
    graph: &MarkedGraph,
    w: &Weighting,
    gens: &[Weighting],
    budget: u64,
) -> Result<Vec<Multiset>> {
    let gens = sorted_gens(gens);
    let idx = GeneratorIndex::new(graph, &gens)?;
    fiber(&idx, w, budget)
}

fn fiber(idx: &GeneratorIndex<'_>, w: &Weighting, budget: u64) -> Result<Vec<Multiset>> {
    Ok(idx
        .find_all(w, w.level() as usize, budget)?
        .into_iter()
        .map(|f| f.into_iter().map(|i| idx.gens()[i].clone()).collect())
        .collect())
}

/// Moves of degree `2..=max_degree` whose sides share no generator, one per
/// unordered pair of factorizations of each element.
pub fn find_binomial_relations(
    graph: &MarkedGraph,
    gens: &[Weighting],
    max_degree: u32,
    budget: u64,
) -> Result<Vec<MarkovMove>> {
    let gens = sorted_gens(gens);
    let idx = GeneratorIndex::new(graph, &gens)?;
    let mut moves = Vec::new();
    for level in 2..=max_degree {
        for w in enumerate_level(graph, level)? {
            let fs = fiber(&idx, &w, budget)?;
            for (i, a) in fs.iter().enumerate() {
                for b in &fs[i + 1..] {
                    let (only_a, _) = difference(a, b);
                    if only_a.len() == a.len() {
                        moves.push(MarkovMove::new(a.clone(), b.clone())?);
                    }
                }
            }
        }
    }
    moves.sort();
    Ok(moves)
}

/// Classes of a fiber under moves of bounded degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub factorizations: usize,
    /// Indices into the fiber, one list per class, each sorted.
    pub classes: Vec<Vec<usize>>,
}

impl Connectivity {
    pub fn connected(&self) -> bool {
        self.classes.len() <= 1
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

pub fn move_connected(fiber: &[Multiset], move_bound: u32) -> Connectivity {
    let n = fiber.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let (only_i, _) = difference(&fiber[i], &fiber[j]);
            if degree(&only_i) <= move_bound {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(i);
    }
    Connectivity {
        factorizations: n,
        classes: classes.into_values().collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Budget,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationElement {
    pub target: String,
    pub status: Status,
    /// Parts found by exhaustive search, if any.
    pub search_parts: Option<usize>,
    /// Method used by the constructive factorizer, if it succeeded.
    pub constructive: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationReport {
    pub graph: String,
    pub graph_hash: String,
    pub lmax: u32,
    pub generators: usize,
    pub generator_max_level: u32,
    pub elements: Vec<GenerationElement>,
}

fn summary_csv(rows: impl Iterator<Item = (u32, Status)>) -> String {
    let mut by_level: BTreeMap<u32, [usize; 3]> = BTreeMap::new();
    for (level, status) in rows {
        let slot = by_level.entry(level).or_default();
        slot[status as usize] += 1;
    }
    let mut out = String::from("level,elements,pass,fail,budget\n");
    for (level, [p, f, b]) in by_level {
        out.push_str(&format!("{level},{},{p},{f},{b}\n", p + f + b));
    }
    out
}

fn level_of(target: &str) -> u32 {
    target
        .rsplit('@')
        .next()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

impl GenerationReport {
    pub fn count(&self, status: Status) -> usize {
        self.elements.iter().filter(|e| e.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Pass) == self.elements.len()
    }

    /// Elements where exactly one of search and construction succeeded.
    pub fn disagreements(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| e.status != Status::Budget)
            .filter(|e| e.search_parts.is_some() != e.constructive.is_some())
            .count()
    }

    pub fn to_csv(&self) -> String {
        summary_csv(self.elements.iter().map(|e| (level_of(&e.target), e.status)))
    }
}

/// For every member up to `lmax`: exhaustive search over `gens` must find a
/// factorization, and the constructive factorizer must return a validated
/// one whose parts have level at most the largest generator level.
pub fn verify_generation(
    graph: &MarkedGraph,
    lmax: u32,
    gens: &[Weighting],
    budget: u64,
) -> Result<GenerationReport> {
    let gens = sorted_gens(gens);
    let idx = GeneratorIndex::new(graph, &gens)?;
    let top = gens.iter().map(Weighting::level).max().unwrap_or(0);
    let mut elements = Vec::new();
    for level in 1..=lmax {
        let points = enumerate_level(graph, level)?;
        let mut rows: Vec<GenerationElement> = points
            .par_iter()
            .map(|w| {
                let mut detail = None;
                let mut budget_hit = false;
                let search_parts = match factor_search_indexed(graph, &idx, w, level as usize, budget)
                {
                    Ok(Some(f)) => Some(f.parts.len()),
                    Ok(None) => None,
                    Err(Error::BudgetExhausted { .. }) => {
                        budget_hit = true;
                        None
                    }
                    Err(e) => {
                        detail = Some(format!("search: {e}"));
                        None
                    }
                };
                let constructive = match factor_full(graph, w) {
                    Ok(f) if f.max_part_level() <= top => Some(f.method.to_string()),
                    Ok(f) => {
                        detail = Some(format!("constructive part of level {}", f.max_part_level()));
                        None
                    }
                    Err(e) => {
                        detail.get_or_insert(format!("constructive: {e}"));
                        None
                    }
                };
                let status = if budget_hit {
                    Status::Budget
                } else if search_parts.is_some() && constructive.is_some() {
                    Status::Pass
                } else {
                    Status::Fail
                };
                GenerationElement {
                    target: w.to_string(),
                    status,
                    search_parts,
                    constructive,
                    detail,
                }
            })
            .collect();
        elements.append(&mut rows);
    }
    Ok(GenerationReport {
        graph: graph.name().to_string(),
        graph_hash: graph.content_hash(),
        lmax,
        generators: gens.len(),
        generator_max_level: top,
        elements,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationElement {
    pub target: String,
    pub status: Status,
    pub factorizations: usize,
    pub classes: usize,
    /// One representative per class when the fiber is disconnected.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub counterexample: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub graph: String,
    pub graph_hash: String,
    pub dmax: u32,
    pub move_bound: u32,
    pub generators: usize,
    pub elements: Vec<RelationElement>,
}

impl RelationReport {
    pub fn count(&self, status: Status) -> usize {
        self.elements.iter().filter(|e| e.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Pass) == self.elements.len()
    }

    pub fn disconnected(&self) -> usize {
        self.elements.iter().filter(|e| e.classes > 1).count()
    }

    pub fn max_fiber(&self) -> usize {
        self.elements.iter().map(|e| e.factorizations).max().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        summary_csv(self.elements.iter().map(|e| (level_of(&e.target), e.status)))
    }
}

fn show(m: &[Weighting]) -> String {
    m.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
}

/// For every member of level at most `dmax`, its fiber over `gens` must be
/// nonempty and connected by moves of degree at most `move_bound`.
pub fn verify_relation_degree(
    graph: &MarkedGraph,
    dmax: u32,
    move_bound: u32,
    gens: &[Weighting],
    budget: u64,
) -> Result<RelationReport> {
    let gens = sorted_gens(gens);
    let idx = GeneratorIndex::new(graph, &gens)?;
    let mut elements = Vec::new();
    for level in 1..=dmax {
        let points = enumerate_level(graph, level)?;
        let mut rows: Vec<RelationElement> = points
            .par_iter()
            .map(|w| match fiber(&idx, w, budget) {
                Ok(fs) => {
                    let c = move_connected(&fs, move_bound);
                    let status = if !fs.is_empty() && c.connected() {
                        Status::Pass
                    } else {
                        Status::Fail
                    };
                    let counterexample = if c.connected() {
                        Vec::new()
                    } else {
                        c.classes.iter().map(|cl| show(&fs[cl[0]])).collect()
                    };
                    RelationElement {
                        target: w.to_string(),
                        status,
                        factorizations: fs.len(),
                        classes: c.classes.len(),
                        counterexample,
                    }
                }
                Err(_) => RelationElement {
                    target: w.to_string(),
                    status: Status::Budget,
                    factorizations: 0,
                    classes: 0,
                    counterexample: Vec::new(),
                },
            })
            .collect();
        elements.append(&mut rows);
    }
    Ok(RelationReport {
        graph: graph.name().to_string(),
        graph_hash: graph.content_hash(),
        dmax,
        move_bound,
        generators: gens.len(),
        elements,
    })
}

/// Half the weight on a shared edge, and the level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FiberProfile {
    pub half: u32,
    pub level: u32,
}

impl FiberProfile {
    /// Unique expression `half·(1, 2) + (level - 2·half)·(0, 1)`, as the two
    /// coefficients.
    pub fn normal_form(&self) -> (u32, u32) {
        (self.half, self.level - 2 * self.half)
    }
}

pub fn fiber_profile(w: &Weighting, shared_edge: usize) -> Result<FiberProfile> {
    if shared_edge >= w.len() {
        return Err(Error::BadEdge {
            edge: shared_edge,
            reason: "no such edge in the weighting",
        });
    }
    let x = w.get(shared_edge);
    if x % 2 == 1 {
        return Err(Error::Structural(format!("{w} is odd on edge {shared_edge}")));
    }
    let p = FiberProfile {
        half: x / 2,
        level: w.level(),
    };
    if 2 * p.half > p.level {
        return Err(Error::Invariant(format!("profile ({}, {}) has 2n > L", p.half, p.level)));
    }
    Ok(p)
}

/// Both sides of the move, written in the profile semigroup's generators,
/// give the same multiset; when every part has the same level the raw
/// profile multisets agree as well.
pub fn move_preserves_profiles(m: &MarkovMove, shared_edge: usize) -> Result<bool> {
    let normal = |side: &[Weighting]| -> Result<(u32, u32)> {
        let mut acc = (0, 0);
        for p in side {
            let (a, b) = fiber_profile(p, shared_edge)?.normal_form();
            acc = (acc.0 + a, acc.1 + b);
        }
        Ok(acc)
    };
    if normal(&m.lhs)? != normal(&m.rhs)? {
        return Ok(false);
    }
    let levels: Vec<u32> = m.lhs.iter().chain(&m.rhs).map(Weighting::level).collect();
    if levels.windows(2).all(|w| w[0] == w[1]) {
        let raw = |side: &[Weighting]| -> Result<Vec<FiberProfile>> {
            let mut v = side
                .iter()
                .map(|p| fiber_profile(p, shared_edge))
                .collect::<Result<Vec<_>>>()?;
            v.sort();
            Ok(v)
        };
        return Ok(raw(&m.lhs)? == raw(&m.rhs)?);
    }
    Ok(true)
}

/// Edges on which every generator is even; profiles are defined there.
pub fn even_edges_of(gens: &[Weighting]) -> Vec<usize> {
    let m = gens.first().map_or(0, Weighting::len);
    (0..m)
        .filter(|&e| gens.iter().all(|g| g.get(e) % 2 == 0))
        .collect()
}

/// The `B₂` move `[0001][1000] = [0000][1001]` in original coordinates.
pub fn b2_binomial() -> Result<MarkovMove> {
    let g = build_b2();
    let at = |c: [i64; 4]| b2_untransform(&g, B2Coords(c), 2);
    MarkovMove::new(
        vec![at([0, 0, 0, 1])?, at([1, 0, 0, 0])?],
        vec![at([0, 0, 0, 0])?, at([1, 0, 0, 1])?],
    )
}

/// Outcome of lifting moves from one half of a split to the whole graph.
#[derive(Clone, Debug, Default, Serialize)]
pub struct LiftReport {
    pub moves: usize,
    pub lifts: usize,
    pub failures: Vec<String>,
}

/// For every move on the left half and every assignment of right-half
/// generators to its parts that agrees on the cut, reglues both sides and
/// checks the result is a move of the whole graph. Right-half parts follow
/// the cut value, so a part on the other side of the move with the same cut
/// value reuses the same right-half generator.
pub fn lift_moves(
    graph: &MarkedGraph,
    cut: usize,
    left_vertex: usize,
    moves: &[MarkovMove],
    right_gens: &[Weighting],
) -> Result<LiftReport> {
    let split = split_with_left(graph, cut, left_vertex)?;
    let mut report = LiftReport {
        moves: moves.len(),
        ..Default::default()
    };
    for m in moves {
        let cuts = |side: &[Weighting]| {
            let mut v: Vec<u32> = side.iter().map(|p| p.get(split.left_leaf)).collect();
            v.sort();
            v
        };
        if cuts(&m.lhs) != cuts(&m.rhs) {
            report.failures.push(format!("{m}: cut values differ"));
            continue;
        }
        let options: Vec<Vec<&Weighting>> = m
            .lhs
            .iter()
            .map(|p| {
                right_gens
                    .iter()
                    .filter(|r| r.level() == p.level() && r.get(split.right_leaf) == p.get(split.left_leaf))
                    .collect()
            })
            .collect();
        let mut choice = vec![0usize; options.len()];
        if options.iter().any(Vec::is_empty) {
            continue;
        }
        loop {
            let picked: Vec<&Weighting> = choice.iter().zip(&options).map(|(&i, o)| o[i]).collect();
            report.lifts += 1;
            if let Err(e) = lift_one(graph, &split, m, &picked) {
                report.failures.push(format!("{m}: {e}"));
            }
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < options[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    Ok(report)
}

fn lift_one(
    graph: &MarkedGraph,
    split: &crate::graph::SplitDescriptor,
    m: &MarkovMove,
    right: &[&Weighting],
) -> Result<()> {
    let lhs: Multiset = m
        .lhs
        .iter()
        .zip(right)
        .map(|(l, r)| join(split, l, r))
        .collect::<Result<_>>()?;
    // pair each rhs part with an unused right part carrying the same cut
    // value and level
    let mut pool: Vec<Option<&Weighting>> = right.iter().copied().map(Some).collect();
    let mut rhs = Vec::new();
    for l in &m.rhs {
        let slot = pool
            .iter_mut()
            .find(|r| {
                r.is_some_and(|r| {
                    r.get(split.right_leaf) == l.get(split.left_leaf) && r.level() == l.level()
                })
            })
            .ok_or_else(|| Error::Invariant("no right part for the other side".into()))?;
        rhs.push(join(split, l, slot.take().expect("checked"))?);
    }
    for p in lhs.iter().chain(&rhs) {
        if !member_unchecked(graph, p) {
            return Err(Error::Invariant(format!("{p} is not a member")));
        }
    }
    let lifted = MarkovMove::new(lhs, rhs)?;
    for p in lifted.lhs.iter().chain(&lifted.rhs) {
        let back = restrict(p, split, Side::Left)?;
        if !member_unchecked(&split.left, &back) {
            return Err(Error::Invariant(format!("{back} does not restrict to a member")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::generators;
    use crate::graph::{build_b1, build_gamma};

    fn w(v: &[u32], level: u32) -> Weighting {
        Weighting::new(v.to_vec(), level)
    }

    #[test]
    fn b2_fiber_contains_both_sides() {
        let g = build_b2();
        let gens = generators(&g).unwrap().all();
        let fs = all_factorizations(&g, &w(&[2, 2, 2, 2], 4), &gens, 1_000_000).unwrap();
        let m = b2_binomial().unwrap();
        assert!(fs.contains(&m.lhs));
        assert!(fs.contains(&m.rhs));
    }

    #[test]
    fn zero_at_level_two() {
        let g = build_b2();
        let gens = generators(&g).unwrap().all();
        let fs = all_factorizations(&g, &Weighting::zero_level(4, 2), &gens, 1000).unwrap();
        assert_eq!(
            fs,
            vec![
                vec![Weighting::zero_level(4, 1), Weighting::zero_level(4, 1)],
                vec![Weighting::zero_level(4, 2)],
            ]
        );
    }

    #[test]
    fn b1_is_free() {
        let g = build_b1();
        let gens = generators(&g).unwrap().minimal();
        assert_eq!(gens.len(), 3);
        assert!(find_binomial_relations(&g, &gens, 4, 100_000).unwrap().is_empty());
        for level in 1..=6 {
            for p in enumerate_level(&g, level).unwrap() {
                assert_eq!(all_factorizations(&g, &p, &gens, 100_000).unwrap().len(), 1);
            }
        }
    }

    #[test]
    fn singleton_set_has_no_moves() {
        let g = build_b2();
        let gens = vec![w(&[0, 1, 1, 0], 1)];
        assert!(find_binomial_relations(&g, &gens, 4, 1000).unwrap().is_empty());
    }

    #[test]
    fn binomial_found_among_moves() {
        let g = build_b2();
        let gens = generators(&g).unwrap().all();
        let moves = find_binomial_relations(&g, &gens, 4, 1_000_000).unwrap();
        assert!(moves.contains(&b2_binomial().unwrap()));
    }

    #[test]
    fn degree_one_moves_disconnect() {
        let g = build_b2();
        let gens = generators(&g).unwrap().all();
        let target = w(&[2, 2, 2, 2], 4);
        let fs = all_factorizations(&g, &target, &gens, 1_000_000).unwrap();
        let m = b2_binomial().unwrap();
        let pair = vec![m.lhs.clone(), m.rhs.clone()];
        assert_eq!(move_connected(&pair, 1).classes.len(), 2);
        assert!(move_connected(&pair, 4).connected());
        assert!(move_connected(&fs, 4).connected());
    }

    #[test]
    fn profiles() {
        assert_eq!(
            fiber_profile(&w(&[0, 1, 1, 0], 1), 0).unwrap(),
            FiberProfile { half: 0, level: 1 }
        );
        assert_eq!(
            fiber_profile(&w(&[2, 2, 0, 2], 2), 0).unwrap(),
            FiberProfile { half: 1, level: 2 }
        );
        assert!(fiber_profile(&w(&[0, 1, 1, 0], 1), 1).is_err());
        // (n, L) = n (1, 2) + (L - 2n) (0, 1)
        for level in 0..8 {
            for half in 0..=level / 2 {
                let (a, b) = FiberProfile { half, level }.normal_form();
                assert_eq!((a, 2 * a + b), (half, level));
            }
        }
    }

    #[test]
    fn b2_relations_to_degree_six() {
        let g = build_b2();
        let gens = generators(&g).unwrap().minimal();
        let r = verify_relation_degree(&g, 6, 4, &gens, 10_000_000).unwrap();
        assert!(r.passed(), "{}", r.to_csv());
    }

    #[test]
    fn move_application() {
        let m = b2_binomial().unwrap();
        let mut f = m.lhs.clone();
        f.push(w(&[0, 0, 0, 0], 1));
        f.sort();
        let g = m.apply(&f).unwrap();
        assert_eq!(Weighting::sum(&g).unwrap(), Weighting::sum(&f).unwrap());
        assert!(m.apply(&[w(&[0, 0, 0, 0], 1)]).is_none());
    }

    #[test]
    fn lifting_from_b1_into_genus_two() {
        let g = build_gamma(2, 1).unwrap();
        let chain = g.loop_chain().unwrap();
        let h = chain.horizontals[0];
        let split = split_with_left(&g, h, 0).unwrap();
        let left_gens = enumerate_level(&split.left, 2).unwrap();
        let moves = find_binomial_relations(&split.left, &left_gens, 4, 100_000).unwrap();
        assert!(!moves.is_empty());
        let right_gens = enumerate_level(&split.right, 2).unwrap();
        let r = lift_moves(&g, h, 0, &moves, &right_gens).unwrap();
        assert!(r.lifts > 0);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
    }
}
