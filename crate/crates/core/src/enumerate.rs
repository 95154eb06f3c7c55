//! Lattice points of `P_G(L)`, Hilbert tables, generator sets.
//!
//! Enumeration assigns edges depth-first in a fixed elimination order
//! (internal edges breadth-first, leaf edges last). Each candidate range is
//! cut down by the vertex conditions at the edge's endpoints; when an edge is
//! the last unassigned slot of a vertex its range is exact, parity included,
//! so every completed assignment is a member without a final check.

use std::collections::VecDeque;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MarkedGraph;
use crate::weighting::{member_unchecked, Weighting};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    /// Maximum number of search nodes (edge assignments) before giving up.
    pub budget: u64,
    pub parallel: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            budget: DEFAULT_BUDGET,
            parallel: true,
        }
    }
}

/// Internal edges in breadth-first discovery order, then leaves by id.
pub fn elimination_order(graph: &MarkedGraph) -> Vec<usize> {
    let mut order = Vec::with_capacity(graph.num_edges());
    let mut taken = vec![false; graph.num_edges()];
    let mut seen = vec![false; graph.num_vertices()];
    for start in graph.internal_vertices() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &e in graph.slots(v) {
                if graph.is_leaf(e) || taken[e] {
                    continue;
                }
                taken[e] = true;
                order.push(e);
                let u = graph.edge(e).other(v);
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    let mut leaves: Vec<usize> = graph.leaves().to_vec();
    leaves.sort_unstable();
    order.extend(leaves);
    order
}

struct Enumerator<'g> {
    graph: &'g MarkedGraph,
    order: Vec<usize>,
    level: u32,
    budget: u64,
    nodes: &'g AtomicU64,
}

const UNSET: u32 = u32::MAX;

impl Enumerator<'_> {
    /// Feasible `(lo, hi, step)` for edge `e` given the current assignment.
    fn range(&self, e: usize, w: &[u32]) -> Option<(u32, u32, u32)> {
        let l = self.level;
        let (mut lo, mut hi, mut parity) = (0u32, l, None::<u32>);
        let edge = self.graph.edge(e);
        let ends: &[usize] = if edge.is_loop() {
            &edge.ends[..1]
        } else {
            &edge.ends[..]
        };
        for &v in ends {
            if !self.graph.is_internal(v) {
                continue;
            }
            let others: Vec<usize> = {
                let mut s = self.graph.slots(v).to_vec();
                let pos = s.iter().position(|&x| x == e).expect("incident");
                s.remove(pos);
                s
            };
            if edge.is_loop() {
                // slots: e, e, h
                let h = others.iter().copied().find(|&x| x != e).expect("third slot");
                if w[h] != UNSET {
                    let h = w[h];
                    if h % 2 == 1 || h > 2 * l {
                        return None;
                    }
                    lo = lo.max(h.div_ceil(2));
                    hi = hi.min((2 * l - h) / 2);
                }
                continue;
            }
            let (a, b) = (w[others[0]], w[others[1]]);
            if a != UNSET && b != UNSET {
                if a + b > 2 * l {
                    return None;
                }
                lo = lo.max(a.abs_diff(b));
                hi = hi.min((a + b).min(2 * l - a - b));
                let p = (a + b) % 2;
                match parity {
                    Some(q) if q != p => return None,
                    _ => parity = Some(p),
                }
            }
        }
        if self.graph.is_even_edge(e) {
            match parity {
                Some(1) => return None,
                _ => parity = Some(0),
            }
        }
        if lo > hi {
            return None;
        }
        match parity {
            None => Some((lo, hi, 1)),
            Some(p) => {
                let lo = if lo % 2 == p { lo } else { lo + 1 };
                (lo <= hi).then_some((lo, hi, 2))
            }
        }
    }

    fn tick(&self) -> Result<()> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.budget {
            return Err(Error::BudgetExhausted {
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn dfs(&self, depth: usize, w: &mut Vec<u32>, out: &mut Sink) -> Result<()> {
        if depth == self.order.len() {
            out.push(w, self.level);
            return Ok(());
        }
        let e = self.order[depth];
        let Some((lo, hi, step)) = self.range(e, w) else {
            return Ok(());
        };
        let mut x = lo;
        while x <= hi {
            self.tick()?;
            w[e] = x;
            self.dfs(depth + 1, w, out)?;
            x += step;
        }
        w[e] = UNSET;
        Ok(())
    }
}

enum Sink {
    Count(u64),
    Collect(Vec<Weighting>),
}

impl Sink {
    fn push(&mut self, w: &[u32], level: u32) {
        match self {
            Sink::Count(n) => *n += 1,
            Sink::Collect(v) => v.push(Weighting::new(w.to_vec(), level)),
        }
    }
}

fn run(graph: &MarkedGraph, level: u32, opts: &EnumOptions, collect: bool) -> Result<Sink> {
    let nodes = AtomicU64::new(0);
    let en = Enumerator {
        graph,
        order: elimination_order(graph),
        level,
        budget: opts.budget,
        nodes: &nodes,
    };
    let fresh = || {
        if collect {
            Sink::Collect(Vec::new())
        } else {
            Sink::Count(0)
        }
    };
    let blank = vec![UNSET; graph.num_edges()];
    let first = en.order[0];
    let Some((lo, hi, step)) = en.range(first, &blank) else {
        return Ok(fresh());
    };
    let firsts: Vec<u32> = (lo..=hi).step_by(step as usize).collect();
    let branch = |x: u32| -> Result<Sink> {
        en.tick()?;
        let mut w = blank.clone();
        w[first] = x;
        let mut sink = fresh();
        en.dfs(1, &mut w, &mut sink)?;
        Ok(sink)
    };
    let parts: Vec<Sink> = if opts.parallel {
        firsts.par_iter().map(|&x| branch(x)).collect::<Result<_>>()?
    } else {
        firsts.iter().map(|&x| branch(x)).collect::<Result<_>>()?
    };
    let mut merged = fresh();
    for p in parts {
        match (&mut merged, p) {
            (Sink::Count(a), Sink::Count(b)) => *a += b,
            (Sink::Collect(a), Sink::Collect(b)) => a.extend(b),
            _ => unreachable!(),
        }
    }
    if let Sink::Collect(v) = &mut merged {
        v.sort_unstable();
    }
    Ok(merged)
}

/// All members of `P_G(level)`, sorted lexicographically by edge id.
pub fn enumerate_level(graph: &MarkedGraph, level: u32) -> Result<Vec<Weighting>> {
    enumerate_level_with(graph, level, &EnumOptions::default())
}

pub fn enumerate_level_with(
    graph: &MarkedGraph,
    level: u32,
    opts: &EnumOptions,
) -> Result<Vec<Weighting>> {
    match run(graph, level, opts, true)? {
        Sink::Collect(v) => Ok(v),
        Sink::Count(_) => unreachable!(),
    }
}

pub fn count_level_with(graph: &MarkedGraph, level: u32, opts: &EnumOptions) -> Result<u64> {
    match run(graph, level, opts, false)? {
        Sink::Count(n) => Ok(n),
        Sink::Collect(_) => unreachable!(),
    }
}

/// Members at every level `0..=lmax`, indexed by level.
pub fn enumerate_up_to(graph: &MarkedGraph, lmax: u32) -> Result<Vec<Vec<Weighting>>> {
    (0..=lmax).map(|l| enumerate_level(graph, l)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertTable {
    pub graph_name: String,
    pub graph_hash: String,
    /// `(level, count)` for each level from zero.
    pub rows: Vec<(u32, u64)>,
    /// Seconds since the epoch when the table was assembled.
    pub timestamp: u64,
    pub budget: u64,
}

impl HilbertTable {
    pub fn count(&self, level: u32) -> Option<u64> {
        self.rows.iter().find(|r| r.0 == level).map(|r| r.1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,count\n");
        for (l, c) in &self.rows {
            out.push_str(&format!("{l},{c}\n"));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    graph_hash: String,
    level: u32,
    count: u64,
}

/// Cache directory from `CBLOCKS_CACHE`, if set.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os("CBLOCKS_CACHE").map(PathBuf::from)
}

fn cache_path(dir: &Path, hash: &str, level: u32) -> PathBuf {
    dir.join(format!("{hash}_L{level}.json"))
}

/// `|P_G(L)|` for `0 <= L <= lmax`, reading and writing per-level cache
/// files under `cache` when given.
pub fn hilbert(
    graph: &MarkedGraph,
    lmax: u32,
    cache: Option<&Path>,
    opts: &EnumOptions,
) -> Result<HilbertTable> {
    let hash = graph.content_hash();
    if let Some(dir) = cache {
        fs::create_dir_all(dir)?;
    }
    let mut rows = Vec::new();
    for level in 0..=lmax {
        let cached = cache.and_then(|dir| {
            let text = fs::read_to_string(cache_path(dir, &hash, level)).ok()?;
            let entry: CacheEntry = serde_json::from_str(&text).ok()?;
            (entry.graph_hash == hash && entry.level == level).then_some(entry.count)
        });
        let count = match cached {
            Some(c) => c,
            None => {
                let c = count_level_with(graph, level, opts)?;
                if let Some(dir) = cache {
                    let entry = CacheEntry {
                        graph_hash: hash.clone(),
                        level,
                        count: c,
                    };
                    fs::write(cache_path(dir, &hash, level), serde_json::to_string(&entry)?)?;
                }
                c
            }
        };
        rows.push((level, count));
    }
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(HilbertTable {
        graph_name: graph.name().to_string(),
        graph_hash: hash,
        rows,
        timestamp,
        budget: opts.budget,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub weighting: Weighting,
    /// True when the point is a product of lower-level points.
    pub redundant: bool,
}

/// Lattice points of levels `1..=max_level`, ordered by level then by
/// weights, each flagged when it factors through lower levels.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub max_level: u32,
    pub gens: Vec<Generator>,
}

impl GeneratorSet {
    pub fn all(&self) -> Vec<Weighting> {
        self.gens.iter().map(|g| g.weighting.clone()).collect()
    }

    pub fn minimal(&self) -> Vec<Weighting> {
        self.gens
            .iter()
            .filter(|g| !g.redundant)
            .map(|g| g.weighting.clone())
            .collect()
    }

    pub fn of_level(&self, level: u32) -> Vec<Weighting> {
        self.gens
            .iter()
            .filter(|g| g.weighting.level() == level)
            .map(|g| g.weighting.clone())
            .collect()
    }
}

/// Degree-1 and degree-2 lattice points.
pub fn generators(graph: &MarkedGraph) -> Result<GeneratorSet> {
    generators_up_to(graph, 2)
}

pub fn generators_up_to(graph: &MarkedGraph, max_level: u32) -> Result<GeneratorSet> {
    let by_level: Vec<Vec<Weighting>> = (1..=max_level)
        .map(|l| enumerate_level(graph, l))
        .collect::<Result<_>>()?;
    let mut gens = Vec::new();
    for (i, points) in by_level.iter().enumerate() {
        let level = i as u32 + 1;
        for w in points {
            let redundant = by_level[..i]
                .iter()
                .flatten()
                .filter(|u| 2 * u.level() <= level)
                .any(|u| {
                    w.checked_sub(u)
                        .is_some_and(|rest| member_unchecked(graph, &rest))
                });
            gens.push(Generator {
                weighting: w.clone(),
                redundant,
            });
        }
    }
    Ok(GeneratorSet { max_level, gens })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_b1, build_b2, build_gamma};
    use crate::weighting::is_member;

    /// Naive oracle: every vector in `[0, L]^E`, filtered by membership.
    fn naive(graph: &MarkedGraph, level: u32) -> Vec<Weighting> {
        let m = graph.num_edges();
        let mut out = Vec::new();
        let mut w = vec![0u32; m];
        loop {
            let cand = Weighting::new(w.clone(), level);
            if is_member(graph, &cand).unwrap() {
                out.push(cand);
            }
            let mut i = m;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                if w[i] < level {
                    w[i] += 1;
                    break;
                }
                w[i] = 0;
            }
        }
    }

    #[test]
    fn b2_level_counts() {
        let g = build_b2();
        assert_eq!(enumerate_level(&g, 2).unwrap().len(), 8);
        let one = enumerate_level(&g, 1).unwrap();
        assert_eq!(
            one,
            vec![
                Weighting::new(vec![0, 0, 0, 0], 1),
                Weighting::new(vec![0, 1, 1, 0], 1)
            ]
        );
    }

    #[test]
    fn tripod_level_one() {
        let g = build_gamma(0, 3).unwrap();
        let pts: Vec<Vec<u32>> = enumerate_level(&g, 1)
            .unwrap()
            .into_iter()
            .map(|w| w.weights().to_vec())
            .collect();
        let mut expect = vec![vec![0, 0, 0], vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]];
        expect.sort();
        assert_eq!(pts, expect);
    }

    #[test]
    fn agrees_with_naive_oracle() {
        let mut graphs = vec![build_b1(), build_b2()];
        for (g, n) in [(0, 3), (0, 4), (1, 1), (1, 2), (2, 1)] {
            graphs.push(build_gamma(g, n).unwrap());
        }
        for g in graphs.iter().filter(|g| g.num_edges() <= 6) {
            for level in 0..=3 {
                assert_eq!(enumerate_level(g, level).unwrap(), naive(g, level), "{} L={level}", g.name());
            }
        }
    }

    #[test]
    fn deterministic_and_parallel_independent() {
        let g = build_gamma(2, 2).unwrap();
        let serial = EnumOptions {
            parallel: false,
            ..EnumOptions::default()
        };
        for level in 0..=3 {
            let a = enumerate_level(&g, level).unwrap();
            let b = enumerate_level_with(&g, level, &serial).unwrap();
            assert_eq!(a, b);
            assert_eq!(count_level_with(&g, level, &serial).unwrap(), a.len() as u64);
        }
    }

    #[test]
    fn budget_is_an_error() {
        let g = build_gamma(2, 3).unwrap();
        let tiny = EnumOptions {
            budget: 10,
            parallel: false,
        };
        assert!(matches!(
            enumerate_level_with(&g, 3, &tiny),
            Err(Error::BudgetExhausted { budget: 10 })
        ));
    }

    #[test]
    fn hilbert_b1_and_cache() {
        let dir = tempfile::tempdir().unwrap();
        let g = build_b1();
        let t = hilbert(&g, 3, Some(dir.path()), &EnumOptions::default()).unwrap();
        // hand count of (loop l, leaf r): r even, r <= 2l, 2l + r <= 2L
        let oracle = |level: u32| {
            let mut n = 0;
            for l in 0..=level {
                for r in (0..=2 * l).step_by(2) {
                    if 2 * l + r <= 2 * level {
                        n += 1;
                    }
                }
            }
            n
        };
        assert_eq!(t.rows[..3], [(0, 1), (1, 2), (2, 4)]);
        for (l, c) in &t.rows {
            assert_eq!(*c, oracle(*l));
        }
        let again = hilbert(&g, 3, Some(dir.path()), &EnumOptions::default()).unwrap();
        assert_eq!(again.rows, t.rows);
        assert!(t.to_csv().starts_with("level,count\n0,1\n"));
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 4);
    }

    #[test]
    fn b1_generators() {
        let set = generators(&build_b1()).unwrap();
        assert_eq!(
            set.minimal(),
            vec![
                Weighting::new(vec![0, 0], 1),
                Weighting::new(vec![1, 0], 1),
                Weighting::new(vec![1, 2], 2)
            ]
        );
    }

    #[test]
    fn b2_minimal_generators_contain_the_skew_points() {
        let set = generators(&build_b2()).unwrap();
        let min = set.minimal();
        assert!(min.contains(&Weighting::new(vec![2, 2, 0, 2], 2)));
        assert!(min.contains(&Weighting::new(vec![2, 0, 2, 2], 2)));
        // oracle: level-2 points minus sums of level-1 pairs
        let ones = set.of_level(1);
        let twos = set.of_level(2);
        let mut expect: Vec<Weighting> = ones.clone();
        for w in &twos {
            let is_sum = ones
                .iter()
                .any(|a| ones.iter().any(|b| &a.checked_add(b).unwrap() == w));
            if !is_sum {
                expect.push(w.clone());
            }
        }
        assert_eq!(min, expect);
    }

    #[test]
    fn tree_level_two_is_all_redundant() {
        let set = generators(&build_gamma(0, 3).unwrap()).unwrap();
        assert!(set.gens.iter().filter(|g| g.weighting.level() == 2).all(|g| g.redundant));
    }
}
