//! Exhaustive factorization over a fixed generator list.
//!
//! Both searches branch on the first edge still carrying weight: every
//! factorization must use some generator that is positive there. Once all
//! edges are covered, the remaining level is filled with all-zero generators.
//! Candidates must be edge-wise dominated by the remainder, and a remainder
//! is abandoned as soon as an edge exceeds the remaining level or a vertex
//! sum exceeds twice the remaining level.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::MarkedGraph;
use crate::weighting::Weighting;

pub struct GeneratorIndex<'a> {
    gens: &'a [Weighting],
    /// Per edge, the generators with positive weight on it.
    covering: Vec<Vec<usize>>,
    /// Generators that are zero on every edge, with their levels.
    zeros: Vec<usize>,
    vertex_slots: Vec<[usize; 3]>,
    num_edges: usize,
}

impl<'a> GeneratorIndex<'a> {
    pub fn new(graph: &MarkedGraph, gens: &'a [Weighting]) -> Result<Self> {
        let m = graph.num_edges();
        if let Some(g) = gens.iter().find(|g| g.len() != m) {
            return Err(Error::Structural(format!(
                "generator {g} does not fit {} edges",
                m
            )));
        }
        if let Some(g) = gens.iter().find(|g| g.level() == 0) {
            return Err(Error::Structural(format!("generator {g} has level 0")));
        }
        let mut covering = vec![Vec::new(); m];
        let mut zeros = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            if g.is_zero() {
                zeros.push(i);
            }
            for (e, &w) in g.weights().iter().enumerate() {
                if w > 0 {
                    covering[e].push(i);
                }
            }
        }
        let vertex_slots = graph
            .internal_vertices()
            .map(|v| {
                let s = graph.slots(v);
                [s[0], s[1], s[2]]
            })
            .collect();
        Ok(GeneratorIndex {
            gens,
            covering,
            zeros,
            vertex_slots,
            num_edges: m,
        })
    }

    pub fn gens(&self) -> &[Weighting] {
        self.gens
    }

    fn feasible(&self, rem: &[u32], level: u32) -> bool {
        let l = level as u64;
        rem.iter().all(|&x| x as u64 <= l)
            && self
                .vertex_slots
                .iter()
                .all(|s| rem[s[0]] as u64 + rem[s[1]] as u64 + rem[s[2]] as u64 <= 2 * l)
    }

    fn fits(&self, g: usize, rem: &[u32], level: u32) -> bool {
        let gen = &self.gens[g];
        gen.level() <= level && gen.weights().iter().zip(rem).all(|(a, b)| a <= b)
    }

    fn take(&self, g: usize, rem: &mut [u32]) {
        for (r, w) in rem.iter_mut().zip(self.gens[g].weights()) {
            *r -= w;
        }
    }

    fn give(&self, g: usize, rem: &mut [u32]) {
        for (r, w) in rem.iter_mut().zip(self.gens[g].weights()) {
            *r += w;
        }
    }

    fn check_target(&self, target: &Weighting) -> Result<()> {
        if target.len() != self.num_edges {
            return Err(Error::Structural(format!(
                "target {target} does not fit {} edges",
                self.num_edges
            )));
        }
        Ok(())
    }

    /// One factorization as sorted generator indices, `None` if there is none.
    pub fn find_one(
        &self,
        target: &Weighting,
        max_parts: usize,
        budget: u64,
    ) -> Result<Option<Vec<usize>>> {
        self.check_target(target)?;
        let mut st = OneSearch {
            idx: self,
            failed: HashSet::new(),
            nodes: 0,
            budget,
            chosen: Vec::new(),
        };
        let mut rem = target.weights().to_vec();
        if st.go(&mut rem, target.level(), max_parts)? {
            let mut out = st.chosen;
            out.sort_unstable();
            Ok(Some(out))
        } else {
            Ok(None)
        }
    }

    /// Every factorization, each as sorted generator indices, in
    /// lexicographic order.
    pub fn find_all(
        &self,
        target: &Weighting,
        max_parts: usize,
        budget: u64,
    ) -> Result<Vec<Vec<usize>>> {
        self.check_target(target)?;
        let mut st = AllSearch {
            idx: self,
            excluded: vec![false; self.gens.len()],
            nodes: 0,
            budget,
            chosen: Vec::new(),
            out: Vec::new(),
        };
        let mut rem = target.weights().to_vec();
        st.go(&mut rem, target.level(), max_parts)?;
        let mut out = st.out;
        out.sort_unstable();
        Ok(out)
    }
}

struct OneSearch<'s, 'a> {
    idx: &'s GeneratorIndex<'a>,
    failed: HashSet<(Vec<u32>, u32, usize)>,
    nodes: u64,
    budget: u64,
    chosen: Vec<usize>,
}

impl OneSearch<'_, '_> {
    fn go(&mut self, rem: &mut Vec<u32>, level: u32, parts_left: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExhausted {
                budget: self.budget,
            });
        }
        if !self.idx.feasible(rem, level) {
            return Ok(false);
        }
        let Some(e) = rem.iter().position(|&x| x > 0) else {
            return Ok(self.fill_zeros(level, parts_left));
        };
        if parts_left == 0 {
            return Ok(false);
        }
        let key = (rem.clone(), level, parts_left);
        if self.failed.contains(&key) {
            return Ok(false);
        }
        for &g in &self.idx.covering[e] {
            if !self.idx.fits(g, rem, level) {
                continue;
            }
            self.idx.take(g, rem);
            self.chosen.push(g);
            let found = self.go(rem, level - self.idx.gens[g].level(), parts_left - 1)?;
            if found {
                return Ok(true);
            }
            self.chosen.pop();
            self.idx.give(g, rem);
        }
        self.failed.insert(key);
        Ok(false)
    }

    /// Fewest zero generators reaching `level`, if within `parts_left`.
    fn fill_zeros(&mut self, level: u32, parts_left: usize) -> bool {
        let n = level as usize;
        let mut best: Vec<Option<(usize, usize)>> = vec![None; n + 1];
        best[0] = Some((0, usize::MAX));
        for x in 1..=n {
            for &z in &self.idx.zeros {
                let l = self.idx.gens[z].level() as usize;
                if l > x {
                    continue;
                }
                if let Some((c, _)) = best[x - l] {
                    if best[x].is_none_or(|(b, _)| c + 1 < b) {
                        best[x] = Some((c + 1, z));
                    }
                }
            }
        }
        match best[n] {
            Some((c, _)) if c <= parts_left => {
                let mut x = n;
                while x > 0 {
                    let (_, z) = best[x].expect("reconstructible");
                    self.chosen.push(z);
                    x -= self.idx.gens[z].level() as usize;
                }
                true
            }
            _ => false,
        }
    }
}

struct AllSearch<'s, 'a> {
    idx: &'s GeneratorIndex<'a>,
    /// Generators barred from the current subtree.
    excluded: Vec<bool>,
    nodes: u64,
    budget: u64,
    chosen: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl AllSearch<'_, '_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExhausted {
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn go(&mut self, rem: &mut Vec<u32>, level: u32, parts_left: usize) -> Result<()> {
        self.tick()?;
        if !self.idx.feasible(rem, level) {
            return Ok(());
        }
        let Some(e) = rem.iter().position(|&x| x > 0) else {
            return self.zeros_from(0, level, parts_left);
        };
        if parts_left == 0 {
            return Ok(());
        }
        // In the branch that takes candidate c, c is the lowest-indexed
        // generator covering e; earlier candidates are barred below it.
        let mut barred = Vec::new();
        for &g in &self.idx.covering[e] {
            if self.excluded[g] || !self.idx.fits(g, rem, level) {
                continue;
            }
            self.idx.take(g, rem);
            self.chosen.push(g);
            self.go(rem, level - self.idx.gens[g].level(), parts_left - 1)?;
            self.chosen.pop();
            self.idx.give(g, rem);
            self.excluded[g] = true;
            barred.push(g);
        }
        for g in barred {
            self.excluded[g] = false;
        }
        Ok(())
    }

    fn zeros_from(&mut self, start: usize, level: u32, parts_left: usize) -> Result<()> {
        if level == 0 {
            let mut f = self.chosen.clone();
            f.sort_unstable();
            self.out.push(f);
            return Ok(());
        }
        if parts_left == 0 {
            return Ok(());
        }
        for i in start..self.idx.zeros.len() {
            let z = self.idx.zeros[i];
            let l = self.idx.gens[z].level();
            if l > level {
                continue;
            }
            self.tick()?;
            self.chosen.push(z);
            self.zeros_from(i, level - l, parts_left - 1)?;
            self.chosen.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::generators;
    use crate::graph::{build_b1, build_b2};

    #[test]
    fn b1_degree_two_needs_degree_two() {
        let g = build_b1();
        let ones = generators(&g).unwrap().of_level(1);
        let idx = GeneratorIndex::new(&g, &ones).unwrap();
        let target = Weighting::new(vec![1, 2], 2);
        assert_eq!(idx.find_one(&target, 2, 1000).unwrap(), None);
        assert!(idx.find_all(&target, 2, 1000).unwrap().is_empty());
    }

    #[test]
    fn singleton_generator() {
        let g = build_b2();
        let w = Weighting::new(vec![2, 3, 1, 2], 3);
        let gens = vec![w.clone()];
        let idx = GeneratorIndex::new(&g, &gens).unwrap();
        assert_eq!(idx.find_one(&w, 1, 100).unwrap(), Some(vec![0]));
        assert_eq!(idx.find_all(&w, 1, 100).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn zero_fills_enumerated() {
        let g = build_b2();
        let gens = generators(&g).unwrap().all();
        let idx = GeneratorIndex::new(&g, &gens).unwrap();
        let zero2 = Weighting::zero_level(4, 2);
        let all = idx.find_all(&zero2, 2, 1000).unwrap();
        // zero@2 alone, and zero@1 twice
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn all_matches_brute_force_on_b2() {
        // oracle: all multisets of at most `level` generators, summed directly
        let g = build_b2();
        let gens = generators(&g).unwrap().all();
        let idx = GeneratorIndex::new(&g, &gens).unwrap();
        let target = Weighting::new(vec![2, 2, 2, 2], 4);
        let mut brute = Vec::new();
        fn rec(
            gens: &[Weighting],
            start: usize,
            acc: &mut Vec<usize>,
            target: &Weighting,
            out: &mut Vec<Vec<usize>>,
        ) {
            let sum = acc.iter().fold(Weighting::zero_level(4, 0), |s, &i| {
                s.checked_add(&gens[i]).unwrap()
            });
            if sum == *target {
                out.push(acc.clone());
            }
            if sum.level() >= target.level() {
                return;
            }
            for i in start..gens.len() {
                acc.push(i);
                rec(gens, i, acc, target, out);
                acc.pop();
            }
        }
        rec(&gens, 0, &mut Vec::new(), &target, &mut brute);
        brute.sort();
        assert_eq!(idx.find_all(&target, 4, 100_000).unwrap(), brute);
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let g = build_b2();
        let gens = generators(&g).unwrap().all();
        let idx = GeneratorIndex::new(&g, &gens).unwrap();
        let target = Weighting::new(vec![2, 2, 2, 2], 4);
        assert!(matches!(
            idx.find_all(&target, 4, 3),
            Err(Error::BudgetExhausted { budget: 3 })
        ));
    }
}
