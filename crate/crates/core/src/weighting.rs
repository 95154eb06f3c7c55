//! Graded-semigroup elements: integer edge weightings at a level.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Gluing, MarkedGraph, SplitDescriptor};

/// An edge weighting at level `L`. Ordered lexicographically by weight
/// vector (edge id order), then by level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weighting {
    weights: Vec<u32>,
    level: u32,
}

impl Weighting {
    pub fn new(weights: Vec<u32>, level: u32) -> Self {
        Weighting { weights, level }
    }

    /// The zero weighting at `level`.
    pub fn zero_level(num_edges: usize, level: u32) -> Self {
        Weighting {
            weights: vec![0; num_edges],
            level,
        }
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn get(&self, e: usize) -> u32 {
        self.weights[e]
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Edge-wise difference `self - other`, if it stays nonnegative.
    pub fn checked_sub(&self, other: &Weighting) -> Option<Weighting> {
        if self.weights.len() != other.weights.len() {
            return None;
        }
        let level = self.level.checked_sub(other.level)?;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u32>>>()?;
        Some(Weighting { weights, level })
    }

    /// Edge-wise sum without membership checks.
    pub fn checked_add(&self, other: &Weighting) -> Result<Weighting> {
        if self.weights.len() != other.weights.len() {
            return Err(Error::Structural(format!(
                "weightings on {} and {} edges",
                self.weights.len(),
                other.weights.len()
            )));
        }
        let level = self.level.checked_add(other.level).ok_or(Error::Overflow)?;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
            .collect::<Result<Vec<u32>>>()?;
        Ok(Weighting { weights, level })
    }

    /// Sum of a nonempty collection of weightings on the same graph.
    pub fn sum<'a>(parts: impl IntoIterator<Item = &'a Weighting>) -> Result<Weighting> {
        let mut it = parts.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::Structural("empty sum".into()))?
            .clone();
        it.try_fold(first, |acc, w| acc.checked_add(w))
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")@{}", self.level)
    }
}

/// Local conditions at one trivalent vertex: sum at most `2L`, even, and
/// the triangle inequalities. Symmetric in `a, b, c`.
pub fn vertex_ok(a: u32, b: u32, c: u32, level: u32) -> bool {
    let (a, b, c, l) = (a as u64, b as u64, c as u64, level as u64);
    let s = a + b + c;
    s <= 2 * l && s % 2 == 0 && a <= b + c && b <= a + c && c <= a + b
}

fn check_shape(graph: &MarkedGraph, w: &Weighting) -> Result<()> {
    if w.len() != graph.num_edges() {
        return Err(Error::Structural(format!(
            "weighting has {} entries, graph {} has {} edges",
            w.len(),
            graph.name(),
            graph.num_edges()
        )));
    }
    Ok(())
}

/// Lattice-point membership of `w` in `P_G(L)`. A weighting of the wrong
/// length is a structural error, not `false`.
pub fn is_member(graph: &MarkedGraph, w: &Weighting) -> Result<bool> {
    check_shape(graph, w)?;
    Ok(member_unchecked(graph, w))
}

pub(crate) fn member_unchecked(graph: &MarkedGraph, w: &Weighting) -> bool {
    if w.weights.iter().any(|&x| x > w.level) {
        return false;
    }
    if graph.even_edges().iter().any(|&e| w.weights[e] % 2 == 1) {
        return false;
    }
    graph.internal_vertices().all(|v| {
        let s = graph.slots(v);
        vertex_ok(w.weights[s[0]], w.weights[s[1]], w.weights[s[2]], w.level)
    })
}

/// Why `w` fails membership, for error messages.
pub fn membership_violation(graph: &MarkedGraph, w: &Weighting) -> Option<String> {
    if let Some(e) = w.weights.iter().position(|&x| x > w.level) {
        return Some(format!("edge {e} weight {} exceeds level {}", w.weights[e], w.level));
    }
    if let Some(&e) = graph.even_edges().iter().find(|&&e| w.weights[e] % 2 == 1) {
        return Some(format!("even edge {e} has odd weight {}", w.weights[e]));
    }
    graph.internal_vertices().find_map(|v| {
        let s = graph.slots(v);
        let (a, b, c) = (w.weights[s[0]], w.weights[s[1]], w.weights[s[2]]);
        (!vertex_ok(a, b, c, w.level)).then(|| format!("vertex {v} has weights ({a},{b},{c})"))
    })
}

fn require_member(graph: &MarkedGraph, w: &Weighting) -> Result<()> {
    check_shape(graph, w)?;
    match membership_violation(graph, w) {
        None => Ok(()),
        Some(why) => Err(Error::NotMember(format!("{w}: {why}"))),
    }
}

/// Semigroup product: edge-wise sum, levels added.
pub fn multiply(graph: &MarkedGraph, u: &Weighting, v: &Weighting) -> Result<Weighting> {
    require_member(graph, u)?;
    require_member(graph, v)?;
    let prod = u.checked_add(v)?;
    if !member_unchecked(graph, &prod) {
        return Err(Error::Invariant(format!("product {prod} left the semigroup")));
    }
    Ok(prod)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The induced weighting on one half of a split, same level.
pub fn restrict(w: &Weighting, split: &SplitDescriptor, side: Side) -> Result<Weighting> {
    if w.len() != split.original_edges {
        return Err(Error::Structural(format!(
            "weighting has {} entries, split graph has {} edges",
            w.len(),
            split.original_edges
        )));
    }
    let origin = match side {
        Side::Left => &split.left_edges,
        Side::Right => &split.right_edges,
    };
    Ok(Weighting {
        weights: origin.iter().map(|&e| w.weights[e]).collect(),
        level: w.level,
    })
}

/// Inverse of restriction: reassembles a weighting of the original graph
/// from compatible halves.
pub fn join(split: &SplitDescriptor, left: &Weighting, right: &Weighting) -> Result<Weighting> {
    if left.len() != split.left_edges.len() || right.len() != split.right_edges.len() {
        return Err(Error::Structural("halves do not match the split".into()));
    }
    if left.level != right.level {
        return Err(Error::Structural(format!(
            "levels differ across the cut: {} vs {}",
            left.level, right.level
        )));
    }
    let (a, b) = (left.weights[split.left_leaf], right.weights[split.right_leaf]);
    if a != b {
        return Err(Error::Structural(format!(
            "shared edge weights differ: {a} vs {b}"
        )));
    }
    let mut weights = vec![0; split.original_edges];
    for (i, &e) in split.left_edges.iter().enumerate() {
        weights[e] = left.weights[i];
    }
    for (i, &e) in split.right_edges.iter().enumerate() {
        weights[e] = right.weights[i];
    }
    Ok(Weighting {
        weights,
        level: left.level,
    })
}

/// Glues weightings of the two inputs of [`crate::graph::glue`].
pub fn glue_weightings(gluing: &Gluing, left: &Weighting, right: &Weighting) -> Result<Weighting> {
    if left.len() != gluing.left_edges.len() || right.len() != gluing.right_edges.len() {
        return Err(Error::Structural("weightings do not match the gluing".into()));
    }
    if left.level != right.level {
        return Err(Error::Structural("levels differ across the glued edge".into()));
    }
    let mut weights = vec![u32::MAX; gluing.graph.num_edges()];
    for (i, &e) in gluing.left_edges.iter().enumerate() {
        weights[e] = left.weights[i];
    }
    for (i, &e) in gluing.right_edges.iter().enumerate() {
        if e == gluing.edge && weights[e] != right.weights[i] {
            return Err(Error::Structural(format!(
                "glued edge weights differ: {} vs {}",
                weights[e], right.weights[i]
            )));
        }
        weights[e] = right.weights[i];
    }
    Ok(Weighting {
        weights,
        level: left.level,
    })
}

/// Shifted coordinates `[A, B, C, D]` of a level-2 point of `B₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct B2Coords(pub [i64; 4]);

impl fmt::Display for B2Coords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "[{a} {b} {c} {d}]")
    }
}

/// `(2a, x, y, 2b) ↦ (a, (x - y)/2, (x + y)/2 - 1, b)` on `B₂(2)`.
pub fn b2_transform(graph: &MarkedGraph, w: &Weighting) -> Result<B2Coords> {
    let layout = graph
        .b2_layout()
        .ok_or_else(|| Error::Structural(format!("{} is not B2", graph.name())))?;
    check_shape(graph, w)?;
    if w.level != 2 {
        return Err(Error::Structural(format!(
            "transform is defined on level 2, got level {}",
            w.level
        )));
    }
    let [l, x, y, r] = layout.edges().map(|e| w.weights[e] as i64);
    if l % 2 != 0 || r % 2 != 0 || (x - y) % 2 != 0 {
        return Err(Error::Structural(format!(
            "{w} has odd leaf weights or odd x - y"
        )));
    }
    Ok(B2Coords([l / 2, (x - y) / 2, (x + y) / 2 - 1, r / 2]))
}

pub fn b2_untransform(graph: &MarkedGraph, c: B2Coords, level: u32) -> Result<Weighting> {
    let layout = graph
        .b2_layout()
        .ok_or_else(|| Error::Structural(format!("{} is not B2", graph.name())))?;
    let [a, b, cc, d] = c.0;
    let vals = [2 * a, b + cc + 1, cc + 1 - b, 2 * d];
    if vals.iter().any(|&v| v < 0 || v > u32::MAX as i64) {
        return Err(Error::Structural(format!(
            "{c} has no nonnegative preimage"
        )));
    }
    let mut weights = vec![0; graph.num_edges()];
    for (e, v) in layout.edges().into_iter().zip(vals) {
        weights[e] = v as u32;
    }
    Ok(Weighting { weights, level })
}

/// `{graph, level, w: {edge_id: weight}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightingFile {
    pub graph: String,
    pub level: u32,
    pub w: BTreeMap<usize, u32>,
}

impl WeightingFile {
    pub fn from_weighting(graph: &MarkedGraph, w: &Weighting) -> Self {
        WeightingFile {
            graph: graph.name().to_string(),
            level: w.level,
            w: w.weights.iter().copied().enumerate().collect(),
        }
    }

    /// Converts back, requiring the keys to cover exactly the graph's edges.
    pub fn to_weighting(&self, graph: &MarkedGraph) -> Result<Weighting> {
        let expected: Vec<usize> = (0..graph.num_edges()).collect();
        let keys: Vec<usize> = self.w.keys().copied().collect();
        if keys != expected {
            return Err(Error::Structural(format!(
                "edge keys {keys:?} do not match edges 0..{}",
                graph.num_edges()
            )));
        }
        Ok(Weighting {
            weights: self.w.values().copied().collect(),
            level: self.level,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_b1, build_b2, build_gamma, split_along_edge};

    fn b2(l: u32, x: u32, y: u32, r: u32, level: u32) -> Weighting {
        Weighting::new(vec![l, x, y, r], level)
    }

    #[test]
    fn membership_examples() {
        let g = build_b2();
        assert!(is_member(&g, &b2(2, 1, 1, 2, 2)).unwrap());
        assert!(!is_member(&g, &b2(2, 2, 0, 2, 1)).unwrap());
        for level in 0..4 {
            assert!(is_member(&g, &Weighting::zero_level(4, level)).unwrap());
        }
        assert!(matches!(
            is_member(&g, &Weighting::new(vec![0, 0], 1)),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn vertex_conditions_by_hand() {
        // oracle: a direct reading of the three conditions
        for l in 0..4u32 {
            for a in 0..=2 * l + 1 {
                for b in 0..=2 * l + 1 {
                    for c in 0..=2 * l + 1 {
                        let expect = a + b + c <= 2 * l
                            && (a + b + c) % 2 == 0
                            && (a as i64 - b as i64).unsigned_abs() as u32 <= c
                            && c <= a + b
                            && (a as i64 - c as i64).unsigned_abs() as u32 <= b;
                        assert_eq!(vertex_ok(a, b, c, l), expect, "({a},{b},{c}) L={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn multiply_examples() {
        let g = build_b2();
        let o2 = b2(0, 1, 1, 0, 1);
        assert_eq!(multiply(&g, &o2, &o2).unwrap(), b2(0, 2, 2, 0, 2));
        let w = b2(2, 3, 1, 2, 3);
        assert_eq!(
            multiply(&g, &w, &Weighting::zero_level(4, 2)).unwrap(),
            b2(2, 3, 1, 2, 5)
        );
        // the quadratic binomial of the B2 shifted coordinates
        let lhs = multiply(&g, &b2(0, 1, 1, 2, 2), &b2(2, 1, 1, 0, 2)).unwrap();
        let rhs = multiply(&g, &b2(0, 1, 1, 0, 2), &b2(2, 1, 1, 2, 2)).unwrap();
        assert_eq!(lhs, b2(2, 2, 2, 2, 4));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiply_rejects_mismatch_and_non_members() {
        let g = build_b2();
        let h = build_b1();
        let o2 = b2(0, 1, 1, 0, 1);
        assert!(matches!(
            multiply(&g, &o2, &Weighting::zero_level(2, 1)),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            multiply(&h, &o2, &o2),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            multiply(&g, &b2(2, 2, 0, 2, 1), &o2),
            Err(Error::NotMember(_))
        ));
    }

    #[test]
    fn transform_examples() {
        let g = build_b2();
        assert_eq!(b2_transform(&g, &b2(0, 1, 1, 2, 2)).unwrap(), B2Coords([0, 0, 0, 1]));
        assert_eq!(b2_transform(&g, &b2(0, 0, 0, 0, 2)).unwrap(), B2Coords([0, 0, -1, 0]));
        assert_eq!(b2_transform(&g, &b2(0, 2, 2, 0, 2)).unwrap(), B2Coords([0, 0, 1, 0]));
        assert!(matches!(
            b2_transform(&g, &b2(0, 1, 0, 0, 2)),
            Err(Error::Structural(_))
        ));
        for w in [b2(2, 2, 0, 2, 2), b2(2, 0, 2, 2, 2), b2(2, 1, 1, 0, 2)] {
            let c = b2_transform(&g, &w).unwrap();
            assert_eq!(b2_untransform(&g, c, 2).unwrap(), w);
        }
        assert!(b2_untransform(&g, B2Coords([0, 3, 0, 0]), 2).is_err());
    }

    #[test]
    fn restrict_and_join() {
        let g = build_gamma(1, 2).unwrap();
        let cut = g.internal_bridges()[0];
        let s = split_along_edge(&g, cut).unwrap();
        let zero = Weighting::zero_level(g.num_edges(), 3);
        let l = restrict(&zero, &s, Side::Left).unwrap();
        let r = restrict(&zero, &s, Side::Right).unwrap();
        assert!(l.is_zero() && r.is_zero());
        assert_eq!(join(&s, &l, &r).unwrap(), zero);
        let bumped = Weighting::new(
            l.weights().iter().enumerate().map(|(i, _)| (i == s.left_leaf) as u32 * 2).collect(),
            3,
        );
        assert!(matches!(join(&s, &bumped, &r), Err(Error::Structural(_))));
    }

    #[test]
    fn weighting_file_round_trip() {
        let g = build_b2();
        let w = b2(2, 3, 1, 2, 3);
        let file = WeightingFile::from_weighting(&g, &w);
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains("\"w\":{\"0\":2"));
        let back: WeightingFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_weighting(&g).unwrap(), w);
        let mut missing = file.clone();
        missing.w.remove(&3);
        assert!(matches!(missing.to_weighting(&g), Err(Error::Structural(_))));
    }
}
