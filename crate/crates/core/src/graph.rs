//! Marked trivalent graphs.
//!
//! Vertices are either *internal* (incident degree exactly three, a self-loop
//! counting twice) or *leaf vertices* (degree one). An edge touching a leaf
//! vertex is a leaf edge; the ordered list of leaf edges indexes the marked
//! points. Vertex and edge ids are dense, starting at zero.
//!
//! The canonical graphs `Γ(g, n)` are a chain of loop gadgets (a self-loop
//! vertex followed by `g - 1` bigons, joined by horizontal edges) glued to a
//! caterpillar tree carrying the `n` leaves. See `CONVENTIONS.md` at the
//! repository root for the picture.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub ends: [usize; 2],
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    /// The endpoint opposite `v`. For a self-loop this is `v` itself.
    pub fn other(&self, v: usize) -> usize {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

/// On-disk form: `{name, vertices: [int], edges: [{id, ends: [int, int]}], leaves: [int]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct GraphJson {
    name: String,
    vertices: Vec<usize>,
    edges: Vec<Edge>,
    leaves: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    even_edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct MarkedGraph {
    name: String,
    num_vertices: usize,
    edges: Vec<Edge>,
    leaves: Vec<usize>,
    /// Edges restricted to even weights (a refinement of the lattice).
    even_edges: Vec<usize>,
    /// Incident edge ids per vertex; a self-loop appears twice.
    slots: Vec<Vec<usize>>,
}

impl TryFrom<GraphJson> for MarkedGraph {
    type Error = Error;

    fn try_from(raw: GraphJson) -> Result<Self> {
        if raw.vertices.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::InvalidGraph(
                "vertex ids must be 0..n in order".into(),
            ));
        }
        if raw.edges.iter().enumerate().any(|(i, e)| i != e.id) {
            return Err(Error::InvalidGraph("edge ids must be 0..m in order".into()));
        }
        let ends = raw.edges.iter().map(|e| e.ends).collect();
        MarkedGraph::new(raw.name, raw.vertices.len(), ends, raw.leaves)?
            .with_even_edges(raw.even_edges)
    }
}

impl From<MarkedGraph> for GraphJson {
    fn from(g: MarkedGraph) -> Self {
        GraphJson {
            vertices: (0..g.num_vertices).collect(),
            name: g.name,
            edges: g.edges,
            leaves: g.leaves,
            even_edges: g.even_edges,
        }
    }
}

impl MarkedGraph {
    /// Builds and validates a graph. Edge `i` gets id `i`.
    pub fn new(
        name: impl Into<String>,
        num_vertices: usize,
        ends: Vec<[usize; 2]>,
        leaves: Vec<usize>,
    ) -> Result<Self> {
        let name = name.into();
        let mut slots = vec![Vec::new(); num_vertices];
        let mut edges = Vec::with_capacity(ends.len());
        for (id, [a, b]) in ends.into_iter().enumerate() {
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge {id} references a vertex outside 0..{num_vertices}"
                )));
            }
            slots[a].push(id);
            slots[b].push(id);
            edges.push(Edge { id, ends: [a, b] });
        }
        let graph = MarkedGraph {
            name,
            num_vertices,
            edges,
            leaves,
            even_edges: Vec::new(),
            slots,
        };
        graph.validate()?;
        Ok(graph)
    }

    fn validate(&self) -> Result<()> {
        if self.num_vertices == 0 {
            return Err(Error::InvalidGraph("empty graph".into()));
        }
        for (v, s) in self.slots.iter().enumerate() {
            if s.len() != 1 && s.len() != 3 {
                return Err(Error::InvalidGraph(format!(
                    "vertex {v} has degree {}; expected 1 (leaf) or 3",
                    s.len()
                )));
            }
        }
        if !self.slots.iter().any(|s| s.len() == 3) {
            return Err(Error::InvalidGraph("no internal vertex".into()));
        }
        let mut leaf_edges = BTreeSet::new();
        for e in &self.edges {
            let leafy = e.ends.iter().filter(|&&v| self.slots[v].len() == 1).count();
            match leafy {
                0 => {}
                1 if !e.is_loop() => {
                    leaf_edges.insert(e.id);
                }
                _ => {
                    return Err(Error::InvalidGraph(format!(
                        "edge {} joins two leaf vertices",
                        e.id
                    )))
                }
            }
        }
        let declared: BTreeSet<usize> = self.leaves.iter().copied().collect();
        if declared.len() != self.leaves.len() {
            return Err(Error::InvalidGraph("duplicate leaf ids".into()));
        }
        if declared != leaf_edges {
            return Err(Error::InvalidGraph(format!(
                "declared leaves {:?} differ from the leaf edges {:?}",
                self.leaves, leaf_edges
            )));
        }
        if self.components(None) != 1 {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialization is infallible")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Restricts the listed edges to even weights.
    pub fn with_even_edges(mut self, mut even: Vec<usize>) -> Result<Self> {
        even.sort_unstable();
        even.dedup();
        if let Some(&e) = even.iter().find(|&&e| e >= self.edges.len()) {
            return Err(Error::BadEdge {
                edge: e,
                reason: "even-edge id out of range",
            });
        }
        self.even_edges = even;
        Ok(self)
    }

    pub fn even_edges(&self) -> &[usize] {
        &self.even_edges
    }

    pub fn is_even_edge(&self, e: usize) -> bool {
        self.even_edges.binary_search(&e).is_ok()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    /// Incident edge ids of `v`, self-loops listed twice.
    pub fn slots(&self, v: usize) -> &[usize] {
        &self.slots[v]
    }

    pub fn is_internal(&self, v: usize) -> bool {
        self.slots[v].len() == 3
    }

    pub fn internal_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices).filter(|&v| self.is_internal(v))
    }

    pub fn is_leaf(&self, e: usize) -> bool {
        self.leaves.contains(&e)
    }

    /// For a leaf edge, the (internal, leaf) vertex pair.
    pub fn leaf_ends(&self, e: usize) -> Option<(usize, usize)> {
        let [a, b] = self.edges.get(e)?.ends;
        match (self.is_internal(a), self.is_internal(b)) {
            (true, false) => Some((a, b)),
            (false, true) => Some((b, a)),
            _ => None,
        }
    }

    /// Number of connected components, optionally ignoring one edge.
    fn components(&self, without: Option<usize>) -> usize {
        let mut seen = vec![false; self.num_vertices];
        let mut count = 0;
        for start in 0..self.num_vertices {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &e in &self.slots[v] {
                    if Some(e) == without {
                        continue;
                    }
                    let u = self.edges[e].other(v);
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        count
    }

    /// First Betti number `|E| - |V| + components`.
    pub fn betti(&self) -> usize {
        self.edges.len() + self.components(None) - self.num_vertices
    }

    pub fn is_tree(&self) -> bool {
        self.betti() == 0
    }

    /// True if deleting `e` disconnects the graph.
    pub fn is_bridge(&self, e: usize) -> bool {
        !self.edges[e].is_loop() && self.components(Some(e)) > 1
    }

    /// Bridges that are not leaf edges, in id order.
    pub fn internal_bridges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| !self.is_leaf(e) && self.is_bridge(e))
            .collect()
    }

    /// Stable hex digest of the structure (name excluded).
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("v{};", self.num_vertices));
        for e in &self.edges {
            h.update(format!("e{}:{}-{};", e.id, e.ends[0], e.ends[1]));
        }
        h.update(format!("l{:?}", self.leaves));
        if !self.even_edges.is_empty() {
            h.update(format!("p{:?}", self.even_edges));
        }
        h.finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>()
    }

    fn component_of(&self, start: usize, without: usize) -> Vec<bool> {
        let mut seen = vec![false; self.num_vertices];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.slots[v] {
                if e == without {
                    continue;
                }
                let u = self.edges[e].other(v);
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    /// Plain-text adjacency dump, one line per internal vertex.
    pub fn adjacency_dump(&self) -> String {
        let mut out = String::new();
        for v in self.internal_vertices() {
            let parts: Vec<String> = self.slots[v]
                .iter()
                .map(|&e| format!("e{}->v{}", e, self.edges[e].other(v)))
                .collect();
            out.push_str(&format!("v{v}: {}\n", parts.join(" ")));
        }
        out
    }

    /// Recognises a loop chain: one leaf, a self-loop gadget at the far end
    /// and bigons joined by horizontal edges. `B₁` is the chain with no bigons.
    pub fn loop_chain(&self) -> Option<LoopChain> {
        if self.leaves.len() != 1 {
            return None;
        }
        let leaf = self.leaves[0];
        let (mut v, _) = self.leaf_ends(leaf)?;
        let mut came = leaf;
        let mut gadgets = Vec::new();
        let mut horizontals = Vec::new();
        loop {
            let mut others = self.slots[v].clone();
            let pos = others.iter().position(|&e| e == came)?;
            others.remove(pos);
            let (e1, e2) = (others[0], others[1]);
            if e1 == e2 {
                gadgets.push(Gadget::SelfLoop { vertex: v, edge: e1 });
                break;
            }
            let u = self.edges[e1].other(v);
            if u == v || self.edges[e2].other(v) != u || !self.is_internal(u) {
                return None;
            }
            let mut rest = self.slots[u].clone();
            rest.retain(|&e| e != e1 && e != e2);
            if rest.len() != 1 {
                return None;
            }
            let h = rest[0];
            gadgets.push(Gadget::Bigon {
                left: u,
                right: v,
                upper: e1.min(e2),
                lower: e1.max(e2),
            });
            horizontals.push(h);
            came = h;
            v = self.edges[h].other(u);
            if !self.is_internal(v) || v == u {
                return None;
            }
        }
        gadgets.reverse();
        horizontals.reverse();
        let internal = self.internal_vertices().count();
        if internal != 2 * gadgets.len() - 1 {
            return None;
        }
        Some(LoopChain {
            gadgets,
            horizontals,
            leaf,
        })
    }

    /// Recognises the standalone bigon `B₂` with leaves ordered (left, right).
    pub fn b2_layout(&self) -> Option<B2Layout> {
        if self.leaves.len() != 2 || self.internal_vertices().count() != 2 {
            return None;
        }
        let (p, _) = self.leaf_ends(self.leaves[0])?;
        let (q, _) = self.leaf_ends(self.leaves[1])?;
        if p == q {
            return None;
        }
        let par: Vec<usize> = self.slots[p]
            .iter()
            .copied()
            .filter(|&e| e != self.leaves[0])
            .collect();
        if par.len() != 2 || par[0] == par[1] {
            return None;
        }
        if par.iter().any(|&e| self.edges[e].other(p) != q) {
            return None;
        }
        Some(B2Layout {
            left_leaf: self.leaves[0],
            upper: par[0].min(par[1]),
            lower: par[0].max(par[1]),
            right_leaf: self.leaves[1],
        })
    }
}

/// One loop gadget of a chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gadget {
    SelfLoop {
        vertex: usize,
        edge: usize,
    },
    Bigon {
        left: usize,
        right: usize,
        upper: usize,
        lower: usize,
    },
}

impl Gadget {
    /// The edges carrying weight in the gadget's loop generator.
    pub fn loop_edges(&self) -> Vec<usize> {
        match *self {
            Gadget::SelfLoop { edge, .. } => vec![edge],
            Gadget::Bigon { upper, lower, .. } => vec![upper, lower],
        }
    }

    pub fn vertices(&self) -> Vec<usize> {
        match *self {
            Gadget::SelfLoop { vertex, .. } => vec![vertex],
            Gadget::Bigon { left, right, .. } => vec![left, right],
        }
    }
}

/// Gadgets ordered from the self-loop end; `horizontals[i]` joins gadgets
/// `i` and `i + 1`, and `leaf` hangs off the last gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopChain {
    pub gadgets: Vec<Gadget>,
    pub horizontals: Vec<usize>,
    pub leaf: usize,
}

impl LoopChain {
    pub fn genus(&self) -> usize {
        self.gadgets.len()
    }
}

/// Edge roles of `B₂`, matching the tuple `(2a, x, y, 2b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct B2Layout {
    pub left_leaf: usize,
    pub upper: usize,
    pub lower: usize,
    pub right_leaf: usize,
}

impl B2Layout {
    pub fn edges(&self) -> [usize; 4] {
        [self.left_leaf, self.upper, self.lower, self.right_leaf]
    }
}

/// Result of gluing two graphs along a pair of leaves, with the edge
/// renumbering for each input.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub graph: MarkedGraph,
    /// `left_edges[e]` is the id in `graph` of edge `e` of the first input.
    pub left_edges: Vec<usize>,
    pub right_edges: Vec<usize>,
    /// Id of the new internal edge.
    pub edge: usize,
}

/// Identifies leaf `leaf_a` of `a` with leaf `leaf_b` of `b`.
pub fn glue(a: &MarkedGraph, leaf_a: usize, b: &MarkedGraph, leaf_b: usize) -> Result<Gluing> {
    let (ia, la) = a.leaf_ends(leaf_a).ok_or(Error::BadEdge {
        edge: leaf_a,
        reason: "not a leaf of the first graph",
    })?;
    let (ib, lb) = b.leaf_ends(leaf_b).ok_or(Error::BadEdge {
        edge: leaf_b,
        reason: "not a leaf of the second graph",
    })?;

    let mut a_vertex = vec![usize::MAX; a.num_vertices];
    let mut next = 0;
    for (v, slot) in a_vertex.iter_mut().enumerate() {
        if v != la {
            *slot = next;
            next += 1;
        }
    }
    let mut b_vertex = vec![usize::MAX; b.num_vertices];
    for (v, slot) in b_vertex.iter_mut().enumerate() {
        if v != lb {
            *slot = next;
            next += 1;
        }
    }

    let mut ends = Vec::with_capacity(a.num_edges() + b.num_edges() - 1);
    let left_edges: Vec<usize> = (0..a.num_edges()).collect();
    for e in a.edges() {
        if e.id == leaf_a {
            ends.push([a_vertex[ia], b_vertex[ib]]);
        } else {
            ends.push([a_vertex[e.ends[0]], a_vertex[e.ends[1]]]);
        }
    }
    let mut right_edges = vec![usize::MAX; b.num_edges()];
    for e in b.edges() {
        if e.id == leaf_b {
            right_edges[e.id] = leaf_a;
        } else {
            right_edges[e.id] = ends.len();
            ends.push([b_vertex[e.ends[0]], b_vertex[e.ends[1]]]);
        }
    }
    let leaves = a
        .leaves()
        .iter()
        .filter(|&&l| l != leaf_a)
        .copied()
        .chain(
            b.leaves()
                .iter()
                .filter(|&&l| l != leaf_b)
                .map(|&l| right_edges[l]),
        )
        .collect();
    let even = a
        .even_edges
        .iter()
        .map(|&e| left_edges[e])
        .chain(b.even_edges.iter().map(|&e| right_edges[e]))
        .collect();
    let graph = MarkedGraph::new(format!("{}+{}", a.name, b.name), next, ends, leaves)?
        .with_even_edges(even)?;
    Ok(Gluing {
        graph,
        left_edges,
        right_edges,
        edge: leaf_a,
    })
}

/// The two halves obtained by cutting a bridge. Each half gains the cut edge
/// as a new leaf: appended last on the left, placed first on the right.
#[derive(Clone, Debug)]
pub struct SplitDescriptor {
    pub left: MarkedGraph,
    pub right: MarkedGraph,
    /// Id of the cut edge in the original graph.
    pub shared_edge: usize,
    pub left_leaf: usize,
    pub right_leaf: usize,
    /// `left_edges[i]` is the original id of edge `i` of `left`.
    pub left_edges: Vec<usize>,
    pub right_edges: Vec<usize>,
    /// Number of edges of the original graph.
    pub original_edges: usize,
}

impl SplitDescriptor {
    /// Same cut with the roles of the halves exchanged.
    pub fn swapped(self) -> Self {
        SplitDescriptor {
            left: self.right,
            right: self.left,
            shared_edge: self.shared_edge,
            left_leaf: self.right_leaf,
            right_leaf: self.left_leaf,
            left_edges: self.right_edges,
            right_edges: self.left_edges,
            original_edges: self.original_edges,
        }
    }

    pub fn reassemble(&self) -> Result<Gluing> {
        glue(&self.left, self.left_leaf, &self.right, self.right_leaf)
    }
}

/// Cuts the graph at the bridge `e`; the left half contains `ends[0]`.
pub fn split_along_edge(g: &MarkedGraph, e: usize) -> Result<SplitDescriptor> {
    let edge = g.edges.get(e).ok_or(Error::BadEdge {
        edge: e,
        reason: "no such edge",
    })?;
    split_with_left(g, e, edge.ends[0])
}

/// Cuts at `e` with the half containing `left_vertex` (an endpoint of `e`) on the left.
pub fn split_with_left(g: &MarkedGraph, e: usize, left_vertex: usize) -> Result<SplitDescriptor> {
    let edge = *g.edges.get(e).ok_or(Error::BadEdge {
        edge: e,
        reason: "no such edge",
    })?;
    if g.is_leaf(e) {
        return Err(Error::BadEdge {
            edge: e,
            reason: "leaf edges cannot be split",
        });
    }
    if !edge.ends.contains(&left_vertex) {
        return Err(Error::BadEdge {
            edge: e,
            reason: "left vertex is not an endpoint",
        });
    }
    if !g.is_bridge(e) {
        return Err(Error::BadEdge {
            edge: e,
            reason: "edge lies on a cycle; removal does not disconnect",
        });
    }
    let right_vertex = edge.other(left_vertex);
    let left_side = g.component_of(left_vertex, e);
    let (left, left_leaf, left_edges) = half(g, e, &left_side, left_vertex, false)?;
    let right_side: Vec<bool> = left_side.iter().map(|&s| !s).collect();
    let (right, right_leaf, right_edges) = half(g, e, &right_side, right_vertex, true)?;
    Ok(SplitDescriptor {
        left: left.with_name(format!("{}/{}L", g.name, e)),
        right: right.with_name(format!("{}/{}R", g.name, e)),
        shared_edge: e,
        left_leaf,
        right_leaf,
        left_edges,
        right_edges,
        original_edges: g.num_edges(),
    })
}

fn half(
    g: &MarkedGraph,
    cut: usize,
    side: &[bool],
    anchor: usize,
    leaf_first: bool,
) -> Result<(MarkedGraph, usize, Vec<usize>)> {
    let mut vmap = vec![usize::MAX; g.num_vertices];
    let mut n = 0;
    for v in 0..g.num_vertices {
        if side[v] {
            vmap[v] = n;
            n += 1;
        }
    }
    let new_leaf_vertex = n;
    let mut ends = Vec::new();
    let mut origin = Vec::new();
    let mut shared = usize::MAX;
    for edge in &g.edges {
        if edge.id == cut {
            shared = ends.len();
            ends.push([vmap[anchor], new_leaf_vertex]);
            origin.push(cut);
        } else if side[edge.ends[0]] {
            ends.push([vmap[edge.ends[0]], vmap[edge.ends[1]]]);
            origin.push(edge.id);
        }
    }
    let mut emap = vec![usize::MAX; g.num_edges()];
    for (i, &o) in origin.iter().enumerate() {
        emap[o] = i;
    }
    let kept = g
        .leaves
        .iter()
        .filter(|&&l| side[g.edges[l].ends[0]])
        .map(|&l| emap[l]);
    let leaves: Vec<usize> = if leaf_first {
        std::iter::once(shared).chain(kept).collect()
    } else {
        kept.chain(std::iter::once(shared)).collect()
    };
    let even = g.even_edges.iter().filter_map(|&e| {
        (emap[e] != usize::MAX).then_some(emap[e])
    });
    let graph = MarkedGraph::new(g.name.clone(), n + 1, ends, leaves)?
        .with_even_edges(even.collect())?;
    Ok((graph, shared, origin))
}

/// `B₁`: one vertex with a self-loop (edge 0) and a leaf (edge 1).
pub fn build_b1() -> MarkedGraph {
    MarkedGraph::new("B1", 2, vec![[0, 0], [0, 1]], vec![1]).expect("B1 is valid")
}

/// `B₂`: edges (left leaf, upper, lower, right leaf) = (0, 1, 2, 3). Both
/// leaves are even edges, as they are when the bigon sits inside a chain.
pub fn build_b2() -> MarkedGraph {
    MarkedGraph::new(
        "B2",
        4,
        vec![[0, 2], [0, 1], [0, 1], [1, 3]],
        vec![0, 3],
    )
    .and_then(|g| g.with_even_edges(vec![0, 3]))
    .expect("B2 is valid")
}

fn caterpillar(n: usize) -> Result<MarkedGraph> {
    if n < 3 {
        return Err(Error::NoSuchGraph { g: 0, n });
    }
    let k = n - 2;
    let mut ends = Vec::new();
    let mut leaves = Vec::new();
    let mut leaf_vertex = k;
    let mut hang = |v: usize, ends: &mut Vec<[usize; 2]>, leaves: &mut Vec<usize>| {
        leaves.push(ends.len());
        ends.push([v, leaf_vertex]);
        leaf_vertex += 1;
    };
    hang(0, &mut ends, &mut leaves);
    hang(0, &mut ends, &mut leaves);
    for c in 1..k {
        ends.push([c - 1, c]);
        hang(c, &mut ends, &mut leaves);
    }
    hang(k - 1, &mut ends, &mut leaves);
    MarkedGraph::new(format!("gamma_0_{n}"), leaf_vertex, ends, leaves)
}

fn chain(g: usize) -> MarkedGraph {
    assert!(g >= 1);
    let mut ends = vec![[0, 0]];
    let mut last = 0;
    let mut next = 1;
    for _ in 1..g {
        let (left, right) = (next, next + 1);
        next += 2;
        ends.push([last, left]);
        ends.push([left, right]);
        ends.push([left, right]);
        last = right;
    }
    let leaf = ends.len();
    ends.push([last, next]);
    MarkedGraph::new(format!("gamma_{g}_1"), next + 1, ends, vec![leaf])
        .expect("loop chain is valid")
}

/// The canonical `Γ(g, n)`.
pub fn build_gamma(g: usize, n: usize) -> Result<MarkedGraph> {
    let name = format!("gamma_{g}_{n}");
    match (g, n) {
        (0, n) => caterpillar(n),
        (1, 0) => Err(Error::NoSuchGraph { g, n }),
        (g, 0) => {
            let left = chain(g - 1);
            let leaf = left.leaves[0];
            Ok(glue(&left, leaf, &build_b1(), 1)?.graph.with_name(name))
        }
        (g, 1) => Ok(chain(g)),
        (g, n) => {
            let left = chain(g);
            let leaf = left.leaves[0];
            let tree = caterpillar(n + 1)?;
            Ok(glue(&left, leaf, &tree, tree.leaves[0])?.graph.with_name(name))
        }
    }
}

/// A genus-2 one-leaf graph that is not `Γ(2, 1)`: a theta graph with one
/// of its three arcs subdivided by the leaf's vertex.
pub fn build_theta_leaf() -> MarkedGraph {
    // vertices: 0, 1 theta poles; 2 subdividing vertex; 3 leaf vertex
    MarkedGraph::new(
        "theta_2_1",
        4,
        vec![[0, 1], [0, 1], [0, 2], [2, 1], [2, 3]],
        vec![4],
    )
    .expect("theta graph is valid")
}

/// Exact multigraph isomorphism by backtracking (ignores names and leaf
/// order). Intended for small graphs in tests.
pub fn is_isomorphic(a: &MarkedGraph, b: &MarkedGraph) -> bool {
    if a.num_vertices != b.num_vertices || a.num_edges() != b.num_edges() {
        return false;
    }
    let n = a.num_vertices;
    let adj = |g: &MarkedGraph| {
        let mut m = vec![vec![0usize; n]; n];
        for e in &g.edges {
            let [x, y] = e.ends;
            m[x][y] += 1;
            if x != y {
                m[y][x] += 1;
            }
        }
        m
    };
    let (ma, mb) = (adj(a), adj(b));
    let deg_a: Vec<usize> = (0..n).map(|v| a.slots[v].len()).collect();
    let deg_b: Vec<usize> = (0..n).map(|v| b.slots[v].len()).collect();
    let mut sa = deg_a.clone();
    let mut sb = deg_b.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        v: usize,
        n: usize,
        ma: &[Vec<usize>],
        mb: &[Vec<usize>],
        deg_a: &[usize],
        deg_b: &[usize],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if v == n {
            return true;
        }
        for t in 0..n {
            if used[t] || deg_a[v] != deg_b[t] || ma[v][v] != mb[t][t] {
                continue;
            }
            if (0..v).any(|u| ma[v][u] != mb[t][map[u]]) {
                continue;
            }
            map[v] = t;
            used[t] = true;
            if extend(v + 1, n, ma, mb, deg_a, deg_b, map, used) {
                return true;
            }
            used[t] = false;
        }
        false
    }

    extend(0, n, &ma, &mb, &deg_a, &deg_b, &mut map, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_trivalent(g: &MarkedGraph) {
        for v in 0..g.num_vertices() {
            let d = g.slots(v).len();
            assert!(d == 1 || d == 3, "vertex {v} degree {d}");
        }
    }

    #[test]
    fn gamma_1_1_is_b1() {
        let g = build_gamma(1, 1).unwrap();
        assert!(is_isomorphic(&g, &build_b1()));
        assert_eq!(g.internal_vertices().count(), 1);
    }

    #[test]
    fn gamma_0_3_is_a_single_vertex() {
        let g = build_gamma(0, 3).unwrap();
        assert_eq!(g.internal_vertices().count(), 1);
        assert_eq!(g.leaves().len(), 3);
        assert!(g.is_tree());
    }

    #[test]
    fn gamma_2_1_shape() {
        let g = build_gamma(2, 1).unwrap();
        check_trivalent(&g);
        assert_eq!(g.betti(), 2);
        assert_eq!(g.leaves().len(), 1);
        let chain = g.loop_chain().unwrap();
        assert_eq!(chain.genus(), 2);
        assert_eq!(chain.horizontals.len(), 1);
    }

    #[test]
    fn b1_and_b2_counts() {
        let b1 = build_b1();
        assert_eq!(b1.internal_vertices().count(), 1);
        assert_eq!(b1.num_edges(), 2);
        assert_eq!(b1.betti(), 1);
        assert_eq!(b1.leaves().len(), 1);

        let b2 = build_b2();
        assert_eq!(b2.internal_vertices().count(), 2);
        assert_eq!(b2.num_edges(), 4);
        assert_eq!(b2.betti(), 1);
        assert_eq!(b2.leaves().len(), 2);
        let layout = b2.b2_layout().unwrap();
        assert_eq!(layout.edges(), [0, 1, 2, 3]);
    }

    #[test]
    fn small_gammas_rejected() {
        for (g, n) in [(0, 0), (0, 1), (0, 2), (1, 0)] {
            assert!(matches!(build_gamma(g, n), Err(Error::NoSuchGraph { .. })));
        }
    }

    #[test]
    fn betti_and_leaves_in_range() {
        for g in 0..=4 {
            for n in 0..=6 {
                let Ok(graph) = build_gamma(g, n) else {
                    assert!(g == 0 && n < 3 || (g, n) == (1, 0));
                    continue;
                };
                check_trivalent(&graph);
                assert_eq!(graph.betti(), g, "betti of gamma({g},{n})");
                assert_eq!(graph.leaves().len(), n, "leaves of gamma({g},{n})");
            }
        }
    }

    #[test]
    fn glue_b1_b2_is_gamma_2_1() {
        let b1 = build_b1();
        let b2 = build_b2();
        let glued = glue(&b1, 1, &b2, 0).unwrap();
        check_trivalent(&glued.graph);
        assert_eq!(glued.graph.betti(), 2);
        assert!(is_isomorphic(&glued.graph, &build_gamma(2, 1).unwrap()));
    }

    #[test]
    fn glue_chain_and_tree_is_gamma() {
        for g in 1..=3 {
            for n in 2..=5 {
                let a = build_gamma(g, 1).unwrap();
                let b = build_gamma(0, n + 1).unwrap();
                let glued = glue(&a, a.leaves()[0], &b, b.leaves()[0]).unwrap();
                assert_eq!(glued.graph.betti(), g);
                assert_eq!(glued.graph.leaves().len(), n);
                assert!(is_isomorphic(&glued.graph, &build_gamma(g, n).unwrap()));
            }
        }
    }

    #[test]
    fn glue_rejects_non_leaf() {
        let b1 = build_b1();
        let b2 = build_b2();
        assert!(matches!(glue(&b1, 0, &b2, 0), Err(Error::BadEdge { .. })));
        assert!(matches!(glue(&b1, 1, &b2, 1), Err(Error::BadEdge { .. })));
    }

    #[test]
    fn split_gamma_into_chain_and_tree() {
        let g = build_gamma(2, 3).unwrap();
        let bridges = g.internal_bridges();
        let cut = bridges
            .iter()
            .copied()
            .find(|&e| {
                let s = split_along_edge(&g, e).unwrap();
                s.left.loop_chain().is_some() && s.right.is_tree()
            })
            .expect("chain/tree bridge");
        let s = split_along_edge(&g, cut).unwrap();
        assert!(is_isomorphic(&s.left, &build_gamma(2, 1).unwrap()));
        assert!(is_isomorphic(&s.right, &build_gamma(0, 4).unwrap()));
    }

    #[test]
    fn split_last_horizontal_gives_b2() {
        let g = build_gamma(3, 1).unwrap();
        let chain = g.loop_chain().unwrap();
        let h = *chain.horizontals.last().unwrap();
        let s = split_along_edge(&g, h).unwrap();
        assert!(is_isomorphic(&s.left, &build_gamma(2, 1).unwrap()));
        assert!(s.right.b2_layout().is_some());
        assert_eq!(s.right.b2_layout().unwrap().left_leaf, s.right_leaf);
    }

    #[test]
    fn split_errors() {
        let g = build_gamma(2, 1).unwrap();
        let chain = g.loop_chain().unwrap();
        let Gadget::Bigon { upper, .. } = chain.gadgets[1] else {
            panic!("expected bigon");
        };
        assert!(matches!(split_along_edge(&g, upper), Err(Error::BadEdge { .. })));
        assert!(matches!(
            split_along_edge(&g, chain.leaf),
            Err(Error::BadEdge { .. })
        ));
    }

    #[test]
    fn split_glue_round_trip() {
        for g in 0..=3 {
            for n in 0..=5 {
                let Ok(graph) = build_gamma(g, n) else { continue };
                for e in graph.internal_bridges() {
                    let s = split_along_edge(&graph, e).unwrap();
                    assert_eq!(s.left.betti() + s.right.betti(), graph.betti());
                    let back = s.reassemble().unwrap();
                    assert!(is_isomorphic(&back.graph, &graph), "gamma({g},{n}) edge {e}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = build_gamma(2, 2).unwrap();
        let back = MarkedGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"name":"x","vertices":[0,1],"edges":[{"id":0,"ends":[0,1]}],"leaves":[0]}"#;
        assert!(MarkedGraph::from_json(bad).is_err());
    }

    #[test]
    fn theta_graph_is_not_gamma() {
        let t = build_theta_leaf();
        check_trivalent(&t);
        assert_eq!(t.betti(), 2);
        assert!(!is_isomorphic(&t, &build_gamma(2, 1).unwrap()));
        assert!(t.loop_chain().is_none());
    }

    #[test]
    fn gamma_g_0_has_no_leaves() {
        let g = build_gamma(3, 0).unwrap();
        assert_eq!(g.betti(), 3);
        assert!(g.leaves().is_empty());
        check_trivalent(&g);
    }
}
