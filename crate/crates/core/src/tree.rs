//! Canonical and essential structure trees, their isomorphisms and
//! finite-order automorphisms.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::decomposition::{BoxRef, Decomposition, RegionKind};
use crate::error::DecompositionError;
use crate::fraction::Fraction;
use crate::map::PlanarMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum TreeLabel {
    Weight(i64),
    Rational(Fraction),
    #[serde(rename = "J")]
    Jewel,
}

impl TreeLabel {
    /// Integer fractions become plain weights.
    pub fn from_fraction(f: Fraction) -> Self {
        match f.as_ratio() {
            Some((p, 1)) => TreeLabel::Weight(p),
            _ => TreeLabel::Rational(f),
        }
    }
}

impl fmt::Display for TreeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeLabel::Weight(a) => write!(f, "a={a}"),
            TreeLabel::Rational(r) => write!(f, "{r}"),
            TreeLabel::Jewel => write!(f, "J"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Canonical,
    Essential,
}

/// A position around a vertex: an edge of the tree or the open half-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Slot {
    Edge(usize),
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeVertex {
    pub label: TreeLabel,
    /// Number of crossings represented by the vertex.
    pub crossings: usize,
    /// Incident slots; a cyclic sequence when `ordered`.
    pub slots: Vec<Slot>,
    pub ordered: bool,
    /// Decomposition regions merged into this vertex.
    pub regions: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TreeEdge {
    pub ends: (usize, usize),
    /// Index of the circle in the canonical family.
    pub circle: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureTree {
    pub kind: TreeKind,
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
    /// Vertex carrying the open half-edge of a tangle tree.
    pub open_edge: Option<usize>,
}

/// Canonical structure tree of a diagram map (a map with one box vertex
/// gives the tree of the tangle, with an open edge).
pub fn canonical_tree(map: &PlanarMap) -> Result<StructureTree, DecompositionError> {
    Ok(StructureTree::canonical(&Decomposition::new(map)?))
}

pub fn essential_tree(map: &PlanarMap) -> Result<StructureTree, DecompositionError> {
    Ok(StructureTree::essential(&Decomposition::new(map)?))
}

impl StructureTree {
    pub fn canonical(dec: &Decomposition) -> Self {
        let vertices = dec
            .regions
            .iter()
            .enumerate()
            .map(|(i, r)| TreeVertex {
                label: match r.kind {
                    RegionKind::Tbd => TreeLabel::Weight(r.total_weight),
                    RegionKind::Jewel => TreeLabel::Jewel,
                },
                crossings: r.crossings.len(),
                slots: r.boxes.iter().map(|&b| slot_of(b)).collect(),
                ordered: r.kind == RegionKind::Tbd,
                regions: vec![i],
            })
            .collect();
        let edges = (0..dec.canonical.len())
            .map(|c| TreeEdge {
                ends: dec.sides(c),
                circle: c,
            })
            .collect();
        let open_edge = dec.regions.iter().position(|r| !r.open.is_empty());
        StructureTree {
            kind: TreeKind::Canonical,
            vertices,
            edges,
            open_edge,
        }
    }

    pub fn essential(dec: &Decomposition) -> Self {
        let open_edge_region = dec.regions.iter().position(|r| !r.open.is_empty());
        if let Some(f) = dec.rational_chain.as_ref().and_then(|_| dec.chain_fraction()) {
            let label = TreeLabel::from_fraction(f);
            return StructureTree::single(label, dec.map.num_crossings(), (0..dec.regions.len()).collect(), false);
        }
        if let [t] = &dec.rational_tangles[..] {
            if matches!(t.boundary, BoxRef::Open(_)) {
                let label = TreeLabel::from_fraction(t.fraction);
                return StructureTree::single(label, dec.map.num_crossings(), t.regions.clone(), true);
            }
        }
        // region -> essential vertex
        let mut owner: Vec<Option<usize>> = vec![None; dec.regions.len()];
        let mut vertices = Vec::new();
        for (i, r) in dec.regions.iter().enumerate() {
            if dec.rational_tangles.iter().any(|t| t.regions.contains(&i)) {
                continue;
            }
            owner[i] = Some(vertices.len());
            vertices.push(TreeVertex {
                label: match r.kind {
                    RegionKind::Tbd => TreeLabel::Weight(r.total_weight),
                    RegionKind::Jewel => TreeLabel::Jewel,
                },
                crossings: r.crossings.len(),
                slots: r.boxes.iter().map(|&b| slot_of(b)).collect(),
                ordered: r.kind == RegionKind::Tbd,
                regions: vec![i],
            });
        }
        for t in &dec.rational_tangles {
            for &r in &t.regions {
                owner[r] = Some(vertices.len());
            }
            vertices.push(TreeVertex {
                label: TreeLabel::from_fraction(t.fraction),
                crossings: t.regions.iter().map(|&r| dec.regions[r].crossings.len()).sum(),
                slots: vec![slot_of(t.boundary)],
                ordered: false,
                regions: t.regions.clone(),
            });
        }
        // renumber slots from canonical circle ids to essential edge ids
        let edge_of: BTreeMap<usize, usize> = dec.essential.iter().enumerate().map(|(e, &c)| (c, e)).collect();
        for v in &mut vertices {
            v.slots = v
                .slots
                .iter()
                .filter_map(|s| match s {
                    Slot::Edge(c) => edge_of.get(c).map(|&e| Slot::Edge(e)),
                    Slot::Open => Some(Slot::Open),
                })
                .collect();
        }
        let edges = dec
            .essential
            .iter()
            .map(|&c| {
                let (a, b) = dec.sides(c);
                TreeEdge {
                    ends: (owner[a].unwrap(), owner[b].unwrap()),
                    circle: c,
                }
            })
            .collect();
        let open_edge = open_edge_region.and_then(|r| owner[r]);
        StructureTree {
            kind: TreeKind::Essential,
            vertices,
            edges,
            open_edge,
        }
    }

    fn single(label: TreeLabel, crossings: usize, regions: Vec<usize>, open: bool) -> Self {
        let slots = if open { vec![Slot::Open] } else { vec![] };
        StructureTree {
            kind: TreeKind::Essential,
            vertices: vec![TreeVertex {
                label,
                crossings,
                slots,
                ordered: false,
                regions,
            }],
            edges: vec![],
            open_edge: open.then_some(0),
        }
    }

    /// An abstract tree with unordered vertices.
    pub fn from_edges(kind: TreeKind, labels: Vec<TreeLabel>, edges: &[(usize, usize)]) -> Self {
        let mut vertices: Vec<TreeVertex> = labels
            .into_iter()
            .enumerate()
            .map(|(i, label)| TreeVertex {
                label,
                crossings: 0,
                slots: vec![],
                ordered: false,
                regions: vec![i],
            })
            .collect();
        for (e, &(a, b)) in edges.iter().enumerate() {
            vertices[a].slots.push(Slot::Edge(e));
            vertices[b].slots.push(Slot::Edge(e));
        }
        let edges = edges.iter().enumerate().map(|(e, &ends)| TreeEdge { ends, circle: e }).collect();
        StructureTree {
            kind,
            vertices,
            edges,
            open_edge: None,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.ends.0 == v || e.ends.1 == v).count()
    }

    /// Vertex at the other end of edge `e` from `v`.
    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e].ends;
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.vertices[v]
            .slots
            .iter()
            .filter_map(|s| match *s {
                Slot::Edge(e) => Some(self.other_end(e, v)),
                Slot::Open => None,
            })
            .collect()
    }

    /// Connected and acyclic.
    pub fn is_tree(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 || self.edges.len() + 1 != n {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph structure_tree {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!("  n{i} [label=\"{}\"];\n", v.label));
        }
        for e in &self.edges {
            out.push_str(&format!("  n{} -- n{};\n", e.ends.0, e.ends.1));
        }
        if let Some(v) = self.open_edge {
            out.push_str("  open [shape=point];\n");
            out.push_str(&format!("  n{v} -- open;\n"));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("tree serializes")
    }
}

fn slot_of(b: BoxRef) -> Slot {
    match b {
        BoxRef::Circle(c) => Slot::Edge(c),
        BoxRef::Open(_) => Slot::Open,
    }
}

/// A label-preserving automorphism of a structure tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeAutomorphism {
    pub vertex_map: Vec<usize>,
    pub order: usize,
}

impl TreeAutomorphism {
    pub fn new(vertex_map: Vec<usize>) -> Self {
        let order = permutation_order(&vertex_map);
        TreeAutomorphism { vertex_map, order }
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1
    }
}

/// Fixed point set of a tree automorphism. When no vertex is fixed an
/// edge is inverted and the fixed set is its midpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedSubtree {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub inverted_edge: Option<usize>,
}

impl FixedSubtree {
    pub fn edge_fixed(&self) -> bool {
        self.inverted_edge.is_some() || !self.edges.is_empty()
    }

    pub fn is_single_vertex(&self) -> bool {
        self.vertices.len() == 1 && self.edges.is_empty()
    }
}

pub fn permutation_order(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut order = 1;
    for s in 0..p.len() {
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        if len > 0 {
            order = lcm(order, len);
        }
    }
    order
}

fn lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

type Pairing = Vec<(Slot, Slot)>;

impl StructureTree {
    /// One or two central vertices.
    pub fn centers(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut alive: Vec<usize> = (0..n).collect();
        while alive.len() > 2 {
            let leaves: Vec<usize> = alive.iter().copied().filter(|&v| deg[v] <= 1).collect();
            alive.retain(|v| !leaves.contains(v));
            for l in leaves {
                for w in self.neighbors(l) {
                    deg[w] = deg[w].saturating_sub(1);
                }
            }
        }
        alive
    }

    fn children(&self, v: usize, from: Option<usize>) -> Vec<Slot> {
        let slots = &self.vertices[v].slots;
        match from.and_then(|e| slots.iter().position(|&s| s == Slot::Edge(e))) {
            Some(p) => slots[p + 1..].iter().chain(&slots[..p]).copied().collect(),
            None => slots.clone(),
        }
    }

    fn slot_code(&self, v: usize, s: Slot, strict: bool) -> String {
        match s {
            Slot::Open => "O".to_string(),
            Slot::Edge(e) => self.code(self.other_end(e, v), Some(e), strict),
        }
    }

    /// Canonical code of the subtree at `v` entered through edge `from`.
    pub fn code(&self, v: usize, from: Option<usize>, strict: bool) -> String {
        let vert = &self.vertices[v];
        let kids = self.children(v, from);
        let codes: Vec<String> = kids.iter().map(|&s| self.slot_code(v, s, strict)).collect();
        if strict && vert.ordered {
            let best = arrangements(codes.len(), from.is_none())
                .into_iter()
                .map(|perm| perm.iter().map(|&i| codes[i].clone()).collect::<Vec<_>>())
                .min()
                .unwrap_or_default();
            format!("{}<{}>", vert.label, best.join(","))
        } else {
            let mut codes = codes;
            codes.sort();
            format!("{}({})", vert.label, codes.join(","))
        }
    }

    /// Ways to pair the children of `a` (in `self`) with those of `b` (in
    /// `other`) so that paired subtrees have equal codes.
    fn pairings(&self, a: usize, fa: Option<usize>, other: &StructureTree, b: usize, fb: Option<usize>, strict: bool) -> Vec<Pairing> {
        let ka = self.children(a, fa);
        let kb = other.children(b, fb);
        if ka.len() != kb.len() {
            return vec![];
        }
        let ca: Vec<String> = ka.iter().map(|&s| self.slot_code(a, s, strict)).collect();
        let cb: Vec<String> = kb.iter().map(|&s| other.slot_code(b, s, strict)).collect();
        let mut out: Vec<Pairing> = Vec::new();
        if strict && self.vertices[a].ordered {
            for perm in arrangements(kb.len(), fb.is_none()) {
                if (0..ka.len()).all(|i| ca[i] == cb[perm[i]]) {
                    let p: Pairing = (0..ka.len()).map(|i| (ka[i], kb[perm[i]])).collect();
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        } else {
            let mut used = vec![false; kb.len()];
            let mut cur = Vec::new();
            match_children(&ka, &kb, &ca, &cb, &mut used, &mut cur, &mut out);
        }
        out
    }

    /// All vertex maps sending the subtree at `a` onto the one at `b`.
    fn all_maps(
        &self,
        a: usize,
        fa: Option<usize>,
        other: &StructureTree,
        b: usize,
        fb: Option<usize>,
        strict: bool,
        first_only: bool,
    ) -> Vec<Vec<(usize, usize)>> {
        if self.vertices[a].label != other.vertices[b].label {
            return vec![];
        }
        let mut results = Vec::new();
        for pairing in self.pairings(a, fa, other, b, fb, strict) {
            let mut partial: Vec<Vec<(usize, usize)>> = vec![vec![(a, b)]];
            for (sa, sb) in pairing {
                let (Slot::Edge(ea), Slot::Edge(eb)) = (sa, sb) else { continue };
                let sub = self.all_maps(
                    self.other_end(ea, a),
                    Some(ea),
                    other,
                    other.other_end(eb, b),
                    Some(eb),
                    strict,
                    first_only,
                );
                partial = partial
                    .iter()
                    .flat_map(|p| sub.iter().map(move |s| p.iter().chain(s).copied().collect::<Vec<_>>()))
                    .collect();
                if partial.is_empty() {
                    break;
                }
            }
            results.extend(partial);
            if first_only && !results.is_empty() {
                break;
            }
        }
        results
    }

    /// Vertex maps onto `other` preserving labels and adjacency (and, when
    /// `strict`, the cyclic order around TBD vertices up to reversal).
    fn isomorphisms(&self, other: &StructureTree, strict: bool, first_only: bool) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        if n != other.vertices.len() || self.edges.len() != other.edges.len() || self.open_edge.is_some() != other.open_edge.is_some() {
            return vec![];
        }
        let (ca, cb) = (self.centers(), other.centers());
        if ca.len() != cb.len() {
            return vec![];
        }
        let mut raw: Vec<Vec<(usize, usize)>> = Vec::new();
        if ca.len() == 1 {
            raw = self.all_maps(ca[0], None, other, cb[0], None, strict, first_only);
        } else {
            let ea = self.edge_between(ca[0], ca[1]);
            let eb = other.edge_between(cb[0], cb[1]);
            for (x, y) in [(cb[0], cb[1]), (cb[1], cb[0])] {
                let left = self.all_maps(ca[0], Some(ea), other, x, Some(eb), strict, first_only);
                let right = self.all_maps(ca[1], Some(ea), other, y, Some(eb), strict, first_only);
                for l in &left {
                    for r in &right {
                        raw.push(l.iter().chain(r).copied().collect());
                    }
                }
                if first_only && !raw.is_empty() {
                    break;
                }
            }
        }
        let mut maps: Vec<Vec<usize>> = raw
            .into_iter()
            .map(|pairs| {
                let mut m = vec![usize::MAX; n];
                for (x, y) in pairs {
                    m[x] = y;
                }
                m
            })
            .collect();
        maps.sort();
        maps.dedup();
        maps
    }

    fn edge_between(&self, a: usize, b: usize) -> usize {
        self.edges
            .iter()
            .position(|e| e.ends == (a, b) || e.ends == (b, a))
            .expect("central vertices are adjacent")
    }

    /// All automorphisms, identity first.
    pub fn automorphisms(&self, strict: bool) -> Vec<TreeAutomorphism> {
        let mut maps = self.isomorphisms(self, strict, false);
        let id: Vec<usize> = (0..self.vertices.len()).collect();
        maps.retain(|m| *m != id);
        std::iter::once(id).chain(maps).map(TreeAutomorphism::new).collect()
    }

    /// Automorphisms `φ` with `φ^q = id`: the identity first, then the
    /// non-identity ones.
    pub fn automorphisms_of_order(&self, q: usize, strict: bool) -> Vec<TreeAutomorphism> {
        self.automorphisms(strict).into_iter().filter(|a| q.is_multiple_of(a.order)).collect()
    }

    pub fn fixed_subtree(&self, phi: &TreeAutomorphism) -> FixedSubtree {
        let m = &phi.vertex_map;
        let vertices: Vec<usize> = (0..m.len()).filter(|&v| m[v] == v).collect();
        let edges = (0..self.edges.len())
            .filter(|&e| {
                let (a, b) = self.edges[e].ends;
                m[a] == a && m[b] == b
            })
            .collect();
        let inverted_edge = (0..self.edges.len()).find(|&e| {
            let (a, b) = self.edges[e].ends;
            m[a] == b && m[b] == a
        });
        FixedSubtree {
            vertices,
            edges,
            inverted_edge,
        }
    }
}

/// Paper-level isomorphism test; returns a vertex bijection.
pub fn tree_isomorphic(t1: &StructureTree, t2: &StructureTree, strict: bool) -> Option<Vec<usize>> {
    if t1.kind != t2.kind {
        return None;
    }
    t1.isomorphisms(t2, strict, true).into_iter().next()
}

/// Index orders of a cyclic sequence of length `n` allowed by an ordered
/// vertex: reversal when entered through an edge, every rotation and
/// reflection at the root.
fn arrangements(n: usize, root: bool) -> Vec<Vec<usize>> {
    let fwd: Vec<usize> = (0..n).collect();
    let rev: Vec<usize> = (0..n).rev().collect();
    if !root {
        return vec![fwd, rev];
    }
    let mut out = Vec::new();
    for r in 0..n.max(1) {
        for base in [&fwd, &rev] {
            out.push((0..n).map(|i| base[(i + r) % n]).collect());
        }
    }
    out
}

fn match_children(ka: &[Slot], kb: &[Slot], ca: &[String], cb: &[String], used: &mut [bool], cur: &mut Pairing, out: &mut Vec<Pairing>) {
    let i = cur.len();
    if i == ka.len() {
        out.push(cur.clone());
        return;
    }
    for j in 0..kb.len() {
        if !used[j] && ca[i] == cb[j] {
            used[j] = true;
            cur.push((ka[i], kb[j]));
            match_children(ka, kb, ca, cb, used, cur, out);
            cur.pop();
            used[j] = false;
        }
    }
}
