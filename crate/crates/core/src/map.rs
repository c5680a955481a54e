//! Four-valent planar maps stored as dart arrays.
//!
//! Vertex `v` owns darts `4v..4v+4` listed counterclockwise, so the rotation
//! system is implicit in the dart numbering. The only stored permutation is
//! the edge involution `twin`.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DiagramError;

pub type Dart = usize;

/// A vertex of a 4-valent map: a real crossing or an opaque four-ended port
/// standing for a tangle contracted away.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Vertex {
    /// `odd_over`: the strand through slots 1 and 3 passes over.
    Crossing {
        odd_over: bool,
    },
    Port(u32),
}

impl Vertex {
    pub fn is_crossing(self) -> bool {
        matches!(self, Vertex::Crossing { .. })
    }
}

#[inline]
pub fn vertex_of(d: Dart) -> usize {
    d / 4
}

#[inline]
pub fn slot(d: Dart) -> usize {
    d % 4
}

#[inline]
pub fn rot_next(d: Dart) -> Dart {
    (d & !3) | ((d + 1) & 3)
}

#[inline]
pub fn rot_prev(d: Dart) -> Dart {
    (d & !3) | ((d + 3) & 3)
}

/// The dart continuing the same strand straight through the vertex.
#[inline]
pub fn opposite(d: Dart) -> Dart {
    (d & !3) | ((d + 2) & 3)
}

/// Set of at most 128 vertices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(pub u128);

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut s = VertexSet::empty();
        for v in it {
            s.insert(v);
        }
        s
    }
}

impl VertexSet {
    pub const MAX: usize = 128;

    pub fn empty() -> Self {
        VertexSet(0)
    }

    pub fn full(n: usize) -> Self {
        if n >= 128 {
            VertexSet(u128::MAX)
        } else {
            VertexSet((1u128 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u128 << v)
    }

    #[inline]
    pub fn contains(self, v: usize) -> bool {
        (self.0 >> v) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u128 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u128 << v);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        VertexSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        VertexSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        VertexSet(self.0 & !o.0)
    }

    pub fn complement(self, n: usize) -> Self {
        VertexSet(!self.0 & VertexSet::full(n).0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: Self) -> bool {
        self.0 & o.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A 4-valent map on the sphere (or a disjoint union of spheres).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanarMap {
    vertices: Vec<Vertex>,
    twin: Vec<Dart>,
}

impl PlanarMap {
    pub fn new(vertices: Vec<Vertex>, twin: Vec<Dart>) -> Result<Self, DiagramError> {
        if twin.len() != 4 * vertices.len() {
            return Err(DiagramError::MalformedCode("dart count does not match vertex count".into()));
        }
        if vertices.len() > VertexSet::MAX {
            return Err(DiagramError::TooLarge(vertices.len()));
        }
        for (d, &t) in twin.iter().enumerate() {
            if t >= twin.len() || twin[t] != d || t == d {
                return Err(DiagramError::MalformedCode(format!(
                    "dart {d} is not paired by a fixed-point-free involution"
                )));
            }
        }
        Ok(PlanarMap { vertices, twin })
    }

    pub(crate) fn from_parts_unchecked(vertices: Vec<Vertex>, twin: Vec<Dart>) -> Self {
        debug_assert!(PlanarMap::new(vertices.clone(), twin.clone()).is_ok());
        PlanarMap { vertices, twin }
    }

    pub fn empty() -> Self {
        PlanarMap {
            vertices: vec![],
            twin: vec![],
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_darts(&self) -> usize {
        self.twin.len()
    }

    pub fn num_edges(&self) -> usize {
        self.twin.len() / 2
    }

    pub fn vertex(&self, v: usize) -> Vertex {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn twin(&self, d: Dart) -> Dart {
        self.twin[d]
    }

    pub fn twins(&self) -> &[Dart] {
        &self.twin
    }

    pub fn crossing_set(&self) -> VertexSet {
        VertexSet::from_iter((0..self.vertices.len()).filter(|&v| self.vertices[v].is_crossing()))
    }

    pub fn num_crossings(&self) -> usize {
        self.vertices.iter().filter(|v| v.is_crossing()).count()
    }

    /// Whether dart `d` lies on the over strand of its crossing.
    pub fn is_over(&self, d: Dart) -> bool {
        match self.vertices[vertex_of(d)] {
            Vertex::Crossing { odd_over } => (slot(d) % 2 == 1) == odd_over,
            Vertex::Port(_) => false,
        }
    }

    /// The face permutation `d -> rot_next(twin(d))`; each orbit is one face.
    pub fn face_step(&self, d: Dart) -> Dart {
        rot_next(self.twin[d])
    }

    /// Faces as dart cycles. Dart `e` in a cycle stands for the corner
    /// between `rot_prev(e)` and `e`.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let mut seen = vec![false; self.twin.len()];
        let mut faces = Vec::new();
        for start in 0..self.twin.len() {
            if seen[start] {
                continue;
            }
            let mut face = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                face.push(d);
                d = self.face_step(d);
            }
            faces.push(face);
        }
        faces
    }

    /// `face_of[d]` is the face holding the corner between `rot_prev(d)` and `d`.
    pub fn face_index(&self) -> (Vec<usize>, usize) {
        let mut face_of = vec![usize::MAX; self.twin.len()];
        let mut count = 0;
        for (i, face) in self.faces().into_iter().enumerate() {
            for d in face {
                face_of[d] = i;
            }
            count = i + 1;
        }
        (face_of, count)
    }

    /// Connected components of the underlying graph, as vertex sets.
    pub fn components(&self) -> Vec<VertexSet> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut set = VertexSet::empty();
            let mut stack = vec![s];
            comp[s] = id;
            while let Some(v) = stack.pop() {
                set.insert(v);
                for d in 4 * v..4 * v + 4 {
                    let w = vertex_of(self.twin[d]);
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            out.push(set);
        }
        out
    }

    /// `V - E + F`, together with the value a sphere embedding of every
    /// component requires.
    pub fn euler_characteristic(&self) -> (i64, i64) {
        let v = self.vertices.len() as i64;
        let e = self.num_edges() as i64;
        let f = self.faces().len() as i64;
        (v - e + f, 2 * self.components().len() as i64)
    }

    pub fn check_planar(&self) -> Result<(), DiagramError> {
        let (euler, expected) = self.euler_characteristic();
        if euler == expected {
            Ok(())
        } else {
            Err(DiagramError::NonPlanar { euler, expected })
        }
    }

    /// Darts leaving `set` (dart inside, twin outside).
    pub fn boundary_darts(&self, set: VertexSet) -> Vec<Dart> {
        set.iter()
            .flat_map(|v| 4 * v..4 * v + 4)
            .filter(|&d| !set.contains(vertex_of(self.twin[d])))
            .collect()
    }

    /// Boundary darts of a connected vertex set whose complement is also
    /// connected, in the counterclockwise order they take around the set
    /// once it is contracted to a point. Starts at `start` when given.
    pub fn boundary_cycle(&self, set: VertexSet, start: Option<Dart>) -> Vec<Dart> {
        let boundary = self.boundary_darts(set);
        let Some(&first) = start.as_ref().or(boundary.first()) else {
            return vec![];
        };
        debug_assert!(boundary.contains(&first));
        let mut order = vec![first];
        let mut d = first;
        loop {
            let mut e = rot_next(d);
            while set.contains(vertex_of(self.twin[e])) {
                e = rot_next(self.twin[e]);
            }
            if e == first {
                break;
            }
            order.push(e);
            d = e;
            if order.len() > boundary.len() {
                break;
            }
        }
        order
    }

    /// Contract a connected vertex set into a single port vertex. Returns the
    /// new map and, for every new vertex, the old vertex it came from
    /// (`None` for the port).
    pub fn contract(&self, set: VertexSet, port: u32) -> (PlanarMap, Vec<Option<usize>>) {
        let cycle = self.boundary_cycle(set, None);
        assert_eq!(cycle.len(), 4, "contracted set must have four boundary darts");
        let keep: Vec<usize> = (0..self.vertices.len()).filter(|&v| !set.contains(v)).collect();
        let mut new_index = vec![usize::MAX; self.vertices.len()];
        for (i, &v) in keep.iter().enumerate() {
            new_index[v] = i;
        }
        let port_v = keep.len();
        let mut vertices: Vec<Vertex> = keep.iter().map(|&v| self.vertices[v]).collect();
        vertices.push(Vertex::Port(port));
        let mut twin = vec![0; 4 * vertices.len()];
        let mut port_dart = vec![usize::MAX; self.twin.len()];
        for (i, &d) in cycle.iter().enumerate() {
            port_dart[d] = 4 * port_v + i;
        }
        let map_dart = |d: Dart| -> Dart {
            if set.contains(vertex_of(d)) {
                port_dart[d]
            } else {
                4 * new_index[vertex_of(d)] + slot(d)
            }
        };
        for &v in &keep {
            for d in 4 * v..4 * v + 4 {
                let nd = map_dart(d);
                let nt = map_dart(self.twin[d]);
                twin[nd] = nt;
                twin[nt] = nd;
            }
        }
        // port darts wired to each other (set adjacent only to itself) are
        // impossible for a proper bond, so every port dart is now paired
        let mut origin: Vec<Option<usize>> = keep.iter().map(|&v| Some(v)).collect();
        origin.push(None);
        (PlanarMap::from_parts_unchecked(vertices, twin), origin)
    }

    /// Contract each of several disjoint sets (each with four boundary darts,
    /// connected with connected complement) into a port `Port(ids[i])`.
    /// Returns the quotient map, the origin of every kept vertex, and for
    /// each port the original boundary darts in the order of its slots.
    pub fn quotient(&self, sets: &[VertexSet], ids: &[u32]) -> (PlanarMap, Vec<Option<usize>>, Vec<Vec<Dart>>) {
        let taken = sets.iter().fold(VertexSet::empty(), |a, &s| a.union(s));
        let keep: Vec<usize> = (0..self.vertices.len()).filter(|&v| !taken.contains(v)).collect();
        let mut new_dart = vec![usize::MAX; self.twin.len()];
        for (i, &v) in keep.iter().enumerate() {
            for s in 0..4 {
                new_dart[4 * v + s] = 4 * i + s;
            }
        }
        let mut vertices: Vec<Vertex> = keep.iter().map(|&v| self.vertices[v]).collect();
        let mut cycles = Vec::with_capacity(sets.len());
        for (k, &set) in sets.iter().enumerate() {
            let cycle = self.boundary_cycle(set, None);
            assert_eq!(cycle.len(), 4, "contracted set must have four boundary darts");
            let p = vertices.len();
            for (i, &d) in cycle.iter().enumerate() {
                new_dart[d] = 4 * p + i;
            }
            vertices.push(Vertex::Port(ids[k]));
            cycles.push(cycle);
        }
        let mut twin = vec![usize::MAX; 4 * vertices.len()];
        for d in 0..self.twin.len() {
            let nd = new_dart[d];
            if nd != usize::MAX {
                twin[nd] = new_dart[self.twin[d]];
            }
        }
        debug_assert!(twin.iter().all(|&t| t != usize::MAX));
        let mut origin: Vec<Option<usize>> = keep.iter().map(|&v| Some(v)).collect();
        origin.extend(sets.iter().map(|_| None));
        (PlanarMap::from_parts_unchecked(vertices, twin), origin, cycles)
    }

    /// Turn the vertices of `set` over by a half turn about an axis in the
    /// plane: their rotations reverse (slots 1 and 3 swap) and over and
    /// under exchange. Applied to every vertex this is the same diagram seen
    /// from the other side of the sphere.
    pub fn flip_vertices(&self, set: VertexSet) -> PlanarMap {
        let sigma = |d: Dart| if set.contains(vertex_of(d)) && d & 1 == 1 { d ^ 2 } else { d };
        let mut twin = vec![0; self.twin.len()];
        for d in 0..self.twin.len() {
            twin[sigma(d)] = sigma(self.twin[d]);
        }
        let vertices = self
            .vertices
            .iter()
            .enumerate()
            .map(|(v, &x)| match x {
                Vertex::Crossing { odd_over } if set.contains(v) => Vertex::Crossing { odd_over: !odd_over },
                other => other,
            })
            .collect();
        PlanarMap::from_parts_unchecked(vertices, twin)
    }

    /// The whole map turned over; see [`PlanarMap::flip_vertices`].
    pub fn flip(&self) -> PlanarMap {
        self.flip_vertices(VertexSet::full(self.vertices.len()))
    }

    /// Relabel vertices, dropping those not listed. Darts of removed vertices
    /// must not be referenced by kept ones.
    pub(crate) fn permute_vertices(&self, order: &[usize]) -> PlanarMap {
        let mut new_index = vec![usize::MAX; self.vertices.len()];
        for (i, &v) in order.iter().enumerate() {
            new_index[v] = i;
        }
        let vertices = order.iter().map(|&v| self.vertices[v]).collect::<Vec<_>>();
        let mut twin = vec![0; 4 * order.len()];
        for (i, &v) in order.iter().enumerate() {
            for s in 0..4 {
                let t = self.twin[4 * v + s];
                twin[4 * i + s] = 4 * new_index[vertex_of(t)] + slot(t);
            }
        }
        PlanarMap::from_parts_unchecked(vertices, twin)
    }

    /// Breadth-first traversal code of the connected component of `start`,
    /// read with `start` as the first dart of its vertex. Equal codes for two
    /// starts mean an orientation-preserving isomorphism sending one start to
    /// the other.
    pub fn traversal_code(&self, start: Dart) -> Vec<u32> {
        let mut first = vec![usize::MAX; self.vertices.len()];
        let mut order = vec![usize::MAX; self.vertices.len()];
        let mut queue = VecDeque::new();
        let v0 = vertex_of(start);
        first[v0] = start;
        order[v0] = 0;
        queue.push_back(v0);
        let mut next = 1;
        let mut code = Vec::with_capacity(9 * self.vertices.len());
        while let Some(v) = queue.pop_front() {
            let f = first[v];
            code.push(self.vertex_code(f));
            for k in 0..4 {
                let d = (f & !3) | ((f + k) & 3);
                let t = self.twin[d];
                let w = vertex_of(t);
                if order[w] == usize::MAX {
                    order[w] = next;
                    first[w] = t;
                    next += 1;
                    queue.push_back(w);
                }
                let offset = (slot(t) + 4 - slot(first[w])) % 4;
                code.push((4 * order[w] + offset) as u32);
            }
        }
        code
    }

    fn vertex_code(&self, f: Dart) -> u32 {
        match self.vertices[vertex_of(f)] {
            Vertex::Crossing { .. } => {
                if self.is_over(f) {
                    1
                } else {
                    0
                }
            }
            Vertex::Port(p) => 2 + p,
        }
    }

    /// Lexicographically least traversal code over all start darts. Two
    /// connected maps are isomorphic (orientation-preserving, over/under and
    /// ports respected) iff their canonical codes agree.
    pub fn canonical_code(&self) -> Vec<u32> {
        (0..self.twin.len()).map(|d| self.traversal_code(d)).min().unwrap_or_default()
    }

    /// Extend `from -> to` to a full dart bijection commuting with `twin` and
    /// the rotation and preserving vertex kinds and over/under, if possible.
    /// Only defined for connected maps.
    pub fn extend_isomorphism(&self, other: &PlanarMap, from: Dart, to: Dart) -> Option<Vec<Dart>> {
        if self.twin.len() != other.twin.len() {
            return None;
        }
        let mut image = vec![usize::MAX; self.twin.len()];
        let mut used = vec![false; other.twin.len()];
        let mut stack = vec![(from, to)];
        while let Some((a, b)) = stack.pop() {
            if image[a] != usize::MAX {
                if image[a] != b {
                    return None;
                }
                continue;
            }
            if used[b] {
                return None;
            }
            // map the whole vertex at once
            let (va, vb) = (vertex_of(a), vertex_of(b));
            match (self.vertices[va], other.vertices[vb]) {
                (Vertex::Crossing { .. }, Vertex::Crossing { .. }) => {
                    if self.is_over(a) != other.is_over(b) {
                        return None;
                    }
                }
                (Vertex::Port(p), Vertex::Port(q)) if p == q => {}
                _ => return None,
            }
            for k in 0..4 {
                let da = (a & !3) | ((a + k) & 3);
                let db = (b & !3) | ((b + k) & 3);
                if image[da] != usize::MAX {
                    if image[da] != db {
                        return None;
                    }
                    continue;
                }
                if used[db] {
                    return None;
                }
                image[da] = db;
                used[db] = true;
                stack.push((self.twin[da], other.twin[db]));
            }
        }
        if image.contains(&usize::MAX) {
            return None;
        }
        Some(image)
    }

    /// All orientation-preserving automorphisms of a connected map.
    pub fn automorphisms(&self) -> Vec<Vec<Dart>> {
        if self.twin.is_empty() {
            return vec![vec![]];
        }
        (0..self.twin.len()).filter_map(|t| self.extend_isomorphism(self, 0, t)).collect()
    }

    pub fn is_isomorphic(&self, other: &PlanarMap) -> bool {
        if self.twin.len() != other.twin.len() {
            return false;
        }
        if self.twin.is_empty() {
            return true;
        }
        (0..other.twin.len()).any(|t| self.extend_isomorphism(other, 0, t).is_some())
    }
}
