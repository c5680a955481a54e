//! Oriented link diagrams and their basic predicates.

use serde::Serialize;

use crate::error::DiagramError;
use crate::map::{opposite, rot_next, rot_prev, slot, vertex_of, Dart, PlanarMap, Vertex, VertexSet};

/// An oriented link projection on the sphere.
///
/// Every vertex of the underlying map is a crossing. `outgoing[d]` records
/// whether the strand leaves its crossing through dart `d`. Crossingless
/// unknotted components are counted in `free_loops`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkDiagram {
    map: PlanarMap,
    outgoing: Vec<bool>,
    free_loops: usize,
}

/// Position of a boundary point or dart in a local four-point frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Corner {
    NW,
    NE,
    SE,
    SW,
}

/// How the four boundary points of a tangle are joined inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ConnectionPath {
    /// NW-NE and SW-SE
    H,
    /// NW-SW and NE-SE
    V,
    /// NW-SE and NE-SW
    X,
}

impl LinkDiagram {
    /// Builds a diagram from a crossing-only map, orienting each component
    /// from its lowest dart.
    pub fn from_map(map: PlanarMap) -> Result<Self, DiagramError> {
        if map.vertices().iter().any(|v| !v.is_crossing()) {
            return Err(DiagramError::MalformedCode("link diagram contains a port".into()));
        }
        map.check_planar()?;
        let outgoing = orient_strands(&map, &vec![None; map.num_darts()])?;
        Ok(LinkDiagram {
            map,
            outgoing,
            free_loops: 0,
        })
    }

    pub fn with_orientation(map: PlanarMap, outgoing: Vec<bool>) -> Result<Self, DiagramError> {
        if map.vertices().iter().any(|v| !v.is_crossing()) {
            return Err(DiagramError::MalformedCode("link diagram contains a port".into()));
        }
        map.check_planar()?;
        let hints: Vec<Option<bool>> = outgoing.iter().map(|&b| Some(b)).collect();
        let outgoing = orient_strands(&map, &hints)?;
        Ok(LinkDiagram {
            map,
            outgoing,
            free_loops: 0,
        })
    }

    /// The crossingless diagram of the unknot.
    pub fn unknot() -> Self {
        LinkDiagram {
            map: PlanarMap::empty(),
            outgoing: vec![],
            free_loops: 1,
        }
    }

    /// The same diagram with `n` extra crossingless unknotted circles.
    pub fn with_free_loops(mut self, n: usize) -> Self {
        self.free_loops += n;
        self
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn map(&self) -> &PlanarMap {
        &self.map
    }

    pub fn num_crossings(&self) -> usize {
        self.map.num_vertices()
    }

    pub fn is_outgoing(&self, d: Dart) -> bool {
        self.outgoing[d]
    }

    pub fn outgoing(&self) -> &[bool] {
        &self.outgoing
    }

    /// Strand components, each as the list of its outgoing darts in order.
    pub fn strand_components(&self) -> Vec<Vec<Dart>> {
        let mut seen = vec![false; self.map.num_darts()];
        let mut comps = Vec::new();
        for start in 0..self.map.num_darts() {
            if seen[start] || !self.outgoing[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                seen[self.map.twin(d)] = true;
                comp.push(d);
                d = opposite(self.map.twin(d));
            }
            comps.push(comp);
        }
        comps
    }

    pub fn component_count(&self) -> usize {
        self.strand_components().len() + self.free_loops
    }

    /// Component index of every dart.
    pub fn component_of_darts(&self) -> Vec<usize> {
        let mut comp = vec![0; self.map.num_darts()];
        for (i, c) in self.strand_components().iter().enumerate() {
            for &d in c {
                comp[d] = i;
                comp[self.map.twin(d)] = i;
            }
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        let parts = self.map.components().len() + self.free_loops;
        parts <= 1
    }

    /// Whether every strand alternates over and under.
    pub fn is_alternating(&self) -> bool {
        (0..self.map.num_darts()).all(|d| {
            let t = self.map.twin(d);
            self.map.is_over(d) != self.map.is_over(t)
        })
    }

    /// No crossing meets the same face at two of its corners.
    pub fn is_reduced(&self) -> bool {
        let (face_of, _) = self.map.face_index();
        (0..self.map.num_vertices()).all(|v| {
            let mut f: Vec<usize> = (4 * v..4 * v + 4).map(|d| face_of[d]).collect();
            f.sort_unstable();
            f.dedup();
            f.len() == 4
        })
    }

    /// No circle meets the diagram in two points with crossings on both
    /// sides. Such a circle crosses two edges that border the same two faces.
    pub fn is_prime(&self) -> bool {
        if self.map.num_vertices() == 0 {
            return true;
        }
        let (face_of, _) = self.map.face_index();
        let edges = edge_list(&self.map);
        // faces on both sides of each edge
        let sides: Vec<(usize, usize)> = edges
            .iter()
            .map(|&d| {
                let a = face_of[rot_next(d)];
                let b = face_of[rot_next(self.map.twin(d))];
                (a.min(b), a.max(b))
            })
            .collect();
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                if sides[i] != sides[j] || sides[i].0 == sides[i].1 {
                    continue;
                }
                if separates_crossings(&self.map, &[edges[i], edges[j]]) {
                    return false;
                }
            }
        }
        true
    }

    /// Seifert circles of the oriented smoothing, each as a cycle of
    /// outgoing darts.
    pub fn seifert_circles(&self) -> Vec<Vec<Dart>> {
        let mut seen = vec![false; self.map.num_darts()];
        let mut circles = Vec::new();
        for start in 0..self.map.num_darts() {
            if seen[start] || !self.outgoing[start] {
                continue;
            }
            let mut circle = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                circle.push(d);
                let incoming = self.map.twin(d);
                d = self.smoothing_partner(incoming);
            }
            circles.push(circle);
        }
        circles
    }

    /// The outgoing dart joined to an incoming dart by the oriented smoothing.
    pub fn smoothing_partner(&self, incoming: Dart) -> Dart {
        let n = rot_next(incoming);
        if self.outgoing[n] {
            n
        } else {
            rot_prev(incoming)
        }
    }

    /// Seifert circle count and the genus of the Seifert surface.
    pub fn seifert_genus(&self) -> (usize, i64) {
        let s = self.seifert_circles().len() + self.free_loops;
        let c = self.num_crossings() as i64;
        let mu = self.component_count() as i64;
        (s, (c - s as i64 - mu + 2) / 2)
    }

    /// Writhe sign of each crossing (+1 when the over strand crosses the
    /// under strand from right to left).
    pub fn crossing_signs(&self) -> Vec<i32> {
        (0..self.map.num_vertices())
            .map(|v| {
                let under_in = (4 * v..4 * v + 4).find(|&d| !self.map.is_over(d) && !self.outgoing[d]).unwrap();
                // over strand runs from rot_prev(under_in) to rot_next(under_in) when positive
                if self.outgoing[rot_next(under_in)] {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    /// Mirror image: every crossing switched.
    pub fn mirror(&self) -> LinkDiagram {
        let vertices = self
            .map
            .vertices()
            .iter()
            .map(|v| match *v {
                Vertex::Crossing { odd_over } => Vertex::Crossing { odd_over: !odd_over },
                p => p,
            })
            .collect();
        let map = PlanarMap::from_parts_unchecked(vertices, self.map.twins().to_vec());
        LinkDiagram {
            map,
            outgoing: self.outgoing.clone(),
            free_loops: self.free_loops,
        }
    }

    /// Which pairs of the four boundary points of `set` are joined inside it.
    /// `frame` lists the boundary darts (inside `set`) at NW, SW, SE, NE,
    /// the counterclockwise order returned by [`PlanarMap::boundary_cycle`].
    pub fn connection_path(&self, set: VertexSet, frame: [Dart; 4]) -> ConnectionPath {
        connection_path_in(&self.map, set, frame)
    }

    /// Entry/exit pattern of the frame: `true` where the strand enters `set`.
    pub fn entry_pattern(&self, frame: [Dart; 4]) -> [bool; 4] {
        frame.map(|d| !self.outgoing[d])
    }

    pub fn to_json(&self) -> serde_json::Value {
        let crossings: Vec<_> = (0..self.map.num_vertices())
            .map(|v| {
                serde_json::json!({
                    "id": v,
                    "over_slots": if self.map.is_over(4 * v + 1) { [1, 3] } else { [0, 2] },
                })
            })
            .collect();
        let edges: Vec<_> = edge_list(&self.map)
            .into_iter()
            .map(|d| {
                let (a, b) = if self.outgoing[d] {
                    (d, self.map.twin(d))
                } else {
                    (self.map.twin(d), d)
                };
                serde_json::json!({
                    "from": [vertex_of(a), slot(a)],
                    "to": [vertex_of(b), slot(b)],
                })
            })
            .collect();
        let rotation: Vec<Vec<usize>> = (0..self.map.num_vertices()).map(|v| (4 * v..4 * v + 4).collect()).collect();
        let orientation: Vec<&str> = self.outgoing.iter().map(|&o| if o { "out" } else { "in" }).collect();
        serde_json::json!({
            "crossings": crossings,
            "edges": edges,
            "rotation": rotation,
            "orientation": orientation,
            "components": self.component_count(),
        })
    }
}

pub(crate) fn connection_path_in(map: &PlanarMap, set: VertexSet, frame: [Dart; 4]) -> ConnectionPath {
    let partner = |d: Dart| -> Dart {
        // walk the strand from boundary dart d through the inside
        let mut e = d;
        loop {
            let o = opposite(e);
            let t = map.twin(o);
            if !set.contains(vertex_of(t)) {
                return o;
            }
            e = t;
        }
    };
    let nw = frame[0];
    let p = partner(nw);
    if p == frame[3] {
        ConnectionPath::H
    } else if p == frame[1] {
        ConnectionPath::V
    } else {
        ConnectionPath::X
    }
}

/// One representative dart per edge (the smaller of each pair).
pub fn edge_list(map: &PlanarMap) -> Vec<Dart> {
    (0..map.num_darts()).filter(|&d| d < map.twin(d)).collect()
}

fn separates_crossings(map: &PlanarMap, cut: &[Dart]) -> bool {
    let n = map.num_vertices();
    let is_cut = |d: Dart| cut.iter().any(|&c| c == d || map.twin(c) == d);
    let mut seen = VertexSet::singleton(0);
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for d in 4 * v..4 * v + 4 {
            if is_cut(d) {
                continue;
            }
            let w = vertex_of(map.twin(d));
            if !seen.contains(w) {
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    seen.len() < n
}

/// Completes a partial orientation so that twins and opposite darts
/// disagree. Components with no hint are oriented from their lowest dart.
pub(crate) fn orient_strands(map: &PlanarMap, hints: &[Option<bool>]) -> Result<Vec<bool>, DiagramError> {
    let nd = map.num_darts();
    let mut out: Vec<Option<bool>> = vec![None; nd];
    let mut stack: Vec<Dart> = Vec::new();
    for d in 0..nd {
        if let Some(v) = hints[d] {
            assign(&mut out, &mut stack, d, v)?;
        }
    }
    propagate(map, &mut out, &mut stack)?;
    for d in 0..nd {
        if out[d].is_none() {
            assign(&mut out, &mut stack, d, true)?;
            propagate(map, &mut out, &mut stack)?;
        }
    }
    Ok(out.into_iter().map(|x| x.unwrap()).collect())
}

fn assign(out: &mut [Option<bool>], stack: &mut Vec<Dart>, d: Dart, v: bool) -> Result<(), DiagramError> {
    match out[d] {
        Some(x) if x != v => Err(DiagramError::MalformedCode("inconsistent strand orientation".into())),
        Some(_) => Ok(()),
        None => {
            out[d] = Some(v);
            stack.push(d);
            Ok(())
        }
    }
}

fn propagate(map: &PlanarMap, out: &mut [Option<bool>], stack: &mut Vec<Dart>) -> Result<(), DiagramError> {
    while let Some(d) = stack.pop() {
        let v = out[d].unwrap();
        assign(out, stack, map.twin(d), !v)?;
        assign(out, stack, opposite(d), !v)?;
    }
    Ok(())
}
