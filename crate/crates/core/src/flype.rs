//! Flypes as combinatorial rewrites, flype orbits and flype closures.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::decomposition::{BoxRef, Decomposition, Region};
use crate::diagram::LinkDiagram;
use crate::error::FlypeError;
use crate::map::{opposite, rot_next, vertex_of, Dart, PlanarMap, VertexSet};

pub const DEFAULT_BUDGET: usize = 10_000;

/// Moving the crossing `active_crossing` of a twisted band diagram across
/// the adjacent box `tangle`, from one twist region to the next.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlypeMove {
    pub tbd: usize,
    pub active_crossing: usize,
    pub source_twist: usize,
    pub target_twist: usize,
    /// Vertices of the tangle turned over by the flype.
    pub tangle: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlypeOrbit {
    pub tbd: usize,
    /// Crossings of each twist region, in band order.
    pub twist_regions: Vec<Vec<usize>>,
}

impl FlypeOrbit {
    pub fn crossings(&self) -> impl Iterator<Item = usize> + '_ {
        self.twist_regions.iter().flatten().copied()
    }
}

/// Vertices on the far side of a box of region `r`.
fn box_vertices(dec: &Decomposition, r: &Region, b: BoxRef) -> Option<VertexSet> {
    let BoxRef::Circle(c) = b else { return None };
    let inside = dec.canonical[c].inside;
    if r.crossings.is_subset(inside) {
        Some(inside.complement(dec.map.num_vertices()))
    } else {
        Some(inside)
    }
}

/// Every efficient flype: for each twist region and each neighbouring box,
/// the crossing next to that box moves across it to the adjacent twist
/// region. Moves inside a twist region are not listed.
pub fn available_flypes(d: &LinkDiagram) -> Result<Vec<FlypeMove>, FlypeError> {
    let dec = Decomposition::new(d.map())?;
    Ok(flypes_of(&dec))
}

pub fn flypes_of(dec: &Decomposition) -> Vec<FlypeMove> {
    let mut moves = Vec::new();
    for (ri, r) in dec.regions.iter().enumerate() {
        let k = r.boxes.len();
        if !r.is_tbd() || k < 2 {
            continue;
        }
        for (i, t) in r.twist_regions.iter().enumerate() {
            let (Some(&first), Some(&last)) = (t.crossings.first(), t.crossings.last()) else {
                continue;
            };
            let sides = [(first, i, (i + k - 1) % k), (last, (i + 1) % k, (i + 1) % k)];
            for (active, b, target) in sides {
                if let Some(set) = box_vertices(dec, r, r.boxes[b]) {
                    moves.push(FlypeMove {
                        tbd: ri,
                        active_crossing: active,
                        source_twist: i,
                        target_twist: target,
                        tangle: set.iter().collect(),
                    });
                }
            }
        }
    }
    moves
}

/// Apply a flype: the tangle is turned over about the axis through its
/// two boundary edges on the crossing side and the active crossing
/// reappears on its other side.
pub fn apply_flype(d: &LinkDiagram, m: &FlypeMove) -> Result<LinkDiagram, FlypeError> {
    let map = d.map();
    let n = map.num_vertices();
    let illegal = |s: &str| FlypeError::IllegalMove(s.to_string());
    if m.tangle.is_empty() {
        return Err(illegal("trivial flype: the tangle is empty"));
    }
    if m.tangle.iter().any(|&v| v >= n) || m.active_crossing >= n {
        return Err(illegal("vertex out of range"));
    }
    let a = VertexSet::from_iter(m.tangle.iter().copied());
    let c = m.active_crossing;
    if a.contains(c) || !map.vertex(c).is_crossing() {
        return Err(illegal("active crossing must be a crossing outside the tangle"));
    }
    if map.boundary_darts(a).len() != 4 {
        return Err(illegal("tangle must meet the rest of the diagram in four edges"));
    }
    let into_a = |x: Dart| a.contains(vertex_of(map.twin(x)));
    let darts: Vec<Dart> = (4 * c..4 * c + 4).collect();
    if darts.iter().filter(|&&x| into_a(x)).count() != 2 {
        return Err(illegal("active crossing must share exactly two edges with the tangle"));
    }
    let x0 = *darts
        .iter()
        .find(|&&x| into_a(x) && into_a(rot_next(x)))
        .ok_or_else(|| illegal("active crossing is not adjacent to the tangle"))?;
    let x1 = rot_next(x0);
    let x2 = rot_next(x1);
    let x3 = rot_next(x2);
    let a_nw = map.twin(x1);
    let cycle = map.boundary_cycle(a, Some(a_nw));
    if cycle.len() != 4 || cycle[1] != map.twin(x0) {
        return Err(illegal("tangle boundary is not a disk"));
    }
    let [_, a_sw, a_se, a_ne] = [cycle[0], cycle[1], cycle[2], cycle[3]];
    let (p_top, p_bot) = (map.twin(x2), map.twin(x3));
    let (q_top, q_bot) = (map.twin(a_ne), map.twin(a_se));

    let sigma = |x: Dart| if a.contains(vertex_of(x)) && x & 1 == 1 { x ^ 2 } else { x };
    let flipped = map.flip_vertices(a);
    let mut twin = flipped.twins().to_vec();
    for (u, v) in [
        (p_top, sigma(a_sw)),
        (p_bot, sigma(a_nw)),
        (x2, sigma(a_se)),
        (x3, sigma(a_ne)),
        (x1, q_top),
        (x0, q_bot),
    ] {
        twin[u] = v;
        twin[v] = u;
    }
    let new_map = PlanarMap::new(flipped.vertices().to_vec(), twin).map_err(|e| FlypeError::IllegalMove(e.to_string()))?;
    let mut out = vec![false; 4 * n];
    for x in 0..4 * n {
        out[sigma(x)] = d.is_outgoing(x);
    }
    // c now meets A at different boundary points; each edge has one head and one tail
    for x in darts {
        out[x] = !out[new_map.twin(x)];
    }
    let result = LinkDiagram::with_orientation(new_map, out).map_err(|e| FlypeError::IllegalMove(e.to_string()))?;
    Ok(result.with_free_loops(d.free_loops()))
}

/// One orbit per twisted band diagram: its twist regions.
pub fn flype_orbits(d: &LinkDiagram) -> Result<Vec<FlypeOrbit>, FlypeError> {
    let dec = Decomposition::new(d.map())?;
    Ok(dec
        .regions
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_tbd())
        .map(|(i, r)| FlypeOrbit {
            tbd: i,
            twist_regions: r.twist_regions.iter().map(|t| t.crossings.clone()).collect(),
        })
        .collect())
}

/// Isomorphism-class key of a diagram map, identifying a map with the map
/// turned over.
pub fn diagram_key(map: &PlanarMap) -> Vec<u32> {
    map.canonical_code().min(map.flip().canonical_code())
}

#[derive(Clone, Debug)]
pub struct FlypeClosure {
    /// Representatives ordered by key.
    pub diagrams: Vec<LinkDiagram>,
    pub truncated: bool,
}

/// Breadth-first closure under efficient flypes, up to map isomorphism,
/// stopping after `budget` diagrams.
pub fn flype_closure(d: &LinkDiagram, budget: usize) -> Result<FlypeClosure, FlypeError> {
    let mut seen: BTreeMap<Vec<u32>, LinkDiagram> = BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert(diagram_key(d.map()), d.clone());
    queue.push_back(d.clone());
    let mut truncated = false;
    'bfs: while let Some(cur) = queue.pop_front() {
        for m in available_flypes(&cur)? {
            let next = apply_flype(&cur, &m)?;
            let key = diagram_key(next.map());
            if seen.contains_key(&key) {
                continue;
            }
            if seen.len() >= budget {
                truncated = true;
                break 'bfs;
            }
            seen.insert(key, next.clone());
            queue.push_back(next);
        }
    }
    Ok(FlypeClosure {
        diagrams: seen.into_values().collect(),
        truncated,
    })
}

/// Whether `d2` lies in the flype closure of `d1`; `None` when the budget
/// ran out before deciding.
pub fn flype_equivalent(d1: &LinkDiagram, d2: &LinkDiagram, budget: usize) -> Result<Option<bool>, FlypeError> {
    if d1.num_crossings() != d2.num_crossings() || d1.component_count() != d2.component_count() {
        return Ok(Some(false));
    }
    let target = diagram_key(d2.map());
    let closure = flype_closure(d1, budget)?;
    if closure.diagrams.iter().any(|x| diagram_key(x.map()) == target) {
        return Ok(Some(true));
    }
    Ok(if closure.truncated { None } else { Some(false) })
}

/// Make every band homogeneous: crossings of opposite signs in a twisted
/// band diagram are flyped next to each other and cancelled by
/// Reidemeister II moves.
pub fn normalize_twists(d: &LinkDiagram) -> Result<LinkDiagram, FlypeError> {
    let mut cur = d.clone();
    let limit = 4 * (d.num_crossings() + 1).pow(2);
    for _ in 0..limit {
        if cur.num_crossings() < 3 {
            return Ok(cur);
        }
        let dec = Decomposition::new(cur.map())?;
        if let Some(f) = r2_bigon(&dec) {
            match cancel_bigon(&cur, f) {
                Some(next) => {
                    cur = next;
                    continue;
                }
                None => return Ok(cur),
            }
        }
        match normalizing_flype(&dec) {
            Some(m) => cur = apply_flype(&cur, &m)?,
            None => return Ok(cur),
        }
    }
    Err(FlypeError::IllegalMove("twist normalization did not terminate".into()))
}

/// A dart of a band crossing facing the next crossing along the band,
/// when the bigon between them is removable.
fn r2_bigon(dec: &Decomposition) -> Option<Dart> {
    for r in dec.regions.iter().filter(|r| r.is_tbd()) {
        let q = &r.quotient;
        let band = &r.band;
        for i in 0..band.len() {
            let (v, p) = band[i];
            let (w, _) = band[(i + 1) % band.len()];
            if v == w || !q.vertex(v).is_crossing() || !q.vertex(w).is_crossing() {
                continue;
            }
            let (u, w) = (r.origin[v]?, r.origin[w]?);
            let f = 4 * u + (opposite(p) & 3);
            let map = &dec.map;
            if vertex_of(map.twin(f)) == w && map.is_over(f) == map.is_over(map.twin(f)) {
                return Some(f);
            }
        }
    }
    None
}

/// Remove the two crossings of the bigon containing dart `f` (and the
/// dart after it), joining the strands through.
fn cancel_bigon(d: &LinkDiagram, f: Dart) -> Option<LinkDiagram> {
    let map = d.map();
    let (u, w) = (vertex_of(f), vertex_of(map.twin(f)));
    let gone = |x: Dart| vertex_of(x) == u || vertex_of(x) == w;
    let mut twin = map.twins().to_vec();
    for g in [f, rot_next(f)] {
        let y = map.twin(g);
        if vertex_of(y) != w {
            return None;
        }
        let (s, t) = (map.twin(opposite(g)), map.twin(opposite(y)));
        if gone(s) || gone(t) {
            return None;
        }
        twin[s] = t;
        twin[t] = s;
    }
    let keep: Vec<usize> = (0..map.num_vertices()).filter(|&v| v != u && v != w).collect();
    // pair up the dropped darts so the intermediate map stays well formed
    for s in 0..4 {
        twin[4 * u + s] = 4 * w + s;
        twin[4 * w + s] = 4 * u + s;
    }
    let new_map = PlanarMap::new(map.vertices().to_vec(), twin).ok()?.permute_vertices(&keep);
    let out = keep.iter().flat_map(|&v| (4 * v..4 * v + 4).map(|x| d.is_outgoing(x))).collect();
    let nd = LinkDiagram::with_orientation(new_map, out).ok()?;
    Some(nd.with_free_loops(d.free_loops()))
}

/// A flype carrying a crossing towards the nearest twist region of the
/// opposite sign in the same band.
fn normalizing_flype(dec: &Decomposition) -> Option<FlypeMove> {
    let moves = flypes_of(dec);
    for (ri, r) in dec.regions.iter().enumerate() {
        let k = r.twist_regions.len();
        if !r.is_tbd() || r.boxes.len() < 2 {
            continue;
        }
        for i in 0..k {
            let s = r.twist_regions[i].weight.signum();
            if s == 0 {
                continue;
            }
            let next = (1..k).map(|j| (i + j) % k).find(|&j| r.twist_regions[j].weight != 0)?;
            if r.twist_regions[next].weight.signum() == -s {
                let active = *r.twist_regions[i].crossings.last()?;
                return moves
                    .iter()
                    .find(|m| m.tbd == ri && m.active_crossing == active && m.target_twist == (i + 1) % k && m.source_twist == i)
                    .cloned();
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::fraction::{cardan_to_diagram, ContinuedFraction};
    use crate::tangle::{alternate, Tangle};
    use crate::tree::{tree_isomorphic, StructureTree};

    /// Closure of V3 + H(a) + V3 + H(b): a twisted annulus with twist
    /// regions of weights a and b.
    fn annulus(a: i64, b: i64) -> LinkDiagram {
        let t = Tangle::vertical(3)
            .add(&Tangle::horizontal(a))
            .add(&Tangle::vertical(3))
            .add(&Tangle::horizontal(b));
        LinkDiagram::from_map(t.numerator_map().0).unwrap()
    }

    fn annulus_weights(d: &LinkDiagram) -> Vec<i64> {
        let dec = Decomposition::new(d.map()).unwrap();
        let r = dec.regions.iter().find(|r| r.is_tbd() && r.valency() == 2).unwrap();
        let mut w: Vec<i64> = r.twist_regions.iter().map(|t| t.weight.abs()).collect();
        w.sort_unstable();
        w
    }

    #[test]
    fn trefoil_and_jewels_have_no_flypes() {
        let t = families::torus_2(3);
        assert!(available_flypes(&t).unwrap().is_empty());
        let orbits = flype_orbits(&t).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].twist_regions.len(), 1);
        assert_eq!(flype_closure(&t, DEFAULT_BUDGET).unwrap().diagrams.len(), 1);
        let o = LinkDiagram::from_map(families::octahedron()).unwrap();
        assert!(available_flypes(&o).unwrap().is_empty());
        assert!(flype_orbits(&o).unwrap().is_empty());
    }

    #[test]
    fn annulus_flypes_preserve_structure() {
        let d = annulus(2, 2);
        assert!(d.is_alternating());
        let moves = available_flypes(&d).unwrap();
        assert!(!moves.is_empty());
        let before = Decomposition::new(d.map()).unwrap();
        for m in &moves {
            assert_ne!(m.source_twist, m.target_twist);
            let e = apply_flype(&d, m).unwrap();
            assert_eq!(e.num_crossings(), d.num_crossings());
            assert!(e.is_alternating());
            assert_eq!(e.map().euler_characteristic().0, 2);
            assert_eq!(annulus_weights(&e), vec![1, 3]);
            let after = Decomposition::new(e.map()).unwrap();
            let (t0, t1) = (StructureTree::canonical(&before), StructureTree::canonical(&after));
            assert!(tree_isomorphic(&t0, &t1, true).is_some());
            let (e0, e1) = (StructureTree::essential(&before), StructureTree::essential(&after));
            assert!(tree_isomorphic(&e0, &e1, true).is_some());
        }
    }

    #[test]
    fn flype_then_inverse_is_isomorphic() {
        let d = annulus(2, 2);
        for m in available_flypes(&d).unwrap() {
            let e = apply_flype(&d, &m).unwrap();
            let back = available_flypes(&e)
                .unwrap()
                .into_iter()
                .find(|x| x.active_crossing == m.active_crossing && x.tangle == m.tangle)
                .expect("inverse move is available");
            let f = apply_flype(&e, &back).unwrap();
            assert_eq!(diagram_key(f.map()), diagram_key(d.map()));
        }
    }

    #[test]
    fn trivial_and_malformed_moves_are_rejected() {
        let d = annulus(2, 2);
        let mut m = available_flypes(&d).unwrap().remove(0);
        m.tangle.clear();
        assert!(matches!(apply_flype(&d, &m), Err(FlypeError::IllegalMove(_))));
        let mut m = available_flypes(&d).unwrap().remove(0);
        m.tangle.truncate(1);
        assert!(apply_flype(&d, &m).is_err());
    }

    #[test]
    fn closure_redistributes_weights() {
        let d = annulus(2, 2);
        let closure = flype_closure(&d, DEFAULT_BUDGET).unwrap();
        assert!(!closure.truncated);
        let mut seen: Vec<Vec<i64>> = closure.diagrams.iter().map(annulus_weights).collect();
        seen.sort();
        seen.dedup();
        // all ways to split 4 between two twist regions, up to order
        let expected: Vec<Vec<i64>> = (0..=2).map(|a| vec![a, 4 - a]).collect();
        assert_eq!(seen, expected);
        for x in &closure.diagrams {
            let again = flype_closure(x, DEFAULT_BUDGET).unwrap();
            assert_eq!(again.diagrams.len(), closure.diagrams.len());
        }
    }

    #[test]
    fn equivalence_checks() {
        let d = annulus(2, 2);
        let e = apply_flype(&d, &available_flypes(&d).unwrap()[0]).unwrap();
        assert_eq!(flype_equivalent(&d, &e, DEFAULT_BUDGET).unwrap(), Some(true));
        let trefoil = families::torus_2(3);
        let eight = families::rational(&[2, 2]);
        assert_eq!(flype_equivalent(&trefoil, &eight, DEFAULT_BUDGET).unwrap(), Some(false));
        let a = families::rational(&[2, 3]);
        let b = families::rational(&[2, 2, 1]);
        assert_eq!(flype_equivalent(&a, &b, DEFAULT_BUDGET).unwrap(), Some(true));
    }

    #[test]
    fn normalize_cancels_opposite_twists() {
        let d = annulus(2, -1);
        assert!(!d.is_alternating());
        let n = normalize_twists(&d).unwrap();
        assert_eq!(n.num_crossings(), d.num_crossings() - 2);
        assert!(n.is_alternating());
        let h = annulus(2, 2);
        let same = normalize_twists(&h).unwrap();
        assert_eq!(diagram_key(same.map()), diagram_key(h.map()));
    }

    #[test]
    fn k0_orbits_match_tbd_vertices() {
        let d = families::k0();
        let orbits = flype_orbits(&d).unwrap();
        let tree = crate::tree::canonical_tree(d.map()).unwrap();
        let tbds = tree.vertices.iter().filter(|v| v.label != crate::tree::TreeLabel::Jewel).count();
        assert_eq!(orbits.len(), tbds);
        let mut all: Vec<usize> = orbits.iter().flat_map(|o| o.crossings()).collect();
        let total = all.len();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), total);
        let _ = (alternate, cardan_to_diagram, ContinuedFraction::Infinity);
    }
}
