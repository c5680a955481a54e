//! Haseman circles, canonical and essential Conway families, and the
//! classification of complementary regions into twisted band diagrams and
//! jewels.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::DecompositionError;
use crate::fraction::{eval_cf, ContinuedFraction, Fraction};
use crate::map::{opposite, rot_next, vertex_of, Dart, PlanarMap, Vertex, VertexSet};

/// A non-compressible 4-edge cut, identified by its vertex partition.
///
/// `inside` is the side not containing vertex 0; `cut` lists the darts
/// leaving `inside`, counterclockwise around it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HasemanCircle {
    pub inside: VertexSet,
    pub cut: [Dart; 4],
}

impl HasemanCircle {
    pub fn outside(&self, n: usize) -> VertexSet {
        self.inside.complement(n)
    }

    /// Disjoint realizations exist iff the sides nest.
    pub fn compatible(&self, other: &HasemanCircle, n: usize) -> bool {
        let (a, b) = (self.inside, other.inside);
        a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a) || a.union(b).len() == n
    }
}

/// Side weight: crossings count one, boxes count as at least two.
fn weight(map: &PlanarMap, set: VertexSet) -> usize {
    set.iter()
        .map(|v| match map.vertex(v) {
            Vertex::Crossing { .. } => 1,
            Vertex::Port(_) => 2,
        })
        .sum()
}

/// Vertex set reachable from `start` without using the cut edges.
fn side_of(map: &PlanarMap, cut: &BTreeSet<Dart>, start: usize) -> VertexSet {
    let mut seen = VertexSet::singleton(start);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for d in 4 * v..4 * v + 4 {
            if cut.contains(&d) {
                continue;
            }
            let w = vertex_of(map.twin(d));
            if !seen.contains(w) {
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    seen
}

fn edge_key(map: &PlanarMap, d: Dart) -> Dart {
    d.min(map.twin(d))
}

/// All 4-edge bonds of a connected map as `(inside, cut)` pairs, found as
/// simple 4-cycles of the dual graph. `inside` never contains vertex 0.
pub fn four_edge_bonds(map: &PlanarMap) -> Vec<(VertexSet, [Dart; 4])> {
    let n = map.num_vertices();
    if n < 2 {
        return vec![];
    }
    let (face_of, nfaces) = map.face_index();
    // dual adjacency: (neighbour face, edge key)
    let mut dual: Vec<Vec<(usize, Dart)>> = vec![vec![]; nfaces];
    for d in 0..map.num_darts() {
        if d != edge_key(map, d) {
            continue;
        }
        let (a, b) = (face_of[d], face_of[rot_next(d)]);
        if a != b {
            dual[a].push((b, d));
            dual[b].push((a, d));
        }
    }
    let mut found: BTreeSet<[Dart; 4]> = BTreeSet::new();
    for f0 in 0..nfaces {
        for &(f1, e0) in &dual[f0] {
            if f1 <= f0 {
                continue;
            }
            for &(f2, e1) in &dual[f1] {
                if f2 <= f0 || f2 == f1 || e1 == e0 {
                    continue;
                }
                for &(f3, e2) in &dual[f2] {
                    if f3 <= f0 || f3 == f1 || f3 == f2 || e2 == e1 || e2 == e0 {
                        continue;
                    }
                    for &(back, e3) in &dual[f3] {
                        if back != f0 || [e0, e1, e2].contains(&e3) {
                            continue;
                        }
                        let mut key = [e0, e1, e2, e3];
                        key.sort_unstable();
                        found.insert(key);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for key in found {
        let cut: BTreeSet<Dart> = key.iter().flat_map(|&d| [d, map.twin(d)]).collect();
        let zero = side_of(map, &cut, 0);
        let rest = zero.complement(n);
        let Some(r) = rest.min() else { continue };
        if side_of(map, &cut, r) != rest {
            continue;
        }
        let boundary = map.boundary_darts(rest);
        if boundary.len() != 4 {
            continue;
        }
        let cycle = map.boundary_cycle(rest, boundary.iter().copied().min());
        out.push((rest, [cycle[0], cycle[1], cycle[2], cycle[3]]));
    }
    out.sort_by_key(|(s, _)| (s.len(), s.0));
    out
}

/// Whether a 4-point cut bounds a trivial tangle or a single crossing on
/// one of its sides.
pub fn is_compressible(map: &PlanarMap, inside: VertexSet) -> bool {
    let n = map.num_vertices();
    weight(map, inside) < 2 || weight(map, inside.complement(n)) < 2
}

/// Every Haseman circle of a connected map (one per parallel class),
/// sorted by the size and then the bits of the inside set.
pub fn enumerate_haseman(map: &PlanarMap) -> Vec<HasemanCircle> {
    four_edge_bonds(map)
        .into_iter()
        .filter(|(inside, _)| !is_compressible(map, *inside))
        .map(|(inside, cut)| HasemanCircle { inside, cut })
        .collect()
}

/// Parallel circles cobound a crossingless annulus, which in this model
/// means they induce the same partition. Crossing circles are not
/// comparable.
pub fn are_parallel(map: &PlanarMap, a: &HasemanCircle, b: &HasemanCircle) -> Result<bool, DecompositionError> {
    let n = map.num_vertices();
    if !a.compatible(b, n) {
        return Err(DecompositionError::NotComparable);
    }
    Ok(a.inside == b.inside || a.inside == b.outside(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RegionKind {
    #[serde(rename = "TBD")]
    Tbd,
    Jewel,
}

/// A maximal run of crossings of a twisted band diagram between two
/// consecutive boxes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistRegion {
    /// Original crossing ids in band order.
    pub crossings: Vec<usize>,
    pub weight: i64,
}

/// A complementary region of a circle family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub kind: RegionKind,
    /// Family index of the circle enclosing the region; `None` for the
    /// region containing vertex 0.
    pub outer: Option<usize>,
    /// Family indices of the boundary circles; in band order for a TBD.
    pub boundary: Vec<usize>,
    pub crossings: VertexSet,
    /// Original box vertices (outer boundaries of a tangle) in the region.
    pub open: Vec<usize>,
    /// Boundary circles and open boxes; in band order for a TBD.
    pub boxes: Vec<BoxRef>,
    /// For a TBD, `twist_regions[i]` follows `boxes[i]` along the band.
    /// With no boxes there is a single twist region.
    pub twist_regions: Vec<TwistRegion>,
    pub total_weight: i64,
    /// The region with each neighbouring piece contracted to `Port(circle)`.
    pub quotient: PlanarMap,
    pub origin: Vec<Option<usize>>,
    /// For a TBD, quotient vertices in band order with the first dart of the
    /// pair facing the previous vertex.
    pub band: Vec<(usize, Dart)>,
}

/// A box met by a region: a family circle or an original box vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BoxRef {
    Circle(usize),
    Open(usize),
}

impl Region {
    /// Number of boxes, `k + 1`.
    pub fn valency(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_tbd(&self) -> bool {
        self.kind == RegionKind::Tbd
    }

    /// Spire: a TBD with a single boundary circle.
    pub fn is_spire(&self) -> bool {
        self.is_tbd() && self.boundary.len() == 1 && self.open.is_empty()
    }
}

/// Band order of a necklace-shaped map: each vertex joined to the next by
/// two edges bounding a bigon face. Returns `(vertex, previous-pair dart)`.
pub fn necklace(q: &PlanarMap) -> Option<Vec<(usize, Dart)>> {
    let n = q.num_vertices();
    if n == 0 {
        return None;
    }
    'start: for n0 in 0..2 {
        let mut order = vec![(0usize, n0 + 2)];
        let mut seen = VertexSet::singleton(0);
        let mut next = n0;
        loop {
            let p = q.twin(rot_next(next));
            if rot_next(p) != q.twin(next) {
                continue 'start;
            }
            let w = vertex_of(p);
            if w == 0 {
                if p != n0 + 2 || order.len() != n {
                    continue 'start;
                }
                return Some(order);
            }
            if seen.contains(w) {
                continue 'start;
            }
            seen.insert(w);
            order.push((w, p));
            next = opposite(p);
        }
    }
    None
}

/// Band sign of a crossing given the dart of its pair facing the previous
/// element of the band: `+1` when the strand through that dart is over.
pub fn band_sign(q: &PlanarMap, prev: Dart) -> i64 {
    if q.is_over(prev) {
        1
    } else {
        -1
    }
}

fn is_port(q: &PlanarMap, v: usize) -> bool {
    !q.vertex(v).is_crossing()
}

/// Haseman circles of a region's quotient not parallel to its boundary.
fn inner_circles(q: &PlanarMap) -> usize {
    let n = q.num_vertices();
    enumerate_haseman(q)
        .iter()
        .filter(|c| {
            let single_port = |s: VertexSet| s.len() == 1 && is_port(q, s.min().unwrap());
            !single_port(c.inside) && !single_port(c.outside(n))
        })
        .count()
}

/// The laminar structure of a compatible family: for each circle, the
/// index of the smallest circle strictly containing it.
fn parents(family: &[HasemanCircle]) -> Vec<Option<usize>> {
    family
        .iter()
        .map(|c| {
            family
                .iter()
                .enumerate()
                .filter(|(_, o)| o.inside != c.inside && c.inside.is_subset(o.inside))
                .min_by_key(|(_, o)| o.inside.len())
                .map(|(j, _)| j)
        })
        .collect()
}

/// Build and classify the complementary regions of a family. Region 0
/// contains vertex 0; region `i + 1` lies just inside `family[i]`.
pub fn classify_regions(map: &PlanarMap, family: &[HasemanCircle]) -> Result<Vec<Region>, DecompositionError> {
    let n = map.num_vertices();
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            if !a.compatible(b, n) {
                return Err(DecompositionError::NotComparable);
            }
        }
    }
    let parent = parents(family);
    let mut regions = Vec::with_capacity(family.len() + 1);
    for r in 0..=family.len() {
        let outer = r.checked_sub(1);
        let children: Vec<usize> = (0..family.len()).filter(|&c| parent[c] == outer).collect();
        let disk = outer.map_or(VertexSet::full(n), |c| family[c].inside);
        let own = children.iter().fold(disk, |s, &c| s.difference(family[c].inside));
        let mut sets: Vec<VertexSet> = children.iter().map(|&c| family[c].inside).collect();
        let mut ids: Vec<u32> = children.iter().map(|&c| c as u32).collect();
        if let Some(c) = outer {
            sets.push(family[c].outside(n));
            ids.push(c as u32);
        }
        let (quotient, origin, _) = map.quotient(&sets, &ids);
        let region = build_region(quotient, origin, outer, own).ok_or(DecompositionError::NotAdmissible { region: r })?;
        regions.push(region);
    }
    Ok(regions)
}

fn build_region(quotient: PlanarMap, origin: Vec<Option<usize>>, outer: Option<usize>, own: VertexSet) -> Option<Region> {
    let box_of = |v: usize| match (quotient.vertex(v), origin[v]) {
        (Vertex::Crossing { .. }, _) => None,
        (Vertex::Port(p), None) => Some(BoxRef::Circle(p as usize)),
        (Vertex::Port(_), Some(o)) => Some(BoxRef::Open(o)),
    };
    let mut open: Vec<usize> = (0..quotient.num_vertices())
        .filter_map(|v| match box_of(v) {
            Some(BoxRef::Open(o)) => Some(o),
            _ => None,
        })
        .collect();
    open.sort_unstable();
    let circles_of = |boxes: &[BoxRef]| -> Vec<usize> {
        boxes
            .iter()
            .filter_map(|b| match b {
                BoxRef::Circle(c) => Some(*c),
                BoxRef::Open(_) => None,
            })
            .collect()
    };
    if let Some(band) = necklace(&quotient) {
        let first_box = band.iter().position(|&(v, _)| box_of(v).is_some());
        let start = first_box.unwrap_or(0);
        let rotated: Vec<(usize, Dart)> = band[start..].iter().chain(&band[..start]).copied().collect();
        let mut boxes = Vec::new();
        let mut twist_regions: Vec<TwistRegion> = Vec::new();
        if first_box.is_none() {
            twist_regions.push(TwistRegion {
                crossings: vec![],
                weight: 0,
            });
        }
        for &(v, p) in &rotated {
            match box_of(v) {
                Some(b) => {
                    boxes.push(b);
                    twist_regions.push(TwistRegion {
                        crossings: vec![],
                        weight: 0,
                    });
                }
                None => {
                    let t = twist_regions.last_mut().unwrap();
                    t.crossings.push(origin[v].unwrap());
                    t.weight += band_sign(&quotient, p);
                }
            }
        }
        let total_weight = twist_regions.iter().map(|t| t.weight).sum();
        return Some(Region {
            kind: RegionKind::Tbd,
            outer,
            boundary: circles_of(&boxes),
            open,
            boxes,
            crossings: own,
            twist_regions,
            total_weight,
            quotient,
            origin,
            band: rotated,
        });
    }
    if inner_circles(&quotient) > 0 {
        return None;
    }
    let mut boxes: Vec<BoxRef> = (0..quotient.num_vertices()).filter_map(box_of).collect();
    boxes.sort_unstable_by_key(|b| match *b {
        BoxRef::Circle(c) => (0, c),
        BoxRef::Open(o) => (1, o),
    });
    Some(Region {
        kind: RegionKind::Jewel,
        outer,
        boundary: circles_of(&boxes),
        open,
        boxes,
        crossings: own,
        twist_regions: vec![],
        total_weight: 0,
        quotient,
        origin,
        band: vec![],
    })
}

/// Whether every region of the family is a TBD or a jewel.
pub fn is_admissible(map: &PlanarMap, family: &[HasemanCircle]) -> bool {
    classify_regions(map, family).is_ok()
}

/// The minimal admissible family: start from the circles meeting no other
/// Haseman circle, then drop circles while every region stays a TBD or a
/// jewel.
pub fn canonical_family(map: &PlanarMap) -> Result<Vec<HasemanCircle>, DecompositionError> {
    let n = map.num_vertices();
    let all = enumerate_haseman(map);
    let mut family: Vec<HasemanCircle> = all.iter().filter(|c| all.iter().all(|o| c.compatible(o, n))).cloned().collect();
    if !is_admissible(map, &family) {
        return Err(DecompositionError::NotDecomposable);
    }
    while let Some(i) = (0..family.len()).find(|&i| {
        let mut f = family.clone();
        f.remove(i);
        is_admissible(map, &f)
    }) {
        family.remove(i);
    }
    Ok(family)
}

/// A maximal rational tangle: the disk bounded by `boundary` on the side of
/// `regions[0]`, whose regions form a chain of annuli ending in a spire.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalTangle {
    /// The bounding circle, or the outer box of a tangle diagram.
    pub boundary: BoxRef,
    /// Regions from the boundary inwards; the last one is a spire.
    pub regions: Vec<usize>,
    /// Family indices of the circles strictly inside.
    pub interior: Vec<usize>,
    pub terms: Vec<i64>,
    pub fraction: Fraction,
}

/// A complete decomposition of a connected, prime, reduced diagram.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub map: PlanarMap,
    pub haseman: Vec<HasemanCircle>,
    pub canonical: Vec<HasemanCircle>,
    pub regions: Vec<Region>,
    /// Canonical indices of the essential circles.
    pub essential: Vec<usize>,
    pub rational_tangles: Vec<RationalTangle>,
    /// Set when the whole diagram is a chain of TBDs (a rational link);
    /// holds the regions in chain order.
    pub rational_chain: Option<Vec<usize>>,
}

impl Decomposition {
    pub fn new(map: &PlanarMap) -> Result<Self, DecompositionError> {
        let haseman = enumerate_haseman(map);
        let canonical = canonical_family(map)?;
        let regions = classify_regions(map, &canonical)?;
        let mut dec = Decomposition {
            map: map.clone(),
            haseman,
            canonical,
            regions,
            essential: vec![],
            rational_tangles: vec![],
            rational_chain: None,
        };
        dec.find_rational()?;
        Ok(dec)
    }

    /// The two regions separated by canonical circle `c`: inside first.
    pub fn sides(&self, c: usize) -> (usize, usize) {
        let outer = (0..self.regions.len())
            .find(|&r| r != c + 1 && self.regions[r].boundary.contains(&c))
            .expect("every circle has two sides");
        (c + 1, outer)
    }

    /// Region across circle `c` from region `r`.
    pub fn across(&self, r: usize, c: usize) -> usize {
        let (a, b) = self.sides(c);
        if a == r {
            b
        } else {
            a
        }
    }

    /// Regions entered through box `entry` into `r` while the chain stays
    /// rational.
    fn rational_side(&self, r: usize, entry: BoxRef) -> Option<(Vec<usize>, Vec<usize>)> {
        let (mut r, mut entry) = (r, entry);
        let mut regions = vec![];
        let mut interior = vec![];
        loop {
            let reg = &self.regions[r];
            if !reg.is_tbd() {
                return None;
            }
            regions.push(r);
            match reg.boxes.len() {
                1 => return Some((regions, interior)),
                2 => {
                    let next = if reg.boxes[0] == entry { reg.boxes[1] } else { reg.boxes[0] };
                    let BoxRef::Circle(c) = next else { return None };
                    interior.push(c);
                    r = self.across(r, c);
                    entry = next;
                }
                _ => return None,
            }
        }
    }

    fn rational_tangle(&self, r: usize, entry: BoxRef) -> Result<Option<RationalTangle>, DecompositionError> {
        let Some((regions, interior)) = self.rational_side(r, entry) else {
            return Ok(None);
        };
        let terms = self.chain_terms(&regions);
        let fraction = eval_cf(&ContinuedFraction::Terms(terms.clone())).map_err(|e| DecompositionError::NotRational(e.to_string()))?;
        Ok(Some(RationalTangle {
            boundary: entry,
            regions,
            interior,
            terms,
            fraction,
        }))
    }

    fn chain_terms(&self, regions: &[usize]) -> Vec<i64> {
        regions
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let b = self.regions[r].total_weight;
                if i % 2 == 0 {
                    b
                } else {
                    -b
                }
            })
            .collect()
    }

    fn find_rational(&mut self) -> Result<(), DecompositionError> {
        let open: Vec<(usize, usize)> = (0..self.regions.len())
            .flat_map(|r| self.regions[r].open.iter().map(move |&o| (r, o)))
            .collect();
        let chain = self.regions.iter().all(|r| r.is_tbd() && r.valency() <= 2);
        if chain && open.is_empty() {
            self.rational_chain = Some(self.chain_order());
            if let Some(t) = self.chain_tangle()? {
                self.rational_tangles.push(t);
            }
            return Ok(());
        }
        if let [(r, o)] = open[..] {
            if let Some(t) = self.rational_tangle(r, BoxRef::Open(o))? {
                self.rational_tangles.push(t);
                return Ok(());
            }
        }
        for c in 0..self.canonical.len() {
            let (a, b) = self.sides(c);
            for (r, other) in [(a, b), (b, a)] {
                let o = &self.regions[other];
                if o.is_tbd() && o.valency() == 2 {
                    continue;
                }
                if let Some(t) = self.rational_tangle(r, BoxRef::Circle(c))? {
                    self.rational_tangles.push(t);
                }
            }
        }
        let inner: BTreeSet<usize> = self.rational_tangles.iter().flat_map(|t| t.interior.iter().copied()).collect();
        self.essential = (0..self.canonical.len()).filter(|c| !inner.contains(c)).collect();
        Ok(())
    }

    /// Regions of a rational link in chain order, starting from the end
    /// that reads the smaller fraction.
    fn chain_order(&self) -> Vec<usize> {
        let Some(end) = (0..self.regions.len()).find(|&r| self.regions[r].boundary.len() <= 1) else {
            return vec![];
        };
        let mut order = vec![end];
        let mut prev_circle = None;
        let mut r = end;
        loop {
            let next = self.regions[r].boundary.iter().copied().find(|&c| Some(c) != prev_circle);
            let Some(c) = next else { break };
            r = self.across(r, c);
            prev_circle = Some(c);
            order.push(r);
        }
        let reversed: Vec<usize> = order.iter().rev().copied().collect();
        let f = |o: &[usize]| eval_cf(&ContinuedFraction::Terms(self.chain_terms(o))).ok();
        if f(&reversed) < f(&order) {
            reversed
        } else {
            order
        }
    }

    /// For a rational link, the tangle inside the circle next to the first
    /// end of the chain.
    fn chain_tangle(&self) -> Result<Option<RationalTangle>, DecompositionError> {
        let order = self.rational_chain.as_deref().unwrap_or(&[]);
        if order.len() < 2 {
            return Ok(None);
        }
        let c = self.regions[order[0]].boundary[0];
        self.rational_tangle(order[1], BoxRef::Circle(c))
    }

    /// Continued fraction of a whole rational link read along its chain.
    pub fn chain_fraction(&self) -> Option<Fraction> {
        let order = self.rational_chain.as_ref()?;
        eval_cf(&ContinuedFraction::Terms(self.chain_terms(order))).ok()
    }

    pub fn essential_circles(&self) -> Vec<&HasemanCircle> {
        self.essential.iter().map(|&c| &self.canonical[c]).collect()
    }

    /// Stable JSON report of circles and regions.
    pub fn to_json(&self) -> serde_json::Value {
        let circles: Vec<serde_json::Value> = self
            .canonical
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut cut: Vec<usize> = c.cut.iter().map(|&d| edge_key(&self.map, d)).collect();
                cut.sort_unstable();
                serde_json::json!({
                    "id": i,
                    "cut_edges": cut,
                    "inside": c.inside.iter().collect::<Vec<_>>(),
                })
            })
            .collect();
        let regions: Vec<serde_json::Value> = self
            .regions
            .iter()
            .enumerate()
            .map(|(i, r)| {
                serde_json::json!({
                    "id": i,
                    "kind": r.kind,
                    "boundary": r.boundary,
                    "crossings": r.crossings.iter().collect::<Vec<_>>(),
                    "weights": r.twist_regions.iter().map(|t| t.weight).collect::<Vec<_>>(),
                    "total_weight": r.total_weight,
                })
            })
            .collect();
        serde_json::json!({
            "canonical_circles": circles,
            "essential_circles": self.essential,
            "regions": regions,
            "rational_tangles": self.rational_tangles,
        })
    }
}

/// The essential family: canonical circles not strictly inside a maximal
/// rational tangle; empty for rational links.
pub fn essential_family(map: &PlanarMap) -> Result<Vec<HasemanCircle>, DecompositionError> {
    let dec = Decomposition::new(map)?;
    Ok(dec.essential_circles().into_iter().cloned().collect())
}

pub fn maximal_rational_tangles(map: &PlanarMap) -> Result<Vec<RationalTangle>, DecompositionError> {
    Ok(Decomposition::new(map)?.rational_tangles)
}
