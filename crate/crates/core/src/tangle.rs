//! Four-ended tangle diagrams and the operations used to assemble link
//! diagrams from them.
//!
//! Boundary points are indexed counterclockwise around the tangle:
//! `NW = 0`, `SW = 1`, `SE = 2`, `NE = 3`. A crossing created by
//! [`Tangle::crossing`] has slots `SW, SE, NE, NW` in that order.

use crate::diagram::{ConnectionPath, LinkDiagram};
use crate::error::{DecompositionError, DiagramError};
use crate::map::{opposite, rot_next, slot, vertex_of, Dart, PlanarMap, Vertex};

pub const NW: usize = 0;
pub const SW: usize = 1;
pub const SE: usize = 2;
pub const NE: usize = 3;

/// Where a dart or boundary point leads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Link {
    Dart(Dart),
    End(usize),
}

/// A partially glued diagram with numbered free ends.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Glue {
    vertices: Vec<Vertex>,
    links: Vec<Link>,
    ends: Vec<Link>,
    loops: usize,
}

impl Glue {
    fn append(&mut self, other: &Glue) {
        let dv = 4 * self.vertices.len();
        let de = self.ends.len();
        let shift = |l: Link| match l {
            Link::Dart(d) => Link::Dart(d + dv),
            Link::End(k) => Link::End(k + de),
        };
        self.vertices.extend_from_slice(&other.vertices);
        self.links.extend(other.links.iter().map(|&l| shift(l)));
        self.ends.extend(other.ends.iter().map(|&l| shift(l)));
        self.loops += other.loops;
    }

    fn set(&mut self, at: Link, to: Link) {
        match at {
            Link::Dart(d) => self.links[d] = to,
            Link::End(k) => self.ends[k] = to,
        }
    }

    /// Join free ends `i` and `j`; both become dead.
    fn join(&mut self, i: usize, j: usize) {
        let x = self.ends[i];
        let y = self.ends[j];
        if x == Link::End(j) {
            self.loops += 1;
            return;
        }
        self.set(x, y);
        self.set(y, x);
    }

    /// Keep the listed live ends, renumbered in the given order.
    fn select(mut self, keep: &[usize]) -> Glue {
        let mut index = vec![usize::MAX; self.ends.len()];
        for (i, &k) in keep.iter().enumerate() {
            index[k] = i;
        }
        let fix = |l: Link| match l {
            Link::End(k) => Link::End(index[k]),
            d => d,
        };
        for l in self.links.iter_mut() {
            *l = fix(*l);
        }
        let ends = keep.iter().map(|&k| fix(self.ends[k])).collect();
        self.ends = ends;
        self
    }

    fn into_map(self) -> (PlanarMap, usize) {
        debug_assert!(self.ends.is_empty());
        let twin = self
            .links
            .iter()
            .map(|l| match l {
                Link::Dart(d) => *d,
                Link::End(_) => unreachable!("closed diagram has no free ends"),
            })
            .collect();
        (PlanarMap::from_parts_unchecked(self.vertices, twin), self.loops)
    }
}

/// A tangle diagram: crossings (or port boxes) in a disk with four boundary
/// points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tangle {
    inner: Glue,
}

impl Tangle {
    /// The `0` tangle: NW-NE and SW-SE.
    pub fn zero() -> Self {
        Self::from_ends(vec![], vec![], [Link::End(NE), Link::End(SE), Link::End(SW), Link::End(NW)])
    }

    /// The `∞` tangle: NW-SW and NE-SE.
    pub fn infinity() -> Self {
        Self::from_ends(vec![], vec![], [Link::End(SW), Link::End(NW), Link::End(NE), Link::End(SE)])
    }

    fn from_ends(vertices: Vec<Vertex>, links: Vec<Link>, ends: [Link; 4]) -> Self {
        Tangle {
            inner: Glue {
                vertices,
                links,
                ends: ends.to_vec(),
                loops: 0,
            },
        }
    }

    /// One crossing; `odd_over` puts the NW-SE strand on top, which reads as
    /// `+1` horizontally.
    pub fn crossing(odd_over: bool) -> Self {
        Self::vertex(Vertex::Crossing { odd_over })
    }

    /// A single vertex (crossing or opaque box) with slots `SW, SE, NE, NW`.
    pub fn vertex(v: Vertex) -> Self {
        let links = (0..4).map(|s| Link::End((s + 1) % 4)).collect();
        Self::from_ends(vec![v], links, [Link::Dart(3), Link::Dart(0), Link::Dart(1), Link::Dart(2)])
    }

    /// Horizontal twist with fraction `n`.
    pub fn horizontal(n: i64) -> Self {
        (0..n.unsigned_abs()).fold(Tangle::zero(), |t, _| t.add(&Tangle::crossing(n > 0)))
    }

    /// Vertical twist with fraction `1/n`.
    pub fn vertical(n: i64) -> Self {
        Tangle::horizontal(-n).rotate()
    }

    /// Horizontal sum: `self` on the left, `other` on the right.
    pub fn add(&self, other: &Tangle) -> Tangle {
        let mut g = self.inner.clone();
        g.append(&other.inner);
        g.join(NE, 4 + NW);
        g.join(SE, 4 + SW);
        Tangle {
            inner: g.select(&[NW, SW, 4 + SE, 4 + NE]),
        }
    }

    /// Vertical sum: `self` on top, `other` below.
    pub fn vsum(&self, other: &Tangle) -> Tangle {
        let mut g = self.inner.clone();
        g.append(&other.inner);
        g.join(SW, 4 + NW);
        g.join(SE, 4 + NE);
        Tangle {
            inner: g.select(&[NW, 4 + SW, 4 + SE, NE]),
        }
    }

    /// Rotation by a quarter turn counterclockwise (no mirror).
    pub fn rotate(&self) -> Tangle {
        let g = self.inner.clone();
        Tangle {
            inner: g.select(&[NE, NW, SW, SE]),
        }
    }

    /// Mirror image: every crossing switched.
    pub fn mirror(&self) -> Tangle {
        let mut t = self.clone();
        for v in t.inner.vertices.iter_mut() {
            if let Vertex::Crossing { odd_over } = v {
                *odd_over = !*odd_over;
            }
        }
        t
    }

    pub fn num_vertices(&self) -> usize {
        self.inner.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.inner.vertices
    }

    /// Where boundary point `k` leads inside the tangle.
    pub fn end(&self, k: usize) -> Link {
        self.inner.ends[k]
    }

    /// Where dart `d` leads.
    pub fn link(&self, d: Dart) -> Link {
        self.inner.links[d]
    }

    /// Closed crossingless loops inside the tangle.
    pub fn loops(&self) -> usize {
        self.inner.loops
    }

    /// Numerator closure: NW-NE and SW-SE joined outside.
    pub fn numerator_map(&self) -> (PlanarMap, usize) {
        let mut g = self.inner.clone();
        g.join(NW, NE);
        g.join(SW, SE);
        g.select(&[]).into_map()
    }

    /// Denominator closure: NW-SW and NE-SE joined outside.
    pub fn denominator_map(&self) -> (PlanarMap, usize) {
        let mut g = self.inner.clone();
        g.join(NW, SW);
        g.join(NE, SE);
        g.select(&[]).into_map()
    }

    pub fn numerator(&self) -> Result<LinkDiagram, DiagramError> {
        let (map, loops) = self.numerator_map();
        LinkDiagram::from_map(map).map(|d| d.with_free_loops(loops))
    }

    pub fn denominator(&self) -> Result<LinkDiagram, DiagramError> {
        let (map, loops) = self.denominator_map();
        LinkDiagram::from_map(map).map(|d| d.with_free_loops(loops))
    }

    /// The tangle as a closed map whose complement is a single port vertex
    /// with slots `NW, NE, SE, SW`. Returns the map and the port's index.
    pub fn with_outer_port(&self, port: u32) -> (PlanarMap, usize) {
        let outer = Tangle::vertex(Vertex::Port(port));
        let mut g = self.inner.clone();
        g.append(&outer.inner);
        // the outer vertex's slots SW, SE, NE, NW meet NW, NE, SE, SW
        g.join(NW, 4 + SW);
        g.join(NE, 4 + SE);
        g.join(SE, 4 + NE);
        g.join(SW, 4 + NW);
        let port_index = self.inner.vertices.len();
        (g.select(&[]).into_map().0, port_index)
    }

    /// Which boundary points are joined through the tangle.
    pub fn connection_path(&self) -> ConnectionPath {
        let partner = |k: usize| -> usize {
            let mut l = self.inner.ends[k];
            loop {
                match l {
                    Link::End(j) => return j,
                    Link::Dart(d) => l = self.inner.links[opposite(d)],
                }
            }
        };
        match partner(NW) {
            NE => ConnectionPath::H,
            SW => ConnectionPath::V,
            _ => ConnectionPath::X,
        }
    }

    /// The fraction of a rational tangle, read by repeatedly splitting off a
    /// crossing that touches two adjacent boundary points. Fails when no such
    /// crossing exists before the tangle is exhausted.
    pub fn fraction(&self) -> Result<(i128, i128), DecompositionError> {
        if self.inner.vertices.iter().any(|v| !v.is_crossing()) {
            return Err(DecompositionError::NotRational("tangle contains a box".into()));
        }
        let mut t = self.inner.clone();
        let mut alive = vec![true; t.vertices.len()];
        let mut steps: Vec<(bool, i128)> = Vec::new();
        while alive.iter().any(|&a| a) {
            let Some((k, d)) = (0..4).find_map(|k| {
                let (Link::Dart(d), Link::Dart(e)) = (t.ends[k], t.ends[(k + 1) % 4]) else {
                    return None;
                };
                (rot_next(d) == e).then_some((k, d))
            }) else {
                return Err(DecompositionError::NotRational("no boundary twist to split off".into()));
            };
            let over = match t.vertices[vertex_of(d)] {
                Vertex::Crossing { odd_over } => (slot(d) % 2 == 1) == odd_over,
                Vertex::Port(_) => unreachable!(),
            };
            let horizontal = k % 2 == 0;
            // a crossing's horizontal reading is +1 when the strand through the
            // first dart of a left or right pair is over
            let s_h: i128 = match (horizontal, over) {
                (true, true) | (false, false) => 1,
                _ => -1,
            };
            steps.push((horizontal, s_h));
            let y1 = rot_next(rot_next(d));
            let y2 = rot_next(y1);
            let k1 = (k + 1) % 4;
            alive[vertex_of(d)] = false;
            let (l1, l2) = (t.links[y1], t.links[y2]);
            if l1 == Link::Dart(y2) {
                t.ends[k] = Link::End(k1);
                t.ends[k1] = Link::End(k);
                continue;
            }
            t.ends[k1] = Link::End(usize::MAX);
            t.ends[k] = Link::End(usize::MAX);
            let mut attach = |end: usize, l: Link| {
                t.ends[end] = l;
                match l {
                    Link::Dart(z) => t.links[z] = Link::End(end),
                    Link::End(j) => t.ends[j] = Link::End(end),
                }
            };
            attach(k1, l1);
            attach(k, l2);
        }
        let base = match t.ends[NW] {
            Link::End(NE) => (0, 1),
            Link::End(SW) => (1, 0),
            _ => return Err(DecompositionError::NotRational("crossingless diagonal".into())),
        };
        let (p, q) = steps
            .iter()
            .rev()
            .fold(base, |(p, q), &(horizontal, s)| if horizontal { (p + s * q, q) } else { (p, q + s * p) });
        Ok(normalize(p, q))
    }

    /// The rest of `map` once vertex `v` is removed, seen as a tangle. Slots
    /// `0, 1, 2, 3` of `v` become `NW, NE, SE, SW`.
    pub fn from_map_without(map: &PlanarMap, v: usize) -> Tangle {
        let n = map.num_vertices();
        let keep: Vec<usize> = (0..n).filter(|&w| w != v).collect();
        let mut index = vec![usize::MAX; n];
        for (i, &w) in keep.iter().enumerate() {
            index[w] = i;
        }
        let end_of_slot = [NW, NE, SE, SW];
        let relabel = |d: Dart| -> Link {
            if vertex_of(d) == v {
                Link::End(end_of_slot[slot(d)])
            } else {
                Link::Dart(4 * index[vertex_of(d)] + slot(d))
            }
        };
        let mut ends = vec![Link::End(0); 4];
        for s in 0..4 {
            ends[end_of_slot[s]] = relabel(map.twin(4 * v + s));
        }
        let links = keep.iter().flat_map(|&w| 4 * w..4 * w + 4).map(|d| relabel(map.twin(d))).collect();
        Tangle {
            inner: Glue {
                vertices: keep.iter().map(|&w| map.vertex(w)).collect(),
                links,
                ends,
                loops: 0,
            },
        }
    }

    /// Replace vertex `v` of `map` by this tangle. Boundary point `k` is
    /// attached where slot `(k + 3 + turn) % 4` of `v` was.
    pub fn substitute(&self, map: &PlanarMap, v: usize, turn: usize) -> PlanarMap {
        let n = map.num_vertices();
        let keep: Vec<usize> = (0..n).filter(|&w| w != v).collect();
        let mut index = vec![usize::MAX; n];
        for (i, &w) in keep.iter().enumerate() {
            index[w] = i;
        }
        let relabel = |d: Dart| -> Link {
            if vertex_of(d) == v {
                Link::End(slot(d))
            } else {
                Link::Dart(4 * index[vertex_of(d)] + slot(d))
            }
        };
        let mut g = Glue {
            vertices: keep.iter().map(|&w| map.vertex(w)).collect(),
            links: Vec::with_capacity(4 * keep.len()),
            ends: (0..4).map(|s| relabel(map.twin(4 * v + s))).collect(),
            loops: 0,
        };
        for &w in &keep {
            for d in 4 * w..4 * w + 4 {
                g.links.push(relabel(map.twin(d)));
            }
        }
        g.append(&self.inner);
        for k in 0..4 {
            g.join((k + 3 + turn) % 4, 4 + k);
        }
        g.select(&[]).into_map().0
    }
}

/// Reduce a projective pair to lowest terms with a nonnegative numerator;
/// `(1, 0)` stands for infinity.
pub(crate) fn normalize(p: i128, q: i128) -> (i128, i128) {
    if q == 0 {
        return (1, 0);
    }
    if p == 0 {
        return (0, 1);
    }
    let g = gcd(p.abs(), q.abs());
    let (p, q) = (p / g, q / g);
    if p < 0 {
        (-p, -q)
    } else {
        (p, q)
    }
}

pub(crate) fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reassign over/under so that the diagram alternates. The result is one of
/// the two alternating choices; the other is its mirror image.
pub fn alternate(map: &PlanarMap) -> PlanarMap {
    let (face_of, nfaces) = map.face_index();
    // faces meeting at a vertex alternate colour around it
    let mut colour = vec![None; nfaces];
    let mut adj = vec![vec![]; nfaces];
    for d in 0..map.num_darts() {
        let (a, b) = (face_of[d], face_of[rot_next(d)]);
        adj[a].push(b);
        adj[b].push(a);
    }
    for s in 0..nfaces {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(true);
        let mut stack = vec![s];
        while let Some(f) = stack.pop() {
            let c = colour[f].unwrap();
            for &g in &adj[f] {
                if colour[g].is_none() {
                    colour[g] = Some(!c);
                    stack.push(g);
                }
            }
        }
    }
    let vertices = (0..map.num_vertices())
        .map(|v| match map.vertex(v) {
            Vertex::Crossing { .. } => Vertex::Crossing {
                odd_over: colour[face_of[4 * v + 1]].unwrap(),
            },
            p => p,
        })
        .collect();
    PlanarMap::from_parts_unchecked(vertices, map.twins().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(t: &Tangle) -> (i128, i128) {
        t.fraction().unwrap()
    }

    #[test]
    fn elementary_fractions() {
        assert_eq!(frac(&Tangle::zero()), (0, 1));
        assert_eq!(frac(&Tangle::infinity()), (1, 0));
        assert_eq!(frac(&Tangle::crossing(true)), (1, 1));
        assert_eq!(frac(&Tangle::crossing(false)), (1, -1));
        assert_eq!(frac(&Tangle::horizontal(3)), (3, 1));
        assert_eq!(frac(&Tangle::vertical(3)), (1, 3));
        assert_eq!(frac(&Tangle::crossing(true).rotate()), (1, -1));
    }

    #[test]
    fn sums_add_fractions() {
        let t = Tangle::horizontal(2).add(&Tangle::vertical(3));
        assert_eq!(frac(&t), (7, 3));
        let v = Tangle::vertical(2).vsum(&Tangle::vertical(3));
        assert_eq!(frac(&v), (1, 5));
    }

    #[test]
    fn connection_paths() {
        assert_eq!(Tangle::horizontal(2).connection_path(), ConnectionPath::H);
        assert_eq!(Tangle::vertical(2).connection_path(), ConnectionPath::V);
        assert_eq!(Tangle::crossing(true).connection_path(), ConnectionPath::X);
    }

    #[test]
    fn closures_are_planar() {
        let t = Tangle::horizontal(2).add(&Tangle::vertical(3));
        let (n, loops) = t.numerator_map();
        assert_eq!(loops, 0);
        assert_eq!(n.euler_characteristic(), (2, 2));
        let (d, _) = t.denominator_map();
        assert_eq!(d.euler_characteristic(), (2, 2));
        let (p, port) = t.with_outer_port(0);
        assert_eq!(p.euler_characteristic(), (2, 2));
        assert_eq!(p.vertex(port), Vertex::Port(0));
    }

    #[test]
    fn numerator_of_zero_is_two_loops() {
        let (m, loops) = Tangle::zero().numerator_map();
        assert_eq!(m.num_vertices(), 0);
        assert_eq!(loops, 2);
    }

    #[test]
    fn substitution_keeps_planarity() {
        let (m, port) = Tangle::horizontal(3).with_outer_port(7);
        for turn in 0..4 {
            let s = Tangle::vertical(2).substitute(&m, port, turn);
            assert_eq!(s.num_vertices(), 5);
            assert_eq!(s.euler_characteristic(), (2, 2));
        }
    }

    #[test]
    fn alternate_makes_alternating() {
        let t = Tangle::horizontal(2).add(&Tangle::vertical(-3)).add(&Tangle::horizontal(1));
        let d = LinkDiagram::from_map(alternate(&t.numerator_map().0)).unwrap();
        assert!(d.is_alternating());
    }
}
