//! Standard diagram constructions used by tests, examples and the CLI.

use crate::diagram::LinkDiagram;
use crate::fraction::{cardan_to_diagram, ContinuedFraction};
use crate::map::{PlanarMap, Vertex};
use crate::tangle::{alternate, Tangle};

/// A map from a simple 4-regular plane graph given by its ccw neighbour
/// lists. Every vertex becomes a crossing; call [`alternate`] afterwards.
pub fn from_rotation(adj: &[[usize; 4]]) -> PlanarMap {
    let mut twin = vec![usize::MAX; 4 * adj.len()];
    for (v, nbrs) in adj.iter().enumerate() {
        for (s, &w) in nbrs.iter().enumerate() {
            let back = adj[w].iter().position(|&x| x == v).expect("adjacency is symmetric");
            twin[4 * v + s] = 4 * w + back;
        }
    }
    let vertices = vec![Vertex::Crossing { odd_over: true }; adj.len()];
    PlanarMap::new(vertices, twin).expect("rotation lists form an involution")
}

/// The octahedral basic polyhedron `6*`, alternating.
pub fn octahedron() -> PlanarMap {
    // vertices +x, -x, +y, -y, +z, -z; neighbours ccw seen from outside
    let adj = [[2, 4, 3, 5], [4, 2, 5, 3], [4, 0, 5, 1], [0, 4, 1, 5], [0, 2, 1, 3], [2, 0, 3, 1]];
    alternate(&from_rotation(&adj))
}

fn diagram(map: PlanarMap) -> LinkDiagram {
    LinkDiagram::from_map(alternate(&map)).expect("constructions are planar")
}

/// Standard `(2, n)` torus link diagram, the closure of a horizontal twist.
pub fn torus_2(n: usize) -> LinkDiagram {
    diagram(Tangle::horizontal(n as i64).numerator_map().0)
}

/// Pretzel link `P(p_1, ..., p_k)`: vertical twists side by side, closed.
pub fn pretzel(ps: &[i64]) -> LinkDiagram {
    let t = ps.iter().fold(Tangle::zero(), |t, &p| t.add(&Tangle::vertical(p)));
    LinkDiagram::from_map(t.numerator_map().0).expect("pretzel closure is planar")
}

/// Numerator closure of the cardan tangle with the given terms.
pub fn rational(terms: &[i64]) -> LinkDiagram {
    let t = cardan_to_diagram(&ContinuedFraction::Terms(terms.to_vec())).expect("valid terms");
    LinkDiagram::from_map(t.numerator_map().0).expect("rational closure is planar")
}

/// Connected sum of two trefoils (the granny knot diagram).
pub fn granny() -> LinkDiagram {
    diagram(Tangle::horizontal(3).vsum(&Tangle::horizontal(3)).numerator_map().0)
}

/// The complement of vertex `v` of a map as a tangle.
pub fn open_vertex(map: &PlanarMap, v: usize) -> Tangle {
    Tangle::from_map_without(map, v)
}

/// `10***`: tangle sum of two octahedra, each opened at one vertex.
pub fn ten_triple_star() -> LinkDiagram {
    let o = octahedron();
    let inner = open_vertex(&o, 5);
    diagram(inner.substitute(&o, 5, 0))
}

/// The reference diagram K0: an octahedron whose four equatorial vertices are
/// replaced by a rational tangle `T[2,2]`, a spire of two crossings, a sum
/// of two vertical 2-twists and a spire of three crossings.
pub fn k0() -> LinkDiagram {
    let mut m = octahedron();
    let boxes = [
        (3, Tangle::horizontal(3)),
        (2, Tangle::vertical(2).add(&Tangle::vertical(2))),
        (1, Tangle::horizontal(2)),
        (0, cardan_to_diagram(&ContinuedFraction::Terms(vec![2, 2])).expect("valid terms")),
    ];
    for (v, t) in boxes {
        m = t.substitute(&m, v, 0);
    }
    diagram(m)
}

/// Eight copies of a tangle `Y` (a vertical 2-twist)
/// arranged cyclically and closed.
pub fn necklace_of_twists(copies: usize) -> LinkDiagram {
    diagram(pretzel(&vec![2; copies]).map().clone())
}

/// A 15-crossing knot with three vertical 3-twists separated by horizontal
/// 2-twists; flypes move the horizontal crossings between twist regions.
pub fn spread_pretzel() -> LinkDiagram {
    let t = [Tangle::vertical(3), Tangle::horizontal(2)]
        .iter()
        .cycle()
        .take(6)
        .fold(Tangle::zero(), |acc, x| acc.add(x));
    diagram(t.numerator_map().0)
}
