//! Random alternating knot diagrams and the laws every periodic witness
//! must satisfy.

use std::sync::OnceLock;

use conway_core::families::octahedron;
use conway_core::periodicity::induced_tree_automorphism;
use conway_core::{
    alternate, apply_flype, available_flypes, cardan_to_diagram, projection_symmetries, ContinuedFraction, Decomposition, LinkDiagram,
    ProjectionSymmetry, StructureTree, Tangle, TreeLabel,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_tangle(rng: &mut ChaCha8Rng, max: i64) -> Tangle {
    let a = rng.gen_range(1..=max);
    match rng.gen_range(0..4) {
        0 => Tangle::vertical(a),
        1 => Tangle::horizontal(a),
        2 => {
            let terms: Vec<i64> = (0..rng.gen_range(2..=3)).map(|_| rng.gen_range(1..=max.min(3))).collect();
            cardan_to_diagram(&ContinuedFraction::Terms(terms)).unwrap()
        }
        _ => Tangle::vertical(a).add(&Tangle::horizontal(rng.gen_range(1..=2))),
    }
}

fn corpus_diagrams() -> &'static [LinkDiagram] {
    static CORPUS: OnceLock<Vec<LinkDiagram>> = OnceLock::new();
    CORPUS.get_or_init(|| super::corpus(12).into_iter().map(|(_, d)| d).collect())
}

fn closed(map: &conway_core::PlanarMap) -> Option<LinkDiagram> {
    let d = LinkDiagram::from_map(alternate(map)).ok()?;
    (d.component_count() == 1 && d.free_loops() == 0 && d.num_crossings() >= 3 && d.num_crossings() <= 14 && d.is_reduced() && d.is_prime())
        .then_some(d)
}

/// A random prime reduced alternating knot diagram with at most 14
/// crossings. Some are scrambled corpus knots; roughly half are built as cyclic sums of equal tangles so that
/// symmetric witnesses actually occur.
pub fn fuzz_knot(rng: &mut ChaCha8Rng) -> LinkDiagram {
    loop {
        let map = match rng.gen_range(0..5) {
            4 => {
                let corpus = corpus_diagrams();
                corpus[rng.gen_range(0..corpus.len())].map().clone()
            }
            0 | 1 => {
                let copies = rng.gen_range(2..=5);
                let y = random_tangle(rng, 3);
                let sum = (1..copies).fold(y.clone(), |acc, _| acc.add(&y));
                sum.numerator_map().0
            }
            2 => {
                let parts: Vec<Tangle> = (0..rng.gen_range(2..=4)).map(|_| random_tangle(rng, 4)).collect();
                parts.iter().skip(1).fold(parts[0].clone(), |acc, t| acc.add(t)).numerator_map().0
            }
            _ => {
                let mut m = octahedron();
                for v in 0..rng.gen_range(1..=3) {
                    if rng.gen_bool(0.7) {
                        m = random_tangle(rng, 2).substitute(&m, v, rng.gen_range(0..2));
                    }
                }
                m
            }
        };
        if let Some(d) = closed(&map) {
            let mut d = d;
            for _ in 0..rng.gen_range(0..4) {
                let moves = available_flypes(&d).unwrap();
                if moves.is_empty() {
                    break;
                }
                d = apply_flype(&d, &moves[rng.gen_range(0..moves.len())]).unwrap();
            }
            return d;
        }
    }
}

fn compose_power(s: &ProjectionSymmetry, r: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..s.dart_map.len()).collect();
    for _ in 0..r {
        p = p.iter().map(|&x| s.dart_map[x]).collect();
    }
    p
}

/// Checks every law of a witness of order `q`; returns the label of the
/// fixed essential-tree vertex, if there is one.
pub fn check_witness(d: &LinkDiagram, s: &ProjectionSymmetry, q: usize) -> Result<Option<TreeLabel>, String> {
    let ensure = |ok: bool, msg: String| if ok { Ok(()) } else { Err(msg) };
    ensure(
        d.num_crossings().is_multiple_of(q),
        format!("{} crossings is not a multiple of {q}", d.num_crossings()),
    )?;
    ensure(s.order == q && s.strict, format!("witness has order {} (strict: {})", s.order, s.strict))?;
    ensure(s.fixed_faces.len() == 2, format!("fixed faces {:?}", s.fixed_faces))?;
    ensure(
        s.crossing_orbits().iter().all(|&o| o == q),
        format!("crossing orbits {:?}", s.crossing_orbits()),
    )?;
    for t in projection_symmetries(d) {
        if t.order > q && t.order % q == 0 {
            ensure(
                compose_power(&t, t.order / q) != s.dart_map,
                format!("witness is a power of an order {} rotation", t.order),
            )?;
        }
    }
    let dec = Decomposition::new(d.map()).map_err(|e| e.to_string())?;
    let tree = StructureTree::essential(&dec);
    let phi = induced_tree_automorphism(&dec, &tree, s).ok_or("symmetry induces no tree automorphism")?;
    let fix = tree.fixed_subtree(&phi);
    if q >= 3 {
        ensure(!fix.edge_fixed(), format!("q={q} leaves an essential circle invariant"))?;
        ensure(fix.is_single_vertex(), format!("q={q} fixes {fix:?}"))?;
    }
    let label = (fix.vertices.len() == 1 && fix.edges.is_empty()).then(|| tree.vertices[fix.vertices[0]].label.clone());
    if q.is_multiple_of(2) {
        ensure(
            !matches!(label, Some(TreeLabel::Weight(_))),
            format!("even q={q} fixes a twisted band diagram"),
        )?;
    }
    Ok(label)
}
