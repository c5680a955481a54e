//! Rotational symmetries of projections and q-periodicity obstructions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::codes::to_pd;
use crate::decomposition::Decomposition;
use crate::diagram::LinkDiagram;
use crate::error::PeriodicityError;
use crate::flype::flype_closure;
use crate::map::{vertex_of, Dart};
use crate::tree::{permutation_order, StructureTree, TreeAutomorphism, TreeKind, TreeLabel};

/// A free rotation of the diagram sphere, as a dart permutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionSymmetry {
    pub dart_map: Vec<Dart>,
    pub order: usize,
    /// The two faces containing the rotation poles.
    pub fixed_faces: Vec<usize>,
    /// Not a power of a free symmetry of larger order.
    pub strict: bool,
}

impl ProjectionSymmetry {
    /// Image of each crossing.
    pub fn crossing_map(&self) -> Vec<usize> {
        (0..self.dart_map.len() / 4).map(|v| vertex_of(self.dart_map[4 * v])).collect()
    }

    /// Sizes of the crossing orbits.
    pub fn crossing_orbits(&self) -> Vec<usize> {
        cycle_lengths(&self.crossing_map())
    }
}

fn cycle_lengths(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        if len > 0 {
            out.push(len);
        }
    }
    out
}

fn compose(a: &[Dart], b: &[Dart]) -> Vec<Dart> {
    // x -> a(b(x))
    b.iter().map(|&x| a[x]).collect()
}

fn power(p: &[Dart], k: usize) -> Vec<Dart> {
    let mut r: Vec<Dart> = (0..p.len()).collect();
    for _ in 0..k {
        r = compose(p, &r);
    }
    r
}

/// Faces mapped to themselves by `p`.
fn fixed_faces(d: &LinkDiagram, p: &[Dart]) -> Vec<usize> {
    let (face_of, nfaces) = d.map().face_index();
    let mut rep = vec![usize::MAX; nfaces];
    for (x, &f) in face_of.iter().enumerate() {
        if rep[f] == usize::MAX {
            rep[f] = x;
        }
    }
    (0..nfaces).filter(|&f| face_of[p[rep[f]]] == f).collect()
}

/// No power short of the identity fixes a crossing or an edge, and each
/// fixes exactly two faces.
fn acts_freely(d: &LinkDiagram, p: &[Dart], order: usize) -> bool {
    let map = d.map();
    (1..order).all(|k| {
        let pk = power(p, k);
        let fixes_cell = (0..pk.len()).any(|x| pk[x] == x || pk[x] == map.twin(x) || vertex_of(pk[x]) == vertex_of(x));
        !fixes_cell && fixed_faces(d, &pk).len() == 2
    })
}

/// All free finite-order symmetries of a connected diagram, excluding the
/// identity. For a knot the strand orientation must be preserved.
pub fn projection_symmetries(d: &LinkDiagram) -> Vec<ProjectionSymmetry> {
    let knot = d.component_count() == 1;
    let mut free: Vec<(Vec<Dart>, usize)> = d
        .map()
        .automorphisms()
        .into_iter()
        .filter(|p| p.iter().enumerate().any(|(x, &y)| x != y))
        .filter(|p| !knot || (0..p.len()).all(|x| d.is_outgoing(p[x]) == d.is_outgoing(x)))
        .map(|p| {
            let order = permutation_order(&p);
            (p, order)
        })
        .filter(|(p, order)| acts_freely(d, p, *order))
        .collect();
    free.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    free.iter()
        .map(|(p, order)| {
            let strict = !free
                .iter()
                .any(|(r, big)| big % order == 0 && *big > *order && power(r, big / order) == *p);
            ProjectionSymmetry {
                dart_map: p.clone(),
                order: *order,
                fixed_faces: fixed_faces(d, p),
                strict,
            }
        })
        .collect()
}

/// A strict free symmetry of order exactly `q`, if the projection has one.
pub fn is_q_periodic_projection(d: &LinkDiagram, q: usize) -> Option<ProjectionSymmetry> {
    projection_symmetries(d).into_iter().find(|s| s.order == q && s.strict)
}

/// The automorphism of the essential structure tree induced by a diagram
/// symmetry.
pub fn induced_tree_automorphism(dec: &Decomposition, tree: &StructureTree, s: &ProjectionSymmetry) -> Option<TreeAutomorphism> {
    let n = dec.map.num_vertices();
    let image_of = |v: usize| vertex_of(s.dart_map[4 * v]);
    let mut owner = vec![usize::MAX; n];
    for (t, tv) in tree.vertices.iter().enumerate() {
        for &r in &tv.regions {
            for v in dec.regions[r].crossings.iter() {
                owner[v] = t;
            }
        }
    }
    let edge_map: Vec<usize> = tree
        .edges
        .iter()
        .map(|e| {
            let inside = dec.canonical[e.circle].inside;
            let image = crate::map::VertexSet::from_iter(inside.iter().map(image_of));
            tree.edges.iter().position(|f| {
                let other = dec.canonical[f.circle].inside;
                other == image || other == image.complement(n)
            })
        })
        .collect::<Option<_>>()?;
    let mut vertex_map = vec![usize::MAX; tree.vertices.len()];
    for t in 0..tree.vertices.len() {
        let crossing = tree.vertices[t].regions.iter().flat_map(|&r| dec.regions[r].crossings.iter()).next();
        vertex_map[t] = match crossing {
            Some(v) => owner[image_of(v)],
            None => {
                let incident: Vec<usize> = (0..tree.edges.len())
                    .filter(|&e| tree.edges[e].ends.0 == t || tree.edges[e].ends.1 == t)
                    .collect();
                let ends = |e: usize| {
                    let (a, b) = tree.edges[edge_map[e]].ends;
                    [a, b]
                };
                match incident[..] {
                    [] => t,
                    [e] => ends(e)[0],
                    [e, f, ..] => *ends(e).iter().find(|x| ends(f).contains(x))?,
                }
            }
        };
    }
    Some(TreeAutomorphism::new(vertex_map))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeifertReport {
    pub circles: usize,
    pub genus: i64,
    /// Orbit sizes of Seifert circles under the symmetry.
    pub circle_orbits: Option<Vec<usize>>,
    pub crossing_orbits: Option<Vec<usize>>,
}

/// Seifert circles and genus of the diagram surface, with the orbit
/// structure under an orientation-preserving symmetry when given.
pub fn seifert_report(d: &LinkDiagram, s: Option<&ProjectionSymmetry>) -> SeifertReport {
    let circles = d.seifert_circles();
    let (count, genus) = d.seifert_genus();
    let mut circle_of = vec![usize::MAX; d.map().num_darts()];
    for (i, c) in circles.iter().enumerate() {
        for &x in c {
            circle_of[x] = i;
        }
    }
    let circle_orbits = s.and_then(|s| {
        let perm: Option<Vec<usize>> = circles
            .iter()
            .map(|c| c.first().map(|&x| circle_of[s.dart_map[x]]).filter(|&i| i != usize::MAX))
            .collect();
        perm.map(|p| cycle_lengths(&p))
    });
    SeifertReport {
        circles: count,
        genus,
        circle_orbits,
        crossing_orbits: s.map(|s| s.crossing_orbits()),
    }
}

/// An atom of a Murasugi decomposition, as supplied by the user.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub name: String,
    #[serde(default)]
    pub is_rational: bool,
    #[serde(default)]
    pub is_torus2q: bool,
    /// Known periods; when empty they are looked up from the name and flags.
    #[serde(default)]
    pub periods: Vec<u32>,
}

impl Atom {
    /// Periods known for this atom, or `None` when nothing is known.
    pub fn known_periods(&self) -> Option<Vec<u32>> {
        if !self.periods.is_empty() {
            return Some(self.periods.clone());
        }
        let base = self.name.trim().trim_start_matches("mirror").trim().trim_end_matches(['*', '!']);
        let table: &[(&str, &[u32])] = &[("3_1", &[2, 3]), ("5_1", &[2, 5]), ("7_1", &[2, 7]), ("9_1", &[2, 3, 9])];
        if let Some((_, p)) = table.iter().find(|(n, _)| *n == base) {
            return Some(p.to_vec());
        }
        if self.is_rational && !self.is_torus2q {
            return Some(vec![2]);
        }
        None
    }
}

/// Murasugi adjacency tree of atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomTree {
    pub vertices: Vec<Atom>,
    pub edges: Vec<[usize; 2]>,
}

impl AtomTree {
    fn as_tree(&self) -> Result<StructureTree, PeriodicityError> {
        let n = self.vertices.len();
        if n == 0 || self.edges.len() + 1 != n || self.edges.iter().any(|e| e[0] >= n || e[1] >= n) {
            return Err(PeriodicityError::NotATree);
        }
        let names: Vec<&str> = self.vertices.iter().map(|a| a.name.as_str()).collect();
        let labels = names
            .iter()
            .map(|x| TreeLabel::Weight(names.iter().position(|y| y == x).unwrap() as i64))
            .collect();
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let t = StructureTree::from_edges(TreeKind::Essential, labels, &edges);
        if !t.is_tree() {
            return Err(PeriodicityError::NotATree);
        }
        Ok(t)
    }
}

/// Atoms left invariant by every automorphism of the adjacency tree whose
/// order divides `q`; a q-periodic symmetry makes each of them q-periodic.
pub fn atom_lemma(t: &AtomTree, q: usize) -> Result<Vec<usize>, PeriodicityError> {
    let tree = t.as_tree()?;
    let mut forced: BTreeSet<usize> = (0..t.vertices.len()).collect();
    for phi in tree.automorphisms_of_order(q, false) {
        let fixed: BTreeSet<usize> = tree.fixed_subtree(&phi).vertices.into_iter().collect();
        forced = forced.intersection(&fixed).copied().collect();
    }
    Ok(forced.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Obstruction {
    CrossingCount,
    RationalKnot,
    NoTreeAutomorphism,
    EdgeFixed,
    ParityTBD,
    AtomLemma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Visible,
    Obstructed,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub pd: String,
    pub crossing_map: Vec<usize>,
    pub symmetry: ProjectionSymmetry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicityReport {
    pub q: usize,
    pub verdict: Verdict,
    pub reasons: Vec<Obstruction>,
    /// One line of explanation per reason.
    pub details: Vec<String>,
    pub flags: Vec<String>,
    pub witness: Option<Witness>,
    /// Flype closure members examined by the search.
    pub explored: usize,
    pub truncated: bool,
}

fn check_knot(d: &LinkDiagram, q: usize) -> Result<(), PeriodicityError> {
    if q < 2 {
        return Err(PeriodicityError::InvalidPeriod(q as u32));
    }
    let c = d.component_count();
    if c != 1 {
        return Err(PeriodicityError::NotAKnot(c));
    }
    if !d.is_alternating() {
        return Err(PeriodicityError::NotAlternating);
    }
    if !d.is_reduced() || !d.is_prime() {
        return Err(PeriodicityError::NotPrimeReduced);
    }
    Ok(())
}

/// Tree automorphisms a q-periodic symmetry could induce: `φ^q = id` and
/// the fixed set is a single vertex.
fn admissible_tree_automorphisms(tree: &StructureTree, q: usize) -> (Vec<TreeAutomorphism>, bool) {
    let candidates = tree.automorphisms_of_order(q, false);
    let any_nontrivial = candidates.iter().any(|a| !a.is_identity());
    let good = candidates.into_iter().filter(|a| tree.fixed_subtree(a).is_single_vertex()).collect();
    (good, any_nontrivial)
}

/// The obstruction stage of the periodicity pipeline. The verdict is
/// `Obstructed` when any reason fires and `Inconclusive` otherwise.
pub fn obstruction_report(d: &LinkDiagram, q: usize, atoms: Option<&AtomTree>) -> Result<PeriodicityReport, PeriodicityError> {
    check_knot(d, q)?;
    let mut reasons = Vec::new();
    let mut details = Vec::new();
    let mut flags = Vec::new();
    let n = d.num_crossings();
    if !n.is_multiple_of(q) {
        reasons.push(Obstruction::CrossingCount);
        details.push(format!("crossing number {n} is not a multiple of {q}"));
    }
    if q == 2 {
        flags.push("q2-not-decided".to_string());
    } else {
        let dec = Decomposition::new(d.map())?;
        let tree = StructureTree::essential(&dec);
        if let Some(f) = dec.rational_chain.as_ref().and_then(|_| dec.chain_fraction()) {
            // r/s is the (2,m) torus knot iff s = ±1 mod r
            let (r, s) = f.as_ratio().unwrap_or((1, 0));
            let m = r.abs();
            let torus = m > 1 && ((s - 1).rem_euclid(m) == 0 || (s + 1).rem_euclid(m) == 0);
            if !(torus && (m as usize).is_multiple_of(q)) {
                reasons.push(Obstruction::RationalKnot);
                details.push(format!("rational knot {f} is not a (2,m) torus knot with {q} dividing m"));
            }
        } else {
            let (good, any_nontrivial) = admissible_tree_automorphisms(&tree, q);
            if good.is_empty() {
                if any_nontrivial {
                    reasons.push(Obstruction::EdgeFixed);
                    details.push(format!("every tree automorphism of order dividing {q} fixes an edge"));
                } else {
                    reasons.push(Obstruction::NoTreeAutomorphism);
                    details.push(format!("essential tree has no automorphism of order {q} with a single fixed vertex"));
                }
            } else if q.is_multiple_of(2) {
                let all_tbd = good.iter().all(|a| {
                    let v = tree.fixed_subtree(a).vertices[0];
                    matches!(tree.vertices[v].label, TreeLabel::Weight(_))
                });
                if all_tbd {
                    reasons.push(Obstruction::ParityTBD);
                    details.push(format!("even period {q} would fix a twisted band diagram"));
                }
            }
        }
        if let Some(atoms) = atoms {
            for v in atom_lemma(atoms, q)? {
                let a = &atoms.vertices[v];
                if let Some(p) = a.known_periods() {
                    if !p.contains(&(q as u32)) {
                        reasons.push(Obstruction::AtomLemma);
                        details.push(format!("atom {} is forced to be {q}-periodic but its periods are {p:?}", a.name));
                        break;
                    }
                }
            }
        }
    }
    let verdict = if reasons.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::Obstructed
    };
    Ok(PeriodicityReport {
        q,
        verdict,
        reasons,
        details,
        flags,
        witness: None,
        explored: 0,
        truncated: false,
    })
}

#[derive(Clone, Debug)]
pub struct PeriodicSearch {
    pub witness: Option<(LinkDiagram, ProjectionSymmetry)>,
    pub explored: usize,
    pub truncated: bool,
}

/// Search the flype closure, in canonical order, for a diagram with a
/// strict free symmetry of order `q`.
pub fn find_periodic_projection(d: &LinkDiagram, q: usize, budget: usize) -> Result<PeriodicSearch, PeriodicityError> {
    check_knot(d, q)?;
    let closure = flype_closure(d, budget)?;
    let explored = closure.diagrams.len();
    for x in closure.diagrams {
        if let Some(s) = is_q_periodic_projection(&x, q) {
            assert_eq!(
                x.num_crossings() % q,
                0,
                "a free symmetry of order q permutes crossings in orbits of size q"
            );
            return Ok(PeriodicSearch {
                witness: Some((x, s)),
                explored,
                truncated: closure.truncated,
            });
        }
    }
    Ok(PeriodicSearch {
        witness: None,
        explored,
        truncated: closure.truncated,
    })
}

/// The full pipeline: obstructions, then the search for a visible witness.
pub fn periodicity_report(d: &LinkDiagram, q: usize, atoms: Option<&AtomTree>, budget: usize) -> Result<PeriodicityReport, PeriodicityError> {
    let mut report = obstruction_report(d, q, atoms)?;
    if report.verdict == Verdict::Obstructed {
        return Ok(report);
    }
    let search = find_periodic_projection(d, q, budget)?;
    report.explored = search.explored;
    report.truncated = search.truncated;
    if let Some((x, s)) = search.witness {
        report.verdict = Verdict::Visible;
        report.witness = Some(Witness {
            pd: to_pd(&x),
            crossing_map: s.crossing_map(),
            symmetry: s,
        });
    }
    Ok(report)
}
