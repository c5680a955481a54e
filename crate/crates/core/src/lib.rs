//! Canonical Conway decomposition of alternating link diagrams: Haseman
//! circles, twisted band diagrams and jewels, structure trees, rational tangle
//! fractions, flypes and periodic projections.

pub mod codes;
pub mod decomposition;
pub mod diagram;
pub mod error;
pub mod families;
pub mod flype;
pub mod fraction;
pub mod map;
pub mod periodicity;
pub mod tangle;
pub mod tree;

pub use codes::{parse_any, parse_gauss, parse_pd, to_pd};
pub use decomposition::{BoxRef, Decomposition, HasemanCircle, RationalTangle, Region, RegionKind};
pub use diagram::{ConnectionPath, LinkDiagram};
pub use error::*;
pub use flype::{
    apply_flype, available_flypes, diagram_key, flype_closure, flype_equivalent, flype_orbits, normalize_twists, FlypeClosure, FlypeMove, FlypeOrbit,
};
pub use fraction::{cardan_to_diagram, eval_cf, expand_homogeneous, fractions_equal, tangle_fraction, ContinuedFraction, Fraction};
pub use map::{Dart, PlanarMap, Vertex, VertexSet};
pub use periodicity::{
    atom_lemma, find_periodic_projection, is_q_periodic_projection, obstruction_report, periodicity_report, projection_symmetries, seifert_report,
    Atom, AtomTree, Obstruction, PeriodicityReport, ProjectionSymmetry, Verdict,
};
pub use tangle::{alternate, Tangle};
pub use tree::{canonical_tree, essential_tree, tree_isomorphic, FixedSubtree, StructureTree, TreeAutomorphism, TreeKind, TreeLabel};
