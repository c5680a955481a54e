//! The constructive canonical family against the exhaustive oracle.

mod common;

use std::time::Instant;

use common::minimal::minimal_families;
use conway_core::decomposition::{canonical_family, enumerate_haseman};

#[test]
fn canonical_family_matches_exhaustive_oracle() {
    let start = Instant::now();
    let corpus = common::corpus(10);
    assert!(corpus.len() >= 30);
    let mut mismatches = vec![];
    for (name, d) in &corpus {
        let map = d.map();
        let circles = enumerate_haseman(map);
        let oracle = minimal_families(map);
        let constructive = canonical_family(map).unwrap();
        let mut found: Vec<usize> = constructive
            .iter()
            .map(|c| circles.iter().position(|o| o.inside == c.inside).unwrap())
            .collect();
        found.sort_unstable();
        if oracle != vec![found.clone()] {
            mismatches.push(format!("{name}: oracle {oracle:?} constructive {found:?}"));
        }
    }
    let elapsed = start.elapsed();
    assert!(mismatches.is_empty(), "{mismatches:#?}");
    assert!(elapsed.as_secs() < 60, "oracle took {elapsed:?}");
}
