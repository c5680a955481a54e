//! Exhaustive oracle for minimal admissible families.

use conway_core::decomposition::{enumerate_haseman, is_admissible, HasemanCircle};
use conway_core::PlanarMap;

/// Every pairwise-compatible subset of `circles`.
fn compatible_subsets(circles: &[HasemanCircle], n: usize) -> Vec<Vec<usize>> {
    fn grow(i: usize, cur: &mut Vec<usize>, circles: &[HasemanCircle], n: usize, out: &mut Vec<Vec<usize>>) {
        if i == circles.len() {
            out.push(cur.clone());
            return;
        }
        grow(i + 1, cur, circles, n, out);
        if cur.iter().all(|&j| circles[j].compatible(&circles[i], n)) {
            cur.push(i);
            grow(i + 1, cur, circles, n, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    grow(0, &mut vec![], circles, n, &mut out);
    out
}

fn pick(circles: &[HasemanCircle], idx: &[usize]) -> Vec<HasemanCircle> {
    idx.iter().map(|&i| circles[i].clone()).collect()
}

/// All minimal admissible families, as sorted index lists into the
/// enumerated circles.
pub fn minimal_families(map: &PlanarMap) -> Vec<Vec<usize>> {
    let n = map.num_vertices();
    let circles = enumerate_haseman(map);
    compatible_subsets(&circles, n)
        .into_iter()
        .filter(|s| is_admissible(map, &pick(&circles, s)))
        .filter(|s| {
            (0..s.len()).all(|k| {
                let mut t = s.clone();
                t.remove(k);
                !is_admissible(map, &pick(&circles, &t))
            })
        })
        .collect()
}
