//! Shared fixtures for the criterion benchmarks.

use lpproj_core::rational::Vector;
use lpproj_core::verify::{case_rng, random_polytope, random_cut};
use lpproj_core::Polytope;
use lpproj_core::polytope::Hyperplane;

/// Deterministic point cloud whose hull is full-dimensional.
pub fn fixture_points(n: usize, seed: u64) -> Vec<Vector> {
    let mut rng = case_rng(seed, 0xbe);
    random_polytope(n, &mut rng, false)
        .expect("fixture polytope")
        .vertices()
        .to_vec()
}

pub fn fixture_polytope(n: usize, seed: u64) -> Polytope {
    let mut rng = case_rng(seed, 0xbe);
    random_polytope(n, &mut rng, false).expect("fixture polytope")
}

pub fn fixture_cut(poly: &Polytope, seed: u64) -> Hyperplane {
    let mut rng = case_rng(seed, 0xcf);
    random_cut(poly, &mut rng, false).expect("fixture cut")
}
