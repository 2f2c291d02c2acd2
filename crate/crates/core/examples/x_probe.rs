// Development probe for the size-108 orbit generators.
use mwsextic::ellcurve::{CoefficientField, Curve};
use mwsextic::heightlat::gram_matrix;
use mwsextic::qbar::{orbit_points, TowerRing};
use std::time::Instant;

fn main() {
    let ring = TowerRing::from_ints(5, 7);
    let curve = Curve::new(ring.clone(), ring.from_rat(&ring.a), ring.from_rat(&ring.b));
    let t0 = Instant::now();
    let pts = orbit_points(8, &ring).unwrap();
    println!("points built in {:?}, count {}", t0.elapsed(), pts.len());
    let idx = |o: usize, j: usize, m: usize, n: usize| (((o - 1) * 3 + j) * 2 + m) * 2 + n;
    let gens = [
        idx(1, 0, 0, 0), idx(1, 0, 1, 0), idx(1, 1, 0, 0), idx(1, 1, 1, 0),
        idx(1, 2, 0, 0), idx(3, 0, 0, 0), idx(3, 0, 1, 0), idx(4, 0, 0, 0),
    ];
    let gen_pts: Vec<_> = gens.iter().map(|&i| pts[i].clone()).collect();
    let t0 = Instant::now();
    let g = gram_matrix(&curve, &gen_pts).unwrap();
    println!("gram in {:?}", t0.elapsed());
    for row in &g.entries {
        println!("{row:?}");
    }
    println!("det = {}", g.det());
    // distinctness sanity
    let mut dup = 0;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            if pts[a] == pts[b] { dup += 1; }
        }
    }
    println!("duplicates: {dup}");
}
