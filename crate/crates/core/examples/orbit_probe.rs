use mwsextic::qbar::{verify_orbit, TowerRing};
use std::time::Instant;

fn main() {
    let ring = TowerRing::from_ints(5, 7);
    for i in 4..=8u8 {
        let t0 = Instant::now();
        match verify_orbit(i, &ring) {
            Ok(rep) => println!(
                "orbit {}: ok={} size={} span_rank={} type={} relations={:?} [{:?}]",
                i, rep.ok, rep.size, rep.span_rank, rep.lattice_type,
                rep.relations_checked.iter().map(|r| (r.name.clone(), r.ok)).collect::<Vec<_>>(),
                t0.elapsed()
            ),
            Err(e) => println!("orbit {}: ERROR {:?} [{:?}]", i, e, t0.elapsed()),
        }
    }
}
