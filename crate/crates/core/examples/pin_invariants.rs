//! The pin catalogue: D(S) by hull area, by the convex relation and by lattice index.
use ymesh::pin::{random_pin, ZOO};

fn main() {
    println!("{:<20} {:<28} {:>4} {:>4} {:>4} {:>3} {:>3}  hull", "pin", "points", "area", "rel", "lat", "m", "l");
    for e in ZOO {
        let s = e.pin();
        let d = s.d_report();
        assert_eq!(s.d(), e.d);
        println!(
            "{:<20} {:<28} {:>4} {:>4} {:>4} {:>3} {:>3}  {:?} {:?}",
            e.name,
            s.to_string(),
            d.area,
            d.magnitude,
            d.lattice,
            s.m(),
            s.l(),
            s.hull_case(),
            s.convex_relation().m
        );
    }
    let agree = (0..1000).filter(|&k| random_pin(k, 6).d_report().agree()).count();
    println!("random pins with three agreeing routes: {agree}/1000");
}
