//! Fractal point sets and the dimensions their mesh points span.
use ymesh::fractal::{conjecture_rows, genericity_audit, make_fractal, point_overlaps, window_for};
use ymesh::pin::zoo_pin;

fn main() -> ymesh::Result<()> {
    let s = zoo_pin("penguin")?;
    for k in 0..=4 {
        println!("penguin {k}-fractal: {} points", make_fractal(&s, ymesh::lat(0, 0), k).len());
    }
    for o in point_overlaps(&s, 3) {
        println!("sub-fractals {:?} also share {:?}", o.pair, o.extra);
    }
    for (name, dim) in [("pentagram", 2), ("short diagonal", 3)] {
        let w = window_for(&zoo_pin(name)?, dim, 4, 4, 1)?;
        println!("{name} in dimension {dim}: 2-generic {}", genericity_audit(&w, 2)?.generic());
        for r in conjecture_rows(name, &w, 4)? {
            println!("  k={} expected {} observed {}..{} on {}/{}", r.k, r.expected, r.observed_min, r.observed_max, r.matches, r.samples);
        }
    }
    Ok(())
}
