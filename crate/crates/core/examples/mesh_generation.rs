//! Generic initial rows for the pentagram pin in the plane, propagated forwards and checked.
use ymesh::mesh::{check_relations, generate};
use ymesh::pin::zoo_pin;

fn main() -> ymesh::Result<()> {
    let s = zoo_pin("pentagram")?;
    let mut w = generate(&s, 2, 10, 7)?;
    println!("initial rows {:?}, {} points, rank {}", w.j_range(), w.len(), w.rank());
    w.step(3)?;
    let rep = check_relations(&w);
    println!("after 3 steps: rows {:?}, {} points", w.j_range(), w.len());
    println!("relation instances {:?}, violations {}", rep.checked, rep.violations.len());
    let (_, j1) = w.j_range().unwrap();
    let row = &w.rows[&j1];
    for (k, p) in row.points.iter().enumerate() {
        let c: Vec<String> = p.canonical().iter().map(ymesh::arith::fmt_q).collect();
        println!("  ({},{j1}) = [{}]", row.i_lo + k as i64, c.join(" : "));
    }
    Ok(())
}
