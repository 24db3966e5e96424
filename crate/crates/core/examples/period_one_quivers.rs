//! The quotient quivers and their period-one property; also the single-mutation fixture.
use ymesh::pin::ZOO;
use ymesh::quiver::{six_vertex_quiver, verify_period_one, QSTemplate};

fn main() -> ymesh::Result<()> {
    for e in ZOO {
        let t = QSTemplate::build(&e.pin())?;
        let ok = (4..=8).all(|n| t.materialize(n).map(|fq| verify_period_one(&fq).ok()).unwrap_or(false));
        let star: Vec<String> = t.star_of_origin().iter().map(|(v, m)| format!("{v}:{m:+}")).collect();
        println!("{:<20} l = {}  arrows at origin {}  period one for n=4..8: {ok}", e.name, t.l, star.join(" "));
    }
    let q = six_vertex_quiver();
    println!("six-vertex quiver: {:?}", q.arrows());
    println!("after mutating 2: {:?}", q.mutate(1).arrows());
    Ok(())
}
