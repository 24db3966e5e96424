//! Closed pentagram polygons: quiver mutation reproduces the geometric y-variables.
use ymesh::mesh::PeriodicMesh;
use ymesh::pin::zoo_pin;
use ymesh::quiver::{check_exchange_y, geometric_seed, run_periodic_y, QSTemplate};
use ymesh::yvars::YGrid;

fn main() -> ymesh::Result<()> {
    let s = zoo_pin("pentagram")?;
    let n = 7;
    let t = QSTemplate::build(&s)?;
    let fq = t.materialize(n)?;
    let mut mesh = PeriodicMesh::random(&s, n, 5)?;
    for _ in 0..4 {
        mesh.step_backward()?;
    }
    for _ in 0..10 {
        mesh.step_forward()?;
    }
    let grid = YGrid::from_mesh(&mesh)?;
    let trace = run_periodic_y(&fq, &geometric_seed(&t, &fq, &grid)?, 7)?;
    let (mut same, mut total) = (0, 0);
    for (u, v) in &trace.y {
        if let Some(g) = grid.get(*u) {
            total += 1;
            same += usize::from(g.finite() == Some(v));
        }
    }
    let (checked, fails) = check_exchange_y(&t, n, &trace.y);
    println!("{same}/{total} y-values agree; exchange relation {checked} instances, {} failures", fails.len());
    Ok(())
}
