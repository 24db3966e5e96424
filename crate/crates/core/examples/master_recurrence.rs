//! The y-variable recurrence checked exactly on generated meshes.
use ymesh::mesh::generate_stepped;
use ymesh::pin::ZOO;
use ymesh::verify::recurrence_steps;
use ymesh::yvars::{check_recurrence, YGrid};

fn main() -> ymesh::Result<()> {
    for e in ZOO.iter().take(8) {
        let s = e.pin();
        let dim = s.d().min(2) as usize;
        let (_, w) = generate_stepped(&s, dim, 30, 1, recurrence_steps(&s, dim))?;
        let rep = check_recurrence(&YGrid::from_mesh(&w)?, &s);
        println!("{:<20} dim {dim}: {} instances, {} failures", e.name, rep.instances, rep.failures.len());
    }
    Ok(())
}
