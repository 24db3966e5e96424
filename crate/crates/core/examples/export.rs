//! Writes a mesh (JSON and affine CSV), a quotient quiver (JSON and DOT) and a y-trace (CSV).
use std::fs;
use ymesh::arith::qi;
use ymesh::io::{affine_csv, mesh_from_json, mesh_to_json, quiver_dot, quiver_json, y_csv};
use ymesh::mesh::generate;
use ymesh::pin::zoo_pin;
use ymesh::quiver::{run_periodic_y, QSTemplate};

fn main() -> ymesh::Result<()> {
    let dir = std::env::temp_dir().join("ymesh-export");
    fs::create_dir_all(&dir)?;
    let s = zoo_pin("pentagram")?;
    let mut w = generate(&s, 2, 8, 1)?;
    w.step(2)?;
    let json = mesh_to_json(&w)?;
    assert_eq!(mesh_from_json(&json)?, w);
    fs::write(dir.join("mesh.json"), &json)?;
    affine_csv(&w, fs::File::create(dir.join("mesh.csv"))?)?;
    let fq = QSTemplate::build(&s)?.materialize(6)?;
    let verts: Vec<_> = (0..fq.quiver.len()).map(|k| fq.vertex(k)).collect();
    fs::write(dir.join("quiver.json"), serde_json::to_string_pretty(&quiver_json(&verts, &fq.quiver))?)?;
    fs::write(dir.join("quiver.dot"), quiver_dot("Q_6", &verts, &fq.quiver))?;
    let trace = run_periodic_y(&fq, &vec![qi(2); fq.quiver.len()], 4)?;
    y_csv(&trace.y, fs::File::create(dir.join("ytrace.csv"))?)?;
    for f in fs::read_dir(&dir)? {
        let f = f?;
        println!("{} ({} bytes)", f.path().display(), f.metadata()?.len());
    }
    Ok(())
}
