//! Products of shifted y-variables against multi-ratios, one line per factor subset.
use ymesh::mesh::generate_stepped;
use ymesh::pin::zoo_pin;
use ymesh::yvars::{covered_formula, general_y_check, YGrid};

fn main() -> ymesh::Result<()> {
    let (_, w) = generate_stepped(&zoo_pin("pentagram")?, 2, 30, 2, 6)?;
    let grid = YGrid::from_mesh(&w)?;
    for (set, rep) in general_y_check(&w, &grid) {
        let f = covered_formula(set).map(|f| format!("{:+} x {} points", f.sign, f.indices.len())).unwrap_or_default();
        println!("{:<12} {:>4} instances, {} failures   {f}", set.to_string(), rep.instances, rep.failures.len());
    }
    Ok(())
}
