//! (I,J)-maps: horizontal meshes skip rows by them, and reversing the steps inverts them.
use ymesh::ij::{inverse_check, row_skip_check, Polygon};
use ymesh::mesh::{generate_stepped, Sampler};
use ymesh::pin::zoo_pin;

fn main() -> ymesh::Result<()> {
    for name in ["short diagonal", "giraffe"] {
        let s = zoo_pin(name)?;
        let corr = s.ij_correspondence()?;
        let (_, w) = generate_stepped(&s, corr.dim, 30, 2, 4)?;
        let j0 = *w.rows.keys().next().unwrap();
        let (n, fails) = row_skip_check(&w, &corr, j0)?;
        println!(
            "{name}: I={:?} J={:?}, row {j0} -> {}: {n} vertices, {} mismatches",
            corr.i_steps, corr.j_steps, j0 + corr.row_step, fails.len()
        );
    }
    let mut rng = Sampler::new(4, 0);
    let a = Polygon { lo: 0, points: (0..20).map(|_| rng.point(3).unwrap()).collect() };
    for (i, j) in [(vec![2, 2], vec![1, 1]), (vec![1, 2], vec![3, 1])] {
        let (n, fails) = inverse_check(&a, &i, &j)?;
        println!("T_(J*,I*) T_(I,J) with I={i:?} J={j:?}: {n} vertices, {} mismatches", fails.len());
    }
    Ok(())
}
