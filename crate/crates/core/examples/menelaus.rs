//! Six-point multi-ratios on planar meshes and the four-line bracket product on random data.
use ymesh::mesh::generate_stepped;
use ymesh::pin::zoo_pin;
use ymesh::yvars::{bracket_random, menelaus_check};

fn main() -> ymesh::Result<()> {
    for name in ["pentagram", "gopher", "penguin"] {
        let (_, w) = generate_stepped(&zoo_pin(name)?, 2, 20, 4, 3)?;
        let rep = menelaus_check(&w);
        println!("{name:<10} multi-ratio = -1 on {} instances, {} failures", rep.instances, rep.failures.len());
    }
    let rep = bracket_random(100, 9);
    println!("bracket product = 1 on {} random configurations, {} failures", rep.instances, rep.failures.len());
    Ok(())
}
