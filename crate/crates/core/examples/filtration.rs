//! The seven filtration conditions on every catalogue pin, and the rank cap above D(S).
use ymesh::filtration::Filtration;
use ymesh::mesh::generate_arrangement;
use ymesh::pin::{zoo_pin, ZOO};

fn main() -> ymesh::Result<()> {
    for e in ZOO {
        let f = Filtration::build(&e.pin())?;
        let a = f.audit(3 * f.m());
        let marks: String = a.conditions.iter().map(|&c| if c { '+' } else { '-' }).collect();
        println!("{:<20} conditions {marks} |H_t| = {} {}", e.name, a.size, a.failures.join("; "));
    }
    let rabbit = zoo_pin("rabbit")?;
    let w = generate_arrangement(&rabbit, 7, 10, 1)?;
    println!("rabbit arrangement asked for 7 dimensions: rank {}", w.rank());
    Ok(())
}
