//! Forward then backward propagation reproduces the original rows.
use ymesh::mesh::generate_stepped;
use ymesh::pin::zoo_pin;

fn main() -> ymesh::Result<()> {
    for (name, dim) in [("lower pentagram", 1), ("pentagram", 2), ("short diagonal", 3), ("rabbit", 4)] {
        let (w, _) = generate_stepped(&zoo_pin(name)?, dim, 24, 3, 0)?;
        let (ok, compared) = w.inverse_round_trip(3)?;
        println!("{name:<16} dim {dim}: {compared} points compared, identical {ok}");
    }
    Ok(())
}
