//! One-dimensional period-one quivers: the Somos-4 quiver produces Somos-4.
use ymesh::arith::{q, qi};
use ymesh::quiver::{fordy_marsh_run, fordy_marsh_y_recurrence, is_period_one_1d, Quiver};

fn main() -> ymesh::Result<()> {
    let somos = Quiver::from_matrix(vec![vec![0, 1, -2, 1], vec![-1, 0, 3, -2], vec![2, -3, 0, 1], vec![-1, 2, -1, 0]])?;
    println!("period one: {}", is_period_one_1d(&somos));
    let run = fordy_marsh_run(&somos, &vec![qi(1); 4], &[q(1, 2), qi(2), q(3, 5), qi(3)], 12)?;
    let xs: Vec<String> = run.x.iter().map(|x| x.to_string()).collect();
    println!("x: {}", xs.join(", "));
    let again = fordy_marsh_y_recurrence(&somos, &run.y[..4], run.y.len())?;
    println!("y recurrence matches mutation: {}", again == run.y);
    Ok(())
}
