//! A small configured sweep; prints the per-check summary and the exit status it implies.
use ymesh::verify::{run_verify_all, summary, ExperimentConfig};

fn main() -> ymesh::Result<()> {
    let cfg = ExperimentConfig::from_json(r#"{"pins": ["pentagram", "short diagonal", [[0,0],[1,0],[0,1],[1,1]]], "seeds": [1, 2], "quotients": [5, 6]}"#)?;
    let rep = run_verify_all(&cfg)?;
    for (check, (pass, total)) in summary(&rep) {
        println!("{check:<28} {pass}/{total}");
    }
    println!("hard failures {}, exit status {}", rep.hard_failures(), rep.exit_code());
    Ok(())
}
