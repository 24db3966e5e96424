//! The lifted quiver on the plane: labels, local configurations and agreement with cycle diagrams.
use std::collections::BTreeMap;
use ymesh::lifted::{agreement_table, audit, build_by_labels, build_by_lift, phi, tilde_generator};
use ymesh::pin::ZOO;
use ymesh::quiver::{predicted_subset, QSTemplate};
use ymesh::{lat, YPin};

fn main() -> ymesh::Result<()> {
    let s = YPin::from_pairs([(-1, 1), (1, 1), (0, 2), (0, 3)])?;
    println!("generator {}", tilde_generator(&s));
    for y in (-2..=2).rev() {
        let row: Vec<String> = (-2..=2).map(|x| format!("{:>7}", phi(&s, lat(x, y)).to_string())).collect();
        println!("{}", row.join(""));
    }
    for e in ZOO {
        let s = e.pin();
        let (lo, hi) = (lat(-6, -6), lat(6, 6));
        let w = build_by_lift(&s, lo, hi)?;
        let same = w == build_by_labels(&s, lo, hi)?;
        let t = QSTemplate::build(&s)?;
        let sched: BTreeMap<_, _> = (1..=t.l).map(|k| (k, predicted_subset(&t, k))).collect();
        let rows = agreement_table(&s, &sched)?;
        let agree = rows.iter().filter(|r| r.agrees == Some(true)).count();
        println!("{:<20} routes agree {same}, audit {}, cycle agreement {agree}/{}", e.name, audit(&w).ok(), rows.len());
    }
    Ok(())
}
