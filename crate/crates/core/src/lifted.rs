//! The unfolded quiver on `Z^2`: the coset map, its two constructions and local configurations.

use crate::error::{invalid, precondition, Result};
use crate::pin::{lat, Lat, YPin};
use crate::quiver::{ArrowClass, ClassKind, QSTemplate, Quiver};
use crate::yvars::{cycle_diagram, predicted_slots, Compass, FactorSet, COMPASS};
use serde::Serialize;
use std::collections::BTreeMap;

/// `phi(p) = (d-b) p1 + (a-d) p2`, reduced modulo `c+d-a-b` into `Z x {0..l-1}`.
pub fn phi(s: &YPin, p: Lat) -> Lat {
    let w = p.i * (s.d - s.b) + p.j * (s.a - s.d);
    reduce(s, w)
}

fn reduce(s: &YPin, w: Lat) -> Lat {
    let g = s.c + s.d - s.a - s.b;
    w - w.j.div_euclid(g.j) * g
}

/// Generator of the lattice `phi^{-1}(0, 0)`, normalized so its first nonzero coordinate is positive.
pub fn tilde_generator(s: &YPin) -> Lat {
    let m = s.convex_relation().m;
    let g = lat(-m[1] - m[2], m[0] + m[2]);
    if g.i < 0 || (g.i == 0 && g.j < 0) {
        -g
    } else {
        g
    }
}

/// Arrow classes of `Q_S` tagged with their compass type.
pub fn typed_classes(s: &YPin) -> Vec<(Compass, ArrowClass)> {
    let l = s.l();
    let o = lat(0, 0);
    let mut out = vec![];
    let primary = [
        (Compass::W, o, s.c - s.a),
        (Compass::E, o, s.d - s.b),
        (Compass::S, s.c - s.b, o),
        (Compass::N, s.d - s.a, o),
    ];
    for (dir, from, to) in primary {
        let v = if from == o { to } else { from };
        out.push((dir, ArrowClass { kind: ClassKind::Primary, from, to, mult: 1, rows: (0, l - 1 - v.j) }));
    }
    let composite = [
        (Compass::NE, s.c - s.a, s.c - s.b),
        (Compass::NW, s.d - s.b, s.c - s.b),
        (Compass::SE, s.c - s.a, s.d - s.a),
        (Compass::SW, s.d - s.b, s.d - s.a),
    ];
    for (dir, from, to) in composite {
        let top = l - 1 - from.j - to.j;
        if top >= 0 {
            out.push((dir, ArrowClass { kind: ClassKind::Composite, from, to, mult: 1, rows: (0, top) }));
        }
    }
    out
}

/// A rectangle of the lifted quiver with its arrows and `phi`-labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedWindow {
    pub pin: YPin,
    pub lo: Lat,
    pub hi: Lat,
    pub quiver: Quiver,
}

impl LiftedWindow {
    fn empty(pin: &YPin, lo: Lat, hi: Lat) -> Result<LiftedWindow> {
        if hi.i < lo.i || hi.j < lo.j {
            return invalid("empty window");
        }
        let n = ((hi.i - lo.i + 1) * (hi.j - lo.j + 1)) as usize;
        Ok(LiftedWindow { pin: *pin, lo, hi, quiver: Quiver::empty(n) })
    }

    pub fn width(&self) -> i64 {
        self.hi.i - self.lo.i + 1
    }

    pub fn contains(&self, p: Lat) -> bool {
        p.i >= self.lo.i && p.i <= self.hi.i && p.j >= self.lo.j && p.j <= self.hi.j
    }

    pub fn index(&self, p: Lat) -> Option<usize> {
        self.contains(p).then(|| ((p.j - self.lo.j) * self.width() + p.i - self.lo.i) as usize)
    }

    pub fn vertex(&self, idx: usize) -> Lat {
        let w = self.width() as usize;
        lat(self.lo.i + (idx % w) as i64, self.lo.j + (idx / w) as i64)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Lat> + '_ {
        (0..self.quiver.len()).map(|k| self.vertex(k))
    }

    /// Vertices at distance at least `margin` from the window edge.
    pub fn interior(&self, margin: i64) -> Vec<Lat> {
        self.vertices()
            .filter(|p| p.i - self.lo.i >= margin && self.hi.i - p.i >= margin)
            .filter(|p| p.j - self.lo.j >= margin && self.hi.j - p.j >= margin)
            .collect()
    }

    /// Net arrows `u -> v`; zero when either end lies outside.
    pub fn b(&self, u: Lat, v: Lat) -> i64 {
        match (self.index(u), self.index(v)) {
            (Some(x), Some(y)) => self.quiver.b(x, y),
            _ => 0,
        }
    }

    fn add(&mut self, u: Lat, v: Lat, k: i64) -> Result<()> {
        if let (Some(x), Some(y)) = (self.index(u), self.index(v)) {
            self.quiver.add_arrows(x, y, k)?;
        }
        Ok(())
    }

    pub fn label(&self, p: Lat) -> Lat {
        phi(&self.pin, p)
    }

    /// Arrows as `(from, to, multiplicity)` in lattice coordinates.
    pub fn arrows(&self) -> Vec<(Lat, Lat, i64)> {
        self.quiver.arrows().into_iter().map(|(u, v, k)| (self.vertex(u), self.vertex(v), k)).collect()
    }

    pub fn mutate(&self, p: Lat) -> Result<LiftedWindow> {
        let k = self.index(p).ok_or_else(|| crate::Error::Precondition(format!("{p} is outside the window")))?;
        Ok(LiftedWindow { quiver: self.quiver.mutate(k), ..self.clone() })
    }

    pub fn degree(&self, p: Lat) -> i64 {
        let Some(x) = self.index(p) else { return 0 };
        (0..self.quiver.len()).map(|y| self.quiver.b(x, y).abs()).sum()
    }
}

/// Route (i): lift every arrow of `Q_S` along its compass displacement.
pub fn build_by_lift(s: &YPin, lo: Lat, hi: Lat) -> Result<LiftedWindow> {
    let mut w = LiftedWindow::empty(s, lo, hi)?;
    let classes = typed_classes(s);
    for p in w.vertices().collect::<Vec<_>>() {
        let u = phi(s, p);
        for (dir, c) in &classes {
            let base = u - c.from;
            if base.j >= c.rows.0 && base.j <= c.rows.1 {
                w.add(p, p + dir.unit(), c.mult)?;
            }
        }
    }
    Ok(w)
}

/// Route (ii): orient grid edges by the labels `(p i + q j) mod l` and add the diagonals that split
/// a primitive square into two oriented triangles.
pub fn build_by_labels(s: &YPin, lo: Lat, hi: Lat) -> Result<LiftedWindow> {
    let (p, q, m) = (s.d.j - s.b.j, s.c.j - s.b.j, s.l());
    let label = |x: Lat| (p * x.i + q * x.j).rem_euclid(m);
    let mut w = LiftedWindow::empty(s, lo, hi)?;
    for x in w.vertices().collect::<Vec<_>>() {
        let (e, n) = (x + lat(1, 0), x + lat(0, 1));
        match label(e).cmp(&label(x)) {
            std::cmp::Ordering::Greater => w.add(x, e, 1)?,
            std::cmp::Ordering::Less => w.add(e, x, 1)?,
            std::cmp::Ordering::Equal => return invalid("horizontal neighbours share a label"),
        }
        match label(n).cmp(&label(x)) {
            std::cmp::Ordering::Less => w.add(x, n, 1)?,
            std::cmp::Ordering::Greater => w.add(n, x, 1)?,
            std::cmp::Ordering::Equal => return invalid("vertical neighbours share a label"),
        }
    }
    for x in w.vertices().collect::<Vec<_>>() {
        let (e, n, ne) = (x + lat(1, 0), x + lat(0, 1), x + lat(1, 1));
        if !w.contains(ne) {
            continue;
        }
        if splits(&w, e, n, x, ne) {
            w.add(e, n, 1)?;
        }
        if splits(&w, x, ne, e, n) {
            w.add(x, ne, 1)?;
        }
    }
    Ok(w)
}

/// Whether an arrow `u -> v` closes oriented triangles with both `x` and `y`.
fn splits(w: &LiftedWindow, u: Lat, v: Lat, x: Lat, y: Lat) -> bool {
    [x, y].iter().all(|&z| w.b(v, z) > 0 && w.b(z, u) > 0)
}

/// Per-cell results of the structural audit of a lifted window.
#[derive(Clone, Debug, Default, Serialize)]
pub struct LiftAudit {
    pub cells: usize,
    pub horizontal: Vec<Lat>,
    pub vertical: Vec<Lat>,
    pub diagonal: Vec<Lat>,
    pub crossing: Vec<Lat>,
}

impl LiftAudit {
    pub fn ok(&self) -> bool {
        self.horizontal.is_empty() && self.vertical.is_empty() && self.diagonal.is_empty() && self.crossing.is_empty()
    }
}

/// Checks single grid edges, the triangle rule for both diagonals and the absence of crossing
/// diagonals on every primitive square inside the window.
pub fn audit(w: &LiftedWindow) -> LiftAudit {
    let mut a = LiftAudit::default();
    for x in w.vertices() {
        let (e, n, ne) = (x + lat(1, 0), x + lat(0, 1), x + lat(1, 1));
        if w.contains(e) && w.b(x, e).abs() != 1 {
            a.horizontal.push(x);
        }
        if w.contains(n) && w.b(x, n).abs() != 1 {
            a.vertical.push(x);
        }
        if !w.contains(ne) {
            continue;
        }
        a.cells += 1;
        let nw_ok = (w.b(e, n) == 1) == splits(w, e, n, x, ne) && w.b(e, n) >= 0;
        let ne_ok = (w.b(x, ne) == 1) == splits(w, x, ne, e, n) && w.b(x, ne) >= 0;
        if !nw_ok || !ne_ok {
            a.diagonal.push(x);
        }
        if w.b(e, n) != 0 && w.b(x, ne) != 0 {
            a.crossing.push(x);
        }
    }
    a
}

/// Compares each vertex's arrows, pushed forward by `phi`, with the arrows of `Q_S` at its label.
/// Returns the vertices where they differ.
pub fn quotient_mismatches(w: &LiftedWindow, t: &QSTemplate) -> Vec<Lat> {
    let s = &w.pin;
    let reach = s.points().iter().map(|p| p.i.abs()).sum::<i64>() + t.i0.abs() + 2;
    w.interior(1)
        .into_iter()
        .filter(|&p| {
            let u = phi(s, p);
            let mut lifted: BTreeMap<Lat, i64> = BTreeMap::new();
            for d in COMPASS {
                let k = w.b(p, p + d.unit());
                if k != 0 {
                    *lifted.entry(phi(s, p + d.unit())).or_insert(0) += k;
                }
            }
            lifted.retain(|_, k| *k != 0);
            let mut direct: BTreeMap<Lat, i64> = BTreeMap::new();
            for j in 0..t.l {
                for i in u.i - reach..=u.i + reach {
                    let k = t.arrows_between(u, lat(i, j));
                    if k != 0 {
                        direct.insert(lat(i, j), k);
                    }
                }
            }
            lifted != direct
        })
        .collect()
}

/// The incident arrows of a vertex by compass slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalConfig {
    pub id: u8,
    pub outs: Vec<Compass>,
    pub ins: Vec<Compass>,
}

/// Identifies the local configuration of an interior vertex, checking that it is joined to its four
/// axis neighbours, to nothing beyond the eight surrounding vertices, and that its arrows alternate.
pub fn local_config(w: &LiftedWindow, p: Lat) -> Result<LocalConfig> {
    if w.interior(1).iter().all(|&x| x != p) {
        return precondition(format!("{p} is not an interior vertex"));
    }
    let near: Vec<Lat> = COMPASS.iter().map(|d| p + d.unit()).collect();
    let x = w.index(p).unwrap();
    for y in 0..w.quiver.len() {
        let v = w.vertex(y);
        if w.quiver.b(x, y) != 0 && !near.contains(&v) {
            return invalid(format!("{p} is joined to {v} beyond its neighbours"));
        }
    }
    let slots: Vec<(Compass, i64)> = COMPASS.iter().map(|&d| (d, w.b(p, p + d.unit()))).collect();
    if slots.iter().any(|(_, k)| k.abs() > 1) {
        return invalid(format!("{p} has a multiple arrow"));
    }
    for d in [Compass::N, Compass::E, Compass::S, Compass::W] {
        if w.b(p, p + d.unit()) == 0 {
            return invalid(format!("{p} has no arrow towards {d:?}"));
        }
    }
    let present: Vec<i64> = slots.iter().map(|(_, k)| *k).filter(|k| *k != 0).collect();
    if (0..present.len()).any(|k| present[k] == present[(k + 1) % present.len()]) {
        return invalid(format!("arrows at {p} do not alternate"));
    }
    let outs: Vec<Compass> = slots.iter().filter(|(_, k)| *k > 0).map(|(d, _)| *d).collect();
    let ins: Vec<Compass> = slots.iter().filter(|(_, k)| *k < 0).map(|(d, _)| *d).collect();
    let bit = |d: Compass, sh: u8| if outs.contains(&d) { 1u8 << sh } else { 0 };
    let id = 1 + (bit(Compass::N, 3) | bit(Compass::E, 2) | bit(Compass::S, 1) | bit(Compass::W, 0));
    Ok(LocalConfig { id, outs, ins })
}

/// The configuration predicted by the cycle of a covered factor subset, as `(outs, ins)` sorted.
pub fn config_from_cycle(set: FactorSet) -> Option<(Vec<Compass>, Vec<Compass>)> {
    cycle_diagram(set).map(|c| predicted_slots(&c))
}

/// One line of the agreement table between quiver-side stages and cycle diagrams.
#[derive(Clone, Debug, Serialize)]
pub struct AgreementRow {
    pub label_row: i64,
    pub stage: i64,
    pub subset: String,
    pub config: Option<u8>,
    pub observed_outs: Vec<Compass>,
    pub observed_ins: Vec<Compass>,
    /// `None` when the subset has no known multi-ratio.
    pub agrees: Option<bool>,
}

/// For each label row `j` of the unmutated lifted quiver, the configuration found at its vertices
/// and whether it matches the cycle of the subset carried by stage `l - j`.
pub fn agreement_table(s: &YPin, schedule: &BTreeMap<i64, FactorSet>) -> Result<Vec<AgreementRow>> {
    let l = s.l();
    let span = 2 * l + 4;
    let w = build_by_lift(s, lat(-span, -span), lat(span, span))?;
    let mut rows = vec![];
    for j in 0..l {
        let stage = l - j;
        let Some(&set) = schedule.get(&stage) else { continue };
        let mut seen: Option<LocalConfig> = None;
        let mut consistent = true;
        for p in w.interior(1).into_iter().filter(|&p| phi(s, p).j == j) {
            let c = local_config(&w, p).ok();
            match (&seen, c) {
                (None, Some(c)) => seen = Some(c),
                (Some(a), Some(c)) if *a != c => consistent = false,
                (_, None) => consistent = false,
                _ => {}
            }
        }
        let seen = seen.filter(|_| consistent);
        let agrees = config_from_cycle(set).map(|(o, i)| seen.as_ref().is_some_and(|c| c.outs == o && c.ins == i));
        rows.push(AgreementRow {
            label_row: j,
            stage,
            subset: set.to_string(),
            config: seen.as_ref().map(|c| c.id),
            observed_outs: seen.as_ref().map(|c| c.outs.clone()).unwrap_or_default(),
            observed_ins: seen.as_ref().map(|c| c.ins.clone()).unwrap_or_default(),
            agrees,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pin::ZOO;
    use crate::quiver::predicted_subset;

    fn ks() -> YPin {
        YPin::from_pairs([(-1, 1), (1, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn generator_example() {
        let s = ks();
        assert_eq!(tilde_generator(&s), lat(3, -3));
        assert_eq!(phi(&s, lat(3, -3)), lat(0, 0));
        assert_eq!(phi(&s, lat(0, 0)), lat(0, 0));
    }

    #[test]
    fn fibres_are_cosets() {
        for e in ZOO {
            let s = e.pin();
            let g = tilde_generator(&s);
            assert_eq!(phi(&s, g), lat(0, 0), "{}", e.name);
            for i in -4..=4 {
                for j in -4..=4 {
                    for i2 in -4..=4 {
                        for j2 in -4..=4 {
                            let d = lat(i2 - i, j2 - j);
                            let multiple = d.cross(g) == 0 && (if g.i != 0 { d.i % g.i == 0 } else { d.j % g.j == 0 });
                            assert_eq!(phi(&s, lat(i, j)) == phi(&s, lat(i2, j2)), multiple, "{}", e.name);
                        }
                    }
                }
            }
        }
    }

    /// Labels and arrows of the 5x5 lifted picture, rows listed bottom to top.
    #[test]
    fn lifted_window_fixture() {
        let s = ks();
        let labels = [
            ["4", "3''", "2'", "1", "0''"],
            ["3'", "2", "1''", "0'", "-1"],
            ["2''", "1'", "0", "-1''", "-2'"],
            ["1", "0''", "-1'", "-2", "-3''"],
            ["0'", "-1", "-2''", "-3'", "-4"],
        ];
        let at = |x: i64, y: i64| lat(x - 3, y - 3);
        for (y, row) in labels.iter().enumerate() {
            for (x, l) in row.iter().enumerate() {
                let primes = l.matches('\'').count() as i64;
                let i: i64 = l.trim_end_matches('\'').parse().unwrap();
                assert_eq!(phi(&s, at(x as i64 + 1, y as i64 + 1)), lat(i, primes), "label at v{}{}", x + 1, y + 1);
            }
        }
        let drawn = "v12>v11 v13>v12 v13>v14 v15>v14 v21>v22 v23>v22 v24>v23 v24>v25 v32>v31 v32>v33 v34>v33 v35>v34 \
             v42>v41 v43>v42 v43>v44 v45>v44 v51>v52 v53>v52 v54>v53 v54>v55 v11>v21 v31>v21 v41>v31 v41>v51 \
             v22>v12 v22>v32 v42>v32 v52>v42 v23>v13 v33>v23 v33>v43 v53>v43 v14>v24 v34>v24 v44>v34 v44>v54 \
             v25>v15 v25>v35 v45>v35 v55>v45 v12>v23 v23>v34 v34>v45 v31>v42 v42>v53";
        let parse = |t: &str| {
            let b = t.as_bytes();
            at((b[1] - b'0') as i64, (b[2] - b'0') as i64)
        };
        let mut expect: Vec<(Lat, Lat)> = drawn.split_whitespace().map(|t| {
            let (u, v) = t.split_once('>').unwrap();
            (parse(u), parse(v))
        }).collect();
        expect.sort();
        let w = build_by_lift(&s, lat(-2, -2), lat(2, 2)).unwrap();
        let mut got: Vec<(Lat, Lat)> = w.arrows().into_iter().map(|(u, v, _)| (u, v)).collect();
        got.sort();
        assert_eq!(got, expect);
    }

    #[test]
    fn two_routes_agree_and_audit_passes() {
        for e in ZOO {
            let s = e.pin();
            let (lo, hi) = (lat(-7, -7), lat(7, 7));
            let a = build_by_lift(&s, lo, hi).unwrap();
            let b = build_by_labels(&s, lo, hi).unwrap();
            assert_eq!(a, b, "{}", e.name);
            let rep = audit(&a);
            assert!(rep.ok(), "{}: {rep:?}", e.name);
            let t = QSTemplate::build(&s).unwrap();
            assert!(quotient_mismatches(&a, &t).is_empty(), "{}", e.name);
        }
    }

    #[test]
    fn configurations_and_mutations() {
        for e in ZOO {
            let s = e.pin();
            let w = build_by_lift(&s, lat(-6, -6), lat(6, 6)).unwrap();
            let base = w.interior(1).into_iter().find(|&p| phi(&s, p).j == 0).unwrap();
            let c = local_config(&w, base).unwrap();
            assert_eq!((c.outs.clone(), c.ins.clone()), (vec![Compass::E, Compass::W], vec![Compass::N, Compass::S]), "{}", e.name);
            let m = w.mutate(base).unwrap();
            let c = local_config(&m, base).unwrap();
            assert_eq!((c.outs, c.ins), (vec![Compass::N, Compass::S], vec![Compass::E, Compass::W]));
            for p in m.interior(2) {
                assert!(local_config(&m, p).is_ok(), "{} at {p}", e.name);
            }
        }
    }

    #[test]
    fn agreement_rows() {
        for e in ZOO {
            let s = e.pin();
            let t = QSTemplate::build(&s).unwrap();
            let sched: BTreeMap<i64, FactorSet> = (1..=t.l).map(|k| (k, predicted_subset(&t, k))).collect();
            let rows = agreement_table(&s, &sched).unwrap();
            assert_eq!(rows.len() as i64, t.l);
            for r in rows {
                assert!(r.config.is_some(), "{} row {}", e.name, r.label_row);
                assert_ne!(r.agrees, Some(false), "{} row {r:?}", e.name);
            }
        }
    }
}
