//! Quivers, seed and Y-seed mutation, period-one quivers and the quiver `Q_S` of a pin.

use crate::arith::Q;
use crate::error::{degenerate, invalid, precondition, Result};
use crate::pin::{lat, Lat, YPin};
use crate::yvars::{general_y_product, FactorSet, YGrid};
use num::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// A quiver stored as its skew-symmetric exchange matrix: `b[u][v]` counts arrows `u -> v`
/// minus arrows `v -> u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Quiver {
    b: Vec<Vec<i64>>,
}

impl Quiver {
    pub fn empty(n: usize) -> Quiver {
        Quiver { b: vec![vec![0; n]; n] }
    }

    /// Builds a quiver from `(from, to, multiplicity)` triples; opposite arrows cancel.
    pub fn from_arrows(n: usize, arrows: &[(usize, usize, i64)]) -> Result<Quiver> {
        let mut q = Quiver::empty(n);
        for &(u, v, k) in arrows {
            q.add_arrows(u, v, k)?;
        }
        Ok(q)
    }

    pub fn from_matrix(b: Vec<Vec<i64>>) -> Result<Quiver> {
        let n = b.len();
        for (u, row) in b.iter().enumerate() {
            if row.len() != n {
                return invalid("exchange matrix is not square");
            }
            if row[u] != 0 || (0..n).any(|v| row[v] != -b[v][u]) {
                return invalid("exchange matrix is not skew-symmetric");
            }
        }
        Ok(Quiver { b })
    }

    pub fn add_arrows(&mut self, u: usize, v: usize, k: i64) -> Result<()> {
        let n = self.len();
        if u >= n || v >= n {
            return invalid(format!("arrow {u} -> {v} leaves the vertex range 0..{n}"));
        }
        if u == v {
            return invalid(format!("loop at vertex {u}"));
        }
        self.b[u][v] += k;
        self.b[v][u] -= k;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn b(&self, u: usize, v: usize) -> i64 {
        self.b[u][v]
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.b
    }

    /// Arrows as `(from, to, multiplicity)` with positive multiplicity.
    pub fn arrows(&self) -> Vec<(usize, usize, i64)> {
        let n = self.len();
        (0..n)
            .flat_map(|u| (0..n).filter(move |&v| self.b[u][v] > 0).map(move |v| (u, v, self.b[u][v])))
            .collect()
    }

    pub fn mutate(&self, k: usize) -> Quiver {
        let n = self.len();
        let mut b = self.b.clone();
        for u in 0..n {
            for v in 0..n {
                b[u][v] = if u == k || v == k {
                    -self.b[u][v]
                } else {
                    let (x, y) = (self.b[u][k], self.b[k][v]);
                    self.b[u][v] + (x.abs() * y + x * y.abs()) / 2
                };
            }
        }
        Quiver { b }
    }

    /// Mutation at each vertex of a set in turn; the caller guarantees the set is arrow-free.
    pub fn mutate_all(&self, ks: &[usize]) -> Quiver {
        ks.iter().fold(self.clone(), |q, &k| q.mutate(k))
    }

    /// True when no arrow joins two vertices of `ks`.
    pub fn independent(&self, ks: &[usize]) -> bool {
        ks.iter().all(|&u| ks.iter().all(|&v| self.b[u][v] == 0))
    }

    /// The quiver whose vertex `u` plays the role of vertex `perm[u]` here: `b'[u][v] = b[perm u][perm v]`.
    pub fn pullback(&self, perm: &[usize]) -> Quiver {
        let n = self.len();
        Quiver { b: (0..n).map(|u| (0..n).map(|v| self.b[perm[u]][perm[v]]).collect()).collect() }
    }
}

/// Six-vertex quiver used to illustrate mutation (vertices `1..6` stored as `0..5`).
pub fn six_vertex_quiver() -> Quiver {
    let arrows = [(1, 2), (3, 2), (4, 1), (2, 5), (6, 3), (5, 4), (5, 6)];
    let a: Vec<(usize, usize, i64)> = arrows.iter().map(|&(u, v)| (u - 1, v - 1, 1)).collect();
    Quiver::from_arrows(6, &a).expect("fixture arrows are valid")
}

/// A Y-seed: a quiver with a nonzero rational at every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YSeed {
    pub quiver: Quiver,
    pub y: Vec<Q>,
}

impl YSeed {
    pub fn new(quiver: Quiver, y: Vec<Q>) -> Result<YSeed> {
        if y.len() != quiver.len() {
            return invalid(format!("{} y-values for {} vertices", y.len(), quiver.len()));
        }
        if let Some(u) = y.iter().position(Zero::is_zero) {
            return degenerate(format!("y-value at vertex {u} is zero"));
        }
        Ok(YSeed { quiver, y })
    }

    pub fn mutate(&self, k: usize) -> Result<YSeed> {
        Ok(YSeed { quiver: self.quiver.mutate(k), y: mutate_y(&self.quiver, &self.y, k)? })
    }
}

/// Y-seed mutation of the values only, against the quiver before mutation.
pub fn mutate_y(q: &Quiver, y: &[Q], k: usize) -> Result<Vec<Q>> {
    let yk = &y[k];
    if yk.is_zero() {
        return degenerate(format!("y-value at vertex {k} is zero"));
    }
    let p = Q::one() + yk;
    let has_neighbors = (0..q.len()).any(|u| q.b(u, k) != 0);
    if p.is_zero() && has_neighbors {
        return degenerate(format!("1 + y vanishes at mutated vertex {k}"));
    }
    let pinv = Q::one() + yk.recip();
    Ok((0..y.len())
        .map(|u| {
            if u == k {
                return yk.recip();
            }
            let bu = q.b(u, k);
            match bu.signum() {
                1 => &y[u] * pow(&p, bu),
                -1 => &y[u] / pow(&pinv, -bu),
                _ => y[u].clone(),
            }
        })
        .collect())
}

/// Seed mutation of cluster variables: `x_k x_k' = prod_{k->w} x_w + prod_{w->k} x_w`.
pub fn mutate_x(q: &Quiver, x: &[Q], k: usize) -> Result<Vec<Q>> {
    if x[k].is_zero() {
        return degenerate(format!("cluster variable at vertex {k} is zero"));
    }
    let (mut out_p, mut in_p) = (Q::one(), Q::one());
    for (w, xw) in x.iter().enumerate() {
        let bk = q.b(k, w);
        if bk > 0 {
            out_p *= pow(xw, bk);
        } else if bk < 0 {
            in_p *= pow(xw, -bk);
        }
    }
    let mut x = x.to_vec();
    x[k] = (out_p + in_p) / &x[k];
    Ok(x)
}

fn pow(x: &Q, e: i64) -> Q {
    (0..e).fold(Q::one(), |acc, _| acc * x)
}

/// One-dimensional period-one test: after mutating vertex `0`, vertex `u` looks like vertex `u - 1`
/// did before, and vertex `0` like vertex `m - 1`.
pub fn is_period_one_1d(q: &Quiver) -> bool {
    let m = q.len();
    if m == 0 {
        return false;
    }
    let perm: Vec<usize> = (0..m).map(|u| (u + m - 1) % m).collect();
    q.mutate(0) == q.pullback(&perm)
}

/// Sequences produced by mutating a 1D period-one quiver at `0, 1, ..., m-1, 0, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FordyMarshRun {
    /// `x_1, x_2, ...`: the initial cluster followed by each newly created variable.
    pub x: Vec<Q>,
    /// `y_1, y_2, ...`: the value at each vertex just before it is mutated.
    pub y: Vec<Q>,
}

/// Drives the mutation sequence directly on the evolving quiver for `steps` mutations.
pub fn fordy_marsh_run(q: &Quiver, x0: &[Q], y0: &[Q], steps: usize) -> Result<FordyMarshRun> {
    if !is_period_one_1d(q) {
        return precondition("quiver is not period one");
    }
    let m = q.len();
    let (mut quiver, mut x, mut y) = (q.clone(), x0.to_vec(), y0.to_vec());
    let mut run = FordyMarshRun { x: x0.to_vec(), y: vec![] };
    for t in 0..steps {
        let k = t % m;
        run.y.push(y[k].clone());
        x = mutate_x(&quiver, &x, k)?;
        y = mutate_y(&quiver, &y, k)?;
        quiver = quiver.mutate(k);
        run.x.push(x[k].clone());
    }
    Ok(run)
}

/// Continues `x_1..x_m` by the exchange recurrence read off the arrows at vertex `0`.
pub fn fordy_marsh_x_recurrence(q: &Quiver, x0: &[Q], len: usize) -> Result<Vec<Q>> {
    let m = q.len();
    let mut x = x0.to_vec();
    while x.len() < len {
        let j = x.len() - m;
        let (mut out_p, mut in_p) = (Q::one(), Q::one());
        for k in 1..m {
            let b = q.b(0, k);
            if b > 0 {
                out_p *= pow(&x[j + k], b);
            } else if b < 0 {
                in_p *= pow(&x[j + k], -b);
            }
        }
        if x[j].is_zero() {
            return degenerate(format!("x_{} vanished", j + 1));
        }
        x.push((out_p + in_p) / &x[j]);
    }
    Ok(x)
}

/// Continues `y_1..y_m` by `y_{j+m} y_j = prod_{k->0} (1 + y_{j+k}) / prod_{0->k} (1 + y_{j+k}^{-1})`.
pub fn fordy_marsh_y_recurrence(q: &Quiver, y0: &[Q], len: usize) -> Result<Vec<Q>> {
    let m = q.len();
    let mut y = y0.to_vec();
    while y.len() < len {
        let j = y.len() - m;
        let mut rhs = Q::one();
        for k in 1..m {
            let b = q.b(k, 0);
            let v = &y[j + k];
            if b > 0 {
                rhs *= pow(&(Q::one() + v), b);
            } else if b < 0 {
                rhs /= pow(&(Q::one() + v.recip()), -b);
            }
        }
        if y[j].is_zero() || rhs.is_zero() {
            return degenerate(format!("y_{} degenerate", j + 1));
        }
        y.push(rhs / &y[j]);
    }
    Ok(y)
}

/// Whether a template arrow class comes straight from an offset or from a composite correction.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ClassKind {
    Primary,
    Composite,
}

/// Arrows `(k, r) + from -> (k, r) + to` for all `k` and `r` in `rows`, each with `mult` copies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowClass {
    pub kind: ClassKind,
    pub from: Lat,
    pub to: Lat,
    pub mult: i64,
    pub rows: (i64, i64),
}

/// The translation-invariant period-one quiver `Q_S` on `Z x {0..l-1}`.
#[derive(Clone, Debug, Serialize)]
pub struct QSTemplate {
    pub pin: YPin,
    pub l: i64,
    pub i0: i64,
    pub m: BTreeMap<Lat, i64>,
    pub classes: Vec<ArrowClass>,
}

fn eps(mv: i64, mw: i64) -> i64 {
    (mw.abs() * mv - mw * mv.abs()) / 2
}

impl QSTemplate {
    pub fn build(pin: &YPin) -> Result<QSTemplate> {
        let s = *pin;
        let g = s.c + s.d - s.a - s.b;
        let mut m = BTreeMap::new();
        for (v, k) in [(s.c - s.a, 1), (s.d - s.b, 1), (s.c - s.b, -1), (s.d - s.a, -1)] {
            *m.entry(v).or_insert(0) += k;
        }
        m.retain(|_, k| *k != 0);
        QSTemplate::from_multiplicities(s, g, m)
    }

    /// Template for arbitrary multiplicities `m_v` with `0 < v2 < l` and `m_v = m_{(i0,l)-v}`.
    pub fn from_multiplicities(pin: YPin, g: Lat, m: BTreeMap<Lat, i64>) -> Result<QSTemplate> {
        let l = g.j;
        for (&v, &k) in &m {
            if v.j <= 0 || v.j >= l {
                return invalid(format!("offset {v} is outside rows 1..{}", l - 1));
            }
            if m.get(&(g - v)) != Some(&k) {
                return invalid(format!("multiplicities are not symmetric at {v}"));
            }
        }
        let mut classes = vec![];
        for (&v, &k) in &m {
            let (from, to) = if k > 0 { (lat(0, 0), v) } else { (v, lat(0, 0)) };
            classes.push(ArrowClass { kind: ClassKind::Primary, from, to, mult: k.abs(), rows: (0, l - 1 - v.j) });
        }
        for (&v, &mv) in &m {
            for (&w, &mw) in &m {
                let e = eps(mv, mw);
                if e > 0 && v.j + w.j < l {
                    classes.push(ArrowClass {
                        kind: ClassKind::Composite,
                        from: v,
                        to: w,
                        mult: e,
                        rows: (0, l - 1 - v.j - w.j),
                    });
                }
            }
        }
        Ok(QSTemplate { pin, l, i0: g.i, m, classes })
    }

    /// Net arrow count between lattice vertices `u -> w`, summed over all classes.
    pub fn arrows_between(&self, u: Lat, w: Lat) -> i64 {
        let mut total = 0;
        for c in &self.classes {
            for (x, y, sign) in [(u, w, 1), (w, u, -1)] {
                let base = x - c.from;
                if y - base == c.to && base.j >= c.rows.0 && base.j <= c.rows.1 {
                    total += sign * c.mult;
                }
            }
        }
        total
    }

    /// Arrows leaving or entering `(0, 0)` as net counts per offset.
    pub fn star_of_origin(&self) -> BTreeMap<Lat, i64> {
        let mut out = BTreeMap::new();
        for j in 0..self.l {
            let reach = self.m.keys().map(|v| v.i.abs()).max().unwrap_or(0) * 2;
            for i in -reach..=reach {
                let k = self.arrows_between(lat(0, 0), lat(i, j));
                if k != 0 {
                    out.insert(lat(i, j), k);
                }
            }
        }
        out
    }

    /// The quotient `Q_{n,S}` by the translation `(n, 0)`.
    pub fn materialize(&self, n: usize) -> Result<FiniteQuiver> {
        if n < 3 {
            return invalid(format!("quotient size {n} is below 3"));
        }
        let fq = FiniteQuiver { n, l: self.l, i0: self.i0, quiver: Quiver::empty(n * self.l as usize) };
        let mut q = fq.quiver.clone();
        for c in &self.classes {
            if c.from.j == c.to.j && (c.to.i - c.from.i).rem_euclid(n as i64) == 0 {
                return invalid(format!("quotient size {n} folds arrow class {} -> {} into loops", c.from, c.to));
            }
            for k in 0..n as i64 {
                for r in c.rows.0..=c.rows.1 {
                    let base = lat(k, r);
                    q.add_arrows(fq.index(base + c.from), fq.index(base + c.to), c.mult)?;
                }
            }
        }
        Ok(FiniteQuiver { quiver: q, ..fq })
    }
}

/// A finite quotient of a period-one quiver: vertices `(i mod n, j)` with `0 <= j < l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteQuiver {
    pub n: usize,
    pub l: i64,
    pub i0: i64,
    pub quiver: Quiver,
}

impl FiniteQuiver {
    pub fn index(&self, p: Lat) -> usize {
        debug_assert!(p.j >= 0 && p.j < self.l);
        p.j as usize * self.n + p.i.rem_euclid(self.n as i64) as usize
    }

    pub fn vertex(&self, idx: usize) -> Lat {
        lat((idx % self.n) as i64, (idx / self.n) as i64)
    }

    pub fn row(&self, j: i64) -> Vec<usize> {
        (0..self.n as i64).map(|i| self.index(lat(i, j))).collect()
    }

    /// The role each vertex takes after row `0` is mutated: `(i, 0) -> (i + i0, l - 1)`, `(i, j) -> (i, j - 1)`.
    pub fn shift_perm(&self) -> Vec<usize> {
        (0..self.quiver.len())
            .map(|u| {
                let p = self.vertex(u);
                if p.j == 0 {
                    self.index(lat(p.i + self.i0, self.l - 1))
                } else {
                    self.index(lat(p.i, p.j - 1))
                }
            })
            .collect()
    }

    /// The quiver after mutating the whole row `0`.
    pub fn advance(&self) -> Quiver {
        self.quiver.mutate_all(&self.row(0))
    }
}

/// Outcome of the two period-one conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodOneReport {
    pub row_independent: bool,
    pub shift_matches: bool,
}

impl PeriodOneReport {
    pub fn ok(&self) -> bool {
        self.row_independent && self.shift_matches
    }
}

pub fn verify_period_one(fq: &FiniteQuiver) -> PeriodOneReport {
    let row_independent = fq.quiver.independent(&fq.row(0));
    PeriodOneReport { row_independent, shift_matches: row_independent && fq.advance() == fq.quiver.pullback(&fq.shift_perm()) }
}

/// Values recorded along a periodic Y-seed run, keyed by logical label `(i mod n, row)`.
#[derive(Clone, Debug, Default)]
pub struct YTrace {
    /// `y_u = y_u^{(l)}`, read just before `u` is mutated.
    pub y: BTreeMap<Lat, Q>,
    /// `y_u^{(k)}` for every recorded `(u, k)`.
    pub stages: BTreeMap<(Lat, i64), Q>,
}

/// Applies `mu_{*,0}` and the relabeling `steps` times, starting from the staircase seed
/// `y_{(i,j)}^{(l-j)}` stored at vertex `(i, j)`.
pub fn run_periodic_y(fq: &FiniteQuiver, init: &[Q], steps: usize) -> Result<YTrace> {
    let report = verify_period_one(fq);
    if !report.ok() {
        return precondition("quotient quiver is not period one");
    }
    let mut y = YSeed::new(fq.quiver.clone(), init.to_vec())?.y;
    let perm = fq.shift_perm();
    let mut trace = YTrace::default();
    for t in 0..steps as i64 {
        for (idx, v) in y.iter().enumerate() {
            let p = fq.vertex(idx);
            let u = lat(p.i, p.j + t);
            trace.stages.insert((u, fq.l - p.j), v.clone());
            if p.j == 0 {
                trace.y.insert(u, v.clone());
            }
        }
        let mut q = fq.quiver.clone();
        for k in fq.row(0) {
            y = mutate_y(&q, &y, k).map_err(|e| crate::Error::Degenerate(format!("step {t}, vertex {k}: {e}")))?;
            q = q.mutate(k);
        }
        let mut next = y.clone();
        for (u, &pu) in perm.iter().enumerate() {
            next[pu] = y[u].clone();
        }
        y = next;
    }
    Ok(trace)
}

/// Applies the same schedule to cluster variables; returns `x_u` keyed like [`YTrace::y`].
pub fn run_periodic_x(fq: &FiniteQuiver, init: &[Q], steps: usize) -> Result<BTreeMap<Lat, Q>> {
    if !verify_period_one(fq).ok() {
        return precondition("quotient quiver is not period one");
    }
    let perm = fq.shift_perm();
    let mut x = init.to_vec();
    let mut out = BTreeMap::new();
    for t in 0..steps as i64 {
        for (idx, v) in x.iter().enumerate() {
            let p = fq.vertex(idx);
            out.insert(lat(p.i, p.j + t), v.clone());
        }
        let mut q = fq.quiver.clone();
        for k in fq.row(0) {
            x = mutate_x(&q, &x, k)?;
            q = q.mutate(k);
        }
        let mut next = x.clone();
        for (u, &pu) in perm.iter().enumerate() {
            next[pu] = x[u].clone();
        }
        x = next;
    }
    Ok(out)
}

fn wrap(p: Lat, n: usize) -> Lat {
    lat(p.i.rem_euclid(n as i64), p.j)
}

/// Residual count of `y_{u+(i0,l)} y_u = prod_{m_v<0} (1 + y_{u+g-v}) / prod_{m_v>0} (1 + y_{u+g-v}^{-1})`.
pub fn check_exchange_y(t: &QSTemplate, n: usize, y: &BTreeMap<Lat, Q>) -> (usize, Vec<Lat>) {
    let g = lat(t.i0, t.l);
    let (mut checked, mut failures) = (0, vec![]);
    for &u in y.keys() {
        let get = |p: Lat| y.get(&wrap(p, n));
        let Some(top) = get(u + g) else { continue };
        let mut rhs = Q::one();
        let mut complete = true;
        for (&v, &k) in &t.m {
            let Some(x) = get(u + g - v) else {
                complete = false;
                break;
            };
            if k < 0 {
                rhs *= pow(&(Q::one() + x), -k);
            } else {
                rhs /= pow(&(Q::one() + x.recip()), k);
            }
        }
        if complete {
            checked += 1;
            if top * &y[&u] != rhs {
                failures.push(u);
            }
        }
    }
    (checked, failures)
}

/// Residual count of `x_{u+(i0,l)} x_u = prod_{m_v>0} x_{u+v}^{m_v} + prod_{m_v<0} x_{u+v}^{-m_v}`.
pub fn check_exchange_x(t: &QSTemplate, n: usize, x: &BTreeMap<Lat, Q>) -> (usize, Vec<Lat>) {
    let g = lat(t.i0, t.l);
    let (mut checked, mut failures) = (0, vec![]);
    for &u in x.keys() {
        let get = |p: Lat| x.get(&wrap(p, n));
        let Some(top) = get(u + g) else { continue };
        let vals: Option<Vec<(Q, i64)>> = t.m.iter().map(|(&v, &k)| get(u + v).map(|q| (q.clone(), k))).collect();
        let Some(vals) = vals else { continue };
        let out_p: Q = vals.iter().filter(|(_, k)| *k > 0).map(|(q, k)| pow(q, *k)).product();
        let in_p: Q = vals.iter().filter(|(_, k)| *k < 0).map(|(q, k)| pow(q, -k)).product();
        checked += 1;
        if top * &x[&u] != out_p + in_p {
            failures.push(u);
        }
    }
    (checked, failures)
}

/// The staircase Y-seed matching a grid of geometric y-variables: vertex `(i, j)` receives
/// `y_{(i,j)}^{(l-j)} = y_{u-(i0,l)}^{-1} * prod_{v2 > j} factor_v` with `u = (i, j)`.
pub fn geometric_seed(t: &QSTemplate, fq: &FiniteQuiver, grid: &YGrid) -> Result<Vec<Q>> {
    let g = lat(t.i0, t.l);
    let val = |p: Lat| -> Result<Q> {
        match grid.get(wrap(p, fq.n)).and_then(|e| e.finite()) {
            Some(x) if !x.is_zero() && *x != -Q::one() => Ok(x.clone()),
            Some(_) => degenerate(format!("geometric y at {p} is 0 or -1")),
            None => precondition(format!("geometric y at {p} is missing or infinite")),
        }
    };
    (0..fq.quiver.len())
        .map(|idx| {
            let u = fq.vertex(idx);
            let mut y = val(u - g)?.recip();
            for (&v, &k) in t.m.iter().filter(|(v, _)| v.j > u.j) {
                let x = val(u - v)?;
                if k < 0 {
                    y *= pow(&(Q::one() + x), -k);
                } else {
                    y /= pow(&(Q::one() + x.recip()), k);
                }
            }
            Ok(y)
        })
        .collect()
}

/// For each stage `k = 1..l`, the factor subsets whose product route reproduces `y^{(k)}_u`
/// at every recorded instance (a subset of size one unless two factors coincide).
pub fn factor_schedule(t: &QSTemplate, n: usize, trace: &YTrace) -> BTreeMap<i64, Vec<FactorSet>> {
    let s = t.pin;
    let grid = YGrid {
        values: trace.y.iter().map(|(&u, v)| (u, crate::ExtRational::Finite(v.clone()))).collect(),
    };
    let mut out = BTreeMap::new();
    for k in 1..=t.l {
        let mut candidates: Vec<FactorSet> = FactorSet::all_subsets().collect();
        let mut seen = 0;
        for (&(u, kk), val) in &trace.stages {
            if kk != k {
                continue;
            }
            let r = u - s.c - s.d;
            let vals: Vec<Option<Q>> = candidates.iter().map(|&set| product_wrapped(&grid, &s, r, set, n)).collect();
            if vals.iter().any(Option::is_none) {
                continue;
            }
            seen += 1;
            candidates = candidates.into_iter().zip(vals).filter(|(_, v)| v.as_ref() == Some(val)).map(|(c, _)| c).collect();
        }
        if seen > 0 {
            out.insert(k, candidates);
        }
    }
    out
}

fn product_wrapped(grid: &YGrid, s: &YPin, r: Lat, set: FactorSet, n: usize) -> Option<Q> {
    let offs = [s.a + s.b, s.a + s.c, s.b + s.d, s.a + s.d, s.b + s.c];
    let local = YGrid {
        values: offs.iter().filter_map(|&o| grid.get(wrap(r + o, n)).map(|v| (r + o, v.clone()))).collect(),
    };
    general_y_product(&local, s, r, set)
}

/// The subset predicted for stage `k` from the template: factors of offsets `v` with `v2 > l - k`.
pub fn predicted_subset(t: &QSTemplate, k: i64) -> FactorSet {
    let mut set = FactorSet::EMPTY;
    for &v in t.m.keys().filter(|v| v.j > t.l - k) {
        for f in FactorSet::factor_of_offset(&t.pin, v) {
            set = set.with(f);
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use num::Signed;
    use super::*;
    use crate::arith::{q, qi};
    use crate::mesh::{PeriodicMesh, Sampler};
    use crate::pin::{zoo_pin, ZOO};

    #[test]
    fn six_vertex_mutation_fixture() {
        let q0 = six_vertex_quiver();
        let q1 = q0.mutate(1);
        let mut expect = vec![(1, 5), (3, 5), (2, 1), (2, 3), (4, 1), (5, 2), (6, 3), (5, 4), (5, 6)];
        expect.iter_mut().for_each(|(u, v)| {
            *u -= 1;
            *v -= 1
        });
        let mut got: Vec<(usize, usize)> = q1.arrows().iter().map(|&(u, v, k)| {
            assert_eq!(k, 1);
            (u, v)
        }).collect();
        got.sort();
        expect.sort();
        assert_eq!(got, expect);
        let y = mutate_y(&q0, &vec![qi(1); 6], 1).unwrap();
        assert_eq!(y, vec![qi(2), qi(1), qi(2), qi(1), q(1, 2), qi(1)]);
        let x = mutate_x(&q0, &[qi(2), qi(3), qi(5), qi(7), qi(11), qi(13)], 1).unwrap();
        assert_eq!(x[1], q(2 * 5 + 11, 3));
        assert_eq!(q1.mutate(1), q0);
    }

    #[test]
    fn short_diagonal_arrow_classes() {
        let s = YPin::from_pairs([(-1, 0), (1, 0), (0, 1), (0, 2)]).unwrap();
        let t = QSTemplate::build(&s).unwrap();
        assert_eq!((t.l, t.i0), (3, 0));
        let star = t.star_of_origin();
        let expect = BTreeMap::from([(lat(1, 1), 1), (lat(-1, 2), 1), (lat(-1, 1), -1), (lat(1, 2), -1)]);
        assert_eq!(star, expect);
        let drawn = [((0, 0), (1, 1)), ((0, 1), (1, 2)), ((0, 1), (1, 0)), ((0, 2), (1, 1)), ((1, 0), (0, 2)), ((1, 2), (0, 0)), ((2, 1), (0, 1))];
        for j in 0..3 {
            for i in -3..=3 {
                for j2 in 0..3 {
                    for i2 in -3..=3 {
                        let (u, w) = (lat(i, j), lat(i2, j2));
                        let count = |x: Lat, y: Lat| {
                            drawn.iter().filter(|&&((a, b), (c, d))| (x - lat(a, b)).j == 0 && y - x == lat(c - a, d - b)).count() as i64
                        };
                        let want = count(u, w) - count(w, u);
                        assert_eq!(t.arrows_between(u, w), want, "{u} -> {w}");
                    }
                }
            }
        }
        assert!(verify_period_one(&t.materialize(8).unwrap()).ok());
    }

    #[test]
    fn zoo_quotients_are_period_one() {
        for e in ZOO {
            let t = QSTemplate::build(&e.pin()).unwrap();
            for n in 4..=8 {
                let fq = t.materialize(n).unwrap();
                assert!(verify_period_one(&fq).ok(), "{} n={n}", e.name);
            }
        }
    }

    #[test]
    fn flipped_arrow_breaks_period_one() {
        let t = QSTemplate::build(&zoo_pin("short diagonal").unwrap()).unwrap();
        let mut fq = t.materialize(6).unwrap();
        let (u, v, _) = fq.quiver.arrows()[0];
        fq.quiver.add_arrows(v, u, 2).unwrap();
        assert!(!verify_period_one(&fq).ok());
    }

    #[test]
    fn fordy_marsh_sequences() {
        let qv = Quiver::from_arrows(2, &[(0, 1, 1)]).unwrap();
        assert!(is_period_one_1d(&qv));
        let run = fordy_marsh_run(&qv, &[qi(2), qi(3)], &[q(2, 3), q(5, 7)], 20).unwrap();
        assert_eq!(run.x, fordy_marsh_x_recurrence(&qv, &[qi(2), qi(3)], 22).unwrap());
        assert_eq!(run.x[5], run.x[0]);
        assert_eq!(run.y, fordy_marsh_y_recurrence(&qv, &run.y[..2], 20).unwrap());
        let somos = Quiver::from_matrix(vec![vec![0, 1, -2, 1], vec![-1, 0, 3, -2], vec![2, -3, 0, 1], vec![-1, 2, -1, 0]]).unwrap();
        assert!(is_period_one_1d(&somos));
        let ones = vec![qi(1); 4];
        let run = fordy_marsh_run(&somos, &ones, &[q(1, 2), qi(2), q(3, 5), qi(3)], 12).unwrap();
        let somos4: Vec<i64> = vec![1, 1, 1, 1, 2, 3, 7, 23, 59, 314, 1529, 8209, 83313, 620297, 7869898, 126742987];
        assert_eq!(run.x, somos4.iter().map(|&v| qi(v)).collect::<Vec<_>>());
        assert_eq!(run.y, fordy_marsh_y_recurrence(&somos, &run.y[..4], 12).unwrap());
        let bad = Quiver::from_arrows(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert!(!is_period_one_1d(&bad));
    }

    #[test]
    fn pentagram_trace_matches_geometry() {
        let s = zoo_pin("pentagram").unwrap();
        let t = QSTemplate::build(&s).unwrap();
        let n = 6;
        let fq = t.materialize(n).unwrap();
        let mut mesh = PeriodicMesh::random(&s, n, 3).unwrap();
        for _ in 0..4 {
            mesh.step_backward().unwrap();
        }
        for _ in 0..8 {
            mesh.step_forward().unwrap();
        }
        let grid = YGrid::from_mesh(&mesh).unwrap();
        let seed = geometric_seed(&t, &fq, &grid).unwrap();
        let trace = run_periodic_y(&fq, &seed, 6).unwrap();
        let mut compared = 0;
        for (u, v) in &trace.y {
            if let Some(g) = grid.get(*u) {
                assert_eq!(g.finite(), Some(v), "{u}");
                compared += 1;
            }
        }
        assert!(compared >= 30);
        let (checked, fails) = check_exchange_y(&t, n, &trace.y);
        assert!(checked > 0 && fails.is_empty());
        let sched = factor_schedule(&t, n, &trace);
        for (k, sets) in sched {
            assert!(sets.contains(&predicted_subset(&t, k)), "stage {k}: {sets:?}");
        }
    }

    #[test]
    fn random_runs_satisfy_exchange() {
        let mut rng = Sampler::new(11, 0);
        for e in ZOO {
            let t = QSTemplate::build(&e.pin()).unwrap();
            let fq = t.materialize(6).unwrap();
            let init: Vec<Q> = (0..fq.quiver.len()).map(|_| rng.nonzero().abs()).collect();
            let steps = (2 * t.l as usize).max(4);
            let trace = run_periodic_y(&fq, &init, steps).unwrap();
            let (checked, fails) = check_exchange_y(&t, 6, &trace.y);
            assert!(checked > 0 && fails.is_empty(), "{}", e.name);
            let xs = run_periodic_x(&fq, &init, steps).unwrap();
            let (checked, fails) = check_exchange_x(&t, 6, &xs);
            assert!(checked > 0 && fails.is_empty(), "{}", e.name);
            for (k, sets) in factor_schedule(&t, 6, &trace) {
                assert!(sets.contains(&predicted_subset(&t, k)), "{} stage {k}: {sets:?}", e.name);
            }
        }
    }
}
