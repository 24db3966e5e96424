//! Mesh windows: generation of generic initial data and propagation by the S-map.

use crate::arith::{Q, qi};
use crate::error::{degenerate, invalid, precondition, Error, Result};
use crate::filtration::{topo_order, Filtration};
use crate::linalg::rank_int;
use crate::pin::{lat, Lat, YPin};
use crate::projective::{meet_lines, multi_ratio, rank_of, Flat, ProjPoint};
use crate::ExtRational;
use num::{BigInt, Integer, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet};

/// Anything that stores mesh points by lattice index.
pub trait PointSource {
    fn pin(&self) -> &YPin;
    fn dim(&self) -> usize;
    fn point(&self, p: Lat) -> Option<&ProjPoint>;
    /// Candidate base indices `r` worth scanning for relation instances.
    fn index_box(&self) -> Vec<Lat>;
}

/// One row of a window: consecutive points starting at `i_lo`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub i_lo: i64,
    pub points: Vec<ProjPoint>,
}

impl Row {
    pub fn i_hi(&self) -> i64 {
        self.i_lo + self.points.len() as i64 - 1
    }

    pub fn get(&self, i: i64) -> Option<&ProjPoint> {
        if i < self.i_lo {
            return None;
        }
        self.points.get((i - self.i_lo) as usize)
    }
}

/// A finite piece of a Y-mesh: rows `j` holding points `P_{i,j}` for `i` in a contiguous range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeshWindow {
    pub pin: YPin,
    pub dim: usize,
    pub seed: u64,
    pub rows: BTreeMap<i64, Row>,
}

impl PointSource for MeshWindow {
    fn pin(&self) -> &YPin {
        &self.pin
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn point(&self, p: Lat) -> Option<&ProjPoint> {
        self.get(p)
    }

    fn index_box(&self) -> Vec<Lat> {
        let Some((j0, j1)) = self.j_range() else { return vec![] };
        let i0 = self.rows.values().map(|r| r.i_lo).min().unwrap();
        let i1 = self.rows.values().map(|r| r.i_hi()).max().unwrap();
        let s = self.pin.points();
        let (si0, si1) = (s.iter().map(|p| p.i).min().unwrap(), s.iter().map(|p| p.i).max().unwrap());
        let (sj0, sj1) = (s.iter().map(|p| p.j).min().unwrap(), s.iter().map(|p| p.j).max().unwrap());
        let mut out = vec![];
        for j in (j0 - 2 * sj1)..=(j1 - 2 * sj0) {
            for i in (i0 - 2 * si1)..=(i1 - 2 * si0) {
                out.push(lat(i, j));
            }
        }
        out
    }
}

impl MeshWindow {
    pub fn new(pin: YPin, dim: usize, seed: u64) -> Self {
        MeshWindow { pin, dim, seed, rows: BTreeMap::new() }
    }

    pub fn get(&self, p: Lat) -> Option<&ProjPoint> {
        self.rows.get(&p.j)?.get(p.i)
    }

    pub fn j_range(&self) -> Option<(i64, i64)> {
        Some((*self.rows.keys().next()?, *self.rows.keys().next_back()?))
    }

    pub fn row_range(&self, j: i64) -> Option<(i64, i64)> {
        self.rows.get(&j).map(|r| (r.i_lo, r.i_hi()))
    }

    pub fn insert_row(&mut self, j: i64, i_lo: i64, points: Vec<ProjPoint>) -> Result<()> {
        if let Some(p) = points.iter().find(|p| p.dim() != self.dim) {
            return invalid(format!("point {p} does not live in dimension {}", self.dim));
        }
        self.rows.insert(j, Row { i_lo, points });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.values().map(|r| r.points.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Lat, &ProjPoint)> {
        self.rows
            .iter()
            .flat_map(|(&j, row)| row.points.iter().enumerate().map(move |(k, p)| (lat(row.i_lo + k as i64, j), p)))
    }

    /// Rank of the matrix of all point coordinates.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<BigInt>> = self.iter().map(|(_, p)| p.coords().to_vec()).collect();
        rank_int(&rows)
    }

    /// The sub-window on rows `j0..=j1` and columns `i0..=i1`.
    pub fn restrict(&self, j0: i64, j1: i64, i0: i64, i1: i64) -> MeshWindow {
        let mut w = MeshWindow::new(self.pin, self.dim, self.seed);
        for (&j, row) in self.rows.range(j0..=j1) {
            let lo = row.i_lo.max(i0);
            let hi = row.i_hi().min(i1);
            if lo <= hi {
                let pts = (lo..=hi).map(|i| row.get(i).unwrap().clone()).collect();
                w.rows.insert(j, Row { i_lo: lo, points: pts });
            }
        }
        w
    }

    /// Agreement on every index stored in both windows, and the number of shared indices.
    pub fn agree_on_common(&self, other: &MeshWindow) -> (bool, usize) {
        let mut n = 0;
        for (p, x) in self.iter() {
            if let Some(y) = other.get(p) {
                if x != y {
                    return (false, n);
                }
                n += 1;
            }
        }
        (true, n)
    }

    /// Steps `n` rows forward, keeps only the newest block of initial rows, steps back `n` rows and
    /// compares with the original; returns whether all shared points agree and how many were rebuilt.
    pub fn inverse_round_trip(&self, n: i64) -> Result<(bool, usize)> {
        let rows = if self.dim == 1 { self.pin.l() } else { self.pin.m() };
        let mut fwd = self.clone();
        fwd.step(n)?;
        let (_, top) = fwd.j_range().unwrap();
        let keep = top - rows + 1;
        let mut back = fwd.restrict(keep, top, i64::MIN, i64::MAX);
        back.step(-n)?;
        Ok(self.agree_on_common(&back.restrict(i64::MIN, keep - 1, i64::MIN, i64::MAX)))
    }

    /// Range of `i` on which `P_{r + target}` can be built in row `j`, given source offsets.
    fn new_row_range(&self, j: i64, target: Lat, sources: &[Lat]) -> Option<(i64, i64)> {
        let r2 = j - target.j;
        let mut lo = i64::MIN;
        let mut hi = i64::MAX;
        for s in sources {
            let (a, b) = self.row_range(r2 + s.j)?;
            lo = lo.max(a - s.i + target.i);
            hi = hi.min(b - s.i + target.i);
        }
        (lo <= hi).then_some((lo, hi))
    }

    fn build_row(
        &mut self,
        j: i64,
        target: Lat,
        sources: &[Lat],
        rule: impl Fn(&[&ProjPoint]) -> Result<ProjPoint>,
    ) -> Result<()> {
        let Some((lo, hi)) = self.new_row_range(j, target, sources) else {
            return precondition(format!("rows needed to build row {j} are missing or too short"));
        };
        let mut pts = Vec::with_capacity((hi - lo + 1) as usize);
        for i in lo..=hi {
            let r = lat(i, j) - target;
            let src: Vec<&ProjPoint> = sources.iter().map(|&s| self.get(r + s).unwrap()).collect();
            let p = rule(&src)?;
            if src.contains(&&p) {
                return degenerate(format!("new point at {} coincides with a source point", lat(i, j)));
            }
            pts.push(p);
        }
        self.rows.insert(j, Row { i_lo: lo, points: pts });
        Ok(())
    }

    /// Appends the next row: the S-map in dimension at least two, the multi-ratio rule in dimension one.
    pub fn step_forward(&mut self) -> Result<()> {
        let (_, top) = self.j_range().ok_or_else(|| Error::Precondition("empty window".into()))?;
        let s = self.pin;
        if self.dim == 1 {
            let src = [s.a + s.d, s.a + s.c, s.a + s.b, s.b + s.c, s.b + s.d];
            return self.build_row(top + 1, s.c + s.d, &src, solve_triple_forward);
        }
        let src = [s.a + s.c, s.b + s.c, s.a + s.d, s.b + s.d];
        self.build_row(top + 1, s.c + s.d, &src, |v| meet_lines(v[0], v[1], v[2], v[3]))
    }

    /// Prepends the previous row using the inverse map.
    pub fn step_backward(&mut self) -> Result<()> {
        let (bottom, _) = self.j_range().ok_or_else(|| Error::Precondition("empty window".into()))?;
        let s = self.pin;
        if self.dim == 1 {
            let src = [s.a + s.d, s.a + s.c, s.b + s.c, s.b + s.d, s.c + s.d];
            return self.build_row(bottom - 1, s.a + s.b, &src, solve_triple_backward);
        }
        let src = [s.a + s.c, s.a + s.d, s.b + s.c, s.b + s.d];
        self.build_row(bottom - 1, s.a + s.b, &src, |v| meet_lines(v[0], v[1], v[2], v[3]))
    }

    /// Signed steps: positive runs forward, negative backward.
    pub fn step(&mut self, n: i64) -> Result<()> {
        for _ in 0..n.unsigned_abs() {
            if n > 0 {
                self.step_forward()?;
            } else {
                self.step_backward()?;
            }
        }
        Ok(())
    }

    /// Reduced-order planar step using only the last `max(c2 - a2, d2 - b2)` rows.
    ///
    /// When `c2 = d2` the point `P_{r+2c}` sits in the new row itself; the order is then already `m`
    /// and the ordinary map is used.
    pub fn step_forward_reduced(&mut self) -> Result<()> {
        if self.dim != 2 {
            return precondition("the reduced map is planar");
        }
        let (_, top) = self.j_range().ok_or_else(|| Error::Precondition("empty window".into()))?;
        let s = self.pin;
        if s.c.j == s.d.j {
            return self.step_forward();
        }
        let src = [s.c + s.c, s.b + s.c, s.a + s.d, s.b + s.d];
        self.build_row(top + 1, s.c + s.d, &src, |v| meet_lines(v[0], v[1], v[2], v[3]))
    }

    pub fn step_backward_reduced(&mut self) -> Result<()> {
        if self.dim != 2 {
            return precondition("the reduced map is planar");
        }
        let (bottom, _) = self.j_range().ok_or_else(|| Error::Precondition("empty window".into()))?;
        let s = self.pin;
        if s.a.j == s.b.j {
            return self.step_backward();
        }
        let src = [s.a + s.c, s.a + s.d, s.b + s.c, s.b + s.b];
        self.build_row(bottom - 1, s.a + s.b, &src, |v| meet_lines(v[0], v[1], v[2], v[3]))
    }
}

fn det(u: &ProjPoint, w: &ProjPoint) -> BigInt {
    let (u, w) = (u.coords(), w.coords());
    &u[0] * &w[1] - &u[1] * &w[0]
}

fn combine2(k1: &BigInt, v1: &ProjPoint, k2: &BigInt, v2: &ProjPoint) -> Result<ProjPoint> {
    ProjPoint::combine(&[(k1, v1), (k2, v2)])
}

/// Sixth point of a one-dimensional triple relation, given `P_{r+a+d}, P_{r+a+c}, P_{r+a+b},
/// P_{r+b+c}, P_{r+b+d}`.
pub fn solve_triple_forward(v: &[&ProjPoint]) -> Result<ProjPoint> {
    let k1 = det(v[0], v[1]) * det(v[2], v[3]);
    let k2 = det(v[1], v[2]) * det(v[3], v[4]);
    combine2(&k2, v[0], &-k1, v[4])
}

/// Missing point `P_{r+a+b}` of a one-dimensional triple relation, given `P_{r+a+d}, P_{r+a+c},
/// P_{r+b+c}, P_{r+b+d}, P_{r+c+d}`.
pub fn solve_triple_backward(v: &[&ProjPoint]) -> Result<ProjPoint> {
    let (v1, v2, v4, v5, v6) = (v[0], v[1], v[2], v[3], v[4]);
    let k1 = det(v1, v2) * det(v5, v6);
    let k2 = det(v4, v5) * det(v6, v1);
    combine2(&k1, v4, &-k2, v2)
}

/// Seeded source of small random rationals.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    /// `n / d` with `n` in `[-20, 20]` and `d` in `[1, 10]`.
    pub fn rational(&mut self) -> Q {
        Q::new(self.rng.gen_range(-20..=20).into(), self.rng.gen_range(1..=10).into())
    }

    pub fn nonzero(&mut self) -> Q {
        loop {
            let x = self.rational();
            if !x.is_zero() {
                return x;
            }
        }
    }

    pub fn point(&mut self, dim: usize) -> Option<ProjPoint> {
        let v: Vec<Q> = (0..=dim).map(|_| self.rational()).collect();
        ProjPoint::from_rationals(&v).ok()
    }

    /// A random combination with nonzero coefficients.
    pub fn combination(&mut self, pts: &[&ProjPoint]) -> Option<ProjPoint> {
        let cs: Vec<Q> = pts.iter().map(|_| self.nonzero()).collect();
        let l = cs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = cs.iter().map(|c| c.numer() * (&l / c.denom())).collect();
        let terms: Vec<(&BigInt, &ProjPoint)> = ints.iter().zip(pts.iter().copied()).collect();
        ProjPoint::combine(&terms).ok()
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.rng.gen_range(0..n)
    }
}

const REDRAWS: usize = 32;
const ATTEMPTS: u64 = 8;

fn draw(used: &mut HashSet<ProjPoint>, mut f: impl FnMut() -> Option<ProjPoint>) -> Result<ProjPoint> {
    for _ in 0..REDRAWS {
        if let Some(p) = f() {
            if used.insert(p.clone()) {
                return Ok(p);
            }
        }
    }
    degenerate("random draws keep producing repeated points")
}

/// Generic initial data in dimension `2 <= dim <= D(S)`: rows `a2 + 1 ..= d2` on columns `0..width`.
pub fn generate_window(pin: &YPin, dim: usize, width: usize, seed: u64) -> Result<MeshWindow> {
    if dim < 2 {
        return precondition("filtration data needs dimension at least two; use generate_1d");
    }
    if dim as i64 > pin.d() {
        return precondition(format!("dimension {dim} exceeds D(S) = {}", pin.d()));
    }
    generate_arrangement(pin, dim, width, seed)
}

/// The filtration procedure without the dimension precondition.
pub fn generate_arrangement(pin: &YPin, dim: usize, width: usize, seed: u64) -> Result<MeshWindow> {
    if width == 0 || dim == 0 {
        return invalid("window width and dimension must be positive");
    }
    let filt = Filtration::build(pin)?;
    let mut last = None;
    for attempt in 0..ATTEMPTS {
        match build_arrangement(pin, &filt, dim, width, seed, attempt) {
            Ok(w) => {
                if check_relations(&w).violations.is_empty() {
                    return Ok(w);
                }
                last = Some("relation check failed".to_string());
            }
            Err(e) => last = Some(e.to_string()),
        }
    }
    degenerate(format!("no generic window after {ATTEMPTS} attempts: {}", last.unwrap_or_default()))
}

fn build_arrangement(
    pin: &YPin,
    filt: &Filtration,
    dim: usize,
    width: usize,
    seed: u64,
    attempt: u64,
) -> Result<MeshWindow> {
    let m = filt.m();
    let window: Vec<Lat> = (1..=m).flat_map(|j| (0..width as i64).map(move |i| lat(i, j))).collect();
    let tmin = window.iter().map(|&r| filt.lifetime(r).0).min().unwrap();
    let tmax = window.iter().map(|&r| filt.lifetime(r).1).max().unwrap();
    let t0 = if filt.backward { (tmin + tmax).div_euclid(2) } else { tmin };
    let mut rng = Sampler::new(seed, attempt);
    let mut pts: HashMap<Lat, ProjPoint> = HashMap::new();
    let mut used = HashSet::new();
    for r in filt.h(t0) {
        let p = draw(&mut used, || rng.point(dim))?;
        pts.insert(r, p);
    }
    let mut sweep = |new: Vec<Lat>, forward: bool, pts: &mut HashMap<Lat, ProjPoint>| -> Result<()> {
        let set: HashSet<Lat> = new.iter().copied().collect();
        let circuit = |r: Lat| if forward { filt.g_inv(r) } else { filt.f_inv(r) };
        let mut deps = HashMap::new();
        for &r in &new {
            let c = circuit(r).ok_or_else(|| Error::CheckFailed(format!("no circuit for {r}")))?;
            let others: Vec<Lat> = filt.members(&c).into_iter().filter(|&x| x != r).collect();
            deps.insert(r, others.iter().copied().filter(|x| set.contains(x)).collect::<Vec<_>>());
        }
        let order = topo_order(&deps).ok_or_else(|| Error::CheckFailed("cyclic construction order".into()))?;
        for r in order {
            let c = circuit(r).unwrap();
            let others: Vec<Lat> = filt.members(&c).into_iter().filter(|&x| x != r).collect();
            let src: Vec<&ProjPoint> = others
                .iter()
                .map(|x| pts.get(x).ok_or_else(|| Error::CheckFailed(format!("{x} not yet built"))))
                .collect::<Result<_>>()?;
            let p = draw(&mut used, || rng.combination(&src))?;
            pts.insert(r, p);
        }
        Ok(())
    };
    for t in t0..tmax {
        let (ht, ht1) = (filt.h(t), filt.h(t + 1));
        sweep(ht1.difference(&ht).copied().collect(), true, &mut pts)?;
    }
    if filt.backward {
        for t in (tmin..t0).rev() {
            let (ht, ht1) = (filt.h(t), filt.h(t + 1));
            sweep(ht.difference(&ht1).copied().collect(), false, &mut pts)?;
        }
    }
    let mut w = MeshWindow::new(*pin, dim, seed);
    for j in 1..=m {
        let row: Vec<ProjPoint> = (0..width as i64)
            .map(|i| pts.remove(&lat(i, j)).ok_or_else(|| Error::CheckFailed(format!("{} never built", lat(i, j)))))
            .collect::<Result<_>>()?;
        w.rows.insert(j + pin.a.j, Row { i_lo: 0, points: row });
    }
    Ok(w)
}

/// Random one-dimensional initial data: `l` rows of affine points on `0..width`.
pub fn generate_1d(pin: &YPin, width: usize, seed: u64) -> Result<MeshWindow> {
    if width == 0 {
        return invalid("window width must be positive");
    }
    let mut rng = Sampler::new(seed, 0);
    let mut used = HashSet::new();
    let mut w = MeshWindow::new(*pin, 1, seed);
    for j in 1..=pin.l() {
        let row = (0..width)
            .map(|_| draw(&mut used, || Some(ProjPoint::affine(&[rng.rational() + qi(rng.below(1000) as i64)]))))
            .collect::<Result<_>>()?;
        w.rows.insert(j, Row { i_lo: 0, points: row });
    }
    Ok(w)
}

/// Initial data of any admissible dimension.
pub fn generate(pin: &YPin, dim: usize, width: usize, seed: u64) -> Result<MeshWindow> {
    if dim == 1 {
        generate_1d(pin, width, seed)
    } else {
        generate_window(pin, dim, width, seed)
    }
}

/// Seed used by retry `k` of a run started from `seed`; retry 0 keeps the seed itself.
pub fn retry_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_add(k.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Generates initial data and steps it `steps` rows forward, redrawing with a derived seed whenever
/// propagation meets a degenerate configuration. Returns the initial and propagated windows.
pub fn generate_stepped(pin: &YPin, dim: usize, width: usize, seed: u64, steps: i64) -> Result<(MeshWindow, MeshWindow)> {
    let mut last = String::new();
    for k in 0..ATTEMPTS {
        let base = generate(pin, dim, width, retry_seed(seed, k))?;
        let mut w = base.clone();
        match w.step(steps) {
            Ok(()) => return Ok((base, w)),
            Err(Error::Degenerate(m)) => last = m,
            Err(e) => return Err(e),
        }
    }
    degenerate(format!("propagation stayed degenerate after {ATTEMPTS} redraws: {last}"))
}

/// Planar data for the reduced-order map: `max(c2 - a2, d2 - b2)` rows satisfying the line relations
/// that fit inside them, starting on columns `0..width`.
pub fn generate_reduced(pin: &YPin, width: usize, seed: u64) -> Result<MeshWindow> {
    if pin.d() < 2 {
        return precondition("planar meshes need D(S) >= 2");
    }
    let s = pin.row_normalized();
    let mut w = if s.d.j - s.b.j < s.c.j - s.a.j {
        let rev = generate_reduced(&s.time_reverse(), width, seed)?;
        let mut w = MeshWindow::new(s, 2, seed);
        w.rows = rev.rows.into_iter().map(|(j, r)| (-j, r)).collect();
        w
    } else {
        native_reduced(&s, width, seed)?
    };
    let shift = pin.a.j + 1 - w.j_range().unwrap().0;
    w.rows = std::mem::take(&mut w.rows).into_iter().map(|(j, r)| (j + shift, r)).collect();
    w.pin = *pin;
    Ok(w)
}

fn native_reduced(s: &YPin, width: usize, seed: u64) -> Result<MeshWindow> {
    let rows = s.d.j - s.b.j;
    let mut last = String::new();
    for attempt in 0..ATTEMPTS {
        let mut rng = Sampler::new(seed, attempt);
        let mut used = HashSet::new();
        let mut w = MeshWindow::new(*s, 2, seed);
        let mut built = || -> Result<()> {
            for j in 1..=rows {
                if j <= s.c.j {
                    let pts = (0..width).map(|_| draw(&mut used, || rng.point(2))).collect::<Result<_>>()?;
                    w.rows.insert(j, Row { i_lo: 0, points: pts });
                    continue;
                }
                let src = [s.a, s.b];
                let Some((lo, hi)) = w.new_row_range(j, s.c, &src) else {
                    return precondition("window too narrow for the line relations");
                };
                let mut pts = vec![];
                for i in lo..=hi {
                    let r = lat(i, j) - s.c;
                    let (p, q) = (w.get(r + s.a).unwrap().clone(), w.get(r + s.b).unwrap().clone());
                    pts.push(draw(&mut used, || rng.combination(&[&p, &q]))?);
                }
                w.rows.insert(j, Row { i_lo: lo, points: pts });
            }
            Ok(())
        };
        match built() {
            Ok(()) if check_relations(&w).is_clean() => return Ok(w),
            Ok(()) => last = "relation check failed".into(),
            Err(e @ Error::Precondition(_)) => return Err(e),
            Err(e) => last = e.to_string(),
        }
    }
    degenerate(format!("no generic reduced window: {last}"))
}

/// A violated relation and the base index `r` where it occurs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub relation: &'static str,
    pub r: Lat,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RelationReport {
    /// Number of checked instances per relation name.
    pub checked: BTreeMap<&'static str, usize>,
    pub violations: Vec<Violation>,
}

impl RelationReport {
    fn record(&mut self, relation: &'static str, r: Lat, ok: bool) {
        *self.checked.entry(relation).or_default() += 1;
        if !ok {
            self.violations.push(Violation { relation, r });
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn all_distinct(pts: &[&ProjPoint]) -> bool {
    (0..pts.len()).all(|x| (x + 1..pts.len()).all(|y| pts[x] != pts[y]))
}

/// Exhaustive check of every relation instance lying inside the stored points.
pub fn check_relations<M: PointSource>(w: &M) -> RelationReport {
    let mut rep = RelationReport::default();
    let s = *w.pin();
    let dim = w.dim();
    let fetch = |offs: &[Lat], r: Lat| -> Option<Vec<&ProjPoint>> { offs.iter().map(|&o| w.point(r + o)).collect() };
    let mut lines: HashMap<Lat, Option<Flat>> = HashMap::new();
    for r in w.index_box() {
        if dim >= 2 {
            if let Some(p) = fetch(&[s.a, s.b, s.c], r) {
                rep.record("L1", r, all_distinct(&p) && rank_of(&p) == 2);
            }
            if let Some(p) = fetch(&[s.b, s.c, s.d], r) {
                rep.record("L2", r, all_distinct(&p) && rank_of(&p) == 2);
            }
            if let Some(p) = fetch(&[s.a + s.c, s.a + s.d, s.b + s.c, s.b + s.d], r) {
                let general = (0..4).all(|skip| {
                    let three: Vec<&ProjPoint> = (0..4).filter(|&k| k != skip).map(|k| p[k]).collect();
                    rank_of(&three) == 3
                });
                rep.record("P3", r, rank_of(&p) == 3 && general);
            }
            if let Some(p) = fetch(&[s.a, s.b, s.c, s.d], r) {
                rep.record("collinear", r, rank_of(&p) == 2);
                rep.record("distinct", r, all_distinct(&p));
            }
        } else {
            if let Some(p) = fetch(&[s.a, s.b, s.c, s.d], r) {
                rep.record("distinct", r, all_distinct(&p));
            }
            let order = [s.a + s.d, s.a + s.c, s.a + s.b, s.b + s.c, s.b + s.d, s.c + s.d];
            if let Some(p) = fetch(&order, r) {
                let ok = multi_ratio(&p).map(|x| x == ExtRational::int(-1)).unwrap_or(false);
                rep.record("triple", r, ok);
            }
        }
    }
    if dim >= 2 {
        let mut line = |x: Lat| -> Option<Flat> {
            lines
                .entry(x)
                .or_insert_with(|| {
                    let pts: Vec<&ProjPoint> = s.points().iter().filter_map(|&o| w.point(x + o)).collect();
                    let q = pts.iter().skip(1).find(|q| **q != pts[0])?;
                    Flat::span(&[pts[0], q]).ok()
                })
                .clone()
        };
        for r in w.index_box() {
            if w.point(r).is_none() {
                continue;
            }
            let ls: Option<Vec<Flat>> = s.points().iter().map(|&o| line(r - o)).collect();
            if let Some(ls) = ls {
                let ok = (0..4).all(|x| (x + 1..4).all(|y| ls[x] != ls[y]));
                rep.record("lines", r, ok);
            }
        }
    }
    rep
}

/// A closed `n`-gon mesh for pins with `a2 = b2` and `c2 = d2` in the plane, where one row is free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicMesh {
    pub pin: YPin,
    pub n: usize,
    pub rows: BTreeMap<i64, Vec<ProjPoint>>,
}

impl PointSource for PeriodicMesh {
    fn pin(&self) -> &YPin {
        &self.pin
    }

    fn dim(&self) -> usize {
        2
    }

    fn point(&self, p: Lat) -> Option<&ProjPoint> {
        self.rows.get(&p.j).map(|r| &r[p.i.rem_euclid(self.n as i64) as usize])
    }

    fn index_box(&self) -> Vec<Lat> {
        let (j0, j1) = (*self.rows.keys().next().unwrap(), *self.rows.keys().next_back().unwrap());
        let s = self.pin.points();
        let (sj0, sj1) = (s.iter().map(|p| p.j).min().unwrap(), s.iter().map(|p| p.j).max().unwrap());
        ((j0 - 2 * sj1)..=(j1 - 2 * sj0)).flat_map(|j| (0..self.n as i64).map(move |i| lat(i, j))).collect()
    }
}

impl PeriodicMesh {
    /// A random closed polygon as row `a2`.
    pub fn random(pin: &YPin, n: usize, seed: u64) -> Result<PeriodicMesh> {
        if pin.m() != 1 {
            return precondition("closed polygons are free initial data only when d2 - a2 = 1");
        }
        if pin.d() < 2 {
            return precondition("planar meshes need D(S) >= 2");
        }
        if n < 3 {
            return invalid("a closed polygon needs at least three vertices");
        }
        let mut rng = Sampler::new(seed, 0);
        let mut used = HashSet::new();
        let row = (0..n).map(|_| draw(&mut used, || rng.point(2))).collect::<Result<_>>()?;
        Ok(PeriodicMesh { pin: *pin, n, rows: BTreeMap::from([(pin.a.j, row)]) })
    }

    pub fn from_row(pin: &YPin, row: Vec<ProjPoint>) -> Result<PeriodicMesh> {
        if pin.m() != 1 {
            return precondition("closed polygons are free initial data only when d2 - a2 = 1");
        }
        Ok(PeriodicMesh { pin: *pin, n: row.len(), rows: BTreeMap::from([(pin.a.j, row)]) })
    }

    fn build(&mut self, j: i64, target: Lat, src: [Lat; 4]) -> Result<()> {
        let row = (0..self.n as i64)
            .map(|i| {
                let r = lat(i, j) - target;
                let v: Vec<&ProjPoint> = src.iter().map(|&o| self.point(r + o).unwrap()).collect();
                meet_lines(v[0], v[1], v[2], v[3])
            })
            .collect::<Result<_>>()?;
        self.rows.insert(j, row);
        Ok(())
    }

    pub fn step_forward(&mut self) -> Result<()> {
        let s = self.pin;
        let top = *self.rows.keys().next_back().unwrap();
        self.build(top + 1, s.c + s.d, [s.a + s.c, s.b + s.c, s.a + s.d, s.b + s.d])
    }

    pub fn step_backward(&mut self) -> Result<()> {
        let s = self.pin;
        let bottom = *self.rows.keys().next().unwrap();
        self.build(bottom - 1, s.a + s.b, [s.a + s.c, s.a + s.d, s.b + s.c, s.b + s.d])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::pin::{zoo_pin, ZOO};

    fn pt(x: i64, y: i64) -> ProjPoint {
        ProjPoint::from_ints(&[1, x, y]).unwrap()
    }

    #[test]
    fn moment_curve_step() {
        let s = zoo_pin("pentagram").unwrap();
        let mut w = MeshWindow::new(s, 2, 0);
        w.insert_row(0, -1, (-1..=2).map(|i| pt(i, i * i)).collect()).unwrap();
        w.step_forward().unwrap();
        let b0 = w.get(lat(0, 1)).unwrap();
        assert_eq!(*b0, ProjPoint::affine(&[q(1, 2), q(1, 1)]));
    }

    #[test]
    fn triple_oracles() {
        let p = |x: i64| ProjPoint::from_ext(&ExtRational::int(x));
        let v = [p(0), p(1), p(3), p(4), p(6)];
        let r: Vec<&ProjPoint> = v.iter().collect();
        assert_eq!(solve_triple_forward(&r).unwrap().to_ext().unwrap(), ExtRational::int(-2));
        let v = [p(0), p(1), p(2), p(3), p(4)];
        let r: Vec<&ProjPoint> = v.iter().collect();
        assert!(solve_triple_forward(&r).unwrap().to_ext().unwrap().is_infinite());
    }

    #[test]
    fn generated_windows_are_clean_and_reversible() {
        for e in ZOO.iter().filter(|e| e.d >= 2) {
            let s = e.pin();
            for dim in [2, e.d as usize] {
                let w = generate_window(&s, dim, 24, 7).unwrap();
                assert!(check_relations(&w).is_clean(), "{}", e.name);
                let mut x = w.clone();
                x.step(2).unwrap();
                assert!(check_relations(&x).is_clean(), "{} D={dim}", e.name);
                let (ok, n) = w.inverse_round_trip(2).unwrap_or_else(|err| panic!("{} D={dim}: {err}", e.name));
                assert!(ok && n > 0, "{}", e.name);
            }
        }
    }

    #[test]
    fn full_rank_at_top_dimension() {
        let s = zoo_pin("rabbit").unwrap();
        let w = generate_window(&s, 4, 10, 3).unwrap();
        assert_eq!(w.rank(), 5);
        let over = generate_arrangement(&s, 6, 10, 3).unwrap();
        assert_eq!(over.rank(), 5);
        assert!(generate_window(&s, 5, 10, 3).is_err());
    }

    #[test]
    fn perturbation_is_reported() {
        let s = zoo_pin("short diagonal").unwrap();
        let mut w = generate_window(&s, 3, 10, 1).unwrap();
        w.step(2).unwrap();
        let row = w.rows.get_mut(&1).unwrap();
        row.points[4] = ProjPoint::from_ints(&[1, 2, 3, 5]).unwrap();
        let rep = check_relations(&w);
        assert!(!rep.is_clean());
    }

    #[test]
    fn one_dimensional_round_trip() {
        let s = zoo_pin("pentagram").unwrap();
        let w = generate_1d(&s, 14, 5).unwrap();
        let mut x = w.clone();
        x.step(3).unwrap();
        assert!(check_relations(&x).is_clean());
        x.step(-3).unwrap();
        assert!(w.agree_on_common(&x).0);
    }

    #[test]
    fn reduced_oracles() {
        let rabbit_like = YPin::from_pairs([(-1, 1), (1, 2), (0, 3), (0, 4)]).unwrap();
        let mut w = generate_reduced(&rabbit_like, 10, 2).unwrap();
        w.step_forward_reduced().unwrap();
        let (j0, _) = w.j_range().unwrap();
        let (a, b, c) = (j0, j0 + 1, j0 + 2);
        for i in 2..7 {
            let g = |i, j| w.get(lat(i, j)).unwrap();
            let want = meet_lines(g(i - 1, a), g(i + 1, b), g(i + 1, a), g(i, b)).unwrap();
            assert_eq!(*g(i, c), want);
        }
        let kangaroo = zoo_pin("kangaroo").unwrap();
        let mut w = generate_reduced(&kangaroo, 12, 2).unwrap();
        w.step_forward_reduced().unwrap();
        let (j0, _) = w.j_range().unwrap();
        for i in 3..8 {
            let g = |i, j: i64| w.get(lat(i, j0 - 1 + j)).unwrap();
            let want = meet_lines(g(i - 1, 1), g(i - 2, 2), g(i + 1, 2), g(i + 1, 3)).unwrap();
            assert_eq!(*g(i, 4), want);
        }
    }

    #[test]
    fn reduced_round_trip_and_emergent_relations() {
        for e in ZOO.iter().filter(|e| e.d >= 2) {
            let s = e.pin();
            let w = generate_reduced(&s, 16, 4).unwrap();
            let mut x = w.clone();
            for _ in 0..3 {
                x.step_forward_reduced().unwrap_or_else(|err| {
                    let rr: Vec<_> = x.rows.iter().map(|(j, r)| (*j, r.i_lo, r.i_hi())).collect();
                    panic!("{} {err} {rr:?}", e.name)
                });
            }
            assert!(check_relations(&x).is_clean(), "{}", e.name);
            for _ in 0..3 {
                x.step_backward_reduced().unwrap_or_else(|err| {
                    let rr: Vec<_> = x.rows.iter().map(|(j, r)| (*j, r.i_lo, r.i_hi())).collect();
                    panic!("{} {err} {rr:?}", e.name)
                });
            }
            assert!(w.agree_on_common(&x).0, "{}", e.name);
        }
    }

    #[test]
    fn closed_pentagram_round_trip() {
        let s = zoo_pin("pentagram").unwrap();
        let mut m = PeriodicMesh::random(&s, 7, 9).unwrap();
        let first = m.rows[&0].clone();
        m.step_forward().unwrap();
        m.step_forward().unwrap();
        let mut back = PeriodicMesh::from_row(&s, m.rows[&2].clone()).unwrap();
        back.rows = BTreeMap::from([(1, m.rows[&1].clone()), (2, m.rows[&2].clone())]);
        back.step_backward().unwrap();
        assert_eq!(back.rows[&0], first);
        assert!(check_relations(&m).is_clean());
    }
}
