//! Cross-ratio y-variables of a mesh and the identities they satisfy.

use crate::arith::Q;
use crate::error::{degenerate, invalid, Error, Result};
use crate::mesh::{PointSource, Sampler};
use crate::pin::{lat, Lat, YPin};
use crate::projective::{cross_ratio_by_params, cross_ratio_points, multi_ratio, Flat, ProjPoint};
use crate::ExtRational;
use num::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// `y_r = -[P_{r+a}, P_{r+c}, P_{r+b}, P_{r+d}]`, computed through two charts that must agree.
pub fn y_of<M: PointSource>(w: &M, r: Lat) -> Result<ExtRational> {
    let s = *w.pin();
    let pts: Option<Vec<&ProjPoint>> = [s.a, s.c, s.b, s.d].iter().map(|&o| w.point(r + o)).collect();
    let p = pts.ok_or_else(|| Error::Precondition(format!("points of y_{r} are not all stored")))?;
    let quad = [p[0], p[1], p[2], p[3]];
    let by_det = cross_ratio_points(quad)?.neg();
    if w.dim() >= 2 {
        let by_params = cross_ratio_by_params(quad)?.neg();
        if by_params != by_det {
            return Err(Error::CheckFailed(format!("chart disagreement for y_{r}: {by_det} vs {by_params}")));
        }
    }
    Ok(by_det)
}

/// The y-variables of every cell whose four points are stored.
#[derive(Clone, Debug, Default)]
pub struct YGrid {
    pub values: BTreeMap<Lat, ExtRational>,
}

impl YGrid {
    pub fn from_mesh<M: PointSource>(w: &M) -> Result<YGrid> {
        let s = *w.pin();
        let mut values = BTreeMap::new();
        for r in w.index_box() {
            if s.points().iter().all(|&o| w.point(r + o).is_some()) {
                values.insert(r, y_of(w, r)?);
            }
        }
        Ok(YGrid { values })
    }

    pub fn get(&self, r: Lat) -> Option<&ExtRational> {
        self.values.get(&r)
    }

    fn finite(&self, r: Lat) -> Option<Q> {
        self.get(r)?.finite().cloned()
    }
}

/// Outcome of an identity check over all testable instances.
#[derive(Clone, Debug, Default, Serialize)]
pub struct IdentityReport {
    pub instances: usize,
    pub skipped: Vec<Lat>,
    pub failures: Vec<Lat>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn push(&mut self, r: Lat, ok: Option<bool>) {
        match ok {
            Some(true) => self.instances += 1,
            Some(false) => {
                self.instances += 1;
                self.failures.push(r);
            }
            None => self.skipped.push(r),
        }
    }

    pub fn merge(&mut self, other: IdentityReport) {
        self.instances += other.instances;
        self.skipped.extend(other.skipped);
        self.failures.extend(other.failures);
    }
}

/// `1 + y` and `1 / (1 + 1/y)`, the two kinds of factor in the recurrence.
fn plus(y: &Q) -> Q {
    Q::one() + y
}

fn minus_inv(y: &Q) -> Q {
    y / (Q::one() + y)
}

fn generic(y: &Q) -> bool {
    !y.is_zero() && *y != -Q::one()
}

/// Residual `y_{r+a+b} y_{r+c+d} / RHS` of the master recurrence at `r`; `None` if an instance value
/// is missing or degenerate.
pub fn recurrence_residual(grid: &YGrid, s: &YPin, r: Lat) -> Option<Q> {
    let offs = [s.a + s.b, s.c + s.d, s.a + s.c, s.b + s.d, s.a + s.d, s.b + s.c];
    let y: Vec<Q> = offs.iter().map(|&o| grid.finite(r + o)).collect::<Option<_>>()?;
    if !y.iter().all(generic) {
        return None;
    }
    let rhs = plus(&y[2]) * plus(&y[3]) * minus_inv(&y[4]) * minus_inv(&y[5]);
    Some(&y[0] * &y[1] / rhs)
}

pub fn check_recurrence(grid: &YGrid, s: &YPin) -> IdentityReport {
    let mut rep = IdentityReport::default();
    let offs = [s.a + s.b, s.c + s.d, s.a + s.c, s.b + s.d, s.a + s.d, s.b + s.c];
    for &key in grid.values.keys() {
        let r = key - offs[0];
        if offs.iter().all(|&o| grid.get(r + o).is_some()) {
            rep.push(r, recurrence_residual(grid, s, r).map(|x| x.is_one()));
        }
    }
    rep
}

/// The six points `P_{r+a+d}, P_{r+a+c}, P_{r+a+b}, P_{r+b+c}, P_{r+b+d}, P_{r+c+d}` of a triple relation.
pub fn triple_offsets(s: &YPin) -> [Lat; 6] {
    [s.a + s.d, s.a + s.c, s.a + s.b, s.b + s.c, s.b + s.d, s.c + s.d]
}

/// Multi-ratio of every stored six-point triple instance; each must be `-1`.
pub fn menelaus_check<M: PointSource>(w: &M) -> IdentityReport {
    let s = *w.pin();
    let offs = triple_offsets(&s);
    let mut rep = IdentityReport::default();
    for r in w.index_box() {
        let pts: Option<Vec<&ProjPoint>> = offs.iter().map(|&o| w.point(r + o)).collect();
        if let Some(p) = pts {
            rep.push(r, Some(multi_ratio(&p).map(|x| x == ExtRational::int(-1)).unwrap_or(false)));
        }
    }
    rep
}

/// `[P_i, L_j, P_k, L_l]`: the cross-ratio of `P_i, P_k` with the points where their join meets the lines.
pub fn bracket(pi: &ProjPoint, lj: &Flat, pk: &ProjPoint, ll: &Flat) -> Result<ExtRational> {
    if pi == pk {
        return degenerate("coincident points in a bracket");
    }
    let line = Flat::span(&[pi, pk])?;
    let x = line.meet(lj).as_point()?;
    let y = line.meet(ll).as_point()?;
    cross_ratio_points([pi, &x, pk, &y])
}

/// Product of the six brackets `[P_i, L_j, P_k, L_l]` over `i < k` with `(i, j, k, l)` even.
pub fn bracket_product(points: [&ProjPoint; 4], lines: [&Flat; 4]) -> Result<ExtRational> {
    let mut num = Q::one();
    let mut infinite = 0;
    let mut zero = 0;
    for i in 0..4 {
        for k in i + 1..4 {
            let rest: Vec<usize> = (0..4).filter(|&x| x != i && x != k).collect();
            let (j, l) = if is_even([i, rest[0], k, rest[1]]) { (rest[0], rest[1]) } else { (rest[1], rest[0]) };
            match bracket(points[i], lines[j], points[k], lines[l])? {
                ExtRational::Infinity => infinite += 1,
                ExtRational::Finite(x) if x.is_zero() => zero += 1,
                ExtRational::Finite(x) => num *= x,
            }
        }
    }
    if infinite + zero > 0 {
        return degenerate("a bracket is zero or infinite");
    }
    Ok(ExtRational::Finite(num))
}

fn is_even(p: [usize; 4]) -> bool {
    let mut inv = 0;
    for x in 0..4 {
        for y in x + 1..4 {
            if p[x] > p[y] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

/// The line `L_x` through the stored points among `P_{x+a..d}`.
pub fn mesh_line<M: PointSource>(w: &M, x: Lat) -> Option<Flat> {
    let pts: Vec<&ProjPoint> = w.pin().points().iter().filter_map(|&o| w.point(x + o)).collect();
    let q = pts.iter().skip(1).find(|q| **q != pts[0])?;
    Flat::span(&[pts[0], q]).ok()
}

/// The bracket product (which equals 1) applied to `P_{r+a+b+c}, P_{r+a+b+d}, P_{r+a+c+d}, P_{r+b+c+d}` and the lines
/// `L_{r+2d}, L_{r+2c}, L_{r+2b}, L_{r+2a}`, for every `r` where they are available.
pub fn bracket_mesh_check<M: PointSource>(w: &M) -> IdentityReport {
    let s = *w.pin();
    let mut rep = IdentityReport::default();
    let po = [s.a + s.b + s.c, s.a + s.b + s.d, s.a + s.c + s.d, s.b + s.c + s.d];
    let lo = [s.d + s.d, s.c + s.c, s.b + s.b, s.a + s.a];
    for r in w.index_box() {
        let Some(p) = po.iter().map(|&o| w.point(r + o)).collect::<Option<Vec<_>>>() else { continue };
        let Some(l) = lo.iter().map(|&o| mesh_line(w, r + o)).collect::<Option<Vec<_>>>() else { continue };
        let v = bracket_product([p[0], p[1], p[2], p[3]], [&l[0], &l[1], &l[2], &l[3]]);
        rep.push(r, v.ok().map(|x| x == ExtRational::int(1)));
    }
    rep
}

/// The bracket product identity on `n` random planar configurations of four points and four lines.
pub fn bracket_random(n: usize, seed: u64) -> IdentityReport {
    let mut rng = Sampler::new(seed, 0);
    let mut rep = IdentityReport::default();
    for k in 0..n {
        let mut pt = || loop {
            if let Some(p) = rng.point(2) {
                return p;
            }
        };
        let pts: Vec<ProjPoint> = (0..4).map(|_| pt()).collect();
        let lines: Vec<Flat> = (0..4)
            .map(|_| loop {
                let (u, v) = (pt(), pt());
                if u != v {
                    return Flat::span(&[&u, &v]).unwrap();
                }
            })
            .collect();
        let v = bracket_product([&pts[0], &pts[1], &pts[2], &pts[3]], [&lines[0], &lines[1], &lines[2], &lines[3]]);
        rep.push(lat(k as i64, 0), v.ok().map(|x| x == ExtRational::int(1)));
    }
    rep
}

/// One of the four factors relating `y^{(1)}_{r+c+d} = 1 / y_{r+a+b}` to `y_{r+c+d}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Factor {
    /// `1 + y_{r+a+c}`
    A,
    /// `1 + y_{r+b+d}`
    B,
    /// `1 / (1 + y_{r+a+d}^{-1})`
    C,
    /// `1 / (1 + y_{r+b+c}^{-1})`
    D,
}

pub const FACTORS: [Factor; 4] = [Factor::A, Factor::B, Factor::C, Factor::D];

/// A subset of the four factors.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct FactorSet(pub u8);

impl FactorSet {
    pub const EMPTY: FactorSet = FactorSet(0);
    pub const ALL: FactorSet = FactorSet(15);

    pub fn of(fs: &[Factor]) -> FactorSet {
        FactorSet(fs.iter().fold(0, |m, &f| m | 1 << f as u8))
    }

    pub fn contains(self, f: Factor) -> bool {
        self.0 & (1 << f as u8) != 0
    }

    pub fn with(self, f: Factor) -> FactorSet {
        FactorSet(self.0 | 1 << f as u8)
    }

    pub fn all_subsets() -> impl Iterator<Item = FactorSet> {
        (0..16).map(FactorSet)
    }

    /// The factor attached to a quiver offset `v` between a vertex and the one it depends on.
    pub fn factor_of_offset(s: &YPin, v: Lat) -> Vec<Factor> {
        let mut out = vec![];
        if v == s.d - s.a {
            out.push(Factor::A);
        }
        if v == s.c - s.b {
            out.push(Factor::B);
        }
        if v == s.c - s.a {
            out.push(Factor::C);
        }
        if v == s.d - s.b {
            out.push(Factor::D);
        }
        out
    }
}

impl fmt::Display for FactorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = FACTORS.iter().filter(|&&x| self.contains(x)).map(|x| format!("{x:?}")).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// Route (i): `y^{(1)}_{r+c+d}` times the chosen factors, from the cross-ratio y-variables.
pub fn general_y_product(grid: &YGrid, s: &YPin, r: Lat, set: FactorSet) -> Option<Q> {
    let y = |o: Lat| grid.finite(r + o).filter(generic);
    let mut v = y(s.a + s.b)?.recip();
    if set.contains(Factor::A) {
        v *= plus(&y(s.a + s.c)?);
    }
    if set.contains(Factor::B) {
        v *= plus(&y(s.b + s.d)?);
    }
    if set.contains(Factor::C) {
        v *= minus_inv(&y(s.a + s.d)?);
    }
    if set.contains(Factor::D) {
        v *= minus_inv(&y(s.b + s.c)?);
    }
    Some(v)
}

/// A multi-ratio formula: a sign and point indices as coefficient vectors over `(a, b, c, d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioFormula {
    pub sign: i64,
    pub indices: Vec<[i64; 4]>,
}

/// Multi-ratio formulas for the eight subsets where one is known.
pub fn covered_formula(set: FactorSet) -> Option<RatioFormula> {
    use Factor::*;
    const ABC: [i64; 4] = [1, 1, 1, 0];
    const ABD: [i64; 4] = [1, 1, 0, 1];
    const ACD: [i64; 4] = [1, 0, 1, 1];
    const BCD: [i64; 4] = [0, 1, 1, 1];
    let (sign, indices): (i64, Vec<[i64; 4]>) = match set {
        x if x == FactorSet::EMPTY => (-1, vec![ABC, [1, 2, 0, 0], ABD, [2, 1, 0, 0]]),
        x if x == FactorSet::of(&[A]) => (1, vec![ABC, [1, 2, 0, 0], ABD, [2, 0, 0, 1], ACD, [1, 0, 2, 0]]),
        x if x == FactorSet::of(&[A, C]) => (1, vec![ABC, [1, 2, 0, 0], ABD, [1, 0, 0, 2], ACD, [1, 0, 2, 0]]),
        x if x == FactorSet::of(&[A, D]) => (1, vec![BCD, [0, 2, 0, 1], ABD, [2, 0, 0, 1], ACD, [0, 0, 2, 1]]),
        x if x == FactorSet::of(&[A, C, D]) => {
            (1, vec![BCD, [0, 2, 0, 1], ABD, [1, 0, 0, 2], ACD, [0, 0, 2, 1]])
        }
        x if x == FactorSet::of(&[A, B]) => (
            -1,
            vec![ABC, [0, 2, 1, 0], BCD, [0, 1, 0, 2], ABD, [2, 0, 0, 1], ACD, [1, 0, 2, 0]],
        ),
        x if x == FactorSet::of(&[C, D]) => (
            -1,
            vec![ABC, [0, 1, 2, 0], BCD, [0, 2, 0, 1], ABD, [1, 0, 0, 2], ACD, [2, 0, 1, 0]],
        ),
        x if x == FactorSet::ALL => (-1, vec![ACD, [0, 0, 2, 1], BCD, [0, 0, 1, 2]]),
        _ => return None,
    };
    Some(RatioFormula { sign, indices })
}

fn index_point(s: &YPin, c: [i64; 4]) -> Lat {
    c[0] * s.a + c[1] * s.b + c[2] * s.c + c[3] * s.d
}

/// Route (ii): the multi-ratio of mesh points for a covered subset, at base `r`.
pub fn general_y_ratio<M: PointSource>(w: &M, r: Lat, set: FactorSet) -> Result<Option<ExtRational>> {
    let Some(f) = covered_formula(set) else { return Ok(None) };
    let s = *w.pin();
    let pts: Option<Vec<&ProjPoint>> = f.indices.iter().map(|&c| w.point(r + index_point(&s, c))).collect();
    let Some(p) = pts else { return invalid(format!("points for {set} at {r} are not stored")) };
    let v = multi_ratio(&p)?;
    Ok(Some(if f.sign < 0 { v.neg() } else { v }))
}

/// Compares both routes for every covered subset at every base `r` where all data is present.
pub fn general_y_check<M: PointSource>(w: &M, grid: &YGrid) -> BTreeMap<FactorSet, IdentityReport> {
    let s = *w.pin();
    let mut out = BTreeMap::new();
    for set in FactorSet::all_subsets() {
        let Some(f) = covered_formula(set) else { continue };
        let mut rep = IdentityReport::default();
        for r in w.index_box() {
            if !f.indices.iter().all(|&c| w.point(r + index_point(&s, c)).is_some()) {
                continue;
            }
            let offs = [s.a + s.b, s.a + s.c, s.b + s.d, s.a + s.d, s.b + s.c];
            if !offs.iter().all(|&o| grid.get(r + o).is_some()) {
                continue;
            }
            let prod = general_y_product(grid, &s, r, set);
            let ratio = general_y_ratio(w, r, set).ok().flatten();
            let ok = match (prod, ratio) {
                (Some(x), Some(y)) => Some(ExtRational::Finite(x) == y),
                (None, _) => None,
                (Some(_), None) => Some(false),
            };
            rep.push(r, ok);
        }
        out.insert(set, rep);
    }
    out
}

/// The eight compass directions of the lifted quiver.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Compass {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

pub const COMPASS: [Compass; 8] =
    [Compass::N, Compass::NE, Compass::E, Compass::SE, Compass::S, Compass::SW, Compass::W, Compass::NW];

impl Compass {
    pub fn unit(self) -> Lat {
        match self {
            Compass::N => lat(0, 1),
            Compass::NE => lat(1, 1),
            Compass::E => lat(1, 0),
            Compass::SE => lat(1, -1),
            Compass::S => lat(0, -1),
            Compass::SW => lat(-1, -1),
            Compass::W => lat(-1, 0),
            Compass::NW => lat(-1, 1),
        }
    }

    pub fn opposite(self) -> Compass {
        COMPASS[(self as usize + 4) % 8]
    }

    pub fn from_unit(v: Lat) -> Option<Compass> {
        COMPASS.iter().copied().find(|c| c.unit() == v)
    }

    /// The displacement of this direction written over `(a, b, c, d)`.
    pub fn symbolic(self) -> [i64; 4] {
        match self {
            Compass::N => [1, 0, 0, -1],
            Compass::S => [0, 1, -1, 0],
            Compass::E => [0, -1, 0, 1],
            Compass::W => [-1, 0, 1, 0],
            Compass::NE => [1, -1, 0, 0],
            Compass::NW => [0, 0, 1, -1],
            Compass::SW => [-1, 1, 0, 0],
            Compass::SE => [0, 0, -1, 1],
        }
    }

    /// The same displacement evaluated on a pin.
    pub fn on_pin(self, s: &YPin) -> Lat {
        let k = self.symbolic();
        k[0] * s.a + k[1] * s.b + k[2] * s.c + k[3] * s.d
    }

    pub fn from_symbolic(v: [i64; 4]) -> Option<Compass> {
        COMPASS.iter().copied().find(|c| c.symbolic() == v)
    }
}

/// A step of a cycle diagram: solid steps are numerator distances, dashed ones denominator distances.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleStep {
    pub dir: Compass,
    pub solid: bool,
}

/// The compass cycle of a covered subset's multi-ratio.
pub fn cycle_diagram(set: FactorSet) -> Option<Vec<CycleStep>> {
    let f = covered_formula(set)?;
    let n = f.indices.len();
    (0..n)
        .map(|k| {
            let (u, v) = (f.indices[k], f.indices[(k + 1) % n]);
            let d = [v[0] - u[0], v[1] - u[1], v[2] - u[2], v[3] - u[3]];
            Compass::from_symbolic(d).map(|dir| CycleStep { dir, solid: k % 2 == 0 })
        })
        .collect()
}

/// Rebuilds the index sequence of a cycle from its first index.
pub fn cycle_indices(start: [i64; 4], steps: &[CycleStep]) -> Vec<[i64; 4]> {
    let mut out = vec![start];
    for st in &steps[..steps.len() - 1] {
        let last = *out.last().unwrap();
        let d = st.dir.symbolic();
        out.push([last[0] + d[0], last[1] + d[1], last[2] + d[2], last[3] + d[3]]);
    }
    out
}

/// Neighbour slots of a vertex predicted by a cycle: solid steps are outgoing arrows in their own
/// direction, dashed steps are incoming arrows travelling in their direction.
pub fn predicted_slots(steps: &[CycleStep]) -> (Vec<Compass>, Vec<Compass>) {
    let mut out: Vec<Compass> = steps.iter().filter(|s| s.solid).map(|s| s.dir).collect();
    let mut inc: Vec<Compass> = steps.iter().filter(|s| !s.solid).map(|s| s.dir.opposite()).collect();
    out.sort();
    inc.sort();
    (out, inc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::mesh::{generate, MeshWindow};
    use crate::pin::zoo_pin;

    fn moment_mesh() -> MeshWindow {
        let s = zoo_pin("pentagram").unwrap();
        let mut w = MeshWindow::new(s, 2, 0);
        let pts = (-6..=8).map(|i| ProjPoint::from_ints(&[1, i, i * i]).unwrap()).collect();
        w.insert_row(0, -6, pts).unwrap();
        w.step(3).unwrap();
        w
    }

    #[test]
    fn moment_curve_y() {
        let w = moment_mesh();
        assert_eq!(y_of(&w, lat(0, 0)).unwrap(), ExtRational::Finite(q(-1, 9)));
    }

    #[test]
    fn recurrence_on_generated_meshes() {
        for (name, dim) in [("pentagram", 2), ("short diagonal", 3), ("pentagram", 1), ("gopher", 2)] {
            let s = zoo_pin(name).unwrap();
            let mut w = generate(&s, dim, 24, 11).unwrap();
            let need = if dim == 1 { s.m() + 1 } else { s.l() + 1 };
            w.step(need).unwrap();
            let g = YGrid::from_mesh(&w).unwrap();
            let rep = check_recurrence(&g, &s);
            assert!(rep.passed() && rep.instances > 0, "{name} {dim}: {rep:?}");
            if dim >= 2 {
                let m = menelaus_check(&w);
                assert!(m.passed() && m.instances > 0, "{name}");
                let l = bracket_mesh_check(&w);
                assert!(l.passed() && l.instances > 0, "{name}: {l:?}");
            }
        }
    }

    #[test]
    fn random_bracket_products() {
        let rep = bracket_random(40, 3);
        assert!(rep.passed() && rep.instances >= 35, "{rep:?}");
    }

    #[test]
    fn coincident_points_rejected() {
        let p = ProjPoint::from_ints(&[1, 0, 0]).unwrap();
        let l = Flat::span(&[&ProjPoint::from_ints(&[1, 1, 0]).unwrap(), &ProjPoint::from_ints(&[1, 0, 1]).unwrap()])
            .unwrap();
        assert!(bracket(&p, &l, &p, &l).is_err());
    }

    #[test]
    fn general_y_routes_agree() {
        let s = zoo_pin("pentagram").unwrap();
        let w = moment_mesh();
        let g = YGrid::from_mesh(&w).unwrap();
        for (set, rep) in general_y_check(&w, &g) {
            assert!(rep.passed() && rep.instances > 0, "{set}: {rep:?}");
        }
        let r = lat(0, 0);
        let empty = general_y_ratio(&w, r, FactorSet::EMPTY).unwrap().unwrap();
        assert_eq!(empty, g.get(r + s.a + s.b).unwrap().recip());
    }

    #[test]
    fn cycle_words() {
        use Compass::*;
        let a = cycle_diagram(FactorSet::of(&[Factor::A])).unwrap();
        assert_eq!(a.iter().map(|s| s.dir).collect::<Vec<_>>(), vec![S, E, NE, W, NW, S]);
        let e = cycle_diagram(FactorSet::EMPTY).unwrap();
        assert_eq!(e.iter().map(|s| s.dir).collect::<Vec<_>>(), vec![S, E, N, W]);
        for set in FactorSet::all_subsets() {
            if let Some(c) = cycle_diagram(set) {
                let sum = c.iter().fold(lat(0, 0), |acc, st| acc + st.dir.unit());
                assert_eq!(sum, lat(0, 0), "{set}");
                let f = covered_formula(set).unwrap();
                assert_eq!(cycle_indices(f.indices[0], &c), f.indices);
            }
        }
    }
}
