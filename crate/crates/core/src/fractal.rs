//! k-fractals of a pin and affine-dimension audits of mesh windows.

use crate::error::{Error, Result};
use crate::mesh::{generate_stepped, MeshWindow};
use crate::pin::{Lat, YPin};
use crate::projective::rank_of;
use serde::Serialize;
use std::collections::BTreeSet;

/// The lattice set `{r + αa + βb + γc + δd : α + β + γ + δ = k}` with coinciding points merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fractal {
    pub pin: YPin,
    pub base: Lat,
    pub k: usize,
    pub points: BTreeSet<Lat>,
}

/// Offsets of the k-fractal based at the origin.
pub fn fractal_offsets(s: &YPin, k: usize) -> BTreeSet<Lat> {
    let mut level = BTreeSet::from([Lat::default()]);
    for _ in 0..k {
        level = level.iter().flat_map(|&p| s.points().map(|v| p + v)).collect();
    }
    level
}

pub fn make_fractal(s: &YPin, r: Lat, k: usize) -> Fractal {
    let points = fractal_offsets(s, k).into_iter().map(|p| p + r).collect();
    Fractal { pin: *s, base: r, k, points }
}

/// `C(k + 3, 3)`, the number of exponent vectors.
pub fn max_size(k: usize) -> usize {
    (k + 1) * (k + 2) * (k + 3) / 6
}

impl Fractal {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(f_a, f_b, f_c, f_d)`: the (k-1)-fractals at `r + a`, ..., `r + d`.
    pub fn sub_fractals(&self) -> Option<[Fractal; 4]> {
        let k = self.k.checked_sub(1)?;
        Some(self.pin.points().map(|v| make_fractal(&self.pin, self.base + v, k)))
    }
}

/// Exponent vectors `(α, β, γ, δ)` with sum `k`.
pub fn exponents(k: usize) -> Vec<[usize; 4]> {
    let mut out = vec![];
    for a in 0..=k {
        for b in 0..=k - a {
            for c in 0..=k - a - b {
                out.push([a, b, c, k - a - b - c]);
            }
        }
    }
    out
}

fn place(s: &YPin, r: Lat, e: &[usize; 4]) -> Lat {
    s.points().iter().zip(e).fold(r, |acc, (&v, &n)| acc + n as i64 * v)
}

/// One failure of the intersection structure of sub-fractals.
#[derive(Clone, Debug, Serialize)]
pub struct IntersectionFailure {
    pub k: usize,
    pub pair: (usize, usize),
    pub detail: String,
}

/// Indexed check: for distinct letters `x, y` the members of the k-fractal with positive `x` and
/// `y` exponents are exactly the (k-2)-fractal at `r + x + y`, and that fractal is a sub-fractal of
/// both `f_x` and `f_y`.
pub fn intersection_check(s: &YPin, k: usize) -> Vec<IntersectionFailure> {
    if k < 2 {
        return vec![];
    }
    let r = Lat::default();
    let pts = s.points();
    let all = exponents(k);
    let mut out = vec![];
    for x in 0..4 {
        for y in x + 1..4 {
            let mut meet: Vec<[usize; 4]> = all.iter().filter(|e| e[x] > 0 && e[y] > 0).copied().collect();
            let shifted: BTreeSet<[usize; 4]> = meet
                .iter_mut()
                .map(|e| {
                    e[x] -= 1;
                    e[y] -= 1;
                    *e
                })
                .collect();
            let expected: BTreeSet<[usize; 4]> = exponents(k - 2).into_iter().collect();
            let base = r + pts[x] + pts[y];
            let fx = make_fractal(s, r + pts[x], k - 1);
            let fy = make_fractal(s, r + pts[y], k - 1);
            let g = make_fractal(s, base, k - 2);
            let placed: BTreeSet<Lat> = shifted.iter().map(|e| place(s, base, e)).collect();
            let belongs = [&fx, &fy].iter().all(|h| h.sub_fractals().unwrap().contains(&g));
            if shifted != expected || placed != g.points || !belongs {
                out.push(IntersectionFailure { k, pair: (x, y), detail: format!("{} common members", shifted.len()) });
            }
        }
    }
    out
}

/// Lattice points shared by two merged sub-fractals beyond the expected (k-2)-fractal.
#[derive(Clone, Debug, Serialize)]
pub struct PointOverlap {
    pub k: usize,
    pub pair: (usize, usize),
    pub extra: Vec<[i64; 2]>,
}

/// Extra coincidences that appear when sub-fractals are compared as merged point sets.
pub fn point_overlaps(s: &YPin, k: usize) -> Vec<PointOverlap> {
    if k < 2 {
        return vec![];
    }
    let f = make_fractal(s, Lat::default(), k);
    let subs = f.sub_fractals().unwrap();
    let pts = s.points();
    let mut out = vec![];
    for x in 0..4 {
        for y in x + 1..4 {
            let g = make_fractal(s, pts[x] + pts[y], k - 2);
            let extra: Vec<[i64; 2]> = subs[x]
                .points
                .intersection(&subs[y].points)
                .filter(|p| !g.points.contains(p))
                .map(|&p| p.into())
                .collect();
            if !extra.is_empty() {
                out.push(PointOverlap { k, pair: (x, y), extra });
            }
        }
    }
    out
}

/// Projective dimension of the span of the mesh points on `f`.
pub fn fractal_dim(w: &MeshWindow, f: &Fractal) -> Result<i64> {
    let pts = f
        .points
        .iter()
        .map(|&p| w.get(p).ok_or_else(|| Error::Precondition(format!("{p} lies outside the window"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_of(&pts) as i64 - 1)
}

/// Bases `r` whose k-fractal lies entirely inside the window.
pub fn bases_inside(w: &MeshWindow, k: usize) -> Vec<Lat> {
    let offs = fractal_offsets(&w.pin, k);
    let first = *offs.iter().next().unwrap();
    w.iter()
        .map(|(p, _)| p - first)
        .filter(|&r| offs.iter().all(|&o| w.get(r + o).is_some()))
        .collect()
}

/// A generated window holding at least `min_bases` k-fractals.
pub fn window_for(s: &YPin, dim: usize, k: usize, min_bases: usize, seed: u64) -> Result<MeshWindow> {
    let pts = s.points();
    let span = |f: fn(&Lat) -> i64| pts.iter().map(f).max().unwrap() - pts.iter().map(f).min().unwrap();
    let (iw, h) = (span(|p| p.i), span(|p| p.j));
    let rows = if dim == 1 { s.l() } else { s.m() };
    let steps = (k as i64 * h + 2 - rows).max(0);
    let mut width = (k as i64 * iw + 2 * steps * iw + 4) as usize;
    loop {
        let (_, w) = generate_stepped(s, dim, width, seed, steps)?;
        if bases_inside(&w, k).len() >= min_bases {
            return Ok(w);
        }
        width += width / 2;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DimFailure {
    pub k: usize,
    pub base: [i64; 2],
    pub observed: i64,
}

/// Whether every i-fractal inside the window, `i <= d`, spans exactly `i` dimensions.
#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub d: usize,
    /// Number of fractals examined for each `i = 0..=d`.
    pub checked: Vec<usize>,
    pub failures: Vec<DimFailure>,
}

impl GenericityReport {
    pub fn generic(&self) -> bool {
        self.failures.is_empty() && self.checked.iter().all(|&n| n > 0)
    }
}

pub fn genericity_audit(w: &MeshWindow, d: usize) -> Result<GenericityReport> {
    let mut checked = vec![];
    let mut failures = vec![];
    for i in 0..=d {
        let bases = bases_inside(w, i);
        checked.push(bases.len());
        for r in bases {
            let observed = fractal_dim(w, &make_fractal(&w.pin, r, i))?;
            if observed != i as i64 {
                failures.push(DimFailure { k: i, base: r.into(), observed });
            }
        }
    }
    Ok(GenericityReport { d, checked, failures })
}

/// The `(d+1)`-fractal bound on a window, meaningful when the window is d-generic.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub d: usize,
    pub generic: bool,
    pub checked: usize,
    pub violations: Vec<DimFailure>,
}

impl BoundReport {
    /// Fails only when a d-generic window has a `(d+1)`-fractal above dimension `d + 1`.
    pub fn ok(&self) -> bool {
        !self.generic || self.violations.is_empty()
    }
}

pub fn bound_check(w: &MeshWindow, d: usize) -> Result<BoundReport> {
    let generic = genericity_audit(w, d)?.generic();
    let bases = bases_inside(w, d + 1);
    let mut violations = vec![];
    for &r in &bases {
        let observed = fractal_dim(w, &make_fractal(&w.pin, r, d + 1))?;
        if observed > d as i64 + 1 {
            violations.push(DimFailure { k: d + 1, base: r.into(), observed });
        }
    }
    Ok(BoundReport { d, generic, checked: bases.len(), violations })
}

/// Observed fractal dimensions against `min(k, D)` for one pin, dimension and order.
#[derive(Clone, Debug, Serialize)]
pub struct ConjectureRow {
    pub pin: String,
    pub dim: usize,
    pub k: usize,
    pub samples: usize,
    pub matches: usize,
    pub expected: i64,
    pub observed_min: i64,
    pub observed_max: i64,
}

/// Tabulates `d_P` of every k-fractal inside the window for `k = 1..=k_max`.
pub fn conjecture_rows(name: &str, w: &MeshWindow, k_max: usize) -> Result<Vec<ConjectureRow>> {
    let mut rows = vec![];
    for k in 1..=k_max {
        let expected = k.min(w.dim) as i64;
        let dims = bases_inside(w, k)
            .into_iter()
            .map(|r| fractal_dim(w, &make_fractal(&w.pin, r, k)))
            .collect::<Result<Vec<_>>>()?;
        if dims.is_empty() {
            continue;
        }
        rows.push(ConjectureRow {
            pin: name.to_string(),
            dim: w.dim,
            k,
            samples: dims.len(),
            matches: dims.iter().filter(|&&x| x == expected).count(),
            expected,
            observed_min: *dims.iter().min().unwrap(),
            observed_max: *dims.iter().max().unwrap(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pin::{lat, zoo_pin, ZOO};

    #[test]
    fn fixture_sizes() {
        let g = zoo_pin("giraffe").unwrap();
        let sizes: Vec<usize> = (1..=3).map(|k| make_fractal(&g, lat(0, 0), k).len()).collect();
        assert_eq!(sizes, vec![4, 10, 20]);
        assert_eq!(make_fractal(&zoo_pin("elephant").unwrap(), lat(0, 0), 4).len(), 35);
        let one = make_fractal(&g, lat(5, -2), 1);
        assert_eq!(one.points, g.points().iter().map(|&p| p + lat(5, -2)).collect());
        for (k, want) in [(2, 0), (3, 1)] {
            let [fa, fb, _, _] = make_fractal(&g, lat(0, 0), k).sub_fractals().unwrap();
            let meet: BTreeSet<Lat> = fa.points.intersection(&fb.points).copied().collect();
            assert_eq!(meet, make_fractal(&g, g.a + g.b, want).points);
        }
    }

    #[test]
    fn indexed_intersections_are_exact() {
        for e in ZOO {
            for k in 0..=5 {
                assert!(intersection_check(&e.pin(), k).is_empty(), "{} {k}", e.name);
            }
        }
    }

    #[test]
    fn merged_points_can_overlap_more() {
        let penguin = zoo_pin("penguin").unwrap();
        assert!(point_overlaps(&penguin, 2).is_empty());
        let o = point_overlaps(&penguin, 3);
        assert!(o.iter().any(|x| x.extra == vec![[0, 6]]));
        assert!(point_overlaps(&zoo_pin("giraffe").unwrap(), 3).is_empty());
    }

    #[test]
    fn sizes_are_bounded() {
        for e in ZOO {
            for k in 0..=5 {
                assert!(make_fractal(&e.pin(), lat(0, 0), k).len() <= max_size(k));
            }
        }
    }

    #[test]
    fn planar_meshes_are_two_generic() {
        for name in ["pentagram", "gopher", "sideways pentagram"] {
            let s = zoo_pin(name).unwrap();
            let w = window_for(&s, 2, 3, 6, 3).unwrap();
            let audit = genericity_audit(&w, 2).unwrap();
            assert!(audit.generic(), "{name}: {audit:?}");
            assert!(bound_check(&w, 2).unwrap().ok());
        }
    }

    #[test]
    fn ambient_dimension_caps_spans() {
        let s = zoo_pin("giraffe").unwrap();
        let w = window_for(&s, 2, 3, 4, 1).unwrap();
        let audit = genericity_audit(&w, 3).unwrap();
        assert!(audit.failures.iter().all(|f| f.k == 3 && f.observed == 2));
        assert!(!audit.generic());
    }
}
