//! `(I, J)`-maps on polygons: hyperplane intersections, the two-subspace shortcut and the link to
//! every `pq`-th row of a horizontal mesh.

use crate::error::{invalid, Error, Result};
use crate::mesh::MeshWindow;
use crate::pin::{partial_sums, IJCorrespondence};
use crate::projective::{join, Flat, ProjPoint};
use std::collections::BTreeMap;

/// A polygon segment: vertices at consecutive indices from `lo`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    pub lo: i64,
    pub points: Vec<ProjPoint>,
}

impl Polygon {
    pub fn get(&self, i: i64) -> Option<&ProjPoint> {
        if i < self.lo {
            return None;
        }
        self.points.get((i - self.lo) as usize)
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.points.len() as i64 - 1
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.dim())
    }

    pub fn from_row(w: &MeshWindow, j: i64) -> Option<Polygon> {
        w.rows.get(&j).map(|r| Polygon { lo: r.i_lo, points: r.points.clone() })
    }
}

fn span_at(a: &Polygon, base: i64, offsets: &[i64]) -> Option<Result<Flat>> {
    let pts: Option<Vec<&ProjPoint>> = offsets.iter().map(|&o| a.get(base + o)).collect();
    pts.map(|p| Flat::span(&p))
}

fn distinct(v: &[i64]) -> bool {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.windows(2).all(|w| w[0] != w[1])
}

/// `T_{I,J}(A)_x = H_{x + tau_0} ∩ ... ∩ H_{x + tau_{D-1}}` with `H_y = <A_{y + sigma}>` over the
/// partial sums `sigma` of `I` and `tau` of `J`; returns every `x` whose inputs are all present.
pub fn ij_map_hyperplanes(a: &Polygon, i_steps: &[i64], j_steps: &[i64]) -> Result<Polygon> {
    let dim = a.dim();
    if i_steps.len() != j_steps.len() || i_steps.len() + 1 != dim {
        return invalid(format!("I and J need {} entries in dimension {dim}", dim.saturating_sub(1)));
    }
    let (sig, tau) = (partial_sums(i_steps), partial_sums(j_steps));
    if !distinct(&sig) || !distinct(&tau) {
        return invalid("partial sums of I and of J must be distinct");
    }
    let reach = |v: &[i64]| (*v.iter().min().unwrap(), *v.iter().max().unwrap());
    let ((s0, s1), (t0, t1)) = (reach(&sig), reach(&tau));
    let (lo, hi) = (a.lo - s0 - t0, a.hi() - s1 - t1);
    if hi < lo {
        return invalid("polygon segment is too short for these steps");
    }
    let mut planes: BTreeMap<i64, Flat> = BTreeMap::new();
    let mut points = vec![];
    for x in lo..=hi {
        let mut acc: Option<Flat> = None;
        for &t in &tau {
            let y = x + t;
            if let std::collections::btree_map::Entry::Vacant(e) = planes.entry(y) {
                let h = span_at(a, y, &sig).expect("range checked")?;
                if h.dim() != dim as isize - 1 {
                    return Err(Error::Degenerate(format!("hyperplane at {y} has dimension {}", h.dim())));
                }
                e.insert(h);
            }
            let h = &planes[&y];
            acc = Some(match acc {
                None => h.clone(),
                Some(f) => f.meet(h),
            });
        }
        points.push(acc.unwrap().as_point().map_err(|e| Error::Degenerate(format!("vertex {x}: {e}")))?);
    }
    Ok(Polygon { lo, points })
}

/// The shortcut for `I = (s, ..., s)` and `J = (s, ..., t, ..., s)` with `t` at position `k`:
/// `<A_{x+(k-1)s}, ..., A_{x+(D-1)s}> ∩ <A_{x+(D-2)s+t}, ..., A_{x+(D+k-2)s+t}>`.
pub fn ij_map_shortcut(a: &Polygon, s: i64, t: i64, k: usize) -> Result<Polygon> {
    let dim = a.dim() as i64;
    let k = k as i64;
    if k < 1 || k > dim - 1 {
        return invalid(format!("position {k} is outside 1..{}", dim - 1));
    }
    let first: Vec<i64> = (k - 1..=dim - 1).map(|n| n * s).collect();
    let second: Vec<i64> = (dim - 2..=dim + k - 2).map(|n| n * s + t).collect();
    let all: Vec<i64> = first.iter().chain(&second).copied().collect();
    let (lo, hi) = (a.lo - all.iter().min().unwrap(), a.hi() - all.iter().max().unwrap());
    if hi < lo {
        return invalid("polygon segment is too short for these steps");
    }
    let points = (lo..=hi)
        .map(|x| {
            let f = span_at(a, x, &first).expect("range checked")?;
            let g = if second.len() == 2 {
                join(a.get(x + second[0]).unwrap(), a.get(x + second[1]).unwrap())?
            } else {
                span_at(a, x, &second).expect("range checked")?
            };
            f.meet(&g).as_point().map_err(|e| Error::Degenerate(format!("vertex {x}: {e}")))
        })
        .collect::<Result<_>>()?;
    Ok(Polygon { lo, points })
}

/// When `I` is constant and `J` differs from it in one entry, returns `(s, t, k)`.
pub fn shortcut_params(i_steps: &[i64], j_steps: &[i64]) -> Option<(i64, i64, usize)> {
    let s = *i_steps.first()?;
    if i_steps.iter().any(|&x| x != s) || j_steps.len() != i_steps.len() {
        return None;
    }
    let odd: Vec<usize> = (0..j_steps.len()).filter(|&n| j_steps[n] != s).collect();
    match odd.as_slice() {
        [k] => Some((s, j_steps[*k], k + 1)),
        _ => None,
    }
}

/// Computes `T_{I,J}` by hyperplanes and, when the shortcut applies, checks it agrees.
pub fn ij_map(a: &Polygon, i_steps: &[i64], j_steps: &[i64]) -> Result<Polygon> {
    let b = ij_map_hyperplanes(a, i_steps, j_steps)?;
    if let Some((s, t, k)) = shortcut_params(i_steps, j_steps) {
        let c = ij_map_shortcut(a, s, t, k)?;
        for x in b.lo..=b.hi() {
            if let Some(p) = c.get(x) {
                if p != b.get(x).unwrap() {
                    return Err(Error::CheckFailed(format!("shortcut disagrees with hyperplanes at {x}")));
                }
            }
        }
    }
    Ok(b)
}

/// `T_{J*,I*}(T_{I,J}(A))_y` equals `A_{y + sum I + sum J}`; returns how many vertices were compared
/// and the indices where this fails.
pub fn inverse_check(a: &Polygon, i_steps: &[i64], j_steps: &[i64]) -> Result<(usize, Vec<i64>)> {
    let b = ij_map(a, i_steps, j_steps)?;
    let rev = |v: &[i64]| v.iter().rev().copied().collect::<Vec<_>>();
    let c = ij_map(&b, &rev(j_steps), &rev(i_steps))?;
    let delta: i64 = i_steps.iter().sum::<i64>() + j_steps.iter().sum::<i64>();
    let mut fails = vec![];
    let mut n = 0;
    for y in c.lo..=c.hi() {
        if let Some(p) = a.get(y + delta) {
            n += 1;
            if p != c.get(y).unwrap() {
                fails.push(y);
            }
        }
    }
    Ok((n, fails))
}

/// Compares row `j + row_step` of a mesh with `T_{I,J}` of row `j`; returns `(compared, mismatches)`.
pub fn row_skip_check(w: &MeshWindow, corr: &IJCorrespondence, j: i64) -> Result<(usize, Vec<i64>)> {
    let a = Polygon::from_row(w, j).ok_or_else(|| Error::Precondition(format!("row {j} is missing")))?;
    let target = Polygon::from_row(w, j + corr.row_step)
        .ok_or_else(|| Error::Precondition(format!("row {} is missing", j + corr.row_step)))?;
    let b = ij_map(&a, &corr.i_steps, &corr.j_steps)?;
    let mut fails = vec![];
    let mut n = 0;
    for x in b.lo..=b.hi() {
        if let Some(p) = target.get(x + corr.shift) {
            n += 1;
            if p != b.get(x).unwrap() {
                fails.push(x);
            }
        }
    }
    Ok((n, fails))
}

/// The short diagonal hyperplane map in three dimensions:
/// `C_i = <A_{i-1}, A_{i+1}> ∩ <A_{i-2}, A_i, A_{i+2}>`.
pub fn short_diagonal_map(a: &Polygon) -> Result<Polygon> {
    if a.dim() != 3 {
        return invalid("the short diagonal map acts on polygons in 3-space");
    }
    let (lo, hi) = (a.lo + 2, a.hi() - 2);
    if hi < lo {
        return invalid("polygon segment is too short");
    }
    let points = (lo..=hi)
        .map(|i| {
            let line = join(a.get(i - 1).unwrap(), a.get(i + 1).unwrap())?;
            let plane = span_at(a, i, &[-2, 0, 2]).unwrap()?;
            line.meet(&plane).as_point()
        })
        .collect::<Result<_>>()?;
    Ok(Polygon { lo, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, Sampler};
    use crate::pin::zoo_pin;

    fn random_polygon(dim: usize, n: usize, seed: u64) -> Polygon {
        let mut rng = Sampler::new(seed, 0);
        Polygon { lo: 0, points: (0..n).map(|_| rng.point(dim).unwrap()).collect() }
    }

    #[test]
    fn shortcut_matches_and_inverse_holds() {
        let a = random_polygon(3, 16, 1);
        let b = ij_map(&a, &[2, 2], &[-1, 2]).unwrap();
        let c = short_diagonal_map(&a).unwrap();
        for x in b.lo..=b.hi() {
            assert_eq!(b.get(x), c.get(x + 2));
        }
        let (n, fails) = inverse_check(&a, &[2, 2], &[1, 1]).unwrap();
        assert!(n >= 4 && fails.is_empty());
        let (n, fails) = inverse_check(&a, &[1, 2], &[1, 1]).unwrap();
        assert!(n >= 4 && fails.is_empty());
    }

    #[test]
    fn short_diagonal_every_second_row() {
        let s = zoo_pin("short diagonal").unwrap();
        let corr = s.ij_correspondence().unwrap();
        assert_eq!((corr.row_step, corr.normalized_j()), (2, vec![1, 1]));
        let mut w = generate(&s, 3, 24, 5).unwrap();
        w.step(4).unwrap();
        let j0 = *w.rows.keys().next().unwrap();
        let (n, fails) = row_skip_check(&w, &corr, j0).unwrap();
        assert!(n >= 10 && fails.is_empty(), "{n} {fails:?}");
        let a = Polygon::from_row(&w, j0).unwrap();
        let c = short_diagonal_map(&a).unwrap();
        let next = Polygon::from_row(&w, j0 + 2).unwrap();
        let hits = (c.lo..=c.hi()).filter(|&i| next.get(i + corr.shift - 2).is_some_and(|p| p == c.get(i).unwrap())).count();
        assert!(hits >= 10);
    }

    #[test]
    fn giraffe_every_third_row() {
        let s = zoo_pin("giraffe").unwrap();
        let corr = s.ij_correspondence().unwrap();
        assert_eq!((corr.row_step, corr.i_steps.clone(), corr.normalized_j()), (3, vec![2, 2, 2], vec![2, 1, 1]));
        let mut w = generate(&s, 4, 30, 2).unwrap();
        w.step(4).unwrap();
        let j0 = *w.rows.keys().next().unwrap();
        let (n, fails) = row_skip_check(&w, &corr, j0).unwrap();
        assert!(n >= 10 && fails.is_empty(), "{n} {fails:?}");
    }
}
