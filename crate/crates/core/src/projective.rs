//! Points, flats, cross-ratios and multi-ratios in rational projective space.

use crate::arith::{clear_denominators, primitive, ExtRational, Q};
use crate::error::{degenerate, invalid, Result};
use crate::linalg::{det2, independent_pair, nullspace, rank_int, rref, to_q};
use num::{BigInt, One, Zero};
use std::fmt;

/// A point of `RP^D`, stored as a primitive integer vector whose first nonzero entry is positive.
///
/// Affine points are embedded as `[1, x_1, ..., x_D]`, so the canonical rational form
/// (first nonzero coordinate equal to 1) of a finite point reads off its affine coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint(Vec<BigInt>);

impl ProjPoint {
    pub fn new(mut v: Vec<BigInt>) -> Result<Self> {
        if v.len() < 2 {
            return invalid("a projective point needs at least two coordinates");
        }
        if v.iter().all(|x| x.is_zero()) {
            return degenerate("zero vector is not a projective point");
        }
        primitive(&mut v);
        Ok(ProjPoint(v))
    }

    pub fn from_ints(v: &[i64]) -> Result<Self> {
        Self::new(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn from_rationals(v: &[Q]) -> Result<Self> {
        Self::new(clear_denominators(v))
    }

    /// The point `[1, x_1, ..., x_D]`.
    pub fn affine(x: &[Q]) -> Self {
        let mut v = Vec::with_capacity(x.len() + 1);
        v.push(Q::one());
        v.extend_from_slice(x);
        Self::from_rationals(&v).expect("affine point is nonzero")
    }

    pub fn from_ext(x: &ExtRational) -> Self {
        match x {
            ExtRational::Finite(x) => Self::affine(std::slice::from_ref(x)),
            ExtRational::Infinity => ProjPoint(vec![BigInt::zero(), BigInt::one()]),
        }
    }

    /// Reads a point of `RP^1` back as an element of `Q ∪ {∞}`.
    pub fn to_ext(&self) -> Result<ExtRational> {
        if self.0.len() != 2 {
            return invalid("only points of RP^1 have a single affine parameter");
        }
        ExtRational::from_ratio(self.0[1].clone(), self.0[0].clone())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Rational coordinates scaled so the first nonzero coordinate is 1.
    pub fn canonical(&self) -> Vec<Q> {
        let lead = self.0.iter().find(|x| !x.is_zero()).expect("nonzero point").clone();
        self.0.iter().map(|x| Q::new(x.clone(), lead.clone())).collect()
    }

    /// Sum of coordinate bit lengths, a rough measure of arithmetic cost.
    pub fn height(&self) -> u64 {
        self.0.iter().map(|x| x.bits()).sum()
    }

    /// Linear combination `sum c_i v_i` of representatives.
    pub fn combine(terms: &[(&BigInt, &ProjPoint)]) -> Result<Self> {
        let n = terms[0].1.0.len();
        let mut v = vec![BigInt::zero(); n];
        for (c, p) in terms {
            for (x, y) in v.iter_mut().zip(&p.0) {
                *x += *c * y;
            }
        }
        Self::new(v)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.canonical().iter().map(crate::arith::fmt_q).collect();
        write!(f, "[{}]", parts.join(" : "))
    }
}

/// Rank of the vectors representing the given points.
pub fn rank_of(points: &[&ProjPoint]) -> usize {
    let rows: Vec<Vec<BigInt>> = points.iter().map(|p| p.0.clone()).collect();
    rank_int(&rows)
}

pub fn collinear(points: &[&ProjPoint]) -> bool {
    rank_of(points) <= 2
}

pub fn coplanar(points: &[&ProjPoint]) -> bool {
    rank_of(points) <= 3
}

/// A projective subspace stored by the reduced row echelon basis of its linear span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flat {
    basis: Vec<Vec<Q>>,
    pivots: Vec<usize>,
    ambient: usize,
}

impl Flat {
    pub fn from_vectors(rows: Vec<Vec<Q>>, ambient: usize) -> Self {
        let (basis, pivots) = rref(rows);
        Flat { basis, pivots, ambient }
    }

    pub fn span(points: &[&ProjPoint]) -> Result<Self> {
        let Some(first) = points.first() else {
            return invalid("span of no points");
        };
        let n = first.0.len();
        if points.iter().any(|p| p.0.len() != n) {
            return invalid("points of different dimensions");
        }
        Ok(Self::from_vectors(points.iter().map(|p| to_q(&p.0)).collect(), n))
    }

    pub fn whole(ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| (0..ambient).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
        Self::from_vectors(rows, ambient)
    }

    /// Rank of the underlying linear subspace.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Projective dimension, `-1` for the empty flat.
    pub fn dim(&self) -> isize {
        self.basis.len() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        let mut rows = self.basis.clone();
        rows.push(to_q(&p.0));
        rref(rows).0.len() == self.basis.len()
    }

    pub fn contains_flat(&self, other: &Flat) -> bool {
        self.join(other).rank() == self.rank()
    }

    pub fn join(&self, other: &Flat) -> Flat {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Flat::from_vectors(rows, self.ambient)
    }

    /// Vectors annihilating the flat.
    fn annihilator(&self) -> Vec<Vec<Q>> {
        nullspace(self.basis.clone(), self.ambient)
    }

    pub fn meet(&self, other: &Flat) -> Flat {
        let mut rows = self.annihilator();
        rows.extend(other.annihilator());
        if rows.is_empty() {
            return Flat::whole(self.ambient);
        }
        Flat::from_vectors(nullspace(rows, self.ambient), self.ambient)
    }

    /// The unique point of a zero-dimensional flat.
    pub fn as_point(&self) -> Result<ProjPoint> {
        match self.basis.len() {
            1 => ProjPoint::from_rationals(&self.basis[0]),
            0 => degenerate("empty intersection"),
            k => degenerate(format!("intersection has projective dimension {}", k - 1)),
        }
    }
}

pub fn join(p: &ProjPoint, q: &ProjPoint) -> Result<Flat> {
    if p == q {
        return degenerate("join of coincident points");
    }
    Flat::span(&[p, q])
}

/// Intersection point of the lines `p1 p2` and `p3 p4`, which must be distinct and coplanar.
pub fn meet_lines(p1: &ProjPoint, p2: &ProjPoint, p3: &ProjPoint, p4: &ProjPoint) -> Result<ProjPoint> {
    if p1 == p2 || p3 == p4 {
        return degenerate("line through coincident points");
    }
    let n = p1.0.len();
    let cols = [&p1.0, &p2.0, &p3.0, &p4.0];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let rows = [i, j, k];
                let minor = |skip: usize| -> BigInt {
                    let c: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
                    let e = |r: usize, c: usize| &cols[c][rows[r]];
                    e(0, c[0]) * (e(1, c[1]) * e(2, c[2]) - e(1, c[2]) * e(2, c[1]))
                        - e(0, c[1]) * (e(1, c[0]) * e(2, c[2]) - e(1, c[2]) * e(2, c[0]))
                        + e(0, c[2]) * (e(1, c[0]) * e(2, c[1]) - e(1, c[1]) * e(2, c[0]))
                };
                let x: Vec<BigInt> = (0..4)
                    .map(|s| if s % 2 == 0 { minor(s) } else { -minor(s) })
                    .collect();
                if x.iter().all(|v| v.is_zero()) {
                    continue;
                }
                let v: Vec<BigInt> = (0..n).map(|r| &x[0] * &p1.0[r] + &x[1] * &p2.0[r]).collect();
                let w: Vec<BigInt> = (0..n).map(|r| &x[2] * &p3.0[r] + &x[3] * &p4.0[r]).collect();
                if v.iter().zip(&w).any(|(a, b)| !(a + b).is_zero()) {
                    return degenerate("lines do not meet");
                }
                if v.iter().all(|a| a.is_zero()) {
                    return degenerate("lines coincide");
                }
                return ProjPoint::new(v);
            }
        }
    }
    degenerate("lines coincide")
}

/// Affine parameters of points on a line, in the chart given by the first two basis rows
/// `u, w` of the line: the point `s u + t w` has parameter `t / s`.
pub fn affine_params(line: &Flat, points: &[&ProjPoint]) -> Result<Vec<ExtRational>> {
    if line.rank() != 2 {
        return invalid("affine parameters need a line");
    }
    let (c0, c1) = (line.pivots[0], line.pivots[1]);
    points
        .iter()
        .map(|p| {
            let s = Q::from_integer(p.0[c0].clone());
            let t = Q::from_integer(p.0[c1].clone());
            let on_line = (0..line.ambient).all(|k| {
                Q::from_integer(p.0[k].clone()) == &s * &line.basis[0][k] + &t * &line.basis[1][k]
            });
            if !on_line {
                return invalid(format!("point {p} is not on the line"));
            }
            ExtRational::from_ratio(t.to_integer(), s.to_integer())
        })
        .collect()
}

/// The cross-ratio `(x1-x2)(x3-x4) / ((x2-x3)(x4-x1))`; a single `∞` cancels its two factors.
pub fn cross_ratio(x: [&ExtRational; 4]) -> Result<ExtRational> {
    if x.iter().filter(|v| v.is_infinite()).count() > 1 {
        return invalid("cross-ratio with more than one infinite argument");
    }
    let h: Vec<[Q; 2]> = x.iter().map(|v| v.homogeneous()).collect();
    let d = |a: usize, b: usize| &h[a][0] * &h[b][1] - &h[a][1] * &h[b][0];
    let num = d(0, 1) * d(2, 3);
    let den = d(1, 2) * d(3, 0);
    ratio_q(num, den)
}

fn ratio_q(num: Q, den: Q) -> Result<ExtRational> {
    match (num.is_zero(), den.is_zero()) {
        (true, true) => degenerate("0/0 in cross-ratio"),
        (false, true) => Ok(ExtRational::Infinity),
        _ => Ok(ExtRational::Finite(num / den)),
    }
}

/// The affine ratio factor `P1P2 / P2P3` of three collinear points, as a pair (numerator, denominator)
/// built from a fixed choice of representatives. Products over a closed chain are chart-independent.
fn ratio_factor(prev: &ProjPoint, mid: &ProjPoint, next: &ProjPoint) -> Result<(BigInt, BigInt)> {
    let Some((s, t)) = independent_pair(&prev.0, &next.0) else {
        return degenerate("coincident outer points in a ratio factor");
    };
    let (u, m, w) = (&prev.0, &mid.0, &next.0);
    let dd = det2(&u[s], &u[t], &w[s], &w[t]);
    let alpha = det2(&m[s], &m[t], &w[s], &w[t]);
    let beta = det2(&u[s], &u[t], &m[s], &m[t]);
    let on_line = (0..u.len()).all(|k| &dd * &m[k] == &alpha * &u[k] + &beta * &w[k]);
    if !on_line {
        return invalid("ratio factor of non-collinear points");
    }
    Ok((beta, alpha))
}

/// The multi-ratio `prod_i P_{2i-1}P_{2i} / P_{2i}P_{2i+1}` (indices cyclic) of `2k` points,
/// where every consecutive triple starting at an odd position is collinear.
pub fn multi_ratio(points: &[&ProjPoint]) -> Result<ExtRational> {
    let n = points.len();
    if n < 4 || !n.is_multiple_of(2) {
        return invalid("multi-ratio needs an even number of at least four points");
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in (0..n).step_by(2) {
        let (a, b) = ratio_factor(points[i], points[i + 1], points[(i + 2) % n])?;
        num *= a;
        den *= b;
    }
    if num.is_zero() && den.is_zero() {
        return degenerate("product of zero and infinite ratio factors");
    }
    ExtRational::from_ratio(num, den)
}

/// Cross-ratio of four collinear points, `[P1,P2,P3,P4]`.
pub fn cross_ratio_points(p: [&ProjPoint; 4]) -> Result<ExtRational> {
    multi_ratio(&p)
}

/// Cross-ratio of four collinear points computed through affine parameters on their line.
pub fn cross_ratio_by_params(p: [&ProjPoint; 4]) -> Result<ExtRational> {
    let line = Flat::span(&p)?;
    if line.rank() != 2 {
        return invalid("points are not on a single line");
    }
    let t = affine_params(&line, &p)?;
    cross_ratio([&t[0], &t[1], &t[2], &t[3]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qi};

    fn e(n: i64) -> ExtRational {
        ExtRational::int(n)
    }

    fn pt(x: i64, y: i64) -> ProjPoint {
        ProjPoint::affine(&[qi(x), qi(y)])
    }

    #[test]
    fn cross_ratio_reference_values() {
        assert_eq!(cross_ratio([&e(0), &e(1), &e(2), &ExtRational::Infinity]).unwrap(), e(-1));
        assert_eq!(cross_ratio([&e(1), &e(2), &e(3), &e(4)]).unwrap(), ExtRational::frac(-1, 3));
        let inf = ExtRational::Infinity;
        assert!(cross_ratio([&e(0), &e(1), &inf, &inf]).is_err());
    }

    #[test]
    fn multi_ratio_of_six_collinear_points() {
        let p: Vec<ProjPoint> = (0..6).map(|i| ProjPoint::from_ext(&e(i))).collect();
        let r: Vec<&ProjPoint> = p.iter().collect();
        assert_eq!(multi_ratio(&r).unwrap(), ExtRational::frac(-1, 5));
    }

    #[test]
    fn multi_ratio_matches_cross_ratio_for_four_points() {
        let xs = [e(3), ExtRational::frac(1, 2), e(-2), e(7)];
        let p: Vec<ProjPoint> = xs.iter().map(ProjPoint::from_ext).collect();
        let direct = cross_ratio([&xs[0], &xs[1], &xs[2], &xs[3]]).unwrap();
        assert_eq!(cross_ratio_points([&p[0], &p[1], &p[2], &p[3]]).unwrap(), direct);
    }

    #[test]
    fn ratio_factor_conventions() {
        let p: Vec<ProjPoint> = [0, 0, 1, 2].iter().map(|&i| ProjPoint::from_ext(&e(i))).collect();
        // P1 = P2 gives a zero factor, which is fine on its own.
        let r = multi_ratio(&[&p[0], &p[1], &p[2], &p[3]]).unwrap();
        assert_eq!(r, e(0));
        // P1 = P3 leaves the factor undefined.
        let p2: Vec<ProjPoint> = [0, 1, 0, 2].iter().map(|&i| ProjPoint::from_ext(&e(i))).collect();
        assert!(multi_ratio(&[&p2[0], &p2[1], &p2[2], &p2[3]]).is_err());
    }

    #[test]
    fn affine_params_chart() {
        let u = ProjPoint::from_ints(&[1, 0, 0]).unwrap();
        let w = ProjPoint::from_ints(&[0, 1, 0]).unwrap();
        let line = Flat::span(&[&u, &w]).unwrap();
        let p = ProjPoint::from_ints(&[1, 3, 0]).unwrap();
        let t = affine_params(&line, &[&u, &w, &p]).unwrap();
        assert_eq!(t, vec![e(0), ExtRational::Infinity, e(3)]);
        let off = ProjPoint::from_ints(&[1, 1, 1]).unwrap();
        assert!(affine_params(&line, &[&off]).is_err());
    }

    #[test]
    fn meet_of_two_plane_lines() {
        let m = meet_lines(&pt(-1, 1), &pt(1, 1), &pt(0, 0), &pt(2, 4)).unwrap();
        assert_eq!(m, ProjPoint::affine(&[q(1, 2), qi(1)]));
        let via_flats = join(&pt(-1, 1), &pt(1, 1)).unwrap().meet(&join(&pt(0, 0), &pt(2, 4)).unwrap());
        assert_eq!(via_flats.as_point().unwrap(), m);
    }

    #[test]
    fn skew_lines_do_not_meet() {
        let a = ProjPoint::from_ints(&[1, 0, 0, 0]).unwrap();
        let b = ProjPoint::from_ints(&[0, 1, 0, 0]).unwrap();
        let c = ProjPoint::from_ints(&[0, 0, 1, 0]).unwrap();
        let d = ProjPoint::from_ints(&[0, 0, 0, 1]).unwrap();
        assert!(meet_lines(&a, &b, &c, &d).is_err());
        assert!(join(&a, &b).unwrap().meet(&join(&c, &d).unwrap()).is_empty());
    }

    #[test]
    fn canonical_scaling() {
        let p = ProjPoint::from_ints(&[0, -2, 4]).unwrap();
        assert_eq!(p.canonical(), vec![qi(0), qi(1), qi(-2)]);
        assert_eq!(ProjPoint::from_ints(&[0, 2, -4]).unwrap(), p);
    }
}
