//! Filtrations of the lattice strip used to build generic meshes.
//!
//! For a pin normalized to `a_2 = 0` and `m = d_2`, the strip is `R = Z x {1..m}`. A filtration is a
//! family of finite sets `H_t` cut out of `R` by a band `lo_j <= phi(r) - t < hi_j` together with two
//! maps `f, g` sending each circuit to one of its members. Moving from `H_t` to `H_{t+1}` loses the
//! points `f(I)` and gains `g(I)` for a bijective family of circuits `I`.

use crate::error::{precondition, Error, Result};
use crate::pin::{lat, HullCase, Lat, YPin};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, HashSet};

/// A member of a circuit, as a combination of pin points.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    A,
    B,
    C,
    D,
    AC,
    AD,
    BC,
    BD,
}

impl Role {
    pub fn offset(self, s: &YPin) -> Lat {
        match self {
            Role::A => s.a,
            Role::B => s.b,
            Role::C => s.c,
            Role::D => s.d,
            Role::AC => s.a + s.c,
            Role::AD => s.a + s.d,
            Role::BC => s.b + s.c,
            Role::BD => s.b + s.d,
        }
    }

    /// The role played by the same point in the time-reversed pin.
    fn reversed(self) -> Role {
        match self {
            Role::A => Role::D,
            Role::B => Role::C,
            Role::C => Role::B,
            Role::D => Role::A,
            Role::AC => Role::BD,
            Role::AD => Role::AD,
            Role::BC => Role::BC,
            Role::BD => Role::AC,
        }
    }
}

/// The three kinds of circuit: the lines `{r+a, r+b, r+c}`, `{r+b, r+c, r+d}` and the planes
/// `{r+a+c, r+a+d, r+b+c, r+b+d}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Kind {
    L1,
    L2,
    L3,
}

pub const KINDS: [Kind; 3] = [Kind::L1, Kind::L2, Kind::L3];

impl Kind {
    pub fn roles(self) -> &'static [Role] {
        match self {
            Kind::L1 => &[Role::A, Role::B, Role::C],
            Kind::L2 => &[Role::B, Role::C, Role::D],
            Kind::L3 => &[Role::AC, Role::AD, Role::BC, Role::BD],
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Base rows `r_2` with `lo < r_2 <= hi` whose circuit lies inside the strip.
    pub fn base_rows(self, s: &YPin) -> (i64, i64) {
        let m = s.d.j;
        match self {
            Kind::L1 => (-s.a.j, m - s.c.j),
            Kind::L2 => (-s.b.j, m - s.d.j),
            Kind::L3 => (-s.a.j - s.c.j, m - s.b.j - s.d.j),
        }
    }

    fn reversed(self) -> Kind {
        match self {
            Kind::L1 => Kind::L2,
            Kind::L2 => Kind::L1,
            Kind::L3 => Kind::L3,
        }
    }
}

/// A circuit of the strip, identified by its kind and base point `r`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Circuit {
    pub kind: Kind,
    pub r: Lat,
}

/// The `(f, g)` choice for each circuit kind.
pub type Table = [(Role, Role); 3];

#[derive(Clone, Debug, Serialize)]
pub struct Filtration {
    /// The pin, translated so that `a_2 = 0`.
    pub pin: YPin,
    pub case: HullCase,
    pub table: Table,
    pub phi: (i64, i64),
    /// Band bounds for rows `1..=m`, stored at index `j - 1`.
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    /// Whether the lose sets can be rebuilt from later sets, so that the sweep runs backwards too.
    pub backward: bool,
}

/// Result of checking the seven filtration conditions on a finite range of `t`.
#[derive(Clone, Debug, Serialize)]
pub struct FiltrationAudit {
    pub conditions: [bool; 7],
    pub size: usize,
    pub size_ok: bool,
    pub failures: Vec<String>,
}

impl FiltrationAudit {
    /// Conditions (1)-(6) and the size of `H_t`: enough to build meshes forwards in time.
    pub fn forward_ok(&self) -> bool {
        self.conditions[..6].iter().all(|&c| c) && self.size_ok
    }

    pub fn all_ok(&self) -> bool {
        self.forward_ok() && self.conditions[6]
    }
}

fn perp(u: Lat) -> (i64, i64) {
    let g = crate::arith::gcd_i64(u.i, u.j).abs();
    (-u.j / g, u.i / g)
}

fn ev(phi: (i64, i64), r: Lat) -> i64 {
    phi.0 * r.i + phi.1 * r.j
}

fn neg(phi: (i64, i64)) -> (i64, i64) {
    (-phi.0, -phi.1)
}

impl Filtration {
    /// Builds a filtration for any valid pin.
    pub fn build(pin: &YPin) -> Result<Filtration> {
        let s = pin.row_normalized();
        let case = s.hull_case();
        let f = match case {
            HullCase::LongDiagonal | HullCase::TriangleB | HullCase::LongSide => Self::direct(&s, case),
            HullCase::TriangleC => Self::direct(&s.time_reverse().row_normalized(), HullCase::TriangleB)
                .map(|r| r.reversed(&s, case)),
            HullCase::Boundary => Self::search_band(&s),
        }?;
        let audit = f.audit(3 * f.m());
        if !audit.forward_ok() {
            return Err(Error::CheckFailed(format!("filtration for {pin} fails: {:?}", audit.failures)));
        }
        Ok(f)
    }

    fn direct(s: &YPin, case: HullCase) -> Result<Filtration> {
        use Role::*;
        let m = s.m() as usize;
        let (table, phi, lo, hi): (Table, _, Vec<i64>, Vec<i64>) = match case {
            HullCase::LongDiagonal => {
                let mut phi = perp(s.d - s.a);
                if ev(phi, s.b) > ev(phi, s.a) {
                    phi = neg(phi);
                }
                let (lo, hi) = (ev(phi, s.b), ev(phi, s.c));
                ([(B, C), (B, C), (BD, AC)], phi, vec![lo; m], vec![hi; m])
            }
            HullCase::TriangleB => {
                let mut phi = perp(s.b - s.a);
                if ev(phi, s.c) > ev(phi, s.a) {
                    phi = neg(phi);
                }
                let (pa, pc, pd) = (ev(phi, s.a), ev(phi, s.c), ev(phi, s.d));
                let lo = (1..=m as i64).map(|j| if j <= s.c.j { pc } else { pd - (pa - pc) }).collect();
                ([(C, A), (C, D), (AC, AD)], phi, lo, vec![pd; m])
            }
            HullCase::LongSide => {
                let mut phi = perp(s.c - s.b);
                if ev(phi, s.a) < ev(phi, s.b) {
                    phi = neg(phi);
                }
                let (pa, pb, pd) = (ev(phi, s.a), ev(phi, s.b), ev(phi, s.d));
                let lo = (1..=m as i64)
                    .map(|j| if j <= s.b.j { pa } else if j <= s.c.j { pb } else { pd })
                    .collect();
                ([(C, A), (B, D), (BC, AD)], phi, lo, vec![pa + pd - pb; m])
            }
            _ => unreachable!(),
        };
        if phi.0 == 0 {
            return precondition("band is horizontal");
        }
        Ok(Filtration { pin: *s, case, table, phi, lo, hi, backward: true })
    }

    /// Transports a filtration of the reversed pin back through `(i, j) -> (i, m + 1 - j)`.
    fn reversed(&self, s: &YPin, case: HullCase) -> Filtration {
        let m = s.m();
        let mut table = self.table;
        for k in KINDS {
            let (f, g) = self.table[k.index()];
            table[k.reversed().index()] = (f.reversed(), g.reversed());
        }
        let shift = self.phi.1 * (m + 1);
        let lo = (1..=m).map(|j| self.lo[(m - j) as usize] - shift).collect();
        let hi = (1..=m).map(|j| self.hi[(m - j) as usize] - shift).collect();
        Filtration { pin: *s, case, table, phi: (self.phi.0, -self.phi.1), lo, hi, backward: self.backward }
    }

    pub fn m(&self) -> i64 {
        self.pin.m()
    }

    pub fn phi_of(&self, r: Lat) -> i64 {
        ev(self.phi, r)
    }

    pub fn contains(&self, r: Lat, t: i64) -> bool {
        if r.j < 1 || r.j > self.m() {
            return false;
        }
        let x = self.phi_of(r) - t;
        let k = (r.j - 1) as usize;
        self.lo[k] <= x && x < self.hi[k]
    }

    /// `r` lies in `H_t` exactly for `first <= t <= last`.
    pub fn lifetime(&self, r: Lat) -> (i64, i64) {
        let k = (r.j - 1) as usize;
        let x = self.phi_of(r);
        (x - self.hi[k] + 1, x - self.lo[k])
    }

    pub fn h(&self, t: i64) -> BTreeSet<Lat> {
        let mut out = BTreeSet::new();
        let e = self.phi.0;
        for j in 1..=self.m() {
            let k = (j - 1) as usize;
            let base = t - self.phi.1 * j;
            let (x0, x1) = (self.lo[k] + base, self.hi[k] + base - 1);
            let (i0, i1) = if e > 0 {
                (x0.div_euclid(e) + (x0.rem_euclid(e) != 0) as i64, x1.div_euclid(e))
            } else {
                let e = -e;
                ((-x1).div_euclid(e) + ((-x1).rem_euclid(e) != 0) as i64, (-x0).div_euclid(e))
            };
            out.extend((i0..=i1).map(|i| lat(i, j)));
        }
        out
    }

    pub fn members(&self, c: &Circuit) -> Vec<Lat> {
        c.kind.roles().iter().map(|ro| c.r + ro.offset(&self.pin)).collect()
    }

    pub fn f(&self, c: &Circuit) -> Lat {
        c.r + self.table[c.kind.index()].0.offset(&self.pin)
    }

    pub fn g(&self, c: &Circuit) -> Lat {
        c.r + self.table[c.kind.index()].1.offset(&self.pin)
    }

    fn preimages(&self, r: Lat, pick: impl Fn(&(Role, Role)) -> Role) -> Vec<Circuit> {
        KINDS
            .iter()
            .filter_map(|&kind| {
                let base = r - pick(&self.table[kind.index()]).offset(&self.pin);
                let (lo, hi) = kind.base_rows(&self.pin);
                (lo < base.j && base.j <= hi).then_some(Circuit { kind, r: base })
            })
            .collect()
    }

    /// The circuit `I` with `f(I) = r`.
    pub fn f_inv(&self, r: Lat) -> Option<Circuit> {
        let v = self.preimages(r, |x| x.0);
        (v.len() == 1).then(|| v[0])
    }

    /// The circuit `I` with `g(I) = r`.
    pub fn g_inv(&self, r: Lat) -> Option<Circuit> {
        let v = self.preimages(r, |x| x.1);
        (v.len() == 1).then(|| v[0])
    }

    /// Checks conditions (1)-(7) and `|H_t| = D(S) + 1` for `-span <= t <= span`.
    pub fn audit(&self, span: i64) -> FiltrationAudit {
        let mut ok = [true; 7];
        let mut failures = Vec::new();
        let mut fail = |k: usize, msg: String, ok: &mut [bool; 7]| {
            if ok[k] {
                failures.push(format!("({}) {msg}", k + 1));
            }
            ok[k] = false;
        };
        for k in KINDS {
            let (f, g) = self.table[k.index()];
            if f == g || !k.roles().contains(&f) || !k.roles().contains(&g) {
                fail(0, format!("table entry for {k:?}"), &mut ok);
            }
        }
        let expected = (self.pin.d() + 1) as usize;
        let mut size = 0;
        let mut size_ok = true;
        for t in -span..=span {
            let ht = self.h(t);
            let ht1 = self.h(t + 1);
            if t == 0 {
                size = ht.len();
            }
            size_ok &= ht.len() == expected;
            for &r in ht.iter().chain(ht1.iter()) {
                if self.f_inv(r).is_none() || self.g_inv(r).is_none() {
                    fail(1, format!("no unique preimage of {r}"), &mut ok);
                }
                let (first, last) = self.lifetime(r);
                if first > last || !(first..=last).all(|s| self.contains(r, s)) {
                    fail(2, format!("lifetime of {r}"), &mut ok);
                }
            }
            if !ok[1] {
                continue;
            }
            let lose: BTreeSet<Lat> = ht.difference(&ht1).copied().collect();
            let gain: BTreeSet<Lat> = ht1.difference(&ht).copied().collect();
            let image: BTreeSet<Lat> = lose.iter().map(|&r| self.g(&self.f_inv(r).unwrap())).collect();
            if image != gain {
                fail(3, format!("g f^-1 does not match lose to gain at t = {t}"), &mut ok);
            }
            for &r in &lose {
                let c = self.f_inv(r).unwrap();
                if !self.members(&c).iter().all(|x| ht.contains(x) || ht1.contains(x)) {
                    fail(4, format!("circuit of {r} leaves H_t u H_t+1 at t = {t}"), &mut ok);
                }
            }
            let dep = |set: &BTreeSet<Lat>, c_of: &dyn Fn(Lat) -> Circuit| -> bool {
                let edges: HashMap<Lat, Vec<Lat>> = set
                    .iter()
                    .map(|&r| (r, self.members(&c_of(r)).into_iter().filter(|x| *x != r && set.contains(x)).collect()))
                    .collect();
                acyclic(&edges)
            };
            if !dep(&gain, &|r| self.g_inv(r).unwrap()) {
                fail(5, format!("gain set dependency cycle at t = {t}"), &mut ok);
            }
            if !dep(&lose, &|r| self.f_inv(r).unwrap()) {
                fail(6, format!("lose set dependency cycle at t = {t}"), &mut ok);
            }
        }
        if !size_ok {
            failures.push(format!("|H_t| differs from D(S) + 1 = {expected}"));
        }
        FiltrationAudit { conditions: ok, size, size_ok, failures }
    }

    /// Searches bands `phi = (e, 0)` for pins whose fourth point sits on a hull side.
    fn search_band(s: &YPin) -> Result<Filtration> {
        let m = s.m();
        let d1 = s.d() + 1;
        let mut forward_only: Option<Filtration> = None;
        let choices: Vec<Vec<(Role, Role)>> = KINDS
            .iter()
            .map(|k| {
                let r = k.roles();
                r.iter().flat_map(|&x| r.iter().filter(move |&&y| y != x).map(move |&y| (x, y))).collect()
            })
            .collect();
        for t1 in &choices[0] {
            for t2 in &choices[1] {
                for t3 in &choices[2] {
                    let table = [*t1, *t2, *t3];
                    let probe = Filtration {
                        pin: *s,
                        case: HullCase::Boundary,
                        table,
                        phi: (1, 0),
                        lo: vec![0; m as usize],
                        hi: vec![1; m as usize],
                        backward: false,
                    };
                    let rows: Vec<Lat> = (1..=m).map(|j| lat(0, j)).collect();
                    if rows.iter().any(|&r| probe.f_inv(r).is_none() || probe.g_inv(r).is_none()) {
                        continue;
                    }
                    let delta: Vec<Lat> = rows.iter().map(|&r| probe.g(&probe.f_inv(r).unwrap()) - r).collect();
                    for e in [1, -1] {
                        for cand in band_candidates(&delta, e, d1) {
                            let f = Filtration { phi: (e, 0), lo: cand.0, hi: cand.1, ..probe.clone() };
                            let quick = f.audit(0);
                            if !quick.forward_ok() {
                                continue;
                            }
                            let full = f.audit(3 * m);
                            if full.all_ok() {
                                return Ok(Filtration { backward: true, ..f });
                            }
                            if full.forward_ok() && forward_only.is_none() {
                                forward_only = Some(f);
                            }
                        }
                    }
                }
            }
        }
        forward_only.ok_or_else(|| Error::Degenerate(format!("no band filtration found for {s}")))
    }
}

/// Band bounds compatible with `g f^-1` for a boundary pin: `hi[sigma(j)] = lo[j] + e delta_j1`.
fn band_candidates(delta: &[Lat], e: i64, total: i64) -> Vec<(Vec<i64>, Vec<i64>)> {
    let m = delta.len();
    let sigma: Vec<usize> = (0..m).map(|j| (j as i64 + delta[j].j) as usize).collect();
    let mut seen = vec![false; m];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let mut cyc = vec![];
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            cyc.push(j);
            j = sigma[j];
        }
        cycles.push(cyc);
    }
    let sums: Vec<i64> = cycles.iter().map(|c| c.iter().map(|&j| e * delta[j].i).sum()).collect();
    if sums.iter().any(|&x| x < 1) || sums.iter().sum::<i64>() != total {
        return vec![];
    }
    let reach = total + delta.iter().map(|d| d.i.abs()).sum::<i64>() + 2;
    let offsets: Vec<Vec<i64>> = (0..cycles.len())
        .map(|k| if k == 0 { vec![0] } else { (-reach..=reach).collect() })
        .collect();
    let widths: Vec<Vec<Vec<i64>>> = cycles.iter().zip(&sums).map(|(c, &s)| compositions(s, c.len())).collect();
    let mut out = Vec::new();
    for ws in product(&widths) {
        for os in product(&offsets) {
            let mut lo = vec![0i64; m];
            let mut hi = vec![0i64; m];
            for (ci, cyc) in cycles.iter().enumerate() {
                let w = &ws[ci];
                let mut cur = os[ci];
                for (k, &j) in cyc.iter().enumerate() {
                    lo[j] = cur;
                    hi[j] = cur + w[k];
                    cur = lo[j] + e * delta[j].i - w[(k + 1) % cyc.len()];
                }
            }
            out.push((lo, hi));
        }
    }
    out
}

fn product<T: Clone>(sets: &[Vec<T>]) -> Vec<Vec<T>> {
    sets.iter().fold(vec![vec![]], |acc, set| {
        acc.into_iter()
            .flat_map(|prefix| {
                set.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect()
    })
}

/// Ordered compositions of `n` into `k` positive parts.
fn compositions(n: i64, k: usize) -> Vec<Vec<i64>> {
    if k == 1 {
        return if n >= 1 { vec![vec![n]] } else { vec![] };
    }
    (1..n)
        .flat_map(|first| {
            compositions(n - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn acyclic(edges: &HashMap<Lat, Vec<Lat>>) -> bool {
    topo_order(edges).is_some()
}

/// Orders the keys so that every key comes after the keys it points to.
pub(crate) fn topo_order(edges: &HashMap<Lat, Vec<Lat>>) -> Option<Vec<Lat>> {
    let mut done: HashSet<Lat> = HashSet::new();
    let mut order = Vec::new();
    let mut keys: Vec<&Lat> = edges.keys().collect();
    keys.sort();
    let mut remaining: Vec<Lat> = keys.into_iter().copied().collect();
    while !remaining.is_empty() {
        let before = remaining.len();
        remaining.retain(|r| {
            if edges[r].iter().all(|x| done.contains(x)) {
                done.insert(*r);
                order.push(*r);
                false
            } else {
                true
            }
        });
        if remaining.len() == before {
            return None;
        }
    }
    Some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pin::{zoo_pin, ZOO};

    #[test]
    fn zoo_filtrations() {
        for e in ZOO {
            let p = e.pin();
            let f = Filtration::build(&p).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            let a = f.audit(3 * f.m());
            assert!(a.forward_ok(), "{}: {:?}", e.name, a.failures);
            assert_eq!(a.size as i64, e.d + 1, "{}", e.name);
            if e.name != "penguin" {
                assert!(a.all_ok(), "{}: {:?}", e.name, a.failures);
            }
        }
    }

    #[test]
    fn penguin_band_loses_backward_sweep() {
        let f = Filtration::build(&zoo_pin("penguin").unwrap()).unwrap();
        assert!(!f.backward);
        let a = f.audit(6);
        assert!(!a.conditions[6]);
    }

    #[test]
    fn lifetimes_are_intervals() {
        let f = Filtration::build(&zoo_pin("rabbit").unwrap()).unwrap();
        for r in f.h(0) {
            let (s, t) = f.lifetime(r);
            assert!(s <= 0 && 0 <= t);
            assert!(!f.contains(r, s - 1) && !f.contains(r, t + 1));
        }
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(5, 2).len(), 4);
        assert_eq!(compositions(4, 3).len(), 3);
    }
}
