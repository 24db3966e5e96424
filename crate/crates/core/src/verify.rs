//! Experiment configuration and the all-checks runner behind `ymesh verify`.

use crate::error::{Error, Result};
use crate::filtration::Filtration;
use crate::fractal::{bound_check, conjecture_rows, genericity_audit, window_for, ConjectureRow};
use crate::lifted::{audit, build_by_labels, build_by_lift, quotient_mismatches};
use crate::mesh::{check_relations, generate_stepped, MeshWindow, PeriodicMesh, Sampler};
use crate::pin::{lat, zoo_pin, YPin, ZOO};
use crate::quiver::{
    check_exchange_x, check_exchange_y, geometric_seed, run_periodic_x, run_periodic_y, verify_period_one, QSTemplate,
};
use crate::yvars::{check_recurrence, general_y_check, menelaus_check, YGrid};
use num::Signed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A pin given by zoo name or by its four points.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum PinSpec {
    Name(String),
    Points([[i64; 2]; 4]),
}

impl PinSpec {
    pub fn resolve(&self) -> Result<(String, YPin)> {
        match self {
            PinSpec::Name(n) => Ok((n.clone(), zoo_pin(n)?)),
            PinSpec::Points(p) => {
                let s = YPin::from_pairs(p.map(|[i, j]| (i, j)))?;
                Ok((s.to_string(), s))
            }
        }
    }
}

/// Which families of checks to run.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Pin,
    Filtration,
    Relations,
    Inverse,
    Eqmain,
    Menelaus,
    Generaly,
    Fractal,
    Quiver,
    Lift,
}

pub const ALL_CHECKS: [CheckKind; 10] = [
    CheckKind::Pin,
    CheckKind::Filtration,
    CheckKind::Relations,
    CheckKind::Inverse,
    CheckKind::Eqmain,
    CheckKind::Menelaus,
    CheckKind::Generaly,
    CheckKind::Fractal,
    CheckKind::Quiver,
    CheckKind::Lift,
];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pins: Vec<PinSpec>,
    /// Explicit dimensions; empty means `{1, 2, min(3, D), D}` capped at `D(S)` for each pin.
    pub dims: Vec<usize>,
    pub seeds: Vec<u64>,
    pub width: usize,
    /// Extra forward steps beyond what the master recurrence needs.
    pub extra_steps: i64,
    pub checks: Vec<CheckKind>,
    /// Quotient sizes for the period-one check.
    pub quotients: Vec<usize>,
    /// Largest fractal order tabulated as conjecture evidence.
    pub fractal_k: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pins: ZOO.iter().map(|e| PinSpec::Name(e.name.to_string())).collect(),
            dims: vec![],
            seeds: vec![1],
            width: 30,
            extra_steps: 0,
            checks: ALL_CHECKS.to_vec(),
            quotients: (4..=8).collect(),
            fractal_k: 3,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Resolved pins with the dimensions to run for each; rejects dimensions above `D(S)`.
    pub fn jobs(&self) -> Result<Vec<(String, YPin, Vec<usize>)>> {
        if self.width < 4 {
            return Err(Error::Invalid("window width must be at least 4".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Invalid("at least one seed is required".into()));
        }
        let mut out = vec![];
        for spec in &self.pins {
            let (name, s) = spec.resolve()?;
            let d = s.d_checked()? as usize;
            let dims = if self.dims.is_empty() {
                admissible_dims(d)
            } else {
                if let Some(&bad) = self.dims.iter().find(|&&x| x == 0 || x > d) {
                    return Err(Error::Invalid(format!("dimension {bad} is outside 1..={d} for pin {name}")));
                }
                self.dims.clone()
            };
            out.push((name, s, dims));
        }
        Ok(out)
    }

    fn wants(&self, k: CheckKind) -> bool {
        self.checks.contains(&k)
    }
}

/// `{1, 2, min(3, D), D}` intersected with `1..=D`.
pub fn admissible_dims(d: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [1, 2, 3.min(d), d].into_iter().filter(|&x| x >= 1 && x <= d).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// One line of the report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub pin: String,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub instances: usize,
    pub passed: bool,
    /// Conjecture evidence never affects the exit status.
    pub evidence_only: bool,
    pub degenerate: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub results: Vec<CheckResult>,
    pub conjecture: Vec<ConjectureRow>,
}

impl Report {
    pub fn hard_failures(&self) -> usize {
        self.results.iter().filter(|r| !r.passed && !r.evidence_only && !r.degenerate).count()
    }

    pub fn degenerate(&self) -> usize {
        self.results.iter().filter(|r| r.degenerate).count()
    }

    /// 0 when clean, 1 on an assertion failure, 3 when only degenerate data stopped a check.
    pub fn exit_code(&self) -> i32 {
        if self.hard_failures() > 0 {
            1
        } else if self.degenerate() > 0 {
            3
        } else {
            0
        }
    }

    fn push(&mut self, check: &str, pin: &str, dim: Option<usize>, seed: Option<u64>, r: Result<(usize, bool, String)>) {
        let (instances, passed, degenerate, detail) = match r {
            Ok((n, ok, d)) => (n, ok, false, d),
            Err(e @ Error::Degenerate(_)) => (0, false, true, e.to_string()),
            Err(e) => (0, false, false, e.to_string()),
        };
        self.results.push(CheckResult {
            check: check.into(),
            pin: pin.into(),
            dim,
            seed,
            instances,
            passed,
            evidence_only: false,
            degenerate,
            detail,
        });
    }
}

/// Rows that must be added to the initial data for every master-recurrence instance of a cell.
pub fn recurrence_steps(s: &YPin, dim: usize) -> i64 {
    if dim == 1 {
        s.m() + 1
    } else {
        s.l() + 1
    }
}

/// Generated window stepped far enough for the recurrence checks.
pub fn sweep_window(s: &YPin, dim: usize, width: usize, seed: u64, extra: i64) -> Result<MeshWindow> {
    Ok(generate_stepped(s, dim, width, seed, recurrence_steps(s, dim) + extra)?.1)
}

fn mesh_checks(cfg: &ExperimentConfig, rep: &mut Report, name: &str, s: &YPin, dim: usize, seed: u64) {
    let (d, sd) = (Some(dim), Some(seed));
    let (base, w) = match generate_stepped(s, dim, cfg.width, seed, recurrence_steps(s, dim) + cfg.extra_steps) {
        Ok(x) => x,
        Err(e) => return rep.push("generate", name, d, sd, Err(e)),
    };
    if cfg.wants(CheckKind::Relations) {
        let r = check_relations(&w);
        let n = r.checked.values().sum();
        rep.push("relations", name, d, sd, Ok((n, r.is_clean() && n > 0, format!("{} violations", r.violations.len()))));
    }
    if cfg.wants(CheckKind::Inverse) {
        let r = base.inverse_round_trip(recurrence_steps(s, dim)).map(|(ok, n)| (n, ok && n > 0, String::new()));
        rep.push("inverse", name, d, sd, r);
    }
    let grid = match YGrid::from_mesh(&w) {
        Ok(g) => g,
        Err(e) => return rep.push("ygrid", name, d, sd, Err(e)),
    };
    if cfg.wants(CheckKind::Eqmain) {
        let r = check_recurrence(&grid, s);
        let detail = format!("{} skipped, failures {:?}", r.skipped.len(), r.failures);
        rep.push("eqmain", name, d, sd, Ok((r.instances, r.passed() && r.instances > 0, detail)));
    }
    if dim >= 2 && cfg.wants(CheckKind::Menelaus) {
        let r = menelaus_check(&w);
        rep.push("menelaus", name, d, sd, Ok((r.instances, r.passed() && r.instances > 0, format!("{:?}", r.failures))));
    }
    if dim == 2 && cfg.wants(CheckKind::Generaly) {
        for (set, r) in general_y_check(&w, &grid) {
            let check = format!("generaly {set}");
            rep.push(&check, name, d, sd, Ok((r.instances, r.passed(), format!("{:?}", r.failures))));
        }
    }
    if dim >= 2 && cfg.wants(CheckKind::Fractal) {
        fractal_checks(cfg, rep, name, s, dim, seed);
    }
}

fn fractal_checks(cfg: &ExperimentConfig, rep: &mut Report, name: &str, s: &YPin, dim: usize, seed: u64) {
    let (d, sd) = (Some(dim), Some(seed));
    let k = cfg.fractal_k.max(3);
    let w = match window_for(s, dim, k, 4, seed) {
        Ok(w) => w,
        Err(e) => return rep.push("fractal window", name, d, sd, Err(e)),
    };
    let audit = genericity_audit(&w, 2).map(|a| {
        let n = a.checked.iter().sum();
        (n, a.generic(), format!("{:?}", a.failures))
    });
    rep.push("2-generic", name, d, sd, audit);
    let bound = bound_check(&w, 2).map(|b| (b.checked, b.ok() && b.generic, format!("{:?}", b.violations)));
    rep.push("fractal bound d=2", name, d, sd, bound);
    match conjecture_rows(name, &w, k) {
        Ok(rows) => {
            for r in &rows {
                rep.results.push(CheckResult {
                    check: format!("conjecture evidence k={}", r.k),
                    pin: name.into(),
                    dim: d,
                    seed: sd,
                    instances: r.samples,
                    passed: r.matches == r.samples,
                    evidence_only: true,
                    degenerate: false,
                    detail: format!("{}/{} at expected {}", r.matches, r.samples, r.expected),
                });
            }
            rep.conjecture.extend(rows);
        }
        Err(e) => rep.push("conjecture evidence", name, d, sd, Err(e)),
    }
}

fn quiver_checks(cfg: &ExperimentConfig, rep: &mut Report, name: &str, s: &YPin, seed: u64) {
    let t = match QSTemplate::build(s) {
        Ok(t) => t,
        Err(e) => return rep.push("quiver template", name, None, None, Err(e)),
    };
    for &n in &cfg.quotients {
        let r = t.materialize(n).map(|fq| {
            let p = verify_period_one(&fq);
            (fq.quiver.len(), p.ok(), format!("n={n} {p:?}"))
        });
        rep.push(&format!("period one n={n}"), name, None, None, r);
    }
    let n = 6;
    let exchange = || -> Result<(usize, bool, String)> {
        let fq = t.materialize(n)?;
        let mut rng = Sampler::new(seed, 17);
        let init: Vec<_> = (0..fq.quiver.len()).map(|_| rng.nonzero().abs()).collect();
        let y = run_periodic_y(&fq, &init, 12)?;
        let (cy, fy) = check_exchange_y(&t, n, &y.y);
        let x = run_periodic_x(&fq, &init, 12)?;
        let (cx, fx) = check_exchange_x(&t, n, &x);
        Ok((cy + cx, fy.is_empty() && fx.is_empty() && cy > 0 && cx > 0, format!("y {fy:?} x {fx:?}")))
    };
    rep.push("exchange relations", name, None, Some(seed), exchange());
    if s.m() == 1 && s.d() >= 2 {
        let geo = || -> Result<(usize, bool, String)> {
            let n = 8;
            let fq = t.materialize(n)?;
            let mut mesh = PeriodicMesh::random(s, n, seed)?;
            for _ in 0..t.l + 3 {
                mesh.step_backward()?;
            }
            for _ in 0..2 * t.l + 6 {
                mesh.step_forward()?;
            }
            let grid = YGrid::from_mesh(&mesh)?;
            let init = geometric_seed(&t, &fq, &grid)?;
            let trace = run_periodic_y(&fq, &init, 6)?;
            let mut n_cmp = 0;
            let mut bad = vec![];
            for (r, v) in &trace.y {
                if let Some(g) = grid.get(*r) {
                    n_cmp += 1;
                    if g.finite() != Some(v) {
                        bad.push(*r);
                    }
                }
            }
            Ok((n_cmp, bad.is_empty() && n_cmp > 0, format!("{bad:?}")))
        };
        rep.push("quiver y = geometric y", name, Some(2), Some(seed), geo());
    }
}

fn lift_checks(rep: &mut Report, name: &str, s: &YPin) {
    let r = (|| -> Result<(usize, bool, String)> {
        let (lo, hi) = (lat(-6, -6), lat(6, 6));
        let a = build_by_lift(s, lo, hi)?;
        let b = build_by_labels(s, lo, hi)?;
        let au = audit(&a);
        let t = QSTemplate::build(s)?;
        let qm = quotient_mismatches(&a, &t);
        let same = a.quiver == b.quiver;
        Ok((a.quiver.len(), same && au.ok() && qm.is_empty(), format!("routes agree {same}, {au:?}, quotient mismatches {}", qm.len())))
    })();
    rep.push("lifted quiver", name, None, None, r);
}

/// Runs every selected check; results are ordered by pin, then dimension and seed.
pub fn run_verify_all(cfg: &ExperimentConfig) -> Result<Report> {
    let jobs = cfg.jobs()?;
    let mut rep = Report::default();
    for (name, s, dims) in &jobs {
        if cfg.wants(CheckKind::Pin) {
            let r = s.d_report();
            rep.push("D(S) routes", name, None, None, Ok((3, r.agree(), format!("{r:?}"))));
        }
        if cfg.wants(CheckKind::Filtration) {
            let r = Filtration::build(s).map(|f| {
                let a = f.audit(3 * s.m());
                (a.conditions.len(), a.forward_ok(), format!("{:?} {:?}", a.conditions, a.failures))
            });
            rep.push("filtration", name, None, None, r);
        }
        for &dim in dims {
            for &seed in &cfg.seeds {
                mesh_checks(cfg, &mut rep, name, s, dim, seed);
            }
        }
        if cfg.wants(CheckKind::Quiver) {
            quiver_checks(cfg, &mut rep, name, s, cfg.seeds[0]);
        }
        if cfg.wants(CheckKind::Lift) {
            lift_checks(&mut rep, name, s);
        }
    }
    Ok(rep)
}

/// Per-check pass counts, for a compact summary.
pub fn summary(rep: &Report) -> BTreeMap<String, (usize, usize)> {
    let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in &rep.results {
        let key = r.check.split(" n=").next().unwrap().split(" k=").next().unwrap().to_string();
        let e = out.entry(key).or_default();
        e.1 += 1;
        if r.passed {
            e.0 += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_rejection() {
        assert_eq!(admissible_dims(1), vec![1]);
        assert_eq!(admissible_dims(2), vec![1, 2]);
        assert_eq!(admissible_dims(6), vec![1, 2, 3, 6]);
        let cfg = ExperimentConfig { pins: vec![PinSpec::Name("pentagram".into())], dims: vec![3], ..Default::default() };
        let err = cfg.jobs().unwrap_err().to_string();
        assert!(err.contains("pentagram"), "{err}");
        let cfg: ExperimentConfig = ExperimentConfig::from_json(r#"{"pins": [[[0,0],[2,0],[0,1],[1,1]]], "seeds": [4]}"#).unwrap();
        assert_eq!(cfg.jobs().unwrap()[0].2, vec![1, 2]);
        assert!(ExperimentConfig::from_json(r#"{"pinz": []}"#).is_err());
    }

    #[test]
    fn small_run_is_clean_and_deterministic() {
        let cfg = ExperimentConfig {
            pins: vec![PinSpec::Name("pentagram".into())],
            seeds: vec![42],
            quotients: vec![4],
            ..Default::default()
        };
        let a = run_verify_all(&cfg).unwrap();
        let failed: Vec<_> = a.results.iter().filter(|r| !r.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert_eq!(a.exit_code(), 0);
        let b = run_verify_all(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
