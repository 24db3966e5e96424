use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use ymesh::filtration::Filtration;
use ymesh::fractal::{conjecture_rows, fractal_dim, make_fractal, window_for};
use ymesh::ij::{inverse_check, row_skip_check, Polygon};
use ymesh::io::{affine_csv, fractal_csv, mesh_from_json, mesh_to_json, quiver_dot, quiver_json, y_csv};
use ymesh::lifted::{audit, build_by_labels, build_by_lift, local_config, tilde_generator};
use ymesh::mesh::{check_relations, generate_stepped, MeshWindow, Sampler};
use ymesh::quiver::{check_exchange_y, run_periodic_y, verify_period_one, FiniteQuiver, QSTemplate};
use ymesh::verify::{run_verify_all, summary, CheckKind, ExperimentConfig, PinSpec, ALL_CHECKS};
use ymesh::yvars::{check_recurrence, menelaus_check, YGrid};
use ymesh::{lat, Error, Lat, Result, YPin};

#[derive(Parser)]
#[command(name = "ymesh", version, about = "Y-meshes, their y-variables and period-one quivers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct PinArg {
    /// Zoo name (e.g. "pentagram"), four points "i,j i,j i,j i,j", or pin JSON
    /// `{"a":[i,j],"b":[i,j],"c":[i,j],"d":[i,j]}` inline or in a `.json` file.
    #[arg(long, default_value = "pentagram")]
    pin: String,
}

impl PinArg {
    fn resolve(&self) -> Result<(String, YPin)> {
        parse_pin(&self.pin)
    }
}

fn parse_pin(s: &str) -> Result<(String, YPin)> {
    let json = if s.trim_start().starts_with('{') {
        Some(s.to_string())
    } else if s.ends_with(".json") {
        Some(fs::read_to_string(s)?)
    } else {
        None
    };
    if let Some(text) = json {
        let p: YPin = serde_json::from_str(&text)?;
        return Ok((p.to_string(), p));
    }
    if !s.contains(',') {
        return PinSpec::Name(s.to_string()).resolve();
    }
    let nums: Vec<i64> = s
        .split(|c: char| c == ',' || c.is_whitespace() || c == ';')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Invalid(format!("bad coordinate {t:?}"))))
        .collect::<Result<_>>()?;
    if nums.len() != 8 {
        return Err(Error::Invalid("a pin needs exactly four points".into()));
    }
    PinSpec::Points([0, 2, 4, 6].map(|k| [nums[k], nums[k + 1]])).resolve()
}

#[derive(Args, Clone)]
struct SeedArg {
    #[arg(long, env = "YMESH_SEED", default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariants of a pin: D(S) three ways, convex relation, filtration audit, (I,J) data.
    Pin {
        #[command(flatten)]
        pin: PinArg,
    },
    /// Generate, propagate and check meshes.
    #[command(subcommand)]
    Mesh(MeshCmd),
    /// Period-one quivers and their y-dynamics.
    #[command(subcommand)]
    Quiver(QuiverCmd),
    /// The lifted quiver on a window of the plane.
    Lift {
        #[command(flatten)]
        pin: PinArg,
        #[arg(long, default_value_t = 5)]
        radius: i64,
        /// Mutate this vertex "i,j" first.
        #[arg(long)]
        mutate: Option<String>,
    },
    /// Fractal point sets and their dimensions on a mesh.
    Fractal {
        #[command(flatten)]
        pin: PinArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Read the mesh from a JSON file instead of generating one.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
        /// Write the dimension table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// (I,J)-maps: every few rows of a horizontal mesh, or the inverse identity on a random polygon.
    Ijmap {
        #[command(flatten)]
        pin: PinArg,
        /// Apply `T_{I,J}` with these steps to a random polygon instead, e.g. "2,2".
        #[arg(long, requires = "j")]
        i: Option<String>,
        #[arg(long)]
        j: Option<String>,
        #[arg(long, default_value_t = 24)]
        width: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Run identity checks over pins, dimensions and seeds.
    Verify {
        #[arg(value_enum, default_value_t = VerifyWhat::All)]
        what: VerifyWhat,
        /// JSON experiment configuration; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Repeatable; defaults to the whole zoo.
        #[arg(long = "pin")]
        pins: Vec<String>,
        #[arg(long = "dim")]
        dims: Vec<usize>,
        /// Repeatable; defaults to YMESH_SEED or 1.
        #[arg(long = "seed")]
        seeds: Vec<u64>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write artifacts to files.
    Export {
        #[arg(value_enum)]
        kind: ExportKind,
        #[command(flatten)]
        pin: PinArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 16)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        steps: i64,
        /// Quotient size for quiver exports.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Source mesh for `affine`.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum MeshCmd {
    /// Generic initial data, optionally propagated, written as JSON.
    Gen {
        #[command(flatten)]
        pin: PinArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 16)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        steps: i64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propagate a stored mesh; negative steps run the inverse map.
    Step {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        steps: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collinearity, distinctness, master recurrence and Menelaus checks on a stored mesh.
    Check {
        #[arg(long)]
        mesh: PathBuf,
    },
}

#[derive(Subcommand)]
enum QuiverCmd {
    /// The quotient quiver Q_{n,S} as JSON or DOT.
    Build {
        #[command(flatten)]
        pin: PinArg,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random positive y-seed mutated row by row; writes the y-trace as CSV.
    Run {
        #[command(flatten)]
        pin: PinArg,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Period-one check for a range of quotient sizes.
    Verify {
        #[command(flatten)]
        pin: PinArg,
        #[arg(long, default_value_t = 4)]
        from: usize,
        #[arg(long, default_value_t = 8)]
        to: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum VerifyWhat {
    All,
    Eqmain,
    Menelaus,
    Generaly,
}

#[derive(ValueEnum, Clone, Copy)]
enum ExportKind {
    Mesh,
    Affine,
    Quiver,
    Dot,
    Ytrace,
    Fractal,
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_mesh(p: &PathBuf) -> Result<MeshWindow> {
    mesh_from_json(&fs::read_to_string(p)?)
}

fn parse_lat(s: &str) -> Result<Lat> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Invalid(format!("bad lattice point {s:?}"))))
        .collect::<Result<_>>()?;
    match v.as_slice() {
        [i, j] => Ok(lat(*i, *j)),
        _ => Err(Error::Invalid(format!("bad lattice point {s:?}"))),
    }
}

fn parse_steps(s: &str) -> Result<Vec<i64>> {
    s.split(',').map(|t| t.trim().parse().map_err(|_| Error::Invalid(format!("bad step list {s:?}")))).collect()
}

fn quotient(s: &YPin, n: usize) -> Result<FiniteQuiver> {
    QSTemplate::build(s)?.materialize(n)
}

fn vertices(fq: &FiniteQuiver) -> Vec<Lat> {
    (0..fq.quiver.len()).map(|k| fq.vertex(k)).collect()
}

fn y_trace(s: &YPin, n: usize, steps: usize, seed: u64) -> Result<(QSTemplate, BTreeMap<Lat, ymesh::Q>)> {
    use num::Signed;
    let t = QSTemplate::build(s)?;
    let fq = t.materialize(n)?;
    let mut rng = Sampler::new(seed, 17);
    let init: Vec<_> = (0..fq.quiver.len()).map(|_| rng.nonzero().abs()).collect();
    Ok((t, run_periodic_y(&fq, &init, steps)?.y))
}

fn cmd_pin(pin: &PinArg) -> Result<i32> {
    let (name, s) = pin.resolve()?;
    let d = s.d_report();
    if name == s.to_string() {
        println!("pin {s}");
    } else {
        println!("pin {name}: {s}");
    }
    println!("convex relation {:?}, hull {:?}", s.convex_relation().m, s.hull_case());
    println!("D(S): area {} magnitude {} lattice {} (agree: {})", d.area, d.magnitude, d.lattice, d.agree());
    println!("rows of initial data m = {}, quiver rows l = {}", s.m(), s.l());
    let audit = Filtration::build(&s)?.audit(3 * s.m());
    println!("filtration conditions {:?}, |H_t| = {} ({})", audit.conditions, audit.size, audit.size_ok);
    for f in &audit.failures {
        println!("  {f}");
    }
    if let Ok(c) = s.ij_correspondence() {
        println!(
            "(I,J) = ({:?}, {:?}) in dimension {}, every {} rows, index shift {}",
            c.i_steps, c.j_steps, c.dim, c.row_step, c.shift
        );
    }
    Ok(if d.agree() { 0 } else { 1 })
}

fn mesh_report(w: &MeshWindow) -> Result<bool> {
    let rel = check_relations(w);
    println!("relations: {:?}, {} violations", rel.checked, rel.violations.len());
    if !rel.is_clean() {
        for v in rel.violations.iter().take(10) {
            println!("  {} at {}", v.relation, v.r);
        }
        return Ok(false);
    }
    let grid = YGrid::from_mesh(w)?;
    let eq = check_recurrence(&grid, &w.pin);
    println!("master recurrence: {} instances, {} failures", eq.instances, eq.failures.len());
    let mut ok = rel.is_clean() && eq.passed();
    if w.dim >= 2 {
        let m = menelaus_check(w);
        println!("menelaus: {} instances, {} failures", m.instances, m.failures.len());
        ok &= m.passed();
    }
    Ok(ok)
}

fn cmd_mesh(cmd: &MeshCmd) -> Result<i32> {
    match cmd {
        MeshCmd::Gen { pin, dim, width, steps, seed, out } => {
            let (_, s) = pin.resolve()?;
            let (_, w) = generate_stepped(&s, *dim, *width, seed.seed, *steps)?;
            write_out(out, &mesh_to_json(&w)?)?;
        }
        MeshCmd::Step { mesh, steps, out } => {
            let mut w = read_mesh(mesh)?;
            w.step(*steps)?;
            write_out(out, &mesh_to_json(&w)?)?;
        }
        MeshCmd::Check { mesh } => {
            let w = read_mesh(mesh)?;
            return Ok(if mesh_report(&w)? { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn cmd_quiver(cmd: &QuiverCmd) -> Result<i32> {
    match cmd {
        QuiverCmd::Build { pin, n, dot, out } => {
            let (name, s) = pin.resolve()?;
            let fq = quotient(&s, *n)?;
            let text = if *dot {
                quiver_dot(&format!("Q_{n} {name}"), &vertices(&fq), &fq.quiver)
            } else {
                serde_json::to_string_pretty(&quiver_json(&vertices(&fq), &fq.quiver))?
            };
            write_out(out, &text)?;
        }
        QuiverCmd::Run { pin, n, steps, seed, out } => {
            let (_, s) = pin.resolve()?;
            let (t, y) = y_trace(&s, *n, *steps, seed.seed)?;
            let (checked, fails) = check_exchange_y(&t, *n, &y);
            eprintln!("exchange relation: {checked} instances, {} failures", fails.len());
            let mut buf = vec![];
            y_csv(&y, &mut buf)?;
            write_out(out, &String::from_utf8_lossy(&buf))?;
            return Ok(if fails.is_empty() { 0 } else { 1 });
        }
        QuiverCmd::Verify { pin, from, to } => {
            let (name, s) = pin.resolve()?;
            let t = QSTemplate::build(&s)?;
            let mut ok = true;
            for n in *from..=*to {
                let r = verify_period_one(&t.materialize(n)?);
                println!("{name} n={n}: row independent {}, shift matches {}", r.row_independent, r.shift_matches);
                ok &= r.ok();
            }
            return Ok(if ok { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn cmd_lift(pin: &PinArg, radius: i64, mutate: &Option<String>) -> Result<i32> {
    let (name, s) = pin.resolve()?;
    let (lo, hi) = (lat(-radius, -radius), lat(radius, radius));
    let mut w = build_by_lift(&s, lo, hi)?;
    let same = w.quiver == build_by_labels(&s, lo, hi)?.quiver;
    let a = audit(&w);
    println!("{name}: generator {}, routes agree {same}, audit ok {}", tilde_generator(&s), a.ok());
    if let Some(p) = mutate {
        w = w.mutate(parse_lat(p)?)?;
    }
    for j in (lo.j + 1..hi.j).rev() {
        let row: Vec<String> = (lo.i + 1..hi.i)
            .map(|i| {
                let p = lat(i, j);
                local_config(&w, p).map(|c| format!("{:>2}", c.id)).unwrap_or_else(|_| " .".into())
            })
            .collect();
        println!("{j:>4} {}", row.join(" "));
    }
    Ok(if same && a.ok() { 0 } else { 1 })
}

fn cmd_fractal(pin: &PinArg, k: usize, mesh: &Option<PathBuf>, dim: Option<usize>, seed: u64, csv: &Option<PathBuf>) -> Result<i32> {
    let (name, s) = pin.resolve()?;
    let w = match mesh {
        Some(p) => read_mesh(p)?,
        None => window_for(&s, dim.unwrap_or(s.d().clamp(1, 3) as usize), k, 1, seed)?,
    };
    let f = make_fractal(&w.pin, lat(0, 0), k);
    let pts: Vec<String> = f.points.iter().map(|p| p.to_string()).collect();
    println!("{k}-fractal at (0,0): {} points {}", f.len(), pts.join(" "));
    if let Ok(d) = fractal_dim(&w, &f) {
        println!("d_P at (0,0) = {d}");
    }
    let rows = conjecture_rows(&name, &w, k)?;
    println!("pin,dim,k,samples,matches,expected,observed_min,observed_max");
    for r in &rows {
        println!("{},{},{},{},{},{},{},{}", r.pin, r.dim, r.k, r.samples, r.matches, r.expected, r.observed_min, r.observed_max);
    }
    if let Some(p) = csv {
        fractal_csv(&rows, fs::File::create(p)?)?;
    }
    Ok(0)
}

fn cmd_ijmap(pin: &PinArg, i: &Option<String>, j: &Option<String>, width: usize, seed: u64) -> Result<i32> {
    if let (Some(i), Some(j)) = (i, j) {
        let (i, j) = (parse_steps(i)?, parse_steps(j)?);
        let dim = i.len() + 1;
        let mut rng = Sampler::new(seed, 0);
        let points = (0..width).map(|_| rng.point(dim).ok_or_else(|| Error::Degenerate("zero point".into()))).collect::<Result<_>>()?;
        let (n, fails) = inverse_check(&Polygon { lo: 0, points }, &i, &j)?;
        println!("inverse identity: {n} vertices, {} failures", fails.len());
        return Ok(if fails.is_empty() && n > 0 { 0 } else { 1 });
    }
    let (name, s) = pin.resolve()?;
    let corr = s.ij_correspondence()?;
    println!("{name}: I = {:?}, J = {:?}, D = {}, every {} rows, shift {}", corr.i_steps, corr.j_steps, corr.dim, corr.row_step, corr.shift);
    let (_, w) = generate_stepped(&s, corr.dim, width, seed, corr.row_step + 2)?;
    let mut ok = true;
    for &j0 in w.rows.keys() {
        if !w.rows.contains_key(&(j0 + corr.row_step)) {
            continue;
        }
        let (n, fails) = row_skip_check(&w, &corr, j0)?;
        println!("row {j0} -> {}: {n} vertices, {} mismatches", j0 + corr.row_step, fails.len());
        ok &= fails.is_empty() && n > 0;
    }
    Ok(if ok { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    what: VerifyWhat,
    config: &Option<PathBuf>,
    pins: &[String],
    dims: &[usize],
    seeds: &[u64],
    width: Option<usize>,
    report: &Option<PathBuf>,
) -> Result<i32> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::from_json(&fs::read_to_string(p)?)?,
        None => ExperimentConfig::default(),
    };
    if !pins.is_empty() {
        cfg.pins = pins.iter().map(|p| parse_pin(p).map(|(_, s)| pin_spec(p, &s))).collect::<Result<_>>()?;
    }
    if !dims.is_empty() {
        cfg.dims = dims.to_vec();
    }
    if !seeds.is_empty() {
        cfg.seeds = seeds.to_vec();
    } else if config.is_none() {
        cfg.seeds = vec![std::env::var("YMESH_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(1)];
    }
    if let Some(w) = width {
        cfg.width = w;
    }
    let only = |k: CheckKind| vec![CheckKind::Relations, k];
    cfg.checks = match what {
        VerifyWhat::All => {
            if config.is_some() {
                cfg.checks
            } else {
                ALL_CHECKS.to_vec()
            }
        }
        VerifyWhat::Eqmain => only(CheckKind::Eqmain),
        VerifyWhat::Menelaus => only(CheckKind::Menelaus),
        VerifyWhat::Generaly => only(CheckKind::Generaly),
    };
    if what == VerifyWhat::Generaly && cfg.dims.is_empty() {
        cfg.dims = vec![2];
    }
    let rep = run_verify_all(&cfg)?;
    for r in rep.results.iter().filter(|r| !r.passed) {
        let tag = if r.evidence_only { "EVIDENCE" } else if r.degenerate { "DEGENERATE" } else { "FAIL" };
        println!("{tag} {} {} dim={:?} seed={:?}: {}", r.check, r.pin, r.dim, r.seed, r.detail);
    }
    for (check, (pass, total)) in summary(&rep) {
        println!("{check}: {pass}/{total}");
    }
    println!("hard failures {}, degenerate {}", rep.hard_failures(), rep.degenerate());
    if let Some(p) = report {
        fs::write(p, serde_json::to_string_pretty(&rep)?)?;
    }
    Ok(rep.exit_code())
}

fn pin_spec(raw: &str, s: &YPin) -> PinSpec {
    if ymesh::pin::zoo_pin(raw).is_ok() {
        PinSpec::Name(raw.to_string())
    } else {
        PinSpec::Points(s.points().map(|p| [p.i, p.j]))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_export(
    kind: ExportKind,
    pin: &PinArg,
    dim: usize,
    width: usize,
    steps: i64,
    n: usize,
    k: usize,
    mesh: &Option<PathBuf>,
    seed: u64,
    out: &PathBuf,
) -> Result<i32> {
    let (name, s) = pin.resolve()?;
    let file = || fs::File::create(out);
    match kind {
        ExportKind::Mesh => fs::write(out, mesh_to_json(&generate_stepped(&s, dim, width, seed, steps)?.1)?)?,
        ExportKind::Affine => {
            let w = match mesh {
                Some(p) => read_mesh(p)?,
                None => generate_stepped(&s, dim, width, seed, steps)?.1,
            };
            affine_csv(&w, file()?)?;
        }
        ExportKind::Quiver => {
            let fq = quotient(&s, n)?;
            fs::write(out, serde_json::to_string_pretty(&quiver_json(&vertices(&fq), &fq.quiver))?)?;
        }
        ExportKind::Dot => {
            let fq = quotient(&s, n)?;
            fs::write(out, quiver_dot(&format!("Q_{n} {name}"), &vertices(&fq), &fq.quiver))?;
        }
        ExportKind::Ytrace => y_csv(&y_trace(&s, n, steps.max(1) as usize, seed)?.1, file()?)?,
        ExportKind::Fractal => {
            let w = window_for(&s, dim, k, 1, seed)?;
            fractal_csv(&conjecture_rows(&name, &w, k)?, file()?)?;
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<i32> {
    match &cli.cmd {
        Cmd::Pin { pin } => cmd_pin(pin),
        Cmd::Mesh(m) => cmd_mesh(m),
        Cmd::Quiver(q) => cmd_quiver(q),
        Cmd::Lift { pin, radius, mutate } => cmd_lift(pin, *radius, mutate),
        Cmd::Fractal { pin, k, mesh, dim, seed, csv } => cmd_fractal(pin, *k, mesh, *dim, seed.seed, csv),
        Cmd::Ijmap { pin, i, j, width, seed } => cmd_ijmap(pin, i, j, *width, seed.seed),
        Cmd::Verify { what, config, pins, dims, seeds, width, report } => {
            cmd_verify(*what, config, pins, dims, seeds, *width, report)
        }
        Cmd::Export { kind, pin, dim, width, steps, n, k, mesh, seed, out } => {
            cmd_export(*kind, pin, *dim, *width, *steps, *n, *k, mesh, seed.seed, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
