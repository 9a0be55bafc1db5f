//! `qwit`: construct, classify, scan, refine and export two-qutrit witnesses.

mod output;
mod presets;
mod witness_file;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use qutrit_witness::feasible::{
    catalog_states, diag_facet_vertices, horodecki_lower_seed,
    horodecki_upper_plane, horodecki_upper_seed, refine_facet, vertex_catalog, CoordinateFamily,
    FamilyKind, FeasiblePoint, RefineConfig,
};
use qutrit_witness::operators::{
    classify, expectation, CertificateSource, ClassifyOptions, Evidence, FacetSigns, WitnessCoeffs,
};
use qutrit_witness::optimize::OptimizerConfig;
use qutrit_witness::states::{bisect, horodecki, is_ppt, ppt_family_coeffs, DensityOp, StateOrigin};
use qutrit_witness::su3::{basis, check_basis, corrupted_basis, GellMannIndex, SQRT3};
use qutrit_witness::symmetry::{first_category, orbit, second_category, SymmetryGenerator, DEFAULT_ORBIT_CAP};

use output::{bundle_dir, emit, write_atomic, Format, Report, Table};
use witness_file::WitnessFile;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl From<qutrit_witness::Error> for CliError {
    fn from(e: qutrit_witness::Error) -> Self {
        use qutrit_witness::Error as E;
        match e {
            E::NonConvergence(_) | E::Cycle(_) => CliError::NonConvergence(e.to_string()),
            E::InvalidParameter(_) | E::InvalidLabel(_) => CliError::Usage(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

const AFTER_HELP: &str = "\
Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numerical non-convergence.
Relative --out paths and bundle directories default to $QWIT_OUT_DIR when set.";

#[derive(Parser, Debug)]
#[command(name = "qwit", version, about = "Two-qutrit entanglement witnesses from the Gell-Mann basis", after_help = AFTER_HELP)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Seed for optimizer restarts and random checks.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Worker threads for the optimizer (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Convergence tolerance: seesaw improvement threshold (classify,
    /// refine), bisection width (scan).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file, or directory for bundle commands.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check trace orthogonality, Hermiticity and the Bloch norm of the basis.
    BasisCheck {
        /// Random states for the Bloch-norm check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Perturb one basis entry, `K:ROW:COL:DELTA` (self-test of the checker).
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
    /// Emit the vertex catalog of a coordinate family.
    ///
    /// CSV columns: index, one column per coordinate (exact fraction), then
    /// alpha and beta of the generating product state.
    Vertices {
        #[arg(value_parser = ["diag", "offdiag-a", "offdiag-b"])]
        family: String,
    },
    /// Classify a witness given as a preset or a witness file.
    #[command(after_help = presets::PRESET_HELP)]
    Classify {
        witness: String,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Expectation of a witness along a state family.
    ///
    /// CSV columns: param, expectation, ppt, ppt_min_eigenvalue. Sign changes
    /// are refined by bisection and reported as roots.
    #[command(after_help = presets::PRESET_HELP)]
    Scan {
        witness: String,
        #[arg(long, value_enum)]
        family: ScanFamily,
        /// First parameter of the PPT family (its `a`).
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Refine a seed plane to a supporting plane of the feasible region.
    ///
    /// Seeds: horodecki-upper, horodecki-lower, facet:<bits>. Writes
    /// witness.{kv,json}, trace.csv (iteration, max_value, replaced, normal
    /// entries) and point-sets.csv (iteration, slot, coordinates) into the
    /// output directory.
    Refine {
        seed_preset: String,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Enumerate the symmetry orbit of a witness.
    ///
    /// Generators: first, second, or a comma list of exchange, t1, m1, m2,
    /// m3, m1sq, m2sq, perm01, perm12. Writes one witness file per member
    /// and orbit.csv (index, word, file).
    #[command(after_help = presets::PRESET_HELP)]
    Orbit {
        witness: String,
        #[arg(long, default_value = "first")]
        generators: String,
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        cap: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScanFamily {
    Horodecki,
    Ppt,
}

fn load_witness(spec: &str) -> Result<WitnessCoeffs, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{spec}: {e}")))?;
        let file = WitnessFile::parse(&text).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
        return file.to_coeffs().map_err(|e| CliError::Usage(format!("{spec}: {e}")));
    }
    presets::load(spec)
}

fn optimizer(g: &Global, restarts: usize) -> Result<OptimizerConfig, CliError> {
    let mut cfg = OptimizerConfig {
        restarts,
        seed: g.seed,
        ..OptimizerConfig::default()
    };
    if let Some(t) = g.tol {
        cfg.seesaw_tol = t;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:.12}{:+.12}i", z.re, z.im)
}

fn fmt_vec(v: &[Complex64; 3]) -> String {
    v.iter().map(|&z| fmt_complex(z)).collect::<Vec<_>>().join(" ")
}

fn cmd_basis_check(g: &Global, samples: usize, corrupt: Option<&str>) -> Result<(), CliError> {
    let b = match corrupt {
        None => basis().to_vec(),
        Some(spec) => {
            let parts: Vec<&str> = spec.split(':').collect();
            let bad = || CliError::Usage(format!("--corrupt expects K:ROW:COL:DELTA, got '{spec}'"));
            if parts.len() != 4 {
                return Err(bad());
            }
            let k: u8 = parts[0].parse().map_err(|_| bad())?;
            let row: usize = parts[1].parse().map_err(|_| bad())?;
            let col: usize = parts[2].parse().map_err(|_| bad())?;
            let delta: f64 = parts[3].parse().map_err(|_| bad())?;
            if row > 2 || col > 2 {
                return Err(bad());
            }
            let k = GellMannIndex::new(k).map_err(|e| CliError::Usage(e.to_string()))?;
            corrupted_basis(k, row, col, delta)
        }
    };
    let r = check_basis(&b, samples, g.seed)?;
    let mut rep = Report::default();
    rep.field(
        "orthogonality",
        format!("{}/{} orthogonality checks passed", r.orthogonality_passed, r.orthogonality_total),
    );
    rep.field(
        "hermitian_traceless",
        format!("{}/8 passed", 8 - r.hermitian_traceless_failures.len()),
    );
    rep.field(
        "bloch_norm",
        format!("{}/{} within 1e-12 of 4/3", r.bloch_passed, r.bloch_total),
    );
    rep.field("max_bloch_error", r.max_bloch_error);
    let mut t = Table::new(&["i", "j", "trace"]);
    for &(i, j, tr) in &r.orthogonality_failures {
        t.rows.push(vec![json!(i), json!(j), json!(tr)]);
    }
    if !t.rows.is_empty() {
        rep.table = Some(t);
    }
    emit(&rep.render(g.format.unwrap_or(Format::Kv))?, g.out.as_deref())?;
    if r.all_passed() {
        Ok(())
    } else {
        let first = r
            .orthogonality_failures
            .first()
            .map(|(i, j, t)| format!(" first failing pair ({i}, {j}): Tr = {t}"))
            .unwrap_or_default();
        Err(CliError::Validation(format!("basis identities failed;{first}")))
    }
}

fn cmd_vertices(g: &Global, family: &str) -> Result<(), CliError> {
    let kind = FamilyKind::parse(family).map_err(|e| CliError::Usage(e.to_string()))?;
    let fam = CoordinateFamily::new(kind);
    let names = fam.column_names();
    let mut header: Vec<&str> = vec!["index"];
    header.extend(names.iter().map(String::as_str));
    header.extend(["alpha", "beta"]);
    let mut t = Table::new(&header);
    for (k, (p, s)) in vertex_catalog(kind).iter().zip(catalog_states(kind)).enumerate() {
        let mut row = vec![json!(k + 1)];
        match &p.exact {
            Some(ex) => row.extend(ex.iter().map(|r| Value::String(r.to_string()))),
            None => row.extend(p.coords.iter().map(|&x| json!(x))),
        }
        row.push(Value::String(fmt_vec(&s.alpha)));
        row.push(Value::String(fmt_vec(&s.beta)));
        t.rows.push(row);
    }
    let mut rep = Report::default();
    rep.field("family", kind.name()).field("vertices", t.rows.len());
    rep.table = Some(t);
    emit(&rep.render(g.format.unwrap_or(Format::Csv))?, g.out.as_deref())
}

fn cmd_classify(g: &Global, spec: &str, restarts: usize) -> Result<(), CliError> {
    let w = load_witness(spec)?;
    let opts = ClassifyOptions {
        optimizer: optimizer(g, restarts)?,
        ..ClassifyOptions::default()
    };
    let r = classify(&w, &opts)?;
    let mut rep = Report::default();
    rep.field("witness", spec)
        .field("verdict", r.verdict.to_string())
        .field("min_eigenvalue", r.min_eigenvalue)
        .field("min_eigenvalue_pt", r.min_eigenvalue_pt)
        .field("min_product_expectation", r.min_product_expectation)
        .field("restarts_agreeing", r.restarts_agreeing)
        .field("minimizer_alpha", fmt_vec(&r.product_minimizer.alpha))
        .field("minimizer_beta", fmt_vec(&r.product_minimizer.beta));
    match &r.evidence {
        Evidence::None => {
            rep.field("evidence", "none");
        }
        Evidence::Certificate { source, certificate } => {
            rep.field("evidence", "certificate")
                .field("certificate_source", source.to_string())
                .field("residual", certificate.residual)
                .field("min_eig_p", certificate.min_eig_p)
                .field("min_eig_q", certificate.min_eig_q);
            if let CertificateSource::Transported { base, .. } = source {
                rep.field("certificate_base", base.as_str());
            }
        }
        Evidence::DetectingState {
            origin,
            expectation,
            ppt_min_eigenvalue,
        } => {
            rep.field("evidence", "detecting-state")
                .field("detecting_state", origin.to_string())
                .field("detecting_expectation", *expectation)
                .field("detecting_ppt_min_eigenvalue", *ppt_min_eigenvalue);
        }
    }
    emit(&rep.render(g.format.unwrap_or(Format::Kv))?, g.out.as_deref())
}

fn family_state(family: ScanFamily, a: f64, x: f64) -> Result<DensityOp, CliError> {
    match family {
        ScanFamily::Horodecki => Ok(horodecki(x)?),
        ScanFamily::Ppt => Ok(DensityOp::new(
            ppt_family_coeffs(a, x).assemble(),
            StateOrigin::PptFamily { a, c: x },
        )?),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    g: &Global,
    spec: &str,
    family: ScanFamily,
    a: f64,
    from: Option<f64>,
    to: Option<f64>,
    step: Option<f64>,
) -> Result<(), CliError> {
    let w = load_witness(spec)?;
    let (lo, hi) = match family {
        ScanFamily::Horodecki => (0.0, 5.0),
        ScanFamily::Ppt => {
            if !(a > 0.0 && a.is_finite()) {
                return Err(CliError::Usage(format!("--a must be positive, got {a}")));
            }
            (0.0, a / SQRT3)
        }
    };
    let from = from.unwrap_or(lo);
    let to = to.unwrap_or(hi);
    let slack = 1e-12 * hi.max(1.0);
    if !(from >= lo - slack && to <= hi + slack && from < to) {
        return Err(CliError::Usage(format!(
            "range [{from}, {to}] is outside the family domain [{lo}, {hi}] or empty"
        )));
    }
    let (from, to) = (from.max(lo), to.min(hi));
    let step = step.unwrap_or((to - from) / 100.0);
    if !(step > 0.0) {
        return Err(CliError::Usage(format!("--step must be positive, got {step}")));
    }
    let n = ((to - from) / step - 1e-9).ceil().max(1.0) as usize;
    if n > 10_000_000 {
        return Err(CliError::Usage(format!("{n} scan points is too many")));
    }
    let params: Vec<f64> = (0..=n).map(|k| if k == n { to } else { from + k as f64 * step }).collect();
    let eval = |x: f64| -> Result<f64, CliError> { Ok(expectation(&w, &family_state(family, a, x)?)?) };
    let mut t = Table::new(&["param", "expectation", "ppt", "ppt_min_eigenvalue"]);
    let mut values = Vec::with_capacity(params.len());
    for &x in &params {
        let rho = family_state(family, a, x)?;
        let e = expectation(&w, &rho)?;
        let (ppt, min) = is_ppt(&rho);
        t.rows.push(vec![json!(x), json!(e), json!(ppt), json!(min)]);
        values.push(e);
    }
    let tol = g.tol.unwrap_or(1e-12);
    let mut roots = Vec::new();
    for k in 1..params.len() {
        if (values[k - 1] < 0.0) != (values[k] < 0.0) {
            let root = bisect(|x| eval(x).unwrap_or(f64::NAN), params[k - 1], params[k], tol)?;
            roots.push(root);
        }
    }
    let mut rep = Report::default();
    rep.field("witness", spec)
        .field("family", format!("{family:?}").to_lowercase())
        .field("points", params.len())
        .field("roots", Value::Array(roots.iter().map(|&r| json!(r)).collect()));
    rep.table = Some(t);
    let fmt = g.format.unwrap_or(Format::Csv);
    if fmt == Format::Csv {
        for r in &roots {
            eprintln!("root {r:.15}");
        }
    }
    emit(&rep.render(fmt)?, g.out.as_deref())
}

fn cmd_refine(g: &Global, seed_preset: &str, max_iters: usize, restarts: usize) -> Result<(), CliError> {
    let (seed, kind) = match seed_preset.split_once(':') {
        Some(("facet", bits)) => {
            let s = FacetSigns::parse(bits).map_err(|e| CliError::Usage(e.to_string()))?;
            (diag_facet_vertices(s), FamilyKind::Diag)
        }
        _ => match seed_preset {
            "horodecki-upper" => (horodecki_upper_seed(), FamilyKind::OffdiagB),
            "horodecki-lower" => (horodecki_lower_seed(), FamilyKind::OffdiagB),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown seed '{other}' (expected horodecki-upper, horodecki-lower or facet:<bits>)"
                )))
            }
        },
    };
    let fam = CoordinateFamily::new(kind);
    let mut cfg = RefineConfig {
        optimizer: optimizer(g, restarts)?,
        max_iters,
        ..RefineConfig::default()
    };
    if let Some(t) = g.tol {
        cfg.tol = t;
    }
    let out = refine_facet(&seed, &fam, &cfg)?;
    let dir = bundle_dir(g.out.as_deref());
    let fmt = g.format.unwrap_or(Format::Kv);

    let file = WitnessFile::from_coeffs(&out.witness, Some(seed_preset), Some("refine"));
    let text = if fmt == Format::Json { file.to_json() } else { file.to_kv() };
    write_atomic(&dir.join(format!("witness.{}", fmt.witness_ext())), &text)?;

    let names = fam.column_names();
    let mut header = vec!["iteration", "max_value", "replaced"];
    header.extend(names.iter().map(String::as_str));
    let mut trace = Table::new(&header);
    let mut sets = Table::new(&[&["iteration", "slot"][..], &names.iter().map(String::as_str).collect::<Vec<_>>()].concat());
    let mut points: Vec<FeasiblePoint> = seed.clone();
    for step in &out.trace {
        let mut row = vec![json!(step.iteration), json!(step.max_value)];
        row.push(step.replaced.map_or(Value::Null, |k| json!(k)));
        row.extend(step.plane.normal.iter().map(|&x| json!(x)));
        trace.rows.push(row);
        for (slot, p) in points.iter().enumerate() {
            let mut r = vec![json!(step.iteration), json!(slot)];
            r.extend(p.coords.iter().map(|&x| json!(x)));
            sets.rows.push(r);
        }
        if let Some(k) = step.replaced {
            points[k] = step.maximizer.clone();
        }
    }
    write_atomic(&dir.join("trace.csv"), &trace.to_csv()?)?;
    write_atomic(&dir.join("point-sets.csv"), &sets.to_csv()?)?;

    let mut rep = Report::default();
    rep.field("seed", seed_preset)
        .field("iterations", out.iterations)
        .field("tangent_offset", out.tangent_offset)
        .field("normal", Value::Array(out.plane.normal.iter().map(|&x| json!(x)).collect()))
        .field("output_dir", dir.display().to_string());
    if kind == FamilyKind::OffdiagB {
        let reference = horodecki_upper_plane();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut r = reference.normal.clone();
        if seed_preset == "horodecki-lower" {
            r[8] = -r[8];
            r[9] = -r[9];
        }
        let k = norm(&out.plane.normal) / norm(&r);
        let err = out
            .plane
            .normal
            .iter()
            .zip(&r)
            .map(|(x, y)| (x / k - y).abs())
            .fold(0.0, f64::max)
            / norm(&r);
        rep.field("reference_normal_rel_error", err);
    }
    print!("{}", rep.render(if fmt == Format::Csv { Format::Kv } else { fmt })?);
    Ok(())
}

fn parse_generators(s: &str) -> Result<Vec<SymmetryGenerator>, CliError> {
    match s {
        "first" => Ok(first_category()),
        "second" => Ok(second_category()),
        list => list
            .split(',')
            .map(|g| SymmetryGenerator::parse(g.trim()).map_err(|e| CliError::Usage(e.to_string())))
            .collect(),
    }
}

fn cmd_orbit(g: &Global, spec: &str, generators: &str, cap: usize) -> Result<(), CliError> {
    let w = load_witness(spec)?;
    let gens = parse_generators(generators)?;
    let orb = orbit(&w, &gens, cap)?;
    let dir = bundle_dir(g.out.as_deref());
    let fmt = g.format.unwrap_or(Format::Kv);
    let width = orb.len().to_string().len().max(4);
    let mut t = Table::new(&["index", "word", "file"]);
    for (k, m) in orb.members.iter().enumerate() {
        let word: Vec<&str> = m.word.iter().map(|g| g.name()).collect();
        let word = if word.is_empty() { "id".to_string() } else { word.join(".") };
        let name = format!("member-{k:0width$}.{}", fmt.witness_ext());
        let file = WitnessFile::from_coeffs(&m.witness, Some(&word), Some(spec));
        let text = if fmt == Format::Json { file.to_json() } else { file.to_kv() };
        write_atomic(&dir.join(&name), &text)?;
        t.rows.push(vec![json!(k), Value::String(word), Value::String(name)]);
    }
    write_atomic(&dir.join("orbit.csv"), &t.to_csv()?)?;
    let mut rep = Report::default();
    rep.field("witness", spec)
        .field("generators", gens.iter().map(|g| g.name()).collect::<Vec<_>>().join(","))
        .field("size", orb.len())
        .field("output_dir", dir.display().to_string());
    print!("{}", rep.render(if fmt == Format::Csv { Format::Kv } else { fmt })?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::BasisCheck { samples, corrupt } => cmd_basis_check(g, *samples, corrupt.as_deref()),
        Command::Vertices { family } => cmd_vertices(g, family),
        Command::Classify { witness, restarts } => cmd_classify(g, witness, *restarts),
        Command::Scan {
            witness,
            family,
            a,
            from,
            to,
            step,
        } => cmd_scan(g, witness, *family, *a, *from, *to, *step),
        Command::Refine {
            seed_preset,
            max_iters,
            restarts,
        } => cmd_refine(g, seed_preset, *max_iters, *restarts),
        Command::Orbit { witness, generators, cap } => cmd_orbit(g, witness, generators, *cap),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qwit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use qutrit_witness::feasible::expectation_map;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        use qutrit_witness::Error as E;
        assert_eq!(CliError::from(E::Cycle(3)).exit_code(), 3);
        assert_eq!(CliError::from(E::InvalidParameter("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(E::NotAWitness("x".into())).exit_code(), 1);
    }

    #[test]
    fn seed_point_expectations_match() {
        let fam = CoordinateFamily::new(FamilyKind::OffdiagB);
        for p in horodecki_upper_seed() {
            let q = expectation_map(&p.state.unwrap(), &fam);
            assert_eq!(p.coords, q.coords);
        }
    }
}
