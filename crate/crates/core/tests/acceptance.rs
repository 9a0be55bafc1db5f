//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qutrit_witness::feasible::{
    approx_plane_w1, classify_diag_facets, hyperplane_through, horodecki_lower_seed,
    horodecki_upper_plane, horodecki_upper_points, horodecki_upper_seed, offdiag_a_plane,
    refine_facet, vertex_catalog, CoordinateFamily, FamilyKind, Hyperplane, RefineConfig,
    RefineOutcome,
};
use qutrit_witness::linalg::{c64, partial_transpose_first, CMat};
use qutrit_witness::operators::{
    approx_facet_certificate, approx_facet_w1, approx_facet_w2, approx_facet_w3,
    case_c_certificate, case_c_witness, diag_facet_witness, expectation, horodecki_lower_witness,
    horodecki_upper_witness, offdiag_a_witness, verify_decomposition, ClassifyOptions, DiagCase,
    FacetSigns, OperatorLabel, Verdict, WitnessCoeffs, HORODECKI_OFFSET,
    HORODECKI_TANGENT_OFFSET, OFFDIAG_A_OFFSET, OFFDIAG_A_TANGENT_OFFSET, WITNESS_TOL,
};
use qutrit_witness::optimize::{
    max_product_expectation, min_product_expectation, parametrized_scan, seesaw_run,
    OptimizerConfig,
};
use qutrit_witness::states::{
    bisect, horodecki, locate_ppt_boundary, ppt_family, ppt_family_coeffs, ppt_min_eigenvalue,
    horodecki_coeffs, DensityOp, StateOrigin, PSD_TOL,
};
use qutrit_witness::su3::{basis, check_basis, random_unit, SQRT3};
use qutrit_witness::symmetry::{
    act, exchange_op, first_category, m_action, orbit, SymmetryGenerator, DEFAULT_ORBIT_CAP,
};

// pinned tolerances
const TRACE_TOL: f64 = 1e-15;
const BLOCH_TOL: f64 = 1e-12;
const TABLE4_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-12;
const EXTREMUM_TOL: f64 = 1e-7;
const MAXIMIZER_TOL: f64 = 1e-4;
const MIN_AGREEING: usize = 8;
const BISECT_TOL: f64 = 1e-9;
const CLOSED_FORM_TOL: f64 = 1e-12;
const BOUNDARY_EIG_TOL: f64 = 1e-9;
const NORMAL_REL_TOL: f64 = 1e-6;
const OFFSET_TOL: f64 = 1e-6;
const ACTION_TOL: f64 = 1e-12;
const ORACLE_TOL: f64 = 2e-3;
const ORACLE_RESOLUTION: usize = 64;
const PT_TOL: f64 = 1e-12;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(checks: Vec<(bool, String)>) -> Outcome {
    let ok = checks.iter().all(|c| c.0);
    let detail = checks
        .into_iter()
        .map(|(ok, s)| if ok { s } else { format!("[x] {s}") })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { ok, detail }
}

fn r(n: i64, d: i64) -> Ratio<i64> {
    Ratio::new(n, d)
}

fn optimizer() -> OptimizerConfig {
    OptimizerConfig {
        restarts: 64,
        ..OptimizerConfig::default()
    }
}

fn criterion_1() -> Outcome {
    let report = check_basis(&basis()[..], 1000, 2024).expect("valid basis shape");
    let mut worst: f64 = 0.0;
    for (i, a) in basis().iter().enumerate() {
        for (j, b) in basis().iter().enumerate() {
            let t = (a * b).trace();
            let expect = if i == j { 2.0 } else { 0.0 };
            worst = worst.max((t.re - expect).abs()).max(t.im.abs());
        }
    }
    outcome(vec![
        (
            report.orthogonality_passed == 64 && worst <= TRACE_TOL,
            format!("trace orthogonality 64 pairs, max error {worst:.1e}"),
        ),
        (
            report.bloch_passed == 1000 && report.max_bloch_error <= BLOCH_TOL,
            format!("Bloch norm 4/3 on 1000 states, max error {:.1e}", report.max_bloch_error),
        ),
    ])
}

fn rows_pm(base: &[Ratio<i64>], k: usize) -> Vec<Vec<Ratio<i64>>> {
    let mut a = base.to_vec();
    let mut b = base.to_vec();
    a[k] = r(1, 1);
    b[k] = r(-1, 1);
    vec![a, b]
}

fn printed_diag_rows(extra: usize) -> Vec<Vec<Ratio<i64>>> {
    let z = r(0, 1);
    let mut rows = Vec::new();
    for k in 0..7 {
        let mut base = vec![z; 8 + extra];
        if k < 3 {
            base[7] = r(1, 3);
        } else {
            base[2] = r(1, 4);
            base[7] = r(1, 12);
        }
        rows.extend(rows_pm(&base, k));
    }
    let mut v = vec![z; 8 + extra];
    v[7] = r(4, 3);
    rows.push(v.clone());
    v[7] = r(-2, 3);
    rows.push(v);
    rows
}

fn table1() -> Vec<Vec<Ratio<i64>>> {
    printed_diag_rows(0)
}

fn table2() -> Vec<Vec<Ratio<i64>>> {
    let z = r(0, 1);
    let mut rows = printed_diag_rows(6);
    for k in 8..14 {
        let mut base = vec![z; 14];
        if k < 10 {
            base[7] = r(1, 3);
        } else {
            base[2] = r(1, 4);
            base[7] = r(1, 12);
        }
        rows.extend(rows_pm(&base, k));
    }
    rows
}

fn table3() -> Vec<Vec<Ratio<i64>>> {
    let z = r(0, 1);
    let row = |entries: &[(usize, Ratio<i64>)]| {
        let mut v = vec![z; 10];
        for &(k, x) in entries {
            v[k] = x;
        }
        v
    };
    let (one, m1) = (r(1, 1), r(-1, 1));
    let third = r(1, 3);
    let mut rows = Vec::new();
    for k in 0..2 {
        rows.push(row(&[(k, one), (7, third)]));
        rows.push(row(&[(k, m1), (7, third)]));
    }
    rows.push(row(&[(2, one), (7, third), (8, one), (9, one)]));
    rows.push(row(&[(2, one), (7, third), (8, m1), (9, m1)]));
    rows.push(row(&[(2, m1), (7, third), (8, one), (9, m1)]));
    rows.push(row(&[(2, m1), (7, third), (8, m1), (9, one)]));
    for k in 3..7 {
        let c = if k < 5 { r(-1, 4) } else { r(1, 4) };
        for s in [one, m1] {
            rows.push(row(&[(2, r(1, 4)), (k, s), (7, r(1, 12)), (8, c), (9, c)]));
        }
    }
    rows.push(row(&[(7, r(4, 3))]));
    for k in [8, 9] {
        for s in [r(2, 1), r(-2, 1)] {
            rows.push(row(&[(7, r(-2, 3)), (k, s)]));
        }
    }
    rows
}

fn table4() -> Vec<Vec<f64>> {
    let f = |n: f64, d: f64| n / d;
    vec![
        vec![0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, f(1.0, 3.0), 1.0, -1.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, f(-2.0, 3.0), 2.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, f(-2.0, 3.0), 0.0, -2.0],
        vec![f(4.0, 9.0), 0.0, 0.0, f(4.0, 9.0), 0.0, f(4.0, 9.0), 0.0, 0.0, 0.0, 0.0],
        vec![f(4.0, 9.0), 0.0, 0.0, f(1.0, 9.0), f(-1.0, 3.0), f(1.0, 9.0), f(-1.0, 3.0), 0.0, 0.0, 0.0],
        vec![0.0, f(-4.0, 9.0), 0.0, 0.0, f(-4.0, 9.0), f(4.0, 9.0), 0.0, 0.0, 0.0, 0.0],
        vec![0.0, f(-4.0, 9.0), 0.0, f(4.0, 9.0), 0.0, 0.0, f(-4.0, 9.0), 0.0, 0.0, 0.0],
        vec![0.0, 0.0, f(3.0, 16.0), 0.0, 0.0, f(3.0, 4.0), 0.0, f(-5.0, 48.0), f(15.0, 16.0), f(-1.0, 16.0)],
        vec![f(64.0, 225.0), 0.0, 0.0, f(112.0, 225.0), 0.0, f(112.0, 225.0), 0.0, f(4.0, 75.0), 0.0, 0.0],
        vec![
            f(2464.0, 9025.0),
            0.0,
            f(81.0, 1444.0),
            f(2592.0, 9025.0),
            0.0,
            f(6237.0, 9025.0),
            0.0,
            f(2809.0, 108300.0),
            f(477.0, 7220.0),
            f(477.0, 7220.0),
        ],
    ]
}

fn criterion_2() -> Outcome {
    let mut checks = Vec::new();
    for (kind, printed) in [
        (FamilyKind::Diag, table1()),
        (FamilyKind::OffdiagA, table2()),
        (FamilyKind::OffdiagB, table3()),
    ] {
        let computed: Option<Vec<Vec<Ratio<i64>>>> =
            vertex_catalog(kind).into_iter().map(|p| p.exact).collect();
        let ok = match computed {
            Some(mut c) => {
                let mut p = printed.clone();
                c.sort();
                p.sort();
                c == p
            }
            None => false,
        };
        checks.push((ok, format!("{kind} catalog {} rows exact", printed.len())));
    }
    let pts = horodecki_upper_points();
    let worst = pts
        .iter()
        .zip(table4())
        .flat_map(|(p, row)| p.coords.iter().zip(row).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    checks.push((worst <= TABLE4_TOL, format!("ten-vertex table max error {worst:.1e}")));
    outcome(checks)
}

fn criterion_3() -> Outcome {
    let opts = ClassifyOptions {
        optimizer: optimizer(),
        ..ClassifyOptions::default()
    };
    let reports = match classify_diag_facets(&opts) {
        Ok(r) => r,
        Err(e) => return outcome(vec![(false, format!("census failed: {e}"))]),
    };
    let positive: Vec<_> = reports.iter().filter(|r| r.report.verdict == Verdict::PositiveOperator).collect();
    let witnesses: Vec<_> = reports.iter().filter(|r| r.report.verdict != Verdict::PositiveOperator).collect();
    let pos_ok = positive.len() == 8 && positive.iter().all(|r| r.report.min_eigenvalue >= -PSD_TOL);
    let wit_ok = witnesses.len() == 56
        && witnesses.iter().all(|r| {
            r.report.min_eigenvalue < -WITNESS_TOL && r.report.min_product_expectation >= -WITNESS_TOL
        });
    let mut pt_ok = true;
    for s in FacetSigns::all() {
        let target = match s.case() {
            DiagCase::B => DiagCase::A,
            DiagCase::D => DiagCase::C,
            _ => continue,
        };
        let pt = s.partial_transpose();
        let exact = diag_facet_witness(s).partial_transpose() == diag_facet_witness(pt);
        pt_ok &= pt.case() == target && exact;
    }
    outcome(vec![
        (pos_ok, format!("{} positive operators", positive.len())),
        (wit_ok, format!("{} witnesses", witnesses.len())),
        (pt_ok, "case b -> a and d -> c under partial transpose".into()),
    ])
}

fn criterion_4() -> Outcome {
    let mut checks = Vec::new();
    for (name, w, (p, q)) in [
        ("case-c facet", case_c_witness(), case_c_certificate()),
        ("approximated facet", approx_facet_w1(FacetSigns::default()), approx_facet_certificate()),
    ] {
        let c = verify_decomposition(&w, &p, &q).expect("9x9 operators");
        checks.push((
            c.residual <= RESIDUAL_TOL && c.min_eig_p >= -PSD_TOL && c.min_eig_q >= -PSD_TOL,
            format!(
                "{name}: residual {:.1e}, min eig P {:.1e}, Q {:.1e}",
                c.residual, c.min_eig_p, c.min_eig_q
            ),
        ));
    }
    outcome(checks)
}

fn criterion_5() -> Outcome {
    let cfg = optimizer();
    let mut checks = Vec::new();
    let fam_d = CoordinateFamily::new(FamilyKind::Diag);
    let fam_a = CoordinateFamily::new(FamilyKind::OffdiagA);
    let cases: [(&str, WitnessCoeffs, f64, Option<f64>); 3] = [
        ("approximated diagonal plane", fam_d.plane_functional(&approx_plane_w1(FacetSigns::default())), 3.0 / 8.0, Some(0.5)),
        ("off-diagonal plane", fam_a.plane_functional(&offdiag_a_plane()), 0.75, None),
        (
            "shifted off-diagonal plane",
            fam_a.plane_functional(&Hyperplane {
                offset: OFFDIAG_A_OFFSET,
                ..offdiag_a_plane()
            }),
            0.0,
            Some(FRAC_1_SQRT_2),
        ),
    ];
    for (name, f, expect, alpha2) in cases {
        match max_product_expectation(&f.assemble(), &cfg) {
            Ok(ext) => {
                let mut ok = (ext.value - expect).abs() <= EXTREMUM_TOL && ext.restarts_agreeing >= MIN_AGREEING;
                let mut s = format!(
                    "{name}: max {:.10} (expected {expect:.10}), {} agreeing",
                    ext.value, ext.restarts_agreeing
                );
                if let Some(a2) = alpha2 {
                    let got = ext.state.alpha[2].norm();
                    ok &= (got - a2).abs() <= MAXIMIZER_TOL;
                    s.push_str(&format!(", |alpha_2| {got:.6}"));
                }
                checks.push((ok, s));
            }
            Err(e) => checks.push((false, format!("{name}: {e}"))),
        }
    }
    outcome(checks)
}

fn criterion_6() -> Outcome {
    let mut checks = Vec::new();
    for (name, w, expect) in [
        ("upper Horodecki witness", horodecki_upper_witness(HORODECKI_OFFSET), 2869.0 / 912.0),
        ("lower Horodecki witness", horodecki_lower_witness(HORODECKI_OFFSET), 89.0 / 48.0),
    ] {
        let f = |b: f64| expectation(&w, &horodecki(b).expect("b in range")).expect("real");
        match bisect(f, 1.0, 4.0, 1e-12) {
            Ok(b) => checks.push((
                (b - expect).abs() <= BISECT_TOL,
                format!("{name}: sign change at b = {b:.10} (expected {expect:.10})"),
            )),
            Err(e) => checks.push((false, format!("{name}: {e}"))),
        }
    }
    let w = offdiag_a_witness(OFFDIAG_A_OFFSET);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let a = 0.5 + 2.5 * i as f64 / 19.0;
        for j in 0..20 {
            let c = a / SQRT3 * j as f64 / 19.0;
            let rho = DensityOp::new(ppt_family_coeffs(a, c).assemble(), StateOrigin::PptFamily { a, c })
                .expect("valid state");
            let e = expectation(&w, &rho).expect("real");
            worst = worst.max((e - 0.75 * (a - 2.0 * c) / (a + 2.0 * c)).abs());
        }
    }
    checks.push((worst <= CLOSED_FORM_TOL, format!("closed form on 20x20 grid, max error {worst:.1e}")));
    outcome(checks)
}

fn criterion_7() -> Outcome {
    let mut checks = Vec::new();
    let hm = |b: f64| horodecki_coeffs(b).assemble();
    let lo = locate_ppt_boundary(hm, 0.0, 2.5, 1e-12);
    let hi = locate_ppt_boundary(hm, 2.5, 5.0, 1e-12);
    let ppt_inside = (0..=300).all(|k| {
        let b = 1.0 + 3.0 * k as f64 / 300.0;
        ppt_min_eigenvalue(&hm(b)) >= -PSD_TOL
    });
    match (lo, hi) {
        (Ok(l), Ok(h)) => checks.push((
            (l - 1.0).abs() <= BISECT_TOL && (h - 4.0).abs() <= BISECT_TOL && ppt_inside,
            format!("Horodecki PPT on [{l:.10}, {h:.10}]"),
        )),
        (l, h) => checks.push((false, format!("Horodecki boundary search failed: {l:?} {h:?}"))),
    }
    let cmax = 1.0 / SQRT3;
    let edge = ppt_min_eigenvalue(&ppt_family_coeffs(1.0, cmax).assemble());
    let ppt_all = (0..=500).all(|k| ppt_family(1.0, cmax * k as f64 / 500.0).is_ok());
    checks.push((
        ppt_all && edge.abs() <= BOUNDARY_EIG_TOL,
        format!("PPT family up to c = 1/sqrt3, boundary eigenvalue {edge:.1e}"),
    ));
    let mut states_ok = true;
    for k in 0..=500 {
        let b = 5.0 * k as f64 / 500.0;
        states_ok &= horodecki(b).is_ok_and(|r| (r.matrix().trace().re - 1.0).abs() <= 1e-12);
        let c = cmax * k as f64 / 500.0;
        let rho = DensityOp::new(ppt_family_coeffs(1.0, c).assemble(), StateOrigin::PptFamily { a: 1.0, c });
        states_ok &= rho.is_ok_and(|r| (r.matrix().trace().re - 1.0).abs() <= 1e-12);
    }
    checks.push((states_ok, "both families PSD with unit trace on 501 points".into()));
    outcome(checks)
}

fn normal_rel_err(h: &Hyperplane, reference: &Hyperplane) -> (f64, f64) {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let k = norm(&h.normal) / norm(&reference.normal);
    let err = h
        .normal
        .iter()
        .zip(&reference.normal)
        .map(|(a, b)| (a / k - b).abs())
        .fold(0.0, f64::max)
        / norm(&reference.normal);
    (err, k)
}

fn refine_check(name: &str, out: Result<RefineOutcome, qutrit_witness::Error>, reference: &Hyperplane) -> (bool, String) {
    match out {
        Ok(o) => {
            let (err, k) = normal_rel_err(&o.plane, reference);
            let offset = o.tangent_offset / k;
            let ok = err <= NORMAL_REL_TOL && (offset - HORODECKI_OFFSET).abs() <= OFFSET_TOL;
            let normal: Vec<String> = o.plane.normal.iter().map(|x| format!("{x:.6}")).collect();
            (
                ok,
                format!(
                    "{name}: {} iterations, endpoint normal [{}], normal rel error {err:.2e}, tangent offset {offset:.10} (expected {:.10})",
                    o.iterations,
                    normal.join(", "),
                    HORODECKI_OFFSET
                ),
            )
        }
        Err(e) => (false, format!("{name}: {e}")),
    }
}

fn criterion_8() -> Outcome {
    let fam = CoordinateFamily::new(FamilyKind::OffdiagB);
    let cfg = RefineConfig {
        optimizer: optimizer(),
        ..RefineConfig::default()
    };
    let upper = horodecki_upper_plane();
    let lower = hyperplane_through(&qutrit_witness::feasible::horodecki_lower_points()).expect("independent");
    outcome(vec![
        refine_check("upper seed", refine_facet(&horodecki_upper_seed(), &fam, &cfg), &upper),
        refine_check("swapped seed", refine_facet(&horodecki_lower_seed(), &fam, &cfg), &lower),
    ])
}

fn criterion_9() -> Outcome {
    let pi = exchange_op();
    let perm = CMat::from_fn(9, 9, |r, c| c64(if c == 3 * (r % 3) + r / 3 { 1.0 } else { 0.0 }, 0.0));
    let pi_exact = pi.max_abs_diff(&perm);
    let mut entries = 0;
    let mut worst: f64 = 0.0;
    for g in [SymmetryGenerator::M1, SymmetryGenerator::M2, SymmetryGenerator::M3] {
        let u = g.local_unitary().expect("phase generator");
        for k in [1u8, 2, 4, 5, 6, 7] {
            let l = qutrit_witness::su3::gellmann_or_identity(k).expect("index");
            let img = u.matmul(&l).and_then(|m| m.matmul(&u.adjoint())).expect("3x3");
            let (t, s) = m_action(g, k);
            let expect = qutrit_witness::su3::gellmann_or_identity(t).expect("index").scale(s);
            worst = worst.max(img.max_abs_diff(&expect));
            entries += 1;
        }
    }
    let upper = horodecki_upper_witness(HORODECKI_OFFSET);
    let exchanged = act(SymmetryGenerator::Exchange, &upper);
    let exchange_exact = exchanged == horodecki_lower_witness(HORODECKI_OFFSET);
    let orbit_size = orbit(&offdiag_a_witness(OFFDIAG_A_OFFSET), &first_category(), DEFAULT_ORBIT_CAP)
        .map(|o| o.len())
        .unwrap_or(0);
    outcome(vec![
        (pi_exact < 1e-15, format!("exchange operator vs permutation {pi_exact:.1e}")),
        (entries == 18 && worst <= ACTION_TOL, format!("{entries} action entries, max error {worst:.1e}")),
        (exchange_exact, "exchange maps upper to lower witness exactly".into()),
        (orbit_size == 256, format!("off-diagonal witness orbit size {orbit_size}")),
    ])
}

fn random_hermitian(rng: &mut ChaCha8Rng) -> CMat {
    let mut w = CMat::zeros(9, 9);
    for i in 0..9 {
        w[(i, i)] = c64(rng.random_range(-1.0..1.0), 0.0);
        for j in (i + 1)..9 {
            let z = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            w[(i, j)] = z;
            w[(j, i)] = z.conj();
        }
    }
    w
}

fn named_witnesses() -> Vec<(&'static str, WitnessCoeffs)> {
    let s = FacetSigns::default();
    vec![
        ("diagonal facet", diag_facet_witness(FacetSigns::from_code(0b101000))),
        ("case-c facet", case_c_witness()),
        ("approximated facet 1", approx_facet_w1(s)),
        ("approximated facet 1 (signs 010101)", approx_facet_w1(FacetSigns::from_code(0b101010))),
        ("approximated facet 2", approx_facet_w2(s)),
        ("approximated facet 3", approx_facet_w3(s)),
        ("off-diagonal", offdiag_a_witness(OFFDIAG_A_OFFSET)),
        ("off-diagonal tangent", offdiag_a_witness(OFFDIAG_A_TANGENT_OFFSET)),
        ("upper Horodecki", horodecki_upper_witness(HORODECKI_OFFSET)),
        ("lower Horodecki", horodecki_lower_witness(HORODECKI_OFFSET)),
        ("upper Horodecki tangent", horodecki_upper_witness(HORODECKI_TANGENT_OFFSET)),
        ("lower Horodecki tangent", horodecki_lower_witness(HORODECKI_TANGENT_OFFSET)),
    ]
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97);
    let cfg = OptimizerConfig::default();
    let mut monotone = 0;
    for _ in 0..100 {
        let w = random_hermitian(&mut rng);
        let run = seesaw_run(&w, random_unit(&mut rng), &cfg).expect("9x9");
        if run.values.windows(2).all(|p| p[1] <= p[0] + 1e-12) {
            monotone += 1;
        }
    }
    let mut worst_oracle: f64 = 0.0;
    let mut worst_name = "";
    for (name, w) in named_witnesses() {
        let m = w.assemble();
        let seesaw = min_product_expectation(&m, &optimizer()).expect("converges").value;
        let grid = parametrized_scan(&m, ORACLE_RESOLUTION).expect("resolution").min;
        let d = (seesaw - grid).abs();
        if d > worst_oracle {
            worst_oracle = d;
            worst_name = name;
        }
    }
    let mut worst_pt: f64 = 0.0;
    for _ in 0..100 {
        let mut w = WitnessCoeffs::new(rng.random_range(-1.0..1.0));
        for i in 0..9u8 {
            for j in 0..9u8 {
                if (i, j) != (0, 0) {
                    w.set(OperatorLabel::unit(i, j), rng.random_range(-1.0..1.0));
                }
            }
        }
        let a = w.partial_transpose().assemble();
        let b = partial_transpose_first(&w.assemble()).expect("9x9");
        worst_pt = worst_pt.max(a.max_abs_diff(&b));
    }
    outcome(vec![
        (monotone == 100, format!("seesaw monotone on {monotone}/100 operators")),
        (
            worst_oracle <= ORACLE_TOL,
            format!("grid oracle agreement, worst {worst_oracle:.1e} ({worst_name})"),
        ),
        (worst_pt <= PT_TOL, format!("coefficient partial transpose, max error {worst_pt:.1e}")),
    ])
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, fn() -> Outcome); 10] = [
        (1, "Gell-Mann identities", criterion_1),
        (2, "vertex catalogs", criterion_2),
        (3, "diagonal facet census", criterion_3),
        (4, "decomposition residuals", criterion_4),
        (5, "optimizer analytic maxima", criterion_5),
        (6, "detection thresholds", criterion_6),
        (7, "PPT boundaries", criterion_7),
        (8, "facet refinement", criterion_8),
        (9, "symmetry", criterion_9),
        (10, "property suite", criterion_10),
    ];
    let mut failed = 0;
    for (n, title, run) in criteria {
        let t = Instant::now();
        let o = run();
        let tag = if o.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {n} ({title}): {} [{:.1}s]", o.detail, t.elapsed().as_secs_f64());
        failed += usize::from(!o.ok);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
