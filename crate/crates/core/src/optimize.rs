//! Extremization of `<alpha (x) beta| W |alpha (x) beta>` over pure product
//! states: multi-start seesaw plus a coarse grid oracle.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{c64, hermitian_eigen, CMat};
use crate::states::ProductState;
use crate::su3::random_unit;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seesaw_tol: f64,
    pub max_alternations: usize,
    pub seed: u64,
    pub cluster_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            seesaw_tol: 1e-12,
            max_alternations: 500,
            seed: 0x5eed,
            cluster_tol: 1e-8,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_alternations == 0 {
            return Err(Error::InvalidParameter("restarts and max_alternations must be positive".into()));
        }
        if !(self.seesaw_tol > 0.0 && self.cluster_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Endpoint of one seesaw restart.
#[derive(Clone, Debug)]
pub struct RestartRecord {
    pub index: usize,
    pub value: f64,
    pub state: ProductState,
    pub alternations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct ExtremumResult {
    pub value: f64,
    pub state: ProductState,
    pub restarts_agreeing: usize,
    pub trace: Vec<RestartRecord>,
}

/// Full history of a single seesaw run.
#[derive(Clone, Debug)]
pub struct SeesawRun {
    /// Objective after every half step.
    pub values: Vec<f64>,
    pub state: ProductState,
    pub value: f64,
    pub alternations: usize,
    pub converged: bool,
}

fn check_9x9(w: &CMat) -> Result<()> {
    if w.rows() != 9 || w.cols() != 9 {
        return Err(Error::Dimension(format!("expected 9x9, got {}x{}", w.rows(), w.cols())));
    }
    Ok(())
}

/// `B[k,l] = sum_ij conj(a_i) a_j W[(i,k),(j,l)]`.
pub fn contract_first(w: &CMat, alpha: &[Complex64; 3]) -> CMat {
    let mut b = CMat::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let f = alpha[i].conj() * alpha[j];
            for k in 0..3 {
                for l in 0..3 {
                    b[(k, l)] += f * w[(3 * i + k, 3 * j + l)];
                }
            }
        }
    }
    b
}

/// `A[i,j] = sum_kl conj(b_k) b_l W[(i,k),(j,l)]`.
pub fn contract_second(w: &CMat, beta: &[Complex64; 3]) -> CMat {
    let mut a = CMat::zeros(3, 3);
    for k in 0..3 {
        for l in 0..3 {
            let f = beta[k].conj() * beta[l];
            for i in 0..3 {
                for j in 0..3 {
                    a[(i, j)] += f * w[(3 * i + k, 3 * j + l)];
                }
            }
        }
    }
    a
}

fn min_eigvec3(m: &CMat) -> Result<([Complex64; 3], f64)> {
    let e = hermitian_eigen(m, 1e-9)?;
    let v = e.vector(0);
    Ok(([v[0], v[1], v[2]], e.values[0]))
}

/// Best `beta` for fixed `alpha`: the minimal eigenvector of the first-factor
/// contraction, with its eigenvalue.
pub fn seesaw_step(w: &CMat, alpha: &[Complex64; 3]) -> Result<([Complex64; 3], f64)> {
    check_9x9(w)?;
    crate::su3::check_unit(alpha, 1e-10)?;
    min_eigvec3(&contract_first(w, alpha))
}

/// Best `alpha` for fixed `beta`.
pub fn seesaw_step_second(w: &CMat, beta: &[Complex64; 3]) -> Result<([Complex64; 3], f64)> {
    check_9x9(w)?;
    crate::su3::check_unit(beta, 1e-10)?;
    min_eigvec3(&contract_second(w, beta))
}

/// Alternating minimization from a given first factor.
pub fn seesaw_run(w: &CMat, alpha0: [Complex64; 3], cfg: &OptimizerConfig) -> Result<SeesawRun> {
    check_9x9(w)?;
    let mut alpha = alpha0;
    let (mut beta, mut prev) = seesaw_step(w, &alpha)?;
    let mut values = vec![prev];
    let mut quiet = 0;
    let mut converged = false;
    let mut alternations = 0;
    while alternations < cfg.max_alternations {
        alternations += 1;
        let (a, v1) = seesaw_step_second(w, &beta)?;
        alpha = a;
        values.push(v1);
        let (b, v2) = seesaw_step(w, &alpha)?;
        beta = b;
        values.push(v2);
        if prev - v2 < cfg.seesaw_tol {
            quiet += 1;
            if quiet >= 3 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
        prev = v2;
    }
    let state = ProductState { alpha, beta };
    let value = state.expectation(w);
    Ok(SeesawRun {
        values,
        state,
        value,
        alternations,
        converged,
    })
}

/// Starting vector of restart `index`; independent of scheduling.
pub fn restart_start(seed: u64, index: usize) -> [Complex64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    random_unit(&mut rng)
}

/// Multi-start seesaw estimate of the minimum over product states.
pub fn min_product_expectation(w: &CMat, cfg: &OptimizerConfig) -> Result<ExtremumResult> {
    check_9x9(w)?;
    cfg.validate()?;
    let defect = w.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let runs: Vec<Result<RestartRecord>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|index| {
            let run = seesaw_run(w, restart_start(cfg.seed, index), cfg)?;
            Ok(RestartRecord {
                index,
                value: run.value,
                state: run.state,
                alternations: run.alternations,
                converged: run.converged,
            })
        })
        .collect();
    let trace = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let best = trace
        .iter()
        .filter(|r| r.converged)
        .min_by(|a, b| a.value.total_cmp(&b.value).then(a.index.cmp(&b.index)))
        .ok_or_else(|| {
            Error::NonConvergence(format!(
                "none of {} seesaw restarts converged within {} alternations",
                cfg.restarts, cfg.max_alternations
            ))
        })?;
    let restarts_agreeing = trace
        .iter()
        .filter(|r| (r.value - best.value).abs() <= cfg.cluster_tol)
        .count();
    Ok(ExtremumResult {
        value: best.value,
        state: best.state,
        restarts_agreeing,
        trace,
    })
}

/// Maximum over product states, as the negated minimum of `-W`.
pub fn max_product_expectation(w: &CMat, cfg: &OptimizerConfig) -> Result<ExtremumResult> {
    let mut r = min_product_expectation(&w.scale(-1.0), cfg)?;
    r.value = -r.value;
    for t in &mut r.trace {
        t.value = -t.value;
    }
    Ok(r)
}

/// Eigenvalues of a Hermitian 3x3 matrix in closed form, ascending.
pub fn eigenvalues3(m: &CMat) -> [f64; 3] {
    let a = |i: usize, j: usize| m[(i, j)];
    let q = (a(0, 0).re + a(1, 1).re + a(2, 2).re) / 3.0;
    let p1 = a(0, 1).norm_sqr() + a(0, 2).norm_sqr() + a(1, 2).norm_sqr();
    let d0 = a(0, 0).re - q;
    let d1 = a(1, 1).re - q;
    let d2 = a(2, 2).re - q;
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    if p2 <= 1e-300 {
        return [q; 3];
    }
    let p = (p2 / 6.0).sqrt();
    // det of (M - qI) for a Hermitian matrix
    let det = d0 * d1 * d2 + 2.0 * (a(0, 1) * a(1, 2) * a(2, 0)).re
        - d0 * a(1, 2).norm_sqr()
        - d1 * a(0, 2).norm_sqr()
        - d2 * a(0, 1).norm_sqr();
    let r = (det / (2.0 * p * p * p)).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let mid = 3.0 * q - hi - lo;
    [lo, mid, hi]
}

/// Extrema found by the grid oracle.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub resolution: usize,
    pub evaluations: usize,
    pub min: f64,
    pub argmin_alpha: [Complex64; 3],
    pub max: f64,
    pub argmax_alpha: [Complex64; 3],
}

/// First factor on the grid point `(theta, phi, d1, d2)`.
pub fn grid_alpha(theta: f64, phi: f64, d1: f64, d2: f64) -> [Complex64; 3] {
    [
        c64(theta.sin() * phi.cos(), 0.0),
        Complex64::from_polar(theta.sin() * phi.sin(), d1),
        Complex64::from_polar(theta.cos(), d2),
    ]
}

/// Grid oracle: `alpha` runs over `|alpha_0| = sin t cos f`,
/// `|alpha_1| = sin t sin f`, `|alpha_2| = cos t` with `t, f` on
/// `resolution` points of `[0, pi/2]` and two relative phases on
/// `resolution` points of `[0, 2 pi)`. The second factor is optimized
/// exactly through the closed-form spectrum of the 3x3 contraction, so no
/// iterative solver is involved.
pub fn parametrized_scan(w: &CMat, resolution: usize) -> Result<ScanResult> {
    check_9x9(w)?;
    if resolution < 8 {
        return Err(Error::InvalidParameter(format!("scan resolution {resolution} < 8")));
    }
    let n = resolution;
    let ang = |k: usize| FRAC_PI_2 * k as f64 / (n - 1) as f64;
    let ph = |k: usize| 2.0 * PI * k as f64 / n as f64;
    type Best = (f64, [Complex64; 3], f64, [Complex64; 3]);
    let fold = |acc: Best, x: Best| -> Best {
        let (mut lo, mut la, mut hi, mut ha) = acc;
        if x.0 < lo {
            lo = x.0;
            la = x.1;
        }
        if x.2 > hi {
            hi = x.2;
            ha = x.3;
        }
        (lo, la, hi, ha)
    };
    let zero = [c64(0.0, 0.0); 3];
    let init: Best = (f64::INFINITY, zero, f64::NEG_INFINITY, zero);
    // deterministic: reduce per theta row sequentially, then rows in order
    let rows: Vec<Best> = (0..n)
        .into_par_iter()
        .map(|ti| {
            let mut acc = init;
            for fi in 0..n {
                for d1 in 0..n {
                    for d2 in 0..n {
                        let a = grid_alpha(ang(ti), ang(fi), ph(d1), ph(d2));
                        let e = eigenvalues3(&contract_first(w, &a));
                        acc = fold(acc, (e[0], a, e[2], a));
                    }
                }
            }
            acc
        })
        .collect();
    let (min, argmin_alpha, max, argmax_alpha) = rows.into_iter().fold(init, fold);
    Ok(ScanResult {
        resolution: n,
        evaluations: n * n * n * n,
        min,
        argmin_alpha,
        max,
        argmax_alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::operators::{approx_facet_w1, FacetSigns, WitnessCoeffs};
    use crate::states::tangent_family_state;
    use crate::su3::{gellmann, GellMannIndex};
    use proptest::prelude::*;

    fn l(k: u8) -> &'static CMat {
        gellmann(GellMannIndex::new(k).unwrap())
    }

    fn small() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 16,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn step_on_identity() {
        let a = [c64(0.6, 0.0), c64(0.0, 0.8), c64(0.0, 0.0)];
        let (_, v) = seesaw_step(&CMat::identity(9), &a).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn step_on_lambda3_squared() {
        let w = kron(l(3), l(3)).unwrap();
        let (b, v) = seesaw_step(&w, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap();
        assert!((v + 1.0).abs() < 1e-14);
        assert!((b[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step_is_a_lower_bound_over_beta() {
        let w = approx_facet_w1(FacetSigns::default()).assemble();
        let a = restart_start(3, 0);
        let (_, v) = seesaw_step(&w, &a).unwrap();
        for i in 0..50 {
            let b = restart_start(4, i);
            let g = ProductState { alpha: a, beta: b };
            assert!(v <= g.expectation(&w) + 1e-12);
        }
    }

    #[test]
    fn tangent_family_is_a_zero_of_approx_facet() {
        let w = approx_facet_w1(FacetSigns::default()).assemble();
        let g = tangent_family_state(std::f64::consts::FRAC_PI_4, 0.0, 0.0);
        let (b, v) = seesaw_step(&w, &g.alpha).unwrap();
        assert!(v.abs() < 1e-12);
        let overlap: Complex64 = b.iter().zip(&g.alpha).map(|(x, y)| x.conj() * y).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn psd_operator_min_is_nonnegative() {
        let w = WitnessCoeffs::new(1.0).assemble();
        let r = min_product_expectation(&w, &small()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.restarts_agreeing, 16);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let w = approx_facet_w1(FacetSigns::from_code(5)).assemble();
        let a = min_product_expectation(&w, &small()).unwrap();
        let b = min_product_expectation(&w, &small()).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn reported_value_matches_state() {
        let w = approx_facet_w1(FacetSigns::from_code(9)).assemble();
        let r = min_product_expectation(&w, &small()).unwrap();
        assert!((r.state.expectation(&w) - r.value).abs() < 1e-12);
    }

    #[test]
    fn closed_form_eigenvalues_match_jacobi() {
        for s in 0..40u64 {
            let w = approx_facet_w1(FacetSigns::from_code((s % 64) as u8)).assemble();
            let b = contract_first(&w, &restart_start(s, 1));
            let e = hermitian_eigen(&b, 1e-10).unwrap().values;
            let c = eigenvalues3(&b);
            for k in 0..3 {
                assert!((e[k] - c[k]).abs() < 1e-10);
            }
        }
        let d = eigenvalues3(&CMat::identity(3));
        assert_eq!(d, [1.0; 3]);
    }

    #[test]
    fn scan_of_constant_operator() {
        let r = parametrized_scan(&CMat::identity(9).scale(0.7), 8).unwrap();
        assert!((r.min - 0.7).abs() < 1e-14 && (r.max - 0.7).abs() < 1e-14);
        assert!(parametrized_scan(&CMat::identity(9), 4).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn seesaw_never_increases(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut w = CMat::zeros(9, 9);
            use rand::Rng;
            for i in 0..9 {
                w[(i, i)] = c64(rng.random_range(-1.0..1.0), 0.0);
                for j in (i + 1)..9 {
                    let z = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    w[(i, j)] = z;
                    w[(j, i)] = z.conj();
                }
            }
            let run = seesaw_run(&w, random_unit(&mut rng), &OptimizerConfig::default()).unwrap();
            for pair in run.values.windows(2) {
                prop_assert!(pair[1] <= pair[0] + 1e-12);
            }
        }
    }
}
