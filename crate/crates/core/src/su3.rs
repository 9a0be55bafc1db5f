//! Gell-Mann basis of su(3), its eigenvectors and the Bloch map.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{c64, CMat};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;
/// Squared Bloch norm of any unit vector in C^3.
pub const BLOCH_NORM_SQ: f64 = 4.0 / 3.0;

/// Index of a Gell-Mann matrix, 1..=8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GellMannIndex(u8);

impl GellMannIndex {
    pub fn new(k: u8) -> Result<Self> {
        if (1..=8).contains(&k) {
            Ok(Self(k))
        } else {
            Err(Error::InvalidLabel(format!("Gell-Mann index {k} not in 1..=8")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = GellMannIndex> {
        (1..=8).map(GellMannIndex)
    }

    /// Generators that are antisymmetric (purely imaginary).
    pub fn is_antisymmetric(self) -> bool {
        matches!(self.0, 2 | 5 | 7)
    }
}

impl TryFrom<u8> for GellMannIndex {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        Self::new(k)
    }
}

impl From<GellMannIndex> for u8 {
    fn from(k: GellMannIndex) -> u8 {
        k.0
    }
}

impl fmt::Display for GellMannIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn build_basis() -> [CMat; 8] {
    let z = c64(0.0, 0.0);
    let o = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    let s = 1.0 / SQRT3;
    let m = |v: [Complex64; 9]| CMat::from_rows(3, 3, v.to_vec()).expect("3x3");
    [
        m([z, o, z, o, z, z, z, z, z]),
        m([z, -i, z, i, z, z, z, z, z]),
        m([o, z, z, z, -o, z, z, z, z]),
        m([z, z, o, z, z, z, o, z, z]),
        m([z, z, -i, z, z, z, i, z, z]),
        m([z, z, z, z, z, o, z, o, z]),
        m([z, z, z, z, z, -i, z, i, z]),
        m([c64(s, 0.0), z, z, z, c64(s, 0.0), z, z, z, c64(-2.0 * s, 0.0)]),
    ]
}

/// The eight standard Gell-Mann matrices, built once.
pub fn basis() -> &'static [CMat; 8] {
    static BASIS: OnceLock<[CMat; 8]> = OnceLock::new();
    BASIS.get_or_init(build_basis)
}

pub fn gellmann(k: GellMannIndex) -> &'static CMat {
    &basis()[(k.0 - 1) as usize]
}

/// Gell-Mann matrix by raw index; index 0 gives the identity.
pub fn gellmann_or_identity(k: u8) -> Result<CMat> {
    if k == 0 {
        Ok(CMat::identity(3))
    } else {
        Ok(gellmann(GellMannIndex::new(k)?).clone())
    }
}

/// Expectations `<alpha|lambda_k|alpha>`, k = 1..8.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector(pub [f64; 8]);

impl BlochVector {
    pub fn get(&self, k: GellMannIndex) -> f64 {
        self.0[(k.0 - 1) as usize]
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

pub fn normalize3(v: [Complex64; 3]) -> Result<[Complex64; 3]> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(n.is_finite() && n > 1e-300) {
        return Err(Error::InvalidState("cannot normalize the zero vector".into()));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

pub fn check_unit(v: &[Complex64], tol: f64) -> Result<()> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (n - 1.0).abs() > tol {
        return Err(Error::InvalidState(format!("vector norm {n} is not 1")));
    }
    Ok(())
}

/// Bloch vector by closed-form expressions in the amplitudes.
pub fn bloch(alpha: &[Complex64; 3]) -> Result<BlochVector> {
    check_unit(alpha, 1e-12)?;
    Ok(bloch_unchecked(alpha))
}

pub(crate) fn bloch_unchecked(a: &[Complex64; 3]) -> BlochVector {
    let a01 = a[0].conj() * a[1];
    let a02 = a[0].conj() * a[2];
    let a12 = a[1].conj() * a[2];
    let n0 = a[0].norm_sqr();
    let n1 = a[1].norm_sqr();
    let n2 = a[2].norm_sqr();
    BlochVector([
        2.0 * a01.re,
        2.0 * a01.im,
        n0 - n1,
        2.0 * a02.re,
        2.0 * a02.im,
        2.0 * a12.re,
        2.0 * a12.im,
        (n0 + n1 + n2) / SQRT3 - SQRT3 * n2,
    ])
}

/// Eigenvalues of `lambda_k`, ascending.
pub fn eigenvalues(k: GellMannIndex) -> &'static [f64] {
    const PM: [f64; 3] = [-1.0, 0.0, 1.0];
    const L8: [f64; 2] = [-2.0 / SQRT3, 1.0 / SQRT3];
    if k.0 == 8 {
        &L8
    } else {
        &PM
    }
}

/// Unit eigenvector `|lambda_k; m>` with the first nonzero component real
/// positive. The doubly degenerate `1/sqrt(3)` eigenspace of `lambda_8` is
/// represented by `(1, 0, 0)`.
pub fn eigenstate(k: GellMannIndex, m: f64) -> Result<[Complex64; 3]> {
    const TOL: f64 = 1e-9;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c64(0.0, 0.0);
    let o = c64(1.0, 0.0);
    let r = c64(h, 0.0);
    let ih = c64(0.0, h);
    let sign = if (m - 1.0).abs() < TOL {
        1.0
    } else if (m + 1.0).abs() < TOL {
        -1.0
    } else if m.abs() < TOL {
        0.0
    } else if k.0 == 8 && (m - 1.0 / SQRT3).abs() < TOL {
        return Ok([o, z, z]);
    } else if k.0 == 8 && (m + 2.0 / SQRT3).abs() < TOL {
        return Ok([z, z, o]);
    } else {
        return Err(Error::InvalidParameter(format!(
            "{m} is not an eigenvalue of lambda_{k}"
        )));
    };
    let v = match (k.0, sign) {
        (8, _) => {
            return Err(Error::InvalidParameter(format!(
                "{m} is not an eigenvalue of lambda_8"
            )))
        }
        (1 | 2 | 3, s) if s == 0.0 => [z, z, o],
        (4 | 5, s) if s == 0.0 => [z, o, z],
        (6 | 7, s) if s == 0.0 => [o, z, z],
        (1, s) => [r, r * s, z],
        (2, s) => [r, ih * s, z],
        (3, s) if s > 0.0 => [o, z, z],
        (3, _) => [z, o, z],
        (4, s) => [r, z, r * s],
        (5, s) => [r, z, ih * s],
        (6, s) => [z, r, r * s],
        (7, s) => [z, r, ih * s],
        _ => unreachable!("index range checked at construction"),
    };
    Ok(v)
}

/// Outcome of the basis identity suite.
#[derive(Clone, Debug)]
pub struct BasisReport {
    pub orthogonality_passed: usize,
    pub orthogonality_total: usize,
    /// `(i, j, Tr(l_i l_j))` for failing pairs.
    pub orthogonality_failures: Vec<(usize, usize, f64)>,
    pub hermitian_traceless_failures: Vec<usize>,
    pub bloch_passed: usize,
    pub bloch_total: usize,
    pub max_bloch_error: f64,
}

impl BasisReport {
    pub fn all_passed(&self) -> bool {
        self.orthogonality_passed == self.orthogonality_total
            && self.bloch_passed == self.bloch_total
            && self.hermitian_traceless_failures.is_empty()
    }
}

/// Draws a Haar-random unit vector in C^3.
pub fn random_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> [Complex64; 3] {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let mut v = [c64(0.0, 0.0); 3];
        for z in v.iter_mut() {
            *z = c64(StandardNormal.sample(rng), StandardNormal.sample(rng));
        }
        if let Ok(u) = normalize3(v) {
            return u;
        }
    }
}

/// Runs the trace-orthogonality, Hermiticity/tracelessness and Bloch-norm
/// checks on an arbitrary candidate basis. The Bloch check evaluates the
/// candidate matrices directly so a corrupted basis is caught there too.
pub fn check_basis(basis: &[CMat], bloch_samples: usize, seed: u64) -> Result<BasisReport> {
    if basis.len() != 8 || basis.iter().any(|m| m.rows() != 3 || m.cols() != 3) {
        return Err(Error::Dimension("basis must be eight 3x3 matrices".into()));
    }
    let mut failures = Vec::new();
    let mut passed = 0;
    for i in 0..8 {
        for j in 0..8 {
            let t = (&basis[i] * &basis[j]).trace();
            let expect = if i == j { 2.0 } else { 0.0 };
            if (t.re - expect).abs() <= 1e-15 && t.im.abs() <= 1e-15 {
                passed += 1;
            } else {
                failures.push((i + 1, j + 1, t.re));
            }
        }
    }
    let ht_failures: Vec<usize> = basis
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_hermitian(1e-15) || m.trace().norm() > 1e-15)
        .map(|(k, _)| k + 1)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bloch_passed = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..bloch_samples {
        let a = random_unit(&mut rng);
        let s: f64 = basis.iter().map(|m| m.quadratic_form(&a).re.powi(2)).sum();
        let err = (s - BLOCH_NORM_SQ).abs();
        worst = worst.max(err);
        if err <= 1e-12 {
            bloch_passed += 1;
        }
    }
    Ok(BasisReport {
        orthogonality_passed: passed,
        orthogonality_total: 64,
        orthogonality_failures: failures,
        hermitian_traceless_failures: ht_failures,
        bloch_passed,
        bloch_total: bloch_samples,
        max_bloch_error: worst,
    })
}

/// Copy of the standard basis with one entry perturbed; used to exercise
/// failure paths of [`check_basis`].
pub fn corrupted_basis(k: GellMannIndex, row: usize, col: usize, delta: f64) -> Vec<CMat> {
    let mut b: Vec<CMat> = basis().to_vec();
    let m = &mut b[(k.0 - 1) as usize];
    m[(row, col)] += c64(delta, 0.0);
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(k: u8) -> GellMannIndex {
        GellMannIndex::new(k).unwrap()
    }

    #[test]
    fn index_range() {
        assert!(GellMannIndex::new(0).is_err());
        assert!(GellMannIndex::new(9).is_err());
        assert_eq!(GellMannIndex::all().count(), 8);
    }

    #[test]
    fn lambda1_and_lambda8_entries() {
        let l1 = gellmann(g(1));
        assert_eq!(l1[(0, 1)], c64(1.0, 0.0));
        assert_eq!(l1[(1, 0)], c64(1.0, 0.0));
        assert_eq!(l1[(2, 2)], c64(0.0, 0.0));
        let l8 = gellmann(g(8));
        assert!((l8[(2, 2)].re + 2.0 / 3f64.sqrt()).abs() < 1e-16);
        assert!((l8[(0, 0)].re - 1.0 / 3f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn standard_basis_passes_suite() {
        let r = check_basis(basis(), 1000, 1).unwrap();
        assert!(r.all_passed(), "{r:?}");
        assert_eq!(r.orthogonality_passed, 64);
    }

    #[test]
    fn corrupted_basis_fails_suite() {
        let b = corrupted_basis(g(4), 0, 2, 1e-3);
        let r = check_basis(&b, 10, 1).unwrap();
        assert!(!r.all_passed());
        assert!(r.orthogonality_failures.iter().any(|&(i, j, _)| i == 4 && j == 4));
    }

    #[test]
    fn bloch_of_basis_vectors() {
        let b = bloch(&[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let e = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0 / 3f64.sqrt()];
        for k in 0..8 {
            assert!((b.0[k] - e[k]).abs() < 1e-15);
        }
        let b = bloch(&[c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]).unwrap();
        assert!((b.0[7] + 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(b.0[..7].iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn bloch_rejects_unnormalized() {
        assert!(bloch(&[c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]).is_err());
    }

    #[test]
    fn eigenstates_satisfy_eigen_equation() {
        for k in GellMannIndex::all() {
            for &m in eigenvalues(k) {
                let v = eigenstate(k, m).unwrap();
                let lv = gellmann(k).matvec(&v);
                for i in 0..3 {
                    assert!((lv[i] - v[i] * m).norm() < 1e-12, "k={k} m={m}");
                }
                check_unit(&v, 1e-15).unwrap();
                let first = v.iter().find(|z| z.norm() > 1e-12).unwrap();
                assert!(first.im == 0.0 && first.re > 0.0);
            }
        }
    }

    #[test]
    fn named_eigenstates() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = eigenstate(g(1), 1.0).unwrap();
        assert_eq!(v, [c64(h, 0.0), c64(h, 0.0), c64(0.0, 0.0)]);
        assert_eq!(eigenstate(g(8), -2.0 / SQRT3).unwrap()[2], c64(1.0, 0.0));
        assert_eq!(eigenstate(g(3), -1.0).unwrap()[1], c64(1.0, 0.0));
        assert!(eigenstate(g(8), 1.0).is_err());
        assert!(eigenstate(g(2), 0.5).is_err());
    }

    proptest! {
        #[test]
        fn bloch_matches_matrix_action_and_norm(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_unit(&mut rng);
            let b = bloch(&a).unwrap();
            prop_assert!((b.norm_sq() - BLOCH_NORM_SQ).abs() < 1e-12);
            for k in GellMannIndex::all() {
                let e = gellmann(k).quadratic_form(&a);
                prop_assert!((e.re - b.get(k)).abs() < 1e-12);
                prop_assert!(e.im.abs() < 1e-12);
            }
        }
    }
}
