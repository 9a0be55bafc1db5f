//! Product states, density operators, the two bound-entangled families and
//! PPT testing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c64, hermitian_eigen, kron, kron_vec, partial_transpose_first, CMat};
use crate::operators::{OperatorLabel, WitnessCoeffs};
use crate::su3::{self, gellmann_or_identity, normalize3, SQRT3};

/// Eigenvalue threshold below which an operator is treated as not PSD.
pub const PSD_TOL: f64 = 1e-10;

/// `|alpha> (x) |beta>` with both factors normalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductState {
    pub alpha: [Complex64; 3],
    pub beta: [Complex64; 3],
}

impl ProductState {
    /// Validates that both factors have unit norm within 1e-12.
    pub fn new(alpha: [Complex64; 3], beta: [Complex64; 3]) -> Result<Self> {
        su3::check_unit(&alpha, 1e-12)?;
        su3::check_unit(&beta, 1e-12)?;
        Ok(Self { alpha, beta })
    }

    /// Normalizes both factors first.
    pub fn normalized(alpha: [Complex64; 3], beta: [Complex64; 3]) -> Result<Self> {
        Ok(Self {
            alpha: normalize3(alpha)?,
            beta: normalize3(beta)?,
        })
    }

    /// Convenience constructor from real (unnormalized) amplitudes.
    pub fn from_real(alpha: [f64; 3], beta: [f64; 3]) -> Result<Self> {
        let c = |v: [f64; 3]| [c64(v[0], 0.0), c64(v[1], 0.0), c64(v[2], 0.0)];
        Self::normalized(c(alpha), c(beta))
    }

    pub fn vector(&self) -> [Complex64; 9] {
        kron_vec(&self.alpha, &self.beta)
    }

    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
        }
    }

    /// `|alpha*> (x) |beta>`, the image of the state under the first-factor
    /// transpose.
    pub fn conj_first(&self) -> Self {
        Self {
            alpha: self.alpha.map(|z| z.conj()),
            beta: self.beta,
        }
    }

    /// `<gamma|M|gamma>` for a 9x9 operator, real part.
    pub fn expectation(&self, m: &CMat) -> f64 {
        m.quadratic_form(&self.vector()).re
    }
}

/// The pure product states on which the positive part of the approximated
/// facet witness vanishes: both factors equal to
/// `(sqrt3/2)(cos phi, e^{i d1} sin phi, e^{i d2}/sqrt3)`.
pub fn tangent_family_state(phi: f64, d1: f64, d2: f64) -> ProductState {
    let h = SQRT3 / 2.0;
    let v = [
        c64(h * phi.cos(), 0.0),
        Complex64::from_polar(h * phi.sin(), d1),
        Complex64::from_polar(0.5, d2),
    ];
    ProductState { alpha: v, beta: v }
}

/// Where a density operator came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateOrigin {
    Product,
    Horodecki { b: f64 },
    PptFamily { a: f64, c: f64 },
    Custom,
}

impl std::fmt::Display for StateOrigin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateOrigin::Product => write!(f, "product"),
            StateOrigin::Horodecki { b } => write!(f, "horodecki(b={b})"),
            StateOrigin::PptFamily { a, c } => write!(f, "ppt-family(a={a}, c={c})"),
            StateOrigin::Custom => write!(f, "custom"),
        }
    }
}

/// Validated two-qutrit density operator.
#[derive(Clone, Debug)]
pub struct DensityOp {
    matrix: CMat,
    origin: StateOrigin,
    min_eigenvalue: f64,
}

impl DensityOp {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMat, origin: StateOrigin) -> Result<Self> {
        if matrix.rows() != 9 || matrix.cols() != 9 {
            return Err(Error::Dimension(format!(
                "density operator must be 9x9, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let e = hermitian_eigen(&matrix, 1e-12)?;
        let min = e.min_value();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "{origin}: negative eigenvalue {min:.6e}"
            )));
        }
        Ok(Self {
            matrix,
            origin,
            min_eigenvalue: min,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn origin(&self) -> StateOrigin {
        self.origin
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Coefficients `r[i][j]` of `rho = sum r_ij s_i (x) s_j`, with `s_0 = I`
    /// and `s_k = lambda_k`.
    pub fn gell_mann_expansion(&self) -> [[f64; 9]; 9] {
        gell_mann_expansion(&self.matrix)
    }
}

pub fn gell_mann_expansion(m: &CMat) -> [[f64; 9]; 9] {
    let mut r = [[0.0; 9]; 9];
    let norm = |k: usize| if k == 0 { 3.0 } else { 2.0 };
    for (i, row) in r.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            let b = kron(
                &gellmann_or_identity(i as u8).expect("index in range"),
                &gellmann_or_identity(j as u8).expect("index in range"),
            )
            .expect("3x3 factors");
            *x = (&b * m).trace().re / (norm(i) * norm(j));
        }
    }
    r
}

pub fn from_gell_mann_expansion(r: &[[f64; 9]; 9]) -> CMat {
    let mut out = CMat::zeros(9, 9);
    for (i, row) in r.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x != 0.0 {
                let b = kron(
                    &gellmann_or_identity(i as u8).expect("index in range"),
                    &gellmann_or_identity(j as u8).expect("index in range"),
                )
                .expect("3x3 factors");
                out.add_scaled(x, &b);
            }
        }
    }
    out
}

pub fn product_density(gamma: &ProductState) -> DensityOp {
    let m = CMat::projector(&gamma.vector());
    let min = 0.0;
    DensityOp {
        matrix: m,
        origin: StateOrigin::Product,
        min_eigenvalue: min,
    }
}

/// Gell-Mann coefficients of the Horodecki family; the identity weight is
/// `a0 = 1/9`.
pub fn horodecki_coeffs(b: f64) -> WitnessCoeffs {
    let l = OperatorLabel::unit;
    let mut w = WitnessCoeffs::new(1.0 / 9.0);
    for (k, s) in [(1, 1.0), (2, -1.0), (4, 1.0), (5, -1.0), (6, 1.0), (7, -1.0)] {
        w.set(l(k, k), s / 21.0);
    }
    w.set(l(3, 3), -1.0 / 84.0);
    w.set(l(8, 8), -1.0 / 84.0);
    let t = SQRT3 / 84.0 * (5.0 - 2.0 * b);
    w.set(l(3, 8), -t);
    w.set(l(8, 3), t);
    w
}

/// Horodecki states, `0 <= b <= 5`.
pub fn horodecki(b: f64) -> Result<DensityOp> {
    if !(0.0..=5.0).contains(&b) {
        return Err(Error::InvalidParameter(format!(
            "horodecki parameter b = {b} outside [0, 5]"
        )));
    }
    DensityOp::new(horodecki_coeffs(b).assemble(), StateOrigin::Horodecki { b })
}

/// Gell-Mann coefficients of the PPT family `rho(a, c)`.
pub fn ppt_family_coeffs(a: f64, c: f64) -> WitnessCoeffs {
    let l = OperatorLabel::unit;
    let mut w = WitnessCoeffs::new(1.0 / 9.0);
    let x = c / (6.0 * (a + 2.0 * c));
    let y = (a - c) / (6.0 * (a + 2.0 * c));
    for (i, j) in [
        (1, 1),
        (2, 2),
        (1, 2),
        (2, 1),
        (4, 4),
        (5, 5),
        (4, 5),
        (5, 4),
        (6, 6),
        (7, 7),
        (6, 7),
        (7, 6),
    ] {
        w.set(l(i, j), x);
    }
    w.set(l(3, 3), y);
    w.set(l(8, 8), y);
    w
}

/// The PPT family `rho(a, c)` for `a > 0`, `0 <= c <= a/sqrt3`.
pub fn ppt_family(a: f64, c: f64) -> Result<DensityOp> {
    if !(a > 0.0 && a.is_finite()) || !(c >= 0.0) || c > a / SQRT3 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "ppt family needs a > 0 and 0 <= c <= a/sqrt3, got a = {a}, c = {c}"
        )));
    }
    let rho = DensityOp::new(ppt_family_coeffs(a, c).assemble(), StateOrigin::PptFamily { a, c })?;
    let (ok, min) = is_ppt(&rho);
    if !ok {
        return Err(Error::InvalidState(format!(
            "ppt family (a = {a}, c = {c}): partial transpose eigenvalue {min:.6e}"
        )));
    }
    Ok(rho)
}

pub fn ppt_min_eigenvalue(m: &CMat) -> f64 {
    let pt = partial_transpose_first(m).expect("density operators are 9x9");
    hermitian_eigen(&pt, 1e-10)
        .expect("partial transpose of a Hermitian matrix is Hermitian")
        .min_value()
}

/// PPT test with threshold `-1e-10`; also returns the smallest eigenvalue of
/// the partial transpose.
pub fn is_ppt(rho: &DensityOp) -> (bool, f64) {
    let min = ppt_min_eigenvalue(rho.matrix());
    (min >= -PSD_TOL, min)
}

/// Bisection for a sign change of `f` on `[lo, hi]`. The endpoints must have
/// opposite signs (zero counts as non-negative).
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if (flo < 0.0) == (fhi < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "no sign change on [{lo}, {hi}] ({flo:.3e}, {fhi:.3e})"
        )));
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locates where the PPT property of a one-parameter family changes on
/// `[lo, hi]`. The bisection tracks the sign of the smallest eigenvalue of
/// the partial transpose rather than the `-1e-10` PPT threshold, because
/// near a boundary the eigenvalue moves slowly and the threshold would shift
/// the located point by more than the requested tolerance.
pub fn locate_ppt_boundary(
    family: impl Fn(f64) -> CMat,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    bisect(|x| ppt_min_eigenvalue(&family(x)), lo, hi, tol)
}
