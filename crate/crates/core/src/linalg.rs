//! Dense complex matrices for qutrit (3x3) and two-qutrit (9x9) operators.
//!
//! Everything here is small and fixed-size in practice, so the storage is a
//! plain row-major `Vec<Complex64>` and the algorithms favour determinism over
//! speed.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm at which the Jacobi sweep stops.
pub const JACOBI_TOL: f64 = 1e-13;
/// Upper bound on Jacobi sweeps before reporting non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 100;

pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {rows}x{cols} = {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Rank-one projector `|v><v|`.
    pub fn projector(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    fn require_square(&self, n: usize, what: &str) -> Result<()> {
        if self.rows != n || self.cols != n {
            return Err(Error::Dimension(format!(
                "{what}: expected {n}x{n}, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self += s * other`, dimensions must agree.
    pub fn add_scaled(&mut self, s: f64, other: &CMat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, other: &CMat) -> Result<CMat> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `<v|M|v>`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        let mv = self.matvec(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `M = M^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn approx_eq(&self, other: &CMat, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= tol
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMat {
    type Output = CMat;

    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;

    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMat {
    type Output = CMat;

    fn neg(self) -> CMat {
        self.scale(-1.0)
    }
}

impl Mul for &CMat {
    type Output = CMat;

    /// Panics on dimension mismatch; use [`CMat::matmul`] for a fallible product.
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product of two 3x3 matrices; row `(i, k)` maps to `3i + k`.
pub fn kron(a: &CMat, b: &CMat) -> Result<CMat> {
    a.require_square(3, "kron lhs")?;
    b.require_square(3, "kron rhs")?;
    Ok(CMat::from_fn(9, 9, |r, c| {
        let (i, k) = (r / 3, r % 3);
        let (j, l) = (c / 3, c % 3);
        a[(i, j)] * b[(k, l)]
    }))
}

/// Kronecker product of two 3-vectors.
pub fn kron_vec(a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 9] {
    let mut out = [Complex64::new(0.0, 0.0); 9];
    for i in 0..3 {
        for k in 0..3 {
            out[3 * i + k] = a[i] * b[k];
        }
    }
    out
}

/// Transpose on the first tensor factor: `out((i,k),(j,l)) = M((j,k),(i,l))`.
pub fn partial_transpose_first(m: &CMat) -> Result<CMat> {
    m.require_square(9, "partial transpose")?;
    Ok(CMat::from_fn(9, 9, |r, c| {
        let (i, k) = (r / 3, r % 3);
        let (j, l) = (c / 3, c % 3);
        m[(3 * j + k, 3 * i + l)]
    }))
}

/// Spectrum of a Hermitian matrix with eigenvalues ascending and eigenvectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl EigenDecomposition {
    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `sum_k e_k v_k v_k^dagger`.
    pub fn reconstruct(&self) -> CMat {
        let n = self.values.len();
        let mut out = CMat::zeros(n, n);
        for (k, &e) in self.values.iter().enumerate() {
            out.add_scaled(e, &CMat::projector(&self.vector(k)));
        }
        out
    }
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of `a_pq` and then applies the
/// classical real rotation, so the pivot becomes exactly zero. The sweep
/// order is fixed, which makes the output a deterministic function of the
/// input.
pub fn hermitian_eigen(m: &CMat, tol: f64) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigen: matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows();
    // symmetrize so rounding in the input cannot leak into the diagonal
    let mut a = CMat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = CMat::identity(n);
    let stop = JACOBI_TOL * a.frobenius_norm().max(1.0);

    let mut converged = off_diagonal_norm(&a) <= stop;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence(format!(
                "Jacobi eigensolver: off-diagonal norm {:.3e} after {sweeps} sweeps",
                off_diagonal_norm(&a)
            )));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) <= stop;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re).then(x.cmp(&y)));
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut vec: Vec<Complex64> = (0..n).map(|i| v[(i, k)]).collect();
        fix_phase(&mut vec);
        for (i, z) in vec.into_iter().enumerate() {
            vectors[(i, col)] = z;
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // unit phase e^{-i phi} with a_pq = |a_pq| e^{i phi}
    let phase = apq.conj() / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = diag(1, phase) * [[c, s], [-s, c]]
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Rotates a vector so that its first non-negligible component is real and
/// positive.
pub fn fix_phase(v: &mut [Complex64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().copied().find(|z| z.norm() > 1e-9 * scale) {
        let rot = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= rot;
        }
    }
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c64(rng.random_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i9 = kron(&CMat::identity(3), &CMat::identity(3)).unwrap();
        assert_eq!(i9, CMat::identity(9));
    }

    #[test]
    fn kron_rejects_wrong_dimensions() {
        assert!(matches!(
            kron(&CMat::identity(2), &CMat::identity(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_hermitian(9, &mut rng);
        let back = partial_transpose_first(&partial_transpose_first(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn partial_transpose_keeps_trace_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let m = random_hermitian(9, &mut rng);
            let pt = partial_transpose_first(&m).unwrap();
            assert!((pt.trace() - m.trace()).norm() < 1e-14);
            assert!(pt.is_hermitian(1e-15));
        }
    }

    #[test]
    fn eigen_identity() {
        let e = hermitian_eigen(&CMat::identity(9), 1e-12).unwrap();
        assert!(e.values.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let mut m = CMat::identity(3);
        m[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(hermitian_eigen(&m, 1e-12), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigen_random_hermitian_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3, 9] {
            for _ in 0..50 {
                let m = random_hermitian(n, &mut rng);
                let e = hermitian_eigen(&m, 1e-12).unwrap();
                assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
                assert!((e.values.iter().sum::<f64>() - m.trace().re).abs() < 1e-10);
                assert!(e.reconstruct().max_abs_diff(&m) < 1e-10);
                for k in 0..n {
                    let v = e.vector(k);
                    let mv = m.matvec(&v);
                    for i in 0..n {
                        assert!((mv[i] - v[i] * e.values[k]).norm() < 1e-10);
                    }
                }
                let vhv = e.vectors.adjoint().matmul(&e.vectors).unwrap();
                assert!(vhv.max_abs_diff(&CMat::identity(n)) < 1e-12);
            }
        }
    }

    #[test]
    fn eigen_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(9, &mut rng);
        let a = hermitian_eigen(&m, 1e-12).unwrap();
        let b = hermitian_eigen(&m, 1e-12).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn phase_convention_first_component_real_positive() {
        let mut v = vec![c64(0.0, 0.0), c64(0.0, -2.0), c64(1.0, 1.0)];
        fix_phase(&mut v);
        assert!(v[1].im.abs() < 1e-15 && v[1].re > 0.0);
    }
}
