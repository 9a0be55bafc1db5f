//! Feasible-region machinery: expectation maps, vertex catalogs, hyperplanes
//! through vertices, facet witnesses and the tangent refinement loop.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::linalg::c64;
use crate::operators::{
    classify, diag_facet_witness, ClassificationReport, ClassifyOptions, DiagCase, FacetSigns,
    OperatorLabel, Verdict, WitnessCoeffs, OFFDIAG_A_LABELS,
};
use crate::optimize::{max_product_expectation, OptimizerConfig};
use crate::states::ProductState;
use crate::su3::{eigenstate, GellMannIndex, SQRT3};

/// Built-in coordinate systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `P_k = <l_k (x) l_k>`, k = 1..8.
    Diag,
    /// Diagonal labels plus (1,2), (2,1), (4,5), (5,4), (6,7), (7,6).
    OffdiagA,
    /// Diagonal labels plus sqrt(3)-scaled (3,8) and (8,3).
    OffdiagB,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Diag => "diag",
            FamilyKind::OffdiagA => "offdiag-a",
            FamilyKind::OffdiagB => "offdiag-b",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "diag" => Ok(FamilyKind::Diag),
            "offdiag-a" => Ok(FamilyKind::OffdiagA),
            "offdiag-b" => Ok(FamilyKind::OffdiagB),
            _ => Err(Error::InvalidParameter(format!(
                "unknown family '{s}' (expected diag, offdiag-a or offdiag-b)"
            ))),
        }
    }

    pub fn family(self) -> CoordinateFamily {
        CoordinateFamily::new(self)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered operator labels defining the coordinates `P_l = <gamma|Q_l|gamma>`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateFamily {
    pub kind: FamilyKind,
    pub labels: Vec<OperatorLabel>,
}

impl CoordinateFamily {
    pub fn new(kind: FamilyKind) -> Self {
        let diag = (1..=8u8).map(|k| OperatorLabel::unit(k, k));
        let labels = match kind {
            FamilyKind::Diag => diag.collect(),
            FamilyKind::OffdiagA => OFFDIAG_A_LABELS
                .iter()
                .map(|&(i, j)| OperatorLabel::unit(i, j))
                .collect(),
            FamilyKind::OffdiagB => diag
                .chain([OperatorLabel::sqrt3(3, 8), OperatorLabel::sqrt3(8, 3)])
                .collect(),
        };
        Self { kind, labels }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn column_names(&self) -> Vec<String> {
        self.labels
            .iter()
            .map(|l| {
                if l.i() == l.j() {
                    format!("P{}", l.i())
                } else {
                    format!("P{}{}", l.i(), l.j())
                }
            })
            .collect()
    }

    /// Coefficients of `w` along this family's labels; fails when `w` has a
    /// term outside the family.
    pub fn coefficients_of(&self, w: &WitnessCoeffs) -> Result<Vec<f64>> {
        let u = w.unit_scaled();
        let mut out = Vec::with_capacity(self.dim());
        let mut seen = HashSet::new();
        for l in &self.labels {
            let ul = l.with_scale(crate::operators::Scale::Unit);
            seen.insert(ul);
            out.push(u.get(ul) / l.scale().value());
        }
        for (l, c) in u.terms() {
            if !seen.contains(&l) && c != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "term {l} is not part of the {} family",
                    self.kind
                )));
            }
        }
        Ok(out)
    }

    /// `a0 I - sum_l n_l Q_l`.
    pub fn witness(&self, a0: f64, normal: &[f64]) -> WitnessCoeffs {
        let mut w = WitnessCoeffs::new(a0);
        for (l, &n) in self.labels.iter().zip(normal) {
            w.set(*l, -n);
        }
        w
    }

    /// The plane's left-hand side `sum_l n_l Q_l - offset I` as an operator.
    pub fn plane_functional(&self, h: &Hyperplane) -> WitnessCoeffs {
        self.witness(h.offset, &h.normal).scaled(-1.0)
    }
}

/// Coordinates of one product state in a family.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasiblePoint {
    pub family: FamilyKind,
    pub coords: Vec<f64>,
    /// Exact rational form when every coordinate is rational.
    pub exact: Option<Vec<Ratio<i64>>>,
    pub state: Option<ProductState>,
}

impl FeasiblePoint {
    pub fn from_coords(family: FamilyKind, coords: Vec<f64>) -> Self {
        let exact = rationalize_all(&coords);
        Self {
            family,
            coords,
            exact,
            state: None,
        }
    }

    pub fn dist(&self, other: &FeasiblePoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Best rational approximation with denominator at most `max_den`, by
/// continued fractions.
pub fn rationalize(x: f64, max_den: i64) -> Option<Ratio<i64>> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if frac.abs() < 1e-15 || (p1 as f64 / q1 as f64 - x).abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    (q1 != 0).then(|| Ratio::new(p1, q1))
}

/// Rationalizes every coordinate, or returns `None` if any one is not
/// within 1e-14 of a fraction with denominator at most 2*10^5.
pub fn rationalize_all(xs: &[f64]) -> Option<Vec<Ratio<i64>>> {
    xs.iter()
        .map(|&x| {
            let r = rationalize(x, 200_000)?;
            let back = *r.numer() as f64 / *r.denom() as f64;
            ((back - x).abs() <= 1e-14).then_some(r)
        })
        .collect()
}

pub fn ratio_to_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `P_l = <gamma| scale s_i (x) s_j |gamma>` for every label of the family.
pub fn expectation_map(gamma: &ProductState, fam: &CoordinateFamily) -> FeasiblePoint {
    let coords: Vec<f64> = fam.labels.iter().map(|l| l.product_expectation(gamma)).collect();
    let mut p = FeasiblePoint::from_coords(fam.kind, coords);
    p.state = Some(*gamma);
    p
}

fn eig(k: u8, m: f64) -> [Complex64; 3] {
    eigenstate(GellMannIndex::new(k).expect("index in range"), m).expect("valid eigenvalue")
}

fn e(k: usize) -> [Complex64; 3] {
    let mut v = [c64(0.0, 0.0); 3];
    v[k] = c64(1.0, 0.0);
    v
}

fn ps(alpha: [Complex64; 3], beta: [Complex64; 3]) -> ProductState {
    ProductState::normalized(alpha, beta).expect("nonzero factors")
}

/// Generating product states of the vertex table for `kind`, in table order
/// with the `+` variant before the `-` variant.
pub fn catalog_states(kind: FamilyKind) -> Vec<ProductState> {
    let mut v = Vec::new();
    let pm = |v: &mut Vec<ProductState>, ka: u8, kb: u8| {
        v.push(ps(eig(ka, 1.0), eig(kb, 1.0)));
        v.push(ps(eig(ka, 1.0), eig(kb, -1.0)));
    };
    match kind {
        FamilyKind::Diag => {
            for k in 1..=7 {
                pm(&mut v, k, k);
            }
            v.push(ps(e(2), e(2)));
            v.push(ps(e(0), e(2)));
        }
        FamilyKind::OffdiagA => {
            for (a, b) in [(1, 1), (2, 2), (3, 3), (1, 2), (2, 1), (4, 4), (5, 5), (6, 6), (7, 7)] {
                pm(&mut v, a, b);
            }
            for (a, b) in [(4, 5), (5, 4), (6, 7), (7, 6)] {
                pm(&mut v, a, b);
            }
            v.push(ps(e(2), e(2)));
            v.push(ps(e(0), e(2)));
        }
        FamilyKind::OffdiagB => {
            pm(&mut v, 1, 1);
            pm(&mut v, 2, 2);
            v.push(ps(e(0), e(0)));
            v.push(ps(e(1), e(1)));
            v.push(ps(e(0), e(1)));
            v.push(ps(e(1), e(0)));
            for k in 4..=7 {
                pm(&mut v, k, k);
            }
            v.push(ps(e(2), e(2)));
            // both |1/sqrt3> eigenvectors of lambda_8 are needed here
            v.push(ps(e(1), e(2)));
            v.push(ps(e(0), e(2)));
            v.push(ps(e(2), e(1)));
            v.push(ps(e(2), e(0)));
        }
    }
    v
}

/// Vertex table of a built-in family. Each row is recomputed from its
/// generating state and carries exact rational coordinates.
pub fn vertex_catalog(kind: FamilyKind) -> Vec<FeasiblePoint> {
    let fam = kind.family();
    catalog_states(kind)
        .iter()
        .map(|g| expectation_map(g, &fam))
        .collect()
}

fn omega(k: i32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0)
}

/// Product states of the ten vertices that the upper Horodecki witness's
/// plane passes through.
pub fn horodecki_upper_states() -> Vec<ProductState> {
    let r = |a: f64, b: f64, c: f64| [c64(a, 0.0), c64(b, 0.0), c64(c, 0.0)];
    let i = c64(0.0, 1.0);
    let o = c64(1.0, 0.0);
    vec![
        ps(e(0), e(1)),
        ps(e(1), e(2)),
        ps(e(2), e(0)),
        ps(r(1.0, 1.0, 1.0), r(1.0, 1.0, 1.0)),
        ps([o, o, omega(1)], [o, o, omega(-1)]),
        ps([i, o, o], [-i, o, o]),
        ps([o, i, o], [o, -i, o]),
        ps(r(0.0, SQRT3, 1.0), r(0.0, 1.0, SQRT3)),
        ps(r(2.0, 2.0, 7f64.sqrt()), r(2.0, 2.0, 7f64.sqrt())),
        ps(
            r(32f64.sqrt(), 77f64.sqrt(), 9.0),
            r(32f64.sqrt(), 77f64.sqrt(), 9.0),
        ),
    ]
}

/// The ten vertices above, in table order.
pub fn horodecki_upper_points() -> Vec<FeasiblePoint> {
    let fam = FamilyKind::OffdiagB.family();
    horodecki_upper_states().iter().map(|g| expectation_map(g, &fam)).collect()
}

/// The upper set with rows 1-3 replaced by their mirror vertices and row 8
/// by its party-exchanged state.
pub fn horodecki_lower_points() -> Vec<FeasiblePoint> {
    let fam = FamilyKind::OffdiagB.family();
    let mut states = horodecki_upper_states();
    states[0] = ps(e(1), e(0));
    states[1] = ps(e(0), e(2));
    states[2] = ps(e(2), e(1));
    states[7] = states[7].swapped();
    states.iter().map(|g| expectation_map(g, &fam)).collect()
}

/// Starting vertices of the refinement that ends at the upper Horodecki
/// witness.
pub fn horodecki_upper_seed() -> Vec<FeasiblePoint> {
    let fam = FamilyKind::OffdiagB.family();
    [
        ps(eig(1, 1.0), eig(1, 1.0)),
        ps(eig(2, 1.0), eig(2, -1.0)),
        ps(e(0), e(1)),
        ps(eig(4, 1.0), eig(4, 1.0)),
        ps(eig(5, 1.0), eig(5, -1.0)),
        ps(eig(6, 1.0), eig(6, 1.0)),
        ps(eig(7, 1.0), eig(7, -1.0)),
        ps(e(1), e(2)),
        ps(e(2), e(0)),
        ps(e(2), e(2)),
    ]
    .iter()
    .map(|g| expectation_map(g, &fam))
    .collect()
}

/// Mirror seed for the lower witness: same construction applied to the
/// exchanged vertex set.
pub fn horodecki_lower_seed() -> Vec<FeasiblePoint> {
    let fam = FamilyKind::OffdiagB.family();
    horodecki_upper_seed()
        .iter()
        .map(|p| expectation_map(&p.state.expect("seed points carry states").swapped(), &fam))
        .collect()
}

/// Vertices of the diagonal facet with the given signs: the six `+-1`
/// rows selected by the signs, the `P3 = +1` row and the `P8 = 4/3` row.
pub fn diag_facet_vertices(s: FacetSigns) -> Vec<FeasiblePoint> {
    let fam = FamilyKind::Diag.family();
    let mut states = Vec::new();
    for k in FacetSigns::LABELS {
        states.push(ps(eig(k, 1.0), eig(k, s.sign(k))));
    }
    states.push(ps(eig(3, 1.0), eig(3, 1.0)));
    states.push(ps(e(2), e(2)));
    states.iter().map(|g| expectation_map(g, &fam)).collect()
}

/// Plane `n . P = offset`; feasible side `n . P <= offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    pub family: FamilyKind,
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    /// Normalizes to offset 1 when the offset is nonzero, else to a unit
    /// normal whose first nonzero entry is positive.
    pub fn new(family: FamilyKind, normal: Vec<f64>, offset: f64) -> Result<Self> {
        let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("hyperplane normal must be nonzero".into()));
        }
        if (offset / norm).abs() > 1e-12 {
            Ok(Self {
                family,
                normal: normal.iter().map(|x| x / offset).collect(),
                offset: 1.0,
            })
        } else {
            let first = normal.iter().copied().find(|x| x.abs() > 1e-12 * norm).unwrap_or(1.0);
            let s = first.signum() / norm;
            Ok(Self {
                family,
                normal: normal.iter().map(|x| x * s).collect(),
                offset: 0.0,
            })
        }
    }

    pub fn value(&self, p: &FeasiblePoint) -> f64 {
        self.normal.iter().zip(&p.coords).map(|(a, b)| a * b).sum()
    }

    /// `offset - n . P`, non-negative on the feasible side.
    pub fn margin(&self, p: &FeasiblePoint) -> f64 {
        self.offset - self.value(p)
    }

    pub fn max_abs_diff(&self, other: &Hyperplane) -> f64 {
        self.normal
            .iter()
            .zip(&other.normal)
            .map(|(a, b)| (a - b).abs())
            .fold((self.offset - other.offset).abs(), f64::max)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inverse of a small dense real matrix by Gauss-Jordan elimination with
/// partial pivoting; `None` when a pivot falls below `1e-12` relative.
pub fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let scale = m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[r][j] -= f * a[col][j];
                        inv[r][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Unique hyperplane through `dim` affinely independent points.
pub fn hyperplane_through(points: &[FeasiblePoint]) -> Result<Hyperplane> {
    let first = points.first().ok_or(Error::PointCount { expected: 1, got: 0 })?;
    let d = first.coords.len();
    if points.len() != d {
        return Err(Error::PointCount {
            expected: d,
            got: points.len(),
        });
    }
    if points.iter().any(|p| p.coords.len() != d || p.family != first.family) {
        return Err(Error::Dimension("points from different families".into()));
    }
    // incremental Gram-Schmidt on the difference vectors
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    for (k, p) in points.iter().enumerate().skip(1) {
        let mut v: Vec<f64> = p.coords.iter().zip(&first.coords).map(|(a, b)| a - b).collect();
        let len0 = dot(&v, &v).sqrt();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let len = dot(&v, &v).sqrt();
        if len <= 1e-10 * len0.max(1.0) {
            return Err(Error::AffinelyDependent(k));
        }
        v.iter_mut().for_each(|x| *x /= len);
        basis.push(v);
    }
    // normal: the standard basis vector with the largest residual
    let mut best: Option<Vec<f64>> = None;
    let mut best_len = 0.0;
    for j in 0..d {
        let mut v = vec![0.0; d];
        v[j] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let len = dot(&v, &v).sqrt();
        if len > best_len {
            best_len = len;
            best = Some(v.iter().map(|x| x / len).collect());
        }
    }
    let normal = best.expect("dimension is positive");
    let offset = dot(&normal, &first.coords);
    let h = Hyperplane::new(first.family, normal, offset)?;
    if h.offset == 1.0 {
        // polish with a direct solve of P n = 1
        let rows: Vec<Vec<f64>> = points.iter().map(|p| p.coords.clone()).collect();
        if let Some(inv) = invert(&rows) {
            let n: Vec<f64> = inv.iter().map(|r| r.iter().sum()).collect();
            return Ok(Hyperplane {
                family: first.family,
                normal: n,
                offset: 1.0,
            });
        }
    }
    Ok(h)
}

/// `W = d I - sum_l n_l Q_l` with `d` the plane offset or the override.
pub fn facet_to_witness(h: &Hyperplane, offset_override: Option<f64>) -> WitnessCoeffs {
    h.family.family().witness(offset_override.unwrap_or(h.offset), &h.normal)
}

/// Minimum of `a0 + sum_l w_l P_l` over a catalog, with the index of the
/// minimizing vertex.
pub fn min_over_vertices(w: &WitnessCoeffs, catalog: &[FeasiblePoint]) -> Result<(f64, usize)> {
    let first = catalog
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty vertex catalog".into()))?;
    let coeffs = first.family.family().coefficients_of(w)?;
    let mut best = (f64::INFINITY, 0);
    for (k, p) in catalog.iter().enumerate() {
        if p.family != first.family {
            return Err(Error::Dimension("catalog mixes families".into()));
        }
        let v = w.a0 + dot(&coeffs, &p.coords);
        if v < best.0 {
            best = (v, k);
        }
    }
    Ok(best)
}

/// Normal of the plane `n . P = 1` for the diagonal facet with these signs.
pub fn diag_facet_plane(s: FacetSigns) -> Hyperplane {
    let normal = (1..=8u8).map(|k| 0.75 * s.sign(k)).collect();
    Hyperplane {
        family: FamilyKind::Diag,
        normal,
        offset: 1.0,
    }
}

/// Plane whose parallel tangent gives [`crate::operators::approx_facet_w1`].
pub fn approx_plane_w1(s: FacetSigns) -> Hyperplane {
    let normal = (1..=8u8)
        .map(|k| match k {
            1 | 2 | 3 => 1.5 * s.sign(k),
            8 => -1.5,
            _ => 0.75 * s.sign(k),
        })
        .collect();
    Hyperplane {
        family: FamilyKind::Diag,
        normal,
        offset: 1.0,
    }
}

/// The all-`3/4` plane of the first off-diagonal family.
pub fn offdiag_a_plane() -> Hyperplane {
    Hyperplane {
        family: FamilyKind::OffdiagA,
        normal: vec![0.75; 14],
        offset: 1.0,
    }
}

/// Normal of the upper Horodecki witness, in offset-1 gauge.
pub fn horodecki_upper_plane() -> Hyperplane {
    let fam = FamilyKind::OffdiagB.family();
    let w = crate::operators::horodecki_upper_witness(1.0);
    let normal = fam
        .coefficients_of(&w)
        .expect("family terms")
        .into_iter()
        .map(|c| -c)
        .collect();
    Hyperplane {
        family: FamilyKind::OffdiagB,
        normal,
        offset: 1.0,
    }
}

/// Per-facet outcome of the diagonal census.
#[derive(Clone, Debug)]
pub struct DiagFacetReport {
    pub signs: FacetSigns,
    pub case: DiagCase,
    pub witness: WitnessCoeffs,
    pub report: ClassificationReport,
}

/// Builds all 64 diagonal facets from their vertices, tags them by parity
/// case and classifies each. A facet whose verdict differs from its case
/// (positive for a, decomposable otherwise) is an error.
pub fn classify_diag_facets(opts: &ClassifyOptions) -> Result<Vec<DiagFacetReport>> {
    let mut out = Vec::with_capacity(64);
    for s in FacetSigns::all() {
        let h = hyperplane_through(&diag_facet_vertices(s))?;
        let w = facet_to_witness(&h, None);
        let reference = diag_facet_witness(s);
        if !w.approx_eq(&reference, 1e-12) {
            return Err(Error::InvalidState(format!(
                "facet {s}: fitted plane does not match the sign pattern"
            )));
        }
        let report = classify(&reference, opts)?;
        let case = s.case();
        let expected = if case == DiagCase::A {
            Verdict::PositiveOperator
        } else {
            Verdict::Decomposable
        };
        if report.verdict != expected {
            return Err(Error::InvalidState(format!(
                "facet {s} (case {case}) classified as {}, expected {expected}",
                report.verdict
            )));
        }
        out.push(DiagFacetReport {
            signs: s,
            case,
            witness: reference,
            report,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct RefineConfig {
    pub optimizer: OptimizerConfig,
    pub max_iters: usize,
    /// Slack above the plane level that still counts as tangent.
    pub tol: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerConfig::default(),
            max_iters: 200,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RefineStep {
    pub iteration: usize,
    pub plane: Hyperplane,
    /// Maximum of `n . P` over product states.
    pub max_value: f64,
    pub maximizer: FeasiblePoint,
    /// Index of the point swapped out, if any.
    pub replaced: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RefineOutcome {
    pub plane: Hyperplane,
    pub points: Vec<FeasiblePoint>,
    /// Global maximum of `n . P` over product states.
    pub tangent_offset: f64,
    pub witness: WitnessCoeffs,
    pub iterations: usize,
    pub trace: Vec<RefineStep>,
}

fn plane_key(h: &Hyperplane) -> Vec<i64> {
    h.normal.iter().map(|x| (x * 1e9).round() as i64).collect()
}

/// Refines a plane through `seed` toward a supporting plane of the feasible
/// region.
///
/// Each iteration fits the plane through the current points, maximizes its
/// functional over product states and, when the maximum exceeds the plane
/// level by more than `tol`, swaps the maximizer in. The swapped-out point
/// is chosen by a ratio test: with `c_k` the columns of the inverse point
/// matrix, replacing point `k` moves the normal along `-c_k` by
/// `t_k = (n.m - 1) / (m.c_k)`; among `k` with `m.c_k > 0` the smallest
/// `t_k` wins and ties go to the lowest index.
pub fn refine_facet(seed: &[FeasiblePoint], fam: &CoordinateFamily, cfg: &RefineConfig) -> Result<RefineOutcome> {
    if seed.len() != fam.dim() || seed.iter().any(|p| p.family != fam.kind) {
        return Err(Error::PointCount {
            expected: fam.dim(),
            got: seed.len(),
        });
    }
    let mut points = seed.to_vec();
    let mut trace = Vec::new();
    let mut seen = HashSet::new();
    for iteration in 0..=cfg.max_iters {
        let plane = hyperplane_through(&points)?;
        if plane.offset != 1.0 {
            return Err(Error::InvalidState("refinement plane passes through the origin".into()));
        }
        if !seen.insert(plane_key(&plane)) {
            return Err(Error::Cycle(iteration));
        }
        let functional = fam.witness(0.0, &plane.normal).scaled(-1.0).assemble();
        let ext = max_product_expectation(&functional, &cfg.optimizer)?;
        let maximizer = expectation_map(&ext.state, fam);
        let max_value = ext.value;
        if max_value <= 1.0 + cfg.tol {
            trace.push(RefineStep {
                iteration,
                plane: plane.clone(),
                max_value,
                maximizer,
                replaced: None,
            });
            let tangent_offset = max_value.max(1.0);
            let witness = facet_to_witness(&plane, Some(tangent_offset));
            return Ok(RefineOutcome {
                plane,
                points,
                tangent_offset,
                witness,
                iterations: iteration,
                trace,
            });
        }
        if iteration == cfg.max_iters {
            break;
        }
        let rows: Vec<Vec<f64>> = points.iter().map(|p| p.coords.clone()).collect();
        let inv = invert(&rows).ok_or_else(|| Error::InvalidState("singular point matrix".into()))?;
        let m = &maximizer.coords;
        let excess = dot(&plane.normal, m) - 1.0;
        let mut pick: Option<(f64, usize)> = None;
        for k in 0..points.len() {
            let mc: f64 = (0..m.len()).map(|r| m[r] * inv[r][k]).sum();
            if mc <= 1e-12 {
                continue;
            }
            let t = excess / mc;
            if pick.is_none_or(|(bt, _)| t < bt) {
                pick = Some((t, k));
            }
        }
        let (_, k) = pick.ok_or_else(|| {
            Error::NonConvergence(format!("iteration {iteration}: no admissible swap"))
        })?;
        trace.push(RefineStep {
            iteration,
            plane,
            max_value,
            maximizer: maximizer.clone(),
            replaced: Some(k),
        });
        points[k] = maximizer;
    }
    Err(Error::NonConvergence(format!(
        "refinement did not reach a supporting plane in {} iterations (last max {:.12})",
        cfg.max_iters,
        trace.last().map(|s| s.max_value).unwrap_or(f64::NAN)
    )))
}
