//! Symmetry actions on witnesses, orbit enumeration and transport of
//! decomposition certificates along orbits.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{c64, kron, partial_transpose_first, CMat};
use crate::operators::{
    approx_facet_certificate, approx_facet_w1, case_c_certificate, case_c_witness,
    verify_decomposition_matrix, CertificateSource, DecompositionCertificate, FacetSigns,
    OperatorLabel, WitnessCoeffs,
};
use crate::su3::gellmann_or_identity;

pub const DEFAULT_ORBIT_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryGenerator {
    /// Party exchange `Pi W Pi`.
    Exchange,
    /// Partial transpose on the first factor.
    TransposeFirst,
    /// `M1 (x) I` with `M1 = diag(i, 1, -1)`.
    M1,
    /// `M2 (x) I` with `M2 = diag(1, i, -1)`.
    M2,
    /// `M3 (x) I` with `M3 = diag(1, -1, i)`.
    M3,
    M1Sq,
    M2Sq,
    /// Levels 0 and 1 exchanged on both parties.
    Permute01,
    /// Levels 1 and 2 exchanged on both parties.
    Permute12,
}

impl SymmetryGenerator {
    pub const ALL: [SymmetryGenerator; 9] = [
        SymmetryGenerator::Exchange,
        SymmetryGenerator::TransposeFirst,
        SymmetryGenerator::M1,
        SymmetryGenerator::M2,
        SymmetryGenerator::M3,
        SymmetryGenerator::M1Sq,
        SymmetryGenerator::M2Sq,
        SymmetryGenerator::Permute01,
        SymmetryGenerator::Permute12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SymmetryGenerator::Exchange => "exchange",
            SymmetryGenerator::TransposeFirst => "t1",
            SymmetryGenerator::M1 => "m1",
            SymmetryGenerator::M2 => "m2",
            SymmetryGenerator::M3 => "m3",
            SymmetryGenerator::M1Sq => "m1sq",
            SymmetryGenerator::M2Sq => "m2sq",
            SymmetryGenerator::Permute01 => "perm01",
            SymmetryGenerator::Permute12 => "perm12",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown generator '{s}'")))
    }

    /// The 3x3 local unitary for the diagonal generators.
    pub fn local_unitary(self) -> Option<CMat> {
        let (i, one) = (c64(0.0, 1.0), c64(1.0, 0.0));
        let d = |a, b, c| {
            let mut m = CMat::zeros(3, 3);
            m[(0, 0)] = a;
            m[(1, 1)] = b;
            m[(2, 2)] = c;
            m
        };
        match self {
            SymmetryGenerator::M1 => Some(d(i, one, -one)),
            SymmetryGenerator::M2 => Some(d(one, i, -one)),
            SymmetryGenerator::M3 => Some(d(one, -one, i)),
            SymmetryGenerator::M1Sq => Some(d(-one, one, one)),
            SymmetryGenerator::M2Sq => Some(d(one, -one, one)),
            _ => None,
        }
    }

    /// `(A, B)` with the generator acting as `A (x) B`, for local ones.
    pub fn local_factors(self) -> Option<(CMat, CMat)> {
        let perm = |a: usize, b: usize| {
            CMat::from_fn(3, 3, |r, c| {
                let img = if c == a { b } else if c == b { a } else { c };
                c64(if r == img { 1.0 } else { 0.0 }, 0.0)
            })
        };
        match self {
            SymmetryGenerator::Permute01 => Some((perm(0, 1), perm(0, 1))),
            SymmetryGenerator::Permute12 => Some((perm(1, 2), perm(1, 2))),
            g => Some((g.local_unitary()?, CMat::identity(3))),
        }
    }

    /// The 9x9 matrix of the generator when it is a unitary; `None` for the
    /// partial transpose.
    pub fn matrix(self) -> Option<CMat> {
        match self {
            SymmetryGenerator::Exchange => Some(exchange_op()),
            SymmetryGenerator::TransposeFirst => None,
            g => {
                let (a, b) = g.local_factors()?;
                Some(kron(&a, &b).expect("3x3 factors"))
            }
        }
    }
}

impl fmt::Display for SymmetryGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exchange operator `Pi = 1/3 I(x)I + 1/2 sum_k lambda_k (x) lambda_k`.
pub fn exchange_op() -> CMat {
    let mut m = CMat::identity(9).scale(1.0 / 3.0);
    for k in 1..=8u8 {
        let l = gellmann_or_identity(k).expect("index in range");
        m.add_scaled(0.5, &kron(&l, &l).expect("3x3 factors"));
    }
    m
}

/// `M lambda_k M^dagger = sign * lambda_target` for the three phase
/// generators; `lambda_3`, `lambda_8` and the identity are fixed.
pub fn m_action(gen: SymmetryGenerator, k: u8) -> (u8, f64) {
    use SymmetryGenerator::*;
    let table: [(u8, f64); 7] = match gen {
        M1 => [(2, -1.0), (1, 1.0), (3, 1.0), (5, 1.0), (4, -1.0), (6, -1.0), (7, -1.0)],
        M2 => [(2, 1.0), (1, -1.0), (3, 1.0), (4, -1.0), (5, -1.0), (7, 1.0), (6, -1.0)],
        M3 => [(1, -1.0), (2, -1.0), (3, 1.0), (5, 1.0), (4, -1.0), (7, -1.0), (6, 1.0)],
        M1Sq => return compose_m(M1, M1, k),
        M2Sq => return compose_m(M2, M2, k),
        _ => return (k, 1.0),
    };
    match k {
        1..=7 => table[k as usize - 1],
        _ => (k, 1.0),
    }
}

fn compose_m(a: SymmetryGenerator, b: SymmetryGenerator, k: u8) -> (u8, f64) {
    let (t, s) = m_action(b, k);
    let (t2, s2) = m_action(a, t);
    (t2, s * s2)
}

/// Coefficient-level action. Sqrt(3)-scaled labels of the input are kept.
pub fn act(gen: SymmetryGenerator, w: &WitnessCoeffs) -> WitnessCoeffs {
    let u = w.unit_scaled();
    let out = match gen {
        SymmetryGenerator::Exchange => {
            let mut o = WitnessCoeffs::new(u.a0);
            for (l, c) in u.terms() {
                o.set(l.swapped(), c);
            }
            o
        }
        SymmetryGenerator::TransposeFirst => u.partial_transpose(),
        SymmetryGenerator::Permute01 | SymmetryGenerator::Permute12 => {
            let m = act_matrix(gen, &u.assemble()).expect("9x9 operator");
            let mut o = WitnessCoeffs::from_matrix(&m, 0.0).expect("Hermitian image");
            // drop rounding debris so canonical keys stay stable
            for (l, c) in o.clone().terms() {
                if c.abs() < 1e-14 {
                    o.set(l, 0.0);
                }
            }
            o
        }
        g => {
            let mut o = WitnessCoeffs::new(u.a0);
            for (l, c) in u.terms() {
                let (t, s) = m_action(g, l.i());
                o.set(OperatorLabel::unit(t, l.j()), s * c);
            }
            o
        }
    };
    out.rescaled_like(w)
}

/// Matrix-level action.
pub fn act_matrix(gen: SymmetryGenerator, w: &CMat) -> Result<CMat> {
    match gen.matrix() {
        Some(u) => u.matmul(w)?.matmul(&u.adjoint()),
        None => partial_transpose_first(w),
    }
}

/// Carries `W = P + Q^{T1}` to the image of `W` under `gen`.
pub fn transport(gen: SymmetryGenerator, p: &CMat, q: &CMat) -> Result<(CMat, CMat)> {
    let conj = |x: &CMat, u: &CMat| u.matmul(x)?.matmul(&u.adjoint());
    match gen {
        SymmetryGenerator::TransposeFirst => Ok((q.clone(), p.clone())),
        SymmetryGenerator::Exchange => {
            let pi = exchange_op();
            Ok((conj(p, &pi)?, conj(q, &pi)?.transpose()))
        }
        g => {
            let (a, b) = g.local_factors().expect("local generator");
            let u = kron(&a, &b)?;
            let v = kron(&a.conj(), &b)?;
            Ok((conj(p, &u)?, conj(q, &v)?))
        }
    }
}

pub fn first_category() -> Vec<SymmetryGenerator> {
    use SymmetryGenerator::*;
    vec![Exchange, TransposeFirst, M1, M2, M3]
}

pub fn second_category() -> Vec<SymmetryGenerator> {
    use SymmetryGenerator::*;
    vec![Exchange, TransposeFirst, M1Sq, M2Sq]
}

/// Canonical key: unit-scale coefficients rounded to 12 decimals.
pub fn canonical_key(w: &WitnessCoeffs) -> Vec<(u8, u8, i64)> {
    let r = |x: f64| (x * 1e12).round() as i64;
    let u = w.unit_scaled();
    let mut key = vec![(0, 0, r(u.a0))];
    key.extend(
        u.terms()
            .map(|(l, c)| (l.i(), l.j(), r(c)))
            .filter(|t| t.2 != 0),
    );
    key
}

#[derive(Clone, Debug)]
pub struct OrbitMember {
    pub witness: WitnessCoeffs,
    /// Generators applied to the starting witness, first to last.
    pub word: Vec<SymmetryGenerator>,
}

#[derive(Clone, Debug)]
pub struct Orbit {
    /// Member with the smallest canonical key.
    pub representative: WitnessCoeffs,
    pub members: Vec<OrbitMember>,
    pub generators: Vec<SymmetryGenerator>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &WitnessCoeffs) -> bool {
        let k = canonical_key(w);
        self.members.iter().any(|m| canonical_key(&m.witness) == k)
    }
}

/// Breadth-first closure of `w` under `gens`, deduplicated by canonical key.
pub fn orbit(w: &WitnessCoeffs, gens: &[SymmetryGenerator], cap: usize) -> Result<Orbit> {
    let mut seen = HashMap::new();
    let mut members = vec![OrbitMember {
        witness: w.clone(),
        word: Vec::new(),
    }];
    seen.insert(canonical_key(w), 0usize);
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        for &g in gens {
            let img = act(g, &members[idx].witness);
            let key = canonical_key(&img);
            if seen.contains_key(&key) {
                continue;
            }
            if members.len() >= cap {
                return Err(Error::OrbitTooLarge(cap));
            }
            let mut word = members[idx].word.clone();
            word.push(g);
            seen.insert(key, members.len());
            queue.push_back(members.len());
            members.push(OrbitMember { witness: img, word });
        }
    }
    let representative = members
        .iter()
        .min_by_key(|m| canonical_key(&m.witness))
        .map(|m| m.witness.clone())
        .expect("orbit is nonempty");
    Ok(Orbit {
        representative,
        members,
        generators: gens.to_vec(),
    })
}

struct KnownEntry {
    base: &'static str,
    word: Vec<SymmetryGenerator>,
    p: CMat,
    q: CMat,
}

fn known_table() -> &'static HashMap<Vec<(u8, u8, i64)>, KnownEntry> {
    static TABLE: OnceLock<HashMap<Vec<(u8, u8, i64)>, KnownEntry>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = HashMap::new();
        let bases = [
            ("case-c", case_c_witness(), case_c_certificate()),
            ("approx1", approx_facet_w1(FacetSigns::default()), approx_facet_certificate()),
        ];
        let mut gens = first_category();
        gens.extend([SymmetryGenerator::Permute01, SymmetryGenerator::Permute12]);
        for (name, w, (p, q)) in bases {
            let orb = orbit(&w, &gens, DEFAULT_ORBIT_CAP).expect("finite orbit");
            for m in orb.members {
                let (mut p, mut q) = (p.clone(), q.clone());
                for &g in &m.word {
                    (p, q) = transport(g, &p, &q).expect("9x9 certificate");
                }
                table.entry(canonical_key(&m.witness)).or_insert(KnownEntry {
                    base: name,
                    word: m.word,
                    p,
                    q,
                });
            }
        }
        table
    })
}

/// Looks up `w` among the symmetry images of the built-in decomposable
/// witnesses and returns the transported certificate if it verifies.
pub fn known_certificate(w: &WitnessCoeffs) -> Result<Option<(CertificateSource, DecompositionCertificate)>> {
    let Some(entry) = known_table().get(&canonical_key(w)) else {
        return Ok(None);
    };
    let cert = verify_decomposition_matrix(&w.assemble(), &entry.p, &entry.q)?;
    if !cert.is_valid() {
        return Ok(None);
    }
    let source = CertificateSource::Transported {
        base: entry.base.to_string(),
        word: entry.word.iter().map(|g| g.name().to_string()).collect(),
    };
    Ok(Some((source, cert)))
}
