//! Complete linear maps: `CGL_d(q)`, its product sets `CGL_d(q)^{(ℓ)}`, and
//! seeded factorizations into complete or fixed-point-free factors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::affine_ct::gamma_dpl_witnesses;
use crate::cycletype::CycleType;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{Matrix, Vector};

/// Random draws before the exhaustive fallback or giving up.
const SEARCH_ATTEMPTS: usize = 4096;
/// Largest matrix space `q^{d²}` scanned exhaustively.
const EXHAUSTIVE_LIMIT: u64 = 100_000;

/// `M` is invertible with no eigenvalue `-1`.
pub fn is_cgl(m: &Matrix) -> bool {
    m.is_invertible() && (m + &Matrix::identity(m.field(), m.rows())).is_invertible()
}

/// `M` is invertible with no eigenvalue `1`.
pub fn is_fpf(m: &Matrix) -> bool {
    m.is_invertible() && (m - &Matrix::identity(m.field(), m.rows())).is_invertible()
}

/// Shape of `CGL_d(q)^{(ℓ)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CglPowerSet {
    /// `CGL_d(q)` itself (`ℓ = 1`).
    Cgl,
    /// All of `GL_d(q)`.
    Gl,
    /// An explicit list of matrices; empty for `(d, q) = (1, 2)`.
    Explicit(Vec<Matrix>),
}

impl CglPowerSet {
    pub fn contains(&self, m: &Matrix) -> bool {
        match self {
            CglPowerSet::Cgl => is_cgl(m),
            CglPowerSet::Gl => m.is_invertible(),
            CglPowerSet::Explicit(list) => list.contains(m),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            CglPowerSet::Cgl => "CGL",
            CglPowerSet::Gl => "GL",
            CglPowerSet::Explicit(list) if list.is_empty() => "empty",
            CglPowerSet::Explicit(_) => "explicit",
        }
    }
}

/// `CGL_d(q)^{(ℓ)}` for `ℓ ≥ 2` in the three small cases where it is not `GL_d(q)`.
pub fn exceptional_power_set(field: &Field, d: usize) -> Option<Vec<Matrix>> {
    match (d, field.size()) {
        (1, 2) => Some(Vec::new()),
        (1, 3) => Some(vec![Matrix::identity(field, 1)]),
        (2, 2) => Some(vec![
            Matrix::identity(field, 2),
            Matrix::from_ints(field, &[&[0, 1], &[1, 1]]),
            Matrix::from_ints(field, &[&[1, 1], &[1, 0]]),
        ]),
        _ => None,
    }
}

pub fn cgl_power_set(field: &Field, d: usize, l: u64) -> Result<CglPowerSet> {
    if d == 0 || l == 0 {
        return Err(Error::InvalidArgument("d and ℓ must be positive".into()));
    }
    if l == 1 {
        return Ok(CglPowerSet::Cgl);
    }
    Ok(exceptional_power_set(field, d).map_or(CglPowerSet::Gl, CglPowerSet::Explicit))
}

/// `factors[0]·factors[1]⋯ = product`, every factor in `CGL_d(q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CglFactorization {
    pub factors: Vec<Matrix>,
    pub product: Matrix,
}

impl CglFactorization {
    pub fn verify(&self) -> bool {
        let n = self.product.rows();
        let field = self.product.field();
        self.factors.iter().all(is_cgl)
            && self.factors.iter().fold(Matrix::identity(field, n), |acc, f| &acc * f) == self.product
    }
}

fn random_with(field: &Field, n: usize, rng: &mut ChaCha8Rng, pred: fn(&Matrix) -> bool) -> Option<Matrix> {
    (0..SEARCH_ATTEMPTS)
        .map(|_| Matrix::random_invertible(field, n, rng))
        .find(pred)
}

/// All `n × n` matrices when there are few enough to scan.
fn all_matrices(field: &Field, n: usize) -> Option<impl Iterator<Item = Matrix> + '_> {
    let q = field.size();
    let total = q.checked_pow(u32::try_from(n * n).ok()?).filter(|&t| t <= EXHAUSTIVE_LIMIT)?;
    Some((0..total).map(move |mut idx| {
        let rows = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let x = idx % q;
                        idx /= q;
                        x
                    })
                    .collect()
            })
            .collect();
        Matrix::from_rows(field, rows).expect("square")
    }))
}

/// `(A, C)` with `A·C = M` and both satisfying `pred`.
fn split_in_two(m: &Matrix, rng: &mut ChaCha8Rng, pred: fn(&Matrix) -> bool) -> Option<(Matrix, Matrix)> {
    let field = m.field();
    let n = m.rows();
    for _ in 0..SEARCH_ATTEMPTS {
        let c = Matrix::random_invertible(field, n, rng);
        if pred(&c) {
            let a = m * &c.inverse().expect("invertible");
            if pred(&a) {
                return Some((a, c));
            }
        }
    }
    all_matrices(field, n)?.find_map(|c| {
        if !pred(&c) {
            return None;
        }
        let a = m * &c.inverse().expect("pred implies invertible");
        pred(&a).then_some((a, c))
    })
}

fn check_square_invertible(m: &Matrix) -> Result<()> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::DimensionMismatch("expected a non-empty square matrix".into()));
    }
    if !m.is_invertible() {
        return Err(Error::Singular);
    }
    Ok(())
}

/// Writes `M` as a product of `ℓ` matrices in `CGL_d(q)`. Deterministic in `seed`.
pub fn factor_into_cgl(m: &Matrix, l: u64, seed: u64) -> Result<CglFactorization> {
    check_square_invertible(m)?;
    let field = m.field();
    let n = m.rows();
    let set = cgl_power_set(field, n, l)?;
    if !set.contains(m) {
        return Err(Error::Infeasible(format!(
            "matrix is not a product of {l} complete linear maps"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = usize::try_from(l).map_err(|_| Error::Overflow("factor count"))?;
    let fail = || Error::Infeasible("no complete factorization found".into());
    let mut factors = Vec::with_capacity(l);
    if l == 1 {
        factors.push(m.clone());
    } else if field.p() != 2 {
        let (a, c) = split_in_two(m, &mut rng, is_cgl).ok_or_else(fail)?;
        factors.extend([a, c]);
        factors.resize(l, Matrix::identity(field, n));
    } else {
        let mut target = m.clone();
        let mut tail = None;
        if l % 2 == 1 {
            let c = random_with(field, n, &mut rng, is_cgl).ok_or_else(fail)?;
            target = &target * &c.inverse()?;
            tail = Some(c);
        }
        let (a, c) = split_in_two(&target, &mut rng, is_cgl).ok_or_else(fail)?;
        factors.extend([a, c]);
        factors.extend(tail);
        while factors.len() < l {
            let c = random_with(field, n, &mut rng, is_cgl).ok_or_else(fail)?;
            let inv = c.inverse()?;
            factors.extend([c, inv]);
        }
    }
    let out = CglFactorization { factors, product: m.clone() };
    debug_assert!(out.verify());
    Ok(out)
}

/// Finds `M ∈ CGL_d(p)^{(ℓ)}`, already split into `ℓ` complete factors, and a
/// shift `w` with `CT(λ(M, w)) = γ`.
pub fn realize_gamma(
    gamma: &CycleType,
    d: usize,
    p: u64,
    l: u64,
    seed: u64,
) -> Result<(Vec<Matrix>, Vector)> {
    let witnesses = gamma_dpl_witnesses(d, p, l)?;
    let (m, w) = witnesses
        .get(gamma)
        .ok_or_else(|| Error::Infeasible(format!("{gamma} is not in Γ({d}, {p}, {l})")))?;
    Ok((factor_into_cgl(m, l, seed)?.factors, w.clone()))
}

/// Writes `M` as `C1·C2` with both factors fixed-point-free.
pub fn two_fpf_product(m: &Matrix, seed: u64) -> Result<(Matrix, Matrix)> {
    check_square_invertible(m)?;
    if exceptional_power_set(m.field(), m.rows()).is_some() {
        return Err(Error::Infeasible(format!(
            "no two-factor fixed-point-free splitting over (d, q) = ({}, {})",
            m.rows(),
            m.field().size()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    split_in_two(m, &mut rng, is_fpf)
        .ok_or_else(|| Error::Infeasible("no fixed-point-free factorization found".into()))
}
