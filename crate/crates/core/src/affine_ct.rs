//! Cycle types of affine permutations `λ(A, v)` of GF(q)^n.
//!
//! A PRCF splits `λ(A, v)` into blocks `R ↦ R·X + U` on GF(q)[X]/(Q^e); each
//! block's cycle type follows from counting the points whose period divides
//! `ℓ` along a divisor chain, and the blocks combine with `⋇`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cgl::exceptional_power_set;
use crate::cycletype::CycleType;
use crate::error::{Error, Result};
use crate::gf::{enumerate_irreducibles, poly_order, Elem, Field, Poly};
use crate::linalg::{companion, prcf, AffineMap, Matrix, Vector};

/// How the translation part `U` sits relative to `Q^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitClass {
    /// `Q ≠ X - 1`; the cycle type does not depend on `U`.
    Generic,
    /// `Q = X - 1` and `(X - 1) | U`.
    Nonunit,
    /// `Q = X - 1`, `U` a unit, `e > 1` not a power of `p`.
    UnitENotPPower,
    /// `Q = X - 1`, `U` a unit, `e` a power of `p` (including `e = 1`).
    UnitEPPower,
}

/// One block `R ↦ R·X + U` of GF(q)[X]/(Q^e).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockCase {
    q: Poly,
    e: usize,
    class: UnitClass,
}

impl BlockCase {
    pub fn new(q: Poly, e: usize, class: UnitClass) -> Result<BlockCase> {
        validate_factor(&q, e)?;
        let want_generic = !is_x_minus_one(&q);
        if want_generic != (class == UnitClass::Generic) {
            return Err(Error::InvalidArgument(format!(
                "class {class:?} does not fit Q = {q}"
            )));
        }
        let p = q.field().p();
        let expected_unit = if is_power_of(p, e as u64) {
            UnitClass::UnitEPPower
        } else {
            UnitClass::UnitENotPPower
        };
        if matches!(class, UnitClass::UnitEPPower | UnitClass::UnitENotPPower) && class != expected_unit {
            return Err(Error::InvalidArgument(format!("class {class:?} does not fit e = {e}")));
        }
        Ok(BlockCase { q, e, class })
    }

    /// Classifies the block with translation `U`.
    pub fn classify(q: Poly, e: usize, u: &Poly) -> Result<BlockCase> {
        validate_factor(&q, e)?;
        let class = if !is_x_minus_one(&q) {
            UnitClass::Generic
        } else if u.eval(1) == 0 {
            UnitClass::Nonunit
        } else if is_power_of(q.field().p(), e as u64) {
            UnitClass::UnitEPPower
        } else {
            UnitClass::UnitENotPPower
        };
        Ok(BlockCase { q, e, class })
    }

    /// The classes that occur for this `(Q, e)` as `U` varies.
    pub fn classes(q: &Poly, e: usize) -> Vec<UnitClass> {
        if !is_x_minus_one(q) {
            vec![UnitClass::Generic]
        } else if is_power_of(q.field().p(), e as u64) {
            vec![UnitClass::Nonunit, UnitClass::UnitEPPower]
        } else {
            vec![UnitClass::Nonunit, UnitClass::UnitENotPPower]
        }
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn class(&self) -> UnitClass {
        self.class
    }

    /// A translation `U` of this class: `0` for non-units, `1` otherwise.
    pub fn witness_u(&self) -> Poly {
        match self.class {
            UnitClass::Nonunit => Poly::zero(self.q.field()),
            _ => Poly::one(self.q.field()),
        }
    }
}

fn validate_factor(q: &Poly, e: usize) -> Result<()> {
    if e == 0 {
        return Err(Error::InvalidArgument("block exponent must be positive".into()));
    }
    if !q.is_monic() {
        return Err(Error::NotMonic);
    }
    if q.is_x() {
        return Err(Error::InvalidArgument("Q = X gives a singular block".into()));
    }
    if !q.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    Ok(())
}

fn is_x_minus_one(q: &Poly) -> bool {
    q.degree() == Some(1) && q.coeff(0) == q.field().from_int(-1)
}

fn is_power_of(p: u64, mut n: u64) -> bool {
    while n.is_multiple_of(p) && n > 1 {
        n /= p;
    }
    n == 1
}

/// Smallest `c` with `p^c ≥ e`.
fn ceil_log(p: u64, e: u64) -> u32 {
    let (mut c, mut pc) = (0, 1u64);
    while pc < e {
        pc = pc.saturating_mul(p);
        c += 1;
    }
    c
}

fn nu_p(p: u64, mut n: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn checked_pow(base: u64, exp: u64) -> Result<u64> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or(Error::Overflow("block size"))
}

/// Cycle type of `R ↦ R·X + U` on GF(q)[X]/(Q^e) for any `U` of the given class.
pub fn block_cycle_type(case: &BlockCase) -> Result<CycleType> {
    let field = case.q.field();
    let (p, q) = (field.p(), field.size());
    let deg = case.q.degree().expect("irreducible") as u64;
    let e = case.e as u64;
    let c = ceil_log(p, e);
    let size = checked_pow(q, deg * e)?;
    match case.class {
        UnitClass::UnitENotPPower => {
            let len = p.pow(c);
            return CycleType::from_pairs([(len, size / len)]);
        }
        UnitClass::UnitEPPower => {
            let len = p * e;
            return CycleType::from_pairs([(len, size / len)]);
        }
        UnitClass::Generic | UnitClass::Nonunit => {}
    }
    // ord(X - 1) = 1, so one chain serves both remaining cases.
    let ord = poly_order(&case.q)?;
    // Number of points whose period divides `l`: q^{deg·min(e, ν_Q(X^l - 1))}.
    let dividing = |l: u64| -> Result<u64> {
        let nu = if !l.is_multiple_of(ord) {
            0
        } else {
            let v = nu_p(p, l / ord);
            if v >= c { e } else { p.pow(v).min(e) }
        };
        checked_pow(q, deg * nu)
    };
    let mut lengths = BTreeSet::from([1u64]);
    for a in 0..=c {
        lengths.insert(ord * p.pow(a));
    }
    let mut exact: BTreeMap<u64, u64> = BTreeMap::new();
    for &l in &lengths {
        let below: u64 = exact.iter().filter(|(&m, _)| l % m == 0).map(|(_, &n)| n).sum();
        exact.insert(l, dividing(l)? - below);
    }
    let mut out = CycleType::empty();
    for (l, n) in exact {
        debug_assert_eq!(n % l, 0, "points on {l}-cycles");
        out = out.try_mul(&CycleType::power(l, n / l))?;
    }
    Ok(out)
}

/// Which reading of the last case-(1) bullet to use in [`closed_form_cycle_type`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// Leading factor `q^{p^c·deg Q}`, as displayed.
    Displayed,
    /// Leading factor `q^{p^{c-1}·deg Q}`, as the point counts give.
    Corrected,
}

/// The displayed closed-form cycle counts, for comparison with [`block_cycle_type`].
///
/// Returns `None` where the formulas degenerate (`e = 1` in the non-unit cases)
/// or a count is not a whole number.
pub fn closed_form_cycle_type(case: &BlockCase, form: ClosedForm) -> Option<CycleType> {
    let field = case.q.field();
    let (p, q) = (field.p() as u128, field.size() as u128);
    let deg = case.q.degree()? as u32;
    let e = case.e as u32;
    let c = ceil_log(p as u64, e as u64);
    let pw = |b: u128, x: u32| b.checked_pow(x);
    let ratio = |num: u128, den: u128| num.is_multiple_of(den).then(|| num / den);
    let mut terms: Vec<(u128, u128)> = Vec::new();
    match case.class {
        UnitClass::Generic => {
            if e < 2 {
                return None;
            }
            let ord = poly_order(&case.q).ok()? as u128;
            terms.push((1, 1));
            terms.push((ord, ratio(pw(q, deg)? - 1, ord)?));
            for a in 1..c {
                let pa1 = pw(p, a - 1)? as u32;
                let num = pw(q, pa1 * deg)? * (pw(q, deg * pa1 * (p as u32 - 1))? - 1);
                terms.push((ord * pw(p, a)?, ratio(num, pw(p, a)? * ord)?));
            }
            let lead = match form {
                ClosedForm::Displayed => pw(p, c)?,
                ClosedForm::Corrected => pw(p, c - 1)?,
            } as u32;
            let pc1 = pw(p, c - 1)? as u32;
            let num = pw(q, lead * deg)?.checked_mul(pw(q, deg * (e - pc1))? - 1)?;
            terms.push((ord * pw(p, c)?, ratio(num, pw(p, c)? * ord)?));
        }
        UnitClass::Nonunit => {
            if e < 2 {
                return None;
            }
            terms.push((1, q));
            for a in 1..c {
                let pa1 = pw(p, a - 1)? as u32;
                let num = pw(q, pa1)? * (pw(q, pa1 * (p as u32 - 1))? - 1);
                terms.push((pw(p, a)?, ratio(num, pw(p, a)?)?));
            }
            let pc1 = pw(p, c - 1)? as u32;
            let num = pw(q, pc1)? * (pw(q, e - pc1)? - 1);
            terms.push((pw(p, c)?, ratio(num, pw(p, c)?)?));
        }
        UnitClass::UnitENotPPower => {
            terms.push((pw(p, c)?, ratio(pw(q, e)?, pw(p, c)?)?));
        }
        UnitClass::UnitEPPower => {
            let len = p * e as u128;
            terms.push((len, ratio(pw(q, e)?, len)?));
        }
    }
    let pairs = terms
        .into_iter()
        .map(|(l, k)| Some((u64::try_from(l).ok()?, u64::try_from(k).ok()?)))
        .collect::<Option<Vec<_>>>()?;
    CycleType::from_pairs(pairs).ok()
}

/// The PRCF blocks of `λ(A, v)` with their classes, in block order.
pub fn affine_block_cases(f: &AffineMap) -> Result<Vec<BlockCase>> {
    let form = prcf(f.matrix())?;
    let shifted = f.shift().mul_matrix(&form.basis_change);
    let field = f.field();
    form.blocks
        .iter()
        .zip(form.block_ranges())
        .map(|((q, e), (off, size))| {
            let u = Poly::new(field, shifted.data()[off..off + size].to_vec());
            BlockCase::classify(q.clone(), *e, &u)
        })
        .collect()
}

/// Cycle type of the affine permutation `x ↦ x·A + v`.
pub fn affine_cycle_type(f: &AffineMap) -> Result<CycleType> {
    let cases = affine_block_cases(f)?;
    let parts = cases.iter().map(block_cycle_type).collect::<Result<Vec<_>>>()?;
    CycleType::weixu_all(&parts)
}

/// `Γ(M)`: the cycle types of `λ(M, v)` over all shifts `v`, each with one shift realizing it.
pub fn gamma_with_witnesses(m: &Matrix) -> Result<BTreeMap<CycleType, Vector>> {
    if !m.is_invertible() {
        return Err(Error::Singular);
    }
    let field = m.field();
    let form = prcf(m)?;
    let inv = form.basis_change.inverse()?;
    let mut combos: Vec<(CycleType, Vec<Elem>)> = vec![(CycleType::cycle(1), Vec::new())];
    for (q, e) in &form.blocks {
        let size = q.degree().expect("irreducible") * e;
        let mut next = Vec::new();
        for class in BlockCase::classes(q, *e) {
            let case = BlockCase::new(q.clone(), *e, class)?;
            let ct = block_cycle_type(&case)?;
            let mut seg = vec![0; size];
            if let Some(&u0) = case.witness_u().coeffs().first() {
                seg[0] = u0;
            }
            for (acc, shift) in &combos {
                let mut s = shift.clone();
                s.extend_from_slice(&seg);
                next.push((acc.try_weixu(&ct)?, s));
            }
        }
        combos = next;
    }
    let mut out = BTreeMap::new();
    for (ct, shift) in combos {
        let v = Vector::new(field, shift).mul_matrix(&inv);
        out.entry(ct).or_insert(v);
    }
    Ok(out)
}

/// `Γ(M)`.
pub fn gamma_of_matrix(m: &Matrix) -> Result<BTreeSet<CycleType>> {
    Ok(gamma_with_witnesses(m)?.into_keys().collect())
}

/// `Γ(P) = Γ(Comp(P))` for monic non-constant `P` with `P(0) ≠ 0`.
pub fn gamma_of_poly(p: &Poly) -> Result<BTreeSet<CycleType>> {
    if p.coeff(0) == 0 {
        return Err(Error::InvalidArgument("P(0) must be nonzero".into()));
    }
    gamma_of_matrix(&companion(p)?)
}

/// Every PRCF block pattern `[(Q, e), …]` of a `d × d` matrix over `field`
/// (`Σ e·deg Q = d`) avoiding the excluded `Q`, each as a non-decreasing multiset.
pub fn canonical_forms(
    field: &Field,
    d: usize,
    exclude: impl Fn(&Poly) -> bool,
) -> Vec<Vec<(Poly, usize)>> {
    let mut parts: Vec<(Poly, usize, usize)> = Vec::new();
    for q in enumerate_irreducibles(field, d) {
        if exclude(&q) {
            continue;
        }
        let deg = q.degree().expect("irreducible");
        for e in 1..=d / deg {
            parts.push((q.clone(), e, deg * e));
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        parts: &[(Poly, usize, usize)],
        start: usize,
        left: usize,
        current: &mut Vec<(Poly, usize)>,
        out: &mut Vec<Vec<(Poly, usize)>>,
    ) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        for i in start..parts.len() {
            let (q, e, size) = &parts[i];
            if *size <= left {
                current.push((q.clone(), *e));
                rec(parts, i, left - size, current, out);
                current.pop();
            }
        }
    }
    rec(&parts, 0, d, &mut current, &mut out);
    out
}

/// Block-diagonal `diag(Comp(Q_1^{e_1}), …)`.
pub fn canonical_matrix(field: &Field, blocks: &[(Poly, usize)]) -> Result<Matrix> {
    let comps = blocks
        .iter()
        .map(|(q, e)| companion(&q.pow(*e as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::block_diag(field, &comps))
}

/// `Γ(d, p, ℓ)` with one witness `(M, w)` per cycle type, `M ∈ CGL_d(p)^{(ℓ)}`.
pub fn gamma_dpl_witnesses(d: usize, p: u64, l: u64) -> Result<BTreeMap<CycleType, (Matrix, Vector)>> {
    if d == 0 || l == 0 {
        return Err(Error::InvalidArgument("d and ℓ must be positive".into()));
    }
    let field = Field::prime(p)?;
    if l >= 2 {
        if let Some(explicit) = exceptional_power_set(&field, d) {
            return witnesses_over(explicit);
        }
    }
    let minus_one = field.from_int(-1);
    let plus_one = Poly::new(&field, vec![field.neg(minus_one), 1]);
    canonical_witnesses(&field, d, |q| q.is_x() || (l == 1 && *q == plus_one))
}

/// `CT(AGL_d(p))` with one witness `(M, w)` per cycle type.
pub fn agl_witnesses(d: usize, p: u64) -> Result<BTreeMap<CycleType, (Matrix, Vector)>> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    canonical_witnesses(&Field::prime(p)?, d, Poly::is_x)
}

fn canonical_witnesses(
    field: &Field,
    d: usize,
    exclude: impl Fn(&Poly) -> bool,
) -> Result<BTreeMap<CycleType, (Matrix, Vector)>> {
    let candidates = canonical_forms(field, d, exclude)
        .iter()
        .map(|blocks| canonical_matrix(field, blocks))
        .collect::<Result<Vec<_>>>()?;
    witnesses_over(candidates)
}

fn witnesses_over(candidates: Vec<Matrix>) -> Result<BTreeMap<CycleType, (Matrix, Vector)>> {
    let mut out = BTreeMap::new();
    for m in candidates {
        for (ct, v) in gamma_with_witnesses(&m)? {
            out.entry(ct).or_insert_with(|| (m.clone(), v));
        }
    }
    Ok(out)
}

/// `Γ(d, p, ℓ)`.
pub fn gamma_dpl(d: usize, p: u64, l: u64) -> Result<BTreeSet<CycleType>> {
    Ok(gamma_dpl_witnesses(d, p, l)?.into_keys().collect())
}
