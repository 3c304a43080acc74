use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf::field::{Elem, Field};

/// Dense univariate polynomial over a [`Field`], constant term first.
///
/// The coefficient vector never has trailing zeros; the zero polynomial has
/// no coefficients and degree `None`.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        debug_assert!(coeffs.iter().all(|&c| field.contains(c)));
        Poly { field: field.clone(), coeffs }
    }

    /// Polynomial with prime-subfield coefficients given as integers.
    pub fn from_ints(field: &Field, coeffs: &[i64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, 1)
    }

    pub fn constant(field: &Field, c: Elem) -> Poly {
        Poly::new(field, vec![c])
    }

    /// The indeterminate `X`.
    pub fn x(field: &Field) -> Poly {
        Poly::monomial(field, 1, 1)
    }

    /// `c·X^e`.
    pub fn monomial(field: &Field, c: Elem, e: usize) -> Poly {
        let mut coeffs = vec![0; e + 1];
        coeffs[e] = c;
        Poly::new(field, coeffs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of `X^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn is_x(&self) -> bool {
        self.coeffs == [0, 1]
    }

    fn check_field(&self, other: &Poly) {
        assert!(self.field == other.field, "polynomials over different fields");
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_field(other);
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Poly::new(f, coeffs)
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Elem) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_field(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division: `(quotient, remainder)` with `deg(remainder) < deg(divisor)`.
    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.check_field(divisor);
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let f = &self.field;
        let lead_inv = f.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut quot = vec![0; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[i - dd] = factor;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let t = f.mul(factor, d);
                rem[i - dd + j] = f.sub(rem[i - dd + j], t);
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(f, quot), Poly::new(f, rem)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Scales to a monic polynomial; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self.field.inv(self.leading()).expect("nonzero leading coefficient");
        self.scale(inv)
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, mut e: u64, modulus: &Poly) -> Result<Poly> {
        let mut base = self.rem(modulus)?;
        let mut acc = Poly::one(&self.field).rem(modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(modulus)?;
            }
        }
        Ok(acc)
    }

    /// Rabin's irreducibility test over the coefficient field.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n,
        };
        let q = self.field.size();
        let x = Poly::x(&self.field);
        // frob[i] = X^{q^i} mod self
        let mut frob = vec![x.clone()];
        for _ in 0..n {
            let next = frob.last().unwrap().pow_mod(q, self).expect("nonzero modulus");
            frob.push(next);
        }
        if frob[n] != x.rem(self).expect("nonzero modulus") {
            return false;
        }
        factor_u64(n as u64).iter().all(|&(r, _)| {
            let h = frob[n / r as usize].sub(&x);
            h.gcd(self).degree() == Some(0)
        })
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int((i as u64 % f.p()) as i64)))
            .collect();
        Poly::new(f, coeffs)
    }

    /// Canonical reduction of a polynomial function of GF(q): exponents `e ≥ q`
    /// are folded with `Y^q = Y`, giving the representative of degree `< q`.
    pub fn reduce_mod_xq_minus_x(&self) -> Poly {
        let q = self.field.size() as usize;
        if self.coeffs.len() <= q {
            return self.clone();
        }
        let f = &self.field;
        let mut out = vec![0; q];
        for (e, &c) in self.coeffs.iter().enumerate() {
            let target = if e < q { e } else { (e - 1) % (q - 1) + 1 };
            out[target] = f.add(out[target], c);
        }
        Poly::new(f, out)
    }

    /// Text form with the given variable name, highest degree first, e.g.
    /// `X^3 + 2*X + 1` or `w^16*x^18 + x + w^6`.
    pub fn to_text(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let f = &self.field;
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(e, &c)| {
                let mono = match e {
                    0 => String::new(),
                    1 => var.to_string(),
                    e => format!("{var}^{e}"),
                };
                match (e, c) {
                    (0, c) => f.format_elem(c),
                    (_, 1) => mono,
                    (_, c) => format!("{}*{mono}", f.format_elem(c)),
                }
            })
            .collect();
        terms.join(" + ")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text("X"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// Grade-lex order: by degree, then by coefficients from `X^{d-1}` down to the
/// constant term, each compared by element index.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

/// Prime factorization by trial division, ascending primes.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All monic polynomials of degree `m`, in grade-lex order.
pub fn monic_polys(field: &Field, m: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = field.size();
    let count = q.checked_pow(m as u32).expect("enumeration size fits in u64");
    (0..count).map(move |mut idx| {
        let mut coeffs = Vec::with_capacity(m + 1);
        for _ in 0..m {
            coeffs.push(idx % q);
            idx /= q;
        }
        coeffs.push(1);
        Poly::new(field, coeffs)
    })
}

/// All monic irreducible polynomials of degree `1..=max_degree`, in grade-lex order.
pub fn enumerate_irreducibles(field: &Field, max_degree: usize) -> Vec<Poly> {
    (1..=max_degree)
        .flat_map(|m| monic_polys(field, m).filter(Poly::is_irreducible))
        .collect()
}

/// Factors a monic polynomial into `(irreducible, multiplicity)` pairs by trial
/// division, merged and sorted in grade-lex order.
pub fn factor_monic(p: &Poly) -> Result<Vec<(Poly, usize)>> {
    match p.degree() {
        None | Some(0) => {
            return Err(Error::InvalidArgument("factor_monic needs degree at least 1".into()))
        }
        _ if !p.is_monic() => return Err(Error::NotMonic),
        _ => {}
    }
    let field = p.field();
    let mut rest = p.clone();
    let mut found: Vec<(Poly, usize)> = Vec::new();
    let mut m = 1;
    while 2 * m <= rest.degree().unwrap_or(0) {
        for cand in monic_polys(field, m) {
            if 2 * m > rest.degree().unwrap_or(0) {
                break;
            }
            let mut e = 0;
            loop {
                let (quot, r) = rest.divmod(&cand)?;
                if !r.is_zero() {
                    break;
                }
                rest = quot;
                e += 1;
            }
            if e > 0 {
                found.push((cand, e));
            }
        }
        m += 1;
    }
    if rest.degree().unwrap_or(0) >= 1 {
        match found.iter_mut().find(|(f, _)| *f == rest) {
            Some(entry) => entry.1 += 1,
            None => found.push((rest, 1)),
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(found)
}

/// Product `∏ Q^e` of a factorization.
pub fn expand_factors(field: &Field, factors: &[(Poly, usize)]) -> Poly {
    factors
        .iter()
        .fold(Poly::one(field), |acc, (q, e)| acc.mul(&q.pow(*e as u64)))
}

/// Multiplicative order of `X` modulo a monic irreducible `Q ≠ X`: the least
/// `n ≥ 1` with `Q | X^n - 1`.
pub fn poly_order(q: &Poly) -> Result<u64> {
    if !q.is_monic() {
        return Err(Error::NotMonic);
    }
    if q.is_x() {
        return Err(Error::InvalidArgument("X has no multiplicative order".into()));
    }
    if !q.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let deg = q.degree().expect("irreducible polynomials are nonzero") as u32;
    let group = q
        .field()
        .size()
        .checked_pow(deg)
        .ok_or(Error::Overflow("q^deg(Q)"))?
        - 1;
    let x = Poly::x(q.field());
    let one = Poly::one(q.field());
    let mut ord = group;
    for (r, _) in factor_u64(group) {
        while ord % r == 0 && x.pow_mod(ord / r, q)? == one {
            ord /= r;
        }
    }
    Ok(ord)
}

/// Largest `m` with `Q^m | R`.
pub fn q_adic_valuation(r: &Poly, q: &Poly) -> Result<u32> {
    if r.is_zero() {
        return Err(Error::InvalidArgument("valuation of the zero polynomial".into()));
    }
    if q.degree().unwrap_or(0) == 0 {
        return Err(Error::InvalidArgument("valuation base must be non-constant".into()));
    }
    let mut rest = r.clone();
    let mut m = 0;
    loop {
        let (quot, rem) = rest.divmod(q)?;
        if !rem.is_zero() {
            return Ok(m);
        }
        rest = quot;
        m += 1;
    }
}

/// First primitive irreducible polynomial of degree `k` over the prime field, in grade-lex order.
pub(crate) fn first_primitive(base: &Field, k: usize) -> Result<Poly> {
    let target = base
        .size()
        .checked_pow(k as u32)
        .ok_or(Error::Overflow("p^k"))?
        - 1;
    for cand in monic_polys(base, k) {
        if cand.coeff(0) != 0 && cand.is_irreducible() && poly_order(&cand)? == target {
            return Ok(cand);
        }
    }
    Err(Error::InvalidArgument(format!("no primitive polynomial of degree {k}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = gf(3);
        let xm1 = Poly::from_ints(&f3, &[-1, 1]);
        assert_eq!(xm1.mul(&xm1), Poly::from_ints(&f3, &[1, 1, 1]));
        let a = Poly::from_ints(&f3, &[-1, 0, 1]);
        assert_eq!(a.gcd(&xm1), xm1);
        assert_eq!(Poly::from_ints(&f3, &[2, 1, 1]).eval(1), 1);
        assert_eq!(a.divmod(&Poly::zero(&f3)), Err(Error::DivisionByZero));
        let (quot, rem) = Poly::from_ints(&f3, &[1, 2, 0, 1, 1]).divmod(&a).unwrap();
        assert_eq!(quot.mul(&a).add(&rem), Poly::from_ints(&f3, &[1, 2, 0, 1, 1]));
        assert!(rem.degree() < a.degree());
        assert_eq!(Poly::zero(&f3).degree(), None);
    }

    #[test]
    fn factor_examples() {
        let f2 = gf(2);
        assert_eq!(
            factor_monic(&Poly::from_ints(&f2, &[1, 0, 1])).unwrap(),
            vec![(Poly::from_ints(&f2, &[1, 1]), 2)]
        );
        let f5 = gf(5);
        assert_eq!(factor_monic(&Poly::x(&f5)).unwrap(), vec![(Poly::x(&f5), 1)]);
        assert_eq!(factor_monic(&Poly::from_ints(&f5, &[1, 2])), Err(Error::NotMonic));

        // (X-1)^2 (X-1)^3 (X^2+X+2) over GF(3)
        let f3 = gf(3);
        let xm1 = Poly::from_ints(&f3, &[-1, 1]);
        let q = Poly::from_ints(&f3, &[2, 1, 1]);
        let charpoly = xm1.pow(5).mul(&q);
        assert_eq!(factor_monic(&charpoly).unwrap(), vec![(xm1, 5), (q, 1)]);
    }

    #[test]
    fn factorization_remultiplies_exhaustively() {
        for p in [2u64, 3] {
            let f = gf(p);
            let max = if p == 2 { 8 } else { 6 };
            for deg in 1..=max {
                for poly in monic_polys(&f, deg) {
                    let factors = factor_monic(&poly).unwrap();
                    assert_eq!(expand_factors(&f, &factors), poly);
                    assert!(factors.iter().all(|(q, _)| q.is_irreducible() && q.is_monic()));
                    assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
                }
            }
        }
    }

    #[test]
    fn orders() {
        let f3 = gf(3);
        assert_eq!(poly_order(&Poly::from_ints(&f3, &[-1, 1])).unwrap(), 1);
        assert_eq!(poly_order(&Poly::from_ints(&f3, &[2, 1, 1])).unwrap(), 8);
        let f2 = gf(2);
        assert_eq!(poly_order(&Poly::from_ints(&f2, &[1, 1, 1])).unwrap(), 3);
        assert!(poly_order(&Poly::x(&f2)).is_err());
        assert_eq!(poly_order(&Poly::from_ints(&f2, &[1, 0, 1])), Err(Error::NotIrreducible));
    }

    /// Least `n` with `X^n ≡ 1 (mod Q)`, by stepping through powers.
    fn brute_order(q: &Poly) -> u64 {
        let x = Poly::x(q.field());
        let one = Poly::one(q.field());
        let mut acc = x.rem(q).unwrap();
        let mut n = 1;
        while acc != one {
            acc = acc.mul(&x).rem(q).unwrap();
            n += 1;
        }
        n
    }

    #[test]
    fn order_properties() {
        for field in [gf(2), gf(3), Field::new(2, 2).unwrap()] {
            for q in enumerate_irreducibles(&field, 3) {
                if q.is_x() {
                    continue;
                }
                let ord = poly_order(&q).unwrap();
                assert_eq!(ord, brute_order(&q), "{q}");
                let group = field.size().pow(q.degree().unwrap() as u32) - 1;
                assert_eq!(group % ord, 0);
            }
        }
    }

    #[test]
    fn valuations() {
        let f3 = gf(3);
        let xm1 = Poly::from_ints(&f3, &[-1, 1]);
        assert_eq!(q_adic_valuation(&Poly::from_ints(&f3, &[-1, 0, 0, 1]), &xm1).unwrap(), 3);
        let q = Poly::from_ints(&f3, &[2, 1, 1]);
        assert_eq!(q_adic_valuation(&q, &xm1).unwrap(), 0);
        let r = q.pow(2).mul(&Poly::from_ints(&f3, &[1, 1]));
        assert_eq!(q_adic_valuation(&r, &q).unwrap(), 2);
        assert!(q_adic_valuation(&Poly::zero(&f3), &q).is_err());
    }

    /// `ν_p(n)`.
    fn nu_p(mut n: u64, p: u64) -> u32 {
        let mut v = 0;
        while n.is_multiple_of(p) {
            n /= p;
            v += 1;
        }
        v
    }

    #[test]
    fn valuation_of_x_l_minus_one_follows_order_formula() {
        for p in [2u64, 3] {
            let f = gf(p);
            for q in enumerate_irreducibles(&f, 3) {
                if q.is_x() {
                    continue;
                }
                let ord = poly_order(&q).unwrap();
                for l in 1..=100u64 {
                    let xl1 = Poly::monomial(&f, 1, l as usize).sub(&Poly::one(&f));
                    let got = q_adic_valuation(&xl1, &q).unwrap() as u64;
                    let want = if l % ord != 0 { 0 } else { p.pow(nu_p(l / ord, p)) };
                    assert_eq!(got, want, "Q = {q}, l = {l}");
                }
            }
        }
    }

    #[test]
    fn irreducible_enumeration() {
        let f2 = gf(2);
        assert_eq!(
            enumerate_irreducibles(&f2, 2),
            vec![
                Poly::from_ints(&f2, &[0, 1]),
                Poly::from_ints(&f2, &[1, 1]),
                Poly::from_ints(&f2, &[1, 1, 1])
            ]
        );
        let f3 = gf(3);
        assert_eq!(
            enumerate_irreducibles(&f3, 1),
            vec![
                Poly::from_ints(&f3, &[0, 1]),
                Poly::from_ints(&f3, &[1, 1]),
                Poly::from_ints(&f3, &[2, 1])
            ]
        );
        // necklace count (9 - 3) / 2, against a root-free check (quadratics are
        // irreducible iff they have no root)
        let quadratics: Vec<_> = enumerate_irreducibles(&f3, 2)
            .into_iter()
            .filter(|q| q.degree() == Some(2))
            .collect();
        assert_eq!(quadratics.len(), 3);
        let rootless = monic_polys(&f3, 2)
            .filter(|q| f3.elements().all(|a| q.eval(a) != 0))
            .count();
        assert_eq!(rootless, 3);
    }

    #[test]
    fn text_rendering() {
        let f3 = gf(3);
        assert_eq!(Poly::from_ints(&f3, &[1, -1, 0, 1]).to_string(), "X^3 + 2*X + 1");
        assert_eq!(Poly::zero(&f3).to_string(), "0");
    }

    #[test]
    fn reduction_mod_xq_minus_x() {
        let f3 = gf(3);
        // X^3 = X, X^5 = X^3 = X, X^4 = X^2 as functions on GF(3)
        let p = Poly::from_ints(&f3, &[1, 0, 0, 1, 1, 1]);
        let r = p.reduce_mod_xq_minus_x();
        assert_eq!(r, Poly::from_ints(&f3, &[1, 2, 1]));
        for a in f3.elements() {
            assert_eq!(p.eval(a), r.eval(a));
        }
    }
}
