use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::poly::Poly;

/// Field element encoded as the integer `Σ c_i p^i`, where `c_0, …, c_{k-1}`
/// are the coordinates with respect to the power basis `1, ω, …, ω^{k-1}`.
///
/// An `Elem` carries no context; it is only meaningful together with the
/// [`Field`] that produced it.
pub type Elem = u64;

/// Largest field size for which discrete-log tables are built.
const TABLE_LIMIT: u64 = 1 << 16;

/// Bundled moduli that must be matched exactly: `X^3 - X + 1` over GF(3).
const BUNDLED_MODULI: &[(u64, usize, &[u64])] = &[(3, 3, &[1, 2, 0, 1])];

/// A finite field GF(p^k), presented as GF(p)[X]/(modulus).
///
/// Cloning is cheap. Two fields compare equal iff `(p, k, modulus)` agree.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

struct Inner {
    p: u64,
    k: usize,
    q: u64,
    /// Monic modulus over GF(p), constant term first; `None` for prime fields.
    modulus: Option<Vec<u64>>,
    tables: Option<LogTables>,
}

struct LogTables {
    /// `exp[i] = g^i` for the table generator `g`.
    exp: Vec<Elem>,
    log: Vec<u64>,
    /// Whether `g` is the class of `X`, so that `log` is the discrete log base `ω`.
    generator_is_x: bool,
}

/// JSON form of a field context: `{"p": 3, "k": 3, "modulus": [1, 2, 0, 1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "one_usize")]
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

fn one_usize() -> usize {
    1
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// The prime field GF(p).
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= 1 << 32 {
            return Err(Error::InvalidArgument(format!("characteristic {p} exceeds 32 bits")));
        }
        Ok(Field {
            inner: Arc::new(Inner { p, k: 1, q: p, modulus: None, tables: None }),
        })
    }

    /// GF(p^k) with an explicit monic irreducible modulus over GF(p), constant term first.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Field> {
        let base = Field::prime(p)?;
        if modulus.len() < 2 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus(format!("coefficients must lie in [0, {p})")));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        let k = modulus.len() - 1;
        if k == 1 {
            return Ok(base);
        }
        let poly = Poly::new(&base, modulus.to_vec());
        if !poly.is_irreducible() {
            return Err(Error::InvalidModulus("modulus is reducible".into()));
        }
        let q = p
            .checked_pow(k as u32)
            .filter(|q| *q < 1 << 62)
            .ok_or(Error::Overflow("field size"))?;
        let mut inner = Inner { p, k, q, modulus: Some(modulus.to_vec()), tables: None };
        if q <= TABLE_LIMIT {
            inner.tables = Some(LogTables::build(&inner));
        }
        Ok(Field { inner: Arc::new(inner) })
    }

    /// GF(p^k) with the default modulus: the bundled entry when there is one,
    /// otherwise the first primitive irreducible polynomial in enumeration order.
    pub fn new(p: u64, k: usize) -> Result<Field> {
        if k == 0 {
            return Err(Error::InvalidArgument("extension degree must be positive".into()));
        }
        if k == 1 {
            return Field::prime(p);
        }
        if let Some((_, _, m)) = BUNDLED_MODULI.iter().find(|(bp, bk, _)| *bp == p && *bk == k) {
            return Field::with_modulus(p, m);
        }
        let base = Field::prime(p)?;
        let modulus = crate::gf::poly::first_primitive(&base, k)?;
        let coeffs: Vec<u64> = modulus.coeffs().to_vec();
        Field::with_modulus(p, &coeffs)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Field> {
        match &spec.modulus {
            Some(m) => {
                let f = Field::with_modulus(spec.p, m)?;
                if f.degree() != spec.k {
                    return Err(Error::InvalidModulus(format!(
                        "modulus has degree {} but k = {}",
                        f.degree(),
                        spec.k
                    )));
                }
                Ok(f)
            }
            None => Field::new(spec.p, spec.k),
        }
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p(), k: self.degree(), modulus: self.inner.modulus.clone() }
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }

    /// Extension degree `k` over the prime field.
    pub fn degree(&self) -> usize {
        self.inner.k
    }

    /// Field size `q = p^k`.
    pub fn size(&self) -> u64 {
        self.inner.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.inner.k == 1
    }

    pub fn modulus(&self) -> Option<&[u64]> {
        self.inner.modulus.as_deref()
    }

    /// Prime subfield GF(p).
    pub fn prime_subfield(&self) -> Field {
        if self.is_prime_field() {
            self.clone()
        } else {
            Field::prime(self.p()).expect("characteristic is prime")
        }
    }

    pub fn zero(&self) -> Elem {
        0
    }

    pub fn one(&self) -> Elem {
        1
    }

    /// The class `ω` of `X` in GF(p)[X]/(modulus). Over a prime field the
    /// modulus is `X` itself, so `ω = 0`.
    pub fn generator(&self) -> Elem {
        if self.is_prime_field() {
            0
        } else {
            self.p()
        }
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size()
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.size()
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p() as i64) as u64
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Elem> {
        let (p, k) = (self.p(), self.degree());
        if coeffs.len() > k {
            return Err(Error::InvalidArgument(format!(
                "element has {} coordinates, field has degree {k}",
                coeffs.len()
            )));
        }
        let mut acc = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= p {
                return Err(Error::InvalidArgument(format!("coordinate {c} is not reduced mod {p}")));
            }
            acc = acc * p + c;
        }
        Ok(acc)
    }

    /// Coordinates `c_0, …, c_{k-1}` with respect to `1, ω, …, ω^{k-1}`.
    pub fn coeffs(&self, a: Elem) -> Vec<u64> {
        let p = self.p();
        let mut out = Vec::with_capacity(self.degree());
        let mut a = a;
        for _ in 0..self.degree() {
            out.push(a % p);
            a /= p;
        }
        out
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p();
        if self.is_prime_field() {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0u64, 1u64);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.p();
        if self.is_prime_field() {
            return if a == 0 { 0 } else { p - a };
        }
        let (mut a, mut out, mut place) = (a, 0u64, 1u64);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.is_prime_field() {
            return a * b % self.p();
        }
        match &self.inner.tables {
            Some(t) => {
                let n = self.size() - 1;
                t.exp[((t.log[a as usize] + t.log[b as usize]) % n) as usize]
            }
            None => mul_poly(&self.inner, a, b),
        }
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.inner.tables {
            let n = self.size() - 1;
            return Ok(t.exp[((n - t.log[a as usize]) % n) as usize]);
        }
        Ok(self.pow(a, self.size() - 2))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        rng.gen_range(0..self.size())
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        rng.gen_range(1..self.size())
    }

    /// Discrete logarithm to base `ω`, available when `ω` generates the
    /// multiplicative group and the field is small enough to tabulate.
    pub fn log_omega(&self, a: Elem) -> Option<u64> {
        match &self.inner.tables {
            Some(t) if t.generator_is_x && a != 0 => Some(t.log[a as usize]),
            _ => None,
        }
    }

    /// Whether `ω` is a primitive element (known only for tabulated fields).
    pub fn omega_is_primitive(&self) -> bool {
        matches!(&self.inner.tables, Some(t) if t.generator_is_x)
    }

    /// `ω^j`.
    pub fn omega_pow(&self, j: u64) -> Elem {
        self.pow(self.generator(), j)
    }

    /// Text form: prime-subfield elements as integers, others as `w^j` when `ω`
    /// is primitive, otherwise as a parenthesised polynomial in `w`.
    pub fn format_elem(&self, a: Elem) -> String {
        if a < self.p() {
            return a.to_string();
        }
        if let Some(j) = self.log_omega(a) {
            return if j == 1 { "w".to_string() } else { format!("w^{j}") };
        }
        let terms: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "w".to_string(),
                (1, c) => format!("{c}*w"),
                (i, 1) => format!("w^{i}"),
                (i, c) => format!("{c}*w^{i}"),
            })
            .collect();
        format!("({})", terms.join("+"))
    }
}

fn mul_poly(inner: &Inner, a: Elem, b: Elem) -> Elem {
    let (p, k) = (inner.p, inner.k);
    let modulus = inner.modulus.as_ref().expect("extension field has a modulus");
    let digits = |mut x: u64| {
        let mut d = vec![0u64; k];
        for slot in d.iter_mut() {
            *slot = x % p;
            x /= p;
        }
        d
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for i in (k..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..k {
            prod[i - k + j] = (prod[i - k + j] + (p - c) * modulus[j]) % p;
        }
    }
    prod[..k].iter().rev().fold(0, |acc, &c| acc * p + c)
}

impl LogTables {
    fn build(inner: &Inner) -> LogTables {
        let n = (inner.q - 1) as usize;
        let cycle = |g: Elem| -> Option<Vec<Elem>> {
            let mut exp = Vec::with_capacity(n);
            let mut x = 1;
            for _ in 0..n {
                exp.push(x);
                x = mul_poly(inner, x, g);
                if x == 1 && exp.len() < n {
                    return None;
                }
            }
            Some(exp)
        };
        let (exp, generator_is_x) = match cycle(inner.p) {
            Some(exp) => (exp, true),
            None => {
                let exp = (2..inner.q)
                    .filter(|&g| g != inner.p)
                    .find_map(cycle)
                    .expect("multiplicative group of a finite field is cyclic");
                (exp, false)
            }
        };
        let mut log = vec![0u64; inner.q as usize];
        for (i, &e) in exp.iter().enumerate() {
            log[e as usize] = i as u64;
        }
        LogTables { exp, log, generator_is_x }
    }
}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.inner.p, self.inner.k, &self.inner.modulus).hash(state);
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.k == other.inner.k
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner.modulus {
            None => write!(f, "GF({})", self.p()),
            Some(m) => {
                let base = self.prime_subfield();
                let poly = Poly::new(&base, m.clone());
                write!(f, "GF({}^{})[{}]", self.p(), self.degree(), poly)
            }
        }
    }
}

/// Arithmetic operation selector for [`FieldElement::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element bundled with its field, for context-checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: Elem,
}

impl FieldElement {
    pub fn new(field: &Field, value: Elem) -> Result<FieldElement> {
        if !field.contains(value) {
            return Err(Error::InvalidArgument(format!("{value} is not an element of {field}")));
        }
        Ok(FieldElement { field: field.clone(), value })
    }

    pub fn from_coeffs(field: &Field, coeffs: &[u64]) -> Result<FieldElement> {
        Ok(FieldElement { field: field.clone(), value: field.from_coeffs(coeffs)? })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u64> {
        self.field.coeffs(self.value)
    }

    pub fn apply(&self, op: FieldOp, rhs: &FieldElement) -> Result<FieldElement> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch);
        }
        let f = &self.field;
        let value = match op {
            FieldOp::Add => f.add(self.value, rhs.value),
            FieldOp::Sub => f.sub(self.value, rhs.value),
            FieldOp::Mul => f.mul(self.value, rhs.value),
            FieldOp::Div => f.div(self.value, rhs.value)?,
        };
        Ok(FieldElement { field: f.clone(), value })
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        FieldElement { field: self.field.clone(), value: self.field.pow(self.value, e) }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_elem(self.value))
    }
}
