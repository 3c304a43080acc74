//! Brute-force ground truth for maps on small finite domains.
//!
//! Points are indices `0..n`. Vectors of GF(p)^m are indexed with the first
//! coordinate most significant; elements of GF(q) by their own encoding. In
//! both cases the group addition is digit-wise addition mod `p` in base `p`.

use serde::{Deserialize, Serialize};

use crate::cycletype::CycleType;
use crate::error::{Error, Result};
use crate::gf::{Elem, Field, Poly};
use crate::linalg::Vector;

/// Largest domain the oracle will walk.
pub const MAX_DOMAIN: u64 = 1_000_000;

/// A map of `{0, …, n-1}` given by its value table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapTable {
    n: usize,
    images: Vec<usize>,
}

impl MapTable {
    pub fn new(images: Vec<usize>) -> Result<MapTable> {
        let n = images.len();
        check_domain(n as u64)?;
        if let Some(&bad) = images.iter().find(|&&y| y >= n) {
            return Err(Error::InvalidArgument(format!("image {bad} outside 0..{n}")));
        }
        Ok(MapTable { n, images })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> usize) -> Result<MapTable> {
        check_domain(n as u64)?;
        MapTable::new((0..n).map(f).collect())
    }

    /// `{"n": 3, "images": [1, 2, 0]}`.
    pub fn from_json(text: &str) -> Result<MapTable> {
        let raw: MapTable = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.images.len() != raw.n {
            return Err(Error::Parse(format!(
                "\"n\" is {} but {} images were given",
                raw.n,
                raw.images.len()
            )));
        }
        MapTable::new(raw.images)
    }

    /// Lines `x,y` meaning `x ↦ y`; every `x` in `0..n` exactly once.
    pub fn from_csv(text: &str) -> Result<MapTable> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {}: bad index {s:?}", lineno + 1)))
            };
            let (x, y) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected x,y", lineno + 1)))?;
            pairs.push((parse(x)?, parse(y)?));
        }
        let n = pairs.len();
        check_domain(n as u64)?;
        let mut images = vec![usize::MAX; n];
        for (x, y) in pairs {
            if x >= n || images[x] != usize::MAX {
                return Err(Error::Parse(format!("source index {x} repeated or out of range")));
            }
            images[x] = y;
        }
        MapTable::new(images)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn get(&self, x: usize) -> usize {
        self.images[x]
    }
}

fn check_domain(n: u64) -> Result<()> {
    if n > MAX_DOMAIN {
        Err(Error::DomainTooLarge(n))
    } else {
        Ok(())
    }
}

/// Addition on point indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Addition {
    /// Digit-wise addition mod `p` of base-`p` digits (GF(p)^m and GF(p^k)).
    Digitwise { p: u64 },
    /// Addition mod `n` (the cyclic group).
    Cyclic,
}

impl Addition {
    fn apply(self, a: usize, b: usize, n: usize, negate_b: bool) -> usize {
        match self {
            Addition::Cyclic => {
                if negate_b {
                    (a + n - b) % n
                } else {
                    (a + b) % n
                }
            }
            Addition::Digitwise { p } => {
                let p = p as usize;
                let (mut a, mut b) = (a, b);
                let (mut out, mut place) = (0usize, 1usize);
                while a > 0 || b > 0 {
                    let (x, y) = (a % p, b % p);
                    let digit = if negate_b { (x + p - y) % p } else { (x + y) % p };
                    out += digit * place;
                    place *= p;
                    a /= p;
                    b /= p;
                }
                out
            }
        }
    }

    pub fn add(self, a: usize, b: usize, n: usize) -> usize {
        self.apply(a, b, n, false)
    }

    pub fn sub(self, a: usize, b: usize, n: usize) -> usize {
        self.apply(a, b, n, true)
    }
}

/// What the oracle found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub is_bijection: bool,
    /// `f` and `x ↦ f(x) + x` are both bijections.
    pub is_complete: bool,
    /// `f` and `x ↦ f(x) - x` are both bijections.
    pub is_orthomorphism: bool,
    /// Present when `f` is a bijection.
    pub cycle_type: Option<CycleType>,
    pub fixed_points: usize,
}

fn is_bijective(values: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for y in values {
        if y >= n || std::mem::replace(&mut seen[y], true) {
            return false;
        }
    }
    true
}

pub fn analyze(table: &MapTable, addition: Addition) -> Result<Report> {
    let n = table.len();
    if let Addition::Digitwise { p } = addition {
        let mut m = 1u64;
        while m < n as u64 {
            m *= p;
        }
        if m != n as u64 {
            return Err(Error::InvalidArgument(format!("domain size {n} is not a power of {p}")));
        }
    }
    let f = table.images();
    let is_bijection = is_bijective(f.iter().copied(), n);
    let plus = is_bijective((0..n).map(|x| addition.add(f[x], x, n)), n);
    let minus = is_bijective((0..n).map(|x| addition.sub(f[x], x, n)), n);
    let cycle_type = if is_bijection { Some(CycleType::from_permutation(f)?) } else { None };
    Ok(Report {
        is_bijection,
        is_complete: is_bijection && plus,
        is_orthomorphism: is_bijection && minus,
        cycle_type,
        fixed_points: (0..n).filter(|&x| f[x] == x).count(),
    })
}

/// Index of a vector over GF(p), first coordinate most significant.
pub fn vector_to_index(v: &Vector) -> usize {
    let p = v.field().size() as usize;
    v.data().iter().fold(0, |acc, &a| acc * p + a as usize)
}

pub fn index_to_vector(field: &Field, len: usize, mut index: usize) -> Vector {
    let p = field.size() as usize;
    let mut data = vec![0; len];
    for slot in data.iter_mut().rev() {
        *slot = (index % p) as Elem;
        index /= p;
    }
    Vector::new(field, data)
}

/// Value table of a map of GF(p)^len.
pub fn tabulate_vectors(field: &Field, len: usize, f: impl Fn(&Vector) -> Vector) -> Result<MapTable> {
    let n = u32::try_from(len)
        .ok()
        .and_then(|l| field.size().checked_pow(l))
        .ok_or(Error::DomainTooLarge(u64::MAX))?;
    check_domain(n)?;
    MapTable::from_fn(n as usize, |i| vector_to_index(&f(&index_to_vector(field, len, i))))
}

/// Value table of a map of GF(q), indexed by element encoding.
pub fn tabulate_field(field: &Field, f: impl Fn(Elem) -> Elem) -> Result<MapTable> {
    check_domain(field.size())?;
    MapTable::from_fn(field.size() as usize, |a| f(a as Elem) as usize)
}

/// Values of `poly` at every element of its field, in encoding order.
pub fn evaluate(poly: &Poly) -> Result<Vec<Elem>> {
    let field = poly.field();
    check_domain(field.size())?;
    Ok(field.elements().map(|a| poly.eval(a)).collect())
}

/// The reduced polynomial (degree < q) with `P(a) = values[a]` for every element `a`.
pub fn interpolate(field: &Field, values: &[Elem]) -> Result<Poly> {
    let q = field.size();
    check_domain(q)?;
    if values.len() as u64 != q {
        return Err(Error::DimensionMismatch(format!("expected {q} values, got {}", values.len())));
    }
    if let Some(&bad) = values.iter().find(|&&v| !field.contains(v)) {
        return Err(Error::InvalidArgument(format!("value {bad} outside {field}")));
    }
    // (x - a)^{q-1} = Σ_j a^{q-1-j} x^j, so
    // P = Σ_a f(a)·(1 - (x - a)^{q-1}) has coefficient [j = 0]·Σ f(a) - Σ_a f(a)·a^{q-1-j}.
    let q = q as usize;
    let mut coeffs = vec![0; q];
    for a in field.elements() {
        let fa = values[a as usize];
        if fa == 0 {
            continue;
        }
        coeffs[0] = field.add(coeffs[0], fa);
        // a^{q-1-j} for j = q-1 down to 0
        let mut power = field.one();
        for j in (0..q).rev() {
            coeffs[j] = field.sub(coeffs[j], field.mul(fa, power));
            power = field.mul(power, a);
        }
    }
    Ok(Poly::new(field, coeffs))
}
