//! Cycle-type monomials `x_1^{k_1} x_2^{k_2} …`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cycle type of a permutation: cycle length to number of cycles of that length.
///
/// Lengths with count zero are never stored. The empty monomial is the cycle
/// type of the permutation of the empty set and the unit of [`CycleType::mul`].
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<u64, u64>", into = "BTreeMap<u64, u64>")]
pub struct CycleType {
    cycles: BTreeMap<u64, u64>,
}

impl CycleType {
    pub fn empty() -> CycleType {
        CycleType::default()
    }

    /// `x_len^count`.
    pub fn power(len: u64, count: u64) -> CycleType {
        assert!(len >= 1, "cycle lengths are positive");
        let mut cycles = BTreeMap::new();
        if count > 0 {
            cycles.insert(len, count);
        }
        CycleType { cycles }
    }

    /// A single cycle `x_len`.
    pub fn cycle(len: u64) -> CycleType {
        CycleType::power(len, 1)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<CycleType> {
        let mut ct = CycleType::empty();
        for (len, count) in pairs {
            if len == 0 {
                return Err(Error::InvalidArgument("cycle length 0".into()));
            }
            ct.add_cycles(len, count)?;
        }
        Ok(ct)
    }

    /// Cycle type of the permutation `i ↦ images[i]` of `{0, …, n-1}`.
    pub fn from_permutation(images: &[usize]) -> Result<CycleType> {
        let n = images.len();
        let mut seen = vec![false; n];
        if images.iter().any(|&y| y >= n || std::mem::replace(&mut seen[y], true)) {
            return Err(Error::NotBijection);
        }
        let mut visited = vec![false; n];
        let mut ct = CycleType::empty();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !visited[x] {
                visited[x] = true;
                x = images[x];
                len += 1;
            }
            ct.add_cycles(len, 1)?;
        }
        Ok(ct)
    }

    fn add_cycles(&mut self, len: u64, count: u64) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let slot = self.cycles.entry(len).or_insert(0);
        *slot = slot.checked_add(count).ok_or(Error::Overflow("cycle count"))?;
        Ok(())
    }

    pub fn count(&self, len: u64) -> u64 {
        self.cycles.get(&len).copied().unwrap_or(0)
    }

    /// `(length, count)` pairs in increasing length.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.cycles.iter().map(|(&l, &k)| (l, k))
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Number of permuted points, `Σ ℓ·k_ℓ`.
    pub fn try_degree(&self) -> Result<u64> {
        self.iter().try_fold(0u64, |acc, (l, k)| {
            l.checked_mul(k).and_then(|x| acc.checked_add(x)).ok_or(Error::Overflow("degree"))
        })
    }

    pub fn degree(&self) -> u64 {
        self.try_degree().expect("degree overflow")
    }

    /// Total number of cycles.
    pub fn cycle_count(&self) -> u64 {
        self.cycles.values().sum()
    }

    /// Number of fixed points.
    pub fn fixed_points(&self) -> u64 {
        self.count(1)
    }

    /// Disjoint union of supports: counts add per length.
    pub fn try_mul(&self, other: &CycleType) -> Result<CycleType> {
        let mut out = self.clone();
        for (l, k) in other.iter() {
            out.add_cycles(l, k)?;
        }
        Ok(out)
    }

    pub fn try_pow(&self, e: u64) -> Result<CycleType> {
        let mut out = CycleType::empty();
        for (l, k) in self.iter() {
            out.add_cycles(l, k.checked_mul(e).ok_or(Error::Overflow("cycle count"))?)?;
        }
        Ok(out)
    }

    /// `BU_ℓ`: substitutes `x_n ↦ x_{ℓn}`.
    pub fn try_blow_up(&self, l: u64) -> Result<CycleType> {
        if l == 0 {
            return Err(Error::InvalidArgument("blow-up factor must be positive".into()));
        }
        let mut out = CycleType::empty();
        for (n, k) in self.iter() {
            out.add_cycles(n.checked_mul(l).ok_or(Error::Overflow("cycle length"))?, k)?;
        }
        Ok(out)
    }

    pub fn blow_up(&self, l: u64) -> CycleType {
        self.try_blow_up(l).expect("blow-up overflow")
    }

    /// Cycle type of the product action on `Ω₁ × Ω₂`:
    /// `x_m ⋇ x_n = gcd(m, n)·x_{lcm(m, n)}`, extended bilinearly.
    pub fn try_weixu(&self, other: &CycleType) -> Result<CycleType> {
        let mut out = CycleType::empty();
        for (m, a) in self.iter() {
            for (n, b) in other.iter() {
                let g = gcd(m, n);
                let lcm = (m / g).checked_mul(n).ok_or(Error::Overflow("cycle length"))?;
                let count = a
                    .checked_mul(b)
                    .and_then(|x| x.checked_mul(g))
                    .ok_or(Error::Overflow("cycle count"))?;
                out.add_cycles(lcm, count)?;
            }
        }
        Ok(out)
    }

    pub fn weixu(&self, other: &CycleType) -> CycleType {
        self.try_weixu(other).expect("cycle type overflow")
    }

    /// `⋇` over a sequence; the empty product is `x_1`.
    pub fn weixu_all<'a>(items: impl IntoIterator<Item = &'a CycleType>) -> Result<CycleType> {
        items.into_iter().try_fold(CycleType::cycle(1), |acc, ct| acc.try_weixu(ct))
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Mul for &CycleType {
    type Output = CycleType;
    fn mul(self, rhs: &CycleType) -> CycleType {
        self.try_mul(rhs).expect("cycle count overflow")
    }
}

impl Mul for CycleType {
    type Output = CycleType;
    fn mul(self, rhs: CycleType) -> CycleType {
        &self * &rhs
    }
}

impl TryFrom<BTreeMap<u64, u64>> for CycleType {
    type Error = Error;
    fn try_from(map: BTreeMap<u64, u64>) -> Result<CycleType> {
        if map.iter().any(|(&l, &k)| l == 0 || k == 0) {
            return Err(Error::Parse("cycle lengths and counts must be positive".into()));
        }
        Ok(CycleType { cycles: map })
    }
}

impl From<CycleType> for BTreeMap<u64, u64> {
    fn from(ct: CycleType) -> Self {
        ct.cycles
    }
}

/// Canonical text: `x1^3 x3^8`, lengths ascending, exponent 1 omitted; `1` when empty.
impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(l, k)| if k == 1 { format!("x{l}") } else { format!("x{l}^{k}") })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CycleType {
    type Err = Error;

    fn from_str(s: &str) -> Result<CycleType> {
        let s = s.trim();
        if s == "1" {
            return Ok(CycleType::empty());
        }
        let bad = |tok: &str| Error::Parse(format!("malformed cycle-type term {tok:?}"));
        let mut out = CycleType::empty();
        let mut last = 0u64;
        for tok in s.split_whitespace() {
            let body = tok.strip_prefix('x').ok_or_else(|| bad(tok))?;
            let (len, count) = match body.split_once('^') {
                Some((l, k)) => (l, k),
                None => (body, "1"),
            };
            let num = |t: &str| -> Result<u64> {
                if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad(tok));
                }
                t.parse::<u64>().map_err(|_| bad(tok))
            };
            let (len, count) = (num(len)?, num(count)?);
            if len == 0 || count == 0 {
                return Err(bad(tok));
            }
            if len <= last {
                return Err(Error::Parse(format!(
                    "cycle lengths must be strictly increasing at {tok:?}"
                )));
            }
            last = len;
            out.cycles.insert(len, count);
        }
        if out.is_empty() {
            return Err(Error::Parse("empty cycle type".into()));
        }
        Ok(out)
    }
}
