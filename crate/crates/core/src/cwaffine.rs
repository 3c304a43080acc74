//! Coset-wise affine maps of `V = GF(p)^{d+t} = W ⊕ U`, where `W` is spanned
//! by the first `d` coordinates and `U` by the last `t`.
//!
//! On the coset `W + u` the map is `w + u ↦ (w·α_u + ω_u) + (u + ν_u)`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::affine_ct::{affine_cycle_type, agl_witnesses};
use crate::cgl::realize_gamma;
use crate::cycletype::CycleType;
use crate::error::{Error, Result};
use crate::gf::{Elem, Field, Poly};
use crate::linalg::{matrix_from_json, matrix_to_json, vector_from_json, vector_to_json};
use crate::linalg::{AffineMap, Matrix, Vector};
use crate::oracle::{analyze, index_to_vector, tabulate_field, vector_to_index, Addition, MapTable};

/// `V = GF(p)^{d+t}` split as `W ⊕ U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Splitting {
    pub p: u64,
    pub d: usize,
    pub t: usize,
}

impl Splitting {
    pub fn n(&self) -> usize {
        self.d + self.t
    }

    /// Number of cosets of `W`, `p^t`.
    pub fn cosets(&self) -> usize {
        (self.p as usize).pow(self.t as u32)
    }
}

/// The affine data on one coset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetData {
    pub alpha: Matrix,
    pub omega: Vector,
    pub nu: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetWiseAffineMap {
    field: Field,
    split: Splitting,
    /// Indexed by the coset label `u` (first coordinate most significant).
    cosets: Vec<CosetData>,
}

impl CosetWiseAffineMap {
    pub fn new(p: u64, d: usize, t: usize, cosets: Vec<CosetData>) -> Result<CosetWiseAffineMap> {
        let field = Field::prime(p)?;
        if d == 0 {
            return Err(Error::InvalidArgument("W must have positive dimension".into()));
        }
        let split = Splitting { p, d, t };
        let count = u32::try_from(t)
            .ok()
            .and_then(|t| (p as usize).checked_pow(t))
            .ok_or(Error::Overflow("coset count"))?;
        if cosets.len() != count {
            return Err(Error::DimensionMismatch(format!(
                "expected {count} cosets, got {}",
                cosets.len()
            )));
        }
        for c in &cosets {
            if c.alpha.rows() != d || c.alpha.cols() != d || c.omega.len() != d || c.nu.len() != t {
                return Err(Error::DimensionMismatch("coset data has the wrong shape".into()));
            }
            if c.alpha.field() != &field || c.omega.field() != &field || c.nu.field() != &field {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(CosetWiseAffineMap { field, split, cosets })
    }

    /// Builds the map from its data on each coset label `u`.
    pub fn from_fn(p: u64, d: usize, t: usize, f: impl Fn(&Vector) -> CosetData) -> Result<CosetWiseAffineMap> {
        let field = Field::prime(p)?;
        let count = Splitting { p, d, t }.cosets();
        let cosets = (0..count).map(|i| f(&index_to_vector(&field, t, i))).collect();
        CosetWiseAffineMap::new(p, d, t, cosets)
    }

    pub fn identity(p: u64, d: usize, t: usize) -> Result<CosetWiseAffineMap> {
        let field = Field::prime(p)?;
        CosetWiseAffineMap::from_fn(p, d, t, |_| CosetData {
            alpha: Matrix::identity(&field, d),
            omega: Vector::zeros(&field, d),
            nu: Vector::zeros(&field, t),
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn splitting(&self) -> Splitting {
        self.split
    }

    pub fn cosets(&self) -> &[CosetData] {
        &self.cosets
    }

    pub fn coset(&self, u: &Vector) -> &CosetData {
        &self.cosets[vector_to_index(u)]
    }

    fn label(&self, index: usize) -> Vector {
        index_to_vector(&self.field, self.split.t, index)
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        let (d, n) = (self.split.d, self.split.n());
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!("expected a vector of length {n}")));
        }
        let (w, u) = (x.slice(0, d), x.slice(d, n));
        let c = self.coset(&u);
        Ok(w.mul_matrix(&c.alpha).add(&c.omega).concat(&u.add(&c.nu)))
    }

    /// The induced map on coset labels, `u ↦ u + ν_u`, as an index table.
    pub fn top_map(&self) -> Vec<usize> {
        (0..self.cosets.len())
            .map(|i| vector_to_index(&self.label(i).add(&self.cosets[i].nu)))
            .collect()
    }

    /// Every `α_u` invertible and the top map bijective.
    pub fn is_permutation(&self) -> bool {
        self.cosets.iter().all(|c| c.alpha.is_invertible()) && is_bijective(&self.top_map())
    }

    /// Every `α_u` without eigenvalue `-1` and the top map a complete mapping of `U`.
    pub fn is_complete(&self) -> bool {
        let n = self.cosets.len();
        let top = self.top_map();
        let plus: Vec<usize> = (0..n)
            .map(|i| vector_to_index(&self.label(top[i]).add(&self.label(i))))
            .collect();
        self.cosets.iter().all(|c| crate::cgl::is_cgl(&c.alpha)) && is_bijective(&top) && is_bijective(&plus)
    }

    pub fn to_wreath(&self) -> Result<WreathElement> {
        if !self.is_permutation() {
            return Err(Error::NotBijection);
        }
        let top = self.top_map();
        let mut bottom = vec![AffineMap::identity(&self.field, self.split.d); top.len()];
        for (i, c) in self.cosets.iter().enumerate() {
            bottom[top[i]] = AffineMap::new(c.alpha.clone(), c.omega.clone())?;
        }
        WreathElement::new(self.split, top, bottom)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &CosetWiseAffineMap) -> Result<CosetWiseAffineMap> {
        if self.split != next.split {
            return Err(Error::DimensionMismatch("different splittings".into()));
        }
        Ok(self.to_wreath()?.mul(&next.to_wreath()?).to_cw())
    }

    /// Cycles of the top map, each starting at its least label, ordered by that label.
    pub fn top_cycles(&self) -> Result<Vec<Vec<usize>>> {
        let top = self.top_map();
        if !is_bijective(&top) {
            return Err(Error::NotBijection);
        }
        Ok(cycles_by_least(&top))
    }

    /// `λ(α_{u_0}, ω_{u_0}) ⋯ λ(α_{u_{ℓ-1}}, ω_{u_{ℓ-1}})` along a top cycle `(u_0, …, u_{ℓ-1})`.
    pub fn forward_cycle_product(&self, cycle: &[usize]) -> Result<AffineMap> {
        let mut acc = AffineMap::identity(&self.field, self.split.d);
        for &u in cycle {
            let c = &self.cosets[u];
            acc = acc.then(&AffineMap::new(c.alpha.clone(), c.omega.clone())?);
        }
        Ok(acc)
    }

    /// `∏_ζ BU_{ℓ(ζ)}(CT(forward cycle product along ζ))`.
    pub fn cycle_type(&self) -> Result<CycleType> {
        if !self.is_permutation() {
            return Err(Error::NotBijection);
        }
        let mut out = CycleType::empty();
        for cycle in self.top_cycles()? {
            let ct = affine_cycle_type(&self.forward_cycle_product(&cycle)?)?;
            out = out.try_mul(&ct.try_blow_up(cycle.len() as u64)?)?;
        }
        Ok(out)
    }

    pub fn tabulate(&self) -> Result<MapTable> {
        crate::oracle::tabulate_vectors(&self.field, self.split.n(), |x| {
            self.eval(x).expect("length matches")
        })
    }

    pub fn to_json(&self) -> Value {
        let cosets: Vec<Value> = self
            .cosets
            .iter()
            .enumerate()
            .map(|(i, c)| {
                json!({
                    "u": vector_to_json(&self.label(i)),
                    "alpha": matrix_to_json(&c.alpha),
                    "omega": vector_to_json(&c.omega),
                    "nu": vector_to_json(&c.nu),
                })
            })
            .collect();
        json!({ "p": self.split.p, "d": self.split.d, "t": self.split.t, "cosets": cosets })
    }

    pub fn from_json(value: &Value) -> Result<CosetWiseAffineMap> {
        let int = |key: &str| {
            value
                .get(key)
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse(format!("missing integer {key:?}")))
        };
        let (p, d, t) = (int("p")?, int("d")? as usize, int("t")? as usize);
        let field = Field::prime(p)?;
        let items = value
            .get("cosets")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"cosets\" array".into()))?;
        let count = Splitting { p, d, t }.cosets();
        let mut slots: Vec<Option<CosetData>> = vec![None; count];
        for item in items {
            let get = |key: &str| item.get(key).ok_or_else(|| Error::Parse(format!("coset needs {key:?}")));
            let u = vector_from_json(&field, get("u")?)?;
            if u.len() != t {
                return Err(Error::Parse("coset label has the wrong length".into()));
            }
            let data = CosetData {
                alpha: matrix_from_json(&field, get("alpha")?)?,
                omega: vector_from_json(&field, get("omega")?)?,
                nu: vector_from_json(&field, get("nu")?)?,
            };
            let slot = &mut slots[vector_to_index(&u)];
            if slot.replace(data).is_some() {
                return Err(Error::Parse(format!("coset {u:?} given twice")));
            }
        }
        let cosets = slots
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Parse("every coset label must be given".into()))?;
        CosetWiseAffineMap::new(p, d, t, cosets)
    }
}

fn is_bijective(images: &[usize]) -> bool {
    let mut seen = vec![false; images.len()];
    images.iter().all(|&y| y < seen.len() && !std::mem::replace(&mut seen[y], true))
}

/// Cycles of a permutation, each starting at its least point, ordered by that point.
pub fn cycles_by_least(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = perm[x];
        }
        out.push(cycle);
    }
    out
}

/// Element `(σ, (g_λ)_λ)` of `Aff(W) ≀ Sym(U)` acting by `(w, λ) ↦ (g_{σ(λ)}(w), σ(λ))`.
///
/// The bottom family is indexed by target label, so the coset map on `W + u`
/// is stored at `σ(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathElement {
    split: Splitting,
    top: Vec<usize>,
    bottom: Vec<AffineMap>,
}

impl WreathElement {
    pub fn new(split: Splitting, top: Vec<usize>, bottom: Vec<AffineMap>) -> Result<WreathElement> {
        if top.len() != split.cosets() || bottom.len() != top.len() {
            return Err(Error::DimensionMismatch("wreath element has the wrong size".into()));
        }
        if !is_bijective(&top) {
            return Err(Error::NotBijection);
        }
        if bottom.iter().any(|g| g.dim() != split.d) {
            return Err(Error::DimensionMismatch("bottom maps must act on W".into()));
        }
        Ok(WreathElement { split, top, bottom })
    }

    pub fn top(&self) -> &[usize] {
        &self.top
    }

    pub fn bottom(&self) -> &[AffineMap] {
        &self.bottom
    }

    pub fn act(&self, w: &Vector, u: usize) -> (Vector, usize) {
        let target = self.top[u];
        (self.bottom[target].apply(w), target)
    }

    /// `(σ, g)·(ψ, h) = (σψ, (g_{ψ⁻¹(λ)} h_λ)_λ)`, with `σψ` meaning `σ` first.
    pub fn mul(&self, other: &WreathElement) -> WreathElement {
        let n = self.top.len();
        let mut psi_inv = vec![0; n];
        for (i, &j) in other.top.iter().enumerate() {
            psi_inv[j] = i;
        }
        WreathElement {
            split: self.split,
            top: (0..n).map(|i| other.top[self.top[i]]).collect(),
            bottom: (0..n).map(|l| self.bottom[psi_inv[l]].then(&other.bottom[l])).collect(),
        }
    }

    pub fn to_cw(&self) -> CosetWiseAffineMap {
        let field = Field::prime(self.split.p).expect("prime");
        let t = self.split.t;
        let cosets = (0..self.top.len())
            .map(|i| {
                let g = &self.bottom[self.top[i]];
                let nu = index_to_vector(&field, t, self.top[i]).sub(&index_to_vector(&field, t, i));
                CosetData { alpha: g.matrix().clone(), omega: g.shift().clone(), nu }
            })
            .collect();
        CosetWiseAffineMap { field, split: self.split, cosets }
    }
}

/// A coset-wise affine map read in another basis: `F(x) = f(x·B⁻¹)·B`.
///
/// `F` is coset-wise affine with respect to the span of the first `d` rows of
/// `B`, with the same cycle type and completeness as `f`.
#[derive(Clone, Debug)]
pub struct ConjugatedMap {
    map: CosetWiseAffineMap,
    basis: Matrix,
    inverse: Matrix,
}

impl ConjugatedMap {
    pub fn new(map: CosetWiseAffineMap, basis: Matrix) -> Result<ConjugatedMap> {
        if basis.rows() != map.split.n() || basis.field() != map.field() {
            return Err(Error::DimensionMismatch("basis must be an n × n matrix over GF(p)".into()));
        }
        let inverse = basis.inverse()?;
        Ok(ConjugatedMap { map, basis, inverse })
    }

    pub fn map(&self) -> &CosetWiseAffineMap {
        &self.map
    }

    /// Basis of the subspace whose cosets the map respects.
    pub fn subspace(&self) -> Vec<Vector> {
        (0..self.map.split.d).map(|i| self.basis.row(i)).collect()
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        Ok(self.map.eval(&x.mul_matrix(&self.inverse))?.mul_matrix(&self.basis))
    }

    pub fn tabulate(&self) -> Result<MapTable> {
        crate::oracle::tabulate_vectors(self.map.field(), self.map.split.n(), |x| {
            self.eval(x).expect("length matches")
        })
    }
}

/// Whether the constructor must produce a complete mapping or only a permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructMode {
    /// `g` complete, each `γ_{ℓ,i} ∈ Γ(d, p, ℓ)`, every `α_u` complete.
    Complete,
    /// `g` any permutation, each `γ_{ℓ,i} ∈ CT(AGL_d(p))`.
    Permutation,
}

/// `γ_{ℓ,i}` keyed by `(ℓ, i)`, `i` counted from 1 within each cycle length.
pub type GammaChoice = BTreeMap<(u64, usize), CycleType>;

/// Lifts the permutation `g` of `U = GF(p)^t` (an index table) to a coset-wise
/// affine map of `GF(p)^{d+t}` of cycle type `∏_{ℓ,i} BU_ℓ(γ_{ℓ,i})`.
///
/// The cycles of `g` are taken in order of their least label, each starting
/// there; the `i`-th cycle of length `ℓ` in that order receives `γ_{ℓ,i}`.
pub fn construct_main(
    p: u64,
    d: usize,
    t: usize,
    g: &[usize],
    gammas: &GammaChoice,
    seed: u64,
    mode: ConstructMode,
) -> Result<CosetWiseAffineMap> {
    let field = Field::prime(p)?;
    let split = Splitting { p, d, t };
    if g.len() != split.cosets() {
        return Err(Error::DimensionMismatch(format!(
            "g must permute {} labels, got {}",
            split.cosets(),
            g.len()
        )));
    }
    let table = MapTable::new(g.to_vec())?;
    let report = analyze(&table, Addition::Digitwise { p })?;
    if !report.is_bijection {
        return Err(Error::NotBijection);
    }
    if mode == ConstructMode::Complete && !report.is_complete {
        return Err(Error::NotComplete);
    }
    let agl = match mode {
        ConstructMode::Permutation => Some(agl_witnesses(d, p)?),
        ConstructMode::Complete => None,
    };
    let mut cosets: Vec<Option<CosetData>> = vec![None; g.len()];
    let mut seen_per_length: BTreeMap<u64, usize> = BTreeMap::new();
    for (ci, cycle) in cycles_by_least(g).into_iter().enumerate() {
        let l = cycle.len() as u64;
        let i = {
            let n = seen_per_length.entry(l).or_insert(0);
            *n += 1;
            *n
        };
        let gamma = gammas
            .get(&(l, i))
            .ok_or_else(|| Error::InvalidArgument(format!("no γ given for cycle ({l}, {i})")))?;
        let (factors, w) = match &agl {
            None => realize_gamma(gamma, d, p, l, seed.wrapping_add(ci as u64))?,
            Some(witnesses) => {
                let (m, w) = witnesses.get(gamma).ok_or_else(|| {
                    Error::Infeasible(format!("{gamma} is not the cycle type of an affine map of GF({p})^{d}"))
                })?;
                let mut factors = vec![m.clone()];
                factors.resize(cycle.len(), Matrix::identity(&field, d));
                (factors, w.clone())
            }
        };
        for (j, &u) in cycle.iter().enumerate() {
            let next = cycle[(j + 1) % cycle.len()];
            let omega = if j + 1 == cycle.len() { w.clone() } else { Vector::zeros(&field, d) };
            let nu = index_to_vector(&field, t, next).sub(&index_to_vector(&field, t, u));
            cosets[u] = Some(CosetData { alpha: factors[j].clone(), omega, nu });
        }
    }
    let cosets = cosets.into_iter().map(|c| c.expect("every label lies on a cycle")).collect();
    CosetWiseAffineMap::new(p, d, t, cosets)
}

/// Exponents `(a_0, …, a_k)` of `x_1^{a_0} x_p^{a_1} ⋯ x_{p^k}^{a_k}`.
fn sylow_exponents(target: &CycleType, p: u64, k: usize) -> Result<Vec<u64>> {
    let mut a = vec![0u64; k + 1];
    for (len, count) in target.iter() {
        let i = (0..=k).find(|&i| p.pow(i as u32) == len).ok_or_else(|| {
            Error::InvalidArgument(format!("cycle length {len} is not a power of {p} up to {p}^{k}"))
        })?;
        a[i] = count;
    }
    if target.try_degree()? != p.pow(k as u32) {
        return Err(Error::InvalidArgument(format!("{target} does not have degree {p}^{k}")));
    }
    Ok(a)
}

/// Cycle types of the elements of a Sylow `p`-subgroup of `Sym(p^k)`.
pub fn sylow_cycle_types(p: u64, k: usize) -> Vec<CycleType> {
    let mut level: Vec<Vec<u64>> = vec![vec![1]];
    for _ in 0..k {
        let mut next = Vec::new();
        for b in &level {
            for a1 in 0..=b[0] {
                let mut a = vec![p * (b[0] - a1), a1];
                a.extend_from_slice(&b[1..]);
                next.push(a);
            }
        }
        level = next;
    }
    let mut out: Vec<CycleType> = level
        .iter()
        .map(|a| {
            CycleType::from_pairs(a.iter().enumerate().map(|(i, &n)| (p.pow(i as u32), n)))
                .expect("positive lengths")
        })
        .collect();
    out.sort();
    out
}

/// A complete mapping of `GF(p)^k` (`p` odd) whose cycle type is the given
/// Sylow-`p` type, built by descending on `k`.
pub fn construct_sylow_type(p: u64, k: usize, target: &CycleType) -> Result<CosetWiseAffineMap> {
    let field = Field::prime(p)?;
    if p == 2 {
        return Err(Error::Infeasible("complete mappings in characteristic 2 have a fixed point".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let a = sylow_exponents(target, p, k)?;
    if a[0] % p != 0 {
        return Err(Error::InvalidArgument(format!("{target} is not a Sylow-{p} cycle type")));
    }
    if k == 1 {
        let shift = if a[1] == 1 { 1 } else { 0 };
        return CosetWiseAffineMap::new(
            p,
            1,
            0,
            vec![CosetData {
                alpha: Matrix::identity(&field, 1),
                omega: Vector::new(&field, vec![shift]),
                nu: Vector::zeros(&field, 0),
            }],
        );
    }
    let mut reduced = vec![(1u64, a[0] / p + a[1])];
    reduced.extend((2..=k).map(|i| (p.pow(i as u32 - 1), a[i])));
    let reduced = CycleType::from_pairs(reduced)?;
    let inner = construct_sylow_type(p, k - 1, &reduced)?;
    let g = inner.tabulate()?.images().to_vec();
    let fixed_with_x1p = a[0] / p;
    let mut gammas = GammaChoice::new();
    let mut per_length: BTreeMap<u64, usize> = BTreeMap::new();
    for cycle in cycles_by_least(&g) {
        let l = cycle.len() as u64;
        let n = per_length.entry(l).or_insert(0);
        *n += 1;
        let gamma = if l == 1 && (*n as u64) <= fixed_with_x1p {
            CycleType::power(1, p)
        } else {
            CycleType::cycle(p)
        };
        gammas.insert((l, *n), gamma);
    }
    construct_main(p, 1, k - 1, &g, &gammas, 0, ConstructMode::Complete)
}

/// `h_k` on coordinates `(x_1, …, x_k)`: adds 1 to `x_ℓ, …, x_k`, where `ℓ`
/// is the last index `> 1` with `x_ℓ ≠ 0`, or `ℓ = 1` if there is none.
pub fn one_cycle_step(p: u64, x: &[Elem]) -> Vec<Elem> {
    let l = (1..x.len()).rev().find(|&i| x[i] != 0).unwrap_or(0);
    x.iter().enumerate().map(|(i, &c)| if i >= l { (c + 1) % p } else { c }).collect()
}

/// `h_k` as a coset-wise affine map with `W = ⟨x_1⟩` and `U = ⟨x_2, …, x_k⟩`.
pub fn one_cycle_map(p: u64, k: usize) -> Result<CosetWiseAffineMap> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let field = Field::prime(p)?;
    CosetWiseAffineMap::from_fn(p, 1, k - 1, |u| {
        let image = if u.is_empty() { Vec::new() } else { one_cycle_step(p, u.data()) };
        CosetData {
            alpha: Matrix::identity(&field, 1),
            omega: Vector::new(&field, vec![u64::from(u.is_zero())]),
            nu: Vector::new(&field, image).sub(u),
        }
    })
}

/// `h_k` built by lifting `h_{k-1}`: `w + u ↦ (w + [u = 0]) + h_{k-1}(u)`.
pub fn one_cycle_map_recursive(p: u64, k: usize) -> Result<CosetWiseAffineMap> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let field = Field::prime(p)?;
    let one = Vector::new(&field, vec![1]);
    if k == 1 {
        return CosetWiseAffineMap::new(
            p,
            1,
            0,
            vec![CosetData { alpha: Matrix::identity(&field, 1), omega: one, nu: Vector::zeros(&field, 0) }],
        );
    }
    let inner = one_cycle_map_recursive(p, k - 1)?;
    CosetWiseAffineMap::from_fn(p, 1, k - 1, |u| CosetData {
        alpha: Matrix::identity(&field, 1),
        omega: if u.is_zero() { one.clone() } else { Vector::zeros(&field, 1) },
        nu: inner.eval(u).expect("length k - 1").sub(u),
    })
}

/// Coordinates `(c_0, …, c_{k-1})` of `a = Σ c_i ω^i` as a vector over GF(p).
pub fn field_to_vector(field: &Field, a: Elem) -> Vector {
    Vector::new(&field.prime_subfield(), field.coeffs(a))
}

pub fn vector_to_field(field: &Field, v: &Vector) -> Result<Elem> {
    if v.len() != field.degree() {
        return Err(Error::DimensionMismatch(format!("expected {} coordinates", field.degree())));
    }
    field.from_coeffs(v.data())
}

/// Reads a map of GF(p)^k as a map of GF(p^k) through the `ω`-power basis.
pub fn transport_to_field(field: &Field, f: impl Fn(&Vector) -> Vector) -> Result<MapTable> {
    tabulate_field(field, |a| vector_to_field(field, &f(&field_to_vector(field, a))).expect("k coordinates"))
}

/// `π_0, …, π_{k-1}` as `p`-linearized polynomials: `π_i(x)` is the `ω^i`
/// coordinate of `x`, from `(x, x^p, …, x^{p^{k-1}})·M⁻¹` with the Moore matrix
/// `M_{ij} = ω^{i·p^j}`.
pub fn coordinate_functions(field: &Field) -> Result<Vec<Poly>> {
    let (p, k) = (field.p(), field.degree());
    let w = if field.is_prime_field() { 1 } else { field.generator() };
    let rows = (0..k)
        .map(|i| (0..k).map(|j| field.pow(w, i as u64 * p.pow(j as u32))).collect())
        .collect();
    let moore = Matrix::from_rows(field, rows)?;
    let inv = moore.inverse().map_err(|_| Error::Singular)?;
    Ok((0..k)
        .map(|i| {
            (0..k).fold(Poly::zero(field), |acc, j| {
                acc.add(&Poly::monomial(field, inv.get(j, i), p.pow(j as u32) as usize))
            })
        })
        .collect())
}

fn mul_reduced(a: &Poly, b: &Poly) -> Poly {
    a.mul(b).reduce_mod_xq_minus_x()
}

/// Reduced polynomial of the `q`-cycle `f(x) = x + ω^{k-1} + g_{k-1}(x)` with
/// `g_1 = 1 - π_1^{p-1}` and `g_j = (1 - π_j^{p-1})·(ω^{j-1} + g_{j-1})`.
pub fn one_cycle_polynomial(field: &Field) -> Result<Poly> {
    let (p, k) = (field.p(), field.degree());
    let x = Poly::x(field);
    if k == 1 {
        return Ok(x.add(&Poly::one(field)));
    }
    let pis = coordinate_functions(field)?;
    let indicator = |j: usize| {
        let mut power = Poly::one(field);
        for _ in 0..p - 1 {
            power = mul_reduced(&power, &pis[j]);
        }
        Poly::one(field).sub(&power)
    };
    let w = field.generator();
    let mut g = indicator(1);
    for j in 2..k {
        let shifted = Poly::constant(field, field.pow(w, j as u64 - 1)).add(&g);
        g = mul_reduced(&indicator(j), &shifted);
    }
    Ok(x.add(&Poly::constant(field, field.pow(w, k as u64 - 1))).add(&g).reduce_mod_xq_minus_x())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::parse_poly;
    use crate::oracle::evaluate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ct(s: &str) -> CycleType {
        s.parse().unwrap()
    }

    fn oracle(map: &CosetWiseAffineMap) -> crate::oracle::Report {
        analyze(&map.tabulate().unwrap(), Addition::Digitwise { p: map.splitting().p }).unwrap()
    }

    fn random_map(rng: &mut ChaCha8Rng, p: u64, d: usize, t: usize, perm: bool) -> CosetWiseAffineMap {
        let field = Field::prime(p).unwrap();
        let count = Splitting { p, d, t }.cosets();
        let mut targets: Vec<usize> = (0..count).collect();
        for i in (1..count).rev() {
            targets.swap(i, rng.gen_range(0..=i));
        }
        let cosets = (0..count)
            .map(|i| {
                let alpha = if perm || rng.gen_bool(0.8) {
                    Matrix::random_invertible(&field, d, rng)
                } else {
                    Matrix::random(&field, d, d, rng)
                };
                let target = if perm || rng.gen_bool(0.8) { targets[i] } else { rng.gen_range(0..count) };
                CosetData {
                    alpha,
                    omega: Vector::new(&field, (0..d).map(|_| field.random(rng)).collect()),
                    nu: index_to_vector(&field, t, target).sub(&index_to_vector(&field, t, i)),
                }
            })
            .collect();
        CosetWiseAffineMap::new(p, d, t, cosets).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f3 = Field::prime(3).unwrap();
        let id = CosetWiseAffineMap::identity(3, 1, 2).unwrap();
        let x = Vector::from_ints(&f3, &[2, 1, 0]);
        assert_eq!(id.eval(&x).unwrap(), x);
        let h2 = one_cycle_map(3, 2).unwrap();
        assert_eq!(h2.eval(&Vector::from_ints(&f3, &[1, 0])).unwrap(), Vector::from_ints(&f3, &[2, 1]));
        assert_eq!(h2.eval(&Vector::from_ints(&f3, &[1, 1])).unwrap(), Vector::from_ints(&f3, &[1, 2]));
        assert!(id.eval(&Vector::zeros(&f3, 2)).is_err());
    }

    #[test]
    fn structure_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let (d, t) = (rng.gen_range(1..=2), rng.gen_range(0..=2));
            let f = random_map(&mut rng, p, d, t, false);
            let r = oracle(&f);
            assert_eq!(f.is_permutation(), r.is_bijection);
            assert_eq!(f.is_complete(), r.is_complete);
            match f.cycle_type() {
                Ok(c) => assert_eq!(Some(c), r.cycle_type),
                Err(e) => assert!(e == Error::NotBijection && !r.is_bijection),
            }
        }
    }

    #[test]
    fn wreath_round_trip_and_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let p = [2u64, 3][rng.gen_range(0..2)];
            let (d, t) = (rng.gen_range(1..=2), rng.gen_range(0..=2));
            let f = random_map(&mut rng, p, d, t, true);
            let e = f.to_wreath().unwrap();
            assert_eq!(e.to_cw(), f);
            let field = f.field().clone();
            for i in 0..p.pow((d + t) as u32) as usize {
                let x = index_to_vector(&field, d + t, i);
                let (w, u) = e.act(&x.slice(0, d), vector_to_index(&x.slice(d, d + t)));
                assert_eq!(f.eval(&x).unwrap(), w.concat(&index_to_vector(&field, t, u)));
            }
        }
        let id = CosetWiseAffineMap::identity(3, 1, 1).unwrap().to_wreath().unwrap();
        assert_eq!(id.top(), &[0, 1, 2]);
        assert!(id.bottom().iter().all(|g| *g == AffineMap::identity(g.field(), 1)));
    }

    #[test]
    fn wreath_product_is_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let p = [2u64, 3][rng.gen_range(0..2)];
            let (d, t) = (rng.gen_range(1..=2), rng.gen_range(0..=2));
            let f = random_map(&mut rng, p, d, t, true);
            let g = random_map(&mut rng, p, d, t, true);
            let fg = f.then(&g).unwrap();
            for i in 0..p.pow((d + t) as u32) as usize {
                let x = index_to_vector(f.field(), d + t, i);
                assert_eq!(fg.eval(&x).unwrap(), g.eval(&f.eval(&x).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn forward_products_from_any_start_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let f = random_map(&mut rng, 3, 2, 2, true);
            for cycle in f.top_cycles().unwrap() {
                let base = affine_cycle_type(&f.forward_cycle_product(&cycle).unwrap()).unwrap();
                for r in 1..cycle.len() {
                    let mut rotated = cycle.clone();
                    rotated.rotate_left(r);
                    let other = affine_cycle_type(&f.forward_cycle_product(&rotated).unwrap()).unwrap();
                    assert_eq!(other, base);
                }
            }
        }
    }

    #[test]
    fn cycle_type_examples() {
        assert_eq!(one_cycle_map(3, 2).unwrap().cycle_type().unwrap(), ct("x9"));
        assert_eq!(CosetWiseAffineMap::identity(3, 1, 2).unwrap().cycle_type().unwrap(), ct("x1^27"));
    }

    fn gammas(items: &[((u64, usize), &str)]) -> GammaChoice {
        items.iter().map(|(k, v)| (*k, ct(v))).collect()
    }

    #[test]
    fn construct_examples() {
        let shift = vec![1, 2, 0];
        let f = construct_main(3, 1, 1, &shift, &gammas(&[((3, 1), "x3")]), 0, ConstructMode::Complete).unwrap();
        let r = oracle(&f);
        assert!(r.is_complete);
        assert_eq!(r.cycle_type, Some(ct("x9")));
        let id = vec![0, 1, 2];
        let choice = gammas(&[((1, 1), "x1^3"), ((1, 2), "x1^3"), ((1, 3), "x1^3")]);
        let f = construct_main(3, 1, 1, &id, &choice, 0, ConstructMode::Complete).unwrap();
        assert_eq!(oracle(&f).cycle_type, Some(ct("x1^9")));
        let swap = vec![1, 0];
        let choice = gammas(&[((2, 1), "x1 x3")]);
        assert_eq!(
            construct_main(2, 2, 1, &swap, &choice, 0, ConstructMode::Complete),
            Err(Error::NotComplete)
        );
        let f = construct_main(2, 2, 1, &swap, &choice, 0, ConstructMode::Permutation).unwrap();
        let r = oracle(&f);
        assert!(r.is_bijection && !r.is_complete);
        assert_eq!(r.cycle_type, Some(ct("x2 x6")));
    }

    #[test]
    fn construct_characteristic_two() {
        let f4 = Field::new(2, 2).unwrap();
        // g = multiplication by ω on GF(4), read on coordinates
        let w = f4.generator();
        let g: Vec<usize> = (0..4)
            .map(|i| {
                let x = index_to_vector(&f4.prime_subfield(), 2, i);
                let y = f4.mul(vector_to_field(&f4, &x).unwrap(), w);
                vector_to_index(&field_to_vector(&f4, y))
            })
            .collect();
        let choice = gammas(&[((1, 1), "x1 x3"), ((3, 1), "x1^4")]);
        let f = construct_main(2, 2, 2, &g, &choice, 5, ConstructMode::Complete).unwrap();
        let r = oracle(&f);
        assert!(r.is_complete);
        assert_eq!(r.fixed_points, 1);
        assert_eq!(r.cycle_type, Some(ct("x1 x3^5")));
    }

    #[test]
    fn construct_rejects_bad_gamma() {
        let shift = vec![1, 2, 0];
        let bad = gammas(&[((3, 1), "x2 x1")].map(|(k, _)| (k, "x1 x2")));
        assert!(construct_main(3, 1, 1, &shift, &bad, 0, ConstructMode::Complete).is_err());
        assert!(construct_main(3, 1, 1, &shift, &GammaChoice::new(), 0, ConstructMode::Complete).is_err());
        assert!(construct_main(3, 1, 1, &[0, 0, 1], &bad, 0, ConstructMode::Complete).is_err());
    }

    #[test]
    fn conjugated_maps_keep_type() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let f = construct_main(3, 1, 1, &[1, 2, 0], &gammas(&[((3, 1), "x3")]), 0, ConstructMode::Complete).unwrap();
        let field = f.field().clone();
        let basis = Matrix::random_invertible(&field, 2, &mut rng);
        let c = ConjugatedMap::new(f, basis).unwrap();
        let r = analyze(&c.tabulate().unwrap(), Addition::Digitwise { p: 3 }).unwrap();
        assert!(r.is_complete);
        assert_eq!(r.cycle_type, Some(ct("x9")));
        let w = &c.subspace()[0];
        for i in 0..9 {
            let x = index_to_vector(&field, 2, i);
            let d1 = c.eval(&x.add(w)).unwrap().sub(&c.eval(&x).unwrap());
            let d2 = c.eval(&x.add(w).add(w)).unwrap().sub(&c.eval(&x.add(w)).unwrap());
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn sylow_types() {
        assert_eq!(
            sylow_cycle_types(3, 2),
            ["x1^9", "x1^6 x3", "x1^3 x3^2", "x3^3", "x9"].map(ct).into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect::<Vec<_>>()
        );
        for target in sylow_cycle_types(3, 2) {
            let f = construct_sylow_type(3, 2, &target).unwrap();
            let r = oracle(&f);
            assert!(r.is_complete);
            assert_eq!(r.cycle_type, Some(target));
        }
        let f = construct_sylow_type(3, 1, &ct("x3")).unwrap();
        assert_eq!(f.eval(&Vector::from_ints(&Field::prime(3).unwrap(), &[2])).unwrap().data(), &[0]);
        assert!(construct_sylow_type(3, 2, &ct("x1 x8")).is_err());
        assert!(construct_sylow_type(3, 2, &ct("x1^3 x2^3")).is_err());
        assert!(construct_sylow_type(2, 2, &ct("x4")).is_err());
    }

    #[test]
    fn one_cycle_maps() {
        for p in [2u64, 3, 5] {
            for k in 1..=4 {
                if p.pow(k as u32) > 700 {
                    continue;
                }
                let closed = one_cycle_map(p, k).unwrap();
                let rec = one_cycle_map_recursive(p, k).unwrap();
                assert_eq!(closed.tabulate().unwrap(), rec.tabulate().unwrap());
                assert_eq!(closed.cycle_type().unwrap(), CycleType::cycle(p.pow(k as u32)));
                assert_eq!(closed.is_complete(), p > 2);
            }
        }
        let f3 = Field::prime(3).unwrap();
        let h1 = one_cycle_map(3, 1).unwrap();
        assert_eq!(h1.eval(&Vector::from_ints(&f3, &[2])).unwrap(), Vector::from_ints(&f3, &[0]));
    }

    fn gf27() -> Field {
        Field::with_modulus(3, &[1, 2, 0, 1]).unwrap()
    }

    #[test]
    fn coordinate_functions_in_gf27() {
        let f = gf27();
        let pis = coordinate_functions(&f).unwrap();
        assert_eq!(pis[2], parse_poly(&f, "-x - x^3 - x^9").unwrap());
        assert_eq!(pis[1], parse_poly(&f, "w^14*x + w^16*x^3 + w^22*x^9").unwrap());
        assert_eq!(pis[0], parse_poly(&f, "w^25*x + w^23*x^3 + w^17*x^9").unwrap());
        for (i, pi) in pis.iter().enumerate() {
            for j in 0..3 {
                assert_eq!(pi.eval(f.omega_pow(j as u64)), u64::from(i == j));
            }
        }
    }

    #[test]
    fn one_cycle_polynomial_gf27() {
        let f = gf27();
        let poly = one_cycle_polynomial(&f).unwrap();
        assert_eq!(
            poly.to_text("x"),
            "x^24 + x^22 + x^20 + w^16*x^18 + x^16 + x^14 + w^9*x^12 + w^9*x^10 + x^8 + w^16*x^6 + w^9*x^4 + w^16*x^2 + x + w^6"
        );
        let map = one_cycle_map(3, 3).unwrap();
        let table = transport_to_field(&f, |v| map.eval(v).unwrap()).unwrap();
        let values = evaluate(&poly).unwrap();
        assert_eq!(table.images().iter().map(|&y| y as Elem).collect::<Vec<_>>(), values);
    }

    #[test]
    fn one_cycle_polynomials_small_fields() {
        for (p, k) in [(3u64, 1usize), (3, 2), (5, 2), (2, 2), (2, 3), (7, 2)] {
            let f = Field::new(p, k).unwrap();
            let poly = one_cycle_polynomial(&f).unwrap();
            let table = tabulate_field(&f, |a| poly.eval(a)).unwrap();
            let r = analyze(&table, Addition::Digitwise { p }).unwrap();
            assert_eq!(r.cycle_type, Some(CycleType::cycle(f.size())));
            assert_eq!(r.is_complete, p > 2);
        }
    }

    #[test]
    fn bridge_round_trip() {
        let f = gf27();
        assert_eq!(field_to_vector(&f, f.generator()).data(), &[0, 1, 0]);
        for a in f.elements() {
            assert_eq!(vector_to_field(&f, &field_to_vector(&f, a)).unwrap(), a);
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let f = random_map(&mut rng, 3, 2, 1, false);
        let back = CosetWiseAffineMap::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let text = one_cycle_map(3, 2).unwrap().to_json().to_string();
        assert!(text.starts_with(r#"{"cosets":[{"alpha":[[[1]]],"nu":[[1]],"omega":[[1]],"u":[[0]]}"#), "{text}");
    }
}
