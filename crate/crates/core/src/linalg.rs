//! Exact linear algebra over GF(q) with the row-vector convention: a matrix
//! `M` acts by `x ↦ x·M`, and an affine map `λ(M, v)` is `x ↦ x·M + v`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf::json::{elem_from_json, elem_to_json};
use crate::gf::{factor_monic, Elem, Field, Poly};

/// Row vector over a field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vector {
    field: Field,
    data: Vec<Elem>,
}

impl Vector {
    pub fn new(field: &Field, data: Vec<Elem>) -> Vector {
        Vector { field: field.clone(), data }
    }

    pub fn zeros(field: &Field, n: usize) -> Vector {
        Vector::new(field, vec![0; n])
    }

    pub fn from_ints(field: &Field, data: &[i64]) -> Vector {
        Vector::new(field, data.iter().map(|&x| field.from_int(x)).collect())
    }

    /// Unit vector `e_i`.
    pub fn unit(field: &Field, n: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(field, n);
        v.data[i] = 1;
        v
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    pub fn get(&self, i: usize) -> Elem {
        self.data[i]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        let f = &self.field;
        Vector::new(f, self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        let f = &self.field;
        Vector::new(f, self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect())
    }

    pub fn scale(&self, c: Elem) -> Vector {
        let f = &self.field;
        Vector::new(f, self.data.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// `self · m`.
    pub fn mul_matrix(&self, m: &Matrix) -> Vector {
        assert_eq!(self.len(), m.rows, "vector length must match matrix rows");
        let f = &self.field;
        let mut out = vec![0; m.cols];
        for (i, &a) in self.data.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate() {
                *slot = f.add(*slot, f.mul(a, m.get(i, j)));
            }
        }
        Vector::new(f, out)
    }

    pub fn slice(&self, start: usize, end: usize) -> Vector {
        Vector::new(&self.field, self.data[start..end].to_vec())
    }

    pub fn concat(&self, other: &Vector) -> Vector {
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Vector::new(&self.field, data)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.data.iter().map(|&a| self.field.format_elem(a)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Dense row-major matrix over a field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Elem>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        if rows.iter().flatten().any(|&x| !field.contains(x)) {
            return Err(Error::InvalidArgument(format!("matrix entry outside {field}")));
        }
        Ok(Matrix { field: field.clone(), rows: r, cols: c, data: rows.concat() })
    }

    /// Matrix with prime-subfield entries given as integers; rows must have equal length.
    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Matrix {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|&x| field.from_int(x)).collect())
            .collect();
        Matrix::from_rows(field, rows).expect("rectangular integer matrix")
    }

    pub fn from_row_vectors(field: &Field, rows: &[Vector]) -> Matrix {
        let cols = rows.first().map_or(0, Vector::len);
        let data = rows.iter().flat_map(|v| v.data.iter().copied()).collect();
        Matrix { field: field.clone(), rows: rows.len(), cols, data }
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        Matrix { field: field.clone(), rows, cols, data }
    }

    pub fn random_invertible<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Matrix {
        loop {
            let m = Matrix::random(field, n, n, rng);
            if m.is_invertible() {
                return m;
            }
        }
    }

    /// Block-diagonal assembly of square blocks.
    pub fn block_diag(field: &Field, blocks: &[Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(field, n, n);
        let mut off = 0;
        for b in blocks {
            assert!(b.is_square(), "diagonal blocks must be square");
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(off + i, off + j, b.get(i, j));
                }
            }
            off += b.rows;
        }
        out
    }

    pub fn field(&self) -> &Field {
        &self.field
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

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector::new(&self.field, self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        self.data.chunks(self.cols.max(1)).map(<[Elem]>::to_vec).take(self.rows).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn zip_with(&self, other: &Matrix, op: impl Fn(Elem, Elem) -> Elem) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b)).collect();
        Ok(Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        let f = self.field.clone();
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        let f = self.field.clone();
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: Elem) -> Matrix {
        let f = &self.field;
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(&self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `P(self)` by Horner's rule.
    pub fn eval_poly(&self, p: &Poly) -> Matrix {
        assert!(self.is_square());
        let n = self.rows;
        let mut acc = Matrix::zeros(&self.field, n, n);
        for &c in p.coeffs().iter().rev() {
            acc = &acc * self;
            for i in 0..n {
                let v = self.field.add(acc.get(i, i), c);
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                let factor = m.get(i, c);
                if i == r || factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Result<Elem> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let f = &self.field;
        let mut m = self.clone();
        let mut det = f.one();
        for c in 0..m.cols {
            let Some(pr) = (c..m.rows).find(|&i| m.get(i, c) != 0) else {
                return Ok(0);
            };
            if pr != c {
                m.swap_rows(c, pr);
                det = f.neg(det);
            }
            let pivot = m.get(c, c);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot)?;
            for i in c + 1..m.rows {
                let factor = f.mul(m.get(i, c), inv);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut inv = Matrix::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Ok(inv)
    }

    /// Some `x` with `x·self = b`.
    pub fn solve(&self, b: &Vector) -> Result<Vector> {
        if b.len() != self.cols {
            return Err(Error::DimensionMismatch("right-hand side length".into()));
        }
        // x·A = b  <=>  Aᵀ·xᵀ = bᵀ
        let at = self.transpose();
        let (rows, cols) = (at.rows, at.cols);
        let mut aug = Matrix::zeros(&self.field, rows, cols + 1);
        for i in 0..rows {
            for j in 0..cols {
                aug.set(i, j, at.get(i, j));
            }
            aug.set(i, cols, b.get(i));
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&cols) {
            return Err(Error::Singular);
        }
        let mut x = vec![0; cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = r.get(i, cols);
        }
        Ok(Vector::new(&self.field, x))
    }

    /// Basis (in reduced echelon form) of the left kernel `{x : x·self = 0}`.
    pub fn left_kernel(&self) -> Vec<Vector> {
        let at = self.transpose();
        let (r, pivots) = at.rref();
        let n = at.cols;
        let f = &self.field;
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let basis: Vec<Vector> = free
            .iter()
            .map(|&fc| {
                let mut x = vec![0; n];
                x[fc] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    x[pc] = f.neg(r.get(i, fc));
                }
                Vector::new(f, x)
            })
            .collect();
        if basis.is_empty() {
            return basis;
        }
        let (ech, piv) = Matrix::from_row_vectors(f, &basis).rref();
        (0..piv.len()).map(|i| ech.row(i)).collect()
    }

    /// Characteristic polynomial `det(X·I - self)` via Hessenberg reduction.
    pub fn charpoly(&self) -> Poly {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let f = &self.field;
        let n = self.rows;
        let mut h = self.clone();
        for j in 0..n.saturating_sub(2) {
            let Some(pr) = (j + 1..n).find(|&i| h.get(i, j) != 0) else {
                continue;
            };
            if pr != j + 1 {
                h.swap_rows(pr, j + 1);
                for i in 0..n {
                    h.data.swap(i * n + pr, i * n + j + 1);
                }
            }
            let inv = f.inv(h.get(j + 1, j)).expect("pivot is nonzero");
            for r in j + 2..n {
                let m = f.mul(h.get(r, j), inv);
                if m == 0 {
                    continue;
                }
                for c in 0..n {
                    let v = f.sub(h.get(r, c), f.mul(m, h.get(j + 1, c)));
                    h.set(r, c, v);
                }
                for i in 0..n {
                    let v = f.add(h.get(i, j + 1), f.mul(m, h.get(i, r)));
                    h.set(i, j + 1, v);
                }
            }
        }
        let x = Poly::x(f);
        let mut ps = vec![Poly::one(f)];
        for m in 1..=n {
            let mut pm = x.sub(&Poly::constant(f, h.get(m - 1, m - 1))).mul(&ps[m - 1]);
            let mut prod = f.one();
            for i in (1..m).rev() {
                prod = f.mul(prod, h.get(i, i - 1));
                let c = f.mul(h.get(i - 1, m - 1), prod);
                pm = pm.sub(&ps[i - 1].scale(c));
            }
            ps.push(pm);
        }
        ps.pop().expect("nonempty")
    }

    /// Minimal polynomial, as the lcm of the Krylov minimal polynomials of the unit vectors.
    pub fn minpoly(&self) -> Poly {
        assert!(self.is_square());
        let f = &self.field;
        let n = self.rows;
        let mut acc = Poly::one(f);
        for i in 0..n {
            let mut krylov = vec![Vector::unit(f, n, i)];
            loop {
                let next = krylov.last().unwrap().mul_matrix(self);
                let basis = Matrix::from_row_vectors(f, &krylov);
                match basis.solve(&next) {
                    Ok(c) => {
                        let k = krylov.len();
                        let mut coeffs: Vec<Elem> = c.data.iter().map(|&a| f.neg(a)).collect();
                        coeffs.push(1);
                        debug_assert_eq!(coeffs.len(), k + 1);
                        let local = Poly::new(f, coeffs);
                        let g = acc.gcd(&local);
                        acc = acc.mul(&local).divmod(&g).expect("nonzero gcd").0;
                        break;
                    }
                    Err(_) => krylov.push(next),
                }
            }
        }
        acc.monic()
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix addition")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix subtraction")
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix multiplication")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows).map(|i| format!("{:?}", self.row(i))).collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Incrementally maintained row space in echelon form.
#[derive(Clone)]
pub(crate) struct Subspace {
    field: Field,
    /// Pairs of (pivot column, normalized row).
    rows: Vec<(usize, Vec<Elem>)>,
}

impl Subspace {
    pub(crate) fn new(field: &Field) -> Subspace {
        Subspace { field: field.clone(), rows: Vec::new() }
    }

    fn reduce(&self, v: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let mut v = v.to_vec();
        for (pc, row) in &self.rows {
            let c = v[*pc];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        v
    }

    pub(crate) fn contains(&self, v: &Vector) -> bool {
        self.reduce(&v.data).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns whether the dimension grew.
    pub(crate) fn insert(&mut self, v: &Vector) -> bool {
        let f = &self.field;
        let mut r = self.reduce(&v.data);
        let Some(pc) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(r[pc]).expect("nonzero");
        for x in r.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[pc];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(&r) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        self.rows.push((pc, r));
        true
    }
}

/// Companion matrix of a monic `P = X^d + a_{d-1}X^{d-1} + … + a_0`: ones on the
/// superdiagonal and last row `(-a_0, …, -a_{d-1})`. It represents
/// multiplication by `X` on GF(q)[X]/(P) in the basis `1, X, …, X^{d-1}`.
pub fn companion(p: &Poly) -> Result<Matrix> {
    let d = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::InvalidArgument("companion matrix needs degree at least 1".into())),
    };
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    let f = p.field();
    let mut m = Matrix::zeros(f, d, d);
    for i in 0..d - 1 {
        m.set(i, i + 1, 1);
    }
    for j in 0..d {
        m.set(d - 1, j, f.neg(p.coeff(j)));
    }
    Ok(m)
}

/// Hypercompanion matrix of `Q^e`: `e` diagonal copies of `Comp(Q)` chained by a
/// single one linking the last row of each copy to the first column of the next.
pub fn hypercompanion(q: &Poly, e: usize) -> Result<Matrix> {
    if e == 0 {
        return Err(Error::InvalidArgument("exponent must be positive".into()));
    }
    if !q.is_monic() {
        return Err(Error::NotMonic);
    }
    if !q.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let c = companion(q)?;
    let m = c.rows();
    let mut out = Matrix::block_diag(q.field(), &vec![c; e]);
    for b in 0..e - 1 {
        out.set(b * m + m - 1, (b + 1) * m, 1);
    }
    Ok(out)
}

/// Primary rational canonical form `S⁻¹·A·S = diag(Comp(Q_1^{e_1}), …)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prcf {
    /// `(Q, e)` pairs in block order.
    pub blocks: Vec<(Poly, usize)>,
    /// `S`; the rows of `S⁻¹` are the adapted basis.
    pub basis_change: Matrix,
}

impl Prcf {
    pub fn block_matrix(&self) -> Matrix {
        let field = self.basis_change.field();
        let blocks: Vec<Matrix> = self
            .blocks
            .iter()
            .map(|(q, e)| companion(&q.pow(*e as u64)).expect("monic block"))
            .collect();
        Matrix::block_diag(field, &blocks)
    }

    /// `(offset, size)` of each block within the adapted coordinates.
    pub fn block_ranges(&self) -> Vec<(usize, usize)> {
        let mut off = 0;
        self.blocks
            .iter()
            .map(|(q, e)| {
                let size = q.degree().expect("nonzero") * e;
                let r = (off, size);
                off += size;
                r
            })
            .collect()
    }
}

/// Computes the primary rational canonical form with its change of basis.
///
/// Blocks are ordered by `Q` in grade-lex order and, for equal `Q`, by
/// ascending exponent. Cyclic generators are picked greedily from echelon
/// bases of the kernels `ker Q(A)^j`, top height first.
pub fn prcf(a: &Matrix) -> Result<Prcf> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::DimensionMismatch("PRCF needs a non-empty square matrix".into()));
    }
    let f = a.field();
    let n = a.rows();
    let mut basis_rows: Vec<Vector> = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    for (q, mult) in factor_monic(&a.charpoly())? {
        let dq = q.degree().expect("irreducible factor");
        let nq = a.eval_poly(&q);
        let target = mult * dq;
        // kernels[j] = basis of ker(N^j)
        let mut kernels: Vec<Vec<Vector>> = vec![Vec::new()];
        let mut npow = Matrix::identity(f, n);
        while kernels.last().unwrap().len() < target {
            npow = &npow * &nq;
            kernels.push(npow.left_kernel());
        }
        let height = kernels.len() - 1;
        let mut gens: Vec<(Vector, usize)> = Vec::new();
        for j in (1..=height).rev() {
            let mut span = Subspace::new(f);
            for v in &kernels[j - 1] {
                span.insert(v);
            }
            for (g, e) in &gens {
                let mut v = g.mul_matrix(&nq.pow((*e - j) as u64));
                for _ in 0..dq {
                    span.insert(&v);
                    v = v.mul_matrix(a);
                }
            }
            for b in &kernels[j] {
                if span.contains(b) {
                    continue;
                }
                let mut v = b.clone();
                for _ in 0..dq {
                    span.insert(&v);
                    v = v.mul_matrix(a);
                }
                gens.push((b.clone(), j));
            }
        }
        gens.sort_by_key(|(_, e)| *e);
        for (g, e) in gens {
            let mut v = g;
            for _ in 0..e * dq {
                let next = v.mul_matrix(a);
                basis_rows.push(v);
                v = next;
            }
            blocks.push((q.clone(), e));
        }
    }
    let t = Matrix::from_row_vectors(f, &basis_rows);
    let s = t.inverse().expect("cyclic bases of a primary decomposition are independent");
    let out = Prcf { blocks, basis_change: s };
    debug_assert_eq!(&(&t * a) * &out.basis_change, out.block_matrix());
    Ok(out)
}

/// Affine permutation `λ(M, v): x ↦ x·M + v`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    matrix: Matrix,
    shift: Vector,
}

impl AffineMap {
    pub fn new(matrix: Matrix, shift: Vector) -> Result<AffineMap> {
        if !matrix.is_square() || matrix.rows() != shift.len() {
            return Err(Error::DimensionMismatch(format!(
                "affine map with {}x{} matrix and shift of length {}",
                matrix.rows(),
                matrix.cols(),
                shift.len()
            )));
        }
        if matrix.field() != shift.field() {
            return Err(Error::FieldMismatch);
        }
        if !matrix.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(AffineMap { matrix, shift })
    }

    pub fn identity(field: &Field, n: usize) -> AffineMap {
        AffineMap { matrix: Matrix::identity(field, n), shift: Vector::zeros(field, n) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn shift(&self) -> &Vector {
        &self.shift
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn field(&self) -> &Field {
        self.matrix.field()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        x.mul_matrix(&self.matrix).add(&self.shift)
    }

    /// `self` followed by `next`: `λ(A₁,b₁)` then `λ(A₂,b₂)` is `λ(A₁A₂, b₁A₂ + b₂)`.
    pub fn then(&self, next: &AffineMap) -> AffineMap {
        AffineMap {
            matrix: &self.matrix * &next.matrix,
            shift: self.shift.mul_matrix(&next.matrix).add(&next.shift),
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = self.matrix.inverse().expect("affine permutations are invertible");
        let shift = self.shift.mul_matrix(&inv);
        AffineMap { shift: Vector::zeros(self.field(), self.dim()).sub(&shift), matrix: inv }
    }
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "λ({:?}, {:?})", self.matrix, self.shift)
    }
}

pub fn vector_to_json(v: &Vector) -> Value {
    Value::from(v.data().iter().map(|&a| elem_to_json(v.field(), a)).collect::<Vec<_>>())
}

pub fn vector_from_json(field: &Field, value: &Value) -> Result<Vector> {
    let items = value.as_array().ok_or_else(|| Error::Parse("vector must be an array".into()))?;
    let data = items.iter().map(|x| elem_from_json(field, x)).collect::<Result<Vec<_>>>()?;
    Ok(Vector::new(field, data))
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::from(m.row_vectors().iter().map(vector_to_json).collect::<Vec<_>>())
}

pub fn matrix_from_json(field: &Field, value: &Value) -> Result<Matrix> {
    let rows = value.as_array().ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    let rows = rows
        .iter()
        .map(|r| vector_from_json(field, r).map(|v| v.data().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(field, rows)
}

pub fn affine_to_json(f: &AffineMap) -> Value {
    serde_json::json!({ "matrix": matrix_to_json(f.matrix()), "shift": vector_to_json(f.shift()) })
}

pub fn affine_from_json(field: &Field, value: &Value) -> Result<AffineMap> {
    let m = value.get("matrix").ok_or_else(|| Error::Parse("affine map needs \"matrix\"".into()))?;
    let v = value.get("shift").ok_or_else(|| Error::Parse("affine map needs \"shift\"".into()))?;
    AffineMap::new(matrix_from_json(field, m)?, vector_from_json(field, v)?)
}
