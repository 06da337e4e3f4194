//! Dense matrices over the top field of a [`Tower`], Krylov sequences,
//! Frobenius normal form and `tau`-semilinear maps.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Tower};
use crate::poly::{lcm, Poly};

pub type Vector = Vec<Elem>;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize, f: &Tower) -> Matrix {
        Matrix::scalar(n, f.one())
    }

    pub fn scalar(n: usize, c: Elem) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn diagonal(entries: &[Elem]) -> Matrix {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, &c) in entries.iter().enumerate() {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds an `n x k` matrix whose columns are the given vectors.
    pub fn from_cols(n: usize, cols: &[Vector]) -> Matrix {
        let mut m = Matrix::zeros(n, cols.len());
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), n, "column length");
            for (i, &x) in v.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    /// Convenience constructor from small signed integers.
    pub fn from_ints(f: &Tower, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| f.from_int(x)).collect())
                .collect(),
        )
        .expect("rectangular")
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

    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn col_vectors(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Elem::is_zero)
    }

    pub fn is_identity(&self, f: &Tower) -> bool {
        self.is_square() && *self == Matrix::identity(self.rows, f)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    fn zip(&self, other: &Matrix, op: impl Fn(Elem, Elem) -> Elem) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix shapes differ"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Matrix, f: &Tower) -> Matrix {
        self.zip(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Matrix, f: &Tower) -> Matrix {
        self.zip(other, |a, b| f.sub(a, b))
    }

    pub fn try_add(&self, other: &Matrix, f: &Tower) -> Result<Matrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.add(other, f))
    }

    pub fn map(&self, op: impl Fn(Elem) -> Elem) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| op(a)).collect(),
        }
    }

    pub fn neg(&self, f: &Tower) -> Matrix {
        self.map(|a| f.neg(a))
    }

    pub fn scale(&self, c: Elem, f: &Tower) -> Matrix {
        self.map(|a| f.mul(a, c))
    }

    /// Entrywise Galois involution.
    pub fn tau(&self, f: &Tower) -> Matrix {
        self.map(|a| f.tau(a))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix, f: &Tower) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shapes");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(l, j)));
                }
            }
        }
        out
    }

    pub fn try_mul(&self, other: &Matrix, f: &Tower) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul(other, f))
    }

    pub fn mul_vec(&self, v: &[Elem], f: &Tower) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector shapes");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Elem::ZERO, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j])))
            })
            .collect()
    }

    /// Reduced row echelon form and its pivot columns. Pivots are the first
    /// nonzero entry found scanning rows downward.
    pub fn rref(&self, f: &Tower) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
            for j in 0..m.cols {
                m.set(r, j, f.mul(m.get(r, j), inv));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
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

    pub fn rank(&self, f: &Tower) -> usize {
        self.rref(f).1.len()
    }

    /// A basis of the null space, as the columns of a `cols x k` matrix.
    pub fn kernel(&self, f: &Tower) -> Matrix {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, f.one());
            for (row, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, f.neg(r.get(row, fc)));
            }
        }
        basis
    }

    /// One solution `x` of `self * x = b`, or `None`.
    pub fn solve(&self, b: &[Elem], f: &Tower) -> Option<Vector> {
        let rhs = Matrix::from_cols(self.rows, &[b.to_vec()]);
        self.solve_matrix(&rhs, f).map(|x| x.col(0))
    }

    /// One solution `X` of `self * X = rhs`, or `None`.
    pub fn solve_matrix(&self, rhs: &Matrix, f: &Tower) -> Option<Matrix> {
        assert_eq!(self.rows, rhs.rows, "solve shapes");
        let aug = self.hstack(rhs);
        let (r, pivots) = aug.rref(f);
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.cols, rhs.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, r.get(row, self.cols + j));
            }
        }
        Some(x)
    }

    pub fn inverse(&self, f: &Tower) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "inverse of {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let (r, pivots) = self.hstack(&Matrix::identity(n, f)).rref(f);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(r.select_cols(n..2 * n))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self, f: &Tower) -> Result<Elem> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "determinant of {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(f.one());
        }
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = f.one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        negate = !negate;
                    }
                    None => return Ok(f.zero()),
                }
            }
            let pivot = m.get(k, k);
            let prev_inv = f.inv(prev).expect("nonzero previous pivot");
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = f.sub(f.mul(m.get(i, j), pivot), f.mul(m.get(i, k), m.get(k, j)));
                    m.set(i, j, f.mul(v, prev_inv));
                }
                m.set(i, k, f.zero());
            }
            prev = pivot;
        }
        let d = m.get(n - 1, n - 1);
        Ok(if negate { f.neg(d) } else { d })
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack rows");
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn hstack_all(rows: usize, parts: &[Matrix]) -> Matrix {
        parts
            .iter()
            .fold(Matrix::zeros(rows, 0), |acc, m| acc.hstack(m))
    }

    pub fn block_diag(parts: &[Matrix]) -> Matrix {
        let r: usize = parts.iter().map(|m| m.rows).sum();
        let c: usize = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for m in parts {
            out.set_block(r0, c0, m);
            r0 += m.rows;
            c0 += m.cols;
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                m.set(i, j, self.get(r, c));
            }
        }
        m
    }

    pub fn select_cols(&self, cols: std::ops::Range<usize>) -> Matrix {
        self.block(0..self.rows, cols)
    }

    /// `poly(self)` by Horner's rule.
    pub fn eval_poly(&self, poly: &Poly, f: &Tower) -> Matrix {
        let n = self.rows;
        let mut acc = Matrix::zeros(n, n);
        for &c in poly.coeffs().iter().rev() {
            acc = acc.mul(self, f).add(&Matrix::scalar(n, c), f);
        }
        acc
    }

    /// `poly(self) v` without forming `poly(self)`.
    pub fn apply_poly(&self, poly: &Poly, v: &[Elem], f: &Tower) -> Vector {
        let mut acc = vec![Elem::ZERO; v.len()];
        for &c in poly.coeffs().iter().rev() {
            acc = self.mul_vec(&acc, f);
            for (a, &x) in acc.iter_mut().zip(v) {
                *a = f.add(*a, f.mul(c, x));
            }
        }
        acc
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, e: i64, f: &Tower) -> Result<Matrix> {
        let base = if e < 0 {
            self.inverse(f)?
        } else {
            self.clone()
        };
        let mut acc = Matrix::identity(self.rows, f);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base, f);
        }
        Ok(acc)
    }
}

pub fn unit_vector(n: usize, i: usize, f: &Tower) -> Vector {
    let mut v = vec![Elem::ZERO; n];
    v[i] = f.one();
    v
}

pub fn vec_add(a: &[Elem], b: &[Elem], f: &Tower) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub fn vec_sub(a: &[Elem], b: &[Elem], f: &Tower) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

pub fn vec_scale(a: &[Elem], c: Elem, f: &Tower) -> Vector {
    a.iter().map(|&x| f.mul(x, c)).collect()
}

pub fn vec_tau(a: &[Elem], f: &Tower) -> Vector {
    a.iter().map(|&x| f.tau(x)).collect()
}

pub fn is_zero_vec(a: &[Elem]) -> bool {
    a.iter().all(Elem::is_zero)
}

/// Column companion matrix of a monic `poly = T^d - sum c_j T^j`: it maps
/// `e_i -> e_{i+1}` and `e_{d-1} -> sum c_j e_j`.
pub fn companion(poly: &Poly, f: &Tower) -> Matrix {
    let d = poly.deg();
    let mut m = Matrix::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        m.set(i + 1, i, f.one());
    }
    for j in 0..d {
        m.set(j, d - 1, f.neg(poly.coeff(j)));
    }
    m
}

/// The Krylov basis `v, gv, ..., g^{d-1} v` (as columns) and the monic
/// annihilator of `v`.
pub fn krylov_basis(g: &Matrix, v: &[Elem], f: &Tower) -> Result<(Matrix, Poly)> {
    if is_zero_vec(v) {
        return Err(Error::ZeroVector);
    }
    let n = g.rows();
    let mut vecs: Vec<Vector> = vec![v.to_vec()];
    loop {
        let next = g.mul_vec(vecs.last().expect("nonempty"), f);
        let basis = Matrix::from_cols(n, &vecs);
        if let Some(c) = basis.solve(&next, f) {
            let mut coeffs: Vec<Elem> = c.iter().map(|&x| f.neg(x)).collect();
            coeffs.push(f.one());
            return Ok((basis, Poly::from_coeffs(coeffs)));
        }
        vecs.push(next);
    }
}

pub fn annihilator(g: &Matrix, v: &[Elem], f: &Tower) -> Result<Poly> {
    krylov_basis(g, v, f).map(|(_, a)| a)
}

/// Minimal polynomial as the lcm of the annihilators of the standard basis.
pub fn minimal_polynomial(g: &Matrix, f: &Tower) -> Poly {
    assert!(g.is_square(), "minimal polynomial of a non-square matrix");
    let n = g.rows();
    (0..n).fold(Poly::one(f), |acc, i| {
        let ann = annihilator(g, &unit_vector(n, i, f), f).expect("unit vector");
        lcm(&acc, &ann, f)
    })
}

/// Number of seeded random candidates tried after the structured ones.
pub const RANDOM_CANDIDATES: usize = 64;

/// Deterministic candidate order for cyclic-vector searches: standard basis
/// vectors, then sums of two and three of them, then seeded random vectors.
pub fn candidate_vectors(n: usize, f: &Tower, seed: u64) -> impl Iterator<Item = Vector> + '_ {
    let singles = (0..n).map(move |i| unit_vector(n, i, f));
    let pairs = (0..n).flat_map(move |i| {
        (i + 1..n).map(move |j| vec_add(&unit_vector(n, i, f), &unit_vector(n, j, f), f))
    });
    let triples = (0..n).flat_map(move |i| {
        (i + 1..n).flat_map(move |j| {
            (j + 1..n).map(move |k| {
                let s = vec_add(&unit_vector(n, i, f), &unit_vector(n, j, f), f);
                vec_add(&s, &unit_vector(n, k, f), f)
            })
        })
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = f.size();
    let randoms = (0..RANDOM_CANDIDATES).filter_map(move |_| {
        let v: Vector = (0..n)
            .map(|_| f.from_index(rng.gen_range(0..size)))
            .collect();
        (!is_zero_vec(&v)).then_some(v)
    });
    singles.chain(pairs).chain(triples).chain(randoms)
}

/// Rational canonical form: invariant factors `f_1 | f_2 | ...` and a basis
/// change `P` with `P^{-1} a P = diag(companion(f_1), companion(f_2), ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusForm {
    pub invariants: Vec<Poly>,
    pub basis_change: Matrix,
}

impl FrobeniusForm {
    pub fn blocks(&self, f: &Tower) -> Vec<Matrix> {
        self.invariants.iter().map(|p| companion(p, f)).collect()
    }

    pub fn block_matrix(&self, f: &Tower) -> Matrix {
        Matrix::block_diag(&self.blocks(f))
    }
}

pub fn frobenius_form(a: &Matrix, f: &Tower, seed: u64) -> Result<FrobeniusForm> {
    if !a.is_square() {
        return Err(Error::Shape("Frobenius form of a non-square matrix".into()));
    }
    let n = a.rows();
    let parts = cyclic_split(a, f, seed)?;
    let invariants: Vec<Poly> = parts.iter().map(|(p, _)| p.clone()).collect();
    let basis_change =
        Matrix::hstack_all(n, &parts.into_iter().map(|(_, k)| k).collect::<Vec<_>>());
    Ok(FrobeniusForm {
        invariants,
        basis_change,
    })
}

/// Splits off a cyclic summand generated by a vector whose annihilator is the
/// minimal polynomial, then recurses on an invariant complement.
fn cyclic_split(a: &Matrix, f: &Tower, seed: u64) -> Result<Vec<(Poly, Matrix)>> {
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let minpoly = minimal_polynomial(a, f);
    let d = minpoly.deg();
    let (krylov, _) = candidate_vectors(n, f, seed)
        .find_map(|v| {
            let (k, ann) = krylov_basis(a, &v, f).ok()?;
            (ann == minpoly).then_some((k, ann))
        })
        .ok_or_else(|| Error::SearchFailed("a vector with full annihilator".into()))?;
    if d == n {
        return Ok(vec![(minpoly, krylov)]);
    }
    // A functional with phi(a^i v) = [i = d - 1]; its a-orbit cuts out an
    // invariant complement of the cyclic span.
    let phi = krylov
        .transpose()
        .solve(&unit_vector(d, d - 1, f), f)
        .ok_or_else(|| Error::invariant("Krylov basis has full rank", "functional solve"))?;
    let mut rows = Vec::with_capacity(d);
    let mut row = phi;
    for _ in 0..d {
        rows.push(row.clone());
        row = a.transpose().mul_vec(&row, f);
    }
    let complement = Matrix::from_rows(rows)?.kernel(f);
    if complement.cols() != n - d {
        return Err(Error::invariant(
            "cyclic summand has an invariant complement",
            "dimension",
        ));
    }
    let restricted = complement
        .solve_matrix(&a.mul(&complement, f), f)
        .ok_or_else(|| Error::invariant("complement is invariant", "restriction solve"))?;
    let mut out = Vec::new();
    for (p, k) in cyclic_split(&restricted, f, seed.wrapping_add(1))? {
        out.push((p, complement.mul(&k, f)));
    }
    out.push((minpoly, krylov));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Twist {
    Identity,
    Tau,
}

impl Twist {
    pub fn compose(self, other: Twist) -> Twist {
        if self == other {
            Twist::Identity
        } else {
            Twist::Tau
        }
    }

    /// The twist anti-unitary maps carry on this tower.
    pub fn anti_unitary(f: &Tower) -> Twist {
        if f.is_quadratic() {
            Twist::Tau
        } else {
            Twist::Identity
        }
    }

    pub fn apply(self, a: Elem, f: &Tower) -> Elem {
        match self {
            Twist::Identity => a,
            Twist::Tau => f.tau(a),
        }
    }

    pub fn apply_matrix(self, m: &Matrix, f: &Tower) -> Matrix {
        match self {
            Twist::Identity => m.clone(),
            Twist::Tau => m.tau(f),
        }
    }
}

/// The additive map `v -> mat * sigma(v)` with `sigma` the twist applied
/// entrywise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemilinearMap {
    pub mat: Matrix,
    pub twist: Twist,
}

impl SemilinearMap {
    pub fn new(mat: Matrix, twist: Twist) -> SemilinearMap {
        SemilinearMap { mat, twist }
    }

    pub fn linear(mat: Matrix) -> SemilinearMap {
        SemilinearMap {
            mat,
            twist: Twist::Identity,
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn is_linear(&self) -> bool {
        self.twist == Twist::Identity
    }

    pub fn apply(&self, v: &[Elem], f: &Tower) -> Vector {
        let sv: Vector = v.iter().map(|&x| self.twist.apply(x, f)).collect();
        self.mat.mul_vec(&sv, f)
    }

    /// `self o other`: `(A, s) o (B, r) = (A s(B), s r)`.
    pub fn compose(&self, other: &SemilinearMap, f: &Tower) -> SemilinearMap {
        SemilinearMap {
            mat: self.mat.mul(&self.twist.apply_matrix(&other.mat, f), f),
            twist: self.twist.compose(other.twist),
        }
    }

    pub fn try_compose(&self, other: &SemilinearMap, f: &Tower) -> Result<SemilinearMap> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "compose {} with {}",
                self.dim(),
                other.dim()
            )));
        }
        if !f.is_quadratic() && (self.twist == Twist::Tau || other.twist == Twist::Tau) {
            return Err(Error::WrongTwist);
        }
        Ok(self.compose(other, f))
    }

    pub fn square(&self, f: &Tower) -> SemilinearMap {
        self.compose(self, f)
    }

    pub fn inverse(&self, f: &Tower) -> Result<SemilinearMap> {
        // (A, s)^{-1} = (s(A)^{-1}, s)
        Ok(SemilinearMap {
            mat: self.twist.apply_matrix(&self.mat, f).inverse(f)?,
            twist: self.twist,
        })
    }

    pub fn neg(&self, f: &Tower) -> SemilinearMap {
        SemilinearMap {
            mat: self.mat.neg(f),
            twist: self.twist,
        }
    }

    /// Re-expresses a map given in the coordinates of the columns of `basis`
    /// (square, invertible) in standard coordinates: `B A s(B)^{-1}`.
    pub fn change_basis(&self, basis: &Matrix, f: &Tower) -> Result<SemilinearMap> {
        let back = self.twist.apply_matrix(basis, f).inverse(f)?;
        Ok(SemilinearMap {
            mat: basis.mul(&self.mat, f).mul(&back, f),
            twist: self.twist,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Ext, Level};
    use crate::poly::factorize;
    use proptest::prelude::*;

    fn tower(p: u64, k: usize, ext: Ext) -> Tower {
        Tower::new(p, k, ext, None).unwrap()
    }

    fn poly(f: &Tower, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| f.from_int(x)).collect())
    }

    #[test]
    fn core_examples() {
        let f5 = tower(5, 1, Ext::Trivial);
        assert_eq!(
            Matrix::from_ints(&f5, &[&[0, 1], &[-1, 0]])
                .det(&f5)
                .unwrap(),
            f5.one()
        );
        assert_eq!(Matrix::zeros(2, 2).kernel(&f5).cols(), 2);
        let u = Matrix::from_ints(&f5, &[&[1, 1], &[0, 1]]);
        assert_eq!(
            u.inverse(&f5).unwrap(),
            Matrix::from_ints(&f5, &[&[1, -1], &[0, 1]])
        );
        assert_eq!(
            Matrix::from_ints(&f5, &[&[1, 2], &[2, 4]]).inverse(&f5),
            Err(Error::Singular)
        );
        assert!(matches!(
            Matrix::zeros(2, 3).try_mul(&Matrix::zeros(2, 3), &f5),
            Err(Error::Shape(_))
        ));
        assert!(Matrix::from_ints(&f5, &[&[1, 2], &[2, 4]])
            .solve(&[f5.one(), f5.zero()], &f5)
            .is_none());
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let f7 = tower(7, 1, Ext::Trivial);
        let m = Matrix::from_ints(&f7, &[&[0, 2, 3], &[1, 0, 5], &[4, 6, 0]]);
        // 0*(0-30) - 2*(0-20) + 3*(6-0) = 40 + 18 = 58 = 2 mod 7
        assert_eq!(m.det(&f7).unwrap(), f7.from_int(58));
    }

    #[test]
    fn minimal_polynomial_examples() {
        let f3 = tower(3, 1, Ext::Trivial);
        assert_eq!(
            minimal_polynomial(&Matrix::identity(3, &f3), &f3),
            poly(&f3, &[-1, 1])
        );
        let j = Matrix::from_ints(&f3, &[&[1, 1], &[0, 1]]);
        assert_eq!(minimal_polynomial(&j, &f3), poly(&f3, &[-1, 1]).pow(2, &f3));
        let target = poly(&f3, &[2, 1, 0, 1]);
        assert_eq!(minimal_polynomial(&companion(&target, &f3), &f3), target);
    }

    #[test]
    fn minimal_polynomial_exhaustive_2x2() {
        let f3 = tower(3, 1, Ext::Trivial);
        for idx in 0..81u64 {
            let e: Vec<Elem> = (0..4)
                .map(|i| f3.from_index((idx / 3u64.pow(i)) % 3))
                .collect();
            let g = Matrix::from_rows(vec![e[..2].to_vec(), e[2..].to_vec()]).unwrap();
            let m = minimal_polynomial(&g, &f3);
            assert!(g.eval_poly(&m, &f3).is_zero());
            // No proper monic divisor annihilates g.
            let fac = factorize(&m, &f3, 0).unwrap();
            for (p, _) in &fac.factors {
                let smaller = m.exact_div(p, &f3);
                assert!(!g.eval_poly(&smaller, &f3).is_zero());
            }
        }
    }

    #[test]
    fn krylov_examples() {
        let f3 = tower(3, 1, Ext::Trivial);
        let c = companion(&poly(&f3, &[1, 0, 1]), &f3);
        let (basis, ann) = krylov_basis(&c, &unit_vector(2, 0, &f3), &f3).unwrap();
        assert_eq!(basis, Matrix::identity(2, &f3));
        assert_eq!(ann, poly(&f3, &[1, 0, 1]));
        let d = Matrix::diagonal(&[f3.one(), f3.from_int(2)]);
        assert_eq!(
            annihilator(&d, &unit_vector(2, 1, &f3), &f3).unwrap().deg(),
            1
        );
        assert_eq!(
            krylov_basis(&d, &[f3.zero(), f3.zero()], &f3),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn frobenius_examples() {
        let f5 = tower(5, 1, Ext::Trivial);
        let d = Matrix::diagonal(&[f5.one(), f5.from_int(2), f5.from_int(3)]);
        let ff = frobenius_form(&d, &f5, 0).unwrap();
        assert_eq!(ff.invariants.len(), 1);
        assert_eq!(ff.invariants[0].deg(), 3);
        let id = frobenius_form(&Matrix::identity(2, &f5), &f5, 0).unwrap();
        assert_eq!(id.invariants, vec![poly(&f5, &[-1, 1]); 2]);
    }

    fn check_frobenius(a: &Matrix, f: &Tower) {
        let ff = frobenius_form(a, f, 3).unwrap();
        let p = &ff.basis_change;
        assert_eq!(a.mul(p, f), p.mul(&ff.block_matrix(f), f));
        assert_eq!(p.rank(f), a.rows());
        for w in ff.invariants.windows(2) {
            assert!(w[1].rem(&w[0], f).is_zero());
        }
        let total: usize = ff.invariants.iter().map(Poly::deg).sum();
        assert_eq!(total, a.rows());
    }

    #[test]
    fn semilinear_examples() {
        let f9 = tower(3, 1, Ext::Quadratic);
        let w = f9.generator().unwrap();
        let h = SemilinearMap::new(Matrix::scalar(2, w), Twist::Tau);
        let sq = h.square(&f9);
        assert_eq!(sq, SemilinearMap::linear(Matrix::scalar(2, f9.norm(w))));
        let a = Matrix::from_ints(&f9, &[&[0, 1], &[1, 0]]);
        let inv = SemilinearMap::new(a.clone(), Twist::Tau);
        assert_eq!(
            inv.square(&f9),
            SemilinearMap::linear(Matrix::identity(2, &f9))
        );
        let b = Matrix::from_ints(&f9, &[&[1, 1], &[0, 1]]);
        let lin = SemilinearMap::linear(a.clone()).compose(&SemilinearMap::linear(b.clone()), &f9);
        assert_eq!(lin, SemilinearMap::linear(a.mul(&b, &f9)));
        // Semilinearity: h(lambda v) = tau(lambda) h(v).
        let v = vec![w, f9.one()];
        for lambda in f9.elements(Level::Top) {
            let lv = vec_scale(&v, lambda, &f9);
            assert_eq!(
                h.apply(&lv, &f9),
                vec_scale(&h.apply(&v, &f9), f9.tau(lambda), &f9)
            );
        }
        let f3 = tower(3, 1, Ext::Trivial);
        let t = SemilinearMap::new(Matrix::identity(2, &f3), Twist::Tau);
        assert_eq!(t.try_compose(&t, &f3), Err(Error::WrongTwist));
    }

    fn arb_matrix(n: usize, q: u64) -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0..q, n * n)
    }

    fn build(f: &Tower, n: usize, e: &[u64]) -> Matrix {
        Matrix::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| f.from_index(e[i * n + j])).collect())
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn frobenius_reconstructs(e in arb_matrix(4, 3)) {
            let f = tower(3, 1, Ext::Trivial);
            check_frobenius(&build(&f, 4, &e), &f);
        }

        #[test]
        fn frobenius_reconstructs_f4(e in arb_matrix(5, 4)) {
            let f = tower(2, 2, Ext::Trivial);
            check_frobenius(&build(&f, 5, &e), &f);
        }

        #[test]
        fn frobenius_handles_scalar_blocks(d in prop::collection::vec(0u64..2, 4)) {
            let f = tower(2, 1, Ext::Trivial);
            let a = Matrix::diagonal(&d.iter().map(|&x| f.from_index(x)).collect::<Vec<_>>());
            check_frobenius(&a, &f);
        }

        #[test]
        fn annihilator_divides_minpoly(e in arb_matrix(3, 5), v in prop::collection::vec(0u64..5, 3)) {
            let f = tower(5, 1, Ext::Trivial);
            let g = build(&f, 3, &e);
            let v: Vector = v.iter().map(|&x| f.from_index(x)).collect();
            prop_assume!(!is_zero_vec(&v));
            let ann = annihilator(&g, &v, &f).unwrap();
            prop_assert!(minimal_polynomial(&g, &f).rem(&ann, &f).is_zero());
        }

        #[test]
        fn compose_is_associative(a in arb_matrix(2, 9), b in arb_matrix(2, 9), c in arb_matrix(2, 9), t in 0u8..8) {
            let f = tower(3, 1, Ext::Quadratic);
            let tw = |bit: u8| if t & bit != 0 { Twist::Tau } else { Twist::Identity };
            let x = SemilinearMap::new(build(&f, 2, &a), tw(1));
            let y = SemilinearMap::new(build(&f, 2, &b), tw(2));
            let z = SemilinearMap::new(build(&f, 2, &c), tw(4));
            prop_assert_eq!(x.compose(&y, &f).compose(&z, &f), x.compose(&y.compose(&z, &f), &f));
        }

        #[test]
        fn det_is_multiplicative(a in arb_matrix(3, 7), b in arb_matrix(3, 7)) {
            let f = tower(7, 1, Ext::Trivial);
            let (x, y) = (build(&f, 3, &a), build(&f, 3, &b));
            prop_assert_eq!(x.mul(&y, &f).det(&f).unwrap(), f.mul(x.det(&f).unwrap(), y.det(&f).unwrap()));
            let invertible = !x.det(&f).unwrap().is_zero();
            prop_assert_eq!(x.inverse(&f).is_ok(), invertible);
        }
    }
}
