//! Epsilon-hermitian spaces `<x, y> = x^T J tau(y)`, similitudes, anti-unitary
//! maps, standard spaces and group-element generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Level, Tower};
use crate::linalg::{is_zero_vec, Matrix, SemilinearMap, Twist, Vector};

/// Default cap on raw candidate matrices for brute-force enumeration.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Symplectic,
    OrthogonalPlus,
    OrthogonalMinus,
    Hermitian,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Symplectic => "sp",
            Kind::OrthogonalPlus => "go-plus",
            Kind::OrthogonalMinus => "go-minus",
            Kind::Hermitian => "u",
        }
    }

    pub fn parse(s: &str) -> Result<Kind> {
        match s {
            "sp" | "gsp" | "symplectic" => Ok(Kind::Symplectic),
            "go-plus" | "o-plus" | "orthogonal-plus" => Ok(Kind::OrthogonalPlus),
            "go-minus" | "o-minus" | "orthogonal-minus" => Ok(Kind::OrthogonalMinus),
            "u" | "gu" | "hermitian" | "unitary" => Ok(Kind::Hermitian),
            other => Err(Error::InvalidInput(format!("unknown group kind {other:?}"))),
        }
    }

    pub fn is_orthogonal(self) -> bool {
        matches!(self, Kind::OrthogonalPlus | Kind::OrthogonalMinus)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianSpace {
    tower: Tower,
    epsilon: i8,
    gram: Matrix,
}

impl HermitianSpace {
    pub fn new(tower: Tower, epsilon: i8, gram: Matrix) -> Result<HermitianSpace> {
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::InvalidForm(format!(
                "epsilon must be +1 or -1, got {epsilon}"
            )));
        }
        if !gram.is_square() {
            return Err(Error::InvalidForm(format!(
                "Gram matrix is {}x{}",
                gram.rows(),
                gram.cols()
            )));
        }
        let f = &tower;
        if gram.to_rows().iter().flatten().any(|&a| !f.contains(a)) {
            return Err(Error::MixedField("Gram entry outside the field".into()));
        }
        let eps = f.from_int(epsilon.into());
        if gram.transpose() != gram.tau(f).scale(eps, f) {
            return Err(Error::InvalidForm(
                "Gram matrix is not epsilon-hermitian".into(),
            ));
        }
        if gram.det(f)?.is_zero() {
            return Err(Error::InvalidForm("Gram matrix is singular".into()));
        }
        if !f.is_quadratic() && f.p() == 2 && (0..gram.rows()).any(|i| !gram.get(i, i).is_zero()) {
            return Err(Error::InvalidForm(
                "characteristic 2 forms must be alternating".into(),
            ));
        }
        Ok(HermitianSpace {
            tower,
            epsilon,
            gram,
        })
    }

    /// The standard space of the given kind and dimension.
    pub fn standard(tower: &Tower, n: usize, kind: Kind) -> Result<HermitianSpace> {
        let f = tower;
        let incompatible =
            |why: &str| Err(Error::IncompatibleKind(format!("{}: {why}", kind.name())));
        if n == 0 {
            return incompatible("dimension must be positive");
        }
        match kind {
            Kind::Hermitian => {
                if !f.is_quadratic() {
                    return incompatible("needs a quadratic extension");
                }
                HermitianSpace::new(f.clone(), 1, Matrix::identity(n, f))
            }
            _ if f.is_quadratic() => incompatible("needs a trivial extension"),
            _ if n % 2 == 1 => incompatible("dimension must be even"),
            Kind::Symplectic => {
                HermitianSpace::new(f.clone(), -1, hyperbolic(n / 2, f.from_int(-1), f))
            }
            _ if f.p() == 2 => incompatible("characteristic 2 is excluded"),
            Kind::OrthogonalPlus => {
                HermitianSpace::new(f.clone(), 1, hyperbolic(n / 2, f.one(), f))
            }
            Kind::OrthogonalMinus => {
                let delta = f.least_nonsquare().expect("odd q has non-squares");
                let aniso = Matrix::diagonal(&[f.one(), f.neg(delta)]);
                let gram = Matrix::block_diag(&[hyperbolic(n / 2 - 1, f.one(), f), aniso]);
                HermitianSpace::new(f.clone(), 1, gram)
            }
        }
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn n(&self) -> usize {
        self.gram.rows()
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    pub fn eps(&self) -> Elem {
        self.tower.from_int(self.epsilon.into())
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn twist(&self) -> Twist {
        Twist::anti_unitary(&self.tower)
    }

    /// The standard kind whose Gram matrix this space uses verbatim, if any.
    pub fn kind(&self) -> Option<Kind> {
        [
            Kind::Symplectic,
            Kind::OrthogonalPlus,
            Kind::OrthogonalMinus,
            Kind::Hermitian,
        ]
        .into_iter()
        .find(|&k| HermitianSpace::standard(&self.tower, self.n(), k).is_ok_and(|s| s == *self))
    }

    pub fn form(&self, x: &[Elem], y: &[Elem]) -> Elem {
        let f = &self.tower;
        let jy = self
            .gram
            .mul_vec(&y.iter().map(|&a| f.tau(a)).collect::<Vec<_>>(), f);
        x.iter()
            .zip(&jy)
            .fold(f.zero(), |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    /// Gram matrix `B^T J tau(B)` of the columns of `basis`.
    pub fn gram_of(&self, basis: &Matrix) -> Matrix {
        let f = &self.tower;
        basis.transpose().mul(&self.gram, f).mul(&basis.tau(f), f)
    }

    /// Cross Gram matrix `[<a_i, b_j>]`.
    pub fn pairing(&self, a: &Matrix, b: &Matrix) -> Matrix {
        let f = &self.tower;
        a.transpose().mul(&self.gram, f).mul(&b.tau(f), f)
    }

    /// The scalar `beta` with `g^T J tau(g) = beta J`, if `g` is a similitude.
    pub fn multiplier(&self, g: &Matrix) -> Option<Elem> {
        if g.rows() != self.n() || g.cols() != self.n() {
            return None;
        }
        let f = &self.tower;
        let m = self.gram_of(g);
        let beta = scalar_ratio(&m, &self.gram, f)?;
        (f.contains_base(beta) && !beta.is_zero()).then_some(beta)
    }

    /// The ratio `beta` with `<hv, hv'> = beta <v', v>`, i.e.
    /// `A^T J tau(A) = beta eps tau(J)`.
    pub fn anti_unitary_ratio(&self, h: &SemilinearMap) -> Result<Option<Elem>> {
        if h.twist != self.twist() {
            return Err(Error::WrongTwist);
        }
        if h.mat.rows() != self.n() || h.mat.cols() != self.n() {
            return Err(Error::Shape(format!(
                "map of size {} on a space of dimension {}",
                h.dim(),
                self.n()
            )));
        }
        let f = &self.tower;
        let m = self.gram_of(&h.mat);
        Ok(scalar_ratio(&m, &self.gram.transpose(), f)
            .filter(|b| f.contains_base(*b) && !b.is_zero()))
    }

    /// Basis (as columns) of `{v : <w, v> = 0 for all w in W}`.
    pub fn orthogonal_complement(&self, basis: &Matrix) -> Result<Matrix> {
        let f = &self.tower;
        if basis.rows() != self.n() {
            return Err(Error::Shape("basis vectors have the wrong length".into()));
        }
        if basis.rank(f) != basis.cols() {
            return Err(Error::DependentBasis);
        }
        // <w, v> = 0 iff tau(w^T J) v = 0
        let rows = basis.transpose().mul(&self.gram, f).tau(f);
        let perp = rows.kernel(f);
        if !self.gram_of(basis).det(f)?.is_zero()
            && (perp.cols() + basis.cols() != self.n() || basis.hstack(&perp).rank(f) != self.n())
        {
            return Err(Error::invariant(
                "V = W + W-perp for non-degenerate W",
                "complement",
            ));
        }
        Ok(perp)
    }

    /// The space carried by the columns of `basis` with the restricted form.
    pub fn restrict(&self, basis: &Matrix) -> Result<HermitianSpace> {
        let f = &self.tower;
        if basis.rows() != self.n() {
            return Err(Error::Shape("basis vectors have the wrong length".into()));
        }
        let gram = self.gram_of(basis);
        if gram.det(f)?.is_zero() {
            return Err(Error::DegenerateRestriction);
        }
        HermitianSpace::new(self.tower.clone(), self.epsilon, gram)
    }

    /// A similitude with multiplier `beta`: a scalar when `beta` is a norm,
    /// otherwise a dilation adapted to the standard Gram matrices.
    pub fn dilation(&self, beta: Elem) -> Result<Matrix> {
        let f = &self.tower;
        let n = self.n();
        let unattainable =
            || Error::UnattainableMultiplier(format!("{:?}", f.encode(beta, Level::Base)));
        if beta.is_zero() || !f.contains_base(beta) {
            return Err(unattainable());
        }
        if let Some(lambda) = norm_root(beta, f) {
            return Ok(Matrix::scalar(n, lambda));
        }
        match self.kind() {
            Some(Kind::Symplectic | Kind::OrthogonalPlus) => {
                Ok(hyperbolic_dilation(n / 2, beta, f))
            }
            Some(Kind::OrthogonalMinus) => {
                let delta = f.least_nonsquare().expect("odd q");
                let (a, b) = f
                    .elements(Level::Base)
                    .find_map(|b| {
                        let a2 = f.add(beta, f.mul(delta, f.square(b)));
                        f.sqrt(a2).map(|a| (a, b))
                    })
                    .ok_or_else(unattainable)?;
                let aniso = Matrix::from_rows(vec![vec![a, f.mul(delta, b)], vec![b, a]])?;
                Ok(Matrix::block_diag(&[
                    hyperbolic_dilation(n / 2 - 1, beta, f),
                    aniso,
                ]))
            }
            _ => Err(unattainable()),
        }
    }

    /// A random isometry `x -> x + c <x, v> v`; `None` when `v` admits no
    /// nontrivial coefficient.
    fn random_generator(&self, rng: &mut ChaCha8Rng) -> Option<Matrix> {
        let f = &self.tower;
        let n = self.n();
        let v: Vector = (0..n)
            .map(|_| f.from_index(rng.gen_range(0..f.size())))
            .collect();
        if is_zero_vec(&v) {
            return None;
        }
        let norm = self.form(&v, &v);
        let eps = self.eps();
        let z = f.from_index(rng.gen_range(1..f.size()));
        let c = if f.is_quadratic() {
            if norm.is_zero() {
                f.sub(z, f.mul(eps, f.tau(z)))
            } else if self.epsilon == 1 {
                let zeta = f.div(z, f.tau(z)).ok()?;
                f.div(f.sub(zeta, f.one()), norm).ok()?
            } else {
                return None;
            }
        } else {
            let one_eps = f.add(f.one(), eps);
            if one_eps.is_zero() {
                z
            } else {
                f.div(f.neg(one_eps), norm).ok()?
            }
        };
        if c.is_zero() {
            return None;
        }
        let jv = self
            .gram
            .mul_vec(&v.iter().map(|&a| f.tau(a)).collect::<Vec<_>>(), f);
        let outer = Matrix::from_cols(n, &[v]).mul(&Matrix::from_rows(vec![jv]).ok()?, f);
        Some(Matrix::identity(n, f).add(&outer.scale(c, f), f))
    }

    /// `count` seeded similitudes with multiplier `beta`, produced by a random
    /// walk over transvections and reflections followed by a fixed dilation.
    pub fn group_sample(&self, beta: Elem, count: usize, seed: u64) -> Result<Vec<GroupElement>> {
        let f = &self.tower;
        let n = self.n();
        let dil = self.dilation(beta)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let steps = 4 * n + 4;
        let mut walk = Matrix::identity(n, f);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut taken = 0;
            let mut attempts = 0;
            while taken < steps {
                attempts += 1;
                if attempts > 1000 * steps {
                    return Err(Error::SearchFailed("isometry generators".into()));
                }
                if let Some(r) = self.random_generator(&mut rng) {
                    walk = walk.mul(&r, f);
                    taken += 1;
                }
            }
            let g = walk.mul(&dil, f);
            match self.multiplier(&g) {
                Some(b) if b == beta => out.push(GroupElement { g, beta }),
                _ => {
                    return Err(Error::invariant(
                        "sampled element is a similitude",
                        "multiplier",
                    ))
                }
            }
        }
        Ok(out)
    }

    /// All similitudes with multiplier `beta`, in lexicographic column order.
    pub fn group_enumerate(&self, beta: Elem, budget: u64) -> Result<Vec<GroupElement>> {
        let f = &self.tower;
        if beta.is_zero() || !f.contains_base(beta) {
            self.check_budget(budget)?;
            return Ok(Vec::new());
        }
        let target = self.gram.scale(beta, f);
        Ok(self
            .matrices_with_gram(&target, budget)?
            .into_iter()
            .map(|g| GroupElement { g, beta })
            .collect())
    }

    fn check_budget(&self, budget: u64) -> Result<()> {
        let n = self.n();
        let candidates = (self.tower.size() as u128)
            .checked_pow((n * n) as u32)
            .unwrap_or(u128::MAX);
        if candidates > budget as u128 {
            return Err(Error::BudgetExceeded { candidates, budget });
        }
        Ok(())
    }

    /// Every `M` with `M^T J tau(M) = target`, in lexicographic column order.
    pub fn matrices_with_gram(&self, target: &Matrix, budget: u64) -> Result<Vec<Matrix>> {
        let f = &self.tower;
        let n = self.n();
        self.check_budget(budget)?;
        if target.rows() != n || target.cols() != n {
            return Err(Error::Shape("target Gram matrix".into()));
        }
        let vectors: Vec<Vector> = all_vectors(n, f);
        let mut out = Vec::new();
        let mut cols: Vec<usize> = Vec::with_capacity(n);
        // Backtrack column by column: <M e_j, M e_k> = target_jk.
        fn extend(
            space: &HermitianSpace,
            vectors: &[Vector],
            target: &Matrix,
            cols: &mut Vec<usize>,
            out: &mut Vec<Matrix>,
        ) {
            let n = space.n();
            let j = cols.len();
            if j == n {
                let chosen: Vec<Vector> = cols.iter().map(|&i| vectors[i].clone()).collect();
                out.push(Matrix::from_cols(n, &chosen));
                return;
            }
            for (idx, v) in vectors.iter().enumerate() {
                let fits = (0..=j).all(|k| {
                    let w = if k == j { v } else { &vectors[cols[k]] };
                    space.form(v, w) == target.get(j, k) && space.form(w, v) == target.get(k, j)
                });
                if fits {
                    cols.push(idx);
                    extend(space, vectors, target, cols, out);
                    cols.pop();
                }
            }
        }
        extend(self, &vectors, target, &mut cols, &mut out);
        Ok(out)
    }
}

/// Every vector of `E^n` in index order (first coordinate least significant).
pub fn all_vectors(n: usize, f: &Tower) -> Vec<Vector> {
    let size = f.size();
    let total = size.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let c = f.from_index(idx % size);
                    idx /= size;
                    c
                })
                .collect()
        })
        .collect()
}

/// `[[0, eps I], [I, 0]]` with `m x m` blocks.
fn hyperbolic(m: usize, eps: Elem, f: &Tower) -> Matrix {
    let mut j = Matrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        j.set(i, m + i, eps);
        j.set(m + i, i, f.one());
    }
    j
}

fn hyperbolic_dilation(m: usize, beta: Elem, f: &Tower) -> Matrix {
    let mut entries = vec![beta; m];
    entries.extend(std::iter::repeat_n(f.one(), m));
    Matrix::diagonal(&entries)
}

/// `lambda` with `lambda tau(lambda) = beta`, if one exists.
pub fn norm_root(beta: Elem, f: &Tower) -> Option<Elem> {
    if f.is_quadratic() {
        f.elements(Level::Top).find(|&l| f.norm(l) == beta)
    } else {
        f.sqrt(beta)
    }
}

/// `beta` with `m = beta * base`, if one exists (`base` nonzero).
fn scalar_ratio(m: &Matrix, base: &Matrix, f: &Tower) -> Option<Elem> {
    let (i, j) = (0..base.rows())
        .flat_map(|i| (0..base.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| !base.get(i, j).is_zero())?;
    let beta = f.div(m.get(i, j), base.get(i, j)).ok()?;
    (*m == base.scale(beta, f)).then_some(beta)
}

/// A similitude together with its multiplier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub g: Matrix,
    pub beta: Elem,
}

impl GroupElement {
    pub fn new(space: &HermitianSpace, g: Matrix) -> Result<GroupElement> {
        let beta = space.multiplier(&g).ok_or(Error::NotSimilitude)?;
        Ok(GroupElement { g, beta })
    }
}
