//! Factorization `g = h1 h2` into an anti-unitary involution and an
//! anti-unitary similitude squaring to the multiplier, plus the conjugator
//! witnesses built from it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomp::{
    pair_blocks, primary_decomposition, restrict_endomorphism, Block, BlockVariant,
};
use crate::error::{Error, Result};
use crate::field::{Elem, Tower};
use crate::forms::{GroupElement, HermitianSpace};
use crate::linalg::{
    annihilator, candidate_vectors, companion, frobenius_form, krylov_basis, minimal_polynomial,
    unit_vector, vec_scale, Matrix, SemilinearMap, Twist, Vector,
};
use crate::poly::{gcd, laurent_tau, Poly};
use crate::verify::verify_certificate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct FactorOptions {
    /// Drives polynomial factorization and the random tail of vector searches.
    pub seed: u64,
}

/// The `+1` and `-1` eigenspaces of `h1` on one piece, spanned by the vectors
/// `(g^i + beta^i g^-i) v` and `(g^i - beta^i g^-i) v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigenspaces {
    pub plus: Matrix,
    pub minus: Matrix,
}

/// One step of the construction. Vectors and bases are in ambient coordinates;
/// the small matrices (`a`, `d1`, `s1`, ...) are in the basis recorded next to
/// them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Record {
    Scale {
        root: Elem,
    },
    CaseOne {
        poly: Poly,
        partner: Poly,
        exponent: usize,
        e_basis: Matrix,
        f_basis: Matrix,
        a: Matrix,
        d1: Matrix,
        d2: Matrix,
        s1: Matrix,
        s2: Matrix,
        c: SemilinearMap,
    },
    CaseTwoA {
        poly: Poly,
        exponent: usize,
        v: Vector,
        krylov: Matrix,
        eigen: Option<Eigenspaces>,
    },
    CaseTwoB {
        poly: Poly,
        exponent: usize,
        x: Vector,
        y: Vector,
        gamma: Poly,
        system: Matrix,
        rhs: Vector,
        /// `delta` with `y` replaced by `delta(g) y` to make `gamma` constant.
        normalized_by: Option<Poly>,
        eigen: Option<Eigenspaces>,
    },
    Recursion {
        poly: Poly,
        exponent: usize,
        w: Matrix,
        complement: Matrix,
    },
    Flip {
        piece: usize,
        dim: usize,
    },
}

impl Record {
    pub fn label(&self) -> &'static str {
        match self {
            Record::Scale { .. } => "scale",
            Record::CaseOne { .. } => "I",
            Record::CaseTwoA { .. } => "II-A",
            Record::CaseTwoB { .. } => "II-B",
            Record::Recursion { .. } => "recursion",
            Record::Flip { .. } => "flip",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationCertificate {
    pub h1: SemilinearMap,
    pub h2: SemilinearMap,
    pub beta: Elem,
    pub refined: bool,
    pub transcript: Vec<Record>,
}

impl FactorizationCertificate {
    pub fn labels(&self) -> Vec<&'static str> {
        self.transcript.iter().map(Record::label).collect()
    }
}

// ---------------------------------------------------------------------------
// Symmetric conjugators

/// Symmetric Hankel matrix `H` with `H C = C^T H` for the column companion
/// `C` of `poly`.
fn hankel(poly: &Poly, f: &Tower) -> Matrix {
    let m = poly.deg();
    let mut h = vec![f.zero(); 2 * m.max(1) - 1];
    if m == 0 {
        return Matrix::zeros(0, 0);
    }
    h[m - 1] = f.one();
    for k in m..2 * m - 1 {
        let mut acc = f.zero();
        for j in 0..m {
            // poly = T^m - sum c_j T^j
            acc = f.add(acc, f.mul(f.neg(poly.coeff(j)), h[k - m + j]));
        }
        h[k] = acc;
    }
    let mut out = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            out.set(i, j, h[i + j]);
        }
    }
    out
}

fn conjugates_to_transpose(a: &Matrix, d: &Matrix, f: &Tower) -> bool {
    d.is_symmetric()
        && a.mul(d, f) == d.mul(&a.transpose(), f)
        && d.det(f).is_ok_and(|x| !x.is_zero())
}

/// Solves `{d = d^T, a d = d a^T}` and returns a nonsingular solution.
fn symmetric_conjugator_by_solving(a: &Matrix, f: &Tower, seed: u64) -> Result<Matrix> {
    let n = a.rows();
    let unknowns: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let unit = |&(i, j): &(usize, usize)| {
        let mut d = Matrix::zeros(n, n);
        d.set(i, j, f.one());
        d.set(j, i, f.one());
        d
    };
    let mut system = Matrix::zeros(n * n, unknowns.len());
    for (u, idx) in unknowns.iter().enumerate() {
        let d = unit(idx);
        let r = a.mul(&d, f).sub(&d.mul(&a.transpose(), f), f);
        for k in 0..n * n {
            system.set(k, u, r.get(k / n, k % n));
        }
    }
    let kernel = system.kernel(f);
    let build = |coeffs: &[Elem]| {
        unknowns
            .iter()
            .zip(coeffs)
            .fold(Matrix::zeros(n, n), |acc, (idx, &c)| {
                acc.add(&unit(idx).scale(c, f), f)
            })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sols = kernel.col_vectors();
    let tries = sols.iter().cloned().chain((0..512).map(|_| {
        sols.iter().fold(vec![f.zero(); unknowns.len()], |acc, s| {
            let c = f.from_index(rng.gen_range(0..f.size()));
            acc.iter()
                .zip(s)
                .map(|(&x, &y)| f.add(x, f.mul(c, y)))
                .collect()
        })
    }));
    for coeffs in tries {
        let d = build(&coeffs);
        if conjugates_to_transpose(a, &d, f) {
            return Ok(d);
        }
    }
    Err(Error::SearchFailed(
        "a nonsingular symmetric conjugator".into(),
    ))
}

/// A symmetric invertible `d` with `d^-1 a d = a^T`.
pub fn symmetric_conjugator(a: &Matrix, f: &Tower) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Shape(
            "symmetric conjugator of a non-square matrix".into(),
        ));
    }
    let n = a.rows();
    if a.is_symmetric() {
        return Ok(Matrix::identity(n, f));
    }
    let ff = frobenius_form(a, f, 0)?;
    let mut blocks = Vec::with_capacity(ff.invariants.len());
    for inv in &ff.invariants {
        let c = companion(inv, f);
        let h = hankel(inv, f);
        let d = match h.inverse(f) {
            Ok(hinv) if conjugates_to_transpose(&c, &hinv, f) => hinv,
            _ => symmetric_conjugator_by_solving(&c, f, 0)?,
        };
        blocks.push(d);
    }
    let p = &ff.basis_change;
    let d = p
        .mul(&Matrix::block_diag(&blocks), f)
        .mul(&p.transpose(), f);
    if conjugates_to_transpose(a, &d, f) {
        Ok(d)
    } else {
        symmetric_conjugator_by_solving(a, f, 1)
    }
}

/// `a = d1 d2` with both factors symmetric and invertible.
pub fn symmetric_factor(a: &Matrix, f: &Tower) -> Result<(Matrix, Matrix)> {
    a.inverse(f)?;
    let d1 = symmetric_conjugator(a, f)?;
    let d2 = d1.inverse(f)?.mul(a, f);
    if !d2.is_symmetric() {
        return Err(Error::invariant("d^-1 a is symmetric", "second factor"));
    }
    Ok((d1, d2))
}

// ---------------------------------------------------------------------------
// Pieces

/// Local maps on the span of `basis` (ambient columns): `h(B x) = B a sigma(x)`.
#[derive(Clone, Debug)]
struct Piece {
    basis: Matrix,
    a1: Matrix,
    a2: Matrix,
}

struct Ctx<'a> {
    opts: &'a FactorOptions,
    refined: bool,
    records: Vec<Record>,
}

fn twist_of(space: &HermitianSpace) -> Twist {
    space.twist()
}

fn check_local_maps(
    space: &HermitianSpace,
    a1: &Matrix,
    a2: &Matrix,
    g: &Matrix,
    beta: Elem,
    what: &'static str,
) -> Result<()> {
    let f = space.tower();
    let tw = twist_of(space);
    let h1 = SemilinearMap::new(a1.clone(), tw);
    let h2 = SemilinearMap::new(a2.clone(), tw);
    let n = space.n();
    if space.anti_unitary_ratio(&h1)? != Some(f.one()) {
        return Err(Error::invariant(what, "h1 is not anti-unitary"));
    }
    if h1.square(f).mat != Matrix::identity(n, f) {
        return Err(Error::invariant(what, "h1 is not an involution"));
    }
    if space.anti_unitary_ratio(&h2)? != Some(beta) {
        return Err(Error::invariant(what, "h2 has the wrong ratio"));
    }
    if h2.square(f).mat != Matrix::scalar(n, beta) {
        return Err(Error::invariant(what, "h2 does not square to beta"));
    }
    let prod = h1.compose(&h2, f);
    if !prod.is_linear() || prod.mat != *g {
        return Err(Error::invariant(what, "h1 h2 differs from g"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Case I

pub fn case_one_factor(block: &Block, f: &Tower) -> Result<(Matrix, Matrix, Matrix, Record)> {
    if block.variant != BlockVariant::Paired {
        return Err(Error::InvalidInput("Case I needs a paired block".into()));
    }
    let space = &block.space;
    let n = space.n();
    let h = block.half;
    let eps = space.eps();
    let beta = block.g.beta;
    let tw = twist_of(space);
    let ident = Matrix::identity(n, f);
    let e = ident.select_cols(0..h);
    let c = ident.select_cols(h..n);
    // dual basis: <e_i, f_j> = delta_ij
    let x = space.pairing(&e, &c).inverse(f)?.tau(f);
    let fb = c.mul(&x, f);
    let basis = e.hstack(&fb);
    let mut expected = Matrix::zeros(n, n);
    expected.set_block(0, h, &Matrix::identity(h, f));
    expected.set_block(h, 0, &Matrix::scalar(h, eps));
    if space.gram_of(&basis) != expected {
        return Err(Error::invariant(
            "dual bases give the hyperbolic Gram matrix",
            "Case I",
        ));
    }
    let gb = basis.inverse(f)?.mul(&block.g.g, f).mul(&basis, f);
    let a = gb.block(0..h, 0..h);
    let b = gb.block(h..n, h..n);
    let b_expected = a.tau(f).transpose().inverse(f)?.scale(beta, f);
    if !gb.block(0..h, h..n).is_zero() || !gb.block(h..n, 0..h).is_zero() || b != b_expected {
        return Err(Error::invariant(
            "g acts as diag(a, beta tau(a)^-T)",
            "Case I",
        ));
    }
    let (d1, d2) = symmetric_factor(&a, f)?;
    let tinv = |d: &Matrix| -> Result<Matrix> { d.tau(f).transpose().inverse(f) };
    let mut s1 = Matrix::zeros(n, n);
    s1.set_block(0, h, &d1);
    s1.set_block(h, 0, &tinv(&d1)?.scale(eps, f));
    let mut s2 = Matrix::zeros(n, n);
    s2.set_block(0, h, &tinv(&d2)?.scale(f.mul(eps, beta), f));
    s2.set_block(h, 0, &d2);
    let mut cdiag = vec![eps; h];
    cdiag.extend(std::iter::repeat_n(f.one(), h));
    let cmap = SemilinearMap::new(Matrix::diagonal(&cdiag), tw);
    let h1 = SemilinearMap::linear(s1.clone()).compose(&cmap, f);
    let h2 = cmap.compose(&SemilinearMap::linear(s2.clone()), f);
    let local = space.restrict(&basis)?;
    check_local_maps(&local, &h1.mat, &h2.mat, &gb, beta, "Case I factors")?;
    let record = Record::CaseOne {
        poly: block.poly.clone(),
        partner: block.partner.clone(),
        exponent: block.exponent,
        e_basis: e,
        f_basis: fb,
        a,
        d1,
        d2,
        s1,
        s2,
        c: cmap,
    };
    Ok((basis, h1.mat, h2.mat, record))
}

// ---------------------------------------------------------------------------
// Case II

fn full_power(p: &Poly, e: usize, f: &Tower) -> Poly {
    p.pow(e, f)
}

/// Is `A v` non-degenerate? Tests `<p(g)^{e-1} g^i v, v> != 0` over Krylov
/// monomials.
fn generates_nondegenerate(
    space: &HermitianSpace,
    g: &Matrix,
    p: &Poly,
    e: usize,
    v: &[Elem],
) -> bool {
    let f = space.tower();
    let d = p.deg() * e;
    let mut w = g.apply_poly(&p.pow(e - 1, f), v, f);
    for _ in 0..d {
        if !space.form(&w, v).is_zero() {
            return true;
        }
        w = g.mul_vec(&w, f);
    }
    false
}

fn is_full(g: &Matrix, v: &[Elem], target: &Poly, f: &Tower) -> bool {
    annihilator(g, v, f).is_ok_and(|a| a == *target)
}

pub fn nondeg_cyclic_search(
    space: &HermitianSpace,
    g: &Matrix,
    p: &Poly,
    e: usize,
    seed: u64,
) -> Option<(Vector, Poly)> {
    let f = space.tower();
    let target = full_power(p, e, f);
    candidate_vectors(space.n(), f, seed)
        .find(|v| is_full(g, v, &target, f) && generates_nondegenerate(space, g, p, e, v))
        .map(|v| (v, target))
}

/// Krylov matrix whose column `i` is `beta^i g_K^{-i} e_0`: the Laurent
/// involution `T -> beta T^-1` written in Krylov coordinates.
fn laurent_matrix(gk: &Matrix, beta: Elem, f: &Tower) -> Result<Matrix> {
    let d = gk.rows();
    let ginv = gk.inverse(f)?;
    let mut cols = Vec::with_capacity(d);
    let mut col = unit_vector(d, 0, f);
    let mut scale = f.one();
    for _ in 0..d {
        cols.push(vec_scale(&col, scale, f));
        col = ginv.mul_vec(&col, f);
        scale = f.mul(scale, beta);
    }
    Ok(Matrix::from_cols(d, &cols))
}

/// Independent columns among `vectors`, in order.
fn span_basis(n: usize, vectors: &[Vector], f: &Tower) -> Matrix {
    let mut kept: Vec<Vector> = Vec::new();
    for v in vectors {
        let mut trial = kept.clone();
        trial.push(v.clone());
        if Matrix::from_cols(n, &trial).rank(f) == trial.len() {
            kept = trial;
        }
    }
    Matrix::from_cols(n, &kept)
}

/// Spans of `(g^i + s beta^i g^-i) e_0` in Krylov coordinates, `s = +1` for
/// `0 <= i <= d/2` and `s = -1` for `0 < i <= d/2`.
fn eigen_spans(gk: &Matrix, beta: Elem, f: &Tower) -> Result<(Vec<Vector>, Vec<Vector>)> {
    let d = gk.rows();
    let ginv = gk.inverse(f)?;
    let e0 = unit_vector(d, 0, f);
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    let (mut fwd, mut back, mut scale) = (e0.clone(), e0, f.one());
    for i in 0..=d / 2 {
        let b = vec_scale(&back, scale, f);
        plus.push(fwd.iter().zip(&b).map(|(&x, &y)| f.add(x, y)).collect());
        if i > 0 {
            minus.push(fwd.iter().zip(&b).map(|(&x, &y)| f.sub(x, y)).collect());
        }
        fwd = gk.mul_vec(&fwd, f);
        back = ginv.mul_vec(&back, f);
        scale = f.mul(scale, beta);
    }
    Ok((plus, minus))
}

fn check_eigen(a1: &Matrix, plus: &Matrix, minus: &Matrix, f: &Tower) -> Result<()> {
    let n = a1.rows();
    if a1.mul(plus, f) != *plus || a1.mul(minus, f) != minus.neg(f) {
        return Err(Error::invariant("h1 fixes P and negates Q", "eigenspaces"));
    }
    if plus.cols() + minus.cols() != n || plus.hstack(minus).rank(f) != n {
        return Err(Error::invariant("V = P + Q", "eigenspaces"));
    }
    Ok(())
}

pub struct CaseTwoA {
    pub krylov: Matrix,
    pub a1: Matrix,
    pub a2: Matrix,
}

pub fn case_two_a_factor(space: &HermitianSpace, g: &GroupElement, v: &[Elem]) -> Result<CaseTwoA> {
    let f = space.tower();
    let tw = twist_of(space);
    let (krylov, ann) = krylov_basis(&g.g, v, f)?;
    let d = krylov.cols();
    let local = space
        .restrict(&krylov)
        .map_err(|_| Error::invariant("A v is non-degenerate", "Case II-A"))?;
    let gk = companion(&ann, f);
    let m = laurent_matrix(&gk, g.beta, f)?;
    let t = SemilinearMap::new(m.clone(), tw);
    // t a(g) = tau*(a)(g) t on monomials
    let ginv = gk.inverse(f)?;
    let mut gi = Matrix::identity(d, f);
    let mut back = Matrix::identity(d, f);
    for _ in 0..d {
        let lhs = t.compose(&SemilinearMap::linear(gi.clone()), f);
        let rhs = SemilinearMap::linear(back.clone()).compose(&t, f);
        if lhs != rhs {
            return Err(Error::invariant("t a = tau(a) t", "Case II-A"));
        }
        gi = gi.mul(&gk, f);
        back = back.mul(&ginv, f).scale(g.beta, f);
    }
    let a2 = m.mul(&tw.apply_matrix(&gk, f), f);
    check_local_maps(&local, &m, &a2, &gk, g.beta, "(tg)^2 = beta")?;
    Ok(CaseTwoA { krylov, a1: m, a2 })
}

/// `x` with full annihilator and `y` with `<p(g)^{e-1} x, y> != 0`.
pub fn case_two_b_find_pair(
    space: &HermitianSpace,
    g: &Matrix,
    p: &Poly,
    e: usize,
    seed: u64,
) -> Result<(Vector, Vector)> {
    let f = space.tower();
    let n = space.n();
    let target = full_power(p, e, f);
    let x = candidate_vectors(n, f, seed)
        .find(|v| is_full(g, v, &target, f))
        .ok_or_else(|| Error::invariant("some vector has annihilator p^e", "Case II-B"))?;
    let top = g.apply_poly(&p.pow(e - 1, f), &x, f);
    let y = (0..n)
        .map(|i| unit_vector(n, i, f))
        .find(|y| !space.form(&top, y).is_zero())
        .ok_or_else(|| Error::invariant("the form is non-degenerate", "Case II-B"))?;
    Ok((x, y))
}

pub struct GammaSolution {
    pub gamma: Poly,
    pub system: Matrix,
    pub rhs: Vector,
}

/// The unique `gamma` with `<a y, x> = <a x, gamma y>` for all `a`.
pub fn gamma_solve(
    space: &HermitianSpace,
    g: &GroupElement,
    x: &[Elem],
    y: &[Elem],
    p: &Poly,
    e: usize,
) -> Result<GammaSolution> {
    let f = space.tower();
    let modulus = full_power(p, e, f);
    let (kx, _) = krylov_basis(&g.g, x, f)?;
    let (ky, _) = krylov_basis(&g.g, y, f)?;
    let system = space.pairing(&kx, &ky);
    let rhs = space
        .pairing(&ky, &Matrix::from_cols(space.n(), &[x.to_vec()]))
        .col(0);
    let w = system
        .solve(&rhs, f)
        .filter(|_| system.rank(f) == system.rows())
        .ok_or_else(|| Error::invariant("A y is dual to A x", "singular gamma system"))?;
    let gamma = Poly::from_coeffs(w.iter().map(|&c| f.tau(c)).collect());
    if gcd(&gamma, p, f).deg() != 0 {
        return Err(Error::invariant("gamma is a unit", "gamma mod p vanishes"));
    }
    let star = laurent_tau(&gamma, g.beta, &modulus, f)?;
    if !gamma.mul_mod(&star, &modulus, f).is_one(f) {
        return Err(Error::invariant("gamma tau(gamma) = 1", "Case II-B"));
    }
    // replay the defining equations on monomials
    let gy = g.g.apply_poly(&gamma, y, f);
    let mut ax = x.to_vec();
    let mut ay = y.to_vec();
    for _ in 0..kx.cols() {
        if space.form(&ay, x) != space.form(&ax, &gy) {
            return Err(Error::invariant("<a y, x> = <a x, gamma y>", "replay"));
        }
        ax = g.g.mul_vec(&ax, f);
        ay = g.g.mul_vec(&ay, f);
    }
    Ok(GammaSolution { gamma, system, rhs })
}

pub struct CaseTwoB {
    pub basis: Matrix,
    pub a1: Matrix,
    pub a2: Matrix,
    pub gk: Matrix,
}

pub fn case_two_b_factor(
    space: &HermitianSpace,
    g: &GroupElement,
    x: &[Elem],
    y: &[Elem],
    gamma: &Poly,
) -> Result<CaseTwoB> {
    let f = space.tower();
    let tw = twist_of(space);
    let (kx, ann) = krylov_basis(&g.g, x, f)?;
    let (ky, ann_y) = krylov_basis(&g.g, y, f)?;
    if ann != ann_y {
        return Err(Error::invariant(
            "x and y have the same annihilator",
            "Case II-B",
        ));
    }
    let d = kx.cols();
    let basis = kx.hstack(&ky);
    if basis.rank(f) != 2 * d {
        return Err(Error::invariant("A x and A y meet trivially", "Case II-B"));
    }
    let local = space
        .restrict(&basis)
        .map_err(|_| Error::invariant("A x + A y is non-degenerate", "Case II-B"))?;
    let gk = companion(&ann, f);
    let m = laurent_matrix(&gk, g.beta, f)?;
    let gam = gk.eval_poly(gamma, f);
    let a1 = Matrix::block_diag(&[m.clone(), gam.mul(&m, f)]);
    let gg = Matrix::block_diag(&[gk.clone(), gk.clone()]);
    let a2 = a1.mul(&tw.apply_matrix(&gg, f), f);
    // identities (1)-(4): <t u, t w> = <w, u> on the four basis blocks
    let gram = local.gram();
    let lhs = a1.transpose().mul(gram, f).mul(&a1.tau(f), f);
    let rhs = gram.transpose();
    let names = [
        "(1) x with x",
        "(3) x with y",
        "(4) y with x",
        "(2) y with y",
    ];
    for (k, (r, c)) in [
        (0..d, 0..d),
        (0..d, d..2 * d),
        (d..2 * d, 0..d),
        (d..2 * d, d..2 * d),
    ]
    .into_iter()
    .enumerate()
    {
        if lhs.block(r.clone(), c.clone()) != rhs.block(r, c) {
            return Err(Error::invariant("t is anti-unitary", names[k]));
        }
    }
    check_local_maps(&local, &a1, &a2, &gg, g.beta, "(tg)^2 = beta")?;
    Ok(CaseTwoB { basis, a1, a2, gk })
}

/// Replaces `y` by `delta(g) y` so that `gamma` becomes the constant it is
/// congruent to modulo `p`, when that constant is `+1` or `-1`.
fn normalize_pair(
    space: &HermitianSpace,
    g: &GroupElement,
    y: &[Elem],
    gamma: &Poly,
    p: &Poly,
    e: usize,
) -> Result<Option<(Vector, Poly)>> {
    let f = space.tower();
    let modulus = full_power(p, e, f);
    let residue = gamma.rem(p, f);
    let s = residue.coeff(0);
    if residue.deg() != 0 || (s != f.one() && s != f.from_int(-1)) {
        return Ok(None);
    }
    let ginv = gamma
        .inv_mod(&modulus, f)
        .ok_or_else(|| Error::invariant("gamma is a unit", "normalize"))?;
    let zeta = ginv.scale(s, f);
    let zeta_star = laurent_tau(&zeta, g.beta, &modulus, f)?;
    let d = modulus.deg();
    let tries = (0..d)
        .map(|k| Poly::x(f).pow(k, f))
        .chain((1..d).map(|k| Poly::x(f).pow(k, f).add(&Poly::one(f), f)));
    for c in tries {
        let c_star = laurent_tau(&c, g.beta, &modulus, f)?;
        let delta = c
            .add(&zeta_star.mul_mod(&c_star, &modulus, f), f)
            .rem(&modulus, f);
        if !delta.is_zero() && gcd(&delta, p, f).deg() == 0 {
            return Ok(Some((g.g.apply_poly(&delta, y, f), delta)));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Recursion

fn self_dual_pieces(
    space: &HermitianSpace,
    g: &GroupElement,
    p: &Poly,
    frame: &Matrix,
    ctx: &mut Ctx,
) -> Result<Vec<Piece>> {
    let f = space.tower();
    let n = space.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let minpoly = minimal_polynomial(&g.g, f);
    let e = minpoly.deg() / p.deg();
    if p.pow(e, f) != minpoly {
        return Err(Error::invariant(
            "each block is primary",
            format!("{minpoly:?}"),
        ));
    }
    let seed = ctx.opts.seed;
    let to_ambient = |m: &Matrix| frame.mul(m, f);
    let to_ambient_vec = |v: &[Elem]| frame.mul_vec(v, f);
    let mut pieces = Vec::new();
    let w = match nondeg_cyclic_search(space, &g.g, p, e, seed) {
        Some((v, _)) => {
            let res = case_two_a_factor(space, g, &v)?;
            let eigen = if ctx.refined {
                let gk = companion(&annihilator(&g.g, &v, f)?, f);
                let (plus, minus) = eigen_spans(&gk, g.beta, f)?;
                let d = gk.rows();
                let (pb, qb) = (span_basis(d, &plus, f), span_basis(d, &minus, f));
                check_eigen(&res.a1, &pb, &qb, f)?;
                Some(Eigenspaces {
                    plus: to_ambient(&res.krylov.mul(&pb, f)),
                    minus: to_ambient(&res.krylov.mul(&qb, f)),
                })
            } else {
                None
            };
            ctx.records.push(Record::CaseTwoA {
                poly: p.clone(),
                exponent: e,
                v: to_ambient_vec(&v),
                krylov: to_ambient(&res.krylov),
                eigen,
            });
            pieces.push(Piece {
                basis: to_ambient(&res.krylov),
                a1: res.a1,
                a2: res.a2,
            });
            res.krylov
        }
        None => {
            let (x, mut y) = case_two_b_find_pair(space, &g.g, p, e, seed)?;
            for (v, name) in [(&x, "x"), (&y, "y")] {
                if generates_nondegenerate(space, &g.g, p, e, v) {
                    return Err(Error::invariant(
                        "<p^{e-1} x, x> = <p^{e-1} y, y> = 0",
                        name,
                    ));
                }
            }
            let mut sol = gamma_solve(space, g, &x, &y, p, e)?;
            let mut normalized_by = None;
            if ctx.refined {
                if let Some((y2, delta)) = normalize_pair(space, g, &y, &sol.gamma, p, e)? {
                    let sol2 = gamma_solve(space, g, &x, &y2, p, e)?;
                    if sol2.gamma.deg() != 0 {
                        return Err(Error::invariant(
                            "normalized gamma is constant",
                            format!("{:?}", sol2.gamma),
                        ));
                    }
                    y = y2;
                    sol = sol2;
                    normalized_by = Some(delta);
                }
            }
            let res = case_two_b_factor(space, g, &x, &y, &sol.gamma)?;
            let eigen = if ctx.refined && sol.gamma.deg() == 0 {
                let d = res.gk.rows();
                let (plus, minus) = eigen_spans(&res.gk, g.beta, f)?;
                let (px, qx) = (span_basis(d, &plus, f), span_basis(d, &minus, f));
                let (py, qy) = if sol.gamma.coeff(0) == f.one() {
                    (px.clone(), qx.clone())
                } else {
                    (qx.clone(), px.clone())
                };
                let zx = Matrix::zeros(d, px.cols().max(qx.cols()));
                let embed = |top: &Matrix, bottom: &Matrix| {
                    let upper = top.hstack(&Matrix::zeros(d, bottom.cols()));
                    let lower = zx.select_cols(0..top.cols()).hstack(bottom);
                    let mut m = Matrix::zeros(2 * d, top.cols() + bottom.cols());
                    m.set_block(0, 0, &upper);
                    m.set_block(d, 0, &lower);
                    m
                };
                let pb = embed(&px, &py);
                let qb = embed(&qx, &qy);
                check_eigen(&res.a1, &pb, &qb, f)?;
                Some(Eigenspaces {
                    plus: to_ambient(&res.basis.mul(&pb, f)),
                    minus: to_ambient(&res.basis.mul(&qb, f)),
                })
            } else {
                None
            };
            ctx.records.push(Record::CaseTwoB {
                poly: p.clone(),
                exponent: e,
                x: to_ambient_vec(&x),
                y: to_ambient_vec(&y),
                gamma: sol.gamma,
                system: sol.system,
                rhs: sol.rhs,
                normalized_by,
                eigen,
            });
            pieces.push(Piece {
                basis: to_ambient(&res.basis),
                a1: res.a1,
                a2: res.a2,
            });
            res.basis
        }
    };
    if w.cols() == n {
        return Ok(pieces);
    }
    let perp = space.orthogonal_complement(&w)?;
    if perp.cols() >= n || perp.cols() + w.cols() != n {
        return Err(Error::invariant(
            "each recursion step reduces the dimension",
            format!("{} of {n}", perp.cols()),
        ));
    }
    ctx.records.push(Record::Recursion {
        poly: p.clone(),
        exponent: e,
        w: to_ambient(&w),
        complement: to_ambient(&perp),
    });
    let sub_space = space.restrict(&perp)?;
    let sub_g = GroupElement {
        g: restrict_endomorphism(&g.g, &perp, f)?,
        beta: g.beta,
    };
    let sub_frame = frame.mul(&perp, f);
    pieces.extend(self_dual_pieces(&sub_space, &sub_g, p, &sub_frame, ctx)?);
    Ok(pieces)
}

fn factor_pieces(space: &HermitianSpace, g: &GroupElement, ctx: &mut Ctx) -> Result<Vec<Piece>> {
    let f = space.tower();
    let comps = primary_decomposition(space, g, ctx.opts.seed)?;
    let blocks = pair_blocks(space, g, &comps)?;
    let mut pieces = Vec::new();
    for block in &blocks {
        match block.variant {
            BlockVariant::Paired => {
                let (basis, a1, a2, record) = case_one_factor(block, f)?;
                let record = match record {
                    Record::CaseOne {
                        poly,
                        partner,
                        exponent,
                        e_basis,
                        f_basis,
                        a,
                        d1,
                        d2,
                        s1,
                        s2,
                        c,
                    } => Record::CaseOne {
                        poly,
                        partner,
                        exponent,
                        e_basis: block.basis.mul(&e_basis, f),
                        f_basis: block.basis.mul(&f_basis, f),
                        a,
                        d1,
                        d2,
                        s1,
                        s2,
                        c,
                    },
                    other => other,
                };
                ctx.records.push(record);
                pieces.push(Piece {
                    basis: block.basis.mul(&basis, f),
                    a1,
                    a2,
                });
            }
            BlockVariant::SelfDual => {
                pieces.extend(self_dual_pieces(
                    &block.space,
                    &block.g,
                    &block.poly,
                    &block.basis,
                    ctx,
                )?);
            }
        }
    }
    Ok(pieces)
}

fn assemble(space: &HermitianSpace, pieces: &[Piece]) -> Result<(SemilinearMap, SemilinearMap)> {
    let f = space.tower();
    let n = space.n();
    let tw = twist_of(space);
    if n == 0 {
        return Ok((
            SemilinearMap::new(Matrix::zeros(0, 0), tw),
            SemilinearMap::new(Matrix::zeros(0, 0), tw),
        ));
    }
    let basis = Matrix::hstack_all(
        n,
        &pieces.iter().map(|p| p.basis.clone()).collect::<Vec<_>>(),
    );
    let a1 = Matrix::block_diag(&pieces.iter().map(|p| p.a1.clone()).collect::<Vec<_>>());
    let a2 = Matrix::block_diag(&pieces.iter().map(|p| p.a2.clone()).collect::<Vec<_>>());
    let h1 = SemilinearMap::new(a1, tw).change_basis(&basis, f)?;
    let h2 = SemilinearMap::new(a2, tw).change_basis(&basis, f)?;
    Ok((h1, h2))
}

fn certify(
    space: &HermitianSpace,
    g: &GroupElement,
    cert: FactorizationCertificate,
) -> Result<FactorizationCertificate> {
    let report = verify_certificate(space, g, &cert, cert.refined);
    if !report.passed {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.clone())
            .collect();
        return Err(Error::invariant(
            "certificate conditions",
            failed.join(", "),
        ));
    }
    Ok(cert)
}

fn check_element(space: &HermitianSpace, g: &GroupElement) -> Result<()> {
    match space.multiplier(&g.g) {
        Some(b) if b == g.beta => Ok(()),
        Some(_) => Err(Error::InvalidInput(
            "stated multiplier does not match".into(),
        )),
        None => Err(Error::NotSimilitude),
    }
}

pub fn factor(space: &HermitianSpace, g: &GroupElement) -> Result<FactorizationCertificate> {
    factor_with(space, g, &FactorOptions::default())
}

pub fn factor_with(
    space: &HermitianSpace,
    g: &GroupElement,
    opts: &FactorOptions,
) -> Result<FactorizationCertificate> {
    check_element(space, g)?;
    let mut ctx = Ctx {
        opts,
        refined: false,
        records: Vec::new(),
    };
    let pieces = factor_pieces(space, g, &mut ctx)?;
    let (h1, h2) = assemble(space, &pieces)?;
    certify(
        space,
        g,
        FactorizationCertificate {
            h1,
            h2,
            beta: g.beta,
            refined: false,
            transcript: ctx.records,
        },
    )
}

pub fn factor_det_refined(
    space: &HermitianSpace,
    g: &GroupElement,
) -> Result<FactorizationCertificate> {
    factor_det_refined_with(space, g, &FactorOptions::default())
}

/// Factorization on an even-dimensional orthogonal space with
/// `det(h1) = (-1)^m`, `2m = dim V`.
pub fn factor_det_refined_with(
    space: &HermitianSpace,
    g: &GroupElement,
    opts: &FactorOptions,
) -> Result<FactorizationCertificate> {
    let f = space.tower();
    if f.is_quadratic() || space.epsilon() != 1 || space.n() % 2 == 1 || f.p() == 2 {
        return Err(Error::IncompatibleKind(
            "refined mode needs an even-dimensional orthogonal space over odd q".into(),
        ));
    }
    check_element(space, g)?;
    let mut ctx = Ctx {
        opts,
        refined: true,
        records: Vec::new(),
    };
    let root = f.sqrt(g.beta);
    let work = match root {
        Some(r) => {
            ctx.records.push(Record::Scale { root: r });
            GroupElement {
                g: g.g.scale(f.inv(r)?, f),
                beta: f.one(),
            }
        }
        None => g.clone(),
    };
    let mut pieces = factor_pieces(space, &work, &mut ctx)?;
    let target = if (space.n() / 2).is_multiple_of(2) {
        f.one()
    } else {
        f.from_int(-1)
    };
    let det = pieces
        .iter()
        .try_fold(f.one(), |acc, p| Ok::<_, Error>(f.mul(acc, p.a1.det(f)?)))?;
    if det != target {
        let k = pieces
            .iter()
            .position(|p| p.a1.rows() % 2 == 1)
            .ok_or_else(|| {
                let labels: Vec<&str> = ctx.records.iter().map(Record::label).collect();
                let dims: Vec<usize> = pieces.iter().map(|p| p.a1.rows()).collect();
                Error::invariant(
                    "det(h1) = (-1)^m",
                    format!("no odd-dimensional piece to flip; transcript {labels:?}, piece dimensions {dims:?}"),
                )
            })?;
        let piece = &mut pieces[k];
        piece.a1 = piece.a1.neg(f);
        piece.a2 = piece.a2.neg(f);
        ctx.records.push(Record::Flip {
            piece: k,
            dim: piece.a1.rows(),
        });
    }
    let (h1, mut h2) = assemble(space, &pieces)?;
    if let Some(r) = root {
        h2.mat = h2.mat.scale(r, f);
    }
    certify(
        space,
        g,
        FactorizationCertificate {
            h1,
            h2,
            beta: g.beta,
            refined: true,
            transcript: ctx.records,
        },
    )
}

/// `u = h1 h` with `u (iota g) u^-1 = g^-1`, where
/// `iota g = mu(g)^-1 h g h^-1`.
pub fn dualizing_conjugator(
    space: &HermitianSpace,
    g: &GroupElement,
    h: &SemilinearMap,
) -> Result<Matrix> {
    let f = space.tower();
    let n = space.n();
    if space.anti_unitary_ratio(h)? != Some(f.one()) || h.square(f).mat != Matrix::identity(n, f) {
        return Err(Error::InvalidInput(
            "h must be an anti-unitary involution".into(),
        ));
    }
    let cert = factor(space, g)?;
    let u = cert.h1.compose(h, f);
    if !u.is_linear() || space.multiplier(&u.mat) != Some(f.one()) {
        return Err(Error::invariant("h1 h is unitary", "dualizing conjugator"));
    }
    let iota = iota(space, g, h)?;
    let lhs = u.mat.mul(&iota, f).mul(&u.mat.inverse(f)?, f);
    if lhs != g.g.inverse(f)? {
        return Err(Error::invariant(
            "u (iota g) u^-1 = g^-1",
            "dualizing conjugator",
        ));
    }
    Ok(u.mat)
}

/// `mu(g)^-1 h g h^-1` as a matrix.
pub fn iota(space: &HermitianSpace, g: &GroupElement, h: &SemilinearMap) -> Result<Matrix> {
    let f = space.tower();
    let conj = h
        .compose(&SemilinearMap::linear(g.g.clone()), f)
        .compose(&h.inverse(f)?, f);
    Ok(conj.mat.scale(f.inv(g.beta)?, f))
}

/// Symmetric unitary `s` with `s g s^-1 = g^T` on the standard hermitian space.
pub fn symmetric_unitary_conjugator(space: &HermitianSpace, g: &GroupElement) -> Result<Matrix> {
    let f = space.tower();
    let n = space.n();
    if !f.is_quadratic() || *space.gram() != Matrix::identity(n, f) {
        return Err(Error::IncompatibleKind(
            "needs the hermitian space with identity Gram matrix".into(),
        ));
    }
    if g.beta != f.one() {
        return Err(Error::InvalidInput("needs a unitary element".into()));
    }
    let cert = factor(space, g)?;
    // h1 = s1 o c with c entrywise conjugation, so s1 = h1.mat
    let s = cert.h1.mat.inverse(f)?;
    let unitary = s.transpose().mul(&s.tau(f), f) == Matrix::identity(n, f);
    let conj = s.mul(&g.g, f).mul(&s.inverse(f)?, f) == g.g.transpose();
    if !s.is_symmetric() || !unitary || !conj {
        return Err(Error::invariant(
            "s symmetric unitary with s g s^-1 = g^T",
            "unitary conjugator",
        ));
    }
    Ok(s)
}
