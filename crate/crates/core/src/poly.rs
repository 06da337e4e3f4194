//! Univariate polynomials over the top field of a [`Tower`], complete
//! factorization, and the star operation induced by `T -> beta / T`.

use std::cmp::Ordering;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Tower};

/// Coefficients in ascending degree; the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

/// Factor order: degree first, then coefficient vectors compared from the
/// constant term upward.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn from_coeffs(mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Elem) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    pub fn one(f: &Tower) -> Poly {
        Poly::constant(f.one())
    }

    /// The monomial `T`.
    pub fn x(f: &Tower) -> Poly {
        Poly {
            coeffs: vec![f.zero(), f.one()],
        }
    }

    /// `T - root`.
    pub fn linear(f: &Tower, root: Elem) -> Poly {
        Poly {
            coeffs: vec![f.neg(root), f.one()],
        }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as a plain number; zero for the zero polynomial.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_one(&self, f: &Tower) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == f.one()
    }

    pub fn is_monic(&self, f: &Tower) -> bool {
        self.leading() == f.one()
    }

    pub fn add(&self, other: &Poly, f: &Tower) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| f.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly, f: &Tower) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| f.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn neg(&self, f: &Tower) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: Elem, f: &Tower) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &Tower) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, mut e: usize, f: &Tower) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f);
            }
        }
        acc
    }

    /// Quotient and remainder.
    pub fn divmod(&self, divisor: &Poly, f: &Tower) -> Result<(Poly, Poly)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = divisor.deg();
        if self.coeffs.len() < divisor.coeffs.len() {
            return Ok((Poly::zero(), self.clone()));
        }
        let lead_inv = f.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Elem::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let t = f.mul(rem[i], lead_inv);
            if t.is_zero() {
                continue;
            }
            quot[i - dd] = t;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = f.sub(rem[idx], f.mul(t, c));
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Poly, f: &Tower) -> Poly {
        self.divmod(divisor, f).expect("nonzero divisor").1
    }

    /// Exact quotient; the remainder must vanish.
    pub fn exact_div(&self, divisor: &Poly, f: &Tower) -> Poly {
        let (q, r) = self.divmod(divisor, f).expect("nonzero divisor");
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    pub fn monic(&self, f: &Tower) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = f.inv(self.leading()).expect("nonzero leading coefficient");
        self.scale(inv, f)
    }

    pub fn derivative(&self, f: &Tower) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
                .collect(),
        )
    }

    pub fn eval(&self, x: Elem, f: &Tower) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Applies the Galois involution to each coefficient.
    pub fn tau_coeffs(&self, f: &Tower) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| f.tau(c)).collect(),
        }
    }

    pub fn mul_mod(&self, other: &Poly, m: &Poly, f: &Tower) -> Poly {
        self.mul(other, f).rem(m, f)
    }

    pub fn pow_mod(&self, mut e: u128, m: &Poly, f: &Tower) -> Poly {
        let mut base = self.rem(m, f);
        let mut acc = Poly::one(f).rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, m, f);
            }
        }
        acc
    }

    /// `self^|E| mod m`.
    fn frobenius_mod(&self, m: &Poly, f: &Tower) -> Poly {
        self.pow_mod(f.size() as u128, m, f)
    }

    /// Inverse modulo `m`, if `self` is a unit there.
    pub fn inv_mod(&self, m: &Poly, f: &Tower) -> Option<Poly> {
        let (g, u, _) = xgcd(self, m, f);
        g.is_one(f).then(|| u.rem(m, f))
    }

    /// Irreducibility by Ben-Or: `gcd(T^{Q^i} - T, f) = 1` for `i <= deg/2`.
    pub fn is_irreducible(&self, f: &Tower) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n,
        };
        let m = self.monic(f);
        let x = Poly::x(f);
        let mut h = x.clone();
        for _ in 0..n / 2 {
            h = h.frobenius_mod(&m, f);
            if !gcd(&m, &h.sub(&x, f), f).is_one(f) {
                return false;
            }
        }
        true
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly, f: &Tower) -> Poly {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    while !r1.is_zero() {
        let r = r0.rem(&r1, f);
        r0 = r1;
        r1 = r;
    }
    r0.monic(f)
}

/// Extended gcd: `(g, u, v)` with `u a + v b = g`, `g` monic.
pub fn xgcd(a: &Poly, b: &Poly, f: &Tower) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(f), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one(f));
    while !r1.is_zero() {
        let (q, r) = r0.divmod(&r1, f).expect("nonzero");
        r0 = std::mem::replace(&mut r1, r);
        let s = s0.sub(&q.mul(&s1, f), f);
        s0 = std::mem::replace(&mut s1, s);
        let t = t0.sub(&q.mul(&t1, f), f);
        t0 = std::mem::replace(&mut t1, t);
    }
    if r0.is_zero() {
        return (r0, s0, t0);
    }
    let inv = f.inv(r0.leading()).expect("nonzero");
    let out = (r0.scale(inv, f), s0.scale(inv, f), t0.scale(inv, f));
    debug_assert_eq!(
        out.1.mul(a, f).add(&out.2.mul(b, f), f),
        out.0,
        "Bezout identity"
    );
    out
}

pub fn lcm(a: &Poly, b: &Poly, f: &Tower) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    a.mul(b, f).exact_div(&gcd(a, b, f), f).monic(f)
}

/// Complete factorization: the leading coefficient and the monic irreducible
/// factors with multiplicities, sorted by [`Poly`]'s order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Elem,
    pub factors: Vec<(Poly, usize)>,
}

impl Factorization {
    pub fn expand(&self, f: &Tower) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit), |acc, (p, e)| {
                acc.mul(&p.pow(*e, f), f)
            })
    }
}

pub fn factorize(poly: &Poly, f: &Tower, seed: u64) -> Result<Factorization> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    factorize_with(poly, f, &mut rng)
}

pub fn factorize_with<R: Rng>(poly: &Poly, f: &Tower, rng: &mut R) -> Result<Factorization> {
    if poly.is_zero() {
        return Err(Error::InvalidInput(
            "cannot factor the zero polynomial".into(),
        ));
    }
    let unit = poly.leading();
    let monic = poly.monic(f);
    let mut factors: Vec<(Poly, usize)> = Vec::new();
    for (part, mult) in squarefree(&monic, f) {
        for (block, d) in distinct_degree(&part, f) {
            for irr in equal_degree(&block, d, f, rng) {
                match factors.iter_mut().find(|(p, _)| *p == irr) {
                    Some((_, m)) => *m += mult,
                    None => factors.push((irr, mult)),
                }
            }
        }
    }
    factors.sort();
    let out = Factorization { unit, factors };
    if out.expand(f) != *poly {
        return Err(Error::invariant(
            "factorization reconstructs its input",
            format!("{poly:?}"),
        ));
    }
    Ok(out)
}

/// `p`-th root of a polynomial all of whose exponents are multiples of `p`.
fn pth_root(a: &Poly, f: &Tower) -> Poly {
    let p = f.p() as usize;
    let e = (f.size() / f.p() as u64) as u128;
    Poly::from_coeffs(a.coeffs.iter().step_by(p).map(|&c| f.pow(c, e)).collect())
}

/// Square-free decomposition of a monic polynomial.
fn squarefree(a: &Poly, f: &Tower) -> Vec<(Poly, usize)> {
    if a.deg() == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let d = a.derivative(f);
    if d.is_zero() {
        let p = f.p() as usize;
        for (g, m) in squarefree(&pth_root(a, f), f) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = gcd(a, &d, f);
    let mut w = a.exact_div(&c, f);
    let mut i = 1;
    while !w.is_one(f) {
        let y = gcd(&w, &c, f);
        let z = w.exact_div(&y, f);
        if !z.is_one(f) {
            out.push((z.monic(f), i));
        }
        i += 1;
        w = y;
        c = c.exact_div(&w, f);
    }
    if !c.is_one(f) {
        let p = f.p() as usize;
        for (g, m) in squarefree(&pth_root(&c.monic(f), f), f) {
            out.push((g, m * p));
        }
    }
    out
}

/// Splits a square-free monic polynomial into products of irreducibles of
/// equal degree.
fn distinct_degree(a: &Poly, f: &Tower) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let x = Poly::x(f);
    let mut rest = a.clone();
    let mut h = x.rem(&rest, f);
    let mut i = 1;
    while rest.deg() >= 2 * i {
        h = h.frobenius_mod(&rest, f);
        let g = gcd(&rest, &h.sub(&x, f), f);
        if !g.is_one(f) {
            rest = rest.exact_div(&g, f);
            h = h.rem(&rest, f);
            out.push((g, i));
        }
        i += 1;
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

fn random_poly<R: Rng>(deg_bound: usize, f: &Tower, rng: &mut R) -> Poly {
    Poly::from_coeffs(
        (0..deg_bound)
            .map(|_| f.from_index(rng.gen_range(0..f.size())))
            .collect(),
    )
}

/// Equal-degree splitting (Cantor-Zassenhaus); the trace map replaces the
/// half-power in characteristic 2.
fn equal_degree<R: Rng>(a: &Poly, d: usize, f: &Tower, rng: &mut R) -> Vec<Poly> {
    let n = a.deg();
    if n == d {
        return vec![a.monic(f)];
    }
    let target = n / d;
    let mut parts = vec![a.monic(f)];
    let size = f.size();
    let even = f.p() == 2;
    let log2_size = size.trailing_zeros() as usize;
    while parts.len() < target {
        let r = random_poly(n, f, rng);
        if r.deg() == 0 {
            continue;
        }
        let splitter = if even {
            let mut acc = r.clone();
            let mut term = r;
            for _ in 1..(log2_size * d) {
                term = term.mul_mod(&term, a, f);
                acc = acc.add(&term, f);
            }
            acc
        } else {
            // r^((Q^d - 1) / 2) = (r * r^Q * ... * r^(Q^(d-1)))^((Q - 1) / 2)
            let mut conj = r.clone();
            let mut norm = r;
            for _ in 1..d {
                conj = conj.frobenius_mod(a, f);
                norm = norm.mul_mod(&conj, a, f);
            }
            norm.pow_mod(((size - 1) / 2) as u128, a, f)
                .sub(&Poly::one(f), f)
        };
        let mut next = Vec::with_capacity(parts.len() + 1);
        for part in parts {
            if part.deg() > d {
                let g = gcd(&part, &splitter, f);
                if g.deg() > 0 && g.deg() < part.deg() {
                    next.push(part.exact_div(&g, f).monic(f));
                    next.push(g);
                    continue;
                }
            }
            next.push(part);
        }
        parts = next;
    }
    parts
}

/// The monic polynomial whose roots are `beta / lambda` for the roots
/// `lambda` of `poly`: the normalized image of `sum a_i T^i` under
/// `sum tau(a_i) beta^i T^{-i}`, multiplied by `T^deg`.
pub fn tau_star(poly: &Poly, beta: Elem, f: &Tower) -> Result<Poly> {
    if beta.is_zero() {
        return Err(Error::InvalidInput("beta must be nonzero".into()));
    }
    if poly.coeff(0).is_zero() {
        return Err(Error::InvalidInput(
            "polynomial must have a nonzero constant term".into(),
        ));
    }
    let d = poly.deg();
    let mut coeffs = vec![Elem::ZERO; d + 1];
    let mut beta_pow = f.one();
    for (i, &a) in poly.coeffs.iter().enumerate() {
        coeffs[d - i] = f.mul(f.tau(a), beta_pow);
        beta_pow = f.mul(beta_pow, beta);
    }
    Ok(Poly::from_coeffs(coeffs).monic(f))
}

/// The Laurent involution `sum a_i T^i -> sum tau(a_i) beta^i T^{-i}` on
/// `E[T] / (modulus)`, for a modulus prime to `T`.
pub fn laurent_tau(a: &Poly, beta: Elem, modulus: &Poly, f: &Tower) -> Result<Poly> {
    let t_inv = Poly::x(f)
        .inv_mod(modulus, f)
        .ok_or_else(|| Error::InvalidInput("modulus is not prime to T".into()))?;
    let step = t_inv.scale(beta, f);
    let mut acc = Poly::zero();
    let mut power = Poly::one(f).rem(modulus, f);
    for &c in &a.coeffs {
        acc = acc.add(&power.scale(f.tau(c), f), f);
        power = power.mul_mod(&step, modulus, f);
    }
    Ok(acc.rem(modulus, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Ext, Level};
    use proptest::prelude::*;

    fn tower(p: u64, k: usize, ext: Ext) -> Tower {
        Tower::new(p, k, ext, None).unwrap()
    }

    fn poly(f: &Tower, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| f.from_int(x)).collect())
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = tower(3, 1, Ext::Trivial);
        let prod = poly(&f3, &[1, 1]).mul(&poly(&f3, &[2, 1]), &f3);
        assert_eq!(prod, poly(&f3, &[2, 0, 1]));
        let (q, r) = prod.divmod(&poly(&f3, &[1, 1]), &f3).unwrap();
        assert_eq!(q, poly(&f3, &[2, 1]));
        assert!(r.is_zero());
        assert_eq!(prod.add(&Poly::zero(), &f3), prod);
        assert_eq!(prod.divmod(&Poly::zero(), &f3), Err(Error::DivisionByZero));
    }

    #[test]
    fn gcd_examples() {
        let f5 = tower(5, 1, Ext::Trivial);
        assert_eq!(
            gcd(&poly(&f5, &[-1, 0, 1]), &poly(&f5, &[-1, 1]), &f5),
            poly(&f5, &[-1, 1])
        );
        assert_eq!(
            gcd(&Poly::zero(), &poly(&f5, &[2, 1]), &f5),
            poly(&f5, &[2, 1])
        );
        let a = poly(&f5, &[2, 0, 1]);
        let b = poly(&f5, &[3, 1]);
        let (g, u, v) = xgcd(&a, &b, &f5);
        assert!(g.is_one(&f5));
        assert_eq!(u.mul(&a, &f5).add(&v.mul(&b, &f5), &f5), g);
    }

    #[test]
    fn factorization_examples() {
        let f3 = tower(3, 1, Ext::Trivial);
        let x2p1 = poly(&f3, &[1, 0, 1]);
        // Oracle: no roots in F_3.
        assert!(f3
            .elements(Level::Base)
            .all(|x| !x2p1.eval(x, &f3).is_zero()));
        let fac = factorize(&x2p1, &f3, 0).unwrap();
        assert_eq!(fac.factors, vec![(x2p1.clone(), 1)]);

        let f5 = tower(5, 1, Ext::Trivial);
        let fac = factorize(&poly(&f5, &[1, 0, 1]), &f5, 0).unwrap();
        assert_eq!(
            fac.factors,
            vec![(poly(&f5, &[2, 1]), 1), (poly(&f5, &[3, 1]), 1)]
        );

        let t = Poly::x(&f3);
        let tm1 = poly(&f3, &[-1, 1]);
        let input = tm1.pow(2, &f3).mul(&t, &f3);
        let fac = factorize(&input, &f3, 0).unwrap();
        assert_eq!(fac.factors, vec![(t, 1), (tm1, 2)]);
    }

    #[test]
    fn factorization_handles_pth_powers() {
        let f2 = tower(2, 1, Ext::Trivial);
        // (T^2 + T + 1)^2 (T + 1)^3 over F_2
        let a = poly(&f2, &[1, 1, 1])
            .pow(2, &f2)
            .mul(&poly(&f2, &[1, 1]).pow(3, &f2), &f2);
        let fac = factorize(&a, &f2, 0).unwrap();
        assert_eq!(
            fac.factors,
            vec![(poly(&f2, &[1, 1]), 3), (poly(&f2, &[1, 1, 1]), 2)]
        );
        let f3 = tower(3, 1, Ext::Trivial);
        let a = poly(&f3, &[1, 0, 1]).pow(4, &f3);
        assert_eq!(
            factorize(&a, &f3, 1).unwrap().factors,
            vec![(poly(&f3, &[1, 0, 1]), 4)]
        );
    }

    #[test]
    fn tau_star_examples() {
        let f5 = tower(5, 1, Ext::Trivial);
        let one = f5.one();
        assert_eq!(
            tau_star(&poly(&f5, &[-2, 1]), one, &f5).unwrap(),
            poly(&f5, &[-3, 1])
        );
        assert_eq!(
            tau_star(&poly(&f5, &[-1, 1]), one, &f5).unwrap(),
            poly(&f5, &[-1, 1])
        );
        let beta = f5.from_int(2);
        let shape = poly(&f5, &[-2, 0, 1]);
        assert_eq!(tau_star(&shape, beta, &f5).unwrap(), shape);
        assert!(tau_star(&Poly::x(&f5), one, &f5).is_err());
        assert!(tau_star(&shape, f5.zero(), &f5).is_err());
    }

    #[test]
    fn laurent_tau_is_an_involution() {
        let f9 = tower(3, 1, Ext::Quadratic);
        let w = f9.generator().unwrap();
        let m = poly(&f9, &[1, 0, 1]).pow(2, &f9);
        let beta = f9.from_int(2);
        let a = Poly::from_coeffs(vec![w, f9.one(), f9.zero(), w]);
        let once = laurent_tau(&a, beta, &m, &f9).unwrap();
        assert_eq!(laurent_tau(&once, beta, &m, &f9).unwrap(), a.rem(&m, &f9));
    }

    fn arb_monic(p: u32, max_deg: usize) -> impl Strategy<Value = Vec<u32>> {
        prop::collection::vec(0..p, 1..=max_deg)
    }

    fn to_monic(f: &Tower, c: &[u32]) -> Poly {
        let mut v: Vec<Elem> = c.iter().map(|&x| f.from_int(x as i64)).collect();
        v.push(f.one());
        Poly::from_coeffs(v)
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(c in arb_monic(3, 9), seed in 0u64..100) {
            let f = tower(3, 1, Ext::Trivial);
            let a = to_monic(&f, &c);
            let fac = factorize(&a, &f, seed).unwrap();
            prop_assert_eq!(fac.expand(&f), a);
            for w in fac.factors.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
            for (p, _) in &fac.factors {
                prop_assert!(p.is_irreducible(&f));
                // Independent root check for the irreducible factors.
                if p.deg() > 1 {
                    prop_assert!(f.elements(Level::Base).all(|x| !p.eval(x, &f).is_zero()));
                }
            }
        }

        #[test]
        fn factorization_over_f4_and_f9(c in prop::collection::vec(0u64..9, 1..6)) {
            for (f, bound) in [(tower(2, 2, Ext::Trivial), 4u64), (tower(3, 1, Ext::Quadratic), 9)] {
                let mut v: Vec<Elem> = c.iter().map(|&x| f.from_index(x % bound)).collect();
                v.push(f.one());
                let a = Poly::from_coeffs(v);
                let fac = factorize(&a, &f, 7).unwrap();
                prop_assert_eq!(fac.expand(&f), a);
                for (p, _) in &fac.factors {
                    prop_assert!(p.is_irreducible(&f));
                }
            }
        }

        #[test]
        fn tau_star_is_involutive_and_multiplicative(
            c1 in arb_monic(5, 4), c2 in arb_monic(5, 4), b in 1i64..5
        ) {
            let f = tower(5, 1, Ext::Trivial);
            let beta = f.from_int(b);
            let (a1, a2) = (to_monic(&f, &c1), to_monic(&f, &c2));
            prop_assume!(!a1.coeff(0).is_zero() && !a2.coeff(0).is_zero());
            let s1 = tau_star(&a1, beta, &f).unwrap();
            prop_assert_eq!(tau_star(&s1, beta, &f).unwrap(), a1.clone());
            if gcd(&a1, &a2, &f).is_one(&f) {
                let prod = tau_star(&a1.mul(&a2, &f), beta, &f).unwrap();
                prop_assert_eq!(prod, s1.mul(&tau_star(&a2, beta, &f).unwrap(), &f));
            }
        }

        #[test]
        fn bezout_holds(c1 in arb_monic(7, 5), c2 in arb_monic(7, 5)) {
            let f = tower(7, 1, Ext::Trivial);
            let (a, b) = (to_monic(&f, &c1), to_monic(&f, &c2));
            let (g, u, v) = xgcd(&a, &b, &f);
            prop_assert_eq!(u.mul(&a, &f).add(&v.mul(&b, &f), &f), g.clone());
            prop_assert!(a.rem(&g, &f).is_zero() && b.rem(&g, &f).is_zero());
        }
    }
}
