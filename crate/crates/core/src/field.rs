//! Finite fields `F = F_{p^k}` and their optional quadratic extension `E`.
//!
//! Elements are power-basis coordinate vectors over `F_p` in the tower
//! `F_p -> F -> E`: the first `k` coordinates hold the `F`-part and, for a
//! quadratic tower, the next `k` hold the coefficient of the extension
//! generator `w`. Elements of `F` are exactly the elements whose upper half
//! vanishes.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Maximum number of `F_p`-coordinates of an element of `E`.
pub const MAX_COORDS: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Elem {
    c: [u32; MAX_COORDS],
}

impl Elem {
    pub const ZERO: Elem = Elem { c: [0; MAX_COORDS] };

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn coords(&self) -> &[u32; MAX_COORDS] {
        &self.c
    }
}

/// Library-wide total order: compare coordinate vectors with the highest
/// power-basis coordinate most significant, so that the order agrees with
/// the enumeration index `sum c_i p^i`.
impl Ord for Elem {
    fn cmp(&self, other: &Self) -> Ordering {
        for i in (0..MAX_COORDS).rev() {
            match self.c[i].cmp(&other.c[i]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Elem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.c.iter().rposition(|&x| x != 0).unwrap_or(0);
        write!(f, "{:?}", &self.c[..=last])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ext {
    Trivial,
    Quadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Which field of the tower an enumeration or encoding refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Base,
    Top,
}

/// Optional user-supplied defining polynomials for [`Tower::new`].
#[derive(Clone, Debug, Default)]
pub struct Moduli {
    /// Monic degree-`k` polynomial over `F_p`, ascending coefficients.
    pub base: Option<Vec<u32>>,
    /// Monic quadratic over `F`, ascending coefficients as `F` elements.
    pub ext: Option<[Elem; 3]>,
}

/// The pair `E/F` with its Galois involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    p: u32,
    k: usize,
    ext: Ext,
    base_modulus: Vec<u32>,
    /// `(c0, c1)` for the extension modulus `T^2 + c1 T + c0`.
    ext_coeffs: Option<(Elem, Elem)>,
    q: u64,
}

pub(crate) fn is_prime(n: u64) -> bool {
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

/// Splits a prime power into `(p, k)`.
pub fn prime_power(q: u64) -> Option<(u32, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1 && p < (1 << 31)).then_some((p as u32, k))
}

impl Tower {
    /// Builds a tower, searching for the lexicographically least monic
    /// irreducible moduli when none are supplied.
    pub fn new(p: u64, k: usize, ext: Ext, seeds: Option<Moduli>) -> Result<Tower> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= (1 << 31) {
            return Err(Error::FieldParams(format!("characteristic {p} too large")));
        }
        if k == 0 {
            return Err(Error::FieldParams(
                "extension degree k must be at least 1".into(),
            ));
        }
        let width = match ext {
            Ext::Trivial => k,
            Ext::Quadratic => 2 * k,
        };
        if width > MAX_COORDS {
            return Err(Error::FieldParams(format!(
                "field needs {width} coordinates, at most {MAX_COORDS} supported"
            )));
        }
        let top_bits = (p as f64).log2() * width as f64;
        if top_bits >= 62.0 {
            return Err(Error::FieldParams(format!(
                "field of size {p}^{width} too large"
            )));
        }
        let p32 = p as u32;
        let seeds = seeds.unwrap_or_default();

        let prime = Tower::prime(p32);
        let base_modulus = match seeds.base {
            Some(m) => {
                if m.len() != k + 1 || m[k] != 1 || m.iter().any(|&c| c >= p32) {
                    return Err(Error::FieldParams(format!(
                        "base modulus must be monic of degree {k} with coefficients below {p}"
                    )));
                }
                if k > 1 && !prime_poly(&prime, &m).is_irreducible(&prime) {
                    return Err(Error::ReducibleModulus(format!("{m:?}")));
                }
                m
            }
            None => least_irreducible_over_prime(&prime, k),
        };
        let q = p.pow(k as u32);
        let base = Tower {
            p: p32,
            k,
            ext: Ext::Trivial,
            base_modulus,
            ext_coeffs: None,
            q,
        };

        let ext_coeffs = match ext {
            Ext::Trivial => None,
            Ext::Quadratic => {
                let coeffs = match seeds.ext {
                    Some(m) => {
                        if m[2] != base.one() || !m.iter().all(|c| base.contains_base(*c)) {
                            return Err(Error::FieldParams(
                                "extension modulus must be a monic quadratic over F".into(),
                            ));
                        }
                        if !Poly::from_coeffs(m.to_vec()).is_irreducible(&base) {
                            return Err(Error::ReducibleModulus(format!("{m:?}")));
                        }
                        (m[0], m[1])
                    }
                    None => least_irreducible_quadratic(&base),
                };
                Some(coeffs)
            }
        };
        Ok(Tower {
            ext,
            ext_coeffs,
            ..base
        })
    }

    /// The prime field `F_p` as a trivial tower.
    pub fn prime(p: u32) -> Tower {
        Tower {
            p,
            k: 1,
            ext: Ext::Trivial,
            base_modulus: vec![0, 1],
            ext_coeffs: None,
            q: p as u64,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ext(&self) -> Ext {
        self.ext
    }

    pub fn is_quadratic(&self) -> bool {
        self.ext == Ext::Quadratic
    }

    /// `|F|`.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// `|E|`.
    pub fn size(&self) -> u64 {
        match self.ext {
            Ext::Trivial => self.q,
            Ext::Quadratic => self.q * self.q,
        }
    }

    /// Number of `F_p`-coordinates of an element of `E`.
    pub fn width(&self) -> usize {
        match self.ext {
            Ext::Trivial => self.k,
            Ext::Quadratic => 2 * self.k,
        }
    }

    pub fn base_modulus(&self) -> &[u32] {
        &self.base_modulus
    }

    /// Ascending coefficients `[c0, c1, 1]` of the extension modulus.
    pub fn ext_modulus(&self) -> Option<[Elem; 3]> {
        self.ext_coeffs.map(|(c0, c1)| [c0, c1, self.one()])
    }

    /// The generator `w` of `E` over `F`, or `None` for a trivial tower.
    pub fn generator(&self) -> Option<Elem> {
        self.ext_coeffs.map(|_| {
            let mut c = [0; MAX_COORDS];
            c[self.k] = 1;
            Elem { c }
        })
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Elem {
        let mut c = [0; MAX_COORDS];
        c[0] = n.rem_euclid(self.p as i64) as u32;
        Elem { c }
    }

    /// `Some(1)` or `Some(-1)` when `a` is `±1`; `+1` wins in characteristic 2.
    pub fn as_sign(&self, a: Elem) -> Option<i8> {
        if a == self.one() {
            Some(1)
        } else if a == self.neg(self.one()) {
            Some(-1)
        } else {
            None
        }
    }

    /// Whether `a` is a reduced element of `E`.
    pub fn contains(&self, a: Elem) -> bool {
        let w = self.width();
        a.c.iter()
            .enumerate()
            .all(|(i, &x)| if i < w { x < self.p } else { x == 0 })
    }

    /// Whether `a` lies in `F`.
    pub fn contains_base(&self, a: Elem) -> bool {
        a.c.iter()
            .enumerate()
            .all(|(i, &x)| if i < self.k { x < self.p } else { x == 0 })
    }

    pub fn index(&self, a: Elem) -> u64 {
        a.c[..self.width()]
            .iter()
            .rev()
            .fold(0u64, |acc, &x| acc * self.p as u64 + x as u64)
    }

    pub fn from_index(&self, mut idx: u64) -> Elem {
        let mut c = [0; MAX_COORDS];
        for slot in c.iter_mut().take(self.width()) {
            *slot = (idx % self.p as u64) as u32;
            idx /= self.p as u64;
        }
        Elem { c }
    }

    /// All elements of `F` or `E` in increasing order.
    pub fn elements(&self, level: Level) -> impl Iterator<Item = Elem> + '_ {
        let n = match level {
            Level::Base => self.q,
            Level::Top => self.size(),
        };
        (0..n).map(move |i| self.from_index(i))
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let mut c = [0; MAX_COORDS];
        let w = self.width();
        for ((ci, x), y) in c[..w].iter_mut().zip(&a.c[..w]).zip(&b.c[..w]) {
            let s = x + y;
            *ci = if s >= self.p { s - self.p } else { s };
        }
        Elem { c }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let mut c = [0; MAX_COORDS];
        let w = self.width();
        for (ci, &x) in c[..w].iter_mut().zip(&a.c[..w]) {
            *ci = if x == 0 { 0 } else { self.p - x };
        }
        Elem { c }
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    /// Multiplication in `F` on the low `k` coordinates.
    fn base_mul(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        let k = self.k;
        let p = self.p as u64;
        if k == 1 {
            out[0] = ((a[0] as u64 * b[0] as u64) % p) as u32;
            return;
        }
        let mut prod = [0u64; 2 * MAX_COORDS];
        for i in 0..k {
            if a[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + a[i] as u64 * b[j] as u64) % p;
            }
        }
        for i in (k..2 * k - 1).rev() {
            let t = prod[i];
            if t == 0 {
                continue;
            }
            let neg_t = p - t;
            for j in 0..k {
                let idx = i - k + j;
                prod[idx] = (prod[idx] + neg_t * self.base_modulus[j] as u64) % p;
            }
        }
        for i in 0..k {
            out[i] = prod[i] as u32;
        }
    }

    fn base_add_into(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        for i in 0..self.k {
            let s = a[i] + b[i];
            out[i] = if s >= self.p { s - self.p } else { s };
        }
    }

    fn base_sub_into(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        for i in 0..self.k {
            out[i] = if a[i] >= b[i] {
                a[i] - b[i]
            } else {
                a[i] + self.p - b[i]
            };
        }
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let k = self.k;
        let mut c = [0; MAX_COORDS];
        match self.ext_coeffs {
            None => self.base_mul(&a.c[..k], &b.c[..k], &mut c[..k]),
            Some((c0, c1)) => {
                // (a0 + a1 w)(b0 + b1 w) with w^2 = -c1 w - c0
                let (a0, a1) = (&a.c[..k], &a.c[k..2 * k]);
                let (b0, b1) = (&b.c[..k], &b.c[k..2 * k]);
                let mut t00 = [0u32; MAX_COORDS];
                let mut t11 = [0u32; MAX_COORDS];
                let mut t01 = [0u32; MAX_COORDS];
                let mut t10 = [0u32; MAX_COORDS];
                self.base_mul(a0, b0, &mut t00);
                self.base_mul(a1, b1, &mut t11);
                self.base_mul(a0, b1, &mut t01);
                self.base_mul(a1, b0, &mut t10);
                let mut r0 = [0u32; MAX_COORDS];
                let mut r1 = [0u32; MAX_COORDS];
                self.base_mul(&t11, &c0.c[..k], &mut r0);
                self.base_mul(&t11, &c1.c[..k], &mut r1);
                let mut lo = [0u32; MAX_COORDS];
                self.base_sub_into(&t00, &r0, &mut lo);
                let mut mid = [0u32; MAX_COORDS];
                self.base_add_into(&t01, &t10, &mut mid);
                let mut hi = [0u32; MAX_COORDS];
                self.base_sub_into(&mid, &r1, &mut hi);
                c[..k].copy_from_slice(&lo[..k]);
                c[k..2 * k].copy_from_slice(&hi[..k]);
            }
        }
        Elem { c }
    }

    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Elem, mut e: u128) -> Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    pub fn pow_big(&self, a: Elem, e: &BigUint) -> Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(acc, acc);
            if e.bit(i) {
                acc = self.mul(acc, a);
            }
        }
        acc
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, (self.size() - 2) as u128))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Checked binary arithmetic on validated operands.
    pub fn arith(&self, a: Elem, b: Elem, op: FieldOp) -> Result<Elem> {
        for x in [a, b] {
            if !self.contains(x) {
                return Err(Error::MixedField(format!("{x:?}")));
            }
        }
        match op {
            FieldOp::Add => Ok(self.add(a, b)),
            FieldOp::Sub => Ok(self.sub(a, b)),
            FieldOp::Mul => Ok(self.mul(a, b)),
            FieldOp::Div => self.div(a, b),
        }
    }

    /// The Galois involution: `a^q` on a quadratic tower, the identity otherwise.
    pub fn tau(&self, a: Elem) -> Elem {
        match self.ext {
            Ext::Trivial => a,
            Ext::Quadratic => self.pow(a, self.q as u128),
        }
    }

    /// `a * tau(a)`.
    pub fn norm(&self, a: Elem) -> Elem {
        self.mul(a, self.tau(a))
    }

    /// Square test in `F`.
    pub fn is_square(&self, a: Elem) -> bool {
        if a.is_zero() || self.p == 2 {
            return true;
        }
        self.pow(a, ((self.q - 1) / 2) as u128) == self.one()
    }

    /// The smaller (in the library order) square root in `F`, if any.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if a.is_zero() {
            return Some(a);
        }
        if self.p == 2 {
            return Some(self.pow(a, (self.q / 2) as u128));
        }
        if !self.is_square(a) {
            return None;
        }
        // Tonelli-Shanks in the cyclic group F^x of order q - 1.
        let mut s = 0u32;
        let mut odd = self.q - 1;
        while odd.is_multiple_of(2) {
            odd /= 2;
            s += 1;
        }
        let z = (1..self.q)
            .map(|i| self.from_index(i))
            .find(|&z| !self.is_square(z))
            .expect("odd field has a non-square");
        let mut m = s;
        let mut c = self.pow(z, odd as u128);
        let mut t = self.pow(a, odd as u128);
        let mut r = self.pow(a, odd.div_ceil(2) as u128);
        while t != self.one() {
            let mut i = 0;
            let mut t2 = t;
            while t2 != self.one() {
                t2 = self.square(t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.square(b);
            }
            m = i;
            c = self.square(b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r.min(self.neg(r)))
    }

    /// The least element of `F` that is not a square (odd `q` only).
    pub fn least_nonsquare(&self) -> Option<Elem> {
        if self.p == 2 {
            return None;
        }
        self.elements(Level::Base)
            .find(|&x| !x.is_zero() && !self.is_square(x))
    }

    /// Coordinates over `F_p`: `k` of them at [`Level::Base`], all of them at
    /// [`Level::Top`].
    pub fn encode(&self, a: Elem, level: Level) -> Vec<u32> {
        let n = match level {
            Level::Base => self.k,
            Level::Top => self.width(),
        };
        a.c[..n].to_vec()
    }

    /// Parses a coordinate vector of length `k` (an element of `F`) or of
    /// the full width.
    pub fn decode(&self, coords: &[u32]) -> Result<Elem> {
        if coords.len() != self.k && coords.len() != self.width() {
            return Err(Error::MixedField(format!(
                "expected {} or {} coordinates, got {}",
                self.k,
                self.width(),
                coords.len()
            )));
        }
        let mut c = [0; MAX_COORDS];
        for (i, &x) in coords.iter().enumerate() {
            if x >= self.p {
                return Err(Error::MixedField(format!(
                    "coordinate {x} is not reduced mod {}",
                    self.p
                )));
            }
            c[i] = x;
        }
        Ok(Elem { c })
    }
}

fn prime_poly(prime: &Tower, coeffs: &[u32]) -> Poly {
    Poly::from_coeffs(coeffs.iter().map(|&c| prime.from_int(c as i64)).collect())
}

fn least_irreducible_over_prime(prime: &Tower, k: usize) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    let p = prime.p() as u64;
    let count = p.pow(k as u32);
    for idx in 0..count {
        let mut coeffs = Vec::with_capacity(k + 1);
        let mut rest = idx;
        for _ in 0..k {
            coeffs.push((rest % p) as u32);
            rest /= p;
        }
        coeffs.push(1);
        if coeffs[0] != 0 && prime_poly(prime, &coeffs).is_irreducible(prime) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over a finite field")
}

fn least_irreducible_quadratic(base: &Tower) -> (Elem, Elem) {
    let q = base.q();
    for c1 in 0..q {
        for c0 in 1..q {
            let (c0, c1) = (base.from_index(c0), base.from_index(c1));
            if Poly::from_coeffs(vec![c0, c1, base.one()]).is_irreducible(base) {
                return (c0, c1);
            }
        }
    }
    unreachable!("every finite field has an irreducible quadratic")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, k: usize, ext: Ext) -> Tower {
        Tower::new(p, k, ext, None).unwrap()
    }

    #[test]
    fn moduli_are_least_irreducible() {
        // Oracle: the least monic quadratic over F_3 without a root in F_3.
        let prime = Tower::prime(3);
        let oracle = (0..9u64)
            .map(|i| (i % 3, i / 3))
            .find(|&(c0, c1)| (0..3u64).all(|x| (x * x + c1 * x + c0) % 3 != 0))
            .unwrap();
        let f9 = f(3, 1, Ext::Quadratic);
        let m = f9.ext_modulus().unwrap();
        assert_eq!((f9.index(m[0]), f9.index(m[1])), oracle);
        assert_eq!(oracle, (1, 0)); // T^2 + 1
        assert_eq!(prime.base_modulus(), &[0, 1]);

        let f4 = f(2, 2, Ext::Trivial);
        assert_eq!(f4.base_modulus(), &[1, 1, 1]);
        assert_eq!(f4.q(), 4);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(
            Tower::new(4, 1, Ext::Trivial, None),
            Err(Error::NotPrime(4))
        );
        let seeds = Moduli {
            base: Some(vec![1, 0, 1]),
            ext: None,
        };
        assert!(matches!(
            Tower::new(5, 2, Ext::Trivial, Some(seeds)),
            Err(Error::ReducibleModulus(_))
        ));
        let f3 = f(3, 1, Ext::Trivial);
        let seeds = Moduli {
            base: None,
            ext: Some([f3.from_int(2), f3.zero(), f3.one()]),
        };
        assert!(matches!(
            Tower::new(3, 1, Ext::Quadratic, Some(seeds)),
            Err(Error::ReducibleModulus(_))
        ));
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = f(3, 1, Ext::Trivial);
        assert_eq!(f3.add(f3.from_int(2), f3.from_int(2)), f3.from_int(1));
        let f9 = f(3, 1, Ext::Quadratic);
        let w = f9.generator().unwrap();
        assert_eq!(f9.mul(w, w), f9.from_int(2));
        let f5 = f(5, 1, Ext::Trivial);
        assert_eq!(f5.pow(f5.from_int(2), 3), f5.from_int(3));
        assert_eq!(
            f5.arith(f5.one(), f5.zero(), FieldOp::Div),
            Err(Error::DivisionByZero)
        );
        let mut bad = [0u32; MAX_COORDS];
        bad[0] = 7;
        assert!(matches!(
            f5.arith(Elem { c: bad }, f5.one(), FieldOp::Add),
            Err(Error::MixedField(_))
        ));
    }

    #[test]
    fn tau_examples() {
        let f9 = f(3, 1, Ext::Quadratic);
        let w = f9.generator().unwrap();
        assert_eq!(f9.tau(w), f9.mul(f9.from_int(2), w));
        let f3 = f(3, 1, Ext::Trivial);
        assert_eq!(f3.tau(f3.from_int(2)), f3.from_int(2));
        let fixed: Vec<_> = f9
            .elements(Level::Top)
            .filter(|&a| f9.tau(a) == a)
            .collect();
        assert_eq!(fixed.len(), 3);
        assert!(fixed.iter().all(|&a| f9.contains_base(a)));
    }

    #[test]
    fn squares() {
        let f5 = f(5, 1, Ext::Trivial);
        assert!(f5.is_square(f5.from_int(4)));
        assert_eq!(f5.sqrt(f5.from_int(4)), Some(f5.from_int(2)));
        let squares: Vec<_> = (1..5).map(|x| (x * x) % 5).collect();
        assert!(!squares.contains(&2));
        assert!(!f5.is_square(f5.from_int(2)));
        assert_eq!(f5.sqrt(f5.from_int(2)), None);
        let f4 = f(2, 2, Ext::Trivial);
        for x in f4.elements(Level::Base) {
            let r = f4.sqrt(x).unwrap();
            assert_eq!(f4.square(r), x);
        }
        let f9 = f(3, 2, Ext::Trivial);
        for x in f9.elements(Level::Base).skip(1) {
            match f9.sqrt(x) {
                Some(r) => assert_eq!(f9.square(r), x),
                None => assert!(f9.elements(Level::Base).all(|y| f9.square(y) != x)),
            }
        }
    }

    #[test]
    fn enumeration_order() {
        let f3 = f(3, 1, Ext::Trivial);
        let all: Vec<_> = f3.elements(Level::Base).map(|a| f3.index(a)).collect();
        assert_eq!(all, vec![0, 1, 2]);
        let f9 = f(3, 1, Ext::Quadratic);
        let all: Vec<_> = f9.elements(Level::Top).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(&all[..3], &[f9.zero(), f9.one(), f9.from_int(2)]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn encoding() {
        let f9 = f(3, 1, Ext::Quadratic);
        let w = f9.generator().unwrap();
        let x = f9.add(f9.mul(f9.from_int(2), w), f9.one());
        assert_eq!(f9.encode(x, Level::Top), vec![1, 2]);
        assert_eq!(f9.decode(&[1, 2]).unwrap(), x);
        assert!(f9.decode(&[3, 0]).is_err());
        assert!(f9.decode(&[1, 2, 0]).is_err());
    }

    fn check_field_axioms(t: &Tower) {
        let all: Vec<_> = t.elements(Level::Top).collect();
        let q = t.q() as u128;
        for &a in &all {
            assert_eq!(t.tau(t.tau(a)), a);
            assert_eq!(t.pow(a, q * q), a);
            if t.contains_base(a) {
                assert_eq!(t.pow(a, q), a);
            }
            if !a.is_zero() {
                assert_eq!(t.mul(a, t.inv(a).unwrap()), t.one());
            }
            for &b in &all {
                assert_eq!(t.mul(a, b), t.mul(b, a));
                assert_eq!(t.sub(t.add(a, b), b), a);
                assert_eq!(t.tau(t.mul(a, b)), t.mul(t.tau(a), t.tau(b)));
                for &c in all.iter().step_by(3) {
                    assert_eq!(t.mul(a, t.add(b, c)), t.add(t.mul(a, b), t.mul(a, c)));
                    assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
                }
            }
        }
        let fixed = all.iter().filter(|&&a| t.tau(a) == a).count() as u64;
        assert_eq!(fixed, t.q());
    }

    #[test]
    fn small_fields_satisfy_axioms() {
        for (p, k, ext) in [
            (2, 1, Ext::Quadratic),
            (3, 1, Ext::Quadratic),
            (2, 2, Ext::Trivial),
            (2, 3, Ext::Trivial),
            (5, 1, Ext::Trivial),
            (7, 1, Ext::Trivial),
            (3, 2, Ext::Trivial),
        ] {
            check_field_axioms(&f(p, k, ext));
        }
    }

    #[test]
    fn big_exponents_agree() {
        let f9 = f(3, 1, Ext::Quadratic);
        let w = f9.generator().unwrap();
        let e = BigUint::from(3u32).pow(40) + 5u32;
        // w has order dividing 8.
        let small = (e.clone() % 8u32)
            .to_u32_digits()
            .first()
            .copied()
            .unwrap_or(0);
        assert_eq!(f9.pow_big(w, &e), f9.pow(w, small as u128));
    }
}
