use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Product `∏_{p∈S} √p` over a set of distinct primes, stored sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u64>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn sqrt(p: u64) -> Self {
        Monomial(vec![p])
    }

    pub fn primes(&self) -> &[u64] {
        &self.0
    }

    /// Symmetric difference and the product of the shared primes
    /// (`√p · √p = p`).
    fn mul(&self, other: &Monomial) -> (Monomial, BigInt) {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut square = BigInt::one();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    square *= a[i];
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        (Monomial(out), square)
    }

    /// `∏ p` as an integer.
    fn radicand(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, &p| acc * p)
    }

    fn to_f64(&self) -> f64 {
        self.0.iter().map(|&p| (p as f64).sqrt()).product()
    }
}

/// Element `Σ_S c_S ∏_{p∈S} √p` with exact rational `c_S`; zeros are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiQuad {
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiQuad {
    pub fn zero() -> Self {
        MultiQuad::default()
    }

    pub fn one() -> Self {
        MultiQuad::rational(BigRational::one())
    }

    pub fn rational(c: BigRational) -> Self {
        MultiQuad::monomial(Monomial::one(), c)
    }

    pub fn integer(c: i64) -> Self {
        MultiQuad::rational(BigRational::from_integer(c.into()))
    }

    /// `√p`; `p` is taken to be prime.
    pub fn sqrt_prime(p: u64) -> Self {
        MultiQuad::monomial(Monomial::sqrt(p), BigRational::one())
    }

    /// `c · √p`.
    pub fn scaled_sqrt_prime(c: i64, p: u64) -> Self {
        MultiQuad::monomial(Monomial::sqrt(p), BigRational::from_integer(c.into()))
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiQuad { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Distinct primes referenced by any monomial.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.terms.keys().flat_map(|m| m.0.iter().copied()).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// Term-by-term floating sum. Fast, but large cancelling sums (big
    /// determinants) lose most of their digits; see [`MultiQuad::to_f64`].
    pub fn approx_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_f64().unwrap_or(f64::NAN) * m.to_f64())
            .sum()
    }

    /// Correctly signed value to about 17 digits, from interval brackets
    /// refined until their relative width drops below `2^−60`.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut bits = 64;
        loop {
            let (lo, hi) = self.interval(bits);
            let width = &hi - &lo;
            let magnitude = lo.abs().max(hi.abs());
            let tight = width * BigRational::from_integer(BigInt::one() << 60u32) <= magnitude;
            if tight || bits >= 8192 {
                let mid = (lo + hi) / BigRational::from_integer(2.into());
                return mid.to_f64().unwrap_or(f64::NAN);
            }
            bits *= 2;
        }
    }

    /// Rational bounds `lo ≤ value ≤ hi`, each square root bracketed to
    /// `bits` binary digits.
    pub fn interval(&self, bits: u32) -> (BigRational, BigRational) {
        let scale = BigInt::one() << bits;
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (m, c) in &self.terms {
            // floor(√(P·4^bits)) / 2^bits ≤ √P < (floor + 1) / 2^bits
            let root = (m.radicand() << (2 * bits)).sqrt();
            let exact = &root * &root == (m.radicand() << (2 * bits));
            let down = BigRational::new(root.clone(), scale.clone());
            let up = if exact { down.clone() } else { BigRational::new(root + 1, scale.clone()) };
            if c.is_positive() {
                lo += c * &down;
                hi += c * &up;
            } else {
                lo += c * &up;
                hi += c * &down;
            }
        }
        (lo, hi)
    }

    /// Exact sign, found by refining [`MultiQuad::interval`] until it excludes
    /// zero. `None` only if 4096-bit brackets still straddle zero.
    pub fn certified_sign(&self) -> Option<Ordering> {
        if self.is_zero() {
            return Some(Ordering::Equal);
        }
        let mut bits = 64;
        while bits <= 4096 {
            let (lo, hi) = self.interval(bits);
            if lo.is_positive() {
                return Some(Ordering::Greater);
            }
            if hi.is_negative() {
                return Some(Ordering::Less);
            }
            bits *= 2;
        }
        None
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self ± factor · other`, avoiding a temporary product.
    pub(crate) fn add_product(&mut self, factor: &MultiQuad, other: &MultiQuad, negate: bool) {
        for (ma, ca) in &factor.terms {
            for (mb, cb) in &other.terms {
                let (m, square) = ma.mul(mb);
                let c = ca * cb * BigRational::from_integer(square);
                self.add_term(m, if negate { -c } else { c });
            }
        }
    }
}

impl Add<&MultiQuad> for &MultiQuad {
    type Output = MultiQuad;

    fn add(self, rhs: &MultiQuad) -> MultiQuad {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&MultiQuad> for &MultiQuad {
    type Output = MultiQuad;

    fn sub(self, rhs: &MultiQuad) -> MultiQuad {
        self + &(-rhs)
    }
}

impl Neg for &MultiQuad {
    type Output = MultiQuad;

    fn neg(self) -> MultiQuad {
        MultiQuad { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul<&MultiQuad> for &MultiQuad {
    type Output = MultiQuad;

    fn mul(self, rhs: &MultiQuad) -> MultiQuad {
        let mut out = MultiQuad::zero();
        out.add_product(self, rhs, false);
        out
    }
}

impl fmt::Display for MultiQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let c = c.abs();
            let radicand = m.radicand();
            match (c.is_one(), m.0.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (true, false) => write!(f, "√{radicand}")?,
                (false, false) => write!(f, "{c}·√{radicand}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(p: u64) -> MultiQuad {
        MultiQuad::sqrt_prime(p)
    }

    #[test]
    fn root_squared_is_rational() {
        let prod = &sq(2) * &sq(2);
        assert_eq!(prod, MultiQuad::integer(2));
        assert_eq!(prod.terms().next().unwrap().0, &Monomial::one());
    }

    #[test]
    fn distinct_roots_multiply_to_new_monomial() {
        let prod = &sq(2) * &sq(3);
        assert_eq!(prod.num_terms(), 1);
        let (m, c) = prod.terms().next().unwrap();
        assert_eq!(m.primes(), &[2, 3]);
        assert!(c.is_one());
        assert_eq!(prod.to_string(), "√6");
    }

    #[test]
    fn difference_of_squares() {
        let a = &sq(2) + &sq(3);
        let b = &sq(2) - &sq(3);
        assert_eq!(&a * &b, MultiQuad::integer(-1));
    }

    #[test]
    fn zero_detection() {
        assert!(MultiQuad::zero().is_zero());
        let d = &(&sq(2) * &sq(7)) - &(&sq(3) * &sq(5));
        assert!(!d.is_zero());
        assert_eq!(d.to_string(), "√14 - √15");
        assert!(d.to_f64() < 0.0);
        assert!((&sq(5) - &sq(5)).is_zero());
    }

    #[test]
    fn interval_brackets_value() {
        let d = &(&sq(2) * &sq(7)) - &(&sq(3) * &sq(5));
        let (lo, hi) = d.interval(40);
        let x = d.to_f64();
        assert!(lo.to_f64().unwrap() <= x + 1e-15 && x - 1e-15 <= hi.to_f64().unwrap());
        assert_eq!(d.certified_sign(), Some(Ordering::Less));
        assert_eq!(MultiQuad::integer(4).interval(8).0, BigRational::from_integer(4.into()));
    }
}
