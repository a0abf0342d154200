//! Arithmetic context for one modulus `q`: factorization, divisor lattice,
//! unit group metadata and the usual modular helpers.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_MODULUS: u64 = 1 << 20;

/// Immutable context for `Z_q`. Residues handed out by its methods are
/// always canonical representatives in `[0, q)`.
pub struct RingCtx {
    q: u64,
    factors: Vec<(u64, u32)>,
    divisors: Vec<u64>,
    phi: u64,
    roots: OnceLock<Vec<Complex64>>,
}

impl RingCtx {
    /// Builds the context by trial division.
    ///
    /// `q = 1` (the zero ring) is accepted so that projections onto the
    /// trivial quotient and fully collapsed regularizations stay representable.
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 || q > MAX_MODULUS {
            return Err(Error::ModulusOutOfRange(q));
        }
        let factors = factorize(q);
        let mut divisors = vec![1u64];
        for &(p, e) in &factors {
            let current = divisors.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..current {
                    divisors.push(divisors[i] * pk);
                }
            }
        }
        divisors.sort_unstable();
        let phi = factors.iter().fold(q, |acc, &(p, _)| acc / p * (p - 1));
        Ok(Self {
            q,
            factors,
            divisors,
            phi,
            roots: OnceLock::new(),
        })
    }

    pub fn shared(q: u64) -> Result<Arc<Self>> {
        Self::new(q).map(Arc::new)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `(p, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// All divisors in ascending order; starts with 1 and ends with `q`.
    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn tau(&self) -> u64 {
        self.divisors.len() as u64
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Smallest prime factor, `None` for `q = 1`.
    pub fn least_prime(&self) -> Option<u64> {
        self.factors.first().map(|f| f.0)
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|f| f.1 == 1)
    }

    /// Möbius function of `q`.
    pub fn mobius(&self) -> i64 {
        if !self.is_squarefree() {
            0
        } else if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn divides_modulus(&self, d: u64) -> bool {
        d != 0 && self.q.is_multiple_of(d)
    }

    pub fn require_divisor(&self, d: u64) -> Result<()> {
        if self.divides_modulus(d) {
            Ok(())
        } else {
            Err(Error::NotADivisor { d, q: self.q })
        }
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.q
    }

    #[inline]
    pub fn reduce_signed(&self, x: i64) -> u64 {
        x.rem_euclid(self.q as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.q - a % self.q) % self.q
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a % self.q) * (b % self.q) % self.q
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.q)
    }

    pub fn is_unit(&self, x: u64) -> bool {
        gcd(x % self.q, self.q) == 1
    }

    /// Units of `Z_q` in ascending order.
    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.q).filter(move |&x| self.is_unit(x))
    }

    pub fn mod_inverse(&self, x: u64) -> Result<u64> {
        inverse_mod(x % self.q, self.q).ok_or(Error::NotAUnit { x, q: self.q })
    }

    /// Prime-power moduli `p_i^{rho_i}` of the CRT decomposition.
    pub fn crt_moduli(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, e)| p.pow(e)).collect()
    }

    pub fn crt_split(&self, x: u64) -> Vec<u64> {
        let x = x % self.q;
        self.crt_moduli().into_iter().map(|m| x % m).collect()
    }

    pub fn crt_combine(&self, parts: &[u64]) -> Result<u64> {
        let moduli = self.crt_moduli();
        if parts.len() != moduli.len() {
            return Err(Error::LengthMismatch {
                got: parts.len(),
                want: moduli.len(),
            });
        }
        let mut x = 0u64;
        for (&r, &m) in parts.iter().zip(&moduli) {
            let cofactor = self.q / m;
            // cofactor is coprime to m by construction
            let inv = inverse_mod(cofactor % m, m).unwrap_or(0);
            let term = (r % m) * inv % m * cofactor % self.q;
            x = (x + term) % self.q;
        }
        Ok(x)
    }

    /// The divisor `Q_1 = prod p_j^{gamma_j}` where `gamma_j <= rho_j` is
    /// maximal with `p_j^{gamma_j} <= m`.
    pub fn compute_q1(&self, m: f64) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| {
                let mut pk = 1u64;
                for _ in 0..e {
                    if ((pk * p) as f64) <= m {
                        pk *= p;
                    } else {
                        break;
                    }
                }
                pk
            })
            .product()
    }

    /// Table of `e_q(k) = exp(2 pi i k / q)` for `k in [0, q)`, built on first use.
    pub fn roots_of_unity(&self) -> &[Complex64] {
        self.roots.get_or_init(|| {
            let q = self.q as f64;
            (0..self.q)
                .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / q))
                .collect()
        })
    }
}

impl fmt::Debug for RingCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingCtx")
            .field("q", &self.q)
            .field("factors", &self.factors)
            .finish()
    }
}

impl PartialEq for RingCtx {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for RingCtx {}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut b = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc
}

/// Inverse of `x` modulo `m` via the extended Euclidean algorithm.
pub fn inverse_mod(x: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (x as i64, m as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let k = old_r / r;
        (old_r, r) = (r, old_r - k * r);
        (old_s, s) = (s, old_s - k * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i64) as u64)
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// Legendre symbol `(a / p)` by Euler's criterion.
pub fn legendre_symbol(a: i64, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotAnOddPrime(p));
    }
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(a, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn context_for_twelve() {
        let c = RingCtx::new(12).unwrap();
        assert_eq!(c.factors(), &[(2, 2), (3, 1)]);
        assert_eq!(c.phi(), 4);
        assert_eq!(c.tau(), 6);
        assert_eq!(c.omega(), 2);
        assert_eq!(c.least_prime(), Some(2));
    }

    #[test]
    fn context_for_prime_and_squarefree() {
        let c = RingCtx::new(7).unwrap();
        assert_eq!(c.factors(), &[(7, 1)]);
        assert_eq!((c.phi(), c.tau(), c.omega()), (6, 2, 1));
        let c = RingCtx::new(30).unwrap();
        assert_eq!(c.divisors(), &[1, 2, 3, 5, 6, 10, 15, 30]);
        assert!(c.is_squarefree());
    }

    #[test]
    fn modulus_range() {
        assert_eq!(RingCtx::new(0).unwrap_err(), Error::ModulusOutOfRange(0));
        assert!(RingCtx::new(MAX_MODULUS).is_ok());
        assert!(RingCtx::new(MAX_MODULUS + 1).is_err());
    }

    #[test]
    fn inverses() {
        let c7 = RingCtx::new(7).unwrap();
        assert_eq!(c7.mod_inverse(3), Ok(5));
        let c12 = RingCtx::new(12).unwrap();
        assert_eq!(c12.mod_inverse(1), Ok(1));
        assert_eq!(c12.mod_inverse(4), Err(Error::NotAUnit { x: 4, q: 12 }));
    }

    #[test]
    fn crt_examples() {
        let c = RingCtx::new(12).unwrap();
        assert_eq!(c.crt_split(7), vec![3, 1]);
        assert_eq!(c.crt_split(0), vec![0, 0]);
        assert_eq!(c.crt_combine(&[3, 1]), Ok(7));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(4, 7), Ok(1));
        assert_eq!(legendre_symbol(0, 5), Ok(0));
        // squares mod 7 are {1, 2, 4}
        assert_eq!(legendre_symbol(3, 7), Ok(-1));
        assert!(legendre_symbol(1, 2).is_err());
        assert!(legendre_symbol(1, 9).is_err());
    }

    #[test]
    fn legendre_is_multiplicative() {
        for p in (3..=31u64).filter(|&p| is_prime(p)) {
            for a in 0..p as i64 {
                for b in 0..p as i64 {
                    let lhs = legendre_symbol(a * b, p).unwrap();
                    let rhs = legendre_symbol(a, p).unwrap() * legendre_symbol(b, p).unwrap();
                    assert_eq!(lhs, rhs, "p={p} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn legendre_matches_square_enumeration() {
        for p in (3..=31u64).filter(|&p| is_prime(p)) {
            let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 1..p {
                let expected = if squares.contains(&a) { 1 } else { -1 };
                assert_eq!(legendre_symbol(a as i64, p).unwrap(), expected);
            }
        }
    }

    #[test]
    fn q1_examples() {
        assert_eq!(RingCtx::new(360).unwrap().compute_q1(4.0), 12);
        assert_eq!(RingCtx::new(7).unwrap().compute_q1(2.0), 1);
        assert_eq!(RingCtx::new(30).unwrap().compute_q1(30.0), 30);
    }

    #[test]
    fn q1_bound_and_maximality() {
        for q in 2..=1000u64 {
            let c = RingCtx::new(q).unwrap();
            for m in [2.0f64, 4.0, 8.0, 16.0] {
                let q1 = c.compute_q1(m);
                assert_eq!(q % q1, 0);
                assert!((q1 as f64) <= m.powi(c.omega() as i32));
                for &(p, e) in c.factors() {
                    let mut gamma = 0;
                    let mut t = q1;
                    while t.is_multiple_of(p) {
                        t /= p;
                        gamma += 1;
                    }
                    assert!((p.pow(gamma) as f64) <= m);
                    if gamma < e {
                        assert!((p.pow(gamma + 1) as f64) > m, "q={q} m={m} p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn invariants_small_moduli() {
        for q in 1..=500u64 {
            let c = RingCtx::new(q).unwrap();
            let prod: u64 = c.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, q);
            assert!(c.factors().windows(2).all(|w| w[0].0 < w[1].0));
            let tau: u64 = c.factors().iter().map(|&(_, e)| e as u64 + 1).product();
            assert_eq!(c.tau(), tau);
            let naive_div: Vec<u64> = (1..=q).filter(|d| q % d == 0).collect();
            assert_eq!(c.divisors(), naive_div.as_slice());
            assert_eq!(c.phi(), (0..q).filter(|&x| gcd(x, q) == 1).count() as u64);
        }
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(q in 2u64..5000, x in 0u64..5000) {
            let c = RingCtx::new(q).unwrap();
            let x = x % q;
            match c.mod_inverse(x) {
                Ok(y) => prop_assert_eq!(c.mul(x, y), 1),
                Err(_) => prop_assert!(gcd(x, q) > 1),
            }
        }

        #[test]
        fn crt_roundtrip(q in 1u64..50_000, x in 0u64..50_000) {
            let c = RingCtx::new(q).unwrap();
            let x = x % q;
            prop_assert_eq!(c.crt_combine(&c.crt_split(x)).unwrap(), x);
        }
    }
}
