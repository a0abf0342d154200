//! Descent through divisor fibers until every fiber over every divisor
//! `q~ >= M` of the effective modulus is near-uniform:
//! `max_xi |A* ∩ π_{q~}^{-1}(xi)| <= |A*| / q~^{1 - eps}`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::report::{Verdict, VerificationReport};
use crate::ring::RingCtx;
use crate::set::SubsetZq;
use crate::set2d::Subset2D;

/// Relative slack on the fiber bound so that exact equality is not read as a
/// violation because of rounding in `q~^{1 - eps}`.
const BOUND_SLACK: f64 = 1e-12;

/// Sets that can be sliced into residue-class fibers of `Z_q^n`.
pub trait Fibered: Clone + Sized {
    const DIM: u32;

    fn modulus(&self) -> u64;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Fiber sizes over `Z_d^n`, flat index in base `d`.
    fn fiber_counts(&self, d: u64) -> Result<Vec<usize>>;
    /// Members congruent to `xi` modulo `d`, rescaled to `(a - xi) / d` in `Z_{q/d}^n`.
    fn descend(&self, d: u64, xi: &[u64]) -> Result<Self>;
    /// Members congruent to `shift` modulo `m`, kept in place.
    fn congruent_to(&self, m: u64, shift: &[u64]) -> Self;
    fn literal(&self) -> String;

    fn density(&self) -> f64 {
        self.len() as f64 / (self.modulus() as f64).powi(Self::DIM as i32)
    }
}

fn decode(flat: usize, d: u64, dim: u32) -> Vec<u64> {
    let mut out = vec![0u64; dim as usize];
    let mut f = flat as u64;
    for slot in out.iter_mut().rev() {
        *slot = f % d;
        f /= d;
    }
    out
}

impl Fibered for SubsetZq {
    const DIM: u32 = 1;

    fn modulus(&self) -> u64 {
        SubsetZq::modulus(self)
    }

    fn len(&self) -> usize {
        SubsetZq::len(self)
    }

    fn fiber_counts(&self, d: u64) -> Result<Vec<usize>> {
        SubsetZq::fiber_counts(self, d)
    }

    fn descend(&self, d: u64, xi: &[u64]) -> Result<Self> {
        self.ctx().require_divisor(d)?;
        let target = RingCtx::shared(self.modulus() / d)?;
        let x0 = xi[0] % d;
        Ok(SubsetZq::from_elements(
            &target,
            self.iter().filter(|a| a % d == x0).map(|a| (a - x0) / d),
        ))
    }

    fn congruent_to(&self, m: u64, shift: &[u64]) -> Self {
        SubsetZq::from_elements(self.ctx(), self.iter().filter(|a| a % m == shift[0] % m))
    }

    fn literal(&self) -> String {
        self.to_string()
    }
}

impl Fibered for Subset2D {
    const DIM: u32 = 2;

    fn modulus(&self) -> u64 {
        Subset2D::modulus(self)
    }

    fn len(&self) -> usize {
        Subset2D::len(self)
    }

    fn fiber_counts(&self, d: u64) -> Result<Vec<usize>> {
        Subset2D::fiber_counts(self, d)
    }

    fn descend(&self, d: u64, xi: &[u64]) -> Result<Self> {
        self.ctx().require_divisor(d)?;
        let target = RingCtx::shared(self.modulus() / d)?;
        let (x0, y0) = (xi[0] % d, xi[1] % d);
        Subset2D::from_points(
            &target,
            self.iter()
                .filter(|(x, y)| x % d == x0 && y % d == y0)
                .map(|(x, y)| ((x - x0) / d, (y - y0) / d)),
        )
    }

    fn congruent_to(&self, m: u64, shift: &[u64]) -> Self {
        Subset2D::from_points(
            self.ctx(),
            self.iter()
                .filter(|(x, y)| x % m == shift[0] % m && y % m == shift[1] % m),
        )
        .expect("same modulus as self")
    }

    fn literal(&self) -> String {
        self.to_string()
    }
}

/// One step of the descent.
#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    /// Divisor `q_j` of the modulus current at this step.
    pub modulus: u64,
    /// Fiber label `xi_j` in `Z_{q_j}^n`.
    pub fiber: Vec<u64>,
    pub fiber_size: usize,
    /// Whether `q_j` is a prime power (the scan covers all divisors).
    pub prime_power: bool,
    /// Density of the descended set inside `Z_{q / (q_1 ... q_j)}^n`.
    pub density_after: f64,
}

#[derive(Debug, Clone)]
pub struct RegularizationResult<S> {
    /// `A*` as a subset of the original `Z_q^n`.
    pub a_star: S,
    /// `A*` translated by `shift` and divided by `q / q*`, a subset of `Z_{q*}^n`.
    pub normalized: S,
    pub q_star: u64,
    pub chain: Vec<Descent>,
    /// Common residue of all members of `A*` modulo `q / q*`.
    pub shift: Vec<u64>,
    pub epsilon: f64,
    pub m: f64,
    pub initial_density: f64,
}

impl<S: Fibered> RegularizationResult<S> {
    /// `ceil(log(1/delta) / (eps log M))`.
    pub fn chain_length_bound(&self) -> usize {
        chain_length_bound(self.initial_density, self.epsilon, self.m)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a_star": self.a_star.literal(),
            "normalized": self.normalized.literal(),
            "q_star": self.q_star,
            "shift": self.shift,
            "epsilon": self.epsilon,
            "M": self.m,
            "initial_density": self.initial_density,
            "chain": self.chain.iter().map(|d| json!({
                "q_j": d.modulus,
                "xi": d.fiber,
                "fiber_size": d.fiber_size,
                "prime_power": d.prime_power,
                "density_after": d.density_after,
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn chain_length_bound(delta: f64, epsilon: f64, m: f64) -> usize {
    ((1.0 / delta).ln() / (epsilon * m.ln())).ceil().max(0.0) as usize
}

/// `|A| / q~^{1 - eps}`.
pub fn fiber_bound(len: usize, q_tilde: u64, epsilon: f64) -> f64 {
    len as f64 / (q_tilde as f64).powf(1.0 - epsilon)
}

fn exceeds(count: usize, bound: f64) -> bool {
    count as f64 > bound * (1.0 + BOUND_SLACK)
}

/// A fiber breaking the regularity condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub q_tilde: u64,
    pub xi: Vec<u64>,
    pub count: usize,
    pub bound: f64,
}

impl Violation {
    fn severity(&self) -> f64 {
        self.count as f64 / self.bound
    }
}

/// Worst violating fiber over divisors `q~ >= M` of the set's modulus, or
/// `None` if the set is regular. Ties go to the smallest `q~`, then the
/// smallest fiber label.
pub fn worst_violation<S: Fibered>(set: &S, epsilon: f64, m: f64) -> Option<Violation> {
    let ctx = RingCtx::new(set.modulus()).ok()?;
    let mut worst: Option<Violation> = None;
    for &d in ctx.divisors().iter().filter(|&&d| d as f64 >= m) {
        let bound = fiber_bound(set.len(), d, epsilon);
        let counts = set.fiber_counts(d).ok()?;
        for (flat, &count) in counts.iter().enumerate() {
            if !exceeds(count, bound) {
                continue;
            }
            let v = Violation {
                q_tilde: d,
                xi: decode(flat, d, S::DIM),
                count,
                bound,
            };
            if worst.as_ref().is_none_or(|w| v.severity() > w.severity()) {
                worst = Some(v);
            }
        }
    }
    worst
}

pub fn regularize<S: Fibered>(set: &S, epsilon: f64, m: f64) -> Result<RegularizationResult<S>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} not in (0,1)")));
    }
    if m.is_nan() || m < 2.0 {
        return Err(Error::InvalidParameter(format!("M = {m} must be >= 2")));
    }
    let q = set.modulus();
    let initial_density = set.density();
    let mut current = set.clone();
    let mut chain = Vec::new();
    let mut step = 1u64;
    let mut shift = vec![0u64; S::DIM as usize];

    while let Some(v) = worst_violation(&current, epsilon, m) {
        current = current.descend(v.q_tilde, &v.xi)?;
        for (s, x) in shift.iter_mut().zip(&v.xi) {
            *s += step * x;
        }
        step *= v.q_tilde;
        chain.push(Descent {
            modulus: v.q_tilde,
            fiber: v.xi,
            fiber_size: v.count,
            prime_power: RingCtx::new(v.q_tilde).map(|c| c.omega() == 1).unwrap_or(false),
            density_after: current.density(),
        });
    }

    if let Some(v) = worst_violation(&current, epsilon, m) {
        return Err(Error::InvalidParameter(format!(
            "regularization post-condition failed at q~={} xi={:?}",
            v.q_tilde, v.xi
        )));
    }

    Ok(RegularizationResult {
        a_star: set.congruent_to(step, &shift),
        normalized: current,
        q_star: q / step,
        chain,
        shift,
        epsilon,
        m,
        initial_density,
    })
}

/// Runs the descent and asserts regularity of the normalized `A*` and the
/// chain-length bound.
pub fn regularization_report<S: Fibered>(set: &S, epsilon: f64, m: f64) -> Result<VerificationReport> {
    let r = regularize(set, epsilon, m)?;
    let bound = r.chain_length_bound();
    let regular = worst_violation(&r.normalized, epsilon, m).is_none();
    Ok(VerificationReport::new(
        "regularize",
        "A* regular over all q~ | q*, q~ >= M; chain <= log(1/delta)/(eps log M)",
        json!({ "q": set.modulus(), "A": set.literal(), "eps": epsilon, "M": m }),
    )
    .sides(r.chain.len() as f64, bound as f64)
    .verdict(Verdict::from_bool(regular && r.chain.len() <= bound))
    .witness(r.to_json()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ctx(q: u64) -> Arc<RingCtx> {
        RingCtx::shared(q).unwrap()
    }

    /// Fiber condition recomputed by scanning elements per divisor.
    fn regular_by_scan(set: &SubsetZq, eps: f64, m: f64) -> bool {
        let q = set.modulus();
        (1..=q)
            .filter(|d| q.is_multiple_of(*d) && *d as f64 >= m)
            .all(|d| {
                (0..d).all(|xi| {
                    let c = set.iter().filter(|a| a % d == xi).count();
                    c as f64 <= set.len() as f64 / (d as f64).powf(1.0 - eps) * (1.0 + 1e-12)
                })
            })
    }

    #[test]
    fn full_set_is_regular() {
        for q in [12u64, 30, 64] {
            let a = SubsetZq::full(&ctx(q));
            let r = regularize(&a, 0.25, 3.0).unwrap();
            assert_eq!(r.q_star, q);
            assert!(r.chain.is_empty());
            assert_eq!(r.a_star, a);
        }
    }

    #[test]
    fn single_coset_descends_once() {
        let a = SubsetZq::from_elements(&ctx(12), [0, 3, 6, 9]);
        let r = regularize(&a, 0.25, 3.0).unwrap();
        assert_eq!(r.chain.len(), 1);
        assert_eq!(r.chain[0].modulus, 3);
        assert_eq!(r.chain[0].fiber, vec![0]);
        assert!(r.chain[0].prime_power);
        assert_eq!(r.q_star, 4);
        assert_eq!(r.a_star, a);
        assert_eq!(r.normalized, SubsetZq::full(&ctx(4)));
        assert_eq!(r.shift, vec![0]);
    }

    #[test]
    fn large_sets_stay_put() {
        // q=12, M=5: divisors >= 5 are 6 and 12. |A|=11 gives bounds 11/6^0.5 ≈ 4.5
        // and 11/12^0.5 ≈ 3.2, while fibers have at most 2 and 1 elements.
        let mut a = SubsetZq::full(&ctx(12));
        a.remove(7);
        let r = regularize(&a, 0.5, 5.0).unwrap();
        assert!(r.chain.is_empty());
        assert_eq!(r.q_star, 12);
        assert_eq!(r.a_star, a);
    }

    #[test]
    fn bad_parameters() {
        let a = SubsetZq::from_elements(&ctx(12), [1]);
        assert!(regularize(&SubsetZq::empty(&ctx(12)), 0.5, 2.0).is_err());
        assert!(regularize(&a, 0.0, 2.0).is_err());
        assert!(regularize(&a, 1.0, 2.0).is_err());
        assert!(regularize(&a, 0.5, 1.5).is_err());
    }

    #[test]
    fn shift_and_normalization_agree() {
        let c = ctx(360);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = rng.gen_range(1..60);
            let a = SubsetZq::from_elements(&c, sample(&mut rng, 360, k).into_iter().map(|x| x as u64));
            let r = regularize(&a, 0.25, 2.0).unwrap();
            let step = 360 / r.q_star;
            let back: Vec<u64> = r.normalized.iter().map(|z| r.shift[0] + step * z).collect();
            assert_eq!(back, r.a_star.to_vec());
            assert!(r.a_star.is_subset(&a));
            assert_eq!(r.a_star.project(step).unwrap().len(), 1);
            assert!(regular_by_scan(&r.normalized, 0.25, 2.0));
            assert!(r.chain.len() <= r.chain_length_bound());
            let s = r.chain.len() as i32;
            assert!(r.normalized.density() >= r.initial_density * 2f64.powf(0.25 * s as f64) - 1e-12);
            for step in &r.chain {
                assert!(step.modulus as f64 >= 2.0);
                assert!((step.modulus as f64) <= r.initial_density.powf(-4.0) + 1e-9);
            }
        }
    }

    #[test]
    fn two_dimensional_descent() {
        let c = ctx(6);
        // everything lives in the fiber (0,0) mod 3
        let a = Subset2D::from_points(&c, [(0, 0), (3, 0), (0, 3), (3, 3)]).unwrap();
        let r = regularize(&a, 0.25, 2.0).unwrap();
        assert!(!r.chain.is_empty());
        assert!(r.a_star.is_subset(&a));
        assert!(worst_violation(&r.normalized, 0.25, 2.0).is_none());
        assert!(r.chain.len() <= r.chain_length_bound());
    }
}
