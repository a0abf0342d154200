//! The matrix family `G ⊂ SL_2(Z_q)` attached to a planar set, its Möbius
//! action on `Z_q` and its multiplicative energy.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{Verdict, VerificationReport};
use crate::ring::RingCtx;
use crate::set::SubsetZq;
use crate::set2d::Subset2D;

/// `((a, b), (c, d))` over `Z_q`.
#[derive(Clone)]
pub struct Mat2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    ctx: Arc<RingCtx>,
}

impl PartialEq for Mat2 {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key() && self.ctx.modulus() == other.ctx.modulus()
    }
}

impl Eq for Mat2 {}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(({},{}),({},{})) mod {}",
            self.a,
            self.b,
            self.c,
            self.d,
            self.ctx.modulus()
        )
    }
}

impl Mat2 {
    pub fn new(ctx: &Arc<RingCtx>, a: u64, b: u64, c: u64, d: u64) -> Self {
        Self {
            a: ctx.reduce(a),
            b: ctx.reduce(b),
            c: ctx.reduce(c),
            d: ctx.reduce(d),
            ctx: Arc::clone(ctx),
        }
    }

    pub fn identity(ctx: &Arc<RingCtx>) -> Self {
        Self::new(ctx, 1, 0, 0, 1)
    }

    /// `((-α, αβ + 1), (-1, β))`.
    pub fn from_point(ctx: &Arc<RingCtx>, alpha: u64, beta: u64) -> Self {
        let r = ctx;
        Self::new(ctx, r.neg(alpha), r.add(r.mul(alpha, beta), 1), r.neg(1), beta)
    }

    pub fn ctx(&self) -> &Arc<RingCtx> {
        &self.ctx
    }

    pub fn key(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> u64 {
        self.ctx
            .sub(self.ctx.mul(self.a, self.d), self.ctx.mul(self.b, self.c))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let r = &self.ctx;
        Mat2::new(
            r,
            r.add(r.mul(self.a, o.a), r.mul(self.b, o.c)),
            r.add(r.mul(self.a, o.b), r.mul(self.b, o.d)),
            r.add(r.mul(self.c, o.a), r.mul(self.d, o.c)),
            r.add(r.mul(self.c, o.b), r.mul(self.d, o.d)),
        )
    }

    /// Adjugate; the inverse for determinant one.
    pub fn adjugate(&self) -> Mat2 {
        let r = &self.ctx;
        Mat2::new(r, self.d, r.neg(self.b), r.neg(self.c), self.a)
    }

    pub fn inverse(&self) -> Result<Mat2> {
        if self.det() != 1 % self.ctx.modulus() {
            return Err(Error::InvalidParameter(format!("{self:?} is not in SL_2")));
        }
        Ok(self.adjugate())
    }
}

/// One matrix per point of `𝒜`, in point order.
pub fn matrices_from_set(a: &Subset2D) -> Result<Vec<Mat2>> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let ctx = a.ctx();
    let g: Vec<Mat2> = a.iter().map(|(x, y)| Mat2::from_point(ctx, x, y)).collect();
    debug_assert!(g.iter().all(|m| m.det() == 1 % ctx.modulus()));
    Ok(g)
}

/// `(a x + b) / (c x + d)`.
pub fn mobius_apply(g: &Mat2, x: u64) -> Result<u64> {
    let r = g.ctx();
    let den = r.add(r.mul(g.c, x), g.d);
    let inv = r.mod_inverse(den).map_err(|_| Error::DenominatorNotUnit {
        denominator: den,
        q: r.modulus(),
    })?;
    Ok(r.mul(r.add(r.mul(g.a, x), g.b), inv))
}

/// `#{(a, b, g) in A × B × G : a = g b}`.
pub fn solve_ga_eq_b(a: &SubsetZq, b: &SubsetZq, g: &[Mat2]) -> Result<u64> {
    if a.modulus() != b.modulus() {
        return Err(Error::ModulusMismatch {
            left: a.modulus(),
            right: b.modulus(),
        });
    }
    let mut count = 0;
    for m in g {
        if m.ctx().modulus() != a.modulus() {
            return Err(Error::ModulusMismatch {
                left: a.modulus(),
                right: m.ctx().modulus(),
            });
        }
        for x in b.iter() {
            if let Ok(y) = mobius_apply(m, x) {
                count += a.contains(y) as u64;
            }
        }
    }
    Ok(count)
}

/// `#{g1 g2^{-1} = g3 g4^{-1}}`, as the sum of squared multiplicities of `g1 g2^{-1}`.
pub fn multiplicative_energy(g: &[Mat2]) -> Result<u64> {
    let inv = g.iter().map(Mat2::inverse).collect::<Result<Vec<_>>>()?;
    let mut counts: HashMap<[u64; 4], u64> = HashMap::with_capacity(g.len() * g.len());
    for x in g {
        for y in &inv {
            *counts.entry(x.mul(y).key()).or_default() += 1;
        }
    }
    Ok(counts.values().map(|c| c * c).sum())
}

/// `E(G) <= τ(q) q |G|^2` for `G` built from `𝒜`, asserted for odd `q`.
pub fn energy_bound_report(a: &Subset2D) -> Result<VerificationReport> {
    let g = matrices_from_set(a)?;
    let ctx = a.ctx();
    let q = ctx.modulus();
    let energy = multiplicative_energy(&g)?;
    let n = g.len() as u128;
    let bound = ctx.tau() as u128 * q as u128 * n * n;
    Ok(VerificationReport::new(
        "energy",
        "E(G) <= tau(q) q |G|^2",
        json!({ "q": q, "A": a.body_literal() }),
    )
    .sides(energy as f64, bound as f64)
    .verdict(Verdict::graded(q % 2 == 1, energy as u128 <= bound))
    .witness(json!({ "size": g.len(), "energy": energy, "bound": bound as u64 })))
}
