//! Dense bit-indexed subsets of `Z_q`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::ring::RingCtx;

/// A subset of `Z_q`, bit `x` set iff `x` is a member.
#[derive(Clone)]
pub struct SubsetZq {
    ctx: Arc<RingCtx>,
    bits: BitVec,
    size: usize,
}

impl SubsetZq {
    pub fn empty(ctx: &Arc<RingCtx>) -> Self {
        Self {
            ctx: Arc::clone(ctx),
            bits: BitVec::zeros(ctx.modulus() as usize),
            size: 0,
        }
    }

    pub fn full(ctx: &Arc<RingCtx>) -> Self {
        Self::from_bits(ctx, BitVec::ones(ctx.modulus() as usize))
    }

    /// Elements are reduced modulo `q`; duplicates collapse.
    pub fn from_elements<I: IntoIterator<Item = u64>>(ctx: &Arc<RingCtx>, elems: I) -> Self {
        let mut bits = BitVec::zeros(ctx.modulus() as usize);
        for x in elems {
            bits.set(ctx.reduce(x) as usize);
        }
        Self::from_bits(ctx, bits)
    }

    pub fn from_signed<I: IntoIterator<Item = i64>>(ctx: &Arc<RingCtx>, elems: I) -> Self {
        Self::from_elements(ctx, elems.into_iter().map(|x| ctx.reduce_signed(x)))
    }

    pub fn singleton(ctx: &Arc<RingCtx>, x: u64) -> Self {
        Self::from_elements(ctx, [x])
    }

    pub fn from_bits(ctx: &Arc<RingCtx>, bits: BitVec) -> Self {
        debug_assert_eq!(bits.len() as u64, ctx.modulus());
        let size = bits.count_ones();
        Self {
            ctx: Arc::clone(ctx),
            bits,
            size,
        }
    }

    /// Parses the body of a set literal, e.g. `{0, 1, 3}`, against `ctx`.
    pub fn parse_elements(ctx: &Arc<RingCtx>, body: &str) -> Result<Self> {
        let body = strip_braces(body.trim())?;
        let mut elems = Vec::new();
        for tok in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad element `{tok}`")))?;
            elems.push(v);
        }
        Ok(Self::from_signed(ctx, elems))
    }

    #[inline]
    pub fn ctx(&self) -> &Arc<RingCtx> {
        &self.ctx
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.ctx.modulus()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn density(&self) -> f64 {
        self.size as f64 / self.modulus() as f64
    }

    pub fn is_full(&self) -> bool {
        self.size as u64 == self.modulus()
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        x < self.modulus() && self.bits.get(x as usize)
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.ones_iter().map(|i| i as u64)
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn insert(&mut self, x: u64) {
        let x = self.ctx.reduce(x) as usize;
        if !self.bits.get(x) {
            self.bits.set(x);
            self.size += 1;
        }
    }

    pub fn remove(&mut self, x: u64) {
        let x = self.ctx.reduce(x) as usize;
        if self.bits.get(x) {
            self.bits.clear(x);
            self.size -= 1;
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.modulus() != other.modulus() {
            return Err(Error::ModulusMismatch {
                left: self.modulus(),
                right: other.modulus(),
            });
        }
        Ok(())
    }

    fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(())
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut bits = self.bits.clone();
        bits.or_assign(&other.bits);
        Ok(Self::from_bits(&self.ctx, bits))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut bits = self.bits.clone();
        bits.and_assign(&other.bits);
        Ok(Self::from_bits(&self.ctx, bits))
    }

    pub fn complement(&self) -> Self {
        Self::from_bits(&self.ctx, self.bits.not())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.bits.is_subset(&other.bits)
    }

    /// `{-a : a in A}`.
    pub fn negate(&self) -> Self {
        Self::from_elements(&self.ctx, self.iter().map(|a| self.ctx.neg(a)))
    }

    /// `A + s`.
    pub fn translate(&self, s: u64) -> Self {
        let mut bits = BitVec::zeros(self.bits.len());
        self.bits.or_rotated_into(self.ctx.reduce(s) as usize, &mut bits);
        Self::from_bits(&self.ctx, bits)
    }

    /// `lambda * A = {lambda a : a in A}`.
    pub fn dilate(&self, lambda: u64) -> Self {
        let q = self.modulus();
        let l = lambda % q;
        let mut bits = BitVec::zeros(q as usize);
        for a in self.iter() {
            bits.set((a * l % q) as usize);
        }
        Self::from_bits(&self.ctx, bits)
    }

    /// `A + B`.
    pub fn sumset(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        self.require_nonempty()?;
        other.require_nonempty()?;
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut bits = BitVec::zeros(self.bits.len());
        for s in small.iter() {
            large.bits.or_rotated_into(s as usize, &mut bits);
            if bits.all() {
                break;
            }
        }
        Ok(Self::from_bits(&self.ctx, bits))
    }

    /// `A - B`.
    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.sumset(&other.negate())
    }

    /// `A - A`.
    pub fn difference_set(&self) -> Result<Self> {
        self.minus(self)
    }

    /// `nA = A + ... + A` with `n` copies.
    pub fn higher_sumset(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("higher sumset needs n >= 1".into()));
        }
        self.require_nonempty()?;
        let mut acc = self.clone();
        for _ in 1..n {
            if acc.is_full() {
                break;
            }
            acc = acc.sumset(self)?;
        }
        Ok(acc)
    }

    /// `kA - lA`; either count may be zero but not both.
    pub fn sum_difference(&self, k: usize, l: usize) -> Result<Self> {
        match (k, l) {
            (0, 0) => Err(Error::InvalidParameter("kA - lA needs k + l >= 1".into())),
            (k, 0) => self.higher_sumset(k),
            (0, l) => Ok(self.higher_sumset(l)?.negate()),
            (k, l) => self.higher_sumset(k)?.minus(&self.higher_sumset(l)?),
        }
    }

    /// `AB = {ab : a in A, b in B}`.
    pub fn product_set(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let q = self.modulus();
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let stride: Vec<u64> = large.iter().collect();
        let mut bits = BitVec::zeros(q as usize);
        for a in small.iter() {
            for &b in &stride {
                bits.set((a * b % q) as usize);
            }
        }
        Ok(Self::from_bits(&self.ctx, bits))
    }

    /// Image under reduction `Z_q -> Z_{q*}`.
    pub fn project(&self, q_star: u64) -> Result<Self> {
        self.ctx.require_divisor(q_star)?;
        let target = RingCtx::shared(q_star)?;
        Ok(Self::from_elements(&target, self.iter().map(|a| a % q_star)))
    }

    /// `eta(xi) = |{a in A : a = xi (mod q2)}|` for `xi in [0, q2)`.
    pub fn fiber_counts(&self, q2: u64) -> Result<Vec<usize>> {
        self.ctx.require_divisor(q2)?;
        let mut eta = vec![0usize; q2 as usize];
        for a in self.iter() {
            eta[(a % q2) as usize] += 1;
        }
        Ok(eta)
    }

    /// `A ∩ π_d^{-1}(xi)`, kept inside `Z_q`.
    pub fn fiber(&self, d: u64, xi: u64) -> Result<Self> {
        self.ctx.require_divisor(d)?;
        Ok(Self::from_elements(
            &self.ctx,
            self.iter().filter(|a| a % d == xi % d),
        ))
    }

    /// `d Z_q ⊆ A`.
    pub fn contains_dilated_ring(&self, d: u64) -> Result<bool> {
        self.ctx.require_divisor(d)?;
        let q = self.modulus();
        Ok((0..q / d).all(|k| self.contains(k * d % q)))
    }

    /// `d Z_q^* ⊆ A`.
    pub fn contains_dilated_units(&self, d: u64) -> Result<bool> {
        self.ctx.require_divisor(d)?;
        let q = self.modulus();
        Ok(self.ctx.units().all(|u| self.contains(u * d % q)))
    }

    /// Largest cyclic gap between consecutive members.
    pub fn max_gap(&self) -> Result<u64> {
        self.require_nonempty()?;
        let elems = self.to_vec();
        let q = self.modulus();
        let wrap = elems[0] + q - elems[elems.len() - 1];
        Ok(elems
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(wrap))
            .max()
            .unwrap_or(q))
    }
}

impl PartialEq for SubsetZq {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.bits == other.bits
    }
}

impl Eq for SubsetZq {}

impl fmt::Debug for SubsetZq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SubsetZq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={}; ", self.modulus())?;
        write_body(f, self)
    }
}

/// Writes just the `{...}` part of the literal.
pub fn write_body(f: &mut impl fmt::Write, s: &SubsetZq) -> fmt::Result {
    f.write_char('{')?;
    for (i, x) in s.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{x}")?;
    }
    f.write_char('}')
}

impl SubsetZq {
    pub fn body_literal(&self) -> String {
        let mut s = String::new();
        write_body(&mut s, self).expect("writing to String");
        s
    }
}

impl FromStr for SubsetZq {
    type Err = Error;

    /// `q=<int>; {e1,e2,...}`
    fn from_str(s: &str) -> Result<Self> {
        let (q, body) = split_literal(s)?;
        let ctx = RingCtx::shared(q)?;
        Self::parse_elements(&ctx, body)
    }
}

pub(crate) fn split_literal(s: &str) -> Result<(u64, &str)> {
    let (head, body) = s
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("missing `;` in `{s}`")))?;
    let q = head
        .trim()
        .strip_prefix("q=")
        .or_else(|| head.trim().strip_prefix("q ="))
        .ok_or_else(|| Error::Parse(format!("expected `q=<int>` in `{head}`")))?
        .trim()
        .parse::<u64>()
        .map_err(|_| Error::Parse(format!("bad modulus in `{head}`")))?;
    Ok((q, body))
}

pub(crate) fn strip_braces(s: &str) -> Result<&str> {
    s.strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| Error::Parse(format!("expected `{{...}}`, got `{s}`")))
}
