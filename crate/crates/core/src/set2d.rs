//! Dense subsets of `Z_q × Z_q`, bit `q·x + y` set iff `(x, y)` is a member.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::ring::RingCtx;
use crate::set::{split_literal, strip_braces, SubsetZq};

pub const MAX_MODULUS_2D: u64 = 2048;

#[derive(Clone)]
pub struct Subset2D {
    ctx: Arc<RingCtx>,
    bits: BitVec,
    size: usize,
}

impl Subset2D {
    fn check_modulus(ctx: &RingCtx) -> Result<()> {
        if ctx.modulus() > MAX_MODULUS_2D {
            return Err(Error::InvalidParameter(format!(
                "2-D sets support q <= {MAX_MODULUS_2D}, got {}",
                ctx.modulus()
            )));
        }
        Ok(())
    }

    pub fn empty(ctx: &Arc<RingCtx>) -> Result<Self> {
        Self::check_modulus(ctx)?;
        let q = ctx.modulus() as usize;
        Ok(Self {
            ctx: Arc::clone(ctx),
            bits: BitVec::zeros(q * q),
            size: 0,
        })
    }

    pub fn full(ctx: &Arc<RingCtx>) -> Result<Self> {
        Self::check_modulus(ctx)?;
        let q = ctx.modulus() as usize;
        Ok(Self {
            ctx: Arc::clone(ctx),
            bits: BitVec::ones(q * q),
            size: q * q,
        })
    }

    pub fn from_points<I: IntoIterator<Item = (u64, u64)>>(ctx: &Arc<RingCtx>, points: I) -> Result<Self> {
        let mut s = Self::empty(ctx)?;
        for (x, y) in points {
            s.insert(x, y);
        }
        Ok(s)
    }

    /// Cartesian product `A × B`.
    pub fn cartesian(a: &SubsetZq, b: &SubsetZq) -> Result<Self> {
        if a.modulus() != b.modulus() {
            return Err(Error::ModulusMismatch {
                left: a.modulus(),
                right: b.modulus(),
            });
        }
        Self::from_points(a.ctx(), a.iter().flat_map(|x| b.iter().map(move |y| (x, y))))
    }

    /// Parses the body of a 2-D literal, e.g. `{(0,1),(2,3)}`.
    pub fn parse_points(ctx: &Arc<RingCtx>, body: &str) -> Result<Self> {
        let inner = strip_braces(body.trim())?.trim();
        let mut pts = Vec::new();
        let mut rest = inner;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected `(` at `{rest}`")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse("unclosed `(`".into()))?;
            let (xs, ys) = open[..close]
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad pair `{}`", &open[..close])))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<i64>()
                    .map(|v| ctx.reduce_signed(v))
                    .map_err(|_| Error::Parse(format!("bad coordinate `{t}`")))
            };
            pts.push((parse(xs)?, parse(ys)?));
            rest = open[close + 1..].trim_start();
            rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
        }
        Self::from_points(ctx, pts)
    }

    pub fn ctx(&self) -> &Arc<RingCtx> {
        &self.ctx
    }

    pub fn modulus(&self) -> u64 {
        self.ctx.modulus()
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn density(&self) -> f64 {
        let q = self.modulus() as f64;
        self.size as f64 / (q * q)
    }

    #[inline]
    fn index(&self, x: u64, y: u64) -> usize {
        let q = self.modulus();
        ((x % q) * q + y % q) as usize
    }

    pub fn contains(&self, x: u64, y: u64) -> bool {
        self.bits.get(self.index(x, y))
    }

    pub fn insert(&mut self, x: u64, y: u64) {
        let i = self.index(x, y);
        if !self.bits.get(i) {
            self.bits.set(i);
            self.size += 1;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let q = self.modulus();
        self.bits.ones_iter().map(move |i| (i as u64 / q, i as u64 % q))
    }

    pub fn to_vec(&self) -> Vec<(u64, u64)> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.bits.is_subset(&other.bits)
    }

    /// Coordinatewise reduction onto `Z_{q*}^2`.
    pub fn project(&self, q_star: u64) -> Result<Self> {
        self.ctx.require_divisor(q_star)?;
        let target = RingCtx::shared(q_star)?;
        Self::from_points(&target, self.iter().map(|(x, y)| (x % q_star, y % q_star)))
    }

    /// Fiber sizes over `Z_{q2}^2`, flat index `q2·ξ1 + ξ2`.
    pub fn fiber_counts(&self, q2: u64) -> Result<Vec<usize>> {
        self.ctx.require_divisor(q2)?;
        let mut eta = vec![0usize; (q2 * q2) as usize];
        for (x, y) in self.iter() {
            eta[((x % q2) * q2 + y % q2) as usize] += 1;
        }
        Ok(eta)
    }

    pub fn body_literal(&self) -> String {
        let mut s = String::from("{");
        for (i, (x, y)) in self.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("({x},{y})"));
        }
        s.push('}');
        s
    }
}

impl PartialEq for Subset2D {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.bits == other.bits
    }
}

impl Eq for Subset2D {}

impl fmt::Display for Subset2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={}; {}", self.modulus(), self.body_literal())
    }
}

impl fmt::Debug for Subset2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Subset2D {
    type Err = Error;

    /// `q=<int>; {(x1,y1),(x2,y2),...}`
    fn from_str(s: &str) -> Result<Self> {
        let (q, body) = split_literal(s)?;
        let ctx = RingCtx::shared(q)?;
        Self::parse_points(&ctx, body)
    }
}
