//! Additive and multiplicative covering numbers of subsets of `Z_q`, the
//! constructive covers for difference sets, and the related examples.

mod search;

pub use search::CoverSearch;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::equations::product_of_differences;
use crate::error::{Error, Result};
use crate::report::{Verdict, VerificationReport};
use crate::ring::{is_prime, RingCtx};
use crate::set::SubsetZq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoverKind {
    #[serde(rename = "plus")]
    Additive,
    #[serde(rename = "times")]
    Multiplicative,
}

impl FromStr for CoverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "additive" | "+" => Ok(CoverKind::Additive),
            "times" | "multiplicative" | "*" | "x" => Ok(CoverKind::Multiplicative),
            other => Err(Error::InvalidParameter(format!("unknown cover kind `{other}`"))),
        }
    }
}

impl fmt::Display for CoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverKind::Additive => "plus",
            CoverKind::Multiplicative => "times",
        })
    }
}

/// A set `X` with `X + S = Z_q` or `X · S = Z_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverCertificate {
    pub kind: CoverKind,
    pub x_set: SubsetZq,
    pub target: SubsetZq,
    pub verified: bool,
}

impl CoverCertificate {
    pub fn new(kind: CoverKind, x_set: SubsetZq, target: SubsetZq) -> Self {
        let mut cert = Self {
            kind,
            x_set,
            target,
            verified: false,
        };
        cert.verified = cert.check();
        cert
    }

    /// Recomputes the covering equation with plain set operations.
    pub fn check(&self) -> bool {
        if self.x_set.is_empty() || self.target.is_empty() {
            return false;
        }
        let image = match self.kind {
            CoverKind::Additive => self.x_set.sumset(&self.target),
            CoverKind::Multiplicative => self.x_set.product_set(&self.target),
        };
        image.map(|s| s.is_full()).unwrap_or(false)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "X": self.x_set.body_literal(),
            "S": self.target.body_literal(),
            "verified": self.verified,
        })
    }
}

fn image(s: &SubsetZq, x: u64, kind: CoverKind) -> SubsetZq {
    match kind {
        CoverKind::Additive => s.translate(x),
        CoverKind::Multiplicative => s.dilate(x),
    }
}

/// `∪_{x in Z_q} x·S = Z_q`.
pub fn multiplicatively_feasible(s: &SubsetZq) -> bool {
    let ctx = s.ctx();
    let mut hit = SubsetZq::empty(ctx);
    for x in 0..ctx.modulus() {
        hit = hit.union(&s.dilate(x)).expect("same modulus");
        if hit.is_full() {
            return true;
        }
    }
    false
}

/// Exact `cov^+(S)` or `cov^×(S)` with a verified witness.
pub fn cov_exact(s: &SubsetZq, kind: CoverKind) -> Result<(usize, CoverCertificate)> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let ctx = s.ctx();
    if kind == CoverKind::Multiplicative && !multiplicatively_feasible(s) {
        return Err(Error::Infeasible(format!(
            "no dilates of {s} cover Z_{}",
            ctx.modulus()
        )));
    }
    let q = ctx.modulus();
    let candidates = (0..q).map(|x| (x, image(s, x, kind).bits().clone())).collect();
    let labels = CoverSearch::new(q as usize, candidates)
        .solve()
        .ok_or_else(|| Error::Infeasible(format!("{s}")))?;
    let cert = CoverCertificate::new(kind, SubsetZq::from_elements(ctx, labels), s.clone());
    Ok((cert.x_set.len(), cert))
}

/// Cover size and certificate, or the error text when no cover exists.
fn cover_or_error(s: &SubsetZq, kind: CoverKind) -> (Option<usize>, Value) {
    match cov_exact(s, kind) {
        Ok((k, c)) => (Some(k), c.to_json()),
        Err(e) => (None, json!(e.to_string())),
    }
}

/// Greedy packing of disjoint translates `A + z`; maximality gives
/// `Z_q ⊆ (A - A) + Z` with `|Z| <= q / |A|`.
pub fn ruzsa_cover(a: &SubsetZq) -> Result<CoverCertificate> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let ctx = a.ctx();
    let mut packed = SubsetZq::empty(ctx);
    let mut z = SubsetZq::empty(ctx);
    for s in 0..ctx.modulus() {
        let t = a.translate(s);
        if t.bits().is_disjoint(packed.bits()) {
            packed = packed.union(&t)?;
            z.insert(s);
        }
    }
    Ok(CoverCertificate::new(CoverKind::Additive, z, a.difference_set()?))
}

/// `{j^{-1} : j in [1, k]}`.
pub fn inverse_interval(ctx: &Arc<RingCtx>, k: u64) -> Result<SubsetZq> {
    let inv = (1..=k).map(|j| ctx.mod_inverse(j)).collect::<Result<Vec<_>>>()?;
    Ok(SubsetZq::from_elements(ctx, inv))
}

/// `p_1 > 2 q / n + 3`, i.e. least prime factor above `2 α^{-1} + 3` for a set of size `n`.
fn least_prime_exceeds(ctx: &RingCtx, n: usize) -> bool {
    match ctx.least_prime() {
        Some(p) => p as u128 * n as u128 > 2 * ctx.modulus() as u128 + 3 * n as u128,
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCover {
    pub alpha: f64,
    /// `ceil(α^{-1} - 1) + 1`
    pub k_star: u64,
    pub certificate: CoverCertificate,
    /// least prime factor of `q` exceeds `2α^{-1} + 3`
    pub precondition_ok: bool,
}

/// `X = [k*]^{-1}` as a multiplicative cover of `A - A`.
pub fn theorem_cover_certificate(a: &SubsetZq) -> Result<TheoremCover> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let ctx = a.ctx();
    let (q, n) = (ctx.modulus(), a.len() as u64);
    // ceil((q - n) / n) + 1
    let k_star = (q - n).div_ceil(n) + 1;
    let x = inverse_interval(ctx, k_star)?;
    Ok(TheoremCover {
        alpha: a.density(),
        k_star,
        certificate: CoverCertificate::new(CoverKind::Multiplicative, x, a.difference_set()?),
        precondition_ok: least_prime_exceeds(ctx, a.len()),
    })
}

/// `[1, k] ⊆ Z_q^*`, which holds exactly when `k` is below the least prime factor.
fn initial_segment_units(ctx: &RingCtx, k: u64) -> bool {
    ctx.least_prime().is_some_and(|p| k < p)
}

/// Full check of the difference-set cover: the `[k*]^{-1}` certificate and the
/// exact `cov^×(A - A) <= floor(α^{-1}) + 1`.
pub fn covm_report(a: &SubsetZq) -> Result<VerificationReport> {
    let ctx = a.ctx();
    let q = ctx.modulus();
    let instance = json!({ "q": q, "A": a.body_literal() });
    let bound = q / a.len() as u64 + 1;
    let report = VerificationReport::new("covm", "cov^x(A-A) <= 1/alpha + 1 via [k*]^-1", instance);
    let tc = match theorem_cover_certificate(a) {
        Ok(tc) => tc,
        Err(e) => {
            return Ok(report.witness(json!({ "precondition_ok": false, "error": e.to_string() })));
        }
    };
    let (cov, exact) = cover_or_error(&tc.certificate.target, CoverKind::Multiplicative);
    let ok = tc.certificate.verified && cov.is_some_and(|k| k as u64 <= bound) && tc.k_star <= bound;
    Ok(report
        .sides(cov.map_or(f64::NAN, |k| k as f64), bound as f64)
        .verdict(Verdict::graded(tc.precondition_ok, ok))
        .witness(json!({
            "k_star": tc.k_star,
            "precondition_ok": tc.precondition_ok,
            "certificate": tc.certificate.to_json(),
            "exact_cover": exact,
        })))
}

/// `cov^×(S - S) <= cov^+(S)` when `1, ..., cov^+(S)` are units, together with
/// the explicit `[k]^{-1}` cover of `S - S`.
pub fn prop_cov_transfer(s: &SubsetZq) -> Result<VerificationReport> {
    let ctx = s.ctx();
    let (k_plus, plus_cert) = cov_exact(s, CoverKind::Additive)?;
    let diff = s.difference_set()?;
    let precondition = initial_segment_units(ctx, k_plus as u64);
    let instance = json!({ "q": ctx.modulus(), "S": s.body_literal() });
    let report = VerificationReport::new("covtransfer", "cov^x(S-S) <= cov^+(S)", instance);
    let (k_times, times_json) = cover_or_error(&diff, CoverKind::Multiplicative);
    let constructive = if precondition {
        Some(CoverCertificate::new(
            CoverKind::Multiplicative,
            inverse_interval(ctx, k_plus as u64)?,
            diff.clone(),
        ))
    } else {
        None
    };
    let ok = k_times.is_some_and(|k| k <= k_plus) && constructive.as_ref().is_none_or(|c| c.verified);
    Ok(report
        .sides(k_times.map_or(f64::NAN, |k| k as f64), k_plus as f64)
        .verdict(Verdict::graded(precondition, ok))
        .witness(json!({
            "precondition_ok": precondition,
            "additive_cover": plus_cert.to_json(),
            "multiplicative_cover": times_json,
            "constructive_cover": constructive.map(|c| c.to_json()),
        })))
}

/// `cov^×(2A - 2A) <= α^{-1}` when `1, ..., floor(α^{-1})` are units.
pub fn corollary_2a2a(a: &SubsetZq) -> Result<VerificationReport> {
    let ctx = a.ctx();
    let t = ctx.modulus() / a.len().max(1) as u64;
    let target = a.sum_difference(2, 2)?;
    let precondition = initial_segment_units(ctx, t);
    let (k, cert) = cover_or_error(&target, CoverKind::Multiplicative);
    Ok(VerificationReport::new(
        "cov2a2a",
        "cov^x(2A-2A) <= 1/alpha",
        json!({ "q": ctx.modulus(), "A": a.body_literal() }),
    )
    .sides(k.map_or(f64::NAN, |k| k as f64), 1.0 / a.density())
    .verdict(Verdict::graded(precondition, k.is_some_and(|k| k as u64 <= t)))
    .witness(json!({ "precondition_ok": precondition, "cover": cert })))
}

/// `A_1 ∩ (A_2 - s_1) ∩ ... ∩ (A_k - s_{k-1})`.
pub fn shifted_intersection(sets: &[SubsetZq], shifts: &[u64]) -> Result<SubsetZq> {
    let ctx = sets[0].ctx();
    let q = ctx.modulus();
    let mut acc = sets[0].clone();
    for (a, &s) in sets[1..].iter().zip(shifts) {
        acc = acc.intersection(&a.translate(q - s % q))?;
    }
    Ok(acc)
}

/// Exhaustive shift search below this many shift vectors, sampling above.
pub const EXHAUSTIVE_SHIFT_LIMIT: u64 = 1_000_000;
const SHIFT_SAMPLES: usize = 200_000;

#[derive(Debug, Clone)]
pub struct IntersectionCover {
    /// `1 / (α_1 ... α_k) + 1`
    pub bound: f64,
    pub shifts: Vec<u64>,
    pub a_shifted: SubsetZq,
    pub intersection: SubsetZq,
    /// `[k*]^{-1}` for `A_{s*}`, reused as a cover of `∩ (A_i - A_i)`; `None`
    /// if some `j <= k*` is not a unit.
    pub theorem: Option<TheoremCover>,
    pub certificate: Option<CoverCertificate>,
    pub precondition_ok: bool,
}

pub fn intersection_cover(sets: &[SubsetZq], seed: u64) -> Result<IntersectionCover> {
    let first = sets.first().ok_or(Error::EmptySet)?;
    let ctx = first.ctx();
    let q = ctx.modulus();
    for a in sets {
        if a.modulus() != q {
            return Err(Error::ModulusMismatch {
                left: q,
                right: a.modulus(),
            });
        }
        if a.is_empty() {
            return Err(Error::EmptySet);
        }
    }
    let k = sets.len();
    let space = (q as u128).checked_pow(k as u32 - 1);
    let mut best_shift = vec![0u64; k - 1];
    let mut best = shifted_intersection(sets, &best_shift)?;
    if space.is_some_and(|s| s <= EXHAUSTIVE_SHIFT_LIMIT as u128) {
        let total = space.unwrap_or(1) as u64;
        for idx in 0..total {
            let mut shift = vec![0u64; k - 1];
            let mut r = idx;
            for s in shift.iter_mut() {
                *s = r % q;
                r /= q;
            }
            let inter = shifted_intersection(sets, &shift)?;
            if inter.len() > best.len() {
                best = inter;
                best_shift = shift;
            }
        }
    } else {
        // |A_s| averages prod |A_i| / q^{k-1}; stop once a shift reaches it
        let avg = sets.iter().map(|a| a.len() as f64).product::<f64>() / (q as f64).powi(k as i32 - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SHIFT_SAMPLES {
            if best.len() as f64 >= avg {
                break;
            }
            let shift: Vec<u64> = (0..k - 1).map(|_| rng.gen_range(0..q)).collect();
            let inter = shifted_intersection(sets, &shift)?;
            if inter.len() > best.len() {
                best = inter;
                best_shift = shift;
            }
        }
    }

    let mut intersection = sets[0].difference_set()?;
    for a in &sets[1..] {
        intersection = intersection.intersection(&a.difference_set()?)?;
    }
    let densities: f64 = sets.iter().map(SubsetZq::density).product();
    let size_product: u128 = sets.iter().map(|a| a.len() as u128).product();
    let qk = (q as u128).pow(k as u32);
    let precondition_ok = ctx
        .least_prime()
        .is_some_and(|p| p as u128 * size_product > 2 * qk + 3 * size_product);

    let theorem = if best.is_empty() {
        None
    } else {
        theorem_cover_certificate(&best).ok()
    };
    let certificate = theorem.as_ref().map(|t| {
        CoverCertificate::new(
            CoverKind::Multiplicative,
            t.certificate.x_set.clone(),
            intersection.clone(),
        )
    });
    Ok(IntersectionCover {
        bound: 1.0 / densities + 1.0,
        shifts: best_shift,
        a_shifted: best,
        intersection,
        theorem,
        certificate,
        precondition_ok,
    })
}

pub fn intersection_cover_report(sets: &[SubsetZq], seed: u64) -> Result<VerificationReport> {
    let ic = intersection_cover(sets, seed)?;
    let q = ic.intersection.modulus();
    let (exact, exact_json) = cover_or_error(&ic.intersection, CoverKind::Multiplicative);
    let ok = exact.is_some_and(|k| k as f64 <= ic.bound + 1e-9)
        && ic.certificate.as_ref().is_some_and(|c| c.verified)
        && ic
            .theorem
            .as_ref()
            .is_some_and(|t| t.k_star as f64 <= ic.bound + 1e-9);
    let sets_json: Vec<String> = sets.iter().map(SubsetZq::body_literal).collect();
    Ok(VerificationReport::new(
        "covintersect",
        "cov^x(cap(A_i-A_i)) <= 1/(alpha_1...alpha_k) + 1",
        json!({ "q": q, "sets": sets_json, "seed": seed }),
    )
    .sides(exact.map_or(f64::NAN, |k| k as f64), ic.bound)
    .verdict(Verdict::graded(ic.precondition_ok, ok))
    .witness(json!({
        "shifts": ic.shifts,
        "A_shifted": ic.a_shifted.body_literal(),
        "precondition_ok": ic.precondition_ok,
        "certificate": ic.certificate.map(|c| c.to_json()),
        "exact_cover": exact_json,
    })))
}

/// `{x in Z_p : ||x γ / p|| <= ε for all γ in Γ}`.
pub fn bohr_set(ctx: &Arc<RingCtx>, gammas: &[u64], eps: f64) -> Result<SubsetZq> {
    let p = ctx.modulus();
    if !ctx.is_prime() {
        return Err(Error::NotPrime(p));
    }
    if gammas.is_empty() {
        return Err(Error::InvalidParameter(
            "Bohr set needs a nonempty frequency set".into(),
        ));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} not in (0,1]")));
    }
    let within = |x: u64, g: u64| {
        let r = x * (g % p) % p;
        let dist = r.min(p - r) as f64 / p as f64;
        dist <= eps + 1e-12
    };
    Ok(SubsetZq::from_elements(
        ctx,
        (0..p).filter(|&x| gammas.iter().all(|&g| within(x, g))),
    ))
}

/// Exact `cov^×` of a Bohr set next to `ε^{-|Γ|}`. The pigeonhole argument
/// gives `ceil(1/ε)^{|Γ|}` whenever that many initial integers are units, so
/// the row is asserted only when this also implies the `ε^{-|Γ|}` form.
pub fn bohr_cover_report(ctx: &Arc<RingCtx>, gammas: &[u64], eps: f64) -> Result<VerificationReport> {
    let b = bohr_set(ctx, gammas, eps)?;
    let (k, cert) = cover_or_error(&b, CoverKind::Multiplicative);
    let claimed = eps.powi(-(gammas.len() as i32));
    let pigeon = (1.0 / eps - 1e-9).ceil().powi(gammas.len() as i32);
    let asserted = pigeon < ctx.modulus() as f64 && pigeon <= claimed.floor() + 1e-9;
    let holds = k.is_some_and(|k| k as f64 <= claimed + 1e-9);
    Ok(VerificationReport::new(
        "bohr",
        "cov^x(B(Gamma,eps)) <= eps^-|Gamma|",
        json!({ "p": ctx.modulus(), "gamma": gammas, "eps": eps }),
    )
    .sides(k.map_or(f64::NAN, |k| k as f64), claimed)
    .verdict(Verdict::graded(asserted, holds))
    .witness(json!({ "bohr_set": b.body_literal(), "pigeonhole_bound": pigeon, "cover": cert })))
}

/// `[p/3, 2p/3)`.
pub fn schur_interval(ctx: &Arc<RingCtx>) -> SubsetZq {
    let p = ctx.modulus();
    SubsetZq::from_elements(ctx, (0..p).filter(|&x| 3 * x >= p && 3 * x < 2 * p))
}

/// No `a + b = c` with `a, b, c in S`.
pub fn is_sum_free(s: &SubsetZq) -> bool {
    s.is_empty()
        || s.sumset(s)
            .map(|t| t.bits().is_disjoint(s.bits()))
            .unwrap_or(true)
}

/// One row of the growth table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub p: u64,
    pub size: usize,
    pub cov_plus: usize,
    pub cov_times: usize,
    pub gap: u64,
}

impl GrowthRow {
    pub const CSV_HEADER: &'static str = "p,|S|,cov_plus,cov_times,gap";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.p, self.size, self.cov_plus, self.cov_times, self.gap
        )
    }
}

fn sum_free_example(
    suite_claim: &str,
    s: &SubsetZq,
    instance: Value,
) -> Result<(VerificationReport, GrowthRow)> {
    let p = s.modulus();
    let sum_free = is_sum_free(s);
    let (cov_plus, _) = cov_exact(s, CoverKind::Additive)?;
    let (cov_times, cert) = cov_exact(s, CoverKind::Multiplicative)?;
    let row = GrowthRow {
        p,
        size: s.len(),
        cov_plus,
        cov_times,
        gap: s.max_gap()?,
    };
    let report = VerificationReport::new("schur", suite_claim, instance)
        .sides(cov_times as f64, (p as f64).ln() / (p as f64).ln().ln())
        .verdict(Verdict::from_bool(sum_free && cert.verified))
        .witness(json!({
            "sum_free": sum_free,
            "row": row,
            "cover": cert.to_json(),
        }));
    Ok((report, row))
}

/// `S = [p/3, 2p/3)` is sum-free and needs many dilates to cover `Z_p`.
pub fn schur_interval_example(p: u64) -> Result<(VerificationReport, GrowthRow)> {
    if p < 7 || !is_prime(p) {
        return Err(Error::InvalidParameter(format!("need a prime p >= 7, got {p}")));
    }
    let ctx = RingCtx::shared(p)?;
    let s = schur_interval(&ctx);
    sum_free_example(
        "S=[p/3,2p/3) sum-free; cov^x(S) grows like log p / log log p",
        &s,
        json!({ "p": p, "S": s.body_literal() }),
    )
}

/// `S = {1 + kM : 1 <= k <= (p-1)/M}` for `p ≡ 2 (mod M)`, `M >= 4`: a
/// syndetic sum-free set.
pub fn syndetic_progression(ctx: &Arc<RingCtx>, m: u64) -> Result<SubsetZq> {
    let p = ctx.modulus();
    if !ctx.is_prime() || m < 4 || p % m != 2 % m {
        return Err(Error::InvalidParameter(format!(
            "need prime p = 2 mod M, M >= 4 (p={p}, M={m})"
        )));
    }
    Ok(SubsetZq::from_elements(ctx, (1..=(p - 1) / m).map(|k| 1 + k * m)))
}

pub fn syndetic_example(p: u64, m: u64) -> Result<(VerificationReport, GrowthRow)> {
    let ctx = RingCtx::shared(p)?;
    let s = syndetic_progression(&ctx, m)?;
    sum_free_example(
        "S={1+kM} syndetic and sum-free; cov^x(S) unbounded",
        &s,
        json!({ "p": p, "M": m, "S": s.body_literal() }),
    )
}

/// Second route to `d·Z_q ⊆ (A - A)(B - B)`: take `X = [k*]^{-1}` covering
/// `B - B`, find the least `d >= 1` with `d·X ⊆ A - A`, and compare with
/// `α^{-|X|} <= α^{-β^{-1} - 1}`. `d` need not divide `q`.
pub fn fish_via_covering(a: &SubsetZq, b: &SubsetZq) -> Result<VerificationReport> {
    let (a, b) = if a.density() >= b.density() {
        (a, b)
    } else {
        (b, a)
    };
    let ctx = a.ctx();
    let q = ctx.modulus();
    let (alpha, beta) = (a.density(), b.density());
    let instance = json!({ "q": q, "A": a.body_literal(), "B": b.body_literal() });
    let report = VerificationReport::new(
        "fish1d",
        "d Z_q in (A-A)(B-B) with d <= alpha^(-1/beta-1)",
        instance,
    );
    let precondition = least_prime_exceeds(ctx, b.len());
    let tc = match theorem_cover_certificate(b) {
        Ok(tc) => tc,
        Err(e) => return Ok(report.witness(json!({ "precondition_ok": false, "error": e.to_string() }))),
    };
    let x = &tc.certificate.x_set;
    let diff_a = a.difference_set()?;
    let d = (1..=q).find(|&d| x.dilate(d).is_subset(&diff_a)).unwrap_or(q);
    let product = product_of_differences(a, b)?;
    let inclusion = SubsetZq::full(ctx).dilate(d).is_subset(&product);
    let n = x.len() as i32;
    let pigeon_bound = alpha.powi(-n);
    let stated_bound = alpha.powf(-1.0 / beta - 1.0);
    let ok = tc.certificate.verified
        && inclusion
        && d as f64 <= pigeon_bound * (1.0 + 1e-12)
        && d as f64 <= stated_bound * (1.0 + 1e-12);
    Ok(report
        .sides(d as f64, stated_bound)
        .verdict(Verdict::graded(precondition, ok))
        .witness(json!({
            "d": d,
            "X": x.body_literal(),
            "alpha_pow_n": pigeon_bound,
            "precondition_ok": precondition,
            "inclusion": inclusion,
        })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: u64) -> Arc<RingCtx> {
        RingCtx::shared(q).unwrap()
    }

    fn set(q: u64, e: &[u64]) -> SubsetZq {
        SubsetZq::from_elements(&ctx(q), e.iter().copied())
    }

    fn subsets(q: u64) -> impl Iterator<Item = SubsetZq> {
        let c = ctx(q);
        (1u32..1 << q).map(move |m| SubsetZq::from_elements(&c, (0..q).filter(|i| m >> i & 1 == 1)))
    }

    /// Smallest cover size by trying every `X` of increasing size.
    fn naive_cov(s: &SubsetZq, kind: CoverKind) -> Option<usize> {
        let q = s.modulus();
        let c = s.ctx();
        let mut masks: Vec<u32> = (1u32..1 << q).collect();
        masks.sort_by_key(|m| m.count_ones());
        masks.into_iter().find_map(|m| {
            let x = SubsetZq::from_elements(c, (0..q).filter(|i| m >> i & 1 == 1));
            CoverCertificate::new(kind, x, s.clone())
                .verified
                .then_some(m.count_ones() as usize)
        })
    }

    #[test]
    fn cov_examples() {
        let f = SubsetZq::full(&ctx(9));
        let (k, c) = cov_exact(&f, CoverKind::Additive).unwrap();
        assert_eq!((k, c.x_set.to_vec()), (1, vec![0]));
        let (k, c) = cov_exact(&f, CoverKind::Multiplicative).unwrap();
        assert_eq!((k, c.x_set.to_vec()), (1, vec![1]));
        let (k, c) = cov_exact(&set(5, &[1]), CoverKind::Multiplicative).unwrap();
        assert_eq!(k, 5);
        assert_eq!(c.x_set, SubsetZq::full(&ctx(5)));
        let (k, c) = cov_exact(&set(4, &[0, 1]), CoverKind::Additive).unwrap();
        assert_eq!((k, c.x_set.to_vec()), (2, vec![0, 2]));
        assert!(c.verified);
        assert!(matches!(
            cov_exact(&set(6, &[0, 2, 4]), CoverKind::Multiplicative),
            Err(Error::Infeasible(_))
        ));
        assert_eq!(
            cov_exact(&SubsetZq::empty(&ctx(4)), CoverKind::Additive),
            Err(Error::EmptySet)
        );
    }

    #[test]
    fn cov_matches_naive_oracle() {
        for q in 1..=10u64 {
            for s in subsets(q) {
                let plus = cov_exact(&s, CoverKind::Additive).unwrap();
                assert_eq!(Some(plus.0), naive_cov(&s, CoverKind::Additive), "{s}");
                assert!(plus.1.verified);
                assert!(plus.0 as u64 >= q.div_ceil(s.len() as u64));
                match cov_exact(&s, CoverKind::Multiplicative) {
                    Ok((k, c)) => {
                        assert!(c.verified);
                        assert_eq!(Some(k), naive_cov(&s, CoverKind::Multiplicative), "{s}");
                    }
                    Err(_) => assert_eq!(naive_cov(&s, CoverKind::Multiplicative), None),
                }
            }
        }
    }

    #[test]
    fn cov_monotone_under_inclusion() {
        for q in [7u64, 9] {
            let all: Vec<SubsetZq> = subsets(q).collect();
            for s in all.iter().step_by(5) {
                for x in 0..q {
                    let mut t = s.clone();
                    t.insert(x);
                    for kind in [CoverKind::Additive, CoverKind::Multiplicative] {
                        if let (Ok((ks, _)), Ok((kt, _))) = (cov_exact(s, kind), cov_exact(&t, kind)) {
                            assert!(kt <= ks);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ruzsa_examples() {
        let f = SubsetZq::full(&ctx(8));
        assert_eq!(ruzsa_cover(&f).unwrap().x_set.to_vec(), vec![0]);
        for a in [set(9, &[0, 1, 2]), set(9, &[0, 3, 6])] {
            let c = ruzsa_cover(&a).unwrap();
            assert!(c.verified);
            assert!(c.x_set.len() <= 3);
        }
        for q in 1..=12u64 {
            for a in subsets(q).step_by(3) {
                let c = ruzsa_cover(&a).unwrap();
                assert!(c.verified, "{a}");
                assert!(c.x_set.len() as u64 <= q.div_ceil(a.len() as u64));
            }
        }
    }

    #[test]
    fn inverse_interval_cover_examples() {
        let a = set(13, &[0, 1, 2, 3]);
        let t = theorem_cover_certificate(&a).unwrap();
        assert!(t.precondition_ok);
        assert_eq!(t.k_star, 4);
        assert_eq!(t.certificate.x_set.to_vec(), vec![1, 7, 9, 10]);
        assert!(t.certificate.verified);

        let f = SubsetZq::full(&ctx(10));
        let t = theorem_cover_certificate(&f).unwrap();
        assert_eq!(
            (t.k_star, t.certificate.x_set.to_vec(), t.certificate.verified),
            (1, vec![1], true)
        );

        // p_1 = 2 and k* = 2 is not invertible mod 6
        let a = set(6, &[0, 1, 2]);
        assert!(matches!(
            theorem_cover_certificate(&a),
            Err(Error::NotAUnit { .. })
        ));
        assert_eq!(covm_report(&a).unwrap().pass, Verdict::Informational);
    }

    #[test]
    fn inverse_interval_cover_holds_exhaustively_q11() {
        for a in subsets(11) {
            let r = covm_report(&a).unwrap();
            assert!(!r.failed(), "{r:?}");
        }
    }

    #[test]
    fn transfer_examples() {
        let f = SubsetZq::full(&ctx(11));
        let r = prop_cov_transfer(&f).unwrap();
        assert_eq!((r.lhs, r.rhs, r.pass), (Some(1.0), Some(1.0), Verdict::Pass));
        let r = prop_cov_transfer(&set(11, &[0, 1, 2, 3])).unwrap();
        assert_eq!(r.rhs, Some(3.0));
        assert_eq!(r.pass, Verdict::Pass);
    }

    #[test]
    fn two_a_minus_two_a_examples() {
        let r = corollary_2a2a(&SubsetZq::full(&ctx(7))).unwrap();
        assert_eq!((r.lhs, r.pass), (Some(1.0), Verdict::Pass));
        let a = set(11, &[0, 1, 2, 3]);
        assert!(a.sum_difference(2, 2).unwrap().is_full());
        let r = corollary_2a2a(&a).unwrap();
        assert_eq!((r.lhs, r.pass), (Some(1.0), Verdict::Pass));
    }

    #[test]
    fn intersection_examples() {
        let a = set(13, &[0, 1, 2, 3, 4, 5]);
        let single = intersection_cover(std::slice::from_ref(&a), 0).unwrap();
        assert_eq!(single.a_shifted, a);
        assert_eq!(
            single.theorem.unwrap().k_star,
            theorem_cover_certificate(&a).unwrap().k_star
        );

        let a = set(13, &[0, 1, 2, 3, 4, 5, 6]);
        let ic = intersection_cover(&[a.clone(), a.clone()], 0).unwrap();
        assert!(ic.a_shifted.len() >= 4);
        assert!(ic.certificate.as_ref().unwrap().verified);
        let r = intersection_cover_report(&[a.clone(), a], 0).unwrap();
        assert!(!r.failed());
    }

    #[test]
    fn bohr_examples() {
        let c7 = ctx(7);
        assert_eq!(
            bohr_set(&c7, &[1], 1.0 / 3.0).unwrap().to_vec(),
            vec![0, 1, 2, 5, 6]
        );
        assert!(bohr_set(&c7, &[3], 1.0).unwrap().is_full());
        let c13 = ctx(13);
        let b = bohr_set(&c13, &[1, 2], 0.25).unwrap();
        // ||x/13|| <= 1/4 and ||2x/13|| <= 1/4, checked per residue
        let expected: Vec<u64> = (0..13u64)
            .filter(|&x| {
                let d = |r: u64| r.min(13 - r) as f64 / 13.0;
                d(x) <= 0.25 && d(2 * x % 13) <= 0.25
            })
            .collect();
        assert_eq!(b.to_vec(), expected);
        assert!(bohr_set(&ctx(12), &[1], 0.5).is_err());
        assert!(!bohr_cover_report(&c7, &[1], 1.0 / 3.0).unwrap().failed());
    }

    #[test]
    fn schur_examples() {
        let (r, row) = schur_interval_example(13).unwrap();
        assert_eq!(
            serde_json::from_value::<String>(r.instance["S"].clone()).unwrap(),
            "{5,6,7,8}"
        );
        assert_eq!(r.pass, Verdict::Pass);
        assert_eq!(row.size, 4);
        let (r, _) = schur_interval_example(7).unwrap();
        assert_eq!(r.instance["S"], "{3,4}");
        assert_eq!(r.pass, Verdict::Pass);
        assert!(schur_interval_example(9).is_err());
        assert!(!is_sum_free(&set(7, &[1, 2, 3])));
    }

    #[test]
    fn syndetic_progression_is_sum_free() {
        // 13 = 1 mod 4
        assert!(syndetic_example(13, 4).is_err());
        let (r, row) = syndetic_example(11, 9).unwrap();
        assert_eq!(r.pass, Verdict::Pass);
        assert_eq!(row.size, 1);
        let (r, row) = syndetic_example(23, 7).unwrap();
        assert_eq!(r.pass, Verdict::Pass);
        assert!(row.gap <= 2 * 7);
    }

    #[test]
    fn fish_via_covering_small() {
        let a = set(13, &[0, 1, 2, 3, 4, 5, 6]);
        let b = set(13, &[0, 2, 5, 7, 11]);
        let r = fish_via_covering(&a, &b).unwrap();
        assert_eq!(r.pass, Verdict::Pass, "{r:?}");
        for a in subsets(11).step_by(9) {
            let r = fish_via_covering(&a, &a).unwrap();
            assert!(!r.failed(), "{r:?}");
        }
    }
}
