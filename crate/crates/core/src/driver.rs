//! Batch runner behind the `diffset` binary: suite sweeps, one-off
//! computations and extremal searches.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use clap::ValueEnum;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::covering::{self, CoverKind, GrowthRow};
use crate::equations::{self, Form, InclusionMode};
use crate::error::{Error, Result};
use crate::group_action;
use crate::regularize;
use crate::report::VerificationReport;
use crate::ring::{is_prime, RingCtx};
use crate::set::SubsetZq;
use crate::set2d::{Subset2D, MAX_MODULUS_2D};
use crate::spectral;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "lower")]
pub enum Suite {
    Fish1d,
    Fish2d,
    Vinh,
    Covm,
    Covtransfer,
    Cov2a2a,
    Covintersect,
    Bohr,
    Schur,
    Energy,
    Regularize,
    Weil,
    Parseval,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Fish1d => "fish1d",
            Suite::Fish2d => "fish2d",
            Suite::Vinh => "vinh",
            Suite::Covm => "covm",
            Suite::Covtransfer => "covtransfer",
            Suite::Cov2a2a => "cov2a2a",
            Suite::Covintersect => "covintersect",
            Suite::Bohr => "bohr",
            Suite::Schur => "schur",
            Suite::Energy => "energy",
            Suite::Regularize => "regularize",
            Suite::Weil => "weil",
            Suite::Parseval => "parseval",
        }
    }

    fn default_moduli(self) -> &'static [u64] {
        match self {
            Suite::Fish1d => &[12, 30],
            Suite::Fish2d => &[6, 10, 15],
            Suite::Vinh => &[11, 13, 17],
            Suite::Covm | Suite::Covtransfer | Suite::Cov2a2a | Suite::Covintersect => &[11, 13],
            Suite::Bohr => &[7, 11, 13],
            Suite::Schur => &[7, 13, 19, 31, 43],
            Suite::Energy => &[5, 7, 9, 15, 21, 35],
            Suite::Regularize => &[12, 24, 36, 360],
            Suite::Weil => &[],
            Suite::Parseval => &[12, 30, 49, 64],
        }
    }

    fn default_density(self) -> DensityRange {
        match self {
            Suite::Vinh => DensityRange { lo: 0.3, hi: 1.0 },
            Suite::Fish1d | Suite::Fish2d => DensityRange { lo: 0.25, hi: 0.75 },
            Suite::Covintersect => DensityRange { lo: 0.4, hi: 0.6 },
            Suite::Regularize => DensityRange { lo: 0.1, hi: 0.3 },
            _ => DensityRange { lo: 0.05, hi: 1.0 },
        }
    }

    /// Suites whose instances are single subsets of `Z_q`.
    fn enumerable(self) -> bool {
        matches!(
            self,
            Suite::Covm | Suite::Covtransfer | Suite::Cov2a2a | Suite::Regularize | Suite::Parseval
        )
    }

    /// Suites with one deterministic instance per modulus.
    fn per_modulus(self) -> bool {
        matches!(self, Suite::Schur | Suite::Weil)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Comma-separated moduli and inclusive ranges, e.g. `11,13` or `2..100`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QList(pub Vec<u64>);

impl FromStr for QList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let num = |t: &str| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad modulus `{t}`")))
            };
            if let Some((lo, hi)) = part.split_once("..") {
                let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
                if lo > hi {
                    return Err(Error::InvalidParameter(format!("empty range `{part}`")));
                }
                out.extend(lo..=hi);
            } else {
                out.push(num(part)?);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidParameter("no moduli given".into()));
        }
        Ok(QList(out))
    }
}

/// `0.3` or `0.3..0.6`, inside `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRange {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for DensityRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad density `{t}`")))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b)?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "density range `{s}` not inside (0,1]"
            )));
        }
        Ok(DensityRange { lo, hi })
    }
}

pub const MAX_EXHAUSTIVE_MODULUS: u64 = 20;
pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub moduli: Option<Vec<u64>>,
    pub exhaustive: bool,
    pub samples: usize,
    pub seed: u64,
    pub jobs: usize,
    pub density: Option<DensityRange>,
    pub epsilon: Option<f64>,
    pub m: Option<f64>,
    pub timing: bool,
}

impl VerifyConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            moduli: None,
            exhaustive: false,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            jobs: 1,
            density: None,
            epsilon: None,
            m: None,
            timing: false,
        }
    }
}

/// A report plus the growth-table row for suites that produce one.
#[derive(Debug, Clone)]
pub struct Row {
    pub report: VerificationReport,
    pub growth: Option<GrowthRow>,
}

impl From<VerificationReport> for Row {
    fn from(report: VerificationReport) -> Self {
        Row { report, growth: None }
    }
}

#[derive(Debug, Clone, Copy)]
enum Payload {
    Sample,
    Mask(u64),
    Single,
}

#[derive(Debug, Clone, Copy)]
struct Task {
    q: u64,
    seed: u64,
    payload: Payload,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of instance `index` under `master`.
pub fn instance_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

fn validate_modulus(suite: Suite, q: u64, exhaustive: bool) -> Result<()> {
    let bad = |why: &str| Err(Error::InvalidParameter(format!("suite {suite}: q={q} {why}")));
    if q == 0 {
        return bad("must be positive");
    }
    match suite {
        Suite::Vinh | Suite::Bohr if !is_prime(q) => return bad("must be prime"),
        Suite::Schur if q < 7 || !is_prime(q) => return bad("must be a prime >= 7"),
        Suite::Weil if q > spectral::MAX_WEIL_MODULUS => return bad("too large for the sweep"),
        Suite::Fish2d | Suite::Energy | Suite::Vinh if q > MAX_MODULUS_2D => {
            return bad("too large for planar sets")
        }
        _ => {}
    }
    if exhaustive && q > MAX_EXHAUSTIVE_MODULUS {
        return bad("too large for exhaustive enumeration");
    }
    Ok(())
}

fn plan(cfg: &VerifyConfig) -> Result<Vec<Task>> {
    let moduli: Vec<u64> = match &cfg.moduli {
        Some(m) => m.clone(),
        None if cfg.suite == Suite::Weil => (2..=100).collect(),
        None => cfg.suite.default_moduli().to_vec(),
    };
    if cfg.exhaustive && !cfg.suite.enumerable() && !cfg.suite.per_modulus() {
        return Err(Error::InvalidParameter(format!(
            "suite {} has no exhaustive mode",
            cfg.suite
        )));
    }
    let mut tasks = Vec::new();
    for &q in &moduli {
        validate_modulus(cfg.suite, q, cfg.exhaustive && cfg.suite.enumerable())?;
        if cfg.suite.per_modulus() {
            tasks.push((q, Payload::Single));
        } else if cfg.exhaustive {
            tasks.extend((1..1u64 << q).map(|mask| (q, Payload::Mask(mask))));
        } else {
            tasks.extend(std::iter::repeat_n((q, Payload::Sample), cfg.samples));
        }
    }
    Ok(tasks
        .into_iter()
        .enumerate()
        .map(|(i, (q, payload))| Task {
            q,
            seed: instance_seed(cfg.seed, i as u64),
            payload,
        })
        .collect())
}

/// Uniform subset of `Z_q` whose size is `round(d q)` for `d` drawn from the range.
pub fn random_subset(ctx: &Arc<RingCtx>, density: DensityRange, rng: &mut impl Rng) -> SubsetZq {
    let q = ctx.modulus() as usize;
    let n = sized(q, density, rng);
    SubsetZq::from_elements(ctx, sample(rng, q, n).into_iter().map(|x| x as u64))
}

pub fn random_subset_2d(ctx: &Arc<RingCtx>, density: DensityRange, rng: &mut impl Rng) -> Result<Subset2D> {
    let q = ctx.modulus() as usize;
    let n = sized(q * q, density, rng);
    Subset2D::from_points(
        ctx,
        sample(rng, q * q, n)
            .into_iter()
            .map(|i| ((i / q) as u64, (i % q) as u64)),
    )
}

fn sized(universe: usize, density: DensityRange, rng: &mut impl Rng) -> usize {
    let d = if density.hi > density.lo {
        rng.gen_range(density.lo..=density.hi)
    } else {
        density.lo
    };
    ((d * universe as f64).round() as usize).clamp(1, universe)
}

fn subset_for(task: &Task, ctx: &Arc<RingCtx>, density: DensityRange, rng: &mut ChaCha8Rng) -> SubsetZq {
    match task.payload {
        Payload::Mask(mask) => SubsetZq::from_elements(ctx, (0..task.q).filter(|i| mask >> i & 1 == 1)),
        _ => random_subset(ctx, density, rng),
    }
}

const REGULARIZE_EPS: [f64; 2] = [0.25, 0.5];
const REGULARIZE_M: [f64; 3] = [2.0, 3.0, 5.0];
const BOHR_EPS: [f64; 3] = [0.5, 1.0 / 3.0, 0.25];

fn run_task(cfg: &VerifyConfig, task: &Task) -> Result<Vec<Row>> {
    let mut rng = ChaCha8Rng::seed_from_u64(task.seed);
    let ctx = RingCtx::shared(task.q)?;
    let density = cfg.density.unwrap_or(cfg.suite.default_density());
    let mut rows: Vec<Row> = Vec::new();
    match cfg.suite {
        Suite::Fish1d => {
            let a = random_subset(&ctx, density, &mut rng);
            let b = random_subset(&ctx, density, &mut rng);
            rows.push(equations::fish_bound_report(&a, &b)?.into());
            rows.push(covering::fish_via_covering(&a, &b)?.into());
        }
        Suite::Fish2d => {
            let a = random_subset_2d(&ctx, density, &mut rng)?;
            let b = random_subset_2d(&ctx, density, &mut rng)?;
            for form in [Form::Product, Form::SquareDiff] {
                for mode in [InclusionMode::Units, InclusionMode::Full] {
                    rows.push(equations::fish2d_report(&a, &b, form, mode)?.into());
                }
            }
        }
        Suite::Vinh => {
            let a = random_subset_2d(&ctx, density, &mut rng)?;
            let b = random_subset_2d(&ctx, density, &mut rng)?;
            for form in [Form::Product, Form::SquareDiff] {
                rows.push(equations::vinh_deviation_report(&a, &b, form)?.into());
            }
        }
        Suite::Covm => {
            let a = subset_for(task, &ctx, density, &mut rng);
            rows.push(covering::covm_report(&a)?.into());
        }
        Suite::Covtransfer => {
            let s = subset_for(task, &ctx, density, &mut rng);
            rows.push(covering::prop_cov_transfer(&s)?.into());
        }
        Suite::Cov2a2a => {
            let a = subset_for(task, &ctx, density, &mut rng);
            rows.push(covering::corollary_2a2a(&a)?.into());
        }
        Suite::Covintersect => {
            let k = rng.gen_range(2..=3);
            let sets: Vec<SubsetZq> = (0..k).map(|_| random_subset(&ctx, density, &mut rng)).collect();
            rows.push(covering::intersection_cover_report(&sets, task.seed)?.into());
        }
        Suite::Bohr => {
            let p = task.q;
            let size = rng.gen_range(1..=2usize.min(p as usize - 1));
            let gammas: Vec<u64> = sample(&mut rng, p as usize - 1, size)
                .into_iter()
                .map(|g| g as u64 + 1)
                .collect();
            let eps = BOHR_EPS[rng.gen_range(0..BOHR_EPS.len())];
            rows.push(covering::bohr_cover_report(&ctx, &gammas, eps)?.into());
        }
        Suite::Schur => {
            let (report, row) = covering::schur_interval_example(task.q)?;
            rows.push(Row {
                report,
                growth: Some(row),
            });
        }
        Suite::Energy => {
            let a = random_subset_2d(&ctx, density, &mut rng)?;
            rows.push(group_action::energy_bound_report(&a)?.into());
        }
        Suite::Regularize => {
            let a = subset_for(task, &ctx, density, &mut rng);
            let eps: Vec<f64> = cfg.epsilon.map_or(REGULARIZE_EPS.to_vec(), |e| vec![e]);
            let ms: Vec<f64> = cfg.m.map_or(REGULARIZE_M.to_vec(), |m| vec![m]);
            for &e in &eps {
                for &m in &ms {
                    rows.push(regularize::regularization_report(&a, e, m)?.into());
                }
            }
        }
        Suite::Weil => rows.push(spectral::weil_bound_report(&ctx)?.into()),
        Suite::Parseval => {
            let a = subset_for(task, &ctx, density, &mut rng);
            rows.push(spectral::parseval_report(&a)?.into());
        }
    }
    if !matches!(task.payload, Payload::Single | Payload::Mask(_)) {
        for row in &mut rows {
            if let Value::Object(map) = &mut row.report.instance {
                map.insert("seed".into(), json!(task.seed));
            }
        }
    }
    Ok(rows)
}

/// Runs every instance of the suite, in instance order.
pub fn run_verify(cfg: &VerifyConfig) -> Result<Vec<Row>> {
    let tasks = plan(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let results: Vec<Result<Vec<Row>>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let start = Instant::now();
                let mut rows = run_task(cfg, t)?;
                if cfg.timing {
                    let ms = start.elapsed().as_millis() as u64;
                    rows.iter_mut().for_each(|r| r.report.runtime_ms = ms);
                }
                Ok(rows)
            })
            .collect()
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "suite,q,lhs,rhs,pass";

fn csv_number(v: Option<f64>) -> String {
    v.filter(|x| x.is_finite())
        .map(|x| x.to_string())
        .unwrap_or_default()
}

/// JSON lines, or CSV when `csv` is set (the growth table for sum-free rows).
pub fn write_rows(rows: &[Row], csv: bool, out: &mut impl Write) -> io::Result<()> {
    if !csv {
        for r in rows {
            writeln!(out, "{}", r.report.to_json_line())?;
        }
        return Ok(());
    }
    if rows.iter().all(|r| r.growth.is_some()) && !rows.is_empty() {
        writeln!(out, "{}", GrowthRow::CSV_HEADER)?;
        for r in rows {
            writeln!(out, "{}", r.growth.as_ref().expect("checked").csv_line())?;
        }
        return Ok(());
    }
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let rep = &r.report;
        let q = rep
            .instance
            .get("q")
            .or_else(|| rep.instance.get("p"))
            .cloned()
            .unwrap_or(Value::Null);
        writeln!(
            out,
            "{},{},{},{},{}",
            rep.suite,
            q,
            csv_number(rep.lhs),
            csv_number(rep.rhs),
            serde_json::to_string(&rep.pass).expect("verdict serializes"),
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    Diffset,
    ProductOfDifferences,
    MinimalD,
    Cov,
    Kloosterman,
    Energy,
    Bohr,
    Regularize,
}

/// Raw inputs of `compute`; literals are `{..}` bodies (with `q` given
/// separately) or full `q=..; {..}` literals.
#[derive(Debug, Clone, Default)]
pub struct ComputeInputs {
    pub q: Option<u64>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub s: Option<String>,
    pub kind: Option<String>,
    pub lambda: Option<u64>,
    pub r: Option<u64>,
    pub epsilon: Option<f64>,
    pub m: Option<f64>,
    pub gamma: Option<String>,
    pub form: Option<String>,
    pub mode: Option<String>,
}

fn require<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

fn is_planar(lit: &str) -> bool {
    lit.contains('(')
}

/// `(q, body)` from either literal style.
fn literal_parts(q: Option<u64>, lit: &str) -> Result<(Arc<RingCtx>, String)> {
    if lit.trim_start().starts_with('q') {
        let (head, body) = lit
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("missing `;` in `{lit}`")))?;
        let literal_q: u64 = head
            .trim()
            .trim_start_matches('q')
            .trim()
            .trim_start_matches('=')
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus in `{head}`")))?;
        if let Some(q) = q {
            if q != literal_q {
                return Err(Error::ModulusMismatch {
                    left: q,
                    right: literal_q,
                });
            }
        }
        return Ok((RingCtx::shared(literal_q)?, body.to_string()));
    }
    let q = q.ok_or_else(|| Error::InvalidParameter("missing --q for a bare set literal".into()))?;
    Ok((RingCtx::shared(q)?, lit.to_string()))
}

pub fn parse_set(q: Option<u64>, lit: &str) -> Result<SubsetZq> {
    let (ctx, body) = literal_parts(q, lit)?;
    SubsetZq::parse_elements(&ctx, &body)
}

pub fn parse_set_2d(q: Option<u64>, lit: &str) -> Result<Subset2D> {
    let (ctx, body) = literal_parts(q, lit)?;
    Subset2D::parse_points(&ctx, &body)
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.trim()
        .trim_start_matches('{')
        .trim_end_matches('}')
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad residue `{t}`"))))
        .collect()
}

pub fn compute(quantity: Quantity, inp: &ComputeInputs) -> Result<Value> {
    match quantity {
        Quantity::Diffset => {
            let a = parse_set(inp.q, &require(&inp.a, "A")?)?;
            let d = a.difference_set()?;
            Ok(json!({ "q": a.modulus(), "A": a.body_literal(), "A-A": d.body_literal(), "size": d.len() }))
        }
        Quantity::ProductOfDifferences => {
            let a = parse_set(inp.q, &require(&inp.a, "A")?)?;
            let b = parse_set(Some(a.modulus()), &require(&inp.b, "B")?)?;
            let p = equations::product_of_differences(&a, &b)?;
            Ok(json!({
                "q": a.modulus(),
                "A": a.body_literal(),
                "B": b.body_literal(),
                "(A-A)(B-B)": p.body_literal(),
                "size": p.len(),
            }))
        }
        Quantity::MinimalD => {
            let la = require(&inp.a, "A")?;
            let lb = require(&inp.b, "B")?;
            if is_planar(&la) {
                let a = parse_set_2d(inp.q, &la)?;
                let b = parse_set_2d(Some(a.modulus()), &lb)?;
                let form: Form = inp.form.as_deref().unwrap_or("product").parse()?;
                let mode: InclusionMode = inp.mode.as_deref().unwrap_or("full").parse()?;
                let inc = equations::minimal_divisor_d_2d(&a, &b, mode, form)?;
                Ok(json!({
                    "q": a.modulus(),
                    "form": form.name(),
                    "mode": inp.mode.as_deref().unwrap_or("full"),
                    "d": inc.d,
                    "values": inc.certificate.body_literal(),
                }))
            } else {
                let a = parse_set(inp.q, &la)?;
                let b = parse_set(Some(a.modulus()), &lb)?;
                let (d, product) = equations::minimal_divisor_d(&a, &b)?;
                Ok(json!({
                    "q": a.modulus(),
                    "A": a.body_literal(),
                    "B": b.body_literal(),
                    "d": d,
                    "certificate": product.body_literal(),
                }))
            }
        }
        Quantity::Cov => {
            let s = parse_set(inp.q, &require(&inp.s, "S")?)?;
            let kind: CoverKind = inp.kind.as_deref().unwrap_or("plus").parse()?;
            let (k, cert) = covering::cov_exact(&s, kind)?;
            Ok(json!({ "q": s.modulus(), "kind": kind, "k": k, "certificate": cert.to_json() }))
        }
        Quantity::Kloosterman => {
            let ctx = RingCtx::shared(require(&inp.q, "q")?)?;
            let lambda = require(&inp.lambda, "lam")?;
            let r = inp.r.unwrap_or(0);
            let k = spectral::kloosterman(&ctx, lambda, r);
            Ok(
                json!({ "q": ctx.modulus(), "lambda": lambda, "r": r, "re": k.re, "im": k.im, "abs": k.norm() }),
            )
        }
        Quantity::Energy => {
            let a = parse_set_2d(inp.q, &require(&inp.a, "A")?)?;
            let g = group_action::matrices_from_set(&a)?;
            let e = group_action::multiplicative_energy(&g)?;
            let n = g.len() as u64;
            Ok(json!({
                "q": a.modulus(),
                "size": n,
                "energy": e,
                "bound": a.ctx().tau() * a.modulus() * n * n,
            }))
        }
        Quantity::Bohr => {
            let ctx = RingCtx::shared(require(&inp.q, "q")?)?;
            let gammas = parse_list(&require(&inp.gamma, "gamma")?)?;
            let eps = require(&inp.epsilon, "eps")?;
            let b = covering::bohr_set(&ctx, &gammas, eps)?;
            let cov = covering::cov_exact(&b, CoverKind::Multiplicative)?;
            Ok(json!({
                "p": ctx.modulus(),
                "gamma": gammas,
                "eps": eps,
                "bohr_set": b.body_literal(),
                "size": b.len(),
                "cov_times": cov.0,
                "certificate": cov.1.to_json(),
            }))
        }
        Quantity::Regularize => {
            let la = require(&inp.a, "A")?;
            let eps = require(&inp.epsilon, "eps")?;
            let m = require(&inp.m, "m")?;
            if is_planar(&la) {
                Ok(regularize::regularize(&parse_set_2d(inp.q, &la)?, eps, m)?.to_json())
            } else {
                Ok(regularize::regularize(&parse_set(inp.q, &la)?, eps, m)?.to_json())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Objective {
    MaxD,
    MaxCovx,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub objective: Objective,
    pub q: u64,
    /// Target density of the mutated sets.
    pub density: f64,
    pub budget: u64,
    pub seed: u64,
}

/// Swaps one member of `s` for one non-member.
fn mutate(s: &SubsetZq, rng: &mut impl Rng) -> SubsetZq {
    let q = s.modulus();
    if s.len() as u64 == q {
        return s.clone();
    }
    let members = s.to_vec();
    let out_el = members[rng.gen_range(0..members.len())];
    let absent: Vec<u64> = (0..q).filter(|x| !s.contains(*x)).collect();
    let in_el = absent[rng.gen_range(0..absent.len())];
    let mut t = s.clone();
    t.remove(out_el);
    t.insert(in_el);
    t
}

fn covx_score(a: &SubsetZq) -> Option<(usize, covering::CoverCertificate)> {
    covering::cov_exact(&a.difference_set().ok()?, CoverKind::Multiplicative).ok()
}

/// Hill-climb accepting non-worsening moves; `budget` counts proposals.
pub fn search(cfg: &SearchConfig) -> Result<Value> {
    if !(cfg.density > 0.0 && cfg.density <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "density {} not in (0,1]",
            cfg.density
        )));
    }
    let ctx = RingCtx::shared(cfg.q)?;
    let q = cfg.q;
    let fixed = DensityRange {
        lo: cfg.density,
        hi: cfg.density,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cfg.objective {
        Objective::MaxCovx => {
            let mut cur = random_subset(&ctx, fixed, &mut rng);
            let score = |a: &SubsetZq| covx_score(a).map_or(0, |(k, _)| k);
            let mut cur_score = score(&cur);
            let mut best = (cur.clone(), cur_score);
            for _ in 0..cfg.budget {
                let cand = mutate(&cur, &mut rng);
                let s = score(&cand);
                if s >= cur_score {
                    cur = cand;
                    cur_score = s;
                    if s > best.1 {
                        best = (cur.clone(), s);
                    }
                }
            }
            let (a, _) = best;
            let (k, cert) = covx_score(&a)
                .ok_or_else(|| Error::Infeasible(format!("no multiplicative cover of A-A for {a}")))?;
            let bound = q as f64 / a.len() as f64 + 1.0;
            Ok(json!({
                "objective": "max_covx",
                "q": q,
                "alpha": a.density(),
                "budget": cfg.budget,
                "seed": cfg.seed,
                "A": a.body_literal(),
                "cov_times": k,
                "bound": bound,
                "ratio": k as f64 / bound,
                "certificate": cert.to_json(),
            }))
        }
        Objective::MaxD => {
            let mut cur = (
                random_subset(&ctx, fixed, &mut rng),
                random_subset(&ctx, fixed, &mut rng),
            );
            let score = |p: &(SubsetZq, SubsetZq)| equations::minimal_divisor_d(&p.0, &p.1).map(|r| r.0);
            let mut cur_score = score(&cur)?;
            let mut best = (cur.clone(), cur_score);
            for _ in 0..cfg.budget {
                let cand = if rng.gen_bool(0.5) {
                    (mutate(&cur.0, &mut rng), cur.1.clone())
                } else {
                    (cur.0.clone(), mutate(&cur.1, &mut rng))
                };
                let s = score(&cand)?;
                if s >= cur_score {
                    cur = cand;
                    cur_score = s;
                    if s > best.1 {
                        best = (cur.clone(), s);
                    }
                }
            }
            let ((a, b), d) = best;
            let (check, product) = equations::minimal_divisor_d(&a, &b)?;
            debug_assert_eq!(check, d);
            let beta = a.density().min(b.density());
            let omega_bound = beta.powi(-(ctx.omega() as i32));
            Ok(json!({
                "objective": "max_d",
                "q": q,
                "beta": beta,
                "budget": cfg.budget,
                "seed": cfg.seed,
                "A": a.body_literal(),
                "B": b.body_literal(),
                "d": d,
                "divisors": ctx.divisors(),
                "beta_pow_omega": omega_bound,
                "ratio": d as f64 / omega_bound,
                "certificate": product.body_literal(),
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qlist_parsing() {
        assert_eq!("11,13".parse::<QList>().unwrap().0, vec![11, 13]);
        assert_eq!("2..5".parse::<QList>().unwrap().0, vec![2, 3, 4, 5]);
        assert_eq!("3, 7..8".parse::<QList>().unwrap().0, vec![3, 7, 8]);
        assert!("5..2".parse::<QList>().is_err());
        assert!("x".parse::<QList>().is_err());
        assert!("".parse::<QList>().is_err());
    }

    #[test]
    fn density_parsing() {
        assert_eq!(
            "0.3".parse::<DensityRange>().unwrap(),
            DensityRange { lo: 0.3, hi: 0.3 }
        );
        assert_eq!(
            "0.2..0.5".parse::<DensityRange>().unwrap(),
            DensityRange { lo: 0.2, hi: 0.5 }
        );
        assert!("0".parse::<DensityRange>().is_err());
        assert!("0.6..0.2".parse::<DensityRange>().is_err());
        assert!("1.5".parse::<DensityRange>().is_err());
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let s: Vec<u64> = (0..1000).map(|i| instance_seed(7, i)).collect();
        let mut d = s.clone();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), s.len());
        assert_eq!(instance_seed(7, 3), s[3]);
        assert_ne!(instance_seed(8, 3), s[3]);
    }

    #[test]
    fn invalid_moduli_rejected() {
        let mut cfg = VerifyConfig::new(Suite::Vinh);
        cfg.moduli = Some(vec![12]);
        assert!(run_verify(&cfg).is_err());
        let mut cfg = VerifyConfig::new(Suite::Vinh);
        cfg.exhaustive = true;
        assert!(run_verify(&cfg).is_err());
        let mut cfg = VerifyConfig::new(Suite::Covm);
        cfg.moduli = Some(vec![25]);
        cfg.exhaustive = true;
        assert!(run_verify(&cfg).is_err());
    }

    #[test]
    fn jobs_do_not_change_output() {
        let mut cfg = VerifyConfig::new(Suite::Fish1d);
        cfg.moduli = Some(vec![12]);
        cfg.samples = 20;
        cfg.seed = 4;
        let one: Vec<String> = run_verify(&cfg)
            .unwrap()
            .iter()
            .map(|r| r.report.to_json_line())
            .collect();
        cfg.jobs = 4;
        let four: Vec<String> = run_verify(&cfg)
            .unwrap()
            .iter()
            .map(|r| r.report.to_json_line())
            .collect();
        assert_eq!(one, four);
    }

    #[test]
    fn every_suite_runs_clean() {
        for suite in Suite::value_variants() {
            let mut cfg = VerifyConfig::new(*suite);
            cfg.samples = 3;
            cfg.seed = 1;
            if *suite == Suite::Weil {
                cfg.moduli = Some(vec![5, 6, 12]);
            }
            let rows = run_verify(&cfg).unwrap();
            assert!(!rows.is_empty(), "{suite}");
            for r in &rows {
                assert!(!r.report.failed(), "{}", r.report.to_json_line());
                assert_eq!(r.report.suite, suite.name());
            }
        }
    }

    #[test]
    fn compute_examples() {
        let inp = ComputeInputs {
            q: Some(4),
            a: Some("{0,2}".into()),
            b: Some("{0,2}".into()),
            ..Default::default()
        };
        assert_eq!(compute(Quantity::MinimalD, &inp).unwrap()["d"], 4);
        let inp = ComputeInputs {
            q: Some(13),
            s: Some("{5,6,7,8}".into()),
            kind: Some("times".into()),
            ..Default::default()
        };
        let v = compute(Quantity::Cov, &inp).unwrap();
        assert_eq!(v["certificate"]["verified"], true);
        let inp = ComputeInputs {
            q: Some(5),
            lambda: Some(1),
            r: Some(1),
            ..Default::default()
        };
        let v = compute(Quantity::Kloosterman, &inp).unwrap();
        assert!((v["re"].as_f64().unwrap() - 0.381966).abs() < 1e-6);
        let inp = ComputeInputs {
            a: Some("q=7; {0,1,3}".into()),
            ..Default::default()
        };
        assert_eq!(compute(Quantity::Diffset, &inp).unwrap()["size"], 7);
        let inp = ComputeInputs {
            q: Some(5),
            a: Some("{(0,0),(1,1)}".into()),
            ..Default::default()
        };
        assert!(
            compute(Quantity::Energy, &inp).unwrap()["energy"]
                .as_u64()
                .unwrap()
                >= 4
        );
        assert!(compute(Quantity::Diffset, &ComputeInputs::default()).is_err());
        let bad = ComputeInputs {
            q: Some(7),
            a: Some("{0,x}".into()),
            ..Default::default()
        };
        assert!(matches!(compute(Quantity::Diffset, &bad), Err(Error::Parse(_))));
    }

    #[test]
    fn zero_budget_search_returns_initial_instance() {
        let cfg = SearchConfig {
            objective: Objective::MaxCovx,
            q: 31,
            density: 0.2,
            budget: 0,
            seed: 1,
        };
        let v = search(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ctx = RingCtx::shared(31).unwrap();
        let a = random_subset(&ctx, DensityRange { lo: 0.2, hi: 0.2 }, &mut rng);
        assert_eq!(v["A"], a.body_literal());
        assert_eq!(v["certificate"]["verified"], true);
    }

    #[test]
    fn search_improves_or_keeps_score() {
        let base = SearchConfig {
            objective: Objective::MaxD,
            q: 30,
            density: 0.25,
            budget: 0,
            seed: 2,
        };
        let d0 = search(&base).unwrap()["d"].as_u64().unwrap();
        let d1 = search(&SearchConfig { budget: 200, ..base }).unwrap()["d"]
            .as_u64()
            .unwrap();
        assert!(d1 >= d0);
        assert_eq!(30 % d1, 0);
    }
}
