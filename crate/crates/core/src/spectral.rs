//! Additive characters of `Z_q`: direct DFT, Kloosterman sums and the
//! numeric checks built on them.

use std::sync::Arc;

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{Verdict, VerificationReport};
use crate::ring::RingCtx;
use crate::set::SubsetZq;

/// Tolerance for identities that hold exactly in exact arithmetic.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Slack added on the right of analytic inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-6;

pub const MAX_WEIL_MODULUS: u64 = 4096;

/// `values[r] = f^(r) = sum_x f(x) e_q(x r)`.
#[derive(Debug, Clone)]
pub struct SpectrumZq {
    pub ctx: Arc<RingCtx>,
    pub values: Vec<Complex64>,
}

impl SpectrumZq {
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `|sum |f^|^2 - q sum |f|^2| / (q sum |f|^2)`; zero for the zero function.
    pub fn parseval_relative_error(&self, f: &[f64]) -> f64 {
        let mass: f64 = f.iter().map(|x| x * x).sum::<f64>() * self.ctx.modulus() as f64;
        if mass == 0.0 {
            return self.energy();
        }
        (self.energy() - mass).abs() / mass
    }
}

/// Definition-based DFT, O(q^2).
pub fn fourier_transform(ctx: &Arc<RingCtx>, f: &[f64]) -> Result<SpectrumZq> {
    let q = ctx.modulus() as usize;
    if f.len() != q {
        return Err(Error::LengthMismatch {
            got: f.len(),
            want: q,
        });
    }
    let roots = ctx.roots_of_unity();
    let values = (0..q)
        .map(|r| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for &fx in f {
                if fx != 0.0 {
                    acc += roots[idx] * fx;
                }
                idx += r;
                if idx >= q {
                    idx -= q;
                }
            }
            acc
        })
        .collect();
    Ok(SpectrumZq {
        ctx: Arc::clone(ctx),
        values,
    })
}

pub fn indicator(set: &SubsetZq) -> Vec<f64> {
    let mut f = vec![0.0; set.modulus() as usize];
    for x in set.iter() {
        f[x as usize] = 1.0;
    }
    f
}

/// Inverses of all units, `0` for non-units.
fn inverse_table(ctx: &RingCtx) -> Vec<Option<u64>> {
    (0..ctx.modulus()).map(|x| ctx.mod_inverse(x).ok()).collect()
}

/// `K_q(lambda, r) = sum_{x in Z_q^*} e_q(lambda / x + r x)`.
pub fn kloosterman(ctx: &RingCtx, lambda: u64, r: u64) -> Complex64 {
    let inv = inverse_table(ctx);
    kloosterman_with(ctx, &inv, lambda, r)
}

fn kloosterman_with(ctx: &RingCtx, inv: &[Option<u64>], lambda: u64, r: u64) -> Complex64 {
    let q = ctx.modulus();
    let roots = ctx.roots_of_unity();
    let (lambda, r) = (lambda % q, r % q);
    inv.iter()
        .enumerate()
        .filter_map(|(x, xi)| xi.map(|xi| (x as u64, xi)))
        .map(|(x, xi)| roots[((lambda * xi + r * x) % q) as usize])
        .sum()
}

/// Sweeps every `lambda in Z_q^*`, `r in Z_q` and checks realness,
/// `|K| <= 2 tau(q) sqrt(q)` and `K_q(lambda, 0) = mu(q)`.
pub fn weil_bound_report(ctx: &RingCtx) -> Result<VerificationReport> {
    let q = ctx.modulus();
    if q > MAX_WEIL_MODULUS {
        return Err(Error::InvalidParameter(format!(
            "Kloosterman sweep supports q <= {MAX_WEIL_MODULUS}"
        )));
    }
    let inv = inverse_table(ctx);
    let bound = 2.0 * ctx.tau() as f64 * (q as f64).sqrt();
    let mu = ctx.mobius() as f64;
    let mut max_abs = 0.0f64;
    let mut max_imag = 0.0f64;
    let mut max_ramanujan_err = 0.0f64;
    let mut violators = Vec::new();
    for lambda in ctx.units() {
        for r in 0..q {
            let k = kloosterman_with(ctx, &inv, lambda, r);
            max_abs = max_abs.max(k.norm());
            max_imag = max_imag.max(k.im.abs());
            if r == 0 {
                max_ramanujan_err = max_ramanujan_err.max((k.re - mu).abs());
            }
            if k.norm() > bound + INEQUALITY_SLACK || k.im.abs() >= IDENTITY_TOL {
                violators.push(json!([lambda, r, k.re, k.im]));
            }
        }
    }
    let ok = violators.is_empty() && max_ramanujan_err < IDENTITY_TOL;
    Ok(
        VerificationReport::new("weil", "|K_q(l,r)| <= 2 tau(q) sqrt(q)", json!({ "q": q }))
            .sides(max_abs, bound)
            .verdict(Verdict::from_bool(ok))
            .witness(json!({
                "max_imag": max_imag,
                "max_ramanujan_error": max_ramanujan_err,
                "mobius": ctx.mobius(),
                "violators": violators,
            })),
    )
}

/// `sum |f^|^2 = q sum |f|^2` for the indicator of `set`.
pub fn parseval_report(set: &SubsetZq) -> Result<VerificationReport> {
    let f = indicator(set);
    let spec = fourier_transform(set.ctx(), &f)?;
    let err = spec.parseval_relative_error(&f);
    Ok(VerificationReport::new(
        "parseval",
        "sum |f^(r)|^2 = q sum |f(x)|^2",
        json!({ "q": set.modulus(), "A": set.body_literal() }),
    )
    .sides(err, IDENTITY_TOL)
    .verdict(Verdict::from_bool(err < IDENTITY_TOL)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(q: u64) -> Arc<RingCtx> {
        RingCtx::shared(q).unwrap()
    }

    /// Fourier sum evaluated with fresh trig calls, independent of the root table.
    fn naive_dft(f: &[f64]) -> Vec<Complex64> {
        let q = f.len();
        (0..q)
            .map(|r| {
                (0..q)
                    .map(|x| {
                        let t = std::f64::consts::TAU * ((x * r) % q) as f64 / q as f64;
                        Complex64::new(t.cos(), t.sin()) * f[x]
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn transform_examples() {
        let c = ctx(8);
        let delta = indicator(&SubsetZq::singleton(&c, 0));
        let s = fourier_transform(&c, &delta).unwrap();
        assert!(s
            .values
            .iter()
            .all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-12));

        let full = vec![1.0; 8];
        let s = fourier_transform(&c, &full).unwrap();
        assert!((s.values[0].re - 8.0).abs() < 1e-12);
        assert!(s.values[1..].iter().all(|v| v.norm() < 1e-12));

        let c6 = ctx(6);
        let f = indicator(&SubsetZq::from_elements(&c6, [0, 2, 4]));
        let s = fourier_transform(&c6, &f).unwrap();
        let oracle = naive_dft(&f);
        for (r, (v, o)) in s.values.iter().zip(&oracle).enumerate() {
            let want = if r == 0 || r == 3 { 3.0 } else { 0.0 };
            assert!((v.norm() - want).abs() < 1e-12, "r={r}");
            assert!((v - o).norm() < 1e-12);
        }
        assert!(fourier_transform(&c6, &[1.0; 5]).is_err());
    }

    #[test]
    fn transform_matches_naive_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [5usize, 12, 17, 30] {
            let c = ctx(q as u64);
            let f: Vec<f64> = (0..q).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let s = fourier_transform(&c, &f).unwrap();
            let oracle = naive_dft(&f);
            for (v, o) in s.values.iter().zip(&oracle) {
                assert!((v - o).norm() < 1e-9);
            }
            assert!((s.values[0].re - f.iter().sum::<f64>()).abs() < 1e-9);
            assert!(s.parseval_relative_error(&f) < IDENTITY_TOL);
        }
    }

    #[test]
    fn kloosterman_examples() {
        // units {1,2,3,4}, inverses {1,3,2,4}: e(2/5) + 1 + 1 + e(3/5)
        let k = kloosterman(&ctx(5), 1, 1);
        let want = 2.0 + 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        assert!((k.re - want).abs() < 1e-12);
        assert!((k.re - 0.381_966_0).abs() < 1e-6);
        assert!(k.im.abs() < 1e-12);
        // units of Z_6 are {1,5}: e(1/6) + e(5/6) = 2 cos(pi/3) = 1
        assert!((kloosterman(&ctx(6), 1, 0).re - 1.0).abs() < 1e-12);
        for q in [7u64, 12, 30] {
            let c = ctx(q);
            assert!((kloosterman(&c, 0, 0).re - c.phi() as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn kloosterman_is_real() {
        for q in (2..=512u64).step_by(17) {
            let c = ctx(q);
            for (lambda, r) in [(1, 0), (1, 1), (q / 2, 3), (q - 1, q / 3)] {
                assert!(kloosterman(&c, lambda, r).im.abs() < IDENTITY_TOL, "q={q}");
            }
        }
    }

    #[test]
    fn kloosterman_symmetric_for_prime_moduli() {
        for q in (2..=100u64).filter(|&p| crate::ring::is_prime(p)) {
            let c = ctx(q);
            for l in 1..q {
                for r in 1..q {
                    let d = kloosterman(&c, l, r) - kloosterman(&c, r, l);
                    assert!(d.norm() < IDENTITY_TOL);
                }
            }
        }
    }

    #[test]
    fn ramanujan_sum_is_mobius() {
        for q in 2..=200u64 {
            let c = ctx(q);
            if !c.is_squarefree() {
                continue;
            }
            for lambda in c.units().take(5) {
                let k = kloosterman(&c, lambda, 0);
                assert!((k.re - c.mobius() as f64).abs() < IDENTITY_TOL, "q={q}");
            }
        }
    }

    #[test]
    fn weil_examples() {
        for q in [5u64, 7, 15] {
            let r = weil_bound_report(&ctx(q)).unwrap();
            assert_eq!(r.pass, Verdict::Pass, "{r:?}");
        }
        let r = weil_bound_report(&ctx(5)).unwrap();
        assert!(r.lhs.unwrap() < 2.0 * 5f64.sqrt());
        assert!((r.rhs.unwrap() - 4.0 * 5f64.sqrt()).abs() < 1e-12);
        assert!(weil_bound_report(&ctx(5000)).is_err());
    }
}
