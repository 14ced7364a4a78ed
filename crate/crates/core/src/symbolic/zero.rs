//! Seeded, tri-state zero testing.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::{eval_scaled, FunctionEnv, Point};
use super::expr::Expr;
use super::number::{CRational, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: usize,
    /// Relative threshold: a float sample counts as zero when `|value| <= threshold * max(1, scale)`.
    pub threshold: f64,
    /// Variables are drawn from multiples of 1/16 in `[lo, hi]`, excluding 0.
    pub lo: i64,
    pub hi: i64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { seed: 0, samples: 16, threshold: 1e-9, lo: -2, hi: 2 }
    }
}

impl SamplerConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        SamplerConfig { seed, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroStatus {
    Zero,
    NonZero,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Exact,
    Probabilistic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: BTreeMap<String, String>,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroVerdict {
    pub status: ZeroStatus,
    pub confidence: Confidence,
    /// Samples that evaluated without a domain error.
    pub samples: usize,
    pub seed: u64,
    pub witness: Option<Witness>,
}

impl ZeroVerdict {
    pub fn exact_zero(seed: u64) -> Self {
        ZeroVerdict { status: ZeroStatus::Zero, confidence: Confidence::Exact, samples: 0, seed, witness: None }
    }

    pub fn is_zero(&self) -> bool {
        self.status == ZeroStatus::Zero
    }

    pub fn is_nonzero(&self) -> bool {
        self.status == ZeroStatus::NonZero
    }
}

fn small_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, denom: i64) -> BigRational {
    loop {
        let k = rng.gen_range(lo * denom..=hi * denom);
        if k != 0 {
            return BigRational::new(BigInt::from(k), BigInt::from(denom));
        }
    }
}

/// A random smooth stand-in for a function of `arity` arguments:
/// a quadratic polynomial in the slots plus `c * exp(sum b_j s_j / 2)`.
fn random_body(rng: &mut ChaCha8Rng, arity: usize) -> Expr {
    let coef = |rng: &mut ChaCha8Rng| Expr::constant(CRational::real(small_rational(rng, -2, 2, 4)));
    let slots: Vec<Expr> = (0..arity).map(FunctionEnv::slot).collect();
    let mut body = coef(rng);
    for j in 0..arity {
        body = &body + &(&coef(rng) * &slots[j]);
        for l in j..arity {
            body = &body + &(&coef(rng) * &(&slots[j] * &slots[l]));
        }
    }
    let mut arg = Expr::zero();
    for s in &slots {
        arg = &arg + &(&coef(rng) * s);
    }
    body + &coef(rng) * &Expr::exp(&(&arg * &Expr::ratio(1, 2)))
}

/// Decides whether `e` vanishes identically.
///
/// A canonical zero is an exact Zero. Otherwise `cfg.samples` random points (and random
/// instantiations of any abstract functions) are tried; one sample above threshold gives
/// NonZero with that sample as witness.
pub fn is_zero(e: &Expr, cfg: &SamplerConfig) -> ZeroVerdict {
    if e.is_zero() {
        return ZeroVerdict::exact_zero(cfg.seed);
    }
    let vars = e.free_vars();
    let funcs = e.functions();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ok = 0;
    for _ in 0..cfg.samples {
        let mut point = Point::new();
        let mut shown = BTreeMap::new();
        for v in vars.iter() {
            let r = small_rational(&mut rng, cfg.lo, cfg.hi, 16);
            shown.insert(v.to_string(), r.to_string());
            point.set(v, CRational::real(r));
        }
        let mut env = FunctionEnv::new();
        for (name, arity) in &funcs {
            env.define(name, random_body(&mut rng, *arity));
        }
        let (value, scale) = match eval_scaled(e, &point, &env) {
            Ok(r) => r,
            // every variable and function is bound, so only domain errors reach here
            Err(_) => continue,
        };
        ok += 1;
        let nonzero = match &value {
            Value::Exact(c) => !c.is_zero(),
            Value::Float(z) => z.norm() > cfg.threshold * scale.max(1.0),
        };
        if nonzero {
            let confidence = if value.is_exact() { Confidence::Exact } else { Confidence::Probabilistic };
            return ZeroVerdict {
                status: ZeroStatus::NonZero,
                confidence,
                samples: ok,
                seed: cfg.seed,
                witness: Some(Witness { point: shown, magnitude: value.norm() }),
            };
        }
    }
    ZeroVerdict {
        status: if ok == 0 { ZeroStatus::Unknown } else { ZeroStatus::Zero },
        confidence: Confidence::Probabilistic,
        samples: ok,
        seed: cfg.seed,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_zero_is_exact() {
        let x = Expr::var("x");
        let v = is_zero(&(&x - &x), &SamplerConfig::default());
        assert_eq!(v.status, ZeroStatus::Zero);
        assert_eq!(v.confidence, Confidence::Exact);
    }

    #[test]
    fn product_is_nonzero_with_witness() {
        let e = &Expr::var("x") * &Expr::var("y");
        let v = is_zero(&e, &SamplerConfig::default());
        assert_eq!(v.status, ZeroStatus::NonZero);
        assert!(v.witness.unwrap().point.contains_key("x"));
    }

    #[test]
    fn pythagorean_both_paths() {
        let x = Expr::var("x");
        let (s, c) = (Expr::sin(&x), Expr::cos(&x));
        let e = &(&s * &s) + &(&c * &c) - Expr::one();
        assert!(e.is_zero());
        // sampled path on an expression the rewrite does not touch
        let y = Expr::var("y");
        let sum = Expr::sin(&(&x + &y));
        let expand = &(&Expr::sin(&x) * &Expr::cos(&y)) + &(&Expr::cos(&x) * &Expr::sin(&y));
        let v = is_zero(&(&sum - &expand), &SamplerConfig::default());
        assert_eq!(v.status, ZeroStatus::Zero);
        assert_eq!(v.confidence, Confidence::Probabilistic);
        assert_eq!(v.samples, 16);
    }

    #[test]
    fn abstract_functions_are_instantiated() {
        let f = Expr::func("f", vec![Expr::var("z")]);
        let v = is_zero(&f.diff("z"), &SamplerConfig::default());
        assert_eq!(v.status, ZeroStatus::NonZero);
    }

    #[test]
    fn all_domain_errors_give_unknown() {
        let e = Expr::ln(&Expr::zero());
        assert_eq!(is_zero(&(e + Expr::var("y")), &SamplerConfig::default()).status, ZeroStatus::Unknown);
    }
}
