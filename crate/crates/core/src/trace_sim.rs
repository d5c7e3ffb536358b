//! Seeded generators for theorem-verification instances and for
//! evaluation traces with a controllable synthetic/test rank correlation.
//!
//! Instance `k` of a batch is generated from `derive_seed(seed, [k])`; the
//! trace generator draws architecture-level values from
//! `derive_seed(seed, [0, arch])` and run-level values from
//! `derive_seed(seed, [1, arch, run])`. Output never depends on how
//! generation is scheduled.

use std::collections::BTreeMap;

use rand::Rng as _;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::domain::{FiniteDomain, FiniteInstance, LabelMap, Pmf};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed, Rng};
use crate::selection::{EvalRecord, EvalTraceSet, Split, TrainedOn};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceGenConfig {
    /// Inclusive range of domain sizes.
    pub domain_size: [usize; 2],
    /// Inclusive range of class counts.
    pub num_classes: [u32; 2],
    /// Synthetic pmf is `(1 − lambda)·μ_r + lambda·ν`.
    pub lambda: f64,
    /// Probability that a hypothesis copies the true label at a point.
    pub hypothesis_accuracy: f64,
    pub hypotheses_per_instance: usize,
}

impl Default for InstanceGenConfig {
    fn default() -> Self {
        InstanceGenConfig {
            domain_size: [2, 64],
            num_classes: [2, 10],
            lambda: 0.3,
            hypothesis_accuracy: 0.7,
            hypotheses_per_instance: 4,
        }
    }
}

impl InstanceGenConfig {
    /// Configuration under which rank flips are common.
    pub fn adversarial() -> Self {
        InstanceGenConfig {
            lambda: 0.9,
            hypothesis_accuracy: 0.6,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [nlo, nhi] = self.domain_size;
        if nlo < 1 || nlo > nhi {
            return Err(Error::InvalidConfig(format!(
                "domain_size range must satisfy 1 <= lo <= hi, got {nlo}..{nhi}"
            )));
        }
        let [clo, chi] = self.num_classes;
        if clo < 2 || clo > chi {
            return Err(Error::InvalidConfig(format!(
                "num_classes range must satisfy 2 <= lo <= hi, got {clo}..{chi}"
            )));
        }
        for (name, v) in [("lambda", self.lambda), ("hypothesis_accuracy", self.hypothesis_accuracy)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        if self.hypotheses_per_instance < 1 {
            return Err(Error::InvalidConfig("hypotheses_per_instance must be at least 1".into()));
        }
        Ok(())
    }
}

/// Uniform point on the simplex (normalized unit exponentials).
fn random_simplex(rng: &mut Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.into_iter().map(|x| x / total).collect()
    } else {
        vec![1.0 / n as f64; n]
    }
}

fn noisy_copy(rng: &mut Rng, f: &[u32], c: u32, accuracy: f64) -> Vec<u32> {
    f.iter()
        .map(|&y| {
            if rng.random::<f64>() < accuracy {
                y
            } else {
                (y + 1 + rng.random_range(0..c - 1)) % c
            }
        })
        .collect()
}

pub fn generate_instance(cfg: &InstanceGenConfig, seed: u64) -> Result<FiniteInstance> {
    cfg.validate()?;
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(cfg.domain_size[0]..=cfg.domain_size[1]);
    let c = rng.random_range(cfg.num_classes[0]..=cfg.num_classes[1]);
    let domain = FiniteDomain::new(n, c)?;

    let mu_r = Pmf::new(random_simplex(&mut rng, n))?;
    let nu = random_simplex(&mut rng, n);
    let mu_s = if cfg.lambda == 0.0 {
        mu_r.clone()
    } else {
        let lambda = cfg.lambda;
        Pmf::new(
            mu_r.masses()
                .iter()
                .zip(&nu)
                .map(|(r, v)| (1.0 - lambda) * r + lambda * v)
                .collect(),
        )?
    };

    let f: Vec<u32> = (0..n).map(|_| rng.random_range(0..c)).collect();
    let hypotheses = (0..cfg.hypotheses_per_instance)
        .map(|_| LabelMap::from(noisy_copy(&mut rng, &f, c, cfg.hypothesis_accuracy)))
        .collect();
    Ok(FiniteInstance::new(domain, mu_r, mu_s, LabelMap::from(f), hypotheses)?)
}

/// Seed of instance `index` in a batch.
pub fn instance_seed(batch_seed: u64, index: u64) -> u64 {
    derive_seed(batch_seed, &[index])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceGenConfig {
    pub num_archs: usize,
    pub runs_per_arch: usize,
    pub epochs: usize,
    /// Target correlation between synthetic and test latent quality.
    pub rho: f64,
    pub floor_test: f64,
    pub arch_spread: f64,
    pub run_spread: f64,
    pub epoch_noise: f64,
    pub synth_bias: f64,
    pub synth_noise: f64,
    pub subset_penalty: f64,
    /// Height of the shared `amplitude·exp(−epoch/tau)` learning curve.
    pub amplitude: f64,
    pub tau: f64,
    /// Subset-trained runs per architecture (validation split only).
    pub subset_runs: usize,
    pub seed: u64,
}

impl Default for TraceGenConfig {
    fn default() -> Self {
        TraceGenConfig {
            num_archs: 64,
            runs_per_arch: 10,
            epochs: 100,
            rho: 0.97,
            floor_test: 0.1,
            arch_spread: 0.02,
            run_spread: 0.01,
            epoch_noise: 0.002,
            synth_bias: 0.03,
            synth_noise: 0.002,
            subset_penalty: 0.03,
            amplitude: 0.5,
            tau: 10.0,
            subset_runs: 10,
            seed: 0,
        }
    }
}

impl TraceGenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_archs < 1 || self.runs_per_arch < 1 || self.epochs < 1 {
            return Err(Error::InvalidConfig(
                "num_archs, runs_per_arch and epochs must be at least 1".into(),
            ));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidConfig(format!("rho must be in [-1, 1], got {}", self.rho)));
        }
        let non_negative = [
            ("arch_spread", self.arch_spread),
            ("run_spread", self.run_spread),
            ("epoch_noise", self.epoch_noise),
            ("synth_bias", self.synth_bias),
            ("synth_noise", self.synth_noise),
            ("subset_penalty", self.subset_penalty),
            ("amplitude", self.amplitude),
        ];
        for (name, v) in non_negative {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !self.floor_test.is_finite() {
            return Err(Error::InvalidConfig("floor_test must be finite".into()));
        }
        if !self.tau.is_finite() || self.tau <= 0.0 {
            return Err(Error::InvalidConfig(format!("tau must be positive, got {}", self.tau)));
        }
        Ok(())
    }
}

fn normal(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Simulated evaluation traces.
///
/// Each fully-trained (arch, run) has latent quality
/// `q = arch_spread·z_arch + run_spread·z_run`. Its test curve is
/// `floor_test + q + amplitude·exp(−e/tau) + epoch_noise·ξ`, and its
/// synthetic curve replaces `q` by `rho·q + √(1 − rho²)·q′` for an
/// independent `q′` of the same scale, adds `synth_bias`, and uses
/// `synth_noise`. Subset-trained runs share the architecture term, draw a
/// fresh run term, pay `subset_penalty`, and report train and validation
/// errors. All errors are clamped to `[0, 1]` after noise.
pub fn generate_traces(cfg: &TraceGenConfig) -> Result<EvalTraceSet> {
    cfg.validate()?;
    let width = (cfg.num_archs - 1).to_string().len().max(2);
    let couple = (1.0 - cfg.rho * cfg.rho).max(0.0).sqrt();
    let curve: Vec<f64> = (0..cfg.epochs)
        .map(|e| cfg.amplitude * (-(e as f64) / cfg.tau).exp())
        .collect();
    let clamp = |x: f64| x.clamp(0.0, 1.0);

    let mut records = Vec::with_capacity(cfg.num_archs * cfg.epochs * (3 * cfg.runs_per_arch + 2 * cfg.subset_runs));
    for a in 0..cfg.num_archs {
        let arch_id = format!("a{a:0width$}");
        let mut arch_rng = rng_from_seed(derive_seed(cfg.seed, &[0, a as u64]));
        let z_arch = normal(&mut arch_rng);
        let z_arch_alt = normal(&mut arch_rng);

        let mut push = |run: u64, trained_on: TrainedOn, split: Split, errs: &[f64]| {
            records.extend(errs.iter().enumerate().map(|(e, &error)| EvalRecord {
                arch_id: arch_id.clone(),
                run_id: run,
                epoch: e as u64,
                split,
                trained_on,
                error,
            }));
        };

        for r in 0..cfg.runs_per_arch {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, &[1, a as u64, r as u64]));
            let q = cfg.arch_spread * z_arch + cfg.run_spread * normal(&mut rng);
            let q_alt = cfg.arch_spread * z_arch_alt + cfg.run_spread * normal(&mut rng);
            let q_synth = cfg.rho * q + couple * q_alt;
            let mut train = Vec::with_capacity(cfg.epochs);
            let mut test = Vec::with_capacity(cfg.epochs);
            let mut synth = Vec::with_capacity(cfg.epochs);
            for &c in &curve {
                let base = cfg.floor_test + q + c;
                let base_synth = cfg.floor_test + q_synth + c;
                test.push(clamp(base + cfg.epoch_noise * normal(&mut rng)));
                synth.push(clamp(base_synth + cfg.synth_bias + cfg.synth_noise * normal(&mut rng)));
                train.push(clamp(0.2 * cfg.floor_test + c + 0.5 * cfg.epoch_noise * normal(&mut rng).abs()));
            }
            push(r as u64, TrainedOn::Full, Split::Train, &train);
            push(r as u64, TrainedOn::Full, Split::Test, &test);
            push(r as u64, TrainedOn::Full, Split::Synthetic, &synth);
        }
        for r in 0..cfg.subset_runs {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, &[2, a as u64, r as u64]));
            let q = cfg.arch_spread * z_arch + cfg.run_spread * normal(&mut rng);
            let mut train = Vec::with_capacity(cfg.epochs);
            let mut val = Vec::with_capacity(cfg.epochs);
            for &c in &curve {
                val.push(clamp(
                    cfg.floor_test + q + cfg.subset_penalty + c + cfg.epoch_noise * normal(&mut rng),
                ));
                train.push(clamp(0.2 * cfg.floor_test + c + 0.5 * cfg.epoch_noise * normal(&mut rng).abs()));
            }
            push(r as u64, TrainedOn::Subset, Split::Train, &train);
            push(r as u64, TrainedOn::Subset, Split::Val, &val);
        }
    }

    let mut metadata = BTreeMap::new();
    metadata.insert(
        "generator".to_owned(),
        serde_json::to_string(cfg).expect("config serializes"),
    );
    EvalTraceSet::new(records, metadata)
}
