//! Exhaustive checking of the rank-preservation guarantee on generated
//! finite instances.
//!
//! For a hypothesis pair `(h1, h2)` with synthetic risk gap
//! `Δε_s = ε_s(h2) − ε_s(h1)` and restricted divergence `δ_R` over the
//! region where the hypotheses disagree with each other, the guarantee is
//! `Δε_s ≥ δ_R ⇒ Δε_r ≥ 0`. It follows from `Δε_r ≥ Δε_s − δ_R`, which in
//! turn gives `Δε_s − Δε_r ≤ δ_full`. All three are checked per pair.

use rayon::prelude::*;
use serde::Serialize;

use crate::divergence::{exact_l1, restricted_l1};
use crate::domain::{disagreement_regions, lemma1_check, risk_difference, FiniteInstance};
use crate::error::{Error, Result};
use crate::trace_sim::{generate_instance, instance_seed, InstanceGenConfig};

/// Numerical slack allowed on the inequalities and the region identity.
pub const INEQUALITY_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_TRIGGER_FLOOR: f64 = 0.01;
pub const COUNTEREXAMPLE_CAP: usize = 16;

/// Bins of the slack histogram over `[0, SLACK_RANGE]`.
const SLACK_BINS: usize = 1 << 16;
const SLACK_RANGE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremVerdict {
    pub delta_synthetic: f64,
    pub delta_real: f64,
    pub restricted_l1: f64,
    pub full_l1: f64,
    /// `Δε_s ≥ δ_R`
    pub condition_held: bool,
    /// `Δε_r ≥ 0`
    pub conclusion_held: bool,
    /// `Δε_r − (Δε_s − δ_R)`, non-negative up to rounding.
    pub slack: f64,
    /// `Δε_s ≥ δ_full`
    pub corollary1_condition: bool,
    /// `δ_full − (Δε_s − Δε_r)`, non-negative up to rounding.
    pub corollary2_slack: f64,
}

impl TheoremVerdict {
    /// Condition held but the real-domain ranking flipped.
    pub fn is_violation(&self) -> bool {
        self.condition_held && !self.conclusion_held
    }

    /// Synthetic data ranks `h1` at least as good, the real domain ranks it
    /// strictly worse, and the condition did not hold.
    pub fn is_rank_flip(&self) -> bool {
        self.delta_synthetic >= 0.0 && !self.condition_held && self.delta_real < 0.0
    }
}

pub fn check_pair(inst: &FiniteInstance, i: usize, j: usize) -> Result<TheoremVerdict> {
    let h1 = inst.hypothesis(i)?;
    let h2 = inst.hypothesis(j)?;
    if i == j {
        return Err(Error::schema(
            format!("pair ({i}, {j})"),
            "hypotheses",
            "expected two distinct hypothesis indices",
        ));
    }
    let f = inst.f();
    let delta_synthetic = risk_difference(inst.mu_s(), h1, h2, f)?;
    let delta_real = risk_difference(inst.mu_r(), h1, h2, f)?;
    let (omega1, omega2) = disagreement_regions(h1, h2, f)?;
    let region = omega1.union(&omega2).copied().collect();
    let restricted = restricted_l1(inst.mu_r(), inst.mu_s(), &region)?;
    let full = exact_l1(inst.mu_r(), inst.mu_s())?;
    Ok(TheoremVerdict {
        delta_synthetic,
        delta_real,
        restricted_l1: restricted,
        full_l1: full,
        condition_held: delta_synthetic >= restricted,
        conclusion_held: delta_real >= 0.0,
        slack: delta_real - (delta_synthetic - restricted),
        corollary1_condition: delta_synthetic >= full,
        corollary2_slack: full - (delta_synthetic - delta_real),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    /// Minimum share of checked pairs that must meet the condition for the
    /// run to count as conclusive.
    pub trigger_floor: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            workers: None,
            trigger_floor: DEFAULT_TRIGGER_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub instance_index: u64,
    pub instance_seed: u64,
    pub pair: (usize, usize),
    pub instance: FiniteInstance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub config: InstanceGenConfig,
    pub instances: u64,
    pub pairs_checked: u64,
    pub condition_triggered: u64,
    pub trigger_fraction: f64,
    pub trigger_floor: f64,
    pub inconclusive: bool,
    /// Pairs where the condition held and the real ranking flipped.
    pub violations: u64,
    pub proof_chain_violations: u64,
    pub corollary1_triggered: u64,
    pub corollary2_violations: u64,
    pub lemma_residual_violations: u64,
    pub lemma_max_residual: f64,
    pub slack_min: f64,
    /// Median slack, resolved to the histogram bin width (2^-14).
    pub slack_median: f64,
    pub corollary2_slack_min: f64,
    pub counterexamples: Vec<Counterexample>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
            && self.proof_chain_violations == 0
            && self.corollary2_violations == 0
            && self.lemma_residual_violations == 0
    }
}

#[derive(Debug, Clone)]
struct Partial {
    pairs: u64,
    triggered: u64,
    violations: u64,
    proof_chain: u64,
    cor1: u64,
    cor2: u64,
    lemma: u64,
    lemma_max: f64,
    slack_min: f64,
    cor2_min: f64,
    hist: Vec<u64>,
    counterexamples: Vec<Counterexample>,
}

impl Partial {
    fn new() -> Self {
        Partial {
            pairs: 0,
            triggered: 0,
            violations: 0,
            proof_chain: 0,
            cor1: 0,
            cor2: 0,
            lemma: 0,
            lemma_max: 0.0,
            slack_min: f64::INFINITY,
            cor2_min: f64::INFINITY,
            hist: vec![0; SLACK_BINS],
            counterexamples: Vec::new(),
        }
    }

    fn add_instance(&mut self, index: u64, seed: u64, inst: FiniteInstance) -> Result<()> {
        let k = inst.hypotheses().len();
        let mut witness = None;
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let v = check_pair(&inst, i, j)?;
                self.pairs += 1;
                self.triggered += v.condition_held as u64;
                self.cor1 += v.corollary1_condition as u64;
                let bad_chain = v.slack < -INEQUALITY_TOLERANCE;
                let bad_cor2 = v.corollary2_slack < -INEQUALITY_TOLERANCE;
                self.violations += v.is_violation() as u64;
                self.proof_chain += bad_chain as u64;
                self.cor2 += bad_cor2 as u64;
                self.slack_min = self.slack_min.min(v.slack);
                self.cor2_min = self.cor2_min.min(v.corollary2_slack);
                self.hist[slack_bin(v.slack)] += 1;

                let hs = inst.hypotheses();
                let mut bad_lemma = false;
                for pmf in [inst.mu_r(), inst.mu_s()] {
                    let c = lemma1_check(pmf, &hs[i], &hs[j], inst.f())?;
                    self.lemma_max = self.lemma_max.max(c.residual);
                    if c.residual > INEQUALITY_TOLERANCE {
                        self.lemma += 1;
                        bad_lemma = true;
                    }
                }
                if witness.is_none() && (v.is_violation() || bad_chain || bad_cor2 || bad_lemma) {
                    witness = Some((i, j));
                }
            }
        }
        if let Some(pair) = witness {
            self.counterexamples.push(Counterexample {
                instance_index: index,
                instance_seed: seed,
                pair,
                instance: inst,
            });
            self.trim_counterexamples();
        }
        Ok(())
    }

    fn trim_counterexamples(&mut self) {
        self.counterexamples.sort_by_key(|c| c.instance_index);
        self.counterexamples.truncate(COUNTEREXAMPLE_CAP);
    }

    fn merge(mut self, other: Partial) -> Partial {
        self.pairs += other.pairs;
        self.triggered += other.triggered;
        self.violations += other.violations;
        self.proof_chain += other.proof_chain;
        self.cor1 += other.cor1;
        self.cor2 += other.cor2;
        self.lemma += other.lemma;
        self.lemma_max = self.lemma_max.max(other.lemma_max);
        self.slack_min = self.slack_min.min(other.slack_min);
        self.cor2_min = self.cor2_min.min(other.cor2_min);
        for (a, b) in self.hist.iter_mut().zip(&other.hist) {
            *a += b;
        }
        self.counterexamples.extend(other.counterexamples);
        self.trim_counterexamples();
        self
    }

    fn median(&self) -> f64 {
        if self.pairs == 0 {
            return f64::NAN;
        }
        let target = self.pairs.div_ceil(2);
        let mut seen = 0;
        let width = SLACK_RANGE / SLACK_BINS as f64;
        for (b, &count) in self.hist.iter().enumerate() {
            seen += count;
            if seen >= target {
                return (b as f64 + 0.5) * width;
            }
        }
        SLACK_RANGE
    }
}

fn slack_bin(slack: f64) -> usize {
    let scaled = slack / SLACK_RANGE * SLACK_BINS as f64;
    if scaled <= 0.0 {
        0
    } else {
        (scaled as usize).min(SLACK_BINS - 1)
    }
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(Error::InvalidConfig("workers must be at least 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Generates `num_instances` instances and checks every ordered hypothesis
/// pair of each. The report is identical for any worker count.
pub fn verify_batch(
    cfg: &InstanceGenConfig,
    num_instances: u64,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    cfg.validate()?;
    if num_instances == 0 {
        return Err(Error::InvalidConfig("num_instances must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&opts.trigger_floor) {
        return Err(Error::InvalidConfig(format!(
            "trigger floor must be in [0, 1], got {}",
            opts.trigger_floor
        )));
    }
    let total = with_workers(opts.workers, || {
        (0..num_instances)
            .into_par_iter()
            .try_fold(Partial::new, |mut acc, k| {
                let s = instance_seed(seed, k);
                acc.add_instance(k, s, generate_instance(cfg, s)?)?;
                Ok::<_, Error>(acc)
            })
            .try_reduce(Partial::new, |a, b| Ok(a.merge(b)))
    })??;

    let trigger_fraction = if total.pairs == 0 {
        0.0
    } else {
        total.triggered as f64 / total.pairs as f64
    };
    let slack_median = total.median();
    Ok(VerificationReport {
        seed,
        config: cfg.clone(),
        instances: num_instances,
        pairs_checked: total.pairs,
        condition_triggered: total.triggered,
        trigger_fraction,
        trigger_floor: opts.trigger_floor,
        inconclusive: trigger_fraction < opts.trigger_floor,
        violations: total.violations,
        proof_chain_violations: total.proof_chain,
        corollary1_triggered: total.cor1,
        corollary2_violations: total.cor2,
        lemma_residual_violations: total.lemma,
        lemma_max_residual: total.lemma_max,
        slack_min: total.slack_min,
        slack_median,
        corollary2_slack_min: total.cor2_min,
        counterexamples: total.counterexamples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlipWitness {
    pub instance_index: u64,
    pub instance_seed: u64,
    pub pair: (usize, usize),
    pub verdict: TheoremVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalsifyReport {
    pub seed: u64,
    pub config: InstanceGenConfig,
    pub instances: u64,
    pub pairs_checked: u64,
    pub flip_pairs: u64,
    /// Instances with at least one rank flip.
    pub count: u64,
    pub first_flip: Option<FlipWitness>,
}

/// Counts instances containing a genuine rank flip: a pair that synthetic
/// data ranks one way (`Δε_s ≥ 0`), the real domain ranks strictly the other
/// way, and for which the preservation condition does not hold.
pub fn falsify_converse(cfg: &InstanceGenConfig, num_instances: u64, seed: u64) -> Result<FalsifyReport> {
    cfg.validate()?;
    if num_instances == 0 {
        return Err(Error::InvalidConfig("num_instances must be at least 1".into()));
    }
    let per_instance: Vec<(u64, u64, Option<FlipWitness>)> = (0..num_instances)
        .into_par_iter()
        .map(|k| {
            let s = instance_seed(seed, k);
            let inst = generate_instance(cfg, s)?;
            let n = inst.hypotheses().len();
            let (mut pairs, mut flips, mut first) = (0, 0, None);
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let v = check_pair(&inst, i, j)?;
                    pairs += 1;
                    if v.is_rank_flip() {
                        flips += 1;
                        first.get_or_insert(FlipWitness {
                            instance_index: k,
                            instance_seed: s,
                            pair: (i, j),
                            verdict: v,
                        });
                    }
                }
            }
            Ok((pairs, flips, first))
        })
        .collect::<Result<_>>()?;

    let mut report = FalsifyReport {
        seed,
        config: cfg.clone(),
        instances: num_instances,
        pairs_checked: 0,
        flip_pairs: 0,
        count: 0,
        first_flip: None,
    };
    for (pairs, flips, first) in per_instance {
        report.pairs_checked += pairs;
        report.flip_pairs += flips;
        report.count += (flips > 0) as u64;
        if report.first_flip.is_none() {
            report.first_flip = first;
        }
    }
    Ok(report)
}
