//! End-to-end acceptance checks. Each test prints one PASS/FAIL line to
//! stderr (bypassing the test harness's capture) before asserting.

use std::io::Write as _;
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng as _;

use rankguard::divergence::{estimate_l1, exact_l1, EstimatorConfig, FeatureSampleSet, Source};
use rankguard::domain::{lemma1_check, Pmf};
use rankguard::io_formats::{
    read_instance_json, read_samples_csv, read_traces_csv, read_traces_json, write_instance_json,
    write_samples_csv, write_traces_csv, write_traces_json,
};
use rankguard::rank_analysis::{falsify_converse, spearman, verify_batch, VerificationReport, VerifyOptions};
use rankguard::seed::{derive_seed, rng_from_seed};
use rankguard::selection::{
    compare_protocols, es_rss_summary, paired_errors, select_hps_synthetic, At, Split, StandardScoring, TrainedOn,
};
use rankguard::trace_sim::{generate_instance, generate_traces, instance_seed, InstanceGenConfig, TraceGenConfig};

fn verdict(name: &str, pass: bool, detail: String) {
    let line = format!("{} {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(pass, "{line}");
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[test]
fn lemma_identity_over_random_instances() {
    let start = Instant::now();
    let cfg = InstanceGenConfig::default();
    let (mut pairs, mut worst) = (0u64, 0.0f64);
    for k in 0..100_000 {
        let inst = generate_instance(&cfg, instance_seed(1, k)).unwrap();
        let hs = inst.hypotheses();
        for i in 0..hs.len() {
            for j in 0..hs.len() {
                if i == j {
                    continue;
                }
                for pmf in [inst.mu_r(), inst.mu_s()] {
                    worst = worst.max(lemma1_check(pmf, &hs[i], &hs[j], inst.f()).unwrap().residual);
                }
                pairs += 1;
            }
        }
    }
    verdict(
        "lemma identity",
        worst <= 1e-12,
        format!(
            "100000 instances, {pairs} pairs, max residual {worst:e}, single thread {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    );
}

/// One million instances, shared by the theorem and corollary checks.
fn million_run() -> &'static (VerificationReport, f64) {
    static RUN: OnceLock<(VerificationReport, f64)> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let report = verify_batch(&InstanceGenConfig::default(), 1_000_000, 0, &VerifyOptions::default()).unwrap();
        (report, start.elapsed().as_secs_f64())
    })
}

#[test]
fn theorem_holds_on_a_million_instances() {
    let (r, secs) = million_run();
    let pass = r.violations == 0
        && !r.inconclusive
        && r.trigger_fraction >= 0.01
        && r.proof_chain_violations == 0
        && r.slack_min >= -1e-12;
    verdict(
        "rank preservation theorem",
        pass,
        format!(
            "{} pairs, violations {}, triggered {:.2}%, min slack {:e}, {secs:.0}s",
            r.pairs_checked,
            r.violations,
            100.0 * r.trigger_fraction,
            r.slack_min
        ),
    );
}

#[test]
fn full_divergence_bounds_risk_gap_shift() {
    let (r, _) = million_run();
    verdict(
        "full-divergence corollary",
        r.corollary2_violations == 0 && r.corollary2_slack_min >= -1e-12,
        format!(
            "{} pairs, violations {}, min slack {:e}",
            r.pairs_checked, r.corollary2_violations, r.corollary2_slack_min
        ),
    );
}

#[test]
fn rank_flips_appear_without_the_condition() {
    let r = falsify_converse(&InstanceGenConfig::adversarial(), 10_000, 0).unwrap();
    let witness = r.first_flip.map(|w| {
        assert!(!w.verdict.condition_held && w.verdict.delta_real < 0.0);
        format!(", first at instance {} pair {:?}", w.instance_index, w.pair)
    });
    verdict(
        "converse falsification",
        r.count >= 1,
        format!(
            "{} of 10000 adversarial instances contain a flip{}",
            r.count,
            witness.unwrap_or_default()
        ),
    );
}

fn bin_samples(pmf: &[f64], n: usize, seed: u64, source: Source) -> FeatureSampleSet {
    let mut rng = rng_from_seed(seed);
    let cdf: Vec<f64> = pmf
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let points = (0..n)
        .map(|_| {
            let u = rng.random::<f64>() * cdf[cdf.len() - 1];
            let bin = cdf.partition_point(|&c| c <= u).min(pmf.len() - 1);
            vec![10.0 * bin as f64 + rng.random::<f64>()]
        })
        .collect();
    FeatureSampleSet::new(points, source).unwrap()
}

#[test]
fn estimator_recovers_binned_divergences() {
    let uniform = vec![0.125; 8];
    let cases = [
        (uniform.clone(), uniform.clone()),
        (uniform.clone(), vec![0.2, 0.2, 0.2, 0.2, 0.05, 0.05, 0.05, 0.05]),
        (vec![0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 0.0, 0.25, 0.25, 0.25, 0.25]),
    ];
    let cfg = EstimatorConfig { clusters: 8, restarts: 5, ..Default::default() };
    let mut pass = true;
    let mut details = Vec::new();
    for (k, (p, q)) in cases.iter().enumerate() {
        let exact = exact_l1(&Pmf::new(p.clone()).unwrap(), &Pmf::new(q.clone()).unwrap()).unwrap();
        let real = bin_samples(p, 100_000, derive_seed(42, &[k as u64, 0]), Source::Real);
        let synth = bin_samples(q, 100_000, derive_seed(42, &[k as u64, 1]), Source::Synthetic);
        let est = estimate_l1(&real, &synth, &cfg, 42).unwrap();
        pass &= (est - exact).abs() <= 0.02;
        details.push(format!("exact {exact:.1} est {est:.4}"));
    }
    verdict("divergence estimator", pass, details.join("; "));
}

#[test]
fn spearman_matches_the_rank_difference_formula() {
    let mut rng = rng_from_seed(6);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(3..60usize);
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.shuffle(&mut rng);
        let xs: Vec<f64> = (1..=n).map(|v| v as f64).collect();
        let ys: Vec<f64> = perm.iter().map(|&v| v as f64).collect();
        let d2: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - b) * (a - b)).sum();
        let nf = n as f64;
        let formula = 1.0 - 6.0 * d2 / (nf * (nf * nf - 1.0));
        worst = worst.max((spearman(&xs, &ys).unwrap() - formula).abs());
    }
    let xs = [0.3, 0.9, 0.1, 0.5, 0.7];
    let reversed: Vec<f64> = xs.iter().map(|x| 1.0 - x).collect();
    let identity = spearman(&xs, &xs).unwrap();
    let reversal = spearman(&xs, &reversed).unwrap();
    let hand = spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap();
    // Ranks (1, 2.5, 2.5, 4) against (1, 3, 2, 4): 4.5 / √(4.5 · 5).
    let tied = spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
    let tied_expected = 4.5 / (4.5f64 * 5.0).sqrt();
    let pass = worst <= 1e-12
        && identity == 1.0
        && reversal == -1.0
        && (hand + 0.5).abs() <= 1e-12
        && (tied - tied_expected).abs() <= 1e-12;
    verdict(
        "spearman",
        pass,
        format!(
            "1000 permutations max |Δ| {worst:e}; identity {identity}, reversal {reversal}, hand case {hand}, tied {tied:.6}"
        ),
    );
}

#[test]
fn noiseless_synthetic_oracle_selects_the_test_minimizer() {
    let mut failures = Vec::new();
    for seed in 0..20 {
        let cfg = TraceGenConfig { rho: 1.0, epoch_noise: 0.0, synth_noise: 0.0, seed, ..Default::default() };
        let traces = generate_traces(&cfg).unwrap();
        let best_test = traces
            .records()
            .iter()
            .filter(|r| r.trained_on == TrainedOn::Full && r.split == Split::Test)
            .map(|r| r.error)
            .fold(f64::INFINITY, f64::min);
        let chosen = select_hps_synthetic(&traces).unwrap();
        if chosen.report_errors[&Split::Test] != best_test {
            failures.push(format!("seed {seed}: picked {} vs {best_test}", chosen.report_errors[&Split::Test]));
        }
        let summary = es_rss_summary(&traces).unwrap();
        for a in summary.per_arch.iter().filter(|a| a.rss > a.baseline) {
            failures.push(format!("seed {seed}: arch {} RSS {} above baseline {}", a.arch_id, a.rss, a.baseline));
        }
    }
    verdict(
        "selection oracle dominance",
        failures.is_empty(),
        if failures.is_empty() {
            "20 seeds, synthetic pick equals test minimizer and RSS <= baseline for every arch".into()
        } else {
            failures.join("; ")
        },
    );
}

struct Repeat {
    protocol_order: bool,
    rss_beats_baseline: bool,
}

fn hundred_repeats() -> &'static (Vec<Repeat>, f64) {
    static RUN: OnceLock<(Vec<Repeat>, f64)> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let repeats = (0..100)
            .map(|seed| {
                let traces = generate_traces(&TraceGenConfig { seed, ..Default::default() }).unwrap();
                let p = compare_protocols(&traces, StandardScoring::Mean).unwrap();
                let s = es_rss_summary(&traces).unwrap();
                Repeat {
                    protocol_order: p.synthetic_test_error <= p.standard_test_error
                        && p.standard_test_error <= p.random_mean,
                    rss_beats_baseline: s.rss < s.baseline,
                }
            })
            .collect();
        (repeats, start.elapsed().as_secs_f64())
    })
}

#[test]
fn synthetic_protocol_beats_standard_and_random() {
    let (repeats, secs) = hundred_repeats();
    let hits = repeats.iter().filter(|r| r.protocol_order).count();
    verdict(
        "protocol ordering",
        hits >= 80,
        format!("synthetic <= standard <= average in {hits}/100 repeats of 64x10 traces ({secs:.0}s)"),
    );
}

#[test]
fn seed_selection_helps_and_early_stopping_barely_matters() {
    let (repeats, _) = hundred_repeats();
    let hits = repeats.iter().filter(|r| r.rss_beats_baseline).count();
    let gaps: Vec<f64> = (0..100)
        .map(|seed| {
            let cfg = TraceGenConfig { epoch_noise: 0.0, seed, ..Default::default() };
            let s = es_rss_summary(&generate_traces(&cfg).unwrap()).unwrap();
            (s.es - s.baseline).abs()
        })
        .collect();
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    verdict(
        "seed selection and early stopping",
        hits >= 90 && mean_gap <= 0.002,
        format!("RSS < baseline in {hits}/100; mean |ES - baseline| {mean_gap:.5} without epoch noise"),
    );
}

#[test]
fn rho_controls_measured_rank_correlation() {
    let mut pass = true;
    let mut details = Vec::new();
    for (rho, tol) in [(0.0, 0.15), (0.5, 0.15), (0.97, 0.07)] {
        let values: Vec<f64> = (0..20)
            .map(|seed| {
                let traces = generate_traces(&TraceGenConfig { rho, seed, ..Default::default() }).unwrap();
                let pairs = paired_errors(&traces, Split::Synthetic, Split::Test, At::LastEpoch, false).unwrap();
                assert_eq!(pairs.len(), 640);
                let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
                spearman(&a, &b).unwrap()
            })
            .collect();
        let m = median(values);
        pass &= (m - rho).abs() <= tol;
        details.push(format!("rho {rho}: median {m:.3}"));
    }
    verdict("rank-correlation knob", pass, details.join(", "));
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_rankguard"))
        .args(args)
        .env_remove("RANKGUARD_REPORT_DIGITS")
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn round_trips() -> Vec<String> {
    let mut problems = Vec::new();
    let traces = generate_traces(&TraceGenConfig { num_archs: 4, runs_per_arch: 3, epochs: 7, seed: 3, ..Default::default() })
        .unwrap();
    let mut csv = Vec::new();
    write_traces_csv(&traces, &mut csv).unwrap();
    let back = read_traces_csv(csv.as_slice(), "t.csv").unwrap();
    let mut csv2 = Vec::new();
    write_traces_csv(&back, &mut csv2).unwrap();
    if csv != csv2 || back.records() != traces.records() {
        problems.push("trace csv".to_owned());
    }
    let mut json = Vec::new();
    write_traces_json(&traces, &mut json).unwrap();
    if read_traces_json(json.as_slice(), "t.json").unwrap().records() != traces.records() {
        problems.push("trace json".to_owned());
    }
    let inst = generate_instance(&InstanceGenConfig::default(), 77).unwrap();
    let mut ij = Vec::new();
    write_instance_json(&inst, &mut ij).unwrap();
    if read_instance_json(ij.as_slice(), "i.json").unwrap() != inst {
        problems.push("instance json".to_owned());
    }
    let real = FeatureSampleSet::new(vec![vec![0.1, 2.5], vec![1.0 / 3.0, -4.0]], Source::Real).unwrap();
    let synth = FeatureSampleSet::new(vec![vec![7.0, 1e-17]], Source::Synthetic).unwrap();
    let mut sc = Vec::new();
    write_samples_csv(&[&real, &synth], &mut sc).unwrap();
    let rows = read_samples_csv(sc.as_slice(), "s.csv", None).unwrap();
    if rows.real != real.points() || rows.synthetic != synth.points() {
        problems.push("samples csv".to_owned());
    }
    problems
}

#[test]
fn cli_reports_are_reproducible_and_formats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let (traces, inst, samples) = (p("t.csv"), p("i.json"), p("s.csv"));
    let setup = [
        vec!["simulate", "traces", "--archs", "8", "--runs", "4", "--epochs", "15", "--seed", "9", "--out", &traces],
        vec!["simulate", "instance", "--seed", "9", "--out", &inst],
    ];
    for args in &setup {
        assert_eq!(cli(args).0, 0, "{args:?}");
    }
    let mut text = String::from("source,dim0,dim1\n");
    let mut rng = rng_from_seed(9);
    for i in 0..400 {
        let src = if i % 2 == 0 { "real" } else { "synthetic" };
        text.push_str(&format!("{src},{},{}\n", rng.random::<f64>(), rng.random::<f64>() + (i % 2) as f64 * 0.3));
    }
    std::fs::write(&samples, text).unwrap();

    let commands: Vec<Vec<&str>> = vec![
        vec!["verify", "--instances", "3000", "--seed", "4"],
        vec!["falsify", "--instances", "1000", "--seed", "4"],
        vec!["tv", "exact", "--instance", &inst, "--pair", "0", "2"],
        vec!["tv", "estimate", "--samples", &samples, "--clusters", "6", "--seed", "4"],
        vec!["rank", "--traces", &traces, "--at", "best"],
        vec!["select", "hps-syn", "--traces", &traces],
        vec!["select", "hps-std", "--traces", &traces, "--scoring", "random-run", "--seed", "4"],
        vec!["select", "es-rss", "--traces", &traces, "--arch", "a03"],
        vec!["summarize", "es-rss", "--traces", &traces],
        vec!["summarize", "protocols", "--traces", &traces, "--seed", "4"],
    ];
    let mut mismatches = Vec::new();
    for args in &commands {
        let out = p("report.json");
        let run = || {
            let mut full = args.clone();
            full.extend(["--out", out.as_str()]);
            let (code, stdout) = cli(&full);
            (code, stdout, std::fs::read(&out).unwrap_or_default())
        };
        let (first, second) = (run(), run());
        if first.0 != 0 || first != second || first.2.is_empty() {
            mismatches.push(args[..2].join(" "));
        }
    }
    let again = p("t2.csv");
    cli(&["simulate", "traces", "--archs", "8", "--runs", "4", "--epochs", "15", "--seed", "9", "--out", &again]);
    if std::fs::read(&traces).unwrap() != std::fs::read(&again).unwrap() {
        mismatches.push("simulate traces".to_owned());
    }
    let problems = round_trips();
    verdict(
        "determinism and round trips",
        mismatches.is_empty() && problems.is_empty(),
        format!(
            "{} commands rerun byte-identically{}; round-trip failures: {}",
            commands.len() + 1 - mismatches.len(),
            if mismatches.is_empty() { String::new() } else { format!(" (differing: {})", mismatches.join(", ")) },
            if problems.is_empty() { "none".to_owned() } else { problems.join(", ") }
        ),
    );
}
