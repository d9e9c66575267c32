use std::collections::HashMap;

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqdb_core::algorithms::{n_prime, random_code_length, run_bv_coin_weighing, GeneratedSearch, RandomCoding};
use sqdb_core::baselines::{
    classical_bisection, classical_huffman_search, classical_parity_readout, classical_random_code,
};
use sqdb_core::codes::{
    build_huffman, collision_probability, collision_probability_approx,
    collision_probability_approx_base, collision_probability_at, truncation_error_probability,
};
use sqdb_core::costmodel::{
    coin_bound, crossover, info_bound, predetermined_limit, runtime, singleton_search_worst_case,
};
use sqdb_core::{Algorithm, DigitString, OracleSpec, SourceDistribution, Transcript};

use crate::report::{Report, TranscriptSummary};
use crate::{CliError, ExperimentConfig, Outcome, MAX_EXHAUSTIVE_COINS};

/// Quantum runs must end in one basis state and leave the answer register
/// as prepared, up to rounding.
const STATE_TOLERANCE: f64 = 1e-9;

/// Largest `n` scanned when looking for a crossover point.
const CROSSOVER_SCAN_LIMIT: u64 = 1 << 16;

const DEFAULT_TRIALS: u64 = 1000;

fn check_quantum(t: &Transcript, label: &str, violations: &mut Vec<String>) {
    if t.oracle_calls != 1 {
        violations.push(format!("{label}: {} oracle calls", t.oracle_calls));
    }
    if t.final_outcome_probability < 1.0 - STATE_TOLERANCE {
        violations.push(format!("{label}: outcome probability {}", t.final_outcome_probability));
    }
    if let Some(f) = t.kickback_fidelity {
        if f < 1.0 - STATE_TOLERANCE {
            violations.push(format!("{label}: answer register fidelity {f}"));
        }
    }
}

/// Rate with its binomial standard error under the predicted probability.
fn compare_rate(report: &mut Report, key: &str, observed: f64, predicted: f64, trials: u64) {
    let p = predicted.clamp(0.0, 1.0);
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let deviation = (observed - predicted).abs();
    report.observe(key, observed);
    report.observe(&format!("{key}_sigma"), sigma);
    report.observe(&format!("{key}_within_3_sigma"), deviation <= 3.0 * sigma + 1e-12);
}

fn cost_row(
    report: &mut Report,
    config: &ExperimentConfig,
    algorithm: Algorithm,
    n: usize,
    m: Option<usize>,
) -> Result<(), CliError> {
    let preset = config.t_preset;
    report.cost_report = Some(runtime(
        algorithm,
        n as u64,
        m.map(|m| m as u64),
        |x| preset.eval(x),
        config.cost_mode,
    )?);
    Ok(())
}

fn random_bits<R: Rng>(rng: &mut R, n: usize) -> DigitString {
    DigitString::new((0..n).map(|_| rng.gen_range(0..2)).collect(), 2).expect("binary digits")
}

pub(crate) fn coin_weigh(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = config.require_n()?;
    let exhaustive = config.exhaustive || config.trials.is_none();
    let databases: Vec<DigitString> = if exhaustive {
        if n > MAX_EXHAUSTIVE_COINS {
            return Err(CliError::Resource(format!(
                "exhaustive sweep is limited to n <= {MAX_EXHAUSTIVE_COINS}; use --trials"
            )));
        }
        (0..1u64 << n)
            .map(|i| DigitString::from_index(i, n, 2))
            .collect::<Result<_, _>>()?
    } else {
        let trials = config.checked_trials(DEFAULT_TRIALS)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.require_seed()?);
        (0..trials).map(|_| random_bits(&mut rng, n)).collect()
    };

    let mut summary = TranscriptSummary::default();
    let mut violations = Vec::new();
    for y in &databases {
        let oracle = OracleSpec::spring_scale(y.clone())?;
        let q = run_bv_coin_weighing(&oracle)?;
        check_quantum(&q, &format!("coin weighing y={y}"), &mut violations);
        if !q.success {
            violations.push(format!("coin weighing y={y}: wrong contents"));
        }
        summary.add_quantum(&q);
        summary.add_classical(&classical_parity_readout(&oracle)?);
    }

    let runs = databases.len() as f64;
    let mut report = Report::new("coin_weighing")
        .param("n", n)
        .param("exhaustive", exhaustive)
        .param("databases", databases.len())
        .param("seed", config.seed);
    report.predict("answer_alphabet", n_prime(n) + 1);
    report.predict("quantum_success_rate", 1.0);
    report.predict("quantum_calls", 1);
    report.predict("classical_calls", n);
    report.predict("coin_bound", coin_bound(n as u64));
    report.predict("predetermined_limit", predetermined_limit(n as u64).ok());
    report.observe("quantum_success_rate", summary.quantum_successes as f64 / runs);
    report.observe("classical_success_rate", summary.classical_successes as f64 / runs);
    report.observe("mean_quantum_calls", summary.quantum_oracle_calls as f64 / runs);
    report.observe("mean_classical_calls", summary.mean_classical_calls());
    report.transcripts_summary = Some(summary);
    cost_row(&mut report, config, Algorithm::CoinWeighing, n, None)?;
    Ok(Outcome { reports: vec![report], violations })
}

pub(crate) fn walsh_search(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = config.require_n()?;
    let search = GeneratedSearch::walsh(n)?;
    let exhaustive = config.exhaustive || config.trials.is_none();
    let items: Vec<usize> = if exhaustive {
        (0..n).collect()
    } else {
        let trials = config.checked_trials(DEFAULT_TRIALS)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.require_seed()?);
        (0..trials).map(|_| rng.gen_range(0..n)).collect()
    };

    let mut summary = TranscriptSummary::default();
    let mut violations = Vec::new();
    let log_n = n.trailing_zeros() as u64;
    for &i in &items {
        let oracle = OracleSpec::parity(DigitString::unit(n, i, 2)?)?;
        let q = search.run(&oracle)?;
        check_quantum(&q, &format!("Walsh search item {i}"), &mut violations);
        if !q.success {
            violations.push(format!("Walsh search item {i}: not found"));
        }
        let c = classical_bisection(&oracle, n)?;
        if c.oracle_calls != log_n || !c.success {
            violations.push(format!("bisection item {i}: {} calls", c.oracle_calls));
        }
        summary.add_quantum(&q);
        summary.add_classical(&c);
    }

    let runs = items.len() as f64;
    let mut report = Report::new("walsh_search")
        .param("n", n)
        .param("exhaustive", exhaustive)
        .param("databases", items.len())
        .param("seed", config.seed);
    report.predict("quantum_success_rate", 1.0);
    report.predict("quantum_calls", 1);
    report.predict("classical_calls", log_n);
    report.predict("info_bound", info_bound((n as f64).log2(), 2));
    report.predict("singleton_worst_case", singleton_search_worst_case(n as u64));
    report.observe("quantum_success_rate", summary.quantum_successes as f64 / runs);
    report.observe("mean_quantum_calls", summary.quantum_oracle_calls as f64 / runs);
    report.observe("mean_classical_calls", summary.mean_classical_calls());
    report.transcripts_summary = Some(summary);
    cost_row(&mut report, config, Algorithm::WalshSearch, n, None)?;
    Ok(Outcome { reports: vec![report], violations })
}

pub(crate) fn huffman_search(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let source = match (&config.dist, config.n) {
        (Some(p), n) => {
            if n.is_some_and(|n| n != p.len()) {
                return Err(CliError::Usage("--n disagrees with the length of --dist".into()));
            }
            SourceDistribution::new(p.clone())?
        }
        (None, Some(n)) => SourceDistribution::uniform(n)?,
        (None, None) => return Err(CliError::Usage("--dist or --n is required".into())),
    };
    let n = source.len();
    let code = build_huffman(&source)?;
    let probabilities = source.probabilities().to_vec();
    let lengths: Vec<usize> = match config.m {
        Some(m) => vec![m],
        None => (1..=code.max_length().min(n)).collect(),
    };
    let exhaustive = config.exhaustive || config.trials.is_none();
    let sampled: Option<Vec<usize>> = if exhaustive {
        None
    } else {
        let trials = config.checked_trials(DEFAULT_TRIALS)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.require_seed()?);
        let weights = WeightedIndex::new(&probabilities)
            .map_err(|e| CliError::Usage(format!("--dist: {e}")))?;
        Some((0..trials).map(|_| weights.sample(&mut rng)).collect())
    };

    let oracles = (0..n)
        .map(|i| Ok(OracleSpec::parity(DigitString::unit(n, i, 2)?)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let classical = oracles
        .iter()
        .map(|o| classical_huffman_search(o, &code))
        .collect::<Result<Vec<_>, _>>()?;

    let mut reports = Vec::new();
    let mut violations = Vec::new();
    for &m in &lengths {
        let mut report = Report::new("huffman_search")
            .param("n", n)
            .param("m", m)
            .param("exhaustive", exhaustive)
            .param("seed", config.seed)
            .param("trials", sampled.as_ref().map(Vec::len));
        let predicted_failure = truncation_error_probability(&code, m)?;
        report.predict("entropy", source.entropy());
        report.predict("average_length", code.average_length());
        report.predict("info_bound", info_bound(source.entropy(), 2));
        report.predict("max_codeword_length", code.max_length());
        report.predict("failure_probability", predicted_failure);
        report.predict("quantum_calls", 1);

        let search = match GeneratedSearch::huffman(&code, m) {
            Ok(s) => s,
            Err(e @ sqdb_core::Error::Precondition(_)) if config.m.is_none() => {
                report.observe("skipped", e.to_string());
                reports.push(report);
                continue;
            }
            Err(e) => return Err(e.into()),
        };

        // Runs are deterministic, so each item is simulated once and the
        // transcript reused for every trial that marks it.
        let mut quantum: HashMap<usize, Transcript> = HashMap::new();
        let mut run = |i: usize| -> Result<Transcript, CliError> {
            if let Some(t) = quantum.get(&i) {
                return Ok(t.clone());
            }
            let t = search.run(&oracles[i])?;
            quantum.insert(i, t.clone());
            Ok(t)
        };
        let mut summary = TranscriptSummary::default();
        let (failure, classical_mean, classical_sq, weight_total) = match &sampled {
            None => {
                let mut failure = 0.0;
                let mut mean = 0.0;
                for i in 0..n {
                    let t = run(i)?;
                    check_quantum(&t, &format!("Huffman m={m} item {i}"), &mut violations);
                    summary.add_quantum(&t);
                    summary.add_classical(&classical[i]);
                    if !t.success {
                        failure += probabilities[i];
                    }
                    mean += probabilities[i] * classical[i].oracle_calls as f64;
                }
                (failure, mean, 0.0, 1.0)
            }
            Some(items) => {
                let mut failures = 0u64;
                let (mut sum, mut sq) = (0.0, 0.0);
                for &i in items {
                    let t = run(i)?;
                    check_quantum(&t, &format!("Huffman m={m} item {i}"), &mut violations);
                    summary.add_quantum(&t);
                    summary.add_classical(&classical[i]);
                    failures += !t.success as u64;
                    let calls = classical[i].oracle_calls as f64;
                    sum += calls;
                    sq += calls * calls;
                }
                let trials = items.len() as f64;
                (failures as f64 / trials, sum / trials, sq / trials, trials)
            }
        };
        report.params.insert("distinct_simulations".into(), quantum.len().into());
        match &sampled {
            None => {
                report.observe("failure_rate", failure);
                report.observe("classical_mean_calls", classical_mean);
                if (failure - predicted_failure).abs() > 1e-9 {
                    violations.push(format!(
                        "Huffman m={m}: failure {failure} differs from {predicted_failure}"
                    ));
                }
            }
            Some(items) => {
                compare_rate(&mut report, "failure_rate", failure, predicted_failure, items.len() as u64);
                let variance = (classical_sq - classical_mean * classical_mean).max(0.0);
                let sigma = (variance / weight_total).sqrt();
                report.observe("classical_mean_calls", classical_mean);
                report.observe("classical_mean_calls_sigma", sigma);
                report.observe(
                    "classical_mean_calls_within_3_sigma",
                    (classical_mean - code.average_length()).abs() <= 3.0 * sigma + 1e-12,
                );
            }
        }
        report.transcripts_summary = Some(summary);
        cost_row(&mut report, config, Algorithm::HuffmanSearch, n, Some(m))?;
        reports.push(report);
    }
    Ok(Outcome { reports, violations })
}

pub(crate) fn random_code(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = config.require_n()?;
    let a = config.modulus.unwrap_or(2);
    let k = config.k.ok_or_else(|| CliError::Usage("--k is required".into()))?;
    if k == 0 {
        return Err(CliError::Usage("--k must be positive".into()));
    }
    let l = config.l.unwrap_or(0);
    let trials = config.checked_trials(DEFAULT_TRIALS)?;
    let seed = config.require_seed()?;
    if !sqdb_core::algebra::is_prime(a) {
        return Err(CliError::Usage(format!("--A must be prime, got {a}")));
    }
    let m = random_code_length(a, k, l);
    if m > n {
        return Err(CliError::Usage(format!("code length m = {m} exceeds n = {n}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = TranscriptSummary::default();
    let mut violations = Vec::new();
    let mut failures = 0u64;
    for trial in 0..trials {
        // Candidates are drawn independently, so repeats are possible.
        let candidates: Vec<DigitString> = (0..k)
            .map(|_| DigitString::new((0..n).map(|_| rng.gen_range(0..a)).collect(), a))
            .collect::<Result<_, _>>()?;
        let y = candidates[rng.gen_range(0..k)].clone();
        let coding = RandomCoding::new(candidates, l, rng.gen())?;
        let oracle = OracleSpec::za_dot(y)?;
        let q = coding.run(&oracle)?;
        let c = classical_random_code(&oracle, coding.generators(), coding.candidates())?;
        check_quantum(&q, &format!("random coding trial {trial}"), &mut violations);
        let collides = coding.collides(&oracle)?;
        if q.success == collides || c.success != q.success {
            violations.push(format!("random coding trial {trial}: decoding disagrees with the code"));
        }
        failures += !q.success as u64;
        summary.add_quantum(&q);
        summary.add_classical(&c);
    }

    let predicted = collision_probability(a, m as u32, k as u64);
    let real_m = (k as f64).ln() / (a as f64).ln() + l as f64;
    let mut report = Report::new("random_coding")
        .param("A", a)
        .param("n", n)
        .param("k", k)
        .param("l", l)
        .param("m", m)
        .param("trials", trials)
        .param("seed", seed);
    report.predict("collision_probability", predicted);
    report.predict("collision_probability_at_log_k_plus_l", collision_probability_at(a, real_m, k as u64));
    report.predict("collision_probability_approx", collision_probability_approx_base(a, k as u64, l));
    report.predict("collision_probability_approx_binary", collision_probability_approx(k as u64, l));
    report.predict("quantum_calls", 1);
    report.predict("classical_calls", m);
    compare_rate(&mut report, "failure_rate", failures as f64 / trials as f64, predicted, trials);
    report.observe("mean_classical_calls", summary.mean_classical_calls());
    report.transcripts_summary = Some(summary);
    cost_row(&mut report, config, Algorithm::RandomCoding, n, Some(m))?;
    Ok(Outcome { reports: vec![report], violations })
}

pub(crate) fn bounds(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = config.require_n()?;
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let n64 = n as u64;
    let mut report = Report::new("bounds").param("n", n);
    report.predict("coin_bound", coin_bound(n64));
    report.predict("predetermined_limit", predetermined_limit(n64).ok());
    report.predict(
        "predetermined_to_coin_ratio",
        predetermined_limit(n64).ok().map(|p| p / coin_bound(n64)),
    );
    report.predict("spring_scale_alphabet", n_prime(n) + 1);
    report.predict("search_info_bound", info_bound((n as f64).log2(), 2));
    report.predict("singleton_worst_case", singleton_search_worst_case(n64));
    if let Some(p) = &config.dist {
        let source = SourceDistribution::new(p.clone())?;
        let a = config.modulus.unwrap_or(2);
        report.params.insert("A".into(), a.into());
        report.predict("entropy", source.entropy());
        report.predict("info_bound", info_bound(source.entropy(), a));
    }
    Ok(Outcome { reports: vec![report], violations: Vec::new() })
}

pub(crate) fn cost(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = config.require_n()?;
    let preset = config.t_preset;
    let circuit = move |x: f64| preset.eval(x);
    let mut algorithms = vec![Algorithm::CoinWeighing];
    if n >= 2 && n.is_power_of_two() {
        algorithms.push(Algorithm::WalshSearch);
    }
    if config.m.is_some() {
        algorithms.extend([Algorithm::HuffmanSearch, Algorithm::RandomCoding]);
    }
    let m = config.m.map(|m| m as u64);
    let mut reports = Vec::new();
    for algorithm in algorithms {
        let m = m.filter(|_| matches!(algorithm, Algorithm::HuffmanSearch | Algorithm::RandomCoding));
        let r = runtime(algorithm, n as u64, m, circuit, config.cost_mode)?;
        let mut report = Report::new(algorithm.name())
            .param("n", n)
            .param("m", m)
            .param("t_preset", serde_json::to_value(preset).unwrap_or_default())
            .param("cost_mode", serde_json::to_value(config.cost_mode).unwrap_or_default());
        report.predict("quantum_time", r.quantum_time);
        report.predict("classical_time", r.classical_time);
        report.predict("quantum_faster", r.quantum_time < r.classical_time);
        report.predict(
            "crossover_n",
            crossover(algorithm, m, circuit, config.cost_mode, CROSSOVER_SCAN_LIMIT)?,
        );
        report.cost_report = Some(r);
        reports.push(report);
    }
    Ok(Outcome { reports, violations: Vec::new() })
}
