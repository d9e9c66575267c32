//! Information-theoretic query bounds and the running-time model.
//!
//! Times are in units of elementary gate steps plus the cost `T(n)` of one
//! pass through the database circuit, which the caller supplies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    CoinWeighing,
    WalshSearch,
    HuffmanSearch,
    RandomCoding,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::CoinWeighing => "coin_weighing",
            Algorithm::WalshSearch => "walsh_search",
            Algorithm::HuffmanSearch => "huffman_search",
            Algorithm::RandomCoding => "random_coding",
        }
    }
}

/// How multi-bit XOR gates are scheduled in the quantum query preparation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    /// Multi-bit XORs one after another.
    SerialXor,
    /// Multi-bit XORs in a single step, as on an ion-trap bus.
    ParallelXor,
}

/// Built-in database circuit times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimePreset {
    /// `c·log2 n`, a direct parallel implementation of `x·y`.
    Log { scale: f64 },
    Linear,
    Quadratic,
}

impl TimePreset {
    pub fn eval(self, n: f64) -> f64 {
        match self {
            TimePreset::Log { scale } => scale * n.log2(),
            TimePreset::Linear => n,
            TimePreset::Quadratic => n * n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub algorithm: Algorithm,
    pub n: u64,
    pub m: Option<u64>,
    pub mode: CostMode,
    pub circuit_time: f64,
    pub quantum_time: f64,
    pub classical_time: f64,
    /// Time to prepare the superposed queries, where the model states it.
    pub preparation_time: Option<f64>,
    /// Information-theoretic lower bound on classical queries, where it
    /// follows from `n` alone.
    pub bound_queries: Option<f64>,
    /// Set when the parallel-XOR saving is carried over to a circuit it was
    /// only stated for by analogy.
    pub extrapolated: bool,
}

/// `M ≥ H / log2 A`.
pub fn info_bound(entropy_bits: f64, answers: u32) -> f64 {
    entropy_bits / (answers as f64).log2()
}

/// Coin weighing with a spring scale: `n / log2(n+1)`.
pub fn coin_bound(n: u64) -> f64 {
    n as f64 / ((n + 1) as f64).log2()
}

/// Asymptotic query count of the best predetermined classical weighing
/// scheme, `2n / log2 n`.
pub fn predetermined_limit(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("predetermined limit needs n >= 2, got {n}")));
    }
    Ok(2.0 * n as f64 / (n as f64).log2())
}

/// Worst case of classical search with singleton queries.
pub fn singleton_search_worst_case(n: u64) -> u64 {
    n.saturating_sub(1)
}

/// Fills in the running times of one algorithm at size `n`.
///
/// `m` is the number of queries for the Huffman and random-coding schemes.
pub fn runtime(
    algorithm: Algorithm,
    n: u64,
    m: Option<u64>,
    circuit_time: impl Fn(f64) -> f64,
    mode: CostMode,
) -> Result<CostReport> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let nf = n as f64;
    let t = circuit_time(nf);
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("circuit time T({n}) = {t} is negative")));
    }
    let parallel = mode == CostMode::ParallelXor;
    let mut report = CostReport {
        algorithm,
        n,
        m,
        mode,
        circuit_time: t,
        quantum_time: 0.0,
        classical_time: 0.0,
        preparation_time: None,
        bound_queries: None,
        extrapolated: false,
    };
    match algorithm {
        Algorithm::CoinWeighing => {
            // Hadamards on every bit run in parallel in both modes.
            report.quantum_time = 2.0 + t;
            report.classical_time = nf * t / (nf + 1.0).log2();
            report.bound_queries = Some(coin_bound(n));
        }
        Algorithm::WalshSearch => {
            if !n.is_power_of_two() || n < 2 {
                return Err(Error::Domain(format!("Walsh search needs n = 2^p, got {n}")));
            }
            let log_n = nf.log2();
            let prep = if parallel { 1.0 + log_n / 2.0 } else { 1.0 + nf / 2.0 * log_n };
            report.preparation_time = Some(prep);
            report.quantum_time = if parallel { 2.0 + log_n + t } else { 2.0 + nf * log_n + t };
            report.classical_time = log_n / 2.0 + t * log_n;
            report.bound_queries = Some(info_bound(log_n, 2));
        }
        Algorithm::HuffmanSearch | Algorithm::RandomCoding => {
            let m = m.ok_or_else(|| {
                Error::Parameter(format!("{} needs the query count m", algorithm.name()))
            })? as f64;
            report.quantum_time = if parallel { 2.0 + m + t } else { 2.0 + m * nf + t };
            report.classical_time = m / 2.0 + m * t;
            report.extrapolated = parallel;
        }
    }
    Ok(report)
}

/// Smallest `n ≤ n_max` from which the quantum time stays strictly below
/// the classical time through `n_max`.
pub fn crossover(
    algorithm: Algorithm,
    m: Option<u64>,
    circuit_time: impl Fn(f64) -> f64 + Copy,
    mode: CostMode,
    n_max: u64,
) -> Result<Option<u64>> {
    let mut start = None;
    let sizes: Box<dyn Iterator<Item = u64>> = match algorithm {
        Algorithm::WalshSearch => Box::new((1..64).map(|p| 1u64 << p).take_while(move |&n| n <= n_max)),
        _ => Box::new(1..=n_max),
    };
    for n in sizes {
        let r = runtime(algorithm, n, m, circuit_time, mode)?;
        if r.quantum_time < r.classical_time {
            start.get_or_insert(n);
        } else {
            start = None;
        }
    }
    Ok(start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert_eq!(info_bound(0.0, 2), 0.0);
        assert!((info_bound(10.0, 2) - 10.0).abs() < 1e-12);
        assert!((info_bound(3.0, 4) - 1.5).abs() < 1e-12);
        assert!((coin_bound(1) - 1.0).abs() < 1e-12);
        assert!((coin_bound(3) - 1.5).abs() < 1e-12);
        assert!((coin_bound(15) - 3.75).abs() < 1e-12);
        assert!((predetermined_limit(4).unwrap() - 4.0).abs() < 1e-12);
        assert!((predetermined_limit(16).unwrap() - 8.0).abs() < 1e-12);
        assert!(predetermined_limit(1).is_err());
        let n = 1u64 << 20;
        let ratio = predetermined_limit(n).unwrap() / coin_bound(n);
        assert!((ratio - 2.0).abs() / 2.0 < 0.1);
    }

    #[test]
    fn runtime_examples() {
        let t = 7.5;
        for n in [3u64, 8, 100] {
            let r = runtime(Algorithm::CoinWeighing, n, None, |_| t, CostMode::SerialXor).unwrap();
            assert_eq!(r.quantum_time, 2.0 + t);
            assert!((r.classical_time - n as f64 * t / ((n + 1) as f64).log2()).abs() < 1e-12);
        }
        let serial = runtime(Algorithm::WalshSearch, 8, None, |_| 0.0, CostMode::SerialXor).unwrap();
        assert_eq!(serial.quantum_time, 26.0);
        assert_eq!(serial.classical_time, 1.5);
        assert_eq!(serial.preparation_time, Some(13.0));
        let parallel =
            runtime(Algorithm::WalshSearch, 8, None, |_| 0.0, CostMode::ParallelXor).unwrap();
        assert_eq!(parallel.quantum_time, 5.0);

        let h = runtime(Algorithm::HuffmanSearch, 64, Some(3), |_| 10.0, CostMode::SerialXor).unwrap();
        assert_eq!(h.quantum_time, 2.0 + 192.0 + 10.0);
        assert_eq!(h.classical_time, 1.5 + 30.0);
        assert!(!h.extrapolated);
        let hp = runtime(Algorithm::RandomCoding, 64, Some(3), |_| 10.0, CostMode::ParallelXor).unwrap();
        assert_eq!(hp.quantum_time, 15.0);
        assert!(hp.extrapolated);

        assert!(matches!(
            runtime(Algorithm::RandomCoding, 64, None, |_| 1.0, CostMode::SerialXor),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn coin_weighing_crossover_for_quadratic_circuits() {
        let c = crossover(Algorithm::CoinWeighing, None, |n| n * n, CostMode::SerialXor, 4096)
            .unwrap();
        // n=2: 6 vs 8/log2(3) ≈ 5.05; n=3: 11 vs 13.5.
        assert_eq!(c, Some(3));
        assert_eq!(
            crossover(Algorithm::CoinWeighing, None, |_| 0.0, CostMode::SerialXor, 100).unwrap(),
            None
        );
    }
}
