//! The single-query algorithms: prepare, query once, transform, measure,
//! decode.
//!
//! Every algorithm runs the same circuit shape. The query register holds a
//! uniform superposition, the answer register holds the eigenstate
//! `Σ_b ω^b |b⟩` of modular increment, so the one query writes
//! `ω^{-a(x, y)}` into the query register's phases and leaves the answer
//! register alone. A Fourier transform then turns those phases into a
//! basis state.
//!
//! For Walsh search, Huffman search and random coding the query register
//! holds an index string `s` and the query string `c(s) = Σ s_i g_i` is
//! generated from it on the fly; for coin weighing the register holds `x`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{walsh_generators, DigitString, GeneratorSet};
use crate::codes::{
    build_huffman, ceil_log, codeword_table, encode, huffman_queries, HuffmanCode,
    SourceDistribution,
};
use crate::error::{Error, Result};
use crate::oracle::{apply_quantum_query, AnswerKind, OracleSpec, QueryBinding, QueryCounter, QueryMap};
use crate::quantum::{
    fidelity_with_pure, fourier_all, hadamard_all, measure_register, phase_eigenstate,
    root_of_unity, QuantumState, RegisterLayout,
};

pub use crate::oracle::n_prime;

pub const QUERY_REGISTER: &str = "x";
pub const ANSWER_REGISTER: &str = "b";

/// Largest database the coin-weighing simulation accepts.
pub const MAX_COIN_WEIGHING_BITS: usize = 20;

/// Largest index register (`A^m`) the generated-query simulations accept.
pub const MAX_INDEX_DIMENSION: u64 = 1 << 20;

/// Kickback fidelity within this of 1 counts as an unentangled answer
/// register.
const PRODUCT_TOLERANCE: f64 = 1e-12;

/// What a run recovered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Recovered {
    /// The whole database string.
    Contents(DigitString),
    /// Zero-based index of the marked item (or of the matching candidate).
    Item(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    pub algorithm: &'static str,
    /// `None` when the measured codeword matched no candidate or several.
    pub recovered: Option<Recovered>,
    pub ambiguous: bool,
    pub oracle_calls: u64,
    pub success: bool,
    pub final_outcome_probability: f64,
    /// Fidelity of the answer register after the query with its prepared
    /// state. Absent for classical runs.
    pub kickback_fidelity: Option<f64>,
}

/// Result of measuring the query register after the final transform.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// Measured register value as a digit string (`x` for coin weighing,
    /// the codeword `z` otherwise).
    pub outcome: DigitString,
    pub probability: f64,
    pub kickback_fidelity: f64,
}

/// The prepare, query, transform, measure circuit shared by all algorithms.
#[derive(Debug, Clone)]
pub struct SingleQueryCircuit {
    binding: QueryBinding,
    modulus: u32,
    digits: usize,
    prepared: QuantumState,
    answer_state: QuantumState,
}

impl SingleQueryCircuit {
    /// Query register holds `x ∈ {0,1}^n` directly.
    pub fn coin_weighing(n: usize, answer_alphabet: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("empty database".into()));
        }
        if n > MAX_COIN_WEIGHING_BITS {
            return Err(Error::Resource(format!(
                "coin weighing is simulated for n <= {MAX_COIN_WEIGHING_BITS}, got {n}"
            )));
        }
        let binding = QueryBinding {
            query_register: QUERY_REGISTER.into(),
            answer_register: ANSWER_REGISTER.into(),
            map: QueryMap::Direct { len: n, modulus: 2 },
        };
        Self::build(binding, 2, n, 1usize << n, answer_alphabet, Complex64::new(-1.0, 0.0))
    }

    /// Query register holds `s ∈ Z_A^m`; the query is `c(s)`.
    pub fn generated(gens: GeneratorSet) -> Result<Self> {
        let order = gens
            .group_order()
            .filter(|&o| o <= MAX_INDEX_DIMENSION)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "index register A^m = {}^{} exceeds {MAX_INDEX_DIMENSION}",
                    gens.modulus(),
                    gens.len()
                ))
            })?;
        let (a, m) = (gens.modulus(), gens.len());
        let binding = QueryBinding {
            query_register: QUERY_REGISTER.into(),
            answer_register: ANSWER_REGISTER.into(),
            map: QueryMap::Generated(gens),
        };
        Self::build(binding, a, m, order as usize, a as usize, root_of_unity(a))
    }

    fn build(
        binding: QueryBinding,
        modulus: u32,
        digits: usize,
        query_dim: usize,
        answer_alphabet: usize,
        omega: Complex64,
    ) -> Result<Self> {
        // The Fourier transform of |0⟩.
        let uniform = QuantumState::uniform(RegisterLayout::single(QUERY_REGISTER, query_dim)?);
        let answer_state = phase_eigenstate(ANSWER_REGISTER, answer_alphabet, omega)?;
        let prepared = uniform.tensor(&answer_state)?;
        Ok(Self {
            binding,
            modulus,
            digits,
            prepared,
            answer_state,
        })
    }

    pub fn prepared_state(&self) -> &QuantumState {
        &self.prepared
    }

    pub fn answer_state(&self) -> &QuantumState {
        &self.answer_state
    }

    pub fn binding(&self) -> &QueryBinding {
        &self.binding
    }

    /// The state after the single query.
    pub fn query(&self, oracle: &OracleSpec, counter: &mut QueryCounter) -> Result<QuantumState> {
        apply_quantum_query(&self.prepared, oracle, &self.binding, counter)
    }

    /// Fidelity of the answer register's reduced state with its prepared state.
    pub fn kickback_fidelity(&self, post_query: &QuantumState) -> Result<f64> {
        let rho = post_query.reduced_density_matrix(ANSWER_REGISTER)?;
        fidelity_with_pure(&rho, &self.answer_state)
    }

    /// Transforms the query register back and reads it out. The answer
    /// register is discarded unmeasured.
    pub fn measure(&self, post_query: &QuantumState) -> Result<Measurement> {
        // The query register's state with the prepared answer state
        // projected out; its squared norm is the kickback fidelity.
        let query_part = post_query.contract_last(&self.answer_state)?;
        let kickback_fidelity = query_part.norm_squared();
        // Unless the answer register came back unentangled, the transform
        // has to act on the joint state.
        let state = if (kickback_fidelity - 1.0).abs() <= PRODUCT_TOLERANCE {
            query_part
        } else {
            post_query.clone()
        };
        let transformed = if self.modulus == 2 {
            hadamard_all(&state, QUERY_REGISTER)?
        } else {
            fourier_all(&state, QUERY_REGISTER, self.modulus)?
        };
        let (index, probability) = measure_register(&transformed, QUERY_REGISTER)?;
        Ok(Measurement {
            outcome: DigitString::from_index(index as u64, self.digits, self.modulus)?,
            probability,
            kickback_fidelity,
        })
    }
}

fn quantum_transcript(
    algorithm: &'static str,
    counter: QueryCounter,
    measured: &Measurement,
    recovered: Option<Recovered>,
    ambiguous: bool,
    success: bool,
) -> Transcript {
    Transcript {
        algorithm,
        recovered,
        ambiguous,
        oracle_calls: counter.calls(),
        success,
        final_outcome_probability: measured.probability,
        kickback_fidelity: Some(measured.kickback_fidelity),
    }
}

/// Looks a measured codeword up in a decoding table.
fn decode(table: &HashMap<DigitString, Vec<usize>>, z: &DigitString) -> (Option<usize>, bool) {
    match table.get(z).map(Vec::as_slice) {
        Some([only]) => (Some(*only), false),
        Some(_) => (None, true),
        None => (None, false),
    }
}

/// Recovers all of `y` from one spring-scale (or parity) weighing.
pub fn run_bv_coin_weighing(oracle: &OracleSpec) -> Result<Transcript> {
    if !matches!(oracle.kind(), AnswerKind::SpringScale | AnswerKind::Parity) {
        return Err(Error::Precondition("coin weighing needs a spring-scale or parity database".into()));
    }
    let circuit = SingleQueryCircuit::coin_weighing(oracle.len(), oracle.answer_alphabet())?;
    let mut counter = QueryCounter::new();
    let post = circuit.query(oracle, &mut counter)?;
    let measured = circuit.measure(&post)?;
    let success = oracle.holds(&measured.outcome);
    Ok(quantum_transcript(
        "coin_weighing",
        counter,
        &measured,
        Some(Recovered::Contents(measured.outcome.clone())),
        false,
        success,
    ))
}

fn check_marked_item(oracle: &OracleSpec, n: usize) -> Result<()> {
    if oracle.kind() != AnswerKind::Parity {
        return Err(Error::Precondition("search needs a parity database".into()));
    }
    if oracle.len() != n {
        return Err(Error::Dimension(format!(
            "database has {} items, the search expects {n}",
            oracle.len()
        )));
    }
    if oracle.contents().weight() != 1 {
        return Err(Error::Precondition("the database must mark exactly one item".into()));
    }
    Ok(())
}

/// A single-query search whose queries are generated by a fixed
/// [`GeneratorSet`] and whose answers are decoded through the codewords
/// of the `n` unit strings.
#[derive(Debug, Clone)]
pub struct GeneratedSearch {
    algorithm: &'static str,
    gens: GeneratorSet,
    circuit: SingleQueryCircuit,
    table: HashMap<DigitString, Vec<usize>>,
}

impl GeneratedSearch {
    fn new(algorithm: &'static str, gens: GeneratorSet) -> Result<Self> {
        let n = gens.width();
        let units = (0..n)
            .map(|i| DigitString::unit(n, i, 2))
            .collect::<Result<Vec<_>>>()?;
        let table = codeword_table(&gens, &units)?;
        Ok(Self {
            algorithm,
            circuit: SingleQueryCircuit::generated(gens.clone())?,
            gens,
            table,
        })
    }

    /// Walsh search over `n = 2^p` items.
    pub fn walsh(n: usize) -> Result<Self> {
        Self::new("walsh_search", walsh_generators(n)?)
    }

    /// Search with the first `m` Huffman queries of `code`.
    pub fn huffman(code: &HuffmanCode, m: usize) -> Result<Self> {
        let queries = huffman_queries(code, m)?;
        let gens = GeneratorSet::new(queries).map_err(|e| {
            Error::Precondition(format!(
                "the first {m} Huffman queries (max codeword length {}) do not form an \
                 independent set: {e}",
                code.max_length()
            ))
        })?;
        Self::new("huffman_search", gens)
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn circuit(&self) -> &SingleQueryCircuit {
        &self.circuit
    }

    pub fn items(&self) -> usize {
        self.gens.width()
    }

    /// Post-query state for the given database.
    pub fn query(&self, oracle: &OracleSpec, counter: &mut QueryCounter) -> Result<QuantumState> {
        check_marked_item(oracle, self.items())?;
        self.circuit.query(oracle, counter)
    }

    pub fn run(&self, oracle: &OracleSpec) -> Result<Transcript> {
        let mut counter = QueryCounter::new();
        let post = self.query(oracle, &mut counter)?;
        let measured = self.circuit.measure(&post)?;
        let (item, ambiguous) = decode(&self.table, &measured.outcome);
        let success = match item {
            Some(i) => oracle.holds(&DigitString::unit(self.items(), i, 2)?),
            None => false,
        };
        Ok(quantum_transcript(
            self.algorithm,
            counter,
            &measured,
            item.map(Recovered::Item),
            ambiguous,
            success,
        ))
    }
}

/// Finds the single marked item among `n = 2^p` with one query.
pub fn run_walsh_search(n: usize, oracle: &OracleSpec) -> Result<Transcript> {
    GeneratedSearch::walsh(n)?.run(oracle)
}

/// One-query search with the first `m` queries of the source's Huffman code.
pub fn run_huffman_search(
    source: &SourceDistribution,
    m: usize,
    oracle: &OracleSpec,
) -> Result<Transcript> {
    GeneratedSearch::huffman(&build_huffman(source)?, m)?.run(oracle)
}

/// Single-query identification of one of `k` known candidate strings with
/// a random linear code of length `m = ⌈log_A k⌉ + l`.
#[derive(Debug, Clone)]
pub struct RandomCoding {
    candidates: Vec<DigitString>,
    gens: GeneratorSet,
    circuit: SingleQueryCircuit,
    table: HashMap<DigitString, Vec<usize>>,
}

/// Code length used for `k` candidates and slack `l`; at least 1.
pub fn random_code_length(modulus: u32, k: usize, l: u32) -> usize {
    (ceil_log(modulus, k as u64) + l).max(1) as usize
}

impl RandomCoding {
    pub fn new(candidates: Vec<DigitString>, l: u32, seed: u64) -> Result<Self> {
        let first = candidates
            .first()
            .ok_or_else(|| Error::Domain("no candidates".into()))?;
        let (n, a) = (first.len(), first.modulus());
        if candidates.iter().any(|c| c.len() != n || c.modulus() != a) {
            return Err(Error::Dimension("candidates must share length and modulus".into()));
        }
        let m = random_code_length(a, candidates.len(), l);
        if m > n {
            return Err(Error::Infeasible(format!(
                "code length m = {m} exceeds string length n = {n}"
            )));
        }
        if (a as u64).checked_pow(m as u32).is_none_or(|d| d > MAX_INDEX_DIMENSION) {
            return Err(Error::Resource(format!(
                "index register {a}^{m} exceeds {MAX_INDEX_DIMENSION}"
            )));
        }
        let gens = crate::algebra::random_generators(n, m, a, seed)?;
        Self::with_generators(candidates, gens)
    }

    /// Uses a caller-chosen code instead of a random one.
    pub fn with_generators(candidates: Vec<DigitString>, gens: GeneratorSet) -> Result<Self> {
        let table = codeword_table(&gens, &candidates)?;
        Ok(Self {
            circuit: SingleQueryCircuit::generated(gens.clone())?,
            candidates,
            gens,
            table,
        })
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn candidates(&self) -> &[DigitString] {
        &self.candidates
    }

    pub fn circuit(&self) -> &SingleQueryCircuit {
        &self.circuit
    }

    pub fn table(&self) -> &HashMap<DigitString, Vec<usize>> {
        &self.table
    }

    fn check_oracle(&self, oracle: &OracleSpec) -> Result<()> {
        if oracle.kind() != AnswerKind::ZaDot {
            return Err(Error::Precondition("random coding needs a Z_A dot-product database".into()));
        }
        if !self.candidates.contains(oracle.contents()) {
            return Err(Error::Precondition("the database holds none of the candidates".into()));
        }
        Ok(())
    }

    pub fn query(&self, oracle: &OracleSpec, counter: &mut QueryCounter) -> Result<QuantumState> {
        self.check_oracle(oracle)?;
        self.circuit.query(oracle, counter)
    }

    /// Whether the database's codeword is shared with another candidate,
    /// i.e. whether the run is bound to fail.
    pub fn collides(&self, oracle: &OracleSpec) -> Result<bool> {
        let z = encode(&self.gens, oracle.contents())?;
        Ok(self.table.get(&z).is_some_and(|v| v.len() > 1))
    }

    pub fn run(&self, oracle: &OracleSpec) -> Result<Transcript> {
        let mut counter = QueryCounter::new();
        let post = self.query(oracle, &mut counter)?;
        let measured = self.circuit.measure(&post)?;
        let (item, ambiguous) = decode(&self.table, &measured.outcome);
        let success = item.is_some_and(|i| oracle.holds(&self.candidates[i]));
        Ok(quantum_transcript(
            "random_coding",
            counter,
            &measured,
            item.map(Recovered::Item),
            ambiguous,
            success,
        ))
    }
}

/// Seeds the random code, then runs it once against `oracle`.
pub fn run_random_coding(
    candidates: &[DigitString],
    l: u32,
    seed: u64,
    oracle: &OracleSpec,
) -> Result<Transcript> {
    RandomCoding::new(candidates.to_vec(), l, seed)?.run(oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::inner_product;

    fn ds(s: &str) -> DigitString {
        DigitString::parse(s, 2).unwrap()
    }

    #[test]
    fn coin_weighing_examples() {
        let zero = OracleSpec::spring_scale(ds("0000")).unwrap();
        let t = run_bv_coin_weighing(&zero).unwrap();
        assert_eq!(t.recovered, Some(Recovered::Contents(ds("0000"))));
        assert!(t.success);

        let t = run_bv_coin_weighing(&OracleSpec::spring_scale(ds("10")).unwrap()).unwrap();
        assert_eq!(t.recovered, Some(Recovered::Contents(ds("10"))));
        assert!((t.final_outcome_probability - 1.0).abs() < 1e-9);
        assert_eq!(t.oracle_calls, 1);
    }

    #[test]
    fn coin_weighing_is_exhaustively_exact_for_six_coins() {
        for yi in 0..64 {
            let y = DigitString::from_index(yi, 6, 2).unwrap();
            let t = run_bv_coin_weighing(&OracleSpec::spring_scale(y.clone()).unwrap()).unwrap();
            assert!(t.success, "y = {y}");
            assert_eq!(t.oracle_calls, 1);
            assert!((t.final_outcome_probability - 1.0).abs() < 1e-9);
            assert!((t.kickback_fidelity.unwrap() - 1.0).abs() < 1e-12);
            // Parity alone suffices.
            let p = run_bv_coin_weighing(&OracleSpec::parity(y.clone()).unwrap()).unwrap();
            assert_eq!(p.recovered, t.recovered);
        }
    }

    #[test]
    fn coin_weighing_caps() {
        let big = OracleSpec::spring_scale(DigitString::zeros(21, 2).unwrap()).unwrap();
        assert!(matches!(run_bv_coin_weighing(&big), Err(Error::Resource(_))));
        let za = OracleSpec::za_dot(DigitString::parse("(1,2)", 3).unwrap()).unwrap();
        assert!(matches!(run_bv_coin_weighing(&za), Err(Error::Precondition(_))));
    }

    #[test]
    fn walsh_search_examples() {
        for (y, item) in [("01", 1), ("10", 0)] {
            let t = run_walsh_search(2, &OracleSpec::parity(ds(y)).unwrap()).unwrap();
            assert_eq!(t.recovered, Some(Recovered::Item(item)));
            assert!((t.final_outcome_probability - 1.0).abs() < 1e-12);
        }
        let search = GeneratedSearch::walsh(8).unwrap();
        let mut states = Vec::new();
        for i in 0..8 {
            let oracle = OracleSpec::parity(DigitString::unit(8, i, 2).unwrap()).unwrap();
            let t = search.run(&oracle).unwrap();
            assert_eq!(t.recovered, Some(Recovered::Item(i)));
            assert_eq!(t.oracle_calls, 1);
            states.push(search.query(&oracle, &mut QueryCounter::new()).unwrap());
        }
        for i in 0..8 {
            for j in 0..8 {
                let ip = inner_product(&states[i], &states[j]).unwrap().norm();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn walsh_search_preconditions() {
        let two = OracleSpec::parity(ds("0110")).unwrap();
        assert!(matches!(run_walsh_search(4, &two), Err(Error::Precondition(_))));
        let six = OracleSpec::parity(DigitString::unit(6, 0, 2).unwrap()).unwrap();
        assert!(matches!(run_walsh_search(6, &six), Err(Error::Domain(_))));
    }

    #[test]
    fn huffman_search_examples() {
        let source = SourceDistribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        for i in 0..3 {
            let oracle = OracleSpec::parity(DigitString::unit(3, i, 2).unwrap()).unwrap();
            let t = run_huffman_search(&source, 2, &oracle).unwrap();
            assert_eq!(t.recovered, Some(Recovered::Item(i)));
            let t1 = run_huffman_search(&source, 1, &oracle).unwrap();
            assert_eq!(t1.success, i == 0);
            assert_eq!(t1.ambiguous, i != 0);
            assert_eq!(t1.oracle_calls, 1);
        }
        // m beyond the longest codeword makes an all-zero query.
        let oracle = OracleSpec::parity(DigitString::unit(3, 0, 2).unwrap()).unwrap();
        assert!(matches!(run_huffman_search(&source, 3, &oracle), Err(Error::Precondition(_))));
    }

    #[test]
    fn equiprobable_huffman_search_matches_walsh() {
        let n = 16;
        let source = SourceDistribution::uniform(n).unwrap();
        for i in 0..n {
            let oracle = OracleSpec::parity(DigitString::unit(n, i, 2).unwrap()).unwrap();
            let h = run_huffman_search(&source, 4, &oracle).unwrap();
            let w = run_walsh_search(n, &oracle).unwrap();
            assert_eq!(h.recovered, w.recovered);
            assert!(h.success && w.success);
        }
    }

    #[test]
    fn random_coding_lone_candidate() {
        let y = DigitString::parse("(2,1,0)", 3).unwrap();
        for l in 0..3 {
            let t = run_random_coding(&[y.clone()], l, 5, &OracleSpec::za_dot(y.clone()).unwrap())
                .unwrap();
            assert!(t.success);
            assert_eq!(t.oracle_calls, 1);
        }
    }

    #[test]
    fn binary_random_coding_over_all_strings_is_coin_weighing() {
        let n = 5;
        let all: Vec<DigitString> =
            (0..32).map(|i| DigitString::from_index(i, n, 2).unwrap()).collect();
        let coding = RandomCoding::new(all.clone(), 0, 9).unwrap();
        assert_eq!(coding.generators().len(), n);
        for y in &all {
            let rc = coding.run(&OracleSpec::za_dot(y.clone()).unwrap()).unwrap();
            let bv = run_bv_coin_weighing(&OracleSpec::parity(y.clone()).unwrap()).unwrap();
            assert!(rc.success && bv.success);
            assert_eq!(rc.recovered, Some(Recovered::Item(y.index() as usize)));
        }
    }

    #[test]
    fn random_coding_limits() {
        let c: Vec<DigitString> = (0..4).map(|i| DigitString::from_index(i, 3, 2).unwrap()).collect();
        assert!(matches!(RandomCoding::new(c.clone(), 2, 0), Err(Error::Infeasible(_))));
        let outsider = OracleSpec::za_dot(DigitString::from_index(7, 3, 2).unwrap()).unwrap();
        let coding = RandomCoding::new(c, 1, 0).unwrap();
        assert!(matches!(coding.run(&outsider), Err(Error::Precondition(_))));
        let long: Vec<DigitString> = vec![DigitString::zeros(30, 3).unwrap()];
        assert!(matches!(RandomCoding::new(long, 13, 0), Err(Error::Resource(_))));
    }
}
