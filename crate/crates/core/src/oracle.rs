//! The database: classical answers and the reversible quantum query
//! `R_y : |x, b⟩ → |x, (b + a(x, y)) mod A′⟩`.

use serde::{Deserialize, Serialize};

use crate::algebra::{hamming_and_weight, DigitString, GeneratorSet};
use crate::error::{Error, Result};
use crate::quantum::QuantumState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    /// `x·y mod 2`.
    Parity,
    /// Hamming weight of `x ∧ y`.
    SpringScale,
    /// `x·y mod A` over the modulus of the contents.
    ZaDot,
}

/// Smallest odd integer `≥ n`: `2⌈(n+1)/2⌉ − 1`.
pub fn n_prime(n: usize) -> usize {
    2 * ((n + 2) / 2) - 1
}

/// Oracle invocations made during one run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QueryCounter {
    calls: u64,
}

impl QueryCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }
}

/// A database holding the string `y`.
///
/// The contents are never handed to recovery algorithms; they only see
/// answers. [`OracleSpec::holds`] exists for the harness to score a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSpec {
    contents: DigitString,
    kind: AnswerKind,
    alphabet: usize,
}

impl OracleSpec {
    pub fn new(contents: DigitString, kind: AnswerKind) -> Result<Self> {
        let alphabet = match kind {
            AnswerKind::Parity | AnswerKind::SpringScale if contents.modulus() != 2 => {
                return Err(Error::Domain(format!("{kind:?} databases hold bit strings")));
            }
            AnswerKind::Parity => 2,
            AnswerKind::SpringScale => n_prime(contents.len()) + 1,
            AnswerKind::ZaDot => contents.modulus() as usize,
        };
        Ok(Self {
            contents,
            kind,
            alphabet,
        })
    }

    pub fn parity(y: DigitString) -> Result<Self> {
        Self::new(y, AnswerKind::Parity)
    }

    pub fn spring_scale(y: DigitString) -> Result<Self> {
        Self::new(y, AnswerKind::SpringScale)
    }

    pub fn za_dot(y: DigitString) -> Result<Self> {
        Self::new(y, AnswerKind::ZaDot)
    }

    pub fn kind(&self) -> AnswerKind {
        self.kind
    }

    /// Number of distinct values the answer register cycles through.
    pub fn answer_alphabet(&self) -> usize {
        self.alphabet
    }

    /// Length `n` of the stored string.
    pub fn len(&self) -> usize {
        self.contents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contents.is_empty()
    }

    pub fn modulus(&self) -> u32 {
        self.contents.modulus()
    }

    /// Scoring check for the harness; not a query and not counted.
    pub fn holds(&self, candidate: &DigitString) -> bool {
        &self.contents == candidate
    }

    pub(crate) fn contents(&self) -> &DigitString {
        &self.contents
    }

    fn check_query(&self, x: &DigitString) -> Result<()> {
        if x.len() != self.contents.len() || x.modulus() != self.contents.modulus() {
            return Err(Error::Dimension(format!(
                "query of length {} over Z_{} against a database of length {} over Z_{}",
                x.len(),
                x.modulus(),
                self.contents.len(),
                self.contents.modulus()
            )));
        }
        Ok(())
    }

    fn answer_unchecked(&self, x: &DigitString) -> u32 {
        match self.kind {
            AnswerKind::Parity => x.dot_unchecked(&self.contents, 2),
            AnswerKind::ZaDot => x.dot_unchecked(&self.contents, self.contents.modulus()),
            AnswerKind::SpringScale => {
                hamming_and_weight(x, &self.contents).expect("shape checked") as u32
            }
        }
    }

    /// One classical query.
    pub fn classical_answer(&self, x: &DigitString, counter: &mut QueryCounter) -> Result<u32> {
        self.check_query(x)?;
        counter.calls += 1;
        Ok(self.answer_unchecked(x))
    }
}

/// How the basis values of the query register become query strings `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum QueryMap {
    /// The register value is `x` itself (`A^n` values).
    Direct { len: usize, modulus: u32 },
    /// The register holds an index string `s`; the query is
    /// `c(s) = Σ s_i g_i`, computed on the fly.
    Generated(GeneratorSet),
}

impl QueryMap {
    /// Number of query register values.
    pub fn dimension(&self) -> Option<u64> {
        match self {
            QueryMap::Direct { len, modulus } => (*modulus as u64).checked_pow(*len as u32),
            QueryMap::Generated(g) => g.group_order(),
        }
    }

    fn shape(&self) -> (usize, u32) {
        match self {
            QueryMap::Direct { len, modulus } => (*len, *modulus),
            QueryMap::Generated(g) => (g.width(), g.modulus()),
        }
    }

    fn for_each_query(&self, f: impl FnMut(u64, &DigitString)) -> Result<()> {
        match self {
            QueryMap::Direct { len, modulus } => {
                GeneratorSet::standard_basis(*len, *modulus)?.for_each_member(f);
            }
            QueryMap::Generated(g) => g.for_each_member(f),
        }
        Ok(())
    }
}

/// Which registers the query reads and writes.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryBinding {
    pub query_register: String,
    pub answer_register: String,
    pub map: QueryMap,
}

/// Applies `R_y` once to the whole superposition.
pub fn apply_quantum_query(
    state: &QuantumState,
    spec: &OracleSpec,
    binding: &QueryBinding,
    counter: &mut QueryCounter,
) -> Result<QuantumState> {
    let layout = state.layout();
    let q_dim = layout.dimension(&binding.query_register)?;
    let b_dim = layout.dimension(&binding.answer_register)?;
    if binding.query_register == binding.answer_register {
        return Err(Error::Layout("query and answer registers must differ".into()));
    }
    if b_dim != spec.answer_alphabet() {
        return Err(Error::Layout(format!(
            "answer register has dimension {b_dim}, the database answers in Z_{}",
            spec.answer_alphabet()
        )));
    }
    if binding.map.dimension() != Some(q_dim as u64) {
        return Err(Error::Layout(format!(
            "query register has dimension {q_dim}, the query map enumerates {:?} values",
            binding.map.dimension()
        )));
    }
    let (len, modulus) = binding.map.shape();
    if len != spec.len() || modulus != spec.modulus() {
        return Err(Error::Dimension(format!(
            "queries of length {len} over Z_{modulus} do not fit the database"
        )));
    }

    let mut answers = vec![0usize; q_dim];
    binding.map.for_each_query(|index, x| {
        answers[index as usize] = spec.answer_unchecked(x) as usize % b_dim;
    })?;
    counter.calls += 1;

    let q_stride = layout.stride(&binding.query_register)?;
    let b_stride = layout.stride(&binding.answer_register)?;
    let amps = state.amplitudes();
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); amps.len()];
    // Walk the index as (outer, q, middle, b, inner) digits, whichever of
    // the two registers is more significant.
    let (hi_dim, hi_stride, lo_dim, lo_stride) = if q_stride > b_stride {
        (q_dim, q_stride, b_dim, b_stride)
    } else {
        (b_dim, b_stride, q_dim, q_stride)
    };
    let middle = hi_stride / (lo_dim * lo_stride);
    for outer in (0..amps.len()).step_by(hi_dim * hi_stride) {
        for h in 0..hi_dim {
            for mid in 0..middle {
                for l in 0..lo_dim {
                    let (q, b) = if q_stride > b_stride { (h, l) } else { (l, h) };
                    let shifted = b + answers[q];
                    let shifted = if shifted >= b_dim { shifted - b_dim } else { shifted };
                    let base = outer + h * hi_stride + mid * lo_dim * lo_stride + l * lo_stride;
                    let target = base - b * b_stride + shifted * b_stride;
                    if lo_stride == 1 {
                        out[target] = amps[base];
                    } else {
                        out[target..target + lo_stride].copy_from_slice(&amps[base..base + lo_stride]);
                    }
                }
            }
        }
    }
    Ok(state.with_amplitudes(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{hadamard_all, QuantumState, RegisterLayout};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ds(s: &str, a: u32) -> DigitString {
        DigitString::parse(s, a).unwrap()
    }

    fn direct(len: usize, modulus: u32) -> QueryBinding {
        QueryBinding {
            query_register: "x".into(),
            answer_register: "b".into(),
            map: QueryMap::Direct { len, modulus },
        }
    }

    fn random_state<R: Rng>(rng: &mut R, layout: RegisterLayout) -> QuantumState {
        let mut amps: Vec<Complex64> = (0..layout.total_dimension())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        QuantumState::from_amplitudes(layout, amps).unwrap()
    }

    #[test]
    fn n_prime_examples() {
        assert_eq!(n_prime(1), 1);
        assert_eq!(n_prime(4), 5);
        assert_eq!(n_prime(5), 5);
        for n in 1..200 {
            let np = n_prime(n);
            assert!(np >= n && np % 2 == 1 && np <= n + 1);
            assert_eq!(np, 2 * (n + 1).div_ceil(2) - 1);
        }
    }

    #[test]
    fn classical_answer_examples() {
        let mut counter = QueryCounter::new();
        let parity = OracleSpec::parity(ds("110", 2)).unwrap();
        assert_eq!(parity.classical_answer(&ds("101", 2), &mut counter).unwrap(), 1);
        let scale = OracleSpec::spring_scale(ds("1111", 2)).unwrap();
        assert_eq!(scale.classical_answer(&ds("1111", 2), &mut counter).unwrap(), 4);
        assert_eq!(scale.answer_alphabet(), 6);
        let za = OracleSpec::za_dot(ds("(2,2)", 3)).unwrap();
        assert_eq!(za.classical_answer(&ds("(1,1)", 3), &mut counter).unwrap(), 1);
        assert_eq!(counter.calls(), 3);

        assert!(matches!(
            parity.classical_answer(&ds("10", 2), &mut counter),
            Err(Error::Dimension(_))
        ));
        assert_eq!(counter.calls(), 3);
    }

    #[test]
    fn answer_alphabets() {
        for n in 1..12 {
            let y = DigitString::zeros(n, 2).unwrap();
            let alphabet = OracleSpec::spring_scale(y).unwrap().answer_alphabet();
            assert_eq!(alphabet % 2, 0);
            assert!(alphabet > n);
        }
        assert_eq!(OracleSpec::za_dot(ds("(1,4)", 5)).unwrap().answer_alphabet(), 5);
        assert!(OracleSpec::parity(ds("(1,2)", 3)).is_err());
    }

    #[test]
    fn quantum_query_examples() {
        let spec = OracleSpec::parity(ds("1", 2)).unwrap();
        let layout = RegisterLayout::new([("x", 2), ("b", 2)]).unwrap();
        let plus = hadamard_all(&QuantumState::basis(layout, &[0, 0]).unwrap(), "x").unwrap();
        let mut counter = QueryCounter::new();
        let out = apply_quantum_query(&plus, &spec, &direct(1, 2), &mut counter).unwrap();
        let r = 1.0 / 2f64.sqrt();
        let expected = [r, 0.0, 0.0, r]; // (|0,0⟩ + |1,1⟩)/√2
        for (a, e) in out.amplitudes().iter().zip(expected) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-12);
        }
        assert_eq!(counter.calls(), 1);

        // y = 0 is the identity.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let zero = OracleSpec::spring_scale(DigitString::zeros(3, 2).unwrap()).unwrap();
        let layout = RegisterLayout::new([("x", 8), ("b", 4)]).unwrap();
        let state = random_state(&mut rng, layout);
        let same = apply_quantum_query(&state, &zero, &direct(3, 2), &mut counter).unwrap();
        assert_eq!(same, state);
    }

    #[test]
    fn layout_mismatches_are_rejected() {
        let spec = OracleSpec::spring_scale(ds("101", 2)).unwrap();
        let mut counter = QueryCounter::new();
        let wrong_b = QuantumState::basis(RegisterLayout::new([("x", 8), ("b", 2)]).unwrap(), &[0, 0])
            .unwrap();
        assert!(matches!(
            apply_quantum_query(&wrong_b, &spec, &direct(3, 2), &mut counter),
            Err(Error::Layout(_))
        ));
        let wrong_x = QuantumState::basis(RegisterLayout::new([("x", 4), ("b", 4)]).unwrap(), &[0, 0])
            .unwrap();
        assert!(matches!(
            apply_quantum_query(&wrong_x, &spec, &direct(3, 2), &mut counter),
            Err(Error::Layout(_))
        ));
        assert_eq!(counter.calls(), 0);
    }

    #[test]
    fn basis_queries_reproduce_classical_answers() {
        for n in 1..=10usize {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let y = DigitString::new((0..n).map(|_| rng.gen_range(0..2)).collect(), 2).unwrap();
            for spec in [OracleSpec::parity(y.clone()).unwrap(), OracleSpec::spring_scale(y).unwrap()] {
                let alphabet = spec.answer_alphabet();
                let layout = RegisterLayout::new([("x", 1usize << n), ("b", alphabet)]).unwrap();
                let mut counter = QueryCounter::new();
                for xi in 0..(1u64 << n) {
                    let x = DigitString::from_index(xi, n, 2).unwrap();
                    let classical = spec.classical_answer(&x, &mut counter).unwrap() as usize;
                    let input = QuantumState::basis(layout.clone(), &[xi as usize, 0]).unwrap();
                    let out = apply_quantum_query(&input, &spec, &direct(n, 2), &mut counter).unwrap();
                    let expected = QuantumState::basis(layout.clone(), &[xi as usize, classical]).unwrap();
                    assert_eq!(out, expected);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn query_is_a_cyclic_permutation(seed in any::<u64>(), n in 1usize..=4, a in prop::sample::select(vec![2u32, 3, 5])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y = DigitString::new((0..n).map(|_| rng.gen_range(0..a)).collect(), a).unwrap();
            let spec = OracleSpec::za_dot(y).unwrap();
            let layout = RegisterLayout::new([("x", (a as usize).pow(n as u32)), ("b", a as usize)]).unwrap();
            let state = random_state(&mut rng, layout);
            let binding = direct(n, a);
            let mut counter = QueryCounter::new();
            let mut cur = state.clone();
            for step in 0..a {
                cur = apply_quantum_query(&cur, &spec, &binding, &mut counter).unwrap();
                prop_assert!((cur.norm_squared() - 1.0).abs() < 1e-12);
                if step + 1 < a {
                    continue;
                }
                let diff = cur.amplitudes().iter().zip(state.amplitudes())
                    .map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                prop_assert!(diff < 1e-15);
            }
            prop_assert_eq!(counter.calls(), a as u64);
        }
    }
}
