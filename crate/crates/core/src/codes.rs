//! Classical codes behind the compressive algorithms: linear encodings
//! `z = G·y`, Huffman codes and their query sets, and the collision
//! analysis of random linear codes.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{is_prime, random_generators_with, DigitString, GeneratorSet};
use crate::error::{Error, Result};

/// Tolerance on `Σ p_i = 1`.
pub const PROBABILITY_TOLERANCE: f64 = 1e-10;

/// Random generator sets tried at each code length by
/// [`find_collision_free_generators`].
pub const SEARCH_ATTEMPTS_PER_LENGTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceDistribution {
    probabilities: Vec<f64>,
}

impl SourceDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if let Some(p) = probabilities.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::Domain(format!("probability {p} is not a finite nonnegative number")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probabilities })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Domain(format!("weights sum to {total}")));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("empty source".into()));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// `H(Y)` in bits.
    pub fn entropy(&self) -> f64 {
        self.probabilities
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }
}

/// `z_k = g_k · y mod A`.
pub fn encode(gens: &GeneratorSet, y: &DigitString) -> Result<DigitString> {
    if y.len() != gens.width() || y.modulus() != gens.modulus() {
        return Err(Error::Dimension(format!(
            "cannot encode a length-{} string over Z_{} with generators of length {} over Z_{}",
            y.len(),
            y.modulus(),
            gens.width(),
            gens.modulus()
        )));
    }
    let a = gens.modulus();
    DigitString::new(
        gens.generators().iter().map(|g| g.dot_unchecked(y, a)).collect(),
        a,
    )
}

/// Encodes every candidate and groups candidate indices by codeword.
pub fn codeword_table(
    gens: &GeneratorSet,
    candidates: &[DigitString],
) -> Result<HashMap<DigitString, Vec<usize>>> {
    let mut table: HashMap<DigitString, Vec<usize>> = HashMap::new();
    for (i, c) in candidates.iter().enumerate() {
        table.entry(encode(gens, c)?).or_default().push(i);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HuffmanCode {
    source: SourceDistribution,
    codewords: Vec<DigitString>,
}

/// One row of a code table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeTableRow {
    pub item: usize,
    pub probability: f64,
    pub codeword: String,
}

impl HuffmanCode {
    pub fn source(&self) -> &SourceDistribution {
        &self.source
    }

    /// Codeword of each item, indexed like the source.
    pub fn codewords(&self) -> &[DigitString] {
        &self.codewords
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.codewords.iter().map(DigitString::len).collect()
    }

    pub fn max_length(&self) -> usize {
        self.codewords.iter().map(DigitString::len).max().unwrap_or(0)
    }

    /// `Σ p_i l_i`.
    pub fn average_length(&self) -> f64 {
        self.source
            .probabilities
            .iter()
            .zip(&self.codewords)
            .map(|(p, c)| p * c.len() as f64)
            .sum()
    }

    /// `Σ 2^{-l_i}`.
    pub fn kraft_sum(&self) -> f64 {
        self.codewords.iter().map(|c| 0.5f64.powi(c.len() as i32)).sum()
    }

    pub fn is_prefix_free(&self) -> bool {
        self.codewords.iter().enumerate().all(|(i, a)| {
            self.codewords.iter().enumerate().all(|(j, b)| {
                i == j || a.len() > b.len() || b.digits()[..a.len()] != *a.digits()
            })
        })
    }

    /// The first `m` bits of item `i`'s codeword, zero-padded to length `m`.
    pub fn truncated_codeword(&self, item: usize, m: usize) -> Result<DigitString> {
        let code = self
            .codewords
            .get(item)
            .ok_or_else(|| Error::Dimension(format!("no item {item}")))?;
        let digits = (0..m).map(|k| code.digits().get(k).copied().unwrap_or(0)).collect();
        DigitString::new(digits, 2)
    }

    /// Rows of (item, probability, codeword) in item order.
    pub fn table(&self) -> Vec<CodeTableRow> {
        self.codewords
            .iter()
            .zip(&self.source.probabilities)
            .enumerate()
            .map(|(item, (c, &p))| CodeTableRow {
                item,
                probability: p,
                codeword: c.to_string(),
            })
            .collect()
    }
}

struct HeapEntry {
    probability: f64,
    min_item: usize,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // Reversed: BinaryHeap is a max-heap and we pop the lightest node,
    // breaking probability ties by the smallest contained item.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .probability
            .total_cmp(&self.probability)
            .then(other.min_item.cmp(&self.min_item))
    }
}

/// Standard Huffman construction.
///
/// Each merge takes the two lightest nodes (probability ties go to the node
/// holding the smallest item index); the lighter one becomes the 0 branch.
pub fn build_huffman(source: &SourceDistribution) -> Result<HuffmanCode> {
    let n = source.len();
    if n < 2 {
        return Err(Error::Domain(format!("Huffman coding needs at least 2 items, got {n}")));
    }
    // children[node] for internal nodes; leaves are 0..n.
    let mut children: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut heap: BinaryHeap<HeapEntry> = source
        .probabilities
        .iter()
        .enumerate()
        .map(|(i, &p)| HeapEntry {
            probability: p,
            min_item: i,
            node: i,
        })
        .collect();
    while heap.len() > 1 {
        let zero = heap.pop().expect("len > 1");
        let one = heap.pop().expect("len > 1");
        children.push(Some((zero.node, one.node)));
        heap.push(HeapEntry {
            probability: zero.probability + one.probability,
            min_item: zero.min_item.min(one.min_item),
            node: children.len() - 1,
        });
    }
    let root = heap.pop().expect("nonempty").node;

    let mut codewords: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut stack = vec![(root, Vec::new())];
    while let Some((node, prefix)) = stack.pop() {
        match children[node] {
            Some((zero, one)) => {
                let mut left = prefix.clone();
                left.push(0);
                let mut right = prefix;
                right.push(1);
                stack.push((zero, left));
                stack.push((one, right));
            }
            None => codewords[node] = prefix,
        }
    }
    let codewords = codewords
        .into_iter()
        .map(|c| DigitString::new(c, 2))
        .collect::<Result<Vec<_>>>()?;
    Ok(HuffmanCode {
        source: source.clone(),
        codewords,
    })
}

/// The first `m` classical Huffman queries: bit `i` of query `k` is the
/// `k`-th codeword bit of item `i`, or 0 once item `i`'s codeword has ended.
pub fn huffman_queries(code: &HuffmanCode, m: usize) -> Result<Vec<DigitString>> {
    if m == 0 {
        return Err(Error::Domain("need at least one query".into()));
    }
    (0..m)
        .map(|k| {
            DigitString::new(
                code.codewords
                    .iter()
                    .map(|c| c.digits().get(k).copied().unwrap_or(0))
                    .collect(),
                2,
            )
        })
        .collect()
}

/// Probability mass of items whose zero-padded `m`-bit truncated codeword is
/// shared with another item.
pub fn truncation_error_probability(code: &HuffmanCode, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("need at least one query".into()));
    }
    let mut groups: HashMap<DigitString, Vec<usize>> = HashMap::new();
    for item in 0..code.codewords.len() {
        groups
            .entry(code.truncated_codeword(item, m)?)
            .or_default()
            .push(item);
    }
    Ok(groups
        .values()
        .filter(|items| items.len() > 1)
        .flatten()
        .map(|&i| code.source.probabilities[i])
        .fold(0.0, |acc: f64, p| acc + p)
        .min(1.0))
}

/// `1 − (1 − A^{−m})^{k−1}`: chance that one of the other `k − 1` random
/// candidates shares `y`'s codeword.
pub fn collision_probability(modulus: u32, m: u32, k: u64) -> f64 {
    collision_probability_at(modulus, m as f64, k)
}

/// [`collision_probability`] for a real-valued code length, as in
/// `m = log_A k + l` when `k` is not a power of `A`.
pub fn collision_probability_at(modulus: u32, m: f64, k: u64) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    let rate = (modulus as f64).powf(-m);
    -((k - 1) as f64 * (-rate).ln_1p()).exp_m1()
}

/// `2^{−l}(1 − 1/k)`, the small-`2^{−l}` form of the binary collision
/// probability at `m = log_2 k + l`. Off by `O(2^{−2l})`.
pub fn collision_probability_approx(k: u64, l: u32) -> f64 {
    collision_probability_approx_base(2, k, l)
}

/// `A^{−l}(1 − 1/k)`, the same expansion at `m = log_A k + l`.
pub fn collision_probability_approx_base(modulus: u32, k: u64, l: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    (modulus as f64).powi(-(l as i32)) * (1.0 - 1.0 / k as f64)
}

/// Smallest `e` with `A^e ≥ target`.
pub fn ceil_log(modulus: u32, target: u64) -> u32 {
    let mut e = 0;
    let mut power: u128 = 1;
    while power < target as u128 {
        power *= modulus as u128;
        e += 1;
    }
    e
}

/// Seeded random search for generators whose encoding is injective on
/// `candidates`, trying code lengths from `⌈2 log_A k⌉` up to `max_m`.
pub fn find_collision_free_generators(
    candidates: &[DigitString],
    modulus: u32,
    max_m: usize,
    seed: u64,
) -> Result<GeneratorSet> {
    if !is_prime(modulus) {
        return Err(Error::UnsupportedModulus(modulus));
    }
    let first = candidates
        .first()
        .ok_or_else(|| Error::Domain("no candidates".into()))?;
    let n = first.len();
    if candidates.iter().any(|c| c.len() != n || c.modulus() != modulus) {
        return Err(Error::Dimension("candidates must share length and modulus".into()));
    }
    let distinct: HashSet<&DigitString> = candidates.iter().collect();
    if distinct.len() != candidates.len() {
        return Err(Error::Precondition("candidates must be distinct".into()));
    }
    if max_m > n {
        return Err(Error::Infeasible(format!("max_m = {max_m} exceeds string length {n}")));
    }
    let k = candidates.len() as u64;
    let start = (ceil_log(modulus, k.saturating_mul(k)) as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in start..=max_m {
        for _ in 0..SEARCH_ATTEMPTS_PER_LENGTH {
            let gens = random_generators_with(&mut rng, n, m, modulus)?;
            let mut seen = HashSet::with_capacity(candidates.len());
            let mut injective = true;
            for c in candidates {
                if !seen.insert(encode(&gens, c)?) {
                    injective = false;
                    break;
                }
            }
            if injective {
                return Ok(gens);
            }
        }
    }
    Err(Error::SearchFailure(format!(
        "no collision-free code with m <= {max_m} for {k} candidates; retry with another seed"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::walsh_generators;
    use rand::Rng;

    fn ds(s: &str, a: u32) -> DigitString {
        DigitString::parse(s, a).unwrap()
    }

    fn source(p: &[f64]) -> SourceDistribution {
        SourceDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn encode_examples() {
        let w4 = walsh_generators(4).unwrap();
        assert!(encode(&w4, &DigitString::zeros(4, 2).unwrap()).unwrap().is_zero());
        // Marked position 3 (offset 2): g_1 = 0101 reads 0, g_2 = 0011 reads 1.
        assert_eq!(encode(&w4, &ds("0010", 2)).unwrap(), ds("01", 2));
        let g3 = GeneratorSet::new(vec![ds("(1,1)", 3)]).unwrap();
        assert_eq!(encode(&g3, &ds("(1,2)", 3)).unwrap(), ds("(0)", 3));
        assert!(encode(&g3, &ds("(1,2,0)", 3)).is_err());
    }

    #[test]
    fn walsh_encoding_is_the_binary_offset() {
        // Brute force: every weight-1 string encodes to the LSB-first
        // binary expansion of its offset, and the map is injective.
        for p in 1..=8 {
            let n = 1usize << p;
            let g = walsh_generators(n).unwrap();
            let mut seen = HashSet::new();
            for j in 0..n {
                let z = encode(&g, &DigitString::unit(n, j, 2).unwrap()).unwrap();
                let expected: Vec<u32> = (0..p).map(|k| ((j >> k) & 1) as u32).collect();
                assert_eq!(z.digits(), expected.as_slice());
                assert!(seen.insert(z));
            }
        }
    }

    #[test]
    fn huffman_examples() {
        let two = build_huffman(&source(&[0.5, 0.5])).unwrap();
        assert_eq!(two.lengths(), [1, 1]);

        let three = build_huffman(&source(&[0.5, 0.25, 0.25])).unwrap();
        assert_eq!(three.lengths(), [1, 2, 2]);
        assert!((three.average_length() - 1.5).abs() < 1e-12);
        assert!((three.source().entropy() - 1.5).abs() < 1e-12);
        let words: Vec<String> = three.codewords().iter().map(ToString::to_string).collect();
        assert_eq!(words, ["0", "10", "11"]);

        for p in 1..=6 {
            let n = 1usize << p;
            let code = build_huffman(&SourceDistribution::uniform(n).unwrap()).unwrap();
            for (i, c) in code.codewords().iter().enumerate() {
                assert_eq!(c.len(), p);
                assert_eq!(c.index(), i as u64, "fixed-length binary indexing");
            }
        }

        assert!(matches!(build_huffman(&source(&[1.0])), Err(Error::Domain(_))));
    }

    #[test]
    fn huffman_queries_examples() {
        let code = build_huffman(&source(&[0.5, 0.25, 0.25])).unwrap();
        let q = huffman_queries(&code, 2).unwrap();
        assert_eq!(q[0].digits(), [0, 1, 1]);
        assert_eq!(q[1].digits(), [0, 0, 1]);

        // Equiprobable: Huffman queries are the Walsh generators, most
        // significant codeword bit first.
        let uniform = build_huffman(&SourceDistribution::uniform(4).unwrap()).unwrap();
        let q = huffman_queries(&uniform, 2).unwrap();
        let w = walsh_generators(4).unwrap();
        assert_eq!(q[0], w.generators()[1]);
        assert_eq!(q[1], w.generators()[0]);
    }

    #[test]
    fn truncation_error_examples() {
        let code = build_huffman(&source(&[0.5, 0.25, 0.25])).unwrap();
        assert_eq!(truncation_error_probability(&code, 2).unwrap(), 0.0);
        assert_eq!(truncation_error_probability(&code, 5).unwrap(), 0.0);
        assert!((truncation_error_probability(&code, 1).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn truncation_error_grows_as_queries_shrink() {
        // One light item at 1/10 and the rest sharing 9/10.
        for n in [16usize, 64, 256] {
            let mut p = vec![0.9 / (n - 1) as f64; n];
            p[0] = 0.1;
            let code = build_huffman(&source(&p)).unwrap();
            let full = code.max_length();
            let mut previous = 0.0;
            for m in (1..=full).rev() {
                let e = truncation_error_probability(&code, m).unwrap();
                assert!(e >= previous - 1e-15);
                assert!(e <= 1.0 + 1e-12);
                previous = e;
            }
            assert_eq!(truncation_error_probability(&code, full).unwrap(), 0.0);
        }
    }

    #[test]
    fn collision_probability_examples() {
        assert_eq!(collision_probability(2, 5, 1), 0.0);
        assert!((collision_probability(2, 3, 2) - 0.125).abs() < 1e-15);
        assert_eq!(collision_probability_approx(1, 4), 0.0);
        assert!((collision_probability_approx(2, 0) - 0.5).abs() < 1e-15);
        assert!((collision_probability(2, 1, 2) - 0.5).abs() < 1e-15);
        let exact = collision_probability(2, 20, 1024);
        let approx = collision_probability_approx(1024, 10);
        assert!((exact - approx).abs() <= 2f64.powi(-20));
    }

    #[test]
    fn collision_probability_matches_monte_carlo() {
        // k = 2: the other candidate collides iff a random nonzero difference
        // lands in the kernel of a random code.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for m in [1u32, 2, 3] {
            let trials = 10_000;
            let n = 12;
            let mut hits = 0;
            for _ in 0..trials {
                let gens = random_generators_with(&mut rng, n, m as usize, 2).unwrap();
                let y = DigitString::new((0..n).map(|_| rng.gen_range(0..2)).collect(), 2).unwrap();
                let other =
                    DigitString::new((0..n).map(|_| rng.gen_range(0..2)).collect(), 2).unwrap();
                if encode(&gens, &y).unwrap() == encode(&gens, &other).unwrap() {
                    hits += 1;
                }
            }
            let p = collision_probability(2, m, 2);
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            let observed = hits as f64 / trials as f64;
            assert!((observed - p).abs() <= 3.0 * sigma, "m={m}: {observed} vs {p}");
        }
    }

    #[test]
    fn collision_free_search_examples() {
        let lone = [ds("0110", 2)];
        assert_eq!(find_collision_free_generators(&lone, 2, 4, 0).unwrap().len(), 1);

        let units: Vec<DigitString> =
            (0..8).map(|j| DigitString::unit(8, j, 2).unwrap()).collect();
        let w = walsh_generators(8).unwrap();
        let z: HashSet<DigitString> = units.iter().map(|u| encode(&w, u).unwrap()).collect();
        assert_eq!(z.len(), 8);
        let found = find_collision_free_generators(&units, 2, 6, 1).unwrap();
        assert!(found.len() <= 6);
        let z: HashSet<DigitString> = units.iter().map(|u| encode(&found, u).unwrap()).collect();
        assert_eq!(z.len(), 8);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut random = HashSet::new();
        while random.len() < 16 {
            random.insert(DigitString::new((0..12).map(|_| rng.gen_range(0..2)).collect(), 2).unwrap());
        }
        let random: Vec<DigitString> = random.into_iter().collect();
        let found = find_collision_free_generators(&random, 2, 12, 3).unwrap();
        let z: HashSet<DigitString> = random.iter().map(|u| encode(&found, u).unwrap()).collect();
        assert_eq!(z.len(), 16);

        assert!(matches!(
            find_collision_free_generators(&units, 2, 3, 1),
            Err(Error::SearchFailure(_))
        ));
        assert!(find_collision_free_generators(&[ds("01", 2), ds("01", 2)], 2, 2, 0).is_err());
    }

    #[test]
    fn source_validation() {
        assert!(SourceDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(SourceDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(SourceDistribution::new(vec![f64::NAN, 1.0]).is_err());
        let s = SourceDistribution::from_weights(&[1.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.probabilities(), [0.25, 0.25, 0.5]);
    }

    #[test]
    fn ceil_log_examples() {
        assert_eq!(ceil_log(2, 1), 0);
        assert_eq!(ceil_log(2, 8), 3);
        assert_eq!(ceil_log(2, 9), 4);
        assert_eq!(ceil_log(3, 9), 2);
        assert_eq!(ceil_log(3, 256), 6);
    }
}
