//! Digit strings over Z_A and the linear machinery built on them.
//!
//! A [`DigitString`] stores position `i = 1..=n` at offset `i - 1`. It is
//! displayed position 1 first, and when read as a basis index position 1
//! is the most significant digit, so the display of a binary string is
//! exactly the binary expansion of its index.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Attempts made by [`random_generators`] before giving up.
pub const MAX_SAMPLING_ATTEMPTS: usize = 1000;

/// A length-`n` string of digits in Z_A.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitString {
    digits: Vec<u32>,
    modulus: u32,
}

impl DigitString {
    pub fn new(digits: Vec<u32>, modulus: u32) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::Domain(format!("modulus must be at least 2, got {modulus}")));
        }
        if digits.is_empty() {
            return Err(Error::Domain("digit strings must have length at least 1".into()));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= modulus) {
            return Err(Error::Domain(format!("digit {d} is not in Z_{modulus}")));
        }
        Ok(Self { digits, modulus })
    }

    pub fn binary(bits: &[u8]) -> Result<Self> {
        Self::new(bits.iter().map(|&b| b as u32).collect(), 2)
    }

    pub fn zeros(len: usize, modulus: u32) -> Result<Self> {
        Self::new(vec![0; len], modulus)
    }

    /// The unit string `e_i` with a single 1 at zero-based offset `offset`.
    pub fn unit(len: usize, offset: usize, modulus: u32) -> Result<Self> {
        if offset >= len {
            return Err(Error::Dimension(format!("offset {offset} outside length {len}")));
        }
        let mut digits = vec![0; len];
        digits[offset] = 1;
        Self::new(digits, modulus)
    }

    /// Decodes a basis index, position 1 most significant.
    pub fn from_index(mut index: u64, len: usize, modulus: u32) -> Result<Self> {
        let mut digits = vec![0; len];
        for d in digits.iter_mut().rev() {
            *d = (index % modulus as u64) as u32;
            index /= modulus as u64;
        }
        if index != 0 {
            return Err(Error::Dimension(format!(
                "index does not fit in {len} digits of base {modulus}"
            )));
        }
        Self::new(digits, modulus)
    }

    /// Parses either concatenated digits (`"0110"`) or a parenthesized,
    /// comma-separated list (`"(1,2,0)"`).
    pub fn parse(text: &str, modulus: u32) -> Result<Self> {
        let text = text.trim();
        let digits = if let Some(inner) = text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            inner
                .split(',')
                .map(|part| {
                    part.trim()
                        .parse::<u32>()
                        .map_err(|e| Error::Parse(format!("bad digit {part:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {text:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Self::new(digits, modulus)
    }

    pub fn index(&self) -> u64 {
        self.digits
            .iter()
            .fold(0u64, |acc, &d| acc * self.modulus as u64 + d as u64)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// Number of nonzero digits.
    pub fn weight(&self) -> usize {
        self.digits.iter().filter(|&&d| d != 0).count()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "lengths differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        if self.modulus != other.modulus {
            return Err(Error::Dimension(format!(
                "moduli differ: {} vs {}",
                self.modulus, other.modulus
            )));
        }
        Ok(())
    }

    /// Digit-wise sum mod A.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let a = self.modulus;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&x, &y)| (x + y) % a)
            .collect();
        Ok(Self { digits, modulus: a })
    }

    pub fn scale(&self, factor: u32) -> Self {
        let a = self.modulus as u64;
        let f = factor as u64 % a;
        Self {
            digits: self.digits.iter().map(|&d| (d as u64 * f % a) as u32).collect(),
            modulus: self.modulus,
        }
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        let a = self.modulus;
        for (x, &y) in self.digits.iter_mut().zip(&other.digits) {
            let s = *x + y;
            *x = if s >= a { s - a } else { s };
        }
    }

    pub(crate) fn dot_unchecked(&self, other: &Self, modulus: u32) -> u32 {
        let sum: u64 = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&x, &y)| x as u64 * y as u64)
            .sum();
        (sum % modulus as u64) as u32
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.modulus <= 10 {
            for d in &self.digits {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.digits.iter().map(u32::to_string).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

impl Serialize for DigitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for DigitString {
    type Err = Error;

    /// Parses a binary string.
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, 2)
    }
}

/// `(Σ_i x_i y_i) mod A`.
pub fn dot_mod(x: &DigitString, y: &DigitString, modulus: u32) -> Result<u32> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if modulus < 2 || x.digits.iter().chain(&y.digits).any(|&d| d >= modulus) {
        return Err(Error::Dimension(format!("digits are not valid for modulus {modulus}")));
    }
    Ok(x.dot_unchecked(y, modulus))
}

/// Hamming weight of the bitwise product `x ∧ y`: the reading of a spring
/// scale weighing the coins selected by `x` when `y` marks the bad ones.
pub fn hamming_and_weight(x: &DigitString, y: &DigitString) -> Result<usize> {
    if x.modulus != 2 || y.modulus != 2 {
        return Err(Error::Dimension("hamming_and_weight needs binary strings".into()));
    }
    x.check_compatible(y)?;
    Ok(x.digits
        .iter()
        .zip(&y.digits)
        .filter(|(&a, &b)| a == 1 && b == 1)
        .count())
}

pub fn is_prime(a: u32) -> bool {
    if a < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= a {
        if a % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn inverse_mod(x: u32, p: u32) -> u32 {
    // Fermat: x^(p-2) mod p
    let (mut base, mut exp, mut acc) = (x as u64 % p as u64, p as u64 - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// Rank over the field Z_p of the rows in `rows`.
pub fn rank_mod_prime(rows: &[DigitString], modulus: u32) -> Result<usize> {
    if !is_prime(modulus) {
        return Err(Error::UnsupportedModulus(modulus));
    }
    let Some(first) = rows.first() else {
        return Ok(0);
    };
    let width = first.len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Dimension("rows have different lengths".into()));
    }
    if rows.iter().any(|r| r.modulus != modulus) {
        return Err(Error::Dimension(format!("rows are not over Z_{modulus}")));
    }
    let p = modulus as u64;
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.digits.iter().map(|&d| d as u64).collect())
        .collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = inverse_mod(m[rank][col] as u32, modulus) as u64;
        for v in m[rank].iter_mut() {
            *v = *v * inv % p;
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = row[col];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v = (*v + p - factor * pv % p) % p;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    Ok(rank)
}

/// True iff no nontrivial Z_A-combination of `gens` vanishes.
pub fn is_linearly_independent(gens: &[DigitString], modulus: u32) -> Result<bool> {
    Ok(rank_mod_prime(gens, modulus)? == gens.len())
}

/// `m` linearly independent strings of common length and modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSet {
    generators: Vec<DigitString>,
}

impl GeneratorSet {
    /// Validates shape and linear independence.
    pub fn new(generators: Vec<DigitString>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Domain("a generator set needs at least one generator".into()))?;
        let (n, a) = (first.len(), first.modulus());
        if generators.iter().any(|g| g.len() != n || g.modulus() != a) {
            return Err(Error::Dimension("generators must share length and modulus".into()));
        }
        if generators.len() > n {
            return Err(Error::Infeasible(format!(
                "{} generators cannot be independent in length {n}",
                generators.len()
            )));
        }
        if !is_linearly_independent(&generators, a)? {
            return Err(Error::Precondition("generators are linearly dependent".into()));
        }
        Ok(Self { generators })
    }

    /// The unit strings `e_1, …, e_n`; valid for any modulus.
    pub fn standard_basis(len: usize, modulus: u32) -> Result<Self> {
        let generators = (0..len)
            .map(|k| DigitString::unit(len, k, modulus))
            .collect::<Result<Vec<_>>>()?;
        if generators.is_empty() {
            return Err(Error::Domain("empty basis".into()));
        }
        Ok(Self { generators })
    }

    pub fn generators(&self) -> &[DigitString] {
        &self.generators
    }

    /// Number of generators `m`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// String length `n`.
    pub fn width(&self) -> usize {
        self.generators[0].len()
    }

    pub fn modulus(&self) -> u32 {
        self.generators[0].modulus()
    }

    /// Size of the generated subgroup, `A^m`, if it fits in a `u64`.
    pub fn group_order(&self) -> Option<u64> {
        (self.modulus() as u64).checked_pow(self.len() as u32)
    }

    /// Calls `f(index, c(s))` for every `s` in basis-index order, updating
    /// `c(s)` incrementally as the index counter advances.
    pub fn for_each_member(&self, mut f: impl FnMut(u64, &DigitString)) {
        let a = self.modulus();
        let Some(order) = self.group_order() else {
            return;
        };
        let mut counter = vec![0u32; self.len()];
        let mut member = DigitString {
            digits: vec![0; self.width()],
            modulus: a,
        };
        for index in 0..order {
            f(index, &member);
            // Advancing digit k by one adds g_k; a wrap from A-1 to 0 also
            // adds g_k since A·g_k = 0.
            for k in (0..counter.len()).rev() {
                member.add_assign_unchecked(&self.generators[k]);
                counter[k] += 1;
                if counter[k] < a {
                    break;
                }
                counter[k] = 0;
            }
        }
    }
}

/// The `log2 n` Walsh generators: `g_k` is blocks of `2^(k-1)` zeros
/// alternating with `2^(k-1)` ones, starting at position 1 with zeros.
pub fn walsh_generators(n: usize) -> Result<GeneratorSet> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Domain(format!(
            "Walsh search needs n = 2^p with p >= 1, got {n}; pad the database to {}",
            n.max(2).next_power_of_two()
        )));
    }
    let p = n.trailing_zeros();
    let generators = (0..p)
        .map(|k| DigitString {
            digits: (0..n).map(|j| ((j >> k) & 1) as u32).collect(),
            modulus: 2,
        })
        .collect();
    Ok(GeneratorSet { generators })
}

/// The group member `c(s) = Σ_i s_i g_i mod A`.
pub fn expand_member(gens: &GeneratorSet, s: &DigitString) -> Result<DigitString> {
    if s.len() != gens.len() || s.modulus() != gens.modulus() {
        return Err(Error::Dimension(format!(
            "index string must have length {} over Z_{}",
            gens.len(),
            gens.modulus()
        )));
    }
    let a = gens.modulus() as u64;
    let mut digits = vec![0u64; gens.width()];
    for (g, &coeff) in gens.generators.iter().zip(&s.digits) {
        if coeff == 0 {
            continue;
        }
        for (acc, &d) in digits.iter_mut().zip(&g.digits) {
            *acc = (*acc + coeff as u64 * d as u64) % a;
        }
    }
    Ok(DigitString {
        digits: digits.into_iter().map(|d| d as u32).collect(),
        modulus: gens.modulus(),
    })
}

/// Rejection-samples `m` uniformly random, linearly independent strings.
pub fn random_generators(n: usize, m: usize, modulus: u32, seed: u64) -> Result<GeneratorSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_generators_with(&mut rng, n, m, modulus)
}

pub(crate) fn random_generators_with<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    modulus: u32,
) -> Result<GeneratorSet> {
    if !is_prime(modulus) {
        return Err(Error::UnsupportedModulus(modulus));
    }
    if m == 0 || n == 0 {
        return Err(Error::Domain("need n >= 1 and m >= 1".into()));
    }
    if m > n {
        return Err(Error::Infeasible(format!("cannot pick {m} independent strings of length {n}")));
    }
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let generators: Vec<DigitString> = (0..m)
            .map(|_| DigitString {
                digits: (0..n).map(|_| rng.gen_range(0..modulus)).collect(),
                modulus,
            })
            .collect();
        if is_linearly_independent(&generators, modulus)? {
            return Ok(GeneratorSet { generators });
        }
    }
    Err(Error::SearchFailure(format!(
        "no independent set found in {MAX_SAMPLING_ATTEMPTS} attempts"
    )))
}
