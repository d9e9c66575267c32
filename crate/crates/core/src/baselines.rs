//! Classical counterparts of the quantum algorithms, with exact query counts.

use crate::algebra::{walsh_generators, DigitString, GeneratorSet};
use crate::algorithms::{Recovered, Transcript};
use crate::codes::{codeword_table, HuffmanCode};
use crate::error::{Error, Result};
use crate::oracle::{AnswerKind, OracleSpec, QueryCounter};

fn classical_transcript(
    algorithm: &'static str,
    counter: QueryCounter,
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
        final_outcome_probability: 1.0,
        kickback_fidelity: None,
    }
}

fn marked_item_success(oracle: &OracleSpec, item: usize) -> Result<bool> {
    Ok(item < oracle.len() && oracle.holds(&DigitString::unit(oracle.len(), item, 2)?))
}

/// Asks each Walsh generator once; the answers spell the marked offset in
/// binary, least significant bit first.
pub fn classical_bisection(oracle: &OracleSpec, n: usize) -> Result<Transcript> {
    if oracle.kind() != AnswerKind::Parity || oracle.len() != n {
        return Err(Error::Precondition(format!("bisection needs a parity database of {n} items")));
    }
    let gens = walsh_generators(n)?;
    let mut counter = QueryCounter::new();
    let mut item = 0usize;
    for (k, g) in gens.generators().iter().enumerate() {
        item |= (oracle.classical_answer(g, &mut counter)? as usize) << k;
    }
    let success = marked_item_success(oracle, item)?;
    Ok(classical_transcript(
        "classical_bisection",
        counter,
        Some(Recovered::Item(item)),
        false,
        success,
    ))
}

/// Weighs each coin on its own: `n` queries.
pub fn classical_parity_readout(oracle: &OracleSpec) -> Result<Transcript> {
    if !matches!(oracle.kind(), AnswerKind::Parity | AnswerKind::SpringScale) {
        return Err(Error::Precondition("readout needs a parity or spring-scale database".into()));
    }
    let n = oracle.len();
    let mut counter = QueryCounter::new();
    let bits = (0..n)
        .map(|i| oracle.classical_answer(&DigitString::unit(n, i, 2)?, &mut counter))
        .collect::<Result<Vec<_>>>()?;
    let y = DigitString::new(bits, 2)?;
    let success = oracle.holds(&y);
    Ok(classical_transcript(
        "classical_parity_readout",
        counter,
        Some(Recovered::Contents(y)),
        false,
        success,
    ))
}

/// Asks Huffman queries in order until the answers spell a complete
/// codeword.
pub fn classical_huffman_search(oracle: &OracleSpec, code: &HuffmanCode) -> Result<Transcript> {
    let n = code.codewords().len();
    if oracle.kind() != AnswerKind::Parity || oracle.len() != n {
        return Err(Error::Precondition(format!("Huffman search needs a parity database of {n} items")));
    }
    let mut counter = QueryCounter::new();
    let mut observed: Vec<u32> = Vec::new();
    let mut found = None;
    for k in 0..code.max_length() {
        let query = DigitString::new(
            code.codewords()
                .iter()
                .map(|c| c.digits().get(k).copied().unwrap_or(0))
                .collect(),
            2,
        )?;
        observed.push(oracle.classical_answer(&query, &mut counter)?);
        if let Some(item) = code.codewords().iter().position(|c| c.digits() == observed.as_slice()) {
            found = Some(item);
            break;
        }
    }
    let success = match found {
        Some(i) => marked_item_success(oracle, i)?,
        None => false,
    };
    Ok(classical_transcript(
        "classical_huffman_search",
        counter,
        found.map(Recovered::Item),
        false,
        success,
    ))
}

/// Asks each generator once and decodes through the candidates' codewords.
pub fn classical_random_code(
    oracle: &OracleSpec,
    gens: &GeneratorSet,
    candidates: &[DigitString],
) -> Result<Transcript> {
    if oracle.kind() != AnswerKind::ZaDot {
        return Err(Error::Precondition("random coding needs a Z_A dot-product database".into()));
    }
    let table = codeword_table(gens, candidates)?;
    let mut counter = QueryCounter::new();
    let answers = gens
        .generators()
        .iter()
        .map(|g| oracle.classical_answer(g, &mut counter))
        .collect::<Result<Vec<_>>>()?;
    let z = DigitString::new(answers, gens.modulus())?;
    let (item, ambiguous) = match table.get(&z).map(Vec::as_slice) {
        Some([only]) => (Some(*only), false),
        Some(_) => (None, true),
        None => (None, false),
    };
    let success = item.is_some_and(|i| oracle.holds(&candidates[i]));
    Ok(classical_transcript(
        "classical_random_code",
        counter,
        item.map(Recovered::Item),
        ambiguous,
        success,
    ))
}
