//! Dense complex state vectors over composite registers.
//!
//! Basis indices are mixed-radix numbers with the first-listed register
//! most significant. Transforms return new states; nothing is mutated in
//! place through the public API.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `Σ|a|² = 1`.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest state the simulator will allocate.
pub const MAX_DIMENSION: usize = 1 << 25;

/// Largest ensemble Gram matrix / density matrix handed to the eigensolver.
pub const MAX_ENTROPY_DIMENSION: usize = 4096;

/// Eigenvalues below this are treated as zero in entropy sums.
const EIGENVALUE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    registers: Vec<(String, usize)>,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(registers: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let registers: Vec<(String, usize)> =
            registers.into_iter().map(|(n, d)| (n.into(), d)).collect();
        if registers.is_empty() {
            return Err(Error::Layout("a layout needs at least one register".into()));
        }
        for (i, (name, dim)) in registers.iter().enumerate() {
            if *dim < 2 {
                return Err(Error::Layout(format!("register {name:?} has dimension {dim} < 2")));
            }
            if registers[..i].iter().any(|(other, _)| other == name) {
                return Err(Error::Layout(format!("duplicate register name {name:?}")));
            }
        }
        let total = registers
            .iter()
            .try_fold(1usize, |acc, (_, d)| acc.checked_mul(*d))
            .filter(|&t| t <= MAX_DIMENSION)
            .ok_or_else(|| Error::Resource(format!("state dimension exceeds {MAX_DIMENSION}")))?;
        debug_assert!(total >= 2);
        Ok(Self { registers })
    }

    pub fn single(name: &str, dim: usize) -> Result<Self> {
        Self::new([(name, dim)])
    }

    pub fn registers(&self) -> &[(String, usize)] {
        &self.registers
    }

    pub fn total_dimension(&self) -> usize {
        self.registers.iter().map(|(_, d)| d).product()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::Layout(format!("no register named {name:?}")))
    }

    pub fn dimension(&self, name: &str) -> Result<usize> {
        Ok(self.registers[self.position(name)?].1)
    }

    /// Distance in the flat index between consecutive values of a register.
    pub fn stride(&self, name: &str) -> Result<usize> {
        let pos = self.position(name)?;
        Ok(self.registers[pos + 1..].iter().map(|(_, d)| d).product())
    }

    /// Concatenation, `self` most significant.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        Self::new(self.registers.iter().chain(&other.registers).cloned())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    layout: RegisterLayout,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Wraps an amplitude vector, rejecting unnormalized input.
    pub fn from_amplitudes(layout: RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.total_dimension() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a layout of dimension {}",
                amplitudes.len(),
                layout.total_dimension()
            )));
        }
        let state = Self { layout, amplitudes };
        state.check_normalized()?;
        Ok(state)
    }

    /// The basis state with the given value in each register.
    pub fn basis(layout: RegisterLayout, values: &[usize]) -> Result<Self> {
        if values.len() != layout.registers.len() {
            return Err(Error::Dimension(format!(
                "{} register values for {} registers",
                values.len(),
                layout.registers.len()
            )));
        }
        let mut index = 0usize;
        for (&v, (name, dim)) in values.iter().zip(&layout.registers) {
            if v >= *dim {
                return Err(Error::Dimension(format!(
                    "value {v} out of range for register {name:?} of dimension {dim}"
                )));
            }
            index = index * dim + v;
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.total_dimension()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amplitudes })
    }

    /// Equal superposition of every basis state.
    pub fn uniform(layout: RegisterLayout) -> Self {
        let dim = layout.total_dimension();
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { layout, amplitudes: vec![amp; dim] }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let norm = self.norm_squared();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Invariant(format!("state has squared norm {norm}")));
        }
        Ok(())
    }

    /// `self ⊗ other`, with `self`'s registers most significant.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        let mut amplitudes = Vec::with_capacity(layout.total_dimension());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        Ok(Self { layout, amplitudes })
    }

    /// `(I ⊗ ⟨other|) self`, where `other` covers this state's least
    /// significant registers. Not renormalized: the squared norm of the
    /// result is the overlap weight, 1 exactly when `self = φ ⊗ other`.
    pub fn contract_last(&self, other: &Self) -> Result<Self> {
        let regs = self.layout.registers();
        let tail = other.layout.registers();
        if tail.len() >= regs.len() || regs[regs.len() - tail.len()..] != *tail {
            return Err(Error::Layout(
                "contracted registers must be the state's least significant ones".into(),
            ));
        }
        let layout = RegisterLayout {
            registers: regs[..regs.len() - tail.len()].to_vec(),
        };
        let amplitudes = self
            .amplitudes
            .chunks_exact(other.amplitudes.len())
            .map(|run| run.iter().zip(&other.amplitudes).map(|(a, b)| b.conj() * a).sum())
            .collect();
        Ok(Self { layout, amplitudes })
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        Self {
            layout: self.layout.clone(),
            amplitudes,
        }
    }

    /// Born probabilities of each value of one register.
    pub fn marginal_probabilities(&self, register: &str) -> Result<Vec<f64>> {
        let dim = self.layout.dimension(register)?;
        let stride = self.layout.stride(register)?;
        let mut probs = vec![0.0; dim];
        for block in self.amplitudes.chunks_exact(dim * stride) {
            for (p, run) in probs.iter_mut().zip(block.chunks_exact(stride)) {
                *p += run.iter().map(|a| a.norm_sqr()).sum::<f64>();
            }
        }
        Ok(probs)
    }

    /// Reduced density matrix of one register.
    pub fn reduced_density_matrix(&self, register: &str) -> Result<DMatrix<Complex64>> {
        let dim = self.layout.dimension(register)?;
        let stride = self.layout.stride(register)?;
        let block = dim * stride;
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for outer in (0..self.amplitudes.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for r in 0..dim {
                    let ar = self.amplitudes[base + r * stride];
                    if ar == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for c in 0..dim {
                        rho[(r, c)] += ar * self.amplitudes[base + c * stride].conj();
                    }
                }
            }
        }
        Ok(rho)
    }
}

/// `⟨φ|ρ|φ⟩`: fidelity of a (reduced) density matrix with a pure state.
pub fn fidelity_with_pure(rho: &DMatrix<Complex64>, pure: &QuantumState) -> Result<f64> {
    let phi = pure.amplitudes();
    if rho.nrows() != phi.len() || rho.ncols() != phi.len() {
        return Err(Error::Dimension(format!(
            "density matrix of size {} against a state of dimension {}",
            rho.nrows(),
            phi.len()
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..phi.len() {
        for c in 0..phi.len() {
            acc += phi[r].conj() * rho[(r, c)] * phi[c];
        }
    }
    Ok(acc.re)
}

/// `(1/√A′) Σ_b ω^b |b⟩` on a single register named `name`.
///
/// Incrementing `b` by `a` maps this state to `ω^{-a}` times itself, which
/// is what moves an oracle answer into a phase.
pub fn phase_eigenstate(name: &str, dim: usize, omega: Complex64) -> Result<QuantumState> {
    let layout = RegisterLayout::single(name, dim)?;
    if (omega.powu(dim as u32) - Complex64::new(1.0, 0.0)).norm() > 1e-9
        || (omega.norm() - 1.0).abs() > 1e-9
    {
        return Err(Error::Domain(format!("{omega} is not a {dim}-th root of unity")));
    }
    let scale = 1.0 / (dim as f64).sqrt();
    let mut amplitudes = Vec::with_capacity(dim);
    let mut phase = Complex64::new(1.0, 0.0);
    for _ in 0..dim {
        amplitudes.push(phase * scale);
        phase *= omega;
    }
    Ok(QuantumState { layout, amplitudes })
}

/// `e^{2πi/A}`.
pub fn root_of_unity(modulus: u32) -> Complex64 {
    if modulus == 2 {
        return Complex64::new(-1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI / modulus as f64)
}

/// Walsh-Hadamard transform `|x⟩ → 2^{-p/2} Σ_z (-1)^{x·z} |z⟩` on one
/// register of dimension `2^p`.
pub fn hadamard_all(state: &QuantumState, register: &str) -> Result<QuantumState> {
    let dim = state.layout.dimension(register)?;
    if !dim.is_power_of_two() {
        return Err(Error::Layout(format!(
            "Hadamard transform needs a power-of-two register, {register:?} has dimension {dim}"
        )));
    }
    let stride = state.layout.stride(register)?;
    let block = dim * stride;
    let mut amps = state.amplitudes.clone();
    for outer in (0..amps.len()).step_by(block) {
        let chunk = &mut amps[outer..outer + block];
        let mut h = 1;
        while h < dim {
            for start in (0..dim).step_by(2 * h) {
                for j in start..start + h {
                    let (lo, hi) = (j * stride, (j + h) * stride);
                    for t in 0..stride {
                        let a = chunk[lo + t];
                        let b = chunk[hi + t];
                        chunk[lo + t] = a + b;
                        chunk[hi + t] = a - b;
                    }
                }
            }
            h *= 2;
        }
    }
    let scale = 1.0 / (dim as f64).sqrt();
    for a in amps.iter_mut() {
        *a *= scale;
    }
    Ok(state.with_amplitudes(amps))
}

/// Fourier transform over (Z_A)^m, `|s⟩ → A^{-m/2} Σ_z ω_A^{s·z} |z⟩`, on a
/// register of dimension `A^m`. Applied one base-`A` digit at a time.
pub fn fourier_all(state: &QuantumState, register: &str, modulus: u32) -> Result<QuantumState> {
    let dim = state.layout.dimension(register)?;
    let a = modulus as usize;
    let digits = digit_count(dim, a).ok_or_else(|| {
        Error::Layout(format!(
            "register {register:?} of dimension {dim} is not a power of {modulus}"
        ))
    })?;
    let stride = state.layout.stride(register)?;
    let omega = root_of_unity(modulus);
    let scale = 1.0 / (a as f64).sqrt();
    let kernel: Vec<Complex64> = (0..a * a)
        .map(|rc| omega.powu(((rc / a) * (rc % a)) as u32) * scale)
        .collect();

    // Low digits have small blocks, so they are all transformed inside
    // cache-sized tiles before the remaining digits sweep the whole vector.
    let mut amps = state.amplitudes.clone();
    let mut scratch = Vec::new();
    let (mut tiled, mut tile) = (0, stride);
    while tiled < digits && tile * a <= FOURIER_TILE {
        tiled += 1;
        tile *= a;
    }
    for chunk in amps.chunks_exact_mut(tile) {
        let mut axis_stride = stride;
        for _ in 0..tiled {
            dft_pass(chunk, axis_stride, a, &kernel, &mut scratch);
            axis_stride *= a;
        }
    }
    let mut axis_stride = tile;
    for _ in tiled..digits {
        dft_pass(&mut amps, axis_stride, a, &kernel, &mut scratch);
        axis_stride *= a;
    }
    Ok(state.with_amplitudes(amps))
}

/// Elements per tile in [`fourier_all`].
const FOURIER_TILE: usize = 1 << 12;

/// One A-point DFT along the digit with stride `axis_stride`, on every
/// block of `chunk`.
fn dft_pass(
    chunk: &mut [Complex64],
    axis_stride: usize,
    a: usize,
    kernel: &[Complex64],
    scratch: &mut Vec<Complex64>,
) {
    for block in chunk.chunks_exact_mut(a * axis_stride) {
        scratch.clear();
        scratch.extend_from_slice(block);
        for (r, out) in block.chunks_exact_mut(axis_stride).enumerate() {
            let row = &kernel[r * a..(r + 1) * a];
            let mut inputs = scratch.chunks_exact(axis_stride).zip(row);
            let (first, k0) = inputs.next().expect("a >= 2");
            for (o, i) in out.iter_mut().zip(first) {
                *o = k0 * i;
            }
            for (input, k) in inputs {
                for (o, i) in out.iter_mut().zip(input) {
                    *o += k * i;
                }
            }
        }
    }
}

fn digit_count(dim: usize, base: usize) -> Option<u32> {
    if base < 2 {
        return None;
    }
    let (mut rest, mut digits) = (dim, 0);
    while rest > 1 {
        if rest % base != 0 {
            return None;
        }
        rest /= base;
        digits += 1;
    }
    Some(digits)
}

/// Most probable value of a register and its probability (ties go to the
/// smaller value).
pub fn measure_register(state: &QuantumState, register: &str) -> Result<(usize, f64)> {
    state.check_normalized()?;
    let probs = state.marginal_probabilities(register)?;
    let (outcome, &p) = probs
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (i, p)| match best {
            Some((_, bp)) if bp >= p => best,
            _ => Some((i, p)),
        })
        .expect("registers have dimension >= 2");
    Ok((outcome, p))
}

/// Draws a register value from the Born distribution.
pub fn sample_register<R: Rng>(
    state: &QuantumState,
    register: &str,
    rng: &mut R,
) -> Result<(usize, f64)> {
    state.check_normalized()?;
    let probs = state.marginal_probabilities(register)?;
    let mut u: f64 = rng.gen::<f64>() * probs.iter().sum::<f64>();
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            return Ok((i, p));
        }
        u -= p;
    }
    // Rounding left u just past the last nonzero bin.
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    Ok((last, probs[last]))
}

/// `⟨s1|s2⟩ = Σ conj(a1_i) a2_i`.
pub fn inner_product(s1: &QuantumState, s2: &QuantumState) -> Result<Complex64> {
    if s1.layout != s2.layout {
        return Err(Error::Dimension("states have different layouts".into()));
    }
    Ok(s1
        .amplitudes
        .iter()
        .zip(&s2.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Von Neumann entropy in bits of `ρ = Σ p_y |ψ_y⟩⟨ψ_y|`.
///
/// The nonzero spectrum of `ρ` equals that of the ensemble Gram matrix
/// `G_{yy'} = √(p_y p_y') ⟨ψ_y|ψ_y'⟩`, so whichever of the two is smaller is
/// diagonalized.
pub fn von_neumann_entropy(ensemble: &[(f64, QuantumState)]) -> Result<f64> {
    let Some((_, first)) = ensemble.first() else {
        return Err(Error::Domain("empty ensemble".into()));
    };
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > NORM_TOLERANCE || ensemble.iter().any(|(p, _)| *p < 0.0) {
        return Err(Error::Domain(format!("ensemble probabilities sum to {total}")));
    }
    if ensemble.iter().any(|(_, s)| s.layout != first.layout) {
        return Err(Error::Dimension("ensemble states have different layouts".into()));
    }
    let dim = first.layout.total_dimension();
    let k = ensemble.len();
    let matrix = if k <= dim {
        if k > MAX_ENTROPY_DIMENSION {
            return Err(Error::Resource(format!("ensemble of {k} states is too large")));
        }
        let weights: Vec<f64> = ensemble.iter().map(|(p, _)| p.sqrt()).collect();
        let mut gram = DMatrix::<Complex64>::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = inner_product(&ensemble[i].1, &ensemble[j].1)? * weights[i] * weights[j];
                gram[(i, j)] = v;
                gram[(j, i)] = v.conj();
            }
        }
        gram
    } else {
        if dim > MAX_ENTROPY_DIMENSION {
            return Err(Error::Resource(format!("density matrix of dimension {dim} is too large")));
        }
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for (p, s) in ensemble {
            for r in 0..dim {
                let ar = s.amplitudes[r] * *p;
                for c in 0..dim {
                    rho[(r, c)] += ar * s.amplitudes[c].conj();
                }
            }
        }
        rho
    };
    let eigen = SymmetricEigen::new(matrix);
    Ok(eigen
        .eigenvalues
        .iter()
        .filter(|&&l| l > EIGENVALUE_FLOOR)
        .map(|&l| -l * l.log2())
        .sum())
}
