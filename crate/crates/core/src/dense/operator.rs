use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Probabilities below this are treated as zero.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Dense real density operator on `n_qubits` qubits, row-major.
///
/// Qubit `q` is bit `n_qubits − 1 − q` of a computational index, so qubit 0
/// is the most significant bit. Every circuit in this crate (H, CNOT, X, Z,
/// Z-measurements, and Y only under conjugation) maps real operators to real
/// operators.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    n_qubits: usize,
    data: Vec<f64>,
}

/// One outcome of a projective Z measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    /// Measured bits in the order the qubits were requested.
    pub outcome: Vec<u8>,
    pub probability: f64,
    /// Normalized post-measurement state.
    pub post_state: DensityOperator,
}

impl MeasurementRecord {
    /// Outcome bits packed with the first measured qubit as the high bit.
    pub fn outcome_bits(&self) -> usize {
        self.outcome
            .iter()
            .fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl DensityOperator {
    pub fn new(n_qubits: usize, data: Vec<f64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(data.len(), dim * dim));
        }
        Ok(Self { n_qubits, data })
    }

    pub(crate) fn zeros(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            data: vec![0.0; dim * dim],
        }
    }

    /// `|v⟩⟨v|` for a real amplitude vector of power-of-two length.
    pub fn from_pure(amplitudes: &[f64]) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(dim, dim.next_power_of_two()));
        }
        let mut data = vec![0.0; dim * dim];
        for (i, &a) in amplitudes.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in amplitudes.iter().enumerate() {
                data[i * dim + j] = a * b;
            }
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            data,
        })
    }

    /// `|bits⟩⟨bits|` for a computational basis index.
    pub fn basis_projector(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch(index, dim));
        }
        let mut op = Self::zeros(n_qubits);
        op.data[index * dim + index] = 1.0;
        Ok(op)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut op = Self::zeros(n_qubits);
        for i in 0..dim {
            op.data[i * dim + i] = 1.0 / dim as f64;
        }
        op
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim() + col]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// Largest entrywise asymmetry `|ρ_ij − ρ_ji|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in i + 1..dim {
                worst = worst.max((self.data[i * dim + j] - self.data[j * dim + i]).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let m = DMatrix::from_row_slice(dim, dim, &self.data);
        let sym = (&m + m.transpose()) * 0.5;
        sym.symmetric_eigenvalues().min()
    }

    /// Symmetric, unit trace and positive semidefinite within `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
            && (self.trace() - 1.0).abs() <= tol
            && self.min_eigenvalue() >= -tol
    }

    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `self ⊗ other`; the qubits of `self` come first.
    pub fn kron(&self, other: &DensityOperator) -> DensityOperator {
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut data = vec![0.0; dim * dim];
        for i1 in 0..da {
            for j1 in 0..da {
                let a = self.data[i1 * da + j1];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..db {
                    let row = (i1 * db + i2) * dim + j1 * db;
                    let src = &other.data[i2 * db..(i2 + 1) * db];
                    for (dst, &b) in data[row..row + db].iter_mut().zip(src) {
                        *dst = a * b;
                    }
                }
            }
        }
        DensityOperator {
            n_qubits: self.n_qubits + other.n_qubits,
            data,
        }
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(1 << (self.n_qubits - 1 - qubit))
    }

    pub fn apply_hadamard(&self, qubit: usize) -> Result<Self> {
        let mut out = self.clone();
        out.hadamard_mut(qubit)?;
        Ok(out)
    }

    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<Self> {
        let mut out = self.clone();
        out.cnot_mut(control, target)?;
        Ok(out)
    }

    pub fn apply_x(&self, qubit: usize) -> Result<Self> {
        let mut out = self.clone();
        out.x_mut(qubit)?;
        Ok(out)
    }

    pub fn apply_z(&self, qubit: usize) -> Result<Self> {
        let mut out = self.clone();
        out.z_mut(qubit)?;
        Ok(out)
    }

    /// `YρY†`, which equals `(XZ)ρ(XZ)ᵀ` and stays real.
    pub fn conjugate_y(&self, qubit: usize) -> Result<Self> {
        let mut out = self.clone();
        out.z_mut(qubit)?;
        out.x_mut(qubit)?;
        Ok(out)
    }

    pub(crate) fn hadamard_mut(&mut self, qubit: usize) -> Result<()> {
        let m = self.mask(qubit)?;
        let dim = self.dim();
        let h = FRAC_1_SQRT_2;
        // rows
        for i in 0..dim {
            if i & m != 0 {
                continue;
            }
            let j = i | m;
            let (lo, hi) = self.data.split_at_mut(j * dim);
            let row_i = &mut lo[i * dim..(i + 1) * dim];
            let row_j = &mut hi[..dim];
            for (a, b) in row_i.iter_mut().zip(row_j.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = h * (x + y);
                *b = h * (x - y);
            }
        }
        // columns
        for row in self.data.chunks_exact_mut(dim) {
            for c in 0..dim {
                if c & m != 0 {
                    continue;
                }
                let (x, y) = (row[c], row[c | m]);
                row[c] = h * (x + y);
                row[c | m] = h * (x - y);
            }
        }
        Ok(())
    }

    fn permute_mut(&mut self, perm: impl Fn(usize) -> usize) {
        let dim = self.dim();
        let p: Vec<usize> = (0..dim).map(perm).collect();
        let mut out = vec![0.0; dim * dim];
        for i in 0..dim {
            let src = &self.data[p[i] * dim..(p[i] + 1) * dim];
            let dst = &mut out[i * dim..(i + 1) * dim];
            for j in 0..dim {
                dst[j] = src[p[j]];
            }
        }
        self.data = out;
    }

    pub(crate) fn cnot_mut(&mut self, control: usize, target: usize) -> Result<()> {
        let c = self.mask(control)?;
        let t = self.mask(target)?;
        if c == t {
            return Err(Error::DuplicateQubit(control));
        }
        self.permute_mut(|i| if i & c != 0 { i ^ t } else { i });
        Ok(())
    }

    pub(crate) fn x_mut(&mut self, qubit: usize) -> Result<()> {
        let m = self.mask(qubit)?;
        self.permute_mut(|i| i ^ m);
        Ok(())
    }

    pub(crate) fn z_mut(&mut self, qubit: usize) -> Result<()> {
        let m = self.mask(qubit)?;
        let dim = self.dim();
        for (i, row) in self.data.chunks_exact_mut(dim).enumerate() {
            let si = i & m != 0;
            for (j, v) in row.iter_mut().enumerate() {
                if si != (j & m != 0) {
                    *v = -*v;
                }
            }
        }
        Ok(())
    }

    pub(crate) fn add_scaled(&mut self, other: &DensityOperator, factor: f64) {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
    }

    pub(crate) fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    fn check_distinct(&self, qubits: &[usize]) -> Result<()> {
        let mut seen = 0usize;
        for &q in qubits {
            let m = self.mask(q)?;
            if seen & m != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            seen |= m;
        }
        Ok(())
    }

    /// Projective Z measurement of `qubits`; post states live on the full register.
    pub fn measure_z(&self, qubits: &[usize]) -> Result<Vec<MeasurementRecord>> {
        self.check_distinct(qubits)?;
        let dim = self.dim();
        let layout = Layout::new(self.n_qubits, qubits);
        let mut records = Vec::new();
        for outcome in 0..1usize << qubits.len() {
            let pattern = layout.measured[outcome];
            let select = |i: usize| i & layout.measured_mask == pattern;
            let p: f64 = (0..dim)
                .filter(|&i| select(i))
                .map(|i| self.get(i, i))
                .sum();
            if p < ZERO_PROBABILITY {
                continue;
            }
            let mut post = Self::zeros(self.n_qubits);
            for i in (0..dim).filter(|&i| select(i)) {
                for j in (0..dim).filter(|&j| select(j)) {
                    post.data[i * dim + j] = self.data[i * dim + j] / p;
                }
            }
            records.push(MeasurementRecord {
                outcome: bits_of(outcome, qubits.len()),
                probability: p,
                post_state: post,
            });
        }
        Ok(records)
    }

    /// Z measurement of `qubits` followed by discarding them; post states
    /// live on the remaining qubits in ascending order.
    pub fn measure_and_discard(&self, qubits: &[usize]) -> Result<Vec<MeasurementRecord>> {
        self.check_distinct(qubits)?;
        let layout = Layout::new(self.n_qubits, qubits);
        let rest_qubits = self.n_qubits - qubits.len();
        let rest_dim = 1usize << rest_qubits;
        let dim = self.dim();
        let mut records = Vec::new();
        for outcome in 0..1usize << qubits.len() {
            let pattern = layout.measured[outcome];
            let mut block = vec![0.0; rest_dim * rest_dim];
            let mut p = 0.0;
            for (r, &ri) in layout.rest.iter().enumerate() {
                let i = ri | pattern;
                let row = &self.data[i * dim..(i + 1) * dim];
                let dst = &mut block[r * rest_dim..(r + 1) * rest_dim];
                for (d, &cj) in dst.iter_mut().zip(&layout.rest) {
                    *d = row[cj | pattern];
                }
                p += row[i];
            }
            if p < ZERO_PROBABILITY {
                continue;
            }
            block.iter_mut().for_each(|v| *v /= p);
            records.push(MeasurementRecord {
                outcome: bits_of(outcome, qubits.len()),
                probability: p,
                post_state: DensityOperator {
                    n_qubits: rest_qubits,
                    data: block,
                },
            });
        }
        Ok(records)
    }

    /// Reduced operator on `keep`, whose order becomes the output qubit order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::QubitIndex {
                index: 0,
                n_qubits: 0,
            });
        }
        self.check_distinct(keep)?;
        let traced: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        let keep_index = scatter_table(self.n_qubits, keep);
        let trace_index = scatter_table(self.n_qubits, &traced);
        let out_dim = 1usize << keep.len();
        let dim = self.dim();
        let mut data = vec![0.0; out_dim * out_dim];
        for (i, &ki) in keep_index.iter().enumerate() {
            for (j, &kj) in keep_index.iter().enumerate() {
                data[i * out_dim + j] = trace_index
                    .iter()
                    .map(|&t| self.data[(ki | t) * dim + (kj | t)])
                    .sum();
            }
        }
        Ok(Self {
            n_qubits: keep.len(),
            data,
        })
    }
}

fn bits_of(value: usize, width: usize) -> Vec<u8> {
    (0..width).rev().map(|b| ((value >> b) & 1) as u8).collect()
}

/// `table[v]` places the bits of `v` (first listed qubit = high bit) onto the
/// listed qubit positions of an `n_qubits` register.
fn scatter_table(n_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let width = qubits.len();
    (0..1usize << width)
        .map(|v| {
            qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
                let bit = (v >> (width - 1 - pos)) & 1;
                acc | (bit << (n_qubits - 1 - q))
            })
        })
        .collect()
}

struct Layout {
    measured_mask: usize,
    measured: Vec<usize>,
    rest: Vec<usize>,
}

impl Layout {
    fn new(n_qubits: usize, measured: &[usize]) -> Self {
        let rest_qubits: Vec<usize> = (0..n_qubits).filter(|q| !measured.contains(q)).collect();
        let measured_mask = measured
            .iter()
            .fold(0, |acc, &q| acc | 1 << (n_qubits - 1 - q));
        Self {
            measured_mask,
            measured: scatter_table(n_qubits, measured),
            rest: scatter_table(n_qubits, &rest_qubits),
        }
    }
}
