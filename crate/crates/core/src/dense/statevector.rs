//! Pure-state companion of [`super::DensityOperator`], used to propagate
//! individual label pairs through the protocol circuits.

use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone)]
pub(crate) struct StateVector {
    n_qubits: usize,
    amps: Vec<f64>,
}

impl StateVector {
    pub fn kron(a: &[f64], b: &[f64]) -> Self {
        let mut amps = vec![0.0; a.len() * b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                amps[i * b.len() + j] = x * y;
            }
        }
        Self {
            n_qubits: amps.len().trailing_zeros() as usize,
            amps,
        }
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    pub fn hadamard(&mut self, qubit: usize) {
        let m = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (x, y) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = FRAC_1_SQRT_2 * (x + y);
                self.amps[i | m] = FRAC_1_SQRT_2 * (x - y);
            }
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (self.mask(control), self.mask(target));
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub fn amps(&self) -> &[f64] {
        &self.amps
    }
}
