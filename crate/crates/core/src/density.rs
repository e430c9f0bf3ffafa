// Copyright 2026 The spinenc Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Density-matrix execution with two-unit depolarizing noise.
//!
//! `rho` is stored as a vector on a doubled register: row digits occupy units `n..2n`,
//! column digits units `0..n`. A gate `U` acts as `U` on the rows and `conj(U)` on the columns.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{expand_into, Circuit, Gate, Register};
use crate::error::{Error, Result};
use crate::statevector::{
    apply_cry, apply_cx, apply_local_unitary, apply_pauli_rotation, apply_x, level_swap,
    qudit_rotation_unitary,
};

/// Largest Hilbert-space dimension (not squared) handled here.
pub const MAX_DENSITY_DIM: usize = 4096;

/// Two-unit depolarizing strength applied after every entangling gate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub eps2q: f64,
    pub enabled: bool,
}

impl NoiseConfig {
    pub fn new(eps2q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps2q) {
            return Err(Error::validation("noise strength must lie in [0, 1]"));
        }
        Ok(Self {
            eps2q,
            enabled: eps2q > 0.0,
        })
    }

    pub fn off() -> Self {
        Self {
            eps2q: 0.0,
            enabled: false,
        }
    }

    /// Strength for a gate touching `weight` units.
    ///
    /// Qubit rotations of weight `w > 2` count as `2w - 3` two-qubit gates.
    fn strength(&self, weight: usize, qubits: bool) -> f64 {
        if !self.enabled || weight < 2 {
            return 0.0;
        }
        if qubits && weight > 2 {
            1.0 - (1.0 - self.eps2q).powi(2 * weight as i32 - 3)
        } else {
            self.eps2q
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    register: Register,
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|index><index|`.
    pub fn pure_basis(register: Register, index: usize) -> Result<Self> {
        let dim = match register.dim() {
            Some(d) if d <= MAX_DENSITY_DIM => d,
            other => {
                return Err(Error::resource(
                    "density-matrix dimension",
                    other.map(|d| d as u64).unwrap_or(u64::MAX),
                    MAX_DENSITY_DIM as u64,
                ))
            }
        };
        if index >= dim {
            return Err(Error::validation("initial basis index outside register"));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        data[index * dim + index] = Complex64::new(1.0, 0.0);
        Ok(Self { register, dim, data })
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Diagonal, clipped at zero.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re.max(0.0)).collect()
    }

    pub fn purity(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Applies `g` and then, for entangling gates, the depolarizing channel on its support.
    pub fn apply_gate(&mut self, g: &Gate, noise: NoiseConfig) {
        if let Gate::DickePrep { .. } = g {
            let mut v = Vec::new();
            expand_into(g, &mut v);
            for h in &v {
                self.apply_gate(h, noise);
            }
            return;
        }
        let n = self.register.n_units();
        let qubits = matches!(self.register, Register::Qubits(_));
        match g {
            Gate::PauliRotation { angle, string } => {
                let rows = string.embed(2 * n, n).expect("doubled width checked");
                let cols = string.embed(2 * n, 0).expect("doubled width checked");
                apply_pauli_rotation(&mut self.data, &rows, *angle);
                // conj(exp(-i a P)) = exp(-i a' P) with a' = -a (-1)^{n_y}
                let sign = if string.n_y() % 2 == 0 { -1.0 } else { 1.0 };
                apply_pauli_rotation(&mut self.data, &cols, sign * angle);
            }
            Gate::Cx { control, target } => {
                apply_cx(&mut self.data, control + n, target + n);
                apply_cx(&mut self.data, *control, *target);
            }
            Gate::CRy {
                control,
                target,
                theta,
            } => {
                apply_cry(&mut self.data, control + n, target + n, *theta);
                apply_cry(&mut self.data, *control, *target, *theta);
            }
            Gate::BitFlip { qubit } => {
                apply_x(&mut self.data, qubit + n);
                apply_x(&mut self.data, *qubit);
            }
            Gate::QuditRotation { angle, string } => {
                if let Some((sites, u)) = qudit_rotation_unitary(string, *angle) {
                    self.apply_local(&sites, &u);
                }
            }
            Gate::LevelSet { site, level } => {
                let u = level_swap(self.register.levels(), *level);
                self.apply_local(&[*site], &u);
            }
            Gate::DickePrep { .. } => unreachable!(),
        }
        let units = g.units();
        let eps = noise.strength(units.len(), qubits);
        if eps > 0.0 {
            self.depolarize(&units, eps);
        }
    }

    fn apply_local(&mut self, sites: &[usize], u: &crate::spin::CMatrix) {
        let n = self.register.n_units();
        let levels = self.register.levels();
        let rows: Vec<usize> = sites.iter().map(|s| s + n).collect();
        apply_local_unitary(&mut self.data, levels, &rows, u);
        apply_local_unitary(&mut self.data, levels, sites, &u.map(|z| z.conj()));
    }

    /// `rho <- (1 - eps) rho + eps Tr_A(rho) (x) I_A / d_A`.
    pub fn depolarize(&mut self, units: &[usize], eps: f64) {
        let levels = self.register.levels();
        let stride = |u: usize| levels.pow(u as u32);
        let sub: usize = levels.pow(units.len() as u32);
        // offsets of every A-configuration inside a single index
        let offsets: Vec<usize> = (0..sub)
            .map(|mut a| {
                let mut off = 0;
                for &u in units {
                    off += (a % levels) * stride(u);
                    a /= levels;
                }
                off
            })
            .collect();
        let in_a = |idx: usize| units.iter().all(|&u| (idx / stride(u)).is_multiple_of(levels));
        let rests: Vec<usize> = (0..self.dim).filter(|&i| in_a(i)).collect();
        let keep = 1.0 - eps;
        let mix = eps / sub as f64;
        let dim = self.dim;
        for &r in &rests {
            for &c in &rests {
                let tr: Complex64 = offsets.iter().map(|&o| self.data[(r + o) * dim + c + o]).sum();
                for &or in &offsets {
                    for &oc in &offsets {
                        let k = (r + or) * dim + c + oc;
                        self.data[k] *= keep;
                        if or == oc {
                            self.data[k] += tr * mix;
                        }
                    }
                }
            }
        }
    }
}

/// Runs `circuit` from basis state `index` with noise after every entangling gate.
pub fn run_density_from(circuit: &Circuit, index: usize, noise: NoiseConfig) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::pure_basis(circuit.register(), index)?;
    for g in circuit.gates() {
        rho.apply_gate(g, noise);
    }
    Ok(rho)
}

/// Qudit run from per-site initial levels (site 0 first).
pub fn run_density_qudit(circuit: &Circuit, levels: &[usize], noise: NoiseConfig) -> Result<DensityMatrix> {
    let reg = circuit.register();
    let d = match reg {
        Register::Qudits { d, .. } => d,
        Register::Qubits(_) => return Err(Error::validation("qudit runner needs a qudit register")),
    };
    if levels.len() != reg.n_units() || levels.iter().any(|&l| l >= d) {
        return Err(Error::validation("initial levels do not fit the register"));
    }
    let idx = levels.iter().rev().fold(0, |acc, &l| acc * d + l);
    run_density_from(circuit, idx, noise)
}

/// Qubit run from a bitstring.
pub fn run_density_qubit(
    circuit: &Circuit,
    initial: &crate::encoding::Bitstring,
    noise: NoiseConfig,
) -> Result<DensityMatrix> {
    if initial.len() != circuit.register().n_units() {
        return Err(Error::validation("initial bitstring width differs from register"));
    }
    run_density_from(circuit, initial.value() as usize, noise)
}
