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

//! Dense state-vector execution.

use num_complex::Complex64;

use crate::circuit::{expand_into, Circuit, Gate, Register};
use crate::encoding::Bitstring;
use crate::error::{Error, Result};
use crate::gellmann::{gell_mann, GellMannString};
use crate::pauli::PauliString;
use crate::spin::CMatrix;

/// Widest qubit register the state-vector runner accepts.
pub const MAX_STATEVECTOR_QUBITS: usize = 21;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `psi <- exp(-i angle P) psi`.
pub fn apply_pauli_rotation(psi: &mut [Complex64], p: &PauliString, angle: f64) {
    let (s, c) = angle.sin_cos();
    let x = p.x_mask() as usize;
    if x == 0 {
        let z = p.z_mask() as usize;
        let plus = Complex64::new(c, -s);
        let minus = Complex64::new(c, s);
        for (i, a) in psi.iter_mut().enumerate() {
            *a *= if (i & z).count_ones().is_multiple_of(2) {
                plus
            } else {
                minus
            };
        }
        return;
    }
    let mis = Complex64::new(0.0, -s);
    let hi = 1usize << (usize::BITS - 1 - x.leading_zeros());
    for i in 0..psi.len() {
        if i & hi != 0 {
            continue;
        }
        let j = i ^ x;
        let (ci, _) = p.act(i);
        let (cj, _) = p.act(j);
        let a = psi[i];
        let b = psi[j];
        psi[i] = a * c + mis * cj * b;
        psi[j] = b * c + mis * ci * a;
    }
}

pub(crate) fn apply_cx(psi: &mut [Complex64], control: usize, target: usize) {
    let cm = 1usize << control;
    let tm = 1usize << target;
    for i in 0..psi.len() {
        if i & cm != 0 && i & tm == 0 {
            psi.swap(i, i | tm);
        }
    }
}

pub(crate) fn apply_cry(psi: &mut [Complex64], control: usize, target: usize, theta: f64) {
    let cm = 1usize << control;
    let tm = 1usize << target;
    let (s, c) = (theta / 2.0).sin_cos();
    for i in 0..psi.len() {
        if i & cm != 0 && i & tm == 0 {
            let a = psi[i];
            let b = psi[i | tm];
            psi[i] = a * c - b * s;
            psi[i | tm] = a * s + b * c;
        }
    }
}

pub(crate) fn apply_x(psi: &mut [Complex64], qubit: usize) {
    let m = 1usize << qubit;
    for i in 0..psi.len() {
        if i & m == 0 {
            psi.swap(i, i | m);
        }
    }
}

/// Applies `u` to the listed units of a register with `levels` levels per unit.
///
/// `sites[0]` is the least significant digit of the local index of `u`.
pub fn apply_local_unitary(psi: &mut [Complex64], levels: usize, sites: &[usize], u: &CMatrix) {
    let strides: Vec<usize> = sites.iter().map(|&s| levels.pow(s as u32)).collect();
    let local = u.nrows();
    let offsets: Vec<usize> = (0..local)
        .map(|mut l| {
            let mut off = 0;
            for st in &strides {
                off += (l % levels) * st;
                l /= levels;
            }
            off
        })
        .collect();
    let mut buf = vec![ZERO; local];
    for base in 0..psi.len() {
        if strides.iter().any(|&st| (base / st) % levels != 0) {
            continue;
        }
        for (b, off) in buf.iter_mut().zip(&offsets) {
            *b = psi[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (cidx, b) in buf.iter().enumerate() {
                acc += u[(r, cidx)] * b;
            }
            psi[base + off] = acc;
        }
    }
}

/// Sites and local unitary of `exp(-i angle Gamma)`; `None` when `Gamma` is a multiple of the identity.
pub fn qudit_rotation_unitary(string: &GellMannString, angle: f64) -> Option<(Vec<usize>, CMatrix)> {
    let d = string.d();
    let sites = string.support();
    if sites.is_empty() {
        return None;
    }
    let idle = string.n_sites() - sites.len();
    let scale = (2.0 / d as f64).sqrt().powi(idle as i32);
    let mut l = CMatrix::from_element(1, 1, Complex64::new(scale, 0.0));
    for &s in sites.iter().rev() {
        l = l.kronecker(&gell_mann(d, string.index(s)).expect("validated index"));
    }
    Some((sites, crate::spin::unitary_exp(&l, angle)))
}

/// Transposition of levels `0` and `level`.
pub(crate) fn level_swap(d: usize, level: usize) -> CMatrix {
    let mut m = CMatrix::identity(d, d);
    if level != 0 {
        m[(0, 0)] = ZERO;
        m[(level, level)] = ZERO;
        m[(0, level)] = Complex64::new(1.0, 0.0);
        m[(level, 0)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Applies one gate to a state of the given register.
pub fn apply_gate(reg: Register, psi: &mut [Complex64], g: &Gate) {
    match g {
        Gate::PauliRotation { angle, string } => apply_pauli_rotation(psi, string, *angle),
        Gate::Cx { control, target } => apply_cx(psi, *control, *target),
        Gate::CRy {
            control,
            target,
            theta,
        } => apply_cry(psi, *control, *target, *theta),
        Gate::BitFlip { qubit } => apply_x(psi, *qubit),
        Gate::DickePrep { .. } => {
            let mut v = Vec::new();
            expand_into(g, &mut v);
            for h in &v {
                apply_gate(reg, psi, h);
            }
        }
        Gate::QuditRotation { angle, string } => {
            if let Some((sites, u)) = qudit_rotation_unitary(string, *angle) {
                apply_local_unitary(psi, reg.levels(), &sites, &u);
            }
        }
        Gate::LevelSet { site, level } => {
            apply_local_unitary(psi, reg.levels(), &[*site], &level_swap(reg.levels(), *level))
        }
    }
}

fn check_width(reg: Register) -> Result<usize> {
    let cap = 1usize << MAX_STATEVECTOR_QUBITS;
    match reg.dim() {
        Some(d) if d <= cap => Ok(d),
        other => Err(Error::resource(
            "state-vector dimension",
            other.map(|d| d as u64).unwrap_or(u64::MAX),
            cap as u64,
        )),
    }
}

/// Applies every gate of `circuit` to `psi` in order.
pub fn apply_circuit(circuit: &Circuit, psi: &mut [Complex64]) -> Result<()> {
    let dim = check_width(circuit.register())?;
    if psi.len() != dim {
        return Err(Error::validation("state length differs from register dimension"));
    }
    for g in circuit.gates() {
        apply_gate(circuit.register(), psi, g);
    }
    Ok(())
}

/// Runs `circuit` from the computational basis state with the given index.
pub fn run_statevector_from(circuit: &Circuit, index: usize) -> Result<Vec<Complex64>> {
    let dim = check_width(circuit.register())?;
    if index >= dim {
        return Err(Error::validation("initial basis index outside register"));
    }
    let mut psi = vec![ZERO; dim];
    psi[index] = Complex64::new(1.0, 0.0);
    apply_circuit(circuit, &mut psi)?;
    Ok(psi)
}

/// Runs a qubit circuit from a computational basis state.
pub fn run_statevector(circuit: &Circuit, initial: &Bitstring) -> Result<Vec<Complex64>> {
    if initial.len() != circuit.register().n_units() {
        return Err(Error::validation("initial bitstring width differs from register"));
    }
    run_statevector_from(circuit, initial.value() as usize)
}

/// Squared moduli.
pub fn probabilities(psi: &[Complex64]) -> Vec<f64> {
    psi.iter().map(|a| a.norm_sqr()).collect()
}
