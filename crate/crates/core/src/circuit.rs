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

//! Gates, circuits and first-order Trotter circuits.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{dicke_gates, EncodingKind, EncodingLayout};
use crate::error::{Error, Result};
use crate::gellmann::GellMannString;
use crate::hamiltonian::HamiltonianSum;
use crate::pauli::PauliString;
use crate::spin::{CMatrix, LatticeBasisState};

/// Shape of the register a circuit acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Register {
    Qubits(usize),
    Qudits { n: usize, d: usize },
}

impl Register {
    pub fn n_units(&self) -> usize {
        match *self {
            Register::Qubits(n) => n,
            Register::Qudits { n, .. } => n,
        }
    }

    pub fn levels(&self) -> usize {
        match *self {
            Register::Qubits(_) => 2,
            Register::Qudits { d, .. } => d,
        }
    }

    /// Hilbert space dimension, `None` on overflow.
    pub fn dim(&self) -> Option<usize> {
        self.levels().checked_pow(self.n_units() as u32)
    }
}

/// One circuit instruction.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    /// `exp(-i angle P)`.
    PauliRotation {
        angle: f64,
        string: PauliString,
    },
    /// `exp(-i angle Gamma)` with `Gamma` the full Gell-Mann string.
    QuditRotation {
        angle: f64,
        string: GellMannString,
    },
    /// Dicke unitary (or its inverse) on the `n_qubits` qubits starting at `first`.
    DickePrep {
        site: usize,
        first: usize,
        n_qubits: usize,
        inverse: bool,
    },
    BitFlip {
        qubit: usize,
    },
    /// Swaps levels `0` and `level` of a qudit; prepares `level` from `0`.
    LevelSet {
        site: usize,
        level: usize,
    },
    Cx {
        control: usize,
        target: usize,
    },
    /// Controlled `R_Y(theta) = exp(-i theta Y / 2)`.
    CRy {
        control: usize,
        target: usize,
        theta: f64,
    },
}

impl Gate {
    /// Units the gate touches, ascending.
    pub fn units(&self) -> Vec<usize> {
        let mut v = match self {
            Gate::PauliRotation { string, .. } => string.support(),
            Gate::QuditRotation { string, .. } => string.support(),
            Gate::DickePrep { first, n_qubits, .. } => (*first..first + n_qubits).collect(),
            Gate::BitFlip { qubit } => vec![*qubit],
            Gate::LevelSet { site, .. } => vec![*site],
            Gate::Cx { control, target } | Gate::CRy { control, target, .. } => {
                vec![*control, *target]
            }
        };
        v.sort_unstable();
        v
    }

    /// Inverse gate.
    pub fn inverse(&self) -> Gate {
        match self.clone() {
            Gate::PauliRotation { angle, string } => Gate::PauliRotation {
                angle: -angle,
                string,
            },
            Gate::QuditRotation { angle, string } => Gate::QuditRotation {
                angle: -angle,
                string,
            },
            Gate::DickePrep {
                site,
                first,
                n_qubits,
                inverse,
            } => Gate::DickePrep {
                site,
                first,
                n_qubits,
                inverse: !inverse,
            },
            Gate::CRy {
                control,
                target,
                theta,
            } => Gate::CRy {
                control,
                target,
                theta: -theta,
            },
            g => g,
        }
    }

    fn check(&self, reg: Register) -> Result<()> {
        let qubit_only = !matches!(self, Gate::QuditRotation { .. } | Gate::LevelSet { .. });
        match (reg, qubit_only) {
            (Register::Qubits(_), false) => return Err(Error::validation("qudit gate on a qubit register")),
            (Register::Qudits { .. }, true) => {
                return Err(Error::validation("qubit gate on a qudit register"))
            }
            _ => {}
        }
        match self {
            Gate::PauliRotation { string, .. } if string.n_qubits() != reg.n_units() => {
                return Err(Error::validation("Pauli string width differs from register"))
            }
            Gate::QuditRotation { string, .. }
                if string.n_sites() != reg.n_units() || string.d() != reg.levels() =>
            {
                return Err(Error::validation("Gell-Mann string shape differs from register"))
            }
            Gate::LevelSet { level, .. } if *level >= reg.levels() => {
                return Err(Error::validation("level outside qudit"))
            }
            Gate::Cx { control, target } | Gate::CRy { control, target, .. } if control == target => {
                return Err(Error::validation("control equals target"))
            }
            _ => {}
        }
        if self.units().iter().any(|&u| u >= reg.n_units()) {
            return Err(Error::validation("gate addresses a unit outside the register"));
        }
        Ok(())
    }

    /// One line of the text dump.
    pub fn dump_line(&self) -> String {
        match self {
            Gate::PauliRotation { angle, string } => format!("ROT {angle} {string}"),
            Gate::QuditRotation { angle, string } => format!("QROT {angle} {string}"),
            Gate::DickePrep { site, inverse, .. } => {
                format!("DICKE{} {site}", if *inverse { "_INV" } else { "" })
            }
            Gate::BitFlip { qubit } => format!("X {qubit}"),
            Gate::LevelSet { site, level } => format!("LEVEL {site} {level}"),
            Gate::Cx { control, target } => format!("CX {control} {target}"),
            Gate::CRy {
                control,
                target,
                theta,
            } => format!("CRY {theta} {control} {target}"),
        }
    }
}

/// Ordered gate list on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    register: Register,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(register: Register, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.check(register)?;
        }
        Ok(Self { register, gates })
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.register)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Replaces Dicke blocks by their CNOT / controlled-`R_Y` gates.
    pub fn expand(&self) -> Circuit {
        let mut out = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            expand_into(g, &mut out);
        }
        Circuit {
            register: self.register,
            gates: out,
        }
    }

    /// `ROT angle STRING` style listing, one gate per line.
    pub fn dump_text(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            let _ = writeln!(s, "{}", g.dump_line());
        }
        s
    }

    /// Dense unitary, for registers up to 12 qubits or dimension 4096.
    pub fn unitary(&self) -> Result<CMatrix> {
        let dim = self.register.dim().unwrap_or(usize::MAX);
        if dim > 4096 {
            return Err(Error::resource("dense circuit unitary", dim as u64, 4096));
        }
        let mut u = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut psi = vec![Complex64::new(0.0, 0.0); dim];
            psi[col] = Complex64::new(1.0, 0.0);
            crate::statevector::apply_circuit(self, &mut psi)?;
            for (row, a) in psi.into_iter().enumerate() {
                u[(row, col)] = a;
            }
        }
        Ok(u)
    }
}

/// Primitive gates of a Dicke block.
pub(crate) fn expand_into(g: &Gate, out: &mut Vec<Gate>) {
    match g {
        Gate::DickePrep {
            first,
            n_qubits,
            inverse,
            ..
        } => {
            let spin = crate::spin::Spin::new(*n_qubits as u32).expect("nonzero width");
            let shifted = dicke_gates(spin).into_iter().map(|g| shift(g, *first));
            if *inverse {
                let mut v: Vec<Gate> = shifted.map(|g| g.inverse()).collect();
                v.reverse();
                out.extend(v);
            } else {
                out.extend(shifted);
            }
        }
        other => out.push(other.clone()),
    }
}

fn shift(g: Gate, by: usize) -> Gate {
    match g {
        Gate::Cx { control, target } => Gate::Cx {
            control: control + by,
            target: target + by,
        },
        Gate::CRy {
            control,
            target,
            theta,
        } => Gate::CRy {
            control: control + by,
            target: target + by,
            theta,
        },
        other => other,
    }
}

/// Step size and step count of a first-order Trotter evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrotterPlan {
    dtau: f64,
    n_steps: usize,
}

impl TrotterPlan {
    pub fn new(dtau: f64, n_steps: usize) -> Result<Self> {
        if !(dtau.is_finite() && dtau > 0.0) {
            return Err(Error::validation(format!(
                "time step must be positive, got {dtau}"
            )));
        }
        Ok(Self { dtau, n_steps })
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Final time `n_steps * dtau`.
    pub fn time(&self) -> f64 {
        self.dtau * self.n_steps as f64
    }
}

/// Trotter circuit kept in three parts so runners can snapshot after every step.
#[derive(Clone, Debug, PartialEq)]
pub struct TrotterCircuit {
    pub register: Register,
    /// Dicke dressing applied once before the first step.
    pub prep: Vec<Gate>,
    /// Gates of a single step, in Hamiltonian term order.
    pub step: Vec<Gate>,
    /// Inverse dressing applied once before measurement.
    pub finish: Vec<Gate>,
    pub n_steps: usize,
}

impl TrotterCircuit {
    pub fn to_circuit(&self) -> Circuit {
        let mut gates = self.prep.clone();
        for _ in 0..self.n_steps {
            gates.extend(self.step.iter().cloned());
        }
        gates.extend(self.finish.iter().cloned());
        Circuit {
            register: self.register,
            gates,
        }
    }
}

/// Splits a Trotter evolution into dressing, one step and inverse dressing.
pub fn trotter_parts(
    h: &HamiltonianSum,
    layout: &EncodingLayout,
    plan: TrotterPlan,
    dicke_dressing: bool,
) -> Result<TrotterCircuit> {
    let register = layout.register();
    if dicke_dressing && layout.kind() != EncodingKind::Dicke {
        return Err(Error::validation(format!(
            "Dicke dressing requested for a {} layout",
            layout.kind()
        )));
    }
    let step: Vec<Gate> = match h {
        HamiltonianSum::Pauli(sum) => {
            if sum.n_qubits() != register.n_units() || layout.kind() == EncodingKind::Qudit {
                return Err(Error::validation("Hamiltonian does not match the layout"));
            }
            sum.terms()
                .iter()
                .map(|(c, p)| Gate::PauliRotation {
                    angle: plan.dtau() * c,
                    string: *p,
                })
                .collect()
        }
        HamiltonianSum::GellMann(sum) => {
            if layout.kind() != EncodingKind::Qudit
                || sum.n_sites() != layout.n_sites()
                || sum.d() != layout.spin().dim()
            {
                return Err(Error::validation("Hamiltonian does not match the layout"));
            }
            sum.terms()
                .iter()
                .map(|(g, s)| Gate::QuditRotation {
                    angle: plan.dtau() * g,
                    string: s.clone(),
                })
                .collect()
        }
    };
    let mut prep = Vec::new();
    let mut finish = Vec::new();
    if dicke_dressing {
        let k = layout.units_per_site();
        for site in 0..layout.n_sites() {
            prep.push(Gate::DickePrep {
                site,
                first: site * k,
                n_qubits: k,
                inverse: false,
            });
            finish.push(Gate::DickePrep {
                site,
                first: site * k,
                n_qubits: k,
                inverse: true,
            });
        }
    }
    Ok(TrotterCircuit {
        register,
        prep,
        step,
        finish,
        n_steps: plan.n_steps(),
    })
}

/// Full Trotter circuit `[dressing] U_ST^N [inverse dressing]`.
pub fn trotter_circuit(
    h: &HamiltonianSum,
    layout: &EncodingLayout,
    plan: TrotterPlan,
    dicke_dressing: bool,
) -> Result<Circuit> {
    Ok(trotter_parts(h, layout, plan, dicke_dressing)?.to_circuit())
}

/// Gates that prepare the encoded `state` from the all-zero register.
///
/// Dicke layouts get their seed patterns; dressing is added by the Trotter circuit.
pub fn prep_gates(layout: &EncodingLayout, state: &LatticeBasisState) -> Result<Vec<Gate>> {
    if state.n_sites() != layout.n_sites() {
        return Err(Error::validation("state and layout site counts differ"));
    }
    let mut out = Vec::new();
    let k = layout.units_per_site();
    for site in 0..layout.n_sites() {
        let pattern = layout.encode_site(state.twice_m(site))?;
        if layout.kind() == EncodingKind::Qudit {
            if pattern != 0 {
                out.push(Gate::LevelSet {
                    site,
                    level: pattern as usize,
                });
            }
        } else {
            for q in 0..k {
                if (pattern >> q) & 1 == 1 {
                    out.push(Gate::BitFlip { qubit: site * k + q });
                }
            }
        }
    }
    Ok(out)
}
