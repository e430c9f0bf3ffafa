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

//! Heisenberg spin-S chains on qubit and qudit registers.
//!
//! The crate builds encoded Hamiltonians for the compact, direct, Dicke and qudit mappings,
//! turns them into first-order Trotter circuits, runs those circuits on dense state vectors or
//! density matrices and post-processes the results.

pub mod analysis;
pub mod circuit;
pub mod density;
pub mod encoding;
pub mod error;
pub mod experiments;
pub mod gellmann;
pub mod hamiltonian;
pub mod pauli;
pub mod plot;
pub mod shots;
pub mod spin;
pub mod statevector;

pub use error::{Error, Result};
pub use gellmann::{decompose_qudit_operator, gell_mann, GellMannString, GellMannSum};
pub use pauli::{decompose_qubit_operator, pauli_matrix, Pauli, PauliString, PauliSum};
pub use spin::{
    build_heisenberg, exact_propagate, pt2_correlator, spin_matrices, DenseHermitian, Lattice,
    LatticeBasisState, Spin,
};
