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

//! Pauli strings on up to 64 qubits and weighted sums of them.
//!
//! A string is stored as a pair of bit masks `(x, z)` and denotes
//! `P = i^{|x & z|} X^x Z^z`, so a qubit with both bits set carries `Y`.
//! Acting on a computational basis state, `P|b> = i^{|x&z|} (-1)^{|b&z|} |b ^ x>`.
//! The text form lists the highest qubit first: `"IZ"` has `Z` on qubit 0.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{is_hermitian, CMatrix};

/// Coefficients with modulus at or below this are treated as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Widest register a mask-based string can address.
pub const MAX_PAULI_QUBITS: usize = 64;

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis on a register of fixed width.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

fn width_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// `i^k` for integer `k`.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub fn new(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if n_qubits > MAX_PAULI_QUBITS {
            return Err(Error::validation(format!(
                "Pauli strings support at most {MAX_PAULI_QUBITS} qubits, got {n_qubits}"
            )));
        }
        let m = width_mask(n_qubits);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::validation("Pauli mask has bits outside the register"));
        }
        Ok(Self { n_qubits, x, z })
    }

    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_PAULI_QUBITS);
        Self { n_qubits, x: 0, z: 0 }
    }

    /// Builds a string from `(qubit, pauli)` pairs; unlisted qubits get `I`.
    pub fn from_sparse(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::new(n_qubits, 0, 0)?;
        for &(q, p) in ops {
            if q >= n_qubits {
                return Err(Error::validation(format!(
                    "qubit {q} outside register of {n_qubits}"
                )));
            }
            s.set(q, p);
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let (xb, zb) = p.bits();
        let bit = 1u64 << qubit;
        self.x = (self.x & !bit) | if xb { bit } else { 0 };
        self.z = (self.z & !bit) | if zb { bit } else { 0 };
    }

    pub fn is_identity(&self) -> bool {
        self.x | self.z == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        let m = self.support_mask();
        (0..self.n_qubits).filter(|q| (m >> q) & 1 == 1).collect()
    }

    /// Number of `Y` factors.
    pub fn n_y(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Phase `c` and target `j` with `P|i> = c|j>`.
    #[inline]
    pub fn act(&self, i: usize) -> (Complex64, usize) {
        let sign = if ((i as u64) & self.z).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        (i_pow(self.n_y()) * sign, i ^ self.x as usize)
    }

    /// Tensor product of strings on disjoint qubits of the same register.
    pub fn disjoint_product(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::validation("register widths differ"));
        }
        if self.support_mask() & other.support_mask() != 0 {
            return Err(Error::validation("strings overlap"));
        }
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x: self.x | other.x,
            z: self.z | other.z,
        })
    }

    /// Operator product `self * other = phase * result`.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        assert_eq!(self.n_qubits, other.n_qubits);
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let out = PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
        };
        // X^a Z^b X^c Z^d = (-1)^{|b&c|} X^{a^c} Z^{b^d}
        let sign = (self.z & other.x).count_ones();
        let k = self.n_y() + other.n_y() + 2 * sign + 4 * 64 - out.n_y();
        (i_pow(k), out)
    }

    /// Places this string into a wider register starting at `offset`.
    pub fn embed(&self, n_qubits: usize, offset: usize) -> Result<PauliString> {
        if offset + self.n_qubits > n_qubits {
            return Err(Error::validation("embedding exceeds register"));
        }
        PauliString::new(n_qubits, self.x << offset, self.z << offset)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.n_qubits).rev() {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.trim().chars().collect();
        let n = chars.len();
        let mut out = PauliString::new(n, 0, 0)?;
        for (pos, c) in chars.iter().enumerate() {
            let p = match c.to_ascii_uppercase() {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::validation(format!(
                        "unexpected character {other:?} in Pauli string {s:?}"
                    )))
                }
            };
            out.set(n - 1 - pos, p);
        }
        Ok(out)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Real-weighted sum of Pauli strings plus an identity offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
    offset: f64,
}

impl PauliSum {
    pub fn empty(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
            offset: 0.0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Term count, identity excluded.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &PauliString) -> Option<f64> {
        self.terms.iter().find(|(_, q)| q == p).map(|(c, _)| *c)
    }

    /// Dense matrix `offset * I + sum h_k P_k`. Only for small registers.
    pub fn to_matrix(&self) -> CMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::identity(dim, dim) * Complex64::new(self.offset, 0.0);
        for (h, p) in &self.terms {
            for i in 0..dim {
                let (c, j) = p.act(i);
                m[(j, i)] += c * *h;
            }
        }
        m
    }

    /// Applies the sum to a state vector.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = psi.iter().map(|a| a * self.offset).collect();
        for (h, p) in &self.terms {
            for (i, a) in psi.iter().enumerate() {
                let (c, j) = p.act(i);
                out[j] += c * *h * a;
            }
        }
        out
    }
}

/// Accumulates coefficients per string, keeping first-insertion order.
#[derive(Clone, Debug)]
pub struct PauliSumBuilder {
    n_qubits: usize,
    index: HashMap<PauliString, usize>,
    terms: Vec<(f64, PauliString)>,
    offset: f64,
}

impl PauliSumBuilder {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            index: HashMap::new(),
            terms: Vec::new(),
            offset: 0.0,
        }
    }

    pub fn add(&mut self, coeff: f64, p: PauliString) {
        debug_assert_eq!(p.n_qubits(), self.n_qubits);
        if p.is_identity() {
            self.offset += coeff;
            return;
        }
        match self.index.get(&p) {
            Some(&k) => self.terms[k].0 += coeff,
            None => {
                self.index.insert(p, self.terms.len());
                self.terms.push((coeff, p));
            }
        }
    }

    /// Drops vanishing terms and returns the sum.
    pub fn finish(self) -> PauliSum {
        let offset = if self.offset.abs() <= ZERO_TOL {
            0.0
        } else {
            self.offset
        };
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .into_iter()
                .filter(|(c, _)| c.abs() > ZERO_TOL)
                .collect(),
            offset,
        }
    }
}

/// Dense matrix of a Pauli string, qubit 0 least significant.
pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let dim = 1usize << p.n_qubits();
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let (c, j) = p.act(i);
        m[(j, i)] = c;
    }
    m
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let a = v[i];
                let b = v[i + h];
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

fn check_square_pow2(matrix: &CMatrix, n_qubits: usize) -> Result<usize> {
    if n_qubits > 16 {
        return Err(Error::resource(
            "dense Pauli decomposition qubits",
            n_qubits as u64,
            16,
        ));
    }
    let dim = 1usize << n_qubits;
    if matrix.nrows() != dim || matrix.ncols() != dim {
        return Err(Error::validation(format!(
            "expected a {dim}x{dim} matrix for {n_qubits} qubits, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    Ok(dim)
}

/// All nonzero coefficients `Tr(P^dagger A) / 2^K` of an arbitrary matrix.
///
/// Output is ordered by `x` mask, then `z` mask. The identity is included when nonzero.
pub fn pauli_coefficients(matrix: &CMatrix, n_qubits: usize) -> Result<Vec<(PauliString, Complex64)>> {
    let dim = check_square_pow2(matrix, n_qubits)?;
    let norm = 1.0 / dim as f64;
    let mut out = Vec::new();
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    for x in 0..dim {
        let mut any = false;
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = matrix[(i ^ x, i)];
            any |= slot.norm() > 0.0;
        }
        if !any {
            continue;
        }
        walsh_hadamard(&mut v);
        for (z, w) in v.iter().enumerate() {
            let p = PauliString {
                n_qubits,
                x: x as u64,
                z: z as u64,
            };
            let c = i_pow(p.n_y()).conj() * w * norm;
            if c.norm() > ZERO_TOL {
                out.push((p, c));
            }
        }
    }
    Ok(out)
}

/// Decomposes a Hermitian matrix into a [`PauliSum`].
pub fn decompose_qubit_operator(matrix: &CMatrix, n_qubits: usize) -> Result<PauliSum> {
    check_square_pow2(matrix, n_qubits)?;
    if !is_hermitian(matrix, 1e-10) {
        return Err(Error::validation("matrix is not Hermitian"));
    }
    let mut b = PauliSumBuilder::new(n_qubits);
    for (p, c) in pauli_coefficients(matrix, n_qubits)? {
        b.add(c.re, p);
    }
    Ok(b.finish())
}
