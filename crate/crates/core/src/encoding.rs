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

//! The four site encodings and measurement decoding.
//!
//! | kind    | units per site          | site state for `M`                        |
//! |---------|-------------------------|-------------------------------------------|
//! | compact | `ceil(log2(2S+1))` qubits | binary of `M+S`                          |
//! | direct  | `2S+1` qubits           | one-hot, bit `M+S`                        |
//! | dicke   | `2S` qubits             | seed with the lowest `S-M` qubits set     |
//! | qudit   | one `2S+1` level qudit  | level `M+S`                               |
//!
//! Site `n` occupies units `n*K .. (n+1)*K - 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, Register};
use crate::error::{Error, Result};
use crate::spin::{LatticeBasisState, Spin};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Compact,
    Direct,
    Dicke,
    Qudit,
}

impl EncodingKind {
    pub const ALL: [EncodingKind; 4] = [
        EncodingKind::Compact,
        EncodingKind::Direct,
        EncodingKind::Dicke,
        EncodingKind::Qudit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EncodingKind::Compact => "compact",
            EncodingKind::Direct => "direct",
            EncodingKind::Dicke => "dicke",
            EncodingKind::Qudit => "qudit",
        }
    }

    /// Units (qubits, or qudits for [`EncodingKind::Qudit`]) per site.
    pub fn units_per_site(self, spin: Spin) -> usize {
        let d = spin.dim();
        match self {
            EncodingKind::Compact => compact_width(spin),
            EncodingKind::Direct => d,
            EncodingKind::Dicke => d - 1,
            EncodingKind::Qudit => 1,
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "compact" | "binary" => Ok(EncodingKind::Compact),
            "direct" | "unary" | "one-hot" => Ok(EncodingKind::Direct),
            "dicke" => Ok(EncodingKind::Dicke),
            "qudit" => Ok(EncodingKind::Qudit),
            _ => Err(Error::validation(format!("unknown mapping {s:?}"))),
        }
    }
}

/// `ceil(log2(2S+1))`.
pub fn compact_width(spin: Spin) -> usize {
    let d = spin.dim();
    (usize::BITS - (d - 1).leading_zeros()) as usize
}

/// Where each site lives on the register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodingLayout {
    kind: EncodingKind,
    spin: Spin,
    n_sites: usize,
}

/// Serializable summary of a layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutSummary {
    pub kind: EncodingKind,
    pub two_s: u32,
    pub n_sites: usize,
    pub units_per_site: usize,
    pub total_units: usize,
    pub unit_levels: usize,
    pub windows: Vec<[usize; 2]>,
}

impl EncodingLayout {
    pub fn new(kind: EncodingKind, spin: Spin, n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::validation("layout needs at least one site"));
        }
        let layout = Self { kind, spin, n_sites };
        if kind != EncodingKind::Qudit && layout.total_units() > crate::pauli::MAX_PAULI_QUBITS {
            return Err(Error::resource(
                format!("{kind} register qubits"),
                layout.total_units() as u64,
                crate::pauli::MAX_PAULI_QUBITS as u64,
            ));
        }
        Ok(layout)
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn units_per_site(&self) -> usize {
        self.kind.units_per_site(self.spin)
    }

    pub fn total_units(&self) -> usize {
        self.n_sites * self.units_per_site()
    }

    /// Levels per unit: 2 for qubit encodings, `2S+1` for qudits.
    pub fn unit_levels(&self) -> usize {
        match self.kind {
            EncodingKind::Qudit => self.spin.dim(),
            _ => 2,
        }
    }

    pub fn register(&self) -> Register {
        match self.kind {
            EncodingKind::Qudit => Register::Qudits {
                n: self.n_sites,
                d: self.spin.dim(),
            },
            _ => Register::Qubits(self.total_units()),
        }
    }

    /// Inclusive unit window `[k0, k1]` of a site.
    pub fn site_window(&self, site: usize) -> (usize, usize) {
        let k = self.units_per_site();
        (site * k, (site + 1) * k - 1)
    }

    pub fn summary(&self) -> LayoutSummary {
        LayoutSummary {
            kind: self.kind,
            two_s: self.spin.two_s(),
            n_sites: self.n_sites,
            units_per_site: self.units_per_site(),
            total_units: self.total_units(),
            unit_levels: self.unit_levels(),
            windows: (0..self.n_sites)
                .map(|n| {
                    let (a, b) = self.site_window(n);
                    [a, b]
                })
                .collect(),
        }
    }

    /// Site pattern (qubit encodings) or level (qudit) for magnetic number `twice_m / 2`.
    pub fn encode_site(&self, twice_m: i32) -> Result<u64> {
        let level = self.spin.level_of(twice_m)? as u64;
        Ok(match self.kind {
            EncodingKind::Compact | EncodingKind::Qudit => level,
            EncodingKind::Direct => 1u64 << level,
            EncodingKind::Dicke => {
                let w = self.spin.two_s() as u64 - level;
                (1u64 << w) - 1
            }
        })
    }

    /// Inverse of [`encode_site`](Self::encode_site); `None` for unused patterns.
    pub fn decode_site(&self, pattern: u64) -> Option<i32> {
        let two_s = self.spin.two_s() as i32;
        let level = match self.kind {
            EncodingKind::Compact | EncodingKind::Qudit => {
                if pattern < self.spin.dim() as u64 {
                    pattern as i32
                } else {
                    return None;
                }
            }
            EncodingKind::Direct => {
                if pattern.count_ones() == 1 {
                    pattern.trailing_zeros() as i32
                } else {
                    return None;
                }
            }
            EncodingKind::Dicke => {
                // only seeds survive the inverse Dicke unitary
                if pattern & (pattern + 1) != 0 || pattern >> (two_s as u32) != 0 {
                    return None;
                }
                two_s - pattern.count_ones() as i32
            }
        };
        Some(2 * level - two_s)
    }

    /// Register basis index of a lattice state.
    pub fn encode_state(&self, state: &LatticeBasisState) -> Result<usize> {
        if state.n_sites() != self.n_sites {
            return Err(Error::validation("state and layout site counts differ"));
        }
        let mut idx = 0usize;
        let k = self.units_per_site();
        let base = match self.kind {
            EncodingKind::Qudit => self.spin.dim(),
            _ => 1 << k,
        };
        for site in (0..self.n_sites).rev() {
            idx = idx * base + self.encode_site(state.twice_m(site))? as usize;
        }
        Ok(idx)
    }

    /// Decodes a register basis index; `None` when some site is unmapped.
    pub fn decode_index(&self, mut idx: usize) -> Option<LatticeBasisState> {
        let k = self.units_per_site();
        let base = match self.kind {
            EncodingKind::Qudit => self.spin.dim(),
            _ => 1 << k,
        };
        let mut m = Vec::with_capacity(self.n_sites);
        for _ in 0..self.n_sites {
            m.push(self.decode_site((idx % base) as u64)?);
            idx /= base;
        }
        Some(LatticeBasisState::new(self.spin, m).expect("decoded values are valid"))
    }

    /// Register dimension, `None` on overflow.
    pub fn register_dim(&self) -> Option<usize> {
        self.register().dim()
    }
}

/// Outcome of decoding a measured register state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    State(LatticeBasisState),
    Unmapped,
}

/// Computational basis state of a qubit register; text form has qubit 0 last.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    n_bits: usize,
    bits: u64,
}

impl Bitstring {
    pub fn new(n_bits: usize, bits: u64) -> Result<Self> {
        if n_bits > 64 || (n_bits < 64 && bits >> n_bits != 0) {
            return Err(Error::validation("bitstring value exceeds its width"));
        }
        Ok(Self { n_bits, bits })
    }

    pub fn zeros(n_bits: usize) -> Self {
        Self { n_bits, bits: 0 }
    }

    pub fn len(&self) -> usize {
        self.n_bits
    }

    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    pub fn value(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, q: usize) -> bool {
        (self.bits >> q) & 1 == 1
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.n_bits).rev() {
            f.write_str(if self.bit(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > 64 {
            return Err(Error::validation("bitstring longer than 64 bits"));
        }
        let mut bits = 0u64;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::validation(format!("bad bitstring {s:?}"))),
                };
        }
        Ok(Self {
            n_bits: s.len(),
            bits,
        })
    }
}

impl Serialize for Bitstring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Encodes one site's magnetic number.
pub fn encode_site(layout: &EncodingLayout, twice_m: i32) -> Result<u64> {
    layout.encode_site(twice_m)
}

/// Decodes a measured bitstring of a qubit layout.
///
/// Dicke layouts are read after the inverse Dicke unitary, so only seed patterns map.
pub fn decode_bitstring(layout: &EncodingLayout, bits: &Bitstring) -> Result<Decoded> {
    if layout.kind() == EncodingKind::Qudit {
        return Err(Error::validation("qudit layouts are read out as levels"));
    }
    if bits.len() != layout.total_units() {
        return Err(Error::validation(format!(
            "bitstring has {} bits, layout needs {}",
            bits.len(),
            layout.total_units()
        )));
    }
    Ok(match layout.decode_index(bits.value() as usize) {
        Some(s) => Decoded::State(s),
        None => Decoded::Unmapped,
    })
}

/// Symmetric state `|D_{S,M}>` on `2S` qubits.
pub fn dicke_state_vector(spin: Spin, twice_m: i32) -> Result<Vec<Complex64>> {
    let level = spin.level_of(twice_m)?;
    let n = spin.two_s() as usize;
    let w = (n - level) as u32;
    let count = (0..1usize << n).filter(|i| i.count_ones() == w).count();
    let amp = Complex64::new(1.0 / (count as f64).sqrt(), 0.0);
    Ok((0..1usize << n)
        .map(|i| {
            if i.count_ones() == w {
                amp
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect())
}

/// Gate list preparing `|D_{S,M}>` from the weight-`(S-M)` seed, on qubits `0..2S`.
///
/// Split-and-cyclic-shift construction. Every gate is a CNOT or a controlled `R_Y`.
pub fn dicke_gates(spin: Spin) -> Vec<Gate> {
    let n = spin.two_s() as usize;
    let mut gates = Vec::new();
    // SCS_{l,l-1} on the top l qubits, l = n..2
    for l in (2..=n).rev() {
        let o = n - l;
        scs(&mut gates, l, l - 1, o);
    }
    gates
}

fn scs(gates: &mut Vec<Gate>, n: usize, k: usize, o: usize) {
    let nf = n as f64;
    let theta = 2.0 * (1.0 / nf).sqrt().acos();
    gates.push(Gate::Cx {
        control: o + 1,
        target: o,
    });
    gates.push(Gate::CRy {
        control: o,
        target: o + 1,
        theta,
    });
    gates.push(Gate::Cx {
        control: o + 1,
        target: o,
    });
    for l in 2..=k {
        let theta = 2.0 * (l as f64 / nf).sqrt().acos();
        gates.push(Gate::Cx {
            control: o + l,
            target: o,
        });
        ccry(gates, o, o + l - 1, o + l, theta);
        gates.push(Gate::Cx {
            control: o + l,
            target: o,
        });
    }
}

fn ccry(gates: &mut Vec<Gate>, c1: usize, c2: usize, target: usize, theta: f64) {
    gates.push(Gate::CRy {
        control: c2,
        target,
        theta: theta / 2.0,
    });
    gates.push(Gate::Cx {
        control: c1,
        target: c2,
    });
    gates.push(Gate::CRy {
        control: c2,
        target,
        theta: -theta / 2.0,
    });
    gates.push(Gate::Cx {
        control: c1,
        target: c2,
    });
    gates.push(Gate::CRy {
        control: c1,
        target,
        theta: theta / 2.0,
    });
}

/// [`dicke_gates`] as a circuit on `2S` qubits.
pub fn dicke_circuit(spin: Spin) -> Circuit {
    let n = spin.two_s() as usize;
    Circuit::new(Register::Qubits(n), dicke_gates(spin)).expect("gates fit the register")
}

/// Total `S^2` of a `2S`-qubit register, treating each qubit as a spin-1/2.
pub fn total_spin_squared(n_qubits: usize) -> crate::spin::CMatrix {
    use crate::pauli::{pauli_matrix, Pauli, PauliString};
    let dim = 1usize << n_qubits;
    let mut out = crate::spin::CMatrix::zeros(dim, dim);
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        let mut total = crate::spin::CMatrix::zeros(dim, dim);
        for q in 0..n_qubits {
            let s = PauliString::from_sparse(n_qubits, &[(q, p)]).expect("in range");
            total += pauli_matrix(&s) * Complex64::new(0.5, 0.0);
        }
        out += &total * &total;
    }
    out
}
