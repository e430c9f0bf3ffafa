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

//! Encoded two-body Heisenberg Hamiltonians and their term statistics.
//!
//! Compact and direct Hamiltonians are assembled from single-site decompositions: with
//! `S^z = sum_P a_P P` and `S^+ = sum_P p_P P` on one site, a bond contributes
//! `(a_P a_Q + Re(p_P conj(p_Q))) P_m Q_n` for every pair of site strings. This never builds a
//! matrix larger than one site.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{fit_power_law, fit_power_law_linear, ScalingFit};
use crate::encoding::{compact_width, dicke_state_vector, EncodingKind, EncodingLayout};
use crate::error::{Error, Result};
use crate::gellmann::{gell_mann_coefficients, GellMannString, GellMannSum};
use crate::pauli::{pauli_coefficients, Pauli, PauliString, PauliSum, PauliSumBuilder, ZERO_TOL};
use crate::spin::{spin_matrices, CMatrix, Lattice, Spin};

/// Widest site register the compact builder decomposes.
pub const MAX_COMPACT_SITE_QUBITS: usize = 6;

/// Either kind of encoded Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianSum {
    Pauli(PauliSum),
    GellMann(GellMannSum),
}

impl HamiltonianSum {
    pub fn len(&self) -> usize {
        match self {
            HamiltonianSum::Pauli(s) => s.len(),
            HamiltonianSum::GellMann(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn offset(&self) -> f64 {
        match self {
            HamiltonianSum::Pauli(s) => s.offset(),
            HamiltonianSum::GellMann(s) => s.offset(),
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        match self {
            HamiltonianSum::Pauli(s) => s.to_matrix(),
            HamiltonianSum::GellMann(s) => s.to_matrix(),
        }
    }
}

/// Pauli decomposition of one site's `S^z` and `S^+`.
#[derive(Clone, Debug)]
pub struct SiteDecomposition {
    pub n_qubits: usize,
    pub sz: Vec<(PauliString, f64)>,
    pub splus: Vec<(PauliString, Complex64)>,
}

/// Embeds a `d x d` operator into the top-left block of a `2^k` matrix.
fn embed(m: &CMatrix, k: usize) -> CMatrix {
    let dim = 1usize << k;
    let mut out = CMatrix::zeros(dim, dim);
    out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    out
}

/// Site decomposition under the compact (binary) map.
pub fn compact_site_decomposition(spin: Spin) -> Result<SiteDecomposition> {
    let k = compact_width(spin);
    if k > MAX_COMPACT_SITE_QUBITS {
        return Err(Error::resource(
            "compact site qubits",
            k as u64,
            MAX_COMPACT_SITE_QUBITS as u64,
        ));
    }
    let ops = spin_matrices(spin);
    let sz = pauli_coefficients(&embed(&ops.sz, k), k)?
        .into_iter()
        .map(|(p, c)| (p, c.re))
        .collect();
    let splus = pauli_coefficients(&embed(&ops.splus, k), k)?;
    Ok(SiteDecomposition {
        n_qubits: k,
        sz,
        splus,
    })
}

/// Site decomposition under the direct (one-hot) map.
///
/// `S^z = sum_l M_l (I - Z_l)/2` and `S^+ = sum_l c_l |1><0|_{l+1} |0><1|_l`, with
/// `|0><1| = (X + iY)/2` and `|1><0| = (X - iY)/2`.
pub fn direct_site_decomposition(spin: Spin) -> Result<SiteDecomposition> {
    let d = spin.dim();
    if d > crate::pauli::MAX_PAULI_QUBITS {
        return Err(Error::resource(
            "direct site qubits",
            d as u64,
            crate::pauli::MAX_PAULI_QUBITS as u64,
        ));
    }
    let mut sz = Vec::new();
    for l in 0..d {
        let m = spin.twice_m_of_level(l) as f64 / 2.0;
        if m != 0.0 {
            sz.push((PauliString::from_sparse(d, &[(l, Pauli::Z)])?, -m / 2.0));
        }
    }
    let half = 0.5;
    let lower = [
        (Pauli::X, Complex64::new(half, 0.0)),
        (Pauli::Y, Complex64::new(0.0, -half)),
    ];
    let raise = [
        (Pauli::X, Complex64::new(half, 0.0)),
        (Pauli::Y, Complex64::new(0.0, half)),
    ];
    let mut splus = Vec::new();
    for l in 0..d - 1 {
        let amp = crate::spin::raising_amplitude(spin, spin.twice_m_of_level(l));
        for &(ph, ch) in &lower {
            for &(pl, cl) in &raise {
                let s = PauliString::from_sparse(d, &[(l + 1, ph), (l, pl)])?;
                splus.push((s, ch * cl * amp));
            }
        }
    }
    Ok(SiteDecomposition {
        n_qubits: d,
        sz,
        splus,
    })
}

/// Combines site decompositions over the lattice bonds.
pub fn combine_sites(lattice: &Lattice, site: &SiteDecomposition) -> Result<PauliSum> {
    let k = site.n_qubits;
    let n_qubits = k * lattice.n_sites();
    if n_qubits > crate::pauli::MAX_PAULI_QUBITS {
        return Err(Error::resource(
            "register qubits",
            n_qubits as u64,
            crate::pauli::MAX_PAULI_QUBITS as u64,
        ));
    }
    let mut b = PauliSumBuilder::new(n_qubits);
    for &(m, n) in lattice.edges() {
        for (p, a) in &site.sz {
            let pm = p.embed(n_qubits, m * k)?;
            for (q, c) in &site.sz {
                let qn = q.embed(n_qubits, n * k)?;
                b.add(a * c, pm.disjoint_product(&qn)?);
            }
        }
        for (p, a) in &site.splus {
            let pm = p.embed(n_qubits, m * k)?;
            for (q, c) in &site.splus {
                let v = (a * c.conj()).re;
                if v.abs() > ZERO_TOL {
                    let qn = q.embed(n_qubits, n * k)?;
                    b.add(v, pm.disjoint_product(&qn)?);
                }
            }
        }
    }
    Ok(b.finish())
}

/// Compact-map qubit Hamiltonian.
pub fn build_compact(lattice: &Lattice) -> Result<PauliSum> {
    combine_sites(lattice, &compact_site_decomposition(lattice.spin())?)
}

/// Direct-map qubit Hamiltonian.
pub fn build_direct(lattice: &Lattice) -> Result<PauliSum> {
    combine_sites(lattice, &direct_site_decomposition(lattice.spin())?)
}

/// Dicke-map qubit Hamiltonian `(1/4) sum_bonds sum_{k in m, l in n} (ZZ + YY + XX)_{kl}`.
///
/// Order: bonds as given, then `k` ascending, then `l` ascending, then `ZZ, YY, XX`.
pub fn build_dicke(lattice: &Lattice) -> Result<PauliSum> {
    let k = lattice.spin().two_s() as usize;
    let n_qubits = k * lattice.n_sites();
    if n_qubits > crate::pauli::MAX_PAULI_QUBITS {
        return Err(Error::resource(
            "register qubits",
            n_qubits as u64,
            crate::pauli::MAX_PAULI_QUBITS as u64,
        ));
    }
    let mut b = PauliSumBuilder::new(n_qubits);
    for &(m, n) in lattice.edges() {
        for qk in m * k..(m + 1) * k {
            for ql in n * k..(n + 1) * k {
                for p in [Pauli::Z, Pauli::Y, Pauli::X] {
                    b.add(0.25, PauliString::from_sparse(n_qubits, &[(qk, p), (ql, p)])?);
                }
            }
        }
    }
    Ok(b.finish())
}

/// Qudit Hamiltonian in generalized Gell-Mann strings.
///
/// Order: bonds as given, then the index on the first bond site ascending, then the second.
/// Coefficients absorb the `lambda_1` normalization of spectator sites, so the sum reconstructs
/// the Hamiltonian exactly.
pub fn build_qudit(lattice: &Lattice) -> Result<GellMannSum> {
    let spin = lattice.spin();
    let d = spin.dim();
    let n = lattice.n_sites();
    if d > 64 {
        return Err(Error::resource("qudit levels", d as u64, 64));
    }
    let ops = spin_matrices(spin);
    let sz = gell_mann_coefficients(&ops.sz)?;
    let sp = gell_mann_coefficients(&ops.splus)?;
    let spectator = (d as f64 / 2.0).powf((n as f64 - 2.0) / 2.0);
    let mut terms = Vec::new();
    for &(m, s) in lattice.edges() {
        for a in 2..=d * d {
            for b in 2..=d * d {
                let g = sz[a - 1].re * sz[b - 1].re + (sp[a - 1] * sp[b - 1].conj()).re;
                if g.abs() > ZERO_TOL {
                    let mut idx = vec![1; n];
                    idx[m] = a;
                    idx[s] = b;
                    terms.push((g * spectator, GellMannString::new(d, idx)?));
                }
            }
        }
    }
    Ok(GellMannSum::from_parts(d, n, terms, 0.0))
}

/// Builds the Hamiltonian of any mapping.
pub fn build_encoded(kind: EncodingKind, lattice: &Lattice) -> Result<HamiltonianSum> {
    Ok(match kind {
        EncodingKind::Compact => HamiltonianSum::Pauli(build_compact(lattice)?),
        EncodingKind::Direct => HamiltonianSum::Pauli(build_direct(lattice)?),
        EncodingKind::Dicke => HamiltonianSum::Pauli(build_dicke(lattice)?),
        EncodingKind::Qudit => HamiltonianSum::GellMann(build_qudit(lattice)?),
    })
}

/// Columns are the encoded images of the spin basis states, in spin-basis order.
///
/// For Dicke layouts each site contributes its Dicke state rather than the seed.
pub fn encoding_isometry(layout: &EncodingLayout) -> Result<CMatrix> {
    let reg_dim = layout.register_dim().unwrap_or(usize::MAX);
    let spin = layout.spin();
    let spin_dim = spin.dim().pow(layout.n_sites() as u32);
    if reg_dim > 1 << 14 {
        return Err(Error::resource("encoding isometry rows", reg_dim as u64, 1 << 14));
    }
    let mut v = CMatrix::zeros(reg_dim, spin_dim);
    for col in 0..spin_dim {
        let state = crate::spin::LatticeBasisState::from_index(spin, layout.n_sites(), col);
        if layout.kind() == EncodingKind::Dicke {
            let mut vec = vec![Complex64::new(1.0, 0.0)];
            for site in (0..layout.n_sites()).rev() {
                let dv = dicke_state_vector(spin, state.twice_m(site))?;
                vec = vec.iter().flat_map(|a| dv.iter().map(move |b| a * b)).collect();
            }
            for (row, a) in vec.into_iter().enumerate() {
                v[(row, col)] = a;
            }
        } else {
            v[(layout.encode_state(&state)?, col)] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(v)
}

/// `V^dagger H_q V`: the encoded Hamiltonian seen from the spin basis.
pub fn restrict_to_spin_space(h: &HamiltonianSum, layout: &EncodingLayout) -> Result<CMatrix> {
    let v = encoding_isometry(layout)?;
    let hm = h.to_matrix();
    if hm.nrows() != v.nrows() {
        return Err(Error::validation("Hamiltonian does not match the layout"));
    }
    Ok(v.adjoint() * hm * v)
}

/// Term counts of an encoded Hamiltonian.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonianStats {
    pub l: usize,
    pub l_multiq: usize,
    /// Support size to count.
    pub weight_histogram: BTreeMap<usize, usize>,
}

impl HamiltonianStats {
    /// `"2:6;3:28"` style rendering.
    pub fn histogram_text(&self) -> String {
        let mut s = String::new();
        for (i, (w, c)) in self.weight_histogram.iter().enumerate() {
            if i > 0 {
                s.push(';');
            }
            let _ = write!(s, "{w}:{c}");
        }
        s
    }
}

pub fn term_stats(h: &HamiltonianSum) -> HamiltonianStats {
    let weights: Vec<usize> = match h {
        HamiltonianSum::Pauli(s) => s.terms().iter().map(|(_, p)| p.weight()).collect(),
        HamiltonianSum::GellMann(s) => s.terms().iter().map(|(_, g)| g.weight()).collect(),
    };
    let mut weight_histogram = BTreeMap::new();
    for w in &weights {
        *weight_histogram.entry(*w).or_insert(0) += 1;
    }
    HamiltonianStats {
        l: weights.len(),
        l_multiq: weights.iter().filter(|&&w| w > 2).count(),
        weight_histogram,
    }
}

/// One term of a JSON dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: f64,
    pub string: String,
}

/// JSON form of an encoded Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianDump {
    pub mapping: EncodingKind,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "nSites")]
    pub n_sites: usize,
    pub edges: Vec<(usize, usize)>,
    pub terms: Vec<TermRecord>,
    pub offset: f64,
}

pub fn dump_hamiltonian(kind: EncodingKind, lattice: &Lattice, h: &HamiltonianSum) -> HamiltonianDump {
    let terms = match h {
        HamiltonianSum::Pauli(s) => s
            .terms()
            .iter()
            .map(|(c, p)| TermRecord {
                coeff: *c,
                string: p.to_string(),
            })
            .collect(),
        HamiltonianSum::GellMann(s) => s
            .terms()
            .iter()
            .map(|(c, g)| TermRecord {
                coeff: *c,
                string: g.to_string(),
            })
            .collect(),
    };
    HamiltonianDump {
        mapping: kind,
        s: lattice.spin().value(),
        n_sites: lattice.n_sites(),
        edges: lattice.edges().to_vec(),
        terms,
        offset: h.offset(),
    }
}

/// `S_c` for a site width: `1/2` for one qubit, else `3 * 2^(K-3) - 1/2`.
pub fn central_spin(k: usize) -> f64 {
    if k == 1 {
        0.5
    } else {
        3.0 * 2f64.powi(k as i32 - 3) - 0.5
    }
}

/// Result of the compact term-count study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactScalingStudy {
    /// `(2S, L_compact)`.
    pub per_s: Vec<(u32, usize)>,
    /// Fit of `L` at `2S + 1 = 2^K`.
    pub fit_power: ScalingFit,
    /// Fit of the per-width mean `L` against `S_c`.
    pub fit_averaged: ScalingFit,
    /// `(K, S_c, mean L)`.
    pub averages: Vec<(usize, f64, f64)>,
    /// Same fits done in log-log space, for reference.
    pub fit_power_loglog: ScalingFit,
    pub fit_averaged_loglog: ScalingFit,
}

/// Two-site compact term count.
pub fn compact_term_count(spin: Spin) -> Result<usize> {
    let lat = Lattice::open_chain(spin, 2)?;
    Ok(build_compact(&lat)?.len())
}

/// Term counts and power-law fits for every `2S` in `two_s_values`.
///
/// Fits minimize squared residuals of `L` itself (Gauss-Newton started from the log-log fit);
/// the averaged fit uses, for each width `K >= 2`, the mean over `2^(K-1) <= 2S <= 2^K - 2`
/// and `L(1/2)` for `K = 1`.
pub fn compact_scaling_study(two_s_values: &[u32]) -> Result<CompactScalingStudy> {
    let mut per_s = Vec::with_capacity(two_s_values.len());
    for &t in two_s_values {
        per_s.push((t, compact_term_count(Spin::new(t)?)?));
    }
    let lookup = |t: u32| per_s.iter().find(|(x, _)| *x == t).map(|(_, l)| *l);

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut averages = Vec::new();
    for k in 1..=MAX_COMPACT_SITE_QUBITS {
        let full = (1u32 << k) - 1;
        if let Some(l) = lookup(full) {
            xs.push(full as f64 / 2.0);
            ys.push(l as f64);
        }
        let group: Vec<u32> = if k == 1 {
            vec![1]
        } else {
            ((1u32 << (k - 1))..=(1u32 << k) - 2).collect()
        };
        let ls: Option<Vec<usize>> = group.iter().map(|&t| lookup(t)).collect();
        if let Some(ls) = ls {
            let mean = ls.iter().sum::<usize>() as f64 / ls.len() as f64;
            averages.push((k, central_spin(k), mean));
        }
    }
    if xs.len() < 2 || averages.len() < 2 {
        return Err(Error::validation(
            "scaling study needs at least two complete qubit-width groups",
        ));
    }
    let ax: Vec<f64> = averages.iter().map(|a| a.1).collect();
    let ay: Vec<f64> = averages.iter().map(|a| a.2).collect();
    Ok(CompactScalingStudy {
        fit_power: fit_power_law_linear(&xs, &ys)?,
        fit_averaged: fit_power_law_linear(&ax, &ay)?,
        fit_power_loglog: fit_power_law(&xs, &ys)?,
        fit_averaged_loglog: fit_power_law(&ax, &ay)?,
        per_s,
        averages,
    })
}
