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

//! Exact spin-space model of the Heisenberg chain.
//!
//! Everything here works in the `(2S+1)^N`-dimensional spin basis with `J = ħ = 1`, so times are
//! the dimensionless `Jt/ħ`. Each site uses the ascending-`M` level order `ℓ = M + S`, and site 0
//! is the least significant tensor factor, so the basis index of `|M_{N-1},…,M_0⟩` is
//! `Σ_n ℓ_n (2S+1)^n`. Half-integer quantum numbers are stored doubled (`2M`, `2S`).

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest dense spin-space dimension built unless the caller asks for more.
pub const DEFAULT_MAX_DENSE_DIM: usize = 4096;

const HERMITIAN_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

/// Spin quantum number, stored as `2S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Spin {
    two_s: u32,
}

impl Spin {
    pub fn new(two_s: u32) -> Result<Self> {
        if two_s == 0 {
            return Err(Error::validation("spin must satisfy 2S >= 1"));
        }
        Ok(Spin { two_s })
    }

    pub fn two_s(self) -> u32 {
        self.two_s
    }

    pub fn value(self) -> f64 {
        f64::from(self.two_s) / 2.0
    }

    /// Number of levels `2S + 1`.
    pub fn dim(self) -> usize {
        self.two_s as usize + 1
    }

    /// Doubled magnetic quantum numbers in ascending order, `-2S, -2S+2, …, 2S`.
    pub fn twice_m_values(self) -> impl Iterator<Item = i32> {
        let two_s = self.two_s as i32;
        (0..=two_s).map(move |l| 2 * l - two_s)
    }

    /// Level index `ℓ = M + S` of a doubled magnetic quantum number.
    pub fn level_of(self, twice_m: i32) -> Result<usize> {
        let two_s = self.two_s as i32;
        if twice_m.abs() > two_s || (twice_m - two_s).rem_euclid(2) != 0 {
            return Err(Error::validation(format!(
                "2M = {twice_m} is not a magnetic quantum number of S = {self}"
            )));
        }
        Ok(((twice_m + two_s) / 2) as usize)
    }

    pub fn twice_m_of_level(self, level: usize) -> i32 {
        2 * level as i32 - self.two_s as i32
    }
}

impl TryFrom<u32> for Spin {
    type Error = Error;
    fn try_from(two_s: u32) -> Result<Self> {
        Spin::new(two_s)
    }
}

impl From<Spin> for u32 {
    fn from(s: Spin) -> u32 {
        s.two_s
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_half_integer(f, self.two_s as i32)
    }
}

pub(crate) fn write_half_integer(f: &mut fmt::Formatter<'_>, twice: i32) -> fmt::Result {
    if twice % 2 == 0 {
        write!(f, "{}", twice / 2)
    } else {
        write!(f, "{twice}/2")
    }
}

/// A product basis state `|M_{N-1},…,M_0⟩`. Entry `n` of the stored list is `2·M_n` for site `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeBasisState {
    twice_m: Vec<i32>,
}

impl LatticeBasisState {
    /// Builds a state from doubled quantum numbers indexed by site (site 0 first).
    pub fn new(spin: Spin, twice_m: Vec<i32>) -> Result<Self> {
        if twice_m.is_empty() {
            return Err(Error::validation("a lattice state needs at least one site"));
        }
        for &m in &twice_m {
            spin.level_of(m)?;
        }
        Ok(LatticeBasisState { twice_m })
    }

    /// Builds a state from doubled quantum numbers written in ket order, site `N-1` first.
    pub fn from_ket_order(spin: Spin, ket: &[i32]) -> Result<Self> {
        Self::new(spin, ket.iter().rev().copied().collect())
    }

    pub fn n_sites(&self) -> usize {
        self.twice_m.len()
    }

    pub fn twice_m(&self, site: usize) -> i32 {
        self.twice_m[site]
    }

    pub fn m(&self, site: usize) -> f64 {
        f64::from(self.twice_m[site]) / 2.0
    }

    pub fn twice_m_values(&self) -> &[i32] {
        &self.twice_m
    }

    pub fn twice_total(&self) -> i32 {
        self.twice_m.iter().sum()
    }

    /// Index in the spin basis (site 0 least significant).
    pub fn index(&self, spin: Spin) -> usize {
        let d = spin.dim();
        self.twice_m.iter().rev().fold(0usize, |acc, &m| {
            acc * d + ((m + spin.two_s() as i32) / 2) as usize
        })
    }

    pub fn from_index(spin: Spin, n_sites: usize, mut index: usize) -> Self {
        let d = spin.dim();
        let twice_m = (0..n_sites)
            .map(|_| {
                let level = index % d;
                index /= d;
                spin.twice_m_of_level(level)
            })
            .collect();
        LatticeBasisState { twice_m }
    }
}

impl fmt::Display for LatticeBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, &m) in self.twice_m.iter().rev().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write_half_integer(f, m)?;
        }
        write!(f, "⟩")
    }
}

/// Sites of uniform spin coupled along a list of edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    spin: Spin,
    n_sites: usize,
    edges: Vec<(usize, usize)>,
}

impl Lattice {
    pub fn new(spin: Spin, n_sites: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::validation("a lattice needs at least one site"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(m, n) in &edges {
            if m >= n_sites || n >= n_sites {
                return Err(Error::validation(format!(
                    "edge ({m},{n}) leaves the {n_sites}-site lattice"
                )));
            }
            if m == n {
                return Err(Error::validation(format!("self-edge ({m},{n})")));
            }
            if !seen.insert((m.min(n), m.max(n))) {
                return Err(Error::validation(format!("duplicate edge ({m},{n})")));
            }
        }
        Ok(Lattice { spin, n_sites, edges })
    }

    /// Open chain with edges `(0,1), (1,2), …`.
    pub fn open_chain(spin: Spin, n_sites: usize) -> Result<Self> {
        let edges = (1..n_sites).map(|n| (n - 1, n)).collect();
        Self::new(spin, n_sites, edges)
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Spin-space dimension, `None` on overflow.
    pub fn dim(&self) -> Option<usize> {
        self.spin.dim().checked_pow(self.n_sites as u32)
    }
}

/// Hermitian matrix in the spin basis, energies in units of `J`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseHermitian {
    matrix: CMatrix,
}

impl DenseHermitian {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::validation("Hermitian matrix must be square"));
        }
        if !is_hermitian(&matrix, HERMITIAN_TOL) {
            return Err(Error::validation("matrix is not Hermitian"));
        }
        Ok(DenseHermitian { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `⟨ψ|H|ψ⟩` (real part).
    pub fn expectation(&self, state: &[Complex64]) -> f64 {
        let psi = DVector::from_column_slice(state);
        psi.dotc(&(&self.matrix * &psi)).re
    }
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    use faer::complex_native::c64;
    let n = m.nrows();
    let a = faer::Mat::<c64>::from_fn(n, n, |i, j| {
        let z = m[(i, j)];
        c64::new(z.re, z.im)
    });
    let eig = a.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = eig.s().column_vector();
    let u = eig.u();
    let values = (0..n).map(|k| s.read(k).re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| {
        let z = u.read(i, j);
        Complex64::new(z.re, z.im)
    });
    (values, vectors)
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn unitary_exp(m: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let phases = CMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
    ));
    &vecs * phases * vecs.adjoint()
}

pub(crate) fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

/// Single-site `S^z`, `S^+`, `S^-` in units of ħ, ascending-`M` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinMatrices {
    pub sz: CMatrix,
    pub splus: CMatrix,
    pub sminus: CMatrix,
}

/// `√(S(S+1) − M(M+1))`, the `S^+` amplitude taking `|M⟩` to `|M+1⟩`.
pub fn raising_amplitude(spin: Spin, twice_m: i32) -> f64 {
    let two_s = f64::from(spin.two_s());
    let two_m = f64::from(twice_m);
    // 4·[S(S+1) − M(M+1)] = 2S(2S+2) − 2M(2M+2)
    ((two_s * (two_s + 2.0) - two_m * (two_m + 2.0)) / 4.0)
        .max(0.0)
        .sqrt()
}

pub fn spin_matrices(spin: Spin) -> SpinMatrices {
    let d = spin.dim();
    let mut sz = CMatrix::zeros(d, d);
    let mut splus = CMatrix::zeros(d, d);
    for level in 0..d {
        let twice_m = spin.twice_m_of_level(level);
        sz[(level, level)] = Complex64::new(f64::from(twice_m) / 2.0, 0.0);
        if level + 1 < d {
            splus[(level + 1, level)] = Complex64::new(raising_amplitude(spin, twice_m), 0.0);
        }
    }
    let sminus = splus.adjoint();
    SpinMatrices { sz, splus, sminus }
}

pub fn build_heisenberg(lattice: &Lattice) -> Result<DenseHermitian> {
    build_heisenberg_capped(lattice, DEFAULT_MAX_DENSE_DIM)
}

/// `Σ_(m,n) [S^z_m S^z_n + ½(S^+_m S^-_n + S^-_m S^+_n)]` as a dense matrix.
///
/// Fails with a resource error before allocating when `(2S+1)^N > max_dim`.
pub fn build_heisenberg_capped(lattice: &Lattice, max_dim: usize) -> Result<DenseHermitian> {
    let spin = lattice.spin();
    let dim = match lattice.dim() {
        Some(dim) if dim <= max_dim => dim,
        other => {
            return Err(Error::resource(
                "dense spin-space dimension",
                other.map_or(u64::MAX, |d| d as u64),
                max_dim as u64,
            ))
        }
    };
    let d = spin.dim();
    let two_s = spin.two_s() as i32;
    let strides: Vec<usize> = (0..lattice.n_sites()).map(|n| d.pow(n as u32)).collect();
    let mut h = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let state = LatticeBasisState::from_index(spin, lattice.n_sites(), col);
        let mut diag = 0.0;
        for &(m, n) in lattice.edges() {
            let (mm, mn) = (state.twice_m(m), state.twice_m(n));
            diag += f64::from(mm) * f64::from(mn) / 4.0;
            // S^+_m S^-_n
            if mm < two_s && mn > -two_s {
                let amp = 0.5 * raising_amplitude(spin, mm) * raising_amplitude(spin, mn - 2);
                let row = col + strides[m] - strides[n];
                h[(row, col)] += Complex64::new(amp, 0.0);
            }
            // S^-_m S^+_n
            if mm > -two_s && mn < two_s {
                let amp = 0.5 * raising_amplitude(spin, mm - 2) * raising_amplitude(spin, mn);
                let row = col - strides[m] + strides[n];
                h[(row, col)] += Complex64::new(amp, 0.0);
            }
        }
        h[(col, col)] += Complex64::new(diag, 0.0);
    }
    DenseHermitian::from_matrix(h)
}

/// Basis vector of a lattice state in the spin basis.
pub fn basis_vector(spin: Spin, state: &LatticeBasisState) -> Vec<Complex64> {
    let dim = spin.dim().pow(state.n_sites() as u32);
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[state.index(spin)] = Complex64::new(1.0, 0.0);
    v
}

fn check_normalized(state: &[Complex64]) -> Result<()> {
    let norm = state.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::validation(format!(
            "state must be normalized, got norm {norm}"
        )));
    }
    Ok(())
}

/// Spectral propagator `e^{-iHt}` restricted to the blocks of `H` that a given state touches.
///
/// `H` is split into the connected components of its sparsity graph (for the Heisenberg model
/// these are the `M_tot` sectors or finer), and only components carrying amplitude are
/// diagonalized.
#[derive(Clone, Debug)]
pub struct ExactPropagator {
    dim: usize,
    blocks: Vec<SpectralBlock>,
}

#[derive(Clone, Debug)]
struct SpectralBlock {
    indices: Vec<usize>,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    coefficients: Vec<Complex64>,
}

impl ExactPropagator {
    pub fn new(h: &DenseHermitian, state: &[Complex64]) -> Result<Self> {
        let dim = h.dim();
        if state.len() != dim {
            return Err(Error::validation(format!(
                "state has length {}, Hamiltonian has dimension {dim}",
                state.len()
            )));
        }
        check_normalized(state)?;
        let m = h.matrix();
        let mut component = vec![usize::MAX; dim];
        let mut blocks = Vec::new();
        for seed in 0..dim {
            if component[seed] != usize::MAX || state[seed].norm_sqr() == 0.0 {
                continue;
            }
            let id = blocks.len();
            let mut indices = Vec::new();
            let mut queue = VecDeque::from([seed]);
            component[seed] = id;
            while let Some(i) = queue.pop_front() {
                indices.push(i);
                for j in 0..dim {
                    if component[j] == usize::MAX && m[(j, i)].norm_sqr() > 0.0 {
                        component[j] = id;
                        queue.push_back(j);
                    }
                }
            }
            indices.sort_unstable();
            let sub = CMatrix::from_fn(indices.len(), indices.len(), |a, b| m[(indices[a], indices[b])]);
            let (eigenvalues, eigenvectors) = hermitian_eigen(&sub);
            let local = DVector::from_iterator(indices.len(), indices.iter().map(|&i| state[i]));
            let coefficients = (eigenvectors.adjoint() * local).iter().copied().collect();
            blocks.push(SpectralBlock {
                indices,
                eigenvalues,
                eigenvectors,
                coefficients,
            });
        }
        Ok(ExactPropagator { dim, blocks })
    }

    /// `e^{-iHt}|ψ⟩`.
    pub fn state_at(&self, t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for block in &self.blocks {
            let phased = DVector::from_iterator(
                block.coefficients.len(),
                block
                    .coefficients
                    .iter()
                    .zip(&block.eigenvalues)
                    .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t)),
            );
            let local = &block.eigenvectors * phased;
            for (k, &i) in block.indices.iter().enumerate() {
                out[i] = local[k];
            }
        }
        out
    }
}

/// `e^{-iHt}|ψ⟩` via Hermitian eigendecomposition.
pub fn exact_propagate(h: &DenseHermitian, state: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    Ok(ExactPropagator::new(h, state)?.state_at(t))
}

/// Second-order short-time estimate of `⟨S^z_0 S^z_3⟩/(ħS)²` for the four-site open chain
/// started in `|−S,−S,−S,S⟩`: `−1 + S·(Jt/ħ)²`.
pub fn pt2_correlator(spin: Spin, t: f64) -> f64 {
    -1.0 + spin.value() * t * t
}

/// `⟨S^z_a S^z_b⟩` in units of ħ² for a state in the spin basis.
pub fn szsz_expectation(spin: Spin, n_sites: usize, state: &[Complex64], a: usize, b: usize) -> f64 {
    state
        .iter()
        .enumerate()
        .filter(|(_, amp)| amp.norm_sqr() > 0.0)
        .map(|(i, amp)| {
            let s = LatticeBasisState::from_index(spin, n_sites, i);
            amp.norm_sqr() * s.m(a) * s.m(b)
        })
        .sum()
}

/// Probability carried by each doubled total magnetization `2·M_tot`.
pub fn sector_populations(
    spin: Spin,
    n_sites: usize,
    state: &[Complex64],
) -> std::collections::BTreeMap<i32, f64> {
    let mut out = std::collections::BTreeMap::new();
    for (i, amp) in state.iter().enumerate() {
        let s = LatticeBasisState::from_index(spin, n_sites, i);
        *out.entry(s.twice_total()).or_insert(0.0) += amp.norm_sqr();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a.kronecker(b)
    }

    fn site_operator(op: &CMatrix, site: usize, n_sites: usize, d: usize) -> CMatrix {
        // site 0 is the rightmost (least significant) factor
        let mut out = CMatrix::identity(1, 1);
        for n in (0..n_sites).rev() {
            let f = if n == site {
                op.clone()
            } else {
                CMatrix::identity(d, d)
            };
            out = kron(&out, &f);
        }
        out
    }

    /// Straight Kronecker-product assembly of the Heisenberg Hamiltonian.
    fn heisenberg_by_kron(lattice: &Lattice) -> CMatrix {
        let spin = lattice.spin();
        let d = spin.dim();
        let n = lattice.n_sites();
        let ops = spin_matrices(spin);
        let dim = d.pow(n as u32);
        let mut h = CMatrix::zeros(dim, dim);
        for &(a, b) in lattice.edges() {
            let za = site_operator(&ops.sz, a, n, d);
            let zb = site_operator(&ops.sz, b, n, d);
            let pa = site_operator(&ops.splus, a, n, d);
            let pb = site_operator(&ops.splus, b, n, d);
            let ma = site_operator(&ops.sminus, a, n, d);
            let mb = site_operator(&ops.sminus, b, n, d);
            h += &za * &zb + (&pa * &mb + &ma * &pb) * Complex64::new(0.5, 0.0);
        }
        h
    }

    #[test]
    fn spin_half_matrices() {
        let ops = spin_matrices(Spin::new(1).unwrap());
        assert_eq!(ops.sz[(0, 0)].re, -0.5);
        assert_eq!(ops.sz[(1, 1)].re, 0.5);
        assert_eq!(ops.splus[(1, 0)].re, 1.0);
        assert_eq!(ops.splus[(0, 1)].re, 0.0);
    }

    #[test]
    fn spin_one_ladder() {
        let ops = spin_matrices(Spin::new(2).unwrap());
        assert_abs_diff_eq!(ops.splus[(1, 0)].re, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(ops.splus[(2, 1)].re, 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(ops.sminus, ops.splus.adjoint());
    }

    #[test]
    fn spin_three_halves_amplitude() {
        let spin = Spin::new(3).unwrap();
        assert_abs_diff_eq!(raising_amplitude(spin, 1), 3f64.sqrt(), epsilon = 1e-15);
        assert_eq!(raising_amplitude(spin, 3), 0.0);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Spin::new(0).is_err());
        let spin = Spin::new(2).unwrap();
        assert!(spin.level_of(1).is_err());
        assert!(spin.level_of(4).is_err());
        assert!(LatticeBasisState::new(spin, vec![2, 3]).is_err());
        assert!(Lattice::new(spin, 2, vec![(0, 2)]).is_err());
        assert!(Lattice::new(spin, 2, vec![(1, 1)]).is_err());
        assert!(Lattice::new(spin, 3, vec![(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn state_index_round_trip() {
        let spin = Spin::new(3).unwrap();
        for i in 0..64 {
            let s = LatticeBasisState::from_index(spin, 3, i);
            assert_eq!(s.index(spin), i);
        }
        let s = LatticeBasisState::from_ket_order(spin, &[-3, 3]).unwrap();
        assert_eq!(s.twice_m(0), 3);
        assert_eq!(s.to_string(), "|-3/2,3/2⟩");
    }

    #[test]
    fn two_site_spin_half_spectrum() {
        let lattice = Lattice::open_chain(Spin::new(1).unwrap(), 2).unwrap();
        let h = build_heisenberg(&lattice).unwrap();
        let (mut ev, _) = hermitian_eigen(h.matrix());
        ev.sort_by(f64::total_cmp);
        let expected = [-0.75, 0.25, 0.25, 0.25];
        for (a, b) in ev.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn matches_kronecker_assembly() {
        for two_s in 1..=4 {
            let spin = Spin::new(two_s).unwrap();
            for lattice in [
                Lattice::open_chain(spin, 2).unwrap(),
                Lattice::open_chain(spin, 3).unwrap(),
                Lattice::new(spin, 3, vec![(0, 2), (2, 1), (1, 0)]).unwrap(),
            ] {
                let h = build_heisenberg(&lattice).unwrap();
                let oracle = heisenberg_by_kron(&lattice);
                assert!(max_abs(&(h.matrix() - oracle)) < 1e-12);
            }
        }
    }

    #[test]
    fn commutes_with_total_sz() {
        let spin = Spin::new(3).unwrap();
        let lattice = Lattice::open_chain(spin, 3).unwrap();
        let h = build_heisenberg(&lattice).unwrap();
        let ops = spin_matrices(spin);
        let mut sz_tot = CMatrix::zeros(h.dim(), h.dim());
        for n in 0..3 {
            sz_tot += site_operator(&ops.sz, n, 3, spin.dim());
        }
        let comm = h.matrix() * &sz_tot - &sz_tot * h.matrix();
        assert_eq!(max_abs(&comm), 0.0);
    }

    #[test]
    fn four_site_diagonal_element() {
        let spin = Spin::new(2).unwrap();
        let lattice = Lattice::open_chain(spin, 4).unwrap();
        let h = build_heisenberg(&lattice).unwrap();
        let s = LatticeBasisState::from_ket_order(spin, &[-2, -2, -2, 2]).unwrap();
        let i = s.index(spin);
        assert_abs_diff_eq!(h.matrix()[(i, i)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let lattice = Lattice::open_chain(Spin::new(5).unwrap(), 6).unwrap();
        match build_heisenberg_capped(&lattice, 1000) {
            Err(Error::Resource { requested, .. }) => assert_eq!(requested, 46656),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn propagation_edge_cases() {
        let spin = Spin::new(2).unwrap();
        let lattice = Lattice::open_chain(spin, 2).unwrap();
        let h = build_heisenberg(&lattice).unwrap();
        let s = LatticeBasisState::from_ket_order(spin, &[-2, 2]).unwrap();
        let psi = basis_vector(spin, &s);
        let out = exact_propagate(&h, &psi, 0.0).unwrap();
        for (a, b) in out.iter().zip(&psi) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-14);
        }
        let unnormalized: Vec<Complex64> = psi.iter().map(|a| a * 2.0).collect();
        assert!(matches!(
            exact_propagate(&h, &unnormalized, 1.0),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn eigenvector_picks_up_phase() {
        let spin = Spin::new(3).unwrap();
        let h = build_heisenberg(&Lattice::open_chain(spin, 2).unwrap()).unwrap();
        let (values, vectors) = hermitian_eigen(h.matrix());
        for k in [0, 5, 11] {
            let v: Vec<Complex64> = vectors.column(k).iter().copied().collect();
            let t = 1.7;
            let out = exact_propagate(&h, &v, t).unwrap();
            let overlap: Complex64 = v.iter().zip(&out).map(|(a, b)| a.conj() * b).sum();
            assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-10);
            let expected = Complex64::from_polar(1.0, -values[k] * t);
            assert_abs_diff_eq!((overlap - expected).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn conservation_laws() {
        let spin = Spin::new(3).unwrap();
        let lattice = Lattice::open_chain(spin, 3).unwrap();
        let h = build_heisenberg(&lattice).unwrap();
        // superposition across two M_tot sectors
        let a = LatticeBasisState::from_ket_order(spin, &[-3, 1, 3]).unwrap();
        let b = LatticeBasisState::from_ket_order(spin, &[-1, -1, -1]).unwrap();
        let mut psi = vec![Complex64::new(0.0, 0.0); h.dim()];
        psi[a.index(spin)] = Complex64::new(0.6, 0.0);
        psi[b.index(spin)] = Complex64::new(0.0, 0.8);
        let before = sector_populations(spin, 3, &psi);
        let e0 = h.expectation(&psi);
        for t in [0.3, 2.0, 7.5] {
            let out = exact_propagate(&h, &psi, t).unwrap();
            let norm: f64 = out.iter().map(|a| a.norm_sqr()).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(h.expectation(&out), e0, epsilon = 1e-10);
            for (k, p) in sector_populations(spin, 3, &out) {
                assert_abs_diff_eq!(p, before.get(&k).copied().unwrap_or(0.0), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn two_site_spin_one_return_probability_starts_at_one() {
        let spin = Spin::new(2).unwrap();
        let h = build_heisenberg(&Lattice::open_chain(spin, 2).unwrap()).unwrap();
        let s = LatticeBasisState::from_ket_order(spin, &[-2, 2]).unwrap();
        let prop = ExactPropagator::new(&h, &basis_vector(spin, &s)).unwrap();
        let i = s.index(spin);
        assert_abs_diff_eq!(prop.state_at(0.0)[i].norm_sqr(), 1.0, epsilon = 1e-14);
        let later = prop.state_at(1.0)[i].norm_sqr();
        assert!(later < 1.0);
    }

    #[test]
    fn eigen_reconstructs_degenerate_spectra() {
        // heavily degenerate Heisenberg spectra, shifted to avoid a zero eigenvalue
        for (two_s, n) in [(7, 2), (8, 2), (3, 4)] {
            let h = build_heisenberg(&Lattice::open_chain(Spin::new(two_s).unwrap(), n).unwrap()).unwrap();
            let dim = h.dim();
            let m = h.matrix() + CMatrix::identity(dim, dim) * Complex64::new(0.37, 0.0);
            let (vals, vecs) = hermitian_eigen(&m);
            let d = CMatrix::from_diagonal(&DVector::from_iterator(
                dim,
                vals.iter().map(|&e| Complex64::new(e, 0.0)),
            ));
            assert!(
                max_abs(&(&vecs * d * vecs.adjoint() - &m)) < 1e-10,
                "2S={two_s} n={n}"
            );
            assert!(max_abs(&(vecs.adjoint() * &vecs - CMatrix::identity(dim, dim))) < 1e-10);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn pt2_values() {
        assert_eq!(pt2_correlator(Spin::new(4).unwrap(), 0.0), -1.0);
        assert_abs_diff_eq!(pt2_correlator(Spin::new(2).unwrap(), 0.1), -0.99, epsilon = 1e-15);
        assert_abs_diff_eq!(
            pt2_correlator(Spin::new(5).unwrap(), 0.1),
            -0.975,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pt2_agrees_with_exact_at_short_times() {
        for two_s in 1..=5 {
            let spin = Spin::new(two_s).unwrap();
            let s = spin.two_s() as i32;
            let h = build_heisenberg(&Lattice::open_chain(spin, 4).unwrap()).unwrap();
            let init = LatticeBasisState::from_ket_order(spin, &[-s, -s, -s, s]).unwrap();
            let prop = ExactPropagator::new(&h, &basis_vector(spin, &init)).unwrap();
            let s2 = spin.value() * spin.value();
            for t in [0.01, 0.03, 0.05] {
                let c = szsz_expectation(spin, 4, &prop.state_at(t), 0, 3) / s2;
                let bound = 0.05 * spin.value() * t * t;
                assert!((c - pt2_correlator(spin, t)).abs() <= bound, "S={spin} t={t}");
            }
            let c = szsz_expectation(spin, 4, &prop.state_at(0.1), 0, 3) / s2;
            if two_s == 5 {
                assert_abs_diff_eq!(c, pt2_correlator(spin, 0.1), epsilon = 5e-4);
            }
        }
    }
}
