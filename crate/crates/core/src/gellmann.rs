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

//! Generalized Gell-Mann matrices and strings of them on a qudit register.
//!
//! Index 1 is the normalized identity `sqrt(2/d) I`. For `j = 2..=d` the block for level `j`
//! lists, for `l = 1..j-1`, the symmetric (X-like) and antisymmetric (Y-like) matrices on the
//! level pair `(l, j)`, followed by the diagonal (Z-like) matrix for `j`. With `d = 2` this gives
//! `X, Y, Z`; with `d = 3` it gives the familiar eight matrices shifted by one index.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::ZERO_TOL;
use crate::spin::{is_hermitian, CMatrix};

/// What a Gell-Mann index refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GellMannKind {
    Identity,
    /// Symmetric on levels `l < j` (1-based).
    XLike {
        j: usize,
        l: usize,
    },
    /// Antisymmetric on levels `l < j` (1-based).
    YLike {
        j: usize,
        l: usize,
    },
    /// Diagonal, covering levels `1..=j`.
    ZLike {
        j: usize,
    },
}

/// Classifies index `k` in `[1, d^2]`.
pub fn gell_mann_kind(d: usize, k: usize) -> Result<GellMannKind> {
    if d < 2 || k == 0 || k > d * d {
        return Err(Error::validation(format!(
            "Gell-Mann index {k} out of range for d={d}"
        )));
    }
    if k == 1 {
        return Ok(GellMannKind::Identity);
    }
    // block j holds indices (j-1)^2+1 ..= j^2
    let mut j = 2;
    while k > j * j {
        j += 1;
    }
    let o = k - (j - 1) * (j - 1) - 1;
    Ok(if o < 2 * (j - 1) {
        let l = o / 2 + 1;
        if o.is_multiple_of(2) {
            GellMannKind::XLike { j, l }
        } else {
            GellMannKind::YLike { j, l }
        }
    } else {
        GellMannKind::ZLike { j }
    })
}

/// Inverse of [`gell_mann_kind`].
pub fn gell_mann_index(kind: GellMannKind) -> usize {
    match kind {
        GellMannKind::Identity => 1,
        GellMannKind::XLike { j, l } => (j - 1) * (j - 1) + 2 * (l - 1) + 1,
        GellMannKind::YLike { j, l } => (j - 1) * (j - 1) + 2 * (l - 1) + 2,
        GellMannKind::ZLike { j } => j * j,
    }
}

/// The `k`-th generalized Gell-Mann matrix of size `d`.
pub fn gell_mann(d: usize, k: usize) -> Result<CMatrix> {
    let kind = gell_mann_kind(d, k)?;
    let mut m = CMatrix::zeros(d, d);
    match kind {
        GellMannKind::Identity => {
            let v = (2.0 / d as f64).sqrt();
            for i in 0..d {
                m[(i, i)] = Complex64::new(v, 0.0);
            }
        }
        GellMannKind::XLike { j, l } => {
            m[(j - 1, l - 1)] = Complex64::new(1.0, 0.0);
            m[(l - 1, j - 1)] = Complex64::new(1.0, 0.0);
        }
        GellMannKind::YLike { j, l } => {
            m[(j - 1, l - 1)] = Complex64::new(0.0, 1.0);
            m[(l - 1, j - 1)] = Complex64::new(0.0, -1.0);
        }
        GellMannKind::ZLike { j } => {
            let norm = (2.0 / (j * (j - 1)) as f64).sqrt();
            for i in 0..j - 1 {
                m[(i, i)] = Complex64::new(norm, 0.0);
            }
            m[(j - 1, j - 1)] = Complex64::new(-norm * (j - 1) as f64, 0.0);
        }
    }
    Ok(m)
}

/// Coefficients `Tr(lambda_k A) / 2` for every `k`, including `k = 1`.
pub fn gell_mann_coefficients(matrix: &CMatrix) -> Result<Vec<Complex64>> {
    let d = matrix.nrows();
    if d < 2 || matrix.ncols() != d {
        return Err(Error::validation("expected a square matrix of size >= 2"));
    }
    (1..=d * d)
        .map(|k| {
            let l = gell_mann(d, k)?;
            Ok((l * matrix).trace() * 0.5)
        })
        .collect()
}

/// Decomposition of a Hermitian `d x d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditDecomposition {
    /// Coefficient of `lambda_1`.
    pub identity: f64,
    /// `(g, k)` for `k >= 2`, ascending `k`, vanishing terms dropped.
    pub terms: Vec<(f64, usize)>,
}

pub fn decompose_qudit_operator(matrix: &CMatrix) -> Result<QuditDecomposition> {
    if !is_hermitian(matrix, 1e-10) {
        return Err(Error::validation("matrix is not Hermitian"));
    }
    let cs = gell_mann_coefficients(matrix)?;
    let identity = cs[0].re;
    let terms = cs
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, g)| g.re.abs() > ZERO_TOL)
        .map(|(i, g)| (g.re, i + 1))
        .collect();
    Ok(QuditDecomposition { identity, terms })
}

/// Tensor product of Gell-Mann matrices, one per qudit, site 0 least significant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GellMannString {
    d: usize,
    ops: Vec<usize>,
}

impl GellMannString {
    /// `ops[n]` is the index on site `n`.
    pub fn new(d: usize, ops: Vec<usize>) -> Result<Self> {
        for &k in &ops {
            gell_mann_kind(d, k)?;
        }
        if ops.is_empty() {
            return Err(Error::validation("empty Gell-Mann string"));
        }
        Ok(Self { d, ops })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_sites(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[usize] {
        &self.ops
    }

    pub fn index(&self, site: usize) -> usize {
        self.ops[site]
    }

    /// Sites whose factor is not `lambda_1`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ops.len()).filter(|&n| self.ops[n] != 1).collect()
    }

    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|&&k| k != 1).count()
    }

    /// Dense matrix of the full string, spectators included as `lambda_1`.
    pub fn to_matrix(&self) -> CMatrix {
        let mut m = CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for &k in self.ops.iter().rev() {
            m = m.kronecker(&gell_mann(self.d, k).expect("validated index"));
        }
        m
    }

    /// Parses the display form, e.g. `"λ9λ1"`, for level count `d`.
    pub fn parse(d: usize, s: &str) -> Result<Self> {
        let t = s.trim();
        if !t.starts_with('λ') {
            return Err(Error::validation(format!("bad Gell-Mann string {s:?}")));
        }
        let mut ops = Vec::new();
        for part in t.split('λ').skip(1) {
            let k = usize::from_str(part.trim())
                .map_err(|_| Error::validation(format!("bad Gell-Mann string {s:?}")))?;
            ops.push(k);
        }
        ops.reverse();
        Self::new(d, ops)
    }
}

impl fmt::Display for GellMannString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in self.ops.iter().rev() {
            write!(f, "λ{k}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GellMannString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GellMannString(d={}, {self})", self.d)
    }
}

/// Real-weighted sum of Gell-Mann strings plus an identity offset.
///
/// `to_matrix` reconstructs `offset * I + sum g_k Gamma_k`, where each `Gamma_k` includes the
/// `lambda_1` normalization on spectator sites.
#[derive(Clone, Debug, PartialEq)]
pub struct GellMannSum {
    d: usize,
    n_sites: usize,
    terms: Vec<(f64, GellMannString)>,
    offset: f64,
}

impl GellMannSum {
    pub(crate) fn from_parts(
        d: usize,
        n_sites: usize,
        terms: Vec<(f64, GellMannString)>,
        offset: f64,
    ) -> Self {
        Self {
            d,
            n_sites,
            terms,
            offset,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[(f64, GellMannString)] {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &GellMannString) -> Option<f64> {
        self.terms.iter().find(|(_, t)| t == s).map(|(g, _)| *g)
    }

    pub fn to_matrix(&self) -> CMatrix {
        let dim = self.d.pow(self.n_sites as u32);
        let mut m = CMatrix::identity(dim, dim) * Complex64::new(self.offset, 0.0);
        for (g, s) in &self.terms {
            m += s.to_matrix() * Complex64::new(*g, 0.0);
        }
        m
    }
}
