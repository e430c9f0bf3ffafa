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

//! Observables, error metrics, Trotter discrepancy and power-law fits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{prep_gates, trotter_parts, Gate, TrotterPlan};
use crate::density::{DensityMatrix, NoiseConfig};
use crate::encoding::{EncodingKind, EncodingLayout};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_dicke, HamiltonianSum};
use crate::shots::{sample_shots, ShotResult};
use crate::spin::{build_heisenberg, unitary_exp, Lattice, LatticeBasisState, Spin};

/// `y = a x^b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square residual of `ln y`.
    pub residual: f64,
}

impl ScalingFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * x.powf(self.b)
    }

    fn log_rms(a: f64, b: f64, xs: &[f64], ys: &[f64]) -> f64 {
        let ss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y.ln() - a.ln() - b * x.ln()).powi(2))
            .sum();
        (ss / xs.len() as f64).sqrt()
    }
}

fn check_positive(xs: &[f64], ys: &[f64], min_len: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::validation("x and y lengths differ"));
    }
    if xs.len() < min_len {
        return Err(Error::validation(format!("need at least {min_len} points")));
    }
    if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::validation("power-law fits need positive data"));
    }
    Ok(())
}

/// Ordinary least squares on `(ln x, ln y)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<ScalingFit> {
    check_positive(xs, ys, 2)?;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::validation("all x values coincide"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = (my - b * mx).exp();
    Ok(ScalingFit {
        a,
        b,
        residual: ScalingFit::log_rms(a, b, xs, ys),
    })
}

/// Least squares on `y` itself, Gauss-Newton from the log-log estimate.
pub fn fit_power_law_linear(xs: &[f64], ys: &[f64]) -> Result<ScalingFit> {
    let start = fit_power_law(xs, ys)?;
    let (mut a, mut b) = (start.a, start.b);
    let cost = |a: f64, b: f64| -> f64 { xs.iter().zip(ys).map(|(x, y)| (y - a * x.powf(b)).powi(2)).sum() };
    let mut c = cost(a, b);
    for _ in 0..200 {
        // normal equations of the 2-parameter linearization
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (x, y) in xs.iter().zip(ys) {
            let f = a * x.powf(b);
            let da = x.powf(b);
            let db = f * x.ln();
            let r = y - f;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let det = jaa * jbb - jab * jab;
        if det.abs() < 1e-300 {
            break;
        }
        let mut step_a = (jbb * ga - jab * gb) / det;
        let mut step_b = (jaa * gb - jab * ga) / det;
        let mut improved = false;
        for _ in 0..40 {
            let (na, nb) = (a + step_a, b + step_b);
            if na > 0.0 {
                let nc = cost(na, nb);
                if nc <= c {
                    improved = c - nc > 1e-15 * c.max(1e-300);
                    a = na;
                    b = nb;
                    c = nc;
                    break;
                }
            }
            step_a *= 0.5;
            step_b *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(ScalingFit {
        a,
        b,
        residual: ScalingFit::log_rms(a, b, xs, ys),
    })
}

/// Prefactor of `y = a x^b` with `b` held fixed, least squares in log space.
pub fn fit_fixed_exponent(xs: &[f64], ys: &[f64], b: f64) -> Result<ScalingFit> {
    check_positive(xs, ys, 1)?;
    let n = xs.len() as f64;
    let la = xs.iter().zip(ys).map(|(x, y)| y.ln() - b * x.ln()).sum::<f64>() / n;
    let a = la.exp();
    Ok(ScalingFit {
        a,
        b,
        residual: ScalingFit::log_rms(a, b, xs, ys),
    })
}

/// `C` in `y = C / x`, least squares in `y`.
pub fn fit_inverse(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_positive(xs, ys, 1)?;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| y / x).sum();
    let sxx: f64 = xs.iter().map(|x| 1.0 / (x * x)).sum();
    Ok(sxy / sxx)
}

/// Number of same-`M_tot` (initial, final) pairs on two sites: `(2S+1)[1 + 2(2S+1)^2]/3`.
pub fn zeta(spin: Spin) -> usize {
    let d = spin.dim();
    d * (1 + 2 * d * d) / 3
}

/// `sqrt(target / (T B))`.
pub fn required_dtau(b: f64, target: f64, final_time: f64) -> Result<f64> {
    if !(b > 0.0 && target > 0.0 && final_time > 0.0) {
        return Err(Error::validation("B, target and T must be positive"));
    }
    Ok((target / (final_time * b)).sqrt())
}

/// Time series of a population or expectation value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
}

impl PopulationSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, sigma: Option<Vec<f64>>) -> Result<Self> {
        if times.len() != values.len() || sigma.as_ref().is_some_and(|s| s.len() != times.len()) {
            return Err(Error::validation("series columns differ in length"));
        }
        Ok(Self { times, values, sigma })
    }
}

/// Mean absolute difference over grid points with `t <= cutoff`.
pub fn average_error(noisy: &PopulationSeries, clean: &PopulationSeries, cutoff: f64) -> Result<f64> {
    if noisy.times.len() != clean.times.len()
        || noisy
            .times
            .iter()
            .zip(&clean.times)
            .any(|(a, b)| (a - b).abs() > 1e-9)
    {
        return Err(Error::validation("series are not on a common time grid"));
    }
    let diffs: Vec<f64> = noisy
        .times
        .iter()
        .zip(noisy.values.iter().zip(&clean.values))
        .filter(|(t, _)| **t <= cutoff + 1e-9)
        .map(|(_, (a, b))| (a - b).abs())
        .collect();
    if diffs.is_empty() {
        return Err(Error::validation("no grid points below the cutoff"));
    }
    Ok(diffs.iter().sum::<f64>() / diffs.len() as f64)
}

/// Probability of reading out `initial` from register probabilities.
///
/// Dicke registers are expected after the inverse dressing, so the initial state is its seed.
pub fn initial_state_population(
    probs: &[f64],
    layout: &EncodingLayout,
    initial: &LatticeBasisState,
) -> Result<f64> {
    let idx = layout.encode_state(initial)?;
    probs
        .get(idx)
        .copied()
        .ok_or_else(|| Error::validation("probability vector shorter than register"))
}

/// Fraction of shots decoding to `initial`.
pub fn shots_initial_population(
    shots: &ShotResult,
    layout: &EncodingLayout,
    initial: &LatticeBasisState,
) -> Result<f64> {
    let idx = layout.encode_state(initial)?;
    Ok(shots.count(idx) as f64 / shots.n_shots() as f64)
}

/// Sector-normalized value, or a marker that the sector was never observed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Normalized {
    Value(f64),
    Undefined,
}

impl Normalized {
    pub fn value(self) -> Option<f64> {
        match self {
            Normalized::Value(v) => Some(v),
            Normalized::Undefined => None,
        }
    }
}

/// `<S^z_a S^z_b>` estimates in units of ħ².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorEstimate {
    /// Sum over every mapped outcome.
    pub raw: f64,
    /// Restricted to the initial `M_tot` sector and renormalized.
    pub normalized: Normalized,
    /// Weight of the initial `M_tot` sector.
    pub p_sector: f64,
}

/// Correlator from `(register index, weight)` pairs whose weights sum to one.
pub fn correlator_from_distribution(
    dist: impl IntoIterator<Item = (usize, f64)>,
    layout: &EncodingLayout,
    site_a: usize,
    site_b: usize,
    twice_mtot: i32,
) -> Result<CorrelatorEstimate> {
    if site_a >= layout.n_sites() || site_b >= layout.n_sites() {
        return Err(Error::validation("correlator site outside lattice"));
    }
    let (mut raw, mut sec, mut sec_w) = (0.0, 0.0, 0.0);
    for (idx, w) in dist {
        if w == 0.0 {
            continue;
        }
        if let Some(s) = layout.decode_index(idx) {
            let v = s.m(site_a) * s.m(site_b) * w;
            raw += v;
            if s.twice_total() == twice_mtot {
                sec += v;
                sec_w += w;
            }
        }
    }
    Ok(CorrelatorEstimate {
        raw,
        normalized: if sec_w > 0.0 {
            Normalized::Value(sec / sec_w)
        } else {
            Normalized::Undefined
        },
        p_sector: sec_w,
    })
}

/// Correlator estimated from measurement counts.
pub fn correlator_szsz(
    shots: &ShotResult,
    layout: &EncodingLayout,
    site_a: usize,
    site_b: usize,
    twice_mtot: i32,
) -> Result<CorrelatorEstimate> {
    let n = shots.n_shots() as f64;
    correlator_from_distribution(
        shots.counts().iter().map(|(&k, &c)| (k, c as f64 / n)),
        layout,
        site_a,
        site_b,
        twice_mtot,
    )
}

/// Correlator from exact register probabilities.
pub fn correlator_from_probabilities(
    probs: &[f64],
    layout: &EncodingLayout,
    site_a: usize,
    site_b: usize,
    twice_mtot: i32,
) -> Result<CorrelatorEstimate> {
    correlator_from_distribution(
        probs.iter().copied().enumerate(),
        layout,
        site_a,
        site_b,
        twice_mtot,
    )
}

/// Exact two-site populations `|<f| exp(-i H t) |i>|^2`, indexed `[f][i]` in spin-basis order.
pub fn exact_two_site_populations(spin: Spin, t: f64) -> Result<Vec<Vec<f64>>> {
    let lat = Lattice::open_chain(spin, 2)?;
    let h = build_heisenberg(&lat)?;
    let dim = h.dim();
    let u = unitary_exp(h.matrix(), t);
    Ok((0..dim)
        .map(|f| (0..dim).map(|i| u[(f, i)].norm_sqr()).collect())
        .collect())
}

/// `(1/zeta) sum over same-M_tot pairs of |p - p_exact|`.
pub fn discrepancy(spin: Spin, p: &[Vec<f64>], exact: &[Vec<f64>]) -> f64 {
    let d = spin.dim();
    let mut total = 0.0;
    for i in 0..d * d {
        for f in 0..d * d {
            if (i / d + i % d) == (f / d + f % d) {
                total += (p[f][i] - exact[f][i]).abs();
            }
        }
    }
    total / zeta(spin) as f64
}

/// Populations renormalized per initial state over its `M_tot` sector.
pub fn normalize_in_sector(spin: Spin, p: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = spin.dim();
    let sector = |k: usize| k / d + k % d;
    let mut out = vec![vec![0.0; d * d]; d * d];
    for i in 0..d * d {
        let tot: f64 = (0..d * d)
            .filter(|&f| sector(f) == sector(i))
            .map(|f| p[f][i])
            .sum();
        for f in 0..d * d {
            if sector(f) == sector(i) && tot > 0.0 {
                out[f][i] = p[f][i] / tot;
            }
        }
    }
    out
}

/// Two-site Dicke Trotter evolution restricted to fixed-Hamming-weight sectors.
///
/// For one qubit pair the three rotations of a Trotter step multiply to
/// `exp(-i theta (XX + YY + ZZ)) = e^{i theta} (cos 2theta - i sin 2theta SWAP)`.
/// The global phase is dropped. Each weight sector is evolved on its own.
pub struct DickeSectorPropagator {
    spin: Spin,
    sectors: Vec<Sector>,
}

struct Sector {
    /// Site weights `(w1, w0)` of the initial columns.
    columns: Vec<(usize, usize)>,
    /// Register states of this weight.
    states: Vec<usize>,
    /// Per gate: swapped pairs of positions with distinct bits.
    pairs: Vec<Vec<(u32, u32)>>,
    /// Per gate: positions whose two bits agree.
    fixed: Vec<Vec<u32>>,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl DickeSectorPropagator {
    pub fn new(spin: Spin) -> Result<Self> {
        let k = spin.two_s() as usize;
        if 2 * k > 24 {
            return Err(Error::resource("two-site Dicke qubits", 2 * k as u64, 24));
        }
        let n = 2 * k;
        let gates: Vec<(usize, usize)> = (0..k).flat_map(|a| (k..2 * k).map(move |b| (a, b))).collect();
        let mut sectors = Vec::new();
        for w in 0..=n {
            let states: Vec<usize> = (0..1usize << n)
                .filter(|s| s.count_ones() as usize == w)
                .collect();
            let pos: std::collections::HashMap<usize, u32> =
                states.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
            let mut pairs = Vec::with_capacity(gates.len());
            let mut fixed = Vec::with_capacity(gates.len());
            for &(a, b) in &gates {
                let (ma, mb) = (1usize << a, 1usize << b);
                let mut pv = Vec::new();
                let mut fv = Vec::new();
                for (i, &s) in states.iter().enumerate() {
                    let ba = s & ma != 0;
                    let bb = s & mb != 0;
                    if ba == bb {
                        fv.push(i as u32);
                    } else if ba {
                        pv.push((i as u32, pos[&(s ^ ma ^ mb)]));
                    }
                }
                pairs.push(pv);
                fixed.push(fv);
            }
            let columns = (0..=k)
                .filter(|&w0| w >= w0 && w - w0 <= k)
                .map(|w0| (w - w0, w0))
                .collect();
            sectors.push(Sector {
                columns,
                states,
                pairs,
                fixed,
            });
        }
        Ok(Self { spin, sectors })
    }

    /// Populations `[f][i]` (spin-basis order) after `n_steps` steps of size `dtau`,
    /// measured as Dicke-state overlaps.
    pub fn populations(&self, dtau: f64, n_steps: usize) -> Vec<Vec<f64>> {
        let k = self.spin.two_s() as usize;
        let d = self.spin.dim();
        let low = (1usize << k) - 1;
        let (s2, c2) = (dtau / 2.0).sin_cos();
        let mis = Complex64::new(0.0, -s2);
        let diag = Complex64::new(c2, -s2);
        let mut out = vec![vec![0.0; d * d]; d * d];
        let level = |w: usize| k - w;
        for sec in &self.sectors {
            let nc = sec.columns.len();
            let class = |s: usize| ((s >> k).count_ones() as usize, (s & low).count_ones() as usize);
            let mut psi = vec![Complex64::new(0.0, 0.0); sec.states.len() * nc];
            for (i, &s) in sec.states.iter().enumerate() {
                for (c, &(w1, w0)) in sec.columns.iter().enumerate() {
                    if class(s) == (w1, w0) {
                        psi[i * nc + c] = Complex64::new(1.0 / (binom(k, w1) * binom(k, w0)).sqrt(), 0.0);
                    }
                }
            }
            for _ in 0..n_steps {
                for (pv, fv) in sec.pairs.iter().zip(&sec.fixed) {
                    for &(i, j) in pv {
                        let (i, j) = (i as usize * nc, j as usize * nc);
                        for c in 0..nc {
                            let a = psi[i + c];
                            let b = psi[j + c];
                            psi[i + c] = a * c2 + mis * b;
                            psi[j + c] = b * c2 + mis * a;
                        }
                    }
                    for &i in fv {
                        let i = i as usize * nc;
                        for v in &mut psi[i..i + nc] {
                            *v *= diag;
                        }
                    }
                }
            }
            // overlaps with Dicke products
            for &(fw1, fw0) in &sec.columns {
                let norm = 1.0 / (binom(k, fw1) * binom(k, fw0)).sqrt();
                let mut amp = vec![Complex64::new(0.0, 0.0); nc];
                for (i, &s) in sec.states.iter().enumerate() {
                    if class(s) == (fw1, fw0) {
                        for c in 0..nc {
                            amp[c] += psi[i * nc + c] * norm;
                        }
                    }
                }
                let f = level(fw1) * d + level(fw0);
                for (c, &(w1, w0)) in sec.columns.iter().enumerate() {
                    let i = level(w1) * d + level(w0);
                    out[f][i] = amp[c].norm_sqr();
                }
            }
        }
        out
    }
}

/// Trotter discrepancy of the two-site Dicke encoding at `t = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub two_s: u32,
    /// `(N_ST, raw, mitigated)`.
    pub per_n: Vec<(usize, f64, f64)>,
    /// Prefactor of `raw = B / N^2`.
    pub b: f64,
    /// Prefactor of `mitigated = B_norm / N^2`.
    pub b_norm: f64,
    /// Free log-log slopes, for checking the `N^-2` law.
    pub slope: f64,
    pub slope_norm: f64,
    pub mixed_baseline: f64,
    pub zeta: usize,
}

/// Noise-free discrepancy for each `N_ST` (with `dtau = 1/N_ST`).
///
/// Both raw and sector-normalized values are reported; fits skip exact zeros.
pub fn trotter_discrepancy(spin: Spin, n_steps: &[usize]) -> Result<DiscrepancyReport> {
    if n_steps.is_empty() || n_steps.contains(&0) {
        return Err(Error::validation("step counts must be positive"));
    }
    let exact = exact_two_site_populations(spin, 1.0)?;
    let prop = DickeSectorPropagator::new(spin)?;
    let mut per_n = Vec::with_capacity(n_steps.len());
    for &n in n_steps {
        let p = prop.populations(1.0 / n as f64, n);
        let raw = discrepancy(spin, &p, &exact);
        let norm = discrepancy(spin, &normalize_in_sector(spin, &p), &exact);
        per_n.push((n, raw, norm));
    }
    let fit = |sel: fn(&(usize, f64, f64)) -> f64| -> (f64, f64) {
        let pts: Vec<(f64, f64)> = per_n
            .iter()
            .filter(|r| sel(r) > 0.0)
            .map(|r| (r.0 as f64, sel(r)))
            .collect();
        if pts.len() < 2 {
            return (0.0, f64::NAN);
        }
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let b = fit_fixed_exponent(&xs, &ys, -2.0).map(|f| f.a).unwrap_or(0.0);
        let slope = fit_power_law(&xs, &ys).map(|f| f.b).unwrap_or(f64::NAN);
        (b, slope)
    };
    let (b, slope) = fit(|r| r.1);
    let (b_norm, slope_norm) = fit(|r| r.2);
    Ok(DiscrepancyReport {
        two_s: spin.two_s(),
        per_n,
        b,
        b_norm,
        slope,
        slope_norm,
        mixed_baseline: mixed_baseline(spin)?.0,
        zeta: zeta(spin),
    })
}

/// Discrepancy of the completely mixed register, and its per-state population `2^{-4S}`.
pub fn mixed_baseline(spin: Spin) -> Result<(f64, f64)> {
    let d = spin.dim();
    let p = 0.5f64.powi(2 * spin.two_s() as i32);
    let exact = exact_two_site_populations(spin, 1.0)?;
    let flat = vec![vec![p; d * d]; d * d];
    Ok((discrepancy(spin, &flat, &exact), p))
}

/// Populations `[f][i]` from full Dicke circuits on the qubit density-matrix path.
///
/// With `shots = Some((n, seed))` each initial state is sampled `n` times.
pub fn circuit_populations(
    spin: Spin,
    n_steps: usize,
    noise: NoiseConfig,
    shots: Option<(usize, u64)>,
) -> Result<Vec<Vec<f64>>> {
    let lat = Lattice::open_chain(spin, 2)?;
    let layout = EncodingLayout::new(EncodingKind::Dicke, spin, 2)?;
    let h = HamiltonianSum::Pauli(build_dicke(&lat)?);
    let dtau = 1.0 / n_steps.max(1) as f64;
    let tc = trotter_parts(&h, &layout, TrotterPlan::new(dtau, n_steps)?, true)?;
    let d = spin.dim();
    let mut out = vec![vec![0.0; d * d]; d * d];
    for i in 0..d * d {
        let init = LatticeBasisState::from_index(spin, 2, i);
        let mut gates: Vec<Gate> = prep_gates(&layout, &init)?;
        gates.extend(tc.to_circuit().gates().iter().cloned());
        let mut rho = DensityMatrix::pure_basis(layout.register(), 0)?;
        for g in &gates {
            rho.apply_gate(g, noise);
        }
        let probs = rho.probabilities();
        let probs = match shots {
            Some((n, seed)) => {
                let sr = sample_shots(&probs, layout.register(), n, seed.wrapping_add(i as u64))?;
                sr.frequencies()
            }
            None => probs,
        };
        for (f, row) in out.iter_mut().enumerate() {
            let fs = LatticeBasisState::from_index(spin, 2, f);
            row[i] = probs[layout.encode_state(&fs)?];
        }
    }
    Ok(out)
}

/// `(N_ST, raw, mitigated)` discrepancy under qubit noise.
pub fn noisy_discrepancy(
    spin: Spin,
    n_steps: &[usize],
    noise: NoiseConfig,
    shots: Option<(usize, u64)>,
) -> Result<Vec<(usize, f64, f64)>> {
    let exact = exact_two_site_populations(spin, 1.0)?;
    n_steps
        .iter()
        .map(|&n| {
            let p = circuit_populations(spin, n, noise, shots)?;
            Ok((
                n,
                discrepancy(spin, &p, &exact),
                discrepancy(spin, &normalize_in_sector(spin, &p), &exact),
            ))
        })
        .collect()
}

/// Results of fitting `dtau(Delta = target) = C / S` over several spins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSizeLaw {
    /// `(2S, dtau raw, dtau mitigated)`.
    pub per_s: Vec<(u32, f64, f64)>,
    pub c: f64,
    pub c_norm: f64,
}

pub fn step_size_law(reports: &[DiscrepancyReport], target: f64) -> Result<StepSizeLaw> {
    let mut per_s = Vec::new();
    for r in reports {
        per_s.push((
            r.two_s,
            required_dtau(r.b, target, 1.0)?,
            required_dtau(r.b_norm, target, 1.0)?,
        ));
    }
    let xs: Vec<f64> = per_s.iter().map(|r| r.0 as f64 / 2.0).collect();
    let raw: Vec<f64> = per_s.iter().map(|r| r.1).collect();
    let norm: Vec<f64> = per_s.iter().map(|r| r.2).collect();
    Ok(StepSizeLaw {
        c: fit_inverse(&xs, &raw)?,
        c_norm: fit_inverse(&xs, &norm)?,
        per_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin(t: u32) -> Spin {
        Spin::new(t).unwrap()
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let xs = [1.0, 2.0, 3.0, 5.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let f = fit_power_law(&xs, &ys).unwrap();
        assert!((f.a - 3.0).abs() < 1e-10 && (f.b - 2.0).abs() < 1e-10);
        let g = fit_power_law_linear(&xs, &ys).unwrap();
        assert!((g.a - 3.0).abs() < 1e-10 && (g.b - 2.0).abs() < 1e-10);
        assert!(fit_power_law(&[1.0, -2.0], &[1.0, 2.0]).is_err());
        assert!(fit_power_law(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn zeta_closed_form_matches_pair_count() {
        for t in 1..=9u32 {
            let d = t as usize + 1;
            let mut count = 0;
            for i in 0..d * d {
                for f in 0..d * d {
                    if i / d + i % d == f / d + f % d {
                        count += 1;
                    }
                }
            }
            assert_eq!(zeta(spin(t)), count);
        }
        assert_eq!(zeta(spin(1)), 6);
        assert_eq!(zeta(spin(2)), 19);
    }

    #[test]
    fn dtau_square_root_law() {
        let a = required_dtau(0.5, 0.01, 1.0).unwrap();
        assert!((required_dtau(0.5, 0.04, 1.0).unwrap() - 2.0 * a).abs() < 1e-15);
        assert!((required_dtau(0.5, 0.01, 2.0).unwrap() - a / 2f64.sqrt()).abs() < 1e-15);
        assert!(required_dtau(0.0, 0.01, 1.0).is_err());
    }

    #[test]
    fn average_error_basics() {
        let a = PopulationSeries::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.2], None).unwrap();
        let b = PopulationSeries::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.4, 0.0], None).unwrap();
        assert_eq!(average_error(&a, &a, 5.0).unwrap(), 0.0);
        assert!((average_error(&a, &b, 1.0).unwrap() - 0.05).abs() < 1e-15);
        assert!(average_error(&a, &b, -1.0).is_err());
    }

    #[test]
    fn spin_half_discrepancy_vanishes() {
        let r = trotter_discrepancy(spin(1), &[2, 8, 32]).unwrap();
        for (_, raw, norm) in r.per_n {
            assert!(raw < 1e-13 && norm < 1e-13);
        }
    }

    #[test]
    fn sector_propagator_matches_circuit_path() {
        for t in [2u32, 3] {
            let s = spin(t);
            let prop = DickeSectorPropagator::new(s).unwrap();
            let a = prop.populations(0.5, 2);
            let b = circuit_populations(s, 2, NoiseConfig::off(), None).unwrap();
            for (ra, rb) in a.iter().zip(&b) {
                for (x, y) in ra.iter().zip(rb) {
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn spin_one_discrepancy_is_second_order_and_decreasing() {
        let ns = [2, 8, 32, 128];
        let r = trotter_discrepancy(spin(2), &ns).unwrap();
        assert!(r.slope > -2.2 && r.slope < -1.8, "slope {}", r.slope);
        for w in r.per_n.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
        assert!(r.per_n.iter().all(|x| x.2 <= x.1 + 1e-15));
    }

    #[test]
    fn mixed_population_for_spin_one() {
        let (_, p) = mixed_baseline(spin(2)).unwrap();
        assert_eq!(p, 1.0 / 16.0);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn normalized_sector_sums_to_one() {
        let s = spin(3);
        let p = DickeSectorPropagator::new(s).unwrap().populations(0.25, 4);
        let pn = normalize_in_sector(s, &p);
        let d = s.dim();
        for i in 0..d * d {
            let tot: f64 = (0..d * d)
                .filter(|f| f / d + f % d == i / d + i % d)
                .map(|f| pn[f][i])
                .sum();
            assert!((tot - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn correlator_marks_empty_sector() {
        let s = spin(1);
        let layout = EncodingLayout::new(EncodingKind::Dicke, s, 2).unwrap();
        // |00> decodes to M = (1/2, 1/2), sector 2M_tot = 2
        let est = correlator_from_distribution([(0usize, 1.0)], &layout, 0, 1, -2).unwrap();
        assert_eq!(est.normalized, Normalized::Undefined);
        assert!((est.raw - 0.25).abs() < 1e-15);
        let est = correlator_from_distribution([(0usize, 1.0)], &layout, 0, 1, 2).unwrap();
        assert_eq!(est.normalized, Normalized::Value(0.25));
        assert_eq!(est.p_sector, 1.0);
    }
}
