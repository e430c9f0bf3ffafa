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

//! Named experiment pipelines and their CSV/JSON outputs.

use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    average_error, correlator_from_probabilities, correlator_szsz, initial_state_population,
    noisy_discrepancy, step_size_law, trotter_discrepancy, DiscrepancyReport, Normalized, PopulationSeries,
    StepSizeLaw,
};
use crate::circuit::{prep_gates, trotter_parts, Gate, Register, TrotterPlan};
use crate::density::{DensityMatrix, NoiseConfig, MAX_DENSITY_DIM};
use crate::encoding::{EncodingKind, EncodingLayout};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_encoded, compact_scaling_study, term_stats, CompactScalingStudy};
use crate::shots::{bootstrap_std, sample_shots, ShotResult, DEFAULT_BOOTSTRAP_RESAMPLES};
use crate::spin::{
    basis_vector, build_heisenberg, pt2_correlator, szsz_expectation, ExactPropagator, Lattice,
    LatticeBasisState, Spin,
};
use crate::statevector::{apply_gate, probabilities, MAX_STATEVECTOR_QUBITS};

/// Cutoff time for the average population error.
pub const EPS_BAR_CUTOFF: f64 = 3.2;
/// Step counts of the discrepancy fits.
pub const DISCREPANCY_GRID: [usize; 6] = [2, 8, 32, 128, 512, 2048];
/// Step counts of the noisy discrepancy sweep.
pub const NOISY_GRID: [usize; 6] = [1, 2, 4, 8, 16, 32];
/// Target discrepancy of the step-size law.
pub const STEP_LAW_TARGET: f64 = 0.01;
const MAX_SHOTS: usize = 10_000_000;
const MAX_STEPS: usize = 100_000;

/// Fully resolved parameters of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: String,
    pub mapping: EncodingKind,
    #[serde(rename = "twoS")]
    pub two_s: u32,
    #[serde(rename = "nSites")]
    pub n_sites: usize,
    pub edges: Vec<(usize, usize)>,
    pub dtau: f64,
    #[serde(rename = "nStepsMax")]
    pub n_steps_max: usize,
    #[serde(rename = "nShots")]
    pub n_shots: usize,
    pub seed: u64,
    pub noise: f64,
    pub out: PathBuf,
}

fn chain_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

impl ExperimentSpec {
    /// Defaults for a command name (`terms`, `evolve`, `chain4`, `scaling`).
    pub fn defaults(experiment: &str) -> Self {
        let mut s = ExperimentSpec {
            experiment: experiment.to_string(),
            mapping: EncodingKind::Dicke,
            two_s: 2,
            n_sites: 2,
            edges: chain_edges(2),
            dtau: 0.2,
            n_steps_max: 31,
            n_shots: 0,
            seed: 1,
            noise: 0.0,
            out: PathBuf::from("out"),
        };
        match experiment {
            "terms" => s.two_s = 10,
            "chain4" => {
                s.n_sites = 4;
                s.edges = chain_edges(4);
                s.dtau = std::f64::consts::PI / 10.0;
                s.n_steps_max = 11;
            }
            "scaling" => {
                s.two_s = 7;
                s.n_steps_max = 2048;
                s.dtau = 1.0;
            }
            _ => {}
        }
        s
    }

    pub fn spin(&self) -> Result<Spin> {
        Spin::new(self.two_s)
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.spin()?, self.n_sites, self.edges.clone())
    }

    /// `|M_{N-1} = -S, ..., M_1 = -S, M_0 = S>`.
    pub fn initial_state(&self) -> Result<LatticeBasisState> {
        let t = self.two_s as i32;
        let mut m = vec![-t; self.n_sites];
        m[0] = t;
        LatticeBasisState::new(self.spin()?, m)
    }

    pub fn noise_config(&self) -> Result<NoiseConfig> {
        NoiseConfig::new(self.noise)
    }

    /// Argument checks and resource caps, run before anything large is allocated.
    pub fn validate(&self) -> Result<()> {
        let spin = self.spin()?;
        self.lattice()?;
        if !(self.dtau.is_finite() && self.dtau > 0.0) {
            return Err(Error::validation("--dtau must be positive"));
        }
        self.noise_config()?;
        if self.n_shots > MAX_SHOTS {
            return Err(Error::resource("shots", self.n_shots as u64, MAX_SHOTS as u64));
        }
        if self.n_steps_max > MAX_STEPS {
            return Err(Error::resource(
                "Trotter steps",
                self.n_steps_max as u64,
                MAX_STEPS as u64,
            ));
        }
        match self.experiment.as_str() {
            "evolve" | "chain4" => {
                if self.experiment == "chain4" && self.mapping != EncodingKind::Dicke {
                    return Err(Error::validation("chain4 runs the Dicke mapping only"));
                }
                let layout = EncodingLayout::new(self.mapping, spin, self.n_sites)?;
                check_register(layout.register(), self.noise > 0.0)?;
            }
            "scaling" => {
                if self.noise > 0.0 {
                    let q = 2 * self.two_s as usize;
                    if q > 12 {
                        return Err(Error::resource("noisy density-matrix qubits", q as u64, 12));
                    }
                } else if 2 * self.two_s as usize > 24 {
                    return Err(Error::resource(
                        "two-site Dicke qubits",
                        2 * self.two_s as u64,
                        24,
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Single-line JSON used in file headers.
    pub fn header_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

fn check_register(reg: Register, noisy: bool) -> Result<()> {
    let dim = reg.dim();
    if noisy {
        match dim {
            Some(d) if d <= MAX_DENSITY_DIM => Ok(()),
            _ => Err(Error::resource(
                "density-matrix dimension",
                dim.map(|d| d as u64).unwrap_or(u64::MAX),
                MAX_DENSITY_DIM as u64,
            )),
        }
    } else {
        let cap = 1usize << MAX_STATEVECTOR_QUBITS;
        match dim {
            Some(d) if d <= cap => Ok(()),
            _ => Err(Error::resource(
                "state-vector dimension",
                dim.map(|d| d as u64).unwrap_or(u64::MAX),
                cap as u64,
            )),
        }
    }
}

/// Independent stream seeds from one user seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut z = seed;
    for &t in tags {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(t);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

/// Axes and series of a CSV file, read back by the plotter.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotHint {
    pub x: String,
    pub y: Vec<String>,
    pub group: Option<String>,
    pub log_x: bool,
    pub log_y: bool,
    pub title: String,
}

impl PlotHint {
    fn line(&self) -> String {
        let mut s = format!("x={} y={}", self.x, self.y.join(","));
        if let Some(g) = &self.group {
            write!(s, " group={g}").unwrap();
        }
        if self.log_x {
            s.push_str(" logx");
        }
        if self.log_y {
            s.push_str(" logy");
        }
        write!(s, " title={}", self.title.replace(' ', "_")).unwrap();
        s
    }
}

/// A table plus the metadata written as `#` comments.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub plot: Option<PlotHint>,
}

impl CsvTable {
    fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            plot: None,
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV text with a header recording the run parameters and seed.
    pub fn render(&self, spec: &ExperimentSpec) -> String {
        let mut s = String::new();
        writeln!(s, "# spinenc {}", self.name).unwrap();
        writeln!(s, "# spec: {}", spec.header_json()).unwrap();
        writeln!(s, "# seed: {}", spec.seed).unwrap();
        if let Some(p) = &self.plot {
            writeln!(s, "# plot: {}", p.line()).unwrap();
        }
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for r in &self.rows {
            writeln!(s, "{}", r.join(",")).unwrap();
        }
        s
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn f(x: f64) -> String {
    format!("{x}")
}

fn spin_label(two_s: u32) -> String {
    if two_s.is_multiple_of(2) {
        (two_s / 2).to_string()
    } else {
        format!("{two_s}/2")
    }
}

// ---------------------------------------------------------------- terms

/// Output of the term-count experiment.
pub struct TermsOutput {
    pub fig2: CsvTable,
    pub appendix: CsvTable,
    pub study: CompactScalingStudy,
}

/// Term statistics of all four mappings for `1 <= 2S <= max_two_s`, plus the compact scaling study
/// over `1 <= 2S <= 63`.
pub fn run_terms(max_two_s: u32) -> Result<TermsOutput> {
    let mut fig2 = CsvTable::new(
        "fig2_terms",
        &["twoS", "S", "mapping", "L", "LMultiq", "histogram"],
    );
    fig2.plot = Some(PlotHint {
        x: "twoS".into(),
        y: vec!["L".into()],
        group: Some("mapping".into()),
        log_x: false,
        log_y: true,
        title: "two-site term count".into(),
    });
    for t in 1..=max_two_s {
        let lat = Lattice::open_chain(Spin::new(t)?, 2)?;
        for kind in EncodingKind::ALL {
            let h = build_encoded(kind, &lat).map_err(|e| match e {
                Error::Resource {
                    what,
                    requested,
                    limit,
                } => Error::Resource {
                    what: format!("{what} (S={}, {kind})", spin_label(t)),
                    requested,
                    limit,
                },
                other => other,
            })?;
            let st = term_stats(&h);
            fig2.push(vec![
                t.to_string(),
                spin_label(t),
                kind.name().to_string(),
                st.l.to_string(),
                st.l_multiq.to_string(),
                st.histogram_text(),
            ]);
        }
    }
    let all: Vec<u32> = (1..=63).collect();
    let study = compact_scaling_study(&all)?;
    let mut appendix = CsvTable::new("appendixA", &["twoS", "S", "Kq", "Lcompact", "fit1", "fit2"]);
    appendix.plot = Some(PlotHint {
        x: "twoS".into(),
        y: vec!["Lcompact".into(), "fit1".into(), "fit2".into()],
        group: None,
        log_x: true,
        log_y: true,
        title: "compact term count".into(),
    });
    for &(t, l) in &study.per_s {
        let s = t as f64 / 2.0;
        appendix.push(vec![
            t.to_string(),
            spin_label(t),
            crate::encoding::compact_width(Spin::new(t)?).to_string(),
            l.to_string(),
            f(study.fit_power.eval(s)),
            f(study.fit_averaged.eval(s)),
        ]);
    }
    Ok(TermsOutput {
        fig2,
        appendix,
        study,
    })
}

// ---------------------------------------------------------------- evolve

/// One time point of a population run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveRow {
    pub n_steps: usize,
    pub t: f64,
    pub p_exact: f64,
    pub p_trotter: f64,
    /// Noisy and/or shot-sampled estimate; equals `p_trotter` when both are off.
    pub p_model: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOutput {
    pub rows: Vec<EvolveRow>,
    /// Average `|p_model - p_trotter|` over `t <= 3.2`.
    pub eps_bar: f64,
}

/// Register probabilities after `0..=n_max` Trotter steps, measured after inverse dressing.
pub fn trotter_probability_series(
    layout: &EncodingLayout,
    lattice: &Lattice,
    initial: &LatticeBasisState,
    dtau: f64,
    n_max: usize,
    noise: Option<NoiseConfig>,
) -> Result<Vec<Vec<f64>>> {
    let h = build_encoded(layout.kind(), lattice)?;
    let dressing = layout.kind() == EncodingKind::Dicke;
    let tc = trotter_parts(&h, layout, TrotterPlan::new(dtau, n_max)?, dressing)?;
    let reg = layout.register();
    check_register(reg, noise.is_some())?;
    let mut head: Vec<Gate> = prep_gates(layout, initial)?;
    head.extend(tc.prep.iter().cloned());
    let mut out = Vec::with_capacity(n_max + 1);
    match noise {
        None => {
            let dim = reg.dim().expect("checked");
            let mut psi = vec![Complex64::new(0.0, 0.0); dim];
            psi[0] = Complex64::new(1.0, 0.0);
            for g in &head {
                apply_gate(reg, &mut psi, g);
            }
            for n in 0..=n_max {
                if n > 0 {
                    for g in &tc.step {
                        apply_gate(reg, &mut psi, g);
                    }
                }
                let mut snap = psi.clone();
                for g in &tc.finish {
                    apply_gate(reg, &mut snap, g);
                }
                out.push(probabilities(&snap));
            }
        }
        Some(cfg) => {
            let mut rho = DensityMatrix::pure_basis(reg, 0)?;
            for g in &head {
                rho.apply_gate(g, cfg);
            }
            for n in 0..=n_max {
                if n > 0 {
                    for g in &tc.step {
                        rho.apply_gate(g, cfg);
                    }
                }
                let mut snap = rho.clone();
                for g in &tc.finish {
                    snap.apply_gate(g, cfg);
                }
                out.push(snap.probabilities());
            }
        }
    }
    Ok(out)
}

fn shot_estimate(
    probs: &[f64],
    reg: Register,
    n_shots: usize,
    seed: u64,
    stat: impl Fn(&ShotResult) -> f64,
) -> Result<(f64, f64)> {
    let shots = sample_shots(probs, reg, n_shots, seed)?;
    let value = stat(&shots);
    let sigma = bootstrap_std(
        &shots,
        &stat,
        DEFAULT_BOOTSTRAP_RESAMPLES,
        derive_seed(seed, &[1]),
    )?;
    Ok((value, sigma))
}

/// Initial-state population `p_0(t)`: exact, noise-free Trotter and model (noise and/or shots).
pub fn run_evolve(spec: &ExperimentSpec) -> Result<EvolveOutput> {
    spec.validate()?;
    let spin = spec.spin()?;
    let lattice = spec.lattice()?;
    let layout = EncodingLayout::new(spec.mapping, spin, spec.n_sites)?;
    let init = spec.initial_state()?;
    let init_idx = layout.encode_state(&init)?;

    let h = build_heisenberg(&lattice)?;
    let psi0 = basis_vector(spin, &init);
    let exact = ExactPropagator::new(&h, &psi0)?;
    let spin_idx = init.index(spin);

    let clean = trotter_probability_series(&layout, &lattice, &init, spec.dtau, spec.n_steps_max, None)?;
    let noisy = if spec.noise > 0.0 {
        Some(trotter_probability_series(
            &layout,
            &lattice,
            &init,
            spec.dtau,
            spec.n_steps_max,
            Some(spec.noise_config()?),
        )?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(spec.n_steps_max + 1);
    for n in 0..=spec.n_steps_max {
        let t = n as f64 * spec.dtau;
        let p_exact = exact.state_at(t)[spin_idx].norm_sqr();
        let p_trotter = initial_state_population(&clean[n], &layout, &init)?;
        let model_probs = noisy.as_ref().map(|v| &v[n]).unwrap_or(&clean[n]);
        let (p_model, sigma) = if spec.n_shots > 0 {
            let n_shots = spec.n_shots as f64;
            shot_estimate(
                model_probs,
                layout.register(),
                spec.n_shots,
                derive_seed(spec.seed, &[n as u64]),
                |r| r.count(init_idx) as f64 / n_shots,
            )?
        } else {
            (initial_state_population(model_probs, &layout, &init)?, 0.0)
        };
        rows.push(EvolveRow {
            n_steps: n,
            t,
            p_exact,
            p_trotter,
            p_model,
            sigma,
        });
    }
    let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let model = PopulationSeries::new(times.clone(), rows.iter().map(|r| r.p_model).collect(), None)?;
    let reference = PopulationSeries::new(times, rows.iter().map(|r| r.p_trotter).collect(), None)?;
    let eps_bar = average_error(&model, &reference, EPS_BAR_CUTOFF)?;
    Ok(EvolveOutput { rows, eps_bar })
}

fn evolve_table(name: &str) -> CsvTable {
    let mut t = CsvTable::new(
        name,
        &[
            "series", "nSteps", "t", "pExact", "pTrotter", "pModel", "sigma", "epsBar",
        ],
    );
    t.plot = Some(PlotHint {
        x: "t".into(),
        y: vec!["pExact".into(), "pTrotter".into(), "pModel".into()],
        group: Some("series".into()),
        log_x: false,
        log_y: false,
        title: "initial-state population".into(),
    });
    t
}

fn push_evolve(table: &mut CsvTable, series: &str, out: &EvolveOutput) {
    for r in &out.rows {
        table.push(vec![
            series.to_string(),
            r.n_steps.to_string(),
            f(r.t),
            f(r.p_exact),
            f(r.p_trotter),
            f(r.p_model),
            f(r.sigma),
            f(out.eps_bar),
        ]);
    }
}

fn series_name(spec: &ExperimentSpec) -> String {
    format!("{}-eps{}", spec.mapping.name(), spec.noise)
}

// ---------------------------------------------------------------- chain4

/// One time point of the four-site correlator run, in units of `(hbar S)^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub n_steps: usize,
    pub t: f64,
    pub exact: f64,
    pub raw: f64,
    pub normalized: Normalized,
    pub p_sector: f64,
    pub pt2: f64,
    pub sigma_raw: f64,
}

/// `<S^z_0 S^z_{N-1}>` on a Dicke-encoded open chain.
pub fn run_chain(spec: &ExperimentSpec) -> Result<Vec<ChainRow>> {
    spec.validate()?;
    let spin = spec.spin()?;
    let lattice = spec.lattice()?;
    let layout = EncodingLayout::new(EncodingKind::Dicke, spin, spec.n_sites)?;
    let init = spec.initial_state()?;
    let last = spec.n_sites - 1;
    let s2 = spin.value() * spin.value();
    let twice_mtot = init.twice_total();

    let h = build_heisenberg(&lattice)?;
    let exact = ExactPropagator::new(&h, &basis_vector(spin, &init))?;
    let noise = if spec.noise > 0.0 {
        Some(spec.noise_config()?)
    } else {
        None
    };
    let series = trotter_probability_series(&layout, &lattice, &init, spec.dtau, spec.n_steps_max, noise)?;
    let mut rows = Vec::with_capacity(series.len());
    for (n, probs) in series.iter().enumerate() {
        let t = n as f64 * spec.dtau;
        let ex = szsz_expectation(spin, spec.n_sites, &exact.state_at(t), 0, last) / s2;
        let (est, sigma_raw) = if spec.n_shots > 0 {
            let seed = derive_seed(spec.seed, &[n as u64]);
            let shots = sample_shots(probs, layout.register(), spec.n_shots, seed)?;
            let est = correlator_szsz(&shots, &layout, 0, last, twice_mtot)?;
            let sig = bootstrap_std(
                &shots,
                |r| {
                    correlator_szsz(r, &layout, 0, last, twice_mtot)
                        .map(|e| e.raw)
                        .unwrap_or(f64::NAN)
                },
                DEFAULT_BOOTSTRAP_RESAMPLES,
                derive_seed(seed, &[1]),
            )?;
            (est, sig / s2)
        } else {
            (
                correlator_from_probabilities(probs, &layout, 0, last, twice_mtot)?,
                0.0,
            )
        };
        rows.push(ChainRow {
            n_steps: n,
            t,
            exact: ex,
            raw: est.raw / s2,
            normalized: match est.normalized {
                Normalized::Value(v) => Normalized::Value(v / s2),
                Normalized::Undefined => Normalized::Undefined,
            },
            p_sector: est.p_sector,
            pt2: pt2_correlator(spin, t),
            sigma_raw,
        });
    }
    Ok(rows)
}

fn chain_table(spec: &ExperimentSpec, rows: &[ChainRow], table: &mut CsvTable) {
    for r in rows {
        table.push(vec![
            spec.two_s.to_string(),
            r.n_steps.to_string(),
            f(r.t),
            f(r.exact),
            f(r.raw),
            match r.normalized {
                Normalized::Value(v) => f(v),
                Normalized::Undefined => "undefined".to_string(),
            },
            f(r.p_sector),
            f(r.pt2),
            f(r.sigma_raw),
        ]);
    }
}

fn new_chain_table() -> CsvTable {
    let mut t = CsvTable::new(
        "fig6_correlator",
        &[
            "twoS",
            "nSteps",
            "t",
            "exact",
            "raw",
            "normalized",
            "pMtot",
            "pt2",
            "sigmaRaw",
        ],
    );
    t.plot = Some(PlotHint {
        x: "t".into(),
        y: vec!["exact".into(), "raw".into(), "normalized".into()],
        group: Some("twoS".into()),
        log_x: false,
        log_y: false,
        title: "end-to-end correlator".into(),
    });
    t
}

// ---------------------------------------------------------------- scaling

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingOutput {
    pub reports: Vec<DiscrepancyReport>,
    /// Present when at least one spin with `S >= 2` was run.
    pub law: Option<StepSizeLaw>,
    /// `(2S, N_ST, raw, mitigated)` under noise.
    pub noisy: Vec<(u32, usize, f64, f64)>,
}

/// Discrepancy sweep over `2S = 1..=spec.two_s`; with noise, the noisy sweep over `2S = 2..=spec.two_s`.
pub fn run_scaling(spec: &ExperimentSpec) -> Result<ScalingOutput> {
    spec.validate()?;
    let mut reports = Vec::new();
    for t in 1..=spec.two_s {
        reports.push(trotter_discrepancy(Spin::new(t)?, &DISCREPANCY_GRID)?);
    }
    let fit_set: Vec<DiscrepancyReport> = reports.iter().filter(|r| r.two_s >= 4).cloned().collect();
    let law = if fit_set.is_empty() {
        None
    } else {
        Some(step_size_law(&fit_set, STEP_LAW_TARGET)?)
    };
    let mut noisy = Vec::new();
    if spec.noise > 0.0 {
        let shots = (spec.n_shots > 0).then_some((spec.n_shots, spec.seed));
        for t in 2..=spec.two_s {
            for (n, raw, norm) in noisy_discrepancy(Spin::new(t)?, &NOISY_GRID, spec.noise_config()?, shots)?
            {
                noisy.push((t, n, raw, norm));
            }
        }
    }
    Ok(ScalingOutput { reports, law, noisy })
}

fn scaling_tables(out: &ScalingOutput) -> (CsvTable, Option<CsvTable>) {
    let mut t7 = CsvTable::new(
        "fig7_discrepancy",
        &[
            "twoS",
            "S",
            "nSteps",
            "dtau",
            "delta",
            "deltaNorm",
            "deltaMix",
            "fitB",
            "fitBNorm",
        ],
    );
    t7.plot = Some(PlotHint {
        x: "nSteps".into(),
        y: vec!["delta".into(), "deltaNorm".into()],
        group: Some("twoS".into()),
        log_x: true,
        log_y: true,
        title: "Trotter discrepancy".into(),
    });
    for r in &out.reports {
        for &(n, raw, norm) in &r.per_n {
            let nn = (n * n) as f64;
            t7.push(vec![
                r.two_s.to_string(),
                spin_label(r.two_s),
                n.to_string(),
                f(1.0 / n as f64),
                f(raw),
                f(norm),
                f(r.mixed_baseline),
                f(r.b / nn),
                f(r.b_norm / nn),
            ]);
        }
    }
    if out.noisy.is_empty() {
        return (t7, None);
    }
    let mut t8 = CsvTable::new(
        "fig8_discrepancy",
        &["twoS", "S", "nSteps", "delta", "deltaNorm", "deltaMix"],
    );
    t8.plot = Some(PlotHint {
        x: "nSteps".into(),
        y: vec!["delta".into(), "deltaNorm".into(), "deltaMix".into()],
        group: Some("twoS".into()),
        log_x: true,
        log_y: true,
        title: "noisy Trotter discrepancy".into(),
    });
    for &(t, n, raw, norm) in &out.noisy {
        let mix = out
            .reports
            .iter()
            .find(|r| r.two_s == t)
            .map(|r| r.mixed_baseline)
            .unwrap_or(f64::NAN);
        t8.push(vec![
            t.to_string(),
            spin_label(t),
            n.to_string(),
            f(raw),
            f(norm),
            f(mix),
        ]);
    }
    (t7, Some(t8))
}

// ---------------------------------------------------------------- files

/// A file produced by a command.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

fn json_file(name: &str, spec: &ExperimentSpec, value: serde_json::Value) -> OutputFile {
    let wrapped = serde_json::json!({ "spec": spec, "seed": spec.seed, "result": value });
    OutputFile {
        name: name.to_string(),
        contents: serde_json::to_string_pretty(&wrapped).expect("json") + "\n",
    }
}

fn csv_file(table: &CsvTable, spec: &ExperimentSpec) -> OutputFile {
    OutputFile {
        name: format!("{}.csv", table.name),
        contents: table.render(spec),
    }
}

/// Files of the `terms` command.
pub fn terms_files(spec: &ExperimentSpec) -> Result<Vec<OutputFile>> {
    spec.validate()?;
    let out = run_terms(spec.two_s)?;
    Ok(vec![
        csv_file(&out.fig2, spec),
        csv_file(&out.appendix, spec),
        json_file(
            "appendixA_fits.json",
            spec,
            serde_json::json!({
                "fit1": out.study.fit_power,
                "fit2": out.study.fit_averaged,
                "fit1LogLog": out.study.fit_power_loglog,
                "fit2LogLog": out.study.fit_averaged_loglog,
                "averages": out.study.averages,
            }),
        ),
    ])
}

/// Files of the `evolve` command.
pub fn evolve_files(spec: &ExperimentSpec) -> Result<Vec<OutputFile>> {
    let out = run_evolve(spec)?;
    let mut t = evolve_table(&format!("populations_{}_2S{}", spec.mapping.name(), spec.two_s));
    let series = series_name(spec);
    push_evolve(&mut t, &series, &out);
    Ok(vec![
        csv_file(&t, spec),
        json_file(
            &format!("{}_summary.json", t.name),
            spec,
            serde_json::json!({ "series": series, "epsBar": out.eps_bar, "cutoff": EPS_BAR_CUTOFF }),
        ),
    ])
}

/// Files of the `chain4` command.
pub fn chain_files(spec: &ExperimentSpec) -> Result<Vec<OutputFile>> {
    let rows = run_chain(spec)?;
    let mut t = new_chain_table();
    t.name = format!("correlator_2S{}", spec.two_s);
    chain_table(spec, &rows, &mut t);
    Ok(vec![csv_file(&t, spec)])
}

/// Files of the `scaling` command.
pub fn scaling_files(spec: &ExperimentSpec) -> Result<Vec<OutputFile>> {
    let out = run_scaling(spec)?;
    let (t7, t8) = scaling_tables(&out);
    let mut files = vec![csv_file(&t7, spec)];
    if let Some(t8) = t8 {
        files.push(csv_file(&t8, spec));
    }
    let fits: Vec<serde_json::Value> = out
        .reports
        .iter()
        .map(|r| {
            serde_json::json!({
                "twoS": r.two_s, "B": r.b, "BNorm": r.b_norm, "slope": r.slope,
                "slopeNorm": r.slope_norm, "deltaMix": r.mixed_baseline, "zeta": r.zeta,
            })
        })
        .collect();
    files.push(json_file(
        "fig7_fits.json",
        spec,
        serde_json::json!({ "perS": fits, "stepLaw": out.law, "target": STEP_LAW_TARGET }),
    ));
    Ok(files)
}

/// Names accepted by [`experiment_files`].
pub const EXPERIMENTS: [&str; 7] = ["fig2", "fig4", "fig5", "fig6", "fig7", "fig8", "all"];

/// Figure reproductions with fixed physical parameters; `base` supplies seed, shots and output.
pub fn experiment_files(name: &str, base: &ExperimentSpec) -> Result<Vec<OutputFile>> {
    let with = |cmd: &str| {
        let mut s = ExperimentSpec::defaults(cmd);
        s.seed = base.seed;
        s.n_shots = base.n_shots;
        s.out = base.out.clone();
        s
    };
    match name {
        "fig2" => terms_files(&with("terms")),
        "fig4" | "fig5" => {
            let two_s = if name == "fig4" { 2 } else { 3 };
            let mut table = evolve_table(&format!("{name}_populations"));
            let mut summary = Vec::new();
            let mut runs: Vec<(EncodingKind, f64)> =
                [EncodingKind::Compact, EncodingKind::Direct, EncodingKind::Dicke]
                    .into_iter()
                    .map(|k| (k, 1e-3))
                    .collect();
            runs.push((EncodingKind::Qudit, 1e-3));
            runs.push((EncodingKind::Qudit, 1e-2));
            let mut last = with("evolve");
            for (k, eps) in runs {
                let mut s = with("evolve");
                s.two_s = two_s;
                s.mapping = k;
                s.noise = eps;
                let out = run_evolve(&s)?;
                let series = series_name(&s);
                push_evolve(&mut table, &series, &out);
                summary.push(serde_json::json!({ "series": series, "epsBar": out.eps_bar }));
                last = s;
            }
            last.experiment = name.to_string();
            last.mapping = EncodingKind::Dicke;
            last.noise = 0.0;
            Ok(vec![
                csv_file(&table, &last),
                json_file(
                    &format!("{name}_summary.json"),
                    &last,
                    serde_json::Value::from(summary),
                ),
            ])
        }
        "fig6" => {
            let mut table = new_chain_table();
            let mut s = with("chain4");
            for t in 1..=5u32 {
                s.two_s = t;
                s.n_steps_max = if t == 2 { 12 } else { 11 };
                chain_table(&s, &run_chain(&s)?, &mut table);
            }
            s.experiment = "fig6".into();
            Ok(vec![csv_file(&table, &s)])
        }
        "fig7" => {
            let mut s = with("scaling");
            s.experiment = "fig7".into();
            let mut files = scaling_files(&{
                let mut v = s.clone();
                v.experiment = "scaling".into();
                v
            })?;
            for file in &mut files {
                file.contents = file
                    .contents
                    .replace("\"experiment\":\"scaling\"", "\"experiment\":\"fig7\"");
            }
            Ok(files)
        }
        "fig8" => {
            let mut s = with("scaling");
            s.two_s = 3;
            s.noise = 1e-3;
            let out = run_scaling(&s)?;
            let (_, t8) = scaling_tables(&out);
            s.experiment = "fig8".into();
            Ok(vec![csv_file(&t8.expect("noise enabled"), &s)])
        }
        "all" => {
            let mut files = Vec::new();
            for n in &EXPERIMENTS[..6] {
                files.extend(experiment_files(n, base)?);
            }
            Ok(files)
        }
        other => Err(Error::validation(format!(
            "unknown experiment '{other}' (expected one of {})",
            EXPERIMENTS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for cmd in ["terms", "evolve", "chain4", "scaling"] {
            ExperimentSpec::defaults(cmd).validate().unwrap();
        }
    }

    #[test]
    fn caps_are_enforced_before_running() {
        let mut s = ExperimentSpec::defaults("chain4");
        s.two_s = 6;
        assert!(matches!(s.validate(), Err(Error::Resource { .. })));
        let mut s = ExperimentSpec::defaults("evolve");
        s.two_s = 6;
        s.mapping = EncodingKind::Direct;
        s.noise = 1e-3;
        assert!(matches!(s.validate(), Err(Error::Resource { .. })));
        let mut s = ExperimentSpec::defaults("evolve");
        s.dtau = -1.0;
        assert!(matches!(s.validate(), Err(Error::Validation(_))));
        let mut s = ExperimentSpec::defaults("evolve");
        s.edges = vec![(0, 0)];
        assert!(matches!(s.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn evolve_starts_at_one() {
        let mut s = ExperimentSpec::defaults("evolve");
        s.n_steps_max = 3;
        let out = run_evolve(&s).unwrap();
        assert!((out.rows[0].p_trotter - 1.0).abs() < 1e-12);
        assert!((out.rows[0].p_exact - 1.0).abs() < 1e-12);
        assert_eq!(out.eps_bar, 0.0);
    }

    #[test]
    fn identical_seed_gives_identical_csv() {
        let mut s = ExperimentSpec::defaults("evolve");
        s.n_steps_max = 4;
        s.n_shots = 256;
        s.seed = 17;
        let a = evolve_files(&s).unwrap();
        let b = evolve_files(&s).unwrap();
        assert_eq!(a, b);
        assert!(a[0]
            .contents
            .starts_with("# spinenc populations_dicke_2S2\n# spec: {"));
        assert!(a[0].contents.contains("\"seed\":17"));
        s.seed = 18;
        assert_ne!(a, evolve_files(&s).unwrap());
    }

    #[test]
    fn chain_starts_anti_aligned() {
        let mut s = ExperimentSpec::defaults("chain4");
        s.two_s = 2;
        s.n_steps_max = 1;
        let rows = run_chain(&s).unwrap();
        assert!((rows[0].raw + 1.0).abs() < 1e-12);
        assert_eq!(rows[0].normalized, Normalized::Value(-1.0));
        assert!((rows[0].exact + 1.0).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, &[0]), derive_seed(1, &[1]));
        assert_eq!(derive_seed(5, &[2, 3]), derive_seed(5, &[2, 3]));
    }

    #[test]
    fn unknown_experiment_is_rejected() {
        let s = ExperimentSpec::defaults("run");
        assert!(matches!(experiment_files("fig99", &s), Err(Error::Validation(_))));
    }
}
