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

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any fail.
//!
//! Run with `cargo test -p spinenc --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;

use spinenc::analysis::{step_size_law, trotter_discrepancy, DiscrepancyReport};
use spinenc::circuit::{Gate, Register};
use spinenc::encoding::{
    dicke_circuit, dicke_gates, dicke_state_vector, total_spin_squared, EncodingKind, EncodingLayout,
};
use spinenc::experiments::{
    evolve_files, run_chain, run_evolve, run_terms, ExperimentSpec, DISCREPANCY_GRID, STEP_LAW_TARGET,
};
use spinenc::hamiltonian::{build_encoded, restrict_to_spin_space, term_stats};
use spinenc::shots::{bootstrap_std, sample_shots, DEFAULT_BOOTSTRAP_RESAMPLES};
use spinenc::spin::{basis_vector, max_abs, szsz_expectation, ExactPropagator};
use spinenc::statevector::run_statevector_from;
use spinenc::{build_heisenberg, pt2_correlator, Lattice, LatticeBasisState, Spin};

use common::{golden_mismatches, GOLDEN_CASES};

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail }
    }
}

fn spin(t: u32) -> Spin {
    Spin::new(t).unwrap()
}

fn fmt_s(two_s: u32) -> String {
    if two_s.is_multiple_of(2) {
        format!("{}", two_s / 2)
    } else {
        format!("{two_s}/2")
    }
}

fn within_rel(x: f64, want: f64, rel: f64) -> bool {
    (x - want).abs() <= rel * want.abs()
}

fn golden_hamiltonians() -> Outcome {
    let mut bad = Vec::new();
    for (name, two_s, kind) in GOLDEN_CASES {
        bad.extend(golden_mismatches(name, two_s, kind));
    }
    let detail = if bad.is_empty() {
        format!("{} files, coefficients within 1e-4", GOLDEN_CASES.len())
    } else {
        bad.join("; ")
    };
    Outcome::new(bad.is_empty(), detail)
}

fn term_counts() -> Outcome {
    let mut bad = Vec::new();
    for two_s in 1..=10u32 {
        let s = two_s as f64 / 2.0;
        let lat = Lattice::open_chain(spin(two_s), 2).unwrap();
        let twelve = (12.0 * s * s).round() as usize;
        let thirty_six = (36.0 * s * s).round() as usize;
        let dicke = term_stats(&build_encoded(EncodingKind::Dicke, &lat).unwrap());
        let qudit = term_stats(&build_encoded(EncodingKind::Qudit, &lat).unwrap());
        let direct = term_stats(&build_encoded(EncodingKind::Direct, &lat).unwrap());
        if dicke.l != twelve {
            bad.push(format!("L_dicke(S={})={} want {twelve}", fmt_s(two_s), dicke.l));
        }
        if dicke.l_multiq != 0 {
            bad.push(format!(
                "L_dicke multi-qubit(S={})={}",
                fmt_s(two_s),
                dicke.l_multiq
            ));
        }
        if qudit.l != twelve {
            bad.push(format!("L_qudit(S={})={} want {twelve}", fmt_s(two_s), qudit.l));
        }
        if direct.l != thirty_six {
            bad.push(format!(
                "L_direct(S={})={} want {thirty_six}",
                fmt_s(two_s),
                direct.l
            ));
        }
    }
    let compact = |t: u32| {
        let lat = Lattice::open_chain(spin(t), 2).unwrap();
        term_stats(&build_encoded(EncodingKind::Compact, &lat).unwrap())
    };
    for (t, want) in [(2, 36), (3, 22), (4, 324)] {
        let l = compact(t).l;
        if l != want {
            bad.push(format!("L_compact(S={})={l} want {want}", fmt_s(t)));
        }
    }
    let hist: Vec<usize> = compact(4).weight_histogram.values().copied().collect();
    if hist != [6, 28, 73, 118, 99] {
        bad.push(format!("L_compact(2) histogram {hist:?}"));
    }
    let detail = if bad.is_empty() {
        "all counts exact for S <= 5".to_string()
    } else {
        bad.join("; ")
    };
    Outcome::new(bad.is_empty(), detail)
}

fn appendix_scaling() -> Outcome {
    let study = run_terms(10).unwrap().study;
    let (p, a) = (study.fit_power, study.fit_averaged);
    let pass = (p.b - 2.4).abs() <= 0.1
        && within_rel(p.a, 6.7, 0.10)
        && (a.b - 2.4).abs() <= 0.1
        && within_rel(a.a, 35.1, 0.10)
        && study.per_s.len() == 63;
    Outcome::new(
        pass,
        format!(
            "a1={:.3} b1={:.3} a2={:.3} b2={:.3} over {} spins",
            p.a,
            p.b,
            a.a,
            a.b,
            study.per_s.len()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for two_s in 1..=5u32 {
        let lat = Lattice::open_chain(spin(two_s), 2).unwrap();
        let h = build_heisenberg(&lat).unwrap();
        for kind in EncodingKind::ALL {
            let layout = EncodingLayout::new(kind, lat.spin(), 2).unwrap();
            let enc = build_encoded(kind, &lat).unwrap();
            let r = restrict_to_spin_space(&enc, &layout).unwrap();
            worst = worst.max(max_abs(&(r - h.matrix())));
        }
    }
    Outcome::new(worst < 1e-9, format!("max deviation {worst:.2e} (tol 1e-9)"))
}

fn dicke_machinery() -> Outcome {
    let mut worst_prep: f64 = 0.0;
    let mut worst_s2: f64 = 0.0;
    for two_s in 1..=7u32 {
        let s = spin(two_s);
        let c = dicke_circuit(s);
        let layout = EncodingLayout::new(EncodingKind::Dicke, s, 1).unwrap();
        let s2 = total_spin_squared(two_s as usize);
        let sv = s.value();
        for m in s.twice_m_values() {
            let seed = layout.encode_site(m).unwrap() as usize;
            let out = run_statevector_from(&c, seed).unwrap();
            let want = dicke_state_vector(s, m).unwrap();
            let err = out
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            worst_prep = worst_prep.max(err);
            let v = DVector::from_vec(want);
            let r = &s2 * &v - &v * Complex64::new(sv * (sv + 1.0), 0.0);
            worst_s2 = worst_s2.max(r.norm());
        }
    }
    // Hand-drawn action: S=1 is a Hadamard-like split, S=3/2 uses A_0 and A_1 as R_Y angles.
    let a0 = 2.0 * (1.0 / 3f64.sqrt()).acos();
    let a1 = 2.0 * (2.0f64 / 3.0).sqrt().acos();
    let angles = |t: u32| -> Vec<f64> {
        dicke_gates(spin(t))
            .iter()
            .filter_map(|g| match g {
                Gate::CRy { theta, .. } => Some(theta.abs()),
                _ => None,
            })
            .collect()
    };
    let has = |v: &[f64], x: f64| v.iter().any(|y| (y - x).abs() < 1e-12);
    let g1 = angles(2);
    let g32 = angles(3);
    let figure_ok = g1.len() == 1 && (g1[0] - PI / 2.0).abs() < 1e-12 && has(&g32, a0) && has(&g32, a1 / 2.0);
    let pass = worst_prep < 1e-10 && worst_s2 < 1e-10 && figure_ok;
    Outcome::new(
        pass,
        format!(
            "prep error {worst_prep:.1e}, S^2 residual {worst_s2:.1e} for S <= 7/2; hand-drawn angles {}",
            if figure_ok { "match" } else { "differ" }
        ),
    )
}

fn chain_populations() -> Outcome {
    let want = [1.0, 0.909, 0.691, 0.402, 0.161];
    let mut parts = Vec::new();
    let mut pass = true;
    for two_s in 1..=5u32 {
        let mut s = ExperimentSpec::defaults("chain4");
        s.two_s = two_s;
        s.n_steps_max = if two_s == 2 { 12 } else { 11 };
        let rows = run_chain(&s).unwrap();
        let last = rows.last().unwrap();
        let w = want[two_s as usize - 1];
        let ok = (last.p_sector - w).abs() <= 1e-3;
        pass &= ok;
        parts.push(format!(
            "S={} t={:.2} p={:.5} want {w} {}",
            fmt_s(two_s),
            last.t,
            last.p_sector,
            if ok { "ok" } else { "off" }
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn trotter_order(reports: &[DiscrepancyReport]) -> Outcome {
    let half = trotter_discrepancy(spin(1), &DISCREPANCY_GRID).unwrap();
    let exact_half = half.per_n.iter().map(|r| r.1.max(r.2)).fold(0.0, f64::max);
    let mut pass = exact_half < 1e-12;
    let mut parts = vec![format!("S=1/2 max {exact_half:.1e}")];
    for r in reports {
        let ok = (-2.2..=-1.8).contains(&r.slope);
        pass &= ok;
        parts.push(format!("S={} slope {:.3}", fmt_s(r.two_s), r.slope));
    }
    Outcome::new(pass, parts.join("; "))
}

fn step_size(reports: &[DiscrepancyReport]) -> Outcome {
    let fit: Vec<DiscrepancyReport> = reports.iter().filter(|r| r.two_s >= 4).cloned().collect();
    let law = step_size_law(&fit, STEP_LAW_TARGET).unwrap();
    let pass = within_rel(law.c, 0.254, 0.15) && within_rel(law.c_norm, 0.453, 0.15);
    Outcome::new(
        pass,
        format!("C={:.4} (0.254) C_norm={:.4} (0.453)", law.c, law.c_norm),
    )
}

fn evolve(kind: EncodingKind, two_s: u32, noise: f64) -> spinenc::experiments::EvolveOutput {
    let mut s = ExperimentSpec::defaults("evolve");
    s.mapping = kind;
    s.two_s = two_s;
    s.noise = noise;
    s.n_shots = 0;
    run_evolve(&s).unwrap()
}

fn qudit_noise() -> Outcome {
    let e1 = evolve(EncodingKind::Qudit, 2, 1e-3).eps_bar;
    let e32 = evolve(EncodingKind::Qudit, 3, 1e-3).eps_bar;
    let sat = evolve(EncodingKind::Qudit, 3, 1e-2);
    let late: Vec<f64> = sat.rows.iter().filter(|r| r.t > 2.0).map(|r| r.p_model).collect();
    let p0 = late.iter().sum::<f64>() / late.len() as f64;
    let pass = (e1 - 0.011).abs() <= 0.004 && (e32 - 0.030).abs() <= 0.008 && (p0 - 0.063).abs() <= 0.01;
    Outcome::new(
        pass,
        format!("S=1 eps={e1:.4} (0.011); S=3/2 eps={e32:.4} (0.030); p0(t>2)={p0:.4} (0.063)"),
    )
}

fn pt2_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for two_s in 1..=5u32 {
        let s = spin(two_s);
        let m = two_s as i32;
        let h = build_heisenberg(&Lattice::open_chain(s, 4).unwrap()).unwrap();
        let init = LatticeBasisState::from_ket_order(s, &[-m, -m, -m, m]).unwrap();
        let prop = ExactPropagator::new(&h, &basis_vector(s, &init)).unwrap();
        let s2 = s.value() * s.value();
        for t in [0.01, 0.02, 0.03, 0.04, 0.05] {
            let c = szsz_expectation(s, 4, &prop.state_at(t), 0, 3) / s2;
            let accel = (c + 1.0) / (t * t);
            let want = (pt2_correlator(s, t) + 1.0) / (t * t);
            worst = worst.max((accel / want - 1.0).abs());
        }
    }
    Outcome::new(
        worst <= 0.05,
        format!("max relative deviation {:.2}% (tol 5%)", 100.0 * worst),
    )
}

fn qubit_noise() -> Outcome {
    let refs = [
        (EncodingKind::Compact, 0.080),
        (EncodingKind::Direct, 0.060),
        (EncodingKind::Dicke, 0.012),
    ];
    let mut parts = Vec::new();
    let mut vals = Vec::new();
    let mut pass = true;
    for (kind, r) in refs {
        let e = evolve(kind, 2, 1e-3).eps_bar;
        let ok = e >= r / 3.0 && e <= 3.0 * r;
        pass &= ok;
        vals.push(e);
        parts.push(format!("{kind} {e:.4} (band {:.3}..{:.3})", r / 3.0, 3.0 * r));
    }
    let ordered = vals[2] < vals[0] && vals[2] < vals[1];
    pass &= ordered;
    parts.push(format!("dicke below compact/direct: {ordered}"));
    Outcome::new(pass, parts.join("; "))
}

fn statistics() -> Outcome {
    let shots = sample_shots(&[0.5, 0.5], Register::Qubits(1), 1024, 7).unwrap();
    let freq = |r: &spinenc::shots::ShotResult| r.count(1) as f64 / r.n_shots() as f64;
    let p = freq(&shots);
    let boot = bootstrap_std(&shots, freq, DEFAULT_BOOTSTRAP_RESAMPLES, 11).unwrap();
    let binom = (p * (1.0 - p) / 1024.0).sqrt();
    let close = within_rel(boot, binom, 0.20);

    let mut s = ExperimentSpec::defaults("evolve");
    s.n_steps_max = 6;
    s.n_shots = 512;
    s.noise = 1e-3;
    s.seed = 2024;
    let a = evolve_files(&s).unwrap();
    let b = evolve_files(&s).unwrap();
    let same = a == b;
    Outcome::new(
        close && same,
        format!("bootstrap {boot:.5} vs binomial {binom:.5}; seeded output identical: {same}"),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let reports: Vec<DiscrepancyReport> = (2..=7u32)
        .map(|t| trotter_discrepancy(spin(t), &DISCREPANCY_GRID).unwrap())
        .collect();
    let discrepancy_time = started.elapsed().as_secs_f64();

    let criteria: Vec<(&str, Check)> = vec![
        ("golden Hamiltonians", Box::new(golden_hamiltonians)),
        ("term counts", Box::new(term_counts)),
        ("compact term scaling fits", Box::new(appendix_scaling)),
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("Dicke machinery", Box::new(dicke_machinery)),
        ("noise-free four-site populations", Box::new(chain_populations)),
        (
            "Trotter exactness and order",
            Box::new(|| trotter_order(&reports)),
        ),
        ("step-size law", Box::new(|| step_size(&reports))),
        ("qudit noise", Box::new(qudit_noise)),
        ("short-time correlator", Box::new(pt2_check)),
        ("qubit noise bands", Box::new(qubit_noise)),
        ("statistical machinery", Box::new(statistics)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let out = run();
        let mut secs = t0.elapsed().as_secs_f64();
        if i == 6 {
            secs += discrepancy_time;
        }
        if !out.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {} [{secs:.1}s]",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
