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

use num_complex::Complex64;
use proptest::prelude::*;

use spinenc::analysis::{correlator_from_distribution, Normalized};
use spinenc::circuit::{Gate, Register};
use spinenc::density::{DensityMatrix, NoiseConfig};
use spinenc::encoding::{EncodingKind, EncodingLayout};
use spinenc::hamiltonian::{build_encoded, HamiltonianSum};
use spinenc::shots::sample_shots;
use spinenc::spin::{basis_vector, sector_populations, ExactPropagator};
use spinenc::statevector::apply_pauli_rotation;
use spinenc::{build_heisenberg, Lattice, LatticeBasisState, PauliString, Spin};

fn kind_strategy() -> impl Strategy<Value = EncodingKind> {
    prop::sample::select(EncodingKind::ALL.to_vec())
}

fn state_strategy(max_two_s: u32, max_sites: usize) -> impl Strategy<Value = (Spin, LatticeBasisState)> {
    (1..=max_two_s, 2..=max_sites).prop_flat_map(|(t, n)| {
        let spin = Spin::new(t).unwrap();
        prop::collection::vec(0..=t as usize, n).prop_map(move |levels| {
            let m = levels.iter().map(|&l| spin.twice_m_of_level(l)).collect();
            (spin, LatticeBasisState::new(spin, m).unwrap())
        })
    })
}

fn pauli_strategy(n: usize) -> impl Strategy<Value = PauliString> {
    let mask = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>()).prop_map(move |(x, z)| PauliString::new(n, x & mask, z & mask).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encode_decode_round_trip(kind in kind_strategy(), (spin, st) in state_strategy(6, 3)) {
        let layout = EncodingLayout::new(kind, spin, st.n_sites()).unwrap();
        let idx = layout.encode_state(&st).unwrap();
        prop_assert_eq!(layout.decode_index(idx), Some(st));
    }

    #[test]
    fn pauli_text_round_trip(p in pauli_strategy(9)) {
        let back: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn pauli_rotation_preserves_norm(ps in prop::collection::vec((pauli_strategy(5), -3.0f64..3.0), 1..8)) {
        let mut psi = vec![Complex64::new(0.0, 0.0); 32];
        psi[5] = Complex64::new(0.6, 0.0);
        psi[17] = Complex64::new(0.0, 0.8);
        for (p, a) in &ps {
            apply_pauli_rotation(&mut psi, p, *a);
        }
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn encoded_hamiltonian_does_not_leak(
        kind in prop::sample::select(vec![EncodingKind::Compact, EncodingKind::Direct, EncodingKind::Dicke]),
        (spin, st) in state_strategy(4, 2),
    ) {
        // H maps the code space to itself: no weight lands on unencoded register states.
        let lat = Lattice::open_chain(spin, st.n_sites()).unwrap();
        let layout = EncodingLayout::new(kind, spin, st.n_sites()).unwrap();
        let HamiltonianSum::Pauli(h) = build_encoded(kind, &lat).unwrap() else { unreachable!() };
        let dim = layout.register_dim().unwrap();
        let mut psi = vec![Complex64::new(0.0, 0.0); dim];
        if kind == EncodingKind::Dicke {
            // Dicke code space is spanned by symmetric states, built site by site.
            let mut full = vec![Complex64::new(1.0, 0.0)];
            for site in 0..st.n_sites() {
                let d = spinenc::encoding::dicke_state_vector(spin, st.twice_m(site)).unwrap();
                full = d.iter().flat_map(|a| full.iter().map(move |b| a * b)).collect();
            }
            psi = full;
        } else {
            psi[layout.encode_state(&st).unwrap()] = Complex64::new(1.0, 0.0);
        }
        let out = h.apply(&psi);
        let leak: f64 = out
            .iter()
            .enumerate()
            .filter(|(i, _)| kind != EncodingKind::Dicke && layout.decode_index(*i).is_none())
            .map(|(_, a)| a.norm_sqr())
            .sum();
        prop_assert!(leak < 1e-10);
        if kind == EncodingKind::Dicke {
            // symmetric subspace: invariant under swapping the two qubits of site 0 when 2S >= 2
            let k = spin.two_s() as usize;
            if k >= 2 {
                let swap = |i: usize| {
                    let (a, b) = (i & 1, (i >> 1) & 1);
                    (i & !3) | (a << 1) | b
                };
                let asym: f64 = (0..dim).map(|i| (out[i] - out[swap(i)]).norm_sqr()).sum();
                prop_assert!(asym < 1e-10);
            }
        }
    }

    #[test]
    fn exact_evolution_conserves_total_magnetization((spin, st) in state_strategy(3, 3), t in 0.0f64..4.0) {
        let lat = Lattice::open_chain(spin, st.n_sites()).unwrap();
        let h = build_heisenberg(&lat).unwrap();
        let prop = ExactPropagator::new(&h, &basis_vector(spin, &st)).unwrap();
        let sectors = sector_populations(spin, st.n_sites(), &prop.state_at(t));
        let p = sectors.get(&st.twice_total()).copied().unwrap_or(0.0);
        prop_assert!((p - 1.0).abs() < 1e-10);
    }

    #[test]
    fn noisy_density_stays_physical(
        ps in prop::collection::vec((pauli_strategy(3), -2.0f64..2.0), 1..10),
        eps in 0.0f64..0.2,
        start in 0usize..8,
    ) {
        let mut rho = DensityMatrix::pure_basis(Register::Qubits(3), start).unwrap();
        let noise = NoiseConfig::new(eps).unwrap();
        for (p, a) in &ps {
            if p.is_identity() {
                continue;
            }
            rho.apply_gate(&Gate::PauliRotation { angle: *a, string: *p }, noise);
        }
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.trace().im.abs() < 1e-12);
        prop_assert!(rho.hermiticity_error() < 1e-12);
        let purity = rho.purity();
        prop_assert!((1.0 / 8.0 - 1e-12..=1.0 + 1e-12).contains(&purity));
        prop_assert!(rho.probabilities().iter().all(|&p| p > -1e-12));
    }

    #[test]
    fn mitigation_identity(weights in prop::collection::vec(0.0f64..1.0, 16), mask in any::<u16>()) {
        // Raw and sector-normalized correlators agree once all weight sits in the initial sector,
        // and the normalized value equals the in-sector conditional mean.
        let spin = Spin::new(1).unwrap();
        let layout = EncodingLayout::new(EncodingKind::Direct, spin, 2).unwrap();
        let dim = layout.register_dim().unwrap();
        let mut dist = Vec::new();
        for i in 0..dim {
            let w = weights[i % 16] * f64::from((mask >> (i % 16)) & 1);
            if w > 0.0 {
                dist.push((i, w));
            }
        }
        let total: f64 = dist.iter().map(|d| d.1).sum();
        prop_assume!(total > 0.0);
        for d in &mut dist {
            d.1 /= total;
        }
        let est = correlator_from_distribution(dist.iter().copied(), &layout, 0, 1, 0).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for &(i, w) in &dist {
            if let Some(s) = layout.decode_index(i) {
                if s.twice_total() == 0 {
                    num += w * s.m(0) * s.m(1);
                    den += w;
                }
            }
        }
        prop_assert!((est.p_sector - den).abs() < 1e-12);
        match est.normalized {
            Normalized::Value(v) => prop_assert!((v - num / den).abs() < 1e-12),
            Normalized::Undefined => prop_assert_eq!(den, 0.0),
        }
        if (den - 1.0).abs() < 1e-15 {
            if let Normalized::Value(v) = est.normalized {
                prop_assert!((v - est.raw).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shot_counts_add_up(n in 1usize..4000, seed in any::<u64>()) {
        let probs = [0.1, 0.2, 0.3, 0.4];
        let a = sample_shots(&probs, Register::Qubits(2), n, seed).unwrap();
        let b = sample_shots(&probs, Register::Qubits(2), n, seed).unwrap();
        prop_assert_eq!(a.counts().values().sum::<u64>(), n as u64);
        prop_assert_eq!(a, b);
    }
}
