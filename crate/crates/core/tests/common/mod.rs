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

//! Reader for the two-site golden Hamiltonian files.
//!
//! Each file starts with `scale p/q`; every other line is `rational constant STRING`, where the
//! coefficient is `scale * rational * constant`.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use spinenc::encoding::EncodingKind;
use spinenc::hamiltonian::{build_encoded, HamiltonianSum};
use spinenc::{Lattice, Spin};

pub const GOLDEN_TOLERANCE: f64 = 1e-4;

pub const GOLDEN_CASES: [(&str, u32, EncodingKind); 8] = [
    ("spin1_compact", 2, EncodingKind::Compact),
    ("spin1_direct", 2, EncodingKind::Direct),
    ("spin1_dicke", 2, EncodingKind::Dicke),
    ("spin1_qudit", 2, EncodingKind::Qudit),
    ("spin3half_compact", 3, EncodingKind::Compact),
    ("spin3half_direct", 3, EncodingKind::Direct),
    ("spin3half_dicke", 3, EncodingKind::Dicke),
    ("spin3half_qudit", 3, EncodingKind::Qudit),
];

fn rational(s: &str) -> f64 {
    let s = s.trim_start_matches('+');
    match s.split_once('/') {
        Some((p, q)) => p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

fn constant(s: &str) -> f64 {
    let r3 = 3f64.sqrt();
    match s {
        "1" => 1.0,
        "c" => r3,
        "f" => 2.0 / r3,
        "a" => r3 / 2.0,
        "b1" => 2.0 / r3,
        "b2" => 1.0 / r3,
        "b3" => (2.0f64 / 3.0).sqrt(),
        "sqrt2" => 2f64.sqrt(),
        other => panic!("unknown golden constant {other}"),
    }
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.txt"))
}

/// String to coefficient.
pub fn read_golden(name: &str) -> BTreeMap<String, f64> {
    let text = std::fs::read_to_string(golden_path(name)).unwrap();
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let scale = rational(lines.next().unwrap().strip_prefix("scale ").unwrap().trim());
    let mut out = BTreeMap::new();
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(f.len(), 3, "bad golden line {line:?}");
        let prev = out.insert(f[2].to_string(), scale * rational(f[0]) * constant(f[1]));
        assert!(prev.is_none(), "duplicate golden term {}", f[2]);
    }
    out
}

pub fn built_terms(kind: EncodingKind, two_s: u32) -> BTreeMap<String, f64> {
    let lat = Lattice::open_chain(Spin::new(two_s).unwrap(), 2).unwrap();
    match build_encoded(kind, &lat).unwrap() {
        HamiltonianSum::Pauli(s) => s.terms().iter().map(|(c, p)| (p.to_string(), *c)).collect(),
        HamiltonianSum::GellMann(s) => s.terms().iter().map(|(c, g)| (g.to_string(), *c)).collect(),
    }
}

/// Mismatches between a builder and its golden file, empty when they agree.
pub fn golden_mismatches(name: &str, two_s: u32, kind: EncodingKind) -> Vec<String> {
    let want = read_golden(name);
    let got = built_terms(kind, two_s);
    let mut out = Vec::new();
    for (s, c) in &want {
        match got.get(s) {
            None => out.push(format!("{name}: missing {s}")),
            Some(g) if (g - c).abs() > GOLDEN_TOLERANCE => out.push(format!("{name}: {s} has {g}, want {c}")),
            _ => {}
        }
    }
    for s in got.keys().filter(|s| !want.contains_key(*s)) {
        out.push(format!("{name}: extra {s}"));
    }
    out
}
