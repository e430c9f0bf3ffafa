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

//! Seeded measurement sampling and bootstrap errors.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Register;
use crate::error::{Error, Result};

pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 1000;

/// Outcome counts keyed by register basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct ShotResult {
    register: Register,
    counts: BTreeMap<usize, u64>,
    n_shots: u64,
}

impl ShotResult {
    pub fn from_counts(register: Register, counts: BTreeMap<usize, u64>) -> Result<Self> {
        let dim = register
            .dim()
            .ok_or_else(|| Error::validation("register too wide for indexed counts"))?;
        if counts.keys().any(|&k| k >= dim) {
            return Err(Error::validation("outcome outside register"));
        }
        let n_shots = counts.values().sum();
        if n_shots == 0 {
            return Err(Error::validation("no shots recorded"));
        }
        Ok(Self {
            register,
            counts,
            n_shots,
        })
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn n_shots(&self) -> u64 {
        self.n_shots
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Dense relative frequencies.
    pub fn frequencies(&self) -> Vec<f64> {
        let dim = self.register.dim().unwrap_or(0);
        let mut f = vec![0.0; dim];
        for (&k, &c) in &self.counts {
            f[k] = c as f64 / self.n_shots as f64;
        }
        f
    }

    /// Outcome label, highest unit first. Qudit digits are comma separated when `d > 10`.
    pub fn label(&self, index: usize) -> String {
        let n = self.register.n_units();
        let d = self.register.levels();
        let digits: Vec<usize> = (0..n).rev().map(|u| (index / d.pow(u as u32)) % d).collect();
        if d <= 10 {
            digits.iter().map(|x| char::from(b'0' + *x as u8)).collect()
        } else {
            digits.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    fn parse_label(&self, s: &str) -> Result<usize> {
        let d = self.register.levels();
        let digits: Vec<usize> = if d <= 10 {
            s.chars()
                .map(|c| c.to_digit(10).map(|v| v as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::validation(format!("bad outcome label '{s}'")))?
        } else {
            s.split(',')
                .map(|t| t.parse().ok())
                .collect::<Option<_>>()
                .ok_or_else(|| Error::validation(format!("bad outcome label '{s}'")))?
        };
        if digits.len() != self.register.n_units() || digits.iter().any(|&x| x >= d) {
            return Err(Error::validation(format!("bad outcome label '{s}'")));
        }
        Ok(digits.iter().fold(0, |acc, &x| acc * d + x))
    }

    /// `{"label": count}` JSON object.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .counts
            .iter()
            .map(|(&k, &c)| (self.label(k), serde_json::Value::from(c)))
            .collect();
        serde_json::Value::Object(map)
    }

    pub fn from_json(register: Register, value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::validation("shot counts must be a JSON object"))?;
        let probe = Self {
            register,
            counts: BTreeMap::new(),
            n_shots: 0,
        };
        let mut counts = BTreeMap::new();
        for (k, v) in obj {
            let c = v
                .as_u64()
                .ok_or_else(|| Error::validation("shot counts must be non-negative integers"))?;
            *counts.entry(probe.parse_label(k)?).or_insert(0) += c;
        }
        Self::from_counts(register, counts)
    }
}

#[derive(Serialize, Deserialize)]
struct CountsFile {
    register: Register,
    counts: serde_json::Value,
}

impl Serialize for ShotResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CountsFile {
            register: self.register,
            counts: self.to_json(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ShotResult {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = CountsFile::deserialize(d)?;
        ShotResult::from_json(f.register, &f.counts).map_err(serde::de::Error::custom)
    }
}

fn cumulative(probs: &[f64]) -> Result<Vec<f64>> {
    if probs.iter().any(|p| !(p.is_finite() && *p >= -1e-12)) {
        return Err(Error::validation("probabilities must be finite and non-negative"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::validation(format!("probabilities sum to {total}, not 1")));
    }
    let mut acc = 0.0;
    Ok(probs
        .iter()
        .map(|p| {
            acc += p.max(0.0) / total;
            acc
        })
        .collect())
}

fn draw(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Draws `n_shots` outcomes from `probs`. Identical seeds give identical counts.
pub fn sample_shots(probs: &[f64], register: Register, n_shots: usize, seed: u64) -> Result<ShotResult> {
    if n_shots == 0 {
        return Err(Error::validation("shot count must be positive"));
    }
    if register.dim() != Some(probs.len()) {
        return Err(Error::validation("probability vector does not match register"));
    }
    let cdf = cumulative(probs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..n_shots {
        *counts.entry(draw(&cdf, &mut rng)).or_insert(0u64) += 1;
    }
    ShotResult::from_counts(register, counts)
}

/// Standard deviation of `statistic` over resamples of the recorded shots.
pub fn bootstrap_std<F>(shots: &ShotResult, statistic: F, n_resamples: usize, seed: u64) -> Result<f64>
where
    F: Fn(&ShotResult) -> f64,
{
    if n_resamples < 2 {
        return Err(Error::validation("bootstrap needs at least two resamples"));
    }
    let keys: Vec<usize> = shots.counts.keys().copied().collect();
    let n = shots.n_shots as f64;
    let probs: Vec<f64> = shots.counts.values().map(|&c| c as f64 / n).collect();
    let cdf = cumulative(&probs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n_resamples);
    for _ in 0..n_resamples {
        let mut counts = BTreeMap::new();
        for _ in 0..shots.n_shots {
            *counts.entry(keys[draw(&cdf, &mut rng)]).or_insert(0u64) += 1;
        }
        let r = ShotResult {
            register: shots.register,
            counts,
            n_shots: shots.n_shots,
        };
        values.push(statistic(&r));
    }
    let mean = values.iter().sum::<f64>() / n_resamples as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_resamples - 1) as f64;
    Ok(var.sqrt())
}
