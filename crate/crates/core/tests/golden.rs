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

mod common;

use common::{golden_mismatches, read_golden, GOLDEN_CASES};

#[test]
fn every_builder_matches_its_golden_file() {
    for (name, two_s, kind) in GOLDEN_CASES {
        let bad = golden_mismatches(name, two_s, kind);
        assert!(bad.is_empty(), "{}", bad.join("\n"));
    }
}

#[test]
fn golden_sizes() {
    let sizes: Vec<usize> = GOLDEN_CASES.iter().map(|c| read_golden(c.0).len()).collect();
    assert_eq!(sizes, vec![36, 36, 12, 12, 22, 88, 27, 27]);
}
