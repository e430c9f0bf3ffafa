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

use std::process::Command;

fn spinenc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_spinenc"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn terms_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = spinenc(&["terms", "--spin", "4", "--out", out, "--plot"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("fig2_terms.csv")).unwrap();
    assert!(csv.starts_with("# spinenc fig2_terms\n"));
    assert!(csv.contains("4,2,compact,324,"));
    let svg = std::fs::read_to_string(dir.path().join("fig2_terms.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = spinenc(&[
            "evolve",
            "--steps",
            "5",
            "--shots",
            "300",
            "--noise",
            "0.001",
            "--seed",
            "9",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let name = "populations_dicke_2S2.csv";
    let x = std::fs::read(a.path().join(name)).unwrap();
    let y = std::fs::read(b.path().join(name)).unwrap();
    // the `# spec:` line records the output directory, everything after it must match
    let skip = |v: &[u8]| {
        v.split(|&c| c == b'\n')
            .skip(2)
            .map(<[u8]>::to_vec)
            .collect::<Vec<_>>()
    };
    assert_eq!(skip(&x), skip(&y));
}

#[test]
fn plot_subcommand_renders_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(spinenc(&["evolve", "--steps", "3", "--out", out])
        .status
        .success());
    let csv = dir.path().join("populations_dicke_2S2.csv");
    let svg = dir.path().join("p.svg");
    let o = spinenc(&["plot", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(svg).unwrap().contains("polyline"));
}

#[test]
fn exit_codes() {
    let o = spinenc(&["evolve", "--dtau", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dtau"));
    let o = spinenc(&["chain4", "--spin", "12"]);
    assert_eq!(o.status.code(), Some(3));
    let o = spinenc(&["run", "--experiment", "fig99"]);
    assert_eq!(o.status.code(), Some(2));
    let o = spinenc(&["plot", "/nonexistent/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}
