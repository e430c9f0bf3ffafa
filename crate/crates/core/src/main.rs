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

//! Command line driver: figure reproductions and free-form runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spinenc::encoding::EncodingKind;
use spinenc::experiments::{
    chain_files, evolve_files, experiment_files, scaling_files, terms_files, ExperimentSpec, OutputFile,
};
use spinenc::plot::plot_csv;
use spinenc::Result;

#[derive(Parser, Debug)]
#[command(
    name = "spinenc",
    version,
    about = "Heisenberg spin-S chains on qubit and qudit registers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// compact, direct, dicke or qudit
    #[arg(long, global = true)]
    mapping: Option<EncodingKind>,
    /// Twice the spin quantum number (largest 2S for terms and scaling)
    #[arg(long, global = true)]
    spin: Option<u32>,
    /// Number of sites of the open chain
    #[arg(long, global = true)]
    sites: Option<usize>,
    /// Trotter step size in units of hbar/J
    #[arg(long, global = true, allow_negative_numbers = true)]
    dtau: Option<f64>,
    /// Largest number of Trotter steps
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Shots per time point; 0 uses exact probabilities
    #[arg(long, global = true)]
    shots: Option<usize>,
    /// Base seed for shot sampling and bootstrap
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Two-unit depolarizing error per entangling gate
    #[arg(long, global = true, allow_negative_numbers = true)]
    noise: Option<f64>,
    /// Output directory (or SVG file for `plot`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write an SVG next to every CSV
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Term counts of all mappings and the compact scaling study
    Terms,
    /// Initial-state population of a two-site (or longer) chain
    Evolve,
    /// End-to-end correlator of the four-site Dicke chain
    Chain4,
    /// Trotter discrepancy, its fits and the step-size law
    Scaling,
    /// Render an experiment CSV as SVG
    Plot { csv: PathBuf },
    /// Named figure reproduction
    Run {
        #[arg(long)]
        experiment: String,
    },
}

fn spec_for(cli: &Cli, name: &str) -> ExperimentSpec {
    let mut s = ExperimentSpec::defaults(name);
    if let Some(m) = cli.mapping {
        s.mapping = m;
    }
    if let Some(t) = cli.spin {
        s.two_s = t;
    }
    if let Some(n) = cli.sites {
        s.n_sites = n;
        s.edges = (1..n).map(|i| (i - 1, i)).collect();
    }
    if let Some(d) = cli.dtau {
        s.dtau = d;
    }
    if let Some(n) = cli.steps {
        s.n_steps_max = n;
    } else if name == "chain4" && s.two_s == 2 {
        s.n_steps_max = 12;
    }
    if let Some(n) = cli.shots {
        s.n_shots = n;
    }
    if let Some(v) = cli.seed {
        s.seed = v;
    }
    if let Some(v) = cli.noise {
        s.noise = v;
    }
    if let Some(o) = &cli.out {
        s.out = o.clone();
    }
    s
}

fn write_files(dir: &Path, files: &[OutputFile], with_svg: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    for f in files {
        let path = dir.join(&f.name);
        fs::write(&path, &f.contents)?;
        println!("{}", path.display());
        if with_svg && f.name.ends_with(".csv") {
            let svg = dir.join(f.name.replace(".csv", ".svg"));
            fs::write(&svg, plot_csv(&f.contents)?)?;
            println!("{}", svg.display());
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let (spec, files) = match &cli.command {
        Command::Terms => {
            let s = spec_for(cli, "terms");
            let f = terms_files(&s)?;
            (s, f)
        }
        Command::Evolve => {
            let s = spec_for(cli, "evolve");
            let f = evolve_files(&s)?;
            (s, f)
        }
        Command::Chain4 => {
            let s = spec_for(cli, "chain4");
            let f = chain_files(&s)?;
            (s, f)
        }
        Command::Scaling => {
            let s = spec_for(cli, "scaling");
            let f = scaling_files(&s)?;
            (s, f)
        }
        Command::Plot { csv } => {
            let text = fs::read_to_string(csv)?;
            let out = cli.out.clone().unwrap_or_else(|| csv.with_extension("svg"));
            fs::write(&out, plot_csv(&text)?)?;
            println!("{}", out.display());
            return Ok(());
        }
        Command::Run { experiment } => {
            let s = spec_for(cli, "run");
            let f = experiment_files(experiment, &s)?;
            (s, f)
        }
    };
    write_files(&spec.out, &files, cli.plot)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinenc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
