use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub command: &'static str,
    pub config: &'static str,
    pub args: &'static [&'static str],
    pub out: &'static str,
    pub also: &'static [&'static str],
}

impl Case {
    /// Every file the case writes.
    pub fn outputs(&self) -> impl Iterator<Item = &'static str> + '_ {
        std::iter::once(self.out).chain(self.also.iter().copied())
    }
}

pub const CASES: &[Case] = &[
    Case { command: "transform", config: "transform_frft.json", args: &[], out: "transform_frft.csv", also: &[] },
    Case {
        command: "transform",
        config: "transform_theorem2.json",
        args: &["--format", "json"],
        out: "transform_theorem2.json",
        also: &[],
    },
    Case { command: "capacity", config: "capacity_theorem1_b.json", args: &[], out: "capacity_theorem1_b.csv", also: &[] },
    Case {
        command: "capacity",
        config: "capacity_theorem2_a.json",
        args: &["--format", "json"],
        out: "capacity_theorem2_a.json",
        also: &[],
    },
    Case { command: "optimize", config: "optimize_wideband.json", args: &[], out: "optimize_wideband.json", also: &[] },
    Case {
        command: "optimize",
        config: "optimize_wideband.json",
        args: &["--format", "csv"],
        out: "optimize_wideband.csv",
        also: &[],
    },
    Case {
        command: "simulate",
        config: "simulate_noiseless.json",
        args: &[],
        out: "simulate_noiseless.json",
        also: &["simulate_noiseless.trials.csv"],
    },
    Case {
        command: "simulate",
        config: "simulate_noisy.json",
        args: &["--seed", "5", "--format", "csv"],
        out: "simulate_noisy_seed5.csv",
        also: &[],
    },
    Case { command: "sample-demo", config: "sample_demo.json", args: &[], out: "sample_demo.csv", also: &[] },
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn run(case: &Case, dir: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_lctcap"))
        .arg(case.command)
        .arg("--config")
        .arg(golden_dir().join(case.config))
        .arg("--out")
        .arg(dir.join(case.out))
        .arg("--quiet")
        .args(case.args)
        .status()
        .unwrap();
    assert!(status.success(), "{} {} failed", case.command, case.config);
}

