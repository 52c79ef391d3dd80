//! Shared helpers for the CLI integration tests.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FEATURES: [&str; 20] = [
    "age", "job", "marital", "education", "default", "housing", "loan", "contact", "month", "day_of_week",
    "duration", "campaign", "pdays", "previous", "poutcome", "emp.var.rate", "cons.price.idx", "cons.conf.idx",
    "euribor3m", "nr.employed",
];

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/bank")
}

pub fn boolrule(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boolrule")).args(args).output().expect("binary runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Semicolon-delimited table with the bank marketing schema. Labels follow
/// `Or(duration>550, pdays<=100, month=mar)` with 5% of them flipped.
pub fn synthetic_bank_csv(rows: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng, xs: &[&'static str]| *xs.choose(rng).unwrap();
    let mut text = FEATURES.iter().map(|f| format!("\"{f}\"")).collect::<Vec<_>>().join(";");
    text.push_str(";\"y\"\n");
    for _ in 0..rows {
        let month = pick(&mut rng, &["may", "may", "may", "jun", "jul", "jul", "aug", "nov", "apr", "mar", "oct"]);
        let duration: u32 = if rng.gen_bool(0.15) { rng.gen_range(551..2000) } else { rng.gen_range(5..550) };
        let pdays: u32 = if rng.gen_bool(0.08) { rng.gen_range(0..30) } else { 999 };
        let emp = pick(&mut rng, &["1.1", "1.4", "-1.8", "-2.9"]);
        let mut label = duration > 550 || pdays <= 100 || month == "mar";
        if rng.gen_bool(0.05) {
            label = !label;
        }
        let _ = writeln!(
            text,
            "{};\"{}\";\"{}\";\"{}\";\"{}\";\"{}\";\"{}\";\"{}\";\"{month}\";\"{}\";{duration};{};{pdays};{};\"{}\";{emp};{:.3};{:.1};{:.3};{:.1};\"{}\"",
            rng.gen_range(18..90),
            pick(&mut rng, &["admin.", "blue-collar", "technician", "services", "management", "retired", "student"]),
            pick(&mut rng, &["married", "single", "divorced"]),
            pick(&mut rng, &["university.degree", "high.school", "basic.9y", "professional.course", "unknown"]),
            pick(&mut rng, &["no", "no", "no", "unknown"]),
            pick(&mut rng, &["yes", "no"]),
            pick(&mut rng, &["no", "no", "yes"]),
            pick(&mut rng, &["cellular", "telephone"]),
            pick(&mut rng, &["mon", "tue", "wed", "thu", "fri"]),
            rng.gen_range(1..10),
            if pdays == 999 { 0 } else { rng.gen_range(1..4) },
            if pdays == 999 { "nonexistent" } else { pick(&mut rng, &["success", "failure"]) },
            rng.gen_range(92.2..94.8),
            rng.gen_range(-50.0..-26.0),
            rng.gen_range(0.6..5.1),
            rng.gen_range(4963.0..5228.0),
            if label { "yes" } else { "no" },
        );
    }
    text
}

/// Bank dataset path from `BANK_CSV`, else `data/bank-additional-full.csv`
/// at the workspace root, if the file exists.
pub fn bank_csv() -> Option<PathBuf> {
    let path = std::env::var_os("BANK_CSV").map(PathBuf::from).unwrap_or_else(|| {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/bank-additional-full.csv")
    });
    path.is_file().then_some(path)
}
