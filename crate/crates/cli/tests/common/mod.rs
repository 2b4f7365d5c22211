#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate, Weekday};
use fxtopo_cli::config::{DateRange, PipelineConfig, SensitivityConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CODES: [&str; 6] = ["AAA", "BBB", "CCC", "DDD", "EEE", "FFF"];

/// Business-day rate files: two factor groups plus idiosyncratic noise, with a
/// gap and a bad row so ingest warnings are exercised.
pub fn write_dataset(dir: &Path, codes: &[&str], years: i32, seed: u64) {
    std::fs::create_dir_all(dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = NaiveDate::from_ymd_opt(2010, 1, 1).unwrap();
    let end = NaiveDate::from_ymd_opt(2010 + years - 1, 12, 31).unwrap();
    let days: Vec<NaiveDate> = start
        .iter_days()
        .take_while(|d| *d <= end)
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .collect();
    let factors: Vec<[f64; 2]> =
        days.iter().map(|_| [rng.random_range(-1.0..1.0) * 0.004, rng.random_range(-1.0..1.0) * 0.004]).collect();
    for (c, code) in codes.iter().enumerate() {
        let group = c % 2;
        let scale = 1.0 + c as f64 * 0.15;
        let mut level = (1.0 + c as f64).ln();
        let mut out = String::from("date,rate\n");
        for (i, d) in days.iter().enumerate() {
            level += factors[i][group] * scale + rng.random_range(-1.0..1.0) * 0.002;
            let season = 0.01 * (2.0 * std::f64::consts::PI * d.month() as f64 / 12.0 + c as f64).sin();
            if i == 40 + c {
                continue;
            }
            if i == 70 {
                writeln!(out, "{d},n/a").unwrap();
                continue;
            }
            writeln!(out, "{d},{:.6}", (level + season).exp()).unwrap();
        }
        std::fs::write(dir.join(format!("{code}.csv")), out).unwrap();
    }
}

pub fn small_config(root: &Path, codes: &[&str], years: i32) -> PipelineConfig {
    let data = root.join("data");
    write_dataset(&data, codes, years, 11);
    PipelineConfig {
        data_dir: data,
        output_dir: root.join("report"),
        currencies: codes.iter().map(|c| c.to_string()).collect(),
        date_range: Some(DateRange { start: None, end: None }),
        mds_dim: codes.len() - 2,
        k: 2,
        k_max_elbow: codes.len() - 1,
        sensitivity: SensitivityConfig { enabled: false, grid: Vec::new() },
        ..PipelineConfig::default()
    }
}

pub fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}
