//! End-to-end tests of the `gdedup` binary: golden container bytes, exit
//! codes, and determinism of the experiment subcommands.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gdedup"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gdedup_cli_{name}"));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn path_str(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// The 35-bit running example packed MSB-first into five bytes.
const RAW_EXAMPLE: [u8; 5] = [0x10, 0x40, 0x87, 0xE2, 0x00];
/// Its generalized (m=3, full bases) payload, zero-padded to bytes.
const GOLDEN_PAYLOAD: [u8; 5] = [0x80, 0x8A, 0xBF, 0xE4, 0xA0];

#[test]
fn encode_decode_round_trip_matches_the_golden_payload() {
    let dir = tmp_dir("golden");
    let raw = dir.join("raw.bin");
    let container = dir.join("out.gddp");
    let back = dir.join("back.bin");
    std::fs::write(&raw, RAW_EXAMPLE).unwrap();

    let out = run(&[
        "encode", "--mode", "generalized", "--m", "3", "--k-mode", "full", "--bits", "35",
        "--input", path_str(&raw), "--output", path_str(&container),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let bytes = std::fs::read(&container).unwrap();
    assert_eq!(&bytes[..4], b"GDDP");
    // 4 magic + version + mode + m + k_mode + 8 count = 16 header bytes.
    assert_eq!(&bytes[16..], &GOLDEN_PAYLOAD);

    let out = run(&[
        "decode", "--input", path_str(&container), "--output", path_str(&back), "--bits-out",
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "35");
    assert_eq!(std::fs::read(&back).unwrap(), RAW_EXAMPLE);
}

#[test]
fn misaligned_input_is_a_data_error() {
    let dir = tmp_dir("misaligned");
    let raw = dir.join("raw.bin");
    std::fs::write(&raw, RAW_EXAMPLE).unwrap();
    // 40 bits is not a multiple of 7.
    let out = run(&[
        "encode", "--mode", "generalized", "--m", "3",
        "--input", path_str(&raw), "--output", path_str(&dir.join("x.gddp")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a multiple"));

    // --bits that does not fill the final byte is rejected too.
    let out = run(&[
        "encode", "--mode", "generalized", "--m", "3", "--bits", "21",
        "--input", path_str(&raw), "--output", path_str(&dir.join("x.gddp")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1_and_data_errors_exit_2() {
    let dir = tmp_dir("exitcodes");
    let raw = dir.join("raw.bin");
    std::fs::write(&raw, RAW_EXAMPLE).unwrap();

    // Missing --m for generalized mode.
    let out = run(&[
        "encode", "--mode", "generalized",
        "--input", path_str(&raw), "--output", path_str(&dir.join("x.gddp")),
    ]);
    assert_eq!(out.status.code(), Some(1));

    // Unknown flag.
    let out = run(&["simulate", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));

    // Not a container.
    let out = run(&["decode", "--input", path_str(&raw), "--output", path_str(&dir.join("y"))]);
    assert_eq!(out.status.code(), Some(2));

    // Missing input file.
    let out = run(&[
        "decode", "--input", path_str(&dir.join("absent.gddp")),
        "--output", path_str(&dir.join("y")),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn classic_mode_round_trips_raw_bytes() {
    let dir = tmp_dir("classic");
    let raw = dir.join("raw.bin");
    // 8 chunks of n = 8 bits: whole bytes, no --bits needed.
    let data: Vec<u8> = vec![7, 7, 7, 1, 2, 7, 1, 9];
    std::fs::write(&raw, &data).unwrap();
    let container = dir.join("out.gddp");
    let back = dir.join("back.bin");
    let out = run(&[
        "encode", "--mode", "classic", "--n", "8",
        "--input", path_str(&raw), "--output", path_str(&container),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["decode", "--input", path_str(&container), "--output", path_str(&back)]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&back).unwrap(), data);
}

#[test]
fn simulate_is_deterministic_and_plottable() {
    let dir = tmp_dir("simulate");
    let csv_a = dir.join("a.csv");
    let csv_b = dir.join("b.csv");
    let args = |out: &Path| {
        vec![
            "simulate".to_string(),
            "--m".into(), "3".into(),
            "--active".into(), "2".into(),
            "--chunks".into(), "64".into(),
            "--trials".into(), "50".into(),
            "--seed".into(), "42".into(),
            "--k-mode".into(), "full".into(),
            "--baseline".into(),
            "--out".into(), out.to_str().unwrap().to_string(),
        ]
    };
    assert!(bin().args(args(&csv_a)).status().unwrap().success());
    assert!(bin().args(args(&csv_b)).status().unwrap().success());
    let a = std::fs::read(&csv_a).unwrap();
    assert_eq!(a, std::fs::read(&csv_b).unwrap(), "same flags must give identical output");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# m=3, active=2, k_mode=full, trials=50, seed=42, bases="));

    let prefix = dir.join("fig");
    let out = run(&["plot", "--input", path_str(&csv_a), "--out-prefix", path_str(&prefix)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for suffix in ["length", "delta", "ratio"] {
        let svg = std::fs::read_to_string(dir.join(format!("fig_{suffix}.svg"))).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polyline"));
    }
}

#[test]
fn bounds_and_sweep_write_their_tables() {
    let dir = tmp_dir("tables");
    let bounds_csv = dir.join("bounds.csv");
    let out = run(&[
        "bounds", "--m", "3", "--active", "2", "--c-max", "16",
        "--out", path_str(&bounds_csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&bounds_csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# m=3, active=2, k_mode=full");
    assert_eq!(
        lines.next().unwrap(),
        "C,theta_L_gen,theta_U_gen,theta_L_classic,theta_U_classic,ratio_lower,ratio_upper"
    );
    assert_eq!(lines.count(), 16);
    // Hand-checked first row: theta 11/13 generalized, 8/9 classic.
    let first = text.lines().nth(2).unwrap();
    assert_eq!(first, "1,11.000000000,13.000000000,8.000000000,9.000000000,0.615384615,0.818181818");

    let sweep_csv = dir.join("sweep.csv");
    let out = run(&[
        "sweep", "--m", "3,4", "--active", "2", "--chunks", "256", "--trials", "30",
        "--seed", "5", "--out", path_str(&sweep_csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&sweep_csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# active=2, trials=30, seed=5, c_max=256");
    assert_eq!(lines.next().unwrap(), "m,n,max_ratio,argmax_C");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("3,7,"));
    assert!(rows[1].starts_with("4,15,"));
}
