mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use blockdet::format::{write_block_json, write_dense_text};
use blockdet::random::MatrixRng;
use blockdet::{det_dense, flatten, BlockMatrix, DenseMatrix, ScaledDet};
use common::{c, nonsingular_block_matrix};
use tempfile::TempDir;

fn blockdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockdet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn printed_det(o: &Output) -> ScaledDet {
    stdout(o).trim().parse().unwrap()
}

#[test]
fn identity_prints_one() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "id.txt", "2 2\n1 0\n0 1\n");
    let o = blockdet(&["det", p(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.000000000000+0.000000000000E+000\n");
}

#[test]
fn block_diagonal_json_is_product_of_block_dets() {
    let dir = TempDir::new().unwrap();
    let mut rng = MatrixRng::new(301);
    let diag: Vec<DenseMatrix> = (0..3).map(|_| rng.unit_square(2, 2)).collect();
    let bm = BlockMatrix::block_diagonal(&diag).unwrap();
    let f = write(&dir, "diag.json", &write_block_json(&bm));
    let o = blockdet(&["det", p(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let expected: ScaledDet = diag.iter().map(|d| det_dense(d).unwrap()).product();
    assert!(printed_det(&o).relative_difference(&expected) < 1e-11);
}

#[test]
fn partition_flag_does_not_change_the_value() {
    let dir = TempDir::new().unwrap();
    let mut rng = MatrixRng::new(302);
    for (nb, n) in [(2, 3), (3, 2), (6, 1), (4, 4)] {
        let (bm, _) = nonsingular_block_matrix(&mut rng, nb, n);
        let f = write(&dir, "m.txt", &write_dense_text(&flatten(&bm)));
        let plain = blockdet(&["det", p(&f)]);
        let partition = format!("{nb},{n}");
        let blocked = blockdet(&["det", p(&f), "--partition", &partition]);
        assert_eq!(blocked.status.code(), Some(0));
        assert!(printed_det(&plain).relative_difference(&printed_det(&blocked)) < 1e-8);
    }
}

#[test]
fn bad_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let garbage = write(&dir, "bad.txt", "2 2\n1 x\n0 1\n");
    let rect = write(&dir, "rect.txt", "2 3\n1 2 3\n4 5 6\n");
    let ok = write(&dir, "ok.txt", "4 4\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n");
    let json = write(
        &dir,
        "bad.json",
        r#"{"N": 2, "n": 1, "blocks": [[[[[1, 0]]]]]}"#,
    );
    for args in [
        vec!["det", p(&garbage)],
        vec!["det", p(&rect)],
        vec!["det", p(&ok), "--partition", "3,1"],
        vec!["det", p(&json)],
        vec!["det", p(&ok), "--format", "block-json"],
    ] {
        let o = blockdet(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(stderr(&o).contains("error"));
        assert!(stdout(&o).is_empty());
    }
}

#[test]
fn singular_pivot_exit_two_and_fallback() {
    let dir = TempDir::new().unwrap();
    // S_22 = 0 but the matrix is nonsingular: [[1, 1], [1, 0]], det = -1
    let f = write(&dir, "swap.txt", "2 2\n1 1\n1 0\n");
    let o = blockdet(&["det", p(&f), "--partition", "2,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha^(0)_(2,2)"), "{}", stderr(&o));

    let o = blockdet(&["det", p(&f), "--partition", "2,1", "--fallback", "dense"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-1.000000000000+0.000000000000E+000");
    assert!(stderr(&o).contains("dense LU"));
}

#[test]
fn compare_within_tolerance() {
    let dir = TempDir::new().unwrap();
    let (bm, _) = nonsingular_block_matrix(&mut MatrixRng::new(303), 3, 4);
    let f = write(&dir, "m.json", &write_block_json(&bm));
    let o = blockdet(&["compare", p(&f), "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    let rel: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("relative_error = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(rel < 1e-8);
    assert!(out.contains("block_median_ns = "));
    assert!(out.contains("dense_median_ns = "));
}

#[test]
fn compare_needs_a_partition() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "m.txt", "1 1\n2\n");
    assert_eq!(blockdet(&["compare", p(&f)]).status.code(), Some(1));
}

#[test]
fn compare_singular_input_reports_both_paths() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "zero.txt", "2 2\n0 0\n0 0\n");
    let o = blockdet(&["compare", p(&f), "--partition", "2,1"]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("block = singular"));
    assert!(out.contains("dense = 0.000000000000+0.000000000000E+000"));
}

#[test]
fn compare_tolerance_flag_on_njl_matrix() {
    let dir = TempDir::new().unwrap();
    let bm = blockdet::njl::build_njl_matrix(&blockdet::njl::NjlParams::default());
    let f = write(&dir, "njl.json", &write_block_json(&bm));
    let tight = blockdet(&["compare", p(&f), "--tol", "1e-15"]);
    let loose = blockdet(&["compare", p(&f)]);
    assert_eq!(loose.status.code(), Some(0));
    let rel: f64 = stdout(&tight)
        .lines()
        .find_map(|l| l.strip_prefix("relative_error = "))
        .unwrap()
        .parse()
        .unwrap();
    let expected = if rel <= 1e-15 { 0 } else { 3 };
    assert_eq!(tight.status.code(), Some(expected));
}

#[test]
fn bench_is_deterministic() {
    let args = [
        "bench",
        "--max-blocks",
        "3",
        "--max-block-size",
        "2",
        "--trials",
        "1",
        "--seed",
        "42",
    ];
    let errors = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                format!("{},{},{},{}", f[0], f[1], f[2], f[4])
            })
            .collect()
    };
    let a = blockdet(&args);
    let b = blockdet(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(errors(&a), errors(&b));
    assert_eq!(errors(&a).len(), 8);
    for line in stdout(&a).lines().skip(1) {
        let rel: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(rel < 1e-8, "{line}");
    }
}

#[test]
fn bench_two_rows_for_smallest_sweep() {
    let o = blockdet(&[
        "bench",
        "--max-blocks",
        "2",
        "--max-block-size",
        "1",
        "--trials",
        "1",
    ]);
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn njl_report() {
    let o = blockdet(&["njl"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for m in [
        "(multiplicity 8)",
        "(multiplicity 16)",
        "total multiplicity = 48",
        "overall: PASS",
    ] {
        assert!(out.contains(m), "{m}");
    }

    let o = blockdet(&["njl", "--delta-re", "0", "--delta-im", "0"]);
    let out = stdout(&o);
    let level = |k: usize| -> String {
        let tag = format!("  E{k} = ");
        out.lines()
            .find_map(|l| l.strip_prefix(&tag))
            .unwrap()
            .split_whitespace()
            .next()
            .unwrap()
            .to_string()
    };
    assert_eq!(level(3), level(1));
    assert_eq!(level(4), level(2));

    assert_eq!(blockdet(&["njl", "--kx", "inf"]).status.code(), Some(1));
}

#[test]
fn parse_check_round_trips() {
    let dir = TempDir::new().unwrap();
    let mut rng = MatrixRng::new(304);
    let (bm, _) = nonsingular_block_matrix(&mut rng, 3, 3);
    let json = write(&dir, "m.json", &write_block_json(&bm));
    let text = write(&dir, "m.txt", &write_dense_text(&flatten(&bm)));
    let scaled = write(&dir, "big.txt", "2 2\n1e200 1e-3+1e150i\n-2.5e100i 1e200\n");
    for f in [&json, &text, &scaled] {
        let o = blockdet(&["parse-check", p(f)]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
    let o = blockdet(&["det", p(&scaled), "--parse-check"]);
    assert_eq!(o.status.code(), Some(0));
    let expected = ScaledDet::from_complex(c(1e200, 0.0)).powi(2)
        * ScaledDet::from_complex(c(1.0, 0.0) - c(1e-3, 1e150) * c(0.0, -2.5e100) / 1e200 / 1e200);
    assert!(printed_det(&o).relative_difference(&expected) < 1e-11);
}
