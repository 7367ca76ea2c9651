//! Acceptance criterion 8: every command rerun with identical configuration
//! and seed produces byte-identical outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_urbannet"))
}

fn run_ok(args: &[&str]) {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// All files under a root, keyed by relative path.
fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let entry = entry.unwrap();
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn assert_identical_trees(a: &Path, b: &Path) {
    let ta = tree(a);
    let tb = tree(b);
    let ka: Vec<_> = ta.keys().collect();
    let kb: Vec<_> = tb.keys().collect();
    assert_eq!(ka, kb, "file sets differ between reruns");
    for (k, va) in &ta {
        assert_eq!(va, &tb[k], "file {k} differs between reruns");
    }
}

#[test]
fn acceptance_08_cli_determinism() {
    let base = std::env::temp_dir().join(format!("urbannet-accept8-{}", std::process::id()));
    let _ = fs::remove_dir_all(&base);
    fs::create_dir_all(&base).unwrap();

    let mut pass_roots: Vec<PathBuf> = Vec::new();
    for round in 0..2 {
        let root = base.join(format!("round{round}"));
        fs::create_dir_all(&root).unwrap();
        let ds = root.join("ds");
        run_ok(&[
            "generate",
            "--out",
            ds.to_str().unwrap(),
            "--seed",
            "41",
            "--profile",
            "flat",
            "--vehicles",
            "5",
        ]);
        let lifted = root.join("lifted.txt");
        run_ok(&[
            "lift",
            "--dataset",
            ds.to_str().unwrap(),
            "--descriptor-mode",
            "noisy",
            "--sigma-kp",
            "0.02",
            "--oracle-seed",
            "9",
            "--map-noise",
            "elevation",
            "--map-sigma",
            "0.1",
            "--map-seed",
            "5",
            "--threads",
            "4",
            "--out",
            lifted.to_str().unwrap(),
        ]);
        run_ok(&[
            "eval",
            "--dataset",
            ds.to_str().unwrap(),
            "--lifted",
            lifted.to_str().unwrap(),
            "--out",
            root.join("report").to_str().unwrap(),
            "--svg",
        ]);
        run_ok(&[
            "ablate",
            "--dataset",
            ds.to_str().unwrap(),
            "--out",
            root.join("abl").to_str().unwrap(),
            "--oracle-seed",
            "123",
            "--map-seed",
            "9",
        ]);
        run_ok(&[
            "render",
            "--dataset",
            ds.to_str().unwrap(),
            "--lifted",
            lifted.to_str().unwrap(),
            "--out",
            root.join("overlays").to_str().unwrap(),
        ]);
        run_ok(&[
            "inspect-net",
            "--write-random",
            root.join("w.bin").to_str().unwrap(),
            "--seed",
            "2",
        ]);
        pass_roots.push(root);
    }

    assert_identical_trees(&pass_roots[0], &pass_roots[1]);
    println!(
        "criterion 8: PASS - generate/lift/eval/ablate/render/inspect-net rerun byte-identically"
    );
    let _ = fs::remove_dir_all(&base);
}
