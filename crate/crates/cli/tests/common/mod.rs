// SPDX-License-Identifier: Apache-2.0

//! Runs the `pics` binary and the synthetic end-to-end script.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

pub const TIMEPOINTS: [u32; 5] = [0, 2, 4, 6, 8];

pub fn pics(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pics")).current_dir(dir).args(args).output().expect("spawn pics")
}

pub fn run_ok(dir: &Path, args: &[&str]) -> String {
    let out = pics(dir, args);
    assert!(
        out.status.success(),
        "pics {args:?} failed ({:?}): {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

/// phantom → GLIM frames → reconstruct → infer (zero-weight net) → segment
/// → growth, every path relative to `dir`. `extra` is prepended to each
/// invocation (global flags).
pub fn end_to_end(dir: &Path, extra: &[&str]) {
    let run = |args: &[&str]| run_ok(dir, &[extra, args].concat());
    run(&["phantom", "--weights", "zero", "--out", "net/zero.picsw"]);
    for t in TIMEPOINTS {
        let ts = t.to_string();
        let p = |s: &str| format!("t{t}/{s}");
        run(&[
            "phantom",
            "--cell",
            "--width",
            "96",
            "--height",
            "96",
            "--pixel-size",
            "0.3",
            "--cells",
            "3",
            "--t-hours",
            &ts,
            "--doubling-hours",
            "20",
            "--out",
            &p("truth.picsr"),
            "--frames-prefix",
            &p("frame"),
            "--stains-prefix",
            &p("ref"),
        ]);
        run(&["reconstruct", "--frames", &p("frame_*.picsr"), "--out", &p("phase.picsr")]);
        run(&[
            "infer",
            "--phase",
            &p("phase.picsr"),
            "--weights",
            "net/zero.picsw",
            "--channel",
            "dii",
            "--rho-min",
            "-0.5",
            "--rho-max",
            "2.5",
            "--out",
            &p("dii.picsr"),
        ]);
        run(&[
            "segment",
            "--dapi",
            &p("ref_dapi.picsr"),
            "--dii",
            &p("dii.picsr"),
            "--phase",
            &p("phase.picsr"),
            "--fov",
            "A1",
            "--out-prefix",
            &p("seg"),
        ]);
    }
    let tables: Vec<String> = TIMEPOINTS.iter().map(|t| format!("t{t}/seg_masses.csv")).collect();
    let mut args = vec!["growth", "--window", "4", "--out", "growth", "--masses"];
    args.extend(tables.iter().map(String::as_str));
    run(&args);
}

/// Every file below `dir`, relative and sorted.
pub fn inventory(dir: &Path) -> Vec<String> {
    fn walk(root: &Path, d: &Path, out: &mut Vec<String>) {
        for e in fs::read_dir(d).expect("read dir") {
            let p = e.expect("dir entry").path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.push(p.strip_prefix(root).expect("under root").to_string_lossy().replace('\\', "/"));
            }
        }
    }
    let mut v = Vec::new();
    walk(dir, dir, &mut v);
    v.sort();
    v
}

pub fn expected_inventory() -> Vec<String> {
    let mut v = vec![
        "growth/config.json",
        "growth/doubling.csv",
        "growth/median.csv",
        "growth/ncr.csv",
        "growth/normalized.csv",
        "net/zero.picsw",
        "net/zero.picsw.config.json",
    ]
    .into_iter()
    .map(String::from)
    .collect::<Vec<_>>();
    for t in TIMEPOINTS {
        for f in [
            "dii.picsr",
            "dii.picsr.config.json",
            "frame_0.picsr",
            "frame_1.picsr",
            "frame_2.picsr",
            "frame_3.picsr",
            "phase.picsr",
            "phase.picsr.config.json",
            "phase.picsr.json",
            "ref_dapi.picsr",
            "ref_dii.picsr",
            "seg_config.json",
            "seg_instances.pgm",
            "seg_masses.csv",
            "seg_semantic.pgm",
            "truth.picsr",
            "truth.picsr.config.json",
        ] {
            v.push(format!("t{t}/{f}"));
        }
    }
    v.sort();
    v
}

/// SHA-256 over `(relative path, contents)` of every file below `dir`.
pub fn tree_hash(dir: &Path) -> String {
    let mut h = Sha256::new();
    for rel in inventory(dir) {
        h.update(rel.as_bytes());
        h.update([0]);
        h.update(fs::read(dir.join(&rel)).expect("read file"));
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn data_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}
