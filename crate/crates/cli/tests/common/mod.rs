#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn gesto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gesto")).args(args).output().expect("gesto runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// One golden replay: pose log, mode, extra flags, output extension.
pub struct Golden {
    pub name: &'static str,
    pub poses: &'static str,
    pub mode: &'static str,
    pub extra: &'static [&'static str],
    pub ext: &'static str,
}

pub const GOLDEN: [Golden; 5] = [
    Golden { name: "line_x", poses: "line_x.jsonl", mode: "2d", extra: &["--brush", "width=0.1", "--brush", "spacing=0.1"], ext: "obj" },
    Golden { name: "zigzag_spray", poses: "zigzag_spray.jsonl", mode: "2d", extra: &["--seed", "7"], ext: "glb" },
    Golden { name: "drip_2d", poses: "drip_2d.jsonl", mode: "2d", extra: &["--seed", "7", "--brush", "drip_p=0.5"], ext: "obj" },
    Golden { name: "helix_3d", poses: "helix_3d.jsonl", mode: "3d", extra: &["--brush", "sides=6"], ext: "glb" },
    Golden { name: "tool_switch", poses: "tool_switch.jsonl", mode: "2d", extra: &["--seed", "3"], ext: "obj" },
];

impl Golden {
    /// Runs the replay into `dir` and returns (stats line, mesh bytes, output).
    pub fn run(&self, dir: &Path, tag: &str) -> (String, Vec<u8>, Output) {
        let out = dir.join(format!("{}-{tag}.{}", self.name, self.ext));
        let poses = fixture(self.poses);
        let scan = fixture("wall_z0.jsonl");
        let mut args = vec!["replay", "--poses", poses.to_str().unwrap(), "--mode", self.mode, "--out", out.to_str().unwrap()];
        if self.mode == "2d" {
            args.extend(["--scan", scan.to_str().unwrap()]);
        }
        args.extend(self.extra);
        let o = gesto(&args);
        let mesh = std::fs::read(&out).unwrap_or_default();
        (stdout(&o), mesh, o)
    }
}
