use std::fs;
use std::path::{Path, PathBuf};

use tempfile::TempDir;
use vfr_ladder::cli::run;
use vfr_ladder::formats::{self, MeasurementFormat};
use vfr_ladder_core::default_ladder;
use vfr_ladder_core::synth::SyntheticModel;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new(model: SyntheticModel, sequences: usize) -> Self {
        let dir = TempDir::new().unwrap();
        let ladder = default_ladder();
        formats::write_ladder(
            &ladder,
            fs::File::create(dir.path().join("ladder.json")).unwrap(),
        )
        .unwrap();
        formats::write_model(
            &model,
            fs::File::create(dir.path().join("model.json")).unwrap(),
        )
        .unwrap();
        let f = Fixture { dir };
        assert_eq!(
            f.run(&[
                "synth",
                "--model",
                "model.json",
                "--ladder",
                "ladder.json",
                "--sequences",
                &sequences.to_string(),
                "--out",
                "m.csv"
            ]),
            0
        );
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> i32 {
        // relative names resolve inside the fixture directory
        let mut argv = vec!["vfr-ladder".to_string()];
        let mut prev_flag = false;
        for a in args {
            if prev_flag
                && (a.ends_with(".json")
                    || a.ends_with(".csv")
                    || a.ends_with(".md")
                    || a.ends_with(".ndjson"))
            {
                argv.push(self.path(a).to_string_lossy().into_owned());
            } else {
                argv.push(a.to_string());
            }
            prev_flag = a.starts_with("--");
        }
        run(argv)
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.path(name)).unwrap()
    }
}

fn measurements(path: &Path) -> vfr_ladder_core::MeasurementTable {
    formats::parse_measurements(
        fs::File::open(path).unwrap(),
        MeasurementFormat::Csv,
        &default_ladder(),
    )
    .unwrap()
}

#[test]
fn validate_complete_and_incomplete() {
    let f = Fixture::new(SyntheticModel::reference(&default_ladder()), 2);
    assert_eq!(
        f.run(&[
            "validate",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json"
        ]),
        0
    );
    let text = f.read("m.csv");
    let trimmed: String = text
        .lines()
        .filter(|l| !l.starts_with("seq0001,600,540,30,"))
        .map(|l| format!("{l}\n"))
        .collect();
    fs::write(f.path("cut.csv"), trimmed).unwrap();
    assert_eq!(
        f.run(&[
            "validate",
            "--measurements",
            "cut.csv",
            "--ladder",
            "ladder.json"
        ]),
        1
    );
}

#[test]
fn select_default_is_all_sixty() {
    let f = Fixture::new(SyntheticModel::reference(&default_ladder()), 2);
    assert_eq!(
        f.run(&[
            "select",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json",
            "--selector",
            "default",
            "--out",
            "sel.csv"
        ]),
        0
    );
    let results = formats::read_selections_csv(fs::File::open(f.path("sel.csv")).unwrap()).unwrap();
    assert_eq!(results.len(), 24);
    assert!(results.iter().all(|r| r.framerate_fps == 60));
    assert!(f.read("sel.csv").starts_with(
        "sequence,bitrate_kbps,height_px,threshold,selector,framerate_fps,achieved_quality,decode_energy_j\n"
    ));
}

#[test]
fn select_with_threshold_override() {
    let f = Fixture::new(SyntheticModel::reference(&default_ladder()), 1);
    assert_eq!(
        f.run(&[
            "select",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json",
            "--selector",
            "decodra",
            "--thresholds",
            "0,3",
            "--out",
            "sel.csv"
        ]),
        0
    );
    let results = formats::read_selections_csv(fs::File::open(f.path("sel.csv")).unwrap()).unwrap();
    assert_eq!(results.len(), 24);
    assert!(results
        .iter()
        .all(|r| r.threshold == 0.0 || r.threshold == 3.0));
}

#[test]
fn report_formats() {
    let f = Fixture::new(SyntheticModel::reference(&default_ladder()), 2);
    let base = [
        "report",
        "--measurements",
        "m.csv",
        "--ladder",
        "ladder.json",
        "--out",
    ];
    assert_eq!(f.run(&[&base[..], &["r.json"]].concat()), 0);
    assert_eq!(f.run(&[&base[..], &["r.csv"]].concat()), 0);
    assert_eq!(
        f.run(&[&base[..], &["r.md", "--rung-deltas", "deltas.csv"]].concat()),
        0
    );
    assert_eq!(f.run(&[&base[..], &["r.txt"]].concat()), 2);

    let json: serde_json::Value = serde_json::from_str(&f.read("r.json")).unwrap();
    assert_eq!(json["reference"], "default");
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["method"], "hq");
    assert!(rows[0]["threshold"].is_null());
    let thresholds: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r["threshold"].as_f64().unwrap())
        .collect();
    assert_eq!(thresholds, vec![1.0, 2.0, 4.0, 6.0]);
    for key in [
        "bd_psnr_db",
        "bd_vmaf",
        "delta_e_enc_pct",
        "delta_e_dec_pct",
        "bdde_psnr_pct",
        "bdde_vmaf_pct",
    ] {
        assert!(rows.iter().all(|r| r[key].is_number()), "{key}");
    }
    // fixed four decimals in the raw text
    assert!(f.read("r.json").contains("\"threshold\": 1.0000"));
    assert_eq!(json["rung_deltas"].as_array().unwrap().len(), 4);

    let csv = f.read("r.csv");
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("method,threshold,bd_psnr_db,bd_vmaf,delta_e_enc_pct,delta_e_dec_pct,bdde_psnr_pct,bdde_vmaf_pct\n"));
    let md = f.read("r.md");
    assert!(md.contains(
        "| Method | v_J | BD-PSNR | BD-VMAF | ΔE_enc | ΔE_dec | BDDE (PSNR) | BDDE (VMAF) |"
    ));
    assert_eq!(f.read("deltas.csv").lines().count(), 1 + 4 * 12);
}

#[test]
fn report_mean_curve_aggregation() {
    let f = Fixture::new(SyntheticModel::reference(&default_ladder()), 2);
    assert_eq!(
        f.run(&[
            "report",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json",
            "--out",
            "a.json",
            "--aggregation",
            "mean-curve"
        ]),
        0
    );
    assert_eq!(
        f.run(&[
            "report",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json",
            "--out",
            "b.json"
        ]),
        0
    );
    let a: serde_json::Value = serde_json::from_str(&f.read("a.json")).unwrap();
    let b: serde_json::Value = serde_json::from_str(&f.read("b.json")).unwrap();
    assert_eq!(a["aggregation"], "mean_curve");
    // identical sequences: both aggregations agree
    assert_eq!(a["rows"], b["rows"]);
}

#[test]
fn curves_output() {
    let f = Fixture::new(SyntheticModel::reference(&default_ladder()), 2);
    assert_eq!(
        f.run(&[
            "curves",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json",
            "--selector",
            "decodra",
            "--axis",
            "bitrate",
            "--threshold",
            "2",
            "--out",
            "c.csv"
        ]),
        0
    );
    let (kind, pts) = formats::read_curve_csv(fs::File::open(f.path("c.csv")).unwrap()).unwrap();
    assert_eq!(kind, vfr_ladder_core::bd::XKind::BitrateKbps);
    assert_eq!(pts.len(), 12);
    assert_eq!(pts[0].0, 145.0);
    assert_eq!(
        f.run(&[
            "curves",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json",
            "--selector",
            "hq",
            "--axis",
            "energy",
            "--sequence",
            "seq0001",
            "--out",
            "e.csv"
        ]),
        0
    );
    assert!(f
        .read("e.csv")
        .starts_with("# x_kind=decode_energy_j\nx,quality\n"));
    assert_eq!(
        f.run(&[
            "curves",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json",
            "--selector",
            "hq",
            "--axis",
            "energy",
            "--sequence",
            "nope",
            "--out",
            "e.csv"
        ]),
        1
    );
}

fn write_templates(f: &Fixture, drop_fps: bool) {
    let temporal = if drop_fps {
        "ffmpeg -i {input} {output}"
    } else {
        "ffmpeg -i {input} -vf fps={framerate_fps} {output}"
    };
    let t = serde_json::json!({
        "spatial_down": "ffmpeg -i {input} -vf scale=-2:{height_px}:flags=bicubic {output}",
        "temporal_down": temporal,
        "encode": "x265 --input {input} --bitrate {bitrate_kbps} --preset veryslow -o {output}",
        "temporal_up": "interp {input} --fps 60 {output}",
        "spatial_up": "ffmpeg -i {input} -vf scale=-2:2160:flags=bicubic {output}",
        "decode": "TAppDecoder -b {input} -o {output}",
        "measure_quality": "vmaf -d {input} -o {output}",
    });
    fs::write(f.path("templates.json"), t.to_string()).unwrap();
}

#[test]
fn plan_outputs() {
    let f = Fixture::new(SyntheticModel::reference(&default_ladder()), 1);
    write_templates(&f, false);
    let args = [
        "plan",
        "--ladder",
        "ladder.json",
        "--sequences",
        "seq0286",
        "--templates",
        "templates.json",
        "--out",
    ];
    assert_eq!(f.run(&[&args[..], &["p.json"]].concat()), 0);
    assert_eq!(f.run(&[&args[..], &["p.ndjson"]].concat()), 0);
    let plan: serde_json::Value = serde_json::from_str(&f.read("p.json")).unwrap();
    assert_eq!(plan["jobs"].as_array().unwrap().len(), 336);
    assert_eq!(f.read("p.ndjson").lines().count(), 336);
    let first: serde_json::Value =
        serde_json::from_str(f.read("p.ndjson").lines().next().unwrap()).unwrap();
    assert_eq!(first, plan["jobs"][0]);

    write_templates(&f, true);
    assert_eq!(f.run(&[&args[..], &["p2.json"]].concat()), 1);
}

#[test]
fn merge_energy_from_log() {
    let f = Fixture::new(SyntheticModel::reference(&default_ladder()), 1);
    let mut log =
        String::from("sequence,bitrate_kbps,height_px,framerate_fps,stage,run_index,energy_j\n");
    for run in 1..=3 {
        log.push_str(&format!("seq0000,145,360,24,decode,{run},{}\n", 9 + run));
        log.push_str(&format!("seq0000,145,360,24,encode,{run},100\n"));
    }
    fs::write(f.path("log.csv"), &log).unwrap();
    assert_eq!(
        f.run(&[
            "merge-energy",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json",
            "--log",
            "log.csv",
            "--out",
            "merged.csv"
        ]),
        0
    );
    let before = measurements(&f.path("m.csv"));
    let after = measurements(&f.path("merged.csv"));
    let changed: Vec<_> = before
        .records()
        .zip(after.records())
        .filter(|(a, b)| a != b)
        .collect();
    assert_eq!(changed.len(), 1);
    assert_eq!(changed[0].1.decode_energy_j, 11.0);

    let short: String = log.lines().take(3).map(|l| format!("{l}\n")).collect();
    fs::write(f.path("short.csv"), short).unwrap();
    assert_eq!(
        f.run(&[
            "merge-energy",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json",
            "--log",
            "short.csv",
            "--out",
            "merged.csv"
        ]),
        1
    );
    assert_eq!(
        f.run(&[
            "merge-energy",
            "--measurements",
            "m.csv",
            "--ladder",
            "ladder.json",
            "--log",
            "short.csv",
            "--any-run-count",
            "--out",
            "merged.csv"
        ]),
        0
    );
}

#[test]
fn json_measurements_are_accepted() {
    let f = Fixture::new(SyntheticModel::reference(&default_ladder()), 1);
    assert_eq!(
        f.run(&[
            "synth",
            "--model",
            "model.json",
            "--ladder",
            "ladder.json",
            "--sequences",
            "1",
            "--out",
            "m.json"
        ]),
        0
    );
    assert_eq!(
        f.run(&[
            "validate",
            "--measurements",
            "m.json",
            "--ladder",
            "ladder.json"
        ]),
        0
    );
    let a = measurements(&f.path("m.csv"));
    let b = formats::parse_measurements(
        fs::File::open(f.path("m.json")).unwrap(),
        MeasurementFormat::Json,
        &default_ladder(),
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(["vfr-ladder", "select", "--selector", "bogus"]), 2);
    assert_eq!(run(["vfr-ladder"]), 2);
    assert_eq!(run(["vfr-ladder", "frobnicate"]), 2);
    assert_eq!(run(["vfr-ladder", "--help"]), 0);
}

#[test]
fn missing_files_exit_one() {
    assert_eq!(
        run([
            "vfr-ladder",
            "validate",
            "--measurements",
            "/nonexistent.csv",
            "--ladder",
            "/nonexistent.json"
        ]),
        1
    );
}
