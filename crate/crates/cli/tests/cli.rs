//! End-to-end runs of the `symnav` binary: artifact layout, exit codes,
//! CSV/SVG emission, and the documented per-command behaviors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use symnav::track::Track;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symnav"))
}

fn tracks_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../tracks")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symnav-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn train_writes_artifacts_and_reruns_identically() {
    let dir = tmp("train");
    let config = format!(
        "master_seed = 3\n\n[tracks]\npaths = [{:?}]\n\n[sensor]\nkind = \"basic\"\nbeams = 15\n\n\
[evolution]\nmax_generations = 10\n\n[episode]\nmax_ticks = 500\n",
        tracks_dir().join("map1.toml").to_str().unwrap()
    );
    let config_path = dir.join("exp.toml");
    fs::write(&config_path, config).unwrap();

    let run = |out: &str| {
        let status = bin()
            .arg("train")
            .arg(&config_path)
            .args(["--seed", "42", "--quiet", "--out"])
            .arg(dir.join(out))
            .status()
            .unwrap();
        status.code()
    };
    assert_eq!(run("a"), Some(0), "symmetric training on map1 should solve");

    let fitness = fs::read_to_string(dir.join("a/fitness.csv")).unwrap();
    let mut lines = fitness.lines();
    assert_eq!(lines.next(), Some("generation,best_fitness,mean_fitness,solved"));
    let rows = lines.count();
    assert!(rows >= 1 && rows <= 10, "expected 1..=10 generation rows, got {rows}");
    assert!(dir.join("a/best.chromosome").exists());
    assert!(dir.join("a/manifest.toml").exists());
    assert!(dir.join("a/checkpoints/gen-0000.chromosome").exists());

    // Same config + seed must reproduce the run byte-for-byte.
    assert_eq!(run("b"), Some(0));
    assert_eq!(fs::read(dir.join("a/fitness.csv")).unwrap(), fs::read(dir.join("b/fitness.csv")).unwrap());
    assert_eq!(
        fs::read(dir.join("a/best.chromosome")).unwrap(),
        fs::read(dir.join("b/best.chromosome")).unwrap()
    );
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_trained_chromosome_reaches_destination_and_renders() {
    let dir = tmp("eval");
    let config = format!(
        "master_seed = 3\n\n[tracks]\npaths = [{:?}]\n\n[sensor]\nkind = \"basic\"\nbeams = 15\n\n\
[evolution]\nmax_generations = 10\n\n[episode]\nmax_ticks = 500\n",
        tracks_dir().join("map1.toml").to_str().unwrap()
    );
    let config_path = dir.join("exp.toml");
    fs::write(&config_path, config).unwrap();
    let status = bin()
        .arg("train")
        .arg(&config_path)
        .args(["--quiet", "--out"])
        .arg(dir.join("run"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    // The winning chromosome must finish its training track.
    let out = bin()
        .arg("eval")
        .arg(dir.join("run/best.chromosome"))
        .arg("--tracks")
        .arg(tracks_dir().join("map1.toml"))
        .args(["--max-ticks", "500", "--scans", "--out"])
        .arg(dir.join("eval"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(
        text.contains("track=map1 outcome=ReachedDestination"),
        "unexpected eval report: {text}"
    );
    let traj = dir.join("eval/map1.trajectory.csv");
    let head = fs::read_to_string(&traj).unwrap();
    assert!(head.starts_with("tick,x,y,theta_rad,delta_rad,steer_cmd_rad\n"));
    assert!(dir.join("eval/map1.scans.csv").exists());

    // Rendering the recorded run emits both SVG artifacts.
    let out = bin()
        .arg("render")
        .arg(&traj)
        .arg("--track")
        .arg(tracks_dir().join("map1.toml"))
        .arg("--scans")
        .arg(dir.join("eval/map1.scans.csv"))
        .args(["--fov-deg", "180"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for name in ["map1.svg", "map1.steering.svg"] {
        let svg = fs::read_to_string(dir.join("eval").join(name)).unwrap();
        assert!(svg.starts_with("<?xml"), "{name} missing xml prolog");
        assert!(svg.trim_end().ends_with("</svg>"), "{name} truncated");
    }
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn zero_weight_chromosome_drives_straight_without_collision() {
    let dir = tmp("zero");
    fs::write(
        dir.join("zero.chromosome"),
        "5 5 2 symmetric all_layers\n0 0 0 0 0 0 0 0 0 0 0 0 0 0\n",
    )
    .unwrap();
    // Straight corridor: destination dead ahead, so a straight driver must
    // reach it (and can never collide).
    fs::write(
        dir.join("corridor.toml"),
        "name = \"straight\"\ntrack_width = 90.0\n\n[start]\nx = 0.0\ny = 0.0\nheading_deg = 0.0\n\n\
[destination]\nx = 500.0\ny = 0.0\n\n\
[[walls]]\nx1 = -60.0\ny1 = 45.0\nx2 = 700.0\ny2 = 45.0\n\n\
[[walls]]\nx1 = -60.0\ny1 = -45.0\nx2 = 700.0\ny2 = -45.0\n\n\
[[walls]]\nx1 = -60.0\ny1 = -45.0\nx2 = -60.0\ny2 = 45.0\n\n\
[[walls]]\nx1 = 700.0\ny1 = -45.0\nx2 = 700.0\ny2 = 45.0\n",
    )
    .unwrap();
    let out = bin()
        .arg("eval")
        .arg(dir.join("zero.chromosome"))
        .arg("--tracks")
        .arg(dir.join("corridor.toml"))
        .args(["--max-ticks", "400", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(!text.contains("Collision"), "straight corridor must not collide: {text}");
    assert!(
        text.contains("ReachedDestination") || text.contains("TimedOut"),
        "unexpected outcome: {text}"
    );
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_beam_mismatch_exits_one_naming_both_dimensions() {
    let dir = tmp("mismatch");
    fs::write(
        dir.join("net15.chromosome"),
        format!("15 4 2 symmetric all_layers\n{}\n", vec!["0"; 7 * 4 + 2 * 2].join(" ")),
    )
    .unwrap();
    let out = bin()
        .arg("eval")
        .arg(dir.join("net15.chromosome"))
        .arg("--tracks")
        .arg(tracks_dir().join("map1.toml"))
        .args(["--beams", "7", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains('7') && err.contains("15"),
        "diagnostic must name both dimensions: {err}"
    );
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_emits_ordered_csv() {
    let dir = tmp("sweep");
    let config = format!(
        "master_seed = 5\n\n[tracks]\npaths = [{:?}]\n\n[sensor]\nkind = \"basic\"\nbeams = 15\n\n\
[evolution]\nmax_generations = 6\n\n[episode]\nmax_ticks = 500\n",
        tracks_dir().join("map1.toml").to_str().unwrap()
    );
    let config_path = dir.join("exp.toml");
    fs::write(&config_path, config).unwrap();

    let out = bin()
        .arg("sweep")
        .arg(&config_path)
        .args(["--axis", "beam-count", "--values", "15", "25", "--reps", "2", "--out"])
        .arg(dir.join("sw"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(dir.join("sw/sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "axis_value,seed,generations_to_solve,max_fitness,solved");
    assert_eq!(lines.len(), 5, "2 values x 2 reps: {csv}");
    // Rows come out in values-by-repetitions order with seeds base, base+1.
    assert!(lines[1].starts_with("15,5,"));
    assert!(lines[2].starts_with("15,6,"));
    assert!(lines[3].starts_with("25,5,"));
    assert!(lines[4].starts_with("25,6,"));
    assert!(dir.join("sw/15-seed5/manifest.toml").exists());
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_track_is_deterministic_and_axis_aligned() {
    let dir = tmp("gen");
    for out in ["t1.toml", "t2.toml"] {
        let status = bin()
            .args(["gen-track", "--seed", "77", "--out"])
            .arg(dir.join(out))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = fs::read(dir.join("t1.toml")).unwrap();
    assert_eq!(a, fs::read(dir.join("t2.toml")).unwrap(), "same seed, same bytes");

    let track = Track::load(&dir.join("t1.toml")).unwrap();
    for w in track.walls() {
        assert!(
            w.a().x == w.b().x || w.a().y == w.b().y,
            "generated wall must be axis-aligned"
        );
    }
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn bundled_tracks_round_trip_canonically() {
    // save(load(x)) is canonical; loading the canonical form is a fixed
    // point, so serialized bundled maps must re-serialize byte-identically.
    for i in 1..=10 {
        let path = tracks_dir().join(format!("map{i}.toml"));
        let track = Track::load(&path).unwrap();
        let canon = track.to_toml_string();
        let again = Track::from_toml_str(&canon).unwrap();
        assert_eq!(again.to_toml_string(), canon, "map{i} canonical form unstable");
    }
}
