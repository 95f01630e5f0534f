//! Acceptance suite: ten release gates covering the symmetry theorem, the
//! genome-size claim, training-dynamics orderings on the bundled tracks,
//! the end-to-end mirror property, CLI determinism, and the two numeric
//! oracles. Each test prints one `criterion N: PASS/FAIL` line (visible
//! with `--nocapture`; FAIL lines also appear in the panic message).
//!
//! Budgeted assertions (criteria 3, 5, 6, 7) train real populations on the
//! bundled maps with pinned seeds; they are stochastic claims made
//! reproducible by the deterministic seed schedule.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use symnav::evolution::{evolve, init_population, EvolutionConfig, SelectionStrategy};
use symnav::geometry::{ray_segment_distance, OrientedRect, Point, Ray, Segment};
use symnav::network::{Chromosome, NetworkSpec, SymmetricDepth};
use symnav::sensors::{make_sensor, SensorKind};
use symnav::simulation::{make_evaluator, run_episode, EpisodeConfig};
use symnav::track::Track;
use symnav::vehicle::{footprint, step, VehicleParams, VehicleState};

fn verdict(criterion: usize, pass: bool, detail: &str) {
    let line = format!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

fn tracks_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../tracks")
}

fn load_map(name: &str) -> Track {
    Track::load(&tracks_dir().join(name)).expect("bundled track loads")
}

/// One seeded training run; returns the first generation containing a
/// winning chromosome, if any.
fn gens_to_solve(
    track: &Track,
    kind: SensorKind,
    beams: usize,
    symmetric: bool,
    selection: SelectionStrategy,
    seed: u64,
) -> Option<usize> {
    let history = train_history(track, kind, beams, symmetric, selection, seed);
    history.iter().find(|s| s.solved).map(|s| s.generation)
}

fn train_history(
    track: &Track,
    kind: SensorKind,
    beams: usize,
    symmetric: bool,
    selection: SelectionStrategy,
    seed: u64,
) -> Vec<symnav::evolution::GenerationStats> {
    let sensor = make_sensor(kind, beams, track.track_width()).unwrap();
    let spec =
        NetworkSpec::new(vec![beams, beams, 2], symmetric, SymmetricDepth::AllLayers).unwrap();
    let config = EvolutionConfig {
        master_seed: seed,
        max_generations: 25,
        selection,
        ..EvolutionConfig::default()
    };
    let evaluator = make_evaluator(
        vec![track.clone()],
        VehicleParams::default(),
        sensor,
        EpisodeConfig { max_ticks: 500, record_trajectory: false },
    );
    evolve(&config, &spec, &evaluator).unwrap()
}

/// Median over generation counts where `None` means "did not solve within
/// the budget" and sorts above every finite count.
fn median(mut xs: Vec<Option<usize>>) -> f64 {
    xs.sort_by_key(|v| v.unwrap_or(usize::MAX));
    let at = |o: &Option<usize>| o.map_or(f64::INFINITY, |g| g as f64);
    let n = xs.len();
    0.5 * (at(&xs[(n - 1) / 2]) + at(&xs[n / 2]))
}

fn fmt_median(m: f64) -> String {
    if m.is_finite() { format!("{m}") } else { "unsolved".to_string() }
}

// --- criterion 1: negation under input reversal -------------------------

#[test]
fn criterion_1_negation_under_swap() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut cases = 0u32;
    while cases < 1200 {
        let input = rng.random_range(4..=40usize);
        let hidden = rng.random_range(2..=12usize);
        let depth = if rng.random_bool(0.5) {
            SymmetricDepth::AllLayers
        } else {
            SymmetricDepth::FirstLayerOnly
        };
        let mut sizes = vec![input, hidden];
        if rng.random_bool(0.4) {
            sizes.push(rng.random_range(2..=8usize));
        }
        sizes.push(2);
        let spec = NetworkSpec::new(sizes, true, depth).unwrap();
        let genes: Vec<f64> =
            (0..spec.genome_length()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let net = Chromosome::new(genes, spec).unwrap().decode();

        let x: Vec<f64> = (0..input).map(|_| rng.random_range(-1.0..1.0)).collect();
        let xr: Vec<f64> = x.iter().rev().copied().collect();
        let (l, r) = net.forward(&x).unwrap();
        let (lr, rr) = net.forward(&xr).unwrap();
        assert_eq!(l, -lr, "left output not exactly negated");
        assert_eq!(r, -rr, "right output not exactly negated");
        worst = worst.max((l + lr).abs()).max((r + rr).abs());
        cases += 1;
    }
    verdict(
        1,
        worst < 1e-12,
        &format!("{cases} random symmetric nets x inputs: reversed inputs negate outputs, max |err| = {worst:e}"),
    );
}

// --- criterion 2: genome halving -----------------------------------------

#[test]
fn criterion_2_genome_halving() {
    let sym = NetworkSpec::new(vec![4, 4, 2], true, SymmetricDepth::AllLayers).unwrap();
    let unc = NetworkSpec::new(vec![4, 4, 2], false, SymmetricDepth::AllLayers).unwrap();
    assert_eq!(sym.genome_length(), 12);
    assert_eq!(unc.genome_length(), 24);

    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..300 {
        let mut sizes: Vec<usize> =
            (0..rng.random_range(2..=4usize)).map(|_| 2 * rng.random_range(1..=15usize)).collect();
        sizes.push(2);
        let s = NetworkSpec::new(sizes.clone(), true, SymmetricDepth::AllLayers).unwrap();
        let u = NetworkSpec::new(sizes.clone(), false, SymmetricDepth::AllLayers).unwrap();
        assert_eq!(
            2 * s.genome_length(),
            u.genome_length(),
            "even-width spec {sizes:?} does not halve"
        );
    }
    verdict(2, true, "[4,4,2] symmetric = 12 vs 24 genes; 300 random even-width specs halve exactly");
}

// --- criterion 3: convergence ordering on the simple track ---------------

#[test]
fn criterion_3_convergence_ordering() {
    let track = load_map("map1.toml");
    let seeds = 1..=10u64;
    let sym: Vec<Option<usize>> = seeds
        .clone()
        .map(|s| {
            gens_to_solve(&track, SensorKind::Basic, 25, true, SelectionStrategy::Tournament, s)
        })
        .collect();
    let unc: Vec<Option<usize>> = seeds
        .map(|s| {
            gens_to_solve(&track, SensorKind::Basic, 25, false, SelectionStrategy::Tournament, s)
        })
        .collect();

    let fast = sym.iter().filter(|g| g.is_some_and(|g| g <= 20)).count();
    let med_sym = median(sym.clone());
    let med_unc = median(unc.clone());
    verdict(
        3,
        med_sym < med_unc && fast >= 8,
        &format!(
            "median generations-to-solve symmetric {} < unconstrained {}; {fast}/10 symmetric seeds solve within 20 generations (sym {sym:?}, unc {unc:?})",
            fmt_median(med_sym),
            fmt_median(med_unc)
        ),
    );
}

// --- criterion 4: mirror-system test --------------------------------------

fn seg(x1: f64, y1: f64, x2: f64, y2: f64) -> Segment {
    Segment::new(Point { x: x1, y: y1 }, Point { x: x2, y: y2 }).unwrap()
}

/// Corridor along +x with a one-sided obstacle; `flip` = -1.0 reflects the
/// scene across the start-heading axis.
fn mirror_corridor(flip: f64) -> Track {
    let obstacle =
        OrientedRect::new(Point { x: 260.0, y: 16.0 * flip }, 28.0, 14.0, 0.0).unwrap();
    Track::new(
        "mirror-corridor",
        80.0,
        Point { x: 0.0, y: 0.0 },
        0.0,
        Point { x: 700.0, y: 0.0 },
        vec![
            seg(-40.0, -40.0 * flip, 760.0, -40.0 * flip),
            seg(-40.0, 40.0 * flip, 760.0, 40.0 * flip),
            seg(-40.0, -40.0 * flip, -40.0, 40.0 * flip),
            seg(760.0, -40.0 * flip, 760.0, 40.0 * flip),
        ],
        vec![obstacle],
    )
    .unwrap()
}

#[test]
fn criterion_4_mirror_system() {
    let spec = NetworkSpec::new(vec![15, 8, 2], true, SymmetricDepth::AllLayers).unwrap();
    let chromosome = init_population(
        &EvolutionConfig { population_size: 2, master_seed: 7, ..EvolutionConfig::default() },
        &spec,
    )
    .into_iter()
    .next()
    .unwrap();
    let weights = chromosome.decode();
    let sensor = make_sensor(SensorKind::Basic, 15, 80.0).unwrap();
    let vehicle = VehicleParams::default();
    let config = EpisodeConfig { max_ticks: 400, record_trajectory: true };

    let a = run_episode(&mirror_corridor(1.0), &vehicle, &sensor, &weights, &config, 0).unwrap();
    let b = run_episode(&mirror_corridor(-1.0), &vehicle, &sensor, &weights, &config, 0).unwrap();

    assert_eq!(a.outcome.ticks, b.outcome.ticks);
    let mut worst_pos = 0.0f64;
    let mut steered = false;
    for (sa, sb) in a.trajectory.iter().zip(&b.trajectory) {
        // Steering must be exactly negated; positions exact reflections.
        assert_eq!(sa.steer_command, -sb.steer_command, "steering not exactly negated");
        worst_pos = worst_pos.max((sa.state.x - sb.state.x).abs());
        worst_pos = worst_pos.max((sa.state.y + sb.state.y).abs());
        steered |= sa.steer_command.abs() > 1e-6;
    }
    assert!(steered, "vacuous: controller never steered");
    verdict(
        4,
        worst_pos < 1e-9,
        &format!(
            "{} ticks on corridor vs mirror: steering exactly negated, max per-tick position error {worst_pos:e}",
            a.outcome.ticks
        ),
    );
}

// --- criterion 5: beam-resolution trend -----------------------------------

#[test]
fn criterion_5_beam_resolution_trend() {
    let track = load_map("map2.toml");
    let run = |beams: usize| -> Vec<Option<usize>> {
        (1..=5u64)
            .map(|s| {
                gens_to_solve(&track, SensorKind::Basic, beams, true, SelectionStrategy::Tournament, s)
            })
            .collect()
    };
    let (g5, g7, g15, g25) = (run(5), run(7), run(15), run(25));
    let (m5, m7, m15, m25) = (median(g5.clone()), median(g7.clone()), median(g15.clone()), median(g25.clone()));
    let low_res_failures = g5.iter().chain(&g7).filter(|g| g.is_none()).count();
    verdict(
        5,
        m15 <= m5 && m15 <= m7 && m25 <= m5 && m25 <= m7,
        &format!(
            "median generations-to-solve: 5 beams {}, 7 beams {}, 15 beams {}, 25 beams {}; {low_res_failures} low-resolution runs did not converge within budget (recorded, not a failure)",
            fmt_median(m5), fmt_median(m7), fmt_median(m15), fmt_median(m25)
        ),
    );
}

// --- criterion 6: noise degradation ----------------------------------------

#[test]
fn criterion_6_noise_degradation() {
    let track = load_map("map2.toml");
    let rate = |kind: SensorKind| -> usize {
        (1..=5u64)
            .filter(|&s| {
                gens_to_solve(&track, kind, 15, true, SelectionStrategy::Tournament, s).is_some()
            })
            .count()
    };
    let basic = rate(SensorKind::Basic);
    let camera = rate(SensorKind::Camera);
    let lidar = rate(SensorKind::Lidar);
    let medium = rate(SensorKind::MediumRadar);
    verdict(
        6,
        basic >= lidar && lidar >= medium && medium <= camera && medium <= basic,
        &format!(
            "solve rates over 5 seeds at 15 beams: basic {basic}/5 >= lidar {lidar}/5 >= medium_radar {medium}/5; medium_radar is the minimum (camera {camera}/5)"
        ),
    );
}

// --- criterion 7: selection-strategy comparison ----------------------------

#[test]
fn criterion_7_selection_comparison() {
    let track = load_map("map2.toml");
    let run = |sel: SelectionStrategy| -> Vec<Option<usize>> {
        (1..=10u64)
            .map(|s| gens_to_solve(&track, SensorKind::Basic, 7, true, sel, s))
            .collect()
    };

    // Hard assertion: with noiseless evaluation, elitism's per-generation
    // best fitness never decreases (elites are carried verbatim).
    for seed in 1..=10u64 {
        let history =
            train_history(&track, SensorKind::Basic, 7, true, SelectionStrategy::Elitism, seed);
        for w in history.windows(2) {
            assert!(
                w[1].best_fitness >= w[0].best_fitness,
                "elitism best fitness decreased at generation {} (seed {seed})",
                w[1].generation
            );
        }
    }

    let tournament = run(SelectionStrategy::Tournament);
    let elitism = run(SelectionStrategy::Elitism);
    let roulette = run(SelectionStrategy::Roulette);
    let (mt, me, mr) = (median(tournament), median(elitism), median(roulette));
    let soft = if me <= mt {
        format!("soft ordering holds: elitism median {} <= tournament {}", fmt_median(me), fmt_median(mt))
    } else {
        format!(
            "FLAGGED (soft, not failing): elitism median {} > tournament {} on this corpus",
            fmt_median(me),
            fmt_median(mt)
        )
    };
    verdict(
        7,
        true,
        &format!(
            "elitism best-fitness curves monotone non-decreasing over 10 seeds; {soft}; roulette median {}",
            fmt_median(mr)
        ),
    );
}

// --- criterion 8: train determinism across reruns and thread counts --------

#[test]
fn criterion_8_train_determinism() {
    let corridor = "\
name = \"det-corridor\"\n\
track_width = 90.0\n\n\
[start]\nx = 0.0\ny = 0.0\nheading_deg = 0.0\n\n\
[destination]\nx = 500.0\ny = 0.0\n\n\
[[walls]]\nx1 = -60.0\ny1 = 45.0\nx2 = 560.0\ny2 = 45.0\n\n\
[[walls]]\nx1 = -60.0\ny1 = -45.0\nx2 = 560.0\ny2 = -45.0\n\n\
[[walls]]\nx1 = -60.0\ny1 = -45.0\nx2 = -60.0\ny2 = 45.0\n\n\
[[walls]]\nx1 = 560.0\ny1 = -45.0\nx2 = 560.0\ny2 = 45.0\n";
    let config = format!(
        "master_seed = 9\n\n[tracks]\nembedded = [{corridor:?}]\n\n[sensor]\nkind = \"basic\"\nbeams = 5\n\n\
[evolution]\npopulation_size = 20\nselection_group = 4\nmax_generations = 3\nstop_on_solve = false\n\n\
[episode]\nmax_ticks = 150\n"
    );
    let dir = std::env::temp_dir().join(format!("symnav-acc8-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("exp.toml");
    std::fs::write(&config_path, config).unwrap();

    let train = |input: &Path, out: &str, threads: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_symnav"))
            .args(["train"])
            .arg(input)
            .args(["--out"])
            .arg(dir.join(out))
            .args(["--quiet", "--threads", threads])
            .status()
            .expect("spawn train");
        assert!(
            matches!(status.code(), Some(0) | Some(2)),
            "train exited with {:?}",
            status.code()
        );
    };
    train(&config_path, "a", "0");
    let manifest = dir.join("a/manifest.toml");
    train(&manifest, "b", "1");
    train(&manifest, "c", "3");

    let read = |run: &str, file: &str| std::fs::read(dir.join(run).join(file)).unwrap();
    let mut identical = true;
    for file in ["manifest.toml", "fitness.csv", "best.chromosome", "checkpoints/gen-0002.chromosome"] {
        let a = read("a", file);
        identical &= a == read("b", file) && a == read("c", file);
    }
    verdict(
        8,
        identical,
        "rerun from manifest with 1 and 3 worker threads: manifest, fitness.csv, best.chromosome, checkpoints byte-identical",
    );
    std::fs::remove_dir_all(&dir).ok();
}

// --- criterion 9: kinematics oracle ----------------------------------------

#[test]
fn criterion_9_kinematics_oracle() {
    let params = VehicleParams::default();

    // Saturated steering settles onto a circle of radius L / sin(delta_max).
    let mut state = VehicleState::new(0.0, 0.0, 0.0);
    let mut orbit = Vec::new();
    for tick in 0..160 {
        state = step(state, params.max_steer, &params);
        if tick >= 100 {
            orbit.push(state.position());
        }
    }
    assert_eq!(state.delta, params.max_steer, "steering must saturate");
    let anchor = orbit[0];
    let diameter =
        orbit.iter().map(|p| anchor.distance_to(*p)).fold(0.0f64, f64::max);
    let measured = diameter / 2.0;
    let expected = params.wheelbase / params.max_steer.sin();
    let rel = (measured - expected).abs() / expected;

    // Zero steering from the origin: displacement is exactly speed * ticks.
    let mut straight = VehicleState::new(0.0, 0.0, 0.0);
    for _ in 0..100 {
        straight = step(straight, 0.0, &params);
    }
    let exact = straight.x == params.speed * 100.0 && straight.y == 0.0 && straight.delta == 0.0;

    verdict(
        9,
        rel < 0.01 && exact,
        &format!(
            "turning radius {measured:.4} vs wheelbase/sin(max_steer) = {expected:.4} (rel err {rel:.2e}); 100-tick zero-steer displacement exactly {}",
            params.speed * 100.0
        ),
    );
}

// --- criterion 10: raycast vs sampling oracle -------------------------------

fn lerp(a: Point, b: Point, t: f64) -> Point {
    Point { x: a.x + (b.x - a.x) * t, y: a.y + (b.y - a.y) * t }
}

fn line_side(ray: &Ray, p: Point) -> f64 {
    let (dx, dy) = ray.direction();
    dx * (p.y - ray.origin().y) - dy * (p.x - ray.origin().x)
}

fn along(ray: &Ray, p: Point) -> f64 {
    let (dx, dy) = ray.direction();
    dx * (p.x - ray.origin().x) + dy * (p.y - ray.origin().y)
}

enum Oracle {
    Hit(f64),
    Miss,
    Skip,
}

/// Independent route: sample the signed side of the ray line along the
/// segment, bisect any sign change, classify by position along the ray.
/// Grazing configurations fall into a skip band; the geometry unit tests
/// pin those explicitly.
fn sampling_oracle(ray: &Ray, seg: &Segment) -> Oracle {
    const N: usize = 64;
    const LINE_BAND: f64 = 1e-7;
    let c: Vec<f64> =
        (0..=N).map(|i| line_side(ray, lerp(seg.a(), seg.b(), i as f64 / N as f64))).collect();

    let mut change = None;
    for i in 0..N {
        if c[i] == 0.0 || c[i + 1] == 0.0 {
            return Oracle::Skip;
        }
        if (c[i] > 0.0) != (c[i + 1] > 0.0) {
            change = Some(i);
            break;
        }
    }
    let Some(i) = change else {
        if c.iter().all(|v| v.abs() > LINE_BAND) {
            return Oracle::Miss;
        }
        return Oracle::Skip;
    };
    let (mut lo, mut hi) = (i as f64 / N as f64, (i + 1) as f64 / N as f64);
    let lo_negative = c[i] < 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (line_side(ray, lerp(seg.a(), seg.b(), mid)) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    if u < 1e-6 || u > 1.0 - 1e-6 {
        return Oracle::Skip;
    }
    let q = lerp(seg.a(), seg.b(), u);
    let t = along(ray, q);
    if t.abs() < 1e-6 {
        return Oracle::Skip;
    }
    if t < 0.0 {
        return Oracle::Miss;
    }
    Oracle::Hit(ray.origin().distance_to(q))
}

#[test]
fn criterion_10_raycast_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9);
    let coord = |rng: &mut ChaCha8Rng| rng.random_range(-100.0..100.0);
    let (mut checked, mut hits) = (0u32, 0u32);
    let mut worst = 0.0f64;

    for scene in 0..10_000 {
        let ray = Ray::new(Point { x: coord(&mut rng), y: coord(&mut rng) }, rng.random_range(-PI..PI));
        let a = Point { x: coord(&mut rng), y: coord(&mut rng) };
        let b = Point { x: coord(&mut rng), y: coord(&mut rng) };
        if a == b {
            continue;
        }
        let seg = Segment::new(a, b).unwrap();
        match sampling_oracle(&ray, &seg) {
            Oracle::Skip => {}
            Oracle::Miss => {
                checked += 1;
                assert!(
                    ray_segment_distance(&ray, &seg).is_none(),
                    "scene {scene}: oracle miss, closed form hit"
                );
            }
            Oracle::Hit(d) => {
                checked += 1;
                hits += 1;
                let got = ray_segment_distance(&ray, &seg)
                    .unwrap_or_else(|| panic!("scene {scene}: oracle hit at {d}, closed form missed"));
                worst = worst.max((got - d).abs());
                assert!((got - d).abs() < 1e-6, "scene {scene}: {got} vs oracle {d}");
            }
        }
    }
    verdict(
        10,
        checked >= 9_900 && hits >= 1_000,
        &format!(
            "{checked}/10000 scenes checked against the sampling oracle ({hits} hits), max distance disagreement {worst:e}"
        ),
    );
}

// Collision semantics used by the budgeted criteria above: episodes start
// outside all geometry on every bundled map (a start-in-collision map would
// silently zero an arm of the comparison).
#[test]
fn bundled_maps_start_clear() {
    let params = VehicleParams::default();
    for i in 1..=10 {
        let track = load_map(&format!("map{i}.toml"));
        let state = VehicleState::new(track.start().x, track.start().y, track.start_heading());
        assert!(
            !track.first_collision(&footprint(&state, &params)),
            "map{i} starts in collision"
        );
    }
}
