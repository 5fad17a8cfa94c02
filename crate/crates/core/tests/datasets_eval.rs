use gamma_core::config::EngineConfig;
use gamma_core::dataset::{parse_heterogeneous, parse_homogeneous, write_heterogeneous};
use gamma_core::engine::{parse_scenario, simulate, Engine};
use gamma_core::eval::{ade_fde, evaluate, windows, Mode, PREDICTED_FRAMES};
use gamma_core::kinematics::{AgentType, ProfileSet};
use gamma_core::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn engine() -> Engine {
    Engine::new(EngineConfig::default(), ProfileSet::builtin()).unwrap()
}

#[test]
fn homogeneous_rows_map_to_observations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut text = String::from("# frame agent x y\n\n");
    let mut rows = 0;
    for frame in 0..30 {
        for id in 0..rng.random_range(1..6u64) {
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                frame * 10,
                id,
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0)
            ));
            rows += 1;
        }
    }
    let d = parse_homogeneous(&text).unwrap();
    assert_eq!(d.num_observations(), rows);
    assert_eq!(d.num_frames(), 30);
    assert_eq!(d.frame_step(), 10);
    assert!(d
        .frames()
        .all(|(_, obs)| obs.iter().all(|o| o.agent_type == AgentType::Pedestrian)));
}

#[test]
fn malformed_rows_name_their_line() {
    let err = parse_homogeneous("0 1 0.0 0.0\n1 1 zero 0.0\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains('2'), "{err}");
    assert!(parse_homogeneous("0 1 0.0 0.0\n0 1 1.0 0.0\n").is_err());
}

const MIXED: &str = "noise = 0.05
obstacle 20 20, 22 20, 22 22, 20 22
agent id=1 type=car x=0 y=0 heading=0 speed=6
agent id=2 type=pedestrian x=10 y=-4 heading=1.5707963267948966 speed=1.2
agent id=3 type=bicycle x=-5 y=6 heading=-0.3 speed=4
agent id=4 type=static_obstacle x=15 y=4
";

#[test]
fn mixed_dataset_round_trips() {
    let d = simulate(&engine(), &parse_scenario(MIXED).unwrap(), 15, 3).unwrap();
    assert_eq!(d.num_frames(), 16);
    assert_eq!(d.num_observations(), 64);
    let text = write_heterogeneous(&d);
    let back = parse_heterogeneous(&text).unwrap();
    assert_eq!(write_heterogeneous(&back), text);
    for (frame, obs) in d.frames() {
        for o in obs {
            assert_eq!(back.observation(frame, o.id), Some(o));
        }
    }
}

#[test]
fn ade_fde_match_direct_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let p: Vec<Vec2> = (0..12)
            .map(|_| Vec2::new(rng.random(), rng.random()))
            .collect();
        let t: Vec<Vec2> = (0..12)
            .map(|_| Vec2::new(rng.random(), rng.random()))
            .collect();
        let dists: Vec<f64> = p
            .iter()
            .zip(&t)
            .map(|(a, b)| ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt())
            .collect();
        let (ade, fde) = ade_fde(&p, &t).unwrap();
        assert!((ade - dists.iter().sum::<f64>() / 12.0).abs() < 1e-12);
        assert!((fde - dists[11]).abs() < 1e-12);
    }
    assert!(ade_fde(&[Vec2::ZERO], &[]).is_err());
    assert!(ade_fde(&[], &[]).is_err());
}

fn straight_scene() -> String {
    "agent id=1 type=pedestrian x=0 y=0 heading=0.3 speed=1.3
agent id=2 type=pedestrian x=0 y=30 heading=-0.2 speed=0.9
agent id=3 type=car x=-60 y=-30 heading=0 speed=8
"
    .to_string()
}

#[test]
fn straight_motion_is_predicted_exactly() {
    let e = engine();
    let d = simulate(&e, &parse_scenario(&straight_scene()).unwrap(), 24, 0).unwrap();
    assert_eq!(windows(&d).len(), 25 - 20 + 1);
    let ev = evaluate(&d, &e, Mode::Deterministic, 0).unwrap();
    assert_eq!(ev.results.len(), 18);
    assert!(
        ev.ade < 1e-9 && ev.fde < 1e-9,
        "ade {} fde {}",
        ev.ade,
        ev.fde
    );
}

fn crossing() -> gamma_core::dataset::TrajectoryDataset {
    let s = parse_scenario(
        "noise = 0.04
agent id=1 type=pedestrian x=-5 y=0.3 heading=0 speed=1.2
agent id=2 type=pedestrian x=5 y=-0.3 heading=3.14159 speed=1.1
agent id=3 type=pedestrian x=0.2 y=-5 heading=1.5708 speed=1.0 intention=keep_acceleration
agent id=4 type=bicycle x=-9 y=-3 heading=0.4 speed=3
",
    )
    .unwrap();
    simulate(&engine(), &s, 26, 5).unwrap()
}

#[test]
fn best_of_one_without_spread_is_deterministic() {
    let e = engine();
    let d = crossing();
    let det = evaluate(&d, &e, Mode::Deterministic, 1).unwrap();
    let one = evaluate(&d, &e, Mode::BestOfN { n: 1, sigma: 0.0 }, 1).unwrap();
    assert_eq!(det.results.len(), one.results.len());
    for (a, b) in det.results.iter().zip(&one.results) {
        assert_eq!(a.predicted, b.predicted);
    }
    assert_eq!(det.ade, one.ade);
}

#[test]
fn more_samples_never_hurt() {
    let e = engine();
    let d = crossing();
    let det = evaluate(&d, &e, Mode::Deterministic, 2).unwrap();
    let mut last: Option<gamma_core::eval::Evaluation> = None;
    for n in [1, 5, 20] {
        let ev = evaluate(&d, &e, Mode::BestOfN { n, sigma: 0.5 }, 2).unwrap();
        for r in &ev.results {
            assert_eq!(r.predicted.len(), PREDICTED_FRAMES);
            assert_eq!(r.truth.len(), PREDICTED_FRAMES);
        }
        if let Some(prev) = &last {
            for (a, b) in prev.results.iter().zip(&ev.results) {
                assert_eq!((a.window, a.agent), (b.window, b.agent));
                assert!(b.ade <= a.ade + 1e-12);
            }
        }
        last = Some(ev);
    }
    let best20 = last.unwrap();
    assert!(
        best20.ade <= det.ade + 0.5,
        "best20 {} det {}",
        best20.ade,
        det.ade
    );
    let again = evaluate(&d, &e, Mode::BestOfN { n: 20, sigma: 0.5 }, 2).unwrap();
    assert_eq!(again.results, best20.results);
    let other = evaluate(&d, &e, Mode::BestOfN { n: 20, sigma: 0.5 }, 3).unwrap();
    assert_ne!(other.results, best20.results);
}

#[test]
fn mode_names_round_trip() {
    assert_eq!("det".parse::<Mode>().unwrap(), Mode::Deterministic);
    assert_eq!(
        "best20".parse::<Mode>().unwrap(),
        Mode::BestOfN { n: 20, sigma: 0.5 }
    );
    assert_eq!(Mode::BestOfN { n: 20, sigma: 0.5 }.to_string(), "best20");
    assert!("best0".parse::<Mode>().is_err());
    assert!("median".parse::<Mode>().is_err());
}

#[test]
fn thread_count_does_not_change_results() {
    let e = engine();
    let d = crossing();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| evaluate(&d, &e, Mode::BestOfN { n: 5, sigma: 0.5 }, 8).unwrap())
    };
    assert_eq!(run(1).results, run(4).results);
}
