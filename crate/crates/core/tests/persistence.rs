use num_complex::Complex64;
use proptest::prelude::*;
use qtunnel::io::{
    dump_config, load_trajectory, parse_config, read_trajectory, save_trajectory, write_json, write_trajectory,
};
use qtunnel::propagator::{Frame, StepRecord};
use qtunnel::{load_config, Error, Trajectory};

fn shipped(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn trajectory() -> impl Strategy<Value = Trajectory<f64>> {
    (1usize..24, 1usize..5, 0usize..6).prop_flat_map(|(n, frames, scalars)| {
        (
            any::<f64>(),
            any::<f64>(),
            proptest::collection::vec(
                (any::<f64>(), proptest::collection::vec((any::<f64>(), any::<f64>()), n)),
                frames,
            ),
            proptest::collection::vec(proptest::array::uniform5(any::<f64>()), scalars),
        )
            .prop_map(|(x_min, dx, frames, scalars)| Trajectory {
                x_min,
                dx,
                frames: frames
                    .into_iter()
                    .map(|(time, z)| Frame {
                        time,
                        amplitudes: z.into_iter().map(|(r, i)| Complex64::new(r, i)).collect(),
                    })
                    .collect(),
                scalars: scalars
                    .into_iter()
                    .map(|[time, norm, kinetic, potential, center_of_mass]| StepRecord {
                        time,
                        norm,
                        kinetic,
                        potential,
                        center_of_mass,
                    })
                    .collect(),
                absorbed: 0.0,
            })
    })
}

proptest! {
    #[test]
    fn container_round_trip_is_bit_exact(t in trajectory()) {
        let mut buf = Vec::new();
        write_trajectory(&t, &mut buf).unwrap();
        let back = read_trajectory(&buf).unwrap();
        let mut a = Vec::new();
        write_trajectory(&back, &mut a).unwrap();
        prop_assert_eq!(a, buf);
        prop_assert_eq!(back.frames.len(), t.frames.len());
        prop_assert_eq!(back.x_min.to_bits(), t.x_min.to_bits());
    }
}

#[test]
fn shipped_configs_round_trip() {
    for name in ["case1.cfg", "case2.cfg"] {
        let c = load_config(shipped(name)).unwrap();
        assert_eq!(parse_config(&dump_config(&c)).unwrap(), c);
        assert_eq!(c.grid.n_points, 2048);
        assert_eq!(c.stepping.n_steps(), 12_000);
        assert_eq!(c.wavepacket.x0, -8.0);
    }
}

#[test]
fn case1_file_size() {
    let c = load_config(shipped("case1.cfg")).unwrap();
    let frames = 1 + c.stepping.n_steps() / c.stepping.stride();
    let expected = 64 + frames * (8 + 2048 * 16) + 8 + (c.stepping.n_steps() + 1) * 40;
    // About 6.6 MB of frame data plus the per-step scalar block.
    assert_eq!(frames, 201);
    assert!((6_500_000..7_200_000).contains(&expected));
}

#[test]
fn files_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let t = Trajectory {
        x_min: -1.0,
        dx: 0.5,
        frames: vec![Frame {
            time: 0.0,
            amplitudes: vec![Complex64::new(1.0, 0.0); 4],
        }],
        scalars: vec![],
        absorbed: 0.0,
    };
    let p = dir.path().join("t.qtt");
    save_trajectory(&t, &p).unwrap();
    assert_eq!(load_trajectory(&p).unwrap(), t);

    let mut bytes = std::fs::read(&p).unwrap();
    bytes[3] ^= 0xff;
    std::fs::write(&p, &bytes).unwrap();
    assert!(matches!(load_trajectory(&p), Err(Error::Format(_))));

    let missing_dir = dir.path().join("no/such/dir/report.json");
    let err = write_json("x", &serde_json::json!({"a": 1.0}), &missing_dir).unwrap_err();
    assert!(err.to_string().contains("no/such/dir"));
    assert_eq!(err.exit_code(), 2);
}
