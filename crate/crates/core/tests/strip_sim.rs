use csvc::dwt3d::{forward_3d, Gof3D};
use csvc::lifting::LiftingCoeffs;
use csvc::strip_sim::*;
use csvc::synth::random_frame;
use csvc::video_io::FramePair;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_pair(w: usize, h: usize, seed: u64) -> FramePair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FramePair::new(random_frame(w, h, &mut rng).unwrap(), random_frame(w, h, &mut rng).unwrap()).unwrap()
}

fn first_mismatch(a: &Gof3D, b: &Gof3D) -> Option<String> {
    let grids = [("L", &a.l_frame, &b.l_frame), ("H", &a.h_frame, &b.h_frame)];
    for (name, ga, gb) in grids {
        let bands = [("LL", &ga.ll, &gb.ll), ("LH", &ga.details[0][0], &gb.details[0][0]), ("HL", &ga.details[0][1], &gb.details[0][1]), ("HH", &ga.details[0][2], &gb.details[0][2])];
        for (bn, x, y) in bands {
            for r in 0..x.height {
                for c in 0..x.width {
                    if x.get(r, c) != y.get(r, c) {
                        return Some(format!("{name}-{bn} ({r},{c}): {} vs {}", x.get(r, c), y.get(r, c)));
                    }
                }
            }
        }
    }
    None
}

#[test]
fn fixed_output_is_bit_identical() {
    let c = LiftingCoeffs::fixed_adopted();
    for (n, p) in [(12, 2), (16, 2), (64, 2), (64, 4), (48, 8)] {
        let pair = random_pair(n, n, n as u64 * 31 + p as u64);
        let rep = simulate_pair(&pair, p, &c).unwrap();
        let want = forward_3d(&pair, 1, &c).unwrap();
        assert_eq!(first_mismatch(&rep.output, &want), None, "N={n} P={p}");
    }
}

#[test]
fn float_output_matches_reference() {
    let c = LiftingCoeffs::float_exact();
    let pair = random_pair(64, 32, 9);
    let rep = simulate_pair(&pair, 4, &c).unwrap();
    let want = forward_3d(&pair, 1, &c).unwrap();
    // same operation order, so equality is exact in float as well
    assert_eq!(first_mismatch(&rep.output, &want), None);
}

#[test]
fn non_square_frames() {
    let c = LiftingCoeffs::fixed_adopted();
    let pair = random_pair(40, 24, 3);
    let rep = simulate_pair(&pair, 2, &c).unwrap();
    assert_eq!(first_mismatch(&rep.output, &forward_3d(&pair, 1, &c).unwrap()), None);
}

#[test]
fn timing_constants() {
    let c = LiftingCoeffs::fixed_adopted();
    for (n, p) in [(16, 2), (64, 2), (64, 4), (512, 2)] {
        let rep = simulate_pair(&random_pair(n, n, 1), p, &c).unwrap();
        assert_eq!(rep.latency_2d, 10, "N={n} P={p}");
        assert_eq!(rep.latency_3d, 12, "N={n} P={p}");
        assert_eq!(rep.total_cycles, n * n / (2 * p) + n + 14, "N={n} P={p}");
        assert_eq!(rep.slack, n as i64 + 2);
        assert!(rep.slack.unsigned_abs() as usize <= rep.strips * (2 * p + 1));
        assert_eq!(rep.outputs_per_cycle_steady, (4 * p) as f64);
        assert_eq!(rep.allocated_words, 2 * (3 * n + 40 * p));
        println!(
            "N={n} P={p}: total={} first_output={} slack={}",
            rep.total_cycles, rep.first_output_cycle, rep.slack
        );
    }
}

#[test]
fn read_schedule() {
    let c = LiftingCoeffs::float_exact();
    let rep = simulate_pair_opts(&random_pair(16, 16, 2), 2, &c, true).unwrap();
    let e = &rep.events;
    let r0 = e[0].read.unwrap();
    assert_eq!((r0.row, r0.first_col, r0.last_col), (0, 0, 4));
    let r1 = e[1].read.unwrap();
    assert_eq!((r1.row, r1.first_col, r1.last_col), (1, 0, 4));
    let r16 = e[16].read.unwrap();
    assert_eq!((r16.strip, r16.row, r16.first_col, r16.last_col), (1, 0, 4, 8));
    // the flush strip reads no pixels
    assert!(e[4 * 16].read.is_none());
    assert_eq!(e.iter().map(|x| x.outputs).sum::<usize>(), 2 * 16 * 16);
    assert!(e.iter().all(|x| x.outputs <= 8 * 2));
}

#[test]
fn rejects_unsupported_parallelism() {
    let c = LiftingCoeffs::float_exact();
    assert!(simulate_pair(&random_pair(24, 24, 0), 3, &c).is_err());
    assert!(simulate_pair(&random_pair(20, 20, 0), 4, &c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn equivalence_over_random_geometry(seed in any::<u64>(), p in prop::sample::select(vec![2usize, 4]), sw in 3usize..6, h in 5usize..12) {
        let (w, h) = (2 * p * sw, 2 * h * 2);
        prop_assume!(h >= 2 * (2 * p + 1));
        let c = LiftingCoeffs::fixed_adopted();
        let pair = random_pair(w, h, seed);
        let rep = simulate_pair(&pair, p, &c).unwrap();
        prop_assert_eq!(first_mismatch(&rep.output, &forward_3d(&pair, 1, &c).unwrap()), None);
        prop_assert_eq!(rep.latency_3d, 12);
    }
}
