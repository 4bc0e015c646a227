use std::collections::BTreeMap;

use proptest::prelude::*;
use vfr_ladder_core::ladder::validate_completeness;
use vfr_ladder_core::plan::{
    average_energy, merge_energy, EnergyEntry, EnergyLog, JobKey, RunPolicy, Stage,
};
use vfr_ladder_core::report::build_report;
use vfr_ladder_core::select::{sweep, Selector};
use vfr_ladder_core::synth::{generate, SyntheticModel};
use vfr_ladder_core::{default_ladder, CellKey};

#[test]
fn zero_noise_model_is_monotone_on_the_whole_grid() {
    let ladder = default_ladder();
    let model = SyntheticModel::reference(&ladder);
    let t = generate(&model, &ladder, 2).unwrap();
    assert!(validate_completeness(&t).is_empty());
    let fr = ladder.framerates().as_slice();
    for seq in t.sequences() {
        for (i, &rung) in ladder.rungs().iter().enumerate() {
            let at = |r, f| t.get(&CellKey::new(seq.as_str(), r, f)).unwrap().clone();
            for w in fr.windows(2) {
                let (a, b) = (at(rung, w[0]), at(rung, w[1]));
                assert!(a.vmaf <= b.vmaf);
                assert!(a.decode_energy_j < b.decode_energy_j);
            }
            if i > 0 {
                let prev = ladder.rungs()[i - 1];
                for &f in fr {
                    assert!(at(prev, f).vmaf <= at(rung, f).vmaf);
                    if prev.height_px < rung.height_px {
                        assert!(at(prev, f).decode_energy_j < at(rung, f).decode_energy_j);
                    }
                }
            }
        }
    }
}

#[test]
fn noisy_tables_still_validate() {
    let ladder = default_ladder();
    let mut model = SyntheticModel::reference(&ladder);
    model.noise_amplitude = 5.0;
    model.seed = 7;
    let t = generate(&model, &ladder, 4).unwrap();
    assert_eq!(t.len(), 4 * 12 * 4);
    assert!(validate_completeness(&t).is_empty());
    assert!(t.records().all(|r| (0.0..=100.0).contains(&r.vmaf)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn missing_count_matches_grid_arithmetic(n_seq in 1usize..4, deletions in proptest::collection::vec(0usize..1000, 0..30)) {
        let ladder = default_ladder();
        let mut t = generate(&SyntheticModel::reference(&ladder), &ladder, n_seq).unwrap();
        let keys: Vec<CellKey> = t.records().map(|r| r.key()).collect();
        // keep one cell of the first sequence so the sequence set is unchanged
        let keep: Vec<CellKey> = t.sequences().iter().map(|s| CellKey::new(s.as_str(), ladder.rungs()[0], 24)).collect();
        for d in deletions {
            let k = &keys[d % keys.len()];
            if !keep.contains(k) {
                t.remove(k);
            }
        }
        let grid = n_seq * ladder.rungs().len() * ladder.framerates().len();
        prop_assert_eq!(validate_completeness(&t).len(), grid - t.len());
    }

    #[test]
    fn averaging_ignores_entry_order(runs in proptest::collection::vec(0.0f64..100.0, 3), perm in 0usize..6) {
        let key = JobKey { cell: CellKey::new("s", default_ladder().rungs()[0], 24), stage: Stage::Decode };
        let order = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
        let entries = |ord: [usize; 3]| EnergyLog {
            entries: ord.iter().map(|&i| EnergyEntry { key: key.clone(), run_index: i as u32 + 1, energy_j: runs[i] }).collect(),
        };
        let a = average_energy(&entries([0, 1, 2]), RunPolicy::ExactlyThree).unwrap();
        let b = average_energy(&entries(order), RunPolicy::ExactlyThree).unwrap();
        prop_assert_eq!(a[&key].to_bits(), b[&key].to_bits());
    }
}

fn decode_key(cell: CellKey) -> JobKey {
    JobKey {
        cell,
        stage: Stage::Decode,
    }
}

#[test]
fn merge_energy_cases() {
    let ladder = default_ladder();
    let t = generate(&SyntheticModel::reference(&ladder), &ladder, 2).unwrap();
    assert_eq!(merge_energy(&t, &BTreeMap::new()).unwrap(), t);

    let cell = CellKey::new("seq0001", ladder.rungs()[4], 48);
    let merged = merge_energy(&t, &BTreeMap::from([(decode_key(cell.clone()), 123.5)])).unwrap();
    let differing: Vec<_> = t
        .records()
        .zip(merged.records())
        .filter(|(a, b)| a != b)
        .collect();
    assert_eq!(differing.len(), 1);
    assert_eq!(merged.get(&cell).unwrap().decode_energy_j, 123.5);

    let outside = CellKey::new("seq0009", ladder.rungs()[0], 24);
    assert!(merge_energy(&t, &BTreeMap::from([(decode_key(outside), 1.0)])).is_err());
    let encode = JobKey {
        cell,
        stage: Stage::Encode,
    };
    assert!(merge_energy(&t, &BTreeMap::from([(encode, 1.0)])).is_err());
}

#[test]
fn full_log_regenerates_the_table() {
    // triple-run log whose mean equals the modelled energy; merging it into a
    // zeroed-out table reproduces the original
    let ladder = default_ladder();
    let original = generate(&SyntheticModel::reference(&ladder), &ladder, 2).unwrap();
    let mut log = EnergyLog::default();
    for r in original.records() {
        for (run, factor) in [(1, 0.5), (2, 1.0), (3, 1.5)] {
            log.entries.push(EnergyEntry {
                key: decode_key(r.key()),
                run_index: run,
                energy_j: r.decode_energy_j * factor,
            });
        }
    }
    let zeroed = merge_energy(
        &original,
        &original
            .records()
            .map(|r| (decode_key(r.key()), 0.0))
            .collect(),
    )
    .unwrap();
    let averaged = average_energy(&log, RunPolicy::ExactlyThree).unwrap();
    let merged = merge_energy(&zeroed, &averaged).unwrap();
    assert!(validate_completeness(&merged).is_empty());
    for (a, b) in original.records().zip(merged.records()) {
        assert!((a.decode_energy_j - b.decode_energy_j).abs() <= 1e-12 * a.decode_energy_j);
        assert_eq!(a.vmaf, b.vmaf);
    }
}

#[test]
fn sweep_on_synthetic_table() {
    let ladder = default_ladder();
    let t = generate(&SyntheticModel::reference(&ladder), &ladder, 1).unwrap();
    assert_eq!(
        sweep(&t, Selector::Decodra, ladder.thresholds())
            .unwrap()
            .len(),
        48
    );
    let zero = sweep(&t, Selector::Decodra, &[0.0]).unwrap();
    let hq = sweep(&t, Selector::Hq, &[]).unwrap();
    assert!(zero
        .iter()
        .zip(&hq)
        .all(|(a, b)| a.framerate_fps == 60 && b.framerate_fps == 60));
}

#[test]
fn report_trends_on_zero_noise_fixture() {
    let ladder = default_ladder();
    let t = generate(&SyntheticModel::reference(&ladder), &ladder, 3).unwrap();
    let rep = build_report(&t).unwrap();
    assert_eq!(rep.rows.len(), 1 + ladder.thresholds().len());
    assert_eq!(rep.rows[0].method, Selector::Hq);
    let dec = &rep.rows[1..];
    assert!(dec.windows(2).all(|w| w[0].bd_vmaf >= w[1].bd_vmaf));
    assert!(dec
        .windows(2)
        .all(|w| w[0].delta_e_dec_pct >= w[1].delta_e_dec_pct));
    assert!(dec
        .iter()
        .all(|r| r.delta_e_dec_pct < 0.0 && r.bd_vmaf <= 0.0));
}
