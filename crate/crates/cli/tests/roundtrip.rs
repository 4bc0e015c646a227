use proptest::prelude::*;
use vfr_ladder::formats::{self, MeasurementFormat};
use vfr_ladder_core::default_ladder;
use vfr_ladder_core::ladder::{CellKey, MeasurementRecord, MeasurementTable};

/// vmaf, psnr, ssim, decode and encode energy of one cell.
type Cell = (f64, f64, Option<f64>, f64, Option<f64>);

fn table(values: &[Cell]) -> MeasurementTable {
    let ladder = default_ladder();
    let mut t = MeasurementTable::new(ladder.clone());
    let cells = ladder.rungs().iter().flat_map(|&r| {
        ladder
            .framerates()
            .as_slice()
            .iter()
            .map(move |&f| CellKey::new("clip/a b", r, f))
    });
    for (key, &(vmaf, psnr_db, ssim, dec, enc)) in cells.zip(values) {
        t.insert(MeasurementRecord {
            sequence_id: key.sequence_id.clone(),
            bitrate_kbps: key.bitrate_kbps,
            height_px: key.height_px,
            framerate_fps: key.framerate_fps,
            vmaf,
            psnr_db,
            ssim,
            decode_energy_j: dec,
            encode_energy_j: enc,
        })
        .unwrap();
    }
    t
}

proptest! {
    #[test]
    fn measurements_round_trip(values in proptest::collection::vec(
        (0.0f64..=100.0, 1e-3f64..80.0, proptest::option::of(0.0f64..=1.0), 0.0f64..1e6, proptest::option::of(0.0f64..1e9)),
        1..48,
    )) {
        let t = table(&values);
        for format in [MeasurementFormat::Csv, MeasurementFormat::Json] {
            let mut buf = Vec::new();
            match format {
                MeasurementFormat::Csv => formats::write_measurements_csv(&t, &mut buf).unwrap(),
                MeasurementFormat::Json => formats::write_measurements_json(&t, &mut buf).unwrap(),
            }
            let back = formats::parse_measurements(buf.as_slice(), format, t.ladder()).unwrap();
            prop_assert_eq!(&back, &t);
        }
    }
}
