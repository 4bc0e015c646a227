//! Seeded synthetic measurement tables with known structure.
//!
//! Noiseless quality of rung `(b, r)` at framerate `f` is
//!
//! ```text
//! ceiling(b, r) - framerate_penalty * log2(60 / f) * (b_min / b)^penalty_bitrate_decay
//! ```
//!
//! clamped to `[0, 100]`, where `b_min` is the lowest ladder bitrate. Decoding
//! energy is `energy_per_fps * f * (r / 360)^energy_resolution_exponent`.
//! Uniform noise in `[-noise_amplitude, noise_amplitude]` is added to quality
//! only. PSNR and SSIM are fixed affine maps of VMAF.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ladder::{Ladder, MeasurementRecord, MeasurementTable, Representation};

/// Quality ceiling of one rung.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RungCeiling {
    /// Rung bitrate.
    pub bitrate_kbps: u32,
    /// Rung height.
    pub height_px: u32,
    /// VMAF at the reference framerate.
    pub vmaf: f64,
}

/// Parameters of the synthetic quality / energy model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticModel {
    /// RNG seed for quality noise.
    pub seed: u64,
    /// One ceiling per ladder rung, non-decreasing in bitrate.
    pub quality_ceiling: Vec<RungCeiling>,
    /// VMAF points lost per halving of framerate at the lowest rung.
    pub framerate_penalty: f64,
    /// Exponent of the `(b_min / b)` factor shrinking the penalty at high bitrates.
    pub penalty_bitrate_decay: f64,
    /// Decoding joules per frame-per-second at 360 px.
    pub energy_per_fps: f64,
    /// Exponent on `r / 360` in the energy model.
    pub energy_resolution_exponent: f64,
    /// Half-width of the uniform quality noise.
    pub noise_amplitude: f64,
    /// If set, encode energy is this multiple of decode energy; otherwise the
    /// column is left empty.
    #[cfg_attr(feature = "serde", serde(default))]
    pub encode_energy_scale: Option<f64>,
}

/// Framerate at which the noiseless model reaches its ceiling.
pub const REFERENCE_FRAMERATE_FPS: f64 = 60.0;

/// Ceilings used by [`SyntheticModel::reference`], one per rung of the
/// default ladder.
const REFERENCE_CEILINGS: [f64; 12] = [
    30.0, 42.0, 52.0, 59.0, 68.0, 75.0, 80.0, 85.0, 88.5, 92.0, 95.0, 97.0,
];

impl SyntheticModel {
    /// A noiseless model over `ladder` with ceilings spread linearly from 30
    /// to 97 VMAF (or the fixed twelve-rung profile when the ladder has
    /// twelve rungs), penalty 8 points per halving decaying with exponent
    /// 0.5, and energy linear in framerate and resolution.
    pub fn reference(ladder: &Ladder) -> Self {
        let rungs = ladder.rungs();
        let n = rungs.len();
        let quality_ceiling = rungs
            .iter()
            .enumerate()
            .map(|(i, r)| RungCeiling {
                bitrate_kbps: r.bitrate_kbps,
                height_px: r.height_px,
                vmaf: if n == REFERENCE_CEILINGS.len() {
                    REFERENCE_CEILINGS[i]
                } else if n == 1 {
                    97.0
                } else {
                    30.0 + 67.0 * i as f64 / (n - 1) as f64
                },
            })
            .collect();
        Self {
            seed: 0,
            quality_ceiling,
            framerate_penalty: 8.0,
            penalty_bitrate_decay: 0.5,
            energy_per_fps: 0.1,
            energy_resolution_exponent: 1.0,
            noise_amplitude: 0.0,
            encode_energy_scale: Some(4.0),
        }
    }

    /// [`SyntheticModel::reference`] with no framerate penalty: quality is
    /// identical across framerates.
    pub fn flat(ladder: &Ladder) -> Self {
        Self {
            framerate_penalty: 0.0,
            ..Self::reference(ladder)
        }
    }

    fn validate(&self, ladder: &Ladder) -> Result<()> {
        let scalars = [
            ("framerate_penalty", self.framerate_penalty, false),
            ("penalty_bitrate_decay", self.penalty_bitrate_decay, false),
            ("energy_per_fps", self.energy_per_fps, true),
            (
                "energy_resolution_exponent",
                self.energy_resolution_exponent,
                false,
            ),
            ("noise_amplitude", self.noise_amplitude, false),
        ];
        for (name, v, strict) in scalars {
            let ok = v.is_finite() && if strict { v > 0.0 } else { v >= 0.0 };
            if !ok {
                return Err(Error::InvalidModel(format!("{name} = {v}")));
            }
        }
        if let Some(s) = self.encode_energy_scale {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::InvalidModel(format!("encode_energy_scale = {s}")));
            }
        }
        if self.quality_ceiling.len() != ladder.rungs().len() {
            return Err(Error::InvalidModel(format!(
                "{} ceilings for {} rungs",
                self.quality_ceiling.len(),
                ladder.rungs().len()
            )));
        }
        let mut prev = f64::NEG_INFINITY;
        for rung in ladder.rungs() {
            let v = self
                .ceiling(*rung)
                .ok_or_else(|| Error::InvalidModel(format!("no ceiling for rung {rung}")))?;
            if !(0.0..=100.0).contains(&v) {
                return Err(Error::InvalidModel(format!("ceiling {v} for rung {rung}")));
            }
            if v < prev {
                return Err(Error::InvalidModel(
                    "ceilings must be non-decreasing in bitrate".into(),
                ));
            }
            prev = v;
        }
        Ok(())
    }

    fn ceiling(&self, rung: Representation) -> Option<f64> {
        self.quality_ceiling
            .iter()
            .find(|c| c.bitrate_kbps == rung.bitrate_kbps && c.height_px == rung.height_px)
            .map(|c| c.vmaf)
    }

    /// Noiseless, unclamped quality of one rendition.
    pub fn clean_quality(&self, ladder: &Ladder, rung: Representation, framerate_fps: u32) -> f64 {
        let b_min = f64::from(ladder.rungs()[0].bitrate_kbps);
        let decay = libm::pow(
            b_min / f64::from(rung.bitrate_kbps),
            self.penalty_bitrate_decay,
        );
        let halvings = libm::log2(REFERENCE_FRAMERATE_FPS / f64::from(framerate_fps));
        self.ceiling(rung).unwrap_or(0.0) - self.framerate_penalty * halvings * decay
    }

    /// Decoding energy of one rendition.
    pub fn decode_energy(&self, rung: Representation, framerate_fps: u32) -> f64 {
        self.energy_per_fps
            * f64::from(framerate_fps)
            * libm::pow(
                f64::from(rung.height_px) / 360.0,
                self.energy_resolution_exponent,
            )
    }
}

/// Identifier of the `index`-th synthetic sequence.
pub fn sequence_name(index: usize) -> alloc::string::String {
    format!("seq{index:04}")
}

/// Generates a complete table of `n_sequences` sequences.
pub fn generate(
    model: &SyntheticModel,
    ladder: &Ladder,
    n_sequences: usize,
) -> Result<MeasurementTable> {
    if n_sequences == 0 {
        return Err(Error::InvalidModel("n_sequences must be positive".into()));
    }
    model.validate(ladder)?;
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let mut table = MeasurementTable::new(ladder.clone());
    for s in 0..n_sequences {
        let sequence_id = sequence_name(s);
        for &rung in ladder.rungs() {
            for &fps in ladder.framerates().as_slice() {
                let noise = if model.noise_amplitude > 0.0 {
                    rng.random_range(-model.noise_amplitude..=model.noise_amplitude)
                } else {
                    0.0
                };
                let vmaf = (model.clean_quality(ladder, rung, fps) + noise).clamp(0.0, 100.0);
                let decode_energy_j = model.decode_energy(rung, fps);
                table.insert(MeasurementRecord {
                    sequence_id: sequence_id.clone(),
                    bitrate_kbps: rung.bitrate_kbps,
                    height_px: rung.height_px,
                    framerate_fps: fps,
                    vmaf,
                    psnr_db: 20.0 + 0.25 * vmaf,
                    ssim: Some(0.6 + 0.004 * vmaf),
                    decode_energy_j,
                    encode_energy_j: model.encode_energy_scale.map(|k| k * decode_energy_j),
                })?;
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{default_ladder, validate_completeness};
    use crate::select::{sweep, Selector};

    #[test]
    fn flat_model_picks_lowest_framerate() {
        let ladder = default_ladder();
        let t = generate(&SyntheticModel::flat(&ladder), &ladder, 2).unwrap();
        assert!(validate_completeness(&t).is_empty());
        for v in [0.0, 1.0, 6.0] {
            let res = sweep(&t, Selector::Decodra, &[v]).unwrap();
            assert!(res.iter().all(|r| r.framerate_fps == 24));
        }
    }

    #[test]
    fn selection_matches_closed_form() {
        let ladder = default_ladder();
        let model = SyntheticModel::reference(&ladder);
        let t = generate(&model, &ladder, 1).unwrap();
        let res = sweep(&t, Selector::Decodra, ladder.thresholds()).unwrap();
        for r in &res {
            // hand evaluation: smallest f whose closed-form loss versus 60 fps
            // is within the threshold
            let expected = [24u32, 30, 48, 60]
                .into_iter()
                .find(|&f| {
                    let loss = 8.0
                        * (60.0 / f as f64).log2()
                        * (145.0 / r.rung.bitrate_kbps as f64).sqrt();
                    loss <= r.threshold
                })
                .unwrap();
            assert_eq!(r.framerate_fps, expected, "{r:?}");
        }
        // a decaying penalty means higher rungs never need a higher framerate
        for v in ladder.thresholds() {
            let f: Vec<u32> = res
                .iter()
                .filter(|r| r.threshold == *v)
                .map(|r| r.framerate_fps)
                .collect();
            assert!(f.windows(2).all(|w| w[0] >= w[1]), "{f:?}");
            assert!(f[0] > f[11]);
        }
    }

    #[test]
    fn seed_determinism() {
        let ladder = default_ladder();
        let mut m = SyntheticModel::reference(&ladder);
        m.noise_amplitude = 2.0;
        m.seed = 42;
        let a = generate(&m, &ladder, 3).unwrap();
        let b = generate(&m, &ladder, 3).unwrap();
        assert_eq!(a, b);
        m.seed = 43;
        assert_ne!(a, generate(&m, &ladder, 3).unwrap());
    }

    #[test]
    fn model_validation() {
        let ladder = default_ladder();
        let base = SyntheticModel::reference(&ladder);
        let mut m = base.clone();
        m.energy_per_fps = 0.0;
        assert!(generate(&m, &ladder, 1).is_err());
        let mut m = base.clone();
        m.quality_ceiling.swap(0, 1);
        m.quality_ceiling[0].bitrate_kbps = 999;
        assert!(generate(&m, &ladder, 1).is_err());
        let mut m = base.clone();
        m.quality_ceiling[5].vmaf = 10.0;
        assert!(generate(&m, &ladder, 1).is_err());
        let mut m = base.clone();
        m.noise_amplitude = -1.0;
        assert!(generate(&m, &ladder, 1).is_err());
        assert!(generate(&base, &ladder, 0).is_err());
    }
}
