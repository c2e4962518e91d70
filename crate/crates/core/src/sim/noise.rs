use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::sim::state::check_qubit_count;

/// Exclusive upper bound on readout confusion probabilities.
pub const MAX_READOUT_EPS: f64 = 0.5;

/// Inclusive upper bound on per-gate depolarizing probabilities.
pub const MAX_GATE_ERROR: f64 = 0.2;

/// Per-qubit readout confusion: the chance of reporting the wrong bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutConfusion {
    /// P(read 1 | true 0)
    pub eps01: f64,
    /// P(read 0 | true 1)
    pub eps10: f64,
}

impl ReadoutConfusion {
    pub fn new(eps01: f64, eps10: f64) -> Result<Self> {
        for (name, value) in [("eps01", eps01), ("eps10", eps10)] {
            if !(0.0..MAX_READOUT_EPS).contains(&value) {
                return Err(Error::invalid(format!(
                    "{name} must be in [0, {MAX_READOUT_EPS}), got {value}"
                )));
            }
        }
        Ok(Self { eps01, eps10 })
    }

    /// Both confusion probabilities zero.
    pub fn ideal() -> Self {
        Self {
            eps01: 0.0,
            eps10: 0.0,
        }
    }
}

#[derive(Deserialize)]
struct DeviceNoiseParamsRaw {
    readout: Vec<ReadoutConfusion>,
    p1: f64,
    p2: f64,
    device_seed: u64,
}

/// Noise parameterization of one transmitting device.
///
/// The parameters are the physical source of a device's fingerprint: two
/// devices with identical fields are statistically indistinguishable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DeviceNoiseParamsRaw")]
pub struct DeviceNoiseParams {
    readout: Vec<ReadoutConfusion>,
    p1: f64,
    p2: f64,
    device_seed: u64,
}

impl TryFrom<DeviceNoiseParamsRaw> for DeviceNoiseParams {
    type Error = Error;

    fn try_from(raw: DeviceNoiseParamsRaw) -> Result<Self> {
        DeviceNoiseParams::new(raw.readout, raw.p1, raw.p2, raw.device_seed)
    }
}

impl DeviceNoiseParams {
    /// Build from explicit per-qubit confusion pairs and gate error rates.
    pub fn new(
        readout: Vec<ReadoutConfusion>,
        p1: f64,
        p2: f64,
        device_seed: u64,
    ) -> Result<Self> {
        check_qubit_count(readout.len())?;
        for (qubit, pair) in readout.iter().enumerate() {
            ReadoutConfusion::new(pair.eps01, pair.eps10)
                .map_err(|e| Error::invalid(format!("qubit {qubit}: {e}")))?;
        }
        for (name, value) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=MAX_GATE_ERROR).contains(&value) {
                return Err(Error::invalid(format!(
                    "{name} must be in [0, {MAX_GATE_ERROR}], got {value}"
                )));
            }
        }
        Ok(Self {
            readout,
            p1,
            p2,
            device_seed,
        })
    }

    /// A device with every noise parameter zero.
    pub fn noiseless(n: usize) -> Result<Self> {
        Self::new(vec![ReadoutConfusion::ideal(); n], 0.0, 0.0, 0)
    }

    /// Draw a device's parameters from `ranges`, keyed by `device_seed`.
    ///
    /// The draw is frozen: the same seed and ranges always realize the same
    /// device.
    pub fn sample(n: usize, ranges: &DeviceParamRanges, device_seed: u64) -> Result<Self> {
        check_qubit_count(n)?;
        ranges.validate()?;
        let mut rng = rng::stream(device_seed, 0);
        let mut draw = |range: (f64, f64)| -> f64 {
            if range.0 == range.1 {
                range.0
            } else {
                rng.random_range(range.0..range.1)
            }
        };
        let readout = (0..n)
            .map(|_| ReadoutConfusion {
                eps01: draw(ranges.eps01),
                eps10: draw(ranges.eps10),
            })
            .collect();
        let p1 = draw(ranges.p1);
        let p2 = draw(ranges.p2);
        Self::new(readout, p1, p2, device_seed)
    }

    /// Copy of this device with every readout confusion probability shifted
    /// by exactly `delta` in magnitude.
    ///
    /// Shift directions form a checkerboard: they alternate across qubits and
    /// are opposite for the two channels of each qubit. A shift that would
    /// leave the valid range flips direction, so each probability always
    /// differs from the original by `delta`. Gate error rates and the seed
    /// are kept.
    pub fn with_readout_offset(&self, delta: f64) -> Result<Self> {
        if delta < 0.0 {
            return Err(Error::invalid(format!(
                "offset must be nonnegative, got {delta}"
            )));
        }
        let shifted = |eps: f64, prefer_down: bool| -> Result<f64> {
            let down = eps - delta;
            let up = eps + delta;
            if prefer_down && down >= 0.0 {
                Ok(down)
            } else if up < MAX_READOUT_EPS {
                Ok(up)
            } else if down >= 0.0 {
                Ok(down)
            } else {
                Err(Error::invalid(format!(
                    "offset {delta} does not fit around eps {eps}"
                )))
            }
        };
        let readout = self
            .readout
            .iter()
            .enumerate()
            .map(|(qubit, pair)| {
                let down01 = qubit % 2 == 1;
                Ok(ReadoutConfusion {
                    eps01: shifted(pair.eps01, down01)?,
                    eps10: shifted(pair.eps10, !down01)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(readout, self.p1, self.p2, self.device_seed)
    }

    pub fn qubit_count(&self) -> usize {
        self.readout.len()
    }

    pub fn readout(&self) -> &[ReadoutConfusion] {
        &self.readout
    }

    /// Depolarizing probability after each single-qubit gate.
    pub fn p1(&self) -> f64 {
        self.p1
    }

    /// Depolarizing probability after each two-qubit gate.
    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn device_seed(&self) -> u64 {
        self.device_seed
    }

    /// True when every noise parameter is zero.
    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0
            && self.p2 == 0.0
            && self
                .readout
                .iter()
                .all(|r| r.eps01 == 0.0 && r.eps10 == 0.0)
    }
}

/// Ranges device parameters are drawn from when realizing a constellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParamRanges {
    pub eps01: (f64, f64),
    pub eps10: (f64, f64),
    pub p1: (f64, f64),
    pub p2: (f64, f64),
}

impl Default for DeviceParamRanges {
    fn default() -> Self {
        Self {
            eps01: (0.01, 0.12),
            eps10: (0.01, 0.12),
            p1: (0.0005, 0.004),
            p2: (0.002, 0.02),
        }
    }
}

impl DeviceParamRanges {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, range: (f64, f64), max: f64, inclusive: bool| -> Result<()> {
            let (lo, hi) = range;
            let hi_ok = if inclusive { hi <= max } else { hi < max };
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi && hi_ok) {
                return Err(Error::config(
                    format!("device_ranges.{name}"),
                    format!("range ({lo}, {hi}) must satisfy 0 ≤ lo ≤ hi {} {max}",
                        if inclusive { "≤" } else { "<" }),
                ));
            }
            Ok(())
        };
        check("eps01", self.eps01, MAX_READOUT_EPS, false)?;
        check("eps10", self.eps10, MAX_READOUT_EPS, false)?;
        check("p1", self.p1, MAX_GATE_ERROR, true)?;
        check("p2", self.p2, MAX_GATE_ERROR, true)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readout_confusion_range_checked() {
        assert!(ReadoutConfusion::new(0.0, 0.499).is_ok());
        assert!(ReadoutConfusion::new(0.5, 0.0).is_err());
        assert!(ReadoutConfusion::new(-0.01, 0.0).is_err());
    }

    #[test]
    fn device_params_validate_rates() {
        let readout = vec![ReadoutConfusion::ideal(); 2];
        assert!(DeviceNoiseParams::new(readout.clone(), 0.2, 0.0, 1).is_ok());
        assert!(DeviceNoiseParams::new(readout.clone(), 0.21, 0.0, 1).is_err());
        assert!(DeviceNoiseParams::new(readout, 0.0, -0.1, 1).is_err());
        assert!(DeviceNoiseParams::new(vec![], 0.0, 0.0, 1).is_err());
    }

    #[test]
    fn sample_is_deterministic_and_in_range() {
        let ranges = DeviceParamRanges::default();
        let a = DeviceNoiseParams::sample(5, &ranges, 77).unwrap();
        let b = DeviceNoiseParams::sample(5, &ranges, 77).unwrap();
        let c = DeviceNoiseParams::sample(5, &ranges, 78).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for pair in a.readout() {
            assert!(pair.eps01 >= ranges.eps01.0 && pair.eps01 < ranges.eps01.1);
            assert!(pair.eps10 >= ranges.eps10.0 && pair.eps10 < ranges.eps10.1);
        }
        assert!(a.p1() >= ranges.p1.0 && a.p1() <= ranges.p1.1);
        assert!(a.p2() >= ranges.p2.0 && a.p2() <= ranges.p2.1);
    }

    #[test]
    fn readout_offset_shifts_every_qubit_by_delta() {
        let ranges = DeviceParamRanges::default();
        let device = DeviceNoiseParams::sample(5, &ranges, 3).unwrap();
        let shifted = device.with_readout_offset(0.05).unwrap();
        for (orig, new) in device.readout().iter().zip(shifted.readout()) {
            assert!((orig.eps01 - new.eps01).abs() - 0.05 < 1e-12);
            assert!(((orig.eps01 - new.eps01).abs() - 0.05).abs() < 1e-12);
            assert!(((orig.eps10 - new.eps10).abs() - 0.05).abs() < 1e-12);
        }
        assert_eq!(device.p1(), shifted.p1());
        assert_eq!(device.p2(), shifted.p2());
    }

    #[test]
    fn serde_round_trip_revalidates() {
        let device = DeviceNoiseParams::noiseless(2).unwrap();
        let json = serde_json::to_string(&device).unwrap();
        let back: DeviceNoiseParams = serde_json::from_str(&json).unwrap();
        assert_eq!(device, back);

        let bad = r#"{"readout":[{"eps01":0.9,"eps10":0.0}],"p1":0.0,"p2":0.0,"device_seed":0}"#;
        assert!(serde_json::from_str::<DeviceNoiseParams>(bad).is_err());
    }
}
