use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::params::Geometry;
use crate::error::{Error, Result};

/// Two-harmonic periodic rail roughness, seen by every wheelset with its own
/// transport delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackExcitation {
    /// First-harmonic amplitude [m].
    pub a1: f64,
    /// Second-harmonic amplitude [m].
    pub a2: f64,
    /// Rail link length [m].
    pub l_rail: f64,
    /// Vehicle speed [m/s].
    pub v: f64,
}

impl Default for TrackExcitation {
    fn default() -> Self {
        Self {
            a1: 0.005,
            a2: 0.002,
            l_rail: 25.0,
            v: 20.0,
        }
    }
}

/// Rail displacement and its rate under each of the four wheelsets, ordered
/// front-trolley-front, front-trolley-rear, rear-trolley-front,
/// rear-trolley-rear.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExcitationSample {
    pub eta: [f64; 4],
    pub eta_dot: [f64; 4],
}

impl TrackExcitation {
    pub fn validate(&self) -> Result<()> {
        for (field, value) in [("l_rail", self.l_rail), ("v", self.v)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::parameter(field, format!("must be finite and > 0, got {value}")));
            }
        }
        for (field, value) in [("a1", self.a1), ("a2", self.a2)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::parameter(field, format!("must be finite and >= 0, got {value}")));
            }
        }
        Ok(())
    }

    /// Angular frequency of the first harmonic, 2π·V/L.
    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * self.v / self.l_rail
    }

    /// Arrival delays of the four wheelsets relative to the leading one.
    pub fn delays(&self, geom: Geometry) -> [f64; 4] {
        let v = self.v;
        [
            0.0,
            2.0 * geom.a_t / v,
            2.0 * geom.a_k / v,
            (2.0 * geom.a_k + 2.0 * geom.a_t) / v,
        ]
    }

    /// Excitation at time `t`. A wheelset that has not yet reached the rail
    /// profile (`t < delay`) sees zero displacement and zero rate.
    pub fn sample(&self, t: f64, geom: Geometry) -> Result<ExcitationSample> {
        self.validate()?;
        if !t.is_finite() || t < 0.0 {
            return Err(Error::parameter("t", format!("time must be finite and >= 0, got {t}")));
        }
        Ok(self.sample_unchecked(t, geom))
    }

    /// Same as [`TrackExcitation::sample`] without re-validating; used in the
    /// integration loops after a single upfront check.
    pub(crate) fn sample_unchecked(&self, t: f64, geom: Geometry) -> ExcitationSample {
        let w = self.angular_frequency();
        let mut out = ExcitationSample::default();
        for (j, d) in self.delays(geom).into_iter().enumerate() {
            let local = t - d;
            if local < 0.0 {
                continue;
            }
            let (s1, c1) = (w * local).sin_cos();
            let (s2, c2) = (2.0 * w * local).sin_cos();
            out.eta[j] = self.a1 * s1 + self.a2 * s2;
            out.eta_dot[j] = self.a1 * w * c1 + 2.0 * self.a2 * w * c2;
        }
        out
    }
}

/// Convenience wrapper around [`TrackExcitation::sample`].
pub fn excitation(t: f64, track: &TrackExcitation, geom: Geometry) -> Result<ExcitationSample> {
    track.sample(t, geom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geom() -> Geometry {
        Geometry { a_k: 3.725, a_t: 1.25 }
    }

    #[test]
    fn zero_at_start() {
        let s = excitation(0.0, &TrackExcitation::default(), geom()).unwrap();
        assert_eq!(s.eta, [0.0; 4]);
    }

    #[test]
    fn quarter_period_peak_of_first_wheelset() {
        let track = TrackExcitation::default();
        let t = (PI / 2.0) / track.angular_frequency();
        let s = excitation(t, &track, geom()).unwrap();
        assert!((s.eta[0] - 0.005).abs() < 1e-15, "{}", s.eta[0]);
    }

    #[test]
    fn second_wheelset_is_delayed_copy() {
        let track = TrackExcitation::default();
        let g = geom();
        let d = 2.0 * g.a_t / track.v;
        let late = excitation(d + 0.3, &track, g).unwrap();
        let early = excitation(0.3, &track, g).unwrap();
        assert!((late.eta[1] - early.eta[0]).abs() < 1e-15);
        assert!((late.eta_dot[1] - early.eta_dot[0]).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_track_and_time() {
        let g = geom();
        let bad = TrackExcitation {
            l_rail: 0.0,
            ..Default::default()
        };
        assert!(excitation(1.0, &bad, g).is_err());
        assert!(excitation(-1.0, &TrackExcitation::default(), g).is_err());
        let neg = TrackExcitation {
            a2: -0.1,
            ..Default::default()
        };
        assert!(matches!(excitation(1.0, &neg, g), Err(Error::Parameter { field, .. }) if field == "a2"));
    }

    proptest! {
        #[test]
        fn delayed_wheelsets_replay_the_leader(t in 0.0f64..20.0, j in 1usize..4) {
            let track = TrackExcitation::default();
            let g = geom();
            let d = track.delays(g)[j];
            let late = excitation(t + d, &track, g).unwrap();
            let lead = excitation(t, &track, g).unwrap();
            // (t + d) - d need not round back to t; the residual is a few ulps.
            prop_assert!((late.eta[j] - lead.eta[0]).abs() <= 1e-12);
        }

        #[test]
        fn rate_matches_central_difference(t in 0.6f64..20.0) {
            let track = TrackExcitation::default();
            let g = geom();
            let h = 1e-6;
            let plus = excitation(t + h, &track, g).unwrap();
            let minus = excitation(t - h, &track, g).unwrap();
            let mid = excitation(t, &track, g).unwrap();
            for j in 0..4 {
                let fd = (plus.eta[j] - minus.eta[j]) / (2.0 * h);
                prop_assert!((fd - mid.eta_dot[j]).abs() <= 1e-5, "wheelset {j}: {fd} vs {}", mid.eta_dot[j]);
            }
        }
    }
}
