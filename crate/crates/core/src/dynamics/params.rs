use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inertial, elastic and geometric data of a two-tier suspension vehicle
/// (carriage body on two trolleys, each trolley on two wheelsets).
///
/// All values are SI: kg, kg·m², m, N/m, N·s/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    /// Carriage mass.
    pub m_k: f64,
    /// Carriage pitch inertia.
    pub j_k: f64,
    /// Trolley mass.
    pub m_t: f64,
    /// Trolley pitch inertia.
    pub j_t: f64,
    /// Half distance between the trolley pivots.
    pub a_k: f64,
    /// Half trolley wheelbase.
    pub a_t: f64,
    /// Second-tier (carriage) stiffness, per side.
    pub c_k: f64,
    /// Second-tier damping.
    pub b_k: f64,
    /// First-tier (trolley) stiffness, per wheelset.
    pub c_t: f64,
    /// First-tier damping.
    pub b_t: f64,
}

impl Default for VehicleParams {
    /// Six-axle locomotive data: 57 t body, 9 t trolleys,
    /// c_t = 3040 kN/m, b_t = 30 kN·s/m, c_k = 2660 kN/m, b_k = 100 kN·s/m.
    fn default() -> Self {
        Self {
            m_k: 57_000.0,
            // 70 in units of 10^4 kg·m² (radius of gyration ~3.5 m).
            j_k: 700_000.0,
            m_t: 9_000.0,
            j_t: 5_000.0,
            a_k: 3.725,
            a_t: 1.25,
            c_k: 2.66e6,
            b_k: 1.0e5,
            c_t: 3.04e6,
            b_t: 3.0e4,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m_k", self.m_k),
            ("j_k", self.j_k),
            ("m_t", self.m_t),
            ("j_t", self.j_t),
            ("c_k", self.c_k),
            ("c_t", self.c_t),
            ("a_t", self.a_t),
            ("a_k", self.a_k),
        ];
        for (field, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::parameter(field, format!("must be finite and > 0, got {value}")));
            }
        }
        for (field, value) in [("b_k", self.b_k), ("b_t", self.b_t)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::parameter(field, format!("must be finite and >= 0, got {value}")));
            }
        }
        if self.a_k <= self.a_t {
            return Err(Error::parameter(
                "a_k",
                format!(
                    "pivot half-spacing {} must exceed half wheelbase a_t = {}",
                    self.a_k, self.a_t
                ),
            ));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            a_k: self.a_k,
            a_t: self.a_t,
        }
    }
}

/// The longitudinal layout that determines the wheelset transport delays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub a_k: f64,
    pub a_t: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        VehicleParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_negative_mass_by_name() {
        let p = VehicleParams {
            m_k: -1.0,
            ..Default::default()
        };
        match p.validate() {
            Err(Error::Parameter { field, .. }) => assert_eq!(field, "m_k"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_damping_is_allowed() {
        let p = VehicleParams {
            b_k: 0.0,
            b_t: 0.0,
            ..Default::default()
        };
        p.validate().unwrap();
    }

    #[test]
    fn pivot_spacing_must_exceed_wheelbase() {
        let p = VehicleParams {
            a_k: 1.0,
            a_t: 1.25,
            ..Default::default()
        };
        assert!(matches!(p.validate(), Err(Error::Parameter { field, .. }) if field == "a_k"));
    }
}
