use crate::{invalid, Result};

/// Diagonal hydrodynamic model parameters.
///
/// Index order for the 6-vectors is surge, sway, heave, roll, pitch, yaw.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VehicleParams {
    /// kg
    pub mass: f64,
    /// Principal moments of inertia about the centre of gravity, kg m^2.
    pub inertia: [f64; 3],
    pub added_mass: [f64; 6],
    pub linear_drag: [f64; 6],
    pub quadratic_drag: [f64; 6],
    /// Buoyancy minus weight, N. Positive floats upwards.
    pub buoyancy_offset: f64,
    /// Centre of buoyancy relative to the centre of gravity, body frame, m.
    pub cob_offset: [f64; 3],
}

impl Default for VehicleParams {
    fn default() -> Self {
        let mass = 60.0;
        let inertia = [5.0, 8.0, 8.0];
        let rigid = [mass, mass, mass, inertia[0], inertia[1], inertia[2]];
        Self {
            mass,
            inertia,
            added_mass: rigid.map(|m| 0.3 * m),
            linear_drag: [20.0, 25.0, 30.0, 5.0, 7.0, 7.0],
            quadratic_drag: [40.0, 50.0, 60.0, 10.0, 12.0, 12.0],
            buoyancy_offset: 3.0,
            cob_offset: [0.0, 0.0, -0.05],
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|v| v.is_finite());
        if !(self.mass > 0.0) {
            return Err(invalid("mass must be positive"));
        }
        if !self.inertia.iter().all(|&i| i > 0.0) {
            return Err(invalid("inertia diagonal must be positive"));
        }
        if !self.added_mass.iter().all(|&m| m >= 0.0) {
            return Err(invalid("added mass must be non-negative"));
        }
        if !self.linear_drag.iter().chain(&self.quadratic_drag).all(|&d| d >= 0.0) {
            return Err(invalid("drag coefficients must be non-negative"));
        }
        if !(finite(&self.inertia)
            && finite(&self.added_mass)
            && finite(&self.linear_drag)
            && finite(&self.quadratic_drag)
            && finite(&self.cob_offset)
            && self.buoyancy_offset.is_finite())
        {
            return Err(invalid("vehicle parameters must be finite"));
        }
        Ok(())
    }

    /// Diagonal of rigid-body plus added mass.
    pub fn total_mass(&self) -> [f64; 6] {
        let m = self.mass;
        let i = self.inertia;
        let rigid = [m, m, m, i[0], i[1], i[2]];
        core::array::from_fn(|k| rigid[k] + self.added_mass[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = VehicleParams::default();
        p.validate().unwrap();
        assert_eq!(p.total_mass()[0], 78.0);
        assert_eq!(p.total_mass()[3], 6.5);
    }

    #[test]
    fn rejects_bad_values() {
        let p = VehicleParams { mass: 0.0, ..VehicleParams::default() };
        assert!(p.validate().is_err());
        let mut p = VehicleParams::default();
        p.linear_drag[2] = -1.0;
        assert!(p.validate().is_err());
        let mut p = VehicleParams::default();
        p.inertia[1] = f64::NAN;
        assert!(p.validate().is_err());
    }
}
