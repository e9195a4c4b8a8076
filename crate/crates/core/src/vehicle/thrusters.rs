use alloc::format;
use core::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, SMatrix, Vector3};

use super::Vec6;
use crate::{invalid, Result};

pub const N_THRUSTERS: usize = 8;

/// One fixed-direction thruster, expressed in the body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Thruster {
    /// m
    pub position: [f64; 3],
    /// Unit thrust direction for positive commands.
    pub direction: [f64; 3],
    /// N at full forward command.
    pub max_thrust: f64,
}

impl Thruster {
    /// Allocation column `[d; r x d]`.
    pub fn column(&self) -> [f64; 6] {
        let r = Vector3::from(self.position);
        let d = Vector3::from(self.direction);
        let m = r.cross(&d);
        [d.x, d.y, d.z, m.x, m.y, m.z]
    }
}

/// Maps thruster forces to the body wrench: column `i` is `[d_i; r_i x d_i]`.
pub fn allocation_matrix(thrusters: &[Thruster]) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(6, thrusters.len());
    for (i, t) in thrusters.iter().enumerate() {
        for (row, v) in t.column().into_iter().enumerate() {
            b[(row, i)] = v;
        }
    }
    b
}

/// Signed quadratic thrust curve `max * u|u|` with a symmetric deadband.
pub fn thrust_curve(u: f64, max_thrust: f64, deadband: f64) -> f64 {
    if u.abs() < deadband {
        0.0
    } else {
        max_thrust * u * u.abs()
    }
}

/// A validated eight-thruster arrangement with rank-6 allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct ThrusterLayout {
    thrusters: [Thruster; N_THRUSTERS],
    /// First-order response time constant, s.
    time_constant: f64,
    /// Commands with magnitude below this produce no thrust.
    deadband: f64,
    columns: [[f64; 6]; N_THRUSTERS],
    pinv: SMatrix<f64, N_THRUSTERS, 6>,
}

impl ThrusterLayout {
    pub fn new(thrusters: &[Thruster], time_constant: f64, deadband: f64) -> Result<Self> {
        let thrusters: [Thruster; N_THRUSTERS] = thrusters
            .try_into()
            .map_err(|_| invalid(format!("expected {N_THRUSTERS} thrusters, got {}", thrusters.len())))?;
        for (i, t) in thrusters.iter().enumerate() {
            let n = Vector3::from(t.direction).norm();
            if (n - 1.0).abs() > 1e-9 {
                return Err(invalid(format!("thruster {i} direction is not unit length ({n})")));
            }
            if !(t.max_thrust > 0.0) || !t.position.iter().all(|v| v.is_finite()) {
                return Err(invalid(format!("thruster {i} has invalid position or max thrust")));
            }
        }
        if !(time_constant > 0.0) || !time_constant.is_finite() {
            return Err(invalid("thruster time constant must be positive"));
        }
        if !(0.0..1.0).contains(&deadband) {
            return Err(invalid("deadband must lie in [0, 1)"));
        }

        let b = allocation_matrix(&thrusters);
        let svd = b.clone().svd(true, true);
        let max_sv = svd.singular_values.max();
        let rank = svd.singular_values.iter().filter(|&&s| s > 1e-9 * max_sv).count();
        if rank < 6 {
            return Err(invalid(format!("allocation matrix has rank {rank}, need 6")));
        }
        let pinv_dyn = svd
            .pseudo_inverse(1e-12 * max_sv)
            .map_err(|e| invalid(format!("pseudo-inverse failed: {e}")))?;
        let pinv = SMatrix::<f64, N_THRUSTERS, 6>::from_iterator(pinv_dyn.iter().copied());

        Ok(Self {
            columns: thrusters.map(|t| t.column()),
            thrusters,
            time_constant,
            deadband,
            pinv,
        })
    }

    /// Corner-mounted layout: four horizontal thrusters vectored at 45 degrees
    /// and four vertical thrusters, 50 N each.
    pub fn default_layout() -> Self {
        let (ax, ay) = (0.20, 0.15);
        let (vx, vy) = (0.12, 0.22);
        let s = FRAC_1_SQRT_2;
        let h = |x: f64, y: f64, dx: f64, dy: f64| Thruster {
            position: [x, y, 0.0],
            direction: [dx, dy, 0.0],
            max_thrust: 50.0,
        };
        let v = |x: f64, y: f64| Thruster {
            position: [x, y, 0.0],
            direction: [0.0, 0.0, 1.0],
            max_thrust: 50.0,
        };
        let thrusters = [
            h(ax, -ay, s, s),
            h(ax, ay, s, -s),
            h(-ax, -ay, s, -s),
            h(-ax, ay, s, s),
            v(vx, -vy),
            v(vx, vy),
            v(-vx, -vy),
            v(-vx, vy),
        ];
        Self::new(&thrusters, 0.1, 0.03).expect("default layout is rank 6")
    }

    pub fn thrusters(&self) -> &[Thruster; N_THRUSTERS] {
        &self.thrusters
    }

    pub fn time_constant(&self) -> f64 {
        self.time_constant
    }

    pub fn deadband(&self) -> f64 {
        self.deadband
    }

    pub fn columns(&self) -> &[[f64; 6]; N_THRUSTERS] {
        &self.columns
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        allocation_matrix(&self.thrusters)
    }

    /// Steady-state thrust of thruster `i` for normalised command `u`.
    pub fn thrust_from_command(&self, i: usize, u: f64) -> f64 {
        thrust_curve(u, self.thrusters[i].max_thrust, self.deadband)
    }

    /// Body wrench produced by the given thruster forces.
    pub fn wrench(&self, forces: &[f64; N_THRUSTERS]) -> Vec6 {
        let mut w = Vec6::zeros();
        for (f, col) in forces.iter().zip(&self.columns) {
            for k in 0..6 {
                w[k] += f * col[k];
            }
        }
        w
    }

    /// Minimum-norm thruster forces reproducing `wrench` (no saturation).
    pub fn allocate_forces(&self, wrench: &Vec6) -> [f64; N_THRUSTERS] {
        let f = self.pinv * wrench;
        core::array::from_fn(|i| f[i])
    }

    /// Minimum-norm allocation converted to normalised commands by inverting
    /// the thrust curve, clamped to `[-1, 1]`.
    pub fn allocate_wrench(&self, wrench: &Vec6) -> [f64; N_THRUSTERS] {
        let forces = self.allocate_forces(wrench);
        core::array::from_fn(|i| {
            let f = forces[i];
            let u = libm::sqrt(f.abs() / self.thrusters[i].max_thrust);
            (if f < 0.0 { -u } else { u }).clamp(-1.0, 1.0)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_thruster_column() {
        let t = Thruster { position: [0.0; 3], direction: [1.0, 0.0, 0.0], max_thrust: 50.0 };
        let b = allocation_matrix(&[t]);
        assert_eq!(b.column(0).as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn lever_arm_gives_yaw_torque() {
        let t = Thruster { position: [0.0, 1.0, 0.0], direction: [1.0, 0.0, 0.0], max_thrust: 50.0 };
        let b = allocation_matrix(&[t]);
        assert_eq!(&b.column(0).as_slice()[3..], &[0.0, 0.0, -1.0]);
    }

    #[test]
    fn default_layout_rank_six() {
        let b = ThrusterLayout::default_layout().matrix();
        let sv = b.svd(false, false).singular_values;
        assert!(sv.min() > 0.1, "{sv}");
    }

    #[test]
    fn rejects_rank_deficient_and_malformed() {
        let t = Thruster { position: [0.0; 3], direction: [1.0, 0.0, 0.0], max_thrust: 50.0 };
        assert!(ThrusterLayout::new(&[t; 8], 0.1, 0.03).is_err());
        assert!(ThrusterLayout::new(&[t; 3], 0.1, 0.03).is_err());
        let mut ts = *ThrusterLayout::default_layout().thrusters();
        ts[0].direction = [1.0, 1.0, 0.0];
        assert!(ThrusterLayout::new(&ts, 0.1, 0.03).is_err());
    }

    #[test]
    fn thrust_curve_examples() {
        assert_eq!(thrust_curve(0.0, 50.0, 0.03), 0.0);
        assert_eq!(thrust_curve(1.0, 50.0, 0.03), 50.0);
        assert_eq!(thrust_curve(-0.5, 50.0, 0.03), -12.5);
        assert_eq!(thrust_curve(0.029, 50.0, 0.03), 0.0);
    }

    #[test]
    fn zero_wrench_zero_commands() {
        let layout = ThrusterLayout::default_layout();
        assert_eq!(layout.allocate_wrench(&Vec6::zeros()), [0.0; 8]);
    }

    #[test]
    fn feasible_wrench_is_reproduced() {
        let layout = ThrusterLayout::default_layout();
        let f0 = [3.0, -2.0, 5.0, 1.0, -4.0, 2.5, 0.5, -1.5];
        let w = layout.wrench(&f0);
        let f = layout.allocate_forces(&w);
        assert!((layout.wrench(&f) - w).norm() < 1e-6);
        // The commands themselves reproduce the forces through the curve.
        let u = layout.allocate_wrench(&w);
        for i in 0..8 {
            let back = layout.thrust_from_command(i, u[i]);
            assert_abs_diff_eq!(back, f[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn saturating_wrench_is_clamped() {
        let layout = ThrusterLayout::default_layout();
        let u = layout.allocate_wrench(&Vec6::new(5000.0, -3000.0, 8000.0, 900.0, -900.0, 400.0));
        assert!(u.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert!(u.iter().any(|v| v.abs() == 1.0));
    }

    #[test]
    fn basis_wrenches_feasible_at_ten_percent() {
        let layout = ThrusterLayout::default_layout();
        for axis in 0..6 {
            let mut w = Vec6::zeros();
            w[axis] = 5.0;
            let f = layout.allocate_forces(&w);
            assert!(f.iter().all(|v| v.abs() <= 50.0), "axis {axis}: {f:?}");
            assert!((layout.wrench(&f) - w).norm() < 1e-9);
            let u = layout.allocate_wrench(&w);
            assert!(u.iter().all(|v| v.abs() < 1.0));
        }
    }
}
