use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::geometry::Pose;
use crate::{invalid, Error, Result};

pub const GRID_XY: [f64; 3] = [-5.0, 0.0, 5.0];
pub const GRID_Z: [f64; 3] = [2.0, 4.0, 6.0];
pub const GRID_ANGLES: [f64; 3] = [0.0, FRAC_PI_2, -FRAC_PI_2];

/// Start pose of one evaluation episode.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridStart {
    pub index: usize,
    /// `[x, y, z, roll, pitch, heading]`
    pub xyzrph: [f64; 6],
}

impl GridStart {
    pub fn pose(&self) -> Pose {
        let [x, y, z, r, p, h] = self.xyzrph;
        Pose::from_xyz_rpy(x, y, z, r, p, h)
    }
}

/// Evaluation start sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EvalGrid {
    /// All 3^6 combinations; nested x, y, z, roll, pitch, heading with
    /// heading varying fastest.
    Full,
    /// Centre plus the two extreme corners.
    Smoke,
    /// The 27 positions at level attitude.
    Positions,
}

impl EvalGrid {
    pub fn name(self) -> &'static str {
        match self {
            EvalGrid::Full => "full",
            EvalGrid::Smoke => "smoke",
            EvalGrid::Positions => "positions",
        }
    }

    pub fn starts(self) -> Vec<GridStart> {
        let rows: Vec<[f64; 6]> = match self {
            EvalGrid::Full => {
                let mut v = Vec::with_capacity(729);
                for x in GRID_XY {
                    for y in GRID_XY {
                        for z in GRID_Z {
                            for r in GRID_ANGLES {
                                for p in GRID_ANGLES {
                                    for h in GRID_ANGLES {
                                        v.push([x, y, z, r, p, h]);
                                    }
                                }
                            }
                        }
                    }
                }
                v
            }
            EvalGrid::Smoke => alloc::vec![
                [0.0, 0.0, 4.0, 0.0, 0.0, 0.0],
                [-5.0, -5.0, 2.0, -FRAC_PI_2, -FRAC_PI_2, -FRAC_PI_2],
                [5.0, 5.0, 6.0, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2],
            ],
            EvalGrid::Positions => {
                let mut v = Vec::with_capacity(27);
                for x in GRID_XY {
                    for y in GRID_XY {
                        for z in GRID_Z {
                            v.push([x, y, z, 0.0, 0.0, 0.0]);
                        }
                    }
                }
                v
            }
        };
        rows.into_iter().enumerate().map(|(index, xyzrph)| GridStart { index, xyzrph }).collect()
    }
}

impl core::str::FromStr for EvalGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(EvalGrid::Full),
            "smoke" => Ok(EvalGrid::Smoke),
            "positions" => Ok(EvalGrid::Positions),
            other => Err(invalid(alloc::format!("unknown grid '{other}' (expected full, smoke or positions)"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_grid_enumerates_every_combination_once() {
        let s = EvalGrid::Full.starts();
        assert_eq!(s.len(), 729);
        for (i, a) in s.iter().enumerate() {
            assert_eq!(a.index, i);
            assert!(GRID_XY.contains(&a.xyzrph[0]) && GRID_XY.contains(&a.xyzrph[1]) && GRID_Z.contains(&a.xyzrph[2]));
            assert!(a.xyzrph[3..].iter().all(|v| GRID_ANGLES.contains(v)));
            for b in &s[i + 1..] {
                assert_ne!(a.xyzrph, b.xyzrph);
            }
        }
        assert_eq!(s[0].xyzrph, [-5.0, -5.0, 2.0, 0.0, 0.0, 0.0]);
        assert_eq!(s[1].xyzrph, [-5.0, -5.0, 2.0, 0.0, 0.0, FRAC_PI_2]);
    }

    #[test]
    fn subsets() {
        assert_eq!(EvalGrid::Smoke.starts().len(), 3);
        let p = EvalGrid::Positions.starts();
        assert_eq!(p.len(), 27);
        assert!(p.iter().all(|s| s.xyzrph[3..] == [0.0; 3]));
        assert_eq!("smoke".parse::<EvalGrid>().unwrap(), EvalGrid::Smoke);
        assert!("tiny".parse::<EvalGrid>().is_err());
    }
}
