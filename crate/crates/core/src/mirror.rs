//! Sheaf classes on the mirror elliptic curve: slopes, stability, the
//! extension wall and the Mukai vector rules for twisted extensions.

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::torus_cy::GradedClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SheafClass {
    rank: i64,
    degree: i64,
}

impl SheafClass {
    pub fn new(rank: i64, degree: i64) -> Result<Self> {
        if rank == 0 && degree == 0 {
            return Err(Error::ZeroClass);
        }
        if rank < 0 {
            return Err(Error::UnnormalizedOrientation { p: rank, q: degree });
        }
        Ok(SheafClass { rank, degree })
    }

    pub fn rank(&self) -> i64 {
        self.rank
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// `degree / rank`, `None` for torsion sheaves.
    pub fn slope(&self) -> Option<Ratio<i64>> {
        (self.rank > 0).then(|| Ratio::new(self.degree, self.rank))
    }
}

/// Image of a graded line: the sheaf class and the number of places it is
/// shifted in the derived category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MirrorImage {
    pub sheaf: SheafClass,
    pub shift: i64,
}

fn half_open_index<T: Real>(phi: T) -> i64 {
    // m with phi - m pi in (-pi/2, pi/2].
    ((phi - T::FRAC_PI_2()) / T::PI()).ceil().to_i64().unwrap_or(0)
}

/// `(p, q) -> (rank p, degree q)` for a class whose lift lies in `(-pi/2, pi/2]`.
pub fn mirror_map<T: Real>(class: &GradedClass<T>) -> Result<SheafClass> {
    if !class.geometry().is_standard() {
        return Err(Error::NonStandardGeometry);
    }
    if half_open_index(class.phase_lift()) != 0 {
        return Err(Error::UnnormalizedOrientation {
            p: class.p(),
            q: class.q(),
        });
    }
    SheafClass::new(class.p(), class.q())
}

/// Shift any class into the normalized window first and report the shift.
pub fn mirror_map_any<T: Real>(class: &GradedClass<T>) -> Result<MirrorImage> {
    let m = half_open_index(class.phase_lift());
    let sheaf = mirror_map(&class.shift_grading(-m))?;
    Ok(MirrorImage { sheaf, shift: m })
}

/// Stable bundles are those with coprime rank and degree; the only stable
/// torsion class is a single point.
pub fn sheaf_stable(s: &SheafClass) -> bool {
    if s.rank > 0 {
        s.rank.gcd(&s.degree) == 1
    } else {
        s.degree == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WallScenario {
    /// Slope of `E2`, held fixed.
    pub mu: f64,
    /// `E1` has slope `mu - t`.
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WallStatus {
    Stable,
    Semistable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WallVerdict {
    pub status: WallStatus,
    pub slope_e1: f64,
    pub slope_e2: f64,
    /// Destabilizing subobject when unstable.
    pub destabilizer: Option<String>,
    /// Polystable representative of the S-equivalence class when semistable.
    pub representative: Option<String>,
}

/// Non-split extension `0 -> E2 -> E -> E1 -> 0` as the slope of `E1` moves
/// through the slope of `E2`.
pub fn extension_wall(s: &WallScenario) -> Result<WallVerdict> {
    if !s.mu.is_finite() || !s.t.is_finite() {
        return Err(Error::InvalidConfig("mu and t must be finite".into()));
    }
    let (status, destabilizer, representative) = if s.t > 0.0 {
        (WallStatus::Stable, None, None)
    } else if s.t == 0.0 {
        (WallStatus::Semistable, None, Some("E1 + E2".to_string()))
    } else {
        (WallStatus::Unstable, Some("E1".to_string()), None)
    };
    Ok(WallVerdict {
        status,
        slope_e1: s.mu - s.t,
        slope_e2: s.mu,
        destabilizer,
        representative,
    })
}

/// Mukai vector of the extension built from `v1` and `v2`: their sum on a
/// surface, `v2 - v1` on a threefold.
pub fn mukai_sum(n: u32, v1: &[i64], v2: &[i64]) -> Result<Vec<i64>> {
    if v1.len() != v2.len() {
        return Err(Error::LengthMismatch {
            expected: v1.len(),
            got: v2.len(),
        });
    }
    if v1.iter().all(|&x| x == 0) || v2.iter().all(|&x| x == 0) {
        return Err(Error::DegenerateVector);
    }
    match n {
        2 => Ok(v1.iter().zip(v2).map(|(a, b)| a + b).collect()),
        3 => Ok(v1.iter().zip(v2).map(|(a, b)| b - a).collect()),
        _ => Err(Error::BadDimension(n)),
    }
}
