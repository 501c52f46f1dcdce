//! Destabilizer search over graded two-term decompositions of a torus class.
//!
//! Sub-classes are represented by straight lines; their lifts are the ones
//! bracketing the phase of the total class, which is the only relative lift
//! for which a graded sum can exist.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{wrap_pi, Real};
use crate::surgery::grading_compatible;
use crate::torus_cy::GradedClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityStatus {
    Stable,
    Destabilized,
    ParallelOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct GradedPart<T> {
    pub p: i64,
    pub q: i64,
    pub phi: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct Witness<T> {
    pub first: GradedPart<T>,
    pub second: GradedPart<T>,
    /// `|p1 q2 - p2 q1|`: transverse crossings of the two lines.
    pub intersection_count: u64,
    pub compatible: bool,
    pub destabilizing: bool,
    /// Components of the smoothing at all crossings; one iff the total class is primitive.
    pub sum_components: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct StabilityVerdict<T> {
    pub status: StabilityStatus,
    pub witnesses: Vec<Witness<T>>,
    pub search_bound: i64,
}

fn lift_near<T: Real>(class: GradedClass<T>, target: T) -> Result<GradedClass<T>> {
    let base = class.phase_lift();
    let k = ((target - base) / T::TAU()).round().to_i64().unwrap_or(0);
    GradedClass::with_sheet(class.p(), class.q(), class.sheet() + k, *class.geometry())
}

/// Sub-class `(p1, q1)` of `class`, lifted next to the class phase.
fn graded_part<T: Real>(class: &GradedClass<T>, p: i64, q: i64) -> Result<GradedClass<T>> {
    let phi = class.phase_lift();
    let sub = GradedClass::new(p, q, *class.geometry())?;
    let offset = wrap_pi(sub.phase_lift() - phi);
    lift_near(sub, phi + offset)
}

/// All transverse splittings `(p1, q1) + (p2, q2)` with entries bounded by
/// `bound`, in lexicographic order of `(p1, q1)`.
pub fn enumerate_decompositions<T: Real>(
    class: &GradedClass<T>,
    bound: i64,
) -> Result<Vec<Witness<T>>> {
    let (p, q) = (class.p(), class.q());
    if p == 0 && q == 0 {
        return Err(Error::ZeroClass);
    }
    let needed = p.abs().max(q.abs());
    if bound < needed {
        return Err(Error::BoundTooSmall { bound, needed });
    }
    let components = p.gcd(&q).unsigned_abs();
    let mut out = Vec::new();
    for p1 in -bound..=bound {
        for q1 in -bound..=bound {
            let (p2, q2) = (p - p1, q - q1);
            if (p1, q1) == (0, 0) || (p2, q2) == (0, 0) || p2.abs().max(q2.abs()) > bound {
                continue;
            }
            let det = p1 * q2 - p2 * q1;
            if det == 0 {
                continue;
            }
            let a = graded_part(class, p1, q1)?;
            let b = graded_part(class, p2, q2)?;
            let (phi1, phi2) = (a.phase_lift(), b.phase_lift());
            let compatible = grading_compatible(phi1, phi2);
            out.push(Witness {
                first: GradedPart { p: p1, q: q1, phi: phi1 },
                second: GradedPart { p: p2, q: q2, phi: phi2 },
                intersection_count: det.unsigned_abs(),
                compatible,
                destabilizing: compatible && phi1 >= phi2,
                sum_components: components,
            });
        }
    }
    Ok(out)
}

/// Stable unless a compatible decomposition has `phi1 >= phi2`. Classes
/// whose only decompositions smooth into several parallel components are
/// reported separately.
pub fn is_stable<T: Real>(class: &GradedClass<T>, bound: i64) -> Result<StabilityVerdict<T>> {
    let witnesses = enumerate_decompositions(class, bound)?;
    let status = if witnesses.iter().any(|w| w.compatible && w.destabilizing) {
        StabilityStatus::Destabilized
    } else if witnesses.iter().any(|w| w.sum_components == 1) {
        StabilityStatus::Stable
    } else {
        StabilityStatus::ParallelOnly
    };
    Ok(StabilityVerdict {
        status,
        witnesses,
        search_bound: bound,
    })
}
