//! One-parameter families degenerating at `u = 0`: tracking the phase of the
//! vanishing cycle along a sampled path and locating the walls where it lines
//! up with a fixed second cycle.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{wrap_pi, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `x^2 + y^2 + z^2 = u`: one loop around 0 is a single twist.
    Threefold,
    /// Surface family after the base change `u -> u^2`: one loop is a squared twist.
    K3BaseChanged,
}

impl FamilyKind {
    /// Twist power picked up per loop of the sampled parameter.
    pub fn twists_per_loop(self) -> i64 {
        match self {
            FamilyKind::Threefold => 1,
            FamilyKind::K3BaseChanged => 2,
        }
    }
}

/// Samples `u_0, ..., u_M` of the path at `t_j = j / M`. The period of the
/// vanishing cycle is taken to be `u` itself, in the base-changed parameter
/// for the surface family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyModel<T> {
    pub samples: Vec<Complex<T>>,
    pub kind: FamilyKind,
    pub baseline: T,
}

impl<T: Real> FamilyModel<T> {
    /// `u(t) = r e^{2 pi i t}` sampled at `steps + 1` points.
    pub fn circle(kind: FamilyKind, radius: T, steps: usize) -> Self {
        let samples = (0..=steps)
            .map(|j| {
                let t = T::of_int(j as i64) / T::of_int(steps.max(1) as i64);
                Complex::from_polar(radius, T::TAU() * t)
            })
            .collect();
        FamilyModel {
            samples,
            kind,
            baseline: T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct Wall<T> {
    pub parameter: T,
    /// +1 when the tracked phase increases through the crossing.
    pub direction: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct FamilyTrack<T> {
    pub winding: i64,
    pub closed: bool,
    pub monodromy_power: i64,
    pub walls: Vec<Wall<T>>,
    /// Crossings where the phases differ by an odd multiple of pi.
    pub rejected: Vec<Wall<T>>,
    pub phases: Vec<T>,
}

/// Lift the phase of the vanishing cycle along the path and report its
/// winding and the parameters where it meets the baseline modulo `2 pi`.
pub fn family_track<T: Real>(model: &FamilyModel<T>) -> Result<FamilyTrack<T>> {
    let u = &model.samples;
    if u.is_empty() {
        return Err(Error::InvalidConfig("family path has no samples".into()));
    }
    if let Some(i) = u.iter().position(|z| !(z.norm() > T::zero())) {
        return Err(Error::PathThroughZero(i));
    }
    let limit = T::FRAC_PI_4();
    let mut phases = Vec::with_capacity(u.len());
    phases.push(u[0].arg());
    for j in 1..u.len() {
        let step = wrap_pi(u[j].arg() - u[j - 1].arg());
        if step.abs() >= limit {
            return Err(Error::Undersampled {
                index: j - 1,
                jump: step.to_f64_lossy(),
            });
        }
        phases.push(phases[j - 1] + step);
    }
    let last = u.len() - 1;
    let closed = (u[last] - u[0]).norm() <= T::tol(1e-9) * u[0].norm().max(T::one());
    let turns = (phases[last] - phases[0]) / T::TAU();
    let winding = turns.round().to_i64().unwrap_or(0);

    let eps = T::lit(1e-9);
    let level = |phi: T| (phi - model.baseline) / T::PI();
    let snap = |d: T| {
        let r = d.round();
        if (d - r).abs() < eps {
            r
        } else {
            d
        }
    };
    let denom = T::of_int(last.max(1) as i64);
    let mut walls = Vec::new();
    let mut rejected = Vec::new();
    for j in 0..last {
        let (d0, d1) = (snap(level(phases[j])), snap(level(phases[j + 1])));
        if d0 == d1 {
            continue;
        }
        let up = d1 > d0;
        let (lo, hi) = if up { (d0, d1) } else { (d1, d0) };
        // Half-open so a level hit exactly at a sample is counted once.
        let (first, end) = if up {
            ((lo.floor() + T::one()), hi)
        } else {
            (lo, hi.ceil() - T::one())
        };
        let mut k = if up { first } else { end };
        loop {
            if up && k > end || !up && k < first {
                break;
            }
            let s = (k - d0) / (d1 - d0);
            let t = (T::of_int(j as i64) + s) / denom;
            let wall = Wall {
                parameter: t,
                direction: if up { 1 } else { -1 },
            };
            let even = (k / T::lit(2.0)).fract() == T::zero();
            if even {
                walls.push(wall);
            } else {
                rejected.push(wall);
            }
            k = if up { k + T::one() } else { k - T::one() };
        }
    }
    Ok(FamilyTrack {
        winding,
        closed,
        monodromy_power: winding * model.kind.twists_per_loop(),
        walls,
        rejected,
        phases,
    })
}
