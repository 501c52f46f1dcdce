//! Closed polygonal curves on the flat torus, carried in the universal cover.
//!
//! A curve stores `N` vertices `x_0 .. x_{N-1}` and an integer closure vector;
//! the periodic extension is `x_{k+N} = x_k + tau` with `tau` the lattice
//! translation of the closure. Edge `k` runs from `x_k` to `x_{k+1}`, so the
//! last edge closes the loop. Each edge carries the lifted pointwise phase
//! `theta_k`, the angle of the edge tangent under `e^{-i alpha}`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::crossing;
use crate::error::{Error, Result};
use crate::scalar::{wrap_pi, Real};
use crate::torus_cy::{omega_integral, TorusCY};
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve<T> {
    vertices: Vec<Vec2<T>>,
    closure: [i64; 2],
    theta: Vec<T>,
    holonomy: Option<T>,
    geometry: TorusCY<T>,
}

/// Continuous lift of the edge phases, first value in `(-pi, pi]`.
///
/// Fails with [`Error::RefinementRequired`] when any turn between consecutive
/// edges, including the closing turn, reaches `pi/2`.
pub fn theta_lift_compute<T: Real>(
    vertices: &[Vec2<T>],
    closure: [i64; 2],
    geometry: &TorusCY<T>,
) -> Result<Vec<T>> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let tau = geometry.translation(closure);
    let edge = |k: usize| {
        if k + 1 < n {
            vertices[k + 1] - vertices[k]
        } else {
            vertices[0] + tau - vertices[n - 1]
        }
    };
    let mut theta = Vec::with_capacity(n);
    let mut prev_dir = edge(0);
    if prev_dir.norm() == T::zero() {
        return Err(Error::ZeroLengthEdge(0));
    }
    theta.push(geometry.tangent_phase(prev_dir));
    for k in 1..=n {
        let dir = if k < n { edge(k) } else { edge(0) };
        if dir.norm() == T::zero() {
            return Err(Error::ZeroLengthEdge(k));
        }
        let turn = prev_dir.cross(dir).atan2(prev_dir.dot(dir));
        if prev_dir.cross(dir) == T::zero() && prev_dir.dot(dir) < T::zero() {
            return Err(Error::ReversedEdge(k - 1, k % n));
        }
        if turn.abs() >= T::FRAC_PI_2() {
            return Err(Error::RefinementRequired {
                vertex: k % n,
                turn: turn.to_f64_lossy(),
            });
        }
        if k < n {
            let last = theta[k - 1];
            theta.push(last + turn);
        }
        prev_dir = dir;
    }
    Ok(theta)
}

impl<T: Real> DiscreteCurve<T> {
    /// Curve with the canonical lift (`theta_0` in `(-pi, pi]`).
    pub fn new(vertices: Vec<Vec2<T>>, closure: [i64; 2], geometry: TorusCY<T>) -> Result<Self> {
        let theta = theta_lift_compute(&vertices, closure, &geometry)?;
        Ok(DiscreteCurve {
            vertices,
            closure,
            theta,
            holonomy: None,
            geometry,
        })
    }

    /// Curve whose lift is shifted by `2 pi sheet` from the canonical one.
    pub fn with_sheet(
        vertices: Vec<Vec2<T>>,
        closure: [i64; 2],
        geometry: TorusCY<T>,
        sheet: i64,
    ) -> Result<Self> {
        let mut c = Self::new(vertices, closure, geometry)?;
        c.add_to_lift(T::TAU() * T::of_int(sheet));
        Ok(c)
    }

    /// Curve whose first lift value is the `2 pi`-translate closest to `reference`.
    pub fn with_lift_near(
        vertices: Vec<Vec2<T>>,
        closure: [i64; 2],
        geometry: TorusCY<T>,
        reference: T,
    ) -> Result<Self> {
        let mut c = Self::new(vertices, closure, geometry)?;
        let k = ((reference - c.theta[0]) / T::TAU()).round();
        c.add_to_lift(k * T::TAU());
        Ok(c)
    }

    fn add_to_lift(&mut self, shift: T) {
        if shift != T::zero() {
            self.theta.iter_mut().for_each(|t| *t += shift);
        }
    }

    pub fn with_holonomy(mut self, holonomy: Option<T>) -> Self {
        self.holonomy = holonomy.map(|h| {
            let r = h % T::TAU();
            if r < T::zero() {
                r + T::TAU()
            } else {
                r
            }
        });
        self
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec2<T>] {
        &self.vertices
    }

    pub fn closure(&self) -> [i64; 2] {
        self.closure
    }

    pub fn theta_lift(&self) -> &[T] {
        &self.theta
    }

    pub fn holonomy(&self) -> Option<T> {
        self.holonomy
    }

    pub fn geometry(&self) -> &TorusCY<T> {
        &self.geometry
    }

    pub fn translation(&self) -> Vec2<T> {
        self.geometry.translation(self.closure)
    }

    /// Sheet of the lift relative to the canonical one.
    pub fn lift_sheet(&self) -> i64 {
        let canonical = self.geometry.tangent_phase(self.edge(0));
        ((self.theta[0] - canonical) / T::TAU())
            .round()
            .to_i64()
            .unwrap_or(0)
    }

    /// Vertex `k` of the periodic extension, any integer `k`.
    pub fn vertex(&self, k: i64) -> Vec2<T> {
        let n = self.len() as i64;
        let wraps = k.div_euclid(n);
        let base = self.vertices[k.rem_euclid(n) as usize];
        if wraps == 0 {
            base
        } else {
            base + self.translation() * T::of_int(wraps)
        }
    }

    pub fn edge(&self, k: usize) -> Vec2<T> {
        self.vertex(k as i64 + 1) - self.vertex(k as i64)
    }

    pub fn edge_lengths(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.edge(k).norm()).collect()
    }

    pub fn length(&self) -> T {
        self.edge_lengths().into_iter().sum()
    }

    /// Winding number of `e^{i theta}` around the loop.
    pub fn maslov(&self) -> i64 {
        let n = self.len();
        let closing = wrap_pi(self.theta[0] - self.theta[n - 1]);
        let total = self.theta[n - 1] + closing - self.theta[0];
        (total / T::TAU()).round().to_i64().unwrap_or(0)
    }

    /// `max theta - min theta`.
    pub fn phase_spread(&self) -> T {
        let (lo, hi) = self.theta_range();
        hi - lo
    }

    fn theta_range(&self) -> (T, T) {
        self.theta.iter().fold(
            (T::infinity(), T::neg_infinity()),
            |(lo, hi), &t| (lo.min(t), hi.max(t)),
        )
    }

    /// `integral of Omega` over the closure class, exactly telescoped.
    pub fn omega(&self) -> Result<Complex<T>> {
        omega_integral(self.closure, &self.geometry)
    }

    /// Lifted argument of the class period, placed on the sheet closest to
    /// the arclength-weighted mean of the pointwise lift.
    pub fn average_phase(&self) -> Result<T> {
        let m = self.maslov();
        if m != 0 {
            return Err(Error::NotGradeable(m));
        }
        let z = self.omega()?;
        let principal = z.im.atan2(z.re);
        let lengths = self.edge_lengths();
        let total: T = lengths.iter().copied().sum();
        let mean = self
            .theta
            .iter()
            .zip(&lengths)
            .map(|(&t, &l)| t * l)
            .sum::<T>()
            / total;
        let k = ((mean - principal) / T::TAU()).round();
        Ok(principal + k * T::TAU())
    }

    /// `max |theta - phi|` against the average phase.
    pub fn max_phase_deviation(&self) -> Result<T> {
        let phi = self.average_phase()?;
        Ok(self
            .theta
            .iter()
            .fold(T::zero(), |acc, &t| acc.max((t - phi).abs())))
    }

    /// `sum_k sin^2(theta_k - phi) l_k`: the squared norm of the moment map
    /// density `Im Omega|_L` per arclength.
    pub fn moment_norm(&self) -> Result<T> {
        let phi = self.average_phase()?;
        Ok(self
            .theta
            .iter()
            .zip(self.edge_lengths())
            .map(|(&t, l)| {
                let s = (t - phi).sin();
                s * s * l
            })
            .sum())
    }

    /// `sum_k cos(theta_k - phi) a_k b_k l_k` for per-edge samples `a`, `b`.
    pub fn weighted_metric(&self, a: &[T], b: &[T]) -> Result<T> {
        let n = self.len();
        for v in [a, b] {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        let phi = self.average_phase()?;
        Ok(self
            .theta
            .iter()
            .zip(self.edge_lengths())
            .zip(a.iter().zip(b))
            .map(|((&t, l), (&x, &y))| (t - phi).cos() * (x * y) * l)
            .sum())
    }

    /// The same curve with grading shifted by `m`: odd shifts reverse the
    /// orientation, and the lift moves by `m pi`.
    pub fn shift_grading(&self, m: i64) -> Self {
        let shift = T::PI() * T::of_int(m);
        if m.rem_euclid(2) == 0 {
            let mut c = self.clone();
            c.add_to_lift(shift);
            return c;
        }
        let n = self.len() as i64;
        // Reversed traversal starting at x_N = x_0 + tau; reversed edge k is old edge N-1-k.
        let vertices: Vec<_> = (0..n).map(|k| self.vertex(n - k)).collect();
        let theta: Vec<_> = (0..n as usize)
            .map(|k| self.theta[n as usize - 1 - k] + shift)
            .collect();
        DiscreteCurve {
            vertices,
            closure: [-self.closure[0], -self.closure[1]],
            theta,
            holonomy: self.holonomy,
            geometry: self.geometry,
        }
    }

    /// Uniform arclength resampling with `n` vertices; vertex 0 is kept and the
    /// lift stays on the same sheet.
    pub fn resample(&self, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        let lengths = self.edge_lengths();
        let total: T = lengths.iter().copied().sum();
        let step = total / T::of_int(n as i64);
        let mut out = Vec::with_capacity(n);
        out.push(self.vertices[0]);
        let mut edge = 0usize;
        let mut walked = T::zero();
        for j in 1..n {
            let target = step * T::of_int(j as i64);
            while edge + 1 < lengths.len() && walked + lengths[edge] < target {
                walked += lengths[edge];
                edge += 1;
            }
            let f = ((target - walked) / lengths[edge]).min(T::one()).max(T::zero());
            out.push(self.vertex(edge as i64).lerp(self.vertex(edge as i64 + 1), f));
        }
        let c = Self::with_lift_near(out, self.closure, self.geometry, self.theta[0])?;
        Ok(c.with_holonomy(self.holonomy))
    }

    /// True when the curve has no transverse self-crossing on the torus.
    pub fn is_embedded(&self) -> bool {
        matches!(crossing::crossings(self, self, true), Ok(v) if v.is_empty())
    }
}

/// Signed symplectic area swept from `a` to `b` along the straight-line
/// interpolation, evaluated on the fundamental loop.
///
/// Both curves must share the closure class. The base points `a_0`, `b_0`
/// are joined by a segment; this equals the sum of the vertexwise bilinear
/// quadrilaterals when the two curves correspond vertex by vertex.
pub fn swept_area<T: Real>(a: &DiscreteCurve<T>, b: &DiscreteCurve<T>) -> Result<T> {
    if a.closure != b.closure {
        return Err(Error::CorrespondenceMismatch {
            step: 0,
            reason: format!("closure {:?} vs {:?}", a.closure, b.closure),
        });
    }
    let origin = a.vertices[0];
    let tau = a.translation();
    let shoelace = |c: &DiscreteCurve<T>| -> T {
        let n = c.len() as i64;
        (0..n)
            .map(|k| (c.vertex(k) - origin).cross(c.vertex(k + 1) - origin))
            .sum()
    };
    let half = T::lit(0.5);
    Ok(half * (shoelace(a) - shoelace(b) + tau.cross(b.vertices[0] - origin)))
}

/// Flux of a discrete isotopy: total signed area swept by the fundamental
/// loop. Consecutive curves must share vertex count and closure.
pub fn flux<T: Real>(history: &[DiscreteCurve<T>]) -> Result<T> {
    let mut total = T::zero();
    for (step, pair) in history.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        if a.len() != b.len() {
            return Err(Error::CorrespondenceMismatch {
                step,
                reason: format!("vertex count {} vs {}", a.len(), b.len()),
            });
        }
        if a.closure != b.closure {
            return Err(Error::CorrespondenceMismatch {
                step,
                reason: format!("closure {:?} vs {:?}", a.closure, b.closure),
            });
        }
        total += swept_area(a, b)?;
    }
    Ok(total)
}

/// Wire form of a curve: `{"vertices", "closure", "holonomy", "geometry"}`.
///
/// `lift_sheet` selects a non-canonical grading and is omitted when zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CurveJson<T> {
    pub vertices: Vec<[T; 2]>,
    pub closure: [i64; 2],
    #[serde(default)]
    pub holonomy: Option<T>,
    #[serde(default)]
    pub geometry: TorusCY<T>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub lift_sheet: i64,
}

fn is_zero(x: &i64) -> bool {
    *x == 0
}

impl<T: Real> TryFrom<CurveJson<T>> for DiscreteCurve<T> {
    type Error = Error;
    fn try_from(j: CurveJson<T>) -> Result<Self> {
        let vertices = j.vertices.into_iter().map(Vec2::from).collect();
        Ok(DiscreteCurve::with_sheet(vertices, j.closure, j.geometry, j.lift_sheet)?
            .with_holonomy(j.holonomy))
    }
}

impl<T: Real> From<&DiscreteCurve<T>> for CurveJson<T> {
    fn from(c: &DiscreteCurve<T>) -> Self {
        CurveJson {
            vertices: c.vertices.iter().map(|&v| v.into()).collect(),
            closure: c.closure,
            holonomy: c.holonomy,
            geometry: c.geometry,
            lift_sheet: c.lift_sheet(),
        }
    }
}

impl<T: Real> Serialize for DiscreteCurve<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CurveJson::from(self).serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for DiscreteCurve<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CurveJson::<T>::deserialize(d)?;
        DiscreteCurve::try_from(j).map_err(serde::de::Error::custom)
    }
}
