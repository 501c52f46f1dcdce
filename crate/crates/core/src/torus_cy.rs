//! Flat Calabi-Yau structure on `T^2 = R^2 / Lambda`.
//!
//! The holomorphic volume form is `e^{-i alpha} (dx + i dy)` and the symplectic
//! form is the standard area form `dx ^ dy`. Homology classes are integer
//! vectors `(p, q)` in the basis of the two lattice translations; a graded class
//! additionally fixes which lift of its argument to `R` is the phase.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec2::Vec2;

/// Lattice basis and rotation angle of the holomorphic 1-form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryJson<T>", into = "GeometryJson<T>", bound = "T: Real")]
pub struct TorusCY<T> {
    basis: [Vec2<T>; 2],
    alpha: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct GeometryJson<T> {
    basis: [[T; 2]; 2],
    #[serde(default)]
    alpha: T,
}

impl<T: Real> TryFrom<GeometryJson<T>> for TorusCY<T> {
    type Error = Error;
    fn try_from(g: GeometryJson<T>) -> Result<Self> {
        TorusCY::new(g.basis[0].into(), g.basis[1].into(), g.alpha)
    }
}

impl<T: Real> From<TorusCY<T>> for GeometryJson<T> {
    fn from(t: TorusCY<T>) -> Self {
        GeometryJson {
            basis: [t.basis[0].into(), t.basis[1].into()],
            alpha: t.alpha,
        }
    }
}

impl<T: Real> Default for TorusCY<T> {
    fn default() -> Self {
        Self::standard()
    }
}

impl<T: Real> TorusCY<T> {
    pub fn new(b1: Vec2<T>, b2: Vec2<T>, alpha: T) -> Result<Self> {
        let det = b1.cross(b2);
        if !(det > T::zero()) || !alpha.is_finite() {
            return Err(Error::DegenerateBasis(det.to_f64_lossy()));
        }
        Ok(TorusCY {
            basis: [b1, b2],
            alpha,
        })
    }

    /// Unit square lattice, `alpha = 0`.
    pub fn standard() -> Self {
        TorusCY {
            basis: [
                Vec2::new(T::one(), T::zero()),
                Vec2::new(T::zero(), T::one()),
            ],
            alpha: T::zero(),
        }
    }

    pub fn with_alpha(self, alpha: T) -> Self {
        TorusCY { alpha, ..self }
    }

    pub fn basis(&self) -> [Vec2<T>; 2] {
        self.basis
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Area of a fundamental domain.
    pub fn area(&self) -> T {
        self.basis[0].cross(self.basis[1])
    }

    pub fn is_standard(&self) -> bool {
        *self == Self::standard()
    }

    /// Translation `p b1 + q b2` of the class `(p, q)`.
    pub fn translation(&self, class: [i64; 2]) -> Vec2<T> {
        self.basis[0] * T::of_int(class[0]) + self.basis[1] * T::of_int(class[1])
    }

    /// Coordinates of `v` in the lattice basis.
    pub fn lattice_coords(&self, v: Vec2<T>) -> Vec2<T> {
        let [b1, b2] = self.basis;
        let det = b1.cross(b2);
        Vec2::new(v.cross(b2) / det, b1.cross(v) / det)
    }

    /// `Omega(v) = e^{-i alpha} (v_x + i v_y)` for a tangent vector `v`.
    pub fn calibrate(&self, v: Vec2<T>) -> Complex<T> {
        let (s, c) = self.alpha.sin_cos();
        let re = c * v.x + s * v.y;
        let mut im = c * v.y - s * v.x;
        if im == T::zero() {
            im = T::zero();
        }
        Complex::new(re, im)
    }

    /// Pointwise phase of a tangent direction, in `(-pi, pi]`.
    pub fn tangent_phase(&self, v: Vec2<T>) -> T {
        let z = self.calibrate(v);
        z.im.atan2(z.re)
    }
}

/// `integral over the class of Omega`, telescoped: `e^{-i alpha}(p b1 + q b2)`.
///
/// On the unit square lattice this is exactly `e^{-i alpha} (p + i q)`.
pub fn omega_integral<T: Real>(class: [i64; 2], geometry: &TorusCY<T>) -> Result<Complex<T>> {
    if class == [0, 0] {
        return Err(Error::ZeroClass);
    }
    Ok(geometry.calibrate(geometry.translation(class)))
}

/// Slope `tan(phi)`; vertical classes report a signed infinite marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slope<T> {
    Finite(T),
    Infinite { positive: bool },
}

impl<T: Real> Slope<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Slope::Finite(m) => Some(m),
            Slope::Infinite { .. } => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Slope::Finite(m) => m.to_f64_lossy(),
            Slope::Infinite { positive: true } => f64::INFINITY,
            Slope::Infinite { positive: false } => f64::NEG_INFINITY,
        }
    }
}

impl<T: Real> Serialize for Slope<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Slope::Finite(m) => m.serialize(s),
            Slope::Infinite { positive: true } => s.serialize_str("inf"),
            Slope::Infinite { positive: false } => s.serialize_str("-inf"),
        }
    }
}

/// Homology class with a fixed real phase lift (a grading).
///
/// The lift is stored as an integer sheet over the principal argument, so
/// grading shifts are exact and invertible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradedClass<T> {
    p: i64,
    q: i64,
    sheet: i64,
    geometry: TorusCY<T>,
}

/// Wire form `{"p": int, "q": int, "phase_lift": real}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ClassJson<T> {
    pub p: i64,
    pub q: i64,
    pub phase_lift: T,
}

impl<T: Real> GradedClass<T> {
    /// Class with the principal lift, `phase_lift` in `(-pi, pi]`.
    pub fn new(p: i64, q: i64, geometry: TorusCY<T>) -> Result<Self> {
        Self::with_sheet(p, q, 0, geometry)
    }

    /// Class whose lift is the principal argument plus `2 pi sheet`.
    pub fn with_sheet(p: i64, q: i64, sheet: i64, geometry: TorusCY<T>) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::ZeroClass);
        }
        Ok(GradedClass {
            p,
            q,
            sheet,
            geometry,
        })
    }

    /// Class from an explicit lift; fails unless `e^{i lift}` matches the class direction.
    pub fn from_lift(p: i64, q: i64, lift: T, geometry: TorusCY<T>) -> Result<Self> {
        let base = Self::new(p, q, geometry)?;
        let principal = base.principal_phase();
        let k = ((lift - principal) / T::TAU()).round();
        let residual = lift - principal - k * T::TAU();
        if residual.abs() > T::tol(1e-9) * (T::one() + lift.abs()) {
            return Err(Error::InconsistentLift {
                lift: lift.to_f64_lossy(),
                argument: principal.to_f64_lossy(),
            });
        }
        let sheet = k.to_i64().ok_or(Error::InconsistentLift {
            lift: lift.to_f64_lossy(),
            argument: principal.to_f64_lossy(),
        })?;
        Self::with_sheet(p, q, sheet, geometry)
    }

    pub fn from_json(j: ClassJson<T>, geometry: TorusCY<T>) -> Result<Self> {
        Self::from_lift(j.p, j.q, j.phase_lift, geometry)
    }

    pub fn to_json(&self) -> ClassJson<T> {
        ClassJson {
            p: self.p,
            q: self.q,
            phase_lift: self.phase_lift(),
        }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn class(&self) -> [i64; 2] {
        [self.p, self.q]
    }

    pub fn sheet(&self) -> i64 {
        self.sheet
    }

    pub fn geometry(&self) -> &TorusCY<T> {
        &self.geometry
    }

    pub fn omega(&self) -> Complex<T> {
        self.geometry
            .calibrate(self.geometry.translation(self.class()))
    }

    fn principal_phase(&self) -> T {
        let z = self.omega();
        z.im.atan2(z.re)
    }

    pub fn phase_lift(&self) -> T {
        self.principal_phase() + T::TAU() * T::of_int(self.sheet)
    }

    /// `(phi, tan phi)`. The slope is read off `Omega` directly so it is
    /// invariant under `phi -> phi +- pi`.
    pub fn phase_and_slope(&self) -> (T, Slope<T>) {
        let z = self.omega();
        let slope = if z.re.abs() <= T::epsilon() * T::lit(4.0) * z.norm() {
            Slope::Infinite {
                positive: self.phase_lift().sin() > T::zero(),
            }
        } else {
            Slope::Finite(z.im / z.re)
        };
        (self.phase_lift(), slope)
    }

    /// `[m]`: adds `m pi` to the phase; odd shifts reverse orientation.
    pub fn shift_grading(&self, m: i64) -> Self {
        let mut out = GradedClass {
            sheet: self.sheet + m.div_euclid(2),
            ..*self
        };
        if m.rem_euclid(2) == 1 {
            let before = out.principal_phase();
            out.p = -out.p;
            out.q = -out.q;
            if before > T::zero() {
                out.sheet += 1;
            }
        }
        out
    }
}

/// Free-function form of [`GradedClass::phase_and_slope`].
pub fn phase_and_slope<T: Real>(class: &GradedClass<T>) -> (T, Slope<T>) {
    class.phase_and_slope()
}

/// Free-function form of [`GradedClass::shift_grading`].
pub fn shift_grading<T: Real>(class: &GradedClass<T>, m: i64) -> GradedClass<T> {
    class.shift_grading(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn std64() -> TorusCY<f64> {
        TorusCY::standard()
    }

    #[test]
    fn omega_examples() {
        let g = std64();
        assert_eq!(omega_integral([1, 0], &g).unwrap(), Complex::new(1.0, 0.0));
        let z = omega_integral([1, 1], &g).unwrap();
        assert_eq!(z, Complex::new(1.0, 1.0));
        assert_eq!(z.arg(), FRAC_PI_4);
        let z = omega_integral([2, 1], &g).unwrap();
        assert_eq!(z, Complex::new(2.0, 1.0));
        assert_eq!(z.im / z.re, 0.5);
        assert_eq!(omega_integral([0, 0], &g), Err(Error::ZeroClass));
    }

    #[test]
    fn omega_rotated() {
        let g = std64().with_alpha(0.3);
        let z = omega_integral([1, 0], &g).unwrap();
        assert!((z - Complex::from_polar(1.0, -0.3)).norm() < 1e-15);
    }

    #[test]
    fn phase_slope_examples() {
        let g = std64();
        let (phi, mu) = GradedClass::new(1, 1, g).unwrap().phase_and_slope();
        assert_eq!(phi, FRAC_PI_4);
        assert_eq!(mu, Slope::Finite(1.0));

        let (phi, mu) = GradedClass::new(0, 1, g).unwrap().phase_and_slope();
        assert_eq!(phi, FRAC_PI_2);
        assert_eq!(mu, Slope::Infinite { positive: true });

        let rev = GradedClass::from_lift(-1, 0, PI, g).unwrap();
        let (phi, mu) = rev.phase_and_slope();
        assert_eq!(phi, PI);
        assert_eq!(mu.finite().unwrap().abs(), 0.0);
        let (_, mu_fwd) = GradedClass::new(1, 0, g).unwrap().phase_and_slope();
        assert_eq!(mu.finite().unwrap().abs(), mu_fwd.finite().unwrap());
    }

    #[test]
    fn shift_examples() {
        let g = std64();
        let c = GradedClass::new(1, 0, g).unwrap().shift_grading(1);
        assert_eq!(c.class(), [-1, 0]);
        assert_eq!(c.phase_lift(), PI);

        let c = GradedClass::new(1, 1, g).unwrap().shift_grading(2);
        assert_eq!(c.class(), [1, 1]);
        assert!((c.phase_lift() - (FRAC_PI_4 + 2.0 * PI)).abs() < 1e-15);

        let c = GradedClass::new(1, 0, g).unwrap().shift_grading(-2);
        assert_eq!(c.class(), [1, 0]);
        assert_eq!(c.phase_lift(), -2.0 * PI);
    }

    #[test]
    fn inconsistent_lift_rejected() {
        let g = std64();
        assert!(matches!(
            GradedClass::from_lift(1, 0, 1.0, g),
            Err(Error::InconsistentLift { .. })
        ));
        assert_eq!(
            GradedClass::from_lift(1, 0, 4.0 * PI, g).unwrap().sheet(),
            2
        );
    }

    #[test]
    fn degenerate_basis() {
        let r = TorusCY::new(Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0), 0.0);
        assert!(matches!(r, Err(Error::DegenerateBasis(_))));
        let r = TorusCY::new(Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0), 0.0);
        assert!(r.is_err());
    }

    #[test]
    fn geometry_json_roundtrip() {
        let g = TorusCY::new(Vec2::new(1.0, 0.0), Vec2::new(0.5, 2.0), 0.25).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"basis":[[1.0,0.0],[0.5,2.0]],"alpha":0.25}"#);
        let back: TorusCY<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<TorusCY<f64>>(r#"{"basis":[[1,0],[2,0]],"alpha":0}"#).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let g = TorusCY::<f32>::standard();
        let c = GradedClass::new(2, 1, g).unwrap();
        let (phi, mu) = c.phase_and_slope();
        assert!((phi - 0.5f32.atan()).abs() < 1e-6);
        assert_eq!(mu, Slope::Finite(0.5f32));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn omega_additive(p1 in -20i64..20, q1 in -20i64..20, p2 in -20i64..20, q2 in -20i64..20, alpha in -3.0f64..3.0) {
                prop_assume!((p1, q1) != (0, 0) && (p2, q2) != (0, 0) && (p1 + p2, q1 + q2) != (0, 0));
                let g = TorusCY::standard().with_alpha(alpha);
                let a = omega_integral([p1, q1], &g).unwrap();
                let b = omega_integral([p2, q2], &g).unwrap();
                let s = omega_integral([p1 + p2, q1 + q2], &g).unwrap();
                prop_assert!((a + b - s).norm() <= 1e-12 * (1.0 + s.norm()));
                if alpha == 0.0 {
                    prop_assert_eq!(a + b, s);
                }
                prop_assert!((s.norm() - ((p1 + p2) as f64).hypot((q1 + q2) as f64)).abs() < 1e-12);
            }

            #[test]
            fn shift_roundtrip(p in -9i64..9, q in -9i64..9, sheet in -3i64..3, m in -7i64..7) {
                prop_assume!((p, q) != (0, 0));
                let c = GradedClass::with_sheet(p, q, sheet, TorusCY::<f64>::standard()).unwrap();
                prop_assert_eq!(c.shift_grading(m).shift_grading(-m), c);
                let s = c.shift_grading(m);
                prop_assert!((s.phase_lift() - c.phase_lift() - m as f64 * PI).abs() < 1e-12);
            }

            #[test]
            fn even_shift_keeps_slope(p in -9i64..9, q in -9i64..9, m in -4i64..4) {
                prop_assume!((p, q) != (0, 0));
                let c = GradedClass::new(p, q, TorusCY::<f64>::standard()).unwrap();
                let s = c.shift_grading(2 * m);
                let (phi0, mu0) = c.phase_and_slope();
                let (phi1, mu1) = s.phase_and_slope();
                prop_assert_eq!(mu0, mu1);
                prop_assert_eq!(s.sheet() - c.sheet(), m);
                prop_assert!((phi1 - phi0 - 2.0 * PI * m as f64).abs() < 1e-12);
            }
        }
    }
}
