//! Standard test curves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::DiscreteCurve;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::torus_cy::TorusCY;
use crate::vec2::Vec2;

/// Straight segment in class `closure`, split into `n` equal edges, starting at `base`.
pub fn straight_line<T: Real>(
    closure: [i64; 2],
    n: usize,
    base: Vec2<T>,
    geometry: TorusCY<T>,
) -> Result<DiscreteCurve<T>> {
    if closure == [0, 0] {
        return Err(Error::ZeroClass);
    }
    let tau = geometry.translation(closure);
    let nn = T::of_int(n as i64);
    let vertices = (0..n)
        .map(|k| base + tau * (T::of_int(k as i64) / nn))
        .collect();
    DiscreteCurve::new(vertices, closure, geometry)
}

/// Counterclockwise regular `n`-gon inscribed in a circle, first vertex at angle 0.
pub fn regular_polygon<T: Real>(
    center: Vec2<T>,
    radius: T,
    n: usize,
    geometry: TorusCY<T>,
) -> Result<DiscreteCurve<T>> {
    let nn = T::of_int(n as i64);
    let vertices = (0..n)
        .map(|k| {
            let a = T::TAU() * T::of_int(k as i64) / nn;
            center + Vec2::new(a.cos(), a.sin()) * radius
        })
        .collect();
    DiscreteCurve::new(vertices, [0, 0], geometry)
}

/// Straight line in class `closure` displaced normally by
/// `amplitude * sin(2 pi mode s)`, `s` the fraction of the period.
pub fn sinusoidal_line<T: Real>(
    closure: [i64; 2],
    n: usize,
    amplitude: T,
    mode: u32,
    geometry: TorusCY<T>,
) -> Result<DiscreteCurve<T>> {
    let line = straight_line(closure, n, Vec2::zero(), geometry)?;
    let tau = line.translation();
    let normal = tau.perp() * (T::one() / tau.norm());
    let nn = T::of_int(n as i64);
    let m = T::of_int(mode as i64);
    let vertices = line
        .vertices()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let s = T::of_int(k as i64) / nn;
            v + normal * (amplitude * (T::TAU() * m * s).sin())
        })
        .collect();
    DiscreteCurve::new(vertices, closure, geometry)
}

/// Line in class `closure` with a random smooth normal displacement made of
/// Fourier modes `1..=modes`, total amplitude at most `amplitude`.
/// Deterministic in `seed`.
pub fn perturbed_line<T: Real>(
    closure: [i64; 2],
    n: usize,
    amplitude: T,
    modes: u32,
    seed: u64,
    geometry: TorusCY<T>,
) -> Result<DiscreteCurve<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (0..modes)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let scale: f64 = coeffs.iter().map(|(a, b)| a.abs() + b.abs()).sum::<f64>().max(1.0);
    let line = straight_line(closure, n, Vec2::zero(), geometry)?;
    let tau = line.translation();
    let normal = tau.perp() * (T::one() / tau.norm());
    let vertices = line
        .vertices()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let s = k as f64 / n as f64;
            let h: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, (a, b))| {
                    let w = std::f64::consts::TAU * (j + 1) as f64 * s;
                    a * w.cos() + b * w.sin()
                })
                .sum::<f64>()
                / scale;
            v + normal * (amplitude * T::lit(h))
        })
        .collect();
    DiscreteCurve::new(vertices, closure, geometry)
}
