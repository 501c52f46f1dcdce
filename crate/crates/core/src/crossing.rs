//! Segment crossing search between periodic polygons on the torus.
//!
//! Work happens in lattice coordinates, where deck translations are integer
//! shifts and the intersection parameters are unchanged.

use crate::curves::DiscreteCurve;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Crossing<T> {
    /// Edge of the first curve and parameter along it, in `[0, 1)`.
    pub edge_a: usize,
    pub s: T,
    /// Edge of the second curve and parameter along it, in `[0, 1)`.
    pub edge_b: usize,
    pub u: T,
    /// Lattice shift applied to the second curve's fundamental period.
    pub shift: [i64; 2],
}

struct Segments<T> {
    start: Vec<Vec2<T>>,
    end: Vec<Vec2<T>>,
}

fn segments<T: Real>(c: &DiscreteCurve<T>) -> Segments<T> {
    let g = c.geometry();
    let n = c.len();
    let start: Vec<_> = (0..n).map(|k| g.lattice_coords(c.vertex(k as i64))).collect();
    let end: Vec<_> = (0..n)
        .map(|k| g.lattice_coords(c.vertex(k as i64 + 1)))
        .collect();
    Segments { start, end }
}

fn int_range<T: Real>(lo: T, hi: T) -> std::ops::RangeInclusive<i64> {
    let eps = T::lit(1e-9);
    let a = (lo - eps).ceil().to_i64().unwrap_or(0);
    let b = (hi + eps).floor().to_i64().unwrap_or(-1);
    a..=b
}

/// All proper crossings between `a` and every translate of `b`.
///
/// With `same_curve`, the identical edge and adjacent edges are skipped and
/// each unordered pair is reported once.
pub(crate) fn crossings<T: Real>(
    a: &DiscreteCurve<T>,
    b: &DiscreteCurve<T>,
    same_curve: bool,
) -> Result<Vec<Crossing<T>>> {
    let sa = segments(a);
    let sb = segments(b);
    let na = a.len();
    let nb = b.len();
    let closure = a.closure();
    let mut out = Vec::new();
    for i in 0..na {
        let (a0, a1) = (sa.start[i], sa.end[i]);
        let r = a1 - a0;
        let (ax_lo, ax_hi) = (a0.x.min(a1.x), a0.x.max(a1.x));
        let (ay_lo, ay_hi) = (a0.y.min(a1.y), a0.y.max(a1.y));
        let j_start = if same_curve { i } else { 0 };
        for j in j_start..nb {
            let (b0, b1) = (sb.start[j], sb.end[j]);
            let (bx_lo, bx_hi) = (b0.x.min(b1.x), b0.x.max(b1.x));
            let (by_lo, by_hi) = (b0.y.min(b1.y), b0.y.max(b1.y));
            for m in int_range(ax_lo - bx_hi, ax_hi - bx_lo) {
                for n in int_range(ay_lo - by_hi, ay_hi - by_lo) {
                    if same_curve {
                        if i == j && (m, n) == (0, 0) {
                            continue;
                        }
                        let next = (i + 1) % na;
                        let prev = (i + na - 1) % na;
                        let wrap_fwd = if i == na - 1 { closure } else { [0, 0] };
                        let wrap_back = if i == 0 { [-closure[0], -closure[1]] } else { [0, 0] };
                        if (j == next && [m, n] == wrap_fwd) || (j == prev && [m, n] == wrap_back) {
                            continue;
                        }
                        // i == j with a nonzero shift is counted once from (m, n) > 0.
                        if i == j && (m < 0 || (m == 0 && n < 0)) {
                            continue;
                        }
                    }
                    let shift = Vec2::new(T::of_int(m), T::of_int(n));
                    let c0 = b0 + shift;
                    let d = b1 - b0;
                    let den = r.cross(d);
                    let w = c0 - a0;
                    let scale = r.norm() * d.norm();
                    if den.abs() <= T::tol(1e-13) * scale {
                        if w.cross(r).abs() <= T::tol(1e-13) * r.norm() * (T::one() + w.norm()) {
                            let rr = r.dot(r);
                            let t0 = w.dot(r) / rr;
                            let t1 = (w + d).dot(r) / rr;
                            let (lo, hi) = (t0.min(t1), t0.max(t1));
                            if hi > T::zero() && lo < T::one() {
                                return Err(Error::ParallelIntersection(i, j));
                            }
                        }
                        continue;
                    }
                    let s = w.cross(d) / den;
                    let u = w.cross(r) / den;
                    if s >= T::zero() && s < T::one() && u >= T::zero() && u < T::one() {
                        out.push(Crossing {
                            edge_a: i,
                            s,
                            edge_b: j,
                            u,
                            shift: [m, n],
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}
