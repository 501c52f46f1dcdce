//! Graded expressions in spherical generators: twists, shifts and ordered
//! connect sums, with a small rewrite system and a phase audit.

use std::fmt;

use num_complex::Complex;
use serde::Serialize;

use super::lattice::PairingLattice;
use crate::error::{Error, Result};
use crate::scalar::{wrap_pi, Real};

/// Generators are 0-based here and printed 1-based (`L1`, `L2`, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradedExpression {
    Leaf { gen: usize, shift: i64 },
    /// Ordered graded connect sum `left # right`.
    Sum(Box<GradedExpression>, Box<GradedExpression>),
    Twist { gen: usize, power: i64, inner: Box<GradedExpression> },
}

use GradedExpression as E;

impl GradedExpression {
    pub fn leaf(gen: usize, shift: i64) -> Self {
        E::Leaf { gen, shift }
    }

    pub fn sum(a: Self, b: Self) -> Self {
        E::Sum(Box::new(a), Box::new(b))
    }

    pub fn twist(gen: usize, power: i64, inner: Self) -> Self {
        E::Twist {
            gen,
            power,
            inner: Box::new(inner),
        }
    }

    /// `self[m]`, pushed down to the leaves.
    pub fn shifted(&self, m: i64) -> Self {
        match self {
            E::Leaf { gen, shift } => E::leaf(*gen, shift + m),
            E::Sum(a, b) => E::sum(a.shifted(m), b.shifted(m)),
            E::Twist { gen, power, inner } => E::twist(*gen, *power, inner.shifted(m)),
        }
    }

    pub fn max_generator(&self) -> usize {
        match self {
            E::Leaf { gen, .. } => *gen,
            E::Sum(a, b) => a.max_generator().max(b.max_generator()),
            E::Twist { gen, inner, .. } => (*gen).max(inner.max_generator()),
        }
    }

    /// Homology class: a leaf `g[m]` contributes `(-1)^m e_g`.
    pub fn class(&self, lattice: &PairingLattice) -> Result<Vec<i64>> {
        match self {
            E::Leaf { gen, shift } => {
                if *gen >= lattice.rank() {
                    return Err(Error::UnknownGenerator(*gen));
                }
                let mut v = vec![0; lattice.rank()];
                v[*gen] = if shift.rem_euclid(2) == 0 { 1 } else { -1 };
                Ok(v)
            }
            E::Sum(a, b) => {
                let (x, y) = (a.class(lattice)?, b.class(lattice)?);
                Ok(x.iter().zip(&y).map(|(p, q)| p + q).collect())
            }
            E::Twist { gen, power, inner } => lattice.twist_power(*gen, *power, &inner.class(lattice)?),
        }
    }

    /// Infix rendering, e.g. `L1[-2] # T_L1^2(L2)`.
    pub fn infix(&self) -> String {
        match self {
            E::Leaf { .. } => self.to_string(),
            E::Sum(a, b) => {
                let side = |e: &E| match e {
                    E::Sum(..) => format!("({})", e.infix()),
                    _ => e.infix(),
                };
                format!("{} # {}", side(a), side(b))
            }
            E::Twist { gen, power, inner } => {
                let p = if *power == 1 { String::new() } else { format!("^{power}") };
                format!("T_L{}{p}({})", gen + 1, inner.infix())
            }
        }
    }
}

impl fmt::Display for GradedExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            E::Leaf { gen, shift: 0 } => write!(f, "L{}", gen + 1),
            E::Leaf { gen, shift } => write!(f, "L{}[{}]", gen + 1, shift),
            E::Sum(a, b) => write!(f, "(sum {a} {b})"),
            E::Twist { gen, power, inner } => write!(f, "(T L{} {} {})", gen + 1, power, inner),
        }
    }
}

impl Serialize for GradedExpression {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

// Parser for the prefix grammar:
//   expr := leaf | (sum expr expr ...) | (T gen int expr) | (shift int expr)
//   leaf := L<k> | L<k>[<int>]
impl std::str::FromStr for GradedExpression {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn atom(&mut self) -> Result<(usize, &str)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected a token"));
        }
        self.pos += len;
        Ok((start, &self.src[start..start + len]))
    }

    fn int(&mut self) -> Result<i64> {
        let (at, tok) = self.atom()?;
        tok.parse().map_err(|_| Error::Parse {
            pos: at,
            msg: format!("expected an integer, got `{tok}`"),
        })
    }

    fn generator(at: usize, tok: &str) -> Result<usize> {
        let bad = || Error::Parse {
            pos: at,
            msg: format!("expected a generator like L1, got `{tok}`"),
        };
        let k: usize = tok.strip_prefix('L').ok_or_else(bad)?.parse().map_err(|_| bad())?;
        k.checked_sub(1).ok_or_else(bad)
    }

    fn leaf(at: usize, tok: &str) -> Result<E> {
        match tok.split_once('[') {
            None => Ok(E::leaf(Self::generator(at, tok)?, 0)),
            Some((g, rest)) => {
                let m = rest
                    .strip_suffix(']')
                    .and_then(|m| m.parse().ok())
                    .ok_or_else(|| Error::Parse {
                        pos: at,
                        msg: format!("bad shift in `{tok}`"),
                    })?;
                Ok(E::leaf(Self::generator(at, g)?, m))
            }
        }
    }

    fn expr(&mut self) -> Result<E> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(')') => Err(self.err("unexpected `)`")),
            Some('(') => {
                self.pos += 1;
                let (at, head) = self.atom()?;
                let e = match head {
                    "sum" | "#" => {
                        let mut acc = self.expr()?;
                        let mut terms = 1;
                        while self.peek().is_some_and(|c| c != ')') {
                            acc = E::sum(acc, self.expr()?);
                            terms += 1;
                        }
                        if terms < 2 {
                            return Err(self.err("sum needs at least two terms"));
                        }
                        acc
                    }
                    "T" => {
                        let (gat, g) = self.atom()?;
                        let gen = Self::generator(gat, g)?;
                        let power = self.int()?;
                        E::twist(gen, power, self.expr()?)
                    }
                    "shift" => {
                        let m = self.int()?;
                        self.expr()?.shifted(m)
                    }
                    other => {
                        return Err(Error::Parse {
                            pos: at,
                            msg: format!("unknown operator `{other}`"),
                        })
                    }
                };
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => {
                let (at, tok) = self.atom()?;
                Self::leaf(at, tok)
            }
        }
    }
}

/// How a twist acting on a sum is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewriteStrategy {
    /// Recognise `a # b` and `b # a[2-n]` as twisted copies of `b` first.
    #[default]
    Contract,
    /// Always push the twist onto both summands.
    Distribute,
}

struct Rewriter<'a> {
    lattice: &'a PairingLattice,
    strategy: RewriteStrategy,
}

impl Rewriter<'_> {
    fn n(&self) -> i64 {
        self.lattice.dimension() as i64
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        if self.lattice.entry(a, b)? != 1 {
            return Err(Error::NotReducible(format!(
                "rules need <L{}, L{}> = 1",
                a + 1,
                b + 1
            )));
        }
        Ok(())
    }

    fn reduce(&self, e: &E) -> Result<E> {
        match e {
            E::Leaf { gen, .. } => {
                if *gen >= self.lattice.rank() {
                    return Err(Error::UnknownGenerator(*gen));
                }
                Ok(e.clone())
            }
            E::Sum(a, b) => Ok(E::sum(self.reduce(a)?, self.reduce(b)?)),
            E::Twist { gen, power, inner } => {
                let r = self.reduce(inner)?;
                self.apply(*gen, *power, r)
            }
        }
    }

    /// `a[m] # b[m]` is `T_a^-1 b[m]`; `b[m] # a[m+2-n]` is `T_a b[m]`.
    fn contract(&self, a: usize, x: &E, y: &E) -> Option<(i64, E)> {
        let (&E::Leaf { gen: g1, shift: m1 }, &E::Leaf { gen: g2, shift: m2 }) = (x, y) else {
            return None;
        };
        let paired = |b: usize| b != a && self.lattice.entry(a, b).ok() == Some(1);
        if g1 == a && paired(g2) && m1 == m2 {
            return Some((-1, E::leaf(g2, m2)));
        }
        if g2 == a && paired(g1) && m2 == m1 + 2 - self.n() {
            return Some((1, E::leaf(g1, m1)));
        }
        None
    }

    fn apply(&self, a: usize, k: i64, r: E) -> Result<E> {
        if !self.lattice.is_spherical(a) {
            return Err(if a >= self.lattice.rank() {
                Error::UnknownGenerator(a)
            } else {
                Error::NonSpherical(a)
            });
        }
        if k == 0 {
            return Ok(r);
        }
        let n = self.n();
        match r {
            E::Leaf { gen, shift } if gen == a => Ok(E::leaf(a, shift + k * (1 - n))),
            E::Leaf { gen: b, shift: m } => {
                self.check_pair(a, b)?;
                Ok(match k {
                    1 => E::sum(E::leaf(b, m), E::leaf(a, m + 2 - n)),
                    -1 => E::sum(E::leaf(a, m), E::leaf(b, m)),
                    _ => E::twist(a, k, E::leaf(b, m)),
                })
            }
            E::Twist { gen, power, inner } if gen == a => self.apply(a, power + k, *inner),
            E::Twist { gen, .. } => Err(Error::NotReducible(format!(
                "T_L{} acting on an unreduced twist in L{}",
                a + 1,
                gen + 1
            ))),
            E::Sum(x, y) => {
                if self.strategy == RewriteStrategy::Contract {
                    if let Some((j, leaf)) = self.contract(a, &x, &y) {
                        return self.apply(a, k + j, leaf);
                    }
                }
                Ok(E::sum(self.apply(a, k, *x)?, self.apply(a, k, *y)?))
            }
        }
    }
}

fn rewriter(lattice: &PairingLattice, strategy: RewriteStrategy) -> Result<Rewriter<'_>> {
    if lattice.dimension() == 3 && lattice_is_opposite(lattice) {
        return Err(Error::NotReducible(
            "graded rules assume the default twist convention".into(),
        ));
    }
    Ok(Rewriter { lattice, strategy })
}

fn lattice_is_opposite(l: &PairingLattice) -> bool {
    // Probe the convention on the first spherical generator paired with something.
    (0..l.rank()).any(|a| {
        (0..l.rank()).any(|b| {
            if !l.is_spherical(a) || l.entry(a, b).ok() != Some(1) {
                return false;
            }
            let mut x = vec![0; l.rank()];
            x[b] = 1;
            l.twist_power(a, 1, &x).map(|v| v[a] == 1).unwrap_or(false)
        })
    })
}

/// Reduce every twist in `expr` to normal form.
pub fn normalize(
    lattice: &PairingLattice,
    expr: &GradedExpression,
    strategy: RewriteStrategy,
) -> Result<GradedExpression> {
    rewriter(lattice, strategy)?.reduce(expr)
}

/// `T_twist^power(expr)` in normal form.
pub fn graded_twist_rewrite(
    lattice: &PairingLattice,
    expr: &GradedExpression,
    twist: usize,
    power: i64,
    strategy: RewriteStrategy,
) -> Result<GradedExpression> {
    normalize(lattice, &E::twist(twist, power, expr.clone()), strategy)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct AuditNode<T> {
    pub expression: String,
    pub left: T,
    pub right: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct PhaseAudit<T> {
    pub phase: T,
    pub nodes: Vec<AuditNode<T>>,
    pub pass: bool,
}

/// Check `phi(left) < phi(right)` at every `#` node, with unit central
/// charges per generator.
pub fn phase_audit<T: Real>(expr: &GradedExpression, phases: &[T], dimension: u32) -> Result<PhaseAudit<T>> {
    let ones = vec![T::one(); phases.len()];
    phase_audit_weighted(expr, phases, &ones, dimension)
}

/// As [`phase_audit`] with explicit charge magnitudes. A leaf `g[m]` has
/// phase `phi_g + m pi`; a sum has the argument of the summed charges,
/// lifted between its summands; `T_a^k` shifts the leaves of `a` by
/// `k (1 - n)` and leaves other phases alone.
pub fn phase_audit_weighted<T: Real>(
    expr: &GradedExpression,
    phases: &[T],
    magnitudes: &[T],
    dimension: u32,
) -> Result<PhaseAudit<T>> {
    if dimension != 2 && dimension != 3 {
        return Err(Error::BadDimension(dimension));
    }
    if magnitudes.len() != phases.len() {
        return Err(Error::LengthMismatch {
            expected: phases.len(),
            got: magnitudes.len(),
        });
    }
    let mut nodes = Vec::new();
    let ctx = AuditCtx {
        phases,
        magnitudes,
        n: dimension as i64,
    };
    let (phase, _) = ctx.walk(expr, &mut vec![0; phases.len()], Some(&mut nodes))?;
    let pass = nodes.iter().all(|n| n.pass);
    Ok(PhaseAudit { phase, nodes, pass })
}

struct AuditCtx<'a, T> {
    phases: &'a [T],
    magnitudes: &'a [T],
    n: i64,
}

impl<T: Real> AuditCtx<'_, T> {
    /// Returns (phase, magnitude); `extra[g]` is the pending shift from
    /// enclosing twists.
    fn walk(
        &self,
        e: &E,
        extra: &mut Vec<i64>,
        mut record: Option<&mut Vec<AuditNode<T>>>,
    ) -> Result<(T, T)> {
        match e {
            E::Leaf { gen, shift } => {
                let phi = *self.phases.get(*gen).ok_or(Error::UnknownGenerator(*gen))?;
                Ok((phi + T::of_int(shift + extra[*gen]) * T::PI(), self.magnitudes[*gen]))
            }
            E::Twist { gen, power, inner } => {
                if *gen >= extra.len() {
                    return Err(Error::UnknownGenerator(*gen));
                }
                let d = power * (1 - self.n);
                extra[*gen] += d;
                let out = self.walk(inner, extra, record);
                extra[*gen] -= d;
                out
            }
            E::Sum(a, b) => {
                let (pl, ml) = self.walk(a, extra, record.as_deref_mut())?;
                let (pr, mr) = self.walk(b, extra, record.as_deref_mut())?;
                let z = Complex::from_polar(ml, pl) + Complex::from_polar(mr, pr);
                let mid = (pl + pr) / T::lit(2.0);
                let phase = if z.norm() > T::zero() {
                    mid + wrap_pi(z.arg() - mid)
                } else {
                    mid
                };
                if let Some(rec) = record {
                    rec.push(AuditNode {
                        expression: e.to_string(),
                        left: pl,
                        right: pr,
                        pass: pl < pr,
                    });
                }
                Ok((phase, z.norm()))
            }
        }
    }
}
