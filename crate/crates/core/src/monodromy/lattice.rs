//! Integer pairing lattices and Picard-Lefschetz twists on homology.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Middle homology of an `n`-dimensional fibre spanned by vanishing cycles:
/// symmetric pairing for `n = 2`, antisymmetric for `n = 3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct PairingLattice {
    pairing: Vec<Vec<i64>>,
    dimension: u32,
    /// Use `x + <a, x> a` for the `n = 3` twist instead of `x - <a, x> a`.
    opposite: bool,
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    pairing: Vec<Vec<i64>>,
    dimension: u32,
    #[serde(default)]
    opposite_convention: bool,
}

impl TryFrom<LatticeJson> for PairingLattice {
    type Error = Error;
    fn try_from(j: LatticeJson) -> Result<Self> {
        Ok(PairingLattice::new(j.pairing, j.dimension)?.with_opposite_convention(j.opposite_convention))
    }
}

impl From<PairingLattice> for LatticeJson {
    fn from(l: PairingLattice) -> Self {
        LatticeJson {
            pairing: l.pairing,
            dimension: l.dimension,
            opposite_convention: l.opposite,
        }
    }
}

impl PairingLattice {
    pub fn new(pairing: Vec<Vec<i64>>, dimension: u32) -> Result<Self> {
        if dimension != 2 && dimension != 3 {
            return Err(Error::BadDimension(dimension));
        }
        let k = pairing.len();
        if k == 0 || pairing.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidPairing("matrix must be square and nonempty".into()));
        }
        let sign = if dimension == 2 { 1 } else { -1 };
        for i in 0..k {
            for j in 0..k {
                if pairing[i][j] != sign * pairing[j][i] {
                    let kind = if dimension == 2 { "symmetric" } else { "antisymmetric" };
                    return Err(Error::InvalidPairing(format!(
                        "entry ({i},{j}) breaks the {kind} form required in dimension {dimension}"
                    )));
                }
            }
        }
        Ok(PairingLattice {
            pairing,
            dimension,
            opposite: false,
        })
    }

    /// Two spherical generators meeting once, `<L1, L2> = 1`.
    pub fn two_spheres(dimension: u32) -> Result<Self> {
        Self::chain(2, dimension)
    }

    /// `rank` spherical generators in a chain, `<L_i, L_{i+1}> = 1`.
    pub fn chain(rank: usize, dimension: u32) -> Result<Self> {
        let s = if dimension == 2 { -2 } else { 0 };
        let t = if dimension == 2 { 1 } else { -1 };
        let mut m = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            m[i][i] = s;
            if i + 1 < rank {
                m[i][i + 1] = 1;
                m[i + 1][i] = t;
            }
        }
        Self::new(m, dimension)
    }

    pub fn with_opposite_convention(mut self, on: bool) -> Self {
        self.opposite = on;
        self
    }

    pub fn rank(&self) -> usize {
        self.pairing.len()
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn pairing_matrix(&self) -> &[Vec<i64>] {
        &self.pairing
    }

    /// `<e_i, e_j>`.
    pub fn entry(&self, i: usize, j: usize) -> Result<i64> {
        self.check_gen(i)?;
        self.check_gen(j)?;
        Ok(self.pairing[i][j])
    }

    fn check_gen(&self, a: usize) -> Result<()> {
        if a >= self.rank() {
            Err(Error::UnknownGenerator(a))
        } else {
            Ok(())
        }
    }

    fn check_vec(&self, x: &[i64]) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::LengthMismatch {
                expected: self.rank(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `x^T M y`.
    pub fn pair(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        self.check_vec(x)?;
        self.check_vec(y)?;
        Ok(self
            .pairing
            .iter()
            .zip(x)
            .map(|(row, &xi)| xi * row.iter().zip(y).map(|(&m, &yj)| m * yj).sum::<i64>())
            .sum())
    }

    pub fn is_spherical(&self, a: usize) -> bool {
        let want = if self.dimension == 2 { -2 } else { 0 };
        a < self.rank() && self.pairing[a][a] == want
    }

    /// `<a, x>` and `<x, a>` for generator `a`.
    fn pair_gen(&self, a: usize, x: &[i64]) -> (i64, i64) {
        let ax = self.pairing[a].iter().zip(x).map(|(&m, &v)| m * v).sum();
        let xa = self.pairing.iter().zip(x).map(|(row, &v)| v * row[a]).sum();
        (ax, xa)
    }

    /// `T_a^power x` for any integer power.
    pub fn twist_power(&self, a: usize, power: i64, x: &[i64]) -> Result<Vec<i64>> {
        self.check_gen(a)?;
        self.check_vec(x)?;
        if !self.is_spherical(a) {
            return Err(Error::NonSpherical(a));
        }
        let mut v = x.to_vec();
        if self.dimension == 2 {
            // An involution: only the parity of the power matters.
            if power.rem_euclid(2) == 1 {
                let (_, xa) = self.pair_gen(a, &v);
                v[a] += xa;
            }
            return Ok(v);
        }
        // For n = 3 the twist is a transvection fixing `a` and `<a, .>`,
        // so its powers are linear in the exponent.
        let (ax, _) = self.pair_gen(a, &v);
        let sign = if self.opposite { 1 } else { -1 };
        v[a] += sign * power * ax;
        Ok(v)
    }
}

/// Picard-Lefschetz action of the twist in the spherical generator `a`:
/// `x + <x, a> a` for `n = 2`, `x - <a, x> a` for `n = 3`.
pub fn dehn_twist_homology(lattice: &PairingLattice, a: usize, x: &[i64]) -> Result<Vec<i64>> {
    lattice.twist_power(a, 1, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn surface_twist_examples() {
        let l = PairingLattice::two_spheres(2).unwrap();
        assert_eq!(dehn_twist_homology(&l, 0, &[1, 0]).unwrap(), vec![-1, 0]);
        assert_eq!(dehn_twist_homology(&l, 0, &[0, 1]).unwrap(), vec![1, 1]);
        let once = dehn_twist_homology(&l, 0, &[3, -7]).unwrap();
        assert_eq!(dehn_twist_homology(&l, 0, &once).unwrap(), vec![3, -7]);
    }

    #[test]
    fn threefold_twist_examples() {
        let l = PairingLattice::two_spheres(3).unwrap();
        assert_eq!(l.pair(&[1, 0], &[0, 1]).unwrap(), 1);
        assert_eq!(dehn_twist_homology(&l, 0, &[1, 1]).unwrap(), vec![0, 1]);
        assert_eq!(dehn_twist_homology(&l, 0, &[1, 0]).unwrap(), vec![1, 0]);
        let flipped = l.clone().with_opposite_convention(true);
        assert_eq!(dehn_twist_homology(&flipped, 0, &[1, 1]).unwrap(), vec![2, 1]);
    }

    #[test]
    fn validation() {
        assert_eq!(
            PairingLattice::new(vec![vec![-2]], 4).unwrap_err(),
            Error::BadDimension(4)
        );
        assert!(PairingLattice::new(vec![vec![-2, 1], vec![0, -2]], 2).is_err());
        assert!(PairingLattice::new(vec![vec![0, 1], vec![1, 0]], 3).is_err());
        assert!(PairingLattice::new(vec![vec![0, 1]], 2).is_err());
        let l = PairingLattice::new(vec![vec![-2, 1], vec![1, 4]], 2).unwrap();
        assert_eq!(dehn_twist_homology(&l, 1, &[1, 0]).unwrap_err(), Error::NonSpherical(1));
        assert_eq!(dehn_twist_homology(&l, 2, &[1, 0]).unwrap_err(), Error::UnknownGenerator(2));
        assert!(matches!(
            dehn_twist_homology(&l, 0, &[1, 0, 0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn json_roundtrip() {
        let l = PairingLattice::two_spheres(3).unwrap();
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(serde_json::from_str::<PairingLattice>(&s).unwrap(), l);
        assert!(serde_json::from_str::<PairingLattice>(r#"{"pairing":[[0,1],[1,0]],"dimension":3}"#).is_err());
    }

    fn chain(n: u32) -> PairingLattice {
        PairingLattice::chain(4, n).unwrap()
    }

    proptest! {
        #[test]
        fn surface_twist_is_involution(x in proptest::collection::vec(-1000i64..1000, 4), a in 0usize..4) {
            let l = chain(2);
            let y = dehn_twist_homology(&l, a, &x).unwrap();
            prop_assert_eq!(dehn_twist_homology(&l, a, &y).unwrap(), x.clone());
            // Reflection: preserves the pairing too.
            prop_assert_eq!(l.pair(&y, &y).unwrap(), l.pair(&x, &x).unwrap());
        }

        #[test]
        fn threefold_twist_is_symplectic(x in proptest::collection::vec(-1000i64..1000, 4), y in proptest::collection::vec(-1000i64..1000, 4), a in 0usize..4, k in -5i64..5) {
            let l = chain(3);
            let tx = l.twist_power(a, k, &x).unwrap();
            let ty = l.twist_power(a, k, &y).unwrap();
            prop_assert_eq!(l.pair(&tx, &ty).unwrap(), l.pair(&x, &y).unwrap());
            let mut e = vec![0; 4];
            e[a] = 1;
            prop_assert_eq!(l.twist_power(a, k, &e).unwrap(), e);
            // Powers compose.
            let step = (0..k.abs()).try_fold(x.clone(), |v, _| l.twist_power(a, k.signum(), &v)).unwrap();
            prop_assert_eq!(step, tx);
        }
    }
}
