//! Exact arithmetic in `Z/m` for the moduli that occur in the cell tables,
//! together with the 2-primary / 3-primary splitting maps.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("modulus {0} is not admissible")]
    InadmissibleModulus(u32),
    #[error("expected modulus {expected}, found {found}")]
    WrongModulus { expected: u32, found: u32 },
    #[error("moduli {0} and {1} differ")]
    Mismatch(u32, u32),
}

/// A modulus from the closed set {2, 3, 4, 8, 12, 24} and odd powers of three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u32);

impl Modulus {
    pub const TWO: Modulus = Modulus(2);
    pub const THREE: Modulus = Modulus(3);
    pub const FOUR: Modulus = Modulus(4);
    pub const EIGHT: Modulus = Modulus(8);
    pub const TWELVE: Modulus = Modulus(12);
    pub const TWENTY_FOUR: Modulus = Modulus(24);

    pub fn new(m: u32) -> Result<Self, RingError> {
        if is_admissible(m) {
            Ok(Modulus(m))
        } else {
            Err(RingError::InadmissibleModulus(m))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}", self.0)
    }
}

pub fn is_admissible(m: u32) -> bool {
    if matches!(m, 2 | 4 | 8 | 12 | 24) {
        return true;
    }
    let mut p = m;
    if p < 3 {
        return false;
    }
    while p.is_multiple_of(3) {
        p /= 3;
    }
    p == 1
}

/// An element of `Z/m` stored as its least non-negative representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u32,
    modulus: Modulus,
}

impl Residue {
    pub fn new(x: i64, modulus: Modulus) -> Self {
        Residue { value: modulus.reduce(x), modulus }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> Modulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn checked_add(self, other: Residue) -> Result<Residue, RingError> {
        self.same_ring(other)?;
        Ok(Residue::new(self.value as i64 + other.value as i64, self.modulus))
    }

    pub fn checked_mul(self, other: Residue) -> Result<Residue, RingError> {
        self.same_ring(other)?;
        Ok(Residue::new(self.value as i64 * other.value as i64, self.modulus))
    }


    /// Image under the reduction `Z/m -> Z/d`, `d | m`.
    pub fn reduce_to(self, target: Modulus) -> Result<Residue, RingError> {
        if !self.modulus.0.is_multiple_of(target.0) {
            return Err(RingError::Mismatch(self.modulus.0, target.0));
        }
        Ok(Residue::new(self.value as i64, target))
    }

    fn same_ring(self, other: Residue) -> Result<(), RingError> {
        if self.modulus != other.modulus {
            return Err(RingError::Mismatch(self.modulus.0, other.modulus.0));
        }
        Ok(())
    }

    fn expect(self, m: Modulus) -> Result<(), RingError> {
        if self.modulus != m {
            return Err(RingError::WrongModulus { expected: m.0, found: self.modulus.0 });
        }
        Ok(())
    }
}

impl std::ops::Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue::new(-(self.value as i64), self.modulus)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn canonical_residue(x: i64, m: u32) -> Result<Residue, RingError> {
    Ok(Residue::new(x, Modulus::new(m)?))
}

/// `Z/24 -> Z/8 x Z/3`.
pub fn l24_split(v: Residue) -> Result<(Residue, Residue), RingError> {
    v.expect(Modulus::TWENTY_FOUR)?;
    Ok((v.reduce_to(Modulus::EIGHT)?, v.reduce_to(Modulus::THREE)?))
}

/// `Z/8 x Z/3 -> Z/24`, `(a, b) -> 9a + 16b`.
pub fn t8_merge(a: Residue, b: Residue) -> Result<Residue, RingError> {
    a.expect(Modulus::EIGHT)?;
    b.expect(Modulus::THREE)?;
    Ok(Residue::new(9 * a.value as i64 + 16 * b.value as i64, Modulus::TWENTY_FOUR))
}

/// `Z/12 -> Z/4 x Z/3`.
pub fn l12_split(v: Residue) -> Result<(Residue, Residue), RingError> {
    v.expect(Modulus::TWELVE)?;
    Ok((v.reduce_to(Modulus::FOUR)?, v.reduce_to(Modulus::THREE)?))
}

/// `Z/4 x Z/3 -> Z/12`, `(a, b) -> 9a + 4b`.
pub fn t4_merge(a: Residue, b: Residue) -> Result<Residue, RingError> {
    a.expect(Modulus::FOUR)?;
    b.expect(Modulus::THREE)?;
    Ok(Residue::new(9 * a.value as i64 + 4 * b.value as i64, Modulus::TWELVE))
}

/// Least non-negative `u` with `u * x = 1 (mod m)`, if `x` is a unit.
pub fn inverse_mod(x: i64, m: u32) -> Option<u32> {
    let m = m as i64;
    let x = x.rem_euclid(m);
    (1..m).find(|u| (u * x) % m == 1).map(|u| u as u32)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: i64, m: u32) -> Residue {
        canonical_residue(x, m).unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(r(25, 24).value(), 1);
        assert_eq!(r(-1, 12).value(), 11);
        assert_eq!(r(12, 24).value(), 12);
        assert!(canonical_residue(1, 5).is_err());
        assert!(canonical_residue(1, 6).is_err());
        assert!(canonical_residue(1, 27).is_ok());
        assert!(canonical_residue(1, 1).is_err());
    }

    #[test]
    fn split_examples() {
        let (a, b) = l24_split(r(1, 24)).unwrap();
        assert_eq!((a.value(), b.value()), (1, 1));
        let (a, b) = l24_split(r(9, 24)).unwrap();
        assert_eq!((a.value(), b.value()), (1, 0));
        assert_eq!(t8_merge(r(1, 8), r(0, 3)).unwrap().value(), 9);
        assert_eq!(t4_merge(r(1, 4), r(0, 3)).unwrap().value(), 9);
        let (a, b) = l12_split(r(6, 12)).unwrap();
        assert_eq!((a.value(), b.value()), (2, 0));
    }

    #[test]
    fn wrong_moduli_rejected() {
        assert!(l24_split(r(1, 12)).is_err());
        assert!(t8_merge(r(1, 4), r(1, 3)).is_err());
        assert!(l12_split(r(1, 24)).is_err());
        assert!(t4_merge(r(1, 4), r(1, 9)).is_err());
        assert!(r(1, 24).checked_add(r(1, 12)).is_err());
    }

    #[test]
    fn inverses() {
        assert_eq!(inverse_mod(5, 24), Some(5));
        assert_eq!(inverse_mod(2, 24), None);
        assert_eq!(inverse_mod(-1, 3), Some(2));
    }
}
