//! The symplectic module H: basis letters and the pairing.
//!
//! Letters encode the basis in the order x1 < y1 < x2 < y2 < ... : x_i is
//! `2(i-1)` and y_i is `2(i-1)+1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported genus (letters must fit in four bits).
pub const MAX_GENUS: usize = 8;

pub type Letter = u8;

/// Genus of the surface, at least one.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Genus(usize);

impl Genus {
    pub fn new(g: usize) -> Result<Self> {
        if g == 0 || g > MAX_GENUS {
            return Err(Error::InvalidArgument(format!("genus must be in 1..={MAX_GENUS}, got {g}")));
        }
        Ok(Genus(g))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Rank of H, i.e. `2g`.
    pub fn rank(self) -> usize {
        2 * self.0
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    X,
    Y,
}

/// A symplectic basis vector x_i or y_i (1-based index).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisVector {
    pub kind: Kind,
    pub index: usize,
}

impl BasisVector {
    pub fn x(index: usize) -> Self {
        BasisVector { kind: Kind::X, index }
    }

    pub fn y(index: usize) -> Self {
        BasisVector { kind: Kind::Y, index }
    }

    pub fn letter(self) -> Letter {
        let base = 2 * (self.index as u8 - 1);
        match self.kind {
            Kind::X => base,
            Kind::Y => base + 1,
        }
    }

    pub fn from_letter(l: Letter) -> Self {
        let index = (l / 2) as usize + 1;
        if l % 2 == 0 {
            Self::x(index)
        } else {
            Self::y(index)
        }
    }
}

impl std::fmt::Display for BasisVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let k = match self.kind {
            Kind::X => 'x',
            Kind::Y => 'y',
        };
        write!(f, "{k}{}", self.index)
    }
}

/// The intersection pairing on letters: mu(x_i, y_i) = 1 = -mu(y_i, x_i).
#[inline]
pub fn mu(a: Letter, b: Letter) -> i64 {
    if a >> 1 != b >> 1 || a == b {
        0
    } else if a & 1 == 0 {
        1
    } else {
        -1
    }
}

/// The symplectic partner of a letter: the unique `b` with `mu(a, b) != 0`.
#[inline]
pub fn partner(a: Letter) -> Letter {
    a ^ 1
}

/// Sign `mu(a, partner(a))`.
#[inline]
pub fn partner_sign(a: Letter) -> i64 {
    if a & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Weight of a letter: x_i contributes +e_i, y_i contributes -e_i.
#[inline]
pub fn letter_weight(a: Letter) -> (usize, i32) {
    ((a >> 1) as usize, if a & 1 == 0 { 1 } else { -1 })
}

pub fn parse_letter(s: &str, g: Genus) -> Result<Letter> {
    let bad = || Error::InvalidArgument(format!("bad basis letter {s:?}"));
    let (kind, rest) = s.split_at(1.min(s.len()));
    let index: usize = rest.parse().map_err(|_| bad())?;
    if index == 0 || index > g.get() {
        return Err(bad());
    }
    match kind {
        "x" => Ok(BasisVector::x(index).letter()),
        "y" => Ok(BasisVector::y(index).letter()),
        _ => Err(bad()),
    }
}

pub fn letter_name(l: Letter) -> String {
    BasisVector::from_letter(l).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_conventions() {
        let (x1, y1, x2) = (BasisVector::x(1).letter(), BasisVector::y(1).letter(), BasisVector::x(2).letter());
        assert_eq!(mu(x1, y1), 1);
        assert_eq!(mu(x1, x2), 0);
        assert_eq!(mu(y1, x1), -1);
        assert_eq!(mu(x1, x1), 0);
    }

    #[test]
    fn letters_round_trip() {
        let g = Genus::new(3).unwrap();
        for l in 0..6u8 {
            assert_eq!(parse_letter(&letter_name(l), g).unwrap(), l);
            assert_eq!(mu(l, partner(l)), partner_sign(l));
        }
        assert!(parse_letter("x4", g).is_err());
        assert!(Genus::new(0).is_err());
    }
}
