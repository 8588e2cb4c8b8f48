//! The four-valued decoding alphabet `{0, 1, ε, η}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A hard decoding symbol: a known bit, an erasure `ε`, or a conflict `η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErasureSymbol {
    Zero,
    One,
    Erasure,
    Conflict,
}

use ErasureSymbol::*;

impl ErasureSymbol {
    pub const ALL: [ErasureSymbol; 4] = [Zero, One, Erasure, Conflict];

    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            Zero
        } else {
            One
        }
    }

    /// The bit value for `0`/`1`, otherwise `None`.
    pub fn bit(self) -> Option<u8> {
        match self {
            Zero => Some(0),
            One => Some(1),
            _ => None,
        }
    }

    pub fn is_concrete(self) -> bool {
        matches!(self, Zero | One)
    }

    pub fn is_erasure(self) -> bool {
        self == Erasure
    }

    pub fn is_conflict(self) -> bool {
        self == Conflict
    }

    /// Sum of two symbols: `η` absorbs, then `ε`, otherwise the GF(2) sum.
    #[inline]
    pub fn box_plus(self, other: Self) -> Self {
        match (self, other) {
            (Conflict, _) | (_, Conflict) => Conflict,
            (Erasure, _) | (_, Erasure) => Erasure,
            (a, b) => Self::from_bit(a.bit().unwrap() ^ b.bit().unwrap()),
        }
    }

    /// Agreement of two estimates of the same bit. Two different known bits
    /// give `η`; an erasure defers to the other side.
    #[inline]
    pub fn box_dot(self, other: Self) -> Self {
        match (self, other) {
            (Conflict, _) | (_, Conflict) => Conflict,
            (Erasure, b) => b,
            (a, Erasure) => a,
            (a, b) if a == b => a,
            _ => Conflict,
        }
    }

    /// `self ⊞ bit`, used with known partial sums.
    #[inline]
    pub fn plus_bit(self, bit: u8) -> Self {
        match self {
            Zero | One => Self::from_bit(self.bit().unwrap() ^ bit),
            other => other,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Zero => '0',
            One => '1',
            Erasure => 'e',
            Conflict => '!',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Zero),
            '1' => Some(One),
            'e' | 'ε' => Some(Erasure),
            '!' | 'η' => Some(Conflict),
            _ => None,
        }
    }
}

impl fmt::Display for ErasureSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for ErasureSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut chars = s.chars();
        match (chars.next().and_then(Self::from_char), chars.next()) {
            (Some(sym), None) => Ok(sym),
            _ => Err(Error::Parse(format!("not a decoding symbol: {s:?}"))),
        }
    }
}

/// Renders a symbol sequence as a compact string such as `"01e!"`.
pub fn render(symbols: &[ErasureSymbol]) -> String {
    symbols.iter().map(|s| s.as_char()).collect()
}

/// Parses a compact symbol string; whitespace is ignored.
pub fn parse_symbols(text: &str) -> Result<Vec<ErasureSymbol>, Error> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            ErasureSymbol::from_char(c)
                .ok_or_else(|| Error::Parse(format!("not a decoding symbol: {c:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_plus_table() {
        assert_eq!(One.box_plus(One), Zero);
        assert_eq!(One.box_plus(Zero), One);
        assert_eq!(Erasure.box_plus(Zero), Erasure);
        assert_eq!(Conflict.box_plus(Erasure), Conflict);
        assert_eq!(Erasure.box_plus(Erasure), Erasure);
    }

    #[test]
    fn box_dot_table() {
        assert_eq!(Zero.box_dot(One), Conflict);
        assert_eq!(Erasure.box_dot(One), One);
        assert_eq!(Zero.box_dot(Erasure), Zero);
        assert_eq!(Erasure.box_dot(Erasure), Erasure);
        assert_eq!(One.box_dot(One), One);
        assert_eq!(Conflict.box_dot(Erasure), Conflict);
    }

    #[test]
    fn commutative_and_absorbing() {
        for a in ErasureSymbol::ALL {
            assert_eq!(Conflict.box_plus(a), Conflict);
            assert_eq!(Conflict.box_dot(a), Conflict);
            for b in ErasureSymbol::ALL {
                assert_eq!(a.box_plus(b), b.box_plus(a));
                assert_eq!(a.box_dot(b), b.box_dot(a));
            }
        }
    }

    #[test]
    fn identities() {
        for a in [Zero, One, Erasure] {
            assert_eq!(Erasure.box_dot(a), a);
        }
        for a in [Zero, One] {
            assert_eq!(Zero.box_plus(a), a);
        }
    }

    #[test]
    fn associative() {
        for a in ErasureSymbol::ALL {
            for b in ErasureSymbol::ALL {
                for c in ErasureSymbol::ALL {
                    assert_eq!(a.box_plus(b).box_plus(c), a.box_plus(b.box_plus(c)));
                    assert_eq!(a.box_dot(b).box_dot(c), a.box_dot(b.box_dot(c)));
                }
            }
        }
    }

    #[test]
    fn plus_bit_matches_box_plus() {
        for a in ErasureSymbol::ALL {
            for bit in 0..2 {
                assert_eq!(a.plus_bit(bit), a.box_plus(ErasureSymbol::from_bit(bit)));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let syms = vec![Zero, One, Erasure, Conflict];
        assert_eq!(render(&syms), "01e!");
        assert_eq!(parse_symbols("0 1 e !").unwrap(), syms);
        assert_eq!("e".parse::<ErasureSymbol>().unwrap(), Erasure);
        assert!("x".parse::<ErasureSymbol>().is_err());
        assert!("01".parse::<ErasureSymbol>().is_err());
    }
}
