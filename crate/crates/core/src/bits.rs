//! Classical bits and bit strings.

use std::fmt;
use std::ops::{BitXor, Index, Not};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Bit {
    #[default]
    Zero,
    One,
}

impl Bit {
    pub const fn from_bool(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }

    pub const fn is_one(self) -> bool {
        matches!(self, Bit::One)
    }

    pub const fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            _ => Err(Error::BitParse(format!("{v} is not a bit"))),
        }
    }

    pub const fn flip(self) -> Self {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }

    pub const fn as_char(self) -> char {
        match self {
            Bit::Zero => '0',
            Bit::One => '1',
        }
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        Bit::from_bool(b)
    }
}

impl Not for Bit {
    type Output = Bit;

    fn not(self) -> Bit {
        self.flip()
    }
}

impl BitXor for Bit {
    type Output = Bit;

    fn bitxor(self, rhs: Bit) -> Bit {
        Bit::from_bool(self != rhs)
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for Bit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        Bit::from_u8(v).map_err(serde::de::Error::custom)
    }
}

/// An ordered string of bits, serialized as text such as `"10110010"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<Bit>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        BitString(Vec::with_capacity(n))
    }

    pub fn zeros(n: usize) -> Self {
        BitString(vec![Bit::Zero; n])
    }

    pub fn push(&mut self, bit: Bit) {
        self.0.push(bit);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|b| b.is_one()).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = Bit> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Bit] {
        &self.0
    }

    pub fn get(&self, k: usize) -> Option<Bit> {
        self.0.get(k).copied()
    }

    pub fn set(&mut self, k: usize, bit: Bit) {
        self.0[k] = bit;
    }

    /// Positions at which `self` and `other` differ. Lengths must match.
    pub fn diff_positions(&self, other: &BitString) -> Vec<usize> {
        assert_eq!(self.len(), other.len(), "bit strings differ in length");
        self.iter()
            .zip(other.iter())
            .enumerate()
            .filter_map(|(k, (a, b))| (a != b).then_some(k))
            .collect()
    }
}

impl Index<usize> for BitString {
    type Output = Bit;

    fn index(&self, k: usize) -> &Bit {
        &self.0[k]
    }
}

impl From<Vec<Bit>> for BitString {
    fn from(v: Vec<Bit>) -> Self {
        BitString(v)
    }
}

impl FromIterator<Bit> for BitString {
    fn from_iter<I: IntoIterator<Item = Bit>>(iter: I) -> Self {
        BitString(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a BitString {
    type Item = Bit;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, Bit>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|b| b.as_char()).collect();
        f.write_str(&s)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Bit::Zero),
                '1' => Ok(Bit::One),
                other => Err(Error::BitParse(format!(
                    "unexpected character {other:?} in {s:?}"
                ))),
            })
            .collect()
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
