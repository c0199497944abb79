//! Colored tensor words `V^{ε_1} ⊗ ⋯ ⊗ V^{ε_k}`.
//!
//! Text format: `u` is a copy of the fundamental representation `V`, `U` a
//! copy of its dual `V*`. The empty string is the trivial representation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid letter {letter:?} at position {position} (expected 'u' or 'U')")]
    InvalidLetter { position: usize, letter: char },
    #[error("dimension must be at least 1")]
    ZeroDimension,
}

/// One tensorand: `V` (plain) or `V*` (star).
///
/// `Plain < Star`; word enumeration and report ordering rely on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Plain,
    Star,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Plain => Color::Star,
            Color::Star => Color::Plain,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Plain => 'u',
            Color::Star => 'U',
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColoredWord(Vec<Color>);

impl ColoredWord {
    pub fn new(letters: Vec<Color>) -> Self {
        ColoredWord(letters)
    }

    pub fn empty() -> Self {
        ColoredWord(Vec::new())
    }

    /// `k` plain letters; the convention for self-dual representations.
    pub fn uncolored(k: usize) -> Self {
        ColoredWord(vec![Color::Plain; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Color] {
        &self.0
    }

    pub fn get(&self, pos: usize) -> Option<Color> {
        self.0.get(pos).copied()
    }

    /// `#Plain − #Star`.
    pub fn balance(&self) -> i64 {
        self.0
            .iter()
            .map(|c| match c {
                Color::Plain => 1,
                Color::Star => -1,
            })
            .sum()
    }

    /// The letters at `positions` (0-based), in order.
    pub fn subword(&self, positions: impl IntoIterator<Item = usize>) -> ColoredWord {
        ColoredWord(positions.into_iter().map(|p| self.0[p]).collect())
    }

    pub fn concat(&self, other: &ColoredWord) -> ColoredWord {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        ColoredWord(letters)
    }

    /// All `2^len` colorings of length `len`, in lexicographic order with
    /// `Plain < Star`.
    pub fn all_of_length(len: usize) -> Vec<ColoredWord> {
        assert!(len < usize::BITS as usize);
        (0..1usize << len)
            .map(|mask| {
                ColoredWord(
                    (0..len)
                        .map(|i| {
                            if mask >> (len - 1 - i) & 1 == 1 {
                                Color::Star
                            } else {
                                Color::Plain
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }
}

/// Reverse the word and flip every color: `(V^{w})^* ≅ V^{conjugate(w)}`.
pub fn conjugate_word(w: &ColoredWord) -> ColoredWord {
    ColoredWord(w.0.iter().rev().map(|c| c.flip()).collect())
}

/// The word whose fixed vectors are `Hom(V^{source}, V^{target})`, by rigidity.
pub fn hom_word(source: &ColoredWord, target: &ColoredWord) -> ColoredWord {
    conjugate_word(source).concat(target)
}

pub fn parse_word(s: &str) -> Result<ColoredWord, WordError> {
    s.chars()
        .enumerate()
        .map(|(i, ch)| match ch {
            'u' => Ok(Color::Plain),
            'U' => Ok(Color::Star),
            letter => Err(WordError::InvalidLetter {
                position: i + 1,
                letter,
            }),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(ColoredWord)
}

impl FromStr for ColoredWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

impl fmt::Display for ColoredWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{}", c.letter())?;
        }
        Ok(())
    }
}

impl Serialize for ColoredWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ColoredWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_word(&s).map_err(serde::de::Error::custom)
    }
}

/// Size `N` of the fundamental representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self, WordError> {
        if n == 0 {
            Err(WordError::ZeroDimension)
        } else {
            Ok(Dimension(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    /// `N − 1`, if it is still a valid dimension.
    pub fn lower(self) -> Option<Dimension> {
        (self.0 > 1).then(|| Dimension(self.0 - 1))
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> ColoredWord {
        s.parse().unwrap()
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate_word(&w("")), w(""));
        assert_eq!(conjugate_word(&w("u")), w("U"));
        assert_eq!(conjugate_word(&w("uUu")), w("UuU"));
    }

    #[test]
    fn parse_examples() {
        assert_eq!(w("uU").letters(), &[Color::Plain, Color::Star]);
        assert!(w("").is_empty());
        assert_eq!(
            parse_word("uz"),
            Err(WordError::InvalidLetter {
                position: 2,
                letter: 'z'
            })
        );
    }

    #[test]
    fn conjugation_is_involutive_up_to_length_10() {
        for len in 0..=10 {
            for word in ColoredWord::all_of_length(len) {
                let bar = conjugate_word(&word);
                assert_eq!(conjugate_word(&bar), word);
                assert_eq!(bar.balance(), -word.balance());
            }
        }
    }

    #[test]
    fn enumeration_order_puts_plain_first() {
        let words: Vec<String> = ColoredWord::all_of_length(2)
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(words, ["uu", "uU", "Uu", "UU"]);
    }

    #[test]
    fn hom_word_uses_conjugate_source() {
        assert_eq!(hom_word(&w("uu"), &w("uU")), w("UUuU"));
    }

    #[test]
    fn dimension_rejects_zero() {
        assert!(Dimension::new(0).is_err());
        assert_eq!(Dimension::new(3).unwrap().lower(), Some(Dimension(2)));
        assert_eq!(Dimension::new(1).unwrap().lower(), None);
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(s in "[uU]{0,16}") {
            prop_assert_eq!(w(&s).to_string(), s);
        }
    }
}
