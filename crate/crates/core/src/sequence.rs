//! Token sequences over a declared alphabet.

use crate::error::{Error, Result};

/// Alphabet of a corpus. Symbols are dense ids in `0..size()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// A, C, G, T mapped to 0..4.
    Dna,
    /// Raw bytes, 0..256.
    Bytes,
    /// Arbitrary integer alphabet.
    Custom(u32),
}

impl Alphabet {
    pub fn size(self) -> u32 {
        match self {
            Alphabet::Dna => 4,
            Alphabet::Bytes => 256,
            Alphabet::Custom(n) => n,
        }
    }

    pub fn name(self) -> String {
        match self {
            Alphabet::Dna => "dna".to_string(),
            Alphabet::Bytes => "bytes".to_string(),
            Alphabet::Custom(n) => format!("custom{n}"),
        }
    }
}

/// A token string with its alphabet size and a corpus identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    id: String,
    tokens: Vec<u32>,
    alphabet_size: u32,
}

impl Sequence {
    /// Builds a sequence, checking every token against the alphabet.
    pub fn new(id: impl Into<String>, tokens: Vec<u32>, alphabet_size: u32) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if let Some((position, &token)) =
            tokens.iter().enumerate().find(|(_, &t)| t >= alphabet_size)
        {
            return Err(Error::TokenOutOfRange {
                token,
                position,
                alphabet_size,
            });
        }
        Ok(Sequence {
            id: id.into(),
            tokens,
            alphabet_size,
        })
    }

    /// Byte sequence over the 256-symbol alphabet.
    pub fn from_bytes(id: impl Into<String>, bytes: &[u8]) -> Self {
        Sequence {
            id: id.into(),
            tokens: bytes.iter().map(|&b| u32::from(b)).collect(),
            alphabet_size: 256,
        }
    }

    /// Lowercase-letter string mapped to the 26-symbol alphabet `a=0 .. z=25`.
    ///
    /// Convenient for small worked examples; rejects anything outside `a..=z`.
    pub fn from_letters(id: impl Into<String>, text: &str) -> Result<Self> {
        let tokens = text
            .bytes()
            .enumerate()
            .map(|(position, b)| {
                if b.is_ascii_lowercase() {
                    Ok(u32::from(b - b'a'))
                } else {
                    Err(Error::TokenOutOfRange {
                        token: u32::from(b),
                        position,
                        alphabet_size: 26,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Sequence {
            id: id.into(),
            tokens,
            alphabet_size: 26,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[u32] {
        &self.tokens
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub(crate) fn check_same_alphabet(a: &Sequence, b: &Sequence) -> Result<()> {
    if a.alphabet_size != b.alphabet_size {
        return Err(Error::AlphabetMismatch {
            left: a.alphabet_size,
            right: b.alphabet_size,
        });
    }
    Ok(())
}
