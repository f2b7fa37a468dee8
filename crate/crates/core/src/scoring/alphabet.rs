use std::fmt;

use crate::error::{Error, Result};

/// Sentinel code for bytes outside the alphabet.
pub const INVALID: u8 = u8::MAX;

/// Letter order used by NCBI matrix files and everything built on this crate.
pub const STANDARD_AMINO_ACIDS: &[u8; 20] = b"ARNDCQEGHILKMFPSTWYV";

/// An ordered residue alphabet. Letters are addressed by their position,
/// called the letter code, throughout the crate.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<u8>,
    lookup: [u8; 256],
}

impl Alphabet {
    pub fn new(letters: &[u8]) -> Result<Alphabet> {
        if letters.is_empty() {
            return Err(Error::Empty("alphabet"));
        }
        if letters.len() >= INVALID as usize {
            return Err(Error::InvalidArgument(format!(
                "alphabet of {} letters is too large",
                letters.len()
            )));
        }
        let mut lookup = [INVALID; 256];
        let mut upper = Vec::with_capacity(letters.len());
        for (i, &b) in letters.iter().enumerate() {
            let b = b.to_ascii_uppercase();
            if !b.is_ascii_graphic() {
                return Err(Error::InvalidArgument(format!("unprintable letter {b:#x}")));
            }
            if lookup[b as usize] != INVALID {
                return Err(Error::DuplicateLetter(b as char));
            }
            lookup[b as usize] = i as u8;
            lookup[b.to_ascii_lowercase() as usize] = i as u8;
            upper.push(b);
        }
        Ok(Alphabet { letters: upper, lookup })
    }

    /// The 20 standard amino acids in NCBI order.
    pub fn protein() -> Alphabet {
        Alphabet::new(STANDARD_AMINO_ACIDS).expect("standard alphabet is valid")
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn letter(&self, code: u8) -> u8 {
        self.letters[code as usize]
    }

    /// Code of `b` (case-insensitive), or `None` for foreign letters.
    #[inline]
    pub fn code(&self, b: u8) -> Option<u8> {
        match self.lookup[b as usize] {
            INVALID => None,
            c => Some(c),
        }
    }

    /// Raw lookup returning [`INVALID`] for foreign letters.
    #[inline]
    pub fn code_or_invalid(&self, b: u8) -> u8 {
        self.lookup[b as usize]
    }

    pub fn encode(&self, text: &[u8]) -> Result<Vec<u8>> {
        text.iter()
            .map(|&b| self.code(b).ok_or(Error::InvalidLetter(b as char)))
            .collect()
    }

    pub fn decode(&self, codes: &[u8]) -> String {
        codes.iter().map(|&c| self.letter(c) as char).collect()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({})", String::from_utf8_lossy(&self.letters))
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::protein()
    }
}
