//! Finitely-described infinite sign sequences ε ∈ {0,1}^ℕ and finite words.
//!
//! The bit ε_k chooses the orientation of the map on the k-th partition
//! interval: 0 keeps the increasing branch, 1 the decreasing one.

use std::fmt;

use crate::error::{Error, Result};

/// A finite word over {0,1}, used to index the interval tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<bool>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Word(bits.iter().map(|&b| b != 0).collect())
    }

    /// Parses a string of '0'/'1' characters; the empty string is the empty word.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::Parse(format!("invalid bit `{c}` in word `{s}`"))),
            }
        }
        Ok(Word(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The word extended by one bit.
    pub fn child(&self, bit: bool) -> Word {
        let mut bits = self.0.clone();
        bits.push(bit);
        Word(bits)
    }

    /// All 2^len words of a given length, in lexicographic order.
    pub fn all_of_len(len: u32) -> impl Iterator<Item = Word> {
        assert!(len <= 30, "word enumeration capped at length 30");
        (0u64..(1u64 << len))
            .map(move |code| Word((0..len).map(|i| (code >> (len - 1 - i)) & 1 == 1).collect()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Tail behaviour of a sign sequence after its finite prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignTail {
    AllZero,
    AllOne,
    /// Nonempty word repeated forever.
    Periodic(Vec<bool>),
}

impl SignTail {
    pub fn period(&self) -> u64 {
        match self {
            SignTail::AllZero | SignTail::AllOne => 1,
            SignTail::Periodic(w) => w.len() as u64,
        }
    }

    fn bit(&self, offset: u64) -> bool {
        match self {
            SignTail::AllZero => false,
            SignTail::AllOne => true,
            SignTail::Periodic(w) => w[(offset % w.len() as u64) as usize],
        }
    }

    /// Bits that occur infinitely often.
    pub fn bits_present(&self) -> (bool, bool) {
        match self {
            SignTail::AllZero => (true, false),
            SignTail::AllOne => (false, true),
            SignTail::Periodic(w) => (w.contains(&false), w.contains(&true)),
        }
    }
}

/// A sign sequence given by a finite prefix followed by an eventually
/// constant or periodic tail. ε_k is defined for every k ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSpec {
    prefix: Vec<bool>,
    tail: SignTail,
}

impl SignSpec {
    pub fn all_zero() -> Self {
        SignSpec { prefix: Vec::new(), tail: SignTail::AllZero }
    }

    pub fn all_one() -> Self {
        SignSpec { prefix: Vec::new(), tail: SignTail::AllOne }
    }

    pub fn new(prefix: Vec<bool>, tail: SignTail) -> Result<Self> {
        if let SignTail::Periodic(w) = &tail {
            if w.is_empty() {
                return Err(Error::Parse("periodic tail must be nonempty".into()));
            }
        }
        Ok(SignSpec { prefix, tail })
    }

    pub fn periodic(word: &[bool]) -> Result<Self> {
        Self::new(Vec::new(), SignTail::Periodic(word.to_vec()))
    }

    /// The sequence ω·ε: the word's bits first, then this sequence.
    pub fn prepend(&self, word: &Word) -> SignSpec {
        let mut prefix = word.0.clone();
        prefix.extend_from_slice(&self.prefix);
        SignSpec { prefix, tail: self.tail.clone() }
    }

    /// ε_n for the 1-based interval index n.
    pub fn bit(&self, n: u64) -> bool {
        assert!(n >= 1, "sign indices are 1-based");
        let i = n - 1;
        if (i as usize) < self.prefix.len() {
            self.prefix[i as usize]
        } else {
            self.tail.bit(i - self.prefix.len() as u64)
        }
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn tail(&self) -> &SignTail {
        &self.tail
    }

    /// Smallest index from which the sequence is purely periodic with the
    /// tail's period.
    pub fn periodic_from(&self) -> u64 {
        self.prefix.len() as u64 + 1
    }

    /// Parses the CLI syntax:
    /// `all-zero | all-one | period:BITS | prefix:BITS,tail:(all-zero|all-one|period:BITS)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "all-zero" => return Ok(Self::all_zero()),
            "all-one" => return Ok(Self::all_one()),
            _ => {}
        }
        if let Some(word) = s.strip_prefix("period:") {
            let w = Word::parse(word)?;
            return Self::new(Vec::new(), SignTail::Periodic(w.0));
        }
        if let Some(rest) = s.strip_prefix("prefix:") {
            let (word, tail) = rest
                .split_once(",tail:")
                .ok_or_else(|| Error::Parse(format!("expected `,tail:` in `{s}`")))?;
            let prefix = Word::parse(word)?.0;
            let tail = match tail {
                "all-zero" => SignTail::AllZero,
                "all-one" => SignTail::AllOne,
                t => {
                    let word = t.strip_prefix("period:").ok_or_else(|| {
                        Error::Parse(format!(
                            "unknown tail `{t}` (want all-zero|all-one|period:BITS)"
                        ))
                    })?;
                    SignTail::Periodic(Word::parse(word)?.0)
                }
            };
            return Self::new(prefix, tail);
        }
        Err(Error::Parse(format!(
            "unknown sign sequence `{s}` (want all-zero|all-one|period:BITS|prefix:BITS,tail:...)"
        )))
    }
}

impl fmt::Display for SignSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            write!(f, "prefix:{},tail:", Word(self.prefix.clone()))?;
        }
        match &self.tail {
            SignTail::AllZero => write!(f, "all-zero"),
            SignTail::AllOne => write!(f, "all-one"),
            SignTail::Periodic(w) => write!(f, "period:{}", Word(w.clone())),
        }
    }
}
