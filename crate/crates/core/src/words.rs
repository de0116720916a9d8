//! Free-group words and elements of a direct product of two free groups.
//!
//! A [`ReducedWord`] is always stored in freely reduced form, so structural
//! equality and hashing coincide with equality in the group. A
//! [`PairElement`] lives in `F_j × F_k`; its two components never interact.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter from alphabet {found} in a word over alphabet {expected}")]
    AlphabetMismatch { expected: u8, found: u8 },
    #[error("generator index {index} out of range for alphabet of rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("unknown generator name {0:?}")]
    UnknownName(String),
    #[error("malformed token {0:?}")]
    BadToken(String),
}

/// Identifies one free factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlphabetId(pub u8);

impl AlphabetId {
    /// The left factor of a [`PairElement`].
    pub const X: AlphabetId = AlphabetId(0);
    /// The right factor of a [`PairElement`].
    pub const Y: AlphabetId = AlphabetId(1);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// A free generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub alphabet: AlphabetId,
    pub index: u16,
    pub sign: Sign,
}

impl Generator {
    pub fn inverse(self) -> Generator {
        Generator {
            sign: self.sign.flip(),
            ..self
        }
    }

    pub fn cancels(self, other: Generator) -> bool {
        self.alphabet == other.alphabet && self.index == other.index && self.sign != other.sign
    }
}

/// A freely reduced word over a single alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    alphabet: AlphabetId,
    letters: Vec<Generator>,
}

impl ReducedWord {
    pub fn identity(alphabet: AlphabetId) -> Self {
        ReducedWord {
            alphabet,
            letters: Vec::new(),
        }
    }

    /// Freely reduces `letters` with a single left-to-right stack pass.
    pub fn reduce(
        alphabet: AlphabetId,
        letters: impl IntoIterator<Item = Generator>,
    ) -> Result<Self, WordError> {
        let mut stack: Vec<Generator> = Vec::new();
        for g in letters {
            if g.alphabet != alphabet {
                return Err(WordError::AlphabetMismatch {
                    expected: alphabet.0,
                    found: g.alphabet.0,
                });
            }
            push_reduced(&mut stack, g);
        }
        Ok(ReducedWord {
            alphabet,
            letters: stack,
        })
    }

    pub fn alphabet(&self) -> AlphabetId {
        self.alphabet
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Generator> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Generator> {
        self.letters.last().copied()
    }

    pub fn multiply(&self, other: &ReducedWord) -> Result<ReducedWord, WordError> {
        if self.alphabet != other.alphabet {
            return Err(WordError::AlphabetMismatch {
                expected: self.alphabet.0,
                found: other.alphabet.0,
            });
        }
        Ok(self.mul_same(other))
    }

    /// Product of two words already known to share an alphabet.
    pub(crate) fn mul_same(&self, other: &ReducedWord) -> ReducedWord {
        debug_assert_eq!(self.alphabet, other.alphabet);
        // Cancellation only happens at the seam.
        let mut cut = 0;
        let (a, b) = (&self.letters, &other.letters);
        while cut < a.len() && cut < b.len() && a[a.len() - 1 - cut].cancels(b[cut]) {
            cut += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * cut);
        letters.extend_from_slice(&a[..a.len() - cut]);
        letters.extend_from_slice(&b[cut..]);
        ReducedWord {
            alphabet: self.alphabet,
            letters,
        }
    }

    pub fn invert(&self) -> ReducedWord {
        ReducedWord {
            alphabet: self.alphabet,
            letters: self.letters.iter().rev().map(|g| g.inverse()).collect(),
        }
    }

    /// Length of `self⁻¹ · other`, the distance between the two in the Cayley graph.
    pub fn distance(&self, other: &ReducedWord) -> usize {
        let common = self
            .letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count();
        self.len() + other.len() - 2 * common
    }
}

fn push_reduced(stack: &mut Vec<Generator>, g: Generator) {
    match stack.last() {
        Some(top) if top.cancels(g) => {
            stack.pop();
        }
        _ => stack.push(g),
    }
}

/// An element of `F_X × F_Y`. The factors commute.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairElement {
    x: ReducedWord,
    y: ReducedWord,
}

impl Default for PairElement {
    fn default() -> Self {
        Self::identity()
    }
}

impl PairElement {
    pub fn identity() -> Self {
        PairElement {
            x: ReducedWord::identity(AlphabetId::X),
            y: ReducedWord::identity(AlphabetId::Y),
        }
    }

    pub fn new(x: ReducedWord, y: ReducedWord) -> Result<Self, WordError> {
        if x.alphabet != AlphabetId::X {
            return Err(WordError::AlphabetMismatch {
                expected: AlphabetId::X.0,
                found: x.alphabet.0,
            });
        }
        if y.alphabet != AlphabetId::Y {
            return Err(WordError::AlphabetMismatch {
                expected: AlphabetId::Y.0,
                found: y.alphabet.0,
            });
        }
        Ok(PairElement { x, y })
    }

    /// Builds an element from a mixed letter sequence; letters are routed to
    /// their factor and reduced there.
    pub fn from_letters(letters: impl IntoIterator<Item = Generator>) -> Result<Self, WordError> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for g in letters {
            match g.alphabet {
                AlphabetId::X => push_reduced(&mut xs, g),
                AlphabetId::Y => push_reduced(&mut ys, g),
                other => {
                    return Err(WordError::AlphabetMismatch {
                        expected: AlphabetId::X.0,
                        found: other.0,
                    })
                }
            }
        }
        Ok(PairElement {
            x: ReducedWord {
                alphabet: AlphabetId::X,
                letters: xs,
            },
            y: ReducedWord {
                alphabet: AlphabetId::Y,
                letters: ys,
            },
        })
    }

    pub fn x_part(&self) -> &ReducedWord {
        &self.x
    }

    pub fn y_part(&self) -> &ReducedWord {
        &self.y
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_identity() && self.y.is_identity()
    }

    /// Total letter count of both components.
    pub fn len(&self) -> usize {
        self.x.len() + self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn mul(&self, other: &PairElement) -> PairElement {
        PairElement {
            x: self.x.mul_same(&other.x),
            y: self.y.mul_same(&other.y),
        }
    }

    pub fn invert(&self) -> PairElement {
        PairElement {
            x: self.x.invert(),
            y: self.y.invert(),
        }
    }
}

/// Generator names for one free factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    id: AlphabetId,
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(id: AlphabetId, names: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Alphabet {
            id,
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn id(&self) -> AlphabetId {
        self.id
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generator(&self, index: usize, sign: Sign) -> Result<Generator, WordError> {
        if index >= self.names.len() {
            return Err(WordError::IndexOutOfRange {
                index,
                rank: self.names.len(),
            });
        }
        Ok(Generator {
            alphabet: self.id,
            index: index as u16,
            sign,
        })
    }

    /// Looks up a generator by bare name (no inverse suffix).
    pub fn by_name(&self, name: &str) -> Option<Generator> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|index| Generator {
                alphabet: self.id,
                index: index as u16,
                sign: Sign::Pos,
            })
    }

    pub fn name(&self, g: Generator) -> Option<&str> {
        if g.alphabet != self.id {
            return None;
        }
        self.names.get(g.index as usize).map(String::as_str)
    }

    /// All `2 · rank` letters, generators before inverses.
    pub fn letters(&self) -> Vec<Generator> {
        let pos = (0..self.rank()).map(|i| Generator {
            alphabet: self.id,
            index: i as u16,
            sign: Sign::Pos,
        });
        let neg = (0..self.rank()).map(|i| Generator {
            alphabet: self.id,
            index: i as u16,
            sign: Sign::Neg,
        });
        pos.chain(neg).collect()
    }

    pub fn parse_word(&self, text: &str) -> Result<ReducedWord, WordError> {
        let letters = text
            .split_whitespace()
            .map(|tok| {
                let (name, sign) = split_token(tok)?;
                let g = self
                    .by_name(name)
                    .ok_or_else(|| WordError::UnknownName(name.to_string()))?;
                Ok(Generator { sign, ..g })
            })
            .collect::<Result<Vec<_>, WordError>>()?;
        ReducedWord::reduce(self.id, letters)
    }

    pub fn format_word(&self, w: &ReducedWord) -> String {
        w.letters()
            .iter()
            .map(|&g| self.format_letter(g))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn format_letter(&self, g: Generator) -> String {
        let name = self.name(g).unwrap_or("?");
        match g.sign {
            Sign::Pos => name.to_string(),
            Sign::Neg => format!("{name}^-1"),
        }
    }
}

fn split_token(tok: &str) -> Result<(&str, Sign), WordError> {
    let (name, sign) = match tok.strip_suffix("^-1") {
        Some(name) => (name, Sign::Neg),
        None => (tok, Sign::Pos),
    };
    if name.is_empty() || name.contains('^') {
        return Err(WordError::BadToken(tok.to_string()));
    }
    Ok((name, sign))
}

/// Naming tables for both factors of a [`PairElement`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairAlphabet {
    pub x: Alphabet,
    pub y: Alphabet,
}

impl PairAlphabet {
    pub fn new(
        x_names: impl IntoIterator<Item = impl Into<String>>,
        y_names: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        PairAlphabet {
            x: Alphabet::new(AlphabetId::X, x_names),
            y: Alphabet::new(AlphabetId::Y, y_names),
        }
    }

    /// The rank-11 × rank-3 naming used by the witness construction:
    /// `s1 … s8, x, 0x, 1x` and `y, 0y, 1y`.
    pub fn standard() -> Self {
        PairAlphabet::new(
            ["s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "x", "0x", "1x"],
            ["y", "0y", "1y"],
        )
    }

    /// Generic naming `a0 … a{j-1}` and `b0 … b{k-1}`.
    pub fn free(rank_x: usize, rank_y: usize) -> Self {
        PairAlphabet::new(
            (0..rank_x).map(|i| format!("a{i}")),
            (0..rank_y).map(|i| format!("b{i}")),
        )
    }

    /// Parses whitespace-separated tokens such as `s2^-1 1x^-1 0y s2`.
    /// Tokens are routed to their factor; the factors commute, so only the
    /// relative order within each factor matters.
    pub fn parse_pair(&self, text: &str) -> Result<PairElement, WordError> {
        let letters = text
            .split_whitespace()
            .map(|tok| {
                let (name, sign) = split_token(tok)?;
                let g = self
                    .x
                    .by_name(name)
                    .or_else(|| self.y.by_name(name))
                    .ok_or_else(|| WordError::UnknownName(name.to_string()))?;
                Ok(Generator { sign, ..g })
            })
            .collect::<Result<Vec<_>, WordError>>()?;
        PairElement::from_letters(letters)
    }

    /// X-tokens then Y-tokens; the identity formats as the empty string.
    pub fn format_pair(&self, p: &PairElement) -> String {
        let xs = self.x.format_word(p.x_part());
        let ys = self.y.format_word(p.y_part());
        match (xs.is_empty(), ys.is_empty()) {
            (true, _) => ys,
            (_, true) => xs,
            _ => format!("{xs} {ys}"),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Pos => "+1",
            Sign::Neg => "-1",
        })
    }
}
