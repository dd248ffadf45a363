//! Free-group words over an ordered alphabet.
//!
//! Letters carry a generator index and a sign; a [`Word`] is always freely
//! reduced and a [`CyclicWord`] is always cyclically reduced and stored in its
//! least rotation. Neither type remembers its alphabet: callers check ranks at
//! the boundaries (parsing, printing, graph building).

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed exponent at byte {0}")]
    MalformedExponent(usize),
    #[error("empty generator name at byte {0}")]
    EmptyName(usize),
    #[error("unbalanced parenthesis at byte {0}")]
    Unbalanced(usize),
    #[error("unexpected character `{0}` at byte {1}")]
    UnexpectedChar(char, usize),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("no image given for generator {0}")]
    MissingImage(u32),
    #[error("generator {gen} out of range for rank {rank}")]
    OutOfRange { gen: u32, rank: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Pos => Sign::Neg,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Neg => -1,
            Sign::Pos => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Pos => '+',
        }
    }
}

/// A generator or its inverse. The derived order is generator index first,
/// then `Neg < Pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: u32,
    pub sign: Sign,
}

impl Letter {
    pub const fn pos(gen: u32) -> Letter {
        Letter { gen, sign: Sign::Pos }
    }

    pub const fn neg(gen: u32) -> Letter {
        Letter { gen, sign: Sign::Neg }
    }

    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, sign: self.sign.flip() }
    }

    pub fn is_pos(self) -> bool {
        self.sign == Sign::Pos
    }

    /// Dense index `2*gen + (sign == Pos)`, used for vertex tables.
    pub fn index(self) -> usize {
        2 * self.gen as usize + usize::from(self.is_pos())
    }

    pub fn from_index(i: usize) -> Letter {
        let gen = (i / 2) as u32;
        if i % 2 == 1 {
            Letter::pos(gen)
        } else {
            Letter::neg(gen)
        }
    }
}

/// Ordered generator names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Alphabet, WordError> {
        if names.is_empty() {
            return Err(WordError::InvalidAlphabet("no generators".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let mut chars = n.chars();
            let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(WordError::InvalidAlphabet(format!(
                    "`{n}` must start with a lowercase ASCII letter followed by ASCII letters, digits or `_`"
                )));
            }
            if !seen.insert(n.to_ascii_lowercase()) {
                return Err(WordError::InvalidAlphabet(format!("duplicate name `{n}`")));
            }
            out.push(n.to_string());
        }
        Ok(Alphabet { names: out })
    }

    /// Parses a comma-separated list such as `x,y` or `x1, x2, x3`.
    pub fn parse_list(list: &str) -> Result<Alphabet, WordError> {
        let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        Alphabet::new(&names)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, gen: u32) -> &str {
        &self.names[gen as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// Copy with generator `gen` removed; later generators shift down by one.
    pub fn without(&self, gen: u32) -> Alphabet {
        let mut names = self.names.clone();
        names.remove(gen as usize);
        Alphabet { names }
    }

    pub fn check(&self, letters: &[Letter]) -> Result<(), WordError> {
        match letters.iter().find(|l| l.gen as usize >= self.rank()) {
            Some(l) => Err(WordError::OutOfRange { gen: l.gen, rank: self.rank() }),
            None => Ok(()),
        }
    }

    /// Vertex label such as `x1+` or `y-`.
    pub fn vertex_name(&self, v: Letter) -> String {
        format!("{}{}", self.name(v.gen), v.sign.symbol())
    }

    pub fn parse_vertex(&self, s: &str) -> Option<Letter> {
        let s = s.trim();
        let (name, sign) = if let Some(n) = s.strip_suffix('+') {
            (n, Sign::Pos)
        } else {
            (s.strip_suffix('-')?, Sign::Neg)
        };
        self.index_of(name).map(|gen| Letter { gen, sign })
    }

    fn token(&self, l: Letter) -> String {
        let name = self.name(l.gen);
        let shown = if l.is_pos() {
            name.to_string()
        } else {
            let mut c = name.chars();
            let first = c.next().map(|f| f.to_ascii_uppercase()).unwrap_or_default();
            format!("{first}{}", c.as_str())
        };
        if name.len() == 1 {
            shown
        } else {
            format!("[{shown}]")
        }
    }

    fn lookup(&self, raw: &str) -> Result<Letter, WordError> {
        let mut chars = raw.chars();
        let first = chars.next().ok_or(WordError::EmptyName(0))?;
        let (name, sign) = if first.is_ascii_uppercase() {
            (format!("{}{}", first.to_ascii_lowercase(), chars.as_str()), Sign::Neg)
        } else {
            (raw.to_string(), Sign::Pos)
        };
        self.index_of(&name)
            .map(|gen| Letter { gen, sign })
            .ok_or_else(|| WordError::UnknownGenerator(raw.to_string()))
    }

    /// Shortest text form of `letters` (no parentheses).
    pub fn format(&self, letters: &[Letter]) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut k = 1;
            while i + k < letters.len() && letters[i + k] == l {
                k += 1;
            }
            let tok = self.token(l);
            let power = format!("{tok}^{k}");
            if k > 1 && power.len() < tok.len() * k {
                out.push_str(&power);
            } else {
                for _ in 0..k {
                    out.push_str(&tok);
                }
            }
            i += k;
        }
        out
    }
}

fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// A freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Word {
        Word(free_reduce(letters))
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn generator(gen: u32) -> Word {
        Word(vec![Letter::pos(gen)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(free_reduce(self.0.iter().chain(other.0.iter()).copied()))
    }

    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn contains_gen(&self, gen: u32) -> bool {
        self.0.iter().any(|l| l.gen == gen)
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        alphabet.format(&self.0)
    }

    /// Splits into `(cyclic core, conjugator)` with `self = c * core * c^-1`.
    pub fn cyclic_reduce(&self) -> (CyclicWord, Word) {
        let l = &self.0;
        let (mut i, mut j) = (0, l.len());
        while j - i >= 2 && l[i] == l[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        let core = &l[i..j];
        let r = least_rotation(core);
        let rotated: Vec<Letter> = core[r..].iter().chain(core[..r].iter()).copied().collect();
        let conj = Word::new(l[..i].iter().chain(core[..r].iter()).copied());
        (CyclicWord(rotated), conj)
    }

    pub fn exponent_vector(&self, rank: usize) -> Result<ExponentVector, WordError> {
        let mut v = vec![0i64; rank];
        for l in &self.0 {
            let slot = v
                .get_mut(l.gen as usize)
                .ok_or(WordError::OutOfRange { gen: l.gen, rank })?;
            *slot += l.sign.as_i64();
        }
        Ok(ExponentVector(v))
    }

    /// Homomorphic image: every generator `g` is replaced by `images[g]`.
    pub fn substitute(&self, images: &[Word]) -> Result<Word, WordError> {
        let mut out: Vec<Letter> = Vec::new();
        for l in &self.0 {
            let img = images.get(l.gen as usize).ok_or(WordError::MissingImage(l.gen))?;
            let push = |out: &mut Vec<Letter>, x: Letter| {
                if out.last() == Some(&x.inverse()) {
                    out.pop();
                } else {
                    out.push(x);
                }
            };
            if l.is_pos() {
                img.0.iter().for_each(|&x| push(&mut out, x));
            } else {
                img.0.iter().rev().for_each(|&x| push(&mut out, x.inverse()));
            }
        }
        Ok(Word(out))
    }

    /// Renumbers generators through `map`; `None` entries must not occur.
    pub fn reindex(&self, map: &[Option<u32>]) -> Option<Word> {
        self.0
            .iter()
            .map(|l| map.get(l.gen as usize).copied().flatten().map(|gen| Letter { gen, sign: l.sign }))
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }
}

/// A cyclically reduced word in least rotation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> CyclicWord {
        Word::new(letters).cyclic_reduce().0
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn invert(&self) -> CyclicWord {
        CyclicWord::new(self.0.iter().rev().map(|l| l.inverse()))
    }

    pub fn contains_gen(&self, gen: u32) -> bool {
        self.0.iter().any(|l| l.gen == gen)
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        alphabet.format(&self.0)
    }

    pub fn substitute(&self, images: &[Word]) -> Result<CyclicWord, WordError> {
        Ok(self.as_word().substitute(images)?.cyclic_reduce().0)
    }

    pub fn reindex(&self, map: &[Option<u32>]) -> Option<CyclicWord> {
        self.as_word().reindex(map).map(|w| w.cyclic_reduce().0)
    }
}

impl From<&Word> for CyclicWord {
    fn from(w: &Word) -> CyclicWord {
        w.cyclic_reduce().0
    }
}

/// Start index of the lexicographically least rotation.
fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        match s[(i + k) % n].cmp(&s[(j + k) % n]) {
            Ordering::Equal => k += 1,
            Ordering::Greater => {
                i += k + 1;
                if i <= j {
                    i = j + 1;
                }
                k = 0;
            }
            Ordering::Less => {
                j += k + 1;
                if j <= i {
                    j = i + 1;
                }
                k = 0;
            }
        }
    }
    i.min(j)
}

/// Signed letter counts, one entry per generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Endomorphism of a free group given by generator images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub images: Vec<Word>,
}

impl Morphism {
    pub fn identity(rank: usize) -> Morphism {
        Morphism { images: (0..rank as u32).map(Word::generator).collect() }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, w)| *w == Word::generator(i as u32))
    }

    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        w.substitute(&self.images)
    }

    pub fn apply_cyclic(&self, w: &CyclicWord) -> Result<CyclicWord, WordError> {
        w.substitute(&self.images)
    }

    /// `self` followed by `next`: `g -> next(self(g))`.
    pub fn then(&self, next: &Morphism) -> Result<Morphism, WordError> {
        let images = self.images.iter().map(|w| next.apply(w)).collect::<Result<_, _>>()?;
        Ok(Morphism { images })
    }

    /// Extends a morphism of a cut factor back to the full rank. `keep[i]` is
    /// the full-rank index of factor generator `i`; generators not listed are
    /// fixed.
    pub fn extend_from_factor(&self, keep: &[u32], full_rank: usize) -> Morphism {
        let mut images: Vec<Word> = (0..full_rank as u32).map(Word::generator).collect();
        let mut map = vec![None; keep.len()];
        for (i, &g) in keep.iter().enumerate() {
            map[i] = Some(g);
        }
        for (i, &g) in keep.iter().enumerate() {
            images[g as usize] = self.images[i].reindex(&map).expect("factor image over factor generators");
        }
        Morphism { images }
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> Vec<(String, String)> {
        self.images
            .iter()
            .enumerate()
            .map(|(i, w)| (alphabet.name(i as u32).to_string(), w.to_text(alphabet)))
            .collect()
    }
}

/// Parses the word text format: `x` / `X`, `[name]` / `[Name]`, `g^k`,
/// `(sub)^k` with `k` possibly negative; whitespace is ignored.
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word, WordError> {
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut pos = 0;
    let letters = parse_seq(&chars, &mut pos, alphabet, false)?;
    if pos < chars.len() {
        return Err(WordError::Unbalanced(chars[pos].0));
    }
    Ok(Word::new(letters))
}

pub fn parse_cyclic(text: &str, alphabet: &Alphabet) -> Result<CyclicWord, WordError> {
    Ok(parse_word(text, alphabet)?.cyclic_reduce().0)
}

fn parse_seq(
    chars: &[(usize, char)],
    pos: &mut usize,
    alphabet: &Alphabet,
    nested: bool,
) -> Result<Vec<Letter>, WordError> {
    let mut out = Vec::new();
    while let Some(&(at, c)) = chars.get(*pos) {
        let atom: Vec<Letter> = match c {
            '(' => {
                *pos += 1;
                let inner = parse_seq(chars, pos, alphabet, true)?;
                match chars.get(*pos) {
                    Some((_, ')')) => *pos += 1,
                    _ => return Err(WordError::Unbalanced(at)),
                }
                inner
            }
            ')' if nested => return Ok(out),
            ')' => return Err(WordError::Unbalanced(at)),
            '[' => {
                let start = *pos + 1;
                let mut end = start;
                while chars.get(end).is_some_and(|&(_, c)| c != ']') {
                    end += 1;
                }
                if end >= chars.len() {
                    return Err(WordError::Unbalanced(at));
                }
                let name: String = chars[start..end].iter().map(|&(_, c)| c).collect();
                if name.is_empty() {
                    return Err(WordError::EmptyName(at));
                }
                *pos = end + 1;
                vec![alphabet.lookup(&name)?]
            }
            c if c.is_ascii_alphabetic() => {
                *pos += 1;
                vec![alphabet.lookup(&c.to_string())?]
            }
            '^' => return Err(WordError::MalformedExponent(at)),
            other => return Err(WordError::UnexpectedChar(other, at)),
        };
        let k = parse_exponent(chars, pos)?;
        let base = Word::new(atom);
        out.extend_from_slice(base.pow(k).letters());
    }
    if nested {
        return Err(WordError::Unbalanced(chars.last().map_or(0, |&(i, _)| i)));
    }
    Ok(out)
}

fn parse_exponent(chars: &[(usize, char)], pos: &mut usize) -> Result<i64, WordError> {
    let Some(&(at, '^')) = chars.get(*pos) else {
        return Ok(1);
    };
    *pos += 1;
    let mut digits = String::new();
    if let Some(&(_, s @ ('-' | '+'))) = chars.get(*pos) {
        digits.push(s);
        *pos += 1;
    }
    while let Some(&(_, d)) = chars.get(*pos) {
        if !d.is_ascii_digit() {
            break;
        }
        digits.push(d);
        *pos += 1;
    }
    digits.parse::<i64>().map_err(|_| WordError::MalformedExponent(at))
}

/// `a * b`, freely reduced.
pub fn concat(a: &Word, b: &Word) -> Word {
    a.concat(b)
}

pub fn invert(w: &Word) -> Word {
    w.invert()
}

pub fn cyclic_reduce(w: &Word) -> (CyclicWord, Word) {
    w.cyclic_reduce()
}

pub fn exponent_vector(w: &Word, alphabet: &Alphabet) -> Result<ExponentVector, WordError> {
    w.exponent_vector(alphabet.rank())
}

pub fn substitute(w: &Word, images: &[Word]) -> Result<Word, WordError> {
    w.substitute(images)
}
