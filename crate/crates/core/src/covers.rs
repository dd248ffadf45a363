//! Cyclic covers: homomorphisms onto `Z/m`, Schreier transversals and
//! Reidemeister-Schreier rewriting of curves into the kernel.

use thiserror::Error;

use crate::words::{Alphabet, CyclicWord, Letter, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("modulus must be at least 1")]
    BadModulus,
    #[error("weights underdetermined: relator has zero exponent vector")]
    Underdetermined,
    #[error("weights {weights:?} do not map onto Z/{modulus}")]
    NotSurjective { weights: Vec<i64>, modulus: u32 },
    #[error("transversal generator weight {weight} is not invertible mod {modulus}")]
    NotInvertible { weight: i64, modulus: u32 },
    #[error("expected {expected} weights, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("word has coset {0}, so it does not lift to a closed curve")]
    NonzeroCoset(u32),
    #[error("basepoint {basepoint} out of range for modulus {modulus}")]
    BasepointOutOfRange { basepoint: u32, modulus: u32 },
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Integer weight per generator, read mod `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightMap {
    pub weights: Vec<i64>,
    pub modulus: u32,
}

impl WeightMap {
    pub fn new(weights: Vec<i64>, modulus: u32) -> Result<WeightMap, CoverError> {
        if modulus == 0 {
            return Err(CoverError::BadModulus);
        }
        let g = weights.iter().fold(modulus as i64, |g, &w| gcd(g, w));
        if g != 1 {
            return Err(CoverError::NotSurjective { weights, modulus });
        }
        Ok(WeightMap { weights, modulus })
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn letter_weight(&self, l: Letter) -> i64 {
        self.weights[l.gen as usize] * l.sign.as_i64()
    }

    fn shift(&self, coset: u32, by: i64) -> u32 {
        (coset as i64 + by).rem_euclid(self.modulus as i64) as u32
    }
}

/// Primitive weights `(w_x, w_y)` killing the relator's exponent vector, with
/// `w_x > 0` (or `w_y > 0` when `w_x = 0`).
pub fn infer_weights(relator: &CyclicWord, modulus: u32) -> Result<WeightMap, CoverError> {
    let e = relator.as_word().exponent_vector(2)?.0;
    if e[0] == 0 && e[1] == 0 {
        return Err(CoverError::Underdetermined);
    }
    let g = gcd(e[0], e[1]);
    let (mut wx, mut wy) = (e[1] / g, -e[0] / g);
    if wx < 0 || (wx == 0 && wy < 0) {
        wx = -wx;
        wy = -wy;
    }
    WeightMap::new(vec![wx, wy], modulus)
}

/// Weight-sum of `w` mod `m`.
pub fn coset_of(w: &Word, weights: &WeightMap) -> u32 {
    let s: i64 = w.letters().iter().map(|&l| weights.letter_weight(l)).sum();
    s.rem_euclid(weights.modulus as i64) as u32
}

/// Transversal, kernel basis and rewriting table for the kernel of
/// `F -> Z/m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierData {
    pub modulus: u32,
    pub weights: WeightMap,
    pub transversal_gen: u32,
    pub base: Alphabet,
    /// `transversal[c]` is the power of the transversal generator with coset `c`.
    pub transversal: Vec<Word>,
    pub kernel: Alphabet,
    /// `definitions[k]` is kernel generator `k` written in the base alphabet.
    pub definitions: Vec<Word>,
    /// `table[c][g]`: kernel generator emitted by `g+` read at coset `c`,
    /// `None` when the Schreier generator is trivial.
    pub table: Vec<Vec<Option<u32>>>,
}

impl SchreierData {
    pub fn kernel_rank(&self) -> usize {
        self.kernel.rank()
    }

    /// Kernel generator for the positive letter `gen` read at `coset`.
    pub fn generator_at(&self, coset: u32, gen: u32) -> Option<u32> {
        self.table[coset as usize][gen as usize]
    }
}

/// Builds the Schreier data with transversal `t_c = x^k`, `k * w_x = c`.
/// Kernel generators are ordered by base letter, then coset. For rank 2 they
/// are named `a` (the power of the transversal generator) and `w<c>`; for
/// higher rank the other generators are named `<base name><c>`.
pub fn schreier_basis(
    modulus: u32,
    weights: &WeightMap,
    transversal_gen: u32,
    base: &Alphabet,
) -> Result<SchreierData, CoverError> {
    if modulus == 0 {
        return Err(CoverError::BadModulus);
    }
    let weights = WeightMap::new(weights.weights.clone(), modulus)?;
    let r = base.rank();
    if weights.rank() != r {
        return Err(CoverError::RankMismatch { expected: r, got: weights.rank() });
    }
    if transversal_gen as usize >= r {
        return Err(WordError::OutOfRange { gen: transversal_gen, rank: r }.into());
    }
    let wt = weights.weights[transversal_gen as usize];
    let m = modulus as i64;
    let mut transversal = vec![Word::empty(); modulus as usize];
    let mut hit = vec![false; modulus as usize];
    for k in 0..m {
        let c = (k * wt).rem_euclid(m) as usize;
        if hit[c] {
            return Err(CoverError::NotInvertible { weight: wt, modulus });
        }
        hit[c] = true;
        transversal[c] = Word::generator(transversal_gen).pow(k);
    }

    let mut names = Vec::new();
    let mut definitions = Vec::new();
    let mut table = vec![vec![None; r]; modulus as usize];
    for g in 0..r as u32 {
        for c in 0..modulus {
            let s = Letter::pos(g);
            let target = weights.shift(c, weights.letter_weight(s));
            let def = transversal[c as usize]
                .concat(&Word::letter(s))
                .concat(&transversal[target as usize].invert());
            if def.is_empty() {
                continue;
            }
            let name = if g == transversal_gen {
                "a".to_string()
            } else if r == 2 {
                format!("w{c}")
            } else {
                format!("{}{c}", base.name(g))
            };
            table[c as usize][g as usize] = Some(names.len() as u32);
            names.push(name);
            definitions.push(def);
        }
    }
    Ok(SchreierData {
        modulus,
        weights,
        transversal_gen,
        base: base.clone(),
        transversal,
        kernel: Alphabet::new(&names)?,
        definitions,
        table,
    })
}

/// Reidemeister-Schreier rewrite without free reduction.
pub fn rewrite_letters(w: &Word, basepoint: u32, data: &SchreierData) -> Result<Vec<Letter>, CoverError> {
    if basepoint >= data.modulus {
        return Err(CoverError::BasepointOutOfRange { basepoint, modulus: data.modulus });
    }
    data.base.check(w.letters())?;
    let c = coset_of(w, &data.weights);
    if c != 0 {
        return Err(CoverError::NonzeroCoset(c));
    }
    let mut cur = basepoint;
    let mut out = Vec::new();
    for &l in w.letters() {
        let next = data.weights.shift(cur, data.weights.letter_weight(l));
        let (at, inv) = if l.is_pos() { (cur, false) } else { (next, true) };
        if let Some(k) = data.generator_at(at, l.gen) {
            out.push(if inv { Letter::neg(k) } else { Letter::pos(k) });
        }
        cur = next;
    }
    Ok(out)
}

/// Rewrites a coset-0 word, read from `basepoint`, as a kernel word. The
/// result expands to `t_b * w * t_b^-1`.
pub fn rewrite_in_kernel(w: &Word, basepoint: u32, data: &SchreierData) -> Result<Word, CoverError> {
    Ok(Word::new(rewrite_letters(w, basepoint, data)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lifts {
    /// One cyclic word per basepoint, in basepoint order.
    pub words: Vec<CyclicWord>,
    /// Set when two basepoints give the same cyclic word.
    pub period_collapse: bool,
}

pub fn lifts_of(w: &CyclicWord, data: &SchreierData) -> Result<Lifts, CoverError> {
    let base = w.as_word();
    let words = (0..data.modulus)
        .map(|b| rewrite_in_kernel(&base, b, data).map(|k| k.cyclic_reduce().0))
        .collect::<Result<Vec<_>, _>>()?;
    let mut sorted = words.clone();
    sorted.sort();
    sorted.dedup();
    let period_collapse = sorted.len() < words.len();
    Ok(Lifts { words, period_collapse })
}

pub fn expand_to_base(kw: &Word, data: &SchreierData) -> Result<Word, CoverError> {
    Ok(kw.substitute(&data.definitions)?)
}
