//! Splitting descriptions for two-generator knot exteriors, slope curves,
//! cover lifting of the disk system, weak reductions and free-factor cuts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covers::{self, CoverError, Lifts, SchreierData, WeightMap};
use crate::whitehead::{self, TraceStep, Verdict, WhiteheadError, Witness};
use crate::words::{parse_cyclic, parse_word, Alphabet, CyclicWord, Morphism, Word, WordError};

pub const DEFAULT_WEAK_BOUND: usize = 5_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Whitehead(#[from] WhiteheadError),
    #[error("invalid splitting: {0}")]
    Invalid(String),
    #[error("spec file: {0}")]
    Json(String),
    #[error("family parameter n must be at least 1")]
    BadN,
    #[error("invalid slope: {0}")]
    InvalidSlope(String),
    #[error("slope numerator {p} is not divisible by {m}")]
    NotDivisible { p: i64, m: u32 },
    #[error("empty disk system")]
    EmptyInput,
    #[error("cannot cut along generator {0}: a word still uses it")]
    CutInvalid(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Twist,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    pub name: FamilyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingSpec {
    pub alphabet: Alphabet,
    pub relator: CyclicWord,
    pub longitude: Word,
    pub meridian: u32,
    pub family: Option<Family>,
    pub weights: Option<Vec<i64>>,
}

/// On-disk form of a [`SplittingSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub generators: Vec<String>,
    pub relator: String,
    pub longitude: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meridian: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
}

impl SplittingSpec {
    pub fn from_file(f: &SpecFile) -> Result<SplittingSpec, SplitError> {
        let alphabet = Alphabet::new(&f.generators)?;
        let meridian = match &f.meridian {
            Some(name) => alphabet
                .index_of(name)
                .ok_or_else(|| SplitError::Invalid(format!("meridian `{name}` is not a generator")))?,
            None => 0,
        };
        let spec = SplittingSpec {
            relator: parse_cyclic(&f.relator, &alphabet)?,
            longitude: parse_word(&f.longitude, &alphabet)?,
            alphabet,
            meridian,
            family: f.family.clone(),
            weights: f.weights.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<SplittingSpec, SplitError> {
        let f: SpecFile = serde_json::from_str(text).map_err(|e| SplitError::Json(e.to_string()))?;
        SplittingSpec::from_file(&f)
    }

    pub fn to_file(&self) -> SpecFile {
        SpecFile {
            generators: self.alphabet.names().to_vec(),
            relator: self.relator.to_text(&self.alphabet),
            longitude: self.longitude.to_text(&self.alphabet),
            meridian: Some(self.alphabet.name(self.meridian).to_string()),
            family: self.family.clone(),
            weights: self.weights.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), SplitError> {
        if self.alphabet.rank() != 2 {
            return Err(SplitError::Invalid("splittings are over two generators".into()));
        }
        if !self.longitude.exponent_vector(2)?.is_zero() {
            return Err(SplitError::Invalid("longitude must be null-homologous".into()));
        }
        if let Some(w) = &self.weights {
            if w.len() != 2 {
                return Err(SplitError::Invalid("weights need one entry per generator".into()));
            }
            let e = self.relator.as_word().exponent_vector(2)?.0;
            if e[0] * w[0] + e[1] * w[1] != 0 {
                return Err(SplitError::Invalid("relator has nonzero weight-sum under the given weights".into()));
            }
        }
        if let Some(Family { name: FamilyName::Twist, n }) = &self.family {
            let n = n.ok_or_else(|| SplitError::Invalid("twist family needs n".into()))?;
            let t = twist_family(n)?;
            if t.relator != self.relator || t.longitude != self.longitude {
                return Err(SplitError::Invalid(format!("words do not match the twist family at n = {n}")));
            }
        }
        Ok(())
    }

    pub fn weight_map(&self, m: u32) -> Result<WeightMap, SplitError> {
        match &self.weights {
            Some(w) => Ok(WeightMap::new(w.clone(), m)?),
            None => Ok(covers::infer_weights(&self.relator, m)?),
        }
    }
}

/// Relator `(XY)^(2n-1) X (yx)^(n+1) Y (XY)^(2n-1) (xy)^(n+1)` and longitude
/// `y (xy)^n (XY)^n X YY (XY)^n X (yx)^(n+1) x`.
pub fn twist_family(n: u32) -> Result<SplittingSpec, SplitError> {
    if n < 1 {
        return Err(SplitError::BadN);
    }
    let alphabet = Alphabet::new(&["x", "y"])?;
    let relator = format!("(XY)^{k} X (yx)^{m} Y (XY)^{k} (xy)^{m}", k = 2 * n - 1, m = n + 1);
    let longitude = format!("y (xy)^{n} (XY)^{n} X YY (XY)^{n} X (yx)^{m} x", m = n + 1);
    Ok(SplittingSpec {
        relator: parse_cyclic(&relator, &alphabet)?,
        longitude: parse_word(&longitude, &alphabet)?,
        alphabet,
        meridian: 0,
        family: Some(Family { name: FamilyName::Twist, n: Some(n) }),
        weights: None,
    })
}

/// Boundary slope `p/q` with `q >= 1` and `gcd(p, q) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlopeParam {
    pub p: i64,
    pub q: u64,
}

fn gcd_u(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u(b, a % b)
    }
}

impl SlopeParam {
    pub fn new(p: i64, q: u64) -> Result<SlopeParam, SplitError> {
        if q == 0 {
            return Err(SplitError::InvalidSlope(format!("{p}/0: q must be positive")));
        }
        if gcd_u(p.unsigned_abs(), q) != 1 {
            return Err(SplitError::InvalidSlope(format!("{p}/{q} is not in lowest terms")));
        }
        Ok(SlopeParam { p, q })
    }
}

impl FromStr for SlopeParam {
    type Err = SplitError;

    fn from_str(s: &str) -> Result<SlopeParam, SplitError> {
        let bad = || SplitError::InvalidSlope(format!("`{s}`: expected P/Q or P"));
        let (p, q) = match s.trim().split_once('/') {
            Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        SlopeParam::new(p, q)
    }
}

impl fmt::Display for SlopeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// `longitude^q * meridian^p`.
pub fn slope_curve(spec: &SplittingSpec, s: SlopeParam) -> Word {
    spec.longitude.pow(s.q as i64).concat(&Word::generator(spec.meridian).pow(s.p))
}

/// Upstairs slope `(p/m)/q` of a downstairs slope `p/q`.
pub fn lift_slope(m: u32, downstairs: SlopeParam) -> Result<SlopeParam, SplitError> {
    let down = SlopeParam::new(downstairs.p, downstairs.q)?;
    if m == 0 || down.p % m as i64 != 0 {
        return Err(SplitError::NotDivisible { p: down.p, m });
    }
    SlopeParam::new(down.p / m as i64, down.q)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSide {
    pub data: SchreierData,
    pub relator_lifts: Lifts,
    pub downstairs_slope: Option<SlopeParam>,
    /// Basepoint-0 lift of the slope curve.
    pub slope_lift: Option<CyclicWord>,
    /// Basepoint-0 lift of the longitude.
    pub longitude_lift: Word,
    /// Relator lifts followed by the slope lift, when present.
    pub disk_words: Vec<CyclicWord>,
}

/// Lifts the relator (and, for an upstairs slope `s`, the slope curve of
/// slope `m*s`) to the `m`-fold cyclic cover.
pub fn build_cover_side(spec: &SplittingSpec, m: u32, s: Option<SlopeParam>) -> Result<CoverSide, SplitError> {
    spec.validate()?;
    let weights = spec.weight_map(m)?;
    let data = covers::schreier_basis(m, &weights, spec.meridian, &spec.alphabet)?;
    let relator_lifts = covers::lifts_of(&spec.relator, &data)?;
    let longitude_lift = covers::rewrite_in_kernel(&spec.longitude, 0, &data)?;
    let mut disk_words = relator_lifts.words.clone();
    let (downstairs_slope, slope_lift) = match s {
        Some(up) => {
            let down = SlopeParam::new(up.p * m as i64, up.q)?;
            let lift = covers::rewrite_in_kernel(&slope_curve(spec, down), 0, &data)?.cyclic_reduce().0;
            disk_words.push(lift.clone());
            (Some(down), Some(lift))
        }
        None => (None, None),
    };
    Ok(CoverSide { data, relator_lifts, downstairs_slope, slope_lift, longitude_lift, disk_words })
}

/// A basis in which one disk word misses a generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakReduction {
    pub basis_change: Morphism,
    pub disk_index: usize,
    pub omitted: u32,
    pub trace: Vec<TraceStep>,
}

impl WeakReduction {
    pub fn verify(&self, disk_words: &[CyclicWord]) -> bool {
        disk_words
            .get(self.disk_index)
            .and_then(|w| self.basis_change.apply_cyclic(w).ok())
            .is_some_and(|w| !w.contains_gen(self.omitted))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeakReductionOutcome {
    Found(WeakReduction),
    /// No disk word is separable. `inconclusive` counts disks whose decision
    /// ran out of budget.
    NotFound { bound: usize, inconclusive: usize },
}

/// Looks for a disk word that misses a generator after a change of basis.
/// The identity basis is tried first; otherwise each disk word is driven to
/// a verdict by [`whitehead::decide_separable`] and the first separable one
/// supplies the witness.
pub fn find_weak_reduction(
    disk_words: &[CyclicWord],
    rank: usize,
    bound: usize,
) -> Result<WeakReductionOutcome, SplitError> {
    if disk_words.is_empty() {
        return Err(SplitError::EmptyInput);
    }
    for (i, w) in disk_words.iter().enumerate() {
        if let Some(g) = (0..rank as u32).find(|&g| !w.contains_gen(g)) {
            let found = WeakReduction {
                basis_change: Morphism::identity(rank),
                disk_index: i,
                omitted: g,
                trace: Vec::new(),
            };
            return Ok(WeakReductionOutcome::Found(checked(found, disk_words)?));
        }
    }
    let mut inconclusive = 0;
    for (i, w) in disk_words.iter().enumerate() {
        let d = whitehead::decide_separable(std::slice::from_ref(w), rank, bound)?;
        match (d.verdict, d.omitted()) {
            (Verdict::Separable, Some(g)) => {
                let found = WeakReduction { basis_change: d.automorphism, disk_index: i, omitted: g, trace: d.trace };
                return Ok(WeakReductionOutcome::Found(checked(found, disk_words)?));
            }
            (Verdict::Inconclusive, _) => inconclusive += 1,
            _ => {}
        }
    }
    Ok(WeakReductionOutcome::NotFound { bound, inconclusive })
}

fn checked(r: WeakReduction, disk_words: &[CyclicWord]) -> Result<WeakReduction, SplitError> {
    if r.verify(disk_words) {
        Ok(r)
    } else {
        Err(SplitError::Invalid("weak-reduction witness failed verification".into()))
    }
}

/// Generator map dropping `g`: indices above `g` shift down by one.
pub fn cut_map(rank: usize, g: u32) -> Vec<Option<u32>> {
    (0..rank as u32)
        .map(|i| match i.cmp(&g) {
            std::cmp::Ordering::Less => Some(i),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(i - 1),
        })
        .collect()
}

/// Re-indexes words that miss `g` over the alphabet without `g`.
pub fn cut_along(disk_words: &[CyclicWord], rank: usize, g: u32) -> Result<Vec<CyclicWord>, SplitError> {
    let map = cut_map(rank, g);
    disk_words.iter().map(|w| w.reindex(&map).ok_or(SplitError::CutInvalid(g))).collect()
}

/// Result of cutting a system down to a factor in which it is not carried by
/// a smaller free factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorReduction {
    /// Full-rank automorphism after which every word misses `omitted`.
    pub automorphism: Morphism,
    /// Original indices of the cut generators, in the order found.
    pub omitted: Vec<u32>,
    /// Original indices of the remaining generators.
    pub kept: Vec<u32>,
    /// The system over the remaining generators.
    pub core: Vec<CyclicWord>,
    /// Decision on `core`.
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub trace_len: usize,
}

/// Repeatedly decides the system and cuts along omitted generators until it
/// is diskbusting, splits as a free product, or the budget runs out.
pub fn free_factor_reduction(words: &[CyclicWord], rank: usize, bound: usize) -> Result<FactorReduction, SplitError> {
    if words.is_empty() {
        return Err(SplitError::EmptyInput);
    }
    let mut kept: Vec<u32> = (0..rank as u32).collect();
    let mut cur = words.to_vec();
    let mut phi = Morphism::identity(rank);
    let mut omitted = Vec::new();
    let mut trace_len = 0;
    loop {
        if kept.is_empty() {
            return Ok(FactorReduction {
                automorphism: phi,
                omitted,
                kept,
                core: cur,
                verdict: Verdict::Separable,
                witness: None,
                trace_len,
            });
        }
        let d = whitehead::decide_separable(&cur, kept.len(), bound)?;
        trace_len += d.trace.len();
        match (d.verdict, d.omitted()) {
            (Verdict::Separable, Some(g)) => {
                phi = phi.then(&d.automorphism.extend_from_factor(&kept, rank))?;
                cur = cut_along(&d.final_words, kept.len(), g)?;
                omitted.push(kept.remove(g as usize));
            }
            (verdict, _) => {
                return Ok(FactorReduction {
                    automorphism: phi,
                    omitted,
                    kept,
                    core: cur,
                    verdict,
                    witness: d.witness,
                    trace_len,
                })
            }
        }
    }
}

/// Cuts along several generators; returns the words and the original
/// indices of the generators kept.
pub fn cut_many(words: &[CyclicWord], rank: usize, gens: &[u32]) -> Result<(Vec<CyclicWord>, Vec<u32>), SplitError> {
    let mut sorted = gens.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.dedup();
    let mut cur = words.to_vec();
    let mut r = rank;
    for g in sorted {
        cur = cut_along(&cur, r, g)?;
        r -= 1;
    }
    let kept = (0..rank as u32).filter(|g| !gens.contains(g)).collect();
    Ok((cur, kept))
}

/// Two disk words carried together by a free factor of corank `need`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReduction {
    pub disks: (usize, usize),
    pub basis_change: Morphism,
    /// The first `need` generators cut, original indices.
    pub omitted: Vec<u32>,
    pub kept: Vec<u32>,
    /// The pair over the kept generators.
    pub cut_words: Vec<CyclicWord>,
}

/// First pair `(i, j)`, in lexicographic order, whose free-factor reduction
/// cuts at least `need` generators.
pub fn find_pair_reduction(
    disk_words: &[CyclicWord],
    rank: usize,
    need: usize,
    bound: usize,
) -> Result<Option<PairReduction>, SplitError> {
    for i in 0..disk_words.len() {
        for j in i + 1..disk_words.len() {
            let pair = [disk_words[i].clone(), disk_words[j].clone()];
            let f = free_factor_reduction(&pair, rank, bound)?;
            if f.omitted.len() < need {
                continue;
            }
            let omitted = f.omitted[..need].to_vec();
            let image = pair.iter().map(|w| f.automorphism.apply_cyclic(w)).collect::<Result<Vec<_>, _>>()?;
            let (cut_words, kept) = cut_many(&image, rank, &omitted)?;
            return Ok(Some(PairReduction { disks: (i, j), basis_change: f.automorphism, omitted, kept, cut_words }));
        }
    }
    Ok(None)
}
