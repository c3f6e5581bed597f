//! Symbolic dynamical systems at finite cylinder resolution.
//!
//! A [`SymbolicSystem`] is a full shift or a subshift of finite type on `m`
//! symbols, carrying the ultrametric `d(x,y) = lambda^j` where `j` is the
//! first index at which the sequences disagree. A [`CylinderPoint`] is a
//! finite word standing in for the point of the shift space whose first `L`
//! coordinates are known; every metric below is computed exactly on words and
//! flagged when the words do not pin the value down.

use std::fmt;
use std::sync::Arc;

use num::bigint::BigUint;
use num::rational::BigRational;
use num::{One, Zero};

use crate::rational::pow_rational;
use crate::{Error, Result};

/// Shared handle to a system; cylinder points, measures and sets all keep one.
pub type System = Arc<SymbolicSystem>;

/// A full shift or SFT on `m` symbols with contraction base `lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSystem {
    m: usize,
    lambda: BigRational,
    transitions: Option<Vec<Vec<bool>>>,
}

impl SymbolicSystem {
    /// Full shift on `m >= 2` symbols, `lambda` in (0,1).
    pub fn full_shift(m: usize, lambda: BigRational) -> Result<System> {
        Self::build(m, lambda, None)
    }

    /// Subshift of finite type: `transitions[a][b]` allows the word `ab`.
    /// Every row and every column must have at least one allowed entry.
    pub fn sft(m: usize, lambda: BigRational, transitions: Vec<Vec<bool>>) -> Result<System> {
        Self::build(m, lambda, Some(transitions))
    }

    fn build(m: usize, lambda: BigRational, transitions: Option<Vec<Vec<bool>>>) -> Result<System> {
        if m < 2 {
            return Err(Error::InvalidSystem(format!("alphabet size {m} < 2")));
        }
        if lambda <= BigRational::zero() || lambda >= BigRational::one() {
            return Err(Error::InvalidSystem(format!(
                "lambda {lambda} outside (0,1)"
            )));
        }
        if let Some(t) = &transitions {
            if t.len() != m || t.iter().any(|row| row.len() != m) {
                return Err(Error::InvalidSystem(format!(
                    "transition matrix is not {m}x{m}"
                )));
            }
            for a in 0..m {
                if !t[a].iter().any(|&x| x) {
                    return Err(Error::InvalidSystem(format!("symbol {a} has no successor")));
                }
                if !t.iter().any(|row| row[a]) {
                    return Err(Error::InvalidSystem(format!(
                        "symbol {a} has no predecessor"
                    )));
                }
            }
        }
        Ok(Arc::new(SymbolicSystem {
            m,
            lambda,
            transitions,
        }))
    }

    /// The golden-mean shift: two symbols with the word `11` forbidden.
    pub fn golden_mean(lambda: BigRational) -> Result<System> {
        Self::sft(2, lambda, vec![vec![true, true], vec![true, false]])
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    pub fn is_full_shift(&self) -> bool {
        self.transitions.is_none()
    }

    pub fn transitions(&self) -> Option<&Vec<Vec<bool>>> {
        self.transitions.as_ref()
    }

    /// Is the two-symbol word `ab` admissible?
    pub fn allows(&self, a: u8, b: u8) -> bool {
        match &self.transitions {
            None => true,
            Some(t) => t[a as usize][b as usize],
        }
    }

    /// `lambda^e`.
    pub fn lambda_pow(&self, e: usize) -> BigRational {
        pow_rational(&self.lambda, e)
    }

    /// Diameter of the space. With `m >= 2` and no dead symbols two sequences
    /// differing at index 0 always exist, so this is `lambda^0 = 1`.
    pub fn diameter(&self) -> BigRational {
        BigRational::one()
    }

    /// Number of admissible words of length `len` (transfer-matrix count).
    pub fn word_count(&self, len: usize) -> BigUint {
        assert!(len >= 1);
        match &self.transitions {
            None => BigUint::from(self.m).pow(len as u32),
            Some(t) => {
                // ones^T * T^(len-1) * ones via repeated vector multiply
                let mut v = vec![BigUint::one(); self.m];
                for _ in 1..len {
                    let mut next = vec![BigUint::zero(); self.m];
                    for (a, row) in t.iter().enumerate() {
                        for (b, &ok) in row.iter().enumerate() {
                            if ok {
                                next[a] += &v[b];
                            }
                        }
                    }
                    v = next;
                }
                v.into_iter().sum()
            }
        }
    }

    /// Smallest `e >= 0` with `lambda^e < eps` (`Lt`) or `<= eps` (`Le`).
    pub fn cover_exponent(&self, eps: &BigRational, strict: bool) -> usize {
        let mut e = 0usize;
        let mut pw = BigRational::one();
        loop {
            let ok = if strict { pw < *eps } else { pw <= *eps };
            if ok {
                return e;
            }
            pw *= &self.lambda;
            e += 1;
        }
    }

    /// Largest `e >= 0` with `lambda^e > eps` (`strict`) or `>= eps`;
    /// `None` when even `lambda^0 = 1` fails.
    pub fn packing_exponent(&self, eps: &BigRational, strict: bool) -> Option<usize> {
        let mut e = 0usize;
        let mut pw = BigRational::one();
        let holds = |p: &BigRational| if strict { p > eps } else { p >= eps };
        if !holds(&pw) {
            return None;
        }
        loop {
            let next = &pw * &self.lambda;
            if holds(&next) {
                pw = next;
                e += 1;
            } else {
                return Some(e);
            }
        }
    }
}

fn symbol_char(s: u8) -> char {
    char::from_digit(s as u32, 36).unwrap()
}

fn symbol_from_char(c: char) -> Result<u8> {
    c.to_digit(36)
        .map(|d| d as u8)
        .ok_or_else(|| Error::Parse(format!("bad symbol character {c:?}")))
}

/// A finite word over the alphabet, standing for the cylinder of all
/// sequences with that prefix. Comparable only within one system.
#[derive(Debug, Clone)]
pub struct CylinderPoint {
    word: Vec<u8>,
    system: System,
}

impl PartialEq for CylinderPoint {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word
    }
}
impl Eq for CylinderPoint {}
impl PartialOrd for CylinderPoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for CylinderPoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.word.cmp(&other.word)
    }
}

impl fmt::Display for CylinderPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.word {
            write!(f, "{}", symbol_char(s))?;
        }
        Ok(())
    }
}

impl CylinderPoint {
    pub fn new(system: &System, word: Vec<u8>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::Parse("empty word".into()));
        }
        for &s in &word {
            if s as usize >= system.alphabet_size() {
                return Err(Error::IllegalSymbol {
                    symbol: s,
                    m: system.alphabet_size(),
                });
            }
        }
        for w in word.windows(2) {
            if !system.allows(w[0], w[1]) {
                return Err(Error::ForbiddenTransition {
                    from: w[0],
                    to: w[1],
                });
            }
        }
        Ok(CylinderPoint {
            word,
            system: system.clone(),
        })
    }

    /// Parse from a base-36 digit string such as `"0110"`.
    pub fn parse(system: &System, s: &str) -> Result<Self> {
        let word = s.chars().map(symbol_from_char).collect::<Result<Vec<_>>>()?;
        Self::new(system, word)
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    /// The shift image: drop the first symbol. Needs length >= 2.
    pub fn shift(&self) -> Result<Self> {
        if self.word.len() < 2 {
            return Err(Error::WordTooShort { needed: 2, got: 1 });
        }
        Ok(CylinderPoint {
            word: self.word[1..].to_vec(),
            system: self.system.clone(),
        })
    }

    /// Extend to `len` symbols by repeating the word cyclically. Fails if the
    /// wrap-around transition is inadmissible.
    pub fn extend_periodic(&self, len: usize) -> Result<Self> {
        let p = self.word.len();
        if !self.system.allows(self.word[p - 1], self.word[0]) {
            return Err(Error::CyclicInadmissible(self.to_string()));
        }
        let word: Vec<u8> = (0..len.max(1)).map(|i| self.word[i % p]).collect();
        CylinderPoint::new(&self.system, word)
    }

    /// Extend to `len` symbols by always taking the least admissible
    /// successor. Used to pick canonical representatives of cylinders.
    pub fn extend_least(&self, len: usize) -> Result<Self> {
        let mut word = self.word.clone();
        while word.len() < len {
            let last = *word.last().unwrap();
            let next = (0..self.system.alphabet_size() as u8)
                .find(|&b| self.system.allows(last, b))
                .expect("no dead symbols");
            word.push(next);
        }
        CylinderPoint::new(&self.system, word)
    }
}

pub(crate) fn check_same_system(a: &System, b: &System) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::SystemMismatch)
    }
}

/// Distance value together with an exactness flag: `exact` means the words
/// fully determine the distance between the underlying points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dist {
    pub value: BigRational,
    pub exact: bool,
}

impl Dist {
    fn exact(value: BigRational) -> Self {
        Dist { value, exact: true }
    }
    fn inexact(value: BigRational) -> Self {
        Dist {
            value,
            exact: false,
        }
    }

    /// The value if exact, otherwise an error.
    pub fn require_exact(self) -> Result<BigRational> {
        if self.exact {
            Ok(self.value)
        } else {
            Err(Error::InexactDistance)
        }
    }
}

/// Time horizon and metric flavour for the dynamical metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BowenContext {
    pub n: usize,
    pub mode: MetricMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricMode {
    /// `d_n(x,y) = max { d(f^i x, f^i y) : 0 <= i < n }`
    Bowen,
    /// `(1/n) * sum_i d(f^i x, f^i y)`
    Mean,
}

impl BowenContext {
    pub fn new(n: usize, mode: MetricMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("horizon n must be >= 1".into()));
        }
        Ok(BowenContext { n, mode })
    }

    pub fn bowen(n: usize) -> Result<Self> {
        Self::new(n, MetricMode::Bowen)
    }
}

enum FirstDiff {
    /// Words disagree first at this index.
    At(usize),
    /// Words agree on the whole overlap but have different lengths.
    Overlap,
    /// Words are identical (same length, same content): the same point.
    Identical,
}

fn first_diff(x: &CylinderPoint, y: &CylinderPoint) -> FirstDiff {
    let overlap = x.word.len().min(y.word.len());
    for j in 0..overlap {
        if x.word[j] != y.word[j] {
            return FirstDiff::At(j);
        }
    }
    if x.word.len() == y.word.len() {
        FirstDiff::Identical
    } else {
        FirstDiff::Overlap
    }
}

/// Base metric `d(x,y) = lambda^j`, `j` the first disagreement index.
///
/// Same-length distinct words always yield an exact value. Words that agree
/// on their whole overlap but differ in length return `0` flagged inexact:
/// the words do not determine whether the points coincide.
pub fn base_distance(x: &CylinderPoint, y: &CylinderPoint) -> Result<Dist> {
    check_same_system(&x.system, &y.system)?;
    Ok(match first_diff(x, y) {
        FirstDiff::At(j) => Dist::exact(x.system.lambda_pow(j)),
        FirstDiff::Identical => Dist::exact(BigRational::zero()),
        FirstDiff::Overlap => Dist::inexact(BigRational::zero()),
    })
}

/// Dynamical metrics at horizon `ctx.n`.
///
/// In Bowen mode the ultrametric collapses the maximum onto the first
/// disagreement: `d_n = lambda^{max(0, j-n+1)}`. The value is exact whenever
/// the words disagree inside their overlap, regardless of their length. In
/// mean mode every shifted comparison in the horizon must be determined; the
/// returned value is otherwise a lower bound flagged inexact.
pub fn bowen_distance(x: &CylinderPoint, y: &CylinderPoint, ctx: &BowenContext) -> Result<Dist> {
    check_same_system(&x.system, &y.system)?;
    match ctx.mode {
        MetricMode::Bowen => Ok(match first_diff(x, y) {
            FirstDiff::At(j) => {
                let e = j.saturating_sub(ctx.n - 1);
                Dist::exact(x.system.lambda_pow(e))
            }
            FirstDiff::Identical => Dist::exact(BigRational::zero()),
            FirstDiff::Overlap => Dist::inexact(BigRational::zero()),
        }),
        MetricMode::Mean => {
            if matches!(first_diff(x, y), FirstDiff::Identical) {
                return Ok(Dist::exact(BigRational::zero()));
            }
            let overlap = x.word.len().min(y.word.len());
            let diffs: Vec<usize> = (0..overlap).filter(|&j| x.word[j] != y.word[j]).collect();
            let mut sum = BigRational::zero();
            let mut exact = true;
            for i in 0..ctx.n {
                // first disagreement of the i-shifted words
                match diffs.iter().find(|&&j| j >= i) {
                    Some(&j) => sum += x.system.lambda_pow(j - i),
                    None => exact = false, // undetermined beyond the overlap
                }
            }
            let value = sum / BigRational::from_integer(ctx.n.into());
            Ok(if exact {
                Dist::exact(value)
            } else {
                Dist::inexact(value)
            })
        }
    }
}

/// All admissible words of length `len`, in lexicographic order.
/// Refuses to enumerate more than `cap` words.
pub fn enumerate_cylinders(system: &System, len: usize, cap: u64) -> Result<Vec<CylinderPoint>> {
    if len == 0 {
        return Err(Error::Parse("cylinder length must be >= 1".into()));
    }
    let count = system.word_count(len);
    if count > BigUint::from(cap) {
        return Err(Error::ResourceCap {
            what: "cylinder enumeration".into(),
            size: count.to_string(),
            cap: cap.to_string(),
        });
    }
    let mut out = Vec::new();
    let mut word: Vec<u8> = Vec::with_capacity(len);
    fn rec(system: &System, word: &mut Vec<u8>, len: usize, out: &mut Vec<CylinderPoint>) {
        if word.len() == len {
            out.push(CylinderPoint {
                word: word.clone(),
                system: system.clone(),
            });
            return;
        }
        for s in 0..system.alphabet_size() as u8 {
            if word.last().map_or(true, |&last| system.allows(last, s)) {
                word.push(s);
                rec(system, word, len, out);
                word.pop();
            }
        }
    }
    rec(system, &mut word, len, &mut out);
    if out.is_empty() {
        return Err(Error::InvalidSystem("no admissible words".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn half() -> BigRational {
        ratio(1, 2)
    }

    fn full2() -> System {
        SymbolicSystem::full_shift(2, half()).unwrap()
    }

    fn pt(sys: &System, s: &str) -> CylinderPoint {
        CylinderPoint::parse(sys, s).unwrap()
    }

    #[test]
    fn base_distance_examples() {
        let sys = full2();
        let d = base_distance(&pt(&sys, "01"), &pt(&sys, "10")).unwrap();
        assert_eq!(d.value, ratio(1, 1));
        assert!(d.exact);
        let d = base_distance(&pt(&sys, "00"), &pt(&sys, "01")).unwrap();
        assert_eq!(d.value, half());
        let d = base_distance(&pt(&sys, "01"), &pt(&sys, "01")).unwrap();
        assert_eq!(d.value, BigRational::zero());
        assert!(d.exact);
        // prefix of the other: undetermined
        let d = base_distance(&pt(&sys, "01"), &pt(&sys, "011")).unwrap();
        assert!(!d.exact);
        assert_eq!(d.value, BigRational::zero());
    }

    #[test]
    fn mismatched_systems_rejected() {
        let a = full2();
        let b = SymbolicSystem::full_shift(3, half()).unwrap();
        let err = base_distance(&pt(&a, "01"), &pt(&b, "01")).unwrap_err();
        assert!(matches!(err, Error::SystemMismatch));
    }

    #[test]
    fn bowen_distance_examples() {
        let sys = full2();
        let ctx = BowenContext::bowen(3).unwrap();
        let d = bowen_distance(&pt(&sys, "0110"), &pt(&sys, "0111"), &ctx).unwrap();
        assert_eq!(d.value, half());
        assert!(d.exact);
        // n = 1 equals the base metric
        let ctx1 = BowenContext::bowen(1).unwrap();
        let d = bowen_distance(&pt(&sys, "0110"), &pt(&sys, "0111"), &ctx1).unwrap();
        assert_eq!(d.value, ratio(1, 8));
        // mean metric
        let mean = BowenContext::new(3, MetricMode::Mean).unwrap();
        let d = bowen_distance(&pt(&sys, "0110"), &pt(&sys, "0111"), &mean).unwrap();
        assert_eq!(d.value, ratio(7, 24));
        assert!(d.exact);
    }

    #[test]
    fn shift_examples() {
        let sys = full2();
        assert_eq!(pt(&sys, "0110").shift().unwrap(), pt(&sys, "110"));
        assert_eq!(pt(&sys, "01").shift().unwrap(), pt(&sys, "1"));
        assert!(pt(&sys, "0").shift().is_err());
    }

    #[test]
    fn enumerate_counts() {
        let sys = full2();
        assert_eq!(enumerate_cylinders(&sys, 3, 1 << 26).unwrap().len(), 8);
        let gm = SymbolicSystem::golden_mean(half()).unwrap();
        let words: Vec<String> = enumerate_cylinders(&gm, 3, 1 << 26)
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(words, ["000", "001", "010", "100", "101"]);
        let m3 = SymbolicSystem::full_shift(3, half()).unwrap();
        assert_eq!(enumerate_cylinders(&m3, 1, 1 << 26).unwrap().len(), 3);
        // cap triggers the resource error
        assert!(matches!(
            enumerate_cylinders(&sys, 10, 100),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn word_counts_match_enumeration() {
        let gm = SymbolicSystem::golden_mean(half()).unwrap();
        for len in 1..=8 {
            let count = gm.word_count(len);
            let listed = enumerate_cylinders(&gm, len, 1 << 26).unwrap().len();
            assert_eq!(count, BigUint::from(listed));
        }
    }

    #[test]
    fn exponent_helpers() {
        let sys = full2();
        let eps = ratio(1, 4);
        assert_eq!(sys.cover_exponent(&eps, true), 3); // lambda^3 = 1/8 < 1/4
        assert_eq!(sys.cover_exponent(&eps, false), 2);
        assert_eq!(sys.packing_exponent(&eps, true), Some(1));
        assert_eq!(sys.packing_exponent(&eps, false), Some(2));
        assert_eq!(sys.packing_exponent(&ratio(3, 2), false), None);
        let odd = ratio(3, 10);
        assert_eq!(sys.cover_exponent(&odd, true), 2);
        assert_eq!(sys.packing_exponent(&odd, false), Some(1));
    }

    #[test]
    fn dead_symbol_rejected() {
        let t = vec![vec![true, false], vec![true, false]];
        assert!(SymbolicSystem::sft(2, half(), t).is_err());
    }
}
