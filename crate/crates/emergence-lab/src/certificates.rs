//! Constructive lower-bound witnesses: half-weight binary codebooks,
//! periodic-orbit apart families, code-indexed separated measure families,
//! and code-indexed hyperspace families. Every certificate carries a
//! verification record that reproduces on re-run, and re-verifies through
//! the counting module's distance paths (which share no check code with the
//! construction-side verification here — in particular the measure families
//! are checked here with the flow solver and re-checked there with the
//! ultrametric tree evaluator).

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::counting::{self, GreedyConfig};
use crate::hyperspace::{hausdorff, min_cross_distance, FiniteClosedSet};
use crate::measures::{periodic_orbit_measure, wasserstein, DiscreteMeasure};
use crate::rational::{binomial, biguint_ln, ratio};
use crate::systems::{BowenContext, CylinderPoint, System};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Half-weight codebooks
// ---------------------------------------------------------------------------

/// Combinatorial facts recorded with a codebook. `total_half_weight` is the
/// number of half-weight vectors C(N, N/2); the ball bound counts vectors
/// within Hamming distance N/4 of a fixed one.
#[derive(Debug, Clone)]
pub struct CodeStats {
    pub total_half_weight: BigUint,
    /// exact check of C(N, N/2)^2 * 2N >= 2^(2N)
    pub stirling_bound_holds: bool,
    /// exhaustive #U (only for N <= 16)
    pub ball_size_exact: Option<BigUint>,
    /// ln of the 2^N e^{-pi N / 64} ball bound
    pub ball_bound_ln: f64,
}

/// Vectors phi: {1..N} -> {0,1} with exactly N/2 ones and pairwise Hamming
/// distance > N/4, plus the combinatorial bookkeeping around them.
#[derive(Debug, Clone)]
pub struct HammingCodebook {
    pub n_bits: usize,
    vectors: Vec<Vec<u64>>,
    pub stats: CodeStats,
    /// true when the candidate stream was the full lexicographic enumeration
    pub exhaustive: bool,
}

#[derive(Debug, Clone)]
pub struct CodeConfig {
    /// hard cap on N
    pub max_bits: usize,
    /// enumerate lexicographically when C(N, N/2) is at most this
    pub lex_cap: u64,
    /// sampled candidates when enumeration is infeasible
    pub sample_budget: u64,
    pub seed: u64,
    /// stop once this many codewords are kept (0 = no target)
    pub target_size: usize,
}

impl Default for CodeConfig {
    fn default() -> Self {
        CodeConfig {
            max_bits: 64,
            lex_cap: 20_000,
            sample_budget: 200_000,
            seed: 0,
            target_size: 0,
        }
    }
}

fn blocks(n_bits: usize) -> usize {
    n_bits.div_ceil(64)
}

pub fn hamming_distance(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

fn vector_weight(v: &[u64]) -> u32 {
    v.iter().map(|x| x.count_ones()).sum()
}

impl HammingCodebook {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<u64>] {
        &self.vectors
    }

    pub fn bit(&self, vector: usize, i: usize) -> bool {
        self.vectors[vector][i / 64] >> (i % 64) & 1 == 1
    }
}

/// Greedy first-fit code over half-weight vectors with pairwise distance
/// strictly above N/4. Candidates come from the full lexicographic
/// enumeration when feasible and from a seeded sampler otherwise.
pub fn build_half_weight_code(n_bits: usize, cfg: &CodeConfig) -> Result<HammingCodebook> {
    if n_bits == 0 || n_bits % 8 != 0 {
        return Err(Error::Parse(format!("code size {n_bits} is not a positive multiple of 8")));
    }
    if n_bits > cfg.max_bits {
        return Err(Error::ResourceCap {
            what: "half-weight code".into(),
            size: n_bits.to_string(),
            cap: cfg.max_bits.to_string(),
        });
    }
    let total = binomial(n_bits as u64, n_bits as u64 / 2);
    // C(N, N/2) >= (2N)^(-1/2) 2^N, checked exactly by squaring
    let stirling_bound_holds = &total * &total * BigUint::from(2 * n_bits as u64)
        >= BigUint::one() << (2 * n_bits);
    let ball_bound_ln =
        n_bits as f64 * std::f64::consts::LN_2 - std::f64::consts::PI * n_bits as f64 / 64.0;
    let ball_size_exact = (n_bits <= 16).then(|| {
        let mut u = BigUint::zero();
        for k in 0..=(n_bits as u64 / 8) {
            let c = binomial(n_bits as u64 / 2, k);
            u += &c * &c;
        }
        u
    });
    if let Some(u) = &ball_size_exact {
        if biguint_ln(u) > ball_bound_ln {
            return Err(Error::VerificationFailed(format!(
                "ball of radius N/4 has {u} vectors, above the 2^N e^(-pi N/64) bound"
            )));
        }
    }

    let min_dist = n_bits as u32 / 4; // keep iff distance > N/4
    let mut kept: Vec<Vec<u64>> = Vec::new();
    let mut push_candidate = |v: Vec<u64>, kept: &mut Vec<Vec<u64>>| {
        if kept.iter().all(|k| hamming_distance(k, &v) > min_dist) {
            kept.push(v);
        }
    };

    let exhaustive = total <= BigUint::from(cfg.lex_cap);
    if exhaustive {
        // lexicographic enumeration of all half-weight vectors
        let mut positions: Vec<usize> = (0..n_bits / 2).collect();
        loop {
            let mut v = vec![0u64; blocks(n_bits)];
            for &p in &positions {
                v[p / 64] |= 1 << (p % 64);
            }
            debug_assert_eq!(vector_weight(&v) as usize, n_bits / 2);
            push_candidate(v, &mut kept);
            if cfg.target_size > 0 && kept.len() >= cfg.target_size {
                break;
            }
            // next combination
            let k = positions.len();
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if positions[i] != i + n_bits - k {
                    positions[i] += 1;
                    for j in i + 1..k {
                        positions[j] = positions[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    positions.clear();
                    break;
                }
            }
            if positions.is_empty() {
                break;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut idx: Vec<usize> = (0..n_bits).collect();
        for _ in 0..cfg.sample_budget {
            idx.shuffle(&mut rng);
            let mut v = vec![0u64; blocks(n_bits)];
            for &p in &idx[..n_bits / 2] {
                v[p / 64] |= 1 << (p % 64);
            }
            push_candidate(v, &mut kept);
            if cfg.target_size > 0 && kept.len() >= cfg.target_size {
                break;
            }
        }
    }
    if kept.is_empty() {
        return Err(Error::VerificationFailed("empty code".into()));
    }
    Ok(HammingCodebook {
        n_bits,
        vectors: kept,
        stats: CodeStats {
            total_half_weight: total,
            stirling_bound_holds,
            ball_size_exact,
            ball_bound_ln,
        },
        exhaustive,
    })
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    /// measures with pairwise min support distance >= eps at horizon n
    ApartMeasures,
    /// measures with pairwise W_1^n > eps
    SeparatedMeasures,
    /// sets with pairwise H^n > eps
    SeparatedSets,
    /// sets with pairwise min cross distance > eps
    SplitSets,
}

impl CertificateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateKind::ApartMeasures => "apart_measures",
            CertificateKind::SeparatedMeasures => "separated_measures",
            CertificateKind::SeparatedSets => "separated_sets",
            CertificateKind::SplitSets => "split_sets",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "apart_measures" => CertificateKind::ApartMeasures,
            "separated_measures" => CertificateKind::SeparatedMeasures,
            "separated_sets" => CertificateKind::SeparatedSets,
            "split_sets" => CertificateKind::SplitSets,
            other => return Err(Error::Parse(format!("unknown certificate kind {other:?}"))),
        })
    }
}

#[derive(Debug, Clone)]
pub enum Witnesses {
    Measures(Vec<DiscreteMeasure>),
    Sets(Vec<FiniteClosedSet>),
    /// Implicit family `mu_phi = (2/N) sum phi(i) base_i`: one measure per
    /// codeword, expanded on demand. Keeps huge families representable.
    CodeMeasures {
        base: Vec<DiscreteMeasure>,
        code: Vec<Vec<u64>>,
        n_bits: usize,
    },
}

impl Witnesses {
    pub fn len(&self) -> usize {
        match self {
            Witnesses::Measures(v) => v.len(),
            Witnesses::Sets(v) => v.len(),
            Witnesses::CodeMeasures { code, .. } => code.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Materialize one measure of a code-indexed family.
    pub fn expand_measure(&self, idx: usize) -> Result<DiscreteMeasure> {
        match self {
            Witnesses::Measures(v) => Ok(v[idx].clone()),
            Witnesses::CodeMeasures { base, code, n_bits } => {
                expand_code_measure(base, &code[idx], *n_bits)
            }
            Witnesses::Sets(_) => Err(Error::CertificateInvalid(
                "set witnesses hold no measures".into(),
            )),
        }
    }
}

pub(crate) fn expand_code_measure(
    base: &[DiscreteMeasure],
    phi: &[u64],
    n_bits: usize,
) -> Result<DiscreteMeasure> {
    let system = base[0].system().clone();
    let share = ratio(2, n_bits as i64);
    let mut atoms = Vec::new();
    for (i, nu) in base.iter().take(n_bits).enumerate() {
        if phi[i / 64] >> (i % 64) & 1 == 1 {
            for (p, w) in nu.atoms() {
                atoms.push((p.clone(), w * &share));
            }
        }
    }
    DiscreteMeasure::new(&system, atoms)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyMode {
    Full,
    Sampled { seed: u64, pairs: usize },
}

/// One checked pair: the exact distance found and the lower bound the
/// construction promises for it.
#[derive(Debug, Clone)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub distance: BigRational,
    pub bound: BigRational,
}

#[derive(Debug, Clone)]
pub struct VerificationRecord {
    pub mode: VerifyMode,
    pub checked: Vec<PairCheck>,
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// time horizon of the claimed scale
    pub n: usize,
    /// separation threshold of the claimed scale
    pub epsilon: BigRational,
    pub witnesses: Witnesses,
    pub verification: VerificationRecord,
}

fn sampled_pairs(total: usize, mode: &VerifyMode) -> Vec<(usize, usize)> {
    let all: Vec<(usize, usize)> = (0..total)
        .flat_map(|i| ((i + 1)..total).map(move |j| (i, j)))
        .collect();
    match mode {
        VerifyMode::Full => all,
        VerifyMode::Sampled { seed, pairs } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut chosen = Vec::with_capacity(*pairs);
            while chosen.len() < *pairs && chosen.len() < all.len() {
                let p = all[rng.gen_range(0..all.len())];
                if !chosen.contains(&p) {
                    chosen.push(p);
                }
            }
            chosen.sort_unstable();
            chosen
        }
    }
}

// ---------------------------------------------------------------------------
// Periodic-orbit apart families
// ---------------------------------------------------------------------------

/// Close every word of a maximum `(n,eps)`-separated family into a periodic
/// point and return the distinct orbit measures, verified pairwise
/// `(n + n0, eps)`-apart. On the full shift words repeat verbatim
/// (`n0 = 0`); on a mixing SFT a fixed-length connector closes each word.
pub fn apart_measure_family(
    system: &System,
    n: usize,
    eps: &BigRational,
    enumeration_cap: u64,
) -> Result<Certificate> {
    if n == 0 {
        return Err(Error::Parse("horizon n must be >= 1".into()));
    }
    let e_star = system
        .packing_exponent(eps, false)
        .ok_or_else(|| Error::Parse(format!("eps {eps} exceeds the diameter")))?;
    let base_len = n + e_star;
    let words = crate::systems::enumerate_cylinders(system, base_len, enumeration_cap)?;
    let word_count = words.len();

    let connector = if system.is_full_shift() {
        None
    } else {
        Some(ConnectorTable::build(system)?)
    };
    let n0 = connector.as_ref().map_or(0, |c| c.len);
    let period = base_len + n0;

    // close words, deduplicate orbits by minimal rotation
    let mut canon: Vec<Vec<u8>> = Vec::new();
    for w in &words {
        let mut u = w.word().to_vec();
        if let Some(table) = &connector {
            u.extend(table.path(*u.last().unwrap(), u[0]));
        }
        debug_assert_eq!(u.len(), period);
        let c = minimal_rotation(&u);
        if !canon.contains(&c) {
            canon.push(c);
        }
    }
    canon.sort();
    // each orbit holds at most `period` of the closed points
    if canon.len() * period < word_count {
        return Err(Error::VerificationFailed(format!(
            "orbit accounting failed: {} orbits cannot hold {word_count} points",
            canon.len()
        )));
    }
    let measures = canon
        .iter()
        .map(|u| periodic_orbit_measure(system, u, period))
        .collect::<Result<Vec<_>>>()?;

    let horizon = n + n0;
    let mode = VerifyMode::Full;
    let mut checked = Vec::new();
    for (i, mu) in measures.iter().enumerate() {
        for (j, nu) in measures.iter().enumerate().skip(i + 1) {
            let d = construction_support_distance(mu, nu, horizon)?;
            if d < *eps {
                return Err(Error::VerificationFailed(format!(
                    "orbits {i} and {j} at support distance {d} < eps {eps}"
                )));
            }
            checked.push(PairCheck {
                i,
                j,
                distance: d,
                bound: eps.clone(),
            });
        }
    }
    Ok(Certificate {
        kind: CertificateKind::ApartMeasures,
        n: horizon,
        epsilon: eps.clone(),
        witnesses: Witnesses::Measures(measures),
        verification: VerificationRecord { mode, checked },
    })
}

/// Fixed-length connector words for a mixing SFT: the shortest `t` with all
/// entries of `T^t` positive gives paths of exactly `t` edges between every
/// symbol pair, realized greedily.
struct ConnectorTable {
    /// number of inserted symbols (edges minus one)
    len: usize,
    paths: Vec<Vec<Vec<u8>>>,
}

impl ConnectorTable {
    fn build(system: &System) -> Result<Self> {
        let m = system.alphabet_size();
        let step = |reach: &Vec<Vec<bool>>| -> Vec<Vec<bool>> {
            let mut next = vec![vec![false; m]; m];
            for a in 0..m {
                for b in 0..m {
                    if reach[a][b] {
                        for c in 0..m {
                            if system.allows(b as u8, c as u8) {
                                next[a][c] = true;
                            }
                        }
                    }
                }
            }
            next
        };
        let identity: Vec<Vec<bool>> = (0..m).map(|i| (0..m).map(|j| i == j).collect()).collect();
        let mut reach = step(&identity); // T^1
        let mut powers = vec![reach.clone()];
        let mut t = 1usize;
        while !reach.iter().all(|row| row.iter().all(|&x| x)) {
            if t > 2 * m * m {
                let (from, to) = (0..m)
                    .flat_map(|a| (0..m).map(move |b| (a, b)))
                    .find(|&(a, b)| !reach[a][b])
                    .unwrap();
                return Err(Error::NotMixing {
                    from: from as u8,
                    to: to as u8,
                });
            }
            reach = step(&reach);
            powers.push(reach.clone());
            t += 1;
        }
        // exact-length paths of t edges: t - 1 inserted symbols
        let mut paths = vec![vec![Vec::new(); m]; m];
        for a in 0..m {
            for b in 0..m {
                let mut path = Vec::with_capacity(t - 1);
                let mut cur = a as u8;
                for remaining in (1..t).rev() {
                    // choose the least symbol that still reaches b
                    let next = (0..m as u8)
                        .find(|&s| {
                            system.allows(cur, s) && powers[remaining - 1][s as usize][b]
                        })
                        .expect("mixing guarantees a continuation");
                    path.push(next);
                    cur = next;
                }
                debug_assert!(system.allows(cur, b as u8));
                paths[a][b] = path;
            }
        }
        Ok(ConnectorTable { len: t - 1, paths })
    }

    fn path(&self, from: u8, to: u8) -> Vec<u8> {
        self.paths[from as usize][to as usize].clone()
    }
}

fn construction_support_distance(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    horizon: usize,
) -> Result<BigRational> {
    let ctx = BowenContext::bowen(horizon)?;
    let mut best: Option<BigRational> = None;
    for (x, _) in mu.atoms() {
        for (y, _) in nu.atoms() {
            let d = crate::systems::bowen_distance(x, y, &ctx)?.require_exact()?;
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
        }
    }
    Ok(best.unwrap())
}

fn minimal_rotation(word: &[u8]) -> Vec<u8> {
    let p = word.len();
    (0..p)
        .map(|k| (0..p).map(|i| word[(k + i) % p]).collect::<Vec<u8>>())
        .min()
        .unwrap()
}

// ---------------------------------------------------------------------------
// Code-indexed measure families
// ---------------------------------------------------------------------------

/// From a pairwise `(n,eps)`-apart base family and a half-weight code,
/// build the measures `mu_phi = (2/N) sum phi(i) nu_i`, pairwise
/// `(n, eps/4)`-separated in `W_1^n`. Each checked pair also records the
/// transported-mass bound `eps * Hamm(phi1,phi2)/N <= W_1^n`.
pub fn hamming_measure_family(
    base: &[DiscreteMeasure],
    n: usize,
    eps: &BigRational,
    code: &HammingCodebook,
    mode: VerifyMode,
) -> Result<Certificate> {
    let nn = code.n_bits;
    if base.len() < nn {
        return Err(Error::CertificateInvalid(format!(
            "base family of {} measures is smaller than the code length {nn}",
            base.len()
        )));
    }
    // base must be pairwise apart at the claimed scale
    for i in 0..nn {
        for j in (i + 1)..nn {
            if construction_support_distance(&base[i], &base[j], n)? < *eps {
                return Err(Error::CertificateInvalid(format!(
                    "base measures {i},{j} are not (n,eps)-apart"
                )));
            }
        }
    }
    let threshold = eps / ratio(4, 1);
    let ctx = BowenContext::bowen(n)?;
    let mut checked = Vec::new();
    for (i, j) in sampled_pairs(code.len(), &mode) {
        let mi = expand_code_measure(base, &code.vectors()[i], nn)?;
        let mj = expand_code_measure(base, &code.vectors()[j], nn)?;
        let w = wasserstein(&mi, &mj, 1, Some(&ctx))?;
        let d = w.cost_pow_p;
        let hamm = hamming_distance(&code.vectors()[i], &code.vectors()[j]);
        // the plan must move mu_phi1(S1 \ S2) = Hamm/N mass across >= eps
        let bound = eps * ratio(hamm as i64, nn as i64);
        if d < threshold {
            return Err(Error::VerificationFailed(format!(
                "pair ({i},{j}) at W_1^n = {d} below eps/4 = {threshold}"
            )));
        }
        if d < bound {
            return Err(Error::VerificationFailed(format!(
                "pair ({i},{j}) at W_1^n = {d} below the mass-defect bound {bound}"
            )));
        }
        checked.push(PairCheck {
            i,
            j,
            distance: d,
            bound,
        });
    }
    Ok(Certificate {
        kind: CertificateKind::SeparatedMeasures,
        n,
        epsilon: threshold,
        witnesses: Witnesses::CodeMeasures {
            base: base[..nn].to_vec(),
            code: code.vectors().to_vec(),
            n_bits: nn,
        },
        verification: VerificationRecord { mode, checked },
    })
}

// ---------------------------------------------------------------------------
// Code-indexed hyperspace families
// ---------------------------------------------------------------------------

/// `B_phi = { x_i : phi(i) = 1 }` over a pairwise `(n,eps)`-separated point
/// family: the resulting sets are pairwise `H^n > eps`-separated.
pub fn hyperspace_separated_family(
    points: &[CylinderPoint],
    n: usize,
    eps: &BigRational,
    code: &HammingCodebook,
    mode: VerifyMode,
) -> Result<Certificate> {
    let nn = code.n_bits;
    if points.len() < nn {
        return Err(Error::CertificateInvalid(format!(
            "point family of {} is smaller than the code length {nn}",
            points.len()
        )));
    }
    let system = points[0].system().clone();
    let ctx = BowenContext::bowen(n)?;
    for (i, x) in points.iter().take(nn).enumerate() {
        for y in points.iter().take(nn).skip(i + 1) {
            let d = crate::systems::bowen_distance(x, y, &ctx)?.require_exact()?;
            if d <= *eps {
                return Err(Error::CertificateInvalid(format!(
                    "base points {x} and {y} at d_n = {d} <= eps {eps}"
                )));
            }
        }
    }
    let sets: Vec<FiniteClosedSet> = code
        .vectors()
        .iter()
        .map(|phi| {
            let chosen: Vec<CylinderPoint> = points
                .iter()
                .take(nn)
                .enumerate()
                .filter(|(i, _)| phi[i / 64] >> (i % 64) & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect();
            FiniteClosedSet::new(&system, chosen)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut checked = Vec::new();
    for (i, j) in sampled_pairs(sets.len(), &mode) {
        let h = hausdorff(&sets[i], &sets[j], Some(&ctx))?;
        if h <= *eps {
            return Err(Error::VerificationFailed(format!(
                "sets ({i},{j}) at H^n = {h} <= eps {eps}"
            )));
        }
        checked.push(PairCheck {
            i,
            j,
            distance: h,
            bound: eps.clone(),
        });
    }
    Ok(Certificate {
        kind: CertificateKind::SeparatedSets,
        n,
        epsilon: eps.clone(),
        witnesses: Witnesses::Sets(sets),
        verification: VerificationRecord { mode, checked },
    })
}

/// Union variant over pairwise `(n,eps)`-split base sets: `B_phi` is the
/// union of the chosen sets. When the base sets are f-fixed (orbit unions)
/// the unions stay f-fixed. The check records, for each pair, a witness
/// base set contained in one union and split from the other.
pub fn hyperspace_split_family(
    base: &[FiniteClosedSet],
    n: usize,
    eps: &BigRational,
    code: &HammingCodebook,
    mode: VerifyMode,
) -> Result<Certificate> {
    let nn = code.n_bits;
    if base.len() < nn {
        return Err(Error::CertificateInvalid(format!(
            "base family of {} sets is smaller than the code length {nn}",
            base.len()
        )));
    }
    let system = base[0].system().clone();
    let ctx = BowenContext::bowen(n)?;
    for i in 0..nn {
        for j in (i + 1)..nn {
            let d = min_cross_distance(&base[i], &base[j], Some(&ctx))?;
            if d <= *eps {
                return Err(Error::CertificateInvalid(format!(
                    "base sets {i},{j} at cross distance {d} <= eps {eps}"
                )));
            }
        }
    }
    let sets: Vec<FiniteClosedSet> = code
        .vectors()
        .iter()
        .map(|phi| {
            let mut points = Vec::new();
            for (i, b) in base.iter().take(nn).enumerate() {
                if phi[i / 64] >> (i % 64) & 1 == 1 {
                    points.extend(b.points().iter().cloned());
                }
            }
            FiniteClosedSet::new(&system, points)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut checked = Vec::new();
    for (i, j) in sampled_pairs(sets.len(), &mode) {
        // witness index: phi_i has it, phi_j does not
        let witness = (0..nn)
            .find(|&k| code.bit(i, k) && !code.bit(j, k))
            .ok_or_else(|| Error::CertificateInvalid("codewords not distinct".into()))?;
        let d = min_cross_distance(&base[witness], &sets[j], Some(&ctx))?;
        if d <= *eps {
            return Err(Error::VerificationFailed(format!(
                "witness set {witness} not split from union {j}: distance {d}"
            )));
        }
        let h = hausdorff(&sets[i], &sets[j], Some(&ctx))?;
        if h <= *eps {
            return Err(Error::VerificationFailed(format!(
                "unions ({i},{j}) at H^n = {h} <= eps {eps}"
            )));
        }
        checked.push(PairCheck {
            i,
            j,
            distance: h,
            bound: eps.clone(),
        });
    }
    Ok(Certificate {
        kind: CertificateKind::SplitSets,
        n,
        epsilon: eps.clone(),
        witnesses: Witnesses::Sets(sets),
        verification: VerificationRecord { mode, checked },
    })
}

// ---------------------------------------------------------------------------
// Independent re-verification
// ---------------------------------------------------------------------------

/// Re-verify a certificate through the counting module's distance paths.
/// Recorded pairs must reproduce their distances exactly; all pairs are
/// re-checked when the family is small enough, otherwise the recorded ones.
pub fn verify_certificate(cert: &Certificate, full_pair_cap: usize) -> Result<()> {
    if cert.witnesses.is_empty() {
        return Err(Error::CertificateInvalid("no witnesses".into()));
    }
    let total = cert.witnesses.len();
    let all_pairs = total * (total.saturating_sub(1)) / 2;
    let pairs: Vec<(usize, usize)> = if all_pairs <= full_pair_cap {
        (0..total)
            .flat_map(|i| ((i + 1)..total).map(move |j| (i, j)))
            .collect()
    } else {
        cert.verification
            .checked
            .iter()
            .map(|p| (p.i, p.j))
            .collect()
    };
    let recorded: &[PairCheck] = &cert.verification.checked;
    let lookup = |i: usize, j: usize| recorded.iter().find(|p| p.i == i && p.j == j);
    for (i, j) in pairs {
        let distance = match (&cert.witnesses, cert.kind) {
            (Witnesses::Measures(ms), CertificateKind::ApartMeasures) => {
                counting::min_support_distance(&ms[i], &ms[j], cert.n)?
            }
            (Witnesses::Measures(_), CertificateKind::SeparatedMeasures)
            | (Witnesses::CodeMeasures { .. }, CertificateKind::SeparatedMeasures) => {
                // counting-side W_1 route: the ultrametric tree evaluator
                let ctx = BowenContext::bowen(cert.n)?;
                let mi = cert.witnesses.expand_measure(i)?;
                let mj = cert.witnesses.expand_measure(j)?;
                crate::measures::w1_ultrametric(&mi, &mj, Some(&ctx))?
            }
            (Witnesses::Sets(ss), CertificateKind::SeparatedSets) => {
                let ctx = BowenContext::bowen(cert.n)?;
                hausdorff(&ss[i], &ss[j], Some(&ctx))?
            }
            (Witnesses::Sets(ss), CertificateKind::SplitSets) => {
                // unions built from split bases are claimed H^n-separated
                let ctx = BowenContext::bowen(cert.n)?;
                hausdorff(&ss[i], &ss[j], Some(&ctx))?
            }
            _ => {
                return Err(Error::CertificateInvalid(
                    "witness type does not match certificate kind".into(),
                ))
            }
        };
        let ok = match cert.kind {
            CertificateKind::ApartMeasures => distance >= cert.epsilon,
            _ => distance > cert.epsilon,
        };
        if !ok {
            return Err(Error::VerificationFailed(format!(
                "pair ({i},{j}) at distance {distance} violates eps {} [{}]",
                cert.epsilon,
                cert.kind.as_str()
            )));
        }
        if let Some(rec) = lookup(i, j) {
            if rec.distance != distance {
                return Err(Error::VerificationFailed(format!(
                    "pair ({i},{j}) recorded distance {} does not reproduce ({distance})",
                    rec.distance
                )));
            }
            if distance < rec.bound {
                return Err(Error::VerificationFailed(format!(
                    "pair ({i},{j}) distance {distance} below recorded bound {}",
                    rec.bound
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::systems::SymbolicSystem;

    fn full2() -> System {
        SymbolicSystem::full_shift(2, ratio(1, 2)).unwrap()
    }

    #[test]
    fn code_n8_facts() {
        let code = build_half_weight_code(8, &CodeConfig::default()).unwrap();
        assert_eq!(code.stats.total_half_weight, BigUint::from(70u32));
        assert!(code.stats.stirling_bound_holds); // 70^2 * 16 = 78400 >= 65536
        assert_eq!(code.stats.ball_size_exact, Some(BigUint::from(17u32)));
        assert!(code.exhaustive);
        assert!(code.len() >= 2);
        // pairwise distances all even and above N/4 = 2
        for i in 0..code.len() {
            for j in (i + 1)..code.len() {
                let d = hamming_distance(&code.vectors()[i], &code.vectors()[j]);
                assert_eq!(d % 2, 0);
                assert!(d > 2);
            }
        }
        // code can never exceed C(N, N/2)
        assert!(BigUint::from(code.len()) <= code.stats.total_half_weight);
    }

    #[test]
    fn code_n16_ball_bound() {
        let code = build_half_weight_code(16, &CodeConfig::default()).unwrap();
        // exhaustive #U = sum_{k<=2} C(8,k)^2 = 1 + 64 + 784
        assert_eq!(code.stats.ball_size_exact, Some(BigUint::from(849u32)));
        assert!(biguint_ln(code.stats.ball_size_exact.as_ref().unwrap()) <= code.stats.ball_bound_ln);
        assert!(build_half_weight_code(12, &CodeConfig::default()).is_err());
    }

    #[test]
    fn periodic_apart_family_on_full_shift() {
        let sys = full2();
        let eps = ratio(3, 10);
        let cert = apart_measure_family(&sys, 3, &eps, 1 << 20).unwrap();
        // 16 words of length 4 collapse to the 6 period-4 orbit classes
        assert_eq!(cert.witnesses.len(), 6);
        assert!(cert.witnesses.len() * 4 >= 16);
        assert_eq!(cert.n, 3);
        verify_certificate(&cert, 10_000).unwrap();
        // re-verification through the counting path
        if let Witnesses::Measures(ms) = &cert.witnesses {
            let fam = counting::apart_count(ms, cert.n, &eps, &GreedyConfig::default()).unwrap();
            assert_eq!(fam.count(), ms.len());
        }
    }

    #[test]
    fn periodic_apart_family_on_golden_mean() {
        let sys = SymbolicSystem::golden_mean(ratio(1, 2)).unwrap();
        let eps = ratio(3, 10);
        let cert = apart_measure_family(&sys, 3, &eps, 1 << 20).unwrap();
        assert!(cert.n > 3, "SFT closure inserts a connector");
        verify_certificate(&cert, 10_000).unwrap();
    }

    #[test]
    fn fixed_points_always_apart() {
        let sys = full2();
        let a = periodic_orbit_measure(&sys, &[0], 6).unwrap();
        let b = periodic_orbit_measure(&sys, &[1], 6).unwrap();
        for n in 1..=5 {
            let d = counting::min_support_distance(&a, &b, n).unwrap();
            assert_eq!(d, ratio(1, 1));
        }
    }

    #[test]
    fn hamming_family_small() {
        let sys = full2();
        let eps = ratio(3, 10);
        // 8 Diracs on the length-3 words, pairwise (2, 0.3)-apart
        let base: Vec<DiscreteMeasure> =
            crate::systems::enumerate_cylinders(&sys, 3, 1 << 20)
                .unwrap()
                .into_iter()
                .map(DiscreteMeasure::dirac)
                .collect();
        let code = build_half_weight_code(8, &CodeConfig::default()).unwrap();
        let cert = hamming_measure_family(&base, 2, &eps, &code, VerifyMode::Full).unwrap();
        assert_eq!(cert.witnesses.len(), code.len());
        assert_eq!(cert.epsilon, &eps / ratio(4, 1));
        verify_certificate(&cert, 10_000).unwrap();
        // identical codewords are impossible: distances would be zero
        for pair in &cert.verification.checked {
            assert!(pair.distance >= pair.bound);
        }
    }

    #[test]
    fn hyperspace_families() {
        let sys = full2();
        let eps = ratio(3, 10);
        // 16 separated words at n = 3
        let pts = counting::packing_representatives(
            &sys,
            3,
            &eps,
            crate::counting::SepCmp::Ge,
            6,
            1 << 20,
        )
        .unwrap();
        let code = build_half_weight_code(16, &CodeConfig::default()).unwrap();
        let cert =
            hyperspace_separated_family(&pts, 3, &eps, &code, VerifyMode::Full).unwrap();
        assert_eq!(cert.witnesses.len(), code.len());
        verify_certificate(&cert, 100_000).unwrap();

        // split variant over two fixed-point orbit sets
        let b0 = crate::hyperspace::periodic_fixed_set(&sys, &[vec![0]], 6).unwrap();
        let b1 = crate::hyperspace::periodic_fixed_set(&sys, &[vec![1]], 6).unwrap();
        let d = min_cross_distance(&b0, &b1, Some(&BowenContext::bowen(2).unwrap())).unwrap();
        assert_eq!(d, ratio(1, 1));
        // unions of f-fixed sets stay f-fixed
        let both = crate::hyperspace::periodic_fixed_set(&sys, &[vec![0], vec![1]], 6).unwrap();
        let img = crate::hyperspace::image_set(&both).unwrap();
        let expect = crate::hyperspace::periodic_fixed_set(&sys, &[vec![0], vec![1]], 5).unwrap();
        assert_eq!(img, expect);
    }

    #[test]
    fn tampered_witness_detected() {
        let sys = full2();
        let eps = ratio(3, 10);
        let mut cert = apart_measure_family(&sys, 3, &eps, 1 << 20).unwrap();
        // swap one witness for a measure near another witness's orbit
        if let Witnesses::Measures(ms) = &mut cert.witnesses {
            ms[0] = ms[1].clone();
        }
        assert!(verify_certificate(&cert, 10_000).is_err());
    }
}
