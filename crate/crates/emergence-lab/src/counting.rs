//! Spanning, separated, apart and split counting over points, measures and
//! sets, plus the exact cylinder-combinatorics counters for shift spaces and
//! the Bolley-style simplex-grid measure covers.
//!
//! Inequality conventions follow the source definitions of each quantity and
//! are explicit on every view: point-space dynamical counts span with
//! `d_n < eps` and separate with `d_n >= eps`; measure and hyperspace counts
//! span with `<= eps` and separate with `> eps`; static counts separate
//! strictly. Ties at exactly `eps` are decided by the stated inequality,
//! never by tolerance.

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::hyperspace::{hausdorff, min_cross_distance, FiniteClosedSet};
use crate::measures::{w1_ultrametric, wasserstein, DiscreteMeasure};
use crate::rational::{biguint_ln, binomial, rational_ln};
use crate::systems::{base_distance, bowen_distance, BowenContext, CylinderPoint, System};
use crate::{Error, Result};

/// Which inequality admits a candidate into a covering ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanCmp {
    /// `d < eps` (point-space dynamical spanning)
    Lt,
    /// `d <= eps` (measure / hyperspace spanning, closed-ball covers)
    Le,
}

impl SpanCmp {
    pub fn admits(&self, d: &BigRational, eps: &BigRational) -> bool {
        match self {
            SpanCmp::Lt => d < eps,
            SpanCmp::Le => d <= eps,
        }
    }
}

/// Which inequality keeps a pair separated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepCmp {
    /// `d > eps` (static separation, measure/hyperspace separation, split)
    Gt,
    /// `d >= eps` (point-space dynamical separation, apart)
    Ge,
}

impl SepCmp {
    pub fn admits(&self, d: &BigRational, eps: &BigRational) -> bool {
        match self {
            SepCmp::Gt => d > eps,
            SepCmp::Ge => d >= eps,
        }
    }
}

/// Distance flavour for building views.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewMetric {
    Base,
    Bowen(usize),
    Mean(usize),
}

impl ViewMetric {
    fn ctx(&self) -> Result<Option<BowenContext>> {
        Ok(match self {
            ViewMetric::Base => None,
            ViewMetric::Bowen(n) => Some(BowenContext::bowen(*n)?),
            ViewMetric::Mean(n) => Some(BowenContext::new(*n, crate::systems::MetricMode::Mean)?),
        })
    }
}

/// A finite list of elements with an exact pairwise distance matrix and the
/// inequality conventions of the counting quantity it feeds.
#[derive(Debug, Clone)]
pub struct MetricSpaceView {
    pub labels: Vec<String>,
    matrix: Vec<BigRational>, // row-major, symmetric, zero diagonal
    size: usize,
    pub span_cmp: SpanCmp,
    pub sep_cmp: SepCmp,
}

impl MetricSpaceView {
    pub fn from_matrix(
        labels: Vec<String>,
        matrix: Vec<Vec<BigRational>>,
        span_cmp: SpanCmp,
        sep_cmp: SepCmp,
    ) -> Result<Self> {
        let size = labels.len();
        if matrix.len() != size || matrix.iter().any(|r| r.len() != size) {
            return Err(Error::Parse("distance matrix shape mismatch".into()));
        }
        Ok(MetricSpaceView {
            labels,
            matrix: matrix.into_iter().flatten().collect(),
            size,
            span_cmp,
            sep_cmp,
        })
    }

    /// Point view. Dynamical metrics span strictly and separate weakly;
    /// the static base metric spans strictly and separates strictly.
    pub fn from_points(points: &[CylinderPoint], metric: ViewMetric) -> Result<Self> {
        let ctx = metric.ctx()?;
        let matrix = point_distance_matrix(points, ctx.as_ref())?;
        let labels = points.iter().map(|p| p.to_string()).collect();
        let sep = match metric {
            ViewMetric::Base => SepCmp::Gt,
            _ => SepCmp::Ge,
        };
        Self::from_matrix(labels, matrix, SpanCmp::Lt, sep)
    }

    /// Measure view under `W_1` (optionally `W_1^n`): spans with `<=`,
    /// separates with `>`. Distances go through the ultrametric tree
    /// evaluator, the counting-side route for `W_1`.
    pub fn from_measures(measures: &[DiscreteMeasure], horizon: Option<usize>) -> Result<Self> {
        let ctx = match horizon {
            None => None,
            Some(n) => Some(BowenContext::bowen(n)?),
        };
        let matrix = measure_distance_matrix(measures, ctx.as_ref())?;
        let labels = (0..measures.len()).map(|i| format!("mu{i}")).collect();
        Self::from_matrix(labels, matrix, SpanCmp::Le, SepCmp::Gt)
    }

    /// Hyperspace view under `H` (optionally `H^n`): spans with `<=`,
    /// separates with `>`.
    pub fn from_sets(sets: &[FiniteClosedSet], horizon: Option<usize>) -> Result<Self> {
        let ctx = match horizon {
            None => None,
            Some(n) => Some(BowenContext::bowen(n)?),
        };
        let matrix = set_distance_matrix(sets, ctx.as_ref())?;
        let labels = (0..sets.len()).map(|i| format!("B{i}")).collect();
        Self::from_matrix(labels, matrix, SpanCmp::Le, SepCmp::Gt)
    }

    pub fn with_span_cmp(mut self, cmp: SpanCmp) -> Self {
        self.span_cmp = cmp;
        self
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> &BigRational {
        &self.matrix[i * self.size + j]
    }
}

/// Pairwise exact distances between points.
pub fn point_distance_matrix(
    points: &[CylinderPoint],
    ctx: Option<&BowenContext>,
) -> Result<Vec<Vec<BigRational>>> {
    symmetric_matrix(points.len(), |i, j| {
        let d = match ctx {
            None => base_distance(&points[i], &points[j])?,
            Some(c) => bowen_distance(&points[i], &points[j], c)?,
        };
        d.require_exact()
    })
}

/// Pairwise exact `W_1` (or `W_1^n`) distances between measures.
pub fn measure_distance_matrix(
    measures: &[DiscreteMeasure],
    ctx: Option<&BowenContext>,
) -> Result<Vec<Vec<BigRational>>> {
    symmetric_matrix(measures.len(), |i, j| {
        w1_ultrametric(&measures[i], &measures[j], ctx)
    })
}

/// Pairwise exact Hausdorff (or `H^n`) distances between sets.
pub fn set_distance_matrix(
    sets: &[FiniteClosedSet],
    ctx: Option<&BowenContext>,
) -> Result<Vec<Vec<BigRational>>> {
    symmetric_matrix(sets.len(), |i, j| hausdorff(&sets[i], &sets[j], ctx))
}

fn symmetric_matrix(
    n: usize,
    f: impl Fn(usize, usize) -> Result<BigRational> + Sync,
) -> Result<Vec<Vec<BigRational>>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let computed: Vec<Result<BigRational>> = pairs.par_iter().map(|&(i, j)| f(i, j)).collect();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for (&(i, j), d) in pairs.iter().zip(computed) {
        let d = d?;
        m[i][j] = d.clone();
        m[j][i] = d;
    }
    Ok(m)
}

/// Knobs for the greedy passes and the exact branch-and-bound modes.
#[derive(Debug, Clone)]
pub struct GreedyConfig {
    /// Seeded shuffled restarts after the deterministic lexicographic pass.
    pub restarts: usize,
    pub seed: u64,
    /// Largest view size exact modes accept.
    pub exact_cap: usize,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        GreedyConfig {
            restarts: 8,
            seed: 0,
            exact_cap: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Greedy,
    Exact,
}

/// Outcome of a packing computation: a witness family, pairwise verified
/// against the view's separation inequality.
#[derive(Debug, Clone)]
pub struct PackingOutcome {
    pub witness: Vec<usize>,
    pub exact: bool,
}

impl PackingOutcome {
    pub fn count(&self) -> usize {
        self.witness.len()
    }
}

/// Maximal (greedy) or maximum (exact) separated subset of the view.
pub fn packing_count(
    view: &MetricSpaceView,
    eps: &BigRational,
    strategy: Strategy,
    cfg: &GreedyConfig,
) -> Result<PackingOutcome> {
    if !eps.is_positive() {
        return Err(Error::Parse("eps must be positive".into()));
    }
    let n = view.len();
    let sep = |i: usize, j: usize| view.sep_cmp.admits(view.dist(i, j), eps);
    let greedy_pass = |order: &[usize]| -> Vec<usize> {
        let mut kept: Vec<usize> = Vec::new();
        for &i in order {
            if kept.iter().all(|&k| sep(i, k)) {
                kept.push(i);
            }
        }
        kept
    };
    match strategy {
        Strategy::Greedy => {
            let base: Vec<usize> = (0..n).collect();
            let mut best = greedy_pass(&base);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for _ in 0..cfg.restarts {
                let mut order = base.clone();
                order.shuffle(&mut rng);
                let got = greedy_pass(&order);
                if got.len() > best.len() {
                    best = got;
                }
            }
            best.sort_unstable();
            verify_packing(view, eps, &best)?;
            Ok(PackingOutcome {
                witness: best,
                exact: false,
            })
        }
        Strategy::Exact => {
            if n > cfg.exact_cap {
                return Err(Error::ResourceCap {
                    what: "exact packing".into(),
                    size: n.to_string(),
                    cap: cfg.exact_cap.to_string(),
                });
            }
            // maximum clique in the separation graph, branch and bound with
            // a greedy-coloring upper bound (vertices sharing a color are
            // pairwise non-separated, so a family takes at most one each)
            let adj: Vec<Vec<bool>> = (0..n)
                .map(|i| (0..n).map(|j| i != j && sep(i, j)).collect())
                .collect();
            fn color_sorted(adj: &[Vec<bool>], candidates: &[usize]) -> Vec<(usize, usize)> {
                let mut classes: Vec<Vec<usize>> = Vec::new();
                for &v in candidates {
                    match classes
                        .iter_mut()
                        .find(|class| class.iter().all(|&u| !adj[v][u]))
                    {
                        Some(class) => class.push(v),
                        None => classes.push(vec![v]),
                    }
                }
                // vertices labeled with their color index, colors ascending:
                // branching from the back sees the tightest bounds first
                classes
                    .iter()
                    .enumerate()
                    .flat_map(|(c, class)| class.iter().map(move |&v| (v, c + 1)))
                    .collect()
            }
            fn extend(
                adj: &[Vec<bool>],
                candidates: &[usize],
                current: &mut Vec<usize>,
                best: &mut Vec<usize>,
            ) {
                if candidates.is_empty() {
                    if current.len() > best.len() {
                        *best = current.clone();
                    }
                    return;
                }
                let colored = color_sorted(adj, candidates);
                for idx in (0..colored.len()).rev() {
                    let (v, bound) = colored[idx];
                    if current.len() + bound <= best.len() {
                        return;
                    }
                    let filtered: Vec<usize> = colored[..idx]
                        .iter()
                        .map(|&(u, _)| u)
                        .filter(|&u| adj[v][u])
                        .collect();
                    current.push(v);
                    extend(adj, &filtered, current, best);
                    current.pop();
                }
            }
            let mut best: Vec<usize> = greedy_pass(&(0..n).collect::<Vec<_>>());
            let mut current: Vec<usize> = Vec::new();
            extend(&adj, &(0..n).collect::<Vec<_>>(), &mut current, &mut best);
            best.sort_unstable();
            verify_packing(view, eps, &best)?;
            Ok(PackingOutcome {
                witness: best,
                exact: true,
            })
        }
    }
}

/// Re-check a packing witness pairwise against the view inequality.
pub fn verify_packing(view: &MetricSpaceView, eps: &BigRational, witness: &[usize]) -> Result<()> {
    for (a, &i) in witness.iter().enumerate() {
        for &j in &witness[a + 1..] {
            if !view.sep_cmp.admits(view.dist(i, j), eps) {
                return Err(Error::VerificationFailed(format!(
                    "pair ({}, {}) at distance {} is not separated at eps {}",
                    view.labels[i],
                    view.labels[j],
                    view.dist(i, j),
                    eps
                )));
            }
        }
    }
    Ok(())
}

/// A covering instance: candidate centers against the covered elements.
/// Centers may lie outside the covered family.
#[derive(Debug, Clone)]
pub struct CoverInstance {
    /// `cand_to_elem[c][e]` = distance from candidate `c` to element `e`.
    pub cand_to_elem: Vec<Vec<BigRational>>,
    pub span_cmp: SpanCmp,
}

impl CoverInstance {
    /// Cover the view by its own elements.
    pub fn self_cover(view: &MetricSpaceView) -> Self {
        let n = view.len();
        CoverInstance {
            cand_to_elem: (0..n)
                .map(|c| (0..n).map(|e| view.dist(c, e).clone()).collect())
                .collect(),
            span_cmp: view.span_cmp,
        }
    }

    fn covers(&self, c: usize, e: usize, eps: &BigRational) -> bool {
        self.span_cmp.admits(&self.cand_to_elem[c][e], eps)
    }
}

#[derive(Debug, Clone)]
pub struct CoveringOutcome {
    pub centers: Vec<usize>,
    pub exact: bool,
}

impl CoveringOutcome {
    pub fn count(&self) -> usize {
        self.centers.len()
    }
}

/// Greedy set cover (certified upper bound) or exact minimum cover for
/// small instances. Errors if some element is covered by no candidate.
pub fn covering_count(
    instance: &CoverInstance,
    eps: &BigRational,
    strategy: Strategy,
    cfg: &GreedyConfig,
) -> Result<CoveringOutcome> {
    if !eps.is_positive() {
        return Err(Error::Parse("eps must be positive".into()));
    }
    let n_cand = instance.cand_to_elem.len();
    let n_elem = instance.cand_to_elem.first().map_or(0, |r| r.len());
    if n_elem == 0 {
        return Ok(CoveringOutcome {
            centers: vec![],
            exact: true,
        });
    }
    let cover_sets: Vec<Vec<usize>> = (0..n_cand)
        .map(|c| (0..n_elem).filter(|&e| instance.covers(c, e, eps)).collect())
        .collect();
    for e in 0..n_elem {
        if !cover_sets.iter().any(|s| s.contains(&e)) {
            return Err(Error::InfeasibleCover { element: e });
        }
    }
    match strategy {
        Strategy::Greedy => {
            let mut uncovered: Vec<bool> = vec![true; n_elem];
            let mut remaining = n_elem;
            let mut centers = Vec::new();
            while remaining > 0 {
                let (best, gain) = (0..n_cand)
                    .map(|c| (c, cover_sets[c].iter().filter(|&&e| uncovered[e]).count()))
                    .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                    .unwrap();
                debug_assert!(gain > 0);
                centers.push(best);
                for &e in &cover_sets[best] {
                    if uncovered[e] {
                        uncovered[e] = false;
                        remaining -= 1;
                    }
                }
            }
            centers.sort_unstable();
            Ok(CoveringOutcome {
                centers,
                exact: false,
            })
        }
        Strategy::Exact => {
            if n_elem > cfg.exact_cap || n_cand > 4 * cfg.exact_cap {
                return Err(Error::ResourceCap {
                    what: "exact covering".into(),
                    size: format!("{n_cand}x{n_elem}"),
                    cap: cfg.exact_cap.to_string(),
                });
            }
            let greedy = covering_count(instance, eps, Strategy::Greedy, cfg)?;
            let mut best: Vec<usize> = greedy.centers;
            let max_gain = cover_sets.iter().map(|s| s.len()).max().unwrap_or(1).max(1);
            fn search(
                cover_sets: &[Vec<usize>],
                max_gain: usize,
                uncovered: &mut Vec<bool>,
                remaining: usize,
                current: &mut Vec<usize>,
                best: &mut Vec<usize>,
            ) {
                if remaining == 0 {
                    if current.len() < best.len() {
                        *best = current.clone();
                    }
                    return;
                }
                let need = remaining.div_ceil(max_gain);
                if current.len() + need >= best.len() {
                    return;
                }
                // element-driven branching: cover the first uncovered element
                let e = uncovered.iter().position(|&u| u).unwrap();
                for c in 0..cover_sets.len() {
                    if !cover_sets[c].contains(&e) {
                        continue;
                    }
                    let newly: Vec<usize> = cover_sets[c]
                        .iter()
                        .copied()
                        .filter(|&x| uncovered[x])
                        .collect();
                    for &x in &newly {
                        uncovered[x] = false;
                    }
                    current.push(c);
                    search(
                        cover_sets,
                        max_gain,
                        uncovered,
                        remaining - newly.len(),
                        current,
                        best,
                    );
                    current.pop();
                    for &x in &newly {
                        uncovered[x] = true;
                    }
                }
            }
            let mut uncovered = vec![true; n_elem];
            let mut current = Vec::new();
            search(
                &cover_sets,
                max_gain,
                &mut uncovered,
                n_elem,
                &mut current,
                &mut best,
            );
            best.sort_unstable();
            Ok(CoveringOutcome {
                centers: best,
                exact: true,
            })
        }
    }
}

/// Certified two-sided bracket for a count at one scale, with the exact
/// value when the two sides pin it down.
#[derive(Debug, Clone)]
pub struct CountBracket {
    /// Size of a verified separated family (a packing witness).
    pub lower: BigUint,
    /// Size of a verified covering.
    pub upper: BigUint,
    pub exact: Option<BigUint>,
}

impl CountBracket {
    pub fn new(lower: BigUint, upper: BigUint) -> Self {
        let exact = (lower == upper).then(|| lower.clone());
        CountBracket {
            lower,
            upper,
            exact,
        }
    }

    pub fn exact_value(value: BigUint) -> Self {
        CountBracket {
            lower: value.clone(),
            upper: value.clone(),
            exact: Some(value),
        }
    }
}

/// Pairwise support-level separation of measures: `(n,eps)`-apart requires
/// `min { d_n(x,y) : x in supp(mu), y in supp(nu) } >= eps`.
pub fn measures_apart(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    n: usize,
    eps: &BigRational,
) -> Result<bool> {
    Ok(min_support_distance(mu, nu, n)? >= *eps)
}

/// `min { d_n(x,y) }` over the two supports.
pub fn min_support_distance(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    n: usize,
) -> Result<BigRational> {
    let ctx = BowenContext::bowen(n)?;
    let mut best: Option<BigRational> = None;
    for (x, _) in mu.atoms() {
        for (y, _) in nu.atoms() {
            let d = bowen_distance(x, y, &ctx)?.require_exact()?;
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
        }
    }
    Ok(best.unwrap())
}

#[derive(Debug, Clone)]
pub struct FamilyOutcome {
    pub witness: Vec<usize>,
}

impl FamilyOutcome {
    pub fn count(&self) -> usize {
        self.witness.len()
    }
}

/// Greedy maximal pairwise `(n,eps)`-apart subfamily (support distance
/// `>= eps`), verified before returning.
pub fn apart_count(
    measures: &[DiscreteMeasure],
    n: usize,
    eps: &BigRational,
    cfg: &GreedyConfig,
) -> Result<FamilyOutcome> {
    let matrix = support_distance_matrix(measures, n)?;
    greedy_family(&matrix, eps, SepCmp::Ge, cfg)
}

/// Greedy maximal pairwise `(n,eps)`-split subfamily of sets (min cross
/// distance `> eps`), verified before returning.
pub fn split_count(
    sets: &[FiniteClosedSet],
    n: usize,
    eps: &BigRational,
    cfg: &GreedyConfig,
) -> Result<FamilyOutcome> {
    let ctx = BowenContext::bowen(n)?;
    let matrix = symmetric_matrix(sets.len(), |i, j| {
        min_cross_distance(&sets[i], &sets[j], Some(&ctx))
    })?;
    greedy_family(&matrix, eps, SepCmp::Gt, cfg)
}

/// Pairwise min support distances at horizon `n`.
pub fn support_distance_matrix(
    measures: &[DiscreteMeasure],
    n: usize,
) -> Result<Vec<Vec<BigRational>>> {
    symmetric_matrix(measures.len(), |i, j| {
        min_support_distance(&measures[i], &measures[j], n)
    })
}

fn greedy_family(
    matrix: &[Vec<BigRational>],
    eps: &BigRational,
    cmp: SepCmp,
    cfg: &GreedyConfig,
) -> Result<FamilyOutcome> {
    let n = matrix.len();
    let pass = |order: &[usize]| -> Vec<usize> {
        let mut kept: Vec<usize> = Vec::new();
        for &i in order {
            if kept.iter().all(|&k| cmp.admits(&matrix[i][k], eps)) {
                kept.push(i);
            }
        }
        kept
    };
    let base: Vec<usize> = (0..n).collect();
    let mut best = pass(&base);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.restarts {
        let mut order = base.clone();
        order.shuffle(&mut rng);
        let got = pass(&order);
        if got.len() > best.len() {
            best = got;
        }
    }
    best.sort_unstable();
    for (a, &i) in best.iter().enumerate() {
        for &j in &best[a + 1..] {
            if !cmp.admits(&matrix[i][j], eps) {
                return Err(Error::VerificationFailed(format!(
                    "family pair ({i},{j}) at distance {} fails at eps {eps}",
                    matrix[i][j]
                )));
            }
        }
    }
    Ok(FamilyOutcome { witness: best })
}

// ---------------------------------------------------------------------------
// Exact cylinder-combinatorics counts for shift spaces under the lambda
// ultrametric. A d_n-ball of radius eps is exactly a cylinder, because
// d_n(x,y) = lambda^{max(0, j-n+1)} with j the first disagreement index:
//
//   covering: balls are cylinders of length n-1+e, where e is the least
//             exponent with lambda^e (< or <=) eps; count = W(n-1+e)
//   packing:  maximal families take one word per cylinder of length n+e*,
//             e* the largest exponent with lambda^{e*} (> or >=) eps;
//             count = W(n+e*)
//
// with W the admissible word count. Validated against the generic matrix
// path on small instances in the tests.
// ---------------------------------------------------------------------------

/// Exact `(n,eps)` covering number of the whole shift space.
pub fn dyn_covering_count(
    system: &System,
    n: usize,
    eps: &BigRational,
    cmp: SpanCmp,
) -> Result<BigUint> {
    if n == 0 || !eps.is_positive() {
        return Err(Error::Parse("need n >= 1 and eps > 0".into()));
    }
    let e = system.cover_exponent(eps, matches!(cmp, SpanCmp::Lt));
    if e == 0 {
        return Ok(BigUint::one());
    }
    Ok(system.word_count(n - 1 + e))
}

/// Exact `(n,eps)` packing (separation) number of the whole shift space.
pub fn dyn_packing_count(
    system: &System,
    n: usize,
    eps: &BigRational,
    cmp: SepCmp,
) -> Result<BigUint> {
    if n == 0 || !eps.is_positive() {
        return Err(Error::Parse("need n >= 1 and eps > 0".into()));
    }
    match system.packing_exponent(eps, matches!(cmp, SepCmp::Gt)) {
        None => Ok(BigUint::one()),
        Some(e) => Ok(system.word_count(n + e)),
    }
}

/// Representative points of the minimal `(n,eps)`-spanning set: one point
/// per covering cylinder, extended to `resolution` symbols.
pub fn spanning_representatives(
    system: &System,
    n: usize,
    eps: &BigRational,
    cmp: SpanCmp,
    resolution: usize,
    cap: u64,
) -> Result<Vec<CylinderPoint>> {
    let e = system.cover_exponent(eps, matches!(cmp, SpanCmp::Lt));
    let len = if e == 0 { 1 } else { n - 1 + e };
    let words = crate::systems::enumerate_cylinders(system, len, cap)?;
    words
        .into_iter()
        .map(|w| w.extend_least(resolution.max(len)))
        .collect()
}

/// Representative points of a maximum `(n,eps)`-separated set.
pub fn packing_representatives(
    system: &System,
    n: usize,
    eps: &BigRational,
    cmp: SepCmp,
    resolution: usize,
    cap: u64,
) -> Result<Vec<CylinderPoint>> {
    let len = match system.packing_exponent(eps, matches!(cmp, SepCmp::Gt)) {
        None => 1,
        Some(e) => n + e,
    };
    let words = crate::systems::enumerate_cylinders(system, len, cap)?;
    words
        .into_iter()
        .map(|w| w.extend_least(resolution.max(len)))
        .collect()
}

// ---------------------------------------------------------------------------
// Bolley-style measure covers
// ---------------------------------------------------------------------------

/// A constructed (possibly virtual) spanning family for the measure space
/// at radius `delta` in `W_p` (optionally `W_p^n` via `horizon`): measures
/// supported on a closed delta/2-cover with weights on a 1/K simplex grid.
#[derive(Debug, Clone)]
pub struct BolleyCover {
    pub delta: BigRational,
    pub p: u32,
    pub horizon: Option<usize>,
    /// Number of centers: the closed-ball covering number at radius delta/2.
    pub centers: BigUint,
    /// Weight grid resolution `K >= centers * (2 diam / delta)^p`.
    pub grid: BigUint,
    /// `C(K + N - 1, N - 1)`: number of grid measures.
    pub family_size: BigUint,
    /// `ln` of the covering bound `(8 e diam / delta)^{p N}`.
    pub bound_ln: f64,
    /// `ln` of the constructed family size.
    pub family_ln: f64,
    /// Materialized family (only when within cap).
    pub family: Option<Vec<DiscreteMeasure>>,
    center_points: Option<Vec<CylinderPoint>>,
}

/// Build the simplex-grid cover. The family is materialized when its size
/// fits `materialize_cap`, otherwise only its exact cardinality and the
/// bound check are produced.
pub fn bolley_cover(
    system: &System,
    delta: &BigRational,
    p: u32,
    horizon: Option<usize>,
    materialize_cap: u64,
    enumeration_cap: u64,
) -> Result<BolleyCover> {
    if !delta.is_positive() || *delta >= system.diameter() {
        return Err(Error::Parse("delta must lie in (0, diam)".into()));
    }
    if !(1..=3).contains(&p) {
        return Err(Error::Parse("p must be 1..=3".into()));
    }
    let n = horizon.unwrap_or(1);
    let half = delta / BigRational::from_integer(2.into());
    let centers_count = dyn_covering_count(system, n, &half, SpanCmp::Le)?;
    let n_centers = centers_count.to_u64().ok_or_else(|| Error::ResourceCap {
        what: "bolley centers".into(),
        size: centers_count.to_string(),
        cap: u64::MAX.to_string(),
    })?;
    // K >= N * (2 diam / delta)^p keeps the weight-rounding move within delta/2
    let two_diam_ratio = BigRational::from_integer(2.into()) * system.diameter() / delta;
    let ratio_p = crate::rational::pow_rational(&two_diam_ratio, p as usize);
    let k_exact = BigRational::from_integer(BigInt::from(n_centers)) * ratio_p;
    let grid = k_exact.ceil().to_integer().magnitude().clone();
    let grid_u64 = grid.to_u64().ok_or_else(|| Error::ResourceCap {
        what: "bolley grid".into(),
        size: grid.to_string(),
        cap: u64::MAX.to_string(),
    })?;
    let family_size = binomial(grid_u64 + n_centers - 1, n_centers - 1);
    let family_ln = biguint_ln(&family_size);
    // ln (8 e D / delta)^{pN} = pN * (ln(8 D / delta) + 1)
    let bound_ln = p as f64
        * n_centers as f64
        * (rational_ln(&(BigRational::from_integer(8.into()) * system.diameter() / delta)) + 1.0);
    if family_ln > bound_ln {
        return Err(Error::VerificationFailed(format!(
            "constructed family of ln-size {family_ln} exceeds covering bound ln {bound_ln}"
        )));
    }

    let materialize = family_size <= BigUint::from(materialize_cap);
    let mut family = None;
    let mut center_points = None;
    if materialize {
        let e = system.cover_exponent(&half, false);
        let len = if e == 0 { 1 } else { n - 1 + e };
        let reps =
            spanning_representatives(system, n, &half, SpanCmp::Le, len + 2, enumeration_cap)?;
        let mut measures = Vec::new();
        let mut weights = vec![0u64; reps.len()];
        build_compositions(grid_u64, 0, &mut weights, &mut |w| {
            let atoms: Vec<(CylinderPoint, BigRational)> = reps
                .iter()
                .zip(w)
                .filter(|(_, &wi)| wi > 0)
                .map(|(pt, &wi)| {
                    (
                        pt.clone(),
                        BigRational::new(BigInt::from(wi), BigInt::from(grid_u64)),
                    )
                })
                .collect();
            measures.push(DiscreteMeasure::new(system, atoms).expect("grid weights sum to 1"));
        });
        debug_assert_eq!(BigUint::from(measures.len()), family_size);
        family = Some(measures);
        center_points = Some(reps);
    }
    Ok(BolleyCover {
        delta: delta.clone(),
        p,
        horizon,
        centers: centers_count,
        grid,
        family_size,
        bound_ln,
        family_ln,
        family,
        center_points,
    })
}

fn build_compositions(total: u64, idx: usize, slots: &mut Vec<u64>, f: &mut impl FnMut(&Vec<u64>)) {
    if idx + 1 == slots.len() {
        slots[idx] = total;
        f(slots);
        slots[idx] = 0;
        return;
    }
    for take in 0..=total {
        slots[idx] = take;
        build_compositions(total - take, idx + 1, slots, f);
    }
    slots[idx] = 0;
}

impl BolleyCover {
    /// The constructive spanning map: snap every atom to its nearest center
    /// and round weights onto the grid (largest remainders keep the total).
    /// Only available when the family was materialized.
    pub fn snap(&self, mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        let centers = self.center_points.as_ref().ok_or_else(|| Error::ResourceCap {
            what: "bolley snap on virtual family".into(),
            size: self.family_size.to_string(),
            cap: "materialize_cap".to_string(),
        })?;
        let ctx = match self.horizon {
            None => None,
            Some(n) => Some(BowenContext::bowen(n)?),
        };
        let half = &self.delta / BigRational::from_integer(2.into());
        let mut mass = vec![BigRational::zero(); centers.len()];
        'atom: for (x, w) in mu.atoms() {
            for (ci, c) in centers.iter().enumerate() {
                let d = match &ctx {
                    None => base_distance(x, c)?,
                    Some(cx) => bowen_distance(x, c, cx)?,
                };
                if d.require_exact()? <= half {
                    mass[ci] += w;
                    continue 'atom;
                }
            }
            return Err(Error::InfeasibleCover { element: 0 });
        }
        // round to multiples of 1/K by largest remainder
        let k = BigInt::from(self.grid.clone());
        let kq = BigRational::from_integer(k.clone());
        let mut floors: Vec<BigInt> = Vec::new();
        let mut rems: Vec<(BigRational, usize)> = Vec::new();
        for (i, m) in mass.iter().enumerate() {
            let scaled = m * &kq;
            let fl = scaled.floor();
            rems.push((&scaled - &fl, i));
            floors.push(fl.to_integer());
        }
        let assigned: BigInt = floors.iter().sum();
        let mut need = &k - &assigned;
        rems.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut ri = 0;
        while need.is_positive() {
            floors[rems[ri].1] += 1;
            need -= BigInt::one();
            ri += 1;
        }
        let atoms: Vec<(CylinderPoint, BigRational)> = centers
            .iter()
            .zip(&floors)
            .filter(|(_, f)| f.is_positive())
            .map(|(c, f)| (c.clone(), BigRational::new(f.clone(), k.clone())))
            .collect();
        DiscreteMeasure::new(mu.system(), atoms)
    }

    /// Verify that `mu` is within `delta` of its snapped image in `W_p`
    /// (exact comparison of p-th powers).
    pub fn verify_spanning(&self, mu: &DiscreteMeasure) -> Result<bool> {
        let snapped = self.snap(mu)?;
        let ctx = match self.horizon {
            None => None,
            Some(n) => Some(BowenContext::bowen(n)?),
        };
        let w = wasserstein(mu, &snapped, self.p, ctx.as_ref())?;
        Ok(w.cost_pow_p <= crate::rational::pow_rational(&self.delta, self.p as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::systems::{enumerate_cylinders, SymbolicSystem};

    fn full2() -> System {
        SymbolicSystem::full_shift(2, ratio(1, 2)).unwrap()
    }

    #[test]
    fn sixteen_separated_and_sixteen_covering() {
        let sys = full2();
        let eps = ratio(3, 10);
        // S(f, 3, 0.3): all 16 length-4 cylinders are pairwise d_3 >= 1/2
        let pts = enumerate_cylinders(&sys, 4, 1 << 20).unwrap();
        let view = MetricSpaceView::from_points(&pts, ViewMetric::Bowen(3)).unwrap();
        let cfg = GreedyConfig::default();
        let pack = packing_count(&view, &eps, Strategy::Exact, &cfg).unwrap();
        assert_eq!(pack.count(), 16);
        let cover = covering_count(
            &CoverInstance::self_cover(&view),
            &eps,
            Strategy::Exact,
            &cfg,
        )
        .unwrap();
        assert_eq!(cover.count(), 16);
        // matches the closed-form reduction
        assert_eq!(
            dyn_packing_count(&sys, 3, &eps, SepCmp::Ge).unwrap(),
            BigUint::from(16u32)
        );
        assert_eq!(
            dyn_covering_count(&sys, 3, &eps, SpanCmp::Lt).unwrap(),
            BigUint::from(16u32)
        );
    }

    #[test]
    fn reduction_matches_generic_path_on_grid() {
        // cylinder reduction == generic matrix counting, full shift and SFT
        let cfg = GreedyConfig {
            exact_cap: 70,
            ..GreedyConfig::default()
        };
        for sys in [full2(), SymbolicSystem::golden_mean(ratio(1, 2)).unwrap()] {
            for n in 1..=3usize {
                for ke in 1..=2usize {
                    let eps = crate::rational::pow_rational(&ratio(1, 2), ke);
                    // enumerate at a resolution deep enough for both counts
                    let len = n + ke + 1;
                    let pts = enumerate_cylinders(&sys, len, 1 << 20).unwrap();
                    let view = MetricSpaceView::from_points(&pts, ViewMetric::Bowen(n)).unwrap();
                    let pack = packing_count(&view, &eps, Strategy::Exact, &cfg).unwrap();
                    assert_eq!(
                        BigUint::from(pack.count()),
                        dyn_packing_count(&sys, n, &eps, SepCmp::Ge).unwrap(),
                        "packing mismatch at n={n} eps=1/2^{ke}"
                    );
                    let cover = covering_count(
                        &CoverInstance::self_cover(&view),
                        &eps,
                        Strategy::Exact,
                        &cfg,
                    )
                    .unwrap();
                    assert_eq!(
                        BigUint::from(cover.count()),
                        dyn_covering_count(&sys, n, &eps, SpanCmp::Lt).unwrap(),
                        "covering mismatch at n={n} eps=1/2^{ke}"
                    );
                }
            }
        }
    }

    #[test]
    fn eps_above_diameter_collapses() {
        let sys = full2();
        let pts = enumerate_cylinders(&sys, 3, 1 << 20).unwrap();
        let view = MetricSpaceView::from_points(&pts, ViewMetric::Bowen(2)).unwrap();
        let cfg = GreedyConfig::default();
        let eps = ratio(3, 2);
        let pack = packing_count(&view, &eps, Strategy::Exact, &cfg).unwrap();
        assert_eq!(pack.count(), 1);
        let inst = CoverInstance {
            span_cmp: SpanCmp::Le,
            ..CoverInstance::self_cover(&view)
        };
        let cover = covering_count(&inst, &ratio(1, 1), Strategy::Exact, &cfg).unwrap();
        assert_eq!(cover.count(), 1);
        assert_eq!(
            dyn_packing_count(&sys, 2, &eps, SepCmp::Ge).unwrap(),
            BigUint::one()
        );
    }

    #[test]
    fn greedy_brackets_exact() {
        let sys = full2();
        let pts = enumerate_cylinders(&sys, 4, 1 << 20).unwrap();
        let view = MetricSpaceView::from_points(&pts, ViewMetric::Bowen(2)).unwrap();
        let cfg = GreedyConfig::default();
        for eps in [ratio(3, 10), ratio(3, 5), ratio(1, 7)] {
            let greedy = packing_count(&view, &eps, Strategy::Greedy, &cfg).unwrap();
            let exact = packing_count(&view, &eps, Strategy::Exact, &cfg).unwrap();
            assert!(greedy.count() <= exact.count());
            let inst = CoverInstance::self_cover(&view);
            let gcover = covering_count(&inst, &eps, Strategy::Greedy, &cfg).unwrap();
            let ecover = covering_count(&inst, &eps, Strategy::Exact, &cfg).unwrap();
            assert!(gcover.count() >= ecover.count());
            // the two-sided chain S(2eps) <= N(eps) <= S(eps), away from ties
            let two_eps = &eps * ratio(2, 1);
            let s2 = packing_count(&view, &two_eps, Strategy::Exact, &cfg).unwrap();
            assert!(s2.count() <= ecover.count());
            assert!(ecover.count() <= exact.count());
        }
    }

    #[test]
    fn count_monotonicity() {
        let sys = full2();
        for cmp in [SpanCmp::Lt, SpanCmp::Le] {
            let mut prev: Option<BigUint> = None;
            for k in 1..=5 {
                let eps = crate::rational::pow_rational(&ratio(1, 2), k);
                let c = dyn_covering_count(&sys, 4, &eps, cmp).unwrap();
                if let Some(p) = prev {
                    assert!(c >= p, "counts must not drop as eps shrinks");
                }
                prev = Some(c);
            }
        }
        let eps = ratio(3, 10);
        let mut prev: Option<BigUint> = None;
        for n in 1..=8 {
            let c = dyn_packing_count(&sys, n, &eps, SepCmp::Ge).unwrap();
            if let Some(p) = prev {
                assert!(c >= p, "counts must not drop as n grows");
            }
            prev = Some(c);
        }
    }

    #[test]
    fn apart_and_split_examples() {
        let sys = full2();
        let eps = ratio(3, 10);
        let cfg = GreedyConfig::default();
        let pts = enumerate_cylinders(&sys, 4, 1 << 20).unwrap();
        let diracs: Vec<DiscreteMeasure> = pts
            .iter()
            .map(|p| DiscreteMeasure::dirac(p.clone()))
            .collect();
        let fam = apart_count(&diracs, 3, &eps, &cfg).unwrap();
        assert_eq!(fam.count(), 16);
        // sharing an atom kills apartness at every eps > 0
        let mu = DiscreteMeasure::uniform(&sys, vec![pts[0].clone(), pts[1].clone()]).unwrap();
        let nu = DiscreteMeasure::uniform(&sys, vec![pts[1].clone(), pts[2].clone()]).unwrap();
        assert!(!measures_apart(&mu, &nu, 3, &ratio(1, 1000)).unwrap());
        // split singletons mirror the separated count
        let sets: Vec<FiniteClosedSet> = pts
            .iter()
            .map(|p| FiniteClosedSet::singleton(p.clone()))
            .collect();
        let split = split_count(&sets, 3, &eps, &cfg).unwrap();
        assert_eq!(split.count(), 16);
        // overlapping sets are never split
        let a = FiniteClosedSet::new(&sys, vec![pts[0].clone(), pts[1].clone()]).unwrap();
        let b = FiniteClosedSet::new(&sys, vec![pts[1].clone(), pts[3].clone()]).unwrap();
        let got = split_count(&[a, b], 3, &eps, &cfg).unwrap();
        assert_eq!(got.count(), 1);
    }

    #[test]
    fn bolley_desk_case() {
        let sys = full2();
        let delta = ratio(1, 2);
        let cover = bolley_cover(&sys, &delta, 1, None, 2000, 1 << 20).unwrap();
        assert_eq!(cover.centers, BigUint::from(4u32));
        assert_eq!(cover.grid, BigUint::from(16u32));
        assert_eq!(cover.family_size, BigUint::from(969u32));
        assert!(cover.family_ln <= cover.bound_ln);
        let family = cover.family.as_ref().unwrap();
        assert_eq!(family.len(), 969);
        // explicit spanning for a random-ish measure
        let pts = enumerate_cylinders(&sys, 4, 1 << 20).unwrap();
        let mu = DiscreteMeasure::new(
            &sys,
            vec![
                (pts[3].clone(), ratio(2, 7)),
                (pts[9].clone(), ratio(4, 7)),
                (pts[14].clone(), ratio(1, 7)),
            ],
        )
        .unwrap();
        assert!(cover.verify_spanning(&mu).unwrap());
    }

    #[test]
    fn measure_chain_small() {
        // N_M <= S_M <= N_M(eps/2) with exact modes on a small family
        let sys = full2();
        let pts = enumerate_cylinders(&sys, 3, 1 << 20).unwrap();
        let measures: Vec<DiscreteMeasure> = pts
            .iter()
            .map(|p| DiscreteMeasure::dirac(p.clone()))
            .collect();
        let view = MetricSpaceView::from_measures(&measures, Some(2)).unwrap();
        let cfg = GreedyConfig::default();
        for eps in [ratio(3, 10), ratio(1, 5), ratio(2, 3)] {
            let n_m = covering_count(
                &CoverInstance::self_cover(&view),
                &eps,
                Strategy::Exact,
                &cfg,
            )
            .unwrap()
            .count();
            let s_m = packing_count(&view, &eps, Strategy::Exact, &cfg)
                .unwrap()
                .count();
            let half = &eps / ratio(2, 1);
            let n_half = covering_count(
                &CoverInstance::self_cover(&view),
                &half,
                Strategy::Exact,
                &cfg,
            )
            .unwrap()
            .count();
            assert!(n_m <= s_m && s_m <= n_half, "chain failed at eps {eps}");
        }
    }
}
