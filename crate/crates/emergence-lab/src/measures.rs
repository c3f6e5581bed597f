//! Finitely supported probability measures on cylinder points, with exact
//! Wasserstein and Levy-Prokhorov distances and their dynamical variants.
//!
//! `wasserstein` runs an exact min-cost flow (successive shortest paths over
//! scaled integers). `w1_ultrametric` evaluates the same `W_1` through the
//! ball-tree decomposition of the ultrametric; the two routes are kept
//! independent on purpose and cross-checked in tests.

pub mod transport;

use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::rational::pow_rational;
use crate::systems::{
    base_distance, bowen_distance, check_same_system, BowenContext, CylinderPoint, System,
};
use crate::{Error, Result};

/// A finitely supported probability measure. Atoms are kept sorted by word
/// and merged; weights are positive rationals summing to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMeasure {
    atoms: Vec<(CylinderPoint, BigRational)>,
    system: System,
}

impl DiscreteMeasure {
    pub fn new(system: &System, atoms: Vec<(CylinderPoint, BigRational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let mut merged: Vec<(CylinderPoint, BigRational)> = Vec::new();
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        for (pt, w) in sorted {
            check_same_system(system, pt.system())?;
            if w.is_negative() {
                return Err(Error::InvalidMeasure(format!("negative weight {w}")));
            }
            if w.is_zero() {
                continue;
            }
            match merged.last_mut() {
                Some((prev, pw)) if *prev == pt => *pw += w,
                _ => merged.push((pt, w)),
            }
        }
        let total: BigRational = merged.iter().map(|(_, w)| w.clone()).sum();
        if total != BigRational::one() {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(DiscreteMeasure {
            atoms: merged,
            system: system.clone(),
        })
    }

    /// The Dirac measure at a point.
    pub fn dirac(point: CylinderPoint) -> Self {
        let system = point.system().clone();
        DiscreteMeasure {
            atoms: vec![(point, BigRational::one())],
            system,
        }
    }

    /// Uniform measure on distinct points.
    pub fn uniform(system: &System, points: Vec<CylinderPoint>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let w = BigRational::new(1.into(), (n as i64).into());
        Self::new(system, points.into_iter().map(|p| (p, w.clone())).collect())
    }

    pub fn atoms(&self) -> &[(CylinderPoint, BigRational)] {
        &self.atoms
    }

    pub fn support(&self) -> impl Iterator<Item = &CylinderPoint> {
        self.atoms.iter().map(|(p, _)| p)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    /// Image under the induced map: shift every atom, merging collisions.
    pub fn pushforward(&self) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|(p, w)| Ok((p.shift()?, w.clone())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&self.system, atoms)
    }

    /// `i`-fold pushforward.
    pub fn pushforward_iter(&self, i: usize) -> Result<Self> {
        let mut mu = self.clone();
        for _ in 0..i {
            mu = mu.pushforward()?;
        }
        Ok(mu)
    }
}

/// The `n`-th empirical measure `(1/n) sum_i delta_{f^i x}`.
pub fn empirical_measure(x: &CylinderPoint, n: usize) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::Parse("empirical horizon must be >= 1".into()));
    }
    if x.len() < n {
        return Err(Error::WordTooShort {
            needed: n,
            got: x.len(),
        });
    }
    let w = BigRational::new(1.into(), (n as i64).into());
    let mut atoms = Vec::with_capacity(n);
    let mut cur = x.clone();
    for i in 0..n {
        atoms.push((cur.clone(), w.clone()));
        if i + 1 < n {
            cur = cur.shift()?;
        }
    }
    DiscreteMeasure::new(x.system(), atoms)
}

/// Uniform measure on the orbit of the periodic point `word^infinity`,
/// with every atom written at the requested resolution.
///
/// The result is invariant under `pushforward` at matched resolution: the
/// image at resolution `L` equals the measure rebuilt at resolution `L - 1`.
pub fn periodic_orbit_measure(
    system: &System,
    word: &[u8],
    resolution: usize,
) -> Result<DiscreteMeasure> {
    let base = CylinderPoint::new(system, word.to_vec())?;
    let p = word.len();
    if !system.allows(word[p - 1], word[0]) {
        return Err(Error::CyclicInadmissible(base.to_string()));
    }
    let mut rotations: Vec<Vec<u8>> = Vec::new();
    for k in 0..p {
        let rot: Vec<u8> = (0..p).map(|i| word[(k + i) % p]).collect();
        if !rotations.contains(&rot) {
            rotations.push(rot);
        }
    }
    let points = rotations
        .into_iter()
        .map(|rot| CylinderPoint::new(system, rot)?.extend_periodic(resolution))
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::uniform(system, points)
}

/// A coupling between two measures, stored as sparse (source, target, mass)
/// entries whose marginals match the measures exactly.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub entries: Vec<(usize, usize, BigRational)>,
}

impl TransportPlan {
    /// Check marginal consistency against the two measures.
    pub fn verify(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
        let mut row = vec![BigRational::zero(); mu.len()];
        let mut col = vec![BigRational::zero(); nu.len()];
        for (i, j, m) in &self.entries {
            if m.is_negative() {
                return Err(Error::InvalidMeasure("negative plan mass".into()));
            }
            row[*i] += m;
            col[*j] += m;
        }
        for (i, (_, w)) in mu.atoms().iter().enumerate() {
            if row[i] != *w {
                return Err(Error::InvalidMeasure(format!("row {i} marginal mismatch")));
            }
        }
        for (j, (_, w)) in nu.atoms().iter().enumerate() {
            if col[j] != *w {
                return Err(Error::InvalidMeasure(format!("col {j} marginal mismatch")));
            }
        }
        Ok(())
    }
}

/// Exact `W_p` value: the plan cost is kept as the rational `p`-th power.
#[derive(Debug, Clone)]
pub struct WassersteinResult {
    pub p: u32,
    /// `W_p^p`, an exact rational.
    pub cost_pow_p: BigRational,
    pub plan: TransportPlan,
}

impl WassersteinResult {
    /// `W_p` as a float (exact for `p = 1`).
    pub fn value_f64(&self) -> f64 {
        let c = self.cost_pow_p.to_f64().unwrap_or(f64::NAN);
        if self.p == 1 {
            c
        } else {
            c.powf(1.0 / self.p as f64)
        }
    }

    /// The exact rational value, available for `p = 1`.
    pub fn w1_value(&self) -> Option<&BigRational> {
        (self.p == 1).then_some(&self.cost_pow_p)
    }
}

/// Ground distances between atom supports, all required exact.
fn ground_matrix(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    ctx: Option<&BowenContext>,
) -> Result<Vec<Vec<BigRational>>> {
    check_same_system(mu.system(), nu.system())?;
    let mut rows = Vec::with_capacity(mu.len());
    for (x, _) in mu.atoms() {
        let mut row = Vec::with_capacity(nu.len());
        for (y, _) in nu.atoms() {
            let d = match ctx {
                None => base_distance(x, y)?,
                Some(c) => bowen_distance(x, y, c)?,
            };
            row.push(d.require_exact()?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Exact `p`-Wasserstein distance (`p` in 1..=3), optionally over a Bowen
/// context (giving `W_p^n`), together with an optimal plan.
pub fn wasserstein(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: u32,
    ctx: Option<&BowenContext>,
) -> Result<WassersteinResult> {
    if !(1..=3).contains(&p) {
        return Err(Error::Parse(format!("p = {p} outside supported range 1..=3")));
    }
    let ground = ground_matrix(mu, nu, ctx)?;
    let cost: Vec<Vec<BigRational>> = ground
        .iter()
        .map(|row| row.iter().map(|d| pow_rational(d, p as usize)).collect())
        .collect();
    let supply: Vec<BigRational> = mu.atoms().iter().map(|(_, w)| w.clone()).collect();
    let demand: Vec<BigRational> = nu.atoms().iter().map(|(_, w)| w.clone()).collect();
    let (cost_pow_p, entries) = transport::min_cost_flow(&cost, &supply, &demand);
    Ok(WassersteinResult {
        p,
        cost_pow_p,
        plan: TransportPlan { entries },
    })
}

/// Exact `W_1` through the ultrametric ball tree: group atoms by their
/// distance-level balls and charge the mass imbalance once per level.
/// Independent of the flow solver; equals `wasserstein(.., 1, ..)`.
pub fn w1_ultrametric(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    ctx: Option<&BowenContext>,
) -> Result<BigRational> {
    let ground = ground_matrix(mu, nu, ctx)?;
    // Collect every distance value that occurs (within or across supports).
    let mut levels: Vec<BigRational> = Vec::new();
    let mut push = |v: BigRational| {
        if !v.is_zero() && !levels.contains(&v) {
            levels.push(v);
        }
    };
    for row in &ground {
        for v in row {
            push(v.clone());
        }
    }
    let self_levels = |m: &DiscreteMeasure| -> Result<Vec<BigRational>> {
        let mut out = Vec::new();
        for i in 0..m.len() {
            for j in (i + 1)..m.len() {
                let d = match ctx {
                    None => base_distance(&m.atoms()[i].0, &m.atoms()[j].0)?,
                    Some(c) => bowen_distance(&m.atoms()[i].0, &m.atoms()[j].0, c)?,
                };
                out.push(d.require_exact()?);
            }
        }
        Ok(out)
    };
    for v in self_levels(mu)?.into_iter().chain(self_levels(nu)?) {
        push(v);
    }
    levels.sort();
    // Threshold t partitions all atoms into balls of diameter <= t
    // (ultrametric). Mass that must cross between distinct balls at level t
    // costs at least the next level up; summing (t_k - t_{k-1}) times the
    // imbalance at level t_{k-1} telescopes to the exact W_1.
    //
    // Implemented as: W_1 = sum over levels t (ascending, with t_0 = 0) of
    // (t_k - t_{k-1}) * (total mass imbalance across balls of radius < t_k).
    let all_atoms: Vec<(&CylinderPoint, BigRational, bool)> = mu
        .atoms()
        .iter()
        .map(|(p, w)| (p, w.clone(), true))
        .chain(nu.atoms().iter().map(|(p, w)| (p, w.clone(), false)))
        .collect();
    let dist = |a: &CylinderPoint, b: &CylinderPoint| -> Result<BigRational> {
        let d = match ctx {
            None => base_distance(a, b)?,
            Some(c) => bowen_distance(a, b, c)?,
        };
        d.require_exact()
    };
    let mut total = BigRational::zero();
    let mut prev = BigRational::zero();
    for t in &levels {
        // balls = classes of the relation d(a,b) < t  (ultrametric: transitive)
        let mut assigned = vec![usize::MAX; all_atoms.len()];
        let mut reps: Vec<usize> = Vec::new();
        for i in 0..all_atoms.len() {
            let mut found = None;
            for (b, &r) in reps.iter().enumerate() {
                if dist(all_atoms[i].0, all_atoms[r].0)? < *t {
                    found = Some(b);
                    break;
                }
            }
            match found {
                Some(b) => assigned[i] = b,
                None => {
                    assigned[i] = reps.len();
                    reps.push(i);
                }
            }
        }
        let mut imbalance = BigRational::zero();
        for b in 0..reps.len() {
            let mut bal = BigRational::zero();
            for (i, (_, w, from_mu)) in all_atoms.iter().enumerate() {
                if assigned[i] == b {
                    if *from_mu {
                        bal += w;
                    } else {
                        bal -= w;
                    }
                }
            }
            imbalance += bal.abs();
        }
        // Mass crossing between balls of diameter < t travels at least the
        // previous level and at most t; the telescoping charges it exactly.
        total += (t - &prev) * &imbalance / BigRational::from_integer(2.into());
        prev = t.clone();
    }
    Ok(total)
}

/// Levy-Prokhorov distance, optionally under the Bowen metric (`LP^n`).
///
/// For discrete measures the infimum is attained on the finite candidate set
/// {pairwise distances} union {excess masses}: on each interval between
/// consecutive distance thresholds the maximum routable mass over short
/// edges is constant, so the criterion "mass on long pairs < eps" holds
/// exactly above max(threshold, unroutable mass).
pub fn levy_prokhorov(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    ctx: Option<&BowenContext>,
) -> Result<BigRational> {
    let ground = ground_matrix(mu, nu, ctx)?;
    let supply: Vec<BigRational> = mu.atoms().iter().map(|(_, w)| w.clone()).collect();
    let demand: Vec<BigRational> = nu.atoms().iter().map(|(_, w)| w.clone()).collect();

    let mut thresholds: Vec<BigRational> = vec![BigRational::zero()];
    for row in &ground {
        for v in row {
            if !thresholds.contains(v) {
                thresholds.push(v.clone());
            }
        }
    }
    thresholds.sort();

    let one = BigRational::one();
    let mut best: Option<BigRational> = None;
    for (k, t) in thresholds.iter().enumerate() {
        let allowed: Vec<Vec<bool>> = ground
            .iter()
            .map(|row| row.iter().map(|d| d <= t).collect())
            .collect();
        let routable = transport::max_matchable_mass(&allowed, &supply, &demand);
        let unroutable = &one - &routable;
        // inf over eps in [t, next) with unroutable < eps
        let candidate = if unroutable > *t { unroutable } else { t.clone() };
        let next = thresholds.get(k + 1);
        let feasible = match next {
            Some(nx) => candidate < *nx,
            None => true,
        };
        if feasible {
            best = Some(match best {
                Some(b) if b <= candidate => b,
                _ => candidate,
            });
        }
    }
    Ok(best.expect("last interval is always feasible"))
}

/// `W_{p,n}`: the Bowen metric of the induced measure system, i.e. the max
/// over `0 <= i < n` of `W_p` between `i`-fold pushforwards. Returns the
/// maximal `W_p^p` and the iterate attaining it.
pub fn bowen_orbit_wasserstein(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: u32,
    n: usize,
) -> Result<(BigRational, usize)> {
    if n == 0 {
        return Err(Error::Parse("horizon n must be >= 1".into()));
    }
    let mut best = BigRational::zero();
    let mut arg = 0usize;
    let mut a = mu.clone();
    let mut b = nu.clone();
    for i in 0..n {
        let w = wasserstein(&a, &b, p, None)?;
        if w.cost_pow_p > best {
            best = w.cost_pow_p;
            arg = i;
        }
        if i + 1 < n {
            a = a.pushforward()?;
            b = b.pushforward()?;
        }
    }
    Ok((best, arg))
}

/// `LP_n`: max over iterates of the static Levy-Prokhorov distance.
pub fn bowen_orbit_levy_prokhorov(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    n: usize,
) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Parse("horizon n must be >= 1".into()));
    }
    let mut best = BigRational::zero();
    let mut a = mu.clone();
    let mut b = nu.clone();
    for i in 0..n {
        let lp = levy_prokhorov(&a, &b, None)?;
        if lp > best {
            best = lp;
        }
        if i + 1 < n {
            a = a.pushforward()?;
            b = b.pushforward()?;
        }
    }
    Ok(best)
}

/// Test/oracle helper: number of atoms shared by two measures.
pub fn shared_atoms(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> usize {
    mu.support()
        .filter(|p| nu.support().any(|q| q == *p))
        .count()
}

pub use transport::{assignment_oracle, vertex_enumeration_oracle};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::systems::{MetricMode, SymbolicSystem};

    fn full2() -> System {
        SymbolicSystem::full_shift(2, ratio(1, 2)).unwrap()
    }

    fn pt(sys: &System, s: &str) -> CylinderPoint {
        CylinderPoint::parse(sys, s).unwrap()
    }

    #[test]
    fn dirac_isometry() {
        let sys = full2();
        let x = pt(&sys, "0011");
        let y = pt(&sys, "0101");
        let w = wasserstein(
            &DiscreteMeasure::dirac(x.clone()),
            &DiscreteMeasure::dirac(y.clone()),
            1,
            None,
        )
        .unwrap();
        assert_eq!(w.cost_pow_p, base_distance(&x, &y).unwrap().value);
        let same = wasserstein(
            &DiscreteMeasure::dirac(x.clone()),
            &DiscreteMeasure::dirac(x),
            1,
            None,
        )
        .unwrap();
        assert!(same.cost_pow_p.is_zero());
    }

    #[test]
    fn half_mix_against_dirac() {
        let sys = full2();
        let x = pt(&sys, "0000");
        let y = pt(&sys, "1000");
        let mix = DiscreteMeasure::new(
            &sys,
            vec![(x.clone(), ratio(1, 2)), (y.clone(), ratio(1, 2))],
        )
        .unwrap();
        let target = DiscreteMeasure::dirac(x.clone());
        let w = wasserstein(&mix, &target, 1, None).unwrap();
        let d = base_distance(&x, &y).unwrap().value;
        assert_eq!(w.cost_pow_p, d / ratio(2, 1));
        w.plan.verify(&mix, &target).unwrap();
        // agrees with the independent vertex oracle
        let oracle = vertex_enumeration_oracle(
            &[vec![ratio(0, 1)], vec![ratio(1, 1)]],
            &[ratio(1, 2), ratio(1, 2)],
            &[ratio(1, 1)],
        );
        assert_eq!(w.cost_pow_p, oracle);
    }

    #[test]
    fn wasserstein_with_context() {
        let sys = full2();
        let x = pt(&sys, "0110");
        let y = pt(&sys, "0111");
        let ctx = BowenContext::bowen(3).unwrap();
        let w = wasserstein(
            &DiscreteMeasure::dirac(x.clone()),
            &DiscreteMeasure::dirac(y.clone()),
            1,
            Some(&ctx),
        )
        .unwrap();
        assert_eq!(w.cost_pow_p, ratio(1, 2));
        let mean = BowenContext::new(3, MetricMode::Mean).unwrap();
        let w = wasserstein(
            &DiscreteMeasure::dirac(x),
            &DiscreteMeasure::dirac(y),
            1,
            Some(&mean),
        )
        .unwrap();
        assert_eq!(w.cost_pow_p, ratio(7, 24));
    }

    #[test]
    fn lp_examples() {
        let sys = full2();
        let x = pt(&sys, "0000");
        let y = pt(&sys, "0100");
        let dx = DiscreteMeasure::dirac(x.clone());
        let dy = DiscreteMeasure::dirac(y.clone());
        assert!(levy_prokhorov(&dx, &dx, None).unwrap().is_zero());
        // LP between Diracs is min(d, 1) = d here
        let d = base_distance(&x, &y).unwrap().value;
        assert_eq!(levy_prokhorov(&dx, &dy, None).unwrap(), d);
        // far Diracs: d = 1, LP = 1? No: unroutable mass 1 on [0,1) gives
        // candidate 1, attained at threshold d = 1.
        let z = pt(&sys, "1000");
        let dz = DiscreteMeasure::dirac(z);
        assert_eq!(levy_prokhorov(&dx, &dz, None).unwrap(), ratio(1, 1));
    }

    #[test]
    fn lp_mixed_excess_mass() {
        // mu = 3/4 at x, 1/4 at far y; nu = Dirac at x.
        // Short edges (d = 0) route 3/4; unroutable 1/4 < 1 = d(x,y), so
        // LP = 1/4: an excess-mass candidate, not a distance.
        let sys = full2();
        let x = pt(&sys, "0000");
        let y = pt(&sys, "1000");
        let mu =
            DiscreteMeasure::new(&sys, vec![(x.clone(), ratio(3, 4)), (y, ratio(1, 4))]).unwrap();
        let nu = DiscreteMeasure::dirac(x);
        assert_eq!(levy_prokhorov(&mu, &nu, None).unwrap(), ratio(1, 4));
    }

    #[test]
    fn pushforward_merges() {
        let sys = full2();
        let mu = DiscreteMeasure::new(
            &sys,
            vec![
                (pt(&sys, "01"), ratio(1, 2)),
                (pt(&sys, "11"), ratio(1, 2)),
            ],
        )
        .unwrap();
        let img = mu.pushforward().unwrap();
        assert_eq!(img.len(), 1);
        assert_eq!(img.atoms()[0].0, pt(&sys, "1"));
        assert_eq!(img.atoms()[0].1, ratio(1, 1));
    }

    #[test]
    fn empirical_examples() {
        let sys = full2();
        let x = pt(&sys, "0101");
        let e1 = empirical_measure(&x, 1).unwrap();
        assert_eq!(e1, DiscreteMeasure::dirac(x.clone()));
        let e2 = empirical_measure(&x, 2).unwrap();
        assert_eq!(e2.len(), 2);
        let total: BigRational = e2.atoms().iter().map(|(_, w)| w.clone()).sum();
        assert!(total.is_one());
        assert!(empirical_measure(&pt(&sys, "01"), 3).is_err());
    }

    #[test]
    fn periodic_orbit_measures() {
        let sys = full2();
        let fixed = periodic_orbit_measure(&sys, &[0], 5).unwrap();
        assert_eq!(fixed.len(), 1);
        assert_eq!(fixed.atoms()[0].0, pt(&sys, "00000"));
        let two = periodic_orbit_measure(&sys, &[0, 1], 6).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two.atoms()[0].0, pt(&sys, "010101"));
        assert_eq!(two.atoms()[1].0, pt(&sys, "101010"));
        // invariance: pushforward equals the same orbit one level shorter
        let img = two.pushforward().unwrap();
        let rebuilt = periodic_orbit_measure(&sys, &[1, 0], 5).unwrap();
        assert_eq!(img, rebuilt);
        // golden mean: "11" is cyclically inadmissible
        let gm = SymbolicSystem::golden_mean(ratio(1, 2)).unwrap();
        assert!(periodic_orbit_measure(&gm, &[1, 1], 4).is_err());
        // "01" is fine there
        assert!(periodic_orbit_measure(&gm, &[0, 1], 4).is_ok());
    }

    #[test]
    fn orbit_wasserstein_prop() {
        let sys = full2();
        let mu = DiscreteMeasure::new(
            &sys,
            vec![
                (pt(&sys, "001100"), ratio(1, 2)),
                (pt(&sys, "010100"), ratio(1, 2)),
            ],
        )
        .unwrap();
        let nu = DiscreteMeasure::dirac(pt(&sys, "110000"));
        let n = 3;
        let (orbit, _) = bowen_orbit_wasserstein(&mu, &nu, 1, n).unwrap();
        let ctx = BowenContext::bowen(n).unwrap();
        let wn = wasserstein(&mu, &nu, 1, Some(&ctx)).unwrap();
        assert!(orbit <= wn.cost_pow_p);
        // n = 1 degenerates to the static distance
        let (o1, _) = bowen_orbit_wasserstein(&mu, &nu, 1, 1).unwrap();
        assert_eq!(o1, wasserstein(&mu, &nu, 1, None).unwrap().cost_pow_p);
    }

    #[test]
    fn tree_formula_matches_flow() {
        let sys = full2();
        let mu = DiscreteMeasure::new(
            &sys,
            vec![
                (pt(&sys, "0011"), ratio(1, 3)),
                (pt(&sys, "0110"), ratio(1, 3)),
                (pt(&sys, "1100"), ratio(1, 3)),
            ],
        )
        .unwrap();
        let nu = DiscreteMeasure::new(
            &sys,
            vec![
                (pt(&sys, "0010"), ratio(1, 4)),
                (pt(&sys, "1111"), ratio(3, 4)),
            ],
        )
        .unwrap();
        for ctx in [None, Some(BowenContext::bowen(2).unwrap())] {
            let flow = wasserstein(&mu, &nu, 1, ctx.as_ref()).unwrap().cost_pow_p;
            let tree = w1_ultrametric(&mu, &nu, ctx.as_ref()).unwrap();
            assert_eq!(flow, tree);
        }
    }

    #[test]
    fn inexact_supports_rejected() {
        let sys = full2();
        let mu = DiscreteMeasure::dirac(pt(&sys, "01"));
        let nu = DiscreteMeasure::dirac(pt(&sys, "011"));
        assert!(matches!(
            wasserstein(&mu, &nu, 1, None),
            Err(Error::InexactDistance)
        ));
    }
}
