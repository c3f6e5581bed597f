//! Finite closed sets as hyperspace elements: the Hausdorff metric `H`, its
//! Bowen-metric refinement `H^n`, the orbit metric `H_n`, the induced set
//! map, and fixed sets built from periodic orbits.

use num::rational::BigRational;
use num::Zero;

use crate::systems::{
    base_distance, bowen_distance, check_same_system, BowenContext, CylinderPoint, System,
};
use crate::{Error, Result};

/// A nonempty finite set of cylinder points of uniform resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteClosedSet {
    points: Vec<CylinderPoint>,
    system: System,
}

impl FiniteClosedSet {
    pub fn new(system: &System, points: Vec<CylinderPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSet("empty set".into()));
        }
        let len = points[0].len();
        let mut sorted = points;
        for p in &sorted {
            check_same_system(system, p.system())?;
            if p.len() != len {
                return Err(Error::InvalidSet(format!(
                    "mixed resolutions {len} and {}",
                    p.len()
                )));
            }
        }
        sorted.sort();
        sorted.dedup();
        Ok(FiniteClosedSet {
            points: sorted,
            system: system.clone(),
        })
    }

    pub fn singleton(point: CylinderPoint) -> Self {
        let system = point.system().clone();
        FiniteClosedSet {
            points: vec![point],
            system,
        }
    }

    pub fn points(&self) -> &[CylinderPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn resolution(&self) -> usize {
        self.points[0].len()
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn contains(&self, p: &CylinderPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }
}

fn pair_distance(
    x: &CylinderPoint,
    y: &CylinderPoint,
    ctx: Option<&BowenContext>,
) -> Result<BigRational> {
    let d = match ctx {
        None => base_distance(x, y)?,
        Some(c) => bowen_distance(x, y, c)?,
    };
    d.require_exact()
}

/// Directed excursion: `max_{b in B} min_{c in C} d(b, c)`.
fn excursion(
    b: &FiniteClosedSet,
    c: &FiniteClosedSet,
    ctx: Option<&BowenContext>,
) -> Result<BigRational> {
    let mut worst = BigRational::zero();
    for x in b.points() {
        let mut nearest: Option<BigRational> = None;
        for y in c.points() {
            let d = pair_distance(x, y, ctx)?;
            if nearest.as_ref().map_or(true, |n| d < *n) {
                nearest = Some(d);
            }
        }
        let n = nearest.unwrap();
        if n > worst {
            worst = n;
        }
    }
    Ok(worst)
}

/// Hausdorff distance under `d` (no context) or `d_n` / mean metric.
/// For finite sets the neighbourhood definition collapses to the max-min
/// formula computed here.
pub fn hausdorff(
    b: &FiniteClosedSet,
    c: &FiniteClosedSet,
    ctx: Option<&BowenContext>,
) -> Result<BigRational> {
    check_same_system(b.system(), c.system())?;
    Ok(excursion(b, c, ctx)?.max(excursion(c, b, ctx)?))
}

/// `H_n`: max over `0 <= i < n` of the static Hausdorff distance between the
/// iterated images.
pub fn bowen_orbit_hausdorff(
    b: &FiniteClosedSet,
    c: &FiniteClosedSet,
    n: usize,
) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Parse("horizon n must be >= 1".into()));
    }
    let mut x = b.clone();
    let mut y = c.clone();
    let mut best = BigRational::zero();
    for i in 0..n {
        let h = hausdorff(&x, &y, None)?;
        if h > best {
            best = h;
        }
        if i + 1 < n {
            x = image_set(&x)?;
            y = image_set(&y)?;
        }
    }
    Ok(best)
}

/// Image under the induced set map: shift every point, deduplicating.
pub fn image_set(b: &FiniteClosedSet) -> Result<FiniteClosedSet> {
    let points = b
        .points()
        .iter()
        .map(|p| p.shift())
        .collect::<Result<Vec<_>>>()?;
    FiniteClosedSet::new(b.system(), points)
}

/// Union of full periodic orbits: all rotations of each word, periodically
/// extended to `resolution`. The result is a fixed point of the induced map
/// at matched resolution.
pub fn periodic_fixed_set(
    system: &System,
    words: &[Vec<u8>],
    resolution: usize,
) -> Result<FiniteClosedSet> {
    if words.is_empty() {
        return Err(Error::InvalidSet("no orbit words".into()));
    }
    let mut points = Vec::new();
    for word in words {
        let base = CylinderPoint::new(system, word.clone())?;
        let p = word.len();
        if !system.allows(word[p - 1], word[0]) {
            return Err(Error::CyclicInadmissible(base.to_string()));
        }
        for k in 0..p {
            let rot: Vec<u8> = (0..p).map(|i| word[(k + i) % p]).collect();
            points.push(CylinderPoint::new(system, rot)?.extend_periodic(resolution)?);
        }
    }
    FiniteClosedSet::new(system, points)
}

/// Diameter of a set under the chosen metric.
pub fn set_diameter(b: &FiniteClosedSet, ctx: Option<&BowenContext>) -> Result<BigRational> {
    let mut best = BigRational::zero();
    for (i, x) in b.points().iter().enumerate() {
        for y in &b.points()[i + 1..] {
            let d = pair_distance(x, y, ctx)?;
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Minimum cross distance `min { d(x,y) : x in B, y in C }`, the quantity
/// behind the split relation.
pub fn min_cross_distance(
    b: &FiniteClosedSet,
    c: &FiniteClosedSet,
    ctx: Option<&BowenContext>,
) -> Result<BigRational> {
    check_same_system(b.system(), c.system())?;
    let mut best: Option<BigRational> = None;
    for x in b.points() {
        for y in c.points() {
            let d = pair_distance(x, y, ctx)?;
            if best.as_ref().map_or(true, |n| d < *n) {
                best = Some(d);
            }
        }
    }
    Ok(best.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::systems::SymbolicSystem;

    fn full2() -> System {
        SymbolicSystem::full_shift(2, ratio(1, 2)).unwrap()
    }

    fn pt(sys: &System, s: &str) -> CylinderPoint {
        CylinderPoint::parse(sys, s).unwrap()
    }

    fn set(sys: &System, words: &[&str]) -> FiniteClosedSet {
        FiniteClosedSet::new(sys, words.iter().map(|w| pt(sys, w)).collect()).unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        let sys = full2();
        let b = set(&sys, &["0011", "0101"]);
        assert!(hausdorff(&b, &b, None).unwrap().is_zero());
        // one-sided excursion: H({x}, {x, y}) = d(x, y)
        let x = pt(&sys, "0000");
        let y = pt(&sys, "0100");
        let bx = FiniteClosedSet::singleton(x.clone());
        let bxy = set(&sys, &["0000", "0100"]);
        assert_eq!(
            hausdorff(&bx, &bxy, None).unwrap(),
            base_distance(&x, &y).unwrap().value
        );
        // H({"00"}, {"01"}) = 1/2 but H^2 = 1
        let b0 = set(&sys, &["00"]);
        let b1 = set(&sys, &["01"]);
        assert_eq!(hausdorff(&b0, &b1, None).unwrap(), ratio(1, 2));
        let ctx = BowenContext::bowen(2).unwrap();
        assert_eq!(hausdorff(&b0, &b1, Some(&ctx)).unwrap(), ratio(1, 1));
    }

    #[test]
    fn orbit_hausdorff_sandwich() {
        let sys = full2();
        let b = set(&sys, &["001100", "010100", "111000"]);
        let c = set(&sys, &["000110", "101010"]);
        let n = 3;
        let hn = bowen_orbit_hausdorff(&b, &c, n).unwrap();
        let ctx = BowenContext::bowen(n).unwrap();
        let h_up = hausdorff(&b, &c, Some(&ctx)).unwrap();
        let slack = set_diameter(&b, Some(&ctx))
            .unwrap()
            .max(set_diameter(&c, Some(&ctx)).unwrap());
        assert!(hn <= h_up);
        assert!(h_up <= hn + slack);
        // singletons collapse the sandwich
        let sx = FiniteClosedSet::singleton(pt(&sys, "011010"));
        let sy = FiniteClosedSet::singleton(pt(&sys, "110100"));
        assert_eq!(
            bowen_orbit_hausdorff(&sx, &sy, n).unwrap(),
            hausdorff(&sx, &sy, Some(&ctx)).unwrap()
        );
        // n = 1 is the static metric
        assert_eq!(
            bowen_orbit_hausdorff(&b, &c, 1).unwrap(),
            hausdorff(&b, &c, None).unwrap()
        );
    }

    #[test]
    fn image_set_examples() {
        let sys = full2();
        let b = set(&sys, &["01", "11"]);
        let img = image_set(&b).unwrap();
        assert_eq!(img.points(), set(&sys, &["1"]).points());
        assert!(img.len() <= b.len());
    }

    #[test]
    fn periodic_fixed_sets() {
        let sys = full2();
        let fix0 = periodic_fixed_set(&sys, &[vec![0]], 4).unwrap();
        assert_eq!(fix0.points(), set(&sys, &["0000"]).points());
        let pair = periodic_fixed_set(&sys, &[vec![0, 1]], 4).unwrap();
        assert_eq!(pair.points(), set(&sys, &["0101", "1010"]).points());
        // f-fixed at matched resolution
        let img = image_set(&pair).unwrap();
        let expected = periodic_fixed_set(&sys, &[vec![0, 1]], 3).unwrap();
        assert_eq!(img, expected);
        // union of two orbits stays fixed
        let both = periodic_fixed_set(&sys, &[vec![0], vec![0, 1]], 5).unwrap();
        let img = image_set(&both).unwrap();
        let expected = periodic_fixed_set(&sys, &[vec![0], vec![0, 1]], 4).unwrap();
        assert_eq!(img, expected);
    }
}
