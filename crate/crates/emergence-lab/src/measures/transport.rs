//! Exact solvers behind the measure metrics: min-cost flow on the bipartite
//! support graph (successive shortest paths with potentials, over scaled
//! integers), a max-flow feasibility routine for the Levy-Prokhorov
//! thresholds, and two brute-force oracles used to cross-check the flow.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};

/// Integer arithmetic the flow algorithm needs. Implemented for `i128`
/// (fast path) and `BigInt` (fallback when scaled values would overflow).
trait FlowInt: Clone + Ord {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero_v(&self) -> bool;
}

impl FlowInt for i128 {
    fn zero() -> Self {
        0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero_v(&self) -> bool {
        *self == 0
    }
}

impl FlowInt for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero_v(&self) -> bool {
        self.is_zero()
    }
}

/// Dense transportation problem via successive shortest paths with node
/// potentials. Node layout: 0 is the super source, `1..=a` the sources,
/// `a+1..=a+b` the sinks, `a+b+1` the super sink. Potentials are updated by
/// `min(dist, dist(t))` after each Dijkstra, which keeps every residual
/// reduced cost nonnegative.
fn ssp<T: FlowInt>(cost: &[Vec<T>], supply: &[T], demand: &[T]) -> (T, Vec<Vec<T>>) {
    let a = supply.len();
    let b = demand.len();
    let v = a + b + 2;
    let s_star = 0usize;
    let t_star = a + b + 1;
    let src = |i: usize| i + 1;
    let snk = |j: usize| a + 1 + j;

    let mut flow: Vec<Vec<T>> = vec![vec![T::zero(); b]; a];
    let mut rem_s: Vec<T> = supply.to_vec(); // residual s* -> i
    let mut used_s: Vec<T> = vec![T::zero(); a];
    let mut rem_d: Vec<T> = demand.to_vec(); // residual j -> t*
    let mut used_d: Vec<T> = vec![T::zero(); b];
    let mut pot: Vec<T> = vec![T::zero(); v];
    let mut total_cost = T::zero();

    loop {
        // Dijkstra over reduced costs from s*.
        let mut dist: Vec<Option<T>> = vec![None; v];
        let mut prev: Vec<usize> = vec![usize::MAX; v];
        let mut done = vec![false; v];
        dist[s_star] = Some(T::zero());
        loop {
            let mut u_best: Option<usize> = None;
            for u in 0..v {
                if done[u] || dist[u].is_none() {
                    continue;
                }
                if u_best.map_or(true, |w| dist[u].as_ref().unwrap() < dist[w].as_ref().unwrap())
                {
                    u_best = Some(u);
                }
            }
            let Some(u) = u_best else { break };
            done[u] = true;
            let du = dist[u].clone().unwrap();
            let relax = |w: usize,
                             arc_cost: T,
                             dist: &mut Vec<Option<T>>,
                             prev: &mut Vec<usize>,
                             pot: &[T]| {
                let nd = du.add(&arc_cost).add(&pot[u]).sub(&pot[w]);
                if dist[w].as_ref().map_or(true, |cur| nd < *cur) {
                    dist[w] = Some(nd);
                    prev[w] = u;
                }
            };
            if u == s_star {
                for i in 0..a {
                    if !rem_s[i].is_zero_v() {
                        relax(src(i), T::zero(), &mut dist, &mut prev, &pot);
                    }
                }
            } else if u == t_star {
                for j in 0..b {
                    if !used_d[j].is_zero_v() {
                        relax(snk(j), T::zero(), &mut dist, &mut prev, &pot);
                    }
                }
            } else if u <= a {
                let i = u - 1;
                if !used_s[i].is_zero_v() {
                    relax(s_star, T::zero(), &mut dist, &mut prev, &pot);
                }
                for j in 0..b {
                    relax(snk(j), cost[i][j].clone(), &mut dist, &mut prev, &pot);
                }
            } else {
                let j = u - a - 1;
                if !rem_d[j].is_zero_v() {
                    relax(t_star, T::zero(), &mut dist, &mut prev, &pot);
                }
                for i in 0..a {
                    if !flow[i][j].is_zero_v() {
                        relax(src(i), T::zero().sub(&cost[i][j]), &mut dist, &mut prev, &pot);
                    }
                }
            }
        }
        let Some(dt) = dist[t_star].clone() else {
            break; // all supply routed
        };
        for u in 0..v {
            let inc = match &dist[u] {
                Some(d) if *d < dt => d.clone(),
                _ => dt.clone(),
            };
            pot[u] = pot[u].add(&inc);
        }
        // trace path s* -> t*
        let mut path: Vec<usize> = vec![t_star];
        let mut cur = t_star;
        while cur != s_star {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        // bottleneck
        let mut bottleneck: Option<T> = None;
        let tighten = |c: &T, bottleneck: &mut Option<T>| match bottleneck {
            Some(bn) if &*bn <= c => {}
            _ => *bottleneck = Some(c.clone()),
        };
        for step in path.windows(2) {
            let (u, w) = (step[0], step[1]);
            if u == s_star {
                tighten(&rem_s[w - 1], &mut bottleneck);
            } else if w == s_star {
                tighten(&used_s[u - 1], &mut bottleneck);
            } else if w == t_star {
                tighten(&rem_d[u - a - 1], &mut bottleneck);
            } else if u == t_star {
                tighten(&used_d[w - a - 1], &mut bottleneck);
            } else if u <= a {
                // forward arc, unlimited
            } else {
                tighten(&flow[w - 1][u - a - 1], &mut bottleneck);
            }
        }
        let bn = bottleneck.expect("path has at least the super arcs");
        // apply augmentation
        for step in path.windows(2) {
            let (u, w) = (step[0], step[1]);
            if u == s_star {
                let i = w - 1;
                rem_s[i] = rem_s[i].sub(&bn);
                used_s[i] = used_s[i].add(&bn);
            } else if w == s_star {
                let i = u - 1;
                rem_s[i] = rem_s[i].add(&bn);
                used_s[i] = used_s[i].sub(&bn);
            } else if w == t_star {
                let j = u - a - 1;
                rem_d[j] = rem_d[j].sub(&bn);
                used_d[j] = used_d[j].add(&bn);
            } else if u == t_star {
                let j = w - a - 1;
                rem_d[j] = rem_d[j].add(&bn);
                used_d[j] = used_d[j].sub(&bn);
            } else if u <= a {
                let (i, j) = (u - 1, w - a - 1);
                flow[i][j] = flow[i][j].add(&bn);
                total_cost = total_cost.add(&cost[i][j].mul(&bn));
            } else {
                let (i, j) = (w - 1, u - a - 1);
                flow[i][j] = flow[i][j].sub(&bn);
                total_cost = total_cost.sub(&cost[i][j].mul(&bn));
            }
        }
    }
    (total_cost, flow)
}

/// Exact minimum transport cost and an optimal plan.
///
/// Costs must be nonnegative; `sum(supply) == sum(demand)` is assumed
/// (probability measures). Values are scaled to a common integer grid; the
/// fast i128 path is taken whenever the scaled magnitudes provably fit.
pub fn min_cost_flow(
    cost: &[Vec<BigRational>],
    supply: &[BigRational],
    demand: &[BigRational],
) -> (BigRational, Vec<(usize, usize, BigRational)>) {
    let a = supply.len();
    let b = demand.len();
    assert!(a > 0 && b > 0);

    let mut cost_den = BigInt::one();
    for row in cost {
        for c in row {
            cost_den = cost_den.lcm(c.denom());
        }
    }
    let mut mass_den = BigInt::one();
    for w in supply.iter().chain(demand) {
        mass_den = mass_den.lcm(w.denom());
    }
    let scale_cost = |c: &BigRational| -> BigInt { c.numer() * (&cost_den / c.denom()) };
    let scale_mass = |w: &BigRational| -> BigInt { w.numer() * (&mass_den / w.denom()) };

    let cost_i: Vec<Vec<BigInt>> = cost
        .iter()
        .map(|row| row.iter().map(scale_cost).collect())
        .collect();
    let sup_i: Vec<BigInt> = supply.iter().map(scale_mass).collect();
    let dem_i: Vec<BigInt> = demand.iter().map(scale_mass).collect();

    // i128 is safe when every product path-sum provably fits
    let max_cost_bits = cost_i
        .iter()
        .flatten()
        .map(|c| c.magnitude().bits())
        .max()
        .unwrap_or(0);
    let max_mass_bits = sup_i
        .iter()
        .chain(&dem_i)
        .map(|m| m.magnitude().bits())
        .max()
        .unwrap_or(0);
    let node_bits = 64 - ((a + b + 2) as u64).leading_zeros() as u64;
    let fits = max_cost_bits + max_mass_bits + node_bits + 4 < 120;

    let denom = BigRational::new(&cost_den * &mass_den, BigInt::one());
    if fits {
        let cost_s: Vec<Vec<i128>> = cost_i
            .iter()
            .map(|row| row.iter().map(|c| c.to_i128().unwrap()).collect())
            .collect();
        let sup_s: Vec<i128> = sup_i.iter().map(|m| m.to_i128().unwrap()).collect();
        let dem_s: Vec<i128> = dem_i.iter().map(|m| m.to_i128().unwrap()).collect();
        let (total, flow) = ssp(&cost_s, &sup_s, &dem_s);
        let entries = flow
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                let mass_den = mass_den.clone();
                row.iter().enumerate().filter_map(move |(j, f)| {
                    (*f != 0).then(|| (i, j, BigRational::new(BigInt::from(*f), mass_den.clone())))
                })
            })
            .collect();
        (
            BigRational::new(BigInt::from(total), BigInt::one()) / denom,
            entries,
        )
    } else {
        let (total, flow) = ssp(&cost_i, &sup_i, &dem_i);
        let entries = flow
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                let mass_den = mass_den.clone();
                row.iter().enumerate().filter_map(move |(j, f)| {
                    (!f.is_zero()).then(|| (i, j, BigRational::new(f.clone(), mass_den.clone())))
                })
            })
            .collect();
        (BigRational::new(total, BigInt::one()) / denom, entries)
    }
}

/// Maximum mass routable through `allowed` edges respecting the marginals
/// (Edmonds-Karp on the bipartite graph with rational capacities).
pub fn max_matchable_mass(
    allowed: &[Vec<bool>],
    supply: &[BigRational],
    demand: &[BigRational],
) -> BigRational {
    let a = supply.len();
    let b = demand.len();
    let mut flow: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); b]; a];
    let mut rem_s: Vec<BigRational> = supply.to_vec();
    let mut rem_d: Vec<BigRational> = demand.to_vec();
    let mut total = BigRational::zero();
    loop {
        let v = a + b;
        let mut prev: Vec<Option<usize>> = vec![None; v];
        let mut seen = vec![false; v];
        let mut queue: Vec<usize> = Vec::new();
        for i in 0..a {
            if rem_s[i].is_positive() {
                seen[i] = true;
                queue.push(i);
            }
        }
        let mut target: Option<usize> = None;
        let mut qi = 0;
        'bfs: while qi < queue.len() {
            let u = queue[qi];
            qi += 1;
            if u < a {
                for j in 0..b {
                    let w = a + j;
                    if !seen[w] && allowed[u][j] {
                        seen[w] = true;
                        prev[w] = Some(u);
                        if rem_d[j].is_positive() {
                            target = Some(w);
                            break 'bfs;
                        }
                        queue.push(w);
                    }
                }
            } else {
                let j = u - a;
                for i in 0..a {
                    if !seen[i] && flow[i][j].is_positive() {
                        seen[i] = true;
                        prev[i] = Some(u);
                        queue.push(i);
                    }
                }
            }
        }
        let Some(t) = target else { break };
        let mut path = vec![t];
        let mut cur = t;
        while let Some(p) = prev[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        let src = path[0];
        let mut bottleneck = rem_s[src].clone().min(rem_d[t - a].clone());
        for step in path.windows(2) {
            if step[0] >= a {
                bottleneck = bottleneck.min(flow[step[1]][step[0] - a].clone());
            }
        }
        rem_s[src] -= &bottleneck;
        let tj = t - a;
        rem_d[tj] -= &bottleneck;
        for step in path.windows(2) {
            if step[0] < a {
                flow[step[0]][step[1] - a] += &bottleneck;
            } else {
                flow[step[1]][step[0] - a] -= &bottleneck;
            }
        }
        total += &bottleneck;
    }
    total
}

/// Brute-force transport oracle: enumerate every basic feasible solution
/// (supports are spanning forests, at most `a + b - 1` cells) by leaf
/// elimination, and take the cheapest. Exhaustive, so only for tiny inputs.
pub fn vertex_enumeration_oracle(
    cost: &[Vec<BigRational>],
    supply: &[BigRational],
    demand: &[BigRational],
) -> BigRational {
    let a = supply.len();
    let b = demand.len();
    let cells: Vec<(usize, usize)> = (0..a)
        .flat_map(|i| (0..b).map(move |j| (i, j)))
        .collect();
    let max_support = a + b - 1;
    assert!(cells.len() <= 20, "oracle is exponential; keep supports tiny");

    let mut best: Option<BigRational> = None;
    let n_cells = cells.len();
    for mask in 1u32..(1u32 << n_cells) {
        if (mask.count_ones() as usize) > max_support {
            continue;
        }
        let mut active: Vec<(usize, usize)> = cells
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &c)| c)
            .collect();
        let mut rem_s = supply.to_vec();
        let mut rem_d = demand.to_vec();
        let mut masses: Vec<((usize, usize), BigRational)> = Vec::new();
        let mut ok = true;
        while !active.is_empty() {
            let mut leaf: Option<usize> = None;
            for (k, &(i, j)) in active.iter().enumerate() {
                let row_count = active.iter().filter(|&&(x, _)| x == i).count();
                let col_count = active.iter().filter(|&&(_, y)| y == j).count();
                if row_count == 1 || col_count == 1 {
                    leaf = Some(k);
                    let mass = if row_count == 1 {
                        rem_s[i].clone()
                    } else {
                        rem_d[j].clone()
                    };
                    if mass.is_negative() {
                        ok = false;
                    }
                    rem_s[i] -= &mass;
                    rem_d[j] -= &mass;
                    masses.push(((i, j), mass));
                    break;
                }
            }
            match leaf {
                Some(k) => {
                    active.remove(k);
                    if !ok {
                        break;
                    }
                }
                None => {
                    ok = false; // a cycle: not a basic solution
                    break;
                }
            }
        }
        if !ok
            || rem_s.iter().any(|x| !x.is_zero())
            || rem_d.iter().any(|x| !x.is_zero())
            || masses.iter().any(|(_, m)| m.is_negative())
        {
            continue;
        }
        let c: BigRational = masses.iter().map(|((i, j), m)| &cost[*i][*j] * m).sum();
        best = Some(match best {
            Some(bst) if bst <= c => bst,
            _ => c,
        });
    }
    best.expect("feasible basic solution always exists")
}

/// Assignment oracle for the uniform equal-cardinality case: minimum over
/// all permutations of the average assignment cost.
pub fn assignment_oracle(cost: &[Vec<BigRational>]) -> BigRational {
    let n = cost.len();
    assert!(n >= 1 && n <= 7 && cost.iter().all(|r| r.len() == n));
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<BigRational> = None;
    permute(&mut perm, 0, &mut |p| {
        let c: BigRational = p.iter().enumerate().map(|(i, &j)| cost[i][j].clone()).sum();
        match &best {
            Some(b) if *b <= c => {}
            _ => best = Some(c),
        }
    });
    best.unwrap() / BigRational::from_integer(BigInt::from(n))
}

fn permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, f);
        perm.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn flow_matches_vertex_oracle_on_small_instances() {
        let cost = vec![
            vec![ratio(0, 1), ratio(1, 2), ratio(1, 1)],
            vec![ratio(1, 2), ratio(0, 1), ratio(1, 4)],
        ];
        let supply = vec![ratio(2, 3), ratio(1, 3)];
        let demand = vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)];
        let (flow_cost, entries) = min_cost_flow(&cost, &supply, &demand);
        let oracle = vertex_enumeration_oracle(&cost, &supply, &demand);
        assert_eq!(flow_cost, oracle);
        let mut rs = vec![BigRational::zero(); 2];
        let mut rd = vec![BigRational::zero(); 3];
        for (i, j, m) in &entries {
            rs[*i] += m;
            rd[*j] += m;
        }
        assert_eq!(rs, supply);
        assert_eq!(rd, demand);
    }

    #[test]
    fn flow_matches_assignment_on_uniform_case() {
        let cost = vec![
            vec![ratio(1, 1), ratio(1, 2), ratio(1, 8)],
            vec![ratio(1, 4), ratio(1, 1), ratio(1, 2)],
            vec![ratio(1, 2), ratio(1, 8), ratio(1, 1)],
        ];
        let u = vec![ratio(1, 3); 3];
        let (flow_cost, _) = min_cost_flow(&cost, &u, &u);
        assert_eq!(flow_cost, assignment_oracle(&cost));
    }

    #[test]
    fn max_flow_respects_structure() {
        let allowed = vec![vec![true, false], vec![false, false]];
        let supply = vec![ratio(1, 2), ratio(1, 2)];
        let demand = vec![ratio(1, 4), ratio(3, 4)];
        let got = max_matchable_mass(&allowed, &supply, &demand);
        assert_eq!(got, ratio(1, 4));
    }

    #[test]
    fn bigint_fallback_agrees_with_fast_path() {
        let big = BigRational::new(BigInt::one(), BigInt::from(2).pow(200));
        let cost = vec![vec![ratio(0, 1), big.clone()], vec![big, ratio(0, 1)]];
        let u = vec![ratio(1, 2); 2];
        let (c, _) = min_cost_flow(&cost, &u, &u);
        assert!(c.is_zero());
    }
}
