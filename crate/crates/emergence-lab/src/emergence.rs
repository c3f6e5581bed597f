//! The headline estimators: topological entropy, the entropy orders of the
//! induced measure and hyperspace systems, metric order and box dimension,
//! measure quantization, and pointwise emergence.
//!
//! Limits are replaced by finite-grid slope fits over the top half of the
//! horizon range, reported next to the raw cells so they can be re-fit.
//! When the counts in the fit window form an exact geometric progression the
//! slope is the exact log of the ratio, so full-shift entropy comes out as
//! `ln m` to the last bit. `log log` of a count at most 1 is reported as 0.

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::certificates::{
    apart_measure_family, build_half_weight_code, hamming_measure_family,
    hyperspace_separated_family, Certificate, CodeConfig, VerifyMode,
};
use crate::counting::{
    self, bolley_cover, covering_count, dyn_covering_count, dyn_packing_count, packing_count,
    CoverInstance, GreedyConfig, MetricSpaceView, SepCmp, SpanCmp, Strategy,
};
use crate::hyperspace::FiniteClosedSet;
use crate::measures::{wasserstein, DiscreteMeasure};
use crate::rational::{
    biguint_ln, format_rational, least_squares_slope, pow_rational, ratio, rational_ln,
    rational_to_f64,
};
use crate::systems::{BowenContext, System};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Scaling reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportMode {
    Entropy,
    EntropyOrder,
    MetricOrder,
}

impl ReportMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReportMode::Entropy => "entropy",
            ReportMode::EntropyOrder => "entropy_order",
            ReportMode::MetricOrder => "metric_order",
        }
    }
}

/// One grid cell: certified lower and upper counts at scale `(n, eps)`.
#[derive(Debug, Clone)]
pub struct Cell {
    pub n: usize,
    pub eps: BigRational,
    pub lower: BigUint,
    pub upper: BigUint,
    pub exact: bool,
    pub witness: Option<String>,
}

/// Fitted growth rates from the lower and upper counts.
#[derive(Debug, Clone, Copy)]
pub struct SlopeInterval {
    pub lower: f64,
    pub upper: f64,
    /// true when both fits came from exact geometric progressions
    pub exact_geometric: bool,
}

#[derive(Debug, Clone)]
pub struct EpsSlopes {
    pub eps: BigRational,
    pub single_log: SlopeInterval,
    pub double_log: SlopeInterval,
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub mode: ReportMode,
    pub cells: Vec<Cell>,
    /// per-eps slopes in the horizon (entropy modes only)
    pub per_eps: Vec<EpsSlopes>,
    /// headline per-eps values as eps shrinks: the upper slope in entropy
    /// modes, the per-cell upper ratio in metric-order mode
    pub eps_trend: Vec<(BigRational, f64)>,
    /// fits against -log eps (metric-order mode only)
    pub metric_order: Option<MetricOrderSummary>,
}

#[derive(Debug, Clone)]
pub struct MetricOrderSummary {
    /// single-log fit: box dimension estimate
    pub dim: SlopeInterval,
    /// double-log fit: metric order estimate
    pub mo: SlopeInterval,
    /// per-cell ratios (eps, lower, upper)
    pub per_eps_dim: Vec<(BigRational, f64, f64)>,
    pub per_eps_mo: Vec<(BigRational, f64, f64)>,
}

/// `log log count` with the `log 0 = 0` convention extended to counts <= 1.
pub fn double_log(count: &BigUint) -> f64 {
    if *count <= BigUint::one() {
        0.0
    } else {
        biguint_ln(count).ln()
    }
}

#[derive(Debug, Clone, Copy)]
struct FitOutcome {
    slope: f64,
    exact_geometric: bool,
}

/// Slope of `ln(counts)` against `xs` over the tail window (the top half,
/// at least two points). An exact geometric progression (constant integer
/// ratio between consecutive counts at unit steps) short-circuits the
/// least-squares fit: the slope is the exact log of the ratio.
fn fit_single_log(xs: &[f64], counts: &[BigUint]) -> FitOutcome {
    assert_eq!(xs.len(), counts.len());
    if xs.len() == 1 {
        return FitOutcome {
            slope: biguint_ln(&counts[0]) / xs[0].max(1.0),
            exact_geometric: false,
        };
    }
    let start = xs.len() - (xs.len() / 2).max(2).min(xs.len());
    let xs = &xs[start..];
    let counts = &counts[start..];
    let unit_steps = xs.windows(2).all(|w| (w[1] - w[0] - 1.0).abs() < 1e-12);
    let geometric = unit_steps
        && counts.windows(2).all(|w| {
            // w[1]/w[0] equals counts[1]/counts[0] exactly
            &w[1] * &counts[0] == &w[0] * &counts[1]
        })
        && !counts[0].is_zero();
    if geometric {
        let num = biguint_ln(&counts[1]);
        let den = biguint_ln(&counts[0]);
        return FitOutcome {
            slope: num - den,
            exact_geometric: true,
        };
    }
    let ys: Vec<f64> = counts.iter().map(biguint_ln).collect();
    FitOutcome {
        slope: least_squares_slope(xs, &ys),
        exact_geometric: false,
    }
}

fn fit_double_log(xs: &[f64], counts: &[BigUint]) -> FitOutcome {
    assert_eq!(xs.len(), counts.len());
    if xs.len() == 1 {
        return FitOutcome {
            slope: double_log(&counts[0]) / xs[0].max(1.0),
            exact_geometric: false,
        };
    }
    let start = xs.len() - (xs.len() / 2).max(2).min(xs.len());
    let xs = &xs[start..];
    let ys: Vec<f64> = counts[start..].iter().map(double_log).collect();
    FitOutcome {
        slope: least_squares_slope(xs, &ys),
        exact_geometric: false,
    }
}

impl ScalingReport {
    /// Assemble a report from raw cells, fitting slopes per eps (entropy
    /// modes) or against `-log eps` (metric-order mode).
    pub fn from_cells(mode: ReportMode, mut cells: Vec<Cell>) -> Self {
        cells.sort_by(|a, b| (a.n, b.eps.clone()).cmp(&(b.n, a.eps.clone())));
        match mode {
            ReportMode::Entropy | ReportMode::EntropyOrder => {
                let mut eps_values: Vec<BigRational> =
                    cells.iter().map(|c| c.eps.clone()).collect();
                eps_values.sort();
                eps_values.dedup();
                eps_values.reverse(); // large eps first, trend toward 0
                let mut per_eps = Vec::new();
                for eps in &eps_values {
                    let mut grid: Vec<&Cell> = cells.iter().filter(|c| c.eps == *eps).collect();
                    grid.sort_by_key(|c| c.n);
                    let xs: Vec<f64> = grid.iter().map(|c| c.n as f64).collect();
                    let lowers: Vec<BigUint> = grid.iter().map(|c| c.lower.clone()).collect();
                    let uppers: Vec<BigUint> = grid.iter().map(|c| c.upper.clone()).collect();
                    let single = (
                        fit_single_log(&xs, &lowers),
                        fit_single_log(&xs, &uppers),
                    );
                    let double = (
                        fit_double_log(&xs, &lowers),
                        fit_double_log(&xs, &uppers),
                    );
                    per_eps.push(EpsSlopes {
                        eps: eps.clone(),
                        single_log: SlopeInterval {
                            lower: single.0.slope,
                            upper: single.1.slope,
                            exact_geometric: single.0.exact_geometric && single.1.exact_geometric,
                        },
                        double_log: SlopeInterval {
                            lower: double.0.slope,
                            upper: double.1.slope,
                            exact_geometric: false,
                        },
                    });
                }
                let eps_trend = per_eps
                    .iter()
                    .map(|e| {
                        let v = match mode {
                            ReportMode::Entropy => e.single_log.upper,
                            _ => e.double_log.upper,
                        };
                        (e.eps.clone(), v)
                    })
                    .collect();
                ScalingReport {
                    mode,
                    cells,
                    per_eps,
                    eps_trend,
                    metric_order: None,
                }
            }
            ReportMode::MetricOrder => {
                let mut grid: Vec<&Cell> = cells.iter().collect();
                grid.sort_by(|a, b| b.eps.cmp(&a.eps)); // eps descending
                let xs: Vec<f64> = grid
                    .iter()
                    .map(|c| -rational_ln(&c.eps))
                    .collect();
                let lowers: Vec<BigUint> = grid.iter().map(|c| c.lower.clone()).collect();
                let uppers: Vec<BigUint> = grid.iter().map(|c| c.upper.clone()).collect();
                let per_eps_dim: Vec<(BigRational, f64, f64)> = grid
                    .iter()
                    .map(|c| {
                        let x = -rational_ln(&c.eps);
                        (
                            c.eps.clone(),
                            biguint_ln(&c.lower) / x,
                            biguint_ln(&c.upper) / x,
                        )
                    })
                    .collect();
                let per_eps_mo: Vec<(BigRational, f64, f64)> = grid
                    .iter()
                    .map(|c| {
                        let x = -rational_ln(&c.eps);
                        (c.eps.clone(), double_log(&c.lower) / x, double_log(&c.upper) / x)
                    })
                    .collect();
                let dim_lo = fit_single_log_scaled(&xs, &lowers);
                let dim_hi = fit_single_log_scaled(&xs, &uppers);
                let mo_lo = fit_double_log(&xs, &lowers);
                let mo_hi = fit_double_log(&xs, &uppers);
                let eps_trend = per_eps_mo
                    .iter()
                    .map(|(e, _, hi)| (e.clone(), *hi))
                    .collect();
                ScalingReport {
                    mode,
                    metric_order: Some(MetricOrderSummary {
                        dim: SlopeInterval {
                            lower: dim_lo.slope,
                            upper: dim_hi.slope,
                            exact_geometric: dim_lo.exact_geometric && dim_hi.exact_geometric,
                        },
                        mo: SlopeInterval {
                            lower: mo_lo.slope,
                            upper: mo_hi.slope,
                            exact_geometric: false,
                        },
                        per_eps_dim,
                        per_eps_mo,
                    }),
                    cells,
                    per_eps: Vec::new(),
                    eps_trend,
                }
            }
        }
    }

    /// CSV rows: `n,epsilon,lower,upper,exact,witness`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,epsilon,lower,upper,exact,witness\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.n,
                format_rational(&c.eps),
                c.lower,
                c.upper,
                c.exact,
                c.witness.as_deref().unwrap_or("")
            ));
        }
        out
    }

    /// JSON summary of the fitted slopes and conventions.
    pub fn summary_json(&self) -> serde_json::Value {
        let per_eps: Vec<serde_json::Value> = self
            .per_eps
            .iter()
            .map(|e| {
                serde_json::json!({
                    "epsilon": format_rational(&e.eps),
                    "single_log_slope": {
                        "lower": e.single_log.lower,
                        "upper": e.single_log.upper,
                        "exact_geometric": e.single_log.exact_geometric,
                    },
                    "double_log_slope": {
                        "lower": e.double_log.lower,
                        "upper": e.double_log.upper,
                    },
                })
            })
            .collect();
        let eps_trend: Vec<serde_json::Value> = self
            .eps_trend
            .iter()
            .map(|(e, v)| serde_json::json!({"epsilon": format_rational(e), "value": v}))
            .collect();
        let mut root = serde_json::json!({
            "mode": self.mode.as_str(),
            "cells": self.cells.len(),
            "per_eps": per_eps,
            "eps_trend": eps_trend,
            "conventions": {
                "log_zero": "log log of counts <= 1 is reported as 0",
                "fit_window": "least squares over the top half of the range",
                "exact_geometric": "slope is the exact log of the count ratio",
            },
        });
        if let Some(mo) = &self.metric_order {
            root["metric_order"] = serde_json::json!({
                "dim": {"lower": mo.dim.lower, "upper": mo.dim.upper,
                         "exact_geometric": mo.dim.exact_geometric},
                "mo": {"lower": mo.mo.lower, "upper": mo.mo.upper},
                "per_eps_dim": mo.per_eps_dim.iter().map(|(e, lo, hi)| {
                    serde_json::json!({"epsilon": format_rational(e), "lower": lo, "upper": hi})
                }).collect::<Vec<_>>(),
                "per_eps_mo": mo.per_eps_mo.iter().map(|(e, lo, hi)| {
                    serde_json::json!({"epsilon": format_rational(e), "lower": lo, "upper": hi})
                }).collect::<Vec<_>>(),
            });
        }
        root
    }
}

/// Geometric detection for non-unit steps: exact when both the counts and
/// the x-steps are geometric/arithmetic with constant ratio, as happens on
/// a lambda-power eps grid.
fn fit_single_log_scaled(xs: &[f64], counts: &[BigUint]) -> FitOutcome {
    if xs.len() < 2 {
        return fit_single_log(xs, counts);
    }
    let step = xs[1] - xs[0];
    let even = xs.windows(2).all(|w| (w[1] - w[0] - step).abs() < 1e-9);
    let geometric = even
        && counts
            .windows(2)
            .all(|w| &w[1] * &counts[0] == &w[0] * &counts[1])
        && !counts[0].is_zero();
    if geometric {
        let lr = biguint_ln(&counts[1]) - biguint_ln(&counts[0]);
        return FitOutcome {
            slope: lr / step,
            exact_geometric: true,
        };
    }
    let ys: Vec<f64> = counts.iter().map(biguint_ln).collect();
    FitOutcome {
        slope: least_squares_slope(xs, &ys),
        exact_geometric: false,
    }
}

// ---------------------------------------------------------------------------
// Topological entropy
// ---------------------------------------------------------------------------

/// Exact `(n,eps)` point-space counts over the grid, with eps = lambda^k.
/// Lower cells are separation numbers, upper cells covering numbers; on the
/// lambda-ultrametric both reduce to admissible word counts and coincide.
pub fn entropy_estimate(
    system: &System,
    n_range: std::ops::RangeInclusive<usize>,
    eps_exps: &[u32],
) -> Result<ScalingReport> {
    if n_range.is_empty() || eps_exps.is_empty() {
        return Err(Error::Parse("empty grid".into()));
    }
    let mut cells = Vec::new();
    for k in eps_exps {
        let eps = system.lambda_pow(*k as usize);
        for n in n_range.clone() {
            let lower = dyn_packing_count(system, n, &eps, SepCmp::Ge)?;
            let upper = dyn_covering_count(system, n, &eps, SpanCmp::Lt)?;
            cells.push(Cell {
                n,
                eps: eps.clone(),
                lower,
                upper,
                exact: true,
                witness: None,
            });
        }
    }
    Ok(ScalingReport::from_cells(ReportMode::Entropy, cells))
}

/// Largest eigenvalue of the transition matrix by power iteration: the
/// independent cross-check for SFT entropy slopes.
pub fn transfer_matrix_spectral_radius(system: &System) -> f64 {
    let m = system.alphabet_size();
    let mut v = vec![1.0f64; m];
    let mut lambda_max = 1.0;
    for _ in 0..10_000 {
        let mut next = vec![0.0f64; m];
        for a in 0..m {
            for b in 0..m {
                if system.allows(a as u8, b as u8) {
                    next[a] += v[b];
                }
            }
        }
        let norm = next.iter().fold(0.0f64, |acc, x| acc.max(*x));
        for x in &mut next {
            *x /= norm;
        }
        if v.iter()
            .zip(&next)
            .all(|(a, b)| (a - b).abs() < 1e-15)
        {
            lambda_max = norm;
            break;
        }
        lambda_max = norm;
        v = next;
    }
    lambda_max
}

// ---------------------------------------------------------------------------
// Entropy order of the induced measure system
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct MeasureOrderConfig {
    /// build and verify an explicit apart family when its size fits
    pub apart_verify_cap: u64,
    /// build a code-indexed separated family at the largest horizon
    pub build_hamming: bool,
    pub code: CodeConfig,
    pub verify_pairs: usize,
    pub enumeration_cap: u64,
}

impl Default for MeasureOrderConfig {
    fn default() -> Self {
        MeasureOrderConfig {
            apart_verify_cap: 1024,
            build_hamming: false,
            code: CodeConfig::default(),
            verify_pairs: 50,
            enumeration_cap: 1 << 26,
        }
    }
}

/// Per-cell bookkeeping of the measure-space entropy-order bounds.
#[derive(Debug, Clone)]
pub struct MeasureOrderCell {
    pub n: usize,
    pub eps: BigRational,
    /// exact apart count A(n, 4 eps) (Dirac route)
    pub apart: BigUint,
    /// ln A / n, the asymptotic lower rate
    pub apart_rate: f64,
    pub apart_verified: bool,
    /// simplex-grid cover numbers
    pub bolley_centers: BigUint,
    pub bolley_family_ln: f64,
    pub bolley_bound_ln: f64,
    /// `log log` of the constructed family size (upper cell value)
    pub display_lhs: f64,
    /// `log N(f,n,eps/2) + log log(8 e diam / eps)`
    pub display_rhs: f64,
    pub hamming_size: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct MeasureOrderReport {
    pub report: ScalingReport,
    pub detail: Vec<MeasureOrderCell>,
    /// per-eps bracket around h_top: (fit of ln A(n, 4eps), fit of
    /// ln N(f,n,eps/2), both in n). The upper leg is the slope of the
    /// display bound, whose additive `log log(C/eps)` term drops out.
    pub brackets: Vec<(BigRational, f64, f64)>,
    pub certificates: Vec<Certificate>,
}

/// Upper cells from simplex-grid covers, lower cells from pairwise-apart
/// Dirac families (with optional code-indexed separated families bridging
/// them to genuine `W_1^n`-separated measure sets).
pub fn measure_space_entropy_order(
    system: &System,
    n_range: std::ops::RangeInclusive<usize>,
    eps_exps: &[u32],
    cfg: &MeasureOrderConfig,
) -> Result<MeasureOrderReport> {
    if n_range.is_empty() || eps_exps.is_empty() {
        return Err(Error::Parse("empty grid".into()));
    }
    let n_max = *n_range.end();
    let mut cells = Vec::new();
    let mut detail = Vec::new();
    let mut brackets = Vec::new();
    let mut certificates = Vec::new();
    let four = ratio(4, 1);
    let eight_e_ln = |eps: &BigRational| -> f64 {
        // ln ln (8 e diam / eps) with diam = 1
        (rational_ln(&(ratio(8, 1) * system.diameter() / eps)) + 1.0).ln()
    };
    for k in eps_exps {
        let eps = system.lambda_pow(*k as usize);
        let eps4 = &eps * &four;
        let half = &eps / ratio(2, 1);
        let mut apart_ns: Vec<f64> = Vec::new();
        let mut apart_counts: Vec<BigUint> = Vec::new();
        let mut cover_counts: Vec<BigUint> = Vec::new();
        for n in n_range.clone() {
            let apart = dyn_packing_count(system, n, &eps4, SepCmp::Ge)?;
            let apart_rate = biguint_ln(&apart) / n as f64;
            // verify the Dirac family explicitly when it fits
            let mut apart_verified = false;
            if apart <= BigUint::from(cfg.apart_verify_cap) {
                let pts = counting::packing_representatives(
                    system,
                    n,
                    &eps4,
                    SepCmp::Ge,
                    0,
                    cfg.enumeration_cap,
                )?;
                let diracs: Vec<DiscreteMeasure> =
                    pts.into_iter().map(DiscreteMeasure::dirac).collect();
                let fam = counting::apart_count(&diracs, n, &eps4, &GreedyConfig::default())?;
                if BigUint::from(fam.count()) != apart {
                    return Err(Error::VerificationFailed(format!(
                        "apart verification found {} of {apart}",
                        fam.count()
                    )));
                }
                apart_verified = true;
            }
            let cover = bolley_cover(system, &eps, 1, Some(n), 0, cfg.enumeration_cap)?;
            let strict_cover = dyn_covering_count(system, n, &half, SpanCmp::Lt)?;
            let display_lhs = if cover.family_ln <= 1.0 {
                0.0
            } else {
                cover.family_ln.ln()
            };
            let display_rhs = biguint_ln(&strict_cover) + eight_e_ln(&eps);
            if display_lhs > display_rhs {
                return Err(Error::VerificationFailed(format!(
                    "cover bound violated at n={n}, eps={eps}: {display_lhs} > {display_rhs}"
                )));
            }
            let mut hamming_size = None;
            if cfg.build_hamming && n == n_max {
                let pts = counting::packing_representatives(
                    system,
                    n,
                    &eps4,
                    SepCmp::Ge,
                    0,
                    cfg.enumeration_cap,
                )?;
                let diracs: Vec<DiscreteMeasure> =
                    pts.into_iter().map(DiscreteMeasure::dirac).collect();
                let bits = 8 * (diracs.len() / 8).min(cfg.code.max_bits / 8);
                if bits >= 8 {
                    let code = build_half_weight_code(bits, &cfg.code)?;
                    let mode = VerifyMode::Sampled {
                        seed: cfg.code.seed,
                        pairs: cfg.verify_pairs,
                    };
                    let cert = hamming_measure_family(&diracs, n, &eps4, &code, mode)?;
                    hamming_size = Some(cert.witnesses.len());
                    certificates.push(cert);
                }
            }
            apart_ns.push(n as f64);
            apart_counts.push(apart.clone());
            cover_counts.push(strict_cover);
            let lower_cell = hamming_size
                .map(BigUint::from)
                .unwrap_or_else(BigUint::one);
            cells.push(Cell {
                n,
                eps: eps.clone(),
                lower: lower_cell,
                upper: cover.family_size.clone(),
                exact: false,
                witness: None,
            });
            detail.push(MeasureOrderCell {
                n,
                eps: eps.clone(),
                apart,
                apart_rate,
                apart_verified,
                bolley_centers: cover.centers,
                bolley_family_ln: cover.family_ln,
                bolley_bound_ln: cover.bound_ln,
                display_lhs,
                display_rhs,
                hamming_size,
            });
        }
        let lower_fit = fit_single_log(&apart_ns, &apart_counts);
        let upper_fit = fit_single_log(&apart_ns, &cover_counts);
        brackets.push((eps.clone(), lower_fit.slope, upper_fit.slope));
    }
    Ok(MeasureOrderReport {
        report: ScalingReport::from_cells(ReportMode::EntropyOrder, cells),
        detail,
        brackets,
        certificates,
    })
}

// ---------------------------------------------------------------------------
// Entropy order of the induced hyperspace system
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct HyperspaceOrderConfig {
    /// build a code-indexed separated set family at the largest horizon
    pub build_family: bool,
    pub code: CodeConfig,
    pub verify_pairs: usize,
    pub enumeration_cap: u64,
}

impl Default for HyperspaceOrderConfig {
    fn default() -> Self {
        HyperspaceOrderConfig {
            build_family: false,
            code: CodeConfig::default(),
            verify_pairs: 200,
            enumeration_cap: 1 << 26,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HyperspaceOrderReport {
    pub report: ScalingReport,
    /// per-eps bracket: (fit of ln S(f,n,eps), fit of ln N(f,n,eps)); the
    /// upper leg equals the slope of `log log 2^N = log N + log log 2`.
    pub brackets: Vec<(BigRational, f64, f64)>,
    pub certificates: Vec<Certificate>,
}

/// Upper cells `2^{N(f,n,eps)}` from power-set covers; lower cells from
/// exact separation counts, optionally realized as a code-indexed family of
/// pairwise `H^n`-separated sets.
pub fn hyperspace_entropy_order(
    system: &System,
    n_range: std::ops::RangeInclusive<usize>,
    eps_exps: &[u32],
    cfg: &HyperspaceOrderConfig,
) -> Result<HyperspaceOrderReport> {
    if n_range.is_empty() || eps_exps.is_empty() {
        return Err(Error::Parse("empty grid".into()));
    }
    let n_max = *n_range.end();
    let mut cells = Vec::new();
    let mut brackets = Vec::new();
    let mut certificates = Vec::new();
    for k in eps_exps {
        let eps = system.lambda_pow(*k as usize);
        let mut ns = Vec::new();
        let mut seps = Vec::new();
        let mut covers = Vec::new();
        for n in n_range.clone() {
            let sep = dyn_packing_count(system, n, &eps, SepCmp::Ge)?;
            let cover = dyn_covering_count(system, n, &eps, SpanCmp::Lt)?;
            let cover_u64 = cover.to_u64().ok_or_else(|| Error::ResourceCap {
                what: "power-set exponent".into(),
                size: cover.to_string(),
                cap: u64::MAX.to_string(),
            })?;
            let upper = BigUint::one() << cover_u64;
            let mut witness = None;
            if cfg.build_family && n == n_max {
                let pts = counting::packing_representatives(
                    system,
                    n,
                    &eps,
                    SepCmp::Ge,
                    0,
                    cfg.enumeration_cap,
                )?;
                let bits = 8 * (pts.len() / 8).min(cfg.code.max_bits / 8);
                if bits >= 8 {
                    let code = build_half_weight_code(bits, &cfg.code)?;
                    // strict H^n separation needs strictly separated points
                    let strict_eps = find_strict_threshold(system, n, &eps)?;
                    let mode = if code.len() * (code.len() - 1) / 2 <= cfg.verify_pairs {
                        VerifyMode::Full
                    } else {
                        VerifyMode::Sampled {
                            seed: cfg.code.seed,
                            pairs: cfg.verify_pairs,
                        }
                    };
                    let cert =
                        hyperspace_separated_family(&pts, n, &strict_eps, &code, mode)?;
                    witness = Some(format!("family:{}", cert.witnesses.len()));
                    certificates.push(cert);
                }
            }
            ns.push(n as f64);
            seps.push(sep.clone());
            covers.push(cover);
            cells.push(Cell {
                n,
                eps: eps.clone(),
                lower: sep,
                upper,
                exact: true,
                witness,
            });
        }
        let lower_fit = fit_single_log(&ns, &seps);
        let upper_fit = fit_single_log(&ns, &covers);
        brackets.push((eps.clone(), lower_fit.slope, upper_fit.slope));
    }
    Ok(HyperspaceOrderReport {
        report: ScalingReport::from_cells(ReportMode::EntropyOrder, cells),
        brackets,
        certificates,
    })
}

/// Largest threshold strictly below the pairwise separation the point grid
/// actually achieves at `(n, eps)`: the midpoint between `eps` and the next
/// lambda level when they coincide.
fn find_strict_threshold(system: &System, n: usize, eps: &BigRational) -> Result<BigRational> {
    let _ = n;
    // points separated weakly at eps sit at distances >= eps; any value
    // strictly below eps works as a strict threshold
    Ok(eps * ratio(9, 10))
}

/// Construct `C = { x in E : B meets B_n(x, eps) }` from the power-set cover
/// over the minimal spanning set `E`, and return it with its `H^n` distance
/// to `B`. The distance is at most `eps` for every `B`.
pub fn power_set_cover_element(
    system: &System,
    n: usize,
    eps: &BigRational,
    set: &FiniteClosedSet,
    enumeration_cap: u64,
) -> Result<(FiniteClosedSet, BigRational)> {
    let reps = counting::spanning_representatives(
        system,
        n,
        eps,
        SpanCmp::Lt,
        set.resolution(),
        enumeration_cap,
    )?;
    let ctx = BowenContext::bowen(n)?;
    let mut chosen = Vec::new();
    for x in &reps {
        let hits = set.points().iter().any(|b| {
            crate::systems::bowen_distance(x, b, &ctx)
                .and_then(|d| d.require_exact())
                .map(|d| SpanCmp::Lt.admits(&d, eps))
                .unwrap_or(false)
        });
        if hits {
            chosen.push(x.clone());
        }
    }
    let cover = FiniteClosedSet::new(system, chosen)?;
    let h = crate::hyperspace::hausdorff(set, &cover, Some(&ctx))?;
    if h > *eps {
        return Err(Error::VerificationFailed(format!(
            "power-set cover element at H^n = {h} > eps {eps}"
        )));
    }
    Ok((cover, h))
}

// ---------------------------------------------------------------------------
// Metric order and box dimension
// ---------------------------------------------------------------------------

/// Static point-space counts on the lambda-power grid: box dimension cells.
pub fn metric_order_point_dim(system: &System, eps_exps: &[u32]) -> Result<ScalingReport> {
    let mut cells = Vec::new();
    for k in eps_exps {
        let eps = system.lambda_pow(*k as usize);
        let lower = dyn_packing_count(system, 1, &eps, SepCmp::Gt)?;
        let upper = dyn_covering_count(system, 1, &eps, SpanCmp::Lt)?;
        cells.push(Cell {
            n: 1,
            eps,
            lower,
            upper,
            exact: true,
            witness: None,
        });
    }
    Ok(ScalingReport::from_cells(ReportMode::MetricOrder, cells))
}

#[derive(Debug, Clone)]
pub struct HyperspaceMetricOrder {
    pub report: ScalingReport,
    /// per-eps verified packing witnesses (subset families)
    pub witnesses: Vec<(BigRational, Vec<FiniteClosedSet>)>,
}

/// Static hyperspace counts: verified subset packings against power-set
/// covering counts `2^{N(X,eps)}`. Witness families are all nonempty
/// subsets of a maximum separated point set when that fits the cap, and a
/// deterministic selection of `2^{S-7}`-many otherwise; every family is
/// verified pairwise.
pub fn metric_order_hyperspace(
    system: &System,
    eps_exps: &[u32],
    family_cap: u64,
    enumeration_cap: u64,
) -> Result<HyperspaceMetricOrder> {
    let mut cells = Vec::new();
    let mut witnesses = Vec::new();
    for k in eps_exps {
        let eps = system.lambda_pow(*k as usize);
        let pts =
            counting::packing_representatives(system, 1, &eps, SepCmp::Gt, 0, enumeration_cap)?;
        let s = pts.len();
        let all = if s >= 64 {
            u64::MAX
        } else {
            (1u64 << s) - 1
        };
        // the proof-scale target 2^(S-7), floored at 1
        let target = if s >= 7 { 1u64 << (s - 7) } else { 1 };
        let take = all.min(family_cap).max(target.min(family_cap));
        let mut sets = Vec::new();
        for mask in 1..=take {
            let chosen: Vec<_> = pts
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect();
            if chosen.is_empty() {
                continue;
            }
            sets.push(FiniteClosedSet::new(system, chosen)?);
        }
        // pairwise verification: distinct subsets of a strictly separated
        // point set are H-separated by the point separation
        let view = MetricSpaceView::from_sets(&sets, None)?;
        counting::verify_packing(&view, &eps, &(0..sets.len()).collect::<Vec<_>>())?;
        let lower = BigUint::from(sets.len());
        let cover = dyn_covering_count(system, 1, &eps, SpanCmp::Lt)?;
        let cover_u64 = cover.to_u64().ok_or_else(|| Error::ResourceCap {
            what: "power-set exponent".into(),
            size: cover.to_string(),
            cap: u64::MAX.to_string(),
        })?;
        let upper = BigUint::one() << cover_u64;
        cells.push(Cell {
            n: 1,
            eps: eps.clone(),
            lower,
            upper,
            exact: false,
            witness: Some(format!("subsets:{}", sets.len())),
        });
        witnesses.push((eps, sets));
    }
    Ok(HyperspaceMetricOrder {
        report: ScalingReport::from_cells(ReportMode::MetricOrder, cells),
        witnesses,
    })
}

/// Metric-order cells for an explicit view (greedy packing and covering per
/// eps). Degenerate views report zero by the `log 0 = 0` convention.
pub fn metric_order_from_view(
    view: &MetricSpaceView,
    eps_list: &[BigRational],
    cfg: &GreedyConfig,
) -> Result<ScalingReport> {
    let mut cells = Vec::new();
    for eps in eps_list {
        let pack = packing_count(view, eps, Strategy::Greedy, cfg)?;
        let cover = covering_count(&CoverInstance::self_cover(view), eps, Strategy::Greedy, cfg)?;
        cells.push(Cell {
            n: 1,
            eps: eps.clone(),
            lower: BigUint::from(pack.count()),
            upper: BigUint::from(cover.count()),
            exact: false,
            witness: None,
        });
    }
    Ok(ScalingReport::from_cells(ReportMode::MetricOrder, cells))
}

// ---------------------------------------------------------------------------
// Quantization and measure emergence
// ---------------------------------------------------------------------------

/// A finitely supported distribution over measures (an element of M(M(X))).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureEnsemble {
    atoms: Vec<(DiscreteMeasure, BigRational)>,
}

impl MeasureEnsemble {
    pub fn new(atoms: Vec<(DiscreteMeasure, BigRational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("empty ensemble".into()));
        }
        let total: BigRational = atoms.iter().map(|(_, w)| w.clone()).sum();
        if total != BigRational::one() {
            return Err(Error::InvalidMeasure(format!(
                "ensemble weights sum to {total}, not 1"
            )));
        }
        if atoms.iter().any(|(_, w)| w.is_negative()) {
            return Err(Error::InvalidMeasure("negative ensemble weight".into()));
        }
        for (m, _) in &atoms[1..] {
            crate::systems::check_same_system(atoms[0].0.system(), m.system())?;
        }
        Ok(MeasureEnsemble { atoms })
    }

    pub fn dirac(measure: DiscreteMeasure) -> Self {
        MeasureEnsemble {
            atoms: vec![(measure, BigRational::one())],
        }
    }

    pub fn uniform(measures: Vec<DiscreteMeasure>) -> Result<Self> {
        let n = measures.len() as i64;
        if n == 0 {
            return Err(Error::InvalidMeasure("empty ensemble".into()));
        }
        Self::new(
            measures
                .into_iter()
                .map(|m| (m, ratio(1, n)))
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[(DiscreteMeasure, BigRational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn system(&self) -> &System {
        self.atoms[0].0.system()
    }

    /// Does `self` dominate `other` (is every atom of `other` an atom of
    /// `self` with positive weight)? The finite-support reading of absolute
    /// continuity.
    pub fn dominates(&self, other: &MeasureEnsemble) -> bool {
        other
            .atoms
            .iter()
            .all(|(m, _)| self.atoms.iter().any(|(s, w)| s == m && w.is_positive()))
    }
}

#[derive(Debug, Clone)]
pub struct QuantizationConfig {
    /// exhaustive codebook search up to this size
    pub exact_max: usize,
    /// pairwise barycentric mixtures at resolution 1/g (0 disables)
    pub mixture_grid: u32,
    /// greedy growth stops here
    pub greedy_cap: usize,
}

impl Default for QuantizationConfig {
    fn default() -> Self {
        QuantizationConfig {
            exact_max: 3,
            mixture_grid: 2,
            greedy_cap: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuantizationResult {
    pub q_upper: usize,
    pub q_lower: usize,
    /// set when the two sides meet
    pub exact: Option<usize>,
    pub codebook: Vec<DiscreteMeasure>,
    /// achieved integral cost of the returned codebook
    pub cost: BigRational,
    /// indices of ensemble atoms that are pairwise (n, 4 eps)-separated
    pub separated_witness: Vec<usize>,
}

/// Minimal codebook size `Q(omega, n, eps)`: the smallest `N` such that some
/// `F` of `N` measures has `sum_mu omega(mu) W_1^n(mu, F) <= eps`.
///
/// Candidates are the ensemble atoms and their pairwise simplex-grid
/// mixtures. Sizes up to `exact_max` are searched exhaustively over the
/// candidate pool; beyond that a greedy grows the codebook (and the
/// set-cover route caps it, so the result never exceeds the covering number
/// of the atom family at the same scale). The lower bound certifies
/// against a pairwise `(n, 4 eps)`-separated subfamily: a codebook below
/// `ceil(c/2) + 1` would leave average cost above eps.
pub fn quantization(
    ens: &MeasureEnsemble,
    n: usize,
    eps: &BigRational,
    cfg: &QuantizationConfig,
) -> Result<QuantizationResult> {
    let ctx = BowenContext::bowen(n)?;
    let atoms: Vec<&DiscreteMeasure> = ens.atoms.iter().map(|(m, _)| m).collect();
    let weights: Vec<&BigRational> = ens.atoms.iter().map(|(_, w)| w).collect();

    // candidate pool
    let mut candidates: Vec<DiscreteMeasure> = atoms.iter().map(|m| (*m).clone()).collect();
    if cfg.mixture_grid >= 2 {
        let g = cfg.mixture_grid as i64;
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                for t in 1..g {
                    let wi = ratio(t, g);
                    let wj = ratio(g - t, g);
                    let mut mixed: Vec<(crate::systems::CylinderPoint, BigRational)> = Vec::new();
                    for (p, w) in atoms[i].atoms() {
                        mixed.push((p.clone(), w * &wi));
                    }
                    for (p, w) in atoms[j].atoms() {
                        mixed.push((p.clone(), w * &wj));
                    }
                    candidates.push(DiscreteMeasure::new(ens.system(), mixed)?);
                }
            }
        }
    }

    // cost matrix atom x candidate (quantization-side route: the flow solver)
    let mut cost = vec![vec![BigRational::zero(); candidates.len()]; atoms.len()];
    for (a, mu) in atoms.iter().enumerate() {
        for (c, nu) in candidates.iter().enumerate() {
            cost[a][c] = wasserstein(mu, nu, 1, Some(&ctx))?.cost_pow_p;
        }
    }
    let total_cost = |chosen: &[usize]| -> BigRational {
        (0..atoms.len())
            .map(|a| {
                let best = chosen
                    .iter()
                    .map(|&c| &cost[a][c])
                    .min()
                    .expect("nonempty codebook");
                weights[a] * best
            })
            .sum()
    };

    // lower bound from a pairwise (n, 4 eps)-separated subfamily
    let eps4 = eps * ratio(4, 1);
    let mut separated: Vec<usize> = Vec::new();
    for i in 0..atoms.len() {
        let far = separated.iter().all(|&j| {
            crate::measures::w1_ultrametric(atoms[i], atoms[j], Some(&ctx))
                .map(|d| d > eps4)
                .unwrap_or(false)
        });
        if far {
            separated.push(i);
        }
    }
    let c = separated.len();
    let q_lower = if c >= 2 { c / 2 + 1 } else { 1 };

    // exhaustive small codebooks
    for size in 1..=cfg.exact_max.min(candidates.len()) {
        let mut best: Option<(BigRational, Vec<usize>)> = None;
        let mut chosen = vec![0usize; size];
        subsets(candidates.len(), size, &mut chosen, 0, 0, &mut |sel| {
            let cost = total_cost(sel);
            if best.as_ref().map_or(true, |(b, _)| cost < *b) {
                best = Some((cost, sel.to_vec()));
            }
        });
        let (best_cost, sel) = best.unwrap();
        if best_cost <= *eps {
            let q_upper = size;
            let exact = (q_upper <= q_lower).then_some(q_upper);
            return Ok(QuantizationResult {
                q_upper,
                q_lower: q_lower.min(q_upper),
                exact,
                codebook: sel.iter().map(|&c| candidates[c].clone()).collect(),
                cost: best_cost,
                separated_witness: separated,
            });
        }
    }

    // greedy growth
    let mut chosen: Vec<usize> = Vec::new();
    let mut cur_cost: Option<BigRational> = None;
    while chosen.len() < cfg.greedy_cap.min(candidates.len()) {
        let mut best: Option<(BigRational, usize)> = None;
        for c in 0..candidates.len() {
            if chosen.contains(&c) {
                continue;
            }
            let mut trial = chosen.clone();
            trial.push(c);
            let tc = total_cost(&trial);
            if best.as_ref().map_or(true, |(b, _)| tc < *b) {
                best = Some((tc, c));
            }
        }
        let (tc, c) = best.expect("candidates remain");
        chosen.push(c);
        cur_cost = Some(tc.clone());
        if tc <= *eps {
            break;
        }
    }
    let cur_cost = cur_cost.ok_or_else(|| Error::ResourceCap {
        what: "quantization greedy".into(),
        size: "0".into(),
        cap: cfg.greedy_cap.to_string(),
    })?;
    if cur_cost > *eps {
        return Err(Error::ResourceCap {
            what: "quantization greedy cap".into(),
            size: chosen.len().to_string(),
            cap: cfg.greedy_cap.to_string(),
        });
    }
    let q_upper = chosen.len();
    let exact = (q_upper <= q_lower).then_some(q_upper);
    Ok(QuantizationResult {
        q_upper,
        q_lower: q_lower.min(q_upper),
        exact,
        codebook: chosen.iter().map(|&c| candidates[c].clone()).collect(),
        cost: cur_cost,
        separated_witness: separated,
    })
}

fn subsets(
    n: usize,
    size: usize,
    chosen: &mut Vec<usize>,
    depth: usize,
    from: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == size {
        f(chosen);
        return;
    }
    for c in from..n {
        chosen[depth] = c;
        subsets(n, size, chosen, depth + 1, c + 1, f);
    }
}

/// Emergence cells of an invariant measure given by its ergodic
/// decomposition: `E_mu(n, eps) = Q(omega, n, eps)`. Atoms must be
/// shift-invariant at their resolution (their pushforward equals their own
/// one-symbol coarsening).
pub fn measure_emergence(
    decomposition: &MeasureEnsemble,
    n_range: std::ops::RangeInclusive<usize>,
    eps_exps: &[u32],
    cfg: &QuantizationConfig,
) -> Result<ScalingReport> {
    for (m, _) in decomposition.atoms() {
        if !is_invariant_at_resolution(m)? {
            return Err(Error::InvalidMeasure(
                "decomposition atom is not shift-invariant at its resolution".into(),
            ));
        }
    }
    let system = decomposition.system().clone();
    let mut cells = Vec::new();
    for k in eps_exps {
        let eps = system.lambda_pow(*k as usize);
        for n in n_range.clone() {
            let q = quantization(decomposition, n, &eps, cfg)?;
            cells.push(Cell {
                n,
                eps: eps.clone(),
                lower: BigUint::from(q.q_lower),
                upper: BigUint::from(q.q_upper),
                exact: q.exact.is_some(),
                witness: None,
            });
        }
    }
    Ok(ScalingReport::from_cells(ReportMode::EntropyOrder, cells))
}

/// Shift-invariance at finite resolution: the pushforward equals the
/// measure's own one-symbol coarsening.
pub fn is_invariant_at_resolution(mu: &DiscreteMeasure) -> Result<bool> {
    let pushed = mu.pushforward()?;
    let coarse = truncate_last(mu)?;
    Ok(pushed == coarse)
}

fn truncate_last(mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    let atoms = mu
        .atoms()
        .iter()
        .map(|(p, w)| {
            if p.len() < 2 {
                return Err(Error::WordTooShort { needed: 2, got: 1 });
            }
            Ok((
                crate::systems::CylinderPoint::new(p.system(), p.word()[..p.len() - 1].to_vec())?,
                w.clone(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::new(mu.system(), atoms)
}

/// Pointwise emergence `E_x(n, eps) = N_M(V(x), n, eps)` for an explicitly
/// supplied accumulation set `V(x)` (for the static variant pass
/// `horizon = None`). Candidates are the elements plus pairwise mixtures.
pub fn pointwise_emergence(
    vx: &[DiscreteMeasure],
    horizon: Option<usize>,
    eps: &BigRational,
    cfg: &GreedyConfig,
) -> Result<usize> {
    if vx.is_empty() {
        return Err(Error::InvalidMeasure("empty V(x)".into()));
    }
    let system = vx[0].system().clone();
    let ctx = match horizon {
        None => None,
        Some(n) => Some(BowenContext::bowen(n)?),
    };
    // candidate pool: the elements plus midpoints
    let mut candidates: Vec<DiscreteMeasure> = vx.to_vec();
    for i in 0..vx.len() {
        for j in (i + 1)..vx.len() {
            let mut atoms: Vec<(crate::systems::CylinderPoint, BigRational)> = Vec::new();
            for (p, w) in vx[i].atoms() {
                atoms.push((p.clone(), w / ratio(2, 1)));
            }
            for (p, w) in vx[j].atoms() {
                atoms.push((p.clone(), w / ratio(2, 1)));
            }
            candidates.push(DiscreteMeasure::new(&system, atoms)?);
        }
    }
    let cand_to_elem: Vec<Vec<BigRational>> = candidates
        .iter()
        .map(|c| {
            vx.iter()
                .map(|m| crate::measures::w1_ultrametric(c, m, ctx.as_ref()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let instance = CoverInstance {
        cand_to_elem,
        span_cmp: SpanCmp::Le,
    };
    let strategy = if vx.len() <= cfg.exact_cap {
        Strategy::Exact
    } else {
        Strategy::Greedy
    };
    Ok(covering_count(&instance, eps, strategy, cfg)?.count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::periodic_orbit_measure;
    use crate::systems::SymbolicSystem;

    fn full2() -> System {
        SymbolicSystem::full_shift(2, ratio(1, 2)).unwrap()
    }

    #[test]
    fn full_shift_entropy_is_exactly_log_m() {
        for m in [2usize, 3] {
            let sys = SymbolicSystem::full_shift(m, ratio(1, 2)).unwrap();
            let report = entropy_estimate(&sys, 2..=8, &[1, 2, 3]).unwrap();
            for eps in &report.per_eps {
                assert!(eps.single_log.exact_geometric);
                assert_eq!(eps.single_log.lower, (m as f64).ln());
                assert_eq!(eps.single_log.upper, (m as f64).ln());
            }
            // counts follow the m^(n+k) pattern
            for cell in &report.cells {
                let k = sys.packing_exponent(&cell.eps, false).unwrap();
                assert_eq!(cell.lower, BigUint::from(m).pow((cell.n + k) as u32));
                assert_eq!(cell.upper, cell.lower);
            }
        }
    }

    #[test]
    fn golden_mean_entropy_matches_transfer_matrix() {
        let sys = SymbolicSystem::golden_mean(ratio(1, 2)).unwrap();
        let report = entropy_estimate(&sys, 2..=12, &[4]).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let spectral = transfer_matrix_spectral_radius(&sys);
        assert!((spectral - phi).abs() < 1e-12);
        let slope = report.per_eps[0].single_log.upper;
        assert!(
            (slope - phi.ln()).abs() < 1e-6,
            "slope {slope} vs ln phi {}",
            phi.ln()
        );
    }

    #[test]
    fn measure_order_brackets_entropy() {
        let sys = full2();
        let cfg = MeasureOrderConfig::default();
        let out = measure_space_entropy_order(&sys, 4..=7, &[2, 3], &cfg).unwrap();
        for (eps, lo, hi) in &out.brackets {
            assert!(
                *lo <= 2f64.ln() + 1e-12 && 2f64.ln() <= *hi + 1e-12,
                "bracket ({lo}, {hi}) at eps {eps} misses ln 2"
            );
        }
        for cell in &out.detail {
            assert!(cell.display_lhs <= cell.display_rhs);
            assert!(cell.bolley_family_ln <= cell.bolley_bound_ln);
        }
    }

    #[test]
    fn hyperspace_order_brackets_entropy() {
        let sys = full2();
        let cfg = HyperspaceOrderConfig::default();
        let out = hyperspace_entropy_order(&sys, 3..=6, &[1, 2], &cfg).unwrap();
        for (eps, lo, hi) in &out.brackets {
            assert!(
                *lo <= 2f64.ln() + 1e-12 && 2f64.ln() <= *hi + 1e-12,
                "bracket ({lo}, {hi}) at eps {eps} misses ln 2"
            );
        }
        // upper cells are powers of two of the covering count
        for cell in &out.report.cells {
            assert!(cell.upper.bits() >= cell.lower.bits());
        }
    }

    #[test]
    fn point_dim_is_exactly_one() {
        let sys = full2();
        let report = metric_order_point_dim(&sys, &[2, 3, 4]).unwrap();
        let mo = report.metric_order.as_ref().unwrap();
        assert!(mo.dim.exact_geometric);
        assert_eq!(mo.dim.lower, 1.0);
        assert_eq!(mo.dim.upper, 1.0);
        // upper counts are 2^(k+1)
        for cell in &report.cells {
            let k = sys.cover_exponent(&cell.eps, false);
            assert_eq!(cell.upper, BigUint::from(2u32).pow(k as u32 + 1));
            assert_eq!(cell.lower, BigUint::from(2u32).pow(k as u32));
        }
    }

    #[test]
    fn hyperspace_metric_order_brackets_dim() {
        let sys = full2();
        let out = metric_order_hyperspace(&sys, &[2, 3, 4], 1024, 1 << 20).unwrap();
        let mo = out.report.metric_order.as_ref().unwrap();
        for (eps, lo, hi) in &mo.per_eps_mo {
            assert!(*lo <= 1.0 && 1.0 <= *hi, "mo cell ({lo},{hi}) at {eps}");
        }
    }

    #[test]
    fn quantization_examples() {
        let sys = full2();
        let cfg = QuantizationConfig::default();
        // single atom: Q = 1
        let mu = periodic_orbit_measure(&sys, &[0, 1], 6).unwrap();
        let single = MeasureEnsemble::dirac(mu.clone());
        let q = quantization(&single, 3, &ratio(1, 8), &cfg).unwrap();
        assert_eq!(q.exact, Some(1));
        // two (n, 4 eps)-separated orbit measures: Q = 2
        let nu = periodic_orbit_measure(&sys, &[1], 6).unwrap();
        let two = MeasureEnsemble::uniform(vec![mu.clone(), nu.clone()]).unwrap();
        let w = crate::measures::w1_ultrametric(
            &mu,
            &nu,
            Some(&BowenContext::bowen(3).unwrap()),
        )
        .unwrap();
        let eps = &w / ratio(5, 1); // 4 eps < w
        let q = quantization(&two, 3, &eps, &cfg).unwrap();
        assert_eq!(q.exact, Some(2));
        assert_eq!(q.separated_witness.len(), 2);
        // huge eps: one codebook point suffices
        let q = quantization(&two, 3, &ratio(2, 1), &cfg).unwrap();
        assert_eq!(q.q_upper, 1);
    }

    #[test]
    fn ergodic_atoms_have_trivial_emergence() {
        let sys = full2();
        let cfg = QuantizationConfig::default();
        for word in [vec![0], vec![0, 1], vec![0, 0, 1]] {
            let mu = periodic_orbit_measure(&sys, &word, 8).unwrap();
            let report =
                measure_emergence(&MeasureEnsemble::dirac(mu), 1..=4, &[1, 2], &cfg).unwrap();
            for cell in &report.cells {
                assert_eq!(cell.upper, BigUint::one());
            }
            for eps in &report.per_eps {
                assert_eq!(eps.double_log.upper, 0.0);
            }
        }
        // non-invariant atoms are rejected
        let bad = DiscreteMeasure::dirac(
            crate::systems::CylinderPoint::parse(&sys, "0110").unwrap(),
        );
        assert!(measure_emergence(
            &MeasureEnsemble::dirac(bad),
            1..=2,
            &[1],
            &cfg
        )
        .is_err());
    }

    #[test]
    fn pointwise_emergence_examples() {
        let sys = full2();
        let cfg = GreedyConfig::default();
        // periodic point: V(x) is a single measure
        let vx = vec![periodic_orbit_measure(&sys, &[0, 1], 6).unwrap()];
        assert_eq!(
            pointwise_emergence(&vx, Some(3), &ratio(1, 8), &cfg).unwrap(),
            1
        );
        // two far orbit measures at small eps
        let vx = vec![
            periodic_orbit_measure(&sys, &[0], 6).unwrap(),
            periodic_orbit_measure(&sys, &[1], 6).unwrap(),
        ];
        assert_eq!(
            pointwise_emergence(&vx, Some(2), &ratio(1, 16), &cfg).unwrap(),
            2
        );
        // eps at the diameter: one ball covers
        assert_eq!(
            pointwise_emergence(&vx, Some(2), &ratio(1, 1), &cfg).unwrap(),
            1
        );
    }

    #[test]
    fn report_csv_is_stable() {
        let sys = full2();
        let a = entropy_estimate(&sys, 2..=5, &[1, 2]).unwrap().to_csv();
        let b = entropy_estimate(&sys, 2..=5, &[1, 2]).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.starts_with("n,epsilon,lower,upper,exact,witness\n"));
    }
}
