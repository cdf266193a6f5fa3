//! Multi-realization orchestration: (lambda, mu) sweeps averaged over seeded
//! realizations, and the one-parameter fit of the mean-load relation
//! Z = C * (lambda / (1 + lambda)) * ((1 + mu) / mu).

use rayon::prelude::*;

use crate::analysis::{self, HurstEstimate};
use crate::automaton::{self, SimParams};
use crate::error::{Error, Result};

pub const DEFAULT_REALIZATIONS: usize = 40;
pub const DEFAULT_MIN_N: usize = 16;
pub const DEFAULT_POINTS_PER_DECADE: usize = 10;

/// A (lambda, mu) sweep over independent seeded realizations.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub realizations: usize,
    /// Dimensions, cycle count and burn-in for every cell; lambda, mu and
    /// seed are overridden per realization.
    pub base_params: SimParams,
    pub seed_base: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.mus.is_empty() {
            return Err(Error::InvalidParameter {
                name: "lambdas/mus",
                reason: "grids must be non-empty".into(),
            });
        }
        if self.realizations == 0 {
            return Err(Error::InvalidParameter {
                name: "realizations",
                reason: "must be >= 1".into(),
            });
        }
        for &l in &self.lambdas {
            if l.is_nan() || l <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "lambdas",
                    reason: format!("rates must be > 0, got {l}"),
                });
            }
        }
        for &m in &self.mus {
            if m.is_nan() || m <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "mus",
                    reason: format!("rates must be > 0, got {m}"),
                });
            }
        }
        SimParams {
            lambda: self.lambdas[0],
            mu: self.mus[0],
            seed: self.seed_base,
            ..self.base_params
        }
        .validate()
    }
}

/// One aggregated sweep row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub mu: f64,
    pub mean_z: f64,
    pub std_z: f64,
    pub mean_h: f64,
    pub std_h: f64,
    pub realizations_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Fitted scaling constant of the mean-load relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadFit {
    pub c: f64,
    pub rms_residual: f64,
}

/// Shape of the mean-load relation: g(lambda, mu) = lambda/(1+lambda) * (1+mu)/mu.
pub fn load_shape(lambda: f64, mu: f64) -> f64 {
    (lambda / (1.0 + lambda)) * ((1.0 + mu) / mu)
}

/// Per-realization seed, mixed from the base seed, the rate pair and the
/// realization index so every cell is reproducible in isolation and adding
/// realizations never disturbs earlier ones.
pub fn derive_seed(seed_base: u64, lambda: f64, mu: f64, realization: u64) -> u64 {
    let mut x = seed_base
        ^ lambda.to_bits().rotate_left(17)
        ^ mu.to_bits().rotate_left(41)
        ^ realization.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    // splitmix64 finalizer
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Runs one realization of one sweep cell: mean busy count over the
/// post-burn-in cycles plus a Hurst estimate of the same series.
pub fn run_cell(
    lambda: f64,
    mu: f64,
    base_params: &SimParams,
    realization_index: u64,
    seed_base: u64,
) -> Result<(f64, HurstEstimate<f64>)> {
    let params = SimParams {
        lambda,
        mu,
        seed: derive_seed(seed_base, lambda, mu, realization_index),
        ..*base_params
    };
    let series = automaton::run(&params)?;
    let post: Vec<f64> = series[params.burn_in..].iter().map(|&z| z as f64).collect();
    let mean_z = analysis::series_mean(&post)?;
    let curve = analysis::rs_curve(&post, DEFAULT_MIN_N, DEFAULT_POINTS_PER_DECADE)?;
    let hurst = analysis::estimate_hurst(&curve)?;
    Ok((mean_z, hurst))
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every (lambda, mu) cell over `realizations` independent seeds.
///
/// Realizations execute in parallel; aggregation order is fixed,
/// so the result is identical however the work is scheduled. Degenerate
/// realizations are dropped and counted, a cell with none left reports
/// `realizations_used = 0`.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;

    let mut cells: Vec<(f64, f64)> = Vec::new();
    for &lambda in &spec.lambdas {
        for &mu in &spec.mus {
            cells.push((lambda, mu));
        }
    }

    let tasks: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..spec.realizations as u64).map(move |r| (c, r)))
        .collect();

    let outcomes: Vec<Result<(f64, HurstEstimate<f64>)>> = tasks
        .par_iter()
        .map(|&(c, r)| {
            let (lambda, mu) = cells[c];
            run_cell(lambda, mu, &spec.base_params, r, spec.seed_base)
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    for (c, &(lambda, mu)) in cells.iter().enumerate() {
        let mut zs = Vec::new();
        let mut hs = Vec::new();
        for r in 0..spec.realizations {
            match &outcomes[c * spec.realizations + r] {
                Ok((z, h)) => {
                    zs.push(*z);
                    hs.push(h.h);
                }
                Err(Error::DegenerateSeries) | Err(Error::InsufficientData { .. }) => {}
                Err(e) => {
                    return Err(Error::InvalidParameter {
                        name: "sweep",
                        reason: format!("cell ({lambda}, {mu}) realization {r}: {e}"),
                    })
                }
            }
        }
        if zs.is_empty() {
            rows.push(SweepRow {
                lambda,
                mu,
                mean_z: f64::NAN,
                std_z: f64::NAN,
                mean_h: f64::NAN,
                std_h: f64::NAN,
                realizations_used: 0,
            });
        } else {
            let (mean_z, std_z) = mean_and_std(&zs);
            let (mean_h, std_h) = mean_and_std(&hs);
            rows.push(SweepRow {
                lambda,
                mu,
                mean_z,
                std_z,
                mean_h,
                std_h,
                realizations_used: zs.len(),
            });
        }
    }
    Ok(SweepResult { rows })
}

/// Closed-form least-squares fit of the scaling constant C in
/// Z = C * g(lambda, mu): C = sum(z * g) / sum(g^2). `field_cells` bounds the
/// admissible mean loads for the given field size.
pub fn fit_load_constant(result: &SweepResult, field_cells: usize) -> Result<LoadFit> {
    let usable: Vec<&SweepRow> = result
        .rows
        .iter()
        .filter(|r| r.realizations_used >= 1)
        .collect();
    if usable.is_empty() {
        return Err(Error::InsufficientData { got: 0, need: 1 });
    }
    for row in &usable {
        if row.mean_z.is_nan() || row.mean_z < 0.0 || row.mean_z > field_cells as f64 {
            return Err(Error::InvalidParameter {
                name: "result",
                reason: format!(
                    "mean_z {} outside [0, {field_cells}] at ({}, {})",
                    row.mean_z, row.lambda, row.mu
                ),
            });
        }
    }

    let mut num = 0.0;
    let mut den = 0.0;
    for row in &usable {
        let g = load_shape(row.lambda, row.mu);
        num += row.mean_z * g;
        den += g * g;
    }
    if den == 0.0 {
        return Err(Error::InvalidParameter {
            name: "sweep",
            reason: "load shape vanished on every row".into(),
        });
    }
    let c = num / den;
    let ss: f64 = usable
        .iter()
        .map(|row| (row.mean_z - c * load_shape(row.lambda, row.mu)).powi(2))
        .sum();
    Ok(LoadFit {
        c,
        rms_residual: (ss / usable.len() as f64).sqrt(),
    })
}
