//! The cellular-automaton engine: grid state, Moore neighbourhood on a torus,
//! exponential timer sampling and the synchronous one-cycle transition rule.
//!
//! One cycle resolves in three phases:
//! 1. every counter decrements,
//! 2. busy cells whose counter reached zero hang up and draw a fresh standby
//!    countdown,
//! 3. free cells whose counter reached zero call a random neighbour; callers
//!    are processed in a random permutation, a call to a free line connects
//!    both ends for one shared holding time, a call to a busy line is denied
//!    and retried next cycle.
//!
//! The phase order means a line freed this cycle can already be called this
//! cycle. All randomness flows through the caller-supplied RNG in a fixed
//! order, so a run is fully determined by its seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// State of one subscriber cell.
///
/// Counters are in whole CA cycles and stay >= 1 at the end of every cycle;
/// a zero is resolved within the cycle it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellState {
    /// Standby; the line will attempt a call when the countdown hits zero.
    Free { cycles_to_call: u32 },
    /// In conversation; the line hangs up when the countdown hits zero.
    Busy { cycles_to_completion: u32 },
}

impl CellState {
    pub fn is_busy(&self) -> bool {
        matches!(self, CellState::Busy { .. })
    }

    /// Signed counter as displayed on a rendered frame: positive while busy
    /// (cycles to completion), negative while free (cycles to next call).
    pub fn signed_counter(&self) -> i64 {
        match *self {
            CellState::Free { cycles_to_call } => -(cycles_to_call as i64),
            CellState::Busy {
                cycles_to_completion,
            } => cycles_to_completion as i64,
        }
    }
}

/// Simulation parameters for a single run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    /// Call rate: standby times are Exp(lambda), in 1/cycles.
    pub lambda: f64,
    /// Service rate: holding times are Exp(mu), in 1/cycles.
    pub mu: f64,
    pub width: usize,
    pub height: usize,
    /// Total cycles to simulate.
    pub cycles: usize,
    /// Leading cycles excluded from statistics by downstream consumers.
    pub burn_in: usize,
    pub seed: u64,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if self.lambda.is_nan() || self.lambda <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("must be > 0, got {}", self.lambda),
            });
        }
        if self.mu.is_nan() || self.mu <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: format!("must be > 0, got {}", self.mu),
            });
        }
        if self.width < 3 || self.height < 3 {
            return Err(Error::GridTooSmall {
                width: self.width,
                height: self.height,
            });
        }
        if self.cycles == 0 {
            return Err(Error::InvalidParameter {
                name: "cycles",
                reason: "must be >= 1".into(),
            });
        }
        if self.burn_in >= self.cycles {
            return Err(Error::InvalidParameter {
                name: "burn_in",
                reason: format!("must be < cycles ({} >= {})", self.burn_in, self.cycles),
            });
        }
        Ok(())
    }
}

/// One CA configuration: a toroidal field of cells at time step `cycle`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub width: usize,
    pub height: usize,
    /// Row-major, `height * width` entries.
    pub cells: Vec<CellState>,
    pub cycle: u64,
}

impl Grid {
    #[inline]
    fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn cell(&self, row: usize, col: usize) -> CellState {
        self.cells[self.index(row, col)]
    }

    /// Number of cells currently in conversation.
    pub fn busy_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_busy()).count()
    }
}

/// Draws an exponential holding/standby time with the given rate and
/// discretizes it to whole cycles: `max(1, ceil(-ln(u) / rate))`.
///
/// `u` must come from the caller's RNG stream, uniform on (0, 1].
pub fn sample_exp_cycles(rate: f64, u: f64) -> Result<u32> {
    if rate.is_nan() || rate <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "rate",
            reason: format!("must be > 0, got {rate}"),
        });
    }
    if u.is_nan() || u <= 0.0 || u > 1.0 {
        return Err(Error::InvalidParameter {
            name: "u",
            reason: format!("must be in (0, 1], got {u}"),
        });
    }
    let cycles = (-u.ln() / rate).ceil();
    Ok((cycles.max(1.0) as u64).min(u32::MAX as u64) as u32)
}

fn draw_exp_cycles<R: Rng>(rate: f64, rng: &mut R) -> u32 {
    // gen::<f64>() is uniform on [0, 1); flip to (0, 1] so ln is finite.
    let u = 1.0 - rng.gen::<f64>();
    sample_exp_cycles(rate, u).expect("rate validated on entry")
}

/// The 8 Moore neighbours of (row, col) under toroidal wrap, in row-major
/// offset order.
pub fn moore_neighbors(row: usize, col: usize, grid: &Grid) -> Result<[(usize, usize); 8]> {
    if grid.width < 3 || grid.height < 3 {
        return Err(Error::GridTooSmall {
            width: grid.width,
            height: grid.height,
        });
    }
    let h = grid.height;
    let w = grid.width;
    let up = (row + h - 1) % h;
    let down = (row + 1) % h;
    let left = (col + w - 1) % w;
    let right = (col + 1) % w;
    Ok([
        (up, left),
        (up, col),
        (up, right),
        (row, left),
        (row, right),
        (down, left),
        (down, col),
        (down, right),
    ])
}

/// Builds the initial grid: every cell free with an independent exponential
/// countdown to its first call.
pub fn init_grid<R: Rng>(params: &SimParams, rng: &mut R) -> Result<Grid> {
    params.validate()?;
    let cells = (0..params.width * params.height)
        .map(|_| CellState::Free {
            cycles_to_call: draw_exp_cycles(params.lambda, rng),
        })
        .collect();
    Ok(Grid {
        width: params.width,
        height: params.height,
        cells,
        cycle: 0,
    })
}

/// Advances the grid by one synchronous cycle.
pub fn step<R: Rng>(grid: &mut Grid, params: &SimParams, rng: &mut R) {
    // Phase 1: decrement every counter.
    for cell in &mut grid.cells {
        match cell {
            CellState::Free { cycles_to_call } => *cycles_to_call -= 1,
            CellState::Busy {
                cycles_to_completion,
            } => *cycles_to_completion -= 1,
        }
    }

    // Phase 2: completions, row-major scan.
    for idx in 0..grid.cells.len() {
        if grid.cells[idx]
            == (CellState::Busy {
                cycles_to_completion: 0,
            })
        {
            grid.cells[idx] = CellState::Free {
                cycles_to_call: draw_exp_cycles(params.lambda, rng),
            };
        }
    }

    // Phase 3: calls, in a uniformly random caller permutation.
    let mut callers: Vec<usize> = (0..grid.cells.len())
        .filter(|&idx| grid.cells[idx] == CellState::Free { cycles_to_call: 0 })
        .collect();
    callers.shuffle(rng);

    for idx in callers {
        // A caller already claimed as an addressee is busy now and skips its
        // own attempt this cycle.
        if grid.cells[idx] != (CellState::Free { cycles_to_call: 0 }) {
            continue;
        }
        let row = idx / grid.width;
        let col = idx % grid.width;
        let neighbors = moore_neighbors(row, col, grid).expect("grid size validated at init");
        let (nr, nc) = neighbors[rng.gen_range(0..8)];
        let nidx = nr * grid.width + nc;
        match grid.cells[nidx] {
            CellState::Free { .. } => {
                // Connection: one shared holding time for both ends.
                let duration = draw_exp_cycles(params.mu, rng);
                grid.cells[idx] = CellState::Busy {
                    cycles_to_completion: duration,
                };
                grid.cells[nidx] = CellState::Busy {
                    cycles_to_completion: duration,
                };
            }
            CellState::Busy { .. } => {
                // Denial of service: retry next cycle with a fresh neighbour.
                grid.cells[idx] = CellState::Free { cycles_to_call: 1 };
            }
        }
    }

    grid.cycle += 1;
}

/// Runs a full simulation and records the busy count after every cycle.
pub fn run(params: &SimParams) -> Result<Vec<u32>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut grid = init_grid(params, &mut rng)?;
    let mut series = Vec::with_capacity(params.cycles);
    for _ in 0..params.cycles {
        step(&mut grid, params, &mut rng);
        series.push(grid.busy_count() as u32);
    }
    Ok(series)
}

/// Like [`run`] but also hands every `frame_every`-th grid to `on_frame`.
pub fn run_with_frames<F>(
    params: &SimParams,
    frame_every: usize,
    mut on_frame: F,
) -> Result<Vec<u32>>
where
    F: FnMut(&Grid) -> Result<()>,
{
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut grid = init_grid(params, &mut rng)?;
    let mut series = Vec::with_capacity(params.cycles);
    for c in 0..params.cycles {
        step(&mut grid, params, &mut rng);
        series.push(grid.busy_count() as u32);
        if (c + 1) % frame_every == 0 {
            on_frame(&grid)?;
        }
    }
    Ok(series)
}
