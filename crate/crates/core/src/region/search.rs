//! Seeded multi-start coordinate search over conditional pmfs.
//!
//! The decision variables are a list of row-stochastic blocks (one per
//! kernel). Each restart starts from a fixed or random sparse point and
//! refines one row at a time by moving probability mass between two cells.
//! Distortion and rate caps enter as a penalty whose weight grows every
//! round; the best strictly feasible point seen is kept.
//!
//! Restarts run in parallel but each is sequential and seeded by its own
//! index, and the merge orders results by value and then by the block
//! contents, so the outcome does not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Search effort. Every field must be at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub restarts: usize,
    pub refinement_rounds: usize,
    /// Initial move size is `1 / grid_levels`; it halves whenever a round
    /// brings no improvement.
    pub grid_levels: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 8,
            refinement_rounds: 24,
            grid_levels: 8,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.refinement_rounds == 0 || self.grid_levels == 0 {
            return Err(Error::EmptyBudget);
        }
        Ok(())
    }
}

/// Largest penalty weight.
const MU_MAX: f64 = 1e6;
/// Penalty weight growth per round.
const MU_GROWTH: f64 = 4.0;
/// Violation at or below this counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const MIN_GAIN: f64 = 1e-12;

pub type Blocks = Vec<Vec<f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    /// Total constraint excess, 0 when feasible.
    pub violation: f64,
}

impl Score {
    fn penalized(&self, mu: f64) -> f64 {
        self.value + mu * self.violation
    }

    pub fn feasible(&self) -> bool {
        self.violation <= FEASIBILITY_TOL
    }
}

pub trait SearchProblem: Sync {
    fn shapes(&self) -> Vec<Shape>;

    fn score(&self, blocks: &[Vec<f64>]) -> Score;

    /// Probability of the conditioning tuple of every row of `block`. Rows
    /// with zero mass cannot affect the score and are skipped.
    fn row_masses(&self, blocks: &[Vec<f64>], block: usize) -> Vec<f64> {
        let _ = blocks;
        vec![1.0; self.shapes()[block].rows]
    }

    /// Problem-specific deterministic starting points.
    fn named_starts(&self) -> Vec<Blocks> {
        Vec::new()
    }
}

/// Every row puts all mass on column 0.
pub fn constant_start(shapes: &[Shape]) -> Blocks {
    shapes
        .iter()
        .map(|s| {
            let mut b = vec![0.0; s.rows * s.cols];
            (0..s.rows).for_each(|r| b[r * s.cols] = 1.0);
            b
        })
        .collect()
}

/// Row `r` of block `b` puts all mass on `column(b, r)`.
pub fn deterministic_start(shapes: &[Shape], column: impl Fn(usize, usize) -> usize) -> Blocks {
    shapes
        .iter()
        .enumerate()
        .map(|(bi, s)| {
            let mut b = vec![0.0; s.rows * s.cols];
            (0..s.rows).for_each(|r| b[r * s.cols + column(bi, r) % s.cols] = 1.0);
            b
        })
        .collect()
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn row_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5EED, |h, &p| splitmix(h ^ splitmix(p)))
}

/// Sparse random rows: 1 to 3 nonzero cells among the first 4 columns.
fn random_start(shapes: &[Shape], seed: u64, restart: usize) -> Blocks {
    shapes
        .iter()
        .enumerate()
        .map(|(bi, s)| {
            let mut b = vec![0.0; s.rows * s.cols];
            let pool = s.cols.min(4);
            for r in 0..s.rows {
                let mut rng = ChaCha8Rng::seed_from_u64(row_seed(&[seed, restart as u64, bi as u64, r as u64]));
                let k = rng.gen_range(1..=s.cols.min(3));
                let mut cols: Vec<usize> = (0..pool).collect();
                for i in 0..k.min(pool) {
                    let j = rng.gen_range(i..pool);
                    cols.swap(i, j);
                }
                let weights: Vec<f64> = (0..k.min(pool)).map(|_| rng.gen::<f64>() + 0.05).collect();
                let total: f64 = weights.iter().sum();
                for (c, w) in cols.iter().zip(&weights) {
                    b[r * s.cols + c] = w / total;
                }
            }
            b
        })
        .collect()
}

/// Whole-block moves. Mixing every row toward a point mass on column `c`
/// adds a shared "erasure" outcome; draining `c` removes one. Both change
/// all rows together, which single-row moves cannot do without passing
/// through worse points.
fn block_move<P: SearchProblem>(
    problem: &P,
    blocks: &mut Blocks,
    bi: usize,
    shape: Shape,
    step: f64,
    mu: f64,
    base: f64,
) -> Option<Score> {
    let cols = shape.cols;
    let used: Vec<usize> = (0..cols)
        .filter(|&c| (0..shape.rows).any(|r| blocks[bi][r * cols + c] > 0.0))
        .collect();
    let mut candidates = used.clone();
    if let Some(fresh) = (0..cols).find(|c| !used.contains(c)) {
        candidates.push(fresh);
    }
    let original = blocks[bi].clone();
    let mut best: Option<(Vec<f64>, Score)> = None;
    let mut best_pen = base - MIN_GAIN;
    for &c in &candidates {
        for drain in [false, true] {
            let mut trial = original.clone();
            let mut changed = false;
            for row in trial.chunks_mut(cols) {
                if drain {
                    let rest: f64 = row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, v)| v).sum();
                    if row[c] == 0.0 || rest <= 0.0 {
                        continue;
                    }
                    let moved = step.min(1.0) * row[c];
                    for (k, cell) in row.iter_mut().enumerate() {
                        if k != c {
                            *cell += moved * *cell / rest;
                        }
                    }
                    row[c] -= moved;
                } else {
                    for cell in row.iter_mut() {
                        *cell *= 1.0 - step;
                    }
                    row[c] += step;
                }
                changed = true;
            }
            if !changed {
                continue;
            }
            blocks[bi] = trial;
            let s = problem.score(blocks);
            let pen = s.penalized(mu);
            if pen < best_pen {
                best_pen = pen;
                best = Some((std::mem::take(&mut blocks[bi]), s));
            }
        }
    }
    match best {
        Some((b, s)) => {
            blocks[bi] = b;
            Some(s)
        }
        None => {
            blocks[bi] = original;
            None
        }
    }
}

/// Mix about half of the rows with a random sparse row.
fn perturb(blocks: &mut Blocks, shapes: &[Shape], seed: u64) {
    let noise = random_start(shapes, seed, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (bi, s) in shapes.iter().enumerate() {
        for r in 0..s.rows {
            if s.cols < 2 || !rng.gen_bool(0.5) {
                continue;
            }
            let alpha: f64 = rng.gen_range(0.2..0.6);
            for c in 0..s.cols {
                let cell = &mut blocks[bi][r * s.cols + c];
                *cell = (1.0 - alpha) * *cell + alpha * noise[bi][r * s.cols + c];
            }
        }
    }
}

/// Result of a search: the best feasible point plus the best feasible point
/// of every restart that found one.
#[derive(Debug, Clone)]
pub struct Found {
    pub blocks: Blocks,
    pub score: Score,
    pub per_restart: Vec<(Blocks, Score)>,
}

fn lexicographic(a: &Blocks, b: &Blocks) -> std::cmp::Ordering {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Minimize `problem` from `warm` starts, the problem's named starts and
/// random starts, `budget.restarts` runs in total.
pub fn minimize<P: SearchProblem>(problem: &P, budget: &SearchBudget, warm: &[Blocks]) -> Result<Found> {
    budget.validate()?;
    let shapes = problem.shapes();
    let mut starts: Vec<Blocks> = warm.to_vec();
    starts.extend(problem.named_starts());
    starts.truncate(budget.restarts);
    let fixed = starts.len();
    let results: Vec<Option<(Blocks, Score)>> = (0..budget.restarts)
        .into_par_iter()
        .map(|i| {
            let init = if i < fixed {
                starts[i].clone()
            } else {
                random_start(&shapes, budget.seed, i)
            };
            refine(problem, &shapes, init, budget, i)
        })
        .collect();
    let per_restart: Vec<(Blocks, Score)> = results.into_iter().flatten().collect();
    let best = per_restart
        .iter()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then_with(|| lexicographic(&a.0, &b.0)))
        .cloned()
        .ok_or(Error::NoFeasibleScheme)?;
    Ok(Found {
        blocks: best.0,
        score: best.1,
        per_restart,
    })
}

fn better_feasible(best: &Option<(Blocks, Score)>, s: &Score) -> bool {
    s.feasible() && best.as_ref().is_none_or(|(_, b)| s.value < b.value - MIN_GAIN)
}

fn refine<P: SearchProblem>(
    problem: &P,
    shapes: &[Shape],
    mut blocks: Blocks,
    budget: &SearchBudget,
    restart: usize,
) -> Option<(Blocks, Score)> {
    let coarse = 1.0 / budget.grid_levels as f64;
    let finest = coarse / 64.0;
    let mut step = coarse;
    let mut mu = 1.0;
    let mut current = problem.score(&blocks);
    let mut best: Option<(Blocks, Score)> = None;
    if current.feasible() {
        best = Some((blocks.clone(), current));
    }
    for round in 0..budget.refinement_rounds {
        let mut improved = false;
        for (bi, shape) in shapes.iter().enumerate() {
            let cols = shape.cols;
            if cols < 2 {
                continue;
            }
            let masses = problem.row_masses(&blocks, bi);
            let mut used: Vec<bool> = (0..cols)
                .map(|c| (0..shape.rows).any(|r| blocks[bi][r * cols + c] > 0.0))
                .collect();
            for r in 0..shape.rows {
                if masses[r] <= 0.0 {
                    continue;
                }
                let mut candidates: Vec<usize> = (0..cols).filter(|&c| used[c]).collect();
                if let Some(fresh) = (0..cols).find(|&c| !used[c]) {
                    candidates.push(fresh);
                }
                let base = current.penalized(mu);
                let mut best_move: Option<(usize, usize, f64, Score)> = None;
                let mut best_pen = base - MIN_GAIN;
                for a in 0..cols {
                    let have = blocks[bi][r * cols + a];
                    if have <= 0.0 {
                        continue;
                    }
                    let partial = step.min(have);
                    let amounts: &[f64] = if partial < have { &[partial, have] } else { &[have] };
                    for &c in &candidates {
                        if c == a {
                            continue;
                        }
                        for &amt in amounts {
                            let (old_a, old_c) = (blocks[bi][r * cols + a], blocks[bi][r * cols + c]);
                            blocks[bi][r * cols + a] = if amt >= old_a { 0.0 } else { old_a - amt };
                            blocks[bi][r * cols + c] = old_c + amt;
                            let s = problem.score(&blocks);
                            blocks[bi][r * cols + a] = old_a;
                            blocks[bi][r * cols + c] = old_c;
                            let pen = s.penalized(mu);
                            if pen < best_pen {
                                best_pen = pen;
                                best_move = Some((a, c, amt, s));
                            }
                        }
                    }
                }
                if let Some((a, c, amt, s)) = best_move {
                    let old_a = blocks[bi][r * cols + a];
                    blocks[bi][r * cols + a] = if amt >= old_a { 0.0 } else { old_a - amt };
                    blocks[bi][r * cols + c] += amt;
                    used[c] = true;
                    current = s;
                    improved = true;
                    if better_feasible(&best, &s) {
                        best = Some((blocks.clone(), s));
                    }
                }
            }
        }
        for (bi, shape) in shapes.iter().enumerate() {
            if shape.cols < 2 {
                continue;
            }
            if let Some(s) = block_move(problem, &mut blocks, bi, *shape, step, mu, current.penalized(mu)) {
                current = s;
                improved = true;
                if better_feasible(&best, &s) {
                    best = Some((blocks.clone(), s));
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < finest {
                // Converged at the finest scale: kick the best point and
                // continue from there.
                if let Some((b, _)) = &best {
                    blocks = b.clone();
                }
                let seed = row_seed(&[budget.seed, restart as u64, round as u64, 0xB0]);
                perturb(&mut blocks, shapes, seed);
                current = problem.score(&blocks);
                step = coarse;
            }
        }
        mu = (mu * MU_GROWTH).min(MU_MAX);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Minimize the distance of one 3-column row to a target pmf, with a cap
    /// on the first cell.
    struct Toy {
        target: [f64; 3],
        cap: f64,
    }

    impl SearchProblem for Toy {
        fn shapes(&self) -> Vec<Shape> {
            vec![Shape { rows: 1, cols: 3 }]
        }
        fn score(&self, blocks: &[Vec<f64>]) -> Score {
            let row = &blocks[0];
            Score {
                value: row.iter().zip(&self.target).map(|(a, b)| (a - b).abs()).sum(),
                violation: (row[0] - self.cap).max(0.0),
            }
        }
    }

    #[test]
    fn finds_constrained_optimum() {
        let toy = Toy {
            target: [0.6, 0.3, 0.1],
            cap: 0.5,
        };
        let found = minimize(&toy, &SearchBudget::default(), &[]).unwrap();
        assert!(found.score.feasible());
        // Resolution is limited by the finest step, not exact.
        assert!((found.score.value - 0.2).abs() < 1e-3, "{:?}", found.score);
        assert!(found.blocks[0][0] <= 0.5 + 1e-12);
    }

    #[test]
    fn deterministic_and_budget_checked() {
        let toy = Toy {
            target: [0.2, 0.3, 0.5],
            cap: 1.0,
        };
        let budget = SearchBudget { seed: 7, ..Default::default() };
        let a = minimize(&toy, &budget, &[]).unwrap();
        let b = minimize(&toy, &budget, &[]).unwrap();
        assert_eq!(a.blocks, b.blocks);
        let empty = SearchBudget { restarts: 0, ..Default::default() };
        assert!(matches!(minimize(&toy, &empty, &[]), Err(Error::EmptyBudget)));
    }

    #[test]
    fn infeasible_reports_no_scheme() {
        let toy = Toy {
            target: [0.2, 0.3, 0.5],
            cap: -1.0,
        };
        assert!(matches!(
            minimize(&toy, &SearchBudget::default(), &[]),
            Err(Error::NoFeasibleScheme)
        ));
    }

    #[test]
    fn random_rows_are_normalized() {
        let shapes = [Shape { rows: 5, cols: 7 }, Shape { rows: 2, cols: 1 }];
        for b in random_start(&shapes, 3, 4) {
            for row in b.chunks(if b.len() == 35 { 7 } else { 1 }) {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}
