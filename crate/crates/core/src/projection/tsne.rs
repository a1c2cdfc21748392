use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pairwise_affinities, Matrix, ProjectionError};
use crate::scalar::{min_max, Scalar};

/// KL divergence is recorded before the first step and then every this many
/// iterations, plus once after the last one.
pub const KL_SAMPLE_EVERY: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingConfig<S> {
    pub perplexity: S,
    pub iterations: usize,
    pub early_exaggeration: S,
    pub exaggeration_iterations: usize,
    pub learning_rate: S,
    pub initial_momentum: S,
    pub final_momentum: S,
    pub momentum_switch: usize,
    pub seed: u64,
}

impl<S: Scalar> Default for EmbeddingConfig<S> {
    fn default() -> Self {
        Self {
            perplexity: S::of(30.0),
            iterations: 750,
            early_exaggeration: S::of(12.0),
            exaggeration_iterations: 250,
            learning_rate: S::of(200.0),
            initial_momentum: S::of(0.5),
            final_momentum: S::of(0.8),
            momentum_switch: 250,
            seed: 42,
        }
    }
}

impl<S: Scalar> EmbeddingConfig<S> {
    pub fn validate(&self) -> Result<(), ProjectionError> {
        let positive = [
            ("perplexity", self.perplexity),
            ("early_exaggeration", self.early_exaggeration),
            ("learning_rate", self.learning_rate),
            ("initial_momentum", self.initial_momentum),
            ("final_momentum", self.final_momentum),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > S::zero()) || !v.is_finite()) {
            return Err(ProjectionError::Config(format!("{name} must be positive, got {v}")));
        }
        if self.perplexity <= S::one() {
            return Err(ProjectionError::Config(format!("perplexity must exceed 1, got {}", self.perplexity)));
        }
        if self.iterations == 0 {
            return Err(ProjectionError::Config("iterations must be positive".into()));
        }
        Ok(())
    }

    /// Perplexity actually used for `n` points: capped at `(n - 1) / 3`, but
    /// never below what a neighbourhood of `n - 1` points can express.
    pub fn effective_perplexity(&self, n: usize) -> S {
        let cap = S::of_usize(n.saturating_sub(1)) / S::of(3.0);
        let floor = S::of(1.5).min(S::of_usize(n.saturating_sub(1)));
        self.perplexity.min(cap).max(floor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding<S> {
    /// Min-max normalised into the unit square.
    pub coords: Vec<[S; 2]>,
    pub kl_trace: Vec<S>,
    #[serde(skip)]
    pub unconverged_rows: Vec<usize>,
}

/// Student-t kernel `1 / (1 + |y_i - y_j|^2)` for every pair, as rows, and
/// the normaliser over all off-diagonal pairs.
fn student_kernel<S: Scalar>(y: &[[S; 2]]) -> (Matrix<S>, S) {
    let n = y.len();
    let mut w = Matrix::zeros(n, n);
    let row_sums: Vec<S> = w
        .as_mut_slice()
        .par_chunks_mut(n.max(1))
        .enumerate()
        .map(|(i, row)| {
            let mut s = S::zero();
            for (j, out) in row.iter_mut().enumerate() {
                if i != j {
                    let dx = y[i][0] - y[j][0];
                    let dy = y[i][1] - y[j][1];
                    let k = S::one() / (S::one() + dx * dx + dy * dy);
                    *out = k;
                    s += k;
                }
            }
            s
        })
        .collect();
    let z = row_sums.into_iter().fold(S::zero(), |a, b| a + b);
    (w, z)
}

/// `KL(P || Q)` for a joint distribution `p` and map positions `y`.
pub fn kl_divergence<S: Scalar>(p: &Matrix<S>, y: &[[S; 2]]) -> S {
    let (w, z) = student_kernel(y);
    let n = y.len();
    let mut kl = S::zero();
    for i in 0..n {
        for j in 0..n {
            let pij = p.get(i, j);
            if i != j && pij > S::zero() {
                kl += pij * (pij / (w.get(i, j) / z)).ln();
            }
        }
    }
    kl
}

fn gradient_with_kernel<S: Scalar>(p: &Matrix<S>, y: &[[S; 2]], w: &Matrix<S>, z: S, exaggeration: S) -> Vec<[S; 2]> {
    let four = S::of(4.0);
    (0..y.len())
        .into_par_iter()
        .map(|i| {
            let mut g = [S::zero(); 2];
            for j in 0..y.len() {
                if i == j {
                    continue;
                }
                let wij = w.get(i, j);
                let coeff = (exaggeration * p.get(i, j) - wij / z) * wij;
                g[0] += coeff * (y[i][0] - y[j][0]);
                g[1] += coeff * (y[i][1] - y[j][1]);
            }
            [four * g[0], four * g[1]]
        })
        .collect()
}

/// Exact gradient of `KL(exaggeration * P || Q)` with respect to each point.
pub fn kl_gradient<S: Scalar>(p: &Matrix<S>, y: &[[S; 2]], exaggeration: S) -> Vec<[S; 2]> {
    let (w, z) = student_kernel(y);
    gradient_with_kernel(p, y, &w, z, exaggeration)
}

/// Rescales each axis to `[0, 1]`. A degenerate axis sits at 0.5.
pub fn normalize_coords<S: Scalar>(coords: &[[S; 2]]) -> Vec<[S; 2]> {
    let mut out = coords.to_vec();
    for axis in 0..2 {
        let vals: Vec<S> = coords.iter().map(|c| c[axis]).collect();
        let Some((lo, hi)) = min_max(&vals) else { continue };
        for c in &mut out {
            c[axis] = if hi > lo { (c[axis] - lo) / (hi - lo) } else { S::of(0.5) };
        }
    }
    out
}

fn all_finite<S: Scalar>(v: &[[S; 2]]) -> bool {
    v.iter().all(|p| p[0].is_finite() && p[1].is_finite())
}

/// Exact-gradient t-SNE into two dimensions. The result is a pure function of
/// `x` and `cfg`, including the seed.
pub fn tsne_embed<S: Scalar>(x: &Matrix<S>, cfg: &EmbeddingConfig<S>) -> Result<Embedding<S>, ProjectionError> {
    cfg.validate()?;
    let n = x.rows();
    match n {
        0 => return Ok(Embedding { coords: Vec::new(), kl_trace: Vec::new(), unconverged_rows: Vec::new() }),
        1 => {
            return Ok(Embedding {
                coords: vec![[S::of(0.5); 2]],
                kl_trace: Vec::new(),
                unconverged_rows: Vec::new(),
            })
        }
        _ => {}
    }
    let affinities = pairwise_affinities(x, cfg.effective_perplexity(n))?;
    let p = &affinities.joint;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let normal = Normal::new(0.0, 1e-4).expect("valid normal");
    let mut y: Vec<[S; 2]> =
        (0..n).map(|_| [S::of(normal.sample(&mut rng)), S::of(normal.sample(&mut rng))]).collect();
    let mut update = vec![[S::zero(); 2]; n];
    let mut gains = vec![[S::one(); 2]; n];
    let min_gain = S::of(0.01);

    let mut kl_trace = vec![kl_divergence(p, &y)];
    for iter in 0..cfg.iterations {
        let exaggeration = if iter < cfg.exaggeration_iterations { cfg.early_exaggeration } else { S::one() };
        let momentum = if iter < cfg.momentum_switch { cfg.initial_momentum } else { cfg.final_momentum };

        let (w, z) = student_kernel(&y);
        let grad = gradient_with_kernel(p, &y, &w, z, exaggeration);
        if !z.is_finite() || !all_finite(&grad) {
            return Err(ProjectionError::NonFinite { iteration: iter });
        }
        for i in 0..n {
            for d in 0..2 {
                let g = grad[i][d];
                gains[i][d] = if g * update[i][d] < S::zero() {
                    gains[i][d] + S::of(0.2)
                } else {
                    gains[i][d] * S::of(0.8)
                }
                .max(min_gain);
                update[i][d] = momentum * update[i][d] - cfg.learning_rate * gains[i][d] * g;
                y[i][d] += update[i][d];
            }
        }
        let mean = [0, 1].map(|d| y.iter().map(|p| p[d]).sum::<S>() / S::of_usize(n));
        for p in &mut y {
            p[0] -= mean[0];
            p[1] -= mean[1];
        }
        if !all_finite(&y) {
            return Err(ProjectionError::NonFinite { iteration: iter });
        }
        let done = iter + 1;
        if done % KL_SAMPLE_EVERY == 0 || done == cfg.iterations {
            let kl = kl_divergence(p, &y);
            if !kl.is_finite() {
                return Err(ProjectionError::NonFinite { iteration: iter });
            }
            kl_trace.push(kl);
        }
    }

    Ok(Embedding { coords: normalize_coords(&y), kl_trace, unconverged_rows: affinities.unconverged })
}
