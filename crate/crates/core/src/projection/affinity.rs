use rayon::prelude::*;

use super::{Matrix, ProjectionError};
use crate::scalar::Scalar;

pub const MAX_BISECTION_STEPS: usize = 64;

/// Joint input-space affinities together with the per-row conditionals and
/// Gaussian precisions they were built from.
#[derive(Debug, Clone)]
pub struct Affinities<S> {
    /// Symmetrised `(P_j|i + P_i|j) / 2n`, zero diagonal, floored at 1e-12.
    pub joint: Matrix<S>,
    /// Row `i` holds `P_j|i`.
    pub conditional: Matrix<S>,
    /// Precision `1 / (2 sigma_i^2)` selected for each row.
    pub betas: Vec<S>,
    pub perplexity: S,
    /// Rows whose bandwidth search hit the step bound without matching the
    /// target perplexity (duplicate or equidistant neighbourhoods).
    pub unconverged: Vec<usize>,
}

pub fn squared_distances<S: Scalar>(x: &Matrix<S>) -> Matrix<S> {
    let n = x.rows();
    let mut d = Matrix::zeros(n, n);
    d.as_mut_slice().par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
        let xi = x.row(i);
        for (j, out) in row.iter_mut().enumerate() {
            if i != j {
                *out = xi.iter().zip(x.row(j)).map(|(&a, &b)| (a - b) * (a - b)).sum();
            }
        }
    });
    d
}

struct RowFit<S> {
    probs: Vec<S>,
    beta: S,
    converged: bool,
}

/// Gaussian conditional over `dist` (self excluded via `skip`) at precision
/// `beta`. Returns normalised probabilities and the entropy in nats.
fn row_distribution<S: Scalar>(dist: &[S], skip: usize, beta: S, shift: S, probs: &mut [S]) -> S {
    let mut sum = S::zero();
    let mut weighted = S::zero();
    for (j, (&d, p)) in dist.iter().zip(probs.iter_mut()).enumerate() {
        if j == skip {
            *p = S::zero();
            continue;
        }
        let e = (-(beta * (d - shift))).exp();
        *p = e;
        sum += e;
        weighted += (d - shift) * e;
    }
    for p in probs.iter_mut() {
        *p /= sum;
    }
    sum.ln() + beta * weighted / sum
}

fn fit_row<S: Scalar>(dist: &[S], i: usize, perplexity: S) -> RowFit<S> {
    let n = dist.len();
    let others = || dist.iter().enumerate().filter(move |&(j, _)| j != i).map(|(_, &d)| d);
    let shift = others().fold(S::infinity(), S::min);
    let spread = others().map(|d| d - shift).sum::<S>() / S::of_usize(n - 1);
    let tol = S::of(1e-5).max(perplexity * S::epsilon() * S::of(100.0));

    let mut beta = if spread > S::zero() { S::one() / spread } else { S::one() };
    let (mut lo, mut hi) = (S::zero(), S::infinity());
    let mut probs = vec![S::zero(); n];
    for _ in 0..MAX_BISECTION_STEPS {
        let entropy = row_distribution(dist, i, beta, shift, &mut probs);
        let realized = entropy.exp();
        if (realized - perplexity).abs() <= tol {
            return RowFit { probs, beta, converged: true };
        }
        if realized > perplexity {
            lo = beta;
            beta = if hi.is_infinite() { beta * S::of(2.0) } else { (beta + hi) / S::of(2.0) };
        } else {
            hi = beta;
            beta = (lo + beta) / S::of(2.0);
        }
    }
    row_distribution(dist, i, beta, shift, &mut probs);
    RowFit { probs, beta, converged: false }
}

/// Per-row Gaussian bandwidths matched to `perplexity` by bisection on the
/// precision, then symmetrised into a joint distribution.
pub fn pairwise_affinities<S: Scalar>(x: &Matrix<S>, perplexity: S) -> Result<Affinities<S>, ProjectionError> {
    let n = x.rows();
    if n < 2 {
        return Err(ProjectionError::TooFewPoints { needed: 2, got: n });
    }
    if let Some(i) = (0..n).find(|&i| x.row(i).iter().any(|v| !v.is_finite())) {
        return Err(ProjectionError::NonFiniteInput(i));
    }
    if !(perplexity >= S::one()) {
        return Err(ProjectionError::Config(format!("perplexity must be at least 1, got {perplexity}")));
    }
    let dist = squared_distances(x);
    let fits: Vec<RowFit<S>> = (0..n).into_par_iter().map(|i| fit_row(dist.row(i), i, perplexity)).collect();

    let mut conditional = Matrix::zeros(n, n);
    let mut betas = Vec::with_capacity(n);
    let mut unconverged = Vec::new();
    for (i, fit) in fits.into_iter().enumerate() {
        conditional.row_mut(i).copy_from_slice(&fit.probs);
        betas.push(fit.beta);
        if !fit.converged {
            unconverged.push(i);
        }
    }

    let floor = S::of(1e-12);
    let denom = S::of_usize(2 * n);
    let mut joint = Matrix::zeros(n, n);
    let mut total = S::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let p = ((conditional.get(i, j) + conditional.get(j, i)) / denom).max(floor);
                joint.set(i, j, p);
                total += p;
            }
        }
    }
    for v in joint.as_mut_slice() {
        *v /= total;
    }
    Ok(Affinities { joint, conditional, betas, perplexity, unconverged })
}
