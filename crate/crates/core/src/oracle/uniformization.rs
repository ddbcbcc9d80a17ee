//! Transient analysis by uniformization.
//!
//! With `Λ ≥ max exit rate` and `M = I + Q/Λ` (a stochastic matrix),
//! `P(t) = Σ_n Poisson(Λt; n) Mⁿ`. The series is truncated once the Poisson
//! tail is provably below the requested tolerance; since `Mⁿ` is stochastic,
//! that tail bounds the error of `P(t)f` by `tail · ‖f‖∞`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::chain::Generator;

/// A value with a certified absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certified {
    pub value: f64,
    pub error: f64,
}

impl Certified {
    pub fn lower(&self) -> f64 {
        self.value - self.error
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error
    }
}

/// Truncated Poisson weights `w_0..w_N` with a bound on `Σ_{n>N} w_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWeights {
    pub weights: Vec<f64>,
    pub tail: f64,
}

/// Poisson(`mean`) weights truncated where the remaining mass is below `tol`.
///
/// For `n + 2 > mean`, `Σ_{j>n} w_j ≤ w_{n+1} (n+2)/(n+2−mean)` since the
/// ratio of consecutive weights is `mean/(j+1)`.
pub fn poisson_weights(mean: f64, tol: f64) -> PoissonWeights {
    assert!(mean >= 0.0 && mean.is_finite(), "Poisson mean must be finite and non-negative");
    assert!(tol > 0.0, "tolerance must be positive");
    if mean == 0.0 {
        return PoissonWeights {
            weights: vec![1.0],
            tail: 0.0,
        };
    }
    let lm = mean.ln();
    let w = |n: usize| (-mean + n as f64 * lm - ln_gamma(n as f64 + 1.0)).exp();
    let mut weights = Vec::with_capacity(mean as usize + 64);
    let mut n = 0usize;
    loop {
        weights.push(w(n));
        let m = n as f64 + 2.0;
        if m > mean {
            let tail = w(n + 1) * m / (m - mean);
            if tail < tol {
                return PoissonWeights { weights, tail };
            }
        }
        n += 1;
    }
}

fn lambda_of(g: &Generator) -> f64 {
    g.max_exit_rate().max(1) as f64
}

/// `v ↦ M v`.
fn backward_step(g: &Generator, lambda: f64, v: &[f64]) -> Vec<f64> {
    (0..g.len())
        .map(|i| {
            let mut acc = v[i] * (1.0 - g.exit_rate(i) as f64 / lambda);
            for &(j, c) in g.row(i) {
                acc += c as f64 / lambda * v[j as usize];
            }
            acc
        })
        .collect()
}

/// `μ ↦ μ M`.
fn forward_step(g: &Generator, lambda: f64, mu: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = (0..g.len())
        .map(|j| mu[j] * (1.0 - g.exit_rate(j) as f64 / lambda))
        .collect();
    for (i, &m) in mu.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        for &(j, c) in g.row(i) {
            out[j as usize] += m * c as f64 / lambda;
        }
    }
    out
}

/// Stored iterates `Mⁿ f` (backward) or `μ Mⁿ` (forward), extended on demand,
/// so that `P(t)` can be evaluated for many `t`.
#[derive(Debug, Clone)]
pub struct Series<'g> {
    generator: &'g Generator,
    lambda: f64,
    forward: bool,
    iterates: Vec<Vec<f64>>,
    scale: f64,
}

impl<'g> Series<'g> {
    /// Iterates of `Mⁿ f`, for `P(t) f`.
    pub fn backward(generator: &'g Generator, f: Vec<f64>) -> Self {
        assert_eq!(f.len(), generator.len());
        let scale = f.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        Series {
            generator,
            lambda: lambda_of(generator),
            forward: false,
            iterates: vec![f],
            scale,
        }
    }

    /// Iterates of `δ_seed Mⁿ`, for the law at time `t` from `seed`.
    pub fn forward(generator: &'g Generator, seed: usize) -> Self {
        let mut mu = vec![0.0; generator.len()];
        mu[seed] = 1.0;
        Series {
            generator,
            lambda: lambda_of(generator),
            forward: true,
            iterates: vec![mu],
            scale: 1.0,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn ensure(&mut self, n: usize) {
        while self.iterates.len() <= n {
            let last = self.iterates.last().expect("non-empty");
            let next = if self.forward {
                forward_step(self.generator, self.lambda, last)
            } else {
                backward_step(self.generator, self.lambda, last)
            };
            self.iterates.push(next);
        }
    }

    /// `P(t) f` (backward) or the law at `t` (forward), with an error bound
    /// valid for every coordinate (backward) or in total variation (forward).
    pub fn eval(&mut self, t: f64, tol: f64) -> (Vec<f64>, f64) {
        assert!(t >= 0.0, "time must be non-negative");
        let pw = poisson_weights(self.lambda * t, tol);
        self.ensure(pw.weights.len() - 1);
        let mut out = vec![0.0; self.generator.len()];
        for (w, v) in pw.weights.iter().zip(&self.iterates) {
            if *w == 0.0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o += w * x;
            }
        }
        (out, pw.tail * self.scale)
    }

    /// One coordinate of [`Series::eval`], without materialising the vector.
    pub fn eval_at(&mut self, i: usize, t: f64, tol: f64) -> Certified {
        let pw = poisson_weights(self.lambda * t, tol);
        self.ensure(pw.weights.len() - 1);
        let value = pw.weights.iter().zip(&self.iterates).map(|(w, v)| w * v[i]).sum();
        Certified {
            value,
            error: pw.tail * self.scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for &m in &[0.0, 0.3, 1.0, 7.5, 60.0, 900.0] {
            let pw = poisson_weights(m, 1e-13);
            let s: f64 = pw.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-11, "mean {m}: {s}");
            assert!(pw.tail < 1e-13);
        }
    }

    #[test]
    fn tail_bound_is_valid() {
        let m = 4.0;
        let pw = poisson_weights(m, 1e-6);
        let n = pw.weights.len();
        let true_tail: f64 = (n..n + 200)
            .map(|k| (-m + k as f64 * m.ln() - ln_gamma(k as f64 + 1.0)).exp())
            .sum();
        assert!(true_tail <= pw.tail);
    }
}
