//! Radial basis function network mapping (UCP, productivity) to effort.
//!
//! Inputs are z-scored with statistics captured at training time. Hidden
//! units are Gaussians `exp(-|x - c|^2 / (2 s^2))` centred on training
//! inputs, followed by a linear output layer with bias. Units are chosen by
//! greedy forward selection: at each step the candidate whose addition gives
//! the lowest leave-one-out mean squared error is added, with the output
//! layer refit by ridge least squares.
//!
//! The refit after each addition is carried out implicitly by Gram-Schmidt
//! orthogonalization of the ridge-augmented design matrix `[X; sqrt(l) D]`,
//! which keeps every candidate evaluation at O(n) while producing the same
//! residuals and hat-matrix diagonal as a full solve. Final output weights are
//! obtained from a direct SVD solve of the same augmented system.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Stop as soon as the best candidate does not lower the LOO error.
    LooNoImprovement,
    /// Add exactly `max_neurons` units (fewer only if candidates run out).
    FixedCount,
}

/// How UCP enters the network before z-scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UcpScale {
    Linear,
    /// Natural log; keeps a few very large projects from squashing the rest.
    Log,
}

impl UcpScale {
    fn apply(self, ucp: f64) -> f64 {
        match self {
            UcpScale::Linear => ucp,
            UcpScale::Log => ucp.ln(),
        }
    }
}

/// Scale of the network's output layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffortScale {
    /// The linear output is the effort.
    Linear,
    /// The linear output is `ln(effort)`; errors become relative.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbfTrainConfig {
    pub max_neurons: usize,
    pub ucp_scale: UcpScale,
    pub effort_scale: EffortScale,
    /// Add unpenalized linear terms in the two normalized inputs to the
    /// output layer, so the network can follow trends past its centres.
    pub linear_terms: bool,
    pub ridge: f64,
    pub stop_rule: StopRule,
    pub spread: f64,
    /// Predictions are clamped from below at this effort.
    pub effort_floor: f64,
}

impl Default for RbfTrainConfig {
    fn default() -> Self {
        Self {
            max_neurons: 8,
            ucp_scale: UcpScale::Linear,
            effort_scale: EffortScale::Linear,
            linear_terms: false,
            ridge: 1e-8,
            stop_rule: StopRule::LooNoImprovement,
            spread: 1.0,
            effort_floor: 1.0,
        }
    }
}

impl RbfTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_neurons == 0 {
            return Err(Error::Config("rbf.max_neurons must be at least 1".into()));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::Config("rbf.ridge must be nonnegative".into()));
        }
        if !(self.spread > 0.0 && self.spread.is_finite()) {
            return Err(Error::Config("rbf.spread must be positive".into()));
        }
        if !self.effort_floor.is_finite() {
            return Err(Error::Config("rbf.effort_floor must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbfNeuron {
    pub center: [f64; 2],
    pub spread: f64,
}

impl RbfNeuron {
    pub fn activation(&self, input: [f64; 2]) -> f64 {
        let d0 = input[0] - self.center[0];
        let d1 = input[1] - self.center[1];
        (-(d0 * d0 + d1 * d1) / (2.0 * self.spread * self.spread)).exp()
    }
}

/// Per-feature z-score parameters, applied after the UCP scale. Constant
/// features get deviation 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub ucp_scale: UcpScale,
    pub means: [f64; 2],
    pub deviations: [f64; 2],
}

impl Normalizer {
    /// `inputs` are raw `(ucp, productivity)` pairs.
    pub fn fit(inputs: &[[f64; 2]], ucp_scale: UcpScale) -> Self {
        let inputs: Vec<[f64; 2]> = inputs.iter().map(|x| [ucp_scale.apply(x[0]), x[1]]).collect();
        let n = inputs.len().max(1) as f64;
        let mut means = [0.0; 2];
        let mut deviations = [1.0; 2];
        for k in 0..2 {
            let mean = inputs.iter().map(|x| x[k]).sum::<f64>() / n;
            let var = inputs.iter().map(|x| (x[k] - mean).powi(2)).sum::<f64>() / n;
            means[k] = mean;
            let sd = var.sqrt();
            if sd > 1e-12 * mean.abs().max(1.0) {
                deviations[k] = sd;
            }
        }
        Self {
            ucp_scale,
            means,
            deviations,
        }
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        [
            (self.ucp_scale.apply(x[0]) - self.means[0]) / self.deviations[0],
            (x[1] - self.means[1]) / self.deviations[1],
        ]
    }
}

/// One training example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfSample {
    pub ucp: f64,
    pub productivity: f64,
    pub effort: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfnnModel {
    pub neurons: Vec<RbfNeuron>,
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Coefficients of the normalized inputs when linear terms are enabled.
    pub linear_weights: Option<[f64; 2]>,
    pub normalizer: Normalizer,
    pub effort_scale: EffortScale,
    pub effort_floor: f64,
    /// Training row index of each selected centre, in selection order.
    pub selected_rows: Vec<usize>,
    /// LOO mean squared error after 0, 1, ... selected units.
    pub loo_history: Vec<f64>,
}

/// Raw network output and the floored estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfOutput {
    /// Output layer value, in log hours under [`EffortScale::Log`].
    pub raw: f64,
    pub effort: f64,
    pub clamped: bool,
}

impl RbfnnModel {
    fn check(&self) -> Result<()> {
        if self.weights.len() != self.neurons.len()
            || !self.bias.is_finite()
            || self.linear_weights.is_some_and(|w| w.iter().any(|v| !v.is_finite()))
            || self.normalizer.deviations.iter().any(|d| !(*d > 0.0))
        {
            return Err(Error::NotTrained);
        }
        Ok(())
    }

    pub fn output(&self, ucp: f64, productivity: f64) -> Result<RbfOutput> {
        self.check()?;
        if self.normalizer.ucp_scale == UcpScale::Log && !(ucp > 0.0) {
            return Err(Error::invalid(format!("ucp must be positive, got {ucp}")));
        }
        let x = self.normalizer.apply([ucp, productivity]);
        let linear = self.linear_weights.map_or(0.0, |w| w[0] * x[0] + w[1] * x[1]);
        let raw = self.bias
            + linear
            + self
                .neurons
                .iter()
                .zip(&self.weights)
                .map(|(n, w)| w * n.activation(x))
                .sum::<f64>();
        let effort = match self.effort_scale {
            EffortScale::Linear => raw,
            EffortScale::Log => raw.exp(),
        };
        let clamped = !(effort >= self.effort_floor);
        if clamped {
            log::debug!(
                "RBF output {raw} for ucp={ucp}, productivity={productivity} clamped to {}",
                self.effort_floor
            );
        }
        Ok(RbfOutput {
            raw,
            effort: if clamped { self.effort_floor } else { effort },
            clamped,
        })
    }

    pub fn predict(&self, ucp: f64, productivity: f64) -> Result<f64> {
        Ok(self.output(ucp, productivity)?.effort)
    }

    /// Final LOO criterion of the selected network.
    pub fn loo_mse(&self) -> f64 {
        self.loo_history.last().copied().unwrap_or(f64::NAN)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn loo_mse(residuals: &[f64], leverage: &[f64]) -> f64 {
    let n = residuals.len() as f64;
    residuals
        .iter()
        .zip(leverage)
        .map(|(r, h)| {
            let denom = (1.0 - h).max(1e-12);
            (r / denom).powi(2)
        })
        .sum::<f64>()
        / n
}

struct Candidate {
    row: usize,
    /// Augmented column orthogonalized against every selected basis vector,
    /// excluding its own (future) ridge entry.
    work: Vec<f64>,
    top_norm2: f64,
}

pub fn train(samples: &[RbfSample], config: &RbfTrainConfig) -> Result<RbfnnModel> {
    config.validate()?;
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFew {
            what: "training rows for the RBF network",
            needed: 2,
            got: n,
        });
    }
    for (i, s) in samples.iter().enumerate() {
        let ucp_ok = s.ucp.is_finite() && (config.ucp_scale == UcpScale::Linear || s.ucp > 0.0);
        if !(ucp_ok && s.productivity.is_finite() && s.effort > 0.0 && s.effort.is_finite()) {
            return Err(Error::invalid(format!("RBF training row {i} has invalid values")));
        }
    }

    let raw_inputs: Vec<[f64; 2]> = samples.iter().map(|s| [s.ucp, s.productivity]).collect();
    let normalizer = Normalizer::fit(&raw_inputs, config.ucp_scale);
    let inputs: Vec<[f64; 2]> = raw_inputs.iter().map(|&x| normalizer.apply(x)).collect();
    let targets: Vec<f64> = samples
        .iter()
        .map(|s| match config.effort_scale {
            EffortScale::Linear => s.effort,
            EffortScale::Log => s.effort.ln(),
        })
        .collect();
    let neuron_at = |row: usize| RbfNeuron {
        center: inputs[row],
        spread: config.spread,
    };

    let max_units = config.max_neurons.min(n);
    let len = n + max_units;
    let sqrt_ridge = config.ridge.sqrt();

    // Bias column: unpenalized, so it has no ridge entry.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut q0 = vec![0.0; len];
    q0[..n].fill(1.0 / (n as f64).sqrt());
    let proj = dot(&q0[..n], &targets);
    let mut residuals: Vec<f64> = targets.iter().zip(&q0[..n]).map(|(y, q)| y - proj * q).collect();
    let mut leverage: Vec<f64> = q0[..n].iter().map(|q| q * q).collect();
    basis.push(q0);
    if config.linear_terms {
        for k in 0..2 {
            let mut v = vec![0.0; len];
            for (slot, x) in v.iter_mut().zip(&inputs) {
                *slot = x[k];
            }
            let original = dot(&v, &v);
            for q in &basis {
                let coef = dot(q, &v);
                for (a, b) in v.iter_mut().zip(q) {
                    *a -= coef * b;
                }
            }
            let norm2 = dot(&v, &v);
            // A constant or collinear input adds nothing; the final solve
            // gives it a zero coefficient.
            if !(norm2 > 1e-20 * original) {
                continue;
            }
            let norm = norm2.sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            let proj = dot(&v[..n], &targets);
            for ((r, h), q) in residuals.iter_mut().zip(&mut leverage).zip(&v[..n]) {
                *r -= proj * q;
                *h += q * q;
            }
            basis.push(v);
        }
    }

    let mut candidates: Vec<Candidate> = (0..n)
        .map(|row| {
            let neuron = neuron_at(row);
            let mut work = vec![0.0; len];
            for (i, x) in inputs.iter().enumerate() {
                work[i] = neuron.activation(*x);
            }
            let top_norm2 = dot(&work[..n], &work[..n]);
            Candidate { row, work, top_norm2 }
        })
        .collect();
    for c in &mut candidates {
        for q in &basis {
            let coef = dot(q, &c.work);
            for (w, qv) in c.work.iter_mut().zip(q) {
                *w -= coef * qv;
            }
        }
    }

    let mut selected_rows = Vec::new();
    let mut history = vec![loo_mse(&residuals, &leverage)];

    while selected_rows.len() < max_units {
        let slot = n + selected_rows.len();
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for (ci, cand) in candidates.iter().enumerate() {
            let work_norm2 = dot(&cand.work, &cand.work);
            // Numerically dependent on the selected units.
            if dot(&cand.work[..n], &cand.work[..n]) <= 1e-20 * cand.top_norm2 {
                continue;
            }
            let norm2 = work_norm2 + config.ridge;
            if !(norm2 > 0.0) {
                continue;
            }
            let norm = norm2.sqrt();
            let mut q = cand.work.clone();
            q[slot] = sqrt_ridge;
            for v in &mut q {
                *v /= norm;
            }
            let proj = dot(&q[..n], &targets);
            let r: Vec<f64> = residuals.iter().zip(&q[..n]).map(|(r, qi)| r - proj * qi).collect();
            let h: Vec<f64> = leverage.iter().zip(&q[..n]).map(|(h, qi)| h + qi * qi).collect();
            let score = loo_mse(&r, &h);
            if best.as_ref().is_none_or(|(s, _, _)| score < *s) {
                best = Some((score, ci, q));
            }
        }
        let Some((score, ci, q)) = best else { break };
        let current = *history.last().expect("history starts with the bias-only model");
        if config.stop_rule == StopRule::LooNoImprovement
            && !(score < current - 1e-12 * current.abs())
        {
            break;
        }

        let cand = candidates.remove(ci);
        let proj = dot(&q[..n], &targets);
        for (r, qi) in residuals.iter_mut().zip(&q[..n]) {
            *r -= proj * qi;
        }
        for (h, qi) in leverage.iter_mut().zip(&q[..n]) {
            *h += qi * qi;
        }
        for c in &mut candidates {
            // The new unit's own ridge entry sits in a slot no remaining
            // candidate occupies yet, so this is a plain projection.
            let coef = dot(&q, &c.work);
            for (w, qv) in c.work.iter_mut().zip(&q) {
                *w -= coef * qv;
            }
        }
        basis.push(q);
        selected_rows.push(cand.row);
        history.push(score);
    }

    let neurons: Vec<RbfNeuron> = selected_rows.iter().map(|&r| neuron_at(r)).collect();
    let layer = solve_output_layer(&inputs, &targets, &neurons, config.ridge, config.linear_terms)?;

    Ok(RbfnnModel {
        neurons,
        weights: layer.weights,
        bias: layer.bias,
        linear_weights: layer.linear_weights,
        normalizer,
        effort_scale: config.effort_scale,
        effort_floor: config.effort_floor,
        selected_rows,
        loo_history: history,
    })
}

/// Design matrix `[1, x_1, x_2, phi_1(x), ..., phi_k(x)]` over normalized
/// inputs; the `x` columns only when `linear_terms` is set.
pub fn design_matrix(inputs: &[[f64; 2]], neurons: &[RbfNeuron], linear_terms: bool) -> DMatrix<f64> {
    let offset = if linear_terms { 3 } else { 1 };
    DMatrix::from_fn(inputs.len(), neurons.len() + offset, |i, j| match j {
        0 => 1.0,
        1 | 2 if linear_terms => inputs[i][j - 1],
        _ => neurons[j - offset].activation(inputs[i]),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputLayer {
    pub bias: f64,
    pub linear_weights: Option<[f64; 2]>,
    pub weights: Vec<f64>,
}

/// Ridge least squares with the bias and linear terms left unpenalized:
/// minimizes `|y - Xw|^2 + ridge * |w_neurons|^2`.
pub fn solve_output_layer(
    inputs: &[[f64; 2]],
    targets: &[f64],
    neurons: &[RbfNeuron],
    ridge: f64,
    linear_terms: bool,
) -> Result<OutputLayer> {
    let n = inputs.len();
    let k = neurons.len();
    let offset = if linear_terms { 3 } else { 1 };
    let x = design_matrix(inputs, neurons, linear_terms);
    let mut a = DMatrix::zeros(n + k, k + offset);
    a.view_mut((0, 0), (n, k + offset)).copy_from(&x);
    let sqrt_ridge = ridge.sqrt();
    for j in 0..k {
        a[(n + j, j + offset)] = sqrt_ridge;
    }
    let mut b = DVector::zeros(n + k);
    b.rows_mut(0, n).copy_from_slice(targets);
    let svd = a.svd(true, true);
    let w = svd
        .solve(&b, 1e-13 * svd.singular_values.max())
        .map_err(|e| Error::invalid(format!("output layer solve failed: {e}")))?;
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("output layer solve produced non-finite weights"));
    }
    Ok(OutputLayer {
        bias: w[0],
        linear_weights: linear_terms.then(|| [w[1], w[2]]),
        weights: w.iter().skip(offset).copied().collect(),
    })
}
