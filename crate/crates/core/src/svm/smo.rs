//! C-SVC dual solver using sequential minimal optimization with
//! second-order working-set selection.
//!
//! Minimizes `0.5 a'Qa - e'a` subject to `y'a = 0` and `0 <= a_i <= C`,
//! where `Q_ij = y_i y_j K(x_i, x_j)`. Stops when the maximal KKT violation
//! `m(a) - M(a)` drops below `epsilon`, or at the iteration cap.

use super::kernel::KernelCache;

const TAU: f64 = 1e-12;

pub(crate) struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Decision function offset `rho`; `f(x) = sum a_i y_i K(x_i, x) - rho`.
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn in_up(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha < c) || (y < 0.0 && alpha > 0.0)
}

fn in_low(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha > 0.0) || (y < 0.0 && alpha < c)
}

pub(crate) fn solve(
    cache: &mut KernelCache<'_>,
    y: &[f64],
    c: f64,
    epsilon: f64,
    max_iterations: usize,
) -> SmoSolution {
    let n = y.len();
    let mut alpha = vec![0.0; n];
    // Gradient of the dual objective, Q a - e.
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;
    let mut converged = false;

    loop {
        // i: maximal -y_t G_t over I_up.
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t], c) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            if in_low(alpha[t], y[t], c) {
                gmin = gmin.min(-y[t] * grad[t]);
            }
        }
        if gmax - gmin < epsilon {
            converged = true;
            break;
        }
        if iterations >= max_iterations {
            break;
        }
        let Some(i) = i_sel else {
            converged = true;
            break;
        };

        // j: second-order selection over I_low with -y_t G_t < gmax.
        let k_ii = cache.diag(i);
        let row_i = cache.row(i).to_vec();
        let mut best = f64::INFINITY;
        let mut j_sel = None;
        for t in 0..n {
            if !in_low(alpha[t], y[t], c) {
                continue;
            }
            let b = gmax + y[t] * grad[t];
            if b > 0.0 {
                let mut a = k_ii + cache.diag(t) - 2.0 * row_i[t];
                if a <= 0.0 {
                    a = TAU;
                }
                let score = -(b * b) / a;
                if score < best {
                    best = score;
                    j_sel = Some(t);
                }
            }
        }
        let Some(j) = j_sel else {
            converged = true;
            break;
        };
        iterations += 1;

        let row_j = cache.row(j).to_vec();
        let (yi, yj) = (y[i], y[j]);
        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let mut quad = k_ii + cache.diag(j) - 2.0 * row_i[j];
        if quad <= 0.0 {
            quad = TAU;
        }

        if yi != yj {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let d_ai = alpha[i] - old_ai;
        let d_aj = alpha[j] - old_aj;
        for t in 0..n {
            grad[t] += y[t] * (yi * row_i[t] * d_ai + yj * row_j[t] * d_aj);
        }
    }

    SmoSolution {
        rho: compute_rho(&alpha, y, &grad, c),
        alpha,
        iterations,
        converged,
    }
}

fn compute_rho(alpha: &[f64], y: &[f64], grad: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else if lb.is_finite() {
        lb
    } else {
        0.0
    }
}
