//! SMO solver for the epsilon-SVR dual.
//!
//! The problem is posed over 2n box variables a = [alpha; alpha*] with
//! signs z = [+1; -1], minimizing 1/2 a'Qa + p'a subject to z'a = 0 and
//! 0 <= a <= C, where Q_st = z_s z_t K(x_s, x_t) and
//! p = [eps - y; eps + y]. Each iteration picks the maximal KKT violator
//! and a second-order best partner, with seeded random tie-breaking, and
//! solves the two-variable subproblem exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sq_dist, SvrParams};

const TAU: f64 = 1e-12;

pub(crate) struct Solution {
    pub beta: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
    pub iterations: usize,
}

struct Problem<'a> {
    n: usize,
    kernel: Vec<f64>, // n x n, row-major
    params: &'a SvrParams,
    a: Vec<f64>,    // 2n
    grad: Vec<f64>, // 2n
    #[cfg_attr(not(debug_assertions), allow(dead_code))]
    y: &'a [f64],
}

impl<'a> Problem<'a> {
    fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel[(i % self.n) * self.n + (j % self.n)]
    }

    #[inline]
    fn z(&self, t: usize) -> f64 {
        if t < self.n {
            1.0
        } else {
            -1.0
        }
    }

    fn in_up(&self, t: usize) -> bool {
        if t < self.n {
            self.a[t] < self.params.c
        } else {
            self.a[t] > 0.0
        }
    }

    fn in_low(&self, t: usize) -> bool {
        if t < self.n {
            self.a[t] > 0.0
        } else {
            self.a[t] < self.params.c
        }
    }

    /// -z_t * G_t, the quantity bounded by the bias at optimality.
    #[inline]
    fn neg_zg(&self, t: usize) -> f64 {
        -self.z(t) * self.grad[t]
    }

    /// Dual objective 1/2 a'Qa + p'a expressed through the maintained
    /// gradient: 1/2 * sum_t a_t (G_t + p_t).
    #[cfg(debug_assertions)]
    fn objective(&self) -> f64 {
        let mut obj = 0.0;
        for t in 0..2 * self.n {
            let p = if t < self.n {
                self.params.epsilon - self.y[t]
            } else {
                self.params.epsilon + self.y[t - self.n]
            };
            obj += self.a[t] * (self.grad[t] + p);
        }
        obj / 2.0
    }
}

pub(crate) fn solve(x: &[Vec<f64>], y: &[f64], params: &SvrParams, seed: u64) -> Solution {
    let n = x.len();
    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        kernel[i * n + i] = 1.0;
        for j in 0..i {
            let v = (-params.gamma * sq_dist(&x[i], &x[j])).exp();
            kernel[i * n + j] = v;
            kernel[j * n + i] = v;
        }
    }
    let grad: Vec<f64> = (0..2 * n)
        .map(|t| {
            if t < n {
                params.epsilon - y[t]
            } else {
                params.epsilon + y[t - n]
            }
        })
        .collect();
    let mut prob = Problem {
        n,
        kernel,
        params,
        a: vec![0.0; 2 * n],
        grad,
        y,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut iterations = 0;
    let mut converged = false;
    #[cfg(debug_assertions)]
    let mut prev_obj = f64::INFINITY;
    while iterations < params.max_passes {
        let Some((i, j, gap)) = select_pair(&prob, &mut rng) else {
            converged = true;
            break;
        };
        if gap <= params.tol {
            converged = true;
            break;
        }
        update_pair(&mut prob, i, j);
        iterations += 1;

        #[cfg(debug_assertions)]
        {
            let obj = prob.objective();
            debug_assert!(
                obj <= prev_obj + 1e-9 * (1.0 + prev_obj.abs()),
                "dual objective increased: {} -> {}",
                prev_obj,
                obj
            );
            prev_obj = obj;
        }
    }
    if !converged {
        // the budget may run out exactly at the optimum
        converged = stop_gap(&prob).map_or(true, |g| g <= params.tol);
    }

    let bias = compute_bias(&prob);
    let beta: Vec<f64> = (0..n).map(|t| prob.a[t] - prob.a[t + n]).collect();
    Solution {
        beta,
        bias,
        converged,
        iterations,
    }
}

fn stop_gap(prob: &Problem) -> Option<f64> {
    let mut m = f64::NEG_INFINITY;
    let mut big_m = f64::INFINITY;
    for t in 0..2 * prob.n {
        if prob.in_up(t) {
            m = m.max(prob.neg_zg(t));
        }
        if prob.in_low(t) {
            big_m = big_m.min(prob.neg_zg(t));
        }
    }
    if m.is_finite() && big_m.is_finite() {
        Some(m - big_m)
    } else {
        None
    }
}

/// Maximal violator i, second-order partner j. Returns None when a working
/// pair no longer exists (fully bounded in one direction).
fn select_pair(prob: &Problem, rng: &mut ChaCha8Rng) -> Option<(usize, usize, f64)> {
    let mut best_i: Vec<usize> = Vec::new();
    let mut m = f64::NEG_INFINITY;
    for t in 0..2 * prob.n {
        if !prob.in_up(t) {
            continue;
        }
        let v = prob.neg_zg(t);
        if v > m {
            m = v;
            best_i.clear();
            best_i.push(t);
        } else if v == m {
            best_i.push(t);
        }
    }
    if best_i.is_empty() {
        return None;
    }
    let i = pick(&best_i, rng);

    let mut best_j: Vec<usize> = Vec::new();
    let mut best_gain = f64::NEG_INFINITY;
    let mut big_m = f64::INFINITY;
    for t in 0..2 * prob.n {
        if !prob.in_low(t) {
            continue;
        }
        let v = prob.neg_zg(t);
        big_m = big_m.min(v);
        let b = m - v;
        if b <= 0.0 {
            continue;
        }
        // curvature along the pair direction; identical rows give 0
        let mut quad = 2.0 - 2.0 * prob.k(i, t);
        if quad <= 0.0 {
            quad = TAU;
        }
        let gain = b * b / quad;
        if gain > best_gain {
            best_gain = gain;
            best_j.clear();
            best_j.push(t);
        } else if gain == best_gain {
            best_j.push(t);
        }
    }
    if best_j.is_empty() || !big_m.is_finite() {
        return None;
    }
    let j = pick(&best_j, rng);
    Some((i, j, m - big_m))
}

fn pick(candidates: &[usize], rng: &mut ChaCha8Rng) -> usize {
    if candidates.len() == 1 {
        candidates[0]
    } else {
        candidates[rng.random_range(0..candidates.len())]
    }
}

fn update_pair(prob: &mut Problem, i: usize, j: usize) {
    let c = prob.params.c;
    let zi = prob.z(i);
    let zj = prob.z(j);
    let mut quad = 2.0 - 2.0 * prob.k(i, j);
    if quad <= 0.0 {
        quad = TAU;
    }
    let old_ai = prob.a[i];
    let old_aj = prob.a[j];

    if zi != zj {
        let delta = (-prob.grad[i] - prob.grad[j]) / quad;
        let diff = prob.a[i] - prob.a[j];
        prob.a[i] += delta;
        prob.a[j] += delta;
        if diff > 0.0 && prob.a[j] < 0.0 {
            prob.a[j] = 0.0;
            prob.a[i] = diff;
        } else if diff <= 0.0 && prob.a[i] < 0.0 {
            prob.a[i] = 0.0;
            prob.a[j] = -diff;
        }
        if diff > 0.0 && prob.a[i] > c {
            prob.a[i] = c;
            prob.a[j] = c - diff;
        } else if diff <= 0.0 && prob.a[j] > c {
            prob.a[j] = c;
            prob.a[i] = c + diff;
        }
    } else {
        let delta = (prob.grad[i] - prob.grad[j]) / quad;
        let sum = prob.a[i] + prob.a[j];
        prob.a[i] -= delta;
        prob.a[j] += delta;
        if sum > c && prob.a[i] > c {
            prob.a[i] = c;
            prob.a[j] = sum - c;
        } else if sum <= c && prob.a[j] < 0.0 {
            prob.a[j] = 0.0;
            prob.a[i] = sum;
        }
        if sum > c && prob.a[j] > c {
            prob.a[j] = c;
            prob.a[i] = sum - c;
        } else if sum <= c && prob.a[i] < 0.0 {
            prob.a[i] = 0.0;
            prob.a[j] = sum;
        }
    }

    let dai = prob.a[i] - old_ai;
    let daj = prob.a[j] - old_aj;
    if dai == 0.0 && daj == 0.0 {
        return;
    }
    for t in 0..2 * prob.n {
        let zt = prob.z(t);
        prob.grad[t] += zt * (zi * prob.k(t, i) * dai + zj * prob.k(t, j) * daj);
    }
}

/// Average -z_t G_t over free variables; midpoint of the violation interval
/// when everything sits on a bound.
fn compute_bias(prob: &Problem) -> f64 {
    let mut acc = 0.0;
    let mut count = 0usize;
    for t in 0..2 * prob.n {
        if prob.a[t] > 0.0 && prob.a[t] < prob.params.c {
            acc += prob.neg_zg(t);
            count += 1;
        }
    }
    if count > 0 {
        return acc / count as f64;
    }
    let mut up = f64::NEG_INFINITY;
    let mut low = f64::INFINITY;
    for t in 0..2 * prob.n {
        if prob.in_up(t) {
            up = up.max(prob.neg_zg(t));
        }
        if prob.in_low(t) {
            low = low.min(prob.neg_zg(t));
        }
    }
    match (up.is_finite(), low.is_finite()) {
        (true, true) => (up + low) / 2.0,
        (true, false) => up,
        (false, true) => low,
        (false, false) => 0.0,
    }
}
