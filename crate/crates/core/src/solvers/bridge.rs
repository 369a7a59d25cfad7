//! Bridge regression by a smoothed gradient flow with fixed increments.
//!
//! The penalty `lambda |b|^gamma` is replaced by a smoothed version whose
//! derivative is `lambda gamma sgn(b) / (|b|^(1-gamma) + eta)`. Each iteration
//! moves along the rescaled descent direction `g = g1 - g2` of the halved
//! objective, where `g1 = X'(y - X b)` and `g2` is the smoothed penalty
//! gradient. Coordinates that fall within `tol` of zero, or whose step would
//! cross zero, are set to zero and frozen there.
//!
//! Frozen coordinates are revived only by the support check: after each flow
//! phase every coordinate is compared with its exact univariate minimiser and
//! the single support change with the largest objective decrease is applied
//! before the flow runs again. When no single change helps, a zero coordinate
//! may still enter jointly with the active ones: it moves to the minimiser of
//! the objective profiled over the least-squares response of the active
//! coefficients, which escapes minima where two correlated coordinates must
//! both be nonzero.

use crate::data::{CoefficientPartition, Dataset, PenaltySpec};
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::scalar::{dot, sgn, Scalar};
use crate::screening::{univariate_bridge_argmin, univariate_bridge_objective};

use super::{bridge_penalty, Design, FitResult, Method, SolverConfig};

/// Full gradient refresh period, in iterations.
const REFRESH: usize = 1000;
const STEP_GROWTH: f64 = 1.5;
/// Largest active set for which the profiled entry move is attempted.
const PROFILE_MAX_ACTIVE: usize = 200;

/// `g2_j = lambda gamma sgn(b_j) / (2 (|b_j|^(1-gamma) + eta))`, the gradient of
/// the smoothed penalty at the same halved scale as `X'(y - X b)`.
pub fn smoothed_penalty_gradient<T: Scalar>(beta: &[T], lambda: T, gamma: T, eta: T) -> Vec<T> {
    let c = lambda * gamma / T::lit(2.0);
    beta.iter()
        .map(|&b| sgn(b) * c / (b.abs().powf(T::one() - gamma) + eta))
        .collect()
}

/// Minimises `sum_i (y_i - x_i' b)^2 + lambda sum_j |b_j|^gamma` for
/// `0 < gamma < 1`, starting from `b = 0`.
///
/// Hitting `config.max_iter` is not an error: the best iterate found is
/// returned with `converged = false`.
pub fn bridge_fit<T: Scalar>(
    data: &Dataset<T>,
    penalty: &PenaltySpec<T>,
    config: &SolverConfig<T>,
) -> Result<FitResult<T>> {
    config.validate()?;
    penalty.validate()?;
    let gamma = penalty.gamma;
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(Error::InvalidGamma(gamma.to_f64_lossy()));
    }
    let mut flow = Flow::new(data, penalty.lambda, gamma, config);
    let p = data.p();
    let max_rounds = 10 * p + 50;

    let mut best_beta = vec![T::zero(); p];
    let mut best_obj = flow.design.yty;
    let mut converged = false;
    let mut profiled_from = None;
    for _ in 0..max_rounds {
        let flow_done = flow.run();
        flow.snap();
        let obj = flow.objective();
        if obj < best_obj {
            best_obj = obj;
            best_beta.clone_from(&flow.beta);
        }
        if !flow_done {
            break;
        }
        if let Some(before) = profiled_from.take() {
            // The previous joint entry did not survive the flow.
            if !(obj < before) {
                converged = true;
                break;
            }
        }
        if let Some((j, u)) = flow.support_move(best_obj) {
            flow.set(j, u);
        } else if let Some(moves) = flow.profiled_move(best_obj) {
            profiled_from = Some(obj);
            for (j, v) in moves {
                flow.set(j, v);
            }
        } else {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        coefficients: CoefficientPartition::from_values(best_beta),
        iterations: flow.iterations,
        converged,
        objective: best_obj,
        method: Method::Bridge,
        warnings: Vec::new(),
    })
}

struct Flow<'a, T> {
    design: Design<'a, T>,
    beta: Vec<T>,
    /// `X'(y - X beta)`
    grad: Vec<T>,
    lambda: T,
    gamma: T,
    /// `lambda gamma / 2`
    half_lg: T,
    tol: T,
    step: T,
    eta: T,
    /// Coordinates the penalty has driven to zero; only the exact support
    /// check may move them again.
    frozen: Vec<bool>,
    iterations: usize,
    max_iter: usize,
}

impl<'a, T: Scalar> Flow<'a, T> {
    fn new(data: &'a Dataset<T>, lambda: T, gamma: T, config: &SolverConfig<T>) -> Self {
        let design = Design::new(data);
        let grad = design.xty.clone();
        Self {
            beta: vec![T::zero(); design.p()],
            frozen: vec![false; design.p()],
            grad,
            design,
            lambda,
            gamma,
            half_lg: lambda * gamma / T::lit(2.0),
            tol: config.tol,
            step: config.step,
            eta: config.eta_floor,
            iterations: 0,
            max_iter: config.max_iter,
        }
    }

    /// Descent direction `g1 - g2` with the smoothing chosen per coordinate.
    fn direction(&self, out: &mut [T]) {
        let one = T::one();
        for (j, o) in out.iter_mut().enumerate() {
            let b = self.beta[j];
            let g1 = self.grad[j];
            *o = if b == T::zero() {
                if self.frozen[j] {
                    T::zero()
                } else {
                    g1
                }
            } else {
                let ab = b.abs();
                let pw = ab.powf(one - self.gamma);
                let mut eta = self.eta;
                if ab <= self.tol && g1 != T::zero() {
                    // Largest smoothing not above eta for which the penalty
                    // term dominates the data term.
                    eta = (self.half_lg / g1.abs() - pw).max(T::zero()).min(eta);
                }
                g1 - b.signum() * self.half_lg / (pw + eta)
            };
        }
    }

    /// Runs the flow until the largest coordinate change is at most `tol`.
    /// Returns `false` if the iteration budget ran out first.
    fn run(&mut self) -> bool {
        let p = self.beta.len();
        let mut g = vec![T::zero(); p];
        let mut d = vec![T::zero(); p];
        let mut s = self.step;
        self.direction(&mut g);
        loop {
            let m = g.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            if m == T::zero() {
                return true;
            }
            if self.iterations >= self.max_iter {
                return false;
            }
            self.iterations += 1;
            let mut max_change = T::zero();
            let mut clamped = false;
            for j in 0..p {
                d[j] = g[j] / m;
                if d[j] == T::zero() {
                    continue;
                }
                let old = self.beta[j];
                let mut new = old + s * d[j];
                if self.lambda > T::zero() && old != T::zero() && new * old <= T::zero() {
                    new = T::zero();
                    clamped = true;
                    self.frozen[j] = true;
                }
                let change = new - old;
                if change != T::zero() {
                    self.beta[j] = new;
                    self.design.update_gradient(&mut self.grad, j, change);
                    max_change = max_change.max(change.abs());
                }
            }
            if self.iterations % REFRESH == 0 {
                self.grad = self.design.gradient(&self.beta);
            }
            if !clamped && max_change <= self.tol {
                return true;
            }
            self.direction(&mut g);
            let along: T = d.iter().zip(&g).map(|(&a, &b)| a * b).sum();
            s = if along < T::zero() {
                s / T::lit(2.0)
            } else {
                (s * T::lit(STEP_GROWTH)).min(self.step)
            };
        }
    }

    fn snap(&mut self) {
        for j in 0..self.beta.len() {
            let b = self.beta[j];
            if b != T::zero() && b.abs() <= self.tol {
                self.beta[j] = T::zero();
                self.frozen[j] = self.lambda > T::zero();
                self.design.update_gradient(&mut self.grad, j, -b);
            }
        }
        self.grad = self.design.gradient(&self.beta);
    }

    fn set(&mut self, j: usize, value: T) {
        let change = value - self.beta[j];
        self.beta[j] = value;
        self.frozen[j] = value == T::zero();
        self.design.update_gradient(&mut self.grad, j, change);
    }

    fn objective(&self) -> T {
        self.design.rss_from_gradient(&self.beta, &self.grad)
            + self.lambda * bridge_penalty(&self.beta, self.gamma)
    }

    /// The zero/nonzero or sign change of one coordinate that lowers the exact
    /// objective the most, if any lowers it by more than rounding noise.
    fn support_move(&self, scale: T) -> Option<(usize, T)> {
        let noise = (T::epsilon() * T::lit(100.0)).max(T::lit(1e-9)) * (T::one() + scale.abs());
        let mut best: Option<(usize, T, T)> = None;
        for (j, &b) in self.beta.iter().enumerate() {
            let a_jj = self.design.diag[j];
            if a_jj <= T::zero() {
                continue;
            }
            let a = (self.grad[j] + a_jj * b) / a_jj;
            let l = self.lambda / a_jj;
            let u = univariate_bridge_argmin(a, l, self.gamma);
            let changes_support = (b == T::zero()) != (u == T::zero()) || b * u < T::zero();
            if !changes_support || (b == T::zero() && u.abs() <= self.tol) {
                continue;
            }
            let gain = a_jj
                * (univariate_bridge_objective(b, a, l, self.gamma)
                    - univariate_bridge_objective(u, a, l, self.gamma));
            if gain > noise && best.map_or(true, |(_, _, g)| gain > g) {
                best = Some((j, u, gain));
            }
        }
        best.map(|(j, u, _)| (j, u))
    }

    /// Best joint entry of one zero coordinate `j`: with `w = G_AA^-1 G_Aj`
    /// over the active set `A`, moving `b_j = u, b_A -= w u` changes the
    /// residual by `-u (x_j - X_A w)`, so the data term is an exact quadratic
    /// in `u` and its bridge minimiser has closed form.
    fn profiled_move(&mut self, scale: T) -> Option<Vec<(usize, T)>> {
        let active: Vec<usize> = (0..self.beta.len())
            .filter(|&j| self.beta[j] != T::zero())
            .collect();
        let k = active.len();
        if k == 0 || k > PROFILE_MAX_ACTIVE || self.lambda == T::zero() {
            return None;
        }
        let mut g_aa = Matrix::zeros(k, k);
        for (c, &a) in active.iter().enumerate() {
            let col = self.design.gram_col(a);
            for (r, &b) in active.iter().enumerate() {
                g_aa[(r, c)] = col[b];
            }
        }
        let chol = Cholesky::new(&g_aa).ok()?;
        let g_a: Vec<T> = active.iter().map(|&a| self.grad[a]).collect();
        let v = chol.solve(&g_a);
        let noise = (T::epsilon() * T::lit(100.0)).max(T::lit(1e-9)) * (T::one() + scale.abs());
        let cols: Vec<&[T]> = active
            .iter()
            .map(|&a| self.design.gram_col_cached(a))
            .collect();
        let mut best: Option<(usize, T, Vec<T>, T)> = None;
        for j in 0..self.beta.len() {
            if self.beta[j] != T::zero() {
                continue;
            }
            let g_aj: Vec<T> = cols.iter().map(|c| c[j]).collect();
            let w = chol.solve(&g_aj);
            let s = self.design.diag[j] - dot(&g_aj, &w);
            if !(s > self.design.diag[j] * T::lit(1e-8)) {
                continue;
            }
            let a = (self.grad[j] - dot(&g_aj, &v)) / s;
            let u = univariate_bridge_argmin(a, self.lambda / s, self.gamma);
            if u.abs() <= self.tol {
                continue;
            }
            let mut pen = u.abs().powf(self.gamma);
            let moved: Vec<T> = active
                .iter()
                .zip(&w)
                .map(|(&i, &wi)| {
                    let b = self.beta[i];
                    let nb = b - wi * u;
                    pen += nb.abs().powf(self.gamma) - b.abs().powf(self.gamma);
                    nb
                })
                .collect();
            let gain = T::lit(2.0) * u * a * s - u * u * s - self.lambda * pen;
            if gain > noise && best.as_ref().map_or(true, |b| gain > b.3) {
                best = Some((j, u, moved, gain));
            }
        }
        best.map(|(j, u, moved, _)| {
            let mut out: Vec<(usize, T)> = active.into_iter().zip(moved).collect();
            out.push((j, u));
            out
        })
    }
}
