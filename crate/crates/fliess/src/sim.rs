//! Numerical Chen-Fliess evaluation and closed-loop simulation.
//!
//! Words evaluate to iterated integrals of the input signal by the
//! recursion F_{x0 w}[u] = int F_w[u] dt, F_{x1 w}[u] = int F_w[u] u dt with
//! trapezoidal quadrature on a uniform grid; series evaluate as
//! coefficient-weighted sums. The closed loop of a plant series under an
//! affine controller pair is solved by Picard iteration on
//! u = v F_{d1}[y] + F_{d2}[y], y = F_c[u], which serves as the independent
//! numerical oracle for the algebraic feedback product.
//!
//! Exact rationals are converted to floating point only in this module.

use std::collections::HashMap;
use std::rc::Rc;

use crate::pair::AffinePair;
use crate::series::TruncatedSeries;
use crate::words::{Letter, Word};

/// A uniform time grid on [0, t_max] with `steps` intervals
/// (`steps + 1` sample points).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    t_max: f64,
    steps: usize,
}

impl Grid {
    pub fn new(t_max: f64, steps: usize) -> Self {
        assert!(t_max > 0.0 && t_max.is_finite(), "t_max must be positive");
        assert!(steps >= 2, "grid needs at least 2 steps");
        Grid { t_max, steps }
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_size(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    /// Number of sample points, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step_size()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.time(k))
    }
}

/// A sampled real-valued signal on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    grid: Grid,
    values: Vec<f64>,
}

impl Signal {
    pub fn new(grid: Grid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "signal length must match grid");
        Signal { grid, values }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Signal {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.times().map(f).collect();
        Signal { grid, values }
    }

    /// amp * sin(2 pi freq t)
    pub fn sine(grid: Grid, amplitude: f64, freq_hz: f64) -> Self {
        Self::from_fn(grid, |t| {
            amplitude * (2.0 * std::f64::consts::PI * freq_hz * t).sin()
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn zip_with(&self, other: &Signal, f: impl Fn(f64, f64) -> f64) -> Signal {
        assert_eq!(self.grid, other.grid, "signals on different grids");
        Signal {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Signal) -> Signal {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &Signal) -> Signal {
        self.zip_with(other, |a, b| a * b)
    }
}

/// Sup-norm distance between two signals on the same grid.
pub fn sup_distance(a: &Signal, b: &Signal) -> f64 {
    assert_eq!(a.grid, b.grid, "signals on different grids");
    a.values
        .iter()
        .zip(&b.values)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Sup-norm deviation of `a` from `reference`, relative to the reference's
/// sup norm (a reference that is identically zero yields the absolute
/// deviation).
pub fn max_relative_deviation(a: &Signal, reference: &Signal) -> f64 {
    let scale = reference.sup_norm();
    let dist = sup_distance(a, reference);
    if scale == 0.0 {
        dist
    } else {
        dist / scale
    }
}

/// Cumulative trapezoidal integral of `integrand` from 0.
fn cumulative_trapezoid(integrand: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(integrand.len());
    let mut acc = 0.0;
    out.push(0.0);
    for pair in integrand.windows(2) {
        acc += 0.5 * h * (pair[0] + pair[1]);
        out.push(acc);
    }
    out
}

fn integrate_letter(inner: &[f64], letter: Letter, input: &Signal) -> Vec<f64> {
    match letter {
        Letter::X0 => cumulative_trapezoid(inner, input.grid.step_size()),
        Letter::X1 => {
            let weighted: Vec<f64> = inner
                .iter()
                .zip(&input.values)
                .map(|(f, u)| f * u)
                .collect();
            cumulative_trapezoid(&weighted, input.grid.step_size())
        }
    }
}

fn word_integral(
    word: Word,
    input: &Signal,
    cache: &mut HashMap<Word, Rc<Vec<f64>>>,
) -> Rc<Vec<f64>> {
    if let Some(hit) = cache.get(&word) {
        return Rc::clone(hit);
    }
    let values = match word.split_first() {
        None => Rc::new(vec![1.0; input.grid.len()]),
        Some((letter, rest)) => {
            let inner = word_integral(rest, input, cache);
            Rc::new(integrate_letter(&inner, letter, input))
        }
    };
    cache.insert(word, Rc::clone(&values));
    values
}

/// The iterated integral F_w[u] on the input's grid.
pub fn evaluate_word(word: &Word, input: &Signal) -> Signal {
    let mut cache = HashMap::new();
    Signal {
        grid: input.grid,
        values: word_integral(*word, input, &mut cache).to_vec(),
    }
}

/// The Chen-Fliess series response F_c[u] on the input's grid.
pub fn evaluate_series(series: &TruncatedSeries, input: &Signal) -> Signal {
    let mut cache = HashMap::new();
    let mut out = vec![0.0; input.grid.len()];
    for (word, coeff) in series.terms() {
        let weight = coeff.to_f64();
        let integral = word_integral(*word, input, &mut cache);
        for (o, v) in out.iter_mut().zip(integral.iter()) {
            *o += weight * v;
        }
    }
    Signal {
        grid: input.grid,
        values: out,
    }
}

/// The affine operator response F_d[u] = u F_{d1}[u] + F_{d2}[u].
pub fn evaluate_affine(pair: &AffinePair, input: &Signal) -> Signal {
    let mult = evaluate_series(pair.first(), input);
    let add = evaluate_series(pair.second(), input);
    input.mul(&mult).add(&add)
}

/// Numerical tolerances and safety bounds for closed-loop simulation.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    /// Truncation degree used for the algebraic side of oracle comparisons.
    pub degree: usize,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub amplitude_cap: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            degree: 8,
            picard_tol: 1e-10,
            picard_max_iter: 100,
            amplitude_cap: 1e6,
        }
    }
}

/// The Picard loop left the configured convergence region.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("picard iterate exceeded the amplitude cap at iteration {iteration} (sup {sup:.3e}); shrink t_max or the signal amplitudes")]
    Diverged { iteration: usize, sup: f64 },
    #[error("picard iteration did not converge within {max_iter} iterations (last update {residual:.3e})")]
    NoConvergence { max_iter: usize, residual: f64 },
}

/// Simulate the affine feedback interconnection: solve
/// y = F_c[u], u = v F_{d1}[y] + F_{d2}[y] by Picard iteration
/// u_{k+1} = v F_{d1}[y_k] + F_{d2}[y_k] starting from u_0 = v.
/// Returns the converged loop input and output (u, y).
pub fn simulate_closed_loop(
    plant: &TruncatedSeries,
    controller: &AffinePair,
    reference: &Signal,
    config: &SimConfig,
) -> Result<(Signal, Signal), SimError> {
    let mut u = reference.clone();
    let mut residual = f64::INFINITY;
    for iteration in 0..config.picard_max_iter {
        let y = evaluate_series(plant, &u);
        if y.sup_norm() > config.amplitude_cap || !y.sup_norm().is_finite() {
            return Err(SimError::Diverged {
                iteration,
                sup: y.sup_norm(),
            });
        }
        let gain = evaluate_series(controller.first(), &y);
        let offset = evaluate_series(controller.second(), &y);
        let u_next = reference.mul(&gain).add(&offset);
        if u_next.sup_norm() > config.amplitude_cap || !u_next.sup_norm().is_finite() {
            return Err(SimError::Diverged {
                iteration,
                sup: u_next.sup_norm(),
            });
        }
        residual = sup_distance(&u_next, &u);
        u = u_next;
        if residual < config.picard_tol {
            let y = evaluate_series(plant, &u);
            return Ok((u, y));
        }
    }
    Err(SimError::NoConvergence {
        max_iter: config.picard_max_iter,
        residual,
    })
}

/// Side-by-side signals and deviations for the operator homomorphism checks:
/// the shuffle product against pointwise multiplication, the composition
/// product against operator cascading, and the mixed composition against
/// cascading through the additive embedding (1, d).
#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub shuffle_lhs: Signal,
    pub shuffle_rhs: Signal,
    pub compose_lhs: Signal,
    pub compose_rhs: Signal,
    pub mixed_lhs: Signal,
    pub mixed_rhs: Signal,
    pub shuffle_dev: f64,
    pub compose_dev: f64,
    pub mixed_dev: f64,
}

impl CrosscheckReport {
    pub fn max_deviation(&self) -> f64 {
        self.shuffle_dev.max(self.compose_dev).max(self.mixed_dev)
    }
}

/// Numerically verify the homomorphism laws F_{c sh d} = F_c F_d,
/// F_{c o d} = F_c o F_d, and F_{c |> (1,d)} = F_c o F_{(1,d)} on a grid.
pub fn crosscheck_homomorphisms(
    c: &TruncatedSeries,
    d: &TruncatedSeries,
    input: &Signal,
) -> CrosscheckReport {
    let shuffle_lhs = evaluate_series(&c.shuffle(d), input);
    let shuffle_rhs = evaluate_series(c, input).mul(&evaluate_series(d, input));

    let compose_lhs = evaluate_series(&c.compose(d), input);
    let compose_rhs = evaluate_series(c, &evaluate_series(d, input));

    let additive = AffinePair::additive(d.clone());
    let mixed_lhs = evaluate_series(&c.mixed_compose(&additive), input);
    let mixed_rhs = evaluate_series(c, &evaluate_affine(&additive, input));

    CrosscheckReport {
        shuffle_dev: max_relative_deviation(&shuffle_lhs, &shuffle_rhs),
        compose_dev: max_relative_deviation(&compose_lhs, &compose_rhs),
        mixed_dev: max_relative_deviation(&mixed_lhs, &mixed_rhs),
        shuffle_lhs,
        shuffle_rhs,
        compose_lhs,
        compose_rhs,
        mixed_lhs,
        mixed_rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn grid() -> Grid {
        Grid::new(1.0, 2000)
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn series(degree: usize, terms: &[(i64, &str)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            terms
                .iter()
                .map(|(n, word)| (Rational::from_integer(*n), w(word))),
            degree,
        )
    }

    #[test]
    fn empty_word_is_constant_one() {
        let u = Signal::sine(grid(), 0.5, 1.0);
        let f = evaluate_word(&Word::empty(), &u);
        assert!(f.values().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn drift_words_integrate_time() {
        // trapezoid is exact on affine integrands: x0 -> t, x0x0 -> t^2/2
        let u = Signal::sine(grid(), 0.5, 1.0);
        let f1 = evaluate_word(&w("x0"), &u);
        let f2 = evaluate_word(&w("x0x0"), &u);
        for (k, t) in grid().times().enumerate() {
            assert!((f1.values()[k] - t).abs() < 1e-12);
            assert!((f2.values()[k] - t * t / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn input_word_integrates_unit_input_to_time() {
        let u = Signal::constant(grid(), 1.0);
        let f = evaluate_word(&w("x1"), &u);
        for (k, t) in grid().times().enumerate() {
            assert!((f.values()[k] - t).abs() < 1e-12);
        }
    }

    #[test]
    fn drift_series_evaluation() {
        // 1 + x0 evaluates to 1 + t for any input
        let c = series(3, &[(1, "1"), (1, "x0")]);
        let u = Signal::sine(grid(), 0.3, 2.0);
        let y = evaluate_series(&c, &u);
        for (k, t) in grid().times().enumerate() {
            assert!((y.values()[k] - (1.0 + t)).abs() < 1e-12);
        }
        assert_eq!(
            evaluate_series(&TruncatedSeries::zero(3), &u).sup_norm(),
            0.0
        );
    }

    #[test]
    fn word_length_damping_bound() {
        let u = Signal::sine(grid(), 0.8, 1.0);
        let bound_base = u.sup_norm().max(1.0);
        for word in ["x0x1", "x1x1x0", "x0x0x1x1"] {
            let word: Word = word.parse().unwrap();
            let f = evaluate_word(&word, &u);
            let mut factorial = 1.0;
            for k in 1..=word.len() {
                factorial *= k as f64;
            }
            let bound = bound_base.powi(word.len() as i32) / factorial + 1e-9;
            assert!(f.sup_norm() <= bound, "{word}: {} > {bound}", f.sup_norm());
        }
    }

    #[test]
    fn affine_evaluation() {
        let u = Signal::sine(grid(), 0.4, 1.0);
        let e = AffinePair::identity(3);
        assert_eq!(evaluate_affine(&e, &u), u);

        let c = series(3, &[(1, "x0")]);
        let shifted = evaluate_affine(&AffinePair::additive(c.clone()), &u);
        let expected = u.add(&evaluate_series(&c, &u));
        assert_eq!(shifted, expected);

        let zero_in = Signal::constant(grid(), 0.0);
        let mult_only =
            AffinePair::multiplicative(series(3, &[(1, "1"), (2, "x1")])).unwrap();
        assert_eq!(evaluate_affine(&mult_only, &zero_in).sup_norm(), 0.0);
    }

    #[test]
    fn no_feedback_converges_in_one_iteration() {
        let c = series(4, &[(1, "x1")]);
        let v = Signal::constant(grid(), 0.3);
        let (u, y) =
            simulate_closed_loop(&c, &AffinePair::identity(4), &v, &SimConfig::default())
                .unwrap();
        assert_eq!(u, v);
        assert_eq!(y, evaluate_series(&c, &v));
    }

    #[test]
    fn drift_plant_ignores_feedback() {
        let c = series(4, &[(1, "x0"), (2, "x0x0")]);
        let v = Signal::constant(grid(), 0.2);
        let cfg = SimConfig::default();
        let (_, y_open) =
            simulate_closed_loop(&c, &AffinePair::identity(4), &v, &cfg).unwrap();
        let d = AffinePair::new(
            series(4, &[(1, "1"), (1, "x1")]),
            series(4, &[(1, "x1")]),
        )
        .unwrap();
        let (_, y_closed) = simulate_closed_loop(&c, &d, &v, &cfg).unwrap();
        assert!(sup_distance(&y_open, &y_closed) < 1e-9);
    }

    #[test]
    fn picard_residual_is_below_tolerance() {
        let c = series(6, &[(1, "x1")]);
        let d = AffinePair::additive(series(6, &[(1, "x1")]));
        let v = Signal::constant(Grid::new(0.5, 500), 0.3);
        let cfg = SimConfig::default();
        let (u, y) = simulate_closed_loop(&c, &d, &v, &cfg).unwrap();
        // u must satisfy the loop equation to within the tolerance
        let rebuilt = v
            .mul(&evaluate_series(d.first(), &y))
            .add(&evaluate_series(d.second(), &y));
        assert!(sup_distance(&u, &rebuilt) < cfg.picard_tol * 10.0);
    }

    #[test]
    fn divergence_is_reported() {
        // strong positive feedback over a long horizon blows up
        let c = series(2, &[(100, "x1")]);
        let d = AffinePair::additive(series(2, &[(100, "x1")]));
        let v = Signal::constant(Grid::new(5.0, 100), 10.0);
        let cfg = SimConfig {
            amplitude_cap: 1e4,
            ..SimConfig::default()
        };
        match simulate_closed_loop(&c, &d, &v, &cfg) {
            Err(SimError::Diverged { .. }) | Err(SimError::NoConvergence { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn crosscheck_square_example() {
        // c = d = x1 with unit input: F_{x1 sh x1}[1] = t^2 = (t)(t)
        let c = series(4, &[(1, "x1")]);
        let u = Signal::constant(grid(), 1.0);
        let report = crosscheck_homomorphisms(&c, &c, &u);
        assert!(report.shuffle_dev < 1e-12, "{}", report.shuffle_dev);
        let t_sq = Signal::from_fn(grid(), |t| t * t);
        assert!(sup_distance(&report.shuffle_lhs, &t_sq) < 1e-9);
    }

    #[test]
    fn crosscheck_zero_series_is_exact() {
        let zero = TruncatedSeries::zero(4);
        let d = series(4, &[(1, "x1"), (1, "x0")]);
        let u = Signal::sine(grid(), 0.3, 1.0);
        let report = crosscheck_homomorphisms(&zero, &d, &u);
        assert_eq!(report.shuffle_dev, 0.0);
        assert_eq!(report.compose_dev, 0.0);
        assert_eq!(report.mixed_dev, 0.0);
    }

    #[test]
    fn homomorphism_deviation_shrinks_with_degree() {
        // (1 - x1)^{sh -1} has support in every degree, so the truncated
        // products lose mass; composing against the proper series x1 keeps
        // the cascaded signal small and the loss shrinks with the degree
        let u = Signal::sine(Grid::new(0.5, 1000), 0.3, 1.0);
        let dev_at = |degree: usize| {
            let base = TruncatedSeries::one(degree).sub(&series(degree, &[(1, "x1")]));
            let c = base.shuffle_inverse().expect("unit constant term");
            let x1 = series(degree, &[(1, "x1")]);
            let report = crosscheck_homomorphisms(&c, &x1, &u);
            report.shuffle_dev.max(report.compose_dev)
        };
        let coarse = dev_at(2);
        let mid = dev_at(4);
        let fine = dev_at(6);
        assert!(coarse > mid * 3.0, "coarse {coarse:.3e} vs mid {mid:.3e}");
        assert!(mid > fine * 3.0, "mid {mid:.3e} vs fine {fine:.3e}");
    }

    #[test]
    fn quadrature_error_scales_quadratically() {
        // halving the step count scales the x0^3 error by about 4
        let u_fine = Signal::constant(Grid::new(1.0, 10_000), 0.0);
        let u_coarse = Signal::constant(Grid::new(1.0, 5_000), 0.0);
        let word = w("x0x0x0");
        let err = |sig: &Signal| {
            let f = evaluate_word(&word, sig);
            let grid = sig.grid();
            let mut worst = 0.0f64;
            for (k, t) in grid.times().enumerate() {
                worst = worst.max((f.values()[k] - t.powi(3) / 6.0).abs());
            }
            worst
        };
        let ratio = err(&u_coarse) / err(&u_fine);
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }
}
