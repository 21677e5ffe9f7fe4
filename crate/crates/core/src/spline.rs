//! The optimal quadrature rule itself: integrate the piecewise-linear
//! interpolant of the samples against the weight. Closed-form weights for
//! the oscillatory weight on equidistant nodes, quadrature-computed
//! weights for everything else.

use crate::density::{DensityError, DensityFunction};
use crate::oracle;
use crate::types::{Frequency, NodeSet, SpaceKind};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("closed-form weights need an integer frequency, got {0}")]
    NonIntegerK(f64),
    #[error("sample count {got} does not match the rule's {want} nodes")]
    LengthMismatch { got: usize, want: usize },
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// How the weights were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightProvenance {
    ClosedForm,
    Quadrature,
}

/// Nodes plus complex weights realizing the optimal algorithm
/// sum_j a_j f(x_j).
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: NodeSet,
    pub weights: Vec<Complex64>,
    pub provenance: WeightProvenance,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight_sum(&self) -> Complex64 {
        self.weights
            .iter()
            .fold(Complex64::new(0.0, 0.0), |s, w| s + w)
    }
}

/// Closed-form weights for the oscillatory weight with integer k on the
/// n + 1 equidistant nodes x_j = j/n (full space).
///
/// The interior weights are (n/(k^2 pi^2)) sin^2(pi k / n) e^{-2 pi i k j/n};
/// the endpoint weights pick up the half-interval corrections, and the
/// whole family sums to zero.
pub fn spline_weights_equidistant(k: Frequency, n: usize) -> Result<QuadratureRule, SplineError> {
    let ki = k.as_integer().ok_or(SplineError::NonIntegerK(k.value()))?;
    assert!(n >= 1);
    let kf = ki as f64;
    let nf = n as f64;
    let k2p2 = kf * kf * PI * PI;
    let mut weights = Vec::with_capacity(n + 1);

    let rot = |j: usize| Complex64::new(0.0, -2.0 * PI * kf * j as f64 / nf).exp();
    let first =
        Complex64::new(1.0, -2.0 * PI * kf / nf) - Complex64::new(0.0, -2.0 * PI * kf / nf).exp();
    weights.push(first * (nf / (4.0 * k2p2)));
    let s = (PI * kf / nf).sin();
    let interior = nf * s * s / k2p2;
    for j in 1..n {
        weights.push(rot(j) * interior);
    }
    if n >= 1 {
        let last =
            Complex64::new(1.0, 2.0 * PI * kf / nf) - Complex64::new(0.0, 2.0 * PI * kf / nf).exp();
        weights.push(last * (nf / (4.0 * k2p2)));
    }

    let values: Vec<f64> = (0..=n).map(|j| j as f64 / nf).collect();
    let nodes = NodeSet::new(&values, SpaceKind::H1).expect("equidistant nodes are valid");
    Ok(QuadratureRule {
        nodes,
        weights,
        provenance: WeightProvenance::ClosedForm,
    })
}

/// Piecewise-linear cardinal basis function for node `j` of the rule.
///
/// Interior nodes carry hat functions. In the full space the first basis
/// function extends constantly to the left boundary and the last one to
/// the right boundary (the optimal interpolant is constant there); in the
/// zero-boundary space the basis decays linearly to zero at 0 and 1.
fn basis(nodes: &[f64], space: SpaceKind, j: usize, x: f64) -> f64 {
    let n = nodes.len();
    let xj = nodes[j];
    let left = if j == 0 { None } else { Some(nodes[j - 1]) };
    let right = if j + 1 == n { None } else { Some(nodes[j + 1]) };
    if x < xj {
        match left {
            Some(xl) => {
                if x < xl {
                    0.0
                } else if xj > xl {
                    (x - xl) / (xj - xl)
                } else {
                    1.0
                }
            }
            None => match space {
                SpaceKind::H1 => 1.0,
                SpaceKind::H10 => {
                    if xj > 0.0 {
                        (x / xj).max(0.0)
                    } else {
                        0.0
                    }
                }
            },
        }
    } else {
        match right {
            Some(xr) => {
                if x > xr {
                    0.0
                } else if xr > xj {
                    (xr - x) / (xr - xj)
                } else {
                    1.0
                }
            }
            None => match space {
                SpaceKind::H1 => 1.0,
                SpaceKind::H10 => {
                    if xj < 1.0 {
                        ((1.0 - x) / (1.0 - xj)).max(0.0)
                    } else {
                        0.0
                    }
                }
            },
        }
    }
}

/// Weights a_j = int_0^1 b_j(x) rho(x) dx by adaptive quadrature, where
/// b_j is the piecewise-linear cardinal basis of the rule's nodes.
pub fn spline_weights_general(
    rho: &DensityFunction,
    nodes: &NodeSet,
    tol: f64,
) -> Result<QuadratureRule, SplineError> {
    assert!(!nodes.is_empty(), "a rule needs at least one node");
    let xs = nodes.nodes().to_vec();
    let space = nodes.space();
    let n = xs.len();
    let mut weights = Vec::with_capacity(n);
    for j in 0..n {
        // integrate only over the basis support
        let lo = if j == 0 {
            match space {
                SpaceKind::H1 => 0.0,
                SpaceKind::H10 => 0.0,
            }
        } else {
            xs[j - 1]
        };
        let hi = if j + 1 == n { 1.0 } else { xs[j + 1] };
        let (w, _) = oracle::adaptive_integral(
            |x| rho.eval(x) * basis(&xs, space, j, x),
            lo,
            hi,
            tol,
            1e-12,
        )
        .map_err(DensityError::from)?;
        weights.push(w);
    }
    Ok(QuadratureRule {
        nodes: nodes.clone(),
        weights,
        provenance: WeightProvenance::Quadrature,
    })
}

/// Apply the rule to samples taken at its nodes.
pub fn apply_rule(rule: &QuadratureRule, samples: &[Complex64]) -> Result<Complex64, SplineError> {
    if samples.len() != rule.weights.len() {
        return Err(SplineError::LengthMismatch {
            got: samples.len(),
            want: rule.weights.len(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (w, f) in rule.weights.iter().zip(samples.iter()) {
        acc += w * f;
    }
    Ok(acc)
}

/// A test integrand with an exact derivative, used to probe the rule
/// against the worst-case guarantee.
pub struct TestFunction {
    pub value: Box<dyn Fn(f64) -> Complex64 + Send + Sync>,
    pub derivative: Box<dyn Fn(f64) -> Complex64 + Send + Sync>,
}

impl TestFunction {
    /// Random combination of sine modes, normalized to unit seminorm.
    /// Sine modes vanish at both endpoints, so the functions are valid for
    /// both spaces.
    pub fn random_unit_seminorm(modes: usize, rng: &mut impl FnMut() -> f64) -> TestFunction {
        let mut coeffs = Vec::with_capacity(modes);
        let mut seminorm_sq = 0.0;
        for m in 1..=modes {
            let c = 2.0 * rng() - 1.0;
            let d = 2.0 * rng() - 1.0;
            let cm = Complex64::new(c, d);
            // d/dx sin(pi m x) = pi m cos(pi m x); the cos modes are
            // L2-orthogonal with norm^2 = 1/2
            seminorm_sq += cm.norm_sqr() * (PI * m as f64).powi(2) * 0.5;
            coeffs.push(cm);
        }
        let scale = 1.0 / seminorm_sq.sqrt();
        let coeffs2 = coeffs.clone();
        TestFunction {
            value: Box::new(move |x| {
                let mut v = Complex64::new(0.0, 0.0);
                for (i, c) in coeffs.iter().enumerate() {
                    v += c * (PI * (i + 1) as f64 * x).sin();
                }
                v * scale
            }),
            derivative: Box::new(move |x| {
                let mut v = Complex64::new(0.0, 0.0);
                for (i, c) in coeffs2.iter().enumerate() {
                    let m = (i + 1) as f64;
                    v += c * (PI * m) * (PI * m * x).cos();
                }
                v * scale
            }),
        }
    }
}

/// Worst observed error of the rule over the given unit-seminorm test
/// functions: max |I_rho(f) - sum a_j f(x_j)|.
pub fn error_bound_check(
    rule: &QuadratureRule,
    rho: &DensityFunction,
    tests: &[TestFunction],
    tol: f64,
) -> Result<f64, SplineError> {
    let xs = rule.nodes.nodes();
    let mut worst = 0.0f64;
    for tf in tests {
        let (integral, _) =
            oracle::adaptive_integral(|x| (tf.value)(x) * rho.eval(x), 0.0, 1.0, tol, 1e-12)
                .map_err(DensityError::from)?;
        let samples: Vec<Complex64> = xs.iter().map(|&x| (tf.value)(x)).collect();
        let approx = apply_rule(rule, &samples)?;
        worst = worst.max((integral - approx).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::make_nodeset;

    fn int_freq(k: i64) -> Frequency {
        Frequency::from_integer(k).unwrap()
    }

    #[test]
    fn weights_sum_to_zero() {
        for &(k, n) in &[(1i64, 2usize), (3, 7), (-5, 12), (7, 7), (2, 40)] {
            let rule = spline_weights_equidistant(int_freq(k), n).unwrap();
            assert!(rule.weight_sum().norm() < 1e-12, "k={k} n={n}");
            assert_eq!(rule.len(), n + 1);
        }
    }

    #[test]
    fn degenerate_equal_frequency() {
        // k = n: interior weights vanish, endpoint weights are +-i/(2 n pi)
        let n = 5;
        let rule = spline_weights_equidistant(int_freq(5), n).unwrap();
        for j in 1..n {
            assert!(rule.weights[j].norm() < 1e-16);
        }
        let expect = Complex64::new(0.0, -1.0 / (2.0 * n as f64 * PI));
        assert!((rule.weights[0] - expect).norm() < 1e-16);
        assert!((rule.weights[n] + expect).norm() < 1e-16);
    }

    #[test]
    fn non_integer_frequency_rejected() {
        assert!(matches!(
            spline_weights_equidistant(Frequency::new(1.5).unwrap(), 4),
            Err(SplineError::NonIntegerK(_))
        ));
    }

    #[test]
    fn conjugate_symmetry() {
        let plus = spline_weights_equidistant(int_freq(3), 11).unwrap();
        let minus = spline_weights_equidistant(int_freq(-3), 11).unwrap();
        for (a, b) in plus.weights.iter().zip(minus.weights.iter()) {
            assert!((a.conj() - b).norm() < 1e-18);
        }
    }

    #[test]
    fn qmc_normalization_limit() {
        // interior weights approach equal weight modulo the oscillation
        let k = 2i64;
        let n = 20_000usize;
        let rule = spline_weights_equidistant(int_freq(k), n).unwrap();
        for &j in &[1usize, n / 3, n / 2, n - 1] {
            let phase = Complex64::new(0.0, 2.0 * PI * k as f64 * j as f64 / n as f64).exp();
            let normalized = rule.weights[j] * phase * n as f64;
            assert!((normalized - 1.0).norm() < 1e-6, "j={j}");
        }
        let e0 = rule.weights[0] * n as f64;
        assert!((e0 - 0.5).norm() < 1e-3);
    }

    #[test]
    fn general_weights_match_closed_form() {
        let k = 3i64;
        let n = 6usize;
        let rho = DensityFunction::oscillatory(k as f64);
        let closed = spline_weights_equidistant(int_freq(k), n).unwrap();
        let general = spline_weights_general(&rho, &closed.nodes, 1e-12).unwrap();
        for (a, b) in closed.weights.iter().zip(general.weights.iter()) {
            assert!((a - b).norm() <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn trapezoid_weights_for_constant_weight() {
        let rho = DensityFunction::constant();
        let nodes = make_nodeset(&[0.0, 0.5, 1.0], SpaceKind::H1).unwrap();
        let rule = spline_weights_general(&rho, &nodes, 1e-12).unwrap();
        let expect = [0.25, 0.5, 0.25];
        for (w, e) in rule.weights.iter().zip(expect.iter()) {
            assert!((w - Complex64::new(*e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_node_constant_spline() {
        let rho = DensityFunction::constant();
        let nodes = make_nodeset(&[0.5], SpaceKind::H1).unwrap();
        let rule = spline_weights_general(&rho, &nodes, 1e-12).unwrap();
        assert!((rule.weights[0] - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn h10_weights_reproduce_piecewise_linear_integrals() {
        // the rule is exact on piecewise-linear interpolants through its
        // own nodes; check against direct quadrature of sigma * rho
        let kv = 2.0;
        let rho = DensityFunction::oscillatory(kv);
        let nodes = make_nodeset(&[0.2, 0.45, 0.8], SpaceKind::H10).unwrap();
        let rule = spline_weights_general(&rho, &nodes, 1e-12).unwrap();
        let samples = [
            Complex64::new(0.7, -0.2),
            Complex64::new(-0.3, 0.4),
            Complex64::new(0.1, 0.9),
        ];
        let xs = nodes.nodes();
        let sigma = |x: f64| -> Complex64 {
            let mut v = Complex64::new(0.0, 0.0);
            for (j, s) in samples.iter().enumerate() {
                v += s * basis(xs, SpaceKind::H10, j, x);
            }
            v
        };
        let (direct, _) =
            oracle::adaptive_integral(|x| sigma(x) * rho.eval(x), 0.0, 1.0, 1e-13, 1e-12).unwrap();
        let applied = apply_rule(&rule, &samples).unwrap();
        assert!((direct - applied).norm() <= 1e-10, "{direct} vs {applied}");
    }

    #[test]
    fn constant_integrand_annihilated() {
        let rule = spline_weights_equidistant(int_freq(4), 9).unwrap();
        let samples = vec![Complex64::new(2.5, -1.0); 10];
        let v = apply_rule(&rule, &samples).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn length_mismatch_rejected() {
        let rule = spline_weights_equidistant(int_freq(4), 9).unwrap();
        let samples = vec![Complex64::new(1.0, 0.0); 3];
        assert!(matches!(
            apply_rule(&rule, &samples),
            Err(SplineError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn observed_errors_stay_below_radius() {
        use crate::oscillatory::radius_h1;
        let kv = 3.0;
        let k = Frequency::new(kv).unwrap();
        let rho = DensityFunction::oscillatory(kv);
        let nodes = make_nodeset(
            &(0..=20).map(|j| j as f64 / 20.0).collect::<Vec<_>>(),
            SpaceKind::H1,
        )
        .unwrap();
        let rule = spline_weights_general(&rho, &nodes, 1e-12).unwrap();
        let radius = radius_h1(k, &nodes);

        let mut state = 0x9E3779B97F4A7C15u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / 9007199254740992.0
        };
        let tests: Vec<TestFunction> = (0..20)
            .map(|_| TestFunction::random_unit_seminorm(8, &mut rng))
            .collect();
        let worst = error_bound_check(&rule, &rho, &tests, 1e-12).unwrap();
        assert!(
            worst <= radius + 1e-8,
            "worst {worst} exceeds radius {radius}"
        );
    }
}
