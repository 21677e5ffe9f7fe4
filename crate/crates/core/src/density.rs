//! Worst-case quantities for arbitrary integrable weights on [0, 1]:
//! numerically computed antiderivatives, per-interval extremal errors, the
//! radius of information for arbitrary nodes, and the explicit worst-case
//! function as a verifiable certificate.
//!
//! Everything here works from function evaluations only, so it serves as
//! the independent cross-check for the closed forms in [`crate::oscillatory`].

use crate::cheb::{ChebBudgetExceeded, ChebFun};
use crate::oracle::{self, OracleError};
use crate::oscillatory::IntervalErrorKind;
use crate::types::{NodeSet, SpaceKind};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

type EvalFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("quadrature failure: {0}")]
    Quadrature(#[from] OracleError),
    #[error("function representation exceeded its panel budget")]
    RepresentationBudget,
    #[error(
        "supplied antiderivative does not differentiate back to the density at x={x}: |{got}| vs |{want}|"
    )]
    AntiderivativeMismatch { x: f64, got: f64, want: f64 },
    #[error("unknown density spec '{0}'")]
    UnknownDensity(String),
    #[error("bad density parameter in '{0}'")]
    BadDensityParameter(String),
    #[error(
        "degenerate information: the full-space problem with these nodes has no finite worst-case error (weight mean {mean:e})"
    )]
    DegenerateInformation { mean: f64 },
}

impl From<ChebBudgetExceeded> for DensityError {
    fn from(_: ChebBudgetExceeded) -> Self {
        DensityError::RepresentationBudget
    }
}

/// A black-box complex-valued weight on [0, 1], optionally with an exact
/// antiderivative.
#[derive(Clone)]
pub struct DensityFunction {
    name: String,
    eval: EvalFn,
    antiderivative: Option<EvalFn>,
}

impl fmt::Debug for DensityFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityFunction")
            .field("name", &self.name)
            .field("exact_antiderivative", &self.antiderivative.is_some())
            .finish()
    }
}

/// Deterministic low-discrepancy-ish points used by the registration check.
fn check_points(count: usize) -> impl Iterator<Item = f64> {
    // golden-ratio rotation of the unit interval, kept away from the ends
    (1..=count).map(|i| {
        let x = (i as f64 * 0.6180339887498949).fract();
        0.01 + 0.98 * x
    })
}

impl DensityFunction {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        DensityFunction {
            name: name.into(),
            eval: Arc::new(eval),
            antiderivative: None,
        }
    }

    /// Registers an exact antiderivative. Its central difference must
    /// reproduce the density to 1e-6 (relative to max(1, |rho|)) at 100
    /// deterministic sample points; the step is scanned downward so that
    /// rapidly oscillating weights are differentiated at an adequate scale.
    pub fn with_antiderivative<F, G>(
        name: impl Into<String>,
        eval: F,
        antiderivative: G,
    ) -> Result<Self, DensityError>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
        G: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let name = name.into();
        let eval: EvalFn = Arc::new(eval);
        let anti: EvalFn = Arc::new(antiderivative);
        for x in check_points(100) {
            let want = (eval)(x);
            let tol = 1e-6 * want.norm().max(1.0);
            let mut best = f64::INFINITY;
            let mut got = Complex64::new(0.0, 0.0);
            let mut h = 1e-5;
            while h >= 1e-10 {
                let d = oracle::finite_difference_complex(|t| (anti)(t), x, h);
                let err = (d - want).norm();
                if err < best {
                    best = err;
                    got = d;
                }
                if best <= tol {
                    break;
                }
                h /= 8.0;
            }
            if best > tol {
                return Err(DensityError::AntiderivativeMismatch {
                    x,
                    got: got.norm(),
                    want: want.norm(),
                });
            }
        }
        Ok(DensityFunction {
            name,
            eval,
            antiderivative: Some(anti),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.eval)(x)
    }

    pub fn has_exact_antiderivative(&self) -> bool {
        self.antiderivative.is_some()
    }

    /// The oscillatory weight exp(-2 pi i k x).
    pub fn oscillatory(k: f64) -> Self {
        let f = move |x: f64| Complex64::new(0.0, -2.0 * PI * k * x).exp();
        let anti = move |t: f64| {
            (Complex64::new(0.0, -2.0 * PI * k * t).exp() - 1.0)
                / Complex64::new(0.0, -2.0 * PI * k)
        };
        // the closed-form antiderivative is exact; no need to re-derive it
        DensityFunction {
            name: format!("osc:k={k}"),
            eval: Arc::new(f),
            antiderivative: Some(Arc::new(anti)),
        }
    }

    /// The constant weight 1.
    pub fn constant() -> Self {
        DensityFunction {
            name: "const".into(),
            eval: Arc::new(|_| Complex64::new(1.0, 0.0)),
            antiderivative: Some(Arc::new(|t| Complex64::new(t, 0.0))),
        }
    }

    /// Polynomial weight c0 + c1 x + ... with real coefficients.
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let name = format!(
            "poly:{}",
            coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        let cs = coeffs.clone();
        let eval = move |x: f64| {
            let mut v = 0.0;
            for &c in cs.iter().rev() {
                v = v * x + c;
            }
            Complex64::new(v, 0.0)
        };
        let anti = move |t: f64| {
            let mut v = 0.0;
            for (i, &c) in coeffs.iter().enumerate().rev() {
                v = v * t + c / (i as f64 + 1.0);
            }
            Complex64::new(v * t, 0.0)
        };
        DensityFunction {
            name,
            eval: Arc::new(eval),
            antiderivative: Some(Arc::new(anti)),
        }
    }

    /// Normal density restricted to [0, 1]; integrated numerically.
    pub fn gaussian(mu: f64, sigma: f64) -> Self {
        let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
        DensityFunction {
            name: format!("gauss:{mu},{sigma}"),
            eval: Arc::new(move |x: f64| {
                let z = (x - mu) / sigma;
                Complex64::new(norm * (-0.5 * z * z).exp(), 0.0)
            }),
            antiderivative: None,
        }
    }

    /// Parses the built-in registry syntax:
    /// `const`, `osc:k=<real>`, `poly:c0,c1,...`, `gauss:mu,sigma`.
    pub fn parse(spec: &str) -> Result<Self, DensityError> {
        let bad = || DensityError::BadDensityParameter(spec.to_string());
        if spec == "const" {
            return Ok(Self::constant());
        }
        if let Some(rest) = spec.strip_prefix("osc:k=") {
            let k: f64 = rest.parse().map_err(|_| bad())?;
            if k == 0.0 || !k.is_finite() {
                return Err(bad());
            }
            return Ok(Self::oscillatory(k));
        }
        if let Some(rest) = spec.strip_prefix("poly:") {
            let coeffs: Result<Vec<f64>, _> = rest.split(',').map(|s| s.trim().parse()).collect();
            let coeffs = coeffs.map_err(|_| bad())?;
            if coeffs.is_empty() || coeffs.iter().any(|c: &f64| !c.is_finite()) {
                return Err(bad());
            }
            return Ok(Self::polynomial(coeffs));
        }
        if let Some(rest) = spec.strip_prefix("gauss:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 2 {
                return Err(bad());
            }
            let mu: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let sigma: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            if !mu.is_finite() || sigma <= 0.0 || !sigma.is_finite() {
                return Err(bad());
            }
            return Ok(Self::gaussian(mu, sigma));
        }
        Err(DensityError::UnknownDensity(spec.to_string()))
    }

    /// R(t) = integral of the density from `a` to `t`, to absolute
    /// accuracy `tol`. Uses the exact antiderivative when present.
    pub fn antiderivative_value(
        &self,
        a: f64,
        t: f64,
        tol: f64,
    ) -> Result<Complex64, DensityError> {
        assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&t) && a <= t);
        if let Some(f) = &self.antiderivative {
            return Ok(f(t) - f(a));
        }
        let (v, _) = oracle::adaptive_integral(|x| (self.eval)(x), a, t, tol, 1e-13)?;
        Ok(v)
    }

    /// Chebyshev representation of R(t) = int_a^t rho on [a, b], anchored
    /// at R(a) = 0.
    fn antiderivative_fun(&self, a: f64, b: f64) -> Result<ChebFun, DensityError> {
        if let Some(f) = &self.antiderivative {
            let base = f(a);
            Ok(ChebFun::build(&|t| f(t) - base, a, b)?)
        } else {
            let rho = ChebFun::build(&|t| (self.eval)(t), a, b)?;
            Ok(rho.antiderivative())
        }
    }
}

/// Solution of the per-interval extremal problem: the squared error value
/// together with the profile it came from.
#[derive(Debug, Clone)]
pub struct IntervalSolution {
    pub a: f64,
    pub b: f64,
    pub kind: IntervalErrorKind,
    /// Squared worst-case contribution of the interval.
    pub error_sq: f64,
    /// For the pinned problem, the mean of R removed from the profile.
    pub centering: Option<Complex64>,
    /// The profile whose L2 norm realizes the error: R - c (pinned) or R
    /// (free-end kinds).
    pub profile: ChebFun,
}

/// One interval of the worst-case function, scaled so that evaluating the
/// piece with the certificate scale gives f* directly. `value` already
/// vanishes at the interval's pinned end(s); `derivative` is its exact
/// chebfun derivative.
#[derive(Debug, Clone)]
pub struct CertificatePiece {
    pub a: f64,
    pub b: f64,
    /// Unit-seminorm per-interval worst function (before global scaling).
    value: ChebFun,
    derivative: ChebFun,
}

/// The worst-case function f* for a node set, as a piecewise record that
/// can be evaluated and verified without the density.
#[derive(Debug, Clone)]
pub struct WorstCaseCertificate {
    pub space: SpaceKind,
    pub radius: f64,
    pub nodes: Vec<f64>,
    /// Per-interval scale alpha_j = e_j / r applied to the unit piece.
    scales: Vec<f64>,
    pieces: Vec<CertificatePiece>,
}

/// Residuals from verifying a certificate against its defining properties.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// | ||(f*)'||_2 - 1 |
    pub norm_residual: f64,
    /// | I_rho(f*) - radius |
    pub integral_residual: f64,
    /// max_j |f*(x_j)| over nodes (plus the boundary for H10)
    pub max_node_residual: f64,
    pub node_residuals: Vec<f64>,
}

/// Per-interval worst-case error for a general weight.
///
/// Pinned: ||R - c||_2 with c the mean of R over [a, b].
/// Free left end (value unknown at `a`): ||R||_2 with R(t) = int_a^t rho.
/// Free right end (value unknown at `b`): ||R||_2 with R(t) = int_t^b rho.
pub fn interval_initial_error(
    rho: &DensityFunction,
    a: f64,
    b: f64,
    kind: IntervalErrorKind,
    tol: f64,
) -> Result<IntervalSolution, DensityError> {
    assert!(0.0 <= a && a < b && b <= 1.0, "need 0 <= a < b <= 1");
    assert!(tol > 0.0);
    let r = rho.antiderivative_fun(a, b)?;
    let (profile, centering) = match kind {
        IntervalErrorKind::InteriorH10 => {
            let c = r.integral() / (b - a);
            (r.affine(Complex64::new(1.0, 0.0), -c), Some(c))
        }
        // value unknown at a: R anchored at a realizes the maximum
        IntervalErrorKind::LeftFree => (r, None),
        // value unknown at b: R(t) = int_t^b rho = R_a(b) - R_a(t)
        IntervalErrorKind::RightFree => {
            let total = r.eval(b);
            (r.affine(Complex64::new(-1.0, 0.0), total), None)
        }
    };
    let (error_sq, _) = oracle::adaptive_integral_real(
        |t| profile.eval(t).norm_sqr(),
        a,
        b,
        (tol * tol).max(1e-300),
        1e-12,
    )?;
    Ok(IntervalSolution {
        a,
        b,
        kind,
        error_sq: error_sq.max(0.0),
        centering,
        profile,
    })
}

fn piece_from_solution(sol: &IntervalSolution) -> CertificatePiece {
    let e = sol.error_sq.sqrt();
    // unit piece g with g' = (+/-) conj(profile)/e and g = 0 at pinned ends
    let deriv = sol
        .profile
        .conj()
        .affine(Complex64::new(-1.0 / e, 0.0), Complex64::new(0.0, 0.0));
    let anti = deriv.antiderivative(); // zero at the left edge
    let (value, derivative) = match sol.kind {
        // pinned at both ends: g(t) = -int_a^t conj(profile)/e, g(b)=0 by
        // the mean-zero property
        IntervalErrorKind::InteriorH10 => (anti, deriv),
        // pinned at b only: g(t) = +int_t^b conj(profile)/e, so g(b) = 0,
        // g'(a) = -conj(R(a))/e = 0 at the free end, and integrating g
        // against the weight by parts gives +e (the opposite orientation
        // would certify -e)
        IntervalErrorKind::LeftFree => {
            let vb = anti.eval(sol.b);
            (anti.affine(Complex64::new(1.0, 0.0), -vb), deriv)
        }
        // pinned at a only, opposite orientation: g(t) = +int_a^t conj(profile)/e
        IntervalErrorKind::RightFree => (
            anti.affine(Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)),
            deriv.affine(Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)),
        ),
    };
    CertificatePiece {
        a: sol.a,
        b: sol.b,
        value,
        derivative,
    }
}

/// Radius of information for a general weight by adaptive quadrature,
/// together with the worst-case certificate.
///
/// Interior intervals use the pinned extremal problem; in the full space
/// the first and last interval use the free-end variants. With no nodes in
/// the full space, the radius is finite only when the weight integrates to
/// zero over [0, 1]; otherwise `DegenerateInformation` is returned.
pub fn radius_general(
    rho: &DensityFunction,
    nodes: &NodeSet,
    tol: f64,
) -> Result<(f64, WorstCaseCertificate), DensityError> {
    assert!(tol > 0.0);
    let mut jobs: Vec<(f64, f64, IntervalErrorKind)> = Vec::new();
    match nodes.space() {
        SpaceKind::H10 => {
            let grid = nodes.breakpoints();
            for w in grid.windows(2) {
                if w[1] > w[0] {
                    jobs.push((w[0], w[1], IntervalErrorKind::InteriorH10));
                }
            }
        }
        SpaceKind::H1 => {
            if nodes.is_empty() {
                let (mean, _) = oracle::adaptive_integral(|x| rho.eval(x), 0.0, 1.0, tol, 1e-13)?;
                if mean.norm() > 1e-10 {
                    return Err(DensityError::DegenerateInformation { mean: mean.norm() });
                }
                // With zero weight mean, R(t) = int_t^1 rho also vanishes
                // at 0, so pinning the worst function there just selects
                // one maximizer among the constant shifts.
                jobs.push((0.0, 1.0, IntervalErrorKind::RightFree));
            } else {
                let xs = nodes.nodes();
                if xs[0] > 0.0 {
                    jobs.push((0.0, xs[0], IntervalErrorKind::LeftFree));
                }
                for w in xs.windows(2) {
                    jobs.push((w[0], w[1], IntervalErrorKind::InteriorH10));
                }
                if xs[xs.len() - 1] < 1.0 {
                    jobs.push((xs[xs.len() - 1], 1.0, IntervalErrorKind::RightFree));
                }
            }
        }
    }

    // Intervals are independent; the reduction below keeps left-to-right
    // summation order so results do not depend on scheduling.
    let solutions: Result<Vec<IntervalSolution>, DensityError> = jobs
        .par_iter()
        .map(|&(a, b, kind)| interval_initial_error(rho, a, b, kind, tol))
        .collect();
    let solutions = solutions?;

    let mut sum_sq = 0.0;
    for s in &solutions {
        sum_sq += s.error_sq;
    }
    let radius = sum_sq.sqrt();
    if radius == 0.0 {
        return Err(DensityError::DegenerateInformation { mean: 0.0 });
    }

    let mut scales = Vec::with_capacity(solutions.len());
    let mut pieces = Vec::with_capacity(solutions.len());
    for s in &solutions {
        let e = s.error_sq.sqrt();
        if e == 0.0 {
            continue; // interval contributes nothing; f* is 0-linear there
        }
        scales.push(e / radius);
        pieces.push(piece_from_solution(s));
    }

    Ok((
        radius,
        WorstCaseCertificate {
            space: nodes.space(),
            radius,
            nodes: nodes.nodes().to_vec(),
            scales,
            pieces,
        },
    ))
}

impl WorstCaseCertificate {
    fn piece_index(&self, t: f64) -> Option<usize> {
        if self.pieces.is_empty() {
            return None;
        }
        let idx = self
            .pieces
            .partition_point(|p| p.b < t)
            .min(self.pieces.len() - 1);
        let p = &self.pieces[idx];
        (p.a <= t && t <= p.b).then_some(idx)
    }

    /// f*(t). Zero on intervals with no error contribution.
    pub fn evaluate(&self, t: f64) -> Complex64 {
        assert!((0.0..=1.0).contains(&t));
        match self.piece_index(t) {
            Some(i) => self.pieces[i].value.eval(t) * self.scales[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// (f*)'(t), taking the one-sided value at piece boundaries.
    pub fn derivative(&self, t: f64) -> Complex64 {
        match self.piece_index(t) {
            Some(i) => self.pieces[i].derivative.eval(t) * self.scales[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.pieces.iter().map(|p| (p.a, p.b))
    }
}

/// Evaluate a certificate function at a point.
pub fn evaluate_certificate(cert: &WorstCaseCertificate, t: f64) -> Complex64 {
    cert.evaluate(t)
}

/// Numerically verify a certificate: unit seminorm, vanishing at nodes,
/// and the weighted integral equal to the radius.
pub fn certificate_checks(
    cert: &WorstCaseCertificate,
    rho: &DensityFunction,
    tol: f64,
) -> Result<CertificateReport, DensityError> {
    // seminorm: integral of |f*'|^2 over the pieces
    let mut norm_sq = 0.0;
    for (i, p) in cert.pieces.iter().enumerate() {
        let s = cert.scales[i];
        let (v, _) = oracle::adaptive_integral_real(
            |t| p.derivative.eval(t).norm_sqr() * s * s,
            p.a,
            p.b,
            tol * tol,
            1e-12,
        )?;
        norm_sq += v;
    }
    let norm_residual = (norm_sq.sqrt() - 1.0).abs();

    // weighted integral, piece by piece
    let mut integral = Complex64::new(0.0, 0.0);
    for (i, p) in cert.pieces.iter().enumerate() {
        let s = cert.scales[i];
        let (v, _) =
            oracle::adaptive_integral(|t| p.value.eval(t) * s * rho.eval(t), p.a, p.b, tol, 1e-12)?;
        integral += v;
    }
    let integral_residual = (integral - cert.radius).norm();

    let mut points: Vec<f64> = cert.nodes.clone();
    if cert.space == SpaceKind::H10 {
        points.insert(0, 0.0);
        points.push(1.0);
    }
    let node_residuals: Vec<f64> = points.iter().map(|&x| cert.evaluate(x).norm()).collect();
    let max_node_residual = node_residuals.iter().fold(0.0f64, |m, &r| m.max(r));

    Ok(CertificateReport {
        norm_residual,
        integral_residual,
        max_node_residual,
        node_residuals,
    })
}
