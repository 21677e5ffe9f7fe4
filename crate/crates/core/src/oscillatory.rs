//! Exact worst-case quantities for the oscillatory weight
//! exp(-2*pi*i*k*x): per-interval squared errors, zero-sample errors and
//! the radius of information for both spaces, all in closed form.
//!
//! Every formula here depends on k only through even expressions, so all
//! functions return identical values for k and -k. The per-interval pinned
//! error depends only on the interval length, never on its position.

use crate::types::{Frequency, IntervalRole, NodeSet, SpaceKind};
use std::f64::consts::PI;

/// Which per-interval extremal problem applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalErrorKind {
    /// Both endpoint values known (interior interval, or any interval in
    /// the zero-boundary space).
    InteriorH10,
    /// Value unknown at the left end (first interval in the full space).
    LeftFree,
    /// Value unknown at the right end (last interval in the full space).
    RightFree,
}

/// Zero-sample error, either a finite value or the infinite tag that the
/// full space produces when the weight has nonzero mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialError {
    Finite(f64),
    Infinite,
}

impl InitialError {
    pub fn as_finite(&self) -> Option<f64> {
        match self {
            InitialError::Finite(v) => Some(*v),
            InitialError::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, InitialError::Infinite)
    }
}

/// Arguments below this switch (u - sin u) to its Taylor series.
const SERIES_CUTOFF: f64 = 1e-3;

/// u - sin(u), evaluated without subtractive cancellation.
///
/// Direct evaluation loses every significant digit as u -> 0; below the
/// cutoff a five-term series carries full relative precision.
pub(crate) fn u_minus_sin(u: f64) -> f64 {
    debug_assert!(u >= 0.0);
    if u < SERIES_CUTOFF {
        let u2 = u * u;
        let poly = 1.0
            + u2 * (-1.0 / 20.0
                + u2 * (1.0 / 840.0 + u2 * (-1.0 / 60480.0 + u2 * (1.0 / 6652800.0))));
        u * u2 / 6.0 * poly
    } else {
        u - u.sin()
    }
}

/// (1 - sinc^2(u)) evaluated as (u - sin u)(u + sin u)/u^2.
pub(crate) fn one_minus_sinc_sq(u: f64) -> f64 {
    debug_assert!(u >= 0.0);
    if u == 0.0 {
        return 0.0;
    }
    u_minus_sin(u) * (u + u.sin()) / (u * u)
}

/// Squared worst-case error contribution of an interval of length `len`
/// whose both endpoint values are known:
/// len/(4 pi^2 k^2) * (1 - sinc^2(pi |k| len)).
pub fn interval_error_sq_pinned(k: Frequency, len: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&len));
    if len == 0.0 {
        return 0.0;
    }
    let a = k.abs();
    let u = PI * a * len;
    len * one_minus_sinc_sq(u) / (4.0 * PI * PI * a * a)
}

/// Squared error contribution of an end interval with one unknown endpoint
/// value: (2 len - sin(2 pi |k| len)/(pi |k|)) / (4 pi^2 k^2), which is
/// (v - sin v)/(4 pi^3 |k|^3) with v = 2 pi |k| len. The left-free and
/// right-free problems give the same value for this weight.
pub fn interval_error_sq_free_end(k: Frequency, len: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&len));
    if len == 0.0 {
        return 0.0;
    }
    let a = k.abs();
    let v = 2.0 * PI * a * len;
    u_minus_sin(v) / (4.0 * PI * PI * PI * a * a * a)
}

/// Squared error of one interval by role kind.
pub fn interval_error_sq(k: Frequency, len: f64, kind: IntervalErrorKind) -> f64 {
    match kind {
        IntervalErrorKind::InteriorH10 => interval_error_sq_pinned(k, len),
        IntervalErrorKind::LeftFree | IntervalErrorKind::RightFree => {
            interval_error_sq_free_end(k, len)
        }
    }
}

/// Worst-case error with zero samples.
///
/// H10: sqrt of the pinned interval error over \[0,1\]; equals 1/(2 pi |k|)
/// for integer k. H1: sqrt(2)/(2 pi |k|) for integer k, infinite otherwise
/// (constant functions have zero seminorm while the integral of the weight
/// does not vanish).
pub fn initial_error(k: Frequency, space: SpaceKind) -> InitialError {
    match space {
        SpaceKind::H10 => InitialError::Finite(interval_error_sq_pinned(k, 1.0).sqrt()),
        SpaceKind::H1 => {
            if k.is_integer() {
                InitialError::Finite(std::f64::consts::SQRT_2 / (2.0 * PI * k.abs()))
            } else {
                InitialError::Infinite
            }
        }
    }
}

/// Radius of information for the zero-boundary space: square root of the
/// sum of pinned per-interval squared errors.
///
/// Accumulating per-interval contributions avoids the subtractive
/// cancellation of the equivalent one-shot expression when the radius is
/// far below the zero-sample error.
pub fn radius_h10(k: Frequency, nodes: &NodeSet) -> f64 {
    assert_eq!(nodes.space(), SpaceKind::H10, "radius_h10 needs H10 nodes");
    let mut sum = 0.0;
    for &len in nodes.partition().lengths() {
        sum += interval_error_sq_pinned(k, len);
    }
    sum.sqrt()
}

/// The algebraically equivalent one-shot form
/// (1/(2 pi |k|)) sqrt(1 - (1/(pi^2 k^2)) sum sin^2(pi k L_j)/L_j).
///
/// Numerically hostile for many intervals; retained for cross-checking the
/// accumulated form.
pub fn radius_h10_subtractive(k: Frequency, nodes: &NodeSet) -> f64 {
    assert_eq!(nodes.space(), SpaceKind::H10);
    let a = k.abs();
    let mut sum = 0.0;
    for &len in nodes.partition().lengths() {
        if len > 0.0 {
            let s = (PI * a * len).sin();
            sum += s * s / len;
        }
    }
    (1.0 - sum / (PI * PI * a * a)).max(0.0).sqrt() / (2.0 * PI * a)
}

/// Radius of information for the full space: free-end contributions from
/// [0, x_1] and [x_n, 1] plus pinned interior contributions.
///
/// Reduces to the zero-boundary radius when the first node is 0 and the
/// last is 1. Needs at least one node.
pub fn radius_h1(k: Frequency, nodes: &NodeSet) -> f64 {
    assert_eq!(nodes.space(), SpaceKind::H1, "radius_h1 needs H1 nodes");
    assert!(!nodes.is_empty(), "radius_h1 needs at least one node");
    let mut sum = 0.0;
    for (len, role) in nodes.partition().iter() {
        sum += match role {
            IntervalRole::Interior => interval_error_sq_pinned(k, len),
            IntervalRole::LeftEnd | IntervalRole::RightEnd => interval_error_sq_free_end(k, len),
        };
    }
    sum.sqrt()
}

/// Worst-case error of equidistant nodes in the zero-boundary space with
/// `m` intervals (m - 1 interior nodes).
pub fn equidistant_error_h10(k: Frequency, m: usize) -> f64 {
    assert!(m >= 1);
    (m as f64 * interval_error_sq_pinned(k, 1.0 / m as f64)).sqrt()
}

/// Worst-case error of the optimal rule on the n+1 equidistant nodes j/n
/// (endpoints included) in the full space. The two end intervals have
/// length zero, so the value coincides with the zero-boundary formula on n
/// intervals.
pub fn equidistant_error_h1(k: Frequency, n: usize) -> f64 {
    assert!(n >= 1);
    equidistant_error_h10(k, n)
}

/// One row of an asymptotic scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRow {
    /// The scanned parameter (n or k).
    pub param: f64,
    /// Equidistant worst-case error.
    pub error: f64,
    /// error * n (fixed k) or error * |k| (fixed n).
    pub normalized: f64,
}

/// Scan the equidistant error over interval counts for fixed k.
/// `normalized` tends to 1/(2 sqrt(3)).
pub fn asymptotic_scan_fixed_k(
    k: Frequency,
    n_values: impl IntoIterator<Item = usize>,
) -> Vec<AsymptoticRow> {
    n_values
        .into_iter()
        .map(|n| {
            let e = equidistant_error_h1(k, n);
            AsymptoticRow {
                param: n as f64,
                error: e,
                normalized: e * n as f64,
            }
        })
        .collect()
}

/// Scan the equidistant error over frequencies for a fixed interval count.
/// `normalized` tends to 1/(2 pi).
pub fn asymptotic_scan_fixed_n(
    n: usize,
    k_values: impl IntoIterator<Item = Frequency>,
) -> Vec<AsymptoticRow> {
    k_values
        .into_iter()
        .map(|k| {
            let e = equidistant_error_h1(k, n);
            AsymptoticRow {
                param: k.value(),
                error: e,
                normalized: e * k.abs(),
            }
        })
        .collect()
}
