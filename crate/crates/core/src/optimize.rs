//! Node-placement optimization: the provable equidistant regime, the
//! endpoint-offset solve for the full space, and a deterministic search
//! over interval lengths below the regime threshold.

use crate::oracle;
use crate::oscillatory::{one_minus_sinc_sq, u_minus_sin};
use crate::types::{Frequency, SpaceKind};
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("outside the provable regime: need n - 1 >= {threshold:.4}, got n = {n}")]
    RegimeViolation { n: usize, threshold: f64 },
}

/// Root constants controlling where equidistant nodes are provably
/// optimal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoints {
    /// First positive root of tan t = 2t, in (pi/3, pi/2).
    pub t0_star: f64,
    /// Maximum point of sin^2(pi k x)/x in [0, 1]: t0_star/(pi |k|),
    /// clamped to 1 for small |k|.
    pub x0_star: f64,
    /// 1/x0_star; interval counts at or above this make equidistant nodes
    /// optimal.
    pub threshold: f64,
}

/// Solves tan t = 2t on (pi/3, pi/2) by bisection and derives the
/// regime threshold for the given frequency.
pub fn critical_points(k: Frequency) -> CriticalPoints {
    let h = |t: f64| 2.0 * t * t.cos() - t.sin();
    let mut lo = PI / 3.0;
    let mut hi = PI / 2.0;
    debug_assert!(h(lo) > 0.0 && h(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t0_star = 0.5 * (lo + hi);
    let a = k.abs();
    let x0_star = if a * PI >= t0_star {
        t0_star / (a * PI)
    } else {
        1.0
    };
    CriticalPoints {
        t0_star,
        x0_star,
        threshold: 1.0 / x0_star,
    }
}

/// sin^2(pi k x)/x, extended by continuity with value 0 at the origin.
pub fn objective_f(k: Frequency, x: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x));
    if x < 1e-12 {
        return 0.0;
    }
    let s = (PI * k.abs() * x).sin();
    s * s / x
}

/// Derivative of [`objective_f`]; the one-sided slope pi^2 k^2 at 0.
pub fn objective_f_prime(k: Frequency, x: f64) -> f64 {
    let a = k.abs();
    if x < 1e-12 {
        return PI * PI * a * a;
    }
    let s = (PI * a * x).sin();
    (PI * a * x * (2.0 * PI * a * x).sin() - s * s) / (x * x)
}

/// Whether equidistant nodes are provably optimal for this size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    EquidistantOptimal,
    Unknown,
}

/// Regime classification. For the zero-boundary space `m` is the interval
/// count; for the full space `m` is the node count and the condition is
/// m - 1 >= threshold.
pub fn regime(k: Frequency, m: usize, space: SpaceKind) -> Regime {
    let threshold = critical_points(k).threshold;
    let effective = match space {
        SpaceKind::H10 => m as f64,
        SpaceKind::H1 => m as f64 - 1.0,
    };
    if effective >= threshold - 1e-9 {
        Regime::EquidistantOptimal
    } else {
        Regime::Unknown
    }
}

/// The optimal offset of the outermost nodes from the boundary in the
/// full space, together with the solve diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointOffset {
    pub x_star: f64,
    pub s_at_x_star: f64,
    pub s_prime_residual: f64,
    pub k: f64,
    pub n: usize,
}

/// The symmetric-configuration objective: squared radius (times
/// 4 pi^2 k^2, minus the constant 1) when both outer nodes sit at offset
/// `x` and the n - 1 interior intervals share the rest evenly.
pub fn endpoint_objective(k: Frequency, n: usize, x: f64) -> f64 {
    let a = k.abs();
    let y = (1.0 - 2.0 * x) / (n as f64 - 1.0);
    2.0 * x
        - 2.0 * (2.0 * PI * a * x).sin() / (PI * a)
        - (n as f64 - 1.0) * objective_f(k, y) / (PI * PI * a * a)
}

/// Derivative of [`endpoint_objective`] in x.
pub fn endpoint_objective_derivative(k: Frequency, n: usize, x: f64) -> f64 {
    let a = k.abs();
    let y = (1.0 - 2.0 * x) / (n as f64 - 1.0);
    2.0 - 4.0 * (2.0 * PI * a * x).cos() + 2.0 * objective_f_prime(k, y) / (PI * PI * a * a)
}

/// Solves for the boundary offset x*: the unique stationary point of the
/// symmetric-configuration objective in (0, min(1/2, 1/(6|k|))).
///
/// Requires n - 1 at or above the regime threshold, where uniqueness is
/// guaranteed.
pub fn solve_x_star(k: Frequency, n: usize) -> Result<EndpointOffset, OptimizeError> {
    let cp = critical_points(k);
    if (n as f64 - 1.0) < cp.threshold - 1e-9 {
        return Err(OptimizeError::RegimeViolation {
            n,
            threshold: cp.threshold,
        });
    }
    let a = k.abs();
    let hi = 0.5f64.min(1.0 / (6.0 * a));
    let sp = |x: f64| endpoint_objective_derivative(k, n, x);
    let mut lo = hi * 1e-14;
    let mut hi = hi * (1.0 - 1e-14);
    debug_assert!(sp(lo) < 0.0, "derivative must start negative");
    debug_assert!(sp(hi) > 0.0, "derivative must end positive");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sp(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x_star = 0.5 * (lo + hi);
    Ok(EndpointOffset {
        x_star,
        s_at_x_star: endpoint_objective(k, n, x_star),
        s_prime_residual: sp(x_star).abs(),
        k: k.value(),
        n,
    })
}

// ---------------------------------------------------------------------------
// Search over interval lengths
// ---------------------------------------------------------------------------

/// Knobs of the search; all stochastic behavior derives from `seed`, so
/// identical configurations give identical results.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub seed: u64,
    pub starts: usize,
    /// Lattice resolution (steps per unit) of the certification grid.
    pub grid_steps: usize,
    /// Maximum number of distinct lengths in structured candidates.
    pub max_distinct: usize,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            seed: 42,
            starts: 32,
            grid_steps: 2000,
            max_distinct: 3,
            tol: 1e-12,
            max_iters: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimalityStatus {
    /// Inside the provable regime; the returned configuration is optimal.
    ProvenEquidistant,
    /// Best found by the search; global optimality is open.
    LocalOptimum,
    /// Best found, confirmed by the exhaustive lattice at its resolution.
    GridCertified,
}

impl OptimalityStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            OptimalityStatus::ProvenEquidistant => "proven-equidistant",
            OptimalityStatus::LocalOptimum => "local-optimum",
            OptimalityStatus::GridCertified => "grid-certified",
        }
    }
}

/// Outcome of a node-placement run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub space: SpaceKind,
    /// Interval lengths, canonically sorted ascending within each role
    /// block (ends stay at the ends for the full space).
    pub lengths: Vec<f64>,
    /// Node positions implied by `lengths`.
    pub nodes: Vec<f64>,
    pub best_radius: f64,
    pub equidistant_radius: f64,
    pub status: OptimalityStatus,
    pub strategy: String,
    pub iterations: u64,
    pub evaluations: u64,
}

/// Per-coordinate term of the scaled squared radius. The interior kind is
/// L (1 - sinc^2(pi k L)); the end kind is 2L - sin(2 pi k L)/(pi k).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TermKind {
    Pinned,
    FreeEnd,
}

#[derive(Clone)]
struct SimplexObjective {
    a: f64,
    kinds: Vec<TermKind>,
}

impl SimplexObjective {
    fn all_pinned(a: f64, m: usize) -> Self {
        SimplexObjective {
            a,
            kinds: vec![TermKind::Pinned; m],
        }
    }

    fn with_free_ends(a: f64, m: usize) -> Self {
        assert!(m >= 2);
        let mut kinds = vec![TermKind::Pinned; m];
        kinds[0] = TermKind::FreeEnd;
        kinds[m - 1] = TermKind::FreeEnd;
        SimplexObjective { a, kinds }
    }

    fn term(&self, kind: TermKind, l: f64) -> f64 {
        if l <= 0.0 {
            return 0.0;
        }
        let u = PI * self.a * l;
        match kind {
            TermKind::Pinned => l * one_minus_sinc_sq(u),
            TermKind::FreeEnd => u_minus_sin(2.0 * u) / (PI * self.a),
        }
    }

    fn dterm(&self, kind: TermKind, l: f64) -> f64 {
        let u = PI * self.a * l;
        match kind {
            TermKind::Pinned => {
                // (u^2 - u sin 2u + sin^2 u)/u^2, by series for small u
                if u < 1e-2 {
                    let u2 = u * u;
                    u2 * (1.0 - u2 * (2.0 / 9.0) + u2 * u2 / 45.0)
                } else {
                    let s = u.sin();
                    (u * u - u * (2.0 * u).sin() + s * s) / (u * u)
                }
            }
            TermKind::FreeEnd => {
                let s = u.sin();
                4.0 * s * s
            }
        }
    }

    /// Scaled squared radius: radius = sqrt(value)/(2 pi |k|).
    fn value(&self, ls: &[f64]) -> f64 {
        debug_assert_eq!(ls.len(), self.kinds.len());
        let mut sum = 0.0;
        for (l, kind) in ls.iter().zip(self.kinds.iter()) {
            sum += self.term(*kind, *l);
        }
        sum
    }

    fn grad_into(&self, ls: &[f64], out: &mut [f64]) {
        for ((g, l), kind) in out.iter_mut().zip(ls.iter()).zip(self.kinds.iter()) {
            *g = self.dterm(*kind, *l);
        }
    }

    fn radius(&self, ls: &[f64]) -> f64 {
        self.value(ls).sqrt() / (2.0 * PI * self.a)
    }

    fn dim(&self) -> usize {
        self.kinds.len()
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64], out: &mut Vec<f64>) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    let mut found = false;
    for (i, &ui) in u.iter().enumerate() {
        cumulative += ui;
        let t = (cumulative - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
            found = true;
        }
    }
    if !found {
        theta = (v.iter().sum::<f64>() - 1.0) / v.len() as f64;
    }
    out.clear();
    out.extend(v.iter().map(|&x| (x - theta).max(0.0)));
    // repair rounding drift so the lengths sum to 1 exactly enough
    let s: f64 = out.iter().sum();
    if s > 0.0 && (s - 1.0).abs() > 1e-15 {
        for x in out.iter_mut() {
            *x /= s;
        }
    }
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
}

/// Projected-gradient descent on the simplex for the scaled squared
/// radius. Returns (lengths, value, iterations, evaluations).
fn projected_gradient(
    obj: &SimplexObjective,
    start: &[f64],
    tol: f64,
    max_iters: usize,
) -> (Vec<f64>, f64, u64, u64) {
    let m = obj.dim();
    let mut x = start.to_vec();
    let mut value = obj.value(&x);
    let mut evals = 1u64;
    let mut grad = vec![0.0; m];
    let mut trial_raw = vec![0.0; m];
    let mut trial = Vec::with_capacity(m);
    let mut step = 0.25 / m as f64;
    let mut stall = 0u32;
    let mut iter = 0u64;

    for _ in 0..max_iters {
        iter += 1;
        obj.grad_into(&x, &mut grad);
        let mut improved = false;
        let mut eta = step;
        for _ in 0..36 {
            for i in 0..m {
                trial_raw[i] = x[i] - eta * grad[i];
            }
            project_simplex(&trial_raw, &mut trial);
            let tv = obj.value(&trial);
            evals += 1;
            if tv < value {
                let gain = value - tv;
                x.copy_from_slice(&trial);
                value = tv;
                step = (eta * 1.8).min(4.0 / m as f64);
                improved = true;
                if gain <= tol * value.abs().max(1e-300) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                break;
            }
            eta *= 0.4;
        }
        if !improved {
            break;
        }
        if stall >= 3 {
            break;
        }
    }
    (x, value, iter, evals)
}

/// Golden-section minimization of a 1-d function on [lo, hi].
fn golden_min<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.6180339887498949;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Structured candidates with two distinct lengths: q intervals of length
/// b and m - q of length (1 - q b)/(m - q), the 1-d family swept finely
/// enough to resolve both oscillation scales and refined locally.
fn two_length_candidates(
    obj: &SimplexObjective,
    m: usize,
    evals: &mut u64,
) -> Vec<(Vec<f64>, f64)> {
    let a = obj.a;
    let mut out = Vec::new();
    if m < 2 {
        return out;
    }
    for q in 1..=(m / 2) {
        let p = m - q;
        let qf = q as f64;
        let pf = p as f64;
        let hi = 1.0 / qf;
        let value_at = |b: f64| -> f64 {
            let la = (1.0 - qf * b) / pf;
            qf * obj.term(obj.kinds[0], b) + pf * obj.term(obj.kinds[0], la)
        };
        let points = ((12.0 * a / qf).ceil() as usize).clamp(48, 200_000);
        let step = hi / points as f64;
        let mut best_b = step;
        let mut best_v = f64::INFINITY;
        for i in 1..points {
            let b = i as f64 * step;
            let v = value_at(b);
            if v < best_v {
                best_v = v;
                best_b = b;
            }
        }
        *evals += points as u64;
        let lo = (best_b - step).max(step * 1e-6);
        let hi_ref = (best_b + step).min(hi * (1.0 - 1e-12));
        let (b, v) = golden_min(&value_at, lo, hi_ref, 80);
        *evals += 80;
        let la = (1.0 - qf * b) / pf;
        if la < 0.0 {
            continue;
        }
        let mut lengths = vec![la; m];
        for l in lengths.iter_mut().take(q) {
            *l = b;
        }
        out.push((lengths, v));
    }
    out
}

/// Third-length refinements of two-length candidates: keep the q-group,
/// carve one interval out of the majority group and sweep its length,
/// with the rest of the majority group absorbing the difference.
fn three_length_refinements(
    obj: &SimplexObjective,
    m: usize,
    pairs: &[(Vec<f64>, f64)],
    evals: &mut u64,
) -> Vec<Vec<f64>> {
    let a = obj.a;
    let mut out = Vec::new();
    for (lengths, _) in pairs.iter().take(3) {
        // recover the two-group structure (candidates store q leading
        // entries of one length, the rest of another)
        let b_len = lengths[0];
        let q = lengths.iter().take_while(|&&l| l == b_len).count();
        let p = m - q;
        if p < 2 {
            continue;
        }
        let qf = q as f64;
        let rest = 1.0 - qf * b_len;
        let value_at = |c: f64| -> f64 {
            let la = (rest - c) / (p as f64 - 1.0);
            if la < 0.0 {
                return f64::INFINITY;
            }
            (p as f64 - 1.0) * obj.term(obj.kinds[0], la)
                + qf * obj.term(obj.kinds[0], b_len)
                + obj.term(obj.kinds[0], c)
        };
        let points = ((12.0 * a).ceil() as usize).clamp(48, 200_000);
        let step = rest / points as f64;
        let mut best_c = step;
        let mut best_v = f64::INFINITY;
        for i in 1..points {
            let c = i as f64 * step;
            let v = value_at(c);
            if v < best_v {
                best_v = v;
                best_c = c;
            }
        }
        *evals += points as u64 + 80;
        let (c, _) = golden_min(
            &value_at,
            (best_c - step).max(step * 1e-6),
            (best_c + step).min(rest * (1.0 - 1e-12)),
            80,
        );
        let la = (rest - c) / (p as f64 - 1.0);
        if la < 0.0 {
            continue;
        }
        let mut refined = vec![la; m];
        for l in refined.iter_mut().take(q) {
            *l = b_len;
        }
        refined[q] = c;
        out.push(refined);
    }
    out
}

/// Canonical form: lengths ascending (all-pinned objectives are symmetric
/// under permutation).
fn canonicalize(lengths: &mut [f64]) {
    lengths.sort_by(|x, y| x.partial_cmp(y).unwrap());
}

fn distinct_count(sorted: &[f64]) -> usize {
    let mut count = usize::from(!sorted.is_empty());
    for w in sorted.windows(2) {
        if (w[1] - w[0]).abs() > 1e-9 * (1.0 + w[1].abs()) {
            count += 1;
        }
    }
    count
}

/// value-then-structure comparison implementing the tie-breaking rule:
/// smaller objective wins; within 1e-13, fewer distinct lengths, then
/// lexicographically smaller sorted lengths.
fn better(candidate: &(Vec<f64>, f64), incumbent: &(Vec<f64>, f64)) -> bool {
    let (cl, cv) = candidate;
    let (il, iv) = incumbent;
    if (cv - iv).abs() > 1e-13 * iv.abs().max(1e-300) {
        return cv < iv;
    }
    let dc = distinct_count(cl);
    let di = distinct_count(il);
    if dc != di {
        return dc < di;
    }
    cl < il
}

fn search_simplex(
    obj: &SimplexObjective,
    cfg: &OptimizerConfig,
    structured: Vec<Vec<f64>>,
    allow_grid: bool,
) -> (Vec<f64>, f64, OptimalityStatus, String, u64, u64) {
    let m = obj.dim();
    let mut evaluations = 0u64;
    let equi = vec![1.0 / m as f64; m];

    // candidate pool: equidistant, structured families, and the
    // certification lattice when the dimension admits it
    let mut seeds: Vec<Vec<f64>> = vec![equi.clone()];
    seeds.extend(structured);
    let symmetric = obj.kinds.iter().all(|k| *k == TermKind::Pinned);
    if symmetric && cfg.max_distinct >= 2 {
        let mut pairs = two_length_candidates(obj, m, &mut evaluations);
        pairs.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
        if cfg.max_distinct >= 3 {
            seeds.extend(three_length_refinements(obj, m, &pairs, &mut evaluations));
        }
        for (lengths, _) in pairs.into_iter().take(12) {
            seeds.push(lengths);
        }
    }

    let mut grid_used = false;
    if allow_grid && m <= 5 {
        let budget: u128 = 20_000_000;
        // degrade the lattice resolution until it fits the budget
        let mut steps = cfg.grid_steps;
        loop {
            match oracle::simplex_grid_search(|ls| -obj.value(ls), m, steps, budget) {
                Ok((point, _)) => {
                    let mut combos: u128 = 1;
                    for j in 1..(m as u128) {
                        combos = combos * (steps as u128 + j) / j;
                    }
                    evaluations += combos as u64;
                    seeds.push(point);
                    grid_used = true;
                    break;
                }
                Err(_) if steps > 16 => steps /= 2,
                Err(_) => break,
            }
        }
    }

    // deterministic random starts fill the configured budget
    let mut rng = SplitMix64(cfg.seed);
    let betas = [0.1, 0.3, 0.6, 1.0];
    while seeds.len() < cfg.starts.max(1) {
        let beta = betas[seeds.len() % betas.len()];
        let mut dir = vec![0.0; m];
        let mut total = 0.0;
        for d in dir.iter_mut() {
            let e = -(1.0 - rng.next_f64()).ln();
            *d = e;
            total += e;
        }
        let mut start = Vec::with_capacity(m);
        for (i, d) in dir.iter().enumerate() {
            start.push((1.0 - beta) * equi[i.min(m - 1)] + beta * d / total);
        }
        seeds.push(start);
    }

    // refine every seed; reduction below is order-independent
    let refined: Vec<(Vec<f64>, f64, u64, u64)> = seeds
        .par_iter()
        .map(|s| projected_gradient(obj, s, cfg.tol, cfg.max_iters))
        .collect();

    let mut iterations = 0u64;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (lengths, value, it, ev) in refined {
        iterations += it;
        evaluations += ev;
        let mut cand = lengths;
        if symmetric {
            canonicalize(&mut cand);
        }
        let cand = (cand, value);
        match &best {
            None => best = Some(cand),
            Some(incumbent) => {
                if better(&cand, incumbent) {
                    best = Some(cand);
                }
            }
        }
    }
    let (mut lengths, mut value) = best.expect("at least one candidate");

    // exact equidistant canonicalization when the search lands there
    let equi_value = obj.value(&equi);
    evaluations += 1;
    if value >= equi_value - 1e-13 * equi_value.abs().max(1e-300) {
        let cand = (equi.clone(), equi_value);
        if better(&cand, &(lengths.clone(), value)) {
            lengths = equi;
            value = equi_value;
        }
    }

    let status = if grid_used {
        OptimalityStatus::GridCertified
    } else {
        OptimalityStatus::LocalOptimum
    };
    let strategy = if grid_used {
        "structured+multistart+grid".to_string()
    } else {
        "structured+multistart".to_string()
    };
    (lengths, value, status, strategy, iterations, evaluations)
}

fn nodes_from_lengths(lengths: &[f64], space: SpaceKind) -> Vec<f64> {
    let mut nodes = Vec::new();
    let mut acc = 0.0;
    match space {
        SpaceKind::H10 => {
            for &l in &lengths[..lengths.len().saturating_sub(1)] {
                acc += l;
                nodes.push(acc.min(1.0));
            }
        }
        SpaceKind::H1 => {
            // nodes sit at the end of every interval except the last
            for &l in &lengths[..lengths.len().saturating_sub(1)] {
                acc += l;
                nodes.push(acc.min(1.0));
            }
        }
    }
    nodes
}

/// Search for the best interval lengths in the zero-boundary space with
/// `m` intervals, regardless of regime. Deterministic under the
/// configuration seed.
pub fn small_n_optimizer(k: Frequency, m: usize, cfg: &OptimizerConfig) -> OptimizationResult {
    assert!(m >= 1);
    let a = k.abs();
    let obj = SimplexObjective::all_pinned(a, m);
    let equidistant_radius = crate::oscillatory::equidistant_error_h10(k, m);
    if m == 1 {
        return OptimizationResult {
            space: SpaceKind::H10,
            lengths: vec![1.0],
            nodes: vec![],
            best_radius: equidistant_radius,
            equidistant_radius,
            status: OptimalityStatus::ProvenEquidistant,
            strategy: "single-interval".to_string(),
            iterations: 0,
            evaluations: 0,
        };
    }
    let (lengths, value, status, strategy, iterations, evaluations) =
        search_simplex(&obj, cfg, Vec::new(), true);
    let best_radius = value.sqrt() / (2.0 * PI * a);
    let nodes = nodes_from_lengths(&lengths, SpaceKind::H10);
    OptimizationResult {
        space: SpaceKind::H10,
        lengths,
        nodes,
        best_radius,
        equidistant_radius,
        status,
        strategy,
        iterations,
        evaluations,
    }
}

/// Best node placement for a sample budget.
///
/// Zero-boundary space: `budget` interior nodes (budget + 1 intervals).
/// In the provable regime the result is exactly equidistant. Full space:
/// `budget` nodes; in the regime the outer nodes sit at the offset x*
/// with an equidistant interior. Below the regime both spaces run the
/// deterministic search.
pub fn optimal_nodes(
    k: Frequency,
    budget: usize,
    space: SpaceKind,
    cfg: &OptimizerConfig,
) -> OptimizationResult {
    assert!(budget >= 1);
    match space {
        SpaceKind::H10 => {
            let m = budget + 1;
            if regime(k, m, SpaceKind::H10) == Regime::EquidistantOptimal {
                let lengths = vec![1.0 / m as f64; m];
                let nodes = nodes_from_lengths(&lengths, SpaceKind::H10);
                let r = crate::oscillatory::equidistant_error_h10(k, m);
                return OptimizationResult {
                    space: SpaceKind::H10,
                    lengths,
                    nodes,
                    best_radius: r,
                    equidistant_radius: r,
                    status: OptimalityStatus::ProvenEquidistant,
                    strategy: "regime-equidistant".to_string(),
                    iterations: 0,
                    evaluations: 0,
                };
            }
            small_n_optimizer(k, m, cfg)
        }
        SpaceKind::H1 => optimal_nodes_h1(k, budget, cfg),
    }
}

fn optimal_nodes_h1(k: Frequency, n: usize, cfg: &OptimizerConfig) -> OptimizationResult {
    let a = k.abs();
    let equidistant_radius = if n >= 2 {
        crate::oscillatory::equidistant_error_h1(k, n - 1)
    } else {
        // a single node cannot reproduce the equidistant-with-endpoints
        // rule; compare against the midpoint configuration instead
        let obj = SimplexObjective::with_free_ends(a, 2);
        obj.radius(&[0.5, 0.5])
    };

    if n >= 2 && regime(k, n, SpaceKind::H1) == Regime::EquidistantOptimal {
        let off = solve_x_star(k, n).expect("regime was just checked");
        let x = off.x_star;
        let inner = (1.0 - 2.0 * x) / (n as f64 - 1.0);
        let mut lengths = Vec::with_capacity(n + 1);
        lengths.push(x);
        lengths.extend(std::iter::repeat_n(inner, n - 1));
        lengths.push(x);
        let obj = SimplexObjective::with_free_ends(a, n + 1);
        let best_radius = obj.radius(&lengths);
        let nodes = nodes_from_lengths(&lengths, SpaceKind::H1);
        return OptimizationResult {
            space: SpaceKind::H1,
            lengths,
            nodes,
            best_radius,
            equidistant_radius,
            status: OptimalityStatus::ProvenEquidistant,
            strategy: "regime-endpoint-offset".to_string(),
            iterations: 0,
            evaluations: 0,
        };
    }

    // joint search over (end, interior..., end) lengths
    let m = n + 1;
    let obj = SimplexObjective::with_free_ends(a, m);
    let mut structured: Vec<Vec<f64>> = Vec::new();
    // endpoints-on-boundary configuration (degenerate end intervals)
    if n >= 2 {
        let mut v = vec![1.0 / (n as f64 - 1.0); m];
        v[0] = 0.0;
        v[m - 1] = 0.0;
        structured.push(v);
    }
    // midpoint-style configuration
    {
        let mut v = vec![1.0 / n as f64; m];
        v[0] = 0.5 / n as f64;
        v[m - 1] = 0.5 / n as f64;
        structured.push(v);
    }
    // symmetric offset sweep
    if n >= 2 {
        let sweep = |x: f64| {
            let inner = (1.0 - 2.0 * x) / (n as f64 - 1.0);
            let mut v = vec![inner; m];
            v[0] = x;
            v[m - 1] = x;
            v
        };
        let value_at = |x: f64| obj.value(&sweep(x));
        let points = ((24.0 * a).ceil() as usize).clamp(64, 100_000);
        let mut best_x = 0.25 / n as f64;
        let mut best_v = f64::INFINITY;
        for i in 1..points {
            let x = 0.5 * i as f64 / points as f64;
            let v = value_at(x);
            if v < best_v {
                best_v = v;
                best_x = x;
            }
        }
        let step = 0.5 / points as f64;
        let (x, _) = golden_min(&value_at, (best_x - step).max(0.0), best_x + step, 80);
        structured.push(sweep(x));
    }

    let (lengths, value, status, strategy, iterations, evaluations) =
        search_simplex(&obj, cfg, structured, m <= 5);
    // free ends are not permutation-symmetric with the interior, so the
    // search result keeps its coordinate order; normalize interior order
    let mut lengths = lengths;
    if lengths.len() > 3 {
        let last = lengths.len() - 1;
        lengths[1..last].sort_by(|x, y| x.partial_cmp(y).unwrap());
    }
    let best_radius = value.sqrt() / (2.0 * PI * a);
    let nodes = nodes_from_lengths(&lengths, SpaceKind::H1);
    OptimizationResult {
        space: SpaceKind::H1,
        lengths,
        nodes,
        best_radius,
        equidistant_radius,
        status,
        strategy,
        iterations,
        evaluations,
    }
}

/// Equidistant radii over a range of node counts. For the zero-boundary
/// space `n` counts interior nodes (n + 1 intervals); for the full space
/// `n` counts intervals of the endpoint-including rule.
pub fn scan_radius_over_n(
    k: Frequency,
    n_min: usize,
    n_max: usize,
    space: SpaceKind,
) -> Vec<(usize, f64)> {
    assert!(1 <= n_min && n_min <= n_max);
    (n_min..=n_max)
        .map(|n| {
            let e = match space {
                SpaceKind::H10 => crate::oscillatory::equidistant_error_h10(k, n + 1),
                SpaceKind::H1 => crate::oscillatory::equidistant_error_h1(k, n),
            };
            (n, e)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillatory::{equidistant_error_h1, equidistant_error_h10, radius_h1};
    use crate::types::make_nodeset;

    fn freq(k: f64) -> Frequency {
        Frequency::new(k).unwrap()
    }

    #[test]
    fn root_constants() {
        let cp = critical_points(freq(1.0));
        assert!((cp.t0_star / PI - 0.3710).abs() < 1e-4);
        assert!((2.0 * cp.t0_star * cp.t0_star.cos() - cp.t0_star.sin()).abs() <= 1e-13);
        assert!(cp.t0_star / PI > 0.37098 && cp.t0_star / PI < 0.37102);
        assert!(cp.threshold > 2.6953 && cp.threshold < 2.6956);
    }

    #[test]
    fn small_frequency_clamps_maximum_point() {
        let cp = critical_points(freq(0.3));
        assert_eq!(cp.x0_star, 1.0);
        assert_eq!(cp.threshold, 1.0);
    }

    #[test]
    fn objective_vanishes_on_the_grid() {
        let k = freq(6.0);
        for j in 1..=6 {
            assert!(objective_f(k, j as f64 / 6.0).abs() < 1e-25);
        }
        // slope at the origin
        let x = 1e-9;
        assert!((objective_f(k, x) / x - PI * PI * 36.0).abs() < 1e-2);
    }

    #[test]
    fn objective_maximum_value() {
        let k = freq(1.0);
        let cp = critical_points(k);
        let fmax = objective_f(k, cp.x0_star);
        // maximum value is pi |k| sin(2 t0)
        let expect = PI * (2.0 * cp.t0_star).sin();
        assert!((fmax - expect).abs() < 1e-10);
        assert!(objective_f_prime(k, cp.x0_star).abs() < 1e-9);
    }

    #[test]
    fn regime_classification() {
        assert_eq!(
            regime(freq(10.0), 27, SpaceKind::H10),
            Regime::EquidistantOptimal
        );
        assert_eq!(regime(freq(10.0), 26, SpaceKind::H10), Regime::Unknown);
        assert_eq!(
            regime(freq(0.3), 1, SpaceKind::H10),
            Regime::EquidistantOptimal
        );
    }

    #[test]
    fn x_star_solve_properties() {
        for &(kv, n) in &[(2.0, 8usize), (5.0, 16), (10.0, 30)] {
            let k = freq(kv);
            let off = solve_x_star(k, n).unwrap();
            assert!(off.s_prime_residual <= 1e-10, "k={kv} n={n}");
            assert!(off.x_star > 0.0 && off.x_star < 0.5f64.min(1.0 / (6.0 * kv)));
            assert!(off.x_star < 1.0 / (2.0 * n as f64), "k={kv} n={n}");
            // dense scan cannot find a lower objective value
            let mut best = f64::INFINITY;
            let hi = 0.5f64.min(1.0 / (6.0 * kv));
            for i in 1..10_000 {
                let x = hi * i as f64 / 10_000.0;
                best = best.min(endpoint_objective(k, n, x));
            }
            assert!(off.s_at_x_star <= best + 1e-12);
            // derivative is positive at the right end of the bracket
            assert!(endpoint_objective_derivative(k, n, hi * (1.0 - 1e-9)) > 0.0);
        }
    }

    #[test]
    fn x_star_regime_guard() {
        assert!(matches!(
            solve_x_star(freq(10.0), 5),
            Err(OptimizeError::RegimeViolation { .. })
        ));
    }

    #[test]
    fn x_star_beats_plain_equidistant_offsets() {
        // the offset x* is below both 1/(2n) and 1/(n+1)
        let k = freq(2.0);
        let n = 8;
        let off = solve_x_star(k, n).unwrap();
        let s_mid = endpoint_objective(k, n, 1.0 / (2.0 * n as f64));
        let s_equi = endpoint_objective(k, n, 1.0 / (n as f64 + 1.0));
        assert!(off.s_at_x_star < s_mid && off.s_at_x_star < s_equi);
    }

    #[test]
    fn regime_run_returns_exact_equidistant() {
        let cfg = OptimizerConfig::default();
        let res = optimal_nodes(freq(10.0), 26, SpaceKind::H10, &cfg);
        assert_eq!(res.status, OptimalityStatus::ProvenEquidistant);
        assert_eq!(res.lengths.len(), 27);
        assert!((res.best_radius - equidistant_error_h10(freq(10.0), 27)).abs() < 1e-18);
    }

    #[test]
    fn search_never_beats_equidistant_in_regime() {
        let cfg = OptimizerConfig {
            starts: 8,
            ..OptimizerConfig::default()
        };
        // m = 9 >= 2.6954 * 3
        let res = small_n_optimizer(freq(3.0), 9, &cfg);
        assert!(res.best_radius >= res.equidistant_radius * (1.0 - 1e-10));
        assert!(res.best_radius <= res.equidistant_radius + 1e-14);
    }

    #[test]
    fn search_beats_equidistant_below_threshold() {
        let cfg = OptimizerConfig::default();
        // m = 3 with k = 3: below threshold 8.086; equidistant is not best
        let res = small_n_optimizer(freq(3.0), 3, &cfg);
        assert_eq!(res.status, OptimalityStatus::GridCertified);
        assert!(
            res.best_radius < res.equidistant_radius * (1.0 - 1e-4),
            "{} vs {}",
            res.best_radius,
            res.equidistant_radius
        );
    }

    #[test]
    fn useless_grid_configuration_is_improved() {
        // m = |k| intervals: the equidistant objective is zero, anything
        // with off-grid lengths does better
        let cfg = OptimizerConfig::default();
        let res = small_n_optimizer(freq(4.0), 4, &cfg);
        assert!(res.best_radius < res.equidistant_radius * (1.0 - 1e-3));
    }

    #[test]
    fn h1_regime_configuration() {
        let k = freq(2.0);
        let n = 8;
        let cfg = OptimizerConfig::default();
        let res = optimal_nodes(k, n, SpaceKind::H1, &cfg);
        assert_eq!(res.status, OptimalityStatus::ProvenEquidistant);
        let off = solve_x_star(k, n).unwrap();
        assert!((res.nodes[0] - off.x_star).abs() < 1e-14);
        assert!((res.nodes[n - 1] - (1.0 - off.x_star)).abs() < 1e-14);
        // its radius never exceeds the endpoint-including equidistant rule
        assert!(res.best_radius <= equidistant_error_h1(k, n - 1) + 1e-16);
        // and matches the direct evaluation through the node set
        let ns = make_nodeset(&res.nodes, SpaceKind::H1).unwrap();
        assert!((radius_h1(k, &ns) - res.best_radius).abs() < 1e-15);
    }

    #[test]
    fn h1_below_regime_runs_search() {
        let cfg = OptimizerConfig {
            starts: 8,
            ..OptimizerConfig::default()
        };
        let res = optimal_nodes(freq(3.0), 4, SpaceKind::H1, &cfg);
        assert!(res.best_radius <= res.equidistant_radius + 1e-14);
        assert_eq!(res.lengths.len(), 5);
    }

    #[test]
    fn scan_is_monotone_beyond_frequency() {
        for &kv in &[3.0, 6.5, 10.0] {
            let k = freq(kv);
            let start = (kv.ceil() as usize).saturating_sub(1).max(1);
            let rows = scan_radius_over_n(k, start, start + 80, SpaceKind::H10);
            for w in rows.windows(2) {
                assert!(w[1].1 < w[0].1, "k={kv}: not decreasing at n={}", w[0].0);
            }
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = OptimizerConfig::default();
        let a = small_n_optimizer(freq(3.0), 5, &cfg);
        let b = small_n_optimizer(freq(3.0), 5, &cfg);
        assert_eq!(a.lengths, b.lengths);
        assert_eq!(a.best_radius.to_bits(), b.best_radius.to_bits());
    }
}
