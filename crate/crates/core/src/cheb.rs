//! Piecewise Chebyshev representation of complex-valued functions on an
//! interval. Used to store antiderivatives and worst-case profiles so that
//! certificates can be evaluated without re-integrating the density.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Points per panel. 64 samples resolve anything the adaptive splitter
/// accepts down to coefficient tails near machine precision.
const POINTS: usize = 64;
const DEGREE: usize = POINTS - 1;

/// Relative coefficient-tail threshold for accepting a panel.
const TAIL_TOL: f64 = 1e-13;

/// Maximum number of panels in one function.
pub const MAX_CHEB_PANELS: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    /// Chebyshev coefficients c_m of sum c_m T_m(s), s in [-1, 1].
    pub coeffs: Vec<Complex64>,
}

impl Panel {
    fn from_values(a: f64, b: f64, values: &[Complex64]) -> Self {
        Panel {
            a,
            b,
            coeffs: values_to_coeffs(values),
        }
    }

    fn eval(&self, t: f64) -> Complex64 {
        let s = if self.b > self.a {
            2.0 * (t - self.a) / (self.b - self.a) - 1.0
        } else {
            0.0
        };
        clenshaw(&self.coeffs, s)
    }

    /// Integral of the panel function over [a, b].
    fn integral(&self) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, &c) in self.coeffs.iter().enumerate() {
            if m % 2 == 0 {
                total += c * (2.0 / (1.0 - (m as f64) * (m as f64)));
            }
        }
        total * (0.5 * (self.b - self.a))
    }

    /// Antiderivative coefficients with value `base` at the left edge.
    fn antiderivative(&self, base: Complex64) -> Panel {
        let n = self.coeffs.len();
        let c = &self.coeffs;
        let get = |i: usize| {
            if i < n {
                c[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
        b[1] = get(0) - get(2) * 0.5;
        for (m, bm) in b.iter_mut().enumerate().skip(2) {
            *bm = (get(m - 1) - get(m + 1)) / (2.0 * m as f64);
        }
        let half = 0.5 * (self.b - self.a);
        for bm in b.iter_mut().skip(1) {
            *bm *= half;
        }
        // anchor the value at s = -1
        let mut edge = Complex64::new(0.0, 0.0);
        for (m, &bm) in b.iter().enumerate().skip(1) {
            edge += bm * if m % 2 == 0 { 1.0 } else { -1.0 };
        }
        b[0] = base - edge;
        Panel {
            a: self.a,
            b: self.b,
            coeffs: b,
        }
    }
}

/// Chebyshev-Lobatto sample points on [a, b], left to right.
fn sample_points(a: f64, b: f64) -> Vec<f64> {
    (0..POINTS)
        .map(|j| {
            let s = -(PI * j as f64 / DEGREE as f64).cos();
            a + (b - a) * 0.5 * (s + 1.0)
        })
        .collect()
}

/// Precomputed DCT matrix: row m holds the weights turning Lobatto samples
/// into the m-th Chebyshev coefficient.
static DCT: std::sync::LazyLock<Vec<[f64; POINTS]>> = std::sync::LazyLock::new(|| {
    let n = DEGREE;
    let mut rows = Vec::with_capacity(POINTS);
    for m in 0..POINTS {
        let mut row = [0.0f64; POINTS];
        let p = if m == 0 || m == n { 1.0 } else { 2.0 };
        for (j, r) in row.iter_mut().enumerate() {
            // T_m(s_j) = cos(m * (pi - pi j / N)) since s_j = cos(pi - pi j/N)
            let angle = PI - PI * j as f64 / n as f64;
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            *r = w * (m as f64 * angle).cos() * (p / n as f64);
        }
        rows.push(row);
    }
    rows
});

/// DCT of Lobatto samples into Chebyshev coefficients.
///
/// `values[j]` is the sample at s_j = -cos(pi j / N) (ascending in s).
fn values_to_coeffs(values: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(values.len(), POINTS);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); POINTS];
    for (m, cm) in coeffs.iter_mut().enumerate() {
        let row = &DCT[m];
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &v) in values.iter().enumerate() {
            acc += v * row[j];
        }
        *cm = acc;
    }
    coeffs
}

fn clenshaw(coeffs: &[Complex64], s: f64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * s * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + s * b1 - b2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChebBudgetExceeded;

/// A function on [a, b] stored as contiguous Chebyshev panels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebFun {
    panels: Vec<Panel>,
}

impl ChebFun {
    /// Adaptive construction: panels are bisected until the high-order
    /// coefficient tail is negligible against the panel scale, or against
    /// the largest magnitude seen anywhere so far (so far-field panels of
    /// a sharply peaked function, whose values sit at denormal noise
    /// level, do not trigger endless subdivision).
    pub fn build<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
    ) -> Result<ChebFun, ChebBudgetExceeded> {
        assert!(a < b);
        let mut panels = Vec::new();
        let mut stack = vec![(a, b)];
        let mut vscale = 0.0f64;
        while let Some((pa, pb)) = stack.pop() {
            if panels.len() + stack.len() >= MAX_CHEB_PANELS {
                return Err(ChebBudgetExceeded);
            }
            let pts = sample_points(pa, pb);
            let values: Vec<Complex64> = pts.iter().map(|&t| f(t)).collect();
            let panel = Panel::from_values(pa, pb, &values);
            let scale = panel.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
            vscale = vscale.max(values.iter().fold(0.0f64, |m, v| m.max(v.norm())));
            let tail = panel.coeffs[POINTS - 3..]
                .iter()
                .fold(0.0f64, |m, c| m.max(c.norm()));
            // samples are only defined up to the rounding of their
            // positions; steep functions cannot be interpolated below
            // slope * ulp(x), so that floor joins the acceptance test
            let eps_x = 0.5 * (pa.abs() + pb.abs()) * f64::EPSILON;
            let mut slope = 0.0f64;
            for j in 1..POINTS {
                let dx = pts[j] - pts[j - 1];
                if dx > 0.0 {
                    slope = slope.max((values[j] - values[j - 1]).norm() / dx);
                }
            }
            let position_noise = 4.0 * slope * eps_x;
            let mid = 0.5 * (pa + pb);
            let resolved = scale == 0.0
                || tail <= TAIL_TOL * scale + position_noise + 1e-14 * vscale
                || scale <= 1e-280;
            if resolved || mid <= pa || mid >= pb {
                panels.push(panel);
            } else {
                // push right first so the left half is processed next
                stack.push((mid, pb));
                stack.push((pa, mid));
            }
        }
        panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
        Ok(ChebFun { panels })
    }

    pub fn a(&self) -> f64 {
        self.panels.first().map_or(0.0, |p| p.a)
    }

    pub fn b(&self) -> f64 {
        self.panels.last().map_or(0.0, |p| p.b)
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let idx = self
            .panels
            .partition_point(|p| p.b < t)
            .min(self.panels.len() - 1);
        self.panels[idx].eval(t)
    }

    pub fn integral(&self) -> Complex64 {
        self.panels
            .iter()
            .map(|p| p.integral())
            .fold(Complex64::new(0.0, 0.0), |s, v| s + v)
    }

    /// Antiderivative with value 0 at the left end, continuous across
    /// panels.
    pub fn antiderivative(&self) -> ChebFun {
        let mut out = Vec::with_capacity(self.panels.len());
        let mut base = Complex64::new(0.0, 0.0);
        for p in &self.panels {
            let ap = p.antiderivative(base);
            base += p.integral();
            out.push(ap);
        }
        ChebFun { panels: out }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> ChebFun {
        ChebFun {
            panels: self
                .panels
                .iter()
                .map(|p| Panel {
                    a: p.a,
                    b: p.b,
                    coeffs: p.coeffs.iter().map(|c| c.conj()).collect(),
                })
                .collect(),
        }
    }

    /// alpha * self + beta, pointwise.
    pub fn affine(&self, alpha: Complex64, beta: Complex64) -> ChebFun {
        ChebFun {
            panels: self
                .panels
                .iter()
                .map(|p| {
                    let mut coeffs: Vec<Complex64> = p.coeffs.iter().map(|&c| c * alpha).collect();
                    coeffs[0] += beta;
                    Panel {
                        a: p.a,
                        b: p.b,
                        coeffs,
                    }
                })
                .collect(),
        }
    }
}
