//! Quadrature machinery for the exponentially weighted semi-infinite
//! integrals of the Lifshitz formula.
//!
//! The inner integral over y on [zeta, inf) carries the weight e^{-y} and an
//! integrand whose derivatives vary on the scale of zeta near the lower
//! limit (the radicals have complex branch points at distance ~zeta).  A
//! single Gauss-Laguerre rule loses accuracy there once zeta is much smaller
//! than its first node, so the integrator uses geometrically growing
//! Gauss-Legendre panels across the corner region and a shifted
//! Gauss-Laguerre rule for the smooth tail.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Compensated (Neumaier) accumulator; summation order fixed by the caller.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Nodes and weights of an n-point Gauss-Laguerre rule (weight e^{-x} on
/// [0, inf)), by Newton iteration on the Laguerre recurrence.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!((2..=150).contains(&n), "laguerre order out of supported range");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut x = 0.0;
    for i in 0..n {
        // standard initial guesses (Stroud & Secrest)
        x = if i == 0 {
            3.0 / (1.0 + 2.4 * nf)
        } else if i == 1 {
            x + 15.0 / (1.0 + 2.5 * nf)
        } else {
            let ai = (i - 1) as f64;
            x + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (x - nodes[i - 2])
        };
        for _ in 0..120 {
            let (mut l0, mut l1) = (1.0, 1.0 - x);
            for k in 2..=n {
                let kf = k as f64;
                let l2 = ((2.0 * kf - 1.0 - x) * l1 - (kf - 1.0) * l0) / kf;
                l0 = l1;
                l1 = l2;
            }
            // derivative via L_n' = n (L_n - L_{n-1})/x
            let pp = nf * (l1 - l0) / x;
            let dx = l1 / pp;
            x -= dx;
            if dx.abs() < 1e-15 * x.abs() + 1e-300 {
                break;
            }
        }
        nodes[i] = x;
        // w_i = x / ((n+1)^2 [L_{n+1}(x)]^2)
        let (mut l0, mut l1) = (1.0, 1.0 - x);
        for k in 2..=(n + 1) {
            let kf = k as f64;
            let l2 = ((2.0 * kf - 1.0 - x) * l1 - (kf - 1.0) * l0) / kf;
            l0 = l1;
            l1 = l2;
        }
        let np1 = nf + 1.0;
        weights[i] = x / (np1 * np1 * l1 * l1);
    }
    (nodes, weights)
}

fn laguerre_cache(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n).or_insert_with(|| Box::leak(Box::new(gauss_laguerre(n))))
}

fn legendre_cache() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| gauss_legendre(20))
}

/// Composite rule for integrals of the form
///     int_start^inf e^{-(y - offset)} f(y) dy
/// where f is smooth away from a corner of scale `corner_scale` at the lower
/// limit.  The `offset` keeps the weight representable when `start` is large
/// (the caller multiplies by e^{-(start-offset)}-type factors itself if it
/// chooses offset != start; the natural call uses offset = 0 so the weight
/// is exactly e^{-y}).
///
/// Panels are laid out geometrically from `corner_scale` up to
/// `start + panel_span`; the remainder uses an `n_tail`-point shifted
/// Gauss-Laguerre rule.
#[derive(Debug, Clone, Copy)]
pub struct CompositeExpRule {
    /// Number of Gauss-Laguerre nodes for the tail.
    pub n_tail: usize,
    /// Panels cover [start, start + panel_span]; 0 disables panelling.
    pub panel_span: f64,
    /// Width of the first geometric panel.
    pub first_width: f64,
}

impl CompositeExpRule {
    /// Rule for a corner of scale `corner_scale` at the interval start.
    /// Scales much larger than the span need no panels at all.
    pub fn for_corner(corner_scale: f64, n_tail: usize) -> Self {
        const SPAN: f64 = 4.0;
        if corner_scale >= 2.0 * SPAN {
            return Self { n_tail, panel_span: 0.0, first_width: 0.0 };
        }
        let w0 = (corner_scale * 0.5).clamp(5e-5, 2.0);
        Self { n_tail, panel_span: SPAN, first_width: w0 }
    }

    /// Integrates e^{-(y-start)} g(y) over [start, inf), i.e. the caller's
    /// integrand with the exponential weight factored at the lower limit.
    /// Returns the scaled value; multiply by e^{-start} (or keep reduced)
    /// as needed.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, start: f64, mut g: F) -> f64 {
        let (leg_x, leg_w) = legendre_cache();
        let mut acc = NeumaierSum::new();
        let mut b = start;
        if self.panel_span > 0.0 {
            let end = start + self.panel_span;
            let mut width = self.first_width;
            while b < end {
                let w = width.min(end - b);
                let (mid, half) = (b + 0.5 * w, 0.5 * w);
                for (&x, &wt) in leg_x.iter().zip(leg_w) {
                    let y = mid + half * x;
                    acc.add(half * wt * (-(y - start)).exp() * g(y));
                }
                b += w;
                width *= 2.0;
            }
        }
        let (lag_x, lag_w) = laguerre_cache(self.n_tail);
        let scale = (-(b - start)).exp();
        for (&x, &wt) in lag_x.iter().zip(lag_w) {
            acc.add(scale * wt * g(b + x));
        }
        acc.value()
    }
}
