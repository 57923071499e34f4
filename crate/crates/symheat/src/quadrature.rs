//! Quadrature weights: composite Simpson on uniform grids, Gauss–Legendre panels,
//! and log-domain accumulation.

use gauss_quad::legendre::GaussLegendre;

/// Composite Simpson weights for `n` uniform nodes with spacing `h`.
/// An odd number of intervals closes with Simpson's 3/8 rule on the last three.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2, "Simpson weights need at least two nodes");
    let mut w = vec![0.0; n];
    if n == 2 {
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let intervals = n - 1;
    let simpson_end = if intervals.is_multiple_of(2) { n - 1 } else { n - 4 };
    if simpson_end >= 2 {
        for i in (0..simpson_end).step_by(2) {
            w[i] += h / 3.0;
            w[i + 1] += 4.0 * h / 3.0;
            w[i + 2] += h / 3.0;
        }
    }
    if intervals % 2 == 1 {
        let s = simpson_end;
        for (k, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[s + k] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// Corrections, in units of h, to the Simpson weights of nodes h..6h for an
/// integrand that is odd about the origin. They cancel the h⁴, h⁶ and h⁸
/// Euler–Maclaurin terms at r = 0, read off an odd interpolant of the samples.
pub const ODD_ORIGIN_CORRECTION: [f64; 6] = [
    -3_227_909.0 / 76_204_800.0,
    11_313_283.0 / 304_819_200.0,
    -6_746_833.0 / 457_228_800.0,
    860_411.0 / 228_614_400.0,
    -53_191.0 / 91_445_760.0,
    38_197.0 / 914_457_600.0,
];

/// Simpson weights with the origin corrected for an integrand that is odd at r = 0.
pub fn simpson_weights_odd_origin(n: usize, h: f64) -> Vec<f64> {
    let mut w = simpson_weights(n, h);
    if n >= 16 {
        for (j, c) in ODD_ORIGIN_CORRECTION.iter().enumerate() {
            w[j + 1] += c * h;
        }
    }
    w
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(n).expect("Gauss-Legendre degree >= 2").into_node_weight_pairs()
}

/// Nodes and weights on [0, b] from panels that double in width, starting at `first`,
/// each carrying an `order`-point Gauss–Legendre rule; a single panel covers [0, first].
pub fn geometric_panels(first: f64, b: f64, order: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(order);
    let mut out = Vec::new();
    let mut lo = 0.0;
    let mut hi = first.min(b);
    loop {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for &(x, w) in &gl {
            out.push((mid + half * x, half * w));
        }
        if hi >= b {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(b);
    }
    out
}

/// ln Σ exp(x_i), ignoring −∞ entries; −∞ for an empty or all −∞ input.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = xs.into_iter().map(|x| (x - m).exp()).sum();
    m + s.ln()
}
