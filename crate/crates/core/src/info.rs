//! Elementary information-theoretic functionals on finite pmfs.
//!
//! Everything here works in nats; callers convert with [`crate::Unit`].

/// Shannon entropy in nats. Zero-probability entries contribute nothing.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Binary entropy `h(p)` in nats.
pub fn binary_entropy(p: f64) -> f64 {
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.ln();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).ln();
    }
    h
}

/// Relative entropy `D(p0 || p1)` in nats; `+inf` when `p0` puts mass where `p1` has none.
pub fn kl_divergence(p0: &[f64], p1: &[f64]) -> f64 {
    assert_eq!(p0.len(), p1.len());
    let mut d = 0.0;
    for (&a, &b) in p0.iter().zip(p1) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            d += a * (a / b).ln();
        }
    }
    d.max(0.0)
}

/// Bhattacharyya coefficient `sum_y sqrt(p0(y) p1(y))`.
pub fn bhattacharyya(p0: &[f64], p1: &[f64]) -> f64 {
    assert_eq!(p0.len(), p1.len());
    p0.iter().zip(p1).map(|(&a, &b)| (a * b).sqrt()).sum()
}

/// Result of a Chernoff-distance minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chernoff {
    /// `-min_lambda ln sum p0^(1-lambda) p1^lambda`, in nats. `+inf` for disjoint supports.
    pub distance: f64,
    /// The minimizing exponent (NaN when the supports are disjoint).
    pub lambda: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Chernoff distance between two pmfs on the same alphabet.
///
/// `lambda -> ln sum p0^(1-lambda) p1^lambda` is convex on `[0, 1]`, so a
/// golden-section search brackets the minimizer to `tol` in `lambda`.
pub fn chernoff(p0: &[f64], p1: &[f64], tol: f64) -> Chernoff {
    assert_eq!(p0.len(), p1.len());
    let common: Vec<(f64, f64)> = p0
        .iter()
        .zip(p1)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0)
        .map(|(&a, &b)| (a.ln(), b.ln()))
        .collect();
    if common.is_empty() {
        return Chernoff {
            distance: f64::INFINITY,
            lambda: f64::NAN,
        };
    }
    let f = |lam: f64| -> f64 {
        // log-sum-exp over the common support
        let terms: Vec<f64> = common
            .iter()
            .map(|&(la, lb)| (1.0 - lam) * la + lam * lb)
            .collect();
        let mx = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        mx + terms.iter().map(|t| (t - mx).exp()).sum::<f64>().ln()
    };
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let lam = 0.5 * (a + b);
    let mut best = (f(lam), lam);
    // endpoints are limits of the interior expression
    for end in [0.0, 1.0] {
        let v = f(end);
        if v < best.0 {
            best = (v, end);
        }
    }
    Chernoff {
        distance: (-best.0).max(0.0),
        lambda: best.1,
    }
}

/// Full linear convolution of two pmfs indexed from 0.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
