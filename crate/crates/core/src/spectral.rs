//! Perron root of the (optionally self-loop-free) de Bruijn adjacency matrix.
//!
//! The matrix is never stored: state `s` has an edge to `shift(s, b)` for
//! every base `b`, minus the self-loop at constant states when loops are
//! excluded.

use rayon::prelude::*;

use crate::alphabet::TauMerSpace;
use crate::error::{Error, Result};

const TOL: f64 = 1e-12;
const MAX_ITER: usize = 1_000_000;
const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone)]
pub struct Perron {
    pub lambda: f64,
    /// Right eigenvector, scaled so its largest entry is 1.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

fn apply(space: &TauMerSpace, no_loop: bool, v: &[f64], out: &mut [f64]) {
    let q = space.q;
    let row = |s: usize| -> f64 {
        let mut acc = 0.0;
        for b in 0..q {
            let t = space.shift(s, b);
            if no_loop && t == s {
                continue;
            }
            acc += v[t];
        }
        acc
    };
    if out.len() >= PAR_THRESHOLD {
        out.par_iter_mut()
            .enumerate()
            .for_each(|(s, o)| *o = row(s));
    } else {
        for (s, o) in out.iter_mut().enumerate() {
            *o = row(s);
        }
    }
}

/// Power iteration from the all-ones vector.
///
/// Stops when both the eigenvalue estimate and the max-normalized vector
/// move by less than `1e-12` between sweeps.
pub fn perron_root(space: &TauMerSpace, no_loop: bool) -> Result<Perron> {
    let n = space.n_states();
    let mut v = vec![1.0; n];
    let mut w = vec![0.0; n];
    let mut lambda_prev = f64::NAN;
    for it in 1..=MAX_ITER {
        apply(space, no_loop, &v, &mut w);
        let mx = w.iter().cloned().fold(0.0f64, f64::max);
        if mx <= 0.0 {
            return Ok(Perron {
                lambda: 0.0,
                vector: v,
                iterations: it,
            });
        }
        // v has max entry 1, so the max of Av estimates lambda
        let lambda = mx;
        let mut delta = 0.0f64;
        for (vi, wi) in v.iter_mut().zip(&w) {
            let nv = wi / mx;
            delta = delta.max((nv - *vi).abs());
            *vi = nv;
        }
        if (lambda - lambda_prev).abs() <= TOL * lambda.max(1.0) && delta <= TOL {
            return Ok(Perron {
                lambda,
                vector: v,
                iterations: it,
            });
        }
        lambda_prev = lambda;
    }
    Err(Error::NotConverged {
        what: "power iteration",
        iterations: MAX_ITER,
        residual: f64::NAN,
    })
}

/// `log_q` of the Perron root: the noiseless capacity of the constraint, per base.
pub fn noiseless_capacity(q: u32, tau: u32, no_loop: bool) -> Result<f64> {
    let space = TauMerSpace::new(q, tau)?;
    let p = perron_root(&space, no_loop)?;
    Ok(p.lambda.ln() / (q as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_graph_has_root_q() {
        for q in 2..=4 {
            for tau in 1..=5 {
                let sp = TauMerSpace::new(q, tau).unwrap();
                let p = perron_root(&sp, false).unwrap();
                assert!((p.lambda - q as f64).abs() < 1e-12);
                assert_eq!(noiseless_capacity(q, tau, false).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn binary_no_loop_tau2_is_golden_ratio() {
        let sp = TauMerSpace::new(2, 2).unwrap();
        let p = perron_root(&sp, true).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((p.lambda - phi).abs() < 1e-11);
    }

    #[test]
    fn two_regular_and_permutation_cases() {
        assert!((noiseless_capacity(3, 1, true).unwrap() - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert_eq!(noiseless_capacity(2, 1, true).unwrap(), 0.0);
    }

    #[test]
    fn eigen_equation_holds() {
        let sp = TauMerSpace::new(4, 2).unwrap();
        let p = perron_root(&sp, true).unwrap();
        let mut w = vec![0.0; sp.n_states()];
        apply(&sp, true, &p.vector, &mut w);
        for (a, b) in w.iter().zip(&p.vector) {
            assert!((a - p.lambda * b).abs() < 1e-10);
        }
        assert!(p.lambda > 3.0 && p.lambda < 4.0);
    }
}
