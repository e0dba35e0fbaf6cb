//! Differentiable functions on the phase space T*M with closed-form
//! gradients, and the numeric canonical Poisson bracket.

use crate::poly::Poly;
use std::sync::Arc;

type EvalFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync;

/// A smooth function of (x, p) with gradient (∂/∂x, ∂/∂p).
#[derive(Clone)]
pub struct PhaseFn {
    pub m: usize,
    eval: Arc<EvalFn>,
    grad: Arc<GradFn>,
}

impl PhaseFn {
    pub fn new(
        m: usize,
        eval: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    ) -> Self {
        PhaseFn { m, eval: Arc::new(eval), grad: Arc::new(grad) }
    }

    /// Build from a phase-space polynomial in (x_1..x_m, p_1..p_m).
    pub fn from_poly(poly: &Poly) -> Self {
        assert!(poly.nv % 2 == 0);
        let m = poly.nv / 2;
        let dx: Vec<Poly> = (0..m).map(|i| poly.diff(i)).collect();
        let dp: Vec<Poly> = (0..m).map(|i| poly.diff(m + i)).collect();
        let p0 = poly.clone();
        let (dx2, dp2) = (dx, dp);
        PhaseFn::new(
            m,
            move |x, p| {
                let v: Vec<f64> = x.iter().chain(p).cloned().collect();
                p0.eval(&v)
            },
            move |x, p| {
                let v: Vec<f64> = x.iter().chain(p).cloned().collect();
                (
                    dx2.iter().map(|d| d.eval(&v)).collect(),
                    dp2.iter().map(|d| d.eval(&v)).collect(),
                )
            },
        )
    }

    pub fn eval(&self, x: &[f64], p: &[f64]) -> f64 {
        (self.eval)(x, p)
    }

    pub fn grad(&self, x: &[f64], p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (self.grad)(x, p)
    }
}

/// Canonical bracket {f, g} = Σ_a (∂f/∂p_a ∂g/∂x_a − ∂f/∂x_a ∂g/∂p_a)
/// evaluated at a phase point.
pub fn canonical_bracket(f: &PhaseFn, g: &PhaseFn, x: &[f64], p: &[f64]) -> f64 {
    let (fx, fp) = f.grad(x, p);
    let (gx, gp) = g.grad(x, p);
    let mut sum = 0.0;
    for a in 0..f.m {
        sum += fp[a] * gx[a] - fx[a] * gp[a];
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarMode;

    #[test]
    fn poly_backed_phase_fn_matches_direct_eval() {
        // f = x_1 p_2 with m = 2.
        let mut f = crate::poly::Poly::zero(4, ScalarMode::Exact);
        f.add_term(vec![1, 0, 0, 1], crate::scalar::Scalar::from_int(1));
        let pf = PhaseFn::from_poly(&f);
        assert_eq!(pf.eval(&[3.0, 0.0], &[0.0, 5.0]), 15.0);
        let (gx, gp) = pf.grad(&[3.0, 0.0], &[0.0, 5.0]);
        assert_eq!(gx, vec![5.0, 0.0]);
        assert_eq!(gp, vec![0.0, 3.0]);
    }

    #[test]
    fn bracket_orientation() {
        // {p_1, x_1} = +1 in our orientation.
        let m = 1;
        let px = PhaseFn::new(m, |x, _| x[0], |_, _| (vec![1.0], vec![0.0]));
        let pp = PhaseFn::new(m, |_, p| p[0], |_, _| (vec![0.0], vec![1.0]));
        assert_eq!(canonical_bracket(&pp, &px, &[0.3], &[0.7]), 1.0);
        assert_eq!(canonical_bracket(&px, &pp, &[0.3], &[0.7]), -1.0);
    }
}
