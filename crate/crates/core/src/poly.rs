//! Sparse multivariate polynomials with exact-or-floating coefficients.
//!
//! Used for vector-field realizations and the symbolic canonical bracket on
//! T*M: phase-space polynomials live in 2m variables ordered
//! (x_1..x_m, p_1..p_m).

use crate::scalar::{Scalar, ScalarMode};
use std::collections::BTreeMap;
use std::fmt;

/// Monomial exponent vector, one entry per variable.
pub type Mono = Vec<u16>;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub nv: usize,
    pub mode: ScalarMode,
    pub terms: BTreeMap<Mono, Scalar>,
}

impl Poly {
    pub fn zero(nv: usize, mode: ScalarMode) -> Self {
        Poly { nv, mode, terms: BTreeMap::new() }
    }

    pub fn constant(nv: usize, c: Scalar) -> Self {
        let mode = c.mode();
        let mut p = Poly::zero(nv, mode);
        if !c.is_zero(0.0) {
            p.terms.insert(vec![0; nv], c);
        }
        p
    }

    pub fn var(i: usize, nv: usize, mode: ScalarMode) -> Self {
        let mut m = vec![0u16; nv];
        m[i] = 1;
        let mut p = Poly::zero(nv, mode);
        p.terms.insert(m, Scalar::one(mode));
        p
    }

    pub fn add_term(&mut self, mono: Mono, c: Scalar) {
        assert_eq!(mono.len(), self.nv);
        let c = c.into_mode(self.mode);
        let entry = self.terms.entry(mono).or_insert_with(|| Scalar::zero(self.mode));
        *entry = entry.clone() + c;
        self.prune();
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| !v.is_zero(0.0));
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nv, other.nv);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let e = out.terms.entry(m.clone()).or_insert_with(|| Scalar::zero(out.mode));
            *e = e.clone() + c.clone();
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero(0.0) {
            return Poly::zero(self.nv, self.mode);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c.clone();
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nv, other.nv);
        let mut out = Poly::zero(self.nv, self.mode);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mono: Mono = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                let e = out.terms.entry(mono).or_insert_with(|| Scalar::zero(out.mode));
                *e = e.clone() + ca.clone() * cb.clone();
            }
        }
        out.prune();
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nv, self.mode);
        for (m, c) in &self.terms {
            let e = m[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[i] -= 1;
            let coeff = c.clone() * Scalar::from_int(e as i64).into_mode(self.mode);
            let slot = out.terms.entry(m2).or_insert_with(|| Scalar::zero(out.mode));
            *slot = slot.clone() + coeff;
        }
        out.prune();
        out
    }

    pub fn eval(&self, vals: &[f64]) -> f64 {
        assert_eq!(vals.len(), self.nv);
        let mut sum = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t *= vals[i];
                }
            }
            sum += t;
        }
        sum
    }

    pub fn is_zero_exact(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient magnitude; zero for the zero polynomial.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { format!("v{i}") } else { format!("v{i}^{e}") })
                    .collect();
                if vars.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical Poisson bracket on T*M in the {f,g} = Σ_a f_p g_x − f_x g_p
/// orientation, as an exact polynomial identity. Variables are ordered
/// (x_1..x_m, p_1..p_m).
pub fn canonical_bracket_poly(f: &Poly, g: &Poly, m: usize) -> Poly {
    assert_eq!(f.nv, 2 * m);
    assert_eq!(g.nv, 2 * m);
    let mut out = Poly::zero(2 * m, f.mode);
    for a in 0..m {
        let term = f.diff(m + a).mul(&g.diff(a)).sub(&f.diff(a).mul(&g.diff(m + a)));
        out = out.add(&term);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_of_conjugate_pair_is_one() {
        // {p_1, x_1} = 1, {x_1, x_2} = 0 with m = 2.
        let m = 2;
        let x1 = Poly::var(0, 4, ScalarMode::Exact);
        let x2 = Poly::var(1, 4, ScalarMode::Exact);
        let p1 = Poly::var(2, 4, ScalarMode::Exact);
        let b = canonical_bracket_poly(&p1, &x1, m);
        assert_eq!(b, Poly::constant(4, Scalar::from_int(1)));
        assert!(canonical_bracket_poly(&x1, &x2, m).is_zero_exact());
    }

    #[test]
    fn differentiation_and_eval() {
        // f = 3 x^2 p, df/dx = 6 x p.
        let mut f = Poly::zero(2, ScalarMode::Exact);
        f.add_term(vec![2, 1], Scalar::from_int(3));
        let d = f.diff(0);
        assert_eq!(d.eval(&[2.0, 5.0]), 60.0);
        assert_eq!(f.eval(&[2.0, 5.0]), 60.0);
    }

    #[test]
    fn exact_cancellation() {
        let x = Poly::var(0, 2, ScalarMode::Exact);
        let y = Poly::var(1, 2, ScalarMode::Exact);
        let s = x.mul(&y).sub(&y.mul(&x));
        assert!(s.is_zero_exact());
    }
}
