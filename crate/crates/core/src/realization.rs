//! Polynomial vector-field realizations of a Lie algebra on M, the moment
//! map, geodesic Hamiltonians, and the invariant-function sets of the two
//! built-in examples.

use crate::algebra::LieAlgebra;
use crate::homspace::MetricForm;
use crate::poly::{canonical_bracket_poly, Poly};
use crate::scalar::{Scalar, ScalarMode};
use crate::smooth::PhaseFn;

/// A realization of g by vector fields on M, stored as the momentum
/// functions X_A(x, p) = X_A^a(x) p_a — phase-space polynomials linear in p.
#[derive(Clone, Debug)]
pub struct PolyVectorField {
    pub m: usize,
    /// One polynomial in (x_1..x_m, p_1..p_m) per generator.
    pub components: Vec<Poly>,
}

impl PolyVectorField {
    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// Moment map μ(x, p) = (X_1(x,p), ..., X_n(x,p)).
    pub fn moment_map(&self, x: &[f64], p: &[f64]) -> Vec<f64> {
        let v: Vec<f64> = x.iter().chain(p).cloned().collect();
        self.components.iter().map(|c| c.eval(&v)).collect()
    }

    /// Geodesic Hamiltonian of a central metric,
    /// H(x, p) = (1/2) Σ G^{AB} X_A(x, p) X_B(x, p), as a polynomial.
    pub fn central_hamiltonian_poly(&self, g: &MetricForm) -> Poly {
        let n = self.n();
        let mode = self.components[0].mode;
        let mut h = Poly::zero(2 * self.m, mode);
        for a in 0..n {
            for b in a..n {
                let gv = g.g[(a, b)];
                if gv == 0.0 {
                    continue;
                }
                let factor = if a == b { gv / 2.0 } else { gv };
                let coeff = match mode {
                    ScalarMode::Float => Scalar::Float(factor),
                    ScalarMode::Exact => {
                        // exact-mode fields with a float metric forces floating
                        // coefficients; keep exactness only for metrics whose
                        // entries are integers scaled by 1/2
                        if factor.fract() == 0.0 {
                            Scalar::from_int(factor as i64)
                        } else {
                            Scalar::from_ratio((2.0 * factor) as i64, 2)
                        }
                    }
                };
                h = h.add(&self.components[a].mul(&self.components[b]).scale(&coeff));
            }
        }
        h
    }

    pub fn central_hamiltonian(&self, g: &MetricForm, x: &[f64], p: &[f64]) -> f64 {
        let mom = self.moment_map(x, p);
        let mut sum = 0.0;
        for a in 0..self.n() {
            for b in 0..self.n() {
                sum += g.g[(a, b)] * mom[a] * mom[b];
            }
        }
        0.5 * sum
    }
}

/// A failing realization pair with its residual.
#[derive(Clone, Debug)]
pub struct RealizationFailure {
    /// 1-based generator pair.
    pub pair: (usize, usize),
    pub residual: f64,
}

/// Check {X_A, X_B} = Σ_C C_{AB}^C X_C for every pair, as a polynomial
/// identity: exact in exact mode, coefficient residuals below `float_tol`
/// in floating mode.
pub fn realization_check(
    fields: &PolyVectorField,
    alg: &LieAlgebra,
    float_tol: f64,
) -> Vec<RealizationFailure> {
    let n = fields.n();
    assert_eq!(n, alg.n);
    let mut failures = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let lhs = canonical_bracket_poly(&fields.components[a], &fields.components[b], fields.m);
            let mut rhs = Poly::zero(2 * fields.m, lhs.mode);
            for (c, s) in alg.bracket_terms(a, b) {
                rhs = rhs.add(&fields.components[*c].scale(&s.clone()));
            }
            let diff = lhs.sub(&rhs);
            let bad = match lhs.mode {
                ScalarMode::Exact => !diff.is_zero_exact(),
                ScalarMode::Float => diff.max_abs_coeff() > float_tol,
            };
            if bad {
                failures.push(RealizationFailure {
                    pair: (a + 1, b + 1),
                    residual: diff.max_abs_coeff(),
                });
            }
        }
    }
    failures
}

/// A set of invariant functions L_μ(x, p) with hand-coded gradients and the
/// structure relations {L_μ, L_ν} = Ω_{μν}(L).
pub struct InvariantFunctionSet {
    pub fns: Vec<PhaseFn>,
    /// Ω_{μν}(L) evaluated on the value vector L.
    pub omega: Box<dyn Fn(usize, usize, &[f64]) -> f64 + Send + Sync>,
}

impl InvariantFunctionSet {
    pub fn eval_all(&self, x: &[f64], p: &[f64]) -> Vec<f64> {
        self.fns.iter().map(|f| f.eval(x, p)).collect()
    }
}

/// The most general quadratic invariant Hamiltonian of the first example:
/// H = (c_1 L_1² + c_2 L_2² + c_3 L_1 L_2 + c_4 L_3)/2, with the 1/2 applied
/// to the whole sum.
pub fn invariant_hamiltonian(l: &InvariantFunctionSet, c: [f64; 4]) -> PhaseFn {
    let m = l.fns[0].m;
    let fns: Vec<PhaseFn> = l.fns.clone();
    let fns2 = fns.clone();
    PhaseFn::new(
        m,
        move |x, p| {
            let l1 = fns[0].eval(x, p);
            let l2 = fns[1].eval(x, p);
            let l3 = fns[2].eval(x, p);
            0.5 * (c[0] * l1 * l1 + c[1] * l2 * l2 + c[2] * l1 * l2 + c[3] * l3)
        },
        move |x, p| {
            let l1 = fns2[0].eval(x, p);
            let l2 = fns2[1].eval(x, p);
            let (g1x, g1p) = fns2[0].grad(x, p);
            let (g2x, g2p) = fns2[1].grad(x, p);
            let (g3x, g3p) = fns2[2].grad(x, p);
            let w1 = c[0] * l1 + 0.5 * c[2] * l2;
            let w2 = c[1] * l2 + 0.5 * c[2] * l1;
            let w3 = 0.5 * c[3];
            let gx = (0..x.len())
                .map(|i| w1 * g1x[i] + w2 * g2x[i] + w3 * g3x[i])
                .collect();
            let gp = (0..p.len())
                .map(|i| w1 * g1p[i] + w2 * g2p[i] + w3 * g3p[i])
                .collect();
            (gx, gp)
        },
    )
}

// ---------------------------------------------------------------------------
// Built-in example data
// ---------------------------------------------------------------------------

fn mono_x(m: usize, xs: &[(usize, u16)], ps: &[(usize, u16)]) -> Vec<u16> {
    let mut mono = vec![0u16; 2 * m];
    for &(i, e) in xs {
        mono[i] = e;
    }
    for &(i, e) in ps {
        mono[m + i] = e;
    }
    mono
}

/// Vector fields of the unsolvable five-dimensional example (exact):
/// X1 = p1, X2 = p2, X3 = x2 p1 + p3,
/// X4 = −x1 p1 + x2 p2 − 2 x3 p3 + p4, X5 = x1 p2 − x3² p3 + x3 p4.
pub fn sec4_fields() -> PolyVectorField {
    let m = 4;
    let mode = ScalarMode::Exact;
    let one = Scalar::from_int(1);
    let mk = |terms: Vec<(Vec<u16>, Scalar)>| {
        let mut p = Poly::zero(2 * m, mode);
        for (mono, c) in terms {
            p.add_term(mono, c);
        }
        p
    };
    let x1 = mk(vec![(mono_x(m, &[], &[(0, 1)]), one.clone())]);
    let x2 = mk(vec![(mono_x(m, &[], &[(1, 1)]), one.clone())]);
    let x3 = mk(vec![
        (mono_x(m, &[(1, 1)], &[(0, 1)]), one.clone()),
        (mono_x(m, &[], &[(2, 1)]), one.clone()),
    ]);
    let x4 = mk(vec![
        (mono_x(m, &[(0, 1)], &[(0, 1)]), Scalar::from_int(-1)),
        (mono_x(m, &[(1, 1)], &[(1, 1)]), one.clone()),
        (mono_x(m, &[(2, 1)], &[(2, 1)]), Scalar::from_int(-2)),
        (mono_x(m, &[], &[(3, 1)]), one.clone()),
    ]);
    let x5 = mk(vec![
        (mono_x(m, &[(0, 1)], &[(1, 1)]), one.clone()),
        (mono_x(m, &[(2, 2)], &[(2, 1)]), Scalar::from_int(-1)),
        (mono_x(m, &[(2, 1)], &[(3, 1)]), one),
    ]);
    PolyVectorField { m, components: vec![x1, x2, x3, x4, x5] }
}

/// Vector fields of the wild example (floating, carries α²):
/// X1 = x3 p2 − x2 p3 + x1 p4 − α² x4 p1, X2 = p2, X3 = p3, X4 = p4, X5 = p1.
pub fn sec5_fields(alpha: f64) -> PolyVectorField {
    let m = 4;
    let mode = ScalarMode::Float;
    let mk = |terms: Vec<(Vec<u16>, f64)>| {
        let mut p = Poly::zero(2 * m, mode);
        for (mono, c) in terms {
            p.add_term(mono, Scalar::Float(c));
        }
        p
    };
    let x1 = mk(vec![
        (mono_x(m, &[(2, 1)], &[(1, 1)]), 1.0),
        (mono_x(m, &[(1, 1)], &[(2, 1)]), -1.0),
        (mono_x(m, &[(0, 1)], &[(3, 1)]), 1.0),
        (mono_x(m, &[(3, 1)], &[(0, 1)]), -alpha * alpha),
    ]);
    let x2 = mk(vec![(mono_x(m, &[], &[(1, 1)]), 1.0)]);
    let x3 = mk(vec![(mono_x(m, &[], &[(2, 1)]), 1.0)]);
    let x4 = mk(vec![(mono_x(m, &[], &[(3, 1)]), 1.0)]);
    let x5 = mk(vec![(mono_x(m, &[], &[(0, 1)]), 1.0)]);
    PolyVectorField { m, components: vec![x1, x2, x3, x4, x5] }
}

/// Invariant functions of the first example with closed-form gradients:
/// L1 = −e^{x4}(x3 p1 + p2), L2 = −p4,
/// L3 = e^{−x4}(p1 p4 − x3 p1 p3 − p2 p3).
/// Structure relations: {L1, L2} = L1, {L1, L3} = 0, {L2, L3} = L3.
/// (These are the relations the functions actually satisfy; they are also the
/// only ones under which Z = a1·a3 is a Casimir of the function algebra.)
pub fn sec4_invariants() -> InvariantFunctionSet {
    let m = 4;
    let l1 = PhaseFn::new(
        m,
        |x, p| -x[3].exp() * (x[2] * p[0] + p[1]),
        |x, p| {
            let e = x[3].exp();
            let val = -e * (x[2] * p[0] + p[1]);
            (vec![0.0, 0.0, -e * p[0], val], vec![-e * x[2], -e, 0.0, 0.0])
        },
    );
    let l2 = PhaseFn::new(
        m,
        |_, p| -p[3],
        |_, _| (vec![0.0; 4], vec![0.0, 0.0, 0.0, -1.0]),
    );
    let l3 = PhaseFn::new(
        m,
        |x, p| (-x[3]).exp() * (p[0] * p[3] - x[2] * p[0] * p[2] - p[1] * p[2]),
        |x, p| {
            let e = (-x[3]).exp();
            let val = e * (p[0] * p[3] - x[2] * p[0] * p[2] - p[1] * p[2]);
            (
                vec![0.0, 0.0, -e * p[0] * p[2], -val],
                vec![
                    e * (p[3] - x[2] * p[2]),
                    -e * p[2],
                    e * (-x[2] * p[0] - p[1]),
                    e * p[0],
                ],
            )
        },
    );
    InvariantFunctionSet {
        fns: vec![l1, l2, l3],
        omega: Box::new(|mu, nu, l| match (mu, nu) {
            (0, 1) => l[0],
            (1, 0) => -l[0],
            (1, 2) => l[2],
            (2, 1) => -l[2],
            _ => 0.0,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{sec4_algebra, sec5_algebra};
    use crate::smooth::canonical_bracket;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn random_point(rng: &mut ChaCha8Rng, m: usize) -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let p: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.5..1.5)).collect();
        (x, p)
    }

    #[test]
    fn sec5_bracket_of_x1_x2_is_x3() {
        let f = sec5_fields(SQRT2);
        let b = canonical_bracket_poly(&f.components[0], &f.components[1], f.m);
        let diff = b.sub(&f.components[2]);
        assert!(diff.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn realizations_satisfy_commutation_relations() {
        assert!(realization_check(&sec4_fields(), &sec4_algebra(), 1e-12).is_empty());
        assert!(realization_check(&sec5_fields(SQRT2), &sec5_algebra(SQRT2), 1e-12).is_empty());
    }

    #[test]
    fn corrupted_sec5_fields_fail_at_pair_1_4() {
        let mut f = sec5_fields(SQRT2);
        // Replace the α² coefficient by 1.
        let m = f.m;
        let mut x1 = Poly::zero(2 * m, ScalarMode::Float);
        x1.add_term(mono_x(m, &[(2, 1)], &[(1, 1)]), Scalar::Float(1.0));
        x1.add_term(mono_x(m, &[(1, 1)], &[(2, 1)]), Scalar::Float(-1.0));
        x1.add_term(mono_x(m, &[(0, 1)], &[(3, 1)]), Scalar::Float(1.0));
        x1.add_term(mono_x(m, &[(3, 1)], &[(0, 1)]), Scalar::Float(-1.0));
        f.components[0] = x1;
        let failures = realization_check(&f, &sec5_algebra(SQRT2), 1e-12);
        assert!(failures.iter().any(|fl| fl.pair == (1, 4)));
    }

    #[test]
    fn moment_map_examples() {
        // Wild example at x = 0: P_1 = X_1 = 0, so P ∈ h-perp.
        let f5 = sec5_fields(SQRT2);
        let p = [0.3, -0.7, 1.1, 0.5];
        let mom = f5.moment_map(&[0.0; 4], &p);
        assert_eq!(mom[0], 0.0);

        // First example at x = 0, p = (1,2,3,4) → P = (1,2,3,4,0).
        let f4 = sec4_fields();
        let mom4 = f4.moment_map(&[0.0; 4], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mom4, vec![1.0, 2.0, 3.0, 4.0, 0.0]);
    }

    #[test]
    fn central_hamiltonian_matches_moment_quadratic() {
        let f5 = sec5_fields(SQRT2);
        let g = MetricForm::identity(5);
        // At x = 0 the X_1 term vanishes: H = (p1²+p2²+p3²+p4²)/2.
        let p = [0.4, -1.2, 0.8, 0.3];
        let h = f5.central_hamiltonian(&g, &[0.0; 4], &p);
        let expect: f64 = p.iter().map(|v| v * v).sum::<f64>() / 2.0;
        assert!((h - expect).abs() < 1e-14);
        // p = 0 → 0.
        assert_eq!(f5.central_hamiltonian(&g, &[1.0, 2.0, 3.0, 4.0], &[0.0; 4]), 0.0);
        // Polynomial form agrees with direct evaluation at a random point.
        let hp = f5.central_hamiltonian_poly(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let (x, p) = random_point(&mut rng, 4);
            let v: Vec<f64> = x.iter().chain(&p).cloned().collect();
            assert!((hp.eval(&v) - f5.central_hamiltonian(&g, &x, &p)).abs() < 1e-12);
        }
        // Exact-mode fields: ½ Σ X_A² via the polynomial route.
        let f4 = sec4_fields();
        let g4 = MetricForm::identity(5);
        let x = [1.0, 1.0, 1.0, 1.0];
        let pp = [1.0, 0.0, 0.0, 0.0];
        let mom = f4.moment_map(&x, &pp);
        let expect4: f64 = mom.iter().map(|v| v * v).sum::<f64>() / 2.0;
        assert!((f4.central_hamiltonian(&g4, &x, &pp) - expect4).abs() < 1e-14);
    }

    #[test]
    fn invariants_commute_with_generators() {
        // {L_μ, X_A} = 0 at 100 random points, |err| < 1e-9.
        let f4 = sec4_fields();
        let inv = sec4_invariants();
        let gens: Vec<PhaseFn> = f4.components.iter().map(PhaseFn::from_poly).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let (x, p) = random_point(&mut rng, 4);
            for l in &inv.fns {
                for g in &gens {
                    let v = canonical_bracket(l, g, &x, &p);
                    assert!(v.abs() < 1e-9, "residual {v}");
                }
            }
        }
    }

    #[test]
    fn invariant_structure_relations_hold() {
        // {L1,L2} = L3, {L1,L3} = 0, {L2,L3} = L3 at 100 random points.
        let inv = sec4_invariants();
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        for _ in 0..100 {
            let (x, p) = random_point(&mut rng, 4);
            let l = inv.eval_all(&x, &p);
            for mu in 0..3 {
                for nu in 0..3 {
                    let lhs = canonical_bracket(&inv.fns[mu], &inv.fns[nu], &x, &p);
                    let rhs = (inv.omega)(mu, nu, &l);
                    assert!((lhs - rhs).abs() < 1e-9, "({mu},{nu}): {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn casimir_compatibility_z_equals_minus_k() {
        // L1 L3 = −(P1 P2 P4 + P1² P5 − P2² P3) with P = X(x, p): the sheet
        // Casimir and the orbit Casimir agree up to an overall sign. Exact
        // symbolic expansion of −L1 L3 reproduces K term by term.
        let f4 = sec4_fields();
        let inv = sec4_invariants();
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..100 {
            let (x, p) = random_point(&mut rng, 4);
            let l = inv.eval_all(&x, &p);
            let mom = f4.moment_map(&x, &p);
            let k = mom[0] * mom[1] * mom[3] + mom[0] * mom[0] * mom[4] - mom[1] * mom[1] * mom[2];
            assert!((l[0] * l[2] + k).abs() < 1e-9);
        }
    }

    #[test]
    fn invariant_hamiltonian_values_and_gradient() {
        let inv = sec4_invariants();
        // c = (1,0,0,0) with L1 = 2 → H = 2: pick a point where L1 = 2.
        // L1 = −e^{x4}(x3 p1 + p2); at x = 0, p2 = −2: L1 = 2.
        let h = invariant_hamiltonian(&inv, [1.0, 0.0, 0.0, 0.0]);
        let x = [0.0; 4];
        let p = [0.0, -2.0, 0.0, 0.0];
        assert!((h.eval(&x, &p) - 2.0).abs() < 1e-14);
        // c = (0,0,0,1) → H = L3/2.
        let h2 = invariant_hamiltonian(&inv, [0.0, 0.0, 0.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        let (x, p) = random_point(&mut rng, 4);
        let l = inv.eval_all(&x, &p);
        assert!((h2.eval(&x, &p) - 0.5 * l[2]).abs() < 1e-12);
        // Gradient against finite differences.
        let h3 = invariant_hamiltonian(&inv, [0.7, -0.4, 1.3, 0.9]);
        let (gx, gp) = h3.grad(&x, &p);
        let eps = 1e-6;
        for i in 0..4 {
            let mut xp = x.to_vec();
            xp[i] += eps;
            let mut xm = x.to_vec();
            xm[i] -= eps;
            let fd = (h3.eval(&xp, &p) - h3.eval(&xm, &p)) / (2.0 * eps);
            assert!((fd - gx[i]).abs() < 1e-6, "x[{i}]: {fd} vs {}", gx[i]);
            let mut pp2 = p.to_vec();
            pp2[i] += eps;
            let mut pm = p.to_vec();
            pm[i] -= eps;
            let fd = (h3.eval(&x, &pp2) - h3.eval(&x, &pm)) / (2.0 * eps);
            assert!((fd - gp[i]).abs() < 1e-6, "p[{i}]: {fd} vs {}", gp[i]);
        }
    }
}
