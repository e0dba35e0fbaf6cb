//! Canonical coordinates on coadjoint orbits and symplectic sheets, the
//! transition functions completing them to a symplectic chart on T*M, and
//! reduced Hamiltonians for the two worked examples.

use crate::algebra::LieAlgebra;
use crate::dynamics::{integrate_geodesic, Method};
use crate::error::HomflowError;
use crate::poly::Poly;
use crate::scalar::ScalarMode;
use crate::smooth::{canonical_bracket, PhaseFn};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Finite-difference step for gradients of chart functions without
/// closed-form derivatives.
const FD_H: f64 = 1e-4;

fn fd4(e: &dyn Fn(f64) -> f64, c: f64) -> f64 {
    // Fourth-order central difference; with h = 1e-4 the truncation and
    // roundoff errors balance near 1e-11 even for the chart components
    // with large high-order derivatives on the admissible domain.
    (8.0 * (e(c + FD_H) - e(c - FD_H)) - (e(c + 2.0 * FD_H) - e(c - 2.0 * FD_H)))
        / (12.0 * FD_H)
}

/// Build a `PhaseFn` from an eval closure, with a finite-difference gradient.
pub fn phase_fn_fd(
    m: usize,
    eval: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
) -> PhaseFn {
    let e: std::sync::Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync> =
        std::sync::Arc::new(eval);
    let e2 = e.clone();
    PhaseFn::new(m, move |x: &[f64], p: &[f64]| e(x, p), move |x, p| {
        let mut gx = vec![0.0; m];
        let mut gp = vec![0.0; m];
        for a in 0..m {
            gx[a] = fd4(
                &|t| {
                    let mut xv = x.to_vec();
                    xv[a] = t;
                    e2(&xv, p)
                },
                x[a],
            );
            gp[a] = fd4(
                &|t| {
                    let mut pv = p.to_vec();
                    pv[a] = t;
                    e2(x, &pv)
                },
                p[a],
            );
        }
        (gx, gp)
    })
}

// ---------------------------------------------------------------------------
// Orbit charts: Darboux coordinates (q, π) on the K-orbit through λ(j)
// ---------------------------------------------------------------------------

/// Darboux coordinates on a coadjoint orbit: the map (q, π; j) → P.
pub struct OrbitChart {
    /// Coalgebra dimension.
    pub n: usize,
    /// Number of canonical pairs (q, π) on the orbit.
    pub dim_q: usize,
    /// Number of orbit parameters j.
    pub dim_j: usize,
    components: Vec<Box<dyn Fn(&[f64], &[f64], &[f64]) -> f64 + Send + Sync>>,
}

impl OrbitChart {
    pub fn eval(&self, q: &[f64], pi: &[f64], j: &[f64]) -> Vec<f64> {
        assert_eq!(q.len(), self.dim_q);
        assert_eq!(pi.len(), self.dim_q);
        assert_eq!(j.len(), self.dim_j);
        self.components.iter().map(|f| f(q, pi, j)).collect()
    }
}

/// Orbit-chart components as `PhaseFn`s of (q, π) with the parameters j
/// frozen. Used for bracket verification.
pub fn sec4_orbit_phase_fns(j: f64) -> Vec<PhaseFn> {
    let mk = |f: fn(&[f64], &[f64], f64) -> f64| {
        phase_fn_fd(2, move |q: &[f64], pi: &[f64]| f(q, pi, j))
    };
    vec![
        mk(|q, _pi, _j| q[0]),
        mk(|q, _pi, _j| -q[1]),
        mk(|q, pi, _j| q[0] * pi[1]),
        mk(|q, pi, _j| -q[1] * pi[1] + q[0] * pi[0]),
        mk(|q, pi, j| q[1] * pi[0] + j / (q[0] * q[0])),
    ]
}

/// The five-dimensional example: P(q, π; j) on the orbit through
/// λ = (1, 0, 0, 0, j).
pub fn sec4_orbit_chart() -> OrbitChart {
    OrbitChart {
        n: 5,
        dim_q: 2,
        dim_j: 1,
        components: vec![
            Box::new(|q, _pi, _j| q[0]),
            Box::new(|q, _pi, _j| -q[1]),
            Box::new(|q, pi, _j| q[0] * pi[1]),
            Box::new(|q, pi, _j| -q[1] * pi[1] + q[0] * pi[0]),
            Box::new(|q, pi, j| q[1] * pi[0] + j[0] / (q[0] * q[0])),
        ],
    }
}

/// The wild example: P(q, π; j1, j2, j3) on the two-dimensional orbit.
pub fn sec5_orbit_chart(alpha: f64) -> OrbitChart {
    OrbitChart {
        n: 5,
        dim_q: 1,
        dim_j: 3,
        components: vec![
            Box::new(|_q, pi, _j| pi[0]),
            Box::new(|q, _pi, j| j[0] * q[0].sin()),
            Box::new(|q, _pi, j| j[0] * q[0].cos()),
            Box::new(move |q, _pi, j| alpha * j[1] * (j[2] + alpha * q[0]).sin()),
            Box::new(move |q, _pi, j| j[1] * (j[2] + alpha * q[0]).cos()),
        ],
    }
}

pub fn sec5_orbit_phase_fns(alpha: f64, j: [f64; 3]) -> Vec<PhaseFn> {
    vec![
        phase_fn_fd(1, |_q: &[f64], pi: &[f64]| pi[0]),
        phase_fn_fd(1, move |q: &[f64], _pi: &[f64]| j[0] * q[0].sin()),
        phase_fn_fd(1, move |q: &[f64], _pi: &[f64]| j[0] * q[0].cos()),
        phase_fn_fd(1, move |q: &[f64], _pi: &[f64]| {
            alpha * j[1] * (j[2] + alpha * q[0]).sin()
        }),
        phase_fn_fd(1, move |q: &[f64], _pi: &[f64]| j[1] * (j[2] + alpha * q[0]).cos()),
    ]
}

/// Worst residual of {P_A, P_B} − C_AB^C P_C over `npoints` random chart
/// points, with the canonical bracket taken in (q, π).
pub fn intertwining_residual(
    fns_at: &dyn Fn(&mut ChaCha8Rng) -> (Vec<PhaseFn>, Vec<f64>, Vec<f64>),
    alg: &LieAlgebra,
    seed: u64,
    npoints: usize,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..npoints {
        let (fns, q, pi) = fns_at(&mut rng);
        let pvals: Vec<f64> = fns.iter().map(|f| f.eval(&q, &pi)).collect();
        for a in 0..alg.n {
            for b in (a + 1)..alg.n {
                let lhs = canonical_bracket(&fns[a], &fns[b], &q, &pi);
                let rhs: f64 = (0..alg.n).map(|c| alg.c_f64(a, b, c) * pvals[c]).sum();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    worst
}

pub fn sec4_intertwining_residual(seed: u64, npoints: usize) -> f64 {
    let alg = crate::algebra::sec4_algebra();
    intertwining_residual(
        &|rng: &mut ChaCha8Rng| {
            let j = rng.gen_range(-2.0..2.0);
            let q = vec![rng.gen_range(0.3..2.0), rng.gen_range(-2.0..2.0)];
            let pi = vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            (sec4_orbit_phase_fns(j), q, pi)
        },
        &alg,
        seed,
        npoints,
    )
}

pub fn sec5_intertwining_residual(alpha: f64, seed: u64, npoints: usize) -> f64 {
    let alg = crate::algebra::sec5_algebra(alpha);
    intertwining_residual(
        &move |rng: &mut ChaCha8Rng| {
            let j = [
                rng.gen_range(0.3..2.0),
                rng.gen_range(0.3..2.0),
                rng.gen_range(-2.0..2.0),
            ];
            let q = vec![rng.gen_range(-2.0..2.0)];
            let pi = vec![rng.gen_range(-2.0..2.0)];
            (sec5_orbit_phase_fns(alpha, j), q, pi)
        },
        &alg,
        seed,
        npoints,
    )
}

/// Exact symbolic check that the Casimir K = P1 P2 P4 + P1² P5 − P2² P3
/// restricted to the orbit chart equals the orbit parameter j.
///
/// The only non-polynomial component is P5 = q2 π1 + j/q1²; the product
/// P1² P5 = q1² q2 π1 + j is polynomial, so K is computed exactly in the
/// variables (q1, q2, π1, π2, j).
pub fn sec4_casimir_is_orbit_parameter() -> bool {
    let var = |i: usize| Poly::var(i, 5, ScalarMode::Exact);
    let (q1, q2, pi1, pi2, j) = (var(0), var(1), var(2), var(3), var(4));
    let p1 = q1.clone();
    let p2 = q2.neg();
    let p3 = q1.mul(&pi2);
    let p4 = q2.mul(&pi2).neg().add(&q1.mul(&pi1));
    let p1sq_p5 = q1.mul(&q1).mul(&q2).mul(&pi1).add(&j);
    let k = p1.mul(&p2).mul(&p4).add(&p1sq_p5).sub(&p2.mul(&p2).mul(&p3));
    k.sub(&j).is_zero_exact()
}

/// Symbolic check of the wild-example Casimir relations κ(j):
/// K1 = j1, K2 = α j2 hold exactly by construction of the polar radii;
/// verified numerically here together with K3 = j3.
pub fn sec5_casimir_map_residual(alpha: f64, seed: u64, npoints: usize) -> f64 {
    let chart = sec5_orbit_chart(alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..npoints {
        let j = [
            rng.gen_range(0.3..2.0),
            rng.gen_range(0.3..2.0),
            rng.gen_range(0.1..2.0),
        ];
        let q = [rng.gen_range(-0.5..0.5)];
        let pi = [rng.gen_range(-2.0..2.0)];
        let p = chart.eval(&q, &pi, &j);
        let (k1, k2, k3) = crate::dynamics::casimir_values(&p, alpha).unwrap();
        worst = worst
            .max((k1 - j[0]).abs())
            .max((k2 - alpha * j[1]).abs())
            .max((k3 - crate::dynamics::wrap_2pi(j[2])).abs());
    }
    worst
}

// ---------------------------------------------------------------------------
// Sheet chart (five-dimensional example)
// ---------------------------------------------------------------------------

/// Canonical coordinates on the symplectic sheet {a1 a3 = j}:
/// a1 = u, a2 = −u v, a3 = j/u.
pub fn sec4_sheet_chart(u: f64, v: f64, j: f64) -> [f64; 3] {
    [u, -u * v, j / u]
}

/// Verify that the sheet chart realizes the function-algebra relations
/// {a1, a2} = a1, {a1, a3} = 0, {a2, a3} = a3 under the canonical bracket
/// in the pair (u, v), and that Z = a1 a3 = j. Returns the worst residual.
pub fn sec4_sheet_relations_residual(seed: u64, npoints: usize) -> f64 {
    let mk = |f: fn(&[f64], &[f64], f64) -> f64, j: f64| {
        phase_fn_fd(1, move |u: &[f64], v: &[f64]| f(u, v, j))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..npoints {
        let j = rng.gen_range(-2.0..2.0);
        let a1 = mk(|u, _v, _j| u[0], j);
        let a2 = mk(|u, v, _j| -u[0] * v[0], j);
        let a3 = mk(|u, _v, j| j / u[0], j);
        let uq = vec![rng.gen_range(0.3..2.0)];
        let vp = vec![rng.gen_range(-2.0..2.0)];
        let vals = [a1.eval(&uq, &vp), a2.eval(&uq, &vp), a3.eval(&uq, &vp)];
        worst = worst
            .max((canonical_bracket(&a1, &a2, &uq, &vp) - vals[0]).abs())
            .max(canonical_bracket(&a1, &a3, &uq, &vp).abs())
            .max((canonical_bracket(&a2, &a3, &uq, &vp) - vals[2]).abs())
            .max((vals[0] * vals[2] - j).abs());
    }
    worst
}

// ---------------------------------------------------------------------------
// Transition functions: the implicit chart (x, p) → (q, π, u, v, j, τ)
// ---------------------------------------------------------------------------

/// One pairwise canonical-bracket check of a transition chart.
#[derive(Clone, Debug)]
pub struct BracketCheck {
    pub label: String,
    pub expected: f64,
    pub max_residual: f64,
    pub pass: bool,
    /// True for relations known to fail for the as-stated chart function;
    /// reported but excluded from the pass/fail gate.
    pub documented_discrepancy: bool,
}

#[derive(Clone, Debug)]
pub struct TransitionReport {
    pub checks: Vec<BracketCheck>,
    pub tol: f64,
}

impl TransitionReport {
    /// All checks pass except those flagged as documented discrepancies.
    pub fn all_required_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass || c.documented_discrepancy)
    }

    pub fn failures(&self) -> Vec<&BracketCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn run_battery(
    fns: &[(String, PhaseFn)],
    expected: &dyn Fn(usize, usize) -> f64,
    discrepancy: &dyn Fn(usize, usize) -> bool,
    points: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
) -> TransitionReport {
    let mut checks = Vec::new();
    for a in 0..fns.len() {
        for b in (a + 1)..fns.len() {
            let want = expected(a, b);
            let mut worst: f64 = 0.0;
            for (x, p) in points {
                let got = canonical_bracket(&fns[a].1, &fns[b].1, x, p);
                worst = worst.max((got - want).abs());
            }
            checks.push(BracketCheck {
                label: format!("{{{}, {}}}", fns[a].0, fns[b].0),
                expected: want,
                max_residual: worst,
                pass: worst < tol,
                documented_discrepancy: discrepancy(a, b),
            });
        }
    }
    TransitionReport { checks, tol }
}

/// Sheet parameter of the five-dimensional example, j_sheet = L1 L3
/// (the value of Z = a1 a3 on the corresponding sheet). This equals
/// −K(X(x, p)); the chart function `j` below uses the Casimir side.
pub fn sec4_sheet_parameter() -> PhaseFn {
    phase_fn_fd(4, |x: &[f64], p: &[f64]| {
        let l1 = -x[3].exp() * (x[2] * p[0] + p[1]);
        let l3 = (-x[3]).exp() * (p[0] * p[3] - x[2] * p[0] * p[2] - p[1] * p[2]);
        l1 * l3
    })
}

/// The implicit chart functions of the five-dimensional example as
/// functions on T*M. Order: q1, q2, π1, π2, u, v, j, T, T_as_stated.
///
/// j is the Casimir-side parameter j = K(X(x, p)). The transition
/// function satisfying the conjugacy battery is T = [p1(p1 x3 + p2)]⁻¹;
/// the stated form [p1²(p1 x3 + p2)]⁻¹ carries an extra factor p1 and
/// fails {j, T} = 1 (it yields 1/p1). It is kept as a documented
/// discrepancy row.
pub fn sec4_chart_functions() -> Vec<(String, PhaseFn)> {
    let x4f = |x: &[f64], p: &[f64]| -x[0] * p[0] + x[1] * p[1] - 2.0 * x[2] * p[2] + p[3];
    let l1 = |x: &[f64], p: &[f64]| -x[3].exp() * (x[2] * p[0] + p[1]);
    let kx = move |x: &[f64], p: &[f64]| {
        let x1 = p[0];
        let x2 = p[1];
        let x3 = x[1] * p[0] + p[2];
        let x4 = x4f(x, p);
        let x5 = x[0] * p[1] - x[2] * x[2] * p[2] + x[2] * p[3];
        x1 * x2 * x4 + x1 * x1 * x5 - x2 * x2 * x3
    };
    vec![
        ("q1".into(), phase_fn_fd(4, |_x: &[f64], p: &[f64]| p[0])),
        ("q2".into(), phase_fn_fd(4, |_x: &[f64], p: &[f64]| -p[1])),
        (
            "pi1".into(),
            phase_fn_fd(4, move |x: &[f64], p: &[f64]| {
                let pi2 = (x[1] * p[0] + p[2]) / p[0];
                (x4f(x, p) + (-p[1]) * pi2) / p[0]
            }),
        ),
        (
            "pi2".into(),
            phase_fn_fd(4, |x: &[f64], p: &[f64]| (x[1] * p[0] + p[2]) / p[0]),
        ),
        ("u".into(), phase_fn_fd(4, l1)),
        ("v".into(), phase_fn_fd(4, move |x: &[f64], p: &[f64]| p[3] / l1(x, p))),
        ("j".into(), phase_fn_fd(4, kx)),
        (
            "T".into(),
            phase_fn_fd(4, |x: &[f64], p: &[f64]| 1.0 / (p[0] * (p[0] * x[2] + p[1]))),
        ),
        (
            "T_as_stated".into(),
            phase_fn_fd(4, |x: &[f64], p: &[f64]| {
                1.0 / (p[0] * p[0] * (p[0] * x[2] + p[1]))
            }),
        ),
    ]
}

/// Canonical-relation battery of the five-dimensional chart:
/// {π_a, q^b} = δ_a^b, {v, u} = 1, {j, T} = 1, all other pairs vanish.
/// Rows involving the as-stated T are reported as documented
/// discrepancies.
pub fn sec4_transition_report(seed: u64, npoints: usize, tol: f64) -> TransitionReport {
    let fns = sec4_chart_functions();
    // Index pairs with nonzero expected bracket. Orientation: momenta act
    // first, {p, x} = +1.
    let expected = |a: usize, b: usize| -> f64 {
        match (a, b) {
            (0, 2) => -1.0, // {q1, pi1} = −{pi1, q1}
            (1, 3) => -1.0,
            (4, 5) => -1.0, // {u, v} = −1, i.e. {v, u} = 1
            (6, 7) | (6, 8) => 1.0, // {j, T} = 1
            _ => 0.0,
        }
    };
    let discrepancy = |a: usize, b: usize| a == 8 || b == 8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(npoints);
    while points.len() < npoints {
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let p: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.5..1.5)).collect();
        // Stay away from the chart's singular loci.
        if p[0].abs() < 0.4 {
            continue;
        }
        if (p[0] * x[2] + p[1]).abs() < 0.4 {
            continue;
        }
        if (x[2] * p[0] + p[1]).abs() < 0.4 {
            continue;
        }
        points.push((x, p));
    }
    run_battery(&fns, &expected, &discrepancy, &points, tol)
}

/// The implicit chart functions of the wild example as functions on T*M.
/// Order: q, π, j1, j2, j3, T1, T2, T3.
///
/// T3 is encoded exactly as stated, T3 = α x4² p1 − x1 p4 / α; its
/// conjugacy relations {j3, T3} = 1 and {j2, T3} = 0 fail for this form
/// and are reported as documented discrepancies.
pub fn sec5_chart_functions(alpha: f64) -> Vec<(String, PhaseFn)> {
    let a = alpha;
    vec![
        ("q".into(), phase_fn_fd(4, |_x: &[f64], p: &[f64]| p[1].atan2(p[2]))),
        (
            "pi".into(),
            phase_fn_fd(4, move |x: &[f64], p: &[f64]| {
                x[2] * p[1] - x[1] * p[2] + x[0] * p[3] - a * a * x[3] * p[0]
            }),
        ),
        (
            "j1".into(),
            phase_fn_fd(4, |_x: &[f64], p: &[f64]| (p[1] * p[1] + p[2] * p[2]).sqrt()),
        ),
        (
            "j2".into(),
            phase_fn_fd(4, move |_x: &[f64], p: &[f64]| {
                (p[0] * p[0] + p[3] * p[3] / (a * a)).sqrt()
            }),
        ),
        (
            "j3".into(),
            phase_fn_fd(4, move |_x: &[f64], p: &[f64]| {
                p[3].atan2(a * p[0]) - a * p[1].atan2(p[2])
            }),
        ),
        (
            "T1".into(),
            phase_fn_fd(4, |x: &[f64], p: &[f64]| {
                (x[1] * p[1] + x[2] * p[2]) / (p[1] * p[1] + p[2] * p[2]).sqrt()
            }),
        ),
        (
            "T2".into(),
            phase_fn_fd(4, move |x: &[f64], p: &[f64]| {
                (x[0] * p[0] + x[3] * p[3]) / (p[0] * p[0] + p[3] * p[3] / (a * a)).sqrt()
            }),
        ),
        (
            "T3".into(),
            phase_fn_fd(4, move |x: &[f64], p: &[f64]| {
                a * x[3] * x[3] * p[0] - x[0] * p[3] / a
            }),
        ),
    ]
}

/// Canonical-relation battery of the wild-example chart:
/// {π, q} = 1, {j_k, T^m} = δ_k^m, everything else vanishes. The T3
/// relations are reported with `documented_discrepancy` set.
pub fn sec5_transition_report(
    alpha: f64,
    seed: u64,
    npoints: usize,
    tol: f64,
) -> TransitionReport {
    let fns = sec5_chart_functions(alpha);
    let expected = |a: usize, b: usize| -> f64 {
        match (a, b) {
            (0, 1) => -1.0, // {q, π} = −1 ⇔ {π, q} = 1
            (2, 5) | (3, 6) | (4, 7) => 1.0, // {j_k, T^k} = 1
            _ => 0.0,
        }
    };
    // Every relation involving T3 (index 7) that fails does so because of
    // the as-stated form of T3.
    let discrepancy = |a: usize, b: usize| a == 7 || b == 7;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(npoints);
    while points.len() < npoints {
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let p: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.5..1.5)).collect();
        // Keep both radii and both atan2 denominators well defined.
        if (p[1] * p[1] + p[2] * p[2]).sqrt() < 0.4 {
            continue;
        }
        if (p[0] * p[0] + p[3] * p[3] / (alpha * alpha)).sqrt() < 0.4 {
            continue;
        }
        points.push((x, p));
    }
    run_battery(&fns, &expected, &discrepancy, &points, tol)
}

// ---------------------------------------------------------------------------
// Reduced Hamiltonians
// ---------------------------------------------------------------------------

/// Reduced Hamiltonian of the five-dimensional example:
/// H̃(u, v; j) = (c1 u² + c2 u² v² − c3 u² v + c4 j / u) / 2.
pub fn sec4_reduced_hamiltonian(c: [f64; 4], j: f64, u: f64, v: f64) -> f64 {
    0.5 * (c[0] * u * u + c[1] * u * u * v * v - c[2] * u * u * v + c[3] * j / u)
}

/// Reduced flow of the five-dimensional example:
/// du/dt = ∂H̃/∂v, dv/dt = −∂H̃/∂u, dτ/dt = c4 / u.
pub fn sec4_reduced_rhs(c: [f64; 4], j: f64, y: &[f64]) -> Vec<f64> {
    let (u, v) = (y[0], y[1]);
    let dh_dv = 0.5 * (2.0 * c[1] * u * u * v - c[2] * u * u);
    let dh_du =
        0.5 * (2.0 * c[0] * u + 2.0 * c[1] * u * v * v - 2.0 * c[2] * u * v - c[3] * j / (u * u));
    vec![dh_dv, -dh_du, c[3] / u]
}

/// Integrate the reduced (u, v, τ) system with RK4.
pub fn sec4_reduced_trajectory(
    c: [f64; 4],
    j: f64,
    u0: f64,
    v0: f64,
    dt: f64,
    t_final: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), HomflowError> {
    let nsteps = (t_final / dt).round() as usize;
    let mut y = vec![u0, v0, 0.0];
    let mut times = Vec::with_capacity(nsteps + 1);
    let mut states = Vec::with_capacity(nsteps + 1);
    for i in 0..=nsteps {
        let t = i as f64 * dt;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(HomflowError::NonfiniteState(t));
        }
        times.push(t);
        states.push(y.clone());
        if i < nsteps {
            let f = |y: &[f64]| sec4_reduced_rhs(c, j, y);
            let k1 = f(&y);
            let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * dt * k).collect();
            let k2 = f(&y2);
            let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * dt * k).collect();
            let k3 = f(&y3);
            let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + dt * k).collect();
            let k4 = f(&y4);
            y = (0..3)
                .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect();
        }
    }
    Ok((times, states))
}

/// Drift summary of a full-versus-reduced flow comparison.
#[derive(Clone, Debug)]
pub struct ReducedFlowReport {
    /// Max |u_full(t) − u_reduced(t)| over the run.
    pub u_mismatch: f64,
    /// Max |v_full(t) − v_reduced(t)| over the run.
    pub v_mismatch: f64,
    /// Max drift of each conserved chart coordinate along the full flow.
    pub conserved_drift: Vec<(String, f64)>,
    pub h_drift: f64,
}

/// Integrate the full invariant Hamiltonian flow of the five-dimensional
/// example and compare with the reduced (u, v) system.
pub fn sec4_reduced_flow_check(
    c: [f64; 4],
    x0: &[f64],
    p0: &[f64],
    dt: f64,
    t_final: f64,
) -> Result<ReducedFlowReport, HomflowError> {
    let inv = crate::realization::sec4_invariants();
    let h = crate::realization::invariant_hamiltonian(&inv, c);
    let traj = integrate_geodesic(&h, x0, p0, dt, t_final, Method::Rk4)?;
    let fns = sec4_chart_functions();
    let series = |name: &str| -> Vec<f64> {
        let f = &fns.iter().find(|(n, _)| n == name).unwrap().1;
        traj.xs.iter().zip(&traj.ps).map(|(x, p)| f.eval(x, p)).collect()
    };
    let u_full = series("u");
    let v_full = series("v");
    let j0 = sec4_sheet_parameter().eval(&traj.xs[0], &traj.ps[0]);
    let (_, reduced) = sec4_reduced_trajectory(c, j0, u_full[0], v_full[0], dt, t_final)?;
    let u_mismatch = u_full
        .iter()
        .zip(&reduced)
        .map(|(a, r)| (a - r[0]).abs())
        .fold(0.0, f64::max);
    let v_mismatch = v_full
        .iter()
        .zip(&reduced)
        .map(|(a, r)| (a - r[1]).abs())
        .fold(0.0, f64::max);
    let mut conserved_drift = Vec::new();
    for name in ["q1", "q2", "pi1", "pi2", "j"] {
        let s = series(name);
        let drift = s.iter().map(|v| (v - s[0]).abs()).fold(0.0, f64::max);
        conserved_drift.push((name.to_string(), drift));
    }
    let h_series: Vec<f64> =
        traj.xs.iter().zip(&traj.ps).map(|(x, p)| h.eval(x, p)).collect();
    let h_drift = h_series.iter().map(|v| (v - h_series[0]).abs()).fold(0.0, f64::max);
    Ok(ReducedFlowReport { u_mismatch, v_mismatch, conserved_drift, h_drift })
}

/// Coefficients of the wild-example reduced Hamiltonian
/// H̃ = G¹¹ π²/2 + A(q, j) π + B(q, j)/2, obtained by substituting the
/// orbit chart into H = (1/2) G^{AB} P_A P_B.
pub fn sec5_reduced_coefficients(
    g: &nalgebra::DMatrix<f64>,
    alpha: f64,
    q: f64,
    j: [f64; 3],
) -> (f64, f64) {
    let chart = sec5_orbit_chart(alpha);
    let p = chart.eval(&[q], &[0.0], &j);
    // A = Σ_{B>1} G^{1B} P_B (π-linear part), B = Σ_{A,B>1} G^{AB} P_A P_B.
    let mut a = 0.0;
    let mut b = 0.0;
    for bi in 1..5 {
        a += 0.5 * (g[(0, bi)] + g[(bi, 0)]) * p[bi];
        for ai in 1..5 {
            b += g[(ai, bi)] * p[ai] * p[bi];
        }
    }
    (a, b)
}

/// A(q, j) exactly as displayed: the G¹⁴ term appears without the factor
/// α that the orbit-chart substitution produces.
pub fn sec5_a_displayed(g: &nalgebra::DMatrix<f64>, alpha: f64, q: f64, j: [f64; 3]) -> f64 {
    let w = j[2] + alpha * q;
    j[0] * (g[(0, 2)] * q.cos() + g[(0, 1)] * q.sin())
        + j[1] * (g[(0, 4)] * w.cos() + g[(0, 3)] * w.sin())
}

/// B(q, j) exactly as displayed: the G²⁴ term carries
/// cos(j3+αq−q) + cos(j3+αq+q) where the substitution gives a minus sign
/// on the second cosine.
pub fn sec5_b_displayed(g: &nalgebra::DMatrix<f64>, alpha: f64, q: f64, j: [f64; 3]) -> f64 {
    let w = j[2] + alpha * q;
    let (j1, j2) = (j[0], j[1]);
    0.5 * j2 * j2 * alpha * alpha * g[(3, 3)] * (1.0 - (2.0 * w).cos())
        + alpha * j1 * j2 * g[(2, 3)] * ((w + q).sin() + (w - q).sin())
        + j1 * j1 * g[(1, 2)] * (2.0 * q).sin()
        + alpha * j1 * j2 * g[(1, 3)] * ((w - q).cos() + (w + q).cos())
        + 0.5 * j1 * j1 * (g[(1, 1)] + g[(2, 2)])
        - 0.5 * j1 * j1 * (g[(1, 1)] - g[(2, 2)]) * (2.0 * q).cos()
        + 0.5 * j2 * j2 * g[(4, 4)] * (1.0 + (2.0 * w).cos())
        + alpha * j2 * j2 * g[(3, 4)] * (2.0 * w).sin()
        + j1 * j2 * g[(1, 4)] * ((w + q).sin() - (w - q).sin())
        + j1 * j2 * g[(2, 4)] * ((w + q).cos() + (w - q).cos())
}

/// Discrepancy report between the displayed A, B coefficient formulas and
/// the exact orbit-chart substitution.
#[derive(Clone, Debug)]
pub struct CoefficientReport {
    pub a_max_discrepancy: f64,
    pub b_max_discrepancy: f64,
    /// Residual of A after correcting the G¹⁴ term with the factor α.
    pub a_corrected_residual: f64,
    /// Residual of B after flipping the sign of the cos(j3+αq+q) term in
    /// the G²⁴ line.
    pub b_corrected_residual: f64,
}

pub fn sec5_coefficient_report(
    g: &nalgebra::DMatrix<f64>,
    alpha: f64,
    seed: u64,
    npoints: usize,
) -> CoefficientReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CoefficientReport {
        a_max_discrepancy: 0.0,
        b_max_discrepancy: 0.0,
        a_corrected_residual: 0.0,
        b_corrected_residual: 0.0,
    };
    for _ in 0..npoints {
        let q = rng.gen_range(-3.0..3.0);
        let j = [
            rng.gen_range(0.3..2.0),
            rng.gen_range(0.3..2.0),
            rng.gen_range(-3.0..3.0),
        ];
        let (a_exact, b_exact) = sec5_reduced_coefficients(g, alpha, q, j);
        let a_disp = sec5_a_displayed(g, alpha, q, j);
        let b_disp = sec5_b_displayed(g, alpha, q, j);
        let w = j[2] + alpha * q;
        let a_fix = a_disp + (alpha - 1.0) * j[1] * g[(0, 3)] * w.sin();
        let b_fix = b_disp - 2.0 * j[0] * j[1] * g[(1, 3)] * alpha * (w + q).cos();
        rep.a_max_discrepancy = rep.a_max_discrepancy.max((a_disp - a_exact).abs());
        rep.b_max_discrepancy = rep.b_max_discrepancy.max((b_disp - b_exact).abs());
        rep.a_corrected_residual = rep.a_corrected_residual.max((a_fix - a_exact).abs());
        rep.b_corrected_residual = rep.b_corrected_residual.max((b_fix - b_exact).abs());
    }
    rep
}

/// The wild-example reduced Hamiltonian H̃(q, π; j) from the exact
/// substitution.
pub fn sec5_reduced_hamiltonian(
    g: &nalgebra::DMatrix<f64>,
    alpha: f64,
    j: [f64; 3],
    q: f64,
    pi: f64,
) -> f64 {
    let (a, b) = sec5_reduced_coefficients(g, alpha, q, j);
    0.5 * g[(0, 0)] * pi * pi + a * pi + 0.5 * b
}

/// Integrate the full wild-example geodesic flow and compare with the
/// reduced (q, π) system on the orbit.
pub fn sec5_reduced_flow_check(
    g: &nalgebra::DMatrix<f64>,
    alpha: f64,
    x0: &[f64],
    p0: &[f64],
    dt: f64,
    t_final: f64,
) -> Result<ReducedFlowReport, HomflowError> {
    let fields = crate::realization::sec5_fields(alpha);
    let gm = crate::homspace::MetricForm { g: g.clone() };
    let hpoly = fields.central_hamiltonian_poly(&gm);
    let h = PhaseFn::from_poly(&hpoly);
    let traj = integrate_geodesic(&h, x0, p0, dt, t_final, Method::Rk4)?;
    let fns = sec5_chart_functions(alpha);
    let series = |name: &str| -> Vec<f64> {
        let f = &fns.iter().find(|(n, _)| n == name).unwrap().1;
        traj.xs.iter().zip(&traj.ps).map(|(x, p)| f.eval(x, p)).collect()
    };
    let q_full = series("q");
    let pi_full = series("pi");
    let j = [series("j1")[0], series("j2")[0], series("j3")[0]];
    // Reduced flow: dq/dt = ∂H̃/∂π, dπ/dt = −∂H̃/∂q (finite differences).
    let hr = |q: f64, pi: f64| sec5_reduced_hamiltonian(g, alpha, j, q, pi);
    let rhs = |y: &[f64]| -> Vec<f64> {
        let h = 1e-6;
        vec![
            (hr(y[0], y[1] + h) - hr(y[0], y[1] - h)) / (2.0 * h),
            -(hr(y[0] + h, y[1]) - hr(y[0] - h, y[1])) / (2.0 * h),
        ]
    };
    let nsteps = (t_final / dt).round() as usize;
    let mut y = vec![q_full[0], pi_full[0]];
    let mut q_red = Vec::with_capacity(nsteps + 1);
    let mut pi_red = Vec::with_capacity(nsteps + 1);
    for i in 0..=nsteps {
        q_red.push(y[0]);
        pi_red.push(y[1]);
        if i < nsteps {
            let k1 = rhs(&y);
            let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * dt * k).collect();
            let k2 = rhs(&y2);
            let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * dt * k).collect();
            let k3 = rhs(&y3);
            let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + dt * k).collect();
            let k4 = rhs(&y4);
            y = (0..2)
                .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect();
        }
    }
    // The full-flow q is an angle; compare modulo branch cuts via wrap.
    let q_mismatch = q_full
        .iter()
        .zip(&q_red)
        .map(|(a, r)| crate::dynamics::wrap_pi(a - r).abs())
        .fold(0.0, f64::max);
    let pi_mismatch = pi_full
        .iter()
        .zip(&pi_red)
        .map(|(a, r)| (a - r).abs())
        .fold(0.0, f64::max);
    let mut conserved_drift = Vec::new();
    for name in ["j1", "j2"] {
        let s = series(name);
        let drift = s.iter().map(|v| (v - s[0]).abs()).fold(0.0, f64::max);
        conserved_drift.push((name.to_string(), drift));
    }
    // j3 drifts only by branch jumps; measure modulo 2π(n − αm) via wrap.
    let s = series("j3");
    let j3_drift = s
        .iter()
        .map(|v| {
            let d = v - s[0];
            let (_, _, fit) = crate::dynamics::attribute_jump(d, alpha);
            fit
        })
        .fold(0.0, f64::max);
    conserved_drift.push(("j3".to_string(), j3_drift));
    let h_series: Vec<f64> =
        traj.xs.iter().zip(&traj.ps).map(|(x, p)| h.eval(x, p)).collect();
    let h_drift = h_series.iter().map(|v| (v - h_series[0]).abs()).fold(0.0, f64::max);
    Ok(ReducedFlowReport {
        u_mismatch: q_mismatch,
        v_mismatch: pi_mismatch,
        conserved_drift,
        h_drift,
    })
}

/// Evolution of τ for the five-dimensional example along the reduced flow,
/// τ(t) = ∫ c4 dt / u(t), returned at the trajectory sample times.
pub fn sec4_tau_evolution(states: &[Vec<f64>]) -> Vec<f64> {
    states.iter().map(|s| s[2]).collect()
}
