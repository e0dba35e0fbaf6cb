//! End-to-end acceptance battery: one numbered pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use homflow::algebra::{abelian, heisenberg, sec4_algebra, sec5_algebra, random_rational_vector};
use homflow::charts;
use homflow::dynamics::{self, Method};
use homflow::homspace::{basis_vector, MetricForm, SubalgebraSpec};
use homflow::realization;
use homflow::scalar::{Scalar, ScalarMode};
use homflow::smooth::PhaseFn;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const ALPHA: f64 = std::f64::consts::SQRT_2;

fn report(criterion: u32, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {status} — {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn classify_sec4() -> homflow::homspace::SpaceInvariantsReport {
    let alg = sec4_algebra();
    let sub = SubalgebraSpec::new(&alg, vec![basis_vector(5, 5, ScalarMode::Exact)]).unwrap();
    sub.classify(7).unwrap()
}

fn classify_sec5() -> homflow::homspace::SpaceInvariantsReport {
    let alg = sec5_algebra(ALPHA);
    let sub = SubalgebraSpec::new(&alg, vec![basis_vector(1, 5, ScalarMode::Float)]).unwrap();
    sub.classify(7).unwrap()
}

#[test]
fn criterion_01_invariant_tuples() {
    let start = Instant::now();
    let r4 = classify_sec4();
    let r5 = classify_sec5();
    let elapsed = start.elapsed();
    let t4 = r4.tuple();
    let t5 = r5.tuple();
    let pass = t4 == (1, 0, 0, 3, 1, 1) && t5 == (3, 0, 0, 3, 3, 0) && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        pass,
        &format!("tuples {t4:?} and {t5:?}, both classifications in {elapsed:.2?} (< 1 s)"),
    );
}

#[test]
fn criterion_02_theorem_verdicts() {
    let r4 = classify_sec4();
    let r5 = classify_sec5();
    let pass = r4.thm1_integrable
        && !r4.commutative
        && r5.thm2_integrable
        && r5.commutative;
    report(
        2,
        pass,
        &format!(
            "five-dim: thm1 {} noncommutative {}; wild: thm2 {} commutative {}",
            r4.thm1_integrable, !r4.commutative, r5.thm2_integrable, r5.commutative
        ),
    );
}

#[test]
fn criterion_03_realization() {
    let f4 = realization::realization_check(&realization::sec4_fields(), &sec4_algebra(), 0.0);
    let f5 =
        realization::realization_check(&realization::sec5_fields(ALPHA), &sec5_algebra(ALPHA), 1e-12);
    let pass = f4.is_empty() && f5.is_empty();
    report(
        3,
        pass,
        &format!(
            "all 10 pairs: five-dim exact ({} failures), wild < 1e-12 ({} failures)",
            f4.len(),
            f5.len()
        ),
    );
}

#[test]
fn criterion_04_chart_identities() {
    let k4 = charts::sec4_casimir_is_orbit_parameter();
    let i4 = charts::sec4_intertwining_residual(7, 100);
    let k5 = charts::sec5_casimir_map_residual(ALPHA, 7, 100);
    let i5 = charts::sec5_intertwining_residual(ALPHA, 7, 100);
    let pass = k4 && i4 < 1e-9 && k5 < 1e-12 && i5 < 1e-9;
    report(
        4,
        pass,
        &format!(
            "five-dim K∘P = j symbolic: {k4}, intertwining {i4:.2e} (< 1e-9); \
             wild κ residual {k5:.2e} (< 1e-12), intertwining {i5:.2e} (< 1e-9)"
        ),
    );
}

#[test]
fn criterion_05_transition_batteries() {
    let r4 = charts::sec4_transition_report(7, 100, 1e-6);
    let r5 = charts::sec5_transition_report(ALPHA, 7, 100, 1e-6);
    let t3_rows: Vec<&charts::BracketCheck> = r5
        .checks
        .iter()
        .filter(|c| c.documented_discrepancy && !c.pass)
        .collect();
    let pass = r4.all_required_pass() && r5.all_required_pass();
    report(
        5,
        pass,
        &format!(
            "five-dim battery and wild T¹/T² battery pass at 1e-6; \
             T³ as stated fails {} bracket rows (documented discrepancy: \
             corrected α x4 p1 − x1 p4/α passes)",
            t3_rows.iter().filter(|c| c.label.contains("T3")).count()
        ),
    );
}

#[test]
fn criterion_06_reduced_hamiltonian_consistency() {
    // Five-dim: H̃(u, v, j) from the sheet chart equals H(L(x, p)).
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let inv = realization::sec4_invariants();
    let names = charts::sec4_chart_functions();
    let u_fn = &names.iter().find(|(n, _)| n == "u").unwrap().1;
    let v_fn = &names.iter().find(|(n, _)| n == "v").unwrap().1;
    let j_fn = charts::sec4_sheet_parameter();
    let mut worst4: f64 = 0.0;
    for _ in 0..100 {
        let c = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let h = realization::invariant_hamiltonian(&inv, c);
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut p: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.5..1.5)).collect();
        // Keep u = L1 away from zero so the sheet chart is defined.
        while (x[2] * p[0] + p[1]).abs() < 0.3 {
            p[1] = rng.gen_range(-1.5..1.5);
        }
        let (u, v, j) = (u_fn.eval(&x, &p), v_fn.eval(&x, &p), j_fn.eval(&x, &p));
        let diff = (charts::sec4_reduced_hamiltonian(c, j, u, v) - h.eval(&x, &p)).abs();
        worst4 = worst4.max(diff);
    }

    // Wild: H̃ assembled from the coefficient formulas (displayed A and B
    // with their two documented sign/factor corrections) equals ½ PᵀGP for
    // 20 random symmetric metrics at 100 chart points each.
    let mut worst5: f64 = 0.0;
    let mut worst_coeff: f64 = 0.0;
    for gseed in 0..20u64 {
        let mut grng = ChaCha8Rng::seed_from_u64(100 + gseed);
        let mut g = DMatrix::zeros(5, 5);
        for i in 0..5 {
            for k in i..5 {
                let v = grng.gen_range(-1.0..1.0);
                g[(i, k)] = v;
                g[(k, i)] = v;
            }
        }
        let crep = charts::sec5_coefficient_report(&g, ALPHA, 7 + gseed, 100);
        worst_coeff = worst_coeff
            .max(crep.a_corrected_residual)
            .max(crep.b_corrected_residual);
        let chart = charts::sec5_orbit_chart(ALPHA);
        for _ in 0..100 {
            let q = grng.gen_range(-3.0..3.0);
            let pi = grng.gen_range(-2.0..2.0);
            let j = [
                grng.gen_range(0.3..2.0),
                grng.gen_range(0.3..2.0),
                grng.gen_range(-3.0..3.0),
            ];
            let p = chart.eval(&[q], &[pi], &j);
            let mut href = 0.0;
            for a in 0..5 {
                for b in 0..5 {
                    href += 0.5 * g[(a, b)] * p[a] * p[b];
                }
            }
            let diff = (charts::sec5_reduced_hamiltonian(&g, ALPHA, j, q, pi) - href).abs();
            worst5 = worst5.max(diff);
        }
    }
    let pass = worst4 < 1e-9 && worst5 < 1e-9 && worst_coeff < 1e-9;
    report(
        6,
        pass,
        &format!(
            "five-dim H̃ vs H∘L residual {worst4:.2e}; wild H̃ vs ½PᵀGP residual {worst5:.2e}, \
             corrected coefficient formulas residual {worst_coeff:.2e} (all < 1e-9; the A \
             formula as displayed needs the documented factor α on its G¹⁴ term)"
        ),
    );
}

#[test]
fn criterion_07_conservation_suite() {
    let start = Instant::now();
    let h = dynamics::figure1_hamiltonian();
    let p0 = dynamics::figure1_default_p0();
    let rep = dynamics::figure1_report(ALPHA, &h, &p0, 1e-3, 100.0, Method::Rk4).unwrap();
    let jumps_ok = !rep.jumps.is_empty()
        && rep.jumps.iter().all(|j| {
            j.fit_error < 1e-4 && j.n.abs() <= 5 && j.m.abs() <= 5
        });
    // Fourth-order check on step sizes where truncation still dominates
    // roundoff (at dt = 1e-3 the drift already sits at the noise floor).
    let drift = |dt: f64| {
        let t = dynamics::integrate_coalgebra(
            &sec5_algebra(ALPHA),
            &h,
            &p0,
            dt,
            20.0,
            Method::Rk4,
            vec![],
        )
        .unwrap();
        t.max_abs_drift("H")
    };
    let factor = drift(0.02) / drift(0.01);
    let elapsed = start.elapsed();
    let pass = rep.k1_rel_drift < 1e-6
        && rep.k2_rel_drift < 1e-6
        && rep.k3_abs_drift < 1e-6
        && jumps_ok
        && (8.0..=32.0).contains(&factor)
        && elapsed.as_secs_f64() < 30.0;
    report(
        7,
        pass,
        &format!(
            "drifts K1 {:.2e}, K2 {:.2e}, unwrapped K3 {:.2e} (< 1e-6); {} wrapped jumps all \
             matching 2π(n − αm) to 1e-4; halving-dt factor {factor:.1} in [8, 32]; {elapsed:.2?} (< 30 s)",
            rep.k1_rel_drift,
            rep.k2_rel_drift,
            rep.k3_abs_drift,
            rep.jumps.len()
        ),
    );
}

#[test]
fn criterion_08_triangular_cross_check() {
    let alg = sec5_algebra(ALPHA);
    let fields = realization::sec5_fields(ALPHA);
    let hq = dynamics::figure1_hamiltonian();
    let hpoly = fields.central_hamiltonian_poly(&hq.g);
    let h = PhaseFn::from_poly(&hpoly);
    let dt = 1e-4;
    let traj = dynamics::integrate_geodesic(
        &h,
        &[0.1, 0.2, -0.3, 0.4],
        &[0.8, 0.7, 1.1, 0.5],
        dt,
        2.0,
        Method::Rk4,
    )
    .unwrap();
    let mu: Vec<Vec<f64>> = traj
        .xs
        .iter()
        .zip(&traj.ps)
        .map(|(x, p)| fields.moment_map(x, p))
        .collect();
    let mut worst: f64 = 0.0;
    for k in 1..mu.len() - 1 {
        let rhs = dynamics::lie_poisson_rhs(&alg, &hq, &mu[k]);
        for a in 0..5 {
            let dnum = (mu[k + 1][a] - mu[k - 1][a]) / (2.0 * dt);
            worst = worst.max((dnum - rhs[a]).abs());
        }
    }
    report(
        8,
        worst < 1e-6,
        &format!(
            "geodesic moment values satisfy the Lie-Poisson equation: \
             central-difference residual {worst:.2e} (< 1e-6)"
        ),
    );
}

#[test]
fn criterion_09_reduced_variable_constancy() {
    // Five-dim: j = L1 L3 stays constant along the full invariant-metric flow.
    let c = [1.0, 1.0, 0.0, 1.0];
    let inv = realization::sec4_invariants();
    let h4 = realization::invariant_hamiltonian(&inv, c);
    let traj4 = dynamics::integrate_geodesic(
        &h4,
        &[0.0, 0.0, 0.0, 0.0],
        &[1.0, -1.0, 0.3, 0.2],
        1e-3,
        10.0,
        Method::Rk4,
    )
    .unwrap();
    let j_fn = charts::sec4_sheet_parameter();
    let j0 = j_fn.eval(&traj4.xs[0], &traj4.ps[0]);
    let mut drift4: f64 = 0.0;
    for (x, p) in traj4.xs.iter().zip(&traj4.ps) {
        drift4 = drift4.max((j_fn.eval(x, p) - j0).abs());
    }

    // Wild: j1, j2, j3 stay constant along the central-metric geodesic flow.
    let rep5 = charts::sec5_reduced_flow_check(
        &dynamics::figure1_hamiltonian().g.g,
        ALPHA,
        &[0.1, 0.2, -0.3, 0.4],
        &[0.8, 0.7, 1.1, 0.5],
        1e-3,
        10.0,
    )
    .unwrap();
    let drift5 = rep5
        .conserved_drift
        .iter()
        .map(|(_, d)| *d)
        .fold(0.0, f64::max);
    let pass = drift4 < 1e-6 && drift5 < 1e-6;
    report(
        9,
        pass,
        &format!(
            "five-dim j = L1·L3 drift {drift4:.2e}; wild j1, j2, j3 drift {drift5:.2e} \
             (both < 1e-6 over T = 10 at dt = 1e-3)"
        ),
    );
}

#[test]
fn criterion_10_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut notes = Vec::new();

    // Structure-constant validity on both example algebras plus controls.
    let ok_algebras = sec4_algebra().validate().ok() && sec5_algebra(ALPHA).validate().ok();
    notes.push(format!("Jacobi/antisymmetry on both algebras: {ok_algebras}"));
    let ok_controls = abelian(4).index(7) == 4 && heisenberg().index(7) == 1;
    notes.push(format!("abelian and Heisenberg index controls: {ok_controls}"));

    // Rank parity of the pairing matrix B(λ) at random covectors.
    let mut parity_ok = true;
    for alg in [&sec4_algebra(), &sec5_algebra(ALPHA)] {
        for _ in 0..20 {
            let lam = random_rational_vector(&mut rng, alg.n, alg.mode);
            let rank = alg.pairing_matrix(&lam).rank(1e-10);
            parity_ok &= rank % 2 == 0;
        }
    }
    notes.push(format!("B(λ) rank parity over 40 draws: {parity_ok}"));

    // Basis independence of the index under a random unimodular change.
    let alg = sec4_algebra();
    let mut s: Vec<Vec<Scalar>> = (0..5)
        .map(|i| basis_vector(i + 1, 5, ScalarMode::Exact))
        .collect();
    for i in 0..5 {
        for k in (i + 1)..5 {
            s[i][k] = Scalar::from_int(rng.gen_range(-3..=3));
        }
    }
    let alg2 = alg.change_basis(&s).unwrap();
    let basis_ok = alg.index(7) == alg2.index(7);
    notes.push(format!("index invariant under basis change: {basis_ok}"));

    // Casimir gradients annihilate the Lie-Poisson operator.
    let alg5 = sec5_algebra(ALPHA);
    let mut casimir_ok = true;
    for gdiag in [[0.0, 1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0, ALPHA * ALPHA]] {
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&gdiag));
        let h = dynamics::QuadraticHamiltonian { g: MetricForm::new(g).unwrap() };
        for _ in 0..20 {
            let p: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let rhs = dynamics::lie_poisson_rhs(&alg5, &h, &p);
            casimir_ok &= rhs.iter().all(|v| v.abs() < 1e-12);
        }
    }
    notes.push(format!("Casimir gradients annihilate the bracket: {casimir_ok}"));

    // Polar/Cartesian round trip away from the degenerate radii.
    let mut angle_ok = true;
    for _ in 0..50 {
        let p: Vec<f64> = (0..5).map(|_| rng.gen_range(0.3..2.0)).collect();
        let polar = dynamics::to_polar(&p, ALPHA).unwrap();
        let back = dynamics::from_polar(&polar, ALPHA);
        angle_ok &= p
            .iter()
            .zip(&back)
            .all(|(a, b)| (a - b).abs() < 1e-12);
    }
    notes.push(format!("polar round trip to 1e-12: {angle_ok}"));

    let pass = ok_algebras && ok_controls && parity_ok && basis_ok && casimir_ok && angle_ok;
    report(10, pass, &notes.join("; "));
}
