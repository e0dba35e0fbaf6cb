//! Lie-Poisson dynamics on the coalgebra, fixed-step integration with
//! conservation monitors, polar coordinates for the wild example, and the
//! branch-jumping Casimir reproduction.

use crate::algebra::LieAlgebra;
use crate::error::HomflowError;
use crate::homspace::MetricForm;
use crate::smooth::PhaseFn;
use std::f64::consts::PI;

/// Quadratic Hamiltonian H(P) = (1/2) G^{AB} P_A P_B on the coalgebra.
#[derive(Clone, Debug)]
pub struct QuadraticHamiltonian {
    pub g: MetricForm,
}

impl QuadraticHamiltonian {
    pub fn eval(&self, p: &[f64]) -> f64 {
        let n = p.len();
        let mut sum = 0.0;
        for a in 0..n {
            for b in 0..n {
                sum += self.g.g[(a, b)] * p[a] * p[b];
            }
        }
        0.5 * sum
    }

    pub fn grad(&self, p: &[f64]) -> Vec<f64> {
        let n = p.len();
        (0..n).map(|a| (0..n).map(|b| self.g.g[(a, b)] * p[b]).sum()).collect()
    }
}

/// dP_A/dt = {H, P_A}^Lie = Σ_{E,C} C_{EA}^C P_C ∂H/∂P_E.
pub fn lie_poisson_rhs(alg: &LieAlgebra, h: &QuadraticHamiltonian, p: &[f64]) -> Vec<f64> {
    let dh = h.grad(p);
    let mut out = vec![0.0; alg.n];
    for a in 0..alg.n {
        for b in (a + 1)..alg.n {
            for (c, s) in alg.bracket_terms(a, b) {
                let cv = s.to_f64() * p[*c];
                out[b] += cv * dh[a];
                out[a] -= cv * dh[b];
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Midpoint,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "midpoint" => Ok(Method::Midpoint),
            other => Err(format!("unknown method '{other}' (expected rk4 or midpoint)")),
        }
    }
}

/// Time series of states with named conserved-quantity monitors.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub monitors: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn monitor(&self, name: &str) -> Option<&[f64]> {
        self.monitors.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// Max |v(t) − v(0)| of a monitor series.
    pub fn max_abs_drift(&self, name: &str) -> f64 {
        let s = self.monitor(name).expect("monitor exists");
        let v0 = s[0];
        s.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max)
    }

    /// Max |v(t) − v(0)| / |v(0)| of a monitor series.
    pub fn max_rel_drift(&self, name: &str) -> f64 {
        let s = self.monitor(name).expect("monitor exists");
        let v0 = s[0];
        s.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max) / v0.abs().max(1e-300)
    }
}

fn step(f: &dyn Fn(&[f64]) -> Vec<f64>, y: &[f64], dt: f64, method: Method) -> Vec<f64> {
    match method {
        Method::Rk4 => {
            let k1 = f(y);
            let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * dt * k).collect();
            let k2 = f(&y2);
            let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * dt * k).collect();
            let k3 = f(&y3);
            let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + dt * k).collect();
            let k4 = f(&y4);
            (0..y.len())
                .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect()
        }
        Method::Midpoint => {
            let k1 = f(y);
            let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * dt * k).collect();
            let k2 = f(&y2);
            (0..y.len()).map(|i| y[i] + dt * k2[i]).collect()
        }
    }
}

/// Named monitor: a function of the state recorded at every step.
pub type Monitor = (String, Box<dyn Fn(&[f64]) -> f64>);

/// Fixed-step integration of the Lie-Poisson system. Monitors always include
/// the Hamiltonian (`H`); callers may register Casimirs and other functions.
pub fn integrate_coalgebra(
    alg: &LieAlgebra,
    h: &QuadraticHamiltonian,
    p0: &[f64],
    dt: f64,
    t_final: f64,
    method: Method,
    extra_monitors: Vec<Monitor>,
) -> Result<Trajectory, HomflowError> {
    assert!(dt > 0.0 && t_final > 0.0);
    let rhs = |p: &[f64]| lie_poisson_rhs(alg, h, p);
    let nsteps = (t_final / dt).round() as usize;
    let mut times = Vec::with_capacity(nsteps + 1);
    let mut states = Vec::with_capacity(nsteps + 1);
    let mut monitors: Vec<(String, Vec<f64>)> = Vec::new();
    monitors.push(("H".into(), Vec::new()));
    for (name, _) in &extra_monitors {
        monitors.push((name.clone(), Vec::new()));
    }
    let mut y = p0.to_vec();
    for i in 0..=nsteps {
        let t = i as f64 * dt;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(HomflowError::NonfiniteState(t));
        }
        times.push(t);
        states.push(y.clone());
        monitors[0].1.push(h.eval(&y));
        for (k, (_, f)) in extra_monitors.iter().enumerate() {
            monitors[k + 1].1.push(f(&y));
        }
        if i < nsteps {
            y = step(&rhs, &y, dt, method);
        }
    }
    Ok(Trajectory { times, states, monitors })
}

/// Phase-space trajectory on T*M.
#[derive(Clone, Debug)]
pub struct PhaseTrajectory {
    pub times: Vec<f64>,
    pub xs: Vec<Vec<f64>>,
    pub ps: Vec<Vec<f64>>,
}

/// Fixed-step integration of Hamilton's equations on T*M:
/// dx/dt = ∂H/∂p, dp/dt = −∂H/∂x.
pub fn integrate_geodesic(
    h: &PhaseFn,
    x0: &[f64],
    p0: &[f64],
    dt: f64,
    t_final: f64,
    method: Method,
) -> Result<PhaseTrajectory, HomflowError> {
    let m = h.m;
    let rhs = |y: &[f64]| -> Vec<f64> {
        let (x, p) = y.split_at(m);
        let (gx, gp) = h.grad(x, p);
        gp.into_iter().chain(gx.into_iter().map(|v| -v)).collect()
    };
    let nsteps = (t_final / dt).round() as usize;
    let mut times = Vec::with_capacity(nsteps + 1);
    let mut xs = Vec::with_capacity(nsteps + 1);
    let mut ps = Vec::with_capacity(nsteps + 1);
    let mut y: Vec<f64> = x0.iter().chain(p0).cloned().collect();
    for i in 0..=nsteps {
        let t = i as f64 * dt;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(HomflowError::NonfiniteState(t));
        }
        times.push(t);
        xs.push(y[..m].to_vec());
        ps.push(y[m..].to_vec());
        if i < nsteps {
            y = step(&rhs, &y, dt, method);
        }
    }
    Ok(PhaseTrajectory { times, xs, ps })
}

// ---------------------------------------------------------------------------
// Polar coordinates and Casimirs of the wild example
// ---------------------------------------------------------------------------

/// Polar coordinates on the wild coalgebra:
/// P1 = σ, P2 = γ sin φ, P3 = γ cos φ, P4 = ρ sin ψ, P5 = (ρ/α) cos ψ.
#[derive(Clone, Copy, Debug)]
pub struct PolarCoordinates {
    pub sigma: f64,
    pub gamma: f64,
    pub phi: f64,
    pub rho: f64,
    pub psi: f64,
}

pub const RADIUS_TOL: f64 = 1e-12;

pub fn to_polar(p: &[f64], alpha: f64) -> Result<PolarCoordinates, HomflowError> {
    assert_eq!(p.len(), 5);
    let gamma = (p[1] * p[1] + p[2] * p[2]).sqrt();
    let rho = (p[3] * p[3] + alpha * alpha * p[4] * p[4]).sqrt();
    if gamma < RADIUS_TOL {
        return Err(HomflowError::DegenerateRadius(format!("gamma = {gamma}")));
    }
    if rho < RADIUS_TOL {
        return Err(HomflowError::DegenerateRadius(format!("rho = {rho}")));
    }
    Ok(PolarCoordinates {
        sigma: p[0],
        gamma,
        phi: p[1].atan2(p[2]),
        rho,
        psi: p[3].atan2(alpha * p[4]),
    })
}

pub fn from_polar(c: &PolarCoordinates, alpha: f64) -> Vec<f64> {
    vec![
        c.sigma,
        c.gamma * c.phi.sin(),
        c.gamma * c.phi.cos(),
        c.rho * c.psi.sin(),
        c.rho / alpha * c.psi.cos(),
    ]
}

/// Wrap an angle to [0, 2π).
pub fn wrap_2pi(a: f64) -> f64 {
    let mut v = a % (2.0 * PI);
    if v < 0.0 {
        v += 2.0 * PI;
    }
    v
}

/// Wrap an angle difference to (−π, π].
pub fn wrap_pi(a: f64) -> f64 {
    let mut v = a % (2.0 * PI);
    if v > PI {
        v -= 2.0 * PI;
    }
    if v <= -PI {
        v += 2.0 * PI;
    }
    v
}

/// Pointwise Casimir values of the wild algebra: K1 = γ, K2 = ρ and the
/// principal-value K3 wrapped to [0, 2π).
pub fn casimir_values(p: &[f64], alpha: f64) -> Result<(f64, f64, f64), HomflowError> {
    let c = to_polar(p, alpha)?;
    Ok((c.gamma, c.rho, wrap_2pi(c.psi - alpha * c.phi)))
}

/// Continuously lifted angle series: consecutive raw samples must differ by
/// less than `0.9 π`, the continuity contract for the chosen dt.
pub fn lift_angles(raw: &[f64]) -> Result<Vec<f64>, HomflowError> {
    let mut out = Vec::with_capacity(raw.len());
    let mut acc = match raw.first() {
        Some(v) => *v,
        None => return Ok(out),
    };
    out.push(acc);
    for w in raw.windows(2) {
        let d = wrap_pi(w[1] - w[0]);
        if d.abs() > 0.9 * PI {
            return Err(HomflowError::AngleContinuity(d.abs()));
        }
        acc += d;
        out.push(acc);
    }
    Ok(out)
}

/// A detected discontinuity of the wrapped K3 series.
#[derive(Clone, Debug)]
pub struct CasimirJump {
    pub time: f64,
    /// Signed jump of the wrapped series.
    pub delta: f64,
    /// Best-fit integers with |n|, |m| <= 5 such that delta ≈ 2π(n − αm).
    pub n: i64,
    pub m: i64,
    pub fit_error: f64,
}

/// Branch-jump attribution: scan |n|, |m| <= 5 for the best fit of
/// `delta ≈ 2π(n − αm)`.
pub fn attribute_jump(delta: f64, alpha: f64) -> (i64, i64, f64) {
    let mut best = (0i64, 0i64, f64::INFINITY);
    for n in -5..=5i64 {
        for m in -5..=5i64 {
            let err = (delta - 2.0 * PI * (n as f64 - alpha * m as f64)).abs();
            if err < best.2 {
                best = (n, m, err);
            }
        }
    }
    best
}

/// Per-sample output row of the branch-jump reproduction.
#[derive(Clone, Debug)]
pub struct CasimirRow {
    pub t: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3_wrapped: f64,
    pub k3_unwrapped: f64,
}

#[derive(Clone, Debug)]
pub struct Figure1Report {
    pub rows: Vec<CasimirRow>,
    pub jumps: Vec<CasimirJump>,
    pub k1_rel_drift: f64,
    pub k2_rel_drift: f64,
    pub k3_abs_drift: f64,
    pub h_abs_drift: f64,
}

/// The Hamiltonian used for the branch-jump illustration:
/// H = (P1² + 2 P1 P3 + 2 P1 P4 − P4² + P5²)/2.
pub fn figure1_hamiltonian() -> QuadraticHamiltonian {
    let mut g = nalgebra::DMatrix::zeros(5, 5);
    g[(0, 0)] = 1.0;
    g[(0, 2)] = 1.0;
    g[(2, 0)] = 1.0;
    g[(0, 3)] = 1.0;
    g[(3, 0)] = 1.0;
    g[(3, 3)] = -1.0;
    g[(4, 4)] = 1.0;
    QuadraticHamiltonian { g: MetricForm { g } }
}

/// Default generic initial covector for the branch-jump run.
pub fn figure1_default_p0() -> Vec<f64> {
    vec![1.0, 0.5, 1.0 / 3.0, 0.25, 0.2]
}

/// Threshold separating a genuine wrapped-K3 branch jump from smooth motion.
const JUMP_THRESHOLD: f64 = 0.5;

/// Integrate the wild Lie-Poisson system and report the Casimir series with
/// branch-jump attribution.
pub fn figure1_report(
    alpha: f64,
    h: &QuadraticHamiltonian,
    p0: &[f64],
    dt: f64,
    t_final: f64,
    method: Method,
) -> Result<Figure1Report, HomflowError> {
    let alg = crate::algebra::sec5_algebra(alpha);
    let traj = integrate_coalgebra(&alg, h, p0, dt, t_final, method, vec![])?;
    casimir_series(alpha, h, &traj)
}

/// Build the Casimir series and jump summary from an existing trajectory.
pub fn casimir_series(
    alpha: f64,
    h: &QuadraticHamiltonian,
    traj: &Trajectory,
) -> Result<Figure1Report, HomflowError> {
    let mut phis = Vec::with_capacity(traj.states.len());
    let mut psis = Vec::with_capacity(traj.states.len());
    let mut k1s = Vec::with_capacity(traj.states.len());
    let mut k2s = Vec::with_capacity(traj.states.len());
    for p in &traj.states {
        let c = to_polar(p, alpha)?;
        phis.push(c.phi);
        psis.push(c.psi);
        k1s.push(c.gamma);
        k2s.push(c.rho);
    }
    let phi_l = lift_angles(&phis)?;
    let psi_l = lift_angles(&psis)?;
    let mut rows = Vec::with_capacity(traj.states.len());
    for i in 0..traj.states.len() {
        rows.push(CasimirRow {
            t: traj.times[i],
            k1: k1s[i],
            k2: k2s[i],
            k3_wrapped: wrap_2pi(psis[i] - alpha * phis[i]),
            k3_unwrapped: psi_l[i] - alpha * phi_l[i],
        });
    }
    let mut jumps = Vec::new();
    for i in 1..rows.len() {
        let delta = rows[i].k3_wrapped - rows[i - 1].k3_wrapped;
        if delta.abs() > JUMP_THRESHOLD {
            let (n, m, fit_error) = attribute_jump(delta, alpha);
            jumps.push(CasimirJump { time: rows[i].t, delta, n, m, fit_error });
        }
    }
    let rel = |s: &[f64]| {
        let v0 = s[0];
        s.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max) / v0.abs().max(1e-300)
    };
    let k3_abs_drift = {
        let v0 = rows[0].k3_unwrapped;
        rows.iter().map(|r| (r.k3_unwrapped - v0).abs()).fold(0.0, f64::max)
    };
    let h_abs_drift = {
        let h0 = h.eval(&traj.states[0]);
        traj.states.iter().map(|p| (h.eval(p) - h0).abs()).fold(0.0, f64::max)
    };
    Ok(Figure1Report {
        k1_rel_drift: rel(&k1s),
        k2_rel_drift: rel(&k2s),
        k3_abs_drift,
        h_abs_drift,
        rows,
        jumps,
    })
}
