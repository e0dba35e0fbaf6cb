//! Homogeneous-space classification: h-perp, generic covectors, the integer
//! invariants (degree of degeneracy, space index, dim/ind of the
//! invariant-function algebra, defect) and the two integrability verdicts.

use crate::algebra::{random_rational_vector, LieAlgebra};
use crate::error::HomflowError;
use crate::linalg::ScalarMatrix;
use crate::scalar::{Scalar, ScalarMode};
use nalgebra::DMatrix;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of seeded draws used to certify genericity of λ over h-perp.
pub const GENERIC_DRAWS: usize = 8;

/// An isotropy subalgebra h inside a parent algebra g.
pub struct SubalgebraSpec<'a> {
    pub alg: &'a LieAlgebra,
    /// Basis vectors of h in the e-basis; may be empty for h = 0.
    pub basis: Vec<Vec<Scalar>>,
}

impl<'a> SubalgebraSpec<'a> {
    /// Checks linear independence and closure [h, h] ⊆ h.
    pub fn new(alg: &'a LieAlgebra, basis: Vec<Vec<Scalar>>) -> Result<Self, HomflowError> {
        let basis: Vec<Vec<Scalar>> = basis
            .into_iter()
            .map(|v| v.into_iter().map(|s| s.into_mode(alg.mode)).collect())
            .collect();
        for v in &basis {
            if v.len() != alg.n {
                return Err(HomflowError::InvalidSubalgebra(format!(
                    "basis vector length {} != dim g = {}",
                    v.len(),
                    alg.n
                )));
            }
        }
        let spec = SubalgebraSpec { alg, basis };
        let m = spec.basis_matrix();
        if m.rank(alg.tol) != spec.basis.len() {
            return Err(HomflowError::InvalidSubalgebra(
                "basis vectors are linearly dependent".into(),
            ));
        }
        // Closure: [h_i, h_j] must lie in span(h).
        for i in 0..spec.basis.len() {
            for j in (i + 1)..spec.basis.len() {
                let br = alg.bracket_vec(&spec.basis[i], &spec.basis[j]);
                let stacked = m.vstack(&ScalarMatrix::from_rows(vec![br], alg.mode));
                if stacked.rank(alg.tol) != spec.basis.len() {
                    return Err(HomflowError::InvalidSubalgebra(format!(
                        "not closed under the bracket: [h_{}, h_{}] leaves the span",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(spec)
    }

    pub fn dim_h(&self) -> usize {
        self.basis.len()
    }

    /// dim M = dim g − dim h.
    pub fn dim_m(&self) -> usize {
        self.alg.n - self.basis.len()
    }

    fn basis_matrix(&self) -> ScalarMatrix {
        if self.basis.is_empty() {
            ScalarMatrix::zeros(0, self.alg.n, self.alg.mode)
        } else {
            ScalarMatrix::from_rows(self.basis.clone(), self.alg.mode)
        }
    }

    /// Basis of h-perp = {λ ∈ g* | ⟨λ, h⟩ = 0}.
    pub fn hperp_basis(&self) -> Vec<Vec<Scalar>> {
        self.basis_matrix().nullspace(self.alg.tol)
    }

    /// A generic covector λ ∈ h-perp: among `GENERIC_DRAWS` seeded random
    /// rational combinations of the h-perp basis, pick one maximizing
    /// rank B(λ) and, among those, minimizing dim(h ∩ g^λ).
    pub fn generic_hperp_covector(&self, seed: u64) -> GenericCovector {
        let hperp = self.hperp_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<GenericCovector> = None;
        for _ in 0..GENERIC_DRAWS {
            let coeffs = random_rational_vector(&mut rng, hperp.len(), self.alg.mode);
            let mut lambda = vec![Scalar::zero(self.alg.mode); self.alg.n];
            for (c, bvec) in coeffs.iter().zip(&hperp) {
                for (slot, b) in lambda.iter_mut().zip(bvec) {
                    *slot = slot.clone() + c.clone() * b.clone();
                }
            }
            let cand = self.assess(lambda);
            let better = match &best {
                None => true,
                Some(b) => {
                    cand.rank_b > b.rank_b || (cand.rank_b == b.rank_b && cand.dim_hlam < b.dim_hlam)
                }
            };
            if better {
                best = Some(cand);
            }
        }
        best.expect("at least one draw")
    }

    /// Rank/kernel data for a specific λ ∈ h-perp.
    pub fn assess(&self, lambda: Vec<Scalar>) -> GenericCovector {
        let b = self.alg.pairing_matrix(&lambda);
        let rank_b = b.rank(self.alg.tol);
        let glam = b.nullspace(self.alg.tol);
        let dim_hlam = self.intersection_dim(&glam);
        GenericCovector { lambda, rank_b, dim_glam: glam.len(), dim_hlam, glam_basis: glam }
    }

    /// dim(h ∩ span(vs)) = dim h + dim span(vs) − rank of the stacked matrix.
    fn intersection_dim(&self, vs: &[Vec<Scalar>]) -> usize {
        if self.basis.is_empty() || vs.is_empty() {
            return 0;
        }
        let stacked = self
            .basis_matrix()
            .vstack(&ScalarMatrix::from_rows(vs.to_vec(), self.alg.mode));
        self.basis.len() + vs.len() - stacked.rank(self.alg.tol)
    }

    /// Degree of degeneracy s_M = (dim g^λ − ind g)/2 at generic λ.
    pub fn degeneracy_degree(&self, seed: u64) -> Result<usize, HomflowError> {
        let ind_g = self.alg.index(seed);
        let lam = self.generic_hperp_covector(seed);
        let excess = lam.dim_glam as i64 - ind_g as i64;
        if excess < 0 || excess % 2 != 0 {
            return Err(HomflowError::ParityViolation(excess));
        }
        Ok((excess / 2) as usize)
    }

    /// Space index i_M = dim(h ∩ g^λ) at generic λ.
    pub fn space_index(&self, seed: u64) -> usize {
        self.generic_hperp_covector(seed).dim_hlam
    }

    /// Full classification report.
    pub fn classify(&self, seed: u64) -> Result<SpaceInvariantsReport, HomflowError> {
        let n = self.alg.n;
        let ind_g = self.alg.index(seed);
        let lam = self.generic_hperp_covector(seed);
        let excess = lam.dim_glam as i64 - ind_g as i64;
        if excess < 0 || excess % 2 != 0 {
            return Err(HomflowError::ParityViolation(excess));
        }
        let s_m = (excess / 2) as usize;
        let i_m = lam.dim_hlam;
        let dim_m = self.dim_m();
        let dim_f = i_m as i64 + 2 * dim_m as i64 - n as i64;
        let ind_f = ind_g as i64 + 2 * s_m as i64 - i_m as i64;
        let two_defect = dim_f - ind_f;
        if dim_f < 0 || ind_f < 0 || two_defect < 0 || two_defect % 2 != 0 {
            return Err(HomflowError::ParityViolation(two_defect));
        }
        let defect = (two_defect / 2) as usize;
        // Cross-check the defect via the quotient formula
        // d = (1/2) dim g/g^λ − dim h/h^λ.
        let defect_alt = (n as i64 - lam.dim_glam as i64) / 2
            - (self.dim_h() as i64 - lam.dim_hlam as i64);
        if defect_alt != defect as i64 {
            return Err(HomflowError::ParityViolation(defect_alt - defect as i64));
        }
        let dim_orbit = n - ind_g - 2 * s_m;
        let half_orbit = (n - ind_g) / 2 - s_m;
        Ok(SpaceInvariantsReport {
            dim_g: n,
            dim_h: self.dim_h(),
            ind_g,
            s_m,
            i_m,
            dim_f: dim_f as usize,
            ind_f: ind_f as usize,
            defect,
            dim_orbit,
            commutative: defect == 0,
            thm1_integrable: defect < 2,
            thm2_integrable: half_orbit < 2,
        })
    }

    /// Admissibility of a metric form G on g*: rank of the restriction to
    /// h-perp, and infinitesimal Ad*_H-invariance.
    pub fn metric_admissibility(&self, g: &MetricForm) -> MetricAdmissibility {
        let hperp = self.hperp_basis();
        let dim_m = self.dim_m();
        let k = hperp.len();
        let tol = self.alg.tol;
        // Restriction of G to h-perp as a bilinear form on the h-perp basis.
        let mut restricted = DMatrix::zeros(k, k);
        let hperp_f: Vec<Vec<f64>> =
            hperp.iter().map(|v| v.iter().map(|s| s.to_f64()).collect()).collect();
        for i in 0..k {
            for j in 0..k {
                let mut v = 0.0;
                for a in 0..self.alg.n {
                    for b in 0..self.alg.n {
                        v += hperp_f[i][a] * g.g[(a, b)] * hperp_f[j][b];
                    }
                }
                restricted[(i, j)] = v;
            }
        }
        let rank = crate::linalg::float_rank(&restricted, tol);
        // Infinitesimal invariance: G(ad*_X λ, μ) + G(λ, ad*_X μ) = 0 for
        // X in h and λ, μ in h-perp, with (ad*_X λ)_b = −Σ_{a,c} X^a C_{ab}^c λ_c.
        let mut worst = 0.0_f64;
        for x in &self.basis {
            let xf: Vec<f64> = x.iter().map(|s| s.to_f64()).collect();
            let coad = |lam: &[f64]| -> Vec<f64> {
                (0..self.alg.n)
                    .map(|b| {
                        let mut v = 0.0;
                        for a in 0..self.alg.n {
                            for c in 0..self.alg.n {
                                v -= xf[a] * self.alg.c_f64(a, b, c) * lam[c];
                            }
                        }
                        v
                    })
                    .collect()
            };
            for lam in &hperp_f {
                let ad_lam = coad(lam);
                for mu in &hperp_f {
                    let ad_mu = coad(mu);
                    let mut v = 0.0;
                    for a in 0..self.alg.n {
                        for b in 0..self.alg.n {
                            v += g.g[(a, b)] * (ad_lam[a] * mu[b] + lam[a] * ad_mu[b]);
                        }
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        MetricAdmissibility {
            rank,
            dim_m,
            rank_ok: rank == dim_m,
            ad_h_residual: worst,
            ad_h_invariant: worst <= 1e-9,
        }
    }
}

/// A sampled covector with its rank/kernel data.
#[derive(Clone, Debug)]
pub struct GenericCovector {
    pub lambda: Vec<Scalar>,
    pub rank_b: usize,
    pub dim_glam: usize,
    pub dim_hlam: usize,
    pub glam_basis: Vec<Vec<Scalar>>,
}

/// Symmetric quadratic form G^{AB} on g*.
#[derive(Clone, Debug)]
pub struct MetricForm {
    pub g: DMatrix<f64>,
}

impl MetricForm {
    pub fn new(g: DMatrix<f64>) -> Result<Self, HomflowError> {
        if g.nrows() != g.ncols() {
            return Err(HomflowError::InvalidAlgebra("metric form must be square".into()));
        }
        for i in 0..g.nrows() {
            for j in 0..i {
                if (g[(i, j)] - g[(j, i)]).abs() > 1e-12 {
                    return Err(HomflowError::InvalidAlgebra(format!(
                        "metric form not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(MetricForm { g })
    }

    pub fn identity(n: usize) -> Self {
        MetricForm { g: DMatrix::identity(n, n) }
    }
}

#[derive(Clone, Debug)]
pub struct MetricAdmissibility {
    pub rank: usize,
    pub dim_m: usize,
    pub rank_ok: bool,
    pub ad_h_residual: f64,
    pub ad_h_invariant: bool,
}

/// The integer invariants of a homogeneous space with both theorem verdicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceInvariantsReport {
    pub dim_g: usize,
    pub dim_h: usize,
    pub ind_g: usize,
    pub s_m: usize,
    pub i_m: usize,
    pub dim_f: usize,
    pub ind_f: usize,
    pub defect: usize,
    /// dim O_λ = dim g − ind g − 2 s_M.
    pub dim_orbit: usize,
    pub commutative: bool,
    pub thm1_integrable: bool,
    pub thm2_integrable: bool,
}

impl SpaceInvariantsReport {
    pub fn tuple(&self) -> (usize, usize, usize, usize, usize, usize) {
        (self.ind_g, self.s_m, self.i_m, self.dim_f, self.ind_f, self.defect)
    }
}

/// Basis vector e_i (1-based) as a scalar vector of length n.
pub fn basis_vector(i: usize, n: usize, mode: ScalarMode) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(mode); n];
    v[i - 1] = Scalar::one(mode);
    v
}
