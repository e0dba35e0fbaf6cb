//! Structure-constant Lie algebras: validation, coadjoint pairing,
//! annihilators, the algebra index, and the Lie-Poisson bracket on the
//! coalgebra.

use crate::error::HomflowError;
use crate::linalg::ScalarMatrix;
use crate::scalar::{Scalar, ScalarMode};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Default relative threshold for numerical rank decisions in floating mode.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Default number of random covector draws when estimating max rank.
pub const DEFAULT_INDEX_DRAWS: usize = 8;

/// A finite-dimensional real Lie algebra given by structure constants.
///
/// Constants are stored sparsely, keyed by `(a, b)` with `a < b` (0-based);
/// the other half follows by antisymmetry.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub n: usize,
    pub mode: ScalarMode,
    /// Relative tolerance for zero/rank decisions in floating mode.
    pub tol: f64,
    brackets: BTreeMap<(usize, usize), Vec<(usize, Scalar)>>,
}

/// Result of the antisymmetry + Jacobi check.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// Violated Jacobi tuples `(a, b, c, e)`, 1-based as in the input format.
    pub jacobi_violations: Vec<(usize, usize, usize, usize)>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.jacobi_violations.is_empty()
    }
}

impl LieAlgebra {
    /// Build from 1-based entries `(a, b, c, value)` meaning `[e_a, e_b] ∋ value·e_c`.
    /// Entries with `a > b` are folded in by antisymmetry; if both orientations
    /// of a pair are given they must be consistent.
    pub fn new(n: usize, entries: &[(usize, usize, usize, Scalar)]) -> Result<Self, HomflowError> {
        if n == 0 {
            return Err(HomflowError::InvalidAlgebra("dimension must be positive".into()));
        }
        let mode = if entries.iter().all(|e| e.3.mode() == ScalarMode::Exact) {
            ScalarMode::Exact
        } else {
            ScalarMode::Float
        };
        let mut brackets: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>> = BTreeMap::new();
        for &(a1, b1, c1, ref v) in entries {
            if a1 == 0 || b1 == 0 || c1 == 0 || a1 > n || b1 > n || c1 > n {
                return Err(HomflowError::InvalidAlgebra(format!(
                    "bracket indices ({a1},{b1},{c1}) out of range 1..={n}"
                )));
            }
            if a1 == b1 {
                if !v.is_zero(0.0) {
                    return Err(HomflowError::InvalidAlgebra(format!(
                        "[e_{a1}, e_{a1}] must vanish"
                    )));
                }
                continue;
            }
            let (a, b, val) = if a1 < b1 {
                (a1 - 1, b1 - 1, v.clone().into_mode(mode))
            } else {
                (b1 - 1, a1 - 1, (-v.clone()).into_mode(mode))
            };
            let slot = brackets.entry((a, b)).or_default();
            match slot.get(&(c1 - 1)) {
                None => {
                    slot.insert(c1 - 1, val);
                }
                Some(prev) => {
                    let diff = prev.clone() - val;
                    if !diff.is_zero(1e-14) {
                        return Err(HomflowError::InvalidAlgebra(format!(
                            "inconsistent duplicate entry for C_({a1},{b1})^{c1}"
                        )));
                    }
                }
            }
        }
        let brackets = brackets
            .into_iter()
            .map(|(k, m)| (k, m.into_iter().filter(|(_, v)| !v.is_zero(0.0)).collect()))
            .collect();
        Ok(LieAlgebra { n, mode, tol: DEFAULT_RANK_TOL, brackets })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Structure constant `C_{ab}^c`, 0-based indices.
    pub fn c(&self, a: usize, b: usize, c: usize) -> Scalar {
        if a == b {
            return Scalar::zero(self.mode);
        }
        let (key, sign) = if a < b { ((a, b), false) } else { ((b, a), true) };
        let v = self
            .brackets
            .get(&key)
            .and_then(|terms| terms.iter().find(|(ci, _)| *ci == c))
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| Scalar::zero(self.mode));
        if sign {
            -v
        } else {
            v
        }
    }

    pub fn c_f64(&self, a: usize, b: usize, c: usize) -> f64 {
        self.c(a, b, c).to_f64()
    }

    /// Sparse bracket terms for `a < b`.
    pub fn bracket_terms(&self, a: usize, b: usize) -> &[(usize, Scalar)] {
        static EMPTY: &[(usize, Scalar)] = &[];
        debug_assert!(a < b);
        self.brackets.get(&(a, b)).map_or(EMPTY, |v| v.as_slice())
    }

    /// Bracket of two coefficient vectors: `[u, v]^c = Σ u^a v^b C_{ab}^c`.
    pub fn bracket_vec(&self, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(self.mode); self.n];
        for (&(a, b), terms) in &self.brackets {
            let coeff = u[a].clone() * v[b].clone() - u[b].clone() * v[a].clone();
            if coeff.is_zero(0.0) {
                continue;
            }
            for (c, s) in terms {
                out[*c] = out[*c].clone() + coeff.clone() * s.clone();
            }
        }
        out
    }

    /// Check the Jacobi identity over all index tuples. Antisymmetry holds by
    /// construction of the storage.
    pub fn validate(&self) -> ValidationReport {
        let n = self.n;
        let zero_tol = match self.mode {
            ScalarMode::Exact => 0.0,
            ScalarMode::Float => self.tol,
        };
        let mut violations = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    for e in 0..n {
                        let mut sum = Scalar::zero(self.mode);
                        for d in 0..n {
                            sum = sum
                                + self.c(a, b, d) * self.c(d, c, e)
                                + self.c(b, c, d) * self.c(d, a, e)
                                + self.c(c, a, d) * self.c(d, b, e);
                        }
                        if !sum.is_zero(zero_tol) {
                            violations.push((a + 1, b + 1, c + 1, e + 1));
                        }
                    }
                }
            }
        }
        ValidationReport { jacobi_violations: violations }
    }

    /// Coadjoint pairing matrix `B_{ab}(λ) = Σ_c C_{ab}^c λ_c`.
    pub fn pairing_matrix(&self, lambda: &[Scalar]) -> ScalarMatrix {
        assert_eq!(lambda.len(), self.n);
        let mut m = ScalarMatrix::zeros(self.n, self.n, self.mode);
        for (&(a, b), terms) in &self.brackets {
            let mut v = Scalar::zero(self.mode);
            for (c, s) in terms {
                v = v + s.clone() * lambda[*c].clone().into_mode(self.mode);
            }
            m.set(a, b, v.clone());
            m.set(b, a, -v);
        }
        m
    }

    /// Basis of the annihilator `g^λ = ker B(λ)`.
    pub fn annihilator(&self, lambda: &[Scalar]) -> Vec<Vec<Scalar>> {
        self.pairing_matrix(lambda).nullspace(self.tol)
    }

    /// `ind g = n − max_λ rank B(λ)`, max rank estimated over seeded random
    /// rational covectors.
    pub fn index(&self, seed: u64) -> usize {
        self.n - self.max_pairing_rank(seed, DEFAULT_INDEX_DRAWS)
    }

    pub fn max_pairing_rank(&self, seed: u64, draws: usize) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0;
        for _ in 0..draws {
            let lambda = random_rational_vector(&mut rng, self.n, self.mode);
            best = best.max(self.pairing_matrix(&lambda).rank(self.tol));
        }
        best
    }

    /// Lie-Poisson bracket `{φ, ψ}(P) = Σ C_{ab}^c P_c ∂φ/∂P_a ∂ψ/∂P_b`.
    pub fn lie_poisson_bracket(&self, phi: &dyn CoalgebraFn, psi: &dyn CoalgebraFn, p: &[f64]) -> f64 {
        assert_eq!(p.len(), self.n);
        let gp = phi.grad(p);
        let gq = psi.grad(p);
        let mut sum = 0.0;
        for (&(a, b), terms) in &self.brackets {
            let mut cb = 0.0;
            for (c, s) in terms {
                cb += s.to_f64() * p[*c];
            }
            sum += cb * (gp[a] * gq[b] - gp[b] * gq[a]);
        }
        sum
    }

    /// Change of basis `e'_a = Σ_b S[b][a] e_b` (columns of S are the new basis
    /// vectors in the old basis). Exact mode only.
    pub fn change_basis(&self, s: &[Vec<Scalar>]) -> Result<LieAlgebra, HomflowError> {
        use num_rational::BigRational;
        let n = self.n;
        let s_rat: Vec<Vec<BigRational>> =
            s.iter().map(|r| r.iter().map(|v| v.as_exact().clone()).collect()).collect();
        let s_inv = invert_rational(&s_rat)
            .ok_or_else(|| HomflowError::InvalidAlgebra("basis change matrix is singular".into()))?;
        let mut entries = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                // [e'_a, e'_b] in the old basis
                let ea: Vec<Scalar> = (0..n).map(|i| Scalar::Exact(s_rat[i][a].clone())).collect();
                let eb: Vec<Scalar> = (0..n).map(|i| Scalar::Exact(s_rat[i][b].clone())).collect();
                let br = self.bracket_vec(&ea, &eb);
                // re-express in the new basis: coeff^c = Σ_i (S^{-1})[c][i] br[i]
                for c in 0..n {
                    let mut v = BigRational::from_integer(0.into());
                    for (i, bi) in br.iter().enumerate() {
                        v += &s_inv[c][i] * bi.as_exact();
                    }
                    if !num_traits::Zero::is_zero(&v) {
                        entries.push((a + 1, b + 1, c + 1, Scalar::Exact(v)));
                    }
                }
            }
        }
        LieAlgebra::new(n, &entries)
    }
}

/// A differentiable function on the coalgebra g*.
pub trait CoalgebraFn {
    fn eval(&self, p: &[f64]) -> f64;
    /// Gradient; default central finite differences at step 1e-6.
    fn grad(&self, p: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        let mut g = vec![0.0; p.len()];
        let mut work = p.to_vec();
        for i in 0..p.len() {
            work[i] = p[i] + h;
            let fp = self.eval(&work);
            work[i] = p[i] - h;
            let fm = self.eval(&work);
            work[i] = p[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        g
    }
}

/// Coalgebra function from closures; `grad` is optional.
pub struct CoalgebraClosure {
    pub f: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub df: Option<Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>>,
}

impl CoalgebraClosure {
    pub fn coordinate(i: usize, n: usize) -> Self {
        CoalgebraClosure {
            f: Box::new(move |p| p[i]),
            df: Some(Box::new(move |_| {
                let mut g = vec![0.0; n];
                g[i] = 1.0;
                g
            })),
        }
    }
}

impl CoalgebraFn for CoalgebraClosure {
    fn eval(&self, p: &[f64]) -> f64 {
        (self.f)(p)
    }
    fn grad(&self, p: &[f64]) -> Vec<f64> {
        match &self.df {
            Some(df) => df(p),
            None => {
                struct Wrap<'a>(&'a CoalgebraClosure);
                impl CoalgebraFn for Wrap<'_> {
                    fn eval(&self, p: &[f64]) -> f64 {
                        (self.0.f)(p)
                    }
                }
                Wrap(self).grad(p)
            }
        }
    }
}

/// Random rational vector with numerators in [-97, 97] and denominators in [1, 97].
pub fn random_rational_vector<R: Rng>(rng: &mut R, n: usize, mode: ScalarMode) -> Vec<Scalar> {
    (0..n)
        .map(|_| {
            let num = rng.gen_range(-97..=97);
            let den = rng.gen_range(1..=97);
            Scalar::from_ratio(num, den).into_mode(mode)
        })
        .collect()
}

fn invert_rational(m: &[Vec<num_rational::BigRational>]) -> Option<Vec<Vec<num_rational::BigRational>>> {
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    let n = m.len();
    let mut aug: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            r
        })
        .collect();
    let pivots = crate::linalg::rational_rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

// ---------------------------------------------------------------------------
// Built-in algebras
// ---------------------------------------------------------------------------

/// Abelian algebra of dimension n (all brackets zero).
pub fn abelian(n: usize) -> LieAlgebra {
    LieAlgebra::new(n, &[]).unwrap()
}

/// 3-dimensional Heisenberg algebra: [e1, e2] = e3.
pub fn heisenberg() -> LieAlgebra {
    LieAlgebra::new(3, &[(1, 2, 3, Scalar::from_int(1))]).unwrap()
}

/// The five-dimensional unsolvable algebra of the first worked example:
/// [e1,e4]=-e1, [e1,e5]=e2, [e2,e3]=e1, [e2,e4]=e2, [e3,e4]=-2e3,
/// [e3,e5]=e4, [e4,e5]=-2e5.
pub fn sec4_algebra() -> LieAlgebra {
    let one = Scalar::from_int(1);
    LieAlgebra::new(
        5,
        &[
            (1, 4, 1, -one.clone()),
            (1, 5, 2, one.clone()),
            (2, 3, 1, one.clone()),
            (2, 4, 2, one.clone()),
            (3, 4, 3, Scalar::from_int(-2)),
            (3, 5, 4, one.clone()),
            (4, 5, 5, Scalar::from_int(-2)),
        ],
    )
    .unwrap()
}

/// The five-dimensional wild algebra of the second worked example:
/// [e1,e2]=e3, [e1,e3]=-e2, [e1,e4]=α²e5, [e1,e5]=-e4, with α irrational.
/// The α² entry makes this a floating-mode algebra.
pub fn sec5_algebra(alpha: f64) -> LieAlgebra {
    LieAlgebra::new(
        5,
        &[
            (1, 2, 3, Scalar::Float(1.0)),
            (1, 3, 2, Scalar::Float(-1.0)),
            (1, 4, 5, Scalar::Float(alpha * alpha)),
            (1, 5, 4, Scalar::Float(-1.0)),
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent brute-force Jacobi oracle over every index tuple.
    fn jacobi_residual(alg: &LieAlgebra) -> f64 {
        let n = alg.n;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        let mut s = 0.0;
                        for d in 0..n {
                            s += alg.c_f64(a, b, d) * alg.c_f64(d, c, e)
                                + alg.c_f64(b, c, d) * alg.c_f64(d, a, e)
                                + alg.c_f64(c, a, d) * alg.c_f64(d, b, e);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    #[test]
    fn abelian_validates() {
        assert!(abelian(6).validate().ok());
    }

    #[test]
    fn paper_algebras_validate() {
        assert!(sec4_algebra().validate().ok());
        assert!(sec5_algebra(std::f64::consts::SQRT_2).validate().ok());
        assert!(heisenberg().validate().ok());
        assert!(jacobi_residual(&sec4_algebra()) == 0.0);
        assert!(jacobi_residual(&sec5_algebra(std::f64::consts::SQRT_2)) < 1e-15);
    }

    #[test]
    fn sign_flip_in_semidirect_action_keeps_jacobi() {
        // Flipping C_{15}^4 from -1 to +1 in the wild algebra leaves a valid
        // Lie algebra: only e1 acts nontrivially, so every Jacobi sum still
        // vanishes. The brute-force oracle confirms this.
        let alpha = std::f64::consts::SQRT_2;
        let alg = LieAlgebra::new(
            5,
            &[
                (1, 2, 3, Scalar::Float(1.0)),
                (1, 3, 2, Scalar::Float(-1.0)),
                (1, 4, 5, Scalar::Float(alpha * alpha)),
                (1, 5, 4, Scalar::Float(1.0)),
            ],
        )
        .unwrap();
        assert!(alg.validate().ok());
        assert!(jacobi_residual(&alg) < 1e-15);
    }

    #[test]
    fn corrupted_sec4_fails_jacobi() {
        // Flip C_{34}^3 from -2 to +2: the Jacobi sum over (3,4,5) picks up
        // 4 e_4 (oracle: [[e3,e4],e5] = 2e4 and [[e4,e5],e3] = 2e4).
        let mut entries: Vec<(usize, usize, usize, Scalar)> = vec![
            (1, 4, 1, Scalar::from_int(-1)),
            (1, 5, 2, Scalar::from_int(1)),
            (2, 3, 1, Scalar::from_int(1)),
            (2, 4, 2, Scalar::from_int(1)),
            (3, 4, 3, Scalar::from_int(2)),
            (3, 5, 4, Scalar::from_int(1)),
            (4, 5, 5, Scalar::from_int(-2)),
        ];
        entries.sort_by_key(|e| (e.0, e.1));
        let alg = LieAlgebra::new(5, &entries).unwrap();
        let rep = alg.validate();
        assert!(!rep.ok());
        assert!(rep.jacobi_violations.contains(&(3, 4, 5, 4)));
        assert!(jacobi_residual(&alg) > 0.1);
    }

    #[test]
    fn pairing_matrix_examples() {
        // Abelian: zero matrix.
        let alg = abelian(4);
        let lam: Vec<Scalar> = (0..4).map(|i| Scalar::from_int(i as i64 + 1)).collect();
        let b = alg.pairing_matrix(&lam);
        assert!(b.data.iter().all(|v| v.is_zero(0.0)));

        // Wild algebra at λ = (0,0,1,0,0): only B_12 = 1 = -B_21.
        let alg5 = sec5_algebra(std::f64::consts::SQRT_2);
        let lam5: Vec<Scalar> =
            vec![0.0, 0.0, 1.0, 0.0, 0.0].into_iter().map(Scalar::Float).collect();
        let b5 = alg5.pairing_matrix(&lam5);
        for i in 0..5 {
            for j in 0..5 {
                let expect = match (i, j) {
                    (0, 1) => 1.0,
                    (1, 0) => -1.0,
                    _ => 0.0,
                };
                assert!((b5.get(i, j).to_f64() - expect).abs() < 1e-15, "B[{i}][{j}]");
            }
        }

        // First example algebra at λ = (1,0,0,0,0): B_14 = -1, B_23 = 1.
        let alg4 = sec4_algebra();
        let lam4: Vec<Scalar> = vec![1, 0, 0, 0, 0].into_iter().map(Scalar::from_int).collect();
        let b4 = alg4.pairing_matrix(&lam4);
        for i in 0..5 {
            for j in 0..5 {
                let expect = match (i, j) {
                    (0, 3) => -1.0,
                    (3, 0) => 1.0,
                    (1, 2) => 1.0,
                    (2, 1) => -1.0,
                    _ => 0.0,
                };
                assert_eq!(b4.get(i, j).to_f64(), expect, "B[{i}][{j}]");
            }
        }
    }

    #[test]
    fn annihilator_examples() {
        // Abelian: full space.
        let alg = abelian(4);
        let lam: Vec<Scalar> = (0..4).map(|_| Scalar::from_int(3)).collect();
        assert_eq!(alg.annihilator(&lam).len(), 4);

        // Heisenberg at λ = (0,0,1): span{e3}.
        let h = heisenberg();
        let lam3: Vec<Scalar> = vec![0, 0, 1].into_iter().map(Scalar::from_int).collect();
        let ker = h.annihilator(&lam3);
        assert_eq!(ker.len(), 1);
        assert!(ker[0][0].is_zero(0.0) && ker[0][1].is_zero(0.0));
        assert!(!ker[0][2].is_zero(0.0));

        // First example at λ = (1,0,0,0,0): span{e5}.
        let alg4 = sec4_algebra();
        let lam4: Vec<Scalar> = vec![1, 0, 0, 0, 0].into_iter().map(Scalar::from_int).collect();
        let ker4 = alg4.annihilator(&lam4);
        assert_eq!(ker4.len(), 1);
        for i in 0..4 {
            assert!(ker4[0][i].is_zero(0.0));
        }
        assert!(!ker4[0][4].is_zero(0.0));
    }

    #[test]
    fn algebra_index_values() {
        assert_eq!(sec4_algebra().index(7), 1);
        assert_eq!(sec5_algebra(std::f64::consts::SQRT_2).index(7), 3);
        assert_eq!(abelian(4).index(7), 4);
        assert_eq!(heisenberg().index(7), 1);
    }

    #[test]
    fn lie_poisson_basis_bracket() {
        // {P_1, P_2} at P = (1,1,2,1,1) on the wild algebra: C_12^3 P_3 = 2.
        let alg = sec5_algebra(std::f64::consts::SQRT_2);
        let p1 = CoalgebraClosure::coordinate(0, 5);
        let p2 = CoalgebraClosure::coordinate(1, 5);
        let pt = [1.0, 1.0, 2.0, 1.0, 1.0];
        let v = alg.lie_poisson_bracket(&p1, &p2, &pt);
        assert!((v - 2.0).abs() < 1e-12);
        // Antisymmetry: {f, f} = 0.
        assert_eq!(alg.lie_poisson_bracket(&p1, &p1, &pt), 0.0);
        // Abelian: everything commutes.
        let ab = abelian(5);
        assert_eq!(ab.lie_poisson_bracket(&p1, &p2, &pt), 0.0);
    }

    #[test]
    fn index_is_basis_invariant() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for alg in [sec4_algebra(), heisenberg()] {
            let n = alg.n;
            // Random invertible rational matrix (retry until invertible).
            loop {
                let s: Vec<Vec<Scalar>> = (0..n)
                    .map(|_| (0..n).map(|_| Scalar::from_int(rng.gen_range(-3..=3))).collect())
                    .collect();
                match alg.change_basis(&s) {
                    Ok(alg2) => {
                        assert!(alg2.validate().ok());
                        assert_eq!(alg2.index(3), alg.index(3));
                        break;
                    }
                    Err(_) => continue,
                }
            }
        }
    }
}
