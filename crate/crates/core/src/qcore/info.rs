use crate::error::{Error, Result};
use crate::{TAU_EIG, TAU_NORM};

use super::mat::{eigh, singular_values, svd, CMat, C64};
use super::state::{DensityOp, StateVector};

/// Projective two-outcome measurement. Outcome `pos` guesses the first of a
/// pair of states, `neg` the second.
#[derive(Clone, Debug)]
pub struct TwoOutcomeMeasurement {
    pos: CMat,
    neg: CMat,
}

impl TwoOutcomeMeasurement {
    pub fn new(pos: CMat, neg: CMat) -> Result<Self> {
        if !pos.is_square() || pos.rows() != neg.rows() || pos.cols() != neg.cols() {
            return Err(Error::Shape("measurement projectors must be square and equal-sized".into()));
        }
        for (name, p) in [("pos", &pos), ("neg", &neg)] {
            if !p.is_hermitian(TAU_EIG) || !(p * p).approx_eq(p, TAU_EIG) {
                return Err(Error::InvalidState(format!("{name} is not a projector")));
            }
        }
        if !(&pos + &neg).approx_eq(&CMat::identity(pos.rows()), TAU_NORM) {
            return Err(Error::InvalidState("projectors do not sum to the identity".into()));
        }
        Ok(TwoOutcomeMeasurement { pos, neg })
    }

    /// `{P, I − P}`.
    pub fn from_projector(pos: CMat) -> Result<Self> {
        let neg = &CMat::identity(pos.rows()) - &pos;
        Self::new(pos, neg)
    }

    pub fn dim(&self) -> usize {
        self.pos.rows()
    }

    pub fn pos(&self) -> &CMat {
        &self.pos
    }

    pub fn neg(&self) -> &CMat {
        &self.neg
    }

    /// Probability of outcome `pos` on `rho`.
    pub fn prob_pos(&self, rho: &DensityOp) -> f64 {
        (&self.pos * rho.mat()).trace().re
    }

    /// Probability of outcome `neg` on `rho`.
    pub fn prob_neg(&self, rho: &DensityOp) -> f64 {
        (&self.neg * rho.mat()).trace().re
    }

    /// Success probability for telling `first` from `second`, each sent with
    /// probability one half.
    pub fn success(&self, first: &DensityOp, second: &DensityOp) -> f64 {
        0.5 * self.prob_pos(first) + 0.5 * self.prob_neg(second)
    }
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Shape(format!("trace norm of {}x{} matrix", m.rows(), m.cols())));
    }
    if m.is_hermitian(TAU_NORM) {
        let (vals, _) = eigh(m)?;
        return Ok(vals.iter().map(|v| v.abs()).sum());
    }
    Ok(singular_values(m).iter().sum())
}

fn same_dim(rho: &DensityOp, xi: &DensityOp) -> Result<()> {
    if rho.dim() != xi.dim() {
        return Err(Error::Shape(format!("states of dimension {} and {}", rho.dim(), xi.dim())));
    }
    Ok(())
}

/// Optimal probability of identifying one of two equiprobable states.
pub fn guess_prob(rho: &DensityOp, xi: &DensityOp) -> Result<f64> {
    same_dim(rho, xi)?;
    Ok(0.5 + 0.25 * trace_norm(&(rho.mat() - xi.mat()))?)
}

/// Helstrom measurement for `rho` vs `xi`: projects onto the nonnegative and
/// negative eigenspaces of `rho − xi`. Returns the measurement together with
/// its success probability evaluated from the projectors.
pub fn helstrom(rho: &DensityOp, xi: &DensityOp) -> Result<(TwoOutcomeMeasurement, f64)> {
    same_dim(rho, xi)?;
    let n = rho.dim();
    let (vals, vecs) = eigh(&(rho.mat() - xi.mat()))?;
    let mut pos = CMat::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        if v >= 0.0 {
            let col: Vec<C64> = (0..n).map(|r| vecs.get(r, k)).collect();
            pos = &pos + &CMat::projector(&col);
        }
    }
    let m = TwoOutcomeMeasurement::from_projector(pos)?;
    let p = m.success(rho, xi);
    Ok((m, p))
}

/// Positive square root. Eigenvalues in `[−τ_eig, 0)` are treated as zero.
pub fn herm_sqrt(rho: &DensityOp) -> Result<CMat> {
    let (vals, vecs) = eigh(rho.mat())?;
    if vals[0] < -TAU_EIG {
        return Err(Error::NotPsd(vals[0]));
    }
    let roots: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let out = &(&vecs * &CMat::from_real_diag(&roots)) * &vecs.adjoint();
    Ok(out.hermitian_part())
}

/// `‖√ρ √ξ‖₁`.
pub fn fidelity(rho: &DensityOp, xi: &DensityOp) -> Result<f64> {
    same_dim(rho, xi)?;
    let f = trace_norm(&(&herm_sqrt(rho)? * &herm_sqrt(xi)?))?;
    Ok(f.min(1.0))
}

/// Unitary on the `b_factors` subsystem maximizing `⟨φ|(I ⊗ U)|ψ⟩`, together
/// with the overlap it attains. By Uhlmann's theorem the overlap is the
/// fidelity of the reduced states on the remaining factors.
pub fn uhlmann_unitary<S: AsRef<str>>(
    phi: &StateVector,
    psi: &StateVector,
    b_factors: &[S],
) -> Result<(CMat, f64)> {
    if phi.layout() != psi.layout() {
        return Err(Error::Layout("purifications live on different layouts".into()));
    }
    let layout = phi.layout();
    let b_idx = layout.indices_of(b_factors)?;
    if b_idx.is_empty() || b_idx.len() == layout.len() {
        return Err(Error::Layout(
            "the unitary must act on a nonempty strict subset of factors".into(),
        ));
    }
    let a_idx: Vec<usize> = (0..layout.len()).filter(|k| !b_idx.contains(k)).collect();
    // Rows: the untouched factors; columns: the b subsystem.
    let phi_m = phi.matrix_form(&a_idx);
    let psi_m = psi.matrix_form(&a_idx);
    // M[j,k] = ⟨φ|(I ⊗ |k⟩⟨j|)|ψ⟩, so that ⟨φ|(I ⊗ U)|ψ⟩ = Tr(U M).
    let m = &psi_m.transpose() * &phi_m.conj();
    let (w, _, v_adj) = svd(&m);
    let u = &v_adj.adjoint() * &w.adjoint();
    let overlap = phi.inner(&psi.apply_local(&u, &b_idx)?)?;
    Ok((u, overlap.re))
}
