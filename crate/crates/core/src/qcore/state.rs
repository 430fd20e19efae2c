use crate::error::{Error, Result};
use crate::{TAU_EIG, TAU_NORM};

use super::layout::RegisterLayout;
use super::mat::{eigh, CMat, C64};

/// Normalized pure state on a register layout.
#[derive(Clone, Debug)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(layout: RegisterLayout, amps: Vec<C64>) -> Result<Self> {
        let v = Self::unnormalized(layout, amps)?;
        let n = v.norm_sqr();
        if (n - 1.0).abs() > TAU_NORM {
            return Err(Error::InvalidState(format!("squared norm {n} is not 1")));
        }
        Ok(v)
    }

    /// Skips the norm check. Used for intermediate vectors such as projections.
    pub fn unnormalized(layout: RegisterLayout, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::Shape(format!(
                "{} amplitudes for a layout of dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        Ok(StateVector { layout, amps })
    }

    /// Computational basis state with the given per-factor digits.
    pub fn basis(layout: RegisterLayout, digits: &[usize]) -> Result<Self> {
        if digits.len() != layout.len()
            || digits.iter().zip(layout.factors()).any(|(&d, f)| d >= f.dim)
        {
            return Err(Error::Layout(format!("invalid basis digits {digits:?}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); layout.total_dim()];
        amps[layout.flat_index(digits)] = C64::new(1.0, 0.0);
        Ok(StateVector { layout, amps })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, digits: &[usize]) -> C64 {
        self.amps[self.layout.flat_index(digits)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.layout != other.layout {
            return Err(Error::Layout("inner product of states on different layouts".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Applies `op` to the factors at positions `idx` (sorted, layout order).
    pub fn apply_local(&self, op: &CMat, idx: &[usize]) -> Result<StateVector> {
        let sub_dim = self.layout.dim_of(idx);
        if op.rows() != sub_dim || op.cols() != sub_dim {
            return Err(Error::Shape(format!(
                "{}x{} operator on a subsystem of dimension {sub_dim}",
                op.rows(),
                op.cols()
            )));
        }
        let bp = self.layout.bipartition(idx);
        let mut blocks = vec![vec![C64::new(0.0, 0.0); sub_dim]; bp.rest_dim];
        let mut slot = vec![0usize; bp.rest_dim * sub_dim];
        for (i, z) in self.amps.iter().enumerate() {
            blocks[bp.rest[i]][bp.sub[i]] = *z;
            slot[bp.rest[i] * sub_dim + bp.sub[i]] = i;
        }
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (r, block) in blocks.iter().enumerate() {
            for (j, z) in op.apply(block).into_iter().enumerate() {
                amps[slot[r * sub_dim + j]] = z;
            }
        }
        Ok(StateVector { layout: self.layout.clone(), amps })
    }

    /// The amplitudes arranged as a matrix with rows indexed by the factors
    /// at `idx` and columns by the remaining factors.
    pub fn matrix_form(&self, idx: &[usize]) -> CMat {
        let bp = self.layout.bipartition(idx);
        let mut m = CMat::zeros(bp.sub_dim, bp.rest_dim);
        for (i, z) in self.amps.iter().enumerate() {
            m.set(bp.sub[i], bp.rest[i], *z);
        }
        m
    }

    /// Reduced state on the factors at `idx`, tracing out everything else.
    pub fn reduced(&self, idx: &[usize]) -> Result<DensityOp> {
        let psi = self.matrix_form(idx);
        DensityOp::new(&psi * &psi.adjoint())
    }

    /// Reduced state on the named factors.
    pub fn reduced_on<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOp> {
        let idx = self.layout.indices_of(keep)?;
        self.reduced(&idx)
    }

    /// Projects the given factors onto fixed basis digits and drops them,
    /// returning the (unnormalized) remainder on the other factors.
    pub fn condition(&self, fixed: &[(usize, usize)]) -> Result<StateVector> {
        let keep: Vec<usize> =
            (0..self.layout.len()).filter(|k| fixed.iter().all(|&(f, _)| f != *k)).collect();
        let layout = self.layout.restrict(&keep)?;
        let mut amps = Vec::with_capacity(layout.total_dim());
        for i in 0..self.amps.len() {
            let d = self.layout.digits(i);
            if fixed.iter().all(|&(f, v)| d[f] == v) {
                amps.push(self.amps[i]);
            }
        }
        StateVector::unnormalized(layout, amps)
    }
}

/// Density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug)]
pub struct DensityOp {
    mat: CMat,
}

impl DensityOp {
    pub fn new(mat: CMat) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Shape(format!("density operator {}x{}", mat.rows(), mat.cols())));
        }
        if !mat.is_hermitian(TAU_NORM) {
            return Err(Error::InvalidState("operator is not Hermitian".into()));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TAU_NORM || tr.im.abs() > TAU_NORM {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let (vals, _) = eigh(&mat)?;
        if vals[0] < -TAU_EIG {
            return Err(Error::NotPsd(vals[0]));
        }
        Ok(DensityOp { mat })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector `ψ`.
    pub fn from_pure(amps: &[C64]) -> Result<Self> {
        let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if amps.is_empty() || (n - 1.0).abs() > TAU_NORM {
            return Err(Error::InvalidState(format!("pure state has norm² {n}")));
        }
        Ok(DensityOp { mat: CMat::projector(amps) })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOp { mat: CMat::identity(dim).scale_re(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Convex combination of equally sized states. Weights must sum to one.
    pub fn mixture(parts: &[(f64, &DensityOp)]) -> Result<Self> {
        let dim = parts.first().map(|(_, r)| r.dim()).unwrap_or(0);
        let mut acc = CMat::zeros(dim.max(1), dim.max(1));
        for (w, r) in parts {
            if r.dim() != dim {
                return Err(Error::Shape("mixture of states with different dimensions".into()));
            }
            if *w < 0.0 {
                return Err(Error::InvalidState(format!("negative mixture weight {w}")));
            }
            acc = &acc + &r.mat.scale_re(*w);
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > TAU_NORM {
            return Err(Error::InvalidState(format!("mixture weights sum to {total}")));
        }
        // A convex combination of density operators needs no spectral check.
        Ok(DensityOp { mat: acc.hermitian_part() })
    }
}

/// Traces out every factor of `layout` not named in `keep`. The result is
/// ordered like the kept factors appear in `layout`.
pub fn partial_trace<S: AsRef<str>>(
    state: &DensityOp,
    layout: &RegisterLayout,
    keep: &[S],
) -> Result<DensityOp> {
    if state.dim() != layout.total_dim() {
        return Err(Error::Layout(format!(
            "state of dimension {} on a layout of dimension {}",
            state.dim(),
            layout.total_dim()
        )));
    }
    let idx = layout.indices_of(keep)?;
    let bp = layout.bipartition(&idx);
    // Full index for each (sub, rest) pair.
    let mut full = vec![0usize; bp.sub_dim * bp.rest_dim];
    for i in 0..state.dim() {
        full[bp.sub[i] * bp.rest_dim + bp.rest[i]] = i;
    }
    let m = state.mat();
    let out = CMat::from_fn(bp.sub_dim, bp.sub_dim, |j, k| {
        (0..bp.rest_dim)
            .map(|t| m.get(full[j * bp.rest_dim + t], full[k * bp.rest_dim + t]))
            .sum()
    });
    DensityOp::new(out.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::super::layout::{Factor, Owner};
    use super::*;

    fn two_qubits() -> RegisterLayout {
        RegisterLayout::new(vec![Factor::new("a", 2, Owner::Alice), Factor::new("b", 2, Owner::Bob)])
            .unwrap()
    }

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn trace_out_product_state() {
        let l = two_qubits();
        let psi = StateVector::basis(l.clone(), &[0, 0]).unwrap();
        let rho = DensityOp::from_pure(psi.amps()).unwrap();
        let red = partial_trace(&rho, &l, &["a"]).unwrap();
        assert!(red.mat().approx_eq(&CMat::from_real_diag(&[1.0, 0.0]), TAU_NORM));
    }

    #[test]
    fn bell_state_marginals_are_maximally_mixed() {
        let l = two_qubits();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(l.clone(), vec![r(s), r(0.0), r(0.0), r(s)]).unwrap();
        let rho = DensityOp::from_pure(bell.amps()).unwrap();
        for keep in ["a", "b"] {
            let red = partial_trace(&rho, &l, &[keep]).unwrap();
            assert!(red.mat().approx_eq(DensityOp::maximally_mixed(2).mat(), TAU_NORM));
            assert!(bell.reduced_on(&[keep]).unwrap().mat().approx_eq(red.mat(), TAU_NORM));
        }
    }

    #[test]
    fn partial_trace_rejects_dimension_mismatch() {
        let l = two_qubits();
        let rho = DensityOp::maximally_mixed(3);
        assert!(matches!(partial_trace(&rho, &l, &["a"]), Err(Error::Layout(_))));
        let rho = DensityOp::maximally_mixed(4);
        assert!(matches!(partial_trace(&rho, &l, &["zz"]), Err(Error::Layout(_))));
    }

    #[test]
    fn apply_local_on_second_factor() {
        let l = two_qubits();
        let x = CMat::from_row_major(2, 2, vec![r(0.0), r(1.0), r(1.0), r(0.0)]).unwrap();
        let psi = StateVector::basis(l.clone(), &[1, 0]).unwrap();
        let out = psi.apply_local(&x, &[1]).unwrap();
        assert!((out.amp(&[1, 1]) - r(1.0)).norm() < 1e-15);
    }

    #[test]
    fn condition_drops_fixed_factor() {
        let l = two_qubits();
        let psi = StateVector::basis(l, &[1, 0]).unwrap();
        let rest = psi.condition(&[(1, 0)]).unwrap();
        assert_eq!(rest.layout().names(), vec!["a"]);
        assert!((rest.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(psi.condition(&[(1, 1)]).unwrap().norm_sqr(), 0.0);
    }

    #[test]
    fn invalid_density_operators_are_rejected() {
        assert!(DensityOp::new(CMat::from_real_diag(&[0.5, 0.4])).is_err());
        assert!(matches!(
            DensityOp::new(CMat::from_real_diag(&[1.5, -0.5])),
            Err(Error::NotPsd(_))
        ));
    }
}
