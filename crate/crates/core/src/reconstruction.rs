//! Minimum-norm multi-frequency source reconstruction.
//!
//! Given boundary traces `γu_j` at frequencies `k_1 < … < k_J`, the adjoint
//! fields `ψ_j` (solved with `η_j = γu_j`) span the space the minimum-norm
//! source lives in. Writing `f_min = Σ α_i ψ_i`, the coefficients solve the
//! Hermitian normal equations
//!
//! ```text
//! Σ_i α_i ⟨ψ_i, ψ_j⟩ = h_j⁻¹ ‖γu_j‖²_{L²(Γ)},   j = 1, …, J.
//! ```

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::helmholtz::solve_adjoint;
use crate::media::{MediumSpec, SourceSpec};
use crate::radial::{
    boundary_inner_product, distance_profile_real, inner_product_profile, inner_product_volume,
    norm_profile, norm_volume, RadialField, RadialGrid,
};

/// Relative eigenvalue cut-off used when the plain Hermitian solve is
/// numerically singular.
pub const FALLBACK_RCOND: f64 = 1e-11;

/// One boundary measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub k: f64,
    pub trace: Complex64,
    pub h: Complex64,
}

/// Where a measurement set came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub grid_id: String,
    pub noise_level: f64,
}

/// Boundary traces at strictly increasing positive frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    entries: Vec<Measurement>,
    radius: f64,
    provenance: Provenance,
}

impl MeasurementSet {
    pub fn new(entries: Vec<Measurement>, radius: f64, provenance: Provenance) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("measurement radius must be positive"));
        }
        if entries.first().is_some_and(|m| !(m.k > 0.0)) {
            return Err(invalid("frequencies must be positive"));
        }
        if entries.windows(2).any(|w| !(w[1].k > w[0].k)) {
            return Err(invalid("frequencies must be strictly increasing"));
        }
        if entries.iter().any(|m| m.h.norm() == 0.0) {
            return Err(invalid("frequency weight h(k) must not vanish"));
        }
        if entries.iter().any(|m| !m.trace.re.is_finite() || !m.trace.im.is_finite()) {
            return Err(Error::NonFinite("measurement traces"));
        }
        Ok(Self { entries, radius, provenance })
    }

    pub fn entries(&self) -> &[Measurement] {
        &self.entries
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.entries.iter().map(|m| m.k).collect()
    }

    /// The first `j` measurements.
    pub fn prefix(&self, j: usize) -> Self {
        Self {
            entries: self.entries[..j.min(self.entries.len())].to_vec(),
            radius: self.radius,
            provenance: self.provenance.clone(),
        }
    }
}

/// Hermitian Gram matrix `G[j][i] = ⟨ψ_i, ψ_j⟩` and right-hand side `c`.
#[derive(Debug, Clone)]
pub struct GramSystem {
    matrix: DMatrix<Complex64>,
    rhs: Vec<Complex64>,
    eigenvalues: Vec<f64>,
}

impl GramSystem {
    /// Builds a system from an explicit matrix, symmetrizing it as `(G + Gᴴ)/2`.
    pub fn from_parts(matrix: DMatrix<Complex64>, rhs: Vec<Complex64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != rhs.len() {
            return Err(invalid("Gram matrix and right-hand side sizes differ"));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("Gram matrix"));
        }
        let matrix = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut eigenvalues: Vec<f64> = if matrix.nrows() == 0 {
            Vec::new()
        } else {
            SymmetricEigen::new(matrix.clone()).eigenvalues.iter().copied().collect()
        };
        eigenvalues.sort_by(|a, b| a.total_cmp(b));
        Ok(Self { matrix, rhs, eigenvalues })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &[Complex64] {
        &self.rhs
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `λ_max / λ_min`, infinite when `λ_min ≤ 0`.
    pub fn condition_estimate(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(&lo), Some(&hi)) if lo > 0.0 => hi / lo,
            (Some(_), Some(_)) => f64::INFINITY,
            _ => 1.0,
        }
    }

    /// Leading `j × j` block with the matching right-hand side.
    pub fn leading(&self, j: usize) -> Result<Self> {
        let j = j.min(self.dim());
        Self::from_parts(self.matrix.view((0, 0), (j, j)).into_owned(), self.rhs[..j].to_vec())
    }
}

/// Dense complex matrix used for Gram systems.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Builds the Gram system for adjoint fields solved with `η_j = γu_j`.
pub fn assemble_gram(
    adjoint_fields: &[RadialField],
    measurements: &MeasurementSet,
) -> Result<GramSystem> {
    let j = adjoint_fields.len();
    if j != measurements.len() {
        return Err(invalid(alloc::format!(
            "{j} adjoint fields for {} measurements",
            measurements.len()
        )));
    }
    let mut g = DMatrix::from_element(j, j, Complex64::new(0.0, 0.0));
    for row in 0..j {
        for col in row..j {
            // G[row][col] = ⟨ψ_col, ψ_row⟩
            let v = inner_product_volume(&adjoint_fields[col], &adjoint_fields[row])?;
            g[(row, col)] = v;
            g[(col, row)] = v.conj();
        }
    }
    GramSystem::from_parts(g, measurement_constraints(measurements))
}

/// Right-hand side `c_j = h_j⁻¹ ‖γu_j‖²_{L²(Γ)}` of the normal equations.
pub fn measurement_constraints(measurements: &MeasurementSet) -> Vec<Complex64> {
    let radius = measurements.radius();
    measurements
        .entries()
        .iter()
        .map(|m| boundary_inner_product(m.trace, m.trace, radius) / m.h)
        .collect()
}

/// Adjoint fields `ψ_j` for `η_j = γu_j` on `grid`: one solve with unit
/// boundary data per frequency, scaled by the trace.
pub fn adjoint_fields(
    m: &MediumSpec,
    measurements: &MeasurementSet,
    grid: &Arc<RadialGrid>,
) -> Result<Vec<RadialField>> {
    measurements
        .entries()
        .iter()
        .map(|e| Ok(solve_adjoint(m, Complex64::new(1.0, 0.0), e.k, grid)?.scaled(e.trace)))
        .collect()
}

/// Right-hand side `c_j = ⟨f, ψ_j⟩` computed volumetrically from a known source.
pub fn volumetric_constraints(f: &SourceSpec, fields: &[RadialField]) -> Vec<Complex64> {
    fields.iter().map(|psi| inner_product_profile(f.profile(), psi)).collect()
}

/// Regularization applied to the normal equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    /// Plain Hermitian solve, falling back to `Tsvd(FALLBACK_RCOND)` when the
    /// matrix is numerically singular.
    None,
    /// `(G + λI) α = c`.
    Tikhonov(f64),
    /// Spectral truncation below `rcond · λ_max`.
    Tsvd(f64),
}

/// Which path the normal-equation solve actually took.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveMethod {
    Cholesky,
    Tikhonov(f64),
    Tsvd(f64),
}

/// Coefficients and diagnostics from [`solve_normal_equations`].
#[derive(Debug, Clone)]
pub struct NormalSolution {
    pub alphas: Vec<Complex64>,
    pub condition: f64,
    pub effective_rank: usize,
    pub method: SolveMethod,
}

fn tsvd_solve(gs: &GramSystem, rcond: f64) -> (Vec<Complex64>, usize) {
    let eig = SymmetricEigen::new(gs.matrix.clone());
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let c = DVector::from_column_slice(&gs.rhs);
    let mut alpha = DVector::from_element(gs.dim(), Complex64::new(0.0, 0.0));
    let mut rank = 0;
    // Accumulate in ascending eigenvalue order for a fixed summation order.
    let mut order: Vec<usize> = (0..gs.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    for i in order {
        let lam = eig.eigenvalues[i];
        if lam > rcond * lmax && lam > 0.0 {
            let v = eig.eigenvectors.column(i);
            let coef = v.dotc(&c) / lam;
            alpha += v * coef;
            rank += 1;
        }
    }
    (alpha.iter().copied().collect(), rank)
}

/// Solves the normal equations `G α = c` under the requested regularization.
pub fn solve_normal_equations(gs: &GramSystem, reg: Regularization) -> Result<NormalSolution> {
    let condition = gs.condition_estimate();
    let n = gs.dim();
    let sol = match reg {
        Regularization::Tikhonov(lambda) if !(lambda >= 0.0) => {
            return Err(invalid("Tikhonov parameter must be non-negative"));
        }
        Regularization::Tsvd(rcond) if !(rcond > 0.0 && rcond < 1.0) => {
            return Err(invalid("TSVD rcond must lie in (0, 1)"));
        }
        Regularization::None => {
            let chol = if condition.is_finite() && condition * FALLBACK_RCOND < 1.0 {
                gs.matrix.clone().cholesky()
            } else {
                None
            };
            match chol {
                Some(ch) => NormalSolution {
                    alphas: ch.solve(&DVector::from_column_slice(&gs.rhs)).iter().copied().collect(),
                    condition,
                    effective_rank: n,
                    method: SolveMethod::Cholesky,
                },
                None => {
                    let (alphas, rank) = tsvd_solve(gs, FALLBACK_RCOND);
                    NormalSolution {
                        alphas,
                        condition,
                        effective_rank: rank,
                        method: SolveMethod::Tsvd(FALLBACK_RCOND),
                    }
                }
            }
        }
        Regularization::Tikhonov(lambda) => {
            let shifted = &gs.matrix + DMatrix::identity(n, n) * Complex64::new(lambda, 0.0);
            let c = DVector::from_column_slice(&gs.rhs);
            let alphas = match shifted.clone().cholesky() {
                Some(ch) => ch.solve(&c),
                None => shifted
                    .lu()
                    .solve(&c)
                    .ok_or_else(|| invalid("Tikhonov system is singular; increase λ"))?,
            };
            NormalSolution {
                alphas: alphas.iter().copied().collect(),
                condition,
                effective_rank: n,
                method: SolveMethod::Tikhonov(lambda),
            }
        }
        Regularization::Tsvd(rcond) => {
            let (alphas, rank) = tsvd_solve(gs, rcond);
            NormalSolution { alphas, condition, effective_rank: rank, method: SolveMethod::Tsvd(rcond) }
        }
    };
    if sol.alphas.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::NonFinite("normal equations"));
    }
    Ok(sol)
}

/// Health indicators of a reconstruction.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub condition: f64,
    pub effective_rank: usize,
    /// `|⟨f_min, ψ_j⟩ − c_j| / |c_j|` per constraint (empty if not computed).
    pub constraint_residuals: Vec<f64>,
    /// `‖Im f_min‖ / ‖f_min‖`.
    pub imag_ratio: f64,
    /// Normal-equation path taken, if any.
    pub method: Option<SolveMethod>,
}

/// Reconstructed source with its expansion coefficients.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub alphas: Vec<Complex64>,
    pub estimate: RadialField,
    pub diagnostics: Diagnostics,
}

/// `f_min = Σ α_i ψ_i`, accumulated node by node in index order.
pub fn synthesize_min_norm(
    alphas: &[Complex64],
    adjoint_fields: &[RadialField],
) -> Result<ReconstructionResult> {
    if alphas.len() != adjoint_fields.len() {
        return Err(invalid("coefficient and field counts differ"));
    }
    let first = adjoint_fields.first().ok_or_else(|| invalid("no adjoint fields supplied"))?;
    let grid = first.grid().clone();
    let mut values = alloc::vec![Complex64::new(0.0, 0.0); grid.len()];
    for (a, psi) in alphas.iter().zip(adjoint_fields) {
        if !psi.shares_grid(first) {
            return Err(Error::GridMismatch);
        }
        for (v, p) in values.iter_mut().zip(psi.values()) {
            *v += a * p;
        }
    }
    let estimate = RadialField::untagged(grid, values)?;
    let total = norm_volume(&estimate);
    let imag_ratio = if total == 0.0 { 0.0 } else { norm_volume(&estimate.imag_part()) / total };
    Ok(ReconstructionResult {
        alphas: alphas.to_vec(),
        estimate,
        diagnostics: Diagnostics { imag_ratio, ..Diagnostics::default() },
    })
}

/// `|⟨f, ψ_j⟩ − c_j| / |c_j|` for every constraint.
pub fn constraint_residuals(
    estimate: &RadialField,
    adjoint_fields: &[RadialField],
    rhs: &[Complex64],
) -> Result<Vec<f64>> {
    adjoint_fields
        .iter()
        .zip(rhs)
        .map(|(psi, c)| {
            let v = inner_product_volume(estimate, psi)?;
            let scale = c.norm();
            Ok(if scale == 0.0 { v.norm() } else { (v - c).norm() / scale })
        })
        .collect()
}

/// Full minimum-norm pipeline: Gram system, normal equations, synthesis and
/// diagnostics.
pub fn minimum_norm_reconstruction(
    adjoint_fields: &[RadialField],
    gram: &GramSystem,
    reg: Regularization,
) -> Result<ReconstructionResult> {
    let sol = solve_normal_equations(gram, reg)?;
    let mut result = synthesize_min_norm(&sol.alphas, adjoint_fields)?;
    result.diagnostics.condition = sol.condition;
    result.diagnostics.effective_rank = sol.effective_rank;
    result.diagnostics.method = Some(sol.method);
    result.diagnostics.constraint_residuals =
        constraint_residuals(&result.estimate, adjoint_fields, gram.rhs())?;
    Ok(result)
}

/// `‖f_true − Re f_min‖ / ‖f_true‖` in `L²(Ω)`, quadratured on the estimate's grid.
pub fn relative_error(f_true: &SourceSpec, estimate: &ReconstructionResult) -> Result<f64> {
    let grid = estimate.estimate.grid();
    let denom = norm_profile(f_true.profile(), grid);
    if denom == 0.0 {
        return Err(invalid("relative error is undefined for a zero source"));
    }
    let err = distance_profile_real(f_true.profile(), &estimate.estimate) / denom;
    if !Float::is_finite(err) {
        return Err(Error::NonFinite("relative error"));
    }
    Ok(err)
}
