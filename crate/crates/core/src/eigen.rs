//! Dirichlet Sturm–Liouville eigenpairs `∇·(a∇ψ) = −λ b ψ`, `ψ(R) = 0`, and
//! the generalized Fourier reconstruction built on them.
//!
//! The discrete pencil `K − λM` is symmetric tridiagonal with `M` positive
//! definite, so the number of eigenvalues below a shift `σ` equals the number
//! of negative pivots in the `LDLᵀ` factorization of `K − σM`. Eigenvalues are
//! located by bisection on that count and eigenvectors by inverse iteration.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::helmholtz::stiffness_and_mass;
use crate::media::{MediumSpec, SourceSpec};
use crate::radial::{boundary_inner_product, inner_product_profile, norm_volume, RadialField, RadialGrid};
use crate::reconstruction::{Diagnostics, MeasurementSet, ReconstructionResult};
use crate::tridiag::solve_tridiagonal;

const FOUR_PI: f64 = 4.0 * core::f64::consts::PI;

/// Tolerance on `|k_j − √λ_j| / √λ_j` accepted by [`eigen_reconstruct`].
pub const FREQUENCY_MATCH_TOL: f64 = 1e-10;

/// Interior (Dirichlet-reduced) tridiagonal pencil.
struct Pencil {
    kd: Vec<f64>,
    ko: Vec<f64>,
    md: Vec<f64>,
    mo: Vec<f64>,
}

impl Pencil {
    fn new(m: &MediumSpec, grid: &RadialGrid) -> Self {
        let (mut kd, mut ko, mut md, mut mo) = stiffness_and_mass(m, grid);
        kd.pop();
        ko.pop();
        md.pop();
        mo.pop();
        Self { kd, ko, md, mo }
    }

    fn len(&self) -> usize {
        self.kd.len()
    }

    /// Number of pencil eigenvalues strictly below `sigma`.
    fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut d = 0.0;
        for i in 0..self.len() {
            let diag = self.kd[i] - sigma * self.md[i];
            d = if i == 0 {
                diag
            } else {
                let off = self.ko[i - 1] - sigma * self.mo[i - 1];
                let prev = if d == 0.0 { f64::EPSILON * off.abs().max(1e-300) } else { d };
                diag - off * off / prev
            };
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn apply_k(&self, x: &[f64]) -> Vec<f64> {
        tri_apply(&self.ko, &self.kd, x)
    }

    fn apply_m(&self, x: &[f64]) -> Vec<f64> {
        tri_apply(&self.mo, &self.md, x)
    }

    /// `index`-th smallest eigenvalue (0-based), bisected to machine precision.
    fn eigenvalue(&self, index: usize, upper: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, upper);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn inverse_iteration(&self, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
        let n = self.len();
        let lower: Vec<Complex64> =
            self.ko.iter().zip(&self.mo).map(|(k, m)| c(k - lambda * m)).collect();
        let mut diag: Vec<Complex64> =
            self.kd.iter().zip(&self.md).map(|(k, m)| c(k - lambda * m)).collect();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect();
        for _ in 0..4 {
            let rhs: Vec<Complex64> = self.apply_m(&x).into_iter().map(c).collect();
            let y = match solve_tridiagonal(&lower, &diag, &lower, &rhs) {
                Ok(y) => y,
                Err(_) => {
                    // Shift landed exactly on the eigenvalue; nudge it.
                    let eps = lambda * 1e-14;
                    for (d, m) in diag.iter_mut().zip(&self.md) {
                        *d -= c(eps * m);
                    }
                    solve_tridiagonal(&lower, &diag, &lower, &rhs).map_err(|p| {
                        Error::SingularSystem { k: Float::sqrt(lambda), pivot: p.magnitude, row: p.row }
                    })?
                }
            };
            x = y.into_iter().map(|z| z.re).collect();
            for v in previous {
                let proj = m_dot(self, &x, v);
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi -= proj * vi;
                }
            }
            let nrm = Float::sqrt(m_dot(self, &x, &x));
            if !(nrm > 0.0) || !nrm.is_finite() {
                return Err(Error::NonFinite("inverse iteration"));
            }
            for xi in &mut x {
                *xi /= nrm;
            }
        }
        Ok(x)
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn tri_apply(off: &[f64], diag: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut v = diag[i] * x[i];
            if i > 0 {
                v += off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += off[i] * x[i + 1];
            }
            v
        })
        .collect()
}

/// `4π xᵀ M y`, the discrete `L²(Ω, b)` pairing.
fn m_dot(p: &Pencil, x: &[f64], y: &[f64]) -> f64 {
    FOUR_PI * p.apply_m(x).iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
}

/// Eigenpairs of the Dirichlet Sturm–Liouville problem, orthonormal in
/// `L²(Ω, b)`.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    grid: Arc<RadialGrid>,
    medium: MediumSpec,
    eigenvalues: Vec<f64>,
    modes: Vec<RadialField>,
    residuals: Vec<f64>,
}

impl EigenBasis {
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn medium(&self) -> &MediumSpec {
        &self.medium
    }

    /// `λ_1 < λ_2 < …`
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `k_j = √λ_j`
    pub fn frequencies(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|&l| Float::sqrt(l)).collect()
    }

    /// Real eigenfunctions with zero boundary value, stored as complex fields.
    pub fn modes(&self) -> &[RadialField] {
        &self.modes
    }

    /// `‖Kψ_j − λ_j Mψ_j‖₂ / λ_j` on the interior nodes.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `∂_r ψ_j(R)` from the three-point one-sided difference on the last two
    /// elements (second order on non-uniform spacing).
    pub fn boundary_flux(&self, j: usize) -> f64 {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        let v = self.modes[j].values();
        let (x0, x1, x2) = (nodes[n - 3], nodes[n - 2], nodes[n - 1]);
        let (h1, h2) = (x1 - x0, x2 - x1);
        let (f0, f1, f2) = (v[n - 3].re, v[n - 2].re, v[n - 1].re);
        f0 * h2 / (h1 * (h1 + h2)) - f1 * (h1 + h2) / (h1 * h2)
            + f2 * (2.0 * h2 + h1) / (h2 * (h1 + h2))
    }

    /// `⟨f, ψ_j⟩_{L²(Ω)}` computed directly from the source.
    pub fn volumetric_coefficients(&self, f: &SourceSpec) -> Vec<f64> {
        self.modes.iter().map(|psi| inner_product_profile(f.profile(), psi).re).collect()
    }
}

/// Smallest `count` Dirichlet eigenpairs of `−∇·(a∇ψ) = λ b ψ` on `grid`.
pub fn sturm_liouville_eigs(
    m: &MediumSpec,
    grid: &Arc<RadialGrid>,
    count: usize,
) -> Result<EigenBasis> {
    if count == 0 {
        return Err(invalid("at least one eigenpair must be requested"));
    }
    if grid.radius() != m.radius() {
        return Err(invalid("grid and medium radii differ"));
    }
    if let Some(r) = m.breakpoints().into_iter().find(|&r| !grid.has_node(r)) {
        return Err(Error::BreakpointOffGrid(r));
    }
    let pencil = Pencil::new(m, grid);
    let n = pencil.len();
    if count > n {
        return Err(invalid(alloc::format!(
            "{count} eigenpairs requested but the grid has only {n} interior nodes"
        )));
    }
    let mut upper = 1.0;
    while pencil.count_below(upper) < count {
        upper *= 2.0;
    }

    let mut eigenvalues = Vec::with_capacity(count);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for j in 0..count {
        let lambda = pencil.eigenvalue(j, upper);
        let mut x = pencil.inverse_iteration(lambda, &vectors)?;
        if let Some(&first) = x.iter().find(|v| v.abs() > 1e-12) {
            if first < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
        }
        let kx = pencil.apply_k(&x);
        let mx = pencil.apply_m(&x);
        let res: f64 = kx.iter().zip(&mx).map(|(a, b)| (a - lambda * b).powi(2)).sum();
        residuals.push(Float::sqrt(res) / lambda);
        eigenvalues.push(lambda);
        vectors.push(x);
    }
    if eigenvalues.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("eigenvalues are not simple on this grid; refine it"));
    }
    let modes = vectors
        .into_iter()
        .map(|v| {
            let values = v.into_iter().map(c).chain(core::iter::once(c(0.0))).collect();
            RadialField::untagged(Arc::clone(grid), values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenBasis { grid: Arc::clone(grid), medium: m.clone(), eigenvalues, modes, residuals })
}

/// Generalized Fourier reconstruction `f = b Σ α_j ψ_j` with
/// `α_j = h_j⁻¹ ⟨γu_j, ∂_ν ψ_j⟩_{L²(Γ)}` from traces measured at `k_j = √λ_j`.
///
/// Uses as many modes as there are measurements.
pub fn eigen_reconstruct(
    m: &MediumSpec,
    basis: &EigenBasis,
    traces: &MeasurementSet,
) -> Result<ReconstructionResult> {
    if traces.is_empty() || traces.len() > basis.len() {
        return Err(invalid(alloc::format!(
            "need between 1 and {} measurements, got {}",
            basis.len(),
            traces.len()
        )));
    }
    let radius = basis.grid.radius();
    let mut alphas = Vec::with_capacity(traces.len());
    for (j, meas) in traces.entries().iter().enumerate() {
        let kj = Float::sqrt(basis.eigenvalues[j]);
        if (meas.k - kj).abs() > FREQUENCY_MATCH_TOL * kj {
            return Err(invalid(alloc::format!(
                "measurement {j} at k = {} does not match eigenfrequency {kj}",
                meas.k
            )));
        }
        let eta = c(basis.boundary_flux(j));
        alphas.push(boundary_inner_product(meas.trace, eta, radius) / meas.h);
    }
    let grid = &basis.grid;
    let mut values = alloc::vec![c(0.0); grid.len()];
    for (a, psi) in alphas.iter().zip(&basis.modes) {
        for (v, p) in values.iter_mut().zip(psi.values()) {
            *v += a * p;
        }
    }
    for (v, &r) in values.iter_mut().zip(grid.nodes()) {
        *v *= m.b().value(r);
    }
    let estimate = RadialField::untagged(Arc::clone(grid), values)?;
    let total = norm_volume(&estimate);
    let imag_ratio = if total == 0.0 { 0.0 } else { norm_volume(&estimate.imag_part()) / total };
    Ok(ReconstructionResult {
        alphas,
        estimate,
        diagnostics: Diagnostics {
            condition: 1.0,
            effective_rank: traces.len(),
            constraint_residuals: Vec::new(),
            imag_ratio,
            method: None,
        },
    })
}
