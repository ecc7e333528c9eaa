//! Radial finite-element solvers for the direct and adjoint Helmholtz
//! problems on a ball, closed by the exact Dirichlet-to-Neumann multiplier of
//! the outgoing spherical wave, plus closed-form homogeneous-medium oracles.
//!
//! The weak forms are divided by the common `4π`: for linear hat functions
//! `φ_i` on the radial grid,
//!
//! ```text
//! ∫₀^R (a u' φ_i' − k² b u φ_i) r² dr − R² Λ u(R) φ_i(R) = h ∫₀^R f φ_i r² dr   (direct)
//! ∫₀^R (a ψ' φ_i' − k² b ψ φ_i) r² dr − R² Λ̄ ψ(R) φ_i(R) = R² η φ_i(R)          (adjoint)
//! ```
//!
//! with `Λ = ik − 1/R`. The origin carries the natural condition; the `r²`
//! weight removes the coordinate singularity.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::media::{MediumSpec, SourceSpec};
use crate::quadrature::integrate_adaptive;
use crate::radial::{
    boundary_inner_product, inner_product_profile, RadialField, RadialGrid,
};
use crate::tridiag::{solve_tridiagonal, tridiagonal_apply};

/// Which sesquilinear form an [`AssembledSystem`] discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Direct,
    Adjoint,
}

/// Exterior DtN multiplier `ik − 1/R`: `∂_r u = Λ u` at `r = R` for `e^{ikr}/r`.
pub fn dtn_coefficient(k: f64, radius: f64) -> Result<Complex64> {
    if !(k > 0.0 && radius > 0.0) {
        return Err(invalid("DtN coefficient needs k > 0 and R > 0"));
    }
    Ok(Complex64::new(-1.0 / radius, k))
}

/// `L²(Γ)` adjoint of the DtN multiplier, `−ik − 1/R`.
pub fn adjoint_dtn_coefficient(k: f64, radius: f64) -> Result<Complex64> {
    Ok(dtn_coefficient(k, radius)?.conj())
}

/// Complex-symmetric tridiagonal FEM matrix with its right-hand side.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub diag: Vec<Complex64>,
    /// Sub- and superdiagonal (the matrix is symmetric without conjugation).
    pub off: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
    pub grid: Arc<RadialGrid>,
    pub k: f64,
    pub kind: ProblemKind,
}

impl AssembledSystem {
    fn solve(&self) -> Result<Vec<Complex64>> {
        let x = solve_tridiagonal(&self.off, &self.diag, &self.off, &self.rhs).map_err(|p| {
            Error::SingularSystem { k: self.k, pivot: p.magnitude, row: p.row }
        })?;
        if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("tridiagonal solve"));
        }
        Ok(x)
    }

    /// `‖A x − b‖ / max(‖b‖, ‖A‖·‖x‖)` in the max norm.
    pub fn relative_residual(&self, x: &[Complex64]) -> f64 {
        let ax = tridiagonal_apply(&self.off, &self.diag, &self.off, x);
        let res = ax.iter().zip(&self.rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let bnorm = self.rhs.iter().map(|b| b.norm()).fold(0.0, f64::max);
        let anorm = self
            .diag
            .iter()
            .chain(&self.off)
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let xnorm = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let denom = bnorm.max(anorm * xnorm);
        if denom == 0.0 {
            0.0
        } else {
            res / denom
        }
    }
}

fn check_breakpoints(m: &MediumSpec, grid: &RadialGrid) -> Result<()> {
    match m.breakpoints().into_iter().find(|&r| !grid.has_node(r)) {
        Some(r) => Err(Error::BreakpointOffGrid(r)),
        None => Ok(()),
    }
}

/// Real stiffness `K` (coefficient `a`) and mass `M` (coefficient `b`)
/// matrices, `r²`-weighted, as `(k_diag, k_off, m_diag, m_off)`.
pub(crate) fn stiffness_and_mass(
    m: &MediumSpec,
    grid: &RadialGrid,
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = grid.len();
    let nodes = grid.nodes();
    let mut kd = alloc::vec![0.0; n];
    let mut ko = alloc::vec![0.0; n - 1];
    let mut md = alloc::vec![0.0; n];
    let mut mo = alloc::vec![0.0; n - 1];
    for e in 0..grid.element_count() {
        let h = nodes[e + 1] - nodes[e];
        let (mut s, mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0, 0.0);
        for (t, r, w) in grid.element_quadrature(e) {
            let a = m.a().value(r);
            let b = m.b().value(r);
            s += a * w / (h * h);
            m00 += b * w * (1.0 - t) * (1.0 - t);
            m01 += b * w * (1.0 - t) * t;
            m11 += b * w * t * t;
        }
        kd[e] += s;
        kd[e + 1] += s;
        ko[e] -= s;
        md[e] += m00;
        md[e + 1] += m11;
        mo[e] += m01;
    }
    (kd, ko, md, mo)
}

/// Assembles `K − k² M − R² Λ e_N e_Nᵀ` (or with `Λ̄` for the adjoint kind).
/// The right-hand side is left zero.
pub fn assemble(
    m: &MediumSpec,
    k: f64,
    grid: &Arc<RadialGrid>,
    kind: ProblemKind,
) -> Result<AssembledSystem> {
    if grid.radius() != m.radius() {
        return Err(invalid("grid and medium radii differ"));
    }
    check_breakpoints(m, grid)?;
    let lambda = match kind {
        ProblemKind::Direct => dtn_coefficient(k, grid.radius())?,
        ProblemKind::Adjoint => adjoint_dtn_coefficient(k, grid.radius())?,
    };
    let (kd, ko, md, mo) = stiffness_and_mass(m, grid);
    let k2 = k * k;
    let mut diag: Vec<Complex64> =
        kd.iter().zip(&md).map(|(s, m)| Complex64::new(s - k2 * m, 0.0)).collect();
    let off: Vec<Complex64> =
        ko.iter().zip(&mo).map(|(s, m)| Complex64::new(s - k2 * m, 0.0)).collect();
    let r = grid.radius();
    let last = diag.len() - 1;
    diag[last] -= lambda * (r * r);
    Ok(AssembledSystem {
        rhs: alloc::vec![Complex64::new(0.0, 0.0); diag.len()],
        diag,
        off,
        grid: Arc::clone(grid),
        k,
        kind,
    })
}

/// Load vector `∫ f φ_i r² dr` (without `h` or `4π`).
pub(crate) fn source_load(f: &SourceSpec, grid: &RadialGrid) -> Vec<f64> {
    let mut load = alloc::vec![0.0; grid.len()];
    for e in 0..grid.element_count() {
        for (t, r, w) in grid.element_quadrature(e) {
            let v = f.value(r) * w;
            load[e] += v * (1.0 - t);
            load[e + 1] += v * t;
        }
    }
    load
}

fn check_source(f: &SourceSpec, grid: &RadialGrid) -> Result<()> {
    if f.profile().radius() != grid.radius() {
        return Err(invalid("source and grid radii differ"));
    }
    if !(f.support_radius() < grid.radius()) {
        return Err(invalid("source must be supported inside the ball"));
    }
    Ok(())
}

/// Direct problem: field radiated by `h(k) f` with the outgoing DtN closure.
pub fn solve_direct(
    m: &MediumSpec,
    f: &SourceSpec,
    k: f64,
    grid: &Arc<RadialGrid>,
) -> Result<RadialField> {
    check_source(f, grid)?;
    let mut sys = assemble(m, k, grid, ProblemKind::Direct)?;
    let h = m.h(k)?;
    for (b, l) in sys.rhs.iter_mut().zip(source_load(f, grid)) {
        *b = h * l;
    }
    RadialField::new(Arc::clone(grid), sys.solve()?, k)
}

/// Adjoint problem with constant boundary datum `η`.
pub fn solve_adjoint(
    m: &MediumSpec,
    eta: Complex64,
    k: f64,
    grid: &Arc<RadialGrid>,
) -> Result<RadialField> {
    let mut sys = assemble(m, k, grid, ProblemKind::Adjoint)?;
    let r = grid.radius();
    let last = sys.rhs.len() - 1;
    sys.rhs[last] = eta * (r * r);
    RadialField::new(Arc::clone(grid), sys.solve()?, k)
}

/// Assembled direct system with its load, for residual checks.
pub fn assemble_direct_with_load(
    m: &MediumSpec,
    f: &SourceSpec,
    k: f64,
    grid: &Arc<RadialGrid>,
) -> Result<AssembledSystem> {
    check_source(f, grid)?;
    let mut sys = assemble(m, k, grid, ProblemKind::Direct)?;
    let h = m.h(k)?;
    for (b, l) in sys.rhs.iter_mut().zip(source_load(f, grid)) {
        *b = h * l;
    }
    Ok(sys)
}

/// Homogeneous-medium trace `u(R) = e^{ikR}/(kR) ∫₀^ρ f(s) sin(ks) s ds`
/// (with `h ≡ 1`), integrated adaptively segment by segment.
pub fn oracle_homogeneous_direct_trace(f: &SourceSpec, k: f64, radius: f64) -> Complex64 {
    let p = f.profile();
    let supp = f.support_radius();
    let mut cuts: Vec<f64> = p.breakpoints().into_iter().filter(|&r| r < supp).collect();
    cuts.insert(0, 0.0);
    cuts.push(supp);
    cuts.dedup();
    let integral: f64 = cuts
        .windows(2)
        .map(|w| {
            // Evaluate strictly inside the panel so the left-wins rule at
            // shared endpoints does not leak a neighbouring segment.
            let (lo, hi) = (w[0], w[1]);
            let mid = 0.5 * (lo + hi);
            let seg = p.segments().iter().find(|s| s.lo <= mid && mid <= s.hi);
            let eval = |s: f64| {
                let v = seg.map_or(p.background(), |sg| sg.shape.value(s));
                v * Float::sin(k * s) * s
            };
            integrate_adaptive(eval, lo, hi, 1e-15)
        })
        .sum();
    Complex64::from_polar(1.0, k * radius) * (integral / (k * radius))
}

/// Homogeneous-medium adjoint field `η R e^{−ikR} sin(kr)/(kr)`.
pub fn oracle_homogeneous_adjoint(eta: Complex64, k: f64, radius: f64, r: f64) -> Complex64 {
    let kr = k * r;
    let sinc = if kr.abs() < 1e-8 { 1.0 - kr * kr / 6.0 } else { Float::sin(kr) / kr };
    eta * Complex64::from_polar(radius, -k * radius) * sinc
}

/// Relative residual of `h⟨f, ψ⟩_Ω = ⟨γu, η⟩_Γ` for the discrete direct and
/// adjoint solutions.
pub fn check_variational_identity(
    m: &MediumSpec,
    f: &SourceSpec,
    eta: Complex64,
    k: f64,
    grid: &Arc<RadialGrid>,
) -> Result<f64> {
    let u = solve_direct(m, f, k, grid)?;
    let psi = solve_adjoint(m, eta, k, grid)?;
    let lhs = m.h(k)? * inner_product_profile(f.profile(), &psi);
    let rhs = boundary_inner_product(u.boundary_value(), eta, grid.radius());
    let scale = lhs.norm().max(rhs.norm());
    Ok(if scale == 0.0 { 0.0 } else { (lhs - rhs).norm() / scale })
}
