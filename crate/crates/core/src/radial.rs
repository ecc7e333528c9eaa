//! Radial grids, piecewise radial profiles and the weighted inner products
//! that realize `L²(Ω)` and `L²(Γ)` for spherically symmetric functions on a
//! ball of radius `R`.
//!
//! All volume integrals carry the full angular factor `4π`, so that
//! `inner_product_volume` agrees with the three-dimensional pairing
//! `∫_Ω A · conj(B) dx`. Integrals are accumulated element by element in
//! ascending radius with a three-point Gauss rule; the summation order is
//! fixed.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::quadrature::GAUSS3_UNIT;

const FOUR_PI: f64 = 4.0 * PI;

/// Nodes of a one-dimensional radial mesh on `[0, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    radius: f64,
    nodes: Vec<f64>,
    breakpoints: Vec<f64>,
}

impl RadialGrid {
    /// Builds a uniform grid with `n` nodes and snaps the nearest node onto
    /// every breakpoint.
    pub fn build(radius: f64, n: usize, breakpoints: &[f64]) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("grid radius must be positive and finite"));
        }
        if n < 3 {
            return Err(invalid("a radial grid needs at least 3 nodes"));
        }
        let mut bps: Vec<f64> = breakpoints.to_vec();
        bps.sort_by(|a, b| a.total_cmp(b));
        bps.dedup();
        if let Some(&bad) = bps.iter().find(|&&b| !(b > 0.0 && b < radius)) {
            return Err(invalid(alloc::format!(
                "breakpoint {bad} lies outside the open interval (0, {radius})"
            )));
        }
        let last = n - 1;
        let h = radius / last as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| radius * i as f64 / last as f64).collect();
        nodes[0] = 0.0;
        nodes[last] = radius;

        let mut snapped: Vec<usize> = Vec::with_capacity(bps.len());
        for &b in &bps {
            let i = Float::round(b / h) as usize;
            let i = i.clamp(1, last - 1);
            if snapped.contains(&i) {
                return Err(invalid(alloc::format!(
                    "breakpoints too close for {n} nodes: {b} collides with another breakpoint"
                )));
            }
            snapped.push(i);
            nodes[i] = b;
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("breakpoint snapping broke node monotonicity"));
        }
        Ok(Self { radius, nodes, breakpoints: bps })
    }

    /// Outer radius `R`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of elements (intervals between consecutive nodes).
    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Largest element length.
    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Whether `r` coincides with a node to a relative tolerance of `1e-12 R`.
    pub fn has_node(&self, r: f64) -> bool {
        let tol = 1e-12 * self.radius;
        let idx = self.nodes.partition_point(|&x| x < r - tol);
        self.nodes.get(idx).is_some_and(|&x| (x - r).abs() <= tol)
    }

    /// Gauss points of element `e` as `(t, r, weight · r²)` in ascending `r`,
    /// where `t ∈ (0, 1)` is the local coordinate.
    pub(crate) fn element_quadrature(&self, e: usize) -> [(f64, f64, f64); 3] {
        let (lo, hi) = (self.nodes[e], self.nodes[e + 1]);
        let h = hi - lo;
        GAUSS3_UNIT.map(|(t, w)| {
            let r = lo + h * t;
            (t, r, w * h * r * r)
        })
    }
}

/// Shape of a profile on one segment.
#[derive(Debug, Clone, PartialEq)]
pub enum SegmentShape {
    Constant(f64),
    /// `Σ c_i r^i`, coefficients in ascending powers.
    Polynomial(Vec<f64>),
    /// `offset + amplitude · cos(wavenumber · r)`.
    Cosine { offset: f64, amplitude: f64, wavenumber: f64 },
}

impl SegmentShape {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            SegmentShape::Constant(v) => *v,
            SegmentShape::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * r + ci),
            SegmentShape::Cosine { offset, amplitude, wavenumber } => {
                offset + amplitude * Float::cos(wavenumber * r)
            }
        }
    }
}

/// A closed radial interval `[lo, hi]` carrying a shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub shape: SegmentShape,
}

/// Real function of radius defined by ordered, non-overlapping closed
/// segments and a background value elsewhere on `[0, R]`.
///
/// Where two segments share an endpoint the left segment is used.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseRadialProfile {
    radius: f64,
    segments: Vec<Segment>,
    background: f64,
}

impl PiecewiseRadialProfile {
    pub fn new(radius: f64, mut segments: Vec<Segment>, background: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("profile radius must be positive"));
        }
        segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for s in &segments {
            if !(s.lo >= 0.0 && s.hi <= radius && s.lo < s.hi) {
                return Err(invalid(alloc::format!(
                    "segment [{}, {}] is empty or not contained in [0, {radius}]",
                    s.lo, s.hi
                )));
            }
        }
        if segments.windows(2).any(|w| w[1].lo < w[0].hi) {
            return Err(invalid("profile segments overlap"));
        }
        Ok(Self { radius, segments, background })
    }

    /// A profile equal to `value` on all of `[0, R]`.
    pub fn constant(radius: f64, value: f64) -> Self {
        Self { radius, segments: Vec::new(), background: value }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    /// Checked evaluation; rejects radii outside `[0, R]`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(0.0..=self.radius).contains(&r) {
            return Err(invalid(alloc::format!("radius {r} outside [0, {}]", self.radius)));
        }
        Ok(self.value(r))
    }

    /// Evaluation without the domain check.
    pub fn value(&self, r: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| s.lo <= r && r <= s.hi)
            .map_or(self.background, |s| s.shape.value(r))
    }

    /// Interior segment endpoints, i.e. the radii where the profile may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|s| [s.lo, s.hi])
            .filter(|&r| r > 0.0 && r < self.radius)
            .collect();
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }

    /// Smallest and largest values, sampled on `samples` uniform radii plus
    /// both sides of every segment endpoint.
    pub fn sampled_range(&self, samples: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut visit = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        let denom = samples.max(2) - 1;
        for i in 0..=denom {
            visit(self.value(self.radius * i as f64 / denom as f64));
        }
        for s in &self.segments {
            visit(s.shape.value(s.lo));
            visit(s.shape.value(s.hi));
        }
        (lo, hi)
    }

    /// Largest radius at which the profile can be nonzero (0 for the zero profile).
    pub fn support_radius(&self) -> f64 {
        if self.background != 0.0 {
            return self.radius;
        }
        self.segments
            .iter()
            .filter(|s| s.shape != SegmentShape::Constant(0.0))
            .map(|s| s.hi)
            .fold(0.0, f64::max)
    }

    /// Same profile scaled by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                lo: s.lo,
                hi: s.hi,
                shape: match &s.shape {
                    SegmentShape::Constant(v) => SegmentShape::Constant(c * v),
                    SegmentShape::Polynomial(p) => {
                        SegmentShape::Polynomial(p.iter().map(|x| c * x).collect())
                    }
                    SegmentShape::Cosine { offset, amplitude, wavenumber } => {
                        SegmentShape::Cosine {
                            offset: c * offset,
                            amplitude: c * amplitude,
                            wavenumber: *wavenumber,
                        }
                    }
                },
            })
            .collect();
        Self { radius: self.radius, segments, background: c * self.background }
    }
}

/// Complex nodal field on a radial grid, optionally tagged with the
/// frequency it was computed at.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<Complex64>,
    frequency: Option<f64>,
}

impl RadialField {
    /// Field at frequency `k > 0`.
    pub fn new(grid: Arc<RadialGrid>, values: Vec<Complex64>, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(invalid("field frequency must be positive"));
        }
        let mut f = Self::untagged(grid, values)?;
        f.frequency = Some(k);
        Ok(f)
    }

    /// Field without a frequency tag (reconstructed sources, eigenmodes).
    pub fn untagged(grid: Arc<RadialGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(alloc::format!(
                "field has {} values but the grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, frequency: None })
    }

    /// Nodal interpolant of a complex function of `r`.
    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid, values, frequency: None }
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = alloc::vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, values, frequency: None }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn frequency(&self) -> Option<f64> {
        self.frequency
    }

    /// Value at `r = R`.
    pub fn boundary_value(&self) -> Complex64 {
        self.values[self.values.len() - 1]
    }

    /// Linear interpolation at an arbitrary radius in `[0, R]`.
    pub fn interpolate(&self, r: f64) -> Complex64 {
        let nodes = self.grid.nodes();
        let e = nodes.partition_point(|&x| x <= r).clamp(1, nodes.len() - 1) - 1;
        let t = (r - nodes[e]) / (nodes[e + 1] - nodes[e]);
        self.values[e] * (1.0 - t) + self.values[e + 1] * t
    }

    /// `c · self`, keeping the frequency tag.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * c).collect(),
            frequency: self.frequency,
        }
    }

    /// Real part as an untagged field.
    pub fn real_part(&self) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
            frequency: None,
        }
    }

    /// Imaginary part as an untagged (real-valued) field.
    pub fn imag_part(&self) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| Complex64::new(v.im, 0.0)).collect(),
            frequency: None,
        }
    }

    pub(crate) fn shares_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }
}

/// `4π ∫₀^R A(r) conj(B(r)) r² dr`, conjugate-linear in `b`.
pub fn inner_product_volume(a: &RadialField, b: &RadialField) -> Result<Complex64> {
    if !a.shares_grid(b) {
        return Err(Error::GridMismatch);
    }
    let grid = a.grid();
    let (av, bv) = (a.values(), b.values());
    let mut acc = Complex64::new(0.0, 0.0);
    for e in 0..grid.element_count() {
        for (t, _, w) in grid.element_quadrature(e) {
            let x = av[e] * (1.0 - t) + av[e + 1] * t;
            let y = bv[e] * (1.0 - t) + bv[e + 1] * t;
            acc += x * y.conj() * w;
        }
    }
    Ok(acc * FOUR_PI)
}

/// `‖A‖_{L²(Ω)}`.
pub fn norm_volume(a: &RadialField) -> f64 {
    let grid = a.grid();
    let v = a.values();
    let mut acc = 0.0;
    for e in 0..grid.element_count() {
        for (t, _, w) in grid.element_quadrature(e) {
            acc += (v[e] * (1.0 - t) + v[e + 1] * t).norm_sqr() * w;
        }
    }
    Float::sqrt(acc * FOUR_PI)
}

/// `4π ∫₀^R p(r) conj(B(r)) r² dr` with the profile evaluated exactly at the
/// Gauss points. This is the pairing used for source load vectors.
pub fn inner_product_profile(p: &PiecewiseRadialProfile, b: &RadialField) -> Complex64 {
    let grid = b.grid();
    let bv = b.values();
    let mut acc = Complex64::new(0.0, 0.0);
    for e in 0..grid.element_count() {
        for (t, r, w) in grid.element_quadrature(e) {
            let y = bv[e] * (1.0 - t) + bv[e + 1] * t;
            acc += y.conj() * (p.value(r) * w);
        }
    }
    acc * FOUR_PI
}

/// `‖p − Re B‖_{L²(Ω)}` with `p` evaluated at Gauss points.
pub fn distance_profile_real(p: &PiecewiseRadialProfile, b: &RadialField) -> f64 {
    let grid = b.grid();
    let bv = b.values();
    let mut acc = 0.0;
    for e in 0..grid.element_count() {
        for (t, r, w) in grid.element_quadrature(e) {
            let y = bv[e].re * (1.0 - t) + bv[e + 1].re * t;
            let d = p.value(r) - y;
            acc += d * d * w;
        }
    }
    Float::sqrt(acc * FOUR_PI)
}

/// `‖p‖_{L²(Ω)}` of a profile, quadratured on `grid`.
pub fn norm_profile(p: &PiecewiseRadialProfile, grid: &RadialGrid) -> f64 {
    let mut acc = 0.0;
    for e in 0..grid.element_count() {
        for (_, r, w) in grid.element_quadrature(e) {
            let v = p.value(r);
            acc += v * v * w;
        }
    }
    Float::sqrt(acc * FOUR_PI)
}

/// `⟨s, t⟩_{L²(Γ)} = 4πR² s conj(t)` for traces that are constant on the sphere.
pub fn boundary_inner_product(s: Complex64, t: Complex64, radius: f64) -> Complex64 {
    s * t.conj() * (FOUR_PI * radius * radius)
}
