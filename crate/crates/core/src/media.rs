//! Canonical media, source profiles and the frequency weight `h(k)`.

use alloc::vec;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::radial::{PiecewiseRadialProfile, Segment, SegmentShape};

/// Outer radius of the computational ball used throughout the experiments.
pub const DOMAIN_RADIUS: f64 = 2.0;

/// Frequency dependence of a separable source `F(x, k) = h(k) f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyWeight {
    /// `h(k) = 1`
    ConstantOne,
    /// `h(k) = i k`
    ITimesK,
}

impl FrequencyWeight {
    pub fn eval(self, k: f64) -> Result<Complex64> {
        if !(k > 0.0) {
            return Err(invalid(alloc::format!("frequency must be positive, got {k}")));
        }
        Ok(match self {
            FrequencyWeight::ConstantOne => Complex64::new(1.0, 0.0),
            FrequencyWeight::ITimesK => Complex64::new(0.0, k),
        })
    }
}

/// Real coefficients `a(r)` (stiffness) and `b(r)` (mass) of
/// `∇·(a∇u) + k² b u = −h f`, plus the frequency weight.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumSpec {
    a: PiecewiseRadialProfile,
    b: PiecewiseRadialProfile,
    weight: FrequencyWeight,
    a_min: f64,
}

impl MediumSpec {
    /// Validates uniform ellipticity, positivity of `b`, and that both
    /// coefficients equal 1 in a neighbourhood of the outer sphere.
    pub fn new(
        a: PiecewiseRadialProfile,
        b: PiecewiseRadialProfile,
        weight: FrequencyWeight,
    ) -> Result<Self> {
        if a.radius() != b.radius() {
            return Err(invalid("coefficients a and b are defined on different radii"));
        }
        let (a_min, a_max) = a.sampled_range(10_000);
        let (b_min, b_max) = b.sampled_range(10_000);
        if !(a_min > 0.0) || !a_max.is_finite() {
            return Err(invalid("coefficient a must be bounded below by a positive constant"));
        }
        if !(b_min > 0.0) || !b_max.is_finite() {
            return Err(invalid("coefficient b must be positive and bounded"));
        }
        let radius = a.radius();
        for (name, p) in [("a", &a), ("b", &b)] {
            if p.background() != 1.0 {
                return Err(invalid(alloc::format!(
                    "coefficient {name} must have background value 1"
                )));
            }
            if p.segments().iter().any(|s| s.hi >= radius) {
                return Err(invalid(alloc::format!(
                    "coefficient {name} must equal 1 near the outer boundary"
                )));
            }
        }
        Ok(Self { a, b, weight, a_min })
    }

    pub fn a(&self) -> &PiecewiseRadialProfile {
        &self.a
    }

    pub fn b(&self) -> &PiecewiseRadialProfile {
        &self.b
    }

    pub fn weight(&self) -> FrequencyWeight {
        self.weight
    }

    /// Sampled lower bound `a₀` of the stiffness coefficient.
    pub fn ellipticity_bound(&self) -> f64 {
        self.a_min
    }

    pub fn radius(&self) -> f64 {
        self.a.radius()
    }

    /// `h(k)` for this medium.
    pub fn h(&self, k: f64) -> Result<Complex64> {
        self.weight.eval(k)
    }

    /// Union of the breakpoints of both coefficients.
    pub fn breakpoints(&self) -> alloc::vec::Vec<f64> {
        let mut v = self.a.breakpoints();
        v.extend(self.b.breakpoints());
        v.sort_by(|x, y| x.total_cmp(y));
        v.dedup();
        v
    }

    /// Medium with shells `[lo, hi]` carrying constant `(a, b)` values over a
    /// unit background.
    pub fn from_shells(
        radius: f64,
        shells: &[(f64, f64, f64, f64)],
        weight: FrequencyWeight,
    ) -> Result<Self> {
        let seg = |pick: fn(&(f64, f64, f64, f64)) -> f64| {
            shells
                .iter()
                .map(|s| Segment { lo: s.0, hi: s.1, shape: SegmentShape::Constant(pick(s)) })
                .collect::<alloc::vec::Vec<_>>()
        };
        let a = PiecewiseRadialProfile::new(radius, seg(|s| s.2), 1.0)?;
        let b = PiecewiseRadialProfile::new(radius, seg(|s| s.3), 1.0)?;
        Self::new(a, b, weight)
    }
}

/// The layered test medium: `a = 1/2`, `b = 2` on the shell `3/4 ≤ r ≤ 1`,
/// and `a = b = 1` elsewhere in the ball of radius 2; `h ≡ 1`.
pub fn paper_medium() -> MediumSpec {
    MediumSpec::from_shells(DOMAIN_RADIUS, &[(0.75, 1.0, 0.5, 2.0)], FrequencyWeight::ConstantOne)
        .expect("layered medium is valid")
}

/// Constant coefficients `a ≡ b ≡ h ≡ 1`.
pub fn homogeneous_medium() -> MediumSpec {
    MediumSpec::from_shells(DOMAIN_RADIUS, &[], FrequencyWeight::ConstantOne)
        .expect("homogeneous medium is valid")
}

/// Radial source `f(r)` with compact support strictly inside the ball.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    profile: PiecewiseRadialProfile,
    support_radius: f64,
}

impl SourceSpec {
    pub fn new(profile: PiecewiseRadialProfile, support_radius: f64) -> Result<Self> {
        if !(support_radius < profile.radius()) || support_radius < 0.0 {
            return Err(invalid("source support must lie strictly inside the ball"));
        }
        if profile.support_radius() > support_radius {
            return Err(invalid(alloc::format!(
                "source does not vanish beyond its declared support radius {support_radius}"
            )));
        }
        Ok(Self { profile, support_radius })
    }

    /// The zero source.
    pub fn zero(radius: f64) -> Self {
        Self { profile: PiecewiseRadialProfile::constant(radius, 0.0), support_radius: 0.0 }
    }

    pub fn profile(&self) -> &PiecewiseRadialProfile {
        &self.profile
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Unchecked evaluation of `f(r)`.
    pub fn value(&self, r: f64) -> f64 {
        self.profile.value(r)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { profile: self.profile.scaled(c), support_radius: self.support_radius }
    }
}

/// Indicator of the ball `r ≤ 1/2`.
pub fn source_f1() -> SourceSpec {
    let p = PiecewiseRadialProfile::new(
        DOMAIN_RADIUS,
        vec![Segment { lo: 0.0, hi: 0.5, shape: SegmentShape::Constant(1.0) }],
        0.0,
    )
    .expect("valid profile");
    SourceSpec::new(p, 0.5).expect("valid source")
}

/// `1 + cos(2πr)` for `r ≤ 1/2`, zero outside.
pub fn source_f2() -> SourceSpec {
    let p = PiecewiseRadialProfile::new(
        DOMAIN_RADIUS,
        vec![Segment {
            lo: 0.0,
            hi: 0.5,
            shape: SegmentShape::Cosine {
                offset: 1.0,
                amplitude: 1.0,
                wavenumber: 2.0 * core::f64::consts::PI,
            },
        }],
        0.0,
    )
    .expect("valid profile");
    SourceSpec::new(p, 0.5).expect("valid source")
}
