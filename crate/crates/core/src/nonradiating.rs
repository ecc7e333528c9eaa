//! Exact radial polynomials and the construction of sources that radiate no
//! field at chosen frequencies.
//!
//! For a compactly supported `w`, the source `g = (Δ + k₁²)(Δ + k₂²) w` has a
//! vanishing exterior field at both `k₁` and `k₂` in a homogeneous medium.
//! All coefficient algebra is carried out in exact rationals so that the two
//! factor orders agree bit for bit.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::media::SourceSpec;
use crate::radial::{PiecewiseRadialProfile, Segment, SegmentShape};

/// Number of derivatives of `w` that must vanish at the support radius for
/// `(Δ + k₁²)(Δ + k₂²) w` to vanish there as well.
pub const REQUIRED_VANISHING_ORDER: usize = 5;

/// Polynomial in `r` with exact rational coefficients, supported on `[0, ρ]`
/// and identically zero beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPolynomial {
    coeffs: Vec<BigRational>,
    support: BigRational,
}

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| invalid(alloc::format!("{x} is not finite")))
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl RadialPolynomial {
    /// Coefficients in ascending powers; `support` is converted exactly.
    pub fn new(coeffs: Vec<BigRational>, support: f64) -> Result<Self> {
        if !(support > 0.0) {
            return Err(invalid("polynomial support radius must be positive"));
        }
        let mut p = Self { coeffs, support: exact(support)? };
        p.trim();
        Ok(p)
    }

    /// Convenience constructor from `f64` coefficients (each converted exactly).
    pub fn from_f64(coeffs: &[f64], support: f64) -> Result<Self> {
        let c = coeffs.iter().map(|&c| exact(c)).collect::<Result<Vec<_>>>()?;
        Self::new(c, support)
    }

    /// The bump `(ρ² − r²)^m` on `[0, ρ]`.
    pub fn bump(support: f64, power: u32) -> Result<Self> {
        let rho = exact(support)?;
        let rho2 = &rho * &rho;
        let base = Self { coeffs: alloc::vec![rho2, -BigRational::one()], support: rho.clone() };
        // (ρ² − s)^m in s = r², then spread to even powers.
        let mut acc = Self { coeffs: alloc::vec![BigRational::one()], support: rho };
        for _ in 0..power {
            acc = acc.mul_poly(&base);
        }
        let mut coeffs = alloc::vec![BigRational::zero(); 2 * acc.coeffs.len()];
        for (i, c) in acc.coeffs.into_iter().enumerate() {
            coeffs[2 * i] = c;
        }
        let mut out = Self { coeffs, support: acc.support };
        out.trim();
        Ok(out)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    fn mul_poly(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self { coeffs: Vec::new(), support: self.support.clone() };
        }
        let mut c = alloc::vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self { coeffs: c, support: self.support.clone() }
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn support(&self) -> &BigRational {
        &self.support
    }

    pub fn support_f64(&self) -> f64 {
        to_f64(&self.support)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn has_only_even_powers(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero())
    }

    /// Floating-point evaluation; zero outside `[0, ρ]`.
    pub fn eval(&self, r: f64) -> f64 {
        if r < 0.0 || r > self.support_f64() {
            return 0.0;
        }
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + to_f64(c))
    }

    /// Exact value of the `m`-th derivative at `x`.
    pub fn derivative_at(&self, m: usize, x: &BigRational) -> BigRational {
        let mut sum = BigRational::zero();
        let mut xp = BigRational::one();
        for (i, c) in self.coeffs.iter().enumerate().skip(m) {
            let falling: BigInt = ((i - m + 1)..=i).map(BigInt::from).product();
            sum += c * BigRational::from_integer(falling) * &xp;
            xp *= x;
        }
        sum
    }

    /// Number of leading derivatives (starting at order 0) that vanish at `ρ`.
    pub fn vanishing_order_at_support(&self) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        (0..).take_while(|&m| self.derivative_at(m, &self.support).is_zero()).count()
    }

    /// `p + c · q` with `q` on the same support.
    fn add_scaled(&self, c: &BigRational, q: &Self) -> Self {
        let n = self.coeffs.len().max(q.coeffs.len());
        let mut coeffs = alloc::vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            coeffs[i] += a;
        }
        for (i, b) in q.coeffs.iter().enumerate() {
            coeffs[i] += c * b;
        }
        let mut out = Self { coeffs, support: self.support.clone() };
        out.trim();
        out
    }

    /// Exact three-dimensional radial Laplacian `p'' + 2p'/r` via
    /// `Δ r^{2n} = 2n(2n+1) r^{2n−2}`.
    pub fn radial_laplacian(&self) -> Result<Self> {
        if !self.has_only_even_powers() {
            return Err(invalid("radial Laplacian requires a polynomial in even powers of r"));
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len().saturating_sub(2));
        for (i, c) in self.coeffs.iter().enumerate().skip(2) {
            let factor = BigRational::from_integer(BigInt::from(i * (i + 1)));
            coeffs.push(c * factor);
        }
        let mut out = Self { coeffs, support: self.support.clone() };
        out.trim();
        Ok(out)
    }

    /// `(Δ + k²) p`, with `k²` formed exactly from the `f64` frequency.
    pub fn helmholtz(&self, k: f64) -> Result<Self> {
        let k = exact(k)?;
        Ok(self.radial_laplacian()?.add_scaled(&(&k * &k), self))
    }

    /// Source profile equal to this polynomial on `[0, ρ]` and zero beyond.
    pub fn to_source(&self, radius: f64) -> Result<SourceSpec> {
        let rho = self.support_f64();
        let coeffs: Vec<f64> = self.coeffs.iter().map(to_f64).collect();
        let profile = PiecewiseRadialProfile::new(
            radius,
            alloc::vec![Segment { lo: 0.0, hi: rho, shape: SegmentShape::Polynomial(coeffs) }],
            0.0,
        )?;
        SourceSpec::new(profile, rho)
    }

    /// `∫₀^ρ p(s) · s · sin(k s) ds` by repeated integration by parts on the
    /// exact polynomial `q(s) = s p(s)`.
    ///
    /// Returns `(value, scale)` where `scale` is the sum of magnitudes of the
    /// boundary terms, the natural yardstick for cancellation error.
    pub fn sine_moment(&self, k: f64) -> (f64, f64) {
        let q = Self {
            coeffs: core::iter::once(BigRational::zero()).chain(self.coeffs.iter().cloned()).collect(),
            support: self.support.clone(),
        };
        let rho = self.support_f64();
        let (s, c) = (Float::sin(k * rho), Float::cos(k * rho));
        let zero = BigRational::zero();
        let mut value = 0.0;
        let mut scale = 0.0;
        // I(q) = [−q cos(ks)/k + q' sin(ks)/k²]₀^ρ − I(q'')/k²
        let mut sign = 1.0;
        let mut m = 0;
        let mut kpow = k;
        let deg = q.degree().unwrap_or(0);
        while m <= deg {
            let q_hi = to_f64(&q.derivative_at(m, &self.support));
            let q_lo = to_f64(&q.derivative_at(m, &zero));
            let dq_hi = to_f64(&q.derivative_at(m + 1, &self.support));
            let terms = [-q_hi * c / kpow, q_lo / kpow, dq_hi * s / (kpow * k)];
            for t in terms {
                value += sign * t;
                scale += t.abs();
            }
            sign = -sign;
            kpow *= k * k;
            m += 2;
        }
        (value, scale)
    }

    /// Largest coefficient magnitude, for diagnostics.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.iter().map(|c| to_f64(&c.abs())).fold(0.0, f64::max)
    }
}

/// `(Δ + k₁²)(Δ + k₂²) w`: a source that is non-radiating at `k₁` and `k₂` in
/// a homogeneous medium.
///
/// `w` must be an even polynomial whose first [`REQUIRED_VANISHING_ORDER`]
/// derivatives vanish at its support radius, so that the result is continuous
/// when extended by zero.
pub fn make_nonradiating(w: &RadialPolynomial, k1: f64, k2: f64) -> Result<RadialPolynomial> {
    if !(k1 > 0.0 && k2 > 0.0) {
        return Err(invalid("frequencies must be positive"));
    }
    if k1 == k2 {
        return Err(invalid("the two null frequencies must differ"));
    }
    if w.is_zero() {
        return Err(invalid("w must be non-trivial"));
    }
    if !w.has_only_even_powers() {
        return Err(invalid("w must contain only even powers of r"));
    }
    if w.vanishing_order_at_support() < REQUIRED_VANISHING_ORDER {
        return Err(invalid(alloc::format!(
            "w must vanish to order {REQUIRED_VANISHING_ORDER} at its support radius, found {}",
            w.vanishing_order_at_support()
        )));
    }
    w.helmholtz(k2)?.helmholtz(k1)
}
