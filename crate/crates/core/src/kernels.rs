//! Approximate Dirac kernels.
//!
//! A [`MollifierKernel`] is a compactly supported, unit-mass function `ψ`
//! built from a one-dimensional [`Profile1D`] either radially,
//! `ψ(x) = I_d p(|x|)`, or as a tensor product, `ψ(x) = ∏ p(x_i)`. The
//! one-parameter family `δ_ε(x) = ε^{-d} ψ(x/ε)` is a [`ScaledDirac`].

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use libm::{cos, exp, fabs, pow, sqrt};

use crate::quadrature::{gauss_legendre, gauss_on_interval, integrate_adaptive};
use crate::{Error, Result};

/// Tolerance for the numerically computed normalization constants.
const NORMALIZATION_TOL: f64 = 1e-13;
/// Moments smaller than this count as vanishing when certifying the order.
pub const MOMENT_TOL: f64 = 1e-8;
/// Highest moment order that [`certify_moment_order`] looks at.
pub const MAX_CERTIFIED_ORDER: u32 = 3;
/// Default points per direction for moment and support integrals.
pub const DEFAULT_POINTS: usize = 64;

/// One-dimensional even profile supported in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile1D {
    /// `(1 + cos(πt)) / 2`
    CosineC1,
    /// `exp(1 - 1/(1 - t²))`
    BumpCInf,
    /// `1/2`
    BoxLInf,
}

impl Profile1D {
    #[inline]
    pub fn eval(self, t: f64) -> f64 {
        let t = fabs(t);
        if t >= 1.0 {
            return 0.0;
        }
        match self {
            Profile1D::CosineC1 => 0.5 * (1.0 + cos(PI * t)),
            Profile1D::BumpCInf => exp(1.0 - 1.0 / (1.0 - t * t)),
            Profile1D::BoxLInf => 0.5,
        }
    }
}

pub fn eval_profile(p: Profile1D, t: f64) -> f64 {
    p.eval(t)
}

/// `I_d = 1 / ∫_{B_1} p(|x|) dx`, integrated radially.
pub fn radial_normalization(p: Profile1D, dim: usize) -> Result<f64> {
    let sphere = match dim {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        d => return Err(Error::UnsupportedDimension(d)),
    };
    let integral = integrate_adaptive(|r| sphere * pow(r, (dim - 1) as f64) * p.eval(r), 0.0, 1.0, NORMALIZATION_TOL);
    if !(integral > 0.0) {
        return Err(Error::DegenerateProfile);
    }
    Ok(1.0 / integral)
}

/// `1 / ∫_{-1}^{1} p(t) dt`, the per-axis factor of a tensor kernel.
pub fn profile_normalization(p: Profile1D) -> Result<f64> {
    let integral = 2.0 * integrate_adaptive(|t| p.eval(t), 0.0, 1.0, NORMALIZATION_TOL);
    if !(integral > 0.0) {
        return Err(Error::DegenerateProfile);
    }
    Ok(1.0 / integral)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Construction {
    Radial { profile: Profile1D, normalization: f64 },
    /// `normalization` rescales the profile to unit integral on `[-1, 1]`;
    /// it is 1 for the cosine and box profiles.
    TensorProduct { profile: Profile1D, normalization: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierKernel {
    dim: usize,
    construction: Construction,
    support_radius: f64,
    moment_order: u32,
}

impl MollifierKernel {
    pub fn radial(profile: Profile1D, dim: usize) -> Result<Self> {
        let normalization = radial_normalization(profile, dim)?;
        Ok(Self::certified(dim, Construction::Radial { profile, normalization }, 1.0))
    }

    pub fn tensor(profile: Profile1D, dim: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let normalization = profile_normalization(profile)?;
        Ok(Self::certified(
            dim,
            Construction::TensorProduct { profile, normalization },
            sqrt(dim as f64),
        ))
    }

    fn certified(dim: usize, construction: Construction, support_radius: f64) -> Self {
        let mut k = Self {
            dim,
            construction,
            support_radius,
            moment_order: 0,
        };
        k.moment_order = certify_moment_order(&k);
        k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Radius `r₀` of a ball centered at the origin containing the support.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn moment_order(&self) -> u32 {
        self.moment_order
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.value(x))
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got });
        }
        Ok(())
    }

    #[inline]
    fn value(&self, x: &[f64]) -> f64 {
        match self.construction {
            Construction::Radial { profile, normalization } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                normalization * profile.eval(sqrt(r2))
            }
            Construction::TensorProduct { profile, normalization } => {
                let mut v = 1.0;
                for &xi in x {
                    v *= normalization * profile.eval(xi);
                    if v == 0.0 {
                        return 0.0;
                    }
                }
                v
            }
        }
    }
}

pub fn eval_kernel(k: &MollifierKernel, x: &[f64]) -> Result<f64> {
    k.eval(x)
}

/// The four kernels exercised by the experiments, by their CLI names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    RadialC1,
    TensorC1,
    TensorCInf,
    TensorLInf,
}

impl KernelKind {
    pub const ALL: [KernelKind; 4] = [
        KernelKind::RadialC1,
        KernelKind::TensorC1,
        KernelKind::TensorCInf,
        KernelKind::TensorLInf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::RadialC1 => "radial-c1",
            KernelKind::TensorC1 => "tensor-c1",
            KernelKind::TensorCInf => "tensor-cinf",
            KernelKind::TensorLInf => "tensor-linf",
        }
    }

    pub fn build(self, dim: usize) -> Result<MollifierKernel> {
        match self {
            KernelKind::RadialC1 => MollifierKernel::radial(Profile1D::CosineC1, dim),
            KernelKind::TensorC1 => MollifierKernel::tensor(Profile1D::CosineC1, dim),
            KernelKind::TensorCInf => MollifierKernel::tensor(Profile1D::BumpCInf, dim),
            KernelKind::TensorLInf => MollifierKernel::tensor(Profile1D::BoxLInf, dim),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown kernel '{s}'")))
    }
}

/// `δ_ε(x) = ε^{-d} ψ(x/ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledDirac {
    kernel: MollifierKernel,
    epsilon: f64,
    inv_epsilon: f64,
    amplitude: f64,
}

impl ScaledDirac {
    pub fn new(kernel: MollifierKernel, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        let amplitude = match kernel.construction {
            Construction::Radial { normalization, .. } => normalization,
            Construction::TensorProduct { normalization, .. } => pow(normalization, kernel.dim as f64),
        } / pow(epsilon, kernel.dim as f64);
        Ok(Self {
            kernel,
            epsilon,
            inv_epsilon: 1.0 / epsilon,
            amplitude,
        })
    }

    pub fn kernel(&self) -> &MollifierKernel {
        &self.kernel
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `ε·r₀`: every point farther than this from the origin maps to zero.
    pub fn support_radius(&self) -> f64 {
        self.epsilon * self.kernel.support_radius
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.kernel.check_dim(x.len())?;
        Ok(self.value(x))
    }

    /// Profile and amplitude when `δ_ε(x) = A ∏_a p(x_a/ε)`.
    pub(crate) fn separable(&self) -> Option<(Profile1D, f64, f64)> {
        match self.kernel.construction {
            Construction::TensorProduct { profile, .. } => Some((profile, self.amplitude, self.inv_epsilon)),
            Construction::Radial { .. } => None,
        }
    }

    /// Unchecked evaluation; `x.len()` must equal the kernel dimension.
    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        match self.kernel.construction {
            Construction::Radial { profile, .. } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                self.amplitude * profile.eval(sqrt(r2) * self.inv_epsilon)
            }
            Construction::TensorProduct { profile, .. } => {
                let mut v = self.amplitude;
                for &xi in x {
                    let t = xi * self.inv_epsilon;
                    if fabs(t) >= 1.0 {
                        return 0.0;
                    }
                    v *= profile.eval(t);
                }
                v
            }
        }
    }

    /// `∫ g(x) δ_ε(x) dx` over the support, with `n` Gauss points per
    /// direction. Radial kernels use polar/spherical coordinates; tensor
    /// kernels split the support box into pyramids with apex at the origin
    /// so that integrands with a kink at the origin stay smooth.
    pub fn integrate<G: Fn(&[f64]) -> f64>(&self, n: usize, g: G) -> f64 {
        let dim = self.kernel.dim;
        let eps = self.epsilon;
        let mut x = [0.0; 3];
        match self.kernel.construction {
            Construction::Radial { .. } => {
                let (rs, rw) = gauss_on_interval(n, 0.0, eps);
                let (phis, phiw) = gauss_on_interval(n, 0.0, 2.0 * PI);
                let mut sum = 0.0;
                if dim == 2 {
                    for (r, wr) in rs.iter().zip(&rw) {
                        for (phi, wp) in phis.iter().zip(&phiw) {
                            x[0] = r * cos(*phi);
                            x[1] = r * libm::sin(*phi);
                            let p = &x[..2];
                            sum += wr * wp * r * g(p) * self.value(p);
                        }
                    }
                } else {
                    let (us, uw) = gauss_legendre(n);
                    for (r, wr) in rs.iter().zip(&rw) {
                        for (u, wu) in us.iter().zip(&uw) {
                            let s = sqrt(1.0 - u * u);
                            for (phi, wp) in phis.iter().zip(&phiw) {
                                x[0] = r * s * cos(*phi);
                                x[1] = r * s * libm::sin(*phi);
                                x[2] = r * u;
                                sum += wr * wu * wp * r * r * g(&x) * self.value(&x);
                            }
                        }
                    }
                }
                sum
            }
            Construction::TensorProduct { .. } => {
                let (ts, tw) = gauss_on_interval(n, 0.0, 1.0);
                let (ys, yw) = gauss_on_interval(n, -eps, eps);
                let face_points = n.pow((dim - 1) as u32);
                let mut sum = 0.0;
                for axis in 0..dim {
                    for sign in [-1.0, 1.0] {
                        for flat in 0..face_points {
                            // point on the face {x_axis = sign·ε}
                            let mut y = [0.0; 3];
                            let mut wy = 1.0;
                            let mut rem = flat;
                            for (j, yj) in y.iter_mut().enumerate().take(dim) {
                                if j == axis {
                                    *yj = sign * eps;
                                } else {
                                    let i = rem % n;
                                    rem /= n;
                                    *yj = ys[i];
                                    wy *= yw[i];
                                }
                            }
                            for (t, wt) in ts.iter().zip(&tw) {
                                for j in 0..dim {
                                    x[j] = t * y[j];
                                }
                                let p = &x[..dim];
                                let jac = pow(*t, (dim - 1) as f64) * eps;
                                sum += wy * wt * jac * g(p) * self.value(p);
                            }
                        }
                    }
                }
                sum
            }
        }
    }

    /// Numerical `∫ δ_ε`.
    pub fn mass(&self) -> f64 {
        self.integrate(DEFAULT_POINTS, |_| 1.0)
    }
}

pub fn eval_scaled(d: &ScaledDirac, x: &[f64]) -> Result<f64> {
    d.eval(x)
}

/// `∫ y^α ψ(y) dy` with `n` Gauss points per direction: a tensor rule on
/// `[-1,1]^d` for tensor kernels, polar/spherical product rules for radial
/// ones.
pub fn moment(k: &MollifierKernel, alpha: &[u32], n: usize) -> f64 {
    assert_eq!(alpha.len(), k.dim, "multi-index length must equal the kernel dimension");
    match k.construction {
        Construction::TensorProduct { profile, normalization } => {
            let (ts, tw) = gauss_legendre(n);
            alpha
                .iter()
                .map(|&a| {
                    ts.iter()
                        .zip(&tw)
                        .map(|(t, w)| w * pow(*t, a as f64) * normalization * profile.eval(*t))
                        .sum::<f64>()
                })
                .product()
        }
        Construction::Radial { profile, normalization } => {
            let order: u32 = alpha.iter().sum();
            let (rs, rw) = gauss_on_interval(n, 0.0, 1.0);
            let radial: f64 = rs
                .iter()
                .zip(&rw)
                .map(|(r, w)| w * pow(*r, (order as usize + k.dim - 1) as f64) * normalization * profile.eval(*r))
                .sum();
            let (phis, phiw) = gauss_on_interval(n, 0.0, 2.0 * PI);
            let angular: f64 = if k.dim == 2 {
                phis.iter()
                    .zip(&phiw)
                    .map(|(phi, w)| w * pow(cos(*phi), alpha[0] as f64) * pow(libm::sin(*phi), alpha[1] as f64))
                    .sum()
            } else {
                let (us, uw) = gauss_legendre(n);
                let mut s = 0.0;
                for (u, wu) in us.iter().zip(&uw) {
                    let st = sqrt(1.0 - u * u);
                    for (phi, wp) in phis.iter().zip(&phiw) {
                        s += wu
                            * wp
                            * pow(st * cos(*phi), alpha[0] as f64)
                            * pow(st * libm::sin(*phi), alpha[1] as f64)
                            * pow(*u, alpha[2] as f64);
                    }
                }
                s
            };
            radial * angular
        }
    }
}

/// All multi-indices of length `dim` with total order `order`.
pub fn multi_indices(dim: usize, order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = alloc::vec![0u32; dim];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for a in (0..=left).rev() {
            cur[pos] = a;
            rec(pos + 1, left - a, cur, out);
        }
    }
    rec(0, order, &mut cur, &mut out);
    out
}

/// Largest `k ≤ 3` such that every moment of order `1..=k` vanishes.
pub fn certify_moment_order(k: &MollifierKernel) -> u32 {
    let mut certified = 0;
    for order in 1..=MAX_CERTIFIED_ORDER {
        let vanishes = multi_indices(k.dim, order)
            .iter()
            .all(|alpha| fabs(moment(k, alpha, DEFAULT_POINTS)) < MOMENT_TOL);
        if !vanishes {
            break;
        }
        certified = order;
    }
    certified
}

/// `‖ |x|^m δ_ε ‖_{L¹}` over the support.
pub fn l1_growth(d: &ScaledDirac, m: f64) -> f64 {
    assert!(m >= 0.0, "growth exponent must be nonnegative");
    let dim = d.kernel.dim;
    d.integrate(DEFAULT_POINTS, |x| {
        let r = sqrt(x[..dim].iter().map(|v| v * v).sum());
        pow(r, m)
    })
    .abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn profile_values() {
        assert_eq!(eval_profile(Profile1D::CosineC1, 0.0), 1.0);
        assert_eq!(eval_profile(Profile1D::BoxLInf, 2.0), 0.0);
        assert_eq!(eval_profile(Profile1D::BumpCInf, 0.0), 1.0);
        for p in [Profile1D::CosineC1, Profile1D::BumpCInf, Profile1D::BoxLInf] {
            assert_eq!(p.eval(1.0), 0.0);
            assert_eq!(p.eval(-1.0), 0.0);
            for t in [0.1, 0.37, 0.8, 0.999] {
                assert_eq!(p.eval(t), p.eval(-t));
            }
        }
    }

    #[test]
    fn radial_normalization_matches_closed_forms() {
        let i2 = radial_normalization(Profile1D::CosineC1, 2).unwrap();
        assert!(close(i2, 1.0 / (PI / 2.0 - 2.0 / PI), 1e-12), "{i2}");
        assert!(close(i2, 1.0704615, 1e-7));
        assert!(close(radial_normalization(Profile1D::BoxLInf, 2).unwrap(), 2.0 / PI, 1e-13));
        assert!(close(radial_normalization(Profile1D::BoxLInf, 3).unwrap(), 3.0 / (2.0 * PI), 1e-13));
        assert_eq!(radial_normalization(Profile1D::BoxLInf, 4), Err(Error::UnsupportedDimension(4)));
    }

    #[test]
    fn tensor_normalization_only_rescales_the_bump() {
        assert!(close(profile_normalization(Profile1D::CosineC1).unwrap(), 1.0, 1e-14));
        assert!(close(profile_normalization(Profile1D::BoxLInf).unwrap(), 1.0, 1e-14));
        // ∫ exp(1 - 1/(1-t²)) dt over (-1,1) = 1.2069003224378743 (scipy quad)
        assert!(close(profile_normalization(Profile1D::BumpCInf).unwrap(), 1.0 / 1.2069003224378743, 1e-12));
    }

    #[test]
    fn kernel_evaluation() {
        let box2 = MollifierKernel::tensor(Profile1D::BoxLInf, 2).unwrap();
        assert!(close(box2.eval(&[0.0, 0.0]).unwrap(), 0.25, 1e-15));
        assert_eq!(box2.eval(&[1.5, 0.0]).unwrap(), 0.0);
        assert_eq!(box2.eval(&[0.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 }));
        let rad = MollifierKernel::radial(Profile1D::CosineC1, 2).unwrap();
        assert!(close(rad.eval(&[0.0, 0.0]).unwrap(), 1.0704615, 1e-7));
        assert_eq!(rad.support_radius(), 1.0);
        assert!(close(box2.support_radius(), 2f64.sqrt(), 0.0));
    }

    #[test]
    fn scaled_evaluation() {
        let box2 = MollifierKernel::tensor(Profile1D::BoxLInf, 2).unwrap();
        let d = ScaledDirac::new(box2, 0.5).unwrap();
        assert!(close(d.eval(&[0.0, 0.0]).unwrap(), 1.0, 1e-15));
        let rad = MollifierKernel::radial(Profile1D::CosineC1, 2).unwrap();
        let d = ScaledDirac::new(rad, 0.1).unwrap();
        assert!(close(d.eval(&[0.0, 0.0]).unwrap(), 107.04615, 1e-4));
        assert_eq!(d.eval(&[0.1, 0.0001]).unwrap(), 0.0);
        assert_eq!(ScaledDirac::new(rad, 0.0), Err(Error::NonPositiveEpsilon(0.0)));
        assert_eq!(ScaledDirac::new(rad, -1.0), Err(Error::NonPositiveEpsilon(-1.0)));
    }

    #[test]
    fn moments_of_shipped_kernels() {
        for kind in KernelKind::ALL {
            for dim in [2, 3] {
                let k = kind.build(dim).unwrap();
                let zero = alloc::vec![0; dim];
                assert!(close(moment(&k, &zero, 64), 1.0, 1e-8), "{kind} d={dim}");
                assert_eq!(k.moment_order(), 1, "{kind} d={dim}");
            }
        }
        let c1 = KernelKind::TensorC1.build(2).unwrap();
        assert!(moment(&c1, &[1, 0], 64).abs() < 1e-10);
        let linf = KernelKind::TensorLInf.build(2).unwrap();
        // ∫ t²/2 dt over [-1,1]
        assert!(close(moment(&linf, &[2, 0], 64), 1.0 / 3.0, 1e-12));
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(multi_indices(2, 2), alloc::vec![alloc::vec![2, 0], alloc::vec![1, 1], alloc::vec![0, 2]]);
        assert_eq!(multi_indices(3, 3).len(), 10);
    }

    #[test]
    fn l1_growth_box_closed_form() {
        let k = KernelKind::TensorLInf.build(2).unwrap();
        let d = ScaledDirac::new(k, 1.0).unwrap();
        let v = l1_growth(&d, 1.0);
        let exact = (2f64.sqrt() + libm::asinh(1.0)) / 3.0;
        assert!(close(v, exact, 1e-10), "{v} vs {exact}");
        assert!(close(v, 0.7651957, 1e-7));
        assert!(close(l1_growth(&d, 0.0), 1.0, 1e-12));
    }

    #[test]
    fn kernel_names_round_trip() {
        for k in KernelKind::ALL {
            assert_eq!(k.name().parse::<KernelKind>().unwrap(), k);
        }
        assert!("gaussian".parse::<KernelKind>().is_err());
    }
}
