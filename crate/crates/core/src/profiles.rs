//! Bubble profiles, approximate-kernel elements, and gluing cutoffs.
//!
//! The radial pieces live on the flat chart: the standard bubble
//! `U(x) = (sqrt(n(n-2)) / (1 + |x|^2))^{(n-2)/2}` solves `Delta U = U^{2*-1}`
//! on `R^n`, and its concentrated rescaling `U_delta(rho) = (sqrt(n(n-2))
//! delta / (delta^2 + rho^2))^{(n-2)/2}` is what gets glued onto a manifold
//! through the conformal factor and a compactly supported cutoff. All
//! derivatives are analytic; nothing here differentiates numerically.

use crate::constants;
use crate::error::{Error, Result};
use crate::manifolds::{check_dim, ModelManifold, PointOnManifold};
use crate::quadrature::FieldOnManifold;
use serde::Serialize;

/// Polynomial order of the cutoff transition. Seventh order joins with three
/// continuous derivatives, fifth with two; seventh is the default and the
/// fifth-order variant exists to show results do not depend on the choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SmoothstepOrder {
    Fifth,
    Seventh,
}

impl SmoothstepOrder {
    /// Step value and first two derivatives at `x` in [0, 1].
    fn step(self, x: f64) -> (f64, f64, f64) {
        let x2 = x * x;
        let x3 = x2 * x;
        match self {
            SmoothstepOrder::Fifth => (
                x3 * (10.0 - 15.0 * x + 6.0 * x2),
                30.0 * x2 * (1.0 - x) * (1.0 - x),
                60.0 * x - 180.0 * x2 + 120.0 * x3,
            ),
            SmoothstepOrder::Seventh => (
                x2 * x2 * (35.0 - 84.0 * x + 70.0 * x2 - 20.0 * x3),
                140.0 * x3 * (1.0 - x).powi(3),
                420.0 * x2 - 1680.0 * x3 + 2100.0 * x2 * x2 - 840.0 * x2 * x3,
            ),
        }
    }
}

/// Compactly supported radial cutoff: identically one on `[0, radius/2]`,
/// identically zero from `radius` on, a reversed smoothstep in between.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CutoffSpec {
    pub radius: f64,
    pub order: SmoothstepOrder,
}

impl CutoffSpec {
    pub fn new(radius: f64, order: SmoothstepOrder) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter {
                name: "cutoff_radius",
                value: radius,
                reason: "cutoff radius must be positive and finite",
            });
        }
        Ok(CutoffSpec { radius, order })
    }

    /// Largest distance at which the cutoff is still identically one.
    pub fn plateau_radius(&self) -> f64 {
        0.5 * self.radius
    }

    pub fn value(&self, d: f64) -> f64 {
        self.eval(d).0
    }

    pub fn d1(&self, d: f64) -> f64 {
        self.eval(d).1
    }

    pub fn d2(&self, d: f64) -> f64 {
        self.eval(d).2
    }

    /// Value and first two distance derivatives at once.
    pub fn eval(&self, d: f64) -> (f64, f64, f64) {
        let half = self.plateau_radius();
        if d <= half {
            return (1.0, 0.0, 0.0);
        }
        if d >= self.radius {
            return (0.0, 0.0, 0.0);
        }
        let (s, s1, s2) = self.order.step((d - half) / half);
        (1.0 - s, -s1 / half, -s2 / (half * half))
    }
}

/// Radial profile of the concentrated bubble `U_delta` on the flat chart.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BubbleProfile {
    pub n: usize,
    pub delta: f64,
    /// `(n(n-2))^{(n-2)/4}`, the amplitude of the standard bubble at scale 1.
    amplitude: f64,
}

impl BubbleProfile {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        check_dim(n)?;
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                reason: "concentration scale must be positive and finite",
            });
        }
        let nf = n as f64;
        Ok(BubbleProfile {
            n,
            delta,
            amplitude: (nf * (nf - 2.0)).powf(0.25 * (nf - 2.0)),
        })
    }

    fn q(&self, rho: f64) -> f64 {
        1.0 / (self.delta * self.delta + rho * rho)
    }

    pub fn value(&self, rho: f64) -> f64 {
        self.amplitude * (self.delta * self.q(rho)).powf(0.5 * (self.n as f64 - 2.0))
    }

    /// `dU_delta/drho = -(n-2) rho q U` with `q = (delta^2 + rho^2)^{-1}`.
    pub fn deriv(&self, rho: f64) -> f64 {
        -(self.n as f64 - 2.0) * rho * self.q(rho) * self.value(rho)
    }

    /// `d^2 U_delta/drho^2 = -(n-2) q U (1 - n rho^2 q)`.
    pub fn second_deriv(&self, rho: f64) -> f64 {
        let q = self.q(rho);
        -(self.n as f64 - 2.0) * q * self.value(rho) * (1.0 - self.n as f64 * rho * rho * q)
    }

    /// `U_delta^{2*-1} = n(n-2) delta^2 q^2 U_delta`, which is also the flat
    /// Laplacian `-U'' - (n-1) U'/rho`: the bubble solves the critical
    /// equation exactly at every scale.
    pub fn critical_power(&self, rho: f64) -> f64 {
        let nf = self.n as f64;
        let q = self.q(rho);
        nf * (nf - 2.0) * self.delta * self.delta * q * q * self.value(rho)
    }

    /// Weight `(2*-1) U_delta^{2*-2} = n(n+2) delta^2 q^2` of the linearized
    /// operator at the bubble.
    pub fn linearization_weight(&self, rho: f64) -> f64 {
        let nf = self.n as f64;
        let q = self.q(rho);
        nf * (nf + 2.0) * self.delta * self.delta * q * q
    }
}

/// The standard bubble at unit scale.
pub fn standard_bubble(n: usize) -> Result<BubbleProfile> {
    BubbleProfile::new(n, 1.0)
}

/// Radial parts of the approximate-kernel elements at scale `delta`: the
/// scale direction `delta^{(n-2)/2} (rho^2 - delta^2) / (delta^2+rho^2)^{n/2}`
/// and the translation direction `delta^{n/2} rho / (delta^2+rho^2)^{n/2}`.
/// Both solve the linearized critical equation on the flat chart.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KernelElements {
    pub n: usize,
    pub delta: f64,
}

impl KernelElements {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        check_dim(n)?;
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                reason: "concentration scale must be positive and finite",
            });
        }
        Ok(KernelElements { n, delta })
    }

    fn q(&self, rho: f64) -> f64 {
        1.0 / (self.delta * self.delta + rho * rho)
    }

    pub fn scale(&self, rho: f64) -> f64 {
        let nf = self.n as f64;
        self.delta.powf(0.5 * (nf - 2.0))
            * (rho * rho - self.delta * self.delta)
            * self.q(rho).powf(0.5 * nf)
    }

    pub fn scale_deriv(&self, rho: f64) -> f64 {
        let nf = self.n as f64;
        let q = self.q(rho);
        self.delta.powf(0.5 * (nf - 2.0))
            * q.powf(0.5 * nf)
            * rho
            * (2.0 - nf * (rho * rho - self.delta * self.delta) * q)
    }

    /// Value of the scale element at the center, `-delta^{-(n-2)/2}`.
    pub fn scale_at_center(&self) -> f64 {
        -self.delta.powf(-0.5 * (self.n as f64 - 2.0))
    }

    pub fn translation(&self, rho: f64) -> f64 {
        let nf = self.n as f64;
        self.delta.powf(0.5 * nf) * rho * self.q(rho).powf(0.5 * nf)
    }

    pub fn translation_deriv(&self, rho: f64) -> f64 {
        let nf = self.n as f64;
        let q = self.q(rho);
        self.delta.powf(0.5 * nf) * q.powf(0.5 * nf) * (1.0 - nf * rho * rho * q)
    }
}

/// Unit-scale kernel elements in original variables, `V_0 = (|x|^2 - 1) /
/// (1+|x|^2)^{n/2}` and `V_1 = x_1 / (1+|x|^2)^{n/2}` restricted to a ray.
/// Kept for direct comparison against the linearized equation.
pub fn kernel_scale_unit(n: usize, rho: f64) -> f64 {
    (rho * rho - 1.0) / (1.0 + rho * rho).powf(0.5 * n as f64)
}

pub fn kernel_translation_unit(n: usize, rho: f64) -> f64 {
    rho / (1.0 + rho * rho).powf(0.5 * n as f64)
}

/// Concentration scale of the subcritical family, `delta = t eps^{2/(n-2)}`.
pub fn concentration_scale(n: usize, epsilon: f64, t: f64) -> f64 {
    t * epsilon.powf(2.0 / (n as f64 - 2.0))
}

/// Geometry of one glued bubble: dimension, concentration scale, cutoff.
/// The subcritical exponent lives with the functionals, not here.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BubbleConfig {
    pub n: usize,
    pub delta: f64,
    pub cutoff: CutoffSpec,
}

impl BubbleConfig {
    pub fn new(n: usize, delta: f64, cutoff: CutoffSpec) -> Result<Self> {
        check_dim(n)?;
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                reason: "concentration scale must be positive and finite",
            });
        }
        if delta >= cutoff.radius {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                reason: "concentration scale must sit inside the cutoff radius",
            });
        }
        Ok(BubbleConfig { n, delta, cutoff })
    }

    /// Config of the subcritical family member at (eps, t).
    pub fn from_subcritical(n: usize, epsilon: f64, t: f64, cutoff: CutoffSpec) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                reason: "subcritical shift must be positive and finite",
            });
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                reason: "scale parameter must be positive and finite",
            });
        }
        BubbleConfig::new(n, concentration_scale(n, epsilon, t), cutoff)
    }

    pub fn profile(&self) -> BubbleProfile {
        // Parameters were validated on construction.
        BubbleProfile::new(self.n, self.delta).expect("validated config")
    }

    /// Deterministic ladder of chart radii separating the concentration
    /// scale from the cutoff scale: `delta * 10^k` strictly below half the
    /// plateau, then the plateau edge and the support edge. Quadrature uses
    /// these as mandatory split points.
    pub fn chart_splits(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut s = self.delta;
        while s < 0.5 * self.cutoff.plateau_radius() {
            out.push(s);
            s *= 10.0;
        }
        out.push(self.cutoff.plateau_radius());
        out.push(self.cutoff.radius);
        out
    }
}

/// Glued bubble `W = chi(rho) Lambda U_delta(rho)` at a point, with `rho` the
/// flat-chart radius seen from `center`. Zero outside the cutoff support
/// without touching the chart, so every point of the manifold is legal.
pub fn glued_bubble_value(
    manifold: &ModelManifold,
    center: &PointOnManifold,
    point: &PointOnManifold,
    config: &BubbleConfig,
) -> Result<f64> {
    check_ambient(manifold, config)?;
    let rho = manifold.chart_radius(center, point)?;
    if rho >= config.cutoff.radius {
        return Ok(0.0);
    }
    let lambda = manifold.conformal_factor(center, point)?;
    Ok(config.cutoff.value(rho) * lambda * config.profile().value(rho))
}

/// Naive gluing `chi(d_g) U_delta(d_g)` with geodesic distance and no
/// conformal factor. Exists to demonstrate how much accuracy the conformal
/// gluing buys; the residual of this variant stalls at the curvature scale.
pub fn glued_bubble_naive_value(
    manifold: &ModelManifold,
    center: &PointOnManifold,
    point: &PointOnManifold,
    config: &BubbleConfig,
) -> Result<f64> {
    check_ambient(manifold, config)?;
    let d = manifold.distance(center, point)?;
    Ok(config.cutoff.value(d) * config.profile().value(d))
}

/// Glued scale-direction kernel element `chi(rho) Lambda Z_delta(rho)`.
pub fn glued_scale_kernel_value(
    manifold: &ModelManifold,
    center: &PointOnManifold,
    point: &PointOnManifold,
    config: &BubbleConfig,
) -> Result<f64> {
    check_ambient(manifold, config)?;
    let rho = manifold.chart_radius(center, point)?;
    if rho >= config.cutoff.radius {
        return Ok(0.0);
    }
    let lambda = manifold.conformal_factor(center, point)?;
    let k = KernelElements::new(config.n, config.delta)?;
    Ok(config.cutoff.value(rho) * lambda * k.scale(rho))
}

/// Glued translation kernel element along the circle direction of the
/// product, `chi(rho) Lambda delta^{n/2} y_1 / (delta^2 + rho^2)^{n/2}` with
/// `y_1 = e^{ds} cos(dsigma) - 1` the axis component of the chart position.
/// Odd under reflection of the circle offset. Not available on the sphere,
/// whose slice coordinates cannot see a translation direction.
pub fn glued_translation_kernel_value(
    manifold: &ModelManifold,
    center: &PointOnManifold,
    point: &PointOnManifold,
    config: &BubbleConfig,
) -> Result<f64> {
    check_ambient(manifold, config)?;
    match (manifold, center, point) {
        (
            ModelManifold::ProductCircleSphere { .. },
            PointOnManifold::ProductPoint { s: sc, sigma: gc },
            PointOnManifold::ProductPoint { s: sx, sigma: gx },
        ) => {
            let rho = manifold.chart_radius(center, point)?;
            if rho >= config.cutoff.radius {
                return Ok(0.0);
            }
            let lambda = manifold.conformal_factor(center, point)?;
            let nf = config.n as f64;
            let ds = sx - sc;
            let axis = (ds.exp_m1()) - ds.exp() * 2.0 * (0.5 * (gx - gc)).sin().powi(2);
            let q = 1.0 / (config.delta * config.delta + rho * rho);
            Ok(config.cutoff.value(rho)
                * lambda
                * config.delta.powf(0.5 * nf)
                * axis
                * q.powf(0.5 * nf))
        }
        (ModelManifold::RoundSphere { .. }, _, _) => Err(Error::UnsupportedSymmetry {
            tag: "axis-translation",
            manifold: manifold.kind_name(),
        }),
        _ => Err(Error::ManifoldMismatch {
            expected: manifold.kind_name(),
        }),
    }
}

fn check_ambient(manifold: &ModelManifold, config: &BubbleConfig) -> Result<()> {
    if manifold.dim() != config.n {
        return Err(Error::InvalidDimension {
            n: config.n,
            reason: "bubble dimension must match the manifold",
        });
    }
    Ok(())
}

/// Glued bubble as a symmetric field with analytic first derivatives, ready
/// for inner products and norms.
///
/// Sphere: zonal in the polar angle from the center, `W(theta) =
/// chi(rho) Lambda(theta) U_delta(rho)` with `rho = 2 tan(theta/2)`.
/// Product: bi-symmetric in `(s, sigma)` around the center.
pub fn bubble_field<'a>(
    manifold: &ModelManifold,
    center: &PointOnManifold,
    config: &BubbleConfig,
) -> Result<FieldOnManifold<'a>> {
    check_ambient(manifold, config)?;
    let profile = config.profile();
    let cutoff = config.cutoff;
    let nf = config.n as f64;
    match (*manifold, *center) {
        (ModelManifold::RoundSphere { .. }, PointOnManifold::SpherePolar { theta: tc }) => {
            if tc != 0.0 {
                return Err(Error::InvalidParameter {
                    name: "center",
                    value: tc,
                    reason: "zonal fields require the center at the pole",
                });
            }
            let radial = move |theta: f64| {
                let rho = 2.0 * (0.5 * theta).tan();
                if rho >= cutoff.radius {
                    return (0.0, 0.0);
                }
                let rho_prime = 1.0 + 0.25 * rho * rho;
                let lambda = rho_prime.powf(0.5 * (nf - 2.0));
                let lambda_d = 0.25 * (nf - 2.0) * rho * lambda;
                let (chi, chi1, _) = cutoff.eval(rho);
                let u = profile.value(rho);
                let phi = chi * u;
                let phi_d = chi1 * u + chi * profile.deriv(rho);
                (lambda * phi, lambda_d * phi + lambda * phi_d * rho_prime)
            };
            let f = radial;
            let g = radial;
            let splits = config
                .chart_splits()
                .into_iter()
                .map(|r| 2.0 * (0.5 * r).atan())
                .collect();
            Ok(FieldOnManifold::Zonal {
                value: Box::new(move |t| f(t).0),
                deriv: Box::new(move |t| g(t).1),
                splits,
            })
        }
        (
            ModelManifold::ProductCircleSphere { .. },
            PointOnManifold::ProductPoint { s: sc, sigma: gc },
        ) => {
            // The bi-symmetric representation evaluates every point of a
            // sigma-ring at the value on the center's meridian, which is the
            // true field only when the ring distance is constant, i.e. the
            // center sits at a pole of the sphere factor.
            if !(gc == 0.0 || gc == std::f64::consts::PI) {
                return Err(Error::InvalidParameter {
                    name: "center",
                    value: gc,
                    reason: "bi-symmetric product fields need the center at a sphere-factor pole",
                });
            }
            let eval = move |s: f64, sigma: f64| {
                let ds = s - sc;
                let dg = sigma - gc;
                let rho = crate::manifolds::product_chart_radius(ds, dg);
                if rho >= cutoff.radius {
                    return (0.0, 0.0, 0.0);
                }
                let lambda = (0.5 * (nf - 2.0) * ds).exp();
                let (chi, chi1, _) = cutoff.eval(rho);
                let u = profile.value(rho);
                let phi = chi * u;
                let phi_d = chi1 * u + chi * profile.deriv(rho);
                let e = ds.exp();
                let (rho_s, rho_g) = if rho > 0.0 {
                    (e * (e - dg.cos()) / rho, e * dg.sin() / rho)
                } else {
                    (0.0, 0.0)
                };
                let value = lambda * phi;
                (
                    value,
                    0.5 * (nf - 2.0) * value + lambda * phi_d * rho_s,
                    lambda * phi_d * rho_g,
                )
            };
            let (f, g, h) = (eval, eval, eval);
            let ladder = config.chart_splits();
            let mut s_splits: Vec<f64> = ladder.iter().flat_map(|&d| [sc - d, sc + d]).collect();
            s_splits.push(sc);
            let mut sigma_splits: Vec<f64> =
                ladder.iter().flat_map(|&d| [gc - d, gc + d]).collect();
            sigma_splits.push(gc);
            Ok(FieldOnManifold::ProductBiSym {
                value: Box::new(move |s, sg| f(s, sg).0),
                deriv_s: Box::new(move |s, sg| g(s, sg).1),
                deriv_sigma: Box::new(move |s, sg| h(s, sg).2),
                s_splits,
                sigma_splits,
            })
        }
        _ => Err(Error::ManifoldMismatch {
            expected: manifold.kind_name(),
        }),
    }
}

/// Glued translation kernel as a bi-symmetric field on the product (values
/// only; derivative slots are populated for completeness but the element is
/// used through pairings of values).
pub fn translation_kernel_field<'a>(
    manifold: &ModelManifold,
    center: &PointOnManifold,
    config: &BubbleConfig,
) -> Result<FieldOnManifold<'a>> {
    check_ambient(manifold, config)?;
    match (*manifold, *center) {
        (
            ModelManifold::ProductCircleSphere { .. },
            PointOnManifold::ProductPoint { s: sc, sigma: gc },
        ) => {
            let cutoff = config.cutoff;
            let nf = config.n as f64;
            let delta = config.delta;
            let value = move |s: f64, sigma: f64| {
                let ds = s - sc;
                let dg = sigma - gc;
                let rho = crate::manifolds::product_chart_radius(ds, dg);
                if rho >= cutoff.radius {
                    return 0.0;
                }
                let lambda = (0.5 * (nf - 2.0) * ds).exp();
                let axis = ds.exp_m1() - ds.exp() * 2.0 * (0.5 * dg).sin().powi(2);
                let q = 1.0 / (delta * delta + rho * rho);
                cutoff.value(rho) * lambda * delta.powf(0.5 * nf) * axis * q.powf(0.5 * nf)
            };
            let fd = 1e-6;
            let vs = value;
            let vg = value;
            let ladder = config.chart_splits();
            let mut s_splits: Vec<f64> = ladder.iter().flat_map(|&d| [sc - d, sc + d]).collect();
            s_splits.push(sc);
            let mut sigma_splits: Vec<f64> =
                ladder.iter().flat_map(|&d| [gc - d, gc + d]).collect();
            sigma_splits.push(gc);
            Ok(FieldOnManifold::ProductBiSym {
                value: Box::new(move |s, sg| value(s, sg)),
                deriv_s: Box::new(move |s, sg| (vs(s + fd, sg) - vs(s - fd, sg)) / (2.0 * fd)),
                deriv_sigma: Box::new(move |s, sg| (vg(s, sg + fd) - vg(s, sg - fd)) / (2.0 * fd)),
                s_splits,
                sigma_splits,
            })
        }
        (ModelManifold::RoundSphere { .. }, _) => Err(Error::UnsupportedSymmetry {
            tag: "axis-translation",
            manifold: manifold.kind_name(),
        }),
        _ => Err(Error::ManifoldMismatch {
            expected: manifold.kind_name(),
        }),
    }
}

/// Constant background solution as a symmetric field.
pub fn constant_field<'a>(manifold: &ModelManifold, value: f64) -> FieldOnManifold<'a> {
    match manifold {
        ModelManifold::RoundSphere { .. } => FieldOnManifold::Zonal {
            value: Box::new(move |_| value),
            deriv: Box::new(|_| 0.0),
            splits: vec![],
        },
        ModelManifold::ProductCircleSphere { .. } => FieldOnManifold::ProductBiSym {
            value: Box::new(move |_, _| value),
            deriv_s: Box::new(|_, _| 0.0),
            deriv_sigma: Box::new(|_, _| 0.0),
            s_splits: vec![],
            sigma_splits: vec![],
        },
    }
}

/// Re-export of the constant background amplitude, `u_0 = h^{(n-2)/4}`.
pub fn constant_background(manifold: &ModelManifold, coupling: Option<f64>) -> Result<f64> {
    constants::constant_background(manifold, coupling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fd1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    fn fd2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    }

    #[test]
    fn bubble_derivative_chains_match_finite_differences() {
        let b = BubbleProfile::new(5, 0.3).unwrap();
        for rho in [0.05, 0.2, 0.7, 1.9] {
            assert_relative_eq!(
                b.deriv(rho),
                fd1(|r| b.value(r), rho, 1e-6),
                max_relative = 1e-7
            );
            assert_relative_eq!(
                b.second_deriv(rho),
                fd2(|r| b.value(r), rho, 1e-5),
                max_relative = 1e-5
            );
        }
    }

    #[test]
    fn bubble_solves_critical_equation_exactly() {
        // -U'' - (n-1) U'/rho = U^{2*-1}, an algebraic identity of the chains.
        for n in [3, 4, 6, 9] {
            let b = BubbleProfile::new(n, 0.17).unwrap();
            for rho in [0.02, 0.17, 0.5, 3.0] {
                let lap = -b.second_deriv(rho) - (n as f64 - 1.0) * b.deriv(rho) / rho;
                assert_relative_eq!(lap, b.critical_power(rho), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn bubble_center_value() {
        let n = 6;
        let delta = 0.05;
        let b = BubbleProfile::new(n, delta).unwrap();
        let nf = n as f64;
        let expect = ((nf * (nf - 2.0)).sqrt() / delta).powf(0.5 * (nf - 2.0));
        assert_relative_eq!(b.value(0.0), expect, max_relative = 1e-14);
    }

    #[test]
    fn kernel_elements_solve_linearized_equation() {
        // -v'' - (n-1) v'/rho = (2*-1) U^{2*-2} v for both elements, checked
        // by finite differences at unit scale.
        let n = 5;
        let k = KernelElements::new(n, 1.0).unwrap();
        let b = BubbleProfile::new(n, 1.0).unwrap();
        // Scale element is radial; the translation element is the radial
        // factor of a degree-one harmonic, so its operator carries the
        // centrifugal term (n-1)/rho^2.
        for rho in [0.3, 0.9, 2.1] {
            let f = |r: f64| k.scale(r);
            let lap = -fd2(f, rho, 1e-5) - (n as f64 - 1.0) * fd1(f, rho, 1e-6) / rho;
            assert_relative_eq!(
                lap,
                b.linearization_weight(rho) * k.scale(rho),
                max_relative = 1e-4
            );
            let g = |r: f64| k.translation(r);
            let lap = -fd2(g, rho, 1e-5) - (n as f64 - 1.0) * fd1(g, rho, 1e-6) / rho
                + (n as f64 - 1.0) * k.translation(rho) / (rho * rho);
            assert_relative_eq!(
                lap,
                b.linearization_weight(rho) * k.translation(rho),
                max_relative = 1e-4
            );
        }
    }

    #[test]
    fn kernel_derivatives_match_finite_differences() {
        let k = KernelElements::new(7, 0.4).unwrap();
        for rho in [0.1, 0.4, 1.3] {
            assert_relative_eq!(
                k.scale_deriv(rho),
                fd1(|r| k.scale(r), rho, 1e-6),
                max_relative = 1e-6
            );
            assert_relative_eq!(
                k.translation_deriv(rho),
                fd1(|r| k.translation(r), rho, 1e-6),
                max_relative = 1e-6
            );
        }
        assert_relative_eq!(k.scale(0.0), k.scale_at_center(), max_relative = 1e-14);
        assert_relative_eq!(
            KernelElements::new(5, 1.0).unwrap().scale(1.3),
            kernel_scale_unit(5, 1.3),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            KernelElements::new(5, 1.0).unwrap().translation(0.6),
            kernel_translation_unit(5, 0.6),
            max_relative = 1e-14
        );
    }

    #[test]
    fn cutoff_plateau_support_and_smooth_joins() {
        for order in [SmoothstepOrder::Fifth, SmoothstepOrder::Seventh] {
            let c = CutoffSpec::new(0.8, order).unwrap();
            assert_eq!(c.value(0.0), 1.0);
            assert_eq!(c.value(0.4), 1.0);
            assert_eq!(c.value(0.8), 0.0);
            assert_eq!(c.value(2.0), 0.0);
            // Value and both derivatives are continuous at the joins.
            for d in [0.4, 0.8] {
                let below = c.eval(d - 1e-9);
                let above = c.eval(d + 1e-9);
                assert!((below.0 - above.0).abs() < 1e-7);
                assert!((below.1 - above.1).abs() < 1e-6);
                assert!((below.2 - above.2).abs() < 1e-4);
            }
            assert!(c.d1(0.6) < 0.0);
        }
    }

    #[test]
    fn cutoff_derivatives_match_finite_differences() {
        // Avoids the transition midpoint, where the second derivative of the
        // seventh-order step is exactly zero.
        let c = CutoffSpec::new(1.2, SmoothstepOrder::Seventh).unwrap();
        for d in [0.7, 0.8, 1.1] {
            assert_relative_eq!(c.d1(d), fd1(|x| c.value(x), d, 1e-6), max_relative = 1e-6);
            assert_relative_eq!(c.d2(d), fd2(|x| c.value(x), d, 1e-5), max_relative = 1e-4);
        }
    }

    #[test]
    fn concentration_scale_formula() {
        assert_relative_eq!(concentration_scale(4, 1e-4, 2.0), 2e-4, max_relative = 1e-13);
        assert_relative_eq!(
            concentration_scale(6, 1e-4, 1.0),
            1e-2,
            max_relative = 1e-13
        );
    }

    fn small_config(n: usize) -> BubbleConfig {
        let cutoff = CutoffSpec::new(0.8, SmoothstepOrder::Seventh).unwrap();
        BubbleConfig::new(n, 1e-3, cutoff).unwrap()
    }

    #[test]
    fn config_rejects_scale_outside_cutoff() {
        let cutoff = CutoffSpec::new(0.4, SmoothstepOrder::Seventh).unwrap();
        assert!(BubbleConfig::new(4, 0.5, cutoff).is_err());
        assert!(BubbleConfig::new(4, 0.3, cutoff).is_ok());
        assert!(BubbleConfig::new(4, 0.1, cutoff).is_ok());
    }

    #[test]
    fn chart_splits_are_a_scale_ladder() {
        let cfg = small_config(5);
        let s = cfg.chart_splits();
        assert_eq!(s, vec![1e-3, 1e-2, 1e-1, 0.4, 0.8]);
    }

    #[test]
    fn glued_bubble_center_and_support() {
        let m = ModelManifold::round_sphere(4).unwrap();
        let pole = PointOnManifold::pole(&m);
        let cfg = small_config(4);
        let at_center =
            glued_bubble_value(&m, &pole, &pole, &cfg).unwrap();
        assert_relative_eq!(
            at_center,
            cfg.profile().value(0.0),
            max_relative = 1e-14
        );
        // Vanishes outside the support, including at the antipode where the
        // chart itself would blow up.
        for theta in [0.9, 2.0, std::f64::consts::PI] {
            let p = PointOnManifold::sphere(theta).unwrap();
            assert_eq!(glued_bubble_value(&m, &pole, &p, &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn glued_bubble_translation_invariance_on_product() {
        let m = ModelManifold::product_circle_sphere(5, 1.3).unwrap();
        let cfg = small_config(5);
        let v1 = glued_bubble_value(
            &m,
            &PointOnManifold::product(0.0, 0.9).unwrap(),
            &PointOnManifold::product(0.07, 0.95).unwrap(),
            &cfg,
        )
        .unwrap();
        let v2 = glued_bubble_value(
            &m,
            &PointOnManifold::product(1.4, 0.9).unwrap(),
            &PointOnManifold::product(1.47, 0.95).unwrap(),
            &cfg,
        )
        .unwrap();
        assert_relative_eq!(v1, v2, max_relative = 1e-13);
        assert!(v1 > 0.0);
    }

    #[test]
    fn naive_and_conformal_gluing_agree_at_center_only() {
        let m = ModelManifold::round_sphere(5).unwrap();
        let pole = PointOnManifold::pole(&m);
        let cfg = small_config(5);
        let p = PointOnManifold::sphere(0.3).unwrap();
        let conformal = glued_bubble_value(&m, &pole, &p, &cfg).unwrap();
        let naive = glued_bubble_naive_value(&m, &pole, &p, &cfg).unwrap();
        // Conformal gluing reads the profile at rho = 2 tan(d/2) > d and
        // multiplies by Lambda > 1; the two differ at order d^2.
        assert!(conformal != naive);
        assert_relative_eq!(conformal, naive, max_relative = 0.05);
        let at_center = glued_bubble_naive_value(&m, &pole, &pole, &cfg).unwrap();
        assert_relative_eq!(at_center, cfg.profile().value(0.0), max_relative = 1e-14);
    }

    #[test]
    fn scale_kernel_center_value_on_manifold() {
        let m = ModelManifold::round_sphere(6).unwrap();
        let pole = PointOnManifold::pole(&m);
        let cfg = small_config(6);
        let v = glued_scale_kernel_value(&m, &pole, &pole, &cfg).unwrap();
        let k = KernelElements::new(6, cfg.delta).unwrap();
        assert_relative_eq!(v, k.scale_at_center(), max_relative = 1e-14);
        assert!(v < 0.0);
    }

    #[test]
    fn translation_kernel_is_odd_in_circle_offset() {
        let m = ModelManifold::product_circle_sphere(4, 1.0).unwrap();
        let c = PointOnManifold::product(0.0, 0.8).unwrap();
        let cfg = small_config(4);
        let plus = glued_translation_kernel_value(
            &m,
            &c,
            &PointOnManifold::product(0.004, 0.8).unwrap(),
            &cfg,
        )
        .unwrap();
        let minus = glued_translation_kernel_value(
            &m,
            &c,
            &PointOnManifold::product(-0.004, 0.8).unwrap(),
            &cfg,
        )
        .unwrap();
        // Odd at leading order; the conformal factor breaks exact oddness at
        // the next order in the offset.
        assert!(plus > 0.0 && minus < 0.0);
        assert_relative_eq!(plus, -minus, max_relative = 1e-2);
        let sphere = ModelManifold::round_sphere(4).unwrap();
        let pole = PointOnManifold::pole(&sphere);
        assert!(matches!(
            glued_translation_kernel_value(&sphere, &pole, &pole, &cfg),
            Err(Error::UnsupportedSymmetry { .. })
        ));
    }

    #[test]
    fn bubble_field_matches_pointwise_values_on_sphere() {
        let m = ModelManifold::round_sphere(5).unwrap();
        let pole = PointOnManifold::pole(&m);
        let cfg = small_config(5);
        let field = bubble_field(&m, &pole, &cfg).unwrap();
        if let FieldOnManifold::Zonal { value, deriv, .. } = &field {
            for theta in [1e-4, 0.01, 0.3, 0.79] {
                let p = PointOnManifold::sphere(theta).unwrap();
                let direct = glued_bubble_value(&m, &pole, &p, &cfg).unwrap();
                assert_relative_eq!(value(theta), direct, max_relative = 1e-13);
                assert_relative_eq!(
                    deriv(theta),
                    fd1(|t| value(t), theta, 1e-7),
                    max_relative = 2e-5
                );
            }
        } else {
            panic!("sphere bubble field must be zonal");
        }
    }

    #[test]
    fn bubble_field_matches_pointwise_values_on_product() {
        let m = ModelManifold::product_circle_sphere(6, 0.9).unwrap();
        let c = PointOnManifold::product(0.2, 0.0).unwrap();
        let cfg = small_config(6);
        let field = bubble_field(&m, &c, &cfg).unwrap();
        if let FieldOnManifold::ProductBiSym {
            value,
            deriv_s,
            deriv_sigma,
            ..
        } = &field
        {
            for (s, g) in [(0.2005, 0.01), (0.21, 0.12), (0.35, 0.2), (0.2, 0.9)] {
                let p = PointOnManifold::product(s, g).unwrap();
                let direct = glued_bubble_value(&m, &c, &p, &cfg).unwrap();
                assert_relative_eq!(value(s, g), direct, max_relative = 1e-13);
                assert_relative_eq!(
                    deriv_s(s, g),
                    fd1(|x| value(x, g), s, 1e-7),
                    max_relative = 2e-4
                );
                assert_relative_eq!(
                    deriv_sigma(s, g),
                    fd1(|x| value(s, x), g, 1e-7),
                    max_relative = 2e-4
                );
            }
        } else {
            panic!("product bubble field must be bi-symmetric");
        }
    }

    proptest! {
        #[test]
        fn bubble_profile_is_positive_and_decreasing(
            rho1 in 0.0f64..5.0,
            gap in 0.01f64..3.0,
        ) {
            let b = BubbleProfile::new(4, 0.2).unwrap();
            let v1 = b.value(rho1);
            let v2 = b.value(rho1 + gap);
            prop_assert!(v1 > 0.0);
            prop_assert!(v2 < v1);
        }

        #[test]
        fn cutoff_stays_in_unit_interval(d in 0.0f64..2.0) {
            let c = CutoffSpec::new(1.0, SmoothstepOrder::Seventh).unwrap();
            let v = c.value(d);
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn product_bubble_even_in_circle_offset(ds in -0.3f64..0.3, sg in 0.5f64..1.2) {
            let m = ModelManifold::product_circle_sphere(4, 1.0).unwrap();
            let c = PointOnManifold::product(0.0, 0.85).unwrap();
            let cfg = small_config(4);
            // Evenness holds for the profile part; the conformal factor is
            // even in ds times U(rho(ds)) with rho itself even only in the
            // sigma offset. Check the sigma reflection, which is exact.
            let p1 = PointOnManifold::product(ds, 0.85 + (sg - 0.85)).unwrap();
            let p2 = PointOnManifold::product(ds, 0.85 - (sg - 0.85)).unwrap();
            let v1 = glued_bubble_value(&m, &c, &p1, &cfg).unwrap();
            let v2 = glued_bubble_value(&m, &c, &p2, &cfg).unwrap();
            prop_assert!((v1 - v2).abs() <= 1e-12 * (1.0 + v1.abs()));
        }
    }
}
