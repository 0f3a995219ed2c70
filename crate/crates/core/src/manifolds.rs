//! Model manifolds for the blow-up verification suite.
//!
//! Two closed families are supported: the round sphere `S^n` (unit radius) and
//! the product `S^1(r) x S^{n-1}` with a unit sphere factor. Both carry
//! explicit Laplace spectra, constant scalar curvature, and a conformally flat
//! chart around any point, which is all the rest of the library needs.
//!
//! Points are stored in slice coordinates: a polar angle `theta` from a fixed
//! pole on the sphere, and a pair `(s, sigma)` of circle arc-length and sphere
//! polar angle on the product. Every construction downstream is symmetric
//! about the bubble center, so one meridian suffices.

use crate::error::{Error, Result};
use serde::Serialize;

pub(crate) const MAX_DIM: usize = 64;

/// A closed model manifold with known spectrum and curvature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ModelManifold {
    RoundSphere { n: usize },
    ProductCircleSphere { n: usize, r: f64 },
}

/// Point in slice coordinates, sufficient to evaluate distances between any
/// two points of the stored family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum PointOnManifold {
    SpherePolar { theta: f64 },
    ProductPoint { s: f64, sigma: f64 },
}

/// Laplace eigenvalue with its mode numbers `(i, j)`: circle mode `i` (always
/// 0 on the sphere) and sphere-factor mode `j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralValue {
    pub value: f64,
    pub i: u32,
    pub j: u32,
}

/// Outcome of the constant-solution nondegeneracy scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NondegeneracyVerdict {
    /// `Scal_g / (n-1)`, the value tested for spectrum membership.
    pub target: f64,
    pub nearest: SpectralValue,
    pub distance: f64,
    pub nondegenerate: bool,
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if !(3..=MAX_DIM).contains(&n) {
        return Err(Error::InvalidDimension {
            n,
            reason: "supported range is 3..=64",
        });
    }
    Ok(())
}

impl PointOnManifold {
    pub fn sphere(theta: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                reason: "polar angle must lie in [0, pi]",
            });
        }
        Ok(PointOnManifold::SpherePolar { theta })
    }

    pub fn product(s: f64, sigma: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&sigma) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: sigma,
                reason: "sphere-factor angle must lie in [0, pi]",
            });
        }
        if !s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s",
                value: s,
                reason: "circle coordinate must be finite",
            });
        }
        Ok(PointOnManifold::ProductPoint { s, sigma })
    }

    /// Canonical center: pole of the sphere, `(0, 0)` on the product.
    pub fn pole(manifold: &ModelManifold) -> Self {
        match manifold {
            ModelManifold::RoundSphere { .. } => PointOnManifold::SpherePolar { theta: 0.0 },
            ModelManifold::ProductCircleSphere { .. } => {
                PointOnManifold::ProductPoint { s: 0.0, sigma: 0.0 }
            }
        }
    }
}

/// Wrap a circle offset into `(-pi r, pi r]`.
fn wrap_circle(ds: f64, r: f64) -> f64 {
    let period = 2.0 * std::f64::consts::PI * r;
    let mut w = ds % period;
    if w > 0.5 * period {
        w -= period;
    } else if w <= -0.5 * period {
        w += period;
    }
    w
}

impl ModelManifold {
    pub fn round_sphere(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(ModelManifold::RoundSphere { n })
    }

    pub fn product_circle_sphere(n: usize, r: f64) -> Result<Self> {
        check_dim(n)?;
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: r,
                reason: "circle radius must be positive and finite",
            });
        }
        Ok(ModelManifold::ProductCircleSphere { n, r })
    }

    pub fn dim(&self) -> usize {
        match *self {
            ModelManifold::RoundSphere { n } => n,
            ModelManifold::ProductCircleSphere { n, .. } => n,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelManifold::RoundSphere { .. } => "round-sphere",
            ModelManifold::ProductCircleSphere { .. } => "product-circle-sphere",
        }
    }

    /// Scalar curvature: `n(n-1)` for the unit sphere, `(n-1)(n-2)` for the
    /// product (the circle factor is flat, the unit `S^{n-1}` contributes).
    pub fn scalar_curvature(&self) -> f64 {
        match *self {
            ModelManifold::RoundSphere { n } => (n * (n - 1)) as f64,
            ModelManifold::ProductCircleSphere { n, .. } => ((n - 1) * (n - 2)) as f64,
        }
    }

    /// Riemannian volume of the whole manifold.
    pub fn volume(&self) -> f64 {
        match *self {
            ModelManifold::RoundSphere { n } => crate::constants::sphere_volume(n),
            ModelManifold::ProductCircleSphere { n, r } => {
                2.0 * std::f64::consts::PI * r * crate::constants::sphere_volume(n - 1)
            }
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        let pi = std::f64::consts::PI;
        match *self {
            ModelManifold::RoundSphere { .. } => pi,
            ModelManifold::ProductCircleSphere { r, .. } => (pi * r).min(pi),
        }
    }

    /// Outer radius of the certified flat region of the conformal chart, in
    /// chart (flat) distance from the center. Unbounded on the sphere; on the
    /// product the cylinder development reaches the chart cut at flat distance
    /// `1 - e^{-pi r}`.
    pub fn chart_limit(&self) -> f64 {
        match *self {
            ModelManifold::RoundSphere { .. } => f64::INFINITY,
            ModelManifold::ProductCircleSphere { r, .. } => {
                1.0 - (-std::f64::consts::PI * r).exp()
            }
        }
    }

    /// Default cutoff radius for bubble supports, measured in the flat chart.
    /// Half the injectivity radius, capped on the product so the support stays
    /// strictly inside the flat region of the chart.
    pub fn default_cutoff_radius(&self) -> f64 {
        let half_inj = 0.5 * self.injectivity_radius();
        match self {
            ModelManifold::RoundSphere { .. } => half_inj,
            ModelManifold::ProductCircleSphere { .. } => half_inj.min(0.9 * self.chart_limit()),
        }
    }

    /// All Laplace eigenvalues strictly below `cutoff`, one entry per mode
    /// class, sorted by value then mode numbers.
    pub fn spectrum_below(&self, cutoff: f64) -> Vec<SpectralValue> {
        let mut out = Vec::new();
        match *self {
            ModelManifold::RoundSphere { n } => {
                let mut j = 0u32;
                loop {
                    let value = f64::from(j) * ((n - 1) as f64 + f64::from(j));
                    if value >= cutoff {
                        break;
                    }
                    out.push(SpectralValue { value, i: 0, j });
                    j += 1;
                }
            }
            ModelManifold::ProductCircleSphere { n, r } => {
                let mut i = 0u32;
                loop {
                    let circle = (f64::from(i) / r).powi(2);
                    if circle >= cutoff {
                        break;
                    }
                    let mut j = 0u32;
                    loop {
                        let value = circle + f64::from(j) * ((n - 2) as f64 + f64::from(j));
                        if value >= cutoff {
                            break;
                        }
                        out.push(SpectralValue { value, i, j });
                        j += 1;
                    }
                    i += 1;
                }
            }
        }
        out.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then(a.i.cmp(&b.i))
                .then(a.j.cmp(&b.j))
        });
        out
    }

    /// Tests whether the constant positive solution of the geometric equation
    /// is nondegenerate, i.e. whether `Scal_g/(n-1)` avoids the Laplace
    /// spectrum by more than `tol`.
    pub fn is_nondegenerate_constant_solution(&self, tol: f64) -> NondegeneracyVerdict {
        let target = self.scalar_curvature() / (self.dim() as f64 - 1.0);
        // Cutoff comfortably past the target; the nearest eigenvalue above it
        // is within the first gap, which is O(n) on both families.
        let cutoff = (2.0 * target).max(target + 10.0) + 1.0;
        let spectrum = self.spectrum_below(cutoff);
        let nearest = spectrum
            .iter()
            .copied()
            .min_by(|a, b| (a.value - target).abs().total_cmp(&(b.value - target).abs()))
            .expect("spectrum always contains 0");
        let distance = (nearest.value - target).abs();
        NondegeneracyVerdict {
            target,
            nearest,
            distance,
            nondegenerate: distance > tol,
        }
    }

    /// Geodesic distance between two points in slice coordinates.
    pub fn distance(&self, x: &PointOnManifold, y: &PointOnManifold) -> Result<f64> {
        match (*self, *x, *y) {
            (
                ModelManifold::RoundSphere { .. },
                PointOnManifold::SpherePolar { theta: a },
                PointOnManifold::SpherePolar { theta: b },
            ) => Ok((a - b).abs()),
            (
                ModelManifold::ProductCircleSphere { r, .. },
                PointOnManifold::ProductPoint { s: s1, sigma: g1 },
                PointOnManifold::ProductPoint { s: s2, sigma: g2 },
            ) => {
                let ds = wrap_circle(s1 - s2, r);
                let dg = g1 - g2;
                Ok(ds.hypot(dg))
            }
            _ => Err(Error::ManifoldMismatch {
                expected: self.kind_name(),
            }),
        }
    }

    /// Conformal factor `Lambda_xi(x)` of the flattening metric
    /// `g_xi = Lambda_xi^{4/(n-2)} g`, normalized so `Lambda_xi(xi) = 1`.
    ///
    /// Sphere: stereographic, `Lambda = (1 + z^2)^{(n-2)/2}` with
    /// `z = tan(d_g/2)`. Product: cylinder development,
    /// `Lambda = e^{(n-2) ds / 2}` with `ds` the circle offset from the
    /// center.
    pub fn conformal_factor(&self, center: &PointOnManifold, x: &PointOnManifold) -> Result<f64> {
        let n = self.dim() as f64;
        match (*self, *center, *x) {
            (
                ModelManifold::RoundSphere { .. },
                PointOnManifold::SpherePolar { theta: tc },
                PointOnManifold::SpherePolar { theta: tx },
            ) => {
                let d = (tx - tc).abs();
                if d >= std::f64::consts::PI {
                    return Err(Error::OutOfChart {
                        rho: d,
                        limit: std::f64::consts::PI,
                    });
                }
                let z = (0.5 * d).tan();
                Ok((1.0 + z * z).powf(0.5 * (n - 2.0)))
            }
            (
                ModelManifold::ProductCircleSphere { r, .. },
                PointOnManifold::ProductPoint { s: sc, sigma: gc },
                PointOnManifold::ProductPoint { s: sx, sigma: gx },
            ) => {
                let ds = wrap_circle(sx - sc, r);
                let rho = product_chart_radius(ds, gx - gc);
                let limit = self.chart_limit();
                if rho >= limit {
                    return Err(Error::OutOfChart { rho, limit });
                }
                Ok((0.5 * (n - 2.0) * ds).exp())
            }
            _ => Err(Error::ManifoldMismatch {
                expected: self.kind_name(),
            }),
        }
    }

    /// Flat-chart radius of `x` as seen from `center`: `2 tan(d/2)` on the
    /// sphere, the Euclidean distance in the cylinder development on the
    /// product. This is the argument fed to the bubble profile and cutoff.
    pub fn chart_radius(&self, center: &PointOnManifold, x: &PointOnManifold) -> Result<f64> {
        match (*self, *center, *x) {
            (
                ModelManifold::RoundSphere { .. },
                PointOnManifold::SpherePolar { theta: tc },
                PointOnManifold::SpherePolar { theta: tx },
            ) => Ok(2.0 * (0.5 * (tx - tc).abs()).tan()),
            (
                ModelManifold::ProductCircleSphere { r, .. },
                PointOnManifold::ProductPoint { s: sc, sigma: gc },
                PointOnManifold::ProductPoint { s: sx, sigma: gx },
            ) => Ok(product_chart_radius(wrap_circle(sx - sc, r), gx - gc)),
            _ => Err(Error::ManifoldMismatch {
                expected: self.kind_name(),
            }),
        }
    }
}

/// Flat distance from the center to the point at circle offset `ds` and
/// sphere-factor offset `sigma` in the cylinder development `(s, w) -> e^s w`.
pub(crate) fn product_chart_radius(ds: f64, sigma: f64) -> f64 {
    // |e^{ds} w - w_xi|^2 = e^{2 ds} - 2 e^{ds} cos(sigma) + 1. Rewritten as
    // expm1(ds)^2 + 2 e^{ds} (1 - cos sigma) so no digits are lost to
    // cancellation near the center.
    let a = ds.exp_m1();
    let b = 2.0 * ds.exp() * 2.0 * (0.5 * sigma).sin().powi(2);
    (a * a + b).sqrt()
}

/// Radii `r = i / sqrt(n-2)` at which the constant solution on
/// `S^1(r) x S^{n-1}` degenerates (the circle mode `i^2/r^2` hits `n-2`).
pub fn degenerate_radii(n: usize, i_max: u32) -> Result<Vec<f64>> {
    check_dim(n)?;
    let root = ((n - 2) as f64).sqrt();
    Ok((1..=i_max).map(|i| f64::from(i) / root).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn sphere_spectrum_matches_j_formula() {
        let m = ModelManifold::round_sphere(3).unwrap();
        let values: Vec<f64> = m.spectrum_below(10.0).iter().map(|e| e.value).collect();
        assert_eq!(values, vec![0.0, 3.0, 8.0]);
    }

    #[test]
    fn product_spectrum_enumeration() {
        let m = ModelManifold::product_circle_sphere(3, 1.0).unwrap();
        let entries = m.spectrum_below(2.5);
        let values: Vec<f64> = entries.iter().map(|e| e.value).collect();
        assert_eq!(values, vec![0.0, 1.0, 2.0]);
        assert_eq!(
            entries.iter().map(|e| (e.i, e.j)).collect::<Vec<_>>(),
            vec![(0, 0), (1, 0), (0, 1)]
        );
    }

    #[test]
    fn product_degenerate_at_listed_radii() {
        let m = ModelManifold::product_circle_sphere(6, 0.5).unwrap();
        let v = m.is_nondegenerate_constant_solution(1e-9);
        assert!(!v.nondegenerate);
        assert_eq!((v.nearest.i, v.nearest.j), (1, 0));

        let m = ModelManifold::product_circle_sphere(3, 0.7).unwrap();
        let v = m.is_nondegenerate_constant_solution(1e-9);
        assert!(v.nondegenerate);
        assert_relative_eq!(v.target, 1.0);
    }

    #[test]
    fn unit_sphere_always_degenerate() {
        for n in 3..=9 {
            let m = ModelManifold::round_sphere(n).unwrap();
            let v = m.is_nondegenerate_constant_solution(1e-9);
            assert!(!v.nondegenerate, "S^{n} must be degenerate");
            assert_relative_eq!(v.target, n as f64);
            assert_eq!(v.nearest.j, 1);
        }
    }

    #[test]
    fn degenerate_radii_formula() {
        let radii = degenerate_radii(3, 2).unwrap();
        assert_relative_eq!(radii[0], 1.0);
        assert_relative_eq!(radii[1], 2.0);
    }

    #[test]
    fn distances_match_frozen_cases() {
        let s = ModelManifold::round_sphere(3).unwrap();
        let a = PointOnManifold::sphere(0.0).unwrap();
        let b = PointOnManifold::sphere(std::f64::consts::PI).unwrap();
        assert_relative_eq!(s.distance(&a, &b).unwrap(), std::f64::consts::PI);

        let p = ModelManifold::product_circle_sphere(3, 1.0).unwrap();
        let x = PointOnManifold::product(0.0, 0.0).unwrap();
        let y = PointOnManifold::product(0.3, 0.4).unwrap();
        assert_relative_eq!(p.distance(&x, &y).unwrap(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn circle_distance_wraps() {
        let p = ModelManifold::product_circle_sphere(3, 1.0).unwrap();
        let period = 2.0 * std::f64::consts::PI;
        let x = PointOnManifold::product(0.1, 0.2).unwrap();
        let y = PointOnManifold::product(0.1 + period, 0.2).unwrap();
        assert!(p.distance(&x, &y).unwrap() < 1e-12);
    }

    #[test]
    fn default_cutoff_radius_cases() {
        let pi = std::f64::consts::PI;
        let s = ModelManifold::round_sphere(7).unwrap();
        assert_relative_eq!(s.default_cutoff_radius(), 0.5 * pi);

        let p = ModelManifold::product_circle_sphere(5, 0.2).unwrap();
        assert_relative_eq!(p.default_cutoff_radius(), 0.1 * pi);

        // Large circle: half-injectivity would leave the flat chart, so the
        // chart cap binds instead.
        let p = ModelManifold::product_circle_sphere(5, 10.0).unwrap();
        assert!(p.default_cutoff_radius() < p.chart_limit());
        assert_relative_eq!(p.default_cutoff_radius(), 0.9 * p.chart_limit());
    }

    #[test]
    fn conformal_factor_sphere_stereographic() {
        let m = ModelManifold::round_sphere(4).unwrap();
        let pole = PointOnManifold::pole(&m);
        let x = PointOnManifold::sphere(0.5 * std::f64::consts::PI).unwrap();
        // z = tan(pi/4) = 1, so Lambda = (1 + 1)^{(n-2)/2} = 2.
        assert_relative_eq!(m.conformal_factor(&pole, &x).unwrap(), 2.0, max_relative = 1e-14);

        // Gradient vanishes at the center: symmetric difference quotient.
        let h = 1e-4;
        let fp = m
            .conformal_factor(&pole, &PointOnManifold::sphere(h).unwrap())
            .unwrap();
        assert!((fp - 1.0) / h < 1e-3);
    }

    #[test]
    fn conformal_factor_product_exponential() {
        let m = ModelManifold::product_circle_sphere(3, 1.0).unwrap();
        let c = PointOnManifold::pole(&m);
        let x = PointOnManifold::product(0.1, 0.0).unwrap();
        assert_relative_eq!(
            m.conformal_factor(&c, &x).unwrap(),
            (0.05f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn out_of_chart_is_an_error() {
        let m = ModelManifold::product_circle_sphere(4, 0.2).unwrap();
        let c = PointOnManifold::pole(&m);
        let far = PointOnManifold::product(0.0, 3.0).unwrap();
        assert!(matches!(
            m.conformal_factor(&c, &far),
            Err(Error::OutOfChart { .. })
        ));
    }

    #[test]
    fn mismatched_points_rejected() {
        let m = ModelManifold::round_sphere(3).unwrap();
        let a = PointOnManifold::sphere(0.1).unwrap();
        let b = PointOnManifold::product(0.0, 0.0).unwrap();
        assert!(matches!(
            m.distance(&a, &b),
            Err(Error::ManifoldMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn product_spectrum_values_exact(n in 3usize..10, p in 1u32..8, q in 1u32..8, cut in 1.0f64..40.0) {
            // Rational radius r = p/q: eigenvalues are i^2 q^2 / p^2 + j(n-2+j),
            // exact in f64 over these ranges.
            let r = f64::from(p) / f64::from(q);
            let m = ModelManifold::product_circle_sphere(n, r).unwrap();
            for e in m.spectrum_below(cut) {
                let expect = (f64::from(e.i) * f64::from(q)).powi(2) / f64::from(p).powi(2)
                    + f64::from(e.j) * ((n - 2) as f64 + f64::from(e.j));
                prop_assert!((e.value - expect).abs() <= 1e-12 * expect.max(1.0));
                prop_assert!(e.value < cut);
            }
        }

        #[test]
        fn triangle_inequality_product(
            s1 in -6.0f64..6.0, g1 in 0.0f64..3.0,
            s2 in -6.0f64..6.0, g2 in 0.0f64..3.0,
            s3 in -6.0f64..6.0, g3 in 0.0f64..3.0,
        ) {
            let m = ModelManifold::product_circle_sphere(4, 0.8).unwrap();
            let a = PointOnManifold::product(s1, g1).unwrap();
            let b = PointOnManifold::product(s2, g2).unwrap();
            let c = PointOnManifold::product(s3, g3).unwrap();
            let dab = m.distance(&a, &b).unwrap();
            let dbc = m.distance(&b, &c).unwrap();
            let dac = m.distance(&a, &c).unwrap();
            prop_assert!(dac <= dab + dbc + 1e-12);
            prop_assert!(dab >= 0.0);
        }

        #[test]
        fn distance_zero_iff_equal(s in -3.0f64..3.0, g in 0.0f64..3.0) {
            let m = ModelManifold::product_circle_sphere(5, 0.6).unwrap();
            let a = PointOnManifold::product(s, g).unwrap();
            prop_assert_eq!(m.distance(&a, &a).unwrap(), 0.0);
        }
    }
}
