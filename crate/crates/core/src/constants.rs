//! Dimensional constants and the coefficient package of the reduced energy
//! expansion.
//!
//! Everything here is closed-form except the logarithmic correction
//! [`beta_n`], which needs one radial quadrature. Sphere volumes use exact
//! half-integer Gamma products rather than a Gamma function, so they are
//! accurate to a few ulp at every dimension this crate accepts.

use crate::error::{Error, Result};
use crate::manifolds::{check_dim, ModelManifold, MAX_DIM};
use crate::quadrature::{self, BaseRule, Domain, QuadratureSpec};
use serde::Serialize;
use std::sync::Mutex;

/// Volume of the unit `k`-sphere in `R^{k+1}`.
///
/// Even `k+1 = 2m`: `2 pi^m / (m-1)!`. Odd `k+1 = 2m+1`: `2 (4 pi)^m m! /
/// (2m)!`. Both are evaluated as stepwise products to keep intermediates in
/// range.
pub fn sphere_volume(k: usize) -> f64 {
    use std::f64::consts::PI;
    debug_assert!(k <= 2 * MAX_DIM, "unexpected sphere dimension {k}");
    let mut acc = 2.0f64;
    if (k + 1) % 2 == 0 {
        let m = (k + 1) / 2;
        for i in 1..=m {
            acc *= PI / if i >= 2 { (i - 1) as f64 } else { 1.0 };
        }
    } else {
        let m = k / 2;
        for i in 1..=m {
            acc *= PI * 4.0 * i as f64 / ((2 * i) as f64 * (2 * i - 1) as f64);
        }
    }
    acc
}

/// Conformal coupling `(n-2) / (4(n-1))` in front of the scalar curvature.
pub fn yamabe_coupling(n: usize) -> f64 {
    (n as f64 - 2.0) / (4.0 * (n as f64 - 1.0))
}

/// Critical Sobolev exponent `2n / (n-2)`.
pub fn critical_exponent(n: usize) -> f64 {
    2.0 * n as f64 / (n as f64 - 2.0)
}

/// Best constant `K_n` of the Euclidean Sobolev embedding, `1/K_n =
/// sqrt(n(n-2)) omega_n^{1/n} / 2`.
pub fn sobolev_constant(n: usize) -> f64 {
    let nf = n as f64;
    2.0 / ((nf * (nf - 2.0)).sqrt() * sphere_volume(n).powf(1.0 / nf))
}

/// `K_n^{-n}`: the common value of the Dirichlet energy and the critical-norm
/// mass of the standard bubble, `(n(n-2)/4)^{n/2} omega_n`.
pub fn sobolev_mass(n: usize) -> f64 {
    let nf = n as f64;
    (nf * (nf - 2.0) / 4.0).powf(nf / 2.0) * sphere_volume(n)
}

static BETA_CACHE: Mutex<Vec<(usize, f64)>> = Mutex::new(Vec::new());

/// Logarithmic correction constant entering the epsilon-linear coefficient:
///
/// `beta_n = 2^{n-3} (n-2)^2 (omega_{n-1}/omega_n) int_0^inf r^{(n-2)/2}
/// ln(1+r) (1+r)^{-n} dr + (n-2)^2/(4n) (1 - n ln sqrt(n(n-2)))`.
///
/// Cached per dimension; the cached value is bit-identical across calls.
pub fn beta_n(n: usize) -> Result<f64> {
    check_dim(n)?;
    {
        let cache = BETA_CACHE.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(&(_, v)) = cache.iter().find(|(k, _)| *k == n) {
            return Ok(v);
        }
    }
    let v = beta_n_refined(n, 0)?;
    let mut cache = BETA_CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if !cache.iter().any(|(k, _)| *k == n) {
        cache.push((n, v));
    }
    Ok(v)
}

/// Uncached [`beta_n`] with `extra_halvings` forced bisection levels in the
/// quadrature, for refinement-stability checks.
pub fn beta_n_refined(n: usize, extra_halvings: u32) -> Result<f64> {
    check_dim(n)?;
    let spec = QuadratureSpec {
        rel_tol: 1e-13,
        abs_tol: 1e-16,
        max_depth: 45,
        base_rule: BaseRule::GaussKronrod21,
    };
    let nf = n as f64;
    let p = (nf - 2.0) / 2.0;
    // Evaluated in log space: the direct form overflows r^p for n near the
    // dimension cap once the tail substitution probes r ~ 1e17.
    let mut f = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let l = r.ln_1p();
        (p * r.ln() + l.ln() - nf * l).exp()
    };
    let q = quadrature::integrate_radial_refined(
        &mut f,
        Domain::SemiInfinite { a: 0.0 },
        &[1.0, 10.0, 100.0],
        &spec,
        extra_halvings,
    )?;
    let ratio = sphere_volume(n - 1) / sphere_volume(n);
    let sq = (nf - 2.0) * (nf - 2.0);
    Ok(2f64.powi(n as i32 - 3) * sq * ratio * q.value
        + sq / (4.0 * nf) * (1.0 - nf * 0.5 * (nf * (nf - 2.0)).ln()))
}

/// Coefficients of the reduced energy expansion on a model manifold with a
/// constant coupling `h`:
///
/// `J_eps = c1 + c2 eps + c3 eps ln(eps) + eps [c4 ln(1/t) + c5 Phi
/// t^{(n-2)/2}] + remainder`, with the concentration scale `delta = t
/// eps^{2/(n-2)}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReducedCoefficients {
    pub n: usize,
    /// Constant coupling `h` the coefficients were computed for.
    pub coupling: f64,
    /// Constant background solution `u_0 = h^{(n-2)/4}`.
    pub background: f64,
    /// Volume of the manifold.
    pub volume: f64,
    /// `c1`: energy of the background plus the bubble mass, `(u_0^{2*} Vol +
    /// K_n^{-n}) / n`.
    pub energy_constant: f64,
    /// `c2`: coefficient of `eps`.
    pub epsilon_coefficient: f64,
    /// `c3`: coefficient of `eps ln(eps)`; always negative.
    pub epsilon_log_coefficient: f64,
    /// `c4`: coefficient of `ln(1/t)` in the scale function; always positive.
    pub scale_log_coefficient: f64,
    /// `c5`: coefficient of `Phi(xi) t^{(n-2)/2}`; always positive.
    pub interaction_coefficient: f64,
    /// The constant [`beta_n`] entering `c2`.
    pub beta: f64,
    /// Coefficient of the squared-Weyl correction to `Phi`; zero below
    /// dimension seven where the curvature deficit is absorbed elsewhere.
    pub weyl_coefficient: f64,
    /// Factor multiplying `(h - c_n Scal) t^2` in the intermediate expansion.
    /// Equals 1/2 in dimension six, where the `t^2` term joins the leading
    /// profile term. Undefined in dimension four.
    pub coupling_correction_factor: Option<f64>,
}

/// Resolves an optional constant coupling: `None` selects the geometric
/// value `c_n Scal_g`. Explicit couplings must be positive and finite.
pub fn resolve_coupling(manifold: &ModelManifold, coupling: Option<f64>) -> Result<f64> {
    let h = match coupling {
        Some(h) => h,
        None => yamabe_coupling(manifold.dim()) * manifold.scalar_curvature(),
    };
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter {
            name: "coupling",
            value: h,
            reason: "constant coupling must be positive and finite",
        });
    }
    Ok(h)
}

/// Constant solution `u_0 = h^{(n-2)/4}` of `Delta u + h u = u^{2*-1}`.
pub fn constant_background(manifold: &ModelManifold, coupling: Option<f64>) -> Result<f64> {
    let h = resolve_coupling(manifold, coupling)?;
    Ok(h.powf((manifold.dim() as f64 - 2.0) / 4.0))
}

/// Computes [`ReducedCoefficients`] for the manifold. `coupling` of `None`
/// selects the geometric value `c_n Scal_g`; an explicit coupling must be
/// positive so the constant background solution exists.
pub fn reduced_coefficients(
    manifold: &ModelManifold,
    coupling: Option<f64>,
) -> Result<ReducedCoefficients> {
    let n = manifold.dim();
    let nf = n as f64;
    let h = resolve_coupling(manifold, coupling)?;
    let u0 = h.powf((nf - 2.0) / 4.0);
    let vol = manifold.volume();
    let mass = sobolev_mass(n);
    let ts = critical_exponent(n);
    let beta = beta_n(n)?;
    let u0_crit = u0.powf(ts);
    let c1 = (u0_crit * vol + mass) / nf;
    let c2 = u0_crit * (u0.ln() - 1.0 / ts) / ts * vol - beta * mass / nf;
    let c3 = -mass * (nf - 2.0) / (2.0 * nf);
    let c4 = mass * (nf - 2.0) * (nf - 2.0) / (4.0 * nf);
    let c5 = mass * 2f64.powi(n as i32) * sphere_volume(n - 1)
        / (nf * (nf * (nf - 2.0)).powf((nf - 2.0) / 4.0) * sphere_volume(n));
    let weyl = if n >= 7 {
        mass / (nf * 24.0 * (nf - 4.0) * (nf - 6.0))
    } else {
        0.0
    };
    let bracket = if n == 4 {
        None
    } else {
        Some(
            nf.powf((nf - 2.0) / 4.0) * (nf - 2.0).powf((nf - 6.0) / 4.0) * (nf - 1.0)
                * sphere_volume(n)
                / (2f64.powi(n as i32 - 1) * (nf - 4.0) * sphere_volume(n - 1)),
        )
    };
    Ok(ReducedCoefficients {
        n,
        coupling: h,
        background: u0,
        volume: vol,
        energy_constant: c1,
        epsilon_coefficient: c2,
        epsilon_log_coefficient: c3,
        scale_log_coefficient: c4,
        interaction_coefficient: c5,
        beta,
        weyl_coefficient: weyl,
        coupling_correction_factor: bracket,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_volume_small_cases() {
        assert_relative_eq!(sphere_volume(0), 2.0, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(1), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(2), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(3), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(4), 8.0 * PI * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(5), PI.powi(3), max_relative = 1e-15);
    }

    #[test]
    fn sphere_volume_recursion() {
        // omega_k = 2 pi omega_{k-2} / (k-1).
        for k in 3..=(2 * MAX_DIM) {
            assert_relative_eq!(
                sphere_volume(k),
                2.0 * PI * sphere_volume(k - 2) / (k as f64 - 1.0),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn sobolev_mass_frozen_values() {
        // Independently computed with 50-digit arithmetic.
        assert_relative_eq!(sobolev_mass(3), 12.82099220496912683606, max_relative = 1e-14);
        assert_relative_eq!(sobolev_mass(6), 7143.84614714107856843, max_relative = 1e-14);
        assert_relative_eq!(
            sobolev_mass(10),
            66320456.55452448849546,
            max_relative = 1e-14
        );
    }

    #[test]
    fn sobolev_constant_inverts_mass() {
        for n in 3..=12 {
            assert_relative_eq!(
                sobolev_constant(n).powi(-(n as i32)),
                sobolev_mass(n),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn beta_frozen_values() {
        // Independently computed with 50-digit arithmetic.
        let frozen = [
            (3, 0.1675803875297922766175),
            (4, 0.04361256249341536920749),
            (5, -0.789894163720232431868),
            (6, -2.556107660695891239294),
            (7, -5.40743245896462519089),
            (8, -9.459690263371223466503),
            (9, -14.8063998309850331882),
            (10, -21.52605434723232273943),
        ];
        for (n, want) in frozen {
            let got = beta_n(n).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-11);
        }
    }

    #[test]
    fn beta_cache_is_bit_stable() {
        let a = beta_n(5).unwrap();
        let b = beta_n(5).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(a.to_bits(), beta_n_refined(5, 0).unwrap().to_bits());
    }

    #[test]
    fn beta_refinement_stable() {
        for n in [3, 6, 10] {
            let base = beta_n_refined(n, 0).unwrap();
            let fine = beta_n_refined(n, 1).unwrap();
            assert!(
                (base - fine).abs() <= 1e-9 * base.abs().max(1.0),
                "n={n}: {base} vs {fine}"
            );
        }
    }

    fn sphere_coeffs(n: usize) -> ReducedCoefficients {
        let m = ModelManifold::round_sphere(n).unwrap();
        reduced_coefficients(&m, None).unwrap()
    }

    #[test]
    fn coefficient_signs_and_ratios() {
        for n in 3..=10 {
            let c = sphere_coeffs(n);
            assert!(c.epsilon_log_coefficient < 0.0);
            assert!(c.scale_log_coefficient > 0.0);
            assert!(c.interaction_coefficient > 0.0);
            // c3 = -2 c4 / (n-2): the eps ln(eps) term is the scale term at
            // delta = eps^{2/(n-2)}.
            assert_relative_eq!(
                c.epsilon_log_coefficient,
                -2.0 * c.scale_log_coefficient / (n as f64 - 2.0),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn frozen_scale_and_interaction_coefficients() {
        // Independently computed with 50-digit arithmetic.
        let c5 = sphere_coeffs(5);
        assert_relative_eq!(c5.scale_log_coefficient, 379.9621191432323518622, max_relative = 1e-13);
        assert_relative_eq!(
            c5.interaction_coefficient,
            601.8083049029299524252,
            max_relative = 1e-13
        );
        let c10 = sphere_coeffs(10);
        assert_relative_eq!(
            c10.interaction_coefficient,
            1305683.988417200867254,
            max_relative = 1e-13
        );
    }

    #[test]
    fn coupling_correction_identities() {
        for n in [3usize, 5, 6, 7, 8, 9, 10] {
            let c = sphere_coeffs(n);
            let nf = n as f64;
            let bracket = c.coupling_correction_factor.unwrap();
            assert_relative_eq!(
                c.interaction_coefficient * bracket,
                sobolev_mass(n) * 2.0 * (nf - 1.0) / (nf * (nf - 2.0) * (nf - 4.0)),
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(
            sphere_coeffs(6).coupling_correction_factor.unwrap(),
            0.5,
            max_relative = 1e-13
        );
        assert!(sphere_coeffs(4).coupling_correction_factor.is_none());
    }

    #[test]
    fn weyl_coefficient_ratio() {
        for n in 3..7 {
            assert_eq!(sphere_coeffs(n).weyl_coefficient, 0.0);
        }
        let c = sphere_coeffs(10);
        assert_relative_eq!(
            c.weyl_coefficient / c.interaction_coefficient,
            5.0 / 567.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sphere_background_mass_equals_bubble_mass() {
        // On the round sphere with geometric coupling, u_0^{2*} Vol =
        // K_n^{-n}, so c1 = 2 K_n^{-n} / n.
        for n in 3..=10 {
            let c = sphere_coeffs(n);
            assert_relative_eq!(
                c.energy_constant,
                2.0 * sobolev_mass(n) / n as f64,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn frozen_energy_coefficients() {
        // Independently computed with 50-digit arithmetic.
        let c = sphere_coeffs(3);
        assert_relative_eq!(c.energy_constant, 8.547328136646084557371, max_relative = 1e-12);
        assert_relative_eq!(
            c.epsilon_coefficient,
            -1.226003020119212891112,
            max_relative = 1e-11
        );

        let m = ModelManifold::product_circle_sphere(5, 1.0).unwrap();
        let c = reduced_coefficients(&m, None).unwrap();
        assert_relative_eq!(c.coupling, 2.25, max_relative = 1e-15);
        assert_relative_eq!(c.energy_constant, 420.0228940629762553601, max_relative = 1e-12);
        assert_relative_eq!(
            c.epsilon_coefficient,
            249.4972021631453692647,
            max_relative = 1e-11
        );
    }

    #[test]
    fn explicit_coupling_overrides_geometric() {
        let m = ModelManifold::round_sphere(4).unwrap();
        let c = reduced_coefficients(&m, Some(2.0)).unwrap();
        assert_relative_eq!(c.background, 2f64.sqrt(), max_relative = 1e-15);
        assert!(matches!(
            reduced_coefficients(&m, Some(-1.0)),
            Err(Error::InvalidParameter { name: "coupling", .. })
        ));
    }

    proptest! {
        #[test]
        fn volume_recursion_holds_everywhere(k in 3usize..100) {
            let lhs = sphere_volume(k);
            let rhs = 2.0 * PI * sphere_volume(k - 2) / (k as f64 - 1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
        }

        #[test]
        fn background_scales_with_coupling(h in 0.1f64..10.0) {
            let m = ModelManifold::round_sphere(5).unwrap();
            let c = reduced_coefficients(&m, Some(h)).unwrap();
            prop_assert!((c.background - h.powf(0.75)).abs() <= 1e-14 * c.background);
        }
    }
}
