//! Deterministic adaptive quadrature.
//!
//! The engine is a Gauss-Kronrod pair (7-15 by default, 10-21 selectable) with
//! node tables embedded below, driven by recursive bisection: depth-first,
//! left interval first, tolerance halved per split. Evaluation and summation
//! order depend only on the inputs, so repeated runs are bit-identical.
//! Concentration scales are handled by caller-supplied split points rather
//! than by guessing; the bubble code seeds splits at `delta * 10^k`.

use crate::constants::sphere_volume;
use crate::error::{Error, Result};
use crate::manifolds::ModelManifold;
use serde::Serialize;

/// 15-point Kronrod abscissae (positive half, excluding the center) with the
/// embedded 7-point Gauss rule on entries 1, 3, 5 and the center.
const XGK15: [f64; 7] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
];
const WGK15: [f64; 7] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
];
const WGK15_CENTER: f64 = 0.209482141084727828012999174891714;
const WG7: [f64; 3] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
];
const WG7_CENTER: f64 = 0.417959183673469387755102040816327;

/// 21-point Kronrod abscissae with the embedded 10-point Gauss rule on the
/// odd entries (no center node in the Gauss rule).
const XGK21: [f64; 10] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
];
const WGK21: [f64; 10] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
];
const WGK21_CENTER: f64 = 0.149445554002916905664936468389821;
const WG10: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BaseRule {
    GaussKronrod15,
    GaussKronrod21,
}

/// Tolerances and limits for one integral. `rel_tol` applies to the magnitude
/// of the whole integral, `abs_tol` is the floor for integrals near zero.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub base_rule: BaseRule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 40,
            base_rule: BaseRule::GaussKronrod15,
        }
    }
}

impl QuadratureSpec {
    /// Spec for inner integrals of a nested (iterated) integral.
    ///
    /// The inner relative tolerance must sit far below the outer one: the
    /// outer adaptive pass treats inner quadrature noise as structure, and
    /// when the noise amplitude is comparable to a segment budget both
    /// shrink linearly under bisection, so refinement never terminates. A
    /// factor of 256 keeps the noise two orders under any budget. The
    /// absolute floor is left alone; tightening it below machine scale makes
    /// near-zero inner slices unsatisfiable instead.
    pub(crate) fn inner(&self) -> Self {
        QuadratureSpec {
            rel_tol: self.rel_tol / 256.0,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: self.rel_tol,
                reason: "must lie in (0, 1)",
            });
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "abs_tol",
                value: self.abs_tol,
                reason: "must be positive",
            });
        }
        Ok(())
    }
}

/// Converged integral value with its error bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Integration domain for radial integrals. The semi-infinite domain is
/// mapped to (0, 1) by `r = a + u/(1-u)` before adaptive refinement.
#[derive(Clone, Copy, Debug)]
pub enum Domain {
    Finite { a: f64, b: f64 },
    SemiInfinite { a: f64 },
}

struct Kernel15;
struct Kernel21;

trait GkKernel {
    /// Kronrod estimate, Gauss estimate, integral of |f|, and the QUADPACK
    /// smoothness scale resasc, all scaled to the interval.
    fn apply(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64, f64);
}

macro_rules! gk_apply {
    ($f:ident, $a:ident, $b:ident, $xgk:ident, $wgk:ident, $wgk_center:ident,
     $gauss:expr, $gauss_center:expr) => {{
        let c = 0.5 * ($a + $b);
        let h = 0.5 * ($b - $a);
        let fc = $f(c);
        let mut resk = $wgk_center * fc;
        let mut resg = $gauss_center * fc;
        let mut resabs = $wgk_center * fc.abs();
        let mut fv = [0.0f64; 2 * $xgk.len()];
        for (i, &x) in $xgk.iter().enumerate() {
            let f1 = $f(c - h * x);
            let f2 = $f(c + h * x);
            fv[2 * i] = f1;
            fv[2 * i + 1] = f2;
            resk += $wgk[i] * (f1 + f2);
            resabs += $wgk[i] * (f1.abs() + f2.abs());
            if let Some(wg) = ($gauss)(i) {
                resg += wg * (f1 + f2);
            }
        }
        let reskh = 0.5 * resk;
        let mut resasc = $wgk_center * (fc - reskh).abs();
        for (i, &w) in $wgk.iter().enumerate() {
            resasc += w * ((fv[2 * i] - reskh).abs() + (fv[2 * i + 1] - reskh).abs());
        }
        (resk * h, resg * h, resabs * h.abs(), resasc * h.abs())
    }};
}

impl GkKernel for Kernel15 {
    fn apply(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64, f64) {
        gk_apply!(
            f,
            a,
            b,
            XGK15,
            WGK15,
            WGK15_CENTER,
            |i: usize| if i % 2 == 1 { Some(WG7[i / 2]) } else { None },
            WG7_CENTER
        )
    }
}

impl GkKernel for Kernel21 {
    fn apply(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64, f64) {
        gk_apply!(
            f,
            a,
            b,
            XGK21,
            WGK21,
            WGK21_CENTER,
            |i: usize| if i % 2 == 1 { Some(WG10[i / 2]) } else { None },
            0.0
        )
    }
}

/// Kronrod estimate plus the QUADPACK-style rescaled error bound.
fn estimate(
    rule: BaseRule,
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
) -> (f64, f64, bool) {
    let (resk, resg, resabs, resasc) = match rule {
        BaseRule::GaussKronrod15 => Kernel15::apply(f, a, b),
        BaseRule::GaussKronrod21 => Kernel21::apply(f, a, b),
    };
    let mut err = (resk - resg).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * ((200.0 * err / resasc).powf(1.5)).min(1.0);
    }
    // Roundoff floor: no estimate on this segment can be trusted below
    // 50 eps |f|-mass. When the floor wins, bisection cannot help, because the
    // children's floors sum back to the parent's while the budget halves; the
    // flag lets the driver accept such segments instead of recursing forever.
    let tiny = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    let mut at_floor = err == 0.0;
    if resabs > tiny {
        let floor = 50.0 * f64::EPSILON * resabs;
        if floor >= err {
            err = floor;
            at_floor = true;
        }
    }
    (resk, err, at_floor)
}

/// Recursive bisection: accept when the local error meets the local budget,
/// otherwise split and halve the budget. `force_depth` bisections are taken
/// unconditionally, which is how refinement-stability checks double the mesh.
/// `floor_acc` collects the error of roundoff-limited leaves so the driver
/// can tell unavoidable machine error from genuine non-convergence.
#[allow(clippy::too_many_arguments)]
fn refine(
    rule: BaseRule,
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
    force_depth: u32,
    acc: &mut KahanSum,
    err_acc: &mut f64,
    floor_acc: &mut f64,
) {
    let (value, err, at_floor) = estimate(rule, f, a, b);
    let must_split = depth < force_depth;
    if (!must_split && (err <= tol || at_floor)) || depth >= max_depth {
        acc.add(value);
        *err_acc += err;
        if at_floor {
            *floor_acc += err;
        }
        return;
    }
    let mid = 0.5 * (a + b);
    refine(
        rule,
        f,
        a,
        mid,
        0.5 * tol,
        depth + 1,
        max_depth,
        force_depth,
        acc,
        err_acc,
        floor_acc,
    );
    refine(
        rule,
        f,
        mid,
        b,
        0.5 * tol,
        depth + 1,
        max_depth,
        force_depth,
        acc,
        err_acc,
        floor_acc,
    );
}

/// Compensated accumulator; keeps leaf summation stable without changing the
/// deterministic ordering.
#[derive(Default)]
struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Core driver over a finite interval with interior split points.
pub(crate) fn integrate_core(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    splits: &[f64],
    spec: &QuadratureSpec,
    force_depth: u32,
) -> Result<Quadrature> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidParameter {
            name: "interval",
            value: b - a,
            reason: "need finite bounds with b > a",
        });
    }
    let mut edges: Vec<f64> = Vec::with_capacity(splits.len() + 2);
    edges.push(a);
    let mut sorted: Vec<f64> = splits.iter().copied().filter(|s| *s > a && *s < b).collect();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    edges.extend(sorted);
    edges.push(b);

    // First pass fixes the magnitude used by the relative tolerance; a second
    // pass refines every segment against a budget split evenly among them.
    let mut rough = KahanSum::default();
    for w in edges.windows(2) {
        let (v, _, _) = estimate(spec.base_rule, f, w[0], w[1]);
        rough.add(v);
    }
    let scale = rough.value().abs();
    let tol_global = spec.abs_tol.max(spec.rel_tol * scale);
    let tol_seg = tol_global / (edges.len() - 1) as f64;

    let mut acc = KahanSum::default();
    let mut err = 0.0;
    let mut floor_err = 0.0;
    for w in edges.windows(2) {
        refine(
            spec.base_rule,
            f,
            w[0],
            w[1],
            tol_seg,
            0,
            spec.max_depth,
            force_depth,
            &mut acc,
            &mut err,
            &mut floor_err,
        );
    }
    let value = acc.value();
    let requested = spec.abs_tol.max(spec.rel_tol * value.abs());
    // Roundoff-limited error cannot be refined away, so only the excess over
    // it counts against the budget; the reported error bar keeps the full
    // amount. Written so that a NaN value or estimate also lands here.
    if !(err - floor_err <= 10.0 * requested.max(tol_global)) || !value.is_finite() {
        return Err(Error::ToleranceNotMet {
            estimate: value,
            error: err,
            requested,
        });
    }
    Ok(Quadrature { value, error: err })
}

/// Adaptive integral of `f` over a radial domain, with caller-chosen interior
/// split points (concentration scales, cutoff radii).
pub fn integrate_radial<F: FnMut(f64) -> f64>(
    mut f: F,
    domain: Domain,
    splits: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    integrate_radial_refined(&mut f, domain, splits, spec, 0)
}

/// Same as [`integrate_radial`] but forcing `force_depth` extra levels of
/// bisection everywhere; used by stability checks that compare a result
/// against a doubled mesh.
pub fn integrate_radial_refined(
    f: &mut dyn FnMut(f64) -> f64,
    domain: Domain,
    splits: &[f64],
    spec: &QuadratureSpec,
    force_depth: u32,
) -> Result<Quadrature> {
    match domain {
        Domain::Finite { a, b } => integrate_core(f, a, b, splits, spec, force_depth),
        Domain::SemiInfinite { a } => {
            // r = a + u/(1-u), dr = du/(1-u)^2; split points map to
            // u = (r-a)/(1+r-a).
            let mapped: Vec<f64> = splits
                .iter()
                .filter(|&&r| r > a)
                .map(|&r| (r - a) / (1.0 + r - a))
                .collect();
            let mut g = |u: f64| {
                let one_minus = 1.0 - u;
                let r = a + u / one_minus;
                // Deep bisection near u = 1 can round a node onto the
                // endpoint; the transformed integrand of any integrable f
                // tends to zero there.
                if !r.is_finite() {
                    return 0.0;
                }
                f(r) / (one_minus * one_minus)
            };
            integrate_core(&mut g, 0.0, 1.0, &mapped, spec, force_depth)
        }
    }
}

/// Scalar field on a model manifold with enough symmetry to integrate by
/// slice reduction. Derivatives are analytic, supplied by the constructor
/// (profiles build these for bubbles).
pub enum FieldOnManifold<'a> {
    /// Function of the polar angle from a center on the round sphere.
    Zonal {
        value: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
        deriv: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
        /// Interior split points in theta.
        splits: Vec<f64>,
    },
    /// Function of (circle offset s, sphere-factor angle sigma) on the
    /// product, symmetric in the remaining sphere directions.
    ProductBiSym {
        value: Box<dyn Fn(f64, f64) -> f64 + Sync + 'a>,
        deriv_s: Box<dyn Fn(f64, f64) -> f64 + Sync + 'a>,
        deriv_sigma: Box<dyn Fn(f64, f64) -> f64 + Sync + 'a>,
        s_splits: Vec<f64>,
        sigma_splits: Vec<f64>,
    },
    /// No usable symmetry; carried so callers get a typed error instead of a
    /// silently wrong reduction.
    General,
}

impl<'a> FieldOnManifold<'a> {
    fn symmetry_tag(&self) -> &'static str {
        match self {
            FieldOnManifold::Zonal { .. } => "zonal",
            FieldOnManifold::ProductBiSym { .. } => "product-bi-symmetric",
            FieldOnManifold::General => "general",
        }
    }
}

fn check_field_matches(manifold: &ModelManifold, field: &FieldOnManifold) -> Result<()> {
    let ok = matches!(
        (manifold, field),
        (ModelManifold::RoundSphere { .. }, FieldOnManifold::Zonal { .. })
            | (
                ModelManifold::ProductCircleSphere { .. },
                FieldOnManifold::ProductBiSym { .. }
            )
    );
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedSymmetry {
            tag: field.symmetry_tag(),
            manifold: manifold.kind_name(),
        })
    }
}

/// Integral of a symmetric field over the manifold.
///
/// Zonal reduction on `S^n`: `omega_{n-1} int_0^pi f(theta) sin^{n-1}(theta)
/// dtheta`. On the product: iterated integral over the circle and the
/// sphere-factor angle with weight `omega_{n-2} sin^{n-2}(sigma)`.
pub fn integrate_manifold(
    manifold: &ModelManifold,
    field: &FieldOnManifold,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    check_field_matches(manifold, field)?;
    match (manifold, field) {
        (ModelManifold::RoundSphere { n }, FieldOnManifold::Zonal { value, splits, .. }) => {
            integrate_zonal(*n, |theta| value(theta), splits, spec)
        }
        (
            ModelManifold::ProductCircleSphere { n, r },
            FieldOnManifold::ProductBiSym {
                value,
                s_splits,
                sigma_splits,
                ..
            },
        ) => integrate_product(*n, *r, |s, g| value(s, g), s_splits, sigma_splits, spec),
        _ => unreachable!("checked above"),
    }
}

pub(crate) fn integrate_zonal<F: FnMut(f64) -> f64>(
    n: usize,
    mut f: F,
    splits: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let w = sphere_volume(n - 1);
    let mut g = |theta: f64| f(theta) * theta.sin().powi(n as i32 - 1);
    let q = integrate_core(&mut g, 0.0, std::f64::consts::PI, splits, spec, 0)?;
    Ok(Quadrature {
        value: w * q.value,
        error: w * q.error,
    })
}

pub(crate) fn integrate_product<F: FnMut(f64, f64) -> f64>(
    n: usize,
    r: f64,
    mut f: F,
    s_splits: &[f64],
    sigma_splits: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let w = sphere_volume(n - 2);
    let half = std::f64::consts::PI * r;
    let inner_spec = spec.inner();
    let mut bad: Option<Error> = None;
    let mut g = |s: f64| {
        let mut h = |sigma: f64| f(s, sigma) * sigma.sin().powi(n as i32 - 2);
        match integrate_core(&mut h, 0.0, std::f64::consts::PI, sigma_splits, &inner_spec, 0) {
            Ok(q) => q.value,
            Err(e) => {
                if bad.is_none() {
                    bad = Some(e);
                }
                f64::NAN
            }
        }
    };
    let q = integrate_core(&mut g, -half, half, s_splits, spec, 0);
    if let Some(e) = bad {
        return Err(e);
    }
    let q = q?;
    Ok(Quadrature {
        value: w * q.value,
        error: w * q.error,
    })
}

/// `L^p` norm of a symmetric field, `p >= 1`.
pub fn lp_norm(
    manifold: &ModelManifold,
    field: &FieldOnManifold,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "L^p norms need p >= 1",
        });
    }
    check_field_matches(manifold, field)?;
    let q = match (manifold, field) {
        (ModelManifold::RoundSphere { n }, FieldOnManifold::Zonal { value, splits, .. }) => {
            integrate_zonal(*n, |t| value(t).abs().powf(p), splits, spec)?
        }
        (
            ModelManifold::ProductCircleSphere { n, r },
            FieldOnManifold::ProductBiSym {
                value,
                s_splits,
                sigma_splits,
                ..
            },
        ) => integrate_product(
            *n,
            *r,
            |s, g| value(s, g).abs().powf(p),
            s_splits,
            sigma_splits,
            spec,
        )?,
        _ => unreachable!("checked above"),
    };
    Ok(q.value.powf(1.0 / p))
}

/// Bilinear form `<u, v>_h = int <grad u, grad v> dv + int h u v dv` for a
/// constant coupling `h`. Both fields must carry analytic first derivatives.
pub fn h_inner_product(
    manifold: &ModelManifold,
    u: &FieldOnManifold,
    v: &FieldOnManifold,
    h: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_field_matches(manifold, u)?;
    check_field_matches(manifold, v)?;
    match (manifold, u, v) {
        (
            ModelManifold::RoundSphere { n },
            FieldOnManifold::Zonal {
                value: uv,
                deriv: ud,
                splits: us,
            },
            FieldOnManifold::Zonal {
                value: vv,
                deriv: vd,
                splits: vs,
            },
        ) => {
            let mut splits = us.clone();
            splits.extend_from_slice(vs);
            let q = integrate_zonal(
                *n,
                |t| ud(t) * vd(t) + h * uv(t) * vv(t),
                &splits,
                spec,
            )?;
            Ok(q.value)
        }
        (
            ModelManifold::ProductCircleSphere { n, r },
            FieldOnManifold::ProductBiSym {
                value: uv,
                deriv_s: us,
                deriv_sigma: ug,
                s_splits: uss,
                sigma_splits: ugs,
            },
            FieldOnManifold::ProductBiSym {
                value: vv,
                deriv_s: vs,
                deriv_sigma: vg,
                s_splits: vss,
                sigma_splits: vgs,
            },
        ) => {
            let mut ss = uss.clone();
            ss.extend_from_slice(vss);
            let mut gs = ugs.clone();
            gs.extend_from_slice(vgs);
            let q = integrate_product(
                *n,
                *r,
                |s, g| us(s, g) * vs(s, g) + ug(s, g) * vg(s, g) + h * uv(s, g) * vv(s, g),
                &ss,
                &gs,
                spec,
            )?;
            Ok(q.value)
        }
        _ => unreachable!("checked above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn default_spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn polynomials_integrated_to_design_degree() {
        // K15 is exact through degree 22, K21 through degree 32; check the
        // single-kernel estimate, not the adaptive driver.
        for (rule, degree) in [(BaseRule::GaussKronrod15, 22), (BaseRule::GaussKronrod21, 32)] {
            for k in 0..=degree {
                let mut f = |x: f64| x.powi(k);
                let (value, _, _) = super::estimate(rule, &mut f, 0.0, 1.0);
                let exact = 1.0 / (k as f64 + 1.0);
                assert!(
                    (value - exact).abs() <= 1e-13 * exact.max(1.0),
                    "rule {rule:?} degree {k}: {value} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn smooth_integral_matches_antiderivative() {
        let q = integrate_radial(
            |x: f64| x.cos(),
            Domain::Finite { a: 0.0, b: 1.5 },
            &[],
            &default_spec(),
        )
        .unwrap();
        assert_relative_eq!(q.value, (1.5f64).sin(), max_relative = 1e-13);
        assert!(q.error < 1e-10);
    }

    #[test]
    fn semi_infinite_beta_integral() {
        // int_0^inf r^3 (1+r^2)^{-3} dr = 1/4.
        let q = integrate_radial(
            |r: f64| r.powi(3) * (1.0 + r * r).powi(-3),
            Domain::SemiInfinite { a: 0.0 },
            &[1.0, 10.0],
            &default_spec(),
        )
        .unwrap();
        assert_relative_eq!(q.value, 0.25, max_relative = 1e-11);
    }

    #[test]
    fn narrow_spike_needs_split_hint() {
        // Lorentzian of width 1e-6 inside [0, 1]; exact arctan value.
        let d = 1e-6f64;
        let f = |x: f64| d / (d * d + (x - 0.5) * (x - 0.5));
        let splits: Vec<f64> = (0..8)
            .flat_map(|k| {
                let w = d * 10f64.powi(k);
                [0.5 - w, 0.5 + w]
            })
            .collect();
        let q = integrate_radial(f, Domain::Finite { a: 0.0, b: 1.0 }, &splits, &default_spec())
            .unwrap();
        let exact = ((0.5 / d).atan() - (-0.5 / d).atan()) as f64;
        assert_relative_eq!(q.value, exact, max_relative = 1e-10);
    }

    #[test]
    fn determinism_bit_identical() {
        let run = || {
            integrate_radial(
                |x: f64| (x * 37.0).sin().abs().powf(1.7) + x,
                Domain::Finite { a: 0.0, b: 3.0 },
                &[0.3, 1.1],
                &default_spec(),
            )
            .unwrap()
            .value
        };
        let a = run();
        for _ in 0..5 {
            assert_eq!(a.to_bits(), run().to_bits());
        }
    }

    #[test]
    fn zonal_constant_gives_sphere_volume() {
        let q = integrate_zonal(3, |_| 1.0, &[], &default_spec()).unwrap();
        assert_relative_eq!(q.value, sphere_volume(3), max_relative = 1e-12);
    }

    #[test]
    fn product_constant_gives_volume() {
        // S^1(2) x S^2: 4pi * 4pi = 16 pi^2.
        let q = integrate_product(3, 2.0, |_, _| 1.0, &[], &[], &default_spec()).unwrap();
        assert_relative_eq!(
            q.value,
            16.0 * std::f64::consts::PI.powi(2),
            max_relative = 1e-12
        );
    }

    #[test]
    fn lp_norm_of_constant_field() {
        let m = ModelManifold::round_sphere(4).unwrap();
        let f = FieldOnManifold::Zonal {
            value: Box::new(|_| -2.0),
            deriv: Box::new(|_| 0.0),
            splits: vec![],
        };
        let p = 2.5;
        let n = lp_norm(&m, &f, p, &default_spec()).unwrap();
        assert_relative_eq!(
            n,
            2.0 * sphere_volume(4).powf(1.0 / p),
            max_relative = 1e-12
        );
    }

    #[test]
    fn h_inner_product_eigenfunction_identity() {
        // u = cos(theta) on S^3: int |grad u|^2 = lambda_1 int u^2 with
        // lambda_1 = 3, so <u,u>_h with h = 1 equals (3 + 1) int u^2.
        let m = ModelManifold::round_sphere(3).unwrap();
        let u = FieldOnManifold::Zonal {
            value: Box::new(|t: f64| t.cos()),
            deriv: Box::new(|t: f64| -t.sin()),
            splits: vec![],
        };
        let ip = h_inner_product(&m, &u, &u, 1.0, &default_spec()).unwrap();
        let l2 = integrate_zonal(3, |t| t.cos().powi(2), &[], &default_spec())
            .unwrap()
            .value;
        assert_relative_eq!(ip, 4.0 * l2, max_relative = 1e-10);
    }

    #[test]
    fn general_field_rejected() {
        let m = ModelManifold::product_circle_sphere(4, 1.0).unwrap();
        let err = integrate_manifold(&m, &FieldOnManifold::General, &default_spec());
        assert!(matches!(err, Err(Error::UnsupportedSymmetry { .. })));
    }

    #[test]
    fn mismatched_symmetry_rejected() {
        let m = ModelManifold::product_circle_sphere(4, 1.0).unwrap();
        let f = FieldOnManifold::Zonal {
            value: Box::new(|_| 1.0),
            deriv: Box::new(|_| 0.0),
            splits: vec![],
        };
        assert!(matches!(
            integrate_manifold(&m, &f, &default_spec()),
            Err(Error::UnsupportedSymmetry { .. })
        ));
    }

    #[test]
    fn forced_refinement_changes_little_on_smooth_integrands() {
        let spec = default_spec();
        let mut f = |x: f64| (1.0 + x * x).recip();
        let base = integrate_radial_refined(&mut f, Domain::Finite { a: 0.0, b: 2.0 }, &[], &spec, 0)
            .unwrap();
        let mut f = |x: f64| (1.0 + x * x).recip();
        let fine = integrate_radial_refined(&mut f, Domain::Finite { a: 0.0, b: 2.0 }, &[], &spec, 2)
            .unwrap();
        assert!((base.value - fine.value).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn linearity_in_the_integrand(a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let spec = default_spec();
            let dom = Domain::Finite { a: 0.0, b: 2.0 };
            let f1 = integrate_radial(|x: f64| x.sin(), dom, &[], &spec).unwrap().value;
            let f2 = integrate_radial(|x: f64| x.exp(), dom, &[], &spec).unwrap().value;
            let combo = integrate_radial(|x: f64| a * x.sin() + b * x.exp(), dom, &[], &spec)
                .unwrap()
                .value;
            prop_assert!((combo - (a * f1 + b * f2)).abs() <= 1e-9 * (1.0 + combo.abs()));
        }

        #[test]
        fn split_points_do_not_move_the_value(s1 in 0.05f64..0.95, s2 in 0.05f64..0.95) {
            let spec = default_spec();
            let dom = Domain::Finite { a: 0.0, b: 1.0 };
            let base = integrate_radial(|x: f64| (3.0 * x).cos() * x, dom, &[], &spec)
                .unwrap()
                .value;
            let split = integrate_radial(|x: f64| (3.0 * x).cos() * x, dom, &[s1, s2], &spec)
                .unwrap()
                .value;
            prop_assert!((base - split).abs() <= 1e-11);
        }
    }
}
