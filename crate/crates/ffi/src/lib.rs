//! C ABI over the bubble-ansatz library.
//!
//! The surface is deliberately small: create a model manifold behind an
//! opaque handle, query its geometry and spectrum, pull the closed-form
//! expansion coefficients, and evaluate the reduced energy, the optimal
//! concentration scale and the quadrature functionals. Every function
//! returns a [`BlowupStatus`]; results travel through out-pointers. The
//! matching header is `include/blowup.h`, regenerated by the build script.
//!
//! Ownership: handles returned through `*_create` belong to the caller and
//! must be released with [`blowup_manifold_free`]. Strings returned by this
//! library are static and must not be freed.

use blowup_core::constants::{reduced_coefficients, ReducedCoefficients};
use blowup_core::energy::{functional_value, residual_norm, AnsatzSign, AnsatzSpec};
use blowup_core::manifolds::{degenerate_radii, ModelManifold};
use blowup_core::profiles::{BubbleConfig, BubbleProfile, CutoffSpec, SmoothstepOrder};
use blowup_core::quadrature::QuadratureSpec;
use blowup_core::reduction::{reduced_expansion, t_star, PointwiseData, ReducedRegime};
use blowup_core::Error;
use std::ffi::c_char;

/// Result of every call in this interface.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupStatus {
    /// The call succeeded and all out-parameters are filled.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A scalar argument was out of range for the operation.
    InvalidArgument = 2,
    /// The operation is not defined for this manifold or regime.
    Unsupported = 3,
    /// Quadrature or fitting failed to reach its tolerance.
    NumericalFailure = 4,
    /// The provided buffer is too small; the required length is reported.
    BufferTooSmall = 5,
    /// The reduced landscape has no interior minimum for these data.
    NoInteriorMinimum = 6,
}

/// Opaque model manifold handle.
pub struct BlowupManifold {
    inner: ModelManifold,
}

/// One Laplace eigenvalue with its mode pair: circle mode `i` (always zero
/// on the sphere) and sphere-factor mode `j`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BlowupEigenvalue {
    pub value: f64,
    pub circle_mode: u32,
    pub sphere_mode: u32,
}

/// Outcome of the constant-solution degeneracy scan.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BlowupVerdict {
    /// The tested value `Scal / (n-1)`.
    pub target: f64,
    /// Nearest Laplace eigenvalue to the target.
    pub nearest: BlowupEigenvalue,
    /// Distance from the target to that eigenvalue.
    pub distance: f64,
    /// True when the distance clears the tolerance.
    pub nondegenerate: bool,
}

/// Closed-form expansion coefficients of the reduced energy, in the order
/// they enter `c1 + c2 eps + c3 eps ln eps + eps (c4 ln(1/t) + c5 Phi
/// t^{(n-2)/2})`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BlowupCoefficients {
    pub n: usize,
    /// Constant coupling the coefficients were computed for.
    pub coupling: f64,
    /// Constant background solution of the critical equation.
    pub background: f64,
    pub volume: f64,
    pub energy_constant: f64,
    pub epsilon_coefficient: f64,
    pub epsilon_log_coefficient: f64,
    pub scale_log_coefficient: f64,
    pub interaction_coefficient: f64,
    /// Logarithmic bubble moment entering the epsilon coefficient.
    pub beta: f64,
    /// Squared-Weyl correction coefficient; zero below dimension seven.
    pub weyl_coefficient: f64,
    /// False in dimension four, where the bracket factor is undefined and
    /// `coupling_correction_factor` holds zero.
    pub has_coupling_correction: bool,
    pub coupling_correction_factor: f64,
}

/// Pointwise data of the reduced landscape at a candidate blow-up point.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BlowupPointData {
    /// Background solution value at the point.
    pub u0: f64,
    /// Coupling value at the point.
    pub h: f64,
    /// Scalar curvature at the point.
    pub scal: f64,
    /// Squared Weyl norm at the point.
    pub weyl2: f64,
}

/// Expansion regime selecting which correction terms the reduced landscape
/// keeps.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupRegime {
    /// Any coupling, dimensions three through six.
    Generic36 = 0,
    /// Geometric coupling, dimensions three through nine.
    Geometric39 = 1,
    /// Locally conformally flat with vanishing Weyl term, all dimensions.
    LcfAllDim = 2,
    /// Dimension ten with the squared-Weyl competition term.
    Dim10Weyl = 3,
    /// Dimension six with a positive coupling excess.
    Dim6Positive = 4,
}

fn regime_of(r: BlowupRegime) -> ReducedRegime {
    match r {
        BlowupRegime::Generic36 => ReducedRegime::Generic36,
        BlowupRegime::Geometric39 => ReducedRegime::Geometric39,
        BlowupRegime::LcfAllDim => ReducedRegime::LcfAllDim,
        BlowupRegime::Dim10Weyl => ReducedRegime::Dim10Weyl,
        BlowupRegime::Dim6Positive => ReducedRegime::Dim6Positive,
    }
}

fn status_of(e: &Error) -> BlowupStatus {
    match e {
        Error::InvalidDimension { .. }
        | Error::InvalidParameter { .. }
        | Error::ConfigParse { .. } => BlowupStatus::InvalidArgument,
        Error::ManifoldMismatch { .. }
        | Error::OutOfChart { .. }
        | Error::UnsupportedSymmetry { .. }
        | Error::RegimeDimension { .. } => BlowupStatus::Unsupported,
        Error::NoInteriorMinimum { .. } => BlowupStatus::NoInteriorMinimum,
        Error::ToleranceNotMet { .. } | Error::DegenerateFit { .. } | Error::Io(_) => {
            BlowupStatus::NumericalFailure
        }
    }
}

fn pack_coefficients(c: &ReducedCoefficients) -> BlowupCoefficients {
    BlowupCoefficients {
        n: c.n,
        coupling: c.coupling,
        background: c.background,
        volume: c.volume,
        energy_constant: c.energy_constant,
        epsilon_coefficient: c.epsilon_coefficient,
        epsilon_log_coefficient: c.epsilon_log_coefficient,
        scale_log_coefficient: c.scale_log_coefficient,
        interaction_coefficient: c.interaction_coefficient,
        beta: c.beta,
        weyl_coefficient: c.weyl_coefficient,
        has_coupling_correction: c.coupling_correction_factor.is_some(),
        coupling_correction_factor: c.coupling_correction_factor.unwrap_or(0.0),
    }
}

fn unpack_coefficients(c: &BlowupCoefficients) -> ReducedCoefficients {
    ReducedCoefficients {
        n: c.n,
        coupling: c.coupling,
        background: c.background,
        volume: c.volume,
        energy_constant: c.energy_constant,
        epsilon_coefficient: c.epsilon_coefficient,
        epsilon_log_coefficient: c.epsilon_log_coefficient,
        scale_log_coefficient: c.scale_log_coefficient,
        interaction_coefficient: c.interaction_coefficient,
        beta: c.beta,
        weyl_coefficient: c.weyl_coefficient,
        coupling_correction_factor: c
            .has_coupling_correction
            .then_some(c.coupling_correction_factor),
    }
}

fn subcritical_ansatz(m: &ModelManifold, eps: f64, t: f64) -> Result<AnsatzSpec, Error> {
    let cutoff = CutoffSpec::new(m.default_cutoff_radius(), SmoothstepOrder::Seventh)?;
    let config = BubbleConfig::from_subcritical(m.dim(), eps, t, cutoff)?;
    AnsatzSpec::new(*m, config, eps, AnsatzSign::Minus, None)
}

/// Writes a handle through `out` on success.
fn emit_handle(
    out: *mut *mut BlowupManifold,
    built: Result<ModelManifold, Error>,
) -> BlowupStatus {
    if out.is_null() {
        return BlowupStatus::NullArgument;
    }
    match built {
        Ok(inner) => {
            let handle = Box::into_raw(Box::new(BlowupManifold { inner }));
            unsafe { *out = handle };
            BlowupStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Library version as a static nul-terminated string; do not free.
#[no_mangle]
pub extern "C" fn blowup_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static nul-terminated name of a status code; do not free.
#[no_mangle]
pub extern "C" fn blowup_status_name(status: BlowupStatus) -> *const c_char {
    let name: &'static str = match status {
        BlowupStatus::Ok => "ok\0",
        BlowupStatus::NullArgument => "null argument\0",
        BlowupStatus::InvalidArgument => "invalid argument\0",
        BlowupStatus::Unsupported => "unsupported\0",
        BlowupStatus::NumericalFailure => "numerical failure\0",
        BlowupStatus::BufferTooSmall => "buffer too small\0",
        BlowupStatus::NoInteriorMinimum => "no interior minimum\0",
    };
    name.as_ptr() as *const c_char
}

/// Creates the round sphere of dimension `n`.
///
/// # Safety
/// `out` must be a valid pointer; the returned handle must be released with
/// [`blowup_manifold_free`].
#[no_mangle]
pub unsafe extern "C" fn blowup_sphere_create(
    n: usize,
    out: *mut *mut BlowupManifold,
) -> BlowupStatus {
    emit_handle(out, ModelManifold::round_sphere(n))
}

/// Creates the product of a circle of radius `r` with a unit sphere; `n` is
/// the total dimension.
///
/// # Safety
/// `out` must be a valid pointer; the returned handle must be released with
/// [`blowup_manifold_free`].
#[no_mangle]
pub unsafe extern "C" fn blowup_product_create(
    n: usize,
    r: f64,
    out: *mut *mut BlowupManifold,
) -> BlowupStatus {
    emit_handle(out, ModelManifold::product_circle_sphere(n, r))
}

/// Releases a manifold handle. Null is accepted and ignored.
///
/// # Safety
/// `m` must be a handle previously returned by a `*_create` call, not yet
/// freed, or null.
#[no_mangle]
pub unsafe extern "C" fn blowup_manifold_free(m: *mut BlowupManifold) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the manifold.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_manifold_dim(
    m: *const BlowupManifold,
    out: *mut usize,
) -> BlowupStatus {
    if m.is_null() || out.is_null() {
        return BlowupStatus::NullArgument;
    }
    *out = (*m).inner.dim();
    BlowupStatus::Ok
}

/// Riemannian volume of the manifold.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_manifold_volume(
    m: *const BlowupManifold,
    out: *mut f64,
) -> BlowupStatus {
    if m.is_null() || out.is_null() {
        return BlowupStatus::NullArgument;
    }
    *out = (*m).inner.volume();
    BlowupStatus::Ok
}

/// Scalar curvature of the manifold (constant on both model families).
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_manifold_scalar_curvature(
    m: *const BlowupManifold,
    out: *mut f64,
) -> BlowupStatus {
    if m.is_null() || out.is_null() {
        return BlowupStatus::NullArgument;
    }
    *out = (*m).inner.scalar_curvature();
    BlowupStatus::Ok
}

/// Fills `buf` with every Laplace eigenvalue strictly below `cutoff`,
/// ordered increasingly, and stores the total count in `out_len`. Whenever
/// `capacity` cannot hold a nonempty spectrum the call writes no values and
/// returns [`BlowupStatus::BufferTooSmall`]; calling with `capacity` zero
/// (and `buf` possibly null) is the intended way to query the count first.
///
/// # Safety
/// `m` must be a live handle, `out_len` a valid pointer, and `buf` valid
/// for `capacity` elements when `capacity` is nonzero.
#[no_mangle]
pub unsafe extern "C" fn blowup_spectrum_below(
    m: *const BlowupManifold,
    cutoff: f64,
    buf: *mut BlowupEigenvalue,
    capacity: usize,
    out_len: *mut usize,
) -> BlowupStatus {
    if m.is_null() || out_len.is_null() {
        return BlowupStatus::NullArgument;
    }
    if !cutoff.is_finite() {
        return BlowupStatus::InvalidArgument;
    }
    let spectrum = (*m).inner.spectrum_below(cutoff);
    *out_len = spectrum.len();
    if capacity == 0 {
        return if spectrum.is_empty() {
            BlowupStatus::Ok
        } else {
            BlowupStatus::BufferTooSmall
        };
    }
    if buf.is_null() {
        return BlowupStatus::NullArgument;
    }
    if capacity < spectrum.len() {
        return BlowupStatus::BufferTooSmall;
    }
    for (k, s) in spectrum.iter().enumerate() {
        *buf.add(k) = BlowupEigenvalue {
            value: s.value,
            circle_mode: s.i,
            sphere_mode: s.j,
        };
    }
    BlowupStatus::Ok
}

/// Fills `buf` with the circle radii `i / sqrt(n-2)`, `i = 1..=i_max`, at
/// which the product manifold of total dimension `n` is degenerate. Buffer
/// semantics match [`blowup_spectrum_below`].
///
/// # Safety
/// `out_len` must be a valid pointer and `buf` valid for `capacity`
/// elements when `capacity` is nonzero.
#[no_mangle]
pub unsafe extern "C" fn blowup_degenerate_radii(
    n: usize,
    i_max: u32,
    buf: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> BlowupStatus {
    if out_len.is_null() {
        return BlowupStatus::NullArgument;
    }
    let radii = match degenerate_radii(n, i_max) {
        Ok(r) => r,
        Err(e) => return status_of(&e),
    };
    *out_len = radii.len();
    if capacity == 0 {
        return if radii.is_empty() {
            BlowupStatus::Ok
        } else {
            BlowupStatus::BufferTooSmall
        };
    }
    if buf.is_null() {
        return BlowupStatus::NullArgument;
    }
    if capacity < radii.len() {
        return BlowupStatus::BufferTooSmall;
    }
    for (k, r) in radii.iter().enumerate() {
        *buf.add(k) = *r;
    }
    BlowupStatus::Ok
}

/// Runs the constant-solution degeneracy scan with tolerance `tol`.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_nondegeneracy_scan(
    m: *const BlowupManifold,
    tol: f64,
    out: *mut BlowupVerdict,
) -> BlowupStatus {
    if m.is_null() || out.is_null() {
        return BlowupStatus::NullArgument;
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return BlowupStatus::InvalidArgument;
    }
    let v = (*m).inner.is_nondegenerate_constant_solution(tol);
    *out = BlowupVerdict {
        target: v.target,
        nearest: BlowupEigenvalue {
            value: v.nearest.value,
            circle_mode: v.nearest.i,
            sphere_mode: v.nearest.j,
        },
        distance: v.distance,
        nondegenerate: v.nondegenerate,
    };
    BlowupStatus::Ok
}

/// Computes the closed-form expansion coefficients. With
/// `use_geometric_coupling` true the `coupling` argument is ignored and the
/// conformally natural value is used.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_coefficients(
    m: *const BlowupManifold,
    use_geometric_coupling: bool,
    coupling: f64,
    out: *mut BlowupCoefficients,
) -> BlowupStatus {
    if m.is_null() || out.is_null() {
        return BlowupStatus::NullArgument;
    }
    let arg = if use_geometric_coupling {
        None
    } else {
        Some(coupling)
    };
    match reduced_coefficients(&(*m).inner, arg) {
        Ok(c) => {
            *out = pack_coefficients(&c);
            BlowupStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Closed-form optimal concentration scale for the given pointwise data.
/// `out_interior` reports whether the landscape has an interior minimum at
/// all; when false, `out_t` is set to zero and the status is still
/// [`BlowupStatus::Ok`].
///
/// # Safety
/// `coeffs`, `out_t` and `out_interior` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn blowup_optimal_scale(
    coeffs: *const BlowupCoefficients,
    data: BlowupPointData,
    regime: BlowupRegime,
    out_t: *mut f64,
    out_interior: *mut bool,
) -> BlowupStatus {
    if coeffs.is_null() || out_t.is_null() || out_interior.is_null() {
        return BlowupStatus::NullArgument;
    }
    let c = unpack_coefficients(&*coeffs);
    let d = PointwiseData::new(data.u0, data.h, data.scal, data.weyl2);
    match t_star(&c, &d, regime_of(regime)) {
        Ok(Some(t)) => {
            *out_t = t;
            *out_interior = true;
            BlowupStatus::Ok
        }
        Ok(None) => {
            *out_t = 0.0;
            *out_interior = false;
            BlowupStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Closed-form reduced energy at scale `t` and subcritical shift `eps`.
///
/// # Safety
/// `coeffs` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn blowup_reduced_energy(
    coeffs: *const BlowupCoefficients,
    data: BlowupPointData,
    regime: BlowupRegime,
    t: f64,
    eps: f64,
    out: *mut f64,
) -> BlowupStatus {
    if coeffs.is_null() || out.is_null() {
        return BlowupStatus::NullArgument;
    }
    let c = unpack_coefficients(&*coeffs);
    let d = PointwiseData::new(data.u0, data.h, data.scal, data.weyl2);
    match reduced_expansion(&c, &d, t, eps, regime_of(regime)) {
        Ok(v) => {
            *out = v;
            BlowupStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Full quadrature energy of the glued bubble-plus-background ansatz at
/// scale `t` and subcritical shift `eps`, with the geometric coupling and
/// the default cutoff.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_energy_value(
    m: *const BlowupManifold,
    eps: f64,
    t: f64,
    out: *mut f64,
) -> BlowupStatus {
    if m.is_null() || out.is_null() {
        return BlowupStatus::NullArgument;
    }
    let body = || -> Result<f64, Error> {
        let spec = subcritical_ansatz(&(*m).inner, eps, t)?;
        Ok(functional_value(&spec, &QuadratureSpec::default())?.value)
    };
    match body() {
        Ok(v) => {
            *out = v;
            BlowupStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Critical-norm equation residual of the same ansatz as
/// [`blowup_energy_value`].
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_residual_norm(
    m: *const BlowupManifold,
    eps: f64,
    t: f64,
    out: *mut f64,
) -> BlowupStatus {
    if m.is_null() || out.is_null() {
        return BlowupStatus::NullArgument;
    }
    let body = || -> Result<f64, Error> {
        let spec = subcritical_ansatz(&(*m).inner, eps, t)?;
        residual_norm(&spec, &QuadratureSpec::default())
    };
    match body() {
        Ok(v) => {
            *out = v;
            BlowupStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Value of the flat bubble profile of width `delta` in dimension `n` at
/// chart radius `rho`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_bubble_value(
    n: usize,
    delta: f64,
    rho: f64,
    out: *mut f64,
) -> BlowupStatus {
    if out.is_null() {
        return BlowupStatus::NullArgument;
    }
    if !rho.is_finite() || rho < 0.0 {
        return BlowupStatus::InvalidArgument;
    }
    match BubbleProfile::new(n, delta) {
        Ok(b) => {
            *out = b.value(rho);
            BlowupStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use blowup_core::constants::yamabe_coupling;

    fn sphere(n: usize) -> *mut BlowupManifold {
        let mut handle: *mut BlowupManifold = std::ptr::null_mut();
        let status = unsafe { blowup_sphere_create(n, &mut handle) };
        assert_eq!(status, BlowupStatus::Ok);
        assert!(!handle.is_null());
        handle
    }

    #[test]
    fn handle_round_trip_and_geometry() {
        let m = sphere(5);
        let mut dim = 0usize;
        let mut vol = 0f64;
        let mut scal = 0f64;
        unsafe {
            assert_eq!(blowup_manifold_dim(m, &mut dim), BlowupStatus::Ok);
            assert_eq!(blowup_manifold_volume(m, &mut vol), BlowupStatus::Ok);
            assert_eq!(
                blowup_manifold_scalar_curvature(m, &mut scal),
                BlowupStatus::Ok
            );
            blowup_manifold_free(m);
        }
        assert_eq!(dim, 5);
        let core = ModelManifold::round_sphere(5).unwrap();
        assert_eq!(vol, core.volume());
        assert_eq!(scal, core.scalar_curvature());
    }

    #[test]
    fn create_rejects_bad_dimensions_and_null_out() {
        let mut handle: *mut BlowupManifold = std::ptr::null_mut();
        unsafe {
            assert_eq!(
                blowup_sphere_create(2, &mut handle),
                BlowupStatus::InvalidArgument
            );
            assert_eq!(
                blowup_sphere_create(5, std::ptr::null_mut()),
                BlowupStatus::NullArgument
            );
            assert_eq!(
                blowup_product_create(4, -1.0, &mut handle),
                BlowupStatus::InvalidArgument
            );
            blowup_manifold_free(std::ptr::null_mut());
        }
    }

    #[test]
    fn spectrum_buffer_protocol() {
        let m = sphere(4);
        let mut len = 0usize;
        unsafe {
            let status = blowup_spectrum_below(m, 15.0, std::ptr::null_mut(), 0, &mut len);
            assert_eq!(status, BlowupStatus::BufferTooSmall);
            assert!(len > 0);

            let mut buf = vec![
                BlowupEigenvalue {
                    value: 0.0,
                    circle_mode: 0,
                    sphere_mode: 0
                };
                len
            ];
            assert_eq!(
                blowup_spectrum_below(m, 15.0, buf.as_mut_ptr(), len - 1, &mut len),
                BlowupStatus::BufferTooSmall
            );
            assert_eq!(
                blowup_spectrum_below(m, 15.0, buf.as_mut_ptr(), len, &mut len),
                BlowupStatus::Ok
            );
            let core = ModelManifold::round_sphere(4).unwrap().spectrum_below(15.0);
            assert_eq!(core.len(), len);
            for (got, want) in buf.iter().zip(core.iter()) {
                assert_eq!(got.value, want.value);
                assert_eq!(got.sphere_mode, want.j);
            }
            blowup_manifold_free(m);
        }
    }

    #[test]
    fn degenerate_radii_match_core() {
        let mut len = 0usize;
        let mut buf = [0f64; 4];
        unsafe {
            assert_eq!(
                blowup_degenerate_radii(6, 4, buf.as_mut_ptr(), 4, &mut len),
                BlowupStatus::Ok
            );
        }
        assert_eq!(len, 4);
        let core = degenerate_radii(6, 4).unwrap();
        assert_eq!(&buf[..], &core[..]);
    }

    #[test]
    fn degeneracy_scan_flags_the_unit_sphere() {
        let m = sphere(6);
        let mut v = BlowupVerdict {
            target: 0.0,
            nearest: BlowupEigenvalue {
                value: 0.0,
                circle_mode: 0,
                sphere_mode: 0,
            },
            distance: 0.0,
            nondegenerate: true,
        };
        unsafe {
            assert_eq!(blowup_nondegeneracy_scan(m, 1e-9, &mut v), BlowupStatus::Ok);
            blowup_manifold_free(m);
        }
        assert!(!v.nondegenerate);
        assert_eq!(v.target, 6.0);
    }

    #[test]
    fn coefficients_round_trip_and_optimal_scale() {
        let m = sphere(6);
        let mut packed = unsafe { std::mem::zeroed::<BlowupCoefficients>() };
        unsafe {
            assert_eq!(
                blowup_coefficients(m, true, 0.0, &mut packed),
                BlowupStatus::Ok
            );
            blowup_manifold_free(m);
        }
        let core_m = ModelManifold::round_sphere(6).unwrap();
        let core = reduced_coefficients(&core_m, None).unwrap();
        assert_eq!(packed.energy_constant, core.energy_constant);
        assert_eq!(packed.interaction_coefficient, core.interaction_coefficient);
        assert!(packed.has_coupling_correction);
        assert_eq!(
            packed.coupling_correction_factor,
            core.coupling_correction_factor.unwrap()
        );

        let scal = core_m.scalar_curvature();
        let data = BlowupPointData {
            u0: core.background,
            h: yamabe_coupling(6) * scal,
            scal,
            weyl2: 0.0,
        };
        let mut t = 0f64;
        let mut interior = false;
        unsafe {
            assert_eq!(
                blowup_optimal_scale(
                    &packed,
                    data,
                    BlowupRegime::Geometric39,
                    &mut t,
                    &mut interior
                ),
                BlowupStatus::Ok
            );
        }
        assert!(interior);
        let d = PointwiseData::new(data.u0, data.h, data.scal, data.weyl2);
        let want = t_star(&core, &d, ReducedRegime::Geometric39)
            .unwrap()
            .unwrap();
        assert_eq!(t, want);

        let mut g = 0f64;
        unsafe {
            assert_eq!(
                blowup_reduced_energy(&packed, data, BlowupRegime::Geometric39, t, 1e-3, &mut g),
                BlowupStatus::Ok
            );
        }
        let want = reduced_expansion(&core, &d, t, 1e-3, ReducedRegime::Geometric39).unwrap();
        assert_eq!(g, want);
    }

    #[test]
    fn quadrature_functionals_cross_the_boundary() {
        let m = sphere(5);
        let mut j = 0f64;
        let mut r = 0f64;
        unsafe {
            assert_eq!(blowup_energy_value(m, 1e-3, 1.0, &mut j), BlowupStatus::Ok);
            assert_eq!(blowup_residual_norm(m, 1e-3, 1.0, &mut r), BlowupStatus::Ok);
            assert_eq!(
                blowup_energy_value(m, -1.0, 1.0, &mut j),
                BlowupStatus::InvalidArgument
            );
            blowup_manifold_free(m);
        }
        assert!(j.is_finite());
        assert!(r > 0.0);
    }

    #[test]
    fn bubble_value_and_strings() {
        let mut v = 0f64;
        unsafe {
            assert_eq!(blowup_bubble_value(4, 0.2, 0.0, &mut v), BlowupStatus::Ok);
        }
        let want = BubbleProfile::new(4, 0.2).unwrap().value(0.0);
        assert_eq!(v, want);
        unsafe {
            assert_eq!(
                blowup_bubble_value(4, 0.2, -1.0, &mut v),
                BlowupStatus::InvalidArgument
            );
        }
        assert!(!blowup_version().is_null());
        assert!(!blowup_status_name(BlowupStatus::BufferTooSmall).is_null());
    }
}
