//! Dipole-dipole interaction tensor, its near- and far-zone limits, and
//! the spectral kernel of the antisymmetric vacuum field correlation.
//!
//! All tensors here are real symmetric 3×3 matrices built from the two
//! angular structures
//!
//! ```text
//! A_ij = δ_ij − 3 n_i n_j        (trace 0)
//! B_ij = −(δ_ij − n_i n_j)       (trace −2)
//! ```
//!
//! where n is the unit vector from atom A to atom B. The interaction
//! tensor combines them with retarded radial factors of ω₀r; the spectral
//! kernel g_ij(ω) combines them with frequency-dependent radial factors
//! and is the real, singularity-free integrand handed to the quadrature
//! oracle. The 1/(8π²) prefactor and the odd combination
//! (e^{iωΔτ} − e^{−iωΔτ}) of the field correlation are applied by the
//! consumer, not here.

use crate::types::Geometry;
use nalgebra::Matrix3;

/// Dipole-dipole interaction tensor for a fixed geometry.
///
/// Symmetric by construction; its trace satisfies
/// tr V = −ω₀² cos(ω₀r)/(2πr) because A_ij is traceless and B_ij has
/// trace −2.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTensor {
    v: Matrix3<f64>,
    geometry: Geometry,
}

impl InteractionTensor {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.v
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn trace(&self) -> f64 {
        self.v.trace()
    }
}

/// The angular structures (A_ij, B_ij) = (δ − 3nn, −(δ − nn)) for a unit
/// direction n. Both are symmetric and invariant under n → −n.
pub fn angular_parts(n: &nalgebra::Vector3<f64>) -> (Matrix3<f64>, Matrix3<f64>) {
    let id = Matrix3::identity();
    let nn = n * n.transpose();
    (id - 3.0 * nn, -(id - nn))
}

/// The radial factors (u, v) of the spectral kernel at frequency ω:
/// u = sin(ωr)/r³ − ω cos(ωr)/r², v = ω² sin(ωr)/r.
pub fn radial_parts(omega: f64, r: f64) -> (f64, f64) {
    let x = omega * r;
    let u = x.sin() / (r * r * r) - omega * x.cos() / (r * r);
    let v = omega * omega * x.sin() / r;
    (u, v)
}

/// Retarded dipole-dipole interaction tensor
///
/// V_ij = (1/4πr³)[(δ_ij−3n_in_j)(cos ω₀r + ω₀r sin ω₀r)
///                 − (δ_ij−n_in_j) ω₀²r² cos ω₀r].
pub fn dipole_tensor(geom: &Geometry) -> InteractionTensor {
    let r = geom.separation();
    let x = geom.omega0_r();
    let (a, b) = angular_parts(geom.direction());
    let prefactor = 1.0 / (4.0 * std::f64::consts::PI * r * r * r);
    let v = prefactor * (a * (x.cos() + x * x.sin()) + b * (x * x * x.cos()));
    InteractionTensor { v, geometry: *geom }
}

/// Static (ω₀r → 0) limit of the interaction tensor:
/// (δ_ij − 3 n_i n_j)/(4πr³).
pub fn near_zone_tensor(geom: &Geometry) -> InteractionTensor {
    let r = geom.separation();
    let (a, _) = angular_parts(geom.direction());
    let v = a / (4.0 * std::f64::consts::PI * r * r * r);
    InteractionTensor { v, geometry: *geom }
}

/// Dominant far-zone (ω₀r ≫ 1) term of the interaction tensor:
/// −(δ_ij − n_i n_j) ω₀² cos(ω₀r)/(4πr).
///
/// The oscillatory cos(ω₀r) factor is kept; the r⁻¹ scaling statement
/// refers to the envelope, so scaling tests should sample at cos-extrema
/// ω₀r = kπ.
pub fn far_zone_tensor(geom: &Geometry) -> InteractionTensor {
    let r = geom.separation();
    let omega0 = geom.omega0();
    let (_, b) = angular_parts(geom.direction());
    let v = b * (omega0 * omega0 * geom.omega0_r().cos() / (4.0 * std::f64::consts::PI * r));
    InteractionTensor { v, geometry: *geom }
}

/// Spectral kernel of the antisymmetric field correlation at frequency ω:
///
/// g_ij(ω) = (δ_ij−3n_in_j)(sin ωr/r³ − ω cos ωr/r²)
///           − (δ_ij−n_in_j) ω² sin ωr / r.
///
/// The full antisymmetric correlation is
/// χ^F_ij(Δτ) = ∫₀^∞ dω/(8π²) g_ij(ω)(e^{iωΔτ} − e^{−iωΔτ}).
pub fn chi_kernel(omega: f64, geom: &Geometry) -> Matrix3<f64> {
    debug_assert!(omega >= 0.0, "spectral kernel is defined for ω ≥ 0");
    let (a, b) = angular_parts(geom.direction());
    let (u, v) = radial_parts(omega, geom.separation());
    a * u + b * v
}

/// Lazily evaluated spectral kernel for a fixed geometry. The angular
/// structures are computed once; each call supplies a new frequency.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    a: Matrix3<f64>,
    b: Matrix3<f64>,
    r: f64,
}

impl SpectralKernel {
    pub fn new(geom: &Geometry) -> Self {
        let (a, b) = angular_parts(geom.direction());
        Self {
            a,
            b,
            r: geom.separation(),
        }
    }

    /// g_ij at frequency ω ≥ 0.
    pub fn evaluate(&self, omega: f64) -> Matrix3<f64> {
        let (u, v) = radial_parts(omega, self.r);
        self.a * u + self.b * v
    }

    /// Angular structure multiplying u(ω).
    pub fn angular_a(&self) -> &Matrix3<f64> {
        &self.a
    }

    /// Angular structure multiplying v(ω).
    pub fn angular_b(&self) -> &Matrix3<f64> {
        &self.b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Geometry;
    use approx::assert_relative_eq;
    use nalgebra::Vector3;
    use std::f64::consts::PI;

    #[test]
    fn zz_component_along_z_axis() {
        for (r, omega0) in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.7)] {
            let geom = Geometry::along_z(r, omega0).unwrap();
            let x = omega0 * r;
            let v = dipole_tensor(&geom);
            let expected = -(x.cos() + x * x.sin()) / (2.0 * PI * r * r * r);
            assert_relative_eq!(v.matrix()[(2, 2)], expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn xx_component_at_omega0_r_pi() {
        let r = 1.0;
        let geom = Geometry::along_z(r, PI).unwrap();
        let v = dipole_tensor(&geom);
        // cos π = −1, sin π = 0: A_xx(−1) + B_xx π²(−1) = −1 + π²
        let expected = (-1.0 + PI * PI) / (4.0 * PI);
        assert_relative_eq!(v.matrix()[(0, 0)], expected, max_relative = 1e-13);
    }

    #[test]
    fn near_zone_is_static_dipole_tensor() {
        let r = 2.0;
        let geom = Geometry::along_z(r, 1e-8).unwrap();
        let near = near_zone_tensor(&geom);
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -2.0))
            / (4.0 * PI * r * r * r);
        assert_relative_eq!(near.matrix(), &expected, max_relative = 1e-14);
        assert!(near.trace().abs() < 1e-16 / (r * r * r));
    }

    #[test]
    fn full_tensor_approaches_near_zone_quadratically() {
        let r = 1.0;
        let geom = Geometry::along_z(r, 1e-3).unwrap();
        let full = dipole_tensor(&geom);
        let near = near_zone_tensor(&geom);
        let diff = (full.matrix() - near.matrix()).norm();
        let scale = near.matrix().norm();
        // Taylor residual is O((ω₀r)²) with an O(1) coefficient.
        assert!(diff / scale < 5.0 * 1e-6, "relative deviation {}", diff / scale);
        assert!(diff / scale > 1e-8, "deviation suspiciously small");
    }

    #[test]
    fn far_zone_longitudinal_component_vanishes() {
        let geom = Geometry::along_z(1.0, 5.0).unwrap();
        let far = far_zone_tensor(&geom);
        assert_eq!(far.matrix()[(2, 2)], 0.0);
    }

    #[test]
    fn far_zone_transverse_at_cos_maxima() {
        let omega0 = 1.0;
        for k in [1.0, 2.0, 5.0] {
            let r = 2.0 * PI * k / omega0;
            let geom = Geometry::along_z(r, omega0).unwrap();
            let far = far_zone_tensor(&geom);
            let expected = -omega0 * omega0 / (4.0 * PI * r);
            assert_relative_eq!(far.matrix()[(0, 0)], expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn far_zone_dominates_transverse_component_at_large_separation() {
        let omega0 = 1.0;
        // cos-extrema beyond ω₀r = 200 so the envelope comparison is clean
        for m in [64.0, 65.0, 80.0] {
            let r = m * PI / omega0;
            let geom = Geometry::along_z(r, omega0).unwrap();
            let full = dipole_tensor(&geom).matrix()[(0, 0)];
            let far = far_zone_tensor(&geom).matrix()[(0, 0)];
            assert!(
                ((full - far) / far).abs() <= 0.01,
                "ω₀r = {}: full {} vs far {}",
                omega0 * r,
                full,
                far
            );
        }
    }

    #[test]
    fn kernel_vanishes_at_zero_frequency() {
        let geom = Geometry::along_z(1.3, 0.9).unwrap();
        assert_eq!(chi_kernel(0.0, &geom), Matrix3::zeros());
    }

    #[test]
    fn kernel_zz_along_z_axis() {
        let r = 1.7;
        let geom = Geometry::along_z(r, 1.0).unwrap();
        for omega in [0.3, 1.0, 4.2] {
            let g = chi_kernel(omega, &geom);
            let x = omega * r;
            let expected = -2.0 * (x.sin() / (r * r * r) - omega * x.cos() / (r * r));
            assert_relative_eq!(g[(2, 2)], expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn kernel_xx_at_quarter_wave() {
        let r = 2.0;
        let omega = PI / (2.0 * r); // ωr = π/2: sin = 1, cos = 0
        let geom = Geometry::along_z(r, 1.0).unwrap();
        let g = chi_kernel(omega, &geom);
        let expected = 1.0 / (r * r * r) - omega * omega / r;
        assert_relative_eq!(g[(0, 0)], expected, max_relative = 1e-13);
    }

    #[test]
    fn spectral_kernel_struct_matches_free_function() {
        let geom = Geometry::new(1.1, Vector3::new(0.6, 0.0, 0.8), 2.0).unwrap();
        let kernel = SpectralKernel::new(&geom);
        for omega in [0.0, 0.5, 1.0, 7.3] {
            assert_eq!(kernel.evaluate(omega), chi_kernel(omega, &geom));
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_direction() -> impl Strategy<Value = Vector3<f64>> {
            (-1.0f64..1.0, 0.0f64..PI).prop_map(|(z, azimuth)| {
                let s = (1.0 - z * z).sqrt();
                Vector3::new(s * azimuth.cos(), s * azimuth.sin(), z)
            })
        }

        fn arb_geom() -> impl Strategy<Value = Geometry> {
            (0.1f64..10.0, arb_direction(), 0.1f64..10.0).prop_map(|(r, n, omega0)| {
                let n = n / n.norm();
                Geometry::new(r, n, omega0).unwrap()
            })
        }

        proptest! {
            #[test]
            fn tensor_invariant_under_direction_reversal(geom in arb_geom()) {
                let v = dipole_tensor(&geom);
                let v_rev = dipole_tensor(&geom.reversed());
                prop_assert!((v.matrix() - v_rev.matrix()).norm() == 0.0);
            }

            #[test]
            fn tensor_is_exactly_symmetric(geom in arb_geom()) {
                let v = *dipole_tensor(&geom).matrix();
                for i in 0..3 {
                    for j in 0..3 {
                        prop_assert_eq!(v[(i, j)], v[(j, i)]);
                    }
                }
            }

            #[test]
            fn trace_identity(geom in arb_geom()) {
                let v = dipole_tensor(&geom);
                let expected = -geom.omega0().powi(2) * geom.omega0_r().cos()
                    / (2.0 * PI * geom.separation());
                let scale = v.matrix().norm().max(expected.abs());
                prop_assert!((v.trace() - expected).abs() <= 1e-12 * scale);
            }

            #[test]
            fn rotational_covariance(geom in arb_geom(), axis in arb_direction(), angle in 0.0f64..PI) {
                let rot = nalgebra::Rotation3::from_axis_angle(
                    &nalgebra::Unit::new_normalize(axis),
                    angle,
                );
                let rm = rot.matrix();
                let rotated_n = rm * geom.direction();
                let rotated_geom = Geometry::with_tolerances(
                    geom.separation(),
                    rotated_n / rotated_n.norm(),
                    geom.omega0(),
                    &crate::types::Tolerances::default(),
                ).unwrap();
                let lhs = *dipole_tensor(&rotated_geom).matrix();
                let rhs = rm * dipole_tensor(&geom).matrix() * rm.transpose();
                let scale = rhs.norm();
                prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(1.0));
            }

            #[test]
            fn kernel_symmetric_for_all_frequencies(geom in arb_geom(), omega in 0.0f64..20.0) {
                let g = chi_kernel(omega, &geom);
                for i in 0..3 {
                    for j in 0..3 {
                        prop_assert_eq!(g[(i, j)], g[(j, i)]);
                    }
                }
            }
        }
    }
}
