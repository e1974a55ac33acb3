//! Inertia tensors for thin rods, spheres, and rod composites.

use crate::math::{Mat3, Vec3};

/// Regularization added along a rod's own axis so single-rod tensors stay
/// invertible. A mathematically thin rod has zero axial inertia, which
/// would make free axial rotation ill-posed.
pub const AXIAL_INERTIA_FLOOR: f64 = 1e-9;

/// Radius of the uniform sphere assumed for bodies without member rods.
pub const DEFAULT_SPHERE_RADIUS: f64 = 0.01;

/// Inertia of a uniform thin rod about its center: `m·L²/12` on the two
/// axes perpendicular to the rod, [`AXIAL_INERTIA_FLOOR`] along it.
///
/// Panics on non-finite or non-positive mass/length or a zero axis.
pub fn thin_rod_inertia(mass: f64, length: f64, axis: Vec3) -> Mat3 {
    assert!(
        mass.is_finite() && mass > 0.0,
        "thin_rod_inertia: mass must be positive and finite, got {mass}"
    );
    assert!(
        length.is_finite() && length > 0.0,
        "thin_rod_inertia: length must be positive and finite, got {length}"
    );
    let norm = axis.norm();
    assert!(
        norm.is_finite() && norm > 0.0,
        "thin_rod_inertia: axis must be nonzero and finite"
    );
    let u = axis / norm;
    let perpendicular = mass * length * length / 12.0;
    let outer = u * u.transpose();
    (Mat3::identity() - outer) * perpendicular + outer * AXIAL_INERTIA_FLOOR
}

/// Inertia of a uniform solid sphere: `(2/5)·m·r²` isotropic.
pub fn sphere_inertia(mass: f64, radius: f64) -> Mat3 {
    Mat3::identity() * (0.4 * mass * radius * radius)
}

/// Parallel-axis contribution of a point offset `d` carrying mass `m`:
/// `m·(|d|²·I − d·dᵀ)`.
fn parallel_axis(mass: f64, d: Vec3) -> Mat3 {
    (Mat3::identity() * d.norm_squared() - d * d.transpose()) * mass
}

/// Fuse member rods, given as `(end_a, end_b, mass)` in the body frame, into
/// one rigid element. Returns the common center of mass and the inertia
/// about it: each member's thin-rod tensor transported by the parallel-axis
/// theorem.
pub fn composite_from_rods(rods: &[(Vec3, Vec3, f64)]) -> (Vec3, Mat3) {
    assert!(!rods.is_empty(), "composite needs at least one rod");
    let total: f64 = rods.iter().map(|(_, _, m)| m).sum();
    let com = rods
        .iter()
        .map(|(a, b, m)| (a + b) * 0.5 * *m)
        .sum::<Vec3>()
        / total;
    let mut inertia = Mat3::zeros();
    for (a, b, m) in rods {
        let center = (a + b) * 0.5;
        inertia += thin_rod_inertia(*m, (b - a).norm(), b - a);
        inertia += parallel_axis(*m, center - com);
    }
    (com, inertia)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent oracle: integrate `∫ r² dm` along a rod with midpoint
    /// quadrature and assemble the tensor elementwise.
    fn rod_inertia_by_quadrature(a: Vec3, b: Vec3, mass: f64, about: Vec3) -> Mat3 {
        let n = 20_000;
        let dm = mass / n as f64;
        let mut inertia = Mat3::zeros();
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            let p = a + (b - a) * t - about;
            inertia += (Mat3::identity() * p.norm_squared() - p * p.transpose()) * dm;
        }
        inertia
    }

    #[test]
    fn unit_rod_along_z() {
        let inertia = thin_rod_inertia(1.0, 1.0, Vec3::z());
        assert_relative_eq!(inertia[(0, 0)], 1.0 / 12.0, max_relative = 1e-12);
        assert_relative_eq!(inertia[(1, 1)], 1.0 / 12.0, max_relative = 1e-12);
        assert_eq!(inertia[(2, 2)], AXIAL_INERTIA_FLOOR);
        assert_eq!(inertia[(0, 1)], 0.0);
    }

    #[test]
    fn rod_matches_quadrature_oracle() {
        let (a, b, m) = (Vec3::new(0.1, -0.2, 0.3), Vec3::new(-0.4, 0.5, 0.9), 0.037);
        let axis = b - a;
        let got = thin_rod_inertia(m, axis.norm(), axis);
        let want = rod_inertia_by_quadrature(a, b, m, (a + b) * 0.5);
        for i in 0..3 {
            for j in 0..3 {
                assert!((got[(i, j)] - want[(i, j)]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn upper_arm_rod_moment() {
        let inertia = thin_rod_inertia(0.0366, 0.762, Vec3::z());
        assert_relative_eq!(inertia[(0, 0)], 1.7709e-3, max_relative = 1e-3);
    }

    #[test]
    fn perpendicular_moment_scales_quadratically_with_length() {
        let one = thin_rod_inertia(1.0, 1.0, Vec3::x());
        let two = thin_rod_inertia(1.0, 2.0, Vec3::x());
        assert_relative_eq!(two[(1, 1)] / one[(1, 1)], 4.0, max_relative = 1e-12);
    }

    #[test]
    fn composite_matches_independent_summation() {
        // L-shaped pair of rods.
        let rods = [
            (Vec3::zeros(), Vec3::new(0.4, 0.0, 0.0), 0.02),
            (Vec3::new(0.4, 0.0, 0.0), Vec3::new(0.4, 0.3, 0.0), 0.015),
        ];
        let (com, inertia) = composite_from_rods(&rods);
        let total = 0.035;
        let want_com = (Vec3::new(0.2, 0.0, 0.0) * 0.02 + Vec3::new(0.4, 0.15, 0.0) * 0.015) / total;
        assert_relative_eq!((com - want_com).norm(), 0.0, epsilon = 1e-15);

        let mut want = Mat3::zeros();
        for (a, b, m) in rods {
            want += rod_inertia_by_quadrature(a, b, m, com);
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!((inertia[(i, j)] - want[(i, j)]).abs() < 1e-7);
            }
        }
    }

    #[test]
    #[should_panic(expected = "mass must be positive")]
    fn rejects_non_finite_mass() {
        thin_rod_inertia(f64::NAN, 1.0, Vec3::z());
    }
}
