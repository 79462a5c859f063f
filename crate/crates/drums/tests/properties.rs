//! Randomized property suite: invariants that must hold for arbitrary inputs,
//! not just the frozen oracle configurations.

use drums::eigensolve::eigs_1d_robin;
use drums::geometry::{polygon_derived, BoundaryCondition, Point};
use drums::kernels::{heat_halfplane, heat_interval, heat_interval_images, heat_plane};
use drums::trace::corner_defect;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Convex polygon from random radii at sorted random angles on a circle.
fn convex_polygon(angles: &[f64], radii: &[f64]) -> Vec<Point> {
    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&i, &j| angles[i].partial_cmp(&angles[j]).unwrap());
    order
        .iter()
        .map(|&i| [radii[i] * angles[i].cos(), radii[i] * angles[i].sin()])
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convex_polygon_exterior_angles_sum_to_2pi(
        angles in prop::collection::vec(0.0..(2.0 * PI), 5..12),
        radius in 0.5f64..3.0,
    ) {
        // equal radii keep the hull convex and vertices distinct as long as
        // the angular gaps are not degenerate
        let mut sorted = angles.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut gap_ok = sorted.windows(2).all(|w| w[1] - w[0] > 1e-3);
        gap_ok &= (sorted[0] + 2.0 * PI - sorted[sorted.len() - 1]) > 1e-3;
        prop_assume!(gap_ok);
        let radii = vec![radius; angles.len()];
        let verts = convex_polygon(&sorted, &radii);
        let poly = polygon_derived(verts).unwrap();
        let exterior: f64 = poly.interior_angles.iter().map(|&a| PI - a).sum();
        prop_assert!((exterior - 2.0 * PI).abs() < 1e-9, "sum {exterior}");
    }

    #[test]
    fn orientation_reversal_is_invisible(
        angles in prop::collection::vec(0.0..(2.0 * PI), 4..9),
        radius in 0.5f64..3.0,
    ) {
        let mut sorted = angles.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut gap_ok = sorted.windows(2).all(|w| w[1] - w[0] > 1e-3);
        gap_ok &= (sorted[0] + 2.0 * PI - sorted[sorted.len() - 1]) > 1e-3;
        prop_assume!(gap_ok);
        let radii = vec![radius; sorted.len()];
        let mut verts = convex_polygon(&sorted, &radii);
        let a = polygon_derived(verts.clone()).unwrap();
        verts.reverse();
        let b = polygon_derived(verts).unwrap();
        prop_assert!((a.area - b.area).abs() < 1e-12 * a.area);
        prop_assert!((a.perimeter - b.perimeter).abs() < 1e-12 * a.perimeter);
    }

    #[test]
    fn corner_defect_is_positive_off_pi(theta in 1e-3..(2.0 * PI - 1e-3)) {
        prop_assume!((theta - PI).abs() > 1e-6);
        prop_assert!(corner_defect(theta).unwrap() > 0.0);
    }

    #[test]
    fn plane_kernel_symmetric_and_bounded(
        t in 1e-3f64..1.0,
        z in (-2.0f64..2.0, -2.0f64..2.0),
        w in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let (z, w) = ([z.0, z.1], [w.0, w.1]);
        let a = heat_plane(t, z, w).unwrap();
        let b = heat_plane(t, w, z).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a > 0.0);
        prop_assert!(a <= 1.0 / (4.0 * PI * t) + 1e-300);
    }

    #[test]
    fn halfplane_kernel_symmetric_all_bcs(
        t in 5e-3f64..0.5,
        x in -1.0f64..1.0,
        y in 1e-3f64..1.5,
        xp in -1.0f64..1.0,
        yp in 1e-3f64..1.5,
        c in 0.0f64..3.0,
    ) {
        for bc in [
            BoundaryCondition::Dirichlet,
            BoundaryCondition::Neumann,
            BoundaryCondition::Robin { alpha: c, beta: 1.0 },
        ] {
            let a = heat_halfplane(t, [x, y], [xp, yp], bc).unwrap();
            let b = heat_halfplane(t, [xp, yp], [x, y], bc).unwrap();
            prop_assert!((a - b).abs() <= 1e-13 * (1.0 + a.abs()), "{bc:?}: {a} vs {b}");
        }
    }

    #[test]
    fn halfplane_bc_ordering(
        t in 5e-3f64..0.3,
        y in 1e-2f64..1.0,
        yp in 1e-2f64..1.0,
        c in 0.1f64..3.0,
    ) {
        // Dirichlet <= Robin(c) <= Neumann pointwise on the half-plane diagonal slice
        let z = [0.0, y];
        let zp = [0.1, yp];
        let d = heat_halfplane(t, z, zp, BoundaryCondition::Dirichlet).unwrap();
        let r = heat_halfplane(t, z, zp, BoundaryCondition::Robin { alpha: c, beta: 1.0 }).unwrap();
        let n = heat_halfplane(t, z, zp, BoundaryCondition::Neumann).unwrap();
        prop_assert!(d <= r + 1e-12 && r <= n + 1e-12, "d={d} r={r} n={n}");
    }

    #[test]
    fn interval_eigen_sum_matches_images(
        t in 0.02f64..0.5,
        x in 0.05f64..0.95,
        xp in 0.05f64..0.95,
    ) {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let a = heat_interval(t, x, xp, 1.0, bc).unwrap();
            let b = heat_interval_images(t, x, xp, 1.0, bc).unwrap();
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{bc:?}: {a} vs {b}");
        }
    }

    #[test]
    fn robin_roots_increase_with_coefficient(
        c1 in 0.1f64..1.5,
        dc in 0.1f64..1.5,
    ) {
        // larger Robin coefficient pushes every eigenvalue up (towards Dirichlet)
        let lo = eigs_1d_robin(1.0, c1, 1.0, 5).unwrap();
        let hi = eigs_1d_robin(1.0, c1 + dc, 1.0, 5).unwrap();
        for (a, b) in lo.iter().zip(&hi) {
            prop_assert!(b > a, "{b} !> {a}");
        }
    }
}
