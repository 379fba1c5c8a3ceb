use daylight_core::geometry::{build_frames, phi_v, phi_v_inverse, tilt_cosines, Vec3};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Vec3> {
    (-30.0..30.0f64, -30.0..30.0f64, 5.0..80.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

proptest! {
    #[test]
    fn focusing_map_scales_norm(z in point(), v in 0.5..1.5f64) {
        if let Ok(f) = phi_v(z, v) {
            prop_assert!((f.norm() - v * z.norm()).abs() <= 1e-12 * v * z.norm());
        }
    }

    #[test]
    fn unit_ratio_is_identity(x in -50.0..50.0f64, y in -50.0..50.0f64, z in -50.0..50.0f64) {
        let p = Vec3::new(x, y, z);
        prop_assume!(p.norm() > 0.0);
        prop_assert_eq!(phi_v(p, 1.0).unwrap(), p);
    }

    #[test]
    fn inverse_round_trip(z in point(), v in 0.7..1.3f64) {
        if let Ok(f) = phi_v(z, v) {
            let back = phi_v_inverse(f, v).unwrap();
            prop_assert!((back - z).norm() <= 1e-10 * z.norm());
            let again = phi_v(back, v).unwrap();
            prop_assert!((again - f).norm() <= 1e-10 * f.norm());
        }
    }

    #[test]
    fn frames_are_right_handed_and_orthonormal(z in point(), v in 0.8..1.2f64) {
        let fr = build_frames(z, v);
        prop_assume!(fr.is_ok());
        let fr = fr.unwrap();
        for t in [fr.f_hat, fr.g_hat] {
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((t[i].dot(t[j]) - want).abs() < 1e-12);
                }
            }
            prop_assert!((t[0].cross(t[1]) - t[2]).norm() < 1e-12);
        }
    }

    #[test]
    fn in_plane_frames_share_e2(x in -30.0..30.0f64, z in 5.0..80.0f64, v in 0.8..1.2f64) {
        let fr = build_frames(Vec3::new(x, 0.0, z), v);
        prop_assume!(fr.is_ok());
        let fr = fr.unwrap();
        prop_assert_eq!(fr.f_hat[1], Vec3::E2);
        prop_assert_eq!(fr.g_hat[1], Vec3::E2);
    }

    #[test]
    fn tilt_is_continuous_at_unit_ratio(z in point()) {
        let a = tilt_cosines(z, 1.0 - 1e-6).unwrap();
        let b = tilt_cosines(z, 1.0 + 1e-6).unwrap();
        prop_assert!((a.alpha_f - a.alpha_r).abs() < 1e-5);
        prop_assert!((b.alpha_f - b.alpha_r).abs() < 1e-5);
    }
}
