use num_rational::Ratio;
use proptest::prelude::*;

use spaceform::catalog::{fhat_c, quadric_defect, rot_polar, rot_range, Immersion, ImmersionId};
use spaceform::frame_flow::eta_of;
use spaceform::leafspace::{first_integral, n_vec, r0_exact, theta_eval, LeafPoint, TState, L_MAX};
use spaceform::linalg::{algebra_residual_raw, expm, group_residual_raw, inner, Matrix, Signature, Vector};
use spaceform::numgeom::{jet, JetConfig};

fn sig(c: i32, eps: i32) -> Signature {
    Signature::frame(c, eps).unwrap()
}

fn signs() -> impl Strategy<Value = (i32, i32)> {
    prop_oneof![Just((1, 1)), Just((-1, 1)), Just((-1, -1))]
}

fn vec5() -> impl Strategy<Value = Vector> {
    prop::collection::vec(-3.0..3.0f64, 5).prop_map(Vector::from_vec)
}

/// A random element of the Lie algebra of `diag(sig)`: X = J⁻¹ (S − Sᵀ).
fn algebra(s: Signature, entries: &[f64]) -> Matrix {
    let d = s.diag();
    let mut x = Matrix::zeros(5, 5);
    let mut k = 0;
    for i in 0..5 {
        for j in (i + 1)..5 {
            x[(i, j)] = entries[k] / d[i];
            x[(j, i)] = -entries[k] / d[j];
            k += 1;
        }
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inner_product_is_symmetric((c, eps) in signs(), u in vec5(), v in vec5()) {
        let s = sig(c, eps);
        prop_assert_eq!(inner(&u, &v, s), inner(&v, &u, s));
    }

    #[test]
    fn exponential_stays_in_the_group((c, eps) in signs(), e in prop::collection::vec(-2.0..2.0f64, 10)) {
        let s = sig(c, eps);
        let x = algebra(s, &e);
        prop_assert!(algebra_residual_raw(&x, s) < 1e-14);
        let g = expm(&x);
        let scale = g.amax().powi(2).max(1.0);
        prop_assert!(group_residual_raw(&g, s) / scale < 1e-12);
    }

    #[test]
    fn first_integral_is_flip_invariant(c in prop_oneof![Just(1), Just(-1)], u0 in 0.05..20.0f64, u1 in -4.0..4.0f64, u2 in -4.0..4.0f64) {
        let p = LeafPoint { u: [u0, u1, u2], c };
        let l = first_integral(&p);
        prop_assume!(l.is_finite());
        prop_assert!((l - first_integral(&p.flip())).abs() <= 1e-12 * (1.0 + l.abs()));
    }

    #[test]
    fn first_integral_stays_in_range(c in prop_oneof![Just(1), Just(-1)], u0 in 0.01..50.0f64, u1 in -10.0..10.0f64, u2 in -10.0..10.0f64) {
        prop_assume!((u0 * u0 - c as f64).abs() > 1e-6);
        let l = first_integral(&LeafPoint { u: [u0, u1, u2], c });
        prop_assume!(l.is_finite());
        prop_assert!((-1e-12..=L_MAX + 1e-12).contains(&l));
    }

    #[test]
    fn theta_is_positive_on_its_normal(c in prop_oneof![Just(1), Just(-1)], u0 in 0.1..5.0f64, u1 in -3.0..3.0f64, u2 in -3.0..3.0f64) {
        prop_assume!((u0 * u0 - c as f64).abs() > 1e-3);
        let p = LeafPoint { u: [u0, u1, u2], c };
        let n = n_vec(&p).unwrap();
        let norm2: f64 = n.iter().map(|x| x * x).sum();
        prop_assume!(norm2 > 1e-18);
        prop_assert!(theta_eval(&p, n).unwrap() > 0.0);
    }

    #[test]
    fn r0_vanishes_exactly_on_family_states(
        c in prop_oneof![Just(1i64), Just(-1i64)],
        n in prop::collection::vec(-40i64..40, 3),
        d in prop::collection::vec(1i64..30, 3),
        t3 in -20i64..20,
    ) {
        let t = [Ratio::new(n[0].abs() + 1, d[0]), Ratio::new(n[1], d[1]), Ratio::new(n[2], d[2]), Ratio::from_integer(t3)];
        let v = r0_exact(t, Ratio::new(2, 3), 1, c).unwrap();
        prop_assert_eq!(v, Ratio::from_integer(20 * c * t3 * t3));
    }

    #[test]
    fn eta_lies_in_the_algebra(
        (c, eps) in signs(),
        t0 in 0.2..3.0f64, t1 in -2.0..2.0f64, t2 in -2.0..2.0f64, t3 in -2.0..2.0f64,
        a in 0.2..1.5f64, w1 in -1.0..1.0f64, w2 in -1.0..1.0f64,
    ) {
        prop_assume!((t0 * t0 - c as f64).abs() > 1e-2);
        let s = TState::new([t0, t1, t2, t3], a, eps, c).unwrap();
        let eta = eta_of(&s, (w1, w2)).unwrap();
        let scale = eta.matrix().amax().max(1.0);
        prop_assert!(algebra_residual_raw(eta.matrix(), sig(c, eps)) / scale <= 1e-14);
    }

    #[test]
    fn catalog_points_lie_on_their_quadrics(k in 0usize..4, s in prop::collection::vec(0.001..0.999f64, 3)) {
        let (id, u) = match k {
            0 | 1 => {
                let c = if k == 0 { 1 } else { -1 };
                let (lo, hi) = rot_range(c);
                let p = rot_polar(c, lo + (hi - lo) * s[0], std::f64::consts::TAU * s[1]).unwrap();
                let id = ImmersionId::RotPolar { c };
                prop_assert!(quadric_defect(&id, &p) < 1e-12);
                return Ok(());
            }
            2 => (ImmersionId::FhatC { c: 1 }, s.clone()),
            _ => (ImmersionId::FhatC { c: -1 }, s.clone()),
        };
        let dom = id.domain();
        let x: Vec<f64> = dom.ranges.iter().zip(&u).map(|(&(lo, hi), t)| lo + (hi - lo) * t).collect();
        let p = fhat_c(id.c(), x[0], x[1], x[2]).unwrap();
        prop_assert!(quadric_defect(&id, &p) / (1.0 + p.amax().powi(2)) < 1e-12);
        prop_assert_eq!(id.eval(&x).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// At steps where truncation dominates rounding, halving the step cuts
    /// the second-derivative error by at least 8.
    #[test]
    fn finite_difference_error_shrinks_on_halving(r in 0.21..0.4f64, theta in 0.0..6.0f64) {
        let id = ImmersionId::RotPolar { c: 1 };
        let exact = {
            let fine = JetConfig { step: 1e-3, richardson: true };
            jet(&id, &[r, theta], &fine).unwrap()
        };
        let err = |h: f64| {
            let j = jet(&id, &[r, theta], &JetConfig { step: h, richardson: true }).unwrap();
            j.second.iter().flatten().zip(exact.second.iter().flatten()).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.02), err(0.01));
        prop_assert!(e1 / e2 >= 8.0, "{e1:e} {e2:e}");
    }
}
