use num_complex::Complex;
use proptest::prelude::*;
use spinor_tunnel::elliptic::{elliptic_k, jacobi};
use spinor_tunnel::integrator::{integrate, IntegratorConfig};
use spinor_tunnel::model::{self, rhs, Spinor, SpinorPair, SystemParams};
use spinor_tunnel::reduced::{analytic_period, conserved_quantity, reduced_rhs, ReducedParams, ReducedState};

fn spinor() -> impl Strategy<Value = Spinor<f64>> {
    prop::array::uniform6(-1.0f64..1.0)
        .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            Spinor::new(Complex::new(v[0], v[1]), Complex::new(v[2], v[3]), Complex::new(v[4], v[5])).normalized()
        })
}

fn params() -> impl Strategy<Value = SystemParams<f64>> {
    (0.5f64..1.5, 0.5f64..1.5, -0.05f64..0.05, 1e-4f64..0.05)
        .prop_map(|(eps, ls, la, j)| SystemParams::symmetric(eps, ls, la, j).unwrap())
}

proptest! {
    #[test]
    fn total_norm_is_stationary(l in spinor(), r in spinor(), p in params()) {
        let s = SpinorPair::new(l, r);
        let d = rhs(&s, &p).unwrap();
        prop_assert!(s.dot(&d).re.abs() < 1e-13);
    }

    #[test]
    fn reduced_invariant_is_stationary(m in -1.0f64..1.0, r0 in -0.5f64..0.5, i0 in -0.5f64..0.5,
                                       j in 1e-4f64..0.05, la in -0.05f64..0.05) {
        let s = ReducedState::new(m, r0, i0);
        let p = ReducedParams::new(j, la).unwrap();
        let d = reduced_rhs(&s, &p);
        let rate = 2.0 * s.r0 * d.r0 + 2.0 * s.i0 * d.i0 + s.m * d.m / 2.0;
        prop_assert!(rate.abs() < 1e-15);
        prop_assert!(conserved_quantity(&s) >= 0.0);
    }

    #[test]
    fn jacobi_identities(u in -50.0f64..50.0, k in 0.0f64..0.999) {
        let f = jacobi(u, k).unwrap();
        prop_assert!((f.sn * f.sn + f.cn * f.cn - 1.0).abs() < 1e-12);
        prop_assert!((f.dn * f.dn + k * k * f.sn * f.sn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cn_vanishes_at_quarter_period(k in 0.0f64..0.999) {
        let big_k = elliptic_k(k).unwrap();
        prop_assert!(jacobi(big_k, k).unwrap().cn.abs() < 1e-10);
    }

    #[test]
    fn k_is_increasing(a in 0.0f64..0.99, d in 1e-3f64..9e-3) {
        prop_assert!(elliptic_k(a + d).unwrap() > elliptic_k(a).unwrap());
    }

    #[test]
    fn observables_are_bounded(f in spinor()) {
        let o = model::observables(&f);
        prop_assert!((o.norm - 1.0).abs() < 1e-12);
        prop_assert!(o.m.abs() <= 1.0 + 1e-12);
        prop_assert!(o.n0 >= -1e-12 && o.n0 <= 1.0 + 1e-12);
    }
}

#[test]
fn f32_pipeline_tracks_f64() {
    let z32 = Complex::new(0.0f32, 0.0);
    let one32 = Complex::new(1.0f32, 0.0);
    let s32 = SpinorPair::new(Spinor::new(one32, z32, z32), Spinor::new(z32, z32, one32));
    let p32 = SystemParams::<f32>::symmetric(1.0, 1.0, -0.01, 0.02).unwrap();
    let t32 = integrate(&s32, &p32, &IntegratorConfig::<f32>::with_span(160.0, 4.0)).unwrap();

    let z64 = Complex::new(0.0f64, 0.0);
    let one64 = Complex::new(1.0f64, 0.0);
    let s64 = SpinorPair::new(Spinor::new(one64, z64, z64), Spinor::new(z64, z64, one64));
    let p64 = SystemParams::<f64>::symmetric(1.0, 1.0, -0.01, 0.02).unwrap();
    let t64 = integrate(&s64, &p64, &IntegratorConfig::<f64>::with_span(160.0, 4.0)).unwrap();

    assert_eq!(t32.times.len(), t64.times.len());
    let dev = t32
        .observables_left
        .iter()
        .zip(&t64.observables_left)
        .fold(0.0f64, |m, (a, b)| m.max((a.m as f64 - b.m).abs()));
    assert!(dev < 1e-2, "M deviation {dev}");
    let drift = t32.total_norm.iter().fold(0.0f32, |m, n| m.max((n - 2.0).abs()));
    assert!(drift < 1e-2, "norm drift {drift}");

    let tau32 = analytic_period(&ReducedParams::<f32>::new(0.02, -0.01).unwrap()).unwrap();
    let tau64 = analytic_period(&ReducedParams::<f64>::new(0.02, -0.01).unwrap()).unwrap();
    assert!(((tau32 as f64) - tau64).abs() / tau64 < 1e-5);
}
