use emlimit_core::diagnostics::{
    boundary_layer_norm, dt_ebar_series, lp_time_norm, LayeredSeries, NormSeries,
};
use emlimit_core::ops::{l2_norm, random_divfree_field};
use emlimit_core::GridSpec;

#[test]
fn constant_series_norms() {
    let n = 101;
    let times: Vec<f64> = (0..n).map(|i| 0.5 * i as f64 / (n - 1) as f64).collect();
    let s = NormSeries::from_parts("k", times, vec![3.0; n]).unwrap();
    for p in [1.0, 2.0, 4.0] {
        let want = 3.0 * 0.5f64.powf(1.0 / p);
        assert!((lp_time_norm(&s, p).unwrap() - want).abs() < 1e-12);
    }
    assert_eq!(lp_time_norm(&s, f64::INFINITY).unwrap(), 3.0);
    assert!(lp_time_norm(&s, 0.5).is_err());
}

/// A series that is exactly the initial layer e^{−c²t}a integrates to the
/// analytic layer norm even when the grid does not resolve it.
#[test]
fn pure_layer_matches_analytic_norm() {
    let g = GridSpec::new(8).unwrap();
    let a = random_divfree_field(g, 3, 1.0, 5.0).unwrap();
    let amp = l2_norm(&a);
    for c in [4.0, 32.0] {
        let mut l = LayeredSeries::new("x", c * c, amp * amp);
        for i in 0..=64 {
            let t = 0.5 * i as f64 / 64.0;
            let x = &a * (-(c * c) * t).exp();
            l.push_fields(t, &x, &a).unwrap();
        }
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let want = boundary_layer_norm(c, amp, p, 0.5);
            let got = l.lp_norm(p).unwrap();
            assert!((got - want).abs() < 1e-8 * want, "c = {c}, p = {p}: {got} vs {want}");
            assert!(l.remainder().lp_norm(p).unwrap() < 1e-10 * amp);
        }
    }
}

#[test]
fn dt_ebar_of_linear_motion_is_constant() {
    let g = GridSpec::new(8).unwrap();
    let a = random_divfree_field(g, 1, 1.0, 5.0).unwrap();
    let v = random_divfree_field(g, 2, 1.0, 5.0).unwrap();
    let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.025).collect();
    let fields: Vec<_> = times
        .iter()
        .map(|&t| {
            let mut f = a.clone();
            f.axpy(t, &v);
            f
        })
        .collect();
    let d = dt_ebar_series(times.iter().copied().zip(&fields)).unwrap();
    assert!((d.linf_l2 - l2_norm(&v)).abs() < 1e-10 * l2_norm(&v));
    assert!(d.l2.values.iter().all(|x| (x - l2_norm(&v)).abs() < 1e-9));
}
