use emlimit_core::diagnostics::{em_audit_sample, energy_audit, mhd_audit_sample};
use emlimit_core::dynamics::{EmState, LinState, MhdState};
use emlimit_core::ops::{l2_norm, random_divfree_field};
use emlimit_core::timestepping::stepper::{forcing_stencil, layer_pairs};
use emlimit_core::timestepping::{
    plan_steps, run_em, run_linear, run_mhd, PropagatorCache, Scheme, StepperConfig,
};
use emlimit_core::{GridSpec, SpectralContext, SpectralField};

fn field(g: GridSpec, seed: u64) -> SpectralField {
    random_divfree_field(g, seed, 1.0, 6.0).unwrap()
}

fn cfg(t_end: f64, scheme: Scheme) -> StepperConfig {
    StepperConfig {
        scheme,
        t_end,
        ..StepperConfig::default()
    }
}

fn mhd_final(g: GridSpec, dt: f64, t_end: f64) -> MhdState {
    let ctx = SpectralContext::new(g);
    let props = PropagatorCache::heat(g, 2);
    let init = MhdState::new(0.0, field(g, 1), field(g, 2)).unwrap();
    let (n, dt) = plan_steps(t_end, dt);
    run_mhd(&ctx, &props, &init, &cfg(t_end, Scheme::Etd2), dt, n, |_, _| Ok(())).unwrap()
}

#[test]
fn mhd_converges_at_second_order() {
    let g = GridSpec::new(16).unwrap();
    let t = 0.25;
    let fine = mhd_final(g, t / 256.0, t);
    let err = |dt: f64| {
        let s = mhd_final(g, dt, t);
        let mut d = s.u.clone();
        d.axpy(-1.0, &fine.u);
        let mut e = s.b.clone();
        e.axpy(-1.0, &fine.b);
        (l2_norm(&d).powi(2) + l2_norm(&e).powi(2)).sqrt()
    };
    let ratio = err(t / 16.0) / err(t / 32.0);
    assert!((3.5..4.6).contains(&ratio), "ratio {ratio}");
}

fn em_residual(scheme: Scheme, dt: f64) -> f64 {
    let g = GridSpec::new(16).unwrap();
    let ctx = SpectralContext::new(g);
    let c = 8.0;
    let init = EmState::new(0.0, c, field(g, 1), field(g, 3), field(g, 2)).unwrap();
    let props = PropagatorCache::maxwell(g, c, 2);
    let t_end = 0.5;
    let (n, dt) = plan_steps(t_end, dt);
    let mut audit = Vec::new();
    run_em(&ctx, &props, &init, &cfg(t_end, scheme), dt, n, |i, it, inc| {
        audit.push(em_audit_sample(&it.state(), it.j_sq(), (i > 0).then_some(inc)));
        Ok(())
    })
    .unwrap();
    energy_audit(&audit).unwrap().max_relative_residual()
}

#[test]
fn em_energy_identity_closes_for_both_schemes() {
    for scheme in [Scheme::Etd2, Scheme::EtdRk4Lawson] {
        let r = em_residual(scheme, 1.0 / 512.0);
        assert!(r < 1e-5, "{scheme}: {r}");
    }
    let ratio = em_residual(Scheme::Etd2, 1.0 / 256.0) / em_residual(Scheme::Etd2, 1.0 / 512.0);
    assert!((3.0..4.6).contains(&ratio), "ratio {ratio}");
}

#[test]
fn mhd_energy_identity_closes() {
    let g = GridSpec::new(16).unwrap();
    let ctx = SpectralContext::new(g);
    let props = PropagatorCache::heat(g, 2);
    let init = MhdState::new(0.0, field(g, 4), field(g, 5)).unwrap();
    let mut audit = Vec::new();
    run_mhd(&ctx, &props, &init, &cfg(0.25, Scheme::Etd2), 1.0 / 512.0, 128, |_, it| {
        audit.push(mhd_audit_sample(&it.state()));
        Ok(())
    })
    .unwrap();
    assert!(energy_audit(&audit).unwrap().max_relative_residual() < 1e-5);
}

/// With Ē ≡ 0 the linear system is free damped Maxwell: the energy
/// ‖E_L‖² + ‖B_L‖² can only decrease, and the fast branch leaves within
/// the layer.
#[test]
fn unforced_linear_system_dissipates() {
    let g = GridSpec::new(8).unwrap();
    let props = PropagatorCache::maxwell(g, 5.0, 4);
    let init = LinState::initial(5.0, &field(g, 9));
    let zeros = vec![SpectralField::zeros(g); 33];
    let mut energies = Vec::new();
    run_linear(&props, &init, &zeros, 1.0 / 64.0, |_, it| {
        let s = it.state();
        energies.push(l2_norm(&s.e).powi(2) + l2_norm(&s.b).powi(2));
        Ok(())
    })
    .unwrap();
    assert!(energies.windows(2).all(|w| w[1] < w[0]));
    assert!(energies[4] < 0.1 * energies[0]);
}

#[test]
fn forcing_stencils_cover_each_step() {
    for n in [1usize, 2, 3, 10] {
        for i in 0..n {
            let s = forcing_stencil(i, n);
            assert_eq!(s.len(), 4.min(n + 1));
            assert!(s.contains(&i) && s.contains(&(i + 1)));
            assert!(*s.last().unwrap() <= n);
        }
    }
}

#[test]
fn layer_substeps_tile_the_step() {
    let h = 1.0 / 512.0;
    for c in [4.0, 32.0, 128.0] {
        let taus = layer_pairs(c, h, 0.0).unwrap();
        let total: f64 = taus.iter().map(|t| 2.0 * t).sum();
        assert!((total - h).abs() < 1e-15);
        assert!(taus.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
    }
    assert!(layer_pairs(32.0, h, 0.25).is_none());
}
