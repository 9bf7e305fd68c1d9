use emlimit_core::dynamics::{
    compute_ebar, em_linear_part, em_rhs, mhd_linear_part, mhd_rhs, ohm_current, EmState, MhdState,
};
use emlimit_core::ops::{curl, divergence, inner, l2_norm, random_divfree_field};
use emlimit_core::{GridSpec, SpectralContext, SpectralField};

fn field(g: GridSpec, seed: u64) -> SpectralField {
    random_divfree_field(g, seed, 1.0, 5.0).unwrap()
}

fn em_state(g: GridSpec, c: f64) -> EmState {
    EmState::new(0.0, c, field(g, 1), field(g, 2), field(g, 3)).unwrap()
}

/// d/dt ½(‖u‖² + ‖E‖² + ‖B‖²) = −‖j‖² holds exactly for the dealiased
/// semi-discrete system when n is not a multiple of 3.
#[test]
fn em_tendency_dissipates_exactly_the_ohmic_heating() {
    let g = GridSpec::new(16).unwrap();
    let ctx = SpectralContext::new(g);
    for c in [1.0, 4.0, 20.0] {
        let s = em_state(g, c);
        let t = em_rhs(&ctx, &s);
        let (de_lin, db_lin) = em_linear_part(&s);
        let mut de = de_lin;
        de.axpy(1.0, &t.de_forcing);
        let rate = inner(&s.u, &t.du) + inner(&s.e, &de) + inner(&s.b, &db_lin);
        let j = ohm_current(&ctx, &s);
        let j2 = l2_norm(&j).powi(2);
        assert!((rate + j2).abs() < 1e-10 * j2, "c = {c}: {rate} vs {}", -j2);
    }
}

#[test]
fn mhd_tendency_dissipates_exactly_the_joule_heating() {
    let g = GridSpec::new(16).unwrap();
    let ctx = SpectralContext::new(g);
    let s = MhdState::new(0.0, field(g, 4), field(g, 5)).unwrap();
    let (du, db) = mhd_rhs(&ctx, &s);
    let mut db = db;
    db.axpy(1.0, &mhd_linear_part(&s));
    let rate = inner(&s.u, &du) + inner(&s.b, &db);
    let j2 = l2_norm(&curl(&s.b)).powi(2);
    assert!((rate + j2).abs() < 1e-10 * j2);
}

#[test]
fn tendencies_stay_solenoidal() {
    let g = GridSpec::new(12).unwrap();
    let ctx = SpectralContext::new(g);
    let s = em_state(g, 3.0);
    let t = em_rhs(&ctx, &s);
    for f in [&t.du, &t.de_forcing] {
        let d = divergence(f);
        assert!(d.data().iter().all(|z| z.norm() < 1e-12));
    }
}

/// For data with E = Ē/c the Ohm current reduces to the MHD current.
#[test]
fn well_prepared_current_is_the_mhd_current() {
    let g = GridSpec::new(16).unwrap();
    let ctx = SpectralContext::new(g);
    let m = MhdState::new(0.0, field(g, 6), field(g, 7)).unwrap();
    let c = 9.0;
    let s = EmState::new(0.0, c, m.u.clone(), &compute_ebar(&ctx, &m) * (1.0 / c), m.b.clone()).unwrap();
    let mut diff = ohm_current(&ctx, &s);
    diff.axpy(-1.0, &curl(&m.b));
    assert!(l2_norm(&diff) < 1e-12 * l2_norm(&curl(&m.b)));
}
