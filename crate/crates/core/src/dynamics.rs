//! Right-hand sides of the Euler–Maxwell, MHD and auxiliary linear systems.
//!
//! Every tendency is split into a stiff linear part, owned by the exact
//! propagators in [`crate::timestepping`], and a forcing part returned here.

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralContext, SpectralField, SpectralScalar};
use crate::ops::{
    cross_physical, curl, dealias_in_place, divergence, physical_linf, product_fields,
    project_in_place, ProductKind,
};

/// Physical parameters. Conductivity and magnetic diffusivity are both 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub c: f64,
    pub c0: f64,
    pub t_end: f64,
}

impl Params {
    pub fn new(c: f64, c0: f64, t_end: f64) -> Result<Self> {
        if !(c0 > 0.0) || !(c >= c0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need c >= c0 > 0, got c = {c}, c0 = {c0}"
            )));
        }
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidArgument(format!("T = {t_end} must be > 0")));
        }
        Ok(Params { c, c0, t_end })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmState {
    pub t: f64,
    pub c: f64,
    pub u: SpectralField,
    pub e: SpectralField,
    pub b: SpectralField,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MhdState {
    pub t: f64,
    pub u: SpectralField,
    pub b: SpectralField,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinState {
    pub t: f64,
    pub c: f64,
    pub e: SpectralField,
    pub b: SpectralField,
}

fn same_grid(fields: &[&SpectralField]) -> Result<()> {
    let g = fields[0].grid();
    fields[1..].iter().try_for_each(|f| g.ensure_same(&f.grid()))
}

impl EmState {
    pub fn new(
        t: f64,
        c: f64,
        u: SpectralField,
        e: SpectralField,
        b: SpectralField,
    ) -> Result<Self> {
        same_grid(&[&u, &e, &b])?;
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("c = {c} must be > 0")));
        }
        Ok(EmState { t, c, u, e, b })
    }

    /// ½(‖u‖² + ‖E‖² + ‖B‖²).
    pub fn energy(&self) -> f64 {
        use crate::ops::l2_norm;
        0.5 * (l2_norm(&self.u).powi(2) + l2_norm(&self.e).powi(2) + l2_norm(&self.b).powi(2))
    }
}

impl MhdState {
    pub fn new(t: f64, u: SpectralField, b: SpectralField) -> Result<Self> {
        same_grid(&[&u, &b])?;
        Ok(MhdState { t, u, b })
    }

    /// ½(‖ū‖² + ‖B̄‖²).
    pub fn energy(&self) -> f64 {
        use crate::ops::l2_norm;
        0.5 * (l2_norm(&self.u).powi(2) + l2_norm(&self.b).powi(2))
    }
}

impl LinState {
    /// Initial state of the linear system: E_L = E₀ᶜ, B_L = 0.
    pub fn initial(c: f64, e0: &SpectralField) -> Self {
        LinState {
            t: 0.0,
            c,
            e: e0.clone(),
            b: SpectralField::zeros(e0.grid()),
        }
    }
}

/// P D(a) in place: dealias, then Leray-project with the mean cleared.
fn pd(mut f: SpectralField) -> SpectralField {
    dealias_in_place(&mut f);
    project_in_place(&mut f);
    f
}

/// j = cE + P(u × B).
pub fn ohm_current(ctx: &SpectralContext, s: &EmState) -> SpectralField {
    let uxb = pd(cross_spectral(ctx, &s.u, &s.b));
    let mut j = &s.e * s.c;
    j.axpy(1.0, &uxb);
    j
}

fn cross_spectral(ctx: &SpectralContext, a: &SpectralField, b: &SpectralField) -> SpectralField {
    let p = ctx.to_physical_many(&[a, b]);
    ctx.from_physical(&cross_physical(&p[0], &p[1]))
}

/// Forcing part of the Euler–Maxwell tendency.
#[derive(Clone, Debug)]
pub struct EmTendency {
    /// P[−(u·∇)u + j×B]
    pub du: SpectralField,
    /// −c P(u×B)
    pub de_forcing: SpectralField,
    /// always zero
    pub db_forcing: SpectralField,
}

pub fn em_rhs(ctx: &SpectralContext, s: &EmState) -> EmTendency {
    let g = s.u.grid();
    let uxb = pd(cross_spectral(ctx, &s.u, &s.b));
    let mut j = &s.e * s.c;
    j.axpy(1.0, &uxb);
    let adv = product_fields(ctx, &s.u, &s.u, ProductKind::Advection).expect("same grid");
    let jxb = cross_spectral(ctx, &j, &s.b);
    let mut du = jxb;
    du.axpy(-1.0, &adv);
    EmTendency {
        du: pd(du),
        de_forcing: &uxb * -s.c,
        db_forcing: SpectralField::zeros(g),
    }
}

/// Stiff linear part of the Maxwell tendencies: (c∇×B − c²E, −c∇×E).
pub fn em_linear_part(s: &EmState) -> (SpectralField, SpectralField) {
    let mut de = &curl(&s.b) * s.c;
    de.axpy(-s.c * s.c, &s.e);
    let db = &curl(&s.e) * -s.c;
    (de, db)
}

/// Forcing part of the MHD tendency: (P[−(ū·∇)ū + (∇×B̄)×B̄], ∇×(ū×B̄)).
pub fn mhd_rhs(ctx: &SpectralContext, s: &MhdState) -> (SpectralField, SpectralField) {
    let adv = product_fields(ctx, &s.u, &s.u, ProductKind::Advection).expect("same grid");
    let mut du = cross_spectral(ctx, &curl(&s.b), &s.b);
    du.axpy(-1.0, &adv);
    let mut uxb = cross_spectral(ctx, &s.u, &s.b);
    dealias_in_place(&mut uxb);
    (pd(du), curl(&uxb))
}

/// Stiff linear part of the MHD tendency: ΔB̄.
pub fn mhd_linear_part(s: &MhdState) -> SpectralField {
    let g = s.b.grid();
    let mut out = s.b.clone();
    for (idx, k) in g.wavevectors().enumerate() {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let v = out.at(idx);
        out.set(idx, [v[0] * -k2, v[1] * -k2, v[2] * -k2]);
    }
    out
}

/// Ē = ∇×B̄ − P(ū×B̄).
pub fn compute_ebar(ctx: &SpectralContext, s: &MhdState) -> SpectralField {
    let mut e = curl(&s.b);
    e.axpy(-1.0, &pd(cross_spectral(ctx, &s.u, &s.b)));
    e
}

/// j̄ = ∇×B̄.
pub fn compute_jbar(s: &MhdState) -> SpectralField {
    curl(&s.b)
}

/// Forcings of the linear system in tendency form: (cĒ, ∇×Ē).
pub fn lin_rhs(s: &LinState, ebar: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    s.e.grid().ensure_same(&ebar.grid())?;
    Ok((ebar * s.c, curl(ebar)))
}

/// Pressure with ∇p equal to the gradient part of g = j×B − (u·∇)u.
pub fn recover_pressure(ctx: &SpectralContext, s: &EmState) -> SpectralScalar {
    let j = ohm_current(ctx, s);
    let mut gfield = cross_spectral(ctx, &j, &s.b);
    dealias_in_place(&mut gfield);
    let adv = product_fields(ctx, &s.u, &s.u, ProductKind::Advection).expect("same grid");
    gfield.axpy(-1.0, &adv);
    pressure_of(&gfield)
}

/// p̂ = −i k·ĝ / |k|², so that ∇p is the curl-free part of g.
pub fn pressure_of(g: &SpectralField) -> SpectralScalar {
    let grid = g.grid();
    let mut p = divergence(g);
    for (idx, k) in grid.wavevectors().enumerate() {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let d = &mut p.data_mut()[idx];
        *d = if k2 == 0.0 { Default::default() } else { -*d / k2 };
    }
    p
}

/// (1/c) P(E×B), the field-momentum correction between u and m.
pub fn field_momentum(ctx: &SpectralContext, e: &SpectralField, b: &SpectralField, c: f64) -> SpectralField {
    &pd(cross_spectral(ctx, e, b)) * (1.0 / c)
}

/// Everything the Euler–Maxwell steppers need at one state, from a single
/// batch of transforms.
#[derive(Clone, Debug)]
pub(crate) struct EmEval {
    pub u: SpectralField,
    pub m: SpectralField,
    /// P D[−ω×u + (∇×B)×B − E×(∇×E)], the tendency of m
    pub dm: SpectralField,
    /// −c P D(u×B)
    pub de: SpectralField,
    pub j: SpectralField,
    pub linf_u: f64,
    pub linf_b: f64,
}

pub(crate) enum Velocity<'a> {
    Direct(&'a SpectralField),
    FromMomentum(&'a SpectralField),
}

/// Evaluates the momentum-form forcing with m = u + (1/c)P(E×B).
///
/// With j = ∇×B − (1/c)∂ₜE and ∂ₜB = −c∇×E one has
/// j×B = (∇×B)×B − E×(∇×E) − (1/c)∂ₜ(E×B), so m obeys an equation free of
/// ∂ₜE. Stepping m instead of u keeps the scheme consistent with the MHD
/// limit as c grows.
pub(crate) fn em_eval(
    ctx: &SpectralContext,
    c: f64,
    vel: Velocity<'_>,
    e: &SpectralField,
    b: &SpectralField,
) -> EmEval {
    let ce = curl(e);
    let cb = curl(b);
    let pe = ctx.to_physical_many(&[e, b, &ce, &cb]);
    let (pe_, pb, pce, pcb) = (&pe[0], &pe[1], &pe[2], &pe[3]);
    let exb = pd(ctx.from_physical(&cross_physical(pe_, pb)));
    let (u, m) = match vel {
        Velocity::Direct(u) => {
            let mut m = u.clone();
            m.axpy(1.0 / c, &exb);
            (u.clone(), m)
        }
        Velocity::FromMomentum(m) => {
            let mut u = m.clone();
            u.axpy(-1.0 / c, &exb);
            (u, m.clone())
        }
    };
    let w = curl(&u);
    let pu = ctx.to_physical_many(&[&u, &w]);
    let (pu_, pw) = (&pu[0], &pu[1]);
    let g = u.grid();
    let mut force = PhysicalField::zeros(g);
    let mut uxb = PhysicalField::zeros(g);
    for i in 0..g.len() {
        let uu = pu_.at(i);
        let ww = pw.at(i);
        let bb = pb.at(i);
        let ee = pe_.at(i);
        let cbv = pcb.at(i);
        let cev = pce.at(i);
        let cr = |a: [f64; 3], b: [f64; 3]| {
            [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        };
        let t1 = cr(ww, uu);
        let t2 = cr(cbv, bb);
        let t3 = cr(ee, cev);
        let t4 = cr(uu, bb);
        for d in 0..3 {
            force.component_mut(d)[i] = -t1[d] + t2[d] - t3[d];
            uxb.component_mut(d)[i] = t4[d];
        }
    }
    let out = ctx.from_physical_many(&[&force, &uxb]);
    let mut it = out.into_iter();
    let dm = pd(it.next().expect("force"));
    let uxb = pd(it.next().expect("uxb"));
    let mut j = e * c;
    j.axpy(1.0, &uxb);
    EmEval {
        linf_u: physical_linf(pu_),
        linf_b: physical_linf(pb),
        u,
        m,
        dm,
        de: &uxb * -c,
        j,
    }
}

/// Everything the MHD stepper needs at one state.
#[derive(Clone, Debug)]
pub(crate) struct MhdEval {
    pub du: SpectralField,
    pub db: SpectralField,
    pub ebar: SpectralField,
    pub linf_u: f64,
    pub linf_b: f64,
}

pub(crate) fn mhd_eval(ctx: &SpectralContext, u: &SpectralField, b: &SpectralField) -> MhdEval {
    let w = curl(u);
    let cb = curl(b);
    let p = ctx.to_physical_many(&[u, &w, b, &cb]);
    let g = u.grid();
    let mut force = PhysicalField::zeros(g);
    let mut uxb = PhysicalField::zeros(g);
    for i in 0..g.len() {
        let uu = p[0].at(i);
        let ww = p[1].at(i);
        let bb = p[2].at(i);
        let jj = p[3].at(i);
        let cr = |a: [f64; 3], b: [f64; 3]| {
            [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        };
        let t1 = cr(ww, uu);
        let t2 = cr(jj, bb);
        let t3 = cr(uu, bb);
        for d in 0..3 {
            force.component_mut(d)[i] = t2[d] - t1[d];
            uxb.component_mut(d)[i] = t3[d];
        }
    }
    let out = ctx.from_physical_many(&[&force, &uxb]);
    let mut it = out.into_iter();
    let du = pd(it.next().expect("force"));
    let uxb = pd(it.next().expect("uxb"));
    let db = curl(&uxb);
    let mut ebar = cb;
    ebar.axpy(-1.0, &uxb);
    MhdEval {
        du,
        db,
        ebar,
        linf_u: physical_linf(&p[0]),
        linf_b: physical_linf(&p[2]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::ops::{inner, random_divfree_field};

    fn setup(n: usize) -> (SpectralContext, EmState) {
        let g = GridSpec::new(n).unwrap();
        let ctx = SpectralContext::new(g);
        let u = random_divfree_field(g, 1, 1.0, 4.0).unwrap();
        let e = random_divfree_field(g, 2, 1.0, 4.0).unwrap();
        let b = random_divfree_field(g, 3, 1.0, 4.0).unwrap();
        (ctx, EmState::new(0.0, 3.0, u, e, b).unwrap())
    }

    #[test]
    fn momentum_form_matches_velocity_form() {
        let (ctx, s) = setup(8);
        let ev = em_eval(&ctx, s.c, Velocity::Direct(&s.u), &s.e, &s.b);
        let t = em_rhs(&ctx, &s);
        // dm = du + (1/c) d/dt P(E×B), with the Maxwell tendencies assembled in full.
        let (le, lb) = em_linear_part(&s);
        let mut de = le;
        de.axpy(1.0, &t.de_forcing);
        let dexb = &(&pd(cross_spectral(&ctx, &de, &s.b)) + &pd(cross_spectral(&ctx, &s.e, &lb)))
            * (1.0 / s.c);
        let expect = &t.du + &dexb;
        let err = crate::ops::l2_norm(&(&expect - &ev.dm)) / crate::ops::l2_norm(&ev.dm);
        assert!(err < 1e-12, "relative mismatch {err}");
        let back = em_eval(&ctx, s.c, Velocity::FromMomentum(&ev.m), &s.e, &s.b);
        assert!(crate::ops::l2_norm(&(&back.u - &s.u)) < 1e-13);
    }

    #[test]
    fn instantaneous_energy_identity() {
        let (ctx, s) = setup(8);
        let t = em_rhs(&ctx, &s);
        let (le, lb) = em_linear_part(&s);
        let de = &le + &t.de_forcing;
        let rate = inner(&t.du, &s.u) + inner(&de, &s.e) + inner(&lb, &s.b);
        let j = ohm_current(&ctx, &s);
        let jj = inner(&j, &j);
        assert!((rate + jj).abs() <= 1e-8 * jj, "{rate} vs {}", -jj);
    }
}
