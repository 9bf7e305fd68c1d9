//! ETD2RK / Lawson-RK4 steppers and run drivers.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::propagator::{apply_block, s_op, PropagatorCache};
use crate::dynamics::{em_eval, mhd_eval, EmEval, EmState, LinState, MhdEval, MhdState, Velocity};
use crate::error::{Error, Result};
use crate::field::{SpectralContext, SpectralField};
use crate::ops::l2_norm;

/// Default cap on the step size.
pub const DEFAULT_DT_MAX: f64 = 1.0 / 512.0;

/// Abort when the realised Courant number exceeds this.
pub const CFL_ABORT: f64 = 2.0;

/// First sub-step of the initial-layer resolution, in units of 1/c².
const LAYER_FIRST_SUBSTEP: f64 = 0.02;

const TRACE_LEN: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Etd2,
    EtdRk4Lawson,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Etd2 => "ETD2",
            Scheme::EtdRk4Lawson => "ETD-RK4-Lawson",
        })
    }
}

impl serde::Serialize for Scheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ETD2" | "ETD2RK" => Ok(Scheme::Etd2),
            "ETD-RK4-LAWSON" | "LAWSON" | "LAWSON4" => Ok(Scheme::EtdRk4Lawson),
            _ => Err(Error::config(
                "scheme",
                format!("`{s}` is not one of ETD2, ETD-RK4-Lawson"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepperConfig {
    pub scheme: Scheme,
    /// Target Courant number. Values above 1 are accepted so that unstable
    /// runs can be requested on purpose; the run aborts past [`CFL_ABORT`].
    pub cfl: f64,
    pub dt_max: f64,
    pub t_end: f64,
    /// Sub-step the first Euler–Maxwell step on a graded grid that resolves
    /// the e^{−c²t} transient.
    pub resolve_initial_layer: bool,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            scheme: Scheme::Etd2,
            cfl: 0.5,
            dt_max: DEFAULT_DT_MAX,
            t_end: 0.5,
            resolve_initial_layer: true,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0) || !self.cfl.is_finite() {
            return Err(Error::config("cfl", format!("{} must be > 0", self.cfl)));
        }
        if !(self.dt_max > 0.0) || !self.dt_max.is_finite() {
            return Err(Error::config("dt_max", format!("{} must be > 0", self.dt_max)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::config("T", format!("{} must be > 0", self.t_end)));
        }
        Ok(())
    }
}

/// States carrying a velocity and a magnetic field.
pub trait FlowState {
    fn velocity(&self) -> &SpectralField;
    fn magnetic(&self) -> &SpectralField;
}

impl FlowState for EmState {
    fn velocity(&self) -> &SpectralField {
        &self.u
    }
    fn magnetic(&self) -> &SpectralField {
        &self.b
    }
}

impl FlowState for MhdState {
    fn velocity(&self) -> &SpectralField {
        &self.u
    }
    fn magnetic(&self) -> &SpectralField {
        &self.b
    }
}

/// dt = min(dt_max, cfl·Δx / max(‖u‖_∞, ‖B‖_∞, 1e−8)).
pub fn choose_dt<S: FlowState>(ctx: &SpectralContext, s: &S, cfg: &StepperConfig) -> f64 {
    let p = ctx.to_physical_many(&[s.velocity(), s.magnetic()]);
    let speed = crate::ops::physical_linf(&p[0])
        .max(crate::ops::physical_linf(&p[1]))
        .max(1e-8);
    cfg.dt_max.min(cfg.cfl * ctx.grid().spacing() / speed)
}

/// Uniform grid on [0, t_end] with step at most `dt`.
pub fn plan_steps(t_end: f64, dt: f64) -> (usize, f64) {
    let n = ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    (n, t_end / n as f64)
}

fn check_cfl(t: f64, h: f64, dx: f64, linf_u: f64, linf_b: f64, trace: &VecDeque<(f64, f64)>) -> Result<()> {
    let nu = h * linf_u.max(linf_b) / dx;
    if !(nu <= CFL_ABORT) {
        return Err(Error::BlowUp {
            t,
            reason: format!("Courant number {nu:.3} exceeds {CFL_ABORT}"),
            trace: trace.iter().copied().collect(),
        });
    }
    Ok(())
}

fn push_trace(trace: &mut VecDeque<(f64, f64)>, t: f64, v: f64) {
    if trace.len() == TRACE_LEN {
        trace.pop_front();
    }
    trace.push_back((t, v));
}

fn blowup(t: f64, what: &str, trace: &VecDeque<(f64, f64)>) -> Error {
    Error::BlowUp {
        t,
        reason: format!("non-finite coefficients in {what}"),
        trace: trace.iter().copied().collect(),
    }
}

/// Σ w·φ_j(hL)(e, b) over the Maxwell block, plus an optional base pair.
struct MTerm<'a> {
    table: &'a [Vec<super::Mat2>],
    j: usize,
    w: f64,
    e: &'a SpectralField,
    b: Option<&'a SpectralField>,
}

fn maxwell_combo(props: &PropagatorCache, terms: &[MTerm<'_>]) -> (SpectralField, SpectralField) {
    let g = terms[0].e.grid();
    let mut eo = SpectralField::zeros(g);
    let mut bo = SpectralField::zeros(g);
    let zero = [Complex64::default(); 3];
    for (idx, &(khat, k2)) in props.modes.entries.iter().enumerate() {
        let mut ea = zero;
        let mut ba = zero;
        for t in terms {
            let ev = t.e.at(idx);
            let bv = t.b.map(|b| b.at(idx)).unwrap_or(zero);
            if ev == zero && bv == zero {
                continue;
            }
            let (e1, b1) = apply_block(&t.table[k2][t.j], khat, ev, bv);
            for d in 0..3 {
                ea[d] += e1[d] * t.w;
                ba[d] += b1[d] * t.w;
            }
        }
        eo.set(idx, ea);
        bo.set(idx, ba);
    }
    (eo, bo)
}

/// Σ w·φ_j(−|k|²h) f over the heat block.
fn heat_combo(props: &PropagatorCache, terms: &[(&[Vec<f64>], usize, f64, &SpectralField)]) -> SpectralField {
    let g = terms[0].3.grid();
    let mut out = SpectralField::zeros(g);
    for (idx, &(_, k2)) in props.modes.entries.iter().enumerate() {
        let mut acc = [Complex64::default(); 3];
        for (table, j, w, f) in terms {
            let s = table[k2][*j] * *w;
            let v = f.at(idx);
            for d in 0..3 {
                acc[d] += v[d] * s;
            }
        }
        out.set(idx, acc);
    }
    out
}

fn lc(terms: &[(f64, &SpectralField)]) -> SpectralField {
    SpectralField::lin_comb(terms)
}

/// Euler–Maxwell integrator stepping (m, E, B) with m = u + (1/c)P(E×B).
pub struct EmIntegrator<'a> {
    ctx: &'a SpectralContext,
    props: &'a PropagatorCache,
    scheme: Scheme,
    c: f64,
    t: f64,
    e: SpectralField,
    b: SpectralField,
    ev: EmEval,
    trace: VecDeque<(f64, f64)>,
}

impl<'a> EmIntegrator<'a> {
    pub fn new(
        ctx: &'a SpectralContext,
        props: &'a PropagatorCache,
        scheme: Scheme,
        s: &EmState,
    ) -> Result<Self> {
        ctx.grid().ensure_same(&s.u.grid())?;
        ctx.grid().ensure_same(&props.modes.grid)?;
        if props.c != Some(s.c) {
            return Err(Error::InvalidArgument(format!(
                "propagators built for c = {:?}, state has c = {}",
                props.c, s.c
            )));
        }
        let ev = em_eval(ctx, s.c, Velocity::Direct(&s.u), &s.e, &s.b);
        let mut me = EmIntegrator {
            ctx,
            props,
            scheme,
            c: s.c,
            t: s.t,
            e: s.e.clone(),
            b: s.b.clone(),
            ev,
            trace: VecDeque::new(),
        };
        me.record()?;
        Ok(me)
    }

    fn record(&mut self) -> Result<()> {
        let v = l2_norm(&self.ev.u) + l2_norm(&self.e) + l2_norm(&self.b);
        push_trace(&mut self.trace, self.t, v);
        if !v.is_finite() || !self.ev.dm.is_finite() || !self.ev.j.is_finite() {
            return Err(blowup(self.t, "Euler-Maxwell state", &self.trace));
        }
        Ok(())
    }

    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn u(&self) -> &SpectralField {
        &self.ev.u
    }
    pub fn e(&self) -> &SpectralField {
        &self.e
    }
    pub fn b(&self) -> &SpectralField {
        &self.b
    }
    /// Ohm current at the current node.
    pub fn j(&self) -> &SpectralField {
        &self.ev.j
    }
    pub fn j_sq(&self) -> f64 {
        l2_norm(&self.ev.j).powi(2)
    }
    pub fn linf(&self) -> (f64, f64) {
        (self.ev.linf_u, self.ev.linf_b)
    }

    pub fn state(&self) -> EmState {
        EmState {
            t: self.t,
            c: self.c,
            u: self.ev.u.clone(),
            e: self.e.clone(),
            b: self.b.clone(),
        }
    }

    fn eval(&self, m: &SpectralField, e: &SpectralField, b: &SpectralField) -> EmEval {
        em_eval(self.ctx, self.c, Velocity::FromMomentum(m), e, b)
    }

    /// One step of size h.
    pub fn advance(&mut self, h: f64) -> Result<()> {
        check_cfl(
            self.t,
            h,
            self.ctx.grid().spacing(),
            self.ev.linf_u,
            self.ev.linf_b,
            &self.trace,
        )?;
        match self.scheme {
            Scheme::Etd2 => self.etd2(h),
            Scheme::EtdRk4Lawson => self.lawson4(h),
        }
        self.t += h;
        self.record()
    }

    fn etd2(&mut self, h: f64) {
        let tab = self.props.telegraph(h);
        let p = &tab.phis;
        let ev0 = &self.ev;
        let m_a = lc(&[(1.0, &ev0.m), (h, &ev0.dm)]);
        let (e_a, b_a) = maxwell_combo(
            self.props,
            &[
                MTerm { table: p, j: 0, w: 1.0, e: &self.e, b: Some(&self.b) },
                MTerm { table: p, j: 1, w: h, e: &ev0.de, b: None },
            ],
        );
        let ev_a = self.eval(&m_a, &e_a, &b_a);
        let m1 = lc(&[(1.0, &m_a), (0.5 * h, &ev_a.dm), (-0.5 * h, &ev0.dm)]);
        let dde = &ev_a.de - &ev0.de;
        let (ec, bc) = maxwell_combo(
            self.props,
            &[MTerm { table: p, j: 2, w: h, e: &dde, b: None }],
        );
        let e1 = &e_a + &ec;
        let b1 = &b_a + &bc;
        self.ev = self.eval(&m1, &e1, &b1);
        self.e = e1;
        self.b = b1;
    }

    fn lawson4(&mut self, h: f64) {
        let full = self.props.telegraph(h);
        let half = self.props.telegraph(0.5 * h);
        let (pf, ph) = (&full.phis, &half.phis);
        let ev0 = self.ev.clone();
        let (m, e, b) = (&ev0.m, &self.e, &self.b);

        let m2 = lc(&[(1.0, m), (0.5 * h, &ev0.dm)]);
        let e_pre = lc(&[(1.0, e), (0.5 * h, &ev0.de)]);
        let (e2, b2) = maxwell_combo(
            self.props,
            &[MTerm { table: ph, j: 0, w: 1.0, e: &e_pre, b: Some(b) }],
        );
        let ev2 = self.eval(&m2, &e2, &b2);

        let m3 = lc(&[(1.0, m), (0.5 * h, &ev2.dm)]);
        let (e3, b3) = maxwell_combo(
            self.props,
            &[MTerm { table: ph, j: 0, w: 1.0, e, b: Some(b) }],
        );
        let e3 = lc(&[(1.0, &e3), (0.5 * h, &ev2.de)]);
        let ev3 = self.eval(&m3, &e3, &b3);

        let m4 = lc(&[(1.0, m), (h, &ev3.dm)]);
        let (e4, b4) = maxwell_combo(
            self.props,
            &[
                MTerm { table: pf, j: 0, w: 1.0, e, b: Some(b) },
                MTerm { table: ph, j: 0, w: h, e: &ev3.de, b: None },
            ],
        );
        let ev4 = self.eval(&m4, &e4, &b4);

        let m1 = lc(&[
            (1.0, m),
            (h / 6.0, &ev0.dm),
            (h / 3.0, &ev2.dm),
            (h / 3.0, &ev3.dm),
            (h / 6.0, &ev4.dm),
        ]);
        let e_pre = lc(&[(1.0, e), (h / 6.0, &ev0.de)]);
        let de23 = &ev2.de + &ev3.de;
        let (e1, b1) = maxwell_combo(
            self.props,
            &[
                MTerm { table: pf, j: 0, w: 1.0, e: &e_pre, b: Some(b) },
                MTerm { table: ph, j: 0, w: h / 3.0, e: &de23, b: None },
            ],
        );
        let e1 = lc(&[(1.0, &e1), (h / 6.0, &ev4.de)]);
        self.ev = self.eval(&m1, &e1, &b1);
        self.e = e1;
        self.b = b1;
    }

    /// Advances one macro step of size h and returns ∫‖j‖² over it.
    ///
    /// While the e^{−c²t} transient still matters for the quadrature the
    /// step is split into equal-size sub-step pairs (graded geometrically in
    /// the very first step) and integrated by composite Simpson; afterwards
    /// a single step with the trapezoid rule is used.
    pub fn advance_macro(&mut self, h: f64, resolve_layer: bool) -> Result<f64> {
        let pairs = if resolve_layer {
            layer_pairs(self.c, h, self.t)
        } else {
            None
        };
        match pairs {
            None => {
                let j0 = self.j_sq();
                self.advance(h)?;
                Ok(0.5 * h * (j0 + self.j_sq()))
            }
            Some(taus) => {
                let mut integral = 0.0;
                for &tau in &taus {
                    let j0 = self.j_sq();
                    self.advance(tau)?;
                    let j1 = self.j_sq();
                    self.advance(tau)?;
                    let j2 = self.j_sq();
                    integral += tau / 3.0 * (j0 + 4.0 * j1 + j2);
                }
                Ok(integral)
            }
        }
    }
}

/// Relative size of the trapezoid error on the layer contribution below
/// which no sub-stepping is done.
const LAYER_QUADRATURE_TOL: f64 = 1e-10;

/// Sub-step pair sizes for the macro step [t, t + h], or `None` when the
/// e^{−2c²t} part of ‖j‖² no longer needs resolving. Pair sizes follow
/// τ(s) = 0.02 e^{c²s/2}/c², capped at h/2, and are rescaled to cover the step.
pub fn layer_pairs(c: f64, h: f64, t: f64) -> Option<Vec<f64>> {
    let c2 = c * c;
    let x = 2.0 * c2 * h;
    if t > 0.0 && (-2.0 * c2 * t).exp() * x * x / 12.0 <= LAYER_QUADRATURE_TOL {
        return None;
    }
    let mut taus = Vec::new();
    let mut covered = 0.0;
    while covered < h {
        let s = t + covered;
        let tau = (LAYER_FIRST_SUBSTEP / c2 * (0.5 * c2 * s).min(700.0).exp()).min(0.5 * h);
        taus.push(tau);
        covered += 2.0 * tau;
    }
    let scale = h / covered;
    taus.iter_mut().for_each(|tau| *tau *= scale);
    Some(taus)
}

/// MHD integrator: exact heat factor on B̄, ETD2RK (Heun on ū).
pub struct MhdIntegrator<'a> {
    ctx: &'a SpectralContext,
    props: &'a PropagatorCache,
    scheme: Scheme,
    t: f64,
    u: SpectralField,
    b: SpectralField,
    ev: MhdEval,
    trace: VecDeque<(f64, f64)>,
}

impl<'a> MhdIntegrator<'a> {
    pub fn new(
        ctx: &'a SpectralContext,
        props: &'a PropagatorCache,
        scheme: Scheme,
        s: &MhdState,
    ) -> Result<Self> {
        ctx.grid().ensure_same(&s.u.grid())?;
        ctx.grid().ensure_same(&props.modes.grid)?;
        let ev = mhd_eval(ctx, &s.u, &s.b);
        let mut me = MhdIntegrator {
            ctx,
            props,
            scheme,
            t: s.t,
            u: s.u.clone(),
            b: s.b.clone(),
            ev,
            trace: VecDeque::new(),
        };
        me.record()?;
        Ok(me)
    }

    fn record(&mut self) -> Result<()> {
        let v = l2_norm(&self.u) + l2_norm(&self.b);
        push_trace(&mut self.trace, self.t, v);
        if !v.is_finite() || !self.ev.du.is_finite() {
            return Err(blowup(self.t, "MHD state", &self.trace));
        }
        Ok(())
    }

    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn u(&self) -> &SpectralField {
        &self.u
    }
    pub fn b(&self) -> &SpectralField {
        &self.b
    }
    /// Ē at the current node.
    pub fn ebar(&self) -> &SpectralField {
        &self.ev.ebar
    }
    pub fn linf(&self) -> (f64, f64) {
        (self.ev.linf_u, self.ev.linf_b)
    }

    pub fn state(&self) -> MhdState {
        MhdState {
            t: self.t,
            u: self.u.clone(),
            b: self.b.clone(),
        }
    }

    pub fn advance(&mut self, h: f64) -> Result<()> {
        check_cfl(
            self.t,
            h,
            self.ctx.grid().spacing(),
            self.ev.linf_u,
            self.ev.linf_b,
            &self.trace,
        )?;
        match self.scheme {
            Scheme::Etd2 => self.etd2(h),
            Scheme::EtdRk4Lawson => self.lawson4(h),
        }
        self.t += h;
        self.record()
    }

    fn etd2(&mut self, h: f64) {
        let tab = self.props.heat_table(h);
        let p = &tab.phis[..];
        let ev0 = &self.ev;
        let u_a = lc(&[(1.0, &self.u), (h, &ev0.du)]);
        let b_a = heat_combo(self.props, &[(p, 0, 1.0, &self.b), (p, 1, h, &ev0.db)]);
        let ev_a = mhd_eval(self.ctx, &u_a, &b_a);
        let u1 = lc(&[(1.0, &u_a), (0.5 * h, &ev_a.du), (-0.5 * h, &ev0.du)]);
        let ddb = &ev_a.db - &ev0.db;
        let b1 = &b_a + &heat_combo(self.props, &[(p, 2, h, &ddb)]);
        self.ev = mhd_eval(self.ctx, &u1, &b1);
        self.u = u1;
        self.b = b1;
    }

    fn lawson4(&mut self, h: f64) {
        let full = self.props.heat_table(h);
        let half = self.props.heat_table(0.5 * h);
        let (pf, ph) = (&full.phis[..], &half.phis[..]);
        let ev0 = self.ev.clone();
        let (u, b) = (&self.u, &self.b);

        let u2 = lc(&[(1.0, u), (0.5 * h, &ev0.du)]);
        let b2 = heat_combo(self.props, &[(ph, 0, 1.0, b), (ph, 0, 0.5 * h, &ev0.db)]);
        let ev2 = mhd_eval(self.ctx, &u2, &b2);
        let u3 = lc(&[(1.0, u), (0.5 * h, &ev2.du)]);
        let b3 = lc(&[(1.0, &heat_combo(self.props, &[(ph, 0, 1.0, b)])), (0.5 * h, &ev2.db)]);
        let ev3 = mhd_eval(self.ctx, &u3, &b3);
        let u4 = lc(&[(1.0, u), (h, &ev3.du)]);
        let b4 = heat_combo(self.props, &[(pf, 0, 1.0, b), (ph, 0, h, &ev3.db)]);
        let ev4 = mhd_eval(self.ctx, &u4, &b4);

        let u1 = lc(&[
            (1.0, u),
            (h / 6.0, &ev0.du),
            (h / 3.0, &ev2.du),
            (h / 3.0, &ev3.du),
            (h / 6.0, &ev4.du),
        ]);
        let db23 = &ev2.db + &ev3.db;
        let b1 = heat_combo(
            self.props,
            &[(pf, 0, 1.0, b), (pf, 0, h / 6.0, &ev0.db), (ph, 0, h / 3.0, &db23)],
        );
        let b1 = lc(&[(1.0, &b1), (h / 6.0, &ev4.db)]);
        self.ev = mhd_eval(self.ctx, &u1, &b1);
        self.u = u1;
        self.b = b1;
    }
}

/// Monomial weights: row i gives the coefficient of θ^i in the interpolant
/// through (θ_j, y_j) as Σ_j w[i][j] y_j.
pub fn interpolation_weights(nodes: &[f64]) -> Vec<Vec<f64>> {
    let m = nodes.len();
    let mut w = vec![vec![0.0; m]; m];
    for (j, &tj) in nodes.iter().enumerate() {
        // Lagrange basis ℓ_j(θ) = Π_{i≠j} (θ − t_i)/(t_j − t_i), expanded.
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for (i, &ti) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![0.0; poly.len() + 1];
            for (d, &p) in poly.iter().enumerate() {
                next[d + 1] += p;
                next[d] -= ti * p;
            }
            poly = next;
            denom *= tj - ti;
        }
        for (d, p) in poly.iter().enumerate() {
            w[d][j] = p / denom;
        }
    }
    w
}

/// Exact integrator for the linear system driven by a polynomial-in-time Ē.
pub struct LinIntegrator<'a> {
    props: &'a PropagatorCache,
    c: f64,
    t: f64,
    e: SpectralField,
    b: SpectralField,
}

impl<'a> LinIntegrator<'a> {
    pub fn new(props: &'a PropagatorCache, s: &LinState) -> Result<Self> {
        props.modes.grid.ensure_same(&s.e.grid())?;
        if props.c != Some(s.c) {
            return Err(Error::InvalidArgument(format!(
                "propagators built for c = {:?}, state has c = {}",
                props.c, s.c
            )));
        }
        Ok(LinIntegrator {
            props,
            c: s.c,
            t: s.t,
            e: s.e.clone(),
            b: s.b.clone(),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn e(&self) -> &SpectralField {
        &self.e
    }
    pub fn b(&self) -> &SpectralField {
        &self.b
    }
    pub fn state(&self) -> LinState {
        LinState {
            t: self.t,
            c: self.c,
            e: self.e.clone(),
            b: self.b.clone(),
        }
    }

    /// Advances by h with Ē(t + θh) given by the interpolant through the
    /// samples `(θ_j, Ē_j)` (at most four). Exact for polynomial Ē.
    pub fn advance(&mut self, h: f64, samples: &[(f64, &SpectralField)]) -> Result<()> {
        if samples.is_empty() || samples.len() > 4 {
            return Err(Error::InvalidArgument(format!(
                "linear step needs 1 to 4 forcing samples, got {}",
                samples.len()
            )));
        }
        let tab = self.props.telegraph(h);
        let nodes: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let w = interpolation_weights(&nodes);
        // ∫₀ʰ e^{(h−s)L} (s/h)^i ds = h·i!·φ_{i+1}(hL)
        let fact = [1.0, 1.0, 2.0, 6.0];
        let c = self.c;
        let zero = [Complex64::default(); 3];
        let mut e_new = SpectralField::zeros(self.e.grid());
        let mut b_new = SpectralField::zeros(self.e.grid());
        for (idx, &(khat, k2)) in self.props.modes.entries.iter().enumerate() {
            let phis = &tab.phis[k2];
            let (mut ea, mut ba) = apply_block(&phis[0], khat, self.e.at(idx), self.b.at(idx));
            let kappa = (k2 as f64).sqrt();
            for (i, wi) in w.iter().enumerate() {
                let mut a = zero;
                for (j, (_, f)) in samples.iter().enumerate() {
                    let v = f.at(idx);
                    for d in 0..3 {
                        a[d] += v[d] * wi[j];
                    }
                }
                if a == zero {
                    continue;
                }
                // forcing (cĒ, i k×Ē) = (c a, κ s a)
                let sa = s_op(khat, a);
                let fe = [a[0] * c, a[1] * c, a[2] * c];
                let fb = [sa[0] * kappa, sa[1] * kappa, sa[2] * kappa];
                let (de, db) = apply_block(&phis[i + 1], khat, fe, fb);
                let s = h * fact[i];
                for d in 0..3 {
                    ea[d] += de[d] * s;
                    ba[d] += db[d] * s;
                }
            }
            e_new.set(idx, ea);
            b_new.set(idx, ba);
        }
        if !e_new.is_finite() || !b_new.is_finite() {
            let trace = VecDeque::from(vec![(self.t, l2_norm(&self.e) + l2_norm(&self.b))]);
            return Err(blowup(self.t + h, "linear state", &trace));
        }
        self.e = e_new;
        self.b = b_new;
        self.t += h;
        Ok(())
    }
}

/// One Euler–Maxwell step of size dt (no layer sub-stepping).
pub fn step_em(
    ctx: &SpectralContext,
    s: &EmState,
    dt: f64,
    cfg: &StepperConfig,
    props: &PropagatorCache,
) -> Result<EmState> {
    let mut it = EmIntegrator::new(ctx, props, cfg.scheme, s)?;
    it.advance(dt)?;
    Ok(it.state())
}

/// One MHD step of size dt.
pub fn step_mhd(
    ctx: &SpectralContext,
    s: &MhdState,
    dt: f64,
    cfg: &StepperConfig,
    props: &PropagatorCache,
) -> Result<MhdState> {
    let mut it = MhdIntegrator::new(ctx, props, cfg.scheme, s)?;
    it.advance(dt)?;
    Ok(it.state())
}

/// One step of the linear system; see [`LinIntegrator::advance`].
pub fn step_linear(
    s: &LinState,
    ebar_samples: &[(f64, &SpectralField)],
    dt: f64,
    props: &PropagatorCache,
) -> Result<LinState> {
    let mut it = LinIntegrator::new(props, s)?;
    it.advance(dt, ebar_samples)?;
    Ok(it.state())
}

/// Runs Euler–Maxwell for `nsteps` steps of size dt. The observer sees every
/// node, together with ∫‖j‖² over the interval just completed (zero at the
/// first node); see [`EmIntegrator::advance_macro`].
pub fn run_em<F>(
    ctx: &SpectralContext,
    props: &PropagatorCache,
    init: &EmState,
    cfg: &StepperConfig,
    dt: f64,
    nsteps: usize,
    mut observe: F,
) -> Result<EmState>
where
    F: FnMut(usize, &EmIntegrator<'_>, f64) -> Result<()>,
{
    let mut it = EmIntegrator::new(ctx, props, cfg.scheme, init)?;
    observe(0, &it, 0.0)?;
    for i in 1..=nsteps {
        let inc = it.advance_macro(dt, cfg.resolve_initial_layer)?;
        observe(i, &it, inc)?;
    }
    Ok(it.state())
}

/// Runs MHD for `nsteps` steps of size dt, observing every node.
pub fn run_mhd<F>(
    ctx: &SpectralContext,
    props: &PropagatorCache,
    init: &MhdState,
    cfg: &StepperConfig,
    dt: f64,
    nsteps: usize,
    mut observe: F,
) -> Result<MhdState>
where
    F: FnMut(usize, &MhdIntegrator<'_>) -> Result<()>,
{
    let mut it = MhdIntegrator::new(ctx, props, cfg.scheme, init)?;
    observe(0, &it)?;
    for i in 1..=nsteps {
        it.advance(dt)?;
        observe(i, &it)?;
    }
    Ok(it.state())
}

/// Stencil of up to four sample indices around step i → i+1, as offsets
/// θ relative to node i: interior steps use {i−1, i, i+1, i+2}.
pub fn forcing_stencil(i: usize, nsteps: usize) -> Vec<usize> {
    let last = nsteps; // nodes 0..=nsteps
    let width = 4.min(last + 1);
    let mut start = i.saturating_sub(1);
    if start + width > last + 1 {
        start = last + 1 - width;
    }
    (start..start + width).collect()
}

/// Runs the linear system with Ē sampled at the nodes of the same uniform
/// grid, interpolated by local cubics.
pub fn run_linear<F>(
    props: &PropagatorCache,
    init: &LinState,
    ebar_nodes: &[SpectralField],
    dt: f64,
    mut observe: F,
) -> Result<LinState>
where
    F: FnMut(usize, &LinIntegrator<'_>) -> Result<()>,
{
    let nsteps = ebar_nodes.len().saturating_sub(1);
    let mut it = LinIntegrator::new(props, init)?;
    observe(0, &it)?;
    for i in 0..nsteps {
        let stencil = forcing_stencil(i, nsteps);
        let samples: Vec<(f64, &SpectralField)> = stencil
            .iter()
            .map(|&j| (j as f64 - i as f64, &ebar_nodes[j]))
            .collect();
        it.advance(dt, &samples)?;
        observe(i + 1, &it)?;
    }
    Ok(it.state())
}
