//! c-sweeps over families of initial data: each run advances Euler–Maxwell
//! and the auxiliary linear system in lockstep against a shared MHD
//! trajectory, records every comparison norm, and the sweep fits log–log
//! rates in c and classifies them.

pub mod cache;
pub mod rates;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

pub use cache::MhdCache;
pub use rates::{fit_rate, RateFit, Verdict, VERDICT_THRESHOLD};

use crate::diagnostics::{
    boundary_layer_norm, em_audit_sample, energy_audit, epsilon0, EnergyLedger, InitialGap,
    LayeredSeries, NormSeries,
};
use crate::dynamics::{compute_ebar, EmState, LinState, MhdState};
use crate::error::{Error, Result};
use crate::field::{SpectralContext, SpectralField};
use crate::grid::GridSpec;
use crate::ops::{curl, grad_norm, l2_norm, random_divfree_field, sobolev_norm};
use crate::timestepping::stepper::forcing_stencil;
use crate::timestepping::{
    choose_dt, plan_steps, run_em, LinIntegrator, PropagatorCache, Scheme, StepperConfig,
};

/// Smallest admissible c.
pub const C0: f64 = 1.0;
pub const DEFAULT_AMPLITUDE: f64 = 1.0;
pub const DEFAULT_DECAY: f64 = 6.0;

/// How the Euler–Maxwell data depend on c.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum FamilyKind {
    /// E₀ᶜ = e₀, independent of c.
    FixedE,
    /// E₀ᶜ = Ē(0)/c + c^{β−1} e₀, so that cE₀ᶜ − Ē(0) = c^β e₀.
    DecayingE { beta: f64 },
    /// E₀ᶜ = Ē(0)/c.
    WellPrepared,
    /// u₀ᶜ = u₀ + c^{−α} δu and E₀ᶜ = Ē(0)/c.
    PerturbedFluid { alpha: f64 },
}

impl FamilyKind {
    /// Inverse of the `Display` label of [`Family`].
    pub fn from_label(label: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown family label `{label}`"));
        let param = |name: &str| -> Result<f64> {
            label
                .get(3..)
                .and_then(|r| r.strip_prefix(name))
                .and_then(|r| r.strip_prefix('='))
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|v| v.parse().ok())
                .ok_or_else(bad)
        };
        match label.get(..2) {
            Some("F1") if label.len() == 2 => Ok(FamilyKind::FixedE),
            Some("F3") if label.len() == 2 => Ok(FamilyKind::WellPrepared),
            Some("F2") => Ok(FamilyKind::DecayingE { beta: param("beta")? }),
            Some("F4") => Ok(FamilyKind::PerturbedFluid { alpha: param("alpha")? }),
            _ => Err(bad()),
        }
    }
}

/// A family of initial data, built from seeded random solenoidal fields
/// with |f̂(k)| = amplitude (1+|k|²)^{−decay/2}: u₀ from `seed`, B₀ from
/// `seed + 1`, e₀ from `seed + 2` and δu from `seed + 3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Family {
    pub kind: FamilyKind,
    pub seed: u64,
    pub amplitude: f64,
    pub decay: f64,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::FixedE => write!(f, "F1"),
            FamilyKind::DecayingE { beta } => write!(f, "F2(beta={beta})"),
            FamilyKind::WellPrepared => write!(f, "F3"),
            FamilyKind::PerturbedFluid { alpha } => write!(f, "F4(alpha={alpha})"),
        }
    }
}

impl Family {
    pub fn new(kind: FamilyKind, seed: u64) -> Self {
        Family {
            kind,
            seed,
            amplitude: DEFAULT_AMPLITUDE,
            decay: DEFAULT_DECAY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            FamilyKind::DecayingE { beta } if !(0.0..1.0).contains(&beta) => {
                return Err(Error::config("beta", format!("{beta} must lie in [0, 1)")))
            }
            FamilyKind::PerturbedFluid { alpha } if !(alpha > 0.0) || !alpha.is_finite() => {
                return Err(Error::config("alpha", format!("{alpha} must be > 0")))
            }
            _ => {}
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::config("amplitude", format!("{} must be >= 0", self.amplitude)));
        }
        if !(self.decay > 3.5) || !self.decay.is_finite() {
            return Err(Error::config("decay", format!("{} must exceed 3.5", self.decay)));
        }
        Ok(())
    }

    fn field(&self, grid: GridSpec, offset: u64) -> Result<SpectralField> {
        random_divfree_field(grid, self.seed.wrapping_add(offset), self.amplitude, self.decay)
    }

    /// (u₀, B₀), shared by every c.
    pub fn mhd_initial(&self, grid: GridSpec) -> Result<MhdState> {
        MhdState::new(0.0, self.field(grid, 0)?, self.field(grid, 1)?)
    }

    pub fn em_initial(&self, ctx: &SpectralContext, mhd: &MhdState, c: f64) -> Result<EmState> {
        let grid = ctx.grid();
        let ebar0 = compute_ebar(ctx, mhd);
        let mut u = mhd.u.clone();
        let e = match self.kind {
            FamilyKind::FixedE => self.field(grid, 2)?,
            FamilyKind::DecayingE { beta } => {
                let mut e = &ebar0 * (1.0 / c);
                e.axpy(c.powf(beta - 1.0), &self.field(grid, 2)?);
                e
            }
            FamilyKind::WellPrepared => &ebar0 * (1.0 / c),
            FamilyKind::PerturbedFluid { alpha } => {
                u.axpy(c.powf(-alpha), &self.field(grid, 3)?);
                &ebar0 * (1.0 / c)
            }
        };
        EmState::new(0.0, c, u, e, mhd.b.clone())
    }

    /// Exponent q with ℰ₀ᶜ ~ c^q.
    pub fn gap_exponent(&self) -> f64 {
        match self.kind {
            FamilyKind::FixedE => -1.0,
            FamilyKind::DecayingE { beta } => beta - 2.0,
            FamilyKind::WellPrepared => -2.0,
            FamilyKind::PerturbedFluid { alpha } => -alpha.min(2.0),
        }
    }

    /// Exponent of ‖cEᶜ − Ē‖_{L^p(0,T;L²)} in c: that of the initial layer
    /// c^γ e^{−c²t}, i.e. γ − 2/p, where it is known.
    pub fn layer_exponent(&self, p: f64) -> Option<f64> {
        let two_over_p = if p.is_infinite() { 0.0 } else { 2.0 / p };
        match self.kind {
            FamilyKind::FixedE => Some(1.0 - two_over_p),
            FamilyKind::DecayingE { beta } => Some(beta - two_over_p),
            FamilyKind::WellPrepared => Some(-2.0 + (1.0 - two_over_p).max(0.0)),
            FamilyKind::PerturbedFluid { .. } => None,
        }
    }
}

/// Plan for one family over several values of c.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPlan {
    pub family: Family,
    pub cs: Vec<f64>,
    pub ps: Vec<f64>,
    pub ss: Vec<f64>,
    pub n: usize,
    pub t_end: f64,
    pub cfl: f64,
    pub dt_max: f64,
    pub scheme: Scheme,
    pub t_star: f64,
}

impl SweepPlan {
    pub fn new(family: Family, cs: Vec<f64>) -> Self {
        SweepPlan {
            family,
            cs,
            ps: vec![1.0, 2.0, 4.0, f64::INFINITY],
            ss: vec![0.0, 1.0],
            n: 32,
            t_end: 0.5,
            cfl: 0.5,
            dt_max: crate::timestepping::stepper::DEFAULT_DT_MAX,
            scheme: Scheme::Etd2,
            t_star: 0.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        GridSpec::new(self.n)?;
        if self.cs.len() < 3 {
            return Err(Error::config("c", "need at least 3 values"));
        }
        if self.cs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("c", "values must be strictly increasing"));
        }
        if let Some(c) = self.cs.iter().find(|&&c| !(c >= C0) || !c.is_finite()) {
            return Err(Error::config("c", format!("{c} is below c0 = {C0}")));
        }
        if self.ps.is_empty() || self.ps.iter().any(|&p| !(p >= 1.0)) {
            return Err(Error::config("p", "values must be >= 1 (or inf)"));
        }
        if self.ss.iter().any(|&s| !(s >= 0.0) || !s.is_finite()) {
            return Err(Error::config("s", "values must be finite and >= 0"));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::config("T", format!("{} must be > 0", self.t_end)));
        }
        if !(self.t_star > 0.0 && self.t_star <= self.t_end) {
            return Err(Error::config("t_star", format!("{} must lie in (0, T]", self.t_star)));
        }
        self.stepper_config().validate()
    }

    pub fn stepper_config(&self) -> StepperConfig {
        StepperConfig {
            scheme: self.scheme,
            cfl: self.cfl,
            dt_max: self.dt_max,
            t_end: self.t_end,
            resolve_initial_layer: true,
        }
    }
}

/// Everything recorded for one value of c.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub family: String,
    pub c: f64,
    pub dt: f64,
    pub nsteps: usize,
    pub gap: InitialGap,
    /// ‖cE₀ᶜ − Ē(0)‖_{L²}
    pub layer_amplitude: f64,
    /// ‖E₀ᶜ‖_{L²}
    pub e0_norm: f64,
    pub series: BTreeMap<String, NormSeries>,
    pub layered: BTreeMap<String, LayeredSeries>,
    pub ledger: EnergyLedger,
    /// ∫₀^{t_i} ‖j̄‖²
    pub mhd_dissipation: Vec<f64>,
    pub t_star_index: usize,
}

pub const Q_UB: &str = "uB_diff";
pub const Q_E_NORM: &str = "E_norm";
pub const Q_CE: &str = "cE_minus_Ebar";
pub const Q_J: &str = "j_minus_jbar";
pub const Q_CEL: &str = "cEL_minus_Ebar";
pub const Q_BL: &str = "BL";
pub const Q_GRAD_BL: &str = "grad_BL";
pub const Q_ERR_SUM: &str = "error_sum";
pub const Q_E_TILDE: &str = "E_tilde";
pub const Q_BL_BOUND: &str = "BL_bound";
pub const Q_ERROR_PARTS: &str = "error_parts";
pub const Q_E_SQ_TSTAR: &str = "E_sq_at_tstar";
pub const Q_JUMP_GAP: &str = "energy_jump_gap";
pub const Q_EPS0: &str = "epsilon0";
pub const Q_RESIDUAL: &str = "energy_residual";

/// Name of the layer-subtracted companion of a layered quantity.
pub fn remainder_name(q: &str) -> String {
    format!("{q}_remainder")
}

/// Name of the H^s version of ‖(uᶜ, Bᶜ) − (ū, B̄)‖.
pub fn ub_name(s: f64) -> String {
    format!("{Q_UB}_H{s}")
}

impl RunResult {
    fn series(&self, name: &str) -> Result<&NormSeries> {
        self.series
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no series `{name}`")))
    }

    fn layered(&self, name: &str) -> Result<&LayeredSeries> {
        self.layered
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no series `{name}`")))
    }

    /// ‖Eᶜ(t*)‖².
    pub fn e_sq_at_t_star(&self) -> Result<f64> {
        Ok(self.series(Q_E_NORM)?.values[self.t_star_index].powi(2))
    }

    /// |∫₀^{t*}‖jᶜ‖² − ½‖E₀ᶜ‖² − ∫₀^{t*}‖j̄‖²|.
    pub fn energy_jump_gap(&self) -> f64 {
        let i = self.t_star_index;
        (self.ledger.dissipation[i] - 0.5 * self.e0_norm * self.e0_norm - self.mhd_dissipation[i]).abs()
    }

    /// sup‖B_L‖ + ‖∇B_L‖_{L²(0,T;L²)}.
    pub fn bl_bound(&self) -> Result<f64> {
        Ok(self.series(Q_BL)?.max() + self.series(Q_GRAD_BL)?.lp_norm(2.0)?)
    }

    /// sup(‖ũ‖ + ‖Ẽ‖ + ‖B̃‖) + c‖Ẽ‖_{L²(0,T;L²)}.
    pub fn error_parts(&self) -> Result<f64> {
        Ok(self.series(Q_ERR_SUM)?.max() + self.c * self.series(Q_E_TILDE)?.lp_norm(2.0)?)
    }

    /// Every scalar of this run, as (quantity, p, value).
    pub fn quantities(&self, ps: &[f64], ss: &[f64]) -> Result<Vec<(String, Option<f64>, f64)>> {
        let mut out = Vec::new();
        for &p in ps {
            for &s in ss {
                let name = ub_name(s);
                out.push((name.clone(), Some(p), self.series(&name)?.lp_norm(p)?));
            }
            for q in [Q_CE, Q_J, Q_CEL] {
                let l = self.layered(q)?;
                out.push((q.to_string(), Some(p), l.lp_norm(p)?));
                out.push((remainder_name(q), Some(p), l.remainder().lp_norm(p)?));
            }
        }
        out.push((Q_BL_BOUND.into(), None, self.bl_bound()?));
        out.push((Q_ERROR_PARTS.into(), None, self.error_parts()?));
        out.push((Q_E_SQ_TSTAR.into(), None, self.e_sq_at_t_star()?));
        out.push((Q_JUMP_GAP.into(), None, self.energy_jump_gap()));
        out.push((Q_EPS0.into(), None, self.gap.epsilon0));
        out.push((Q_RESIDUAL.into(), None, self.ledger.max_relative_residual()));
        Ok(out)
    }
}

/// Shared state of a sweep: the plan, the time grid and the MHD cache.
#[derive(Debug)]
pub struct TripletRunner {
    pub plan: SweepPlan,
    pub ctx: SpectralContext,
    pub dt: f64,
    pub nsteps: usize,
    pub cache: MhdCache,
}

impl TripletRunner {
    /// Validates the plan, fixes dt from the MHD data (so it is the same for
    /// every c) and runs MHD once.
    pub fn new(plan: SweepPlan) -> Result<Self> {
        plan.validate()?;
        let grid = GridSpec::new(plan.n)?;
        let ctx = SpectralContext::new(grid);
        let mhd0 = plan.family.mhd_initial(grid)?;
        let cfg = plan.stepper_config();
        let (nsteps, dt) = plan_steps(plan.t_end, choose_dt(&ctx, &mhd0, &cfg));
        let cache = MhdCache::build(&ctx, &mhd0, &cfg, dt, nsteps)?;
        Ok(TripletRunner {
            plan,
            ctx,
            dt,
            nsteps,
            cache,
        })
    }

    pub fn run(&self, c: f64) -> Result<RunResult> {
        run_triplet(self, c)
    }
}

/// Small cache of unpacked Ē snapshots for the linear forcing stencil.
struct EbarWindow<'a> {
    cache: &'a MhdCache,
    slots: VecDeque<(usize, SpectralField)>,
}

impl EbarWindow<'_> {
    fn get(&mut self, i: usize) -> SpectralField {
        if let Some((_, f)) = self.slots.iter().find(|(j, _)| *j == i) {
            return f.clone();
        }
        let f = self.cache.ebar(i);
        if self.slots.len() == 6 {
            self.slots.pop_front();
        }
        self.slots.push_back((i, f.clone()));
        f
    }
}

/// Euler–Maxwell and the linear system at one c, measured against the
/// cached MHD trajectory at every node.
pub fn run_triplet(runner: &TripletRunner, c: f64) -> Result<RunResult> {
    let plan = &runner.plan;
    let ctx = &runner.ctx;
    let cache = &runner.cache;
    let (dt, nsteps) = (runner.dt, runner.nsteps);
    let grid = ctx.grid();
    let mhd0 = cache.state(0);
    let init = plan.family.em_initial(ctx, &mhd0, c)?;
    let gap = epsilon0(ctx, &init, &mhd0)?;
    let mut layer = &init.e * c;
    layer.axpy(-1.0, &cache.ebar(0));
    let a2 = l2_norm(&layer).powi(2);
    let rate = c * c;

    let props = PropagatorCache::maxwell(grid, c, 4);
    let mut lin = LinIntegrator::new(&props, &LinState::initial(c, &init.e))?;
    let mut window = EbarWindow {
        cache,
        slots: VecDeque::new(),
    };
    let mut series: BTreeMap<String, NormSeries> = BTreeMap::new();
    let mut names: Vec<String> = plan.ss.iter().map(|&s| ub_name(s)).collect();
    names.extend(
        [Q_E_NORM, Q_BL, Q_GRAD_BL, Q_ERR_SUM, Q_E_TILDE]
            .iter()
            .map(|s| s.to_string()),
    );
    for name in names {
        series.insert(name.clone(), NormSeries::new(name));
    }
    let mut layered: BTreeMap<String, LayeredSeries> = [Q_CE, Q_J, Q_CEL]
        .iter()
        .map(|q| (q.to_string(), LayeredSeries::new(*q, rate, a2)))
        .collect();
    let mut audit = Vec::with_capacity(nsteps + 1);
    let cfg = plan.stepper_config();

    run_em(ctx, &props, &init, &cfg, dt, nsteps, |i, it, inc| {
        if i > 0 {
            let stencil = forcing_stencil(i - 1, nsteps);
            let fields: Vec<SpectralField> = stencil.iter().map(|&j| window.get(j)).collect();
            let samples: Vec<(f64, &SpectralField)> = stencil
                .iter()
                .zip(&fields)
                .map(|(&j, f)| (j as f64 - (i - 1) as f64, f))
                .collect();
            lin.advance(dt, &samples)?;
        }
        let t = cache.time(i);
        let (u, e, b) = (it.u(), it.e(), it.b());
        let ubar = cache.u(i);
        let bbar = cache.b(i);
        let ebar = window.get(i);
        let du = u - &ubar;
        let db = b - &bbar;
        for &s in &plan.ss {
            let v = (sobolev_norm(&du, s)?.powi(2) + sobolev_norm(&db, s)?.powi(2)).sqrt();
            series.get_mut(&ub_name(s)).expect("series").push(t, v)?;
        }
        let push = |series: &mut BTreeMap<String, NormSeries>, q: &str, v: f64| {
            series.get_mut(q).expect("series").push(t, v)
        };
        push(&mut series, Q_E_NORM, l2_norm(e))?;
        push(&mut series, Q_BL, l2_norm(lin.b()))?;
        push(&mut series, Q_GRAD_BL, grad_norm(lin.b()))?;
        let e_tilde = e - lin.e();
        let mut b_tilde = db.clone();
        b_tilde.axpy(-1.0, lin.b());
        let e_tilde_norm = l2_norm(&e_tilde);
        push(&mut series, Q_ERR_SUM, l2_norm(&du) + e_tilde_norm + l2_norm(&b_tilde))?;
        push(&mut series, Q_E_TILDE, e_tilde_norm)?;

        let mut x = e * c;
        x.axpy(-1.0, &ebar);
        layered.get_mut(Q_CE).expect("series").push_fields(t, &x, &layer)?;
        let mut x = it.j().clone();
        x.axpy(-1.0, &curl(&bbar));
        layered.get_mut(Q_J).expect("series").push_fields(t, &x, &layer)?;
        let mut x = lin.e() * c;
        x.axpy(-1.0, &ebar);
        layered.get_mut(Q_CEL).expect("series").push_fields(t, &x, &layer)?;

        let state = EmState {
            t,
            c,
            u: u.clone(),
            e: e.clone(),
            b: b.clone(),
        };
        audit.push(em_audit_sample(&state, it.j_sq(), (i > 0).then_some(inc)));
        Ok(())
    })
    .map_err(|err| match err {
        Error::BlowUp { t, reason, trace } => Error::BlowUp {
            t,
            reason: format!("{} at c = {c}: {reason}", plan.family),
            trace,
        },
        other => other,
    })?;

    let t_star_index = ((plan.t_star / dt).round() as usize).min(nsteps);
    Ok(RunResult {
        family: plan.family.to_string(),
        c,
        dt,
        nsteps,
        gap,
        layer_amplitude: a2.sqrt(),
        e0_norm: l2_norm(&init.e),
        series,
        layered,
        ledger: energy_audit(&audit)?,
        mhd_dissipation: cache.ledger.dissipation.clone(),
        t_star_index,
    })
}

/// One measured scalar.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub c: f64,
    pub p: Option<f64>,
    pub quantity: String,
    pub value: f64,
}

/// One fitted rate with its prediction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub family: String,
    pub quantity: String,
    pub p: Option<f64>,
    pub slope: f64,
    pub stderr: f64,
    pub r2: f64,
    pub predicted: Option<f64>,
    pub verdict: Verdict,
    pub matched: Option<bool>,
}

/// Completed sweep for one family.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub plan: SweepPlan,
    pub dt: f64,
    pub nsteps: usize,
    pub results: Vec<RunResult>,
    /// ‖∂tĒ‖_{L∞(0,T;L²)} and ‖∂tĒ‖_{L²(0,T;H¹)}
    pub dt_ebar: (f64, f64),
    pub mhd_ledger: EnergyLedger,
}

pub fn run_sweep(plan: &SweepPlan) -> Result<Sweep> {
    let runner = TripletRunner::new(plan.clone())?;
    let results = plan
        .cs
        .par_iter()
        .map(|&c| runner.run(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep {
        plan: plan.clone(),
        dt: runner.dt,
        nsteps: runner.nsteps,
        results,
        dt_ebar: (runner.cache.dt_ebar.linf_l2, runner.cache.dt_ebar.l2_h1),
        mhd_ledger: runner.cache.ledger.clone(),
    })
}

/// Predicted exponent in c of a quantity for a family, where one is claimed.
pub fn predicted_exponent(kind: FamilyKind, quantity: &str, p: Option<f64>) -> Option<f64> {
    let fam = Family::new(kind, 0);
    match (quantity, p) {
        (Q_CE | Q_J, Some(p)) => fam.layer_exponent(p),
        (Q_CEL, Some(p)) if kind == FamilyKind::FixedE => fam.layer_exponent(p),
        (q, Some(_)) if q == ub_name(0.0) => Some(fam.gap_exponent()),
        (Q_BL_BOUND | Q_ERROR_PARTS | Q_EPS0, None) => Some(fam.gap_exponent()),
        _ => None,
    }
}

/// Fits every (family, quantity, p) group of rows, in row order. Groups with
/// fewer than three positive values are skipped with a warning.
pub fn fit_rows(rows: &[SweepRow]) -> Vec<RateRow> {
    type Key<'a> = (&'a str, &'a str, Option<f64>);
    let mut groups: Vec<(Key, Vec<(f64, f64)>)> = Vec::new();
    for r in rows {
        let key = (r.family.as_str(), r.quantity.as_str(), r.p);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push((r.c, r.value)),
            None => groups.push((key, vec![(r.c, r.value)])),
        }
    }
    let mut out = Vec::new();
    for ((family, quantity, p), pts) in groups {
        if quantity == Q_RESIDUAL {
            continue;
        }
        let fit = match fit_rate(format!("{family} {quantity} p={}", fmt_p(p)), &pts) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("{e}");
                continue;
            }
        };
        let predicted = FamilyKind::from_label(family)
            .ok()
            .and_then(|k| predicted_exponent(k, quantity, p));
        let verdict = Verdict::from_slope(fit.slope);
        out.push(RateRow {
            family: family.to_string(),
            quantity: quantity.to_string(),
            p,
            slope: fit.slope,
            stderr: fit.stderr,
            r2: fit.r2,
            predicted,
            verdict,
            matched: predicted.map(|q| Verdict::from_exponent(q) == verdict),
        });
    }
    out
}

fn p_key(p: Option<f64>) -> f64 {
    p.unwrap_or(f64::NEG_INFINITY)
}

impl Sweep {
    /// Rows ordered by (quantity, p, c).
    pub fn rows(&self) -> Result<Vec<SweepRow>> {
        let mut rows = Vec::new();
        for r in &self.results {
            for (quantity, p, value) in r.quantities(&self.plan.ps, &self.plan.ss)? {
                rows.push(SweepRow {
                    family: r.family.clone(),
                    c: r.c,
                    p,
                    quantity,
                    value,
                });
            }
        }
        rows.sort_by(|a, b| {
            (a.family.as_str(), a.quantity.as_str())
                .cmp(&(b.family.as_str(), b.quantity.as_str()))
                .then(p_key(a.p).total_cmp(&p_key(b.p)))
                .then(a.c.total_cmp(&b.c))
        });
        Ok(rows)
    }

    /// Fits of every quantity with at least three positive values.
    pub fn fits(&self) -> Result<Vec<RateRow>> {
        Ok(fit_rows(&self.rows()?))
    }

    fn fit_of(&self, quantity: &str, p: Option<f64>) -> Result<RateFit> {
        let pts = self.points(quantity, p)?;
        fit_rate(format!("{} {quantity} p={}", self.plan.family, fmt_p(p)), &pts)
    }

    /// (c, value) for one quantity.
    pub fn points(&self, quantity: &str, p: Option<f64>) -> Result<Vec<(f64, f64)>> {
        let mut pts = Vec::new();
        for r in &self.results {
            let qs = r.quantities(p.as_slice(), &self.plan.ss)?;
            if let Some((_, _, v)) = qs.iter().find(|(q, qp, _)| q == quantity && *qp == p) {
                pts.push((r.c, *v));
            }
        }
        Ok(pts)
    }

    /// Convergence verdicts of ‖cEᶜ − Ē‖_{L^p(0,T;L²)} against the predictions.
    pub fn thresholds(&self) -> Result<ThresholdReport> {
        let mut rows = Vec::new();
        for &p in &self.plan.ps {
            let fit = self.fit_of(Q_CE, Some(p))?;
            let predicted = self.plan.family.layer_exponent(p).map(Verdict::from_exponent);
            let measured = Verdict::from_slope(fit.slope);
            rows.push(ThresholdRow {
                family: self.plan.family.to_string(),
                p,
                slope: fit.slope,
                predicted,
                measured,
                matched: predicted.map(|v| v == measured),
            });
        }
        let mut plateau = Vec::new();
        if self.plan.family.kind == FamilyKind::FixedE {
            for r in &self.results {
                let measured = r.layered(Q_CE)?.lp_norm(2.0)?;
                let analytic = boundary_layer_norm(r.c, r.layer_amplitude, 2.0, self.plan.t_end);
                plateau.push(PlateauRow {
                    c: r.c,
                    measured,
                    analytic,
                    rel_diff: (measured - analytic).abs() / analytic,
                });
            }
        }
        Ok(ThresholdReport { rows, plateau })
    }

    /// ‖Eᶜ(t*)‖² and the energy-jump gap along c.
    pub fn energy_flow(&self) -> Result<EnergyFlowReport> {
        energy_flow_check(&self.results)
    }

    pub fn linear_sharpness(&self) -> Result<LinearSharpness> {
        let mut rows = Vec::new();
        for &p in &self.plan.ps {
            if p < 2.0 {
                continue;
            }
            let fit = self.fit_of(Q_CEL, Some(p))?;
            let predicted = if p.is_infinite() { 1.0 } else { 1.0 - 2.0 / p };
            rows.push((p, fit.slope, predicted));
        }
        let bl = self.fit_of(Q_BL_BOUND, None)?;
        Ok(LinearSharpness {
            family: self.plan.family.to_string(),
            el_slopes: rows,
            bl_slope: bl.slope,
        })
    }
}

pub fn fmt_p(p: Option<f64>) -> String {
    match p {
        None => "-".into(),
        Some(p) if p.is_infinite() => "inf".into(),
        Some(p) => format!("{p}"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub family: String,
    pub p: f64,
    pub slope: f64,
    pub predicted: Option<Verdict>,
    pub measured: Verdict,
    pub matched: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlateauRow {
    pub c: f64,
    pub measured: f64,
    pub analytic: f64,
    pub rel_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub rows: Vec<ThresholdRow>,
    /// F1 only: ‖cEᶜ − Ē‖_{L²(0,T;L²)} against the analytic layer norm.
    pub plateau: Vec<PlateauRow>,
}

impl ThresholdReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matched == Some(true))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyFlowReport {
    /// (c, ‖Eᶜ(t*)‖², |∫₀^{t*}‖jᶜ‖² − ½‖E₀ᶜ‖² − ∫₀^{t*}‖j̄‖²|)
    pub rows: Vec<(f64, f64, f64)>,
    pub e_decreasing: bool,
    pub gap_decreasing: bool,
}

pub fn energy_flow_check(results: &[RunResult]) -> Result<EnergyFlowReport> {
    let mut rows = Vec::new();
    for r in results {
        rows.push((r.c, r.e_sq_at_t_star()?, r.energy_jump_gap()));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let e_decreasing = rows.windows(2).all(|w| w[1].1 < w[0].1);
    let gap_decreasing = rows.windows(2).all(|w| w[1].2 < w[0].2);
    Ok(EnergyFlowReport {
        rows,
        e_decreasing,
        gap_decreasing,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearSharpness {
    pub family: String,
    /// (p, measured slope, predicted 1 − 2/p) for ‖cE_L − Ē‖_{L^p(0,T;L²)}
    pub el_slopes: Vec<(f64, f64, f64)>,
    /// slope of sup‖B_L‖ + ‖∇B_L‖_{L²(0,T;L²)}
    pub bl_slope: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_labels() {
        assert_eq!(Family::new(FamilyKind::FixedE, 1).to_string(), "F1");
        assert_eq!(Family::new(FamilyKind::DecayingE { beta: 0.5 }, 1).to_string(), "F2(beta=0.5)");
    }

    #[test]
    fn family_labels_parse_back() {
        for kind in [
            FamilyKind::FixedE,
            FamilyKind::DecayingE { beta: 0.25 },
            FamilyKind::WellPrepared,
            FamilyKind::PerturbedFluid { alpha: 1.5 },
        ] {
            let label = Family::new(kind, 0).to_string();
            assert_eq!(FamilyKind::from_label(&label).unwrap(), kind);
        }
        assert!(FamilyKind::from_label("F5").is_err());
        assert!(FamilyKind::from_label("F2(beta=x)").is_err());
    }

    #[test]
    fn fit_rows_groups_and_predicts() {
        let rows: Vec<SweepRow> = [4.0f64, 8.0, 16.0]
            .iter()
            .map(|&c| SweepRow {
                family: "F1".into(),
                c,
                p: Some(f64::INFINITY),
                quantity: Q_CE.into(),
                value: 2.0 * c,
            })
            .collect();
        let fits = fit_rows(&rows);
        assert_eq!(fits.len(), 1);
        assert!((fits[0].slope - 1.0).abs() < 1e-12);
        assert_eq!(fits[0].predicted, Some(1.0));
        assert_eq!(fits[0].matched, Some(true));
    }

    #[test]
    fn family_validation() {
        assert!(Family::new(FamilyKind::DecayingE { beta: 1.0 }, 1).validate().is_err());
        assert!(Family::new(FamilyKind::PerturbedFluid { alpha: 0.0 }, 1).validate().is_err());
        assert!(Family::new(FamilyKind::WellPrepared, 1).validate().is_ok());
    }

    #[test]
    fn plan_validation() {
        let f = Family::new(FamilyKind::FixedE, 1);
        assert!(SweepPlan::new(f, vec![4.0, 8.0, 16.0]).validate().is_ok());
        assert!(SweepPlan::new(f, vec![8.0, 4.0, 16.0]).validate().is_err());
        assert!(SweepPlan::new(f, vec![4.0, 8.0]).validate().is_err());
        assert!(SweepPlan::new(f, vec![0.5, 8.0, 16.0]).validate().is_err());
        let mut p = SweepPlan::new(f, vec![4.0, 8.0, 16.0]);
        p.t_star = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn layer_exponents() {
        let f1 = Family::new(FamilyKind::FixedE, 1);
        assert_eq!(f1.layer_exponent(2.0), Some(0.0));
        assert_eq!(f1.layer_exponent(f64::INFINITY), Some(1.0));
        let f2 = Family::new(FamilyKind::DecayingE { beta: 0.5 }, 1);
        assert_eq!(f2.layer_exponent(1.0), Some(-1.5));
        assert_eq!(f2.layer_exponent(4.0), Some(0.0));
    }

    #[test]
    fn well_prepared_data_have_no_layer() {
        let g = GridSpec::new(8).unwrap();
        let ctx = SpectralContext::new(g);
        let f = Family::new(FamilyKind::WellPrepared, 3);
        let m = f.mhd_initial(g).unwrap();
        let e = f.em_initial(&ctx, &m, 5.0).unwrap();
        let mut gap = &e.e * 5.0;
        gap.axpy(-1.0, &compute_ebar(&ctx, &m));
        assert!(l2_norm(&gap) < 1e-13 * l2_norm(&e.e) * 5.0);
    }
}
