//! Desk-scale acceptance run: n = 32, T = 0.5, c ∈ {4, 8, 16, 32}.
//! Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use emlimit_core::diagnostics::{em_audit_sample, energy_audit, mhd_audit_sample, DtEbarAccumulator};
use emlimit_core::dynamics::{EmState, MhdState};
use emlimit_core::experiments::{
    remainder_name, run_sweep, ub_name, Family, FamilyKind, Sweep, SweepPlan, Q_BL_BOUND, Q_CE,
    Q_ERROR_PARTS,
};
use emlimit_core::io::{write_tables, Tables};
use emlimit_core::oracle::{run_suite, OPERATOR_TOL, PROPAGATOR_TOL};
use emlimit_core::timestepping::{
    choose_dt, plan_steps, run_em, run_mhd, EmIntegrator, PropagatorCache, Scheme, StepperConfig,
};
use emlimit_core::{GridSpec, Result, SpectralContext};

const N: usize = 32;
const T: f64 = 0.5;
const SEED: u64 = 7;
const CS: [f64; 4] = [4.0, 8.0, 16.0, 32.0];

struct Report {
    lines: Vec<(String, bool, Vec<String>)>,
}

impl Report {
    fn record(&mut self, name: &str, pass: bool, detail: Vec<String>) {
        println!("{} {name}", if pass { "PASS" } else { "FAIL" });
        for d in &detail {
            println!("       {d}");
        }
        self.lines.push((name.to_string(), pass, detail));
    }

    fn error(&mut self, name: &str, e: impl std::fmt::Display) {
        self.record(name, false, vec![format!("error: {e}")]);
    }
}

fn plan(kind: FamilyKind) -> SweepPlan {
    let mut p = SweepPlan::new(Family::new(kind, SEED), CS.to_vec());
    p.n = N;
    p.t_end = T;
    p.ps = vec![1.0, 4.0 / 3.0, 2.0, 4.0, f64::INFINITY];
    p
}

fn stepper() -> StepperConfig {
    StepperConfig {
        scheme: Scheme::Etd2,
        cfl: 0.5,
        t_end: T,
        ..StepperConfig::default()
    }
}

fn slope(s: &Sweep, q: &str, p: Option<f64>) -> Result<f64> {
    let pts = s.points(q, p)?;
    Ok(emlimit_core::experiments::fit_rate(q, &pts)?.slope)
}

fn em_residual(ctx: &SpectralContext, init: &EmState, dt: f64) -> Result<f64> {
    let (n, dt) = plan_steps(T, dt);
    let props = PropagatorCache::maxwell(ctx.grid(), init.c, 2);
    let mut audit = Vec::new();
    run_em(ctx, &props, init, &stepper(), dt, n, |i, it, inc| {
        audit.push(em_audit_sample(&it.state(), it.j_sq(), (i > 0).then_some(inc)));
        Ok(())
    })?;
    Ok(energy_audit(&audit)?.max_relative_residual())
}

fn mhd_residual(ctx: &SpectralContext, init: &MhdState, dt: f64) -> Result<f64> {
    let (n, dt) = plan_steps(T, dt);
    let props = PropagatorCache::heat(ctx.grid(), 2);
    let mut audit = Vec::new();
    run_mhd(ctx, &props, init, &stepper(), dt, n, |_, it| {
        audit.push(mhd_audit_sample(&it.state()));
        Ok(())
    })?;
    Ok(energy_audit(&audit)?.max_relative_residual())
}

fn dt_ebar_norms(ctx: &SpectralContext, init: &MhdState, dt: f64, n: usize) -> Result<(f64, f64)> {
    let props = PropagatorCache::heat(ctx.grid(), 2);
    let mut acc = DtEbarAccumulator::new();
    run_mhd(ctx, &props, init, &stepper(), dt, n, |_, it| acc.push(it.t(), it.ebar()))?;
    let d = acc.finish()?;
    Ok((d.linf_l2, d.l2_h1))
}

fn criterion_oracle(r: &mut Report) -> Result<()> {
    let checks = run_suite()?;
    let worst = |pred: &dyn Fn(&str) -> bool| {
        checks
            .iter()
            .filter(|c| pred(&c.name))
            .map(|c| c.error)
            .fold(0.0f64, f64::max)
    };
    let pass = checks.iter().all(|c| c.passed());
    let mut detail = vec![
        format!(
            "{} checks; worst operator error {:.2e} (tol {OPERATOR_TOL:.0e}), worst propagator error {:.2e} (tol {PROPAGATOR_TOL:.0e})",
            checks.len(),
            worst(&|n| !n.contains("propagator") && !n.contains("phi") && !n.contains("Duhamel")),
            worst(&|n| n.contains("propagator")),
        ),
    ];
    for c in checks.iter().filter(|c| !c.passed()) {
        detail.push(format!("failed: {} error {:.2e} > {:.0e}", c.name, c.error, c.tolerance));
    }
    r.record("1 oracle equivalence", pass, detail);
    Ok(())
}

fn criterion_energy(r: &mut Report, ctx: &SpectralContext) -> Result<()> {
    let f1 = Family::new(FamilyKind::FixedE, SEED);
    let mhd0 = f1.mhd_initial(ctx.grid())?;
    let em0 = f1.em_initial(ctx, &mhd0, 8.0)?;
    let dt = choose_dt(ctx, &em0, &stepper());
    let (a, b) = (em_residual(ctx, &em0, dt)?, em_residual(ctx, &em0, dt / 2.0)?);
    let dtm = choose_dt(ctx, &mhd0, &stepper());
    let (am, bm) = (mhd_residual(ctx, &mhd0, dtm)?, mhd_residual(ctx, &mhd0, dtm / 2.0)?);
    let ok = |x: f64, y: f64| x <= 1e-4 && (3.5..=4.5).contains(&(x / y));
    r.record(
        "2 energy identity",
        ok(a, b) && ok(am, bm),
        vec![
            format!("EM  c=8 dt={dt:.4e}: residual {a:.3e}, at dt/2 {b:.3e}, ratio {:.3}", a / b),
            format!("MHD     dt={dtm:.4e}: residual {am:.3e}, at dt/2 {bm:.3e}, ratio {:.3}", am / bm),
        ],
    );
    Ok(())
}

fn criterion_dt_ebar(r: &mut Report, ctx: &SpectralContext, sweeps: &[&Sweep]) -> Result<()> {
    let base = sweeps[0];
    let identical = sweeps
        .iter()
        .all(|s| s.dt_ebar.0.to_bits() == base.dt_ebar.0.to_bits() && s.dt_ebar.1.to_bits() == base.dt_ebar.1.to_bits());
    let mhd0 = base.plan.family.mhd_initial(ctx.grid())?;
    let (linf, l2h1) = base.dt_ebar;
    let (linf2, l2h12) = dt_ebar_norms(ctx, &mhd0, base.dt / 2.0, 2 * base.nsteps)?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs();
    let finite = linf.is_finite() && l2h1.is_finite() && linf > 0.0 && l2h1 > 0.0;
    r.record(
        "9 dtEbar bounds",
        finite && identical && rel(linf, linf2) <= 0.01 && rel(l2h1, l2h12) <= 0.01,
        vec![
            format!("L∞L² {linf:.6e}, L²H¹ {l2h1:.6e}; bit-identical across the {} sweeps (every c): {identical}", sweeps.len()),
            format!("dt/2: L∞L² {linf2:.6e} ({:.2e} rel), L²H¹ {l2h12:.6e} ({:.2e} rel)", rel(linf, linf2), rel(l2h1, l2h12)),
        ],
    );
    Ok(())
}

/// Wall time of plain steps (no initial-layer sub-stepping), best of
/// several interleaved rounds.
fn criterion_timing(r: &mut Report, ctx: &SpectralContext) -> Result<()> {
    let f1 = Family::new(FamilyKind::FixedE, SEED);
    let mhd0 = f1.mhd_initial(ctx.grid())?;
    let dt = 1.0 / 512.0;
    let props: Vec<PropagatorCache> = [4.0, 32.0].iter().map(|&c| PropagatorCache::maxwell(ctx.grid(), c, 2)).collect();
    let mut its = Vec::new();
    for (c, p) in [4.0, 32.0].iter().zip(&props) {
        let mut it = EmIntegrator::new(ctx, p, Scheme::Etd2, &f1.em_initial(ctx, &mhd0, *c)?)?;
        it.advance(dt)?;
        its.push(it);
    }
    let steps = 10;
    let mut best = [Duration::MAX; 2];
    for _ in 0..4 {
        for (k, it) in its.iter_mut().enumerate() {
            let t0 = Instant::now();
            for _ in 0..steps {
                it.advance(dt)?;
            }
            best[k] = best[k].min(t0.elapsed() / steps);
        }
    }
    let (a, b) = (best[0].as_secs_f64(), best[1].as_secs_f64());
    let spread = (a - b).abs() / a.min(b);
    r.record(
        "10 c-uniform step cost",
        spread <= 0.10,
        vec![format!("per step: c=4 {:.2} ms, c=32 {:.2} ms, spread {:.1}%", a * 1e3, b * 1e3, spread * 100.0)],
    );
    Ok(())
}

fn run() -> Result<bool> {
    let start = Instant::now();
    let grid = GridSpec::new(N)?;
    let ctx = SpectralContext::new(grid);
    let mut r = Report { lines: Vec::new() };

    if let Err(e) = criterion_oracle(&mut r) {
        r.error("1 oracle equivalence", e);
    }
    if let Err(e) = criterion_energy(&mut r, &ctx) {
        r.error("2 energy identity", e);
    }

    let f1 = run_sweep(&plan(FamilyKind::FixedE))?;
    let f2 = run_sweep(&plan(FamilyKind::DecayingE { beta: 0.5 }))?;
    let f3 = run_sweep(&plan(FamilyKind::WellPrepared))?;

    let inf = Some(f64::INFINITY);
    let s1 = slope(&f1, &ub_name(0.0), inf)?;
    let s3 = slope(&f3, &ub_name(0.0), inf)?;
    r.record(
        "3 velocity and magnetic rates",
        (s3 + 2.0).abs() <= 0.3 && (s1 + 1.0).abs() <= 0.2,
        vec![format!("|(u,B)-(ubar,Bbar)|_L∞L² slope: F3 {s3:+.3} (want -2 ± 0.3), F1 {s1:+.3} (want -1 ± 0.2)")],
    );

    let mut ok4 = true;
    let mut d4 = Vec::new();
    for p in [2.0, f64::INFINITY] {
        let s = slope(&f1, &remainder_name(Q_CE), Some(p))?;
        let bound = if p.is_infinite() { 1.0 } else { 1.0 - 2.0 / p } - 0.7;
        ok4 &= s <= bound;
        d4.push(format!("p={p}: layer-subtracted slope {s:+.3} (want <= {bound:+.2})"));
    }
    r.record("4 layer-subtracted electric rate", ok4, d4);

    let mut ok5 = true;
    let mut d5 = Vec::new();
    for s in [&f1, &f2] {
        let th = s.thresholds()?;
        ok5 &= th.all_match();
        for row in &th.rows {
            d5.push(format!(
                "{} p={:<6.4}: slope {:+.3} measured {} predicted {}",
                row.family,
                row.p,
                row.slope,
                row.measured,
                row.predicted.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
            ));
        }
        for pr in th.plateau.iter().rev().take(2) {
            ok5 &= pr.rel_diff <= 0.10;
            d5.push(format!(
                "F1 p=2 plateau c={}: measured {:.5} analytic {:.5} ({:.2}%)",
                pr.c,
                pr.measured,
                pr.analytic,
                pr.rel_diff * 100.0
            ));
        }
    }
    r.record("5 threshold table", ok5, d5);

    let ls = f1.linear_sharpness()?;
    let bl3 = slope(&f3, Q_BL_BOUND, None)?;
    let mut ok6 = (-2.2..=-0.8).contains(&ls.bl_slope) && bl3 <= -1.7;
    let mut d6 = Vec::new();
    for &(p, s, want) in &ls.el_slopes {
        ok6 &= (s - want).abs() <= 0.2;
        d6.push(format!("F1 |cE_L-Ebar| p={p}: slope {s:+.3} (want {want:+.2} ± 0.2)"));
    }
    d6.push(format!("sup|B_L| + |grad B_L|_L²L² slope: F1 {:+.3} (want in [-2.2, -0.8]), F3 {bl3:+.3} (want <= -1.7)", ls.bl_slope));
    r.record("6 linear sharpness", ok6, d6);

    let e1 = slope(&f1, Q_ERROR_PARTS, None)?;
    let e3 = slope(&f3, Q_ERROR_PARTS, None)?;
    let (g1, g3) = (f1.plan.family.gap_exponent(), f3.plan.family.gap_exponent());
    r.record(
        "7 error decomposition",
        (e1 - g1).abs() <= 0.3 && (e3 - g3).abs() <= 0.3,
        vec![format!("slope F1 {e1:+.3} (gap exponent {g1}), F3 {e3:+.3} (gap exponent {g3}), tolerance ± 0.3")],
    );

    let ef = f1.energy_flow()?;
    let mut d8: Vec<String> = ef
        .rows
        .iter()
        .map(|(c, e, g)| format!("c={c}: |E(t*)|² {e:.5e}, energy-jump gap {g:.5e}"))
        .collect();
    d8.push(format!("strictly decreasing: |E(t*)|² {}, gap {}", ef.e_decreasing, ef.gap_decreasing));
    r.record("8 energy flow at t* = 0.25", ef.e_decreasing && ef.gap_decreasing, d8);

    if let Err(e) = criterion_dt_ebar(&mut r, &ctx, &[&f1, &f2, &f3]) {
        r.error("9 dtEbar bounds", e);
    }
    if let Err(e) = criterion_timing(&mut r, &ctx) {
        r.error("10 c-uniform step cost", e);
    }

    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    write_tables(&Tables::from_sweeps(&[f1, f2, f3])?, &dir)?;
    let passed = r.lines.iter().filter(|l| l.1).count();
    println!(
        "{passed}/{} criteria passed in {:.0} s; tables in {}",
        r.lines.len(),
        start.elapsed().as_secs_f64(),
        dir.display()
    );
    Ok(passed == r.lines.len())
}

fn main() {
    match run() {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            println!("FAIL acceptance run aborted: {e}");
            std::process::exit(1);
        }
    }
}
