use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use emlimit_core::diagnostics::{em_audit_sample, energy_audit, mhd_audit_sample, NormSeries};
use emlimit_core::dynamics::{EmState, LinState, MhdState};
use emlimit_core::experiments::{fit_rows, run_sweep, MhdCache};
use emlimit_core::io::{
    parse_config_with, read_sweep_csv, write_checkpoint, write_tables, Checkpoint, RunConfig, Tables,
};
use emlimit_core::ops::l2_norm;
use emlimit_core::oracle::run_suite;
use emlimit_core::timestepping::stepper::forcing_stencil;
use emlimit_core::timestepping::{
    choose_dt, plan_steps, run_em, run_mhd, LinIntegrator, PropagatorCache, StepperConfig,
};
use emlimit_core::{Error, GridSpec, Result, SpectralContext, SpectralField};

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "EMLIMIT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "emlimit", version, about = "Euler–Maxwell to MHD limit solver and sweep harness")]
struct Cli {
    /// Flat TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. --set n=16 (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one system for every c in the configuration (once for mhd)
    Simulate {
        #[arg(value_enum)]
        system: System,
    },
    /// Run a c-sweep of the configured family and write all tables
    Sweep,
    /// Refit rates from an existing sweep.csv
    Rates {
        /// Directory holding sweep.csv (defaults to the output directory)
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Energy-identity residuals at dt and dt/2
    AuditEnergy,
    /// Brute-force self-checks of the spectral operators and propagators
    Oracle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum System {
    Em,
    Mhd,
    Linear,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BlowUp { .. } | Error::Audit(_) => 2,
        Error::Io { .. }
        | Error::CheckpointVersion { .. }
        | Error::CheckpointTruncated { .. }
        | Error::CheckpointFormat(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::BlowUp { trace, .. } = &e {
                for (t, nu) in trace {
                    eprintln!("  t = {t:.6e}  courant = {nu:.3}");
                }
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_VAR}={v} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Io {
            path: p.clone(),
            source: e,
        })?,
        None => String::new(),
    };
    parse_config_with(&text, &cli.sets)
}

fn run(cli: Cli) -> Result<()> {
    if let Command::Oracle = cli.command {
        return oracle();
    }
    let cfg = load_config(&cli)?;
    match cli.command {
        Command::Simulate { system } => simulate(&cfg, system),
        Command::Sweep => sweep(&cfg),
        Command::Rates { input } => rates(&cfg, input.as_deref()),
        Command::AuditEnergy => audit_energy(&cfg),
        Command::Oracle => unreachable!(),
    }
}

fn oracle() -> Result<()> {
    let checks = run_suite()?;
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed() { "pass" } else { "FAIL" };
        println!("{tag}  {:<48} error {:.3e}  tol {:.1e}", c.name, c.error, c.tolerance);
        failed += usize::from(!c.passed());
    }
    println!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        return Err(Error::Audit(format!("{failed} oracle checks failed")));
    }
    Ok(())
}

fn stepper(cfg: &RunConfig) -> StepperConfig {
    StepperConfig {
        scheme: cfg.scheme,
        cfl: cfg.cfl,
        dt_max: cfg.dt_max,
        t_end: cfg.t_end,
        resolve_initial_layer: true,
    }
}

fn series_from(label: String, times: &[f64], values: &[f64]) -> Result<NormSeries> {
    NormSeries::from_parts(label, times.to_vec(), values.to_vec())
}

fn ledger_series(prefix: &str, l: &emlimit_core::diagnostics::EnergyLedger) -> Result<Vec<NormSeries>> {
    let rel: Vec<f64> = (0..l.times.len()).map(|i| l.relative_residual(i).abs()).collect();
    Ok(vec![
        series_from(format!("{prefix} kinetic"), &l.times, &l.kinetic)?,
        series_from(format!("{prefix} electric"), &l.times, &l.electric)?,
        series_from(format!("{prefix} magnetic"), &l.times, &l.magnetic)?,
        series_from(format!("{prefix} dissipation"), &l.times, &l.dissipation)?,
        series_from(format!("{prefix} abs_relative_residual"), &l.times, &rel)?,
    ])
}

fn simulate(cfg: &RunConfig, system: System) -> Result<()> {
    let grid = GridSpec::new(cfg.n)?;
    let ctx = SpectralContext::new(grid);
    let family = cfg.family()?;
    let mhd0 = family.mhd_initial(grid)?;
    let st = stepper(cfg);
    let out = &cfg.output;
    fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let mut tables = Tables::default();
    match system {
        System::Mhd => {
            let (nsteps, dt) = plan_steps(cfg.t_end, choose_dt(&ctx, &mhd0, &st));
            let props = PropagatorCache::heat(grid, 2);
            let mut audit = Vec::new();
            let fin = run_mhd(&ctx, &props, &mhd0, &st, dt, nsteps, |_, it| {
                audit.push(mhd_audit_sample(&it.state()));
                Ok(())
            })?;
            tables.series.extend(ledger_series("mhd", &energy_audit(&audit)?)?);
            write_checkpoint(&Checkpoint::from_mhd(&fin, cfg.seed), &out.join("mhd.ckpt"))?;
            println!("mhd: {nsteps} steps of {dt:.4e}, t = {}", fin.t);
        }
        System::Em => {
            for &c in &cfg.c {
                let init = family.em_initial(&ctx, &mhd0, c)?;
                let (nsteps, dt) = plan_steps(cfg.t_end, choose_dt(&ctx, &init, &st));
                let props = PropagatorCache::maxwell(grid, c, 2);
                let mut audit = Vec::new();
                let fin = run_em(&ctx, &props, &init, &st, dt, nsteps, |i, it, inc| {
                    let s = it.state();
                    audit.push(em_audit_sample(&s, it.j_sq(), (i > 0).then_some(inc)));
                    Ok(())
                })?;
                let ledger = energy_audit(&audit)?;
                tables.series.extend(ledger_series(&format!("em c={c}"), &ledger)?);
                write_checkpoint(&Checkpoint::from_em(&fin, cfg.seed), &out.join(format!("em_c{c}.ckpt")))?;
                println!(
                    "em c = {c}: {nsteps} steps of {dt:.4e}, max relative energy residual {:.3e}",
                    ledger.max_relative_residual()
                );
            }
        }
        System::Linear => {
            let (nsteps, dt) = plan_steps(cfg.t_end, choose_dt(&ctx, &mhd0, &st));
            let cache = MhdCache::build(&ctx, &mhd0, &st, dt, nsteps)?;
            for &c in &cfg.c {
                let init = family.em_initial(&ctx, &mhd0, c)?;
                let props = PropagatorCache::maxwell(grid, c, 4);
                let fin = simulate_linear(&props, &cache, &LinState::initial(c, &init.e), |t, s| {
                    tables_push(&mut tables, format!("linear c={c} E_L"), t, l2_norm(&s.e))?;
                    tables_push(&mut tables, format!("linear c={c} B_L"), t, l2_norm(&s.b))
                })?;
                write_checkpoint(&Checkpoint::from_linear(&fin, cfg.seed), &out.join(format!("linear_c{c}.ckpt")))?;
                println!("linear c = {c}: {nsteps} steps of {dt:.4e}");
            }
        }
    }
    tables.sort();
    write_tables(&tables, out)?;
    Ok(())
}

fn tables_push(tables: &mut Tables, label: String, t: f64, v: f64) -> Result<()> {
    match tables.series.iter_mut().find(|s| s.label == label) {
        Some(s) => s.push(t, v),
        None => {
            let mut s = NormSeries::new(label);
            s.push(t, v)?;
            tables.series.push(s);
            Ok(())
        }
    }
}

/// The linear system forced by the cached Ē, observed at every node.
fn simulate_linear<F>(props: &PropagatorCache, cache: &MhdCache, init: &LinState, mut observe: F) -> Result<LinState>
where
    F: FnMut(f64, &LinState) -> Result<()>,
{
    let mut it = LinIntegrator::new(props, init)?;
    observe(0.0, &it.state())?;
    for i in 0..cache.nsteps {
        let stencil = forcing_stencil(i, cache.nsteps);
        let fields: Vec<SpectralField> = stencil.iter().map(|&j| cache.ebar(j)).collect();
        let samples: Vec<(f64, &SpectralField)> = stencil
            .iter()
            .zip(&fields)
            .map(|(&j, f)| (j as f64 - i as f64, f))
            .collect();
        it.advance(cache.dt, &samples)?;
        observe(cache.time(i + 1), &it.state())?;
    }
    Ok(it.state())
}

fn sweep(cfg: &RunConfig) -> Result<()> {
    let plan = cfg.plan()?;
    info!("sweep {} over c = {:?}", plan.family, plan.cs);
    let s = run_sweep(&plan)?;
    let tables = Tables::from_sweeps(std::slice::from_ref(&s))?;
    let files = write_tables(&tables, &cfg.output)?;
    println!("{}: {} steps of {:.4e}", plan.family, s.nsteps, s.dt);
    for r in s.thresholds()?.rows {
        let predicted = r.predicted.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        println!(
            "  |cE - Ebar|_L^{:<4} slope {:+.3}  measured {:<8} predicted {predicted}",
            fmt_p(r.p),
            r.slope,
            r.measured.to_string()
        );
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn fmt_p(p: f64) -> String {
    emlimit_core::experiments::fmt_p(Some(p))
}

fn rates(cfg: &RunConfig, input: Option<&Path>) -> Result<()> {
    let dir = input.unwrap_or(&cfg.output);
    let rows = read_sweep_csv(&dir.join("sweep.csv"))?;
    let mut tables = Tables {
        series: Vec::new(),
        sweep: rows,
        rates: Vec::new(),
    };
    tables.sort();
    tables.rates = fit_rows(&tables.sweep);
    tables.sort();
    for r in &tables.rates {
        println!(
            "{:<14} {:<28} p={:<4} slope {:+.3} ± {:.3}  {}",
            r.family,
            r.quantity,
            emlimit_core::experiments::fmt_p(r.p),
            r.slope,
            r.stderr,
            r.verdict
        );
    }
    let out = Tables {
        series: Vec::new(),
        sweep: tables.sweep,
        rates: tables.rates,
    };
    write_tables(&out, &cfg.output)?;
    Ok(())
}

fn em_residual(ctx: &SpectralContext, init: &EmState, st: &StepperConfig, dt: f64) -> Result<f64> {
    let (nsteps, dt) = plan_steps(st.t_end, dt);
    let props = PropagatorCache::maxwell(ctx.grid(), init.c, 2);
    let mut audit = Vec::new();
    run_em(ctx, &props, init, st, dt, nsteps, |i, it, inc| {
        audit.push(em_audit_sample(&it.state(), it.j_sq(), (i > 0).then_some(inc)));
        Ok(())
    })?;
    Ok(energy_audit(&audit)?.max_relative_residual())
}

fn mhd_residual(ctx: &SpectralContext, init: &MhdState, st: &StepperConfig, dt: f64) -> Result<f64> {
    let (nsteps, dt) = plan_steps(st.t_end, dt);
    let props = PropagatorCache::heat(ctx.grid(), 2);
    let mut audit = Vec::new();
    run_mhd(ctx, &props, init, st, dt, nsteps, |_, it| {
        audit.push(mhd_audit_sample(&it.state()));
        Ok(())
    })?;
    Ok(energy_audit(&audit)?.max_relative_residual())
}

fn audit_energy(cfg: &RunConfig) -> Result<()> {
    let grid = GridSpec::new(cfg.n)?;
    let ctx = SpectralContext::new(grid);
    let family = cfg.family()?;
    let mhd0 = family.mhd_initial(grid)?;
    let st = stepper(cfg);
    println!("{:<10} {:>12} {:>12} {:>12} {:>8}", "system", "dt", "res(dt)", "res(dt/2)", "ratio");
    let dt = choose_dt(&ctx, &mhd0, &st);
    let (a, b) = (mhd_residual(&ctx, &mhd0, &st, dt)?, mhd_residual(&ctx, &mhd0, &st, dt / 2.0)?);
    println!("{:<10} {dt:>12.4e} {a:>12.3e} {b:>12.3e} {:>8.2}", "mhd", a / b);
    for &c in &cfg.c {
        let init = family.em_initial(&ctx, &mhd0, c)?;
        let dt = choose_dt(&ctx, &init, &st);
        let (a, b) = (em_residual(&ctx, &init, &st, dt)?, em_residual(&ctx, &init, &st, dt / 2.0)?);
        println!("{:<10} {dt:>12.4e} {a:>12.3e} {b:>12.3e} {:>8.2}", format!("em c={c}"), a / b);
    }
    Ok(())
}
