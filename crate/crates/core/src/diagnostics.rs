//! Norm bookkeeping: time series, L^p-in-time norms with an analytically
//! treated e^{−c²t} layer, the energy ledger, the initial gap ℰ₀ᶜ, the error
//! decomposition and finite-difference bounds on ∂tĒ.

use crate::dynamics::{compute_ebar, ohm_current, EmState, LinState, MhdState};
use crate::error::{Error, Result};
use crate::field::{SpectralContext, SpectralField};
use crate::ops::{curl, inner, l2_norm, physical_linf, sobolev_norm};

/// Sampled norms ‖f(t_i)‖ on a uniform time grid starting at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct NormSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl NormSeries {
    pub fn new(label: impl Into<String>) -> Self {
        NormSeries {
            label: label.into(),
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_parts(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let mut s = NormSeries::new(label);
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} times vs {} values",
                times.len(),
                values.len()
            )));
        }
        for (t, v) in times.into_iter().zip(values) {
            s.push(t, v)?;
        }
        Ok(s)
    }

    /// Appends a sample; times must increase and values be finite and ≥ 0.
    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidArgument(format!(
                    "{}: time {t} does not increase past {last}",
                    self.label
                )));
            }
        }
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "{}: norm value {value} at t = {t}",
                self.label
            )));
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Value at the first node with t ≥ `t` (within a relative 1e-9).
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.times
            .iter()
            .position(|&s| s >= t - tol)
            .map(|i| self.values[i])
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_time_norm(self, p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time exponent p = {p} must be >= 1")))
    }
}

/// (∫₀ᵀ v(t)^p dt)^{1/p} by the composite trapezoid rule; the maximum for p = ∞.
pub fn lp_time_norm(s: &NormSeries, p: f64) -> Result<f64> {
    check_p(p)?;
    if s.is_empty() {
        return Err(Error::InvalidArgument(format!("{}: empty series", s.label)));
    }
    if p.is_infinite() {
        return Ok(s.max());
    }
    let mut acc = 0.0;
    for i in 1..s.len() {
        let h = s.times[i] - s.times[i - 1];
        acc += 0.5 * h * (s.values[i - 1].powf(p) + s.values[i].powf(p));
    }
    Ok(acc.powf(1.0 / p))
}

/// ‖e^{−c²t} a‖_{L^p(0,T)} in closed form.
pub fn boundary_layer_norm(c: f64, a: f64, p: f64, t_end: f64) -> f64 {
    if p.is_infinite() {
        return a;
    }
    let r = p * c * c;
    a * (-(-r * t_end).exp_m1() / r).powf(1.0 / p)
}

/// Samples of a quantity g(t) = ‖R(t) + e^{−κt} a‖ stored through ‖R‖²,
/// ⟨R, a⟩ and the constant ‖a‖², so that the fast factor e^{−κt} is
/// evaluated exactly between nodes while R is interpolated linearly.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredSeries {
    pub label: String,
    /// decay rate κ (c² for the damped Maxwell layer)
    pub rate: f64,
    pub a2: f64,
    pub times: Vec<f64>,
    pub r2: Vec<f64>,
    pub ra: Vec<f64>,
}

const LAYER_ACTIVE: f64 = 1e-13;
const SIMPSON_TOL: f64 = 1e-11;

impl LayeredSeries {
    pub fn new(label: impl Into<String>, rate: f64, a2: f64) -> Self {
        LayeredSeries {
            label: label.into(),
            rate,
            a2,
            times: Vec::new(),
            r2: Vec::new(),
            ra: Vec::new(),
        }
    }

    /// Records R = x − e^{−κt} a at time t.
    pub fn push_fields(&mut self, t: f64, x: &SpectralField, a: &SpectralField) -> Result<()> {
        let w = (-self.rate * t).exp();
        let mut r = x.clone();
        r.axpy(-w, a);
        let r2 = l2_norm(&r).powi(2);
        self.push(t, r2, inner(&r, a))
    }

    pub fn push(&mut self, t: f64, r2: f64, ra: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidArgument(format!(
                    "{}: time {t} does not increase past {last}",
                    self.label
                )));
            }
        }
        if !r2.is_finite() || !ra.is_finite() {
            return Err(Error::InvalidArgument(format!("{}: non-finite sample", self.label)));
        }
        self.times.push(t);
        self.r2.push(r2.max(0.0));
        self.ra.push(ra);
        Ok(())
    }

    /// ‖R(t_i)‖, the series with the layer subtracted.
    pub fn remainder(&self) -> NormSeries {
        NormSeries {
            label: format!("{} (layer removed)", self.label),
            times: self.times.clone(),
            values: self.r2.iter().map(|v| v.sqrt()).collect(),
        }
    }

    /// g at the nodes.
    pub fn full(&self) -> NormSeries {
        NormSeries {
            label: self.label.clone(),
            times: self.times.clone(),
            values: (0..self.times.len()).map(|i| self.eval_sq(i, 0.0).sqrt()).collect(),
        }
    }

    /// g² at t_i + θ(t_{i+1} − t_i).
    fn eval_sq(&self, i: usize, theta: f64) -> f64 {
        let (r2, ra, t) = if theta == 0.0 {
            (self.r2[i], self.ra[i], self.times[i])
        } else {
            let j = i + 1;
            (
                self.r2[i] + theta * (self.r2[j] - self.r2[i]),
                self.ra[i] + theta * (self.ra[j] - self.ra[i]),
                self.times[i] + theta * (self.times[j] - self.times[i]),
            )
        };
        let w = (-self.rate * t).exp();
        (r2 + 2.0 * w * ra + w * w * self.a2).max(0.0)
    }

    fn active(&self, i: usize, scale: f64) -> bool {
        self.a2 > 0.0 && (-self.rate * self.times[i]).exp() * self.a2.sqrt() > LAYER_ACTIVE * scale
    }

    /// ‖g‖_{L^p(0,T)}: adaptive Simpson on intervals where the layer is
    /// still visible, the trapezoid rule elsewhere.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        let n = self.times.len();
        if n == 0 {
            return Err(Error::InvalidArgument(format!("{}: empty series", self.label)));
        }
        let scale = self
            .r2
            .iter()
            .fold(self.a2, |m, &v| m.max(v))
            .sqrt()
            .max(f64::MIN_POSITIVE);
        if p.is_infinite() {
            let mut m: f64 = (0..n).map(|i| self.eval_sq(i, 0.0)).fold(0.0, f64::max);
            for i in 0..n.saturating_sub(1) {
                if self.active(i, scale) {
                    for q in 1..64 {
                        m = m.max(self.eval_sq(i, q as f64 / 64.0));
                    }
                }
            }
            return Ok(m.sqrt());
        }
        let mut acc = 0.0;
        for i in 0..n.saturating_sub(1) {
            let h = self.times[i + 1] - self.times[i];
            let f = |theta: f64| self.eval_sq(i, theta).powf(0.5 * p);
            if self.active(i, scale) {
                let (fa, fm, fb) = (f(0.0), f(0.5), f(1.0));
                let whole = (fa + 4.0 * fm + fb) / 6.0;
                let tol = SIMPSON_TOL * (fa.max(fb).max(fm)).max(f64::MIN_POSITIVE);
                acc += h * adaptive_simpson(&f, 0.0, 1.0, fa, fm, fb, whole, tol, 40);
            } else {
                acc += 0.5 * h * (f(0.0) + self.eval_sq(i + 1, 0.0).powf(0.5 * p));
            }
        }
        Ok(acc.powf(1.0 / p))
    }
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol * (b - a) {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, tol, depth - 1)
}

/// One snapshot for the energy audit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditSample {
    pub t: f64,
    pub kinetic: f64,
    pub electric: f64,
    pub magnetic: f64,
    /// ‖j(t)‖²
    pub j_sq: Option<f64>,
    /// ∫‖j‖² over the interval ending here, when the stepper integrated it
    /// on finer sub-steps than the sampling grid; overrides the trapezoid.
    pub increment: Option<f64>,
}

/// Energy bookkeeping: E(t) + ∫₀ᵗ‖j‖² − E(0) should vanish.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub electric: Vec<f64>,
    pub magnetic: Vec<f64>,
    pub dissipation: Vec<f64>,
}

impl EnergyLedger {
    pub fn total(&self, i: usize) -> f64 {
        self.kinetic[i] + self.electric[i] + self.magnetic[i]
    }

    pub fn residual(&self, i: usize) -> f64 {
        self.total(i) + self.dissipation[i] - self.total(0)
    }

    /// Residual relative to the initial energy (absolute if that is zero).
    pub fn relative_residual(&self, i: usize) -> f64 {
        let e0 = self.total(0);
        if e0 > 0.0 {
            self.residual(i) / e0
        } else {
            self.residual(i)
        }
    }

    pub fn max_relative_residual(&self) -> f64 {
        (0..self.times.len())
            .map(|i| self.relative_residual(i).abs())
            .fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Builds the ledger, integrating ‖j‖² by the trapezoid rule unless a
/// sample carries its own increment.
pub fn energy_audit(samples: &[AuditSample]) -> Result<EnergyLedger> {
    let mut ledger = EnergyLedger::default();
    let mut diss = 0.0;
    for (i, s) in samples.iter().enumerate() {
        if i > 0 {
            let prev = &samples[i - 1];
            if !(s.t > prev.t) {
                return Err(Error::Audit(format!("time {} does not increase", s.t)));
            }
            diss += match s.increment {
                Some(inc) => inc,
                None => match (prev.j_sq, s.j_sq) {
                    (Some(a), Some(b)) => 0.5 * (s.t - prev.t) * (a + b),
                    _ => {
                        return Err(Error::Audit(format!("missing ‖j‖² sample near t = {}", s.t)))
                    }
                },
            };
        }
        ledger.times.push(s.t);
        ledger.kinetic.push(s.kinetic);
        ledger.electric.push(s.electric);
        ledger.magnetic.push(s.magnetic);
        ledger.dissipation.push(diss);
    }
    Ok(ledger)
}

/// Audit sample of an Euler–Maxwell state.
pub fn em_audit_sample(s: &EmState, j_sq: f64, increment: Option<f64>) -> AuditSample {
    AuditSample {
        t: s.t,
        kinetic: 0.5 * l2_norm(&s.u).powi(2),
        electric: 0.5 * l2_norm(&s.e).powi(2),
        magnetic: 0.5 * l2_norm(&s.b).powi(2),
        j_sq: Some(j_sq),
        increment,
    }
}

/// Audit sample of an MHD state; the dissipation density is ‖∇B̄‖².
pub fn mhd_audit_sample(s: &MhdState) -> AuditSample {
    AuditSample {
        t: s.t,
        kinetic: 0.5 * l2_norm(&s.u).powi(2),
        electric: 0.0,
        magnetic: 0.5 * l2_norm(&s.b).powi(2),
        j_sq: Some(l2_norm(&curl(&s.b)).powi(2)),
        increment: None,
    }
}

/// Distance between the Euler–Maxwell data and the MHD data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialGap {
    pub du0: f64,
    pub db0: f64,
    /// ‖cE₀ᶜ − Ē(0)‖_{H¹}
    pub de0_h1: f64,
    pub epsilon0: f64,
}

/// ℰ₀ᶜ = ‖u₀ᶜ − u₀‖ + ‖B₀ᶜ − B₀‖ + (‖cE₀ᶜ − Ē(0)‖_{H¹} + 1)/c².
pub fn epsilon0(ctx: &SpectralContext, em: &EmState, mhd: &MhdState) -> Result<InitialGap> {
    let g = em.u.grid();
    for f in [&em.e, &em.b, &mhd.u, &mhd.b] {
        g.ensure_same(&f.grid())?;
    }
    let c = em.c;
    let du0 = l2_norm(&(&em.u - &mhd.u));
    let db0 = l2_norm(&(&em.b - &mhd.b));
    let mut gap = &em.e * c;
    gap.axpy(-1.0, &compute_ebar(ctx, mhd));
    let de0_h1 = sobolev_norm(&gap, 1.0)?;
    Ok(InitialGap {
        du0,
        db0,
        de0_h1,
        epsilon0: du0 + db0 + (de0_h1 + 1.0) / (c * c),
    })
}

/// ũ = uᶜ − ū, Ẽ = Eᶜ − E_L, B̃ = Bᶜ − B̄ − B_L.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorParts {
    pub u_tilde: SpectralField,
    pub e_tilde: SpectralField,
    pub b_tilde: SpectralField,
}

impl ErrorParts {
    /// ‖ũ‖ + ‖Ẽ‖ + ‖B̃‖.
    pub fn l2_sum(&self) -> f64 {
        l2_norm(&self.u_tilde) + l2_norm(&self.e_tilde) + l2_norm(&self.b_tilde)
    }
}

pub fn error_decompose(
    em: &EmState,
    mhd: &MhdState,
    lin: &LinState,
    time_tol: f64,
) -> Result<ErrorParts> {
    let g = em.u.grid();
    for f in [&mhd.u, &mhd.b, &lin.e, &lin.b] {
        g.ensure_same(&f.grid())?;
    }
    if (em.t - mhd.t).abs() > time_tol || (em.t - lin.t).abs() > time_tol {
        return Err(Error::InvalidArgument(format!(
            "time mismatch: em {} mhd {} linear {}",
            em.t, mhd.t, lin.t
        )));
    }
    let mut b_tilde = &em.b - &mhd.b;
    b_tilde.axpy(-1.0, &lin.b);
    Ok(ErrorParts {
        u_tilde: &em.u - &mhd.u,
        e_tilde: &em.e - &lin.e,
        b_tilde,
    })
}

/// Streaming second-order finite differences of Ē samples on a uniform
/// grid: centred inside, one-sided at both ends. Holds three samples.
#[derive(Debug)]
pub struct DtEbarAccumulator {
    window: Vec<(f64, SpectralField)>,
    count: usize,
    pub l2: NormSeries,
    pub h1: NormSeries,
}

/// Norms of ∂tĒ.
#[derive(Clone, Debug, PartialEq)]
pub struct DtEbar {
    pub l2: NormSeries,
    pub h1: NormSeries,
    /// ‖∂tĒ‖_{L∞(0,T;L²)}
    pub linf_l2: f64,
    /// ‖∂tĒ‖_{L²(0,T;H¹)}
    pub l2_h1: f64,
}

impl Default for DtEbarAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl DtEbarAccumulator {
    pub fn new() -> Self {
        DtEbarAccumulator {
            window: Vec::with_capacity(3),
            count: 0,
            l2: NormSeries::new("dt_ebar_l2"),
            h1: NormSeries::new("dt_ebar_h1"),
        }
    }

    fn record(&mut self, t: f64, d: SpectralField) -> Result<()> {
        self.l2.push(t, l2_norm(&d))?;
        self.h1.push(t, sobolev_norm(&d, 1.0)?)
    }

    pub fn push(&mut self, t: f64, ebar: &SpectralField) -> Result<()> {
        if self.window.len() == 3 {
            self.window.remove(0);
        }
        self.window.push((t, ebar.clone()));
        self.count += 1;
        if self.window.len() < 3 {
            return Ok(());
        }
        let (t0, t1, t2) = (self.window[0].0, self.window[1].0, self.window[2].0);
        let h = 0.5 * (t2 - t0);
        if self.count == 3 {
            let d = SpectralField::lin_comb(&[
                (-1.5 / h, &self.window[0].1),
                (2.0 / h, &self.window[1].1),
                (-0.5 / h, &self.window[2].1),
            ]);
            self.record(t0, d)?;
        }
        let d = SpectralField::lin_comb(&[(-0.5 / h, &self.window[0].1), (0.5 / h, &self.window[2].1)]);
        self.record(t1, d)
    }

    pub fn finish(mut self) -> Result<DtEbar> {
        if self.count < 3 {
            return Err(Error::InvalidArgument(format!(
                "∂tĒ needs at least 3 samples, got {}",
                self.count
            )));
        }
        let h = 0.5 * (self.window[2].0 - self.window[0].0);
        let d = SpectralField::lin_comb(&[
            (0.5 / h, &self.window[0].1),
            (-2.0 / h, &self.window[1].1),
            (1.5 / h, &self.window[2].1),
        ]);
        let t = self.window[2].0;
        self.record(t, d)?;
        Ok(DtEbar {
            linf_l2: lp_time_norm(&self.l2, f64::INFINITY)?,
            l2_h1: lp_time_norm(&self.h1, 2.0)?,
            l2: self.l2,
            h1: self.h1,
        })
    }
}

/// ∂tĒ norms from a list of samples.
pub fn dt_ebar_series<'a>(samples: impl IntoIterator<Item = (f64, &'a SpectralField)>) -> Result<DtEbar> {
    let mut acc = DtEbarAccumulator::new();
    for (t, e) in samples {
        acc.push(t, e)?;
    }
    acc.finish()
}

/// X = ‖u‖²_{H^m} + ‖E‖²_{H^m} + ‖B‖²_{H^m} and
/// A = ‖∇u‖_{L∞} + ‖u‖²_{L∞} + ‖B‖²_{L∞} + ‖j‖_{L∞}.
pub fn diagnostic_xa(ctx: &SpectralContext, em: &EmState, m: u32) -> Result<(f64, f64)> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("m = {m} must be >= 3")));
    }
    let s = m as f64;
    let x = sobolev_norm(&em.u, s)?.powi(2) + sobolev_norm(&em.e, s)?.powi(2) + sobolev_norm(&em.b, s)?.powi(2);
    let g = em.u.grid();
    let i = num_complex::Complex64::new(0.0, 1.0);
    let mut grads = vec![SpectralField::zeros(g); 3];
    for (idx, k) in g.wavevectors().enumerate() {
        let v = em.u.at(idx);
        for (j, gj) in grads.iter_mut().enumerate() {
            let f = i * k[j];
            gj.set(idx, [v[0] * f, v[1] * f, v[2] * f]);
        }
    }
    let j = ohm_current(ctx, em);
    let phys = ctx.to_physical_many(&[&em.u, &em.b, &j, &grads[0], &grads[1], &grads[2]]);
    let mut grad_max: f64 = 0.0;
    for p in 0..g.len() {
        let frob: f64 = (3..6).map(|q| {
            let v = phys[q].at(p);
            v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
        }).sum();
        grad_max = grad_max.max(frob);
    }
    let a = grad_max.sqrt()
        + physical_linf(&phys[0]).powi(2)
        + physical_linf(&phys[1]).powi(2)
        + physical_linf(&phys[2]);
    Ok((x, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use num_complex::Complex64;

    #[test]
    fn constant_series_norms() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let s = NormSeries::from_parts("c", times, vec![3.0; 11]).unwrap();
        assert!((lp_time_norm(&s, 2.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((lp_time_norm(&s, 1.0).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(lp_time_norm(&s, f64::INFINITY).unwrap(), 3.0);
    }

    #[test]
    fn lp_rejects_bad_input() {
        assert!(lp_time_norm(&NormSeries::new("e"), 2.0).is_err());
        let s = NormSeries::from_parts("x", vec![0.0], vec![1.0]).unwrap();
        assert!(lp_time_norm(&s, 0.5).is_err());
        assert!(NormSeries::from_parts("x", vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(NormSeries::from_parts("x", vec![0.0], vec![-1.0]).is_err());
    }

    #[test]
    fn boundary_layer_closed_forms() {
        assert_eq!(boundary_layer_norm(5.0, 0.0, 2.0, 1.0), 0.0);
        let (c, a, t) = (3.0f64, 2.0, 0.7);
        let p1 = a * (1.0 - (-c * c * t).exp()) / (c * c);
        assert!((boundary_layer_norm(c, a, 1.0, t) - p1).abs() < 1e-15);
        assert_eq!(boundary_layer_norm(c, a, f64::INFINITY, t), a);
        let big = 1e3;
        assert!((boundary_layer_norm(big, a, 2.0, 0.5) * big - a / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn layered_norm_of_a_pure_layer_is_exact() {
        // Coarse sampling (κ dt = 10) of a pure layer: the analytic treatment
        // must still reproduce the closed form.
        let (c, a) = (10.0f64, 1.7f64);
        let mut s = LayeredSeries::new("layer", c * c, a * a);
        for i in 0..=50 {
            s.push(i as f64 * 0.01, 0.0, 0.0).unwrap();
        }
        for p in [1.0, 4.0 / 3.0, 2.0, 4.0] {
            let want = boundary_layer_norm(c, a, p, 0.5);
            let got = s.lp_norm(p).unwrap();
            assert!((got - want).abs() < 1e-9 * want, "p={p}: {got} vs {want}");
        }
        assert!((s.lp_norm(f64::INFINITY).unwrap() - a).abs() < 1e-15);
    }

    #[test]
    fn layered_norm_without_layer_is_trapezoid() {
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let vals: Vec<f64> = times.iter().map(|t| 1.0 + t * t).collect();
        let mut s = LayeredSeries::new("smooth", 100.0, 0.0);
        for (t, v) in times.iter().zip(&vals) {
            s.push(*t, v * v, 0.0).unwrap();
        }
        let plain = NormSeries::from_parts("p", times, vals).unwrap();
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            assert!((s.lp_norm(p).unwrap() - plain.lp_norm(p).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn audit_of_zero_data() {
        let z = AuditSample {
            t: 0.0,
            kinetic: 0.0,
            electric: 0.0,
            magnetic: 0.0,
            j_sq: Some(0.0),
            increment: None,
        };
        let l = energy_audit(&[z, AuditSample { t: 0.1, ..z }]).unwrap();
        assert_eq!(l.residual(1), 0.0);
        assert_eq!(l.residual(0), 0.0);
        let missing = AuditSample { t: 0.2, j_sq: None, ..z };
        assert!(matches!(
            energy_audit(&[z, missing]),
            Err(Error::Audit(_))
        ));
    }

    #[test]
    fn dt_ebar_of_linear_ramp() {
        let g = GridSpec::new(8).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_mode_pair([1, 0, 0], [Complex64::default(), Complex64::new(1.0, 0.5), Complex64::default()])
            .unwrap();
        let samples: Vec<(f64, SpectralField)> = (0..6).map(|i| (i as f64 * 0.1, &f * (i as f64 * 0.1))).collect();
        let d = dt_ebar_series(samples.iter().map(|(t, e)| (*t, e))).unwrap();
        assert_eq!(d.l2.len(), 6);
        let want = l2_norm(&f);
        for v in &d.l2.values {
            assert!((v - want).abs() < 1e-12 * want);
        }
        let constant: Vec<(f64, SpectralField)> = (0..4).map(|i| (i as f64, f.clone())).collect();
        let d = dt_ebar_series(constant.iter().map(|(t, e)| (*t, e))).unwrap();
        assert_eq!(d.linf_l2, 0.0);
        assert!(dt_ebar_series(samples[..2].iter().map(|(t, e)| (*t, e))).is_err());
    }

    #[test]
    fn xa_of_zero_state() {
        let g = GridSpec::new(8).unwrap();
        let ctx = SpectralContext::new(g);
        let z = SpectralField::zeros(g);
        let s = EmState::new(0.0, 2.0, z.clone(), z.clone(), z).unwrap();
        assert_eq!(diagnostic_xa(&ctx, &s, 3).unwrap(), (0.0, 0.0));
        assert!(diagnostic_xa(&ctx, &s, 2).is_err());
    }
}
