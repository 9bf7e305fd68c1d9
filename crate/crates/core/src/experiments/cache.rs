//! The MHD trajectory of a sweep, computed once and shared by every c.
//!
//! Fields are stored on one representative of each ± pair of the modes
//! they occupy (the 2/3-retained set for dealiased data), which keeps a
//! few hundred snapshots at n = 32 in memory.

use std::sync::Arc;

use num_complex::Complex64;

use crate::diagnostics::{energy_audit, mhd_audit_sample, AuditSample, DtEbar, DtEbarAccumulator, EnergyLedger};
use crate::dynamics::{compute_ebar, MhdState};
use crate::error::Result;
use crate::field::{SpectralContext, SpectralField};
use crate::grid::GridSpec;
use crate::timestepping::{run_mhd, PropagatorCache, StepperConfig};

/// Storage indices of one representative per conjugate pair, plus the mean.
#[derive(Debug)]
pub struct Support {
    grid: GridSpec,
    indices: Vec<usize>,
}

fn canonical(k: [i64; 3]) -> bool {
    k[0] > 0 || (k[0] == 0 && (k[1] > 0 || (k[1] == 0 && k[2] >= 0)))
}

impl Support {
    /// The smallest standard support containing every given field: the
    /// retained modes if all fields are dealiased, all modes otherwise.
    pub fn covering(grid: GridSpec, fields: &[&SpectralField]) -> Arc<Self> {
        let dealiased = fields.iter().all(|f| {
            (0..grid.len()).all(|i| grid.is_retained(i) || f.at(i).iter().all(|z| *z == Complex64::default()))
        });
        let indices = (0..grid.len())
            .filter(|&i| !grid.is_nyquist(i) && (!dealiased || grid.is_retained(i)))
            .filter(|&i| canonical(grid.mode(i)))
            .collect();
        Arc::new(Support { grid, indices })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// A Hermitian field stored on a [`Support`].
#[derive(Clone, Debug)]
pub struct CompactField {
    support: Arc<Support>,
    data: Vec<[Complex64; 3]>,
}

impl CompactField {
    pub fn pack(support: &Arc<Support>, f: &SpectralField) -> Self {
        CompactField {
            support: Arc::clone(support),
            data: support.indices.iter().map(|&i| f.at(i)).collect(),
        }
    }

    pub fn unpack(&self) -> SpectralField {
        let g = self.support.grid;
        let mut out = SpectralField::zeros(g);
        for (&i, v) in self.support.indices.iter().zip(&self.data) {
            out.set(i, *v);
            let j = g.conj_index(i);
            if j != i {
                out.set(j, [v[0].conj(), v[1].conj(), v[2].conj()]);
            }
        }
        out
    }
}

/// ū, B̄ and Ē at every node of a uniform grid, with the MHD energy ledger
/// and the ∂tĒ norms.
#[derive(Debug)]
pub struct MhdCache {
    pub dt: f64,
    pub nsteps: usize,
    u: Vec<CompactField>,
    b: Vec<CompactField>,
    ebar: Vec<CompactField>,
    /// ‖j̄(t_i)‖² = ‖∇×B̄(t_i)‖²
    pub jbar_sq: Vec<f64>,
    pub ledger: EnergyLedger,
    pub dt_ebar: DtEbar,
}

impl MhdCache {
    pub fn build(
        ctx: &SpectralContext,
        init: &MhdState,
        cfg: &StepperConfig,
        dt: f64,
        nsteps: usize,
    ) -> Result<Self> {
        let grid = ctx.grid();
        let props = PropagatorCache::heat(grid, 2);
        let support = Support::covering(grid, &[&init.u, &init.b]);
        let mut u = Vec::with_capacity(nsteps + 1);
        let mut b = Vec::with_capacity(nsteps + 1);
        let mut ebar = Vec::with_capacity(nsteps + 1);
        let mut audit: Vec<AuditSample> = Vec::with_capacity(nsteps + 1);
        let mut dte = DtEbarAccumulator::new();
        run_mhd(ctx, &props, init, cfg, dt, nsteps, |_, it| {
            let s = it.state();
            let e = it.ebar().clone();
            u.push(CompactField::pack(&support, &s.u));
            b.push(CompactField::pack(&support, &s.b));
            ebar.push(CompactField::pack(&support, &e));
            audit.push(mhd_audit_sample(&s));
            dte.push(s.t, &e)
        })?;
        let ledger = energy_audit(&audit)?;
        let jbar_sq = audit.iter().map(|a| a.j_sq.unwrap_or(0.0)).collect();
        debug_assert!({
            let mut d = compute_ebar(ctx, init);
            d.axpy(-1.0, &ebar[0].unpack());
            d.max_abs() <= 1e-12 * (1.0 + ebar[0].unpack().max_abs())
        });
        Ok(MhdCache {
            dt,
            nsteps,
            u,
            b,
            ebar,
            jbar_sq,
            ledger,
            dt_ebar: dte.finish()?,
        })
    }

    pub fn u(&self, i: usize) -> SpectralField {
        self.u[i].unpack()
    }

    pub fn b(&self, i: usize) -> SpectralField {
        self.b[i].unpack()
    }

    pub fn ebar(&self, i: usize) -> SpectralField {
        self.ebar[i].unpack()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn state(&self, i: usize) -> MhdState {
        MhdState {
            t: self.time(i),
            u: self.u(i),
            b: self.b(i),
        }
    }

    /// ∫₀^{t_i} ‖j̄‖² by the trapezoid rule.
    pub fn dissipation(&self, i: usize) -> f64 {
        self.ledger.dissipation[i]
    }
}
