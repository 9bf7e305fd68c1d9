//! Exact per-mode propagators for the damped Maxwell (telegraph) block and
//! the heat semigroup.
//!
//! On the plane orthogonal to k, write s = i k̂× (so s² = 1 there). The
//! linear Maxwell part acts as (E, B) ↦ (cκ sB − c²E, −cκ sE) with κ = |k|,
//! i.e. as the real 2×2 block [[−c², cκ], [−cκ, 0]] with s attached to the
//! off-diagonal entries. Any function of the operator is then
//! [[f₀₀, f₀₁ s], [f₁₀ s, f₁₁]] with f the same function of the block.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use super::phi::{phi_matrix, phi_real, Mat2};
use crate::error::{Error, Result};
use crate::grid::GridSpec;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The real telegraph block for wavenumber magnitude κ.
pub fn telegraph_block(kappa: f64, c: f64) -> Mat2 {
    [[-c * c, c * kappa], [-c * kappa, 0.0]]
}

/// φ_0..φ_kmax of dt times the telegraph block; diagonal closed form at κ = 0.
pub fn telegraph_phis(kappa: f64, c: f64, dt: f64, kmax: usize) -> Vec<Mat2> {
    if kappa == 0.0 {
        let d = phi_real(-c * c * dt, kmax);
        let one = phi_real(0.0, kmax);
        return (0..=kmax).map(|j| [[d[j], 0.0], [0.0, one[j]]]).collect();
    }
    let m = telegraph_block(kappa, c);
    let a = [
        [m[0][0] * dt, m[0][1] * dt],
        [m[1][0] * dt, m[1][1] * dt],
    ];
    phi_matrix(&a, kmax)
}

/// Exact step of the linear Maxwell block for one wavevector.
#[derive(Clone, Debug, PartialEq)]
pub struct ModePropagator {
    pub k: [f64; 3],
    pub c: f64,
    pub dt: f64,
    /// exp(dt·L)
    pub homogeneous: Mat2,
    /// φ₁(dt·L)
    pub phi1: Mat2,
    /// φ₂(dt·L)
    pub phi2: Mat2,
}

pub fn build_propagator(k: [f64; 3], c: f64, dt: f64) -> Result<ModePropagator> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt = {dt} must be >= 0")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("c = {c} must be > 0")));
    }
    let kappa = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let f = telegraph_phis(kappa, c, dt, 2);
    Ok(ModePropagator {
        k,
        c,
        dt,
        homogeneous: f[0],
        phi1: f[1],
        phi2: f[2],
    })
}

impl ModePropagator {
    pub fn unit_k(&self) -> [f64; 3] {
        unit(self.k)
    }

    /// exp(dt·L) applied to (Ê, B̂).
    pub fn apply(&self, e: [Complex64; 3], b: [Complex64; 3]) -> ([Complex64; 3], [Complex64; 3]) {
        apply_block(&self.homogeneous, self.unit_k(), e, b)
    }
}

fn unit(k: [f64; 3]) -> [f64; 3] {
    let n = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    if n == 0.0 {
        [0.0; 3]
    } else {
        [k[0] / n, k[1] / n, k[2] / n]
    }
}

/// s v = i k̂ × v.
#[inline]
pub fn s_op(khat: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    [
        I * (v[2] * khat[1] - v[1] * khat[2]),
        I * (v[0] * khat[2] - v[2] * khat[0]),
        I * (v[1] * khat[0] - v[0] * khat[1]),
    ]
}

/// [[m₀₀, m₀₁ s], [m₁₀ s, m₁₁]] applied to (e, b).
#[inline]
pub fn apply_block(
    m: &Mat2,
    khat: [f64; 3],
    e: [Complex64; 3],
    b: [Complex64; 3],
) -> ([Complex64; 3], [Complex64; 3]) {
    let se = s_op(khat, e);
    let sb = s_op(khat, b);
    let mut eo = [Complex64::default(); 3];
    let mut bo = [Complex64::default(); 3];
    for d in 0..3 {
        eo[d] = e[d] * m[0][0] + sb[d] * m[0][1];
        bo[d] = se[d] * m[1][0] + b[d] * m[1][1];
    }
    (eo, bo)
}

/// Per-storage-index wavevector data shared by all steppers on a grid.
#[derive(Debug)]
pub struct ModeTable {
    pub grid: GridSpec,
    /// (unit wavevector, integer |k|²) per storage index
    pub entries: Vec<([f64; 3], usize)>,
    pub max_k2: usize,
}

impl ModeTable {
    pub fn new(grid: GridSpec) -> Self {
        let entries: Vec<([f64; 3], usize)> = grid
            .wavevectors()
            .map(|k| {
                let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).round() as usize;
                (unit(k), k2)
            })
            .collect();
        let max_k2 = entries.iter().map(|e| e.1).max().unwrap_or(0);
        ModeTable {
            grid,
            entries,
            max_k2,
        }
    }
}

/// φ_0..φ_kmax of the telegraph block for every integer |k|² on a grid.
#[derive(Debug)]
pub struct TelegraphTable {
    pub c: f64,
    pub h: f64,
    pub phis: Vec<Vec<Mat2>>,
}

impl TelegraphTable {
    pub fn new(c: f64, h: f64, max_k2: usize, kmax: usize) -> Self {
        let phis = (0..=max_k2)
            .map(|k2| telegraph_phis((k2 as f64).sqrt(), c, h, kmax))
            .collect();
        TelegraphTable { c, h, phis }
    }
}

/// φ_0..φ_kmax(−|k|²h) for every integer |k|².
#[derive(Debug)]
pub struct HeatTable {
    pub h: f64,
    pub phis: Vec<Vec<f64>>,
}

impl HeatTable {
    pub fn new(h: f64, max_k2: usize, kmax: usize) -> Self {
        let phis = (0..=max_k2)
            .map(|k2| phi_real(-(k2 as f64) * h, kmax))
            .collect();
        HeatTable { h, phis }
    }
}

/// Lazily built propagator tables keyed by step size.
#[derive(Debug)]
pub struct PropagatorCache {
    pub modes: Arc<ModeTable>,
    /// speed of light; `None` for the heat-only cache
    pub c: Option<f64>,
    kmax: usize,
    telegraph: Mutex<HashMap<u64, Arc<TelegraphTable>>>,
    heat: Mutex<HashMap<u64, Arc<HeatTable>>>,
}

impl PropagatorCache {
    pub fn maxwell(grid: GridSpec, c: f64, kmax: usize) -> Self {
        Self::build(grid, Some(c), kmax)
    }

    pub fn heat(grid: GridSpec, kmax: usize) -> Self {
        Self::build(grid, None, kmax)
    }

    fn build(grid: GridSpec, c: Option<f64>, kmax: usize) -> Self {
        PropagatorCache {
            modes: Arc::new(ModeTable::new(grid)),
            c,
            kmax,
            telegraph: Mutex::new(HashMap::new()),
            heat: Mutex::new(HashMap::new()),
        }
    }

    pub fn telegraph(&self, h: f64) -> Arc<TelegraphTable> {
        let c = self.c.expect("telegraph table needs c");
        let mut map = self.telegraph.lock().expect("cache lock");
        map.entry(h.to_bits())
            .or_insert_with(|| Arc::new(TelegraphTable::new(c, h, self.modes.max_k2, self.kmax)))
            .clone()
    }

    pub fn heat_table(&self, h: f64) -> Arc<HeatTable> {
        let mut map = self.heat.lock().expect("cache lock");
        map.entry(h.to_bits())
            .or_insert_with(|| Arc::new(HeatTable::new(h, self.modes.max_k2, self.kmax)))
            .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mode_closed_form() {
        let p = build_propagator([0.0; 3], 3.0, 0.1).unwrap();
        assert_eq!(p.homogeneous, [[(-0.9f64).exp(), 0.0], [0.0, 1.0]]);
        assert!(build_propagator([1.0, 0.0, 0.0], 3.0, -0.1).is_err());
    }

    #[test]
    fn heat_limit_of_b_entry() {
        for &c in &[10.0, 100.0, 1000.0] {
            for kk in 1..=4 {
                let p = build_propagator([kk as f64, 0.0, 0.0], c, 0.05).unwrap();
                let heat = (-(kk * kk) as f64 * 0.05).exp();
                let rel = (p.homogeneous[1][1] - heat).abs() / heat;
                assert!(rel <= 10.0 / (c * c), "c={c} k={kk}: {rel}");
            }
        }
    }

    #[test]
    fn spectral_radius_at_most_one() {
        for &c in &[0.5, 2.0, 30.0] {
            for kk in 0..12 {
                let p = build_propagator([kk as f64 * 0.7, 0.3, 0.0], c, 0.2).unwrap();
                let m = p.homogeneous;
                let tr = m[0][0] + m[1][1];
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                let disc = tr * tr / 4.0 - det;
                let r = if disc >= 0.0 {
                    (tr / 2.0).abs() + disc.sqrt()
                } else {
                    det.sqrt()
                };
                assert!(r <= 1.0 + 1e-12);
            }
        }
    }
}
