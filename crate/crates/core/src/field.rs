//! Spectral and physical field containers plus the transform context.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{DftProvider, RustFftProvider};
use crate::grid::GridSpec;

/// Real vector field stored as Fourier coefficients, f(x) = Σ f̂(k) e^{ik·x}.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    comps: [Vec<Complex64>; 3],
}

/// Real scalar field stored as Fourier coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalar {
    grid: GridSpec,
    data: Vec<Complex64>,
}

/// Vector field sampled on the n³ collocation grid x_j = 2π j / n.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    comps: [Vec<f64>; 3],
}

fn zero_vec(grid: &GridSpec) -> Vec<Complex64> {
    vec![Complex64::default(); grid.len()]
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            comps: [zero_vec(&grid), zero_vec(&grid), zero_vec(&grid)],
            grid,
        }
    }

    pub fn from_components(grid: GridSpec, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        for (d, c) in comps.iter().enumerate() {
            if c.len() != grid.len() {
                return Err(Error::InvalidArgument(format!(
                    "component {d} has {} coefficients, grid needs {}",
                    c.len(),
                    grid.len()
                )));
            }
        }
        Ok(SpectralField { grid, comps })
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    #[inline]
    pub fn component(&self, d: usize) -> &[Complex64] {
        &self.comps[d]
    }

    #[inline]
    pub fn component_mut(&mut self, d: usize) -> &mut [Complex64] {
        &mut self.comps[d]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: [Complex64; 3]) {
        for d in 0..3 {
            self.comps[d][idx] = v[d];
        }
    }

    /// Coefficient at signed wavevector `k` (zero if off-grid).
    pub fn mode(&self, k: [i64; 3]) -> [Complex64; 3] {
        match self.grid.index_of(k) {
            Some(i) => self.at(i),
            None => [Complex64::default(); 3],
        }
    }

    /// Sets f̂(k) = v and f̂(−k) = conj(v), keeping the field real.
    pub fn set_mode_pair(&mut self, k: [i64; 3], v: [Complex64; 3]) -> Result<()> {
        let i = self
            .grid
            .index_of(k)
            .ok_or_else(|| Error::InvalidArgument(format!("mode {k:?} not on grid")))?;
        let j = self.grid.conj_index(i);
        if i == j {
            self.set(i, [v[0].re.into(), v[1].re.into(), v[2].re.into()]);
        } else {
            self.set(i, v);
            self.set(j, [v[0].conj(), v[1].conj(), v[2].conj()]);
        }
        Ok(())
    }

    pub fn scale_in_place(&mut self, a: f64) {
        for c in &mut self.comps {
            c.iter_mut().for_each(|z| *z *= a);
        }
    }

    /// self += a·x.
    pub fn axpy(&mut self, a: f64, x: &SpectralField) {
        debug_assert_eq!(self.grid, x.grid);
        for d in 0..3 {
            for (y, &xv) in self.comps[d].iter_mut().zip(&x.comps[d]) {
                *y += xv * a;
            }
        }
    }

    pub fn lin_comb(terms: &[(f64, &SpectralField)]) -> SpectralField {
        let mut out = SpectralField::zeros(terms[0].1.grid);
        for (a, f) in terms {
            out.axpy(*a, f);
        }
        out
    }

    pub fn mean(&self) -> [Complex64; 3] {
        self.at(0)
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest |k·f̂(k)| / |f̂(k)| over nonzero modes.
    pub fn divergence_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (idx, k) in self.grid.wavevectors().enumerate() {
            let v = self.at(idx);
            let mag = (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
            if mag == 0.0 {
                continue;
            }
            let kd = v[0] * k[0] + v[1] * k[1] + v[2] * k[2];
            worst = worst.max(kd.norm() / mag);
        }
        worst
    }

    /// Largest |f̂(−k) − conj f̂(k)| relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.grid.len() {
            let j = self.grid.conj_index(i);
            for d in 0..3 {
                worst = worst.max((self.comps[d][j] - self.comps[d][i].conj()).norm());
            }
        }
        worst / scale
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self * -1.0
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale_in_place(a);
        out
    }
}

impl SpectralScalar {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralScalar {
            data: zero_vec(&grid),
            grid,
        }
    }

    pub fn from_data(grid: GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "scalar has {} coefficients, grid needs {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(SpectralScalar { grid, data })
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn mode(&self, k: [i64; 3]) -> Complex64 {
        self.grid
            .index_of(k)
            .map(|i| self.data[i])
            .unwrap_or_default()
    }

    pub fn set_mode_pair(&mut self, k: [i64; 3], v: Complex64) -> Result<()> {
        let i = self
            .grid
            .index_of(k)
            .ok_or_else(|| Error::InvalidArgument(format!("mode {k:?} not on grid")))?;
        let j = self.grid.conj_index(i);
        self.data[i] = v;
        self.data[j] = v.conj();
        if i == j {
            self.data[i] = v.re.into();
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl PhysicalField {
    pub fn zeros(grid: GridSpec) -> Self {
        let z = vec![0.0; grid.len()];
        PhysicalField {
            comps: [z.clone(), z.clone(), z],
            grid,
        }
    }

    pub fn from_components(grid: GridSpec, comps: [Vec<f64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != grid.len() {
                return Err(Error::InvalidArgument(
                    "physical component length does not match grid".into(),
                ));
            }
        }
        Ok(PhysicalField { grid, comps })
    }

    /// Samples `f` at every collocation point.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = PhysicalField::zeros(grid);
        let h = grid.spacing();
        let n = grid.n();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = f([a as f64 * h, b as f64 * h, c as f64 * h]);
                    let idx = grid.index(a, b, c);
                    for d in 0..3 {
                        out.comps[d][idx] = v[d];
                    }
                }
            }
        }
        out
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    #[inline]
    pub fn component(&self, d: usize) -> &[f64] {
        &self.comps[d]
    }

    #[inline]
    pub fn component_mut(&mut self, d: usize) -> &mut [f64] {
        &mut self.comps[d]
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|x| x.is_finite()))
    }

    /// Discrete L² norm (2π/n)³ Σ |f|², square-rooted.
    pub fn l2_quadrature(&self) -> f64 {
        let h3 = self.grid.spacing().powi(3);
        let s: f64 = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|x| x * x)
            .sum();
        (h3 * s).sqrt()
    }
}

/// Grid plus DFT provider; owns all spectral/physical conversions.
///
/// Real fields are transformed two at a time by packing them into the real
/// and imaginary parts of one complex transform.
#[derive(Clone, Debug)]
pub struct SpectralContext {
    grid: GridSpec,
    dft: Arc<dyn DftProvider>,
}

impl SpectralContext {
    pub fn new(grid: GridSpec) -> Self {
        SpectralContext {
            dft: Arc::new(RustFftProvider::new(grid.n())),
            grid,
        }
    }

    pub fn with_provider(grid: GridSpec, dft: Arc<dyn DftProvider>) -> Result<Self> {
        if dft.n() != grid.n() {
            return Err(Error::GridMismatch {
                left: grid.n(),
                right: dft.n(),
            });
        }
        Ok(SpectralContext { grid, dft })
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn provider(&self) -> &Arc<dyn DftProvider> {
        &self.dft
    }

    /// Inverse-transforms Hermitian coefficient arrays to real samples.
    pub fn inverse_many(&self, inputs: &[&[Complex64]]) -> Vec<Vec<f64>> {
        let len = self.grid.len();
        let scale = len as f64;
        let mut out = Vec::with_capacity(inputs.len());
        for pair in inputs.chunks(2) {
            let mut buf: Vec<Complex64> = match pair {
                [a, b] => a
                    .iter()
                    .zip(b.iter())
                    .map(|(&x, &y)| (x + Complex64::i() * y) * scale)
                    .collect(),
                [a] => a.iter().map(|&x| x * scale).collect(),
                _ => unreachable!(),
            };
            self.dft.inverse(&mut buf);
            out.push(buf.iter().map(|z| z.re).collect());
            if pair.len() == 2 {
                out.push(buf.iter().map(|z| z.im).collect());
            }
        }
        out
    }

    /// Forward-transforms real samples to coefficients (divided by n³),
    /// symmetrised to exact Hermitian form with the Nyquist planes cleared.
    pub fn forward_many(&self, inputs: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let g = self.grid;
        let len = g.len();
        let scale = 1.0 / len as f64;
        let mut out = Vec::with_capacity(inputs.len());
        for pair in inputs.chunks(2) {
            let mut buf: Vec<Complex64> = match pair {
                [a, b] => a
                    .iter()
                    .zip(b.iter())
                    .map(|(&x, &y)| Complex64::new(x, y))
                    .collect(),
                [a] => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                _ => unreachable!(),
            };
            self.dft.forward(&mut buf);
            let mut fa = vec![Complex64::default(); len];
            let mut fb = vec![Complex64::default(); len];
            for i in 0..len {
                if g.is_nyquist(i) {
                    continue;
                }
                let h = buf[i] * scale;
                let hc = buf[g.conj_index(i)].conj() * scale;
                fa[i] = (h + hc) * 0.5;
                fb[i] = (h - hc) * Complex64::new(0.0, -0.5);
            }
            out.push(fa);
            if pair.len() == 2 {
                out.push(fb);
            }
        }
        out
    }

    pub fn to_physical(&self, f: &SpectralField) -> PhysicalField {
        let mut v = self.to_physical_many(&[f]);
        v.pop().expect("one field")
    }

    pub fn to_physical_many(&self, fields: &[&SpectralField]) -> Vec<PhysicalField> {
        let inputs: Vec<&[Complex64]> = fields
            .iter()
            .flat_map(|f| (0..3).map(move |d| f.component(d)))
            .collect();
        let mut flat = self.inverse_many(&inputs).into_iter();
        fields
            .iter()
            .map(|_| {
                let c0 = flat.next().expect("component");
                let c1 = flat.next().expect("component");
                let c2 = flat.next().expect("component");
                PhysicalField {
                    grid: self.grid,
                    comps: [c0, c1, c2],
                }
            })
            .collect()
    }

    pub fn from_physical(&self, f: &PhysicalField) -> SpectralField {
        let mut v = self.from_physical_many(&[f]);
        v.pop().expect("one field")
    }

    pub fn from_physical_many(&self, fields: &[&PhysicalField]) -> Vec<SpectralField> {
        let inputs: Vec<&[f64]> = fields
            .iter()
            .flat_map(|f| (0..3).map(move |d| f.component(d)))
            .collect();
        let mut flat = self.forward_many(&inputs).into_iter();
        fields
            .iter()
            .map(|_| {
                let c0 = flat.next().expect("component");
                let c1 = flat.next().expect("component");
                let c2 = flat.next().expect("component");
                SpectralField {
                    grid: self.grid,
                    comps: [c0, c1, c2],
                }
            })
            .collect()
    }

    pub fn scalar_to_physical(&self, f: &SpectralScalar) -> Vec<f64> {
        self.inverse_many(&[f.data()]).pop().expect("one scalar")
    }

    pub fn scalar_from_physical(&self, x: &[f64]) -> SpectralScalar {
        SpectralScalar {
            grid: self.grid,
            data: self.forward_many(&[x]).pop().expect("one scalar"),
        }
    }
}
