//! Differential operators, projection, dealiasing, norms and products.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralContext, SpectralField, SpectralScalar};
use crate::grid::GridSpec;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// (2π)³, the volume of the periodic box.
pub const BOX_VOLUME: f64 = 248.050_213_442_398_56;

#[inline]
fn cross_c(k: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    [
        v[2] * k[1] - v[1] * k[2],
        v[0] * k[2] - v[2] * k[0],
        v[1] * k[0] - v[0] * k[1],
    ]
}

/// (curl f)^(k) = i k × f̂(k).
pub fn curl(f: &SpectralField) -> SpectralField {
    let g = f.grid();
    let mut out = SpectralField::zeros(g);
    for (idx, k) in g.wavevectors().enumerate() {
        let c = cross_c(k, f.at(idx));
        out.set(idx, [I * c[0], I * c[1], I * c[2]]);
    }
    out
}

/// (div f)^(k) = i k·f̂(k).
pub fn divergence(f: &SpectralField) -> SpectralScalar {
    let g = f.grid();
    let mut out = SpectralScalar::zeros(g);
    let data = out.data_mut();
    for (idx, k) in g.wavevectors().enumerate() {
        let v = f.at(idx);
        data[idx] = I * (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]);
    }
    out
}

/// (∇φ)^(k) = i k φ̂(k).
pub fn gradient(phi: &SpectralScalar) -> SpectralField {
    let g = phi.grid();
    let mut out = SpectralField::zeros(g);
    for (idx, k) in g.wavevectors().enumerate() {
        let p = I * phi.data()[idx];
        out.set(idx, [p * k[0], p * k[1], p * k[2]]);
    }
    out
}

/// Leray projection. The mean mode must already be zero.
pub fn leray_project(f: &SpectralField) -> Result<SpectralField> {
    let m = f.mean();
    let mean = (m[0].norm_sqr() + m[1].norm_sqr() + m[2].norm_sqr()).sqrt();
    let scale = f.max_abs();
    if mean > 1e-12 * scale.max(f64::MIN_POSITIVE) && mean > 0.0 {
        return Err(Error::InvalidArgument(format!(
            "leray_project: nonzero mean mode (|f̂(0)| = {mean:e})"
        )));
    }
    Ok(project(f))
}

/// Leray projection that also clears the mean mode.
pub fn project(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    project_in_place(&mut out);
    out
}

pub fn project_in_place(f: &mut SpectralField) {
    let g = f.grid();
    for (idx, k) in g.wavevectors().enumerate() {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            f.set(idx, [Complex64::default(); 3]);
            continue;
        }
        let v = f.at(idx);
        let kv = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
        f.set(idx, [v[0] - kv * k[0], v[1] - kv * k[1], v[2] - kv * k[2]]);
    }
}

/// 2/3-rule truncation: zero every mode with some |k_i| above the cutoff.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(f: &mut SpectralField) {
    let g = f.grid();
    let n = g.n();
    let cut = g.dealias_cutoff();
    let keep = |i: usize| i <= cut || i >= n - cut;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if !(keep(a) && keep(b) && keep(c)) {
                    f.set(g.index(a, b, c), [Complex64::default(); 3]);
                }
            }
        }
    }
}

/// Weighted coefficient energy (2π)³ Σ w(|k|²) |f̂(k)|², using the true
/// (non-derivative) wavenumbers.
fn weighted_energy(f: &SpectralField, w: impl Fn(f64) -> f64) -> f64 {
    let g = f.grid();
    let n = g.n();
    let mut total = 0.0;
    for a in 0..n {
        let ka = g.wavenumber(a) as f64;
        for b in 0..n {
            let kb = g.wavenumber(b) as f64;
            for c in 0..n {
                let kc = g.wavenumber(c) as f64;
                let idx = g.index(a, b, c);
                let v = f.at(idx);
                let e = v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr();
                if e != 0.0 {
                    total += w(ka * ka + kb * kb + kc * kc) * e;
                }
            }
        }
    }
    BOX_VOLUME * total
}

/// H^s norm with multiplier (1 + |k|²)^s on |f̂|².
pub fn sobolev_norm(f: &SpectralField, s: f64) -> Result<f64> {
    if s < 0.0 || !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sobolev_norm: s = {s} must be finite and >= 0"
        )));
    }
    Ok(if s == 0.0 {
        weighted_energy(f, |_| 1.0).sqrt()
    } else if s == 1.0 {
        weighted_energy(f, |k2| 1.0 + k2).sqrt()
    } else {
        weighted_energy(f, |k2| (1.0 + k2).powf(s)).sqrt()
    })
}

pub fn l2_norm(f: &SpectralField) -> f64 {
    weighted_energy(f, |_| 1.0).sqrt()
}

/// Homogeneous seminorm ‖∇f‖.
pub fn grad_norm(f: &SpectralField) -> f64 {
    weighted_energy(f, |k2| k2).sqrt()
}

/// L² inner product (2π)³ Re Σ f̂·conj(ĝ).
pub fn inner(f: &SpectralField, g: &SpectralField) -> f64 {
    let mut s = 0.0;
    for d in 0..3 {
        for (a, b) in f.component(d).iter().zip(g.component(d)) {
            s += a.re * b.re + a.im * b.im;
        }
    }
    BOX_VOLUME * s
}

/// Max over collocation points of |f(x)|.
pub fn linf_norm(ctx: &SpectralContext, f: &SpectralField) -> f64 {
    physical_linf(&ctx.to_physical(f))
}

pub fn physical_linf(p: &PhysicalField) -> f64 {
    let (a, b, c) = (p.component(0), p.component(1), p.component(2));
    let mut m: f64 = 0.0;
    for i in 0..a.len() {
        m = m.max(a[i] * a[i] + b[i] * b[i] + c[i] * c[i]);
    }
    m.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    /// a × b
    Cross,
    /// (a·∇) b
    Advection,
}

/// Pointwise cross product of two physical fields.
pub fn cross_physical(a: &PhysicalField, b: &PhysicalField) -> PhysicalField {
    let g = a.grid();
    let mut out = PhysicalField::zeros(g);
    for i in 0..g.len() {
        let x = a.at(i);
        let y = b.at(i);
        out.component_mut(0)[i] = x[1] * y[2] - x[2] * y[1];
        out.component_mut(1)[i] = x[2] * y[0] - x[0] * y[2];
        out.component_mut(2)[i] = x[0] * y[1] - x[1] * y[0];
    }
    out
}

/// Pseudo-spectral product with 2/3-rule dealiasing of the result.
pub fn product_fields(
    ctx: &SpectralContext,
    a: &SpectralField,
    b: &SpectralField,
    kind: ProductKind,
) -> Result<SpectralField> {
    a.grid().ensure_same(&b.grid())?;
    a.grid().ensure_same(&ctx.grid())?;
    let mut out = match kind {
        ProductKind::Cross => {
            let p = ctx.to_physical_many(&[a, b]);
            ctx.from_physical(&cross_physical(&p[0], &p[1]))
        }
        ProductKind::Advection => {
            let g = a.grid();
            // ∂_j b as three vector fields, one per direction j.
            let mut grads = vec![SpectralField::zeros(g); 3];
            for (idx, k) in g.wavevectors().enumerate() {
                let v = b.at(idx);
                for (j, gj) in grads.iter_mut().enumerate() {
                    let f = I * k[j];
                    gj.set(idx, [v[0] * f, v[1] * f, v[2] * f]);
                }
            }
            let p = ctx.to_physical_many(&[a, &grads[0], &grads[1], &grads[2]]);
            let mut res = PhysicalField::zeros(g);
            for i in 0..g.len() {
                let av = p[0].at(i);
                for d in 0..3 {
                    res.component_mut(d)[i] = av[0] * p[1].component(d)[i]
                        + av[1] * p[2].component(d)[i]
                        + av[2] * p[3].component(d)[i];
                }
            }
            ctx.from_physical(&res)
        }
    };
    dealias_in_place(&mut out);
    Ok(out)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mode_seed(seed: u64, k: [i64; 3]) -> u64 {
    let mut h = splitmix64(seed);
    for kd in k {
        h = splitmix64(h ^ (kd as u64));
    }
    h
}

fn is_canonical(k: [i64; 3]) -> bool {
    k[0] > 0 || (k[0] == 0 && (k[1] > 0 || (k[1] == 0 && k[2] > 0)))
}

/// Seeded random solenoidal field with |f̂(k)| = amplitude (1+|k|²)^{−decay/2}
/// on every retained mode k ≠ 0.
///
/// Each mode draws from its own generator keyed on (seed, k), so the same
/// seed gives the same low modes on every grid size.
pub fn random_divfree_field(
    grid: GridSpec,
    seed: u64,
    amplitude: f64,
    decay: f64,
) -> Result<SpectralField> {
    if !(decay > 3.5) {
        return Err(Error::InvalidArgument(format!(
            "random_divfree_field: decay = {decay} must exceed 7/2"
        )));
    }
    if !amplitude.is_finite() {
        return Err(Error::InvalidArgument("amplitude must be finite".into()));
    }
    let mut f = SpectralField::zeros(grid);
    for (_, k) in grid.retained_modes() {
        if !is_canonical(k) {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(seed, k));
        let mut v = [Complex64::default(); 3];
        for z in &mut v {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *z = Complex64::new(re, im);
        }
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        let k2 = kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2];
        let kv = (v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2]) / k2;
        for d in 0..3 {
            v[d] -= kv * kf[d];
        }
        let mag = (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
        let target = amplitude * (1.0 + k2).powf(-decay / 2.0);
        let s = if mag > 0.0 { target / mag } else { 0.0 };
        f.set_mode_pair(k, [v[0] * s, v[1] * s, v[2] * s])?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn box_volume_constant() {
        assert!((BOX_VOLUME - (2.0 * std::f64::consts::PI).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn curl_of_cosine() {
        let ctx = SpectralContext::new(g(8));
        let f = ctx.from_physical(&PhysicalField::from_fn(g(8), |x| [0.0, x[0].cos(), 0.0]));
        let c = ctx.to_physical(&curl(&f));
        let expect = PhysicalField::from_fn(g(8), |x| [0.0, 0.0, -x[0].sin()]);
        for d in 0..3 {
            for (a, b) in c.component(d).iter().zip(expect.component(d)) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn divergence_of_sine() {
        let ctx = SpectralContext::new(g(8));
        let f = ctx.from_physical(&PhysicalField::from_fn(g(8), |x| [x[0].sin(), 0.0, 0.0]));
        let d = ctx.scalar_to_physical(&divergence(&f));
        let h = g(8).spacing();
        for (i, v) in d.iter().enumerate() {
            let x0 = (i / 64) as f64 * h;
            assert!((v - x0.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn dealias_examples() {
        let grid = g(8);
        let mut f = SpectralField::zeros(grid);
        let one = Complex64::new(1.0, 0.0);
        f.set_mode_pair([3, 0, 0], [Complex64::default(), one, one]).unwrap();
        f.set_mode_pair([1, 1, 1], [one, -one, Complex64::default()]).unwrap();
        let d = dealias(&f);
        assert_eq!(d.mode([3, 0, 0]), [Complex64::default(); 3]);
        assert_eq!(d.mode([1, 1, 1]), f.mode([1, 1, 1]));
        assert!(l2_norm(&d) <= l2_norm(&f));
    }

    #[test]
    fn leray_rejects_mean() {
        let mut f = SpectralField::zeros(g(4));
        f.set(0, [Complex64::new(1.0, 0.0), Complex64::default(), Complex64::default()]);
        assert!(leray_project(&f).is_err());
        assert!(sobolev_norm(&f, -1.0).is_err());
    }

    #[test]
    fn random_field_is_deterministic_and_solenoidal() {
        let a = random_divfree_field(g(16), 11, 1.0, 6.0).unwrap();
        let b = random_divfree_field(g(16), 11, 1.0, 6.0).unwrap();
        assert_eq!(a, b);
        assert!(a.divergence_defect() <= 1e-12);
        assert_eq!(a.hermitian_defect(), 0.0);
        assert_eq!(a.mean(), [Complex64::default(); 3]);
        assert!(random_divfree_field(g(16), 11, 1.0, 3.0).is_err());
    }
}
