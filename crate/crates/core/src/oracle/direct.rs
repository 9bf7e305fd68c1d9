//! Direct O(n⁶) transforms and k-space formulas, written without touching
//! the FFT path. Samples and coefficients share the layout (a·n + b)·n + c,
//! with x = 2π(a, b, c)/n.

use num_complex::Complex64;
use std::f64::consts::PI;

pub type Coef3 = [Vec<Complex64>; 3];
pub type Samples3 = [Vec<f64>; 3];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Signed wavenumber for index i; `None` on the Nyquist plane.
pub fn wave(n: usize, i: usize) -> Option<i64> {
    let h = n / 2;
    match i.cmp(&h) {
        std::cmp::Ordering::Less => Some(i as i64),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(i as i64 - n as i64),
    }
}

/// Wavevector at a flat index, `None` if any component sits at Nyquist.
pub fn kvec(n: usize, idx: usize) -> Option<[i64; 3]> {
    let (a, b, c) = (idx / (n * n), (idx / n) % n, idx % n);
    Some([wave(n, a)?, wave(n, b)?, wave(n, c)?])
}

fn flat(n: usize, k: [i64; 3]) -> usize {
    let m = |v: i64| v.rem_euclid(n as i64) as usize;
    (m(k[0]) * n + m(k[1])) * n + m(k[2])
}

fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|m| Complex64::from_polar(1.0, sign * 2.0 * PI * m as f64 / n as f64))
        .collect()
}

/// f̂(k) = n⁻³ Σ_x f(x) e^{−ik·x}, Nyquist coefficients set to zero.
pub fn dft(n: usize, f: &[f64]) -> Vec<Complex64> {
    let tw = twiddles(n, -1.0);
    let len = n * n * n;
    let mut out = vec![Complex64::default(); len];
    for (kidx, o) in out.iter_mut().enumerate() {
        if kvec(n, kidx).is_none() {
            continue;
        }
        let (ka, kb, kc) = (kidx / (n * n), (kidx / n) % n, kidx % n);
        let mut s = Complex64::default();
        for (xidx, &v) in f.iter().enumerate() {
            let (a, b, c) = (xidx / (n * n), (xidx / n) % n, xidx % n);
            s += tw[(ka * a + kb * b + kc * c) % n] * v;
        }
        *o = s / len as f64;
    }
    out
}

/// f(x) = Re Σ_k f̂(k) e^{ik·x}.
pub fn idft(n: usize, fh: &[Complex64]) -> Vec<f64> {
    let tw = twiddles(n, 1.0);
    let len = n * n * n;
    let mut out = vec![0.0; len];
    for (xidx, o) in out.iter_mut().enumerate() {
        let (a, b, c) = (xidx / (n * n), (xidx / n) % n, xidx % n);
        let mut s = Complex64::default();
        for (kidx, &v) in fh.iter().enumerate() {
            let (ka, kb, kc) = (kidx / (n * n), (kidx / n) % n, kidx % n);
            s += tw[(ka * a + kb * b + kc * c) % n] * v;
        }
        *o = s.re;
    }
    out
}

pub fn dft3(n: usize, f: &Samples3) -> Coef3 {
    [dft(n, &f[0]), dft(n, &f[1]), dft(n, &f[2])]
}

pub fn idft3(n: usize, f: &Coef3) -> Samples3 {
    [idft(n, &f[0]), idft(n, &f[1]), idft(n, &f[2])]
}

fn zeros3(len: usize) -> Coef3 {
    [
        vec![Complex64::default(); len],
        vec![Complex64::default(); len],
        vec![Complex64::default(); len],
    ]
}

fn get(f: &Coef3, i: usize) -> [Complex64; 3] {
    [f[0][i], f[1][i], f[2][i]]
}

fn put(f: &mut Coef3, i: usize, v: [Complex64; 3]) {
    for d in 0..3 {
        f[d][i] = v[d];
    }
}

fn kf(k: [i64; 3]) -> [f64; 3] {
    [k[0] as f64, k[1] as f64, k[2] as f64]
}

fn cross(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn ik(k: [i64; 3]) -> [Complex64; 3] {
    let k = kf(k);
    [I * k[0], I * k[1], I * k[2]]
}

/// Applies a per-mode map to every non-Nyquist coefficient.
pub fn map3(
    n: usize,
    f: &Coef3,
    op: impl Fn([i64; 3], [Complex64; 3]) -> [Complex64; 3],
) -> Coef3 {
    let len = n * n * n;
    let mut out = zeros3(len);
    for i in 0..len {
        if let Some(k) = kvec(n, i) {
            put(&mut out, i, op(k, get(f, i)));
        }
    }
    out
}

pub fn curl(n: usize, f: &Coef3) -> Coef3 {
    map3(n, f, |k, v| cross(ik(k), v))
}

pub fn div(n: usize, f: &Coef3) -> Vec<Complex64> {
    let len = n * n * n;
    (0..len)
        .map(|i| match kvec(n, i) {
            Some(k) => {
                let a = ik(k);
                let v = get(f, i);
                a[0] * v[0] + a[1] * v[1] + a[2] * v[2]
            }
            None => Complex64::default(),
        })
        .collect()
}

pub fn grad(n: usize, p: &[Complex64]) -> Coef3 {
    let len = n * n * n;
    let mut out = zeros3(len);
    for (i, &pv) in p.iter().enumerate() {
        if let Some(k) = kvec(n, i) {
            let a = ik(k);
            put(&mut out, i, [a[0] * pv, a[1] * pv, a[2] * pv]);
        }
    }
    out
}

/// v − k (k·v)/|k|², with the mean mode dropped.
pub fn leray(n: usize, f: &Coef3) -> Coef3 {
    map3(n, f, |k, v| {
        let k = kf(k);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            return [Complex64::default(); 3];
        }
        let kv = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
        [v[0] - kv * k[0], v[1] - kv * k[1], v[2] - kv * k[2]]
    })
}

fn retained(n: usize, k: [i64; 3]) -> bool {
    let cut = (n / 3) as i64;
    k.iter().all(|v| v.abs() <= cut)
}

pub fn truncate(n: usize, f: &Coef3) -> Coef3 {
    map3(n, f, |k, v| {
        if retained(n, k) {
            v
        } else {
            [Complex64::default(); 3]
        }
    })
}

/// Exact convolution Σ_{p+q=k} â(p) × b̂(q) over retained p, q, kept on
/// retained k (no wrap-around).
pub fn convolve_cross(n: usize, a: &Coef3, b: &Coef3) -> Coef3 {
    convolve(n, a, b, |_, av, bv| cross(av, bv))
}

/// Exact convolution Σ_{p+q=k} (â(p)·iq) b̂(q).
pub fn convolve_advection(n: usize, a: &Coef3, b: &Coef3) -> Coef3 {
    convolve(n, a, b, |q, av, bv| {
        let iq = ik(q);
        let s = av[0] * iq[0] + av[1] * iq[1] + av[2] * iq[2];
        [s * bv[0], s * bv[1], s * bv[2]]
    })
}

fn convolve(
    n: usize,
    a: &Coef3,
    b: &Coef3,
    term: impl Fn([i64; 3], [Complex64; 3], [Complex64; 3]) -> [Complex64; 3],
) -> Coef3 {
    let len = n * n * n;
    let modes: Vec<[i64; 3]> = (0..len)
        .filter_map(|i| kvec(n, i))
        .filter(|&k| retained(n, k))
        .collect();
    let mut out = zeros3(len);
    for &k in &modes {
        let mut s = [Complex64::default(); 3];
        for &p in &modes {
            let q = [k[0] - p[0], k[1] - p[1], k[2] - p[2]];
            if !retained(n, q) {
                continue;
            }
            let t = term(q, get(a, flat(n, p)), get(b, flat(n, q)));
            for d in 0..3 {
                s[d] += t[d];
            }
        }
        put(&mut out, flat(n, k), s);
    }
    out
}

/// (2π/n)³ Σ_x (|f|² + s Σ_j |∂_j f|²) for s ∈ {0, 1}, on the Nyquist-free
/// part of f.
pub fn sobolev_sq_quadrature(n: usize, f: &Samples3, s: f64) -> f64 {
    let fh = dft3(n, f);
    let filtered = idft3(n, &fh);
    let w = (2.0 * PI / n as f64).powi(3);
    let mut total: f64 = filtered.iter().flat_map(|c| c.iter()).map(|v| v * v).sum();
    if s != 0.0 {
        for j in 0..3 {
            let dj = map3(n, &fh, |k, v| {
                let f = I * k[j] as f64;
                [v[0] * f, v[1] * f, v[2] * f]
            });
            let dx = idft3(n, &dj);
            total += s * dx.iter().flat_map(|c| c.iter()).map(|v| v * v).sum::<f64>();
        }
    }
    w * total
}

pub fn add3(a: &Coef3, b: &Coef3, wa: f64, wb: f64) -> Coef3 {
    let mut out = a.clone();
    for d in 0..3 {
        for (o, (x, y)) in out[d].iter_mut().zip(a[d].iter().zip(b[d].iter())) {
            *o = x * wa + y * wb;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_of_a_single_mode() {
        let n = 4;
        let len = n * n * n;
        let f: Vec<f64> = (0..len)
            .map(|i| {
                let b = ((i / n) % n) as f64 * 2.0 * PI / n as f64;
                (b).cos()
            })
            .collect();
        let fh = dft(n, &f);
        assert!((fh[flat(n, [0, 1, 0])] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((fh[flat(n, [0, -1, 0])] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let back = idft(n, &fh);
        for (x, y) in f.iter().zip(back.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn convolution_of_two_modes() {
        let n = 4;
        let len = n * n * n;
        let mut a = zeros3(len);
        let mut b = zeros3(len);
        a[0][flat(n, [1, 0, 0])] = Complex64::new(1.0, 0.0);
        b[1][flat(n, [0, 1, 0])] = Complex64::new(1.0, 0.0);
        let c = convolve_cross(n, &a, &b);
        assert_eq!(c[2][flat(n, [1, 1, 0])], Complex64::new(1.0, 0.0));
    }
}
