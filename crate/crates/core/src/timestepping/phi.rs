//! φ-functions φ_k(z) = Σ_m z^m / (m+k)! for scalars and real 2×2 blocks.

use num_complex::Complex64;

/// Real 2×2 matrix, row-major.
pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

fn factorials(kmax: usize) -> Vec<f64> {
    let mut f = vec![1.0; kmax + 2];
    for j in 1..f.len() {
        f[j] = f[j - 1] * j as f64;
    }
    f
}

/// e^z − 1 without cancellation near z = 0.
fn expm1_c(z: Complex64) -> Complex64 {
    let s = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * s * s,
        z.re.exp() * z.im.sin(),
    )
}

/// Σ_m z^m / (m+k)!, used only where |z| < k + 1 so terms decrease.
fn phi_series(z: Complex64, k: usize) -> Complex64 {
    let mut term = Complex64::new(1.0 / factorials(k)[k], 0.0);
    let mut sum = term;
    for m in 1..400 {
        term *= z / (m + k) as f64;
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// φ_0(z), …, φ_kmax(z).
///
/// Indices j < |z| come from the upward recursion φ_{j+1} = (φ_j − 1/j!)/z
/// started at e^z; the rest from a series for φ_kmax followed by the
/// downward recursion φ_j = z φ_{j+1} + 1/j!. Each recursion is only run in
/// the direction where it does not cancel.
pub fn phi_scalar(z: Complex64, kmax: usize) -> Vec<Complex64> {
    let fact = factorials(kmax);
    let mut out = vec![Complex64::default(); kmax + 1];
    out[0] = z.exp();
    if kmax == 0 {
        return out;
    }
    let r = z.norm();
    let jstar = if r >= 1.0 {
        (r.floor() as usize).min(kmax)
    } else {
        0
    };
    if jstar >= 1 {
        out[1] = expm1_c(z) / z;
        for j in 1..jstar {
            out[j + 1] = (out[j] - 1.0 / fact[j]) / z;
        }
    }
    if kmax > jstar {
        out[kmax] = phi_series(z, kmax);
        for j in (jstar + 1..kmax).rev() {
            out[j] = z * out[j + 1] + 1.0 / fact[j];
        }
    }
    out
}

/// (φ0, φ1, φ2) of a complex argument.
pub fn phi_functions(z: Complex64) -> [Complex64; 3] {
    let v = phi_scalar(z, 2);
    [v[0], v[1], v[2]]
}

/// Real-argument convenience wrapper.
pub fn phi_real(x: f64, kmax: usize) -> Vec<f64> {
    phi_scalar(Complex64::new(x, 0.0), kmax)
        .into_iter()
        .map(|z| z.re)
        .collect()
}

/// Below this |δ|, with δ² the discriminant of the block, the Taylor
/// expansion about the mean eigenvalue replaces the eigenvalue formula.
const TAYLOR_RADIUS: f64 = 0.5;
const TAYLOR_TERMS: usize = 11;

/// φ_0(A), …, φ_kmax(A) for a real 2×2 matrix.
///
/// Uses f(A) = e·I + o·(A − μI) with μ = tr A / 2, where e and o are the even
/// and odd divided differences of f at the two eigenvalues. Near a double
/// eigenvalue they are evaluated as Taylor series in δ² = ((a−d)/2)² + bc.
pub fn phi_matrix(a: &Mat2, kmax: usize) -> Vec<Mat2> {
    let mu = 0.5 * (a[0][0] + a[1][1]);
    let hd = 0.5 * (a[0][0] - a[1][1]);
    let disc = hd * hd + a[0][1] * a[1][0];
    let mut even = vec![0.0; kmax + 1];
    let mut odd = vec![0.0; kmax + 1];

    if disc.abs() < TAYLOR_RADIUS * TAYLOR_RADIUS {
        let top = kmax + 2 * TAYLOR_TERMS + 1;
        let ph = phi_real(mu, top);
        let fact = factorials(2 * TAYLOR_TERMS + 1);
        for k in 0..=kmax {
            // D^j φ_k = Σ_i C(j,i) (−1)^i k(k+1)…(k+i−1) φ_{k+i}
            let deriv = |j: usize| -> f64 {
                let mut s = 0.0;
                let mut binom = 1.0;
                let mut rising = 1.0;
                for i in 0..=j {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    s += sign * binom * rising * ph[k + i];
                    binom = binom * (j - i) as f64 / (i + 1) as f64;
                    rising *= (k + i) as f64;
                }
                s
            };
            let mut pw = 1.0;
            for m in 0..TAYLOR_TERMS {
                even[k] += deriv(2 * m) * pw / fact[2 * m];
                odd[k] += deriv(2 * m + 1) * pw / fact[2 * m + 1];
                pw *= disc;
            }
        }
    } else if disc > 0.0 {
        let s = disc.sqrt();
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        // larger-magnitude root first, the other from the product
        let l1 = if mu <= 0.0 { mu - s } else { mu + s };
        let l2 = det / l1;
        let f1 = phi_real(l1, kmax);
        let f2 = phi_real(l2, kmax);
        for k in 0..=kmax {
            even[k] = 0.5 * (f1[k] + f2[k]);
            odd[k] = (f1[k] - f2[k]) / (l1 - l2);
        }
    } else {
        let w = (-disc).sqrt();
        let f = phi_scalar(Complex64::new(mu, w), kmax);
        for k in 0..=kmax {
            even[k] = f[k].re;
            odd[k] = f[k].im / w;
        }
    }

    (0..=kmax)
        .map(|k| {
            [
                [even[k] + odd[k] * hd, odd[k] * a[0][1]],
                [odd[k] * a[1][0], even[k] - odd[k] * hd],
            ]
        })
        .collect()
}

pub fn mat_scale(m: &Mat2, s: f64) -> Mat2 {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}
