//! Dense complex matrix exponential by scaling and squaring with a
//! truncated Taylor series, plus φ₁, φ₂ through the augmented matrix
//! [[A, I, 0], [0, 0, I], [0, 0, 0]].

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<Complex64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense {
            n,
            a: vec![Complex64::default(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Dense::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.n + j] = v;
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == Complex64::default() {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Dense {
        Dense {
            n: self.n,
            a: self.a.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, o: &Dense) -> Dense {
        Dense {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect(),
        }
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn block(&self, r0: usize, c0: usize, m: usize) -> Dense {
        let mut out = Dense::zeros(m);
        for i in 0..m {
            for j in 0..m {
                out.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        out
    }
}

const TAYLOR_DEGREE: usize = 24;

pub fn expm(a: &Dense) -> Dense {
    let norm = a.norm1();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a.scaled(scale);
    let mut term = Dense::identity(a.n);
    let mut sum = Dense::identity(a.n);
    for k in 1..=TAYLOR_DEGREE {
        term = term.mul(&x).scaled(1.0 / k as f64);
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}

/// (e^A, φ₁(A), φ₂(A)).
pub fn expm_phi(a: &Dense) -> (Dense, Dense, Dense) {
    let m = a.n;
    let mut big = Dense::zeros(3 * m);
    for i in 0..m {
        for j in 0..m {
            big.set(i, j, a.get(i, j));
        }
        big.set(i, m + i, Complex64::new(1.0, 0.0));
        big.set(m + i, 2 * m + i, Complex64::new(1.0, 0.0));
    }
    let e = expm(&big);
    (e.block(0, 0, m), e.block(0, m, m), e.block(0, 2 * m, m))
}
