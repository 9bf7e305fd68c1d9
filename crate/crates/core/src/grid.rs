//! Grid geometry on the periodic box [0, 2π)³.

use crate::error::{Error, Result};

/// Number of modes per axis on a cubic periodic grid of side 2π.
///
/// Coefficients are stored in row-major order `(i0 * n + i1) * n + i2`.
/// Storage index `i` maps to wavenumber `i` for `i <= n/2` and to `i - n`
/// otherwise, so the Nyquist plane carries `+n/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub const MIN_N: usize = 4;
    pub const MAX_N: usize = 256;

    pub fn new(n: usize) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::Grid(format!("n = {n} must be even")));
        }
        if !(Self::MIN_N..=Self::MAX_N).contains(&n) {
            return Err(Error::Grid(format!(
                "n = {n} outside [{}, {}]",
                Self::MIN_N,
                Self::MAX_N
            )));
        }
        Ok(GridSpec { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of coefficients per scalar component.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest retained |k_i| under the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> usize {
        self.n / 3
    }

    /// Collocation spacing 2π/n.
    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n as f64
    }

    /// Signed wavenumber of storage index `i` (Nyquist maps to +n/2).
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Wavenumber used by spectral derivatives: zero on the Nyquist plane.
    #[inline]
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i) as f64
        }
    }

    /// Storage index of a signed wavenumber; `None` outside the grid.
    pub fn index_of(&self, k: [i64; 3]) -> Option<usize> {
        let n = self.n as i64;
        let mut idx = 0usize;
        for &kd in &k {
            if kd <= -n / 2 || kd > n / 2 {
                return None;
            }
            idx = idx * self.n + kd.rem_euclid(n) as usize;
        }
        Some(idx)
    }

    #[inline]
    pub fn index(&self, i0: usize, i1: usize, i2: usize) -> usize {
        (i0 * self.n + i1) * self.n + i2
    }

    #[inline]
    pub fn split(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    #[inline]
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let [a, b, c] = self.split(idx);
        [self.wavenumber(a), self.wavenumber(b), self.wavenumber(c)]
    }

    /// Storage index of −k.
    #[inline]
    pub fn conj_index(&self, idx: usize) -> usize {
        let n = self.n;
        let [a, b, c] = self.split(idx);
        self.index((n - a) % n, (n - b) % n, (n - c) % n)
    }

    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = self.n / 2;
        self.split(idx).contains(&h)
    }

    /// True when every |k_i| is within the dealiasing cutoff.
    #[inline]
    pub fn is_retained(&self, idx: usize) -> bool {
        let cut = self.dealias_cutoff() as i64;
        self.mode(idx).iter().all(|k| k.abs() <= cut)
    }

    /// Derivative wavevector for every storage index, in storage order.
    pub fn wavevectors(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        let n = self.n;
        (0..n).flat_map(move |a| {
            (0..n).flat_map(move |b| {
                (0..n).map(move |c| {
                    [
                        self.derivative_wavenumber(a),
                        self.derivative_wavenumber(b),
                        self.derivative_wavenumber(c),
                    ]
                })
            })
        })
    }

    /// Storage indices of the retained (dealiased) modes with their integer
    /// wavevectors, ordered by storage index.
    pub fn retained_modes(&self) -> Vec<(usize, [i64; 3])> {
        let cut = self.dealias_cutoff() as i64;
        let mut out = Vec::new();
        for k0 in -cut..=cut {
            for k1 in -cut..=cut {
                for k2 in -cut..=cut {
                    let k = [k0, k1, k2];
                    out.push((self.index_of(k).expect("retained mode on grid"), k));
                }
            }
        }
        out.sort_unstable_by_key(|(i, _)| *i);
        out
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self.n != other.n {
            Err(Error::GridMismatch {
                left: self.n,
                right: other.n,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(7).is_err());
        assert!(GridSpec::new(2).is_err());
        assert!(GridSpec::new(258).is_err());
        assert!(GridSpec::new(4).is_ok());
    }

    #[test]
    fn wavenumber_layout() {
        let g = GridSpec::new(8).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| g.wavenumber(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert_eq!(g.derivative_wavenumber(4), 0.0);
        assert_eq!(g.dealias_cutoff(), 2);
    }

    #[test]
    fn conj_index_is_involution() {
        let g = GridSpec::new(6).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.conj_index(g.conj_index(i)), i);
            if !g.is_nyquist(i) {
                let k = g.mode(i);
                assert_eq!(g.mode(g.conj_index(i)), [-k[0], -k[1], -k[2]]);
            }
        }
    }

    #[test]
    fn retained_count() {
        let g = GridSpec::new(32).unwrap();
        assert_eq!(g.retained_modes().len(), 21 * 21 * 21);
        assert!(g.retained_modes().iter().all(|(i, _)| g.is_retained(*i)));
    }
}
