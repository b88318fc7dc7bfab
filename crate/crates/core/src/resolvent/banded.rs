//! Complex banded LU with partial pivoting, LAPACK `gbtf2`/`gbtrs` layout:
//! `A(i, j)` lives at `ab[j * ldab + kv + i - j]` with `kv = kl + ku`, and
//! the top `kl` rows of each column hold pivoting fill-in.

use num_complex::Complex64;

use super::ResolventError;

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<Complex64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Factors the `n x n` matrix with `kl` sub- and `ku` super-diagonals.
    /// `entry(i, j)` is only called inside the band.
    pub fn factor<F>(n: usize, kl: usize, ku: usize, entry: F) -> Result<Self, ResolventError>
    where
        F: Fn(usize, usize) -> Complex64,
    {
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![Complex64::new(0.0, 0.0); ldab * n];
        for j in 0..n {
            let lo = j.saturating_sub(ku);
            let hi = (j + kl).min(n - 1);
            for i in lo..=hi {
                ab[j * ldab + kv + i - j] = entry(i, j);
            }
        }
        let mut ipiv = vec![0; n];
        let at = |i: usize, j: usize| j * ldab + kv + i - j;
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = ab[at(j, j)].norm_sqr();
            for t in 1..=km {
                let v = ab[at(j + t, j)].norm_sqr();
                if v > best {
                    best = v;
                    jp = t;
                }
            }
            ipiv[j] = j + jp;
            if best == 0.0 || !best.is_finite() {
                return Err(ResolventError::FactorizationFailed { column: j });
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    ab.swap(at(j, c), at(j + jp, c));
                }
            }
            if km > 0 {
                let inv = ab[at(j, j)].inv();
                for t in 1..=km {
                    ab[at(j + t, j)] *= inv;
                }
                for c in j + 1..=ju {
                    let u = ab[at(j, c)];
                    if u == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for t in 1..=km {
                        let l = ab[at(j + t, j)];
                        ab[at(j + t, c)] -= l * u;
                    }
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            ldab,
            ab,
            ipiv,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Overwrites `b` with `A^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        assert_eq!(b.len(), self.n);
        let (n, kl, ldab) = (self.n, self.kl, self.ldab);
        let kv = self.kl + self.ku;
        for j in 0..n {
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
            let lm = kl.min(n - 1 - j);
            let bj = b[j];
            for t in 1..=lm {
                b[j + t] -= self.ab[j * ldab + kv + t] * bj;
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[j * ldab + kv];
            let bj = b[j];
            for i in j.saturating_sub(kv)..j {
                b[i] -= self.ab[j * ldab + kv + i - j] * bj;
            }
        }
    }
}
