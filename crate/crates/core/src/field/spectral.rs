//! Direct solver for the layered-cylinder stencil.
//!
//! With conductivity constant on every radial row, the operator separates:
//! a DFT in azimuth (periodic) and a DCT-II in the axial direction
//! (insulated ends, cell-centred) diagonalise the angular and axial
//! couplings, leaving one complex tridiagonal radial system per mode pair.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustdct::{DctPlanner, TransformType2And3};
use rustfft::{Fft, FftPlanner};

use super::stencil::StencilMatrix;

pub struct SpectralSolver {
    nr: usize,
    nt: usize,
    nz: usize,
    g_r: Vec<Complex64>,
    g_t: Vec<Complex64>,
    g_z: Vec<Complex64>,
    lam_t: Vec<f64>,
    lam_z: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    dct: Arc<dyn TransformType2And3<f64>>,
}

impl SpectralSolver {
    pub fn new(a: &StencilMatrix) -> Self {
        let (nr, nt, nz) = (a.nr, a.ntheta, a.nz);
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(nt);
        let ifft = planner.plan_fft_inverse(nt);
        let dct = DctPlanner::new().plan_dct2(nz);
        let lam_t = (0..nt)
            .map(|m| 2.0 - 2.0 * (2.0 * PI * m as f64 / nt as f64).cos())
            .collect();
        let lam_z = (0..nz)
            .map(|q| 2.0 - 2.0 * (PI * q as f64 / nz as f64).cos())
            .collect();
        Self {
            nr,
            nt,
            nz,
            g_r: a.g_r.clone(),
            g_t: a.g_t.clone(),
            g_z: a.g_z.clone(),
            lam_t,
            lam_z,
            fft,
            ifft,
            dct,
        }
    }

    /// Returns one solution of `A x = b` for consistent `b` (zero sum).
    /// The additive constant is arbitrary; callers fix the gauge.
    pub fn solve(&self, b: &[Complex64], x: &mut [Complex64]) {
        let (nr, nt, nz) = (self.nr, self.nt, self.nz);
        x.copy_from_slice(b);

        self.azimuthal(x, false);
        self.axial(x, false);

        let mut diag = vec![Complex64::new(0.0, 0.0); nr];
        let mut scratch = vec![Complex64::new(0.0, 0.0); nr];
        for q in 0..nz {
            for m in 0..nt {
                let base = (q * nt + m) * nr;
                for i in 0..nr {
                    let mut d = self.g_t[i] * self.lam_t[m] + self.g_z[i] * self.lam_z[q];
                    if i > 0 {
                        d += self.g_r[i - 1];
                    }
                    if i + 1 < nr {
                        d += self.g_r[i];
                    }
                    diag[i] = d;
                }
                let rhs = &mut x[base..base + nr];
                if m == 0 && q == 0 {
                    // Null mode: pin the innermost value, the remaining
                    // equations determine the rest.
                    rhs[0] = Complex64::new(0.0, 0.0);
                    thomas(&self.g_r[1..], &diag[1..], &mut rhs[1..], &mut scratch[1..]);
                } else {
                    thomas(&self.g_r, &diag, rhs, &mut scratch);
                }
            }
        }

        self.axial(x, true);
        self.azimuthal(x, true);
    }

    fn azimuthal(&self, x: &mut [Complex64], inverse: bool) {
        let (nr, nt, nz) = (self.nr, self.nt, self.nz);
        let mut buf = vec![Complex64::new(0.0, 0.0); nt];
        let plan = if inverse { &self.ifft } else { &self.fft };
        let scale = if inverse { 1.0 / nt as f64 } else { 1.0 };
        for k in 0..nz {
            for i in 0..nr {
                for (j, v) in buf.iter_mut().enumerate() {
                    *v = x[(k * nt + j) * nr + i];
                }
                plan.process(&mut buf);
                for (j, v) in buf.iter().enumerate() {
                    x[(k * nt + j) * nr + i] = v * scale;
                }
            }
        }
    }

    fn axial(&self, x: &mut [Complex64], inverse: bool) {
        let (nr, nt, nz) = (self.nr, self.nt, self.nz);
        let mut re = vec![0.0; nz];
        let mut im = vec![0.0; nz];
        let scale = if inverse { 2.0 / nz as f64 } else { 1.0 };
        for m in 0..nt {
            for i in 0..nr {
                for k in 0..nz {
                    let v = x[(k * nt + m) * nr + i];
                    re[k] = v.re;
                    im[k] = v.im;
                }
                if inverse {
                    self.dct.process_dct3(&mut re);
                    self.dct.process_dct3(&mut im);
                } else {
                    self.dct.process_dct2(&mut re);
                    self.dct.process_dct2(&mut im);
                }
                for k in 0..nz {
                    x[(k * nt + m) * nr + i] = Complex64::new(re[k], im[k]) * scale;
                }
            }
        }
    }
}

/// Solves the symmetric tridiagonal system with diagonal `diag` and
/// off-diagonals `-g[i]` (coupling rows `i` and `i + 1`), in place.
fn thomas(g: &[Complex64], diag: &[Complex64], rhs: &mut [Complex64], c: &mut [Complex64]) {
    let n = diag.len();
    if n == 0 {
        return;
    }
    // forward sweep; c holds the modified super-diagonal
    let mut denom = diag[0];
    c[0] = if n > 1 { -g[0] / denom } else { Complex64::new(0.0, 0.0) };
    rhs[0] /= denom;
    for i in 1..n {
        let sub = -g[i - 1];
        denom = diag[i] - sub * c[i - 1];
        c[i] = if i + 1 < n { -g[i] / denom } else { Complex64::new(0.0, 0.0) };
        rhs[i] = (rhs[i] - sub * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= c[i] * next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dct_round_trip_scaling() {
        let n = 12;
        let dct = DctPlanner::new().plan_dct2(n);
        let x: Vec<f64> = (0..n).map(|k| (k as f64 * 0.7).sin() + 0.1 * k as f64).collect();
        let mut y = x.clone();
        dct.process_dct2(&mut y);
        dct.process_dct3(&mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b * 2.0 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn thomas_matches_dense_solve() {
        let g = [Complex64::new(1.0, 0.2), Complex64::new(0.5, 0.1), Complex64::new(2.0, 0.0)];
        let diag = [
            Complex64::new(3.0, 0.5),
            Complex64::new(2.0, 0.4),
            Complex64::new(4.0, 0.0),
            Complex64::new(2.5, 0.1),
        ];
        let b = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.5),
            Complex64::new(2.0, 0.0),
        ];
        let mut x = b;
        let mut c = [Complex64::new(0.0, 0.0); 4];
        thomas(&g, &diag, &mut x, &mut c);
        for i in 0..4 {
            let mut r = diag[i] * x[i];
            if i > 0 {
                r -= g[i - 1] * x[i - 1];
            }
            if i < 3 {
                r -= g[i] * x[i + 1];
            }
            assert!((r - b[i]).norm() < 1e-12);
        }
    }
}
