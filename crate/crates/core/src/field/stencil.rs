use num_complex::Complex64;

use super::mesh::CylMesh;

/// Seven-point finite-volume operator `(A φ)_c = Σ_nb G_c,nb (φ_c − φ_nb)`
/// on a [`CylMesh`] whose conductivity depends only on the radial cell.
///
/// Face conductances therefore reduce to three per-row arrays, and the
/// operator is complex symmetric with zero row sums (pure Neumann).
#[derive(Debug, Clone)]
pub struct StencilMatrix {
    pub(crate) nr: usize,
    pub(crate) ntheta: usize,
    pub(crate) nz: usize,
    /// Conductance across the radial face between rows `i` and `i + 1`.
    pub(crate) g_r: Vec<Complex64>,
    /// Conductance across an azimuthal face in row `i`.
    pub(crate) g_t: Vec<Complex64>,
    /// Conductance across an axial face in row `i`.
    pub(crate) g_z: Vec<Complex64>,
}

impl StencilMatrix {
    /// Assembles face conductances from per-row complex conductivities,
    /// harmonically combining the two half-cells at every radial face.
    pub fn assemble(mesh: &CylMesh, sigma_row: &[Complex64]) -> Self {
        let nr = mesh.nr;
        assert_eq!(sigma_row.len(), nr);
        let (dt, dz) = (mesh.dtheta, mesh.dz);
        let rc = &mesh.r_centers;
        let rf = &mesh.r_faces;
        let g_r = (0..nr - 1)
            .map(|i| {
                let face = rf[i + 1];
                let res = (face / rc[i]).ln() / sigma_row[i] + (rc[i + 1] / face).ln() / sigma_row[i + 1];
                Complex64::new(dt * dz, 0.0) / res
            })
            .collect();
        let g_t = (0..nr)
            .map(|i| sigma_row[i] * (mesh.dr(i) * dz / (rc[i] * dt)))
            .collect();
        let g_z = (0..nr)
            .map(|i| sigma_row[i] * (0.5 * (rf[i + 1].powi(2) - rf[i].powi(2)) * dt / dz))
            .collect();
        Self {
            nr,
            ntheta: mesh.ntheta,
            nz: mesh.nz,
            g_r,
            g_t,
            g_z,
        }
    }

    pub fn dim(&self) -> usize {
        self.nr * self.ntheta * self.nz
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.ntheta + j) * self.nr + i
    }

    fn coords(&self, c: usize) -> (usize, usize, usize) {
        let i = c % self.nr;
        let j = (c / self.nr) % self.ntheta;
        let k = c / (self.nr * self.ntheta);
        (i, j, k)
    }

    /// Off-diagonal neighbours of cell `c` with their (positive) face
    /// conductance; the matrix entry is the negated conductance.
    pub fn neighbours(&self, c: usize) -> Vec<(usize, Complex64)> {
        let (i, j, k) = self.coords(c);
        let mut out = Vec::with_capacity(6);
        if i > 0 {
            out.push((self.idx(i - 1, j, k), self.g_r[i - 1]));
        }
        if i + 1 < self.nr {
            out.push((self.idx(i + 1, j, k), self.g_r[i]));
        }
        let jm = (j + self.ntheta - 1) % self.ntheta;
        let jp = (j + 1) % self.ntheta;
        out.push((self.idx(i, jm, k), self.g_t[i]));
        out.push((self.idx(i, jp, k), self.g_t[i]));
        if k > 0 {
            out.push((self.idx(i, j, k - 1), self.g_z[i]));
        }
        if k + 1 < self.nz {
            out.push((self.idx(i, j, k + 1), self.g_z[i]));
        }
        out
    }

    /// Sparse row `c` as `(column, value)` pairs including the diagonal.
    pub fn row(&self, c: usize) -> Vec<(usize, Complex64)> {
        let nb = self.neighbours(c);
        let diag: Complex64 = nb.iter().map(|(_, g)| g).sum();
        let mut row: Vec<(usize, Complex64)> = nb.into_iter().map(|(col, g)| (col, -g)).collect();
        row.push((c, diag));
        row.sort_by_key(|(col, _)| *col);
        row
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        let mut d = vec![Complex64::new(0.0, 0.0); self.dim()];
        for k in 0..self.nz {
            for j in 0..self.ntheta {
                for i in 0..self.nr {
                    let mut g = 2.0 * self.g_t[i];
                    if i > 0 {
                        g += self.g_r[i - 1];
                    }
                    if i + 1 < self.nr {
                        g += self.g_r[i];
                    }
                    if k > 0 {
                        g += self.g_z[i];
                    }
                    if k + 1 < self.nz {
                        g += self.g_z[i];
                    }
                    d[self.idx(i, j, k)] = g;
                }
            }
        }
        d
    }

    pub fn nnz(&self) -> usize {
        (0..self.dim()).map(|c| self.neighbours(c).len() + 1).sum()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let (nr, nt, nz) = (self.nr, self.ntheta, self.nz);
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        let plane = nr * nt;
        for k in 0..nz {
            for j in 0..nt {
                let jm = (j + nt - 1) % nt;
                let jp = (j + 1) % nt;
                let base = (k * nt + j) * nr;
                let base_m = (k * nt + jm) * nr;
                let base_p = (k * nt + jp) * nr;
                for i in 0..nr {
                    let c = base + i;
                    let xc = x[c];
                    let mut acc = self.g_t[i] * ((xc - x[base_m + i]) + (xc - x[base_p + i]));
                    if i > 0 {
                        acc += self.g_r[i - 1] * (xc - x[c - 1]);
                    }
                    if i + 1 < nr {
                        acc += self.g_r[i] * (xc - x[c + 1]);
                    }
                    if k > 0 {
                        acc += self.g_z[i] * (xc - x[c - plane]);
                    }
                    if k + 1 < nz {
                        acc += self.g_z[i] * (xc - x[c + plane]);
                    }
                    y[c] = acc;
                }
            }
        }
    }
}
