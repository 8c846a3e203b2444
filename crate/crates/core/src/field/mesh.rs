use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{wrap_angle, ArmModel, ElectrodeDisc};

/// Resolution and tolerance of the cylindrical finite-volume discretisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSpec {
    /// Total radial cells, distributed over layers (at least 3 per layer).
    pub nr: usize,
    pub ntheta: usize,
    pub nz: usize,
    /// Relative residual target of the iterative solve.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            nr: 24,
            ntheta: 96,
            nz: 240,
            tol: 1e-9,
            max_iter: 500,
        }
    }
}

impl MeshSpec {
    pub fn new(nr: usize, ntheta: usize, nz: usize) -> Self {
        Self {
            nr,
            ntheta,
            nz,
            ..Self::default()
        }
    }

    /// All three resolutions multiplied by `k`.
    pub fn refined(&self, k: usize) -> Self {
        Self {
            nr: self.nr * k,
            ntheta: self.ntheta * k,
            nz: self.nz * k,
            ..*self
        }
    }
}

pub(crate) const MIN_CELLS_PER_LAYER: usize = 3;
pub(crate) const MIN_CELLS_ACROSS_DISC: usize = 8;

/// Cell-centred cylindrical grid. Radial faces follow layer boundaries,
/// azimuth and axis are uniform. Cell `(i, j, k)` (radial, azimuthal,
/// axial) is stored at `(k * ntheta + j) * nr + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylMesh {
    pub nr: usize,
    pub ntheta: usize,
    pub nz: usize,
    /// `nr + 1` radial face positions, `r_faces[0] = 0`.
    pub r_faces: Vec<f64>,
    pub r_centers: Vec<f64>,
    /// Layer index of each radial cell.
    pub layer_of: Vec<usize>,
    pub dtheta: f64,
    pub dz: f64,
    pub length: f64,
}

impl CylMesh {
    pub fn new(arm: &ArmModel, spec: &MeshSpec) -> Result<Self> {
        let nl = arm.layers.len();
        if spec.nr < MIN_CELLS_PER_LAYER * nl {
            return Err(Error::Config(format!(
                "nr = {} cannot give {} layers {} radial cells each",
                spec.nr, nl, MIN_CELLS_PER_LAYER
            )));
        }
        if spec.ntheta < 4 || spec.nz < 4 {
            return Err(Error::Config("ntheta and nz must be >= 4".into()));
        }
        let counts = distribute_cells(arm, spec.nr);
        let mut r_faces = vec![0.0];
        let mut layer_of = Vec::with_capacity(spec.nr);
        let mut inner = 0.0;
        for (l, (layer, &n)) in arm.layers.iter().zip(&counts).enumerate() {
            let h = (layer.outer_radius - inner) / n as f64;
            for c in 1..=n {
                r_faces.push(if c == n { layer.outer_radius } else { inner + h * c as f64 });
                layer_of.push(l);
            }
            inner = layer.outer_radius;
        }
        let r_centers = r_faces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(Self {
            nr: spec.nr,
            ntheta: spec.ntheta,
            nz: spec.nz,
            r_faces,
            r_centers,
            layer_of,
            dtheta: 2.0 * PI / spec.ntheta as f64,
            dz: arm.length / spec.nz as f64,
            length: arm.length,
        })
    }

    pub fn len(&self) -> usize {
        self.nr * self.ntheta * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.ntheta + j) * self.nr + i
    }

    pub fn radius(&self) -> f64 {
        self.r_faces[self.nr]
    }

    pub fn theta_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dtheta
    }

    pub fn z_center(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dz
    }

    pub fn dr(&self, i: usize) -> f64 {
        self.r_faces[i + 1] - self.r_faces[i]
    }

    /// Area of the outer (skin-surface) face of a surface cell.
    pub fn surface_face_area(&self) -> f64 {
        self.radius() * self.dtheta * self.dz
    }

    /// Radial cell counts per layer.
    pub fn cells_per_layer(&self) -> Vec<usize> {
        let nl = self.layer_of.last().map_or(0, |l| l + 1);
        let mut v = vec![0; nl];
        for &l in &self.layer_of {
            v[l] += 1;
        }
        v
    }

    /// Surface cells `(j, k)` whose centres lie on the disc.
    pub fn disc_cells(&self, e: &ElectrodeDisc) -> Vec<(usize, usize)> {
        let r = self.radius();
        let mut out = Vec::new();
        for k in 0..self.nz {
            let dz = self.z_center(k) - e.z;
            if dz.abs() > e.radius {
                continue;
            }
            for j in 0..self.ntheta {
                let arc = r * wrap_angle(self.theta_center(j) - e.theta);
                if dz * dz + arc * arc <= e.radius * e.radius {
                    out.push((j, k));
                }
            }
        }
        out
    }

    /// Cells spanned along the axial and azimuthal diameters of a disc.
    pub fn cells_across(&self, e: &ElectrodeDisc) -> (usize, usize) {
        let r = self.radius();
        let nz = (0..self.nz)
            .filter(|&k| (self.z_center(k) - e.z).abs() <= e.radius)
            .count();
        let nt = (0..self.ntheta)
            .filter(|&j| (r * wrap_angle(self.theta_center(j) - e.theta)).abs() <= e.radius)
            .count();
        (nz, nt)
    }
}

/// Splits `nr` radial cells over the layers: three each, the remainder by
/// largest-remainder apportionment on layer thickness.
fn distribute_cells(arm: &ArmModel, nr: usize) -> Vec<usize> {
    let nl = arm.layers.len();
    let mut thick = Vec::with_capacity(nl);
    let mut inner = 0.0;
    for l in &arm.layers {
        thick.push(l.outer_radius - inner);
        inner = l.outer_radius;
    }
    let total: f64 = thick.iter().sum();
    let extra = nr - MIN_CELLS_PER_LAYER * nl;
    let quotas: Vec<f64> = thick.iter().map(|t| extra as f64 * t / total).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut left = extra - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..nl).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &l in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[l] += 1;
        left -= 1;
    }
    counts.iter().map(|c| c + MIN_CELLS_PER_LAYER).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_mesh_resolves_every_layer() {
        let m = CylMesh::new(&ArmModel::default(), &MeshSpec::default()).unwrap();
        let per = m.cells_per_layer();
        assert_eq!(per.iter().sum::<usize>(), 24);
        assert!(per.iter().all(|&n| n >= 3), "{per:?}");
        assert_eq!(m.r_faces.len(), 25);
        assert!((m.radius() - 0.035).abs() < 1e-15);
        // layer boundaries are faces
        for l in &ArmModel::default().layers {
            assert!(m.r_faces.iter().any(|r| (r - l.outer_radius).abs() < 1e-15));
        }
    }

    #[test]
    fn too_few_radial_cells_rejected() {
        assert!(CylMesh::new(&ArmModel::default(), &MeshSpec::new(11, 96, 240)).is_err());
    }
}
