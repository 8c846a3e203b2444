//! Electro-quasistatic potential in the layered cylindrical arm.
//!
//! `∇·(σ̂ ∇Φ) = 0` is discretised by finite volumes on a cell-centred
//! cylindrical grid. The skin and arm ends are insulating except under the
//! driven discs, which inject a uniform normal current density. Because
//! σ̂ varies only with radius the operator separates and the spectral
//! solver in [`spectral`] inverts it exactly; BiCGSTAB wraps it to certify
//! the residual (and runs with Jacobi preconditioning as a cross-check).

mod krylov;
mod mesh;
mod spectral;
mod stencil;

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::response::FrequencyGrid;
use crate::scenario::{ElectrodeDisc, Polarity, Port, Scenario};
use crate::tissue::complex_conductivity;

pub use krylov::{bicgstab, SolveStats};
pub use mesh::{CylMesh, MeshSpec};
pub use spectral::SpectralSolver;
pub use stencil::StencilMatrix;

use mesh::MIN_CELLS_ACROSS_DISC;

/// Preconditioner used inside the Krylov iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    /// Exact separable inverse (FFT in θ, DCT in z, tridiagonal in r).
    #[default]
    Spectral,
    /// Diagonal scaling; slow, only meant for small cross-check grids.
    Jacobi,
}

/// Assembled finite-volume problem for one frequency and one driven port.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub mesh: CylMesh,
    pub frequency: f64,
    /// Complex conductivity of each radial cell row, S/m.
    pub sigma_row: Vec<Complex64>,
    pub matrix: StencilMatrix,
    /// Injected current per cell, A.
    pub source: Vec<Complex64>,
    pub driven: Port,
    pub i0: f64,
    pub max_iter: usize,
}

impl DiscreteSystem {
    /// Net injected current; zero up to rounding by construction.
    pub fn net_source(&self) -> Complex64 {
        self.source.iter().sum()
    }
}

/// Assembles the Tx-driven system.
pub fn assemble(s: &Scenario, f: f64, spec: &MeshSpec) -> Result<DiscreteSystem> {
    assemble_driven(s, f, spec, Port::Tx)
}

/// Assembles the system with current `±I0` injected through the discs of
/// `driven`.
pub fn assemble_driven(s: &Scenario, f: f64, spec: &MeshSpec, driven: Port) -> Result<DiscreteSystem> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::domain(format!("frequency must be positive and finite, got {f}")));
    }
    let mesh = CylMesh::new(&s.arm, spec)?;
    for e in s.electrodes() {
        let (nz, nt) = mesh.cells_across(e);
        if nz < MIN_CELLS_ACROSS_DISC || nt < MIN_CELLS_ACROSS_DISC {
            return Err(Error::Config(format!(
                "{:?}{} disc spans {nz} axial x {nt} azimuthal cells, need {MIN_CELLS_ACROSS_DISC}",
                e.port,
                e.polarity.sign_char()
            )));
        }
    }
    let mut sigma_layer = Vec::with_capacity(s.arm.layers.len());
    for layer in &s.arm.layers {
        sigma_layer.push(complex_conductivity(s.tissues.get(&layer.tissue)?, f)?);
    }
    let sigma_row: Vec<Complex64> = mesh.layer_of.iter().map(|&l| sigma_layer[l]).collect();
    let matrix = StencilMatrix::assemble(&mesh, &sigma_row);

    let mut source = vec![Complex64::new(0.0, 0.0); mesh.len()];
    let outer = mesh.nr - 1;
    for e in s.electrodes().iter().filter(|e| e.port == driven) {
        let cells = footprint(&mesh, e)?;
        let per = s.i0 * e.polarity.sign() / cells.len() as f64;
        for (j, k) in cells {
            source[mesh.idx(outer, j, k)] += per;
        }
    }
    Ok(DiscreteSystem {
        mesh,
        frequency: f,
        sigma_row,
        matrix,
        source,
        driven,
        i0: s.i0,
        max_iter: spec.max_iter,
    })
}

fn footprint(mesh: &CylMesh, e: &ElectrodeDisc) -> Result<Vec<(usize, usize)>> {
    let cells = mesh.disc_cells(e);
    if cells.is_empty() {
        return Err(Error::Extraction(format!(
            "{:?}{} disc at z = {} m has no surface cells",
            e.port,
            e.polarity.sign_char(),
            e.z
        )));
    }
    Ok(cells)
}

/// Solved potential, gauged to zero mean over the skin surface.
#[derive(Debug, Clone)]
pub struct PotentialField {
    pub mesh: CylMesh,
    pub frequency: f64,
    /// Cell-centre potential, V.
    pub phi: Vec<Complex64>,
    pub residual: f64,
    pub stats: SolveStats,
    pub driven: Port,
    pub i0: f64,
    sigma_row: Vec<Complex64>,
    source: Vec<Complex64>,
    matrix: StencilMatrix,
}

pub fn solve_potential(sys: &DiscreteSystem, tol: f64) -> Result<PotentialField> {
    solve_potential_with(sys, tol, Preconditioner::Spectral)
}

pub fn solve_potential_with(sys: &DiscreteSystem, tol: f64, pc: Preconditioner) -> Result<PotentialField> {
    let n = sys.mesh.len();
    let mut phi = vec![Complex64::new(0.0, 0.0); n];
    let a = &sys.matrix;
    let apply = |x: &[Complex64], y: &mut [Complex64]| a.apply(x, y);
    let stats = match pc {
        Preconditioner::Spectral => {
            let sp = SpectralSolver::new(a);
            bicgstab(apply, |r: &[Complex64], z: &mut [Complex64]| sp.solve(r, z), &sys.source, &mut phi, tol, sys.max_iter)?
        }
        Preconditioner::Jacobi => {
            let inv: Vec<Complex64> = a.diagonal().iter().map(|d| d.inv()).collect();
            let jac = |r: &[Complex64], z: &mut [Complex64]| {
                for ((z, r), d) in z.iter_mut().zip(r).zip(&inv) {
                    *z = r * d;
                }
            };
            bicgstab(apply, jac, &sys.source, &mut phi, tol, sys.max_iter)?
        }
    };
    let outer = sys.mesh.nr - 1;
    let surf: Vec<usize> = (0..sys.mesh.nz)
        .flat_map(|k| (0..sys.mesh.ntheta).map(move |j| (j, k)))
        .map(|(j, k)| sys.mesh.idx(outer, j, k))
        .collect();
    let mean: Complex64 = surf.iter().map(|&c| phi[c]).sum::<Complex64>() / surf.len() as f64;
    phi.iter_mut().for_each(|p| *p -= mean);
    Ok(PotentialField {
        mesh: sys.mesh.clone(),
        frequency: sys.frequency,
        phi,
        residual: stats.residual,
        stats,
        driven: sys.driven,
        i0: sys.i0,
        sigma_row: sys.sigma_row.clone(),
        source: sys.source.clone(),
        matrix: sys.matrix.clone(),
    })
}

impl PotentialField {
    /// Potential on the skin side of surface cell `(j, k)`. Under a driven
    /// disc this adds the drop across the outer half-cell carrying the
    /// injected current.
    pub fn surface_potential(&self, j: usize, k: usize) -> Complex64 {
        let m = &self.mesh;
        let outer = m.nr - 1;
        let c = m.idx(outer, j, k);
        let inj = self.source[c];
        if inj == Complex64::new(0.0, 0.0) {
            return self.phi[c];
        }
        let half = (m.radius() / m.r_centers[outer]).ln() / (m.dtheta * m.dz);
        self.phi[c] + inj * half / self.sigma_row[outer]
    }

    /// Area-averaged skin potential over a disc.
    pub fn disc_potential(&self, e: &ElectrodeDisc) -> Result<Complex64> {
        let cells = footprint(&self.mesh, e)?;
        let n = cells.len() as f64;
        Ok(cells.iter().map(|&(j, k)| self.surface_potential(j, k)).sum::<Complex64>() / n)
    }

    /// `Σ (AΦ − b)` over all cells: the net current leaving through the
    /// insulated boundary, zero for a conservative solution.
    pub fn boundary_leakage(&self) -> Complex64 {
        let mut y = vec![Complex64::new(0.0, 0.0); self.phi.len()];
        self.matrix.apply(&self.phi, &mut y);
        y.iter().zip(&self.source).map(|(a, b)| a - b).sum()
    }

    /// Net current injected through the discs.
    pub fn injected_current(&self) -> Complex64 {
        self.source.iter().sum()
    }

    /// Skin-surface potential as CSV rows `theta_rad,z_m,ReV,ImV`.
    pub fn surface_csv(&self) -> String {
        let m = &self.mesh;
        let mut out = String::from("theta_rad,z_m,ReV,ImV\n");
        for k in 0..m.nz {
            for j in 0..m.ntheta {
                let v = self.surface_potential(j, k);
                let _ = writeln!(out, "{},{},{:e},{:e}", m.theta_center(j), m.z_center(k), v.re, v.im);
            }
        }
        out
    }
}

/// Port voltages and impedances read from the fields of one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortQuantities {
    pub frequency: f64,
    pub i0: f64,
    pub dv_tx: Complex64,
    pub dv_rx_oc: Complex64,
    pub z_tr: Complex64,
    pub z_tx_bulk: Complex64,
    /// Needs a receiver-driven solve; `None` when only the Tx field exists.
    pub z_rx_bulk: Option<Complex64>,
    /// Transimpedance with the roles swapped (Rx driven, Tx read).
    pub z_tr_reverse: Option<Complex64>,
}

fn differential(field: &PotentialField, s: &Scenario, port: Port) -> Result<Complex64> {
    let p = field.disc_potential(s.electrode(port, Polarity::Plus))?;
    let n = field.disc_potential(s.electrode(port, Polarity::Minus))?;
    Ok(p - n)
}

/// Reads port quantities from a Tx-driven field.
pub fn extract_port_quantities(field: &PotentialField, s: &Scenario) -> Result<PortQuantities> {
    if field.driven != Port::Tx {
        return Err(Error::Extraction("expected a Tx-driven field".into()));
    }
    let dv_tx = differential(field, s, Port::Tx)?;
    let dv_rx_oc = differential(field, s, Port::Rx)?;
    let (z_tr, z_tx_bulk) = if field.i0 == 0.0 {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        (dv_rx_oc / field.i0, dv_tx / field.i0)
    };
    Ok(PortQuantities {
        frequency: field.frequency,
        i0: field.i0,
        dv_tx,
        dv_rx_oc,
        z_tr,
        z_tx_bulk,
        z_rx_bulk: None,
        z_tr_reverse: None,
    })
}

impl PortQuantities {
    /// Completes the receiver self-impedance and the reverse
    /// transimpedance from an Rx-driven field.
    pub fn with_reverse(mut self, rx_field: &PotentialField, s: &Scenario) -> Result<Self> {
        if rx_field.driven != Port::Rx {
            return Err(Error::Extraction("expected an Rx-driven field".into()));
        }
        if rx_field.i0 != 0.0 {
            self.z_rx_bulk = Some(differential(rx_field, s, Port::Rx)? / rx_field.i0);
            self.z_tr_reverse = Some(differential(rx_field, s, Port::Tx)? / rx_field.i0);
        } else {
            self.z_rx_bulk = Some(Complex64::new(0.0, 0.0));
            self.z_tr_reverse = Some(Complex64::new(0.0, 0.0));
        }
        Ok(self)
    }

    pub fn rx_bulk(&self) -> Result<Complex64> {
        self.z_rx_bulk
            .ok_or_else(|| Error::Extraction("receiver bulk impedance was not solved".into()))
    }
}

/// Both solves for one frequency.
pub fn solve_ports(s: &Scenario, f: f64, spec: &MeshSpec) -> Result<PortQuantities> {
    let tx = solve_potential(&assemble_driven(s, f, spec, Port::Tx)?, spec.tol)?;
    let rx = solve_potential(&assemble_driven(s, f, spec, Port::Rx)?, spec.tol)?;
    extract_port_quantities(&tx, s)?.with_reverse(&rx, s)
}

/// Port quantities on every grid frequency, in grid order.
pub fn sweep(s: &Scenario, grid: &FrequencyGrid, spec: &MeshSpec) -> Result<Vec<PortQuantities>> {
    sweep_freqs(s, grid.freqs(), spec)
}

/// As [`sweep`] for an arbitrary (not necessarily sorted) list.
pub fn sweep_freqs(s: &Scenario, freqs: &[f64], spec: &MeshSpec) -> Result<Vec<PortQuantities>> {
    if freqs.is_empty() {
        return Err(Error::domain("sweep needs at least one frequency"));
    }
    freqs
        .par_iter()
        .map(|&f| {
            solve_ports(s, f, spec).map_err(|e| Error::AtFrequency {
                freq: f,
                source: Box::new(e),
            })
        })
        .collect()
}

/// CSV of port quantities, one row per frequency.
pub fn ports_csv(rows: &[PortQuantities]) -> String {
    let mut out = String::from("f_Hz,ReZtr,ImZtr,ReZtxBulk,ImZtxBulk,ReZrxBulk,ImZrxBulk\n");
    for q in rows {
        let rx = q.z_rx_bulk.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let _ = writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{:e}",
            q.frequency, q.z_tr.re, q.z_tr.im, q.z_tx_bulk.re, q.z_tx_bulk.im, rx.re, rx.im
        );
    }
    out
}
