//! Equivalent-circuit layer: electrode interface, port impedances,
//! receiver loading and the observable transfer function.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, MeshSpec, PortQuantities};
use crate::response::{ComplexResponse, FrequencyGrid};
use crate::scenario::{InterfaceStack, Scenario};
use crate::tissue::{complex_conductivity, TissueId, TissueTable, EPS0};

const J: Complex64 = Complex64::new(0.0, 1.0);

fn check_freq(f: f64) -> Result<()> {
    if f > 0.0 && f.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("frequency must be positive and finite, got {f}")))
    }
}

/// Differential electrode–skin impedance of one port:
/// `R_c + 1/(jωC_dl)` plus the gel slab and the foam parasitic capacitance
/// when present.
pub fn electrode_interface_impedance(stack: &InterfaceStack, f: f64) -> Result<Complex64> {
    check_freq(f)?;
    let w = 2.0 * PI * f;
    let mut z = Complex64::new(stack.r_c, 0.0) + 1.0 / (J * w * stack.c_dl);
    if let Some(g) = &stack.gel {
        z += g.thickness / (g.area * (g.sigma + J * w * g.eps_r * EPS0));
    }
    if let Some(c) = stack.c_par {
        z += 1.0 / (J * w * c);
    }
    Ok(z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamlineSegment {
    pub length: f64,
    pub tissue: TissueId,
    /// Effective conducting cross-section, m².
    pub area: f64,
}

/// Ordered tissue segments traversed by the dominant current streamline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamlinePath {
    segments: Vec<StreamlineSegment>,
}

impl StreamlinePath {
    pub fn new(segments: Vec<StreamlineSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::domain("streamline path needs at least one segment"));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.length > 0.0 && s.length.is_finite()) {
                return Err(Error::validation(format!("segments[{i}].length"), "must be > 0"));
            }
            if !(s.area > 0.0 && s.area.is_finite()) {
                return Err(Error::validation(format!("segments[{i}].area"), "must be > 0"));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[StreamlineSegment] {
        &self.segments
    }

    /// Straight axial path of `length` through the outer tissue of the arm,
    /// using the full arm cross-section as the effective area.
    pub fn straight(s: &Scenario, length: f64) -> Result<Self> {
        let outer = s.arm.layers.last().expect("validated arm has layers");
        Self::new(vec![StreamlineSegment {
            length,
            tissue: outer.tissue.clone(),
            area: PI * s.arm.radius().powi(2),
        }])
    }
}

/// `Σ ℓᵢ / (σ̂ᵢ(f) Aᵢ)` over the path.
pub fn streamline_bulk_impedance(path: &StreamlinePath, tissues: &TissueTable, f: f64) -> Result<Complex64> {
    check_freq(f)?;
    let mut z = Complex64::new(0.0, 0.0);
    for seg in path.segments() {
        let sigma = complex_conductivity(tissues.get(&seg.tissue)?, f)?;
        z += seg.length / (sigma * seg.area);
    }
    Ok(z)
}

/// Constriction impedance of a disc contact on a half-space, `1/(4σ̂a)`.
pub fn spreading_impedance(sigma: Complex64, radius: f64) -> Result<Complex64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!("disc radius must be > 0, got {radius}")));
    }
    if sigma.norm() == 0.0 || !sigma.is_finite() {
        return Err(Error::domain("spreading impedance needs nonzero conductivity"));
    }
    Ok(1.0 / (4.0 * sigma * radius))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortImpedance {
    pub z_e: Complex64,
    pub z_body: Complex64,
    pub z_total: Complex64,
}

pub fn compose_port_impedance(z_e: Complex64, z_body: Complex64) -> PortImpedance {
    PortImpedance {
        z_e,
        z_body,
        z_total: z_e + z_body,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadedTransfer {
    pub loading_factor: Complex64,
    pub z_eq: Complex64,
}

/// Voltage divider between the receiver port and its load.
pub fn loaded_transfer(z_tr: Complex64, z_rx: Complex64, z_l: Complex64) -> Result<LoadedTransfer> {
    if z_l.is_infinite() {
        return Ok(LoadedTransfer {
            loading_factor: Complex64::new(1.0, 0.0),
            z_eq: z_tr,
        });
    }
    let den = z_l + z_rx;
    if den.norm() <= 1e-300 || den.norm() <= 1e-14 * (z_l.norm() + z_rx.norm()) {
        return Err(Error::Singular(format!("Z_L + Z_RX vanishes (Z_L = {z_l}, Z_RX = {z_rx})")));
    }
    let loading_factor = z_l / den;
    Ok(LoadedTransfer {
        loading_factor,
        z_eq: loading_factor * z_tr,
    })
}

/// `H = Z_eq / Z_TX`.
pub fn transfer_function(z_eq: Complex64, z_tx: Complex64) -> Result<Complex64> {
    if z_tx.norm() == 0.0 {
        return Err(Error::Singular("Z_TX is zero".into()));
    }
    Ok(z_eq / z_tx)
}

/// Impedance-referenced path loss `20 log10(1 + |Z_eq / Z_ref|)`, dB.
pub fn path_loss(z_eq: Complex64, z_ref: Complex64) -> f64 {
    20.0 * (1.0 + (z_eq / z_ref).norm()).log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub z_spread_tx: Complex64,
    pub z_bulk: Complex64,
    pub z_spread_rx: Complex64,
    pub z_par: Complex64,
    pub sum: Complex64,
}

/// Lumped estimate `Z_spread,TX + Z_bulk + Z_spread,RX + Z_par` using the
/// skin-contact tissue for both spreading terms.
pub fn transimpedance_decomposition(
    s: &Scenario,
    f: f64,
    path: &StreamlinePath,
    z_par: Complex64,
) -> Result<Decomposition> {
    let outer = s.arm.layers.last().expect("validated arm has layers");
    let sigma = complex_conductivity(s.tissues.get(&outer.tissue)?, f)?;
    let z_spread_tx = spreading_impedance(sigma, s.electrode_radius)?;
    let z_spread_rx = z_spread_tx;
    let z_bulk = streamline_bulk_impedance(path, &s.tissues, f)?;
    Ok(Decomposition {
        z_spread_tx,
        z_bulk,
        z_spread_rx,
        z_par,
        sum: z_spread_tx + z_bulk + z_spread_rx + z_par,
    })
}

/// Per-frequency link quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPoint {
    pub frequency: f64,
    pub z_tr: Complex64,
    pub z_tx: Complex64,
    pub z_rx: Complex64,
    pub loading_factor: Complex64,
    pub z_eq: Complex64,
    pub h: Complex64,
    pub pl_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkResponse {
    pub label: String,
    pub points: Vec<LinkPoint>,
}

impl LinkResponse {
    pub fn grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.points.iter().map(|p| p.frequency).collect())
    }

    /// `H(f)` as a response on the link's grid.
    pub fn transfer(&self) -> Result<ComplexResponse> {
        Ok(ComplexResponse::new(self.grid()?, self.points.iter().map(|p| p.h).collect())?.with_label(&self.label))
    }

    pub fn z_eq(&self) -> Result<ComplexResponse> {
        Ok(ComplexResponse::new(self.grid()?, self.points.iter().map(|p| p.z_eq).collect())?.with_label(&self.label))
    }

    pub fn csv_header() -> &'static str {
        "f_Hz,ReZtr,ImZtr,ReZtx,ImZtx,ReZeq,ImZeq,ReH,ImH,PL_dB"
    }

    /// One CSV line per frequency, without the header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                p.frequency,
                p.z_tr.re,
                p.z_tr.im,
                p.z_tx.re,
                p.z_tx.im,
                p.z_eq.re,
                p.z_eq.im,
                p.h.re,
                p.h.im,
                p.pl_db
            );
        }
        out
    }
}

/// Composes solver port quantities with the scenario's interface, load and
/// reference impedances. `z_par` is an optional parasitic transimpedance
/// added to the solver value (zero by default).
pub fn compose_link(s: &Scenario, ports: &[PortQuantities], z_par: Complex64) -> Result<LinkResponse> {
    let mut points = Vec::with_capacity(ports.len());
    for q in ports {
        let f = q.frequency;
        let point = (|| {
            let z_e = electrode_interface_impedance(&s.interface, f)?;
            let z_tx = compose_port_impedance(z_e, q.z_tx_bulk).z_total;
            let z_rx = compose_port_impedance(z_e, q.rx_bulk()?).z_total;
            let z_tr = q.z_tr + z_par;
            let lt = loaded_transfer(z_tr, z_rx, s.z_load.at(f))?;
            let h = transfer_function(lt.z_eq, z_tx)?;
            Ok(LinkPoint {
                frequency: f,
                z_tr,
                z_tx,
                z_rx,
                loading_factor: lt.loading_factor,
                z_eq: lt.z_eq,
                h,
                pl_db: path_loss(lt.z_eq, s.z_ref),
            })
        })()
        .map_err(|e: Error| Error::AtFrequency {
            freq: f,
            source: Box::new(e),
        })?;
        points.push(point);
    }
    Ok(LinkResponse {
        label: link_label(s),
        points,
    })
}

/// Default label, e.g. `Long-AgCl-FoamGel`.
pub fn link_label(s: &Scenario) -> String {
    format!(
        "{}-{}-{:?}",
        s.placement.short_name(),
        s.interface.material.short_name(),
        s.interface.config
    )
}

/// Field sweep followed by circuit composition.
pub fn link_response(s: &Scenario, grid: &FrequencyGrid, spec: &MeshSpec) -> Result<LinkResponse> {
    let ports = field::sweep(s, grid, spec)?;
    compose_link(s, &ports, Complex64::new(0.0, 0.0))
}
