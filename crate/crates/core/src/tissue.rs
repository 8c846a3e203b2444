//! Dispersive tissue properties.
//!
//! Tissues are described by a multi-pole Cole–Cole relaxation model plus a
//! static ionic conductivity. The compiled-in table holds skin, fat, muscle
//! and bone; additional tissues can be loaded from a TOML document with one
//! section per tissue.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum permittivity (CODATA 2018), F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// One relaxation term `Δε / (1 + (jωτ)^(1-β))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    pub delta_eps: f64,
    /// Relaxation time in seconds.
    pub tau: f64,
    pub beta: f64,
}

impl Dispersion {
    pub const fn new(delta_eps: f64, tau: f64, beta: f64) -> Self {
        Self {
            delta_eps,
            tau,
            beta,
        }
    }

    /// Contribution of this term to the relative permittivity at angular
    /// frequency `omega`.
    ///
    /// `(jx)^(1-β)` is taken on the principal branch, i.e.
    /// `x^(1-β) · exp(j(1-β)π/2)` for `x > 0`.
    fn contribution(&self, omega: f64) -> Complex64 {
        if self.delta_eps == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let alpha = 1.0 - self.beta;
        let x = omega * self.tau;
        let jx_pow = Complex64::from_polar(x.powf(alpha), alpha * FRAC_PI_2);
        Complex64::new(self.delta_eps, 0.0) / (1.0 + jx_pow)
    }
}

/// Cole–Cole parameter set for one tissue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColeColeParams {
    pub eps_inf: f64,
    pub terms: Vec<Dispersion>,
    /// Static ionic conductivity, S/m.
    pub sigma_i: f64,
}

impl ColeColeParams {
    pub fn new(eps_inf: f64, terms: Vec<Dispersion>, sigma_i: f64) -> Result<Self> {
        let p = Self {
            eps_inf,
            terms,
            sigma_i,
        };
        p.check().map_err(|(field, msg)| Error::TissueParse {
            tissue: "<anonymous>".into(),
            field,
            msg,
        })?;
        Ok(p)
    }

    /// Purely conductive, non-dispersive medium (`ε∞ = 0`, no terms).
    pub fn conductor(sigma: f64) -> Self {
        Self {
            eps_inf: 0.0,
            terms: Vec::new(),
            sigma_i: sigma,
        }
    }

    fn check(&self) -> std::result::Result<(), (String, String)> {
        if !(self.eps_inf.is_finite() && self.eps_inf >= 0.0) {
            return Err(("eps_inf".into(), "must be finite and >= 0".into()));
        }
        if !(self.sigma_i.is_finite() && self.sigma_i >= 0.0) {
            return Err(("sigma_i".into(), "must be finite and >= 0".into()));
        }
        for (n, t) in self.terms.iter().enumerate() {
            if !(0.0..=1.0).contains(&t.beta) {
                return Err((format!("terms[{n}].beta"), "must lie in [0, 1]".into()));
            }
            if !t.delta_eps.is_finite() {
                return Err((format!("terms[{n}].delta_eps"), "must be finite".into()));
            }
            if t.delta_eps != 0.0 && !(t.tau > 0.0 && t.tau.is_finite()) {
                return Err((
                    format!("terms[{n}].tau"),
                    "must be > 0 when delta_eps != 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// `ε∞ + Σ Δεn / (1 + (jωτn)^(1-βn))`, without the ionic term.
    fn relaxation_permittivity(&self, omega: f64) -> Complex64 {
        self.terms
            .iter()
            .fold(Complex64::new(self.eps_inf, 0.0), |acc, t| {
                acc + t.contribution(omega)
            })
    }
}

fn check_freq(f: f64) -> Result<f64> {
    if f > 0.0 && f.is_finite() {
        Ok(2.0 * PI * f)
    } else {
        Err(Error::domain(format!("frequency must be positive, got {f}")))
    }
}

/// Complex relative permittivity `ε̂r(f)` including the ionic loss term
/// `σi / (jωε0)`.
pub fn complex_permittivity(p: &ColeColeParams, f: f64) -> Result<Complex64> {
    let omega = check_freq(f)?;
    let ionic = Complex64::new(0.0, -p.sigma_i / (omega * EPS0));
    Ok(p.relaxation_permittivity(omega) + ionic)
}

/// Complex conductivity `σ̂(f) = σi + jωε0 (ε∞ + Σ ...)` in S/m.
pub fn complex_conductivity(p: &ColeColeParams, f: f64) -> Result<Complex64> {
    let omega = check_freq(f)?;
    let jwe0 = Complex64::new(0.0, omega * EPS0);
    Ok(p.sigma_i + jwe0 * p.relaxation_permittivity(omega))
}

/// Tissue identifier. The four built-in tissues have fixed names; any other
/// name is carried as a custom entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TissueId {
    Skin,
    Fat,
    Muscle,
    Bone,
    Custom(String),
}

impl TissueId {
    pub fn name(&self) -> &str {
        match self {
            TissueId::Skin => "skin",
            TissueId::Fat => "fat",
            TissueId::Muscle => "muscle",
            TissueId::Bone => "bone",
            TissueId::Custom(s) => s,
        }
    }
}

impl fmt::Display for TissueId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TissueId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Config("empty tissue name".into()));
        }
        Ok(match s.to_ascii_lowercase().as_str() {
            "skin" => TissueId::Skin,
            "fat" => TissueId::Fat,
            "muscle" => TissueId::Muscle,
            "bone" => TissueId::Bone,
            _ => TissueId::Custom(s.to_string()),
        })
    }
}

impl TryFrom<String> for TissueId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TissueId> for String {
    fn from(t: TissueId) -> String {
        t.name().to_string()
    }
}

/// Compiled-in Cole–Cole table for skin, fat, muscle and bone.
///
/// Relaxation times are stored in seconds.
pub const DEFAULT_TISSUE_TABLE: &str = r#"# Cole-Cole parameters (tau in seconds, sigma_i in S/m)

[bone]
eps_inf = 2.5
sigma_i = 0.02
terms = [
  { delta_eps = 10.0,   tau = 13.26e-12, beta = 0.20 },
  { delta_eps = 180.0,  tau = 79.58e-9,  beta = 0.20 },
  { delta_eps = 5.0e3,  tau = 159.15e-6, beta = 0.20 },
  { delta_eps = 1.0e3,  tau = 15.915e-3, beta = 0.00 },
]

[fat]
eps_inf = 2.5
sigma_i = 0.01
terms = [
  { delta_eps = 3.0,    tau = 7.96e-12,  beta = 0.20 },
  { delta_eps = 15.0,   tau = 15.92e-9,  beta = 0.10 },
  { delta_eps = 3.3e4,  tau = 159.15e-6, beta = 0.05 },
  { delta_eps = 1.0e7,  tau = 7.958e-3,  beta = 0.01 },
]

[muscle]
eps_inf = 4.0
sigma_i = 0.2
terms = [
  { delta_eps = 50.0,   tau = 7.23e-12,  beta = 0.10 },
  { delta_eps = 7000.0, tau = 353.68e-9, beta = 0.10 },
  { delta_eps = 1.2e6,  tau = 318.31e-6, beta = 0.10 },
  { delta_eps = 2.5e7,  tau = 2.274e-3,  beta = 0.00 },
]

[skin]
eps_inf = 4.0
sigma_i = 0.0002
terms = [
  { delta_eps = 32.0,   tau = 7.23e-12,  beta = 0.00 },
  { delta_eps = 1100.0, tau = 32.48e-9,  beta = 0.20 },
  { delta_eps = 0.0,    tau = 0.0,       beta = 0.00 },
  { delta_eps = 0.0,    tau = 0.0,       beta = 0.00 },
]
"#;

/// Map from tissue identifier to its dispersion parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TissueTable {
    entries: BTreeMap<TissueId, ColeColeParams>,
}

impl TissueTable {
    pub fn builtin() -> Self {
        load_tissue_table(DEFAULT_TISSUE_TABLE).expect("built-in tissue table is valid")
    }

    pub fn get(&self, id: &TissueId) -> Result<&ColeColeParams> {
        self.entries
            .get(id)
            .ok_or_else(|| Error::UnknownTissue(id.to_string()))
    }

    pub fn insert(&mut self, id: TissueId, params: ColeColeParams) -> Option<ColeColeParams> {
        self.entries.insert(id, params)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TissueId, &ColeColeParams)> {
        self.entries.iter()
    }

    /// Overlays `other` on top of `self`; entries of `other` win.
    pub fn merged(mut self, other: &TissueTable) -> Self {
        for (k, v) in other.iter() {
            self.entries.insert(k.clone(), v.clone());
        }
        self
    }

    /// Canonical TOML form, parseable by [`load_tissue_table`].
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        for (id, p) in &self.entries {
            out.push_str(&format!("[{}]\n", toml_key(id.name())));
            out.push_str(&format!("eps_inf = {:?}\n", p.eps_inf));
            out.push_str(&format!("sigma_i = {:?}\n", p.sigma_i));
            out.push_str("terms = [\n");
            for t in &p.terms {
                out.push_str(&format!(
                    "  {{ delta_eps = {:?}, tau = {:?}, beta = {:?} }},\n",
                    t.delta_eps, t.tau, t.beta
                ));
            }
            out.push_str("]\n\n");
        }
        out
    }
}

fn toml_key(name: &str) -> String {
    if name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        name.to_string()
    } else {
        format!("{name:?}")
    }
}

/// Parses a tissue table from TOML text: one table per tissue with keys
/// `eps_inf`, `sigma_i` and an array `terms` of `{delta_eps, tau, beta}`.
pub fn load_tissue_table(source: &str) -> Result<TissueTable> {
    let doc: toml::Table = source.parse().map_err(|e: toml::de::Error| Error::Parse {
        context: "tissue table".into(),
        msg: e.to_string(),
    })?;
    let mut table = TissueTable::default();
    for (name, value) in doc {
        let id: TissueId = name.parse()?;
        let params = parse_row(&name, &value)?;
        if table.insert(id, params).is_some() {
            return Err(Error::TissueParse {
                tissue: name,
                field: "<name>".into(),
                msg: "duplicate tissue".into(),
            });
        }
    }
    Ok(table)
}

fn parse_row(tissue: &str, value: &toml::Value) -> Result<ColeColeParams> {
    let err = |field: &str, msg: &str| Error::TissueParse {
        tissue: tissue.to_string(),
        field: field.to_string(),
        msg: msg.to_string(),
    };
    let row = value
        .as_table()
        .ok_or_else(|| err("<section>", "expected a table"))?;
    for key in row.keys() {
        if !matches!(key.as_str(), "eps_inf" | "sigma_i" | "terms") {
            return Err(err(key, "unknown field"));
        }
    }
    let eps_inf = number(row.get("eps_inf")).ok_or_else(|| err("eps_inf", "missing or not a number"))?;
    let sigma_i = number(row.get("sigma_i")).ok_or_else(|| err("sigma_i", "missing or not a number"))?;
    let mut terms = Vec::new();
    if let Some(arr) = row.get("terms") {
        let arr = arr.as_array().ok_or_else(|| err("terms", "expected an array"))?;
        for (n, t) in arr.iter().enumerate() {
            let t = t
                .as_table()
                .ok_or_else(|| err(&format!("terms[{n}]"), "expected an inline table"))?;
            let get = |k: &str| {
                number(t.get(k)).ok_or_else(|| err(&format!("terms[{n}].{k}"), "missing or not a number"))
            };
            terms.push(Dispersion::new(get("delta_eps")?, get("tau")?, get("beta")?));
        }
    }
    let p = ColeColeParams {
        eps_inf,
        terms,
        sigma_i,
    };
    p.check().map_err(|(field, msg)| err(&field, &msg))?;
    Ok(p)
}

fn number(v: Option<&toml::Value>) -> Option<f64> {
    match v? {
        toml::Value::Float(x) => Some(*x),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn degenerate_limit_is_eps_inf() {
        let p = ColeColeParams::new(4.0, vec![Dispersion::new(0.0, 0.0, 0.0)], 0.0).unwrap();
        for f in [1.0, 1e3, 1e9] {
            let e = complex_permittivity(&p, f).unwrap();
            assert_eq!(e, Complex64::new(4.0, 0.0));
        }
    }

    #[test]
    fn low_frequency_debye_limit() {
        let p = ColeColeParams::new(4.0, vec![Dispersion::new(32.0, 7.23e-12, 0.0)], 0.0).unwrap();
        let e = complex_permittivity(&p, 1e3).unwrap();
        // |2πfτ| ≈ 4.5e-8, so the relative deviation from 36 is ~4e-8.
        assert!((e - Complex64::new(36.0, 0.0)).norm() / 36.0 < 1e-7);
    }

    #[test]
    fn pure_conductor() {
        let p = ColeColeParams::conductor(0.2);
        for f in [1e3, 1e5, 1e7] {
            assert_eq!(complex_conductivity(&p, f).unwrap(), Complex64::new(0.2, 0.0));
        }
    }

    #[test]
    fn nonpositive_frequency_is_domain_error() {
        let p = ColeColeParams::conductor(0.2);
        assert!(matches!(complex_permittivity(&p, 0.0), Err(Error::Domain(_))));
        assert!(matches!(complex_conductivity(&p, -1.0), Err(Error::Domain(_))));
        assert!(complex_conductivity(&p, f64::NAN).is_err());
    }

    #[test]
    fn conductivity_permittivity_identity_builtin() {
        let table = TissueTable::builtin();
        for (_, p) in table.iter() {
            for f in [10.0, 1e4, 3.3e5, 1e6, 1e9] {
                let s = complex_conductivity(p, f).unwrap();
                let e = complex_permittivity(p, f).unwrap();
                let jwe0 = Complex64::new(0.0, 2.0 * PI * f * EPS0);
                assert!(rel(jwe0 * e, s) < 1e-12);
            }
        }
    }

    #[test]
    fn ionic_term_makes_imaginary_part_negative() {
        let table = TissueTable::builtin();
        for (_, p) in table.iter() {
            for f in [1e4, 1e5, 1e6] {
                assert!(complex_permittivity(p, f).unwrap().im < 0.0);
            }
        }
    }

    #[test]
    fn high_frequency_limit_approaches_eps_inf() {
        let table = TissueTable::builtin();
        for (id, p) in table.iter() {
            // The picosecond terms only fade once (ωτ)^(1-β) >> Δε, i.e. well
            // beyond 1 THz; check the approach is monotone and reaches ε∞.
            let dev: Vec<f64> = [1e10, 1e12, 1e14, 1e16, 1e18]
                .iter()
                .map(|&f| (complex_permittivity(p, f).unwrap() - p.eps_inf).norm())
                .collect();
            assert!(dev.windows(2).all(|w| w[1] < w[0]), "{id}: {dev:?}");
            assert!(dev[4] < 1e-3, "{id}: {dev:?}");
        }
    }

    #[test]
    fn beta_zero_is_debye() {
        let (d, tau) = (1100.0, 32.48e-9);
        let p = ColeColeParams::new(4.0, vec![Dispersion::new(d, tau, 0.0)], 0.0).unwrap();
        for f in [1e3, 4.9e6, 1e8] {
            let w = 2.0 * PI * f;
            let debye = 4.0 + d / Complex64::new(1.0, w * tau);
            assert!(rel(complex_permittivity(&p, f).unwrap(), debye) < 1e-12);
        }
    }

    #[test]
    fn default_table_matches_reference_rows() {
        let t = TissueTable::builtin();
        assert_eq!(t.len(), 4);
        let muscle = t.get(&TissueId::Muscle).unwrap();
        assert_eq!(muscle.eps_inf, 4.0);
        assert_eq!(muscle.terms[1].delta_eps, 7000.0);
        assert_eq!(muscle.sigma_i, 0.2);
        let skin = t.get(&TissueId::Skin).unwrap();
        assert_eq!(skin.terms[2].delta_eps, 0.0);
        assert_eq!(skin.sigma_i, 0.0002);
        assert_eq!(t.get(&TissueId::Bone).unwrap().sigma_i, 0.02);
        assert_eq!(t.get(&TissueId::Fat).unwrap().sigma_i, 0.01);
        assert!(t.iter().all(|(_, p)| p.terms.len() == 4));
    }

    #[test]
    fn empty_source_gives_empty_table() {
        assert!(load_tissue_table("").unwrap().is_empty());
    }

    #[test]
    fn malformed_row_names_tissue_and_field() {
        let src = "[liver]\neps_inf = 4.0\nsigma_i = 0.1\nterms = [{ delta_eps = 1.0, tau = 1e-9, beta = 1.5 }]\n";
        match load_tissue_table(src) {
            Err(Error::TissueParse { tissue, field, .. }) => {
                assert_eq!(tissue, "liver");
                assert_eq!(field, "terms[0].beta");
            }
            other => panic!("unexpected {other:?}"),
        }
        let src = "[skin]\neps_inf = 4.0\n";
        match load_tissue_table(src) {
            Err(Error::TissueParse { tissue, field, .. }) => {
                assert_eq!(tissue, "skin");
                assert_eq!(field, "sigma_i");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn canonical_toml_round_trips() {
        let t = TissueTable::builtin();
        let back = load_tissue_table(&t.to_toml()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn custom_names_are_preserved() {
        let id: TissueId = "Blood".parse().unwrap();
        assert_eq!(id, TissueId::Custom("Blood".into()));
        assert_eq!("MUSCLE".parse::<TissueId>().unwrap(), TissueId::Muscle);
    }
}
