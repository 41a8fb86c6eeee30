//! Plain-text renderers for the data products: CSV tables (UTF-8, header
//! row, '.' decimal) and JSON records with stable key order. Everything is
//! rendered to strings so outputs are byte-reproducible for fixed inputs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::RobustnessTable;
use crate::fit::FitResult;
use crate::qubit::StokesVector;
use crate::tomography::ProcessMatrix;
use crate::twoion::ComparisonTrace;

fn fmt(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    format!("{v}")
}

/// Bloch trajectory: t_s, S1, S2, S3.
pub fn trajectory_csv(rows: &[(f64, StokesVector)]) -> String {
    let mut out = String::from("t_s,S1,S2,S3\n");
    for (t, s) in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt(*t),
            fmt(s.s1),
            fmt(s.s2),
            fmt(s.s3)
        ));
    }
    out
}

/// Open-system observables along a gate: t_s, Pe, Re/Im of rho_ge, fidelity.
pub fn dynamics_trajectory_csv(rows: &[(f64, f64, f64, f64, f64)]) -> String {
    let mut out = String::from("t_s,P_e,re_rho_ge,im_rho_ge,fidelity\n");
    for (t, pe, re, im, f) in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(*t),
            fmt(*pe),
            fmt(*re),
            fmt(*im),
            fmt(*f)
        ));
    }
    out
}

/// Side-by-side sweep: error_value, fidelity per scheme.
pub fn sweep_csv(
    grid: &[f64],
    nngqc: &[(f64, f64)],
    ngqc: &[(f64, f64)],
    dqc: &[(f64, f64)],
) -> Result<String> {
    if nngqc.len() != grid.len() || ngqc.len() != grid.len() || dqc.len() != grid.len() {
        return Err(Error::DimensionMismatch(grid.len(), nngqc.len()));
    }
    let mut out = String::from("error_value,fidelity_nngqc,fidelity_ngqc,fidelity_dqc\n");
    for k in 0..grid.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt(grid[k]),
            fmt(nngqc[k].1),
            fmt(ngqc[k].1),
            fmt(dqc[k].1)
        ));
    }
    Ok(out)
}

/// Dephasing curve: gamma_over_omega0, infidelity.
pub fn dephasing_csv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("gamma_over_omega0,infidelity\n");
    for (x, y) in curve {
        out.push_str(&format!("{},{}\n", fmt(*x), fmt(*y)));
    }
    out
}

/// Robustness table: error_kind, sigma, percent infidelity per scheme.
pub fn robustness_table_csv(table: &RobustnessTable) -> String {
    let mut out = String::from(
        "error_kind,sigma,infidelity_pct_nngqc,infidelity_pct_ngqc,infidelity_pct_dqc\n",
    );
    for (k, (kind, sigma)) in table.rows.iter().enumerate() {
        let v = table.values[k];
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            kind.name(),
            fmt(*sigma),
            fmt(v[0]),
            fmt(v[1]),
            fmt(v[2])
        ));
    }
    out
}

/// Scheme comparison: scheme, raw and calibrated process fidelity.
pub fn comparison_csv(raw: &[f64; 3], calibrated: &[f64; 3]) -> String {
    let mut out = String::from("scheme,process_fidelity_raw,process_fidelity_calibrated\n");
    for (k, name) in ["nngqc", "ngqc", "dqc"].iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            name,
            fmt(raw[k]),
            fmt(calibrated[k])
        ));
    }
    out
}

/// Two-ion comparison: t, chain populations, reduced-model populations, leakage.
pub fn twoion_csv(trace: &ComparisonTrace) -> String {
    let mut out = String::from("t_s,P_full_eg0,P_full_ge0,P_eff_psi2,P_eff_psi3,leakage\n");
    for s in &trace.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt(s.t),
            fmt(s.p_full_eg0),
            fmt(s.p_full_ge0),
            fmt(s.p_eff_psi2),
            fmt(s.p_eff_psi3),
            fmt(s.leakage)
        ));
    }
    out
}

/// JSON rendering of any of the CSV tables: {"columns": [...], "rows": [[...]]}.
pub fn table_json(csv: &str) -> Result<String> {
    let mut lines = csv.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty table".into()))?;
    #[derive(Serialize)]
    struct TableJson<'a> {
        columns: Vec<&'a str>,
        rows: Vec<Vec<serde_json::Value>>,
    }
    let columns: Vec<&str> = header.split(',').collect();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let row: Vec<serde_json::Value> = line
            .split(',')
            .map(|cell| match cell.parse::<f64>() {
                Ok(v) => serde_json::json!(v),
                Err(_) => serde_json::json!(cell),
            })
            .collect();
        rows.push(row);
    }
    serde_json::to_string_pretty(&TableJson { columns, rows })
        .map_err(|e| Error::Numerical(e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub a: f64,
    pub b: f64,
    pub residual: f64,
    pub grid: Vec<f64>,
}

/// Fit report JSON: {a, b, residual, grid}.
pub fn fit_json(fit: &FitResult, grid: &[f64]) -> Result<String> {
    let report = FitReport {
        a: fit.a,
        b: fit.b,
        residual: fit.residual,
        grid: grid.to_vec(),
    };
    serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(e.to_string()))
}

#[derive(Debug, Serialize)]
struct ChiJson {
    basis: [&'static str; 4],
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Process matrix JSON: {basis: ["I","X","-iY","Z"], re: [[..]], im: [[..]]}.
pub fn chi_json(chi: &ProcessMatrix) -> Result<String> {
    let m = chi.matrix();
    let re: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| m[(i, j)].re).collect())
        .collect();
    let im: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| m[(i, j)].im).collect())
        .collect();
    let out = ChiJson {
        basis: ["I", "X", "-iY", "Z"],
        re,
        im,
    };
    serde_json::to_string_pretty(&out).map_err(|e| Error::Numerical(e.to_string()))
}

/// Run provenance written alongside every dataset: enough to re-run it.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub omega0_khz: f64,
    pub gamma_khz: Option<f64>,
    pub spam_p: Option<f64>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub exact: bool,
    /// Gamma is an ordinary rate (1/s) measured against the angular Rabi
    /// frequency; ratios Gamma/Omega_0 are formed in these mixed units.
    pub gamma_convention: String,
    /// Measured Stokes components are population differences
    /// S_k = P_e^k - P_g^k (the sign-flip of the textbook Tr[sigma_k rho]).
    pub stokes_convention: String,
    /// Shot budgets apply per measurement setting, not split across settings.
    pub shots_convention: String,
}

impl RunMetadata {
    pub fn new(command: &str, omega0_khz: f64) -> Self {
        Self {
            tool: "geogate".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            omega0_khz,
            gamma_khz: None,
            spam_p: None,
            shots: None,
            seed: None,
            exact: true,
            gamma_convention: "gamma_ordinary_per_s_over_omega0_angular".into(),
            stokes_convention: "measured_Sk_equals_Pe_minus_Pg".into(),
            shots_convention: "n_shots_per_setting".into(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Numerical(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{u1_matrix, StokesVector};
    use crate::tomography::chi_ideal;

    #[test]
    fn csv_headers_and_shape() {
        let rows = vec![
            (0.0, StokesVector::new(1.0, 0.0, 0.0, 1.0)),
            (0.5, StokesVector::new(1.0, 0.25, -0.5, 0.0)),
        ];
        let csv = trajectory_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t_s,S1,S2,S3");
        assert_eq!(lines.next().unwrap(), "0,0,0,1");
        assert_eq!(lines.next().unwrap(), "0.5,0.25,-0.5,0");
    }

    #[test]
    fn chi_json_shape() {
        let chi = chi_ideal(&u1_matrix()).unwrap();
        let json = chi_json(&chi).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["basis"][2], "-iY");
        assert_eq!(v["re"].as_array().unwrap().len(), 4);
        assert!((v["re"][0][0].as_f64().unwrap() - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn metadata_roundtrips_and_is_stable() {
        let mut meta = RunMetadata::new("table1", 67.9);
        meta.seed = Some(7);
        let a = meta.to_json().unwrap();
        let b = meta.to_json().unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"tool\": \"geogate\""));
    }
}
