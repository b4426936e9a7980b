//! CSV serialization of result records.
//!
//! Layout: `# key=value` metadata lines (values are single-line JSON
//! where structured), one header row, then data rows. Floats are
//! written as shortest round-trip decimals, so parsing recovers the
//! record bit-for-bit.

use std::collections::BTreeMap;

use crate::error::{Result, SbmError};
use crate::evolve::TimeSeries;
use crate::experiments::{Peak, ResonanceScan, RisetimeScan};
use crate::model::{ConfigDocument, InitialState, NumericsConfig};

fn meta_line(key: &str, value: &str) -> String {
    format!("# {key}={value}\n")
}

fn json_meta<T: serde::Serialize>(key: &str, value: &T) -> Result<String> {
    let text = serde_json::to_string(value).map_err(|e| SbmError::Config(e.to_string()))?;
    Ok(meta_line(key, &text))
}

type Metadata = BTreeMap<String, String>;

/// Split a CSV document into metadata map, header fields, and rows.
fn split_document(text: &str) -> Result<(Metadata, Vec<String>, Vec<Vec<f64>>)> {
    let mut meta = BTreeMap::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim_start();
            if let Some((key, value)) = rest.split_once('=') {
                meta.insert(key.trim().to_string(), value.to_string());
            }
            continue;
        }
        if header.is_none() {
            header = Some(line.split(',').map(|s| s.trim().to_string()).collect());
            continue;
        }
        let row = line
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|e| {
                    SbmError::Config(format!("bad numeric field {field:?}: {e}"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let header = header.ok_or_else(|| SbmError::Config("CSV has no header row".to_string()))?;
    Ok((meta, header, rows))
}

fn require_meta<'a>(meta: &'a Metadata, key: &str) -> Result<&'a str> {
    meta.get(key)
        .map(|s| s.as_str())
        .ok_or_else(|| SbmError::Config(format!("CSV metadata missing key {key:?}")))
}

fn parse_json_meta<T: serde::de::DeserializeOwned>(meta: &Metadata, key: &str) -> Result<T> {
    serde_json::from_str(require_meta(meta, key)?)
        .map_err(|e| SbmError::Config(format!("bad {key} metadata: {e}")))
}

pub fn write_time_series(series: &TimeSeries) -> Result<String> {
    let mut out = String::new();
    out.push_str(&meta_line("artifact", &format!("sbm v{}", env!("CARGO_PKG_VERSION"))));
    out.push_str(&meta_line("record", "time-series"));
    let config = ConfigDocument::from_resolved(&series.params, &series.cfg);
    out.push_str(&json_meta("config", &config)?);
    out.push_str("t,sigma_z,sigma_x,norm\n");
    for k in 0..series.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            series.t[k], series.sigma_z[k], series.sigma_x[k], series.norm[k]
        ));
    }
    Ok(out)
}

pub fn read_time_series(text: &str) -> Result<TimeSeries> {
    let (meta, header, rows) = split_document(text)?;
    if header != ["t", "sigma_z", "sigma_x", "norm"] {
        return Err(SbmError::Config(format!("unexpected time-series header {header:?}")));
    }
    let config: ConfigDocument = parse_json_meta(&meta, "config")?;
    let (params, cfg) = config.resolve()?;
    let column = |idx: usize| rows.iter().map(|r| r[idx]).collect::<Vec<f64>>();
    if rows.iter().any(|r| r.len() != 4) {
        return Err(SbmError::Config("time-series rows must have 4 fields".to_string()));
    }
    Ok(TimeSeries {
        t: column(0),
        sigma_z: column(1),
        sigma_x: column(2),
        norm: column(3),
        params,
        cfg,
    })
}

pub fn write_resonance_scan(scan: &ResonanceScan) -> Result<String> {
    let mut out = String::new();
    out.push_str(&meta_line("artifact", &format!("sbm v{}", env!("CARGO_PKG_VERSION"))));
    out.push_str(&meta_line("record", "amplitude-scan"));
    let config = ConfigDocument::from_resolved(&scan.params, &NumericsConfig::default());
    out.push_str(&json_meta("config", &config)?);
    out.push_str(&json_meta("initial", &scan.initial)?);
    out.push_str(&meta_line("t_long", &scan.t_long.to_string()));
    out.push_str(&meta_line("threshold", &scan.threshold.to_string()));
    out.push_str(&meta_line("peak_floor", &scan.peak_floor.to_string()));
    out.push_str(&json_meta("peaks", &scan.peaks)?);
    out.push_str(&meta_line("degraded", &scan.degraded.to_string()));
    out.push_str(&json_meta("failed_points", &scan.failed_points)?);
    out.push_str("amplitude,mean_sigma_z\n");
    for (amplitude, mean) in scan.grid.iter().zip(scan.means.iter()) {
        out.push_str(&format!("{amplitude},{mean}\n"));
    }
    Ok(out)
}

pub fn read_resonance_scan(text: &str) -> Result<ResonanceScan> {
    let (meta, header, rows) = split_document(text)?;
    if header != ["amplitude", "mean_sigma_z"] {
        return Err(SbmError::Config(format!("unexpected scan header {header:?}")));
    }
    if rows.iter().any(|r| r.len() != 2) {
        return Err(SbmError::Config("scan rows must have 2 fields".to_string()));
    }
    let config: ConfigDocument = parse_json_meta(&meta, "config")?;
    let (params, _) = config.resolve()?;
    let initial: InitialState = parse_json_meta(&meta, "initial")?;
    let peaks: Vec<Peak> = parse_json_meta(&meta, "peaks")?;
    let failed_points: Vec<usize> = parse_json_meta(&meta, "failed_points")?;
    let parse_f64 = |key: &str| -> Result<f64> {
        require_meta(&meta, key)?
            .trim()
            .parse()
            .map_err(|e| SbmError::Config(format!("bad {key}: {e}")))
    };
    let degraded = require_meta(&meta, "degraded")?.trim() == "true";
    Ok(ResonanceScan {
        grid: rows.iter().map(|r| r[0]).collect(),
        means: rows.iter().map(|r| r[1]).collect(),
        t_long: parse_f64("t_long")?,
        params,
        initial,
        peaks,
        threshold: parse_f64("threshold")?,
        peak_floor: parse_f64("peak_floor")?,
        degraded,
        failed_points,
    })
}

pub fn write_risetime_scan(scan: &RisetimeScan) -> Result<String> {
    let mut out = String::new();
    out.push_str(&meta_line("artifact", &format!("sbm v{}", env!("CARGO_PKG_VERSION"))));
    out.push_str(&meta_line("record", "risetime-scan"));
    let config = ConfigDocument::from_resolved(&scan.params, &NumericsConfig::default());
    out.push_str(&json_meta("config", &config)?);
    out.push_str(&json_meta("m_list", &scan.m_list)?);
    out.push_str(&meta_line("t_long", &scan.t_long.to_string()));
    let mut header = String::from("tc");
    for m in &scan.m_list {
        header.push_str(&format!(",abs_mean_m{m}"));
    }
    out.push_str(&header);
    out.push('\n');
    for (j, tc) in scan.tc_grid.iter().enumerate() {
        out.push_str(&tc.to_string());
        for row in &scan.magnitudes {
            out.push_str(&format!(",{}", row[j]));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn read_risetime_scan(text: &str) -> Result<RisetimeScan> {
    let (meta, header, rows) = split_document(text)?;
    let config: ConfigDocument = parse_json_meta(&meta, "config")?;
    let (params, _) = config.resolve()?;
    let m_list: Vec<u32> = parse_json_meta(&meta, "m_list")?;
    if header.len() != m_list.len() + 1 {
        return Err(SbmError::Config("rise-time header does not match m_list".to_string()));
    }
    let t_long: f64 = require_meta(&meta, "t_long")?
        .trim()
        .parse()
        .map_err(|e| SbmError::Config(format!("bad t_long: {e}")))?;
    let tc_grid: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let magnitudes: Vec<Vec<f64>> = (0..m_list.len())
        .map(|k| rows.iter().map(|r| r[k + 1]).collect())
        .collect();
    Ok(RisetimeScan { tc_grid, m_list, magnitudes, t_long, params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DriveSpec, ModelParams};

    #[test]
    fn scan_round_trip_is_exact() {
        let params = ModelParams::new(0.0, 0.2, DriveSpec::photon(0.0));
        let scan = ResonanceScan {
            grid: vec![1.23, 1.24, 1.25, 1.26, 1.27],
            means: vec![-0.001234567890123456, 0.3, -0.40621788893817606, 0.0, 1e-300],
            t_long: 50.0 * std::f64::consts::PI,
            params,
            initial: InitialState::Random { seed: 42, n_cut: 5 },
            peaks: vec![Peak { position: 1.25, mean: -0.40621788893817606, m: 1 }],
            threshold: 0.25,
            peak_floor: 0.05,
            degraded: false,
            failed_points: vec![],
        };
        let text = write_resonance_scan(&scan).unwrap();
        let parsed = read_resonance_scan(&text).unwrap();
        assert_eq!(scan, parsed);
    }

    #[test]
    fn time_series_round_trip_is_exact() {
        let params = ModelParams::new(0.1, 0.2, DriveSpec::photon(1.25));
        let cfg = NumericsConfig { n_max: 24, ..NumericsConfig::default() };
        let series = TimeSeries {
            t: vec![0.0, 0.1, 0.2],
            sigma_z: vec![-0.9231163463866358, -0.5, 0.123456789012345],
            sigma_x: vec![0.0, 1e-17, -2e-9],
            norm: vec![1.0, 1.0, 0.9999999999],
            params,
            cfg,
        };
        let text = write_time_series(&series).unwrap();
        let parsed = read_time_series(&text).unwrap();
        assert_eq!(series, parsed);
    }

    #[test]
    fn risetime_round_trip_is_exact() {
        let params = ModelParams::new(0.0, 0.2, DriveSpec::photon(1.25));
        let scan = RisetimeScan {
            tc_grid: vec![0.0, 5.0, 10.0],
            m_list: vec![1, 2],
            magnitudes: vec![vec![0.4, 0.3, 0.2], vec![0.32, 0.2, 0.1]],
            t_long: 157.07963267948966,
            params,
        };
        let text = write_risetime_scan(&scan).unwrap();
        let parsed = read_risetime_scan(&text).unwrap();
        assert_eq!(scan, parsed);
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(read_time_series("no header at all").is_err());
        assert!(read_resonance_scan("# config={}\namplitude,mean_sigma_z\n1,notanumber\n").is_err());
    }
}
