//! Path output: long-format CSV, or little-endian `f64` binary with a JSON sidecar.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{PathSample, Scheme};
use crate::error::{Error, Result};
use crate::levy_core::{BrownianSpec, SubordinatorSpec};

pub const BINARY_FORMAT: &str = "weaklevy-paths/1";

/// First line of every CSV the crate writes, as a `#` comment.
pub const CSV_FORMAT: &str = "weaklevy-csv/1";

/// Sidecar describing a binary path file. Records are `[path][step][T1..Tn, Y1..Yn]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BinaryHeader {
    pub format: String,
    pub shape: [usize; 3],
    pub dim: usize,
    pub time_grid: Vec<f64>,
    pub seed: u64,
    pub scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    pub bias_report: Vec<f64>,
    pub params_hash: String,
}

#[derive(Serialize)]
struct HashedParams<'a> {
    drift: &'a [f64],
    rays: Vec<(&'a [f64], f64, f64)>,
    atoms: Vec<(&'a [f64], f64)>,
    mu: &'a [f64],
    sigma: Vec<Vec<f64>>,
}

/// SHA-256 of a canonical JSON rendering of the model parameters.
pub fn params_hash(sub: &SubordinatorSpec, bm: &BrownianSpec) -> String {
    let params = HashedParams {
        drift: sub.drift(),
        rays: sub.rays().iter().map(|r| (r.direction(), r.shape(), r.rate())).collect(),
        atoms: sub.atoms().iter().map(|a| (a.point(), a.intensity())).collect(),
        mu: bm.mu(),
        sigma: bm.sigma_rows(),
    };
    let bytes = serde_json::to_vec(&params).expect("plain numeric data serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Sidecar path for a binary file: `paths.bin` → `paths.bin.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

impl PathSample {
    pub fn csv_header(&self) -> String {
        let mut cols = vec!["path".to_string(), "time".to_string()];
        cols.extend((1..=self.dim).map(|k| format!("T{k}")));
        cols.extend((1..=self.dim).map(|k| format!("Y{k}")));
        cols.join(",")
    }

    /// Long format: one row per path and grid point, starting at time 0.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        writeln!(w, "# {CSV_FORMAT}")?;
        writeln!(w, "{}", self.csv_header())?;
        let zeros = vec![0.0; self.dim];
        for p in 0..self.n_paths {
            for (s, time) in self.time_grid.iter().enumerate() {
                let (t, y) = if s == 0 { (&zeros[..], &zeros[..]) } else { (self.t_at(p, s - 1), self.y_at(p, s - 1)) };
                write!(w, "{p},{time}")?;
                for v in t.iter().chain(y) {
                    write!(w, ",{v}")?;
                }
                writeln!(w)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn binary_header(&self, params_hash: &str) -> BinaryHeader {
        BinaryHeader {
            format: BINARY_FORMAT.to_string(),
            shape: [self.n_paths, self.steps(), 2 * self.dim],
            dim: self.dim,
            time_grid: self.time_grid.clone(),
            seed: self.seed,
            scheme: self.scheme.name().to_string(),
            epsilon: match &self.scheme {
                Scheme::Marked { epsilon } => Some(epsilon.clone()),
                _ => None,
            },
            bias_report: self.bias_report.clone(),
            params_hash: params_hash.to_string(),
        }
    }

    /// Writes `path` and its sidecar `path.json`.
    pub fn write_binary(&self, path: &Path, params_hash: &str) -> Result<()> {
        let mut bytes = Vec::with_capacity(self.t_paths.len() * 16);
        for p in 0..self.n_paths {
            for s in 0..self.steps() {
                for v in self.t_at(p, s).iter().chain(self.y_at(p, s)) {
                    bytes.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        fs::write(path, bytes)?;
        let header = serde_json::to_string_pretty(&self.binary_header(params_hash))?;
        fs::write(sidecar_path(path), header + "\n")?;
        Ok(())
    }
}

/// Reads a binary path file and its sidecar back into a [`PathSample`].
pub fn read_binary(path: &Path) -> Result<(PathSample, BinaryHeader)> {
    let header: BinaryHeader = serde_json::from_slice(&fs::read(sidecar_path(path))?)?;
    if header.format != BINARY_FORMAT {
        return Err(Error::Document(format!("unknown path format {:?}", header.format)));
    }
    let [n_paths, steps, width] = header.shape;
    if width != 2 * header.dim || header.time_grid.len() != steps + 1 {
        return Err(Error::Document("inconsistent path file header".into()));
    }
    let bytes = fs::read(path)?;
    if bytes.len() != n_paths * steps * width * 8 {
        return Err(Error::Document(format!(
            "path file holds {} bytes, header implies {}",
            bytes.len(),
            n_paths * steps * width * 8
        )));
    }
    let dim = header.dim;
    let mut t_paths = Vec::with_capacity(n_paths * steps * dim);
    let mut y_paths = Vec::with_capacity(n_paths * steps * dim);
    for (i, chunk) in bytes.chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        if i % width < dim {
            t_paths.push(v);
        } else {
            y_paths.push(v);
        }
    }
    let scheme = match header.scheme.as_str() {
        "superposition" => Scheme::Superposition,
        "strong" => Scheme::Strong,
        "marked" => Scheme::Marked { epsilon: header.epsilon.clone().unwrap_or_default() },
        other => return Err(Error::Document(format!("unknown scheme {other:?}"))),
    };
    let sample = PathSample {
        time_grid: header.time_grid.clone(),
        n_paths,
        dim,
        t_paths,
        y_paths,
        seed: header.seed,
        scheme,
        bias_report: header.bias_report.clone(),
    };
    Ok((sample, header))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_core::validate_wvag;
    use crate::levy_measure::alpha_gamma_rays;
    use crate::simulate::{sample_weak_marked, TimeGrid};
    use nalgebra::DMatrix;

    #[test]
    fn binary_round_trip() {
        let p = validate_wvag(1.0, 2.0, vec![1.0, 1.0], vec![0.0; 2], DMatrix::identity(2, 2)).unwrap();
        let sub = alpha_gamma_rays(&p);
        let s = sample_weak_marked(&sub, p.brownian(), &TimeGrid::uniform(1.0, 3).unwrap(), 7, Some(1e-3), 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("paths.bin");
        let hash = params_hash(&sub, p.brownian());
        s.write_binary(&path, &hash).unwrap();
        let (back, header) = read_binary(&path).unwrap();
        assert_eq!(back, s);
        assert_eq!(header.params_hash, hash);
        assert_eq!(header.shape, [7, 3, 4]);
    }

    #[test]
    fn csv_layout() {
        let p = validate_wvag(1.0, 2.0, vec![1.0, 1.0], vec![0.0; 2], DMatrix::identity(2, 2)).unwrap();
        let s = crate::simulate::sample_wvag(&p, &TimeGrid::uniform(1.0, 2).unwrap(), 2, 1).unwrap();
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# weaklevy-csv/1");
        assert_eq!(lines[1], "path,time,T1,T2,Y1,Y2");
        assert_eq!(lines.len(), 2 + 2 * 3);
        assert_eq!(lines[2], "0,0,0,0,0,0");
    }

    #[test]
    fn hash_depends_on_parameters() {
        let a = validate_wvag(1.0, 2.0, vec![1.0, 1.0], vec![0.0; 2], DMatrix::identity(2, 2)).unwrap();
        let b = validate_wvag(1.0, 2.0, vec![1.0, 1.0], vec![0.1, 0.0], DMatrix::identity(2, 2)).unwrap();
        assert_ne!(
            params_hash(&alpha_gamma_rays(&a), a.brownian()),
            params_hash(&alpha_gamma_rays(&b), b.brownian())
        );
    }
}
