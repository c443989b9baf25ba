use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ideal_angles::field::bundled;
use ideal_angles::primes::PrimeIdealRec;
use ideal_angles::torus::TorusPoint;
use ideal_angles::{Error, FieldSpec, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// A field given as a JSON path, or as the name of a bundled field
/// (`cubic23`, `gaussian`, `sqrt2`, with or without `.json`).
pub struct LoadedField {
    pub spec: FieldSpec,
    pub source: String,
    pub sha256: String,
}

pub fn load_field(arg: &str) -> Result<LoadedField> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg)?
    } else {
        let stem = arg
            .rsplit('/')
            .next()
            .unwrap_or(arg)
            .trim_end_matches(".json");
        match stem {
            "cubic23" => bundled::CUBIC23.to_string(),
            "gaussian" => bundled::GAUSSIAN.to_string(),
            "sqrt2" => bundled::SQRT2.to_string(),
            _ => {
                return Err(Error::Io(io::Error::new(
                    io::ErrorKind::NotFound,
                    format!("field file {arg:?} not found"),
                )))
            }
        }
    };
    Ok(LoadedField {
        spec: FieldSpec::from_json(&text)?,
        sha256: sha256_hex(text.as_bytes()),
        source: arg.to_string(),
    })
}

/// Output sink that keeps the written bytes for the manifest checksum.
pub struct Output {
    path: Option<PathBuf>,
    buf: Vec<u8>,
}

impl Output {
    pub fn new(arg: &str) -> Self {
        Output {
            path: (arg != "-").then(|| PathBuf::from(arg)),
            buf: Vec::new(),
        }
    }

    pub fn csv(&mut self) -> csv::Writer<&mut Vec<u8>> {
        csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut self.buf)
    }

    /// Write the data out; returns `(path, sha256)` when going to a file.
    pub fn finish(self) -> Result<Option<(PathBuf, String)>> {
        let digest = sha256_hex(&self.buf);
        match self.path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                fs::write(&p, &self.buf)?;
                Ok(Some((p, digest)))
            }
            None => {
                io::stdout().write_all(&self.buf)?;
                Ok(None)
            }
        }
    }
}

pub fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn write_manifest(
    out: &Path,
    subcommand: &str,
    params: &BTreeMap<String, Value>,
    inputs: &BTreeMap<String, String>,
    out_sha: &str,
    summary: Value,
) -> Result<()> {
    let manifest = json!({
        "subcommand": subcommand,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "params": params,
        "inputs": inputs,
        "outputs": { out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(): out_sha },
        "summary": summary,
    });
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    let mut path = out.as_os_str().to_owned();
    path.push(".manifest.json");
    fs::write(PathBuf::from(path), text)?;
    Ok(())
}

pub fn fmt_point(p: &TorusPoint) -> Vec<String> {
    p.coords().iter().map(|t| format!("{t:.9}")).collect()
}

pub fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// One row of an angles CSV.
#[derive(Clone, Debug)]
pub struct AngleRow {
    pub norm: u64,
    pub p: u64,
    pub root: String,
    pub point: TorusPoint,
}

fn field_u64(rec: &csv::StringRecord, i: usize, what: &str) -> Result<u64> {
    rec.get(i)
        .ok_or_else(|| Error::Parse(format!("missing {what} column")))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn field_f64(rec: &csv::StringRecord, i: usize, what: &str) -> Result<f64> {
    rec.get(i)
        .ok_or_else(|| Error::Parse(format!("missing {what} column")))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn reader(path: &str) -> Result<(csv::Reader<fs::File>, Vec<String>, String)> {
    let bytes = fs::read(path)?;
    let sha = sha256_hex(&bytes);
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    Ok((rdr, headers, sha))
}

pub fn read_angles(path: &str) -> Result<(Vec<AngleRow>, String)> {
    let (mut rdr, headers, sha) = reader(path)?;
    if headers.len() < 4 || headers[..3] != ["norm", "p", "root"] {
        return Err(Error::Parse(format!(
            "{path}: expected columns norm,p,root,t1,..."
        )));
    }
    let dim = headers.len() - 3;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let coords = (0..dim)
            .map(|j| field_f64(&rec, 3 + j, "t"))
            .collect::<Result<Vec<_>>>()?;
        rows.push(AngleRow {
            norm: field_u64(&rec, 0, "norm")?,
            p: field_u64(&rec, 1, "p")?,
            root: rec[2].to_string(),
            point: TorusPoint::new(coords),
        });
    }
    if rows.windows(2).any(|w| w[1].norm < w[0].norm) {
        return Err(Error::Parse(format!("{path}: rows are not in ascending norm order")));
    }
    Ok((rows, sha))
}

/// `(p, root)` rows of a primes or generators CSV, plus the remaining cells.
pub fn read_ideal_rows(path: &str) -> Result<(Vec<(u64, String, Vec<String>)>, Vec<String>, String)> {
    let (mut rdr, headers, sha) = reader(path)?;
    if headers.len() < 3 || headers[..3] != ["norm", "p", "root"] {
        return Err(Error::Parse(format!("{path}: expected columns norm,p,root,...")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        rows.push((
            field_u64(&rec, 1, "p")?,
            rec[2].to_string(),
            rec.iter().skip(3).map(str::to_string).collect(),
        ));
    }
    Ok((rows, headers, sha))
}

pub fn resolve_ideal(field: &FieldSpec, p: u64, root: &str) -> Result<PrimeIdealRec> {
    PrimeIdealRec::from_label(field, p, root)
}

/// A row of a `ratioset` pairs CSV.
#[derive(Clone, Debug)]
pub struct PairRow {
    pub p_label: String,
    pub p_norm: u64,
    pub rho_p: TorusPoint,
    pub q_label: String,
    pub q_norm: u64,
    pub rho_q: TorusPoint,
}

pub fn read_pairs(path: &str) -> Result<(Vec<PairRow>, usize, String)> {
    let (mut rdr, headers, sha) = reader(path)?;
    let dim = headers.iter().filter(|h| h.starts_with("p_t")).count();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("{path}: missing column {name}")))
    };
    let (pn, pp, pr, qn, qp, qr) = (
        col("p_norm")?,
        col("p")?,
        col("p_root")?,
        col("q_norm")?,
        col("q")?,
        col("q_root")?,
    );
    let pt: Vec<usize> = (1..=dim).map(|j| col(&format!("p_t{j}"))).collect::<Result<_>>()?;
    let qt: Vec<usize> = (1..=dim).map(|j| col(&format!("q_t{j}"))).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let point = |cols: &[usize]| -> Result<TorusPoint> {
            Ok(TorusPoint::new(
                cols.iter()
                    .map(|&c| field_f64(&rec, c, "t"))
                    .collect::<Result<Vec<_>>>()?,
            ))
        };
        rows.push(PairRow {
            p_label: format!("{}:{}", &rec[pp], &rec[pr]),
            p_norm: field_u64(&rec, pn, "p_norm")?,
            rho_p: point(&pt)?,
            q_label: format!("{}:{}", &rec[qp], &rec[qr]),
            q_norm: field_u64(&rec, qn, "q_norm")?,
            rho_q: point(&qt)?,
        });
    }
    Ok((rows, dim, sha))
}
