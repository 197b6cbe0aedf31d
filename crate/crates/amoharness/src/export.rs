//! Deterministic CSV/JSON export: fixed field order, floats at 17
//! significant digits, and refusal to overwrite without force.

use std::path::Path;

use serde::Serialize;

use amospec::spectral::SpectralData;
use amospec::Measure64;

use crate::report::VerificationReport;
use crate::HarnessError;

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(HarnessError::Config(format!(
                "format must be csv or json, got {other}"
            ))),
        }
    }
}

/// serde_json formatter writing every float with 17 significant digits
/// (scientific form, lossless for f64); non-finite floats become null.
struct Float17 {
    pretty: serde_json::ser::PrettyFormatter<'static>,
}

impl Float17 {
    fn new() -> Self {
        Self {
            pretty: serde_json::ser::PrettyFormatter::new(),
        }
    }
}

macro_rules! forward_fmt {
    ($($name:ident ( $($arg:ident : $ty:ty),* );)*) => {
        $(fn $name<W>(&mut self, writer: &mut W $(, $arg: $ty)*) -> std::io::Result<()>
        where
            W: ?Sized + std::io::Write,
        {
            self.pretty.$name(writer $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for Float17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.write_f64(writer, f64::from(value))
    }

    forward_fmt! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_key();
        begin_object_value();
        end_object_value();
    }
}

/// Serializes any value to pretty JSON with 17-significant-digit floats.
pub fn json_17<T: Serialize>(value: &T) -> Result<String, HarnessError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Float17::new());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| HarnessError::Config(format!("non-utf8 json: {e}")))
}

/// 17-significant-digit text form used in CSV cells.
#[must_use]
pub fn fmt17(value: f64) -> String {
    format!("{value:.16e}")
}

/// Writes bytes to a path, refusing to overwrite unless `force`.
pub fn write_output(path: &Path, bytes: &[u8], force: bool) -> Result<(), HarnessError> {
    if path.exists() && !force {
        return Err(HarnessError::WouldOverwrite {
            path: path.to_path_buf(),
        });
    }
    std::fs::write(path, bytes).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_error(e: csv::Error) -> HarnessError {
    HarnessError::Csv(e.to_string())
}

fn csv_into_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, HarnessError> {
    w.into_inner()
        .map_err(|e| HarnessError::Csv(e.to_string()))
}

/// Exports a verification report. JSON is the full report; CSV is one row
/// per check line in report order.
pub fn export_report(
    report: &VerificationReport,
    format: ExportFormat,
    path: &Path,
    force: bool,
) -> Result<(), HarnessError> {
    let bytes = match format {
        ExportFormat::Json => json_17(report)?.into_bytes(),
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "experiment",
                "kind",
                "name",
                "status",
                "direction",
                "measured",
                "bound",
                "slack",
                "margin",
                "bound_provenance",
                "scale_low",
                "scale_high",
                "note",
            ])
            .map_err(csv_error)?;
            for c in &report.checks {
                let (lo, hi) = c
                    .scale_window
                    .map_or((String::new(), String::new()), |(a, b)| (fmt17(a), fmt17(b)));
                w.write_record([
                    report.experiment.as_str(),
                    report.kind.as_str(),
                    c.name.as_str(),
                    c.status.label(),
                    c.direction.label(),
                    &fmt17(c.measured),
                    &fmt17(c.bound),
                    &fmt17(c.slack),
                    &fmt17(c.margin),
                    c.bound_provenance.label(),
                    &lo,
                    &hi,
                    c.note.as_deref().unwrap_or(""),
                ])
                .map_err(csv_error)?;
            }
            csv_into_bytes(w)?
        }
    };
    write_output(path, &bytes, force)
}

/// Exports a measure: atoms in position order, weights exact to 17
/// significant digits, so a CSV round-trip reproduces the measure.
pub fn export_measure(
    mu: &Measure64,
    format: ExportFormat,
    path: &Path,
    force: bool,
) -> Result<(), HarnessError> {
    let bytes = match format {
        ExportFormat::Json => {
            #[derive(Serialize)]
            struct MeasureView<'a> {
                positions: &'a [f64],
                weights: &'a [f64],
            }
            json_17(&MeasureView {
                positions: mu.positions(),
                weights: mu.weights(),
            })?
            .into_bytes()
        }
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["position", "weight"]).map_err(csv_error)?;
            for (x, wt) in mu.positions().iter().zip(mu.weights()) {
                w.write_record([fmt17(*x), fmt17(*wt)]).map_err(csv_error)?;
            }
            csv_into_bytes(w)?
        }
    };
    write_output(path, &bytes, force)
}

/// Reads a measure back from its CSV export.
pub fn read_measure_csv(path: &Path) -> Result<Measure64, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let mut atoms = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_error)?;
        let parse = |i: usize| -> Result<f64, HarnessError> {
            record
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| HarnessError::Csv(format!("bad row: {record:?}")))
        };
        atoms.push((parse(0)?, parse(1)?));
    }
    Ok(Measure64::from_atoms(atoms)?)
}

/// Serializable view of spectral data (accessor fields flattened).
#[derive(Serialize)]
struct SpectralView<'a> {
    size: usize,
    norm_bound: f64,
    orthonormality_residual: f64,
    max_eigen_residual: f64,
    clustered: usize,
    sites: &'a [i64],
    eigenvalues: &'a [f64],
    /// amplitudes[j][k] = psi_k(sites[j]).
    amplitudes: Vec<&'a [f64]>,
}

/// Exports truncation spectral data. CSV is long form: one row per
/// (eigenvalue, site) pair, or per eigenvalue when no sites were retained.
pub fn export_spectral(
    data: &SpectralData,
    format: ExportFormat,
    path: &Path,
    force: bool,
) -> Result<(), HarnessError> {
    let bytes = match format {
        ExportFormat::Json => {
            let amplitudes = data
                .sites()
                .iter()
                .map(|&s| data.amplitudes_at(s))
                .collect::<Result<Vec<_>, _>>()?;
            json_17(&SpectralView {
                size: data.size(),
                norm_bound: data.norm_bound(),
                orthonormality_residual: data.orthonormality_residual(),
                max_eigen_residual: data.max_eigen_residual(),
                clustered: data.clustered(),
                sites: data.sites(),
                eigenvalues: data.eigenvalues(),
                amplitudes,
            })?
            .into_bytes()
        }
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["k", "eigenvalue", "site", "amplitude"])
                .map_err(csv_error)?;
            for (k, &e) in data.eigenvalues().iter().enumerate() {
                if data.sites().is_empty() {
                    w.write_record([k.to_string(), fmt17(e), String::new(), String::new()])
                        .map_err(csv_error)?;
                } else {
                    for &site in data.sites() {
                        let amp = data.amplitudes_at(site)?[k];
                        w.write_record([k.to_string(), fmt17(e), site.to_string(), fmt17(amp)])
                            .map_err(csv_error)?;
                    }
                }
            }
            csv_into_bytes(w)?
        }
    };
    write_output(path, &bytes, force)
}
