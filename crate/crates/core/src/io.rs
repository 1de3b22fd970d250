//! CSV formats of the command-line pipeline.
//!
//! * Observations: header required, `lon,lat,y[,...]` or `x,y,value[,...]`.
//!   Extra numeric columns are covariates; a column named `group` holds a
//!   free-text label and is carried along but not modelled.
//! * Coastline: ordered vertices, `lon,lat` or `x,y`.
//! * Draws (format 1): `#`-prefixed `key=value` metadata lines, then
//!   `beta_0,...,sigma2,tau2,phi`.
//! * Summary: `parameter,median,q025,q975`.
//! * Predictions: one `#` line recording the response scale, then
//!   `t0,x,y,mean,sd,q025,q500,q975`.
//!
//! Geographic inputs are projected to kilometres with a local
//! equirectangular projection centred on the coastline.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use sha2::{Digest, Sha256};

use crate::covkernel::DistanceMode;
use crate::curvegeom::{GeoPoint, GeoProjection, PlanePoint, Polyline};
use crate::data::{Dataset, Design};
use crate::error::{Error, Result};
use crate::inference::{ModelParams, PosteriorDraws};
use crate::kriging::PredictionResult;
use crate::modelcomp::summarize_draws;

pub const DRAWS_FORMAT_VERSION: u32 = 1;

/// Coordinate system of an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordKind {
    /// Degrees, `lon,lat`.
    Geographic,
    /// Planar, `x,y`.
    Plane,
}

/// Rows of an observations file.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTable {
    pub kind: CoordKind,
    pub coords: Vec<[f64; 2]>,
    pub y: Vec<f64>,
    pub covariate_names: Vec<String>,
    /// One row per observation, in `covariate_names` order.
    pub covariates: Vec<Vec<f64>>,
    pub groups: Option<Vec<String>>,
    /// File line of each row, for error messages.
    pub lines: Vec<u64>,
}

impl ObservationTable {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            kind: self.kind,
            coords: idx.iter().map(|&i| self.coords[i]).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            covariate_names: self.covariate_names.clone(),
            covariates: idx.iter().map(|&i| self.covariates[i].clone()).collect(),
            groups: self.groups.as_ref().map(|g| idx.iter().map(|&i| g[i].clone()).collect()),
            lines: idx.iter().map(|&i| self.lines[i]).collect(),
        }
    }
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)?)
}

fn header_kind(path: &Path, header: &csv::StringRecord, value_col: bool) -> Result<CoordKind> {
    let h: Vec<String> = header.iter().map(str::to_ascii_lowercase).collect();
    let starts = |cols: &[&str]| h.len() >= cols.len() && h.iter().zip(cols).all(|(a, b)| a == b);
    if value_col {
        if starts(&["lon", "lat", "y"]) {
            return Ok(CoordKind::Geographic);
        }
        if starts(&["x", "y", "value"]) {
            return Ok(CoordKind::Plane);
        }
        Err(parse_err(path, 1, "header must start with lon,lat,y or x,y,value"))
    } else {
        if starts(&["lon", "lat"]) {
            return Ok(CoordKind::Geographic);
        }
        if starts(&["x", "y"]) {
            return Ok(CoordKind::Plane);
        }
        Err(parse_err(path, 1, "header must start with lon,lat or x,y"))
    }
}

fn field(path: &Path, rec: &csv::StringRecord, i: usize, name: &str) -> Result<f64> {
    let line = rec.position().map_or(0, |p| p.line());
    let raw = rec.get(i).ok_or_else(|| parse_err(path, line, format!("missing column '{name}'")))?;
    let v: f64 = raw
        .parse()
        .map_err(|_| parse_err(path, line, format!("column '{name}': cannot parse '{raw}' as a number")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("column '{name}' is not finite")));
    }
    Ok(v)
}

fn check_coords(path: &Path, line: u64, kind: CoordKind, c: [f64; 2]) -> Result<()> {
    if kind == CoordKind::Geographic {
        GeoPoint::new(c[0], c[1]).map_err(|e| parse_err(path, line, e.to_string()))?;
    }
    Ok(())
}

pub fn read_observations(path: &Path) -> Result<ObservationTable> {
    let mut rdr = reader(path)?;
    let header = rdr.headers()?.clone();
    let kind = header_kind(path, &header, true)?;
    let extra: Vec<(usize, String)> = header.iter().enumerate().skip(3).map(|(i, h)| (i, h.to_string())).collect();
    let group_col = extra.iter().find(|(_, h)| h.eq_ignore_ascii_case("group")).map(|(i, _)| *i);
    let cov_cols: Vec<(usize, String)> = extra.into_iter().filter(|(i, _)| Some(*i) != group_col).collect();

    let mut t = ObservationTable {
        kind,
        coords: Vec::new(),
        y: Vec::new(),
        covariate_names: cov_cols.iter().map(|(_, h)| h.clone()).collect(),
        covariates: Vec::new(),
        groups: group_col.map(|_| Vec::new()),
        lines: Vec::new(),
    };
    let names: Vec<&str> = header.iter().collect();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} columns, found {}", header.len(), rec.len()),
            ));
        }
        let c = [field(path, &rec, 0, names[0])?, field(path, &rec, 1, names[1])?];
        check_coords(path, line, kind, c)?;
        t.coords.push(c);
        t.y.push(field(path, &rec, 2, names[2])?);
        t.covariates
            .push(cov_cols.iter().map(|(i, h)| field(path, &rec, *i, h)).collect::<Result<_>>()?);
        if let (Some(g), Some(i)) = (t.groups.as_mut(), group_col) {
            g.push(rec[i].to_string());
        }
        t.lines.push(line);
    }
    if t.is_empty() {
        return Err(parse_err(path, 1, "no observations"));
    }
    Ok(t)
}

/// Ordered coastline vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Coastline {
    pub kind: CoordKind,
    pub vertices: Vec<[f64; 2]>,
}

/// Locations only, `lon,lat` or `x,y`, e.g. explicit prediction targets.
pub fn read_locations(path: &Path) -> Result<(CoordKind, Vec<[f64; 2]>)> {
    let mut rdr = reader(path)?;
    let header = rdr.headers()?.clone();
    let kind = header_kind(path, &header, false)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let c = [field(path, &rec, 0, &header[0])?, field(path, &rec, 1, &header[1])?];
        check_coords(path, line, kind, c)?;
        out.push(c);
    }
    if out.is_empty() {
        return Err(parse_err(path, 1, "no locations"));
    }
    Ok((kind, out))
}

pub fn read_coastline(path: &Path) -> Result<Coastline> {
    let (kind, vertices) = read_locations(path)?;
    if vertices.len() < 2 {
        return Err(parse_err(path, 1, "coastline needs at least two vertices"));
    }
    Ok(Coastline { kind, vertices })
}

/// Planar frame shared by a coastline and the locations measured near it.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub kind: CoordKind,
    /// Set for geographic inputs.
    pub projection: Option<GeoProjection>,
    pub polyline: Polyline,
}

impl Frame {
    pub fn new(coast: &Coastline) -> Result<Self> {
        let projection = match coast.kind {
            CoordKind::Plane => None,
            CoordKind::Geographic => {
                let pts = coast
                    .vertices
                    .iter()
                    .map(|c| GeoPoint::new(c[0], c[1]))
                    .collect::<Result<Vec<_>>>()?;
                Some(GeoProjection::centered_on(&pts)?)
            }
        };
        let mut frame = Self {
            kind: coast.kind,
            projection,
            polyline: Polyline::new(vec![PlanePoint::new(0.0, 0.0), PlanePoint::new(1.0, 0.0)])?,
        };
        frame.polyline = Polyline::new(coast.vertices.iter().map(|c| frame.to_plane(*c)).collect())?;
        Ok(frame)
    }

    pub fn to_plane(&self, c: [f64; 2]) -> PlanePoint {
        match &self.projection {
            None => PlanePoint::new(c[0], c[1]),
            Some(p) => p.project(&GeoPoint {
                lon: c[0],
                lat: c[1],
            }),
        }
    }

    /// Arc-length parameter of each location's nearest coastline point.
    pub fn locate(&self, coords: &[[f64; 2]]) -> (Vec<f64>, Vec<PlanePoint>) {
        coords
            .iter()
            .map(|c| {
                let p = self.to_plane(*c);
                (self.polyline.project(&p).t, p)
            })
            .unzip()
    }
}

/// Response scale of a fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transform {
    #[default]
    None,
    Log,
}

impl Transform {
    pub fn as_str(&self) -> &'static str {
        match self {
            Transform::None => "none",
            Transform::Log => "log",
        }
    }
}

impl FromStr for Transform {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Transform::None),
            "log" => Ok(Transform::Log),
            other => Err(Error::InvalidParameter(format!("unknown transform '{other}'"))),
        }
    }
}

/// Builds the dataset of `obs` located on the coastline of `frame`.
/// Observation positions keep their own plane coordinates (used by the
/// Euclidean models); `t` comes from projection onto the polyline.
pub fn build_dataset(
    obs: &ObservationTable,
    frame: &Frame,
    design: &Design,
    transform: Transform,
    path: &Path,
) -> Result<Dataset> {
    if obs.kind != frame.kind {
        return Err(Error::Mismatch(
            "observations and coastline use different coordinate systems".into(),
        ));
    }
    let y = match transform {
        Transform::None => obs.y.clone(),
        Transform::Log => obs
            .y
            .iter()
            .zip(&obs.lines)
            .map(|(&v, &line)| {
                if v > 0.0 {
                    Ok(v.ln())
                } else {
                    Err(parse_err(path, line, format!("log transform needs y > 0, found {v}")))
                }
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let (t, points) = frame.locate(&obs.coords);
    match design {
        Design::Columns(cols) => {
            let idx: Vec<usize> = cols
                .iter()
                .map(|c| {
                    obs.covariate_names
                        .iter()
                        .position(|n| n == c)
                        .ok_or_else(|| Error::InvalidParameter(format!("no covariate column '{c}'")))
                })
                .collect::<Result<_>>()?;
            let x = DMatrix::from_fn(obs.len(), 1 + idx.len(), |i, j| {
                if j == 0 {
                    1.0
                } else {
                    obs.covariates[i][idx[j - 1]]
                }
            });
            Dataset::new(t, points, x, DVector::from_vec(y), design.clone())
        }
        _ => Dataset::from_design(t, points, y, design.clone()),
    }
}

/// Hex SHA-256 of the polyline vertices (little-endian `f64` pairs).
pub fn polyline_hash(poly: &Polyline) -> String {
    let mut h = Sha256::new();
    for v in poly.vertices() {
        h.update(v.x.to_le_bytes());
        h.update(v.y.to_le_bytes());
    }
    h.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Provenance of a draws file, checked before the draws are reused.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawsMetadata {
    pub model: String,
    pub mode: DistanceMode,
    pub design: Design,
    pub transform: Transform,
    pub polyline_hash: String,
}

pub fn write_draws(path: &Path, draws: &PosteriorDraws, meta: &DrawsMetadata) -> Result<()> {
    let mut f = File::create(path)?;
    writeln!(f, "# coastkrig-draws={DRAWS_FORMAT_VERSION}")?;
    writeln!(f, "# model={}", meta.model)?;
    writeln!(f, "# distance={}", meta.mode.as_str())?;
    writeln!(f, "# design={}", meta.design.name())?;
    writeln!(f, "# transform={}", meta.transform.as_str())?;
    writeln!(f, "# polyline={}", meta.polyline_hash)?;
    let mut w = csv::Writer::from_writer(f);
    w.write_record(draws.parameter_names())?;
    for d in &draws.draws {
        let mut row: Vec<String> = d.beta.iter().map(f64::to_string).collect();
        row.extend([d.sigma2, d.tau2, d.phi].map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_draws(path: &Path) -> Result<(PosteriorDraws, DrawsMetadata)> {
    let mut keys = std::collections::BTreeMap::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let Some(rest) = line.strip_prefix('#') else { break };
        let (k, v) = rest
            .trim()
            .split_once('=')
            .ok_or_else(|| parse_err(path, i as u64 + 1, "metadata lines must be '# key=value'"))?;
        keys.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| {
        keys.get(k)
            .cloned()
            .ok_or_else(|| parse_err(path, 1, format!("missing metadata '{k}'")))
    };
    let version = get("coastkrig-draws")?;
    if version != DRAWS_FORMAT_VERSION.to_string() {
        return Err(parse_err(path, 1, format!("unsupported draws format version {version}")));
    }
    let meta = DrawsMetadata {
        model: get("model")?,
        mode: get("distance")?.parse()?,
        design: Design::parse(&get("design")?)?,
        transform: get("transform")?.parse()?,
        polyline_hash: get("polyline")?,
    };

    let mut rdr = reader(path)?;
    let header = rdr.headers()?.clone();
    let p = meta.design.n_coefficients();
    let expected: Vec<String> = (0..p)
        .map(|k| format!("beta_{k}"))
        .chain(["sigma2", "tau2", "phi"].map(String::from))
        .collect();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(parse_err(
            path,
            0,
            format!("draws columns must be {}", expected.join(",")),
        ));
    }
    let mut draws = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let v = (0..p + 3)
            .map(|i| field(path, &rec, i, &expected[i]))
            .collect::<Result<Vec<_>>>()?;
        draws.push(ModelParams {
            beta: DVector::from_column_slice(&v[..p]),
            sigma2: v[p],
            tau2: v[p + 1],
            phi: v[p + 2],
        });
    }
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    Ok((
        PosteriorDraws {
            model: meta.model.clone(),
            mode: meta.mode,
            draws,
            omega: None,
            acceptance: None,
        },
        meta,
    ))
}

/// Posterior median and central 95% interval per parameter.
pub fn write_summary<W: Write>(w: W, draws: &PosteriorDraws) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["parameter", "median", "q025", "q975"])?;
    for s in summarize_draws(draws)? {
        out.write_record([s.name, s.median.to_string(), s.lo.to_string(), s.hi.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_predictions<W: Write>(mut w: W, preds: &[PredictionResult], transform: Transform) -> Result<()> {
    writeln!(w, "# scale={}", transform.as_str())?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t0", "x", "y", "mean", "sd", "q025", "q500", "q975"])?;
    for p in preds {
        out.write_record(
            [p.t0, p.point.x, p.point.y, p.mean, p.sd, p.q025, p.q500, p.q975].map(|v| v.to_string()),
        )?;
    }
    out.flush()?;
    Ok(())
}
