//! Observation tables shared by the inference, kriging and comparison layers.

use nalgebra::{DMatrix, DVector};

use crate::covkernel::DistanceMode;
use crate::curvegeom::{pairwise_curve_distance, pairwise_euclidean_distance, PlanePoint};
use crate::error::{Error, Result};

/// How the covariate row of a location is formed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Design {
    /// Intercept only, `x = (1)`.
    Intercept,
    /// Linear trend in the plane coordinates, `x = (1, x, y)`.
    Coordinates,
    /// Intercept followed by user-supplied covariate columns.
    Columns(Vec<String>),
}

impl Design {
    pub fn name(&self) -> String {
        match self {
            Design::Intercept => "intercept".into(),
            Design::Coordinates => "coordinates".into(),
            Design::Columns(c) => format!("columns:{}", c.join("|")),
        }
    }

    pub fn n_coefficients(&self) -> usize {
        match self {
            Design::Intercept => 1,
            Design::Coordinates => 3,
            Design::Columns(c) => 1 + c.len(),
        }
    }

    /// Covariate row for a location where no extra covariates are known.
    pub fn row_at(&self, point: &PlanePoint) -> Result<DVector<f64>> {
        match self {
            Design::Intercept => Ok(DVector::from_element(1, 1.0)),
            Design::Coordinates => Ok(DVector::from_vec(vec![1.0, point.x, point.y])),
            Design::Columns(_) => Err(Error::InvalidParameter(
                "covariate columns are unknown at unobserved path locations".into(),
            )),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "intercept" => Ok(Design::Intercept),
            "coordinates" => Ok(Design::Coordinates),
            other => match other.strip_prefix("columns:") {
                Some(cols) => Ok(Design::Columns(
                    cols.split('|').map(str::to_string).collect(),
                )),
                None => Err(Error::InvalidParameter(format!("unknown design '{other}'"))),
            },
        }
    }
}

/// Observations located on a curve: parameter `t`, plane coordinates,
/// design matrix and response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub t: Vec<f64>,
    pub points: Vec<PlanePoint>,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub design: Design,
}

impl Dataset {
    pub fn new(
        t: Vec<f64>,
        points: Vec<PlanePoint>,
        x: DMatrix<f64>,
        y: DVector<f64>,
        design: Design,
    ) -> Result<Self> {
        let n = y.len();
        for len in [t.len(), points.len(), x.nrows()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if x.ncols() != design.n_coefficients() {
            return Err(Error::DimensionMismatch {
                expected: design.n_coefficients(),
                found: x.ncols(),
            });
        }
        if t.iter().any(|v| !v.is_finite())
            || points.iter().any(|p| !p.is_finite())
            || x.iter().any(|v| !v.is_finite())
            || y.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter("dataset contains non-finite values".into()));
        }
        Ok(Self {
            t,
            points,
            x,
            y,
            design,
        })
    }

    /// Builds the design matrix from `design` (which must not be `Columns`).
    pub fn from_design(
        t: Vec<f64>,
        points: Vec<PlanePoint>,
        y: Vec<f64>,
        design: Design,
    ) -> Result<Self> {
        let p = design.n_coefficients();
        let mut x = DMatrix::zeros(points.len(), p);
        for (i, pt) in points.iter().enumerate() {
            x.set_row(i, &design.row_at(pt)?.transpose());
        }
        Self::new(t, points, x, DVector::from_vec(y), design)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn distances(&self, mode: DistanceMode) -> DMatrix<f64> {
        match mode {
            DistanceMode::Curve => pairwise_curve_distance(&self.t),
            DistanceMode::Euclidean => pairwise_euclidean_distance(&self.points),
        }
    }

    /// Distances from every observation to a target location.
    pub fn distances_to(&self, mode: DistanceMode, t0: f64, point: &PlanePoint) -> DVector<f64> {
        match mode {
            DistanceMode::Curve => DVector::from_iterator(self.n(), self.t.iter().map(|t| (t - t0).abs())),
            DistanceMode::Euclidean => {
                DVector::from_iterator(self.n(), self.points.iter().map(|p| p.distance(point)))
            }
        }
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            t: idx.iter().map(|&i| self.t[i]).collect(),
            points: idx.iter().map(|&i| self.points[i]).collect(),
            x: self.x.select_rows(idx),
            y: DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.y[i])),
            design: self.design.clone(),
        }
    }

    /// Same observations re-parametrized along the curve.
    pub fn with_parameter(&self, t: Vec<f64>) -> Result<Self> {
        Self::new(t, self.points.clone(), self.x.clone(), self.y.clone(), self.design.clone())
    }

    /// Same observations with a different design.
    pub fn with_design(&self, design: Design) -> Result<Self> {
        Self::from_design(self.t.clone(), self.points.clone(), self.y.iter().copied().collect(), design)
    }

    /// Prediction target located at observation `i`.
    pub fn target(&self, i: usize) -> PredictionTarget {
        PredictionTarget {
            t0: self.t[i],
            point: self.points[i],
            x0: self.x.row(i).transpose(),
        }
    }

    /// Ordinary least squares coefficients; fails if `X` is rank deficient.
    pub fn ols(&self) -> Result<DVector<f64>> {
        let xtx = self.x.transpose() * &self.x;
        let chol = nalgebra::Cholesky::new(xtx).ok_or(Error::RankDeficient)?;
        let diag = chol.l_dirty().diagonal();
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        if !(lo > hi * 1e-7) {
            return Err(Error::RankDeficient);
        }
        Ok(chol.solve(&(self.x.transpose() * &self.y)))
    }
}

/// A location at which the response is predicted.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTarget {
    pub t0: f64,
    pub point: PlanePoint,
    pub x0: DVector<f64>,
}
