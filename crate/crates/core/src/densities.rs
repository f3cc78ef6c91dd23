//! Admissible densities `0 <= ρ <= 1` with finite mass.
//!
//! * [`GridDensity`]: cell values on a uniform lattice in 1 or 2 dimensions.
//! * [`IntervalConfig`]: indicator of a finite union of closed intervals (1D).
//! * [`DropletConfig`]: indicator of a union of disjoint balls.
//!
//! Grids are sampled by the cell-center test, so indicator densities stay
//! exactly `{0, 1}`-valued.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numeric::unit_ball_volume;

/// Absolute tolerance for interval endpoint comparisons.
pub const ENDPOINT_TOL: f64 = 1e-12;

/// Uniform lattice of cells. `origin` is the center of cell 0; cell
/// `(i, j)` has center `origin + h·(i, j)`. Row-major with the last axis
/// fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub dim: usize,
    pub origin: Vec<f64>,
    pub h: f64,
    pub shape: Vec<usize>,
}

impl Lattice {
    pub fn new(dim: usize, origin: Vec<f64>, h: f64, shape: Vec<usize>) -> Result<Self> {
        ensure!(dim == 1 || dim == 2, InvalidDensity, "only dimensions 1 and 2 are supported, got {dim}");
        ensure!(h > 0.0 && h.is_finite(), InvalidDensity, "grid spacing must be > 0, got {h}");
        ensure!(
            origin.len() == dim && shape.len() == dim,
            InvalidDensity,
            "origin and shape must have {dim} components"
        );
        ensure!(origin.iter().all(|x| x.is_finite()), InvalidDensity, "origin must be finite");
        Ok(Self { dim, origin, h, shape })
    }

    /// Smallest lattice whose cells tile `[lo - pad·h, hi + pad·h]`, with the
    /// first cell edge at `lo - pad·h`.
    pub fn covering(lo: &[f64], hi: &[f64], h: f64, pad: usize) -> Result<Self> {
        ensure!(h > 0.0 && h.is_finite(), InvalidDensity, "grid spacing must be > 0, got {h}");
        let dim = lo.len();
        ensure!(hi.len() == dim, InvalidDensity, "bounding box corners differ in dimension");
        let mut origin = Vec::with_capacity(dim);
        let mut shape = Vec::with_capacity(dim);
        for k in 0..dim {
            let extent = (hi[k] - lo[k]).max(0.0);
            // tolerate round-off so that e.g. 1.0 / 0.1 gives 10 cells, not 11
            let cells = ((extent / h) - 1e-9).ceil().max(0.0) as usize;
            origin.push(lo[k] - pad as f64 * h + 0.5 * h);
            shape.push(cells + 2 * pad);
        }
        Self::new(dim, origin, h, shape)
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Multi-index of a flat index.
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        match self.dim {
            1 => [idx, 0],
            _ => [idx / self.shape[1], idx % self.shape[1]],
        }
    }

    pub fn flat_index(&self, mi: [usize; 2]) -> usize {
        match self.dim {
            1 => mi[0],
            _ => mi[0] * self.shape[1] + mi[1],
        }
    }

    /// Cell-center coordinates (second component is 0 in 1D).
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let mi = self.multi_index(idx);
        let mut c = [0.0; 2];
        for (k, slot) in c.iter_mut().enumerate().take(self.dim) {
            *slot = self.origin[k] + self.h * mi[k] as f64;
        }
        c
    }

    /// Distance between two cells of this lattice, from integer offsets.
    pub fn cell_distance(&self, i: usize, j: usize) -> f64 {
        let a = self.multi_index(i);
        let b = self.multi_index(j);
        let di = a[0].abs_diff(b[0]) as f64;
        let dj = a[1].abs_diff(b[1]) as f64;
        if self.dim == 1 {
            self.h * di
        } else {
            self.h * (di * di + dj * dj).sqrt()
        }
    }

    /// Same spacing and dimension, possibly different origin and shape.
    pub fn compatible(&self, other: &Lattice) -> bool {
        self.dim == other.dim && self.h == other.h
    }
}

/// Euclidean distance between points given as `[x, y]` (1D uses `y = 0`).
pub fn point_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// A density sampled on a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDensity {
    lattice: Lattice,
    values: Vec<f64>,
    mass: f64,
}

impl GridDensity {
    /// Builds a density, enforcing `0 <= value <= 1` in every cell.
    pub fn new(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidDensity(format!("cell {i} has value {v} outside [0, 1]")));
        }
        Self::from_raw(lattice, values)
    }

    /// Builds a density without the bathtub check (values must be finite).
    /// Use [`check_admissible`] to diagnose such densities.
    pub fn from_raw(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        ensure!(
            values.len() == lattice.len(),
            InvalidDensity,
            "expected {} values, got {}",
            lattice.len(),
            values.len()
        );
        ensure!(values.iter().all(|v| v.is_finite()), InvalidDensity, "values must be finite");
        let mass = values.iter().sum::<f64>() * lattice.cell_volume();
        Ok(Self { lattice, values, mass })
    }

    /// Indicator of the given cells.
    pub fn from_occupied(lattice: Lattice, occupied: &[usize]) -> Result<Self> {
        let mut values = vec![0.0; lattice.len()];
        for &i in occupied {
            ensure!(i < values.len(), InvalidDensity, "cell {i} outside the lattice");
            values[i] = 1.0;
        }
        Self::new(lattice, values)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim
    }

    pub fn h(&self) -> f64 {
        self.lattice.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Indices of cells with positive value, ascending.
    pub fn occupied(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Pointwise sum on the same lattice.
    pub fn add(&self, other: &GridDensity) -> Result<GridDensity> {
        ensure!(self.lattice == other.lattice, InvalidDensity, "densities live on different lattices");
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        GridDensity::from_raw(self.lattice.clone(), values)
    }

    /// Shifts the lattice by an integer number of cells per axis.
    pub fn translated(&self, cells: &[i64]) -> GridDensity {
        let mut lattice = self.lattice.clone();
        for (o, c) in lattice.origin.iter_mut().zip(cells) {
            *o += *c as f64 * lattice.h;
        }
        GridDensity { lattice, values: self.values.clone(), mass: self.mass }
    }

    /// Flat text format: a header `dim origin.. h shape..` followed by the
    /// values, one lattice row per line.
    pub fn to_text(&self) -> String {
        let l = &self.lattice;
        let mut out = String::new();
        write!(out, "{}", l.dim).unwrap();
        for o in &l.origin {
            write!(out, " {o}").unwrap();
        }
        write!(out, " {}", l.h).unwrap();
        for s in &l.shape {
            write!(out, " {s}").unwrap();
        }
        out.push('\n');
        let row = if l.dim == 1 { l.shape[0].max(1) } else { l.shape[1].max(1) };
        for chunk in self.values.chunks(row) {
            let line: Vec<String> = chunk.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<GridDensity> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty grid file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let dim: usize = parse_field(fields.first().copied(), "dim")?;
        ensure!(dim == 1 || dim == 2, Parse, "unsupported dimension {dim}");
        ensure!(fields.len() == 2 + 2 * dim, Parse, "grid header must have {} fields", 2 + 2 * dim);
        let origin = (0..dim)
            .map(|k| parse_field(Some(fields[1 + k]), "origin"))
            .collect::<Result<Vec<f64>>>()?;
        let h: f64 = parse_field(Some(fields[1 + dim]), "h")?;
        let shape = (0..dim)
            .map(|k| parse_field(Some(fields[2 + dim + k]), "shape"))
            .collect::<Result<Vec<usize>>>()?;
        let values = lines
            .flat_map(|l| l.split_whitespace())
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("bad value {t:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        GridDensity::from_raw(Lattice::new(dim, origin, h, shape)?, values)
    }

    /// CSV with columns `index, x[, y], value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.dim() == 1 { "index,x,value\n" } else { "index,x,y,value\n" });
        for (i, v) in self.values.iter().enumerate() {
            let c = self.lattice.center(i);
            if self.dim() == 1 {
                writeln!(out, "{i},{},{v}", c[0]).unwrap();
            } else {
                writeln!(out, "{i},{},{},{v}", c[0], c[1]).unwrap();
            }
        }
        out
    }
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, name: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let f = field.ok_or_else(|| Error::Parse(format!("missing {name}")))?;
    f.parse().map_err(|e| Error::Parse(format!("bad {name} {f:?}: {e}")))
}

/// Indicator of a finite union of closed intervals, kept sorted and disjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct IntervalConfig {
    intervals: Vec<(f64, f64)>,
}

impl IntervalConfig {
    /// Sorts and merges overlapping or touching intervals (gaps below
    /// [`ENDPOINT_TOL`] count as touching).
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            ensure!(a.is_finite() && b.is_finite(), InvalidDensity, "interval endpoints must be finite");
            ensure!(a < b, InvalidDensity, "interval [{a}, {b}] is empty or reversed");
        }
        let mut sorted = intervals;
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (a, b) in sorted {
            match merged.last_mut() {
                Some(last) if a <= last.1 + ENDPOINT_TOL => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// `sup - inf` of the support; 0 when empty.
    pub fn diameter(&self) -> f64 {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(f), Some(l)) => l.1 - f.0,
            _ => 0.0,
        }
    }

    pub fn translated(&self, shift: f64) -> IntervalConfig {
        IntervalConfig { intervals: self.intervals.iter().map(|(a, b)| (a + shift, b + shift)).collect() }
    }

    /// Support restricted to `[lo, hi]`.
    pub fn restricted(&self, lo: f64, hi: f64) -> IntervalConfig {
        let intervals = self
            .intervals
            .iter()
            .filter_map(|&(a, b)| {
                let (x, y) = (a.max(lo), b.min(hi));
                (y > x).then_some((x, y))
            })
            .collect();
        IntervalConfig { intervals }
    }

    /// Union with another configuration.
    pub fn union(&self, other: &IntervalConfig) -> IntervalConfig {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        IntervalConfig::new(all).expect("union of valid configurations is valid")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("intervals serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl TryFrom<Vec<(f64, f64)>> for IntervalConfig {
    type Error = Error;
    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        IntervalConfig::new(v)
    }
}

impl From<IntervalConfig> for Vec<(f64, f64)> {
    fn from(c: IntervalConfig) -> Self {
        c.intervals
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `|B_r|`: `2r` in 1D, `πr²` in 2D.
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    fn point(&self) -> [f64; 2] {
        [self.center[0], self.center.get(1).copied().unwrap_or(0.0)]
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        point_distance(self.point(), p) <= self.radius * (1.0 + 1e-12) + 1e-12
    }
}

/// Radius of the ball with volume `mass` in dimension `dim`.
pub fn ball_radius(mass: f64, dim: usize) -> f64 {
    (mass / unit_ball_volume(dim)).powf(1.0 / dim as f64)
}

/// A union of pairwise disjoint balls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Ball>", into = "Vec<Ball>")]
pub struct DropletConfig {
    dim: usize,
    balls: Vec<Ball>,
}

impl DropletConfig {
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        let dim = balls.first().map_or(1, Ball::dim);
        ensure!(dim == 1 || dim == 2, InvalidDensity, "only dimensions 1 and 2 are supported, got {dim}");
        for b in &balls {
            ensure!(b.dim() == dim, InvalidDensity, "all balls must have dimension {dim}");
            ensure!(b.radius > 0.0 && b.radius.is_finite(), InvalidDensity, "radius must be > 0, got {}", b.radius);
            ensure!(b.center.iter().all(|c| c.is_finite()), InvalidDensity, "centers must be finite");
        }
        for (i, a) in balls.iter().enumerate() {
            for b in &balls[i + 1..] {
                let d = point_distance(a.point(), b.point());
                ensure!(
                    d >= a.radius + b.radius - ENDPOINT_TOL,
                    InvalidDensity,
                    "balls at {:?} and {:?} overlap",
                    a.center,
                    b.center
                );
            }
        }
        Ok(Self { dim, balls })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn mass(&self) -> f64 {
        self.balls.iter().map(Ball::volume).sum()
    }

    /// Bounding box `(lo, hi)` of the union.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for b in &self.balls {
            for k in 0..self.dim {
                lo[k] = lo[k].min(b.center[k] - b.radius);
                hi[k] = hi[k].max(b.center[k] + b.radius);
            }
        }
        (lo, hi)
    }

    /// The 1D configuration as intervals.
    pub fn to_intervals(&self) -> Result<IntervalConfig> {
        ensure!(self.dim == 1, InvalidDensity, "only 1D droplets are intervals");
        IntervalConfig::new(self.balls.iter().map(|b| (b.center[0] - b.radius, b.center[0] + b.radius)).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("droplets serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl TryFrom<Vec<Ball>> for DropletConfig {
    type Error = Error;
    fn try_from(v: Vec<Ball>) -> Result<Self> {
        DropletConfig::new(v)
    }
}

impl From<DropletConfig> for Vec<Ball> {
    fn from(c: DropletConfig) -> Self {
        c.balls
    }
}

/// A primitive set used to describe a region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Shape {
    Interval { lo: f64, hi: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    Rect { lo: Vec<f64>, hi: Vec<f64> },
}

impl Shape {
    fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        match self {
            Shape::Interval { lo, hi } => p[0] >= lo - tol && p[0] <= hi + tol,
            Shape::Ball { center, radius } => {
                let c = [center[0], center.get(1).copied().unwrap_or(0.0)];
                point_distance(c, p) <= radius + tol
            }
            Shape::Rect { lo, hi } => (0..lo.len()).all(|k| p[k] >= lo[k] - tol && p[k] <= hi[k] + tol),
        }
    }

    fn bounds(&self, dim: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            Shape::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            Shape::Ball { center, radius } => (
                center.iter().take(dim).map(|c| c - radius).collect(),
                center.iter().take(dim).map(|c| c + radius).collect(),
            ),
            Shape::Rect { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Shape::Interval { .. } => 1,
            Shape::Ball { center, .. } => center.len(),
            Shape::Rect { lo, .. } => lo.len(),
        }
    }
}

/// A finite union of shapes in a common dimension.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub shapes: Vec<Shape>,
}

impl Region {
    pub fn new(shapes: Vec<Shape>) -> Self {
        Self { shapes }
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        self.shapes.iter().any(|s| s.contains(p, tol))
    }

    fn bounding_box(&self, dim: usize) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut it = self.shapes.iter().map(|s| s.bounds(dim));
        let (mut lo, mut hi) = it.next()?;
        for (l, h) in it {
            for k in 0..dim {
                lo[k] = lo[k].min(l[k]);
                hi[k] = hi[k].max(h[k]);
            }
        }
        Some((lo, hi))
    }
}

impl From<&IntervalConfig> for Region {
    fn from(c: &IntervalConfig) -> Self {
        Region::new(c.intervals().iter().map(|&(lo, hi)| Shape::Interval { lo, hi }).collect())
    }
}

impl From<&DropletConfig> for Region {
    fn from(c: &DropletConfig) -> Self {
        Region::new(
            c.balls()
                .iter()
                .map(|b| Shape::Ball { center: b.center.clone(), radius: b.radius })
                .collect(),
        )
    }
}

/// Samples the indicator of `region` on `lattice` by the cell-center test
/// (closed shapes, with a relative slack of `1e-9·h` for round-off).
pub fn grid_from_indicator_on(region: &Region, lattice: Lattice) -> Result<GridDensity> {
    for s in &region.shapes {
        ensure!(s.dim() == lattice.dim, InvalidDensity, "shape dimension {} differs from lattice dimension {}", s.dim(), lattice.dim);
    }
    let tol = 1e-9 * lattice.h;
    let values = (0..lattice.len())
        .map(|i| if region.contains(lattice.center(i), tol) { 1.0 } else { 0.0 })
        .collect();
    GridDensity::new(lattice, values)
}

/// Samples `region` on the lattice tiling its bounding box. An empty region
/// gives a zero-mass density with no cells.
pub fn grid_from_indicator(region: &Region, h: f64, dim: usize) -> Result<GridDensity> {
    ensure!(h > 0.0 && h.is_finite(), InvalidDensity, "grid spacing must be > 0, got {h}");
    ensure!(dim == 1 || dim == 2, InvalidDensity, "only dimensions 1 and 2 are supported, got {dim}");
    match region.bounding_box(dim) {
        Some((lo, hi)) => grid_from_indicator_on(region, Lattice::covering(&lo, &hi, h, 0)?),
        None => GridDensity::new(Lattice::new(dim, vec![0.0; dim], h, vec![0; dim])?, Vec::new()),
    }
}

/// Samples a droplet configuration on the lattice tiling its bounding box.
pub fn from_droplets(config: &DropletConfig, h: f64) -> Result<GridDensity> {
    from_droplets_padded(config, h, 0)
}

/// As [`from_droplets`] with `pad` empty cells added on every side.
pub fn from_droplets_padded(config: &DropletConfig, h: f64, pad: usize) -> Result<GridDensity> {
    let (lo, hi) = config.bounding_box();
    let lattice = Lattice::covering(&lo, &hi, h, pad)?;
    grid_from_indicator_on(&Region::from(config), lattice)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub passed: bool,
    pub values_in_range: bool,
    pub min_value: f64,
    pub max_value: f64,
    pub mass: f64,
    pub target_mass: f64,
    pub mass_error: f64,
}

/// Checks `0 <= ρ <= 1` cellwise and `|mass - m| <= tol`.
pub fn check_admissible(density: &GridDensity, m: f64, tol: f64) -> AdmissibilityReport {
    let min_value = density.values.iter().copied().fold(f64::INFINITY, f64::min);
    let max_value = density.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let values_in_range = density.values.iter().all(|v| (0.0..=1.0).contains(v));
    let mass_error = (density.mass - m).abs();
    AdmissibilityReport {
        passed: values_in_range && mass_error <= tol,
        values_in_range,
        min_value: if density.values.is_empty() { 0.0 } else { min_value },
        max_value: if density.values.is_empty() { 0.0 } else { max_value },
        mass: density.mass,
        target_mass: m,
        mass_error,
    }
}
