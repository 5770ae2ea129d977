//! The grid-coverage deployment problem: instances, candidate deployments,
//! and the objective that trades coverage against sensor count.
//!
//! The monitoring area is a `cols x rows` grid of equal cells, indexed
//! row-major (`index = row * cols + col`, 0-based). Each bus route covers a
//! fixed set of cells. A deployment selects a subset of routes to carry
//! sensors; a cell counts as fully covered when at least
//! `coverage_threshold` selected routes pass through it.
//!
//! The objective for a deployment `d` is
//!
//! ```text
//! (1 - covered(d) / covered(all-ones)) * alpha + selected(d) / n * (1 - alpha)
//! ```
//!
//! minimized over deployments. The all-ones coverage count is computed once
//! at construction; instances where it would be zero are rejected because
//! the objective divides by it.

use std::fmt;
use thiserror::Error;

/// A binary deployment vector: bit `i` says route `i` carries a sensor.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Deployment {
    bits: Vec<bool>,
}

impl Deployment {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// No route carries a sensor.
    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    /// Every route carries a sensor.
    pub fn ones(n: usize) -> Self {
        Self { bits: vec![true; n] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn toggle(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Indices of the selected routes.
    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    /// Number of selected routes.
    pub fn selected_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Positions at which two deployments differ.
    pub fn hamming_distance(&self, other: &Self) -> usize {
        assert_eq!(self.len(), other.len(), "deployment length mismatch");
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl fmt::Display for Deployment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Deployment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Deployment({self})")
    }
}

/// Why an instance failed validation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("grid dimensions must be positive (got {cols}x{rows})")]
    EmptyGrid { cols: usize, rows: usize },
    #[error("an instance needs at least one route")]
    NoRoutes,
    #[error("route {route}: cell index {cell} out of range (grid has {cells} cells)")]
    CellOutOfRange {
        route: usize,
        cell: usize,
        cells: usize,
    },
    #[error("coverage threshold must be positive")]
    ZeroThreshold,
    #[error("alpha must lie in [0, 1] (got {0})")]
    AlphaOutOfRange(f64),
    #[error("no cell is covered by {threshold} or more routes, so the objective is undefined")]
    UncoverableThreshold { threshold: usize },
}

/// An immutable problem instance. Safe to share across concurrent runs;
/// evaluation is a pure function of (instance, deployment).
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    cols: usize,
    rows: usize,
    routes: Vec<Vec<usize>>,
    coverage_threshold: usize,
    alpha: f64,
    full_coverage: usize,
}

impl ProblemInstance {
    /// Builds and validates an instance. Route cell lists are deduplicated
    /// and sorted; the all-ones coverage count is computed here and cached.
    pub fn new(
        cols: usize,
        rows: usize,
        routes: Vec<Vec<usize>>,
        coverage_threshold: usize,
        alpha: f64,
    ) -> Result<Self, InstanceError> {
        if cols == 0 || rows == 0 {
            return Err(InstanceError::EmptyGrid { cols, rows });
        }
        if routes.is_empty() {
            return Err(InstanceError::NoRoutes);
        }
        if coverage_threshold == 0 {
            return Err(InstanceError::ZeroThreshold);
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(InstanceError::AlphaOutOfRange(alpha));
        }
        let cells = cols * rows;
        let mut normalized = Vec::with_capacity(routes.len());
        for (i, route) in routes.into_iter().enumerate() {
            if let Some(&cell) = route.iter().find(|&&cell| cell >= cells) {
                return Err(InstanceError::CellOutOfRange {
                    route: i,
                    cell,
                    cells,
                });
            }
            let mut route = route;
            route.sort_unstable();
            route.dedup();
            normalized.push(route);
        }
        let mut instance = Self {
            cols,
            rows,
            routes: normalized,
            coverage_threshold,
            alpha,
            full_coverage: 0,
        };
        instance.full_coverage = instance.covered_grid_count(&Deployment::ones(instance.route_count()));
        if instance.full_coverage == 0 {
            return Err(InstanceError::UncoverableThreshold {
                threshold: coverage_threshold,
            });
        }
        Ok(instance)
    }

    /// Same routes and weight, different coverage threshold. Re-validates,
    /// since a higher threshold can make every cell uncoverable.
    pub fn with_coverage_threshold(&self, threshold: usize) -> Result<Self, InstanceError> {
        Self::new(
            self.cols,
            self.rows,
            self.routes.clone(),
            threshold,
            self.alpha,
        )
    }

    /// Same instance, different objective weight.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self, InstanceError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(InstanceError::AlphaOutOfRange(alpha));
        }
        let mut instance = self.clone();
        instance.alpha = alpha;
        Ok(instance)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cell_count(&self) -> usize {
        self.cols * self.rows
    }

    pub fn route_count(&self) -> usize {
        self.routes.len()
    }

    /// Cell sets per route, sorted ascending.
    pub fn routes(&self) -> &[Vec<usize>] {
        &self.routes
    }

    pub fn coverage_threshold(&self) -> usize {
        self.coverage_threshold
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Coverage count of the all-ones deployment, cached at construction.
    /// Always at least 1.
    pub fn full_coverage_count(&self) -> usize {
        self.full_coverage
    }

    /// Cells reachable by the threshold at all: covered by at least
    /// `coverage_threshold` routes when every route is selected.
    pub fn coverable_cells(&self) -> Vec<usize> {
        let counts = self.cell_cover_counts(&Deployment::ones(self.route_count()));
        counts
            .iter()
            .enumerate()
            .filter_map(|(cell, &k)| (k >= self.coverage_threshold).then_some(cell))
            .collect()
    }

    /// Per-cell count of selected routes passing through each cell.
    pub fn cell_cover_counts(&self, d: &Deployment) -> Vec<usize> {
        assert_eq!(
            d.len(),
            self.route_count(),
            "deployment length {} does not match route count {}",
            d.len(),
            self.route_count()
        );
        let mut counts = vec![0usize; self.cell_count()];
        for route in d.selected() {
            for &cell in &self.routes[route] {
                counts[cell] += 1;
            }
        }
        counts
    }

    /// Number of cells covered by `coverage_threshold` or more selected
    /// routes.
    pub fn covered_grid_count(&self, d: &Deployment) -> usize {
        self.cell_cover_counts(d)
            .iter()
            .filter(|&&k| k >= self.coverage_threshold)
            .count()
    }

    /// The minimized objective: weighted sum of the uncovered fraction and
    /// the selected fraction. Always in [0, 1] for alpha in [0, 1].
    pub fn objective(&self, d: &Deployment) -> f64 {
        let covered = self.covered_grid_count(d);
        let coverage_term = 1.0 - covered as f64 / self.full_coverage as f64;
        let sensor_term = d.selected_count() as f64 / self.route_count() as f64;
        coverage_term * self.alpha + sensor_term * (1.0 - self.alpha)
    }

    /// Everything the reports need about one deployment, in one pass.
    pub fn coverage_summary(&self, d: &Deployment) -> CoverageSummary {
        let covered_count = self.covered_grid_count(d);
        let sensor_count = d.selected_count();
        let coverage_term = 1.0 - covered_count as f64 / self.full_coverage as f64;
        let sensor_term = sensor_count as f64 / self.route_count() as f64;
        CoverageSummary {
            covered_count,
            full_cover_count: self.full_coverage,
            sensor_count,
            objective: coverage_term * self.alpha + sensor_term * (1.0 - self.alpha),
        }
    }
}

/// Evaluation of one deployment against one instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageSummary {
    /// Cells covered by at least `coverage_threshold` selected routes.
    pub covered_count: usize,
    /// Same count for the all-ones deployment.
    pub full_cover_count: usize,
    /// Selected routes.
    pub sensor_count: usize,
    /// Objective value for this deployment.
    pub objective: f64,
}

impl CoverageSummary {
    /// Covered cells as a percentage of the coverable cells.
    pub fn coverage_percent(&self) -> f64 {
        100.0 * self.covered_count as f64 / self.full_cover_count as f64
    }
}
