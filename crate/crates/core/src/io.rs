//! Instance files, polyline rasterization, synthetic instances, and the
//! results CSV schema.
//!
//! The instance format (`bsdp v1`) is line oriented and hand-writable:
//!
//! ```text
//! bsdp v1
//! # comment lines and blank lines are ignored
//! grid 16 11
//! c 5
//! alpha 0.5
//! route r0 0 1 2 18
//! route r1 2 3 4
//! ```
//!
//! Cells are indexed row-major (`row * cols + col`, 0-based). Route names
//! are carried for readability only; parsing keeps just the cell sets.

use crate::problem::{InstanceError, ProblemInstance};
use crate::rng::{RandomSource, SeededRng};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use thiserror::Error;

// ---------------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------------

/// Why a `bsdp v1` document failed to parse.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line 1: expected header `bsdp v1`")]
    BadHeader,
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: malformed `{directive}` directive: {reason}")]
    Malformed {
        line: usize,
        directive: &'static str,
        reason: String,
    },
    #[error("line {line}: duplicate `{directive}` directive")]
    Duplicate { line: usize, directive: &'static str },
    #[error("line {line}: cell index {cell} out of range (grid has {cells} cells)")]
    CellOutOfRange {
        line: usize,
        cell: usize,
        cells: usize,
    },
    #[error("line {line}: route declared before the grid directive")]
    RouteBeforeGrid { line: usize },
    #[error("missing directive `{0}`")]
    MissingDirective(&'static str),
    #[error("invalid instance: {0}")]
    Invalid(#[from] InstanceError),
}

/// Parses a `bsdp v1` document into a validated instance.
pub fn parse_instance(text: &str) -> Result<ProblemInstance, ParseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == "bsdp v1" => (),
        _ => return Err(ParseError::BadHeader),
    }

    let mut grid: Option<(usize, usize)> = None;
    let mut threshold: Option<usize> = None;
    let mut alpha: Option<f64> = None;
    let mut routes: Vec<Vec<usize>> = Vec::new();

    for (index, raw) in lines {
        let line = index + 1; // 1-based for messages
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let directive = tokens.next().expect("non-empty line has a first token");
        let rest: Vec<&str> = tokens.collect();
        match directive {
            "grid" => {
                if grid.is_some() {
                    return Err(ParseError::Duplicate {
                        line,
                        directive: "grid",
                    });
                }
                let [cols, rows] = rest.as_slice() else {
                    return Err(ParseError::Malformed {
                        line,
                        directive: "grid",
                        reason: "expected `grid <cols> <rows>`".into(),
                    });
                };
                grid = Some((
                    parse_number(cols, line, "grid")?,
                    parse_number(rows, line, "grid")?,
                ));
            }
            "c" => {
                if threshold.is_some() {
                    return Err(ParseError::Duplicate { line, directive: "c" });
                }
                let [value] = rest.as_slice() else {
                    return Err(ParseError::Malformed {
                        line,
                        directive: "c",
                        reason: "expected `c <threshold>`".into(),
                    });
                };
                threshold = Some(parse_number(value, line, "c")?);
            }
            "alpha" => {
                if alpha.is_some() {
                    return Err(ParseError::Duplicate {
                        line,
                        directive: "alpha",
                    });
                }
                let [value] = rest.as_slice() else {
                    return Err(ParseError::Malformed {
                        line,
                        directive: "alpha",
                        reason: "expected `alpha <weight>`".into(),
                    });
                };
                alpha = Some(value.parse().map_err(|e| ParseError::Malformed {
                    line,
                    directive: "alpha",
                    reason: format!("`{value}`: {e}"),
                })?);
            }
            "route" => {
                let Some((cols, rows)) = grid else {
                    return Err(ParseError::RouteBeforeGrid { line });
                };
                if rest.is_empty() {
                    return Err(ParseError::Malformed {
                        line,
                        directive: "route",
                        reason: "expected `route <name> <cell> ...`".into(),
                    });
                }
                let cells = cols * rows;
                let mut route = Vec::with_capacity(rest.len() - 1);
                for token in &rest[1..] {
                    let cell: usize = parse_number(token, line, "route")?;
                    if cell >= cells {
                        return Err(ParseError::CellOutOfRange { line, cell, cells });
                    }
                    route.push(cell);
                }
                routes.push(route);
            }
            other => {
                return Err(ParseError::UnknownDirective {
                    line,
                    directive: other.to_string(),
                })
            }
        }
    }

    let (cols, rows) = grid.ok_or(ParseError::MissingDirective("grid"))?;
    let threshold = threshold.ok_or(ParseError::MissingDirective("c"))?;
    let alpha = alpha.ok_or(ParseError::MissingDirective("alpha"))?;
    if routes.is_empty() {
        return Err(ParseError::MissingDirective("route"));
    }
    Ok(ProblemInstance::new(cols, rows, routes, threshold, alpha)?)
}

fn parse_number(token: &str, line: usize, directive: &'static str) -> Result<usize, ParseError> {
    token.parse().map_err(|e| ParseError::Malformed {
        line,
        directive,
        reason: format!("`{token}`: {e}"),
    })
}

/// Renders an instance as a `bsdp v1` document. Routes are written in order
/// with generated names, cells ascending, so the output is canonical and
/// `parse_instance(serialize_instance(x)) == x`.
pub fn serialize_instance(instance: &ProblemInstance) -> String {
    let mut out = String::new();
    out.push_str("bsdp v1\n");
    let _ = writeln!(out, "grid {} {}", instance.cols(), instance.rows());
    let _ = writeln!(out, "c {}", instance.coverage_threshold());
    let _ = writeln!(out, "alpha {}", instance.alpha());
    for (i, route) in instance.routes().iter().enumerate() {
        let _ = write!(out, "route r{i}");
        for cell in route {
            let _ = write!(out, " {cell}");
        }
        out.push('\n');
    }
    out
}

/// Reads and parses an instance file.
pub fn load_instance(path: &Path) -> io::Result<Result<ProblemInstance, ParseError>> {
    Ok(parse_instance(&fs::read_to_string(path)?))
}

// ---------------------------------------------------------------------------
// Rasterization
// ---------------------------------------------------------------------------

/// A bus route as planar geometry, to be rasterized onto the grid.
/// Coordinates and `cell_size` share one unit (kilometers in the data this
/// models).
#[derive(Clone, Debug, PartialEq)]
pub struct RoutePolyline {
    pub points: Vec<(f64, f64)>,
    pub cell_size: f64,
}

/// Why a polyline could not be rasterized.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RasterizeError {
    #[error("cell_size must be positive and finite (got {0})")]
    BadCellSize(f64),
    #[error("a polyline needs at least two points")]
    TooFewPoints,
    #[error("point ({x}, {y}) lies outside the {width} x {height} area")]
    PointOutOfBounds {
        x: f64,
        y: f64,
        width: f64,
        height: f64,
    },
}

/// Maps a point to its owning cell. Points exactly on a cell boundary
/// belong to the higher-index cell (plain `floor` semantics); points on the
/// outer edge clamp inward.
fn cell_of(x: f64, y: f64, cell_size: f64, cols: usize, rows: usize) -> usize {
    let col = ((x / cell_size).floor() as i64).clamp(0, cols as i64 - 1) as usize;
    let row = ((y / cell_size).floor() as i64).clamp(0, rows as i64 - 1) as usize;
    row * cols + col
}

/// Every cell the polyline passes through, ascending. A cell counts when
/// any point of any segment falls in its half-open territory
/// `[col*s, (col+1)*s) x [row*s, (row+1)*s)` (closed on the grid's outer
/// edge).
pub fn rasterize_polyline(
    poly: &RoutePolyline,
    cols: usize,
    rows: usize,
) -> Result<Vec<usize>, RasterizeError> {
    if !(poly.cell_size > 0.0 && poly.cell_size.is_finite()) {
        return Err(RasterizeError::BadCellSize(poly.cell_size));
    }
    if poly.points.len() < 2 {
        return Err(RasterizeError::TooFewPoints);
    }
    let width = cols as f64 * poly.cell_size;
    let height = rows as f64 * poly.cell_size;
    for &(x, y) in &poly.points {
        let inside = (0.0..=width).contains(&x) && (0.0..=height).contains(&y);
        if !inside || !x.is_finite() || !y.is_finite() {
            return Err(RasterizeError::PointOutOfBounds {
                x,
                y,
                width,
                height,
            });
        }
    }
    let mut cells = BTreeSet::new();
    for pair in poly.points.windows(2) {
        rasterize_segment(pair[0], pair[1], poly.cell_size, cols, rows, &mut cells);
    }
    Ok(cells.into_iter().collect())
}

/// Exact traversal of one segment: cut the parameter range at every grid
/// line crossing, then classify each endpoint and each open interval by its
/// midpoint. Cells whose territory the segment only grazes for a vanishing
/// stretch are still found, which sampling at a fixed density would miss.
fn rasterize_segment(
    a: (f64, f64),
    b: (f64, f64),
    cell_size: f64,
    cols: usize,
    rows: usize,
    out: &mut BTreeSet<usize>,
) {
    out.insert(cell_of(a.0, a.1, cell_size, cols, rows));
    out.insert(cell_of(b.0, b.1, cell_size, cols, rows));
    let mut cuts = vec![0.0, 1.0];
    axis_crossings(a.0, b.0, cell_size, &mut cuts);
    axis_crossings(a.1, b.1, cell_size, &mut cuts);
    cuts.sort_by(f64::total_cmp);
    for window in cuts.windows(2) {
        let mid = 0.5 * (window[0] + window[1]);
        let x = a.0 + mid * (b.0 - a.0);
        let y = a.1 + mid * (b.1 - a.1);
        out.insert(cell_of(x, y, cell_size, cols, rows));
    }
}

/// Parameters in (0, 1) where one coordinate crosses a grid line.
fn axis_crossings(from: f64, to: f64, cell_size: f64, cuts: &mut Vec<f64>) {
    if from == to {
        return;
    }
    let lo = from.min(to);
    let hi = from.max(to);
    let first = (lo / cell_size).floor() as i64 + 1;
    let last = (hi / cell_size).ceil() as i64 - 1;
    for k in first..=last {
        let t = (k as f64 * cell_size - from) / (to - from);
        if t > 0.0 && t < 1.0 {
            cuts.push(t);
        }
    }
}

// ---------------------------------------------------------------------------
// Synthetic instances
// ---------------------------------------------------------------------------

/// Shape of a synthetic instance. The default mirrors the scale of a real
/// urban network: a 16 x 11 grid carrying 91 routes.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticParams {
    pub cols: usize,
    pub rows: usize,
    pub routes: usize,
    /// Cells per route (the walk length, counting the starting cell).
    pub walk_len: usize,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            cols: 16,
            rows: 11,
            routes: 91,
            walk_len: 20,
        }
    }
}

/// Why synthetic generation failed.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("all dimensions must be positive")]
    BadDimensions,
    #[error("walk length {walk_len} cannot exceed the {cells} cells of the grid")]
    ImpossibleWalk { walk_len: usize, cells: usize },
    #[error("route {route}: no self-avoiding walk of length {walk_len} found after {attempts} attempts")]
    WalkStuck {
        route: usize,
        walk_len: usize,
        attempts: usize,
    },
    #[error("generated instance is invalid: {0}")]
    Invalid(#[from] InstanceError),
}

/// A generated instance together with its canonical file text.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticInstance {
    pub instance: ProblemInstance,
    pub text: String,
}

const WALK_RESTART_LIMIT: usize = 1_000;

/// Routes as self-avoiding lattice random walks, deterministic per seed.
/// Walks restart from a fresh cell when they trap themselves; generation
/// fails loudly if a route cannot be placed within the restart budget.
/// The instance carries `c = 1` and `alpha = 0.5`; callers re-threshold as
/// needed.
pub fn generate_synthetic(
    params: &SyntheticParams,
    seed: u64,
) -> Result<SyntheticInstance, GenerateError> {
    if params.cols == 0 || params.rows == 0 || params.routes == 0 || params.walk_len == 0 {
        return Err(GenerateError::BadDimensions);
    }
    let cells = params.cols * params.rows;
    if params.walk_len > cells {
        return Err(GenerateError::ImpossibleWalk {
            walk_len: params.walk_len,
            cells,
        });
    }
    let mut rng = SeededRng::new(seed);
    let mut routes = Vec::with_capacity(params.routes);
    for route in 0..params.routes {
        let walk = self_avoiding_walk(params.cols, params.rows, params.walk_len, &mut rng)
            .ok_or(GenerateError::WalkStuck {
                route,
                walk_len: params.walk_len,
                attempts: WALK_RESTART_LIMIT,
            })?;
        routes.push(walk);
    }
    let instance = ProblemInstance::new(params.cols, params.rows, routes, 1, 0.5)?;
    let text = serialize_instance(&instance);
    Ok(SyntheticInstance { instance, text })
}

/// The default synthetic benchmark instance for a given seed.
pub fn default_synthetic(seed: u64) -> ProblemInstance {
    generate_synthetic(&SyntheticParams::default(), seed)
        .expect("the default synthetic profile always generates")
        .instance
}

fn self_avoiding_walk(
    cols: usize,
    rows: usize,
    len: usize,
    rng: &mut impl RandomSource,
) -> Option<Vec<usize>> {
    let cells = cols * rows;
    'attempt: for _ in 0..WALK_RESTART_LIMIT {
        let mut visited = vec![false; cells];
        let start = rng.index(cells);
        visited[start] = true;
        let mut walk = vec![start];
        let mut col = (start % cols) as i64;
        let mut row = (start / cols) as i64;
        while walk.len() < len {
            let mut open = [(0i64, 0i64); 4];
            let mut count = 0;
            for (dc, dr) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                let (nc, nr) = (col + dc, row + dr);
                if nc >= 0
                    && nc < cols as i64
                    && nr >= 0
                    && nr < rows as i64
                    && !visited[(nr as usize) * cols + nc as usize]
                {
                    open[count] = (nc, nr);
                    count += 1;
                }
            }
            if count == 0 {
                continue 'attempt; // trapped; restart the walk
            }
            let (nc, nr) = open[rng.index(count)];
            col = nc;
            row = nr;
            let cell = (row as usize) * cols + col as usize;
            visited[cell] = true;
            walk.push(cell);
        }
        walk.sort_unstable();
        return Some(walk);
    }
    None
}

// ---------------------------------------------------------------------------
// The two-route overlap fixture
// ---------------------------------------------------------------------------

/// A 7 x 4 grid with two 16-cell block routes overlapping in one shared
/// 4-cell column: the left route spans columns 0..4, the right route
/// columns 3..7. With threshold 1 all 28 cells are coverable; with
/// threshold 2 exactly the 4 shared cells are. Returned with `c = 1` and
/// `alpha = 0.5`.
pub fn two_route_overlap_fixture() -> ProblemInstance {
    let block = |col_lo: usize, col_hi: usize| -> Vec<usize> {
        (0..4)
            .flat_map(|row| (col_lo..col_hi).map(move |col| row * 7 + col))
            .collect()
    };
    ProblemInstance::new(7, 4, vec![block(0, 4), block(3, 7)], 1, 0.5)
        .expect("fixture is valid by construction")
}

// ---------------------------------------------------------------------------
// Results CSV
// ---------------------------------------------------------------------------

/// Column header of every results file the harness writes.
pub const RESULTS_CSV_HEADER: &str =
    "trial,algorithm,c,alpha,seed,best_objective,coverage_pct,routes_selected,evaluations";

/// One solver trial, as serialized to the results CSV. Floating fields are
/// stored already rounded to six significant digits so that statistics
/// computed from records match statistics recomputed from the file exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub algorithm: String,
    pub c: usize,
    pub alpha: f64,
    pub seed: u64,
    pub best_objective: f64,
    pub coverage_pct: f64,
    pub routes_selected: usize,
    pub evaluations: u64,
}

/// Formats with six significant digits in plain decimal notation.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.000000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// The value a six-significant-digit field round-trips to.
pub fn round_sig6(x: f64) -> f64 {
    format_sig6(x).parse().expect("format_sig6 output is a valid float")
}

/// Renders records under the fixed header, one line per record, in input
/// order.
pub fn results_csv(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.algorithm,
            r.c,
            format_sig6(r.alpha),
            r.seed,
            format_sig6(r.best_objective),
            format_sig6(r.coverage_pct),
            r.routes_selected,
            r.evaluations
        );
    }
    out
}

/// Writes [`results_csv`] to a file.
pub fn write_results_csv(records: &[TrialRecord], path: &Path) -> io::Result<()> {
    fs::write(path, results_csv(records))
}

/// Why a results CSV failed to parse.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsvError {
    #[error("line 1: expected header `{RESULTS_CSV_HEADER}`")]
    BadHeader,
    #[error("line {line}: expected 9 fields, found {found}")]
    WrongFieldCount { line: usize, found: usize },
    #[error("line {line}: field `{field}`: cannot parse `{value}`")]
    BadField {
        line: usize,
        field: &'static str,
        value: String,
    },
}

/// Reads back what [`results_csv`] wrote.
pub fn parse_results_csv(text: &str) -> Result<Vec<TrialRecord>, CsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == RESULTS_CSV_HEADER => (),
        _ => return Err(CsvError::BadHeader),
    }
    let mut records = Vec::new();
    for (index, raw) in lines {
        let line = index + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 9 {
            return Err(CsvError::WrongFieldCount {
                line,
                found: fields.len(),
            });
        }
        fn field<T: std::str::FromStr>(
            value: &str,
            line: usize,
            name: &'static str,
        ) -> Result<T, CsvError> {
            value.parse().map_err(|_| CsvError::BadField {
                line,
                field: name,
                value: value.to_string(),
            })
        }
        records.push(TrialRecord {
            trial: field(fields[0], line, "trial")?,
            algorithm: fields[1].to_string(),
            c: field(fields[2], line, "c")?,
            alpha: field(fields[3], line, "alpha")?,
            seed: field(fields[4], line, "seed")?,
            best_objective: field(fields[5], line, "best_objective")?,
            coverage_pct: field(fields[6], line, "coverage_pct")?,
            routes_selected: field(fields[7], line, "routes_selected")?,
            evaluations: field(fields[8], line, "evaluations")?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Deployment;
    use proptest::prelude::*;

    #[test]
    fn parses_the_smallest_instance() {
        let text = "bsdp v1\ngrid 1 1\nc 1\nalpha 0.5\nroute only 0\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.route_count(), 1);
        assert_eq!(inst.full_coverage_count(), 1);
    }

    #[test]
    fn reports_errors_with_line_numbers() {
        assert_eq!(parse_instance("bsdp v2\n"), Err(ParseError::BadHeader));
        let text = "bsdp v1\ngrid 2 2\nc 1\nalpha 0.5\nroute r0 4\n";
        assert_eq!(
            parse_instance(text),
            Err(ParseError::CellOutOfRange {
                line: 5,
                cell: 4,
                cells: 4
            })
        );
        let text = "bsdp v1\ngrid 2 2\nc 1\nroute r0 0\n";
        assert_eq!(parse_instance(text), Err(ParseError::MissingDirective("alpha")));
        let text = "bsdp v1\nroute r0 0\n";
        assert_eq!(parse_instance(text), Err(ParseError::RouteBeforeGrid { line: 2 }));
        let text = "bsdp v1\ngrid 2 2\nc 1\nalpha 0.5\ngrid 2 2\n";
        assert_eq!(
            parse_instance(text),
            Err(ParseError::Duplicate {
                line: 5,
                directive: "grid"
            })
        );
        let text = "bsdp v1\ngrid 2 2\nc 3\nalpha 0.5\nroute r0 0\n";
        assert_eq!(
            parse_instance(text),
            Err(ParseError::Invalid(InstanceError::UncoverableThreshold {
                threshold: 3
            }))
        );
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "bsdp v1\n# a comment\n\ngrid 2 1\nc 1\n# another\nalpha 0.25\nroute a 0 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.alpha(), 0.25);
        assert_eq!(inst.routes(), &[vec![0, 1]]);
    }

    #[test]
    fn fixture_round_trips() {
        let fixture = two_route_overlap_fixture();
        let text = serialize_instance(&fixture);
        assert_eq!(parse_instance(&text).unwrap(), fixture);
    }

    #[test]
    fn fixture_matches_its_published_counts() {
        let fixture = two_route_overlap_fixture();
        assert_eq!(fixture.full_coverage_count(), 28);
        let at2 = fixture.with_coverage_threshold(2).unwrap();
        assert_eq!(at2.full_coverage_count(), 4);
        // The left route alone covers 16 cells at threshold 1 and touches
        // all 4 doubly-coverable cells.
        let left_only = Deployment::from_bits(vec![true, false]);
        assert_eq!(fixture.covered_grid_count(&left_only), 16);
        let left: BTreeSet<usize> = fixture.routes()[0].iter().copied().collect();
        let coverable: BTreeSet<usize> = at2.coverable_cells().into_iter().collect();
        assert_eq!(left.intersection(&coverable).count(), 4);
        // Objective of the left route alone, by hand from those counts.
        let value = fixture.objective(&left_only);
        assert!((value - ((1.0 - 16.0 / 28.0) * 0.5 + 0.5 * 0.5)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(
            cols in 1usize..6,
            rows in 1usize..6,
            seed in 0u64..40,
            threshold in 1usize..3,
        ) {
            let params = SyntheticParams { cols, rows, routes: 4, walk_len: (cols * rows).min(3) };
            let generated = generate_synthetic(&params, seed).unwrap();
            let rethresholded = generated.instance.with_coverage_threshold(threshold);
            let Ok(inst) = rethresholded else { return Ok(()) };
            prop_assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
        }
    }

    #[test]
    fn rasterizes_trivial_segments() {
        // A segment that never leaves one cell.
        let poly = RoutePolyline {
            points: vec![(0.2, 0.3), (0.7, 0.6)],
            cell_size: 1.0,
        };
        assert_eq!(rasterize_polyline(&poly, 3, 3).unwrap(), vec![0]);
        // Horizontal traversal from the center of cell (0,0) to cell (0,2).
        let poly = RoutePolyline {
            points: vec![(0.5, 0.5), (2.5, 0.5)],
            cell_size: 1.0,
        };
        assert_eq!(rasterize_polyline(&poly, 3, 3).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn boundary_points_belong_to_the_higher_cell() {
        // A segment lying exactly on the interior boundary x = 1.
        let poly = RoutePolyline {
            points: vec![(1.0, 0.2), (1.0, 0.8)],
            cell_size: 1.0,
        };
        assert_eq!(rasterize_polyline(&poly, 2, 1).unwrap(), vec![1]);
        // On the outer edge it clamps inward instead.
        let poly = RoutePolyline {
            points: vec![(2.0, 0.2), (2.0, 0.8)],
            cell_size: 1.0,
        };
        assert_eq!(rasterize_polyline(&poly, 2, 1).unwrap(), vec![1]);
    }

    #[test]
    fn rejects_out_of_bounds_points() {
        let poly = RoutePolyline {
            points: vec![(0.5, 0.5), (2.5, 0.5)],
            cell_size: 1.0,
        };
        assert_eq!(
            rasterize_polyline(&poly, 2, 2),
            Err(RasterizeError::PointOutOfBounds {
                x: 2.5,
                y: 0.5,
                width: 2.0,
                height: 2.0
            })
        );
    }

    #[test]
    fn diagonal_matches_the_dense_sampler() {
        // Corner-to-corner diagonal of a 2x2 grid versus 10^4 evenly
        // spaced sample points classified independently.
        let poly = RoutePolyline {
            points: vec![(0.0, 0.0), (2.0, 2.0)],
            cell_size: 1.0,
        };
        let cells = rasterize_polyline(&poly, 2, 2).unwrap();
        let mut sampled = BTreeSet::new();
        let n = 10_000;
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            let x = 2.0 * t;
            let y = 2.0 * t;
            let col = (x.floor() as i64).clamp(0, 1) as usize;
            let row = (y.floor() as i64).clamp(0, 1) as usize;
            sampled.insert(row * 2 + col);
        }
        assert_eq!(cells, sampled.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn synthetic_generation_is_deterministic_and_bounded() {
        let params = SyntheticParams::default();
        let a = generate_synthetic(&params, 0).unwrap();
        let b = generate_synthetic(&params, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.instance.route_count(), 91);
        for route in a.instance.routes() {
            assert!(route.len() <= 20);
            assert!(route.iter().all(|&cell| cell < 176));
        }
        assert!(a.instance.full_coverage_count() >= 1);
    }

    #[test]
    fn degenerate_walks_and_impossible_geometry() {
        let params = SyntheticParams {
            cols: 3,
            rows: 3,
            routes: 1,
            walk_len: 1,
        };
        let generated = generate_synthetic(&params, 5).unwrap();
        assert_eq!(generated.instance.routes()[0].len(), 1);
        let params = SyntheticParams {
            cols: 2,
            rows: 2,
            routes: 1,
            walk_len: 5,
        };
        assert_eq!(
            generate_synthetic(&params, 0),
            Err(GenerateError::ImpossibleWalk {
                walk_len: 5,
                cells: 4
            })
        );
    }

    #[test]
    fn formats_six_significant_digits() {
        assert_eq!(format_sig6(1.0 / 6.0), "0.166667");
        assert_eq!(format_sig6(0.5), "0.500000");
        assert_eq!(format_sig6(0.0), "0.000000");
        assert_eq!(format_sig6(99.7538), "99.7538");
        assert_eq!(format_sig6(100.0), "100.000");
        assert_eq!(format_sig6(0.05), "0.0500000");
    }

    fn sample_record() -> TrialRecord {
        TrialRecord {
            trial: 0,
            algorithm: "cro".into(),
            c: 1,
            alpha: 0.5,
            seed: 7,
            best_objective: round_sig6(1.0 / 6.0),
            coverage_pct: 100.0,
            routes_selected: 1,
            evaluations: 10_000,
        }
    }

    #[test]
    fn results_csv_matches_the_pinned_schema() {
        assert_eq!(results_csv(&[]), format!("{RESULTS_CSV_HEADER}\n"));
        let text = results_csv(&[sample_record()]);
        assert_eq!(
            text,
            format!("{RESULTS_CSV_HEADER}\n0,cro,1,0.500000,7,0.166667,100.000,1,10000\n")
        );
    }

    #[test]
    fn results_csv_round_trips() {
        let records = vec![sample_record()];
        let text = results_csv(&records);
        let parsed = parse_results_csv(&text).unwrap();
        assert_eq!(parsed, records);
        assert_eq!(results_csv(&parsed), text);
    }

    #[test]
    fn csv_parser_rejects_malformed_input() {
        assert_eq!(parse_results_csv("nope\n"), Err(CsvError::BadHeader));
        let text = format!("{RESULTS_CSV_HEADER}\n1,cro,1\n");
        assert_eq!(
            parse_results_csv(&text),
            Err(CsvError::WrongFieldCount { line: 2, found: 3 })
        );
    }
}
