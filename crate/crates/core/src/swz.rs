//! Level families for the least gradient problem on strictly convex domains
//! with data on an arc: the adapted Sternberg-Williams-Ziemer construction.
//!
//! Superlevel boundaries are straight chords. Three data classes are built
//! (endpoint-minimal data with a critical switch level, strictly monotone
//! data with free-boundary chords, and equal-endpoint data with interior
//! extrema), plus the piecewise-constant three-atom datum whose level
//! boundaries are known in closed form.

use crate::data::{preimage, BoundaryFunction, Piece, PieceKind};
use crate::geometry::{
    classify_distance_structure, distance_to_arc, half_plane_region, BoundaryArc, Chord,
    ConvexBoundary, ConvexRegion, GeometryError, HalfPlane, Point, Vec2,
};
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

/// Default number of uniform levels in the t-grid.
pub const DEFAULT_T_GRID: usize = 2001;
/// Absolute tolerance on the critical-level equation h(tau) = 0.
pub const H_ROOT_TOL: f64 = 1e-10;
/// Samples of the loaded arc used for the distance classification.
const CLASSIFY_SAMPLES: usize = 2048;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("point lies outside the domain")]
    OutsideDomain,
    #[error(transparent)]
    Datum(#[from] crate::data::DatumError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Structural kind of a level line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LineKind {
    /// Single chord with both endpoints on the loaded arc.
    GammaChord,
    /// Two chords, each from a loaded-arc point to the free arc.
    UpsilonPair,
    /// Single chord from the loaded arc to the free arc.
    SingleToUpsilon,
    /// Everything or nothing (levels at or beyond the data range).
    Degenerate,
}

/// A superlevel-boundary segment together with the unit normal pointing into
/// the superlevel set.
#[derive(Debug, Clone, Copy)]
pub struct OrientedSegment {
    pub chord: Chord,
    pub into_superlevel: Vec2,
}

impl OrientedSegment {
    fn new(p: Point, q: Point, superlevel_ref: Point) -> Self {
        let chord = Chord::new(p, q);
        let mut n = chord.direction().rot_quarter();
        if n.dot(superlevel_ref.sub(p)) < 0.0 {
            n = n.scale(-1.0);
        }
        OrientedSegment { chord, into_superlevel: n }
    }

    pub fn on_superlevel_side(&self, z: Point, tol: f64) -> bool {
        self.into_superlevel.dot(z.sub(self.chord.p)) >= -tol
    }
}

/// The superlevel set at one level, described by its boundary segments.
#[derive(Debug, Clone)]
pub enum LevelSet {
    Everything,
    Nothing,
    Bounded(Vec<OrientedSegment>),
}

#[derive(Debug, Clone)]
pub struct LevelLine {
    pub t: f64,
    pub set: LevelSet,
    pub kind: LineKind,
}

impl LevelLine {
    fn degenerate(t: f64, full: bool) -> Self {
        LevelLine {
            t,
            set: if full { LevelSet::Everything } else { LevelSet::Nothing },
            kind: LineKind::Degenerate,
        }
    }

    pub fn segments(&self) -> &[OrientedSegment] {
        match &self.set {
            LevelSet::Bounded(s) => s,
            _ => &[],
        }
    }

    pub fn total_length(&self) -> f64 {
        self.segments().iter().map(|s| s.chord.length()).sum()
    }

    /// Closed superlevel membership.
    pub fn member(&self, z: Point, tol: f64) -> bool {
        match &self.set {
            LevelSet::Everything => true,
            LevelSet::Nothing => false,
            LevelSet::Bounded(segs) => segs.iter().all(|s| s.on_superlevel_side(z, tol)),
        }
    }
}

/// A level set of positive area carrying a single solution value.
#[derive(Debug, Clone)]
pub struct FatRegion {
    pub value: f64,
    pub region: ConvexRegion,
    pub area: f64,
}

/// Which construction produced a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolverCase {
    Case1,
    Case2,
    Case3,
    Piecewise,
    TwoPreimage,
    Synthetic,
}

type LineFn = Arc<dyn Fn(f64) -> LevelLine + Send + Sync>;

/// The constructed solution: a t-indexed family of level lines with fat
/// regions and the critical level when one exists.
#[derive(Clone)]
pub struct LevelFamily {
    pub case: SolverCase,
    pub domain: Arc<ConvexBoundary>,
    pub gamma: Option<BoundaryArc>,
    pub upsilon: Option<BoundaryArc>,
    pub t_grid: Vec<f64>,
    pub lines: Vec<LevelLine>,
    pub tau: Option<f64>,
    pub fat_regions: Vec<FatRegion>,
    /// Grid levels whose boundary meets the free arc / stays on the loaded arc.
    pub t_upsilon: Vec<f64>,
    pub t_gamma: Vec<f64>,
    /// Levels where the line structure jumps (atoms, plateau values, tau).
    pub special_levels: Vec<f64>,
    inf: f64,
    sup: f64,
    line_fn: LineFn,
}

impl std::fmt::Debug for LevelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LevelFamily")
            .field("case", &self.case)
            .field("levels", &self.t_grid.len())
            .field("tau", &self.tau)
            .field("fat_regions", &self.fat_regions.len())
            .finish()
    }
}

impl LevelFamily {
    pub fn inf(&self) -> f64 {
        self.inf
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    /// Level line at an arbitrary level, from the case's chord rule.
    pub fn line_at(&self, t: f64) -> LevelLine {
        (self.line_fn)(t)
    }

    fn side_tol(&self) -> f64 {
        1e-12 * self.domain.diameter()
    }

    /// Solution value at an interior point: fat regions first (highest value
    /// wins), then monotone bisection over the level grid. Points on a chord
    /// get that chord's level (closed superlevel convention).
    pub fn evaluate(&self, z: Point) -> Result<f64, SolveError> {
        let tol = self.side_tol();
        if !self.domain.contains(z, -tol) {
            return Err(SolveError::OutsideDomain);
        }
        for fat in &self.fat_regions {
            if fat.region.contains(z, tol) {
                return Ok(fat.value);
            }
        }
        // nesting makes membership monotone along the grid
        if !self.lines[0].member(z, tol) {
            return Ok(self.t_grid[0]);
        }
        let (mut lo, mut hi) = (0usize, self.t_grid.len() - 1);
        if self.lines[hi].member(z, tol) {
            return Ok(self.t_grid[hi]);
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.lines[mid].member(z, tol) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(self.t_grid[lo])
    }

    /// Total variation by the coarea formula: midpoint rule over the level
    /// grid (so branch jumps at inserted grid levels are never sampled), with
    /// a grid-halving Richardson error estimate.
    pub fn coarea_tv(&self) -> CoareaResult {
        let sum_over = |grid: &[f64]| {
            let mut acc = 0.0;
            for w in grid.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                acc += (w[1] - w[0]) * self.line_at(mid).total_length();
            }
            acc
        };
        let full = sum_over(&self.t_grid);
        let coarse: Vec<f64> = self.t_grid.iter().copied().step_by(2).collect();
        let half = sum_over(&coarse);
        CoareaResult { value: full, richardson_error: (full - half).abs() / 3.0 }
    }

    /// Slab decomposition shared with the flux construction: midpoint level
    /// and width of each grid slab.
    pub fn slabs(&self) -> Vec<(f64, f64)> {
        self.t_grid
            .windows(2)
            .map(|w| (0.5 * (w[0] + w[1]), w[1] - w[0]))
            .collect()
    }

    /// Build a synthetic family directly from a chord rule (testing and
    /// cross-checks).
    pub fn synthetic<F>(
        domain: Arc<ConvexBoundary>,
        inf: f64,
        sup: f64,
        n_levels: usize,
        rule: F,
    ) -> LevelFamily
    where
        F: Fn(f64) -> LevelLine + Send + Sync + 'static,
    {
        let t_grid = build_t_grid(inf, sup, n_levels, &[]);
        let line_fn: LineFn = Arc::new(rule);
        let lines = t_grid.iter().map(|&t| line_fn(t)).collect();
        LevelFamily {
            case: SolverCase::Synthetic,
            domain,
            gamma: None,
            upsilon: None,
            t_grid,
            lines,
            tau: None,
            fat_regions: Vec::new(),
            t_upsilon: Vec::new(),
            t_gamma: Vec::new(),
            special_levels: Vec::new(),
            inf,
            sup,
            line_fn,
        }
    }

    /// Full-boundary trace of the solution: the datum on the loaded arc plus
    /// the sampled trace along the free arc (exact on fat regions touching
    /// the free arc). The returned function lives on an arc starting at the
    /// loaded arc's start and covering the whole boundary.
    pub fn full_trace(&self, f: &BoundaryFunction) -> Result<BoundaryFunction, SolveError> {
        let gamma = self
            .gamma
            .clone()
            .ok_or_else(|| SolveError::Precondition("family has no loaded arc".into()))?;
        let upsilon = self
            .upsilon
            .clone()
            .ok_or_else(|| SolveError::Precondition("family has no free arc".into()))?;
        let total = self.domain.total_length();
        let full_arc = BoundaryArc::new(
            self.domain.clone(),
            gamma.s_start,
            gamma.s_start + total * (1.0 - 1e-12),
        )?;

        let lg = gamma.length();
        let mut pieces: Vec<Piece> = f.pieces().to_vec();
        // trace along the free arc by evaluating slightly inside
        let n = 512;
        let delta = 1e-6 * self.domain.diameter();
        let lu = upsilon.length();
        let mut vals = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let sigma = (lu * (k as f64) / n as f64).clamp(1e-9 * lu, lu * (1.0 - 1e-9));
            let s = upsilon.global(sigma);
            let z = self
                .domain
                .point_at(s)
                .add(self.domain.outward_normal_at(s).scale(-delta));
            vals.push(self.evaluate(z)?);
        }
        append_trace_pieces(&mut pieces, lg, lu / n as f64, &vals);
        if let Some(last) = pieces.last_mut() {
            last.hi = full_arc.length();
        }
        Ok(BoundaryFunction::from_pieces(full_arc, pieces)?)
    }
}

/// Segment the sampled free-arc trace into constant and monotone pieces and
/// append them after the loaded-arc pieces.
fn append_trace_pieces(pieces: &mut Vec<Piece>, offset: f64, step: f64, vals: &[f64]) {
    let n = vals.len() - 1;
    let range = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if range <= 0.0 {
        pieces.push(Piece {
            lo: offset,
            hi: offset + step * n as f64,
            kind: PieceKind::Constant(vals[0]),
        });
        return;
    }
    let flat_tol = 1e-9 * range.max(f64::MIN_POSITIVE);
    let mut k = 0usize;
    while k < n {
        let mut kk = k;
        while kk < n && (vals[kk + 1] - vals[k]).abs() <= flat_tol {
            kk += 1;
        }
        if kk > k {
            // constant run [k, kk]
            pieces.push(Piece {
                lo: offset + step * k as f64,
                hi: offset + step * kk as f64,
                kind: PieceKind::Constant(vals[k]),
            });
            k = kk;
            continue;
        }
        // monotone run: extend while strictly moving in one direction
        let up = vals[k + 1] > vals[k];
        let mut kk = k + 1;
        while kk < n
            && ((up && vals[kk + 1] > vals[kk] + flat_tol)
                || (!up && vals[kk + 1] < vals[kk] - flat_tol))
        {
            kk += 1;
        }
        let lo = offset + step * k as f64;
        let hi = offset + step * kk as f64;
        let slice: Vec<f64> = vals[k..=kk].to_vec();
        let f = move |sigma: f64| {
            let t = ((sigma - lo) / step).clamp(0.0, (slice.len() - 1) as f64);
            let i = (t.floor() as usize).min(slice.len() - 2);
            let frac = t - i as f64;
            slice[i] * (1.0 - frac) + slice[i + 1] * frac
        };
        pieces.push(Piece { lo, hi, kind: PieceKind::Monotone(Arc::new(f)) });
        k = kk;
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoareaResult {
    pub value: f64,
    pub richardson_error: f64,
}

/// Uniform grid over the data range with special levels inserted exactly.
pub fn build_t_grid(inf: f64, sup: f64, n: usize, specials: &[f64]) -> Vec<f64> {
    let n = n.max(3);
    let mut grid: Vec<f64> = (0..n)
        .map(|k| inf + (sup - inf) * (k as f64) / (n as f64 - 1.0))
        .collect();
    grid.extend(specials.iter().copied().filter(|t| *t > inf && *t < sup));
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tol = 1e-14 * (sup - inf).max(f64::MIN_POSITIVE);
    grid.dedup_by(|a, b| (*a - *b).abs() < tol);
    grid
}

fn require(cond: bool, clause: &str) -> Result<(), SolveError> {
    if cond {
        Ok(())
    } else {
        Err(SolveError::Precondition(clause.to_string()))
    }
}

/// Case 1 of the partial-boundary construction: datum minimal at both arc
/// endpoints with a single strict maximum, every interior value attained
/// twice. Below the critical level tau the level boundary is a pair of
/// chords anchored on the free arc; above it, a single chord between the two
/// preimages. tau is the root of
/// h(t) = d(x^t, a) + d(y^t, b) - d(x^t, y^t).
pub fn solve_case1(
    domain: Arc<ConvexBoundary>,
    f: &BoundaryFunction,
    n_levels: usize,
) -> Result<LevelFamily, SolveError> {
    let gamma = f.arc.clone();
    require(domain.strictly_convex(), "domain must be strictly convex")?;
    require(!gamma.is_full(), "loaded arc must be a proper subset of the boundary")?;
    let upsilon = gamma.complement();
    let vtol = f.value_tol();
    require(
        (f.value_at_a() - f.inf()).abs() <= vtol && (f.value_at_b() - f.inf()).abs() <= vtol,
        "f(a) = f(b) = inf f",
    )?;
    require(f.is_continuous(), "f continuous on the loaded arc")?;
    let pieces = f.pieces();
    require(
        pieces.len() == 2
            && matches!(pieces[0].kind, PieceKind::Monotone(_))
            && matches!(pieces[1].kind, PieceKind::Monotone(_)),
        "f strictly increasing then strictly decreasing (unique strict max, each value attained twice)",
    )?;
    let peak_param = pieces[0].hi;
    require(
        (f.eval(peak_param) - f.sup()).abs() <= vtol,
        "unique strict maximum at the piece junction",
    )?;

    let (inf, sup) = (f.inf(), f.sup());
    let a_pt = gamma.endpoint_a();
    let b_pt = gamma.endpoint_b();
    let peak_pt = gamma.point_at(peak_param);

    let pre_pair = {
        let f = f.clone();
        Arc::new(move |t: f64| -> (Point, Point) {
            let pre = preimage(&f, t);
            debug_assert!(pre.params.len() == 2, "expected two preimages at t = {t}");
            (f.arc.point_at(pre.params[0]), f.arc.point_at(pre.params[1]))
        })
    };

    let h = {
        let pre_pair = pre_pair.clone();
        move |t: f64| -> f64 {
            let (x, y) = pre_pair(t);
            x.dist(a_pt) + y.dist(b_pt) - x.dist(y)
        }
    };

    // Bisection for tau: h < 0 near the infimum, > 0 near the maximum.
    let eps = 1e-9 * (sup - inf);
    let (mut lo, mut hi) = (inf + eps, sup - eps);
    require(h(lo) < 0.0 && h(hi) > 0.0, "h changes sign on the data range")?;
    while hi - lo > 1e-15 * (sup - inf) {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    require(h(tau).abs() <= H_ROOT_TOL, "h(tau) = 0 within tolerance")?;

    // Nearest free-arc point of a loaded-arc point; the free arc runs from b
    // (local 0) to a (local end), so the minimizer toward a is the last one.
    let anchor = {
        let upsilon = upsilon.clone();
        Arc::new(move |x: Point, toward_a: bool| -> Point {
            let (_, mins) = distance_to_arc(x, &upsilon);
            if toward_a {
                mins.last().unwrap().point
            } else {
                mins.first().unwrap().point
            }
        })
    };

    let line_fn: LineFn = {
        let pre_pair = pre_pair.clone();
        let anchor = anchor.clone();
        Arc::new(move |t: f64| -> LevelLine {
            if t <= inf + vtol {
                return LevelLine::degenerate(t, true);
            }
            if t >= sup - vtol {
                return LevelLine::degenerate(t, false);
            }
            let (x, y) = pre_pair(t);
            if t > tau {
                let seg = OrientedSegment::new(x, y, peak_pt);
                LevelLine { t, set: LevelSet::Bounded(vec![seg]), kind: LineKind::GammaChord }
            } else {
                let p = anchor(x, true);
                let q = anchor(y, false);
                let s1 = OrientedSegment::new(x, p, peak_pt);
                let s2 = OrientedSegment::new(y, q, peak_pt);
                LevelLine { t, set: LevelSet::Bounded(vec![s1, s2]), kind: LineKind::UpsilonPair }
            }
        })
    };

    // fat region at tau: between the two anchored chords, below the top chord
    let (x_tau, y_tau) = pre_pair(tau);
    let p_tau = anchor(x_tau, true);
    let q_tau = anchor(y_tau, false);
    let low_ref = p_tau.midpoint(q_tau);
    let hp1 = HalfPlane::through(x_tau, p_tau, peak_pt);
    let hp2 = HalfPlane::through(y_tau, q_tau, peak_pt);
    let hp3 = HalfPlane::through(x_tau, y_tau, low_ref);
    let region = half_plane_region(&domain, &[hp1, hp2, hp3]);
    let area = region.area();
    let fat_regions = vec![FatRegion { value: tau, region, area }];

    let t_grid = build_t_grid(inf, sup, n_levels, &[tau]);
    let lines: Vec<LevelLine> = t_grid.iter().map(|&t| line_fn(t)).collect();
    let t_upsilon = t_grid.iter().copied().filter(|&t| t > inf + vtol && t <= tau).collect();
    let t_gamma = t_grid.iter().copied().filter(|&t| t > tau && t < sup - vtol).collect();

    Ok(LevelFamily {
        case: SolverCase::Case1,
        domain,
        gamma: Some(gamma),
        upsilon: Some(upsilon),
        t_grid,
        lines,
        tau: Some(tau),
        fat_regions,
        t_upsilon,
        t_gamma,
        special_levels: vec![tau],
        inf,
        sup,
        line_fn,
    })
}

/// Case 2: strictly monotone datum. Each level line is a single chord from
/// the unique preimage to its nearest point on the closed free arc; each
/// multi-minimizer point spawns a fat region bounded by its two chords and
/// the free arc between them.
pub fn solve_case2(
    domain: Arc<ConvexBoundary>,
    f: &BoundaryFunction,
    n_levels: usize,
) -> Result<LevelFamily, SolveError> {
    let gamma = f.arc.clone();
    require(domain.strictly_convex(), "domain must be strictly convex")?;
    require(!gamma.is_full(), "loaded arc must be a proper subset of the boundary")?;
    let upsilon = gamma.complement();
    require(
        f.pieces().len() == 1 && matches!(f.pieces()[0].kind, PieceKind::Monotone(_)),
        "f strictly monotone on the loaded arc",
    )?;
    let increasing = f.value_at_b() > f.value_at_a();
    let (inf, sup) = (f.inf(), f.sup());
    let vtol = f.value_tol();

    let classification = classify_distance_structure(&gamma, &upsilon, CLASSIFY_SAMPLES)?;

    let mut fat_regions = Vec::new();
    let mut fat_values = Vec::new();
    for m in &classification.multi {
        if m.minimizers.len() < 2 {
            continue;
        }
        let x0 = m.point;
        let y1 = m.minimizers.first().unwrap();
        let y2 = m.minimizers.last().unwrap();
        let arc_ref = upsilon.point_at(0.5 * (y1.sigma + y2.sigma));
        let hp1 = HalfPlane::through(x0, y1.point, arc_ref);
        let hp2 = HalfPlane::through(x0, y2.point, arc_ref);
        let region = half_plane_region(&domain, &[hp1, hp2]);
        let value = f.eval(m.sigma);
        let area = region.area();
        fat_values.push(value);
        fat_regions.push(FatRegion { value, region, area });
    }
    fat_regions.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap());

    let line_fn: LineFn = {
        let f = f.clone();
        let upsilon = upsilon.clone();
        let gamma = gamma.clone();
        Arc::new(move |t: f64| -> LevelLine {
            if t <= inf + vtol {
                return LevelLine::degenerate(t, true);
            }
            if t >= sup - vtol {
                return LevelLine::degenerate(t, false);
            }
            let pre = preimage(&f, t);
            let s = pre.params[0];
            let x = gamma.point_at(s);
            let (_, mins) = distance_to_arc(x, &upsilon);
            // the maximal superlevel set anchors the chord toward the low end
            // of the datum
            let anchor = if increasing {
                mins.last().unwrap().point
            } else {
                mins.first().unwrap().point
            };
            let high_s = if increasing { 0.5 * (s + gamma.length()) } else { 0.5 * s };
            let ref_pt = gamma.point_at(high_s);
            let seg = OrientedSegment::new(x, anchor, ref_pt);
            LevelLine { t, set: LevelSet::Bounded(vec![seg]), kind: LineKind::SingleToUpsilon }
        })
    };

    let t_grid = build_t_grid(inf, sup, n_levels, &fat_values);
    let lines: Vec<LevelLine> = t_grid.iter().map(|&t| line_fn(t)).collect();
    let t_upsilon = t_grid.iter().copied().filter(|&t| t > inf + vtol && t < sup - vtol).collect();

    Ok(LevelFamily {
        case: SolverCase::Case2,
        domain,
        gamma: Some(gamma),
        upsilon: Some(upsilon),
        t_grid,
        lines,
        tau: fat_values.first().copied(),
        fat_regions,
        t_upsilon,
        t_gamma: Vec::new(),
        special_levels: fat_values,
        inf,
        sup,
        line_fn,
    })
}

/// Case 3: equal endpoint values, one interior local max and one local min,
/// and a multi-minimizer point at the endpoint level equidistant from both
/// arc endpoints (condition (A)). All level lines are chords between the two
/// preimages adjacent to the relevant extremum; the endpoint-level set is fat.
pub fn solve_case3(
    domain: Arc<ConvexBoundary>,
    f: &BoundaryFunction,
    n_levels: usize,
) -> Result<LevelFamily, SolveError> {
    let gamma = f.arc.clone();
    require(domain.strictly_convex(), "domain must be strictly convex")?;
    require(!gamma.is_full(), "loaded arc must be a proper subset of the boundary")?;
    let upsilon = gamma.complement();
    let vtol = f.value_tol();
    require((f.value_at_a() - f.value_at_b()).abs() <= vtol, "f(a) = f(b)")?;
    require(f.is_continuous(), "f continuous on the loaded arc")?;
    require(
        f.pieces().len() == 3
            && f.pieces().iter().all(|p| matches!(p.kind, PieceKind::Monotone(_))),
        "one interior local minimum and one interior local maximum (f one-to-one on three subarcs)",
    )?;
    let t_split = f.value_at_a();
    let (inf, sup) = (f.inf(), f.sup());
    require(
        t_split > inf + vtol && t_split < sup - vtol,
        "endpoint value strictly between the extrema",
    )?;

    // interior preimage of the endpoint level = apex of the fat region
    let pre_split = preimage(f, t_split);
    let interior: Vec<f64> = pre_split
        .params
        .iter()
        .copied()
        .filter(|s| *s > 1e-9 * gamma.length() && *s < gamma.length() * (1.0 - 1e-9))
        .collect();
    require(interior.len() == 1, "unique interior preimage of the endpoint level")?;
    let x0 = gamma.point_at(interior[0]);
    let a_pt = gamma.endpoint_a();
    let b_pt = gamma.endpoint_b();

    let (d_ups, _) = distance_to_arc(x0, &upsilon);
    let atol = 1e-8 * domain.diameter();
    require(
        (d_ups - x0.dist(a_pt)).abs() <= atol && (d_ups - x0.dist(b_pt)).abs() <= atol,
        "condition (A): x0 equidistant from both endpoints and the free arc",
    )?;

    let peak_pt = gamma.point_at(f.argmax());

    let line_fn: LineFn = {
        let f = f.clone();
        let gamma = gamma.clone();
        Arc::new(move |t: f64| -> LevelLine {
            if t <= inf + vtol {
                return LevelLine::degenerate(t, true);
            }
            if t >= sup - vtol {
                return LevelLine::degenerate(t, false);
            }
            let pre = preimage(&f, t);
            // away from the split level there are exactly two preimages; at
            // the split take the pair adjacent to the minimum (closed
            // superlevel set = limit from below)
            let (sx, sy) = match pre.params.len() {
                2 => (pre.params[0], pre.params[1]),
                n if n >= 3 => (pre.params[n - 2], pre.params[n - 1]),
                _ => return LevelLine::degenerate(t, t < t_split),
            };
            let x = gamma.point_at(sx);
            let y = gamma.point_at(sy);
            let seg = OrientedSegment::new(x, y, peak_pt);
            LevelLine { t, set: LevelSet::Bounded(vec![seg]), kind: LineKind::GammaChord }
        })
    };

    // fat region: between the chords [x0, a], [x0, b] and the free arc
    let arc_ref = upsilon.point_at(0.5 * upsilon.length());
    let hp1 = HalfPlane::through(x0, a_pt, arc_ref);
    let hp2 = HalfPlane::through(x0, b_pt, arc_ref);
    let region = half_plane_region(&domain, &[hp1, hp2]);
    let area = region.area();
    let fat_regions = vec![FatRegion { value: t_split, region, area }];

    let t_grid = build_t_grid(inf, sup, n_levels, &[t_split]);
    let lines: Vec<LevelLine> = t_grid.iter().map(|&t| line_fn(t)).collect();
    let t_gamma = t_grid.iter().copied().filter(|&t| t > inf + vtol && t < sup - vtol).collect();

    Ok(LevelFamily {
        case: SolverCase::Case3,
        domain,
        gamma: Some(gamma),
        upsilon: Some(upsilon),
        t_grid,
        lines,
        tau: Some(t_split),
        fat_regions,
        t_upsilon: Vec::new(),
        t_gamma,
        special_levels: vec![t_split],
        inf,
        sup,
        line_fn,
    })
}

/// The three-atom piecewise-constant datum on a strictly convex domain:
/// f = 0, a1 + a2, a1 on the arcs cut at parameters s0, s1, s2. Superlevel
/// boundaries are [x0, x1] for t in (0, a1] and [x1, x2] for t in
/// (a1, a1 + a2]; the solution is constant on the three pieces.
pub fn solve_piecewise_constant(
    domain: Arc<ConvexBoundary>,
    s0: f64,
    s1: f64,
    s2: f64,
    alpha1: f64,
    alpha2: f64,
    n_levels: usize,
) -> Result<LevelFamily, SolveError> {
    require(domain.strictly_convex(), "domain must be strictly convex")?;
    require(alpha1 > 0.0 && alpha2 > 0.0, "alpha1, alpha2 > 0")?;
    let total = domain.total_length();
    let x0 = domain.point_at(s0);
    let x1 = domain.point_at(s1);
    let x2 = domain.point_at(s2);
    let sep = domain.param_tol().max(1e-9 * total);
    require(
        x0.dist(x1) > sep && x1.dist(x2) > sep && x0.dist(x2) > sep,
        "three distinct boundary points",
    )?;

    // the lune against the arc (s0, s1) carries u = 0, the lune against
    // (s1, s2) carries u = a1 + a2, the rest carries a1
    let arc01_mid = domain.point_at(s0 + 0.5 * wrap_len(s1 - s0, total));
    let arc12_mid = domain.point_at(s1 + 0.5 * wrap_len(s2 - s1, total));

    let hp_low = HalfPlane::through(x0, x1, arc01_mid);
    let hp_high = HalfPlane::through(x1, x2, arc12_mid);
    let hp_mid1 = HalfPlane::through(x0, x1, arc12_mid);
    let hp_mid2 = HalfPlane::through(x1, x2, arc01_mid);

    let lune_low = half_plane_region(&domain, &[hp_low]);
    let lune_high = half_plane_region(&domain, &[hp_high]);
    let middle = half_plane_region(&domain, &[hp_mid1, hp_mid2]);

    // descending value order: chord points take the higher closed level
    let fat_regions = vec![
        FatRegion { value: alpha1 + alpha2, area: lune_high.area(), region: lune_high },
        FatRegion { value: alpha1, area: middle.area(), region: middle },
        FatRegion { value: 0.0, area: lune_low.area(), region: lune_low },
    ];

    let line_fn: LineFn = Arc::new(move |t: f64| -> LevelLine {
        if t <= 0.0 {
            return LevelLine::degenerate(t, true);
        }
        if t <= alpha1 {
            let seg = OrientedSegment::new(x0, x1, arc12_mid);
            LevelLine { t, set: LevelSet::Bounded(vec![seg]), kind: LineKind::GammaChord }
        } else if t <= alpha1 + alpha2 {
            let seg = OrientedSegment::new(x1, x2, arc12_mid);
            LevelLine { t, set: LevelSet::Bounded(vec![seg]), kind: LineKind::GammaChord }
        } else {
            LevelLine::degenerate(t, false)
        }
    });

    let t_grid = build_t_grid(0.0, alpha1 + alpha2, n_levels, &[alpha1]);
    let lines: Vec<LevelLine> = t_grid.iter().map(|&t| line_fn(t)).collect();
    let t_gamma = t_grid.iter().copied().filter(|&t| t > 0.0).collect();

    Ok(LevelFamily {
        case: SolverCase::Piecewise,
        domain,
        gamma: None,
        upsilon: None,
        t_grid,
        lines,
        tau: None,
        fat_regions,
        t_upsilon: Vec::new(),
        t_gamma,
        special_levels: vec![0.0, alpha1, alpha1 + alpha2],
        inf: 0.0,
        sup: alpha1 + alpha2,
        line_fn,
    })
}

fn wrap_len(d: f64, total: f64) -> f64 {
    let mut w = d % total;
    if w <= 0.0 {
        w += total;
    }
    w
}

/// Full-boundary continuous datum whose every interior level is attained
/// exactly twice: the level boundary is the chord between the two preimages.
/// Used for mollified piecewise data and other classic full-boundary runs.
pub fn solve_two_preimage(
    domain: Arc<ConvexBoundary>,
    f: &BoundaryFunction,
    n_levels: usize,
) -> Result<LevelFamily, SolveError> {
    require(domain.strictly_convex(), "domain must be strictly convex")?;
    require(f.arc.is_full(), "datum must cover the whole boundary")?;
    let (inf, sup) = (f.inf(), f.sup());
    let vtol = f.value_tol();
    let peak_pt = f.arc.point_at(f.argmax());

    let line_fn: LineFn = {
        let f = f.clone();
        Arc::new(move |t: f64| -> LevelLine {
            if t <= inf + vtol {
                return LevelLine::degenerate(t, true);
            }
            if t >= sup - vtol {
                return LevelLine::degenerate(t, false);
            }
            let pre = preimage(&f, t);
            if pre.params.len() < 2 {
                return LevelLine::degenerate(t, false);
            }
            let x = f.arc.point_at(*pre.params.first().unwrap());
            let y = f.arc.point_at(*pre.params.last().unwrap());
            let seg = OrientedSegment::new(x, y, peak_pt);
            LevelLine { t, set: LevelSet::Bounded(vec![seg]), kind: LineKind::GammaChord }
        })
    };

    // plateau levels are structural jump points
    let mut specials: Vec<f64> = f
        .pieces()
        .iter()
        .filter_map(|p| match p.kind {
            PieceKind::Constant(v) => Some(v),
            _ => None,
        })
        .collect();
    specials.sort_by(|a, b| a.partial_cmp(b).unwrap());
    specials.dedup();

    let t_grid = build_t_grid(inf, sup, n_levels, &specials);
    let lines: Vec<LevelLine> = t_grid.iter().map(|&t| line_fn(t)).collect();
    let t_gamma = t_grid.iter().copied().filter(|&t| t > inf && t < sup).collect();

    Ok(LevelFamily {
        case: SolverCase::TwoPreimage,
        domain,
        gamma: None,
        upsilon: None,
        t_grid,
        lines,
        tau: None,
        fat_regions: Vec::new(),
        t_upsilon: Vec::new(),
        t_gamma,
        special_levels: specials,
        inf,
        sup,
        line_fn,
    })
}

/// Per-level Hausdorff distances between the level boundaries of two families
/// built for the same data by different routes.
#[derive(Debug, Clone)]
pub struct UniquenessProbe {
    pub per_level: Vec<(f64, f64)>,
    pub max_distance: f64,
}

/// Compare level boundaries level by level on the coarser grid. Levels within
/// value tolerance of either family's structural jump levels are skipped
/// (the boundary is genuinely discontinuous in t there).
pub fn uniqueness_probe(a: &LevelFamily, b: &LevelFamily) -> UniquenessProbe {
    let grid = if a.t_grid.len() <= b.t_grid.len() { &a.t_grid } else { &b.t_grid };
    let lo = a.inf().max(b.inf());
    let hi = a.sup().min(b.sup());
    let vtol = 1e-6 * (hi - lo).max(f64::MIN_POSITIVE);
    let mut per_level = Vec::new();
    let mut max_distance: f64 = 0.0;
    for &t in grid {
        if t <= lo + vtol || t >= hi - vtol {
            continue;
        }
        let near_special = a
            .special_levels
            .iter()
            .chain(b.special_levels.iter())
            .any(|s| (t - s).abs() <= vtol);
        if near_special {
            continue;
        }
        let la = a.line_at(t);
        let lb = b.line_at(t);
        let (sa, sb) = (la.segments(), lb.segments());
        if sa.is_empty() || sb.is_empty() {
            continue;
        }
        let d = segment_hausdorff(sa, sb);
        per_level.push((t, d));
        max_distance = max_distance.max(d);
    }
    UniquenessProbe { per_level, max_distance }
}

fn segment_hausdorff(a: &[OrientedSegment], b: &[OrientedSegment]) -> f64 {
    let one_sided = |from: &[OrientedSegment], to: &[OrientedSegment]| -> f64 {
        let mut worst: f64 = 0.0;
        for seg in from {
            let n = 64;
            for k in 0..=n {
                let z = seg.chord.point_at(k as f64 / n as f64);
                let d = to
                    .iter()
                    .map(|s| s.chord.distance_to(z))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        worst
    };
    one_sided(a, b).max(one_sided(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Piece, PieceKind};
    use crate::geometry::ConvexBoundary;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    /// disk scenario with strictly monotone datum: free arc [-pi/4, pi/4],
    /// f affine in the arc parameter from 0 to 1.
    fn d1_family(n_levels: usize) -> (Arc<ConvexBoundary>, BoundaryFunction, LevelFamily) {
        let c = ConvexBoundary::circle(1.0);
        let upsilon = BoundaryArc::new(c.clone(), -FRAC_PI_4, FRAC_PI_4).unwrap();
        let gamma = upsilon.complement();
        let len = gamma.length();
        let f = BoundaryFunction::from_pieces(
            gamma,
            vec![Piece {
                lo: 0.0,
                hi: len,
                kind: PieceKind::Monotone(Arc::new(move |s| s / len)),
            }],
        )
        .unwrap();
        let fam = solve_case2(c.clone(), &f, n_levels).unwrap();
        (c, f, fam)
    }

    /// disk scenario with tent datum: loaded arc from -pi/4 to 5pi/4, peak at
    /// pi/2, zero at both ends.
    fn d2_family(n_levels: usize) -> (Arc<ConvexBoundary>, BoundaryFunction, LevelFamily) {
        let c = ConvexBoundary::circle(1.0);
        let gamma = BoundaryArc::new(c.clone(), -FRAC_PI_4, 5.0 * FRAC_PI_4).unwrap();
        let peak = 3.0 * FRAC_PI_4;
        let w = 3.0 * FRAC_PI_4;
        let f = BoundaryFunction::from_pieces(
            gamma,
            vec![
                Piece {
                    lo: 0.0,
                    hi: peak,
                    kind: PieceKind::Monotone(Arc::new(move |s| 1.0 - (peak - s) / w)),
                },
                Piece {
                    lo: peak,
                    hi: 2.0 * peak,
                    kind: PieceKind::Monotone(Arc::new(move |s| 1.0 - (s - peak) / w)),
                },
            ],
        )
        .unwrap();
        let fam = solve_case1(c.clone(), &f, n_levels).unwrap();
        (c, f, fam)
    }

    #[test]
    fn case1_tau_matches_closed_form() {
        let (_, _, fam) = d2_family(2001);
        let tau = fam.tau.unwrap();
        // closed form on the unit circle:
        // h(t) = 4 sin(3 pi t / 8) - 2 sin(3 pi (1 - t) / 4)
        let h = |t: f64| 4.0 * (3.0 * PI * t / 8.0).sin() - 2.0 * (3.0 * PI * (1.0 - t) / 4.0).sin();
        assert!(h(tau).abs() < 1e-9, "h(tau) = {}", h(tau));
        assert!((tau - 0.43).abs() < 0.01, "tau = {tau}");
    }

    #[test]
    fn case1_kinds_split_at_tau() {
        let (_, _, fam) = d2_family(801);
        let tau = fam.tau.unwrap();
        for line in &fam.lines {
            match line.kind {
                LineKind::GammaChord => assert!(line.t > tau),
                LineKind::UpsilonPair => assert!(line.t <= tau),
                LineKind::Degenerate => {}
                LineKind::SingleToUpsilon => panic!("no single chords in case 1"),
            }
        }
        // gamma chord at t = 0.9 joins the points at pi/2 -+ 0.075 pi
        let line = fam.line_at(0.9);
        assert_eq!(line.kind, LineKind::GammaChord);
        let seg = &line.segments()[0];
        let want = Point::new((FRAC_PI_2 - 0.075 * PI).cos(), (FRAC_PI_2 - 0.075 * PI).sin());
        let d = seg.chord.p.dist(want).min(seg.chord.q.dist(want));
        assert!(d < 1e-9, "endpoint off by {d}");
    }

    #[test]
    fn case1_fat_region_positive_area() {
        let (_, _, fam) = d2_family(801);
        assert_eq!(fam.fat_regions.len(), 1);
        assert!(fam.fat_regions[0].area > 0.01, "area = {}", fam.fat_regions[0].area);
    }

    #[test]
    fn case1_below_tau_chords_anchor_at_endpoints() {
        // on the circle all nearest free-arc points are arc endpoints
        let (_, _, fam) = d2_family(801);
        let a = Point::new(FRAC_PI_4.cos(), -FRAC_PI_4.sin());
        let b = Point::new((5.0 * FRAC_PI_4).cos(), (5.0 * FRAC_PI_4).sin());
        let tau = fam.tau.unwrap();
        for line in fam.lines.iter().filter(|l| matches!(l.kind, LineKind::UpsilonPair)) {
            assert!(line.t <= tau);
            let hits_a = line
                .segments()
                .iter()
                .any(|s| s.chord.p.dist(a).min(s.chord.q.dist(a)) < 1e-9);
            let hits_b = line
                .segments()
                .iter()
                .any(|s| s.chord.p.dist(b).min(s.chord.q.dist(b)) < 1e-9);
            assert!(hits_a && hits_b, "pair at t = {} misses an endpoint", line.t);
        }
    }

    #[test]
    fn case2_d1_structure() {
        let (_, f, fam) = d1_family(2001);
        assert_eq!(fam.fat_regions.len(), 1);
        let fat = &fam.fat_regions[0];
        assert!((fat.value - 0.5).abs() < 1e-9, "value = {}", fat.value);
        assert!(fat.area > 0.1);
        // z = (-0.5, 0) lies inside the fat region
        let u = fam.evaluate(Point::new(-0.5, 0.0)).unwrap();
        assert_eq!(u, fat.value);
        // chord at t = 1/4 ends at endpoint a = e^{i pi/4} and starts at the
        // quarter point of the loaded arc
        let line = fam.line_at(0.25);
        let seg = &line.segments()[0];
        let a = Point::new(FRAC_PI_4.cos(), FRAC_PI_4.sin());
        let near_a = seg.chord.p.dist(a).min(seg.chord.q.dist(a));
        assert!(near_a < 1e-6, "chord should end at a, off by {near_a}");
        let x_t = f.arc.point_at(0.25 * f.arc.length());
        let d = seg.chord.p.dist(x_t).min(seg.chord.q.dist(x_t));
        assert!(d < 1e-9);
    }

    #[test]
    fn case2_nesting_over_grid_pairs() {
        let (_, _, fam) = d1_family(201);
        for i in 0..fam.lines.len() {
            for j in (i + 1)..fam.lines.len() {
                for seg in fam.lines[j].segments() {
                    for z in [seg.chord.p, seg.chord.q, seg.chord.midpoint()] {
                        assert!(
                            fam.lines[i].member(z, 1e-9),
                            "nesting violated between {} and {}",
                            fam.t_grid[i],
                            fam.t_grid[j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn case3_disk_symmetric() {
        let c = ConvexBoundary::circle(1.0);
        let upsilon = BoundaryArc::new(c.clone(), -PI / 6.0, PI / 6.0).unwrap();
        let gamma = upsilon.complement();
        let len = gamma.length();
        let sine = move |s: f64| (2.0 * PI * s / len).sin();
        let f = BoundaryFunction::from_pieces(
            gamma.clone(),
            vec![
                Piece { lo: 0.0, hi: len / 4.0, kind: PieceKind::Monotone(Arc::new(sine)) },
                Piece {
                    lo: len / 4.0,
                    hi: 3.0 * len / 4.0,
                    kind: PieceKind::Monotone(Arc::new(sine)),
                },
                Piece { lo: 3.0 * len / 4.0, hi: len, kind: PieceKind::Monotone(Arc::new(sine)) },
            ],
        )
        .unwrap();
        let fam = solve_case3(c.clone(), &f, 801).unwrap();
        // fat region = triangle (-1,0), e^{+-i pi/6} plus the circular
        // segment beyond the chord between the free-arc endpoints;
        // triangle area by shoelace is (2 + sqrt(3))/4
        let fat = &fam.fat_regions[0];
        assert!((fat.value - 0.0).abs() < 1e-12);
        let triangle = (2.0 + 3.0_f64.sqrt()) / 4.0;
        let segment = 0.5 * (PI / 3.0 - (PI / 3.0).sin());
        assert!(
            (fat.area - (triangle + segment)).abs() < 1e-4,
            "area = {}, want {}",
            fat.area,
            triangle + segment
        );
        // apex region evaluates to the endpoint value
        assert_eq!(fam.evaluate(Point::new(-0.9, 0.0)).unwrap(), 0.0);
        // a positive level cuts a chord in the upper half
        let line = fam.line_at(0.5);
        assert_eq!(line.kind, LineKind::GammaChord);
        let seg = &line.segments()[0];
        assert!(seg.chord.p.y > 0.0 && seg.chord.q.y > 0.0);
        // preimage positions in closed form: sin(2 pi s / len) = 1/2
        let s_lo = len / 12.0;
        let s_hi = len * (5.0 / 12.0);
        let want_lo = gamma.point_at(s_lo);
        let want_hi = gamma.point_at(s_hi);
        assert!(seg.chord.p.dist(want_lo).min(seg.chord.q.dist(want_lo)) < 1e-9);
        assert!(seg.chord.p.dist(want_hi).min(seg.chord.q.dist(want_hi)) < 1e-9);
    }

    #[test]
    fn case3_rejects_missing_condition_a() {
        // interior zero shifted off the antipode of the free-arc midpoint,
        // so equidistance from the endpoints fails
        let c = ConvexBoundary::circle(1.0);
        let upsilon = BoundaryArc::new(c.clone(), -PI / 6.0, PI / 6.0).unwrap();
        let gamma = upsilon.complement();
        let len = gamma.length();
        let f = BoundaryFunction::from_pieces(
            gamma,
            vec![
                Piece {
                    lo: 0.0,
                    hi: len / 6.0,
                    kind: PieceKind::Monotone(Arc::new(move |s| 6.0 * s / len)),
                },
                Piece {
                    lo: len / 6.0,
                    hi: len / 2.0,
                    kind: PieceKind::Monotone(Arc::new(move |s| 1.0 - 6.0 * (s - len / 6.0) / len)),
                },
                Piece {
                    lo: len / 2.0,
                    hi: len,
                    kind: PieceKind::Monotone(Arc::new(move |s| -1.0 + 2.0 * (s - len / 2.0) / len)),
                },
            ],
        )
        .unwrap();
        match solve_case3(c, &f, 101) {
            Err(SolveError::Precondition(msg)) => assert!(msg.contains("condition (A)")),
            other => panic!("expected condition (A) failure, got {other:?}"),
        }
    }

    #[test]
    fn piecewise_level_boundaries() {
        let c = ConvexBoundary::circle(1.0);
        let fam = solve_piecewise_constant(c, 0.0, FRAC_PI_2, PI, 1.0, 1.0, 801).unwrap();
        // boundary of {u >= 1.5} is the chord from (0,1) to (-1,0)
        let line = fam.line_at(1.5);
        let seg = &line.segments()[0];
        assert!(seg.chord.p.dist(Point::new(0.0, 1.0)) < 1e-12);
        assert!(seg.chord.q.dist(Point::new(-1.0, 0.0)) < 1e-12);
        // boundary of {u >= 0.5} is the chord from (1,0) to (0,1)
        let line = fam.line_at(0.5);
        let seg = &line.segments()[0];
        assert!(seg.chord.p.dist(Point::new(1.0, 0.0)) < 1e-12);
        // structurally at most one segment per level: never a triangle
        for l in &fam.lines {
            assert!(l.segments().len() <= 1);
        }
        // values on the three regions
        let at = |x: f64, y: f64| fam.evaluate(Point::new(x, y)).unwrap();
        assert_eq!(at(0.6, 0.6), 0.0); // lune against arc (0, pi/2)
        assert_eq!(at(-0.6, 0.6), 2.0); // lune against arc (pi/2, pi)
        assert_eq!(at(0.0, -0.5), 1.0); // remainder
        // points exactly on a chord take that chord's level
        assert_eq!(at(0.5, 0.5), 1.0);
        assert_eq!(at(-0.5, 0.5), 2.0);
    }

    #[test]
    fn coarea_of_synthetic_vertical_chords_is_pi() {
        // u = x on the unit disk: the level line at t is the chord x = t
        let c = ConvexBoundary::circle(1.0);
        let fam = LevelFamily::synthetic(c, -1.0, 1.0, 2001, |t: f64| {
            if t.abs() >= 1.0 {
                return LevelLine::degenerate(t, t <= -1.0);
            }
            let half = (1.0 - t * t).sqrt();
            let seg = OrientedSegment::new(
                Point::new(t, -half),
                Point::new(t, half),
                Point::new(1.0, 0.0),
            );
            LevelLine { t, set: LevelSet::Bounded(vec![seg]), kind: LineKind::GammaChord }
        });
        let tv = fam.coarea_tv();
        // the sqrt endpoints limit the midpoint rule to O(h^{3/2})
        assert!((tv.value - PI).abs() < 5e-5, "tv = {}", tv.value);
        assert!(tv.richardson_error < 5e-4);
    }

    #[test]
    fn piecewise_coarea_exact() {
        let c = ConvexBoundary::circle(1.0);
        let fam = solve_piecewise_constant(c, 0.0, FRAC_PI_2, PI, 1.0, 1.0, 2001).unwrap();
        let tv = fam.coarea_tv();
        assert!((tv.value - 2.0 * 2.0_f64.sqrt()).abs() < 1e-12, "tv = {}", tv.value);
    }

    #[test]
    fn evaluate_range_bounds() {
        let (_, f, fam) = d1_family(801);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..2000 {
            let z = Point::new(2.0 * next() - 1.0, 2.0 * next() - 1.0);
            if !fam.domain.contains(z, 1e-9) {
                continue;
            }
            let u = fam.evaluate(z).unwrap();
            assert!(u >= f.inf() && u <= f.sup(), "u = {u} out of range");
        }
    }

    #[test]
    fn evaluate_outside_domain_errors() {
        let (_, _, fam) = d1_family(101);
        assert!(matches!(
            fam.evaluate(Point::new(2.0, 0.0)),
            Err(SolveError::OutsideDomain)
        ));
    }

    #[test]
    fn uniqueness_probe_identical_is_zero() {
        let (_, _, fam) = d1_family(401);
        let probe = uniqueness_probe(&fam, &fam);
        assert_eq!(probe.max_distance, 0.0);
    }

    #[test]
    fn grid_refinement_probe_small() {
        let (_, _, coarse) = d2_family(1001);
        let (_, _, fine) = d2_family(4001);
        let probe = uniqueness_probe(&coarse, &fine);
        // same chord rule, so matched levels agree to solver precision
        assert!(probe.max_distance < 1e-8, "distance = {}", probe.max_distance);
    }

    #[test]
    fn boundary_contact_invariant() {
        let (_, f, fam) = d2_family(401);
        for line in &fam.lines {
            for seg in line.segments() {
                let on_arc_value = |p: Point| {
                    let s = fam.domain.project(p);
                    f.arc.local(s).map(|sigma| f.eval(sigma))
                };
                let ok = [seg.chord.p, seg.chord.q].iter().any(|p| {
                    on_arc_value(*p).map(|v| (v - line.t).abs() < 1e-6).unwrap_or(false)
                });
                assert!(ok, "no loaded-arc endpoint at level {}", line.t);
            }
        }
    }

    #[test]
    fn full_trace_of_d1_is_constant_on_free_arc() {
        let (_, f, fam) = d1_family(2001);
        let trace = fam.full_trace(&f).unwrap();
        // trace covers the whole boundary and keeps the datum's range
        assert!(trace.arc.is_full() || (trace.arc.length() - fam.domain.total_length()).abs() < 1e-6);
        // on the free arc the trace is the fat value 1/2
        let lg = f.arc.length();
        let probe = lg + 0.5 * (trace.arc.length() - lg);
        assert!((trace.eval(probe) - 0.5).abs() < 1e-9, "trace = {}", trace.eval(probe));
    }
}
