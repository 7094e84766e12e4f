//! Dirichlet data on a boundary arc: piecewise monotone/constant storage,
//! level preimage queries, monotonicity validation for rectangles, and the
//! distributional tangential derivative with its Stieltjes pairing.

use crate::geometry::{BoundaryArc, Point, RectSide};
use serde::Serialize;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Relative tolerance on function values, scaled by the data range.
pub const VALUE_REL_TOL: f64 = 1e-10;
/// Relative tolerance for preimage parameters, scaled by total length.
pub const PREIMAGE_REL_TOL: f64 = 1e-12;
/// Finite differences below this (relative to range) count as a plateau.
const PLATEAU_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DatumError {
    #[error("pieces do not cover the arc: gap at sigma = {0}")]
    Gap(f64),
    #[error("piece [{lo}, {hi}] is not strictly monotone")]
    NotMonotone { lo: f64, hi: f64 },
    #[error("datum is not continuous at sigma = {0}")]
    Discontinuous(f64),
    #[error("{0}")]
    Invalid(String),
}

type ArcFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One piece of the datum over a local-parameter interval of the arc.
#[derive(Clone)]
pub enum PieceKind {
    /// Strictly monotone; stores the function of the local arc parameter.
    Monotone(ArcFn),
    Constant(f64),
}

#[derive(Clone)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub kind: PieceKind,
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            PieceKind::Monotone(_) => "monotone",
            PieceKind::Constant(_) => "constant",
        };
        write!(f, "Piece[{:.6}, {:.6}] {}", self.lo, self.hi, kind)
    }
}

impl Piece {
    pub fn eval(&self, sigma: f64) -> f64 {
        match &self.kind {
            PieceKind::Monotone(f) => f(sigma),
            PieceKind::Constant(v) => *v,
        }
    }

    fn lo_value(&self) -> f64 {
        self.eval(self.lo)
    }

    fn hi_value(&self) -> f64 {
        self.eval(self.hi)
    }

    fn increasing(&self) -> bool {
        self.hi_value() > self.lo_value()
    }

    fn min_value(&self) -> f64 {
        self.lo_value().min(self.hi_value())
    }

    fn max_value(&self) -> f64 {
        self.lo_value().max(self.hi_value())
    }
}

/// The Dirichlet datum f on an arc, stored as monotone and constant pieces in
/// the arc's local coordinate. Jumps are allowed between pieces.
#[derive(Clone)]
pub struct BoundaryFunction {
    pub arc: BoundaryArc,
    pieces: Vec<Piece>,
    inf: f64,
    sup: f64,
    /// Slope of the default linear continuity modulus.
    max_slope: f64,
    continuous: bool,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("pieces", &self.pieces)
            .field("inf", &self.inf)
            .field("sup", &self.sup)
            .finish()
    }
}

impl BoundaryFunction {
    /// Build from explicit pieces; validates coverage and per-piece strict
    /// monotonicity by dense sampling.
    pub fn from_pieces(arc: BoundaryArc, pieces: Vec<Piece>) -> Result<Self, DatumError> {
        if pieces.is_empty() {
            return Err(DatumError::Invalid("no pieces".into()));
        }
        let tol = arc.parent.param_tol();
        if pieces[0].lo > tol {
            return Err(DatumError::Gap(0.0));
        }
        for w in pieces.windows(2) {
            if (w[0].hi - w[1].lo).abs() > tol {
                return Err(DatumError::Gap(w[0].hi));
            }
        }
        if (pieces.last().unwrap().hi - arc.length()).abs() > tol {
            return Err(DatumError::Gap(pieces.last().unwrap().hi));
        }

        let mut inf = f64::INFINITY;
        let mut sup = f64::NEG_INFINITY;
        let mut max_slope: f64 = 0.0;
        for p in &pieces {
            inf = inf.min(p.min_value());
            sup = sup.max(p.max_value());
        }
        let range = (sup - inf).max(f64::MIN_POSITIVE);
        for p in &pieces {
            if let PieceKind::Monotone(_) = p.kind {
                let n = 256;
                let up = p.increasing();
                let mut prev = p.eval(p.lo);
                for k in 1..=n {
                    let s = p.lo + (p.hi - p.lo) * (k as f64) / (n as f64);
                    let v = p.eval(s);
                    let dv = if up { v - prev } else { prev - v };
                    if dv <= PLATEAU_REL_TOL * range {
                        return Err(DatumError::NotMonotone { lo: p.lo, hi: p.hi });
                    }
                    max_slope = max_slope.max(dv / ((p.hi - p.lo) / n as f64));
                    prev = v;
                }
            }
        }
        let mut continuous = true;
        for w in pieces.windows(2) {
            if (w[0].hi_value() - w[1].lo_value()).abs() > VALUE_REL_TOL * range {
                continuous = false;
            }
        }
        Ok(BoundaryFunction { arc, pieces, inf, sup, max_slope, continuous })
    }

    /// Auto-segment a sampled datum at sign changes of finite differences.
    pub fn from_samples(arc: BoundaryArc, values: Vec<f64>) -> Result<Self, DatumError> {
        if values.len() < 2 {
            return Err(DatumError::Invalid("need at least 2 samples".into()));
        }
        let n = values.len();
        let len = arc.length();
        let range = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().cloned().fold(f64::INFINITY, f64::min);
        let plateau_tol = PLATEAU_REL_TOL * range.max(f64::MIN_POSITIVE);
        let step = len / (n - 1) as f64;

        #[derive(PartialEq, Clone, Copy)]
        enum Dir {
            Up,
            Down,
            Flat,
        }
        let dir = |a: f64, b: f64| {
            if (b - a).abs() <= plateau_tol {
                Dir::Flat
            } else if b > a {
                Dir::Up
            } else {
                Dir::Down
            }
        };

        let vals = Arc::new(values);
        let mut pieces = Vec::new();
        let mut start = 0usize;
        let mut cur = dir(vals[0], vals[1]);
        for k in 1..n - 1 {
            let d = dir(vals[k], vals[k + 1]);
            if d != cur {
                pieces.push(sample_piece(&vals, start, k, step, cur == Dir::Flat));
                start = k;
                cur = d;
            }
        }
        pieces.push(sample_piece(&vals, start, n - 1, step, cur == Dir::Flat));
        BoundaryFunction::from_pieces(arc, pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn inf(&self) -> f64 {
        self.inf
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn range(&self) -> f64 {
        self.sup - self.inf
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn value_tol(&self) -> f64 {
        VALUE_REL_TOL * self.range().max(f64::MIN_POSITIVE)
    }

    /// One-sided limit entering the arc (value of the first piece at 0).
    pub fn value_at_a(&self) -> f64 {
        self.pieces[0].lo_value()
    }

    /// One-sided limit at the far endpoint.
    pub fn value_at_b(&self) -> f64 {
        self.pieces.last().unwrap().hi_value()
    }

    /// Evaluate at a local arc coordinate. Jump locations take the value of
    /// the right (later) piece.
    pub fn eval(&self, sigma: f64) -> f64 {
        let sigma = sigma.clamp(0.0, self.arc.length());
        let idx = self
            .pieces
            .partition_point(|p| p.hi < sigma)
            .min(self.pieces.len() - 1);
        self.pieces[idx].eval(sigma.clamp(self.pieces[idx].lo, self.pieces[idx].hi))
    }

    pub fn eval_point(&self, sigma: f64) -> Point {
        self.arc.point_at(sigma)
    }

    /// Linear continuity modulus from the maximal sampled slope.
    pub fn modulus(&self, delta: f64) -> f64 {
        self.max_slope * delta.max(0.0)
    }

    pub fn max_slope(&self) -> f64 {
        self.max_slope
    }

    /// Parameter of the global maximum (unique when the datum has a strict max).
    pub fn argmax(&self) -> f64 {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for p in &self.pieces {
            for (s, v) in [(p.lo, p.lo_value()), (p.hi, p.hi_value())] {
                if v > best.0 {
                    best = (v, s);
                }
            }
        }
        best.1
    }

    pub fn argmin(&self) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        for p in &self.pieces {
            for (s, v) in [(p.lo, p.lo_value()), (p.hi, p.hi_value())] {
                if v < best.0 {
                    best = (v, s);
                }
            }
        }
        best.1
    }
}

fn sample_piece(vals: &Arc<Vec<f64>>, i0: usize, i1: usize, step: f64, flat: bool) -> Piece {
    let lo = i0 as f64 * step;
    let hi = i1 as f64 * step;
    if flat {
        Piece { lo, hi, kind: PieceKind::Constant(vals[i0]) }
    } else {
        let vals = vals.clone();
        let f = move |sigma: f64| {
            let t = (sigma / step).clamp(i0 as f64, i1 as f64);
            let k = (t.floor() as usize).min(vals.len() - 2);
            let frac = t - k as f64;
            vals[k] * (1.0 - frac) + vals[k + 1] * frac
        };
        Piece { lo, hi, kind: PieceKind::Monotone(Arc::new(f)) }
    }
}

/// Preimage of a level: one parameter per monotone piece whose range straddles
/// the level, plus flagged plateau endpoints.
#[derive(Debug, Clone)]
pub struct LevelPreimage {
    pub t: f64,
    /// Sorted local parameters with f = t.
    pub params: Vec<f64>,
    pub points: Vec<Point>,
    /// True when some constant piece sits exactly at the level; `params` then
    /// includes that piece's endpoints.
    pub plateau: bool,
}

/// All boundary parameters at level `t`, by bisection per monotone piece.
/// Levels outside [inf, sup] yield an empty preimage.
pub fn preimage(f: &BoundaryFunction, t: f64) -> LevelPreimage {
    let mut params = Vec::new();
    let mut plateau = false;
    let vtol = f.value_tol();
    let ptol = PREIMAGE_REL_TOL * f.arc.parent.total_length();
    for p in f.pieces() {
        match &p.kind {
            PieceKind::Constant(v) => {
                if (v - t).abs() <= vtol {
                    plateau = true;
                    params.push(p.lo);
                    params.push(p.hi);
                }
            }
            PieceKind::Monotone(g) => {
                let (vlo, vhi) = (g(p.lo), g(p.hi));
                let (mn, mx) = (vlo.min(vhi), vlo.max(vhi));
                if t < mn - vtol || t > mx + vtol {
                    continue;
                }
                if (t - vlo).abs() <= vtol && (t - mn).abs() <= vtol && params.is_empty() {
                    // boundary hit at the piece start
                }
                let (mut lo, mut hi) = (p.lo, p.hi);
                let up = vhi > vlo;
                let tt = t.clamp(mn, mx);
                while hi - lo > ptol {
                    let mid = 0.5 * (lo + hi);
                    let v = g(mid);
                    if (v >= tt) == up {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                params.push(0.5 * (lo + hi));
            }
        }
    }
    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
    params.dedup_by(|a, b| (*a - *b).abs() < 2.0 * ptol);
    let points = params.iter().map(|s| f.arc.point_at(*s)).collect();
    LevelPreimage { t, params, points, plateau }
}

/// Result of the rectangle monotone-pair validation.
#[derive(Debug)]
pub struct MonotonePairReport {
    pub ok: bool,
    /// Value at the shared corner (-l, h) and at (l, -h).
    pub corner_values: (f64, f64),
    /// Offending interval in the failing traversal, when not ok.
    pub offending: Option<(RectSide, f64, f64)>,
}

/// Check strict monotonicity of a full-boundary datum along the two rectangle
/// halves Gamma_1 = top+right and Gamma_2 = left+bottom, both traversed from
/// the corner (-l, h) to the corner (l, -h).
pub fn validate_monotone_pair<F: Fn(Point) -> f64>(
    l: f64,
    h: f64,
    f: &F,
) -> MonotonePairReport {
    let corner_values = (f(Point::new(-l, h)), f(Point::new(l, -h)));
    let n = 2048;
    // Gamma_1: top from (-l,h) to (l,h), then right down to (l,-h).
    let gamma1 = |u: f64| -> (RectSide, Point) {
        let len = 2.0 * l + 2.0 * h;
        let d = u * len;
        if d <= 2.0 * l {
            (RectSide::Top, Point::new(-l + d, h))
        } else {
            (RectSide::Right, Point::new(l, h - (d - 2.0 * l)))
        }
    };
    // Gamma_2: left from (-l,h) down to (-l,-h), then bottom to (l,-h).
    let gamma2 = |u: f64| -> (RectSide, Point) {
        let len = 2.0 * l + 2.0 * h;
        let d = u * len;
        if d <= 2.0 * h {
            (RectSide::Left, Point::new(-l, h - d))
        } else {
            (RectSide::Bottom, Point::new(-l + (d - 2.0 * h), -h))
        }
    };
    for walker in [&gamma1 as &dyn Fn(f64) -> (RectSide, Point), &gamma2] {
        let mut prev = f(walker(0.0).1);
        let increasing = corner_values.1 > corner_values.0;
        for k in 1..=n {
            let u = k as f64 / n as f64;
            let (side, p) = walker(u);
            let v = f(p);
            let ok = if increasing { v > prev } else { v < prev };
            if !ok {
                let len = 2.0 * l + 2.0 * h;
                return MonotonePairReport {
                    ok: false,
                    corner_values,
                    offending: Some((side, (k - 1) as f64 / n as f64 * len, u * len)),
                };
            }
            prev = v;
        }
    }
    MonotonePairReport { ok: true, corner_values, offending: None }
}

/// The distributional tangential derivative g = df/dtau on the boundary:
/// signed atoms at jumps plus an absolutely continuous density.
#[derive(Clone, Serialize)]
pub struct TraceMeasure {
    /// (local arc parameter, weight); weight = jump height in the direction of
    /// positive orientation.
    pub atoms: Vec<(f64, f64)>,
    /// Density pieces (local parameter intervals of smooth variation).
    #[serde(skip)]
    pub density_pieces: Vec<DensityPiece>,
    #[serde(skip)]
    pub arc: BoundaryArc,
}

#[derive(Clone)]
pub struct DensityPiece {
    pub lo: f64,
    pub hi: f64,
    f: ArcFn,
}

impl DensityPiece {
    /// df/ds at sigma by central differencing of the stored piece.
    pub fn density(&self, sigma: f64) -> f64 {
        let h = 1e-6 * (self.hi - self.lo).max(1e-12);
        let lo = (sigma - h).max(self.lo);
        let hi = (sigma + h).min(self.hi);
        ((self.f)(hi) - (self.f)(lo)) / (hi - lo)
    }

    pub fn value(&self, sigma: f64) -> f64 {
        (self.f)(sigma)
    }
}

impl fmt::Debug for TraceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TraceMeasure")
            .field("atoms", &self.atoms)
            .field("density_pieces", &self.density_pieces.len())
            .finish()
    }
}

/// Tangential derivative of the datum, in the positive orientation of the
/// boundary. Jumps between pieces become atoms; for a closed-loop datum the
/// wrap-around jump lands at parameter 0.
pub fn tangential_derivative(f: &BoundaryFunction) -> TraceMeasure {
    let mut atoms = Vec::new();
    let mut density_pieces = Vec::new();
    let pieces = f.pieces();
    for (i, p) in pieces.iter().enumerate() {
        if let PieceKind::Monotone(g) = &p.kind {
            density_pieces.push(DensityPiece { lo: p.lo, hi: p.hi, f: g.clone() });
        }
        if i + 1 < pieces.len() {
            let jump = pieces[i + 1].lo_value() - p.hi_value();
            if jump != 0.0 {
                atoms.push((p.hi, jump));
            }
        }
    }
    if f.arc.is_full() {
        let wrap = pieces[0].lo_value() - pieces.last().unwrap().hi_value();
        if wrap != 0.0 {
            atoms.push((0.0, wrap));
        }
    }
    atoms.retain(|(_, w)| w.abs() > 0.0);
    TraceMeasure { atoms, density_pieces, arc: f.arc.clone() }
}

impl TraceMeasure {
    /// Total mass (atoms plus integrated density). Zero for continuous
    /// closed-loop data by telescoping.
    pub fn total_mass(&self) -> f64 {
        let atom_sum: f64 = self.atoms.iter().map(|(_, w)| w).sum();
        let density_sum: f64 = self
            .density_pieces
            .iter()
            .map(|p| p.value(p.hi) - p.value(p.lo))
            .sum();
        atom_sum + density_sum
    }

    /// Stieltjes pairing with a test function given on the boundary:
    /// sum of atom contributions plus the adaptive quadrature of
    /// phi * density over the smooth pieces.
    pub fn pair<F: Fn(Point) -> f64>(&self, phi: &F) -> f64 {
        let mut acc = 0.0;
        for (sigma, w) in &self.atoms {
            acc += w * phi(self.arc.point_at(*sigma));
        }
        for p in &self.density_pieces {
            let g = |sigma: f64| phi(self.arc.point_at(sigma)) * p.density(sigma);
            acc += adaptive_simpson(&g, p.lo, p.hi, 1e-8);
        }
        acc
    }
}

/// Adaptive Simpson quadrature with relative tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    // Seed with a moderate uniform split so narrow features are not missed.
    let n0 = 64;
    let mut acc = 0.0;
    let step = (hi - lo) / n0 as f64;
    let scale = {
        let mut m: f64 = 0.0;
        for k in 0..=n0 {
            m = m.max(f(lo + step * k as f64).abs());
        }
        m * (hi - lo)
    };
    let tol = rel_tol * scale.max(1e-300);
    for k in 0..n0 {
        let a = lo + step * k as f64;
        let b = a + step;
        acc += simpson_rec(f, a, b, tol / n0 as f64, 24);
    }
    acc
}

fn simpson_once<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

fn simpson_rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let whole = simpson_once(f, a, b);
    let m = 0.5 * (a + b);
    let left = simpson_once(f, a, m);
    let right = simpson_once(f, m, b);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        simpson_rec(f, a, m, tol / 2.0, depth - 1) + simpson_rec(f, m, b, tol / 2.0, depth - 1)
    }
}
