//! Distance from boundary points to an arc, minimizer multiplicity, and the
//! classification of the loaded arc into endpoint-nearest bands and
//! multi-minimizer points.

use super::boundary::BoundaryArc;
use super::{GeometryError, Point};

/// Gap threshold (relative to total boundary length) separating distinct
/// minimizer clusters.
const CLUSTER_GAP_REL: f64 = 1e-4;

/// Parameters this close (relative to total length) to an arc endpoint count
/// as the endpoint itself.
const ENDPOINT_REL_TOL: f64 = 1e-7;

/// A point of the arc attaining the minimal distance.
#[derive(Debug, Clone, Copy)]
pub struct Minimizer {
    /// Local arc coordinate of the minimizer.
    pub sigma: f64,
    pub point: Point,
    /// True when the minimizer is interior to the arc (neither endpoint).
    pub interior: bool,
}

/// Distance from `x` to the closed arc together with all attaining points.
///
/// Minimizers within `1e-9 * diam` of the minimum are kept; clusters closer
/// than `1e-4 * total_length` in parameter merge into one.
pub fn distance_to_arc(x: Point, arc: &BoundaryArc) -> (f64, Vec<Minimizer>) {
    let n = sample_count(arc);
    let len = arc.length();
    let mut vals = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let sigma = len * (k as f64) / (n as f64);
        vals.push(x.dist(arc.point_at(sigma)));
    }

    // Local minima brackets (including both endpoints), refined by ternary
    // search on the smooth distance function.
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    let step = len / (n as f64);
    for k in 0..=n {
        let is_min = (k == 0 || vals[k] <= vals[k - 1]) && (k == n || vals[k] <= vals[k + 1]);
        if !is_min {
            continue;
        }
        let lo = if k == 0 { 0.0 } else { (k as f64 - 1.0) * step };
        let hi = if k == n { len } else { (k as f64 + 1.0) * step };
        let sigma = ternary_min(|s| x.dist(arc.point_at(s)), lo, hi, 1e-13 * len.max(1.0));
        candidates.push((sigma, x.dist(arc.point_at(sigma))));
    }

    let d = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let keep_tol = 1e-9 * arc.parent.diameter();
    let gap = CLUSTER_GAP_REL * arc.parent.total_length();
    let mut attaining: Vec<f64> = candidates
        .into_iter()
        .filter(|c| c.1 <= d + keep_tol)
        .map(|c| c.0)
        .collect();
    attaining.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut clustered: Vec<f64> = Vec::new();
    for sigma in attaining {
        match clustered.last() {
            Some(&last) if sigma - last < gap => {
                // keep the better of the two representatives
                if x.dist(arc.point_at(sigma)) < x.dist(arc.point_at(last)) {
                    *clustered.last_mut().unwrap() = sigma;
                }
            }
            _ => clustered.push(sigma),
        }
    }

    let end_tol = ENDPOINT_REL_TOL * arc.parent.total_length();
    let minimizers = clustered
        .into_iter()
        .map(|sigma| Minimizer {
            sigma,
            point: arc.point_at(sigma),
            interior: sigma > end_tol && sigma < len - end_tol,
        })
        .collect();
    (d, minimizers)
}

fn sample_count(arc: &BoundaryArc) -> usize {
    let frac = arc.length() / arc.parent.total_length();
    ((4096.0 * frac).ceil() as usize).clamp(256, 8192)
}

fn ternary_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    0.5 * (lo + hi)
}

/// Which endpoint (if any) uniquely attains the distance from a loaded-arc
/// point to the free arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NearestLabel {
    EndpointA,
    EndpointB,
    Interior,
    Multiple,
}

/// Gamma runs from a to b positively; its complement Upsilon runs from b to
/// a, so Upsilon's local 0 is the endpoint b and its local end is a.
fn label_of(minimizers: &[Minimizer], arc_len: f64, end_tol: f64) -> NearestLabel {
    if minimizers.len() >= 2 {
        return NearestLabel::Multiple;
    }
    let m = &minimizers[0];
    if m.interior {
        NearestLabel::Interior
    } else if m.sigma <= end_tol {
        NearestLabel::EndpointB
    } else {
        debug_assert!(m.sigma >= arc_len - end_tol);
        NearestLabel::EndpointA
    }
}

/// An isolated point of the loaded arc with at least two distance minimizers
/// on the closed free arc.
#[derive(Debug, Clone)]
pub struct MultiMinimizerPoint {
    /// Local coordinate on the loaded arc.
    pub sigma: f64,
    pub point: Point,
    /// Minimizers on the free arc (local coordinates there).
    pub minimizers: Vec<Minimizer>,
}

/// Classification of the loaded arc Gamma against the free arc Upsilon:
/// where the nearest free-arc point is interior (S), where it is unique (U)
/// versus multiple (D), and the maximal bands whose unique nearest point is
/// endpoint a resp. b.
#[derive(Debug, Clone)]
pub struct DistanceClassification {
    /// Sampled loaded-arc parameters whose minimizer set meets the open free arc.
    pub s_interior: Vec<f64>,
    /// Isolated multi-minimizer points, computed against the closed free arc.
    pub multi: Vec<MultiMinimizerPoint>,
    /// Band of parameters whose unique nearest free-arc point is endpoint a:
    /// (inf, sup) in loaded-arc coordinates.
    pub band_a: Option<(f64, f64)>,
    /// Same for endpoint b.
    pub band_b: Option<(f64, f64)>,
    /// sup of band_a (the paper's s_a) and inf of band_b (s_b).
    pub s_a: Option<f64>,
    pub s_b: Option<f64>,
    /// |max band_a - inf S| when S is nonempty (corollary check).
    pub band_a_meets_s: Option<f64>,
}

/// Sample the loaded arc, label each sample by its nearest-point structure on
/// the closed free arc, and refine label transitions by bisection.
///
/// Transitions between distinct minimizer branches locate the multi-minimizer
/// points; endpoint-labeled runs form the bands.
pub fn classify_distance_structure(
    gamma: &BoundaryArc,
    upsilon: &BoundaryArc,
    n_samples: usize,
) -> Result<DistanceClassification, GeometryError> {
    if !gamma.is_complement_of(upsilon) {
        return Err(GeometryError::NonComplementaryArcs);
    }
    if n_samples < 16 {
        return Err(GeometryError::TooFewSamples { min: 16, got: n_samples });
    }

    let lg = gamma.length();
    let total = gamma.parent.total_length();
    let end_tol = ENDPOINT_REL_TOL * total;
    let gap = CLUSTER_GAP_REL * total;

    let mut sigmas = Vec::with_capacity(n_samples);
    let mut labels = Vec::with_capacity(n_samples);
    let mut mins: Vec<Vec<Minimizer>> = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let sigma = lg * (k as f64 + 0.5) / (n_samples as f64);
        let (_, m) = distance_to_arc(gamma.point_at(sigma), upsilon);
        labels.push(label_of(&m, upsilon.length(), end_tol));
        sigmas.push(sigma);
        mins.push(m);
    }

    let s_interior: Vec<f64> = sigmas
        .iter()
        .zip(&mins)
        .filter(|(_, m)| m.iter().any(|mi| mi.interior))
        .map(|(s, _)| *s)
        .collect();

    // Multi-minimizer points: samples already seeing two branches, plus
    // bisection-refined branch jumps between consecutive samples.
    let mut multi: Vec<MultiMinimizerPoint> = Vec::new();
    for k in 0..n_samples {
        if labels[k] == NearestLabel::Multiple {
            multi.push(MultiMinimizerPoint {
                sigma: sigmas[k],
                point: gamma.point_at(sigmas[k]),
                minimizers: mins[k].clone(),
            });
        }
        if k + 1 < n_samples && labels[k] != NearestLabel::Multiple && labels[k + 1] != NearestLabel::Multiple {
            let jump = branch_distance(&mins[k], &mins[k + 1]);
            if jump > gap {
                let sigma = refine_branch_jump(gamma, upsilon, sigmas[k], sigmas[k + 1], &mins[k]);
                let (_, m) = distance_to_arc(gamma.point_at(sigma), upsilon);
                let mut minimizers = m;
                // At the refined point both branches attain within tolerance;
                // make sure both representatives are present.
                if minimizers.len() < 2 {
                    let (_, ml) = distance_to_arc(gamma.point_at(sigma - 2.0 * end_tol), upsilon);
                    let (_, mr) = distance_to_arc(gamma.point_at(sigma + 2.0 * end_tol), upsilon);
                    minimizers = merge_minimizers(ml, mr, gap);
                }
                multi.push(MultiMinimizerPoint {
                    sigma,
                    point: gamma.point_at(sigma),
                    minimizers,
                });
            }
        }
    }
    multi.sort_by(|a, b| a.sigma.partial_cmp(&b.sigma).unwrap());
    multi.dedup_by(|a, b| (a.sigma - b.sigma).abs() < gap);

    // Endpoint bands. The definitions allow non-unique minimizers at band
    // edges, so a band runs from an arc end (or a transition point) to the
    // refined transition.
    let band_a = endpoint_band(&sigmas, &labels, NearestLabel::EndpointA, &multi, lg);
    let band_b = endpoint_band(&sigmas, &labels, NearestLabel::EndpointB, &multi, lg);

    let s_a = band_a.map(|(_, hi)| hi);
    let s_b = band_b.map(|(lo, _)| lo);
    let band_a_meets_s = match (s_a, s_interior.first()) {
        (Some(sa), Some(&inf_s)) => Some((sa - inf_s).abs()),
        _ => None,
    };

    Ok(DistanceClassification {
        s_interior,
        multi,
        band_a,
        band_b,
        s_a,
        s_b,
        band_a_meets_s,
    })
}

/// Hausdorff-style distance between two minimizer sets in arc parameter.
fn branch_distance(a: &[Minimizer], b: &[Minimizer]) -> f64 {
    let one_sided = |from: &[Minimizer], to: &[Minimizer]| {
        from.iter()
            .map(|m| {
                to.iter()
                    .map(|n| (m.sigma - n.sigma).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Bisect the branch jump between two loaded-arc parameters: the predicate is
/// "the nearest minimizer still belongs to the left branch".
fn refine_branch_jump(
    gamma: &BoundaryArc,
    upsilon: &BoundaryArc,
    mut lo: f64,
    mut hi: f64,
    left_branch: &[Minimizer],
) -> f64 {
    let tol = 1e-10 * gamma.parent.total_length();
    let gap = CLUSTER_GAP_REL * gamma.parent.total_length();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let (_, m) = distance_to_arc(gamma.point_at(mid), upsilon);
        let near_left = m
            .iter()
            .any(|mi| left_branch.iter().any(|lb| (mi.sigma - lb.sigma).abs() < gap));
        if near_left {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn merge_minimizers(a: Vec<Minimizer>, b: Vec<Minimizer>, gap: f64) -> Vec<Minimizer> {
    let mut out = a;
    for m in b {
        if !out.iter().any(|o| (o.sigma - m.sigma).abs() < gap) {
            out.push(m);
        }
    }
    out.sort_by(|x, y| x.sigma.partial_cmp(&y.sigma).unwrap());
    out
}

fn endpoint_band(
    sigmas: &[f64],
    labels: &[NearestLabel],
    which: NearestLabel,
    multi: &[MultiMinimizerPoint],
    arc_len: f64,
) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (s, l) in sigmas.iter().zip(labels) {
        if *l == which {
            lo = lo.min(*s);
            hi = hi.max(*s);
        }
    }
    if lo > hi {
        return None;
    }
    // Extend to refined transition points and to the arc ends when the band
    // touches them at sampling resolution.
    let step = if sigmas.len() > 1 { sigmas[1] - sigmas[0] } else { arc_len };
    for m in multi {
        if m.sigma >= lo - step && m.sigma <= hi + step {
            lo = lo.min(m.sigma);
            hi = hi.max(m.sigma);
        }
    }
    if lo <= step {
        lo = 0.0;
    }
    if hi >= arc_len - step {
        hi = arc_len;
    }
    Some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexBoundary;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn quarter_arc_setup() -> (BoundaryArc, BoundaryArc) {
        let c = ConvexBoundary::circle(1.0);
        // Upsilon = angles [-pi/4, pi/4]; Gamma its complement.
        let upsilon = BoundaryArc::new(c.clone(), -FRAC_PI_4, FRAC_PI_4).unwrap();
        let gamma = upsilon.complement();
        (gamma, upsilon)
    }

    #[test]
    fn distance_examples_on_quarter_arc() {
        let (_, upsilon) = quarter_arc_setup();
        // x at theta = pi: equidistant from both endpoints, d = 2 sin(3pi/8)
        let x = Point::new(-1.0, 0.0);
        let (d, m) = distance_to_arc(x, &upsilon);
        assert!((d - 2.0 * (3.0 * PI / 8.0).sin()).abs() < 1e-9, "d = {d}");
        assert_eq!(m.len(), 2);
        assert!(!m[0].interior && !m[1].interior);

        // x at theta = pi/2: single minimizer, the endpoint at pi/4
        let x = Point::new(0.0, 1.0);
        let (d, m) = distance_to_arc(x, &upsilon);
        assert!((d - 2.0 * (PI / 8.0).sin()).abs() < 1e-9, "d = {d}");
        assert_eq!(m.len(), 1);
        assert!(m[0].point.dist(Point::new(FRAC_PI_4.cos(), FRAC_PI_4.sin())) < 1e-6);

        // x = endpoint itself
        let a = upsilon.endpoint_a();
        let (d, m) = distance_to_arc(a, &upsilon);
        assert!(d < 1e-9);
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn classification_on_quarter_arc() {
        let (gamma, upsilon) = quarter_arc_setup();
        let cl = classify_distance_structure(&gamma, &upsilon, 256).unwrap();
        // circle: no interior minimizers
        assert!(cl.s_interior.is_empty());
        // single multi-minimizer point at the antipode of the midpoint
        assert_eq!(cl.multi.len(), 1);
        let expect_sigma = PI - FRAC_PI_4; // theta = pi in gamma coordinates (gamma starts at pi/4)
        assert!(
            (cl.multi[0].sigma - expect_sigma).abs() < 1e-6,
            "sigma = {}, expect {}",
            cl.multi[0].sigma,
            expect_sigma
        );
        assert!(cl.multi[0].minimizers.len() >= 2);
        // bands meet at the multi point
        let (alo, ahi) = cl.band_a.unwrap();
        let (blo, bhi) = cl.band_b.unwrap();
        assert!(alo < 1e-6);
        assert!((ahi - expect_sigma).abs() < 1e-6);
        assert!((blo - expect_sigma).abs() < 1e-6);
        assert!((bhi - gamma.length()).abs() < 1e-6);
    }

    #[test]
    fn half_circle_split() {
        let c = ConvexBoundary::circle(1.0);
        let upsilon = BoundaryArc::new(c.clone(), 0.0, PI).unwrap();
        let gamma = upsilon.complement();
        let cl = classify_distance_structure(&gamma, &upsilon, 256).unwrap();
        assert_eq!(cl.multi.len(), 1);
        // midpoint of gamma
        assert!((cl.multi[0].sigma - gamma.length() / 2.0).abs() < 1e-6);
    }

    #[test]
    fn superellipse_has_interior_feet() {
        let e = ConvexBoundary::superellipse(4.0, 1.0);
        // bottom arc |x| <= 0.5: find its parameters via projection
        let s_left = e.project(Point::new(-0.5, -1.2));
        let s_right = e.project(Point::new(0.5, -1.2));
        let upsilon = BoundaryArc::new(e.clone(), s_left, s_right).unwrap();
        let gamma = upsilon.complement();
        let cl = classify_distance_structure(&gamma, &upsilon, 128).unwrap();
        assert!(!cl.s_interior.is_empty(), "expected interior perpendicular feet from the top");
    }

    #[test]
    fn non_complementary_arcs_error() {
        let c = ConvexBoundary::circle(1.0);
        let u = BoundaryArc::new(c.clone(), 0.0, 1.0).unwrap();
        let g = BoundaryArc::new(c.clone(), 2.0, 3.0).unwrap();
        assert!(classify_distance_structure(&g, &u, 64).is_err());
    }
}
