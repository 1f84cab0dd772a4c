//! Non-parametric summary estimates of a point pattern in a rectangle.
//!
//! * `K̂` uses the translation edge correction with `n(n−1)/|W|²` in place
//!   of `ρ̂²`.
//! * `F̂` and `Ĝ` are reduced-sample (border) estimates: only reference
//!   points at least `r` from the boundary count at radius `r`. The raw
//!   border estimate can dip as `r` grows because the reference set
//!   shrinks, so the reported curve is its running maximum.

use crate::curve::{check_radii, Method, SummaryCurve, SummaryKind};
use crate::error::{domain, Error, Result};
use crate::laplace::j_ratio;
use crate::pattern::PointPattern;

/// Reference lattice size per axis for `F̂` when none is given.
pub const DEFAULT_F_LATTICE: usize = 100;

fn provenance(pattern: &PointPattern, extra: serde_json::Value) -> serde_json::Value {
    let mut p = serde_json::json!({ "points": pattern.len(), "window": pattern.window() });
    if let (Some(obj), serde_json::Value::Object(more)) = (p.as_object_mut(), extra) {
        obj.extend(more);
    }
    p
}

/// Translation-corrected `K̂(r)` at each radius.
pub fn estimate_k(pattern: &PointPattern, radii: &[f64]) -> Result<SummaryCurve> {
    check_radii(radii)?;
    let n = pattern.len();
    if n < 2 {
        return Err(Error::TooFewPoints(format!("K estimate needs at least 2 points, got {n}")));
    }
    let w = pattern.window();
    let pts = pattern.points();
    let r_max = radii[radii.len() - 1];
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        for j in 0..i {
            let h = [pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]];
            let d = h[0].hypot(h[1]);
            if d <= r_max {
                let overlap = w.translated_overlap(h);
                if overlap > 0.0 {
                    pairs.push((d, 2.0 / overlap));
                }
            }
        }
    }
    // fixed summation order makes the estimate independent of point order
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let scale = w.area() * w.area() / (n as f64 * (n - 1) as f64);
    let mut values = Vec::with_capacity(radii.len());
    let mut acc = 0.0;
    let mut next = 0;
    for r in radii {
        while next < pairs.len() && pairs[next].0 <= *r {
            acc += pairs[next].1;
            next += 1;
        }
        values.push(Some(acc * scale));
    }
    Ok(SummaryCurve::new(SummaryKind::K, Method::Empirical, radii.to_vec(), values)
        .with_provenance(provenance(pattern, serde_json::json!({ "edge_correction": "translation" }))))
}

fn nearest_distance(p: [f64; 2], pts: &[[f64; 2]], skip: Option<usize>) -> f64 {
    pts.iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(_, q)| (p[0] - q[0]).hypot(p[1] - q[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Reduced-sample distribution estimate from `(distance, boundary distance)`
/// pairs, then a running maximum. Radii above half the shorter window side,
/// or with no eligible reference point, are missing.
fn border_estimate(samples: &[(f64, f64)], radii: &[f64], half_side: f64) -> Vec<Option<f64>> {
    let mut best: Option<f64> = None;
    radii
        .iter()
        .map(|r| {
            if *r > half_side {
                return None;
            }
            let (mut hits, mut eligible) = (0usize, 0usize);
            for (d, b) in samples {
                if *b >= *r {
                    eligible += 1;
                    if *d <= *r {
                        hits += 1;
                    }
                }
            }
            if eligible == 0 {
                return None;
            }
            let raw = hits as f64 / eligible as f64;
            let v = best.map_or(raw, |b| b.max(raw));
            best = Some(v);
            Some(v)
        })
        .collect()
}

/// Empty-space function from an `l × l` lattice of reference points.
pub fn estimate_f(pattern: &PointPattern, radii: &[f64], lattice: usize) -> Result<SummaryCurve> {
    check_radii(radii)?;
    if lattice == 0 {
        return domain("reference lattice needs at least one point per axis");
    }
    let w = pattern.window();
    let (dx, dy) = (w.width() / lattice as f64, w.height() / lattice as f64);
    let mut samples = Vec::with_capacity(lattice * lattice);
    for j in 0..lattice {
        for i in 0..lattice {
            let u = [w.x_min + (i as f64 + 0.5) * dx, w.y_min + (j as f64 + 0.5) * dy];
            samples.push((nearest_distance(u, pattern.points(), None), w.boundary_distance(u)));
        }
    }
    let values = border_estimate(&samples, radii, w.min_side() / 2.0);
    Ok(SummaryCurve::new(SummaryKind::F, Method::Empirical, radii.to_vec(), values)
        .with_provenance(provenance(pattern, serde_json::json!({ "edge_correction": "border", "lattice": lattice }))))
}

/// Nearest-neighbour function. A single point has no neighbour, so every
/// radius is missing.
pub fn estimate_g(pattern: &PointPattern, radii: &[f64]) -> Result<SummaryCurve> {
    check_radii(radii)?;
    if pattern.is_empty() {
        return Err(Error::TooFewPoints("G estimate needs a nonempty pattern".into()));
    }
    let w = pattern.window();
    let pts = pattern.points();
    let values = if pts.len() == 1 {
        vec![None; radii.len()]
    } else {
        let samples: Vec<(f64, f64)> =
            pts.iter().enumerate().map(|(i, p)| (nearest_distance(*p, pts, Some(i)), w.boundary_distance(*p))).collect();
        border_estimate(&samples, radii, w.min_side() / 2.0)
    };
    Ok(SummaryCurve::new(SummaryKind::G, Method::Empirical, radii.to_vec(), values)
        .with_provenance(provenance(pattern, serde_json::json!({ "edge_correction": "border" }))))
}

/// `Ĵ = (1 − Ĝ)/(1 − F̂)` with `a/0 = 0`; missing where either input is.
pub fn estimate_j(pattern: &PointPattern, radii: &[f64], lattice: usize) -> Result<SummaryCurve> {
    let f = estimate_f(pattern, radii, lattice)?;
    let g = estimate_g(pattern, radii)?;
    Ok(j_from_curves(&g, &f))
}

pub(crate) fn j_from_curves(g: &SummaryCurve, f: &SummaryCurve) -> SummaryCurve {
    let values = g.values.iter().zip(&f.values).map(|(g, f)| Some(j_ratio(1.0 - (*g)?, 1.0 - (*f)?))).collect();
    SummaryCurve::new(SummaryKind::J, g.method, g.radii.clone(), values).with_provenance(f.provenance.clone())
}
