//! Quadrature grid over the ball `B(o, r)`.
//!
//! Nodes are cell centres `Δ(i + ½, j + ½)` with `Δ = 2r/q`, so exactly
//! `q²` half-open cells tile `[−r, r)²`. Each node carries the area of its
//! cell inside the ball; cells that miss the ball are dropped.

use serde::Serialize;

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureGrid {
    radius: f64,
    spacing: f64,
    q: usize,
    nodes: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of quadrature nodes `m`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Cells tiling `[−r, r)²`; always `q²`.
    pub fn cell_count(&self) -> usize {
        self.q * self.q
    }

    pub fn total_weight(&self) -> f64 {
        // weights are all positive and of similar size, plain summation is fine
        self.weights.iter().sum()
    }

    /// Nodes whose whole cell lies inside the ball.
    pub fn interior_count(&self) -> usize {
        let full = self.spacing * self.spacing;
        self.weights.iter().filter(|w| **w == full).count()
    }
}

pub fn build_grid(radius: f64, q: usize) -> Result<QuadratureGrid> {
    if !(radius.is_finite() && radius > 0.0) {
        return domain(format!("radius must be positive, got {radius}"));
    }
    if q < 2 || !q.is_multiple_of(2) {
        return domain(format!("q must be a positive even integer, got {q}"));
    }
    let spacing = 2.0 * radius / q as f64;
    let half = (q / 2) as i64;
    let mut nodes = Vec::with_capacity(q * q);
    let mut weights = Vec::with_capacity(q * q);
    for i in -half..half {
        for j in -half..half {
            let v = [spacing * (i as f64 + 0.5), spacing * (j as f64 + 0.5)];
            let w = cell_weight(v, spacing, radius);
            if w > 0.0 {
                nodes.push(v);
                weights.push(w);
            }
        }
    }
    Ok(QuadratureGrid { radius, spacing, q, nodes, weights })
}

/// `|A_v ∩ B(o, r)|` for the square cell of side `spacing` centred at `center`.
///
/// Computed exactly from the disk's quadrant area function; cells entirely
/// inside or outside short-circuit to `Δ²` and `0`.
pub fn cell_weight(center: [f64; 2], spacing: f64, radius: f64) -> f64 {
    let h = spacing / 2.0;
    let (x0, x1) = (center[0] - h, center[0] + h);
    let (y0, y1) = (center[1] - h, center[1] + h);
    let far_x = x0.abs().max(x1.abs());
    let far_y = y0.abs().max(y1.abs());
    let r2 = radius * radius;
    if far_x * far_x + far_y * far_y <= r2 {
        return spacing * spacing;
    }
    let near_x = if x0 <= 0.0 && x1 >= 0.0 { 0.0 } else { x0.abs().min(x1.abs()) };
    let near_y = if y0 <= 0.0 && y1 >= 0.0 { 0.0 } else { y0.abs().min(y1.abs()) };
    if near_x * near_x + near_y * near_y >= r2 {
        return 0.0;
    }
    let g = |x: f64, y: f64| signed_quadrant_area(x, y, radius);
    let area = g(x1, y1) - g(x0, y1) - g(x1, y0) + g(x0, y0);
    area.clamp(0.0, spacing * spacing)
}

/// Signed area of the disk inside the rectangle spanned by the origin and `(x, y)`.
fn signed_quadrant_area(x: f64, y: f64, r: f64) -> f64 {
    let sign = x.signum() * y.signum();
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    sign * quadrant_area(x.abs().min(r), y.abs().min(r), r)
}

/// `|B(o, r) ∩ [0, a] × [0, b]|` for `0 ≤ a, b ≤ r`.
fn quadrant_area(a: f64, b: f64, r: f64) -> f64 {
    if a * a + b * b <= r * r {
        return a * b;
    }
    // the arc crosses height b at x = xc < a
    let xc = (r * r - b * b).max(0.0).sqrt();
    let primitive = |t: f64| 0.5 * (t * (r * r - t * t).max(0.0).sqrt() + r * r * (t / r).clamp(-1.0, 1.0).asin());
    b * xc + primitive(a) - primitive(xc)
}
