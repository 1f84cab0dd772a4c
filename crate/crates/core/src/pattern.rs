//! Planar point patterns observed in an axis-aligned rectangle.
//!
//! CSV layout:
//!
//! ```text
//! # window: 0,10,0,10
//! # seed: 42
//! x,y
//! 1.25,3.5
//! ```
//!
//! The window line gives `x_min,x_max,y_min,y_max`. It may instead live in
//! a sidecar file `<pattern>.window` holding the same four numbers. Other
//! `#` lines are carried along as metadata.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

use crate::curve::format_number;
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let w = Self { x_min, x_max, y_min, y_max };
        if ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) || !(x_max > x_min && y_max > y_min) {
            return domain(format!("window {w:?} must have positive area"));
        }
        Ok(w)
    }

    pub fn unit_square() -> Self {
        Self { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0 }
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::new(0.0, side, 0.0, side)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn min_side(&self) -> f64 {
        self.width().min(self.height())
    }

    /// Closed containment.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    /// Distance from an interior point to the window boundary.
    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        (p[0] - self.x_min).min(self.x_max - p[0]).min(p[1] - self.y_min).min(self.y_max - p[1])
    }

    /// `|W ∩ (W + h)|`.
    pub fn translated_overlap(&self, h: [f64; 2]) -> f64 {
        (self.width() - h[0].abs()).max(0.0) * (self.height() - h[1].abs()).max(0.0)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.x_min * s, self.x_max * s, self.y_min * s, self.y_max * s)
    }

    fn parse(text: &str, line: usize) -> Result<Self> {
        let vals: Vec<f64> = text
            .split([',', ' ', '\t'])
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|e| Error::Parse { line, message: format!("window value {s:?}: {e}") }))
            .collect::<Result<_>>()?;
        if vals.len() != 4 {
            return Err(Error::Parse { line, message: format!("window needs 4 numbers, got {}", vals.len()) });
        }
        Self::new(vals[0], vals[1], vals[2], vals[3])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPattern {
    points: Vec<[f64; 2]>,
    window: Window,
    /// Free-form `key: value` header lines.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metadata: Vec<(String, String)>,
}

impl PointPattern {
    pub fn new(points: Vec<[f64; 2]>, window: Window) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !window.contains(**p)) {
            return domain(format!("point {p:?} lies outside the window {window:?}"));
        }
        Ok(Self { points, window, metadata: Vec::new() })
    }

    pub fn empty(window: Window) -> Self {
        Self { points: Vec::new(), window, metadata: Vec::new() }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `n / |W|`.
    pub fn intensity(&self) -> f64 {
        self.points.len() as f64 / self.window.area()
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.push((key.to_string(), value.into()));
        self
    }

    /// Multiplies every coordinate, and the window, by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let window = self.window.scaled(s)?;
        let points = self.points.iter().map(|p| [p[0] * s, p[1] * s]).collect();
        Ok(Self { points, window, metadata: self.metadata.clone() })
    }

    /// Translates points and window by `shift`.
    pub fn translated(&self, shift: [f64; 2]) -> Result<Self> {
        let w = &self.window;
        let window = Window::new(w.x_min + shift[0], w.x_max + shift[0], w.y_min + shift[1], w.y_max + shift[1])?;
        let points = self.points.iter().map(|p| [p[0] + shift[0], p[1] + shift[1]]).collect();
        Ok(Self { points, window, metadata: self.metadata.clone() })
    }

    pub fn to_csv(&self) -> String {
        let w = &self.window;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# window: {},{},{},{}",
            format_number(w.x_min),
            format_number(w.x_max),
            format_number(w.y_min),
            format_number(w.y_max)
        );
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str("x,y\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", format_number(p[0]), format_number(p[1]));
        }
        out
    }

    /// Parses the CSV layout described in the module docs. `sidecar_window`
    /// is used when the text has no `# window:` line.
    pub fn from_csv(text: &str, sidecar_window: Option<Window>) -> Result<Self> {
        let mut window = None;
        let mut metadata = Vec::new();
        let mut points = Vec::new();
        let mut header_seen = false;
        let mut any_content = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            any_content = true;
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once(':') {
                    let (key, value) = (key.trim(), value.trim());
                    if key == "window" {
                        window = Some(Window::parse(value, line_no)?);
                    } else {
                        metadata.push((key.to_string(), value.to_string()));
                    }
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if !header_seen && fields.first().is_some_and(|f| f.parse::<f64>().is_err()) {
                if fields.len() < 2 || !fields[0].eq_ignore_ascii_case("x") || !fields[1].eq_ignore_ascii_case("y") {
                    return Err(Error::Parse { line: line_no, message: format!("expected header x,y, got {line:?}") });
                }
                header_seen = true;
                continue;
            }
            if fields.len() != 2 {
                return Err(Error::Parse { line: line_no, message: format!("expected 2 columns, got {}", fields.len()) });
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse { line: line_no, message: format!("bad coordinate {s:?}") })
            };
            points.push([parse(fields[0])?, parse(fields[1])?]);
        }
        if !any_content {
            return Err(Error::Parse { line: 0, message: "empty file".into() });
        }
        let window = window
            .or(sidecar_window)
            .ok_or_else(|| Error::Parse { line: 0, message: "no window declaration".into() })?;
        let mut pattern = Self::new(points, window)?;
        pattern.metadata = metadata;
        Ok(pattern)
    }
}

/// Reads a pattern CSV, falling back to a `<path>.window` sidecar.
pub fn load_pattern(path: impl AsRef<Path>) -> Result<PointPattern> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut sidecar_path = path.as_os_str().to_owned();
    sidecar_path.push(".window");
    let sidecar = match std::fs::read_to_string(&sidecar_path) {
        Ok(s) => Some(Window::parse(s.trim(), 1)?),
        Err(_) => None,
    };
    PointPattern::from_csv(&text, sidecar)
}
