//! Surface export: CSV grids and plain-text pixmaps.

use crate::error::{Error, Result};
use crate::evaluator::ValueSurface;

/// Six significant digits, scientific notation.
pub fn format_sig(v: f64) -> String {
    format!("{v:.5e}")
}

/// CSV rendering: ny rows of nx comma-separated values, row 0 at minimum y.
pub fn surface_to_csv(surface: &ValueSurface) -> Result<String> {
    ensure_finite(surface)?;
    let nx = surface.grid.nx;
    let mut out = String::new();
    for row in surface.values.chunks(nx) {
        let line: Vec<String> = row.iter().map(|v| format_sig(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Parse a CSV produced by `surface_to_csv` back into row-major values.
pub fn parse_surface_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::invalid_format(format!("bad csv value {tok:?}")))
                })
                .collect()
        })
        .collect()
}

/// P3 pixmap rendering, one pixel per cell, top row at maximum y. Values map
/// linearly onto a black-red-yellow-white ramp against `max` (the surface
/// maximum when not given).
pub fn surface_to_ppm(surface: &ValueSurface, max: Option<f64>) -> Result<String> {
    ensure_finite(surface)?;
    let nx = surface.grid.nx;
    let ny = surface.grid.ny;
    let peak = max.unwrap_or_else(|| surface.values.iter().cloned().fold(0.0, f64::max));
    let mut out = format!("P3\n{nx} {ny}\n255\n");
    for row in (0..ny).rev() {
        let mut line = Vec::with_capacity(nx);
        for col in 0..nx {
            let v = surface.values[row * nx + col];
            let scaled = if peak > 0.0 { (v / peak).clamp(0.0, 1.0) } else { 0.0 };
            let (r, g, b) = heat_color(scaled);
            line.push(format!("{r} {g} {b}"));
        }
        out.push_str(&line.join("  "));
        out.push('\n');
    }
    Ok(out)
}

fn heat_color(v: f64) -> (u8, u8, u8) {
    let ramp = |t: f64| (t.clamp(0.0, 1.0) * 255.0).round() as u8;
    if v < 1.0 / 3.0 {
        (ramp(3.0 * v), 0, 0)
    } else if v < 2.0 / 3.0 {
        (255, ramp(3.0 * v - 1.0), 0)
    } else {
        (255, 255, ramp(3.0 * v - 2.0))
    }
}

fn ensure_finite(surface: &ValueSurface) -> Result<()> {
    if surface.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid_argument(
            "surface contains non-finite values",
        ));
    }
    Ok(())
}
