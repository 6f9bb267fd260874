//! Plain-text portable graymap export of a heuristic field.

use std::fmt::Write;

use vstar::HeuristicField;

/// `P2` image, top row first. Darker is closer to the goal; unreachable cells
/// are white.
pub fn field_to_pgm(field: &HeuristicField) -> String {
    let max = field.max_finite().max(1e-9);
    let mut out = format!("P2\n{} {}\n255\n", field.width, field.height);
    for iy in (0..field.height).rev() {
        for ix in 0..field.width {
            let v = field.get(ix, iy);
            let g = if v.is_finite() {
                (230.0 * v / max).round() as u8
            } else {
                255
            };
            if ix > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{g}");
        }
        out.push('\n');
    }
    out
}
