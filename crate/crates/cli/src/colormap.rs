//! Per-point colours for scalar fields.

use crate::args::Colormap;

/// Linear min-max normalization to `[0, 1]`. A constant field maps to 0.5.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    // Round-off noise on a constant mode must not be stretched to full range.
    let scale = lo.abs().max(hi.abs());
    if span.is_nan() || span <= 1e-12 * scale {
        return vec![0.5; values.len()];
    }
    values
        .iter()
        .map(|v| ((v - lo) / span).clamp(0.0, 1.0))
        .collect()
}

fn channel(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Colour at position `s` in `[0, 1]`.
pub fn color(map: Colormap, s: f64) -> [u8; 3] {
    match map {
        Colormap::Bwr => {
            if s < 0.5 {
                let w = 2.0 * s;
                [channel(w), channel(w), 255]
            } else {
                let w = 2.0 - 2.0 * s;
                [255, channel(w), channel(w)]
            }
        }
        Colormap::Gray => [channel(s); 3],
    }
}

pub fn colorize(map: Colormap, values: &[f64]) -> Vec<[u8; 3]> {
    normalize(values)
        .into_iter()
        .map(|s| color(map, s))
        .collect()
}
