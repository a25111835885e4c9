//! Bare line plots as PNG: frame, polyline and markers, no labels.

use std::path::Path;

use image::{ImageError, Rgb, RgbImage};

const W: u32 = 640;
const H: u32 = 420;
const MARGIN: u32 = 30;

fn line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        if x >= 0 && y >= 0 && (x as u32) < W && (y as u32) < H {
            img.put_pixel(x as u32, y as u32, c);
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Plots `ys` against `xs`, autoscaled, with a dashed reference level when given.
pub fn line_plot(path: &Path, xs: &[f64], ys: &[f64], reference: Option<f64>) -> Result<(), ImageError> {
    let mut img = RgbImage::from_pixel(W, H, Rgb([255, 255, 255]));
    let (x_lo, x_hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let mut y_lo = ys.iter().copied().chain(reference).fold(f64::INFINITY, f64::min);
    let mut y_hi = ys.iter().copied().chain(reference).fold(f64::NEG_INFINITY, f64::max);
    if !(y_hi > y_lo) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let pad = 0.05 * (y_hi - y_lo);
    let (y_lo, y_hi) = (y_lo - pad, y_hi + pad);
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let px = |x: f64| (MARGIN as f64 + (x - x_lo) / x_span * (W - 2 * MARGIN) as f64).round() as i64;
    let py = |y: f64| (H as f64 - MARGIN as f64 - (y - y_lo) / (y_hi - y_lo) * (H - 2 * MARGIN) as f64).round() as i64;
    let grey = Rgb([120, 120, 120]);
    let (l, r, t, b) = (MARGIN as i64, (W - MARGIN) as i64, MARGIN as i64, (H - MARGIN) as i64);
    for (p, q) in [((l, t), (r, t)), ((r, t), (r, b)), ((r, b), (l, b)), ((l, b), (l, t))] {
        line(&mut img, p, q, grey);
    }
    if let Some(level) = reference {
        let y = py(level);
        let mut x = l;
        while x < r {
            line(&mut img, (x, y), ((x + 6).min(r), y), Rgb([200, 60, 60]));
            x += 12;
        }
    }
    let blue = Rgb([30, 70, 180]);
    for k in 1..xs.len() {
        line(&mut img, (px(xs[k - 1]), py(ys[k - 1])), (px(xs[k]), py(ys[k])), blue);
    }
    for k in 0..xs.len() {
        let (x, y) = (px(xs[k]), py(ys[k]));
        line(&mut img, (x - 2, y), (x + 2, y), blue);
        line(&mut img, (x, y - 2), (x, y + 2), blue);
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(ImageError::IoError)?;
    }
    img.save(path)
}
