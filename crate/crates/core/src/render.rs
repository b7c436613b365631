//! Minimal raster output: hexmaps, image sheets and grouped bar charts,
//! written as binary PPM.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::HexGrid;

pub type Rgb = [u8; 3];

pub const BACKGROUND: Rgb = [0, 0, 0];
const AXIS: Rgb = [200, 200, 200];
const GUIDE: Rgb = [60, 60, 60];

/// Bar colours, one per series.
pub const SERIES: [Rgb; 4] = [[230, 159, 0], [86, 180, 233], [0, 158, 115], [204, 121, 167]];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        Self { width, height, pixels: vec![fill; width * height] }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, c: Rgb) {
        if x < self.width && y < self.height {
            self.pixels[y * self.width + x] = c;
        }
    }

    pub fn fill_rect(&mut self, x0: usize, y0: usize, w: usize, h: usize, c: Rgb) {
        for y in y0..(y0 + h).min(self.height) {
            for x in x0..(x0 + w).min(self.width) {
                self.pixels[y * self.width + x] = c;
            }
        }
    }

    pub fn blit(&mut self, src: &Image, x0: usize, y0: usize) {
        for y in 0..src.height {
            for x in 0..src.width {
                self.set(x0 + x, y0 + y, src.get(x, y));
            }
        }
    }

    /// Binary PPM with the digest in a header comment.
    pub fn to_ppm(&self, digest: &str) -> Vec<u8> {
        let mut out = format!("P6\n# digest {digest}\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    pub fn write_ppm(&self, path: &Path, digest: &str) -> Result<()> {
        let ctx = || path.display().to_string();
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(ctx(), e))?;
        f.write_all(&self.to_ppm(digest)).map_err(|e| Error::io(ctx(), e))
    }
}

/// Perceptually ordered dark-to-bright colour ramp on `[0, 1]`.
pub fn colormap(t: f64) -> Rgb {
    const STOPS: [Rgb; 5] = [[13, 8, 135], [126, 3, 168], [204, 71, 120], [248, 149, 64], [240, 249, 33]];
    if t.is_nan() || t <= 0.0 {
        return BACKGROUND;
    }
    let t = t.min(1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |k: usize| (a[k] as f64 + f * (b[k] as f64 - a[k] as f64)).round() as u8;
    [mix(0), mix(1), mix(2)]
}

/// Colours every pixel by the value of the bin nearest to it, so bins appear
/// as hexagons. Values are divided by `scale`; zero and negative values are
/// drawn as background. The image is `grid_nx·px` by `grid_ny·px`, with the
/// arena's +y axis pointing up.
pub fn render_hexmap(values: &[f64], grid: &HexGrid, px: usize, scale: f64) -> Image {
    assert_eq!(values.len(), grid.len());
    let (w, h) = (grid.nx * px, grid.ny * px);
    let b = grid.bounds();
    let mut img = Image::new(w, h, BACKGROUND);
    for py in 0..h {
        let y = b.max.y - (py as f64 + 0.5) / h as f64 * (b.max.y - b.min.y);
        for pxi in 0..w {
            let x = b.min.x + (pxi as f64 + 0.5) / w as f64 * (b.max.x - b.min.x);
            let v = values[grid.bin_of(x, y)];
            let t = if scale > 0.0 { v / scale } else { 0.0 };
            img.pixels[py * w + pxi] = colormap(t);
        }
    }
    img
}

/// Tiles equally sized images row by row with `gap` pixels between them.
pub fn sheet(tiles: &[Image], cols: usize, gap: usize) -> Image {
    assert!(!tiles.is_empty() && cols > 0);
    let (tw, th) = (tiles[0].width, tiles[0].height);
    let rows = tiles.len().div_ceil(cols);
    let mut img = Image::new(cols * tw + (cols + 1) * gap, rows * th + (rows + 1) * gap, GUIDE);
    for (k, t) in tiles.iter().enumerate() {
        assert_eq!((t.width, t.height), (tw, th), "sheet tiles must share a size");
        let (r, c) = (k / cols, k % cols);
        img.blit(t, gap + c * (tw + gap), gap + r * (th + gap));
    }
    img
}

/// Grouped bar chart: one group per row of `values`, one bar per column,
/// coloured by [`SERIES`]. Bars are scaled so `y_max` reaches the top; faint
/// guides mark quarters of `y_max`.
pub fn bar_chart(values: &[Vec<f64>], y_max: f64) -> Image {
    const BAR: usize = 24;
    const GROUP_GAP: usize = 32;
    const MARGIN: usize = 20;
    const PLOT_H: usize = 240;
    let series = values.iter().map(Vec::len).max().unwrap_or(0);
    let group_w = series * BAR + GROUP_GAP;
    let width = 2 * MARGIN + values.len() * group_w;
    let height = PLOT_H + 2 * MARGIN;
    let mut img = Image::new(width, height, BACKGROUND);
    let base = MARGIN + PLOT_H;
    for q in 1..=4 {
        let y = base - q * PLOT_H / 4;
        img.fill_rect(MARGIN, y, width - 2 * MARGIN, 1, GUIDE);
    }
    for (g, group) in values.iter().enumerate() {
        for (s, &v) in group.iter().enumerate() {
            let frac = if y_max > 0.0 { (v / y_max).clamp(0.0, 1.0) } else { 0.0 };
            let h = (frac * PLOT_H as f64).round() as usize;
            let x = MARGIN + GROUP_GAP / 2 + g * group_w + s * BAR;
            img.fill_rect(x + 2, base - h, BAR - 4, h, SERIES[s % SERIES.len()]);
        }
    }
    img.fill_rect(MARGIN, base, width - 2 * MARGIN, 1, AXIS);
    img.fill_rect(MARGIN, MARGIN, 1, PLOT_H, AXIS);
    img
}
