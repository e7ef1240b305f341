//! RGGB Bayer sampling and two demosaicing methods.

use super::filters::{correlate2d, Boundary};
use crate::imgcore::PlanarImage;

/// Color index (0 R, 1 G, 2 B) sampled at `(x, y)` by an RGGB mosaic.
#[inline]
pub fn cfa_color(x: usize, y: usize) -> usize {
    match (y % 2, x % 2) {
        (0, 0) => 0,
        (1, 1) => 2,
        _ => 1,
    }
}

/// Keeps one channel per pixel following the RGGB layout.
pub fn mosaic(img: &PlanarImage) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = img.get(cfa_color(x, y), x, y);
        }
    }
    out
}

const G_AT_RB: [f64; 25] = [
    0.0, 0.0, -1.0, 0.0, 0.0, //
    0.0, 0.0, 2.0, 0.0, 0.0, //
    -1.0, 2.0, 4.0, 2.0, -1.0, //
    0.0, 0.0, 2.0, 0.0, 0.0, //
    0.0, 0.0, -1.0, 0.0, 0.0,
];
/// Missing color at green, when that color's neighbours lie left and right.
const C_AT_G_ROW: [f64; 25] = [
    0.0, 0.0, 0.5, 0.0, 0.0, //
    0.0, -1.0, 0.0, -1.0, 0.0, //
    -1.0, 4.0, 5.0, 4.0, -1.0, //
    0.0, -1.0, 0.0, -1.0, 0.0, //
    0.0, 0.0, 0.5, 0.0, 0.0,
];
/// Missing color at green, when that color's neighbours lie above and below.
const C_AT_G_COL: [f64; 25] = [
    0.0, 0.0, -1.0, 0.0, 0.0, //
    0.0, -1.0, 4.0, -1.0, 0.0, //
    0.5, 0.0, 5.0, 0.0, 0.5, //
    0.0, -1.0, 4.0, -1.0, 0.0, //
    0.0, 0.0, -1.0, 0.0, 0.0,
];
/// Red at blue or blue at red.
const C_AT_OPPOSITE: [f64; 25] = [
    0.0, 0.0, -1.5, 0.0, 0.0, //
    0.0, 2.0, 0.0, 2.0, 0.0, //
    -1.5, 0.0, 6.0, 0.0, -1.5, //
    0.0, 2.0, 0.0, 2.0, 0.0, //
    0.0, 0.0, -1.5, 0.0, 0.0,
];

/// Gradient-corrected linear interpolation with the 5x5 Malvar-He-Cutler kernels.
pub fn demosaic_malvar(cfa: &[f64], w: usize, h: usize, mode: Boundary) -> PlanarImage {
    let scaled = |k: &[f64; 25]| -> Vec<f64> { k.iter().map(|v| v / 8.0).collect() };
    let g_rb = correlate2d(cfa, w, h, &scaled(&G_AT_RB), 5, mode);
    let g_row = correlate2d(cfa, w, h, &scaled(&C_AT_G_ROW), 5, mode);
    let g_col = correlate2d(cfa, w, h, &scaled(&C_AT_G_COL), 5, mode);
    let opp = correlate2d(cfa, w, h, &scaled(&C_AT_OPPOSITE), 5, mode);
    let mut planes = vec![vec![0.0; w * h]; 3];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let (r, g, b) = match (y % 2, x % 2) {
                (0, 0) => (cfa[i], g_rb[i], opp[i]),
                (1, 1) => (opp[i], g_rb[i], cfa[i]),
                // green in a red row: red left/right, blue above/below
                (0, 1) => (g_row[i], cfa[i], g_col[i]),
                _ => (g_col[i], cfa[i], g_row[i]),
            };
            planes[0][i] = r;
            planes[1][i] = g;
            planes[2][i] = b;
        }
    }
    PlanarImage::from_planes(w, h, planes).expect("three planes of w*h")
}

/// Edge-directed interpolation: green along the direction of the smaller
/// gradient with a second-order correction, then red and blue from
/// interpolated color differences.
pub fn demosaic_gradient(cfa: &[f64], w: usize, h: usize, mode: Boundary) -> PlanarImage {
    let at = |x: isize, y: isize| cfa[mode.index(y, h) * w + mode.index(x, w)];
    let mut green = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if cfa_color(x, y) == 1 {
                green[i] = cfa[i];
                continue;
            }
            let (xi, yi) = (x as isize, y as isize);
            let c = at(xi, yi);
            let lap_h = 2.0 * c - at(xi - 2, yi) - at(xi + 2, yi);
            let lap_v = 2.0 * c - at(xi, yi - 2) - at(xi, yi + 2);
            let grad_h = (at(xi - 1, yi) - at(xi + 1, yi)).abs() + lap_h.abs();
            let grad_v = (at(xi, yi - 1) - at(xi, yi + 1)).abs() + lap_v.abs();
            let est_h = 0.5 * (at(xi - 1, yi) + at(xi + 1, yi)) + 0.25 * lap_h;
            let est_v = 0.5 * (at(xi, yi - 1) + at(xi, yi + 1)) + 0.25 * lap_v;
            green[i] = if grad_h < grad_v {
                est_h
            } else if grad_v < grad_h {
                est_v
            } else {
                0.5 * (est_h + est_v)
            };
        }
    }
    let g_at = |x: isize, y: isize| green[mode.index(y, h) * w + mode.index(x, w)];
    // color difference (C - G) at a site that samples C
    let diff = |x: isize, y: isize| at(x, y) - g_at(x, y);
    let mut planes = vec![vec![0.0; w * h]; 3];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let (xi, yi) = (x as isize, y as isize);
            let g = green[i];
            let here = cfa_color(x, y);
            let mut rgb = [0.0; 3];
            rgb[1] = g;
            for c in [0usize, 2] {
                rgb[c] = if here == c {
                    cfa[i]
                } else if here == 1 {
                    // neighbours of color c lie left/right in its own rows, else above/below
                    let horizontal = (c == 0) == (y % 2 == 0);
                    if horizontal {
                        g + 0.5 * (diff(xi - 1, yi) + diff(xi + 1, yi))
                    } else {
                        g + 0.5 * (diff(xi, yi - 1) + diff(xi, yi + 1))
                    }
                } else {
                    let d1 = (diff(xi - 1, yi - 1) - diff(xi + 1, yi + 1)).abs();
                    let d2 = (diff(xi + 1, yi - 1) - diff(xi - 1, yi + 1)).abs();
                    let m1 = 0.5 * (diff(xi - 1, yi - 1) + diff(xi + 1, yi + 1));
                    let m2 = 0.5 * (diff(xi + 1, yi - 1) + diff(xi - 1, yi + 1));
                    g + if d1 < d2 {
                        m1
                    } else if d2 < d1 {
                        m2
                    } else {
                        0.5 * (m1 + m2)
                    }
                };
            }
            for c in 0..3 {
                planes[c][i] = rgb[c];
            }
        }
    }
    PlanarImage::from_planes(w, h, planes).expect("three planes of w*h")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn color_ramp(w: usize, h: usize) -> PlanarImage {
        let planes = (0..3)
            .map(|c| {
                (0..w * h)
                    .map(|i| 0.2 + 0.1 * c as f64 + 0.01 * (i % w) as f64 + 0.005 * (i / w) as f64)
                    .collect()
            })
            .collect();
        PlanarImage::from_planes(w, h, planes).unwrap()
    }

    #[test]
    fn layout_is_rggb() {
        assert_eq!(cfa_color(0, 0), 0);
        assert_eq!(cfa_color(1, 0), 1);
        assert_eq!(cfa_color(0, 1), 1);
        assert_eq!(cfa_color(1, 1), 2);
    }

    #[test]
    fn kernels_sum_to_eight() {
        for k in [G_AT_RB, C_AT_G_ROW, C_AT_G_COL, C_AT_OPPOSITE] {
            assert!((k.iter().sum::<f64>() - 8.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_gray_is_reconstructed() {
        let img = PlanarImage::filled(16, 16, 3, 0.37).unwrap();
        let cfa = mosaic(&img);
        for out in [
            demosaic_malvar(&cfa, 16, 16, Boundary::Reflect),
            demosaic_gradient(&cfa, 16, 16, Boundary::Reflect),
        ] {
            assert!(out.data().iter().all(|v| (v - 0.37).abs() < 1e-12));
        }
    }

    #[test]
    fn linear_ramps_are_reconstructed_in_the_interior() {
        let (w, h) = (24, 20);
        let img = color_ramp(w, h);
        let cfa = mosaic(&img);
        for out in [
            demosaic_malvar(&cfa, w, h, Boundary::Reflect),
            demosaic_gradient(&cfa, w, h, Boundary::Reflect),
        ] {
            for c in 0..3 {
                for y in 3..h - 3 {
                    for x in 3..w - 3 {
                        assert!((out.get(c, x, y) - img.get(c, x, y)).abs() < 1e-9, "c{c} ({x},{y})");
                    }
                }
            }
        }
    }

    #[test]
    fn samples_are_kept_at_their_sites() {
        let img = color_ramp(8, 8);
        let cfa = mosaic(&img);
        let out = demosaic_malvar(&cfa, 8, 8, Boundary::Reflect);
        for y in 0..8 {
            for x in 0..8 {
                assert_eq!(out.get(cfa_color(x, y), x, y), cfa[y * 8 + x]);
            }
        }
    }
}
