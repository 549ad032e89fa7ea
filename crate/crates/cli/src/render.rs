//! Binary PPM (P6) rasterisation of point sets.

use rifslab_core::{AmbientBox, Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    pub target_error: f64,
    pub fg: [u8; 3],
    pub bg: [u8; 3],
}

impl RenderSpec {
    pub fn new(width: u32, height: u32, target_error: f64) -> Self {
        RenderSpec {
            width,
            height,
            target_error,
            fg: [0, 0, 0],
            bg: [255, 255, 255],
        }
    }
}

/// Pixel `(column, row)` holding `p`; row 0 is the top of the box.
pub fn pixel_of(p: Point, ambient: &AmbientBox, width: u32, height: u32) -> (u32, u32) {
    let b = ambient.bounds();
    let cell = |u: f64, n: u32| ((u * n as f64).floor().max(0.0) as u32).min(n - 1);
    let col = cell((p[0] - b.lo[0]) / (b.hi[0] - b.lo[0]), width);
    let row = if ambient.dim() == 1 {
        0
    } else {
        cell((b.hi[1] - p[1]) / (b.hi[1] - b.lo[1]), height)
    };
    (col, row)
}

/// Rasterise `points` over `ambient`. Sets on the line are drawn as
/// full-height stripes.
pub fn render_ppm(points: &[Point], ambient: &AmbientBox, spec: &RenderSpec) -> Result<Vec<u8>> {
    let (w, h) = (spec.width, spec.height);
    if w == 0 || h == 0 {
        return Err(Error::Usage(format!("raster size {w}x{h} has no pixels")));
    }
    if points.is_empty() {
        return Err(Error::Usage("nothing to render".into()));
    }
    let mut on = vec![false; w as usize * h as usize];
    for &p in points {
        let (c, r) = pixel_of(p, ambient, w, h);
        if ambient.dim() == 1 {
            for r in 0..h {
                on[(r * w + c) as usize] = true;
            }
        } else {
            on[(r * w + c) as usize] = true;
        }
    }
    let header = format!("P6\n{w} {h}\n255\n");
    let mut out = Vec::with_capacity(header.len() + 3 * on.len());
    out.extend_from_slice(header.as_bytes());
    for px in on {
        out.extend_from_slice(if px { &spec.fg } else { &spec.bg });
    }
    Ok(out)
}

/// Split a P6 image into `(width, height, pixels)`.
pub fn parse_ppm(bytes: &[u8]) -> Option<(u32, u32, &[u8])> {
    let mut fields = Vec::new();
    let mut at = 0;
    while fields.len() < 4 {
        let start = at;
        while at < bytes.len() && !bytes[at].is_ascii_whitespace() {
            at += 1;
        }
        fields.push(std::str::from_utf8(&bytes[start..at]).ok()?);
        at += 1;
    }
    if fields[0] != "P6" || fields[3] != "255" {
        return None;
    }
    let (w, h): (u32, u32) = (fields[1].parse().ok()?, fields[2].parse().ok()?);
    let pixels = bytes.get(at..)?;
    (pixels.len() == 3 * w as usize * h as usize).then_some((w, h, pixels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centre_of_a_three_by_three() {
        let img = render_ppm(
            &[[0.5, 0.5]],
            &AmbientBox::unit(2),
            &RenderSpec::new(3, 3, 0.1),
        )
        .unwrap();
        assert!(img.starts_with(b"P6\n3 3\n255\n"));
        let (_, _, px) = parse_ppm(&img).unwrap();
        let dark: Vec<usize> = (0..9).filter(|i| px[3 * i] == 0).collect();
        assert_eq!(dark, vec![4]);
    }

    #[test]
    fn top_of_the_box_is_row_zero() {
        let sq = AmbientBox::unit(2);
        assert_eq!(pixel_of([0.0, 1.0], &sq, 4, 4), (0, 0));
        assert_eq!(pixel_of([1.0, 0.0], &sq, 4, 4), (3, 3));
    }

    #[test]
    fn empty_raster_is_rejected() {
        let e = render_ppm(
            &[[0.5, 0.0]],
            &AmbientBox::unit(1),
            &RenderSpec::new(0, 1, 0.1),
        );
        assert!(matches!(e, Err(Error::Usage(_))));
    }
}
