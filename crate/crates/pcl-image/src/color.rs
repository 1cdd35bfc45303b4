use crate::{ImageBuffer, ImageError, LumaPlane, Result};

/// ITU-R BT.601 studio-swing luma coefficients (rgb2ycbcr convention).
const KR: f64 = 65.481;
const KG: f64 = 128.553;
const KB: f64 = 24.966;
const OFFSET: f64 = 16.0;

/// Converts an RGB image to its Y (luma) plane.
///
/// Y = (16 + 65.481 R + 128.553 G + 24.966 B) / 255 with R, G, B in [0, 1],
/// the studio-swing BT.601 mapping used throughout the SR benchmark
/// literature. Output is clamped to [0, 1].
pub fn rgb_to_luma(img: &ImageBuffer) -> Result<LumaPlane> {
    if img.channels() != 3 {
        return Err(ImageError::NotRgb(img.channels()));
    }
    let r = img.plane(0);
    let g = img.plane(1);
    let b = img.plane(2);
    let data: Vec<f64> = (0..r.len())
        .map(|i| ((OFFSET + KR * r[i] + KG * g[i] + KB * b[i]) / 255.0).clamp(0.0, 1.0))
        .collect();
    LumaPlane::from_data(img.width(), img.height(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_maps_to_235() {
        let img = ImageBuffer::constant(2, 2, 3, 1.0).unwrap();
        let y = rgb_to_luma(&img).unwrap();
        for &v in y.data() {
            assert!((v - 235.0 / 255.0).abs() < 1e-12);
        }
    }

    #[test]
    fn black_maps_to_16() {
        let img = ImageBuffer::constant(2, 2, 3, 0.0).unwrap();
        let y = rgb_to_luma(&img).unwrap();
        for &v in y.data() {
            assert!((v - 16.0 / 255.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_scalar_formula_oracle() {
        let mut data = Vec::new();
        for i in 0..(5 * 4 * 3) {
            data.push(((i * 89 + 13) % 97) as f64 / 96.0);
        }
        let img = ImageBuffer::from_data(5, 4, 3, data).unwrap();
        let y = rgb_to_luma(&img).unwrap();
        for yy in 0..4 {
            for xx in 0..5 {
                let (r, g, b) = (img.get(xx, yy, 0), img.get(xx, yy, 1), img.get(xx, yy, 2));
                let expect = (16.0 + 65.481 * r + 128.553 * g + 24.966 * b) / 255.0;
                assert!((y.get(xx, yy) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_single_channel_input() {
        let img = ImageBuffer::constant(2, 2, 1, 0.5).unwrap();
        assert!(matches!(rgb_to_luma(&img), Err(ImageError::NotRgb(1))));
    }
}
