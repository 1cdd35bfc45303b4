use std::path::Path;

use image::{DynamicImage, ImageFormat, ImageReader};

use crate::{ImageBuffer, ImageError, Result};

/// Loads an 8- or 16-bit grayscale or RGB PNG into planar `[0, 1]` doubles.
///
/// Alpha channels are dropped. 8-bit samples map as v/255, 16-bit as v/65535.
pub fn load_png(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let reader = ImageReader::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ImageError::Missing(path.to_path_buf()),
        _ => ImageError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    let reader = reader.with_guessed_format().map_err(|e| ImageError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    match reader.format() {
        Some(ImageFormat::Png) => {}
        other => {
            return Err(ImageError::Unsupported {
                path: path.to_path_buf(),
                reason: format!("expected PNG, detected {other:?}"),
            })
        }
    }
    let decoded = reader.decode().map_err(|e| ImageError::Decode {
        path: path.to_path_buf(),
        source: e,
    })?;
    from_dynamic(decoded, path)
}

fn from_dynamic(img: DynamicImage, path: &Path) -> Result<ImageBuffer> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (channels, data): (usize, Vec<f64>) = match img {
        DynamicImage::ImageLuma8(buf) => (1, scale8(buf.as_raw(), 1)),
        DynamicImage::ImageLumaA8(buf) => (1, scale8(buf.as_raw(), 2)),
        DynamicImage::ImageRgb8(buf) => (3, interleaved8_to_planar(buf.as_raw(), w, h, 3, 3)),
        DynamicImage::ImageRgba8(buf) => (3, interleaved8_to_planar(buf.as_raw(), w, h, 4, 3)),
        DynamicImage::ImageLuma16(buf) => (1, scale16(buf.as_raw(), 1)),
        DynamicImage::ImageLumaA16(buf) => (1, scale16(buf.as_raw(), 2)),
        DynamicImage::ImageRgb16(buf) => (3, interleaved16_to_planar(buf.as_raw(), w, h, 3, 3)),
        DynamicImage::ImageRgba16(buf) => (3, interleaved16_to_planar(buf.as_raw(), w, h, 4, 3)),
        other => {
            return Err(ImageError::Unsupported {
                path: path.to_path_buf(),
                reason: format!("unsupported sample layout {:?}", other.color()),
            })
        }
    };
    ImageBuffer::from_data(w, h, channels, data)
}

fn scale8(raw: &[u8], step: usize) -> Vec<f64> {
    raw.iter()
        .step_by(step)
        .map(|&v| v as f64 / 255.0)
        .collect()
}

fn scale16(raw: &[u16], step: usize) -> Vec<f64> {
    raw.iter()
        .step_by(step)
        .map(|&v| v as f64 / 65535.0)
        .collect()
}

fn interleaved8_to_planar(raw: &[u8], w: usize, h: usize, stride: usize, keep: usize) -> Vec<f64> {
    let n = w * h;
    let mut data = vec![0.0; n * keep];
    for i in 0..n {
        for c in 0..keep {
            data[c * n + i] = raw[i * stride + c] as f64 / 255.0;
        }
    }
    data
}

fn interleaved16_to_planar(
    raw: &[u16],
    w: usize,
    h: usize,
    stride: usize,
    keep: usize,
) -> Vec<f64> {
    let n = w * h;
    let mut data = vec![0.0; n * keep];
    for i in 0..n {
        for c in 0..keep {
            data[c * n + i] = raw[i * stride + c] as f64 / 65535.0;
        }
    }
    data
}

/// Quantizes a `[0, 1]` intensity to its 8-bit code: round(v*255), half up.
pub(crate) fn quantize_u8(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Writes an 8-bit PNG. Samples quantize as round(v*255) with clamping.
pub fn save_png(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let channels = img.channels();
    let mut raw = vec![0u8; n * channels];
    for i in 0..n {
        for c in 0..channels {
            raw[i * channels + c] = quantize_u8(img.plane(c)[i]);
        }
    }
    let color = if channels == 1 {
        image::ColorType::L8
    } else {
        image::ColorType::Rgb8
    };
    image::save_buffer_with_format(path, &raw, w as u32, h as u32, color, ImageFormat::Png).map_err(
        |e| match e {
            image::ImageError::IoError(source) => ImageError::Io {
                path: path.to_path_buf(),
                source,
            },
            other => ImageError::Decode {
                path: path.to_path_buf(),
                source: other,
            },
        },
    )
}
