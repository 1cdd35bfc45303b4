use crate::{ImageError, Result};

/// Read-only view of a planar pixel grid.
///
/// Implemented by [`ImageBuffer`], [`LumaPlane`] and [`PlaneRef`] so that
/// shape-generic numeric code (losses, gradients) can accept any of them.
/// Samples are stored planar: channel-major, then row-major within a channel.
pub trait Grid {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn channels(&self) -> usize;
    fn samples(&self) -> &[f64];

    fn same_shape(&self, other: &impl Grid) -> bool {
        self.width() == other.width()
            && self.height() == other.height()
            && self.channels() == other.channels()
    }
}

/// Planar multi-channel image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageBuffer {
    /// Builds a buffer from planar data, validating shape and value range.
    pub fn from_data(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ImageError::BadDimensions(format!("{width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(ImageError::BadChannelCount(channels));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(ImageError::BadDataLength {
                got: data.len(),
                expected,
            });
        }
        for (index, &value) in data.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ImageError::OutOfRange { index, value });
            }
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn constant(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Self::from_data(
            width,
            height,
            channels,
            vec![value; width * height * channels],
        )
    }

    pub fn from_luma(plane: LumaPlane) -> Self {
        Self {
            width: plane.width,
            height: plane.height,
            channels: 1,
            data: plane.data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Samples of one channel plane, row-major.
    pub fn plane(&self, channel: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[channel * n..(channel + 1) * n]
    }

    pub fn get(&self, x: usize, y: usize, channel: usize) -> f64 {
        self.data[channel * self.width * self.height + y * self.width + x]
    }

    /// Crops to `(target_w, target_h)` centered, offsets rounded down.
    pub fn center_crop(&self, target_w: usize, target_h: usize) -> Result<Self> {
        if target_w == 0 || target_h == 0 || target_w > self.width || target_h > self.height {
            return Err(ImageError::BadDimensions(format!(
                "cannot center-crop {}x{} to {target_w}x{target_h}",
                self.width, self.height
            )));
        }
        let x0 = (self.width - target_w) / 2;
        let y0 = (self.height - target_h) / 2;
        let mut data = Vec::with_capacity(target_w * target_h * self.channels);
        for c in 0..self.channels {
            let plane = self.plane(c);
            for y in 0..target_h {
                let row = (y + y0) * self.width + x0;
                data.extend_from_slice(&plane[row..row + target_w]);
            }
        }
        Ok(Self {
            width: target_w,
            height: target_h,
            channels: self.channels,
            data,
        })
    }

    /// Removes `n` pixels from every side; interior samples are bit-identical.
    pub fn crop_border(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Ok(self.clone());
        }
        check_crop(n, self.width, self.height)?;
        let (w, h) = (self.width - 2 * n, self.height - 2 * n);
        let mut data = Vec::with_capacity(w * h * self.channels);
        for c in 0..self.channels {
            let plane = self.plane(c);
            for y in 0..h {
                let row = (y + n) * self.width + n;
                data.extend_from_slice(&plane[row..row + w]);
            }
        }
        Ok(Self {
            width: w,
            height: h,
            channels: self.channels,
            data,
        })
    }
}

impl Grid for ImageBuffer {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn channels(&self) -> usize {
        self.channels
    }
    fn samples(&self) -> &[f64] {
        &self.data
    }
}

/// Single-channel luma plane with values in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LumaPlane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl LumaPlane {
    pub fn from_data(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        let img = ImageBuffer::from_data(width, height, 1, data)?;
        Ok(Self {
            width: img.width,
            height: img.height,
            data: img.data,
        })
    }

    /// Reinterprets a single-channel image as a luma plane.
    pub fn from_image(img: &ImageBuffer) -> Result<Self> {
        if img.channels() != 1 {
            return Err(ImageError::BadChannelCount(img.channels()));
        }
        Ok(Self {
            width: img.width,
            height: img.height,
            data: img.data.clone(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn crop_border(&self, n: usize) -> Result<Self> {
        let img = ImageBuffer {
            width: self.width,
            height: self.height,
            channels: 1,
            data: self.data.clone(),
        };
        let cropped = img.crop_border(n)?;
        Ok(Self {
            width: cropped.width,
            height: cropped.height,
            data: cropped.data,
        })
    }
}

impl Grid for LumaPlane {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn channels(&self) -> usize {
        1
    }
    fn samples(&self) -> &[f64] {
        &self.data
    }
}

/// Borrowed planar grid without the `[0, 1]` range restriction.
///
/// Useful for algebraic identities and gradient checks on arbitrary real
/// data; only the shape is validated.
#[derive(Debug, Clone, Copy)]
pub struct PlaneRef<'a> {
    width: usize,
    height: usize,
    channels: usize,
    data: &'a [f64],
}

impl<'a> PlaneRef<'a> {
    pub fn new(width: usize, height: usize, channels: usize, data: &'a [f64]) -> Result<Self> {
        if width == 0 || height == 0 || channels == 0 {
            return Err(ImageError::BadDimensions(format!(
                "{width}x{height}x{channels}"
            )));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(ImageError::BadDataLength {
                got: data.len(),
                expected,
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }
}

impl Grid for PlaneRef<'_> {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn channels(&self) -> usize {
        self.channels
    }
    fn samples(&self) -> &[f64] {
        self.data
    }
}

fn check_crop(n: usize, width: usize, height: usize) -> Result<()> {
    if 2 * n >= width.min(height) {
        return Err(ImageError::CropTooLarge { n, width, height });
    }
    Ok(())
}

/// Channel convention for benchmark evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelMode {
    /// Metrics on the Y channel of YCbCr converted from RGB.
    #[default]
    Luma,
    /// Metrics on RGB channels directly.
    Rgb,
}

/// Evaluation protocol: upscaling factor, border discard, channel convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalProtocol {
    pub scale: usize,
    pub border_discard: usize,
    pub channel_mode: ChannelMode,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        Self {
            scale: 4,
            border_discard: 4,
            channel_mode: ChannelMode::Luma,
        }
    }
}

impl EvalProtocol {
    pub fn new(scale: usize, border_discard: usize, channel_mode: ChannelMode) -> Result<Self> {
        if scale == 0 {
            return Err(ImageError::BadDimensions("scale must be positive".into()));
        }
        Ok(Self {
            scale,
            border_discard,
            channel_mode,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_samples() {
        let err = ImageBuffer::from_data(2, 1, 1, vec![0.5, 1.5]).unwrap_err();
        assert!(matches!(err, ImageError::OutOfRange { index: 1, .. }));
        let err = ImageBuffer::from_data(1, 1, 1, vec![f64::NAN]).unwrap_err();
        assert!(matches!(err, ImageError::OutOfRange { .. }));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ImageBuffer::from_data(0, 4, 1, vec![]).is_err());
        assert!(ImageBuffer::from_data(2, 2, 2, vec![0.0; 8]).is_err());
        assert!(ImageBuffer::from_data(2, 2, 1, vec![0.0; 5]).is_err());
    }

    #[test]
    fn crop_zero_is_identity() {
        let img = ImageBuffer::from_data(3, 2, 1, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert_eq!(img.crop_border(0).unwrap(), img);
    }

    #[test]
    fn crop_10x10_by_4_keeps_central_2x2() {
        let data: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        let img = ImageBuffer::from_data(10, 10, 1, data.clone()).unwrap();
        let cropped = img.crop_border(4).unwrap();
        assert_eq!((cropped.width(), cropped.height()), (2, 2));
        assert_eq!(
            cropped.data(),
            &[data[44], data[45], data[54], data[55]][..]
        );
    }

    #[test]
    fn crop_too_large_is_rejected() {
        let img = ImageBuffer::constant(8, 8, 1, 0.5).unwrap();
        assert!(matches!(
            img.crop_border(4),
            Err(ImageError::CropTooLarge { .. })
        ));
        // 2n strictly below min(dims): n = 3 on 8x8 leaves a 2x2 interior.
        assert!(img.crop_border(3).is_ok());
    }

    #[test]
    fn crop_matches_index_arithmetic() {
        // Index oracle: cropped[(x, y, c)] must equal source[(x + n, y + n, c)].
        let mut data = Vec::new();
        for i in 0..(9 * 7 * 3) {
            data.push(((i * 37) % 101) as f64 / 100.0);
        }
        let img = ImageBuffer::from_data(9, 7, 3, data).unwrap();
        let n = 2;
        let cropped = img.crop_border(n).unwrap();
        for c in 0..3 {
            for y in 0..cropped.height() {
                for x in 0..cropped.width() {
                    assert_eq!(cropped.get(x, y, c), img.get(x + n, y + n, c));
                }
            }
        }
    }

    #[test]
    fn center_crop_keeps_the_middle() {
        let data: Vec<f64> = (0..30).map(|i| i as f64 / 29.0).collect();
        let img = ImageBuffer::from_data(6, 5, 1, data).unwrap();
        let c = img.center_crop(4, 4).unwrap();
        assert_eq!((c.width(), c.height()), (4, 4));
        // offsets floor((6-4)/2) = 1, floor((5-4)/2) = 0
        for y in 0..4 {
            for x in 0..4 {
                assert_eq!(c.get(x, y, 0), img.get(x + 1, y, 0));
            }
        }
        assert!(img.center_crop(7, 2).is_err());
        assert!(img.center_crop(0, 2).is_err());
    }

    #[test]
    fn protocol_default_matches_benchmark_convention() {
        let p = EvalProtocol::default();
        assert_eq!(p.scale, 4);
        assert_eq!(p.border_discard, 4);
        assert_eq!(p.channel_mode, ChannelMode::Luma);
    }
}
