//! Planar image buffers, PNG I/O, color conversion, border cropping, and
//! MATLAB-compatible bicubic resampling.
//!
//! Everything operates on `f64` intensities in `[0, 1]`. All operations are
//! pure functions of their inputs; buffers are immutable after construction
//! and safe to share across threads.

mod buffer;
mod color;
mod error;
mod io;
mod resize;

pub use buffer::{ChannelMode, EvalProtocol, Grid, ImageBuffer, LumaPlane, PlaneRef};
pub use color::rgb_to_luma;
pub use error::ImageError;
pub use io::{load_png, save_png};
pub use resize::{bicubic_resize, cubic_kernel};

pub type Result<T> = std::result::Result<T, ImageError>;
