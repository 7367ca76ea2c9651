use crate::geometry::Box2D;

/// Mapping from image pixels to the square descriptor input snippet.
///
/// The longer crop edge maps exactly onto `out_size`; the shorter axis is
/// centered with zero padding beside it, split equally with the extra pixel
/// on the trailing side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnippetSpec {
    pub crop: Box2D,
    /// Pixels-to-snippet scale factor.
    pub scale: f64,
    /// Snippet-pixel offsets of the crop content (left, top).
    pub pad: (f64, f64),
    pub out_size: u32,
}

impl SnippetSpec {
    pub fn new(crop: Box2D, out_size: u32) -> Self {
        assert!(out_size >= 1, "snippet size must be at least 1");
        let (w, h) = (crop.width(), crop.height());
        let out = out_size as f64;
        let scale = out / w.max(h);
        let pad = if w >= h {
            (0.0, ((out - h * scale) / 2.0).floor())
        } else {
            (((out - w * scale) / 2.0).floor(), 0.0)
        };
        Self {
            crop,
            scale,
            pad,
            out_size,
        }
    }

    /// Image pixel -> snippet pixel.
    pub fn apply(&self, u: f64, v: f64) -> (f64, f64) {
        (
            (u - self.crop.u_min) * self.scale + self.pad.0,
            (v - self.crop.v_min) * self.scale + self.pad.1,
        )
    }

    /// Snippet pixel -> image pixel.
    pub fn invert(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.pad.0) / self.scale + self.crop.u_min,
            (y - self.pad.1) / self.scale + self.crop.v_min,
        )
    }
}
