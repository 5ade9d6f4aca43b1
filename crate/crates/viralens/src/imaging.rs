//! Image decoding into pixel grids.

use image::ImageReader;
use std::io::Cursor;
use viralens_core::vision::PixelGrid;

use crate::error::{Error, Result, Stage};

/// Decodes a PNG or JPEG stream to RGB; transparent pixels are composited
/// over white.
pub fn decode_image(bytes: &[u8]) -> Result<PixelGrid> {
    if bytes.is_empty() {
        return Err(Error::stage(Stage::Decode, "empty image data"));
    }
    let reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::stage(Stage::Decode, e))?;
    match reader.format() {
        Some(image::ImageFormat::Png | image::ImageFormat::Jpeg) => {}
        Some(other) => return Err(Error::stage(Stage::Decode, format!("unsupported format {other:?}"))),
        None => return Err(Error::stage(Stage::Decode, "unrecognized image format")),
    }
    let img = reader.decode().map_err(|e| Error::stage(Stage::Decode, e))?;
    let rgba = img.to_rgba8();
    let (w, h) = rgba.dimensions();
    let pixels = rgba.pixels().map(|p| over_white(p.0)).collect();
    PixelGrid::new(w, h, pixels).map_err(|e| Error::stage(Stage::Decode, e))
}

fn over_white([r, g, b, a]: [u8; 4]) -> [u8; 3] {
    let blend = |c: u8| -> u8 {
        let (c, a) = (u32::from(c), u32::from(a));
        ((c * a + 255 * (255 - a) + 127) / 255) as u8
    };
    [blend(r), blend(g), blend(b)]
}
