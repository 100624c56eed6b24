//! Chart loading.
//!
//! Image row `r` maps to `y in [r, r+1) * cell_size`, column `c` to
//! `x in [c, c+1) * cell_size`.

use std::path::Path;

use hydromission_core::env::{cluster_map, GrayImage, TerrainGrid};
use serde::{Deserialize, Serialize};

use crate::config::MapConfig;
use crate::error::{Error, Result};

/// Header of a raw 8-bit grid, stored next to it as `<file>.json`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHeader {
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
}

pub fn load_terrain(cfg: &MapConfig) -> Result<TerrainGrid> {
    let Some(path) = &cfg.file else {
        return Ok(TerrainGrid::open_water(cfg.width, cfg.height, cfg.cell_size, cfg.depth));
    };
    if !path.exists() {
        return Err(Error::MissingMap { path: path.clone() });
    }
    let (image, cell_size) = if is_pgm(path) {
        (read_pgm(path)?, cfg.cell_size)
    } else {
        read_raw(path)?
    };
    Ok(cluster_map(&image, 3, cell_size, cfg.depth)?.grid)
}

fn is_pgm(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let img = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| Error::Map {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .into_luma8();
    let (w, h) = img.dimensions();
    Ok(GrayImage::new(w as usize, h as usize, img.into_raw())?)
}

/// Writes a binary (P5) graymap.
pub fn write_pgm(path: &Path, image: &GrayImage) -> Result<()> {
    use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
    use image::ImageEncoder;

    let map_err = |message: String| Error::Map {
        path: path.to_path_buf(),
        message,
    };
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    PnmEncoder::new(std::io::BufWriter::new(file))
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(
            &image.pixels,
            image.width as u32,
            image.height as u32,
            image::ExtendedColorType::L8,
        )
        .map_err(|e| map_err(e.to_string()))
}

fn read_raw(path: &Path) -> Result<(GrayImage, f64)> {
    let mut side = path.as_os_str().to_owned();
    side.push(".json");
    let side = Path::new(&side);
    let text = std::fs::read_to_string(side).map_err(|e| Error::io(side, e))?;
    let hdr: RawHeader = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: side.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let image = GrayImage::new(hdr.width, hdr.height, bytes).map_err(|e| Error::Map {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok((image, hdr.cell_size))
}
