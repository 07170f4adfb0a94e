use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::BBox;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("degenerate box ({left}, {top}, {right}, {bottom}): need left < right and top < bottom")]
    Degenerate {
        left: u32,
        top: u32,
        right: u32,
        bottom: u32,
    },
    #[error("box coordinate out of range")]
    OutOfRange,
}

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("invalid correction region {bbox}: image is {width}x{height}")]
    CropOutOfBounds { bbox: BBox, width: u32, height: u32 },
    #[error("image has no pixels")]
    Empty,
    #[error("widget {bbox} lies outside the {width}x{height} image")]
    OutOfBounds { bbox: BBox, width: u32, height: u32 },
    #[error("failed to decode image")]
    Decode(#[from] image::ImageError),
    #[error("failed to write image {path}: {source}")]
    Encode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

#[derive(Debug, Error)]
pub enum OcrError {
    #[error("cannot read OCR file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed OCR records: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("OCR record {index} is invalid: {reason}")]
    InvalidRecord { index: usize, reason: String },
    #[error("OCR endpoint {url} failed after {attempts} attempt(s): {message}")]
    Http {
        url: String,
        attempts: u32,
        message: String,
    },
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid hierarchy: {0}")]
    Hierarchy(String),
}

/// Crate-level error for the end-to-end pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Ocr(#[from] OcrError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
