//! Image pipeline: IDX ingestion, 28x28 -> 16x16 box resize, horizontal
//! flips, the pixel surgery that frees one amplitude slot, and a
//! synthetic norm-separated dataset so everything runs offline.
//!
//! Pixel layout: a 16x16 image is stored with pixel `(x, y)` (x
//! horizontal, y vertical) at index `16x + y`, so the x coordinate
//! occupies the high four bits of the index and a horizontal flip is the
//! permutation `i -> i XOR 240` on basis indices. Pixel values stay in
//! `[0, 255]`; norms are deliberately not normalized away since the
//! embeddings are designed to retain them.

use std::io::Read;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// IDX magic for a 3-D unsigned-byte tensor (images).
pub const IDX_MAGIC_IMAGES: u32 = 0x0000_0803;
/// IDX magic for a 1-D unsigned-byte tensor (labels).
pub const IDX_MAGIC_LABELS: u32 = 0x0000_0801;

/// Fashion-MNIST class index for sandals.
pub const CLASS_SANDAL: u8 = 5;
/// Fashion-MNIST class index for ankle boots.
pub const CLASS_BOOT: u8 = 9;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("bad IDX magic 0x{0:08x}")]
    BadMagic(u32),
    #[error("IDX payload truncated: expected {expected} bytes, got {got}")]
    TruncatedPayload { expected: usize, got: usize },
    #[error("missing dataset file: {0}")]
    MissingFiles(PathBuf),
    #[error("not enough samples: needed {needed} of class {class}, found {available}")]
    InsufficientSamples { class: u8, needed: usize, available: usize },
    #[error("image and label counts differ ({images} vs {labels})")]
    CountMismatch { images: usize, labels: usize },
    #[error("test fraction must lie in [0, 1), got {0}")]
    BadTestFraction(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A parsed IDX tensor of unsigned bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxTensor {
    pub shape: Vec<usize>,
    pub data: Vec<u8>,
}

/// Parse IDX bytes (the Fashion-MNIST distribution format): big-endian
/// magic, big-endian u32 dimensions, then the raw payload.
pub fn parse_idx(bytes: &[u8]) -> Result<IdxTensor, DataError> {
    if bytes.len() < 4 {
        return Err(DataError::TruncatedPayload { expected: 4, got: bytes.len() });
    }
    let magic = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
    let ndim = match magic {
        IDX_MAGIC_IMAGES => 3,
        IDX_MAGIC_LABELS => 1,
        other => return Err(DataError::BadMagic(other)),
    };
    let header = 4 + 4 * ndim;
    if bytes.len() < header {
        return Err(DataError::TruncatedPayload { expected: header, got: bytes.len() });
    }
    let shape: Vec<usize> = (0..ndim)
        .map(|i| {
            let o = 4 + 4 * i;
            u32::from_be_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as usize
        })
        .collect();
    let expected: usize = shape.iter().product();
    let payload = &bytes[header..];
    if payload.len() < expected {
        return Err(DataError::TruncatedPayload {
            expected: header + expected,
            got: bytes.len(),
        });
    }
    Ok(IdxTensor { shape, data: payload[..expected].to_vec() })
}

/// Transparently gunzip if the bytes carry the gzip magic.
pub fn maybe_gunzip(bytes: &[u8]) -> Result<Vec<u8>, DataError> {
    if bytes.len() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b {
        let mut out = Vec::new();
        flate2::read::GzDecoder::new(bytes).read_to_end(&mut out)?;
        Ok(out)
    } else {
        Ok(bytes.to_vec())
    }
}

/// Area-weighted box resize of a 28x28 grid to 16x16. Row-major in both
/// directions (row = vertical coordinate). Constant images stay constant
/// and total mass is preserved up to the grid-size ratio.
pub fn resize_28_to_16(src: &[f64]) -> Vec<f64> {
    assert_eq!(src.len(), 28 * 28);
    let scale = 28.0 / 16.0;
    let inv_area = 1.0 / (scale * scale);
    let mut out = vec![0.0; 256];
    for r in 0..16 {
        let (y0, y1) = (r as f64 * scale, (r + 1) as f64 * scale);
        for c in 0..16 {
            let (x0, x1) = (c as f64 * scale, (c + 1) as f64 * scale);
            let mut acc = 0.0;
            for sy in y0.floor() as usize..(y1.ceil() as usize).min(28) {
                let hy = (y1.min((sy + 1) as f64) - y0.max(sy as f64)).max(0.0);
                if hy == 0.0 {
                    continue;
                }
                for sx in x0.floor() as usize..(x1.ceil() as usize).min(28) {
                    let wx = (x1.min((sx + 1) as f64) - x0.max(sx as f64)).max(0.0);
                    acc += hy * wx * src[28 * sy + sx];
                }
            }
            out[16 * r + c] = acc * inv_area;
        }
    }
    out
}

/// A 16x16 greyscale image with pixel `(x, y)` at index `16x + y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image16 {
    pub pixels: Vec<f64>,
    /// 0 = sandal, 1 = boot.
    pub label: u8,
}

impl Image16 {
    /// Build from a row-major (row = y) 16x16 grid, transposing into the
    /// `16x + y` layout.
    pub fn from_row_major(grid: &[f64], label: u8) -> Self {
        assert_eq!(grid.len(), 256);
        let mut pixels = vec![0.0; 256];
        for y in 0..16 {
            for x in 0..16 {
                pixels[16 * x + y] = grid[16 * y + x];
            }
        }
        Image16 { pixels, label }
    }

    pub fn pixel(&self, x: usize, y: usize) -> f64 {
        self.pixels[16 * x + y]
    }

    pub fn norm(&self) -> f64 {
        self.pixels.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Horizontal flip: pixel `(x, y) -> (15 - x, y)`. An involution.
pub fn hflip(img: &Image16) -> Image16 {
    let mut pixels = vec![0.0; 256];
    for x in 0..16 {
        for y in 0..16 {
            pixels[16 * (15 - x) + y] = img.pixels[16 * x + y];
        }
    }
    Image16 { pixels, label: img.label }
}

/// Which pixel surgery to apply before embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrepMode {
    /// Drop the final pixel (index 255, always black).
    NonEquivariant,
    /// First copy pixel 255's value into its horizontally symmetric
    /// position (index 15), so neither bottom corner can indicate the
    /// shoe's direction, then drop pixel 255 and restore the vector's
    /// pre-edit Euclidean norm.
    Equivariant,
}

/// A 255-dimensional vector ready for embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedSample {
    pub vector: Vec<f64>,
    pub label: u8,
    pub norm_before_scale: f64,
}

/// Apply the pixel surgery for the given mode.
pub fn prepare(img: &Image16, mode: PrepMode) -> PreparedSample {
    let mut vector = img.pixels[..255].to_vec();
    let norm_before = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
    if mode == PrepMode::Equivariant {
        vector[15] = img.pixels[255];
        let edited = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        if edited > 0.0 {
            let k = norm_before / edited;
            vector.iter_mut().for_each(|v| *v *= k);
        }
    }
    PreparedSample { vector, label: img.label, norm_before_scale: norm_before }
}

/// One dataset entry: the image (used by the amplitude-embedding path)
/// and its surgered vector (used by the reverse-projection path).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub image: Image16,
    pub prepared: PreparedSample,
}

/// Where images come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Directory holding the four Fashion-MNIST IDX files (optionally
    /// gzipped).
    FashionMnist(PathBuf),
    /// Seeded synthetic images: two classes whose per-pixel intensity
    /// scales differ, so the classes are separated by norm but not by
    /// direction.
    Synthetic(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    pub split_seed: u64,
    pub test_fraction: f64,
}

/// Standard Fashion-MNIST file stems (gzipped on the distribution site).
pub const FASHION_MNIST_FILES: [&str; 4] = [
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
];

fn read_idx_file(dir: &Path, stem: &str) -> Result<IdxTensor, DataError> {
    let plain = dir.join(stem);
    let gz = dir.join(format!("{stem}.gz"));
    let path = if plain.exists() {
        plain
    } else if gz.exists() {
        gz
    } else {
        return Err(DataError::MissingFiles(plain));
    };
    let bytes = std::fs::read(path)?;
    parse_idx(&maybe_gunzip(&bytes)?)
}

/// Load the sandal/boot subset of Fashion-MNIST from `dir`, resized to
/// 16x16, `per_class` images of each class, training files first.
pub fn load_fashion_mnist(dir: &Path, per_class: usize) -> Result<Vec<Image16>, DataError> {
    let mut sandals = Vec::new();
    let mut boots = Vec::new();
    for (img_stem, lbl_stem) in [
        (FASHION_MNIST_FILES[0], FASHION_MNIST_FILES[1]),
        (FASHION_MNIST_FILES[2], FASHION_MNIST_FILES[3]),
    ] {
        if sandals.len() >= per_class && boots.len() >= per_class {
            break;
        }
        let images = read_idx_file(dir, img_stem)?;
        let labels = read_idx_file(dir, lbl_stem)?;
        if images.shape[0] != labels.shape[0] {
            return Err(DataError::CountMismatch {
                images: images.shape[0],
                labels: labels.shape[0],
            });
        }
        let (rows, cols) = (images.shape[1], images.shape[2]);
        for i in 0..images.shape[0] {
            let class = match labels.data[i] {
                CLASS_SANDAL => 0u8,
                CLASS_BOOT => 1u8,
                _ => continue,
            };
            let bucket = if class == 0 { &mut sandals } else { &mut boots };
            if bucket.len() >= per_class {
                continue;
            }
            let raw: Vec<f64> = images.data[i * rows * cols..(i + 1) * rows * cols]
                .iter()
                .map(|&b| b as f64)
                .collect();
            let grid = resize_28_to_16(&raw);
            bucket.push(Image16::from_row_major(&grid, class));
        }
    }
    for (class, bucket) in [(CLASS_SANDAL, &sandals), (CLASS_BOOT, &boots)] {
        if bucket.len() < per_class {
            return Err(DataError::InsufficientSamples {
                class,
                needed: per_class,
                available: bucket.len(),
            });
        }
    }
    let mut all = sandals;
    all.extend(boots);
    Ok(all)
}

/// Seeded synthetic images: class 0 draws pixels uniformly in [0, 60),
/// class 1 in [0, 200). Both bottom corners (indices 15 and 255) stay
/// black, matching the real dataset's always-black final pixel.
pub fn synthetic_images(seed: u64, per_class: usize) -> Vec<Image16> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_class * 2);
    for class in 0..2u8 {
        let scale = if class == 0 { 60.0 } else { 200.0 };
        for _ in 0..per_class {
            let mut pixels: Vec<f64> = (0..256).map(|_| rng.gen_range(0.0..scale)).collect();
            pixels[15] = 0.0;
            pixels[255] = 0.0;
            out.push(Image16 { pixels, label: class });
        }
    }
    out
}

/// Assemble a deterministic dataset: balanced classes, a seeded
/// horizontal flip with probability 1/2 per image, the mode's pixel
/// surgery, and a seeded shuffle split.
pub fn build_dataset(
    source: &DataSource,
    count: usize,
    flip_seed: u64,
    split_seed: u64,
    test_fraction: f64,
    mode: PrepMode,
) -> Result<DatasetSplit, DataError> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(DataError::BadTestFraction(test_fraction));
    }
    let per_class = count / 2;
    let mut images = match source {
        DataSource::FashionMnist(dir) => load_fashion_mnist(dir, per_class)?,
        DataSource::Synthetic(seed) => synthetic_images(*seed, per_class),
    };
    images.truncate(per_class * 2);

    let mut flip_rng = ChaCha8Rng::seed_from_u64(flip_seed);
    let samples: Vec<Sample> = images
        .iter()
        .map(|img| {
            let img = if flip_rng.gen_bool(0.5) { hflip(img) } else { img.clone() };
            let prepared = prepare(&img, mode);
            Sample { image: img, prepared }
        })
        .collect();

    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut split_rng = ChaCha8Rng::seed_from_u64(split_seed);
    // Fisher-Yates
    for i in (1..order.len()).rev() {
        let j = split_rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let test_len = (samples.len() as f64 * test_fraction).round() as usize;
    let mut test = Vec::with_capacity(test_len);
    let mut train = Vec::with_capacity(samples.len() - test_len);
    for (pos, &idx) in order.iter().enumerate() {
        if pos < test_len {
            test.push(samples[idx].clone());
        } else {
            train.push(samples[idx].clone());
        }
    }
    Ok(DatasetSplit { train, test, split_seed, test_fraction })
}

/// CSV export of prepared samples: header row, 255 feature columns,
/// label column last.
pub fn prepared_to_csv(samples: &[Sample]) -> String {
    let mut out = String::new();
    for i in 0..255 {
        out.push_str(&format!("p{i},"));
    }
    out.push_str("label\n");
    for s in samples {
        for v in &s.prepared.vector {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", s.prepared.label));
    }
    out
}
