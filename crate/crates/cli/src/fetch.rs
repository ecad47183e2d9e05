//! The `fetch-data` subcommand: download and verify the four standard
//! Fashion-MNIST IDX files, or synthesize stand-in IDX files offline.

use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliError;
use revmap::data::{maybe_gunzip, parse_idx, FASHION_MNIST_FILES, IDX_MAGIC_IMAGES, IDX_MAGIC_LABELS};

const BASE_URL: &str = "https://fashion-mnist.s3-website.eu-central-1.amazonaws.com";

fn expected_magic(stem: &str) -> u32 {
    if stem.contains("images") {
        IDX_MAGIC_IMAGES
    } else {
        IDX_MAGIC_LABELS
    }
}

/// True if `dir` already holds a valid copy of `stem` (plain or gzipped).
fn file_valid(dir: &Path, stem: &str) -> bool {
    for name in [stem.to_string(), format!("{stem}.gz")] {
        let path = dir.join(&name);
        if let Ok(bytes) = std::fs::read(&path) {
            if let Ok(raw) = maybe_gunzip(&bytes) {
                if let Ok(t) = parse_idx(&raw) {
                    let magic_ok = if expected_magic(stem) == IDX_MAGIC_IMAGES {
                        t.shape.len() == 3
                    } else {
                        t.shape.len() == 1
                    };
                    if magic_ok {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Download missing files; verify magic numbers and payload sizes.
/// Idempotent: files already present and valid are left alone.
pub fn fetch_data(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for stem in FASHION_MNIST_FILES {
        if file_valid(dir, stem) {
            println!("{stem}: already present, skipping");
            continue;
        }
        let url = format!("{BASE_URL}/{stem}.gz");
        println!("{stem}: downloading {url}");
        let resp = ureq::get(&url)
            .call()
            .map_err(|e| CliError::Io(format!("download of {url} failed: {e}")))?;
        let mut bytes = Vec::new();
        resp.into_reader()
            .read_to_end(&mut bytes)
            .map_err(|e| CliError::Io(format!("read of {url} failed: {e}")))?;
        let raw = maybe_gunzip(&bytes).map_err(|e| CliError::Io(e.to_string()))?;
        parse_idx(&raw).map_err(|e| CliError::Io(format!("{stem}: {e}")))?;
        std::fs::write(dir.join(format!("{stem}.gz")), &bytes)?;
        println!("{stem}: ok ({} bytes)", bytes.len());
    }
    Ok(())
}

fn idx_images(images: &[Vec<u8>]) -> Vec<u8> {
    let mut out = IDX_MAGIC_IMAGES.to_be_bytes().to_vec();
    out.extend_from_slice(&(images.len() as u32).to_be_bytes());
    out.extend_from_slice(&28u32.to_be_bytes());
    out.extend_from_slice(&28u32.to_be_bytes());
    for img in images {
        out.extend_from_slice(img);
    }
    out
}

fn idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = IDX_MAGIC_LABELS.to_be_bytes().to_vec();
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

/// One synthetic 28x28 image: uniform pixel intensities below a
/// class-dependent cap, with both bottom corners blacked out so the
/// 16x16 resize keeps pixel indices 15 and 255 at zero (mirroring the
/// real dataset's always-dark corners).
fn synthetic_28(rng: &mut ChaCha8Rng, cap: u8) -> Vec<u8> {
    let mut img: Vec<u8> = (0..784).map(|_| rng.gen_range(0..cap)).collect();
    for y in 26..28 {
        for x in [0usize, 1, 26, 27] {
            img[28 * y + x] = 0;
        }
    }
    img
}

/// Write four synthetic IDX files shaped like the real distribution:
/// sandals (label 5) dim, ankle boots (label 9) bright, shuffled.
pub fn write_synthetic(dir: &Path, seed: u64) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (img_stem, lbl_stem, per_class) in [
        (FASHION_MNIST_FILES[0], FASHION_MNIST_FILES[1], 400usize),
        (FASHION_MNIST_FILES[2], FASHION_MNIST_FILES[3], 100usize),
    ] {
        let mut pairs: Vec<(Vec<u8>, u8)> = Vec::with_capacity(per_class * 2);
        for _ in 0..per_class {
            pairs.push((synthetic_28(&mut rng, 60), 5));
            pairs.push((synthetic_28(&mut rng, 200), 9));
        }
        for i in (1..pairs.len()).rev() {
            let j = rng.gen_range(0..=i);
            pairs.swap(i, j);
        }
        let images: Vec<Vec<u8>> = pairs.iter().map(|(i, _)| i.clone()).collect();
        let labels: Vec<u8> = pairs.iter().map(|(_, l)| *l).collect();
        std::fs::write(dir.join(img_stem), idx_images(&images))?;
        std::fs::write(dir.join(lbl_stem), idx_labels(&labels))?;
    }
    Ok(())
}
