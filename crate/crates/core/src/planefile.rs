//! `.f32` plane files: `u32 width`, `u32 height`, then `width * height`
//! little-endian `f32` samples in row-major order. Multi-channel images are
//! stored as consecutive plane records.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::ImagePlane;

pub fn write_planes<W: Write>(mut out: W, planes: &[ImagePlane]) -> std::io::Result<()> {
    for p in planes {
        out.write_all(&(p.width() as u32).to_le_bytes())?;
        out.write_all(&(p.height() as u32).to_le_bytes())?;
        for &v in p.samples() {
            out.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_planes(bytes: &[u8]) -> Result<Vec<ImagePlane>> {
    let bad = |m: &str| Error::Parameter(format!("malformed .f32 data: {m}"));
    let mut planes = Vec::new();
    let mut rest = bytes;
    while !rest.is_empty() {
        if rest.len() < 8 {
            return Err(bad("truncated header"));
        }
        let w = u32::from_le_bytes(rest[0..4].try_into().unwrap()) as usize;
        let h = u32::from_le_bytes(rest[4..8].try_into().unwrap()) as usize;
        let n = w.checked_mul(h).ok_or_else(|| bad("dimensions overflow"))?;
        let body = &rest[8..];
        if body.len() < n * 4 {
            return Err(bad("truncated samples"));
        }
        let samples = body[..n * 4]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();
        planes.push(ImagePlane::new(w, h, samples)?);
        rest = &body[n * 4..];
    }
    Ok(planes)
}

pub fn save(path: impl AsRef<Path>, planes: &[ImagePlane]) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_planes(&mut buf, planes).expect("writing to memory");
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<Vec<ImagePlane>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    read_planes(&bytes)
}

/// A feature vector stored as a `len x 1` plane.
pub fn save_vector(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    let plane = ImagePlane::new(values.len(), 1, values.to_vec())?;
    save(path, &[plane])
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let mut planes = load(path)?;
    if planes.len() != 1 || planes[0].height() != 1 {
        return Err(Error::Parameter("expected a single-row .f32 vector".into()));
    }
    Ok(planes.remove(0).into_samples())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let p = ImagePlane::new(2, 1, vec![1.0, -2.5]).unwrap();
        let mut buf = Vec::new();
        write_planes(&mut buf, &[p]).unwrap();
        assert_eq!(&buf[..8], &[2, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(&buf[8..12], &1.0f32.to_le_bytes());
        assert_eq!(buf.len(), 16);
    }

    #[test]
    fn truncated_input_is_rejected() {
        assert!(read_planes(&[1, 0, 0, 0, 1, 0, 0]).is_err());
        assert!(read_planes(&[1, 0, 0, 0, 1, 0, 0, 0, 0, 0]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_exact_for_f32_values(
            w in 1usize..6, h in 1usize..6, planes in 1usize..4, seed in any::<u32>()
        ) {
            let ps: Vec<ImagePlane> = (0..planes)
                .map(|c| ImagePlane::from_fn(w, h, |x, y| {
                    let v = ((x * 31 + y * 17 + c * 7) as u32 ^ seed) as f32 / 1.0e3;
                    v as f64
                }))
                .collect();
            let mut buf = Vec::new();
            write_planes(&mut buf, &ps).unwrap();
            prop_assert_eq!(read_planes(&buf).unwrap(), ps);
        }
    }
}
