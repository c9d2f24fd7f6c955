//! Binary trajectory container, little-endian throughout.
//!
//! | offset | field                          |
//! |--------|--------------------------------|
//! | 0      | magic `QT1DTRAJ`               |
//! | 8      | format version, u32            |
//! | 12     | n_points, u64                  |
//! | 20     | n_frames, u64                  |
//! | 28     | dx, f64                        |
//! | 36     | x_min, f64                     |
//! | 44     | zero padding to 64             |
//!
//! Each frame is `time` then `n_points` interleaved `(re, im)` pairs. A
//! trailing block holds a u64 count and that many
//! `(time, norm, E_kin, E_pot, <x>)` quintuples.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::{Frame, StepRecord, Trajectory};

pub const MAGIC: &[u8; 8] = b"QT1DTRAJ";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 64;

/// Serializes into any writer.
pub fn write_trajectory<W: Write>(t: &Trajectory<f64>, mut w: W) -> std::io::Result<()> {
    let n = t.n_points();
    if t.frames.iter().any(|f| f.amplitudes.len() != n) {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "frames have differing lengths",
        ));
    }
    let mut header = [0u8; HEADER_LEN];
    header[..8].copy_from_slice(MAGIC);
    header[8..12].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
    header[12..20].copy_from_slice(&(n as u64).to_le_bytes());
    header[20..28].copy_from_slice(&(t.frames.len() as u64).to_le_bytes());
    header[28..36].copy_from_slice(&t.dx.to_le_bytes());
    header[36..44].copy_from_slice(&t.x_min.to_le_bytes());
    w.write_all(&header)?;

    let mut buf = Vec::with_capacity(8 + 16 * n);
    for f in &t.frames {
        buf.clear();
        buf.extend_from_slice(&f.time.to_le_bytes());
        for z in &f.amplitudes {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.write_all(&(t.scalars.len() as u64).to_le_bytes())?;
    for s in &t.scalars {
        for v in [s.time, s.norm, s.kinetic, s.potential, s.center_of_mass] {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()
}

pub fn save_trajectory(t: &Trajectory<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let wrap = |source| Error::Write {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(wrap)?;
    write_trajectory(t, std::io::BufWriter::new(file)).map_err(wrap)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Corrupt(format!("truncated while reading {what} at byte {}", self.pos)))?;
        self.pos = end;
        Ok(slice.try_into().expect("slice has length N"))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        self.take::<8>(what).map(u64::from_le_bytes)
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        self.take::<8>(what).map(f64::from_le_bytes)
    }
}

/// Parses a complete container from memory. The absorbed probability is not
/// stored; it is recovered as the norm lost between the first and last
/// scalar records.
pub fn read_trajectory(bytes: &[u8]) -> Result<Trajectory<f64>> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 8 && &bytes[..8] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        return Err(Error::Corrupt(format!(
            "header is {} bytes, expected {HEADER_LEN}",
            bytes.len()
        )));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let mut c = Cursor { bytes, pos: 12 };
    let n_points = c.u64("n_points")?;
    let n_frames = c.u64("n_frames")?;
    let dx = c.f64("dx")?;
    let x_min = c.f64("x_min")?;
    c.pos = HEADER_LEN;

    let frame_bytes = n_points
        .checked_mul(16)
        .and_then(|b| b.checked_add(8))
        .and_then(|b| b.checked_mul(n_frames));
    match frame_bytes {
        Some(b) if b <= (bytes.len() - HEADER_LEN) as u64 => {}
        _ => {
            return Err(Error::Corrupt(format!(
                "file too short for {n_frames} frames of {n_points} points"
            )))
        }
    }
    let (n_points, n_frames) = (n_points as usize, n_frames as usize);

    let mut frames = Vec::with_capacity(n_frames);
    for _ in 0..n_frames {
        let time = c.f64("frame time")?;
        let mut amplitudes = Vec::with_capacity(n_points);
        for _ in 0..n_points {
            let re = c.f64("amplitude")?;
            let im = c.f64("amplitude")?;
            amplitudes.push(Complex64::new(re, im));
        }
        frames.push(Frame { time, amplitudes });
    }
    let count = c.u64("scalar count")?;
    if count.checked_mul(40).is_none_or(|b| b > (bytes.len() - c.pos) as u64) {
        return Err(Error::Corrupt(format!("file too short for {count} scalar records")));
    }
    let mut scalars = Vec::with_capacity(count as usize);
    for _ in 0..count {
        scalars.push(StepRecord {
            time: c.f64("scalar")?,
            norm: c.f64("scalar")?,
            kinetic: c.f64("scalar")?,
            potential: c.f64("scalar")?,
            center_of_mass: c.f64("scalar")?,
        });
    }
    if c.pos != bytes.len() {
        return Err(Error::Corrupt(format!("{} trailing bytes", bytes.len() - c.pos)));
    }
    let mut t = Trajectory {
        x_min,
        dx,
        frames,
        scalars,
        absorbed: 0.0,
    };
    t.absorbed = t.norm_loss();
    Ok(t)
}

pub fn load_trajectory(path: impl AsRef<Path>) -> Result<Trajectory<f64>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    read_trajectory(&bytes)
}
