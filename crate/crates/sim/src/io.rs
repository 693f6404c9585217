//! CSV and PGM file formats.

use std::io::{self, Write};
use std::path::Path;

use hcvlc_core::link::{GrayImage, SweepRecord};

pub const SWEEP_HEADER: &str = "snr_db,scheme,scrambler_mode,role,ber,leakage,frames,seed";

#[derive(Debug, thiserror::Error)]
pub enum PgmError {
    #[error("not a binary PGM (P5) file")]
    BadMagic,
    #[error("malformed PGM header")]
    BadHeader,
    #[error("only 8-bit PGM is supported (maxval {0})")]
    UnsupportedMaxval(u32),
    #[error("pixel data truncated: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Formats one sweep row. `{:?}` on f64 prints the shortest round-trip form.
pub fn sweep_row(r: &SweepRecord) -> String {
    format!(
        "{:?},{},{},{},{:?},{:?},{},{}",
        r.snr_db, r.scheme, r.scrambler_mode, r.role, r.ber, r.leakage, r.frames, r.seed
    )
}

pub fn write_sweep_csv<W: Write>(mut w: W, records: &[SweepRecord]) -> io::Result<()> {
    w.write_all(SWEEP_HEADER.as_bytes())?;
    w.write_all(b"\n")?;
    for r in records {
        w.write_all(sweep_row(r).as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Writes to `path`, or to stdout when `path` is `None` or `-`.
pub fn with_output<F>(path: Option<&Path>, f: F) -> io::Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let mut file = io::BufWriter::new(std::fs::File::create(p)?);
            f(&mut file)?;
            file.flush()
        }
        _ => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn decode_pgm(data: &[u8]) -> Result<GrayImage, PgmError> {
    if !data.starts_with(b"P5") {
        return Err(PgmError::BadMagic);
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in &mut fields {
        // Whitespace and `#` comments may separate header fields.
        loop {
            match data.get(pos) {
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while data.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while data.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&data[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PgmError::BadHeader)?;
    }
    // Exactly one whitespace byte precedes the raster.
    if !data.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(PgmError::BadHeader);
    }
    pos += 1;
    let [w, h, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    let (w, h) = (w as usize, h as usize);
    let raster = &data[pos..];
    if raster.len() < w * h {
        return Err(PgmError::Truncated {
            expected: w * h,
            actual: raster.len(),
        });
    }
    GrayImage::new(w, h, raster[..w * h].to_vec()).map_err(|_| PgmError::BadHeader)
}

pub fn read_pgm(path: &Path) -> Result<GrayImage, PgmError> {
    decode_pgm(&std::fs::read(path)?)
}

pub fn write_pgm(path: &Path, img: &GrayImage) -> io::Result<()> {
    std::fs::write(path, encode_pgm(img))
}
