//! Binary graymap (P5, maxval 255) frames and numbered frame directories.

use std::path::Path;

use super::IoError;
use crate::scene::{SceneFrame, SceneSequence};

struct Header {
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header, IoError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(IoError::MalformedPgm("missing P5 magic".into()));
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for (i, field) in fields.iter_mut().enumerate() {
        // Whitespace and comments before each field.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(IoError::MalformedPgm(format!(
                "header field {} is not a number",
                i + 1
            )));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| IoError::MalformedPgm(format!("header field {} overflows", i + 1)))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(IoError::MalformedPgm("no whitespace after maxval".into())),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(IoError::MalformedPgm(format!(
            "dimensions {width}x{height}"
        )));
    }
    Ok(Header {
        width: width as usize,
        height: height as usize,
        maxval,
        data_start: pos,
    })
}

pub fn decode_pgm(bytes: &[u8]) -> Result<SceneFrame, IoError> {
    let h = parse_header(bytes)?;
    if h.maxval != 255 {
        return Err(IoError::UnsupportedMaxval(h.maxval));
    }
    let n = h.width * h.height;
    let raster = &bytes[h.data_start..];
    if raster.len() != n {
        return Err(IoError::MalformedPgm(format!(
            "raster has {} bytes, expected {n}",
            raster.len()
        )));
    }
    let data = raster.iter().map(|&v| v as f64 / 255.0).collect();
    Ok(SceneFrame::new(h.width, h.height, data)?)
}

pub fn encode_pgm(frame: &SceneFrame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend(
        frame
            .data()
            .iter()
            .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8),
    );
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<SceneFrame, IoError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| IoError::file(path, e))?;
    decode_pgm(&bytes)
}

pub fn write_pgm(frame: &SceneFrame, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, encode_pgm(frame)).map_err(|e| IoError::file(path, e))
}

/// Loads every `.pgm` file of `dir` in name order. Names must be zero-padded
/// decimal numbers of one common width, so lexicographic and numeric order
/// agree; anything else is rejected as ambiguous.
pub fn read_scene_dir(dir: impl AsRef<Path>) -> Result<SceneSequence, IoError> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|e| IoError::file(dir, e))?;
    let mut names = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| IoError::file(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("pgm") {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| IoError::SceneDir(format!("non-UTF-8 file name {}", path.display())))?
            .to_string();
        if stem.is_empty() || !stem.bytes().all(|b| b.is_ascii_digit()) {
            return Err(IoError::SceneDir(format!(
                "{}: frame names must be zero-padded numbers",
                path.display()
            )));
        }
        names.push((stem, path));
    }
    if names.is_empty() {
        return Err(IoError::SceneDir(format!(
            "no .pgm frames in {}",
            dir.display()
        )));
    }
    let width = names[0].0.len();
    if let Some((odd, _)) = names.iter().find(|(s, _)| s.len() != width) {
        return Err(IoError::SceneDir(format!(
            "ambiguous ordering: `{odd}` and `{}` are padded to different widths",
            names[0].0
        )));
    }
    names.sort();
    let frames = names
        .iter()
        .map(|(_, p)| read_pgm(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SceneSequence::new(frames)?)
}

/// Writes `frames` as `<index>.pgm`, zero-padded to six digits.
pub fn write_scene_dir(
    frames: &[SceneFrame],
    indices: &[usize],
    dir: impl AsRef<Path>,
) -> Result<(), IoError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| IoError::file(dir, e))?;
    for (f, i) in frames.iter().zip(indices) {
        write_pgm(f, dir.join(format!("{i:06}.pgm")))?;
    }
    Ok(())
}
