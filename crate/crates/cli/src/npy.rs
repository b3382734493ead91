//! Reader and writer for the NPY binary array format, version 1.0.
//!
//! Deliberately narrow: 2-D arrays of little-endian 4- or 8-byte floats in
//! C order. Anything else — other dtypes, Fortran order, other versions,
//! other ranks — is an explicit error rather than a guess, since feature
//! matrices are the only payload this tool exchanges.

use std::fs;
use std::path::Path;

use gel_core::linalg::Mat;

use crate::CliError;

const MAGIC: &[u8; 6] = b"\x93NUMPY";

/// Reads a 2-D float NPY file into a matrix.
pub fn read_npy(path: &Path) -> Result<Mat, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_npy(&bytes).map_err(|msg| CliError::Npy { path: path.display().to_string(), msg })
}

fn parse_npy(bytes: &[u8]) -> Result<Mat, String> {
    if bytes.len() < 10 || &bytes[..6] != MAGIC {
        return Err("not an NPY file (bad magic)".into());
    }
    let (major, minor) = (bytes[6], bytes[7]);
    if (major, minor) != (1, 0) {
        return Err(format!("unsupported NPY version {major}.{minor}; only 1.0 is accepted"));
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let data_start = 10 + header_len;
    if bytes.len() < data_start {
        return Err("truncated header".into());
    }
    let header = core::str::from_utf8(&bytes[10..data_start])
        .map_err(|_| "header is not valid UTF-8".to_string())?;

    let descr = dict_value(header, "descr")?;
    let descr = descr.trim_matches(|c| c == '\'' || c == '"');
    let elem_size = match descr {
        "<f8" => 8,
        "<f4" => 4,
        other => {
            return Err(format!(
                "unsupported dtype {other:?}; only little-endian '<f4' and '<f8' are accepted"
            ))
        }
    };

    let fortran = dict_value(header, "fortran_order")?;
    match fortran.trim() {
        "False" => {}
        "True" => return Err("Fortran-order arrays are not accepted; save in C order".into()),
        other => return Err(format!("unparseable fortran_order value {other:?}")),
    }

    let shape = dict_value(header, "shape")?;
    let dims: Vec<usize> = shape
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| format!("bad shape component {s:?}")))
        .collect::<Result<_, _>>()?;
    if dims.len() != 2 {
        return Err(format!("expected a 2-D array, got shape {shape}"));
    }
    let (n, d) = (dims[0], dims[1]);

    let expected = n * d * elem_size;
    let data = &bytes[data_start..];
    if data.len() != expected {
        return Err(format!(
            "payload is {} bytes but shape ({n}, {d}) with itemsize {elem_size} needs {expected}",
            data.len()
        ));
    }
    let mut values = Vec::with_capacity(n * d);
    match elem_size {
        8 => {
            for chunk in data.chunks_exact(8) {
                values.push(f64::from_le_bytes(chunk.try_into().unwrap()));
            }
        }
        4 => {
            for chunk in data.chunks_exact(4) {
                values.push(f32::from_le_bytes(chunk.try_into().unwrap()) as f64);
            }
        }
        _ => unreachable!(),
    }
    Mat::from_vec(n, d, values).map_err(|e| e.to_string())
}

/// Extracts the value of `key` from the Python-dict-literal header.
fn dict_value<'a>(header: &'a str, key: &str) -> Result<&'a str, String> {
    for quote in ['\'', '"'] {
        let pat = format!("{quote}{key}{quote}");
        if let Some(pos) = header.find(&pat) {
            let rest = &header[pos + pat.len()..];
            let rest = rest
                .trim_start()
                .strip_prefix(':')
                .ok_or_else(|| format!("malformed header near {key:?}"))?
                .trim_start();
            // Value ends at the next top-level comma or closing brace.
            let mut depth = 0usize;
            for (i, c) in rest.char_indices() {
                match c {
                    '(' | '[' => depth += 1,
                    ')' | ']' => depth = depth.saturating_sub(1),
                    ',' | '}' if depth == 0 => return Ok(rest[..i].trim()),
                    _ => {}
                }
            }
            return Ok(rest.trim());
        }
    }
    Err(format!("header is missing key {key:?}"))
}

/// Writes a matrix as a version-1.0, C-order, `<f8` NPY file.
pub fn write_npy(path: &Path, m: &Mat) -> Result<(), CliError> {
    let bytes = encode_npy(m);
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Encodes without touching the filesystem (used for round-trip tests).
pub fn encode_npy(m: &Mat) -> Vec<u8> {
    let header = format!(
        "{{'descr': '<f8', 'fortran_order': False, 'shape': ({}, {}), }}",
        m.rows(),
        m.cols()
    );
    // Pad so that data starts on a 64-byte boundary, newline-terminated.
    let unpadded = MAGIC.len() + 4 + header.len() + 1;
    let padding = (64 - unpadded % 64) % 64;
    let header_len = (header.len() + padding + 1) as u16;

    let mut out = Vec::with_capacity(unpadded + padding + m.rows() * m.cols() * 8);
    out.extend_from_slice(MAGIC);
    out.push(1);
    out.push(0);
    out.extend_from_slice(&header_len.to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    out.extend(std::iter::repeat_n(b' ', padding));
    out.push(b'\n');
    for v in m.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}
