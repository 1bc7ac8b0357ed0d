//! File formats: constellations, states, and spectra as small CSV files.
//!
//! All files are UTF-8 with LF line endings. Floats are written in Rust's
//! shortest round-trip form, so saving and reloading reproduces values
//! bit-for-bit. Parse failures report the 1-based line number.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::half_integer::HalfInt;
use crate::multipole::MultipoleSpectrum;
use crate::sphere::Direction;
use crate::states::{Constellation, SpinState};

/// Norm deviation beyond which a loaded state requires explicit consent to
/// renormalize.
pub const NORM_GATE: f64 = 1e-6;

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn parse_f64(path: &Path, line: usize, field: &str, text: &str) -> Result<f64> {
    text.trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("invalid {field}: {text:?}")))
}

fn data_rows<'a>(
    path: &Path,
    content: &'a str,
    header: &str,
) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim() == header => {}
        Some((_, first)) => {
            return Err(parse_err(
                path,
                1,
                format!("expected header {header:?}, found {first:?}"),
            ))
        }
        None => return Err(parse_err(path, 1, "empty file")),
    }
    let expected_fields = header.split(',').count();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_fields {
            return Err(parse_err(
                path,
                idx + 1,
                format!("expected {expected_fields} fields, found {}", fields.len()),
            ));
        }
        rows.push((idx + 1, fields));
    }
    Ok(rows)
}

/// `theta,phi` rows in radians, one per constellation point.
pub fn save_constellation(path: &Path, c: &Constellation) -> Result<()> {
    let mut out = String::from("theta,phi\n");
    for p in c.points() {
        writeln!(out, "{},{}", p.theta, p.phi).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load_constellation(path: &Path) -> Result<Constellation> {
    let content = fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (line, fields) in data_rows(path, &content, "theta,phi")? {
        let theta = parse_f64(path, line, "theta", fields[0])?;
        let phi = parse_f64(path, line, "phi", fields[1])?;
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(parse_err(path, line, format!("theta {theta} outside [0, pi]")));
        }
        points.push(Direction::new(theta, phi));
    }
    if points.is_empty() {
        return Err(parse_err(path, 1, "constellation has no points"));
    }
    Constellation::new(points)
}

/// `m,re,im` rows ascending in `m`, with `m` in half-integer text form
/// (`-1/2`, `0`, `3/2`).
pub fn save_state(path: &Path, state: &SpinState) -> Result<()> {
    let mut out = String::from("m,re,im\n");
    for (i, amp) in state.amps().iter().enumerate() {
        let m = HalfInt::from_twice(-state.spin().twice() + 2 * i as i64);
        writeln!(out, "{},{},{}", m, amp.re, amp.im).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

/// Loads a state, enforcing the norm gate: deviation beyond [`NORM_GATE`]
/// requires `renormalize`.
pub fn load_state(path: &Path, renormalize: bool) -> Result<SpinState> {
    let content = fs::read_to_string(path)?;
    let rows = data_rows(path, &content, "m,re,im")?;
    if rows.is_empty() {
        return Err(parse_err(path, 1, "state has no amplitudes"));
    }
    let mut entries: Vec<(HalfInt, Complex64, usize)> = Vec::with_capacity(rows.len());
    for (line, fields) in rows {
        let m: HalfInt = fields[0]
            .trim()
            .parse()
            .map_err(|e| parse_err(path, line, e))?;
        let re = parse_f64(path, line, "re", fields[1])?;
        let im = parse_f64(path, line, "im", fields[2])?;
        entries.push((m, Complex64::new(re, im), line));
    }
    let spin = HalfInt::from_twice(entries.len() as i64 - 1);
    let mut amps = vec![None; entries.len()];
    for &(m, amp, line) in &entries {
        let idx = m.twice() + spin.twice();
        if idx < 0 || idx % 2 != 0 || (idx / 2) as usize >= amps.len() {
            return Err(parse_err(
                path,
                line,
                format!("projection m = {m} does not belong to spin {spin}"),
            ));
        }
        let slot = &mut amps[(idx / 2) as usize];
        if slot.is_some() {
            return Err(parse_err(path, line, format!("duplicate projection m = {m}")));
        }
        *slot = Some(amp);
    }
    let amps: Vec<Complex64> = amps.into_iter().map(|a| a.unwrap_or_default()).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_GATE && !renormalize {
        return Err(Error::Domain(format!(
            "state in {} has norm {norm:.9}; pass the renormalize option to accept it",
            path.display()
        )));
    }
    SpinState::from_unnormalized(spin, amps)
}

/// `K,q,re,im` rows for every multipole component.
pub fn save_spectrum(path: &Path, spec: &MultipoleSpectrum) -> Result<()> {
    let mut out = String::from("K,q,re,im\n");
    for k in 0..=spec.k_range() {
        for q in -(k as i32)..=(k as i32) {
            let rho = spec.rho(k, q);
            writeln!(out, "{},{},{},{}", k, q, rho.re, rho.im).unwrap();
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Companion `K,length` file of per-order squared lengths.
pub fn save_lengths(path: &Path, spec: &MultipoleSpectrum) -> Result<()> {
    let mut out = String::from("K,length\n");
    for (k, l) in spec.lengths().iter().enumerate() {
        writeln!(out, "{},{}", k, l).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_cue, sample_majorana, RngStream};
    use tempfile::tempdir;

    #[test]
    fn constellation_round_trips_exactly() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let (c, _) = sample_majorana(HalfInt::from_twice(7), &RngStream::new(1, 0));
        save_constellation(&path, &c).unwrap();
        let back = load_constellation(&path).unwrap();
        for (a, b) in c.points().iter().zip(back.points()) {
            assert_eq!(a.theta.to_bits(), b.theta.to_bits());
            assert_eq!(a.phi.to_bits(), b.phi.to_bits());
        }
        // files end with LF and carry the exact header
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("theta,phi\n"));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn state_round_trips_exactly_with_half_integer_labels() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let state = sample_cue(HalfInt::from_twice(5), &RngStream::new(2, 0));
        save_state(&path, &state).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("-5/2,"));
        assert!(text.contains("1/2,"));
        // reload renormalizes, which may flip the last bit
        let back = load_state(&path, false).unwrap();
        for (a, b) in state.amps().iter().zip(back.amps()) {
            assert!((a - b).norm() <= 4.0 * f64::EPSILON * a.norm());
        }
        // the written text itself is deterministic across saves
        let again = dir.path().join("s2.csv");
        save_state(&again, &state).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "theta,phi\n0.5,1.0\nnope,2.0\n").unwrap();
        match load_constellation(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        fs::write(&path, "wrong,header\n").unwrap();
        match load_constellation(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected header error, got {other:?}"),
        }
        fs::write(&path, "m,re,im\n-1,0.6,0\n0,0.5,0\n7/2,0.62,0\n").unwrap();
        match load_state(&path, false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected projection error, got {other:?}"),
        }
    }

    #[test]
    fn norm_gate_requires_consent() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("off.csv");
        fs::write(&path, "m,re,im\n-1/2,0.7,0\n1/2,0.7,0\n").unwrap();
        assert!(load_state(&path, false).is_err());
        let state = load_state(&path, true).unwrap();
        let norm: f64 = state.amps().iter().map(|a| a.norm_sqr()).sum();
        approx::assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn spectrum_files_have_expected_shape() {
        let dir = tempdir().unwrap();
        let (_, state) = sample_majorana(HalfInt::from_twice(4), &RngStream::new(3, 0));
        let spec = crate::multipole::multipoles(&state);
        let rho_path = dir.path().join("rho.csv");
        let len_path = dir.path().join("len.csv");
        save_spectrum(&rho_path, &spec).unwrap();
        save_lengths(&len_path, &spec).unwrap();
        let rho_text = fs::read_to_string(&rho_path).unwrap();
        assert_eq!(rho_text.lines().count(), 1 + 25); // header + (2S+1)²
        let len_text = fs::read_to_string(&len_path).unwrap();
        assert_eq!(len_text.lines().count(), 1 + 5);
    }
}
