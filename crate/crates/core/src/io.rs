//! CSV and binary serialization.
//!
//! CSV files are comma separated with a header row; floats are written with
//! 17 significant digits (`{:.16e}`), which round-trips every `f64`.
//!
//! Binary field dump, all little-endian:
//!
//! ```text
//! offset 0   u64          node count n
//! offset 8   n × 3 × f64  m₁, m₂, m₃ of node 0, then node 1, ...
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::field::{PhaseField, SphereField};
use crate::mesh::Mesh;
use crate::radial::RadialProfile;
use crate::verify::PhaseDiagram;

fn io_err(e: std::io::Error) -> Error {
    Error::Format(e.to_string())
}

/// Round-trip decimal form of a float.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn row<W: Write>(w: &mut W, cells: &[String]) -> Result<()> {
    writeln!(w, "{}", cells.join(",")).map_err(io_err)
}

pub fn write_field_csv<W: Write>(w: &mut W, mesh: &Mesh, field: &SphereField) -> Result<()> {
    crate::energy::check_len(mesh, field.len())?;
    row(w, &["x", "y", "m1", "m2", "m3"].map(String::from))?;
    for (p, m) in mesh.nodes().iter().zip(field.iter()) {
        row(w, &[fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(m[0]), fmt_f64(m[1]), fmt_f64(m[2])])?;
    }
    Ok(())
}

pub fn write_phase_csv<W: Write>(w: &mut W, mesh: &Mesh, phase: &PhaseField) -> Result<()> {
    crate::energy::check_len(mesh, phase.len())?;
    row(w, &["x", "y", "phi"].map(String::from))?;
    for (p, v) in mesh.nodes().iter().zip(phase.iter()) {
        row(w, &[fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(*v)])?;
    }
    Ok(())
}

/// Columns `r, u, u_prime, phi, m1, m3` with `φ = u/2`, `m = (sin φ, 0, cos φ)`.
pub fn write_profile_csv<W: Write>(w: &mut W, profile: &RadialProfile) -> Result<()> {
    row(w, &["r", "u", "u_prime", "phi", "m1", "m3"].map(String::from))?;
    for k in 0..profile.len() {
        let phi = 0.5 * profile.u[k];
        row(
            w,
            &[
                fmt_f64(profile.r[k]),
                fmt_f64(profile.u[k]),
                fmt_f64(profile.du[k]),
                fmt_f64(phi),
                fmt_f64(phi.sin()),
                fmt_f64(phi.cos()),
            ],
        )?;
    }
    Ok(())
}

/// Columns `kappa, gamma, class, E_min, E_e3, E_inplane, kappa_gamma, gamma_kappa`;
/// undefined entries are left empty.
pub fn write_phase_diagram_csv<W: Write>(w: &mut W, diagram: &PhaseDiagram) -> Result<()> {
    row(
        w,
        &["kappa", "gamma", "class", "E_min", "E_e3", "E_inplane", "kappa_gamma", "gamma_kappa"].map(String::from),
    )?;
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for c in &diagram.cells {
        row(
            w,
            &[
                fmt_f64(c.kappa),
                fmt_f64(c.gamma),
                c.classification.to_string(),
                fmt_f64(c.energy_min),
                fmt_f64(c.energy_e3),
                opt(c.energy_in_plane),
                fmt_f64(c.kappa_gamma),
                opt(c.gamma_kappa),
            ],
        )?;
    }
    Ok(())
}

pub fn write_field_binary<W: Write>(w: &mut W, field: &SphereField) -> Result<()> {
    w.write_all(&(field.len() as u64).to_le_bytes()).map_err(io_err)?;
    for m in field.iter() {
        for c in m {
            w.write_all(&c.to_le_bytes()).map_err(io_err)?;
        }
    }
    Ok(())
}

pub fn read_field_binary<R: Read>(r: &mut R) -> Result<SphereField> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(io_err)?;
    let n = u64::from_le_bytes(word);
    let n = usize::try_from(n).map_err(|_| Error::Format(format!("node count {n} does not fit in memory")))?;
    let mut data = Vec::new();
    r.read_to_end(&mut data).map_err(io_err)?;
    if data.len() != n * 24 {
        return Err(Error::Format(format!("expected {} payload bytes for {n} nodes, found {}", n * 24, data.len())));
    }
    let value = |i: usize| f64::from_le_bytes(data[8 * i..8 * i + 8].try_into().expect("8 bytes"));
    Ok(SphereField::from_fn(n, |k| [value(3 * k), value(3 * k + 1), value(3 * k + 2)]))
}

/// Reads the `m1, m2, m3` columns of a field CSV written by [`write_field_csv`].
pub fn read_field_csv<R: Read>(r: &mut R) -> Result<SphereField> {
    let mut text = String::new();
    r.read_to_string(&mut text).map_err(io_err)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or_else(|| Error::Format("empty field CSV".into()))?.split(',').collect();
    let col = |name: &str| {
        header.iter().position(|h| h.trim() == name).ok_or_else(|| Error::Format(format!("missing column {name}")))
    };
    let idx = [col("m1")?, col("m2")?, col("m3")?];
    let mut out = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        let mut v = [0.0; 3];
        for (c, &j) in idx.iter().enumerate() {
            let s = cells.get(j).ok_or_else(|| Error::Format(format!("line {}: too few columns", i + 2)))?;
            v[c] = s.trim().parse().map_err(|e| Error::Format(format!("line {}: {e}", i + 2)))?;
        }
        out.push(v);
    }
    Ok(SphereField::from_vectors(out))
}
