//! Output writers (RFC-4180 CSV, legacy-VTK ASCII) and the flat key-value
//! run-configuration format.
//!
//! Every output file embeds the originating config hash and formulation name
//! so artifacts remain traceable to the run that produced them.

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::solution::FieldSolution;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

/// FNV-1a hash of the canonicalized config text, printed as 16 hex digits.
pub fn config_hash(text: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for b in line.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h ^= b'\n' as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Writes an RFC-4180 CSV (CRLF line endings). A single leading `#` comment
/// line carries the provenance tag; values are formatted with full precision
/// so reruns are byte-identical.
pub fn write_csv<W: Write>(
    mut w: W,
    provenance: &str,
    header: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    write!(w, "# {provenance}\r\n")?;
    write!(w, "{}\r\n", header.join(","))?;
    let mut line = String::new();
    for row in rows {
        line.clear();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            let _ = write!(line, "{v:.12e}");
        }
        write!(w, "{line}\r\n")?;
    }
    Ok(())
}

/// Legacy-VTK ASCII unstructured grid with nodal fields and per-cell data.
pub fn write_vtk<W: Write>(
    mut w: W,
    title: &str,
    mesh: &Mesh,
    point_fields: &[(&str, &[f64])],
    cell_fields: &[(&str, &[f64])],
) -> Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    // VTK title lines are limited to 256 characters
    let title: String = title.chars().take(250).collect();
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.n_nodes())?;
    for c in &mesh.coords {
        writeln!(w, "{:.12e} {:.12e} {:.12e}", c[0], c[1], c[2])?;
    }
    let nn = mesh.kind.n_nodes();
    writeln!(w, "CELLS {} {}", mesh.n_elems(), mesh.n_elems() * (nn + 1))?;
    for e in 0..mesh.n_elems() {
        let nodes = mesh.elem_nodes(e);
        write!(w, "{nn}")?;
        for &n in nodes {
            write!(w, " {n}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_TYPES {}", mesh.n_elems())?;
    for _ in 0..mesh.n_elems() {
        writeln!(w, "{}", mesh.kind.vtk_cell_type())?;
    }
    if !point_fields.is_empty() {
        writeln!(w, "POINT_DATA {}", mesh.n_nodes())?;
        for (name, vals) in point_fields {
            if vals.len() != mesh.n_nodes() {
                return Err(Error::Config(format!("field '{name}' has wrong length")));
            }
            writeln!(w, "SCALARS {name} double 1")?;
            writeln!(w, "LOOKUP_TABLE default")?;
            for v in *vals {
                writeln!(w, "{v:.12e}")?;
            }
        }
    }
    let mut wrote_cell_header = false;
    for (name, vals) in cell_fields {
        if vals.len() != mesh.n_elems() {
            return Err(Error::Config(format!("cell field '{name}' has wrong length")));
        }
        if !wrote_cell_header {
            writeln!(w, "CELL_DATA {}", mesh.n_elems())?;
            wrote_cell_header = true;
        }
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in *vals {
            writeln!(w, "{v:.12e}")?;
        }
    }
    Ok(())
}

/// Convenience: writes a solution's nodal fields plus region tags.
pub fn write_solution_vtk<W: Write>(w: W, title: &str, sol: &FieldSolution) -> Result<()> {
    let nodal: Vec<(String, Vec<f64>)> = (0..sol.layout.n_fields())
        .map(|f| (sol.layout.fields[f].clone(), sol.nodal(f)))
        .collect();
    let refs: Vec<(&str, &[f64])> =
        nodal.iter().map(|(n, v)| (n.as_str(), v.as_slice())).collect();
    let region: Vec<f64> = sol.mesh.region.iter().map(|&r| r as f64).collect();
    write_vtk(w, title, &sol.mesh, &refs, &[("region", &region)])
}

/// Flat `key = value` configuration text. Later keys override earlier ones;
/// `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct FlatConfig {
    pub entries: BTreeMap<String, String>,
    /// Raw text, kept for hashing.
    pub text: String,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { entries, text: text.to_string() })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn hash(&self) -> String {
        config_hash(&self.text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Config(format!("missing key '{key}'")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.require(key)?
            .parse()
            .map_err(|_| Error::Config(format!("key '{key}' is not a number")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => {
                s.parse().map_err(|_| Error::Config(format!("key '{key}' is not a number")))
            }
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => {
                s.parse().map_err(|_| Error::Config(format!("key '{key}' is not an integer")))
            }
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    /// Rejects keys outside the allowed set (typo guard).
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.entries.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown config key '{k}'")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_line_mesh;

    #[test]
    fn csv_is_crlf_and_deterministic() {
        let rows = vec![vec![1.0, 2.5], vec![-3.0, 4.0e-7]];
        let mut a = Vec::new();
        write_csv(&mut a, "cfg=abc formulation=wr", &["x", "y"], &rows).unwrap();
        let mut b = Vec::new();
        write_csv(&mut b, "cfg=abc formulation=wr", &["x", "y"], &rows).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("# cfg=abc formulation=wr\r\n"));
        assert!(text.contains("x,y\r\n"));
        assert!(text.lines().count() >= 4);
    }

    #[test]
    fn vtk_line_mesh_shape() {
        let mesh = build_line_mesh(4, 0.0, 1.0).unwrap();
        let vals = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let mut out = Vec::new();
        write_vtk(&mut out, "test run", &mesh, &[("a_y", &vals)], &[]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("POINTS 5 double"));
        assert!(text.contains("CELLS 4 12"));
        assert!(text.contains("CELL_TYPES 4"));
        assert!(text.contains("SCALARS a_y double 1"));
    }

    #[test]
    fn flat_config_roundtrip() {
        let cfg = FlatConfig::parse(
            "# comment\n problem = mc1d \n n_elems = 50\n musigma_u = 1000.0 # trailing\n",
        )
        .unwrap();
        assert_eq!(cfg.get("problem"), Some("mc1d"));
        assert_eq!(cfg.usize_or("n_elems", 0).unwrap(), 50);
        assert_eq!(cfg.f64("musigma_u").unwrap(), 1000.0);
        assert!(cfg.f64("missing").is_err());
        assert!(cfg.check_keys(&["problem", "n_elems", "musigma_u"]).is_ok());
        assert!(cfg.check_keys(&["problem"]).is_err());
    }

    #[test]
    fn config_hash_ignores_comments_and_blank_lines() {
        let a = config_hash("a = 1\nb = 2\n");
        let b = config_hash("# hi\na = 1\n\nb = 2\n");
        let c = config_hash("a = 1\nb = 3\n");
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn malformed_config_rejected() {
        assert!(FlatConfig::parse("just words\n").is_err());
    }
}
