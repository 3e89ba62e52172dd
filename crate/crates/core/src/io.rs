//! File formats: JSON for banks, coefficient vectors, and IFS systems;
//! CSV for atoms, series, and clouds.
//!
//! CSV floats are written with Rust's shortest round-trip formatting (17
//! significant digits at most), so files parse back bit-identically and
//! repeated runs are byte-identical.

use crate::coeff::CoeffVector;
use crate::error::{Error, Result};
use crate::filterbank::FilterBank;
use crate::hutchinson::{AffineIFS, AffineMap, PointMassCloud};
use crate::laurent::LaurentPolynomial;
use crate::nadic::AtomicMeasure;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterJson {
    min_degree: i64,
    /// `[re, im]` pairs listed contiguously from `min_degree` upward.
    coeffs: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BankJson {
    n: usize,
    filters: Vec<FilterJson>,
}

/// Parses the bank file schema `{ "n": N, "filters": [ { "min_degree",
/// "coeffs" }, … ] }`.
pub fn bank_from_json(text: &str) -> Result<FilterBank> {
    let parsed: BankJson = serde_json::from_str(text)?;
    if parsed.filters.len() != parsed.n {
        return Err(Error::MalformedBank(format!(
            "file declares n = {} but carries {} filters",
            parsed.n,
            parsed.filters.len()
        )));
    }
    let filters = parsed
        .filters
        .into_iter()
        .map(|f| {
            LaurentPolynomial::new(f.coeffs.iter().enumerate().map(|(i, &[re, im])| {
                (f.min_degree + i as i64, Complex64::new(re, im))
            }))
        })
        .collect();
    FilterBank::new(filters)
}

pub fn bank_to_json(fb: &FilterBank) -> String {
    let filters = fb
        .filters()
        .iter()
        .map(|p| {
            let min = p.min_degree().unwrap_or(0);
            let max = p.max_degree().unwrap_or(0);
            FilterJson {
                min_degree: min,
                coeffs: (min..=max)
                    .map(|d| {
                        let c = p.coeff(d);
                        [c.re, c.im]
                    })
                    .collect(),
            }
        })
        .collect();
    serde_json::to_string_pretty(&BankJson {
        n: fb.n_channels(),
        filters,
    })
    .expect("bank serializes")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorJson {
    /// `[index, re, im]` triples.
    entries: Vec<(i64, f64, f64)>,
}

/// Parses the vector file schema `{ "entries": [ [n, re, im], … ] }`.
pub fn vector_from_json(text: &str) -> Result<CoeffVector> {
    let parsed: VectorJson = serde_json::from_str(text)?;
    Ok(CoeffVector::new(
        parsed
            .entries
            .into_iter()
            .map(|(n, re, im)| (n, Complex64::new(re, im))),
    ))
}

pub fn vector_to_json(f: &CoeffVector) -> String {
    serde_json::to_string_pretty(&VectorJson {
        entries: f.entries().map(|(n, c)| (n, c.re, c.im)).collect(),
    })
    .expect("vector serializes")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IfsJson {
    maps: Vec<AffineMap>,
    weights: Vec<f64>,
}

/// Parses the IFS file schema `{ "maps": [ {"a", "b"}, … ], "weights": […] }`.
pub fn ifs_from_json(text: &str) -> Result<AffineIFS> {
    let parsed: IfsJson = serde_json::from_str(text)?;
    AffineIFS::new(parsed.maps, parsed.weights)
}

pub fn ifs_to_json(ifs: &AffineIFS) -> String {
    serde_json::to_string_pretty(&IfsJson {
        maps: ifs.maps().to_vec(),
        weights: ifs.weights().to_vec(),
    })
    .expect("ifs serializes")
}

/// `numerator,depth,base,position_float,mass` rows, one per atom.
pub fn write_atoms_csv(mu: &AtomicMeasure, out: &mut impl Write) -> Result<()> {
    writeln!(out, "numerator,depth,base,position_float,mass")?;
    for (addr, mass) in mu.addresses() {
        writeln!(
            out,
            "{},{},{},{:?},{:?}",
            addr.numerator(),
            addr.depth(),
            addr.base(),
            addr.value(),
            mass
        )?;
    }
    Ok(())
}

/// `t_or_x,re,im` rows for a complex-valued series.
pub fn write_series_csv(
    points: impl IntoIterator<Item = (f64, Complex64)>,
    out: &mut impl Write,
) -> Result<()> {
    writeln!(out, "t_or_x,re,im")?;
    for (t, v) in points {
        writeln!(out, "{:?},{:?},{:?}", t, v.re, v.im)?;
    }
    Ok(())
}

/// `x,F` rows for a distribution function.
pub fn write_cdf_csv(
    points: impl IntoIterator<Item = (f64, f64)>,
    out: &mut impl Write,
) -> Result<()> {
    writeln!(out, "x,F")?;
    for (x, f) in points {
        writeln!(out, "{:?},{:?}", x, f)?;
    }
    Ok(())
}

/// `position,mass` rows for a point-mass cloud.
pub fn write_cloud_csv(cloud: &PointMassCloud, out: &mut impl Write) -> Result<()> {
    writeln!(out, "position,mass")?;
    for (x, m) in cloud.atoms() {
        writeln!(out, "{:?},{:?}", x, m)?;
    }
    Ok(())
}

/// Writes atomically: temp file in the destination directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "out".into())
        )),
        None => Path::new(&format!(
            ".{}.tmp",
            path.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "out".into())
        ))
        .to_path_buf(),
    };
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::{daubechies4_bank, fourier_basis_bank};
    use crate::hutchinson::cantor_ifs;
    use crate::nadic::atom_tree;

    #[test]
    fn bank_roundtrip() {
        for fb in [fourier_basis_bank(3).unwrap(), daubechies4_bank()] {
            let text = bank_to_json(&fb);
            let back = bank_from_json(&text).unwrap();
            assert_eq!(fb, back);
        }
    }

    #[test]
    fn bank_count_mismatch_rejected() {
        let text = r#"{ "n": 3, "filters": [ { "min_degree": 0, "coeffs": [[1.0, 0.0]] } ] }"#;
        assert!(matches!(bank_from_json(text), Err(Error::MalformedBank(_))));
    }

    #[test]
    fn bank_unknown_key_rejected() {
        let text = r#"{ "n": 2, "filters": [], "extra": 1 }"#;
        assert!(matches!(bank_from_json(text), Err(Error::Json(_))));
    }

    #[test]
    fn vector_roundtrip() {
        let f = CoeffVector::new([
            (-4, Complex64::new(0.25, -1.5)),
            (0, Complex64::new(1.0, 0.0)),
        ]);
        let back = vector_from_json(&vector_to_json(&f)).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn ifs_roundtrip() {
        let ifs = cantor_ifs();
        let back = ifs_from_json(&ifs_to_json(&ifs)).unwrap();
        assert_eq!(ifs, back);
    }

    #[test]
    fn atoms_csv_shape_for_dirac() {
        let fb = crate::filterbank::monomial_bank(2).unwrap();
        let mu = atom_tree(&fb, &CoeffVector::basis(0), 3, 0.0).unwrap();
        let mut buf = Vec::new();
        write_atoms_csv(&mu, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "numerator,depth,base,position_float,mass\n0,3,2,0.0,1.0\n"
        );
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = std::env::temp_dir().join(format!("ifsm-io-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
