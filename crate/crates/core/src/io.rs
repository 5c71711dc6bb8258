//! On-disk formats: sparse field JSON, norm-series CSV, and pretty JSON
//! helpers.
//!
//! Field files store the Hermitian half only, as `(k, re, im)` triples in
//! lexicographic `k` order per component; zero coefficients are omitted.
//! Values pass through `serde_json`'s shortest-round-trip float encoding,
//! so a write/read cycle is bit-exact. CSV floats are printed with 17
//! significant digits (`{:.16e}`) for the same reason.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field::SpectralVectorField;
use crate::lattice::{TruncatedLattice, WaveVec};
use crate::scalar::Real;
use crate::solver::NormSample;
use crate::Result;

/// Serialized form of a spectral vector field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub dim: usize,
    pub n: i32,
    /// One sparse coefficient list per velocity component, each sorted
    /// lexicographically by wave vector.
    pub components: Vec<Vec<(WaveVec, f64, f64)>>,
}

pub fn field_to_record<T: Real>(f: &SpectralVectorField<T>) -> FieldRecord {
    let lattice = f.lattice();
    let dim = lattice.dim();
    let mut slots: Vec<(WaveVec, usize)> = lattice.iter_slots().map(|(s, k)| (k, s)).collect();
    slots.sort_by_key(|(k, _)| *k);
    let mut components = vec![Vec::new(); dim];
    for (k, slot) in slots {
        let coeffs = f.slot(slot);
        for (c, comp) in components.iter_mut().enumerate() {
            let v = coeffs[c];
            if v.re != T::zero() || v.im != T::zero() {
                comp.push((k, v.re.to_f64().unwrap(), v.im.to_f64().unwrap()));
            }
        }
    }
    FieldRecord {
        dim,
        n: lattice.cutoff(),
        components,
    }
}

pub fn record_to_field<T: Real>(rec: &FieldRecord) -> Result<SpectralVectorField<T>> {
    let lattice = TruncatedLattice::new(rec.dim, rec.n)?;
    if rec.components.len() != rec.dim {
        return Err(Error::InvalidConfig(format!(
            "field record declares dim = {} but carries {} components",
            rec.dim,
            rec.components.len()
        )));
    }
    let mut f = SpectralVectorField::zeros(lattice);
    for (c, comp) in rec.components.iter().enumerate() {
        for &(k, re, im) in comp {
            let off = lattice.offset(k).ok_or_else(|| {
                Error::InvalidConfig(format!("wave vector {k:?} outside the |k|∞ ≤ {} lattice", rec.n))
            })?;
            let slot = off.unsigned_abs();
            let v = num_complex::Complex::new(T::lit(re), T::lit(im));
            f.slot_mut(slot)[c] = if off >= 0 { v } else { v.conj() };
        }
    }
    Ok(f)
}

pub fn write_field_json<T: Real>(path: &Path, f: &SpectralVectorField<T>) -> Result<()> {
    write_json(path, &field_to_record(f))
}

pub fn read_field_json<T: Real>(path: &Path) -> Result<SpectralVectorField<T>> {
    record_to_field(&read_json(path)?)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<D: DeserializeOwned>(path: &Path) -> Result<D> {
    Ok(serde_json::from_reader(File::open(path)?)?)
}

/// `t,tau,l2,h_r,gevrey_r,gevrey_r_plus_1,dissipation_cum` at 17
/// significant digits per value.
pub fn write_norms_csv<T: Real>(path: &Path, samples: &[NormSample<T>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,tau,l2,h_r,gevrey_r,gevrey_r_plus_1,dissipation_cum")?;
    for s in samples {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.t, s.tau, s.l2, s.h_r, s.gevrey_r, s.gevrey_r_plus_1, s.dissipation_cum
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rand_field::{random_gevrey_field, RandomFieldSpec};

    #[test]
    fn field_json_round_trips_bit_exactly() {
        let lat = TruncatedLattice::new(2, 6).unwrap();
        let spec = RandomFieldSpec {
            s: 2.0,
            tau0: 0.3,
            decay: 2.0,
            amplitude: 0.8,
        };
        let f = random_gevrey_field::<f64>(lat, &spec, 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.json");
        write_field_json(&path, &f).unwrap();
        let g: SpectralVectorField<f64> = read_field_json(&path).unwrap();
        assert_eq!(f, g);
        // A second write of the re-read field is byte-identical.
        let path2 = dir.path().join("field2.json");
        write_field_json(&path2, &g).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn record_entries_are_sorted_and_sparse() {
        let lat = TruncatedLattice::new(3, 2).unwrap();
        let f = crate::exact::beltrami_velocity::<f64>(lat, 0.0, 0.0);
        let rec = field_to_record(&f);
        assert_eq!(rec.dim, 3);
        assert_eq!(rec.n, 2);
        for comp in &rec.components {
            for pair in comp.windows(2) {
                assert!(pair[0].0 < pair[1].0, "entries out of order");
            }
            for &(_, re, im) in comp {
                assert!(re != 0.0 || im != 0.0, "zero entry stored");
            }
        }
    }

    #[test]
    fn rejects_vectors_outside_the_lattice() {
        let rec = FieldRecord {
            dim: 2,
            n: 2,
            components: vec![vec![([5, 0, 0], 1.0, 0.0)], vec![]],
        };
        assert!(record_to_field::<f64>(&rec).is_err());
        let rec = FieldRecord {
            dim: 2,
            n: 2,
            components: vec![vec![]],
        };
        assert!(record_to_field::<f64>(&rec).is_err());
    }

    #[test]
    fn norms_csv_has_full_precision_rows() {
        let sample = NormSample {
            t: 0.1,
            tau: 0.25,
            l2: 1.0 / 3.0,
            h_r: 2.0f64.sqrt(),
            gevrey_r: 1.2345678901234567,
            gevrey_r_plus_1: 7.0,
            dissipation_cum: 1e-17,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("norms.csv");
        write_norms_csv::<f64>(&path, &[sample]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,tau,l2,h_r,gevrey_r,gevrey_r_plus_1,dissipation_cum"
        );
        let row = lines.next().unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 7);
        // 17 significant digits reproduce the doubles exactly.
        assert_eq!(fields[2].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(fields[3].parse::<f64>().unwrap(), 2.0f64.sqrt());
        assert_eq!(fields[4].parse::<f64>().unwrap(), 1.2345678901234567);
    }
}
