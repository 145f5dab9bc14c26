//! Output files: energy ledger, node snapshots, adhesive history and the run manifest.
//!
//! Floats are written with Rust's shortest round-trip formatting, so identical runs
//! give byte-identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use leapfrog_core::elastic2d::{node_fields, ElasticLayout, NodeFields};
use leapfrog_core::EnergyLedger;

pub const ENERGY_HEADER: &str = "k,t,twisted_kinetic,stored,dissipated_cum,work_cum,a_coeff,imbalance";
pub const SNAPSHOT_HEADER: &str = "x,y,vnorm,divv,rotv";
pub const ALPHA_HEADER: &str = "t,segment_index,alpha,sigma_x,sigma_y";

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub struct EnergyWriter {
    out: BufWriter<File>,
}

impl EnergyWriter {
    pub fn create(path: &Path) -> io::Result<Self> {
        let mut out = create(path)?;
        writeln!(out, "{ENERGY_HEADER}")?;
        Ok(Self { out })
    }

    pub fn row(&mut self, r: &EnergyLedger) -> io::Result<()> {
        writeln!(
            self.out,
            "{},{},{},{},{},{},{},{}",
            r.k, r.t, r.twisted_kinetic, r.stored, r.dissipated_cum, r.work_cum, r.a_coeff, r.imbalance
        )
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

pub struct AlphaWriter {
    out: BufWriter<File>,
}

impl AlphaWriter {
    pub fn create(path: &Path) -> io::Result<Self> {
        let mut out = create(path)?;
        writeln!(out, "{ALPHA_HEADER}")?;
        Ok(Self { out })
    }

    pub fn row(&mut self, t: f64, segment: usize, alpha: f64, stress: [f64; 2]) -> io::Result<()> {
        writeln!(self.out, "{t},{segment},{alpha},{},{}", stress[0], stress[1])
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// Node-grid rows in the order `x` fastest, then `y`.
pub fn write_snapshot_csv(path: &Path, layout: &ElasticLayout, fields: &NodeFields) -> io::Result<()> {
    let g = &layout.grid;
    let mut out = create(path)?;
    writeln!(out, "{SNAPSHOT_HEADER}")?;
    for j in 0..=g.ny {
        for i in 0..=g.nx {
            let n = g.node_index(i, j);
            let [x, y] = g.node_position(i, j);
            writeln!(out, "{x},{y},{},{},{}", fields.vnorm[n], fields.div[n], fields.rot[n])?;
        }
    }
    out.flush()
}

/// ASCII VTK image data on the node grid with the three point fields.
pub fn write_snapshot_vti(path: &Path, layout: &ElasticLayout, fields: &NodeFields) -> io::Result<()> {
    let g = &layout.grid;
    let mut out = create(path)?;
    let extent = format!("0 {} 0 {} 0 0", g.nx, g.ny);
    writeln!(out, r#"<?xml version="1.0"?>"#)?;
    writeln!(out, r#"<VTKFile type="ImageData" version="0.1" byte_order="LittleEndian">"#)?;
    writeln!(
        out,
        r#"  <ImageData WholeExtent="{extent}" Origin="{} {} 0" Spacing="{} {} 1">"#,
        g.origin[0], g.origin[1], g.h, g.h
    )?;
    writeln!(out, r#"    <Piece Extent="{extent}">"#)?;
    writeln!(out, r#"      <PointData Scalars="vnorm">"#)?;
    for (name, data) in [("vnorm", &fields.vnorm), ("divv", &fields.div), ("rotv", &fields.rot)] {
        writeln!(out, r#"        <DataArray type="Float64" Name="{name}" format="ascii">"#)?;
        for row in data.chunks(g.nx + 1) {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(out, "          {}", line.join(" "))?;
        }
        writeln!(out, "        </DataArray>")?;
    }
    writeln!(out, "      </PointData>")?;
    writeln!(out, "    </Piece>")?;
    writeln!(out, "  </ImageData>")?;
    writeln!(out, "</VTKFile>")?;
    out.flush()
}

/// Writes the snapshot of velocity `v` at step `k` in the requested formats.
pub fn write_snapshot(dir: &Path, k: u64, layout: &ElasticLayout, v: &[f64], csv: bool, vti: bool) -> io::Result<()> {
    let fields = node_fields(layout, v);
    if csv {
        write_snapshot_csv(&dir.join(format!("snapshot_{k}.csv")), layout, &fields)?;
    }
    if vti {
        write_snapshot_vti(&dir.join(format!("snapshot_{k}.vti")), layout, &fields)?;
    }
    Ok(())
}

/// Flat `key=value` file, keys in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace('\n', " ");
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut out = create(path)?;
        for (k, v) in &self.entries {
            writeln!(out, "{k}={v}")?;
        }
        out.flush()
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self { entries }
    }
}

/// Reads back an energy CSV written by [`EnergyWriter`].
pub fn read_energy_csv(path: &Path) -> io::Result<Vec<EnergyLedger>> {
    let text = std::fs::read_to_string(path)?;
    let bad = |line: usize| io::Error::new(io::ErrorKind::InvalidData, format!("malformed energy row {line}"));
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(bad(n + 1));
        }
        let num = |i: usize| f[i].parse::<f64>().map_err(|_| bad(n + 1));
        rows.push(EnergyLedger {
            k: f[0].parse().map_err(|_| bad(n + 1))?,
            t: num(1)?,
            twisted_kinetic: num(2)?,
            stored: num(3)?,
            dissipated_cum: num(4)?,
            work_cum: num(5)?,
            a_coeff: num(6)?,
            imbalance: num(7)?,
        });
    }
    Ok(rows)
}
