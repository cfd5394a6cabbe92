use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use stokes_sheet::{FluidParams, InterfaceProfile};

/// Seventeen significant digits, enough to round-trip any double.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<I>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Metadata written next to every CSV file.
pub fn sidecar(command: &str, params: &FluidParams, n: usize, columns: &[String], extra: Value) -> Value {
    let mut v = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "params": {
            "mu_plus": params.mu_plus,
            "mu_minus": params.mu_minus,
            "rho_plus": params.rho_plus,
            "rho_minus": params.rho_minus,
            "sigma": params.sigma,
            "g": params.g,
            "theta": params.theta(),
        },
        "grid": { "n": n },
        "columns": columns,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// A profile on disk with the state needed to resume a run from it.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub profile: InterfaceProfile,
    pub t: f64,
    pub dt: f64,
    pub previous: Option<InterfaceProfile>,
}

#[derive(Deserialize)]
struct SnapshotMeta {
    t: f64,
    dt: f64,
    previous: Option<Vec<f64>>,
}

pub fn write_snapshot(path: &Path, snap: &Snapshot, params: &FluidParams, extra: Value) -> Result<()> {
    let header = columns(&["xi", "f"]);
    let rows = snap
        .profile
        .nodes()
        .into_iter()
        .zip(snap.profile.samples())
        .map(|(x, v)| vec![num(x), num(*v)]);
    write_csv(path, &header, rows)?;
    let mut meta = json!({
        "t": snap.t,
        "dt": snap.dt,
        "previous": snap.previous.as_ref().map(|p| p.samples().to_vec()),
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
        m.extend(e);
    }
    write_json(&sidecar_path(path), &sidecar("simulate", params, snap.profile.n(), &header, meta))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["xi", "f"] {
        bail!("{}: expected columns xi,f", path.display());
    }
    let mut samples = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let v: f64 = rec.get(1).context("missing f column")?.trim().parse().context("bad value in column f")?;
        samples.push(v);
    }
    let profile = InterfaceProfile::new(samples)?;
    let meta_path = sidecar_path(path);
    let text = fs::read_to_string(&meta_path).with_context(|| format!("reading {}", meta_path.display()))?;
    let meta: SnapshotMeta = serde_json::from_str(&text).with_context(|| format!("parsing {}", meta_path.display()))?;
    let previous = meta.previous.map(InterfaceProfile::new).transpose()?;
    if let Some(p) = &previous {
        if p.n() != profile.n() {
            bail!("previous profile has {} points, snapshot has {}", p.n(), profile.n());
        }
    }
    Ok(Snapshot {
        profile,
        t: meta.t,
        dt: meta.dt,
        previous,
    })
}
