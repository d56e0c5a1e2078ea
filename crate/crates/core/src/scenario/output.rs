use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{ScenarioError, ScenarioOutput};

/// Written next to the other outputs when any solver aborted.
pub const FAILED_MARKER: &str = "FAILED";

fn header(w: &mut impl Write, out: &ScenarioOutput, backend: &str) -> std::io::Result<()> {
    let m = &out.manifest;
    writeln!(w, "# scenario: {}", m.config.name)?;
    writeln!(w, "# backend: {backend}")?;
    writeln!(w, "# config_hash: {}", m.config_hash)?;
    writeln!(w, "# version: {}", m.version)
}

fn create(path: &Path) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Write `manifest.json`, `diagnostics.json` and the per-backend CSV files.
pub fn write_outputs(out: &ScenarioOutput, dir: &Path) -> Result<(), ScenarioError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&out.manifest)?)?;

    let gamma = out.manifest.setup.emitter.gamma();
    for (b, run) in &out.runs {
        let name = b.as_str();

        let mut w = create(&dir.join(format!("spectrum_{name}.csv")))?;
        header(&mut w, out, name)?;
        if run.spectra.truncated {
            writeln!(w, "# warning: a detector trace was cut off before the field decayed")?;
        }
        writeln!(w, "delta[gamma],R,T,A")?;
        let s = &run.spectra;
        for k in 0..s.len() {
            writeln!(w, "{:.6},{:.10e},{:.10e},{:.10e}", s.delta[k], s.r[k], s.t[k], s.a[k])?;
        }
        w.flush()?;

        let mut w = create(&dir.join(format!("probe_{name}.csv")))?;
        header(&mut w, out, name)?;
        writeln!(w, "t[1/gamma],rho11,rho22,abs_rho12,gamma1[1/s],gamma2[1/s],norm")?;
        for (t, p) in run.records.times.iter().zip(&run.records.probe) {
            writeln!(
                w,
                "{:.8e},{:.10e},{:.10e},{:.10e},{:.6e},{:.6e},{:.12}",
                t * gamma,
                p.rho11,
                p.rho22,
                p.rho12.norm(),
                p.gamma1,
                p.gamma2,
                p.norm
            )?;
        }
        w.flush()?;

        if let Some(err) = &run.coherence_error {
            let mut w = create(&dir.join(format!("coherr_{name}.csv")))?;
            header(&mut w, out, name)?;
            writeln!(w, "t[1/gamma],delta_rho12")?;
            for (t, e) in run.records.times.iter().zip(err) {
                writeln!(w, "{:.8e},{:.10e}", t * gamma, e)?;
            }
            w.flush()?;
        }
    }

    let mut diag = serde_json::Map::new();
    diag.insert("vacuum".into(), serde_json::to_value(&out.vacuum.diagnostics)?);
    for (b, run) in &out.runs {
        diag.insert(b.as_str().into(), serde_json::to_value(&run.records.diagnostics)?);
    }
    for (b, why) in &out.failures {
        diag.insert(b.as_str().into(), serde_json::json!({ "error": why }));
    }
    fs::write(dir.join("diagnostics.json"), serde_json::to_string_pretty(&diag)?)?;

    let marker = dir.join(FAILED_MARKER);
    if out.failures.is_empty() {
        if marker.exists() {
            fs::remove_file(marker)?;
        }
    } else {
        let text: String = out.failures.iter().map(|(b, e)| format!("{b}: {e}\n")).collect();
        fs::write(marker, text)?;
    }
    Ok(())
}
