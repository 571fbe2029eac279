//! The four subcommands. Each writes its artifacts plus `manifest.json`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fracharm_core::export::{spectrum_json, write_spectrum_csv, SpectrumMeta};
use fracharm_core::{
    apply_filter, pmfht_forward, smoothness_energy, write_ply_to, FilterSpec, PointCloud,
};
use num_complex::Complex;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{BasisArgs, FilterArgs, PipelineArgs, PlotKind, SpectrumArgs};
use crate::colormap::colorize;
use crate::error::CliError;
use crate::pipeline::{operator_summary, Prepared, Spectral};
use crate::svg::stem_plot;

/// Output directory that remembers what was written to it.
struct OutDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(CliError::output(root))?;
        Ok(OutDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(CliError::output(&path))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_ply(
        &mut self,
        name: &str,
        cloud: &PointCloud,
        args: &PipelineArgs,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        write_ply_to(cloud, &mut buf, args.format.into())
            .map_err(CliError::output(self.root.join(name)))?;
        self.write(name, &buf)
    }

    fn write_csv(
        &mut self,
        name: &str,
        lambdas: &[f64],
        coeffs: &[Complex<f64>],
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, lambdas, coeffs)
            .map_err(CliError::output(self.root.join(name)))?;
        self.write(name, &buf)
    }

    fn write_json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn dump_matrices(&mut self, spectral: &Spectral) -> Result<(), CliError> {
        let (mut q, mut b) = (Vec::new(), Vec::new());
        spectral
            .pair
            .write_matrix_market(&mut q, &mut b)
            .map_err(CliError::output(&self.root))?;
        self.write("Q.mtx", &q)?;
        self.write("B.mtx", &b)
    }

    /// Writes `manifest.json`, which is not listed among its own outputs.
    fn finish(
        self,
        command: &str,
        config: &impl Serialize,
        prep: &Prepared,
        extra: Map<String, Value>,
        warnings: &[String],
    ) -> Result<Vec<String>, CliError> {
        let mut doc = json!({
            "tool": "fracharm",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
            "input": {
                "sha256": prep.input_sha256,
                "points": prep.input_points,
            },
            "resolved": prep.resolved(),
            "outputs": self.files,
            "warnings": warnings,
        });
        doc.as_object_mut().expect("object").extend(extra);
        let mut out = self;
        out.write_json("manifest.json", &doc)?;
        Ok(out.files)
    }
}

/// File-name fragment for an order, e.g. `a0.25`.
pub fn order_label(a: f64) -> String {
    format!("a{a}")
}

/// File-name-safe form of a channel name.
pub fn channel_label(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn meta(prep: &Prepared, order: f64) -> SpectrumMeta {
    SpectrumMeta {
        n: prep.len(),
        t: prep.t,
        r: prep.r,
        delta: prep.delta,
        order,
    }
}

fn feasibility_warning(prep: &Prepared) -> Option<String> {
    (!prep.feasible()).then(|| {
        format!(
            "N = {} exceeds the dense eigensolve limit of {}; basis, spectrum and filter will fail without --target-points",
            prep.len(),
            prep.dense_limit
        )
    })
}

fn energies(
    spectral: &Spectral,
    names: &[String],
    channels: &[Vec<f64>],
) -> Result<Map<String, Value>, CliError> {
    names
        .iter()
        .zip(channels)
        .map(|(n, c)| {
            let e = smoothness_energy(&spectral.basis, c)
                .map_err(CliError::stage("smoothness energy"))?;
            Ok((n.clone(), json!(e)))
        })
        .collect()
}

fn summary_line(out: &mut dyn Write, dir: &Path, files: &[String]) -> Result<(), CliError> {
    writeln!(out, "wrote {} files to {}", files.len(), dir.display())
        .map_err(CliError::output("stdout"))
}

pub fn info(args: &PipelineArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let prep = Prepared::load(args)?;
    let (lo, hi) = prep.cloud.bounding_box();
    let mut report = String::new();
    let mut line = |s: String| {
        report.push_str(&s);
        report.push('\n');
    };
    line(format!("input: {}", args.input.display()));
    line(format!("input points: {}", prep.input_points));
    line(format!("N: {}", prep.len()));
    line(format!(
        "bounding box: [{}, {}, {}] .. [{}, {}, {}]",
        lo[0], lo[1], lo[2], hi[0], hi[1], hi[2]
    ));
    line(format!(
        "epsilon: {} ({})",
        prep.epsilon,
        if prep.epsilon_estimated {
            "estimated"
        } else {
            "given"
        }
    ));
    line(format!("r: {}", prep.r));
    line(format!("delta: {}", prep.delta));
    line(format!("clip: {}", prep.clip));
    line(format!("t: {}", prep.t));
    let warning = feasibility_warning(&prep);
    match &warning {
        None => line(format!(
            "dense eigensolve: feasible (N <= {})",
            prep.dense_limit
        )),
        Some(w) => line(format!("dense eigensolve: warning: {w}")),
    }
    out.write_all(report.as_bytes())
        .map_err(CliError::output("stdout"))?;

    if let Some(dir) = &args.out {
        let mut extra = Map::new();
        extra.insert("bounding_box".into(), json!({ "min": lo, "max": hi }));
        extra.insert("feasible".into(), json!(prep.feasible()));
        let warnings: Vec<String> = warning.into_iter().collect();
        OutDir::create(dir)?.finish("info", args, &prep, extra, &warnings)?;
    }
    Ok(())
}

pub fn basis(args: &BasisArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = &args.pipeline;
    let dir = p.out_dir()?;
    let prep = Prepared::load(p)?;
    let modes = args.selected_modes();
    if let Some(k) = modes.iter().find(|&&k| k >= prep.len()) {
        return Err(CliError::Config(format!(
            "mode {k} out of range for N = {}",
            prep.len()
        )));
    }
    let spectral = prep.spectral()?;
    let basis = &spectral.basis;
    let mut od = OutDir::create(dir)?;

    let mut ranges = Map::new();
    for &k in &modes {
        let values = basis.mode(k);
        let cloud = prep
            .cloud
            .clone()
            .with_colors(colorize(args.colormap, &values))
            .map_err(CliError::stage("colour mapping"))?;
        od.write_ply(&format!("H{k}.ply"), &cloud, p)?;
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        ranges.insert(
            k.to_string(),
            json!({ "lambda": basis.lambdas[k], "min": lo, "max": hi }),
        );
    }
    let mut csv = String::from("mode_index,lambda\n");
    for (k, l) in basis.lambdas.iter().enumerate() {
        csv.push_str(&format!("{k},{l}\n"));
    }
    od.write("lambdas.csv", csv.as_bytes())?;
    if p.dump_matrices {
        od.dump_matrices(&spectral)?;
    }

    let mut extra = Map::new();
    extra.insert("basis".into(), spectral.summary());
    extra.insert("modes".into(), Value::Object(ranges));
    let files = od.finish("basis", args, &prep, extra, &[])?;
    summary_line(out, dir, &files)
}

pub fn spectrum(args: &SpectrumArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = &args.pipeline;
    let dir = p.out_dir()?;
    let orders = args.orders.resolve()?;
    let prep = Prepared::load(p)?;
    let channels = prep.channels(&p.channels)?;
    let spectral = prep.spectral()?;
    let op = spectral.operator(p.cond_limit)?;
    let lambdas = &spectral.basis.lambdas;
    let names: Vec<&str> = p.channels.iter().map(String::as_str).collect();
    let mut od = OutDir::create(dir)?;
    let mut warnings = Vec::new();

    for &a in &orders {
        let label = order_label(a);
        let sig =
            pmfht_forward(&op, &channels, a).map_err(CliError::stage("fractional transform"))?;
        for (name, coeffs) in names.iter().zip(&sig.coeffs) {
            od.write_csv(
                &format!("spectrum_{label}_{}.csv", channel_label(name)),
                lambdas,
                coeffs,
            )?;
        }
        od.write_json(
            &format!("spectrum_{label}.json"),
            &spectrum_json(meta(&prep, a), lambdas, &sig, &names),
        )?;
        let (what, pick): (&str, fn(&Complex<f64>) -> f64) = match args.plot {
            PlotKind::Magnitude => ("|coefficient|", |z| z.norm()),
            PlotKind::Real => ("Re coefficient", |z| z.re),
            PlotKind::Imag => ("Im coefficient", |z| z.im),
        };
        let series: Vec<(&str, Vec<f64>)> = names
            .iter()
            .zip(&sig.coeffs)
            .map(|(n, c)| (*n, c.iter().map(pick).collect()))
            .collect();
        let svg = stem_plot(&format!("fractional spectrum, order {a}"), what, &series);
        od.write(&format!("spectrum_{label}.svg"), svg.as_bytes())?;
        let cut = op.branch_cut_modes(a);
        if !cut.is_empty() {
            warnings.push(format!(
                "order {a}: {} eigenvalues on the branch cut, principal value used (modes {:?})",
                cut.len(),
                cut
            ));
        }
    }
    if p.dump_matrices {
        od.dump_matrices(&spectral)?;
    }

    let mut extra = Map::new();
    extra.insert("orders".into(), json!(orders));
    extra.insert("basis".into(), spectral.summary());
    extra.insert("operator".into(), operator_summary(&op));
    extra.insert(
        "smoothness_energy".into(),
        Value::Object(energies(&spectral, &p.channels, &channels)?),
    );
    let files = od.finish("spectrum", args, &prep, extra, &warnings)?;
    summary_line(out, dir, &files)
}

pub fn filter(args: &FilterArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = &args.pipeline;
    let dir = p.out_dir()?;
    args.validate()?;
    let orders = args.orders.resolve()?;
    let prep = Prepared::load(p)?;
    let (lo, hi) = args.cutoffs(prep.len())?;
    let channels = prep.channels(&p.channels)?;
    let spectral = prep.spectral()?;
    let op = spectral.operator(p.cond_limit)?;
    let lambdas = &spectral.basis.lambdas;
    let mut od = OutDir::create(dir)?;
    let mut warnings = Vec::new();
    let energy_before = energies(&spectral, &p.channels, &channels)?;

    let mut runs = Vec::new();
    for &a in &orders {
        let label = order_label(a);
        let spec = FilterSpec {
            gain_passband: args.gain_pass,
            gain_stopband: args.gain_stop,
            rolloff: args.rolloff,
            ..FilterSpec::new(args.filter, lo, hi, a)
        };
        let result = apply_filter(&op, &spectral.basis, &channels, &spec)
            .map_err(CliError::stage("filter"))?;
        let filtered = &result.reconstruction.values;
        od.write_ply(
            &format!("filtered_{label}.ply"),
            &prep.with_channels(&p.channels, filtered)?,
            p,
        )?;
        for (k, name) in p.channels.iter().enumerate() {
            let ch = channel_label(name);
            od.write_csv(
                &format!("spectrum_before_{label}_{ch}.csv"),
                lambdas,
                &result.before.coeffs[k],
            )?;
            od.write_csv(
                &format!("spectrum_after_{label}_{ch}.csv"),
                lambdas,
                &result.after.coeffs[k],
            )?;
        }
        if let Some(w) = &result.reconstruction.warning {
            warnings.push(format!("order {a}: {w}"));
        }
        let cut = op.branch_cut_modes(a);
        if !cut.is_empty() {
            warnings.push(format!(
                "order {a}: {} eigenvalues on the branch cut, principal value used",
                cut.len()
            ));
        }
        runs.push(json!({
            "order": a,
            "imag_residue": result.reconstruction.imag_residue,
            "smoothness_energy_after": energies(&spectral, &p.channels, filtered)?,
        }));
    }
    if p.dump_matrices {
        od.dump_matrices(&spectral)?;
    }

    let mut extra = Map::new();
    extra.insert(
        "filter".into(),
        json!({
            "kind": args.filter,
            "cutoff_lo": lo,
            "cutoff_hi": hi,
            "gain_passband": args.gain_pass,
            "gain_stopband": args.gain_stop,
            "rolloff": args.rolloff,
        }),
    );
    extra.insert("basis".into(), spectral.summary());
    extra.insert("operator".into(), operator_summary(&op));
    extra.insert(
        "smoothness_energy_before".into(),
        Value::Object(energy_before),
    );
    extra.insert("runs".into(), Value::Array(runs));
    let files = od.finish("filter", args, &prep, extra, &warnings)?;
    summary_line(out, dir, &files)
}
