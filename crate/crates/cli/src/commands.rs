use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use chainstat::ensemble::{self, EnsembleParams};
use chainstat::format::format_g17;
use chainstat::montecarlo::{self, empirical_stats, harmonic_spread_experiment, stream_rng};
use chainstat::sweep;
use chainstat::validation::run_validation;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{in_module, CliError};

type CmdResult = Result<(), CliError>;

struct Output {
    path: Option<PathBuf>,
    inner: Box<dyn Write>,
}

impl Output {
    fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Output {
            path: path.map(Path::to_path_buf),
            inner,
        })
    }

    fn row(&mut self, cells: &[String]) -> CmdResult {
        let line = cells.join(",");
        writeln!(self.inner, "{line}").map_err(|e| self.err(e))
    }

    fn finish(mut self) -> CmdResult {
        self.inner.flush().map_err(|e| self.err(e))
    }

    fn err(&self, e: io::Error) -> CliError {
        io_err(self.path.as_deref().unwrap_or(Path::new("<stdout>")), e)
    }
}

fn io_err(p: &Path, source: io::Error) -> CliError {
    CliError::Io {
        path: p.to_path_buf(),
        source,
    }
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn sweep_temperature(cfg: &RunConfig) -> CmdResult {
    let s = in_module(
        "ensemble",
        sweep::temperature_sweep(&cfg.potential, &cfg.temperatures, &cfg.quadrature),
    )?;
    let mut out = Output::open(cfg.output.as_deref())?;
    out.row(&header(&["T", "m_quadrature", "m_laplace", "residual"]))?;
    for r in &s.rows {
        out.row(&[
            format_g17(r.temperature),
            format_g17(r.m_quadrature),
            format_g17(r.m_laplace),
            format_g17(r.residual),
        ])?;
    }
    out.finish()?;
    let rel = if s.m1 != 0.0 {
        format!(
            " (relative deviation {:.3e})",
            ((s.slope - s.m1) / s.m1).abs()
        )
    } else {
        String::new()
    };
    eprintln!(
        "slope of m - a over {} point(s) of the smallest decade: {}; m1 = {}{rel}",
        s.fit_points.len(),
        format_g17(s.slope),
        format_g17(s.m1)
    );
    if let Some((s1, s2)) = s.slope_quadratic {
        eprintln!(
            "with a T^2 term (remainder assumed O(T^2)): linear {}, quadratic {}",
            format_g17(s1),
            format_g17(s2)
        );
    }
    Ok(())
}

pub fn sweep_force(cfg: &RunConfig) -> CmdResult {
    let s = in_module(
        "ensemble",
        sweep::force_sweep(
            &cfg.potential,
            cfg.temperature,
            &cfg.forces,
            &cfg.quadrature,
        ),
    )?;
    let mut out = Output::open(cfg.output.as_deref())?;
    out.row(&header(&["F", "m", "elastic_expansion", "R_F"]))?;
    for r in &s.rows {
        out.row(&[
            format_g17(r.force),
            format_g17(r.mean),
            format_g17(r.elastic_expansion),
            format_g17(r.linear_response),
        ])?;
    }
    out.finish()?;
    eprintln!(
        "slope of m(T,F) - m(T,0) over {} point(s): {}; elastic modulus R = {} (relative deviation {:.3e})",
        s.fit_points.len(),
        format_g17(s.slope),
        format_g17(s.modulus),
        ((s.slope - s.modulus) / s.modulus).abs()
    );
    Ok(())
}

#[derive(Serialize)]
struct SampleSummary {
    replicas: usize,
    #[serde(rename = "N")]
    n: usize,
    mean_length: f64,
    stderr: Option<f64>,
    expected_length: f64,
    deviation_in_stderr: Option<f64>,
}

pub fn sample(cfg: &RunConfig) -> CmdResult {
    let path = cfg
        .output
        .as_deref()
        .ok_or_else(|| CliError::usage("sample needs an output path (--out)"))?;
    if path.extension().is_some_and(|e| e == "json") {
        return Err(CliError::usage(
            "sample output must not end in .json (used for the sidecar)",
        ));
    }
    let e = in_module(
        "ensemble",
        EnsembleParams::from_temperature(cfg.temperature, cfg.force),
    )?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let chains = in_module(
        "montecarlo",
        montecarlo::sample_replicas(&cfg.potential, e, cfg.n, cfg.replicas, cfg.seed),
    )?;

    for c in &chains {
        let p = if cfg.replicas == 1 {
            path.to_path_buf()
        } else {
            replica_path(path, c.stream)
        };
        let file = File::create(&p).map_err(|err| io_err(&p, err))?;
        let mut w = BufWriter::new(file);
        montecarlo::write_chain_csv(&mut w, c)
            .and_then(|_| w.flush())
            .map_err(|err| io_err(&p, err))?;
    }
    write_json(&path.with_extension("json"), &chains[0].provenance)?;

    let lengths: Vec<f64> = chains.iter().map(|c| c.total_length()).collect();
    let mean_length = lengths.iter().sum::<f64>() / lengths.len() as f64;
    let stderr = (lengths.len() > 1)
        .then(|| empirical_stats(&lengths).map(|s| s.stderr))
        .transpose()
        .map_err(|source| CliError::Compute {
            module: "montecarlo",
            source,
        })?;
    let expected_length = in_module(
        "ensemble",
        ensemble::chain_length(&cfg.potential, cfg.temperature, cfg.force, cfg.n as u64),
    )?;
    let summary = SampleSummary {
        replicas: cfg.replicas,
        n: cfg.n,
        mean_length,
        stderr,
        expected_length,
        deviation_in_stderr: stderr.map(|s| (mean_length - expected_length).abs() / s),
    };
    write_json(&summary_path(path), &summary)?;
    eprintln!(
        "{} chain(s) of N = {}: mean length {}, expected {}",
        cfg.replicas,
        cfg.n,
        format_g17(mean_length),
        format_g17(expected_length)
    );
    if let (Some(s), Some(d)) = (summary.stderr, summary.deviation_in_stderr) {
        eprintln!("stderr {}, deviation {:.3} stderr", format_g17(s), d);
    }
    Ok(())
}

fn with_stem_suffix(path: &Path, suffix: &str, ext: Option<&str>) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = ext
        .map(str::to_string)
        .or_else(|| path.extension().map(|e| e.to_string_lossy().into_owned()));
    let name = match ext {
        Some(e) => format!("{stem}{suffix}.{e}"),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

/// `chain.csv` -> `chain_r007.csv`.
pub fn replica_path(path: &Path, replica: u64) -> PathBuf {
    with_stem_suffix(path, &format!("_r{replica:03}"), None)
}

/// `chain.csv` -> `chain.summary.json`.
pub fn summary_path(path: &Path) -> PathBuf {
    with_stem_suffix(path, ".summary", Some("json"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn harmonic_demo(cfg: &RunConfig) -> CmdResult {
    let mut out = Output::open(cfg.output.as_deref())?;
    out.row(&header(&["N", "tail_model", "ratio"]))?;
    let label = cfg.tail_model.label();
    for &n in &cfg.n_grid {
        let mut close = 0;
        for s in 0..cfg.seeds as u64 {
            let r = in_module(
                "montecarlo",
                harmonic_spread_experiment(cfg.tail_model, cfg.a, n, &mut stream_rng(cfg.seed, s)),
            )?;
            if (r.ratio - 1.0).abs() < 1e-2 {
                close += 1;
            }
            out.row(&[n.to_string(), label.clone(), format_g17(r.ratio)])?;
        }
        eprintln!(
            "N = {n}: {close} of {} seeds with |ratio - 1| < 1e-2",
            cfg.seeds
        );
    }
    out.finish()
}

pub fn validate(cfg: &RunConfig) -> CmdResult {
    let report = in_module("validation", run_validation(&cfg.validation()))?;
    let stdout = io::stdout();
    let mut w = stdout.lock();
    let mut print =
        |line: String| writeln!(w, "{line}").map_err(|e| io_err(Path::new("<stdout>"), e));
    for c in &report.checks {
        print(format!(
            "{} [{}] {}: measured {}, reference {}, {} {:.3e} (tol {:.3e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.criterion,
            c.name,
            format_g17(c.measured),
            format_g17(c.reference),
            c.metric,
            c.deviation,
            c.tolerance
        ))?;
    }
    if let Some(p) = cfg.output.as_deref() {
        write_json(p, &report)?;
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::ChecksFailed {
            failed,
            total: report.checks.len(),
        });
    }
    print(format!("all {} checks passed", report.checks.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_paths() {
        assert_eq!(
            replica_path(Path::new("out/chain.csv"), 7),
            Path::new("out/chain_r007.csv")
        );
        assert_eq!(
            summary_path(Path::new("out/chain.csv")),
            Path::new("out/chain.summary.json")
        );
        assert_eq!(
            replica_path(Path::new("chain"), 12),
            Path::new("chain_r012")
        );
    }
}
