//! Command-line front end: sampling, multipole analysis, Husimi maps,
//! closed-form baselines, ensemble runs, figure data, and scaling fits.
//!
//! Exit codes: 0 success, 2 usage or input parse error, 3 numerical-contract
//! violation, 4 I/O error.

mod figures;
mod manifest;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::RngCore;
use serde_json::json;

use majorana::engine::{fit_kmax_scaling, run_ensemble, FitFamily, HistogramScale, RunConfig};
use majorana::husimi::{multipoles_from_q, q_on_grid};
use majorana::io::{
    load_constellation, load_state, save_constellation, save_lengths, save_spectrum, save_state,
};
use majorana::multipole::{multipoles, MultipoleSpectrum};
use majorana::oracles::{oracle_report, OracleFamily, ORACLE_OBSERVABLES};
use majorana::states::state_from_constellation;
use majorana::{
    sample_cue, sample_majorana, sample_symmetric_projection, EnsembleKind, Error, HalfInt,
    RngStream, SphereGrid,
};

use figures::FigureOpts;
use manifest::ManifestBuilder;
use svg::Heatmap;

#[derive(Parser)]
#[command(
    name = "majorana",
    version,
    about = "Spin states as point constellations: build, analyze, sample, reproduce"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_spin(s: &str) -> Result<HalfInt, String> {
    let spin: HalfInt = s.parse()?;
    if spin.twice() < 1 {
        return Err("spin must be at least 1/2".into());
    }
    Ok(spin)
}

/// Comma-separated spins as one argument value.
#[derive(Clone)]
struct SpinList(Vec<HalfInt>);

impl std::str::FromStr for SpinList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|part| parse_spin(part.trim()))
            .collect::<Result<Vec<_>, _>>()
            .map(SpinList)
    }
}

fn default_workers() -> usize {
    std::env::var("MAJORANA_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1)
}

#[derive(Args)]
struct SeedArg {
    /// RNG seed; omitted seeds are drawn from the OS and recorded in the
    /// manifest.
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArg {
    fn resolve(&self) -> u64 {
        self.seed.unwrap_or_else(|| rand::thread_rng().next_u64())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw random states (and constellations where applicable) to CSV files.
    Sample {
        #[arg(long, value_parser = parse_spin)]
        spin: HalfInt,
        #[arg(long)]
        ensemble: EnsembleKind,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Multipole spectrum, cumulative distribution, quantumness, and K_max
    /// of a state or constellation file.
    Multipoles {
        /// Input CSV; the header decides whether it is a state (m,re,im) or
        /// a constellation (theta,phi).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Accept states whose norm deviates by more than 1e-6 and
        /// renormalize them.
        #[arg(long)]
        renormalize: bool,
    },
    /// Husimi function of a state or constellation on a sphere grid.
    Husimi {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Quadrature degree of the grid (defaults to max(4S, 160)).
        #[arg(long)]
        degree: Option<u32>,
        /// Also render an equirectangular SVG heatmap.
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        renormalize: bool,
    },
    /// Closed-form baselines without any sampling.
    Oracle {
        #[arg(long)]
        family: OracleFamily,
        #[arg(long, value_parser = parse_spin)]
        spin: HalfInt,
        /// One of A_M, L_K, E_mean, meansq_rho_Kq (default: all supported).
        #[arg(long)]
        observable: Option<String>,
        /// Rescale symmetric-projection mean lengths so the K >= 1 total
        /// matches the pure-state purity 2S/(2S+1).
        #[arg(long, value_name = "MODE")]
        renormalize: Option<String>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Monte Carlo ensemble run with full statistics output.
    Ensemble {
        #[arg(long, value_parser = parse_spin)]
        spin: HalfInt,
        #[arg(long)]
        ensemble: EnsembleKind,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        #[arg(long, default_value_t = 120)]
        bins: usize,
        #[arg(long, default_value = "log")]
        scale: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Reproduce the data behind one of the six study figures.
    Figure {
        /// Figure number, 1 through 6.
        fig: u8,
        /// Comma-separated spins (defaults documented per figure).
        #[arg(long)]
        spins: Option<SpinList>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Raise the sample count to the full-study 1.5e6 (hours of compute
        /// at large spins).
        #[arg(long)]
        paper_scale: bool,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        /// Constellation CSV adding a reference curve to figures 3 and 4.
        #[arg(long)]
        kings_file: Option<PathBuf>,
        /// Plot raw (unnormalized) symmetric-projection means in figure 5.
        #[arg(long)]
        raw_symproj: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Through-origin fit of the dominant multipole order against sqrt(S).
    Fit {
        /// majorana, cue, symproj, or coherent (deterministic baseline).
        #[arg(long, default_value = "majorana")]
        ensemble: String,
        #[arg(long, default_value = "9,16,25,36,49,60")]
        spins: SpinList,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Parse { .. } => 2,
                Error::Io(_) => 4,
                _ => 3,
            })
        }
    }
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn ensure_dir(dir: &Path) -> majorana::Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Loads either file format, keyed by the CSV header.
fn load_state_or_constellation(
    path: &Path,
    renormalize: bool,
) -> majorana::Result<majorana::SpinState> {
    let first = fs::read_to_string(path)?
        .lines()
        .next()
        .unwrap_or_default()
        .trim()
        .to_string();
    match first.as_str() {
        "m,re,im" => load_state(path, renormalize),
        "theta,phi" => state_from_constellation(&load_constellation(path)?),
        other => Err(Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("unrecognized header {other:?} (expected m,re,im or theta,phi)"),
        }),
    }
}

fn dispatch(command: Command) -> majorana::Result<()> {
    match command {
        Command::Sample {
            spin,
            ensemble,
            count,
            seed,
            out_dir,
        } => cmd_sample(spin, ensemble, count, seed.resolve(), &out_dir),
        Command::Multipoles {
            input,
            out_dir,
            renormalize,
        } => cmd_multipoles(&input, &out_dir, renormalize),
        Command::Husimi {
            input,
            out_dir,
            degree,
            svg,
            renormalize,
        } => cmd_husimi(&input, &out_dir, degree, svg, renormalize),
        Command::Oracle {
            family,
            spin,
            observable,
            renormalize,
            out_dir,
        } => cmd_oracle(
            family,
            spin,
            observable.as_deref(),
            renormalize.as_deref(),
            &out_dir,
        ),
        Command::Ensemble {
            spin,
            ensemble,
            samples,
            seed,
            workers,
            bins,
            scale,
            out_dir,
        } => cmd_ensemble(
            spin,
            ensemble,
            samples,
            seed.resolve(),
            workers,
            bins,
            &scale,
            &out_dir,
        ),
        Command::Figure {
            fig,
            spins,
            samples,
            paper_scale,
            seed,
            workers,
            kings_file,
            raw_symproj,
            out_dir,
        } => {
            ensure_dir(&out_dir)?;
            let samples = if paper_scale { 1_500_000 } else { samples };
            let seed = seed.resolve();
            let opts = FigureOpts {
                spins: spins.map(|s| s.0),
                samples,
                seed,
                workers,
                out_dir: out_dir.clone(),
                kings_file,
                raw_symproj,
            };
            let mut builder = ManifestBuilder::new(
                &out_dir,
                command_line(),
                json!({"figure": fig, "samples": samples, "workers": opts.workers}),
            );
            builder.set_seed(seed);
            for file in figures::figure(fig, &opts)? {
                builder.add_file(&file);
            }
            builder.write()?;
            Ok(())
        }
        Command::Fit {
            ensemble,
            spins,
            samples,
            seed,
            workers,
            out_dir,
        } => cmd_fit(&ensemble, &spins.0, samples, seed.resolve(), workers, &out_dir),
    }
}

fn cmd_sample(
    spin: HalfInt,
    ensemble: EnsembleKind,
    count: u64,
    seed: u64,
    out_dir: &Path,
) -> majorana::Result<()> {
    ensure_dir(out_dir)?;
    let mut builder = ManifestBuilder::new(
        out_dir,
        command_line(),
        json!({"spin": spin, "ensemble": ensemble, "count": count}),
    );
    builder.set_seed(seed);
    for i in 0..count {
        let stream = RngStream::new(seed, i);
        let state = match ensemble {
            EnsembleKind::MajoranaUniform => {
                let (constellation, state) = sample_majorana(spin, &stream);
                let cpath = out_dir.join(format!("constellation_{i:04}.csv"));
                save_constellation(&cpath, &constellation)?;
                builder.add_file(&cpath);
                state
            }
            EnsembleKind::Cue => sample_cue(spin, &stream),
            EnsembleKind::SymmetricProjection => sample_symmetric_projection(spin, &stream).1,
        };
        let spath = out_dir.join(format!("state_{i:04}.csv"));
        save_state(&spath, &state)?;
        builder.add_file(&spath);
    }
    builder.write()?;
    Ok(())
}

fn spectrum_summary(spec: &MultipoleSpectrum) -> serde_json::Value {
    let a: Vec<f64> = (0..=spec.k_range()).map(|m| spec.cumulative(m)).collect();
    json!({
        "spin": spec.spin(),
        "A_M": a,
        "quantumness": spec.quantumness(),
        "K_max": spec.k_max(),
    })
}

fn cmd_multipoles(input: &Path, out_dir: &Path, renormalize: bool) -> majorana::Result<()> {
    ensure_dir(out_dir)?;
    let state = load_state_or_constellation(input, renormalize)?;
    let spec = multipoles(&state);
    let mut builder = ManifestBuilder::new(
        out_dir,
        command_line(),
        json!({"input": input.display().to_string(), "renormalize": renormalize}),
    );
    let rho_path = out_dir.join("spectrum.csv");
    save_spectrum(&rho_path, &spec)?;
    builder.add_file(&rho_path);
    let len_path = out_dir.join("lengths.csv");
    save_lengths(&len_path, &spec)?;
    builder.add_file(&len_path);
    let summary_path = out_dir.join("summary.json");
    fs::write(
        &summary_path,
        serde_json::to_string_pretty(&spectrum_summary(&spec)).expect("serializable"),
    )?;
    builder.add_file(&summary_path);
    builder.write()?;
    Ok(())
}

fn cmd_husimi(
    input: &Path,
    out_dir: &Path,
    degree: Option<u32>,
    want_svg: bool,
    renormalize: bool,
) -> majorana::Result<()> {
    ensure_dir(out_dir)?;
    let state = load_state_or_constellation(input, renormalize)?;
    let spec = multipoles(&state);
    let s2 = state.spin().twice() as u32;
    let degree = degree.unwrap_or_else(|| (2 * s2).max(160));
    let grid = SphereGrid::with_degree(degree);
    let values = q_on_grid(&spec, &grid);

    let mut builder = ManifestBuilder::new(
        out_dir,
        command_line(),
        json!({"input": input.display().to_string(), "degree": degree}),
    );
    let mut csv = String::from("theta,phi,Q\n");
    for (idx, (dir, _)) in grid.nodes().enumerate() {
        csv.push_str(&format!("{},{},{}\n", dir.theta, dir.phi, values[idx]));
    }
    let csv_path = out_dir.join("husimi.csv");
    fs::write(&csv_path, csv)?;
    builder.add_file(&csv_path);

    if want_svg {
        // render strictly from the CSV just written
        let text = fs::read_to_string(&csv_path)?;
        let mut vals = Vec::new();
        for line in text.lines().skip(1) {
            let q: f64 = line.split(',').nth(2).unwrap().parse().unwrap_or(f64::NAN);
            vals.push(q);
        }
        let heat = Heatmap {
            title: format!("Husimi function, S = {}", state.spin()),
            n_theta: grid.theta_nodes().len(),
            n_phi: grid.n_phi(),
            values: vals,
        };
        let svg_path = out_dir.join("husimi.svg");
        fs::write(&svg_path, heat.render())?;
        builder.add_file(&svg_path);
    }

    // self-check: if the grid covers the state's band limit, the values must
    // reproduce the spectrum they came from
    if degree >= 2 * s2 {
        multipoles_from_q(&values, &grid, state.spin())?;
    }
    builder.write()?;
    Ok(())
}

fn cmd_oracle(
    family: OracleFamily,
    spin: HalfInt,
    observable: Option<&str>,
    renormalize: Option<&str>,
    out_dir: &Path,
) -> majorana::Result<()> {
    if let Some(obs) = observable {
        if !ORACLE_OBSERVABLES.contains(&obs) {
            return Err(Error::Parse {
                path: "<arguments>".into(),
                line: 1,
                message: format!(
                    "unknown observable {obs:?}; valid names: {}",
                    ORACLE_OBSERVABLES.join(", ")
                ),
            });
        }
    }
    if let Some(mode) = renormalize {
        if mode != "total-purity" {
            return Err(Error::Parse {
                path: "<arguments>".into(),
                line: 1,
                message: format!("unknown renormalize mode {mode:?}; valid: total-purity"),
            });
        }
    }
    ensure_dir(out_dir)?;
    let mut report = oracle_report(family, spin, observable)?;
    if renormalize == Some("total-purity") && family == OracleFamily::SymmetricProjection {
        let s2 = spin.twice() as f64;
        if let Some(lengths) = report.values.get_mut("L_K") {
            let tail: f64 = lengths[1..].iter().sum();
            let scale = (s2 / (s2 + 1.0)) / tail;
            for l in &mut lengths[1..] {
                *l *= scale;
            }
            lengths[0] = 1.0 / (s2 + 1.0);
        }
        if let Some(a) = report.values.get_mut("A_M") {
            let total = a[a.len() - 1];
            let scale = (s2 / (s2 + 1.0)) / total;
            for v in a.iter_mut() {
                *v *= scale;
            }
        }
    }
    let mut builder = ManifestBuilder::new(
        out_dir,
        command_line(),
        json!({"family": family, "spin": spin, "observable": observable, "renormalize": renormalize}),
    );
    let json_path = out_dir.join("oracle.json");
    fs::write(
        &json_path,
        serde_json::to_string_pretty(&report).expect("serializable"),
    )?;
    builder.add_file(&json_path);
    let mut csv = String::from("observable,index,value\n");
    for (name, values) in &report.values {
        for (i, v) in values.iter().enumerate() {
            csv.push_str(&format!("{name},{i},{v}\n"));
        }
    }
    let csv_path = out_dir.join("oracle.csv");
    fs::write(&csv_path, csv)?;
    builder.add_file(&csv_path);
    builder.write()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_ensemble(
    spin: HalfInt,
    ensemble: EnsembleKind,
    samples: u64,
    seed: u64,
    workers: usize,
    bins: usize,
    scale: &str,
    out_dir: &Path,
) -> majorana::Result<()> {
    let scale = match scale {
        "log" => HistogramScale::Log,
        "linear" => HistogramScale::Linear,
        other => {
            return Err(Error::Parse {
                path: "<arguments>".into(),
                line: 1,
                message: format!("unknown histogram scale {other:?}; valid: log, linear"),
            })
        }
    };
    ensure_dir(out_dir)?;
    let mut cfg = RunConfig::new(spin, ensemble, samples, seed).with_workers(workers);
    cfg.histogram_bins = bins;
    cfg.histogram_scale = scale;
    let stats = run_ensemble(&cfg)?;

    let mut builder = ManifestBuilder::new(
        out_dir,
        command_line(),
        serde_json::to_value(&cfg).expect("serializable"),
    );
    builder.set_seed(seed);

    let stats_path = out_dir.join("stats.json");
    fs::write(&stats_path, serde_json::to_string(&stats).expect("serializable"))?;
    builder.add_file(&stats_path);

    let mut lengths = String::from("K,mean,variance\n");
    for (k, (&m, &v)) in stats.mean_l.iter().zip(&stats.var_l).enumerate() {
        lengths.push_str(&format!("{k},{m},{v}\n"));
    }
    let lengths_path = out_dir.join("mean_lengths.csv");
    fs::write(&lengths_path, lengths)?;
    builder.add_file(&lengths_path);

    let mut cumulative = String::from("M,mean,variance\n");
    for (m, (&a, &v)) in stats.mean_a.iter().zip(&stats.var_a).enumerate() {
        cumulative.push_str(&format!("{m},{a},{v}\n"));
    }
    let cumulative_path = out_dir.join("cumulative.csv");
    fs::write(&cumulative_path, cumulative)?;
    builder.add_file(&cumulative_path);

    let mut hist = String::from("K,bin,lo,hi,count\n");
    for (k, column) in stats.hist.iter().enumerate() {
        for (b, &count) in column.iter().enumerate() {
            hist.push_str(&format!(
                "{k},{b},{},{},{count}\n",
                stats.hist_edges[b],
                stats.hist_edges[b + 1]
            ));
        }
    }
    let hist_path = out_dir.join("histogram.csv");
    fs::write(&hist_path, hist)?;
    builder.add_file(&hist_path);

    builder.write()?;
    Ok(())
}

fn cmd_fit(
    ensemble: &str,
    spins: &[HalfInt],
    samples: u64,
    seed: u64,
    workers: usize,
    out_dir: &Path,
) -> majorana::Result<()> {
    let family = match ensemble {
        "coherent" => FitFamily::Coherent,
        other => FitFamily::Random(other.parse::<EnsembleKind>().map_err(|e| Error::Parse {
            path: "<arguments>".into(),
            line: 1,
            message: e,
        })?),
    };
    ensure_dir(out_dir)?;
    let template =
        RunConfig::new(spins[0], EnsembleKind::MajoranaUniform, samples, seed).with_workers(workers);
    let fit = fit_kmax_scaling(spins, family, &template)?;

    let mut builder = ManifestBuilder::new(
        out_dir,
        command_line(),
        json!({"ensemble": ensemble, "spins": spins, "samples": samples}),
    );
    builder.set_seed(seed);
    let json_path = out_dir.join("fit.json");
    fs::write(
        &json_path,
        serde_json::to_string_pretty(&fit).expect("serializable"),
    )?;
    builder.add_file(&json_path);
    let mut csv = String::from("S,kmax,fitted\n");
    for (&spin, &k) in fit.spins.iter().zip(&fit.kmax) {
        let s = spin.to_f64();
        csv.push_str(&format!("{s},{k},{}\n", fit.a * s.sqrt()));
    }
    let csv_path = out_dir.join("kmax.csv");
    fs::write(&csv_path, csv)?;
    builder.add_file(&csv_path);
    builder.write()?;
    println!(
        "K_max = a sqrt(S): a = {:.4}, rms residual {:.3}{}",
        fit.a,
        fit.residual,
        if fit.rejected { " (fit rejected)" } else { "" }
    );
    Ok(())
}
