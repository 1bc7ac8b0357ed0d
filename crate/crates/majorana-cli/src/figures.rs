//! Figure data generation. Every figure writes its underlying data as CSV
//! first; the SVG is then rendered from the parsed CSV text, never from the
//! in-memory results.

use std::fs;
use std::path::{Path, PathBuf};

use majorana::engine::{run_ensemble, EnsembleStats, RunConfig};
use majorana::io::load_constellation;
use majorana::multipole::multipoles;
use majorana::oracles::{cs_multipole_lengths, cs_quantumness, cue_mean_quantumness};
use majorana::states::state_from_constellation;
use majorana::{EnsembleKind, Error, HalfInt, Result};

use crate::svg::{Heatmap, LineChart, Series};

pub struct FigureOpts {
    pub spins: Option<Vec<HalfInt>>,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub kings_file: Option<PathBuf>,
    pub raw_symproj: bool,
}

fn default_spins(fig: u8) -> Vec<HalfInt> {
    match fig {
        1 => vec![10, 30, 60].into_iter().map(HalfInt::from_int).collect(),
        2 => vec![HalfInt::from_int(60)],
        3 | 4 => vec![HalfInt::from_int(106)],
        5 => vec![HalfInt::from_int(30)],
        _ => vec![1, 2, 3, 4, 5, 6, 8, 10]
            .into_iter()
            .map(HalfInt::from_int)
            .collect(),
    }
}

/// Crude wall-clock estimate used only for the long-run warning.
fn estimate_seconds(spins: &[HalfInt], samples: u64, workers: usize) -> f64 {
    spins
        .iter()
        .map(|s| {
            let dim = s.dimension() as f64;
            samples as f64 * dim * dim * dim * 4e-9 / workers.max(1) as f64
                + dim * dim * dim * dim * 2.5e-9 // table construction
        })
        .sum()
}

fn warn_if_long(spins: &[HalfInt], samples: u64, workers: usize) {
    let est = estimate_seconds(spins, samples, workers);
    if est > 600.0 {
        eprintln!(
            "warning: estimated runtime {:.0} min exceeds 10 min \
             (samples = {samples}, spins = {spins:?})",
            est / 60.0
        );
    }
}

fn run(cfg: RunConfig) -> Result<EnsembleStats> {
    run_ensemble(&cfg)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

/// Dispatches one figure; returns every file written.
pub fn figure(fig: u8, opts: &FigureOpts) -> Result<Vec<PathBuf>> {
    let spins = opts.spins.clone().unwrap_or_else(|| default_spins(fig));
    if spins.is_empty() {
        return Err(Error::Domain("need at least one spin".into()));
    }
    match fig {
        1 => fig1(&spins, opts),
        2 => fig2(spins[0], opts),
        3 => fig3(spins[0], opts),
        4 => fig4(spins[0], opts),
        5 => fig5(spins[0], opts),
        6 => fig6(&spins, opts),
        _ => Err(Error::Domain(format!("unknown figure {fig} (expected 1..=6)"))),
    }
}

// --- shared CSV -> chart helpers -------------------------------------------

/// Parses a `family,x,y` CSV back into labeled series in file order.
fn series_from_csv(text: &str, markers_for: &[&str]) -> Vec<Series> {
    let mut order: Vec<String> = Vec::new();
    let mut data: std::collections::HashMap<String, Vec<(f64, f64)>> = Default::default();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            continue;
        }
        let family = fields[0].to_string();
        let x: f64 = fields[1].parse().unwrap_or(f64::NAN);
        let y: f64 = fields[2].parse().unwrap_or(f64::NAN);
        if !data.contains_key(&family) {
            order.push(family.clone());
        }
        data.entry(family).or_default().push((x, y));
    }
    order
        .into_iter()
        .map(|label| Series {
            markers_only: markers_for.contains(&label.as_str()),
            points: data.remove(&label).unwrap(),
            label,
        })
        .collect()
}

// --- figures ----------------------------------------------------------------

/// Mean multipole lengths of uniform-constellation states, one curve per spin.
fn fig1(spins: &[HalfInt], opts: &FigureOpts) -> Result<Vec<PathBuf>> {
    warn_if_long(spins, opts.samples, opts.workers);
    let mut csv = String::from("family,K,mean_length\n");
    for &spin in spins {
        let stats = run(
            RunConfig::new(spin, EnsembleKind::MajoranaUniform, opts.samples, opts.seed)
                .with_workers(opts.workers),
        )?;
        for (k, &l) in stats.mean_l.iter().enumerate() {
            csv.push_str(&format!("S={spin},{k},{l}\n"));
        }
    }
    let csv_path = opts.out_dir.join("figure1.csv");
    write(&csv_path, &csv)?;
    let chart = LineChart {
        title: "Mean multipole length of random constellations".into(),
        x_label: "K".into(),
        y_label: "mean L_K".into(),
        log_y: true,
        series: series_from_csv(&fs::read_to_string(&csv_path)?, &[]),
    };
    let svg_path = opts.out_dir.join("figure1.svg");
    write(&svg_path, &chart.render())?;
    Ok(vec![csv_path, svg_path])
}

/// Mean multipoles with variance band over a per-order density histogram.
fn fig2(spin: HalfInt, opts: &FigureOpts) -> Result<Vec<PathBuf>> {
    warn_if_long(&[spin], opts.samples, opts.workers);
    let stats = run(
        RunConfig::new(spin, EnsembleKind::MajoranaUniform, opts.samples, opts.seed)
            .with_workers(opts.workers),
    )?;
    let mut moments = String::from("K,mean,stddev\n");
    for (k, (&m, &v)) in stats.mean_l.iter().zip(&stats.var_l).enumerate() {
        moments.push_str(&format!("{k},{m},{}\n", v.sqrt()));
    }
    let moments_path = opts.out_dir.join("figure2_moments.csv");
    write(&moments_path, &moments)?;

    let bins = stats.hist_edges.len() - 1;
    let mut density = String::from("K,bin,lo,hi,count\n");
    for (k, column) in stats.hist.iter().enumerate() {
        for (b, &count) in column.iter().enumerate() {
            density.push_str(&format!(
                "{k},{b},{},{},{count}\n",
                stats.hist_edges[b],
                stats.hist_edges[b + 1]
            ));
        }
    }
    let density_path = opts.out_dir.join("figure2_density.csv");
    write(&density_path, &density)?;

    // heatmap from the density CSV, log-count coloring, mean/std overlay
    let text = fs::read_to_string(&density_path)?;
    let dim = spin.dimension();
    let mut values = vec![0.0; bins * dim];
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (k, b): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let count: f64 = f[4].parse().unwrap();
        // flip so small lengths sit at the bottom row of the image
        values[(bins - 1 - b) * dim + k] = (1.0 + count).log10();
    }
    let moments_text = fs::read_to_string(&moments_path)?;
    let mut mean_curve = Vec::new();
    let mut hi_curve = Vec::new();
    let mut lo_curve = Vec::new();
    for line in moments_text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let k: f64 = f[0].parse().unwrap();
        let mean: f64 = f[1].parse().unwrap();
        let sd: f64 = f[2].parse().unwrap();
        let to_row = |v: f64| {
            // data value -> histogram bin coordinate (log scale, [1e-16, 1])
            let t = ((v.max(1e-300).log10() + 16.0) / 16.0).clamp(0.0, 1.0);
            (1.0 - t) * bins as f64
        };
        mean_curve.push((k, to_row(mean)));
        hi_curve.push((k, to_row(mean + sd)));
        lo_curve.push((k, to_row((mean - sd).max(0.0))));
    }
    let heat = Heatmap {
        title: format!("Multipole density at S = {spin} ({} samples)", stats.n_samples),
        n_theta: bins,
        n_phi: dim,
        values,
    };
    let mut svg = heat.render();
    // overlay polylines in cell coordinates
    let overlay = |curve: &[(f64, f64)], dash: &str| {
        let plot_w = 820.0 - 72.0 - 24.0;
        let plot_h = 540.0 - 40.0 - 56.0;
        let mut d = String::new();
        for (i, &(k, row)) in curve.iter().enumerate() {
            let x = 72.0 + (k + 0.5) / dim as f64 * plot_w;
            let y = 40.0 + row / bins as f64 * plot_h;
            d.push_str(&format!("{}{x:.1},{y:.1} ", if i == 0 { "M" } else { "L" }));
        }
        format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"white\" stroke-width=\"1.6\"{dash}/>\n",
            d.trim_end()
        )
    };
    let tail = svg.split_off(svg.rfind("</svg>").unwrap());
    svg.push_str(&overlay(&mean_curve, ""));
    svg.push_str(&overlay(&hi_curve, " stroke-dasharray=\"6 4\""));
    svg.push_str(&overlay(&lo_curve, " stroke-dasharray=\"6 4\""));
    svg.push_str(&tail);
    let svg_path = opts.out_dir.join("figure2.svg");
    write(&svg_path, &svg)?;
    Ok(vec![moments_path, density_path, svg_path])
}

/// Optional third curve from a user-supplied constellation file.
fn kings_lengths(opts: &FigureOpts, spin: HalfInt) -> Result<Option<Vec<f64>>> {
    let Some(path) = &opts.kings_file else {
        return Ok(None);
    };
    let constellation = load_constellation(path)?;
    if constellation.spin() != spin {
        return Err(Error::Domain(format!(
            "constellation in {} has spin {}, figure uses spin {spin}",
            path.display(),
            constellation.spin()
        )));
    }
    let spec = multipoles(&state_from_constellation(&constellation)?);
    Ok(Some(spec.lengths().to_vec()))
}

/// Per-order lengths: coherent baseline vs random constellations (and an
/// optional reference constellation).
fn fig3(spin: HalfInt, opts: &FigureOpts) -> Result<Vec<PathBuf>> {
    warn_if_long(&[spin], opts.samples, opts.workers);
    let stats = run(
        RunConfig::new(spin, EnsembleKind::MajoranaUniform, opts.samples, opts.seed)
            .with_workers(opts.workers),
    )?;
    let mut csv = String::from("family,K,length\n");
    for (k, &l) in cs_multipole_lengths(spin).iter().enumerate() {
        csv.push_str(&format!("coherent,{k},{l}\n"));
    }
    for (k, &l) in stats.mean_l.iter().enumerate() {
        csv.push_str(&format!("random,{k},{l}\n"));
    }
    if let Some(lengths) = kings_lengths(opts, spin)? {
        for (k, &l) in lengths.iter().enumerate() {
            csv.push_str(&format!("reference,{k},{l}\n"));
        }
    }
    let csv_path = opts.out_dir.join("figure3.csv");
    write(&csv_path, &csv)?;
    let chart = LineChart {
        title: format!("Multipole distribution at S = {spin}"),
        x_label: "K".into(),
        y_label: "L_K".into(),
        log_y: true,
        series: series_from_csv(&fs::read_to_string(&csv_path)?, &[]),
    };
    let svg_path = opts.out_dir.join("figure3.svg");
    write(&svg_path, &chart.render())?;
    Ok(vec![csv_path, svg_path])
}

/// Cumulative multipole distributions for the same families as figure 3.
fn fig4(spin: HalfInt, opts: &FigureOpts) -> Result<Vec<PathBuf>> {
    warn_if_long(&[spin], opts.samples, opts.workers);
    let stats = run(
        RunConfig::new(spin, EnsembleKind::MajoranaUniform, opts.samples, opts.seed)
            .with_workers(opts.workers),
    )?;
    let cumulative = |lengths: &[f64]| -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for &l in &lengths[1..] {
            acc += l;
            out.push(acc);
        }
        out
    };
    let mut csv = String::from("family,M,cumulative\n");
    for (m, &a) in cumulative(&cs_multipole_lengths(spin)).iter().enumerate() {
        csv.push_str(&format!("coherent,{m},{a}\n"));
    }
    for (m, &a) in stats.mean_a.iter().enumerate() {
        csv.push_str(&format!("random,{m},{a}\n"));
    }
    if let Some(lengths) = kings_lengths(opts, spin)? {
        for (m, &a) in cumulative(&lengths).iter().enumerate() {
            csv.push_str(&format!("reference,{m},{a}\n"));
        }
    }
    let csv_path = opts.out_dir.join("figure4.csv");
    write(&csv_path, &csv)?;
    let chart = LineChart {
        title: format!("Cumulative multipole distribution at S = {spin}"),
        x_label: "M".into(),
        y_label: "A_M".into(),
        log_y: false,
        series: series_from_csv(&fs::read_to_string(&csv_path)?, &[]),
    };
    let svg_path = opts.out_dir.join("figure4.svg");
    write(&svg_path, &chart.render())?;
    Ok(vec![csv_path, svg_path])
}

/// Mean lengths of all three random families plus coherent-state markers.
/// The symmetric-projection curve is renormalized to total purity unless
/// `--raw-symproj` asks for the unnormalized means.
fn fig5(spin: HalfInt, opts: &FigureOpts) -> Result<Vec<PathBuf>> {
    warn_if_long(&[spin, spin, spin], opts.samples, opts.workers);
    let mut csv = String::from("family,K,length\n");
    for kind in EnsembleKind::ALL {
        let stats = run(
            RunConfig::new(spin, kind, opts.samples, opts.seed).with_workers(opts.workers),
        )?;
        let mut lengths = stats.mean_l.clone();
        if kind == EnsembleKind::SymmetricProjection && !opts.raw_symproj {
            let s2 = spin.twice() as f64;
            let tail: f64 = lengths[1..].iter().sum();
            let scale = (s2 / (s2 + 1.0)) / tail;
            for l in &mut lengths[1..] {
                *l *= scale;
            }
            lengths[0] = 1.0 / (s2 + 1.0);
        }
        for (k, &l) in lengths.iter().enumerate() {
            csv.push_str(&format!("{kind},{k},{l}\n"));
        }
    }
    for (k, &l) in cs_multipole_lengths(spin).iter().enumerate() {
        csv.push_str(&format!("coherent,{k},{l}\n"));
    }
    let csv_path = opts.out_dir.join("figure5.csv");
    write(&csv_path, &csv)?;
    let chart = LineChart {
        title: format!("Multipole distribution of the three random families, S = {spin}"),
        x_label: "K".into(),
        y_label: "mean L_K".into(),
        log_y: true,
        series: series_from_csv(&fs::read_to_string(&csv_path)?, &["coherent"]),
    };
    let svg_path = opts.out_dir.join("figure5.svg");
    write(&svg_path, &chart.render())?;
    Ok(vec![csv_path, svg_path])
}

/// Quantumness versus spin for the three families with the coherent floor
/// and the pure-state ceiling.
fn fig6(spins: &[HalfInt], opts: &FigureOpts) -> Result<Vec<PathBuf>> {
    warn_if_long(&spins.iter().flat_map(|&s| [s, s, s]).collect::<Vec<_>>(), opts.samples, opts.workers);
    let mut csv = String::from("family,S,quantumness\n");
    for &spin in spins {
        let s = spin.to_f64();
        for kind in EnsembleKind::ALL {
            let stats = run(
                RunConfig::new(spin, kind, opts.samples, opts.seed).with_workers(opts.workers),
            )?;
            let value = match kind {
                EnsembleKind::SymmetricProjection => stats.renormalized_quantumness().0,
                _ => stats.mean_e,
            };
            csv.push_str(&format!("{kind},{s},{value}\n"));
        }
        csv.push_str(&format!("coherent,{s},{}\n", cs_quantumness(spin)));
        let s2 = spin.twice() as f64;
        csv.push_str(&format!("ceiling,{s},{}\n", s2 / (s2 + 1.0)));
        // closed-form mean for fully random amplitudes, for reference
        csv.push_str(&format!("cue-analytic,{s},{}\n", cue_mean_quantumness(spin)));
    }
    let csv_path = opts.out_dir.join("figure6.csv");
    write(&csv_path, &csv)?;
    let chart = LineChart {
        title: "Quantumness of the random families".into(),
        x_label: "S".into(),
        y_label: "E".into(),
        log_y: false,
        series: series_from_csv(&fs::read_to_string(&csv_path)?, &["cue-analytic"]),
    };
    let svg_path = opts.out_dir.join("figure6.svg");
    write(&svg_path, &chart.render())?;
    Ok(vec![csv_path, svg_path])
}
