//! CSV and metadata writers. All files are UTF-8, comma-separated, with a
//! header row and LF line endings; floating-point columns use the shortest
//! round-trip decimal form, so identical runs produce identical bytes.

use super::{ComponentStats, ExperimentOutput, MeanPoint, RealizationOutcome, SweepOutput};
use crate::fit::FitResult;
use crate::gf::{rational_to_f64, GfModel};
use crate::metrics::WealthHistogram;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_series_csv(path: &Path, series: &[MeanPoint]) -> io::Result<()> {
    let mut out = create(path)?;
    writeln!(out, "t,entropy,poverty")?;
    for p in series {
        writeln!(out, "{},{},{}", p.t, p.entropy, p.poverty)?;
    }
    out.flush()
}

pub fn write_tc_csv(path: &Path, realizations: &[RealizationOutcome]) -> io::Result<()> {
    let mut out = create(path)?;
    writeln!(out, "realization,t_c")?;
    for r in realizations {
        match r.t_c {
            Some(t) => writeln!(out, "{},{}", r.index, t)?,
            None => writeln!(out, "{},NA", r.index)?,
        }
    }
    out.flush()
}

pub fn write_snapshot_csv(path: &Path, h: &WealthHistogram, mean_w: u64) -> io::Result<()> {
    let mut out = create(path)?;
    writeln!(out, "wealth,count,wealth_over_mean")?;
    for (w, c) in h.iter() {
        writeln!(out, "{},{},{}", w, c, w as f64 / mean_w as f64)?;
    }
    out.flush()
}

pub fn write_fits_csv(path: &Path, fits: &[FitResult]) -> io::Result<()> {
    let mut out = create(path)?;
    writeln!(out, "form,range_lo,range_hi,p1,p2,residual")?;
    for f in fits {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            f.form.label(),
            f.range.0,
            f.range.1,
            f.p1,
            f.p2,
            f.residual
        )?;
    }
    out.flush()
}

pub fn write_meta(path: &Path, out: &ExperimentOutput) -> io::Result<()> {
    let mut file = create(path)?;
    writeln!(file, "# exchange-lab {}", env!("CARGO_PKG_VERSION"))?;
    write!(file, "{}", out.config.render())?;
    if let Some(deg) = out.mean_realized_degree() {
        writeln!(file, "# mean realized degree = {deg}")?;
    }
    file.flush()
}

/// Write the whole bundle into `dir`: `series.csv`, one
/// `snapshot_<t>.csv` per captured time, `tc.csv`, `fits.csv`, and `meta`
/// (the resolved config, reloadable as a config file).
pub fn write_bundle(out: &ExperimentOutput, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    write_series_csv(&dir.join("series.csv"), &out.mean_series)?;
    for (t, h) in &out.pooled_snapshots {
        write_snapshot_csv(&dir.join(format!("snapshot_{t}.csv")), h, out.config.mean_w)?;
    }
    write_tc_csv(&dir.join("tc.csv"), &out.realizations)?;
    write_fits_csv(&dir.join("fits.csv"), &out.fits)?;
    write_meta(&dir.join("meta"), out)
}

pub fn write_sweep_csv(path: &Path, sweep: &SweepOutput) -> io::Result<()> {
    let mut out = create(path)?;
    writeln!(out, "value,mean_tc,std_tc,reached,total,fit_b,mean_degree")?;
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    for row in &sweep.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.value,
            opt(row.mean_tc),
            opt(row.std_tc),
            row.reached,
            row.total,
            opt(row.fit_b),
            opt(row.realized_mean_degree)
        )?;
    }
    out.flush()
}

/// First two moments of the degree law per degree bound, as exact
/// rationals.
pub fn write_moments_csv(path: &Path, models: &[GfModel]) -> io::Result<()> {
    let mut out = create(path)?;
    writeln!(out, "k_max,z1,z2,has_giant")?;
    for m in models {
        writeln!(out, "{},{},{},{}", m.k_max(), m.z1(), m.z2(), m.has_giant())?;
    }
    out.flush()
}

/// Component-size law for one degree bound: exact `P_s` and `P_s / s`
/// plus float renderings for plotting.
pub fn write_component_law_csv(path: &Path, model: &GfModel) -> io::Result<()> {
    let mut out = create(path)?;
    writeln!(out, "s,p_s,p_s_over_s,chi,p_s_float")?;
    for s in 2..=model.s_max() {
        let p = model.p_s(s);
        writeln!(
            out,
            "{},{},{},{},{}",
            s,
            p,
            model.chi_unnormalized(s),
            model.chi(s),
            rational_to_f64(&p)
        )?;
    }
    out.flush()
}

/// Fixed point `u`, giant fraction, and mean finite-component size per
/// degree bound.
pub fn write_fixed_points_csv(path: &Path, models: &[GfModel]) -> io::Result<()> {
    let mut out = create(path)?;
    writeln!(out, "k_max,u,giant_fraction,mean_component_size")?;
    for m in models {
        writeln!(
            out,
            "{},{},{},{}",
            m.k_max(),
            m.u(),
            m.giant_fraction(),
            m.mean_finite_component_size()
        )?;
    }
    out.flush()
}

/// Empirical component-size frequencies, with the analytic law alongside
/// when a model is supplied.
pub fn write_components_csv(
    path: &Path,
    stats: &ComponentStats,
    model: Option<&GfModel>,
) -> io::Result<()> {
    let mut out = create(path)?;
    writeln!(out, "s,count,frequency,chi")?;
    for (&s, &c) in &stats.counts {
        let chi = match model {
            Some(m) if s >= 2 && s <= m.s_max() => m.chi_f64(s).to_string(),
            _ => "NA".to_string(),
        };
        let freq = if s >= 2 {
            stats.frequency(s).to_string()
        } else {
            "NA".to_string()
        };
        writeln!(out, "{s},{c},{freq},{chi}")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{component_ensemble, parse_config, run_experiment, SimConfig};

    #[test]
    fn bundle_layout_and_meta_round_trip() {
        let cfg = SimConfig {
            n: 10,
            mean_w: 50,
            c: 10,
            mcs_budget: 1_000,
            realizations: 2,
            stride: 250,
            seed: 4,
            ..SimConfig::default()
        };
        let out = run_experiment(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_bundle(&out, dir.path()).unwrap();
        for name in ["series.csv", "snapshot_1000.csv", "tc.csv", "fits.csv", "meta"] {
            assert!(dir.path().join(name).is_file(), "missing {name}");
        }
        let meta = fs::read_to_string(dir.path().join("meta")).unwrap();
        assert!(meta.starts_with("# exchange-lab"));
        let reparsed = parse_config(&meta).unwrap();
        assert_eq!(reparsed.n, cfg.n);
        assert_eq!(reparsed.seed, cfg.seed);
        assert_eq!(reparsed.resolved_snapshots(), cfg.resolved_snapshots());

        let series = fs::read_to_string(dir.path().join("series.csv")).unwrap();
        let mut lines = series.lines();
        assert_eq!(lines.next(), Some("t,entropy,poverty"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("0,"), "series starts at t = 0: {first}");
        assert!(!series.contains('\r'));

        let snap = fs::read_to_string(dir.path().join("snapshot_1000.csv")).unwrap();
        let wealths: Vec<u64> = snap
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        let mut sorted = wealths.clone();
        sorted.sort_unstable();
        assert_eq!(wealths, sorted, "snapshot rows sorted by wealth");
    }

    #[test]
    fn analytic_tables_are_exact_text() {
        let model = GfModel::new(2, 8).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("law.csv");
        write_component_law_csv(&path, &model).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("s,p_s,p_s_over_s,chi,p_s_float"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("2,1/6,1/12,"), "row: {first}");

        let moments = dir.path().join("moments.csv");
        write_moments_csv(&moments, &[model]).unwrap();
        let text = fs::read_to_string(&moments).unwrap();
        assert!(text.contains("2,3/2,1,false"), "text: {text}");
    }

    #[test]
    fn component_table_includes_analytics() {
        let stats = component_ensemble(100, 2, 5, 3).unwrap();
        let model = GfModel::new(2, 50).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("components.csv");
        write_components_csv(&path, &stats, Some(&model)).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("s,count,frequency,chi\n"));
        assert!(text.lines().count() > 1);
    }
}
