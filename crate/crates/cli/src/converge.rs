use std::io::Write;
use std::path::PathBuf;

use anyhow::bail;
use clap::ValueEnum;
use glq_core::oracle::{fit_slope, sweep_point, SweepKind, SweepQuantity, SweepRecord};
use glq_core::Config;
use rayon::prelude::*;
use serde_json::json;

use crate::{num, writer, Failure, Format};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    One,
    Two,
    Three,
}

const EPS_RANGE: (f64, f64) = (1e-10, 1e-1);

/// `points` offsets spaced evenly in `log10 ε`, largest first.
pub fn offsets(eps_min: f64, eps_max: f64, points: usize) -> anyhow::Result<Vec<f64>> {
    if !(EPS_RANGE.0..=EPS_RANGE.1).contains(&eps_min) || !(EPS_RANGE.0..=EPS_RANGE.1).contains(&eps_max) {
        bail!("offsets must lie in [{:e}, {:e}]", EPS_RANGE.0, EPS_RANGE.1);
    }
    if eps_min > eps_max {
        bail!("eps-min {eps_min:e} exceeds eps-max {eps_max:e}");
    }
    match points {
        0 => bail!("at least one point is needed"),
        1 => Ok(vec![eps_max]),
        _ if eps_min == eps_max => bail!("several points need eps-min < eps-max"),
        n => {
            let (a, b) = (eps_max.log10(), eps_min.log10());
            Ok((0..n).map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)).collect())
        }
    }
}

pub fn run(
    kind: Kind,
    eps_min: f64,
    eps_max: f64,
    points: usize,
    output: &Option<PathBuf>,
    format: Format,
    cfg: &Config,
) -> Result<(), Failure> {
    let kind = match kind {
        Kind::One => SweepKind::OneTouch,
        Kind::Two => SweepKind::TwoTouch,
        Kind::Three => SweepKind::ThreeTouch,
    };
    let eps = offsets(eps_min, eps_max, points)?;
    let records: Vec<SweepRecord> = eps.par_iter().map(|&e| sweep_point(kind, e, cfg)).collect::<glq_core::Result<_>>()?;
    let slopes = [SweepQuantity::L, SweepQuantity::M, SweepQuantity::Mp].map(|q| fit_slope(&records, q));

    let mut w = writer(output)?;
    match format {
        Format::Csv => {
            writeln!(w, "eps,L,M,Mp,rel_L,rel_M,rel_Mp")?;
            for r in &records {
                let row = [r.eps, r.l, r.m, r.mp, r.rel_l, r.rel_m, r.rel_mp].map(num);
                writeln!(w, "{}", row.join(","))?;
            }
            for (name, s) in ["L", "M", "Mp"].iter().zip(slopes) {
                let s = s.map_or("n/a".to_string(), |s| format!("{s:.6}"));
                writeln!(w, "# slope_{name}={s}")?;
            }
        }
        Format::Json => {
            let rows: Vec<_> = records
                .iter()
                .map(|r| json!({"eps": r.eps, "L": r.l, "M": r.m, "Mp": r.mp, "rel_L": r.rel_l, "rel_M": r.rel_m, "rel_Mp": r.rel_mp}))
                .collect();
            let doc = json!({"records": rows, "slopes": {"L": slopes[0], "M": slopes[1], "Mp": slopes[2]}});
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
