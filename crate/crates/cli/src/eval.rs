use std::io::Write;
use std::path::{Path, PathBuf};

use glq_core::geometry::ContactClass;
use glq_core::potentials::{galerkin_all, GalerkinOutput};
use glq_core::Config;
use rayon::prelude::*;
use serde_json::json;

use crate::input::{read_pairs, PairRecord};
use crate::{num, writer, Failure, Format};

pub const HEADER: [&str; 10] = ["id", "L", "M", "Lp_x", "Lp_y", "Lp_z", "Mp", "contact", "branch", "regularized"];

pub fn contact_name(c: &ContactClass) -> &'static str {
    match c {
        ContactClass::NoTouch => "NoTouch",
        ContactClass::OneTouch { .. } => "OneTouch",
        ContactClass::TwoTouch { .. } => "TwoTouch",
        ContactClass::ThreeTouch { .. } => "ThreeTouch",
    }
}

fn evaluate(r: &PairRecord, cfg: &Config) -> glq_core::Result<GalerkinOutput> {
    let (tx, ty) = r.triangles()?;
    galerkin_all(&tx, &ty, cfg)
}

pub fn run(input: &Path, output: &Option<PathBuf>, fail_fast: bool, format: Format, cfg: &Config) -> Result<(), Failure> {
    let records = read_pairs(input)?;
    let results: Vec<_> = records.par_iter().map(|r| evaluate(r, cfg)).collect();

    let mut ok = Vec::with_capacity(results.len());
    let mut failed = 0;
    for (r, res) in records.iter().zip(results) {
        match res {
            Ok(o) => ok.push((r, o)),
            Err(e) => {
                eprintln!("{} (id {:?}): {e}", r.location, r.id);
                failed += 1;
                if fail_fast {
                    return Err(Failure::Input(anyhow::anyhow!("stopped at the first failing record")));
                }
            }
        }
    }

    let mut w = writer(output)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(HEADER)?;
            for (r, o) in &ok {
                let nums = [o.l, o.m, o.lp[0], o.lp[1], o.lp[2], o.mp].map(num);
                let flag = if o.mp_regularized { "true" } else { "false" };
                csv.write_record(
                    std::iter::once(r.id.as_str())
                        .chain(nums.iter().map(String::as_str))
                        .chain([contact_name(&o.contact), branch_name(o), flag]),
                )?;
            }
            csv.flush()?;
        }
        Format::Json => {
            let rows: Vec<_> = ok
                .iter()
                .map(|(r, o)| {
                    json!({
                        "id": r.id, "L": o.l, "M": o.m, "Lp_x": o.lp[0], "Lp_y": o.lp[1], "Lp_z": o.lp[2], "Mp": o.mp,
                        "contact": contact_name(&o.contact), "branch": branch_name(o), "regularized": o.mp_regularized,
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &rows)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    if failed > 0 {
        return Err(Failure::Input(anyhow::anyhow!("{failed} of {} records failed", records.len())));
    }
    Ok(())
}

fn branch_name(o: &GalerkinOutput) -> &'static str {
    match o.branch {
        glq_core::potentials::Branch::NonDegenerate => "NonDegenerate",
        glq_core::potentials::Branch::ParallelPlanes => "ParallelPlanes",
        glq_core::potentials::Branch::Coplanar => "Coplanar",
    }
}
