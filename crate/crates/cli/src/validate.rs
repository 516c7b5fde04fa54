use std::io::Write;

use glq_core::oracle::{benchmark_pairs, golden_values, quad_reference, Integral};
use glq_core::potentials::{galerkin_all, GalerkinOutput};
use glq_core::Config;
use rayon::prelude::*;
use serde_json::json;

use crate::{num, Failure, Format};

/// Precision requested from the quadrature oracle.
const QUAD_TOL: f64 = 1e-12;

struct Check {
    name: String,
    computed: f64,
    expected: f64,
    deviation: f64,
    tol: f64,
    kind: &'static str,
}

impl Check {
    fn passed(&self) -> bool {
        self.deviation < self.tol
    }
}

fn pick(o: &GalerkinOutput, which: Integral) -> f64 {
    match which {
        Integral::L => o.l,
        Integral::M => o.m,
        Integral::Lp(k) => o.lp[k],
        Integral::Mp => o.mp,
    }
}

fn name(which: Integral) -> String {
    match which {
        Integral::L => "L".into(),
        Integral::M => "M".into(),
        Integral::Lp(k) => format!("L'{}", ["x", "y", "z"][k]),
        Integral::Mp => "M'".into(),
    }
}

fn checks(tol: f64, oracle_tol: f64, cfg: &Config) -> anyhow::Result<Vec<Check>> {
    let golden = golden_values()?;
    let mut out: Vec<Check> = golden
        .par_iter()
        .map(|g| {
            let computed = pick(&galerkin_all(&g.tx, &g.ty, cfg)?, g.which);
            let deviation = (computed - g.value).abs();
            Ok(Check { name: g.label.into(), computed, expected: g.value, deviation, tol, kind: "abs" })
        })
        .collect::<glq_core::Result<_>>()?;

    // the benchmark pairs share an edge only with the lifted plane, so they are separated
    let pairs = benchmark_pairs()?;
    let jobs: Vec<_> = (0..pairs.len()).flat_map(|k| [Integral::L, Integral::M, Integral::Mp].map(|w| (k, w))).collect();
    let oracle: Vec<Check> = jobs
        .par_iter()
        .map(|&(k, which)| {
            let (tx, ty) = &pairs[k];
            let computed = pick(&galerkin_all(tx, ty, cfg)?, which);
            let q = quad_reference(tx, ty, which, QUAD_TOL)?;
            let deviation = ((computed - q.value) / q.value).abs();
            let name = format!("pair {} {} vs quadrature", k + 1, name(which));
            Ok(Check { name, computed, expected: q.value, deviation, tol: oracle_tol, kind: "rel" })
        })
        .collect::<glq_core::Result<_>>()?;
    out.extend(oracle);
    Ok(out)
}

pub fn run(tol: f64, oracle_tol: f64, format: Format, cfg: &Config) -> Result<(), Failure> {
    let checks = checks(tol, oracle_tol, cfg)?;
    let mut w = crate::writer(&None)?;
    let status = |c: &Check| if c.passed() { "PASS" } else { "FAIL" };
    match format {
        Format::Csv => {
            writeln!(w, "check,computed,expected,deviation,kind,tol,status")?;
            for c in &checks {
                let row = [num(c.computed), num(c.expected), format!("{:.3e}", c.deviation), c.kind.into(), format!("{:.1e}", c.tol)];
                writeln!(w, "{},{},{}", c.name, row.join(","), status(c))?;
            }
        }
        Format::Json => {
            let rows: Vec<_> = checks
                .iter()
                .map(|c| {
                    json!({
                        "check": c.name, "computed": c.computed, "expected": c.expected,
                        "deviation": c.deviation, "kind": c.kind, "tol": c.tol, "passed": c.passed(),
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &rows)?;
            writeln!(w)?;
        }
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let worst = checks.iter().filter(|c| c.kind == "abs").map(|c| c.deviation).fold(0.0, f64::max);
    writeln!(w, "# {} checks, {failed} failed, worst benchmark deviation {worst:.3e}", checks.len())?;
    w.flush()?;
    if failed > 0 {
        return Err(Failure::Validation);
    }
    Ok(())
}
