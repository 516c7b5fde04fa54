//! Reference values by adaptive quadrature, and the near-touching
//! convergence sweeps.
//!
//! Nothing here calls the analytical reduction: surface integrals are
//! computed from the defining integrands, and PBFs from their defining
//! one-dimensional integral.

use crate::geometry::Triangle;
use crate::pbf;
use crate::potentials::galerkin_all;
use crate::projection::{classify_level, GapSet, KernelFamily, PbfCase};
use crate::reduction::{Domain, ReductionParams};
use crate::quadrature::{adaptive, gauss_legendre_01, Estimate};
use crate::{Config, Error, Result, Vec3};

const MAX_INTERVALS: usize = 200;

/// Which surface integral to approximate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integral {
    L,
    M,
    /// Component `k` of `L'`.
    Lp(usize),
    Mp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

impl From<Estimate> for QuadResult {
    fn from(e: Estimate) -> Self {
        Self { value: e.value, error_estimate: e.err, evaluations: e.evals }
    }
}

fn integrand(which: Integral, x: Vec3, y: Vec3, nx: Vec3, ny: Vec3) -> f64 {
    let d = y - x;
    let r2 = d.norm_squared();
    let r = r2.sqrt();
    match which {
        Integral::L => 1.0 / r,
        Integral::M => nx.dot(&d) / (r2 * r),
        Integral::Lp(k) => -d[k] / (r2 * r),
        Integral::Mp => nx.dot(&ny) / (r2 * r) - 3.0 * nx.dot(&d) * ny.dot(&d) / (r2 * r2 * r),
    }
}

/// Nested adaptive Gauss-Kronrod over the standard-triangle coordinates of
/// both triangles, to estimated relative error `tol`.
///
/// Meant for well-separated pairs; near-touching integrands need budgets far
/// beyond the interval limit and report [`Error::ToleranceNotReached`].
pub fn quad_reference(tx: &Triangle, ty: &Triangle, which: Integral, tol: f64) -> Result<QuadResult> {
    let (cx, cy) = (tx.chart(), ty.chart());
    let (nx, ny) = (tx.normal(), ty.normal());
    let jac = 4.0 * tx.area() * ty.area();
    let f = |s: f64, t: f64, u: f64, v: f64| integrand(which, cx.point(s, t), cy.point(u, v), nx, ny);

    // magnitude of the integrand for the absolute floor, from a coarse product rule
    let (gx, gw) = gauss_legendre_01(4);
    let mut mag = 0.0;
    for (a, wa) in gx.iter().zip(&gw) {
        for (b, wb) in gx.iter().zip(&gw) {
            for (c, wc) in gx.iter().zip(&gw) {
                for (e, we) in gx.iter().zip(&gw) {
                    let (s, t) = (*a, b * (1.0 - a));
                    let (u, v) = (*c, e * (1.0 - c));
                    mag += wa * wb * wc * we * (1.0 - a) * (1.0 - c) * f(s, t, u, v).abs();
                }
            }
        }
    }
    let abs = tol * mag;
    let inner = 0.25 * tol;

    let mut ok = true;
    let (est, outer_ok) = adaptive(
        |s| {
            let (e, o) = adaptive(
                |t| {
                    let (e, o) = adaptive(
                        |u| {
                            let (e, o) = adaptive(|v| Estimate { value: f(s, t, u, v), err: 0.0, evals: 1 }, 0.0, 1.0 - u, inner, abs, MAX_INTERVALS);
                            ok &= o;
                            e
                        },
                        0.0,
                        1.0,
                        inner,
                        abs,
                        MAX_INTERVALS,
                    );
                    ok &= o;
                    e
                },
                0.0,
                1.0 - s,
                inner,
                abs,
                MAX_INTERVALS,
            );
            ok &= o;
            e
        },
        0.0,
        1.0,
        tol,
        abs,
        MAX_INTERVALS,
    );
    let res = QuadResult { value: est.value * jac, error_estimate: est.err * jac, evaluations: est.evals };
    if !(ok && outer_ok) || !res.value.is_finite() {
        return Err(Error::ToleranceNotReached { value: res.value, error: res.error_estimate });
    }
    Ok(res)
}

/// `H_ij = ∫_{C_xi} ∫_{C_yj} G` by nested adaptive quadrature (zero-based edges).
pub fn edge_pair_reference(tx: &Triangle, ty: &Triangle, i: usize, j: usize, tol: f64) -> Result<QuadResult> {
    let (x0, lx, y0, ly) = (tx.vertex(i), tx.edge(i), ty.vertex(j), ty.edge(j));
    let mut ok = true;
    let (est, o) = adaptive(
        |s| {
            let (e, o) = adaptive(
                |t| Estimate { value: 1.0 / (x0 + lx * s - y0 - ly * t).norm(), err: 0.0, evals: 1 },
                0.0,
                1.0,
                0.25 * tol,
                0.0,
                MAX_INTERVALS,
            );
            ok &= o;
            e
        },
        0.0,
        1.0,
        tol,
        0.0,
        MAX_INTERVALS,
    );
    let scale = tx.edge_len(i) * ty.edge_len(j);
    finish((Estimate { value: est.value * scale, err: est.err * scale, evals: est.evals }, ok && o))
}

/// `F_d(P)` from `∫_0^1 t^{d-1} G_d(sqrt(P^2 t^2 + h_d^2)) dt` with the
/// closed-form `G_d` of the level above.
///
/// Hat case 8 has no integral definition (its `G_1 = 1/R` is not integrable
/// at `P = 0`) and is rejected as inadmissible.
pub fn pbf_oracle(d: usize, family: KernelFamily, case: &PbfCase, p: f64, tol: f64) -> Result<QuadResult> {
    pre(d, family, case, p)?;
    let hd = case.gaps.at(d);
    let g = |t: f64| {
        let r = (p * p * t * t + hd * hd).sqrt();
        Estimate { value: t.powi(d as i32 - 1) * pbf::kernel_g(d, family, case, r), err: 0.0, evals: 1 }
    };
    finish(adaptive(g, 0.0, 1.0, tol, 0.0, MAX_INTERVALS))
}

/// Same as [`pbf_oracle`] but with every level below the family's top
/// kernel also computed by quadrature, so no closed form is involved.
pub fn pbf_oracle_nested(d: usize, family: KernelFamily, case: &PbfCase, p: f64, tol: f64) -> Result<QuadResult> {
    pre(d, family, case, p)?;
    let ok = std::cell::Cell::new(true);
    let e = nested(d, family, case, p, tol, &ok);
    if !ok.get() {
        return Err(Error::ToleranceNotReached { value: e.value, error: e.err });
    }
    Ok(e.into())
}

fn pre(d: usize, family: KernelFamily, case: &PbfCase, p: f64) -> Result<()> {
    if !pbf::admissible(d, family, case.id) || (family == KernelFamily::Hat && case.id == 8) {
        return Err(Error::InadmissibleCombination { d, family, case: case.id });
    }
    if !(p > 0.0) {
        return Err(Error::NonPositiveP(p));
    }
    Ok(())
}

fn finish((e, ok): (Estimate, bool)) -> Result<QuadResult> {
    if !ok || !e.value.is_finite() {
        return Err(Error::ToleranceNotReached { value: e.value, error: e.err });
    }
    Ok(e.into())
}

fn top_level(family: KernelFamily) -> usize {
    match family {
        KernelFamily::Single | KernelFamily::Primed => 4,
        KernelFamily::Tilde => 3,
        KernelFamily::Hat => 2,
    }
}

fn nested(d: usize, family: KernelFamily, case: &PbfCase, p: f64, tol: f64, ok: &std::cell::Cell<bool>) -> Estimate {
    let hd = case.gaps.at(d);
    let top = top_level(family);
    let g = |t: f64| {
        let r = (p * p * t * t + hd * hd).sqrt();
        let w = t.powi(d as i32 - 1);
        if d == top {
            Estimate { value: w * pbf::kernel_g(d, family, case, r), err: 0.0, evals: 1 }
        } else {
            let e = nested(d + 1, family, case, r, 0.25 * tol, ok);
            Estimate { value: w * e.value, err: w * e.err, evals: e.evals }
        }
    };
    let (e, o) = adaptive(g, 0.0, 1.0, tol, 0.0, MAX_INTERVALS);
    if !o {
        ok.set(false);
    }
    e
}

/// `I_d = ∫_D G_d(|e + Σ s_i a_i|) ds` of one reduction level by nested
/// adaptive quadrature, with `G_d` the family's kernel for the inherited
/// gaps. This is what [`crate::reduction::reduce`] computes analytically.
pub fn level_reference(p: &ReductionParams, family: KernelFamily, tol: f64) -> Result<QuadResult> {
    let case = if p.d == 4 { PbfCase::new(1, p.inherited) } else { classify_level(p.d + 1, p.inherited, p.zero_abs)? };
    let f = |s: &[f64]| {
        let x = s.iter().zip(&p.a).fold(p.e, |acc, (si, ai)| acc + ai * *si);
        pbf::kernel_g(p.d, family, &case, x.norm())
    };
    // the upper limit of coordinate k given the outer ones
    let upper = |k: usize, s: &[f64]| match (p.domain, k) {
        (Domain::Product | Domain::Prism | Domain::Triangle, 1) => 1.0 - s[0],
        (Domain::Product, 3) => 1.0 - s[2],
        _ => 1.0,
    };
    let ok = std::cell::Cell::new(true);
    let mut s = [0.0; 4];
    let e = nested_box(p.d, 0, &mut s, &upper, &f, tol, &ok);
    finish((e, ok.get()))
}

fn nested_box(
    dim: usize,
    k: usize,
    s: &mut [f64; 4],
    upper: &dyn Fn(usize, &[f64]) -> f64,
    f: &dyn Fn(&[f64]) -> f64,
    tol: f64,
    ok: &std::cell::Cell<bool>,
) -> Estimate {
    let hi = upper(k, &s[..k]);
    let inner_tol = if k == 0 { tol } else { 0.25 * tol };
    let (e, o) = adaptive(
        |t| {
            s[k] = t;
            if k + 1 == dim {
                Estimate { value: f(&s[..dim]), err: 0.0, evals: 1 }
            } else {
                let mut inner = *s;
                nested_box(dim, k + 1, &mut inner, upper, f, 0.25 * tol, ok)
            }
        },
        0.0,
        hi,
        inner_tol,
        0.0,
        MAX_INTERVALS,
    );
    if !o {
        ok.set(false);
    }
    e
}

/// Contact kind of the near-touching sweep geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    OneTouch,
    TwoTouch,
    ThreeTouch,
}

/// One offset of a sweep: the integrals and their relative differences
/// `(F - F0)/F0` from the limiting values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub eps: f64,
    pub l: f64,
    pub m: f64,
    pub mp: f64,
    pub rel_l: f64,
    pub rel_m: f64,
    pub rel_mp: f64,
}

/// Which column of a sweep to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepQuantity {
    L,
    M,
    Mp,
}

/// `∫_0^1 ∫_0^1 ds dt / sqrt((s - t)^2 + eps^2)`, the common-edge term of the
/// hypersingular integral for two parallel unit edges `eps` apart. Behaves
/// like `2 ln(2/eps) - 2`.
pub fn h11(eps: f64) -> f64 {
    let r = 1f64.hypot(eps);
    2.0 * ((1.0 / eps).asinh() - 1.0 / (r + eps))
}

/// Limits `(L0, M0, M'0(ε))` of the sweep geometries as `ε -> 0`.
pub fn sweep_limits(kind: SweepKind, eps: f64) -> (f64, f64, f64) {
    match kind {
        SweepKind::OneTouch => (0.182526568122379, 0.055671118815334, 0.063116905873345),
        SweepKind::TwoTouch => (0.415922738854561, 0.706739910625218, 2.857471441252689 - h11(eps)),
        SweepKind::ThreeTouch => (
            0.75 * 3f64.ln(),
            std::f64::consts::PI * 3f64.sqrt() / 2.0,
            6.0 * 3f64.ln() - 3.0 * h11(eps),
        ),
    }
}

/// Source and receiver of the sweep geometry at offset `eps`: the unit
/// equilateral source in `z = 0` and a receiver lifted by `eps` along `z`.
pub fn sweep_geometry(kind: SweepKind, eps: f64) -> Result<(Triangle, Triangle)> {
    let s3 = 3f64.sqrt();
    let v = Vec3::new;
    let tx = Triangle::new(v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.5, s3 / 2.0, 0.0))?;
    let y0 = match kind {
        SweepKind::OneTouch => [v(0.0, 0.0, 0.0), v(-1.0, 0.0, 0.0), v(-0.5, 0.0, s3 / 2.0)],
        SweepKind::TwoTouch => [v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.5, 0.0, s3 / 2.0)],
        SweepKind::ThreeTouch => *tx.vertices(),
    };
    let lift = v(0.0, 0.0, eps);
    let ty = Triangle::new(y0[0] + lift, y0[1] + lift, y0[2] + lift)?;
    Ok((tx, ty))
}

/// Evaluates `L`, `M`, `M'` along `eps_list`, which must be positive and
/// strictly decreasing.
pub fn convergence_sweep(kind: SweepKind, eps_list: &[f64], cfg: &Config) -> Result<Vec<SweepRecord>> {
    assert!(
        eps_list.iter().all(|&e| e > 0.0) && eps_list.windows(2).all(|w| w[1] < w[0]),
        "offsets must be positive and strictly decreasing"
    );
    eps_list.iter().map(|&eps| sweep_point(kind, eps, cfg)).collect()
}

/// A single sweep offset.
pub fn sweep_point(kind: SweepKind, eps: f64, cfg: &Config) -> Result<SweepRecord> {
    let (tx, ty) = sweep_geometry(kind, eps)?;
    let out = galerkin_all(&tx, &ty, cfg)?;
    let (l0, m0, mp0) = sweep_limits(kind, eps);
    Ok(SweepRecord {
        eps,
        l: out.l,
        m: out.m,
        mp: out.mp,
        rel_l: (out.l - l0) / l0,
        rel_m: (out.m - m0) / m0,
        rel_mp: (out.mp - mp0) / mp0,
    })
}

/// Least-squares slope of `ln|ε_rel|` against `ln ε`, skipping points at the
/// rounding floor. `None` with fewer than two usable points.
pub fn fit_slope(records: &[SweepRecord], q: SweepQuantity) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| {
            let rel = match q {
                SweepQuantity::L => r.rel_l,
                SweepQuantity::M => r.rel_m,
                SweepQuantity::Mp => r.rel_mp,
            };
            (r.eps, rel.abs())
        })
        .filter(|&(_, rel)| rel > 1e3 * f64::EPSILON)
        .map(|(e, rel)| (e.ln(), rel.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Ratio of `|ε_rel|` for `M'` to the model `ε/ln(1/ε)`, per record.
pub fn mp_model_ratios(records: &[SweepRecord]) -> Vec<f64> {
    records.iter().map(|r| r.rel_mp.abs() / (r.eps / (1.0 / r.eps).ln())).collect()
}

/// A reference benchmark value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Golden {
    pub label: &'static str,
    pub tx: Triangle,
    pub ty: Triangle,
    pub which: Integral,
    pub value: f64,
}

/// The unit equilateral source facing three receivers sharing the edge from
/// `(1,0,1)` to `(0,0,1)`: upright, tilted and flat.
pub fn benchmark_pairs() -> Result<[(Triangle, Triangle); 3]> {
    let (s3, s6) = (3f64.sqrt(), 6f64.sqrt());
    let v = Vec3::new;
    let tx = Triangle::new(v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.5, s3 / 2.0, 0.0))?;
    let y = |y3| Triangle::new(v(1.0, 0.0, 1.0), v(0.0, 0.0, 1.0), y3);
    Ok([
        (tx, y(v(0.5, 0.0, 1.0 + s3 / 2.0))?),
        (tx, y(v(0.5, s6 / 4.0, 1.0 + s6 / 4.0))?),
        (tx, y(v(0.5, -s3 / 2.0, 1.0))?),
    ])
}

/// Right isosceles unit triangle and its mirror image lifted by `h`.
pub fn stacked_pair(h: f64) -> Result<(Triangle, Triangle)> {
    let v = Vec3::new;
    let tx = Triangle::new(v(0.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(1.0, 0.0, 0.0))?;
    let ty = Triangle::new(v(0.0, 0.0, h), v(0.0, 1.0, h), v(-1.0, 0.0, h))?;
    Ok((tx, ty))
}

pub const STACKED_HEIGHTS: [f64; 6] = [0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0];

/// All reference benchmark values: the three [`benchmark_pairs`] with every
/// integral, `L` of [`stacked_pair`] at each of [`STACKED_HEIGHTS`], and `L'`
/// for a displaced receiver at `h = 1e-2`.
pub fn golden_values() -> Result<Vec<Golden>> {
    const TABLE: [[f64; 6]; 3] = [
        [0.139757030669707, 0.099860729206614, 0.0, 0.022035244796804, -0.099860729206614, 0.046564310284965],
        [0.149630247150535, 0.114715727210190, 0.0, 0.010953212167802, -0.114715727210190, 0.137859073743097],
        [0.156068357679434, 0.111863573921226, 0.0, 0.055673013677787, -0.111863573921226, -0.138417139905960],
    ];
    const NAMES: [[&str; 6]; 3] = [
        ["upright L", "upright M", "upright L'x", "upright L'y", "upright L'z", "upright M'"],
        ["tilted L", "tilted M", "tilted L'x", "tilted L'y", "tilted L'z", "tilted M'"],
        ["flat L", "flat M", "flat L'x", "flat L'y", "flat L'z", "flat M'"],
    ];
    const WHICH: [Integral; 6] = [Integral::L, Integral::M, Integral::Lp(0), Integral::Lp(1), Integral::Lp(2), Integral::Mp];
    const STACKED: [(&str, f64); 6] = [
        ("stacked L h=0", 0.4154834934268203),
        ("stacked L h=1e-4", 0.4154834087866360),
        ("stacked L h=1e-3", 0.4154773308369882),
        ("stacked L h=1e-2", 0.4150963397038614),
        ("stacked L h=1e-1", 0.3986731498732936),
        ("stacked L h=1", 0.1994877345160997),
    ];
    let mut out = Vec::new();
    for (k, (tx, ty)) in benchmark_pairs()?.into_iter().enumerate() {
        for j in 0..6 {
            out.push(Golden { label: NAMES[k][j], tx, ty, which: WHICH[j], value: TABLE[k][j] });
        }
    }
    for (h, (label, value)) in STACKED_HEIGHTS.iter().zip(STACKED) {
        let (tx, ty) = stacked_pair(*h)?;
        out.push(Golden { label, tx, ty, which: Integral::L, value });
    }
    let v = Vec3::new;
    let (tx, _) = stacked_pair(0.0)?;
    let ty = Triangle::new(v(-2.0, 0.5, 0.01), v(-1.0, 1.0, 0.01), v(-1.0, 0.0, 0.01))?;
    let lp = [0.0937210251186334, -0.0069668668016032, -0.0006289369951278];
    for (k, label) in ["displaced L'x", "displaced L'y", "displaced L'z"].into_iter().enumerate() {
        out.push(Golden { label, tx, ty, which: Integral::Lp(k), value: lp[k] });
    }
    Ok(out)
}

/// Helper for tests that want a [`PbfCase`] without classification.
pub fn case_from(id: u8, h: [f64; 4]) -> PbfCase {
    PbfCase::new(id, GapSet { h })
}
