//! Primitive boundary functions (PBFs).
//!
//! `F_d` solves `P F_d' + d F_d = G_d(sqrt(P^2 + h_d^2))` with the
//! normalization `F_d(P) = P^{-d} ∫_0^P p^{d-1} G_d(sqrt(p^2 + h_d^2)) dp`,
//! where `G_d = F_{d+1}` below the top level of the family.
//!
//! Logarithms of the form `ln((a + sqrt(a^2 + b^2))/b)` are written as
//! `asinh(a/b)`, and differences that vanish like `P^2` are expanded
//! algebraically so that nothing cancels as `P -> 0`. The 2D and 3D functions
//! that still cancel for `P` small against the gaps are evaluated from their
//! defining integral with a 12-point Gauss rule in that range.

use crate::projection::{GapSet, KernelFamily, PbfCase};
use crate::quadrature::gl12;
use crate::{Error, Result};

/// Below `SMALL_P * (gap scale)` the value at `P = 0` is returned.
const SMALL_P: f64 = 1e-8;
/// Below `KAPPA * (gap scale)` cases with two nonzero gaps use the defining
/// integral; their closed forms cancel there.
const KAPPA: f64 = 0.25;

/// Whether `F_d` exists for this family and case.
pub fn admissible(d: usize, family: KernelFamily, id: u8) -> bool {
    match family {
        KernelFamily::Single => (1..=4).contains(&d) && (1..=7).contains(&id),
        KernelFamily::Primed => (1..=4).contains(&d) && (id == 6 || id == 7),
        KernelFamily::Tilde => (1..=3).contains(&d) && (1..=7).contains(&id),
        KernelFamily::Hat => (d == 2 && (1..=3).contains(&id)) || (d == 1 && (1..=3).contains(&id) || (d == 1 && id == 8)),
    }
}

/// Gaps that case `id` requires to be nonzero, as a bit mask over `h1..h4`.
fn nonzero_mask(id: u8) -> [bool; 4] {
    match id {
        1 => [true, false, false, false],
        2 => [false, true, false, false],
        3 => [true, true, false, false],
        4 => [true, false, true, false],
        5 => [false, true, true, false],
        6 => [true, false, false, true],
        7 => [false, true, false, true],
        _ => [false; 4],
    }
}

fn check(d: usize, family: KernelFamily, case: &PbfCase) -> Result<()> {
    if !admissible(d, family, case.id) {
        return Err(Error::InadmissibleCombination { d, family, case: case.id });
    }
    let mask = nonzero_mask(case.id);
    let g = case.gaps.h;
    for k in d - 1..4 {
        if (g[k] != 0.0) != mask[k] {
            return Err(Error::InvalidGapPattern(g[0], g[1], g[2], g[3]));
        }
    }
    Ok(())
}

/// `F_d(P)` for the given family and case.
pub fn pbf(d: usize, family: KernelFamily, case: &PbfCase, p: f64) -> Result<f64> {
    check(d, family, case)?;
    if !(p > 0.0) {
        return Err(Error::NonPositiveP(p));
    }
    Ok(eval(d, family, case.id, &case.gaps, p))
}

/// `G_d(R)`: the kernel at the top level of the family, `F_{d+1}` below it.
pub fn kernel_g(d: usize, family: KernelFamily, case: &PbfCase, r: f64) -> f64 {
    g_level(d, family, case.id, &case.gaps, r)
}

/// `|P F_d'(P) + d F_d(P) - G_d(sqrt(P^2 + h_d^2))|` with a central difference.
pub fn ode_residual(d: usize, family: KernelFamily, case: &PbfCase, p: f64) -> Result<f64> {
    check(d, family, case)?;
    let dp = 1e-5 * p;
    let f = |x: f64| eval(d, family, case.id, &case.gaps, x);
    let deriv = (f(p + dp) - f(p - dp)) / (2.0 * dp);
    let hd = case.gaps.at(d);
    let g = kernel_g(d, family, case, (p * p + hd * hd).sqrt());
    Ok((p * deriv + d as f64 * f(p) - g).abs())
}

pub(crate) fn eval(d: usize, family: KernelFamily, id: u8, g: &GapSet, p: f64) -> f64 {
    match family {
        KernelFamily::Single => single(d, id, g, p),
        KernelFamily::Primed => primed(d, id, g, p),
        KernelFamily::Tilde => {
            let (tid, tg) = tilde_to_single(id, g);
            3.0 * single(d, tid, &tg, p)
        }
        KernelFamily::Hat => {
            if id == 8 {
                // practical PBF for collinear edges; only differences of it are meaningful
                p.max(1e-300).ln() / p
            } else {
                6.0 * single(d, id, g, p)
            }
        }
    }
}

/// Tilde gaps `(h1, h2, 0, h4)` map to Single gaps `(h1, h2, h4, 0)`.
fn tilde_to_single(id: u8, g: &GapSet) -> (u8, GapSet) {
    let h3 = g.h[2].hypot(g.h[3]);
    let id = match id {
        6 => 4,
        7 => 5,
        other => other,
    };
    (id, GapSet::new(g.h[0], g.h[1], h3, 0.0))
}

fn g_level(d: usize, family: KernelFamily, id: u8, g: &GapSet, r: f64) -> f64 {
    match (family, d) {
        (KernelFamily::Single, 4) => 1.0 / r,
        (KernelFamily::Primed, 4) => 1.0 / (r * r * r),
        (KernelFamily::Tilde, 3) => 1.0 / r.hypot(g.h[3]),
        (KernelFamily::Hat, 2) => 1.0 / r,
        (KernelFamily::Hat, 1) if id == 8 => 1.0 / r,
        _ => eval(d + 1, family, id, g, r),
    }
}

/// `F_d(0) = G_d(h_d) / d`.
fn at_zero(d: usize, family: KernelFamily, id: u8, g: &GapSet) -> f64 {
    let hd = g.at(d);
    let top = matches!((family, d), (KernelFamily::Single, 4) | (KernelFamily::Primed, 4));
    let gd = if hd == 0.0 && !top {
        at_zero(d + 1, family, id, g)
    } else {
        g_level(d, family, id, g, hd)
    };
    gd / d as f64
}

/// `∫_0^1 t^{d-1} G_d(sqrt(P^2 t^2 + h_d^2)) dt`, the defining integral rescaled.
fn by_definition(d: usize, family: KernelFamily, id: u8, g: &GapSet, p: f64) -> f64 {
    let (x, w) = gl12();
    let hd = g.at(d);
    let mut s = 0.0;
    for (t, wt) in x.iter().zip(w) {
        let r = (p * p * t * t + hd * hd).sqrt();
        s += wt * t.powi(d as i32 - 1) * g_level(d, family, id, g, r);
    }
    s
}

fn single(d: usize, id: u8, g: &GapSet, p: f64) -> f64 {
    let hs = g.norm_from(d);
    if p < SMALL_P * hs {
        return at_zero(d, KernelFamily::Single, id, g);
    }
    let [h1, h2, h3, h4] = g.h;
    match d {
        4 => {
            if id <= 5 {
                1.0 / (3.0 * p)
            } else {
                let r = p.hypot(h4);
                (r + 2.0 * h4) / (3.0 * (r + h4) * (r + h4))
            }
        }
        3 => match id {
            1..=3 => 1.0 / (6.0 * p),
            _ if p < KAPPA * hs => by_definition(3, KernelFamily::Single, id, g, p),
            4 | 5 => {
                let r = p.hypot(h3);
                (p * r - h3 * h3 * (p / h3).asinh()) / (6.0 * p * p * p)
            }
            _ => {
                let r = p.hypot(h4);
                (p * r - 3.0 * h4 * h4 * (p / h4).asinh() + 4.0 * h4 * h4 * p / (r + h4)) / (6.0 * p * p * p)
            }
        },
        2 => match id {
            1 => 1.0 / (6.0 * p),
            2 | 3 => 1.0 / (6.0 * (p.hypot(h2) + h2)),
            _ if p < KAPPA * hs => by_definition(2, KernelFamily::Single, id, g, p),
            4 => {
                let r3 = p.hypot(h3);
                (r3 - 2.0 * h3 + h3 * h3 * (p / h3).asinh() / p) / (6.0 * p * p)
            }
            5 => {
                let h = h2.hypot(h3);
                let r2 = p.hypot(h2);
                let r3 = r2.hypot(h3);
                let c5 = h + h3 * h3 / h2 * (h2 / h3).asinh();
                (r3 - c5 + h3 * h3 / r2 * (r2 / h3).asinh()) / (6.0 * p * p)
            }
            6 => {
                let r4 = p.hypot(h4);
                let br = r4 - 3.0 * h4 + h4 * h4 * (3.0 * (p / h4).asinh() / p - 2.0 / (r4 + h4));
                br / (6.0 * p * p)
            }
            _ => {
                let h = h2.hypot(h4);
                let r2 = p.hypot(h2);
                let r4 = r2.hypot(h4);
                let c7 = h + h4 * h4 * (3.0 / h2 * (h2 / h4).asinh() - 2.0 / (h + h4));
                let br = r4 - c7 + h4 * h4 * (3.0 / r2 * (r2 / h4).asinh() - 2.0 / (r4 + h4));
                br / (6.0 * p * p)
            }
        },
        _ if id >= 4 && p < KAPPA * hs => by_definition(1, KernelFamily::Single, id, g, p),
        _ => {
            let ph = Phi::new(p, g);
            let f = match id {
                1 => ph.phi1,
                2 => ph.phi1 - 1.0 / (p.hypot(h2) + h2),
                3 => ph.phi1 - h2 / h1 * ph.phi2(h1),
                4 => {
                    let r = h3 / h1;
                    (1.0 - r * r) * ph.phi1 - 2.0 * r * ph.phi2(h1) + r * r * ph.phi3()
                }
                5 => {
                    let hh = ph.h * ph.h;
                    hh / (h2 * h2) * ph.phi1 - 1.0 / (ph.r4 + ph.h) - ph.phi4(h3)
                }
                6 => {
                    let r = h4 / h1;
                    (1.0 - 3.0 * r * r) * ph.phi1 - (3.0 - r * r) * r * ph.phi2(h1) + 3.0 * r * r * ph.phi3()
                        - r * r / (ph.r4 + h4)
                }
                _ => {
                    let r = h4 / h2;
                    (1.0 + 3.0 * r * r) * ph.phi1 - 2.0 * r * r * r * ph.phi2(h2) - 3.0 * ph.phi4(h4)
                        + (2.0 * h4 * h4 - h2 * h2) / (h2 * h2 * (ph.r4 + ph.h))
                }
            };
            f / 6.0
        }
    }
}

fn primed(d: usize, id: u8, g: &GapSet, p: f64) -> f64 {
    let hs = g.norm_from(d);
    if p < SMALL_P * hs {
        return at_zero(d, KernelFamily::Primed, id, g);
    }
    let [h1, h2, _, h4] = g.h;
    match d {
        4 => {
            let r = p.hypot(h4);
            1.0 / (r * (r + h4) * (r + h4))
        }
        3 if p < KAPPA * hs => by_definition(3, KernelFamily::Primed, id, g, p),
        3 => {
            let r = p.hypot(h4);
            ((p / h4).asinh() - 2.0 * p / (r + h4)) / (p * p * p)
        }
        2 if p < KAPPA * hs => by_definition(2, KernelFamily::Primed, id, g, p),
        2 => {
            if id == 6 {
                let r = p.hypot(h4);
                (1.0 / (r + h4) - (p / h4).asinh() / p + 0.5 / h4) / (p * p)
            } else {
                let h = h2.hypot(h4);
                let r2 = p.hypot(h2);
                let r4 = r2.hypot(h4);
                (1.0 / (r4 + h4) - 1.0 / (h + h4) - (r2 / h4).asinh() / r2 + (h2 / h4).asinh() / h2) / (p * p)
            }
        }
        _ if p < KAPPA * hs => by_definition(1, KernelFamily::Primed, id, g, p),
        _ => {
            let ph = Phi::new(p, g);
            if id == 6 {
                (ph.phi1 + (h1 * h1 - h4 * h4) / (2.0 * h1 * h4) * ph.phi2(h1) - ph.phi3() + 0.5 / (ph.r4 + h4))
                    / (h1 * h1)
            } else {
                // (R2^2/(R4+h4) - h2^2/(h+h4)) / P^2 without the P^2 cancellation
                let (h, r4) = (ph.h, ph.r4);
                let a = (h4 + (h * r4 + h4 * h4) / (r4 + h)) / ((r4 + h4) * (h + h4));
                -(ph.phi1 - h4 / h2 * ph.phi2(h2) - (h2 * h2) / (h4 * h4) * ph.phi4(h4) + a) / (h2 * h2)
            }
        }
    }
}

/// Auxiliary functions of the 1D PBFs at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValues {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub phi4: f64,
}

/// `Φ1(P1)`, `Φ2(P1; η)`, `Φ3(P1)` and `Φ4(P1; η)` for the full gap set.
///
/// `Φ3` needs `h^2 - h1^2 > 0` and `Φ4` needs `h2, η > 0`; otherwise NaN is
/// returned in that slot.
pub fn phi(p1: f64, gaps: &GapSet, eta: f64) -> PhiValues {
    let ph = Phi::new(p1, gaps);
    PhiValues { phi1: ph.phi1, phi2: ph.phi2(eta), phi3: ph.phi3(), phi4: ph.phi4(eta) }
}

struct Phi<'a> {
    p: f64,
    g: &'a GapSet,
    h: f64,
    r4: f64,
    phi1: f64,
}

impl<'a> Phi<'a> {
    fn new(p: f64, g: &'a GapSet) -> Self {
        let h = g.norm_from(1);
        let r4 = p.hypot(h);
        let phi1 = if p == 0.0 { 1.0 / h } else { (p / h).asinh() / p };
        Self { p, g, h, r4, phi1 }
    }

    /// `sqrt(h^2 - η^2)` where η is one of the gaps.
    fn rest(&self, eta: f64) -> f64 {
        let sq: f64 = self.g.h.iter().map(|x| x * x).sum::<f64>() - eta * eta;
        // exact when η equals one of the gaps: sum the others instead
        for k in 0..4 {
            if self.g.h[k] == eta {
                return (0..4).filter(|&m| m != k).map(|m| self.g.h[m] * self.g.h[m]).sum::<f64>().sqrt();
            }
        }
        sq.max(0.0).sqrt()
    }

    fn phi2(&self, eta: f64) -> f64 {
        let den = self.h * self.h + self.r4 * self.rest(eta);
        if self.p == 0.0 {
            eta / den
        } else {
            (eta * self.p / den).atan() / self.p
        }
    }

    fn phi3(&self) -> f64 {
        let r1 = self.p.hypot(self.g.h[0]);
        let q = self.rest(self.g.h[0]);
        (r1 / q).asinh() / r1
    }

    /// `η^2/(P^2 h2) ((R2/h2) ln((R2+R4)/η) - ln((h2+h)/η))`, with
    /// `R2 - h2 = P^2/(R2+h2)` and `R4 - h = P^2/(R4+h)` substituted.
    fn phi4(&self, eta: f64) -> f64 {
        let (p, h, r4) = (self.p, self.h, self.r4);
        let h2 = self.g.h[1];
        let r2 = p.hypot(h2);
        let first = ((r2 + r4) / eta).ln() / (h2 * (r2 + h2));
        let z = 1.0 / (r2 + h2) + 1.0 / (r4 + h);
        let second = if p == 0.0 { z / (h2 + h) } else { (p * p * z / (h2 + h)).ln_1p() / (p * p) };
        eta * eta / h2 * (first + second)
    }
}
