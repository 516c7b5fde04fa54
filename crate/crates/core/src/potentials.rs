//! The four surface integrals of a triangle pair.
//!
//! `L` comes from the 4D reduction. `M` and `L'` come from the contour
//! fluxes `F_x`, `F_y` (six prism integrals of the same reduction tree) when
//! the planes are not parallel, and from the `1/R^3` family when they are.
//! `M'` is a double contour integral, i.e. nine edge-edge integrals.

use crate::geometry::{are_parallel, contact_classification, signed_plane_distance, ContactClass, Triangle};
use crate::projection::{GapSet, KernelFamily};
use crate::reduction::{leaves, reduce, Domain, ReductionParams, ReductionTree};
use crate::{CompensatedSum, Config, Error, Result, Vec3};
use nalgebra::{Rotation3, Unit};

/// How the normal component of `L'` and the value of `M` were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    NonDegenerate,
    ParallelPlanes,
    Coplanar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GalerkinOutput {
    pub l: f64,
    pub m: f64,
    pub lp: Vec3,
    /// For pairs with a common edge this is the finite part with the
    /// common-edge terms dropped; see `mp_regularized`.
    pub mp: f64,
    pub contact: ContactClass,
    pub branch: Branch,
    pub mp_regularized: bool,
}

/// `F_x = Σ n_cxi F_xi` and `F_y = Σ n_cyi F_yi`, with `n_c` the outward
/// in-plane edge normals and `F_i` the integral of `G` over edge `i` of one
/// triangle times the whole other triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourFlux {
    pub fx: Vec3,
    pub fy: Vec3,
    pub fxi: [f64; 3],
    pub fyi: [f64; 3],
    pub ncx: [Vec3; 3],
    pub ncy: [Vec3; 3],
}

/// `H_ij = ∫_{C_xi} ∫_{C_yj} G`, with masked (common) edges set to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePairIntegrals {
    pub h: [[f64; 3]; 3],
    pub mask: [[bool; 3]; 3],
}

/// Geometry work shared by all integrals of one pair.
struct Pair {
    branch: Branch,
    delta: f64,
    cfg: Config,
    tree: ReductionTree,
    single: [f64; 6],
}

impl Pair {
    fn new(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<Self> {
        let (branch, delta, cfg) = if are_parallel(tx, ty, cfg.parallel) {
            let delta = signed_plane_distance(tx, ty, cfg.parallel)?;
            let zero = cfg.gap_zero * tx.max_edge().max(ty.max_edge());
            // the receiver edge vectors are only parallel to the source plane up to tol_parallel
            let tilt = 4.0 * cfg.parallel;
            let c = Config { rank: cfg.rank.max(tilt * tilt), ..*cfg };
            let b = if delta.abs() <= zero { Branch::Coplanar } else { Branch::ParallelPlanes };
            (b, if b == Branch::Coplanar { 0.0 } else { delta }, c)
        } else {
            (Branch::NonDegenerate, 0.0, *cfg)
        };
        let tree = ReductionTree::for_pair(tx, ty, &cfg);
        let single = tree.prism_values(KernelFamily::Single, &cfg)?;
        Ok(Self { branch, delta, cfg, tree, single })
    }

    fn l(&self, tx: &Triangle, ty: &Triangle) -> f64 {
        4.0 * tx.area() * ty.area() * self.tree.combine(&self.single, &self.cfg)
    }

    fn flux(&self, tx: &Triangle, ty: &Triangle) -> Result<ContourFlux> {
        let tilde = if self.tree.h4 == 0.0 {
            self.single.map(|v| 3.0 * v)
        } else {
            self.tree.prism_values(KernelFamily::Tilde, &self.cfg)?
        };
        let mut fxi = [0.0; 3];
        let mut fyi = [0.0; 3];
        let mut ncx = [Vec3::zeros(); 3];
        let mut ncy = [Vec3::zeros(); 3];
        let mut fx = Vec3::zeros();
        let mut fy = Vec3::zeros();
        for i in 0..3 {
            fyi[i] = 2.0 * ty.edge_len(i) * tx.area() * tilde[i];
            fxi[i] = 2.0 * tx.edge_len(i) * ty.area() * tilde[i + 3];
            ncx[i] = tx.edge_normal(i);
            ncy[i] = ty.edge_normal(i);
            fx += ncx[i] * fxi[i];
            fy += ncy[i] * fyi[i];
        }
        Ok(ContourFlux { fx, fy, fxi, fyi, ncx, ncy })
    }

    fn m(&self, tx: &Triangle, ty: &Triangle, flux: &ContourFlux) -> Result<f64> {
        Ok(match self.branch {
            Branch::Coplanar => 0.0,
            Branch::ParallelPlanes => {
                let primed = self.tree.prism_values(KernelFamily::Primed, &self.cfg)?;
                4.0 * tx.area() * ty.area() * self.delta * self.tree.combine(&primed, &self.cfg)
            }
            Branch::NonDegenerate => {
                let (nx, ny) = (tx.normal(), ty.normal());
                let c = nx.dot(&ny);
                -(nx.dot(&flux.fy) - c * ny.dot(&flux.fx)) / (1.0 - c * c)
            }
        })
    }
}

/// `L`, the fluxes and `M` of one pair.
#[derive(Debug, Clone, Copy)]
struct Core {
    branch: Branch,
    l: f64,
    flux: ContourFlux,
    m: f64,
}

impl Core {
    fn direct(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<Self> {
        let pair = Pair::new(tx, ty, cfg)?;
        let flux = pair.flux(tx, ty)?;
        let m = pair.m(tx, ty, &flux)?;
        Ok(Self { branch: pair.branch, l: pair.l(tx, ty), flux, m })
    }

    fn new(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<Self> {
        match Tilt::of(tx, ty, cfg) {
            Some(t) => t.interpolate(tx, ty, cfg),
            None => Self::direct(tx, ty, cfg),
        }
    }

    fn lp(&self, tx: &Triangle) -> Vec3 {
        -self.flux.fx - tx.normal() * self.m
    }
}

/// Above this, the intersection line of two non-parallel planes is far
/// enough from the triangles (in units of their size) that the reduction
/// weights, which grow like its distance, cost too many digits.
const TILT_RATIO: f64 = 30.0;
const TILT_NODES: usize = 24;

/// Rotation of the receiver about its centroid, around the direction of the
/// planes' intersection line, from the parallel position (`φ = 0`) through
/// the actual one (`φ = θ`). Every quantity of [`Core`] is analytic in `φ`
/// until the triangles come close, so it is interpolated from Chebyshev
/// nodes where the reduction is well conditioned.
struct Tilt {
    axis: Vec3,
    pivot: Vec3,
    theta: f64,
    half_width: f64,
}

impl Tilt {
    fn of(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Option<Self> {
        if are_parallel(tx, ty, cfg.parallel) {
            return None;
        }
        let (nx, ny) = (tx.normal(), ty.normal());
        let m = if nx.dot(&ny) < 0.0 { -nx } else { nx };
        let cross = m.cross(&ny);
        let sin = cross.norm();
        let size = tx.max_edge().max(ty.max_edge());
        let centroid = |t: &Triangle| (t.vertex(0) + t.vertex(1) + t.vertex(2)) / 3.0;
        let pivot = centroid(ty);
        let beta = m.dot(&(pivot - centroid(tx))).abs() / size;
        if beta <= TILT_RATIO * sin {
            return None;
        }
        Some(Self { axis: cross / sin, pivot, theta: sin.atan2(m.dot(&ny)), half_width: (0.5 * beta).min(0.5) })
    }

    fn interpolate(&self, tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<Core> {
        let n = TILT_NODES;
        let mut num = [0.0; 14];
        let mut den = 0.0;
        for j in 0..n {
            let arg = (2 * j + 1) as f64 * std::f64::consts::PI / (2 * n) as f64;
            let phi = self.half_width * arg.cos();
            let rot = Rotation3::from_axis_angle(&Unit::new_unchecked(self.axis), phi - self.theta);
            let tj = ty.map(|p| self.pivot + rot * (p - self.pivot))?;
            let c = Core::direct(tx, &tj, cfg)?;
            if phi == self.theta {
                return Ok(c);
            }
            let f = [
                c.l, c.m, c.flux.fx[0], c.flux.fx[1], c.flux.fx[2], c.flux.fy[0], c.flux.fy[1], c.flux.fy[2],
                c.flux.fxi[0], c.flux.fxi[1], c.flux.fxi[2], c.flux.fyi[0], c.flux.fyi[1], c.flux.fyi[2],
            ];
            let w = if j % 2 == 0 { arg.sin() } else { -arg.sin() } / (self.theta - phi);
            den += w;
            for k in 0..14 {
                num[k] += w * f[k];
            }
        }
        let f = num.map(|v| v / den);
        let mut flux = Core::direct_flux_normals(tx, ty);
        flux.fx = Vec3::new(f[2], f[3], f[4]);
        flux.fy = Vec3::new(f[5], f[6], f[7]);
        flux.fxi = [f[8], f[9], f[10]];
        flux.fyi = [f[11], f[12], f[13]];
        Ok(Core { branch: Branch::NonDegenerate, l: f[0], flux, m: f[1] })
    }
}

impl Core {
    fn direct_flux_normals(tx: &Triangle, ty: &Triangle) -> ContourFlux {
        ContourFlux {
            fx: Vec3::zeros(),
            fy: Vec3::zeros(),
            fxi: [0.0; 3],
            fyi: [0.0; 3],
            ncx: [0, 1, 2].map(|i| tx.edge_normal(i)),
            ncy: [0, 1, 2].map(|i| ty.edge_normal(i)),
        }
    }
}

/// `L = ∫∫ G`, for any contact class.
pub fn single_layer(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<f64> {
    Ok(Core::new(tx, ty, cfg)?.l)
}

pub fn contour_flux(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<ContourFlux> {
    Ok(Core::new(tx, ty, cfg)?.flux)
}

/// `M = ∫∫ n_x·∇_x G`; zero for coplanar pairs (principal value).
pub fn double_layer(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<f64> {
    Ok(Core::new(tx, ty, cfg)?.m)
}

/// `L' = ∫∫ ∇_y G = -F_x - n_x M`.
pub fn grad_single_layer(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<Vec3> {
    Ok(Core::new(tx, ty, cfg)?.lp(tx))
}

/// The nine edge-edge integrals, with edges common to both triangles masked.
pub fn edge_pair_integrals(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<EdgePairIntegrals> {
    let contact = contact_classification(tx, ty, cfg.touch)?;
    edge_pairs(tx, ty, &contact, cfg)
}

fn edge_pairs(tx: &Triangle, ty: &Triangle, contact: &ContactClass, cfg: &Config) -> Result<EdgePairIntegrals> {
    let mut mask = [[false; 3]; 3];
    for s in contact.shared_edges() {
        mask[s.ex][s.ey] = true;
    }
    let zero_abs = cfg.gap_zero * tx.max_edge().max(ty.max_edge());
    let mut h = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if mask[i][j] {
                continue;
            }
            let v = reduce(&edge_square(tx, ty, i, j, zero_abs), KernelFamily::Hat, cfg).map_err(|e| match e {
                Error::DivergentEdgeIntegral { .. } => Error::DivergentEdgeIntegral { i: i + 1, j: j + 1 },
                other => other,
            })?;
            h[i][j] = tx.edge_len(i) * ty.edge_len(j) * v;
        }
    }
    Ok(EdgePairIntegrals { h, mask })
}

/// `H_ij / (l_xi l_yj)` as a square integral: `a = (l_xi, -l_yj)`, `e = x_i - y_j`.
fn edge_square(tx: &Triangle, ty: &Triangle, i: usize, j: usize, zero_abs: f64) -> ReductionParams {
    ReductionParams {
        d: 2,
        domain: Domain::Square,
        a: vec![tx.edge(i), -ty.edge(j)],
        e: tx.vertex(i) - ty.vertex(j),
        inherited: GapSet::default(),
        zero_abs,
    }
}

/// Gap tuples of every 1D leaf the pair evaluates: the Single tree (all six
/// prisms, as the fluxes use them) and the unmasked edge-edge squares.
pub fn leaf_gaps(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<Vec<(KernelFamily, GapSet)>> {
    let pair = Pair::new(tx, ty, cfg)?;
    let mut out: Vec<(KernelFamily, GapSet)> =
        pair.tree.prism_leaves.iter().flatten().map(|l| (KernelFamily::Single, l.gaps)).collect();
    let contact = contact_classification(tx, ty, cfg.touch)?;
    let mut mask = [[false; 3]; 3];
    for s in contact.shared_edges() {
        mask[s.ex][s.ey] = true;
    }
    let zero_abs = cfg.gap_zero * tx.max_edge().max(ty.max_edge());
    for i in 0..3 {
        for j in 0..3 {
            if !mask[i][j] {
                let lv = leaves(&edge_square(tx, ty, i, j, zero_abs), cfg);
                out.extend(lv.iter().map(|l| (KernelFamily::Hat, l.gaps)));
            }
        }
    }
    Ok(out)
}

fn mp_from_edges(tx: &Triangle, ty: &Triangle, e: &EdgePairIntegrals) -> f64 {
    let mut acc = CompensatedSum::new();
    for i in 0..3 {
        for j in 0..3 {
            if e.mask[i][j] {
                continue;
            }
            let c = tx.edge(i).dot(&ty.edge(j)) / (tx.edge_len(i) * ty.edge_len(j));
            acc.add(-c * e.h[i][j]);
        }
    }
    acc.value()
}

/// `M' = -∮∮ G dx·dy`. With a common edge the divergent common-edge terms
/// are dropped and the finite remainder is returned.
pub fn hypersingular(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<f64> {
    Ok(mp_from_edges(tx, ty, &edge_pair_integrals(tx, ty, cfg)?))
}

/// Closed forms for a triangle with itself:
/// `L = (4A^2/3) Σ ln(p/(p - l_j))/l_j` and `M' = 2 Σ l_j ln(p/(p - l_j))`,
/// with `p` the semi-perimeter; `M = 0` and `L' = 0`.
pub fn self_action(tri: &Triangle) -> GalerkinOutput {
    let p = tri.semi_perimeter();
    let a = tri.area();
    let mut l = CompensatedSum::new();
    let mut mp = CompensatedSum::new();
    for j in 0..3 {
        let lj = tri.edge_len(j);
        let lg = (p / (p - lj)).ln();
        l.add(lg / lj);
        mp.add(lj * lg);
    }
    GalerkinOutput {
        l: 4.0 * a * a / 3.0 * l.value(),
        m: 0.0,
        lp: Vec3::zeros(),
        mp: 2.0 * mp.value(),
        contact: ContactClass::ThreeTouch { map: [0, 1, 2] },
        branch: Branch::Coplanar,
        mp_regularized: true,
    }
}

/// All four integrals, sharing the reduction tree. Coincident triangles use
/// [`self_action`].
pub fn galerkin_all(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Result<GalerkinOutput> {
    let contact = contact_classification(tx, ty, cfg.touch)?;
    if let ContactClass::ThreeTouch { map } = contact {
        let mut out = self_action(tx);
        // an odd vertex map means the receiver is traversed the other way round
        if (map[1] + 3 - map[0]) % 3 != 1 {
            out.mp = -out.mp;
        }
        out.contact = contact;
        return Ok(out);
    }
    let core = Core::new(tx, ty, cfg)?;
    let edges = edge_pairs(tx, ty, &contact, cfg)?;
    let mp = mp_from_edges(tx, ty, &edges);
    Ok(GalerkinOutput {
        l: core.l,
        m: core.m,
        lp: core.lp(tx),
        mp,
        contact,
        branch: core.branch,
        mp_regularized: matches!(contact, ContactClass::TwoTouch { .. }),
    })
}
