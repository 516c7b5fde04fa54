//! Face-by-face reduction of the 4D integral to weighted endpoint values of
//! the 1D PBFs.
//!
//! A level-`d` integral is `I_d = ∫_D G_d(|e + Σ s_i a_i|) ds` over one of
//! the standard domains below. Writing `e = Σ s_i0 a_i + e_perp` and applying
//! the divergence theorem to `(s + s0) F_d` turns it into a sum over the faces
//! of `D`, each a level-`(d-1)` integral of the same form whose kernel is
//! `F_d`. The face weights are `-s_i0` on `s_i = 0`, `1 + s_i0` on `s_i = 1`
//! and `1 + s_i0 + s_k0` on `s_i + s_k = 1`.

use crate::geometry::Triangle;
use crate::pbf;
use crate::projection::{classify_case, decompose_ordered, GapSet, KernelFamily};
use crate::{CompensatedSum, Config, Error, Result, Vec3};

/// Integration domain of one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `T × T`, two standard triangles in `(s1, s2)` and `(s3, s4)`.
    Product,
    /// Standard triangle in `(s1, s2)` times `[0, 1]` in `s3`.
    Prism,
    Square,
    Triangle,
    Segment,
}

impl Domain {
    fn dim(self) -> usize {
        match self {
            Domain::Product => 4,
            Domain::Prism => 3,
            Domain::Square | Domain::Triangle => 2,
            Domain::Segment => 1,
        }
    }
}

/// Parameters of one level: `d` coefficient vectors, the offset, and the gaps
/// `h_{d+1}..h_4` fixed by the levels above (`inherited[k]` is `h_{k+1}`).
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionParams {
    pub d: usize,
    pub domain: Domain,
    pub a: Vec<Vec3>,
    pub e: Vec3,
    pub inherited: GapSet,
    /// Gaps at or below this are treated as exactly zero.
    pub zero_abs: f64,
}

/// Weighted faces of one level, with the projection data that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceExpansion {
    pub s0: Vec<f64>,
    pub h: f64,
    pub children: Vec<(f64, ReductionParams)>,
}

/// Level-4 parameters `a = (Xs, Xt, -Yu, -Yv)`, `e = X0 - Y0`.
pub fn init_4d(tx: &Triangle, ty: &Triangle, cfg: &Config) -> ReductionParams {
    let (cx, cy) = (tx.chart(), ty.chart());
    ReductionParams {
        d: 4,
        domain: Domain::Product,
        a: vec![cx.s, cx.t, -cy.s, -cy.t],
        e: cx.origin - cy.origin,
        inherited: GapSet::default(),
        zero_abs: cfg.gap_zero * tx.max_edge().max(ty.max_edge()),
    }
}

fn project(p: &ReductionParams, cfg: &Config) -> (Vec<f64>, f64, Vec3) {
    let dec = decompose_ordered(p.e, &p.a, cfg.rank, cfg.gs_order);
    if dec.h <= p.zero_abs {
        (dec.s0, 0.0, p.e)
    } else {
        (dec.s0, dec.h, dec.e_par)
    }
}

fn child(p: &ReductionParams, h: f64, domain: Domain, a: Vec<Vec3>, e: Vec3) -> ReductionParams {
    let mut inherited = p.inherited;
    inherited.set(p.d, h);
    ReductionParams { d: p.d - 1, domain, a, e, inherited, zero_abs: p.zero_abs }
}

/// Expands one level into its weighted faces.
pub fn expand(p: &ReductionParams, cfg: &Config) -> FaceExpansion {
    match p.domain {
        Domain::Product => expand_4d(p, cfg),
        Domain::Prism => expand_3d(p, cfg),
        Domain::Square | Domain::Triangle => expand_2d(p, cfg),
        Domain::Segment => panic!("segments have no faces"),
    }
}

/// The six prism faces of `T × T`, in the order `s4 = 0`, `s3 + s4 = 1`,
/// `s3 = 0`, `s2 = 0`, `s1 + s2 = 1`, `s1 = 0`.
pub fn expand_4d(p: &ReductionParams, cfg: &Config) -> FaceExpansion {
    assert_eq!(p.domain, Domain::Product);
    let (s, h, ep) = project(p, cfg);
    let a = &p.a;
    let pr = |va: [Vec3; 3], e: Vec3| child(p, h, Domain::Prism, va.to_vec(), e);
    let children = vec![
        (-s[3], pr([a[0], a[1], a[2]], ep)),
        (1.0 + s[2] + s[3], pr([a[0], a[1], a[3] - a[2]], ep + a[2])),
        (-s[2], pr([a[0], a[1], a[3]], ep)),
        (-s[1], pr([a[2], a[3], a[0]], ep)),
        (1.0 + s[0] + s[1], pr([a[2], a[3], a[1] - a[0]], ep + a[0])),
        (-s[0], pr([a[2], a[3], a[1]], ep)),
    ];
    FaceExpansion { s0: s, h, children }
}

/// Three squares (`s1 + s2 = 1`, `s1 = 0`, `s2 = 0`) and two triangles
/// (`s3 = 1`, `s3 = 0`) of a prism.
pub fn expand_3d(p: &ReductionParams, cfg: &Config) -> FaceExpansion {
    assert_eq!(p.domain, Domain::Prism);
    let (s, h, ep) = project(p, cfg);
    let a = &p.a;
    let f = |dom, va: [Vec3; 2], e: Vec3| child(p, h, dom, va.to_vec(), e);
    let children = vec![
        (1.0 + s[0] + s[1], f(Domain::Square, [a[0] - a[1], a[2]], ep + a[1])),
        (-s[0], f(Domain::Square, [a[1], a[2]], ep)),
        (-s[1], f(Domain::Square, [a[0], a[2]], ep)),
        (1.0 + s[2], f(Domain::Triangle, [a[0], a[1]], ep + a[2])),
        (-s[2], f(Domain::Triangle, [a[0], a[1]], ep)),
    ];
    FaceExpansion { s0: s, h, children }
}

/// Edges of a square (4) or standard triangle (3).
pub fn expand_2d(p: &ReductionParams, cfg: &Config) -> FaceExpansion {
    let (s, h, ep) = project(p, cfg);
    let a = &p.a;
    let seg = |va: Vec3, e: Vec3| child(p, h, Domain::Segment, vec![va], e);
    let children = match p.domain {
        Domain::Square => vec![
            (1.0 + s[0], seg(a[1], ep + a[0])),
            (-s[0], seg(a[1], ep)),
            (1.0 + s[1], seg(a[0], ep + a[1])),
            (-s[1], seg(a[0], ep)),
        ],
        Domain::Triangle => vec![
            (-s[0], seg(a[1], ep)),
            (-s[1], seg(a[0], ep)),
            (1.0 + s[0] + s[1], seg(a[0] - a[1], ep + a[1])),
        ],
        other => panic!("not a 2D domain: {other:?}"),
    };
    FaceExpansion { s0: s, h, children }
}

/// A 1D leaf after projection: `(1 + s10) F1(|1 + s10| |a|) - s10 F1(|s10| |a|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leaf {
    /// Product of the face weights from the root down to this segment.
    pub weight: f64,
    pub s10: f64,
    pub len: f64,
    pub gaps: GapSet,
}

fn make_leaf(p: &ReductionParams, weight: f64, cfg: &Config) -> Leaf {
    assert_eq!(p.domain, Domain::Segment);
    let (s, h, _) = project(p, cfg);
    let mut gaps = p.inherited;
    gaps.set(1, h);
    // a zero-length segment has no direction; its integral vanishes
    Leaf { weight, s10: s[0], len: p.a[0].norm(), gaps }
}

impl Leaf {
    /// Number of PBF endpoint evaluations this leaf needs after pruning.
    pub fn calls(&self, prune: f64) -> usize {
        usize::from((1.0 + self.s10).abs() > prune) + usize::from(self.s10.abs() > prune)
    }

    /// Unweighted value with the given family.
    pub fn value(&self, family: KernelFamily, cfg: &Config) -> Result<f64> {
        if self.len == 0.0 {
            return Ok(0.0);
        }
        let case = classify_case(self.gaps, 0.0, family)?;
        if !pbf::admissible(1, family, case.id) {
            return Err(Error::InadmissibleCombination { d: 1, family, case: case.id });
        }
        let (s, l) = (self.s10, self.len);
        let mut v = 0.0;
        if case.id == 8 && s < -cfg.prune && s > -1.0 + cfg.prune {
            return Err(Error::DivergentEdgeIntegral { i: 0, j: 0 });
        }
        if (1.0 + s).abs() > cfg.prune {
            v += (1.0 + s) * pbf::eval(1, family, case.id, &self.gaps, (1.0 + s).abs() * l);
        }
        if s.abs() > cfg.prune {
            v -= s * pbf::eval(1, family, case.id, &self.gaps, s.abs() * l);
        }
        Ok(v)
    }
}

/// Evaluates a segment with the given family.
pub fn eval_1d(p: &ReductionParams, family: KernelFamily, cfg: &Config) -> Result<f64> {
    make_leaf(p, 1.0, cfg).value(family, cfg)
}

/// Collects the weighted leaves below `p`, skipping faces with `|weight| <= prune`.
pub fn leaves(p: &ReductionParams, cfg: &Config) -> Vec<Leaf> {
    let mut out = Vec::new();
    collect(p, 1.0, cfg, &mut out);
    out
}

fn collect(p: &ReductionParams, w: f64, cfg: &Config, out: &mut Vec<Leaf>) {
    if p.domain == Domain::Segment {
        out.push(make_leaf(p, w, cfg));
        return;
    }
    for (cw, c) in expand(p, cfg).children {
        if cw.abs() > cfg.prune {
            collect(&c, w * cw, cfg, out);
        }
    }
}

/// `Σ weight × value` over leaves, compensated.
pub fn sum_leaves(leaves: &[Leaf], family: KernelFamily, cfg: &Config) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for leaf in leaves {
        acc.add(leaf.weight * leaf.value(family, cfg)?);
    }
    Ok(acc.value())
}

/// Full recursive evaluation of `p` with the given family.
pub fn reduce(p: &ReductionParams, family: KernelFamily, cfg: &Config) -> Result<f64> {
    debug_assert_eq!(p.a.len(), p.d);
    debug_assert_eq!(p.domain.dim(), p.d);
    sum_leaves(&leaves(p, cfg), family, cfg)
}

/// The 4D expansion of one triangle pair, with every prism's leaves
/// collected once and shared by all families.
#[derive(Debug, Clone)]
pub struct ReductionTree {
    pub root: ReductionParams,
    pub h4: f64,
    pub weights: [f64; 6],
    pub prisms: Vec<ReductionParams>,
    pub prism_leaves: Vec<Vec<Leaf>>,
}

impl ReductionTree {
    pub fn new(root: ReductionParams, cfg: &Config) -> Self {
        let exp = expand_4d(&root, cfg);
        let mut weights = [0.0; 6];
        let mut prisms = Vec::with_capacity(6);
        let mut prism_leaves = Vec::with_capacity(6);
        for (k, (w, c)) in exp.children.into_iter().enumerate() {
            weights[k] = w;
            prism_leaves.push(leaves(&c, cfg));
            prisms.push(c);
        }
        Self { root, h4: exp.h, weights, prisms, prism_leaves }
    }

    pub fn for_pair(tx: &Triangle, ty: &Triangle, cfg: &Config) -> Self {
        Self::new(init_4d(tx, ty, cfg), cfg)
    }

    /// `I_3` of each prism, unweighted.
    pub fn prism_values(&self, family: KernelFamily, cfg: &Config) -> Result<[f64; 6]> {
        let mut out = [0.0; 6];
        for (k, lv) in self.prism_leaves.iter().enumerate() {
            out[k] = sum_leaves(lv, family, cfg)?;
        }
        Ok(out)
    }

    /// `Σ_j w_j I_3j`, skipping pruned prisms.
    pub fn combine(&self, prism: &[f64; 6], cfg: &Config) -> f64 {
        let mut acc = CompensatedSum::new();
        for k in 0..6 {
            if self.weights[k].abs() > cfg.prune {
                acc.add(self.weights[k] * prism[k]);
            }
        }
        acc.value()
    }

    /// Leaves that contribute to the 4D value.
    pub fn active_leaves(&self, cfg: &Config) -> impl Iterator<Item = &Leaf> {
        let keep: Vec<bool> = self.weights.iter().map(|w| w.abs() > cfg.prune).collect();
        self.prism_leaves.iter().zip(keep).filter(|(_, k)| *k).flat_map(|(l, _)| l.iter())
    }

    /// PBF endpoint evaluations for the 4D value.
    pub fn pbf_calls(&self, cfg: &Config) -> usize {
        self.active_leaves(cfg).map(|l| l.calls(cfg.prune)).sum()
    }
}
