//! Rank-tolerant Gram-Schmidt decomposition of an offset vector and the
//! zero-pattern classification of the resulting gaps.

use crate::{Error, GsOrder, Result, Vec3};

/// Output of the modified Gram-Schmidt process on `a_1..a_d`.
///
/// `coef[k][i] = u_k·a_i / |u_k|^2` for `k < i`, `coef[i][i] = 1`; the divisor
/// is replaced by 1 when `u_k` was found to be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoSet {
    pub u: Vec<Vec3>,
    pub coef: [[f64; 4]; 4],
    pub zero: Vec<bool>,
}

impl OrthoSet {
    pub fn rank(&self) -> usize {
        self.zero.iter().filter(|z| !**z).count()
    }
}

/// Modified Gram-Schmidt; `u_k` is set to exactly zero when
/// `|u_k|^2 <= rank_tol * max_i |a_i|^2`.
pub fn orthogonalize(a: &[Vec3], rank_tol: f64) -> OrthoSet {
    let d = a.len();
    assert!((1..=4).contains(&d), "orthogonalize expects 1..=4 vectors");
    let scale = a.iter().map(|v| v.norm_squared()).fold(0.0, f64::max);
    let mut u: Vec<Vec3> = Vec::with_capacity(d);
    let mut zero = Vec::with_capacity(d);
    let mut coef = [[0.0; 4]; 4];
    for i in 0..d {
        let mut v = a[i];
        for k in 0..i {
            if zero[k] {
                continue;
            }
            let c = u[k].dot(&v) / u[k].norm_squared();
            coef[k][i] = c;
            v -= u[k] * c;
        }
        coef[i][i] = 1.0;
        let z = v.norm_squared() <= rank_tol * scale || scale == 0.0;
        zero.push(z);
        u.push(if z { Vec3::zeros() } else { v });
    }
    // coefficients against zero vectors stay 0, matching the unit divisor rule
    OrthoSet { u, coef, zero }
}

/// `e = e_par + e_perp` with `e_par = Σ s0_i a_i` and `h = |e_perp|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionDecomposition {
    pub s0: Vec<f64>,
    pub h: f64,
    pub e_par: Vec3,
    pub e_perp: Vec3,
}

/// Decomposition with the default (forward) tie-breaking order.
pub fn decompose(e: Vec3, a: &[Vec3], rank_tol: f64) -> ProjectionDecomposition {
    decompose_ordered(e, a, rank_tol, GsOrder::Forward)
}

/// Decomposition where `order` selects which coefficients are zeroed when the
/// vectors are linearly dependent.
pub fn decompose_ordered(e: Vec3, a: &[Vec3], rank_tol: f64, order: GsOrder) -> ProjectionDecomposition {
    let d = a.len();
    let perm: Vec<usize> = match order {
        GsOrder::Forward => (0..d).collect(),
        GsOrder::Reverse => (0..d).rev().collect(),
    };
    let ap: Vec<Vec3> = perm.iter().map(|&i| a[i]).collect();
    let q = orthogonalize(&ap, rank_tol);

    let mut e_perp = e;
    let mut b = [0.0; 4];
    // second sweep restores orthogonality lost to nearly dependent columns
    for _ in 0..2 {
        for k in 0..d {
            if q.zero[k] {
                continue;
            }
            let c = q.u[k].dot(&e_perp) / q.u[k].norm_squared();
            b[k] += c;
            e_perp -= q.u[k] * c;
        }
    }
    // back substitution of Σ_i coef[k][i] s_i = b_k, free rows set to zero
    let mut sp = [0.0; 4];
    for k in (0..d).rev() {
        if q.zero[k] {
            sp[k] = 0.0;
            continue;
        }
        let mut v = b[k];
        for i in k + 1..d {
            v -= q.coef[k][i] * sp[i];
        }
        sp[k] = v;
    }
    let mut s0 = vec![0.0; d];
    for (k, &i) in perm.iter().enumerate() {
        s0[i] = sp[k];
    }
    ProjectionDecomposition { s0, h: e_perp.norm(), e_par: e - e_perp, e_perp }
}

/// Kernel family of a primitive boundary function chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// `G_4 = 1/R_4`.
    Single,
    /// `G_4 = 1/R_4^3`, used for the double layer between parallel planes.
    Primed,
    /// `G_3 = 1/sqrt(R_3^2 + h_4^2)`, the contour-flux prism integrals.
    Tilde,
    /// `G_2 = 1/R_2`, the edge-edge integrals of the hypersingular kernel.
    Hat,
}

/// Gaps `(h1, h2, h3, h4)`; `h[0]` is `h1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GapSet {
    pub h: [f64; 4],
}

impl GapSet {
    pub fn new(h1: f64, h2: f64, h3: f64, h4: f64) -> Self {
        Self { h: [h1, h2, h3, h4] }
    }

    /// Gap of level `d` (1-based).
    pub fn at(&self, d: usize) -> f64 {
        self.h[d - 1]
    }

    pub fn set(&mut self, d: usize, v: f64) {
        self.h[d - 1] = v;
    }

    /// `sqrt(h_d^2 + ... + h_4^2)`.
    pub fn norm_from(&self, d: usize) -> f64 {
        self.h[d - 1..].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Same gaps with entries `<= zero_abs` replaced by exact zeros.
    pub fn snapped(&self, zero_abs: f64) -> Self {
        let mut g = *self;
        for v in g.h.iter_mut() {
            if *v <= zero_abs {
                *v = 0.0;
            }
        }
        g
    }
}

/// Active zero-pattern (case id 1..=8) together with the gaps it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbfCase {
    pub id: u8,
    pub gaps: GapSet,
}

impl PbfCase {
    /// Unchecked constructor.
    pub fn new(id: u8, gaps: GapSet) -> Self {
        Self { id, gaps }
    }
}

fn pattern_id(z: [bool; 4]) -> Option<u8> {
    // z[k]: gap k+1 is nonzero
    match z {
        [true, false, false, false] => Some(1),
        [false, true, false, false] => Some(2),
        [true, true, false, false] => Some(3),
        [true, false, true, false] => Some(4),
        [false, true, true, false] => Some(5),
        [true, false, false, true] => Some(6),
        [false, true, false, true] => Some(7),
        _ => None,
    }
}

/// Classifies a full gap tuple. Gaps `<= zero_abs` count as zero (and are
/// returned as exact zeros). Case 8 (all zero) is admissible only for `Hat`.
pub fn classify_case(gaps: GapSet, zero_abs: f64, family: KernelFamily) -> Result<PbfCase> {
    let g = gaps.snapped(zero_abs);
    let nz = g.h.map(|v| v != 0.0);
    if nz == [false; 4] && family == KernelFamily::Hat {
        return Ok(PbfCase { id: 8, gaps: g });
    }
    match pattern_id(nz) {
        Some(id) => Ok(PbfCase { id, gaps: g }),
        None => Err(Error::InvalidGapPattern(g.h[0], g.h[1], g.h[2], g.h[3])),
    }
}

/// Classifies only the gaps of levels `d..=4`, which is all `F_d` depends on.
/// The returned id is the smallest case sharing that partial pattern.
pub fn classify_level(d: usize, gaps: GapSet, zero_abs: f64) -> Result<PbfCase> {
    assert!((1..=4).contains(&d));
    if d == 1 {
        return classify_case(gaps, zero_abs, KernelFamily::Single);
    }
    let g = gaps.snapped(zero_abs);
    let nz = |k: usize| g.at(k) != 0.0;
    let id = match d {
        4 => Some(if nz(4) { 6 } else { 1 }),
        3 => match (nz(3), nz(4)) {
            (false, false) => Some(1),
            (true, false) => Some(4),
            (false, true) => Some(6),
            _ => None,
        },
        _ => match (nz(2), nz(3), nz(4)) {
            (false, false, false) => Some(1),
            (true, false, false) => Some(2),
            (false, true, false) => Some(4),
            (true, true, false) => Some(5),
            (false, false, true) => Some(6),
            (true, false, true) => Some(7),
            _ => None,
        },
    };
    id.map(|id| PbfCase { id, gaps: g }).ok_or(Error::InvalidGapPattern(g.h[0], g.h[1], g.h[2], g.h[3]))
}

/// Lemmas broken by an (already snapped) gap tuple, as numbers 1..=4.
///
/// 1: at least two gaps vanish; 2: `h1+h2+h3 != 0`; 3: `h3 h4 = 0`; 4: `h1+h2 != 0`.
pub fn lemma_violations(g: &GapSet) -> Vec<u8> {
    let [h1, h2, h3, h4] = g.h;
    let mut v = Vec::new();
    if g.h.iter().filter(|x| **x == 0.0).count() < 2 {
        v.push(1);
    }
    if h1 + h2 + h3 == 0.0 {
        v.push(2);
    }
    if h3 * h4 != 0.0 {
        v.push(3);
    }
    if h1 + h2 == 0.0 {
        v.push(4);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    #[test]
    fn orthogonal_input_is_kept() {
        let q = orthogonalize(&[v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)], 1e-24);
        assert_eq!(q.u, vec![v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)]);
    }

    #[test]
    fn dependent_pair() {
        let q = orthogonalize(&[v(1.0, 0.0, 0.0), v(2.0, 0.0, 0.0)], 1e-24);
        assert_eq!(q.u[1], Vec3::zeros());
        assert!(q.zero[1]);
    }

    #[test]
    fn coincident_triangles_have_rank_two() {
        let l1 = v(1.0, 0.0, 0.0);
        let l3 = v(-0.5, -3f64.sqrt() / 2.0, 0.0);
        let q = orthogonalize(&[l1, -l3, -l1, l3], 1e-24);
        assert_eq!(q.zero, vec![false, false, true, true]);
        assert_eq!(q.u[2], Vec3::zeros());
        assert_eq!(q.u[3], Vec3::zeros());
    }

    #[test]
    fn decompose_examples() {
        let a = [v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)];
        let d = decompose(Vec3::zeros(), &a, 1e-24);
        assert_eq!((d.s0.clone(), d.h), (vec![0.0, 0.0], 0.0));
        let d = decompose(v(0.0, 0.0, 1.0), &a, 1e-24);
        assert_eq!((d.s0.clone(), d.h), (vec![0.0, 0.0], 1.0));

        let s3 = 3f64.sqrt();
        let (l1, l2, l3) = (v(1.0, 0.0, 0.0), v(-0.5, s3 / 2.0, 0.0), v(-0.5, -s3 / 2.0, 0.0));
        let d = decompose(-l1, &[l1, -l2, -l3], 1e-24);
        assert_eq!(d.s0, vec![-1.0, 0.0, 0.0]);
        assert_eq!(d.h, 0.0);
    }

    #[test]
    fn random_sets_reconstruct_and_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 0..10_000 {
            let d = 1 + n % 4;
            let mut a: Vec<Vec3> = (0..d).map(|_| v(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            if n % 7 == 0 && d > 1 {
                a[d - 1] = a[0] * 2.5 - a[d - 2] * 0.5;
            }
            let e = v(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let q = orthogonalize(&a, 1e-24);
            let scale = a.iter().map(|x| x.norm_squared()).fold(0.0, f64::max);
            for k in 0..d {
                for m in 0..k {
                    assert!(q.u[k].dot(&q.u[m]).abs() <= 1e-12 * scale);
                }
                let mut r = Vec3::zeros();
                for j in 0..=k {
                    r += q.u[j] * q.coef[j][k];
                }
                assert!((r - a[k]).norm() <= 1e-12 * scale.sqrt());
            }
            for order in [GsOrder::Forward, GsOrder::Reverse] {
                let dec = decompose_ordered(e, &a, 1e-24, order);
                let mut par = Vec3::zeros();
                for i in 0..d {
                    par += a[i] * dec.s0[i];
                }
                let perp = e - par;
                // rounding in Σ s_i a_i grows with the size of the coefficients
                let mag = e.norm() + (0..d).map(|i| dec.s0[i].abs() * a[i].norm()).sum::<f64>();
                for ai in &a {
                    assert!(dec.e_perp.dot(ai).abs() <= 1e-12 * e.norm() * ai.norm());
                }
                assert!((par - dec.e_par).norm() <= 1e-13 * mag);
                assert_abs_diff_eq!(dec.h, perp.norm(), epsilon = 1e-13 * mag);
            }
        }
    }

    #[test]
    fn classification() {
        let c = |h1, h2, h3, h4| classify_case(GapSet::new(h1, h2, h3, h4), 1e-10, KernelFamily::Single).map(|c| c.id);
        assert_eq!(c(1.0, 0.0, 0.0, 0.0), Ok(1));
        assert_eq!(c(0.0, 2.0, 0.0, 0.0), Ok(2));
        assert_eq!(c(1.0, 2.0, 0.0, 0.0), Ok(3));
        assert_eq!(c(1.0, 0.0, 3.0, 0.0), Ok(4));
        assert_eq!(c(0.0, 2.0, 3.0, 0.0), Ok(5));
        assert_eq!(c(1.0, 0.0, 0.0, 4.0), Ok(6));
        assert_eq!(c(0.0, 2.0, 0.0, 4.0), Ok(7));
        assert_eq!(c(1e-12, 2.0, 0.0, 4.0), Ok(7));
        assert!(matches!(c(1.0, 2.0, 3.0, 0.0), Err(Error::InvalidGapPattern(..))));
        assert!(matches!(c(0.0, 0.0, 0.0, 0.0), Err(Error::InvalidGapPattern(..))));
        let hat = classify_case(GapSet::default(), 1e-10, KernelFamily::Hat).unwrap();
        assert_eq!(hat.id, 8);
    }

    #[test]
    fn lemma_audit_matches_case_table() {
        for bits in 0..16u8 {
            let g = GapSet::new((bits & 1) as f64, ((bits >> 1) & 1) as f64, ((bits >> 2) & 1) as f64, ((bits >> 3) & 1) as f64);
            let valid = classify_case(g, 0.0, KernelFamily::Single).is_ok();
            assert_eq!(valid, lemma_violations(&g).is_empty(), "bits {bits:04b}");
        }
    }
}
