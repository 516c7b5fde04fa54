//! Flat triangles, the standard-triangle chart, and contact classification.

use crate::{Error, Result, Vec3};

/// A flat triangle with its derived edge data.
///
/// Edges are `l1 = v2 - v1`, `l2 = v3 - v2`, `l3 = v1 - v3`; the unit normal is
/// `n = -(l1 × l3) / (2A)`, so the vertices are taken as positively oriented
/// with respect to `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    v: [Vec3; 3],
    l: [Vec3; 3],
    len: [f64; 3],
    area: f64,
    normal: Vec3,
}

/// Affine chart of the standard triangle: `X(s, t) = X0 + s Xs + t Xt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub origin: Vec3,
    pub s: Vec3,
    pub t: Vec3,
}

impl Chart {
    pub fn point(&self, s: f64, t: f64) -> Vec3 {
        self.origin + self.s * s + self.t * t
    }
}

impl Triangle {
    /// Builds a triangle with the default degeneracy tolerance.
    pub fn new(v1: Vec3, v2: Vec3, v3: Vec3) -> Result<Self> {
        Self::with_tolerance(v1, v2, v3, crate::Config::default().geom)
    }

    /// Builds a triangle; fails when `2A < tol_geom * (max edge)^2`.
    pub fn with_tolerance(v1: Vec3, v2: Vec3, v3: Vec3, tol_geom: f64) -> Result<Self> {
        if !(v1.iter().chain(v2.iter()).chain(v3.iter())).all(|c| c.is_finite()) {
            return Err(Error::NonFiniteVertex);
        }
        let l = [v2 - v1, v3 - v2, v1 - v3];
        let len = [l[0].norm(), l[1].norm(), l[2].norm()];
        let max_edge = len[0].max(len[1]).max(len[2]);
        let cross = l[0].cross(&l[2]);
        let twice_area = cross.norm();
        if !(twice_area > 0.0) || twice_area < tol_geom * max_edge * max_edge {
            return Err(Error::DegenerateTriangle { twice_area, edge: max_edge });
        }
        Ok(Self { v: [v1, v2, v3], l, len, area: 0.5 * twice_area, normal: -cross / twice_area })
    }

    pub fn from_arrays(v: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(Vec3::from(v[0]), Vec3::from(v[1]), Vec3::from(v[2]))
    }

    pub fn vertices(&self) -> &[Vec3; 3] {
        &self.v
    }

    pub fn vertex(&self, i: usize) -> Vec3 {
        self.v[i]
    }

    /// Edge vector `l_{i+1}` (zero-based), running from vertex `i` to vertex `i+1`.
    pub fn edge(&self, i: usize) -> Vec3 {
        self.l[i]
    }

    pub fn edge_len(&self, i: usize) -> f64 {
        self.len[i]
    }

    pub fn edges(&self) -> &[Vec3; 3] {
        &self.l
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn semi_perimeter(&self) -> f64 {
        0.5 * (self.len[0] + self.len[1] + self.len[2])
    }

    pub fn max_edge(&self) -> f64 {
        self.len[0].max(self.len[1]).max(self.len[2])
    }

    /// In-plane outward unit normal of edge `i`: `(l_i × n) / |l_i|`.
    pub fn edge_normal(&self, i: usize) -> Vec3 {
        self.l[i].cross(&self.normal) / self.len[i]
    }

    pub fn chart(&self) -> Chart {
        Chart { origin: self.v[0], s: self.l[0], t: -self.l[2] }
    }

    /// Applies `f` to every vertex and rebuilds the triangle.
    pub fn map(&self, f: impl Fn(Vec3) -> Vec3) -> Result<Self> {
        Self::new(f(self.v[0]), f(self.v[1]), f(self.v[2]))
    }
}

/// Same as [`Triangle::new`].
pub fn triangle_from_vertices(v1: Vec3, v2: Vec3, v3: Vec3) -> Result<Triangle> {
    Triangle::new(v1, v2, v3)
}

pub fn chart(tri: &Triangle) -> Chart {
    tri.chart()
}

/// True when `|n_x × n_y| < tol_parallel`, i.e. the tilt angle is below it.
pub fn are_parallel(tx: &Triangle, ty: &Triangle, tol_parallel: f64) -> bool {
    tx.normal.cross(&ty.normal).norm() < tol_parallel
}

/// Signed distance `δ = n_x·(y1 - x1)` between parallel planes.
pub fn signed_plane_distance(tx: &Triangle, ty: &Triangle, tol_parallel: f64) -> Result<f64> {
    if !are_parallel(tx, ty, tol_parallel) {
        return Err(Error::NotParallel { cos: tx.normal.dot(&ty.normal) });
    }
    Ok(tx.normal.dot(&(ty.v[0] - tx.v[0])))
}

/// How two triangles touch. Indices are zero-based vertex numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactClass {
    NoTouch,
    /// Vertex `i` of `S_x` coincides with vertex `j` of `S_y`.
    OneTouch { i: usize, j: usize },
    /// Two matched vertex pairs `(i, j)`, i.e. a common edge.
    TwoTouch { pairs: [(usize, usize); 2] },
    /// `map[i]` is the vertex of `S_y` matching vertex `i` of `S_x`.
    ThreeTouch { map: [usize; 3] },
}

/// A common edge: `S_x` edge `ex` and `S_y` edge `ey` (zero-based edge indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedEdge {
    pub ex: usize,
    pub ey: usize,
    /// Whether `l_{x,ex}` and `l_{y,ey}` point the same way.
    pub same_direction: bool,
}

impl ContactClass {
    pub fn matched_pairs(&self) -> Vec<(usize, usize)> {
        match *self {
            ContactClass::NoTouch => vec![],
            ContactClass::OneTouch { i, j } => vec![(i, j)],
            ContactClass::TwoTouch { pairs } => pairs.to_vec(),
            ContactClass::ThreeTouch { map } => (0..3).map(|i| (i, map[i])).collect(),
        }
    }

    /// The same contact seen with the roles of the triangles exchanged.
    pub fn transpose(&self) -> Self {
        match *self {
            ContactClass::NoTouch => ContactClass::NoTouch,
            ContactClass::OneTouch { i, j } => ContactClass::OneTouch { i: j, j: i },
            ContactClass::TwoTouch { pairs } => {
                let mut p = [(pairs[0].1, pairs[0].0), (pairs[1].1, pairs[1].0)];
                p.sort();
                ContactClass::TwoTouch { pairs: p }
            }
            ContactClass::ThreeTouch { map } => {
                let mut inv = [0; 3];
                for (i, &j) in map.iter().enumerate() {
                    inv[j] = i;
                }
                ContactClass::ThreeTouch { map: inv }
            }
        }
    }

    /// Edges whose both end points are matched.
    pub fn shared_edges(&self) -> Vec<SharedEdge> {
        let pairs = self.matched_pairs();
        let mut out = Vec::new();
        for a in 0..pairs.len() {
            for b in 0..pairs.len() {
                let ((i1, j1), (i2, j2)) = (pairs[a], pairs[b]);
                // x edge running i1 -> i2
                if (i1 + 1) % 3 != i2 {
                    continue;
                }
                if (j1 + 1) % 3 == j2 {
                    out.push(SharedEdge { ex: i1, ey: j1, same_direction: true });
                } else if (j2 + 1) % 3 == j1 {
                    out.push(SharedEdge { ex: i1, ey: j2, same_direction: false });
                }
            }
        }
        out
    }

    /// Short label used in reports, with one-based indices.
    pub fn label(&self) -> String {
        match *self {
            ContactClass::NoTouch => "none".into(),
            ContactClass::OneTouch { i, j } => format!("one({},{})", i + 1, j + 1),
            ContactClass::TwoTouch { pairs } => format!(
                "two({},{};{},{})",
                pairs[0].0 + 1,
                pairs[0].1 + 1,
                pairs[1].0 + 1,
                pairs[1].1 + 1
            ),
            ContactClass::ThreeTouch { .. } => "three".into(),
        }
    }
}

/// Matches vertices closer than `tol_touch * (mean edge length of both triangles)`.
pub fn contact_classification(tx: &Triangle, ty: &Triangle, tol_touch: f64) -> Result<ContactClass> {
    let mean_edge = (tx.len.iter().sum::<f64>() + ty.len.iter().sum::<f64>()) / 6.0;
    let tol = tol_touch * mean_edge;
    let mut pairs = Vec::new();
    let mut used_y = [false; 3];
    for i in 0..3 {
        let mut found = None;
        for j in 0..3 {
            if (tx.v[i] - ty.v[j]).norm() <= tol {
                if found.is_some() || used_y[j] {
                    return Err(Error::AmbiguousContact);
                }
                found = Some(j);
            }
        }
        if let Some(j) = found {
            used_y[j] = true;
            pairs.push((i, j));
        }
    }
    Ok(match pairs.len() {
        0 => ContactClass::NoTouch,
        1 => ContactClass::OneTouch { i: pairs[0].0, j: pairs[0].1 },
        2 => ContactClass::TwoTouch { pairs: [pairs[0], pairs[1]] },
        _ => ContactClass::ThreeTouch { map: [pairs[0].1, pairs[1].1, pairs[2].1] },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn equilateral() -> Triangle {
        Triangle::new(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0)).unwrap()
    }

    #[test]
    fn equilateral_area_and_normal() {
        let t = equilateral();
        assert_abs_diff_eq!(t.area(), 3f64.sqrt() / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!((t.normal() - Vec3::z()).norm(), 0.0, epsilon = 1e-15);
        let c = t.chart();
        assert_eq!(c.s, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(c.t, Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0));
        assert_abs_diff_eq!(c.s.cross(&c.t).norm(), 2.0 * t.area(), epsilon = 1e-15);
    }

    #[test]
    fn collinear_is_degenerate() {
        let r = Triangle::new(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0));
        assert!(matches!(r, Err(Error::DegenerateTriangle { .. })));
    }

    #[test]
    fn right_triangle_area() {
        let t = Triangle::new(Vec3::zeros(), Vec3::new(0.0, 1.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(t.area(), 0.5);
        assert_eq!(t.normal(), Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn receiver_chart_of_benchmark() {
        let ty = Triangle::new(Vec3::new(1.0, 0.0, 1.0), Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.5, 0.0, 2.0)).unwrap();
        assert_eq!(ty.chart().s, Vec3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn edge_normals_point_outward() {
        let t = equilateral();
        let centroid = (t.vertex(0) + t.vertex(1) + t.vertex(2)) / 3.0;
        for i in 0..3 {
            let mid = t.vertex(i) + 0.5 * t.edge(i);
            assert!(t.edge_normal(i).dot(&(mid - centroid)) > 0.0);
            assert_abs_diff_eq!(t.normal().dot(&t.edge(i)), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn plane_distance() {
        let tx = equilateral();
        let ty = tx.map(|v| v + Vec3::new(0.3, -0.2, 1.0)).unwrap();
        assert_abs_diff_eq!(signed_plane_distance(&tx, &ty, 1e-12).unwrap(), 1.0, epsilon = 1e-15);
        let tz = Triangle::new(Vec3::zeros(), Vec3::x(), Vec3::z()).unwrap();
        assert!(matches!(signed_plane_distance(&tx, &tz, 1e-12), Err(Error::NotParallel { .. })));
    }

    #[test]
    fn contact_classes() {
        let tx = equilateral();
        assert!(matches!(contact_classification(&tx, &tx, 1e-12).unwrap(), ContactClass::ThreeTouch { map: [0, 1, 2] }));
        let s3 = 3f64.sqrt();
        let one = Triangle::new(Vec3::zeros(), Vec3::new(-1.0, 0.0, 0.0), Vec3::new(-0.5, 0.0, s3 / 2.0)).unwrap();
        assert_eq!(contact_classification(&tx, &one, 1e-12).unwrap(), ContactClass::OneTouch { i: 0, j: 0 });
        let two = Triangle::new(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.5, 0.0, s3 / 2.0)).unwrap();
        let c = contact_classification(&tx, &two, 1e-12).unwrap();
        assert_eq!(c, ContactClass::TwoTouch { pairs: [(0, 0), (1, 1)] });
        assert_eq!(c.shared_edges(), vec![SharedEdge { ex: 0, ey: 0, same_direction: true }]);
        assert_eq!(contact_classification(&two, &tx, 1e-12).unwrap(), c.transpose());
        let far = tx.map(|v| v + Vec3::new(0.0, 0.0, 1e-8)).unwrap();
        assert_eq!(contact_classification(&tx, &far, 1e-12).unwrap(), ContactClass::NoTouch);
    }

    #[test]
    fn reversed_shared_edge() {
        let tx = equilateral();
        let ty = Triangle::new(Vec3::new(1.0, 0.0, 0.0), Vec3::zeros(), Vec3::new(0.5, -0.8, 0.0)).unwrap();
        let c = contact_classification(&tx, &ty, 1e-12).unwrap();
        assert_eq!(c.shared_edges(), vec![SharedEdge { ex: 0, ey: 0, same_direction: false }]);
    }
}
