/// Order in which coefficient vectors enter the Gram-Schmidt process.
///
/// When the vectors are linearly dependent the expansion coefficients of
/// the offset are not unique. `Forward` zeroes the coefficients of the last
/// dependent vectors, `Reverse` those of the first ones. Final integrals do
/// not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GsOrder {
    #[default]
    Forward,
    Reverse,
}

/// Numerical tolerances. All are relative to a geometric scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// Degenerate triangle when `2A < geom * (max edge)^2`.
    pub geom: f64,
    /// Vertices coincide when closer than `touch * (mean edge length)`.
    pub touch: f64,
    /// Planes are parallel when `|n_x × n_y| < parallel`.
    pub parallel: f64,
    /// Gram-Schmidt vector is zero when `|u|^2 <= rank * max |a|^2`.
    pub rank: f64,
    /// A gap is zero when `h <= gap_zero * (longest edge of both triangles)`.
    pub gap_zero: f64,
    /// Face expansion children with `|weight| < prune` are skipped.
    pub prune: f64,
    pub gs_order: GsOrder,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            geom: 1e-12,
            touch: 1e-12,
            parallel: 1e-12,
            rank: 1e-24,
            gap_zero: 1e-10,
            prune: 1e-14,
            gs_order: GsOrder::Forward,
        }
    }
}
