use std::f64::consts::{PI, TAU};

use super::{GeometryError, SpherePoint};

/// Default angular clearance required from the standard cut.
pub const DEFAULT_CUT_MARGIN: f64 = 1e-9;

const AXIS_TOL: f64 = 1e-12;

/// How the angular coordinate is lifted from the circle to the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    /// `θ ∈ (0, 2π)`, cut along the closed half great sphere
    /// `{x_a >= 0, x_b = 0}`.
    StandardCut,
    /// The representative within `(reference - π, reference + π]`; used for
    /// lifts over general simply connected regions.
    Continued { reference_angle: f64 },
}

/// Polar lift `x ↦ (r(x), θ(x))` of the projection onto the coordinate pair
/// `axes` (zero-based; `(0, 1)` is the usual `(x_1, x_2)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongitudeChart {
    pub branch: Branch,
    pub cut_margin: f64,
    pub axes: (usize, usize),
}

/// Value of the lift at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Longitude {
    pub r: f64,
    pub theta: f64,
}

impl Default for LongitudeChart {
    fn default() -> Self {
        Self::standard()
    }
}

impl LongitudeChart {
    pub fn standard() -> Self {
        Self {
            branch: Branch::StandardCut,
            cut_margin: DEFAULT_CUT_MARGIN,
            axes: (0, 1),
        }
    }

    pub fn continued(reference_angle: f64) -> Self {
        Self {
            branch: Branch::Continued { reference_angle },
            cut_margin: DEFAULT_CUT_MARGIN,
            axes: (0, 1),
        }
    }

    /// A continued lift anchored at the polar angle of `x` itself.
    pub fn continued_at(x: &SpherePoint) -> Self {
        let (a, b) = (x.coords()[0], x.coords()[1]);
        Self::continued(b.atan2(a))
    }

    pub fn with_axes(mut self, a: usize, b: usize) -> Self {
        self.axes = (a, b);
        self
    }

    pub fn with_cut_margin(mut self, margin: f64) -> Self {
        self.cut_margin = margin;
        self
    }

    /// `(x_a, x_b)` for the chart's axes.
    pub fn plane(&self, x: &[f64]) -> (f64, f64) {
        (x[self.axes.0], x[self.axes.1])
    }

    pub fn radius(&self, x: &[f64]) -> f64 {
        let (a, b) = self.plane(x);
        a.hypot(b)
    }

    /// Geodesic distance from `x` to the standard cut.
    pub fn distance_to_cut(&self, x: &[f64]) -> f64 {
        let (a, b) = self.plane(x);
        if a >= 0.0 {
            b.abs().min(1.0).asin()
        } else {
            a.hypot(b).min(1.0).asin()
        }
    }

    pub fn lift(&self, x: &SpherePoint) -> Result<Longitude, GeometryError> {
        self.lift_coords(x.coords())
    }

    /// Lift for raw unit coordinates.
    pub fn lift_coords(&self, x: &[f64]) -> Result<Longitude, GeometryError> {
        let (a, b) = self.plane(x);
        let r = a.hypot(b);
        if r < AXIS_TOL {
            return Err(GeometryError::OnAxis(r));
        }
        let raw = b.atan2(a);
        let theta = match self.branch {
            Branch::StandardCut => {
                let d = self.distance_to_cut(x);
                if d < self.cut_margin {
                    return Err(GeometryError::OnBranchCut(d));
                }
                if raw <= 0.0 {
                    raw + TAU
                } else {
                    raw
                }
            }
            Branch::Continued { reference_angle } => nearest_representative(raw, reference_angle),
        };
        Ok(Longitude { r, theta })
    }

    /// `θ` as a plain function for finite-difference oracles; `NaN` outside
    /// the chart domain.
    pub fn theta_fn(&self) -> impl Fn(&[f64]) -> f64 + '_ {
        move |x| self.lift_coords(x).map(|l| l.theta).unwrap_or(f64::NAN)
    }

    /// `r` as a plain function of coordinates.
    pub fn r_fn(&self) -> impl Fn(&[f64]) -> f64 + '_ {
        move |x| self.radius(x)
    }

    /// `dr(v)` and `dθ(v)` for an ambient tangent vector `v` at `x`.
    pub fn differentials(&self, x: &[f64], v: &[f64]) -> (f64, f64) {
        let (a, b) = self.plane(x);
        let (va, vb) = self.plane(v);
        let r2 = a * a + b * b;
        let r = r2.sqrt();
        ((a * va + b * vb) / r, (a * vb - b * va) / r2)
    }

    /// Stepwise continuation of `θ` along a path, starting from the
    /// representative nearest `start_angle`. Steps whose angular jump
    /// exceeds `π/2` are rejected.
    pub fn continue_along(
        &self,
        path: &[SpherePoint],
        start_angle: f64,
    ) -> Result<Vec<Longitude>, GeometryError> {
        let mut out = Vec::with_capacity(path.len());
        let mut previous = start_angle;
        for (i, p) in path.iter().enumerate() {
            let (a, b) = self.plane(p.coords());
            let r = a.hypot(b);
            if r < AXIS_TOL {
                return Err(GeometryError::OnAxis(r));
            }
            let theta = nearest_representative(b.atan2(a), previous);
            if i > 0 && (theta - previous).abs() > PI / 2.0 {
                return Err(GeometryError::JumpTooLarge {
                    step: i,
                    jump: theta - previous,
                });
            }
            previous = theta;
            out.push(Longitude { r, theta });
        }
        Ok(out)
    }
}

fn nearest_representative(raw: f64, reference: f64) -> f64 {
    let k = ((reference - raw) / TAU).round();
    let mut theta = raw + k * TAU;
    if theta <= reference - PI {
        theta += TAU;
    } else if theta > reference + PI {
        theta -= TAU;
    }
    theta
}
