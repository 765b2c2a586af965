//! Tank and floating-body geometry: validation, hydrostatics, meshing.
//!
//! The fluid domain is bounded above by the free surface (two intervals on
//! `z = 0`, one on each side of the body) and the wetted curve of the body,
//! and below by the bottom profile. The four points where the free surface
//! meets a solid boundary (the two tank walls and the two sides of the body)
//! are the *contact points*; the corner angles there govern solution
//! regularity, so meshes are graded geometrically toward them.

mod mesh;

pub use mesh::{
    build_mesh, periodic_strip, BoundaryEdge, BoundaryMesh, GradedSize, Mesh, MeshQuality,
    SegmentTag,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("wetted curve endpoints must lie on z = 0 (got z = {0:.3e})")]
    NonClosedWettedCurve(f64),
    #[error("contact angle {angle:.6} rad at x = {x:.6} outside ({eps:.0e}, pi - {eps:.0e})")]
    DegenerateAngle { x: f64, angle: f64, eps: f64 },
    #[error("wetted curve intersects itself")]
    SelfIntersectingCurve,
    #[error("mesh generation failed: {0}")]
    MeshGenerationFailure(String),
}

/// Bottom profile `b(x) < 0`, sampled or constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BottomProfile {
    /// Flat bottom at the given (negative) depth.
    Constant(f64),
    /// Piecewise-linear graph through `(x, z)` breakpoints spanning the tank.
    Polyline(Vec<[f64; 2]>),
}

impl BottomProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            BottomProfile::Constant(z) => *z,
            BottomProfile::Polyline(pts) => {
                if x <= pts[0][0] {
                    return pts[0][1];
                }
                for w in pts.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    if x <= b[0] {
                        let t = if b[0] > a[0] { (x - a[0]) / (b[0] - a[0]) } else { 0.0 };
                        return a[1] + t * (b[1] - a[1]);
                    }
                }
                pts[pts.len() - 1][1]
            }
        }
    }

    /// Interior x-positions where the profile has a slope break.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            BottomProfile::Constant(_) => Vec::new(),
            BottomProfile::Polyline(pts) => pts[1..pts.len().saturating_sub(1)]
                .iter()
                .map(|p| p[0])
                .collect(),
        }
    }
}

/// Geometric and physical description of the tank and the body at equilibrium.
///
/// Lengths in meters, mass per unit span in kg/m, density in kg/m^2 (the
/// problem is two-dimensional; every extensive quantity is per unit span).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSpec {
    /// Left tank wall.
    pub x_left: f64,
    /// Left contact point of the body.
    pub x_body_left: f64,
    /// Right contact point of the body.
    pub x_body_right: f64,
    /// Right tank wall.
    pub x_right: f64,
    pub bottom: BottomProfile,
    /// Wetted curve of the body: polyline from `(x_body_left, 0)` to
    /// `(x_body_right, 0)`, strictly below `z = 0` in between.
    pub wetted: Vec<[f64; 2]>,
    /// Center of mass of the body at equilibrium.
    pub center_of_mass: [f64; 2],
    /// Fluid density per unit span.
    pub rho: f64,
    /// Gravitational acceleration.
    pub gravity: f64,
    /// Body mass per unit span.
    pub mass: f64,
    /// Body moment of inertia per unit span.
    pub inertia: f64,
}

/// One validated invariant with its measured value.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    /// Contact angles in radians at the four contact points, left to right.
    pub contact_angles: [f64; 4],
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Hydrostatic equilibrium quantities of the displaced region.
#[derive(Debug, Clone, Serialize)]
pub struct Hydrostatics {
    /// Area of the region between the wetted curve and `z = 0`.
    pub area: f64,
    /// Centroid of the displaced region (center of buoyancy).
    pub buoyancy_center: [f64; 2],
    /// `|rho * area - mass| / mass`.
    pub mass_residual: f64,
    /// `|x_B - x_G| / (x_body_right - x_body_left)`.
    pub moment_residual: f64,
}

const ANGLE_EPS: f64 = 1e-6;
const ARCHIMEDES_TOL: f64 = 1e-8;

impl DomainSpec {
    /// Rectangular tank with a box-shaped body, the reference configuration
    /// for the right-angle corner analysis. The body spans
    /// `[x_body_left, x_body_right]` with draft `draft`, the tank has flat
    /// bottom at `-depth`; mass is set to the displaced mass (equilibrium).
    #[allow(clippy::too_many_arguments)]
    pub fn rectangular(
        x_left: f64,
        x_body_left: f64,
        x_body_right: f64,
        x_right: f64,
        depth: f64,
        draft: f64,
        rho: f64,
        gravity: f64,
        z_center_of_mass: f64,
    ) -> Self {
        let beam = x_body_right - x_body_left;
        let mass = rho * beam * draft;
        // slender-box inertia about the center of mass
        let inertia = mass * (beam * beam + draft * draft) / 12.0;
        DomainSpec {
            x_left,
            x_body_left,
            x_body_right,
            x_right,
            bottom: BottomProfile::Constant(-depth),
            wetted: vec![
                [x_body_left, 0.0],
                [x_body_left, -draft],
                [x_body_right, -draft],
                [x_body_right, 0.0],
            ],
            center_of_mass: [0.5 * (x_body_left + x_body_right), z_center_of_mass],
            rho,
            gravity,
            mass,
            inertia,
        }
    }

    /// Lengths of the two free-surface components.
    pub fn surface_lengths(&self) -> (f64, f64) {
        (self.x_body_left - self.x_left, self.x_right - self.x_body_right)
    }
}

/// Direction of the solid boundary leaving a contact point, downward into the
/// fluid region. `surface_to_right` tells on which side of the corner the
/// free surface lies.
fn contact_angle_from_dirs(surface_to_right: bool, solid_dir: [f64; 2]) -> f64 {
    // clockwise angle of a lower-half-plane direction from the positive x-axis
    let cw = (-solid_dir[1]).atan2(solid_dir[0]);
    if surface_to_right {
        cw
    } else {
        std::f64::consts::PI - cw
    }
}

/// Solid boundary direction leaving each contact point (into `z < 0`).
fn solid_dirs(spec: &DomainSpec) -> [[f64; 2]; 4] {
    let norm = |d: [f64; 2]| {
        let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
        [d[0] / n, d[1] / n]
    };
    // Tank walls: direction along the bottom/wall boundary leaving (x_wall, 0).
    // For a wall with b(x_wall) < 0 the wall is vertical; for an emerging
    // bottom (b -> 0 at the wall) the boundary leaves along the bottom graph.
    let wall_dir = |x_wall: f64, into_tank: f64| -> [f64; 2] {
        let b0 = spec.bottom.eval(x_wall);
        if b0 < -1e-12 {
            [0.0, -1.0]
        } else {
            let dx = 1e-6 * (spec.x_right - spec.x_left);
            let b1 = spec.bottom.eval(x_wall + into_tank * dx);
            norm([into_tank * dx, b1 - b0])
        }
    };
    let first = spec.wetted[1];
    let last = spec.wetted[spec.wetted.len() - 2];
    let p_l = spec.wetted[0];
    let p_r = spec.wetted[spec.wetted.len() - 1];
    [
        wall_dir(spec.x_left, 1.0),
        norm([first[0] - p_l[0], first[1] - p_l[1]]),
        norm([last[0] - p_r[0], last[1] - p_r[1]]),
        wall_dir(spec.x_right, -1.0),
    ]
}

/// Contact angles (radians) at `x_left, x_body_left, x_body_right, x_right`,
/// measured inside the fluid.
pub fn contact_angles(spec: &DomainSpec) -> [f64; 4] {
    let dirs = solid_dirs(spec);
    [
        contact_angle_from_dirs(true, dirs[0]),
        contact_angle_from_dirs(false, dirs[1]),
        contact_angle_from_dirs(true, dirs[2]),
        contact_angle_from_dirs(false, dirs[3]),
    ]
}

/// Signed area and centroid of the region enclosed by the wetted curve and
/// the segment of `z = 0` joining its endpoints.
fn displaced_region(wetted: &[[f64; 2]]) -> (f64, [f64; 2]) {
    // close the loop along z = 0 from (x_r, 0) back to (x_l, 0)
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cz = 0.0;
    let n = wetted.len();
    for i in 0..n {
        let p = wetted[i];
        let q = wetted[(i + 1) % n];
        let cross = p[0] * q[1] - q[0] * p[1];
        area2 += cross;
        cx += (p[0] + q[0]) * cross;
        cz += (p[1] + q[1]) * cross;
    }
    let area = 0.5 * area2;
    if area.abs() < 1e-300 {
        return (0.0, [0.0, 0.0]);
    }
    (area.abs(), [cx / (6.0 * area), cz / (6.0 * area)])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    };
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Area, center of buoyancy and the Archimedes residuals of the displaced
/// region.
pub fn hydrostatics(spec: &DomainSpec) -> Result<Hydrostatics, GeometryError> {
    let w = &spec.wetted;
    for i in 0..w.len().saturating_sub(1) {
        for j in i + 2..w.len() - 1 {
            if segments_intersect(w[i], w[i + 1], w[j], w[j + 1]) {
                return Err(GeometryError::SelfIntersectingCurve);
            }
        }
    }
    let (area, centroid) = displaced_region(w);
    let mass_residual = (spec.rho * area - spec.mass).abs() / spec.mass.max(1e-300);
    let beam = spec.x_body_right - spec.x_body_left;
    let moment_residual = (centroid[0] - spec.center_of_mass[0]).abs() / beam.max(1e-300);
    Ok(Hydrostatics {
        area,
        buoyancy_center: centroid,
        mass_residual,
        moment_residual,
    })
}

/// Check every admissibility invariant and report measured values.
pub fn validate_domain(spec: &DomainSpec) -> Result<ValidationReport, GeometryError> {
    let mut checks = Vec::new();
    let push = |checks: &mut Vec<CheckResult>, name: &str, passed: bool, measured: f64, detail: String| {
        checks.push(CheckResult { name: name.to_string(), passed, measured, detail });
    };

    let ordered = spec.x_left < spec.x_body_left
        && spec.x_body_left < spec.x_body_right
        && spec.x_body_right < spec.x_right;
    push(&mut checks, "ordering x_left < x_body_left < x_body_right < x_right", ordered, 0.0,
        format!("{} < {} < {} < {}", spec.x_left, spec.x_body_left, spec.x_body_right, spec.x_right));

    // wetted endpoints on the free surface line
    let z0 = spec.wetted.first().map(|p| p[1]).unwrap_or(f64::NAN);
    let z1 = spec.wetted.last().map(|p| p[1]).unwrap_or(f64::NAN);
    let scale = (spec.x_body_right - spec.x_body_left).abs().max(1e-300);
    let closed = z0.abs() <= 1e-9 * scale && z1.abs() <= 1e-9 * scale;
    if !closed {
        return Err(GeometryError::NonClosedWettedCurve(if z0.abs() > z1.abs() { z0 } else { z1 }));
    }
    push(&mut checks, "wetted curve endpoints on z = 0", true, z0.abs().max(z1.abs()), String::new());

    let interior_below = spec.wetted[1..spec.wetted.len() - 1].iter().all(|p| p[1] < 0.0);
    push(&mut checks, "wetted curve strictly below z = 0", interior_below,
        spec.wetted[1..spec.wetted.len() - 1].iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max),
        String::new());

    let angles = contact_angles(spec);
    for (i, &a) in angles.iter().enumerate() {
        if !(a > ANGLE_EPS && a < std::f64::consts::PI - ANGLE_EPS) {
            let xs = [spec.x_left, spec.x_body_left, spec.x_body_right, spec.x_right];
            return Err(GeometryError::DegenerateAngle { x: xs[i], angle: a, eps: ANGLE_EPS });
        }
    }
    push(&mut checks, "contact angles in (0, pi)", true,
        angles.iter().cloned().fold(f64::INFINITY, f64::min),
        format!("{:?}", angles));

    // flat-near-corner: the boundary segments adjacent to each contact point
    // are straight by construction for polyline data; report their lengths.
    let seg_len = |p: [f64; 2], q: [f64; 2]| ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
    let flat_l = seg_len(spec.wetted[0], spec.wetted[1]);
    let flat_r = seg_len(spec.wetted[spec.wetted.len() - 2], spec.wetted[spec.wetted.len() - 1]);
    push(&mut checks, "straight segments adjacent to body contact points", true,
        flat_l.min(flat_r), format!("lengths {:.3e}, {:.3e}", flat_l, flat_r));

    let hs = hydrostatics(spec)?;
    push(&mut checks, "Archimedes mass balance", hs.mass_residual <= ARCHIMEDES_TOL,
        hs.mass_residual, format!("rho*area = {:.12e}, mass = {:.12e}", spec.rho * hs.area, spec.mass));
    push(&mut checks, "buoyancy center above/below center of mass (same vertical)",
        hs.moment_residual <= ARCHIMEDES_TOL, hs.moment_residual,
        format!("x_B = {:.12e}, x_G = {:.12e}", hs.buoyancy_center[0], spec.center_of_mass[0]));

    Ok(ValidationReport { checks, contact_angles: angles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rect_spec() -> DomainSpec {
        DomainSpec::rectangular(0.0, 4.0, 6.0, 10.0, 1.0, 0.5, 1.0, 9.81, -0.1)
    }

    #[test]
    fn rectangular_tank_all_right_angles() {
        let spec = rect_spec();
        let report = validate_domain(&spec).unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
        for a in report.contact_angles {
            assert_eq!(a, PI / 2.0);
        }
    }

    #[test]
    fn off_surface_endpoint_rejected() {
        let mut spec = rect_spec();
        spec.wetted.last_mut().unwrap()[1] = -0.1;
        match validate_domain(&spec) {
            Err(GeometryError::NonClosedWettedCurve(z)) => assert!((z + 0.1).abs() < 1e-12),
            other => panic!("expected NonClosedWettedCurve, got {:?}", other.map(|r| r.passed())),
        }
    }

    #[test]
    fn wedge_hull_angle() {
        // hull side sloping 30 degrees from vertical at the left contact point
        let mut spec = rect_spec();
        let s = 0.5 * (PI / 6.0).tan();
        spec.wetted = vec![
            [4.0, 0.0],
            [4.0 + s, -0.5],
            [6.0 - s, -0.5],
            [6.0, 0.0],
        ];
        let (area, c) = displaced_region(&spec.wetted);
        spec.mass = spec.rho * area;
        spec.center_of_mass[0] = c[0];
        let angles = contact_angles(&spec);
        assert!((angles[1] - (PI / 2.0 + PI / 6.0)).abs() < 1e-12);
        assert!((angles[2] - (PI / 2.0 + PI / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn emerging_beach_angle() {
        // bottom rises linearly to meet the surface at the right wall
        let mut spec = rect_spec();
        let alpha = 0.15_f64;
        spec.bottom = BottomProfile::Polyline(vec![
            [0.0, -1.0],
            [8.0, -1.0],
            [10.0, -1.0 + 2.0 * alpha.tan()],
        ]);
        // make the beach actually emerge at x_right
        spec.bottom = BottomProfile::Polyline(vec![
            [0.0, -2.0 * alpha.tan()],
            [8.0, -2.0 * alpha.tan()],
            [10.0, 0.0],
        ]);
        let angles = contact_angles(&spec);
        assert!((angles[3] - alpha).abs() < 1e-4, "beach angle {}", angles[3]);
    }

    #[test]
    fn sloped_wall_angle() {
        // wall sloped: boundary leaves (x_left, 0) at 10 degrees off vertical,
        // leaning over the fluid
        let mut spec = rect_spec();
        let phi = PI / 18.0;
        spec.bottom = BottomProfile::Polyline(vec![
            [0.0, 0.0],
            [0.0 + phi.tan(), -1.0],
            [10.0, -1.0],
        ]);
        let angles = contact_angles(&spec);
        assert!((angles[0] - (PI / 2.0 - phi)).abs() < 1e-3, "wall angle {}", angles[0]);
    }

    #[test]
    fn rectangle_hydrostatics() {
        let spec = rect_spec();
        let hs = hydrostatics(&spec).unwrap();
        assert!((hs.area - 1.0).abs() < 1e-14);
        assert!((hs.buoyancy_center[0] - 5.0).abs() < 1e-14);
        assert!((hs.buoyancy_center[1] + 0.25).abs() < 1e-14);
        assert!(hs.mass_residual < 1e-14);
    }

    #[test]
    fn semicircle_hydrostatics() {
        let r = 0.8;
        let n = 4000;
        let wetted: Vec<[f64; 2]> = (0..=n)
            .map(|i| {
                let t = PI * (i as f64) / (n as f64);
                [5.0 - r * t.cos(), -r * t.sin()]
            })
            .collect();
        let mut spec = rect_spec();
        spec.x_body_left = 5.0 - r;
        spec.x_body_right = 5.0 + r;
        spec.wetted = wetted;
        let hs = hydrostatics(&spec).unwrap();
        assert!((hs.area - 0.5 * PI * r * r).abs() / (0.5 * PI * r * r) < 1e-5);
        assert!((hs.buoyancy_center[0] - 5.0).abs() < 1e-10);
    }

    #[test]
    fn self_intersection_detected() {
        let mut spec = rect_spec();
        spec.wetted = vec![
            [4.0, 0.0],
            [6.0, -0.5],
            [4.0, -0.5],
            [6.0, 0.0],
        ];
        assert!(matches!(hydrostatics(&spec), Err(GeometryError::SelfIntersectingCurve)));
    }
}
