//! Workspace summaries: projected convex-hull area and angular extent of
//! an end-effector trajectory.

use super::track::TrajectoryRecord;
use crate::math::Vec3;
use crate::model::NodeRef;

/// A projection plane given by an origin and an orthonormal in-plane
/// basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneSpec {
    pub origin: Vec3,
    pub u: Vec3,
    pub v: Vec3,
}

impl PlaneSpec {
    pub fn xy() -> Self {
        PlaneSpec { origin: Vec3::zeros(), u: Vec3::x(), v: Vec3::y() }
    }

    pub fn xz() -> Self {
        PlaneSpec { origin: Vec3::zeros(), u: Vec3::x(), v: Vec3::z() }
    }

    pub fn yz() -> Self {
        PlaneSpec { origin: Vec3::zeros(), u: Vec3::y(), v: Vec3::z() }
    }

    pub fn project(&self, p: Vec3) -> (f64, f64) {
        let d = p - self.origin;
        (d.dot(&self.u), d.dot(&self.v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceReport {
    /// Convex-hull area of the projected samples, m².
    pub area: f64,
    /// Angular extent of the samples about the pivot projection, degrees.
    pub angular_extent_deg: f64,
    pub samples: usize,
    /// Hull vertices, counterclockwise in plane coordinates.
    pub hull: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain convex hull; collinear points are dropped.
fn convex_hull(mut points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    if points.len() <= 2 {
        return points;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &points {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in points.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn shoelace(hull: &[(f64, f64)]) -> f64 {
    if hull.len() < 3 {
        return 0.0;
    }
    let mut twice_area = 0.0;
    for i in 0..hull.len() {
        let (x1, y1) = hull[i];
        let (x2, y2) = hull[(i + 1) % hull.len()];
        twice_area += x1 * y2 - x2 * y1;
    }
    twice_area.abs() / 2.0
}

/// Angular spread of points about a pivot: 360° minus the largest empty
/// gap between their bearing angles. Points on the pivot are ignored.
fn angular_extent(points: &[(f64, f64)], pivot: (f64, f64)) -> f64 {
    let mut angles: Vec<f64> = points
        .iter()
        .filter_map(|&(x, y)| {
            let (dx, dy) = (x - pivot.0, y - pivot.1);
            if dx.hypot(dy) < 1e-9 {
                None
            } else {
                Some(dy.atan2(dx))
            }
        })
        .collect();
    if angles.len() < 2 {
        return 0.0;
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut largest_gap = (angles[0] + std::f64::consts::TAU) - angles[angles.len() - 1];
    for w in angles.windows(2) {
        largest_gap = largest_gap.max(w[1] - w[0]);
    }
    (std::f64::consts::TAU - largest_gap).to_degrees().max(0.0)
}

/// Convex-hull area and angular extent of one marker's trajectory
/// projected on a plane. `pivot` is projected on the same plane and
/// anchors the extent measurement.
pub fn workspace_summary(
    traj: &TrajectoryRecord,
    marker: &NodeRef,
    plane: &PlaneSpec,
    pivot: Vec3,
) -> Option<WorkspaceReport> {
    let mi = traj.marker_index(marker)?;
    let points: Vec<(f64, f64)> = traj
        .marker_series(mi)
        .map(|(_, p)| plane.project(p))
        .collect();
    let hull = convex_hull(points.clone());
    Some(WorkspaceReport {
        area: shoelace(&hull),
        angular_extent_deg: angular_extent(&points, plane.project(pivot)),
        samples: points.len(),
        hull,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn traj_from_points(points: &[(f64, f64)]) -> TrajectoryRecord {
        TrajectoryRecord {
            sample_period: 1.0,
            markers: vec![NodeRef::new("m", "p")],
            samples: points
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| (i as f64, vec![Vec3::new(x, y, 0.0)]))
                .collect(),
            contact_samples: vec![],
        }
    }

    #[test]
    fn identical_samples_have_zero_area_and_extent() {
        let traj = traj_from_points(&[(0.3, 0.3); 10]);
        let r = workspace_summary(
            &traj,
            &NodeRef::new("m", "p"),
            &PlaneSpec::xy(),
            Vec3::zeros(),
        )
        .unwrap();
        assert_eq!(r.area, 0.0);
        assert_eq!(r.angular_extent_deg, 0.0);
    }

    #[test]
    fn unit_square_area() {
        let traj = traj_from_points(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)]);
        let r = workspace_summary(
            &traj,
            &NodeRef::new("m", "p"),
            &PlaneSpec::xy(),
            Vec3::zeros(),
        )
        .unwrap();
        assert_relative_eq!(r.area, 1.0, epsilon = 1e-12);
        assert_eq!(r.hull.len(), 4);
    }

    #[test]
    fn quarter_arc_extent() {
        let points: Vec<(f64, f64)> = (0..=90)
            .map(|d| {
                let t = (d as f64).to_radians();
                (t.cos(), t.sin())
            })
            .collect();
        let traj = traj_from_points(&points);
        let r = workspace_summary(
            &traj,
            &NodeRef::new("m", "p"),
            &PlaneSpec::xy(),
            Vec3::zeros(),
        )
        .unwrap();
        assert_relative_eq!(r.angular_extent_deg, 90.0, epsilon = 1.1);
    }

    #[test]
    fn area_invariant_under_in_plane_rigid_motion() {
        let base = [(0.0, 0.0), (0.4, 0.1), (0.3, 0.5), (-0.1, 0.3)];
        let angle = 0.7_f64;
        let (s, c) = angle.sin_cos();
        let moved: Vec<(f64, f64)> = base
            .iter()
            .map(|&(x, y)| (c * x - s * y + 2.0, s * x + c * y - 1.0))
            .collect();
        let r1 = workspace_summary(
            &traj_from_points(&base),
            &NodeRef::new("m", "p"),
            &PlaneSpec::xy(),
            Vec3::zeros(),
        )
        .unwrap();
        let r2 = workspace_summary(
            &traj_from_points(&moved),
            &NodeRef::new("m", "p"),
            &PlaneSpec::xy(),
            Vec3::zeros(),
        )
        .unwrap();
        assert_relative_eq!(r1.area, r2.area, epsilon = 1e-12);
    }
}
