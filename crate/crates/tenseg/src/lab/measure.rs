//! Joint angles, range of motion, and small statistics helpers.

use super::track::TrajectoryRecord;
use super::TRANSIENT_DISCARD;
use crate::math::Vec3;
use crate::model::NodeRef;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MeasureError {
    #[error("marker not present in the trajectory")]
    UnknownMarker,
    #[error("degenerate segment at sample {sample} (markers closer than 1e-9 m)")]
    Degenerate { sample: usize },
    #[error("empty series")]
    Empty,
}

fn marker_triple(
    traj: &TrajectoryRecord,
    pivot: &NodeRef,
    proximal: &NodeRef,
    distal: &NodeRef,
) -> Result<(usize, usize, usize), MeasureError> {
    Ok((
        traj.marker_index(pivot).ok_or(MeasureError::UnknownMarker)?,
        traj.marker_index(proximal).ok_or(MeasureError::UnknownMarker)?,
        traj.marker_index(distal).ok_or(MeasureError::UnknownMarker)?,
    ))
}

/// Per-sample angle at `pivot` between the rays to `proximal` and
/// `distal`, in degrees within [0, 180].
pub fn joint_angle(
    traj: &TrajectoryRecord,
    pivot: &NodeRef,
    proximal: &NodeRef,
    distal: &NodeRef,
) -> Result<Vec<(f64, f64)>, MeasureError> {
    let (pi, qi, di) = marker_triple(traj, pivot, proximal, distal)?;
    traj.samples
        .iter()
        .enumerate()
        .map(|(i, (t, p))| {
            let u = p[qi] - p[pi];
            let v = p[di] - p[pi];
            if u.norm() < 1e-9 || v.norm() < 1e-9 {
                return Err(MeasureError::Degenerate { sample: i });
            }
            let cos = (u.dot(&v) / (u.norm() * v.norm())).clamp(-1.0, 1.0);
            Ok((*t, cos.acos().to_degrees()))
        })
        .collect()
}

/// Signed, unwrapped variant for motions that exceed 180°: the angle is
/// measured in the plane with normal `plane_normal` and accumulated
/// continuously across samples, so a joint opening past straight reports
/// e.g. 250° rather than folding back to 110°.
pub fn joint_angle_unwrapped(
    traj: &TrajectoryRecord,
    pivot: &NodeRef,
    proximal: &NodeRef,
    distal: &NodeRef,
    plane_normal: Vec3,
) -> Result<Vec<(f64, f64)>, MeasureError> {
    let (pi, qi, di) = marker_triple(traj, pivot, proximal, distal)?;
    let n = plane_normal.normalize();
    let mut out = Vec::with_capacity(traj.samples.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for (i, (t, p)) in traj.samples.iter().enumerate() {
        let u = p[qi] - p[pi];
        let v = p[di] - p[pi];
        if u.norm() < 1e-9 || v.norm() < 1e-9 {
            return Err(MeasureError::Degenerate { sample: i });
        }
        let raw = u.cross(&v).dot(&n).atan2(u.dot(&v)).to_degrees();
        if let Some(prev) = prev {
            let jump = raw + offset - prev;
            if jump > 180.0 {
                offset -= 360.0;
            } else if jump < -180.0 {
                offset += 360.0;
            }
        }
        let unwrapped = raw + offset;
        prev = Some(unwrapped);
        out.push((*t, unwrapped));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    AngleDegrees,
    TravelMeters,
}

/// Extremes of a motion series after the startup transient is dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeOfMotionReport {
    pub motion: String,
    pub kind: SeriesKind,
    /// Samples ignored at the front ([`TRANSIENT_DISCARD`] of the series).
    pub discarded: usize,
    pub min: f64,
    pub max: f64,
    /// `max - min`; degrees or meters per `kind`.
    pub sweep: f64,
    pub series: Vec<(f64, f64)>,
}

/// Min/max/sweep over a series, discarding the leading transient.
pub fn range_of_motion(
    motion: impl Into<String>,
    kind: SeriesKind,
    series: &[(f64, f64)],
) -> Result<RangeOfMotionReport, MeasureError> {
    if series.is_empty() {
        return Err(MeasureError::Empty);
    }
    let discarded = ((series.len() as f64) * TRANSIENT_DISCARD).floor() as usize;
    let discarded = discarded.min(series.len() - 1);
    let kept = &series[discarded..];
    let min = kept.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let max = kept.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    Ok(RangeOfMotionReport {
        motion: motion.into(),
        kind,
        discarded,
        min,
        max,
        sweep: max - min,
        series: series.to_vec(),
    })
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation (`÷ n`), the convention for repeated-run
/// sweeps here.
pub fn population_std_dev(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Sample standard deviation (`÷ (n-1)`), reported alongside for
/// transparency.
pub fn sample_std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn traj_of(points: Vec<[Vec3; 3]>) -> TrajectoryRecord {
        TrajectoryRecord {
            sample_period: 1.0,
            markers: vec![
                NodeRef::new("j", "pivot"),
                NodeRef::new("j", "prox"),
                NodeRef::new("j", "dist"),
            ],
            samples: points
                .into_iter()
                .enumerate()
                .map(|(i, [a, b, c])| (i as f64, vec![a, b, c]))
                .collect(),
            contact_samples: vec![],
        }
    }

    #[test]
    fn joint_angle_examples() {
        let traj = traj_of(vec![
            // collinear, distal opposite proximal -> 180
            [Vec3::zeros(), Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0)],
            // right angle -> 90
            [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            // equilateral placement -> 60
            [
                Vec3::zeros(),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.5, 3.0_f64.sqrt() / 2.0, 0.0),
            ],
        ]);
        let series = joint_angle(
            &traj,
            &NodeRef::new("j", "pivot"),
            &NodeRef::new("j", "prox"),
            &NodeRef::new("j", "dist"),
        )
        .unwrap();
        assert_relative_eq!(series[0].1, 180.0, epsilon = 1e-9);
        assert_relative_eq!(series[1].1, 90.0, epsilon = 1e-9);
        assert_relative_eq!(series[2].1, 60.0, epsilon = 1e-9);
    }

    #[test]
    fn unwrapped_angle_passes_180() {
        // Distal marker sweeps a full half-plane and beyond about z.
        let samples: Vec<[Vec3; 3]> = (0..=25)
            .map(|i| {
                let theta = i as f64 * 10.0_f64.to_radians();
                [
                    Vec3::zeros(),
                    Vec3::new(1.0, 0.0, 0.0),
                    Vec3::new(theta.cos(), theta.sin(), 0.0),
                ]
            })
            .collect();
        let traj = traj_of(samples);
        let series = joint_angle_unwrapped(
            &traj,
            &NodeRef::new("j", "pivot"),
            &NodeRef::new("j", "prox"),
            &NodeRef::new("j", "dist"),
            Vec3::z(),
        )
        .unwrap();
        assert_relative_eq!(series.last().unwrap().1, 250.0, epsilon = 1e-9);
    }

    #[test]
    fn rom_hand_checks() {
        let series: Vec<(f64, f64)> = vec![(0.0, 10.0), (1.0, 12.0), (2.0, 14.0)];
        let rom = range_of_motion("demo", SeriesKind::AngleDegrees, &series).unwrap();
        assert_eq!((rom.min, rom.max, rom.sweep), (10.0, 12.0 + 2.0, 4.0));

        let constant = vec![(0.0, 5.0); 40];
        let rom = range_of_motion("flat", SeriesKind::AngleDegrees, &constant).unwrap();
        assert_eq!(rom.sweep, 0.0);
        assert_eq!(rom.discarded, 2);

        // A joint cycling between full flexion (35°) and hyperextension
        // (250°): the sweep is their 215° difference.
        let wide: Vec<(f64, f64)> = (0..=200)
            .map(|i| {
                let phase = (i % 100) as f64 / 100.0;
                let tri = if phase <= 0.5 { 2.0 * phase } else { 2.0 - 2.0 * phase };
                (i as f64, 35.0 + 215.0 * tri)
            })
            .collect();
        let rom = range_of_motion("pitch", SeriesKind::AngleDegrees, &wide).unwrap();
        assert_relative_eq!(rom.min, 35.0, epsilon = 1e-12);
        assert_relative_eq!(rom.max, 250.0, epsilon = 1e-12);
        assert_relative_eq!(rom.sweep, 215.0, epsilon = 1e-12);
    }

    #[test]
    fn rom_rejects_empty_series() {
        assert_eq!(
            range_of_motion("x", SeriesKind::AngleDegrees, &[]),
            Err(MeasureError::Empty)
        );
    }

    #[test]
    fn std_dev_hand_check() {
        let xs = [10.0, 12.0, 14.0];
        assert_relative_eq!(mean(&xs), 12.0, epsilon = 1e-12);
        assert_relative_eq!(population_std_dev(&xs), 1.632993161855452, epsilon = 1e-12);
        assert_relative_eq!(sample_std_dev(&xs), 2.0, epsilon = 1e-12);
    }
}
