//! Per-stroke behavioral feature extraction.
//!
//! The canonical schema has 32 named features per stroke: timing, start/stop
//! geometry, velocity/acceleration percentiles, deviation-from-chord
//! statistics, circular heading statistics, mid-stroke sensor values, and
//! the phone id / orientation pass-throughs.

use std::collections::HashMap;

use thiserror::Error;

use crate::dataset::FeatureMatrix;
use crate::ingest::Stroke;

/// Canonical feature names, in schema order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureId {
    InterStrokeTime,
    StrokeDuration,
    StartX,
    StartY,
    StopX,
    StopY,
    DirectEndToEndDistance,
    MeanResultantLength,
    UpDownLeftRightFlag,
    DirectionOfEndToEnd,
    PhoneId,
    PairwiseVelocityP20,
    PairwiseVelocityP50,
    PairwiseVelocityP80,
    PairwiseAccelerationP20,
    PairwiseAccelerationP50,
    PairwiseAccelerationP80,
    MedianVelocityLast3,
    LargestDeviationFromLine,
    DeviationP20,
    DeviationP50,
    DeviationP80,
    LineAverageDirection,
    LengthOfTrajectory,
    RatioEndToEndOverTrajectory,
    AverageVelocity,
    MedianAccelFirst5,
    MidstrokePressure,
    MidstrokeArea,
    MidstrokeFingerOrientation,
    ChangeOfFingerOrientation,
    PhoneOrientation,
}

impl FeatureId {
    pub const ALL: [FeatureId; 32] = [
        FeatureId::InterStrokeTime,
        FeatureId::StrokeDuration,
        FeatureId::StartX,
        FeatureId::StartY,
        FeatureId::StopX,
        FeatureId::StopY,
        FeatureId::DirectEndToEndDistance,
        FeatureId::MeanResultantLength,
        FeatureId::UpDownLeftRightFlag,
        FeatureId::DirectionOfEndToEnd,
        FeatureId::PhoneId,
        FeatureId::PairwiseVelocityP20,
        FeatureId::PairwiseVelocityP50,
        FeatureId::PairwiseVelocityP80,
        FeatureId::PairwiseAccelerationP20,
        FeatureId::PairwiseAccelerationP50,
        FeatureId::PairwiseAccelerationP80,
        FeatureId::MedianVelocityLast3,
        FeatureId::LargestDeviationFromLine,
        FeatureId::DeviationP20,
        FeatureId::DeviationP50,
        FeatureId::DeviationP80,
        FeatureId::LineAverageDirection,
        FeatureId::LengthOfTrajectory,
        FeatureId::RatioEndToEndOverTrajectory,
        FeatureId::AverageVelocity,
        FeatureId::MedianAccelFirst5,
        FeatureId::MidstrokePressure,
        FeatureId::MidstrokeArea,
        FeatureId::MidstrokeFingerOrientation,
        FeatureId::ChangeOfFingerOrientation,
        FeatureId::PhoneOrientation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureId::InterStrokeTime => "inter_stroke_time",
            FeatureId::StrokeDuration => "stroke_duration",
            FeatureId::StartX => "start_x",
            FeatureId::StartY => "start_y",
            FeatureId::StopX => "stop_x",
            FeatureId::StopY => "stop_y",
            FeatureId::DirectEndToEndDistance => "direct_end_to_end_distance",
            FeatureId::MeanResultantLength => "mean_resultant_length",
            FeatureId::UpDownLeftRightFlag => "up_down_left_right_flag",
            FeatureId::DirectionOfEndToEnd => "direction_of_end_to_end",
            FeatureId::PhoneId => "phone_id",
            FeatureId::PairwiseVelocityP20 => "pairwise_velocity_p20",
            FeatureId::PairwiseVelocityP50 => "pairwise_velocity_p50",
            FeatureId::PairwiseVelocityP80 => "pairwise_velocity_p80",
            FeatureId::PairwiseAccelerationP20 => "pairwise_acceleration_p20",
            FeatureId::PairwiseAccelerationP50 => "pairwise_acceleration_p50",
            FeatureId::PairwiseAccelerationP80 => "pairwise_acceleration_p80",
            FeatureId::MedianVelocityLast3 => "median_velocity_last_3",
            FeatureId::LargestDeviationFromLine => "largest_deviation_from_line",
            FeatureId::DeviationP20 => "deviation_p20",
            FeatureId::DeviationP50 => "deviation_p50",
            FeatureId::DeviationP80 => "deviation_p80",
            FeatureId::LineAverageDirection => "line_average_direction",
            FeatureId::LengthOfTrajectory => "length_of_trajectory",
            FeatureId::RatioEndToEndOverTrajectory => "ratio_end_to_end_over_trajectory",
            FeatureId::AverageVelocity => "average_velocity",
            FeatureId::MedianAccelFirst5 => "median_accel_first_5",
            FeatureId::MidstrokePressure => "midstroke_pressure",
            FeatureId::MidstrokeArea => "midstroke_area",
            FeatureId::MidstrokeFingerOrientation => "midstroke_finger_orientation",
            FeatureId::ChangeOfFingerOrientation => "change_of_finger_orientation",
            FeatureId::PhoneOrientation => "phone_orientation",
        }
    }

    pub fn index(self) -> usize {
        FeatureId::ALL.iter().position(|&f| f == self).unwrap()
    }

    pub fn schema_names() -> Vec<String> {
        FeatureId::ALL.iter().map(|f| f.name().to_string()).collect()
    }
}

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("stroke has zero duration after timestamp de-duplication")]
    DegenerateStroke,
    #[error("feature `{0}` evaluated to a non-finite value")]
    NonFiniteFeature(&'static str),
    #[error("percentile of empty sample set")]
    EmptySamples,
}

/// Linear-interpolation percentile on sorted samples:
/// rank r = q/100 * (m-1), interpolated between the neighboring ranks.
pub fn percentile(samples: &[f64], q: f64) -> Result<f64, FeatureError> {
    if samples.is_empty() {
        return Err(FeatureError::EmptySamples);
    }
    assert!((0.0..=100.0).contains(&q), "q must be in [0, 100]");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let r = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = r.floor() as usize;
    let hi = r.ceil() as usize;
    let t = r - lo as f64;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * t)
}

fn median(samples: &[f64]) -> Result<f64, FeatureError> {
    percentile(samples, 50.0)
}

/// Computes the canonical 32-entry feature vector for one stroke.
///
/// `previous` is the same user/doc/phone stroke that precedes this one;
/// a user's first stroke has inter_stroke_time 0.
pub fn extract_features(
    stroke: &Stroke,
    previous: Option<&Stroke>,
) -> Result<Vec<f64>, FeatureError> {
    let pts = &stroke.points;
    let n = pts.len();
    assert!(n >= 2, "stroke must have at least 2 points");
    let duration = stroke.duration_ms() as f64;
    if duration <= 0.0 {
        return Err(FeatureError::DegenerateStroke);
    }

    let first = pts[0];
    let last = pts[n - 1];
    let dx = last.x - first.x;
    let dy = last.y - first.y;
    let end_to_end = (dx * dx + dy * dy).sqrt();

    let inter_stroke_time = match previous {
        Some(p) => (first.time_ms - p.points.last().unwrap().time_ms) as f64,
        None => 0.0,
    };

    // segment quantities, i = 1..n-1
    let mut seg_len = Vec::with_capacity(n - 1);
    let mut velocities = Vec::with_capacity(n - 1);
    let mut headings = Vec::with_capacity(n - 1);
    let mut unit_sum = (0.0f64, 0.0f64);
    for w in pts.windows(2) {
        let sdx = w[1].x - w[0].x;
        let sdy = w[1].y - w[0].y;
        let dt = (w[1].time_ms - w[0].time_ms) as f64;
        let len = (sdx * sdx + sdy * sdy).sqrt();
        seg_len.push(len);
        velocities.push(len / dt);
        if len > 0.0 {
            headings.push(sdy.atan2(sdx));
            unit_sum.0 += sdx / len;
            unit_sum.1 += sdy / len;
        }
    }
    let trajectory: f64 = seg_len.iter().sum();

    let mean_resultant_length =
        (unit_sum.0 * unit_sum.0 + unit_sum.1 * unit_sum.1).sqrt() / (n - 1) as f64;

    // accelerations over central time spans, i = 1..n-2
    let mut accels = Vec::new();
    for i in 0..n.saturating_sub(2) {
        let span = (pts[i + 2].time_ms - pts[i].time_ms) as f64;
        accels.push((velocities[i + 1] - velocities[i]) / span * 2.0);
    }

    // screen coordinates grow downward and rightward
    let flag = if dy.abs() > dx.abs() {
        if dy < 0.0 {
            0.0 // up
        } else {
            1.0 // down
        }
    } else if dx < 0.0 {
        2.0 // left
    } else {
        3.0 // right
    };

    // signed perpendicular distances from each point to the end-to-end chord
    let mut deviations = vec![0.0; n];
    let mut largest_deviation = 0.0f64;
    if end_to_end > 0.0 {
        for (i, p) in pts.iter().enumerate() {
            let cross = dx * (p.y - first.y) - dy * (p.x - first.x);
            let d = cross / end_to_end;
            deviations[i] = d;
            largest_deviation = largest_deviation.max(d.abs());
        }
    }

    let line_average_direction = if headings.is_empty() {
        0.0
    } else {
        let s: f64 = headings.iter().map(|h| h.sin()).sum();
        let c: f64 = headings.iter().map(|h| h.cos()).sum();
        s.atan2(c)
    };

    let last3_start = velocities.len().saturating_sub(3);
    let median_velocity_last_3 = median(&velocities[last3_start..])?;
    let median_accel_first_5 = if accels.is_empty() {
        0.0
    } else {
        median(&accels[..accels.len().min(5)])?
    };

    let mid = (n - 1) / 2; // 0-based index of point ceil(n/2) in 1-based terms
    let midpoint = pts[mid];

    let pvel = |q: f64| percentile(&velocities, q);
    let paccel = |q: f64| -> Result<f64, FeatureError> {
        if accels.is_empty() {
            Ok(0.0)
        } else {
            percentile(&accels, q)
        }
    };
    let pdev = |q: f64| percentile(&deviations, q);

    let mut values = vec![0.0; FeatureId::ALL.len()];
    let mut set = |id: FeatureId, v: f64| {
        values[id.index()] = v;
    };
    set(FeatureId::InterStrokeTime, inter_stroke_time);
    set(FeatureId::StrokeDuration, duration);
    set(FeatureId::StartX, first.x);
    set(FeatureId::StartY, first.y);
    set(FeatureId::StopX, last.x);
    set(FeatureId::StopY, last.y);
    set(FeatureId::DirectEndToEndDistance, end_to_end);
    set(FeatureId::MeanResultantLength, mean_resultant_length);
    set(FeatureId::UpDownLeftRightFlag, flag);
    set(FeatureId::DirectionOfEndToEnd, dy.atan2(dx));
    set(FeatureId::PhoneId, stroke.phone_id as f64);
    set(FeatureId::PairwiseVelocityP20, pvel(20.0)?);
    set(FeatureId::PairwiseVelocityP50, pvel(50.0)?);
    set(FeatureId::PairwiseVelocityP80, pvel(80.0)?);
    set(FeatureId::PairwiseAccelerationP20, paccel(20.0)?);
    set(FeatureId::PairwiseAccelerationP50, paccel(50.0)?);
    set(FeatureId::PairwiseAccelerationP80, paccel(80.0)?);
    set(FeatureId::MedianVelocityLast3, median_velocity_last_3);
    set(FeatureId::LargestDeviationFromLine, largest_deviation);
    set(FeatureId::DeviationP20, pdev(20.0)?);
    set(FeatureId::DeviationP50, pdev(50.0)?);
    set(FeatureId::DeviationP80, pdev(80.0)?);
    set(FeatureId::LineAverageDirection, line_average_direction);
    set(FeatureId::LengthOfTrajectory, trajectory);
    set(
        FeatureId::RatioEndToEndOverTrajectory,
        if trajectory == 0.0 { 1.0 } else { end_to_end / trajectory },
    );
    set(FeatureId::AverageVelocity, trajectory / duration);
    set(FeatureId::MedianAccelFirst5, median_accel_first_5);
    set(FeatureId::MidstrokePressure, midpoint.pressure);
    set(FeatureId::MidstrokeArea, midpoint.area);
    set(FeatureId::MidstrokeFingerOrientation, midpoint.finger_orientation);
    set(
        FeatureId::ChangeOfFingerOrientation,
        last.finger_orientation - first.finger_orientation,
    );
    set(FeatureId::PhoneOrientation, stroke.phone_orientation.code() as f64);

    for (id, v) in FeatureId::ALL.iter().zip(&values) {
        if !v.is_finite() {
            return Err(FeatureError::NonFiniteFeature(id.name()));
        }
    }
    Ok(values)
}

/// Why a stroke was skipped during dataset extraction.
#[derive(Debug, Clone)]
pub struct SkippedStroke {
    pub index: usize,
    pub reason: String,
}

/// Extracts the full feature matrix from an ordered stroke sequence.
///
/// Inter-stroke time chains are tracked independently per
/// (user_id, doc_id, phone_id); strokes whose features are undefined are
/// skipped and reported.
pub fn extract_dataset(strokes: &[Stroke]) -> (FeatureMatrix, Vec<SkippedStroke>) {
    let mut m = FeatureMatrix::new(FeatureId::schema_names());
    let mut skipped = Vec::new();
    let mut previous: HashMap<(u32, u32, u32), usize> = HashMap::new();
    for (i, stroke) in strokes.iter().enumerate() {
        let key = (stroke.user_id, stroke.doc_id, stroke.phone_id);
        let prev = previous.get(&key).map(|&j| &strokes[j]);
        match extract_features(stroke, prev) {
            Ok(values) => {
                m.push(values, stroke.user_id);
                previous.insert(key, i);
            }
            Err(e) => skipped.push(SkippedStroke {
                index: i,
                reason: e.to_string(),
            }),
        }
    }
    (m, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{PhoneOrientation, Stroke, StrokePoint};
    use proptest::prelude::*;

    fn stroke_from(points: &[(u64, f64, f64)]) -> Stroke {
        stroke_with_sensors(points, 0.5, 1.0, 0.0)
    }

    fn stroke_with_sensors(points: &[(u64, f64, f64)], pr: f64, ar: f64, fo: f64) -> Stroke {
        Stroke {
            user_id: 1,
            phone_id: 3,
            doc_id: 1,
            phone_orientation: PhoneOrientation::Portrait,
            points: points
                .iter()
                .map(|&(t, x, y)| StrokePoint {
                    time_ms: t,
                    x,
                    y,
                    pressure: pr,
                    area: ar,
                    finger_orientation: fo,
                })
                .collect(),
        }
    }

    fn get(values: &[f64], id: FeatureId) -> f64 {
        values[id.index()]
    }

    #[test]
    fn percentile_median_of_odd_count() {
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0, 5.0], 50.0).unwrap(), 3.0);
    }

    #[test]
    fn percentile_interpolates() {
        // r = 0.2 * 4 = 0.8 -> between 1 and 2
        let v = percentile(&[1.0, 2.0, 3.0, 4.0, 5.0], 20.0).unwrap();
        assert!((v - 1.8).abs() < 1e-12);
    }

    #[test]
    fn percentile_single_element() {
        assert_eq!(percentile(&[7.0], 80.0).unwrap(), 7.0);
    }

    #[test]
    fn percentile_rejects_empty() {
        assert!(matches!(percentile(&[], 50.0), Err(FeatureError::EmptySamples)));
    }

    proptest! {
        #[test]
        fn percentile_50_is_textbook_median(mut xs in prop::collection::vec(-100.0f64..100.0, 1..40)) {
            let p50 = percentile(&xs, 50.0).unwrap();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let m = xs.len();
            let expected = if m % 2 == 1 {
                xs[m / 2]
            } else {
                (xs[m / 2 - 1] + xs[m / 2]) / 2.0
            };
            prop_assert!((p50 - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn straight_constant_speed_line() {
        let s = stroke_from(&[(0, 0.0, 0.0), (100, 10.0, 0.0), (200, 20.0, 0.0)]);
        let v = extract_features(&s, None).unwrap();
        assert_eq!(get(&v, FeatureId::LengthOfTrajectory), 20.0);
        assert_eq!(get(&v, FeatureId::DirectEndToEndDistance), 20.0);
        assert_eq!(get(&v, FeatureId::RatioEndToEndOverTrajectory), 1.0);
        assert!((get(&v, FeatureId::MeanResultantLength) - 1.0).abs() < 1e-12);
        assert_eq!(get(&v, FeatureId::UpDownLeftRightFlag), 3.0); // right
        for id in [
            FeatureId::PairwiseVelocityP20,
            FeatureId::PairwiseVelocityP50,
            FeatureId::PairwiseVelocityP80,
        ] {
            assert!((get(&v, id) - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_stroke_hand_values() {
        let s = stroke_from(&[(0, 0.0, 0.0), (100, 3.0, 4.0), (200, 6.0, 8.0)]);
        let v = extract_features(&s, None).unwrap();
        assert!((get(&v, FeatureId::DirectEndToEndDistance) - 10.0).abs() < 1e-12);
        assert!((get(&v, FeatureId::AverageVelocity) - 0.05).abs() < 1e-12);
        assert_eq!(get(&v, FeatureId::MidstrokePressure), 0.5);
        assert_eq!(get(&v, FeatureId::StrokeDuration), 200.0);
    }

    #[test]
    fn l_shaped_stroke_largest_deviation() {
        let s = stroke_from(&[(0, 0.0, 0.0), (100, 10.0, 0.0), (200, 10.0, 10.0)]);
        let v = extract_features(&s, None).unwrap();
        let expected = 10.0 / 2.0f64.sqrt();
        assert!((get(&v, FeatureId::LargestDeviationFromLine) - expected).abs() < 1e-9);
    }

    #[test]
    fn direction_flags() {
        let cases = [
            ((10.0, -20.0), 0.0), // up: |dy| > |dx|, dy negative
            ((10.0, 20.0), 1.0),  // down
            ((-20.0, 5.0), 2.0),  // left
            ((20.0, 5.0), 3.0),   // right
        ];
        for ((dx, dy), want) in cases {
            let s = stroke_from(&[(0, 0.0, 0.0), (100, dx, dy)]);
            let v = extract_features(&s, None).unwrap();
            assert_eq!(get(&v, FeatureId::UpDownLeftRightFlag), want, "({dx},{dy})");
        }
    }

    #[test]
    fn two_point_stroke_has_zero_accelerations() {
        let s = stroke_from(&[(0, 0.0, 0.0), (50, 5.0, 0.0)]);
        let v = extract_features(&s, None).unwrap();
        assert_eq!(get(&v, FeatureId::PairwiseAccelerationP50), 0.0);
        assert_eq!(get(&v, FeatureId::MedianAccelFirst5), 0.0);
    }

    #[test]
    fn acceleration_uses_central_time_span() {
        // velocities: 0.1 then 0.3 px/ms; a_1 = (0.3 - 0.1) / 200 * 2 = 0.002
        let s = stroke_from(&[(0, 0.0, 0.0), (100, 10.0, 0.0), (200, 40.0, 0.0)]);
        let v = extract_features(&s, None).unwrap();
        assert!((get(&v, FeatureId::PairwiseAccelerationP50) - 0.002).abs() < 1e-12);
    }

    #[test]
    fn inter_stroke_time_uses_previous_stroke_end() {
        let a = stroke_from(&[(0, 0.0, 0.0), (100, 5.0, 0.0)]);
        let b = stroke_from(&[(400, 0.0, 0.0), (500, 5.0, 0.0)]);
        let v_first = extract_features(&a, None).unwrap();
        let v_second = extract_features(&b, Some(&a)).unwrap();
        assert_eq!(get(&v_first, FeatureId::InterStrokeTime), 0.0);
        assert_eq!(get(&v_second, FeatureId::InterStrokeTime), 300.0);
    }

    #[test]
    fn pass_through_features() {
        let s = stroke_from(&[(0, 0.0, 0.0), (10, 1.0, 1.0)]);
        let v = extract_features(&s, None).unwrap();
        assert_eq!(get(&v, FeatureId::PhoneId), 3.0);
        assert_eq!(get(&v, FeatureId::PhoneOrientation), 0.0);
    }

    #[test]
    fn change_of_finger_orientation() {
        let mut s = stroke_with_sensors(&[(0, 0.0, 0.0), (10, 1.0, 0.0)], 0.4, 1.0, 0.2);
        s.points[1].finger_orientation = 0.7;
        let v = extract_features(&s, None).unwrap();
        assert!((get(&v, FeatureId::ChangeOfFingerOrientation) - 0.5).abs() < 1e-12);
    }

    fn arb_stroke() -> impl Strategy<Value = Stroke> {
        prop::collection::vec((1u64..50, -40.0f64..40.0, -40.0f64..40.0, 0.0f64..1.0), 2..12)
            .prop_map(|steps| {
                let mut t = 0u64;
                let mut x = 100.0;
                let mut y = 200.0;
                let points = steps
                    .iter()
                    .map(|&(dt, dx, dy, pr)| {
                        t += dt;
                        x += dx;
                        y += dy;
                        StrokePoint {
                            time_ms: t,
                            x,
                            y,
                            pressure: pr,
                            area: 1.5,
                            finger_orientation: 0.1,
                        }
                    })
                    .collect();
                Stroke {
                    user_id: 1,
                    phone_id: 1,
                    doc_id: 1,
                    phone_orientation: PhoneOrientation::Portrait,
                    points,
                }
            })
    }

    proptest! {
        #[test]
        fn mean_resultant_length_in_unit_interval(s in arb_stroke()) {
            let v = extract_features(&s, None).unwrap();
            let mrl = get(&v, FeatureId::MeanResultantLength);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&mrl));
        }

        #[test]
        fn ratio_end_to_end_in_unit_interval(s in arb_stroke()) {
            let v = extract_features(&s, None).unwrap();
            let ratio = get(&v, FeatureId::RatioEndToEndOverTrajectory);
            prop_assert!(ratio > 0.0 && ratio <= 1.0 + 1e-12);
        }

        #[test]
        fn translation_invariance(s in arb_stroke(), shift in (-500.0f64..500.0, -500.0f64..500.0)) {
            let mut shifted = s.clone();
            for p in &mut shifted.points {
                p.x += shift.0;
                p.y += shift.1;
            }
            let a = extract_features(&s, None).unwrap();
            let b = extract_features(&shifted, None).unwrap();
            let coords = [
                FeatureId::StartX.index(),
                FeatureId::StartY.index(),
                FeatureId::StopX.index(),
                FeatureId::StopY.index(),
            ];
            for (j, (va, vb)) in a.iter().zip(&b).enumerate() {
                if coords.contains(&j) {
                    continue;
                }
                prop_assert!((va - vb).abs() < 1e-6, "feature {j}: {va} vs {vb}");
            }
            prop_assert!((get(&b, FeatureId::StartX) - get(&a, FeatureId::StartX) - shift.0).abs() < 1e-9);
            prop_assert!((get(&b, FeatureId::StopY) - get(&a, FeatureId::StopY) - shift.1).abs() < 1e-9);
        }

        #[test]
        fn time_shift_leaves_within_stroke_features(s in arb_stroke(), shift in 0u64..100_000) {
            let mut shifted = s.clone();
            for p in &mut shifted.points {
                p.time_ms += shift;
            }
            let a = extract_features(&s, None).unwrap();
            let b = extract_features(&shifted, None).unwrap();
            for (va, vb) in a.iter().zip(&b) {
                prop_assert!((va - vb).abs() < 1e-9);
            }
        }

        #[test]
        fn largest_deviation_dominates_percentiles(s in arb_stroke()) {
            let v = extract_features(&s, None).unwrap();
            let largest = get(&v, FeatureId::LargestDeviationFromLine);
            prop_assert!(largest + 1e-9 >= get(&v, FeatureId::DeviationP80).abs());
            prop_assert!(largest + 1e-9 >= get(&v, FeatureId::DeviationP20).abs());
        }
    }

    #[test]
    fn mrl_is_one_only_for_identical_headings() {
        let straight = stroke_from(&[(0, 0.0, 0.0), (10, 3.0, 1.0), (20, 6.0, 2.0)]);
        let bent = stroke_from(&[(0, 0.0, 0.0), (10, 3.0, 1.0), (20, 3.0, 5.0)]);
        let v1 = extract_features(&straight, None).unwrap();
        let v2 = extract_features(&bent, None).unwrap();
        assert!((get(&v1, FeatureId::MeanResultantLength) - 1.0).abs() < 1e-12);
        assert!(get(&v2, FeatureId::MeanResultantLength) < 1.0 - 1e-6);
    }

    #[test]
    fn extract_dataset_empty_input() {
        let (m, skipped) = extract_dataset(&[]);
        assert_eq!(m.n(), 0);
        assert!(skipped.is_empty());
        assert_eq!(m.d(), 32);
    }

    #[test]
    fn extract_dataset_chains_inter_stroke_time_per_user() {
        let mut a1 = stroke_from(&[(0, 0.0, 0.0), (100, 5.0, 0.0)]);
        let mut b1 = stroke_from(&[(50, 0.0, 0.0), (150, 5.0, 0.0)]);
        b1.user_id = 2;
        let mut a2 = stroke_from(&[(300, 0.0, 0.0), (400, 5.0, 0.0)]);
        a2.user_id = 1;
        let mut b2 = stroke_from(&[(900, 0.0, 0.0), (950, 5.0, 0.0)]);
        b2.user_id = 2;
        a1.user_id = 1;
        let strokes = vec![a1, b1, a2, b2];
        let (m, skipped) = extract_dataset(&strokes);
        assert!(skipped.is_empty());
        let ist = FeatureId::InterStrokeTime.index();
        assert_eq!(m.rows[0][ist], 0.0); // user 1 first
        assert_eq!(m.rows[1][ist], 0.0); // user 2 first
        assert_eq!(m.rows[2][ist], 200.0); // 300 - 100, user 1 chain
        assert_eq!(m.rows[3][ist], 750.0); // 900 - 150, user 2 chain
        assert_eq!(m.labels, vec![1, 2, 1, 2]);
    }
}
