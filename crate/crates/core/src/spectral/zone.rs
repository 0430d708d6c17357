use super::{SpectralError, SpectralField};

/// Locates the oscillation zone: the leftmost and rightmost `x` where the
/// local oscillation amplitude exceeds `threshold` times the global
/// amplitude.
///
/// The local amplitude at a point is the max-min spread of the detrended
/// samples over a sliding window of width `4 pi eps / sqrt(max |u|)` (the
/// local wavelength scale); removing the linear trend over the window keeps
/// the smooth background from registering as oscillation. A non-positive
/// threshold degenerates to the full domain.
pub fn oscillation_zone(
    field: &SpectralField,
    threshold: f64,
) -> Result<(f64, f64), SpectralError> {
    let n = field.n;
    if threshold <= 0.0 {
        return Ok((field.x_at(0), field.x_at(n - 1)));
    }
    let umax = field.max_abs();
    if umax == 0.0 {
        return Err(SpectralError::NoOscillations);
    }
    let umin = field.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let uhi = field.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let global_amp = uhi - umin;
    if global_amp <= 0.0 {
        return Err(SpectralError::NoOscillations);
    }

    let dx = field.l / n as f64;
    let window = 4.0 * std::f64::consts::PI * field.eps / umax.sqrt();
    let half = ((0.5 * window / dx).ceil() as usize).max(2);

    let mut left: Option<usize> = None;
    let mut right: Option<usize> = None;
    for i in half..n - half {
        // Detrend by the window-end chord, then measure the spread.
        let lo = i - half;
        let hi = i + half;
        let x0 = field.x_at(lo);
        let slope = (field.values[hi] - field.values[lo]) / (field.x_at(hi) - x0);
        let base = field.values[lo];
        let mut vmin = f64::INFINITY;
        let mut vmax = f64::NEG_INFINITY;
        for j in lo..=hi {
            let detrended = field.values[j] - base - slope * (field.x_at(j) - x0);
            vmin = vmin.min(detrended);
            vmax = vmax.max(detrended);
        }
        if vmax - vmin > threshold * global_amp {
            if left.is_none() {
                left = Some(i);
            }
            right = Some(i);
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok((field.x_at(l), field.x_at(r))),
        _ => Err(SpectralError::NoOscillations),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_field_has_no_oscillations() {
        let f = SpectralField::from_profile(
            |x: f64| -1.0 / (x * x).exp(),
            60.0,
            2048,
            1e-2,
        )
        .unwrap();
        assert!(matches!(
            oscillation_zone(&f, 0.05),
            Err(SpectralError::NoOscillations)
        ));
    }

    #[test]
    fn zero_threshold_returns_domain() {
        let f = SpectralField::from_profile(|x: f64| -(-x * x).exp(), 60.0, 2048, 1e-2).unwrap();
        let (l, r) = oscillation_zone(&f, 0.0).unwrap();
        assert_eq!(l, f.x_at(0));
        assert_eq!(r, f.x_at(2047));
    }

    #[test]
    fn synthetic_wave_packet_is_located() {
        // Oscillations confined to [-2, -1] on a smooth background.
        let eps = 1e-2;
        let f = SpectralField::from_profile(
            |x: f64| {
                let packet = if (-2.0..=-1.0).contains(&x) {
                    0.5 * (x / eps).sin() * (std::f64::consts::PI * (x + 1.5)).cos().powi(2)
                } else {
                    0.0
                };
                -(-x * x / 9.0).exp() + packet
            },
            60.0,
            4096,
            eps,
        )
        .unwrap();
        let (l, r) = oscillation_zone(&f, 0.1).unwrap();
        assert!((l + 2.0).abs() < 0.2, "left {l}");
        assert!((r + 1.0).abs() < 0.2, "right {r}");
    }
}
