//! Fourier coefficients of the notch profile against the closed-form
//! integral `a_k = 2tR(cos kw − 1)/(πk²)` (centered frame, `w = ε/R`).

use std::f64::consts::PI;

use overdet_core::TentNotch;
use overdet_core::InnerProfile;

fn closed_form(notch: &TentNotch, k: usize) -> (f64, f64) {
    let (t, r, w, kf) = (notch.amplitude, notch.inner_radius, notch.half_width(), k as f64);
    if k == 0 {
        return (-t * notch.depth * w / (2.0 * PI), 0.0);
    }
    let a = 2.0 * t * r * ((kf * w).cos() - 1.0) / (PI * kf * kf);
    (a * (kf * notch.center).cos(), a * (kf * notch.center).sin())
}

#[test]
fn sampled_coefficients_match_closed_form() {
    let notch = TentNotch::new(0.05, 0.7, 0.5).unwrap().scaled(0.8);
    let f = InnerProfile::from(notch).fourier(1 << 14).unwrap();
    for k in 0..=200 {
        let (a, b) = closed_form(&notch, k);
        assert!((f.coeff(k, 0) - a).abs() < 1e-8, "k={k} cos");
        if k > 0 {
            assert!((f.coeff(k, 1) - b).abs() < 1e-8, "k={k} sin");
        }
    }
}

#[test]
fn coefficients_decay_like_inverse_square() {
    let notch = TentNotch::new(0.05, 0.0, 0.5).unwrap();
    let w = notch.half_width();
    // envelope |a_k| ≤ 4tR/(πk²), attained when cos kw = −1
    for k in 1..=500usize {
        let (a, _) = closed_form(&notch, k);
        assert!(a.abs() <= 4.0 * notch.inner_radius / (PI * (k * k) as f64) + 1e-18);
    }
    let k = (PI / w).round() as usize;
    let (a, _) = closed_form(&notch, k);
    assert!(a.abs() * (k * k) as f64 > 0.9 * 4.0 * notch.inner_radius / PI);
}
