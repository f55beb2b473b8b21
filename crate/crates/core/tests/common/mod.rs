#![allow(dead_code)]

use rand::Rng;
use wrsn::protocol::RawAction;

/// Raw actions biased toward the edges of the unit square: full-length moves
/// along the axes, exact 0 and 1, and uniform draws.
pub fn adversarial_raw<R: Rng>(rng: &mut R) -> RawAction<f64> {
    let pick = |rng: &mut R| match rng.random_range(0..6) {
        0 => 0.0,
        1 => 1.0,
        2 => 0.25 * rng.random_range(0..=4) as f64,
        3 => 1.0 - 1e-12,
        _ => rng.random_range(0.0..=1.0),
    };
    let u_theta = pick(rng);
    let u_d = if rng.random_bool(0.5) { 1.0 } else { pick(rng) };
    RawAction::new(u_theta, u_d)
}
