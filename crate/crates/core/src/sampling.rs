//! Sphere and ball sampling helpers shared by policies and environments.

use rand::Rng;

use crate::linalg;
use crate::scalar::Scalar;

/// Uniform draw from the unit sphere (Gaussian direction, normalized).
pub fn unit_sphere<S: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<S> {
    loop {
        let v: Vec<S> = (0..dim).map(|_| S::standard_normal(rng)).collect();
        let n = linalg::norm2(&v);
        if n > S::cast(1e-12) {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform draw from the closed unit ball (sphere direction, radius `U^(1/d)`).
pub fn unit_ball<S: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<S> {
    let mut v = unit_sphere::<S, R>(dim, rng);
    let u: S = S::uniform_pm1(rng).abs();
    let r = u.powf(S::one() / S::cast(dim as f64));
    linalg::scale(&mut v, r);
    v
}
