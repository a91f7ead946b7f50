//! Seeded random instances for the verification sweeps and optimizer starts.
//!
//! Shapes use Gaussian `v₁, v₂, v₃` with `v₄ = −(v₁ + v₂ + v₃)`. Obtuse-centered
//! tetrahedra (all `⟨v_s, v_t⟩ ≤ 0`) are drawn by rejection from the same law.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geom::Vector3;
use crate::pairs::{PairSet, PAIRS};
use crate::parallelohedron::{BetaWeights, CenteredTetrahedron};

/// Rejection attempts before [`obtuse_tetrahedron`] gives up.
pub const MAX_REJECTIONS: usize = 100_000;

/// Independent stream for `(seed, index)`, e.g. one per optimizer start.
pub fn sub_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3 {
    Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A centered tetrahedron at a random scale in `[e⁻³, e³]`, not normalized.
pub fn centered_points<R: Rng + ?Sized>(rng: &mut R) -> [Vector3; 4] {
    let scale = rng.random_range(-3.0f64..3.0).exp();
    let v1 = gaussian_vector(rng) * scale;
    let v2 = gaussian_vector(rng) * scale;
    let v3 = gaussian_vector(rng) * scale;
    [v1, v2, v3, -(v1 + v2 + v3)]
}

/// Largest vertex norm of a normalized tetrahedron accepted by [`well_shaped_points`].
/// The regular one has `√3·4^{-1/3} ≈ 1.09`.
pub const WELL_SHAPED_RADIUS: f64 = 8.0;

/// [`centered_points`] whose normalized shape has all vertex norms at most
/// [`WELL_SHAPED_RADIUS`]; the scale stays arbitrary.
pub fn well_shaped_points<R: Rng + ?Sized>(rng: &mut R) -> [Vector3; 4] {
    loop {
        let p = centered_points(rng);
        if let Ok(t) = CenteredTetrahedron::normalize(p) {
            if t.vertices().iter().all(|v| v.norm() <= WELL_SHAPED_RADIUS) {
                return p;
            }
        }
    }
}

pub fn normalized_tetrahedron<R: Rng + ?Sized>(rng: &mut R) -> CenteredTetrahedron {
    loop {
        if let Ok(t) = CenteredTetrahedron::normalize(centered_points(rng)) {
            return t;
        }
    }
}

pub fn is_obtuse_centered(t: &CenteredTetrahedron) -> bool {
    t.gamma().0.iter().all(|&g| g >= 0.0)
}

pub fn obtuse_tetrahedron<R: Rng + ?Sized>(rng: &mut R) -> Option<CenteredTetrahedron> {
    (0..MAX_REJECTIONS).map(|_| normalized_tetrahedron(rng)).find(is_obtuse_centered)
}

/// Weights uniform in `[0.05, 2)` off the given zero pattern.
pub fn betas<R: Rng + ?Sized>(rng: &mut R, zeros: PairSet) -> BetaWeights {
    let mut b = [0.0; 6];
    for p in PAIRS {
        if !zeros.contains(p) {
            b[p.slot()] = rng.random_range(0.05..2.0);
        }
    }
    BetaWeights::new(b).expect("positive weights")
}

/// A uniform point of `{τ ≥ 0, Σ τ = budget}` restricted to the free slots.
pub fn simplex_point<R: Rng + ?Sized>(rng: &mut R, budget: f64, zeros: PairSet) -> [f64; 6] {
    let mut t = [0.0; 6];
    let mut total = 0.0;
    for p in PAIRS {
        if !zeros.contains(p) {
            let e: f64 = -(1.0 - rng.random::<f64>()).ln();
            t[p.slot()] = e;
            total += e;
        }
    }
    t.map(|x| x * budget / total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_streams_are_reproducible_and_distinct() {
        let a: f64 = sub_rng(7, 3).random();
        let b: f64 = sub_rng(7, 3).random();
        let c: f64 = sub_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn obtuse_sampler_accepts_only_obtuse() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let t = obtuse_tetrahedron(&mut rng).unwrap();
            assert!(is_obtuse_centered(&t));
        }
    }

    #[test]
    fn simplex_points_respect_the_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let zeros = PairSet::from_pairs([PAIRS[0], PAIRS[5]]);
        for _ in 0..100 {
            let t = simplex_point(&mut rng, 2.0, zeros);
            assert!((t.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            assert_eq!(t[0], 0.0);
            assert_eq!(t[5], 0.0);
            assert!(t.iter().all(|&x| x >= 0.0));
        }
    }
}
