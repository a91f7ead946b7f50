//! Surface isotropic position of parallelohedra and the reduction to `f(ζ)`.
//!
//! A body `Σ β_ij [o, v_i × v_j]` is in surface isotropic position when
//!
//! ```text
//! Σ 3β_ij / (2 w |v_i × v_j|) · (v_i × v_j) ⊗ (v_i × v_j) = Id,
//! ```
//!
//! which pins the weights to `β_ij = −⟨v_s, v_t⟩ |v_i × v_j| · 2w/3`. Writing
//! `γ_ij = −⟨v_s, v_t⟩`, `ζ_ij = γ_ij |v_i × v_j|` and `τ_ij = γ_ij |v_i × v_j|²`,
//! the scale-free objective becomes `27 vol / (2w)³ = f(ζ)`, and
//! Cauchy–Schwarz gives `f(ζ) ≤ √(f(γ) f(τ)) ≤ √2` on normalized tetrahedra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{gram, Matrix3, Vector3};
use crate::pairs::PAIRS;
use crate::parallelohedron::{build, regular_vertices, BetaWeights, CenteredTetrahedron};
use crate::symfunc::{f_eval, TauVector};

/// Inner products up to this size count as zero when testing obtuseness.
pub const OBTUSE_TOL: f64 = 1e-12;

/// `Σ 3β_ij / (2w|c_ij|) c_ij ⊗ c_ij` with `c_ij = v_i × v_j`; the identity iff
/// the body is in surface isotropic position.
pub fn isotropy_matrix(t: &CenteredTetrahedron, b: &BetaWeights) -> Result<Matrix3> {
    let width: f64 = 0.5 * PAIRS.into_iter().map(|p| b[p] * t.pair_cross(p).norm()).sum::<f64>();
    if !(width > 0.0) {
        return Err(Error::ZeroWidth);
    }
    let mut m = Matrix3::ZERO;
    for p in PAIRS {
        let c = t.pair_cross(p);
        if b[p] == 0.0 {
            continue;
        }
        m = m + Matrix3::outer(c, c) * (3.0 * b[p] / (2.0 * width * c.norm()));
    }
    Ok(m)
}

/// The isotropic weights for mean width `width`: `β_ij = −⟨v_s, v_t⟩ |v_i × v_j| (2·width/3)`.
pub fn beta_from_isotropy(t: &CenteredTetrahedron, width: f64) -> Result<BetaWeights> {
    if !(width >= 0.0) || !width.is_finite() {
        return Err(Error::NonpositiveWidth(width));
    }
    let q = reduction_quantities(t);
    if q.gamma.0.iter().any(|&g| g < -OBTUSE_TOL) {
        return Err(Error::NotObtuseCentered);
    }
    BetaWeights::new(q.zeta.0.map(|z| z.max(0.0) * (2.0 * width / 3.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionQuantities {
    /// `−⟨v_s, v_t⟩`
    pub gamma: TauVector,
    /// `γ_ij |v_i × v_j|²`
    pub tau: TauVector,
    /// `γ_ij |v_i × v_j|`
    pub zeta: TauVector,
}

pub fn reduction_quantities(t: &CenteredTetrahedron) -> ReductionQuantities {
    let gamma = t.gamma();
    let mut tau = TauVector::default();
    let mut zeta = TauVector::default();
    for p in PAIRS {
        let len = t.pair_cross(p).norm();
        zeta[p] = gamma[p] * len;
        tau[p] = gamma[p] * len * len;
    }
    ReductionQuantities { gamma, tau, zeta }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundChain {
    /// `f(ζ)`
    pub f_zeta: f64,
    /// `√(f(γ) f(τ))`
    pub cs_bound: f64,
    /// `√2`
    pub global_bound: f64,
    /// Mean width of the unit-volume isotropic body, `3 / (2 f(ζ)^{1/3})`.
    pub width: f64,
}

impl BoundChain {
    pub fn holds(&self, tol: f64) -> bool {
        self.f_zeta <= self.cs_bound + tol && self.cs_bound <= self.global_bound + tol
    }
}

/// Unit-volume mean width belonging to an objective value `f(ζ)`.
pub fn width_from_f_zeta(f_zeta: f64) -> f64 {
    1.5 / f_zeta.cbrt()
}

pub fn bound_chain(t: &CenteredTetrahedron) -> Result<BoundChain> {
    let q = reduction_quantities(t);
    if q.gamma.0.iter().any(|&g| g < -OBTUSE_TOL) {
        return Err(Error::BoundChainInapplicable);
    }
    let clamp = |v: TauVector| TauVector(v.0.map(|x| x.max(0.0)));
    let f_zeta = f_eval(&clamp(q.zeta));
    let cs_bound = (f_eval(&clamp(q.gamma)) * f_eval(&clamp(q.tau))).sqrt();
    Ok(BoundChain {
        f_zeta,
        cs_bound,
        global_bound: std::f64::consts::SQRT_2,
        width: width_from_f_zeta(f_zeta),
    })
}

/// The normalized regular tetrahedron `(±1, ±1, ±1)·4^{-1/3}` (even sign patterns).
pub fn regular_tetrahedron() -> CenteredTetrahedron {
    CenteredTetrahedron::normalize(regular_vertices()).expect("regular tetrahedron is nondegenerate")
}

/// Frobenius distance between the unit-norm Gram matrix of `v₁..v₄` and the
/// nearest multiple of `4·Id − E`. Zero exactly for regular tetrahedra.
pub fn gram_distance_to_regular(t: &CenteredTetrahedron) -> f64 {
    let g = gram(t.vertices());
    let target = |i: usize, j: usize| if i == j { 3.0 } else { -1.0 };
    let mut gg = 0.0;
    let mut gm = 0.0;
    let mut mm = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            gg += g.get(i, j) * g.get(i, j);
            gm += g.get(i, j) * target(i, j);
            mm += target(i, j) * target(i, j);
        }
    }
    let norm = gg.sqrt();
    let lambda = gm / (norm * mm);
    let mut d = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let e = g.get(i, j) / norm - lambda * target(i, j);
            d += e * e;
        }
    }
    d.sqrt()
}

/// Outer unit normals and facet areas of the centrally symmetric polytope whose
/// projection body is the given parallelohedron: `±c/|c|` with area `β|c|/2` each.
pub fn projection_body_facets(t: &CenteredTetrahedron, b: &BetaWeights) -> Result<Vec<(Vector3, f64)>> {
    let z = build(t, b)?;
    if !z.is_full_dimensional() {
        return Err(Error::NotFullDimensional);
    }
    let mut out = Vec::with_capacity(12);
    for p in PAIRS {
        if b[p] == 0.0 {
            continue;
        }
        let c = t.pair_cross(p);
        let u = c / c.norm();
        let area = 0.5 * b[p] * c.norm();
        out.push((u, area));
        out.push((-u, area));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallelohedron::measures_rep;

    fn stretched() -> CenteredTetrahedron {
        let v = regular_vertices().map(|p| Vector3::new(p.x * 1.2, p.y, p.z * 0.9));
        CenteredTetrahedron::normalize(v).unwrap()
    }

    #[test]
    fn regular_tetrahedron_gram() {
        let t = regular_tetrahedron();
        let g = gram(t.vertices());
        let off = g.get(0, 1);
        assert!(off < 0.0);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { -3.0 * off } else { off };
                assert!((g.get(i, j) - expect).abs() < 1e-12);
            }
        }
        assert!((t.volume() - 2.0 / 3.0).abs() < 1e-14);
        assert!(gram_distance_to_regular(&t) < 1e-12);
        assert!(gram_distance_to_regular(&stretched()) > 0.05);
    }

    #[test]
    fn isotropy_matrix_examples() {
        let t = regular_tetrahedron();
        let m = isotropy_matrix(&t, &BetaWeights::splat(0.3).unwrap()).unwrap();
        assert!(m.max_abs_diff(&Matrix3::identity()) < 1e-10);

        // v = e1, e2, e3, -(1,1,1): cross products 12, 13, 23 are ±e3, ±e2, e1
        let cube_t = CenteredTetrahedron::new([Vector3::E1, Vector3::E2, Vector3::E3, Vector3::new(-1.0, -1.0, -1.0)]).unwrap();
        let b = BetaWeights::new([1.0, 1.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let m = isotropy_matrix(&cube_t, &b).unwrap();
        assert!(m.max_abs_diff(&Matrix3::identity()) < 1e-15);

        let m = isotropy_matrix(&stretched(), &BetaWeights::splat(1.0).unwrap()).unwrap();
        assert!(m.max_abs_diff(&Matrix3::identity()) > 0.01);

        assert_eq!(isotropy_matrix(&t, &BetaWeights::default()), Err(Error::ZeroWidth));
    }

    #[test]
    fn beta_from_isotropy_on_regular() {
        let t = regular_tetrahedron();
        let w = 3.0 * 2f64.powf(-7.0 / 6.0);
        let b = beta_from_isotropy(&t, w).unwrap();
        let first = b.values()[0];
        assert!(b.values().iter().all(|&x| (x - first).abs() < 1e-14));
        let z = build(&t, &b).unwrap();
        assert!((z.volume() - 1.0).abs() < 1e-12);
        assert!((z.mean_width() - w).abs() < 1e-14);
        let mesh = z.realize_hull().unwrap();
        assert_eq!(mesh.face_count(), 14);
        // every edge of the regular truncated octahedron has length 2^{-7/6}
        for (a, c) in mesh.edges() {
            assert!(((mesh.vertices[a] - mesh.vertices[c]).norm() - 2f64.powf(-7.0 / 6.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_from_isotropy_errors() {
        let t = regular_tetrahedron();
        let b = beta_from_isotropy(&t, 0.0).unwrap();
        assert_eq!(build(&t, &b), Err(Error::EmptyBody));
        assert!(beta_from_isotropy(&t, -1.0).is_err());
        // a strongly flattened tetrahedron has an acute vertex pair
        let v = [
            Vector3::new(3.0, 0.1, 0.0),
            Vector3::new(2.5, -0.1, 0.3),
            Vector3::new(-2.8, 0.2, -0.1),
            Vector3::new(-2.7, -0.2, -0.2),
        ];
        let t = CenteredTetrahedron::normalize(v).unwrap();
        assert_eq!(beta_from_isotropy(&t, 1.0), Err(Error::NotObtuseCentered));
        assert_eq!(bound_chain(&t), Err(Error::BoundChainInapplicable));
    }

    #[test]
    fn reduction_quantities_on_regular() {
        let q = reduction_quantities(&regular_tetrahedron());
        let g = 2f64.powf(-4.0 / 3.0);
        for p in PAIRS {
            assert!((q.gamma[p] - g).abs() < 1e-14);
            assert!((q.tau[p] - 0.5).abs() < 1e-14);
            assert!((q.zeta[p] * q.zeta[p] - q.gamma[p] * q.tau[p]).abs() < 1e-14);
        }
        assert!((f_eval(&q.gamma) - 1.0).abs() < 1e-13);
        assert!((q.tau.sum() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn bound_chain_on_regular() {
        let c = bound_chain(&regular_tetrahedron()).unwrap();
        assert!((c.f_zeta - std::f64::consts::SQRT_2).abs() < 1e-13);
        assert!((c.cs_bound - std::f64::consts::SQRT_2).abs() < 1e-13);
        assert!((c.width - 3.0 * 2f64.powf(-7.0 / 6.0)).abs() < 1e-13);
        assert!(c.holds(1e-12));
    }

    #[test]
    fn objective_identity_for_isotropic_bodies() {
        let t = stretched();
        let c = bound_chain(&t).unwrap();
        let b = beta_from_isotropy(&t, 1.0).unwrap();
        let r = measures_rep(&t, &b);
        let objective = 27.0 * r.volume / (2.0 * r.mean_width).powi(3);
        assert!((objective - c.f_zeta).abs() < 1e-12 * c.f_zeta);
        assert!(c.f_zeta < std::f64::consts::SQRT_2);
    }

    #[test]
    fn projection_body_facet_examples() {
        let t = regular_tetrahedron();
        let facets = projection_body_facets(&t, &BetaWeights::splat(1.0).unwrap()).unwrap();
        assert_eq!(facets.len(), 12);
        let a0 = facets[0].1;
        assert!(facets.iter().all(|(_, a)| (a - a0).abs() < 1e-15));
        let closure: Vector3 = facets.iter().map(|(u, a)| *u * *a).sum();
        assert!(closure.norm() < 1e-14);

        let one_zero = BetaWeights::new([1.0, 1.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(projection_body_facets(&t, &one_zero).unwrap().len(), 10);
        let flat = BetaWeights::new([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(projection_body_facets(&t, &flat), Err(Error::NotFullDimensional));
    }
}
