//! The cubic form `f` on the six pair slots and its constrained maxima.
//!
//! `f(τ)` is the sum of `τ_a τ_b τ_c` over the 16 triples of pairs whose
//! three edges on the vertex set {1,2,3,4} do not all meet in one vertex:
//! the four triangles and the twelve Hamiltonian paths of K₄. The four
//! "stars" (three pairs sharing a vertex) are exactly the missing monomials
//! of the elementary symmetric polynomial e₃.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{cross, det3, Vector3};
use crate::pairs::{Pair, PairSet, PAIRS};

/// Values on the six pair slots, ordered 12, 13, 14, 23, 24, 34.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TauVector(pub [f64; 6]);

impl TauVector {
    pub fn splat(v: f64) -> Self {
        TauVector([v; 6])
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn dot(&self, other: &TauVector) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> TauVector {
        TauVector(self.0.map(|v| v * s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Relabels the vertices: slot `p` of the result holds slot `p∘perm⁻¹` of `self`,
    /// i.e. `out[perm(p)] = self[p]`.
    pub fn permuted(&self, perm: [usize; 4]) -> TauVector {
        let mut out = TauVector::default();
        for p in PAIRS {
            out[p.permuted(perm)] = self[p];
        }
        out
    }

    pub fn max_abs_diff(&self, other: &TauVector) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl Index<Pair> for TauVector {
    type Output = f64;
    fn index(&self, p: Pair) -> &f64 {
        &self.0[p.slot()]
    }
}

impl IndexMut<Pair> for TauVector {
    fn index_mut(&mut self, p: Pair) -> &mut f64 {
        &mut self.0[p.slot()]
    }
}

/// Slot triples of the 16 monomials of `f`.
pub const MONOMIALS: [[usize; 3]; 16] = [
    // triangles
    [0, 1, 3],
    [0, 2, 4],
    [1, 2, 5],
    [3, 4, 5],
    // (τ12 + τ34)(τ13 τ24 + τ14 τ23)
    [0, 1, 4],
    [0, 2, 3],
    [5, 1, 4],
    [5, 2, 3],
    // (τ13 + τ24)(τ12 τ34 + τ14 τ23)
    [1, 0, 5],
    [1, 2, 3],
    [4, 0, 5],
    [4, 2, 3],
    // (τ14 + τ23)(τ12 τ34 + τ13 τ24)
    [2, 0, 5],
    [2, 1, 4],
    [3, 0, 5],
    [3, 1, 4],
];

pub fn f_eval(t: &TauVector) -> f64 {
    let t = &t.0;
    MONOMIALS.iter().map(|&[a, b, c]| t[a] * t[b] * t[c]).sum()
}

/// `f` in its grouped form: four triangle terms plus three
/// (complementary-pair sum) × (cross-product sum) terms.
pub fn f_grouped(t: &TauVector) -> f64 {
    let [t12, t13, t14, t23, t24, t34] = t.0;
    t12 * t13 * t23
        + t12 * t14 * t24
        + t13 * t14 * t34
        + t23 * t24 * t34
        + (t12 + t34) * (t13 * t24 + t14 * t23)
        + (t13 + t24) * (t12 * t34 + t14 * t23)
        + (t14 + t23) * (t12 * t34 + t13 * t24)
}

pub fn f_grad(t: &TauVector) -> TauVector {
    let v = &t.0;
    let mut g = [0.0; 6];
    for &[a, b, c] in &MONOMIALS {
        g[a] += v[b] * v[c];
        g[b] += v[a] * v[c];
        g[c] += v[a] * v[b];
    }
    TauVector(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroCase {
    AllPositive,
    OneZero,
    TwoZeros,
    ThreeZeros,
    MoreZeros,
}

impl ZeroCase {
    pub fn from_count(zeros: usize) -> ZeroCase {
        match zeros {
            0 => ZeroCase::AllPositive,
            1 => ZeroCase::OneZero,
            2 => ZeroCase::TwoZeros,
            3 => ZeroCase::ThreeZeros,
            _ => ZeroCase::MoreZeros,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexMaxResult {
    pub max_value: f64,
    pub argmax: TauVector,
    pub case_tag: ZeroCase,
}

/// Maximum of `f` over `{τ ≥ 0, Σ τ = budget, τ_p = 0 for p ∈ zeros}`.
///
/// Values for `budget = 1` (the general case follows from cubic homogeneity):
///
/// | pinned zeros                         | max      | maximizer                           |
/// |--------------------------------------|----------|-------------------------------------|
/// | none                                 | 2/27     | all 1/6                             |
/// | one pair `p`                         | 16/243   | 1/9 on `p`'s complement, 2/9 else   |
/// | two disjoint pairs                   | 1/16     | 1/4 on the remaining four           |
/// | two pairs sharing a vertex           | 4/81     | 1/3 on the pair joining the far ends, 2/9 else |
/// | three, free pairs without a common vertex | 1/27 | 1/3 on each free pair              |
/// | three, free pairs sharing a vertex   | 0        | f vanishes on the face              |
/// | four or five                         | 0        | f vanishes on the face              |
pub fn simplex_max(budget: f64, zeros: PairSet) -> Result<SimplexMaxResult> {
    if !(budget > 0.0) || !budget.is_finite() {
        return Err(Error::NonpositiveBudget(budget));
    }
    let free = zeros.complement();
    if free.is_empty() {
        return Err(Error::InvalidConfig("every pair pinned to zero: empty simplex".into()));
    }
    let c = budget;
    let mut argmax = TauVector::default();
    let unit_max = match zeros.len() {
        0 => {
            argmax = TauVector::splat(c / 6.0);
            2.0 / 27.0
        }
        1 => {
            let zero = zeros.iter().next().expect("one zero");
            for p in free.iter() {
                argmax[p] = if p == zero.complement() { c / 9.0 } else { 2.0 * c / 9.0 };
            }
            16.0 / 243.0
        }
        2 => {
            let mut it = zeros.iter();
            let (a, b) = (it.next().expect("two zeros"), it.next().expect("two zeros"));
            if a.intersects(b) {
                // zeros {v,x}, {v,y}: f = τ_xy · e₂(other three free slots)
                let far_end = |p: Pair, other: Pair| {
                    let (i, j) = p.indices();
                    if other.contains(i) { j } else { i }
                };
                let joining = Pair::from_labels(far_end(a, b) + 1, far_end(b, a) + 1)?;
                for p in free.iter() {
                    argmax[p] = if p == joining { c / 3.0 } else { 2.0 * c / 9.0 };
                }
                4.0 / 81.0
            } else {
                for p in free.iter() {
                    argmax[p] = c / 4.0;
                }
                1.0 / 16.0
            }
        }
        3 => {
            if free.common_vertex().is_some() {
                spread(&mut argmax, free, c);
                0.0
            } else {
                for p in free.iter() {
                    argmax[p] = c / 3.0;
                }
                1.0 / 27.0
            }
        }
        _ => {
            spread(&mut argmax, free, c);
            0.0
        }
    };
    Ok(SimplexMaxResult {
        max_value: unit_max * c * c * c,
        argmax,
        case_tag: ZeroCase::from_count(zeros.len()),
    })
}

fn spread(t: &mut TauVector, free: PairSet, budget: f64) {
    let share = budget / free.len() as f64;
    for p in free.iter() {
        t[p] = share;
    }
}

/// Both sides of the two identities for a centered tetrahedron `p₁..p₄` of volume `V`:
/// `f(γ) = (9/4) V²` and `Σ ζ = (27/4) V²`, with `γ_ij = −⟨p_s, p_t⟩` and
/// `ζ_ij = γ_ij |p_i × p_j|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TetraIdentities {
    pub volume: f64,
    pub f_gamma: f64,
    pub zeta_sum: f64,
    pub expected_f: f64,
    pub expected_sum: f64,
}

impl TetraIdentities {
    /// Worst relative deviation of the two identities.
    pub fn max_rel_deviation(&self) -> f64 {
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
        rel(self.f_gamma, self.expected_f).max(rel(self.zeta_sum, self.expected_sum))
    }
}

/// Relative tolerance on `|Σ p_i|` for a point set to count as centered.
pub const CENTERED_TOL: f64 = 1e-10;

pub fn tetra_identities(p: &[Vector3; 4]) -> Result<TetraIdentities> {
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = p.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let sum: Vector3 = p.iter().copied().sum();
    if sum.norm() > CENTERED_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotCentered(sum.norm()));
    }
    let volume = det3(p[1] - p[0], p[2] - p[0], p[3] - p[0]).abs() / 6.0;
    if !(volume > 0.0) {
        return Err(Error::DegenerateTetrahedron);
    }
    let mut gamma = TauVector::default();
    let mut zeta_sum = 0.0;
    for pair in PAIRS {
        let (i, j) = pair.indices();
        let (s, t) = pair.complement().indices();
        gamma[pair] = -p[s].dot(p[t]);
        zeta_sum += gamma[pair] * cross(p[i], p[j]).norm_squared();
    }
    Ok(TetraIdentities {
        volume,
        f_gamma: f_eval(&gamma),
        zeta_sum,
        expected_f: 9.0 / 4.0 * volume * volume,
        expected_sum: 27.0 / 4.0 * volume * volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::vertex_permutations;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair(i: usize, j: usize) -> Pair {
        Pair::from_labels(i, j).unwrap()
    }

    fn random_tau(rng: &mut ChaCha8Rng) -> TauVector {
        TauVector(std::array::from_fn(|_| rng.random_range(-2.0..2.0)))
    }

    /// f as the sum of e₃ over all 20 triples minus the 4 vertex stars.
    fn f_by_exclusion(t: &TauVector) -> f64 {
        let mut total = 0.0;
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    let set = PairSet::from_pairs([PAIRS[a], PAIRS[b], PAIRS[c]]);
                    if set.common_vertex().is_none() {
                        total += t.0[a] * t.0[b] * t.0[c];
                    }
                }
            }
        }
        total
    }

    #[test]
    fn monomial_table_is_the_non_star_triples() {
        let mut seen = std::collections::HashSet::new();
        for m in MONOMIALS {
            let mut k = m;
            k.sort_unstable();
            assert!(seen.insert(k), "duplicate monomial {k:?}");
            let set = PairSet::from_pairs(m.map(|s| PAIRS[s]));
            assert_eq!(set.len(), 3);
            assert!(set.common_vertex().is_none());
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn expansion_matches_grouped_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let t = random_tau(&mut rng);
            let (a, b, c) = (f_eval(&t), f_grouped(&t), f_by_exclusion(&t));
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
            assert!((a - c).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {c}");
        }
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_eval(&TauVector::splat(1.0)), 16.0);
        assert!((f_eval(&TauVector::splat(1.0 / 6.0)) - 2.0 / 27.0).abs() < 1e-16);
        let t = TauVector([1.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 0.0]);
        assert!((f_eval(&t) - 16.0 / 243.0).abs() < 1e-16);
    }

    #[test]
    fn grad_examples() {
        let g = f_grad(&TauVector::splat(1.0));
        assert_eq!(g, TauVector::splat(8.0));
        assert_eq!(g.dot(&TauVector::splat(1.0)), 3.0 * 16.0);
        // f has no monomial with a repeated slot, so a single nonzero variable kills every partial.
        assert_eq!(f_grad(&TauVector([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])), TauVector::default());
    }

    #[test]
    fn grad_matches_explicit_first_partial() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let t = random_tau(&mut rng);
            let [_, t13, t14, t23, t24, t34] = t.0;
            let d12 = t13 * t23 + t14 * t24 + t13 * t24 + t14 * t23 + (t13 + t24 + t14 + t23) * t34;
            assert!((f_grad(&t).0[0] - d12).abs() < 1e-12);
        }
    }

    #[test]
    fn grad_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-6;
        for _ in 0..200 {
            let t = random_tau(&mut rng);
            let g = f_grad(&t);
            for k in 0..6 {
                let (mut up, mut down) = (t, t);
                up.0[k] += h;
                down.0[k] -= h;
                let fd = (f_eval(&up) - f_eval(&down)) / (2.0 * h);
                assert!((fd - g.0[k]).abs() < 1e-6, "slot {k}: {fd} vs {}", g.0[k]);
            }
        }
    }

    #[test]
    fn homogeneity_and_euler() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let t = random_tau(&mut rng);
            let f = f_eval(&t);
            for lambda in [0.5, 3.0] {
                let scaled = f_eval(&t.scaled(lambda));
                assert!((scaled - lambda.powi(3) * f).abs() <= 1e-12 * (1.0 + scaled.abs()));
            }
            let euler = f_grad(&t).dot(&t);
            assert!((euler - 3.0 * f).abs() <= 1e-10 * (1.0 + f.abs()));
        }
    }

    #[test]
    fn invariant_under_vertex_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let t = random_tau(&mut rng);
        let f = f_eval(&t);
        for perm in vertex_permutations() {
            assert!((f_eval(&t.permuted(perm)) - f).abs() < 1e-12);
        }
    }

    #[test]
    fn simplex_max_values() {
        let r = simplex_max(1.0, PairSet::EMPTY).unwrap();
        assert_eq!(r.case_tag, ZeroCase::AllPositive);
        assert!((r.max_value - 2.0 / 27.0).abs() < 1e-16);
        assert_eq!(r.argmax, TauVector::splat(1.0 / 6.0));

        let r = simplex_max(1.0, PairSet::from_pairs([pair(3, 4)])).unwrap();
        assert!((r.max_value - 16.0 / 243.0).abs() < 1e-16);
        assert_eq!(r.argmax.0, [1.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 0.0]);

        let r = simplex_max(1.0, PairSet::from_pairs([pair(1, 2), pair(3, 4)])).unwrap();
        assert_eq!(r.case_tag, ZeroCase::TwoZeros);
        assert_eq!(r.max_value, 1.0 / 16.0);

        let r = simplex_max(1.0, PairSet::from_pairs([pair(1, 2), pair(1, 3)])).unwrap();
        assert!((r.max_value - 4.0 / 81.0).abs() < 1e-16);
        assert_eq!(r.argmax[pair(2, 3)], 1.0 / 3.0);

        let r = simplex_max(1.0, PairSet::from_pairs([pair(1, 4), pair(2, 4), pair(3, 4)])).unwrap();
        assert_eq!(r.case_tag, ZeroCase::ThreeZeros);
        assert!((r.max_value - 1.0 / 27.0).abs() < 1e-16);
        let star_free = PairSet::from_pairs([pair(2, 3), pair(2, 4), pair(3, 4)]);
        assert_eq!(simplex_max(1.0, star_free).unwrap().max_value, 0.0);

        let four = PairSet::from_pairs([pair(1, 2), pair(1, 3), pair(1, 4), pair(2, 3)]);
        let r = simplex_max(1.0, four).unwrap();
        assert_eq!((r.max_value, r.case_tag), (0.0, ZeroCase::MoreZeros));
    }

    #[test]
    fn simplex_max_argmax_attains_max() {
        for mask in 0u8..63 {
            let zeros = PairSet::from_pairs(PAIRS.into_iter().filter(|p| mask & (1 << p.slot()) != 0));
            for budget in [1.0, 2.5] {
                let r = simplex_max(budget, zeros).unwrap();
                assert!((r.argmax.sum() - budget).abs() < 1e-12);
                assert!(zeros.iter().all(|p| r.argmax[p] == 0.0));
                assert!((f_eval(&r.argmax) - r.max_value).abs() < 1e-12, "mask {mask:06b}");
            }
        }
    }

    #[test]
    fn simplex_max_errors() {
        assert_eq!(simplex_max(0.0, PairSet::EMPTY), Err(Error::NonpositiveBudget(0.0)));
        assert!(simplex_max(-1.0, PairSet::EMPTY).is_err());
        assert!(simplex_max(1.0, PairSet::from_pairs(PAIRS)).is_err());
    }

    #[test]
    fn identities_on_alternating_cube_tetrahedron() {
        let p = [
            Vector3::new(1., 1., 1.),
            Vector3::new(1., -1., -1.),
            Vector3::new(-1., 1., -1.),
            Vector3::new(-1., -1., 1.),
        ];
        let id = tetra_identities(&p).unwrap();
        assert!((id.volume - 8.0 / 3.0).abs() < 1e-14);
        assert!((id.f_gamma - 16.0).abs() < 1e-12);
        assert!((id.zeta_sum - 48.0).abs() < 1e-12);
        assert!((id.expected_f - 16.0).abs() < 1e-12);
        assert!((id.expected_sum - 48.0).abs() < 1e-12);
    }

    #[test]
    fn identities_reject_uncentered() {
        let p = [Vector3::E1, Vector3::E2, Vector3::E3, Vector3::ZERO];
        assert!(matches!(tetra_identities(&p), Err(Error::NotCentered(_))));
    }
}
