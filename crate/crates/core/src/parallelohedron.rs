//! Parallelohedra as `P = Σ_{i<j} [o, β_ij (v_i × v_j)]` over a centered tetrahedron.
//!
//! The tetrahedron `v₁..v₄` is normalized so that `Σ v_i = o`, every vertex
//! triple has determinant ±1 and `det(v₁, v₂, v₃) = +1`. Its six cross
//! products are the generator directions of a type (5) body; zeroing some of
//! the nonnegative weights `β_ij` yields the other four types.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{cross, det3, Vector3};
use crate::pairs::{Pair, PairSet, PAIRS};
use crate::symfunc::{f_eval, TauVector};
use crate::zonotope::{zone_lengths, Provenance, QuermassReport, Zonotope, MIN_GENERATOR_LENGTH};

/// Tolerance of the tetrahedron invariants (centering and unit determinants).
pub const TETRA_TOL: f64 = 1e-10;
/// Default classification threshold, relative to the largest weight.
pub const DEFAULT_CLASSIFY_RTOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[Vector3; 4]", into = "[Vector3; 4]")]
pub struct CenteredTetrahedron {
    vertices: [Vector3; 4],
}

impl CenteredTetrahedron {
    /// Accepts vertices that already satisfy the normalization invariants.
    pub fn new(vertices: [Vector3; 4]) -> Result<Self> {
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let t = CenteredTetrahedron { vertices };
        let sum: Vector3 = vertices.iter().copied().sum();
        if sum.norm() > TETRA_TOL {
            return Err(Error::InvalidTetrahedron(format!("vertex sum has norm {:e}", sum.norm())));
        }
        if (t.big_v(1, 2, 3) - 1.0).abs() > TETRA_TOL {
            return Err(Error::InvalidTetrahedron(format!("V123 = {} (must be +1)", t.big_v(1, 2, 3))));
        }
        for (i, j, k) in [(1, 2, 4), (1, 3, 4), (2, 3, 4)] {
            if (t.big_v(i, j, k).abs() - 1.0).abs() > TETRA_TOL {
                return Err(Error::InvalidTetrahedron(format!("|V{i}{j}{k}| = {}", t.big_v(i, j, k).abs())));
            }
        }
        Ok(t)
    }

    /// Recenters, rescales to unit determinants and fixes the orientation.
    ///
    /// Four points are first translated so their centroid is the origin, then
    /// scaled by `|V₁₂₃|^(-1/3)`; if `V₁₂₃` is then negative, `v₁` and `v₂` are swapped.
    pub fn normalize(points: [Vector3; 4]) -> Result<Self> {
        Self::normalize_tracked(points).map(|(t, _)| t)
    }

    /// [`normalize`](Self::normalize), also reporting whether `v₁` and `v₂` were swapped.
    pub fn normalize_tracked(points: [Vector3; 4]) -> Result<(Self, bool)> {
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let centroid = points.iter().copied().sum::<Vector3>() / 4.0;
        let mut v = points.map(|p| p - centroid);
        let scale = v.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let d = det3(v[0], v[1], v[2]);
        if !(d.abs() > 1e-12 * scale.powi(3)) {
            return Err(Error::DegenerateTetrahedron);
        }
        let s = d.abs().cbrt().recip();
        v = v.map(|p| p * s);
        if d < 0.0 {
            v.swap(0, 1);
        }
        Ok((CenteredTetrahedron::new(v)?, d < 0.0))
    }

    pub fn vertices(&self) -> &[Vector3; 4] {
        &self.vertices
    }

    /// Vertex by 1-based label.
    pub fn v(&self, label: usize) -> Vector3 {
        self.vertices[label - 1]
    }

    /// `V_ijk`, the determinant with columns `v_i, v_j, v_k` (1-based labels).
    pub fn big_v(&self, i: usize, j: usize, k: usize) -> f64 {
        det3(self.v(i), self.v(j), self.v(k))
    }

    /// `v_i × v_j` for the pair.
    pub fn pair_cross(&self, p: Pair) -> Vector3 {
        let (i, j) = p.indices();
        cross(self.vertices[i], self.vertices[j])
    }

    /// Volume of `conv{v₁..v₄}`; 2/3 for a normalized tetrahedron.
    pub fn volume(&self) -> f64 {
        let v = &self.vertices;
        det3(v[1] - v[0], v[2] - v[0], v[3] - v[0]).abs() / 6.0
    }

    /// `γ_ij = −⟨v_s, v_t⟩` for `{s, t}` complementary to `{i, j}`.
    pub fn gamma(&self) -> TauVector {
        let mut g = TauVector::default();
        for p in PAIRS {
            let (s, t) = p.complement().indices();
            g[p] = -self.vertices[s].dot(self.vertices[t]);
        }
        g
    }
}

impl TryFrom<[Vector3; 4]> for CenteredTetrahedron {
    type Error = Error;
    fn try_from(v: [Vector3; 4]) -> Result<Self> {
        CenteredTetrahedron::new(v)
    }
}

impl From<CenteredTetrahedron> for [Vector3; 4] {
    fn from(t: CenteredTetrahedron) -> Self {
        t.vertices
    }
}

/// Six nonnegative weights in slot order 12, 13, 14, 23, 24, 34.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 6]", into = "[f64; 6]")]
pub struct BetaWeights([f64; 6]);

impl BetaWeights {
    pub fn new(b: [f64; 6]) -> Result<Self> {
        for &x in &b {
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
            if x < 0.0 {
                return Err(Error::NegativeBeta(x));
            }
        }
        Ok(BetaWeights(b))
    }

    pub fn splat(b: f64) -> Result<Self> {
        Self::new([b; 6])
    }

    pub fn values(&self) -> [f64; 6] {
        self.0
    }

    pub fn as_tau(&self) -> TauVector {
        TauVector(self.0)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.0.map(|b| b * s))
    }

    /// Pairs whose weight is at most `eps`.
    pub fn zero_set(&self, eps: f64) -> PairSet {
        PAIRS.into_iter().filter(|&p| self[p] <= eps).collect()
    }
}

impl Index<Pair> for BetaWeights {
    type Output = f64;
    fn index(&self, p: Pair) -> &f64 {
        &self.0[p.slot()]
    }
}

impl TryFrom<[f64; 6]> for BetaWeights {
    type Error = Error;
    fn try_from(b: [f64; 6]) -> Result<Self> {
        BetaWeights::new(b)
    }
}

impl From<BetaWeights> for [f64; 6] {
    fn from(b: BetaWeights) -> Self {
        b.0
    }
}

/// The five combinatorial types of 3D parallelohedra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParallelohedronType {
    /// parallelepiped
    Type1,
    /// hexagonal prism
    Type2,
    /// rhombic dodecahedron
    Type3,
    /// elongated rhombic dodecahedron
    Type4,
    /// truncated octahedron
    Type5,
    Degenerate,
}

impl ParallelohedronType {
    pub const ALL: [ParallelohedronType; 5] = [
        ParallelohedronType::Type1,
        ParallelohedronType::Type2,
        ParallelohedronType::Type3,
        ParallelohedronType::Type4,
        ParallelohedronType::Type5,
    ];

    pub fn number(self) -> Option<u8> {
        match self {
            ParallelohedronType::Type1 => Some(1),
            ParallelohedronType::Type2 => Some(2),
            ParallelohedronType::Type3 => Some(3),
            ParallelohedronType::Type4 => Some(4),
            ParallelohedronType::Type5 => Some(5),
            ParallelohedronType::Degenerate => None,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get(usize::from(n).wrapping_sub(1)).copied()
    }

    /// A representative zero pattern of the type.
    pub fn zero_pattern(self) -> Option<PairSet> {
        let p = |i, j| Pair::from_labels(i, j).expect("valid labels");
        Some(match self {
            ParallelohedronType::Type5 => PairSet::EMPTY,
            ParallelohedronType::Type4 => PairSet::from_pairs([p(3, 4)]),
            ParallelohedronType::Type3 => PairSet::from_pairs([p(1, 2), p(3, 4)]),
            ParallelohedronType::Type2 => PairSet::from_pairs([p(1, 2), p(1, 3)]),
            ParallelohedronType::Type1 => PairSet::from_pairs([p(1, 4), p(2, 4), p(3, 4)]),
            ParallelohedronType::Degenerate => return None,
        })
    }

    pub fn generator_count(self) -> usize {
        match self {
            ParallelohedronType::Type1 => 3,
            ParallelohedronType::Type2 | ParallelohedronType::Type3 => 4,
            ParallelohedronType::Type4 => 5,
            ParallelohedronType::Type5 => 6,
            ParallelohedronType::Degenerate => 0,
        }
    }

    /// Face count of a generic body of the type.
    pub fn face_count(self) -> usize {
        match self {
            ParallelohedronType::Type1 => 6,
            ParallelohedronType::Type2 => 8,
            ParallelohedronType::Type3 | ParallelohedronType::Type4 => 12,
            ParallelohedronType::Type5 => 14,
            ParallelohedronType::Degenerate => 0,
        }
    }

    /// `(4-belts, 6-belts)` of the type.
    pub fn belt_counts(self) -> BeltCounts {
        let (four, six) = match self {
            ParallelohedronType::Type1 => (3, 0),
            ParallelohedronType::Type2 => (3, 1),
            ParallelohedronType::Type3 => (0, 4),
            ParallelohedronType::Type4 => (1, 4),
            ParallelohedronType::Type5 => (0, 6),
            ParallelohedronType::Degenerate => (0, 0),
        };
        BeltCounts { four, six, other: 0 }
    }
}

/// Generators `β_ij (v_i × v_j)` in slot order; zero weights are dropped.
pub fn build(t: &CenteredTetrahedron, b: &BetaWeights) -> Result<Zonotope> {
    let generators: Vec<Vector3> = PAIRS
        .into_iter()
        .map(|p| t.pair_cross(p) * b[p])
        .filter(|g| g.norm() >= MIN_GENERATOR_LENGTH)
        .collect();
    if generators.is_empty() {
        return Err(Error::EmptyBody);
    }
    Zonotope::new(generators)
}

/// Type from the zero pattern of the weights; entries `≤ eps` count as zero.
pub fn classify(b: &BetaWeights, eps: f64) -> ParallelohedronType {
    let zeros = b.zero_set(eps);
    match zeros.len() {
        0 => ParallelohedronType::Type5,
        1 => ParallelohedronType::Type4,
        2 => {
            let mut it = zeros.iter();
            let (a, c) = (it.next().expect("two"), it.next().expect("two"));
            if a.intersects(c) {
                ParallelohedronType::Type2
            } else {
                ParallelohedronType::Type3
            }
        }
        3 if zeros.complement().common_vertex().is_none() => ParallelohedronType::Type1,
        _ => ParallelohedronType::Degenerate,
    }
}

/// [`classify`] with the threshold `DEFAULT_CLASSIFY_RTOL · max β`.
pub fn classify_default(b: &BetaWeights) -> ParallelohedronType {
    classify(b, DEFAULT_CLASSIFY_RTOL * b.max())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeltCounts {
    pub four: usize,
    pub six: usize,
    /// Generators whose zone is neither a 4- nor a 6-belt.
    #[serde(skip_serializing_if = "is_zero")]
    pub other: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

/// Counts 4-belts and 6-belts of the realized body.
pub fn belts(z: &Zonotope) -> Result<BeltCounts> {
    let mesh = z.realize_hull()?;
    let mut counts = BeltCounts::default();
    for len in zone_lengths(z, &mesh) {
        match len {
            4 => counts.four += 1,
            6 => counts.six += 1,
            _ => counts.other += 1,
        }
    }
    Ok(counts)
}

/// Volume, surface area and mean width from the tetrahedron/β description.
pub fn measures_rep(t: &CenteredTetrahedron, b: &BetaWeights) -> QuermassReport {
    let volume = f_eval(&b.as_tau());

    let mut star = 0.0;
    for vertex in 0..4 {
        let mut s = 0.0;
        let around: Vec<Pair> = PAIRS.into_iter().filter(|p| p.contains(vertex)).collect();
        for x in 0..around.len() {
            for y in x + 1..around.len() {
                s += b[around[x]] * b[around[y]];
            }
        }
        star += s * t.vertices[vertex].norm();
    }
    let mut opposite = 0.0;
    for p in PAIRS.into_iter().take(3) {
        let (i, j) = p.indices();
        opposite += b[p] * b[p.complement()] * (t.vertices[i] + t.vertices[j]).norm();
    }
    let surface_area = 2.0 * (star + opposite);

    let total: f64 = PAIRS.into_iter().map(|p| b[p] * t.pair_cross(p).norm()).sum();
    let mean_width = 0.5 * total;

    let inradius = build(t, b).ok().and_then(|z| z.inradius().ok()).unwrap_or(0.0);
    QuermassReport {
        volume,
        surface_area,
        mean_width,
        second_quermass: 2.0 * std::f64::consts::PI / 3.0 * mean_width,
        inradius,
        provenance: Provenance::BetaRepresentation,
    }
}

/// A body given either by generators or by tetrahedron and weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum BodySpec {
    Generators { generators: Vec<Vector3> },
    Representation { tetrahedron: [Vector3; 4], betas: [f64; 6] },
}

/// A parsed [`BodySpec`]: the zonotope, plus the normalized representation if one was given.
#[derive(Clone, Debug)]
pub struct Body {
    pub zonotope: Zonotope,
    pub representation: Option<(CenteredTetrahedron, BetaWeights)>,
}

impl BodySpec {
    /// Builds the body; a given tetrahedron is normalized first, and the weights
    /// follow the relabeling if the orientation fix swaps `v₁` and `v₂`.
    pub fn resolve(&self) -> Result<Body> {
        match self {
            BodySpec::Generators { generators } => Ok(Body {
                zonotope: Zonotope::new(generators.clone())?,
                representation: None,
            }),
            BodySpec::Representation { tetrahedron, betas } => {
                let (t, swapped) = CenteredTetrahedron::normalize_tracked(*tetrahedron)?;
                let b = BetaWeights::new(*betas)?;
                let b = if swapped { BetaWeights::new(b.as_tau().permuted([1, 0, 2, 3]).0)? } else { b };
                Ok(Body { zonotope: build(&t, &b)?, representation: Some((t, b)) })
            }
        }
    }
}

pub(crate) fn regular_vertices() -> [Vector3; 4] {
    [
        Vector3::new(1.0, 1.0, 1.0),
        Vector3::new(1.0, -1.0, -1.0),
        Vector3::new(-1.0, 1.0, -1.0),
        Vector3::new(-1.0, -1.0, 1.0),
    ]
}
