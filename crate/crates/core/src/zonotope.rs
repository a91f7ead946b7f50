//! Zonotopes given by generator lists and their quermassintegrals.
//!
//! For `Z = Σ [o, v_i]` the volume is the sum of `|det(v_i, v_j, v_k)|` over
//! generator triples, the surface area is twice the sum of `|v_i × v_j|` over
//! pairs, and the mean width is half the total generator length. The second
//! quermassintegral `W₂ = (π/3) Σ |v_i|` carries the same information as the
//! mean width, `w = (3/2π) W₂`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{cross, Vector3};
use crate::hull::{self, PolyMesh, ANGLE_TOL};

/// Shortest admissible generator.
pub const MIN_GENERATOR_LENGTH: f64 = 1e-12;
/// Largest generator count accepted by [`Zonotope::realize_hull`] (2^m candidate points).
pub const MAX_HULL_GENERATORS: usize = 16;
/// Relative threshold on `|det(a,b,c)| / (|a||b||c|)` below which a triple counts as coplanar.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zonotope {
    generators: Vec<Vector3>,
    anchor: Vector3,
}

/// Which formulas produced a [`QuermassReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Determinant, cross-product and length sums over the generator list.
    GeneratorSums,
    /// The cubic form and vertex-star sums over the tetrahedron/β description.
    BetaRepresentation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuermassReport {
    pub volume: f64,
    pub surface_area: f64,
    pub mean_width: f64,
    pub second_quermass: f64,
    pub inradius: f64,
    pub provenance: Provenance,
}

impl Zonotope {
    pub fn new(generators: Vec<Vector3>) -> Result<Self> {
        Self::with_anchor(generators, Vector3::ZERO)
    }

    pub fn with_anchor(generators: Vec<Vector3>, anchor: Vector3) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::NoGenerators);
        }
        anchor.check_finite()?;
        for (i, g) in generators.iter().enumerate() {
            g.check_finite()?;
            if g.norm() < MIN_GENERATOR_LENGTH {
                return Err(Error::ZeroGenerator(i));
            }
        }
        Ok(Zonotope { generators, anchor })
    }

    pub fn generators(&self) -> &[Vector3] {
        &self.generators
    }

    pub fn anchor(&self) -> Vector3 {
        self.anchor
    }

    /// The symmetry center `anchor + ½ Σ v_i`.
    pub fn center(&self) -> Vector3 {
        self.anchor + self.generators.iter().copied().sum::<Vector3>() * 0.5
    }

    /// `λ·Z`, scaling generators and anchor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::with_anchor(self.generators.iter().map(|&g| g * factor).collect(), self.anchor * factor)
    }

    pub fn volume(&self) -> f64 {
        let g = &self.generators;
        let mut total = 0.0;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                let c = cross(g[i], g[j]);
                for k in j + 1..g.len() {
                    total += c.dot(g[k]).abs();
                }
            }
        }
        total
    }

    pub fn surface_area(&self) -> f64 {
        let g = &self.generators;
        let mut total = 0.0;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                total += cross(g[i], g[j]).norm();
            }
        }
        2.0 * total
    }

    fn total_length(&self) -> f64 {
        self.generators.iter().map(|g| g.norm()).sum()
    }

    pub fn mean_width(&self) -> f64 {
        0.5 * self.total_length()
    }

    /// `W₂ = (π/3) Σ |v_i|`.
    pub fn second_quermass(&self) -> f64 {
        PI / 3.0 * self.total_length()
    }

    /// Whether some generator triple is linearly independent.
    pub fn is_full_dimensional(&self) -> bool {
        let g = &self.generators;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                let c = cross(g[i], g[j]);
                for k in j + 1..g.len() {
                    let scale = g[i].norm() * g[j].norm() * g[k].norm();
                    if c.dot(g[k]).abs() > RANK_TOL * scale {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Unit facet normals, one per antipodal pair, deduplicated.
    pub fn facet_normals(&self) -> Vec<Vector3> {
        let g = &self.generators;
        let mut normals: Vec<Vector3> = Vec::new();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                let c = cross(g[i], g[j]);
                if c.norm() <= RANK_TOL * g[i].norm() * g[j].norm() {
                    continue;
                }
                let u = c / c.norm();
                if !normals.iter().any(|n| (*n - u).norm() <= ANGLE_TOL || (*n + u).norm() <= ANGLE_TOL) {
                    normals.push(u);
                }
            }
        }
        normals
    }

    /// Support function of the centered body, `h(u) = ½ Σ |⟨v_k, u⟩|`.
    pub fn centered_support(&self, u: Vector3) -> f64 {
        0.5 * self.generators.iter().map(|g| g.dot(u).abs()).sum::<f64>()
    }

    /// Distance from the symmetry center to the closest facet plane.
    pub fn inradius(&self) -> Result<f64> {
        if !self.is_full_dimensional() {
            return Err(Error::NotFullDimensional);
        }
        Ok(self
            .facet_normals()
            .into_iter()
            .map(|u| self.centered_support(u))
            .fold(f64::INFINITY, f64::min))
    }

    /// All measures at once; a flat body reports inradius 0.
    pub fn report(&self) -> QuermassReport {
        QuermassReport {
            volume: self.volume(),
            surface_area: self.surface_area(),
            mean_width: self.mean_width(),
            second_quermass: self.second_quermass(),
            inradius: self.inradius().unwrap_or(0.0),
            provenance: Provenance::GeneratorSums,
        }
    }

    /// All `2^m` subset sums, shifted so the symmetry center is the origin.
    pub fn vertex_candidates(&self) -> Result<Vec<Vector3>> {
        let m = self.generators.len();
        if m > MAX_HULL_GENERATORS {
            return Err(Error::GeneratorLimitExceeded(m, MAX_HULL_GENERATORS));
        }
        let half = self.generators.iter().copied().sum::<Vector3>() * 0.5;
        Ok((0u32..1 << m)
            .map(|mask| {
                let mut p = -half;
                for (bit, g) in self.generators.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        p += *g;
                    }
                }
                p
            })
            .collect())
    }

    /// Polygon mesh of the body, centered at its symmetry center.
    pub fn realize_hull(&self) -> Result<PolyMesh> {
        if self.generators.len() > MAX_HULL_GENERATORS {
            return Err(Error::GeneratorLimitExceeded(self.generators.len(), MAX_HULL_GENERATORS));
        }
        if !self.is_full_dimensional() {
            return Err(Error::NotFullDimensional);
        }
        hull::convex_hull(&self.vertex_candidates()?)
    }
}

/// Belt (zone) length of every generator: the number of mesh faces having an
/// edge parallel to it.
pub fn zone_lengths(z: &Zonotope, mesh: &PolyMesh) -> Vec<usize> {
    z.generators()
        .iter()
        .map(|g| {
            let dir = *g / g.norm();
            mesh.faces
                .iter()
                .filter(|face| {
                    (0..face.len()).any(|k| {
                        let e = mesh.vertices[face[(k + 1) % face.len()]] - mesh.vertices[face[k]];
                        cross(e, dir).norm() <= 1e-8 * e.norm()
                    })
                })
                .count()
        })
        .collect()
}

/// Subset-sum hull oracle: the volume/area of the realized mesh, for cross-checks.
pub fn hull_measures(z: &Zonotope) -> Result<(f64, f64)> {
    let mesh = z.realize_hull()?;
    Ok((mesh.signed_volume(), mesh.surface_area()))
}

/// The six generators of the regular truncated octahedron of edge `a`:
/// the directions joining midpoints of opposite cube edges.
pub fn truncated_octahedron_generators(edge: f64) -> Vec<Vector3> {
    let s = edge / 2f64.sqrt();
    [
        Vector3::new(1.0, 1.0, 0.0),
        Vector3::new(1.0, -1.0, 0.0),
        Vector3::new(1.0, 0.0, 1.0),
        Vector3::new(1.0, 0.0, -1.0),
        Vector3::new(0.0, 1.0, 1.0),
        Vector3::new(0.0, 1.0, -1.0),
    ]
    .into_iter()
    .map(|v| v * s)
    .collect()
}

/// The four generators of the regular rhombic dodecahedron of edge `a`: the cube diagonals.
pub fn rhombic_dodecahedron_generators(edge: f64) -> Vec<Vector3> {
    let s = edge / 3f64.sqrt();
    [
        Vector3::new(1.0, 1.0, 1.0),
        Vector3::new(1.0, -1.0, -1.0),
        Vector3::new(-1.0, 1.0, -1.0),
        Vector3::new(-1.0, -1.0, 1.0),
    ]
    .into_iter()
    .map(|v| v * s)
    .collect()
}

pub fn cube_generators(edge: f64) -> Vec<Vector3> {
    vec![Vector3::E1 * edge, Vector3::E2 * edge, Vector3::E3 * edge]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Zonotope {
        Zonotope::new(cube_generators(1.0)).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1.0)
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Zonotope::new(vec![]), Err(Error::NoGenerators));
        assert_eq!(Zonotope::new(vec![Vector3::E1, Vector3::ZERO]), Err(Error::ZeroGenerator(1)));
        assert_eq!(Zonotope::new(vec![Vector3::new(f64::NAN, 0.0, 1.0)]), Err(Error::NonFinite));
    }

    #[test]
    fn volume_examples() {
        assert_eq!(cube().volume(), 1.0);
        assert_eq!(Zonotope::new(vec![Vector3::E1, Vector3::E2]).unwrap().volume(), 0.0);
        let to = Zonotope::new(truncated_octahedron_generators(2f64.powf(-7.0 / 6.0))).unwrap();
        assert!(close(to.volume(), 1.0, 1e-14), "{}", to.volume());
    }

    #[test]
    fn surface_area_examples() {
        assert_eq!(cube().surface_area(), 6.0);
        assert_eq!(Zonotope::new(vec![Vector3::new(1.0, 2.0, 3.0)]).unwrap().surface_area(), 0.0);
        let a = 0.7;
        let to = Zonotope::new(truncated_octahedron_generators(a)).unwrap();
        let expected = (6.0 + 12.0 * 3f64.sqrt()) * a * a;
        assert!(close(to.surface_area(), expected, 1e-14));
        let mesh = to.realize_hull().unwrap();
        assert!(close(mesh.surface_area(), expected, 1e-12));
    }

    #[test]
    fn mean_width_examples() {
        let c = cube();
        assert_eq!(c.mean_width(), 1.5);
        assert!((c.mean_width() - 3.0 / (2.0 * PI) * c.second_quermass()).abs() < 1e-15);
        let seg = Zonotope::new(vec![Vector3::new(0.0, 3.0, 4.0)]).unwrap();
        assert_eq!(seg.mean_width(), 2.5);
        let to = Zonotope::new(truncated_octahedron_generators(2f64.powf(-7.0 / 6.0))).unwrap();
        assert!(close(to.mean_width(), 3.0 * 2f64.powf(-7.0 / 6.0), 1e-15));
        assert!((to.mean_width() - 1.33635).abs() < 1e-5);
    }

    #[test]
    fn inradius_examples() {
        assert!((cube().inradius().unwrap() - 0.5).abs() < 1e-15);
        let c2 = Zonotope::new(cube_generators(2.0)).unwrap();
        assert!((c2.inradius().unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(c2.mean_width(), 3.0);

        let rd = Zonotope::new(rhombic_dodecahedron_generators(1.0)).unwrap();
        let rd1 = rd.scaled(1.0 / rd.inradius().unwrap()).unwrap();
        assert!((rd1.inradius().unwrap() - 1.0).abs() < 1e-14);
        assert!((rd1.mean_width() - 6f64.sqrt()).abs() < 1e-12);

        let planar = Zonotope::new(vec![Vector3::E1, Vector3::E2, Vector3::new(1.0, 1.0, 0.0)]).unwrap();
        assert_eq!(planar.inradius(), Err(Error::NotFullDimensional));
    }

    #[test]
    fn hull_combinatorics() {
        let m = cube().realize_hull().unwrap();
        assert_eq!((m.vertex_count(), m.face_count()), (8, 6));

        let to = Zonotope::new(truncated_octahedron_generators(1.0)).unwrap().realize_hull().unwrap();
        assert_eq!((to.vertex_count(), to.face_count()), (24, 14));
        let hexagons = to.faces.iter().filter(|f| f.len() == 6).count();
        let squares = to.faces.iter().filter(|f| f.len() == 4).count();
        assert_eq!((hexagons, squares), (8, 6));

        let rd = Zonotope::new(rhombic_dodecahedron_generators(1.0)).unwrap().realize_hull().unwrap();
        assert_eq!((rd.vertex_count(), rd.face_count()), (14, 12));
        assert!(rd.faces.iter().all(|f| f.len() == 4));
        for mesh in [&m, &to, &rd] {
            assert_eq!(mesh.euler_characteristic(), 2);
            assert!(mesh.faces_convex());
            assert!(mesh.max_planarity_error() < 1e-12);
        }
    }

    #[test]
    fn hull_errors() {
        let planar = Zonotope::new(vec![Vector3::E1, Vector3::E2]).unwrap();
        assert_eq!(planar.realize_hull(), Err(Error::NotFullDimensional));
        let many = Zonotope::new(vec![Vector3::E1; 17]).unwrap();
        assert_eq!(many.realize_hull(), Err(Error::GeneratorLimitExceeded(17, 16)));
    }

    #[test]
    fn hull_is_centered() {
        let z = Zonotope::with_anchor(cube_generators(1.0), Vector3::new(5.0, 5.0, 5.0)).unwrap();
        let m = z.realize_hull().unwrap();
        let c = m.vertices.iter().copied().sum::<Vector3>() / m.vertex_count() as f64;
        assert!(c.norm() < 1e-15);
        assert_eq!(z.center(), Vector3::new(5.5, 5.5, 5.5));
    }

    #[test]
    fn parallel_generators_merge_zones() {
        let z = Zonotope::new(vec![Vector3::E1, Vector3::E1 * 2.0, Vector3::E2, Vector3::E3]).unwrap();
        let m = z.realize_hull().unwrap();
        assert_eq!((m.vertex_count(), m.face_count()), (8, 6));
        assert!((m.signed_volume() - z.volume()).abs() < 1e-14);
        assert_eq!(z.facet_normals().len(), 3);
        assert!((z.inradius().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn belt_lengths_of_cube() {
        let z = cube();
        let m = z.realize_hull().unwrap();
        assert_eq!(zone_lengths(&z, &m), vec![4, 4, 4]);
    }
}
