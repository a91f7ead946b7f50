//! Convex hulls of point clouds as polygon meshes with merged coplanar facets.
//!
//! The hull is built by gift wrapping: a first supporting facet is found by
//! rotating a plane around a tangent line, then every facet edge is pivoted to
//! reach the neighbouring facet. Points within the plane tolerance of a
//! supporting plane all belong to the same (merged) facet, so the result has
//! one polygon per geometric facet rather than a triangulation.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::{cross, det3, Vector3};

/// Relative tolerance for plane membership and collinearity.
pub const PLANE_TOL: f64 = 1e-8;
/// Angular tolerance when two facet normals are considered equal.
pub const ANGLE_TOL: f64 = 1e-8;

/// A polygon mesh; faces are vertex-index cycles, counterclockwise seen from outside.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMesh {
    pub vertices: Vec<Vector3>,
    pub faces: Vec<Vec<usize>>,
}

impl PolyMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.faces.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    fn face_points(&self, f: usize) -> impl Iterator<Item = Vector3> + '_ {
        self.faces[f].iter().map(|&i| self.vertices[i])
    }

    /// Newell normal scaled by twice the polygon area.
    fn face_area_vector(&self, f: usize) -> Vector3 {
        let face = &self.faces[f];
        let mut n = Vector3::ZERO;
        for (k, &i) in face.iter().enumerate() {
            let a = self.vertices[i];
            let b = self.vertices[face[(k + 1) % face.len()]];
            n += cross(a, b);
        }
        n
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_area_vector(f).norm()
    }

    /// Outward unit normal of face `f`.
    pub fn face_normal(&self, f: usize) -> Vector3 {
        self.face_area_vector(f).normalized().unwrap_or(Vector3::ZERO)
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.face_count()).map(|f| self.face_area(f)).sum()
    }

    /// Signed volume by the divergence theorem; positive for outward orientation.
    pub fn signed_volume(&self) -> f64 {
        let mut v = 0.0;
        for face in &self.faces {
            let p0 = self.vertices[face[0]];
            for k in 1..face.len() - 1 {
                v += det3(p0, self.vertices[face[k]], self.vertices[face[k + 1]]);
            }
        }
        v / 6.0
    }

    /// Every undirected edge is used exactly once in each direction.
    pub fn is_closed(&self) -> bool {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for face in &self.faces {
            for k in 0..face.len() {
                *directed.entry((face[k], face[(k + 1) % face.len()])).or_default() += 1;
            }
        }
        directed
            .iter()
            .all(|(&(a, b), &count)| count == 1 && directed.get(&(b, a)) == Some(&1))
    }

    /// Largest distance of a face vertex from its face's best-fit plane.
    pub fn max_planarity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for f in 0..self.face_count() {
            let n = self.face_normal(f);
            let count = self.faces[f].len() as f64;
            let offset = self.face_points(f).map(|p| p.dot(n)).sum::<f64>() / count;
            for p in self.face_points(f) {
                worst = worst.max((p.dot(n) - offset).abs());
            }
        }
        worst
    }

    /// All faces are strictly convex polygons (no reflex or straight corners).
    pub fn faces_convex(&self) -> bool {
        (0..self.face_count()).all(|f| {
            let face = &self.faces[f];
            let n = self.face_normal(f);
            (0..face.len()).all(|k| {
                let a = self.vertices[face[k]];
                let b = self.vertices[face[(k + 1) % face.len()]];
                let c = self.vertices[face[(k + 2) % face.len()]];
                cross(b - a, c - b).dot(n) > 0.0
            })
        })
    }

    /// Direction vectors of every edge, one per undirected edge.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for face in &self.faces {
            for k in 0..face.len() {
                let (a, b) = (face[k], face[(k + 1) % face.len()]);
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Serializes to the OFF text format.
    pub fn to_off(&self) -> String {
        let mut s = String::new();
        s.push_str("OFF\n");
        let _ = writeln!(s, "{} {} {}", self.vertex_count(), self.face_count(), self.edge_count());
        for v in &self.vertices {
            let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
        }
        for face in &self.faces {
            let _ = write!(s, "{}", face.len());
            for i in face {
                let _ = write!(s, " {i}");
            }
            s.push('\n');
        }
        s
    }

    /// Parses the OFF text format (as written by [`PolyMesh::to_off`]).
    pub fn from_off(text: &str) -> Result<PolyMesh> {
        let bad = |msg: &str| Error::Hull(format!("malformed OFF: {msg}"));
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        if lines.next() != Some("OFF") {
            return Err(bad("missing header"));
        }
        let counts: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("missing counts"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad count")))
            .collect::<Result<_>>()?;
        if counts.len() != 3 {
            return Err(bad("expected V F E"));
        }
        let mut vertices = Vec::with_capacity(counts[0]);
        for _ in 0..counts[0] {
            let c: Vec<f64> = lines
                .next()
                .ok_or_else(|| bad("truncated vertices"))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("bad coordinate")))
                .collect::<Result<_>>()?;
            if c.len() != 3 {
                return Err(bad("vertex needs 3 coordinates"));
            }
            vertices.push(Vector3::new(c[0], c[1], c[2]));
        }
        let mut faces = Vec::with_capacity(counts[1]);
        for _ in 0..counts[1] {
            let ids: Vec<usize> = lines
                .next()
                .ok_or_else(|| bad("truncated faces"))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("bad index")))
                .collect::<Result<_>>()?;
            if ids.is_empty() || ids[0] + 1 != ids.len() || ids[1..].iter().any(|&i| i >= vertices.len()) {
                return Err(bad("bad face record"));
            }
            faces.push(ids[1..].to_vec());
        }
        Ok(PolyMesh { vertices, faces })
    }
}

#[derive(Clone, Copy, Debug)]
struct Plane {
    normal: Vector3,
    offset: f64,
}

struct Wrapper<'a> {
    points: &'a [Vector3],
    centroid: Vector3,
    scale: f64,
    tol: f64,
}

impl Wrapper<'_> {
    /// Rotates the supporting plane with outward normal `normal` about the line
    /// through `a` with direction `e` until it meets the point cloud again.
    fn pivot(&self, a: Vector3, e: Vector3, normal: Vector3) -> Option<Plane> {
        let q = cross(normal, e);
        let mut best: Option<(f64, f64, Vector3)> = None;
        for &p in self.points {
            let mut r = p - a;
            r -= e * r.dot(e);
            let len = r.norm();
            if len <= self.tol {
                continue;
            }
            let mut y = r.dot(normal).min(0.0);
            if y > -self.tol {
                y = 0.0;
            }
            let angle = y.atan2(r.dot(q));
            best = match best {
                Some((ba, bl, br)) if angle > ba + 1e-12 || (angle > ba - 1e-12 && len <= bl) => Some((ba, bl, br)),
                _ => Some((angle, len, r)),
            };
        }
        let (_, _, r) = best?;
        let mut n = cross(e, r).normalized()?;
        if n.dot(self.centroid - a) > 0.0 {
            n = -n;
        }
        Some(Plane { normal: n, offset: n.dot(a) })
    }

    fn on_plane(&self, plane: &Plane) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&i| (self.points[i].dot(plane.normal) - plane.offset).abs() <= self.tol)
            .collect()
    }

    /// CCW polygon (seen from outside) of the points on `plane`, collinear
    /// points removed. `None` if the points do not span a polygon.
    fn polygon(&self, plane: &Plane) -> Option<Vec<usize>> {
        let ids = self.on_plane(plane);
        if ids.len() < 3 {
            return None;
        }
        let n = plane.normal;
        let helper = if n.x.abs() < 0.9 { Vector3::E1 } else { Vector3::E2 };
        let u = cross(n, helper).normalized()?;
        let w = cross(n, u);
        let mut pts: Vec<(f64, f64, usize)> = ids
            .iter()
            .map(|&i| (self.points[i].dot(u), self.points[i].dot(w), i))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let turn = |o: &(f64, f64, usize), a: &(f64, f64, usize), b: &(f64, f64, usize)| {
            (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
        };
        let eps = self.tol * self.scale;
        let mut hull: Vec<(f64, f64, usize)> = Vec::with_capacity(pts.len() * 2);
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &(f64, f64, usize)>> =
                if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
            for p in iter {
                while hull.len() >= start + 2 && turn(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= eps {
                    hull.pop();
                }
                hull.push(*p);
            }
            hull.pop();
        }
        // u × w = n, so counterclockwise in (u, w) is counterclockwise from outside.
        (hull.len() >= 3).then(|| hull.into_iter().map(|p| p.2).collect())
    }

    /// Plane through the polygon, refit from its vertices.
    fn refit(&self, polygon: &[usize]) -> Option<Plane> {
        let mut n = Vector3::ZERO;
        for k in 0..polygon.len() {
            n += cross(self.points[polygon[k]], self.points[polygon[(k + 1) % polygon.len()]]);
        }
        let n = n.normalized()?;
        let offset = polygon.iter().map(|&i| self.points[i].dot(n)).sum::<f64>() / polygon.len() as f64;
        Some(Plane { normal: n, offset })
    }

    fn first_facet(&self) -> Result<(Plane, Vec<usize>)> {
        let fail = || Error::NotFullDimensional;
        let a_idx = (0..self.points.len())
            .min_by(|&i, &j| {
                let (p, q) = (self.points[i], self.points[j]);
                p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)).then(p.z.total_cmp(&q.z))
            })
            .ok_or_else(fail)?;
        let a = self.points[a_idx];
        let plane = self.pivot(a, Vector3::E3, -Vector3::E1).ok_or_else(fail)?;
        if let Some(poly) = self.polygon(&plane) {
            return Ok((plane, poly));
        }
        // The plane touches an edge only: pivot about that edge.
        let ids = self.on_plane(&plane);
        let far = ids
            .iter()
            .copied()
            .max_by(|&i, &j| (self.points[i] - a).norm().total_cmp(&(self.points[j] - a).norm()))
            .ok_or_else(fail)?;
        let e = (self.points[far] - a).normalized().ok_or_else(fail)?;
        let plane = self.pivot(a, e, plane.normal).ok_or_else(fail)?;
        let poly = self.polygon(&plane).ok_or_else(fail)?;
        Ok((plane, poly))
    }
}

fn dedupe(points: &[Vector3], tol: f64) -> Vec<Vector3> {
    let mut sorted: Vec<Vector3> = points.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut out: Vec<Vector3> = Vec::with_capacity(sorted.len());
    for p in sorted {
        let duplicate = out
            .iter()
            .rev()
            .take_while(|q| p.x - q.x <= tol)
            .any(|q| (p - *q).norm() <= tol);
        if !duplicate {
            out.push(p);
        }
    }
    out
}

/// Convex hull of a 3D point cloud with coplanar facets merged.
pub fn convex_hull(points: &[Vector3]) -> Result<PolyMesh> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    if points.len() < 4 {
        return Err(Error::NotFullDimensional);
    }
    let centroid = points.iter().copied().sum::<Vector3>() / points.len() as f64;
    let scale = points.iter().map(|p| (*p - centroid).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::NotFullDimensional);
    }
    let tol = PLANE_TOL * scale;
    let cloud = dedupe(points, tol);
    let centroid = cloud.iter().copied().sum::<Vector3>() / cloud.len() as f64;
    let wrapper = Wrapper { points: &cloud, centroid, scale, tol };

    let (first_plane, first_poly) = wrapper.first_facet()?;
    if first_plane.normal.dot(centroid) - first_plane.offset > -tol {
        return Err(Error::NotFullDimensional);
    }

    let key = |poly: &[usize]| {
        let mut k = poly.to_vec();
        k.sort_unstable();
        k
    };
    let mut facets: Vec<(Plane, Vec<usize>)> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let first_plane = wrapper.refit(&first_poly).unwrap_or(first_plane);
    index.insert(key(&first_poly), 0);
    facets.push((first_plane, first_poly));
    let mut queue = VecDeque::from([0usize]);
    let face_limit = 4 * cloud.len() + 8;

    while let Some(f) = queue.pop_front() {
        let (plane, poly) = facets[f].clone();
        for k in 0..poly.len() {
            let (a, b) = (cloud[poly[k]], cloud[poly[(k + 1) % poly.len()]]);
            let e = (b - a).normalized().ok_or_else(|| Error::Hull("zero-length edge".into()))?;
            let next = wrapper
                .pivot(a, e, plane.normal)
                .ok_or_else(|| Error::Hull("pivot found no supporting plane".into()))?;
            let next_poly = wrapper
                .polygon(&next)
                .ok_or_else(|| Error::Hull("pivot plane is not a facet".into()))?;
            let k2 = key(&next_poly);
            if index.contains_key(&k2) {
                continue;
            }
            if facets
                .iter()
                .any(|(p, _)| (p.normal - next.normal).norm() <= ANGLE_TOL && (p.offset - next.offset).abs() <= tol)
            {
                continue;
            }
            if facets.len() >= face_limit {
                return Err(Error::Hull("facet enumeration did not terminate".into()));
            }
            let refined = wrapper.refit(&next_poly).unwrap_or(next);
            index.insert(k2, facets.len());
            facets.push((refined, next_poly));
            queue.push_back(facets.len() - 1);
        }
    }

    // Compact to the vertices actually used.
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut used: Vec<usize> = facets.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    used.sort_unstable();
    used.dedup();
    for i in used {
        remap.insert(i, vertices.len());
        vertices.push(cloud[i]);
    }
    let faces = facets
        .into_iter()
        .map(|(_, poly)| poly.into_iter().map(|i| remap[&i]).collect())
        .collect();
    let mesh = PolyMesh { vertices, faces };
    if !mesh.is_closed() {
        return Err(Error::Hull("facet cycles do not close into a surface".into()));
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_points() -> Vec<Vector3> {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(Vector3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
        }
        pts
    }

    #[test]
    fn cube_hull() {
        let mesh = convex_hull(&cube_points()).unwrap();
        assert_eq!(mesh.vertex_count(), 8);
        assert_eq!(mesh.face_count(), 6);
        assert_eq!(mesh.edge_count(), 12);
        assert!((mesh.signed_volume() - 1.0).abs() < 1e-14);
        assert!((mesh.surface_area() - 6.0).abs() < 1e-14);
        assert!(mesh.faces_convex());
    }

    #[test]
    fn interior_and_face_points_are_dropped() {
        let mut pts = cube_points();
        pts.push(Vector3::new(0.5, 0.5, 0.5));
        pts.push(Vector3::new(0.5, 0.5, 1.0));
        pts.push(Vector3::new(0.5, 0.0, 0.0));
        pts.push(Vector3::new(1.0, 1.0, 1.0));
        let mesh = convex_hull(&pts).unwrap();
        assert_eq!((mesh.vertex_count(), mesh.face_count()), (8, 6));
    }

    #[test]
    fn tetrahedron_hull() {
        let pts = [Vector3::ZERO, Vector3::E1, Vector3::E2, Vector3::E3];
        let mesh = convex_hull(&pts).unwrap();
        assert_eq!((mesh.vertex_count(), mesh.face_count()), (4, 4));
        assert!((mesh.signed_volume() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn planar_cloud_rejected() {
        let pts = [Vector3::ZERO, Vector3::E1, Vector3::E2, Vector3::new(1.0, 1.0, 0.0)];
        assert_eq!(convex_hull(&pts), Err(Error::NotFullDimensional));
        assert_eq!(convex_hull(&pts[..3]), Err(Error::NotFullDimensional));
    }

    #[test]
    fn off_roundtrip() {
        let mesh = convex_hull(&cube_points()).unwrap();
        let text = mesh.to_off();
        assert!(text.starts_with("OFF\n8 6 12\n"));
        let back = PolyMesh::from_off(&text).unwrap();
        assert_eq!(back, mesh);
        assert!(PolyMesh::from_off("OF\n").is_err());
        assert!(PolyMesh::from_off("OFF\n1 1 0\n0 0 0\n3 0 1 2\n").is_err());
    }
}
