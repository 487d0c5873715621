//! Per-vertex quadric error matrices.

use nalgebra::{Matrix4, Vector3, Vector4};

use crate::mesh::Mesh;

/// Sum of `p p^T` over the unit-normal planes `p = (a, b, c, d)` of the faces
/// incident to a vertex. `v^T Q v` with `v = (x, y, z, 1)` is the sum of
/// squared distances from `(x, y, z)` to those planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexQuadric {
    pub q: Matrix4<f64>,
}

impl Default for VertexQuadric {
    fn default() -> Self {
        Self {
            q: Matrix4::zeros(),
        }
    }
}

impl VertexQuadric {
    /// Quadric of the plane through a triangle; zero for degenerate triangles.
    pub fn from_triangle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> Self {
        let (a, b, c) = (Vector3::from(a), Vector3::from(b), Vector3::from(c));
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        if len == 0.0 || !len.is_finite() {
            return Self::default();
        }
        let n = n / len;
        let p = Vector4::new(n.x, n.y, n.z, -n.dot(&a));
        Self { q: p * p.transpose() }
    }

    pub fn error(&self, point: [f64; 3]) -> f64 {
        let v = Vector4::new(point[0], point[1], point[2], 1.0);
        (v.transpose() * self.q * v)[0]
    }
}

impl std::ops::Add for VertexQuadric {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { q: self.q + rhs.q }
    }
}

impl std::ops::AddAssign for VertexQuadric {
    fn add_assign(&mut self, rhs: Self) {
        self.q += rhs.q;
    }
}

pub fn compute_vertex_quadrics(mesh: &Mesh) -> Vec<VertexQuadric> {
    let mut quadrics = vec![VertexQuadric::default(); mesh.num_vertices()];
    for f in mesh.faces() {
        let k = VertexQuadric::from_triangle(
            mesh.position(f[0]),
            mesh.position(f[1]),
            mesh.position(f[2]),
        );
        for &v in f {
            quadrics[v] += k;
        }
    }
    quadrics
}
