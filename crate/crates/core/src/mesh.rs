//! Triangle meshes, ASCII OBJ input/output and adjacency construction.

use std::io::{BufRead, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Vertex positions (`n x 3`) plus triangles as vertex-index triples.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Array2<f64>,
    faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn new(vertices: Array2<f64>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.ncols() != 3 {
            return Err(Error::arg(format!(
                "vertices must be n x 3, got {} columns",
                vertices.ncols()
            )));
        }
        let n = vertices.nrows();
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&v| v >= n) {
                return Err(Error::Topology(format!(
                    "face {fi} references vertex {bad} but the mesh has {n} vertices"
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Topology(format!("face {fi} repeats a vertex: {f:?}")));
            }
        }
        Ok(Self { vertices, faces })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.nrows()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> &Array2<f64> {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn position(&self, v: usize) -> [f64; 3] {
        [
            self.vertices[[v, 0]],
            self.vertices[[v, 1]],
            self.vertices[[v, 2]],
        ]
    }

    /// Same faces, new positions.
    pub fn with_vertices(&self, vertices: Array2<f64>) -> Result<Self> {
        if vertices.dim() != self.vertices.dim() {
            return Err(Error::arg(format!(
                "expected {:?} vertex array, got {:?}",
                self.vertices.dim(),
                vertices.dim()
            )));
        }
        Ok(Self {
            vertices,
            faces: self.faces.clone(),
        })
    }

    pub fn read_obj<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut coords = Vec::new();
        let mut faces = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let mut toks = line.split_whitespace();
            match toks.next() {
                Some("v") => {
                    let xyz: Vec<f64> = toks
                        .take(3)
                        .map(str::parse)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e: std::num::ParseFloatError| {
                            Error::parse(origin, lineno, e.to_string())
                        })?;
                    if xyz.len() != 3 {
                        return Err(Error::parse(origin, lineno, "vertex needs 3 coordinates"));
                    }
                    coords.extend(xyz);
                }
                Some("f") => {
                    let idx: Vec<usize> = toks
                        .map(|t| {
                            let head = t.split('/').next().unwrap_or(t);
                            match head.parse::<usize>() {
                                Ok(k) if k >= 1 => Ok(k - 1),
                                _ => Err(Error::parse(
                                    origin,
                                    lineno,
                                    format!("bad face index `{t}` (1-based positive indices only)"),
                                )),
                            }
                        })
                        .collect::<Result<_>>()?;
                    let [a, b, c] = idx[..] else {
                        return Err(Error::parse(
                            origin,
                            lineno,
                            format!("only triangles are supported, got {} indices", idx.len()),
                        ));
                    };
                    faces.push([a, b, c]);
                }
                _ => {}
            }
        }
        let n = coords.len() / 3;
        let vertices = Array2::from_shape_vec((n, 3), coords).expect("3 coords per vertex");
        Mesh::new(vertices, faces)
    }

    pub fn write_obj<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.vertices.rows() {
            writeln!(w, "v {} {} {}", row[0], row[1], row[2])?;
        }
        for f in &self.faces {
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }

    pub fn load_obj(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_obj(std::io::BufReader::new(f), path)
    }

    pub fn save_obj(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_obj(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Undirected edges `(lo, hi)` with `lo < hi`, sorted and deduplicated.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

/// Binary, symmetric vertex adjacency: `A[i][j] = 1` iff `i` and `j` share a face edge.
pub fn build_adjacency(mesh: &Mesh) -> Result<SparseMatrix> {
    let n = mesh.num_vertices();
    // Mesh::new already validated indices; re-check for meshes built by hand elsewhere.
    if let Some(f) = mesh.faces().iter().find(|f| f.iter().any(|&v| v >= n)) {
        return Err(Error::Topology(format!("face {f:?} out of range for {n} vertices")));
    }
    let triplets = mesh
        .edges()
        .into_iter()
        .flat_map(|(a, b)| [(a, b, 1.0), (b, a, 1.0)]);
    SparseMatrix::from_triplets(n, n, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    pub(crate) fn tetrahedron() -> Mesh {
        Mesh::new(
            array![[0., 0., 0.], [1., 0., 0.], [0., 1., 0.], [0., 0., 1.]],
            vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn rejects_out_of_range_and_repeated_indices() {
        let v = array![[0., 0., 0.], [1., 0., 0.], [0., 1., 0.]];
        assert!(matches!(
            Mesh::new(v.clone(), vec![[0, 1, 3]]),
            Err(Error::Topology(_))
        ));
        assert!(matches!(
            Mesh::new(v, vec![[0, 1, 1]]),
            Err(Error::Topology(_))
        ));
    }

    #[test]
    fn single_triangle_is_complete_graph() {
        let m = Mesh::new(
            array![[0., 0., 0.], [1., 0., 0.], [0., 1., 0.]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let a = build_adjacency(&m).unwrap().to_dense();
        assert_eq!(a, array![[0., 1., 1.], [1., 0., 1.], [1., 1., 0.]]);
    }

    #[test]
    fn lone_vertex_has_zero_adjacency() {
        let m = Mesh::new(array![[1., 2., 3.]], vec![]).unwrap();
        let a = build_adjacency(&m).unwrap();
        assert_eq!(a.shape(), (1, 1));
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn tetrahedron_is_k4() {
        let a = build_adjacency(&tetrahedron()).unwrap();
        assert!(a.is_symmetric());
        for i in 0..4 {
            assert_eq!(a.get(i, i), 0.0);
            assert_eq!(a.row(i).count(), 3);
            assert!(a.row(i).all(|(_, v)| v == 1.0));
        }
    }

    #[test]
    fn duplicate_faces_give_a_single_entry() {
        let m = Mesh::new(
            array![[0., 0., 0.], [1., 0., 0.], [0., 1., 0.]],
            vec![[0, 1, 2], [2, 1, 0], [0, 1, 2]],
        )
        .unwrap();
        let a = build_adjacency(&m).unwrap();
        assert_eq!(a.nnz(), 6);
        assert!(a.triplets().all(|(_, _, v)| v == 1.0));
    }

    #[test]
    fn obj_round_trip_is_exact() {
        let m = Mesh::new(
            array![[0.1, -2.5, 1.0 / 3.0], [1e-17, 0., 7.0], [0., 1., 0.]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let mut buf = Vec::new();
        m.write_obj(&mut buf).unwrap();
        let back = Mesh::read_obj(&buf[..], Path::new("mem.obj")).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn obj_accepts_slash_indices_and_rejects_quads() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1/1/1 2/2/2 3/3/3\n";
        let m = Mesh::read_obj(text.as_bytes(), Path::new("a.obj")).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2]]);
        let quad = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 4 3\n";
        assert!(Mesh::read_obj(quad.as_bytes(), Path::new("q.obj")).is_err());
    }
}
