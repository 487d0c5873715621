//! Mesh pyramid with per-level scaled Laplacians and sampling operators.

use std::path::Path;

use crate::error::{Error, Result};
use crate::laplacian::{PowerIteration, ScaledLaplacian};
use crate::mesh::Mesh;
use crate::sampling::{build_upsampling, decimate, DownsampleMatrix, UpsampleMatrix};
use crate::sparse::SparseMatrix;

/// Level 0 is the template; `down[k]` maps level `k` to `k + 1` and `up[k]`
/// maps level `k + 1` back to `k`.
#[derive(Debug, Clone)]
pub struct MeshHierarchy {
    meshes: Vec<Mesh>,
    laplacians: Vec<ScaledLaplacian>,
    down: Vec<DownsampleMatrix>,
    up: Vec<UpsampleMatrix>,
    down_t: Vec<SparseMatrix>,
    up_t: Vec<SparseMatrix>,
}

/// Vertex counts for `num_levels` successive reductions by `ceil(n / 4)`.
pub fn level_counts(n: usize, num_levels: usize) -> Vec<usize> {
    std::iter::successors(Some(n), |&c| Some(c.div_ceil(4)))
        .take(num_levels + 1)
        .collect()
}

/// Pyramid whose level `k + 1` has `ceil(n_k / 4)` vertices.
pub fn build_hierarchy(template: &Mesh, num_levels: usize) -> Result<MeshHierarchy> {
    let n = template.num_vertices();
    let needed = 4usize
        .checked_pow(num_levels as u32)
        .ok_or_else(|| Error::arg("too many levels"))?;
    if n < needed {
        return Err(Error::arg(format!(
            "{num_levels} levels need at least {needed} template vertices, got {n}"
        )));
    }
    build_hierarchy_with_counts(template, &level_counts(n, num_levels))
}

/// Pyramid with explicit, strictly decreasing vertex counts (`counts[0]` must
/// be the template size).
pub fn build_hierarchy_with_counts(template: &Mesh, counts: &[usize]) -> Result<MeshHierarchy> {
    if counts.first() != Some(&template.num_vertices()) {
        return Err(Error::arg("first level count must equal the template size"));
    }
    if counts.windows(2).any(|w| w[1] >= w[0] || w[1] == 0) {
        return Err(Error::arg(format!(
            "level counts must strictly decrease and stay positive: {counts:?}"
        )));
    }
    let mut meshes = vec![template.clone()];
    let mut down = Vec::new();
    let mut up = Vec::new();
    for &target in &counts[1..] {
        let fine = meshes.last().expect("non-empty");
        let (coarse, qd) = decimate(fine, target)?;
        let qu = build_upsampling(fine, &coarse, &qd)?;
        meshes.push(coarse);
        down.push(qd);
        up.push(qu);
    }
    MeshHierarchy::from_parts(meshes, down, up)
}

impl MeshHierarchy {
    pub fn from_parts(
        meshes: Vec<Mesh>,
        down: Vec<DownsampleMatrix>,
        up: Vec<UpsampleMatrix>,
    ) -> Result<Self> {
        if meshes.is_empty() || down.len() + 1 != meshes.len() || up.len() != down.len() {
            return Err(Error::arg("hierarchy needs L + 1 meshes and L sampling pairs"));
        }
        for k in 0..down.len() {
            let (fine, coarse) = (meshes[k].num_vertices(), meshes[k + 1].num_vertices());
            if down[k].matrix.shape() != (coarse, fine) || up[k].matrix.shape() != (fine, coarse) {
                return Err(Error::arg(format!(
                    "sampling matrices at level {k} do not chain: down {:?}, up {:?}",
                    down[k].matrix.shape(),
                    up[k].matrix.shape()
                )));
            }
        }
        let opts = PowerIteration::default();
        let laplacians = meshes
            .iter()
            .map(|m| ScaledLaplacian::from_mesh(m, &opts))
            .collect::<Result<Vec<_>>>()?;
        let down_t = down.iter().map(|d| d.matrix.transpose()).collect();
        let up_t = up.iter().map(|u| u.matrix.transpose()).collect();
        Ok(Self {
            meshes,
            laplacians,
            down,
            up,
            down_t,
            up_t,
        })
    }

    /// Number of down-sampling steps (one less than the number of meshes).
    pub fn num_levels(&self) -> usize {
        self.down.len()
    }

    pub fn vertex_counts(&self) -> Vec<usize> {
        self.meshes.iter().map(Mesh::num_vertices).collect()
    }

    pub fn mesh(&self, level: usize) -> &Mesh {
        &self.meshes[level]
    }

    pub fn laplacian(&self, level: usize) -> &ScaledLaplacian {
        &self.laplacians[level]
    }

    pub fn lambda_max(&self) -> Vec<f64> {
        self.laplacians.iter().map(ScaledLaplacian::lambda_max).collect()
    }

    pub fn down(&self, level: usize) -> &DownsampleMatrix {
        &self.down[level]
    }

    pub fn up(&self, level: usize) -> &UpsampleMatrix {
        &self.up[level]
    }

    pub(crate) fn down_transpose(&self, level: usize) -> &SparseMatrix {
        &self.down_t[level]
    }

    pub(crate) fn up_transpose(&self, level: usize) -> &SparseMatrix {
        &self.up_t[level]
    }

    /// Writes `level_k.obj`, `qd_k.txt` and `qu_k.txt` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (k, m) in self.meshes.iter().enumerate() {
            m.save_obj(&dir.join(format!("level_{k}.obj")))?;
        }
        for k in 0..self.num_levels() {
            self.down[k].matrix.save(&dir.join(format!("qd_{k}.txt")))?;
            self.up[k].matrix.save(&dir.join(format!("qu_{k}.txt")))?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let mut meshes = Vec::new();
        while dir.join(format!("level_{}.obj", meshes.len())).exists() {
            meshes.push(Mesh::load_obj(&dir.join(format!("level_{}.obj", meshes.len())))?);
        }
        if meshes.is_empty() {
            return Err(Error::arg(format!("no level_0.obj in {}", dir.display())));
        }
        let mut down = Vec::new();
        let mut up = Vec::new();
        for k in 0..meshes.len() - 1 {
            let qd = SparseMatrix::load(&dir.join(format!("qd_{k}.txt")))?;
            down.push(DownsampleMatrix::from_matrix(qd)?);
            up.push(UpsampleMatrix {
                matrix: SparseMatrix::load(&dir.join(format!("qu_{k}.txt")))?,
            });
        }
        Self::from_parts(meshes, down, up)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::synth::{dome_template, icosphere};

    #[test]
    fn ceil_rule_reproduces_reference_counts() {
        assert_eq!(level_counts(5023, 4), vec![5023, 1256, 314, 79, 20]);
        assert_eq!(level_counts(256, 4), vec![256, 64, 16, 4, 1]);
        assert_eq!(level_counts(642, 4), vec![642, 161, 41, 11, 3]);
    }

    #[test]
    fn builds_256_vertex_pyramid() {
        let h = build_hierarchy(&dome_template(256).unwrap(), 4).unwrap();
        assert_eq!(h.vertex_counts(), vec![256, 64, 16, 4, 1]);
    }

    #[test]
    fn too_small_template_is_rejected() {
        let m = icosphere(2);
        assert!(matches!(build_hierarchy(&m, 4), Err(Error::Argument(_))));
    }

    #[test]
    fn two_builds_are_identical() {
        let m = icosphere(3);
        let a = build_hierarchy(&m, 4).unwrap();
        let b = build_hierarchy(&m, 4).unwrap();
        for k in 0..a.num_levels() {
            assert_eq!(a.down(k), b.down(k));
            assert_eq!(a.up(k), b.up(k));
        }
        assert_eq!(
            a.lambda_max().iter().map(|l| l.to_bits()).collect::<Vec<_>>(),
            b.lambda_max().iter().map(|l| l.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn archive_round_trip() {
        let h = build_hierarchy_with_counts(&icosphere(1), &[42, 12, 4]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        h.save(dir.path()).unwrap();
        for name in ["level_0.obj", "level_2.obj", "qd_0.txt", "qu_1.txt"] {
            assert!(dir.path().join(name).exists(), "{name}");
        }
        let back = MeshHierarchy::load(dir.path()).unwrap();
        assert_eq!(back.vertex_counts(), h.vertex_counts());
        for k in 0..2 {
            assert_eq!(back.down(k), h.down(k));
            assert_eq!(back.up(k), h.up(k));
        }
    }
}
