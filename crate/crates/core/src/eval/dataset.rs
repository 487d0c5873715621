//! Frame sequences sharing one mesh topology, and their on-disk layout
//! `<root>/<sequence>/<frame>.obj`.

use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub name: String,
    pub frames: Vec<Array2<f64>>,
}

/// Every frame is an `n x 3` vertex array over the shared `faces`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    faces: Vec<[usize; 3]>,
    num_vertices: usize,
    sequences: Vec<Sequence>,
}

/// Position of one frame inside a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrameRef {
    pub sequence: usize,
    pub frame: usize,
}

impl Dataset {
    pub fn new(template: &Mesh, sequences: Vec<Sequence>) -> Result<Self> {
        let n = template.num_vertices();
        for s in &sequences {
            if let Some(bad) = s.frames.iter().find(|f| f.dim() != (n, 3)) {
                return Err(Error::Topology(format!(
                    "sequence `{}` has a {:?} frame, expected ({n}, 3)",
                    s.name,
                    bad.dim()
                )));
            }
        }
        let mut names: Vec<&str> = sequences.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::arg("duplicate sequence names"));
        }
        Ok(Self {
            faces: template.faces().to_vec(),
            num_vertices: n,
            sequences,
        })
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    pub fn num_frames(&self) -> usize {
        self.sequences.iter().map(|s| s.frames.len()).sum()
    }

    pub fn sequence_index(&self, name: &str) -> Option<usize> {
        self.sequences.iter().position(|s| s.name == name)
    }

    /// All frames in sequence-major order.
    pub fn frame_refs(&self) -> Vec<FrameRef> {
        self.sequences
            .iter()
            .enumerate()
            .flat_map(|(s, seq)| (0..seq.frames.len()).map(move |f| FrameRef { sequence: s, frame: f }))
            .collect()
    }

    pub fn frame(&self, r: FrameRef) -> &Array2<f64> {
        &self.sequences[r.sequence].frames[r.frame]
    }

    pub fn label(&self, r: FrameRef) -> &str {
        &self.sequences[r.sequence].name
    }

    pub fn frames<'a>(&'a self, refs: &'a [FrameRef]) -> impl Iterator<Item = &'a Array2<f64>> + 'a {
        refs.iter().map(|&r| self.frame(r))
    }

    /// The mesh of one frame.
    pub fn mesh(&self, r: FrameRef) -> Mesh {
        Mesh::new(self.frame(r).clone(), self.faces.clone()).expect("validated topology")
    }

    /// Topology of the dataset with the first frame's positions.
    pub fn template(&self) -> Result<Mesh> {
        let first = self
            .sequences
            .iter()
            .find_map(|s| s.frames.first())
            .ok_or_else(|| Error::arg("dataset has no frames"))?;
        Mesh::new(first.clone(), self.faces.clone())
    }

    pub fn save(&self, root: &Path) -> Result<()> {
        for seq in &self.sequences {
            let dir = root.join(&seq.name);
            std::fs::create_dir_all(&dir)?;
            let width = seq.frames.len().saturating_sub(1).to_string().len().max(4);
            for (i, f) in seq.frames.iter().enumerate() {
                let mesh = Mesh::new(f.clone(), self.faces.clone())?;
                mesh.save_obj(&dir.join(format!("{i:0width$}.obj")))?;
            }
        }
        Ok(())
    }

    /// Loads every `<root>/<sequence>/*.obj`; sequences and frames are taken in
    /// lexicographic order. All frames must share the first frame's faces.
    pub fn load(root: &Path) -> Result<Self> {
        let mut seq_dirs: Vec<_> = std::fs::read_dir(root)?
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .filter(|e| e.path().is_dir())
            .collect();
        seq_dirs.sort_by_key(|e| e.file_name());
        let mut template: Option<Mesh> = None;
        let mut sequences = Vec::new();
        for dir in seq_dirs {
            let name = dir.file_name().to_string_lossy().into_owned();
            let mut files: Vec<_> = std::fs::read_dir(dir.path())?
                .collect::<std::io::Result<Vec<_>>>()?
                .into_iter()
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "obj"))
                .collect();
            files.sort();
            let mut frames = Vec::with_capacity(files.len());
            for path in files {
                let mesh = Mesh::load_obj(&path)?;
                match &template {
                    None => template = Some(mesh.clone()),
                    Some(t) if t.faces() != mesh.faces() => {
                        return Err(Error::Topology(format!(
                            "{} does not share the dataset topology",
                            path.display()
                        )))
                    }
                    _ => {}
                }
                frames.push(mesh.vertices().clone());
            }
            if !frames.is_empty() {
                sequences.push(Sequence { name, frames });
            }
        }
        let template =
            template.ok_or_else(|| Error::arg(format!("no OBJ frames under {}", root.display())))?;
        Dataset::new(&template, sequences)
    }
}
