//! Edge-contraction decimation that keeps a subset of the original vertices.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use ndarray::Array2;

use super::quadric::{compute_vertex_quadrics, VertexQuadric};
use super::DownsampleMatrix;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::sparse::SparseMatrix;

/// Cost of contracting the edge `(lo, hi)` and the endpoint that survives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    pub cost: f64,
    pub keep: usize,
    pub remove: usize,
}

/// Scores contracting `a` and `b` into one of the two endpoints: the merged
/// quadric is evaluated at both positions and the cheaper one wins, the lower
/// index on ties.
pub fn score_contraction(
    a: usize,
    b: usize,
    qa: &VertexQuadric,
    qb: &VertexQuadric,
    pa: [f64; 3],
    pb: [f64; 3],
) -> Contraction {
    let merged = *qa + *qb;
    let (lo, hi, plo, phi) = if a < b { (a, b, pa, pb) } else { (b, a, pb, pa) };
    let clo = merged.error(plo);
    let chi = merged.error(phi);
    if chi < clo {
        Contraction {
            cost: chi,
            keep: hi,
            remove: lo,
        }
    } else {
        Contraction {
            cost: clo,
            keep: lo,
            remove: hi,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    cost: f64,
    lo: usize,
    hi: usize,
    stamp_lo: u32,
    stamp_hi: u32,
}

impl Candidate {
    fn key(&self) -> (f64, usize, usize) {
        (self.cost, self.lo, self.hi)
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Reversed so that BinaryHeap pops the cheapest (cost, lo, hi) first.
    fn cmp(&self, other: &Self) -> Ordering {
        let (ca, la, ha) = self.key();
        let (cb, lb, hb) = other.key();
        cb.total_cmp(&ca)
            .then_with(|| lb.cmp(&la))
            .then_with(|| hb.cmp(&ha))
            .then_with(|| other.stamp_lo.cmp(&self.stamp_lo))
            .then_with(|| other.stamp_hi.cmp(&self.stamp_hi))
    }
}

struct State<'a> {
    mesh: &'a Mesh,
    quadrics: Vec<VertexQuadric>,
    stamps: Vec<u32>,
    alive: Vec<bool>,
    neighbors: Vec<BTreeSet<usize>>,
    faces: Vec<[usize; 3]>,
    face_alive: Vec<bool>,
    vertex_faces: Vec<Vec<usize>>,
    heap: BinaryHeap<Candidate>,
}

impl State<'_> {
    fn push(&mut self, a: usize, b: usize) {
        let (lo, hi) = (a.min(b), a.max(b));
        let c = score_contraction(
            lo,
            hi,
            &self.quadrics[lo],
            &self.quadrics[hi],
            self.mesh.position(lo),
            self.mesh.position(hi),
        );
        self.heap.push(Candidate {
            cost: c.cost,
            lo,
            hi,
            stamp_lo: self.stamps[lo],
            stamp_hi: self.stamps[hi],
        });
    }

    fn push_cross_component_pairs(&mut self) {
        let n = self.alive.len();
        let mut component = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if !self.alive[start] || component[start] != usize::MAX {
                continue;
            }
            component[start] = next;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &u in &self.neighbors[v] {
                    if component[u] == usize::MAX {
                        component[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        let live: Vec<usize> = (0..n).filter(|&v| self.alive[v]).collect();
        for (i, &a) in live.iter().enumerate() {
            for &b in &live[i + 1..] {
                if component[a] != component[b] {
                    self.push(a, b);
                }
            }
        }
    }

    fn contract(&mut self, keep: usize, remove: usize) {
        self.alive[remove] = false;
        let qr = self.quadrics[remove];
        self.quadrics[keep] += qr;
        self.stamps[keep] += 1;
        self.stamps[remove] += 1;

        let moved = std::mem::take(&mut self.neighbors[remove]);
        self.neighbors[keep].remove(&remove);
        for c in moved {
            if c == keep {
                continue;
            }
            self.neighbors[c].remove(&remove);
            self.neighbors[c].insert(keep);
            self.neighbors[keep].insert(c);
        }

        for fi in std::mem::take(&mut self.vertex_faces[remove]) {
            if !self.face_alive[fi] {
                continue;
            }
            let f = &mut self.faces[fi];
            for v in f.iter_mut() {
                if *v == remove {
                    *v = keep;
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                self.face_alive[fi] = false;
            } else {
                self.vertex_faces[keep].push(fi);
            }
        }

        let around: Vec<usize> = self.neighbors[keep].iter().copied().collect();
        for c in around {
            self.push(keep, c);
        }
    }
}

/// Contracts mesh edges, cheapest quadric cost first, until `target_n`
/// vertices remain. Surviving vertices keep their original positions.
///
/// Only edges are candidates while any remain. If the graph falls apart into
/// more components than `target_n`, every pair of live vertices from different
/// components becomes a candidate so the target is always reached.
///
/// Fails with an argument error when `target_n` is not in `[1, n)`.
pub fn decimate(mesh: &Mesh, target_n: usize) -> Result<(Mesh, DownsampleMatrix)> {
    let n = mesh.num_vertices();
    if target_n < 1 || target_n >= n {
        return Err(Error::arg(format!(
            "decimation target must be in [1, {n}), got {target_n}"
        )));
    }

    let mut neighbors = vec![BTreeSet::new(); n];
    for (a, b) in mesh.edges() {
        neighbors[a].insert(b);
        neighbors[b].insert(a);
    }
    let mut vertex_faces = vec![Vec::new(); n];
    for (fi, f) in mesh.faces().iter().enumerate() {
        for &v in f {
            vertex_faces[v].push(fi);
        }
    }
    let mut state = State {
        mesh,
        quadrics: compute_vertex_quadrics(mesh),
        stamps: vec![0; n],
        alive: vec![true; n],
        neighbors,
        faces: mesh.faces().to_vec(),
        face_alive: vec![true; mesh.num_faces()],
        vertex_faces,
        heap: BinaryHeap::new(),
    };
    for (a, b) in mesh.edges() {
        state.push(a, b);
    }

    let mut remaining = n;
    while remaining > target_n {
        let Some(cand) = state.heap.pop() else {
            state.push_cross_component_pairs();
            continue;
        };
        let (lo, hi) = (cand.lo, cand.hi);
        if !state.alive[lo]
            || !state.alive[hi]
            || cand.stamp_lo != state.stamps[lo]
            || cand.stamp_hi != state.stamps[hi]
        {
            // Either gone, or a fresher entry for this edge is already queued.
            continue;
        }
        let c = score_contraction(
            lo,
            hi,
            &state.quadrics[lo],
            &state.quadrics[hi],
            mesh.position(lo),
            mesh.position(hi),
        );
        state.contract(c.keep, c.remove);
        remaining -= 1;
    }

    let kept: Vec<usize> = (0..n).filter(|&v| state.alive[v]).collect();
    let mut new_index = vec![usize::MAX; n];
    for (p, &q) in kept.iter().enumerate() {
        new_index[q] = p;
    }
    let mut seen = HashSet::new();
    let mut faces = Vec::new();
    for (fi, f) in state.faces.iter().enumerate() {
        if !state.face_alive[fi] {
            continue;
        }
        let mapped = [new_index[f[0]], new_index[f[1]], new_index[f[2]]];
        let mut key = mapped;
        key.sort_unstable();
        if seen.insert(key) {
            faces.push(mapped);
        }
    }
    let mut vertices = Array2::zeros((kept.len(), 3));
    for (p, &q) in kept.iter().enumerate() {
        vertices.row_mut(p).assign(&mesh.vertices().row(q));
    }
    let coarse = Mesh::new(vertices, faces)?;
    let matrix = SparseMatrix::from_triplets(
        kept.len(),
        n,
        kept.iter().enumerate().map(|(p, &q)| (p, q, 1.0)),
    )?;
    Ok((
        coarse,
        DownsampleMatrix {
            matrix,
            kept_indices: kept,
        },
    ))
}
