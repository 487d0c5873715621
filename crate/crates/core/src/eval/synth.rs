//! Procedural templates and a seeded synthetic expression dataset.
//!
//! The dataset stands in for registered face scans: each sequence animates a
//! shared set of nonlinear deformation factors (local twists of surface
//! regions composed with bumps that travel across the surface) along its own
//! smooth trajectory. The factor space is low dimensional but the resulting vertex
//! displacements are far from any low-dimensional linear subspace.

use std::collections::HashMap;
use std::f64::consts::PI;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::dataset::{Dataset, Sequence};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Names used for the first twelve generated sequences.
pub const EXPRESSION_NAMES: [&str; 12] = [
    "bareteeth",
    "cheeks_in",
    "eyebrow",
    "high_smile",
    "lips_back",
    "lips_up",
    "mouth_down",
    "mouth_extreme",
    "mouth_middle",
    "mouth_open",
    "mouth_side",
    "mouth_up",
];

/// `w x h` height-field grid at integer `(x, y)` with `z = height(x, y)`.
pub fn grid(w: usize, h: usize, height: impl Fn(f64, f64) -> f64) -> Mesh {
    let mut v = Array2::zeros((w * h, 3));
    for j in 0..h {
        for i in 0..w {
            let (x, y) = (i as f64, j as f64);
            let r = j * w + i;
            v[[r, 0]] = x;
            v[[r, 1]] = y;
            v[[r, 2]] = height(x, y);
        }
    }
    let mut faces = Vec::new();
    for j in 0..h.saturating_sub(1) {
        for i in 0..w.saturating_sub(1) {
            let a = j * w + i;
            let (b, c, d) = (a + 1, a + w, a + w + 1);
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    Mesh::new(v, faces).expect("grid indices are in range")
}

/// Unit icosphere: 12 vertices subdivided `level` times (12, 42, 162, 642, 2562, ...).
pub fn icosphere(level: usize) -> Mesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let normalize = |p: [f64; 3]| {
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [p[0] / n, p[1] / n, p[2] / n]
    };
    verts.iter_mut().for_each(|p| *p = normalize(*p));
    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (pa, pb) = (verts[a], verts[b]);
                verts.push(normalize([
                    (pa[0] + pb[0]) / 2.0,
                    (pa[1] + pb[1]) / 2.0,
                    (pa[2] + pb[2]) / 2.0,
                ]));
                verts.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let v = Array2::from_shape_fn((verts.len(), 3), |(i, k)| verts[i][k]);
    Mesh::new(v, faces).expect("icosphere indices are in range")
}

/// Dome-shaped height-field patch with exactly `n` vertices: full rows of
/// width `ceil(sqrt(n))` plus one partial row stitched to the row before it.
pub fn dome_template(n: usize) -> Result<Mesh> {
    if n < 3 {
        return Err(Error::arg("a template needs at least 3 vertices"));
    }
    let w = (n as f64).sqrt().ceil() as usize;
    let full = n / w;
    let rest = n % w;
    let scale = 1.0 / (w - 1).max(1) as f64;
    let mut v = Array2::zeros((n, 3));
    for idx in 0..n {
        let (i, j) = (idx % w, idx / w);
        let (x, y) = (i as f64 * scale, j as f64 * scale);
        v[[idx, 0]] = x;
        v[[idx, 1]] = y;
        v[[idx, 2]] = 0.3 * (-((x - 0.5).powi(2) + (y - 0.5).powi(2)) / 0.1).exp();
    }
    let mut faces = Vec::new();
    for j in 0..full.saturating_sub(1) {
        for i in 0..w - 1 {
            let a = j * w + i;
            faces.push([a, a + 1, a + w + 1]);
            faces.push([a, a + w + 1, a + w]);
        }
    }
    if rest > 0 {
        let prev = (full - 1) * w;
        let last = full * w;
        for i in 0..rest - 1 {
            faces.push([prev + i, prev + i + 1, last + i + 1]);
            faces.push([prev + i, last + i + 1, last + i]);
        }
        faces.push([prev + rest - 1, prev + rest, last + rest - 1]);
    }
    Mesh::new(v, faces)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub num_sequences: usize,
    pub frames_per_sequence: usize,
    pub seed: u64,
    /// Scales every deformation factor; `0` reproduces the template exactly.
    pub amplitude: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            num_sequences: 12,
            frames_per_sequence: 60,
            seed: 0,
            amplitude: 1.0,
        }
    }
}

const NUM_TWISTS: usize = 3;
const NUM_BUMPS: usize = 3;
const TWIST_RANGE: f64 = 1.2;
/// Angle (radians) a bump centre travels either side of its rest position.
const BUMP_TRAVEL: f64 = 1.2;
const BUMP_HEIGHT: f64 = 0.15;
const BUMP_RADIUS: f64 = 0.6;
const REGION_RADIUS: f64 = 1.0;

struct Region {
    center: [f64; 3],
    /// Smooth bump weight per vertex, 1 at the center and 0 beyond the radius.
    weight: Vec<f64>,
}

/// Bump whose centre starts at `rest` and moves about `axis`.
struct Bump {
    rest: [f64; 3],
    axis: [f64; 3],
}

fn random_unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn region(template: &Mesh, center: [f64; 3]) -> Region {
    let centroid = centroid(template);
    let weight = (0..template.num_vertices())
        .map(|i| {
            let p = sub(template.position(i), centroid);
            let r = norm(p);
            let cos = if r == 0.0 { 1.0 } else { dot(p, center) / r };
            falloff(cos, REGION_RADIUS)
        })
        .collect();
    Region { center, weight }
}

/// `(1 - s^2)^2` in the angular distance `s` (units of `radius`), 0 past it.
fn falloff(cos: f64, radius: f64) -> f64 {
    let s = cos.clamp(-1.0, 1.0).acos() / radius;
    if s < 1.0 {
        (1.0 - s * s).powi(2)
    } else {
        0.0
    }
}

fn centroid(m: &Mesh) -> [f64; 3] {
    let c = m.vertices().mean_axis(ndarray::Axis(0)).expect("non-empty mesh");
    [c[0], c[1], c[2]]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Rodrigues rotation of `p` about the unit axis `k` through the origin.
fn rotate(p: [f64; 3], k: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let kxp = cross(k, p);
    let kp = dot(k, p) * (1.0 - c);
    [
        p[0] * c + kxp[0] * s + k[0] * kp,
        p[1] * c + kxp[1] * s + k[1] * kp,
        p[2] * c + kxp[2] * s + k[2] * kp,
    ]
}

/// Applies one factor vector (`NUM_BUMPS` travel angles then `NUM_TWISTS`
/// twist angles).
fn deform(template: &Mesh, bumps: &[Bump], twists: &[Region], factors: &[f64]) -> Array2<f64> {
    let centroid = centroid(template);
    let centers: Vec<[f64; 3]> = bumps
        .iter()
        .zip(&factors[..NUM_BUMPS])
        .map(|(b, &angle)| rotate(b.rest, b.axis, angle))
        .collect();
    let mut out = template.vertices().clone();
    for i in 0..template.num_vertices() {
        let rel = sub(template.position(i), centroid);
        let r = norm(rel);
        let normal = if r == 0.0 { [0.0; 3] } else { [rel[0] / r, rel[1] / r, rel[2] / r] };
        let mut rel = rel;
        let mut changed = false;
        for (b, c) in bumps.iter().zip(&centers) {
            let h = BUMP_HEIGHT
                * (falloff(dot(normal, *c), BUMP_RADIUS) - falloff(dot(normal, b.rest), BUMP_RADIUS));
            if h == 0.0 {
                continue;
            }
            rel = [rel[0] + h * normal[0], rel[1] + h * normal[1], rel[2] + h * normal[2]];
            changed = true;
        }
        for (tw, &angle) in twists.iter().zip(&factors[NUM_BUMPS..]) {
            let w = tw.weight[i];
            if w == 0.0 || angle == 0.0 {
                continue;
            }
            rel = rotate(rel, tw.center, angle * w);
            changed = true;
        }
        if !changed {
            continue;
        }
        for k in 0..3 {
            out[[i, k]] = centroid[k] + rel[k];
        }
    }
    out
}

/// Seeded synthetic dataset over `template`.
///
/// Sequence `s` moves every factor along `range * sin(2 pi f t + phi)` with its
/// own frequencies and phases, for `t` in `[0, 1]` across its frames.
pub fn generate_synthetic_dataset(template: &Mesh, cfg: &SynthConfig) -> Result<Dataset> {
    if template.num_vertices() == 0 {
        return Err(Error::arg("template has no vertices"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bumps: Vec<Bump> = (0..NUM_BUMPS)
        .map(|_| {
            let rest = random_unit(&mut rng);
            let d = random_unit(&mut rng);
            let axis = cross(rest, d);
            let n = norm(axis);
            Bump {
                rest,
                axis: [axis[0] / n, axis[1] / n, axis[2] / n],
            }
        })
        .collect();
    let twists: Vec<Region> = (0..NUM_TWISTS)
        .map(|_| region(template, random_unit(&mut rng)))
        .collect();
    let ranges: Vec<f64> = std::iter::repeat_n(BUMP_TRAVEL, NUM_BUMPS)
        .chain(std::iter::repeat_n(TWIST_RANGE, NUM_TWISTS))
        .collect();

    let mut sequences = Vec::with_capacity(cfg.num_sequences);
    for s in 0..cfg.num_sequences {
        let freqs: Vec<f64> = ranges.iter().map(|_| rng.random_range(0.5..1.5)).collect();
        let phases: Vec<f64> = ranges.iter().map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let name = EXPRESSION_NAMES
            .get(s)
            .map(|n| n.to_string())
            .unwrap_or_else(|| format!("sequence_{s:02}"));
        let denom = cfg.frames_per_sequence.saturating_sub(1).max(1) as f64;
        let frames = (0..cfg.frames_per_sequence)
            .map(|f| {
                let t = f as f64 / denom;
                let factors: Vec<f64> = (0..ranges.len())
                    .map(|k| cfg.amplitude * ranges[k] * (2.0 * PI * freqs[k] * t + phases[k]).sin())
                    .collect();
                deform(template, &bumps, &twists, &factors)
            })
            .collect();
        sequences.push(Sequence { name, frames });
    }
    Dataset::new(template, sequences)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        for (level, n) in [(0, 12), (1, 42), (2, 162), (3, 642)] {
            let m = icosphere(level);
            assert_eq!(m.num_vertices(), n);
            assert_eq!(m.num_faces(), 20 * 4usize.pow(level as u32));
        }
    }

    #[test]
    fn dome_template_has_exact_vertex_count() {
        for n in [3, 10, 17, 256, 5023] {
            let m = dome_template(n).unwrap();
            assert_eq!(m.num_vertices(), n);
            let used: std::collections::HashSet<usize> =
                m.faces().iter().flatten().copied().collect();
            assert_eq!(used.len(), n, "every vertex belongs to a face (n={n})");
        }
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let t = icosphere(2);
        let cfg = SynthConfig {
            num_sequences: 3,
            frames_per_sequence: 5,
            ..Default::default()
        };
        assert_eq!(
            generate_synthetic_dataset(&t, &cfg).unwrap(),
            generate_synthetic_dataset(&t, &cfg).unwrap()
        );
    }

    #[test]
    fn zero_amplitude_reproduces_template() {
        let t = icosphere(2);
        let cfg = SynthConfig {
            num_sequences: 2,
            frames_per_sequence: 4,
            amplitude: 0.0,
            ..Default::default()
        };
        let d = generate_synthetic_dataset(&t, &cfg).unwrap();
        for r in d.frame_refs() {
            assert_eq!(d.frame(r), t.vertices());
        }
    }

    #[test]
    fn sequences_use_expression_names() {
        let t = icosphere(1);
        let cfg = SynthConfig {
            num_sequences: 13,
            frames_per_sequence: 2,
            ..Default::default()
        };
        let d = generate_synthetic_dataset(&t, &cfg).unwrap();
        assert_eq!(d.sequences()[0].name, "bareteeth");
        assert_eq!(d.sequences()[11].name, "mouth_up");
        assert_eq!(d.sequences()[12].name, "sequence_12");
    }
}
