//! Barycentric up-sampling built from a decimation.

use super::{DownsampleMatrix, UpsampleMatrix};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::sparse::SparseMatrix;

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn combine(w: V3, a: V3, b: V3, c: V3) -> V3 {
    [
        w[0] * a[0] + w[1] * b[0] + w[2] * c[0],
        w[0] * a[1] + w[1] * b[1] + w[2] * c[1],
        w[0] * a[2] + w[1] * b[2] + w[2] * c[2],
    ]
}

fn dist2(a: V3, b: V3) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

/// Parameter `t` of the closest point `a + t (b - a)` on a segment.
fn segment_param(p: V3, a: V3, b: V3) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return 0.0;
    }
    (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0)
}

/// Barycentric weights `(u, v, w)` of the point of triangle `abc` closest to
/// `p`, using the Voronoi-region classification. Points outside the triangle
/// clamp to an edge or a corner.
pub fn closest_point_barycentric(p: V3, a: V3, b: V3, c: V3) -> V3 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let n = cross(ab, ac);
    let scale = dot(ab, ab).max(dot(ac, ac));
    if dot(n, n) <= 1e-28 * scale * scale {
        return degenerate_closest(p, a, b, c);
    }

    let ap = sub(p, a);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return [1.0, 0.0, 0.0];
    }
    let bp = sub(p, b);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return [0.0, 1.0, 0.0];
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return [1.0 - v, v, 0.0];
    }
    let cp = sub(p, c);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return [0.0, 0.0, 1.0];
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return [1.0 - w, 0.0, w];
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return [0.0, 1.0 - w, w];
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    [1.0 - v - w, v, w]
}

// Zero-area triangle: best point over its three edges.
fn degenerate_closest(p: V3, a: V3, b: V3, c: V3) -> V3 {
    let edges = [(a, b, [0, 1]), (b, c, [1, 2]), (c, a, [2, 0])];
    let mut best = ([1.0, 0.0, 0.0], f64::INFINITY);
    for (s, e, idx) in edges {
        let t = segment_param(p, s, e);
        let mut w = [0.0; 3];
        w[idx[0]] = 1.0 - t;
        w[idx[1]] += t;
        let d = dist2(p, combine(w, a, b, c));
        if d < best.1 {
            best = (w, d);
        }
    }
    best.0
}

/// Up-sampling matrix `Q_u` (`m x n`): kept vertices get indicator rows,
/// discarded vertices get the clamped barycentric weights of their closest
/// coarse triangle (lowest face index on ties). Without coarse faces,
/// discarded vertices copy their nearest coarse vertex.
pub fn build_upsampling(fine: &Mesh, coarse: &Mesh, qd: &DownsampleMatrix) -> Result<UpsampleMatrix> {
    let m = fine.num_vertices();
    let n = coarse.num_vertices();
    if qd.matrix.shape() != (n, m) || qd.kept_indices.len() != n {
        return Err(Error::Contract(format!(
            "down-sampling matrix {:?} does not map {m} -> {n} vertices",
            qd.matrix.shape()
        )));
    }
    let mut column_of = vec![None; m];
    for (p, &q) in qd.kept_indices.iter().enumerate() {
        if fine.position(q) != coarse.position(p) {
            return Err(Error::Contract(format!(
                "coarse vertex {p} is not fine vertex {q}"
            )));
        }
        column_of[q] = Some(p);
    }

    let coarse_pos: Vec<V3> = (0..n).map(|i| coarse.position(i)).collect();
    let mut triplets = Vec::with_capacity(m * 3);
    for (q, col) in column_of.iter().enumerate() {
        if let Some(p) = *col {
            triplets.push((q, p, 1.0));
            continue;
        }
        let point = fine.position(q);
        if coarse.num_faces() == 0 {
            let nearest = (0..n)
                .min_by(|&i, &j| {
                    dist2(point, coarse_pos[i])
                        .total_cmp(&dist2(point, coarse_pos[j]))
                        .then(i.cmp(&j))
                })
                .expect("coarse mesh has at least one vertex");
            triplets.push((q, nearest, 1.0));
            continue;
        }
        let mut best: Option<(f64, [usize; 3], V3)> = None;
        for f in coarse.faces() {
            let (a, b, c) = (coarse_pos[f[0]], coarse_pos[f[1]], coarse_pos[f[2]]);
            let w = closest_point_barycentric(point, a, b, c);
            let d = dist2(point, combine(w, a, b, c));
            if best.as_ref().is_none_or(|(bd, _, _)| d < *bd) {
                best = Some((d, *f, w));
            }
        }
        let (_, face, w) = best.expect("at least one face");
        for (&v, &wv) in face.iter().zip(&w) {
            let wv = wv.max(0.0);
            if wv != 0.0 {
                triplets.push((q, v, wv));
            }
        }
    }
    let matrix = SparseMatrix::from_triplets(m, n, triplets)?;
    Ok(UpsampleMatrix { matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent closest-point oracle: orthogonal projection onto the plane
    /// if it falls inside, otherwise the best of the three edge projections.
    fn brute_force_closest(p: V3, a: V3, b: V3, c: V3) -> V3 {
        let n = cross(sub(b, a), sub(c, a));
        let nn = dot(n, n);
        let dist_plane = dot(sub(p, a), n) / nn;
        let proj = [
            p[0] - dist_plane * n[0],
            p[1] - dist_plane * n[1],
            p[2] - dist_plane * n[2],
        ];
        let inside = [(a, b), (b, c), (c, a)]
            .iter()
            .all(|&(s, e)| dot(cross(sub(e, s), sub(proj, s)), n) >= 0.0);
        if inside {
            return proj;
        }
        [(a, b), (b, c), (c, a)]
            .iter()
            .map(|&(s, e)| {
                let t = segment_param(p, s, e);
                [
                    s[0] + t * (e[0] - s[0]),
                    s[1] + t * (e[1] - s[1]),
                    s[2] + t * (e[2] - s[2]),
                ]
            })
            .min_by(|x, y| dist2(p, *x).total_cmp(&dist2(p, *y)))
            .unwrap()
    }

    #[test]
    fn corner_gets_full_weight() {
        let (a, b, c) = ([0., 0., 0.], [1., 0., 0.], [0., 1., 0.]);
        assert_eq!(closest_point_barycentric(b, a, b, c), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn centroid_gets_equal_weights() {
        let (a, b, c) = ([0., 0., 0.], [3., 0., 0.], [0., 3., 0.]);
        let w = closest_point_barycentric([1., 1., 0.], a, b, c);
        for wi in w {
            assert!((wi - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_triangle_falls_back_to_edges() {
        let (a, b, c) = ([0., 0., 0.], [1., 0., 0.], [2., 0., 0.]);
        let w = closest_point_barycentric([1.5, 1.0, 0.0], a, b, c);
        let x = combine(w, a, b, c);
        assert!((x[0] - 1.5).abs() < 1e-15 && x[1] == 0.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    fn coord() -> impl Strategy<Value = f64> {
        -2.0..2.0f64
    }

    fn point() -> impl Strategy<Value = V3> {
        [coord(), coord(), coord()]
    }

    proptest! {
        #[test]
        fn matches_brute_force_projection(p in point(), a in point(), b in point(), c in point()) {
            let n = cross(sub(b, a), sub(c, a));
            prop_assume!(dot(n, n).sqrt() > 1e-3);
            let w = closest_point_barycentric(p, a, b, c);
            prop_assert!(w.iter().all(|&x| x >= -1e-12));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let got = combine(w, a, b, c);
            let want = brute_force_closest(p, a, b, c);
            prop_assert!((dist2(p, got).sqrt() - dist2(p, want).sqrt()).abs() < 1e-9);
        }
    }
}
