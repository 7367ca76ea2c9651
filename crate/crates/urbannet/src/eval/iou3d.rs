//! Exact intersection-over-union of two arbitrarily rotated boxes: candidate
//! vertices are enumerated from all triples of the 12 face half-spaces, kept
//! if they satisfy every constraint, and the intersection volume is the
//! volume of their convex hull (whose faces necessarily lie on those planes).

use crate::geometry::{Box3D, Mat3, Vec3};

/// Half-space representation: dot(normal, x) <= offset.
#[derive(Debug, Clone, Copy)]
struct HalfSpace {
    normal: Vec3,
    offset: f64,
}

fn box_half_spaces(b: &Box3D) -> [HalfSpace; 6] {
    let r = b.rotation_matrix();
    let axes = [
        r.column(0).into_owned(),
        r.column(1).into_owned(),
        r.column(2).into_owned(),
    ];
    let half = [0.5 * b.size.length, 0.5 * b.size.width, 0.5 * b.size.height];
    let mut out = [HalfSpace {
        normal: Vec3::zeros(),
        offset: 0.0,
    }; 6];
    for k in 0..3 {
        let n = axes[k];
        let c = b.center.coords;
        out[2 * k] = HalfSpace {
            normal: n,
            offset: n.dot(&c) + half[k],
        };
        out[2 * k + 1] = HalfSpace {
            normal: -n,
            offset: -n.dot(&c) + half[k],
        };
    }
    out
}

const INSIDE_TOL: f64 = 1e-9;
const DEDUPE_TOL: f64 = 1e-7;

/// Volume of the intersection polytope of two oriented boxes.
pub fn intersection_volume(a: &Box3D, b: &Box3D) -> f64 {
    let mut planes = Vec::with_capacity(12);
    planes.extend_from_slice(&box_half_spaces(a));
    planes.extend_from_slice(&box_half_spaces(b));

    // Vertex enumeration over plane triples.
    let mut verts: Vec<Vec3> = Vec::new();
    for i in 0..12 {
        for j in (i + 1)..12 {
            for k in (j + 1)..12 {
                let m = Mat3::from_rows(&[
                    planes[i].normal.transpose(),
                    planes[j].normal.transpose(),
                    planes[k].normal.transpose(),
                ]);
                let det = m.determinant();
                if det.abs() < 1e-10 {
                    continue;
                }
                let rhs = Vec3::new(planes[i].offset, planes[j].offset, planes[k].offset);
                let Some(inv) = m.try_inverse() else {
                    continue;
                };
                let x = inv * rhs;
                if planes
                    .iter()
                    .all(|p| p.normal.dot(&x) <= p.offset + INSIDE_TOL)
                    && !verts.iter().any(|v| (v - x).norm() < DEDUPE_TOL)
                {
                    verts.push(x);
                }
            }
        }
    }
    if verts.len() < 4 {
        return 0.0;
    }

    let centroid = verts.iter().sum::<Vec3>() / verts.len() as f64;

    // Hull faces lie on the defining planes. Coincident planes (touching or
    // identical boxes) must contribute one face, not two.
    let mut face_planes: Vec<HalfSpace> = Vec::with_capacity(12);
    for p in &planes {
        if !face_planes
            .iter()
            .any(|q| (q.normal - p.normal).norm() < 1e-9 && (q.offset - p.offset).abs() < 1e-9)
        {
            face_planes.push(*p);
        }
    }

    // Wind each face CCW about its outward normal and accumulate signed
    // tetrahedra (centroid, v_t, v_{t+1}, face centroid).
    let mut volume = 0.0;
    for p in &face_planes {
        let face: Vec<Vec3> = verts
            .iter()
            .copied()
            .filter(|v| (p.normal.dot(v) - p.offset).abs() <= DEDUPE_TOL)
            .collect();
        if face.len() < 3 {
            continue;
        }
        let fc = face.iter().sum::<Vec3>() / face.len() as f64;
        // In-plane basis for the angular sort.
        let u = (face[0] - fc).normalize();
        let w = p.normal.cross(&u);
        let mut order: Vec<(f64, Vec3)> = face
            .iter()
            .map(|v| {
                let d = v - fc;
                (d.dot(&w).atan2(d.dot(&u)), *v)
            })
            .collect();
        order.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        for t in 0..order.len() {
            let a3 = order[t].1 - centroid;
            let b3 = order[(t + 1) % order.len()].1 - centroid;
            let d3 = fc - centroid;
            volume += a3.cross(&b3).dot(&d3) / 6.0;
        }
    }
    volume.abs()
}

/// Exact rotated-box IoU in three dimensions.
pub fn iou_3d(a: &Box3D, b: &Box3D) -> f64 {
    let vi = intersection_volume(a, b);
    if vi <= 0.0 {
        return 0.0;
    }
    let denom = a.volume() + b.volume() - vi;
    (vi / denom).clamp(0.0, 1.0)
}
