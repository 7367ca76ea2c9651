//! Bird's-eye-view IoU: the footprint is the convex hull of the 8 box
//! corners projected onto the horizontal plane (a hexagon under pitch/roll),
//! intersected by Sutherland-Hodgman clipping and measured with the
//! shoelace formula. A yaw-only rectangle mode is kept for compatibility
//! with evaluations that ignore pitch and roll.

use crate::geometry::Box3D;

pub type Point2 = (f64, f64);

/// Convex hull in counter-clockwise order (monotone chain).
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut p: Vec<Point2> = points.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross =
        |o: Point2, a: Point2, b: Point2| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<Point2> = Vec::new();
    for &pt in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], pt) <= 0.0 {
            lower.pop();
        }
        lower.push(pt);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &pt in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], pt) <= 0.0 {
            upper.pop();
        }
        upper.push(pt);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Signed area is positive for counter-clockwise polygons; this returns the
/// absolute area.
pub fn polygon_area(poly: &[Point2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut a = 0.0;
    for i in 0..poly.len() {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % poly.len()];
        a += x0 * y1 - x1 * y0;
    }
    0.5 * a.abs()
}

/// Clip a convex polygon by a convex clip polygon (both counter-clockwise).
pub fn sutherland_hodgman(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut output: Vec<Point2> = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let input = std::mem::take(&mut output);
        let inside = |p: Point2| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0;
        let intersect = |p: Point2, q: Point2| -> Point2 {
            let d1 = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            let d2 = (b.0 - a.0) * (q.1 - a.1) - (b.1 - a.1) * (q.0 - a.0);
            let t = d1 / (d1 - d2);
            (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
        };
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            match (inside(prev), inside(cur)) {
                (true, true) => output.push(cur),
                (true, false) => output.push(intersect(prev, cur)),
                (false, true) => {
                    output.push(intersect(prev, cur));
                    output.push(cur);
                }
                (false, false) => {}
            }
        }
    }
    output
}

/// BEV footprint of a box: full corner hull, or the yaw-only rectangle.
pub fn bev_footprint(b: &Box3D, yaw_only: bool) -> Vec<Point2> {
    if yaw_only {
        let (s, c) = b.rotation.yaw.sin_cos();
        let (hl, hw) = (0.5 * b.size.length, 0.5 * b.size.width);
        let mut rect: Vec<Point2> = [(hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw)]
            .iter()
            .map(|(x, y)| (b.center.x + c * x - s * y, b.center.y + s * x + c * y))
            .collect();
        // Counter-clockwise for the clipper.
        rect.reverse();
        return convex_hull(&rect);
    }
    let pts: Vec<Point2> = b.corners()[..8].iter().map(|p| (p.x, p.y)).collect();
    convex_hull(&pts)
}

/// Rotated-box IoU in bird's eye view.
pub fn iou_bev(a: &Box3D, b: &Box3D, yaw_only: bool) -> f64 {
    let fa = bev_footprint(a, yaw_only);
    let fb = bev_footprint(b, yaw_only);
    let ia = polygon_area(&sutherland_hodgman(&fa, &fb));
    if ia <= 0.0 {
        return 0.0;
    }
    let ua = polygon_area(&fa) + polygon_area(&fb) - ia;
    (ia / ua).clamp(0.0, 1.0)
}
