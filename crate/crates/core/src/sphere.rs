//! Great-circle segment geometry.

use nalgebra::Vector3;

/// Whether the minor great-circle arcs AB and CD cross at an interior point.
pub fn arcs_intersect(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, d: &Vector3<f64>) -> bool {
    let n1 = a.cross(b);
    let n2 = c.cross(d);
    let sc = n1.dot(c);
    let sd = n1.dot(d);
    let sa = n2.dot(a);
    let sb = n2.dot(b);
    // each segment must strictly straddle the other's great circle
    if sc * sd >= 0.0 || sa * sb >= 0.0 {
        return false;
    }
    // and the two crossings of the great circles must be the same point, not antipodes
    let mut x = n1.cross(&n2);
    if x.dot(&(a + b)) < 0.0 {
        x = -x;
    }
    x.dot(&(c + d)) > 0.0
}

/// Index pairs of crossing, non-adjacent segments of a closed polyline.
/// Zero-length segments are skipped.
pub fn closed_polyline_self_intersections(pts: &[Vector3<f64>]) -> Vec<(usize, usize)> {
    let n = pts.len();
    let mut out = Vec::new();
    if n < 4 {
        return out;
    }
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    let degenerate = |i: usize| {
        let (p, q) = seg(i);
        (p - q).norm() <= 1e-14
    };
    for i in 0..n {
        if degenerate(i) {
            continue;
        }
        for j in i + 2..n {
            if (j + 1) % n == i || degenerate(j) {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            if arcs_intersect(&a, &b, &c, &d) {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z).normalize()
    }

    #[test]
    fn crossing_and_antipodal() {
        let a = v(1.0, -0.1, 0.0);
        let b = v(1.0, 0.1, 0.0);
        let c = v(1.0, 0.0, -0.1);
        let d = v(1.0, 0.0, 0.1);
        assert!(arcs_intersect(&a, &b, &c, &d));
        assert!(!arcs_intersect(&a, &b, &-c, &-d));
        assert!(!arcs_intersect(&a, &b, &v(1.0, 0.2, -0.1), &v(1.0, 0.2, 0.1)));
    }

    #[test]
    fn figure_eight() {
        // a small bow-tie around (0,0,1)
        let pts = [v(0.1, 0.1, 1.0), v(-0.1, -0.1, 1.0), v(-0.1, 0.1, 1.0), v(0.1, -0.1, 1.0)];
        assert_eq!(closed_polyline_self_intersections(&pts).len(), 1);
        let square = [v(0.1, 0.1, 1.0), v(-0.1, 0.1, 1.0), v(-0.1, -0.1, 1.0), v(0.1, -0.1, 1.0)];
        assert!(closed_polyline_self_intersections(&square).is_empty());
    }
}
