//! Minimum enclosing circle of a handful of complex points.
use num_complex::Complex64 as C64;

/// Radius of the smallest closed disc containing every point.
///
/// Exhaustive over 2- and 3-point supports, so `O(n^4)`; meant for the few
/// dozen points that arise from matrix diagonals. Empty input gives 0.
pub fn min_enclosing_radius(points: &[C64]) -> f64 {
    let pts = dedup(points);
    match pts.len() {
        0 | 1 => return 0.0,
        2 => return (pts[0] - pts[1]).norm() / 2.0,
        _ => {}
    }
    let scale = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let covers = |c: C64, r: f64| {
        let slack = 1e-12 * (scale + r).max(f64::MIN_POSITIVE);
        pts.iter().all(|p| (p - c).norm() <= r + slack)
    };
    let mut best = f64::INFINITY;
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            let c = (pts[i] + pts[j]) / 2.0;
            let r = (pts[i] - pts[j]).norm() / 2.0;
            if r < best && covers(c, r) {
                best = r;
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if let Some((c, r)) = circumcircle(pts[i], pts[j], pts[k]) {
                    if r < best && covers(c, r) {
                        best = r;
                    }
                }
            }
        }
    }
    best
}

fn dedup(points: &[C64]) -> Vec<C64> {
    let mut v = points.to_vec();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v.dedup();
    v
}

fn circumcircle(a: C64, b: C64, c: C64) -> Option<(C64, f64)> {
    let (bx, by) = (b.re - a.re, b.im - a.im);
    let (cx, cy) = (c.re - a.re, c.im - a.im);
    let d = 2.0 * (bx * cy - by * cx);
    let size = (bx.abs() + by.abs() + cx.abs() + cy.abs()).max(f64::MIN_POSITIVE);
    if d.abs() <= 1e-14 * size * size {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = C64::new(a.re + ux, a.im + uy);
    Some((center, (ux * ux + uy * uy).sqrt()))
}
