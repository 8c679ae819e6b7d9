//! Planar Voronoi polygons of the facility coordinates, clipped to a box.

use super::Point;

pub type Polygon = Vec<Point>;

/// Relative margin added on each side of the node bounding box.
pub const BOX_MARGIN: f64 = 0.05;

/// Expands the bounding box `(lo, hi)` by [`BOX_MARGIN`] of its extent. A zero
/// extent borrows the other axis (or 1.0 for a single point) so the box always
/// has positive area.
pub fn clip_box(lo: Point, hi: Point) -> (Point, Point) {
    let ex = hi.x - lo.x;
    let ey = hi.y - lo.y;
    let base = if ex.max(ey) > 0.0 { ex.max(ey) } else { 1.0 };
    let mx = BOX_MARGIN * if ex > 0.0 { ex } else { base };
    let my = BOX_MARGIN * if ey > 0.0 { ey } else { base };
    (
        Point::new(lo.x - mx, lo.y - my),
        Point::new(hi.x + mx, hi.y + my),
    )
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        twice += a.x * b.y - b.x * a.y;
    }
    (twice * 0.5).abs()
}

/// Keeps the part of a convex polygon closer to `site` than to `other`.
fn clip_bisector(poly: &[Point], site: Point, other: Point) -> Polygon {
    let nx = other.x - site.x;
    let ny = other.y - site.y;
    let mx = 0.5 * (site.x + other.x);
    let my = 0.5 * (site.y + other.y);
    let side = |q: &Point| (q.x - mx) * nx + (q.y - my) * ny;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (sa, sb) = (side(&a), side(&b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    out
}

fn collinear(sites: &[Point]) -> bool {
    if sites.len() < 3 {
        return true;
    }
    let o = sites[0];
    let Some(dir) = sites.iter().find(|s| s.dist2(&o) > 0.0) else {
        return true;
    };
    let (dx, dy) = (dir.x - o.x, dir.y - o.y);
    let scale = dx.hypot(dy);
    sites.iter().all(|s| {
        let cross = dx * (s.y - o.y) - dy * (s.x - o.x);
        cross.abs() <= 1e-12 * scale * scale.max(s.dist(&o))
    })
}

/// Voronoi cell polygon of every site clipped to the rectangle `[lo, hi]`.
pub fn voronoi_polygons(sites: &[Point], lo: Point, hi: Point) -> Vec<Polygon> {
    let rect = vec![lo, Point::new(hi.x, lo.y), hi, Point::new(lo.x, hi.y)];
    sites
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut poly = rect.clone();
            for (j, &o) in sites.iter().enumerate() {
                if i != j && o != s {
                    poly = clip_bisector(&poly, s, o);
                    if poly.is_empty() {
                        break;
                    }
                }
            }
            poly
        })
        .collect()
}

/// Area of each site's clipped Voronoi polygon. Collinear or coincident site
/// sets fall back to an equal share of the box area.
pub fn voronoi_areas(sites: &[Point], lo: Point, hi: Point) -> Vec<f64> {
    let box_area = (hi.x - lo.x) * (hi.y - lo.y);
    let fallback = vec![box_area / sites.len().max(1) as f64; sites.len()];
    if collinear(sites) {
        return fallback;
    }
    let areas: Vec<f64> = voronoi_polygons(sites, lo, hi)
        .iter()
        .map(|p| polygon_area(p))
        .collect();
    if areas.iter().any(|&a| !(a > 0.0)) {
        return fallback;
    }
    areas
}
