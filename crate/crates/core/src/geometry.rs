//! Small fixed-dimension vector helpers and axis-aligned boxes.

use libm::sqrt;

pub type Point<const D: usize> = [f64; D];

#[inline]
pub fn sub<const D: usize>(a: &Point<D>, b: &Point<D>) -> Point<D> {
    core::array::from_fn(|i| a[i] - b[i])
}

#[inline]
pub fn add<const D: usize>(a: &Point<D>, b: &Point<D>) -> Point<D> {
    core::array::from_fn(|i| a[i] + b[i])
}

#[inline]
pub fn scale<const D: usize>(a: &Point<D>, s: f64) -> Point<D> {
    core::array::from_fn(|i| a[i] * s)
}

#[inline]
pub fn dot<const D: usize>(a: &Point<D>, b: &Point<D>) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm<const D: usize>(a: &Point<D>) -> f64 {
    sqrt(dot(a, a))
}

#[inline]
pub fn dist<const D: usize>(a: &Point<D>, b: &Point<D>) -> f64 {
    norm(&sub(a, b))
}

/// Determinant of a 1x1, 2x2 or 3x3 matrix stored row-major.
pub fn det<const D: usize>(m: &[[f64; D]; D]) -> f64 {
    match D {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!("dimension {D} is not supported"),
    }
}

/// Inverse of a small matrix; `None` if the determinant vanishes.
pub fn inverse<const D: usize>(m: &[[f64; D]; D]) -> Option<([[f64; D]; D], f64)> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut inv = [[0.0; D]; D];
    match D {
        1 => inv[0][0] = 1.0 / d,
        2 => {
            inv[0][0] = m[1][1] / d;
            inv[0][1] = -m[0][1] / d;
            inv[1][0] = -m[1][0] / d;
            inv[1][1] = m[0][0] / d;
        }
        3 => {
            for i in 0..3 {
                for j in 0..3 {
                    // cofactor transpose
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / d;
                }
            }
        }
        _ => unreachable!("dimension {D} is not supported"),
    }
    Some((inv, d))
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb<const D: usize> {
    pub min: Point<D>,
    pub max: Point<D>,
}

impl<const D: usize> Aabb<D> {
    pub fn point(p: Point<D>) -> Self {
        Self { min: p, max: p }
    }

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point<D>>) -> Self {
        let mut b = Self {
            min: [f64::INFINITY; D],
            max: [f64::NEG_INFINITY; D],
        };
        for p in pts {
            for i in 0..D {
                b.min[i] = b.min[i].min(p[i]);
                b.max[i] = b.max[i].max(p[i]);
            }
        }
        b
    }

    pub fn inflate(&self, r: f64) -> Self {
        Self {
            min: core::array::from_fn(|i| self.min[i] - r),
            max: core::array::from_fn(|i| self.max[i] + r),
        }
    }

    pub fn intersects(&self, other: &Self) -> bool {
        (0..D).all(|i| self.min[i] <= other.max[i] && other.min[i] <= self.max[i])
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            min: core::array::from_fn(|i| self.min[i].min(other.min[i])),
            max: core::array::from_fn(|i| self.max[i].max(other.max[i])),
        }
    }

    /// Euclidean distance from `p` to the box (zero inside).
    pub fn distance_to(&self, p: &Point<D>) -> f64 {
        let mut s = 0.0;
        for i in 0..D {
            let d = (self.min[i] - p[i]).max(0.0).max(p[i] - self.max[i]);
            s += d * d;
        }
        sqrt(s)
    }
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance<const D: usize>(p: &Point<D>, a: &Point<D>, b: &Point<D>) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len2 = dot(&ab, &ab);
    let t = if len2 > 0.0 { (dot(&ap, &ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    dist(p, &add(a, &scale(&ab, t)))
}

/// Distance from `p` to the triangle `abc` in 3D.
pub fn point_triangle_distance(p: &Point<3>, a: &Point<3>, b: &Point<3>, c: &Point<3>) -> f64 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let n = cross(&ab, &ac);
    let nn = dot(&n, &n);
    if nn > 0.0 {
        // barycentric coordinates of the projection onto the plane
        let ap = sub(p, a);
        let d = dot(&ap, &n) / nn;
        let proj = sub(p, &scale(&n, d));
        let v0 = ab;
        let v1 = ac;
        let v2 = sub(&proj, a);
        let (d00, d01, d11) = (dot(&v0, &v0), dot(&v0, &v1), dot(&v1, &v1));
        let (d20, d21) = (dot(&v2, &v0), dot(&v2, &v1));
        let denom = d00 * d11 - d01 * d01;
        let v = (d11 * d20 - d01 * d21) / denom;
        let w = (d00 * d21 - d01 * d20) / denom;
        if v >= 0.0 && w >= 0.0 && v + w <= 1.0 {
            return libm::fabs(d) * sqrt(nn);
        }
    }
    point_segment_distance(p, a, b)
        .min(point_segment_distance(p, b, c))
        .min(point_segment_distance(p, c, a))
}

#[inline]
pub fn cross(a: &Point<3>, b: &Point<3>) -> Point<3> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
