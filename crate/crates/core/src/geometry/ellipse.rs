//! Direct least-squares ellipse fitting and ellipse rasterization.
//!
//! The fit minimizes the algebraic distance of a general conic subject to
//! `4ac - b^2 = 1`, which always yields an ellipse. The 6x6 generalized
//! eigenproblem is reduced to a 3x3 ordinary one by eliminating the linear
//! terms. Points are centered and scaled first so the result is stable under
//! translation.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::Point;
use crate::math::wrap;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ellipse {
    pub center: Point,
    /// Semi-major axis.
    pub a: f64,
    /// Semi-minor axis.
    pub b: f64,
    /// Angle from +x to the major axis, radians in `[0, pi)`.
    pub theta: f64,
}

impl Ellipse {
    /// Unit vector along the major axis.
    pub fn major_dir(&self) -> (f64, f64) {
        (libm::cos(self.theta), libm::sin(self.theta))
    }

    /// `<= 1` inside or on the ellipse.
    pub fn normalized_radius2(&self, p: Point) -> f64 {
        let (c, s) = self.major_dir();
        let (dx, dy) = (p.x - self.center.x, p.y - self.center.y);
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        (u * u) / (self.a * self.a) + (v * v) / (self.b * self.b)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.normalized_radius2(p) <= 1.0
    }
}

type Mat3 = [[f64; 3]; 3];

fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inv3(m: &Mat3) -> Option<Mat3> {
    let det = det3(m);
    let scale = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if !(det.abs() > 1e-12 * scale * scale * scale) {
        return None;
    }
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
            let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
            r[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) / det;
        }
    }
    Some(r)
}

fn mul3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    r
}

fn transpose(a: &Mat3) -> Mat3 {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = a[j][i];
        }
    }
    r
}

/// Real roots of `x^3 + p2 x^2 + p1 x + p0`.
fn cubic_roots(p2: f64, p1: f64, p0: f64) -> Vec<f64> {
    let q = (3.0 * p1 - p2 * p2) / 9.0;
    let r = (9.0 * p2 * p1 - 27.0 * p0 - 2.0 * p2 * p2 * p2) / 54.0;
    let disc = q * q * q + r * r;
    let shift = p2 / 3.0;
    let mut roots = Vec::new();
    if disc > 0.0 {
        let s = libm::cbrt(r + libm::sqrt(disc));
        let t = libm::cbrt(r - libm::sqrt(disc));
        roots.push(s + t - shift);
    } else if q == 0.0 {
        roots.push(-shift);
    } else {
        let rho = libm::sqrt(-q * q * q);
        let phi = libm::acos((r / rho).clamp(-1.0, 1.0));
        let m = 2.0 * libm::sqrt(-q);
        for k in 0..3 {
            roots.push(m * libm::cos((phi + 2.0 * PI * k as f64) / 3.0) - shift);
        }
    }
    // polish against cancellation in the closed form
    for x in &mut roots {
        for _ in 0..3 {
            let f = ((*x + p2) * *x + p1) * *x + p0;
            let df = (3.0 * *x + 2.0 * p2) * *x + p1;
            if df == 0.0 {
                break;
            }
            let step = f / df;
            if !step.is_finite() {
                break;
            }
            *x -= step;
        }
    }
    roots
}

/// Null vector of `m - lambda I` from the best-conditioned row cross product.
fn eigenvector(m: &Mat3, lambda: f64) -> Option<[f64; 3]> {
    let mut a = *m;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let cross = |u: &[f64; 3], v: &[f64; 3]| {
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    };
    let mut best: Option<([f64; 3], f64)> = None;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = cross(&a[i], &a[j]);
        let n = c.iter().map(|v| v * v).sum::<f64>();
        if best.is_none_or(|(_, bn)| n > bn) {
            best = Some((c, n));
        }
    }
    let (v, n) = best?;
    if !(n > 0.0) {
        return None;
    }
    let n = libm::sqrt(n);
    Some(v.map(|x| x / n))
}

/// Direct least-squares ellipse through `points`.
///
/// Needs at least 5 points that are not all collinear.
pub fn fit_ellipse(points: &[Point]) -> Result<Ellipse> {
    if points.len() < 5 {
        return Err(Error::Fit("need at least 5 points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let my = points.iter().map(|p| p.y).sum::<f64>() / n;
    let spread = points
        .iter()
        .map(|p| (p.x - mx) * (p.x - mx) + (p.y - my) * (p.y - my))
        .sum::<f64>()
        / n;
    if !(spread > 0.0) {
        return Err(Error::Fit("points are coincident"));
    }
    let scale = libm::sqrt(spread / 2.0);

    // scatter blocks for quadratic (x^2, xy, y^2) and linear (x, y, 1) terms
    let mut s1 = [[0.0; 3]; 3];
    let mut s2 = [[0.0; 3]; 3];
    let mut s3 = [[0.0; 3]; 3];
    for p in points {
        let (x, y) = ((p.x - mx) / scale, (p.y - my) / scale);
        let q = [x * x, x * y, y * y];
        let l = [x, y, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                s1[i][j] += q[i] * q[j];
                s2[i][j] += q[i] * l[j];
                s3[i][j] += l[i] * l[j];
            }
        }
    }
    let s3_inv = inv3(&s3).ok_or(Error::Fit("points are collinear"))?;
    // linear coefficients as a function of the quadratic ones
    let t = mul3(&s3_inv, &transpose(&s2)).map(|row| row.map(|v| -v));
    let reduced = {
        let st = mul3(&s2, &t);
        let mut m = s1;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += st[i][j];
            }
        }
        m
    };
    // premultiply by the inverse of the constraint block [[0,0,2],[0,-1,0],[2,0,0]]
    let m = [
        reduced[2].map(|v| v / 2.0),
        reduced[1].map(|v| -v),
        reduced[0].map(|v| v / 2.0),
    ];
    let trace = m[0][0] + m[1][1] + m[2][2];
    let minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0])
        + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
        + (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
    let roots = cubic_roots(-trace, minors, -det3(&m));

    let mut chosen: Option<([f64; 3], f64)> = None;
    for lambda in roots {
        let Some(v) = eigenvector(&m, lambda) else {
            continue;
        };
        let cond = 4.0 * v[0] * v[2] - v[1] * v[1];
        if cond > 0.0 && chosen.is_none_or(|(_, c)| cond > c) {
            chosen = Some((v, cond));
        }
    }
    let (quad, _) = chosen.ok_or(Error::Fit("no elliptical solution"))?;
    let lin: [f64; 3] = core::array::from_fn(|i| (0..3).map(|k| t[i][k] * quad[k]).sum());
    let e = conic_to_ellipse([quad[0], quad[1], quad[2], lin[0], lin[1], lin[2]])?;
    Ok(Ellipse {
        center: Point::new(mx + scale * e.center.x, my + scale * e.center.y),
        a: e.a * scale,
        b: e.b * scale,
        theta: e.theta,
    })
}

/// Geometric parameters of `A x^2 + B xy + C y^2 + D x + E y + F = 0`.
fn conic_to_ellipse(coef: [f64; 6]) -> Result<Ellipse> {
    let [mut a, mut b, mut c, mut d, mut e, mut f] = coef;
    if a + c < 0.0 {
        [a, b, c, d, e, f] = [-a, -b, -c, -d, -e, -f];
    }
    let det = 4.0 * a * c - b * b;
    if !(det > 0.0) {
        return Err(Error::Fit("conic is not an ellipse"));
    }
    let cx = (b * e - 2.0 * c * d) / det;
    let cy = (b * d - 2.0 * a * e) / det;
    let f0 = f + (d * cx + e * cy) / 2.0;
    let mean = (a + c) / 2.0;
    let half_gap = libm::hypot((a - c) / 2.0, b / 2.0);
    let (l_big, l_small) = (mean + half_gap, mean - half_gap);
    if !(f0 < 0.0) || !(l_small > 0.0) {
        return Err(Error::Fit("conic is imaginary or degenerate"));
    }
    let major = libm::sqrt(-f0 / l_small);
    let minor = libm::sqrt(-f0 / l_big);
    let theta = if (major - minor) <= 1e-6 * major {
        0.0
    } else {
        // eigenvector of the larger eigenvalue is the minor axis
        let phi = 0.5 * libm::atan2(b, a - c);
        wrap(phi + PI / 2.0, PI)
    };
    Ok(Ellipse {
        center: Point::new(cx, cy),
        a: major,
        b: minor,
        theta: if theta >= PI { 0.0 } else { theta },
    })
}

/// Ellipse with the same first and second moments as the point set (a
/// uniform filled ellipse maps onto itself).
pub fn moment_ellipse(points: &[Point]) -> Result<Ellipse> {
    if points.len() < 3 {
        return Err(Error::Fit("need at least 3 points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let my = points.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.x - mx, p.y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let (sxx, sxy, syy) = (sxx / n, sxy / n, syy / n);
    let mean = (sxx + syy) / 2.0;
    let half_gap = libm::hypot((sxx - syy) / 2.0, sxy);
    let (l1, l2) = (mean + half_gap, mean - half_gap);
    if !(l2 > 0.0) {
        return Err(Error::Fit("points are collinear"));
    }
    let a = 2.0 * libm::sqrt(l1);
    let b = 2.0 * libm::sqrt(l2);
    let theta = if (a - b) <= 1e-6 * a {
        0.0
    } else {
        wrap(0.5 * libm::atan2(2.0 * sxy, sxx - syy), PI)
    };
    Ok(Ellipse {
        center: Point::new(mx, my),
        a,
        b,
        theta: if theta >= PI { 0.0 } else { theta },
    })
}

/// Integer pixels on the ellipse outline, from `4 * ceil(2 pi a)` uniformly
/// spaced parameter samples rounded to the nearest pixel. Sorted by `(y, x)`.
pub fn rasterize_ellipse_perimeter(e: &Ellipse) -> Vec<(i64, i64)> {
    let samples = 4 * (libm::ceil(2.0 * PI * e.a) as usize).max(1);
    let (c, s) = e.major_dir();
    let mut px: Vec<(i64, i64)> = (0..samples)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / samples as f64;
            let (u, v) = (e.a * libm::cos(t), e.b * libm::sin(t));
            let x = e.center.x + u * c - v * s;
            let y = e.center.y + u * s + v * c;
            (libm::round(x) as i64, libm::round(y) as i64)
        })
        .collect();
    px.sort_unstable_by_key(|&(x, y)| (y, x));
    px.dedup();
    px
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(cx: f64, cy: f64, a: f64, b: f64, theta: f64, n: usize) -> Vec<Point> {
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                let (u, v) = (a * libm::cos(t), b * libm::sin(t));
                Point::new(
                    cx + u * libm::cos(theta) - v * libm::sin(theta),
                    cy + u * libm::sin(theta) + v * libm::cos(theta),
                )
            })
            .collect()
    }

    fn angle_diff(a: f64, b: f64) -> f64 {
        let d = wrap(a - b, PI);
        d.min(PI - d)
    }

    #[test]
    fn recovers_planted_ellipse() {
        let theta = 25f64.to_radians();
        let e = fit_ellipse(&sample(50.0, 40.0, 30.0, 10.0, theta, 100)).unwrap();
        assert!((e.center.x - 50.0).abs() < 0.5 && (e.center.y - 40.0).abs() < 0.5);
        assert!((e.a - 30.0).abs() < 0.3 && (e.b - 10.0).abs() < 0.1);
        assert!(angle_diff(e.theta, theta) < 1f64.to_radians());
    }

    #[test]
    fn circle_reports_zero_theta() {
        let e = fit_ellipse(&sample(3.0, -4.0, 7.0, 7.0, 0.0, 40)).unwrap();
        assert!((e.a - 7.0).abs() < 1e-6 && (e.b - 7.0).abs() < 1e-6);
        assert_eq!(e.theta, 0.0);
    }

    #[test]
    fn too_few_or_collinear() {
        let four = sample(0.0, 0.0, 5.0, 2.0, 0.0, 4);
        assert!(matches!(fit_ellipse(&four), Err(Error::Fit(_))));
        let line: Vec<Point> = (0..10)
            .map(|i| Point::new(i as f64, 2.0 * i as f64))
            .collect();
        assert!(fit_ellipse(&line).is_err());
    }

    #[test]
    fn translation_and_permutation_invariance() {
        let pts = sample(10.0, 20.0, 12.0, 5.0, 1.1, 37);
        let e0 = fit_ellipse(&pts).unwrap();
        let moved: Vec<Point> = pts
            .iter()
            .rev()
            .map(|p| Point::new(p.x + 123.5, p.y - 77.25))
            .collect();
        let e1 = fit_ellipse(&moved).unwrap();
        assert!((e1.center.x - e0.center.x - 123.5).abs() < 1e-6);
        assert!((e1.center.y - e0.center.y + 77.25).abs() < 1e-6);
        assert!((e1.a - e0.a).abs() < 1e-6 && (e1.b - e0.b).abs() < 1e-6);
        assert!(angle_diff(e1.theta, e0.theta) < 1e-6);
    }

    #[test]
    fn unit_circle_raster_is_the_eight_neighborhood() {
        // midpoint-circle oracle for r = 1: the 8 neighbors of the center
        let e = Ellipse {
            center: Point::new(0.0, 0.0),
            a: 1.0,
            b: 1.0,
            theta: 0.0,
        };
        let mut want: Vec<(i64, i64)> = Vec::new();
        for y in -1..=1 {
            for x in -1..=1 {
                if (x, y) != (0, 0) {
                    want.push((x, y));
                }
            }
        }
        assert_eq!(rasterize_ellipse_perimeter(&e), want);
    }

    #[test]
    fn radius_ten_ring_stays_in_band() {
        let e = Ellipse {
            center: Point::new(0.0, 0.0),
            a: 10.0,
            b: 10.0,
            theta: 0.0,
        };
        let ring = rasterize_ellipse_perimeter(&e);
        assert!(ring
            .iter()
            .all(|&(x, y)| ((libm::hypot(x as f64, y as f64)) - 10.0).abs() <= 1.0));
        // closed 8-connected loop: every pixel has exactly two ring neighbors or more
        for &(x, y) in &ring {
            let nb = ring
                .iter()
                .filter(|&&(u, v)| (u, v) != (x, y) && (u - x).abs() <= 1 && (v - y).abs() <= 1)
                .count();
            assert!(nb >= 2);
        }
    }

    #[test]
    fn moment_ellipse_of_filled_disk() {
        let mut pts = Vec::new();
        for y in -40..=40 {
            for x in -20..=20 {
                let (fx, fy) = (x as f64, y as f64);
                if fx * fx / 400.0 + fy * fy / 1600.0 <= 1.0 {
                    pts.push(Point::new(fx, fy));
                }
            }
        }
        let e = moment_ellipse(&pts).unwrap();
        assert!((e.a - 40.0).abs() < 1.0 && (e.b - 20.0).abs() < 1.0);
        assert!(angle_diff(e.theta, PI / 2.0) < 1e-9);
    }
}
