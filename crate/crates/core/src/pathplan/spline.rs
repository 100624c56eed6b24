//! Clamped uniform B-splines.

use alloc::vec::Vec;

use super::PathError;
use crate::geom::Vec3;

/// Basis weights of a clamped uniform B-spline sampled at fixed parameters.
///
/// Every planner evaluation uses the same `(n, K, samples)` triple, so the
/// weights are tabulated once and a curve costs one small matrix product.
#[derive(Clone, Debug, PartialEq)]
pub struct SplineBasis {
    n: usize,
    order: usize,
    samples: usize,
    weights: Vec<f64>,
}

/// Clamped uniform knot vector for `n` control points of order `order`:
/// `order` zeros, interior knots `1..spans`, `order` copies of `spans`.
pub fn clamped_knots(n: usize, order: usize) -> Vec<f64> {
    let spans = n + 1 - order;
    let mut knots = Vec::with_capacity(n + order);
    knots.extend(core::iter::repeat_n(0.0, order));
    knots.extend((1..spans).map(|i| i as f64));
    knots.extend(core::iter::repeat_n(spans as f64, order));
    knots
}

/// Cox–de Boor basis values `B_{i,order}(u)` for all `i`.
fn basis_at(knots: &[f64], n: usize, order: usize, u: f64) -> Vec<f64> {
    let last = knots[knots.len() - 1];
    // Order-1 (piecewise constant) basis; the right end belongs to the last
    // nonempty span so the curve reaches its final control point.
    let mut b: Vec<f64> = (0..knots.len() - 1)
        .map(|i| {
            let (a, c) = (knots[i], knots[i + 1]);
            let inside = if u >= last { a < c && c == last } else { a <= u && u < c };
            if inside {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    for k in 2..=order {
        for i in 0..knots.len() - k {
            let mut v = 0.0;
            let d1 = knots[i + k - 1] - knots[i];
            if d1 > 0.0 {
                v += (u - knots[i]) / d1 * b[i];
            }
            let d2 = knots[i + k] - knots[i + 1];
            if d2 > 0.0 {
                v += (knots[i + k] - u) / d2 * b[i + 1];
            }
            b[i] = v;
        }
    }
    b.truncate(n);
    b
}

impl SplineBasis {
    /// `samples_per_span * spans + 1` parameters, evenly spaced over the knot
    /// domain.
    pub fn new(n: usize, order: usize, samples_per_span: usize) -> Result<Self, PathError> {
        if order < 2 || n < order {
            return Err(PathError::Spline { n, order });
        }
        if samples_per_span == 0 {
            return Err(PathError::Sampling);
        }
        let spans = n + 1 - order;
        let samples = spans * samples_per_span + 1;
        let knots = clamped_knots(n, order);
        let mut weights = Vec::with_capacity(samples * n);
        for j in 0..samples {
            let u = spans as f64 * j as f64 / (samples - 1) as f64;
            weights.extend(basis_at(&knots, n, order, u));
        }
        Ok(Self {
            n,
            order,
            samples,
            weights,
        })
    }

    pub fn control_points(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Parameter of sample `j` on the knot domain.
    pub fn parameter(&self, j: usize) -> f64 {
        (self.n + 1 - self.order) as f64 * j as f64 / (self.samples - 1) as f64
    }

    pub fn evaluate_into(&self, ctrl: &[Vec3], out: &mut Vec<Vec3>) {
        debug_assert_eq!(ctrl.len(), self.n);
        out.clear();
        for row in self.weights.chunks_exact(self.n) {
            let mut p = Vec3::ZERO;
            for (w, c) in row.iter().zip(ctrl) {
                if *w != 0.0 {
                    p += *c * *w;
                }
            }
            out.push(p);
        }
    }

    pub fn evaluate(&self, ctrl: &[Vec3]) -> Vec<Vec3> {
        let mut out = Vec::with_capacity(self.samples);
        self.evaluate_into(ctrl, &mut out);
        out
    }
}

/// Samples a spline through `ctrl`; `samples_per_span` points per knot span.
pub fn evaluate_spline(ctrl: &[Vec3], order: usize, samples_per_span: usize) -> Result<Vec<Vec3>, PathError> {
    Ok(SplineBasis::new(ctrl.len(), order, samples_per_span)?.evaluate(ctrl))
}

/// Greville abscissa of control point `i`: the parameter it most influences.
pub fn greville(n: usize, order: usize, i: usize) -> f64 {
    let knots = clamped_knots(n, order);
    let deg = order - 1;
    if deg == 0 {
        return knots[i];
    }
    knots[i + 1..=i + deg].iter().sum::<f64>() / deg as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// de Boor's triangular scheme, written independently of the basis table.
    fn de_boor(ctrl: &[Vec3], order: usize, u: f64) -> Vec3 {
        let knots = clamped_knots(ctrl.len(), order);
        let p = order - 1;
        let top = knots[knots.len() - 1];
        let mut k = p;
        while k + 1 < ctrl.len() && !(u < knots[k + 1]) {
            k += 1;
        }
        if u >= top {
            k = ctrl.len() - 1;
        }
        let mut d: Vec<Vec3> = (0..=p).map(|j| ctrl[j + k - p]).collect();
        for r in 1..=p {
            for j in (r..=p).rev() {
                let i = j + k - p;
                let denom = knots[i + p + 1 - r] - knots[i];
                let a = if denom > 0.0 { (u - knots[i]) / denom } else { 0.0 };
                d[j] = d[j - 1] * (1.0 - a) + d[j] * a;
            }
        }
        d[p]
    }

    #[test]
    fn matches_de_boor_oracle() {
        let ctrl = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(3.0, 7.0, 1.0),
            Vec3::new(8.0, -2.0, 5.0),
            Vec3::new(12.0, 4.0, -3.0),
        ];
        let basis = SplineBasis::new(4, 3, 4).unwrap();
        let pts = basis.evaluate(&ctrl);
        assert_eq!(pts.len(), 9);
        for j in [0usize, 2, 4, 6, 8] {
            let want = de_boor(&ctrl, 3, basis.parameter(j));
            assert!((pts[j] - want).norm() < 1e-9, "sample {j}: {:?} vs {want:?}", pts[j]);
        }
    }

    #[test]
    fn interpolates_endpoints_and_identical_points() {
        let p = Vec3::new(4.0, 5.0, 6.0);
        let pts = evaluate_spline(&[p; 6], 3, 20).unwrap();
        assert_eq!(pts.len(), 81);
        assert!(pts.iter().all(|q| (*q - p).norm() < 1e-12));

        let ctrl: Vec<Vec3> = (0..6).map(|i| Vec3::new(i as f64 * 10.0, (i * i) as f64, 0.0)).collect();
        let pts = evaluate_spline(&ctrl, 3, 20).unwrap();
        assert!((pts[0] - ctrl[0]).norm() < 1e-12);
        assert!((pts[80] - ctrl[5]).norm() < 1e-12);
    }

    #[test]
    fn collinear_points_stay_on_segment() {
        let a = Vec3::new(0.0, 0.0, 100.0);
        let b = Vec3::new(600.0, 800.0, 100.0);
        let ctrl: Vec<Vec3> = (0..6).map(|i| a.lerp(b, i as f64 / 5.0)).collect();
        let pts = evaluate_spline(&ctrl, 3, 20).unwrap();
        let len: f64 = pts.windows(2).map(|w| w[0].distance(w[1])).sum();
        assert!((len - 1000.0).abs() / 1000.0 < 1e-3);
        for p in pts {
            let t = (p - a).dot(b - a) / (b - a).norm_sq();
            assert!((p - a.lerp(b, t)).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_short_control_polygon() {
        assert_eq!(SplineBasis::new(2, 3, 10).unwrap_err(), PathError::Spline { n: 2, order: 3 });
    }

    #[test]
    fn basis_is_partition_of_unity() {
        let b = SplineBasis::new(7, 4, 13).unwrap();
        for row in b.weights.chunks_exact(7) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|w| *w >= -1e-15));
        }
    }

    #[test]
    fn greville_spans_domain() {
        assert_eq!(greville(6, 3, 0), 0.0);
        assert_eq!(greville(6, 3, 5), 4.0);
        assert_eq!(greville(6, 3, 2), 1.5);
    }
}
