//! Exact integration rules for linear fields on simplices.

/// Degree-2 tetrahedron rule: 4 symmetric points, equal weights.
/// Exact for quadratic integrands, which covers products of two linear
/// nodal fields.
pub const TET_QUAD_ALPHA: f64 = 0.585_410_196_624_968_5;
pub const TET_QUAD_BETA: f64 = 0.138_196_601_125_010_5;

/// Barycentric coordinates of the 4-point degree-2 tet rule.
pub fn tet_points() -> [[f64; 4]; 4] {
    let (a, b) = (TET_QUAD_ALPHA, TET_QUAD_BETA);
    [[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]]
}

/// Signed volume of a tetrahedron.
pub fn tet_volume(p0: [f64; 3], p1: [f64; 3], p2: [f64; 3], p3: [f64; 3]) -> f64 {
    let a = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
    let b = [p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]];
    let c = [p3[0] - p0[0], p3[1] - p0[1], p3[2] - p0[2]];
    (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0]))
        / 6.0
}

/// Degree-2 triangle rule: edge midpoints with equal weights.
pub fn tri_points() -> [[f64; 3]; 3] {
    [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]
}

/// Triangle area from vertices.
pub fn tri_area(p0: [f64; 3], p1: [f64; 3], p2: [f64; 3]) -> f64 {
    let a = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
    let b = [p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]];
    let cx = a[1] * b[2] - a[2] * b[1];
    let cy = a[2] * b[0] - a[0] * b[2];
    let cz = a[0] * b[1] - a[1] * b[0];
    0.5 * (cx * cx + cy * cy + cz * cz).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_tet_volume() {
        let v = tet_volume(
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        );
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_exactness_on_tet() {
        // integral of lambda_i lambda_j over a tet: V/10 (i=j), V/20 (i!=j)
        let vol = 1.0 / 6.0;
        let pts = tet_points();
        for i in 0..4 {
            for j in 0..4 {
                let quad: f64 = pts.iter().map(|bary| bary[i] * bary[j] * vol / 4.0).sum();
                let exact = if i == j { vol / 10.0 } else { vol / 20.0 };
                assert!(
                    (quad - exact).abs() < 1e-15,
                    "lambda_{i} lambda_{j}: {quad} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn quadratic_exactness_on_triangle() {
        // integral of lambda_i lambda_j over a triangle: A/6 (i=j), A/12 (i!=j)
        let area = 0.5;
        let pts = tri_points();
        for i in 0..3 {
            for j in 0..3 {
                let quad: f64 = pts.iter().map(|b| b[i] * b[j] * area / 3.0).sum();
                let exact = if i == j { area / 6.0 } else { area / 12.0 };
                assert!((quad - exact).abs() < 1e-15);
            }
        }
    }
}
