use proptest::prelude::*;
use rmm::geometry::{
    basis_integral, bilinear_coefficients, cell_at, check_regular, exact_moments, BasisFrame, CellGeometry, MomentSet, Point, EXPONENTS,
};
use rmm::grid::{Domain, Grid, Mesh};

/// Polygon moments by Green's theorem, independent of the bilinear map.
fn polygon_moments(v: &[Point; 4]) -> [f64; 6] {
    let mut m = [0.0; 6];
    for k in 0..4 {
        let [x0, y0] = v[k];
        let [x1, y1] = v[(k + 1) % 4];
        let c = x0 * y1 - x1 * y0;
        m[0] += c / 2.0;
        m[1] += c * (x0 + x1) / 6.0;
        m[2] += c * (y0 + y1) / 6.0;
        m[3] += c * (x0 * x0 + x0 * x1 + x1 * x1) / 12.0;
        m[4] += c * (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) / 24.0;
        m[5] += c * (y0 * y0 + y0 * y1 + y1 * y1) / 12.0;
    }
    m
}

fn quad() -> impl Strategy<Value = CellGeometry> {
    (
        prop::array::uniform8(-0.2f64..0.2),
        -3.0f64..3.0,
        -3.0f64..3.0,
        0.1f64..4.0,
    )
        .prop_map(|(d, cx, cy, s)| {
            let base = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
            CellGeometry::new(std::array::from_fn(|k| [cx + s * (base[k][0] + d[2 * k]), cy + s * (base[k][1] + d[2 * k + 1])]))
        })
}

#[test]
fn unit_square_moments() {
    let m = exact_moments(&CellGeometry::new([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]));
    let expect = [1.0, 0.5, 0.5, 1.0 / 3.0, 0.25, 1.0 / 3.0];
    for (a, b) in m.to_array().iter().zip(expect) {
        assert!((a - b).abs() < 1e-15, "{} vs {}", a, b);
    }
}

#[test]
fn bilinear_coefficients_of_a_trapezoid() {
    let c = bilinear_coefficients(&CellGeometry::new([[0.0, 0.0], [2.0, 0.0], [1.5, 1.0], [0.5, 1.0]])).unwrap();
    let p = c.map(0.0, 0.0);
    assert!((p[0] - 1.0).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    let corner = c.map(-0.5, -0.5);
    assert!(corner[0].abs() < 1e-15 && corner[1].abs() < 1e-15);
    let top = c.map(0.5, 0.5);
    assert!((top[0] - 1.5).abs() < 1e-15 && (top[1] - 1.0).abs() < 1e-15);
}

#[test]
fn degenerate_cells_are_rejected() {
    let flat = CellGeometry::new([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]);
    assert!(check_regular(&flat).is_err());
    let bow = CellGeometry::new([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
    assert!(check_regular(&bow).is_err());
    let cw = CellGeometry::new([[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]);
    assert!(check_regular(&cw).is_err());
}

#[test]
fn uniform_mesh_tiles_the_domain() {
    let mesh = Mesh::uniform(Grid::new(5, 3), Domain::new(-1.0, 2.0, 0.0, 1.5));
    let total: f64 = mesh.exact_moments().iter().map(|m| m.m00).sum();
    assert!((total - 4.5).abs() < 1e-14);
    let cx: f64 = mesh.exact_moments().iter().map(|m| m.m10).sum();
    assert!((cx - 4.5 * 0.5).abs() < 1e-13);
}

proptest! {
    #[test]
    fn moments_match_polygon_formulas(cell in quad()) {
        let m = exact_moments(&cell).to_array();
        let p = polygon_moments(&cell.vertices);
        let r = cell.vertices.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max).max(1.0);
        for (k, (s, t)) in EXPONENTS.iter().enumerate() {
            let scale = p[0] * r.powi((s + t) as i32);
            prop_assert!((m[k] - p[k]).abs() <= 1e-13 * scale, "moment {} {} vs {}", k, m[k], p[k]);
        }
    }

    #[test]
    fn translation_shifts_moments_binomially(cell in quad(), dx in -2.0f64..2.0, dy in -2.0f64..2.0) {
        let m = exact_moments(&cell);
        let moved = exact_moments(&cell.translated(dx, dy));
        let expect = m.translated(dx, dy);
        for (a, b) in moved.to_array().iter().zip(expect.to_array()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn centred_basis_integrals(cell in quad()) {
        let m: MomentSet = exact_moments(&cell);
        let frame = BasisFrame::new(m.centroid(), m.m00);
        prop_assert!((basis_integral(&m, &frame, 0, 0).unwrap() - m.m00).abs() <= 1e-14 * m.m00);
        prop_assert!(basis_integral(&m, &frame, 1, 0).unwrap().abs() <= 1e-12 * m.m00);
        prop_assert!(basis_integral(&m, &frame, 0, 1).unwrap().abs() <= 1e-12 * m.m00);
        prop_assert!(basis_integral(&m, &frame, 2, 0).unwrap() > 0.0);
    }

    #[test]
    fn moving_cells_stay_polygons(cell in quad(), w in prop::array::uniform8(-1.0f64..1.0), tau in 0.0f64..0.05) {
        let vel: [Point; 4] = std::array::from_fn(|k| [w[2 * k], w[2 * k + 1]]);
        if let Ok(c) = cell_at(&cell, &vel, tau) {
            let m = exact_moments(&c).to_array();
            let p = polygon_moments(&c.vertices);
            prop_assert!((m[0] - p[0]).abs() <= 1e-13 * p[0].abs().max(1.0));
        }
    }
}
