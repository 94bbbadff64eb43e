//! CSV tables and legacy-VTK field snapshots.

use crate::equations::{Cons, PhysicsModel};
use crate::error::{Error, Result};
use crate::grid::Mesh;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// One row of a convergence/error table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRow {
    pub mesh: String,
    #[serde(rename = "Nx")]
    pub nx: usize,
    #[serde(rename = "Ny")]
    pub ny: usize,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "Linf")]
    pub linf: f64,
    #[serde(rename = "order_L1")]
    pub order_l1: Option<f64>,
    #[serde(rename = "order_Linf")]
    pub order_linf: Option<f64>,
    #[serde(rename = "N_levels_avg")]
    pub n_levels_avg: f64,
    #[serde(rename = "Lw_max")]
    pub lw_max: f64,
    pub runtime_s: f64,
}

/// One row of the per-step diagnostics series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    #[serde(rename = "N_levels")]
    pub n_levels: usize,
    pub min_volume: f64,
    pub conservation_residual: f64,
}

/// Observed orders log2(e_coarse / e_fine) scaled by the refinement ratio.
pub fn fill_orders(rows: &mut [ErrorRow]) {
    for k in 1..rows.len() {
        let ratio = (rows[k].nx as f64 / rows[k - 1].nx as f64).ln();
        rows[k].order_l1 = Some((rows[k - 1].l1 / rows[k].l1).ln() / ratio);
        rows[k].order_linf = Some((rows[k - 1].linf / rows[k].linf).ln() / ratio);
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, csv_string(rows)?)?;
    Ok(())
}

/// Legacy-VTK unstructured grid with the conserved (and for Euler the
/// primitive) components as cell scalars.
pub fn vtk_string(mesh: &Mesh, averages: &[Cons], model: &PhysicsModel, title: &str) -> String {
    let g = mesh.grid;
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(s, "{}", title.replace('\n', " "));
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.vertices.len());
    for p in &mesh.vertices {
        let _ = writeln!(s, "{:e} {:e} 0", p[0], p[1]);
    }
    let n = g.num_cells();
    let _ = writeln!(s, "CELLS {} {}", n, 5 * n);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let _ = writeln!(
                s,
                "4 {} {} {} {}",
                g.vertex(i, j),
                g.vertex(i + 1, j),
                g.vertex(i + 1, j + 1),
                g.vertex(i, j + 1)
            );
        }
    }
    let _ = writeln!(s, "CELL_TYPES {}", n);
    for _ in 0..n {
        s.push_str("9\n");
    }
    let _ = writeln!(s, "CELL_DATA {}", n);
    let mut scalar = |name: &str, f: &dyn Fn(&Cons) -> f64| {
        let _ = writeln!(s, "SCALARS {} double 1\nLOOKUP_TABLE default", name);
        for u in averages {
            let _ = writeln!(s, "{:e}", f(u));
        }
    };
    match *model {
        PhysicsModel::Advection { .. } => scalar("u", &|u| u[0]),
        PhysicsModel::Euler { gamma } => {
            scalar("rho", &|u| u[0]);
            scalar("rho_vx", &|u| u[1]);
            scalar("rho_vy", &|u| u[2]);
            scalar("E", &|u| u[3]);
            scalar("vx", &|u| u[1] / u[0]);
            scalar("vy", &|u| u[2] / u[0]);
            scalar("p", &move |u| crate::equations::pressure(gamma, u));
        }
    }
    s
}

pub fn write_vtk(path: &Path, mesh: &Mesh, averages: &[Cons], model: &PhysicsModel, title: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, vtk_string(mesh, averages, model, title))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Domain, Grid};

    #[test]
    fn error_table_header_and_blank_orders() {
        let mut rows = vec![
            ErrorRow {
                mesh: "40x40".into(),
                nx: 40,
                ny: 40,
                l1: 8e-4,
                linf: 1e-3,
                order_l1: None,
                order_linf: None,
                n_levels_avg: 2.0,
                lw_max: 10.0,
                runtime_s: 1.5,
            },
            ErrorRow {
                mesh: "80x80".into(),
                nx: 80,
                ny: 80,
                l1: 1e-4,
                linf: 2.5e-4,
                order_l1: None,
                order_linf: None,
                n_levels_avg: 2.0,
                lw_max: 20.0,
                runtime_s: 6.0,
            },
        ];
        fill_orders(&mut rows);
        assert!((rows[1].order_l1.unwrap() - 3.0).abs() < 1e-12);
        let text = csv_string(&rows).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "mesh,Nx,Ny,L1,Linf,order_L1,order_Linf,N_levels_avg,Lw_max,runtime_s"
        );
        assert_eq!(lines.next().unwrap(), "40x40,40,40,0.0008,0.001,,,2.0,10.0,1.5");
    }

    #[test]
    fn vtk_layout() {
        let mesh = Mesh::uniform(Grid::new(2, 1), Domain::unit());
        let avgs = vec![[1.0, 0.0, 0.0, 2.5]; 2];
        let v = vtk_string(&mesh, &avgs, &PhysicsModel::Euler { gamma: 1.4 }, "t");
        assert!(v.contains("POINTS 6 double"));
        assert!(v.contains("CELLS 2 10\n4 0 1 4 3\n4 1 2 5 4\n"));
        assert!(v.contains("CELL_TYPES 2\n9\n9\n"));
        assert_eq!(v.matches("SCALARS").count(), 7);
        assert_eq!(v, vtk_string(&mesh, &avgs, &PhysicsModel::Euler { gamma: 1.4 }, "t"));
    }
}
