//! Finite-difference and finite-element reference solutions on radial grids.
//!
//! These solvers share nothing with the quadrature-based formulas beyond the
//! model's density, so agreement between the two is a meaningful check.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::WeightedModelSpace;
use crate::quadrature::{integrate_tol, Tolerance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Uniform,
    /// Nodes in geometric progression; needs a positive inner radius.
    Geometric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialGrid {
    /// Piecewise-linear interpolation.
    pub fn interpolate(&self, r: f64) -> f64 {
        let n = &self.nodes;
        let i = n.partition_point(|&x| x <= r).clamp(1, n.len() - 1);
        let t = (r - n[i - 1]) / (n[i] - n[i - 1]);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }
}

/// Solves `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i` (Thomas algorithm).
///
/// `sub[0]` and `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n || n == 0 {
        return Err(Error::InvalidArgument(format!("tridiagonal system with mismatched lengths ({n})")));
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::SingularSystem(0));
    }
    c[0] = sup[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - sub[i] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::SingularSystem(i));
        }
        c[i] = sup[i] / beta;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / beta;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

fn make_nodes(lo: f64, hi: f64, cells: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if cells < 16 {
        return Err(Error::InvalidArgument(format!("grid needs at least 16 cells, got {cells}")));
    }
    match spacing {
        Spacing::Uniform => Ok(crate::profile::linear_grid(lo, hi, cells + 1)),
        Spacing::Geometric if lo > 0.0 => Ok(crate::profile::log_grid(lo, hi, cells + 1)),
        Spacing::Geometric => Err(Error::InvalidArgument(format!("geometric spacing needs a positive start, got {lo}"))),
    }
}

fn check_annulus(model: &WeightedModelSpace, rho: f64, big_r: f64) -> Result<()> {
    if !(0.0 < rho && rho < big_r && big_r < model.domain_sup()) {
        return Err(Error::InvalidArgument(format!("need 0 < ρ < R inside the model, got ρ = {rho}, R = {big_r}")));
    }
    Ok(())
}

// Conductance of each cell: density at the midpoint over the cell width.
fn conductances(model: &WeightedModelSpace, nodes: &[f64]) -> Result<Vec<f64>> {
    nodes
        .windows(2)
        .map(|c| {
            let k = model.area_density(0.5 * (c[0] + c[1])) / (c[1] - c[0]);
            if k.is_finite() && k > 0.0 {
                Ok(k)
            } else {
                Err(Error::Domain { r: 0.5 * (c[0] + c[1]) })
            }
        })
        .collect()
}

/// Conservative finite differences for `(w^{m-1} e^f u')' = 0`, `u(ρ) = 1`, `u(R) = 0`.
pub fn solve_radial_bvp(model: &WeightedModelSpace, rho: f64, big_r: f64, cells: usize, spacing: Spacing) -> Result<RadialGrid> {
    check_annulus(model, rho, big_r)?;
    let nodes = make_nodes(rho, big_r, cells, spacing)?;
    let k = conductances(model, &nodes)?;
    let n = cells - 1;
    let (mut sub, mut diag, mut sup, mut rhs) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for j in 0..n {
        // Interior node j + 1 sits between cells j and j + 1.
        sub[j] = -k[j];
        diag[j] = k[j] + k[j + 1];
        sup[j] = -k[j + 1];
    }
    rhs[0] = k[0];
    let inner = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
    let mut values = Vec::with_capacity(cells + 1);
    values.push(1.0);
    values.extend(inner);
    values.push(0.0);
    Ok(RadialGrid { nodes, values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMinimizer {
    /// Weighted Dirichlet energy of the minimizer, including the sphere area.
    pub energy: f64,
    pub grid: RadialGrid,
}

/// Minimizes the weighted Dirichlet energy over continuous piecewise-linear
/// functions equal to 1 at `ρ` and 0 at `R`.
///
/// The stiffness matrix is assembled element by element and the boundary
/// values are lifted out before solving.
pub fn minimize_dirichlet_energy(
    model: &WeightedModelSpace,
    rho: f64,
    big_r: f64,
    cells: usize,
    spacing: Spacing,
) -> Result<EnergyMinimizer> {
    check_annulus(model, rho, big_r)?;
    let nodes = make_nodes(rho, big_r, cells, spacing)?;
    let k = conductances(model, &nodes)?;
    let size = cells + 1;
    let (mut sub, mut diag, mut sup) = (vec![0.0; size], vec![0.0; size], vec![0.0; size]);
    for (e, &ke) in k.iter().enumerate() {
        diag[e] += ke;
        diag[e + 1] += ke;
        sup[e] -= ke;
        sub[e + 1] -= ke;
    }
    let mut u = vec![0.0; size];
    u[0] = 1.0;
    // Lift the Dirichlet data into the right-hand side of the free rows.
    let free = 1..cells;
    let mut rhs = vec![0.0; cells - 1];
    rhs[0] -= sub[1] * u[0];
    rhs[cells - 2] -= sup[cells - 1] * u[cells];
    let mut s = sub[free.clone()].to_vec();
    let d = diag[free.clone()].to_vec();
    let mut p = sup[free.clone()].to_vec();
    s[0] = 0.0;
    p[cells - 2] = 0.0;
    let inner = solve_tridiagonal(&s, &d, &p, &rhs)?;
    u[free].copy_from_slice(&inner);
    let energy = model.unit_sphere_area()
        * k.iter()
            .enumerate()
            .map(|(e, ke)| {
                let du = u[e + 1] - u[e];
                ke * du * du
            })
            .sum::<f64>();
    Ok(EnergyMinimizer { energy, grid: RadialGrid { nodes, values: u } })
}

/// Finite-volume solution of `φ'' + φ'((m-1) w'/w + f') = -1` on `[0, R]`
/// with `φ'(0) = 0` and `φ(R) = 0`.
///
/// The pole needs no special treatment in flux form: the density vanishes
/// there, so the first control volume has zero flux through its left end.
pub fn solve_exit_time(model: &WeightedModelSpace, big_r: f64, cells: usize) -> Result<RadialGrid> {
    if !(big_r > 0.0 && big_r < model.domain_sup()) {
        return Err(Error::InvalidArgument(format!("radius {big_r} outside the model domain")));
    }
    let nodes = make_nodes(0.0, big_r, cells, Spacing::Uniform)?;
    let k = conductances(model, &nodes)?;
    let mids: Vec<f64> = nodes.windows(2).map(|c| 0.5 * (c[0] + c[1])).collect();
    let mass = |a: f64, b: f64| integrate_tol(|t| model.area_density(t), a, b, Tolerance::new(1e-300, 1e-12)).map(|q| q.value);
    let n = cells;
    let (mut sub, mut diag, mut sup, mut rhs) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    diag[0] = k[0];
    sup[0] = -k[0];
    rhs[0] = mass(0.0, mids[0])?;
    for i in 1..n {
        sub[i] = -k[i - 1];
        diag[i] = k[i - 1] + k[i];
        sup[i] = if i + 1 < n { -k[i] } else { 0.0 };
        rhs[i] = mass(mids[i - 1], mids[i])?;
    }
    let mut values = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
    values.push(0.0);
    Ok(RadialGrid { nodes, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::WarpingFunction;

    fn e3() -> WeightedModelSpace {
        WeightedModelSpace::unweighted(3, WarpingFunction::space_form(0.0).unwrap()).unwrap()
    }

    #[test]
    fn thomas_solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3, 5, 3] has x = [1, 1, 1]
        let x = solve_tridiagonal(&[0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0], &[3.0, 5.0, 3.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
        assert!(matches!(solve_tridiagonal(&[0.0], &[0.0], &[0.0], &[1.0]), Err(Error::SingularSystem(0))));
    }

    #[test]
    fn euclidean_potential_on_grid() {
        let g = solve_radial_bvp(&e3(), 1.0, 2.0, 1024, Spacing::Uniform).unwrap();
        assert!((g.interpolate(1.5) - 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn energy_minimizer_matches_difference_scheme() {
        for spacing in [Spacing::Uniform, Spacing::Geometric] {
            let a = solve_radial_bvp(&e3(), 0.5, 3.0, 200, spacing).unwrap();
            let b = minimize_dirichlet_energy(&e3(), 0.5, 3.0, 200, spacing).unwrap();
            for (x, y) in a.values.iter().zip(&b.grid.values) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn discrete_energy_is_series_conductance() {
        // In one dimension the minimal energy is the sphere area over the summed cell resistances.
        let model = e3();
        let out = minimize_dirichlet_energy(&model, 1.0, 2.0, 64, Spacing::Geometric).unwrap();
        let nodes = &out.grid.nodes;
        let resistance: f64 = conductances(&model, nodes).unwrap().iter().map(|k| 1.0 / k).sum();
        assert!((out.energy - model.unit_sphere_area() / resistance).abs() < 1e-12 * out.energy);
    }

    #[test]
    fn energy_blows_up_for_thin_annuli() {
        let wide = minimize_dirichlet_energy(&e3(), 1.0, 2.0, 32, Spacing::Uniform).unwrap().energy;
        let thin = minimize_dirichlet_energy(&e3(), 1.0, 1.001, 32, Spacing::Uniform).unwrap().energy;
        assert!(thin > 100.0 * wide);
    }

    #[test]
    fn exit_time_in_euclidean_ball() {
        let g = solve_exit_time(&e3(), 1.0, 512).unwrap();
        for (r, v) in g.nodes.iter().zip(&g.values) {
            assert!((v - (1.0 - r * r) / 6.0).abs() < 1e-5);
        }
    }

    #[test]
    fn small_grids_are_rejected() {
        assert!(solve_radial_bvp(&e3(), 1.0, 2.0, 8, Spacing::Uniform).is_err());
        assert!(solve_radial_bvp(&e3(), 2.0, 1.0, 64, Spacing::Uniform).is_err());
    }
}
