//! Local residuals, their Riesz representatives and the dual-norm
//! indicators `r_i`, `r_i*`.

use rayon::prelude::*;

use crate::error::Result;
use crate::fem::{FineOperator, LocalOperator};
use crate::grid::Neighborhood;
use crate::offline::{Basis, BasisKind};
use crate::patch::PatchVector;

/// Relative threshold below which a representative is never admitted.
pub const DROP_TOLERANCE: f64 = 1e-13;

/// Riesz representative `φ_i ∈ V_i` of a global residual vector and its
/// energy norm `‖φ_i‖_{V_i} = ‖R_i‖_{V_i*}`.
pub fn riesz_representative(local: &LocalOperator, neigh: &Neighborhood, residual: &[f64]) -> (Vec<f64>, f64) {
    let r_loc: Vec<f64> = neigh.interior_dofs.iter().map(|&d| residual[d]).collect();
    if r_loc.iter().all(|&v| v == 0.0) {
        return (vec![0.0; r_loc.len()], 0.0);
    }
    let phi = local.solve(&r_loc);
    let e: f64 = phi.iter().zip(&r_loc).map(|(a, b)| a * b).sum();
    (phi, e.max(0.0).sqrt())
}

/// Local interior vector of `ω_i` as a window-stored fine vector.
pub fn local_to_patch(neigh: &Neighborhood, local: &[f64]) -> PatchVector {
    let mut pv = PatchVector::zeros(neigh.window);
    for (&k, &v) in neigh.interior.iter().zip(local) {
        pv.values[k] = v;
    }
    pv
}

type Representative = (Vec<f64>, f64);

/// Indicators and cached representatives for every interior neighborhood.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub iteration: usize,
    pub r: Vec<f64>,
    pub r_star: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
    pub psi: Vec<Vec<f64>>,
}

impl ResidualReport {
    pub fn sum_r_sq(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum()
    }

    pub fn sum_rstar_sq(&self) -> f64 {
        self.r_star.iter().map(|x| x * x).sum()
    }

    /// The cached representative of neighborhood `i` as an online basis
    /// candidate, or `None` when its norm falls under the drop threshold.
    pub fn candidate(&self, op: &FineOperator, neigh: &Neighborhood, kind: BasisKind, rhs_norm: f64) -> Option<Basis> {
        let i = neigh.index;
        let (vec, norm) = match kind {
            BasisKind::OnlineDual => (&self.psi[i], self.r_star[i]),
            _ => (&self.phi[i], self.r[i]),
        };
        if !(norm >= DROP_TOLERANCE * rhs_norm.max(1.0)) {
            return None;
        }
        Basis::normalized(i, kind, local_to_patch(neigh, vec), op).ok()
    }
}

/// Primal residual `F − A u_ms` and dual residual `Ĝ − A z_ms`, then one
/// local solve per neighborhood for each, in parallel.
#[allow(clippy::too_many_arguments)]
pub fn all_indicators(
    op: &FineOperator,
    neighborhoods: &[Neighborhood],
    locals: &[LocalOperator],
    load: &[f64],
    goal: &[f64],
    u_ms: &[f64],
    z_ms: &[f64],
    iteration: usize,
) -> Result<ResidualReport> {
    let res_u: Vec<f64> = load.iter().zip(op.apply(u_ms).iter()).map(|(f, a)| f - a).collect();
    let res_z: Vec<f64> = goal.iter().zip(op.apply(z_ms).iter()).map(|(g, a)| g - a).collect();
    let per: Vec<(Representative, Representative)> = neighborhoods
        .par_iter()
        .zip(locals.par_iter())
        .map(|(neigh, local)| {
            (
                riesz_representative(local, neigh, &res_u),
                riesz_representative(local, neigh, &res_z),
            )
        })
        .collect();
    let mut report = ResidualReport {
        iteration,
        r: Vec::with_capacity(per.len()),
        r_star: Vec::with_capacity(per.len()),
        phi: Vec::with_capacity(per.len()),
        psi: Vec::with_capacity(per.len()),
    };
    for ((phi, r), (psi, rs)) in per {
        report.r.push(r);
        report.r_star.push(rs);
        report.phi.push(phi);
        report.psi.push(psi);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::{extend_space, solve_coarse, CoarseSystem, Which};
    use crate::fem::{assemble_functional, solve_dirichlet, PermeabilityField};
    use crate::grid::GridPair;
    use crate::offline::{build_offline, KappaTildeNodes};

    fn setup(cn: usize, r: usize) -> (GridPair, PermeabilityField, Vec<f64>, Vec<f64>) {
        let g = GridPair::new(cn, cn, r).unwrap();
        let (nx, ny) = (g.fine_nx(), g.fine_ny());
        let vals = (0..nx * ny)
            .map(|c| if (c / nx) % 4 == 1 { 300.0 } else { 1.0 })
            .collect();
        let f_dens: Vec<f64> = (0..nx * ny).map(|c| if c % nx < nx / 2 { 1.0 } else { 0.0 }).collect();
        let g_dens: Vec<f64> = (0..nx * ny)
            .map(|c| if c / nx < 2 && c % nx < 2 { 1.0 } else { 0.0 })
            .collect();
        (g, PermeabilityField::new(nx, ny, vals).unwrap(), f_dens, g_dens)
    }

    #[test]
    fn riesz_identity_and_zero_residual() {
        let (g, f, fd, gd) = setup(4, 4);
        let (model, space) = build_offline(&g, &f, 2, KappaTildeNodes::All).unwrap();
        let load = assemble_functional(&g, &fd, 1.0).unwrap();
        let goal = assemble_functional(&g, &gd, 1.0).unwrap();
        let sys = CoarseSystem::assemble(&space, &load, &goal).unwrap();
        let u = solve_coarse(&space, &sys, Which::Primal).unwrap();
        let z = solve_coarse(&space, &sys, Which::Dual).unwrap();
        let rep = all_indicators(
            &model.operator,
            &model.neighborhoods,
            &model.locals,
            &load,
            &goal,
            &u,
            &z,
            0,
        )
        .unwrap();
        for (i, local) in model.locals.iter().enumerate() {
            let e = local.energy(&rep.phi[i]);
            assert!((e - rep.r[i] * rep.r[i]).abs() <= 1e-10 * e.max(1e-300));
        }
        assert!(rep.r.iter().all(|&x| x > 0.0));

        let uf = solve_dirichlet(&model.operator, &load).unwrap();
        let zf = solve_dirichlet(&model.operator, &goal).unwrap();
        let exact = all_indicators(
            &model.operator,
            &model.neighborhoods,
            &model.locals,
            &load,
            &goal,
            &uf,
            &zf,
            0,
        )
        .unwrap();
        let scale = rep.r.iter().cloned().fold(0.0, f64::max);
        assert!(exact.r.iter().chain(&exact.r_star).all(|&x| x <= 1e-10 * scale));
    }

    #[test]
    fn online_basis_kills_its_residual() {
        let (g, f, fd, gd) = setup(4, 4);
        let (model, mut space) = build_offline(&g, &f, 1, KappaTildeNodes::All).unwrap();
        let load = assemble_functional(&g, &fd, 1.0).unwrap();
        let goal = assemble_functional(&g, &gd, 1.0).unwrap();
        let mut sys = CoarseSystem::assemble(&space, &load, &goal).unwrap();
        let u = solve_coarse(&space, &sys, Which::Primal).unwrap();
        let z = solve_coarse(&space, &sys, Which::Dual).unwrap();
        let rep = all_indicators(
            &model.operator,
            &model.neighborhoods,
            &model.locals,
            &load,
            &goal,
            &u,
            &z,
            0,
        )
        .unwrap();
        let j = 4;
        let cand = rep
            .candidate(
                &model.operator,
                &model.neighborhoods[j],
                BasisKind::OnlinePrimal,
                load.norm(),
            )
            .unwrap();

        // partial orthogonality against the existing bases owned by ω_j
        for b in space.bases.iter().filter(|b| b.owner == j) {
            assert!(cand.a_dot(b).abs() <= 1e-9);
        }

        extend_space(&mut space, &mut sys, vec![cand.clone()]);
        let u2 = solve_coarse(&space, &sys, Which::Primal).unwrap();
        let fv = cand.values.dot_free(&g, &load);
        let au = cand.a_values.dot_free(&g, &u2);
        assert!((fv - au).abs() <= 1e-10 * fv.abs().max(1.0));
    }

    #[test]
    fn equal_goal_gives_equal_indicators_and_order_independence() {
        let (g, f, fd, _) = setup(3, 4);
        let (model, space) = build_offline(&g, &f, 2, KappaTildeNodes::All).unwrap();
        let load = assemble_functional(&g, &fd, 1.0).unwrap();
        let sys = CoarseSystem::assemble(&space, &load, &load).unwrap();
        let u = solve_coarse(&space, &sys, Which::Primal).unwrap();
        let rep = all_indicators(
            &model.operator,
            &model.neighborhoods,
            &model.locals,
            &load,
            &load,
            &u,
            &u,
            0,
        )
        .unwrap();
        assert_eq!(rep.r, rep.r_star);

        let rev_n: Vec<_> = model.neighborhoods.iter().rev().cloned().collect();
        let rev_l: Vec<_> = (0..model.locals.len())
            .rev()
            .map(|i| crate::fem::restrict_local(&model.operator, &model.neighborhoods[i]).unwrap())
            .collect();
        let rev = all_indicators(&model.operator, &rev_n, &rev_l, &load, &load, &u, &u, 0).unwrap();
        let mut back = rev.r.clone();
        back.reverse();
        assert_eq!(back, rep.r);
    }
}
