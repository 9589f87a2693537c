//! Morse-Bott (`G`-) nondegeneracy and alpha-nondegeneracy of critical
//! orbits.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie;
use crate::linalg::{self, Signature, NULLSPACE_RTOL, SIGNATURE_RTOL};
use crate::models::{self, HamiltonianFamily, PhasePoint, Velocity};

use super::systems::tangent_data;

/// Criticality tolerance for the unperturbed checks.
pub const CRITICAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GNondegeneracy {
    pub nondegenerate: bool,
    pub signature: Signature,
    pub eigenvalues: Vec<f64>,
    /// Dimension of the orbit tangent space `g . p`.
    pub orbit_dim: usize,
}

/// Signature of `hessian` on the orthogonal complement of `orbit` (both in
/// the same orthonormal tangent frame).
pub fn transverse_signature(hessian: &DMatrix<f64>, orbit: &DMatrix<f64>) -> GNondegeneracy {
    let k = hessian.nrows();
    let orbit_space = linalg::column_space(orbit, NULLSPACE_RTOL);
    let normal = linalg::orthogonal_complement(&orbit_space, k);
    let restricted = normal.transpose() * hessian * &normal;
    let (signature, eigenvalues) = linalg::symmetric_signature(&restricted, SIGNATURE_RTOL);
    GNondegeneracy {
        nondegenerate: signature.is_nonsingular() && normal.ncols() > 0,
        signature,
        eigenvalues,
        orbit_dim: orbit_space.ncols(),
    }
}

/// Hessian of `h_0` (or of `h_0^xi`) transverse to the `G`-orbit through `p`.
pub fn check_g_nondegenerate(
    family: &HamiltonianFamily,
    p: &PhasePoint,
    xi: Option<&Velocity>,
) -> Result<GNondegeneracy> {
    let td = tangent_data(family, 0.0, xi, p)?;
    let residual = td.gradient.norm();
    if residual > CRITICAL_TOL {
        return Err(Error::NotCritical { residual });
    }
    let gens = models::orbit_generators(family, family.symmetry().g, p)?;
    let orbit = td.frame.transpose() * gens;
    Ok(transverse_signature(&td.hessian, &orbit))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaNondegeneracy {
    pub holds: bool,
    pub dim_ker_g: usize,
    pub dim_ker_h: usize,
    pub dim_m: usize,
    /// Dimension of the space on which the Hessian is tested.
    pub test_dim: usize,
    pub signature: Signature,
    pub eigenvalues: Vec<f64>,
}

/// Kernel bookkeeping and the Hessian of `h^xi` on
/// `ker DPhi_H(p) ⊖ g_mu . p`, which realizes `N_1 ⊕ M`.
pub fn check_alpha_nondegenerate(
    family: &HamiltonianFamily,
    p: &PhasePoint,
    xi: &Velocity,
) -> Result<AlphaNondegeneracy> {
    alpha_analysis(family, 0.0, p, xi, CRITICAL_TOL)
}

pub(crate) fn alpha_analysis(
    family: &HamiltonianFamily,
    lambda: f64,
    p: &PhasePoint,
    xi: &Velocity,
    tol: f64,
) -> Result<AlphaNondegeneracy> {
    let td = tangent_data(family, lambda, Some(xi), p)?;
    let residual = td.gradient.norm();
    if residual > tol {
        return Err(Error::NotCritical { residual });
    }
    let jac_g = models::momentum_jacobian(family, p)? * &td.frame;
    let images = family.embedding().images().clone();
    let jac_h = images.transpose() * &jac_g;
    let k = td.frame.ncols();

    let rank_h = linalg::rank(&jac_h, NULLSPACE_RTOL);
    if rank_h < images.ncols() {
        return Err(Error::NonRegularLevelSet { rank: rank_h, expected: images.ncols() });
    }
    let ker_g = linalg::nullspace(&jac_g, NULLSPACE_RTOL);
    let ker_h = if jac_h.nrows() == 0 { DMatrix::identity(k, k) } else { linalg::nullspace(&jac_h, NULLSPACE_RTOL) };

    let mu = models::momentum_g(family, p)?;
    let g_mu = lie::stabilizer_algebra(&mu)?;
    let gens = models::orbit_generators(family, family.symmetry().g, p)?;
    let g_mu_p = td.frame.transpose() * gens * g_mu.basis();
    let test = linalg::complement_within(&g_mu_p, &ker_h);
    let restricted = test.transpose() * &td.hessian * &test;
    let (signature, eigenvalues) = linalg::symmetric_signature(&restricted, SIGNATURE_RTOL);
    Ok(AlphaNondegeneracy {
        holds: signature.is_nonsingular(),
        dim_ker_g: ker_g.ncols(),
        dim_ker_h: ker_h.ncols(),
        dim_m: ker_h.ncols() - ker_g.ncols(),
        test_dim: test.ncols(),
        signature,
        eigenvalues,
    })
}
