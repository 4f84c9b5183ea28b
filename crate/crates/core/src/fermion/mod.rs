//! Wilson fermions: Dirac operator, Krylov solves, pseudofermion action, force and
//! the fermionic force-gradient pieces.

mod action;
mod dirac;
mod gradient;
mod solver;

pub use action::{
    chi_xi, compute_fermion_force, fermion_action, fermion_force, pseudofermion_heatbath, ChiXi,
    FermionForce,
};
pub use dirac::{apply_dirac, apply_dirac_dagger, apply_sigma3, WilsonDirac};
pub use gradient::{
    c_ff, c_ff_from, c_gf, c_gf_from, fermion_hessian_contraction, second_derivative_xi, w_vectors,
    z_aggregate, SparseSpinor, ZFields,
};
pub use solver::{
    cg_normal, solve_dirac, solve_dirac_dagger, solve_normal, InversionCounter, SolveReport,
    SolverParams, DEFAULT_TOLERANCE,
};
