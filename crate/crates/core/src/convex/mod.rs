//! Convex relaxation over the Birkhoff polytope, solved by Frank–Wolfe
//! with a linear assignment oracle.

mod birkhoff;
mod lap;

pub use birkhoff::{
    birkhoff_gradient, birkhoff_objective, default_gap_tol, frobenius_gap, fw_birkhoff, fw_birkhoff_observed,
    round_argmax, round_lap, DoublyStochastic, FwIterate, SolveReport, DEFAULT_MAX_ITERS,
};
pub use lap::{assignment_cost, lap_solve, LapSolver, Sense};
