//! Circle diffeomorphisms through their 2π-equivariant lifts, vector fields,
//! the exponential map, Cayley coordinates, Schwarzians and jets at −1.

mod decompose;
mod field;
mod jets;
mod map;
mod mobius;
mod nonsmooth;
mod schwarzian;

pub use decompose::{b_n_membership, decompose_psone, Decomposition};
pub use field::{smooth_transition, smoothstep7, CutoffSide, Profile, Support, VectorField};
pub use jets::{compose_jets, invert_jets, inverse_jets, jet_of_exp, JetAtMinusOne, JetSide, MAX_JET_ORDER};
pub use map::{compose, exp_field, invert, CircleMap, SmoothnessClass, DEFAULT_FLOW_TOL};
pub(crate) use map::Extension;
pub use mobius::MobiusElement;
pub use nonsmooth::{nu_pi, one_sided_data, psi_t, NonsmoothDiffeo, OneSidedData};
pub use schwarzian::{schwarzian_real, schwarzian_z, BREAKPOINT_GUARD};

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Which one-sided limit to use when an argument sits exactly on a
/// breakpoint. `Below` approaches from smaller angles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Side {
    Below,
    #[default]
    Above,
}

/// Reduces an angle into [−π, π), except that `π` itself is kept when the
/// limit from below is requested.
pub fn reduce_angle(x: f64, side: Side) -> f64 {
    let r = x - 2.0 * PI * ((x + PI) / (2.0 * PI)).floor();
    if side == Side::Below && r == -PI {
        PI
    } else {
        r
    }
}

/// True when the reduced angle lies on the (0, π) half, i.e. the side of −1
/// that maps to s → +∞ in line coordinates.
pub fn on_plus_half(x: f64, side: Side) -> bool {
    let r = reduce_angle(x, side);
    r > 0.0 || (r == 0.0 && side == Side::Above)
}

/// Cayley coordinate s = tan(θ/2) of the point e^{iθ}.
pub fn cayley(theta: f64) -> Result<f64> {
    let r = reduce_angle(theta, Side::Above);
    if (r + PI).abs() < 1e-15 {
        return Err(Error::Domain("the point −1 has no Cayley coordinate".into()));
    }
    Ok((r / 2.0).tan())
}

/// Inverse Cayley transform, returning an angle in (−π, π).
pub fn cayley_inv(s: f64) -> f64 {
    2.0 * s.atan()
}
