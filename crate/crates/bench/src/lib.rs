//! Shared fixtures for the benchmarks.

use solitonic::circle_diffeo::{exp_field, CircleMap, VectorField, DEFAULT_FLOW_TOL};
use solitonic::virasoro::{ModuleParams, VermaLevelSpace};

/// Exp of a low-mode trigonometric field.
pub fn smooth_map() -> CircleMap {
    let f = VectorField::trig(vec![0.05, 0.1, -0.03], vec![0.2, 0.04]);
    exp_field(&f, 1.0, DEFAULT_FLOW_TOL).expect("small fields have global flows")
}

pub fn verma(c: f64, h: f64, n: usize) -> VermaLevelSpace {
    VermaLevelSpace::new(ModuleParams::new(c, h, n).expect("valid parameters")).expect("space builds")
}
