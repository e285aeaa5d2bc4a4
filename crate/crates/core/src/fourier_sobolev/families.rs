use crate::circle_diffeo::{CutoffSide, Profile, Side, VectorField};
use crate::quadrature::periodic_rule;
use crate::taylor::Taylor;

/// 𝔱₁: 1 on (−∞, 1) and 0 on (2, ∞) in line coordinates, with a septic
/// smoothstep in between.
pub fn translation_one() -> VectorField {
    translation_family(1)
}

/// 𝔱_n with C_*(𝔱_n)(t) = C_*(𝔱₁)(t/n).
pub fn translation_family(n: u32) -> VectorField {
    assert!(n >= 1, "translation family index starts at 1");
    VectorField::Line { profile: Profile::StepDown { lo: 1.0, hi: 2.0 }, scale: n as f64 }
}

/// Split of the translation generator used near −1.
#[derive(Clone, Debug)]
pub struct HalfCutoffs {
    /// h₋𝔱, supported on the (−π, 0) half.
    pub h_minus_t: VectorField,
    /// h₊𝔱, supported on the (0, π) half.
    pub h_plus_t: VectorField,
    /// 𝔱₋: equals 𝔱 on the line below t = 1, vanishes above t = 2.8.
    pub t_minus: VectorField,
    /// 𝔱₊ = 𝔱 − 𝔱₋.
    pub t_plus: VectorField,
}

pub fn half_cutoffs() -> HalfCutoffs {
    let t = VectorField::translation_generator();
    HalfCutoffs {
        h_minus_t: t.clone().cutoff(CutoffSide::Minus),
        h_plus_t: t.cutoff(CutoffSide::Plus),
        t_minus: VectorField::Line { profile: Profile::StepDown { lo: 1.0, hi: 2.8 }, scale: 1.0 },
        t_plus: VectorField::Line { profile: Profile::StepUp { lo: 1.0, hi: 2.8 }, scale: 1.0 },
    }
}

/// ∫ |f'''(θ)| dθ over one period, panels split at the field's breakpoints.
pub fn third_derivative_l1(f: &VectorField) -> f64 {
    let mut breaks = f.breakpoints();
    if let VectorField::Line { scale, .. } = f {
        // the profile's own corners in line coordinates
        for s in [1.0, 2.0, 2.8] {
            breaks.push(2.0 * (s * scale).atan());
        }
    }
    let rule = periodic_rule(&breaks, 0.02, 16);
    rule.integrate(|t| f.eval_t(Taylor::<4>::variable(t), Side::Above).deriv(3).abs())
}
