//! JSON descriptions of vector fields, circle maps and Diff(S¹, −1)
//! elements, as read by the command-line driver and test fixtures.

use crate::circle_diffeo::{compose, exp_field, psi_t, CircleMap, MobiusElement, NonsmoothDiffeo, VectorField, DEFAULT_FLOW_TOL};
use crate::error::{Error, Result};
use crate::fourier_sobolev::FourierSeries;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: f64,
    pub width: f64,
    pub height: f64,
}

/// `{"cos": [c0, c1, ...], "sin": [s1, ...]}` or
/// `{"line_bump": {"center": .., "width": .., "height": ..}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    LineBump { line_bump: BumpSpec },
    Trig {
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

impl FieldSpec {
    pub fn build(&self) -> Result<VectorField> {
        match self {
            FieldSpec::LineBump { line_bump: b } => {
                if !(b.width > 0.0 && b.width.is_finite() && b.center.is_finite() && b.height.is_finite()) {
                    return Err(Error::Parse(format!("invalid line bump {b:?}")));
                }
                Ok(VectorField::line_bump(b.center, b.width, b.height))
            }
            FieldSpec::Trig { cos, sin } => {
                if cos.iter().chain(sin).any(|x| !x.is_finite()) {
                    return Err(Error::Parse("non-finite Fourier coefficient".into()));
                }
                Ok(VectorField::trig(cos.clone(), sin.clone()))
            }
        }
    }

    /// The exact Fourier series; only trigonometric polynomials have one.
    pub fn series(&self) -> Result<FourierSeries> {
        match self {
            FieldSpec::Trig { cos, sin } => {
                self.build()?;
                Ok(FourierSeries::from_trig(cos, sin))
            }
            FieldSpec::LineBump { .. } => {
                Err(Error::Domain("a trigonometric polynomial field is required here".into()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiffeoSpec {
    Identity,
    Rotation { alpha: f64 },
    Mobius { a: f64, b: f64, c: f64, d: f64 },
    Dilation { t: f64 },
    Translation { t: f64 },
    ExpField { field: FieldSpec, t: f64 },
    PsiT { t: f64 },
    /// Applied right to left, like function composition.
    Compose { items: Vec<DiffeoSpec> },
    NonsmoothPair { minus: Box<DiffeoSpec>, plus: Box<DiffeoSpec> },
}

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Parse(format!("{name} must be finite")))
    }
}

impl DiffeoSpec {
    pub fn build(&self) -> Result<CircleMap> {
        Ok(match self {
            DiffeoSpec::Identity => CircleMap::identity(),
            DiffeoSpec::Rotation { alpha } => CircleMap::rotation(finite("alpha", *alpha)?),
            DiffeoSpec::Mobius { a, b, c, d } => CircleMap::mobius(MobiusElement::new(*a, *b, *c, *d)?),
            DiffeoSpec::Dilation { t } => CircleMap::dilation(finite("t", *t)?),
            DiffeoSpec::Translation { t } => CircleMap::translation(finite("t", *t)?),
            DiffeoSpec::ExpField { field, t } => exp_field(&field.build()?, finite("t", *t)?, DEFAULT_FLOW_TOL)?,
            DiffeoSpec::PsiT { t } => psi_t(finite("t", *t)?),
            DiffeoSpec::Compose { items } => {
                let mut acc = CircleMap::identity();
                for item in items {
                    acc = compose(&acc, &item.build()?)?;
                }
                acc
            }
            DiffeoSpec::NonsmoothPair { minus, plus } => NonsmoothDiffeo::new(minus.build()?, plus.build()?)?.map().clone(),
        })
    }
}

/// A Diff(S¹, −1) element from its two smooth pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonSpec {
    pub minus: DiffeoSpec,
    pub plus: DiffeoSpec,
}

impl SolitonSpec {
    pub fn build(&self) -> Result<NonsmoothDiffeo> {
        NonsmoothDiffeo::new(self.minus.build()?, self.plus.build()?)
    }
}
