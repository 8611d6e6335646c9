//! Points, quadrics and the elliptic curve `E ⊂ ℙ³` attached to the
//! Sklyanin parameters.

mod curve;
mod poly;
mod weierstrass;

use std::fmt;

use thiserror::Error;

use crate::linalg::proportional;
use crate::scalars::{common_tower, FieldElem, ScalarError, TowerField};
use crate::sklyanin::{SklyaninError, GAMMA_SIGNS};

pub use curve::{
    branch_cross_ratio_check, coplanar, cross_ratio, lambda_orbit, line_on_quadric, singular_quadric_report,
    singular_quadrics, translation_evidence, two_torsion, CrossRatioReport, CurveE, SingularQuadricCheck, TwoTorsion,
};
pub use poly::{MultiPoly, Quadric};
pub use weierstrass::{weierstrass_add, WeierstrassCurve};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("all coordinates vanish")]
    ZeroPoint,
    #[error("sample at x0 = {0} has a vanishing square")]
    DegenerateSample(String),
    #[error("the two points defining the line coincide")]
    DegenerateLine,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("lambda must avoid 0 and 1")]
    DegenerateCurve,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Params(#[from] SklyaninError),
}

/// A point of projective space, compared up to a nonzero scalar.
#[derive(Clone, Debug)]
pub struct ProjPoint {
    coords: Vec<FieldElem>,
}

impl ProjPoint {
    /// Coordinates are moved into the smallest tower holding all of them.
    pub fn new(coords: Vec<FieldElem>) -> Result<Self, GeometryError> {
        if coords.iter().all(FieldElem::is_zero) {
            return Err(GeometryError::ZeroPoint);
        }
        let tower = coords
            .iter()
            .skip(1)
            .fold(coords[0].tower().clone(), |t, c| {
                common_tower(&t, c.tower()).expect("coordinates from incompatible towers")
            });
        Ok(ProjPoint {
            coords: coords.iter().map(|c| c.embed(&tower)).collect(),
        })
    }

    pub fn from_ints(coords: &[i64], tower: &TowerField) -> Result<Self, GeometryError> {
        ProjPoint::new(coords.iter().map(|&c| tower.from_int(c)).collect())
    }

    /// The coordinate point `e_j` of `ℙ^{n-1}`.
    pub fn basis(n: usize, j: usize, tower: &TowerField) -> Self {
        let mut c = vec![tower.zero(); n];
        c[j] = tower.one();
        ProjPoint { coords: c }
    }

    pub fn coords(&self) -> &[FieldElem] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn tower(&self) -> &TowerField {
        self.coords[0].tower()
    }

    pub fn embed(&self, t: &TowerField) -> ProjPoint {
        ProjPoint {
            coords: self.coords.iter().map(|c| c.embed(t)).collect(),
        }
    }

    /// Representative whose first nonzero coordinate is one.
    pub fn normalized(&self) -> ProjPoint {
        let k = self.coords.iter().position(|c| !c.is_zero()).expect("nonzero point");
        let inv = self.coords[k].inv().expect("nonzero coordinate is a unit");
        ProjPoint {
            coords: self.coords.iter().map(|c| c * &inv).collect(),
        }
    }

    pub fn zero_count(&self) -> usize {
        self.coords.iter().filter(|c| c.is_zero()).count()
    }

    /// The representative sum, a third point on the line through two
    /// distinct points.
    pub fn add_repr(&self, other: &ProjPoint) -> Vec<FieldElem> {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(FieldElem::to_expr).collect()
    }
}

impl PartialEq for ProjPoint {
    fn eq(&self, other: &Self) -> bool {
        proportional(&self.coords, &other.coords)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(" : "))
    }
}

/// `γ_g` acting by sign changes on `ℙ³`; `g = 0` is the identity.
pub fn gamma_act(g: usize, p: &ProjPoint) -> ProjPoint {
    assert_eq!(p.len(), 4);
    ProjPoint {
        coords: p
            .coords
            .iter()
            .zip(GAMMA_SIGNS[g])
            .map(|(c, s)| if s < 0 { -c } else { c.clone() })
            .collect(),
    }
}

/// The involution `(w, x, y, z) ↦ (-w, x, y, z)`.
pub fn neg(p: &ProjPoint) -> ProjPoint {
    let mut coords = p.coords.clone();
    coords[0] = -&coords[0];
    ProjPoint { coords }
}
