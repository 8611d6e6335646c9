use crate::scalars::{FieldElem, TowerField};

use super::{GeometryError, ProjPoint};

/// `y²z = x(x - z)(x - λz)` with identity `(0 : 1 : 0)`.
#[derive(Clone, Debug)]
pub struct WeierstrassCurve {
    pub lambda: FieldElem,
}

impl WeierstrassCurve {
    pub fn new(lambda: FieldElem) -> Result<Self, GeometryError> {
        if lambda.is_zero() || lambda.is_one() {
            return Err(GeometryError::DegenerateCurve);
        }
        Ok(WeierstrassCurve { lambda })
    }

    fn tower(&self) -> &TowerField {
        self.lambda.tower()
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        if p.len() != 3 {
            return false;
        }
        let [x, y, z] = [&p.coords()[0], &p.coords()[1], &p.coords()[2]];
        let lhs = &(y * y) * z;
        let rhs = &(x * &(x - z)) * &(x - &(&self.lambda * z));
        lhs == rhs
    }

    pub fn identity(&self) -> ProjPoint {
        ProjPoint::basis(3, 1, self.tower())
    }

    /// `(0:1:0), (0:0:1), (1:0:1), (λ:0:1)`.
    pub fn two_torsion(&self) -> [ProjPoint; 4] {
        let t = self.tower();
        let aff = |x: FieldElem| ProjPoint::new(vec![x, t.zero(), t.one()]).expect("nonzero");
        [self.identity(), aff(t.zero()), aff(t.one()), aff(self.lambda.clone())]
    }

    pub fn add(&self, p: &ProjPoint, q: &ProjPoint) -> Result<ProjPoint, GeometryError> {
        weierstrass_add(self, p, q)
    }

    pub fn double(&self, p: &ProjPoint) -> Result<ProjPoint, GeometryError> {
        weierstrass_add(self, p, p)
    }
}

fn affine(p: &ProjPoint) -> Result<Option<(FieldElem, FieldElem)>, GeometryError> {
    let c = p.coords();
    if c[2].is_zero() {
        return Ok(None);
    }
    let zi = c[2].inv()?;
    Ok(Some((&c[0] * &zi, &c[1] * &zi)))
}

/// Chord-tangent addition.
pub fn weierstrass_add(w: &WeierstrassCurve, p: &ProjPoint, q: &ProjPoint) -> Result<ProjPoint, GeometryError> {
    if !w.contains(p) || !w.contains(q) {
        return Err(GeometryError::NotOnCurve);
    }
    let (Some((x1, y1)), Some((x2, y2))) = (affine(p)?, affine(q)?) else {
        return Ok(if p.coords()[2].is_zero() { q.clone() } else { p.clone() });
    };
    let t = x1.tower().clone();
    let a2 = -&(&t.one() + &w.lambda);
    let a4 = w.lambda.clone();
    let slope = if x1 == x2 {
        if (&y1 + &y2).is_zero() {
            return Ok(w.identity());
        }
        let num = &(&(&t.from_int(3) * &(&x1 * &x1)) + &(&(&t.from_int(2) * &a2) * &x1)) + &a4;
        &num * &(&t.from_int(2) * &y1).inv()?
    } else {
        &(&y2 - &y1) * &(&x2 - &x1).inv()?
    };
    let x3 = &(&(&(&slope * &slope) - &a2) - &x1) - &x2;
    let y3 = -&(&y1 + &(&slope * &(&x3 - &x1)));
    ProjPoint::new(vec![x3, y3, t.one()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{sqrt_adjoin, Rat};

    fn curve() -> WeierstrassCurve {
        WeierstrassCurve::new(TowerField::rationals().from_rat(Rat::new(3, 35))).unwrap()
    }

    #[test]
    fn identity_and_two_torsion() {
        let w = curve();
        let tors = w.two_torsion();
        assert!(tors.iter().all(|p| w.contains(p)));
        for p in &tors {
            assert_eq!(w.add(p, &w.identity()).unwrap(), *p);
            assert_eq!(w.double(p).unwrap(), w.identity());
        }
        assert_eq!(w.add(&tors[1], &tors[1]).unwrap(), w.identity());
        assert_eq!(w.add(&tors[2], &tors[3]).unwrap(), tors[1]);
    }

    #[test]
    fn generic_point_is_not_two_torsion() {
        let w = curve();
        let q = TowerField::rationals();
        let x = q.from_int(2);
        let rhs = &(&x * &(&x - &q.one())) * &(&x - &w.lambda);
        let (t, y) = sqrt_adjoin(&q, &rhs, "y").unwrap();
        let p = ProjPoint::new(vec![x.embed(&t), y, t.one()]).unwrap();
        assert!(w.contains(&p));
        let d = w.double(&p).unwrap();
        assert!(w.contains(&d));
        assert_ne!(d, w.identity());
        let three = w.add(&d, &p).unwrap();
        assert_eq!(w.add(&p, &d).unwrap(), three);
    }

    #[test]
    fn rejects_points_off_the_curve() {
        let w = curve();
        let p = ProjPoint::from_ints(&[1, 1, 1], &TowerField::rationals()).unwrap();
        assert_eq!(w.add(&p, &p), Err(GeometryError::NotOnCurve));
        assert!(WeierstrassCurve::new(TowerField::rationals().one()).is_err());
    }
}
