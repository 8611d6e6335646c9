use serde::{Deserialize, Serialize};

use crate::linalg::{proportional, Matrix};
use crate::scalars::{sqrt_adjoin, FieldElem, Rat, TowerField};
use crate::sklyanin::{derived_constants, DerivedConstants, Params};

use super::{gamma_act, neg, GeometryError, MultiPoly, ProjPoint, Quadric};

/// `E = {Σ x_j² = 0} ∩ {(1-γ)x_1² + (1+αγ)x_2² + (1+α)x_3² = 0}`.
///
/// The base tower extends the parameter tower by `√(ν-1)`, `√(1-μ)` and
/// `√(μ-ν)` (only where these are not already present).
#[derive(Clone, Debug)]
pub struct CurveE {
    params: Params,
    consts: DerivedConstants,
    base: TowerField,
    roots: [FieldElem; 3],
}

fn fresh_label(t: &TowerField) -> String {
    format!("r{}", t.num_steps())
}

fn sqrt_in(t: &TowerField, r: &Rat) -> Result<(TowerField, FieldElem), GeometryError> {
    Ok(sqrt_adjoin(t, &t.from_rat(r.clone()), &fresh_label(t))?)
}

impl CurveE {
    pub fn new(params: &Params) -> Result<CurveE, GeometryError> {
        let consts = derived_constants(params)?;
        let one = Rat::one();
        let (mu, nu) = (&consts.mu, &consts.nu);
        let (t, r1) = sqrt_in(&params.tower, &(nu - &one))?;
        let (t, r2) = sqrt_in(&t, &(&one - mu))?;
        let (t, r3) = sqrt_in(&t, &(mu - nu))?;
        let roots = [r1.embed(&t), r2.embed(&t), r3];
        Ok(CurveE {
            params: params.clone(),
            consts,
            base: t,
            roots,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn consts(&self) -> &DerivedConstants {
        &self.consts
    }

    pub fn base(&self) -> &TowerField {
        &self.base
    }

    /// Diagonal coefficients of the two defining quadrics.
    pub fn form_coeffs(&self) -> [[Rat; 4]; 2] {
        let p = &self.params;
        let one = Rat::one();
        [
            [one.clone(), one.clone(), one.clone(), one.clone()],
            [
                Rat::zero(),
                &one - &p.gamma,
                &one + &(&p.alpha * &p.gamma),
                &one + &p.alpha,
            ],
        ]
    }

    pub fn forms(&self) -> [MultiPoly; 2] {
        let q = TowerField::rationals();
        self.form_coeffs()
            .map(|c| MultiPoly::diagonal(&c.iter().map(|r| q.from_rat(r.clone())).collect::<Vec<_>>()))
    }

    pub fn on_curve(&self, p: &ProjPoint) -> bool {
        p.len() == 4 && self.forms().iter().all(|f| f.eval_point(p).is_zero())
    }

    /// `(x_1², x_2²)` on `E` with `x_0 = s`, `x_3 = 1`.
    pub fn solve_squares(&self, s: &Rat) -> (Rat, Rat) {
        let [_, f2] = self.form_coeffs();
        let (a, b, c) = (&f2[1], &f2[2], &f2[3]);
        let total = -(&Rat::one() + &(s * s));
        let det = b - a;
        let u = &(&(&total * b) + c) / &det;
        let v = &total - &u;
        (u, v)
    }

    /// Number of new quadratic steps needed to sample at `s` over `tower`,
    /// or `None` for a degenerate seed.
    pub fn sample_cost(&self, s: &Rat, tower: &TowerField) -> Option<usize> {
        let (u, v) = self.solve_squares(s);
        if u.is_zero() || v.is_zero() {
            return None;
        }
        let has = |r: &Rat| tower.find_rational_sqrt(r).is_some();
        Some(match (has(&u), has(&v)) {
            (true, true) => 0,
            (true, false) | (false, true) => 1,
            (false, false) if has(&(&u * &v)) => 1,
            _ => 2,
        })
    }

    pub fn sample_point(&self, s: &Rat) -> Result<(ProjPoint, TowerField), GeometryError> {
        self.sample_point_in(s, &self.base)
    }

    /// The point `(s, √u, √v, 1)`, extending `tower` as needed.
    pub fn sample_point_in(&self, s: &Rat, tower: &TowerField) -> Result<(ProjPoint, TowerField), GeometryError> {
        let (u, v) = self.solve_squares(s);
        if u.is_zero() || v.is_zero() {
            return Err(GeometryError::DegenerateSample(s.to_string()));
        }
        let (t, x1) = sqrt_in(tower, &u)?;
        let (t, x2) = sqrt_in(&t, &v)?;
        let p = ProjPoint::new(vec![t.from_rat(s.clone()), x1.embed(&t), x2, t.one()])?;
        Ok((p, t))
    }

    /// Sample every seed over one growing tower, so that all points share it.
    pub fn sample_points(&self, seeds: &[Rat]) -> Result<(Vec<ProjPoint>, TowerField), GeometryError> {
        let mut t = self.base.clone();
        let mut pts = Vec::new();
        for s in seeds {
            let (p, t2) = self.sample_point_in(s, &t)?;
            pts.push(p);
            t = t2;
        }
        Ok((pts.iter().map(|p| p.embed(&t)).collect(), t))
    }

    /// `n` positive seeds of small height, cheapest first.
    pub fn default_seeds(&self, n: usize) -> Vec<Rat> {
        let mut cands = Vec::new();
        for h in 1..=16i64 {
            for q in 1..=h {
                for p in 1..=h {
                    if p.max(q) != h || num_integer::gcd(p, q) != 1 {
                        continue;
                    }
                    let s = Rat::new(p, q);
                    if let Some(c) = self.sample_cost(&s, &self.base) {
                        cands.push((c, h, q, s));
                    }
                }
            }
        }
        cands.sort_by_key(|c| (c.0, c.1, c.2));
        cands.into_iter().take(n).map(|c| c.3).collect()
    }
}

/// The points `o = (0, √(ν-1), √(1-μ), √(μ-ν))` and `ξ_i = γ_i(o)`.
#[derive(Clone, Debug)]
pub struct TwoTorsion {
    pub o: ProjPoint,
    pub xi: [ProjPoint; 3],
}

impl TwoTorsion {
    pub fn all(&self) -> [ProjPoint; 4] {
        [self.o.clone(), self.xi[0].clone(), self.xi[1].clone(), self.xi[2].clone()]
    }
}

pub fn two_torsion(e: &CurveE) -> TwoTorsion {
    let t = &e.base;
    let o = ProjPoint::new(vec![t.zero(), e.roots[0].clone(), e.roots[1].clone(), e.roots[2].clone()])
        .expect("o is a nonzero point");
    let xi = [1, 2, 3].map(|g| gamma_act(g, &o));
    TwoTorsion { o, xi }
}

/// `Q_0 = diag(0, μ, ν, 1)`, `Q_1 = diag(μ, 0, μ-ν, μ-1)`,
/// `Q_2 = diag(ν, ν-μ, 0, ν-1)`, `Q_3 = diag(1, 1-μ, 1-ν, 0)`.
pub fn singular_quadrics(p: &Params) -> Result<[Quadric; 4], GeometryError> {
    let d = derived_constants(p)?;
    let (mu, nu) = (&d.mu, &d.nu);
    let one = Rat::one();
    let z = Rat::zero();
    let q = TowerField::rationals();
    let rows = [
        [z.clone(), mu.clone(), nu.clone(), one.clone()],
        [mu.clone(), z.clone(), mu - nu, mu - &one],
        [nu.clone(), nu - mu, z.clone(), nu - &one],
        [one.clone(), &one - mu, &one - nu, z],
    ];
    Ok(rows.map(|r| Quadric::diagonal(&r.iter().map(|c| q.from_rat(c.clone())).collect::<Vec<_>>())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularQuadricCheck {
    pub index: usize,
    pub in_pencil: bool,
    pub rank: usize,
    pub singular_point_is_basis_vector: bool,
}

impl SingularQuadricCheck {
    pub fn passed(&self) -> bool {
        self.in_pencil && self.rank == 3 && self.singular_point_is_basis_vector
    }
}

pub fn singular_quadric_report(e: &CurveE) -> Result<Vec<SingularQuadricCheck>, GeometryError> {
    let qs = singular_quadrics(&e.params)?;
    let q = TowerField::rationals();
    let [f1, f2] = e.forms();
    Ok(qs
        .iter()
        .enumerate()
        .map(|(i, qd)| {
            let m = Matrix::from_rows(vec![
                f1.coeff_vector(2, &q),
                f2.coeff_vector(2, &q),
                qd.form().coeff_vector(2, &q),
            ]);
            let ker = qd.kernel();
            let ei = ProjPoint::basis(4, i, &q);
            SingularQuadricCheck {
                index: i,
                in_pencil: m.rank() == 2,
                rank: qd.rank(),
                singular_point_is_basis_vector: ker.len() == 1 && proportional(&ker[0], ei.coords()),
            }
        })
        .collect())
}

/// Whether four points of `ℙ³` lie on a common plane.
pub fn coplanar(pts: &[ProjPoint; 4]) -> bool {
    Matrix::from_rows(pts.iter().map(|p| p.coords().to_vec()).collect())
        .det()
        .is_zero()
}

/// Whether the line through `p` and `q` lies on the quadric: the form
/// vanishes at `p`, `q` and `p + q`.
pub fn line_on_quadric(p: &ProjPoint, q: &ProjPoint, qd: &Quadric) -> Result<bool, GeometryError> {
    if p == q {
        return Err(GeometryError::DegenerateLine);
    }
    Ok(qd.eval_point(p).is_zero() && qd.eval_point(q).is_zero() && qd.eval(&p.add_repr(q)).is_zero())
}

/// For each `i`: the line through `⊖p` and `γ_i(p)` lies on `Q_i`, and
/// `⊖p, γ_i(p), ⊖q, γ_i(q)` are coplanar.
pub fn translation_evidence(e: &CurveE, p: &ProjPoint, q: &ProjPoint) -> Result<[bool; 3], GeometryError> {
    let qs = singular_quadrics(&e.params)?;
    let mut out = [false; 3];
    for i in 1..=3 {
        let (np, gp) = (neg(p), gamma_act(i, p));
        let (nq, gq) = (neg(q), gamma_act(i, q));
        out[i - 1] = line_on_quadric(&np, &gp, &qs[i])? && coplanar(&[np, gp, nq, gq]);
    }
    Ok(out)
}

/// Cross-ratio `(a-c)(b-d) / ((a-d)(b-c))` of points of `ℙ¹` given as `(X, Z)`.
pub fn cross_ratio(pts: [&[FieldElem; 2]; 4]) -> Result<FieldElem, GeometryError> {
    let br = |p: &[FieldElem; 2], q: &[FieldElem; 2]| &(&p[0] * &q[1]) - &(&q[0] * &p[1]);
    let [a, b, c, d] = pts;
    let num = &br(a, c) * &br(b, d);
    let den = &br(a, d) * &br(b, c);
    Ok(&num * &den.inv()?)
}

/// `{λ, 1/λ, 1-λ, 1/(1-λ), λ/(λ-1), (λ-1)/λ}`.
pub fn lambda_orbit(l: &Rat) -> Vec<Rat> {
    let one = Rat::one();
    let m = &one - l;
    let mut v = vec![
        l.clone(),
        &one / l,
        m.clone(),
        &one / &m,
        l / &(l - &one),
        &(l - &one) / l,
    ];
    v.sort_by(|a, b| a.as_big().cmp(b.as_big()));
    v.dedup();
    v
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossRatioReport {
    pub lambda: Rat,
    pub images: Vec<[String; 2]>,
    pub images_distinct: bool,
    pub branch_formula_matches: bool,
    pub cross_ratios: Vec<String>,
    pub orbit_matches: bool,
}

impl CrossRatioReport {
    pub fn passed(&self) -> bool {
        self.images_distinct && self.branch_formula_matches && self.orbit_matches
    }
}

/// Images of `o, ξ_1, ξ_2, ξ_3` under `x ↦ (√(-ν)x_2 + √μ x_1, x_3)`,
/// compared with the branch points `(±√(μν-ν) ± √(μν-μ), √(μ-ν))`, and the
/// cross-ratio orbit of the images compared with the orbit of `λ`.
pub fn branch_cross_ratio_check(e: &CurveE) -> Result<CrossRatioReport, GeometryError> {
    let DerivedConstants { mu, nu, lambda } = &e.consts;
    let (t, snu) = sqrt_in(&e.base, &-nu)?;
    let (t, smu) = sqrt_in(&t, mu)?;
    let (t, ra) = sqrt_in(&t, &(&(mu * nu) - nu))?;
    let (t, rb) = sqrt_in(&t, &(&(mu * nu) - mu))?;
    let (snu, smu, ra) = (snu.embed(&t), smu.embed(&t), ra.embed(&t));
    let tt = two_torsion(e);
    let images: Vec<[FieldElem; 2]> = tt
        .all()
        .iter()
        .map(|p| {
            let c = p.embed(&t);
            let x = c.coords();
            [&(&snu * &x[2]) + &(&smu * &x[1]), x[3].clone()]
        })
        .collect();
    let distinct = (0..4).all(|i| (i + 1..4).all(|j| !proportional(&images[i], &images[j])));
    let c = e.roots[2].embed(&t);
    let formula: Vec<[FieldElem; 2]> = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        .iter()
        .map(|&(s1, s2)| {
            let a = if s1 > 0 { ra.clone() } else { -&ra };
            let b = if s2 > 0 { rb.clone() } else { -&rb };
            [&a + &b, c.clone()]
        })
        .collect();
    let branch_formula_matches = images.iter().all(|im| formula.iter().any(|f| proportional(im, f)))
        && formula.iter().all(|f| images.iter().any(|im| proportional(im, f)));
    let mut crs: Vec<FieldElem> = Vec::new();
    if distinct {
        for perm in permutations4() {
            let cr = cross_ratio(perm.map(|k| &images[k]))?;
            if !crs.contains(&cr) {
                crs.push(cr);
            }
        }
    }
    let orbit: Vec<FieldElem> = lambda_orbit(lambda).into_iter().map(|r| t.from_rat(r)).collect();
    let orbit_matches =
        crs.len() == orbit.len() && crs.iter().all(|c| orbit.contains(c)) && orbit.iter().all(|c| crs.contains(c));
    Ok(CrossRatioReport {
        lambda: lambda.clone(),
        images: images.iter().map(|[a, b]| [a.to_expr(), b.to_expr()]).collect(),
        images_distinct: distinct,
        branch_formula_matches,
        cross_ratios: crs.iter().map(FieldElem::to_expr).collect(),
        orbit_matches,
    })
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|k| p.contains(&k)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn curve() -> CurveE {
        CurveE::new(&Params::defaults()).unwrap()
    }

    #[test]
    fn base_tower_has_dimension_32() {
        assert_eq!(curve().base().dim(), 32);
    }

    #[test]
    fn sample_squares() {
        let e = curve();
        assert_eq!(e.solve_squares(&r(1, 1)), (r(-9, 5), r(-1, 5)));
        assert_eq!(e.solve_squares(&r(0, 1)), (r(-8, 5), r(3, 5)));
        let (p, t) = e.sample_point(&r(1, 1)).unwrap();
        assert!(e.on_curve(&p));
        assert_eq!(t.dim(), 32);
        assert_eq!(p.zero_count(), 0);
    }

    #[test]
    fn default_seeds_prefer_cheap_samples() {
        let e = curve();
        let seeds = e.default_seeds(5);
        assert_eq!(seeds[0], r(1, 1));
        assert_eq!(seeds[1], r(7, 3));
        assert_eq!(seeds.len(), 5);
        let (pts, t) = e.sample_points(&seeds).unwrap();
        assert!(pts.iter().all(|p| e.on_curve(p)));
        assert!(t.dim() <= 32 * 8);
    }

    #[test]
    fn two_torsion_points() {
        let e = curve();
        let tt = two_torsion(&e);
        let all = tt.all();
        assert!(all.iter().all(|p| e.on_curve(p) && p.coords()[0].is_zero()));
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(all[i], all[j]);
            }
        }
        assert!(coplanar(&all));
        assert!(!e.on_curve(&ProjPoint::basis(4, 0, e.base())));
    }

    #[test]
    fn singular_quadrics_are_cones_in_the_pencil() {
        let e = curve();
        let rep = singular_quadric_report(&e).unwrap();
        assert!(rep.iter().all(SingularQuadricCheck::passed), "{rep:?}");
        let q0 = &singular_quadrics(e.params()).unwrap()[0];
        assert_eq!(q0.gram.get(1, 1), &TowerField::rationals().from_rat(r(4, 7)));
    }

    #[test]
    fn lines_through_translates() {
        let e = curve();
        let seeds = e.default_seeds(2);
        let (pts, _) = e.sample_points(&seeds).unwrap();
        let (p, q) = (&pts[0], &pts[1]);
        assert_eq!(translation_evidence(&e, p, q).unwrap(), [true; 3]);
        let qs = singular_quadrics(e.params()).unwrap();
        assert!(line_on_quadric(&neg(p), p, &qs[0]).unwrap());
        assert!(!line_on_quadric(p, &gamma_act(1, p), &qs[0]).unwrap());
        assert_eq!(line_on_quadric(p, p, &qs[0]), Err(GeometryError::DegenerateLine));
    }

    #[test]
    fn cross_ratio_orbit() {
        let rep = branch_cross_ratio_check(&curve()).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.lambda, r(3, 35));
        assert_eq!(lambda_orbit(&r(3, 35)).len(), 6);
    }
}
