//! Towers of algebraic extensions of Q and their elements.
//!
//! A tower is a chain `Q = K_0 ⊂ K_1 ⊂ ... ⊂ K_s` where `K_j = K_{j-1}[t_j]/(m_j)`
//! for a monic `m_j` with coefficients in `K_{j-1}`. Elements are coefficient
//! vectors over the product basis `t_1^{e_1} ... t_s^{e_s}` (`0 <= e_j < deg m_j`),
//! indexed in mixed radix with the first step least significant. Adjoining a
//! step therefore leaves the indices of existing elements unchanged, and
//! embedding is a change of tower tag.
//!
//! Coefficient vectors are stored sparsely (index, rational) with zeros
//! dropped. Irreducibility of the step polynomials is never checked: a
//! reducible step shows up as [`ScalarError::ZeroDivisor`] when a nonzero
//! non-unit is inverted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;

use super::rat::{square_class, Rat};
use super::ScalarError;

#[derive(Clone, Debug)]
pub struct Step {
    pub label: String,
    /// Coefficients `c_0 .. c_{d-1}` of the monic polynomial
    /// `x^d + c_{d-1} x^{d-1} + ... + c_0`, elements of the parent tower.
    pub lower: Vec<FieldElem>,
}

impl Step {
    pub fn degree(&self) -> usize {
        self.lower.len()
    }
}

/// A rational quadratic step `t^2 = r` recorded for square detection.
#[derive(Clone, Debug)]
struct RationalRoot {
    step: usize,
    radicand: Rat,
    class: Vec<BigInt>,
}

struct Node {
    parent: Option<TowerField>,
    step: Option<Step>,
    dim: usize,
    degrees: Vec<usize>,
    strides: Vec<usize>,
    /// `Some(r)` when step `j` is `x^d - r` with rational `r`.
    pure: Vec<Option<Rat>>,
    labels: Vec<String>,
    roots: Vec<RationalRoot>,
}

/// A tower of field extensions over Q. Cheap to clone; identity is by pointer.
#[derive(Clone)]
pub struct TowerField(Arc<Node>);

static RATIONALS: OnceLock<TowerField> = OnceLock::new();

impl TowerField {
    /// The trivial tower Q.
    pub fn rationals() -> TowerField {
        RATIONALS
            .get_or_init(|| {
                TowerField(Arc::new(Node {
                    parent: None,
                    step: None,
                    dim: 1,
                    degrees: Vec::new(),
                    strides: Vec::new(),
                    pure: Vec::new(),
                    labels: Vec::new(),
                    roots: Vec::new(),
                }))
            })
            .clone()
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn num_steps(&self) -> usize {
        self.0.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0.degrees
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn parent(&self) -> Option<&TowerField> {
        self.0.parent.as_ref()
    }

    pub fn top_step(&self) -> Option<&Step> {
        self.0.step.as_ref()
    }

    pub fn ptr_eq(&self, other: &TowerField) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// True when `self` is `other` or one of its ancestors.
    pub fn is_prefix_of(&self, other: &TowerField) -> bool {
        if self.num_steps() > other.num_steps() {
            return false;
        }
        let mut cur = other;
        while cur.num_steps() > self.num_steps() {
            cur = cur.parent().expect("step count and parent chain disagree");
        }
        cur.ptr_eq(self)
    }

    /// The ancestor with exactly `steps` steps.
    pub fn prefix(&self, steps: usize) -> TowerField {
        assert!(steps <= self.num_steps());
        let mut cur = self.clone();
        while cur.num_steps() > steps {
            cur = cur.parent().unwrap().clone();
        }
        cur
    }

    fn all_pure(&self) -> bool {
        self.0.pure.iter().all(Option::is_some)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            tower: self.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_rat(Rat::one())
    }

    pub fn from_rat(&self, r: Rat) -> FieldElem {
        let terms = if r.is_zero() { Vec::new() } else { vec![(0, r)] };
        FieldElem {
            tower: self.clone(),
            terms,
        }
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        self.from_rat(Rat::from_int(n))
    }

    /// Element with the given dense coefficient vector.
    pub fn element(&self, coeffs: &[Rat]) -> FieldElem {
        assert_eq!(coeffs.len(), self.dim(), "coefficient vector length");
        FieldElem::from_dense(self.clone(), coeffs)
    }

    /// The generator `t_j` of step `j` (0-based).
    pub fn generator(&self, step: usize) -> FieldElem {
        assert!(step < self.num_steps());
        FieldElem {
            tower: self.clone(),
            terms: vec![(self.0.strides[step] as u32, Rat::one())],
        }
    }

    /// The generator of the top step.
    pub fn top_generator(&self) -> FieldElem {
        self.generator(self.num_steps() - 1)
    }

    /// Adjoin a root of the monic polynomial `x^d + lower[d-1] x^{d-1} + ... + lower[0]`.
    ///
    /// Coefficients are embedded into `self` first; they must live in `self`
    /// or one of its ancestors.
    pub fn adjoin_root(&self, lower: &[FieldElem], label: &str) -> Result<TowerField, ScalarError> {
        if lower.len() < 2 {
            return Err(ScalarError::BadMinpoly);
        }
        let lower: Vec<FieldElem> = lower.iter().map(|c| c.embed(self)).collect();
        let d = lower.len();
        let pure = if lower[1..].iter().all(FieldElem::is_zero) {
            lower[0].as_rational().map(|c| -c)
        } else {
            None
        };
        let node = &self.0;
        let mut degrees = node.degrees.clone();
        let mut strides = node.strides.clone();
        strides.push(node.dim);
        degrees.push(d);
        let mut pures = node.pure.clone();
        pures.push(pure.clone());
        let mut labels = node.labels.clone();
        labels.push(label.to_string());
        let mut roots = node.roots.clone();
        if d == 2 {
            if let Some(r) = &pure {
                if let Some(class) = square_class(r) {
                    if !class.is_empty() {
                        roots.push(RationalRoot {
                            step: degrees.len() - 1,
                            radicand: r.clone(),
                            class,
                        });
                    }
                }
            }
        }
        Ok(TowerField(Arc::new(Node {
            parent: Some(self.clone()),
            step: Some(Step {
                label: label.to_string(),
                lower,
            }),
            dim: node.dim * d,
            degrees,
            strides,
            pure: pures,
            labels,
            roots,
        })))
    }

    /// Adjoin `x^2 - r` for rational `r`.
    pub fn adjoin_sqrt_rational(&self, r: &Rat, label: &str) -> TowerField {
        self.adjoin_root(&[self.from_rat(-r), self.zero()], label)
            .expect("quadratic step is well formed")
    }

    /// Express `sqrt(r)` in this tower using the recorded rational square
    /// roots, if its square class is generated by theirs.
    pub fn find_rational_sqrt(&self, r: &Rat) -> Option<FieldElem> {
        if let Some(q) = r.sqrt_exact() {
            return Some(self.from_rat(q));
        }
        let target: BTreeSet<BigInt> = square_class(r)?.into_iter().collect();
        // Gaussian elimination over GF(2); vectors are atom sets, combos are step sets.
        let mut basis: Vec<(BTreeSet<BigInt>, BTreeSet<usize>)> = Vec::new();
        for (idx, root) in self.0.roots.iter().enumerate() {
            let mut v: BTreeSet<BigInt> = root.class.iter().cloned().collect();
            let mut combo: BTreeSet<usize> = [idx].into_iter().collect();
            for (bv, bc) in &basis {
                let lead = bv.iter().next().unwrap();
                if v.contains(lead) {
                    v = v.symmetric_difference(bv).cloned().collect();
                    combo = combo.symmetric_difference(bc).cloned().collect();
                }
            }
            if !v.is_empty() {
                basis.push((v, combo));
                basis.sort_by(|a, b| a.0.iter().next().cmp(&b.0.iter().next()));
            }
        }
        let mut v = target;
        let mut combo = BTreeSet::new();
        for (bv, bc) in &basis {
            let lead = bv.iter().next().unwrap();
            if v.contains(lead) {
                v = v.symmetric_difference(bv).cloned().collect();
                combo = combo.symmetric_difference(bc).cloned().collect::<BTreeSet<usize>>();
            }
        }
        if !v.is_empty() {
            return None;
        }
        let mut prod = Rat::one();
        let mut index = 0usize;
        for &i in &combo {
            let root = &self.0.roots[i];
            prod = &prod * &root.radicand;
            index += self.0.strides[root.step];
        }
        let q = (r / &prod).sqrt_exact()?;
        let elem = FieldElem {
            tower: self.clone(),
            terms: vec![(index as u32, q)],
        };
        debug_assert!(&elem * &elem == self.from_rat(r.clone()));
        Some(elem)
    }

    /// Exponent vector of a basis index.
    fn exponents(&self, mut idx: usize) -> Vec<usize> {
        self.0
            .degrees
            .iter()
            .map(|&d| {
                let e = idx % d;
                idx /= d;
                e
            })
            .collect()
    }
}

impl fmt::Debug for TowerField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tower[")?;
        let mut cur = Some(self);
        let mut steps = Vec::new();
        while let Some(t) = cur {
            if let Some(s) = t.top_step() {
                let poly: Vec<String> = s.lower.iter().map(|c| c.to_string()).collect();
                steps.push(format!("{}: deg {} [{}]", s.label, s.degree(), poly.join(", ")));
            }
            cur = t.parent();
        }
        steps.reverse();
        write!(f, "{}]", steps.join("; "))
    }
}

impl PartialEq for TowerField {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other)
    }
}

/// The larger of two towers when one is a prefix of the other.
pub fn common_tower(a: &TowerField, b: &TowerField) -> Option<TowerField> {
    if a.ptr_eq(b) {
        Some(a.clone())
    } else if a.is_prefix_of(b) {
        Some(b.clone())
    } else if b.is_prefix_of(a) {
        Some(a.clone())
    } else {
        None
    }
}

/// Square root of `s`, extending the tower when needed.
///
/// Rational radicands are first matched against the square classes of the
/// rational square roots already in the tower, so `sqrt(4)` is `2` and
/// `sqrt(6)` is `sqrt(2)*sqrt(3)` when both are present. Anything else is
/// adjoined formally as `x^2 - s`.
pub fn sqrt_adjoin(tower: &TowerField, s: &FieldElem, label: &str) -> Result<(TowerField, FieldElem), ScalarError> {
    let tower = common_tower(tower, s.tower()).expect("radicand lives outside the tower");
    if s.is_zero() {
        return Err(ScalarError::ZeroInput);
    }
    if let Some(r) = s.as_rational() {
        if let Some(root) = tower.find_rational_sqrt(&r) {
            return Ok((tower, root));
        }
        let ext = tower.adjoin_sqrt_rational(&r, label);
        let root = ext.top_generator();
        return Ok((ext, root));
    }
    let ext = tower.adjoin_root(&[-s.embed(&tower), tower.zero()], label)?;
    let root = ext.top_generator();
    Ok((ext, root))
}

/// An element of a tower.
#[derive(Clone)]
pub struct FieldElem {
    tower: TowerField,
    terms: Vec<(u32, Rat)>,
}

impl FieldElem {
    fn from_dense(tower: TowerField, coeffs: &[Rat]) -> FieldElem {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as u32, c.clone()))
            .collect();
        FieldElem { tower, terms }
    }

    fn from_map(tower: TowerField, map: BTreeMap<u32, Rat>) -> FieldElem {
        let terms = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        FieldElem { tower, terms }
    }

    pub fn tower(&self) -> &TowerField {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Number of nonzero coordinates.
    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    /// Dense coefficient vector over the tower basis.
    pub fn coeffs(&self) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.tower.dim()];
        for (i, c) in &self.terms {
            v[*i as usize] = c.clone();
        }
        v
    }

    pub fn as_rational(&self) -> Option<Rat> {
        match self.terms.as_slice() {
            [] => Some(Rat::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    /// Number of leading steps actually used by the coefficients.
    pub fn min_steps(&self) -> usize {
        let Some(max_idx) = self.terms.iter().map(|(i, _)| *i as usize).max() else {
            return 0;
        };
        let degs = self.tower.degrees();
        let mut dim = 1;
        for (j, d) in degs.iter().enumerate() {
            if max_idx < dim {
                return j;
            }
            dim *= d;
        }
        degs.len()
    }

    /// Reinterpret in the ancestor `target`; the coefficients must fit.
    pub fn restrict(&self, target: &TowerField) -> FieldElem {
        assert!(target.is_prefix_of(&self.tower), "restriction target is not a prefix");
        assert!(
            self.terms.iter().all(|(i, _)| (*i as usize) < target.dim()),
            "element does not live in the restriction target"
        );
        FieldElem {
            tower: target.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Embed into a tower that extends this element's tower.
    pub fn embed(&self, target: &TowerField) -> FieldElem {
        if self.tower.ptr_eq(target) {
            return self.clone();
        }
        assert!(
            self.tower.is_prefix_of(target),
            "cannot embed: {:?} is not a prefix of {:?}",
            self.tower,
            target
        );
        FieldElem {
            tower: target.clone(),
            terms: self.terms.clone(),
        }
    }

    fn unify(&self, rhs: &FieldElem) -> (FieldElem, FieldElem) {
        if self.tower.ptr_eq(&rhs.tower) {
            return (self.clone(), rhs.clone());
        }
        let t = common_tower(&self.tower, &rhs.tower)
            .unwrap_or_else(|| panic!("incompatible towers {:?} and {:?}", self.tower, rhs.tower));
        (self.embed(&t), rhs.embed(&t))
    }

    fn add_impl(&self, rhs: &FieldElem, sign: bool) -> FieldElem {
        if !self.tower.ptr_eq(&rhs.tower) {
            let (a, b) = self.unify(rhs);
            return a.add_impl(&b, sign);
        }
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &rhs.terms;
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                let c = if sign { b[j].1.clone() } else { -&b[j].1 };
                out.push((b[j].0, c));
                j += 1;
            } else {
                let c = if sign { &a[i].1 + &b[j].1 } else { &a[i].1 - &b[j].1 };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        FieldElem {
            tower: self.tower.clone(),
            terms: out,
        }
    }

    fn mul_impl(&self, rhs: &FieldElem) -> FieldElem {
        if !self.tower.ptr_eq(&rhs.tower) {
            let (a, b) = self.unify(rhs);
            return a.mul_impl(&b);
        }
        if self.is_zero() || rhs.is_zero() {
            return self.tower.zero();
        }
        // Scalar fast path.
        if let [(0, c)] = self.terms.as_slice() {
            return rhs.scale(c);
        }
        if let [(0, c)] = rhs.terms.as_slice() {
            return self.scale(c);
        }
        if self.tower.all_pure() {
            self.mul_pure(rhs)
        } else {
            let a = self.coeffs();
            let b = rhs.coeffs();
            let c = mul_dense(&self.tower, &a, &b);
            FieldElem::from_dense(self.tower.clone(), &c)
        }
    }

    fn mul_pure(&self, rhs: &FieldElem) -> FieldElem {
        let node = &self.tower.0;
        let mut acc: BTreeMap<u32, Rat> = BTreeMap::new();
        for (ia, ca) in &self.terms {
            let ea = self.tower.exponents(*ia as usize);
            for (ib, cb) in &rhs.terms {
                let mut ia = *ia as usize;
                let mut ib = *ib as usize;
                let mut idx = 0usize;
                let mut coef = ca * cb;
                for (k, &d) in node.degrees.iter().enumerate() {
                    let e = ea[k] + ib % d;
                    ia /= d;
                    ib /= d;
                    let e = if e >= d {
                        coef = &coef * node.pure[k].as_ref().unwrap();
                        e - d
                    } else {
                        e
                    };
                    idx += e * node.strides[k];
                }
                let _ = ia;
                if coef.is_zero() {
                    continue;
                }
                let slot = acc.entry(idx as u32).or_insert_with(Rat::zero);
                *slot += &coef;
            }
        }
        FieldElem::from_map(self.tower.clone(), acc)
    }

    pub fn scale(&self, c: &Rat) -> FieldElem {
        if c.is_zero() {
            return self.tower.zero();
        }
        FieldElem {
            tower: self.tower.clone(),
            terms: self.terms.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    pub fn square(&self) -> FieldElem {
        self * self
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        let mut acc = self.tower.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Split into the coefficients of powers of the top generator, as
    /// elements of the parent tower.
    fn split_top(&self) -> Vec<FieldElem> {
        let parent = self.tower.parent().expect("split_top on Q");
        let d = *self.tower.degrees().last().unwrap();
        let m = parent.dim() as u32;
        let mut blocks = vec![parent.zero(); d];
        for (i, c) in &self.terms {
            let j = (*i / m) as usize;
            blocks[j].terms.push((*i % m, c.clone()));
        }
        blocks
    }

    fn join_top(tower: &TowerField, blocks: &[FieldElem]) -> FieldElem {
        let m = tower.parent().unwrap().dim() as u32;
        let mut terms = Vec::new();
        for (j, b) in blocks.iter().enumerate() {
            for (i, c) in &b.terms {
                terms.push((j as u32 * m + *i, c.clone()));
            }
        }
        FieldElem {
            tower: tower.clone(),
            terms,
        }
    }

    /// Multiplicative inverse.
    ///
    /// Errors with `ZeroInput` on zero and `ZeroDivisor` when `self` is a
    /// nonzero non-unit (possible only when some step polynomial is reducible).
    pub fn inv(&self) -> Result<FieldElem, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroInput);
        }
        if let Some(r) = self.as_rational() {
            return Ok(self.tower.from_rat(r.inv()?));
        }
        let tower = self.tower.clone();
        let parent = tower.parent().unwrap().clone();
        let blocks = self.split_top();
        if blocks[1..].iter().all(FieldElem::is_zero) {
            return Ok(blocks[0].inv()?.embed(&tower));
        }
        let step = tower.top_step().unwrap();
        if step.degree() == 2 {
            // t^2 + p t + q; conjugate of A + B t is A - p B - B t.
            let (a, b) = (&blocks[0], &blocks[1]);
            let q = &step.lower[0];
            let p = &step.lower[1];
            let norm = &(&(a * a) - &(&(p * a) * b)) + &(&(q * b) * b);
            if norm.is_zero() {
                return Err(ScalarError::ZeroDivisor);
            }
            let ninv = norm.inv()?;
            let c0 = &(a - &(p * b)) * &ninv;
            let c1 = -&(b * &ninv);
            return Ok(FieldElem::join_top(&tower, &[c0, c1]));
        }
        // Extended Euclid over the parent field.
        let mut modulus: Vec<FieldElem> = step.lower.clone();
        modulus.push(parent.one());
        let a = trim(blocks);
        let (g, s) = poly_xgcd_inverse(&a, &modulus, &parent)?;
        if g.len() > 1 {
            return Err(ScalarError::ZeroDivisor);
        }
        let ginv = g[0].inv()?;
        let mut coeffs: Vec<FieldElem> = s.iter().map(|c| c * &ginv).collect();
        coeffs.resize(step.degree(), parent.zero());
        Ok(FieldElem::join_top(&tower, &coeffs))
    }

    /// Human-readable surd expression in the step labels, e.g. `1/2 + 3*i*a`.
    pub fn to_expr(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let labels = self.tower.labels();
        let mut out = String::new();
        for (n, (idx, c)) in self.terms.iter().enumerate() {
            let exps = self.tower.exponents(*idx as usize);
            let mono: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(k, &e)| {
                    let l = &labels[k];
                    let l = if l.len() > 1 { format!("[{l}]") } else { l.clone() };
                    if e == 1 {
                        l
                    } else {
                        format!("{l}^{e}")
                    }
                })
                .collect();
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&format!("{}*{}", mag, mono.join("*")));
            }
        }
        out
    }
}

fn trim(mut p: Vec<FieldElem>) -> Vec<FieldElem> {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

/// Returns `(g, s)` with `s * a ≡ g (mod m)`, `g = gcd(a, m)` (not normalized).
fn poly_xgcd_inverse(
    a: &[FieldElem],
    m: &[FieldElem],
    field: &TowerField,
) -> Result<(Vec<FieldElem>, Vec<FieldElem>), ScalarError> {
    let mut r0 = trim(m.to_vec());
    let mut r1 = trim(a.to_vec());
    let mut s0 = vec![field.zero()];
    let mut s1 = vec![field.one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divrem(&r0, &r1)?;
        let qs = poly_mul(&q, &s1, field);
        let s2 = poly_sub(&s0, &qs, field);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    Ok((r0, s0))
}

fn poly_divrem(a: &[FieldElem], b: &[FieldElem]) -> Result<(Vec<FieldElem>, Vec<FieldElem>), ScalarError> {
    let field = b[0].tower().clone();
    let b = trim(b.to_vec());
    let lead_inv = b.last().unwrap().inv()?;
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return Ok((vec![field.zero()], r));
    }
    let mut q = vec![field.zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() * &lead_inv;
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] = &r[shift + k] - &(&c * bk);
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
        if r.is_empty() {
            r.push(field.zero());
        }
    }
    Ok((trim(q), r))
}

fn poly_mul(a: &[FieldElem], b: &[FieldElem], field: &TowerField) -> Vec<FieldElem> {
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(out)
}

fn poly_sub(a: &[FieldElem], b: &[FieldElem], field: &TowerField) -> Vec<FieldElem> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| field.zero());
            let y = b.get(i).cloned().unwrap_or_else(|| field.zero());
            &x - &y
        })
        .collect();
    trim(out)
}

/// Dense product by recursive polynomial multiplication and reduction.
fn mul_dense(tower: &TowerField, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let Some(parent) = tower.parent() else {
        return vec![&a[0] * &b[0]];
    };
    let step = tower.top_step().unwrap();
    let d = step.degree();
    let m = parent.dim();
    let block = |v: &[Rat], j: usize| v[j * m..(j + 1) * m].to_vec();
    let mut prod: Vec<Vec<Rat>> = vec![vec![Rat::zero(); m]; 2 * d - 1];
    for i in 0..d {
        let ai = block(a, i);
        if ai.iter().all(Rat::is_zero) {
            continue;
        }
        for j in 0..d {
            let bj = block(b, j);
            if bj.iter().all(Rat::is_zero) {
                continue;
            }
            let c = mul_dense(parent, &ai, &bj);
            for (s, x) in prod[i + j].iter_mut().zip(c.iter()) {
                *s += x;
            }
        }
    }
    let lower: Vec<Vec<Rat>> = step.lower.iter().map(|c| c.coeffs()).collect();
    for j in (d..2 * d - 1).rev() {
        let cj = std::mem::replace(&mut prod[j], vec![Rat::zero(); m]);
        if cj.iter().all(Rat::is_zero) {
            continue;
        }
        for (l, pl) in lower.iter().enumerate() {
            if pl.iter().all(Rat::is_zero) {
                continue;
            }
            let t = mul_dense(parent, &cj, pl);
            for (s, x) in prod[j - d + l].iter_mut().zip(t.iter()) {
                *s -= x;
            }
        }
    }
    prod.truncate(d);
    prod.into_iter().flatten().collect()
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        if self.tower.ptr_eq(&other.tower) {
            return self.terms == other.terms;
        }
        match common_tower(&self.tower, &other.tower) {
            Some(_) => self.terms == other.terms,
            None => false,
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.add_impl(rhs, true)
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self.add_impl(rhs, false)
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.mul_impl(rhs)
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        self.add_impl(&rhs, true)
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        self.add_impl(&rhs, false)
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        self.mul_impl(&rhs)
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            tower: self.tower.clone(),
            terms: self.terms.iter().map(|(i, c)| (*i, -c)).collect(),
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> TowerField {
        TowerField::rationals()
    }

    #[test]
    fn adjoining_i_gives_dimension_two() {
        let t = q().adjoin_sqrt_rational(&Rat::from_int(-1), "i");
        assert_eq!(t.dim(), 2);
        let i = t.top_generator();
        assert_eq!(&i * &i, t.from_int(-1));
    }

    #[test]
    fn independent_surds_give_dimension_four() {
        let t = q()
            .adjoin_sqrt_rational(&Rat::from_int(2), "r2")
            .adjoin_sqrt_rational(&Rat::from_int(3), "r3");
        assert_eq!(t.dim(), 4);
        let r6 = &t.generator(0) * &t.generator(1);
        assert_eq!(&r6 * &r6, t.from_int(6));
    }

    #[test]
    fn inverse_of_i_is_minus_i() {
        let t = q().adjoin_sqrt_rational(&Rat::from_int(-1), "i");
        let i = t.top_generator();
        assert_eq!(i.inv().unwrap(), -&i);
    }

    #[test]
    fn inverse_of_one_plus_sqrt2() {
        let t = q().adjoin_sqrt_rational(&Rat::from_int(2), "r2");
        let r2 = t.top_generator();
        let x = &t.one() + &r2;
        assert_eq!(x.inv().unwrap(), &r2 - &t.one());
    }

    #[test]
    fn inverse_of_two() {
        assert_eq!(q().from_int(2).inv().unwrap(), q().from_rat(Rat::new(1, 2)));
    }

    #[test]
    fn zero_inverse_is_rejected() {
        assert_eq!(q().zero().inv().unwrap_err(), ScalarError::ZeroInput);
    }

    #[test]
    fn reducible_step_surfaces_as_zero_divisor() {
        let t = q().adjoin_root(&[q().from_int(-4), q().zero()], "x").unwrap();
        let x = t.top_generator();
        let y = &x - &t.from_int(2);
        assert_eq!(y.inv().unwrap_err(), ScalarError::ZeroDivisor);
    }

    #[test]
    fn cubic_step_inverts_by_euclid() {
        // x^3 - x - 1 is irreducible over Q.
        let t = q()
            .adjoin_root(&[q().from_int(-1), q().from_int(-1), q().zero()], "u")
            .unwrap();
        let u = t.top_generator();
        let x = &(&u * &u) + &t.from_int(3);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        // Reducible cubic: (x - 1)(x^2 + 1) = x^3 - x^2 + x - 1.
        let r = q()
            .adjoin_root(&[q().from_int(-1), q().from_int(1), q().from_int(-1)], "w")
            .unwrap();
        let w = r.top_generator();
        assert_eq!((&w - &r.one()).inv().unwrap_err(), ScalarError::ZeroDivisor);
    }

    #[test]
    fn non_pure_quadratic_step() {
        // zeta^2 + zeta + 1 = 0
        let t = q().adjoin_root(&[q().one(), q().one()], "z").unwrap();
        let z = t.top_generator();
        assert_eq!(z.pow(3), t.one());
        assert!((&z * &z.inv().unwrap()).is_one());
        assert_eq!(z.inv().unwrap(), &z * &z);
    }

    #[test]
    fn sqrt_adjoin_detects_squares_and_products() {
        let (t, r2) = sqrt_adjoin(&q(), &q().from_int(2), "r2").unwrap();
        assert_eq!(t.dim(), 2);
        let (t, r3) = sqrt_adjoin(&t, &t.from_int(3), "r3").unwrap();
        assert_eq!(t.dim(), 4);
        let (t2, r6) = sqrt_adjoin(&t, &t.from_int(24), "r24").unwrap();
        assert!(t2.ptr_eq(&t));
        assert_eq!(&r6 * &r6, t.from_int(24));
        assert_eq!(r6, (&r2 * &r3).scale(&Rat::from_int(2)));
        let (t3, four) = sqrt_adjoin(&t, &t.from_int(4), "r4").unwrap();
        assert!(t3.ptr_eq(&t));
        assert_eq!(&four * &four, t.from_int(4));
        assert_eq!(sqrt_adjoin(&t, &t.zero(), "z").unwrap_err(), ScalarError::ZeroInput);
    }

    #[test]
    fn sqrt_adjoin_of_minus_eight_sevenths() {
        let (t, r) = sqrt_adjoin(&q(), &q().from_rat(Rat::new(-8, 7)), "s").unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(&r * &r, t.from_rat(Rat::new(-8, 7)));
        assert_eq!(t.top_step().unwrap().lower[0], q().from_rat(Rat::new(8, 7)));
    }

    #[test]
    fn sqrt_of_non_rational_radicand() {
        let (t, r2) = sqrt_adjoin(&q(), &q().from_int(2), "r2").unwrap();
        let s = &t.one() + &r2;
        let (t2, root) = sqrt_adjoin(&t, &s, "w").unwrap();
        assert_eq!(t2.dim(), 4);
        assert_eq!(&root * &root, s.embed(&t2));
        assert!((&root * &root.inv().unwrap()).is_one());
    }

    #[test]
    fn embedding_preserves_values() {
        let t = q().adjoin_sqrt_rational(&Rat::from_int(-1), "i");
        let i = t.top_generator();
        let t2 = t.adjoin_sqrt_rational(&Rat::from_int(5), "r5");
        let i2 = i.embed(&t2);
        assert_eq!(&i2 * &i2, t2.from_int(-1));
        assert_eq!(i, i2);
        // mixed-tower arithmetic embeds into the larger tower
        let s = &i + &t2.top_generator();
        assert!(s.tower().ptr_eq(&t2));
    }

    #[test]
    fn expressions_are_readable() {
        let t = q()
            .adjoin_sqrt_rational(&Rat::from_int(-1), "i")
            .adjoin_sqrt_rational(&Rat::from_int(2), "a");
        let x = &t.from_rat(Rat::new(1, 2)) - &(&t.generator(0) * &t.generator(1)).scale(&Rat::from_int(3));
        assert_eq!(x.to_expr(), "1/2 - 3*i*a");
        assert_eq!(t.zero().to_expr(), "0");
    }

    #[test]
    fn min_steps_and_restrict() {
        let t = q()
            .adjoin_sqrt_rational(&Rat::from_int(-1), "i")
            .adjoin_sqrt_rational(&Rat::from_int(2), "a");
        let i = t.generator(0);
        assert_eq!(i.min_steps(), 1);
        assert_eq!(t.from_int(3).min_steps(), 0);
        assert_eq!(t.generator(1).min_steps(), 2);
        let r = i.restrict(&t.prefix(1));
        assert_eq!(r.tower().dim(), 2);
    }
}
