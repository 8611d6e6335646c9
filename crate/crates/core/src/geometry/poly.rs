use std::collections::BTreeMap;
use std::fmt;

use crate::linalg::Matrix;
use crate::scalars::{FieldElem, TowerField};

use super::ProjPoint;

/// A commutative polynomial in `nvars` variables, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, FieldElem>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: FieldElem) -> Self {
        MultiPoly::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exps: Vec<u32>, c: FieldElem) -> Self {
        let mut p = MultiPoly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn var(nvars: usize, i: usize, tower: &TowerField) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MultiPoly::monomial(e, tower.one())
    }

    /// `Σ c_j x_j^2`.
    pub fn diagonal(coeffs: &[FieldElem]) -> Self {
        let n = coeffs.len();
        let mut p = MultiPoly::zero(n);
        for (j, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 2;
            p.add_term(e, c.clone());
        }
        p
    }

    /// `Σ c_j x_j`.
    pub fn linear(coeffs: &[FieldElem]) -> Self {
        let n = coeffs.len();
        let mut p = MultiPoly::zero(n);
        for (j, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: FieldElem) {
        assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &FieldElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Option<&FieldElem> {
        self.terms.get(exps)
    }

    /// Total degree if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = degs.next()?;
        degs.all(|x| x == d).then_some(d)
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale_by(&self, s: &FieldElem) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, x: &[FieldElem]) -> FieldElem {
        assert_eq!(x.len(), self.nvars);
        let zero = x
            .first()
            .map(|c| c.tower().zero())
            .unwrap_or_else(|| TowerField::rationals().zero());
        let mut acc = zero;
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = &t * &xi.pow(k);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn eval_point(&self, p: &ProjPoint) -> FieldElem {
        self.eval(p.coords())
    }

    /// All exponent vectors of total degree `d` in `n` variables, in
    /// lexicographically decreasing order.
    pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
        fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if prefix.len() + 1 == n {
                prefix.push(d);
                out.push(prefix.clone());
                prefix.pop();
                return;
            }
            for k in (0..=d).rev() {
                prefix.push(k);
                rec(n, d - k, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        rec(n, d, &mut Vec::new(), &mut out);
        out
    }

    /// Coefficients over `monomials(nvars, d)`; zero-padded with `tower`.
    pub fn coeff_vector(&self, d: u32, tower: &TowerField) -> Vec<FieldElem> {
        MultiPoly::monomials(self.nvars, d)
            .iter()
            .map(|e| self.terms.get(e).cloned().unwrap_or_else(|| tower.zero()))
            .collect()
    }

    pub fn display_with(&self, labels: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(j, &k)| if k == 1 { labels[j].to_string() } else { format!("{}^{k}", labels[j]) })
                    .collect();
                let coeff = c.to_expr();
                match (mono.is_empty(), coeff.as_str()) {
                    (true, _) => coeff,
                    (false, "1") => mono.join("*"),
                    (false, "-1") => format!("-{}", mono.join("*")),
                    _ if c.support_len() == 1 => format!("{coeff}*{}", mono.join("*")),
                    _ => format!("({coeff})*{}", mono.join("*")),
                }
            })
            .collect();
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        f.write_str(&self.display_with(&refs))
    }
}

/// A quadratic form `x ↦ xᵀ G x` with symmetric Gram matrix `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadric {
    pub gram: Matrix<FieldElem>,
}

impl Quadric {
    pub fn diagonal(d: &[FieldElem]) -> Self {
        let n = d.len();
        let zero = d[0].tower().zero();
        let mut g = Matrix::filled(n, n, zero);
        for (j, c) in d.iter().enumerate() {
            g.set(j, j, c.clone());
        }
        Quadric { gram: g }
    }

    pub fn is_symmetric(&self) -> bool {
        self.gram == self.gram.transpose()
    }

    pub fn eval(&self, x: &[FieldElem]) -> FieldElem {
        let gx = self.gram.apply(x);
        x.iter().zip(&gx).fold(x[0].tower().zero(), |acc, (a, b)| &acc + &(a * b))
    }

    pub fn eval_point(&self, p: &ProjPoint) -> FieldElem {
        self.eval(p.coords())
    }

    pub fn form(&self) -> MultiPoly {
        let n = self.gram.to_rows().len();
        let mut p = MultiPoly::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                p.add_term(e, self.gram.get(i, j).clone());
            }
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.gram.rank()
    }

    /// Basis of the radical; its projectivization is the singular locus.
    pub fn kernel(&self) -> Vec<Vec<FieldElem>> {
        self.gram.kernel()
    }
}
