use std::collections::BTreeMap;
use std::fmt;

use crate::linalg::SparseVec;
use crate::scalars::{FieldElem, TowerField};

/// A homogeneous element of the free algebra on `gens` generators.
///
/// Words are stored as generator-index sequences of length `degree`; zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct NcTensor {
    gens: usize,
    degree: usize,
    terms: BTreeMap<Vec<u8>, FieldElem>,
}

impl NcTensor {
    pub fn zero(gens: usize, degree: usize) -> Self {
        NcTensor {
            gens,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The degree-zero element `c`.
    pub fn scalar(gens: usize, c: FieldElem) -> Self {
        NcTensor::monomial(gens, &[], c)
    }

    pub fn monomial(gens: usize, word: &[u8], c: FieldElem) -> Self {
        let mut t = NcTensor::zero(gens, word.len());
        t.add_term(word.to_vec(), c);
        t
    }

    /// The generator `x_i` with coefficient one in `tower`.
    pub fn generator(gens: usize, i: usize, tower: &TowerField) -> Self {
        assert!(i < gens);
        NcTensor::monomial(gens, &[i as u8], tower.one())
    }

    /// The linear form `sum_i c_i x_i`.
    pub fn linear(coeffs: &[FieldElem]) -> Self {
        let mut t = NcTensor::zero(coeffs.len(), 1);
        for (i, c) in coeffs.iter().enumerate() {
            t.add_term(vec![i as u8], c.clone());
        }
        t
    }

    pub fn from_terms(gens: usize, degree: usize, terms: impl IntoIterator<Item = (Vec<u8>, FieldElem)>) -> Self {
        let mut t = NcTensor::zero(gens, degree);
        for (w, c) in terms {
            t.add_term(w, c);
        }
        t
    }

    pub fn add_term(&mut self, word: Vec<u8>, c: FieldElem) {
        assert_eq!(word.len(), self.degree, "word length differs from degree");
        assert!(word.iter().all(|&g| (g as usize) < self.gens), "generator out of range");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&word);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(word, c);
            }
        }
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &FieldElem)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, word: &[u8]) -> Option<&FieldElem> {
        self.terms.get(word)
    }

    /// Smallest tower containing every coefficient, if any.
    pub fn tower(&self) -> Option<TowerField> {
        let mut it = self.terms.values();
        let first = it.next()?.tower().clone();
        Some(it.fold(first, |acc, c| {
            crate::scalars::common_tower(&acc, c.tower()).expect("coefficients from incompatible towers")
        }))
    }

    fn check_same_shape(&self, other: &NcTensor) {
        assert_eq!(self.gens, other.gens, "generator count mismatch");
        assert_eq!(self.degree, other.degree, "degree mismatch");
    }

    pub fn add(&self, other: &NcTensor) -> NcTensor {
        self.check_same_shape(other);
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NcTensor) -> NcTensor {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NcTensor {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, s: &FieldElem) -> NcTensor {
        if s.is_zero() {
            return NcTensor::zero(self.gens, self.degree);
        }
        self.map_coeffs(|c| c * s)
    }

    pub fn map_coeffs(&self, f: impl Fn(&FieldElem) -> FieldElem) -> NcTensor {
        let mut out = NcTensor::zero(self.gens, self.degree);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// Rescale each word coefficient by a function of the word.
    pub fn map_terms(&self, f: impl Fn(&[u8], &FieldElem) -> FieldElem) -> NcTensor {
        let mut out = NcTensor::zero(self.gens, self.degree);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(w, c));
        }
        out
    }

    /// Concatenation product `self ⊗ other`.
    pub fn tensor(&self, other: &NcTensor) -> NcTensor {
        assert_eq!(self.gens, other.gens, "generator count mismatch");
        let mut out = NcTensor::zero(self.gens, self.degree + other.degree);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        out
    }

    /// Reverse every word.
    pub fn reversed(&self) -> NcTensor {
        let mut out = NcTensor::zero(self.gens, self.degree);
        for (w, c) in &self.terms {
            let mut r = w.clone();
            r.reverse();
            out.add_term(r, c.clone());
        }
        out
    }

    /// Apply the algebra endomorphism sending generator `j` to `images[j]`
    /// (each a degree-one tensor).
    pub fn substitute(&self, images: &[NcTensor]) -> NcTensor {
        assert_eq!(images.len(), self.gens);
        assert!(images.iter().all(|t| t.degree == 1));
        let mut out = NcTensor::zero(self.gens, self.degree);
        for (w, c) in &self.terms {
            let mut acc = NcTensor::monomial(self.gens, &[], c.clone());
            for &g in w {
                acc = acc.tensor(&images[g as usize]);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Index of a word in the basis of V^{⊗n} (first letter most significant).
    pub fn word_index(gens: usize, word: &[u8]) -> usize {
        word.iter().fold(0, |acc, &g| acc * gens + g as usize)
    }

    pub fn index_word(gens: usize, degree: usize, mut idx: usize) -> Vec<u8> {
        let mut w = vec![0u8; degree];
        for k in (0..degree).rev() {
            w[k] = (idx % gens) as u8;
            idx /= gens;
        }
        w
    }

    /// Coordinates over the word basis.
    pub fn to_sparse(&self) -> SparseVec<FieldElem> {
        let mut v: SparseVec<FieldElem> = self
            .terms
            .iter()
            .map(|(w, c)| (NcTensor::word_index(self.gens, w), c.clone()))
            .collect();
        v.sort_by_key(|(i, _)| *i);
        v
    }

    pub fn from_sparse(gens: usize, degree: usize, v: &SparseVec<FieldElem>) -> NcTensor {
        NcTensor::from_terms(
            gens,
            degree,
            v.iter().map(|(i, c)| (NcTensor::index_word(gens, degree, *i), c.clone())),
        )
    }

    /// Evaluate as a multilinear form: the word `w` contributes
    /// `c * points[0][w_0] * ... * points[n-1][w_{n-1}]`.
    pub fn eval_multilinear(&self, points: &[&[FieldElem]]) -> FieldElem {
        assert_eq!(points.len(), self.degree);
        let zero = points
            .first()
            .and_then(|p| p.first())
            .map(|x| x.tower().zero())
            .or_else(|| self.tower().map(|t| t.zero()))
            .unwrap_or_else(|| TowerField::rationals().zero());
        let mut acc = zero;
        for (w, c) in &self.terms {
            let mut t = c.clone();
            for (k, &g) in w.iter().enumerate() {
                t = &t * &points[k][g as usize];
                if t.is_zero() {
                    break;
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Bilinear value `r(u, v)` of a degree-two tensor.
    pub fn eval_bilinear(&self, u: &[FieldElem], v: &[FieldElem]) -> FieldElem {
        assert_eq!(self.degree, 2);
        self.eval_multilinear(&[u, v])
    }

    pub fn display_with(&self, labels: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (n, (w, c)) in self.terms.iter().enumerate() {
            let word: String = if w.is_empty() {
                String::new()
            } else {
                w.iter().map(|&g| labels[g as usize].as_str()).collect::<Vec<_>>().join("*")
            };
            let coeff = c.to_expr();
            let simple = c.support_len() == 1;
            let (neg, body) = match coeff.strip_prefix('-') {
                Some(rest) if simple => (true, rest.to_string()),
                _ => (false, if simple { coeff.clone() } else { format!("({coeff})") }),
            };
            if n > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            if word.is_empty() {
                s.push_str(&body);
            } else if body == "1" {
                s.push_str(&word);
            } else {
                s.push_str(&format!("{body}*{word}"));
            }
        }
        s
    }
}

impl fmt::Display for NcTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = (0..self.gens).map(|i| format!("x{i}")).collect();
        f.write_str(&self.display_with(&labels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> TowerField {
        TowerField::rationals()
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut t = NcTensor::zero(2, 1);
        t.add_term(vec![0], q().one());
        t.add_term(vec![0], -q().one());
        assert!(t.is_zero());
    }

    #[test]
    fn tensor_concatenates_words() {
        let x0 = NcTensor::generator(2, 0, &q());
        let x1 = NcTensor::generator(2, 1, &q());
        let c = x0.tensor(&x1).sub(&x1.tensor(&x0));
        assert_eq!(c.len(), 2);
        assert_eq!(c.coeff(&[1, 0]), Some(&q().from_int(-1)));
        assert_eq!(c.to_string(), "x0*x1 - x1*x0");
    }

    #[test]
    fn word_indices_roundtrip() {
        for idx in 0..64 {
            let w = NcTensor::index_word(4, 3, idx);
            assert_eq!(NcTensor::word_index(4, &w), idx);
        }
    }

    #[test]
    fn bilinear_evaluation() {
        let x0 = NcTensor::generator(2, 0, &q());
        let x1 = NcTensor::generator(2, 1, &q());
        let c = x0.tensor(&x1).sub(&x1.tensor(&x0));
        let u = [q().from_int(1), q().from_int(2)];
        let v = [q().from_int(3), q().from_int(5)];
        assert_eq!(c.eval_bilinear(&u, &v), q().from_int(5 - 6));
    }

    #[test]
    fn substitution_is_multiplicative() {
        let x0 = NcTensor::generator(2, 0, &q());
        let x1 = NcTensor::generator(2, 1, &q());
        let swap = [x1.clone(), x0.clone()];
        let t = x0.tensor(&x0).add(&x0.tensor(&x1));
        let s = t.substitute(&swap);
        assert_eq!(s, x1.tensor(&x1).add(&x1.tensor(&x0)));
    }
}
