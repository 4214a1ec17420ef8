//! Free Lie algebra combinatorics.
//!
//! Lyndon words with their standard bracketings form a basis of the free Lie
//! algebra; brackets of basis elements are rewritten into this basis by the
//! usual recursion on standard factorizations. Also here: the multilinear
//! part lie(n) and the shuffle subspace sh(n) of the group algebra k[S_n].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::exactla::{format_rational, Echelon, Rational, SparseVec};

/// A word over the alphabet {0, .., m-1}. Printed 1-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LyndonWord(pub Vec<u8>);

pub fn letter_char(l: u8) -> char {
    let k = l as u32 + 1;
    if k <= 9 {
        char::from_digit(k, 10).unwrap()
    } else {
        char::from_u32('a' as u32 + (k - 10)).unwrap()
    }
}

impl LyndonWord {
    pub fn letter(l: u8) -> Self {
        LyndonWord(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// Standard factorization (u, v): v is the longest proper Lyndon suffix.
    pub fn standard_factorization(&self) -> Option<(LyndonWord, LyndonWord)> {
        if self.0.len() < 2 {
            return None;
        }
        (1..self.0.len())
            .find(|&i| is_lyndon(&self.0[i..]))
            .map(|i| (LyndonWord(self.0[..i].to_vec()), LyndonWord(self.0[i..].to_vec())))
    }

    /// The standard bracketing, e.g. "[1,[1,2]]".
    pub fn bracketing(&self) -> String {
        match self.standard_factorization() {
            None => self.0.iter().map(|&l| letter_char(l)).collect(),
            Some((u, v)) => format!("[{},{}]", u.bracketing(), v.bracketing()),
        }
    }
}

impl fmt::Display for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            write!(f, "{}", letter_char(l))?;
        }
        Ok(())
    }
}

impl fmt::Debug for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Strictly smaller than each proper suffix.
pub fn is_lyndon(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// All Lyndon words of the given length, in lexicographic order (Duval's generator).
pub fn lyndon_basis(alphabet_size: usize, weight: usize) -> Vec<LyndonWord> {
    let mut out = Vec::new();
    if alphabet_size == 0 || weight == 0 {
        return out;
    }
    let max = (alphabet_size - 1) as u8;
    let mut w: Vec<u8> = vec![0];
    loop {
        if w.len() == weight {
            out.push(LyndonWord(w.clone()));
        }
        let m = w.len();
        while w.len() < weight {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&max) {
            w.pop();
        }
        match w.last_mut() {
            None => break,
            Some(l) => *l += 1,
        }
    }
    out
}

pub fn mobius(n: usize) -> i64 {
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Dimension of the weight-d part of the free Lie algebra on m generators.
pub fn witt_dimension(alphabet_size: usize, weight: usize) -> usize {
    if weight == 0 {
        return 0;
    }
    let m = alphabet_size as i128;
    let total: i128 = (1..=weight)
        .filter(|k| weight % k == 0)
        .map(|k| mobius(k) as i128 * m.pow((weight / k) as u32))
        .sum();
    (total / weight as i128) as usize
}

/// An element of the free Lie algebra, homogeneous of one weight, in the Lyndon basis.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LieElement {
    pub weight: usize,
    pub coeffs: BTreeMap<LyndonWord, Rational>,
}

impl LieElement {
    pub fn zero(weight: usize) -> Self {
        LieElement { weight, coeffs: BTreeMap::new() }
    }

    pub fn generator(l: u8) -> Self {
        Self::basis(LyndonWord::letter(l))
    }

    pub fn basis(w: LyndonWord) -> Self {
        let weight = w.len();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(w, Rational::one());
        LieElement { weight, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, w: LyndonWord, c: &Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(w.len(), self.weight);
        let e = self.coeffs.entry(w.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&w);
        }
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &LieElement) {
        for (w, x) in &other.coeffs {
            self.add_term(w.clone(), &(c * x));
        }
    }

    pub fn scaled(&self, c: &Rational) -> LieElement {
        let mut out = LieElement::zero(self.weight);
        out.add_scaled(c, self);
        out
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), other);
        out
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), other);
        out
    }

    /// Coordinates against a list of Lyndon words.
    pub fn coordinates(&self, basis: &[LyndonWord]) -> SparseVec {
        let index: BTreeMap<&LyndonWord, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
        self.coeffs
            .iter()
            .map(|(w, c)| (*index.get(w).expect("word outside basis"), c.clone()))
            .collect()
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.coeffs.iter().enumerate() {
            let s = format_rational(c);
            let (sign, mag) = match s.strip_prefix('-') {
                Some(m) => ("-", m.to_string()),
                None => ("+", s),
            };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag == "1" {
                write!(f, "{}", w.bracketing())?;
            } else {
                write!(f, "{mag}·{}", w.bracketing())?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// [P(u), P(v)] expanded in the Lyndon basis.
pub fn bracket_words(u: &LyndonWord, v: &LyndonWord) -> LieElement {
    let weight = u.len() + v.len();
    match u.cmp(v) {
        std::cmp::Ordering::Equal => LieElement::zero(weight),
        std::cmp::Ordering::Greater => bracket_words(v, u).scaled(&-Rational::one()),
        std::cmp::Ordering::Less => {
            let mut uv = u.0.clone();
            uv.extend_from_slice(&v.0);
            match u.standard_factorization() {
                Some((u1, u2)) if u2 < *v => {
                    // [[u1,u2],v] = [u1,[u2,v]] - [u2,[u1,v]]
                    let mut out = bracket_word_element(&u1, &bracket_words(&u2, v));
                    out.add_scaled(&-Rational::one(), &bracket_word_element(&u2, &bracket_words(&u1, v)));
                    out
                }
                _ => LieElement::basis(LyndonWord(uv)),
            }
        }
    }
}

fn bracket_word_element(u: &LyndonWord, y: &LieElement) -> LieElement {
    let mut out = LieElement::zero(u.len() + y.weight);
    for (w, c) in &y.coeffs {
        out.add_scaled(c, &bracket_words(u, w));
    }
    out
}

pub fn bracket(x: &LieElement, y: &LieElement) -> LieElement {
    let mut out = LieElement::zero(x.weight + y.weight);
    for (u, a) in &x.coeffs {
        for (v, b) in &y.coeffs {
            out.add_scaled(&(a * b), &bracket_words(u, v));
        }
    }
    out
}

/// Left-normed brackets [[..[e1, e_s2], ..], e_sn] over permutations fixing the first letter.
pub fn multilinear_basis(n: usize) -> Vec<LieElement> {
    if n == 0 {
        return Vec::new();
    }
    let rest: Vec<u8> = (1..n as u8).collect();
    permutations(&rest)
        .into_iter()
        .map(|p| {
            p.into_iter().fold(LieElement::generator(0), |acc, l| bracket(&acc, &LieElement::generator(l)))
        })
        .collect()
}

/// All permutations of the given items, in lexicographic order of positions.
pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

/// A permutation as a one-line word over 0..n: position k holds the image of k.
pub type Perm = Vec<usize>;

/// All of S_n in lexicographic order; position in this list is the permutation's index.
pub fn all_perms(n: usize) -> Vec<Perm> {
    permutations(&(0..n).collect::<Vec<_>>())
}

/// Lexicographic rank of a permutation.
pub fn perm_index(p: &[usize]) -> usize {
    let n = p.len();
    let mut idx = 0;
    let mut fact = (1..n).product::<usize>().max(1);
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        idx += smaller * fact;
        if n - i - 1 > 0 {
            fact /= n - i - 1;
        }
    }
    idx
}

pub fn perm_sign(p: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// (a ∘ b)(k) = a(b(k)).
pub fn perm_compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&k| a[k]).collect()
}

pub fn perm_inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Element of k[S_n].
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PermutationVector {
    pub n: usize,
    pub coeffs: BTreeMap<Perm, Rational>,
}

impl PermutationVector {
    pub fn from_sparse(n: usize, v: &SparseVec) -> Self {
        let perms = all_perms(n);
        PermutationVector { n, coeffs: v.iter().map(|(i, c)| (perms[i].clone(), c.clone())).collect() }
    }

    pub fn to_sparse(&self) -> SparseVec {
        self.coeffs.iter().map(|(p, c)| (perm_index(p), c.clone())).collect()
    }

    pub fn dimension_support(&self) -> usize {
        self.coeffs.len()
    }
}

/// Interleavings of two sequences, each kept in its own order.
pub fn interleavings(a: &[usize], b: &[usize]) -> Vec<Perm> {
    if a.is_empty() {
        return vec![b.to_vec()];
    }
    if b.is_empty() {
        return vec![a.to_vec()];
    }
    let mut out = Vec::new();
    for mut w in interleavings(&a[1..], b) {
        w.insert(0, a[0]);
        out.push(w);
    }
    for mut w in interleavings(a, &b[1..]) {
        w.insert(0, b[0]);
        out.push(w);
    }
    out
}

/// Shuffle vectors sh_{Y,Z} with Y = {0..p}, Z = {p..n} in their natural orders, p = 1..n-1.
pub fn natural_shuffles(n: usize) -> Vec<Vec<Perm>> {
    (1..n)
        .map(|p| {
            let a: Vec<usize> = (0..p).collect();
            let b: Vec<usize> = (p..n).collect();
            interleavings(&a, &b)
        })
        .collect()
}

/// Every sh_{Y,Z} over all decompositions and total orders (as lists of words; may repeat).
pub fn all_shuffle_families(n: usize) -> Vec<Vec<Perm>> {
    let mut out = Vec::new();
    for sigma in all_perms(n) {
        for p in 1..n {
            out.push(interleavings(&sigma[..p], &sigma[p..]));
        }
    }
    out
}

fn shuffle_echelon(n: usize, signed: bool) -> Echelon {
    let mut e = Echelon::new();
    for fam in all_shuffle_families(n) {
        let v: SparseVec = fam
            .iter()
            .map(|w| {
                let c = if signed { perm_sign(w) } else { 1 };
                (perm_index(w), Rational::from_integer(c.into()))
            })
            .collect();
        e.insert(&v);
    }
    e
}

/// Echelonized basis of sh(n) ⊂ k[S_n].
pub fn shuffle_subspace(n: usize) -> Vec<PermutationVector> {
    shuffle_echelon(n, false)
        .sorted_rows()
        .iter()
        .map(|r| PermutationVector::from_sparse(n, r))
        .collect()
}

/// Basis of the sign-twisted shuffle subspace {Σ sgn(w) w : w ∈ sh}, as sparse vectors over perm indices.
pub fn signed_shuffle_basis(n: usize) -> Vec<SparseVec> {
    shuffle_echelon(n, true).sorted_rows()
}

/// Permutations (as indices) not among the pivots of sh(n): a basis of k[S_n]/sh(n).
pub fn shuffle_complement(n: usize, signed: bool) -> Vec<usize> {
    let e = shuffle_echelon(n, signed);
    (0..all_perms(n).len()).filter(|&i| !e.is_pivot(i)).collect()
}

/// Reduction of a word modulo sh(n) onto the complement basis.
pub fn shuffle_reducer(n: usize, signed: bool) -> Echelon {
    shuffle_echelon(n, signed)
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}
