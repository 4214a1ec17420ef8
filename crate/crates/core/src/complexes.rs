//! Envelopes, bar complexes and Chevalley-Eilenberg chains of g(n).
//!
//! Homological degrees are nonpositive and differentials raise degree by one.
//! Everything is graded by weight, and each (degree, weight) cell is finite.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dk::{self, algebra, word_bracket_string, DkAlgebra, LieHom, SetMap};
use crate::exactla::{format_rational, kernel_basis, rank, Rational, SparseMatrix, SparseVec};
use crate::freelie::{perm_sign, permutations};

/// A basis element of g(n): (weight, index in the weight's representative basis).
pub type Letter = (usize, usize);
/// Weakly increasing sequence of letters.
pub type PBWMonomial = Vec<Letter>;
pub type Poly = BTreeMap<PBWMonomial, Rational>;
/// Sequence of positive-weight monomials; the empty word is the unit in degree 0.
pub type BarWord = Vec<PBWMonomial>;
/// Strictly increasing sequence of letters.
pub type CEChain = Vec<Letter>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("d^2 != 0 at degree {degree}, weight {weight}")]
    NotAComplex { degree: i32, weight: usize },
    #[error(transparent)]
    Dk(#[from] dk::DkError),
}

fn add_term<K: Ord + Clone>(p: &mut BTreeMap<K, Rational>, k: K, c: &Rational) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(k.clone()).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&k);
    }
}

/// The universal envelope U(g(n)) with PBW normal forms.
pub struct Envelope {
    n: usize,
    alg: Arc<DkAlgebra>,
    memo: Mutex<HashMap<PBWMonomial, Poly>>,
}

impl Envelope {
    pub fn points(&self) -> usize {
        self.n
    }

    pub fn bracket_letters(&self, a: Letter, b: Letter) -> Vec<(Letter, Rational)> {
        let v = self.alg.bracket_coords(a.0, &SparseVec::unit(a.1), b.0, &SparseVec::unit(b.1));
        v.iter().map(|(k, c)| ((a.0 + b.0, k), c.clone())).collect()
    }

    /// PBW normal form of an arbitrary word in the letters, using ba = ab + [b, a].
    pub fn normal_form(&self, word: &[Letter]) -> Poly {
        let Some(i) = (0..word.len().saturating_sub(1)).find(|&i| word[i] > word[i + 1]) else {
            let mut p = Poly::new();
            p.insert(word.to_vec(), Rational::one());
            return p;
        };
        if let Some(p) = self.memo.lock().unwrap().get(word) {
            return p.clone();
        }
        let mut swapped = word.to_vec();
        swapped.swap(i, i + 1);
        let mut out = self.normal_form(&swapped);
        for (l, c) in self.bracket_letters(word[i], word[i + 1]) {
            let mut w = word[..i].to_vec();
            w.push(l);
            w.extend_from_slice(&word[i + 2..]);
            for (m, x) in self.normal_form(&w) {
                add_term(&mut out, m, &(&c * &x));
            }
        }
        self.memo.lock().unwrap().insert(word.to_vec(), out.clone());
        out
    }

    pub fn mul(&self, a: &[Letter], b: &[Letter]) -> Poly {
        let mut w = a.to_vec();
        w.extend_from_slice(b);
        self.normal_form(&w)
    }

    pub fn mul_poly(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::new();
        for (x, c) in a {
            for (y, d) in b {
                for (m, e) in self.mul(x, y) {
                    add_term(&mut out, m, &(c * d * e));
                }
            }
        }
        out
    }

    /// Image of a monomial under the algebra map induced by a Lie homomorphism into this envelope.
    pub fn map_monomial(&self, h: &LieHom, m: &[Letter]) -> Poly {
        let mut out = Poly::new();
        out.insert(Vec::new(), Rational::one());
        for &(w, k) in m {
            let mut img = Poly::new();
            for (j, c) in h.basis_image(w, k).iter() {
                img.insert(vec![(w, j)], c.clone());
            }
            out = self.mul_poly(&out, &img);
        }
        out
    }
}

pub fn envelope(n: usize) -> Arc<Envelope> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Envelope>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    cache
        .lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| Arc::new(Envelope { n, alg: algebra(n), memo: Mutex::new(HashMap::new()) }))
        .clone()
}

/// Weakly increasing letter sequences of total weight `weight`, letters at least `min`.
fn monomials_from(alg: &DkAlgebra, weight: usize, min: Letter) -> Vec<PBWMonomial> {
    if weight == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for w in min.0.max(1)..=weight {
        let start = if w == min.0 { min.1 } else { 0 };
        for k in start..alg.dim(w) {
            for mut rest in monomials_from(alg, weight - w, (w, k)) {
                rest.insert(0, (w, k));
                out.push(rest);
            }
        }
    }
    out
}

pub fn pbw_basis(n: usize, weight: usize) -> Vec<PBWMonomial> {
    monomials_from(&algebra(n), weight, (1, 0))
}

fn strict_from(alg: &DkAlgebra, m: usize, weight: usize, min: Letter) -> Vec<CEChain> {
    if m == 0 {
        return if weight == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for w in min.0.max(1)..=weight {
        let start = if w == min.0 { min.1 } else { 0 };
        for k in start..alg.dim(w) {
            for mut rest in strict_from(alg, m - 1, weight - w, (w, k + 1)) {
                rest.insert(0, (w, k));
                out.push(rest);
            }
        }
    }
    out
}

/// Basis of Λ^m g(n) in the given weight.
pub fn ce_basis(n: usize, m: usize, weight: usize) -> Vec<CEChain> {
    strict_from(&algebra(n), m, weight, (1, 0))
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Basis of (U/k)^{⊗l} in the given weight.
pub fn bar_basis(n: usize, l: usize, weight: usize) -> Vec<BarWord> {
    let mut out = Vec::new();
    for comp in compositions(weight, l) {
        let mut words: Vec<BarWord> = vec![Vec::new()];
        for &w in &comp {
            let monos = pbw_basis(n, w);
            words = words
                .into_iter()
                .flat_map(|bw| {
                    monos.iter().map(move |m| {
                        let mut x = bw.clone();
                        x.push(m.clone());
                        x
                    })
                })
                .collect();
        }
        out.extend(words);
    }
    out
}

pub fn letter_name(n: usize, l: Letter) -> String {
    word_bracket_string(n, &algebra(n).representatives(l.0)[l.1])
}

pub fn monomial_name(n: usize, m: &[Letter]) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter().map(|&l| letter_name(n, l)).collect::<Vec<_>>().join("·")
}

pub fn bar_word_name(n: usize, w: &BarWord) -> String {
    if w.is_empty() {
        return "[]".into();
    }
    w.iter().map(|m| monomial_name(n, m)).collect::<Vec<_>>().join("|")
}

pub fn ce_chain_name(n: usize, c: &CEChain) -> String {
    if c.is_empty() {
        return "1".into();
    }
    c.iter().map(|&l| letter_name(n, l)).collect::<Vec<_>>().join("∧")
}

/// A linear combination of bar words over g(n).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BarElement {
    pub points: usize,
    pub terms: BTreeMap<BarWord, Rational>,
}

impl BarElement {
    pub fn zero(points: usize) -> Self {
        BarElement { points, terms: BTreeMap::new() }
    }

    pub fn word(points: usize, w: BarWord) -> Self {
        let mut e = Self::zero(points);
        e.terms.insert(w, Rational::one());
        e
    }

    /// The unit: empty word in degree 0.
    pub fn unit(points: usize) -> Self {
        Self::word(points, Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &BarElement) {
        assert_eq!(self.points, other.points);
        for (w, x) in &other.terms {
            add_term(&mut self.terms, w.clone(), &(c * x));
        }
    }

    pub fn add(&self, other: &BarElement) -> BarElement {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), other);
        out
    }

    pub fn sub(&self, other: &BarElement) -> BarElement {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), other);
        out
    }

    pub fn scaled(&self, c: &Rational) -> BarElement {
        let mut out = Self::zero(self.points);
        out.add_scaled(c, self);
        out
    }

    /// Coordinates against a basis list.
    pub fn coordinates(&self, basis: &[BarWord]) -> SparseVec {
        let idx: HashMap<&BarWord, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
        self.terms.iter().map(|(w, c)| (*idx.get(w).expect("word outside basis"), c.clone())).collect()
    }

    /// Homogeneous components by (degree, weight).
    pub fn components(&self) -> BTreeMap<(i32, usize), BarElement> {
        let mut out: BTreeMap<(i32, usize), BarElement> = BTreeMap::new();
        for (w, c) in &self.terms {
            let key = (-(w.len() as i32), w.iter().flatten().map(|l| l.0).sum());
            add_term(&mut out.entry(key).or_insert_with(|| BarElement::zero(self.points)).terms, w.clone(), c);
        }
        out
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("{}·({})", format_rational(c), bar_word_name(self.points, w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// d(a_1|…|a_l) = Σ (−1)^{i−1} (…|a_i a_{i+1}|…)
pub fn bar_differential(x: &BarElement) -> BarElement {
    let env = envelope(x.points);
    let mut out = BarElement::zero(x.points);
    for (w, c) in &x.terms {
        for i in 0..w.len().saturating_sub(1) {
            let sign = if i % 2 == 0 { c.clone() } else { -c.clone() };
            for (m, e) in env.mul(&w[i], &w[i + 1]) {
                let mut nw = w[..i].to_vec();
                nw.push(m);
                nw.extend_from_slice(&w[i + 2..]);
                add_term(&mut out.terms, nw, &(&sign * &e));
            }
        }
    }
    out
}

/// A linear combination of wedge monomials.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CEElement {
    pub points: usize,
    pub terms: BTreeMap<CEChain, Rational>,
}

impl CEElement {
    pub fn zero(points: usize) -> Self {
        CEElement { points, terms: BTreeMap::new() }
    }

    /// x_1 ∧ … ∧ x_m for arbitrary letters, normalized with sign.
    pub fn wedge(points: usize, letters: &[Letter]) -> Self {
        let mut e = Self::zero(points);
        if let Some((c, s)) = sort_wedge(letters) {
            e.terms.insert(c, Rational::from_integer(s.into()));
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &CEElement) {
        for (w, x) in &other.terms {
            add_term(&mut self.terms, w.clone(), &(c * x));
        }
    }

    pub fn coordinates(&self, basis: &[CEChain]) -> SparseVec {
        let idx: HashMap<&CEChain, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
        self.terms.iter().map(|(w, c)| (*idx.get(w).expect("chain outside basis"), c.clone())).collect()
    }
}

fn sort_wedge(letters: &[Letter]) -> Option<(CEChain, i64)> {
    let mut v = letters.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// ∂(x_1∧…∧x_m) = Σ_{i<j} (−1)^{i+j} [x_i,x_j] ∧ x_1 … x̂_i … x̂_j … x_m (1-based i, j)
pub fn ce_differential(x: &CEElement) -> CEElement {
    let env = envelope(x.points);
    let mut out = CEElement::zero(x.points);
    for (ch, c) in &x.terms {
        let m = ch.len();
        for i in 0..m {
            for j in i + 1..m {
                let sign = if (i + j) % 2 == 0 { c.clone() } else { -c.clone() };
                let rest: Vec<Letter> = (0..m).filter(|&k| k != i && k != j).map(|k| ch[k]).collect();
                for (l, e) in env.bracket_letters(ch[i], ch[j]) {
                    let mut w = vec![l];
                    w.extend_from_slice(&rest);
                    if let Some((s, sg)) = sort_wedge(&w) {
                        add_term(&mut out.terms, s, &(&sign * &e * Rational::from_integer(sg.into())));
                    }
                }
            }
        }
    }
    out
}

/// x_1∧…∧x_m ↦ (−1)^{m−1} Σ_σ sgn(σ) x_σ(1)|…|x_σ(m), each x a one-letter monomial.
pub fn antisymmetrize(x: &CEElement) -> BarElement {
    let mut out = BarElement::zero(x.points);
    for (ch, c) in &x.terms {
        let m = ch.len();
        let eps = if m == 0 || m % 2 == 1 { c.clone() } else { -c.clone() };
        for p in permutations(&(0..m).collect::<Vec<_>>()) {
            let w: BarWord = p.iter().map(|&k| vec![ch[k]]).collect();
            add_term(&mut out.terms, w, &(&eps * Rational::from_integer(perm_sign(&p).into())));
        }
    }
    out
}

/// Cells keyed by (degree, weight) with basis labels; d goes from (deg, w) to (deg + 1, w).
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub name: String,
    pub points: usize,
    pub cells: BTreeMap<(i32, usize), Vec<String>>,
    pub differentials: BTreeMap<(i32, usize), SparseMatrix>,
}

#[derive(Serialize)]
struct CellJson {
    degree: i32,
    weight: usize,
    dimension: usize,
    basis: Vec<String>,
}

#[derive(Serialize)]
struct DiffJson {
    degree: i32,
    weight: usize,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, String)>,
}

#[derive(Serialize)]
struct ComplexJson {
    complex: String,
    points: usize,
    cells: Vec<CellJson>,
    differentials: Vec<DiffJson>,
}

impl ChainComplex {
    pub fn dim(&self, degree: i32, weight: usize) -> usize {
        self.cells.get(&(degree, weight)).map_or(0, |c| c.len())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cells = self
            .cells
            .iter()
            .map(|(&(degree, weight), b)| CellJson { degree, weight, dimension: b.len(), basis: b.clone() })
            .collect();
        let differentials = self
            .differentials
            .iter()
            .map(|(&(degree, weight), m)| DiffJson {
                degree,
                weight,
                rows: m.nrows(),
                cols: m.ncols(),
                entries: m.entries().into_iter().map(|(r, c, x)| (r, c, format_rational(&x))).collect(),
            })
            .collect();
        serde_json::to_value(ComplexJson { complex: self.name.clone(), points: self.points, cells, differentials }).unwrap()
    }

    /// Euler characteristic Σ (−1)^deg dim at one weight.
    pub fn euler_characteristic(&self, weight: usize) -> i64 {
        self.cells
            .iter()
            .filter(|((_, w), _)| *w == weight)
            .map(|((d, _), b)| if d % 2 == 0 { b.len() as i64 } else { -(b.len() as i64) })
            .sum()
    }
}

fn differential_matrix<T>(src: &[T], rows: usize, apply: impl Fn(&T) -> SparseVec) -> SparseMatrix {
    let cols: Vec<SparseVec> = src.iter().map(apply).collect();
    SparseMatrix::from_columns(rows, &cols)
}

/// Reduced bar complex of U(g(n)) in one weight, degrees max(min_degree, −weight)..0.
pub fn bar_complex(n: usize, weight: usize, min_degree: i32) -> ChainComplex {
    let lowest = (-(weight as i32)).max(min_degree);
    let bases: Vec<Vec<BarWord>> = (0..=(-lowest) as usize).map(|l| bar_basis(n, l, weight)).collect();
    let mut cx = ChainComplex { name: "bar".into(), points: n, cells: BTreeMap::new(), differentials: BTreeMap::new() };
    for (l, b) in bases.iter().enumerate() {
        cx.cells.insert((-(l as i32), weight), b.iter().map(|w| bar_word_name(n, w)).collect());
        if l >= 1 {
            let m = differential_matrix(b, bases[l - 1].len(), |w| {
                bar_differential(&BarElement::word(n, w.clone())).coordinates(&bases[l - 1])
            });
            cx.differentials.insert((-(l as i32), weight), m);
        }
    }
    cx
}

/// Chevalley-Eilenberg chains of g(n) in one weight.
pub fn ce_complex(n: usize, weight: usize) -> ChainComplex {
    let bases: Vec<Vec<CEChain>> = (0..=weight).map(|m| ce_basis(n, m, weight)).collect();
    let mut cx = ChainComplex { name: "ce".into(), points: n, cells: BTreeMap::new(), differentials: BTreeMap::new() };
    for (m, b) in bases.iter().enumerate() {
        cx.cells.insert((-(m as i32), weight), b.iter().map(|c| ce_chain_name(n, c)).collect());
        if m >= 1 {
            let mat = differential_matrix(b, bases[m - 1].len(), |c| {
                let mut x = CEElement::zero(n);
                x.terms.insert(c.clone(), Rational::one());
                ce_differential(&x).coordinates(&bases[m - 1])
            });
            cx.differentials.insert((-(m as i32), weight), mat);
        }
    }
    cx
}

/// Matrix of antisymmetrize from Λ^m to (U/k)^{⊗m} in one weight.
pub fn antisymmetrize_matrix(n: usize, m: usize, weight: usize) -> SparseMatrix {
    let src = ce_basis(n, m, weight);
    let dst = bar_basis(n, m, weight);
    differential_matrix(&src, dst.len(), |c| {
        let mut x = CEElement::zero(n);
        x.terms.insert(c.clone(), Rational::one());
        antisymmetrize(&x).coordinates(&dst)
    })
}

/// Checks d∘d = 0 on every composable pair.
pub fn check_d_squared(c: &ChainComplex) -> Result<(), ComplexError> {
    for (&(deg, w), d) in &c.differentials {
        if let Some(d2) = c.differentials.get(&(deg + 1, w)) {
            if !d2.mul(d).is_zero() {
                return Err(ComplexError::NotAComplex { degree: deg, weight: w });
            }
        }
    }
    Ok(())
}

/// dim ker(d out of the cell) − rank(d into the cell), for every cell.
pub fn homology_ranks(c: &ChainComplex) -> Result<BTreeMap<(i32, usize), usize>, ComplexError> {
    check_d_squared(c)?;
    let mut out = BTreeMap::new();
    for (&(deg, w), b) in &c.cells {
        let out_rank = c.differentials.get(&(deg, w)).map_or(0, rank);
        let in_rank = c.differentials.get(&(deg - 1, w)).map_or(0, rank);
        out.insert((deg, w), b.len() - out_rank - in_rank);
    }
    Ok(out)
}

/// Whether a homogeneous bar element is d of something in bar_complex.
pub fn is_bar_boundary(x: &BarElement) -> bool {
    x.components().into_iter().all(|((deg, w), comp)| {
        let l = (-deg) as usize;
        let target = bar_basis(x.points, l, w);
        let v = comp.coordinates(&target);
        let src = bar_basis(x.points, l + 1, w);
        let d = differential_matrix(&src, target.len(), |s| {
            bar_differential(&BarElement::word(x.points, s.clone())).coordinates(&target)
        });
        let r = rank(&d);
        rank(&d.hstack(&SparseMatrix::from_columns(target.len(), &[v]))) == r
    })
}

/// Applies the algebra map U(g(src)) -> U(g(dst)) induced by a Lie homomorphism factor by factor.
pub fn map_bar(h: &LieHom, x: &BarElement) -> BarElement {
    let env = envelope(h.dst);
    let mut out = BarElement::zero(h.dst);
    for (w, c) in &x.terms {
        let mut acc: Vec<(BarWord, Rational)> = vec![(Vec::new(), c.clone())];
        for m in w {
            let img = env.map_monomial(h, m);
            acc = acc
                .into_iter()
                .flat_map(|(bw, a)| {
                    img.iter().map(move |(mm, e)| {
                        let mut nw = bw.clone();
                        nw.push(mm.clone());
                        (nw, &a * e)
                    })
                })
                .collect();
        }
        for (bw, e) in acc {
            add_term(&mut out.terms, bw, &e);
        }
    }
    out
}

/// Λ(h): the map on Chevalley–Eilenberg chains induced by a Lie homomorphism.
pub fn map_ce(h: &LieHom, x: &CEElement) -> CEElement {
    let mut out = CEElement::zero(h.dst);
    for (ch, c) in &x.terms {
        let mut acc: Vec<(Vec<Letter>, Rational)> = vec![(Vec::new(), c.clone())];
        for &(w, k) in ch {
            let img = h.basis_image(w, k);
            acc = acc
                .into_iter()
                .flat_map(|(ls, a)| {
                    img.iter().map(move |(i, e)| {
                        let mut nl = ls.clone();
                        nl.push((w, i));
                        (nl, &a * e)
                    })
                })
                .collect();
        }
        for (ls, e) in acc {
            if let Some((s, sg)) = sort_wedge(&ls) {
                add_term(&mut out.terms, s, &(e * Rational::from_integer(sg.into())));
            }
        }
    }
    out
}

/// Shuffle product: Σ over interleavings, signed by the shuffle permutation.
pub fn shuffle_product(a: &BarElement, b: &BarElement) -> BarElement {
    assert_eq!(a.points, b.points);
    let mut out = BarElement::zero(a.points);
    for (x, c) in &a.terms {
        for (y, d) in &b.terms {
            let (p, q) = (x.len(), y.len());
            let left: Vec<usize> = (0..p).collect();
            let right: Vec<usize> = (p..p + q).collect();
            for sh in crate::freelie::interleavings(&left, &right) {
                let w: BarWord = sh.iter().map(|&k| if k < p { x[k].clone() } else { y[k - p].clone() }).collect();
                let s = Rational::from_integer(perm_sign(&sh).into());
                add_term(&mut out.terms, w, &(c * d * s));
            }
        }
    }
    out
}

/// ∘_x on bar complexes: p^* on a, i_* on b, merged by the shuffle product.
/// Sets are canonical [m] and [k]; x is 1-based.
pub fn bar_compose(m: usize, x: usize, k: usize, a: &BarElement, b: &BarElement) -> Result<BarElement, ComplexError> {
    if x == 0 || x > m {
        return Err(dk::DkError::UnknownLabel(x as u32).into());
    }
    let (p, i) = dk::insertion_maps(m, x - 1, k);
    let wa = max_weight(a).max(1);
    let wb = max_weight(b).max(1);
    let pa = map_bar(&LieHom::pullback(&p, wa), a);
    let ib = map_bar(&LieHom::push(&i, wb), b);
    Ok(shuffle_product(&pa, &ib))
}

fn max_weight(x: &BarElement) -> usize {
    x.terms.keys().flat_map(|w| w.iter().flatten().map(|l| l.0)).max().unwrap_or(0)
}

/// Relabels along a bijection σ of [n] (point k goes to σ(k)).
pub fn relabel_bar(sigma: &[usize], x: &BarElement) -> BarElement {
    let inv = crate::freelie::perm_inverse(sigma);
    // pulling back along σ^{-1} sends t_ij to t_σ(i)σ(j)
    let f = SetMap::total(sigma.len(), &inv);
    map_bar(&LieHom::pullback(&f, max_weight(x).max(1)), x)
}

/// Whether antisymmetrize induces an injection H(C(g(n))) -> H(B(U(g(n)))) in the given weight.
pub fn antisymmetrize_injective_on_homology(n: usize, weight: usize) -> bool {
    let ce = ce_complex(n, weight);
    let bar = bar_complex(n, weight, -(weight as i32) - 1);
    (1..=weight).all(|m| {
        let deg = -(m as i32);
        let cells = ce.dim(deg, weight);
        let z = match ce.differentials.get(&(deg, weight)) {
            Some(d) => kernel_basis(d),
            None => (0..cells).map(SparseVec::unit).collect(),
        };
        let b_in = ce.differentials.get(&(deg - 1, weight)).map_or(0, rank);
        let h = z.len() - b_in;
        let a = antisymmetrize_matrix(n, m, weight);
        let rows = bar.dim(deg, weight);
        let az = SparseMatrix::from_columns(rows, &z.iter().map(|v| a.mul_vec(v)).collect::<Vec<_>>());
        let bb = bar.differentials.get(&(deg - 1, weight)).cloned().unwrap_or_else(|| SparseMatrix::zeros(rows, 0));
        rank(&bb.hstack(&az)) - rank(&bb) == h
    })
}

/// c: the unit bar word over [2], image of the product generator.
pub fn gerstenhaber_c() -> BarElement {
    BarElement::unit(2)
}

/// t: the one-factor word t12 over [2], image of the bracket generator.
pub fn gerstenhaber_t() -> BarElement {
    BarElement::word(2, vec![vec![(1, 0)]])
}

/// Associativity, Jacobi and Leibniz defects of (c, t) under bar_compose, over [3].
pub fn gerstenhaber_defects() -> Vec<(&'static str, BarElement)> {
    let (c, t) = (gerstenhaber_c(), gerstenhaber_t());
    let comp = |a: &BarElement, x: usize, b: &BarElement| bar_compose(2, x, 2, a, b).unwrap();
    let assoc = comp(&c, 1, &c).sub(&comp(&c, 2, &c));
    // {x1,{x2,x3}} and its cyclic relabelings
    let tt = comp(&t, 2, &t);
    let jacobi = tt.add(&relabel_bar(&[1, 2, 0], &tt)).add(&relabel_bar(&[2, 0, 1], &tt));
    // {x1, x2 x3} − {x1,x2} x3 − x2 {x1,x3}
    let ct = comp(&c, 1, &t);
    let leibniz = comp(&t, 2, &c).sub(&relabel_bar(&[2, 0, 1], &ct)).sub(&relabel_bar(&[1, 0, 2], &ct));
    vec![("associativity", assoc), ("jacobi", jacobi), ("leibniz", leibniz)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: usize, i: usize, j: usize) -> Letter {
        (1, dk::generator_index(n, i - 1, j - 1))
    }

    #[test]
    fn pbw_examples() {
        assert_eq!(pbw_basis(2, 0), vec![Vec::<Letter>::new()]);
        assert_eq!(pbw_basis(2, 2), vec![vec![(1, 0), (1, 0)]]);
        assert_eq!(pbw_basis(3, 2).len(), 7);
    }

    #[test]
    fn straightening() {
        let env = envelope(3);
        let (a, b) = (t(3, 1, 2), t(3, 2, 3));
        // ba = ab + [b, a]
        let p = env.mul(&[b], &[a]);
        let mut expect = Poly::new();
        expect.insert(vec![a, b], Rational::one());
        for (l, c) in env.bracket_letters(b, a) {
            expect.insert(vec![l], c);
        }
        assert_eq!(p, expect);
        // associativity of the product
        let x = vec![t(3, 2, 3), t(3, 2, 3)];
        let y = vec![t(3, 1, 3)];
        let z = vec![t(3, 1, 2)];
        let l = env.mul_poly(&env.normal_form(&[x.clone(), y.clone()].concat()), &env.normal_form(&z));
        let r = env.mul_poly(&env.normal_form(&x), &env.normal_form(&[y, z].concat()));
        assert_eq!(l, r);
    }

    #[test]
    fn bar_examples() {
        let c = bar_complex(2, 1, -3);
        assert_eq!(c.dim(-1, 1), 1);
        assert_eq!(c.dim(0, 1), 0);
        let c = bar_complex(2, 2, -2);
        assert_eq!(c.dim(-2, 2), 1);
        assert_eq!(c.dim(-1, 2), 1);
        assert_eq!(c.differentials[&(-2, 2)].get(0, 0), Rational::one());
        assert!(homology_ranks(&c).unwrap().values().all(|&r| r == 0));
        let c = bar_complex(3, 0, -2);
        assert_eq!(c.cells.len(), 1);
        assert_eq!(homology_ranks(&c).unwrap()[&(0, 0)], 1);
    }

    #[test]
    fn ce_examples() {
        let c = ce_complex(2, 1);
        assert_eq!(homology_ranks(&c).unwrap()[&(-1, 1)], 1);
        let c = ce_complex(2, 2);
        assert!(c.cells.values().all(|b| b.is_empty()));
        let c = ce_complex(3, 2);
        assert_eq!(c.dim(-2, 2), 3);
        assert_eq!(c.dim(-1, 2), 1);
        assert_eq!(rank(&c.differentials[&(-2, 2)]), 1);
        assert_eq!(homology_ranks(&ce_complex(4, 0)).unwrap()[&(0, 0)], 1);
    }

    #[test]
    fn d_squared_zero() {
        for n in 2..=4 {
            for w in 0..=3 {
                check_d_squared(&bar_complex(n, w, -4)).unwrap();
                check_d_squared(&ce_complex(n, w)).unwrap();
            }
        }
    }

    #[test]
    fn d_squared_violation_reported() {
        let mut c = ce_complex(3, 2);
        c.differentials.insert((-1, 2), SparseMatrix::from_dense(&[vec![1]]));
        c.cells.insert((0, 2), vec!["x".into()]);
        assert!(matches!(homology_ranks(&c), Err(ComplexError::NotAComplex { degree: -2, weight: 2 })));
    }

    /// Coefficient of x^w in Π_v (1 − x^v)^{dim g_v}.
    fn euler_oracle(n: usize, w: usize) -> i64 {
        let mut series = vec![0i64; w + 1];
        series[0] = 1;
        for v in 1..=w {
            for _ in 0..algebra(n).dim(v) {
                for k in (v..=w).rev() {
                    series[k] -= series[k - v];
                }
            }
        }
        series[w]
    }

    #[test]
    fn euler_characteristics() {
        for n in 2..=4 {
            for w in 0..=4 {
                let e = euler_oracle(n, w);
                assert_eq!(bar_complex(n, w, -(w as i32)).euler_characteristic(w), e, "bar n={n} w={w}");
                assert_eq!(ce_complex(n, w).euler_characteristic(w), e, "ce n={n} w={w}");
            }
        }
    }

    #[test]
    fn antisymmetrize_examples() {
        let x = t(3, 1, 2);
        let y = t(3, 2, 3);
        let a = antisymmetrize(&CEElement::wedge(3, &[x]));
        assert_eq!(a, BarElement::word(3, vec![vec![x]]));
        let a = antisymmetrize(&CEElement::wedge(3, &[x, y]));
        let expect = BarElement::word(3, vec![vec![y], vec![x]]).sub(&BarElement::word(3, vec![vec![x], vec![y]]));
        assert_eq!(a, expect);
    }

    #[test]
    fn antisymmetrize_is_chain_map() {
        for n in 2..=3 {
            for w in 1..=3 {
                for m in 1..=w {
                    for c in ce_basis(n, m, w) {
                        let mut x = CEElement::zero(n);
                        x.terms.insert(c, Rational::one());
                        assert_eq!(bar_differential(&antisymmetrize(&x)), antisymmetrize(&ce_differential(&x)));
                    }
                }
            }
        }
    }

    #[test]
    fn shuffle_is_derivation() {
        // d(a * b) = d(a) * b + (−1)^{deg a} a * d(b) for factors from commuting images
        let (p, i) = dk::insertion_maps(2, 1, 2);
        let a = BarElement::word(2, vec![vec![(1, 0)], vec![(1, 0)], vec![(1, 0), (1, 0)]]);
        let b = BarElement::word(2, vec![vec![(1, 0)], vec![(1, 0)]]);
        let pa = map_bar(&LieHom::pullback(&p, 2), &a);
        let ib = map_bar(&LieHom::push(&i, 1), &b);
        let lhs = bar_differential(&shuffle_product(&pa, &ib));
        let rhs = shuffle_product(&bar_differential(&pa), &ib).sub(&shuffle_product(&pa, &bar_differential(&ib)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn bar_compose_unit_and_cycles() {
        let t12 = BarElement::word(2, vec![vec![(1, 0)]]);
        let c = BarElement::unit(2);
        assert!(bar_differential(&c).is_zero());
        assert!(bar_differential(&t12).is_zero());
        let unit = BarElement::unit(1);
        assert_eq!(bar_compose(1, 1, 2, &unit, &t12).unwrap(), t12);
        assert_eq!(bar_compose(2, 1, 1, &t12, &unit).unwrap(), t12);
        assert!(bar_compose(2, 3, 1, &t12, &unit).is_err());
    }

    #[test]
    fn injective_on_homology() {
        for n in 2..=3 {
            for w in 1..=3 {
                assert!(antisymmetrize_injective_on_homology(n, w), "n={n} w={w}");
            }
        }
    }

    #[test]
    fn gerstenhaber_generators() {
        assert!(bar_differential(&gerstenhaber_c()).is_zero());
        assert!(bar_differential(&gerstenhaber_t()).is_zero());
        let (c, tb) = (gerstenhaber_c(), gerstenhaber_t());
        let t12 = BarElement::word(3, vec![vec![t(3, 1, 2)]]);
        let t13 = BarElement::word(3, vec![vec![t(3, 1, 3)]]);
        let t23 = BarElement::word(3, vec![vec![t(3, 2, 3)]]);
        assert_eq!(bar_compose(2, 2, 2, &tb, &c).unwrap(), t12.add(&t13));
        assert_eq!(bar_compose(2, 1, 2, &c, &tb).unwrap(), t23);
        assert_eq!(bar_compose(2, 1, 2, &c, &c).unwrap(), BarElement::unit(3));
        for (name, d) in gerstenhaber_defects() {
            println!("{name}: {}", d.display());
            assert!(is_bar_boundary(&d), "{name}");
        }
        assert!(!is_bar_boundary(&t23));
        assert!(is_bar_boundary(&bar_differential(&BarElement::word(3, vec![vec![t(3, 1, 2)], vec![t(3, 2, 3)]]))));
    }
}
