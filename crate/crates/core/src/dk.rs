//! Drinfeld-Kohno Lie algebras g(n).
//!
//! g(n) is generated by t_ij (i < j) subject to [t_ij, t_kl] = 0 for disjoint
//! pairs and [t_ij, t_ik + t_jk] = 0. Graded pieces are built one weight at a
//! time: g_w is presented as span{[t_a, e_j] : e_j basis of g_{w-1}} modulo
//! antisymmetry, Jacobi and (in weight 2) the relators. The resulting basis is
//! then rewritten in terms of the lexicographically smallest independent
//! Lyndon words.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactla::{invert_dense, Echelon, Rational, SparseMatrix, SparseVec};
use crate::freelie::{lyndon_basis, LieElement, LyndonWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DkError {
    #[error("map is not injective")]
    NotInjective,
    #[error("map is not total")]
    NotTotal,
    #[error("label {0} not in set")]
    UnknownLabel(u32),
    #[error("duplicate label {0}")]
    DuplicateLabel(u32),
    #[error("weight mismatch: {0} vs {1}")]
    WeightMismatch(usize, usize),
    #[error("claim hypotheses unmet: {0}")]
    HypothesisUnmet(String),
}

pub fn num_generators(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Index of t_ij (0-based points, i != j) in the lexicographic generator order.
pub fn generator_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    assert!(i != j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn generator_pair(n: usize, idx: usize) -> (usize, usize) {
    let mut k = idx;
    for i in 0..n {
        let row = n - i - 1;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
    }
    panic!("generator index out of range")
}

pub fn generator_name(n: usize, idx: usize) -> String {
    let (i, j) = generator_pair(n, idx);
    if n <= 9 {
        format!("t{}{}", i + 1, j + 1)
    } else {
        format!("t{}_{}", i + 1, j + 1)
    }
}

/// Standard bracketing of a word over the generators, e.g. "[t12,[t12,t13]]".
pub fn word_bracket_string(n: usize, w: &LyndonWord) -> String {
    match w.standard_factorization() {
        None => generator_name(n, w.0[0] as usize),
        Some((u, v)) => format!("[{},{}]", word_bracket_string(n, &u), word_bracket_string(n, &v)),
    }
}

/// The defining relators in weight 2, as elements of the free Lie algebra on the t_ij.
pub fn relators(n: usize) -> Vec<LieElement> {
    let g = |i: usize, j: usize| LieElement::generator(generator_index(n, i, j) as u8);
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                for l in k + 1..n {
                    if (i, j) < (k, l) && k != i && k != j && l != i && l != j {
                        out.push(crate::freelie::bracket(&g(i, j), &g(k, l)));
                    }
                }
            }
            for k in 0..n {
                if k != i && k != j {
                    out.push(crate::freelie::bracket(&g(i, j), &g(i, k).add(&g(j, k))));
                }
            }
        }
    }
    out
}

/// One graded piece g(n)_w with its structure constants against lower weights.
pub(crate) struct Level {
    pub dim: usize,
    pub reps: Vec<LyndonWord>,
    /// For weight >= 2: basis element = [u, v] with (weight u, coords u, weight v, coords v).
    pub factors: Vec<Option<(usize, SparseVec, usize, SparseVec)>>,
    /// brackets[p][i][j] = [e^p_i, e^{w-p}_j] in this level's basis.
    pub brackets: Vec<Vec<Vec<SparseVec>>>,
}

pub struct DkAlgebra {
    n: usize,
    levels: RwLock<Vec<Arc<Level>>>,
    projections: Mutex<HashMap<LyndonWord, SparseVec>>,
}

fn add_scaled_into(acc: &mut SparseVec, c: &Rational, v: &SparseVec) {
    if !c.is_zero() {
        acc.add_scaled(c, v);
    }
}

/// [x, y] for x of weight p, y of weight q, both in final coordinates.
fn bracket_in(levels: &[Arc<Level>], p: usize, x: &SparseVec, q: usize, y: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    if p + q > levels.len() {
        panic!("weight {} not computed", p + q);
    }
    let table = &levels[p + q - 1].brackets[p];
    for (i, a) in x.iter() {
        for (j, b) in y.iter() {
            add_scaled_into(&mut out, &(a * b), &table[i][j]);
        }
    }
    out
}

fn project_word_in(levels: &[Arc<Level>], memo: &mut HashMap<LyndonWord, SparseVec>, w: &LyndonWord) -> SparseVec {
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let v = match w.standard_factorization() {
        None => SparseVec::unit(w.0[0] as usize),
        Some((u, v)) => {
            let pu = project_word_in(levels, memo, &u);
            let pv = project_word_in(levels, memo, &v);
            bracket_in(levels, u.len(), &pu, v.len(), &pv)
        }
    };
    memo.insert(w.clone(), v.clone());
    v
}

/// Builder for one new weight given all lower levels.
struct WeightBuilder<'a> {
    levels: &'a [Arc<Level>],
    w: usize,
    ngen: usize,
    prev_dim: usize,
    memo: HashMap<(usize, usize, usize), SparseVec>,
}

impl<'a> WeightBuilder<'a> {
    fn dim(&self, p: usize) -> usize {
        self.levels[p - 1].dim
    }

    /// Tentative [e^p_i, e^{w-p}_j] as a combination of symbols [t_a, e^{w-1}_k].
    fn br(&mut self, p: usize, i: usize, j: usize) -> SparseVec {
        if let Some(v) = self.memo.get(&(p, i, j)) {
            return v.clone();
        }
        let q = self.w - p;
        let out = if p == 1 {
            SparseVec::unit(i * self.prev_dim + j)
        } else {
            let (p1, u, p2, v) = self.levels[p - 1].factors[i].clone().expect("factorization");
            let y = SparseVec::unit(j);
            // [[u,v],y] = [u,[v,y]] - [v,[u,y]]
            let vy = bracket_in(self.levels, p2, &v, q, &y);
            let uy = bracket_in(self.levels, p1, &u, q, &y);
            let mut out = self.br_vec(p1, &u, &vy);
            let second = self.br_vec(p2, &v, &uy);
            out.add_scaled(&-Rational::one(), &second);
            out
        };
        self.memo.insert((p, i, j), out.clone());
        out
    }

    fn br_vec(&mut self, p: usize, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let t = self.br(p, i, j);
                add_scaled_into(&mut out, &(a * b), &t);
            }
        }
        out
    }

    fn relations(&mut self, n: usize) -> Echelon {
        let w = self.w;
        let mut ech = Echelon::new();
        if w == 2 {
            for rel in relators(n) {
                let mut row = SparseVec::new();
                for (word, c) in &rel.coeffs {
                    let (u, v) = word.standard_factorization().unwrap();
                    row.add_entry(u.0[0] as usize * self.ngen + v.0[0] as usize, c);
                }
                ech.insert(&row);
            }
        }
        for p in 1..=w / 2 {
            let q = w - p;
            for i in 0..self.dim(p) {
                for j in 0..self.dim(q) {
                    if p == q && j < i {
                        continue;
                    }
                    let mut row = self.br(p, i, j);
                    let other = self.br(q, j, i);
                    row.add_scaled(&Rational::one(), &other);
                    ech.insert(&row);
                }
            }
        }
        for p in 1..=w / 3 {
            for q in p..=(w - p) / 2 {
                let r = w - p - q;
                if r < q {
                    continue;
                }
                for i in 0..self.dim(p) {
                    for j in 0..self.dim(q) {
                        if p == q && j <= i {
                            continue;
                        }
                        for k in 0..self.dim(r) {
                            if q == r && k <= j {
                                continue;
                            }
                            let (x, y, z) = (SparseVec::unit(i), SparseVec::unit(j), SparseVec::unit(k));
                            let yz = bracket_in(self.levels, q, &y, r, &z);
                            let zx = bracket_in(self.levels, r, &z, p, &x);
                            let xy = bracket_in(self.levels, p, &x, q, &y);
                            let mut row = self.br_vec(p, &x, &yz);
                            let t = self.br_vec(q, &y, &zx);
                            row.add_scaled(&Rational::one(), &t);
                            let t = self.br_vec(r, &z, &xy);
                            row.add_scaled(&Rational::one(), &t);
                            ech.insert(&row);
                        }
                    }
                }
            }
        }
        ech
    }
}

fn weight_one(n: usize) -> Level {
    let ngen = num_generators(n);
    Level {
        dim: ngen,
        reps: (0..ngen).map(|a| LyndonWord::letter(a as u8)).collect(),
        factors: vec![None; ngen],
        brackets: vec![Vec::new()],
    }
}

fn build_level(n: usize, levels: &[Arc<Level>], memo: &mut HashMap<LyndonWord, SparseVec>) -> Level {
    let w = levels.len() + 1;
    let ngen = num_generators(n);
    let prev_dim = levels[w - 2].dim;
    let mut b = WeightBuilder { levels, w, ngen, prev_dim, memo: HashMap::new() };
    let ech = b.relations(n);
    let nsym = ngen * prev_dim;
    let free_cols: Vec<usize> = (0..nsym).filter(|&c| !ech.is_pivot(c)).collect();
    let dim = free_cols.len();
    let col_pos: HashMap<usize, usize> = free_cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let to_quotient = |s: &SparseVec| -> SparseVec {
        ech.reduce(s).iter().map(|(c, x)| (col_pos[&c], x.clone())).collect()
    };

    // greedy Lyndon representatives in lexicographic order
    let mut reps = Vec::new();
    let mut factors = Vec::new();
    let mut cols: Vec<SparseVec> = Vec::new();
    let mut sel = Echelon::new();
    if dim > 0 {
        for word in lyndon_basis(ngen, w) {
            let (u, v) = word.standard_factorization().unwrap();
            let pu = project_word_in(levels, memo, &u);
            let pv = project_word_in(levels, memo, &v);
            let s = b.br_vec(u.len(), &pu, &pv);
            let qv = to_quotient(&s);
            if sel.insert(&qv) {
                reps.push(word);
                factors.push(Some((u.len(), pu, v.len(), pv)));
                cols.push(qv);
                if reps.len() == dim {
                    break;
                }
            }
        }
    }
    assert_eq!(reps.len(), dim, "Lyndon words must span g_w");
    let m: Vec<Vec<Rational>> = (0..dim)
        .map(|r| cols.iter().map(|c| c.get(r).cloned().unwrap_or_else(Rational::zero)).collect())
        .collect();
    let minv = SparseMatrix::from_rows(
        dim,
        invert_dense(&m).expect("representatives independent").iter().map(|r| SparseVec::from_dense(r)).collect(),
    );
    let finalize = |s: &SparseVec| minv.mul_vec(&to_quotient(s));

    let mut brackets: Vec<Vec<Vec<SparseVec>>> = vec![Vec::new(); w];
    for p in 1..=w / 2 {
        let q = w - p;
        let dp = levels[p - 1].dim;
        let dq = levels[q - 1].dim;
        let mut tab = vec![vec![SparseVec::new(); dq]; dp];
        for (i, row) in tab.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = finalize(&b.br(p, i, j));
            }
        }
        if p != q {
            let mut rev = vec![vec![SparseVec::new(); dp]; dq];
            for i in 0..dp {
                for j in 0..dq {
                    rev[j][i] = tab[i][j].scaled(&-Rational::one());
                }
            }
            brackets[q] = rev;
        }
        brackets[p] = tab;
    }
    for (k, word) in reps.iter().enumerate() {
        memo.insert(word.clone(), SparseVec::unit(k));
    }
    Level { dim, reps, factors, brackets }
}

impl DkAlgebra {
    fn new(n: usize) -> Self {
        DkAlgebra { n, levels: RwLock::new(Vec::new()), projections: Mutex::new(HashMap::new()) }
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn num_generators(&self) -> usize {
        num_generators(self.n)
    }

    /// All levels up to (at least) weight w.
    pub(crate) fn levels(&self, w: usize) -> Vec<Arc<Level>> {
        {
            let lv = self.levels.read().unwrap();
            if lv.len() >= w {
                return lv.clone();
            }
        }
        let mut lv = self.levels.write().unwrap();
        let mut memo = self.projections.lock().unwrap();
        while lv.len() < w {
            let level = if lv.is_empty() { weight_one(self.n) } else { build_level(self.n, &lv, &mut memo) };
            lv.push(Arc::new(level));
        }
        lv.clone()
    }

    pub(crate) fn level(&self, w: usize) -> Arc<Level> {
        self.levels(w)[w - 1].clone()
    }

    pub fn dim(&self, w: usize) -> usize {
        if w == 0 {
            return 0;
        }
        self.level(w).dim
    }

    pub fn representatives(&self, w: usize) -> Vec<LyndonWord> {
        self.level(w).reps.clone()
    }

    /// [x, y] in coordinates, x of weight p and y of weight q.
    pub fn bracket_coords(&self, p: usize, x: &SparseVec, q: usize, y: &SparseVec) -> SparseVec {
        let levels = self.levels(p + q);
        bracket_in(&levels, p, x, q, y)
    }

    /// Image of a free Lyndon word in g(n).
    pub fn project_word(&self, w: &LyndonWord) -> SparseVec {
        let levels = self.levels(w.len());
        let mut memo = self.projections.lock().unwrap();
        project_word_in(&levels, &mut memo, w)
    }

    /// Image of a free Lie element (over the t_ij) in g(n).
    pub fn project(&self, x: &LieElement) -> DkElement {
        let mut out = SparseVec::new();
        for (w, c) in &x.coeffs {
            out.add_scaled(c, &self.project_word(w));
        }
        DkElement::from_sparse(self.n, x.weight, &out, self.dim(x.weight))
    }

    /// Structure of basis element k of weight w as [u, v].
    pub fn factors(&self, w: usize, k: usize) -> Option<(usize, SparseVec, usize, SparseVec)> {
        self.level(w).factors[k].clone()
    }
}

/// Shared cache of algebras, keyed by number of points.
pub fn algebra(n: usize) -> Arc<DkAlgebra> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DkAlgebra>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut c = cache.lock().unwrap();
    c.entry(n).or_insert_with(|| Arc::new(DkAlgebra::new(n))).clone()
}

/// An element of g(n)_w in the representative basis.
#[derive(Clone, PartialEq, Eq)]
pub struct DkElement {
    pub points: usize,
    pub weight: usize,
    pub coords: Vec<Rational>,
}

impl DkElement {
    pub fn zero(points: usize, weight: usize) -> Self {
        let d = algebra(points).dim(weight);
        DkElement { points, weight, coords: vec![Rational::zero(); d] }
    }

    pub fn from_sparse(points: usize, weight: usize, v: &SparseVec, dim: usize) -> Self {
        DkElement { points, weight, coords: v.to_dense(dim) }
    }

    pub fn basis(points: usize, weight: usize, k: usize) -> Self {
        let d = algebra(points).dim(weight);
        Self::from_sparse(points, weight, &SparseVec::unit(k), d)
    }

    /// t_ij with 1-based points.
    pub fn t(points: usize, i: usize, j: usize) -> Self {
        Self::basis(points, 1, generator_index(points, i - 1, j - 1))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn to_sparse(&self) -> SparseVec {
        SparseVec::from_dense(&self.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &DkElement) -> DkElement {
        self.check_same(other);
        DkElement {
            points: self.points,
            weight: self.weight,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &DkElement) -> DkElement {
        self.add(&other.scaled(&-Rational::one()))
    }

    pub fn scaled(&self, c: &Rational) -> DkElement {
        DkElement { points: self.points, weight: self.weight, coords: self.coords.iter().map(|a| a * c).collect() }
    }

    fn check_same(&self, other: &DkElement) {
        assert_eq!((self.points, self.weight), (other.points, other.weight), "incompatible elements");
    }

    pub fn bracket(&self, other: &DkElement) -> DkElement {
        assert_eq!(self.points, other.points);
        let alg = algebra(self.points);
        let w = self.weight + other.weight;
        let v = alg.bracket_coords(self.weight, &self.to_sparse(), other.weight, &other.to_sparse());
        DkElement::from_sparse(self.points, w, &v, alg.dim(w))
    }
}

impl fmt::Display for DkElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reps = algebra(self.points).representatives(self.weight);
        let mut first = true;
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = crate::exactla::format_rational(c);
            let (neg, mag) = match s.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let word = word_bracket_string(self.points, &reps[k]);
            if mag == "1" {
                write!(f, "{word}")?;
            } else {
                write!(f, "{mag}·{word}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DkElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// D_x: multiplies each t_ij by x.
pub fn dilation(x: &Rational, a: &DkElement) -> DkElement {
    let mut c = Rational::one();
    for _ in 0..a.weight {
        c *= x;
    }
    a.scaled(&c)
}

/// A finite set of distinct labels; canonical form is 1..n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinSet {
    labels: Vec<u32>,
}

impl FinSet {
    pub fn new(labels: Vec<u32>) -> Result<Self, DkError> {
        let mut seen = std::collections::BTreeSet::new();
        for &l in &labels {
            if !seen.insert(l) {
                return Err(DkError::DuplicateLabel(l));
            }
        }
        Ok(FinSet { labels })
    }

    pub fn canonical(n: usize) -> Self {
        FinSet { labels: (1..=n as u32).collect() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn position(&self, label: u32) -> Result<usize, DkError> {
        self.labels.iter().position(|&l| l == label).ok_or(DkError::UnknownLabel(label))
    }
}

/// A possibly partial map between finite sets, stored by positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetMap {
    pub source: FinSet,
    pub target: FinSet,
    assignment: Vec<Option<usize>>,
}

impl SetMap {
    /// From (source label, target label) pairs; unlisted source labels are outside the domain.
    pub fn new(source: FinSet, target: FinSet, pairs: &[(u32, u32)]) -> Result<Self, DkError> {
        let mut assignment = vec![None; source.len()];
        for &(a, b) in pairs {
            assignment[source.position(a)?] = Some(target.position(b)?);
        }
        Ok(SetMap { source, target, assignment })
    }

    /// Canonical sets [n] -> [m] from 0-based positions.
    pub fn from_positions(m: usize, assignment: Vec<Option<usize>>) -> Self {
        assert!(assignment.iter().flatten().all(|&t| t < m));
        SetMap { source: FinSet::canonical(assignment.len()), target: FinSet::canonical(m), assignment }
    }

    pub fn total(m: usize, images: &[usize]) -> Self {
        Self::from_positions(m, images.iter().map(|&t| Some(t)).collect())
    }

    pub fn apply(&self, pos: usize) -> Option<usize> {
        self.assignment[pos]
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i].is_some()).collect()
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(|a| a.is_some())
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        for t in self.assignment.iter().flatten() {
            if seen[*t] {
                return false;
            }
            seen[*t] = true;
        }
        true
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        for t in self.assignment.iter().flatten() {
            seen[*t] = true;
        }
        seen.iter().all(|&s| s)
    }

    pub fn is_bijective(&self) -> bool {
        self.is_total() && self.is_injective() && self.is_surjective()
    }

    /// other ∘ self
    pub fn then(&self, other: &SetMap) -> SetMap {
        assert_eq!(self.target.len(), other.source.len());
        SetMap {
            source: self.source.clone(),
            target: other.target.clone(),
            assignment: self.assignment.iter().map(|a| a.and_then(|t| other.assignment[t])).collect(),
        }
    }
}

/// A Lie algebra homomorphism g(src) -> g(dst) given by images of the generators,
/// with images of basis elements computed up to a weight.
pub struct LieHom {
    pub src: usize,
    pub dst: usize,
    images: Vec<Vec<SparseVec>>,
}

impl LieHom {
    pub fn from_generators(src: usize, dst: usize, gens: Vec<SparseVec>, max_weight: usize) -> Self {
        let sa = algebra(src);
        let da = algebra(dst);
        let slevels = sa.levels(max_weight);
        let dlevels = da.levels(max_weight);
        let mut images: Vec<Vec<SparseVec>> = vec![gens];
        for w in 2..=max_weight {
            let lvl = &slevels[w - 1];
            let mut imgs = Vec::with_capacity(lvl.dim);
            for f in &lvl.factors {
                let (p, u, q, v) = f.as_ref().unwrap();
                let iu = combine(&images[p - 1], u);
                let iv = combine(&images[q - 1], v);
                imgs.push(bracket_in(&dlevels, *p, &iu, *q, &iv));
            }
            images.push(imgs);
        }
        LieHom { src, dst, images }
    }

    /// Pullback along a partial map f: S ⇀ T, a map g(T) -> g(S):
    /// t_ij ↦ Σ t_pq over p, q in the domain with {f(p), f(q)} = {i, j}.
    pub fn pullback(f: &SetMap, max_weight: usize) -> Self {
        let (s, t) = (f.source.len(), f.target.len());
        let mut gens = vec![SparseVec::new(); num_generators(t)];
        for p in 0..s {
            for q in p + 1..s {
                if let (Some(i), Some(j)) = (f.apply(p), f.apply(q)) {
                    if i != j {
                        gens[generator_index(t, i, j)].add_entry(generator_index(s, p, q), &Rational::one());
                    }
                }
            }
        }
        LieHom::from_generators(t, s, gens, max_weight)
    }

    /// Direct image along an injective total map: t_ij ↦ t_f(i)f(j).
    pub fn push(f: &SetMap, max_weight: usize) -> Self {
        let (s, t) = (f.source.len(), f.target.len());
        let gens = (0..num_generators(s))
            .map(|g| {
                let (i, j) = generator_pair(s, g);
                SparseVec::unit(generator_index(t, f.apply(i).unwrap(), f.apply(j).unwrap()))
            })
            .collect();
        LieHom::from_generators(s, t, gens, max_weight)
    }

    pub fn max_weight(&self) -> usize {
        self.images.len()
    }

    pub fn basis_image(&self, w: usize, k: usize) -> &SparseVec {
        &self.images[w - 1][k]
    }

    pub fn apply(&self, a: &DkElement) -> DkElement {
        assert_eq!(a.points, self.src);
        let da = algebra(self.dst);
        let dim = da.dim(a.weight);
        if a.weight == 0 || a.weight > self.images.len() {
            assert!(a.weight <= self.images.len() || a.is_zero(), "homomorphism not computed to weight {}", a.weight);
            return DkElement { points: self.dst, weight: a.weight, coords: vec![Rational::zero(); dim] };
        }
        let v = combine(&self.images[a.weight - 1], &a.to_sparse());
        DkElement::from_sparse(self.dst, a.weight, &v, dim)
    }
}

fn combine(images: &[SparseVec], x: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (i, c) in x.iter() {
        out.add_scaled(c, &images[i]);
    }
    out
}

pub fn direct_image(f: &SetMap, a: &DkElement) -> Result<DkElement, DkError> {
    if !f.is_total() {
        return Err(DkError::NotTotal);
    }
    if !f.is_injective() {
        return Err(DkError::NotInjective);
    }
    Ok(LieHom::push(f, a.weight.max(1)).apply(a))
}

pub fn inverse_image(f: &SetMap, a: &DkElement) -> Result<DkElement, DkError> {
    if !f.is_total() {
        return Err(DkError::NotTotal);
    }
    Ok(LieHom::pullback(f, a.weight.max(1)).apply(a))
}

/// i_* ∘ (f|_U)^* where U is the domain of f; agrees with the pullback formula on generators.
pub fn partial_pullback(f: &SetMap, a: &DkElement) -> DkElement {
    LieHom::pullback(f, a.weight.max(1)).apply(a)
}

/// The insertion ∘_x: g(X) ⊕ g(Y) -> g(X − {x} ⊔ Y), (a, b) ↦ p^*(a) + i_*(b).
/// The result lives on the canonical set with X − {x} first, then Y.
pub fn dk_compose(x_set: &FinSet, x: u32, y_set: &FinSet, a: &DkElement, b: &DkElement) -> Result<(FinSet, DkElement), DkError> {
    let xp = x_set.position(x)?;
    if a.weight != b.weight {
        return Err(DkError::WeightMismatch(a.weight, b.weight));
    }
    let (m, k) = (x_set.len(), y_set.len());
    let z = m - 1 + k;
    let (p, i) = insertion_maps(m, xp, k);
    let out = partial_pullback(&p, a).add(&direct_image(&i, b)?);
    Ok((FinSet::canonical(z), out))
}

/// For insertion at position xp of [m] of a k-element set: the collapse p: Z -> X and inclusion i: Y -> Z.
pub fn insertion_maps(m: usize, xp: usize, k: usize) -> (SetMap, SetMap) {
    let z = m - 1 + k;
    let mut pa = Vec::with_capacity(z);
    for s in 0..m {
        if s != xp {
            pa.push(s);
        }
    }
    pa.extend(std::iter::repeat(xp).take(k));
    let p = SetMap::total(m, &pa);
    let ia: Vec<usize> = (0..k).map(|j| m - 1 + j).collect();
    let i = SetMap::total(z, &ia);
    (p, i)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationReport {
    pub holds: bool,
    pub checked: usize,
    /// (weight in S, basis index, weight in R, basis index, nonzero bracket)
    pub witness: Option<(usize, usize, usize, usize, DkElement)>,
}

/// Checks [f_*(u), g^*(v)] = 0 for basis elements u of g(S), v of g(R) with weight(u)+weight(v) ≤ cap.
pub fn check_commutation(f: &SetMap, g: &SetMap, cap: usize) -> Result<CommutationReport, DkError> {
    if !f.is_total() || !f.is_injective() {
        return Err(DkError::HypothesisUnmet("f must be injective and total".into()));
    }
    if !g.is_total() {
        return Err(DkError::HypothesisUnmet("g must be total".into()));
    }
    if f.target.len() != g.source.len() {
        return Err(DkError::HypothesisUnmet("f and g not composable".into()));
    }
    let gf = f.then(g);
    let mut image: Vec<usize> = gf.assignment().iter().flatten().copied().collect();
    image.sort();
    image.dedup();
    if image.len() > 1 {
        return Err(DkError::HypothesisUnmet("image of g∘f has more than one element".into()));
    }
    let (s, t, r) = (f.source.len(), f.target.len(), g.target.len());
    let mut report = CommutationReport { holds: true, checked: 0, witness: None };
    if cap < 2 {
        return Ok(report);
    }
    let push = LieHom::push(f, cap - 1);
    let pull = LieHom::pullback(g, cap - 1);
    let (sa, ra, ta) = (algebra(s), algebra(r), algebra(t));
    let tlevels = ta.levels(cap);
    for p in 1..cap {
        for q in 1..=cap - p {
            for i in 0..sa.dim(p) {
                for j in 0..ra.dim(q) {
                    report.checked += 1;
                    let v = bracket_in(&tlevels, p, push.basis_image(p, i), q, pull.basis_image(q, j));
                    if !v.is_zero() {
                        report.holds = false;
                        report.witness = Some((p, i, q, j, DkElement::from_sparse(t, p + q, &v, ta.dim(p + q))));
                        return Ok(report);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Pairs (f: S -> T injective, g: T -> R total) with |g∘f(S)| ≤ 1, 2 ≤ |S|, 2 ≤ |R| and |T| ≤ max_t,
/// up to relabeling S and R: f is an increasing inclusion and g a set partition of T into
/// ordered blocks (numbered by least element). Other pairs differ by automorphisms, which
/// preserve the commutation statement.
pub fn qualifying_pairs(max_t: usize) -> Vec<(SetMap, SetMap)> {
    let mut out = Vec::new();
    for t in 2..=max_t {
        let partitions = set_partitions(t);
        for mask in 0u32..(1 << t) {
            let subset: Vec<usize> = (0..t).filter(|&i| mask & (1 << i) != 0).collect();
            if subset.len() < 2 {
                continue;
            }
            let f = SetMap::total(t, &subset);
            for blocks in &partitions {
                let r = blocks.iter().max().unwrap() + 1;
                if r < 2 || subset.iter().any(|&i| blocks[i] != blocks[subset[0]]) {
                    continue;
                }
                out.push((f.clone(), SetMap::total(r, blocks)));
            }
        }
    }
    out
}

/// Restricted growth strings: block index of each point, blocks numbered by first appearance.
fn set_partitions(t: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..t {
        let mut next = Vec::new();
        for p in out {
            let m = p.iter().max().map_or(0, |&x| x + 1);
            for b in 0..=m {
                let mut q = p.clone();
                q.push(b);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Quotient basis data for g(n)_w.
pub struct DKBasis {
    pub points: usize,
    pub weight: usize,
    pub free_basis: Vec<LyndonWord>,
    pub ideal_rank: usize,
    pub representatives: Vec<usize>,
    projection: OnceLock<SparseMatrix>,
}

#[derive(Serialize)]
struct BasisDump {
    points: usize,
    weight: usize,
    dimension: usize,
    representatives: Vec<String>,
}

pub fn dk_basis(points: usize, weight: usize) -> DKBasis {
    assert!(weight >= 1);
    let alg = algebra(points);
    let free_basis = lyndon_basis(num_generators(points), weight);
    let reps = alg.representatives(weight);
    let representatives: Vec<usize> = reps.iter().map(|r| free_basis.binary_search(r).expect("representative is Lyndon")).collect();
    DKBasis {
        points,
        weight,
        ideal_rank: free_basis.len() - representatives.len(),
        free_basis,
        representatives,
        projection: OnceLock::new(),
    }
}

impl DKBasis {
    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    /// Free coordinates -> quotient coordinates.
    pub fn projection(&self) -> &SparseMatrix {
        self.projection.get_or_init(|| {
            let alg = algebra(self.points);
            let cols: Vec<SparseVec> = self.free_basis.iter().map(|w| alg.project_word(w)).collect();
            SparseMatrix::from_columns(self.dimension(), &cols)
        })
    }

    pub fn representative_strings(&self) -> Vec<String> {
        self.representatives.iter().map(|&i| word_bracket_string(self.points, &self.free_basis[i])).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(BasisDump {
            points: self.points,
            weight: self.weight,
            dimension: self.dimension(),
            representatives: self.representative_strings(),
        })
        .unwrap()
    }
}

/// Images of the defining relators of g(src) under the free-level map t_a ↦ gens[a], projected to g(dst).
/// Returns the number of nonzero images.
pub fn relation_violations(src: usize, dst: usize, gens: &[SparseVec]) -> usize {
    let as_lie = |v: &SparseVec| {
        let mut x = LieElement::zero(1);
        for (i, c) in v.iter() {
            x.add_term(LyndonWord::letter(i as u8), c);
        }
        x
    };
    let images: Vec<LieElement> = gens.iter().map(as_lie).collect();
    let alg = algebra(dst);
    relators(src)
        .iter()
        .filter(|rel| {
            let mut out = LieElement::zero(2);
            for (w, c) in &rel.coeffs {
                let (u, v) = w.standard_factorization().unwrap();
                let b = crate::freelie::bracket(&images[u.0[0] as usize], &images[v.0[0] as usize]);
                out.add_scaled(c, &b);
            }
            !alg.project(&out).is_zero()
        })
        .count()
}

fn generator_images(h: &LieHom) -> Vec<SparseVec> {
    (0..num_generators(h.src)).map(|k| h.basis_image(1, k).clone()).collect()
}

/// Relation preservation of f_* (if f is injective and total) and of the pullback along f.
pub fn check_relations(f: &SetMap) -> usize {
    let mut bad = 0;
    if f.is_total() && f.is_injective() {
        let h = LieHom::push(f, 1);
        bad += relation_violations(h.src, h.dst, &generator_images(&h));
    }
    let h = LieHom::pullback(f, 1);
    bad += relation_violations(h.src, h.dst, &generator_images(&h));
    bad
}

/// Functoriality on all basis elements up to max_weight for f: S -> T, g: T -> R:
/// (g∘f)^* = f^* ∘ g^* always (partial maps included), (g∘f)_* = g_* ∘ f_* when both are injective and total.
/// Returns the number of basis elements where an identity fails.
pub fn check_functoriality(f: &SetMap, g: &SetMap, max_weight: usize) -> usize {
    let gf = f.then(g);
    let mut bad = 0;
    let pf = LieHom::pullback(f, max_weight);
    let pg = LieHom::pullback(g, max_weight);
    let pgf = LieHom::pullback(&gf, max_weight);
    let r = g.target.len();
    for w in 1..=max_weight {
        for k in 0..algebra(r).dim(w) {
            let a = DkElement::basis(r, w, k);
            if pgf.apply(&a) != pf.apply(&pg.apply(&a)) {
                bad += 1;
            }
        }
    }
    let inj = |m: &SetMap| m.is_total() && m.is_injective();
    if inj(f) && inj(g) {
        let (sf, sg, sgf) = (LieHom::push(f, max_weight), LieHom::push(g, max_weight), LieHom::push(&gf, max_weight));
        let s = f.source.len();
        for w in 1..=max_weight {
            for k in 0..algebra(s).dim(w) {
                let a = DkElement::basis(s, w, k);
                if sgf.apply(&a) != sg.apply(&sf.apply(&a)) {
                    bad += 1;
                }
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::int;
    use crate::freelie::{bracket, witt_dimension};

    #[test]
    fn small_dimensions() {
        assert_eq!(algebra(2).dim(1), 1);
        assert_eq!(algebra(3).dim(1), 3);
        assert_eq!(algebra(3).dim(2), 1);
        assert_eq!(algebra(1).dim(1), 0);
        assert_eq!(algebra(0).dim(3), 0);
        assert_eq!(algebra(2).dim(2), 0);
    }

    #[test]
    fn witt_sum_dimensions() {
        for n in 1..=4 {
            for w in 1..=4 {
                let expect: usize = (1..n).map(|k| witt_dimension(k, w)).sum();
                assert_eq!(algebra(n).dim(w), expect, "n={n} w={w}");
            }
        }
    }

    fn ideal_by_recursion(n: usize, w: usize) -> Vec<LieElement> {
        let ngen = num_generators(n);
        let mut ideal = relators(n);
        for k in 3..=w {
            let words = lyndon_basis(ngen, k);
            let mut ech = Echelon::new();
            let mut next = Vec::new();
            for a in 0..ngen {
                for r in &ideal {
                    let x = bracket(&LieElement::generator(a as u8), r);
                    if ech.insert(&x.coordinates(&words)) {
                        next.push(x);
                    }
                }
            }
            ideal = next;
        }
        ideal
    }

    #[test]
    fn agrees_with_free_lie_ideal() {
        for n in 2..=4 {
            for w in 2..=4 {
                let basis = dk_basis(n, w);
                let ideal = ideal_by_recursion(n, w);
                let mut ech = Echelon::new();
                for r in &ideal {
                    ech.insert(&r.coordinates(&basis.free_basis));
                }
                assert_eq!(ech.rank(), basis.ideal_rank, "n={n} w={w}");
                // projection kills the ideal
                for r in &ideal {
                    assert!(basis.projection().mul_vec(&r.coordinates(&basis.free_basis)).is_zero());
                }
                // representatives: lexicographically first words independent modulo the ideal
                let mut chosen = Vec::new();
                for (k, _) in basis.free_basis.iter().enumerate() {
                    if ech.insert(&SparseVec::unit(k)) {
                        chosen.push(k);
                    }
                }
                assert_eq!(chosen, basis.representatives, "n={n} w={w}");
                // projection restricted to representatives is the identity
                for (k, &r) in basis.representatives.iter().enumerate() {
                    assert_eq!(basis.projection().mul_vec(&SparseVec::unit(r)), SparseVec::unit(k));
                }
            }
        }
    }

    #[test]
    fn basis_dump() {
        let b = dk_basis(3, 2);
        assert_eq!(b.dimension(), 1);
        assert_eq!(b.free_basis.len(), 3);
        assert_eq!(b.ideal_rank, 2);
        let j = b.to_json();
        assert_eq!(j["points"], 3);
        assert_eq!(j["dimension"], 1);
        assert_eq!(j["representatives"][0], "[t12,t13]");
        assert_eq!(dk_basis(3, 1).representative_strings(), vec!["t12", "t13", "t23"]);
    }

    #[test]
    fn relation_check_detects_non_homomorphism() {
        let gens = vec![SparseVec::unit(0), SparseVec::unit(0), SparseVec::unit(1)];
        assert!(relation_violations(3, 3, &gens) > 0);
        let ok = vec![SparseVec::unit(0), SparseVec::unit(1), SparseVec::unit(2)];
        assert_eq!(relation_violations(3, 3, &ok), 0);
    }

    #[test]
    fn dilation_examples() {
        let a = DkElement::t(3, 1, 2).bracket(&DkElement::t(3, 2, 3));
        assert!(!a.is_zero());
        assert_eq!(dilation(&int(1), &a), a);
        assert!(dilation(&int(0), &a).is_zero());
        assert_eq!(dilation(&int(2), &a), a.scaled(&int(4)));
    }

    #[test]
    fn image_examples() {
        let f = SetMap::new(FinSet::canonical(2), FinSet::canonical(3), &[(1, 1), (2, 3)]).unwrap();
        assert_eq!(direct_image(&f, &DkElement::t(2, 1, 2)).unwrap(), DkElement::t(3, 1, 3));
        let id = SetMap::total(3, &[0, 1, 2]);
        let a = DkElement::t(3, 1, 2).bracket(&DkElement::t(3, 2, 3));
        assert_eq!(direct_image(&id, &a).unwrap(), a);
        let inc = SetMap::total(4, &[0, 1, 2]);
        let b = DkElement::t(4, 1, 2).bracket(&DkElement::t(4, 2, 3));
        assert_eq!(direct_image(&inc, &a).unwrap(), b);
        assert_eq!(direct_image(&SetMap::total(2, &[0, 0, 1]), &a), Err(DkError::NotInjective));

        let g = SetMap::total(2, &[0, 0, 1]);
        let t12 = DkElement::t(2, 1, 2);
        assert_eq!(inverse_image(&g, &t12).unwrap(), DkElement::t(3, 1, 3).add(&DkElement::t(3, 2, 3)));
        assert!(inverse_image(&g, &t12.bracket(&t12)).unwrap().is_zero());
        let swap = SetMap::total(3, &[1, 0, 2]);
        assert_eq!(inverse_image(&swap, &DkElement::t(3, 1, 3)).unwrap(), DkElement::t(3, 2, 3));

        let part = SetMap::from_positions(2, vec![Some(0), None, Some(1)]);
        assert_eq!(partial_pullback(&part, &t12), DkElement::t(3, 1, 3));
        let empty = SetMap::from_positions(2, vec![None, None, None]);
        assert!(partial_pullback(&empty, &t12).is_zero());
        assert_eq!(partial_pullback(&swap, &DkElement::t(3, 1, 3)), DkElement::t(3, 2, 3));
    }

    #[test]
    fn compose_examples() {
        let x = FinSet::canonical(2);
        let y = FinSet::new(vec![3, 4]).unwrap();
        let (z, c) = dk_compose(&x, 2, &y, &DkElement::t(2, 1, 2), &DkElement::zero(2, 1)).unwrap();
        assert_eq!(z.len(), 3);
        assert_eq!(c, DkElement::t(3, 1, 2).add(&DkElement::t(3, 1, 3)));
        let x = FinSet::canonical(1);
        let (_, c) = dk_compose(&x, 1, &y, &DkElement::zero(1, 1), &DkElement::t(2, 1, 2)).unwrap();
        assert_eq!(c, DkElement::t(2, 1, 2));
        let (_, c) = dk_compose(&FinSet::canonical(2), 2, &y, &DkElement::zero(2, 1), &DkElement::t(2, 1, 2)).unwrap();
        assert_eq!(c, DkElement::t(3, 2, 3));
        assert_eq!(
            dk_compose(&FinSet::canonical(2), 5, &y, &DkElement::zero(2, 1), &DkElement::zero(2, 1)).unwrap_err(),
            DkError::UnknownLabel(5)
        );
        // unit: inserting into a one-point set is the identity
        let a = DkElement::t(3, 1, 2).bracket(&DkElement::t(3, 2, 3));
        let (_, c) = dk_compose(&FinSet::canonical(1), 1, &FinSet::canonical(3), &DkElement::zero(1, 2), &a).unwrap();
        assert_eq!(c, a);
    }

    #[test]
    fn qualifying_pairs_counts() {
        // Bell numbers 1, 2, 5, 15, 52
        assert_eq!(set_partitions(4).len(), 15);
        assert_eq!(set_partitions(5).len(), 52);
        let pairs = qualifying_pairs(3);
        // t=2: S={1,2}, g must merge them: R has one point, so nothing qualifies
        // t=3: S a 2-subset (3 ways), g merges S and keeps the third point apart
        assert_eq!(pairs.len(), 3);
        for (f, g) in qualifying_pairs(4) {
            assert!(check_commutation(&f, &g, 3).unwrap().holds);
        }
    }

    #[test]
    fn commutation_examples() {
        let f = SetMap::total(4, &[2, 3]);
        let g = SetMap::total(2, &[0, 0, 1, 1]);
        let rep = check_commutation(&f, &g, 3).unwrap();
        assert!(rep.holds && rep.checked > 0);
        let t34 = DkElement::t(4, 3, 4);
        let v = inverse_image(&g, &DkElement::t(2, 1, 2)).unwrap();
        assert!(t34.bracket(&v).is_zero());
        let point = SetMap::total(4, &[1]);
        assert!(check_commutation(&point, &g, 3).unwrap().holds);
        let constant = SetMap::total(1, &[0, 0, 0, 0]);
        assert!(check_commutation(&SetMap::total(4, &[0, 2]), &constant, 3).unwrap().holds);
        let bad = SetMap::total(4, &[0, 2]);
        assert!(matches!(check_commutation(&bad, &g, 3), Err(DkError::HypothesisUnmet(_))));
        // dropping the hypothesis genuinely fails
        let f = SetMap::total(3, &[0, 1]);
        let id = SetMap::total(3, &[0, 1, 2]);
        assert!(matches!(check_commutation(&f, &id, 2), Err(DkError::HypothesisUnmet(_))));
    }

    #[test]
    fn jacobi_in_quotient() {
        let alg = algebra(4);
        for (p, q, r) in [(1, 1, 1), (1, 1, 2), (1, 2, 1), (2, 1, 1)] {
            for i in 0..alg.dim(p) {
                for j in 0..alg.dim(q) {
                    for k in 0..alg.dim(r) {
                        let x = DkElement::basis(4, p, i);
                        let y = DkElement::basis(4, q, j);
                        let z = DkElement::basis(4, r, k);
                        let jac = x.bracket(&y.bracket(&z)).add(&y.bracket(&z.bracket(&x))).add(&z.bracket(&x.bracket(&y)));
                        assert!(jac.is_zero());
                    }
                }
            }
        }
    }

    use proptest::prelude::*;

    fn arb_map(max_src: usize, max_dst: usize, partial: bool) -> impl Strategy<Value = SetMap> {
        (1..=max_src, 1..=max_dst).prop_flat_map(move |(s, t)| {
            let slot = if partial { prop::option::weighted(0.8, 0..t).boxed() } else { (0..t).prop_map(Some).boxed() };
            prop::collection::vec(slot, s).prop_map(move |a| SetMap::from_positions(t, a))
        })
    }

    fn arb_injection(max: usize) -> impl Strategy<Value = SetMap> {
        (1..=max).prop_flat_map(move |t| {
            (Just(t), Just((0..t).collect::<Vec<_>>()).prop_shuffle(), 1..=t)
                .prop_map(|(t, perm, s)| SetMap::total(t, &perm[..s]))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn relations_preserved(f in arb_map(5, 5, true), g in arb_injection(5)) {
            prop_assert_eq!(check_relations(&f), 0);
            prop_assert_eq!(check_relations(&g), 0);
        }

        #[test]
        fn pullback_functorial(f in arb_map(4, 4, true), r in 1usize..=4, seed in prop::collection::vec(prop::option::weighted(0.8, 0usize..4), 4)) {
            let t = f.target.len();
            let g = SetMap::from_positions(r, seed[..t].iter().map(|x| x.map(|v| v % r)).collect());
            prop_assert_eq!(check_functoriality(&f, &g, 3), 0);
        }

        #[test]
        fn push_functorial(g in arb_injection(5), k in 1usize..=5, perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle()) {
            let t = g.source.len();
            let s = k.min(t);
            let f = SetMap::total(t, &perm.iter().copied().filter(|&x| x < t).take(s).collect::<Vec<_>>());
            prop_assert_eq!(check_functoriality(&f, &g, 3), 0);
        }
    }
}
