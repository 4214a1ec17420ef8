//! The grt₁ conditions on g(3) and the deformation complex of the comm-module C_•(g(·)).
//!
//! An element φ ∈ g(3)_w belongs to grt₁ when it vanishes on shuffles and satisfies
//! the five-term pentagon identity in g(4)_w. Derivation values are stored by their
//! value on the generator m_n of the representable complex K: a chain in C_•(g(n))
//! that vanishes on signed shuffles.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde_json::json;
use thiserror::Error;

use crate::complexes::{ce_basis, ce_chain_name, ce_differential, map_ce, CEChain, CEElement};
use crate::dk::{algebra, DkElement, LieHom, SetMap};
use crate::exactla::{format_rational, kernel_basis, rank, Rational, SparseMatrix, SparseVec};
use crate::freelie::{all_perms, natural_shuffles, perm_inverse, perm_sign, signed_shuffle_basis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrtError {
    #[error("arity window {0} is below 4")]
    WindowTooSmall(usize),
    #[error("value supported in arity {arity} but the cap is {cap}")]
    AboveCap { arity: usize, cap: usize },
    #[error("weight must be at least 1")]
    ZeroWeight,
}

/// How a permutation word s₁…s_n acts on g(n).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordConvention {
    /// k ↦ s_k, i.e. t_ij ↦ t_{s_i s_j}.
    OneLine,
    /// The inverse bijection s_k ↦ k.
    Inverse,
}

/// Relabeling g(n) -> g(n) along the word, as a Lie homomorphism up to weight `maxw`.
pub fn word_hom(word: &[usize], conv: WordConvention, maxw: usize) -> LieHom {
    let images = match conv {
        WordConvention::OneLine => word.to_vec(),
        WordConvention::Inverse => perm_inverse(word),
    };
    LieHom::push(&SetMap::total(word.len(), &images), maxw)
}

/// Matrix of a Lie homomorphism on weight w, columns indexed by the source basis.
pub fn hom_matrix(h: &LieHom, w: usize) -> SparseMatrix {
    let cols: Vec<SparseVec> = (0..algebra(h.src).dim(w)).map(|k| h.basis_image(w, k).clone()).collect();
    SparseMatrix::from_columns(algebra(h.dst).dim(w), &cols)
}

fn combination(terms: &[(i64, SparseMatrix)]) -> SparseMatrix {
    let (r, c) = (terms[0].1.nrows(), terms[0].1.ncols());
    let mut out = SparseMatrix::zeros(r, c);
    for (s, m) in terms {
        for (i, j, x) in m.entries() {
            out.add(i, j, &(x * Rational::from_integer((*s).into())));
        }
    }
    out
}

fn word(s: &str) -> Vec<usize> {
    s.bytes().map(|b| (b - b'1') as usize).collect()
}

/// The two operators (213) − (231) − (123) and (132) − (312) − (123), stacked.
pub fn shuffle_condition_with(w: usize, conv: WordConvention) -> SparseMatrix {
    let m = |s: &str| hom_matrix(&word_hom(&word(s), conv, w), w);
    let first = combination(&[(1, m("213")), (-1, m("231")), (-1, m("123"))]);
    let second = combination(&[(1, m("132")), (-1, m("312")), (-1, m("123"))]);
    first.vstack(&second)
}

pub fn shuffle_condition(w: usize) -> SparseMatrix {
    shuffle_condition_with(w, WordConvention::OneLine)
}

/// The five maps g(3) -> g(4) of the pentagon identity with their signs:
/// (123)_* + (1(23)4)^* + (234)_* − (12(34))^* − ((12)34)^*.
pub fn pentagon_maps(maxw: usize) -> Vec<(i64, &'static str, LieHom)> {
    let push = |im: &[usize]| LieHom::push(&SetMap::total(4, im), maxw);
    let pull = |im: &[usize]| LieHom::pullback(&SetMap::total(3, im), maxw);
    vec![
        (1, "(123)_*", push(&[0, 1, 2])),
        (1, "(1(23)4)^*", pull(&[0, 1, 1, 2])),
        (1, "(234)_*", push(&[1, 2, 3])),
        (-1, "(12(34))^*", pull(&[0, 1, 2, 2])),
        (-1, "((12)34)^*", pull(&[0, 0, 1, 2])),
    ]
}

pub fn pentagon_condition(w: usize) -> SparseMatrix {
    let terms: Vec<(i64, SparseMatrix)> = pentagon_maps(w).iter().map(|(s, _, h)| (*s, hom_matrix(h, w))).collect();
    combination(&terms)
}

#[derive(Clone, Debug)]
pub struct ConditionSystem {
    pub weight: usize,
    pub shuffle_block: SparseMatrix,
    pub pentagon_block: SparseMatrix,
}

impl ConditionSystem {
    pub fn new(w: usize) -> Self {
        ConditionSystem { weight: w, shuffle_block: shuffle_condition(w), pentagon_block: pentagon_condition(w) }
    }

    pub fn stacked(&self) -> SparseMatrix {
        self.shuffle_block.vstack(&self.pentagon_block)
    }

    pub fn shuffle_kernel_dim(&self) -> usize {
        self.shuffle_block.ncols() - rank(&self.shuffle_block)
    }

    pub fn solutions(&self) -> Vec<DkElement> {
        let d = self.shuffle_block.ncols();
        kernel_basis(&self.stacked()).iter().map(|v| DkElement::from_sparse(3, self.weight, v, d)).collect()
    }
}

/// Basis of the joint kernel in g(3)_w: the elements φ(u), u ∈ grt₁ of weight w.
pub fn grt_basis(w: usize) -> Vec<DkElement> {
    ConditionSystem::new(w).solutions()
}

/// Σ_w c_w (w · x) for an element of k[S_n] given over permutation indices, words acting one-line.
pub fn act_group_algebra(v: &SparseVec, x: &DkElement) -> DkElement {
    let perms = all_perms(x.points);
    let mut out = DkElement::zero(x.points, x.weight);
    for (i, c) in v.iter() {
        let h = word_hom(&perms[i], WordConvention::OneLine, x.weight);
        out = out.add(&h.apply(x).scaled(c));
    }
    out
}

/// Whether x is killed by every signed shuffle vector of k[S_n].
pub fn vanishes_on_shuffles(x: &DkElement) -> bool {
    signed_shuffle_basis(x.points).iter().all(|v| act_group_algebra(v, x).is_zero())
}

/// Maps appearing in dm_{k+1} on the representable complex K.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    /// x₁·m_k(x₂, …, x_{k+1}): direct image along [k] -> [k+1], i ↦ i + 1.
    Left,
    /// m_k(…, x_p x_{p+1}, …), p 1-based: inverse image along the collapse [k+1] -> [k].
    Merge(usize),
    /// m_k(x₁, …, x_k)·x_{k+1}: direct image along i ↦ i.
    Right,
}

/// dm_{k+1} = x₁m_k(x₂,…) + Σ_p (−1)^p m_k(…, x_p x_{p+1}, …) + (−1)^{k+1} m_k(x₁,…,x_k)x_{k+1}.
pub fn k_differential_terms(k: usize) -> Vec<(i64, Face)> {
    let mut out = vec![(1, Face::Left)];
    for p in 1..=k {
        out.push((if p % 2 == 0 { 1 } else { -1 }, Face::Merge(p)));
    }
    out.push((if k % 2 == 0 { -1 } else { 1 }, Face::Right));
    out
}

pub fn face_hom(k: usize, face: Face, maxw: usize) -> Arc<LieHom> {
    match face {
        Face::Left => cached_hom(false, k + 1, &(1..=k).collect::<Vec<_>>(), maxw),
        Face::Right => cached_hom(false, k + 1, &(0..k).collect::<Vec<_>>(), maxw),
        Face::Merge(p) => {
            let im: Vec<usize> = (0..=k).map(|q| if q < p { q } else { q - 1 }).collect();
            cached_hom(true, k, &im, maxw)
        }
    }
}

fn chain_weight(x: &CEElement) -> usize {
    x.terms.keys().next().map(|c| c.iter().map(|l| l.0).sum()).unwrap_or(0)
}

/// v ↦ η(dm_{k+1}) for η(m_k) = v: the cosimplicial coboundary C_•(g(k)) -> C_•(g(k+1)).
pub fn cosimplicial_d(v: &CEElement) -> CEElement {
    let k = v.points;
    let maxw = chain_weight(v).max(1);
    let mut out = CEElement::zero(k + 1);
    for (s, face) in k_differential_terms(k) {
        out.add_scaled(&Rational::from_integer(s.into()), &map_ce(&face_hom(k, face, maxw), v));
    }
    out
}

/// A derivation of K of degree `degree`, by its values on the generators m_n.
/// The value on m_n lies in C_j(g(n)) with degree = n − 2 − j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationValue {
    pub weight: usize,
    pub degree: i64,
    pub components: BTreeMap<usize, CEElement>,
}

impl DerivationValue {
    pub fn zero(weight: usize, degree: i64) -> Self {
        DerivationValue { weight, degree, components: BTreeMap::new() }
    }

    pub fn single(weight: usize, degree: i64, v: CEElement) -> Self {
        let mut d = Self::zero(weight, degree);
        d.set(v);
        d
    }

    pub fn set(&mut self, v: CEElement) {
        let n = v.points;
        if v.is_zero() {
            self.components.remove(&n);
        } else {
            self.components.insert(n, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn max_arity(&self) -> Option<usize> {
        self.components.keys().next_back().copied()
    }

    /// Every component vanishes on signed shuffles, i.e. the value defines an element of H.
    pub fn is_in_complex(&self) -> bool {
        self.components.values().all(|v| shuffle_defects(v).iter().all(|x| x.is_zero()))
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &DerivationValue) {
        for v in other.components.values() {
            let mut cur = self.components.get(&v.points).cloned().unwrap_or_else(|| CEElement::zero(v.points));
            cur.add_scaled(c, v);
            self.set(cur);
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let comps: Vec<_> = self
            .components
            .values()
            .map(|v| json!({"arity": v.points, "value": format_ce(v)}))
            .collect();
        json!({"weight": self.weight, "degree": self.degree, "components": comps})
    }
}

pub fn format_ce(v: &CEElement) -> String {
    if v.is_zero() {
        return "0".into();
    }
    v.terms
        .iter()
        .map(|(c, x)| format!("{}·{}", format_rational(x), ce_chain_name(v.points, c)))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Σ_w sgn(w) w·v over the natural shuffles of [p] and [n] − [p], p = 1..n−1.
/// Every other shuffle vector is a left translate of these, so they cut out the same subspace.
pub fn shuffle_defects(v: &CEElement) -> Vec<CEElement> {
    let n = v.points;
    let maxw = chain_weight(v).max(1);
    natural_shuffles(n)
        .iter()
        .map(|fam| {
            let mut out = CEElement::zero(n);
            for w in fam {
                out.add_scaled(&Rational::from_integer(perm_sign(w).into()), &map_ce(&cached_push(w, maxw), v));
            }
            out
        })
        .collect()
}

type HomKey = (bool, usize, Vec<usize>, usize);

fn hom_cache() -> &'static Mutex<HashMap<HomKey, Arc<LieHom>>> {
    static CACHE: OnceLock<Mutex<HashMap<HomKey, Arc<LieHom>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_hom(pull: bool, target: usize, images: &[usize], maxw: usize) -> Arc<LieHom> {
    let key = (pull, target, images.to_vec(), maxw);
    if let Some(h) = hom_cache().lock().unwrap().get(&key) {
        return h.clone();
    }
    let f = SetMap::total(target, images);
    let h = Arc::new(if pull { LieHom::pullback(&f, maxw) } else { LieHom::push(&f, maxw) });
    hom_cache().lock().unwrap().insert(key, h.clone());
    h
}

/// Relabeling along a permutation word (one-line).
fn cached_push(word: &[usize], maxw: usize) -> Arc<LieHom> {
    cached_hom(false, word.len(), word, maxw)
}

/// δη(m_{n+1}) = ∂η(m_{n+1}) − (−1)^{|η|} η(dm_{n+1}); components above the cap are dropped.
pub fn differential_truncated(eta: &DerivationValue, cap: usize) -> DerivationValue {
    let mut out = DerivationValue::zero(eta.weight, eta.degree + 1);
    let s = if eta.degree.rem_euclid(2) == 0 { -Rational::one() } else { Rational::one() };
    for (&n, v) in &eta.components {
        if n <= cap {
            out.add_scaled(&Rational::one(), &DerivationValue::single(eta.weight, 0, ce_differential(v)));
        }
        if n < cap {
            out.add_scaled(&s, &DerivationValue::single(eta.weight, 0, cosimplicial_d(v)));
        }
    }
    out
}

/// The differential of H(C_•(g(·))) in the K-presentation.
pub fn deformation_differential(eta: &DerivationValue, arity_cap: usize) -> Result<DerivationValue, GrtError> {
    if let Some(n) = eta.max_arity() {
        if n >= arity_cap {
            return Err(GrtError::AboveCap { arity: n, cap: arity_cap });
        }
    }
    Ok(differential_truncated(eta, arity_cap))
}

fn ce_element(n: usize, c: &CEChain) -> CEElement {
    CEElement::wedge(n, c)
}

fn chain_basis(n: usize, ce_degree: i64, w: usize) -> Vec<CEChain> {
    if ce_degree > 0 {
        return Vec::new();
    }
    ce_basis(n, (-ce_degree) as usize, w)
}

/// Basis of the values on m_n in C_j(g(n))_w (j = −ce_degree) that vanish on signed shuffles;
/// these correspond to (lie′(n) ⊗ C_j(g(n))_w)^{S_n}.
pub fn deformation_space(arity: usize, weight: usize, ce_degree: i64) -> Vec<CEElement> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, i64), Arc<Vec<CEElement>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (arity, weight, ce_degree);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return v.as_ref().clone();
    }
    let v = Arc::new(compute_deformation_space(arity, weight, ce_degree));
    cache.lock().unwrap().insert(key, v.clone());
    v.as_ref().clone()
}

fn compute_deformation_space(arity: usize, weight: usize, ce_degree: i64) -> Vec<CEElement> {
    let basis = chain_basis(arity, ce_degree, weight);
    if basis.is_empty() {
        return Vec::new();
    }
    let mut rows: Vec<SparseVec> = Vec::new();
    let defects: Vec<Vec<CEElement>> = basis.iter().map(|c| shuffle_defects(&ce_element(arity, c))).collect();
    let nvec = defects[0].len();
    let mut cols: Vec<SparseVec> = vec![SparseVec::new(); basis.len()];
    for s in 0..nvec {
        for (j, d) in defects.iter().enumerate() {
            let coords = d[s].coordinates(&basis);
            for (i, x) in coords.iter() {
                cols[j].add_entry(s * basis.len() + i, x);
            }
        }
    }
    rows.extend(cols);
    let m = SparseMatrix::from_columns(nvec * basis.len(), &rows);
    kernel_basis(&m)
        .iter()
        .map(|v| {
            let mut e = CEElement::zero(arity);
            for (j, c) in v.iter() {
                e.add_scaled(c, &ce_element(arity, &basis[j]));
            }
            e
        })
        .collect()
}

/// Character of lie(n) at a permutation: μ(d) d^{n/d−1} (n/d−1)! when all cycles have length d, else 0.
pub fn lie_character(sigma: &[usize]) -> i64 {
    let n = sigma.len();
    let mut seen = vec![false; n];
    let mut lens = Vec::new();
    for s in 0..n {
        if !seen[s] {
            let mut l = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = sigma[x];
                l += 1;
            }
            lens.push(l);
        }
    }
    let d = lens[0];
    if lens.iter().any(|&l| l != d) {
        return 0;
    }
    let k = n / d;
    crate::freelie::mobius(d) * (d as i64).pow(k as u32 - 1) * (1..k as i64).product::<i64>()
}

/// dim (lie′(n) ⊗ C_j(g(n))_w)^{S_n} as the trace of the averaging projector, lie′(n) = lie(n) ⊗ sgn.
pub fn invariant_dim_by_averaging(arity: usize, weight: usize, ce_degree: i64) -> usize {
    let basis = chain_basis(arity, ce_degree, weight);
    if basis.is_empty() {
        return 0;
    }
    let mut total = Rational::zero();
    for sigma in all_perms(arity) {
        let chi = lie_character(&sigma) * perm_sign(&sigma);
        if chi == 0 {
            continue;
        }
        let h = cached_push(&sigma, weight.max(1));
        let mut tr = Rational::zero();
        for c in &basis {
            if let Some(x) = map_ce(&h, &ce_element(arity, c)).terms.get(c) {
                tr += x;
            }
        }
        total += tr * Rational::from_integer(chi.into());
    }
    let avg = total / Rational::from_integer(crate::freelie::factorial(arity).into());
    assert!(avg.is_integer(), "averaging trace is not an integer");
    avg.to_integer().try_into().expect("negative dimension")
}

/// F(φ): the derivation of degree 0 supported on m₃ with value φ ∈ g(3)_w = C₁(g(3))_w.
pub fn embed_grt(phi: &DkElement) -> DerivationValue {
    let mut v = CEElement::zero(3);
    for (k, c) in phi.coords.iter().enumerate() {
        v.add_scaled(c, &CEElement::wedge(3, &[(phi.weight, k)]));
    }
    DerivationValue::single(phi.weight, 0, v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    pub in_complex: bool,
    pub cocycle: bool,
    pub coboundary: bool,
    /// Largest arity of the coboundary system that decided the verdict.
    pub coboundary_window: usize,
    /// First nonzero component of δF(φ): (arity, value).
    pub witness: Option<(usize, String)>,
}

impl ClassReport {
    pub fn nonzero_class(&self) -> bool {
        self.cocycle && !self.coboundary
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "cocycle": self.cocycle,
            "coboundary": self.coboundary,
            "in_complex": self.in_complex,
            "coboundary_window": self.coboundary_window,
        });
        if let Some((a, s)) = &self.witness {
            v["witness"] = json!({"arity": a, "value": s});
        }
        v
    }
}

/// Cocycle: F(φ) vanishes on shuffles and δF(φ) = 0 through arity `arity_window`.
/// Coboundary: F(φ) = δζ is solved on arities 2..=top for top = 4, 5, …; each truncated
/// system is necessary, so the first unsolvable one settles `false`. At top = w + 2 every
/// possible ζ is included (C_{n−1}(g(n))_w = 0 for n > w + 1) and the answer is exact.
pub fn cohomology_class_test(phi: &DkElement, arity_window: usize) -> Result<ClassReport, GrtError> {
    if arity_window < 4 {
        return Err(GrtError::WindowTooSmall(arity_window));
    }
    let eta = embed_grt(phi);
    let in_complex = eta.is_in_complex();
    let d = deformation_differential(&eta, arity_window)?;
    let witness = d.components.values().next().map(|v| (v.points, format_ce(v)));
    let cocycle = in_complex && d.is_zero();
    let (coboundary, coboundary_window) = coboundary_search(&eta);
    Ok(ClassReport { in_complex, cocycle, coboundary, coboundary_window, witness })
}

/// Iterative deepening of [`is_coboundary`]; returns the verdict and the arity at which it was reached.
pub fn coboundary_search(eta: &DerivationValue) -> (bool, usize) {
    let exact = (eta.weight as i64 + eta.degree + 2).max(2) as usize;
    if eta.is_zero() {
        return (true, 2);
    }
    if eta.max_arity().unwrap() > exact {
        return (false, exact);
    }
    let start = 4.min(exact).max(eta.max_arity().unwrap().min(exact));
    for top in start..=exact {
        if !is_coboundary(eta, top) {
            return (false, top);
        }
    }
    (true, exact)
}

/// Whether η = δζ on arities 2..=top for some ζ of degree |η| − 1 supported on arities 2..=top.
pub fn is_coboundary(eta: &DerivationValue, top: usize) -> bool {
    if eta.is_zero() {
        return true;
    }
    let w = eta.weight;
    let deg = eta.degree - 1;
    // target coordinates per arity
    let target_basis: BTreeMap<usize, Vec<CEChain>> =
        (2..=top).map(|n| (n, chain_basis(n, -(n as i64 - 2 - eta.degree), w))).collect();
    let mut offsets = BTreeMap::new();
    let mut total = 0;
    for (&n, b) in &target_basis {
        offsets.insert(n, total);
        total += b.len();
    }
    let flatten = |dv: &DerivationValue| -> SparseVec {
        let mut out = SparseVec::new();
        for (&n, v) in &dv.components {
            if n > top {
                continue;
            }
            for (i, c) in v.coordinates(&target_basis[&n]).iter() {
                out.add_entry(offsets[&n] + i, c);
            }
        }
        out
    };
    let mut cols = Vec::new();
    for n in 2..=top {
        let j = n as i64 - 2 - deg;
        for z in deformation_space(n, w, -j) {
            let zeta = DerivationValue::single(w, deg, z);
            cols.push(flatten(&differential_truncated(&zeta, top)));
        }
    }
    let b = flatten(eta);
    let a = SparseMatrix::from_columns(total, &cols);
    let mut ab_cols = cols;
    ab_cols.push(b);
    let ab = SparseMatrix::from_columns(total, &ab_cols);
    rank(&a) == rank(&ab)
}

/// Row of the solver report for one weight.
pub fn grt_report(w: usize, class_window: Option<usize>) -> Result<serde_json::Value, GrtError> {
    if w == 0 {
        return Err(GrtError::ZeroWeight);
    }
    let sys = ConditionSystem::new(w);
    let basis = sys.solutions();
    let mut row = json!({
        "weight": w,
        "dim_g3": sys.shuffle_block.ncols(),
        "dim_shuffle_kernel": sys.shuffle_kernel_dim(),
        "dim_grt": basis.len(),
        "basis": basis.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
    });
    if let (Some(win), Some(phi)) = (class_window, basis.first()) {
        row["class_test"] = cohomology_class_test(phi, win)?.to_json();
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::int;

    fn g3(a: i64, b: i64, c: i64) -> DkElement {
        DkElement { points: 3, weight: 1, coords: vec![int(a), int(b), int(c)] }
    }

    #[test]
    fn shuffle_weight_one() {
        // first operator on a·t12 + b·t13 + c·t23: kernel {b = 0, a + c = 0}
        let m = shuffle_condition(1);
        let first = SparseMatrix::from_rows(3, (0..3).map(|i| m.row(i).clone()).collect());
        let k = kernel_basis(&first);
        assert_eq!(k.len(), 1);
        let v = DkElement::from_sparse(3, 1, &k[0], 3);
        assert!(v.coords[1].is_zero() && (&v.coords[0] + &v.coords[2]).is_zero());
        let sys = ConditionSystem::new(1);
        assert_eq!(sys.shuffle_kernel_dim(), 1);
        let x = g3(1, 0, -1);
        assert!(m.mul_vec(&x.to_sparse()).is_zero());
        assert!(vanishes_on_shuffles(&x));
    }

    #[test]
    fn pentagon_weight_one() {
        let x = g3(1, 0, -1);
        let img = pentagon_condition(1).mul_vec(&x.to_sparse());
        let expected = DkElement::t(4, 1, 2).sub(&DkElement::t(4, 3, 4));
        assert_eq!(img, expected.to_sparse());
        assert!(pentagon_condition(1).mul_vec(&SparseVec::new()).is_zero());
        for w in 1..=4 {
            let m = pentagon_condition(w);
            assert_eq!((m.nrows(), m.ncols()), (algebra(4).dim(w), algebra(3).dim(w)));
        }
    }

    #[test]
    fn small_grt_dimensions() {
        let dims: Vec<usize> = (1..=4).map(|w| grt_basis(w).len()).collect();
        assert_eq!(dims, vec![0, 0, 1, 0]);
        let phi = &grt_basis(3)[0];
        assert!(vanishes_on_shuffles(phi));
        // each of the five maps separately, recombined
        let mut sum = DkElement::zero(4, 3);
        for (s, _, h) in pentagon_maps(3) {
            sum = sum.add(&h.apply(phi).scaled(&int(s)));
        }
        assert!(sum.is_zero());
    }

    #[test]
    fn opposite_word_convention() {
        // reading the words as inverse bijections leaves no shuffle solutions at all
        for w in 1..=4 {
            let a = shuffle_condition_with(w, WordConvention::Inverse);
            assert_eq!(a.ncols(), rank(&a), "w={w}");
        }
    }

    #[test]
    fn k_formula_at_two() {
        // x1 m2(x2,x3) − m2(x1x2,x3) + m2(x1,x2x3) − m2(x1,x2)x3
        assert_eq!(
            k_differential_terms(2),
            vec![(1, Face::Left), (-1, Face::Merge(1)), (1, Face::Merge(2)), (-1, Face::Right)]
        );
    }

    #[test]
    fn pentagon_is_cosimplicial_d() {
        for w in 1..=3 {
            for k in 0..algebra(3).dim(w) {
                let x = DkElement::basis(3, w, k);
                let v = embed_grt(&x).components[&3].clone();
                let d = cosimplicial_d(&v);
                let p = pentagon_condition(w).mul_vec(&x.to_sparse());
                let mut expected = CEElement::zero(4);
                for (i, c) in p.iter() {
                    expected.add_scaled(c, &CEElement::wedge(4, &[(w, i)]));
                }
                assert_eq!(d, expected);
            }
        }
    }

    #[test]
    fn deformation_space_examples() {
        assert_eq!(deformation_space(2, 0, 0).len(), 1);
        assert_eq!(deformation_space(2, 0, 0)[0], CEElement::wedge(2, &[]));
        for w in 1..=3 {
            assert!(deformation_space(2, w, -2).is_empty());
        }
        for (n, w, d) in [(2, 1, -1), (3, 3, -1), (3, 2, -1), (3, 3, -2), (4, 2, -1), (4, 2, -2), (4, 3, -2)] {
            assert_eq!(deformation_space(n, w, d).len(), invariant_dim_by_averaging(n, w, d), "n={n} w={w} d={d}");
        }
    }

    #[test]
    fn cosimplicial_d_preserves_the_complex() {
        for n in 2..=4 {
            for w in 0..=2 {
                for j in 0..=2 {
                    for v in deformation_space(n, w, -j) {
                        let d = cosimplicial_d(&v);
                        assert!(shuffle_defects(&d).iter().all(|x| x.is_zero()), "n={n} w={w} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn r_value_is_a_cocycle() {
        let r = DerivationValue::single(0, 0, CEElement::wedge(2, &[]));
        assert!(r.is_in_complex());
        assert!(deformation_differential(&r, 4).unwrap().is_zero());
    }

    #[test]
    fn differential_squares_to_zero() {
        for w in 1..=3 {
            for n in 2..=5 {
                for j in 0..=w.min(n) {
                    for v in deformation_space(n, w, -(j as i64)) {
                        let eta = DerivationValue::single(w, n as i64 - 2 - j as i64, v);
                        let d = differential_truncated(&eta, 5);
                        assert!(differential_truncated(&d, 5).is_zero(), "n={n} w={w} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn class_test_weight_three() {
        let phi = &grt_basis(3)[0];
        let r = cohomology_class_test(phi, 6).unwrap();
        assert!(r.cocycle && !r.coboundary && r.nonzero_class(), "{r:?}");
        // the arity-4 truncation alone cannot exclude a preimage
        assert!(is_coboundary(&embed_grt(phi), 4));
        assert_eq!(r.coboundary_window, 5);
        let zero = DkElement::zero(3, 3);
        let r0 = cohomology_class_test(&zero, 4).unwrap();
        assert!(r0.cocycle && r0.coboundary);
        assert_eq!(cohomology_class_test(phi, 3), Err(GrtError::WindowTooSmall(3)));
    }

    #[test]
    fn negative_control() {
        let x = g3(1, 0, -1);
        let r = cohomology_class_test(&x, 6).unwrap();
        assert!(r.in_complex && !r.cocycle);
        assert_eq!(r.witness.as_ref().unwrap().0, 4);
    }

    #[test]
    fn cocycle_iff_conditions() {
        for w in 1..=4 {
            let sys = ConditionSystem::new(w);
            let stacked = sys.stacked();
            let d = algebra(3).dim(w);
            let mut span: Vec<DkElement> = (0..d).map(|k| DkElement::basis(3, w, k)).collect();
            span.extend(sys.solutions());
            span.push(g3_sum(w));
            for phi in span {
                let r = cohomology_class_test(&phi, 5).unwrap();
                assert_eq!(r.cocycle, stacked.mul_vec(&phi.to_sparse()).is_zero(), "w={w} φ={phi}");
            }
        }
    }

    #[test]
    fn natural_shuffles_suffice() {
        for w in 1..=3 {
            for k in 0..algebra(3).dim(w) {
                for extra in [DkElement::zero(3, w), grt_basis(3).into_iter().next().unwrap()] {
                    if extra.weight != w {
                        continue;
                    }
                    let x = DkElement::basis(3, w, k).add(&extra);
                    let v = embed_grt(&x).components[&3].clone();
                    assert_eq!(shuffle_defects(&v).iter().all(|d| d.is_zero()), vanishes_on_shuffles(&x));
                }
            }
        }
    }

    fn g3_sum(w: usize) -> DkElement {
        let d = algebra(3).dim(w);
        DkElement { points: 3, weight: w, coords: (0..d).map(|k| int(k as i64 + 1)).collect() }
    }
}
