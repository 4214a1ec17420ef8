//! Operads over finite sets.
//!
//! An operad here provides a basis of O([n]), a degree for each basis element,
//! partial compositions ∘_x and the action of bijections. The composite of
//! a ∈ O([m]) and b ∈ O([k]) at x lives on [m − 1 + k]: first the points of
//! [m] − {x} in order, then the points of [k].

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::complexes::{ce_basis, map_ce, CEElement};
use crate::dk::{insertion_maps, DkElement, LieHom, SetMap};
use crate::exactla::Rational;
use crate::freelie::{all_perms, perm_compose, perm_sign};

/// A linear combination of basis elements of O([arity]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadElement<B: Ord> {
    pub arity: usize,
    pub coeffs: BTreeMap<B, Rational>,
}

impl<B: Ord + Clone> OperadElement<B> {
    pub fn zero(arity: usize) -> Self {
        OperadElement { arity, coeffs: BTreeMap::new() }
    }

    pub fn basis(arity: usize, b: B) -> Self {
        let mut e = Self::zero(arity);
        e.coeffs.insert(b, Rational::one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, b: B, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(b.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&b);
        }
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &Self) {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        for (b, x) in &other.coeffs {
            self.add_term(b.clone(), &(c * x));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), other);
        out
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.arity);
        out.add_scaled(c, self);
        out
    }
}

pub trait Operad {
    type Basis: Clone + Ord + Debug;

    fn name(&self) -> String;
    /// Basis of O([n]).
    fn basis(&self, n: usize) -> Vec<Self::Basis>;
    fn degree(&self, b: &Self::Basis) -> i64;
    /// b inserted into a at position x (0-based); a has arity m, b has arity k.
    fn compose(&self, m: usize, x: usize, k: usize, a: &Self::Basis, b: &Self::Basis) -> OperadElement<Self::Basis>;
    /// Relabeling along a bijection sending point i to sigma[i].
    fn act(&self, sigma: &[usize], a: &Self::Basis) -> OperadElement<Self::Basis>;
    fn unit(&self) -> Self::Basis;
}

/// Bilinear extension of ∘_x.
pub fn compose<O: Operad>(o: &O, a: &OperadElement<O::Basis>, x: usize, b: &OperadElement<O::Basis>) -> Result<OperadElement<O::Basis>, OperadError> {
    if x >= a.arity {
        return Err(OperadError::SlotOutOfRange { slot: x + 1, arity: a.arity });
    }
    let n = a.arity - 1 + b.arity;
    let mut out = OperadElement::zero(n);
    for (p, c) in &a.coeffs {
        for (q, d) in &b.coeffs {
            out.add_scaled(&(c * d), &o.compose(a.arity, x, b.arity, p, q));
        }
    }
    Ok(out)
}

pub fn act<O: Operad>(o: &O, sigma: &[usize], a: &OperadElement<O::Basis>) -> OperadElement<O::Basis> {
    let mut out = OperadElement::zero(a.arity);
    for (p, c) in &a.coeffs {
        out.add_scaled(c, &o.act(sigma, p));
    }
    out
}

/// Degree of a homogeneous element (None for zero or inhomogeneous).
pub fn degree<O: Operad>(o: &O, a: &OperadElement<O::Basis>) -> Option<i64> {
    let mut it = a.coeffs.keys().map(|b| o.degree(b));
    let d = it.next()?;
    it.all(|e| e == d).then_some(d)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperadError {
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("arity {arity} above cap {cap}")]
    ArityAboveCap { arity: usize, cap: usize },
    #[error("{axiom} axiom fails: {detail}")]
    AxiomViolation { axiom: String, detail: String },
}

fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Position of point z of [m] − {x} in the composite's canonical order.
fn rest_pos(z: usize, x: usize) -> usize {
    if z < x {
        z
    } else {
        z - 1
    }
}

/// comm: every O(X) is k, compositions and actions are identities.
pub struct Comm;

impl Operad for Comm {
    type Basis = ();
    fn name(&self) -> String {
        "comm".into()
    }
    fn basis(&self, n: usize) -> Vec<()> {
        if n >= 1 {
            vec![()]
        } else {
            Vec::new()
        }
    }
    fn degree(&self, _: &()) -> i64 {
        0
    }
    fn compose(&self, m: usize, _: usize, k: usize, _: &(), _: &()) -> OperadElement<()> {
        OperadElement::basis(m + k - 1, ())
    }
    fn act(&self, sigma: &[usize], _: &()) -> OperadElement<()> {
        OperadElement::basis(sigma.len(), ())
    }
    fn unit(&self) {}
}

/// comm{k}: one-dimensional in each arity n, generator of degree k(n − 1),
/// S_n acting by sgn^k; for odd k, inserting an arity-l generator at slot x of an
/// arity-m generator carries the sign (−1)^{(x−1)(l−1) + l(m−x)} (x 1-based).
pub struct CommShift(pub i64);

/// Marker basis element of comm{k}([n]); the arity is carried by the element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftGen(pub usize);

pub fn comm_shift_element(k: i64, n: usize) -> (CommShift, OperadElement<ShiftGen>) {
    (CommShift(k), OperadElement::basis(n, ShiftGen(n)))
}

impl Operad for CommShift {
    type Basis = ShiftGen;
    fn name(&self) -> String {
        format!("comm{{{}}}", self.0)
    }
    fn basis(&self, n: usize) -> Vec<ShiftGen> {
        if n >= 1 {
            vec![ShiftGen(n)]
        } else {
            Vec::new()
        }
    }
    fn degree(&self, b: &ShiftGen) -> i64 {
        self.0 * (b.0 as i64 - 1)
    }
    fn compose(&self, m: usize, x: usize, k: usize, _: &ShiftGen, _: &ShiftGen) -> OperadElement<ShiftGen> {
        let mut e = OperadElement::basis(m + k - 1, ShiftGen(m + k - 1));
        if self.0 % 2 != 0 {
            let (m, x, l) = (m as i64, x as i64 + 1, k as i64);
            e = e.scaled(&sign((x - 1) * (l - 1) + l * (m - x)));
        }
        e
    }
    fn act(&self, sigma: &[usize], b: &ShiftGen) -> OperadElement<ShiftGen> {
        let e = OperadElement::basis(b.0, *b);
        if self.0 % 2 != 0 {
            e.scaled(&Rational::from_integer(perm_sign(sigma).into()))
        } else {
            e
        }
    }
    fn unit(&self) -> ShiftGen {
        ShiftGen(1)
    }
}

/// assoc: O(X) spanned by total orders of X, written as the sequence of points.
pub struct Assoc;

impl Operad for Assoc {
    type Basis = Vec<usize>;
    fn name(&self) -> String {
        "assoc".into()
    }
    fn basis(&self, n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return Vec::new();
        }
        all_perms(n)
    }
    fn degree(&self, _: &Vec<usize>) -> i64 {
        0
    }
    fn compose(&self, m: usize, x: usize, _k: usize, a: &Vec<usize>, b: &Vec<usize>) -> OperadElement<Vec<usize>> {
        let mut order = Vec::new();
        for &z in a {
            if z == x {
                order.extend(b.iter().map(|&j| m - 1 + j));
            } else {
                order.push(rest_pos(z, x));
            }
        }
        OperadElement::basis(order.len(), order)
    }
    fn act(&self, sigma: &[usize], a: &Vec<usize>) -> OperadElement<Vec<usize>> {
        OperadElement::basis(a.len(), a.iter().map(|&z| sigma[z]).collect())
    }
    fn unit(&self) -> Vec<usize> {
        vec![0]
    }
}

/// O1 ⊗ O2 with (a1⊗a2) ∘ (b1⊗b2) = (−1)^{|a2||b1|} (a1 ∘ b1) ⊗ (a2 ∘ b2).
pub struct Tensor<O1, O2>(pub O1, pub O2);

pub fn operad_tensor<O1: Operad, O2: Operad>(o1: O1, o2: O2) -> Tensor<O1, O2> {
    Tensor(o1, o2)
}

fn tensor_elements<B1: Ord + Clone, B2: Ord + Clone>(a: &OperadElement<B1>, b: &OperadElement<B2>) -> OperadElement<(B1, B2)> {
    let mut out = OperadElement::zero(a.arity);
    for (p, c) in &a.coeffs {
        for (q, d) in &b.coeffs {
            out.add_term((p.clone(), q.clone()), &(c * d));
        }
    }
    out
}

impl<O1: Operad, O2: Operad> Operad for Tensor<O1, O2> {
    type Basis = (O1::Basis, O2::Basis);
    fn name(&self) -> String {
        format!("{}⊗{}", self.0.name(), self.1.name())
    }
    fn basis(&self, n: usize) -> Vec<Self::Basis> {
        let b2 = self.1.basis(n);
        self.0.basis(n).into_iter().flat_map(|p| b2.iter().map(move |q| (p.clone(), q.clone()))).collect()
    }
    fn degree(&self, b: &Self::Basis) -> i64 {
        self.0.degree(&b.0) + self.1.degree(&b.1)
    }
    fn compose(&self, m: usize, x: usize, k: usize, a: &Self::Basis, b: &Self::Basis) -> OperadElement<Self::Basis> {
        let s = sign(self.1.degree(&a.1) * self.0.degree(&b.0));
        let l = self.0.compose(m, x, k, &a.0, &b.0);
        let r = self.1.compose(m, x, k, &a.1, &b.1);
        tensor_elements(&l, &r).scaled(&s)
    }
    fn act(&self, sigma: &[usize], a: &Self::Basis) -> OperadElement<Self::Basis> {
        tensor_elements(&self.0.act(sigma, &a.0), &self.1.act(sigma, &a.1))
    }
    fn unit(&self) -> Self::Basis {
        (self.0.unit(), self.1.unit())
    }
}

/// Bijection on the composite set [m − 1 + k] induced by τ on [m] when composing (τ·a) ∘_{τ(x)} b.
fn induced_left(tau: &[usize], x: usize, k: usize) -> Vec<usize> {
    let m = tau.len();
    let tx = tau[x];
    let mut rho = vec![0; m - 1 + k];
    for z in 0..m {
        if z != x {
            rho[rest_pos(z, x)] = rest_pos(tau[z], tx);
        }
    }
    for j in 0..k {
        rho[m - 1 + j] = m - 1 + j;
    }
    rho
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: usize,
}

fn violation<B: Debug>(axiom: &str, what: String, lhs: &OperadElement<B>, rhs: &OperadElement<B>) -> OperadError
where
    B: Ord,
{
    OperadError::AxiomViolation { axiom: axiom.into(), detail: format!("{what}: {:?} != {:?}", lhs.coeffs, rhs.coeffs) }
}

/// Nested and parallel associativity, equivariance and unit axioms on all basis elements
/// with every composite of arity at most `size_cap`.
pub fn axiom_check<O: Operad>(o: &O, size_cap: usize) -> Result<AxiomReport, OperadError> {
    let mut report = AxiomReport::default();
    let bases: Vec<Vec<O::Basis>> = (0..=size_cap).map(|n| o.basis(n)).collect();
    let el = |n: usize, b: &O::Basis| OperadElement::basis(n, b.clone());
    let unit = el(1, &o.unit());

    // unit axioms
    for m in 1..=size_cap {
        for a in &bases[m] {
            let ea = el(m, a);
            report.checks += 1;
            let l = compose(o, &unit, 0, &ea)?;
            if l != ea {
                return Err(violation("unit", format!("1 ∘ {a:?}"), &l, &ea));
            }
            for x in 0..m {
                report.checks += 1;
                let l = compose(o, &ea, x, &unit)?;
                let rho: Vec<usize> = (0..m).map(|z| if z == x { m - 1 } else { rest_pos(z, x) }).collect();
                let r = o.act(&rho, a);
                if l != r {
                    return Err(violation("unit", format!("{a:?} ∘_{x} 1"), &l, &r));
                }
            }
        }
    }

    // action is a group action
    for m in 1..=size_cap.min(4) {
        let perms = all_perms(m);
        for a in &bases[m] {
            for s in &perms {
                for t in &perms {
                    report.checks += 1;
                    let l = act(o, s, &o.act(t, a));
                    let r = o.act(&perm_compose(s, t), a);
                    if l != r {
                        return Err(violation("action", format!("{s:?}·{t:?}·{a:?}"), &l, &r));
                    }
                }
            }
        }
    }

    for m in 1..=size_cap {
        for k in 1..=size_cap + 1 - m {
            let n = m + k - 1;
            for a in &bases[m] {
                for b in &bases[k] {
                    let (ea, eb) = (el(m, a), el(k, b));
                    for x in 0..m {
                        let ab = compose(o, &ea, x, &eb)?;
                        // equivariance in the first argument
                        for tau in all_perms(m) {
                            report.checks += 1;
                            let l = compose(o, &o.act(&tau, a), tau[x], &eb)?;
                            let r = act(o, &induced_left(&tau, x, k), &ab);
                            if l != r {
                                return Err(violation("equivariance", format!("{tau:?}·{a:?} ∘_{x} {b:?}"), &l, &r));
                            }
                        }
                        // equivariance in the second argument
                        for pi in all_perms(k) {
                            report.checks += 1;
                            let l = compose(o, &ea, x, &o.act(&pi, b))?;
                            let rho: Vec<usize> = (0..n).map(|z| if z < m - 1 { z } else { m - 1 + pi[z - (m - 1)] }).collect();
                            let r = act(o, &rho, &ab);
                            if l != r {
                                return Err(violation("equivariance", format!("{a:?} ∘_{x} {pi:?}·{b:?}"), &l, &r));
                            }
                        }
                        for l_ar in 1..=size_cap + 2 - m - k {
                            for c in &bases[l_ar] {
                                let ec = el(l_ar, c);
                                // nested
                                for y in 0..k {
                                    report.checks += 1;
                                    let lhs = compose(o, &ab, m - 1 + y, &ec)?;
                                    let rhs = compose(o, &ea, x, &compose(o, &eb, y, &ec)?)?;
                                    if lhs != rhs {
                                        return Err(violation("nested", format!("({a:?} ∘_{x} {b:?}) ∘_{y} {c:?}"), &lhs, &rhs));
                                    }
                                }
                                // parallel
                                for x2 in 0..m {
                                    if x2 == x {
                                        continue;
                                    }
                                    report.checks += 1;
                                    let lhs = compose(o, &ab, rest_pos(x2, x), &ec)?;
                                    let ac = compose(o, &ea, x2, &ec)?;
                                    let rhs0 = compose(o, &ac, rest_pos(x, x2), &eb)?;
                                    let total = m - 2 + k + l_ar;
                                    let sigma: Vec<usize> = (0..total)
                                        .map(|z| {
                                            if z < m - 2 {
                                                z
                                            } else if z < m - 2 + l_ar {
                                                z + k
                                            } else {
                                                z - l_ar
                                            }
                                        })
                                        .collect();
                                    let s = sign(o.degree(b) * o.degree(c));
                                    let rhs = act(o, &sigma, &rhs0).scaled(&s);
                                    if lhs != rhs {
                                        return Err(violation("parallel", format!("{a:?} ∘ ({b:?} at {x}, {c:?} at {x2})"), &lhs, &rhs));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Relabeling that puts a ∘_x b (canonical order) into the induced total order:
/// the order of [m] with x replaced by the order of [k].
fn induced_order(m: usize, x: usize, k: usize) -> Vec<usize> {
    let mut rho = vec![0; m - 1 + k];
    for z in 0..m {
        if z != x {
            rho[rest_pos(z, x)] = if z < x { z } else { z + k - 1 };
        }
    }
    for j in 0..k {
        rho[m - 1 + j] = x + j;
    }
    rho
}

/// a{b} = Σ_x (a ∘_x b) relabeled into the induced order.
pub fn pre_lie<O: Operad>(o: &O, a: &OperadElement<O::Basis>, b: &OperadElement<O::Basis>) -> OperadElement<O::Basis> {
    let mut out = OperadElement::zero(a.arity + b.arity - 1);
    for x in 0..a.arity {
        let c = compose(o, a, x, b).expect("slot in range");
        out.add_scaled(&Rational::one(), &act(o, &induced_order(a.arity, x, b.arity), &c));
    }
    out
}

/// {a, b} = a{b} − (−1)^{|a||b|} b{a}, for homogeneous a, b.
pub fn gerstenhaber_bracket<O: Operad>(o: &O, a: &OperadElement<O::Basis>, b: &OperadElement<O::Basis>) -> OperadElement<O::Basis> {
    if a.is_zero() || b.is_zero() {
        return OperadElement::zero(a.arity + b.arity - 1);
    }
    let (da, db) = (degree(o, a).expect("homogeneous"), degree(o, b).expect("homogeneous"));
    let mut out = pre_lie(o, a, b);
    out.add_scaled(&-sign(da * db), &pre_lie(o, b, a));
    out
}

/// Planar rooted tree; each internal vertex with n children is the generator m_n,
/// leaves carry the points of [arity].
/// Graded Jacobi identity [a,[b,c]] = [[a,b],c] + (−1)^{|a||b|} [b,[a,c]] for homogeneous a, b, c.
pub fn jacobi_holds<O: Operad>(o: &O, a: &OperadElement<O::Basis>, b: &OperadElement<O::Basis>, c: &OperadElement<O::Basis>) -> bool {
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return true;
    }
    let (da, db) = (degree(o, a).unwrap(), degree(o, b).unwrap());
    let lhs = gerstenhaber_bracket(o, a, &gerstenhaber_bracket(o, b, c));
    let r1 = gerstenhaber_bracket(o, &gerstenhaber_bracket(o, a, b), c);
    let r2 = gerstenhaber_bracket(o, b, &gerstenhaber_bracket(o, a, c)).scaled(&sign(da * db));
    lhs == r1.add(&r2)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf(usize),
    Node(Vec<Tree>),
}

impl Tree {
    /// The generator m_n with leaves in order.
    pub fn corolla(n: usize) -> Tree {
        Tree::Node((0..n).map(Tree::Leaf).collect())
    }

    pub fn arity(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(c) => c.iter().map(|t| t.arity()).sum(),
        }
    }

    pub fn vertex_arities(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.walk(&mut |n| out.push(n));
        out
    }

    fn walk(&self, f: &mut impl FnMut(usize)) {
        if let Tree::Node(c) = self {
            f(c.len());
            for t in c {
                t.walk(f);
            }
        }
    }

    pub fn min_leaf(&self) -> usize {
        match self {
            Tree::Leaf(l) => *l,
            Tree::Node(c) => c.iter().map(|t| t.min_leaf()).min().unwrap(),
        }
    }

    fn relabel(&self, f: &impl Fn(usize) -> usize) -> Tree {
        match self {
            Tree::Leaf(l) => Tree::Leaf(f(*l)),
            Tree::Node(c) => Tree::Node(c.iter().map(|t| t.relabel(f)).collect()),
        }
    }
}

impl std::fmt::Display for Tree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tree::Leaf(l) => write!(f, "{}", l + 1),
            Tree::Node(c) => {
                write!(f, "m{}(", c.len())?;
                for (i, t) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Debug for Tree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// Tree whose vertices carry their position in a construction order.
enum Tagged {
    Leaf(usize),
    Node(usize, Vec<Tagged>),
}

impl Tagged {
    fn from_tree(t: &Tree, next: &mut usize) -> Tagged {
        match t {
            Tree::Leaf(l) => Tagged::Leaf(*l),
            Tree::Node(c) => {
                let tag = *next;
                *next += 1;
                Tagged::Node(tag, c.iter().map(|x| Tagged::from_tree(x, next)).collect())
            }
        }
    }

    fn into_tree(self, tags: &mut Vec<(usize, usize)>) -> Tree {
        match self {
            Tagged::Leaf(l) => Tree::Leaf(l),
            Tagged::Node(tag, c) => {
                tags.push((tag, c.len()));
                Tree::Node(c.into_iter().map(|x| x.into_tree(tags)).collect())
            }
        }
    }
}

/// Koszul sign of moving vertices from construction order to pre-order.
fn preorder_sign(t: Tagged, deg: &impl Fn(usize) -> i64) -> (Tree, Rational) {
    let mut tags = Vec::new();
    let tree = t.into_tree(&mut tags);
    let mut e = 0i64;
    for i in 0..tags.len() {
        for j in i + 1..tags.len() {
            if tags[i].0 > tags[j].0 {
                e += deg(tags[i].1) * deg(tags[j].1);
            }
        }
    }
    (tree, sign(e))
}

/// Free operad on one generator m_n in each arity n ≥ 2 (regular S_n-module),
/// with |m_n| given by a degree function.
pub struct FreeOperad {
    pub gen_degree: fn(usize) -> i64,
}

/// hoass′: all generators of degree 1.
pub fn hoass_operad() -> FreeOperad {
    FreeOperad { gen_degree: |_| 1 }
}

fn planar_shapes(n: usize) -> Vec<Tree> {
    if n == 1 {
        return vec![Tree::Leaf(0)];
    }
    let mut out = Vec::new();
    for parts in 2..=n {
        for comp in compositions(n, parts) {
            let mut acc: Vec<Vec<Tree>> = vec![Vec::new()];
            for &c in &comp {
                let shapes = planar_shapes(c);
                acc = acc
                    .into_iter()
                    .flat_map(|v| {
                        shapes.iter().map(move |s| {
                            let mut w = v.clone();
                            w.push(s.clone());
                            w
                        })
                    })
                    .collect();
            }
            out.extend(acc.into_iter().map(Tree::Node));
        }
    }
    out
}

fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if n >= 1 { vec![vec![n]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn label_leaves(t: &Tree, labels: &[usize], next: &mut usize) -> Tree {
    match t {
        Tree::Leaf(_) => {
            let l = labels[*next];
            *next += 1;
            Tree::Leaf(l)
        }
        Tree::Node(c) => Tree::Node(c.iter().map(|x| label_leaves(x, labels, next)).collect()),
    }
}

impl FreeOperad {
    pub fn tree_degree(&self, t: &Tree) -> i64 {
        t.vertex_arities().into_iter().map(self.gen_degree).sum()
    }

    pub fn generator(&self, n: usize) -> OperadElement<Tree> {
        OperadElement::basis(n, Tree::corolla(n))
    }

    fn substitute_tagged(t: &Tree, x: usize, sub: &mut Option<Tagged>, outer: &impl Fn(usize) -> usize, next: &mut usize) -> Tagged {
        match t {
            Tree::Leaf(l) if *l == x => sub.take().expect("leaf appears once"),
            Tree::Leaf(l) => Tagged::Leaf(outer(*l)),
            Tree::Node(c) => {
                let tag = *next;
                *next += 1;
                Tagged::Node(tag, c.iter().map(|y| Self::substitute_tagged(y, x, sub, outer, next)).collect())
            }
        }
    }

    /// Differential of hoass′: d m_n = −Σ_{i=2}^{n−1} m_i{m_{n+1−i}}, extended as a derivation.
    pub fn hoass_differential(&self, a: &OperadElement<Tree>, arity_cap: usize) -> Result<OperadElement<Tree>, OperadError> {
        let mut out = OperadElement::zero(a.arity);
        for (t, c) in &a.coeffs {
            if let Some(&n) = t.vertex_arities().iter().max() {
                if n > arity_cap {
                    return Err(OperadError::ArityAboveCap { arity: n, cap: arity_cap });
                }
            }
            out.add_scaled(c, &self.d_tree(t));
        }
        Ok(out)
    }

    fn d_generator(&self, n: usize) -> OperadElement<Tree> {
        let mut out = OperadElement::zero(n);
        for i in 2..n {
            out.add_scaled(&-Rational::one(), &pre_lie(self, &self.generator(i), &self.generator(n + 1 - i)));
        }
        out
    }

    fn d_tree(&self, t: &Tree) -> OperadElement<Tree> {
        let mut out = OperadElement::zero(t.arity());
        let nverts = t.vertex_arities().len();
        for v in 0..nverts {
            self.d_at_vertex(t, v, &mut out);
        }
        out
    }

    /// Replaces the v-th vertex (pre-order) by d of its generator.
    fn d_at_vertex(&self, t: &Tree, v: usize, out: &mut OperadElement<Tree>) {
        let arities = t.vertex_arities();
        let before: i64 = arities[..v].iter().map(|&n| (self.gen_degree)(n)).sum();
        let dv = self.d_generator(arities[v]);
        for (term, c) in &dv.coeffs {
            // construction order: vertices before v, the term's vertices, then the rest
            let mut counter = 0usize;
            let mut term_opt = Some(term.clone());
            let tagged = self.graft_at_vertex(t, v, &mut term_opt, &mut counter, term.vertex_arities().len());
            let (tree, s) = preorder_sign(tagged, &|n| (self.gen_degree)(n));
            out.add_term(tree, &(c * s * sign(before)));
        }
    }

    fn graft_at_vertex(&self, t: &Tree, v: usize, term: &mut Option<Tree>, counter: &mut usize, term_size: usize) -> Tagged {
        match t {
            Tree::Leaf(l) => Tagged::Leaf(*l),
            Tree::Node(c) => {
                let here = *counter;
                *counter += 1;
                if here == v {
                    let term = term.take().unwrap();
                    let mut tag = v;
                    let children: Vec<Tagged> = {
                        // tag the later vertices after the term's vertices
                        let mut later = v + term_size;
                        let mut kids = Vec::new();
                        for ch in c {
                            kids.push(self.shift_tags(ch, counter, &mut later));
                        }
                        kids
                    };
                    let mut kids = children.into_iter().map(Some).collect::<Vec<_>>();
                    Self::expand_term(&term, &mut kids, &mut tag)
                } else {
                    let tag = if here < v { here } else { here + term_size - 1 };
                    Tagged::Node(tag, c.iter().map(|ch| self.graft_at_vertex(ch, v, term, counter, term_size)).collect())
                }
            }
        }
    }

    fn shift_tags(&self, t: &Tree, counter: &mut usize, later: &mut usize) -> Tagged {
        match t {
            Tree::Leaf(l) => Tagged::Leaf(*l),
            Tree::Node(c) => {
                *counter += 1;
                let tag = *later;
                *later += 1;
                Tagged::Node(tag, c.iter().map(|ch| self.shift_tags(ch, counter, later)).collect())
            }
        }
    }

    fn expand_term(term: &Tree, kids: &mut [Option<Tagged>], tag: &mut usize) -> Tagged {
        match term {
            Tree::Leaf(l) => kids[*l].take().unwrap(),
            Tree::Node(c) => {
                let me = *tag;
                *tag += 1;
                Tagged::Node(me, c.iter().map(|x| Self::expand_term(x, kids, tag)).collect())
            }
        }
    }
}

impl Operad for FreeOperad {
    type Basis = Tree;
    fn name(&self) -> String {
        "free".into()
    }
    fn basis(&self, n: usize) -> Vec<Tree> {
        if n == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for shape in planar_shapes(n) {
            for p in all_perms(n) {
                out.push(label_leaves(&shape, &p, &mut 0));
            }
        }
        out.sort();
        out
    }
    fn degree(&self, b: &Tree) -> i64 {
        self.tree_degree(b)
    }
    fn compose(&self, m: usize, x: usize, k: usize, a: &Tree, b: &Tree) -> OperadElement<Tree> {
        let mut next = 0;
        let outer = |z: usize| rest_pos(z, x);
        // a's vertices first (tags by pre-order), then b's
        let na = a.vertex_arities().len();
        let mut bn = na;
        let sub = Tagged::from_tree(&b.relabel(&|j| m - 1 + j), &mut bn);
        let tagged = Self::substitute_tagged(a, x, &mut Some(sub), &outer, &mut next);
        let (tree, s) = preorder_sign(tagged, &|n| (self.gen_degree)(n));
        OperadElement::basis(m - 1 + k, tree).scaled(&s)
    }
    fn act(&self, sigma: &[usize], a: &Tree) -> OperadElement<Tree> {
        OperadElement::basis(sigma.len(), a.relabel(&|z| sigma[z]))
    }
    fn unit(&self) -> Tree {
        Tree::Leaf(0)
    }
}

pub fn format_tree_element(a: &OperadElement<Tree>) -> String {
    if a.is_zero() {
        return "0".into();
    }
    a.coeffs
        .iter()
        .map(|(t, c)| format!("{}·{}", crate::exactla::format_rational(c), t))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Normal form in hocomm′ = hoass′ / (sh(n)·m_n): at every vertex the children are
/// sorted by least leaf and the vertex order word is reduced onto the complement of sh(n).
pub struct HocommReducer {
    reducers: std::sync::Mutex<BTreeMap<usize, crate::exactla::Echelon>>,
    op: FreeOperad,
}

impl Default for HocommReducer {
    fn default() -> Self {
        Self::new()
    }
}

impl HocommReducer {
    pub fn new() -> Self {
        HocommReducer { reducers: std::sync::Mutex::new(BTreeMap::new()), op: hoass_operad() }
    }

    fn reduce_word(&self, w: &[usize]) -> Vec<(Vec<usize>, Rational)> {
        let n = w.len();
        let mut r = self.reducers.lock().unwrap();
        let e = r.entry(n).or_insert_with(|| crate::freelie::shuffle_reducer(n, false));
        let perms = all_perms(n);
        e.reduce(&crate::exactla::SparseVec::unit(crate::freelie::perm_index(w)))
            .iter()
            .map(|(i, c)| (perms[i].clone(), c.clone()))
            .collect()
    }

    /// Koszul sign of arranging blocks of the given degrees in order w (w[k] = block at position k).
    fn block_sign(w: &[usize], degs: &[i64]) -> Rational {
        let mut e = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    e += degs[w[i]] * degs[w[j]];
                }
            }
        }
        sign(e)
    }

    fn reduce_tree(&self, t: &Tree) -> Vec<(Tree, Rational)> {
        let Tree::Node(children) = t else {
            return vec![(t.clone(), Rational::one())];
        };
        let n = children.len();
        let mut acc: Vec<(Vec<Tree>, Rational)> = vec![(Vec::new(), Rational::one())];
        for ch in children {
            let red = self.reduce_tree(ch);
            acc = acc
                .into_iter()
                .flat_map(|(v, c)| {
                    red.iter().map(move |(r, d)| {
                        let mut w = v.clone();
                        w.push(r.clone());
                        (w, &c * d)
                    })
                })
                .collect();
        }
        let mut out: BTreeMap<Tree, Rational> = BTreeMap::new();
        for (kids, c) in acc {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&i| kids[i].min_leaf());
            let sorted: Vec<Tree> = order.iter().map(|&i| kids[i].clone()).collect();
            let degs: Vec<i64> = sorted.iter().map(|s| self.op.tree_degree(s)).collect();
            // planar position k holds sorted child w[k]
            let mut w = vec![0; n];
            for (sorted_pos, &orig) in order.iter().enumerate() {
                w[orig] = sorted_pos;
            }
            let ew = Self::block_sign(&w, &degs);
            for (u, r) in self.reduce_word(&w) {
                let eu = Self::block_sign(&u, &degs);
                let tree = Tree::Node(u.iter().map(|&k| sorted[k].clone()).collect());
                let coeff = &c * &r * &ew * &eu;
                let e = out.entry(tree.clone()).or_insert_with(Rational::zero);
                *e += coeff;
                if e.is_zero() {
                    out.remove(&tree);
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn reduce(&self, a: &OperadElement<Tree>) -> OperadElement<Tree> {
        let mut out = OperadElement::zero(a.arity);
        for (t, c) in &a.coeffs {
            for (r, d) in self.reduce_tree(t) {
                out.add_term(r, &(c * d));
            }
        }
        out
    }

    /// Differential of hocomm′ on normal forms.
    pub fn differential(&self, a: &OperadElement<Tree>, arity_cap: usize) -> Result<OperadElement<Tree>, OperadError> {
        Ok(self.reduce(&self.op.hoass_differential(a, arity_cap)?))
    }

    /// Reduced images of all generator words m_n·w; their span is the generator space.
    pub fn generator_space_dim(&self, n: usize) -> usize {
        let mut ech = crate::exactla::Echelon::new();
        let mut index: BTreeMap<Tree, usize> = BTreeMap::new();
        for p in all_perms(n) {
            let t = Tree::Node(p.iter().map(|&l| Tree::Leaf(l)).collect());
            let r = self.reduce(&OperadElement::basis(n, t));
            let v: crate::exactla::SparseVec = r
                .coeffs
                .iter()
                .map(|(t, c)| {
                    let k = index.len();
                    (*index.entry(t.clone()).or_insert(k), c.clone())
                })
                .collect();
            ech.insert(&v);
        }
        ech.rank()
    }
}

/// hocomm_reduce with a fresh reducer.
pub fn hocomm_reduce(a: &OperadElement<Tree>) -> OperadElement<Tree> {
    HocommReducer::new().reduce(a)
}

/// Shuffle-ideal generators Σ_{w ∈ Sh(Y,Z)} m_n·w over all ordered decompositions.
pub fn shuffle_ideal_generators(n: usize) -> Vec<OperadElement<Tree>> {
    crate::freelie::all_shuffle_families(n)
        .into_iter()
        .map(|fam| {
            let mut e = OperadElement::zero(n);
            for w in fam {
                e.add_term(Tree::Node(w.iter().map(|&l| Tree::Leaf(l)).collect()), &Rational::one());
            }
            e
        })
        .collect()
}

/// Carrier of a comm-module (or of the dk operad, summand by summand): spaces
/// functorial in Lie homomorphisms g(X) -> g(Y).
pub trait LieFunctorial: Clone + PartialEq + Debug {
    fn map(&self, h: &LieHom) -> Self;
}

impl LieFunctorial for DkElement {
    fn map(&self, h: &LieHom) -> Self {
        h.apply(self)
    }
}

impl LieFunctorial for CEElement {
    fn map(&self, h: &LieHom) -> Self {
        map_ce(h, self)
    }
}

/// M-element inserted into a comm slot: a ∘_x 1 = p^*(a).
fn left<E: LieFunctorial>(m: usize, x: usize, k: usize, a: &E, maxw: usize) -> E {
    let (p, _) = insertion_maps(m, x, k);
    a.map(&LieHom::pullback(&p, maxw))
}

/// comm-element receiving an M-element: 1 ∘_x b = i_*(b).
fn right<E: LieFunctorial>(m: usize, x: usize, k: usize, b: &E, maxw: usize) -> E {
    let (_, i) = insertion_maps(m, x, k);
    b.map(&LieHom::push(&i, maxw))
}

fn relabel<E: LieFunctorial>(images: &[usize], a: &E, maxw: usize) -> E {
    a.map(&LieHom::push(&SetMap::total(images.len(), images), maxw))
}

fn lie_violation<E: Debug>(axiom: &str, what: String, lhs: &E, rhs: &E) -> OperadError {
    OperadError::AxiomViolation { axiom: axiom.into(), detail: format!("{what}: {lhs:?} != {rhs:?}") }
}

/// Operad laws on O ⊕ M where O = comm and M(X) is functorial along p^* and i_*.
/// Every law is linear in the unique M-input, so it is checked for each input position separately.
/// `elements(n)` lists a basis of M([n]); sets are bounded by `size_cap`.
pub fn functorial_axiom_check<E: LieFunctorial>(
    elements: impl Fn(usize) -> Vec<E>,
    size_cap: usize,
    maxw: usize,
) -> Result<AxiomReport, OperadError> {
    let mut report = AxiomReport::default();
    let els: Vec<Vec<E>> = (0..=size_cap).map(&elements).collect();
    let mut check = |axiom: &str, what: String, lhs: E, rhs: E| {
        report.checks += 1;
        if lhs == rhs {
            Ok(())
        } else {
            Err(lie_violation(axiom, what, &lhs, &rhs))
        }
    };
    for m in 1..=size_cap {
        // units
        for a in &els[m] {
            check("unit", format!("1 ∘ a, |X|={m}"), right(1, 0, m, a, maxw), a.clone())?;
            for x in 0..m {
                let mut back = vec![0; m];
                for z in 0..m {
                    back[if z == x { m - 1 } else { rest_pos(z, x) }] = z;
                }
                check("unit", format!("a ∘_{x} 1, |X|={m}"), relabel(&back, &left(m, x, 1, a, maxw), maxw), a.clone())?;
            }
        }
        for k in 1..=size_cap + 1 - m {
            let z = m - 1 + k;
            for x in 0..m {
                // equivariance in X and in Y
                for sigma in all_perms(m) {
                    let sx = sigma[x];
                    let tau: Vec<usize> = (0..z)
                        .map(|q| if q < m - 1 { let orig = if q < x { q } else { q + 1 }; rest_pos(sigma[orig], sx) } else { q })
                        .collect();
                    for a in &els[m] {
                        let lhs = left(m, sx, k, &relabel(&sigma, a, maxw), maxw);
                        check("equivariance", format!("σ={sigma:?} on a, x={x}, k={k}"), lhs, relabel(&tau, &left(m, x, k, a, maxw), maxw))?;
                    }
                    for b in &els[k] {
                        let lhs = right(m, sx, k, b, maxw);
                        check("equivariance", format!("σ={sigma:?} with b, x={x}, m={m}"), lhs, relabel(&tau, &right(m, x, k, b, maxw), maxw))?;
                    }
                }
                for sigma in all_perms(k) {
                    let tau: Vec<usize> = (0..z).map(|q| if q < m - 1 { q } else { m - 1 + sigma[q - (m - 1)] }).collect();
                    for b in &els[k] {
                        let lhs = right(m, x, k, &relabel(&sigma, b, maxw), maxw);
                        check("equivariance", format!("σ={sigma:?} on b, x={x}"), lhs, relabel(&tau, &right(m, x, k, b, maxw), maxw))?;
                    }
                    for a in &els[m] {
                        let l = left(m, x, k, a, maxw);
                        check("equivariance", format!("σ={sigma:?} fixes a∘1, x={x}"), relabel(&tau, &l, maxw), l)?;
                    }
                }
                for l in 1..=size_cap + 2 - m - k {
                    // nested: (a ∘_x b) ∘_{y} c = a ∘_x (b ∘_y c)
                    for y in 0..k {
                        let yz = m - 1 + y;
                        let n2 = k + l - 1;
                        let what = format!("nested m={m} x={x} k={k} y={y} l={l}");
                        for a in &els[m] {
                            check("nested", what.clone(), left(z, yz, l, &left(m, x, k, a, maxw), maxw), left(m, x, n2, a, maxw))?;
                        }
                        for b in &els[k] {
                            check("nested", what.clone(), left(z, yz, l, &right(m, x, k, b, maxw), maxw), right(m, x, n2, &left(k, y, l, b, maxw), maxw))?;
                        }
                        for c in &els[l] {
                            check("nested", what.clone(), right(z, yz, l, c, maxw), right(m, x, n2, &right(k, y, l, c, maxw), maxw))?;
                        }
                    }
                    // parallel: (a ∘_x b) ∘_x' c = σ·((a ∘_x' c) ∘_x b)
                    for xp in 0..m {
                        if xp == x {
                            continue;
                        }
                        let (x1, x2) = (rest_pos(xp, x), rest_pos(x, xp));
                        let zl = m - 1 + l;
                        let total = m - 2 + k + l;
                        let tau: Vec<usize> = (0..total)
                            .map(|q| if q < m - 2 { q } else if q < m - 2 + l { q + k } else { q - l })
                            .collect();
                        let what = format!("parallel m={m} x={x} x'={xp} k={k} l={l}");
                        for a in &els[m] {
                            let lhs = left(z, x1, l, &left(m, x, k, a, maxw), maxw);
                            let rhs = left(zl, x2, k, &left(m, xp, l, a, maxw), maxw);
                            check("parallel", what.clone(), lhs, relabel(&tau, &rhs, maxw))?;
                        }
                        for b in &els[k] {
                            let lhs = left(z, x1, l, &right(m, x, k, b, maxw), maxw);
                            check("parallel", what.clone(), lhs, relabel(&tau, &right(zl, x2, k, b, maxw), maxw))?;
                        }
                        for c in &els[l] {
                            let lhs = right(z, x1, l, c, maxw);
                            let rhs = left(zl, x2, k, &right(m, xp, l, c, maxw), maxw);
                            check("parallel", what.clone(), lhs, relabel(&tau, &rhs, maxw))?;
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// The dk operad X ↦ g(X)_w with ∘_x(a, b) = p^*a + i_*b, on sets ≤ size_cap and weights ≤ weight_cap.
pub fn dk_axiom_check(size_cap: usize, weight_cap: usize) -> Result<AxiomReport, OperadError> {
    functorial_axiom_check(
        |n| {
            if n == 0 {
                return Vec::new();
            }
            (1..=weight_cap)
                .flat_map(|w| (0..crate::dk::algebra(n).dim(w)).map(move |k| DkElement::basis(n, w, k)))
                .collect()
        },
        size_cap,
        weight_cap,
    )
}

/// CE chains C_•(g(X)) as a comm-module: the left action is Λ(i_*), the right action Λ(p^*).
pub fn ce_module_check(size_cap: usize, weight_cap: usize) -> Result<AxiomReport, OperadError> {
    functorial_axiom_check(
        |n| {
            if n == 0 {
                return Vec::new();
            }
            let mut out = Vec::new();
            for w in 1..=weight_cap {
                for d in 1..=w {
                    out.extend(ce_basis(n, d, w).iter().map(|c| CEElement::wedge(n, c)));
                }
            }
            out
        },
        size_cap,
        weight_cap,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::int;

    #[test]
    fn comm_examples() {
        let one = OperadElement::basis(2, ());
        assert_eq!(compose(&Comm, &one, 0, &one).unwrap(), OperadElement::basis(3, ()));
        assert!(axiom_check(&Comm, 5).unwrap().checks > 0);
        assert!(compose(&Comm, &one, 2, &one).is_err());
    }

    #[test]
    fn comm_shift_examples() {
        let (o, g) = comm_shift_element(0, 3);
        assert_eq!(degree(&o, &g), Some(0));
        let (o, g) = comm_shift_element(1, 2);
        assert_eq!(degree(&o, &g), Some(1));
        let at1 = compose(&o, &g, 0, &g).unwrap();
        let at2 = compose(&o, &g, 1, &g).unwrap();
        assert_eq!(at1, at2.scaled(&int(-1)));
        for k in [-2, -1, 0, 1, 2] {
            axiom_check(&CommShift(k), 5).unwrap();
        }
    }

    #[test]
    fn assoc_examples() {
        let mu = OperadElement::basis(2, vec![0, 1]);
        // (1<2) inserted at 1: composite set is {2} then {1', 2'}, order 1'<2'<2
        assert_eq!(compose(&Assoc, &mu, 0, &mu).unwrap(), OperadElement::basis(3, vec![1, 2, 0]));
        assert_eq!(act(&Assoc, &induced_order(2, 0, 2), &compose(&Assoc, &mu, 0, &mu).unwrap()), OperadElement::basis(3, vec![0, 1, 2]));
        assert_eq!(pre_lie(&Assoc, &mu, &mu), OperadElement::basis(3, vec![0, 1, 2]).scaled(&int(2)));
        let unit = OperadElement::basis(1, vec![0]);
        assert_eq!(compose(&Assoc, &mu, 1, &unit).unwrap(), mu);
        axiom_check(&Assoc, 4).unwrap();
    }

    #[test]
    fn tensor_examples() {
        for n in 1..=4 {
            assert_eq!(Tensor(Comm, Assoc).basis(n).len(), Assoc.basis(n).len());
            assert_eq!(Tensor(CommShift(1), CommShift(-1)).basis(n).len(), 1);
            assert!(Tensor(CommShift(1), CommShift(-1)).basis(n).iter().all(|b| Tensor(CommShift(1), CommShift(-1)).degree(b) == 0));
        }
        axiom_check(&Tensor(Comm, Assoc), 4).unwrap();
        axiom_check(&Tensor(CommShift(1), CommShift(-1)), 4).unwrap();
        axiom_check(&Tensor(CommShift(1), Assoc), 4).unwrap();
        // comm{1} ⊗ comm{−1} ≅ comm via e_n ↦ (−1)^{(n−1)(n−2)/2} e_n
        let o = Tensor(CommShift(1), CommShift(-1));
        let eps = |n: usize| sign(((n - 1) * (n.max(2) - 2) / 2) as i64);
        for m in 1..=4 {
            for k in 1..=5 - m {
                for x in 0..m {
                    let c = o.compose(m, x, k, &o.basis(m)[0], &o.basis(k)[0]);
                    let coeff = c.coeffs.values().next().unwrap() * eps(m) * eps(k);
                    assert_eq!(coeff, eps(m + k - 1));
                }
            }
            let s = o.act(&(0..m).rev().collect::<Vec<_>>(), &o.basis(m)[0]);
            assert_eq!(s.coeffs.values().next(), Some(&Rational::one()));
        }
    }

    #[test]
    fn broken_signs_are_detected() {
        struct Bad;
        impl Operad for Bad {
            type Basis = ShiftGen;
            fn name(&self) -> String {
                "bad".into()
            }
            fn basis(&self, n: usize) -> Vec<ShiftGen> {
                CommShift(1).basis(n)
            }
            fn degree(&self, b: &ShiftGen) -> i64 {
                CommShift(1).degree(b)
            }
            fn compose(&self, m: usize, x: usize, k: usize, _: &ShiftGen, _: &ShiftGen) -> OperadElement<ShiftGen> {
                OperadElement::basis(m + k - 1, ShiftGen(m + k - 1)).scaled(&sign(x as i64))
            }
            fn act(&self, sigma: &[usize], b: &ShiftGen) -> OperadElement<ShiftGen> {
                CommShift(1).act(sigma, b)
            }
            fn unit(&self) -> ShiftGen {
                ShiftGen(1)
            }
        }
        assert!(matches!(axiom_check(&Bad, 4), Err(OperadError::AxiomViolation { .. })));
    }

    fn leaf_tree(labels: &[usize]) -> Tree {
        Tree::Node(labels.iter().map(|&l| Tree::Leaf(l)).collect())
    }

    #[test]
    fn tree_printing_and_basis() {
        let t = Tree::Node(vec![leaf_tree(&[0, 1]), Tree::Leaf(2)]);
        assert_eq!(t.to_string(), "m2(m2(1,2),3)");
        let o = hoass_operad();
        assert_eq!(o.basis(2).len(), 2);
        assert_eq!(o.basis(3).len(), 3 * 6);
        assert_eq!(o.basis(4).len(), 11 * 24);
    }

    #[test]
    fn free_operad_axioms() {
        axiom_check(&hoass_operad(), 4).unwrap();
        axiom_check(&FreeOperad { gen_degree: |n| n as i64 - 2 }, 4).unwrap();
        axiom_check(&FreeOperad { gen_degree: |_| 0 }, 4).unwrap();
    }

    #[test]
    fn hoass_low_arity() {
        let o = hoass_operad();
        assert!(o.hoass_differential(&o.generator(2), 5).unwrap().is_zero());
        let m2 = o.generator(2);
        let d3 = o.hoass_differential(&o.generator(3), 5).unwrap();
        assert_eq!(d3, gerstenhaber_bracket(&o, &m2, &m2).scaled(&crate::exactla::rat(-1, 2)));
        assert!(!d3.is_zero());
        assert!(matches!(o.hoass_differential(&o.generator(6), 5), Err(OperadError::ArityAboveCap { .. })));
    }

    #[test]
    fn hoass_d_squared() {
        let o = hoass_operad();
        for n in 2..=6 {
            let d = o.hoass_differential(&o.generator(n), 6).unwrap();
            assert!(o.hoass_differential(&d, 6).unwrap().is_zero(), "n={n}");
        }
        for n in 2..=4 {
            for t in o.basis(n) {
                let x = OperadElement::basis(n, t);
                let d = o.hoass_differential(&x, 6).unwrap();
                assert!(o.hoass_differential(&d, 6).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn hocomm_generators_and_ideal() {
        let red = HocommReducer::new();
        for n in 2..=5 {
            assert_eq!(red.generator_space_dim(n), crate::freelie::factorial(n - 1), "n={n}");
        }
        let sym = OperadElement::basis(2, leaf_tree(&[0, 1])).add(&OperadElement::basis(2, leaf_tree(&[1, 0])));
        assert!(red.reduce(&sym).is_zero());
        for n in 2..=5 {
            for g in shuffle_ideal_generators(n) {
                assert!(red.reduce(&g).is_zero());
                assert!(red.differential(&g, 5).unwrap().is_zero(), "n={n}");
            }
        }
        for n in 2..=5 {
            let d = red.differential(&hoass_operad().generator(n), 5).unwrap();
            assert!(red.differential(&d, 5).unwrap().is_zero(), "n={n}");
        }
    }

    #[test]
    fn hocomm_reduction_respects_composition() {
        // the ideal is closed under composition: composites with ideal elements reduce to zero
        let o = hoass_operad();
        let red = HocommReducer::new();
        for g in shuffle_ideal_generators(3) {
            for t in o.basis(2) {
                let tt = OperadElement::basis(2, t);
                for x in 0..3 {
                    assert!(red.reduce(&compose(&o, &g, x, &tt).unwrap()).is_zero());
                }
                for x in 0..2 {
                    assert!(red.reduce(&compose(&o, &tt, x, &g).unwrap()).is_zero());
                }
            }
        }
    }

    #[test]
    fn dk_operad_axioms() {
        let r = dk_axiom_check(4, 2).unwrap();
        assert!(r.checks > 1000);
    }

    #[test]
    fn ce_chains_form_a_comm_module() {
        ce_module_check(4, 2).unwrap();
    }

    #[test]
    fn broken_module_is_detected() {
        // twisting the inclusion by a transposition breaks the nested law
        #[derive(Clone, PartialEq, Debug)]
        struct Twisted(DkElement);
        impl LieFunctorial for Twisted {
            fn map(&self, h: &LieHom) -> Self {
                let y = h.apply(&self.0);
                if h.src < h.dst && h.dst >= 3 {
                    let mut sw: Vec<usize> = (0..h.dst).collect();
                    sw.swap(0, 1);
                    return Twisted(LieHom::push(&SetMap::total(h.dst, &sw), y.weight).apply(&y));
                }
                Twisted(y)
            }
        }
        let res = functorial_axiom_check(|n| if n == 0 { vec![] } else { (0..crate::dk::algebra(n).dim(1)).map(|k| Twisted(DkElement::basis(n, 1, k))).collect() }, 3, 1);
        assert!(matches!(res, Err(OperadError::AxiomViolation { .. })));
    }

    use proptest::prelude::*;

    fn arb_element<O: Operad>(o: &O, n: usize) -> impl Strategy<Value = OperadElement<O::Basis>>
    where
        O::Basis: 'static,
    {
        let basis = o.basis(n);
        let degs: Vec<i64> = basis.iter().map(|b| o.degree(b)).collect();
        let d0 = degs[0];
        let basis: Vec<O::Basis> = basis.into_iter().zip(degs).filter(|(_, d)| *d == d0).map(|(b, _)| b).collect();
        prop::collection::vec(-2i64..3, basis.len()).prop_map(move |cs| {
            let mut e = OperadElement::zero(n);
            for (b, c) in basis.iter().zip(cs) {
                e.add_term(b.clone(), &int(c));
            }
            e
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn assoc_jacobi(a in arb_element(&Assoc, 2), b in arb_element(&Assoc, 2), c in arb_element(&Assoc, 2)) {
            prop_assert!(jacobi_holds(&Assoc, &a, &b, &c));
            prop_assert!(gerstenhaber_bracket(&Assoc, &a, &a).is_zero());
        }

        #[test]
        fn free_jacobi(a in arb_element(&hoass_operad(), 2), b in arb_element(&hoass_operad(), 2), c in arb_element(&hoass_operad(), 2),
                       a3 in arb_element(&Assoc, 3)) {
            let o = hoass_operad();
            prop_assert!(jacobi_holds(&o, &a, &b, &c));
            let mu = OperadElement::basis(2, vec![0usize, 1]);
            prop_assert!(jacobi_holds(&Assoc, &a3, &mu, &mu));
            // graded antisymmetry
            let ab = gerstenhaber_bracket(&o, &a, &b);
            let ba = gerstenhaber_bracket(&o, &b, &a);
            prop_assert_eq!(ab, ba.scaled(&-sign(1)));
        }
    }
}
