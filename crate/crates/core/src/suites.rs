//! Property suites behind `grtkit check`. Each check yields one row with the number of
//! cases examined and the number of failures.

use serde_json::{json, Value};

use crate::cli::{Report, Suite};
use crate::complexes::{bar_complex, ce_complex, check_d_squared};
use crate::dk::{algebra, check_commutation, DkElement, check_functoriality, check_relations, qualifying_pairs, SetMap};
use crate::grt::{deformation_space, differential_truncated, grt_basis, shuffle_defects, embed_grt, vanishes_on_shuffles, DerivationValue};
use crate::operadkit::{
    axiom_check, ce_module_check, dk_axiom_check, hoass_operad, jacobi_holds, shuffle_ideal_generators, Assoc, Comm, CommShift,
    FreeOperad, HocommReducer, Operad, OperadElement, Tensor,
};

struct Row {
    check: String,
    cases: usize,
    failures: usize,
    detail: String,
}

impl Row {
    fn new(check: impl Into<String>, cases: usize, failures: usize) -> Self {
        Row { check: check.into(), cases, failures, detail: String::new() }
    }

    fn from_result<E: std::fmt::Display>(check: impl Into<String>, r: Result<usize, E>) -> Self {
        match r {
            Ok(n) => Row::new(check, n, 0),
            Err(e) => Row { check: check.into(), cases: 1, failures: 1, detail: e.to_string() },
        }
    }
}

pub fn run_suite(suite: Suite, arity_cap: usize, max_weight: usize, points: usize) -> Report {
    let (name, rows) = match suite {
        Suite::Relations => ("relations", relations(points, max_weight)),
        Suite::Operad => ("operad", operad(arity_cap, max_weight)),
        Suite::Jacobi => ("jacobi", jacobi(arity_cap)),
        Suite::Dsquared => ("dsquared", dsquared(arity_cap, max_weight, points)),
        Suite::Commutation => ("commutation", commutation(points, max_weight)),
        Suite::Shuffles => ("shuffles", shuffles(arity_cap, max_weight)),
    };
    let ok = rows.iter().all(|r| r.failures == 0);
    let rows: Vec<Value> = rows
        .into_iter()
        .map(|r| json!({"suite": name, "check": r.check, "cases": r.cases, "failures": r.failures, "detail": r.detail}))
        .collect();
    Report { command: "check", rows, ok }
}

/// All partial maps [m] -> [n], assignments in lexicographic order.
pub fn all_maps(m: usize, n: usize) -> Vec<SetMap> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|a: Vec<Option<usize>>| {
                std::iter::once(None).chain((0..n).map(Some)).map(move |x| {
                    let mut b = a.clone();
                    b.push(x);
                    b
                })
            })
            .collect();
    }
    out.into_iter().map(|a| SetMap::from_positions(n, a)).collect()
}

fn relations(points: usize, max_weight: usize) -> Vec<Row> {
    let mut rows = Vec::new();
    let (mut cases, mut bad) = (0, 0);
    for m in 1..=points {
        for n in 1..=points {
            for f in all_maps(m, n) {
                cases += 1;
                bad += check_relations(&f);
            }
        }
    }
    rows.push(Row::new("relations preserved by push and pullback", cases, bad));
    let small = points.min(3);
    let (mut cases, mut bad) = (0, 0);
    for s in 1..=small {
        for t in 1..=small {
            for r in 1..=small {
                for f in all_maps(s, t) {
                    for g in all_maps(t, r) {
                        cases += 1;
                        bad += check_functoriality(&f, &g, max_weight);
                    }
                }
            }
        }
    }
    rows.push(Row::new("functoriality of composites", cases, bad));
    rows
}

fn operad(cap: usize, max_weight: usize) -> Vec<Row> {
    let free_cap = cap.min(4);
    vec![
        Row::from_result("comm", axiom_check(&Comm, cap).map(|r| r.checks)),
        Row::from_result("comm{1}", axiom_check(&CommShift(1), cap).map(|r| r.checks)),
        Row::from_result("comm{-1}", axiom_check(&CommShift(-1), cap).map(|r| r.checks)),
        Row::from_result("assoc", axiom_check(&Assoc, cap).map(|r| r.checks)),
        Row::from_result("comm{1} x comm{-1}", axiom_check(&Tensor(CommShift(1), CommShift(-1)), cap).map(|r| r.checks)),
        Row::from_result("hoass", axiom_check(&hoass_operad(), free_cap).map(|r| r.checks)),
        Row::from_result("free, degree 0", axiom_check(&FreeOperad { gen_degree: |_| 0 }, free_cap).map(|r| r.checks)),
        Row::from_result("dk", dk_axiom_check(cap, max_weight).map(|r| r.checks)),
        Row::from_result("ce module", ce_module_check(cap, max_weight).map(|r| r.checks)),
    ]
}

/// Jacobi on all triples of homogeneous basis elements whose brackets stay within the cap.
fn jacobi_on_basis<O: Operad>(o: &O, cap: usize) -> (usize, usize) {
    let (mut cases, mut bad) = (0, 0);
    for a in 2..=cap {
        for b in 2..=cap {
            for c in 2..=cap {
                if a + b + c - 2 > cap {
                    continue;
                }
                let basis = |n| -> Vec<OperadElement<O::Basis>> { o.basis(n).into_iter().map(|x| OperadElement::basis(n, x)).collect() };
                let (ba, bb, bc) = (basis(a), basis(b), basis(c));
                for x in &ba {
                    for y in &bb {
                        for z in &bc {
                            cases += 1;
                            if !jacobi_holds(o, x, y, z) {
                                bad += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    (cases, bad)
}

fn jacobi(cap: usize) -> Vec<Row> {
    let cap = cap.min(5);
    let row = |name: &str, (c, b): (usize, usize)| Row::new(name, c, b);
    vec![
        row("assoc", jacobi_on_basis(&Assoc, cap)),
        row("comm{1}", jacobi_on_basis(&CommShift(1), cap)),
        row("hoass", jacobi_on_basis(&hoass_operad(), cap.min(4))),
    ]
}

fn dsquared(cap: usize, max_weight: usize, points: usize) -> Vec<Row> {
    let mut rows = Vec::new();
    let o = hoass_operad();
    let tree_cap = cap.min(5);
    let (mut cases, mut bad) = (0, 0);
    for n in 2..=tree_cap {
        for t in o.basis(n) {
            cases += 1;
            let d = o.hoass_differential(&OperadElement::basis(n, t), tree_cap).unwrap();
            if !o.hoass_differential(&d, tree_cap).unwrap().is_zero() {
                bad += 1;
            }
        }
    }
    rows.push(Row::new("hoass trees", cases, bad));
    let red = HocommReducer::new();
    let (mut cases, mut bad) = (0, 0);
    for n in 2..=cap.min(6) {
        cases += 1;
        let d = red.differential(&o.generator(n), cap).unwrap();
        if !red.differential(&d, cap).unwrap().is_zero() {
            bad += 1;
        }
    }
    rows.push(Row::new("hocomm generators", cases, bad));
    let (mut cases, mut bad) = (0, 0);
    for n in 1..=points {
        for w in 0..=max_weight {
            for c in [ce_complex(n, w), bar_complex(n, w, i32::MIN)] {
                cases += 1;
                if check_d_squared(&c).is_err() {
                    bad += 1;
                }
            }
        }
    }
    rows.push(Row::new("ce and bar complexes", cases, bad));
    let (mut cases, mut bad) = (0, 0);
    let def_cap = cap.min(5);
    for w in 1..=max_weight {
        for n in 2..=def_cap {
            for j in 0..=w.min(n) {
                for v in deformation_space(n, w, -(j as i64)) {
                    cases += 1;
                    let eta = DerivationValue::single(w, n as i64 - 2 - j as i64, v);
                    let d = differential_truncated(&eta, def_cap);
                    if !differential_truncated(&d, def_cap).is_zero() {
                        bad += 1;
                    }
                }
            }
        }
    }
    rows.push(Row::new("deformation complex", cases, bad));
    rows
}

/// Qualifying pairs with |T| ≤ max_t.
pub fn commutation_violations(max_t: usize, max_weight: usize) -> (usize, usize) {
    let (mut cases, mut bad) = (0, 0);
    for (f, g) in qualifying_pairs(max_t) {
        cases += 1;
        match check_commutation(&f, &g, max_weight) {
            Ok(r) if r.holds => {}
            _ => bad += 1,
        }
    }
    (cases, bad)
}

fn commutation(points: usize, max_weight: usize) -> Vec<Row> {
    let (c, b) = commutation_violations(points, max_weight);
    vec![Row::new("[im f_*, im g^*] = 0", c, b)]
}

fn shuffles(cap: usize, max_weight: usize) -> Vec<Row> {
    let red = HocommReducer::new();
    let (mut cases, mut bad) = (0, 0);
    for n in 2..=cap.min(5) {
        for g in shuffle_ideal_generators(n) {
            cases += 1;
            if !red.reduce(&g).is_zero() || !red.differential(&g, cap.min(5)).unwrap().is_zero() {
                bad += 1;
            }
        }
    }
    let mut rows = vec![Row::new("shuffle ideal of hocomm", cases, bad)];
    let (mut cases, mut bad) = (0, 0);
    for w in 1..=max_weight {
        let mut elements: Vec<DkElement> = (0..algebra(3).dim(w)).map(|k| DkElement::basis(3, w, k)).collect();
        let sols = grt_basis(w);
        for phi in &sols {
            cases += 1;
            if !vanishes_on_shuffles(phi) {
                bad += 1;
            }
        }
        elements.extend(sols);
        // natural shuffles decide the same condition as the full signed shuffle span
        for phi in elements {
            cases += 1;
            let v = embed_grt(&phi).components[&3].clone();
            if shuffle_defects(&v).iter().all(|d| d.is_zero()) != vanishes_on_shuffles(&phi) {
                bad += 1;
            }
        }
    }
    rows.push(Row::new("grt solutions vanish on shuffles", cases, bad));
    rows
}
