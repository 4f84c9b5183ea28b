//! Order conditions of plain splitting compositions `Π exp(c_k h X_k)`, `X ∈ {A, B}`,
//! checked with a truncated Baker–Campbell–Hausdorff expansion in the free algebra.

use std::collections::BTreeMap;

/// Letter of the two-generator free algebra. `A` drifts the links, `B` kicks the momenta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
}

type Series = BTreeMap<Vec<Letter>, f64>;

fn mul(a: &Series, b: &Series, max_degree: usize) -> Series {
    let mut out = Series::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > max_degree {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            *out.entry(w).or_insert(0.0) += ca * cb;
        }
    }
    out
}

fn add_scaled(acc: &mut Series, s: &Series, k: f64) {
    for (w, c) in s {
        *acc.entry(w.clone()).or_insert(0.0) += k * c;
    }
}

fn exp_letter(letter: Letter, c: f64, max_degree: usize) -> Series {
    let mut s = Series::new();
    s.insert(vec![], 1.0);
    let mut term = 1.0;
    for k in 1..=max_degree {
        term *= c / k as f64;
        s.insert(vec![letter; k], term);
    }
    s
}

/// `log Π_k exp(c_k X_k)` truncated at `max_degree`, as word coefficients.
pub fn composition_log(stages: &[(Letter, f64)], max_degree: usize) -> BTreeMap<Vec<Letter>, f64> {
    let mut prod = Series::new();
    prod.insert(vec![], 1.0);
    for &(l, c) in stages {
        prod = mul(&prod, &exp_letter(l, c, max_degree), max_degree);
    }
    // log(1 + Y) = Y − Y²/2 + Y³/3 − …
    let mut y = prod;
    y.remove(&Vec::new());
    let mut out = Series::new();
    let mut power = y.clone();
    for k in 1..=max_degree {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        add_scaled(&mut out, &power, sign / k as f64);
        power = mul(&power, &y, max_degree);
    }
    out.retain(|_, c| *c != 0.0);
    out
}

/// Largest deviation of the composition's logarithm from `A + B` over all words
/// of length `≤ max_degree`.
pub fn order_defect(stages: &[(Letter, f64)], max_degree: usize) -> f64 {
    let log = composition_log(stages, max_degree);
    let mut defect: f64 = 0.0;
    for (w, c) in &log {
        let target = if w.len() == 1 { 1.0 } else { 0.0 };
        defect = defect.max((c - target).abs());
    }
    for l in [Letter::A, Letter::B] {
        if !log.contains_key(&vec![l]) {
            defect = defect.max(1.0);
        }
    }
    defect
}
