//! Factorizations behind the graphical chain proofs of the coding theorems,
//! instantiated at block length 3 with the time index at position 2.
//!
//! Naming: `x1` is the past `X^{i-1}`, `x2` the present `X_i`, `x3` the
//! future `X_{i+1}^n`; likewise for `y` and `z`. `t1` is the helper message
//! (a function of `y1,y2,y3`), `t2`/`t3` the user messages, and `t` the
//! encoder message in the one-sided setting.

use super::{FactorizationSpec, SeparationQuery};

/// A named factorization together with the chain its graph should establish.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub spec: FactorizationSpec,
    pub query: SeparationQuery,
}

fn entry(name: &'static str, factors: Vec<Vec<&str>>, query: &str) -> CatalogEntry {
    CatalogEntry {
        name,
        spec: FactorizationSpec::from_factors(&factors).expect("catalog factorization is valid"),
        query: SeparationQuery::parse(query).expect("catalog query is valid"),
    }
}

const IDX: [&str; 3] = ["1", "2", "3"];

fn var(prefix: &str, j: usize) -> String {
    format!("{prefix}{}", IDX[j])
}

fn leak(s: String) -> &'static str {
    Box::leak(s.into_boxed_str())
}

/// Per-index factors `{a_j, b_j}` and `{c_j, b_j}` for j = 1..3.
fn per_index(pair: (&str, &str), child: (&str, &str)) -> Vec<Vec<&'static str>> {
    (0..3)
        .flat_map(|j| {
            [
                vec![leak(var(pair.0, j)), leak(var(pair.1, j))],
                vec![leak(var(child.0, j)), leak(var(child.1, j))],
            ]
        })
        .collect()
}

/// Helper message over the whole `y` block.
fn helper_factor() -> Vec<&'static str> {
    vec!["t1", "y1", "y2", "y3"]
}

/// Pair-wise source `p(x,z) p(y|z)` per index, as in the helper problem
/// whose side information forms `Y - Z - X`.
fn yzx_block() -> Vec<Vec<&'static str>> {
    let mut f = per_index(("x", "z"), ("y", "z"));
    f.push(helper_factor());
    f
}

/// Pair-wise source `p(x,z) p(y|x)` per index, the `Y - X - Z` setting.
fn yxz_block() -> Vec<Vec<&'static str>> {
    let mut f = per_index(("x", "z"), ("y", "x"));
    f.push(helper_factor());
    f
}

/// Two-block example `p(x1,y2) p(y1,x2) p(z1|x1,x2) p(z2|y1)`.
pub fn two_block_example() -> FactorizationSpec {
    FactorizationSpec::from_factors(&[
        vec!["x1", "y2"],
        vec!["y1", "x2"],
        vec!["z1", "x1", "x2"],
        vec!["z2", "y1"],
    ])
    .expect("valid")
}

/// The eleven factorization/chain pairs used by the converse arguments.
pub fn proof_chains() -> Vec<CatalogEntry> {
    let mut out = vec![CatalogEntry {
        name: "two_block_example",
        spec: two_block_example(),
        query: SeparationQuery::parse("x1 | x2 | z2").expect("valid"),
    }];
    out.push(entry(
        "helper_reconstruction_w_xu_z",
        vec![vec!["x", "y"], vec!["z", "x"], vec!["u", "y"], vec!["w", "u", "x", "y"]],
        "w | x,u | z",
    ));
    out.push(entry(
        "twoway_reconstruction_w_xuv_z",
        vec![
            vec!["x", "y"],
            vec!["z", "x"],
            vec!["u", "y"],
            vec!["v", "u", "z"],
            vec!["w", "u", "v", "x", "y"],
        ],
        "w | x,u,v | z",
    ));
    out.push(entry(
        "yzx_helper_present_y",
        yzx_block(),
        "y2 | y1,t1,x2,x3 | x1,z1",
    ));
    out.push(entry(
        "yzx_encoder_past_x",
        yzx_block(),
        "x1 | z1,t1,x2,x3 | z2,y2",
    ));
    let mut with_t = yzx_block();
    with_t.push(vec!["t", "x1", "x2", "x3", "t1"]);
    out.push(entry(
        "yzx_future_side_info",
        with_t,
        "x2 | x3,t1,z1,z2,t | z3",
    ));
    let mut with_t2 = yxz_block();
    with_t2.push(vec!["t2", "z1", "z2", "z3", "t1"]);
    out.push(entry(
        "twoway_rate_r3_past_z",
        with_t2.clone(),
        "x2 | x1,z2,z3,t1,t2 | z1",
    ));
    out.push(entry(
        "twoway_aux_v_past_z",
        yxz_block(),
        "z1 | t1,x1,z2,z3 | y2,x2",
    ));
    out.push(entry(
        "twoway_aux_w_future_x",
        with_t2.clone(),
        "x3 | t1,t2,x1,x2,z3,y2 | z1,z2",
    ));
    out.push(entry(
        "twoway_xhat_past_z",
        with_t2,
        "z1 | t1,t2,x1,z2,z3 | x2",
    ));
    let mut with_t3 = yxz_block();
    with_t3.push(vec!["t3", "x1", "x2", "x3", "t1"]);
    out.push(entry(
        "twoway_zhat_future_x",
        with_t3,
        "z2 | x1,t1,z3,t3,x2 | x3",
    ));
    out
}

/// The factorization printed beside the future-`X` chain, which pairs
/// `(x_j, y_j)` and hangs `z_j` on `y_j`. It contradicts the `Y - X - Z`
/// source of that setting and its graph does not separate the query.
pub fn future_x_as_printed() -> CatalogEntry {
    let mut f = per_index(("x", "y"), ("z", "y"));
    f.push(helper_factor());
    f.push(vec!["t2", "z1", "z2", "z3", "t1"]);
    entry("twoway_aux_w_future_x_as_printed", f, "x3 | t1,t2,x1,x2,z3,y2 | z1,z2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::verify_chain;

    #[test]
    fn every_proof_chain_is_established() {
        let all = proof_chains();
        assert_eq!(all.len(), 11);
        for e in &all {
            let v = verify_chain(&e.spec, &e.query).unwrap();
            assert!(v.is_established(), "{}: {:?}", e.name, v);
        }
    }

    #[test]
    fn printed_future_x_factorization_is_not_separated() {
        let e = future_x_as_printed();
        assert!(!verify_chain(&e.spec, &e.query).unwrap().is_established());
    }
}
