//! Sufficient conditions for Markov chains from a factorization.
//!
//! If a joint distribution factors as `f(x_S1) f(x_S2) ... f(x_SK)`, draw an
//! undirected graph with one node per variable and make every scope `S_k` a
//! clique. When deleting the nodes of `G2` disconnects `G1` from `G3`, the
//! chain `X_G1 - X_G2 - X_G3` holds for every distribution of that form.
//!
//! Correctness rests on grouping: let `G1'` be everything reachable from
//! `G1` once `G2` is removed and `G3'` the rest. No factor touches both
//! `G1'` and `G3'`, so the joint splits as `f(x_G1', x_G2) f(x_G2, x_G3')`,
//! which gives `G1' - G2 - G3'` and hence the smaller chain. Plain node
//! deletion followed by breadth-first search is therefore the whole
//! algorithm; no separate closure construction is needed.
//!
//! The test is one-directional. A `NotEstablished` verdict only means the
//! graph does not prove the chain; it may still hold numerically.

pub mod catalog;

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Variables plus the scopes of the factors of a joint distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationSpec {
    variables: Vec<String>,
    factors: Vec<Vec<String>>,
}

impl FactorizationSpec {
    /// Validate an explicit variable list against the factor scopes.
    pub fn new(variables: Vec<String>, factors: Vec<Vec<String>>) -> Result<Self> {
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].contains(v) {
                return Err(Error::DuplicateVariable(v.clone()));
            }
        }
        for (k, scope) in factors.iter().enumerate() {
            if scope.is_empty() {
                return Err(Error::EmptyFactor(k));
            }
            if let Some(v) = scope.iter().find(|v| !variables.contains(v)) {
                return Err(Error::UnknownVariable(v.clone()));
            }
        }
        if let Some(v) = variables
            .iter()
            .find(|v| !factors.iter().any(|s| s.contains(v)))
        {
            return Err(Error::UncoveredVariable(v.clone()));
        }
        Ok(Self { variables, factors })
    }

    /// Variables are taken from the scopes in order of first appearance.
    pub fn from_factors<S: AsRef<str>>(factors: &[Vec<S>]) -> Result<Self> {
        let factors: Vec<Vec<String>> = factors
            .iter()
            .map(|s| s.iter().map(|v| v.as_ref().to_string()).collect())
            .collect();
        let mut variables: Vec<String> = Vec::new();
        for v in factors.iter().flatten() {
            if !variables.contains(v) {
                variables.push(v.clone());
            }
        }
        Self::new(variables, factors)
    }

    /// Parse the text form: one factor per line, names separated by commas
    /// and/or whitespace. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let mut scope = Vec::new();
            let mut col = 0;
            for piece in line.split(',') {
                let start = col + piece.len() - piece.trim_start().len() + 1;
                col += piece.len() + 1;
                let words: Vec<&str> = piece.split_whitespace().collect();
                if words.is_empty() {
                    return Err(Error::FactorSyntax {
                        line: lineno + 1,
                        column: start,
                        message: "empty variable name".into(),
                    });
                }
                for w in words {
                    check_name(w).map_err(|message| Error::FactorSyntax {
                        line: lineno + 1,
                        column: start,
                        message,
                    })?;
                    scope.push(w.to_string());
                }
            }
            factors.push(scope);
        }
        if factors.is_empty() {
            return Err(Error::FactorSyntax {
                line: 1,
                column: 1,
                message: "no factors".into(),
            });
        }
        Self::from_factors(&factors)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn factors(&self) -> &[Vec<String>] {
        &self.factors
    }
}

fn check_name(w: &str) -> std::result::Result<(), String> {
    if w.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
        Ok(())
    } else {
        Err(format!("invalid variable name `{w}`"))
    }
}

/// Three groups `g1 | g2 | g3` asking whether `g1 - g2 - g3` holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationQuery {
    pub g1: Vec<String>,
    pub g2: Vec<String>,
    pub g3: Vec<String>,
}

impl SeparationQuery {
    pub fn new<S: AsRef<str>>(g1: &[S], g2: &[S], g3: &[S]) -> Result<Self> {
        let own = |g: &[S]| g.iter().map(|v| v.as_ref().to_string()).collect::<Vec<_>>();
        let q = Self {
            g1: own(g1),
            g2: own(g2),
            g3: own(g3),
        };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        for (label, g) in [("g1", &self.g1), ("g2", &self.g2), ("g3", &self.g3)] {
            if g.is_empty() {
                return Err(Error::EmptyGroup(label));
            }
        }
        let mut seen: Vec<&String> = Vec::new();
        for v in self.g1.iter().chain(&self.g2).chain(&self.g3) {
            if seen.contains(&v) {
                return Err(Error::OverlappingSets(v.clone()));
            }
            seen.push(v);
        }
        Ok(())
    }

    /// Parse `"a,b | c | d,e"`. Columns in errors are 1-based.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split('|').collect();
        if parts.len() != 3 {
            let column = text
                .char_indices()
                .filter(|(_, c)| *c == '|')
                .nth(2)
                .map_or(text.len() + 1, |(i, _)| i + 1);
            return Err(Error::QuerySyntax {
                column,
                message: format!("expected 3 groups separated by `|`, found {}", parts.len()),
            });
        }
        let mut groups: Vec<Vec<String>> = Vec::with_capacity(3);
        let mut offset = 0;
        for (gi, part) in parts.iter().enumerate() {
            let mut names = Vec::new();
            if part.trim().is_empty() {
                return Err(Error::QuerySyntax {
                    column: offset + 1,
                    message: format!("group {} is empty", gi + 1),
                });
            }
            let mut inner = offset;
            for name in part.split(',') {
                let column = inner + name.len() - name.trim_start().len() + 1;
                inner += name.len() + 1;
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::QuerySyntax {
                        column,
                        message: "empty variable name".into(),
                    });
                }
                if name.contains(char::is_whitespace) {
                    return Err(Error::QuerySyntax {
                        column,
                        message: format!("names must be separated by commas: `{name}`"),
                    });
                }
                check_name(name).map_err(|message| Error::QuerySyntax { column, message })?;
                names.push(name.to_string());
            }
            offset += part.len() + 1;
            groups.push(names);
        }
        let q = Self {
            g3: groups.pop().unwrap_or_default(),
            g2: groups.pop().unwrap_or_default(),
            g1: groups.pop().unwrap_or_default(),
        };
        q.validate()?;
        Ok(q)
    }
}

impl std::fmt::Display for SeparationQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} | {} | {}", self.g1.join(","), self.g2.join(","), self.g3.join(","))
    }
}

/// Undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn has_edge(&self, a: &str, b: &str) -> Result<bool> {
        let (a, b) = (self.node(a)?, self.node(b)?);
        Ok(self.adjacency[a].binary_search(&b).is_ok())
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// One node per variable, each factor scope made into a clique.
pub fn build_graph(spec: &FactorizationSpec) -> Result<Graph> {
    let names = spec.variables.clone();
    let index = |v: &String| {
        names
            .iter()
            .position(|n| n == v)
            .ok_or_else(|| Error::UnknownVariable(v.clone()))
    };
    let mut adjacency = vec![Vec::new(); names.len()];
    for (k, scope) in spec.factors.iter().enumerate() {
        if scope.is_empty() {
            return Err(Error::EmptyFactor(k));
        }
        let ids = scope.iter().map(index).collect::<Result<Vec<_>>>()?;
        for &a in &ids {
            for &b in &ids {
                if a != b {
                    adjacency[a].push(b);
                }
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    Ok(Graph { names, adjacency })
}

/// Breadth-first search from `g1` with `g2` deleted. Returns a path from a
/// `g1` node to a `g3` node when one exists.
fn find_bypass(graph: &Graph, q: &SeparationQuery) -> Result<Option<Vec<usize>>> {
    q.validate()?;
    let resolve = |g: &[String]| g.iter().map(|v| graph.node(v)).collect::<Result<Vec<_>>>();
    let (g1, g2, g3) = (resolve(&q.g1)?, resolve(&q.g2)?, resolve(&q.g3)?);
    let n = graph.names.len();
    let mut blocked = vec![false; n];
    let mut target = vec![false; n];
    g2.iter().for_each(|&v| blocked[v] = true);
    g3.iter().for_each(|&v| target[v] = true);

    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in &g1 {
        seen[s] = true;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        if target[v] {
            let mut path = vec![v];
            let mut cur = v;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Ok(Some(path));
        }
        for &w in &graph.adjacency[v] {
            if !seen[w] && !blocked[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    Ok(None)
}

/// True when every path from `g1` to `g3` passes through `g2`.
pub fn is_separated(graph: &Graph, q: &SeparationQuery) -> Result<bool> {
    Ok(find_bypass(graph, q)?.is_none())
}

/// Outcome of [`verify_chain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Established,
    /// A path from `g1` to `g3` that avoids `g2`.
    NotEstablished { witness: Vec<String> },
}

impl Verdict {
    pub fn is_established(&self) -> bool {
        matches!(self, Verdict::Established)
    }
}

pub fn verify_chain(spec: &FactorizationSpec, q: &SeparationQuery) -> Result<Verdict> {
    let graph = build_graph(spec)?;
    Ok(match find_bypass(&graph, q)? {
        None => Verdict::Established,
        Some(path) => Verdict::NotEstablished {
            witness: path.into_iter().map(|i| graph.names[i].clone()).collect(),
        },
    })
}
