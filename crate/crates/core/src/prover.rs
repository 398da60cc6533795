//! Binary-tree certificates for the factorization `F(x) = 𝒰·𝒱·F(x q^S)`.
//!
//! Each row `F_k = H(β_k)` is rewritten by repeatedly applying the two-term
//! recurrence until every leaf is one of the shifted targets `β_j + Sγ`.
//! The leaves of the tree for `β_1` fix the diagonal `𝒱`; the leaves of
//! every other tree then select the ones of its row of `𝒰`.
//!
//! The search returns a certificate with the fewest expansions. Ties are
//! broken by trying coordinates in increasing order, so the result is
//! canonical even where it differs in shape from a hand-written proof.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{MultisumError, ProverError};
use crate::multisum::{eval_h, rec_children, shift_beta, Beta, MultisumProfile};
use crate::series::{Monomial, Series};

/// Default per-root expansion budget.
pub const DEFAULT_MAX_EXPANSIONS: usize = 64;

/// A node `H(β)`, either a leaf or expanded in one coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTree {
    pub beta: Beta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansion: Option<Box<Expansion>>,
}

/// Children of an expanded node. `coordinate` is zero-based; the right edge
/// carries `weight`, the left edge weight 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expansion {
    pub coordinate: usize,
    pub weight: Monomial,
    pub left: ProofTree,
    pub right: ProofTree,
}

impl ProofTree {
    pub fn leaf(beta: Beta) -> Self {
        ProofTree { beta, expansion: None }
    }

    pub fn is_leaf(&self) -> bool {
        self.expansion.is_none()
    }

    /// Number of expanded nodes.
    pub fn expansions(&self) -> usize {
        match &self.expansion {
            None => 0,
            Some(e) => 1 + e.left.expansions() + e.right.expansions(),
        }
    }

    pub fn node_count(&self) -> usize {
        2 * self.expansions() + 1
    }

    /// Visits every node in pre-order with the product of edge weights from
    /// the root.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ProofTree, Monomial)) {
        fn go<'a>(t: &'a ProofTree, acc: Monomial, f: &mut impl FnMut(&'a ProofTree, Monomial)) {
            f(t, acc);
            if let Some(e) = &t.expansion {
                go(&e.left, acc, f);
                go(&e.right, acc.times(e.weight), f);
            }
        }
        go(self, Monomial::ONE, f);
    }

    /// Structural validity: every expansion's children are exactly the
    /// recurrence children of its parameter.
    pub fn check_structure(&self, p: &MultisumProfile) -> Result<bool, MultisumError> {
        let mut ok = true;
        let mut err = None;
        self.walk(&mut |node, _| {
            if let Some(e) = &node.expansion {
                match rec_children(p, &node.beta, e.coordinate) {
                    Ok(rec) => {
                        ok &= rec.left == e.left.beta && rec.right == e.right.beta && rec.weight == e.weight;
                    }
                    Err(x) => err = Some(x),
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(ok),
        }
    }
}

/// `(leaf β, product of edge weights)` for every leaf, left to right.
pub fn leaf_combination(t: &ProofTree) -> Vec<(Beta, Monomial)> {
    let mut out = Vec::new();
    t.walk(&mut |node, w| {
        if node.is_leaf() {
            out.push((node.beta.clone(), w));
        }
    });
    out
}

/// Same multiset, sorted, for order-insensitive comparison.
pub fn leaf_multiset(t: &ProofTree) -> Vec<(Beta, Monomial)> {
    let mut v = leaf_combination(t);
    v.sort();
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Memoized minimum-cost search over the finite lattice of parameters.
    #[default]
    Memoized,
    /// Iterative deepening with branch-and-bound and no table; exponential,
    /// kept as an independent cross-check.
    Plain,
}

struct Search<'a> {
    profile: &'a MultisumProfile,
    targets: &'a BTreeSet<Beta>,
}

impl Search<'_> {
    /// No descendant can reach a target once `β` fails to be below all of them.
    fn pruned(&self, beta: &Beta) -> bool {
        !self.targets.iter().any(|t| beta.le(t))
    }

    /// Recurrence children that make progress (a zero row of α would make
    /// the right child equal to its parent).
    fn moves(&self, beta: &Beta) -> Vec<(usize, Beta, Monomial, Beta)> {
        (0..self.profile.rank())
            .filter_map(|r| rec_children(self.profile, beta, r).ok())
            .filter(|rec| rec.right != *beta)
            .map(|rec| (rec.coord, rec.left, rec.weight, rec.right))
            .collect()
    }
}

struct MemoSearch<'a> {
    base: Search<'a>,
    // minimal expansion count and the chosen coordinate; None = unreachable
    memo: HashMap<Beta, Option<(u64, Option<usize>)>>,
}

impl MemoSearch<'_> {
    fn best(&mut self, beta: &Beta) -> Option<(u64, Option<usize>)> {
        if self.base.targets.contains(beta) {
            return Some((0, None));
        }
        if self.base.pruned(beta) {
            return None;
        }
        if let Some(hit) = self.memo.get(beta) {
            return *hit;
        }
        let mut best: Option<(u64, Option<usize>)> = None;
        for (r, left, _, right) in self.base.moves(beta) {
            let (Some((cl, _)), Some((cr, _))) = (self.best(&left), self.best(&right)) else {
                continue;
            };
            let cost = 1u64.saturating_add(cl).saturating_add(cr);
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, Some(r)));
            }
        }
        self.memo.insert(beta.clone(), best);
        best
    }

    fn build(&self, beta: &Beta, built: &mut HashMap<Beta, ProofTree>) -> ProofTree {
        if let Some(t) = built.get(beta) {
            return t.clone();
        }
        let tree = match self.memo.get(beta).copied().flatten() {
            Some((_, Some(r))) if !self.base.targets.contains(beta) => {
                let rec = rec_children(self.base.profile, beta, r).expect("coordinate chosen by search");
                let left = self.build(&rec.left, built);
                let right = self.build(&rec.right, built);
                ProofTree {
                    beta: beta.clone(),
                    expansion: Some(Box::new(Expansion {
                        coordinate: r,
                        weight: rec.weight,
                        left,
                        right,
                    })),
                }
            }
            _ => ProofTree::leaf(beta.clone()),
        };
        built.insert(beta.clone(), tree.clone());
        tree
    }
}

impl Search<'_> {
    /// Minimal tree with at most `budget` expansions, ties to the lowest
    /// coordinate.
    fn bounded(&self, beta: &Beta, budget: u64) -> Option<(u64, ProofTree)> {
        if self.targets.contains(beta) {
            return Some((0, ProofTree::leaf(beta.clone())));
        }
        if budget == 0 || self.pruned(beta) {
            return None;
        }
        let mut best: Option<(u64, ProofTree)> = None;
        for (r, left, weight, right) in self.moves(beta) {
            let cap = best.as_ref().map_or(budget, |(c, _)| c - 1);
            if cap == 0 {
                break;
            }
            let Some((cl, lt)) = self.bounded(&left, cap - 1) else {
                continue;
            };
            let Some((cr, rt)) = self.bounded(&right, cap - 1 - cl) else {
                continue;
            };
            best = Some((
                1 + cl + cr,
                ProofTree {
                    beta: beta.clone(),
                    expansion: Some(Box::new(Expansion {
                        coordinate: r,
                        weight,
                        left: lt,
                        right: rt,
                    })),
                },
            ));
        }
        best
    }
}

/// Finds a certificate rewriting `H(root)` into the `targets`.
pub fn derive_row(
    p: &MultisumProfile,
    root: &Beta,
    targets: &BTreeSet<Beta>,
    max_expansions: usize,
    mode: SearchMode,
) -> Result<ProofTree, ProverError> {
    if root.rank() != p.rank() {
        return Err(MultisumError::BetaLength {
            got: root.rank(),
            rank: p.rank(),
        }
        .into());
    }
    let exhausted = || ProverError::Exhausted {
        root: root.0.clone(),
        max_expansions,
    };
    let base = Search { profile: p, targets };
    match mode {
        SearchMode::Memoized => {
            let mut s = MemoSearch { base, memo: HashMap::new() };
            match s.best(root) {
                Some((cost, _)) if cost <= max_expansions as u64 => Ok(s.build(root, &mut HashMap::new())),
                _ => Err(exhausted()),
            }
        }
        SearchMode::Plain => (0..=max_expansions as u64)
            .find_map(|budget| base.bounded(root, budget))
            .map(|(_, t)| t)
            .ok_or_else(exhausted),
    }
}

/// The shifted targets `{β + Sγ}` of a β list, deduplicated.
pub fn targets_for(p: &MultisumProfile, shift: u32, betas: &[Beta]) -> Result<BTreeSet<Beta>, MultisumError> {
    betas.iter().map(|b| shift_beta(p, b, shift)).collect()
}

/// A factorization `F(x) = 𝒰·𝒱·F(x q^S)` with its certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationSystem {
    pub profile: MultisumProfile,
    #[serde(rename = "S")]
    pub shift: u32,
    pub betas: Vec<Beta>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<u8>>,
    #[serde(rename = "V")]
    pub v: Vec<Monomial>,
    /// One certificate per distinct β, in order of first appearance.
    pub certificates: Vec<ProofTree>,
}

impl FactorizationSystem {
    pub fn certificate_for(&self, beta: &Beta) -> Option<&ProofTree> {
        self.certificates.iter().find(|t| &t.beta == beta)
    }
}

/// Derives certificates for every distinct β and reads off `𝒰` and `𝒱`.
pub fn assemble_system(
    p: &MultisumProfile,
    shift: u32,
    betas: &[Beta],
    max_expansions: usize,
) -> Result<FactorizationSystem, ProverError> {
    if betas.is_empty() {
        return Err(ProverError::NotFactorizable {
            row: 0,
            reason: "empty beta list".into(),
        });
    }
    let targets = targets_for(p, shift, betas)?;
    let shifted: Vec<Beta> = betas
        .iter()
        .map(|b| shift_beta(p, b, shift))
        .collect::<Result<_, _>>()?;

    let mut certificates: Vec<ProofTree> = Vec::new();
    for b in betas {
        if certificates.iter().all(|t| &t.beta != b) {
            certificates.push(derive_row(p, b, &targets, max_expansions, SearchMode::Memoized)?);
        }
    }

    // indices j grouped by shifted parameter
    let mut groups: BTreeMap<&Beta, Vec<usize>> = BTreeMap::new();
    for (j, t) in shifted.iter().enumerate() {
        groups.entry(t).or_default().push(j);
    }

    let k = betas.len();
    let mut v = vec![Monomial::ONE; k];
    let root_leaves = leaf_combination(&certificates[0]);
    if root_leaves.len() != k {
        return Err(ProverError::NotFactorizable {
            row: 1,
            reason: format!("the first certificate has {} leaves, expected {k}", root_leaves.len()),
        });
    }
    for (t, idx) in &groups {
        let mut monos: Vec<Monomial> = root_leaves
            .iter()
            .filter(|(b, _)| b == *t)
            .map(|(_, m)| *m)
            .collect();
        if monos.len() != idx.len() {
            return Err(ProverError::NotFactorizable {
                row: 1,
                reason: format!("{} leaves at H{t}, but {} rows shift to it", monos.len(), idx.len()),
            });
        }
        monos.sort();
        for (&j, m) in idx.iter().zip(monos) {
            v[j] = m;
        }
    }
    if v[0] != Monomial::ONE {
        return Err(ProverError::NotFactorizable {
            row: 1,
            reason: format!("no weight-1 leaf at H{}", shifted[0]),
        });
    }

    let mut u = vec![vec![0u8; k]; k];
    for (row, b) in betas.iter().enumerate() {
        let cert = certificates.iter().find(|t| &t.beta == b).expect("derived above");
        for (t, m) in leaf_combination(cert) {
            let slot = groups
                .get(&t)
                .and_then(|idx| idx.iter().copied().find(|&j| v[j] == m && u[row][j] == 0));
            match slot {
                Some(j) => u[row][j] = 1,
                None => {
                    return Err(ProverError::NotFactorizable {
                        row: row + 1,
                        reason: format!("leaf {m}·H{t} has no matching diagonal entry"),
                    })
                }
            }
        }
        if u[row][0] != 1 {
            return Err(ProverError::NotFactorizable {
                row: row + 1,
                reason: format!("no weight-1 leaf at H{}", shifted[0]),
            });
        }
    }

    Ok(FactorizationSystem {
        profile: p.clone(),
        shift,
        betas: betas.to_vec(),
        u,
        v,
        certificates,
    })
}

/// Memoized `H(β)` evaluations at fixed truncation orders.
#[derive(Debug)]
pub struct HCache<'a> {
    profile: &'a MultisumProfile,
    x_max: u32,
    q_max: u32,
    table: HashMap<Beta, Series>,
}

impl<'a> HCache<'a> {
    pub fn new(profile: &'a MultisumProfile, x_max: u32, q_max: u32) -> Self {
        HCache {
            profile,
            x_max,
            q_max,
            table: HashMap::new(),
        }
    }

    pub fn get(&mut self, beta: &Beta) -> Result<&Series, MultisumError> {
        if !self.table.contains_key(beta) {
            let s = eval_h(self.profile, beta, self.x_max, self.q_max)?;
            self.table.insert(beta.clone(), s);
        }
        Ok(&self.table[beta])
    }
}

/// Outcome of checking a certificate against series evaluations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateCheck {
    pub structure_ok: bool,
    pub nodes_checked: usize,
    /// Parameters of expanded nodes whose recurrence fails numerically.
    pub node_failures: Vec<Beta>,
    pub telescoped_ok: bool,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.structure_ok && self.node_failures.is_empty() && self.telescoped_ok
    }
}

/// Node-level and telescoped soundness of a certificate.
pub fn check_certificate(
    cache: &mut HCache<'_>,
    tree: &ProofTree,
) -> Result<CertificateCheck, MultisumError> {
    let structure_ok = tree.check_structure(cache.profile)?;
    let mut nodes = Vec::new();
    tree.walk(&mut |node, _| {
        if let Some(e) = &node.expansion {
            nodes.push((node.beta.clone(), e.weight, e.left.beta.clone(), e.right.beta.clone()));
        }
    });
    nodes.sort();
    nodes.dedup();
    let mut node_failures = Vec::new();
    for (b, w, l, r) in &nodes {
        let lhs = cache.get(b)?.clone();
        let left = cache.get(l)?.clone();
        let right = cache.get(r)?.mul_monomial(*w);
        if !lhs.eq_upto(&(&left + &right)) {
            node_failures.push(b.clone());
        }
    }
    let lhs = cache.get(&tree.beta)?.clone();
    let mut rhs = Series::zero(cache.x_max, cache.q_max);
    for (b, m) in leaf_combination(tree) {
        rhs = &rhs + &cache.get(&b)?.mul_monomial(m);
    }
    Ok(CertificateCheck {
        structure_ok,
        nodes_checked: nodes.len(),
        node_failures,
        telescoped_ok: lhs.eq_upto(&rhs),
    })
}

/// Precomputed `H(β_k)` and `H(β_k)(x q^S)` for checking candidate
/// `(𝒰, 𝒱)` pairs without re-evaluating the multisums.
#[derive(Debug, Clone)]
pub struct FactorizationCheck {
    lhs: Vec<Series>,
    shifted: Vec<Series>,
}

impl FactorizationCheck {
    pub fn new(
        p: &MultisumProfile,
        shift: u32,
        betas: &[Beta],
        x_max: u32,
        q_max: u32,
    ) -> Result<Self, MultisumError> {
        let mut cache = HCache::new(p, x_max, q_max);
        let mut lhs = Vec::with_capacity(betas.len());
        for b in betas {
            lhs.push(cache.get(b)?.clone());
        }
        let shifted = lhs.iter().map(|s| s.shift_x(shift)).collect();
        Ok(FactorizationCheck { lhs, shifted })
    }

    /// `Σ_j 𝒰_{k,j} 𝒱_j F_j(x q^S)`.
    pub fn row_rhs(&self, u_row: &[u8], v: &[Monomial]) -> Series {
        let zero = Series::zero(self.lhs[0].x_max(), self.lhs[0].q_max());
        u_row
            .iter()
            .zip(v)
            .zip(&self.shifted)
            .filter(|((&u, _), _)| u != 0)
            .fold(zero, |acc, ((&u, &m), s)| &acc + &s.mul_monomial(m).scale(&u.into()))
    }

    /// Rows (0-based) where the identity fails.
    pub fn failing_rows(&self, u: &[Vec<u8>], v: &[Monomial]) -> Vec<usize> {
        if u.len() != self.lhs.len() || v.len() != self.lhs.len() {
            return (0..self.lhs.len()).collect();
        }
        (0..self.lhs.len())
            .filter(|&k| u[k].len() != v.len() || !self.lhs[k].eq_upto(&self.row_rhs(&u[k], v)))
            .collect()
    }

    /// Row `k` of the identity alone.
    pub fn row_holds(&self, k: usize, u_row: &[u8], v: &[Monomial]) -> bool {
        u_row.len() == self.lhs.len()
            && v.len() == self.lhs.len()
            && self.lhs[k].eq_upto(&self.row_rhs(u_row, v))
    }

    pub fn holds(&self, u: &[Vec<u8>], v: &[Monomial]) -> bool {
        u.len() == self.lhs.len() && (0..self.lhs.len()).all(|k| self.row_holds(k, &u[k], v))
    }

    pub fn lhs(&self) -> &[Series] {
        &self.lhs
    }
}

/// Checks `H(β_k) = Σ_j 𝒰_{k,j} 𝒱_j H(β_j)(x q^S)` for every row, using no
/// certificate.
pub fn verify_numeric(sys: &FactorizationSystem, x_max: u32, q_max: u32) -> Result<bool, MultisumError> {
    Ok(FactorizationCheck::new(&sys.profile, sys.shift, &sys.betas, x_max, q_max)?.holds(&sys.u, &sys.v))
}

/// Input system file: `{"profile": {...}, "S": 3, "betas": [[1,3], ...]}`,
/// optionally carrying a candidate `U` and `V` to verify.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemSpec {
    pub profile: MultisumProfile,
    #[serde(rename = "S")]
    pub shift: u32,
    pub betas: Vec<Beta>,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Vec<u8>>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Monomial>>,
}
