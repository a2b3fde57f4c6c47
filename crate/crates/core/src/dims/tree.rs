use fixedbitset::FixedBitSet;
use num_traits::Signed;
#[cfg(test)]
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Distribution, HypothesisClass, PointSet};
use crate::rational::{self, int, Rational};

/// Which shattering conditions a tree must satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TreeKind {
    Plain(Rational),
    StrictEta(Rational, Rational),
    Relaxed(Rational),
    Region(Rational),
}

impl TreeKind {
    pub fn eps(&self) -> &Rational {
        match self {
            TreeKind::Plain(e)
            | TreeKind::StrictEta(e, _)
            | TreeKind::Relaxed(e)
            | TreeKind::Region(e) => e,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TreeKind::Plain(_) => "plain",
            TreeKind::StrictEta(..) => "strict_eta",
            TreeKind::Relaxed(_) => "relaxed",
            TreeKind::Region(_) => "region",
        }
    }

    pub fn parse(name: &str, eps: Rational, eta: Option<Rational>) -> Result<Self> {
        match name {
            "plain" => Ok(TreeKind::Plain(eps)),
            "relaxed" => Ok(TreeKind::Relaxed(eps)),
            "region" => Ok(TreeKind::Region(eps)),
            "strict_eta" | "strict-eta" | "eta" => {
                let eta = eta.ok_or_else(|| Error::input("strict_eta trees need an eta"))?;
                Ok(TreeKind::StrictEta(eps, eta))
            }
            other => Err(Error::input(format!("unknown tree kind {other:?}"))),
        }
    }
}

/// Inner node of an interaction tree in heap order: the children of node `i` are
/// `2i+1` (label 0) and `2i+2` (label 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    /// Index into the tree's distribution pool.
    pub mu: usize,
    /// Left edge function; the node function for relaxed trees.
    pub f0: usize,
    /// Right edge function; present only on the last layer of relaxed trees.
    pub f1: Option<usize>,
    /// Restriction region for region trees.
    pub region: Option<PointSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionTree {
    pub depth: usize,
    pub pool: Vec<Distribution>,
    pub nodes: Vec<TreeNode>,
}

impl InteractionTree {
    pub fn empty() -> Self {
        InteractionTree {
            depth: 0,
            pool: Vec::new(),
            nodes: Vec::new(),
        }
    }

    /// Heap index of every node of the last inner layer.
    pub fn last_layer(&self) -> std::ops::Range<usize> {
        if self.depth == 0 {
            0..0
        } else {
            (1 << (self.depth - 1)) - 1..(1 << self.depth) - 1
        }
    }

    fn is_last_layer(&self, i: usize) -> bool {
        self.last_layer().contains(&i)
    }

    /// Functions on the leaf edges of the subtree rooted at node `i`.
    pub fn leaf_functions(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            if v >= self.nodes.len() {
                continue;
            }
            if self.is_last_layer(v) {
                out.push(self.nodes[v].f0);
                out.extend(self.nodes[v].f1);
            } else {
                stack.push(2 * v + 2);
                stack.push(2 * v + 1);
            }
        }
        out
    }

    /// Every distinct function used anywhere in the tree.
    pub fn functions(&self) -> Vec<usize> {
        let mut fs: Vec<usize> = self
            .nodes
            .iter()
            .flat_map(|n| std::iter::once(n.f0).chain(n.f1))
            .collect();
        fs.sort_unstable();
        fs.dedup();
        fs
    }

    fn check_shape(&self, class: &HypothesisClass, kind: &TreeKind) -> Result<()> {
        let bad = |msg: String| Err(Error::Malformed(msg));
        if self.depth >= usize::BITS as usize - 1 {
            return bad(format!("depth {} is too large", self.depth));
        }
        let want = (1usize << self.depth) - 1;
        if self.nodes.len() != want {
            return bad(format!(
                "depth {} needs {want} nodes, found {}",
                self.depth,
                self.nodes.len()
            ));
        }
        for (i, d) in self.pool.iter().enumerate() {
            if d.n() != class.n() {
                return bad(format!(
                    "pool entry {i} has {} points, class has {}",
                    d.n(),
                    class.n()
                ));
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.mu >= self.pool.len() {
                return bad(format!(
                    "node {i} uses pool entry {} of {}",
                    node.mu,
                    self.pool.len()
                ));
            }
            for f in std::iter::once(node.f0).chain(node.f1) {
                if f >= class.m() {
                    return bad(format!("node {i} uses function {f} of {}", class.m()));
                }
            }
            let relaxed = matches!(kind, TreeKind::Relaxed(_));
            match (relaxed, self.is_last_layer(i), node.f1.is_some()) {
                (false, _, false) => return bad(format!("node {i} lacks its right edge function")),
                (true, true, false) => {
                    return bad(format!("last-layer node {i} lacks its right function"))
                }
                (true, false, true) => {
                    return bad(format!(
                        "inner node {i} of a relaxed tree carries a right function"
                    ))
                }
                _ => {}
            }
            match (matches!(kind, TreeKind::Region(_)), &node.region) {
                (true, None) => return bad(format!("node {i} lacks its region")),
                (true, Some(r)) if r.len() != class.n() => {
                    return bad(format!("node {i} region has the wrong size"))
                }
                (false, Some(_)) => {
                    return bad(format!("node {i} carries a region outside a region tree"))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn mass_on(
    mu: &Distribution,
    class: &HypothesisClass,
    f: usize,
    g: usize,
    region: Option<&PointSet>,
) -> Rational {
    let mut d = class.pair_disagreement(f, g);
    if let Some(r) = region {
        d.intersect_with(r);
    }
    mu.mass_of(&d)
}

/// Checks every shattering condition of `kind` exactly. Malformed trees are an error,
/// distinct from a well-formed tree that fails a condition.
pub fn validate_tree_certificate(
    tree: &InteractionTree,
    class: &HypothesisClass,
    kind: &TreeKind,
) -> Result<bool> {
    let eps = kind.eps();
    if !eps.is_positive() {
        return Err(Error::input("epsilon must be positive"));
    }
    if let TreeKind::StrictEta(e, eta) = kind {
        if !eta.is_positive() || eta * int(3) > *e {
            return Err(Error::input("eta must lie in (0, eps/3]"));
        }
    }
    tree.check_shape(class, kind)?;
    let third = eps / int(3);
    Ok(match kind {
        TreeKind::Plain(_) => edge_conditions(tree, class, eps, &third),
        TreeKind::StrictEta(_, eta) => edge_conditions(tree, class, eps, eta),
        TreeKind::Region(_) => edge_conditions(tree, class, eps, &third),
        TreeKind::Relaxed(_) => relaxed_conditions(tree, class, &third),
    })
}

fn edge_conditions(
    tree: &InteractionTree,
    class: &HypothesisClass,
    eps: &Rational,
    tol: &Rational,
) -> bool {
    for (i, node) in tree.nodes.iter().enumerate() {
        let mu = &tree.pool[node.mu];
        let f1 = node.f1.expect("checked shape");
        if &mass_on(mu, class, node.f0, f1, node.region.as_ref()) < eps {
            return false;
        }
        let mut child = i;
        while child > 0 {
            let w = (child - 1) / 2;
            let wnode = &tree.nodes[w];
            let g = if child == 2 * w + 1 {
                wnode.f0
            } else {
                wnode.f1.expect("checked shape")
            };
            let wmu = &tree.pool[wnode.mu];
            for f in [node.f0, f1] {
                if &mass_on(wmu, class, f, g, wnode.region.as_ref()) > tol {
                    return false;
                }
            }
            child = w;
        }
    }
    true
}

fn relaxed_conditions(tree: &InteractionTree, class: &HypothesisClass, third: &Rational) -> bool {
    let two_thirds = third * int(2);
    for (i, node) in tree.nodes.iter().enumerate() {
        let mu = &tree.pool[node.mu];
        let (left, right) = if tree.is_last_layer(i) {
            (vec![node.f0], vec![node.f1.expect("checked shape")])
        } else {
            (
                tree.leaf_functions(2 * i + 1),
                tree.leaf_functions(2 * i + 2),
            )
        };
        if left
            .iter()
            .any(|&f| &mu.disagreement(class, node.f0, f) > third)
        {
            return false;
        }
        if right
            .iter()
            .any(|&f| mu.disagreement(class, node.f0, f) < two_thirds)
        {
            return false;
        }
    }
    true
}

/// Self-contained certificate: the class, the tree and the kind it claims.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub class: HypothesisClass,
    pub tree: InteractionTree,
    pub kind: TreeKind,
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    mu: usize,
    f0: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    f1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    region: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    kind: String,
    eps: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    eta: Option<String>,
    n: usize,
    depth: usize,
    functions: Vec<Vec<u8>>,
    pool: Vec<Vec<String>>,
    nodes: Vec<NodeJson>,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        let eta = match &self.kind {
            TreeKind::StrictEta(_, eta) => Some(rational::format_rational(eta)),
            _ => None,
        };
        let doc = CertificateJson {
            kind: self.kind.name().to_string(),
            eps: rational::format_rational(self.kind.eps()),
            eta,
            n: self.class.n(),
            depth: self.tree.depth,
            functions: self
                .class
                .to_matrix()
                .into_iter()
                .map(|r| r.into_iter().map(u8::from).collect())
                .collect(),
            pool: self
                .tree
                .pool
                .iter()
                .map(|d| d.masses().iter().map(rational::format_rational).collect())
                .collect(),
            nodes: self
                .tree
                .nodes
                .iter()
                .map(|n| NodeJson {
                    mu: n.mu,
                    f0: n.f0,
                    f1: n.f1,
                    region: n.region.as_ref().map(|r| r.ones().collect()),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("certificate serializes")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let doc: CertificateJson = serde_json::from_value(value)?;
        let matrix: Vec<Vec<bool>> = doc
            .functions
            .iter()
            .map(|r| {
                if r.len() != doc.n || r.iter().any(|&b| b > 1) {
                    Err(Error::input(
                        "certificate function rows must be 0/1 vectors of length n",
                    ))
                } else {
                    Ok(r.iter().map(|&b| b == 1).collect())
                }
            })
            .collect::<Result<_>>()?;
        let class = HypothesisClass::from_matrix(&matrix)?;
        let pool = doc
            .pool
            .iter()
            .map(|v| {
                Distribution::new(
                    v.iter()
                        .map(|s| rational::parse_rational(s))
                        .collect::<Result<_>>()?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let nodes = doc
            .nodes
            .into_iter()
            .map(|n| {
                let region = match n.region {
                    None => None,
                    Some(pts) => {
                        if pts.iter().any(|&x| x >= doc.n) {
                            return Err(Error::Malformed("region point out of range".into()));
                        }
                        let mut r = FixedBitSet::with_capacity(doc.n);
                        r.extend(pts);
                        Some(r)
                    }
                };
                Ok(TreeNode {
                    mu: n.mu,
                    f0: n.f0,
                    f1: n.f1,
                    region,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let eps = rational::parse_rational(&doc.eps)?;
        let eta = doc
            .eta
            .as_deref()
            .map(rational::parse_rational)
            .transpose()?;
        let kind = TreeKind::parse(&doc.kind, eps, eta)?;
        Ok(Certificate {
            class,
            tree: InteractionTree {
                depth: doc.depth,
                pool,
                nodes,
            },
            kind,
        })
    }

    pub fn validate(&self) -> Result<bool> {
        validate_tree_certificate(&self.tree, &self.class, &self.kind)
    }
}

/// Maps a plain tree to a relaxed one by keeping the left edge function as the node
/// function on inner layers.
pub fn plain_to_relaxed(tree: &InteractionTree) -> InteractionTree {
    let last = tree.last_layer();
    let nodes = tree
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| TreeNode {
            mu: n.mu,
            f0: n.f0,
            f1: if last.contains(&i) { n.f1 } else { None },
            region: None,
        })
        .collect();
    InteractionTree {
        depth: tree.depth,
        pool: tree.pool.clone(),
        nodes,
    }
}

/// Region covering every point.
pub fn full_region(n: usize) -> PointSet {
    let mut r = FixedBitSet::with_capacity(n);
    r.insert_range(..);
    r
}
