//! Shared setting of a finite game: the class, the distribution class, the optional
//! tree order, and level oracles cached per `ε` so that repetitions reuse memo tables.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::critical::LevelContext;
use crate::dims::{eps_dimension, InteractionTree, SearchConfig, TreeKind};
use crate::error::{Error, Result};
use crate::model::{DistributionClass, HypothesisClass, InstanceSpace};
use crate::rational::Rational;

pub struct FiniteEnv {
    pub class: Arc<HypothesisClass>,
    pub u: Arc<DistributionClass>,
    pub order: Option<Arc<InstanceSpace>>,
    pub search: SearchConfig,
    contexts: Mutex<HashMap<Rational, LevelContext>>,
    trees: Mutex<HashMap<TreeKind, Option<InteractionTree>>>,
}

impl FiniteEnv {
    pub fn new(
        class: HypothesisClass,
        u: DistributionClass,
        order: Option<InstanceSpace>,
    ) -> Result<Self> {
        if class.n() != u.n() {
            return Err(Error::input(
                "distribution class and hypothesis class have different point counts",
            ));
        }
        if let Some(o) = &order {
            if o.n() != class.n() {
                return Err(Error::input(
                    "order and hypothesis class have different point counts",
                ));
            }
        }
        Ok(FiniteEnv {
            class: Arc::new(class),
            u: Arc::new(u),
            order: order.map(Arc::new),
            search: SearchConfig::default(),
            contexts: Mutex::new(HashMap::new()),
            trees: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_search(mut self, search: SearchConfig) -> Self {
        self.search = search;
        self
    }

    pub fn n(&self) -> usize {
        self.class.n()
    }

    /// Level oracle for `ε`, created on first use and shared afterwards.
    pub fn level_context(&self, eps: &Rational) -> Result<LevelContext> {
        let mut map = self.contexts.lock().expect("context lock");
        if let Some(ctx) = map.get(eps) {
            return Ok(ctx.clone());
        }
        let ctx = LevelContext::shared(self.class.clone(), self.u.clone(), eps.clone())?;
        map.insert(eps.clone(), ctx.clone());
        Ok(ctx)
    }

    /// Deepest shattered tree of `kind` found by the search, computed once per kind.
    pub fn shattered_tree(&self, kind: &TreeKind) -> Result<Option<InteractionTree>> {
        if let Some(t) = self.trees.lock().expect("tree lock").get(kind) {
            return Ok(t.clone());
        }
        let tree = eps_dimension(&self.class, &self.u, kind, self.search)?.certificate;
        self.trees
            .lock()
            .expect("tree lock")
            .insert(kind.clone(), tree.clone());
        Ok(tree)
    }

    pub fn require_order(&self) -> Result<Arc<InstanceSpace>> {
        self.order.clone().ok_or_else(|| {
            Error::input("this component needs a tree ordering (\"parent\" in the problem)")
        })
    }
}
