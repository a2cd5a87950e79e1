use crate::concept::{Concept, IndividualName, RoleName};
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use im::{OrdMap, OrdSet, Vector};

pub type NodeId = usize;

/// Branch points a fact depends on, identified by creation order.
pub type Deps = BTreeSet<u32>;

#[derive(Debug, Clone)]
struct Node {
    name: Option<IndividualName>,
    label: BTreeMap<Concept, Deps>,
    /// Tree parent of a generated node.
    parent: Option<NodeId>,
    /// Dependencies of the node's existence.
    deps: Deps,
    alive: bool,
    has_children: bool,
    /// Order-independent hash of the label keys.
    fingerprint: u64,
}

fn concept_hash(c: &Concept) -> u64 {
    let mut h = DefaultHasher::new();
    c.hash(&mut h);
    h.finish()
}

/// Consumers of the record of changed nodes. A node absent from an agenda
/// has nothing pending for that consumer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agenda {
    /// Deterministic rules.
    Saturate,
    /// Branching and generating rules.
    Expand,
    /// Clash detection.
    Check,
}

/// Blocking status of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Blocking {
    Open,
    /// Label equals the label of a generated ancestor.
    Direct(NodeId),
    /// Some generated ancestor is directly blocked.
    Indirect,
}

/// Why a completion graph is contradictory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clash {
    Bottom(NodeId),
    Complement(NodeId, Concept),
    /// `(≤ n R)` with more than `n` pairwise distinct `R`-successors.
    TooManySuccessors(NodeId, u32, RoleName),
    /// `(≥ m R)`, or `(∃ R C)` with `m = 1`, and `(≤ n R)` with `m > n`
    /// in one label.
    CardinalityBounds(NodeId, RoleName),
}

impl Clash {
    pub fn node(&self) -> NodeId {
        match self {
            Clash::Bottom(n)
            | Clash::Complement(n, _)
            | Clash::TooManySuccessors(n, ..)
            | Clash::CardinalityBounds(n, _) => *n,
        }
    }
}

/// Working state of the tableau: named individuals plus generated nodes,
/// their concept labels, role edges and the explicit inequality relation.
///
/// Every label entry, edge and inequality carries the branch points it was
/// derived from. Named individuals are pairwise distinct implicitly (unique
/// names).
///
/// All state lives in persistent collections, so cloning is cheap and
/// clones share structure until written.
#[derive(Debug, Clone, Default)]
pub struct CompletionGraph {
    nodes: Vector<Arc<Node>>,
    succ: Vector<Arc<BTreeMap<(RoleName, NodeId), Deps>>>,
    distinct: OrdMap<(NodeId, NodeId), Deps>,
    named: OrdMap<IndividualName, NodeId>,
    generated: usize,
    agendas: [OrdSet<NodeId>; 3],
    /// Blocked nodes with nothing else pending. They can only become
    /// unblocked when a node with children changes its label.
    parked: OrdSet<NodeId>,
}

fn union(a: &Deps, b: &Deps) -> Deps {
    a.union(b).copied().collect()
}

impl CompletionGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Node for `name`, created on first use.
    pub fn named(&mut self, name: &IndividualName) -> NodeId {
        if let Some(&id) = self.named.get(name) {
            return id;
        }
        let id = self.push(Node {
            name: Some(name.clone()),
            label: BTreeMap::new(),
            parent: None,
            deps: Deps::new(),
            alive: true,
            has_children: false,
            fingerprint: 0,
        });
        self.named.insert(name.clone(), id);
        id
    }

    pub fn lookup(&self, name: &IndividualName) -> Option<NodeId> {
        self.named.get(name).copied()
    }

    pub fn add_generated(&mut self, parent: NodeId) -> NodeId {
        self.add_generated_with(parent, &Deps::new())
    }

    pub fn add_generated_with(&mut self, parent: NodeId, deps: &Deps) -> NodeId {
        self.generated += 1;
        if !self.nodes[parent].has_children {
            Arc::make_mut(&mut self.nodes[parent]).has_children = true;
        }
        self.push(Node {
            name: None,
            label: BTreeMap::new(),
            parent: Some(parent),
            deps: deps.clone(),
            alive: true,
            has_children: false,
            fingerprint: 0,
        })
    }

    fn push(&mut self, node: Node) -> NodeId {
        self.nodes.push_back(Arc::new(node));
        self.succ.push_back(Arc::default());
        let id = self.nodes.len() - 1;
        self.touch(id);
        id
    }

    fn touch(&mut self, n: NodeId) {
        for agenda in &mut self.agendas {
            agenda.insert(n);
        }
    }

    fn touch_all(&mut self) {
        let live: Vec<NodeId> = self.nodes().collect();
        for agenda in &mut self.agendas {
            agenda.extend(live.iter().copied());
        }
        self.parked.clear();
    }

    fn unpark(&mut self) {
        for n in std::mem::take(&mut self.parked) {
            self.agendas[Agenda::Saturate as usize].insert(n);
            self.agendas[Agenda::Expand as usize].insert(n);
        }
    }

    /// Moves `n` off the rule agendas until a label change could unblock it.
    pub fn park(&mut self, n: NodeId) {
        self.agendas[Agenda::Saturate as usize].remove(&n);
        self.agendas[Agenda::Expand as usize].remove(&n);
        self.parked.insert(n);
    }

    /// Live nodes on `agenda`, in creation order.
    pub fn agenda(&self, agenda: Agenda) -> Vec<NodeId> {
        self.agendas[agenda as usize].iter().copied().filter(|&n| self.is_alive(n)).collect()
    }

    /// Removes `nodes` from `agenda`.
    pub fn settle(&mut self, agenda: Agenda, nodes: &[NodeId]) {
        for n in nodes {
            self.agendas[agenda as usize].remove(n);
        }
    }

    /// Creates `count` pairwise distinct `role`-successors of `parent`.
    pub fn add_successors_with(&mut self, parent: NodeId, role: &RoleName, count: u32, deps: &Deps) -> Vec<NodeId> {
        let fresh: Vec<NodeId> = (0..count).map(|_| self.add_generated_with(parent, deps)).collect();
        for (i, &a) in fresh.iter().enumerate() {
            for &b in &fresh[i + 1..] {
                self.distinct.insert(ordered(a, b), deps.clone());
            }
        }
        for &a in &fresh {
            self.add_edge_with(parent, role.clone(), a, deps);
        }
        fresh
    }

    /// Generated nodes created on this branch, including merged-away ones.
    pub fn generated_count(&self) -> usize {
        self.generated
    }

    /// Live nodes in creation order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&n| self.nodes[n].alive)
    }

    pub fn is_alive(&self, n: NodeId) -> bool {
        self.nodes[n].alive
    }

    pub fn name(&self, n: NodeId) -> Option<&IndividualName> {
        self.nodes[n].name.as_ref()
    }

    pub fn is_named(&self, n: NodeId) -> bool {
        self.nodes[n].name.is_some()
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.nodes[n].parent
    }

    pub fn node_deps(&self, n: NodeId) -> &Deps {
        &self.nodes[n].deps
    }

    pub fn label(&self, n: NodeId) -> impl Iterator<Item = &Concept> + '_ {
        self.nodes[n].label.keys()
    }

    pub fn has(&self, n: NodeId, c: &Concept) -> bool {
        self.nodes[n].label.contains_key(c)
    }

    /// Dependencies of `c` in the label of `n`, if present.
    pub fn deps(&self, n: NodeId, c: &Concept) -> Option<&Deps> {
        self.nodes[n].label.get(c)
    }

    pub fn add_concept(&mut self, n: NodeId, c: Concept) -> bool {
        self.add_concept_with(n, c, &Deps::new())
    }

    /// Adds `c` unless already present; an existing entry keeps its
    /// dependencies.
    pub fn add_concept_with(&mut self, n: NodeId, c: Concept, deps: &Deps) -> bool {
        if self.has(n, &c) {
            return false;
        }
        let node = Arc::make_mut(&mut self.nodes[n]);
        node.fingerprint = node.fingerprint.wrapping_add(concept_hash(&c));
        node.label.insert(c, deps.clone());
        if node.has_children {
            self.unpark();
        }
        self.touch(n);
        true
    }

    pub fn add_edge(&mut self, from: NodeId, role: RoleName, to: NodeId) {
        self.add_edge_with(from, role, to, &Deps::new());
    }

    pub fn add_edge_with(&mut self, from: NodeId, role: RoleName, to: NodeId, deps: &Deps) {
        let key = (role, to);
        if !self.succ[from].contains_key(&key) {
            Arc::make_mut(&mut self.succ[from]).insert(key, deps.clone());
            self.touch(from);
        }
    }

    pub fn edges(&self, n: NodeId) -> impl Iterator<Item = (&RoleName, NodeId)> + '_ {
        self.succ[n].keys().map(|(r, m)| (r, *m))
    }

    pub fn has_edge(&self, from: NodeId, role: &RoleName, to: NodeId) -> bool {
        self.succ[from].contains_key(&(role.clone(), to))
    }

    pub fn edge_deps(&self, from: NodeId, role: &RoleName, to: NodeId) -> &Deps {
        &self.succ[from][&(role.clone(), to)]
    }

    /// Live `role`-successors of `n` in creation order.
    pub fn successors(&self, n: NodeId, role: &RoleName) -> Vec<NodeId> {
        let lo = (role.clone(), 0);
        self.succ[n]
            .range(lo..)
            .map(|(k, _)| k)
            .take_while(|(r, _)| r == role)
            .map(|(_, m)| *m)
            .filter(|&m| self.nodes[m].alive)
            .collect()
    }

    pub fn are_distinct(&self, a: NodeId, b: NodeId) -> bool {
        if a == b {
            return false;
        }
        (self.is_named(a) && self.is_named(b)) || self.distinct.contains_key(&ordered(a, b))
    }

    fn distinct_deps(&self, a: NodeId, b: NodeId) -> Deps {
        self.distinct.get(&ordered(a, b)).cloned().unwrap_or_default()
    }

    pub fn set_distinct(&mut self, a: NodeId, b: NodeId) {
        self.set_distinct_with(a, b, &Deps::new());
    }

    pub fn set_distinct_with(&mut self, a: NodeId, b: NodeId, deps: &Deps) {
        debug_assert_ne!(a, b);
        let key = ordered(a, b);
        if !self.distinct.contains_key(&key) {
            self.distinct.insert(key, deps.clone());
            // Any common predecessor may now have too many successors.
            self.touch_all();
        }
    }

    /// Whether `nodes` contains `k` pairwise distinct members.
    pub fn has_distinct_subset(&self, nodes: &[NodeId], k: usize) -> bool {
        self.distinct_subset(nodes, k).is_some()
    }

    fn distinct_subset(&self, nodes: &[NodeId], k: usize) -> Option<Vec<NodeId>> {
        fn extend(g: &CompletionGraph, chosen: &mut Vec<NodeId>, rest: &[NodeId], k: usize) -> bool {
            if chosen.len() == k {
                return true;
            }
            if chosen.len() + rest.len() < k {
                return false;
            }
            for (i, &n) in rest.iter().enumerate() {
                if chosen.iter().all(|&c| g.are_distinct(c, n)) {
                    chosen.push(n);
                    if extend(g, chosen, &rest[i + 1..], k) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        let mut chosen = Vec::with_capacity(k);
        extend(self, &mut chosen, nodes, k).then_some(chosen)
    }

    /// Identifies `from` with `into`: labels are united, edges and
    /// inequalities are redirected, and `from` is removed. Everything moved
    /// additionally depends on `deps`.
    pub fn merge(&mut self, from: NodeId, into: NodeId, deps: &Deps) {
        debug_assert_ne!(from, into);
        let label = {
            let node = Arc::make_mut(&mut self.nodes[from]);
            node.fingerprint = 0;
            std::mem::take(&mut node.label)
        };
        for (c, d) in label {
            self.add_concept_with(into, c, &union(&d, deps));
        }

        let out = std::mem::take(&mut self.succ[from]);
        for ((role, m), d) in out.iter() {
            if self.nodes[*m].parent == Some(from) {
                Arc::make_mut(&mut self.nodes[*m]).parent = Some(into);
            }
            self.add_edge_with(into, role.clone(), *m, &union(d, deps));
        }
        for n in 0..self.nodes.len() {
            let incoming: Vec<(RoleName, Deps)> = self.succ[n]
                .iter()
                .filter(|((_, m), _)| *m == from)
                .map(|((r, _), d)| (r.clone(), d.clone()))
                .collect();
            for (role, d) in incoming {
                Arc::make_mut(&mut self.succ[n]).remove(&(role.clone(), from));
                self.add_edge_with(n, role, into, &union(&d, deps));
            }
        }

        let touching: Vec<((NodeId, NodeId), Deps)> = self
            .distinct
            .iter()
            .filter(|((a, b), _)| *a == from || *b == from)
            .map(|(k, d)| (*k, d.clone()))
            .collect();
        for ((a, b), d) in touching {
            self.distinct.remove(&(a, b));
            let other = if a == from { b } else { a };
            if other != into {
                self.set_distinct_with(other, into, &union(&d, deps));
            }
        }
        Arc::make_mut(&mut self.nodes[from]).alive = false;
        self.touch_all();
    }

    /// Blocking status of every node (dead nodes report `Open`).
    ///
    /// A generated node is directly blocked when a generated ancestor has
    /// an equal label, and indirectly blocked when one of its ancestors is
    /// blocked. Named individuals are never blocked.
    pub fn blocking(&self) -> Vec<Blocking> {
        let mut status = vec![Blocking::Open; self.nodes.len()];
        // Parents always precede their children in creation order.
        for n in self.nodes() {
            let Some(parent) = self.nodes[n].parent else {
                continue;
            };
            if status[parent] != Blocking::Open {
                status[n] = Blocking::Indirect;
                continue;
            }
            status[n] = self.direct_blocker(n).map_or(Blocking::Open, Blocking::Direct);
        }
        status
    }

    /// The nearest generated ancestor of `n` with the same label.
    fn direct_blocker(&self, n: NodeId) -> Option<NodeId> {
        let mut anc = self.nodes[n].parent;
        while let Some(a) = anc {
            if self.is_named(a) {
                return None;
            }
            if self.same_label(a, n) {
                return Some(a);
            }
            anc = self.nodes[a].parent;
        }
        None
    }

    /// Blocking status of `n`, memoizing it and its ancestors in `memo`.
    pub fn blocking_at(&self, n: NodeId, memo: &mut HashMap<NodeId, Blocking>) -> Blocking {
        if let Some(&b) = memo.get(&n) {
            return b;
        }
        let status = match self.nodes[n].parent {
            None => Blocking::Open,
            Some(parent) if self.blocking_at(parent, memo) != Blocking::Open => Blocking::Indirect,
            Some(_) => self.direct_blocker(n).map_or(Blocking::Open, Blocking::Direct),
        };
        memo.insert(n, status);
        status
    }

    fn same_label(&self, a: NodeId, b: NodeId) -> bool {
        let (x, y) = (&self.nodes[a], &self.nodes[b]);
        x.fingerprint == y.fingerprint && x.label.len() == y.label.len() && x.label.keys().eq(y.label.keys())
    }

    pub fn clash(&self) -> Option<Clash> {
        self.clash_with_deps().map(|(c, _)| c)
    }

    /// The first clash together with the branch points it depends on.
    pub fn clash_with_deps(&self) -> Option<(Clash, Deps)> {
        self.clash_among(self.nodes())
    }

    /// The first clash at one of `nodes`, taken in the given order.
    pub fn clash_among(&self, nodes: impl IntoIterator<Item = NodeId>) -> Option<(Clash, Deps)> {
        for n in nodes {
            let label = &self.nodes[n].label;
            let mut at_least: BTreeMap<&RoleName, (u32, &Deps)> = BTreeMap::new();
            let mut at_most: BTreeMap<&RoleName, (u32, &Deps)> = BTreeMap::new();
            for (c, d) in label {
                match c {
                    Concept::Bottom => return Some((Clash::Bottom(n), d.clone())),
                    Concept::Primitive(_) => {
                        if let Some(e) = label.get(&Concept::not(c.clone())) {
                            return Some((Clash::Complement(n, c.clone()), union(d, e)));
                        }
                    }
                    Concept::AtLeast(k, r) => {
                        if at_least.get(r).is_none_or(|(lo, _)| k > lo) {
                            at_least.insert(r, (*k, d));
                        }
                    }
                    // An existential needs at least one successor.
                    Concept::Some(r, _) => {
                        if at_least.get(r).is_none_or(|(lo, _)| *lo < 1) {
                            at_least.insert(r, (1, d));
                        }
                    }
                    Concept::AtMost(k, r) => {
                        if at_most.get(r).is_none_or(|(hi, _)| k < hi) {
                            at_most.insert(r, (*k, d));
                        }
                        let succ = self.successors(n, r);
                        let k = *k as usize;
                        if succ.len() > k {
                            if let Some(witnesses) = self.distinct_subset(&succ, k + 1) {
                                let mut deps = d.clone();
                                for (i, &y) in witnesses.iter().enumerate() {
                                    deps.extend(self.edge_deps(n, r, y));
                                    for &z in &witnesses[i + 1..] {
                                        deps.extend(self.distinct_deps(y, z));
                                    }
                                }
                                let clash = Clash::TooManySuccessors(n, k as u32, r.clone());
                                return Some((clash, deps));
                            }
                        }
                    }
                    _ => {}
                }
            }
            for (r, (lo, dl)) in &at_least {
                if let Some((hi, dh)) = at_most.get(r) {
                    if lo > hi {
                        return Some((Clash::CardinalityBounds(n, (*r).clone()), union(dl, dh)));
                    }
                }
            }
        }
        None
    }
}

fn ordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_individuals_are_distinct() {
        let mut g = CompletionGraph::new();
        let a = g.named(&"a".into());
        let b = g.named(&"b".into());
        let x = g.add_generated(a);
        assert!(g.are_distinct(a, b));
        assert!(!g.are_distinct(a, x));
        assert!(!g.are_distinct(a, a));
        assert_eq!(g.named(&"a".into()), a);
    }

    #[test]
    fn merge_redirects_edges_and_inequalities() {
        let mut g = CompletionGraph::new();
        let a = g.named(&"a".into());
        let y = g.add_generated(a);
        let z = g.add_generated(a);
        let w = g.add_generated(z);
        let v = g.add_generated(a);
        let r = RoleName::new("R");
        g.add_edge(a, r.clone(), y);
        g.add_edge(a, r.clone(), z);
        g.add_edge(a, r.clone(), v);
        g.add_edge(z, r.clone(), w);
        g.set_distinct(z, v);
        g.add_concept(z, Concept::prim("C"));

        g.merge(z, y, &Deps::new());
        assert!(!g.is_alive(z));
        assert_eq!(g.successors(a, &r), vec![y, v]);
        assert_eq!(g.successors(y, &r), vec![w]);
        assert_eq!(g.parent(w), Some(y));
        assert!(g.are_distinct(y, v));
        assert!(g.has(y, &Concept::prim("C")));
    }

    #[test]
    fn distinct_subsets() {
        let mut g = CompletionGraph::new();
        let a = g.named(&"a".into());
        let xs: Vec<_> = (0..4).map(|_| g.add_generated(a)).collect();
        g.set_distinct(xs[0], xs[1]);
        g.set_distinct(xs[1], xs[2]);
        g.set_distinct(xs[0], xs[2]);
        assert!(g.has_distinct_subset(&xs, 3));
        assert!(!g.has_distinct_subset(&xs, 4));
        assert!(g.has_distinct_subset(&xs, 0));
    }

    #[test]
    fn equality_blocking() {
        let mut g = CompletionGraph::new();
        let a = g.named(&"a".into());
        let x = g.add_generated(a);
        let y = g.add_generated(x);
        let z = g.add_generated(y);
        for n in [a, x, y] {
            g.add_concept(n, Concept::prim("A"));
        }
        let b = g.blocking();
        assert_eq!(b[a], Blocking::Open);
        assert_eq!(b[x], Blocking::Open);
        assert_eq!(b[y], Blocking::Direct(x));
        assert_eq!(b[z], Blocking::Indirect);
    }

    #[test]
    fn lazy_blocking_matches_the_full_scan() {
        let mut g = CompletionGraph::new();
        let a = g.named(&"a".into());
        let x = g.add_generated(a);
        let y = g.add_generated(x);
        let z = g.add_generated(y);
        let w = g.add_generated(x);
        for n in [x, y, w] {
            g.add_concept(n, Concept::prim("A"));
        }
        g.add_concept(w, Concept::prim("B"));
        let full = g.blocking();
        let mut memo = HashMap::new();
        for n in [w, z, y, x, a] {
            assert_eq!(g.blocking_at(n, &mut memo), full[n]);
        }
    }

    #[test]
    fn agendas_record_changes_and_parking() {
        let mut g = CompletionGraph::new();
        let a = g.named(&"a".into());
        let x = g.add_generated(a);
        assert_eq!(g.agenda(Agenda::Expand), vec![a, x]);
        g.settle(Agenda::Expand, &[a, x]);
        g.park(x);
        assert!(g.agenda(Agenda::Expand).is_empty());
        g.add_concept(x, Concept::prim("A"));
        assert_eq!(g.agenda(Agenda::Expand), vec![x]);
        g.park(x);
        // `a` has children, so its label change may unblock them.
        g.add_concept(a, Concept::prim("A"));
        assert_eq!(g.agenda(Agenda::Expand), vec![a, x]);
        let clone = g.clone();
        g.add_concept(x, Concept::prim("B"));
        assert!(!clone.has(x, &Concept::prim("B")));
    }
}
