//! Consistency of ALCN knowledge bases by a completion-rule (tableau)
//! procedure with equality blocking and unique names.
//!
//! The TBox is internalized into one NNF concept that is added to every
//! node. Rules run in a fixed priority: the deterministic rules (⊓, ∀, TBox
//! and forced ⊔ choices) to saturation, then a clash check, then
//! ≤-merging at the oldest node where it applies, then ⊔ before the
//! generating rules (∃, ≥) at the newest node where any applies.
//! Branches are explored depth first, leftmost alternative first, over
//! cloned graphs. Every fact records the branch points it depends on, so a
//! clash backtracks straight to the latest choice involved in it.

mod graph;

pub use graph::{Agenda, Blocking, Clash, CompletionGraph, Deps, NodeId};

use crate::concept::{internalize, nnf, simplify, Assertion, Axiom, Concept, IndividualName, RoleName};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Generated nodes allowed on one branch.
    pub max_nodes_per_branch: usize,
    /// Rule applications allowed over a whole check.
    pub max_rule_firings: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes_per_branch: 100_000,
            max_rule_firings: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    NodesPerBranch,
    RuleFirings,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("tableau resource limit exceeded: {kind:?} > {limit}")]
pub struct ResourceLimit {
    pub kind: LimitKind,
    pub limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    And,
    Or,
    Forall,
    Exists,
    AtLeast,
    AtMost,
    TBox,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::And => "and",
            Rule::Or => "or",
            Rule::Forall => "all",
            Rule::Exists => "some",
            Rule::AtLeast => "atleast",
            Rule::AtMost => "atmost",
            Rule::TBox => "tbox",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Fired { rule: Rule, node: NodeId },
    Branch { rule: Rule, node: NodeId, alternatives: usize },
    Merge { from: NodeId, into: NodeId },
    Clash(Clash),
}

pub trait TraceSink {
    fn record(&mut self, event: &TraceEvent);
}

pub struct NoTrace;

impl TraceSink for NoTrace {
    fn record(&mut self, _: &TraceEvent) {}
}

impl<F: FnMut(&TraceEvent)> TraceSink for F {
    fn record(&mut self, event: &TraceEvent) {
        self(event)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub rule_firings: usize,
    pub nodes_created: usize,
    pub branches: usize,
    pub clashes: usize,
    pub merges: usize,
    /// Branch points skipped because a clash did not depend on them.
    pub backjumps: usize,
    /// Merges of two named individuals. Always zero under unique names.
    pub named_merges: usize,
}

#[derive(Debug, Clone)]
pub struct ConsistencyVerdict {
    pub consistent: bool,
    /// Complete, clash-free graph when consistent.
    pub witness: Option<CompletionGraph>,
    pub stats: Stats,
}

/// A pending rule application found in a graph, with the dependencies of
/// its premises.
#[derive(Debug, Clone)]
enum Step {
    /// Add a concept without branching.
    Add { node: NodeId, concept: Concept, rule: Rule, deps: Deps },
    Choose { node: NodeId, left: Concept, right: Concept, deps: Deps },
    /// Alternative merges `(y, z, deps)` among successors of `node`.
    Merge { node: NodeId, pairs: Vec<(NodeId, NodeId, Deps)> },
    Successor { node: NodeId, role: RoleName, filler: Concept, deps: Deps },
    Successors { node: NodeId, role: RoleName, count: u32, deps: Deps },
}

impl Step {
    fn rule(&self) -> Rule {
        match self {
            Step::Add { rule, .. } => *rule,
            Step::Choose { .. } => Rule::Or,
            Step::Merge { .. } => Rule::AtMost,
            Step::Successor { .. } => Rule::Exists,
            Step::Successors { .. } => Rule::AtLeast,
        }
    }
}

fn with(a: &Deps, b: &Deps) -> Deps {
    a.union(b).copied().collect()
}

/// Dependencies of the clash that adding `c` would cause on its own.
fn obvious_clash(g: &CompletionGraph, node: NodeId, c: &Concept) -> Option<Deps> {
    match c {
        Concept::Bottom => Some(Deps::new()),
        Concept::Primitive(_) => g.deps(node, &Concept::not(c.clone())).cloned(),
        Concept::Not(inner) if matches!(**inner, Concept::Primitive(_)) => g.deps(node, inner).cloned(),
        _ => {
            let (r, bounds) = successor_bounds(c)?;
            g.label(node).find_map(|e| {
                let (s, (lo, hi)) = successor_bounds(e)?;
                (s == r && lo.max(bounds.0) > hi.min(bounds.1)).then(|| label_deps(g, node, e))
            })
        }
    }
}

/// The role and the bounds `(lower, upper)` on the number of its
/// successors that `c` imposes, if it is a number restriction or `∃`.
fn successor_bounds(c: &Concept) -> Option<(&RoleName, (u32, u32))> {
    match c {
        Concept::AtLeast(k, r) => Some((r, (*k, u32::MAX))),
        Concept::Some(r, _) => Some((r, (1, u32::MAX))),
        Concept::AtMost(k, r) => Some((r, (0, *k))),
        _ => None,
    }
}

fn label_deps(g: &CompletionGraph, n: NodeId, c: &Concept) -> Deps {
    g.deps(n, c).cloned().unwrap_or_default()
}

/// Deterministic steps at `nodes`, in order. Callers leave out indirectly
/// blocked nodes.
fn deterministic_steps(g: &CompletionGraph, tbox: &Concept, nodes: impl IntoIterator<Item = NodeId>) -> Vec<Step> {
    let mut steps = Vec::new();
    for n in nodes {
        if *tbox != Concept::Top && !g.has(n, tbox) {
            steps.push(Step::Add {
                node: n,
                concept: tbox.clone(),
                rule: Rule::TBox,
                deps: g.node_deps(n).clone(),
            });
        }
        for c in g.label(n) {
            match c {
                Concept::And(a, b) => {
                    for part in [a, b] {
                        if !g.has(n, part) {
                            steps.push(Step::Add {
                                node: n,
                                concept: (**part).clone(),
                                rule: Rule::And,
                                deps: label_deps(g, n, c),
                            });
                        }
                    }
                }
                Concept::All(r, f) => {
                    for m in g.successors(n, r) {
                        if !g.has(m, f) {
                            steps.push(Step::Add {
                                node: m,
                                concept: (**f).clone(),
                                rule: Rule::Forall,
                                deps: with(&label_deps(g, n, c), g.edge_deps(n, r, m)),
                            });
                        }
                    }
                }
                Concept::Or(a, b) if !g.has(n, a) && !g.has(n, b) => {
                    let forced = match (obvious_clash(g, n, a), obvious_clash(g, n, b)) {
                        (Some(da), None) => Some((b, da)),
                        (None, Some(db)) => Some((a, db)),
                        (Some(da), Some(db)) => Some((a, with(&da, &db))),
                        (None, None) => None,
                    };
                    if let Some((chosen, why)) = forced {
                        steps.push(Step::Add {
                            node: n,
                            concept: (**chosen).clone(),
                            rule: Rule::Or,
                            deps: with(&label_deps(g, n, c), &why),
                        });
                    }
                }
                _ => {}
            }
        }
    }
    steps
}

fn choice_at(g: &CompletionGraph, n: NodeId) -> Option<Step> {
    for c in g.label(n) {
        if let Concept::Or(a, b) = c {
            if !g.has(n, a) && !g.has(n, b) {
                return Some(Step::Choose {
                    node: n,
                    left: (**a).clone(),
                    right: (**b).clone(),
                    deps: label_deps(g, n, c),
                });
            }
        }
    }
    None
}

fn merge_at(g: &CompletionGraph, n: NodeId) -> Option<Step> {
    for c in g.label(n) {
        if let Concept::AtMost(k, r) = c {
            let succ = g.successors(n, r);
            if succ.len() <= *k as usize {
                continue;
            }
            let base = label_deps(g, n, c);
            let mut pairs = Vec::new();
            for (i, &y) in succ.iter().enumerate() {
                for &z in &succ[i + 1..] {
                    if !g.are_distinct(y, z) {
                        let edges = with(g.edge_deps(n, r, y), g.edge_deps(n, r, z));
                        pairs.push((y, z, with(&base, &edges)));
                    }
                }
            }
            if !pairs.is_empty() {
                return Some(Step::Merge { node: n, pairs });
            }
        }
    }
    None
}

fn generating_at(g: &CompletionGraph, n: NodeId) -> Option<Step> {
    for c in g.label(n) {
        match c {
            Concept::Some(r, f) => {
                if !g.successors(n, r).into_iter().any(|m| g.has(m, f)) {
                    return Some(Step::Successor {
                        node: n,
                        role: r.clone(),
                        filler: (**f).clone(),
                        deps: label_deps(g, n, c),
                    });
                }
            }
            Concept::AtLeast(k, r) if *k > 0 => {
                let succ = g.successors(n, r);
                if !g.has_distinct_subset(&succ, *k as usize) {
                    return Some(Step::Successors {
                        node: n,
                        role: r.clone(),
                        count: *k,
                        deps: label_deps(g, n, c),
                    });
                }
            }
            _ => {}
        }
    }
    None
}

/// The nodes passed over while looking for an expansion step.
#[derive(Default)]
struct PassedOver {
    /// Open, with nothing pending.
    settled: Vec<NodeId>,
    /// Blocked, with nothing pending while they stay blocked.
    blocked: Vec<NodeId>,
}

/// The next expansion step among `nodes`, which must be in creation order:
/// a ≤-merge at the oldest node where one applies, otherwise a ⊔ choice or,
/// failing that, a generating rule at the newest node where either applies.
/// Merging first keeps successors from growing subtrees that a merge would
/// redirect. Newest first, a choice is followed by its own subtree, so a
/// clash below it surfaces before unrelated choices pile up.
fn expansion_step(
    g: &CompletionGraph,
    mut blocking: impl FnMut(NodeId) -> Blocking,
    nodes: impl IntoIterator<Item = NodeId>,
) -> (Option<Step>, PassedOver) {
    let nodes: Vec<(NodeId, Blocking)> = nodes.into_iter().map(|n| (n, blocking(n))).collect();
    let mut passed = PassedOver::default();
    for &(n, status) in &nodes {
        if status != Blocking::Indirect {
            if let Some(step) = merge_at(g, n) {
                return (Some(step), passed);
            }
        }
    }
    for &(n, status) in nodes.iter().rev() {
        let step = match status {
            Blocking::Indirect => None,
            Blocking::Direct(_) => choice_at(g, n),
            Blocking::Open => choice_at(g, n).or_else(|| generating_at(g, n)),
        };
        match (step, status) {
            (Some(step), _) => return (Some(step), passed),
            (None, Blocking::Open) => passed.settled.push(n),
            (None, _) => passed.blocked.push(n),
        }
    }
    (None, passed)
}

fn next_step(g: &CompletionGraph, tbox: &Concept) -> Option<Step> {
    let blocking = g.blocking();
    let active = g.nodes().filter(|&n| blocking[n] != Blocking::Indirect);
    deterministic_steps(g, tbox, active)
        .into_iter()
        .next()
        .or_else(|| expansion_step(g, |n| blocking[n], g.nodes()).0)
}

impl CompletionGraph {
    /// Some completion rule that still applies under `tbox` (an internalized
    /// TBox concept), if any. `None` means the graph is complete.
    pub fn pending_rule(&self, tbox: &Concept) -> Option<Rule> {
        next_step(self, tbox).map(|s| s.rule())
    }
}

/// Runs consistency, subsumption and instance checks under fixed limits.
#[derive(Debug, Clone, Copy, Default)]
pub struct Reasoner {
    pub limits: Limits,
}

impl Reasoner {
    pub fn new(limits: Limits) -> Self {
        Reasoner { limits }
    }

    pub fn check_consistency(
        &self,
        tbox: &[Axiom],
        abox: &[Assertion],
    ) -> Result<ConsistencyVerdict, ResourceLimit> {
        self.check_consistency_traced(tbox, abox, &mut NoTrace)
    }

    pub fn check_consistency_traced(
        &self,
        tbox: &[Axiom],
        abox: &[Assertion],
        sink: &mut dyn TraceSink,
    ) -> Result<ConsistencyVerdict, ResourceLimit> {
        let tbox_concept = internalize(tbox);
        let mut initial = CompletionGraph::new();
        for assertion in abox {
            match assertion {
                Assertion::ConceptMembership { individual, concept } => {
                    let n = initial.named(individual);
                    initial.add_concept(n, simplify(&nnf(concept)));
                }
                Assertion::RoleMembership { subject, object, role } => {
                    let s = initial.named(subject);
                    let o = initial.named(object);
                    initial.add_edge(s, role.clone(), o);
                }
            }
        }
        Search {
            tbox: &tbox_concept,
            limits: self.limits,
            stats: Stats::default(),
            sink,
        }
        .run(initial)
    }

    /// Whether `tbox ∪ abox` entails `c → d`: a fresh individual in
    /// `c ⊓ ¬d` is contradictory.
    pub fn is_subsumed_wrt(
        &self,
        tbox: &[Axiom],
        abox: &[Assertion],
        c: &Concept,
        d: &Concept,
    ) -> Result<bool, ResourceLimit> {
        let fresh = fresh_individual(abox);
        let mut extended = abox.to_vec();
        extended.push(Assertion::ConceptMembership {
            individual: fresh,
            concept: Concept::and(c.clone(), Concept::not(d.clone())),
        });
        Ok(!self.check_consistency(tbox, &extended)?.consistent)
    }

    pub fn is_subsumed(&self, tbox: &[Axiom], c: &Concept, d: &Concept) -> Result<bool, ResourceLimit> {
        self.is_subsumed_wrt(tbox, &[], c, d)
    }

    pub fn is_instance(
        &self,
        tbox: &[Axiom],
        abox: &[Assertion],
        query: &Assertion,
    ) -> Result<bool, ResourceLimit> {
        match query {
            Assertion::ConceptMembership { individual, concept } => {
                let mut extended = abox.to_vec();
                extended.push(Assertion::ConceptMembership {
                    individual: individual.clone(),
                    concept: Concept::not(concept.clone()),
                });
                Ok(!self.check_consistency(tbox, &extended)?.consistent)
            }
            Assertion::RoleMembership { .. } => {
                // Without role constructors, an unasserted role edge between
                // named individuals follows only from an inconsistent KB.
                if abox.contains(query) {
                    return Ok(true);
                }
                Ok(!self.check_consistency(tbox, abox)?.consistent)
            }
        }
    }
}

/// An individual name not used in `abox`.
pub fn fresh_individual(abox: &[Assertion]) -> IndividualName {
    let used = |name: &str| {
        abox.iter().any(|a| match a {
            Assertion::ConceptMembership { individual, .. } => individual.as_str() == name,
            Assertion::RoleMembership { subject, object, .. } => {
                subject.as_str() == name || object.as_str() == name
            }
        })
    };
    (0..)
        .map(|i| format!("_fresh{i}"))
        .find(|n| !used(n))
        .map(IndividualName::new)
        .expect("unbounded name supply")
}

/// An open branch point: the alternatives not yet explored, and the union
/// of the clash dependencies of those already refuted.
struct Frame {
    id: u32,
    alternatives: Vec<CompletionGraph>,
    conflict: Deps,
}

struct Search<'a> {
    tbox: &'a Concept,
    limits: Limits,
    stats: Stats,
    sink: &'a mut dyn TraceSink,
}

impl Search<'_> {
    fn fire(&mut self, rule: Rule, node: NodeId) -> Result<(), ResourceLimit> {
        self.stats.rule_firings += 1;
        self.sink.record(&TraceEvent::Fired { rule, node });
        if self.stats.rule_firings > self.limits.max_rule_firings {
            return Err(ResourceLimit {
                kind: LimitKind::RuleFirings,
                limit: self.limits.max_rule_firings,
            });
        }
        Ok(())
    }

    fn generated(&mut self, g: &CompletionGraph, count: usize) -> Result<(), ResourceLimit> {
        self.stats.nodes_created += count;
        if g.generated_count() > self.limits.max_nodes_per_branch {
            return Err(ResourceLimit {
                kind: LimitKind::NodesPerBranch,
                limit: self.limits.max_nodes_per_branch,
            });
        }
        Ok(())
    }

    fn run(mut self, initial: CompletionGraph) -> Result<ConsistencyVerdict, ResourceLimit> {
        let mut frames: Vec<Frame> = Vec::new();
        let mut next_id = 0u32;
        let mut current = Some(initial);
        'branches: while let Some(mut g) = current.take() {
            loop {
                // Deterministic saturation. Only nodes changed since their
                // last visit can have pending rules.
                loop {
                    let candidates = g.agenda(Agenda::Saturate);
                    g.settle(Agenda::Saturate, &candidates);
                    let mut memo = HashMap::new();
                    let (skipped, active): (Vec<NodeId>, Vec<NodeId>) = candidates
                        .into_iter()
                        .partition(|&n| g.blocking_at(n, &mut memo) == Blocking::Indirect);
                    for n in skipped {
                        g.park(n);
                    }
                    let steps = deterministic_steps(&g, self.tbox, active);
                    if steps.is_empty() {
                        break;
                    }
                    for step in steps {
                        if let Step::Add { node, concept, rule, deps } = step {
                            if g.add_concept_with(node, concept, &deps) {
                                self.fire(rule, node)?;
                            }
                        }
                    }
                }

                let candidates = g.agenda(Agenda::Check);
                g.settle(Agenda::Check, &candidates);
                if let Some((clash, deps)) = g.clash_among(candidates) {
                    self.stats.clashes += 1;
                    self.sink.record(&TraceEvent::Clash(clash));
                    current = self.backtrack(&mut frames, deps);
                    continue 'branches;
                }

                let mut memo = HashMap::new();
                let (step, passed) = expansion_step(&g, |n| g.blocking_at(n, &mut memo), g.agenda(Agenda::Expand));
                g.settle(Agenda::Expand, &passed.settled);
                for n in passed.blocked {
                    g.park(n);
                }
                match step {
                    Some(step @ (Step::Choose { .. } | Step::Merge { .. })) => {
                        let id = next_id;
                        next_id += 1;
                        let mut alternatives = self.branch(&g, step, id)?;
                        alternatives.reverse();
                        current = alternatives.pop();
                        frames.push(Frame { id, alternatives, conflict: Deps::new() });
                        continue 'branches;
                    }
                    Some(step @ (Step::Successor { node, .. } | Step::Successors { node, .. })) => {
                        // All successors of a node are created together.
                        let mut next = Some(step);
                        while let Some(step) = next {
                            self.generate(&mut g, step)?;
                            next = generating_at(&g, node);
                        }
                    }
                    Some(Step::Add { .. }) => unreachable!("expansion steps never add directly"),
                    None => {
                        return Ok(ConsistencyVerdict {
                            consistent: true,
                            witness: Some(g),
                            stats: self.stats,
                        });
                    }
                }
            }
        }
        Ok(ConsistencyVerdict {
            consistent: false,
            witness: None,
            stats: self.stats,
        })
    }

    fn generate(&mut self, g: &mut CompletionGraph, step: Step) -> Result<(), ResourceLimit> {
        match step {
            Step::Successor { node, role, filler, deps } => {
                let m = g.add_generated_with(node, &deps);
                g.add_edge_with(node, role, m, &deps);
                g.add_concept_with(m, filler, &deps);
                self.generated(g, 1)?;
                self.fire(Rule::Exists, node)
            }
            Step::Successors { node, role, count, deps } => {
                let fresh = g.add_successors_with(node, &role, count, &deps);
                self.generated(g, fresh.len())?;
                self.fire(Rule::AtLeast, node)
            }
            _ => unreachable!("only generating steps are passed to generate"),
        }
    }

    /// Next graph to explore after a clash depending on `conflict`. Branch
    /// points outside the conflict cannot repair it and are dropped.
    fn backtrack(&mut self, frames: &mut Vec<Frame>, mut conflict: Deps) -> Option<CompletionGraph> {
        while let Some(frame) = frames.last_mut() {
            if conflict.remove(&frame.id) {
                frame.conflict.extend(conflict.iter().copied());
                if let Some(g) = frame.alternatives.pop() {
                    return Some(g);
                }
                // Every alternative failed: the failure rests on the union.
                conflict = std::mem::take(&mut frame.conflict);
            } else if !frame.alternatives.is_empty() {
                self.stats.backjumps += 1;
            }
            frames.pop();
        }
        None
    }

    /// Alternatives of a branching step, first alternative first. Facts
    /// introduced by an alternative depend on branch point `id`.
    fn branch(&mut self, g: &CompletionGraph, step: Step, id: u32) -> Result<Vec<CompletionGraph>, ResourceLimit> {
        self.stats.branches += 1;
        let mut alternatives = Vec::new();
        match step {
            Step::Choose { node, left, right, mut deps } => {
                deps.insert(id);
                let mut first = g.clone();
                first.add_concept_with(node, left.clone(), &deps);
                let mut second = g.clone();
                // Semantic branching on literals: the second branch also
                // records that the first disjunct is false.
                if left.is_literal() {
                    second.add_concept_with(node, nnf(&Concept::not(left)), &deps);
                }
                second.add_concept_with(node, right, &deps);
                self.fire(Rule::Or, node)?;
                alternatives.push(first);
                alternatives.push(second);
                self.sink.record(&TraceEvent::Branch { rule: Rule::Or, node, alternatives: 2 });
            }
            Step::Merge { node, pairs } => {
                self.fire(Rule::AtMost, node)?;
                self.sink.record(&TraceEvent::Branch {
                    rule: Rule::AtMost,
                    node,
                    alternatives: pairs.len(),
                });
                for (y, z, mut deps) in pairs {
                    deps.insert(id);
                    // The earlier node survives unless the later one is named.
                    let (from, into) = if g.is_named(z) && !g.is_named(y) { (y, z) } else { (z, y) };
                    if g.is_named(from) && g.is_named(into) {
                        self.stats.named_merges += 1;
                    }
                    self.stats.merges += 1;
                    let mut alt = g.clone();
                    alt.merge(from, into, &deps);
                    self.sink.record(&TraceEvent::Merge { from, into });
                    alternatives.push(alt);
                }
            }
            _ => unreachable!("only branching steps are passed to branch"),
        }
        Ok(alternatives)
    }
}
