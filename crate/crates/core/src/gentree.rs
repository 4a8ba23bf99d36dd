//! Label classes of the avoidance tree and the succession rules between them.
//!
//! Nodes are grouped by the level profile of their subtree, starting at
//! depth `t`. The profile to depth `t` is not always a complete invariant
//! (under `{1423,2413,2431,3124,3412,4312,4321}` the subtrees of `123` and
//! `321` agree for four levels and split on the fifth), so [`Explorer`]
//! also computes every profile one level deeper and checks that each node
//! agrees with its class there, on the levels inside the explored window.
//! Once the rules are built, every sampled member must also produce, through
//! its own children, the level counts the rules predict for its class.
//! Any disagreement deepens the signature and restarts. These checks cover
//! the sampled nodes only, so rules are a well-tested conjecture rather than
//! a proof; [`crate::solvers::solve`] compares against brute force.
//!
//! Classes are classes of equal counts rather than of isomorphic subtrees:
//! members of one class may have children in different classes as long as
//! the children's profiles add up alike.
//!
//! [`explore`] expands the tree level by level, expanding only members of
//! classes seen for the first time on the previous level.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{subtree_profile_with_budget, LevelCounts, PatternSet, Permutation, DEFAULT_NODE_BUDGET};

/// Index into [`RuleSet::classes`]; ids follow (representative length, lex).
pub type ClassId = usize;

/// How many members of each class (all of representative length) are kept.
pub const MEMBERS_PER_CLASS: usize = 32;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LabelSignature(pub LevelCounts);

impl LabelSignature {
    pub fn profile(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct LabelClass {
    pub id: ClassId,
    pub signature: LabelSignature,
    /// Lexicographically least member found at the first level the class
    /// occurs on.
    pub representative: Permutation,
    /// A sample of members of representative length, sorted, starting with
    /// the representative.
    pub members: Vec<Permutation>,
}

impl LabelClass {
    pub fn rep_length(&self) -> usize {
        self.representative.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessionRule {
    pub parent: ClassId,
    /// Child class to multiplicity, ordered by class id.
    pub children: BTreeMap<ClassId, u64>,
}

impl SuccessionRule {
    pub fn fan_out(&self) -> u64 {
        self.children.values().sum()
    }
}

/// Classes and rules discovered while expanding `T(B)` to some depth.
#[derive(Clone, Debug)]
pub struct RuleSet {
    pub patterns: PatternSet,
    pub classes: Vec<LabelClass>,
    rules: Vec<Option<SuccessionRule>>,
    pub depth_explored: usize,
}

impl RuleSet {
    pub fn root(&self) -> ClassId {
        0
    }

    pub fn class(&self, id: ClassId) -> &LabelClass {
        &self.classes[id]
    }

    pub fn rule(&self, id: ClassId) -> Option<&SuccessionRule> {
        self.rules[id].as_ref()
    }

    pub fn rules(&self) -> impl Iterator<Item = &SuccessionRule> {
        self.rules.iter().flatten()
    }

    pub fn is_frontier(&self, id: ClassId) -> bool {
        self.rules[id].is_none()
    }

    /// Classes first seen at the deepest explored level; their rules are
    /// unknown.
    pub fn frontier(&self) -> Vec<ClassId> {
        (0..self.classes.len()).filter(|&i| self.is_frontier(i)).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.rules.iter().all(Option::is_some)
    }

    pub fn class_of_signature(&self, sig: &LabelSignature) -> Option<ClassId> {
        self.classes.iter().position(|c| &c.signature == sig)
    }

    /// Number of root paths with `n` nodes, `n = 1..=levels`. Exact up to the
    /// explored depth (or any depth when closed).
    pub fn path_counts(&self, levels: usize) -> Vec<u128> {
        assert!(self.is_closed() || levels <= self.depth_explored, "rule set only valid to its explored depth");
        let mut cur = vec![0u128; self.classes.len()];
        cur[self.root()] = 1;
        let mut out = Vec::with_capacity(levels);
        for level in 1..=levels {
            out.push(cur.iter().sum());
            if level == levels {
                break;
            }
            let mut next = vec![0u128; self.classes.len()];
            for (v, &c) in cur.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let rule = self.rule(v).expect("classes below the explored depth have rules");
                for (&w, &mult) in &rule.children {
                    next[w] += c * mult as u128;
                }
            }
            cur = next;
        }
        out
    }

    /// `parent ~> child^mult, ...` using representatives.
    pub fn format_rule(&self, rule: &SuccessionRule) -> String {
        let kids: Vec<String> = rule
            .children
            .iter()
            .map(|(&c, &m)| {
                let rep = self.classes[c].representative.to_string();
                if m == 1 {
                    rep
                } else {
                    format!("{rep}^{m}")
                }
            })
            .collect();
        format!("{} ~> {}", self.classes[rule.parent].representative, kids.join(", "))
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in self.rules() {
            writeln!(f, "{}", self.format_rule(rule))?;
        }
        for id in self.frontier() {
            writeln!(f, "{} ~> ?", self.classes[id].representative)?;
        }
        Ok(())
    }
}

/// Adjacency matrix of a closed rule set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    pub class_order: Vec<Permutation>,
    pub entries: Vec<Vec<u64>>,
}

impl TransitionMatrix {
    pub fn order(&self) -> usize {
        self.entries.len()
    }
}

pub fn transition_matrix(rs: &RuleSet) -> Result<TransitionMatrix> {
    let frontier = rs.frontier().len();
    if frontier > 0 {
        return Err(Error::NotClosed { frontier });
    }
    let n = rs.classes.len();
    let mut entries = vec![vec![0u64; n]; n];
    for rule in rs.rules() {
        for (&w, &m) in &rule.children {
            entries[rule.parent][w] = m;
        }
    }
    Ok(TransitionMatrix { class_order: rs.classes.iter().map(|c| c.representative.clone()).collect(), entries })
}

/// Memoizing signature computer, reused across exploration depths.
pub struct Explorer {
    patterns: PatternSet,
    node_budget: u64,
    depth: usize,
    memo: HashMap<Permutation, LevelCounts>,
}

impl Explorer {
    pub fn new(patterns: PatternSet) -> Self {
        Self::with_budget(patterns, DEFAULT_NODE_BUDGET)
    }

    pub fn with_budget(patterns: PatternSet, node_budget: u64) -> Self {
        Self { depth: patterns.t(), patterns, node_budget, memo: HashMap::new() }
    }

    pub fn patterns(&self) -> &PatternSet {
        &self.patterns
    }

    /// Current profile depth of the signatures.
    pub fn signature_depth(&self) -> usize {
        self.depth
    }

    pub fn signature(&mut self, pi: &Permutation) -> Result<LabelSignature> {
        Ok(self.signatures(std::slice::from_ref(pi))?.remove(0))
    }

    /// Signatures of many nodes, computed in parallel for the unseen ones.
    pub fn signatures(&mut self, perms: &[Permutation]) -> Result<Vec<LabelSignature>> {
        Ok(self.deep_profiles(perms)?.iter().map(|p| self.key(p)).collect())
    }

    fn key(&self, deep: &LevelCounts) -> LabelSignature {
        LabelSignature(deep[..self.depth].to_vec())
    }

    /// Profiles one level past the signature depth, used to check that
    /// nodes sharing a signature really have equal counts.
    fn deep_profiles(&mut self, perms: &[Permutation]) -> Result<Vec<LevelCounts>> {
        let missing: Vec<&Permutation> = perms.iter().filter(|p| !self.memo.contains_key(*p)).collect();
        let (b, d, budget) = (&self.patterns, self.depth + 1, self.node_budget);
        let computed: Vec<(Permutation, Result<LevelCounts>)> =
            missing.par_iter().map(|p| ((*p).clone(), subtree_profile_with_budget(p, b, d, budget))).collect();
        for (p, r) in computed {
            self.memo.insert(p, r?);
        }
        Ok(perms.iter().map(|p| self.memo[p].clone()).collect())
    }

    /// Expands `T(B)` for `depth` levels. Classes first met on level `depth`
    /// are left as frontier; exploration stops early once a level brings no
    /// new class. Restarts with deeper signatures whenever two members of a
    /// class turn out to have different children.
    pub fn explore(&mut self, depth: usize) -> Result<RuleSet> {
        assert!(depth >= 2, "depth must be at least 2");
        loop {
            if let Some(rs) = self.explore_once(depth)? {
                return Ok(rs);
            }
            self.depth += 1;
            self.memo.clear();
        }
    }

    fn explore_once(&mut self, depth: usize) -> Result<Option<RuleSet>> {
        let root = Permutation::one();
        let root_deep = self.deep_profiles(std::slice::from_ref(&root))?.remove(0);
        let root_sig = self.key(&root_deep);
        let mut classes =
            vec![LabelClass { id: 0, signature: root_sig, representative: root.clone(), members: vec![root] }];
        let mut deep_of: Vec<LevelCounts> = vec![root_deep];
        let mut rules: Vec<Option<SuccessionRule>> = vec![None];
        let mut by_sig: HashMap<LabelSignature, ClassId> = HashMap::new();
        by_sig.insert(classes[0].signature.clone(), 0);
        let mut fresh: Vec<ClassId> = vec![0];
        // child classes of the members other than the representative
        let mut others: Vec<(ClassId, BTreeMap<ClassId, u64>)> = Vec::new();
        let mut level = 1;
        while level < depth && !fresh.is_empty() {
            // children of every stored member of every fresh class; the first
            // member is the representative
            let mut kids_of: Vec<Vec<Vec<Permutation>>> = Vec::with_capacity(fresh.len());
            let mut all: Vec<Permutation> = Vec::new();
            for &c in &fresh {
                let per_member: Vec<Vec<Permutation>> =
                    classes[c].members.iter().map(|m| self.patterns.children_unchecked(m)).collect();
                all.extend(per_member.iter().flatten().cloned());
                kids_of.push(per_member);
            }
            let deep = self.deep_profiles(&all)?;
            let sigs: Vec<LabelSignature> = deep.iter().map(|p| self.key(p)).collect();
            let sig_of: HashMap<&Permutation, &LabelSignature> = all.iter().zip(&sigs).collect();

            // every node must agree with its class one level deeper, as far as
            // the levels below `depth` are concerned
            let agree = |p: &Permutation, a: &LevelCounts, b: &LevelCounts| {
                a.iter().zip(b).position(|(x, y)| x != y).is_none_or(|j| p.len() + j > depth)
            };
            let mut candidates: BTreeMap<&LabelSignature, (Vec<&Permutation>, &LevelCounts)> = BTreeMap::new();
            for ((p, s), d) in all.iter().zip(&sigs).zip(&deep) {
                let expected = match by_sig.get(s) {
                    Some(&c) => &deep_of[c],
                    None => {
                        let entry = candidates.entry(s).or_insert((Vec::new(), d));
                        entry.0.push(p);
                        entry.1
                    }
                };
                if !agree(p, expected, d) {
                    return Ok(None);
                }
            }

            // new classes, with the least candidate as representative
            let mut new_classes: Vec<(LabelSignature, Vec<Permutation>, LevelCounts)> = candidates
                .into_iter()
                .map(|(s, (mut ps, d))| {
                    ps.sort();
                    ps.dedup();
                    ps.truncate(MEMBERS_PER_CLASS);
                    (s.clone(), ps.into_iter().cloned().collect(), d.clone())
                })
                .collect();
            new_classes.sort_by(|a, b| a.1[0].cmp(&b.1[0]));
            let mut next_fresh = Vec::with_capacity(new_classes.len());
            for (sig, members, d) in new_classes {
                let id = classes.len();
                by_sig.insert(sig.clone(), id);
                classes.push(LabelClass { id, signature: sig, representative: members[0].clone(), members });
                deep_of.push(d);
                rules.push(None);
                next_fresh.push(id);
            }

            for (&c, per_member) in fresh.iter().zip(&kids_of) {
                let mut maps = per_member.iter().map(|kids| {
                    let mut children = BTreeMap::new();
                    for k in kids {
                        *children.entry(by_sig[sig_of[k]]).or_insert(0u64) += 1;
                    }
                    children
                });
                let children = maps.next().expect("representative");
                others.extend(maps.map(|m| (c, m)));
                rules[c] = Some(SuccessionRule { parent: c, children });
            }
            fresh = next_fresh;
            level += 1;
        }
        let rs = RuleSet { patterns: self.patterns.clone(), classes, rules, depth_explored: level };
        Ok(members_agree(&rs, &deep_of, &others, depth).then_some(rs))
    }
}

/// Whether every sampled member's children give the same level counts as
/// its class's rule, on all levels up to `depth`. The counts are those the
/// rules themselves predict, so disagreements several levels down surface.
fn members_agree(
    rs: &RuleSet,
    deep_of: &[LevelCounts],
    others: &[(ClassId, BTreeMap<ClassId, u64>)],
    depth: usize,
) -> bool {
    let n = rs.classes.len();
    let mut counts: Vec<Vec<u128>> = (0..n)
        .map(|c| {
            let mut v = vec![0u128; depth];
            v[0] = 1;
            if rs.rules[c].is_none() {
                for (slot, &d) in v.iter_mut().zip(&deep_of[c]) {
                    *slot = d.into();
                }
            }
            v
        })
        .collect();
    let from = |counts: &[Vec<u128>], children: &BTreeMap<ClassId, u64>, j: usize| -> u128 {
        children.iter().map(|(&k, &m)| u128::from(m) * counts[k][j - 1]).sum()
    };
    for j in 1..depth {
        let next: Vec<Option<u128>> =
            rs.rules.iter().map(|r| r.as_ref().map(|r| from(&counts, &r.children, j))).collect();
        for (c, v) in next.into_iter().enumerate() {
            if let Some(v) = v {
                counts[c][j] = v;
            }
        }
    }
    others.iter().all(|(c, children)| {
        let len = rs.classes[*c].rep_length();
        (1..=depth.saturating_sub(len)).all(|j| from(&counts, children, j) == counts[*c][j])
    })
}

pub fn signature_of(pi: &Permutation, b: &PatternSet) -> Result<LabelSignature> {
    if !b.avoided_by(pi) {
        return Err(Error::ContainsPattern(pi.to_string()));
    }
    Ok(LabelSignature(subtree_profile_with_budget(pi, b, b.t(), DEFAULT_NODE_BUDGET)?))
}

pub fn explore(b: &PatternSet, depth: usize) -> Result<RuleSet> {
    Explorer::new(b.clone()).explore(depth)
}

pub fn finite_label_test(b: &PatternSet) -> bool {
    b.finite_label_test()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn set(s: &str) -> PatternSet {
        PatternSet::parse(s).unwrap()
    }

    fn rule_strings(rs: &RuleSet) -> Vec<String> {
        rs.rules().map(|r| rs.format_rule(r)).collect()
    }

    #[test]
    fn signatures_identify_isomorphic_subtrees() {
        let b = set("123");
        assert_eq!(signature_of(&p("312"), &b).unwrap(), signature_of(&p("21"), &b).unwrap());
        assert_eq!(signature_of(&p("12"), &b).unwrap(), signature_of(&p("1"), &b).unwrap());
        assert_eq!(signature_of(&p("1"), &b).unwrap().profile()[0], 1);
    }

    #[test]
    fn finite_example() {
        let rs = explore(&set("123,43215"), 6).unwrap();
        assert!(rs.is_closed());
        assert_eq!(rule_strings(&rs), ["1 ~> 1, 21", "21 ~> 1, 21, 321", "321 ~> 1, 21, 321^2"]);
        let m = transition_matrix(&rs).unwrap();
        assert_eq!(m.entries, vec![vec![1, 1, 0], vec![1, 1, 1], vec![1, 1, 2]]);
    }

    #[test]
    fn infinite_example_rules() {
        let rs = explore(&set("123,132"), 5).unwrap();
        let rules = rule_strings(&rs);
        // 312 roots a copy of the whole tree, so its class is represented by 1
        assert_eq!(rules[..3], ["1 ~> 12, 21", "12 ~> 1", "21 ~> 12^2, 321"]);
        assert_eq!(rs.class_of_signature(&signature_of(&p("312"), &rs.patterns).unwrap()), Some(0));
        assert!(!rs.is_closed());
        assert_eq!(transition_matrix(&rs).unwrap_err(), Error::NotClosed { frontier: rs.frontier().len() });
    }

    #[test]
    fn dead_tree() {
        let rs = explore(&set("12,21"), 3).unwrap();
        assert!(rs.is_closed());
        assert!(rs.rule(0).unwrap().children.is_empty());
        assert_eq!(transition_matrix(&rs).unwrap().entries, vec![vec![0]]);
    }

    #[test]
    fn catalan_is_not_closed() {
        let rs = explore(&set("123"), 4).unwrap();
        assert!(matches!(transition_matrix(&rs), Err(Error::NotClosed { .. })));
    }
}
