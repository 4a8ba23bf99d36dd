//! Permutations, pattern containment and the pattern-avoidance tree.
//!
//! The tree `T(B)` has root `1`; the parent of a permutation is obtained by
//! deleting its maximum, so the children of `π ∈ S_n(B)` are the ways of
//! inserting `n + 1` into one of the `n + 1` slots of `π` that still avoid `B`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default cap on the number of tree nodes visited by one enumeration call.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// A permutation of `1..=n` in one-line notation, `n >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty".into()));
        }
        if n > u8::MAX as usize {
            return Err(Error::InvalidPermutation(format!("length {n} is too large")));
        }
        let mut seen = vec![false; n + 1];
        for &v in &entries {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidPermutation(format!("{entries:?} is not a permutation of 1..{n}")));
            }
            seen[v] = true;
        }
        Ok(Self(entries))
    }

    /// The permutation `1`, root of every avoidance tree.
    pub fn one() -> Self {
        Self(vec![1])
    }

    pub fn increasing(n: usize) -> Self {
        Self((1..=n as u8).collect())
    }

    pub fn decreasing(n: usize) -> Self {
        Self((1..=n as u8).rev().collect())
    }

    /// Reduces any sequence of distinct values to the permutation with the
    /// same relative order.
    pub fn standardize(values: &[u32]) -> Self {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by_key(|&i| values[i]);
        let mut out = vec![0u8; values.len()];
        for (rank, &i) in idx.iter().enumerate() {
            out[i] = rank as u8 + 1;
        }
        Self(out)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    /// Position of the maximum entry `n`.
    pub fn max_position(&self) -> usize {
        self.0.iter().position(|&v| v as usize == self.len()).expect("permutation has a maximum")
    }

    /// Parent in the avoidance tree; `None` for `1`.
    pub fn parent(&self) -> Option<Self> {
        if self.len() == 1 {
            return None;
        }
        let n = self.len() as u8;
        Some(Self(self.0.iter().copied().filter(|&v| v != n).collect()))
    }

    /// Inserts `n + 1` before position `slot` (`slot == n` appends).
    pub fn insert_max(&self, slot: usize) -> Self {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.extend_from_slice(&self.0[..slot]);
        v.push(self.len() as u8 + 1);
        v.extend_from_slice(&self.0[slot..]);
        Self(v)
    }

    /// Order by length first, then lexicographically.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    /// True iff some subsequence of `self` is order-isomorphic to `pattern`.
    pub fn contains(&self, pattern: &Permutation) -> bool {
        MatchPlan::new(pattern).occurs_in(&self.0, None)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            write!(f, "[")?;
            for (i, v) in self.0.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses a digit word such as `4213` (lengths up to 9) or a bracketed list
/// such as `[10,9,8,7,6,5,4,3,2,1]`.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidPermutation(format!("cannot parse {s:?}"));
        let entries: Vec<u8> = if let Some(inner) = s.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(bad)?;
            inner.split(',').map(|p| p.trim().parse::<u8>().map_err(|_| bad())).collect::<Result<_>>()?
        } else {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            s.bytes().map(|b| b - b'0').collect()
        };
        Self::new(entries)
    }
}

/// Precomputed search order for one pattern: for each entry, the earlier
/// entries immediately below and above it in value.
#[derive(Debug, Clone)]
struct MatchPlan {
    values: Vec<u8>,
    below: Vec<Option<usize>>,
    above: Vec<Option<usize>>,
    max_index: usize,
}

impl MatchPlan {
    fn new(p: &Permutation) -> Self {
        let values = p.0.clone();
        let mut below = Vec::with_capacity(values.len());
        let mut above = Vec::with_capacity(values.len());
        for (a, &v) in values.iter().enumerate() {
            let earlier = || values[..a].iter().enumerate();
            below.push(earlier().filter(|(_, &w)| w < v).max_by_key(|(_, &w)| w).map(|(i, _)| i));
            above.push(earlier().filter(|(_, &w)| w > v).min_by_key(|(_, &w)| w).map(|(i, _)| i));
        }
        let max_index = p.max_position();
        Self { values, below, above, max_index }
    }

    /// Searches for an occurrence; with `pin = Some(p)` the pattern's maximum
    /// must land on position `p`.
    fn occurs_in(&self, sigma: &[u8], pin: Option<usize>) -> bool {
        let k = self.values.len();
        if k > sigma.len() {
            return false;
        }
        let mut pos = vec![0usize; k];
        self.extend(sigma, 0, 0, &mut pos, pin)
    }

    fn extend(&self, sigma: &[u8], a: usize, start: usize, pos: &mut [usize], pin: Option<usize>) -> bool {
        let k = self.values.len();
        if a == k {
            return true;
        }
        let last = sigma.len() - (k - a);
        let (lo_p, hi_p) = match pin {
            Some(p) if a == self.max_index => (p.max(start), p.min(last)),
            Some(p) if a < self.max_index => (start, last.min(p.saturating_sub(1))),
            _ => (start, last),
        };
        if pin.is_some_and(|p| a < self.max_index && p == 0) {
            return false;
        }
        let lower = self.below[a].map(|b| sigma[pos[b]]);
        let upper = self.above[a].map(|b| sigma[pos[b]]);
        let mut p = lo_p;
        while p <= hi_p {
            let v = sigma[p];
            if lower.is_none_or(|l| v > l) && upper.is_none_or(|u| v < u) {
                pos[a] = p;
                if self.extend(sigma, a + 1, p + 1, pos, pin) {
                    return true;
                }
            }
            p += 1;
        }
        false
    }
}

/// A finite set `B` of forbidden patterns, `1 ∉ B`.
#[derive(Clone)]
pub struct PatternSet {
    patterns: Vec<Permutation>,
    plans: Vec<MatchPlan>,
    t: usize,
}

impl PatternSet {
    /// Patterns are kept sorted (by length, then lexicographically).
    pub fn new(patterns: Vec<Permutation>) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::InvalidPatternSet("no patterns given".into()));
        }
        let mut patterns = patterns;
        patterns.sort_by(|a, b| a.canonical_cmp(b));
        if patterns.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPatternSet("duplicate pattern".into()));
        }
        if patterns.iter().any(|p| p.len() == 1) {
            return Err(Error::ForbiddenPatternOne);
        }
        let t = patterns.iter().map(Permutation::len).max().expect("non-empty");
        let plans = patterns.iter().map(MatchPlan::new).collect();
        Ok(Self { patterns, plans, t })
    }

    /// Parses comma-separated patterns; bracketed lists may contain commas
    /// themselves, e.g. `[3,1,2],[2,1,4,3]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut items = Vec::new();
        let mut depth = 0usize;
        let mut cur = String::new();
        for ch in spec.chars() {
            match ch {
                '[' => {
                    depth += 1;
                    cur.push(ch);
                }
                ']' => {
                    depth = depth.checked_sub(1).ok_or_else(|| Error::InvalidPermutation(spec.to_string()))?;
                    cur.push(ch);
                }
                ',' | ' ' | '{' | '}' if depth == 0 => {
                    if !cur.trim().is_empty() {
                        items.push(std::mem::take(&mut cur));
                    }
                    cur.clear();
                }
                _ => cur.push(ch),
            }
        }
        if !cur.trim().is_empty() {
            items.push(cur);
        }
        let perms = items.iter().map(|s| s.parse()).collect::<Result<Vec<Permutation>>>()?;
        Self::new(perms)
    }

    pub fn patterns(&self) -> &[Permutation] {
        &self.patterns
    }

    /// Length of the longest pattern.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn avoided_by(&self, sigma: &Permutation) -> bool {
        self.plans.iter().all(|p| !p.occurs_in(&sigma.0, None))
    }

    /// For a child whose parent avoids `B`, only occurrences through the new
    /// maximum at `slot` need checking.
    fn child_avoids(&self, child: &[u8], slot: usize) -> bool {
        self.plans.iter().all(|p| !p.occurs_in(child, Some(slot)))
    }

    /// Children of `pi` in `T(B)`, in insertion-slot order.
    pub fn children(&self, pi: &Permutation) -> Result<Vec<Permutation>> {
        if !self.avoided_by(pi) {
            return Err(Error::ContainsPattern(pi.to_string()));
        }
        Ok(self.children_unchecked(pi))
    }

    pub(crate) fn children_unchecked(&self, pi: &Permutation) -> Vec<Permutation> {
        (0..=pi.len())
            .filter_map(|slot| {
                let c = pi.insert_max(slot);
                self.child_avoids(&c.0, slot).then_some(c)
            })
            .collect()
    }

    /// Number of children, without materializing them.
    fn child_count(&self, pi: &[u8]) -> usize {
        let mut buf = Vec::with_capacity(pi.len() + 1);
        (0..=pi.len())
            .filter(|&slot| {
                buf.clear();
                buf.extend_from_slice(&pi[..slot]);
                buf.push(pi.len() as u8 + 1);
                buf.extend_from_slice(&pi[slot..]);
                self.child_avoids(&buf, slot)
            })
            .count()
    }

    /// True iff the label set is guaranteed finite: some pattern is a child
    /// of an increasing permutation and some pattern is a child of a
    /// decreasing one.
    pub fn finite_label_test(&self) -> bool {
        let child_of = |p: &Permutation, parent: Permutation| p.parent().is_some_and(|q| q == parent);
        let inc = self.patterns.iter().any(|p| child_of(p, Permutation::increasing(p.len() - 1)));
        let dec = self.patterns.iter().any(|p| child_of(p, Permutation::decreasing(p.len() - 1)));
        inc && dec
    }
}

impl PartialEq for PatternSet {
    fn eq(&self, other: &Self) -> bool {
        self.patterns == other.patterns
    }
}

impl Eq for PatternSet {}

impl fmt::Display for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.patterns.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `counts[i]` is the number of nodes on level `i + 1`.
pub type LevelCounts = Vec<u64>;

struct Budget {
    limit: u64,
    used: AtomicU64,
    blown: AtomicBool,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Self { limit, used: AtomicU64::new(0), blown: AtomicBool::new(false) }
    }

    fn charge(&self, n: u64) -> bool {
        let used = self.used.fetch_add(n, AtomicOrdering::Relaxed) + n;
        if used > self.limit {
            self.blown.store(true, AtomicOrdering::Relaxed);
        }
        !self.blown.load(AtomicOrdering::Relaxed)
    }

    fn check(&self) -> Result<()> {
        if self.blown.load(AtomicOrdering::Relaxed) {
            Err(Error::NodeBudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Level counts of the subtree rooted at `pi` for levels `1..=depth`
/// (level 1 is `pi` itself).
pub fn subtree_profile(pi: &Permutation, b: &PatternSet, depth: usize) -> Result<LevelCounts> {
    subtree_profile_with_budget(pi, b, depth, DEFAULT_NODE_BUDGET)
}

pub fn subtree_profile_with_budget(pi: &Permutation, b: &PatternSet, depth: usize, budget: u64) -> Result<LevelCounts> {
    assert!(depth >= 1, "depth must be positive");
    if !b.avoided_by(pi) {
        return Err(Error::ContainsPattern(pi.to_string()));
    }
    let budget = Budget::new(budget);
    let counts = profile_from(b, vec![pi.clone()], depth, &budget);
    budget.check()?;
    Ok(counts)
}

/// `|S_n(B)|` for `n = 1..=n_max` by expanding the tree from the root.
pub fn count_avoiders(b: &PatternSet, n_max: usize) -> Result<LevelCounts> {
    count_avoiders_with_budget(b, n_max, DEFAULT_NODE_BUDGET)
}

pub fn count_avoiders_with_budget(b: &PatternSet, n_max: usize, budget: u64) -> Result<LevelCounts> {
    assert!(n_max >= 1, "n_max must be positive");
    let budget = Budget::new(budget);
    let counts = profile_from(b, vec![Permutation::one()], n_max, &budget);
    budget.check()?;
    Ok(counts)
}

/// Breadth-first while levels are small, then parallel depth-first from each
/// node of the last stored level.
fn profile_from(b: &PatternSet, roots: Vec<Permutation>, depth: usize, budget: &Budget) -> LevelCounts {
    const WIDE: usize = 4096;
    let mut counts = vec![0u64; depth];
    let mut level = roots;
    let mut d = 0;
    loop {
        counts[d] = level.len() as u64;
        if !budget.charge(level.len() as u64) || d + 1 == depth || level.is_empty() {
            return counts;
        }
        if level.len() >= WIDE {
            break;
        }
        level = level.par_iter().flat_map_iter(|p| b.children_unchecked(p)).collect();
        d += 1;
    }
    // Level `d` is stored; count levels d+1.. below each node.
    let rest = depth - d - 1;
    let partial: Vec<Vec<u64>> = level
        .par_iter()
        .map(|p| {
            let mut local = vec![0u64; rest];
            let mut buf = p.0.clone();
            dfs_count(b, &mut buf, rest, &mut local, budget);
            local
        })
        .collect();
    for local in partial {
        for (i, c) in local.into_iter().enumerate() {
            counts[d + 1 + i] += c;
        }
    }
    counts
}

fn dfs_count(b: &PatternSet, pi: &mut Vec<u8>, rest: usize, out: &mut [u64], budget: &Budget) {
    if rest == 0 || budget.blown.load(AtomicOrdering::Relaxed) {
        return;
    }
    if rest == 1 {
        let c = b.child_count(pi) as u64;
        out[0] += c;
        budget.charge(c);
        return;
    }
    let n = pi.len();
    let mut visited = 0u64;
    for slot in 0..=n {
        pi.insert(slot, n as u8 + 1);
        if b.child_avoids(pi, slot) {
            out[0] += 1;
            visited += 1;
            dfs_count(b, pi, rest - 1, &mut out[1..], budget);
        }
        pi.remove(slot);
    }
    budget.charge(visited);
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

    /// All permutations of `1..=n`, by Heap-free recursion.
    fn all_perms(n: usize) -> Vec<Vec<u8>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for q in all_perms(n - 1) {
            for slot in 0..n {
                let mut v = q.clone();
                v.insert(slot, n as u8);
                out.push(v);
            }
        }
        out
    }

    /// Descendants counted without the tree: permutations of each length
    /// avoiding `B` that reduce to `pi` by deleting maxima.
    fn brute_profile(pi: &Permutation, b: &PatternSet, depth: usize) -> Vec<u64> {
        (0..depth)
            .map(|j| {
                let n = pi.len() + j;
                all_perms(n)
                    .into_iter()
                    .filter(|v| {
                        let s = Permutation(v.clone());
                        let reduced: Vec<u8> = v.iter().copied().filter(|&x| x as usize <= pi.len()).collect();
                        reduced == pi.0 && b.patterns().iter().all(|t| !brute_contains(&s, t))
                    })
                    .count() as u64
            })
            .collect()
    }

    fn brute_contains(s: &Permutation, t: &Permutation) -> bool {
        let (n, k) = (s.len(), t.len());
        (0u32..1 << n).filter(|m| m.count_ones() as usize == k).any(|m| {
            let sub: Vec<u32> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| s.0[i] as u32).collect();
            Permutation::standardize(&sub) == *t
        })
    }

    #[test]
    fn containment_basics() {
        assert!(p("4213").contains(&p("21")));
        assert!(!p("2143").contains(&p("123")));
        assert!(p("2143").contains(&p("2143")));
        assert!(!p("31524").contains(&p("1324")));
        assert!(p("315264").contains(&p("1324")));
    }

    #[test]
    fn children_of_small_nodes() {
        let b = set("123");
        assert_eq!(b.children(&p("21")).unwrap(), vec![p("321"), p("231"), p("213")]);
        assert_eq!(b.children(&p("1")).unwrap(), vec![p("21"), p("12")]);
        assert_eq!(b.children(&p("12")).unwrap(), vec![p("312"), p("132")]);
        assert!(b.children(&p("123")).is_err());
    }

    #[test]
    fn counting() {
        assert_eq!(count_avoiders(&set("123"), 6).unwrap(), vec![1, 2, 5, 14, 42, 132]);
        assert_eq!(count_avoiders(&set("123,132"), 5).unwrap(), vec![1, 2, 4, 8, 16]);
        assert_eq!(count_avoiders(&set("12,21"), 3).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn profiles() {
        let b = set("123");
        // 312 and 21 root isomorphic subtrees; 21 has three children
        assert_eq!(subtree_profile(&p("312"), &b, 4).unwrap(), subtree_profile(&p("21"), &b, 4).unwrap());
        assert_eq!(subtree_profile(&p("312"), &b, 2).unwrap(), vec![1, 3]);
        let b2 = set("123,43215");
        assert_eq!(subtree_profile(&p("21"), &b2, 5).unwrap(), brute_profile(&p("21"), &b2, 5));
        assert_eq!(subtree_profile(&p("21"), &b2, 5).unwrap(), vec![1, 3, 9, 27, 81]);
        assert_eq!(subtree_profile(&p("1"), &b, 1).unwrap(), vec![1]);
    }

    #[test]
    fn parsing() {
        let b = set("[3,1,2],[2,1,4,3]");
        assert_eq!(b.patterns(), &[p("312"), p("2143")]);
        assert_eq!(PatternSet::parse("1").err(), Some(Error::ForbiddenPatternOne));
        assert!(matches!("122".parse::<Permutation>(), Err(Error::InvalidPermutation(_))));
        let long: Permutation = "[10,9,8,7,6,5,4,3,2,1]".parse().unwrap();
        assert_eq!(long, Permutation::decreasing(10));
        assert_eq!(long.to_string(), "[10,9,8,7,6,5,4,3,2,1]");
    }

    #[test]
    fn finite_labels() {
        assert!(set("123,43215").finite_label_test());
        assert!(!set("123,132").finite_label_test());
        assert!(!set("123,312").finite_label_test());
    }

    #[test]
    fn budget_is_enforced() {
        let err = count_avoiders_with_budget(&set("123"), 12, 1000).unwrap_err();
        assert_eq!(err, Error::NodeBudgetExceeded { budget: 1000 });
    }
}
