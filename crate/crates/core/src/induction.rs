//! Compression of a finite rule set into general rules.
//!
//! Every class on the deepest explored level heads a chain of classes, one per
//! length, obtained by shortening a maximal run of consecutive values in one
//! of its members. Above a common base length `m` these chains become the
//! families `v_0, v_1, ...`; everything else is the finite set `W`. Each
//! family's rules are then described uniformly in the index `i`:
//!
//! * links to other families (or itself): the whole range `v_0..v_{i-1}`
//!   once, and fixed multiplicities of `v_{i-1}`, `v_i`, `v_{i+1}`;
//! * children in `W` with multiplicities polynomial in `i` of degree at most
//!   `t - 2`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use subregular_symbolic::{Poly, Rat, RationalFunction};

use crate::error::{Error, Result};
use crate::gentree::{ClassId, Explorer, LabelSignature, RuleSet};
use crate::perm::{PatternSet, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RunDir {
    Asc,
    Desc,
}

/// `instance(i)`: a fixed skeleton with a run of consecutive values, of
/// length `base + i`, inserted at `pos`. Skeleton values at or above `lo`
/// sit above the run.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilyTemplate {
    pub skeleton: Vec<u8>,
    pub pos: usize,
    pub lo: u8,
    pub dir: RunDir,
    pub base: usize,
}

impl FamilyTemplate {
    /// Run length `len` variant, independent of `base`.
    pub fn with_run(&self, len: usize) -> Option<Permutation> {
        let n = self.skeleton.len() + len;
        if n == 0 || n > u8::MAX as usize {
            return None;
        }
        let shift = |v: u8| if v >= self.lo { v + len as u8 } else { v };
        let mut out: Vec<u8> = Vec::with_capacity(n);
        out.extend(self.skeleton[..self.pos].iter().map(|&v| shift(v)));
        let run = (0..len as u8).map(|j| self.lo + j);
        match self.dir {
            RunDir::Asc => out.extend(run),
            RunDir::Desc => out.extend(run.rev()),
        }
        out.extend(self.skeleton[self.pos..].iter().map(|&v| shift(v)));
        Some(Permutation::new(out).expect("template instances are permutations"))
    }

    pub fn instance(&self, i: usize) -> Permutation {
        self.with_run(self.base + i).expect("instance in range")
    }

    /// Symbolic form of the instance of length `k + d`, e.g.
    /// `(k-1)(k-2)k(k-3)...1`.
    pub fn render(&self, d: i64) -> String {
        let s = self.skeleton.len() as i64;
        let sym = |off: i64| match off.cmp(&0) {
            std::cmp::Ordering::Equal => "k".to_string(),
            std::cmp::Ordering::Greater => format!("(k+{off})"),
            std::cmp::Ordering::Less => format!("(k-{})", -off),
        };
        let val = |v: u8| if v >= self.lo { sym(d + v as i64 - s) } else { v.to_string() };
        let top = sym(d + self.lo as i64 - 1 - s);
        let next = sym(d + self.lo as i64 - 2 - s);
        let run = match self.dir {
            RunDir::Desc => format!("{top}{next}...{}", self.lo),
            RunDir::Asc => format!("{}{}...{top}", self.lo, self.lo + 1),
        };
        let mut out = String::new();
        for &v in &self.skeleton[..self.pos] {
            out.push_str(&val(v));
        }
        out.push_str(&run);
        for &v in &self.skeleton[self.pos..] {
            out.push_str(&val(v));
        }
        out
    }

    /// Templates from every maximal run (length at least 2) of `sigma`.
    fn from_runs(sigma: &Permutation) -> Vec<(FamilyTemplate, usize)> {
        let e = sigma.entries();
        let mut out = Vec::new();
        let mut start = 0;
        while start < e.len() {
            let mut end = start + 1;
            let dir = if end < e.len() && e[end] == e[start] + 1 {
                RunDir::Asc
            } else if end < e.len() && e[end] + 1 == e[start] {
                RunDir::Desc
            } else {
                start += 1;
                continue;
            };
            while end < e.len()
                && match dir {
                    RunDir::Asc => e[end] == e[end - 1] + 1,
                    RunDir::Desc => e[end] + 1 == e[end - 1],
                }
            {
                end += 1;
            }
            let len = end - start;
            let lo = e[start..end].iter().copied().min().expect("non-empty run");
            let skeleton: Vec<u8> =
                e[..start].iter().chain(&e[end..]).map(|&v| if v > lo { v - len as u8 } else { v }).collect();
            out.push((FamilyTemplate { skeleton, pos: start, lo, dir, base: len }, len));
            start = end;
        }
        out
    }
}

/// `p(i) = Σ_d newton[d] * C(i, d)`, integer valued.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityPoly {
    newton: Vec<i64>,
}

fn binom(i: usize, d: usize) -> i128 {
    if d > i {
        return 0;
    }
    let mut r: i128 = 1;
    for e in 0..d {
        r = r * (i - e) as i128 / (e + 1) as i128;
    }
    r
}

impl MultiplicityPoly {
    pub fn zero() -> Self {
        Self { newton: Vec::new() }
    }

    pub fn from_newton(mut newton: Vec<i64>) -> Self {
        while newton.last() == Some(&0) {
            newton.pop();
        }
        Self { newton }
    }

    /// Interpolates `values[0..=deg]` by forward differences.
    pub fn fit(values: &[u64], deg: usize) -> Option<Self> {
        if values.len() < deg + 1 {
            return None;
        }
        let mut row: Vec<i64> = values[..=deg].iter().map(|&v| v as i64).collect();
        let mut newton = Vec::with_capacity(deg + 1);
        for _ in 0..=deg {
            newton.push(row[0]);
            row = row.windows(2).map(|w| w[1] - w[0]).collect();
        }
        Some(Self::from_newton(newton))
    }

    pub fn eval(&self, i: usize) -> i128 {
        self.newton.iter().enumerate().map(|(d, &a)| a as i128 * binom(i, d)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.newton.is_empty()
    }

    pub fn newton(&self) -> &[i64] {
        &self.newton
    }

    /// `Σ_{i>=0} p(i) x^i = Σ_d newton[d] x^d / (1-x)^(d+1)`.
    pub fn gf(&self) -> RationalFunction {
        let one_minus_x = RationalFunction::from_ints(&[1, -1], &[1]).expect("valid");
        let mut acc = RationalFunction::zero();
        for (d, &a) in self.newton.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let term = &RationalFunction::x_pow(d as i32) / &one_minus_x.pow(d as i32 + 1).expect("non-zero");
            acc = &acc + &(&term * &RationalFunction::from_int(a));
        }
        acc
    }

    /// The polynomial in `k = i + shift`.
    pub fn in_k(&self, shift: usize) -> Poly {
        let mut acc = Poly::zero();
        for (d, &a) in self.newton.iter().enumerate() {
            // C(k - shift, d)
            let mut term = Poly::constant(Rat::from_integer(BigInt::from(a)));
            for e in 0..d {
                let lin = Poly::new(vec![Rat::from_integer(BigInt::from(-((shift + e) as i64))), Rat::one()]);
                term = term.mul(&lin).scale(&Rat::new(BigInt::from(1), BigInt::from((e + 1) as i64)));
            }
            acc = acc.add(&term);
        }
        acc
    }
}

/// Renders a polynomial in `k` as an exponent: `k`, `(k-3)`, `2`, `(2k^2-1)`.
fn render_exponent(p: &Poly) -> String {
    let terms: Vec<(usize, &Rat)> = p.coeffs().iter().enumerate().rev().filter(|(_, c)| !c.is_zero()).collect();
    let mut s = String::new();
    for (idx, (d, c)) in terms.iter().enumerate() {
        let neg = c < &&Rat::zero();
        let mag = if neg { -(*c).clone() } else { (*c).clone() };
        if idx > 0 {
            s.push(if neg { '-' } else { '+' });
        } else if neg {
            s.push('-');
        }
        let var = match d {
            0 => String::new(),
            1 => "k".to_string(),
            _ => format!("k^{d}"),
        };
        if *d == 0 || !mag.is_one() {
            s.push_str(&mag.to_string());
        }
        s.push_str(&var);
    }
    if terms.len() == 1 && (terms[0].0 == 0 || terms[0].1.is_one()) {
        s
    } else {
        format!("({s})")
    }
}

/// A child of a general rule or of a `W` rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChildRef {
    Fixed(ClassId),
    Member { family: usize, index: usize },
}

/// Links from family members `v_i` to members of family `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyLink {
    pub target: usize,
    /// 0 or 1: each of `v_0 .. v_{i-1}` once.
    pub range: u64,
    pub minus: u64,
    pub zero: u64,
    pub plus: u64,
}

impl FamilyLink {
    fn count_at(&self, i: usize, j: usize) -> u64 {
        let mut c = 0;
        if j < i {
            c += self.range;
        }
        if j + 1 == i {
            c += self.minus;
        }
        if j == i {
            c += self.zero;
        }
        if j == i + 1 {
            c += self.plus;
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralRule {
    pub family: usize,
    pub template: FamilyTemplate,
    pub links: Vec<FamilyLink>,
    pub fixed: BTreeMap<ClassId, MultiplicityPoly>,
    /// Length of `v_0`.
    pub k_min: usize,
}

impl GeneralRule {
    pub fn link_to(&self, target: usize) -> Option<&FamilyLink> {
        self.links.iter().find(|l| l.target == target)
    }

    /// Children of `v_i` with multiplicities.
    pub fn children_at(&self, i: usize) -> Vec<(ChildRef, u64)> {
        let mut out = Vec::new();
        for (&w, p) in &self.fixed {
            let m = p.eval(i);
            if m > 0 {
                out.push((ChildRef::Fixed(w), m as u64));
            }
        }
        for l in &self.links {
            for j in 0..=i + 1 {
                let c = l.count_at(i, j);
                if c > 0 {
                    out.push((ChildRef::Member { family: l.target, index: j }, c));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Family {
    pub template: FamilyTemplate,
    /// Classes of `v_0, v_1, ...` up to the explored depth.
    pub classes: Vec<ClassId>,
    pub rule: GeneralRule,
    /// Distinct labels on the deepest level that fall into this family's
    /// class. Isomorphic shapes such as `(k-2)(k-1)k(k-3)...1` and
    /// `(k-1)(k-2)k(k-3)...1` share a family but count as separate paths.
    pub paths: usize,
}

/// A rule set with its families compressed into general rules.
#[derive(Clone, Debug)]
pub struct CompressedRules {
    pub rules: RuleSet,
    /// Common length of the `v_0` of every family.
    pub m: usize,
    pub families: Vec<Family>,
    /// The finite classes, in class order.
    pub w: Vec<ClassId>,
    pub w_rules: BTreeMap<ClassId, Vec<(ChildRef, u64)>>,
    /// Some `W` class is longer than `m`.
    pub extended_w: bool,
    pub root: ChildRef,
}

impl CompressedRules {
    pub fn patterns(&self) -> &PatternSet {
        &self.rules.patterns
    }

    pub fn t(&self) -> usize {
        self.rules.patterns.t()
    }

    pub fn general_rules(&self) -> Vec<&GeneralRule> {
        self.families.iter().map(|f| &f.rule).collect()
    }

    /// Length of the node a child reference points at.
    pub fn len_of(&self, c: ChildRef) -> usize {
        match c {
            ChildRef::Fixed(w) => self.rules.class(w).rep_length(),
            ChildRef::Member { index, .. } => self.m + index,
        }
    }

    pub fn children_of(&self, c: ChildRef) -> Vec<(ChildRef, u64)> {
        match c {
            ChildRef::Fixed(w) => self.w_rules[&w].clone(),
            ChildRef::Member { family, index } => self.families[family].rule.children_at(index),
        }
    }

    fn describe_child(&self, c: ChildRef) -> String {
        match c {
            ChildRef::Fixed(w) => self.rules.class(w).representative.to_string(),
            ChildRef::Member { family, index } => self.families[family].template.instance(index).to_string(),
        }
    }

    /// Rule text in `parent ~> child^mult, ...` notation; general rules are
    /// parameterized by the length `k` of the parent.
    pub fn render_rules(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &w in &self.w {
            let kids: Vec<String> =
                self.w_rules[&w].iter().map(|&(c, mult)| power(self.describe_child(c), &mult.to_string())).collect();
            out.push(format!("{} ~> {}", self.rules.class(w).representative, kids.join(", ")));
        }
        for f in &self.families {
            out.push(self.render_general(&f.rule));
        }
        out
    }

    pub fn render_general(&self, rule: &GeneralRule) -> String {
        let m = self.m;
        let mut kids = Vec::new();
        for (&w, p) in &rule.fixed {
            kids.push(power(self.rules.class(w).representative.to_string(), &render_exponent(&p.in_k(m))));
        }
        for l in &rule.links {
            let t = &self.families[l.target].template;
            if l.range == 1 {
                kids.push(format!("{},...,{}", t.instance(0), t.render(-1)));
            }
            for (d, c) in [(-1, l.minus), (0, l.zero), (1, l.plus)] {
                if c > 0 {
                    kids.push(power(t.render(d), &c.to_string()));
                }
            }
        }
        format!("{} ~> {}  (k>={m})", rule.template.render(0), kids.join(", "))
    }
}

fn power(base: String, exp: &str) -> String {
    if exp == "1" {
        base
    } else {
        format!("{base}^{exp}")
    }
}

impl fmt::Display for CompressedRules {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.render_rules() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// A chain of classes of consecutive lengths produced by one template.
#[derive(Clone, Debug)]
struct Chain {
    template: FamilyTemplate,
    /// `classes[j]` has length `min_len + j`.
    classes: Vec<ClassId>,
    min_len: usize,
}

fn find_chain(
    explorer: &mut Explorer,
    rs: &RuleSet,
    class_by_sig: &HashMap<LabelSignature, ClassId>,
    top: ClassId,
) -> Result<Option<Chain>> {
    let mut best: Option<(Chain, (usize, RunDir, usize))> = None;
    for member in &rs.class(top).members {
        for (template, run_len) in FamilyTemplate::from_runs(member) {
            let mut classes = Vec::new();
            let mut len = run_len as i64;
            while len >= 0 {
                let Some(inst) = template.with_run(len as usize) else { break };
                if !rs.patterns.avoided_by(&inst) {
                    break;
                }
                let sig = explorer.signature(&inst)?;
                let Some(&c) = class_by_sig.get(&sig) else { break };
                if rs.class(c).rep_length() != inst.len() || classes.contains(&c) {
                    break;
                }
                classes.push(c);
                len -= 1;
            }
            classes.reverse();
            let min_len = member.len() + 1 - classes.len();
            // longest chain; then descending runs; then leftmost run
            let key = (
                usize::MAX - classes.len(),
                if template.dir == RunDir::Desc { RunDir::Asc } else { RunDir::Desc },
                template.pos,
            );
            if best.as_ref().is_none_or(|(_, k)| key < *k) {
                let mut template = template;
                template.base = member.len() - template.skeleton.len() + 1 - classes.len();
                best = Some((Chain { template, classes, min_len }, key));
            }
        }
    }
    Ok(best.map(|(c, _)| c).filter(|c| c.classes.len() >= 2))
}

/// Compresses `rs` into general rules. Fails with [`Error::NoFamilyFound`]
/// when the frontier does not resolve into consistent families; callers
/// retry with a deeper rule set.
pub fn induce_general_rules(rs: &RuleSet) -> Result<CompressedRules> {
    induce_with(&mut Explorer::new(rs.patterns.clone()), rs)
}

pub fn induce_with(explorer: &mut Explorer, rs: &RuleSet) -> Result<CompressedRules> {
    let t = rs.patterns.t();
    let depth = rs.depth_explored;
    if rs.is_closed() {
        let w: Vec<ClassId> = (0..rs.classes.len()).collect();
        let w_rules = w
            .iter()
            .map(|&c| (c, rs.rule(c).unwrap().children.iter().map(|(&k, &m)| (ChildRef::Fixed(k), m)).collect()))
            .collect();
        return Ok(CompressedRules {
            rules: rs.clone(),
            m: rs.classes.iter().map(|c| c.rep_length()).max().unwrap_or(1),
            families: Vec::new(),
            w,
            w_rules,
            extended_w: false,
            root: ChildRef::Fixed(rs.root()),
        });
    }
    let class_by_sig: HashMap<LabelSignature, ClassId> =
        rs.classes.iter().map(|c| (c.signature.clone(), c.id)).collect();
    let mut chains = Vec::new();
    for top in rs.frontier() {
        match find_chain(explorer, rs, &class_by_sig, top)? {
            Some(c) => chains.push(c),
            None => {
                return Err(Error::NoFamilyFound(format!("no run template for {}", rs.class(top).representative)));
            }
        }
    }
    let m_lo = chains.iter().map(|c| c.min_len).max().expect("frontier is non-empty").max(1);
    let m_hi = (depth + 1).saturating_sub(t).max(1);
    let mut fallback = None;
    let mut last_err = String::from("not enough explored levels for t - 1 instances");
    for m in m_lo..=m_hi {
        match compress_at(rs, &chains, m) {
            Ok(c) if !c.extended_w => return Ok(c),
            Ok(c) => {
                if fallback.is_none() {
                    fallback = Some(c);
                }
            }
            Err(e) => last_err = e,
        }
    }
    fallback.ok_or(Error::NoFamilyFound(last_err))
}

fn compress_at(rs: &RuleSet, chains: &[Chain], m: usize) -> std::result::Result<CompressedRules, String> {
    let t = rs.patterns.t();
    let depth = rs.depth_explored;
    // family members at lengths >= m, ordered by v_0 representative
    let mut fams: Vec<(FamilyTemplate, Vec<ClassId>)> = chains
        .iter()
        .map(|c| {
            let skip = m - c.min_len;
            let mut template = c.template.clone();
            template.base += skip;
            (template, c.classes[skip..].to_vec())
        })
        .collect();
    fams.sort_by(|a, b| rs.class(a.1[0]).representative.cmp(&rs.class(b.1[0]).representative));
    let mut member_of: HashMap<ClassId, ChildRef> = HashMap::new();
    for (f, (_, classes)) in fams.iter().enumerate() {
        for (index, &c) in classes.iter().enumerate() {
            if member_of.insert(c, ChildRef::Member { family: f, index }).is_some() {
                return Err(format!("class {} lies on two families", rs.class(c).representative));
            }
        }
    }
    let w: Vec<ClassId> = (0..rs.classes.len()).filter(|c| !member_of.contains_key(c)).collect();
    if let Some(&c) = w.iter().find(|&&c| rs.is_frontier(c)) {
        return Err(format!("frontier class {} is not on a family", rs.class(c).representative));
    }
    let to_ref = |c: ClassId| member_of.get(&c).copied().unwrap_or(ChildRef::Fixed(c));

    // instances with known rules: m + i <= depth - 1
    let known = depth - m;
    if known < t - 1 {
        return Err(format!("only {known} instances below depth {depth}"));
    }
    let mut families = Vec::with_capacity(fams.len());
    for (f, (template, classes)) in fams.iter().enumerate() {
        let observed: Vec<BTreeMap<ChildRef, u64>> = (0..known)
            .map(|i| rs.rule(classes[i]).expect("known").children.iter().map(|(&c, &mu)| (to_ref(c), mu)).collect())
            .collect();
        let rule = describe_family(f, template, &observed, &w, fams.len(), t, m)
            .map_err(|e| format!("family {}: {e}", template.render(0)))?;
        let paths = rs.class(*classes.last().expect("non-empty")).members.len();
        families.push(Family { template: template.clone(), classes: classes.clone(), rule, paths });
    }

    let mut extended_w = false;
    let mut w_rules = BTreeMap::new();
    for &c in &w {
        let kids: Vec<(ChildRef, u64)> =
            rs.rule(c).expect("checked").children.iter().map(|(&k, &mu)| (to_ref(k), mu)).collect();
        if rs.class(c).rep_length() > m {
            extended_w = true;
            if kids.iter().any(|(k, _)| matches!(k, ChildRef::Member { index, .. } if *index >= 2)) {
                return Err(format!("long class {} feeds deep family members", rs.class(c).representative));
            }
        }
        w_rules.insert(c, kids);
    }
    Ok(CompressedRules { rules: rs.clone(), m, families, w, w_rules, extended_w, root: to_ref(rs.root()) })
}

fn describe_family(
    f: usize,
    template: &FamilyTemplate,
    observed: &[BTreeMap<ChildRef, u64>],
    w: &[ClassId],
    n_families: usize,
    t: usize,
    m: usize,
) -> std::result::Result<GeneralRule, String> {
    let last = observed.len() - 1;
    if last < 2 {
        return Err("fewer than three instances".into());
    }
    let count =
        |i: usize, g: usize, j: usize| observed[i].get(&ChildRef::Member { family: g, index: j }).copied().unwrap_or(0);
    let mut links = Vec::new();
    for g in 0..n_families {
        let range = count(last, g, 0);
        if range > 1 {
            return Err(format!("multiplicity {range} on the range into family {g}"));
        }
        let minus_total = count(last, g, last - 1);
        if minus_total < range {
            return Err("inconsistent range".into());
        }
        let link = FamilyLink {
            target: g,
            range,
            minus: minus_total - range,
            zero: count(last, g, last),
            plus: count(last, g, last + 1),
        };
        if link.range + link.minus + link.zero + link.plus > 0 {
            links.push(link);
        }
    }
    let mut fixed = BTreeMap::new();
    for &c in w {
        let values: Vec<u64> = observed.iter().map(|o| o.get(&ChildRef::Fixed(c)).copied().unwrap_or(0)).collect();
        if values.iter().all(|&v| v == 0) {
            continue;
        }
        let p = MultiplicityPoly::fit(&values, t - 2).ok_or("too few instances")?;
        fixed.insert(c, p);
    }
    let rule = GeneralRule { family: f, template: template.clone(), links, fixed, k_min: m };
    for (i, obs) in observed.iter().enumerate() {
        let predicted: BTreeMap<ChildRef, u64> = rule.children_at(i).into_iter().collect();
        if &predicted != obs {
            return Err(format!("instance {i} does not follow the pattern of instance {last}"));
        }
    }
    Ok(rule)
}

/// Checks every general rule against direct expansion of its instances
/// `0 .. max(t - 1, extra)` and of instance `t + 2`; instances must also be
/// pairwise non-isomorphic and distinct from `W`.
pub fn verify_general_rules(cr: &CompressedRules, explorer: &mut Explorer, extra: usize) -> Result<()> {
    let t = cr.t();
    let count = (t - 1).max(extra);
    let mut indices: Vec<usize> = (0..count).collect();
    if !indices.contains(&(t + 2)) {
        indices.push(t + 2);
    }
    let b = explorer.patterns().clone();
    let mut seen: HashMap<LabelSignature, String> = HashMap::new();
    for &w in &cr.w {
        seen.insert(cr.rules.class(w).signature.clone(), cr.rules.class(w).representative.to_string());
    }
    for fam in &cr.families {
        for &i in &indices {
            let inst = fam.template.instance(i);
            let k = cr.m + i;
            if !b.avoided_by(&inst) {
                return Err(Error::RuleMismatch(format!("{inst} (k = {k}) contains a pattern")));
            }
            let sig = explorer.signature(&inst)?;
            if let Some(other) = seen.insert(sig, inst.to_string()) {
                return Err(Error::RuleMismatch(format!("{inst} (k = {k}) is isomorphic to {other}")));
            }
            let kids = b.children_unchecked(&inst);
            let mut actual: BTreeMap<LabelSignature, u64> = BTreeMap::new();
            for s in explorer.signatures(&kids)? {
                *actual.entry(s).or_insert(0) += 1;
            }
            let mut predicted: BTreeMap<LabelSignature, u64> = BTreeMap::new();
            for (c, mult) in fam.rule.children_at(i) {
                let s = match c {
                    ChildRef::Fixed(w) => cr.rules.class(w).signature.clone(),
                    ChildRef::Member { family, index } => {
                        explorer.signature(&cr.families[family].template.instance(index))?
                    }
                };
                *predicted.entry(s).or_insert(0) += mult;
            }
            if actual != predicted {
                return Err(Error::RuleMismatch(format!(
                    "rule {} fails at k = {k} ({inst})",
                    cr.render_general(&fam.rule)
                )));
            }
        }
    }
    Ok(())
}

/// `Σ_{j>=0} M(v_j, w) x^j` for a fixed child `w` of `rule`.
pub fn multiplicity_gf(rule: &GeneralRule, w: ClassId) -> RationalFunction {
    rule.fixed.get(&w).map(MultiplicityPoly::gf).unwrap_or_else(RationalFunction::zero)
}

/// Classes of all family members with index below `n`, for diagnostics.
pub fn member_classes(cr: &CompressedRules) -> BTreeSet<ClassId> {
    cr.families.iter().flat_map(|f| f.classes.iter().copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gentree::explore;

    fn set(s: &str) -> PatternSet {
        PatternSet::parse(s).unwrap()
    }

    fn compress(s: &str, depth: usize) -> CompressedRules {
        let b = set(s);
        let mut ex = Explorer::new(b);
        let rs = ex.explore(depth).unwrap();
        induce_with(&mut ex, &rs).unwrap()
    }

    #[test]
    fn templates() {
        let a: Permutation = "879654321".parse().unwrap();
        let ts = FamilyTemplate::from_runs(&a);
        let (t, len) = ts.iter().find(|(t, _)| t.pos == 3).unwrap();
        assert_eq!(*len, 6);
        assert_eq!(t.with_run(0).unwrap().to_string(), "213");
        assert_eq!(t.with_run(1).unwrap().to_string(), "3241");
        assert_eq!(t.render(0), "(k-1)(k-2)k(k-3)(k-4)...1");
        let c = FamilyTemplate { skeleton: vec![], pos: 0, lo: 1, dir: RunDir::Desc, base: 1 };
        assert_eq!(c.render(0), "k(k-1)...1");
        assert_eq!(c.render(1), "(k+1)k...1");
    }

    #[test]
    fn multiplicity_polynomials() {
        let p = MultiplicityPoly::fit(&[2, 3, 4], 2).unwrap();
        assert_eq!(p.gf(), RationalFunction::from_ints(&[2, -1], &[1, -2, 1]).unwrap());
        assert_eq!(render_exponent(&p.in_k(2)), "k");
        assert!(MultiplicityPoly::fit(&[0, 0, 0], 2).unwrap().gf().is_zero());
        let q = MultiplicityPoly::fit(&[0, 1, 2], 2).unwrap();
        assert_eq!(render_exponent(&q.in_k(3)), "(k-3)");
        for j in 0..=25 {
            let s = p.gf().series_expand(25).unwrap();
            assert_eq!(s.coeff(j), Rat::from_integer((j as i64 + 2).into()));
        }
    }

    #[test]
    fn decreasing_chain_for_123_132() {
        let cr = compress("123,132", 10);
        assert_eq!(cr.m, 2);
        assert_eq!(cr.families.len(), 1);
        let text = cr.render_general(&cr.families[0].rule);
        assert_eq!(text, "k(k-1)...1 ~> 12^k, (k+1)k...1  (k>=2)");
        let mut ex = Explorer::new(cr.patterns().clone());
        verify_general_rules(&cr, &mut ex, 0).unwrap();
    }

    #[test]
    fn corrupted_rule_is_rejected() {
        let mut cr = compress("123,132", 10);
        let rule = &mut cr.families[0].rule;
        let (&w, p) = rule.fixed.iter().next().unwrap();
        let mut newton = p.newton().to_vec();
        newton[0] += 1;
        rule.fixed.insert(w, MultiplicityPoly::from_newton(newton));
        let mut ex = Explorer::new(cr.patterns().clone());
        let err = verify_general_rules(&cr, &mut ex, 0).unwrap_err();
        assert!(matches!(err, Error::RuleMismatch(ref s) if s.contains("k = 2")), "{err}");
    }

    #[test]
    fn closed_rule_sets_pass_through() {
        let rs = explore(&set("123,43215"), 8).unwrap();
        let cr = induce_general_rules(&rs).unwrap();
        assert!(cr.families.is_empty());
        assert_eq!(cr.w.len(), 3);
    }
}
